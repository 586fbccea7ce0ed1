//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line with
//! its wall time; the process exits non-zero if any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use omedian_core::bidding::{
    competitive_ratio, doubling_bids, dual_certificate, expected_ratio, optimal_det_ratio, payment,
    verify_dual_condition, BidSet, Bidder, Universe,
};
use omedian_core::hardness::{build_adversarial, build_kl, extract_bid_set, kl_algorithm, verify_property_ii};
use omedian_core::{
    build_cost_competitive, build_size_competitive, gamma, generate_random_metric, solve_sequence, verify_chain,
    FacilitySet, MedianInstance, OfflineSolution, Rational, Scalar, SolverTag,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const E: f64 = std::f64::consts::E;

fn q(x: u64) -> Rational {
    Rational::from_u64(x)
}

fn frac(p: i64, d: i64) -> Rational {
    Rational::from_ratio(p, d)
}

/// The shared instance suite: 8-12 facilities, 10-20 customers.
fn suite(count: u64) -> Vec<MedianInstance<Rational>> {
    (0..count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + i);
            let f = rng.random_range(8..=12);
            let c = rng.random_range(10..=20);
            generate_random_metric(c, f, i).unwrap()
        })
        .collect()
}

fn random_subset(rng: &mut ChaCha8Rng, n: usize) -> FacilitySet {
    loop {
        let set: FacilitySet = (0..n).filter(|_| rng.random_bool(0.4)).collect();
        if !set.is_empty() {
            return set;
        }
    }
}

fn c1_doubling() {
    let n = 10_000;
    let u = Universe::<Rational>::range(n).unwrap();
    let bids = doubling_bids(&u).unwrap();
    let rep = competitive_ratio(&bids, &u).unwrap();
    assert!(rep.max_ratio <= q(4), "max ratio {}", rep.max_ratio);
    // brute-force scan, independent of the report
    for t in 1..=n {
        assert!(payment(&bids, &q(t)).unwrap() <= q(4 * t), "T = {t}");
    }

    let t = q((1 << 20) + 1);
    let reals = Universe::reals(q(1), q(1 << 22)).unwrap();
    let probe = payment(&doubling_bids(&reals).unwrap(), &t).unwrap() / t;
    assert!(probe >= frac(39, 10), "probe ratio {probe}");
}

fn c2_randomized() {
    let ts = [10.0, 100.0, 1000.0];
    let u = Universe::reals(1e-6, 1000.0).unwrap();
    let est = expected_ratio(&Bidder::Randomized { seed: 7 }, &u, &ts, 100_000).unwrap();
    for s in &est.per_threshold {
        let err = (s.mean_ratio - E).abs();
        assert!(err <= 0.03, "T = {}: mean {}", s.threshold, s.mean_ratio);
        assert!(err <= 3.0 * s.std_err, "T = {}: {} sigma", s.threshold, err / s.std_err);
    }
}

/// Best ratio over every bid set on [n] that contains n. A set's ratio is
/// attained just above each bid, at `T = previous bid + 1`.
fn exhaustive_ratio(n: u64) -> (u64, u64) {
    let mut best = (u64::MAX, 1u64);
    for mask in 0u64..(1 << (n - 1)) {
        let (mut prev, mut paid, mut worst) = (0u64, 0u64, (0u64, 1u64));
        for b in (1..n).filter(|b| mask >> (b - 1) & 1 == 1).chain([n]) {
            paid += b;
            if paid * worst.1 > worst.0 * (prev + 1) {
                worst = (paid, prev + 1);
            }
            prev = b;
        }
        if worst.0 * best.1 < best.0 * worst.1 {
            best = worst;
        }
    }
    best
}

fn c3_optimal() {
    for n in 1..=20u64 {
        let opt = optimal_det_ratio(n).unwrap();
        let (p, d) = exhaustive_ratio(n);
        assert_eq!(opt.ratio, frac(p as i64, d as i64), "n = {n}");
        let u = Universe::range(n).unwrap();
        assert_eq!(competitive_ratio(&opt.bids, &u).unwrap().max_ratio, opt.ratio, "n = {n}");
    }
    let mut prev = q(0);
    let checked: Vec<u64> = (1..=1000).chain((1250..=10_000).step_by(250)).collect();
    for n in checked {
        let r = optimal_det_ratio(n).unwrap().ratio;
        assert!(r >= prev && r <= q(4), "n = {n}: {r}");
        prev = r;
    }
    let top = optimal_det_ratio(10_000).unwrap().ratio;
    assert!(top > q(3));
    assert_eq!(top, frac(19, 5), "regression golden");
}

fn c4_dual() {
    let goldens = [(10, 1.646343573127), (30, 1.770345776821), (100, 1.871367624660)];
    let mut prev = 0.0;
    for (u, golden) in goldens {
        let cert = dual_certificate(u).unwrap();
        let verdict = verify_dual_condition(&cert);
        assert!(verdict.feasible, "U = {u}: witness {:?}", verdict.witness);
        assert!((cert.bound - golden).abs() < 1e-9, "U = {u}: bound {}", cert.bound);
        assert!(cert.bound > prev);
        prev = cert.bound;
    }
}

fn c5_cost_chains() {
    let instances = suite(100);
    let two_e = 2.0 * E;
    for (i, inst) in instances.iter().enumerate() {
        let off = solve_sequence(inst, SolverTag::Exact).unwrap();
        let chain = build_cost_competitive(inst, &off, &Bidder::Doubling).unwrap();
        let rep = verify_chain(inst, &chain, &off).unwrap();
        assert!(rep.nesting_ok && rep.sizes_within_budget(), "instance {i}");
        assert!(rep.max_cost_ratio.approx_le(&q(8)), "instance {i}: {:?}", rep.max_cost_ratio);

        let fi = inst.to_float();
        let foff = solve_sequence(&fi, SolverTag::Exact).unwrap();
        let n = fi.num_facilities();
        let mut max_sum = 0.0;
        let mut per_k = vec![0.0; n];
        let seeds = 1000u64;
        for seed in 0..seeds {
            let chain = build_cost_competitive(&fi, &foff, &Bidder::Randomized { seed }).unwrap();
            let rep = verify_chain(&fi, &chain, &foff).unwrap();
            assert!(rep.nesting_ok && rep.sizes_within_budget(), "instance {i} seed {seed}");
            max_sum += rep.max_cost_ratio.to_f64();
            for row in &rep.rows {
                per_k[row.k - 1] += row.cost_ratio.to_f64();
            }
        }
        let mean_max = max_sum / seeds as f64;
        assert!(mean_max <= two_e + 0.1, "instance {i}: mean max ratio {mean_max}");
        for (k, s) in per_k.iter().enumerate() {
            assert!(s / seeds as f64 <= two_e, "instance {i}, k = {}: {}", k + 1, s / seeds as f64);
        }
    }
}

fn c6_size_chains() {
    for (i, inst) in suite(100).iter().enumerate() {
        let off = solve_sequence(inst, SolverTag::Exact).unwrap();
        let n = inst.num_facilities() as u64;
        let bids = doubling_bids(&Universe::range(n).unwrap()).unwrap();
        let chain = build_size_competitive(inst, &off, &bids).unwrap();
        assert!(chain.is_nested(), "instance {i}");
        for k in 1..=n as usize {
            let f = chain.set(k);
            assert!(inst.cost(f).unwrap() <= off.cost(k).clone(), "instance {i}, k = {k}");
            assert!(f.len() <= 4 * k, "instance {i}, k = {k}");
        }
    }
}

fn factorial(m: usize) -> u64 {
    (1..=m as u64).product()
}

fn c7_adversarial() {
    for m in 2..=5usize {
        let adv = build_adversarial(m).unwrap();
        // m!·δ_j = m! − 1 + δ_{j−1}, δ_0 = 2
        let mf = q(factorial(m));
        let mut delta = q(2);
        for j in 1..=m {
            delta = (mf.clone() - q(1) + delta) / mf.clone();
            assert_eq!(adv.delta(j), delta, "m = {m}, j = {j}");
            let cost = adv.instance.cost(adv.cluster(j)).unwrap();
            assert_eq!(cost, mf.clone() * delta.clone(), "m = {m}, j = {j}");
        }
        let nf = adv.instance.num_facilities();
        let rep = verify_property_ii(&adv, nf).unwrap();
        assert!(rep.holds(), "m = {m}: {:?}", rep.violation);

        let off: OfflineSolution<Rational> = solve_sequence(&adv.instance, SolverTag::Exact).unwrap();
        let universe = Universe::<Rational>::range(nf as u64).unwrap();
        let mut bid_sets = vec![
            doubling_bids(&universe).unwrap(),
            optimal_det_ratio(nf as u64).unwrap().bids,
            BidSet::new((1..=nf as u64).map(q).collect()).unwrap(),
            BidSet::new(vec![q(nf as u64)]).unwrap(),
        ];
        bid_sets.extend((0..8).map(|s| omedian_core::bidding::randomized_bids(&universe, s).unwrap()));
        let small = Universe::<Rational>::range(m as u64).unwrap();
        for bids in &bid_sets {
            let chain = build_size_competitive(&adv.instance, &off, bids).unwrap();
            let size_ratio = verify_chain(&adv.instance, &chain, &off).unwrap().max_size_ratio;
            let extracted = extract_bid_set(&adv, &chain).unwrap();
            let bid_ratio = competitive_ratio(&extracted, &small).unwrap().max_ratio;
            assert!(bid_ratio <= size_ratio, "m = {m}, bids {:?}: {bid_ratio} > {size_ratio}", bids.bids());
        }
    }
}

fn c8_kl() {
    for l in 2..=10usize {
        let g = build_kl(l).unwrap();
        let c = g.costs().unwrap();
        let lq = q(l as u64);
        let d = q(1) / lq.clone();
        let target = q(2) - d.clone();
        // closed forms for the star: hub at distance 1, own leaf at δ, other leaves at 2 + δ
        assert_eq!(c.cost_f, lq.clone());
        assert_eq!(c.cost_g, lq.clone() * d.clone());
        assert_eq!(c.cost_single_leaf, d.clone() + (lq.clone() - q(1)) * (q(2) + d.clone()));
        assert_eq!(c.cost_swap, q(1) + (lq - q(1)) * d);
        assert_eq!(c.small_ratio(), target);
        assert_eq!(c.large_ratio(), target);
        let out = kl_algorithm(&g.instance, 1, l).unwrap();
        assert_eq!(out.ratio.finite(), Some(&target), "l = {l}");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(88);
    for i in 0..200u64 {
        let f = rng.random_range(2..=9);
        let c = rng.random_range(2..=12);
        let inst = generate_random_metric(c, f, 5000 + i).unwrap();
        for l in 2..=f {
            let bound = 2.0 - 1.0 / l as f64 + 1e-9;
            for k in 1..l {
                let out = kl_algorithm(&inst, k, l).unwrap();
                let r = out.ratio.to_f64();
                assert!(r <= bound, "instance {i}, k = {k}, l = {l}: {r}");
            }
        }
    }
}

fn c9_gamma() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut triples = 0;
    for i in 0..1000u64 {
        let f = rng.random_range(1..=10);
        let c = rng.random_range(1..=12);
        let inst = generate_random_metric(c, f, 9000 + i).unwrap();
        for _ in 0..10 {
            let a = random_subset(&mut rng, f);
            let b = random_subset(&mut rng, f);
            let g = gamma(&inst, &a, &b).unwrap();
            assert!(g.is_subset(&b) && g.len() <= a.len());
            for x in 0..inst.num_customers() {
                let lhs = inst.service_distance(x, &g);
                let rhs = q(2) * inst.service_distance(x, &a) + inst.service_distance(x, &b);
                assert!(lhs <= rhs, "instance {i}, customer {x}");
            }
            triples += 1;
        }
    }
    assert_eq!(triples, 10_000);
}

fn run_cli(args: &[&str], out_dir: &Path) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_omedian"))
        .args(args)
        .arg("--out-dir")
        .arg(out_dir)
        .env_remove("OMEDIAN_OUT_DIR")
        .output()
        .unwrap();
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn dir_contents(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn c10_reproducible() {
    let work = tempfile::tempdir().unwrap();
    let inst_path = work.path().join("inst.json");
    let (code, bytes) = run_cli(&["gen", "--customers", "12", "--facilities", "9", "--seed", "3"], work.path());
    assert_eq!(code, 0);
    std::fs::write(&inst_path, bytes).unwrap();
    let inst = inst_path.to_str().unwrap();

    let commands: Vec<Vec<&str>> = vec![
        vec!["gen", "--customers", "12", "--facilities", "9", "--seed", "3"],
        vec!["solve", "--instance", inst, "--solver", "local"],
        vec!["bid", "det", "--n", "10000"],
        vec!["bid", "rand", "--n", "50", "--trials", "20000", "--seed", "11"],
        vec!["bid", "optimal", "--n", "200"],
        vec!["bid", "dual", "--U", "30"],
        vec!["oblivious", "build", "--instance", inst, "--mode", "cost", "--bidder", "det"],
        vec!["oblivious", "build", "--instance", inst, "--mode", "cost", "--bidder", "rand", "--seed", "5"],
        vec!["oblivious", "build", "--instance", inst, "--mode", "size", "--bidder", "rand", "--seed", "5"],
        vec!["hardness", "adv", "--m", "3", "--verify"],
        vec!["hardness", "kl", "--l", "6", "--run-algorithm", "--k", "2"],
    ];
    for args in &commands {
        for format in ["json", "csv"] {
            let mut full = args.clone();
            full.extend(["--format", format]);
            let runs: Vec<_> = (0..2)
                .map(|_| {
                    let dir = tempfile::tempdir().unwrap();
                    let (code, stdout) = run_cli(&full, dir.path());
                    (code, stdout, dir_contents(dir.path()))
                })
                .collect();
            assert_eq!(runs[0].0, 0, "{full:?} exited {}", runs[0].0);
            assert!(!runs[0].2.is_empty(), "{full:?} wrote no artifacts");
            assert!(runs[0] == runs[1], "{full:?} is not reproducible");
        }
    }
}

fn main() {
    let criteria: [(&str, fn(), u64); 10] = [
        ("1 doubling bids are 4-competitive", c1_doubling, 1),
        ("2 randomized bids average e", c2_randomized, 10),
        ("3 optimal deterministic ratio", c3_optimal, 30),
        ("4 dual certificates", c4_dual, 60),
        ("5 cost-competitive chains", c5_cost_chains, 120),
        ("6 size-competitive chains", c6_size_chains, 120),
        ("7 adversarial gadget", c7_adversarial, 300),
        ("8 kl gadget and algorithm", c8_kl, 120),
        ("9 gamma service bound", c9_gamma, 30),
        ("10 CLI reproducibility", c10_reproducible, 600),
    ];
    panic::set_hook(Box::new(|info| eprintln!("  {info}")));
    let mut failed = 0;
    for (name, check, budget) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check));
        let took = start.elapsed();
        let in_time = took <= Duration::from_secs(budget);
        let pass = outcome.is_ok() && in_time;
        let note = if outcome.is_ok() && !in_time { " (over time budget)" } else { "" };
        println!(
            "{} criterion {name}: {:.2?} of {budget}s{note}",
            if pass { "PASS" } else { "FAIL" },
            took
        );
        failed += usize::from(!pass);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
