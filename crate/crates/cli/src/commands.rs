use std::f64::consts::E;
use std::fs;
use std::path::Path;

use omedian_core::bidding::{
    competitive_ratio, doubling_bids, dual_certificate, expected_ratio, optimal_det_ratio, payment, BidSet, Bidder,
    Universe,
};
use omedian_core::hardness::{build_adversarial, build_kl, kl_algorithm, verify_property_ii, GadgetViolation};
use omedian_core::io::instance_to_json;
use omedian_core::oblivious::Provenance;
use omedian_core::{
    build_cost_competitive, build_cost_competitive_relaxed, build_size_competitive, generate_random_metric,
    parse_instance, solve_sequence, verify_chain, AnyInstance, MedianInstance, Rational, Scalar, SolverTag,
};
use serde_json::{json, Value};

use crate::args::{
    AdvArgs, BidCommand, BidderArg, BuildArgs, Cli, Command, HardnessCommand, KlArgs, ModeArg, ObliviousCommand,
    SolverArg, UniverseArgs,
};
use crate::output::{Artifacts, Table};
use crate::Failure;

type Outcome = Result<Artifacts, Failure>;

pub fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Gen(a) => {
            let inst = generate_random_metric(a.customers, a.facilities, cli.seed)?;
            let mut art = Artifacts::summary(instance_to_json(&inst));
            art.summary_is_instance = true;
            Ok(art)
        }
        Command::Solve(a) => {
            let tag = solver_tag(a.solver, a.epsilon);
            match read_instance(&a.instance)? {
                AnyInstance::Float(i) => solve(&i, tag),
                AnyInstance::Rational(i) => solve(&i, tag),
            }
        }
        Command::Bid(b) => match b {
            BidCommand::Det(u) => bid_det(u),
            BidCommand::Rand(a) => bid_rand(&a.universe, a.trials, cli.seed),
            BidCommand::Optimal(a) => bid_optimal(a.n),
            BidCommand::Dual(a) => bid_dual(a.u),
        },
        Command::Oblivious(ObliviousCommand::Build(a)) => match read_instance(&a.instance)? {
            AnyInstance::Float(i) => build(&i, a, cli.seed),
            AnyInstance::Rational(i) => build(&i, a, cli.seed),
        },
        Command::Hardness(HardnessCommand::Adv(a)) => adversarial(a),
        Command::Hardness(HardnessCommand::Kl(a)) => kl(a),
    }
}

fn read_instance(path: &Path) -> Result<AnyInstance, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_instance(&text).map_err(|e| Failure::Usage(format!("malformed instance {}: {e}", path.display())))
}

fn solver_tag(s: SolverArg, epsilon: f64) -> SolverTag {
    match s {
        SolverArg::Exact => SolverTag::Exact,
        SolverArg::Local => SolverTag::LocalSearch { epsilon },
        SolverArg::Greedy => SolverTag::GreedySize,
    }
}

/// Plain text for a CSV cell: rationals as `p/q`, floats in shortest form.
fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn solve<S: Scalar>(inst: &MedianInstance<S>, tag: SolverTag) -> Outcome {
    let sol = solve_sequence(inst, tag)?;
    let rows = sol
        .per_k
        .iter()
        .map(|s| vec![s.k.to_string(), s.facilities.len().to_string(), cell(&s.cost.to_json())])
        .collect();
    let mut summary = sol.to_json(inst);
    summary["monotone"] = json!(sol.is_monotone());
    Ok(Artifacts::summary(summary).with_table(Table {
        header: vec!["k", "size", "cost"],
        rows,
    }))
}

fn load_universe<S: Scalar>(args: &UniverseArgs) -> Result<Universe<S>, Failure> {
    if let Some(n) = args.n {
        return Ok(Universe::range(n)?);
    }
    let path = args.universe.as_ref().expect("clap requires --n or --universe");
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let values: Vec<Value> = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("malformed universe {}: {e}", path.display())))?;
    let parsed = values
        .iter()
        .enumerate()
        .map(|(i, v)| S::parse_json(v).map_err(|e| Failure::Usage(format!("universe[{i}]: {e}"))))
        .collect::<Result<Vec<S>, _>>()?;
    Ok(Universe::finite(parsed)?)
}

fn elements<S: Scalar>(u: &Universe<S>) -> &[S] {
    match u {
        Universe::Finite(v) => v,
        Universe::PositiveReals { .. } => unreachable!("command-line universes are finite"),
    }
}

fn payment_table<S: Scalar>(bids: &BidSet<S>, thresholds: &[S]) -> Result<Table, Failure> {
    let rows = thresholds
        .iter()
        .map(|t| {
            let p = payment(bids, t)?;
            let r = p.clone() / t.clone();
            Ok(vec![cell(&t.to_json()), cell(&p.to_json()), cell(&r.to_json())])
        })
        .collect::<Result<_, omedian_core::Error>>()?;
    Ok(Table {
        header: vec!["T", "payment", "ratio"],
        rows,
    })
}

fn bid_det(args: &UniverseArgs) -> Outcome {
    let u = load_universe::<Rational>(args)?;
    let bids = doubling_bids(&u)?;
    let rep = competitive_ratio(&bids, &u)?;
    let four = Rational::from_u64(4);
    let mut art = Artifacts::summary(json!({
        "universe_size": elements(&u).len(),
        "bids": bids.bids().iter().map(Scalar::to_json).collect::<Vec<_>>(),
        "max_ratio": rep.max_ratio.to_json(),
        "argmax_T": rep.argmax_t.to_json(),
        "bound": four.to_json(),
    }))
    .with_table(payment_table(&bids, elements(&u))?);
    art.ok = rep.max_ratio <= four;
    Ok(art)
}

fn bid_rand(args: &UniverseArgs, trials: u64, seed: u64) -> Outcome {
    let u = load_universe::<f64>(args)?;
    let ts = elements(&u);
    let est = expected_ratio(&Bidder::Randomized { seed }, &u, ts, trials)?;
    let rows = est
        .per_threshold
        .iter()
        .map(|s| {
            vec![
                cell(&s.threshold.to_json()),
                cell(&(s.mean_ratio * s.threshold).to_json()),
                cell(&s.mean_ratio.to_json()),
            ]
        })
        .collect();
    let worst = est
        .per_threshold
        .iter()
        .find(|s| s.threshold == est.argmax_t)
        .expect("argmax is one of the thresholds");
    Ok(Artifacts::summary(json!({
        "universe_size": ts.len(),
        "trials": trials,
        "max_ratio": est.max_mean,
        "argmax_T": est.argmax_t,
        "std_err": worst.std_err,
        "bound": E,
    }))
    .with_table(Table {
        header: vec!["T", "payment", "ratio"],
        rows,
    }))
}

fn bid_optimal(n: u64) -> Outcome {
    let opt = optimal_det_ratio(n)?;
    let u = Universe::<Rational>::range(n)?;
    let check = competitive_ratio(&opt.bids, &u)?;
    let mut art = Artifacts::summary(json!({
        "n": n,
        "ratio": opt.ratio.to_f64(),
        "ratio_exact": opt.ratio.to_json(),
        "bids": opt.bids.bids().iter().map(|b| b.to_u64()).collect::<Vec<_>>(),
        "bound": opt.ratio.to_json(),
    }))
    .with_table(payment_table(&opt.bids, elements(&u))?);
    art.ok = check.max_ratio == opt.ratio;
    Ok(art)
}

fn bid_dual(u: u64) -> Outcome {
    let cert = dual_certificate(u)?;
    let rows = (0..cert.n)
        .map(|i| {
            vec![
                (i + 1).to_string(),
                cell(&cert.mu[i].to_json()),
                cell(&cert.pi[i].to_json()),
            ]
        })
        .collect();
    Ok(Artifacts::summary(json!({
        "U": u,
        "n": cert.n,
        "alpha": cert.alpha,
        "bound": cert.bound,
        "feasible": true,
    }))
    .with_table(Table {
        header: vec!["T", "mu", "pi"],
        rows,
    }))
}

fn build<S: Scalar>(inst: &MedianInstance<S>, a: &BuildArgs, seed: u64) -> Outcome {
    let tag = solver_tag(a.solver, a.epsilon);
    let offline = solve_sequence(inst, tag)?;
    let oracle = match tag {
        SolverTag::Exact => offline.clone(),
        _ => solve_sequence(inst, SolverTag::Exact)?,
    };
    let bidder = match a.bidder {
        BidderArg::Det => Bidder::Doubling,
        BidderArg::Rand => Bidder::Randomized { seed },
    };
    let mut lambda = None;
    let chain = match a.mode {
        ModeArg::Cost if a.relaxed => {
            let (chain, l) = build_cost_competitive_relaxed(inst, &offline, &bidder)?;
            lambda = Some(l);
            chain
        }
        ModeArg::Cost => build_cost_competitive(inst, &offline, &bidder)?,
        ModeArg::Size => {
            let bids = bidder.bid_set(&Universe::<S>::range(offline.n() as u64)?)?;
            build_size_competitive(inst, &offline, &bids)?
        }
    };
    let report = verify_chain(inst, &chain, &oracle)?;

    let mut failures: Vec<String> = Vec::new();
    if !report.nesting_ok {
        failures.push("chain is not nested".into());
    }
    let mut beta = None;
    match a.mode {
        ModeArg::Cost => {
            if let Some(row) = report.rows.iter().find(|r| r.size > r.k) {
                failures.push(format!("|F_{}| = {} exceeds the budget", row.k, row.size));
            }
            if let Provenance::Cost { bids, .. } = &chain.provenance {
                let b = if bids.is_empty() {
                    S::one()
                } else {
                    let positive: Vec<S> = offline.costs().into_iter().filter(|c| !c.is_zero()).collect();
                    competitive_ratio(&BidSet::new(bids.clone())?, &Universe::finite(positive)?)?.max_ratio
                };
                // cost(F_k) ≤ 2β cost(F*_k) holds only on metric instances
                if lambda.is_none() {
                    let two_beta = S::from_u64(2) * b.clone();
                    if let Some(row) = report
                        .rows
                        .iter()
                        .find(|r| !r.cost.approx_le(&(two_beta.clone() * offline.cost(r.k).clone())))
                    {
                        failures.push(format!("cost(F_{}) exceeds 2 beta cost(F*_{})", row.k, row.k));
                    }
                }
                beta = Some(b);
            }
        }
        ModeArg::Size => {
            if let Some(k) = report.first_cost_excess() {
                failures.push(format!("cost(F_{k}) exceeds opt_{k}"));
            }
        }
    }

    let (last, header) = match a.mode {
        ModeArg::Cost => ("cost_ratio", vec!["k", "size", "cost", "opt", "cost_ratio"]),
        ModeArg::Size => ("size_ratio", vec!["k", "size", "cost", "opt", "size_ratio"]),
    };
    let rows = report
        .rows
        .iter()
        .map(|r| {
            let tail = if last == "cost_ratio" {
                r.cost_ratio.to_json()
            } else {
                r.size_ratio.to_json()
            };
            vec![
                r.k.to_string(),
                r.size.to_string(),
                cell(&r.cost.to_json()),
                cell(&r.opt.to_json()),
                cell(&tail),
            ]
        })
        .collect();
    let mut summary = json!({
        "mode": a.mode.as_str(),
        "solver": tag.to_string(),
        "bidder": bidder.to_string(),
        "chain": chain.to_json(inst),
        "max_cost_ratio": report.max_cost_ratio.to_json(),
        "max_size_ratio": report.max_size_ratio.to_json(),
        "nesting_ok": report.nesting_ok,
        "failures": failures,
    });
    if let Some(b) = beta {
        summary["beta"] = b.to_json();
    }
    if let Some(l) = lambda {
        summary["lambda_star"] = l.to_json();
    }
    let mut art = Artifacts::summary(summary).with_table(Table { header, rows });
    art.ok = failures_empty(&art.summary);
    Ok(art)
}

fn failures_empty(summary: &Value) -> bool {
    summary["failures"].as_array().is_none_or(Vec::is_empty)
}

fn adversarial(a: &AdvArgs) -> Outcome {
    let adv = build_adversarial(a.m)?;
    let inst = &adv.instance;
    let clusters: Vec<Value> = adv.clusters.iter().map(|c| json!(inst.facility_labels(c))).collect();
    let costs = (1..=adv.m)
        .map(|j| inst.cost(adv.cluster(j)).map(|c| c.to_json()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut summary = json!({
        "m": adv.m,
        "customers": inst.num_customers(),
        "facilities": inst.num_facilities(),
        "clusters": clusters,
        "delta": adv.delta.iter().map(Scalar::to_json).collect::<Vec<_>>(),
        "cluster_costs": costs,
    });
    let mut ok = true;
    if a.verify {
        let rep = verify_property_ii(&adv, inst.num_facilities())?;
        let violation = rep.violation.as_ref().map(|(set, v)| {
            let kind = match v {
                GadgetViolation::PropertyII { k } => format!("property_ii(k={k})"),
                GadgetViolation::NotUnique { k } => format!("not_unique(k={k})"),
                GadgetViolation::WitnessTooClose { j } => format!("witness_too_close(j={j})"),
            };
            json!({ "set": inst.facility_labels(set), "kind": kind })
        });
        summary["property_check"] = json!({
            "subsets_checked": rep.subsets_checked,
            "holds": rep.holds(),
            "violation": violation,
        });
        ok = rep.holds();
    }
    let mut instance = instance_to_json(inst);
    instance["meta"] = json!({ "clusters": clusters, "m": adv.m });
    let mut art = Artifacts::summary(summary);
    art.instance = Some(instance);
    art.print_instance = a.emit_instance;
    art.ok = ok;
    Ok(art)
}

fn kl(a: &KlArgs) -> Outcome {
    let gadget = build_kl(a.l)?;
    let c = gadget.costs()?;
    let mut summary = json!({
        "l": a.l,
        "delta": gadget.delta.to_json(),
        "cost_f": c.cost_f.to_json(),
        "cost_G": c.cost_g.to_json(),
        "cost_g_i": c.cost_single_leaf.to_json(),
        "cost_G_minus_g_i_plus_f": c.cost_swap.to_json(),
        "ratio_small": c.small_ratio().to_json(),
        "ratio_large": c.large_ratio().to_json(),
        "target": gadget.target_ratio().to_json(),
    });
    if a.run_algorithm {
        let out = kl_algorithm(&gadget.instance, a.k, a.l)?;
        summary["algorithm"] = json!({
            "k": a.k,
            "option": out.option.to_string(),
            "small": gadget.instance.facility_labels(&out.small),
            "large": gadget.instance.facility_labels(&out.large),
            "ratio": out.ratio.to_json(),
            "within_target": out.ratio.approx_le(&gadget.target_ratio()),
        });
    }
    let mut art = Artifacts::summary(summary);
    let mut instance = instance_to_json(&gadget.instance);
    instance["meta"] = json!({ "l": a.l });
    art.instance = Some(instance);
    art.print_instance = a.emit_instance;
    Ok(art)
}
