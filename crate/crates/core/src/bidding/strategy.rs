//! Doubling and randomized geometric bidding strategies.

use std::f64::consts::E;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{BidSet, Universe};
use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, Scalar};

/// Maps raw (unrestricted) bids into the universe: each bid becomes the
/// largest element of U not above it (or is skipped), and `max(U)` is
/// appended so every threshold in U is covered.
fn restrict<S: Scalar>(universe: &Universe<S>, raw: Vec<S>) -> Result<BidSet<S>> {
    match universe {
        Universe::PositiveReals { .. } => BidSet::new(raw),
        Universe::Finite(_) => {
            let mut out: Vec<S> = Vec::with_capacity(raw.len() + 1);
            for b in &raw {
                if let Some(u) = universe.floor(b) {
                    if out.last() != Some(u) {
                        out.push(u.clone());
                    }
                }
            }
            let max = universe.max();
            if out.last() != Some(max) {
                out.push(max.clone());
            }
            BidSet::new(out)
        }
    }
}

fn pow2<S: Scalar>(j: i32) -> S {
    S::from_f64(2f64.powi(j)).expect("power of two within f64 range")
}

/// Powers of two, restricted to the universe.
///
/// Over the reals the bids run from the largest power of two `≤ low` to the
/// smallest one `≥ high`.
pub fn doubling_bids<S: Scalar>(universe: &Universe<S>) -> Result<BidSet<S>> {
    let low = universe.min();
    let high = universe.max();
    let mut j = low.to_f64().log2().floor() as i32;
    while pow2::<S>(j) > *low {
        j -= 1;
    }
    let mut raw = Vec::new();
    loop {
        let p: S = pow2(j);
        let done = p >= *high;
        raw.push(p);
        if done {
            break;
        }
        j += 1;
    }
    let mut bids = restrict(universe, raw)?;
    bids.includes_zero_sentinel = true;
    Ok(bids)
}

/// `e^{i+ξ}` over all integers `i` needed to cover the universe.
///
/// The sequence is truncated below `low` for the reals and below
/// `min(U)/e²` for finite universes (restriction would drop those anyway).
pub fn randomized_bids_with_offset<S: Scalar>(universe: &Universe<S>, xi: f64) -> Result<BidSet<S>> {
    if !(0.0..=1.0).contains(&xi) {
        return Err(Error::InvalidArgument(format!("offset xi = {xi} outside [0, 1]")));
    }
    let (cut, high) = match universe {
        Universe::PositiveReals { low, high } => (low.to_f64(), high),
        Universe::Finite(v) => (v[0].to_f64() / (E * E), v.last().expect("non-empty")),
    };
    let mut i = (cut.ln() - xi).floor() as i64 - 1;
    let mut raw = Vec::new();
    loop {
        let v = ((i as f64) + xi).exp();
        i += 1;
        if v < cut {
            continue;
        }
        let b = S::from_f64(v).ok_or_else(|| Error::InvalidArgument(format!("bid e^{} overflows", i as f64 + xi)))?;
        let done = b >= *high;
        raw.push(b);
        if done {
            break;
        }
    }
    let mut bids = restrict(universe, raw)?;
    bids.includes_zero_sentinel = true;
    Ok(bids)
}

/// Random offset `ξ ∈ [0, 1)` from a ChaCha8 stream seeded with `seed`.
pub fn random_offset(seed: u64) -> f64 {
    ChaCha8Rng::seed_from_u64(seed).random::<f64>()
}

pub fn randomized_bids<S: Scalar>(universe: &Universe<S>, seed: u64) -> Result<BidSet<S>> {
    randomized_bids_with_offset(universe, random_offset(seed))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bidder {
    Doubling,
    Randomized { seed: u64 },
}

impl Bidder {
    pub fn bid_set<S: Scalar>(&self, universe: &Universe<S>) -> Result<BidSet<S>> {
        match self {
            Bidder::Doubling => doubling_bids(universe),
            Bidder::Randomized { seed } => randomized_bids(universe, *seed),
        }
    }

    pub fn is_randomized(&self) -> bool {
        matches!(self, Bidder::Randomized { .. })
    }
}

impl fmt::Display for Bidder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bidder::Doubling => f.write_str("det"),
            Bidder::Randomized { seed } => write!(f, "rand(seed={seed})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdStat {
    pub threshold: f64,
    pub mean_ratio: f64,
    pub std_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedRatio {
    pub trials: u64,
    pub per_threshold: Vec<ThresholdStat>,
    pub max_mean: f64,
    pub argmax_t: f64,
}

const CHUNK: u64 = 1024;

/// Monte-Carlo estimate of `E[payment]/T` for every threshold.
///
/// Trial `i` of a randomized bidder uses seed `base + i`. Trials are grouped
/// in fixed-size chunks whose compensated partial sums are merged in chunk
/// order, so the result does not depend on thread scheduling.
pub fn expected_ratio<S: Scalar>(
    bidder: &Bidder,
    universe: &Universe<S>,
    thresholds: &[S],
    trials: u64,
) -> Result<ExpectedRatio> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    if thresholds.is_empty() {
        return Err(Error::InvalidArgument("no thresholds given".into()));
    }
    let ratios_for = |bids: &BidSet<S>| -> Result<Vec<f64>> {
        let prefix: Vec<f64> = bids
            .bids()
            .iter()
            .scan(0.0, |acc, b| {
                *acc += b.to_f64();
                Some(*acc)
            })
            .collect();
        thresholds
            .iter()
            .map(|t| Ok(prefix[bids.covering_index(t)?] / t.to_f64()))
            .collect()
    };

    let (trials_run, sums, sq_sums) = match bidder {
        Bidder::Doubling => {
            let r = ratios_for(&doubling_bids(universe)?)?;
            let sq = r.iter().map(|x| x * x).collect();
            (1u64, r, sq)
        }
        Bidder::Randomized { seed } => {
            let n_chunks = trials.div_ceil(CHUNK);
            let partials: Vec<(Vec<f64>, Vec<f64>)> = (0..n_chunks)
                .into_par_iter()
                .map(|c| {
                    let lo = c * CHUNK;
                    let hi = (lo + CHUNK).min(trials);
                    let mut samples: Vec<Vec<f64>> = vec![Vec::with_capacity((hi - lo) as usize); thresholds.len()];
                    for i in lo..hi {
                        let bids = randomized_bids(universe, seed.wrapping_add(i))?;
                        for (col, r) in samples.iter_mut().zip(ratios_for(&bids)?) {
                            col.push(r);
                        }
                    }
                    let sums = samples.iter().map(|c| compensated_sum(c.iter().copied())).collect();
                    let sq = samples.iter().map(|c| compensated_sum(c.iter().map(|x| x * x))).collect();
                    Ok((sums, sq))
                })
                .collect::<Result<_>>()?;
            let (sum_parts, sq_parts): (Vec<Vec<f64>>, Vec<Vec<f64>>) = partials.into_iter().unzip();
            let merge = |parts: &[Vec<f64>]| -> Vec<f64> {
                (0..thresholds.len())
                    .map(|j| compensated_sum(parts.iter().map(|p| p[j])))
                    .collect()
            };
            (trials, merge(&sum_parts), merge(&sq_parts))
        }
    };

    let n = trials_run as f64;
    let per_threshold: Vec<ThresholdStat> = thresholds
        .iter()
        .zip(sums.iter().zip(&sq_sums))
        .map(|(t, (s, sq))| {
            let mean = s / n;
            let var = if trials_run > 1 {
                ((sq - n * mean * mean) / (n - 1.0)).max(0.0)
            } else {
                0.0
            };
            ThresholdStat {
                threshold: t.to_f64(),
                mean_ratio: mean,
                std_err: (var / n).sqrt(),
            }
        })
        .collect();
    let best = per_threshold
        .iter()
        .fold(&per_threshold[0], |acc, s| if s.mean_ratio > acc.mean_ratio { s } else { acc });
    Ok(ExpectedRatio {
        trials,
        max_mean: best.mean_ratio,
        argmax_t: best.threshold,
        per_threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bidding::{competitive_ratio, payment};
    use crate::scalar::Rational;

    fn q(x: u64) -> Rational {
        Rational::from_u64(x)
    }

    #[test]
    fn doubling_on_one_to_ten() {
        let u = Universe::<Rational>::range(10).unwrap();
        let b = doubling_bids(&u).unwrap();
        assert_eq!(b.bids(), &[q(1), q(2), q(4), q(8), q(10)]);
        let rep = competitive_ratio(&b, &u).unwrap();
        assert_eq!(rep.max_ratio, q(3));
        assert_eq!(rep.argmax_t, q(5));
    }

    #[test]
    fn doubling_single_element() {
        let u = Universe::finite(vec![q(5)]).unwrap();
        assert_eq!(doubling_bids(&u).unwrap().bids(), &[q(5)]);
    }

    #[test]
    fn doubling_reals_horizon() {
        let u = Universe::reals(1.0, 16.0).unwrap();
        assert_eq!(doubling_bids(&u).unwrap().bids(), &[1.0, 2.0, 4.0, 8.0, 16.0]);
    }

    #[test]
    fn doubling_fractional_universe() {
        let u = Universe::finite(vec![Rational::from_ratio(1, 3), Rational::from_ratio(5, 2), q(3)]).unwrap();
        let b = doubling_bids(&u).unwrap();
        // 1/4 skipped, 1/2 and 1 map to 1/3, 2 -> 1/3, 4 -> 3
        assert_eq!(b.bids(), &[Rational::from_ratio(1, 3), q(3)]);
    }

    #[test]
    fn randomized_offset_one() {
        let u = Universe::reals(1.0, 20.0).unwrap();
        let b = randomized_bids_with_offset(&u, 1.0).unwrap();
        // e^0 = 1 sits exactly on the truncation point and is kept
        let expect = [1.0, E, E * E, E.powi(3)];
        assert_eq!(b.len(), 4);
        for (x, y) in b.bids().iter().zip(expect) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn randomized_single_element_and_seed_determinism() {
        let u = Universe::finite(vec![q(7)]).unwrap();
        for seed in 0..5 {
            assert_eq!(randomized_bids(&u, seed).unwrap().bids(), &[q(7)]);
        }
        let u = Universe::<f64>::range(1000).unwrap();
        assert_eq!(randomized_bids(&u, 9).unwrap(), randomized_bids(&u, 9).unwrap());
        assert!(randomized_bids_with_offset(&u, 1.5).is_err());
    }

    #[test]
    fn randomized_restriction_covers_universe() {
        let u = Universe::<f64>::range(50).unwrap();
        for seed in 0..50 {
            let b = randomized_bids(&u, seed).unwrap();
            assert_eq!(b.max_bid(), Some(&50.0));
            assert!(b.bids().iter().all(|x| u.contains(x)));
            for t in 1..=50 {
                payment(&b, &(t as f64)).unwrap();
            }
        }
    }

    #[test]
    fn deterministic_expected_ratio_has_no_variance() {
        let u = Universe::<f64>::range(10).unwrap();
        let ts: Vec<f64> = (1..=10).map(f64::from).collect();
        let rep = expected_ratio(&Bidder::Doubling, &u, &ts, 100).unwrap();
        assert_eq!(rep.max_mean, 3.0);
        assert_eq!(rep.argmax_t, 5.0);
        assert!(rep.per_threshold.iter().all(|s| s.std_err == 0.0));
    }

    #[test]
    fn expected_ratio_is_reproducible() {
        let u = Universe::reals(1e-6, 200.0).unwrap();
        let ts = [10.0, 100.0];
        let a = expected_ratio(&Bidder::Randomized { seed: 3 }, &u, &ts, 3000).unwrap();
        let b = expected_ratio(&Bidder::Randomized { seed: 3 }, &u, &ts, 3000).unwrap();
        assert_eq!(a, b);
        assert!(expected_ratio(&Bidder::Doubling, &u, &ts, 0).is_err());
    }
}
