//! Exactly optimal deterministic bid sets over `[n]`.
//!
//! For bids `b_1 < … < b_m = n` the worst thresholds sit just above each bid,
//! so the ratio is `max_i (b_1 + … + b_i) / (b_{i-1} + 1)` with `b_0 = 0`.
//!
//! Whether ratio `r` is achievable is decided by a dynamic program over the
//! last bid: for each `b` keep the smallest prefix sum of a feasible sequence
//! ending in `b`. A smaller prefix never hurts later constraints, so this is
//! exact. Bidding the largest affordable value each step is not: for `n = 9`
//! it reaches only `8/3` while `13/5` is possible.
//!
//! The optimum is bracketed by a float bisection and then pinned exactly by
//! repeatedly asking for a strictly better ratio until none exists.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_bigint::BigInt;

use super::BidSet;
use crate::error::{Error, Result};
use crate::scalar::Rational;

/// Largest `n` accepted by [`optimal_det_ratio`].
pub const OPTIMAL_RATIO_LIMIT: u64 = 20_000;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalBids {
    pub n: u64,
    pub ratio: Rational,
    pub bids: BidSet<Rational>,
}

/// Ratio `p/q` in lowest terms is not required; comparisons cross-multiply.
#[derive(Debug, Clone, Copy)]
struct Frac {
    p: i128,
    q: i128,
}

impl Frac {
    fn lt(self, o: Frac) -> bool {
        self.p * o.q < o.p * self.q
    }
}

/// A bid sequence ending in `n` with ratio `<= r` (`< r` when `strict`), if any.
fn feasible(n: u64, r: Frac, strict: bool) -> Option<Vec<u64>> {
    let n = n as usize;
    // largest next bid allowed after last bid `a` with prefix `s`
    let reach = |a: usize, s: i128| (r.p * (a as i128 + 1) - r.q * s - i128::from(strict)).div_euclid(r.q);
    let mut best = vec![i128::MAX; n + 1];
    let mut parent = vec![0usize; n + 1];
    best[0] = 0;
    // entries (prefix, last bid, reach); min prefix first, then smallest bid
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((0i128, 0usize, reach(0, 0))));
    for b in 1..=n {
        while let Some(&Reverse((_, _, lim))) = heap.peek() {
            if lim >= b as i128 {
                break;
            }
            heap.pop();
        }
        let &Reverse((s, a, _)) = heap.peek()?;
        best[b] = s + b as i128;
        parent[b] = a;
        heap.push(Reverse((best[b], b, reach(b, best[b]))));
    }
    let mut bids = Vec::new();
    let mut b = n;
    while b != 0 {
        bids.push(b as u64);
        b = parent[b];
    }
    bids.reverse();
    Some(bids)
}

fn ratio_of(bids: &[u64]) -> Frac {
    let mut prev = 0i128;
    let mut prefix = 0i128;
    let mut worst = Frac { p: 0, q: 1 };
    for &b in bids {
        prefix += b as i128;
        let r = Frac { p: prefix, q: prev + 1 };
        if worst.lt(r) {
            worst = r;
        }
        prev = b as i128;
    }
    worst
}

pub fn optimal_det_ratio(n: u64) -> Result<OptimalBids> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    if n > OPTIMAL_RATIO_LIMIT {
        return Err(Error::TooLarge {
            what: "optimal ratio search",
            size: n as usize,
            limit: OPTIMAL_RATIO_LIMIT as usize,
        });
    }
    const SCALE: i128 = 1 << 40;
    let to_frac = |x: f64| Frac {
        p: (x * SCALE as f64).ceil() as i128,
        q: SCALE,
    };
    let (mut lo, mut hi) = (1.0f64, 4.0f64);
    debug_assert!(feasible(n, to_frac(hi), false).is_some());
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if feasible(n, to_frac(mid), false).is_some() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut bids = feasible(n, to_frac(hi), false).expect("upper bracket is feasible");
    let mut r = ratio_of(&bids);
    while let Some(better) = feasible(n, r, true) {
        r = ratio_of(&better);
        bids = better;
    }
    let ratio = Rational::new(BigInt::from(r.p), BigInt::from(r.q));
    let bids = BidSet::new(bids.into_iter().map(|b| Rational::from_integer(BigInt::from(b))).collect())?;
    Ok(OptimalBids { n, ratio, bids })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bidding::{competitive_ratio, Universe};
    use crate::scalar::Scalar;

    /// Every bid set containing `n`, ratio by direct payment scan.
    fn exhaustive(n: u64) -> Rational {
        let u = Universe::<Rational>::range(n).unwrap();
        (0u64..1 << (n - 1))
            .map(|mask| {
                let mut v: Vec<Rational> = (1..n).filter(|i| mask >> (i - 1) & 1 == 1).map(Rational::from_u64).collect();
                v.push(Rational::from_u64(n));
                competitive_ratio(&BidSet::new(v).unwrap(), &u).unwrap().max_ratio
            })
            .min()
            .unwrap()
    }

    #[test]
    fn small_cases() {
        let o = optimal_det_ratio(1).unwrap();
        assert_eq!(o.ratio, Rational::from_u64(1));
        assert_eq!(o.bids.bids(), &[Rational::from_u64(1)]);

        let o = optimal_det_ratio(2).unwrap();
        assert_eq!(o.ratio, Rational::from_ratio(3, 2));
        assert_eq!(o.bids.bids(), &[Rational::from_u64(1), Rational::from_u64(2)]);

        let o = optimal_det_ratio(4).unwrap();
        assert_eq!(o.ratio, Rational::from_u64(2));
        assert_eq!(o.bids.bids(), &[Rational::from_u64(2), Rational::from_u64(4)]);
    }

    #[test]
    fn matches_exhaustive_search() {
        for n in 1..=14 {
            let o = optimal_det_ratio(n).unwrap();
            assert_eq!(o.ratio, exhaustive(n), "n = {n}");
            let u = Universe::<Rational>::range(n).unwrap();
            assert_eq!(competitive_ratio(&o.bids, &u).unwrap().max_ratio, o.ratio);
        }
    }

    #[test]
    fn guard() {
        assert!(optimal_det_ratio(0).is_err());
        assert!(optimal_det_ratio(OPTIMAL_RATIO_LIMIT + 1).is_err());
    }
}
