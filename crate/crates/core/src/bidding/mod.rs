//! Online bidding: universes, bid sets, payments and competitive ratios.
//!
//! Against threshold `T` a bid set pays every bid up to and including
//! `T⁺ = min{b : b ≥ T}`.

mod dual;
mod optimal;
mod strategy;

pub use dual::{dual_certificate, verify_dual_condition, DualCertificate, DualVerdict};
pub use optimal::{optimal_det_ratio, OptimalBids, OPTIMAL_RATIO_LIMIT};
pub use strategy::{
    doubling_bids, expected_ratio, randomized_bids, randomized_bids_with_offset, Bidder, ExpectedRatio, ThresholdStat,
};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Where thresholds (and bids) may live.
#[derive(Debug, Clone, PartialEq)]
pub enum Universe<S> {
    /// All positive reals. `low..=high` is the window of thresholds the
    /// caller cares about; strategies only emit bids needed to cover it.
    PositiveReals { low: S, high: S },
    /// Explicit finite set, strictly increasing and positive.
    Finite(Vec<S>),
}

impl<S: Scalar> Universe<S> {
    pub fn finite<I: IntoIterator<Item = S>>(values: I) -> Result<Self> {
        let mut v: Vec<S> = values.into_iter().collect();
        if v.is_empty() {
            return Err(Error::InvalidArgument("finite universe must be non-empty".into()));
        }
        if let Some(bad) = v.iter().find(|x| !x.is_finite() || **x <= S::zero()) {
            return Err(Error::InvalidArgument(format!("universe element {bad} is not positive")));
        }
        v.sort_by(|a, b| a.total_cmp(b));
        v.dedup();
        Ok(Universe::Finite(v))
    }

    /// `[n] = {1, …, n}`.
    pub fn range(n: u64) -> Result<Self> {
        Self::finite((1..=n).map(S::from_u64))
    }

    pub fn reals(low: S, high: S) -> Result<Self> {
        if !(low > S::zero() && low <= high && high.is_finite()) {
            return Err(Error::InvalidArgument(format!("bad threshold window [{low}, {high}]")));
        }
        Ok(Universe::PositiveReals { low, high })
    }

    pub fn min(&self) -> &S {
        match self {
            Universe::PositiveReals { low, .. } => low,
            Universe::Finite(v) => &v[0],
        }
    }

    pub fn max(&self) -> &S {
        match self {
            Universe::PositiveReals { high, .. } => high,
            Universe::Finite(v) => v.last().expect("non-empty"),
        }
    }

    /// Largest element `≤ x` (finite universes only).
    pub fn floor(&self, x: &S) -> Option<&S> {
        match self {
            Universe::PositiveReals { .. } => None,
            Universe::Finite(v) => {
                let idx = v.partition_point(|u| u <= x);
                idx.checked_sub(1).map(|i| &v[i])
            }
        }
    }

    pub fn contains(&self, x: &S) -> bool {
        match self {
            Universe::PositiveReals { .. } => *x > S::zero(),
            Universe::Finite(v) => v.binary_search_by(|u| u.total_cmp(x)).is_ok(),
        }
    }
}

/// A strictly increasing set of positive bids.
#[derive(Debug, Clone, PartialEq)]
pub struct BidSet<S> {
    bids: Vec<S>,
    /// The cost-free bid 0, kept only so the set reads like `{0} ∪ …`.
    pub includes_zero_sentinel: bool,
}

impl<S: Scalar> BidSet<S> {
    pub fn new(bids: Vec<S>) -> Result<Self> {
        if let Some(b) = bids.iter().find(|b| !b.is_finite() || **b <= S::zero()) {
            return Err(Error::InvalidArgument(format!("bid {b} is not positive")));
        }
        if bids.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("bids must be strictly increasing".into()));
        }
        Ok(BidSet {
            bids,
            includes_zero_sentinel: false,
        })
    }

    /// Sorts and de-duplicates before validating.
    pub fn from_unsorted<I: IntoIterator<Item = S>>(bids: I) -> Result<Self> {
        let mut v: Vec<S> = bids.into_iter().collect();
        v.sort_by(|a, b| a.total_cmp(b));
        v.dedup();
        Self::new(v)
    }

    pub fn bids(&self) -> &[S] {
        &self.bids
    }

    pub fn len(&self) -> usize {
        self.bids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bids.is_empty()
    }

    pub fn max_bid(&self) -> Option<&S> {
        self.bids.last()
    }

    /// Index of `T⁺` in `bids()`.
    pub fn covering_index(&self, threshold: &S) -> Result<usize> {
        let idx = self.bids.partition_point(|b| b < threshold);
        if idx == self.bids.len() {
            Err(Error::ThresholdUncovered(threshold.to_string()))
        } else {
            Ok(idx)
        }
    }

    /// Bids paid against `threshold`: everything up to and including `T⁺`.
    pub fn paid(&self, threshold: &S) -> Result<&[S]> {
        let idx = self.covering_index(threshold)?;
        Ok(&self.bids[..=idx])
    }
}

pub fn payment<S: Scalar>(bids: &BidSet<S>, threshold: &S) -> Result<S> {
    Ok(bids
        .paid(threshold)?
        .iter()
        .fold(S::zero(), |acc, b| acc + b.clone()))
}

/// Worst-case `payment / T` over a universe.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioReport<S> {
    pub max_ratio: S,
    /// For finite universes the maximising threshold. For the reals the
    /// supremum is approached as `T ↓ argmax_t` and `attained` is false.
    pub argmax_t: S,
    pub attained: bool,
}

pub fn competitive_ratio<S: Scalar>(bids: &BidSet<S>, universe: &Universe<S>) -> Result<RatioReport<S>> {
    match universe {
        Universe::Finite(values) => {
            let mut best: Option<RatioReport<S>> = None;
            for t in values {
                let ratio = payment(bids, t)? / t.clone();
                if best.as_ref().is_none_or(|b| ratio > b.max_ratio) {
                    best = Some(RatioReport {
                        max_ratio: ratio,
                        argmax_t: t.clone(),
                        attained: true,
                    });
                }
            }
            Ok(best.expect("non-empty universe"))
        }
        Universe::PositiveReals { low, high } => {
            let mut best = RatioReport {
                max_ratio: payment(bids, low)? / low.clone(),
                argmax_t: low.clone(),
                attained: true,
            };
            // just above bid b the payment jumps to include the next bid
            for (i, b) in bids.bids().iter().enumerate() {
                if b < low || b >= high {
                    continue;
                }
                if i + 1 == bids.len() {
                    return Err(Error::ThresholdUncovered(format!("{b}+")));
                }
                let paid = bids.bids()[..=i + 1]
                    .iter()
                    .fold(S::zero(), |acc, x| acc + x.clone());
                let ratio = paid / b.clone();
                if ratio > best.max_ratio {
                    best = RatioReport {
                        max_ratio: ratio,
                        argmax_t: b.clone(),
                        attained: false,
                    };
                }
            }
            Ok(best)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn ints(v: &[u64]) -> BidSet<Rational> {
        BidSet::new(v.iter().map(|&x| Rational::from_u64(x)).collect()).unwrap()
    }

    fn q(x: u64) -> Rational {
        Rational::from_u64(x)
    }

    #[test]
    fn payment_examples() {
        let b = ints(&[1, 2, 4, 8, 10]);
        assert_eq!(payment(&b, &q(9)).unwrap(), q(25));
        let b = ints(&[1, 2, 4, 8, 16, 32]);
        assert_eq!(payment(&b, &q(5)).unwrap(), q(15));
        assert_eq!(payment(&b, &q(5)).unwrap() / q(5), q(3));
        let b = ints(&[7]);
        assert_eq!(payment(&b, &q(7)).unwrap(), q(7));
    }

    #[test]
    fn uncovered_threshold() {
        let err = payment(&ints(&[1, 2]), &q(3)).unwrap_err();
        assert!(err.to_string().starts_with("threshold uncovered"));
    }

    #[test]
    fn bid_set_validation() {
        assert!(BidSet::new(vec![2.0, 1.0]).is_err());
        assert!(BidSet::new(vec![0.0, 1.0]).is_err());
        assert_eq!(BidSet::from_unsorted(vec![4.0, 1.0, 4.0]).unwrap().bids(), &[1.0, 4.0]);
    }

    #[test]
    fn single_max_bid_ratio_is_n() {
        let n = 9;
        let u = Universe::<Rational>::range(n).unwrap();
        let rep = competitive_ratio(&ints(&[n]), &u).unwrap();
        assert_eq!(rep.max_ratio, q(n));
        assert_eq!(rep.argmax_t, q(1));
    }

    #[test]
    fn real_window_supremum() {
        let u = Universe::reals(1.0, 10.0).unwrap();
        let b = BidSet::new(vec![1.0, 2.0, 4.0, 8.0, 16.0]).unwrap();
        let rep = competitive_ratio(&b, &u).unwrap();
        // just above 8 the payment is 31
        assert_eq!(rep.max_ratio, 31.0 / 8.0);
        assert_eq!(rep.argmax_t, 8.0);
        assert!(!rep.attained);
    }

    #[test]
    fn universe_floor() {
        let u = Universe::finite(vec![q(2), q(5), q(9)]).unwrap();
        assert_eq!(u.floor(&q(1)), None);
        assert_eq!(u.floor(&q(5)), Some(&q(5)));
        assert_eq!(u.floor(&q(8)), Some(&q(5)));
        assert_eq!(u.floor(&q(100)), Some(&q(9)));
        assert!(Universe::<f64>::finite(vec![]).is_err());
        assert!(Universe::finite(vec![0.0]).is_err());
    }
}
