//! The layered gadget forcing every size-competitive chain to encode a bid set.
//!
//! Customers are the vectors `ū` with `u_ℓ ∈ [ℓ]` for `ℓ = 1..=m`; facilities
//! are `μ_{ℓ,i}` for `i ≤ ℓ`, grouped into clusters `M_ℓ`. Customer `ū` has an
//! edge of length `δ_ℓ = 1 + (m!)^{-ℓ}` to `μ_{ℓ,u_ℓ}` and all other
//! distances are shortest paths.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;

use crate::bidding::BidSet;
use crate::error::{Error, Result};
use crate::graph::{bipartite_closure, Edge};
use crate::instance::{FacilitySet, Label, MedianInstance};
use crate::metric::metric_report;
use crate::oblivious::FacilityChain;
use crate::scalar::{Rational, Scalar};

pub const ADVERSARIAL_MAX_M: usize = 6;
/// Largest `m` for the exhaustive subset checks (`2^15` subsets).
pub const PROPERTY_CHECK_MAX_M: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct AdversarialInstance {
    pub m: usize,
    pub instance: MedianInstance<Rational>,
    /// `clusters[ℓ - 1] = M_ℓ`.
    pub clusters: Vec<FacilitySet>,
    /// `delta[ℓ - 1] = δ_ℓ`.
    pub delta: Vec<Rational>,
}

fn factorial(m: usize) -> u64 {
    (1..=m as u64).product()
}

/// Index of `μ_{ℓ,i}` (both 1-based).
pub fn facility_index(level: usize, i: usize) -> usize {
    level * (level - 1) / 2 + (i - 1)
}

/// Index of the customer `ū` (entries 1-based, `u_ℓ ≤ ℓ`).
pub fn customer_index(u: &[usize]) -> usize {
    u.iter()
        .enumerate()
        .fold(0, |acc, (l, &x)| acc * (l + 1) + (x - 1))
}

fn customers(m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for level in 1..=m {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (1..=level).map(move |x| {
                    let mut v = prefix.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out
}

impl AdversarialInstance {
    /// `M_ℓ` for 1-based `ℓ`.
    pub fn cluster(&self, level: usize) -> &FacilitySet {
        &self.clusters[level - 1]
    }

    /// `δ_ℓ` for `ℓ ≥ 1`, and `δ_0 = 2`.
    pub fn delta(&self, level: usize) -> Rational {
        if level == 0 {
            Rational::from_u64(2)
        } else {
            self.delta[level - 1].clone()
        }
    }

    /// `m! · δ_j`, the cost of `M_j`.
    pub fn expected_cost(&self, level: usize) -> Rational {
        Rational::from_u64(factorial(self.m)) * self.delta(level)
    }
}

pub fn build_adversarial(m: usize) -> Result<AdversarialInstance> {
    if !(2..=ADVERSARIAL_MAX_M).contains(&m) {
        return Err(Error::InvalidArgument(format!(
            "m = {m} outside 2..={ADVERSARIAL_MAX_M}"
        )));
    }
    let fact = BigInt::from(factorial(m));
    let delta: Vec<Rational> = (1..=m)
        .map(|l| Rational::one() + Rational::new(BigInt::one(), num_traits::pow(fact.clone(), l)))
        .collect();
    let vectors = customers(m);
    let n_f = m * (m + 1) / 2;
    let mut edges = Vec::with_capacity(vectors.len() * m);
    for (c, u) in vectors.iter().enumerate() {
        for (l, &x) in u.iter().enumerate() {
            edges.push(Edge {
                customer: c,
                facility: facility_index(l + 1, x),
                length: delta[l].clone(),
            });
        }
    }
    let dist = bipartite_closure(vectors.len(), n_f, &edges)?;
    let customer_labels = vectors
        .iter()
        .map(|u| Label::Text(u.iter().map(ToString::to_string).collect::<Vec<_>>().join("-")))
        .collect();
    let mut facility_labels = Vec::with_capacity(n_f);
    let mut clusters = Vec::with_capacity(m);
    for level in 1..=m {
        clusters.push(FacilitySet::new((1..=level).map(|i| facility_index(level, i))));
        facility_labels.extend((1..=level).map(|i| Label::Text(format!("mu{level}.{i}"))));
    }
    let instance = MedianInstance::new(customer_labels, facility_labels, dist, None)?;
    let adv = AdversarialInstance {
        m,
        instance,
        clusters,
        delta,
    };

    for j in 1..=m {
        let cost = adv.instance.cost(adv.cluster(j))?;
        if cost != adv.expected_cost(j) {
            return Err(Error::Invariant(format!("cost(M_{j}) = {cost}, expected {}", adv.expected_cost(j))));
        }
        if j > 1 && cost >= adv.instance.cost(adv.cluster(j - 1))? {
            return Err(Error::Invariant(format!("cost(M_{j}) is not below cost(M_{})", j - 1)));
        }
    }
    let report = metric_report(&adv.instance);
    if !report.is_metric {
        return Err(Error::NotMetric {
            lambda: report.lambda_star.to_string(),
        });
    }
    Ok(adv)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GadgetViolation {
    /// `cost(F) ≤ cost(M_k)` yet F contains no `M_ℓ` with `ℓ ≥ k`.
    PropertyII { k: usize },
    /// F differs from `M_k`, `|F| ≤ k` and `cost(F) ≤ cost(M_k)`.
    NotUnique { k: usize },
    /// The witness customer for level `j` is closer to F than `δ_{j-1}`.
    WitnessTooClose { j: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub subsets_checked: u64,
    /// Smallest violating subset (by bitmask) and what it violated.
    pub violation: Option<(FacilitySet, GadgetViolation)>,
}

impl PropertyReport {
    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

/// Distances scaled by their common denominator, as integers.
fn scaled_integers(inst: &MedianInstance<Rational>) -> Result<(Vec<Vec<i128>>, BigInt)> {
    let lcd = inst
        .rows()
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, d| acc.lcm(d.denom()));
    let rows = inst
        .rows()
        .iter()
        .map(|row| {
            row.iter()
                .map(|d| {
                    (d.numer() * (&lcd / d.denom())).to_i128().ok_or(Error::TooLarge {
                        what: "integer scaling",
                        size: 128,
                        limit: 127,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((rows, lcd))
}

fn scale(x: &Rational, lcd: &BigInt) -> i128 {
    (x * Rational::from_integer(lcd.clone()))
        .to_integer()
        .to_i128()
        .expect("scaled value fits")
}

/// Exhaustive check over every facility subset of size at most
/// `max_subset_size`: property (ii), uniqueness of each `M_k` as the optimum
/// `k`-median, and the distance bound on the explicit witness customer.
pub fn verify_property_ii(adv: &AdversarialInstance, max_subset_size: usize) -> Result<PropertyReport> {
    let m = adv.m;
    if m > PROPERTY_CHECK_MAX_M {
        return Err(Error::TooLarge {
            what: "exhaustive subset verification",
            size: m,
            limit: PROPERTY_CHECK_MAX_M,
        });
    }
    let n_f = adv.instance.num_facilities();
    let (rows, lcd) = scaled_integers(&adv.instance)?;
    let cluster_cost: Vec<i128> = (1..=m).map(|j| scale(&adv.expected_cost(j), &lcd)).collect();
    let delta: Vec<i128> = (0..=m).map(|j| scale(&adv.delta(j), &lcd)).collect();
    let cluster_mask: Vec<u64> = adv
        .clusters
        .iter()
        .map(|c| c.iter().fold(0u64, |acc, f| acc | 1 << f))
        .collect();

    let check = |mask: u64| -> Option<GadgetViolation> {
        let size = mask.count_ones() as usize;
        if size == 0 || size > max_subset_size {
            return None;
        }
        let members: Vec<usize> = (0..n_f).filter(|f| mask >> f & 1 == 1).collect();
        let serve = |row: &Vec<i128>| members.iter().map(|&f| row[f]).min().expect("non-empty");
        let cost: i128 = rows.iter().map(serve).sum();
        // largest ℓ with M_ℓ ⊆ F, 0 if none
        let top = (1..=m).rev().find(|&l| mask & cluster_mask[l - 1] == cluster_mask[l - 1]).unwrap_or(0);
        if top < m && cost <= cluster_cost[top] {
            return Some(GadgetViolation::PropertyII { k: top + 1 });
        }
        for k in size.max(1)..=m {
            if mask != cluster_mask[k - 1] && cost <= cluster_cost[k - 1] {
                return Some(GadgetViolation::NotUnique { k });
            }
        }
        for j in top + 1..=m {
            let u: Vec<usize> = (1..=m)
                .map(|l| {
                    if l < j {
                        1
                    } else {
                        (1..=l).find(|&i| mask >> facility_index(l, i) & 1 == 0).expect("M_l ⊄ F")
                    }
                })
                .collect();
            if serve(&rows[customer_index(&u)]) < delta[j - 1] {
                return Some(GadgetViolation::WitnessTooClose { j });
            }
        }
        None
    };
    let total = 1u64 << n_f;
    let violation = (0..total)
        .into_par_iter()
        .find_map_first(|mask| check(mask).map(|v| (mask, v)))
        .map(|(mask, v)| (FacilitySet::from_mask(mask), v));
    let subsets_checked = (1..total)
        .filter(|mask| mask.count_ones() as usize <= max_subset_size)
        .count() as u64;
    Ok(PropertyReport {
        subsets_checked,
        violation,
    })
}

/// `{k ∈ [m] : M_k ⊆ F_k}`. Requires `cost(F_k) ≤ opt_k = cost(M_k)` for all
/// `k ∈ [m]` and names the first `k` where that fails.
pub fn extract_bid_set(adv: &AdversarialInstance, chain: &FacilityChain<Rational>) -> Result<BidSet<Rational>> {
    if chain.n() < adv.m {
        return Err(Error::InvalidArgument(format!(
            "chain has {} sets, need at least m = {}",
            chain.n(),
            adv.m
        )));
    }
    let mut bids = Vec::new();
    for k in 1..=adv.m {
        if adv.instance.cost(chain.set(k))? > adv.expected_cost(k) {
            return Err(Error::NotSizeCompetitive { k });
        }
        if adv.cluster(k).is_subset(chain.set(k)) {
            bids.push(Rational::from_u64(k as u64));
        }
    }
    BidSet::new(bids)
}
