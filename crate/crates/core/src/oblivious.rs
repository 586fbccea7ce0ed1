//! Nested facility chains built from offline solutions and bid sets.
//!
//! Cost mode keeps `|F_k| ≤ k` and pays a constant factor in cost; size mode
//! keeps `cost(F_k) ≤ opt_k` and pays a constant factor in size.

use std::fmt;

use serde_json::{json, Value};

use crate::bidding::{BidSet, Bidder, Universe};
use crate::error::{Error, Result};
use crate::gamma::gamma_with;
use crate::instance::{FacilitySet, MedianInstance};
use crate::metric::metric_report;
use crate::scalar::{Extended, Scalar};
use crate::solvers::OfflineSolution;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainMode {
    Cost,
    Size,
}

impl fmt::Display for ChainMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChainMode::Cost => "cost",
            ChainMode::Size => "size",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Provenance<S> {
    /// Bids over the offline costs and the index set `K` they selected.
    Cost { bids: Vec<S>, index_set: Vec<usize> },
    /// Bids over `[n]` and, per `k`, the bids paid against threshold `k`.
    Size { bids: Vec<u64>, paid: Vec<Vec<u64>> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FacilityChain<S> {
    /// `sets[k - 1] = F_k`.
    pub sets: Vec<FacilitySet>,
    pub mode: ChainMode,
    pub provenance: Provenance<S>,
}

impl<S: Scalar> FacilityChain<S> {
    pub fn n(&self) -> usize {
        self.sets.len()
    }

    /// `F_k` for 1-based `k`.
    pub fn set(&self, k: usize) -> &FacilitySet {
        &self.sets[k - 1]
    }

    pub fn is_nested(&self) -> bool {
        self.sets.windows(2).all(|w| w[0].is_subset(&w[1]))
    }

    pub fn to_json(&self, inst: &MedianInstance<S>) -> Value {
        let provenance = match &self.provenance {
            Provenance::Cost { bids, index_set } => json!({
                "bids": bids.iter().map(Scalar::to_json).collect::<Vec<_>>(),
                "index_set": index_set,
            }),
            Provenance::Size { bids, paid } => json!({ "bids": bids, "paid": paid }),
        };
        json!({
            "mode": self.mode.to_string(),
            "sets": self.sets.iter().map(|s| inst.facility_labels(s)).collect::<Vec<_>>(),
            "provenance": provenance,
        })
    }
}

fn check_offline<S: Scalar>(inst: &MedianInstance<S>, offline: &OfflineSolution<S>) -> Result<()> {
    if offline.n() == 0 {
        return Err(Error::InvalidArgument("offline solution is empty".into()));
    }
    for (i, s) in offline.per_k.iter().enumerate() {
        if s.k != i + 1 {
            return Err(Error::InvalidArgument(format!("offline entry {i} has k = {}", s.k)));
        }
        inst.check_set(&s.facilities)?;
    }
    Ok(())
}

/// Cost-competitive chain for a metric instance.
///
/// With a `β`-competitive bidder and `c`-approximate offline sets the chain
/// satisfies `|F_k| ≤ k` and `cost(F_k) ≤ 2cβ · opt_k`.
pub fn build_cost_competitive<S: Scalar>(
    inst: &MedianInstance<S>,
    offline: &OfflineSolution<S>,
    bidder: &Bidder,
) -> Result<FacilityChain<S>> {
    let report = metric_report(inst);
    if !report.is_metric {
        return Err(Error::NotMetric {
            lambda: report.lambda_star.to_string(),
        });
    }
    cost_chain(inst, offline, bidder)
}

/// Same construction without the metric precondition. Returns the chain and
/// the instance's `λ*` so callers can report measured ratios alongside it.
pub fn build_cost_competitive_relaxed<S: Scalar>(
    inst: &MedianInstance<S>,
    offline: &OfflineSolution<S>,
    bidder: &Bidder,
) -> Result<(FacilityChain<S>, Extended<S>)> {
    let lambda = metric_report(inst).lambda_star;
    Ok((cost_chain(inst, offline, bidder)?, lambda))
}

/// The index set `K`: each bid maps to the smallest `k` whose offline cost
/// equals it, plus index 1 and the first zero-cost index, ascending.
fn index_set<S: Scalar>(costs: &[S], bids: &BidSet<S>) -> Result<Vec<usize>> {
    let mut k_set = vec![1];
    for b in bids.bids() {
        let k = costs
            .iter()
            .position(|c| c == b)
            .ok_or_else(|| Error::Invariant(format!("bid {b} is not an offline cost")))?;
        k_set.push(k + 1);
    }
    if let Some(z) = costs.iter().position(|c| c.is_zero()) {
        k_set.push(z + 1);
    }
    k_set.sort_unstable();
    k_set.dedup();
    Ok(k_set)
}

fn cost_chain<S: Scalar>(
    inst: &MedianInstance<S>,
    offline: &OfflineSolution<S>,
    bidder: &Bidder,
) -> Result<FacilityChain<S>> {
    check_offline(inst, offline)?;
    if let Some(i) = offline.per_k.windows(2).position(|w| w[1].cost > w[0].cost) {
        return Err(Error::NonMonotoneOffline { k: i + 2 });
    }
    let n = offline.n();
    let costs = offline.costs();

    let positive: Vec<S> = costs.iter().filter(|c| !c.is_zero()).cloned().collect();
    let bids = if positive.is_empty() {
        BidSet::new(Vec::new())?
    } else {
        bidder.bid_set(&Universe::finite(positive)?)?
    };
    let k_set = index_set(&costs, &bids)?;

    // backward pass over K: F_κ(m) = F*_κ(m), F_κ(i) = Γ(F*_κ(i), F_κ(i+1))
    let dprime = inst.facility_distance_matrix();
    let mut at_k: Vec<Option<FacilitySet>> = vec![None; n];
    let top = *k_set.last().expect("K contains 1");
    at_k[top - 1] = Some(offline.set(top).clone());
    for w in k_set.windows(2).rev() {
        let (k, next) = (w[0], w[1]);
        let below = at_k[next - 1].as_ref().expect("filled on the previous step");
        let set = gamma_with(&dprime, offline.set(k), below)?;
        let bound = S::from_u64(2) * offline.cost(k).clone() + inst.cost(below)?;
        let got = inst.cost(&set)?;
        if !got.approx_le(&bound) {
            return Err(Error::Invariant(format!(
                "cost(F_{k}) = {got} exceeds 2 cost(F*_{k}) + cost(F_{next}) = {bound}"
            )));
        }
        at_k[k - 1] = Some(set);
    }

    // gaps: F_k = F_{k⁻} with k⁻ the largest element of K not above k
    let mut sets = Vec::with_capacity(n);
    for k in 1..=n {
        let set = match at_k[k - 1].take() {
            Some(s) => s,
            None => sets.last().cloned().expect("1 ∈ K"),
        };
        sets.push(set);
    }
    Ok(FacilityChain {
        sets,
        mode: ChainMode::Cost,
        provenance: Provenance::Cost {
            bids: bids.bids().to_vec(),
            index_set: k_set,
        },
    })
}

/// Size-competitive chain: `F_k` is the union of `F*_b` over the bids `b`
/// paid against threshold `k` on `[n]`.
///
/// With a `β`-competitive bid set and `s`-size-approximate offline sets the
/// chain satisfies `cost(F_k) ≤ opt_k` and `|F_k| ≤ sβ · k`.
pub fn build_size_competitive<S: Scalar>(
    inst: &MedianInstance<S>,
    offline: &OfflineSolution<S>,
    bids: &BidSet<S>,
) -> Result<FacilityChain<S>> {
    check_offline(inst, offline)?;
    let n = offline.n();
    let int_bids: Vec<u64> = bids
        .bids()
        .iter()
        .map(|b| match b.to_u64() {
            Some(v) if v >= 1 && v as usize <= n => Ok(v),
            _ => Err(Error::InvalidArgument(format!("bid {b} is not in [1, {n}]"))),
        })
        .collect::<Result<_>>()?;

    let mut sets = Vec::with_capacity(n);
    let mut paid = Vec::with_capacity(n);
    for k in 1..=n {
        let idx = bids.covering_index(&S::from_u64(k as u64))?;
        let paid_k = int_bids[..=idx].to_vec();
        let set = paid_k
            .iter()
            .fold(FacilitySet::empty(), |acc, &b| acc.union(offline.set(b as usize)));
        sets.push(set);
        paid.push(paid_k);
    }
    Ok(FacilityChain {
        sets,
        mode: ChainMode::Size,
        provenance: Provenance::Size { bids: int_bids, paid },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainRow<S> {
    pub k: usize,
    pub size: usize,
    pub cost: S,
    pub opt: S,
    pub cost_ratio: Extended<S>,
    pub size_ratio: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport<S> {
    pub rows: Vec<ChainRow<S>>,
    pub max_cost_ratio: Extended<S>,
    pub max_size_ratio: S,
    pub nesting_ok: bool,
}

impl<S: Scalar> ChainReport<S> {
    /// `|F_k| ≤ k` for every `k`.
    pub fn sizes_within_budget(&self) -> bool {
        self.rows.iter().all(|r| r.size <= r.k)
    }

    /// `cost(F_k) ≤ opt_k` for every `k` (exact in rational mode).
    pub fn costs_within_opt(&self) -> bool {
        self.rows.iter().all(|r| r.cost.approx_le(&r.opt))
    }

    /// First `k` with `cost(F_k) > opt_k`.
    pub fn first_cost_excess(&self) -> Option<usize> {
        self.rows.iter().find(|r| !r.cost.approx_le(&r.opt)).map(|r| r.k)
    }
}

/// Measures a chain against an oracle, normally the exact offline solution.
/// Never judges: a non-nested chain still gets a full report.
pub fn verify_chain<S: Scalar>(
    inst: &MedianInstance<S>,
    chain: &FacilityChain<S>,
    oracle: &OfflineSolution<S>,
) -> Result<ChainReport<S>> {
    if chain.n() != oracle.n() {
        return Err(Error::InvalidArgument(format!(
            "chain has {} sets but the oracle has {}",
            chain.n(),
            oracle.n()
        )));
    }
    let mut rows = Vec::with_capacity(chain.n());
    for (i, set) in chain.sets.iter().enumerate() {
        let k = i + 1;
        let cost = inst.cost(set)?;
        let opt = oracle.cost(k).clone();
        rows.push(ChainRow {
            k,
            size: set.len(),
            cost_ratio: Extended::ratio(&cost, &opt),
            size_ratio: S::from_u64(set.len() as u64) / S::from_u64(k as u64),
            cost,
            opt,
        });
    }
    let max_cost_ratio = rows
        .iter()
        .map(|r| r.cost_ratio.clone())
        .reduce(Extended::max)
        .expect("at least one row");
    let max_size_ratio = rows
        .iter()
        .map(|r| r.size_ratio.clone())
        .reduce(|a, b| if b > a { b } else { a })
        .expect("at least one row");
    Ok(ChainReport {
        rows,
        max_cost_ratio,
        max_size_ratio,
        nesting_ok: chain.is_nested(),
    })
}

/// A chain made of the oracle's own sets, useful as a baseline report.
pub fn chain_from_offline<S: Scalar>(offline: &OfflineSolution<S>, mode: ChainMode) -> FacilityChain<S> {
    FacilityChain {
        sets: offline.per_k.iter().map(|s| s.facilities.clone()).collect(),
        mode,
        provenance: Provenance::Cost {
            bids: Vec::new(),
            index_set: (1..=offline.n()).collect(),
        },
    }
}
