//! Offline k-median solvers: exact enumeration, single-swap local search and a
//! greedy size-approximation.

use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::instance::{FacilitySet, MedianInstance};
use crate::scalar::Scalar;

/// Largest facility count the exact solver accepts.
pub const EXACT_FACILITY_LIMIT: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolverTag {
    Exact,
    LocalSearch { epsilon: f64 },
    GreedySize,
}

impl fmt::Display for SolverTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverTag::Exact => f.write_str("exact"),
            SolverTag::LocalSearch { epsilon } => write!(f, "local_search({epsilon})"),
            SolverTag::GreedySize => f.write_str("greedy_size"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KSolution<S> {
    pub k: usize,
    pub facilities: FacilitySet,
    pub cost: S,
}

/// One facility set `F*_k` per budget `k = 1..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct OfflineSolution<S> {
    pub solver: SolverTag,
    pub per_k: Vec<KSolution<S>>,
}

impl<S: Scalar> OfflineSolution<S> {
    pub fn n(&self) -> usize {
        self.per_k.len()
    }

    /// `F*_k` for 1-based `k`.
    pub fn set(&self, k: usize) -> &FacilitySet {
        &self.per_k[k - 1].facilities
    }

    /// `cost(F*_k)` for 1-based `k`.
    pub fn cost(&self, k: usize) -> &S {
        &self.per_k[k - 1].cost
    }

    pub fn costs(&self) -> Vec<S> {
        self.per_k.iter().map(|s| s.cost.clone()).collect()
    }

    pub fn is_monotone(&self) -> bool {
        self.per_k.windows(2).all(|w| w[1].cost <= w[0].cost)
    }

    /// Replace `F*_{k+1}` by `F*_k` whenever the latter is cheaper, so costs
    /// are non-increasing in `k`.
    pub fn repair_monotone(&mut self) {
        for i in 1..self.per_k.len() {
            if self.per_k[i - 1].cost < self.per_k[i].cost {
                let prev = self.per_k[i - 1].clone();
                self.per_k[i].facilities = prev.facilities;
                self.per_k[i].cost = prev.cost;
            }
        }
    }

    pub fn to_json(&self, inst: &MedianInstance<S>) -> Value {
        json!({
            "solver": self.solver.to_string(),
            "per_k": self.per_k.iter().map(|s| json!({
                "k": s.k,
                "facilities": inst.facility_labels(&s.facilities),
                "cost": s.cost.to_json(),
            })).collect::<Vec<_>>(),
        })
    }
}

fn check_k<S: Scalar>(inst: &MedianInstance<S>, k: usize) -> Result<()> {
    let n = inst.num_facilities();
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    Ok(())
}

struct SubsetSearch<'a, S> {
    inst: &'a MedianInstance<S>,
    candidates: &'a [usize],
    size: usize,
    base_empty: bool,
    levels: Vec<Vec<S>>,
    chosen: Vec<usize>,
    best: Option<(Vec<usize>, S)>,
}

impl<S: Scalar> SubsetSearch<'_, S> {
    fn descend(&mut self, start: usize, depth: usize) {
        if depth == self.size {
            let cost = self.inst.weighted_sum(self.levels[depth].iter().cloned());
            if self.best.as_ref().is_none_or(|(_, b)| cost < *b) {
                self.best = Some((self.chosen.clone(), cost));
            }
            return;
        }
        let last = self.candidates.len() - (self.size - depth);
        for i in start..=last {
            let f = self.candidates[i];
            let (lo, hi) = self.levels.split_at_mut(depth + 1);
            let next = &mut hi[0];
            next.clear();
            if depth == 0 && self.base_empty {
                next.extend(self.inst.rows().iter().map(|row| row[f].clone()));
            } else {
                next.extend(lo[depth].iter().zip(self.inst.rows()).map(|(cur, row)| {
                    if row[f] < *cur {
                        row[f].clone()
                    } else {
                        cur.clone()
                    }
                }));
            }
            self.chosen.push(f);
            self.descend(i + 1, depth + 1);
            self.chosen.pop();
        }
    }
}

/// Cheapest `base ∪ X` over `X ⊆ candidates` with `|X| = size`, enumerated in
/// lexicographic order so the first optimum found is the lexicographically
/// smallest `X`. Returns `(X, cost)`.
pub fn best_extension<S: Scalar>(
    inst: &MedianInstance<S>,
    base: &FacilitySet,
    candidates: &[usize],
    size: usize,
) -> Result<(FacilitySet, S)> {
    if base.is_empty() && size == 0 {
        return Err(Error::EmptyFacilitySet);
    }
    if size > candidates.len() {
        return Err(Error::InvalidArgument(format!(
            "cannot choose {size} of {} candidates",
            candidates.len()
        )));
    }
    if !base.is_empty() {
        inst.check_set(base)?;
    }
    if let Some(&f) = candidates.iter().find(|&&f| f >= inst.num_facilities()) {
        return Err(Error::UnknownFacility(f));
    }
    let mut levels = vec![Vec::with_capacity(inst.num_customers()); size + 1];
    if !base.is_empty() {
        levels[0] = (0..inst.num_customers()).map(|u| inst.service_distance(u, base)).collect();
    }
    let mut search = SubsetSearch {
        inst,
        candidates,
        size,
        base_empty: base.is_empty(),
        levels,
        chosen: Vec::with_capacity(size),
        best: None,
    };
    search.descend(0, 0);
    let (chosen, cost) = search.best.expect("at least one subset enumerated");
    Ok((FacilitySet::new(chosen), cost))
}

/// Minimum-cost set of `k` facilities by exhaustive enumeration.
///
/// Cost is monotone under inclusion, so sets of size exactly `k` suffice.
pub fn exact_kmedian<S: Scalar>(inst: &MedianInstance<S>, k: usize) -> Result<(FacilitySet, S)> {
    check_k(inst, k)?;
    let n = inst.num_facilities();
    if n > EXACT_FACILITY_LIMIT {
        return Err(Error::TooLarge {
            what: "exact solver",
            size: n,
            limit: EXACT_FACILITY_LIMIT,
        });
    }
    let all: Vec<usize> = (0..n).collect();
    best_extension(inst, &FacilitySet::empty(), &all, k)
}

/// Adds the facility that lowers the cost most (smallest id on ties).
fn greedy_step<S: Scalar>(inst: &MedianInstance<S>, current: &FacilitySet) -> (usize, S) {
    let mut best: Option<(usize, S)> = None;
    for f in 0..inst.num_facilities() {
        if current.contains(f) {
            continue;
        }
        let mut trial = current.clone();
        trial.insert(f);
        let cost = inst.cost(&trial).expect("non-empty trial set");
        if best.as_ref().is_none_or(|(_, b)| cost < *b) {
            best = Some((f, cost));
        }
    }
    best.expect("a facility outside the current set")
}

/// Single-swap local search started from greedy additions.
///
/// Stops once no swap lowers the cost by a factor of at least `1 + ε/k`.
pub fn local_search_kmedian<S: Scalar>(inst: &MedianInstance<S>, k: usize, epsilon: f64) -> Result<(FacilitySet, S)> {
    check_k(inst, k)?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    let n = inst.num_facilities();
    let mut current = FacilitySet::empty();
    let mut cost = S::zero();
    while current.len() < k {
        let (f, c) = greedy_step(inst, &current);
        current.insert(f);
        cost = c;
    }
    let factor = S::one() + S::from_f64(epsilon).expect("finite epsilon") / S::from_u64(k as u64);

    loop {
        let mut best: Option<(usize, usize, S)> = None;
        for out in current.iter() {
            for inn in (0..n).filter(|f| !current.contains(*f)) {
                let mut trial = current.clone();
                trial.remove(out);
                trial.insert(inn);
                let c = inst.cost(&trial)?;
                if best.as_ref().is_none_or(|(_, _, b)| c < *b) {
                    best = Some((out, inn, c));
                }
            }
        }
        match best {
            Some((out, inn, c)) if c < cost && c.clone() * factor.clone() <= cost => {
                current.remove(out);
                current.insert(inn);
                cost = c;
            }
            _ => break,
        }
    }
    Ok((current, cost))
}

/// Greedy additions until the cost drops to `target`.
///
/// `k` is only range-checked; the caller reports `|result| / k` as the
/// measured size ratio.
pub fn greedy_size_approx<S: Scalar>(inst: &MedianInstance<S>, k: usize, target: &S) -> Result<(FacilitySet, S)> {
    check_k(inst, k)?;
    let all_cost = inst.cost(&inst.all_facilities())?;
    if !all_cost.approx_le(target) {
        return Err(Error::TargetUnreachable {
            all: all_cost.to_string(),
            target: target.to_string(),
        });
    }
    let mut current = FacilitySet::empty();
    loop {
        if current.len() == inst.num_facilities() {
            return Ok((current, all_cost));
        }
        let (f, c) = greedy_step(inst, &current);
        current.insert(f);
        if c.approx_le(target) {
            return Ok((current, c));
        }
    }
}

/// Runs the chosen solver for every `k ∈ [n]` and repairs monotonicity.
pub fn solve_sequence<S: Scalar>(inst: &MedianInstance<S>, solver: SolverTag) -> Result<OfflineSolution<S>> {
    let n = inst.num_facilities();
    let per_k = (1..=n)
        .map(|k| {
            let (facilities, cost) = match solver {
                SolverTag::Exact => exact_kmedian(inst, k)?,
                SolverTag::LocalSearch { epsilon } => local_search_kmedian(inst, k, epsilon)?,
                SolverTag::GreedySize => {
                    let (_, opt) = exact_kmedian(inst, k)?;
                    greedy_size_approx(inst, k, &opt)?
                }
            };
            Ok(KSolution { k, facilities, cost })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut sol = OfflineSolution { solver, per_k };
    sol.repair_monotone();
    Ok(sol)
}
