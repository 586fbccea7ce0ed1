//! Two-budget medians: the star gadget and the better-of-two-options algorithm.

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{bipartite_closure, Edge};
use crate::instance::{FacilitySet, Label, MedianInstance};
use crate::scalar::{Extended, Rational, Scalar};
use crate::solvers::{best_extension, exact_kmedian};

/// Star with hub `f` (facility 0) and leaves `g_1..g_l` (facilities `1..=l`).
/// Customer `j` has an edge of length `δ = 1/l` to `g_j` and of length 1 to
/// `f`, so `d(j, g_i) = 2 + δ` for `i ≠ j`.
#[derive(Debug, Clone, PartialEq)]
pub struct KlInstance {
    pub l: usize,
    pub instance: MedianInstance<Rational>,
    pub hub: usize,
    pub leaves: FacilitySet,
    pub delta: Rational,
}

/// The four costs the lower bound rests on.
#[derive(Debug, Clone, PartialEq)]
pub struct KlCosts {
    pub cost_f: Rational,
    pub cost_g: Rational,
    pub cost_single_leaf: Rational,
    pub cost_swap: Rational,
}

impl KlCosts {
    /// `cost({g_i}) / cost({f})`.
    pub fn small_ratio(&self) -> Rational {
        self.cost_single_leaf.clone() / self.cost_f.clone()
    }

    /// `cost(G − g_i + f) / cost(G)`.
    pub fn large_ratio(&self) -> Rational {
        self.cost_swap.clone() / self.cost_g.clone()
    }
}

impl KlInstance {
    pub fn costs(&self) -> Result<KlCosts> {
        let inst = &self.instance;
        let mut swap = self.leaves.clone();
        swap.remove(1);
        swap.insert(self.hub);
        Ok(KlCosts {
            cost_f: inst.cost(&FacilitySet::singleton(self.hub))?,
            cost_g: inst.cost(&self.leaves)?,
            cost_single_leaf: inst.cost(&FacilitySet::singleton(1))?,
            cost_swap: inst.cost(&swap)?,
        })
    }

    /// `2 − 1/l`.
    pub fn target_ratio(&self) -> Rational {
        Rational::from_u64(2) - Rational::from_ratio(1, self.l as i64)
    }
}

pub fn build_kl(l: usize) -> Result<KlInstance> {
    if l < 2 {
        return Err(Error::InvalidArgument(format!("l = {l} must be at least 2")));
    }
    let delta = Rational::from_ratio(1, l as i64);
    let mut edges = Vec::with_capacity(2 * l);
    for j in 0..l {
        edges.push(Edge {
            customer: j,
            facility: 0,
            length: Rational::from_u64(1),
        });
        edges.push(Edge {
            customer: j,
            facility: j + 1,
            length: delta.clone(),
        });
    }
    let dist = bipartite_closure(l, l + 1, &edges)?;
    let customers = (1..=l).map(|j| Label::Text(format!("c{j}"))).collect();
    let facilities = std::iter::once(Label::Text("f".into()))
        .chain((1..=l).map(|i| Label::Text(format!("g{i}"))))
        .collect();
    let kl = KlInstance {
        l,
        instance: MedianInstance::new(customers, facilities, dist, None)?,
        hub: 0,
        leaves: FacilitySet::new(1..=l),
        delta: delta.clone(),
    };

    let c = kl.costs()?;
    let lq = Rational::from_u64(l as u64);
    let two = Rational::from_u64(2);
    let expected = [
        ("cost(f)", &c.cost_f, lq.clone()),
        ("cost(G)", &c.cost_g, lq.clone() * delta.clone()),
        (
            "cost(g_i)",
            &c.cost_single_leaf,
            delta.clone() + (lq.clone() - Rational::from_u64(1)) * (two + delta.clone()),
        ),
        (
            "cost(G - g_i + f)",
            &c.cost_swap,
            (lq - Rational::from_u64(1)) * delta + Rational::from_u64(1),
        ),
    ];
    for (name, got, want) in expected {
        if *got != want {
            return Err(Error::Invariant(format!("{name} = {got}, expected {want}")));
        }
    }
    Ok(kl)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KlOption {
    /// Keep the optimum `k`-set and grow it inside `F ∪ G`.
    KeepSmall,
    /// Keep the optimum `l`-set and shrink it for budget `k`.
    KeepLarge,
}

impl fmt::Display for KlOption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KlOption::KeepSmall => "a",
            KlOption::KeepLarge => "b",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KlOutcome<S> {
    pub small: FacilitySet,
    pub large: FacilitySet,
    pub ratio: Extended<S>,
    pub option: KlOption,
    pub opt_k: S,
    pub opt_l: S,
}

/// Nested pair `F_k ⊆ F_l` of sizes exactly `k` and `l`, the better of:
///
/// * (a) `F_k = F` and `F_l = F ∪ (G ∖ X)` with `X ⊆ G ∖ F` chosen so that
///   `|F_l| = l` and `cost(F_l)` is least;
/// * (b) `F_k = Y ⊆ G` of size `k` with least cost and `F_l = G`,
///
/// where F and G are optimum `k`- and `l`-medians. Ties go to (a).
pub fn kl_algorithm<S: Scalar>(inst: &MedianInstance<S>, k: usize, l: usize) -> Result<KlOutcome<S>> {
    if !(1 <= k && k < l && l <= inst.num_facilities()) {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= k < l <= {}, got k = {k}, l = {l}",
            inst.num_facilities()
        )));
    }
    let (f, opt_k) = exact_kmedian(inst, k)?;
    let (g, opt_l) = exact_kmedian(inst, l)?;
    let ratio = |ck: &S, cl: &S| Extended::ratio(ck, &opt_k).max(Extended::ratio(cl, &opt_l));

    let outside: Vec<usize> = g.difference(&f).iter().collect();
    let (grow, cost_a) = best_extension(inst, &f, &outside, l - k)?;
    let large_a = f.union(&grow);
    let ratio_a = ratio(&opt_k, &cost_a);

    let leaves: Vec<usize> = g.iter().collect();
    let (small_b, cost_b) = best_extension(inst, &FacilitySet::empty(), &leaves, k)?;
    let ratio_b = ratio(&cost_b, &opt_l);

    let b_wins = match (&ratio_a, &ratio_b) {
        (Extended::Finite(a), Extended::Finite(b)) => b < a,
        (Extended::Infinite, Extended::Finite(_)) => true,
        _ => false,
    };
    let out = if b_wins {
        KlOutcome {
            small: small_b,
            large: g,
            ratio: ratio_b,
            option: KlOption::KeepLarge,
            opt_k,
            opt_l,
        }
    } else {
        KlOutcome {
            small: f,
            large: large_a,
            ratio: ratio_a,
            option: KlOption::KeepSmall,
            opt_k,
            opt_l,
        }
    };
    if out.small.len() != k || out.large.len() != l || !out.small.is_subset(&out.large) {
        return Err(Error::Invariant(format!(
            "kl pair {} / {} is not nested with sizes {k} and {l}",
            out.small, out.large
        )));
    }
    Ok(out)
}
