//! Nearest-subset selection Γ(A, B).
//!
//! Γ(A, B) is an inclusion-minimal `Γ ⊆ B` such that every `μ ∈ A` is as close
//! (in `d'`) to Γ as it is to all of B. Each `μ` (ascending id) is first
//! assigned its nearest element of B with the smallest id; the assigned set is
//! then pruned by trying removals in descending id order.

use crate::error::{Error, Result};
use crate::instance::{FacilitySet, MedianInstance};
use crate::scalar::Scalar;

pub fn gamma<S: Scalar>(inst: &MedianInstance<S>, a: &FacilitySet, b: &FacilitySet) -> Result<FacilitySet> {
    inst.check_set(a)?;
    inst.check_set(b)?;
    select(a, b, |mu, beta| inst.facility_distance(mu, beta))
}

/// Γ(A, B) against a precomputed `d'` matrix (see
/// [`MedianInstance::facility_distance_matrix`]).
pub fn gamma_with<S: Scalar>(dprime: &[Vec<S>], a: &FacilitySet, b: &FacilitySet) -> Result<FacilitySet> {
    for set in [a, b] {
        if set.is_empty() {
            return Err(Error::EmptyFacilitySet);
        }
        if let Some(f) = set.iter().find(|&f| f >= dprime.len()) {
            return Err(Error::UnknownFacility(f));
        }
    }
    select(a, b, |mu, beta| dprime[mu][beta].clone())
}

fn select<S: Scalar>(a: &FacilitySet, b: &FacilitySet, d: impl Fn(usize, usize) -> S) -> Result<FacilitySet> {
    // d'(μ, β) for μ ∈ A (rows) and β ∈ B (columns, in B's order)
    let table: Vec<Vec<S>> = a.iter().map(|mu| b.iter().map(|beta| d(mu, beta)).collect()).collect();
    let nearest: Vec<S> = table
        .iter()
        .map(|row| {
            row.iter()
                .skip(1)
                .fold(row[0].clone(), |acc, d| if *d < acc { d.clone() } else { acc })
        })
        .collect();

    let mut keep = vec![false; b.len()];
    for (row, best) in table.iter().zip(&nearest) {
        let j = row.iter().position(|d| d == best).expect("minimum is attained");
        keep[j] = true;
    }

    let still_served = |keep: &[bool]| {
        table
            .iter()
            .zip(&nearest)
            .all(|(row, best)| row.iter().zip(keep).any(|(d, k)| *k && d == best))
    };
    for j in (0..b.len()).rev() {
        if keep[j] {
            keep[j] = false;
            if !still_served(&keep) {
                keep[j] = true;
            }
        }
    }

    let out: FacilitySet = b.iter().zip(&keep).filter(|(_, k)| **k).map(|(f, _)| f).collect();
    if out.len() > a.len() {
        return Err(Error::Invariant(format!("|Γ| = {} exceeds |A| = {}", out.len(), a.len())));
    }
    Ok(out)
}
