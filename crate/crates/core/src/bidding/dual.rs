//! Dual certificates lower-bounding every randomized bidder on `[n]`.
//!
//! Weights `μ, π ≥ 0` on `[n]` certify the lower bound `∑μ / ∑π` whenever
//!
//! ```text
//! ∑_{T=t}^{n} π(T)/T  ≥  (1/b) ∑_{T=t}^{b} μ(T)      for all 1 ≤ t ≤ b ≤ n.
//! ```

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct DualCertificate<S> {
    pub n: usize,
    /// `mu[T - 1] = μ(T)`.
    pub mu: Vec<S>,
    /// `pi[T - 1] = π(T)`.
    pub pi: Vec<S>,
    /// Scale applied to the shape of `μ` (1 for hand-built certificates).
    pub alpha: S,
    /// `∑μ / ∑π`, or 0 when `∑π = 0`.
    pub bound: S,
}

impl<S: Scalar> DualCertificate<S> {
    pub fn new(mu: Vec<S>, pi: Vec<S>, alpha: S) -> Result<Self> {
        if mu.len() != pi.len() || mu.is_empty() {
            return Err(Error::InvalidArgument("mu and pi must be non-empty and equally long".into()));
        }
        if mu.iter().chain(&pi).any(|x| *x < S::zero()) {
            return Err(Error::InvalidArgument("mu and pi must be non-negative".into()));
        }
        let sum = |v: &[S]| v.iter().fold(S::zero(), |a, x| a + x.clone());
        let (sm, sp) = (sum(&mu), sum(&pi));
        let bound = if sp.is_zero() { S::zero() } else { sm / sp };
        Ok(DualCertificate {
            n: mu.len(),
            mu,
            pi,
            alpha,
            bound,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualVerdict {
    pub feasible: bool,
    /// Violated pair `(t, b)` with the smallest `t`, then smallest `b`.
    pub witness: Option<(usize, usize)>,
}

/// Exhaustive check of every pair `1 ≤ t ≤ b ≤ n` using prefix sums of μ and
/// suffix sums of `π(T)/T`. Exact for rationals; float mode allows the usual
/// relative slack.
pub fn verify_dual_condition<S: Scalar>(cert: &DualCertificate<S>) -> DualVerdict {
    let n = cert.n;
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(S::zero());
    for m in &cert.mu {
        let next = prefix.last().expect("seeded").clone() + m.clone();
        prefix.push(next);
    }
    // suffix[t - 1] = ∑_{T ≥ t} π(T)/T
    let mut suffix = vec![S::zero(); n + 1];
    for t in (1..=n).rev() {
        suffix[t - 1] = suffix[t].clone() + cert.pi[t - 1].clone() / S::from_u64(t as u64);
    }

    let violation = (1..=n).into_par_iter().find_map_first(|t| {
        let lhs = &suffix[t - 1];
        let base = &prefix[t - 1];
        (t..=n).find_map(|b| {
            let mass = prefix[b].clone() - base.clone();
            // mass / b <= lhs  <=>  mass <= b * lhs
            (!mass.approx_le(&(lhs.clone() * S::from_u64(b as u64)))).then_some((t, b))
        })
    });
    DualVerdict {
        feasible: violation.is_none(),
        witness: violation,
    }
}

/// Certificate with `μ(T) = α/T` on `[U, U²]` and `π(T) = 1/T` on
/// `[U, U² ln U]`, `n = ⌈U² ln U⌉`, and the largest α that keeps it feasible.
pub fn dual_certificate(u: u64) -> Result<DualCertificate<f64>> {
    if u < 2 {
        return Err(Error::InvalidArgument("U must be >= 2".into()));
    }
    let uf = u as f64;
    let pi_top = uf * uf * uf.ln();
    let n = pi_top.ceil() as usize;
    let mu_top = (u * u).min(n as u64) as usize;
    let lo = u as usize;

    let shape: Vec<f64> = (1..=n)
        .map(|t| if (lo..=mu_top).contains(&t) { 1.0 / t as f64 } else { 0.0 })
        .collect();
    let pi: Vec<f64> = (1..=n)
        .map(|t| if t >= lo && (t as f64) <= pi_top { 1.0 / t as f64 } else { 0.0 })
        .collect();

    // α* = min_t L(t) / max_b R(t, b) with R built from the unit shape. μ is
    // zero outside [U, U²] so only U ≤ t ≤ b ≤ U² can bind.
    let mut suffix = vec![0.0; n + 1];
    for t in (1..=n).rev() {
        suffix[t - 1] = suffix[t] + pi[t - 1] / t as f64;
    }
    let mut prefix = vec![0.0; n + 1];
    for t in 1..=n {
        prefix[t] = prefix[t - 1] + shape[t - 1];
    }
    let alpha = (lo..=mu_top)
        .into_par_iter()
        .map(|t| {
            let worst = (t..=mu_top)
                .map(|b| (prefix[b] - prefix[t - 1]) / b as f64)
                .fold(0.0f64, f64::max);
            suffix[t - 1] / worst
        })
        .reduce(|| f64::INFINITY, f64::min);

    let build = |alpha: f64| {
        let mu = shape.iter().map(|s| alpha * s).collect::<Vec<_>>();
        let bound = compensated_sum(mu.iter().copied()) / compensated_sum(pi.iter().copied());
        DualCertificate {
            n,
            mu,
            pi: pi.clone(),
            alpha,
            bound,
        }
    };
    let mut alpha = alpha;
    let mut cert = build(alpha);
    let mut tries = 0;
    while !verify_dual_condition(&cert).feasible {
        tries += 1;
        if tries > 8 {
            return Err(Error::Invariant(format!("could not certify alpha near {alpha} for U = {u}")));
        }
        alpha *= 1.0 - 1e-12;
        cert = build(alpha);
    }
    Ok(cert)
}
