//! Relaxed-metric validation.
//!
//! An instance is λ-relaxed when `d_{fy} ≤ λ (d_{fx} + d_{xg} + d_{gy})` for all
//! facilities `f, g` and customers `x, y`. For fixed `(f, g, y)` the tightest
//! `x` minimises `d_{fx} + d_{xg}`, which is exactly `d'_{fg}`, so the scan is
//! `O(|F|² |C|)` once `d'` is known.

use crate::instance::MedianInstance;
use crate::scalar::{Extended, Scalar};

/// A quadruple `(f, x, g, y)` of facility, customer, facility, customer indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quadruple {
    pub f: usize,
    pub x: usize,
    pub g: usize,
    pub y: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport<S> {
    pub is_metric: bool,
    /// Smallest λ ≥ 1 for which the instance is λ-relaxed.
    pub lambda_star: Extended<S>,
    /// Quadruple attaining `lambda_star` when it exceeds 1.
    pub witness: Option<Quadruple>,
}

struct Route<S> {
    len: S,
    via: usize,
}

fn routes<S: Scalar>(inst: &MedianInstance<S>) -> Vec<Vec<Route<S>>> {
    let n = inst.num_facilities();
    (0..n)
        .map(|f| {
            (0..n)
                .map(|g| {
                    let mut best: Option<Route<S>> = None;
                    for (x, row) in inst.rows().iter().enumerate() {
                        let d = row[f].clone() + row[g].clone();
                        if best.as_ref().is_none_or(|b| d < b.len) {
                            best = Some(Route { len: d, via: x });
                        }
                    }
                    best.expect("instance has customers")
                })
                .collect()
        })
        .collect()
}

pub fn metric_report<S: Scalar>(inst: &MedianInstance<S>) -> MetricReport<S> {
    let routes = routes(inst);
    let n_f = inst.num_facilities();
    let mut lambda = S::one();
    let mut witness = None;
    for f in 0..n_f {
        for g in 0..n_f {
            let route = &routes[f][g];
            for (y, row) in inst.rows().iter().enumerate() {
                let numer = &row[f];
                let denom = route.len.clone() + row[g].clone();
                let quad = Quadruple { f, x: route.via, g, y };
                if denom.is_zero() {
                    if !numer.is_zero() {
                        return MetricReport {
                            is_metric: false,
                            lambda_star: Extended::Infinite,
                            witness: Some(quad),
                        };
                    }
                    continue;
                }
                let ratio = numer.clone() / denom;
                if ratio > lambda {
                    lambda = ratio;
                    witness = Some(quad);
                }
            }
        }
    }
    let is_metric = lambda.approx_le(&S::one());
    MetricReport {
        is_metric,
        lambda_star: Extended::Finite(lambda),
        witness: if is_metric { None } else { witness },
    }
}

/// Whether the instance is λ-relaxed, with the first violating quadruple otherwise.
pub fn is_lambda_relaxed<S: Scalar>(inst: &MedianInstance<S>, lambda: &S) -> (bool, Option<Quadruple>) {
    let routes = routes(inst);
    let n_f = inst.num_facilities();
    for f in 0..n_f {
        for g in 0..n_f {
            let route = &routes[f][g];
            for (y, row) in inst.rows().iter().enumerate() {
                let rhs = lambda.clone() * (route.len.clone() + row[g].clone());
                if !row[f].approx_le(&rhs) {
                    return (false, Some(Quadruple { f, x: route.via, g, y }));
                }
            }
        }
    }
    (true, None)
}
