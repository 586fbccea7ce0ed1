//! Seeded random metric instances.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::metric_closure;
use crate::instance::{Label, MedianInstance};
use crate::scalar::Rational;

/// Denominator that Euclidean distances are rounded to.
pub const DISTANCE_DENOMINATOR: i64 = 1_000_000;

/// Customers and facilities uniform in the unit square; Euclidean distances
/// rounded to multiples of 10⁻⁶, then closed under shortest paths so rounding
/// cannot break the triangle inequality.
pub fn generate_random_metric(n_customers: usize, n_facilities: usize, seed: u64) -> Result<MedianInstance<Rational>> {
    if n_customers == 0 || n_facilities == 0 {
        return Err(Error::InvalidArgument("instance sizes must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut point = || (rng.random::<f64>(), rng.random::<f64>());
    let customers: Vec<(f64, f64)> = (0..n_customers).map(|_| point()).collect();
    let facilities: Vec<(f64, f64)> = (0..n_facilities).map(|_| point()).collect();

    let dist: Vec<Vec<Rational>> = customers
        .iter()
        .map(|&(cx, cy)| {
            facilities
                .iter()
                .map(|&(fx, fy)| {
                    let d = ((cx - fx).powi(2) + (cy - fy).powi(2)).sqrt();
                    let scaled = (d * DISTANCE_DENOMINATOR as f64).round() as i64;
                    Rational::new(BigInt::from(scaled), BigInt::from(DISTANCE_DENOMINATOR))
                })
                .collect()
        })
        .collect();
    let dist = metric_closure(&dist)?;
    MedianInstance::new(
        (0..n_customers).map(Label::from).collect(),
        (0..n_facilities).map(Label::from).collect(),
        dist,
        None,
    )
}
