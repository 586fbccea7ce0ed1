//! Online bidding and oblivious (incremental) k-median.
//!
//! The crate covers bidding strategies and their payment analysis, offline
//! k-median solvers, the reductions that turn an offline solution plus a bid
//! set into a nested facility chain, and generators for the lower-bound
//! gadgets. All of it is generic over `f64` and exact rationals.

pub mod bidding;
pub mod error;
pub mod gamma;
pub mod generate;
pub mod graph;
pub mod hardness;
pub mod instance;
pub mod io;
pub mod metric;
pub mod oblivious;
pub mod scalar;
pub mod solvers;

pub use error::{Error, Result};
pub use gamma::{gamma, gamma_with};
pub use generate::generate_random_metric;
pub use instance::{FacilitySet, Label, MedianInstance};
pub use io::{parse_instance, AnyInstance};
pub use metric::{is_lambda_relaxed, metric_report, MetricReport, Quadruple};
pub use oblivious::{
    build_cost_competitive, build_cost_competitive_relaxed, build_size_competitive, verify_chain, ChainMode, ChainReport,
    FacilityChain,
};
pub use scalar::{Extended, NumericMode, Rational, Scalar};
pub use solvers::{
    exact_kmedian, greedy_size_approx, local_search_kmedian, solve_sequence, KSolution, OfflineSolution, SolverTag,
};

/// Library version embedded in every artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
