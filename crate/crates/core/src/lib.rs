//! Desk-scale simulator and solver for energy-efficiency-maximizing joint
//! communication and computation resource allocation in a NOMA-enabled
//! vehicular edge computing network.
//!
//! T-VUs offload delay-constrained tasks to roadside units (V2I) and to
//! socially trusted peer vehicles (V2V), underlaying cellular sub-channels
//! with NOMA. The solver alternates social-mobility-aware server selection
//! and task splitting with per-pair power allocation (tightening lower
//! bound + Lagrange dual) and Kuhn-Munkres spectrum matching, driving the
//! energy-efficiency ratio by a Dinkelbach update. Three baseline
//! algorithms, exhaustive verification oracles, and a reproducible Monte
//! Carlo sweep harness round out the crate.
//!
//! All numeric code is generic over the [`scalar::Scalar`] floating-point
//! type; the crate-root aliases fix the default `f64` instantiation used
//! by the harness and the CLI.

pub mod assignment;
pub mod baselines;
pub mod config;
pub mod constraints;
pub mod mat;
pub mod model;
pub mod oracle;
pub mod power;
pub mod scalar;
pub mod scenario;
pub mod solver;
pub mod sweep;

pub use baselines::Algorithm;
pub use config::{load_config, parse_config, validate_config, Config};
pub use scalar::Scalar;

/// Default scalar type for the harness and CLI.
pub type Real = f64;

pub type Scenario = scenario::Scenario<Real>;
pub type Allocation = model::Allocation<Real>;
pub type RateReport = model::RateReport<Real>;
pub type SolveRun = solver::SolveRun<Real>;
pub type SlotSolution = solver::SlotSolution<Real>;
