//! Numerical laboratory for degenerate elliptic forms on domains with
//! self-similar fractal boundaries.
//!
//! The crate is organised bottom-up:
//!
//! - [`simsys`]: similarity systems, Moran dimension solver, and the Koch,
//!   Vicsek and Cantor-dust boundary generators.
//! - [`geomfield`]: grids over the domain, exact distance fields, volume
//!   scaling and dimension estimators, Ahlfors and uniformity probes.
//! - [`forms`]: the weighted quadratic form `h(φ) = ∫ d^δ |∇φ|²`, capacity
//!   test functions and solvers, Hardy quotients, collar integrals.
//! - [`stochastic`]: continuous-time random walks driven by the discrete form.
//! - [`record`]: experiment records shared with the command-line driver.

pub mod error;
pub mod forms;
pub mod geomfield;
pub mod linalg;
pub mod record;
pub mod simsys;
pub mod stochastic;

pub use error::{Error, Result};
pub use forms::{
    assemble_form, capacity_relaxed, capacity_upper_eta, collar_integral, eta_rn, hardy_quotient,
    truncated_singular_integral, CapacityResult, EdgeMean, EtaBound, HardyResult, SparseForm,
    Target, WeightField,
};
pub use geomfield::{
    ahlfors_check, build_grid, distance_field, minkowski_dimension, neighborhood_volume,
    uniformity_estimate, volume_scaling, AhlforsBounds, DistanceField, Grid, ScalingFit,
};
pub use record::ExperimentRecord;
pub use simsys::{
    cantor_dust, critical_delta, koch_snowflake, similarity_dimension, vicsek, BoundaryGeometry,
    DomainRule, Family, Primitives, Similarity, SimilaritySystem,
};
pub use stochastic::{walk_absorption, WalkConfig, WalkResult};

/// Maximum ambient dimension supported by the grid and geometry types.
pub const MAX_DIM: usize = 3;

/// Version tag stamped into every experiment record.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
