//! Exact periodic-point counting for latitude-preserving sphere maps.
//!
//! A map is coded by the degrees of its bands `(n0; d1, …, dN)`. The height
//! component is a piecewise-linear interval map with rational breakpoints; on
//! each band the map acts on the fiber circle by `α ↦ dα + θ`. Counts of
//! `f^n` fixed points are computed exactly from itineraries.

pub mod angle;
pub mod catalog;
pub mod code;
pub mod error;
pub mod fiber;
pub mod model;
pub mod oracle;
pub mod pl;
pub mod rational;
pub mod verify;

pub use angle::{SymbolicAngle, IRR_TURNS};
pub use code::{
    classify_poles, compose_codes, fixed_point_lower_bound, global_degree, invariant_latitude_guarantee, leg_census,
    weak_lower_bound, LegLedger, LegType, PoleCase, PoleTag,
};
pub use error::{Error, Result};
pub use fiber::{compose_fiber, count_periodic, count_periodic_capped, fiber_fixed_count, FixedPointReport};
pub use model::{canonical_realization, BandCode, FiberAction, FiberedMap, SpherePoint};
pub use oracle::{grid_oracle, OracleResult};
pub use pl::{compose_pl, entropy_estimate, fixed_heights, iterate_pl, PLMap};
pub use rational::Q;
