//! Numerical laboratory for analytic function spaces on the unit disc and
//! weighted superposition operators between them.
//!
//! The crate is organised bottom-up: representations of analytic functions
//! (`discfun` for the disc, `entire` for the plane), quadrature primitives
//! (`quadrature`), norms and membership scans for the classical spaces
//! (`spaces`), zero location and zero-sequence statistics (`zeros`), and the
//! structured experiments tying them together (`superpos`).  `specs` holds
//! the serialisable input grammar used by the command line front end.

pub mod discfun;
pub mod entire;
pub mod error;
pub mod quadrature;
pub mod spaces;
pub mod specs;
pub mod superpos;
pub mod zeros;

pub use discfun::{ClosedForm, DiscFunction, EvalOpts, Factor};
pub use entire::{EntireFunction, Majorant};
pub use error::{Error, Result, OVERFLOW_CEILING};
pub use quadrature::{circle_mean, circle_mean_complex, disc_integral, DiscIntegral, DivergenceClass, QuadResult};
pub use specs::{EntireSpec, FunctionSpec};
pub use spaces::{
    bergman_norm, bloch_growth_bound, bloch_norm, bloch_seminorm_profile, dhinfv_norm, hinfv_norm,
    jensen_functional, jensen_mean, space_norm, MembershipOutcome, MembershipVerdict, RadialSample,
    SpaceSpec, Weight, SCAN_LEVELS,
};
pub use superpos::{
    corollary1_construction, corollary2_experiment, superpose, theorem1_witness, theorem2_probe,
    theorem4_check, ProbeReport, CONSTRUCTION_GRID,
};
pub use zeros::{
    blaschke_compatibility, blaschke_sum, count_zeros_disk, fit_growth, jensen_check, locate_zeros, partial_products,
    zero_incompatibility_verdict, zero_stats, Compatibility, GrowthLaw, GrowthModel, Provenance,
    ZeroEntry, ZeroList, ZeroStats,
};
