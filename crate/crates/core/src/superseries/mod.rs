//! Truncated series in an even variable with Grassmann coefficients, super
//! derivatives, superconformal vector fields and their exponentials.

mod expmap;
mod fields;
mod series;

pub use expmap::{expmap_coordinates, expmap_forward, schwarzian, schwarzian_jet, ExpMapCoords};
pub use fields::{
    apply_d, apply_dpm, apply_t, apply_vector_field, commutator_h, commutator_identity_check, d_theta,
    exp_superconformal_n1, exp_superconformal_n2, exp_t, theta_free, theta_mul, CommutatorReport,
    ConformalityReport, FieldSymbol, Layout, N2Component, N2Output, SuperFieldN1, SuperFieldN2, SuperKind,
    VectorFieldCoeffs,
};
pub use series::{Expansion, PowerSeries, EXACT_TRUNC};
