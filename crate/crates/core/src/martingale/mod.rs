//! Drift and noise elements of each model, the exact Grassmann-integrated drift check,
//! Monte Carlo constancy tests, and the classical observable.

mod mc;
mod model;
mod observable;

pub use mc::{mc_martingale, CoefficientStat, McOptions, McReport, Quotient, SE_FLOOR};
pub use model::{
    build_model, drift_is_null, integrate_element, integrated_drift, ns1_weights, ns2_compare, ns2_drift_params,
    ns2_printed, reference_singular, virasoro_weights, DriftReport, ModelParams, ModelSpec, ModelTag, Ns2Comparison,
    Ns2Printed,
};
pub use observable::{bb_observable, observable_from_jet, observable_mc, Jet, ObservablePath, ObservableStats};
