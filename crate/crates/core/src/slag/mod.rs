//! Affine special Lagrangian torus families in flat models: contraction
//! forms, period matrices, moduli coordinates and the structural identities
//! they satisfy.

mod chart;
mod family;
mod io;
mod periods;

pub use chart::{
    closedness_loop_residual, closedness_loop_residual_mu, embed_F, moduli_coordinates,
    moduli_coordinates_ordered, rectangle_loop, Embedding, FamilyPeriods, ModuliChart,
    PeriodSource, ScanRow, SpecialnessScan, SyntheticPeriods, specialness_scan,
};
pub use family::{fiber_restriction_residuals_for, AffineSLagFamily, Phase};
pub use io::{family_from_json, family_from_value, family_to_json, model_from_value, FamilySpec};
pub use periods::{
    exact_period_matrices, lagrangian_residual, mclean_check, mclean_metric, period_matrices,
    McLeanMetric, McLeanReport, PeriodMatrices,
};
