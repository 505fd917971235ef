//! The semiflat Calabi-Yau structure on `M x T^m` built from a convex
//! potential on the moduli space, with curvature checks and the
//! Gibbons-Hawking comparison in complex dimension two.

mod gh;
mod manifold;
mod nijenhuis;
mod report;
mod ricci;

pub use gh::{gh_check, gh_metric, GhMetric, GhReport};
pub use manifold::{
    build_semiflat, fiber_special_lagrangian, holomorphic_norm_field, FiberCheck, NormField, SemiflatManifold,
};
pub use nijenhuis::{
    almost_complex_structure, complex_structure_residual, grid_nijenhuis, hessian_chart_nijenhuis, NijenhuisReport,
    NIJENHUIS_STEP,
};
pub use report::{semiflat_report, write_field_csv, SemiflatReport};
pub use ricci::{
    christoffel_ricci, compare_ricci, ricci_domain, ricci_form, ricci_oracle, ricci_tolerance, RicciComparison,
    RicciField, RICCI_INSET,
};
