//! Differential forms on periodic grid tori: exterior algebra, spectral
//! exterior derivative, metric Hodge star, cycle integrals and L2 pairings.

mod cycles;
mod field;
mod grid;
mod io;
mod metric;
mod ops;
mod spectral;

pub use cycles::{integrate_cycle, Cycle, CycleBasis};
pub use field::FormField;
pub use grid::{GridTorus, MIN_RESOLUTION};
pub use io::{read_form_csv, write_form_csv};
pub use metric::{MetricField, NodeSet, METRIC_EIG_FLOOR};
pub use ops::{
    coordinate_one_form, exterior_derivative, harmonicity_residual, hodge_star, l2_inner, wedge,
};
pub use spectral::differentiate;

/// Default certification tolerance for residual checks.
pub const DEFAULT_TOL: f64 = 1e-8;
