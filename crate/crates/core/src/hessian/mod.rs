//! Hessian potentials on boxes in `R^m`: Hessian metrics, Monge-Ampere
//! residuals and solves, Legendre duality and the partial Legendre reduction.

mod interp;
mod io;
mod legendre;
mod ma_solver;
mod mirror;
mod partial;
mod potential;
mod stencil;
pub mod tolerance;

pub use interp::{Interpolant, Jet};
pub use io::{read_potential_csv, write_potential_csv, BuiltinPotential, PotentialKind, PotentialSpec, SolverFile};
pub use legendre::{
    conjugate_at, conjugate_on, discrete_conjugate, fenchel_residual, gradient_image_box, legendre_transform,
    legendre_transform_with, LegendreOptions, LegendrePair,
};
pub use ma_solver::{
    initial_guess, quadratic_boundary_fit, solve_ma_dirichlet, solve_ma_dirichlet_fn, MaSolution, SolveReport,
    SolverConfig,
};
pub use mirror::MirrorSwap;
pub use partial::{partial_legendre_2d, PartialLegendre};
pub use potential::{
    det_hessian, gradient_monotonicity, hessian_metric, ma_residual, HessianPotential,
};
pub(crate) use potential::check_convex_nodes;
pub(crate) use ma_solver::roundoff_level;
pub use stencil::{fornberg_weights, AxisStencil, GridStencils, MIN_NODES};
