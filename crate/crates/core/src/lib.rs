//! Numerical geometry of moduli spaces of special Lagrangian tori in flat
//! Calabi-Yau models.
//!
//! The crate is organized bottom-up:
//!
//! - [`forms`]: differential forms on periodic grid tori.
//! - [`cy`]: flat Calabi-Yau models given by three constant forms.
//! - [`slag`]: affine special Lagrangian families, period matrices, moduli
//!   coordinates and the Lagrangian embedding into `H^1 x H^{n-1}`.
//! - [`hessian`]: Hessian potentials, Legendre duality, Monge-Ampere.
//! - [`semiflat`]: the semiflat Kahler metric on `M x T^m` and its curvature.
//! - [`cli`]: the batch front end used by the `slag-moduli` binary.
//!
//! Runnable walkthroughs of each capability live in `examples/`.

pub mod boxgrid;
pub mod cli;
pub mod cy;
pub mod error;
pub mod forms;
pub mod hessian;
pub mod index;
pub mod quadrature;
pub mod semiflat;
pub mod slag;

pub use error::{Error, Result};
