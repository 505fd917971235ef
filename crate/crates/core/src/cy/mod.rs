//! Flat Calabi-Yau models on `R^{2n}`: constant forms, the algebraic axioms
//! and the complex structure determined by the holomorphic volume form.

mod annihilator;
mod axioms;
mod constant;
mod io;
mod model;

pub use annihilator::{annihilator_space, Annihilator, RANK_TOL};
pub use axioms::{validate_axioms, AxiomCheck, AxiomReport};
pub use constant::{ComplexForm, ConstantForm, FormScalar};
pub use io::{model_from_json, model_to_json, FormSpec, ModelSpec};
pub use model::{dz, holomorphic_volume, omega_matrix, FlatCalabiYauModel, MAX_COMPLEX_DIM};
