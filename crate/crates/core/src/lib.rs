//! Exact and numeric tools for twisted Toeplitz algebras, their multipullback
//! quotients (quantum odd spheres), strong connections and line-bundle
//! projectors.

pub mod algebra;
pub mod bundles;
pub mod error;
pub mod fock;
pub mod gauge;
pub mod json;
pub mod linalg;
pub mod quotient;
pub mod scalar;
pub mod twist;

pub use bundles::{chern_galois_projector, h_tail, pullback_hom, pullback_projector, strong_connection, verify_connection, ProjectorMatrix, TensorElement};
pub use algebra::{compact_matrix_unit, extend_hom, sphere_defect, AlgebraElement, AlgebraKind, Context, Monomial};
pub use fock::{class_invariant, fock_generator, relation_residual, represent, ClassInvariant, SparseOperator};
pub use error::{Error, Result};
pub use scalar::{Cyclotomic, Scalar};
pub use twist::{cocycle_phase, MultiIndex, PhaseExponent, ThetaMatrix, TwistMode};
