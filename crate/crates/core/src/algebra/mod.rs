//! Graded spaces, labeled operator systems and their calculus.

pub mod axioms;
pub mod calculus;
pub mod space;
pub mod system;
pub mod transport;

use thiserror::Error;

use crate::labels::LabelError;

pub use axioms::{check_ud_axioms, check_ud_axioms_with, Axiom, AxiomCheck, Location, UdReport};
pub use calculus::{
    ainfty_defect, brace, brace_cell, diamond, diamond_cell, diamond_insert, diamond_insert_cell,
    hom_defect, hom_defect_cell, is_ainfty,
};
pub use space::{GradedSpace, LinMap, SVec};
pub use system::{Cell, Key, MultilinearOp, OpKind, OperatorSystem, Truncation, Tuple};
pub use transport::{conjugate, invert_homomorphism, transport_structure};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("degree violation: {0}")]
    DegreeViolation(String),
    #[error("linear part is not invertible")]
    NonInvertibleLinearPart,
    #[error("schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Label(#[from] LabelError),
}
