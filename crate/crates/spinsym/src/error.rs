//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse exact rational from `{0}`")]
    Parse(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpinorError {
    #[error("slot variance does not match the requested operation")]
    VarianceMismatch,
    #[error("contraction requires one upper and one lower slot of equal primedness")]
    ContractionMismatch,
    #[error("array shapes are incompatible: {0}")]
    ShapeMismatch(String),
    #[error("array is not symmetric; symmetric storage rejected")]
    NotSymmetric,
    #[error("slot index out of range")]
    SlotOutOfRange,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JetError {
    #[error("jet order {needed} exceeds context max order {max}; enlarge the context")]
    MaxOrderExceeded { needed: usize, max: usize },
    #[error("operation requires a polynomial in coordinates/parameters only")]
    JetVariablePresent,
    #[error("unknown field family {0}")]
    UnknownFamily(usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("unsupported Killing spinor type ({k},{l}): no closed-form dimension")]
    UnsupportedKillingType { k: usize, l: usize },
    #[error("input does not solve the field equation; residual has {residual_terms} terms")]
    NotASolution { residual_terms: usize },
    #[error("expected a Killing spinor of type ({expected_k},{expected_l}), got ({got_k},{got_l})")]
    WrongKillingType {
        expected_k: usize,
        expected_l: usize,
        got_k: usize,
        got_l: usize,
    },
    #[error(transparent)]
    Jet(#[from] JetError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TensorError {
    #[error("tensor is not antisymmetric in the required slots")]
    NotAntisymmetric,
    #[error("coefficient constraint violated: {0}")]
    ConstraintViolation(String),
    #[error("tensor shapes are incompatible: {0}")]
    ShapeMismatch(String),
}
