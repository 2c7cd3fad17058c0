use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported field modulus {0}, expected one of 2, 3, 5")]
    UnsupportedField(u8),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("field mismatch between operands")]
    FieldMismatch,

    #[error("matrix is singular")]
    Singular,

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("enumeration budget exceeded: needs {needed} elements, cap is {cap} (set FFVERIFY_BUDGET to raise)")]
    BudgetExceeded { needed: u128, cap: u128 },

    #[error("matrix is not upper triangular")]
    NotUpperTriangular,

    #[error("polar form is degenerate")]
    DegenerateForm,

    #[error("quadratic form does not belong to the fixed form space Q(b)")]
    NotInFormSpace,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
