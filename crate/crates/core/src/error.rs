use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u32),
    #[error("q = {0} is outside the supported range")]
    UnsupportedModulus(u32),
    #[error("division by zero in F_{0}")]
    DivisionByZero(u32),
    #[error("operands live in different fields (F_{0} vs F_{1})")]
    FieldMismatch(u32, u32),
    #[error("matrix is singular")]
    Singular,
    #[error("matrix has determinant {0}, expected 1")]
    NotSpecialLinear(u32),
    #[error("matrix is not symplectic")]
    NotSymplectic,
    #[error("element does not lie in {0}")]
    NotInGroup(String),
    #[error("unknown subgroup name `{0}`")]
    UnknownSubgroup(String),
    #[error("subspace is not totally isotropic")]
    NotIsotropic,
    #[error("subspace dimension {0} is not supported")]
    BadDimension(usize),
    #[error("class functions are defined on different class data")]
    ClassDataMismatch,
    #[error("invalid transversal: {0}")]
    InvalidTransversal(String),
    #[error("{0}")]
    Domain(String),
    #[error("integrality violation: {what} = {value} is not a nonnegative integer within {tol}")]
    Integrality {
        what: String,
        value: String,
        tol: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
