//! Exact arithmetic for the extended Hermitian modular group over
//! imaginary-quadratic fields.
//!
//! The library constructs and verifies, in exact arithmetic only, the maximal
//! discrete extension of the Hermitian modular group of degree `n` over
//! `K = Q(sqrt(-m))`:
//!
//! * [`quadfield`]: the field `K` and its ring of integers,
//! * [`ideals`]: fractional ideals in Hermite normal form,
//! * [`classgroup`]: the ideal class group via reduced binary quadratic forms,
//! * [`matgroup`]: scaled matrices `(1/u)L` in `SU(n,n)` and membership tests,
//! * [`extension`]: coset representatives, Atkin-Lehner involutions,
//! * [`orthobridge`]: the exact homomorphism into `SO(2,4)`,
//! * [`fielddef`]: the field of definition and its ramification support,
//! * [`verify`]: batch verification suites with machine-readable reports.
//!
//! Floating point appears only in the half-space actions of [`orthobridge`];
//! every group-level statement is checked over `Z`, `Q` or `O_K` exactly.

pub mod classgroup;
pub mod extension;
pub mod fielddef;
pub mod ideals;
pub mod jsonutil;
pub mod matgroup;
pub mod matrix;
pub mod orthobridge;
pub mod parallel;
pub mod quadfield;
pub mod verify;

use thiserror::Error;

/// Errors shared by all modules.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("m = {0} is not squarefree")]
    NotSquarefree(u64),
    #[error("m = {0} must be a positive integer")]
    InvalidField(u64),
    #[error("field mismatch: Q(sqrt(-{0})) vs Q(sqrt(-{1}))")]
    FieldMismatch(u64, u64),
    #[error("empty or all-zero generating set")]
    ZeroIdeal,
    #[error("denominator must be nonzero")]
    ZeroDenominator,
    #[error("element is not integral")]
    NotIntegral,
    #[error("d = {0} is not a squarefree divisor of the discriminant {1}")]
    NotAtkinIndex(u64, i64),
    #[error("discriminant mismatch between forms")]
    DiscriminantMismatch,
    #[error("matrix dimension mismatch")]
    DimensionMismatch,
    #[error("scale ell must be positive")]
    NonPositiveScale,
    #[error("unitary relation conj(L)^T J L = ell*J fails")]
    UnitaryRelation,
    #[error("det L = w^2 fails")]
    DeterminantMismatch,
    #[error("w*conj(w) = ell^n fails")]
    ScaleNormMismatch,
    #[error("integer content of L is incompatible with (ell, w)")]
    NonIntegralNormalization,
    #[error("matrix is not Hermitian")]
    NotHermitian,
    #[error("ideal class is not n-torsion: the Steinitz class of the requested module is not principal")]
    NotNTorsion,
    #[error("operation requires membership in the extended group")]
    NotMember,
    #[error("operation is only implemented for degree n = 2")]
    DegreeNotTwo,
    #[error("degree must be even")]
    DegreeNotEven,
    #[error("class group is not entirely 2-torsion")]
    NotTwoTorsion,
    #[error("point lies on the boundary: the automorphy factor vanishes")]
    BoundaryDegeneracy,
    #[error("matrix CZ+D is singular at the given point")]
    SingularFactor,
    #[error("field description is unknown: the Hilbert class field would be required")]
    UnknownFieldDescription,
    #[error("no solution found in a search that must succeed: {0}")]
    SearchExhausted(&'static str),
    #[error("internal invariant violated: {0}")]
    Internal(&'static str),
    #[error("invalid JSON input: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;
