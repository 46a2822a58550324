//! Error taxonomy shared by all modules.
//!
//! Variants mirror the failure modes of the operation contracts; [`Error::exit_code`]
//! maps them onto the CLI conventions (2 = validation, 3 = mathematical
//! precondition, 4 = truncation insufficient).

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Malformed input: JSON shape, unparsable numbers, inconsistent sizes.
    #[error("validation error: {0}")]
    Validation(String),

    /// EXACT backend: a declared conductor does not admit the requested root.
    #[error("conductor mismatch: conductor {conductor} does not contain a primitive root of order {order}")]
    ConductorMismatch { conductor: u32, order: u32 },

    /// Series composition with an inner series having a nonzero constant term.
    #[error("inner series has a nonzero constant term")]
    NonzeroConstantTerm,

    /// Reversion (or germ construction) with a vanishing linear coefficient.
    #[error("zero linear coefficient")]
    ZeroLinearCoefficient,

    /// Division by the zero series or the zero scalar.
    #[error("division by zero")]
    DivisionByZero,

    /// Primitive of a Laurent series whose y^{-1} coefficient is nonzero.
    #[error("nonzero residue: antiderivative would need a logarithm")]
    NonzeroResidue,

    /// EXACT backend asked for e^t with t != 0 (transcendental).
    #[error("no exact exponential: linear part of the flow is transcendental over the exact field")]
    NoExactExponential,

    /// formal_log of a germ that is not tangent to the identity.
    #[error("germ is not tangent to the identity")]
    NotTangent,

    /// formal_log of the identity germ.
    #[error("germ equals the identity at truncation")]
    IdentityGerm,

    /// Torsion/resonance undecidable at the working truncation.
    #[error("truncation too low: {0}")]
    TruncationTooLow(String),

    /// Certified finite-order germ where a resonant model was requested.
    #[error("germ is periodic (finite order)")]
    Periodic,

    /// extract_time residual check failed.
    #[error("germ does not lie in the model group at truncation")]
    NotInModel,

    /// Generators of a representation do not commute at truncation.
    #[error("generators do not commute at truncation")]
    Nonabelian,

    /// The g-integrand of the model builder has a pole or residue.
    #[error("integrand not holomorphic: {0}")]
    IntegrandNotHolomorphic(String),

    /// Built generators fail to commute (internal consistency violation).
    #[error("commutation failure in built model")]
    CommutationFailure,

    /// Cross-ratio recombination with identically vanishing denominator.
    #[error("degenerate cross-ratio combination")]
    DegenerateCrossRatio,

    /// The two lattice generators give incompatible affine data (theta, c).
    #[error("inconsistent affine structure: {0}")]
    InconsistentAffine(String),

    /// classify_pair input whose first representation is not of F0 type.
    #[error("representation is not of F0 type: {0}")]
    NotF0Type(String),

    /// Koenigs with |f'(0)| = 1 within tolerance.
    #[error("non-hyperbolic fixed point: |multiplier| = 1 within tolerance")]
    NonHyperbolic,

    /// Iteration stagnated without meeting the convergence contract.
    #[error("no convergence: {0}")]
    NoConvergence(String),

    /// Operation needs a backend capability the scalar type lacks (e.g. logarithms
    /// on the exact backend).
    #[error("backend mismatch: {0}")]
    BackendMismatch(String),

    /// A theorem-guaranteed consistency condition failed: indicates a bug or an
    /// input violating an uncheckable precondition.
    #[error("internal consistency violation: {0}")]
    Inconsistency(String),
}

impl Error {
    /// CLI exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        use Error::*;
        match self {
            Validation(_) | ConductorMismatch { .. } => 2,
            TruncationTooLow(_) => 4,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
