//! Computer-algebra kernel for the formal classification of two-dimensional
//! neighborhoods of an elliptic curve with torsion normal bundle.
//!
//! The crate is organized bottom-up:
//! - [`coefficients`]: pluggable scalar fields — exact cyclotomic `Q(zeta_n)` and
//!   complex floating point — behind the [`coefficients::Coeff`] trait;
//! - [`series`]: truncated power/Laurent series arithmetic;
//! - [`germs`]: the group of formal diffeomorphisms fixing 0 at truncation;
//! - [`flows`]: formal vector fields, Lie-series flows, formal logarithms and
//!   dual meromorphic 1-forms;
//! - [`normalform`]: reduction of single germs and commuting pairs to their
//!   resonant/linear models, with `(a, k, lambda)` extraction;
//! - [`neighborhood`]: universal-cover presentations, the model builder, the
//!   pencil of closed 1-forms, holonomy, fibration models, the involution and
//!   cross-ratio recombination;
//! - [`bifoliated`]: tangency, affine structure, compatibility and the full
//!   `(m, k, p, lambda, Lambda)` classification modulo the root-of-unity action;
//! - [`dynamics`]: floating-point convergence diagnostics (Koenigs, Brjuno,
//!   diophantine profiles).

pub mod bifoliated;
pub mod coefficients;
pub mod dynamics;
pub mod error;
pub mod flows;
pub mod germs;
pub mod neighborhood;
pub mod normalform;
pub mod series;

pub use error::Error;

/// Exact backend scalar: element of a cyclotomic field `Q(zeta_n)`.
pub type Exact = coefficients::Cyclo;
/// Floating backend scalar at double precision.
pub type Approx = coefficients::Cplx<f64>;
/// Floating backend scalar at single precision.
pub type Approx32 = coefficients::Cplx<f32>;
