//! Finite-dimensional operator colligations, their semigroup products, and
//! the characteristic functions attached to them.
//!
//! * [`colligation`]: single colligations, `χ(z)` and the unit-circle
//!   spectral datum `Ξ`.
//! * [`multicolligation`]: tuples of colligations sharing an inner space and
//!   the matrix-argument characteristic function `χ(S)`.
//! * [`grassmann`]: linear relations and the subspace-argument relation
//!   `X(L)`.
//! * [`conjclass`]: colligations with several coupled inner slots.
//! * [`doublecoset`]: tuples under two-sided orthogonal equivalence and the
//!   two-argument function `χ(S, R)`.
//! * [`verify`]: randomized property suites over all of the above.

pub mod cli;
pub mod colligation;
pub mod conjclass;
pub mod document;
pub mod doublecoset;
pub mod error;
pub mod grassmann;
pub mod grid;
pub mod matrixcore;
pub mod multicolligation;
pub mod oracle;
pub mod verify;

pub use colligation::{CharValue, Colligation, XiMultiset};
pub use conjclass::TriColligation;
pub use doublecoset::{CharFun2Value, DoubleCosetFamily};
pub use error::{Error, Result};
pub use grassmann::{FormClass, HermitianFormSpec, LinearRelation, SubspaceL};
pub use matrixcore::{ComplexMatrix, Tolerances};
pub use multicolligation::{CharFunValue, MultiColligation};
