//! Exact linear algebra over the prime fields F2, F3, F5, together with
//! exhaustive verifiers for bounded-rank affine matrix subspaces and the
//! exceptional structure of the affine preservers of GL2(F2).
//!
//! The crate is organized around five layers:
//!
//! * [`mat`] — dense matrices over a small prime field, with a bit-packed
//!   fast path for F2 (word rows plus a precomputed rank table for tiny
//!   shapes).
//! * [`subspace`] — linear and affine subspaces of matrix spaces:
//!   canonical forms, the two-sided equivalence action, rank sweeps, and
//!   streaming enumeration of all k-dimensional subspaces of an ambient
//!   space.
//! * [`flanders`] — theorem verifiers that sweep entire populations of
//!   subspaces and emit machine-readable reports.
//! * [`quadform`] — quadratic forms over F2 in even dimension: polar
//!   forms, symplectic bases, the Arf invariant, and the sixteen-element
//!   form space attached to the canonical symplectic form on F2^4.
//! * [`groups`] — the finite groups in play (Sp4(F2), the Frobenius group
//!   of two-sided multiplications, the affine stabilizers of GL2(F2)) and
//!   certificates for the isomorphisms between them.

pub mod budget;
pub mod error;
pub mod flanders;
pub mod groups;
pub mod mat;
pub mod quadform;
pub mod report;
pub mod subspace;
pub mod suite;

pub use budget::Budget;
pub use error::Error;
pub use mat::{FieldP, Mat};
pub use report::VerificationReport;
pub use subspace::{AffineSubspace, SubspaceClass};
