//! Longest arcs of left-invariant contact sub-Lorentzian structures on
//! three-dimensional Lie groups.
//!
//! The crate classifies the structures by their Lie algebra
//! ([`liealg3`], [`cases`]), decides existence of longest arcs from the
//! geometry of the time cone ([`conegeom`], [`existence`]), models the
//! universal cover of `SL(2,R)` ([`sl2cover`]) and produces numerical
//! evidence for long arcs on the groups ([`longarc`]).

pub mod cases;
pub mod conegeom;
pub mod existence;
pub mod liealg3;
pub mod linalg;
pub mod longarc;
pub mod sl2cover;

pub use cases::{from_case, CaseId, SubLorentzCase};
pub use conegeom::{Covector, SolidCone};
pub use existence::{Outcome, Verdict};
pub use liealg3::LieAlgebra3;
