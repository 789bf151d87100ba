//! Finite monoids and finite algebras: endomorphism monoids, retracts,
//! congruences, Karoubi envelopes, and decision procedures for FitzGerald's
//! properties (RI), (UR), (RI*), (UR*) together with commuting idempotents.

pub mod algebra;
pub mod builtin;
pub mod congruence;
pub mod corpus;
pub mod elemset;
pub mod hom;
pub mod karoubi;
pub mod monoid;
pub mod presentation;
pub mod props;
pub mod search;

pub use algebra::{AlgebraError, FiniteAlgebra, Operation, Signature, Subalgebra};
pub use congruence::{congruence_join, enumerate_congruences, quotient_algebra, Congruence};
pub use elemset::ElemSet;
pub use hom::{algebra_isomorphic, endomorphisms, homomorphisms, EndMonoid, EndoMap};
pub use monoid::{monoid_isomorphic, verify_monoid_axioms, FiniteMonoid, MonoidError, Side};
pub use props::{bridge_check, full_report, PropertyReport, PropsConfig};
