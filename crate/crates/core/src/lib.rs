//! Classical groups over finite fields: exact class data and explicit
//! homomorphism pairs that are conjugate element-by-element yet admit no
//! global conjugator.
//!
//! The crate provides, bottom up:
//!
//! * [`field_tower`]: exact arithmetic in `F_{p^k}` with Frobenius, the
//!   unitary involution, square roots, and a fixed compatible system of
//!   embeddings up the tower;
//! * [`polyalg`]: univariate polynomial algebra over those fields, with
//!   seeded deterministic factorization, duals, twisted duals, and the
//!   type classification of self-reciprocal polynomials;
//! * [`class_data`]: partitions and conjugacy-class parameter data for the
//!   classical families, with validity checks and enumeration;
//! * [`matrixlab`]: dense exact matrices, the similarity invariant from
//!   elementary divisors, intertwiner (Sylvester) spaces, and bilinear /
//!   hermitian form utilities;
//! * [`groups`]: the classical groups as matrix groups with membership
//!   tests, breadth-first generation, centralizers, and conjugacy search;
//! * [`witnesses`]: construction, lifting, and verification of the
//!   witness pairs themselves;
//! * [`report`] and [`cli`]: JSON reports and the command-line front end.

pub mod class_data;
pub mod cli;
pub mod field_tower;
pub mod groups;
pub mod matrixlab;
pub mod polyalg;
pub mod report;
pub mod selftest;
pub mod witnesses;

pub use field_tower::{make_field, FieldElement, FieldSpec};
