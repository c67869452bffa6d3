//! Exact double-coset combinatorics and Demazure operators for Coxeter systems.
//!
//! The crate is layered bottom-up:
//!
//! * [`coxeter`]: group elements, lengths, descents, parabolic subgroups and
//!   the Demazure (`⋆`) product.
//! * [`polyring`]: exact rational polynomials and realizations.
//! * [`cosets`]: parabolic double cosets, redundancies and cores.
//! * [`expressions`]: singular singlestep/multistep expressions.
//! * [`rewrite`]: singular braid moves, Matsumoto graphs, reduction.
//! * [`demazure`]: Demazure operators for elements, subsets, cosets and
//!   expressions, plus the nilCoxeter algebroid composition law.
//! * [`frobenius`]: almost dual and dual bases for invariant-ring extensions.
//! * [`verify`]: named check suites shared by the CLI.

pub mod cosets;
pub mod coxeter;
pub mod demazure;
pub mod expressions;
pub mod frobenius;
pub mod genset;
pub mod linalg;
pub mod polyring;
pub mod rewrite;
pub mod verify;

pub use cosets::DoubleCoset;
pub use coxeter::{Bond, CoxeterError, CoxeterMatrix, CoxeterSystem, GroupElement, Side};
pub use genset::GenSet;
pub use polyring::{Poly, Q, Realization};
