//! Numerical verification of Chen's first inequality for warped-product
//! submanifolds of real space forms.
//!
//! The crate is layered bottom-up:
//!
//! * [`exprlang`] parses user expressions and evaluates them with exact
//!   forward-mode derivatives up to third order.
//! * [`geomcore`] is the small dense linear algebra substrate.
//! * [`immersion`] models a warped-product chart immersed in a space form and
//!   computes fundamental forms in adapted frames.
//! * [`invariants`] computes intrinsic curvature two ways and the scalar
//!   invariants built from it.
//! * [`chen`] evaluates the algebraic lemmas, the inequalities and the
//!   equality-case classifier.

pub mod chen;
pub mod exprlang;
pub mod geomcore;
pub mod immersion;
pub mod invariants;
pub mod sampling;
