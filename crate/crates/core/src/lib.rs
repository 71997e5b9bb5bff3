//! Exact-arithmetic toolkit for extracting subcomplexes from the
//! Chevalley-Eilenberg complex of a filtered nilpotent Lie algebra, plus a
//! symbolic reproduction of the same pipeline on a 3D contact frame.
//!
//! All linear algebra is over arbitrary-precision rationals; every operator
//! identity is checked exactly, with no tolerances.

pub mod calculus;
pub mod contact;
pub mod exterior;
pub mod formats;
pub mod lie;
pub mod linalg;
pub mod projections;
pub mod subcomplex;

pub use linalg::{QMat, Rat};
