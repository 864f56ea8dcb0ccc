//! Chromatic zeros of hierarchical lattices.
//!
//! The pipeline: a marked generating graph ([`graph`]) determines, through
//! boundary-conditioned Potts partition functions ([`potts`]), a recursion
//! template and a reduced renormalization map ([`renorm`]). Iterating the
//! template exactly gives the level-`n` chromatic polynomial, whose zeros
//! and empirical measure live in [`zeros`]. [`render`] classifies the
//! parameter plane by the orbit of `y = 0`.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod budget;
pub mod error;
pub mod graph;
pub mod poly;
pub mod potts;
pub mod render;
pub mod renorm;
pub mod verify;
pub mod zeros;

pub use budget::Budgets;
pub use error::{Error, Result};
