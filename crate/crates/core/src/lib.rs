//! Orlicz sequence spaces, permutation averages and an explicit embedding of
//! the matrix spaces `ℓ_M^n(ℓ_r^n)` into a finite-dimensional `L_1`.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure function
//! of its inputs; the heavy enumerations are split into fixed-size blocks that
//! an [`Executor`] may run in any order, so results depend only on the seed and
//! never on how many workers evaluated them.
#![no_std]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
mod math;

pub mod average;
pub mod construct;
pub mod embed;
pub mod exec;
pub mod orlicz;
pub mod perm;
pub mod rearrange;
pub mod rng;

pub use error::{Error, Result};
pub use exec::{Executor, Sequential};
pub use orlicz::{
    luxemburg_norm, Exponents, OrliczFunction, PiecewiseAffine, Tail, WeightVector, YoungFunction,
};
