//! Wave-front tracking and fractional-step splitting for one-dimensional
//! hyperbolic balance laws `u_t + f(u)_x = G(u)` whose source `G` may be
//! nonlocal (convolution with exponential kernels).
//!
//! The crate is `no_std` with `alloc`. Functions of `x` are piecewise constant
//! ([`PcFn`]) and stored as deviations from a base state, so their tails vanish.

#![no_std]
// NaN-rejecting guards are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod fronttrack;
pub mod math;
pub mod models;
pub mod parallel;
pub mod pcfn;
pub mod source;
pub mod splitting;
pub mod state;
pub mod stats;
pub mod system;
pub mod verify;

pub use error::{Error, Result};
pub use pcfn::{ExpKernel, PcFn};
pub use state::{Mat, State, MAX_DIM};
pub use system::SystemModel;
