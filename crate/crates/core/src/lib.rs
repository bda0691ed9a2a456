//! Spectral analysis and long-time asymptotics of one-sided coupled lattice
//! systems.
//!
//! The objects of study are infinite block systems over the integer lattice
//! in which site `k` is driven by its own state and by its left neighbour:
//!
//! ```text
//! discrete:    x_k(n+1) = T0 x_k(n) + T1 x_{k-1}(n)
//! continuous:  x_k'(t)  = A0 x_k(t) + A1 x_{k-1}(t)
//! ```
//!
//! with `x_k(n)` in `C^m` and fixed `m x m` blocks. The full operator is
//! block lower triangular and two-banded, so its spectral theory reduces to
//! a scalar rational function of the resolvent of the diagonal block (the
//! characteristic function, [`characteristic`]), frequency-wise symbol
//! analysis ([`spectral`], [`rates`]), and exactly representable dynamics on
//! eventually constant data ([`lattice`], [`flow`]).
//!
//! The crate is `no_std` (with `alloc`) apart from the default `std`
//! feature; the optional `parallel` feature distributes frequency sweeps
//! over threads without changing any result bit.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

#[cfg(test)]
#[macro_use]
extern crate std;

pub mod characteristic;
pub mod error;
pub mod expm;
pub mod flow;
pub mod lattice;
pub mod matrix;
pub mod models;
pub mod poly;
pub mod rates;
pub mod spectral;
mod util;

pub use characteristic::{CoupledSystem, SpecialForm, TimeKind};
pub use error::{Error, Result};
pub use lattice::{LatticeState, NormP, TailKind};
pub use matrix::ComplexMatrix;
pub use poly::{Polynomial, RationalFunction};
pub use rates::RateFit;
