//! Time-fractional heat flow on the unit disk and the circular diffusions
//! behind it.
//!
//! The solution of `D_t^g u = (1/2) d^2u/dphi^2` with `u(0) = f` is
//! `sum a_k d_k(t) z^k`, where `d_k(t) = E[exp(-k^2 E(t) / 2)]` and `E` is
//! the inverse of the subordinator with Bernstein function `g`. The crate
//! computes `d_k` ([`kernels`]), evaluates solutions ([`solver`]), samples
//! the time change ([`subsim`]) and the wrapped process ([`wrapped`]),
//! checks moments ([`moments`]) and approximates it by random walks
//! ([`ctrw`]).

pub mod bernstein;
pub mod ctrw;
pub mod error;
pub mod hiprec;
pub mod kernels;
pub mod laplace;
pub mod mc;
pub mod moments;
pub mod quad;
pub mod solver;
pub mod specfun;
pub mod subsim;
pub mod wrapped;

pub use error::{Error, Result};
