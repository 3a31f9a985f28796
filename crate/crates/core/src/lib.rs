//! Pseudospectral simulation of nonlocal dispersive wave equations
//!
//! The equations treated here have the form
//!
//! ```text
//!     u_t + u u_x + L(u_x) = 0
//! ```
//!
//! on a periodic domain, where `L` is a Fourier multiplier operator with an
//! even symbol `m`: `(L f)^(k) = m(k) f^(k)`. The Whitham equation
//! (`m = sqrt(tanh k / k)`), KdV (`m = k^2`), Benjamin-Ono (`m = |k|`) and
//! the fractional family (`m = |k|^a`) are built in. The real line is
//! emulated by a large torus with compactly supported data.
//!
//! The crate provides:
//!
//! * [`symbols`] — the multiplier catalog plus a numerical checker for the
//!   structural conditions (evenness, tail growth, tail Lipschitz bound);
//! * [`grid`] / [`field`] — collocation grids and grid functions with
//!   synchronized spectral representation, Sobolev norms, dealiased
//!   products and exact spectral translation;
//! * [`solver`] — a fourth-order exponential time-differencing integrator
//!   with conservation diagnostics and an empirical fit of the a-priori
//!   norm-growth constant;
//! * [`families`] — closed-form approximate solutions (a carrier wave with
//!   a constant drift on the torus, a two-scale wave packet on the long
//!   torus) and their residuals under the equation;
//! * [`experiments`] — the demonstrations that the data-to-solution map is
//!   not uniformly continuous, plus slope-fit verification suites;
//! * [`report`] / [`io`] — deterministic report documents, CSV diagnostics
//!   and field file formats.

pub mod error;
pub mod experiments;
pub mod families;
pub mod field;
mod fft;
pub mod grid;
pub mod io;
pub mod report;
pub mod solver;
pub mod symbols;

pub use error::{Error, Result};
pub use field::Field;
pub use grid::Grid;
pub use rustfft::num_complex::Complex64;
pub use symbols::{Symbol, SymbolKind};
