//! Numerical laboratory for minimizing p-Dirichlet energies of maps from planar
//! domains into circle-like targets as the exponent p increases toward 2.
//!
//! A map `u : Ω ⊂ ℝ² → 𝒩` with a boundary datum of nonzero winding cannot be
//! W^{1,2}; its p-energy `∫_Ω |Du|^p / p` blows up like `E_sg / (2 − p)` where the
//! coefficient `E_sg` is a purely topological "singular energy". This crate builds
//! the whole measurement chain around that fact on a uniform grid:
//!
//! * [`manifold`] — targets (circle, flat torus, Euclidean), projection, systole,
//!   and integer winding charges of sampled loops with their length `λ = 2π‖w‖₂`.
//! * [`field`] — discrete domains and manifold-valued fields, p-energies by
//!   forward differences, traces and energy densities on circles.
//! * [`solver`] — projected-gradient minimization with Armijo backtracking and
//!   warm-started continuation ladders in p.
//! * [`ballgrowth`] — vortex detection on plaquettes, growth of merging disks
//!   with conserved radius sums and charges, annulus lower bounds, and the
//!   weak-Lp comparison field `U` with its volume/perimeter estimates.
//! * [`energetics`] — minimal topological resolutions, singular energy, the two
//!   routes to the renormalized energy, the H-term, configuration energies, and
//!   continuity of the singular energy in p.
//! * [`harness`] — JSON-configured CLI (`solve`, `study`, `growballs`, `energy`,
//!   `verify`), deterministic CSV/JSON emission, and study orchestration.
//!
//! The examples directory exercises each capability end to end at desk scale;
//! `tests/acceptance.rs` pins the quantitative targets.

// Validation guards are written `!(x > 0.0)` so that NaN fails them too; the
// positively-phrased comparison clippy prefers would silently admit NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ballgrowth;
pub mod energetics;
pub mod error;
pub mod field;
pub mod harness;
pub mod manifold;
pub mod solver;

pub use error::{Error, Result};
