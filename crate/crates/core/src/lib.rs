//! Numerical laboratory for Christoffel–Darboux kernel measures.
//!
//! Builds orthonormal polynomials for probability measures on the real line
//! and on the unit circle, the measures `dμ_n = K_n(z,z)/(n+1) dμ` and the
//! normalized zero-counting measures `ν_{n+1}`, the approximating measures
//! used to compare them (Bernstein–Szegő, second-kind `ρ_n`, rank-one
//! perturbed spectral measures, balayage), and an experiment harness that
//! measures the moment gap `|m_k(μ_n) − m_k(ν_{n+1})|`.
//!
//! Module layout, bottom-up:
//!
//! * [`numerics`]: eigensolver, root finder, quadrature, phase tracking.
//! * [`measures`]: measure specifications, discretization, moments.
//! * [`oprl`] and [`opuc`]: orthonormal polynomials on ℝ and on ∂𝔻.
//! * [`approx`]: Bernstein–Szegő, `ρ_n`, Cauchy averages, balayage.
//! * [`harness`]: discrepancy experiments and rate fits.

pub mod approx;
pub mod config;
pub mod error;
pub mod harness;
pub mod measures;
pub mod numerics;
pub mod oprl;
pub mod opuc;

pub use config::Tolerances;
pub use error::{Error, Result};
pub use num_complex::Complex64;
