//! Self-contained numeric kernels shared by the rest of the crate.

pub mod eigen;
pub mod phase;
pub mod quadrature;
pub mod roots;

pub use eigen::{symtridiag_eigen, SpectralData, TridiagonalSymmetric};
pub use phase::{track_argument, unwrap_phase, unwrap_phase_with_limit};
pub use quadrature::{
    gauss_chebyshev, gauss_legendre, golub_welsch, periodic_grid, periodic_quadrature,
    realline_quadrature, tangent_panels, QuadratureDomain, QuadratureRule,
};
pub use roots::{aberth_roots, newton_power_sums, ComplexPolynomial};
