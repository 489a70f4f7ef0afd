//! Every numerical threshold used by the library, in one record.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// QL sweeps allowed per eigenvalue.
    pub eigen_max_iterations: usize,
    /// Accepted residual `|p(z)| / (|κ| max(1,|z|)^deg)` after the iteration.
    pub root_accept: f64,
    pub root_max_sweeps: usize,
    /// Roots closer than this are merged into one cluster.
    pub root_cluster: f64,
    /// Initial trapezoid resolution for weighted circle measures.
    pub circle_nodes: usize,
    /// Gauss rule size for weighted interval measures.
    pub interval_nodes: usize,
    /// Successive resolutions must agree to this on the monitored moments.
    pub resolution_agreement: f64,
    /// Upper bound on any doubled grid.
    pub max_nodes: usize,
    /// Relative agreement required between successive quadrature doublings.
    pub quadrature_convergence: f64,
    /// Gauss–Legendre nodes per panel for the λ average.
    pub lambda_nodes: usize,
    /// Verblunsky coefficients must satisfy |α| < 1 − this.
    pub verblunsky_margin: f64,
    /// Christoffel weight cross-check (relative).
    pub christoffel_weight: f64,
    /// Eigenvalue versus trace-of-power cross-check.
    pub trace_check: f64,
    /// Additive slack on the circle bound 2k/(n+1).
    pub circle_gap: f64,
    /// Required agreement of the two balayage moment channels.
    pub channel_agreement: f64,
    /// Moments below this magnitude are treated as noise.
    pub moment_noise: f64,
    /// Initial and maximal grid sizes for phase tracking.
    pub phase_grid_start: usize,
    pub phase_grid_cap: usize,
    /// Bisection depth used when tracking a continuous argument.
    pub phase_refine_depth: usize,
    /// Required accuracy of the phase winding 2π(n+1).
    pub winding: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eigen_max_iterations: 60,
            root_accept: 1e-10,
            root_max_sweeps: 200,
            root_cluster: 1e-6,
            circle_nodes: 4096,
            interval_nodes: 2048,
            resolution_agreement: 1e-11,
            max_nodes: 1 << 20,
            quadrature_convergence: 1e-12,
            lambda_nodes: 256,
            verblunsky_margin: 1e-13,
            christoffel_weight: 1e-9,
            trace_check: 1e-9,
            circle_gap: 1e-8,
            channel_agreement: 1e-7,
            moment_noise: 1e-10,
            phase_grid_start: 1 << 12,
            phase_grid_cap: 1 << 18,
            phase_refine_depth: 40,
            winding: 1e-8,
        }
    }
}
