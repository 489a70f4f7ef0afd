//! Orthonormal polynomials on the real line.
//!
//! Conventions: `b_1..b_m` on the diagonal, `a_1..a_{m−1}` off the diagonal,
//! `a_{n+1} p_{n+1}(x) = (x − b_{n+1}) p_n(x) − a_n p_{n−1}(x)` with `p_0 = 1`,
//! so `a_n = κ_{n−1}/κ_n`. A [`JacobiData`] of length `m` therefore yields
//! `p_0..p_{m−1}` and the product `a_m p_m`, which is exactly what
//! `J_m`, `K_{m−1}`, `ρ_{m−1}` and `θ_m` need.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::measures::{AtomicMeasure, Measure};
use crate::numerics::eigen::{symtridiag_eigen_with_cap, SpectralData, TridiagonalSymmetric};
use crate::numerics::phase::track_argument;
use crate::Complex64;

/// Recurrence coefficients of a measure on ℝ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobiData {
    b: Vec<f64>,
    a: Vec<f64>,
}

impl JacobiData {
    pub fn new(b: Vec<f64>, a: Vec<f64>) -> Result<Self> {
        if b.is_empty() || a.len() + 1 != b.len() {
            return Err(Error::InvalidArgument(format!(
                "Jacobi data needs m diagonal and m-1 off-diagonal entries, got {} and {}",
                b.len(),
                a.len()
            )));
        }
        if let Some(i) = a.iter().position(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::LostPositivity {
                index: i + 1,
                value: a[i],
            });
        }
        Ok(Self { b, a })
    }

    /// Jacobi data of the arcsine law on [−1, 1].
    pub fn chebyshev(m: usize) -> Self {
        let mut a = vec![0.5; m.saturating_sub(1)];
        if let Some(first) = a.first_mut() {
            *first = std::f64::consts::FRAC_1_SQRT_2;
        }
        Self { b: vec![0.0; m], a }
    }

    /// Number of diagonal entries `m`.
    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    /// Leading coefficients `κ_0..=κ_n`.
    pub fn kappa(&self, n: usize) -> Vec<f64> {
        let mut k = vec![1.0];
        for j in 0..n {
            k.push(k[j] / self.a[j]);
        }
        k
    }

    /// Upper-left `n × n` block `J_n`.
    pub fn block(&self, n: usize) -> Result<TridiagonalSymmetric> {
        self.require(n, "J_n")?;
        if n == 0 {
            return Err(Error::InvalidArgument("J_0 is empty".into()));
        }
        TridiagonalSymmetric::new(self.b[..n].to_vec(), self.a[..n - 1].to_vec())
    }

    /// `J_n + λ ⟨e_n, ·⟩ e_n`.
    pub fn perturbed_block(&self, n: usize, lambda: f64) -> Result<TridiagonalSymmetric> {
        let j = self.block(n)?;
        let mut diag = j.diag().to_vec();
        diag[n - 1] += lambda;
        TridiagonalSymmetric::new(diag, j.offdiag().to_vec())
    }

    fn require(&self, m: usize, what: &str) -> Result<()> {
        if m > self.len() {
            return Err(Error::InvalidArgument(format!(
                "{what} needs {m} recurrence coefficients, only {} available",
                self.len()
            )));
        }
        Ok(())
    }
}

/// `p_0(x)..p_n(x)` with the leading coefficients `κ_0..κ_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyValues {
    pub x: f64,
    pub values: Vec<f64>,
    pub kappa: Vec<f64>,
}

/// Orthonormal values rescaled by powers of `s = max(1, |x|)`:
/// `values[j] = p_j(x)/s^j` and `next = a_{n+1} p_{n+1}(x)/s^{n+1}`.
/// Far outside the support this keeps everything in floating-point range.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledValues {
    pub scale: f64,
    pub values: Vec<f64>,
    pub next: Option<f64>,
}

impl ScaledValues {
    /// `ln(p_j(x)²)` for index `j`.
    pub fn ln_sq(&self, j: usize) -> f64 {
        2.0 * (self.values[j].abs().ln() + j as f64 * self.scale.ln())
    }

    /// `ln K_d(x, x)` for `d ≤ n`.
    pub fn ln_kernel(&self, d: usize) -> f64 {
        let ln_s = self.scale.ln();
        // Terms grow with j outside the support; factor out the largest.
        let logs: Vec<f64> = (0..=d)
            .map(|j| 2.0 * (self.values[j].abs().ln() + j as f64 * ln_s))
            .collect();
        log_sum_exp(&logs)
    }

    /// `ln(a_{n+1}² p_{n+1}² + p_n²)`.
    pub fn ln_rho_denominator(&self) -> f64 {
        let n = self.values.len() - 1;
        let next = self.next.expect("scaled values evaluated without the next term");
        let s = self.scale;
        (s * s * next * next + self.values[n] * self.values[n]).ln() + 2.0 * n as f64 * s.ln()
    }
}

pub(crate) fn log_sum_exp(logs: &[f64]) -> f64 {
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    top + logs.iter().map(|l| (l - top).exp()).sum::<f64>().ln()
}

/// Stieltjes procedure against the measure's discretization.
pub fn jacobi_from_measure(measure: &Measure, m: usize) -> Result<JacobiData> {
    let atoms = measure.real_atoms()?;
    if m == 0 {
        return Err(Error::InvalidArgument("need at least one recurrence coefficient".into()));
    }
    // p_{m−1} must be nonzero in L²(μ).
    measure.check_degree(m - 1)?;
    if m > atoms.len() {
        return Err(Error::InvalidArgument(format!(
            "{m} coefficients exceed the {}-node discretization",
            atoms.len()
        )));
    }
    let scale = measure.support_radius().max(1.0);
    let (x, w) = (&atoms.nodes, &atoms.weights);
    let mut prev = vec![0.0; x.len()];
    let mut cur = vec![1.0; x.len()];
    let mut b = Vec::with_capacity(m);
    let mut a: Vec<f64> = Vec::with_capacity(m - 1);
    for j in 0..m {
        let bj: f64 = (0..x.len()).map(|i| w[i] * x[i] * cur[i] * cur[i]).sum();
        b.push(bj);
        if j + 1 == m {
            break;
        }
        let a_prev = if j == 0 { 0.0 } else { a[j - 1] };
        let next: Vec<f64> = (0..x.len())
            .map(|i| (x[i] - bj) * cur[i] - a_prev * prev[i])
            .collect();
        let norm_sq: f64 = (0..x.len()).map(|i| w[i] * next[i] * next[i]).sum();
        let aj = norm_sq.sqrt();
        if !(aj > 1e-10 * scale && aj.is_finite()) {
            return Err(Error::LostPositivity { index: j + 1, value: aj });
        }
        a.push(aj);
        prev = cur;
        cur = next.into_iter().map(|v| v / aj).collect();
    }
    JacobiData::new(b, a)
}

/// `p_0(x)..p_n(x)`; requires `n < J.len()`.
pub fn eval_orthonormal(j: &JacobiData, x: f64, n: usize) -> Result<PolyValues> {
    j.require(n + 1, "p_n")?;
    let mut values = Vec::with_capacity(n + 1);
    values.push(1.0);
    for k in 0..n {
        let prev = if k == 0 { 0.0 } else { j.a[k - 1] * values[k - 1] };
        values.push(((x - j.b[k]) * values[k] - prev) / j.a[k]);
    }
    Ok(PolyValues {
        x,
        values,
        kappa: j.kappa(n),
    })
}

/// `a_{n+1} p_{n+1}(x)`; requires `n + 1 ≤ J.len()`.
pub fn scaled_next(j: &JacobiData, x: f64, n: usize) -> Result<f64> {
    j.require(n + 1, "a_{n+1} p_{n+1}")?;
    let v = eval_orthonormal(j, x, n)?.values;
    let prev = if n == 0 { 0.0 } else { j.a[n - 1] * v[n - 1] };
    Ok((x - j.b[n]) * v[n] - prev)
}

/// Scaled evaluation, optionally including `a_{n+1} p_{n+1}`.
pub fn scaled_values(j: &JacobiData, x: f64, n: usize, with_next: bool) -> Result<ScaledValues> {
    j.require(n + 1, "p_n")?;
    let s = x.abs().max(1.0);
    let inv = 1.0 / s;
    let mut values = Vec::with_capacity(n + 1);
    values.push(1.0);
    for k in 0..n {
        let prev = if k == 0 { 0.0 } else { j.a[k - 1] * values[k - 1] * inv * inv };
        values.push(((x - j.b[k]) * inv * values[k] - prev) / j.a[k]);
    }
    let next = if with_next {
        let prev = if n == 0 { 0.0 } else { j.a[n - 1] * values[n - 1] * inv * inv };
        Some((x - j.b[n]) * inv * values[n] - prev)
    } else {
        None
    };
    Ok(ScaledValues { scale: s, values, next })
}

/// `K_n(x, x) = Σ_{j≤n} p_j(x)²`.
pub fn cd_kernel_diag(j: &JacobiData, x: f64, n: usize) -> Result<f64> {
    Ok(eval_orthonormal(j, x, n)?.values.iter().map(|v| v * v).sum())
}

/// `K_{n−k}(x,x) / K_n(x,x)`, evaluated in rescaled form.
pub fn kernel_ratio(j: &JacobiData, x: f64, n: usize, k: usize) -> Result<f64> {
    if k > n {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds n = {n}")));
    }
    let sv = scaled_values(j, x, n, false)?;
    Ok((sv.ln_kernel(n - k) - sv.ln_kernel(n)).exp())
}

fn eigen(t: &TridiagonalSymmetric) -> Result<SpectralData> {
    symtridiag_eigen_with_cap(t, Tolerances::default().eigen_max_iterations)
}

/// Checks `w_j = 1/K_{n−1}(x_j, x_j)` at every atom (absolute tolerance).
fn check_christoffel(j: &JacobiData, n: usize, s: &SpectralData, tol: f64) -> Result<()> {
    let mut worst = 0.0_f64;
    for (&x, &w) in s.eigenvalues.iter().zip(&s.first_component_sq) {
        let kernel = scaled_values(j, x, n - 1, false)?.ln_kernel(n - 1).exp();
        worst = worst.max((w - 1.0 / kernel).abs());
    }
    if worst > tol {
        return Err(Error::CrossCheck {
            what: "Christoffel weights 1/K_{n-1}",
            discrepancy: worst,
            tolerance: tol,
        });
    }
    Ok(())
}

/// Gauss rule of order `n`: zeros of `p_n` with Christoffel weights.
pub fn zeros_and_weights(j: &JacobiData, n: usize) -> Result<AtomicMeasure<f64>> {
    let s = eigen(&j.block(n)?)?;
    check_christoffel(j, n, &s, Tolerances::default().christoffel_weight)?;
    // First components may underflow to 0 for far-out atoms.
    Ok(AtomicMeasure {
        nodes: s.eigenvalues,
        weights: s.first_component_sq,
    })
}

/// `∫ x^k dν_n` for k = 0..=k_max, from the zeros of `p_n` and checked
/// against `trace(J_n^k)/n`.
pub fn nu_moment_vector(j: &JacobiData, n: usize, k_max: usize) -> Result<Vec<f64>> {
    let block = j.block(n)?;
    let zeros = eigen(&block)?.eigenvalues;
    let radius = zeros.iter().fold(1.0_f64, |r, x| r.max(x.abs()));
    let tol = Tolerances::default().trace_check;
    let mut out = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let direct = zeros.iter().map(|x| x.powi(k as i32)).sum::<f64>() / n as f64;
        let trace = block.trace_power(k) / n as f64;
        let discrepancy = (direct - trace).abs() / radius.powi(k as i32);
        if discrepancy > tol {
            return Err(Error::CrossCheck {
                what: "zero power sums against trace(J_n^k)",
                discrepancy,
                tolerance: tol,
            });
        }
        out.push(direct);
    }
    Ok(out)
}

pub fn nu_moments(j: &JacobiData, n: usize, k: usize) -> Result<f64> {
    Ok(nu_moment_vector(j, n, k)?[k])
}

/// `∫ x^k dμ_n` for k = 0..=k_max with `dμ_n = K_n(x,x)/(n+1) dμ`.
pub fn mu_n_moment_vector(measure: &Measure, j: &JacobiData, n: usize, k_max: usize) -> Result<Vec<f64>> {
    let atoms = measure.real_atoms()?;
    measure.check_degree(n)?;
    j.require(n + 1, "K_n")?;
    let mut out = vec![0.0; k_max + 1];
    for (x, w) in atoms.iter() {
        let kernel: f64 = eval_orthonormal(j, x, n)?.values.iter().map(|v| v * v).sum();
        let mut term = w * kernel;
        for slot in out.iter_mut() {
            *slot += term;
            term *= x;
        }
    }
    Ok(out.into_iter().map(|v| v / (n + 1) as f64).collect())
}

pub fn mu_n_moments(measure: &Measure, j: &JacobiData, n: usize, k: usize) -> Result<f64> {
    Ok(mu_n_moment_vector(measure, j, n, k)?[k])
}

/// Spectral measure of `(J_n + λ⟨e_n,·⟩e_n, e_1)`.
pub fn perturbed_spectral_measure(j: &JacobiData, n: usize, lambda: f64) -> Result<AtomicMeasure<f64>> {
    let s = eigen(&j.perturbed_block(n, lambda)?)?;
    check_christoffel(j, n, &s, Tolerances::default().christoffel_weight)?;
    // First components may underflow to 0 for far-out atoms.
    Ok(AtomicMeasure {
        nodes: s.eigenvalues,
        weights: s.first_component_sq,
    })
}

/// Continuous Prüfer phase `θ_n` with `tan θ_n = a_n p_n / p_{n−1}` on an
/// increasing grid, anchored so that `θ_n(grid[0]) ∈ (−π/2, π/2]`.
pub fn real_prufer_theta(j: &JacobiData, n: usize, grid: &[f64]) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("θ_n needs n ≥ 1".into()));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("Prüfer grid must be strictly increasing".into()));
    }
    j.require(n, "θ_n")?;
    let pair = |x: f64| -> Complex64 {
        let sv = scaled_values(j, x, n - 1, true).expect("length checked above");
        let b = sv.values[n - 1];
        let a = sv.scale * sv.next.unwrap_or(0.0);
        let z = Complex64::new(b, a);
        z / z.norm()
    };
    let depth = Tolerances::default().phase_refine_depth;
    let mut theta = track_argument(pair, grid, FRAC_PI_2, depth)?;
    if let Some(&x0) = grid.first() {
        let z = pair(x0);
        let principal = if z.re == 0.0 { FRAC_PI_2 } else { (z.im / z.re).atan() };
        let shift = principal - theta[0];
        let shift = std::f64::consts::PI * (shift / std::f64::consts::PI).round();
        for t in theta.iter_mut() {
            *t += shift;
        }
    }
    Ok(theta)
}
