//! Quadrature rules: periodic trapezoid, Gauss–Legendre, Gauss–Chebyshev,
//! Golub–Welsch, and the tangent map of the real line onto a bounded
//! interval.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;

use super::eigen::{symtridiag_eigen, TridiagonalSymmetric};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadratureDomain {
    /// Uniform grid on [0, 2π); weights include the 1/2π normalization.
    Periodic,
    Interval { lo: f64, hi: f64 },
    /// `x = scale · tan(u)`; weights include the Jacobian.
    RealLine { scale: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub domain: QuadratureDomain,
}

impl QuadratureRule {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>, domain: QuadratureDomain) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != weights.len() {
            return Err(Error::InvalidArgument(format!(
                "quadrature rule with {} nodes and {} weights",
                nodes.len(),
                weights.len()
            )));
        }
        if let Some(i) = weights.iter().position(|w| !(*w > 0.0)) {
            return Err(Error::InvalidArgument(format!("quadrature weight {i} is not positive")));
        }
        Ok(Self { nodes, weights, domain })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_i f(x_i)`, failing on the first non-finite sample.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        let mut total = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let v = f(x);
            if !v.is_finite() {
                return Err(Error::NonFiniteIntegrand { node: x });
            }
            total += w * v;
        }
        Ok(total)
    }
}

/// `θ_j = 2πj/m`, j = 0..m.
pub fn periodic_grid(m: usize) -> Vec<f64> {
    (0..m).map(|j| TAU * j as f64 / m as f64).collect()
}

/// Mean value of samples on a uniform grid over [0, 2π), i.e. `∫ f dθ/2π`
/// by the trapezoid rule.
pub fn periodic_quadrature(samples: &[Complex64]) -> Result<Complex64> {
    if samples.len() < 2 {
        return Err(Error::InvalidArgument("periodic quadrature needs at least 2 samples".into()));
    }
    Ok(samples.iter().sum::<Complex64>() / samples.len() as f64)
}

/// Trapezoid mean of `f` over [0, 2π), doubling from `start` nodes until two
/// successive values agree to `rel_tol` (relative to `max(1, |value|)`).
/// The odd nodes of each doubling are the only new evaluations.
pub fn periodic_mean_adaptive<F>(
    f: F,
    start: usize,
    cap: usize,
    rel_tol: f64,
    what: &'static str,
) -> Result<(Vec<Complex64>, usize)>
where
    F: Fn(f64) -> Vec<Complex64>,
{
    let mut m = start.max(2);
    let mut sum: Vec<Complex64> = Vec::new();
    for theta in periodic_grid(m) {
        accumulate(&mut sum, f(theta));
    }
    let mut current: Vec<Complex64> = sum.iter().map(|s| s / m as f64).collect();
    loop {
        if 2 * m > cap {
            return Err(Error::QuadratureNoConvergence {
                what,
                nodes: m,
                change: f64::NAN,
            });
        }
        for j in 0..m {
            let theta = TAU * (2 * j + 1) as f64 / (2 * m) as f64;
            accumulate(&mut sum, f(theta));
        }
        m *= 2;
        let next: Vec<Complex64> = sum.iter().map(|s| s / m as f64).collect();
        let change = next
            .iter()
            .zip(&current)
            .map(|(a, b)| (a - b).norm() / a.norm().max(1.0))
            .fold(0.0_f64, f64::max);
        current = next;
        if change <= rel_tol {
            return Ok((current, m));
        }
        if 2 * m > cap {
            return Err(Error::QuadratureNoConvergence { what, nodes: m, change });
        }
    }
}

fn accumulate(sum: &mut Vec<Complex64>, values: Vec<Complex64>) {
    if sum.is_empty() {
        *sum = values;
    } else {
        for (s, v) in sum.iter_mut().zip(values) {
            *s += v;
        }
    }
}

/// Gauss–Legendre nodes (ascending) and weights on [−1, 1], by Newton
/// iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> QuadratureRule {
    assert!(n >= 1, "Gauss–Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d.is_finite() { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    QuadratureRule {
        nodes,
        weights,
        domain: QuadratureDomain::Interval { lo: -1.0, hi: 1.0 },
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Gauss–Legendre mapped to [lo, hi].
pub fn gauss_legendre_on(lo: f64, hi: f64, n: usize) -> QuadratureRule {
    let base = gauss_legendre(n);
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    QuadratureRule {
        nodes: base.nodes.iter().map(|t| mid + half * t).collect(),
        weights: base.weights.iter().map(|w| half * w).collect(),
        domain: QuadratureDomain::Interval { lo, hi },
    }
}

/// Gauss–Chebyshev (first kind) rule for the probability measure
/// `dx / (π √(1 − x²))` on [−1, 1]; nodes ascending, weights 1/n.
pub fn gauss_chebyshev(n: usize) -> QuadratureRule {
    let nodes = (0..n)
        .map(|j| -((2 * j + 1) as f64 * PI / (2 * n) as f64).cos())
        .collect();
    QuadratureRule {
        nodes,
        weights: vec![1.0 / n as f64; n],
        domain: QuadratureDomain::Interval { lo: -1.0, hi: 1.0 },
    }
}

/// Gauss rule of a probability measure from its Jacobi matrix.
pub fn golub_welsch(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<QuadratureRule> {
    let t = TridiagonalSymmetric::new(diag, offdiag)?;
    let s = symtridiag_eigen(&t)?;
    let lo = s.eigenvalues[0];
    let hi = *s.eigenvalues.last().unwrap_or(&lo);
    Ok(QuadratureRule {
        nodes: s.eigenvalues,
        weights: s.first_component_sq,
        domain: QuadratureDomain::Interval { lo, hi },
    })
}

/// Gauss–Legendre panels in `u` for `x = scale · tan(u)`, split at the
/// images of `breaks`. Weights carry the Jacobian `scale · sec²(u)`, so the
/// rule integrates `dx` over ℝ. Nodes ascend.
pub fn tangent_panels(scale: f64, breaks: &[f64], nodes_per_panel: usize) -> Result<QuadratureRule> {
    let edges = tangent_edges(scale, breaks)?;
    let base = gauss_legendre(nodes_per_panel);
    let mut nodes = Vec::with_capacity(base.len() * (edges.len() - 1));
    let mut weights = Vec::with_capacity(nodes.capacity());
    for pair in edges.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (t, w) in base.nodes.iter().zip(&base.weights) {
            let u = mid + half * t;
            let cos = u.cos();
            nodes.push(scale * u.tan());
            weights.push(half * w * scale / (cos * cos));
        }
    }
    QuadratureRule::new(nodes, weights, QuadratureDomain::RealLine { scale })
}

/// Panel edges in `u ∈ [−π/2, π/2]` for the given break points.
pub fn tangent_edges(scale: f64, breaks: &[f64]) -> Result<Vec<f64>> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidArgument(format!("tangent scale {scale} must be positive")));
    }
    let mut edges = vec![-FRAC_PI_2];
    let mut inner: Vec<f64> = breaks.iter().map(|x| (x / scale).atan()).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    edges.extend(inner);
    edges.push(FRAC_PI_2);
    Ok(edges)
}

/// `∫_ℝ f(x) dx` by the substitution `x = scale · tan(u)` and Gauss–Legendre
/// in `u`. Suitable for integrands decaying like `x^{-2}` or faster.
pub fn realline_quadrature<F: Fn(f64) -> f64>(f: F, node_count: usize, scale: f64) -> Result<f64> {
    tangent_panels(scale, &[], node_count)?.integrate(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn periodic_examples() {
        for m in [2usize, 3, 7, 64] {
            let grid = periodic_grid(m);
            let ones: Vec<Complex64> = grid.iter().map(|_| Complex64::new(1.0, 0.0)).collect();
            assert_abs_diff_eq!(periodic_quadrature(&ones).unwrap().re, 1.0, epsilon = 1e-15);
            let exp: Vec<Complex64> = grid.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
            assert!(periodic_quadrature(&exp).unwrap().norm() < 1e-15);
            if m >= 3 {
                let sq: Vec<Complex64> = grid
                    .iter()
                    .map(|&t| Complex64::new((1.0 + Complex64::from_polar(1.0, t)).norm_sqr(), 0.0))
                    .collect();
                assert_abs_diff_eq!(periodic_quadrature(&sq).unwrap().re, 2.0, epsilon = 1e-14);
            }
        }
        assert!(periodic_quadrature(&[Complex64::new(1.0, 0.0)]).is_err());
    }

    #[test]
    fn periodic_exact_on_low_frequencies() {
        let m = 16;
        let grid = periodic_grid(m);
        for k in -(m as i32 - 1)..(m as i32) {
            let samples: Vec<Complex64> = grid
                .iter()
                .map(|&t| Complex64::from_polar(1.0, k as f64 * t))
                .collect();
            let expected = if k == 0 { 1.0 } else { 0.0 };
            let v = periodic_quadrature(&samples).unwrap();
            assert!((v - expected).norm() <= 1e-13, "k = {k}: {v}");
        }
    }

    #[test]
    fn gauss_legendre_exactness() {
        for n in [1usize, 2, 5, 16, 101] {
            let r = gauss_legendre(n);
            assert_abs_diff_eq!(r.weights.iter().sum::<f64>(), 2.0, epsilon = 1e-13);
            for l in 0..2 * n {
                let v: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(l as i32)).sum();
                let exact = if l % 2 == 1 { 0.0 } else { 2.0 / (l as f64 + 1.0) };
                assert_abs_diff_eq!(v, exact, epsilon = 1e-13);
            }
            for w in r.nodes.windows(2) {
                assert!(w[0] < w[1]);
            }
        }
    }

    #[test]
    fn gauss_legendre_large() {
        let r = gauss_legendre(2048);
        assert_abs_diff_eq!(r.weights.iter().sum::<f64>(), 2.0, epsilon = 1e-12);
        let v: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(40)).sum();
        assert_abs_diff_eq!(v, 2.0 / 41.0, epsilon = 1e-13);
    }

    #[test]
    fn golub_welsch_reproduces_legendre() {
        let n = 12;
        let off: Vec<f64> = (1..n)
            .map(|k| {
                let k = k as f64;
                k / (4.0 * k * k - 1.0).sqrt()
            })
            .collect();
        let gw = golub_welsch(vec![0.0; n], off).unwrap();
        let gl = gauss_legendre(n);
        for j in 0..n {
            assert_abs_diff_eq!(gw.nodes[j], gl.nodes[j], epsilon = 1e-13);
            assert_abs_diff_eq!(gw.weights[j], gl.weights[j] / 2.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn cauchy_density_integrates_to_one() {
        let v = realline_quadrature(|x| 1.0 / (PI * (1.0 + x * x)), 8, 1.0).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-14);
        let odd = realline_quadrature(|x| x / (PI * (1.0 + x * x).powi(2)), 32, 1.0).unwrap();
        assert_abs_diff_eq!(odd, 0.0, epsilon = 1e-15);
        for c in [0.5, 2.0, 7.0] {
            let v = realline_quadrature(|x| c / (PI * (c * c + x * x)), 16, c).unwrap();
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn shifted_cauchy_rho_zero() {
        // p_0 = 1 and a_1 p_1 = x - b_1 give the Cauchy density at b_1.
        let b1 = 0.3;
        let v = realline_quadrature(|x| 1.0 / (PI * ((x - b1).powi(2) + 1.0)), 64, 1.0).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn non_finite_integrand_reports_node() {
        let err = realline_quadrature(|x| if x > 0.0 { f64::NAN } else { 0.0 }, 4, 1.0).unwrap_err();
        assert!(matches!(err, Error::NonFiniteIntegrand { node } if node > 0.0));
    }

    #[test]
    fn panels_split_at_breaks() {
        let r = tangent_panels(2.0, &[-2.0, 2.0], 20).unwrap();
        assert_eq!(r.len(), 60);
        // Indicator of [-2, 2] against the Cauchy(0, 2) density.
        let v = r
            .integrate(|x| if x.abs() <= 2.0 { 2.0 / (PI * (4.0 + x * x)) } else { 0.0 })
            .unwrap();
        assert_abs_diff_eq!(v, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn adaptive_periodic_mean() {
        let r = 0.9_f64;
        // Poisson kernel mean is 1 for any r < 1.
        let (v, m) = periodic_mean_adaptive(
            |t| vec![Complex64::new((1.0 - r * r) / (1.0 - 2.0 * r * t.cos() + r * r), 0.0)],
            8,
            1 << 16,
            1e-13,
            "poisson",
        )
        .unwrap();
        assert_abs_diff_eq!(v[0].re, 1.0, epsilon = 1e-13);
        assert!(m > 8);
    }
}
