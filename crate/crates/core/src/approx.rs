//! Approximating measures: Bernstein–Szegő `μⁿ` on the circle, the
//! second-kind measure `ρ_n` on the line, Cauchy averages of the perturbed
//! spectral measures `μ_{n+1,λ}`, the cutoff-window estimates, and balayage
//! onto circles.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::measures::{AtomicMeasure, Measure};
use crate::numerics::quadrature::{
    gauss_legendre, periodic_mean_adaptive, tangent_panels, QuadratureDomain, QuadratureRule,
};
use crate::oprl::{kernel_ratio, perturbed_spectral_measure, scaled_values, zeros_and_weights, JacobiData};
use crate::opuc::{eta_derivative, eval_phi, VerblunskyData};
use crate::Complex64;

/// `τ = χ_{[−M−1, M+1]}` for a measure supported in `[−M, M]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffWindow {
    m: f64,
}

impl CutoffWindow {
    pub fn new(m: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidArgument(format!("support bound M = {m} must be positive")));
        }
        Ok(Self { m })
    }

    /// `M = N(μ)` exactly, as given by the spec.
    pub fn for_measure(measure: &Measure) -> Result<Self> {
        Self::new(measure.support_radius())
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    /// `M + 1`.
    pub fn edge(&self) -> f64 {
        self.m + 1.0
    }

    /// The sharp indicator `τ(x)`.
    pub fn contains(&self, x: f64) -> bool {
        x.abs() <= self.edge()
    }
}

/// `ρ_n` for Jacobi data reaching `b_{n+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoSpec {
    jacobi: JacobiData,
    n: usize,
}

impl RhoSpec {
    pub fn new(jacobi: JacobiData, n: usize) -> Result<Self> {
        if jacobi.len() < n + 1 {
            return Err(Error::InvalidArgument(format!(
                "rho_{n} needs {} recurrence coefficients, got {}",
                n + 1,
                jacobi.len()
            )));
        }
        Ok(Self { jacobi, n })
    }

    pub fn jacobi(&self) -> &JacobiData {
        &self.jacobi
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `1 / (π (a_{n+1}² p_{n+1}² + p_n²))`.
    pub fn density(&self, x: f64) -> Result<f64> {
        let sv = scaled_values(&self.jacobi, x, self.n, true)?;
        Ok((-PI.ln() - sv.ln_rho_denominator()).exp())
    }
}

/// Where a `ρ_n` integral is taken.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    All,
    /// `|x| ≤ M + 1`, i.e. against `τ`.
    Inside(CutoffWindow),
    /// `|x| > M + 1`.
    Outside(CutoffWindow),
}

/// Integrands for [`rho_n_integral`]. Polynomial integrands are evaluated in
/// logarithmic form, so far-out tangent nodes cannot overflow.
#[derive(Clone, Copy)]
pub enum Integrand<'a> {
    /// `x^ℓ`.
    Power(usize),
    /// `x^power · K_degree(x, x)`.
    PowerKernel { power: usize, degree: usize },
    /// Any function growing at most like `|x|^degree`.
    Function { f: &'a dyn Fn(f64) -> f64, degree: usize },
}

impl Integrand<'_> {
    pub fn growth(&self) -> usize {
        match *self {
            Integrand::Power(l) => l,
            Integrand::PowerKernel { power, degree } => power + 2 * degree,
            Integrand::Function { degree, .. } => degree,
        }
    }

    /// `g(x) · dρ_n/dx`.
    fn weighted(&self, rho: &RhoSpec, x: f64) -> Result<f64> {
        let sv = scaled_values(&rho.jacobi, x, rho.n, true)?;
        let ln_density = -PI.ln() - sv.ln_rho_denominator();
        let signed_power = |l: usize, extra: f64| -> f64 {
            if l == 0 {
                return (ln_density + extra).exp();
            }
            let sign = if x < 0.0 && l % 2 == 1 { -1.0 } else { 1.0 };
            sign * (l as f64 * x.abs().ln() + ln_density + extra).exp()
        };
        Ok(match *self {
            Integrand::Power(l) => signed_power(l, 0.0),
            Integrand::PowerKernel { power, degree } => signed_power(power, sv.ln_kernel(degree)),
            Integrand::Function { f, .. } => f(x) * ln_density.exp(),
        })
    }
}

/// Zeros of `p_n` with the half-width of the density peak at each: near a
/// zero `ρ_n` is a Lorentzian of width `γ_j = w_j (a_{n+1} p_{n+1}(x_j))²`
/// (Christoffel weight `w_j`), tiny at the spectral edges.
fn rho_peaks(rho: &RhoSpec) -> Result<Vec<(f64, f64)>> {
    if rho.n == 0 {
        return Ok(Vec::new());
    }
    let gauss = zeros_and_weights(&rho.jacobi, rho.n)?;
    gauss
        .nodes
        .iter()
        .zip(&gauss.weights)
        .map(|(&x, &w)| {
            let sv = scaled_values(&rho.jacobi, x, rho.n, true)?;
            let next = sv.next.expect("requested");
            let ln_sq = 2.0 * (next.abs().ln() + (rho.n + 1) as f64 * sv.scale.ln());
            Ok((x, w * ln_sq.exp()))
        })
        .collect()
}

/// Half-panel from a peak at `x0` (width `gamma`) out to `x1`, mapped by
/// `x = x0 ± γ tan u` so the Lorentzian becomes flat in `u`.
fn peak_half(x0: f64, gamma: f64, x1: f64, base: &QuadratureRule, nodes: &mut Vec<f64>, weights: &mut Vec<f64>) {
    let len = (x1 - x0).abs();
    let sign = (x1 - x0).signum();
    if !(gamma > 0.0 && gamma < len) {
        let (half, mid) = (0.5 * (x1 - x0), 0.5 * (x1 + x0));
        for (t, w) in base.nodes.iter().zip(&base.weights) {
            nodes.push(mid + half * t);
            weights.push(half.abs() * w);
        }
        return;
    }
    let top = (len / gamma).atan();
    for (t, w) in base.nodes.iter().zip(&base.weights) {
        let u = 0.5 * top * (1.0 + t);
        let cos = u.cos();
        nodes.push(x0 + sign * gamma * u.tan());
        weights.push(0.5 * top * w * gamma / (cos * cos));
    }
}

/// Tangent panels outside `±edge`; inside, panels between consecutive peaks
/// split at their midpoints, each half peak-adapted.
fn rho_rule(edge: f64, region: Region, peaks: &[(f64, f64)], per_panel: usize) -> Result<QuadratureRule> {
    let base = gauss_legendre(per_panel);
    let (mut nodes, mut weights) = (Vec::new(), Vec::new());
    if !matches!(region, Region::Inside(_)) {
        // Panels break exactly at ±edge, so no node sits on it.
        let outer = tangent_panels(edge.max(1.0), &[-edge, edge], per_panel)?;
        for (&x, &w) in outer.nodes.iter().zip(&outer.weights) {
            if x.abs() > edge {
                nodes.push(x);
                weights.push(w);
            }
        }
    }
    if !matches!(region, Region::Outside(_)) {
        let mut points = vec![(-edge, 0.0)];
        points.extend(peaks.iter().copied().filter(|(x, _)| x.abs() < edge));
        points.push((edge, 0.0));
        for pair in points.windows(2) {
            let ((lo, g_lo), (hi, g_hi)) = (pair[0], pair[1]);
            let mid = 0.5 * (lo + hi);
            peak_half(lo, g_lo, mid, &base, &mut nodes, &mut weights);
            peak_half(hi, g_hi, mid, &base, &mut nodes, &mut weights);
        }
    }
    let domain = match region {
        Region::Inside(_) => QuadratureDomain::Interval { lo: -edge, hi: edge },
        _ => QuadratureDomain::RealLine { scale: edge.max(1.0) },
    };
    QuadratureRule::new(nodes, weights, domain)
}

/// `∫ g dρ_n` over a region, doubling the nodes per panel until successive
/// values agree.
pub fn rho_n_integral(rho: &RhoSpec, g: &Integrand<'_>, region: Region) -> Result<f64> {
    let n = rho.n;
    if !matches!(region, Region::Inside(_)) && g.growth() > 2 * n {
        return Err(Error::IntegrandGrowth {
            degree: g.growth(),
            n,
            max: 2 * n,
        });
    }
    let edge = match region {
        Region::Inside(w) | Region::Outside(w) => w.edge(),
        Region::All => {
            let b = rho.jacobi.b()[..=n].iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            let a = rho.jacobi.a()[..n].iter().fold(0.0_f64, |m, v| m.max(*v));
            b + 2.0 * a + 1.0
        }
    };
    let tol = Tolerances::default();
    let peaks = if matches!(region, Region::Outside(_)) {
        Vec::new()
    } else {
        rho_peaks(rho)?
    };
    let panels = 2 * peaks.len() + 4;
    let mut per_panel = 16;
    let mut previous: Option<f64> = None;
    loop {
        let rule = rho_rule(edge, region, &peaks, per_panel)?;
        let mut value = 0.0;
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            let term = g.weighted(rho, x)?;
            if !term.is_finite() {
                return Err(Error::NonFiniteIntegrand { node: x });
            }
            value += w * term;
        }
        if let Some(p) = previous {
            let change = (value - p).abs();
            if change <= tol.quadrature_convergence * value.abs().max(1.0) {
                return Ok(value);
            }
            if 2 * per_panel * panels > tol.max_nodes {
                return Err(Error::QuadratureNoConvergence {
                    what: "rho_n integral",
                    nodes: per_panel,
                    change,
                });
            }
        }
        previous = Some(value);
        per_panel *= 2;
    }
}

/// `∫ e^{ikθ} |p_{n+1}(e^{iθ})|^{−2} dθ/2π` for k = 0..=k_max.
pub fn bernstein_szego_moments(v: &VerblunskyData, n: usize, k_max: usize) -> Result<Vec<Complex64>> {
    if n + 1 > v.len() {
        return Err(Error::InvalidArgument(format!("mu^{n} needs p_{}", n + 1)));
    }
    let tol = Tolerances::default();
    let f = |theta: f64| -> Vec<Complex64> {
        let z = Complex64::from_polar(1.0, theta);
        let p = eval_phi(v, z, n + 1).expect("length checked").p[n + 1];
        powers_times(z, k_max, 1.0 / p.norm_sqr())
    };
    let (values, _) = periodic_mean_adaptive(
        f,
        tol.circle_nodes,
        tol.max_nodes,
        tol.quadrature_convergence,
        "Bernstein–Szegő moments",
    )?;
    Ok(values)
}

/// `∫ e^{ikθ} K_n(e^{iθ}) / (n+1) dμⁿ(θ)` by periodic quadrature; the
/// balayage identity makes these the moments of `ν̂_{n+1}`.
pub fn kernel_bernstein_szego_moments(v: &VerblunskyData, n: usize, k_max: usize) -> Result<Vec<Complex64>> {
    if n + 1 > v.len() {
        return Err(Error::InvalidArgument(format!("mu^{n} needs p_{}", n + 1)));
    }
    let tol = Tolerances::default();
    let f = |theta: f64| -> Vec<Complex64> {
        let d = eta_derivative(v, theta, n).expect("length checked");
        powers_times(Complex64::from_polar(1.0, theta), k_max, d / (n + 1) as f64)
    };
    let (values, _) = periodic_mean_adaptive(
        f,
        tol.circle_nodes,
        tol.max_nodes,
        tol.quadrature_convergence,
        "K_n/(n+1) dmu^n moments",
    )?;
    Ok(values)
}

fn powers_times(z: Complex64, k_max: usize, scale: f64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(k_max + 1);
    let mut term = Complex64::new(scale, 0.0);
    for _ in 0..=k_max {
        out.push(term);
        term *= z;
    }
    out
}

/// `λ` at which `x` is an atom of `μ_{n+1,λ}`: `a_{n+1} p_{n+1}(x) / p_n(x)`.
pub fn crossing_lambda(j: &JacobiData, n: usize, x: f64) -> Result<f64> {
    let sv = scaled_values(j, x, n, true)?;
    Ok(sv.scale * sv.next.unwrap_or(0.0) / sv.values[n])
}

/// Gauss–Legendre in `v` for `λ = tan v`, so the Cauchy weight becomes the
/// constant `1/π`. With a window, the panels break where the outlier atom of
/// `μ_{n+1,λ}` crosses `±(M+1)`, keeping every panel smooth.
pub fn cauchy_lambda_rule(
    j: &JacobiData,
    n: usize,
    window: Option<CutoffWindow>,
    nodes_per_panel: usize,
) -> Result<QuadratureRule> {
    let mut edges = vec![-FRAC_PI_2];
    if let Some(w) = window {
        let mut inner = vec![
            crossing_lambda(j, n, -w.edge())?.atan(),
            crossing_lambda(j, n, w.edge())?.atan(),
        ];
        inner.sort_by(f64::total_cmp);
        edges.extend(inner);
    }
    edges.push(FRAC_PI_2);
    let base = gauss_legendre(nodes_per_panel);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for pair in edges.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (t, w) in base.nodes.iter().zip(&base.weights) {
            nodes.push(mid + half * t);
            weights.push(half * w / PI);
        }
    }
    QuadratureRule::new(nodes, weights, QuadratureDomain::Interval { lo: -FRAC_PI_2, hi: FRAC_PI_2 })
}

/// `∫ (∫ f dμ_{n+1,λ}) dλ/(π(1+λ²))` against a rule from
/// [`cauchy_lambda_rule`].
pub fn cauchy_average(j: &JacobiData, n: usize, f: &dyn Fn(f64) -> f64, rule: &QuadratureRule) -> Result<f64> {
    let mut total = 0.0;
    for (&v, &w) in rule.nodes.iter().zip(&rule.weights) {
        let lambda = v.tan();
        let m = perturbed_spectral_measure(j, n + 1, lambda).map_err(|e| Error::AtLambda {
            lambda,
            source: Box::new(e),
        })?;
        let inner: f64 = m.iter().map(|(x, wt)| wt * f(x)).sum();
        if !inner.is_finite() {
            return Err(Error::NonFiniteIntegrand { node: lambda });
        }
        total += w * inner;
    }
    Ok(total)
}

/// [`cauchy_average`] with the λ-rule doubled from the configured size until
/// successive values agree.
pub fn cauchy_average_adaptive(
    j: &JacobiData,
    n: usize,
    f: &dyn Fn(f64) -> f64,
    window: Option<CutoffWindow>,
) -> Result<f64> {
    let tol = Tolerances::default();
    let mut per_panel = tol.lambda_nodes;
    let mut previous = cauchy_average(j, n, f, &cauchy_lambda_rule(j, n, window, per_panel)?)?;
    loop {
        per_panel *= 2;
        let value = cauchy_average(j, n, f, &cauchy_lambda_rule(j, n, window, per_panel)?)?;
        let change = (value - previous).abs();
        if change <= 1e-10 * value.abs().max(1.0) {
            return Ok(value);
        }
        if per_panel * 2 > tol.max_nodes / 64 {
            return Err(Error::QuadratureNoConvergence {
                what: "Cauchy average over lambda",
                nodes: per_panel,
                change,
            });
        }
        previous = value;
    }
}

/// The unique atom of `μ_{n+1,λ}` outside `[−M−1, M+1]`, if any.
pub fn outlier_point(j: &JacobiData, n: usize, lambda: f64, window: CutoffWindow) -> Result<Option<f64>> {
    let m = perturbed_spectral_measure(j, n + 1, lambda)?;
    outlier_of(&m, lambda, window)
}

fn outlier_of(m: &AtomicMeasure<f64>, lambda: f64, window: CutoffWindow) -> Result<Option<f64>> {
    let outside: Vec<f64> = m.nodes.iter().copied().filter(|x| !window.contains(*x)).collect();
    match outside.len() {
        0 => Ok(None),
        1 => Ok(Some(outside[0])),
        count => Err(Error::OutlierCount { count, lambda }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChristoffelCheck {
    pub ratio: f64,
    pub bound: f64,
    pub ok: bool,
}

/// `K_{n−k}(x,x)/K_n(x,x)` against `(M/|x|)^{2k}`. The bound holds for any
/// `|x| > M`, not only outside the window.
pub fn christoffel_ratio_check(
    j: &JacobiData,
    n: usize,
    k: usize,
    x: f64,
    window: CutoffWindow,
) -> Result<ChristoffelCheck> {
    if !(x.abs() > window.m()) {
        return Err(Error::InvalidArgument(format!("x = {x} lies inside [-M, M]")));
    }
    let ratio = kernel_ratio(j, x, n, k)?;
    let bound = (window.m() / x.abs()).powi(2 * k as i32);
    Ok(ChristoffelCheck {
        ratio,
        bound,
        ok: ratio <= bound + 1e-12,
    })
}

/// `∫_{|x|>M+1} x^k K_{n−k}(x,x) dρ_n(x)`.
pub fn tail_integral(j: &JacobiData, n: usize, k: usize, window: CutoffWindow) -> Result<f64> {
    if k > n {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds n = {n}")));
    }
    let rho = RhoSpec::new(j.clone(), n)?;
    rho_n_integral(&rho, &Integrand::PowerKernel { power: k, degree: n - k }, Region::Outside(window))
}

/// The same tail through the λ-average: only the outlier `x_λ` of
/// `μ_{n+1,λ}` contributes, with weight `1/K_n(x_λ)`, giving
/// `∫_A x_λ^k K_{n−k}(x_λ)/K_n(x_λ) dλ/(π(1+λ²))`.
pub fn tail_integral_by_lambda(j: &JacobiData, n: usize, k: usize, window: CutoffWindow) -> Result<f64> {
    outlier_average(j, n, window, |x| Ok(x.powi(k as i32) * kernel_ratio(j, x, n, k)?))
}

/// `∫_A M^{2k}/|x_λ|^k dλ/(π(1+λ²))`, the uniform majorant of the tail.
pub fn tail_majorant(j: &JacobiData, n: usize, k: usize, window: CutoffWindow) -> Result<f64> {
    let m2k = window.m().powi(2 * k as i32);
    outlier_average(j, n, window, |x| Ok(m2k / x.abs().powi(k as i32)))
}

fn outlier_average<F>(j: &JacobiData, n: usize, window: CutoffWindow, g: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let tol = Tolerances::default();
    let eval = |per_panel: usize| -> Result<f64> {
        let rule = cauchy_lambda_rule(j, n, Some(window), per_panel)?;
        let mut total = 0.0;
        for (&v, &w) in rule.nodes.iter().zip(&rule.weights) {
            let lambda = v.tan();
            let wrap = |e| Error::AtLambda {
                lambda,
                source: Box::new(e),
            };
            let m = perturbed_spectral_measure(j, n + 1, lambda).map_err(wrap)?;
            if let Some(x) = outlier_of(&m, lambda, window)? {
                total += w * g(x).map_err(wrap)?;
            }
        }
        Ok(total)
    };
    let mut per_panel = tol.lambda_nodes / 4;
    let mut previous = eval(per_panel)?;
    loop {
        per_panel *= 2;
        let value = eval(per_panel)?;
        let change = (value - previous).abs();
        if change <= 1e-10 * value.abs().max(1.0) {
            return Ok(value);
        }
        if per_panel * 2 > tol.max_nodes / 64 {
            return Err(Error::QuadratureNoConvergence {
                what: "outlier average over lambda",
                nodes: per_panel,
                change,
            });
        }
        previous = value;
    }
}

fn check_inside_radius(nodes: &[Complex64], radius: f64) -> Result<()> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!("circle radius {radius} must be positive")));
    }
    if let Some((i, z)) = nodes.iter().enumerate().find(|(_, z)| !(z.norm() < radius)) {
        return Err(Error::OutsideCircle {
            index: i,
            radius: z.norm(),
            circle: radius,
        });
    }
    Ok(())
}

/// Holomorphic moments `∫ z^k dμ̂` (k = 0..=k_max) of the balayage of an
/// atomic measure onto `|z| = R`; sweeping preserves them, so they are the
/// atoms' own moments.
pub fn balayage_circle_moments(m: &AtomicMeasure<Complex64>, radius: f64, k_max: usize) -> Result<Vec<Complex64>> {
    check_inside_radius(&m.nodes, radius)?;
    Ok((0..=k_max).map(|k| m.moment(k)).collect())
}

/// The same moments by quadrature of the swept density
/// `Σ_j w_j (R² − |z_j|²)/|R e^{iθ} − z_j|²` on `|z| = R`.
pub fn balayage_poisson_moments(m: &AtomicMeasure<Complex64>, radius: f64, k_max: usize) -> Result<Vec<Complex64>> {
    check_inside_radius(&m.nodes, radius)?;
    let tol = Tolerances::default();
    let r2 = radius * radius;
    let f = |theta: f64| -> Vec<Complex64> {
        let e = Complex64::from_polar(radius, theta);
        let density: f64 = m
            .iter()
            .map(|(z, w)| w * (r2 - z.norm_sqr()) / (e - z).norm_sqr())
            .sum();
        powers_times(e, k_max, density)
    };
    let (values, _) = periodic_mean_adaptive(f, 64, tol.max_nodes, tol.quadrature_convergence, "balayage moments")?;
    Ok(values)
}

/// `μ_n` as an atomic measure on the discretization of `μ`, for balayage.
pub fn mu_n_atoms(measure: &Measure, j_or_v: KernelSource<'_>, n: usize) -> Result<AtomicMeasure<Complex64>> {
    let (nodes, weights): (Vec<Complex64>, Vec<f64>) = match j_or_v {
        KernelSource::Real(j) => {
            let atoms = measure.real_atoms()?;
            let mut out = (Vec::new(), Vec::new());
            for (x, w) in atoms.iter() {
                let k = crate::oprl::cd_kernel_diag(j, x, n)?;
                out.0.push(Complex64::new(x, 0.0));
                out.1.push(w * k / (n + 1) as f64);
            }
            out
        }
        KernelSource::Circle(v) => {
            let atoms = measure.circle_atoms()?;
            let mut out = (Vec::new(), Vec::new());
            for (z, w) in atoms.iter() {
                let k = crate::opuc::cd_kernel_diag_circle(v, z.arg(), n)?;
                out.0.push(z);
                out.1.push(w * k / (n + 1) as f64);
            }
            out
        }
    };
    let total: f64 = weights.iter().sum();
    Ok(AtomicMeasure {
        nodes,
        weights: weights.into_iter().map(|w| w / total).collect(),
    })
}

/// Which orthonormal system supplies `K_n`.
#[derive(Debug, Clone, Copy)]
pub enum KernelSource<'a> {
    Real(&'a JacobiData),
    Circle(&'a VerblunskyData),
}
