//! Probability measures on ℝ and on the unit circle.
//!
//! A [`MeasureSpec`] is the serializable description; a [`Measure`] is a
//! validated spec together with a finite discretization that every inner
//! product and moment in the crate is computed against. For atomic specs the
//! discretization is the measure itself; weighted specs are replaced by a
//! Gauss rule (interval) or a trapezoid grid (circle) that is exact for the
//! polynomial degrees used downstream.
//!
//! Circle conventions: `moment(k) = ∫ z^k dμ` and the trigonometric moments
//! are `c_k = ∫ e^{−ikθ} dμ = conj(moment(k))`. Monic orthogonal polynomials
//! follow `Φ_{j+1}(z) = z Φ_j(z) − conj(α_j) Φ*_j(z)`.

use std::f64::consts::TAU;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::numerics::quadrature::{gauss_chebyshev, gauss_legendre_on, golub_welsch, periodic_grid};

/// Weight families on an interval `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RealWeight {
    /// `dx / (π √((x − lo)(hi − x)))`.
    ChebyshevFirstKind,
    /// `dx / (hi − lo)`.
    LegendreUniform,
    /// Proportional to `(hi − x)^alpha (x − lo)^beta`.
    Jacobi { alpha: f64, beta: f64 },
}

/// Weight families on the unit circle, relative to `dθ/2π`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CircleWeight {
    Uniform,
    /// Proportional to `|Σ_j c_j e^{ijθ}|²`; coefficients as `[re, im]`.
    PolyTrig { coefficients: Vec<[f64; 2]> },
}

/// Serializable description of a probability measure. Complex numbers are
/// written as `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MeasureSpec {
    RealAtoms {
        nodes: Vec<f64>,
        weights: Vec<f64>,
    },
    RealWeighted {
        interval: [f64; 2],
        weight: RealWeight,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        resolution: Option<usize>,
    },
    CircleAtoms {
        angles: Vec<f64>,
        weights: Vec<f64>,
    },
    CircleWeighted {
        weight: CircleWeight,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        resolution: Option<usize>,
    },
    /// The Bernstein–Szegő measure whose Verblunsky coefficients are `alpha`
    /// followed by zeros.
    CircleVerblunsky { alpha: Vec<[f64; 2]> },
}

impl MeasureSpec {
    pub fn chebyshev() -> Self {
        Self::RealWeighted {
            interval: [-1.0, 1.0],
            weight: RealWeight::ChebyshevFirstKind,
            resolution: None,
        }
    }

    pub fn legendre() -> Self {
        Self::RealWeighted {
            interval: [-1.0, 1.0],
            weight: RealWeight::LegendreUniform,
            resolution: None,
        }
    }

    pub fn uniform_circle() -> Self {
        Self::CircleWeighted {
            weight: CircleWeight::Uniform,
            resolution: None,
        }
    }

    pub fn verblunsky(alpha: &[Complex64]) -> Self {
        Self::CircleVerblunsky {
            alpha: alpha.iter().map(|a| [a.re, a.im]).collect(),
        }
    }

    pub fn is_circle(&self) -> bool {
        matches!(
            self,
            Self::CircleAtoms { .. } | Self::CircleWeighted { .. } | Self::CircleVerblunsky { .. }
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidMeasure(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("measure specs always serialize")
    }
}

/// Finitely many weighted nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<f64>,
}

impl<T: Copy> AtomicMeasure<T> {
    pub fn new(nodes: Vec<T>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(Error::InvalidArgument(format!(
                "{} nodes but {} weights",
                nodes.len(),
                weights.len()
            )));
        }
        if let Some(i) = weights.iter().position(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidArgument(format!("weight {i} is not positive")));
        }
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (T, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

impl AtomicMeasure<f64> {
    pub fn moment(&self, k: usize) -> f64 {
        self.iter().map(|(x, w)| w * x.powi(k as i32)).sum()
    }

    pub fn to_complex(&self) -> AtomicMeasure<Complex64> {
        AtomicMeasure {
            nodes: self.nodes.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            weights: self.weights.clone(),
        }
    }
}

impl AtomicMeasure<Complex64> {
    pub fn moment(&self, k: usize) -> Complex64 {
        self.iter().map(|(z, w)| w * z.powi(k as i32)).sum()
    }
}

/// The discretization carried by a [`Measure`].
#[derive(Debug, Clone, PartialEq)]
pub enum Discretization {
    Real(AtomicMeasure<f64>),
    /// Nodes on the unit circle.
    Circle(AtomicMeasure<Complex64>),
}

/// `⟨z^k⟩` moment vector `m_0..=m_{k_max}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector {
    pub values: Vec<Complex64>,
}

impl MomentVector {
    pub fn k_max(&self) -> usize {
        self.values.len() - 1
    }
}

/// A validated measure with its discretization. Bernstein–Szegő specs are
/// discretized on first use: their holomorphic moments are exact, and the
/// trapezoid grid is needed only for generic inner products.
#[derive(Debug, Clone)]
pub struct Measure {
    spec: MeasureSpec,
    discrete: OnceLock<Result<Discretization>>,
    tolerances: Tolerances,
    support_radius: f64,
    atom_count: Option<usize>,
    /// Exact holomorphic moments, only for Bernstein–Szegő specs.
    exact_moments: Option<Vec<Complex64>>,
}

impl Measure {
    pub fn new(spec: MeasureSpec) -> Result<Self> {
        Self::with_tolerances(spec, &Tolerances::default())
    }

    pub fn with_tolerances(spec: MeasureSpec, tol: &Tolerances) -> Result<Self> {
        let (discrete, atom_count, exact_moments) = discretize(&spec, tol)?;
        let support_radius = match &spec {
            MeasureSpec::RealAtoms { nodes, .. } => nodes.iter().fold(0.0_f64, |m, x| m.max(x.abs())),
            MeasureSpec::RealWeighted { interval, .. } => interval[0].abs().max(interval[1].abs()),
            _ => 1.0,
        };
        let cell = OnceLock::new();
        if let Some(d) = discrete {
            let _ = cell.set(Ok(d));
        }
        Ok(Self {
            spec,
            discrete: cell,
            tolerances: tol.clone(),
            support_radius,
            atom_count,
            exact_moments,
        })
    }

    pub fn spec(&self) -> &MeasureSpec {
        &self.spec
    }

    /// The finite measure every quadrature-based operation integrates against.
    pub fn discretization(&self) -> Result<&Discretization> {
        self.discrete
            .get_or_init(|| match (&self.spec, &self.exact_moments) {
                (MeasureSpec::CircleVerblunsky { alpha }, Some(exact)) => {
                    discretize_verblunsky(&to_complex(alpha), exact, &self.tolerances)
                }
                _ => unreachable!("only Bernstein–Szegő specs are discretized lazily"),
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn is_circle(&self) -> bool {
        self.spec.is_circle()
    }

    pub fn real_atoms(&self) -> Result<&AtomicMeasure<f64>> {
        match self.discretization()? {
            Discretization::Real(m) => Ok(m),
            Discretization::Circle(_) => Err(Error::InvalidArgument("expected a measure on the real line".into())),
        }
    }

    pub fn circle_atoms(&self) -> Result<&AtomicMeasure<Complex64>> {
        match self.discretization()? {
            Discretization::Circle(m) => Ok(m),
            Discretization::Real(_) => Err(Error::InvalidArgument("expected a measure on the unit circle".into())),
        }
    }

    /// Number of atoms for atomic specs, `None` for infinite support.
    pub fn atom_count(&self) -> Option<usize> {
        self.atom_count
    }

    /// Largest usable polynomial degree plus one, if finite.
    pub fn check_degree(&self, degree: usize) -> Result<()> {
        match self.atom_count {
            Some(count) if degree >= count => Err(Error::TooFewAtoms {
                requested: degree,
                available: count,
            }),
            _ => Ok(()),
        }
    }

    /// `N(μ) = sup{|z| : z ∈ supp μ}`.
    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    /// `∫ z^k dμ`; exactly 1 for `k = 0`. Bernstein–Szegő moments come from
    /// the exact recursion at every order.
    pub fn moment(&self, k: usize) -> Complex64 {
        if k == 0 {
            return Complex64::new(1.0, 0.0);
        }
        if let Some(exact) = &self.exact_moments {
            if let Some(m) = exact.get(k) {
                return *m;
            }
            if let MeasureSpec::CircleVerblunsky { alpha } = &self.spec {
                return verblunsky_moments(&to_complex(alpha), k)[k];
            }
        }
        match self.discretization().expect("eagerly discretized") {
            Discretization::Real(m) => Complex64::new(m.moment(k), 0.0),
            Discretization::Circle(m) => m.moment(k),
        }
    }

    pub fn moments(&self, k_max: usize) -> MomentVector {
        MomentVector {
            values: (0..=k_max).map(|k| self.moment(k)).collect(),
        }
    }

    /// Trigonometric moment `c_k = ∫ e^{−ikθ} dμ` of a circle measure.
    pub fn trig_moment(&self, k: usize) -> Complex64 {
        self.moment(k).conj()
    }

    /// `∫ conj(f) g dμ` against the discretization.
    pub fn inner_product<F, G>(&self, f: F, g: G) -> Result<Complex64>
    where
        F: Fn(Complex64) -> Complex64,
        G: Fn(Complex64) -> Complex64,
    {
        let term = |z: Complex64, w: f64| w * f(z).conj() * g(z);
        Ok(match self.discretization()? {
            Discretization::Real(m) => m.iter().map(|(x, w)| term(Complex64::new(x, 0.0), w)).sum(),
            Discretization::Circle(m) => m.iter().map(|(z, w)| term(z, w)).sum(),
        })
    }
}

pub fn support_radius(measure: &Measure) -> f64 {
    measure.support_radius()
}

pub fn moment(measure: &Measure, k: usize) -> Complex64 {
    measure.moment(k)
}

pub fn inner_product<F, G>(measure: &Measure, f: F, g: G) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
    G: Fn(Complex64) -> Complex64,
{
    measure.inner_product(f, g)
}

pub(crate) fn to_complex(pairs: &[[f64; 2]]) -> Vec<Complex64> {
    pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect()
}

/// Monic `Φ_n` coefficients (constant first) from the Szegő recursion.
pub(crate) fn szego_monic(alpha: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut phi = vec![Complex64::new(1.0, 0.0)];
    for j in 0..n {
        phi = szego_step(&phi, alpha.get(j).copied().unwrap_or_default());
    }
    phi
}

/// `Φ_{j+1} = z Φ_j − conj(α_j) Φ*_j` in the coefficient basis.
pub(crate) fn szego_step(phi: &[Complex64], alpha: Complex64) -> Vec<Complex64> {
    let j = phi.len() - 1;
    let mut next = vec![Complex64::new(0.0, 0.0); j + 2];
    for (i, c) in phi.iter().enumerate() {
        next[i + 1] += c;
    }
    // Φ*_j has coefficients conj(φ_{j−i}).
    let ca = alpha.conj();
    for i in 0..=j {
        next[i] -= ca * phi[j - i].conj();
    }
    next
}

/// Holomorphic moments `m_0..=m_{k_max}` of the Bernstein–Szegő measure
/// with Verblunsky coefficients `alpha` (zeros afterwards), from
/// `∫ Φ_{n+1} dμ = 0`.
pub(crate) fn verblunsky_moments(alpha: &[Complex64], k_max: usize) -> Vec<Complex64> {
    let mut m = vec![Complex64::new(1.0, 0.0)];
    let mut phi = vec![Complex64::new(1.0, 0.0)];
    for n in 0..k_max {
        phi = szego_step(&phi, alpha.get(n).copied().unwrap_or_default());
        let s: Complex64 = (0..=n).map(|j| phi[j] * m[j]).sum();
        m.push(-s);
    }
    m
}

/// `|Φ*_n(e^{iθ})|²` by the recursion at a point.
fn reversed_modulus_sq(alpha: &[Complex64], theta: f64) -> f64 {
    let z = Complex64::from_polar(1.0, theta);
    let mut phi = Complex64::new(1.0, 0.0);
    let mut star = Complex64::new(1.0, 0.0);
    for a in alpha {
        let next = z * phi - a.conj() * star;
        star -= a * z * phi;
        phi = next;
    }
    star.norm_sqr()
}

type Discretized = (Option<Discretization>, Option<usize>, Option<Vec<Complex64>>);

fn check_probability(weights: &[f64], len: usize, what: &str) -> Result<()> {
    if weights.len() != len {
        return Err(Error::InvalidMeasure(format!("{what}: {len} nodes but {} weights", weights.len())));
    }
    if weights.is_empty() {
        return Err(Error::InvalidMeasure(format!("{what}: no atoms")));
    }
    if let Some(i) = weights.iter().position(|w| !(*w > 0.0 && w.is_finite())) {
        return Err(Error::InvalidMeasure(format!("{what}: weight {i} is not positive")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidMeasure(format!("{what}: total mass {total} is not 1")));
    }
    Ok(())
}

fn check_distinct(sorted: &mut [f64], what: &str) -> Result<()> {
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidMeasure(format!("{what}: repeated node")));
    }
    Ok(())
}

fn discretize(spec: &MeasureSpec, tol: &Tolerances) -> Result<Discretized> {
    match spec {
        MeasureSpec::RealAtoms { nodes, weights } => {
            check_probability(weights, nodes.len(), "real-atoms")?;
            if let Some(i) = nodes.iter().position(|x| !x.is_finite()) {
                return Err(Error::InvalidMeasure(format!("real-atoms: node {i} is not finite")));
            }
            check_distinct(&mut nodes.clone(), "real-atoms")?;
            let m = AtomicMeasure::new(nodes.clone(), weights.clone())?;
            Ok((Some(Discretization::Real(m)), Some(nodes.len()), None))
        }
        MeasureSpec::RealWeighted {
            interval,
            weight,
            resolution,
        } => {
            let [lo, hi] = *interval;
            if !(lo < hi && lo.is_finite() && hi.is_finite()) {
                return Err(Error::InvalidMeasure(format!("interval [{lo}, {hi}] is empty")));
            }
            let n = resolution.unwrap_or(tol.interval_nodes);
            if n < 2 {
                return Err(Error::InvalidMeasure("interval resolution must be at least 2".into()));
            }
            let rule = interval_rule(lo, hi, weight, n)?;
            let m = AtomicMeasure::new(rule.0, rule.1)?;
            Ok((Some(Discretization::Real(m)), None, None))
        }
        MeasureSpec::CircleAtoms { angles, weights } => {
            check_probability(weights, angles.len(), "circle-atoms")?;
            if let Some(i) = angles.iter().position(|t| !(0.0..TAU).contains(t)) {
                return Err(Error::InvalidMeasure(format!("circle-atoms: angle {i} outside [0, 2π)")));
            }
            check_distinct(&mut angles.clone(), "circle-atoms")?;
            let nodes = angles.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
            let m = AtomicMeasure::new(nodes, weights.clone())?;
            Ok((Some(Discretization::Circle(m)), Some(angles.len()), None))
        }
        MeasureSpec::CircleWeighted { weight, resolution } => {
            let n = resolution.unwrap_or(tol.circle_nodes);
            let grid = periodic_grid(n);
            let weights: Vec<f64> = match weight {
                CircleWeight::Uniform => {
                    if n < 2 {
                        return Err(Error::InvalidMeasure("circle resolution must be at least 2".into()));
                    }
                    vec![1.0 / n as f64; n]
                }
                CircleWeight::PolyTrig { coefficients } => {
                    let c = to_complex(coefficients);
                    let norm: f64 = c.iter().map(|v| v.norm_sqr()).sum();
                    if !(norm > 0.0 && norm.is_finite()) {
                        return Err(Error::InvalidMeasure("poly-trig weight has no nonzero coefficient".into()));
                    }
                    if n <= 2 * c.len() {
                        return Err(Error::InvalidMeasure(format!(
                            "circle resolution {n} too small for a degree {} weight",
                            c.len().saturating_sub(1)
                        )));
                    }
                    grid.iter()
                        .map(|&t| {
                            let z = Complex64::from_polar(1.0, t);
                            let v = c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, ci| acc * z + ci);
                            v.norm_sqr() / (norm * n as f64)
                        })
                        .collect()
                }
            };
            // Zeros of the weight produce zero-weight nodes; drop them.
            let (nodes, weights): (Vec<Complex64>, Vec<f64>) = grid
                .iter()
                .zip(weights)
                .filter(|(_, w)| *w > 0.0)
                .map(|(&t, w)| (Complex64::from_polar(1.0, t), w))
                .unzip();
            Ok((Some(Discretization::Circle(AtomicMeasure::new(nodes, weights)?)), None, None))
        }
        MeasureSpec::CircleVerblunsky { alpha } => {
            let a = to_complex(alpha);
            if let Some((i, v)) = a.iter().enumerate().find(|(_, v)| !(v.norm() < 1.0)) {
                return Err(Error::VerblunskyOutOfDisk {
                    index: i,
                    modulus: v.norm(),
                });
            }
            let exact = verblunsky_moments(&a, a.len() + 16);
            Ok((None, None, Some(exact)))
        }
    }
}

/// Trapezoid grid for the Bernstein–Szegő weight `1/(κ_L² |Φ*_L|²)`, doubled
/// until the monitored moments agree with the exact recursion.
fn discretize_verblunsky(alpha: &[Complex64], exact: &[Complex64], tol: &Tolerances) -> Result<Discretization> {
    let monitored = exact.len() - 1;
    let kappa_sq = alpha.iter().fold(1.0, |k, v| k / (1.0 - v.norm_sqr()));
    let mut n = tol.circle_nodes.max(2 * monitored + 2);
    loop {
        let grid = periodic_grid(n);
        let weights: Vec<f64> = grid
            .iter()
            .map(|&t| 1.0 / (kappa_sq * reversed_modulus_sq(alpha, t) * n as f64))
            .collect();
        let nodes: Vec<Complex64> = grid.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
        let m = AtomicMeasure::new(nodes, weights)?;
        let err = (0..=monitored)
            .map(|k| (m.moment(k) - exact[k]).norm())
            .fold(0.0_f64, f64::max);
        if err <= tol.resolution_agreement {
            return Ok(Discretization::Circle(m));
        }
        if 2 * n > tol.max_nodes {
            return Err(Error::QuadratureNoConvergence {
                what: "Bernstein–Szegő weight discretization",
                nodes: n,
                change: err,
            });
        }
        n *= 2;
    }
}

/// Gauss rule (nodes, weights) for a weighted interval measure.
fn interval_rule(lo: f64, hi: f64, weight: &RealWeight, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let map = |t: &f64| mid + half * t;
    match weight {
        RealWeight::ChebyshevFirstKind => {
            let r = gauss_chebyshev(n);
            Ok((r.nodes.iter().map(map).collect(), r.weights))
        }
        RealWeight::LegendreUniform => {
            let r = gauss_legendre_on(-1.0, 1.0, n);
            Ok((r.nodes.iter().map(map).collect(), r.weights.iter().map(|w| 0.5 * w).collect()))
        }
        RealWeight::Jacobi { alpha, beta } => {
            if !(*alpha > -1.0 && *beta > -1.0) {
                return Err(Error::InvalidMeasure(format!(
                    "jacobi exponents ({alpha}, {beta}) must exceed -1"
                )));
            }
            let (diag, off) = jacobi_family_recurrence(*alpha, *beta, n);
            let r = golub_welsch(diag, off)?;
            Ok((r.nodes.iter().map(map).collect(), r.weights))
        }
    }
}

/// Orthonormal recurrence of the weight `(1 − t)^α (1 + t)^β` on [−1, 1].
pub(crate) fn jacobi_family_recurrence(alpha: f64, beta: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let ab = alpha + beta;
    let diag = (0..n)
        .map(|k| {
            let k = k as f64;
            if k == 0.0 {
                (beta - alpha) / (ab + 2.0)
            } else {
                (beta * beta - alpha * alpha) / ((2.0 * k + ab) * (2.0 * k + ab + 2.0))
            }
        })
        .collect();
    let off = (1..n)
        .map(|k| {
            let k = k as f64;
            let s = 2.0 * k + ab;
            let sq = if k == 1.0 {
                4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0))
            };
            sq.sqrt()
        })
        .collect();
    (diag, off)
}

/// `∫ x^k dμ` of the arcsine law on [−1, 1] in closed form.
#[cfg(test)]
pub(crate) fn chebyshev_moment(k: usize) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    // binom(k, k/2) / 2^k, accumulated as a product to stay in range.
    (1..=k / 2).fold(1.0, |acc, j| acc * (k / 2 + j) as f64 / (4.0 * j as f64))
}
