//! Orthonormal polynomials on the unit circle.
//!
//! Monic polynomials follow the Szegő recursion
//! `Φ_{j+1} = z Φ_j − conj(α_j) Φ*_j`, `Φ*_{j+1} = Φ*_j − α_j z Φ_j`, and
//! `p_j = κ_j Φ_j` with `κ_{j+1} = κ_j / √(1 − |α_j|²)`. Under this
//! convention `α_j = −conj(Φ_{j+1}(0))`.

use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::measures::{szego_monic, MeasureSpec, Measure, to_complex};
use crate::numerics::phase::track_argument;
use crate::numerics::quadrature::periodic_grid;
use crate::numerics::roots::{aberth_roots, newton_power_sums, ComplexPolynomial};
use crate::Complex64;

/// Verblunsky coefficients with the matching leading coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerblunskyData {
    alpha: Vec<Complex64>,
    kappa: Vec<f64>,
}

impl VerblunskyData {
    pub fn new(alpha: Vec<Complex64>) -> Result<Self> {
        let mut kappa = Vec::with_capacity(alpha.len() + 1);
        kappa.push(1.0);
        for (j, a) in alpha.iter().enumerate() {
            let r = a.norm();
            if !(r < 1.0) {
                return Err(Error::VerblunskyOutOfDisk { index: j, modulus: r });
            }
            kappa.push(kappa[j] / (1.0 - a.norm_sqr()).sqrt());
        }
        Ok(Self { alpha, kappa })
    }

    /// All coefficients zero: the normalized arclength measure.
    pub fn zeros(m: usize) -> Self {
        Self {
            alpha: vec![Complex64::new(0.0, 0.0); m],
            kappa: vec![1.0; m + 1],
        }
    }

    /// Number of coefficients `m`; polynomials up to degree `m` are available.
    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn alpha(&self) -> &[Complex64] {
        &self.alpha
    }

    /// `κ_0..=κ_m`.
    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    fn require(&self, degree: usize) -> Result<()> {
        if degree > self.len() {
            return Err(Error::InvalidArgument(format!(
                "degree {degree} needs {degree} Verblunsky coefficients, only {} available",
                self.len()
            )));
        }
        Ok(())
    }
}

/// `p_j(z)` and `p*_j(z)` for `j ≤ n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CirclePolyValues {
    pub z: Complex64,
    pub p: Vec<Complex64>,
    pub p_star: Vec<Complex64>,
}

/// Verblunsky coefficients `α_0..α_{m−1}` of a circle measure. Bernstein–Szegő
/// specs return their own coefficients (zero-padded); otherwise each step
/// uses `conj(α_n) = ∫ z Φ_n dμ / ‖Φ_n‖²` against the discretization.
pub fn verblunsky_from_measure(measure: &Measure, m: usize) -> Result<VerblunskyData> {
    if let MeasureSpec::CircleVerblunsky { alpha } = measure.spec() {
        let mut a = to_complex(alpha);
        a.resize(m, Complex64::new(0.0, 0.0));
        return VerblunskyData::new(a);
    }
    let atoms = measure.circle_atoms()?;
    measure.check_degree(m)?;
    let margin = Tolerances::default().verblunsky_margin;
    let (z, w) = (&atoms.nodes, &atoms.weights);
    let one = Complex64::new(1.0, 0.0);
    let mut phi = vec![one; z.len()];
    let mut star = vec![one; z.len()];
    let mut alpha = Vec::with_capacity(m);
    for j in 0..m {
        let norm_sq: f64 = phi.iter().zip(w).map(|(p, w)| w * p.norm_sqr()).sum();
        let num: Complex64 = (0..z.len()).map(|i| w[i] * z[i] * phi[i]).sum();
        let a = (num / norm_sq).conj();
        if !(a.norm() < 1.0 - margin) {
            return Err(Error::VerblunskyOutOfDisk {
                index: j,
                modulus: a.norm(),
            });
        }
        for i in 0..z.len() {
            let zp = z[i] * phi[i];
            phi[i] = zp - a.conj() * star[i];
            star[i] -= a * zp;
        }
        alpha.push(a);
    }
    VerblunskyData::new(alpha)
}

/// Orthonormal `p_j(z)`, `p*_j(z)` for `j ≤ n`.
pub fn eval_phi(v: &VerblunskyData, z: Complex64, n: usize) -> Result<CirclePolyValues> {
    v.require(n)?;
    let mut p = Vec::with_capacity(n + 1);
    let mut p_star = Vec::with_capacity(n + 1);
    let (mut phi, mut star) = (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
    for j in 0..=n {
        p.push(v.kappa[j] * phi);
        p_star.push(v.kappa[j] * star);
        if j < n {
            let a = v.alpha[j];
            let zp = z * phi;
            phi = zp - a.conj() * star;
            star -= a * zp;
        }
    }
    Ok(CirclePolyValues { z, p, p_star })
}

/// `(K_n(z,z), p_{n+1}(z))` in one pass; requires `n + 1 ≤ len`.
fn kernel_and_next(v: &VerblunskyData, z: Complex64, n: usize) -> (f64, Complex64) {
    let (mut phi, mut star) = (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
    let mut kernel = 0.0;
    for j in 0..=n {
        kernel += v.kappa[j] * v.kappa[j] * phi.norm_sqr();
        let a = v.alpha[j];
        let zp = z * phi;
        phi = zp - a.conj() * star;
        star -= a * zp;
    }
    (kernel, v.kappa[n + 1] * phi)
}

fn kernel_only(v: &VerblunskyData, z: Complex64, n: usize) -> f64 {
    let (mut phi, mut star) = (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
    let mut kernel = 1.0;
    for j in 0..n {
        let a = v.alpha[j];
        let zp = z * phi;
        phi = zp - a.conj() * star;
        star -= a * zp;
        kernel += v.kappa[j + 1] * v.kappa[j + 1] * phi.norm_sqr();
    }
    kernel
}

/// `K_n(e^{iθ}, e^{iθ}) = Σ_{j≤n} |p_j(e^{iθ})|²`.
pub fn cd_kernel_diag_circle(v: &VerblunskyData, theta: f64, n: usize) -> Result<f64> {
    v.require(n)?;
    Ok(kernel_only(v, Complex64::from_polar(1.0, theta), n))
}

/// `dη_n/dθ = K_n / |p_{n+1}|²` at `e^{iθ}`.
pub fn eta_derivative(v: &VerblunskyData, theta: f64, n: usize) -> Result<f64> {
    v.require(n + 1)?;
    let (kernel, next) = kernel_and_next(v, Complex64::from_polar(1.0, theta), n);
    Ok(kernel / next.norm_sqr())
}

/// Coefficients of monic `Φ_n`, constant term first.
pub fn monic_coefficients(v: &VerblunskyData, n: usize) -> Result<Vec<Complex64>> {
    v.require(n)?;
    Ok(szego_monic(&v.alpha, n))
}

/// Zeros of `p_n`, every one strictly inside the unit disk. Aberth's power
/// sums are cross-checked against Newton's identities on the coefficients.
pub fn opuc_zeros(v: &VerblunskyData, n: usize) -> Result<Vec<Complex64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("p_0 has no zeros".into()));
    }
    let poly = ComplexPolynomial::new(monic_coefficients(v, n)?)?;
    let zeros = aberth_roots(&poly)?;
    if let Some((i, z)) = zeros.iter().enumerate().find(|(_, z)| !(z.norm() < 1.0)) {
        return Err(Error::ZeroOutsideDisk {
            index: i,
            degree: n,
            modulus: z.norm(),
        });
    }
    let k_max = 10;
    let newton = newton_power_sums(&poly, k_max)?;
    let tol = 1e-8;
    let mut worst = 0.0_f64;
    let mut powers: Vec<Complex64> = zeros.clone();
    for s in &newton {
        let direct: Complex64 = powers.iter().sum();
        worst = worst.max((direct - s).norm() / n as f64);
        for (p, z) in powers.iter_mut().zip(&zeros) {
            *p *= z;
        }
    }
    if worst > tol {
        return Err(Error::CrossCheck {
            what: "zero power sums against Newton's identities",
            discrepancy: worst,
            tolerance: tol,
        });
    }
    Ok(zeros)
}

/// Newton power sums `s_1..=s_{k_max}` of the zeros of `p_n`.
pub fn zero_power_sums(v: &VerblunskyData, n: usize, k_max: usize) -> Result<Vec<Complex64>> {
    let poly = ComplexPolynomial::new(monic_coefficients(v, n)?)?;
    newton_power_sums(&poly, k_max)
}

/// `∫ z^k dμ_n`, k = 0..=k_max, with `dμ_n = K_n(z,z)/(n+1) dμ`.
pub fn mu_n_moment_vector_circle(
    measure: &Measure,
    v: &VerblunskyData,
    n: usize,
    k_max: usize,
) -> Result<Vec<Complex64>> {
    let atoms = measure.circle_atoms()?;
    measure.check_degree(n)?;
    v.require(n)?;
    let mut out = vec![Complex64::new(0.0, 0.0); k_max + 1];
    for (z, w) in atoms.iter() {
        let mut term = Complex64::new(w * kernel_only(v, z, n), 0.0);
        for slot in out.iter_mut() {
            *slot += term;
            term *= z;
        }
    }
    Ok(out.into_iter().map(|c| c / (n + 1) as f64).collect())
}

pub fn mu_n_moments_circle(measure: &Measure, v: &VerblunskyData, n: usize, k: usize) -> Result<Complex64> {
    Ok(mu_n_moment_vector_circle(measure, v, n, k)?[k])
}

/// Multiplication by `z` in the orthonormal basis (upper Hessenberg):
/// `G_{j+1,j} = ρ_j` and `G_{ij} = −conj(α_j) α_{i−1} ρ_i⋯ρ_{j−1}` for
/// `i ≤ j`, with `α_{−1} = −1`. Applied to a vector supported on `0..d` by a
/// suffix sum in O(d); needs `α_0..α_{d−1}`.
fn apply_z(alpha: &[Complex64], v: &[Complex64]) -> Vec<Complex64> {
    let d = v.len();
    let rho = |l: usize| (1.0 - alpha[l].norm_sqr()).sqrt();
    let mut out = vec![Complex64::new(0.0, 0.0); d + 1];
    let mut suffix = Complex64::new(0.0, 0.0);
    for i in (0..d).rev() {
        suffix = alpha[i].conj() * v[i] + rho(i) * suffix;
        let prev = if i == 0 { Complex64::new(-1.0, 0.0) } else { alpha[i - 1] };
        out[i] -= prev * suffix;
        out[i + 1] += rho(i) * v[i];
    }
    out
}

/// `(1/(n+1)) Σ_{j≤n} ⟨p_j, z^k p_j⟩` for k = 0..=k_max in the measure with
/// Verblunsky coefficients `alpha`, which must reach index `n + k_max − 1`.
fn diagonal_moment_vector(alpha: &[Complex64], n: usize, k_max: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); k_max + 1];
    for j in 0..=n {
        let mut v = vec![Complex64::new(0.0, 0.0); j + 1];
        v[j] = Complex64::new(1.0, 0.0);
        out[0] += v[j];
        for slot in out.iter_mut().skip(1) {
            v = apply_z(alpha, &v);
            *slot += v[j];
        }
    }
    out.into_iter().map(|c| c / (n + 1) as f64).collect()
}

/// `∫ z^k dμ_n` from the Verblunsky coefficients alone, through the matrix of
/// multiplication by `z`; requires `n + k_max` coefficients. Agrees with
/// [`mu_n_moment_vector_circle`] and stays accurate when the measure is too
/// singular to discretize.
pub fn mu_n_moment_vector_operator(v: &VerblunskyData, n: usize, k_max: usize) -> Result<Vec<Complex64>> {
    v.require(n + k_max)?;
    Ok(diagonal_moment_vector(&v.alpha, n, k_max))
}

/// `∫ z^k K_n(z,z)/(n+1) dμⁿ` where `μⁿ` is the Bernstein–Szegő measure with
/// coefficients `α_0..α_n` followed by zeros; by the balayage identity these
/// are the moments of `ν̂_{n+1}`.
pub fn nu_hat_moment_vector_kernel(v: &VerblunskyData, n: usize, k_max: usize) -> Result<Vec<Complex64>> {
    v.require(n + 1)?;
    let mut alpha = v.alpha[..=n].to_vec();
    alpha.resize(n + k_max.max(1), Complex64::new(0.0, 0.0));
    Ok(diagonal_moment_vector(&alpha, n, k_max))
}

/// `∫ z^k dν_{n+1}`, k = 0..=k_max, from Newton's identities on the monic
/// coefficients of `Φ_{n+1}`; no root finding involved.
pub fn nu_moment_vector_newton(v: &VerblunskyData, n: usize, k_max: usize) -> Result<Vec<Complex64>> {
    let mut out = vec![Complex64::new(1.0, 0.0)];
    if k_max > 0 {
        let sums = zero_power_sums(v, n + 1, k_max)?;
        out.extend(sums.into_iter().map(|s| s / (n + 1) as f64));
    }
    Ok(out)
}

fn check_inside(zeros: &[Complex64]) -> Result<()> {
    if let Some((i, z)) = zeros.iter().enumerate().find(|(_, z)| !(z.norm() < 1.0)) {
        return Err(Error::OutsideCircle {
            index: i,
            radius: z.norm(),
            circle: 1.0,
        });
    }
    Ok(())
}

/// `∫ z^k dν̂` for k = 0..=k_max, where ν̂ is the balayage of the uniform
/// measure on `zeros` onto the unit circle: the mean of `z_j^k`.
pub fn nu_hat_moment_vector(zeros: &[Complex64], k_max: usize) -> Result<Vec<Complex64>> {
    if zeros.is_empty() {
        return Err(Error::InvalidArgument("no zeros given".into()));
    }
    check_inside(zeros)?;
    let mut out = vec![Complex64::new(0.0, 0.0); k_max + 1];
    for z in zeros {
        let mut term = Complex64::new(1.0, 0.0);
        for slot in out.iter_mut() {
            *slot += term;
            term *= z;
        }
    }
    Ok(out.into_iter().map(|c| c / zeros.len() as f64).collect())
}

pub fn nu_hat_moments(zeros: &[Complex64], k: usize) -> Result<Complex64> {
    Ok(nu_hat_moment_vector(zeros, k)?[k])
}

/// `Σ_j (1 − |z_j|²) / |e^{iθ} − z_j|²`.
pub fn poisson_sum(zeros: &[Complex64], theta: f64) -> f64 {
    let e = Complex64::from_polar(1.0, theta);
    zeros.iter().map(|z| (1.0 - z.norm_sqr()) / (e - z).norm_sqr()).sum()
}

/// Continuous `η_n` with `e^{iη_n} = p_{n+1}/p*_{n+1}` on an increasing
/// θ-grid; the first value lies in [0, 2π).
pub fn prufer_eta(v: &VerblunskyData, n: usize, grid: &[f64]) -> Result<Vec<f64>> {
    v.require(n + 1)?;
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("phase grid must be strictly increasing".into()));
    }
    let ratio = |t: f64| -> Complex64 {
        let (mut phi, mut star) = (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
        let z = Complex64::from_polar(1.0, t);
        for a in &v.alpha[..=n] {
            let zp = z * phi;
            phi = zp - a.conj() * star;
            star -= a * zp;
        }
        phi / star
    };
    let depth = Tolerances::default().phase_refine_depth;
    let mut eta = track_argument(ratio, grid, FRAC_PI_2, depth)?;
    if eta.first().is_some_and(|&e| e < 0.0) {
        for e in eta.iter_mut() {
            *e += TAU;
        }
    }
    Ok(eta)
}

/// Residuals of the two derivative identities for `η_n` on a uniform grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PruferResiduals {
    /// `max |η′ − Σ_j Poisson(z_j, θ)|` over the zeros of `p_{n+1}`.
    pub r1: f64,
    /// `max |η′ − K_n/|p_{n+1}|²|`.
    pub r2: f64,
    /// `η_n(2π) − η_n(0)`.
    pub increase: f64,
    /// Smallest finite-difference derivative.
    pub min_derivative: f64,
    pub points: usize,
}

/// η′ by centered differences on `points` uniform nodes, using the periodic
/// extension `η(θ + 2π) = η(θ) + 2π(n+1)`.
pub fn prufer_identity_residuals(v: &VerblunskyData, n: usize, points: usize) -> Result<PruferResiduals> {
    if points < 3 {
        return Err(Error::InvalidArgument("need at least 3 grid points".into()));
    }
    let mut grid = periodic_grid(points);
    grid.push(TAU);
    let eta = prufer_eta(v, n, &grid)?;
    let increase = eta[points] - eta[0];
    let expected = TAU * (n + 1) as f64;
    if (increase - expected).abs() > Tolerances::default().winding {
        return Err(Error::Winding {
            found: increase,
            expected,
        });
    }
    let zeros = opuc_zeros(v, n + 1)?;
    let h = TAU / points as f64;
    let at = |i: isize| -> f64 {
        if i < 0 {
            eta[(i + points as isize) as usize] - expected
        } else {
            eta[i as usize]
        }
    };
    let mut out = PruferResiduals {
        r1: 0.0,
        r2: 0.0,
        increase,
        min_derivative: f64::INFINITY,
        points,
    };
    for i in 0..points {
        let d = (at(i as isize + 1) - at(i as isize - 1)) / (2.0 * h);
        let theta = grid[i];
        out.r1 = out.r1.max((d - poisson_sum(&zeros, theta)).abs());
        out.r2 = out.r2.max((d - eta_derivative(v, theta, n)?).abs());
        out.min_derivative = out.min_derivative.min(d);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::CircleWeight;
    use crate::numerics::quadrature::periodic_quadrature;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_alpha(seed: u64, len: usize) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..len)
            .map(|_| {
                let r = 0.5 * rng.gen::<f64>().sqrt();
                Complex64::from_polar(r, rng.gen_range(0.0..TAU))
            })
            .collect()
    }

    fn poly_trig(coefficients: Vec<[f64; 2]>) -> Measure {
        Measure::new(MeasureSpec::CircleWeighted {
            weight: CircleWeight::PolyTrig { coefficients },
            resolution: None,
        })
        .unwrap()
    }

    #[test]
    fn uniform_measure_has_vanishing_coefficients() {
        let m = Measure::new(MeasureSpec::uniform_circle()).unwrap();
        let v = verblunsky_from_measure(&m, 30).unwrap();
        assert!(v.alpha().iter().all(|a| a.norm() < 1e-15));
        let coeffs = monic_coefficients(&v, 7).unwrap();
        for (i, cf) in coeffs.iter().enumerate() {
            let expected = if i == 7 { 1.0 } else { 0.0 };
            assert!((cf - expected).norm() < 1e-14);
        }
    }

    #[test]
    fn verblunsky_spec_round_trips() {
        let alpha = random_alpha(1, 6);
        let m = Measure::new(MeasureSpec::verblunsky(&alpha)).unwrap();
        let v = verblunsky_from_measure(&m, 9).unwrap();
        assert_eq!(&v.alpha()[..6], &alpha[..]);
        assert!(v.alpha()[6..].iter().all(|a| *a == c(0.0, 0.0)));
    }

    #[test]
    fn levinson_recovers_bernstein_szego_coefficients() {
        // Discretize the same measure as generic atoms so the generic path runs.
        let alpha = random_alpha(2, 5);
        let m = Measure::new(MeasureSpec::verblunsky(&alpha)).unwrap();
        let atoms = m.circle_atoms().unwrap().clone();
        let angles: Vec<f64> = atoms.nodes.iter().map(|z| z.arg().rem_euclid(TAU)).collect();
        let generic = Measure::new(MeasureSpec::CircleAtoms {
            angles,
            weights: atoms.weights.clone(),
        })
        .unwrap();
        let v = verblunsky_from_measure(&generic, 12).unwrap();
        for j in 0..12 {
            let expected = alpha.get(j).copied().unwrap_or_default();
            assert!((v.alpha()[j] - expected).norm() < 1e-10, "alpha_{j}");
        }
    }

    #[test]
    fn single_moment_weights() {
        // w ∝ |1 − e^{iθ}|² = 2 − 2cos θ has α_j = −1/(j+2).
        let minus = poly_trig(vec![[1.0, 0.0], [-1.0, 0.0]]);
        let v = verblunsky_from_measure(&minus, 10).unwrap();
        for j in 0..10 {
            assert!((v.alpha()[j] - c(-1.0 / (j + 2) as f64, 0.0)).norm() < 1e-12);
        }
        // Rotating by π flips the sign of every other coefficient.
        let plus = poly_trig(vec![[1.0, 0.0], [1.0, 0.0]]);
        let v = verblunsky_from_measure(&plus, 10).unwrap();
        for j in 0..10 {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            assert!((v.alpha()[j] - c(sign / (j + 2) as f64, 0.0)).norm() < 1e-12);
        }
        // Oracle from the exact moments c_0 = 1, c_{±1} = 1/2: Φ_1 = z − 1/2.
        assert_abs_diff_eq!(plus.trig_moment(1).re, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn orthonormality() {
        for m in [
            Measure::new(MeasureSpec::verblunsky(&random_alpha(4, 12))).unwrap(),
            poly_trig(vec![[1.0, 0.0], [0.3, -0.4], [0.0, 0.2]]),
        ] {
            let v = verblunsky_from_measure(&m, 15).unwrap();
            let atoms = m.circle_atoms().unwrap();
            let values: Vec<Vec<Complex64>> = atoms.nodes.iter().map(|&z| eval_phi(&v, z, 15).unwrap().p).collect();
            for i in 0..=15 {
                for j in 0..=15 {
                    let ip: Complex64 = values.iter().zip(&atoms.weights).map(|(p, w)| w * p[i].conj() * p[j]).sum();
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((ip - expected).norm() < 1e-10, "<p{i}, p{j}> = {ip}");
                }
            }
        }
    }

    #[test]
    fn eval_phi_examples() {
        let v = VerblunskyData::zeros(5);
        let z = Complex64::from_polar(1.0, 0.7);
        let vals = eval_phi(&v, z, 5).unwrap();
        for j in 0..=5 {
            assert!((vals.p[j] - z.powi(j as i32)).norm() < 1e-15);
            assert!((vals.p_star[j] - 1.0).norm() < 1e-15);
        }
        let vals = eval_phi(&v, z, 0).unwrap();
        assert_eq!((vals.p[0], vals.p_star[0]), (c(1.0, 0.0), c(1.0, 0.0)));

        let v = VerblunskyData::new(vec![c(-0.5, 0.0)]).unwrap();
        let k1 = 2.0 / 3f64.sqrt();
        let vals = eval_phi(&v, z, 1).unwrap();
        assert!((vals.p[1] - (z + 0.5) * k1).norm() < 1e-15);
        assert!((vals.p_star[1] - (1.0 + z / 2.0) * k1).norm() < 1e-15);
        assert_abs_diff_eq!(cd_kernel_diag_circle(&v, 0.0, 1).unwrap(), 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(cd_kernel_diag_circle(&v, 1.3, 0).unwrap(), 1.0);
        assert_abs_diff_eq!(cd_kernel_diag_circle(&VerblunskyData::zeros(9), 2.1, 9).unwrap(), 10.0, epsilon = 1e-13);
    }

    #[test]
    fn reversed_polynomials_on_and_inside_the_circle() {
        let v = VerblunskyData::new(random_alpha(6, 25)).unwrap();
        for i in 0..400 {
            let t = TAU * i as f64 / 400.0;
            let vals = eval_phi(&v, Complex64::from_polar(1.0, t), 25).unwrap();
            for j in 0..=25 {
                assert!((vals.p[j].norm() - vals.p_star[j].norm()).abs() <= 1e-12 * vals.p[j].norm().max(1.0));
                assert!(vals.p_star[j].norm() > 0.0);
            }
            let inner = eval_phi(&v, Complex64::from_polar(0.99, t), 25).unwrap();
            assert!(inner.p_star.iter().all(|p| p.norm() > 1e-6));
        }
    }

    #[test]
    fn zero_examples() {
        let zeros = opuc_zeros(&VerblunskyData::zeros(4), 3).unwrap();
        assert!(zeros.iter().all(|z| z.norm() == 0.0) && zeros.len() == 3);
        let zeros = opuc_zeros(&VerblunskyData::new(vec![c(-0.5, 0.0)]).unwrap(), 1).unwrap();
        assert!((zeros[0] - c(-0.5, 0.0)).norm() < 1e-15);
        for seed in 0..5 {
            let v = VerblunskyData::new(random_alpha(seed, 20)).unwrap();
            let zeros = opuc_zeros(&v, 20).unwrap();
            assert_eq!(zeros.len(), 20);
            assert!(zeros.iter().all(|z| z.norm() < 1.0));
        }
    }

    #[test]
    fn mu_n_moment_examples() {
        let uniform = Measure::new(MeasureSpec::uniform_circle()).unwrap();
        let v = verblunsky_from_measure(&uniform, 12).unwrap();
        let mu = mu_n_moment_vector_circle(&uniform, &v, 10, 6).unwrap();
        assert_abs_diff_eq!(mu[0].re, 1.0, epsilon = 1e-12);
        assert!(mu[1..].iter().all(|m| m.norm() < 1e-14));

        let alpha = [c(-0.5, 0.0)];
        let bs = Measure::new(MeasureSpec::verblunsky(&alpha)).unwrap();
        let v = verblunsky_from_measure(&bs, 3).unwrap();
        // Oracle: direct quadrature of z/|p_1(z)|² on a fine grid.
        let k1sq = 4.0 / 3.0;
        let samples: Vec<Complex64> = periodic_grid(4096)
            .iter()
            .map(|&t| {
                let z = Complex64::from_polar(1.0, t);
                z / (k1sq * (z + 0.5).norm_sqr())
            })
            .collect();
        let oracle = periodic_quadrature(&samples).unwrap();
        let mu = mu_n_moments_circle(&bs, &v, 0, 1).unwrap();
        assert!((mu - oracle).norm() < 1e-12);
        assert!((mu - c(-0.5, 0.0)).norm() < 1e-12);
        let mu = mu_n_moment_vector_circle(&bs, &v, 2, 0).unwrap();
        assert_abs_diff_eq!(mu[0].re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn nu_hat_examples() {
        let zeros = vec![c(0.0, 0.0); 4];
        assert_eq!(nu_hat_moments(&zeros, 3).unwrap(), c(0.0, 0.0));
        assert_eq!(nu_hat_moments(&[c(0.3, 0.1)], 0).unwrap(), c(1.0, 0.0));
        let value = nu_hat_moments(&[c(-0.5, 0.0)], 2).unwrap();
        assert!((value - c(0.25, 0.0)).norm() < 1e-15);
        // Poisson-kernel quadrature of the balayage density.
        let samples: Vec<Complex64> = periodic_grid(4096)
            .iter()
            .map(|&t| Complex64::from_polar(1.0, 2.0 * t) * poisson_sum(&[c(-0.5, 0.0)], t))
            .collect();
        assert!((periodic_quadrature(&samples).unwrap() - value).norm() < 1e-13);
        assert!(matches!(nu_hat_moments(&[c(1.0, 0.0)], 1), Err(Error::OutsideCircle { .. })));
    }

    #[test]
    fn eta_examples() {
        let grid: Vec<f64> = (0..=500).map(|i| TAU * i as f64 / 500.0).collect();
        let v = VerblunskyData::zeros(6);
        let eta = prufer_eta(&v, 4, &grid).unwrap();
        for (e, t) in eta.iter().zip(&grid) {
            assert_abs_diff_eq!(*e, 5.0 * t, epsilon = 1e-12);
        }
        // One Möbius factor: arg((z + 1/2)/(1 + z/2)).
        let v = VerblunskyData::new(vec![c(-0.5, 0.0)]).unwrap();
        let eta = prufer_eta(&v, 0, &grid).unwrap();
        for (e, t) in eta.iter().zip(&grid) {
            let closed = t - 2.0 * (0.5 * t.sin()).atan2(1.0 + 0.5 * t.cos());
            assert_abs_diff_eq!(*e, closed, epsilon = 1e-12);
        }
    }

    #[test]
    fn identity_residuals() {
        let r = prufer_identity_residuals(&VerblunskyData::zeros(11), 10, 1 << 12).unwrap();
        assert!(r.r1 < 1e-9 && r.r2 < 1e-9);
        assert_abs_diff_eq!(r.increase, TAU * 11.0, epsilon = 1e-9);

        let v = VerblunskyData::new(vec![c(-0.5, 0.0)]).unwrap();
        let r = prufer_identity_residuals(&v, 0, 1 << 14).unwrap();
        assert!(r.r1 <= 1e-6 && r.r2 <= 1e-6);
        assert!(r.min_derivative > 0.0);

        // Second-order stencil: halving h divides the error by about 4.
        let m = poly_trig(vec![[1.0, 0.0], [0.4, 0.3], [-0.2, 0.1]]);
        let v = verblunsky_from_measure(&m, 12).unwrap();
        let coarse = prufer_identity_residuals(&v, 10, 1 << 10).unwrap();
        let fine = prufer_identity_residuals(&v, 10, 1 << 11).unwrap();
        let ratio = coarse.r2 / fine.r2;
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn multiplication_matrix_matches_quadrature() {
        let alpha = random_alpha(12, 7);
        let m = Measure::new(MeasureSpec::verblunsky(&alpha)).unwrap();
        let v = verblunsky_from_measure(&m, 12).unwrap();
        let atoms = m.circle_atoms().unwrap();
        let values: Vec<Vec<Complex64>> = atoms.nodes.iter().map(|&z| eval_phi(&v, z, 10).unwrap().p).collect();
        for j in 0..9 {
            let mut e = vec![c(0.0, 0.0); j + 1];
            e[j] = c(1.0, 0.0);
            let column = apply_z(v.alpha(), &e);
            for (i, g) in column.iter().enumerate() {
                let ip: Complex64 = values
                    .iter()
                    .zip(&atoms.nodes)
                    .zip(&atoms.weights)
                    .map(|((p, z), w)| w * p[i].conj() * z * p[j])
                    .sum();
                assert!((ip - g).norm() < 1e-10, "G[{i},{j}]: {ip} vs {g}");
            }
        }
    }

    #[test]
    fn operator_and_quadrature_moments_agree() {
        for m in [
            Measure::new(MeasureSpec::verblunsky(&random_alpha(13, 10))).unwrap(),
            poly_trig(vec![[1.0, 0.0], [0.4, 0.3], [-0.2, 0.1]]),
            Measure::new(MeasureSpec::uniform_circle()).unwrap(),
        ] {
            let v = verblunsky_from_measure(&m, 30).unwrap();
            for n in [0usize, 3, 12, 22] {
                let quad = mu_n_moment_vector_circle(&m, &v, n, 8).unwrap();
                let op = mu_n_moment_vector_operator(&v, n, 8).unwrap();
                for k in 0..=8 {
                    assert!((quad[k] - op[k]).norm() < 1e-10, "n {n} k {k}");
                }
            }
        }
    }

    #[test]
    fn nu_hat_channels_agree() {
        let v = VerblunskyData::new(random_alpha(14, 30)).unwrap();
        for n in [1usize, 5, 12, 25] {
            let zeros = opuc_zeros(&v, n + 1).unwrap();
            let direct = nu_hat_moment_vector(&zeros, 8).unwrap();
            let newton = nu_moment_vector_newton(&v, n, 8).unwrap();
            let kernel = nu_hat_moment_vector_kernel(&v, n, 8).unwrap();
            for k in 0..=8 {
                assert!((direct[k] - newton[k]).norm() < 1e-9, "n {n} k {k}");
                assert!((direct[k] - kernel[k]).norm() < 1e-9, "n {n} k {k}");
            }
        }
    }

    #[test]
    fn long_random_sequences_stay_consistent() {
        // Zeros of p_201 sit within rounding of the circle here, so only the
        // coefficient and operator channels are usable.
        let v = VerblunskyData::new(random_alpha(9, 210)).unwrap();
        let n = 200;
        let newton = nu_moment_vector_newton(&v, n, 8).unwrap();
        let kernel = nu_hat_moment_vector_kernel(&v, n, 8).unwrap();
        let mu = mu_n_moment_vector_operator(&v, n, 8).unwrap();
        for k in 0..=8 {
            assert!((newton[k] - kernel[k]).norm() < 1e-7, "k {k}: {}", (newton[k] - kernel[k]).norm());
            assert!((mu[k] - kernel[k]).norm() <= 2.0 * k as f64 / (n + 1) as f64 + 1e-8);
        }
    }

    proptest! {
        #[test]
        fn zeros_inside_and_power_sums_agree(seed in 0u64..1000, n in 1usize..40) {
            let v = VerblunskyData::new(random_alpha(seed, n)).unwrap();
            let zeros = opuc_zeros(&v, n).unwrap();
            prop_assert!(zeros.iter().all(|z| z.norm() < 1.0));
            let newton = zero_power_sums(&v, n, 5).unwrap();
            let direct = nu_hat_moment_vector(&zeros, 5).unwrap();
            for k in 1..=5 {
                prop_assert!((direct[k] * n as f64 - newton[k - 1]).norm() < 1e-8 * n as f64);
            }
        }
    }
}
