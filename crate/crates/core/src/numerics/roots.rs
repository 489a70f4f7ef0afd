//! Complex polynomials, Aberth–Ehrlich root finding and Newton power sums.

use num_complex::Complex64;

use crate::config::Tolerances;
use crate::error::{Error, Result};

/// Polynomial with complex coefficients, constant term first.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPolynomial {
    coeffs: Vec<Complex64>,
}

impl ComplexPolynomial {
    /// Trailing zero coefficients are dropped; at least one nonzero
    /// coefficient is required.
    pub fn new(mut coeffs: Vec<Complex64>) -> Result<Self> {
        while coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("zero polynomial".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs[self.degree()]
    }

    pub fn monic(&self) -> Self {
        let lead = self.leading();
        Self {
            coeffs: self.coeffs.iter().map(|c| c / lead).collect(),
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// `(p(z), p'(z))` by a single Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `(q(w), q'(w))` for the reversed polynomial `q(w) = w^n p(1/w)`.
    fn eval_reversed_with_derivative(&self, w: Complex64) -> (Complex64, Complex64) {
        let mut q = Complex64::new(0.0, 0.0);
        let mut dq = Complex64::new(0.0, 0.0);
        for c in &self.coeffs {
            dq = dq * w + q;
            q = q * w + c;
        }
        (q, dq)
    }

    /// Newton correction `p(z)/p'(z)`; outside the unit disk it is formed
    /// from the reversed polynomial so that large `|z|` cannot overflow.
    pub fn newton_correction(&self, z: Complex64) -> Complex64 {
        if z.norm() <= 1.0 {
            let (p, dp) = self.eval_with_derivative(z);
            return p / dp;
        }
        let w = z.inv();
        let (q, dq) = self.eval_reversed_with_derivative(w);
        z * q / (self.degree() as f64 * q - w * dq)
    }

    /// Componentwise backward error `|p(z)| / Σ |c_i| |z|^i`: meaningful at
    /// every scale, unlike the leading-coefficient residual.
    pub fn backward_error(&self, z: Complex64) -> f64 {
        let (value, magnitude) = if z.norm() <= 1.0 {
            let r = z.norm();
            let mag = self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm());
            (self.eval(z).norm(), mag)
        } else {
            let w = z.inv();
            let r = w.norm();
            let mag = self.coeffs.iter().fold(0.0, |acc, c| acc * r + c.norm());
            (self.eval_reversed_with_derivative(w).0.norm(), mag)
        };
        if magnitude == 0.0 {
            0.0
        } else {
            value / magnitude
        }
    }

    /// `|p(z)| / (|lead| · max(1,|z|)^deg)`.
    pub fn relative_residual(&self, z: Complex64) -> f64 {
        let lead = self.leading().norm();
        if z.norm() <= 1.0 {
            return self.eval(z).norm() / lead;
        }
        self.eval_reversed_with_derivative(z.inv()).0.norm() / lead
    }
}

/// All roots of `p` with multiplicity, in nondecreasing modulus.
pub fn aberth_roots(p: &ComplexPolynomial) -> Result<Vec<Complex64>> {
    aberth_roots_with(p, &Tolerances::default())
}

pub fn aberth_roots_with(p: &ComplexPolynomial, tol: &Tolerances) -> Result<Vec<Complex64>> {
    if p.degree() == 0 {
        return Err(Error::InvalidArgument("constant polynomial has no roots".into()));
    }
    // Exact zeros at the origin are split off before iterating.
    let zero = Complex64::new(0.0, 0.0);
    let shift = p.coeffs.iter().take_while(|c| **c == zero).count();
    let mut roots = vec![zero; shift];
    if shift < p.degree() {
        let reduced = ComplexPolynomial::new(p.coeffs[shift..].to_vec())?;
        roots.extend(aberth_nonzero(&reduced, tol)?);
    }
    let roots = merge_clusters(roots, tol.root_cluster);

    let worst = roots
        .iter()
        .map(|&z| p.relative_residual(z))
        .fold(0.0_f64, f64::max);
    if !(worst <= tol.root_accept) {
        return Err(Error::RootsNoConvergence {
            best: roots,
            residual: worst,
            sweeps: tol.root_max_sweeps,
        });
    }
    Ok(sort_by_modulus(roots))
}

fn aberth_nonzero(p: &ComplexPolynomial, tol: &Tolerances) -> Result<Vec<Complex64>> {
    let n = p.degree();
    let lead = p.leading();
    if n == 1 {
        return Ok(vec![-p.coeffs[0] / lead]);
    }
    let mut z = initial_guesses(p);
    // Horner's rule attains a backward error of about 2nε.
    let rounding_level = 4.0 * n as f64 * f64::EPSILON;
    let mut converged = vec![false; n];

    for _sweep in 0..tol.root_max_sweeps {
        let mut all_done = true;
        for j in 0..n {
            if converged[j] {
                continue;
            }
            let ratio = p.newton_correction(z[j]);
            if ratio.norm() == 0.0 {
                converged[j] = true;
                continue;
            }
            let repulsion: Complex64 = (0..n)
                .filter(|&k| k != j)
                .map(|k| (z[j] - z[k]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[j] -= step;
            }
            let small_step = step.norm() <= 4.0 * f64::EPSILON * z[j].norm().max(f64::MIN_POSITIVE);
            if small_step || p.backward_error(z[j]) <= rounding_level {
                converged[j] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            return Ok(z);
        }
    }
    // Cap reached: still acceptable if the residual test passes.
    let residual = z.iter().map(|&r| p.relative_residual(r)).fold(0.0_f64, f64::max);
    if residual <= tol.root_accept {
        Ok(z)
    } else {
        Err(Error::RootsNoConvergence {
            best: z,
            residual,
            sweeps: tol.root_max_sweeps,
        })
    }
}

/// Starting points on circles read off the upper convex hull of
/// `(i, ln|c_i|)`: an edge from `i` to `j` contributes `j − i` points on the
/// circle of radius `(|c_i|/|c_j|)^{1/(j−i)}`.
fn initial_guesses(p: &ComplexPolynomial) -> Vec<Complex64> {
    let n = p.degree();
    let points: Vec<(usize, f64)> = p
        .coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(i, c)| (i, c.norm().ln()))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &pt in &points {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // Drop b unless it lies strictly above the chord from a to pt.
            let cross = (b.0 as f64 - a.0 as f64) * (pt.1 - a.1) - (b.1 - a.1) * (pt.0 as f64 - a.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let mut z = Vec::with_capacity(n);
    for edge in hull.windows(2) {
        let ((i, li), (j, lj)) = (edge[0], edge[1]);
        let count = j - i;
        let radius = ((li - lj) / count as f64).exp();
        for k in 0..count {
            let angle = std::f64::consts::TAU * (k as f64 / count as f64 + i as f64 / n as f64) + 0.4;
            z.push(Complex64::from_polar(radius, angle));
        }
    }
    z
}

/// Replaces every cluster of roots closer than `radius` by copies of its mean.
fn merge_clusters(mut roots: Vec<Complex64>, radius: f64) -> Vec<Complex64> {
    let n = roots.len();
    let mut label: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in 0..i {
            if (roots[i] - roots[j]).norm() < radius {
                let (a, b) = (label[i], label[j]);
                for l in label.iter_mut() {
                    if *l == a {
                        *l = b;
                    }
                }
            }
        }
    }
    for group in 0..n {
        let members: Vec<usize> = (0..n).filter(|&i| label[i] == group).collect();
        if members.len() > 1 {
            let mean = members.iter().map(|&i| roots[i]).sum::<Complex64>() / members.len() as f64;
            for &i in &members {
                roots[i] = mean;
            }
        }
    }
    roots
}

fn sort_by_modulus(mut roots: Vec<Complex64>) -> Vec<Complex64> {
    roots.sort_by(|a, b| {
        a.norm()
            .total_cmp(&b.norm())
            .then(a.arg().total_cmp(&b.arg()))
    });
    roots
}

/// Power sums `s_k = Σ z_j^k`, k = 1..=k_max, from the coefficients of a
/// monic polynomial via Newton's identities.
pub fn newton_power_sums(p: &ComplexPolynomial, k_max: usize) -> Result<Vec<Complex64>> {
    let n = p.degree();
    if n == 0 {
        return Err(Error::InvalidArgument("power sums need degree >= 1".into()));
    }
    let one = Complex64::new(1.0, 0.0);
    if (p.leading() - one).norm() > 1e-14 {
        return Err(Error::InvalidArgument("newton_power_sums expects a monic polynomial".into()));
    }
    // e(i) is the coefficient of z^{n-i}.
    let e = |i: usize| p.coeffs[n - i];
    let mut s: Vec<Complex64> = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let mut acc = if k <= n { e(k) * k as f64 } else { Complex64::new(0.0, 0.0) };
        for i in 1..k.min(n + 1) {
            acc += e(i) * s[k - i - 1];
        }
        s.push(-acc);
    }
    Ok(s)
}
