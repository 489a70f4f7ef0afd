//! Symmetric tridiagonal eigenproblems.
//!
//! Implicit-shift QL that only carries the first row of the eigenvector
//! matrix. For a Jacobi matrix the squares of those entries are the weights
//! of the spectral measure at `e_1`, which is all the callers need.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSymmetric {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl TridiagonalSymmetric {
    /// Off-diagonal entries must be strictly positive (irreducible matrix).
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidArgument("empty tridiagonal matrix".into()));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::InvalidArgument(format!(
                "off-diagonal length {} does not match dimension {}",
                offdiag.len(),
                diag.len()
            )));
        }
        if let Some(i) = diag.iter().position(|d| !d.is_finite()) {
            return Err(Error::InvalidArgument(format!("diagonal entry {i} is not finite")));
        }
        if let Some(i) = offdiag.iter().position(|&e| !(e > 0.0 && e.is_finite())) {
            return Err(Error::InvalidArgument(format!(
                "off-diagonal entry {i} = {} is not positive",
                offdiag[i]
            )));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        let d: f64 = self.diag.iter().map(|x| x * x).sum();
        let e: f64 = self.offdiag.iter().map(|x| x * x).sum();
        (d + 2.0 * e).sqrt()
    }

    /// `y = T v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = self.diag[i] * v[i];
            if i > 0 {
                s += self.offdiag[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                s += self.offdiag[i] * v[i + 1];
            }
            y[i] = s;
        }
        y
    }

    /// `trace(T^k)`, one matrix-vector chain per basis vector.
    pub fn trace_power(&self, k: usize) -> f64 {
        let n = self.dim();
        let mut total = 0.0;
        for i in 0..n {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            for _ in 0..k {
                v = self.apply(&v);
            }
            total += v[i];
        }
        total
    }
}

/// Eigenvalues in ascending order with the squared first components of the
/// matching orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub eigenvalues: Vec<f64>,
    pub first_component_sq: Vec<f64>,
}

pub fn symtridiag_eigen(t: &TridiagonalSymmetric) -> Result<SpectralData> {
    symtridiag_eigen_with_cap(t, crate::Tolerances::default().eigen_max_iterations)
}

pub fn symtridiag_eigen_with_cap(t: &TridiagonalSymmetric, max_iter: usize) -> Result<SpectralData> {
    let n = t.dim();
    let mut d = t.diag.clone();
    let mut e = t.offdiag.clone();
    e.push(0.0);
    // First row of the accumulated rotation matrix.
    let mut z = vec![0.0; n];
    z[0] = 1.0;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > max_iter {
                return Err(Error::EigenNoConvergence {
                    index: l,
                    iterations: iter - 1,
                });
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0_f64, 1.0_f64, 0.0_f64);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;

                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    Ok(SpectralData {
        eigenvalues: order.iter().map(|&i| d[i]).collect(),
        first_component_sq: order.iter().map(|&i| z[i] * z[i]).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Eigenvector by inverse iteration, used only to check residuals.
    fn eigenvector(t: &TridiagonalSymmetric, lambda: f64) -> Vec<f64> {
        let n = t.dim();
        let shift = lambda + 1e-10 * t.norm().max(1.0);
        let mut v = vec![1.0; n];
        for _ in 0..3 {
            // Thomas algorithm on (T - shift) x = v.
            let a = t.offdiag();
            let mut cp = vec![0.0; n];
            let mut dp = vec![0.0; n];
            let b0 = t.diag()[0] - shift;
            cp[0] = if n > 1 { a[0] / b0 } else { 0.0 };
            dp[0] = v[0] / b0;
            for i in 1..n {
                let bi = t.diag()[i] - shift - a[i - 1] * cp[i - 1];
                cp[i] = if i + 1 < n { a[i] / bi } else { 0.0 };
                dp[i] = (v[i] - a[i - 1] * dp[i - 1]) / bi;
            }
            let mut x = vec![0.0; n];
            x[n - 1] = dp[n - 1];
            for i in (0..n - 1).rev() {
                x[i] = dp[i] - cp[i] * x[i + 1];
            }
            let norm = x.iter().map(|y| y * y).sum::<f64>().sqrt();
            v = x.iter().map(|y| y / norm).collect();
        }
        v
    }

    #[test]
    fn two_by_two_exchange() {
        let t = TridiagonalSymmetric::new(vec![0.0, 0.0], vec![1.0]).unwrap();
        let s = symtridiag_eigen(&t).unwrap();
        assert_abs_diff_eq!(s.eigenvalues[0], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.eigenvalues[1], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.first_component_sq[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.first_component_sq[1], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn one_by_one() {
        let t = TridiagonalSymmetric::new(vec![2.5], vec![]).unwrap();
        let s = symtridiag_eigen(&t).unwrap();
        assert_eq!(s.eigenvalues, vec![2.5]);
        assert_eq!(s.first_component_sq, vec![1.0]);
    }

    /// Zeros of T_n located by bisection on sign changes of the recurrence,
    /// independent of the QL iteration.
    fn chebyshev_zeros_by_bisection(n: usize) -> Vec<f64> {
        let t_n = |x: f64| {
            let (mut a, mut b) = (1.0, x);
            for _ in 1..n {
                let c = 2.0 * x * b - a;
                a = b;
                b = c;
            }
            if n == 0 {
                a
            } else {
                b
            }
        };
        let samples = 40 * n;
        let mut zeros = Vec::new();
        for i in 0..samples {
            // Offset so that no sample lands exactly on a zero.
            let (mut lo, mut hi) = (
                -1.0 + (2.0 * i as f64 + 0.137) / samples as f64,
                -1.0 + (2.0 * (i + 1) as f64 + 0.137) / samples as f64,
            );
            if t_n(lo) * t_n(hi) < 0.0 {
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if t_n(lo) * t_n(mid) <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                zeros.push(0.5 * (lo + hi));
            }
        }
        zeros
    }

    #[test]
    fn chebyshev_jacobi_matrix() {
        for n in [3usize, 8, 17] {
            let mut off = vec![0.5; n - 1];
            off[0] = std::f64::consts::FRAC_1_SQRT_2;
            let t = TridiagonalSymmetric::new(vec![0.0; n], off).unwrap();
            let s = symtridiag_eigen(&t).unwrap();
            let oracle = chebyshev_zeros_by_bisection(n);
            assert_eq!(oracle.len(), n);
            for j in 0..n {
                assert_abs_diff_eq!(s.eigenvalues[j], oracle[j], epsilon = 1e-13);
                assert_abs_diff_eq!(s.first_component_sq[j], 1.0 / n as f64, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn rejects_reducible_matrix() {
        assert!(TridiagonalSymmetric::new(vec![0.0, 1.0], vec![0.0]).is_err());
        assert!(TridiagonalSymmetric::new(vec![0.0, 1.0], vec![]).is_err());
    }

    #[test]
    fn iteration_cap_reports_index() {
        let t = TridiagonalSymmetric::new(vec![1.0, 2.0, 3.0], vec![1.0, 1.0]).unwrap();
        match symtridiag_eigen_with_cap(&t, 0) {
            Err(Error::EigenNoConvergence { index, .. }) => assert_eq!(index, 0),
            other => panic!("unexpected {other:?}"),
        }
    }

    fn arb_matrix() -> impl Strategy<Value = TridiagonalSymmetric> {
        (2usize..40).prop_flat_map(|n| {
            (
                proptest::collection::vec(-2.0f64..2.0, n),
                proptest::collection::vec(0.3f64..1.5, n - 1),
            )
                .prop_map(|(d, e)| TridiagonalSymmetric::new(d, e).unwrap())
        })
    }

    proptest! {
        #[test]
        fn spectral_invariants(t in arb_matrix()) {
            let s = symtridiag_eigen(&t).unwrap();
            let n = t.dim();
            let total: f64 = s.first_component_sq.iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            let first: f64 = s.eigenvalues.iter().zip(&s.first_component_sq).map(|(l, w)| l * w).sum();
            prop_assert!((first - t.diag()[0]).abs() < 1e-10);
            for w in s.eigenvalues.windows(2) {
                prop_assert!(w[0] < w[1]);
            }
            let norm = t.norm();
            for &lambda in &s.eigenvalues {
                let v = eigenvector(&t, lambda);
                let tv = t.apply(&v);
                let res = tv.iter().zip(&v).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
                prop_assert!(res / norm <= 1e-12, "residual {}", res / norm);
            }
            // Leading blocks interlace; random diagonals can bring eigenvalues
            // within rounding of each other, so allow a backward-error slack.
            if n >= 3 {
                let sub = TridiagonalSymmetric::new(t.diag()[..n - 1].to_vec(), t.offdiag()[..n - 2].to_vec()).unwrap();
                let inner = symtridiag_eigen(&sub).unwrap().eigenvalues;
                for j in 0..n - 1 {
                    let slack = 1e-13 * norm;
                    prop_assert!(s.eigenvalues[j] < inner[j] + slack && inner[j] < s.eigenvalues[j + 1] + slack);
                }
            }
        }
    }
}
