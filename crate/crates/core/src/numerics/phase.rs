//! Continuous arguments of nonvanishing complex samples.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Unwraps `arg(values[j])` into a continuous sequence starting in [0, 2π).
/// A step whose principal increment cannot be told apart from ±π fails.
pub fn unwrap_phase(values: &[Complex64]) -> Result<Vec<f64>> {
    unwrap_phase_with_limit(values, PI * (1.0 - 1e-9))
}

/// As [`unwrap_phase`], rejecting any step with |increment| ≥ `limit`.
pub fn unwrap_phase_with_limit(values: &[Complex64], limit: f64) -> Result<Vec<f64>> {
    let Some(first) = values.first() else {
        return Ok(Vec::new());
    };
    let mut out = Vec::with_capacity(values.len());
    let mut phase = first.arg().rem_euclid(TAU);
    if phase >= TAU {
        phase = 0.0;
    }
    out.push(phase);
    for j in 1..values.len() {
        let step = (values[j] / values[j - 1]).arg();
        if !(step.abs() < limit) {
            return Err(Error::GridTooCoarse { index: j });
        }
        phase += step;
        out.push(phase);
    }
    Ok(out)
}

/// Continuous argument of `f` along the increasing parameter `grid`.
///
/// Each grid interval is bisected (up to `max_depth` times) until every
/// sub-step changes the argument by less than `max_step`, so the returned
/// values stay on the caller's grid while the branch is tracked on a finer
/// one. The first value is the principal argument in (−π, π].
pub fn track_argument<F>(f: F, grid: &[f64], max_step: f64, max_depth: usize) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Complex64,
{
    let Some(&t0) = grid.first() else {
        return Ok(Vec::new());
    };
    let mut prev = f(t0);
    let mut phase = prev.arg();
    let mut out = Vec::with_capacity(grid.len());
    out.push(phase);
    for pair in grid.windows(2) {
        let next = f(pair[1]);
        phase += increment(&f, pair[0], pair[1], prev, next, max_step, max_depth)?;
        out.push(phase);
        prev = next;
    }
    Ok(out)
}

fn increment<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: Complex64,
    fb: Complex64,
    max_step: f64,
    depth: usize,
) -> Result<f64>
where
    F: Fn(f64) -> Complex64,
{
    let step = (fb / fa).arg();
    let m = 0.5 * (a + b);
    let fm = f(m);
    if step.abs() < max_step {
        // Accept only when the midpoint sample tells the same story.
        let left = (fm / fa).arg();
        let right = (fb / fm).arg();
        if (left + right - step).abs() <= 1e-9 * max_step.max(1.0) {
            return Ok(step);
        }
    }
    if depth == 0 {
        return Err(Error::RefinementCap { at: m });
    }
    Ok(increment(f, a, m, fa, fm, max_step, depth - 1)? + increment(f, m, b, fm, fb, max_step, depth - 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn grid(m: usize) -> Vec<f64> {
        (0..=m).map(|j| TAU * j as f64 / m as f64).collect()
    }

    #[test]
    fn linear_ramps() {
        let g = grid(64);
        let one: Vec<Complex64> = g.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
        let u = unwrap_phase(&one).unwrap();
        for (a, t) in u.iter().zip(&g) {
            assert_abs_diff_eq!(*a, *t, epsilon = 1e-12);
        }
        let two: Vec<Complex64> = g.iter().map(|&t| Complex64::from_polar(1.0, 2.0 * t)).collect();
        let u = unwrap_phase(&two).unwrap();
        assert_abs_diff_eq!(u[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(*u.last().unwrap(), 2.0 * TAU, epsilon = 1e-12);
    }

    #[test]
    fn constant_is_flat() {
        let u = unwrap_phase(&vec![Complex64::new(1.0, 0.0); 10]).unwrap();
        assert!(u.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn start_in_zero_two_pi() {
        let u = unwrap_phase(&[Complex64::new(0.0, -1.0), Complex64::new(1.0, -1.0)]).unwrap();
        assert_abs_diff_eq!(u[0], 1.5 * PI, epsilon = 1e-15);
        assert_abs_diff_eq!(u[1], 1.75 * PI, epsilon = 1e-15);
    }

    #[test]
    fn coarse_grid_rejected() {
        let v = [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)];
        assert_eq!(unwrap_phase(&v).unwrap_err(), Error::GridTooCoarse { index: 1 });
    }

    #[test]
    fn tracking_refines_coarse_grid() {
        // Winding 7 sampled at only 6 points.
        let g = grid(5);
        let u = track_argument(|t| Complex64::from_polar(1.0, 7.0 * t), &g, PI / 2.0, 20).unwrap();
        assert_abs_diff_eq!(u.last().unwrap() - u[0], 7.0 * TAU, epsilon = 1e-10);
    }

    proptest! {
        #[test]
        fn closed_loops_wind_integrally(w in -6i32..6, m in 64usize..256, r in 0.0f64..0.9) {
            // 1 + r e^{iθ} does not wind for r < 1, so the total winding is w.
            let g = grid(m);
            let v: Vec<Complex64> = g.iter().map(|&t| {
                Complex64::from_polar(1.0, w as f64 * t) * (1.0 + Complex64::from_polar(r, t))
            }).collect();
            let u = unwrap_phase(&v).unwrap();
            let winding = (u.last().unwrap() - u[0]) / TAU;
            prop_assert!((winding - winding.round()).abs() < 1e-9);
            prop_assert_eq!(winding.round() as i32, w);
        }
    }
}
