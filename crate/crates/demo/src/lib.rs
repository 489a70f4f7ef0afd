//! Browser demo: three interactive views over the `cdlab` core.
//!
//! Every export returns a flat `Vec<f64>` so the page can read it as a
//! `Float64Array` without any serialization layer. The plain functions are
//! also what the native tests exercise.

use cdlab::approx::{CutoffWindow, RhoSpec};
use cdlab::harness::{random_measure, verify_circle, MeasureKind};
use cdlab::measures::{Measure, MeasureSpec};
use cdlab::oprl::{jacobi_from_measure, zeros_and_weights};
use cdlab::opuc::{opuc_zeros, verblunsky_from_measure};
use cdlab::Tolerances;
use wasm_bindgen::prelude::*;

fn circle_spec(seed: u64, radius: f64) -> Result<MeasureSpec, String> {
    if !(0.0..1.0).contains(&radius) {
        return Err(format!("radius {radius} must lie in [0, 1)"));
    }
    match random_measure(MeasureKind::Circle, 256, seed).map_err(|e| e.to_string())? {
        // random_measure draws |α| ≤ 0.5; rescale to the requested bound.
        MeasureSpec::CircleVerblunsky { alpha } => Ok(MeasureSpec::CircleVerblunsky {
            alpha: alpha.iter().map(|[re, im]| [2.0 * radius * re, 2.0 * radius * im]).collect(),
        }),
        _ => unreachable!("circle kind"),
    }
}

fn real_spec(preset: &str, seed: u64) -> Result<MeasureSpec, String> {
    match preset {
        "chebyshev" => Ok(MeasureSpec::chebyshev()),
        "legendre" => Ok(MeasureSpec::legendre()),
        "random" => random_measure(MeasureKind::Real, 200, seed).map_err(|e| e.to_string()),
        other => Err(format!("unknown preset `{other}`")),
    }
}

/// Zeros of `p_n` for seeded random Verblunsky coefficients with `|α_j| ≤
/// radius`, as `[re0, im0, re1, im1, …]`.
pub fn circle_zeros(seed: u64, radius: f64, n: usize) -> Result<Vec<f64>, String> {
    let measure = Measure::new(circle_spec(seed, radius)?).map_err(|e| e.to_string())?;
    let v = verblunsky_from_measure(&measure, n.max(1)).map_err(|e| e.to_string())?;
    let zeros = opuc_zeros(&v, n).map_err(|e| e.to_string())?;
    Ok(zeros.iter().flat_map(|z| [z.re, z.im]).collect())
}

/// `[n, gap, bound]` triples for `n = 1..=n_max` at fixed `k`: the moment
/// gap between the CD measure and the swept zero measure, against `2k/(n+1)`.
pub fn circle_gaps(seed: u64, radius: f64, n_max: usize, k: usize) -> Result<Vec<f64>, String> {
    let spec = circle_spec(seed, radius)?;
    let ns: Vec<usize> = (1..=n_max.clamp(1, 200)).collect();
    let report = verify_circle(&spec, &ns, &[k], Some(seed), &Tolerances::default()).map_err(|e| e.to_string())?;
    Ok(report
        .rows
        .iter()
        .flat_map(|r| [r.n as f64, r.gap, 2.0 * r.k as f64 / (r.n as f64 + 1.0)])
        .collect())
}

/// The second-kind density `ρ_n` sampled at `points` nodes on `[lo, hi]`,
/// followed by the Gauss nodes and weights of order `n`:
/// `[x…, ρ…, node…, weight…]` with lengths `points, points, n, n`.
pub fn real_density(preset: &str, seed: u64, n: usize, lo: f64, hi: f64, points: usize) -> Result<Vec<f64>, String> {
    if !(lo < hi) || points < 2 {
        return Err("need lo < hi and at least two points".into());
    }
    let measure = Measure::new(real_spec(preset, seed)?).map_err(|e| e.to_string())?;
    let j = jacobi_from_measure(&measure, n + 1).map_err(|e| e.to_string())?;
    let rho = RhoSpec::new(j.clone(), n).map_err(|e| e.to_string())?;
    let xs: Vec<f64> = (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect();
    let mut out = xs.clone();
    for &x in &xs {
        out.push(rho.density(x).map_err(|e| e.to_string())?);
    }
    if n > 0 {
        let gauss = zeros_and_weights(&j, n).map_err(|e| e.to_string())?;
        out.extend(&gauss.nodes);
        out.extend(&gauss.weights);
    }
    Ok(out)
}

/// The cutoff window `[−M−1, M+1]` for a real preset.
pub fn window_edge(preset: &str, seed: u64) -> Result<f64, String> {
    let measure = Measure::new(real_spec(preset, seed)?).map_err(|e| e.to_string())?;
    Ok(CutoffWindow::for_measure(&measure).map_err(|e| e.to_string())?.edge())
}

#[wasm_bindgen(js_name = circleZeros)]
pub fn circle_zeros_js(seed: u32, radius: f64, n: usize) -> Result<Vec<f64>, JsError> {
    circle_zeros(seed.into(), radius, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = circleGaps)]
pub fn circle_gaps_js(seed: u32, radius: f64, n_max: usize, k: usize) -> Result<Vec<f64>, JsError> {
    circle_gaps(seed.into(), radius, n_max, k).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = realDensity)]
pub fn real_density_js(preset: &str, seed: u32, n: usize, lo: f64, hi: f64, points: usize) -> Result<Vec<f64>, JsError> {
    real_density(preset, seed.into(), n, lo, hi, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = windowEdge)]
pub fn window_edge_js(preset: &str, seed: u32) -> Result<f64, JsError> {
    window_edge(preset, seed.into()).map_err(|e| JsError::new(&e))
}
