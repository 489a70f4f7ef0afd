use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use cdlab::approx::{bernstein_szego_moments, rho_n_integral, Integrand, Region, RhoSpec};
use cdlab::harness::{corollary_check, verify_circle, verify_real, ReportMetadata};
use cdlab::measures::Measure;
use cdlab::oprl::{cd_kernel_diag, jacobi_from_measure, real_prufer_theta, zeros_and_weights, JacobiData};
use cdlab::opuc::{opuc_zeros, prufer_identity_residuals, verblunsky_from_measure};
use serde::Serialize;

use crate::config::{CommandName, Resolved, RunConfig};

/// What a finished command reports back to `main`.
#[derive(Debug)]
pub struct Outcome {
    pub ok: bool,
    pub summary: Vec<String>,
    pub files: Vec<PathBuf>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    config: &'a RunConfig,
    metadata: ReportMetadata,
    ok: bool,
    failures: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<serde_json::Value>,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Setup(#[from] cdlab::Error),
    #[error("writing {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

struct Output<'a> {
    dir: &'a Path,
    files: Vec<PathBuf>,
}

impl Output<'_> {
    fn write(&mut self, name: &str, text: &str) -> Result<(), RunError> {
        let path = self.dir.join(name);
        std::fs::create_dir_all(self.dir)
            .and_then(|_| std::fs::write(&path, text))
            .map_err(|source| RunError::Io { path: path.clone(), source })?;
        self.files.push(path);
        Ok(())
    }
}

pub fn execute(run: &Resolved, out_dir: &Path) -> Result<Outcome, RunError> {
    let cfg = &run.config;
    let ns = cfg.n.values();
    let ks = &cfg.k;
    let tol = &cfg.tolerances;
    let kind = if run.spec.is_circle() { "circle" } else { "real" };
    let metadata = ReportMetadata::new(kind, &run.spec, cfg.seed, tol);
    let mut out = Output { dir: out_dir, files: Vec::new() };
    let mut failures = Vec::new();
    let mut summary = Vec::new();
    let (csv_name, csv, report, ok) = match cfg.command {
        CommandName::VerifyCircle => {
            let r = verify_circle(&run.spec, &ns, ks, cfg.seed, tol)?;
            failures.extend(r.rows.iter().filter(|r| !r.ok).map(|r| {
                format!("n={} k={}: gap {:e} bound {:e} {}", r.n, r.k, r.gap, r.bound, r.note.as_deref().unwrap_or(""))
            }));
            summary.push(format!(
                "{} rows, {} violations, {} failures",
                r.rows.len(),
                r.violations().count(),
                r.failures().count()
            ));
            let ok = r.all_ok();
            ("discrepancy.csv", r.to_csv(), Some(to_value(&r)), ok)
        }
        CommandName::VerifyReal => {
            let r = verify_real(&run.spec, &ns, ks, cfg.seed, tol)?;
            failures.extend(r.failures().map(|r| format!("n={} k={}: {}", r.n, r.k, r.note.as_deref().unwrap_or(""))));
            for (k, c) in &r.bound_constants {
                summary.push(format!("k={k}: sup gap*(n+1) = {c:.6e}"));
            }
            let mut ok = r.all_ok();
            for f in &r.rate_fits {
                let good = f.slope <= -0.8;
                summary.push(format!(
                    "k={}: slope {:.4} over n in {}..{} ({})",
                    f.k,
                    f.slope,
                    f.n_range.0,
                    f.n_range.1,
                    if good { "ok" } else { "too shallow" }
                ));
                if !good {
                    failures.push(format!("k={}: rate slope {:.4} > -0.8", f.k, f.slope));
                    ok = false;
                }
            }
            ("discrepancy.csv", r.to_csv(), Some(to_value(&r)), ok)
        }
        CommandName::Corollary => {
            let radius = cfg.radius.expect("validated by resolve");
            let r = corollary_check(&run.spec, &ns, radius, ks, cfg.seed, tol)?;
            failures.extend(r.rows.iter().filter(|r| !r.ok).map(|r| {
                format!("n={} k={}: raw {:e} balayage {:e} {}", r.n, r.k, r.raw_gap, r.balayage_gap, r.note.as_deref().unwrap_or(""))
            }));
            summary.push(format!("{} rows on |z| = {radius}", r.rows.len()));
            let ok = r.all_ok();
            ("corollary.csv", r.to_csv(), Some(to_value(&r)), ok)
        }
        CommandName::Zeros => {
            let csv = zeros_csv(&run.measure, &ns, &mut failures)?;
            ("zeros.csv", csv, None, failures.is_empty())
        }
        CommandName::Prufer => {
            let csv = if run.spec.is_circle() {
                prufer_circle_csv(&run.measure, &ns, cfg.points, tol.winding, &mut failures)?
            } else {
                prufer_real_csv(&run.measure, &ns, cfg.points, &mut failures)?
            };
            ("prufer.csv", csv, None, failures.is_empty())
        }
        CommandName::Rho => {
            let csv = rho_csv(&run.measure, &ns, ks, &mut failures)?;
            ("rho.csv", csv, None, failures.is_empty())
        }
        CommandName::BernsteinSzego => {
            let csv = bernstein_szego_csv(&run.measure, &ns, &mut failures)?;
            ("bernstein_szego.csv", csv, None, failures.is_empty())
        }
    };
    out.write(csv_name, &csv)?;
    let manifest = Manifest {
        config: cfg,
        metadata,
        ok,
        failures: &failures,
        report,
    };
    out.write("manifest.json", &(serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n"))?;
    out.write("run.json", &(serde_json::to_string_pretty(cfg).expect("config serializes") + "\n"))?;
    summary.extend(failures.iter().map(|f| format!("FAILED {f}")));
    Ok(Outcome {
        ok,
        summary,
        files: out.files,
    })
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn jacobi_for(measure: &Measure, n_max: usize) -> Result<JacobiData, RunError> {
    Ok(jacobi_from_measure(measure, n_max + 1)?)
}

fn zeros_csv(measure: &Measure, ns: &[usize], failures: &mut Vec<String>) -> Result<String, RunError> {
    let n_max = *ns.last().expect("nonempty");
    let mut csv = String::from("# cdlab zeros v1\nn,index,re,im,modulus,weight\n");
    if measure.is_circle() {
        let v = verblunsky_from_measure(measure, n_max)?;
        for &n in ns.iter().filter(|&&n| n > 0) {
            match opuc_zeros(&v, n) {
                Ok(zs) => {
                    for (i, z) in zs.iter().enumerate() {
                        let _ = writeln!(csv, "{n},{i},{:e},{:e},{:e},", z.re, z.im, z.norm());
                    }
                }
                Err(e) => failures.push(format!("n={n}: {e}")),
            }
        }
    } else {
        let j = jacobi_for(measure, n_max.saturating_sub(1))?;
        for &n in ns.iter().filter(|&&n| n > 0) {
            match zeros_and_weights(&j, n) {
                Ok(m) => {
                    for (i, (x, w)) in m.iter().enumerate() {
                        let _ = writeln!(csv, "{n},{i},{x:e},0e0,{:e},{w:e}", x.abs());
                    }
                }
                Err(e) => failures.push(format!("n={n}: {e}")),
            }
        }
    }
    Ok(csv)
}

fn prufer_circle_csv(
    measure: &Measure,
    ns: &[usize],
    points: usize,
    winding: f64,
    failures: &mut Vec<String>,
) -> Result<String, RunError> {
    let v = verblunsky_from_measure(measure, ns.last().expect("nonempty") + 2)?;
    let mut csv = String::from("# cdlab prufer-circle v1\nn,r1,r2,increase,expected,min_derivative,points,ok\n");
    for &n in ns {
        match prufer_identity_residuals(&v, n, points) {
            Ok(r) => {
                let expected = TAU * (n + 1) as f64;
                let ok = r.r1 <= 1e-5 && r.r2 <= 1e-5 && (r.increase - expected).abs() <= winding;
                if !ok {
                    failures.push(format!("n={n}: r1 {:e} r2 {:e}", r.r1, r.r2));
                }
                let _ = writeln!(
                    csv,
                    "{n},{:e},{:e},{:e},{expected:e},{:e},{},{ok}",
                    r.r1, r.r2, r.increase, r.min_derivative, r.points
                );
            }
            Err(e) => failures.push(format!("n={n}: {e}")),
        }
    }
    Ok(csv)
}

/// `(1/π) dθ_{n+1}/dx` against `K_n · dρ_n/dx` at `points` samples of
/// `[−N−1, N+1]`. The derivative is a local five-point stencil, halved
/// until two steps agree: `K_n ρ_n` has tall narrow peaks near the edge of
/// the support that a fixed step would straddle.
fn prufer_real_csv(measure: &Measure, ns: &[usize], points: usize, failures: &mut Vec<String>) -> Result<String, RunError> {
    let j = jacobi_for(measure, *ns.last().expect("nonempty"))?;
    let edge = measure.support_radius() + 1.0;
    let grid: Vec<f64> = (0..=points).map(|i| -edge + 2.0 * edge * i as f64 / points as f64).collect();
    let mut csv = String::from("# cdlab prufer-real v1\nn,residual,increase,points,ok\n");
    for &n in ns {
        let row = || -> cdlab::Result<(f64, f64)> {
            let rho = RhoSpec::new(j.clone(), n)?;
            let mut worst = 0.0_f64;
            let mut scale = 0.0_f64;
            for &x in &grid {
                let exact = cd_kernel_diag(&j, x, n)? * rho.density(x)?;
                let derivative = |h: f64| -> cdlab::Result<f64> {
                    let stencil: Vec<f64> = (-2..=2).map(|i| x + i as f64 * h).collect();
                    let t = real_prufer_theta(&j, n + 1, &stencil)?;
                    Ok((t[0] - 8.0 * t[1] + 8.0 * t[3] - t[4]) / (12.0 * h) / PI)
                };
                let mut h = 0.02 / (PI * exact + 1.0);
                let mut d = derivative(h)?;
                for _ in 0..30 {
                    h *= 0.5;
                    let finer = derivative(h)?;
                    let settled = (finer - d).abs() <= 1e-8 * finer.abs().max(1.0);
                    d = finer;
                    if settled {
                        break;
                    }
                }
                worst = worst.max((d - exact).abs());
                scale = scale.max(exact.abs());
            }
            let theta = real_prufer_theta(&j, n + 1, &grid)?;
            Ok((worst / scale, theta[points] - theta[0]))
        };
        match row() {
            Ok((r, increase)) => {
                let ok = r <= 1e-5;
                if !ok {
                    failures.push(format!("n={n}: residual {r:e}"));
                }
                let _ = writeln!(csv, "{n},{r:e},{increase:e},{points},{ok}");
            }
            Err(e) => failures.push(format!("n={n}: {e}")),
        }
    }
    Ok(csv)
}

fn rho_csv(measure: &Measure, ns: &[usize], ls: &[usize], failures: &mut Vec<String>) -> Result<String, RunError> {
    let j = jacobi_for(measure, *ns.last().expect("nonempty"))?;
    let mut csv = String::from("# cdlab rho v1\nn,l,rho_integral,moment,diff,ok\n");
    for &n in ns {
        let rho = RhoSpec::new(j.clone(), n)?;
        for &l in ls.iter().filter(|&&l| l <= 2 * n) {
            match rho_n_integral(&rho, &Integrand::Power(l), Region::All) {
                Ok(value) => {
                    let moment = measure.moment(l).re;
                    let diff = (value - moment).abs();
                    let ok = diff <= 1e-8 * moment.abs().max(1.0);
                    if !ok {
                        failures.push(format!("n={n} l={l}: diff {diff:e}"));
                    }
                    let _ = writeln!(csv, "{n},{l},{value:e},{moment:e},{diff:e},{ok}");
                }
                Err(e) => failures.push(format!("n={n} l={l}: {e}")),
            }
        }
    }
    Ok(csv)
}

fn bernstein_szego_csv(measure: &Measure, ns: &[usize], failures: &mut Vec<String>) -> Result<String, RunError> {
    let v = verblunsky_from_measure(measure, ns.last().expect("nonempty") + 1)?;
    let mut csv = String::from("# cdlab bernstein-szego v1\nn,k,bs_re,bs_im,mu_re,mu_im,diff,ok\n");
    for &n in ns {
        match bernstein_szego_moments(&v, n, n) {
            Ok(bs) => {
                for (k, b) in bs.iter().enumerate() {
                    let m = measure.moment(k);
                    let diff = (b - m).norm();
                    let ok = diff <= 1e-9;
                    if !ok {
                        failures.push(format!("n={n} k={k}: diff {diff:e}"));
                    }
                    let _ = writeln!(csv, "{n},{k},{:e},{:e},{:e},{:e},{diff:e},{ok}", b.re, b.im, m.re, m.im);
                }
            }
            Err(e) => failures.push(format!("n={n}: {e}")),
        }
    }
    Ok(csv)
}
