//! Quick hand-checkable examples; `selftest` is the release gate.

use cdlab::approx::balayage_circle_moments;
use cdlab::harness::{random_measure, verify_circle, MeasureKind};
use cdlab::measures::{AtomicMeasure, Measure, MeasureSpec};
use cdlab::numerics::eigen::{symtridiag_eigen, TridiagonalSymmetric};
use cdlab::numerics::quadrature::{periodic_quadrature, realline_quadrature};
use cdlab::numerics::roots::{aberth_roots, newton_power_sums, ComplexPolynomial};
use cdlab::oprl::{jacobi_from_measure, kernel_ratio, JacobiData};
use cdlab::opuc::{monic_coefficients, verblunsky_from_measure};
use cdlab::{Complex64, Tolerances};

type Check = fn() -> Result<(), String>;

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn close(a: f64, b: f64, eps: f64) -> bool {
    (a - b).abs() <= eps
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

const CHECKS: &[(&str, Check)] = &[
    ("2x2 exchange matrix eigenpairs", || {
        let s = symtridiag_eigen(&TridiagonalSymmetric::new(vec![0.0, 0.0], vec![1.0]).map_err(err)?).map_err(err)?;
        ensure(
            close(s.eigenvalues[0], -1.0, 1e-14)
                && close(s.eigenvalues[1], 1.0, 1e-14)
                && s.first_component_sq.iter().all(|w| close(*w, 0.5, 1e-14)),
            || format!("{s:?}"),
        )
    }),
    ("1x1 eigenproblem", || {
        let s = symtridiag_eigen(&TridiagonalSymmetric::new(vec![0.3], vec![]).map_err(err)?).map_err(err)?;
        ensure(s.eigenvalues == [0.3] && s.first_component_sq == [1.0], || format!("{s:?}"))
    }),
    ("roots of z^2 + 1", || {
        let r = aberth_roots(&ComplexPolynomial::from_real(&[1.0, 0.0, 1.0]).map_err(err)?).map_err(err)?;
        let found = |z: Complex64| r.iter().any(|w| (w - z).norm() < 1e-12);
        ensure(found(c(0.0, 1.0)) && found(c(0.0, -1.0)), || format!("{r:?}"))
    }),
    ("triple root of z^3", || {
        let r = aberth_roots(&ComplexPolynomial::from_real(&[0.0, 0.0, 0.0, 1.0]).map_err(err)?).map_err(err)?;
        ensure(r.len() == 3 && r.iter().all(|z| z.norm() < 1e-12), || format!("{r:?}"))
    }),
    ("power sums of z^2 - 1", || {
        let s = newton_power_sums(&ComplexPolynomial::from_real(&[-1.0, 0.0, 1.0]).map_err(err)?, 2).map_err(err)?;
        ensure(s == [c(0.0, 0.0), c(2.0, 0.0)], || format!("{s:?}"))
    }),
    ("trapezoid mean of a constant", || {
        let v = periodic_quadrature(&[c(1.0, 0.0); 7]).map_err(err)?;
        ensure(close(v.re, 1.0, 1e-15) && v.im == 0.0, || format!("{v}"))
    }),
    ("Cauchy density over the real line", || {
        let v = realline_quadrature(|x| 1.0 / (std::f64::consts::PI * (1.0 + x * x)), 64, 1.0).map_err(err)?;
        ensure(close(v, 1.0, 1e-12), || format!("{v}"))
    }),
    ("Stieltjes on two atoms", || {
        let m = Measure::new(MeasureSpec::RealAtoms {
            nodes: vec![-1.0, 1.0],
            weights: vec![0.5, 0.5],
        })
        .map_err(err)?;
        let j = jacobi_from_measure(&m, 2).map_err(err)?;
        ensure(j.b() == [0.0, 0.0] && close(j.a()[0], 1.0, 1e-15), || format!("{j:?}"))
    }),
    ("Chebyshev recurrence coefficients", || {
        let m = Measure::new(MeasureSpec::chebyshev()).map_err(err)?;
        let j = jacobi_from_measure(&m, 6).map_err(err)?;
        let want = JacobiData::chebyshev(6);
        let ok = j.b().iter().all(|b| b.abs() < 1e-13)
            && j.a().iter().zip(want.a()).all(|(a, w)| close(*a, *w, 1e-13));
        ensure(ok, || format!("{j:?}"))
    }),
    ("arclength measure has p_n = z^n", || {
        let m = Measure::new(MeasureSpec::uniform_circle()).map_err(err)?;
        let v = verblunsky_from_measure(&m, 10).map_err(err)?;
        let coeffs = monic_coefficients(&v, 10).map_err(err)?;
        let ok = coeffs[..10].iter().all(|a| a.norm() < 1e-14) && (coeffs[10] - 1.0).norm() < 1e-14;
        ensure(ok, || format!("{coeffs:?}"))
    }),
    ("Christoffel ratio at k = 0", || {
        let r = kernel_ratio(&JacobiData::chebyshev(6), 2.5, 4, 0).map_err(err)?;
        ensure(r == 1.0, || format!("{r}"))
    }),
    ("arclength gaps vanish, k = 0 rows vanish", || {
        let r = verify_circle(&MeasureSpec::uniform_circle(), &[5, 10, 20], &[0, 1, 2, 3, 4], None, &Tolerances::default())
            .map_err(err)?;
        ensure(r.all_ok() && r.rows.iter().all(|r| r.gap < 1e-12), || format!("{:?}", r.rows))
    }),
    ("seeded fixtures are reproducible", || {
        let a = random_measure(MeasureKind::Circle, 16, 0).map_err(err)?;
        let b = random_measure(MeasureKind::Circle, 16, 0).map_err(err)?;
        ensure(a.to_json() == b.to_json(), || "specs differ".into())
    }),
    ("balayage of the origin", || {
        let m = AtomicMeasure::new(vec![c(0.0, 0.0)], vec![1.0]).map_err(err)?;
        let mom = balayage_circle_moments(&m, 2.0, 3).map_err(err)?;
        ensure(mom[0] == c(1.0, 0.0) && mom[1..].iter().all(|z| z.norm() == 0.0), || format!("{mom:?}"))
    }),
];

/// Runs every check, printing one line each; true when all pass.
pub fn run() -> bool {
    let mut ok = true;
    for (name, check) in CHECKS {
        match check() {
            Ok(()) => println!("ok    {name}"),
            Err(e) => {
                ok = false;
                println!("FAIL  {name}: {e}");
            }
        }
    }
    println!("{} checks, {}", CHECKS.len(), if ok { "all passed" } else { "failures" });
    ok
}
