use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid measure specification: {0}")]
    InvalidMeasure(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("eigensolver did not converge for eigenvalue {index} after {iterations} iterations")]
    EigenNoConvergence { index: usize, iterations: usize },

    #[error("root finder stopped after {sweeps} sweeps with residual {residual:e}")]
    RootsNoConvergence {
        best: Vec<Complex64>,
        residual: f64,
        sweeps: usize,
    },

    #[error("non-finite integrand value at node x = {node}")]
    NonFiniteIntegrand { node: f64 },

    #[error("integrand of degree {degree} is not integrable against rho_{n} (at most {max})")]
    IntegrandGrowth { degree: usize, n: usize, max: usize },

    #[error("argument jump at sample {index} is not below pi; refine the grid")]
    GridTooCoarse { index: usize },

    #[error("phase refinement cap exceeded near t = {at}")]
    RefinementCap { at: f64 },

    #[error("degree {requested} requires more than the {available} distinct atoms of the measure")]
    TooFewAtoms { requested: usize, available: usize },

    #[error("recurrence coefficient a_{index} lost positivity (value {value:e})")]
    LostPositivity { index: usize, value: f64 },

    #[error("Verblunsky coefficient alpha_{index} has modulus {modulus} (must be < 1)")]
    VerblunskyOutOfDisk { index: usize, modulus: f64 },

    #[error("zero {index} of p_{degree} has modulus {modulus} >= 1")]
    ZeroOutsideDisk {
        index: usize,
        degree: usize,
        modulus: f64,
    },

    #[error("atom {index} at radius {radius} is not strictly inside the circle of radius {circle}")]
    OutsideCircle {
        index: usize,
        radius: f64,
        circle: f64,
    },

    #[error("{count} atoms of mu_(n+1, lambda) lie outside the window at lambda = {lambda}")]
    OutlierCount { count: usize, lambda: f64 },

    #[error("{what} did not converge: last change {change:e} at {nodes} nodes")]
    QuadratureNoConvergence {
        what: &'static str,
        nodes: usize,
        change: f64,
    },

    #[error("cross-check failed for {what}: discrepancy {discrepancy:e} exceeds {tolerance:e}")]
    CrossCheck {
        what: &'static str,
        discrepancy: f64,
        tolerance: f64,
    },

    #[error("phase winding {found} differs from expected {expected}")]
    Winding { found: f64, expected: f64 },

    #[error("eigenvalue failure at lambda = {lambda}: {source}")]
    AtLambda {
        lambda: f64,
        #[source]
        source: Box<Error>,
    },
}
