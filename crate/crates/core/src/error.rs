use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("tangent vanishes at t = {t} (|f'| = {speed:.3e})")]
    DegenerateTangent { t: f64, speed: f64 },

    #[error("point lies on the curve (distance {distance:.3e})")]
    PointOnCurve { distance: f64 },

    #[error("perturbation of magnitude {magnitude:.3e} broke the curve: {reason}")]
    PerturbationBreaksSimplicity { magnitude: f64, reason: String },

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("base points coincide (|b - a| = {0:.3e})")]
    DegenerateBase(f64),

    #[error("points are collinear (twice the triangle area = {0:.3e})")]
    CollinearPoints(f64),

    #[error("quadrangle is not concyclic: cross-ratio defect {defect:.3e} exceeds {tolerance:.1e}")]
    NotConcyclic { defect: f64, tolerance: f64 },

    #[error("invalid quadrangle: {0}")]
    InvalidQuadrangle(String),

    #[error("residual scan found no sign change on a {grid_t}x{grid_s} grid")]
    NoSeedsFound { grid_t: usize, grid_s: usize },

    #[error("singular point of the variety at (t, s) = ({t}, {s}), |grad F| = {gradient:.3e}")]
    SingularPoint { t: f64, s: f64, gradient: f64 },

    #[error("adaptive step collapsed below {step_min:.1e} near (t, s) = ({t}, {s})")]
    StepCollapse { t: f64, s: f64, step_min: f64 },

    #[error("trace left the open strip 0 < s < 1 at (t, s) = ({t}, {s})")]
    LeftDomain { t: f64, s: f64 },

    #[error("trace did not close after {steps} steps")]
    NoClosure { steps: usize },

    #[error("path is not periodic (period shift {0})")]
    NotPeriodic(i64),

    #[error("no generic vertical slice found after {retries} shifts")]
    NonGenericSlice { retries: usize },

    #[error("neither alternative certified: {0}")]
    TheoremViolation(String),

    #[error("curvature {kappa:.3e} at t = {t} is below the flat-point threshold")]
    FlatPoint { t: f64, kappa: f64 },

    #[error("curve is not strictly convex: curvature {kappa:.3e} at t = {t}")]
    NotConvex { t: f64, kappa: f64 },

    #[error("curvature is constant along the curve")]
    DegenerateAllOn,

    #[error("g0 coefficients must satisfy A > B > D > 0 (got A={a}, B={b}, D={d})")]
    BadOrdering { a: f64, b: f64, d: f64 },

    #[error("bump profile failed its convexity pattern: {0}")]
    ConvexityPatternFailed(String),

    #[error("zero set of h misses L: {0}")]
    ZeroSetMismatch(String),

    #[error("geodesic distance {0} is outside (0, pi/2]")]
    BadDistance(f64),

    #[error("matrix is not a proper rotation (defect {0:.3e})")]
    NotARotation(f64),

    #[error("invalid input: {0}")]
    Input(String),
}

impl Error {
    /// Errors caused by malformed or invariant-violating inputs, as opposed to
    /// numerical failures inside a pipeline.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidCurve(_)
                | Error::DegenerateBase(_)
                | Error::CollinearPoints(_)
                | Error::NotConcyclic { .. }
                | Error::InvalidQuadrangle(_)
                | Error::BadOrdering { .. }
                | Error::BadDistance(_)
                | Error::NotARotation(_)
                | Error::NotConvex { .. }
                | Error::Input(_)
        )
    }
}
