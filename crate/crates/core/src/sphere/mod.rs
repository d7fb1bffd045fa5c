//! Even and odd fields on the unit sphere, the level-line invariant `C(f)`,
//! the construction `f = g + h^3`, and the rotation search on equator
//! quadruples.

pub mod chart;
pub mod construction;
pub mod field;
pub mod spread;

pub use chart::{c_invariant, chart_derivatives, classify, hessian_class, ChartDerivatives, Definiteness};
pub use construction::{
    build, build_f, build_g0, build_g_and_l, build_h, verify_obstruction, BuildReport, BumpSpec, CheckResult,
    Construction, ObstructionReport, OddCurve, SphereParams,
};
pub use field::{Expr, Jet2, Parity, Scalar1, SphereField};
pub use spread::{min_spread, quadruple, spread, SphereQuadruple, SpreadResult};
