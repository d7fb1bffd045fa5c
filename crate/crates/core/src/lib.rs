//! Numerical machinery for inscribing concyclic quadrangles in plane curves and
//! for a Knaster-type problem on the sphere:
//!
//! * [`curve`]: closed Fourier curves with exact differential queries;
//! * [`quadrangle`]: concyclic quadruples and orientation-preserving similarities;
//! * [`variety`]: tracing the set of similar triangles inscribed in a curve;
//! * [`inscriber`]: the fourth-vertex sweep, area identities and inscription certificates;
//! * [`osculating`]: osculating circles and chords of prescribed angular measure;
//! * [`sphere`]: the even/odd construction on the sphere and the level-line invariant;
//! * [`io`]: JSON specs for curves and quadrangles.

// NaN must fail validation, so bounds are written as negated comparisons.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curve;
pub mod error;
pub mod inscriber;
pub mod io;
pub mod osculating;
pub mod polyline;
pub mod quadrangle;
pub mod sphere;
pub mod tolerance;
pub mod variety;

pub use nalgebra;
pub use num_complex::Complex64;

pub use curve::{ClosestPoint, CurvePoint, PlaneCurve};
pub use error::{Error, Result};
pub use inscriber::{inscribe, inscribe_detailed, AreaReport, InscribeConfig, Inscription, InscriptionReport};
pub use quadrangle::{Circumdata, Quadrangle, ShapeRatios, SimilarityMap};
pub use osculating::{ChordSearch, ChordSolution, OsculatingCircle};
pub use tolerance::Tolerances;
pub use variety::{CylinderPoint, TraceConfig, Variety, VarietyPath};
