//! Local charts of the sphere and the level-line combination
//! `C = F_ss F_t^2 - 2 F_st F_s F_t + F_tt F_s^2` at a chart point.

use nalgebra::{Matrix2, Vector3};
use serde::{Deserialize, Serialize};

use super::field::{Jet2, SphereField};

/// A chart map `p(s, t)` at one point with its first and second partials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    pub p: Vector3<f64>,
    pub p_s: Vector3<f64>,
    pub p_t: Vector3<f64>,
    pub p_ss: Vector3<f64>,
    pub p_st: Vector3<f64>,
    pub p_tt: Vector3<f64>,
}

/// Chart derivatives of a field and the resulting `C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartDerivatives {
    pub f_s: f64,
    pub f_t: f64,
    pub f_ss: f64,
    pub f_st: f64,
    pub f_tt: f64,
    pub c: f64,
}

impl ChartDerivatives {
    pub fn from_jet(j: &Jet2, cp: &ChartPoint) -> Self {
        let f_s = j.g.dot(&cp.p_s);
        let f_t = j.g.dot(&cp.p_t);
        let f_ss = cp.p_s.dot(&(j.h * cp.p_s)) + j.g.dot(&cp.p_ss);
        let f_st = cp.p_s.dot(&(j.h * cp.p_t)) + j.g.dot(&cp.p_st);
        let f_tt = cp.p_t.dot(&(j.h * cp.p_t)) + j.g.dot(&cp.p_tt);
        let c = f_ss * f_t * f_t - 2.0 * f_st * f_s * f_t + f_tt * f_s * f_s;
        Self { f_s, f_t, f_ss, f_st, f_tt, c }
    }

    pub fn gradient_norm(&self) -> f64 {
        self.f_s.hypot(self.f_t)
    }

    pub fn hessian(&self) -> Matrix2<f64> {
        Matrix2::new(self.f_ss, self.f_st, self.f_st, self.f_tt)
    }
}

/// Orthonormal tangent frame at `y`: `e_s` is the Gram-Schmidt projection
/// of the coordinate axis along which `y` has its smallest component.
pub fn tangent_frame(y: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let mut axis = 0;
    for i in 1..3 {
        if y[i].abs() < y[axis].abs() {
            axis = i;
        }
    }
    let mut e = Vector3::zeros();
    e[axis] = 1.0;
    let e_s = (e - y * y.dot(&e)).normalize();
    let e_t = y.cross(&e_s);
    (e_s, e_t)
}

/// The projected chart `p(s, t) = normalize(y + s e_s + t e_t)` at its origin.
pub fn projected_chart(y: &Vector3<f64>) -> ChartPoint {
    let (e_s, e_t) = tangent_frame(y);
    ChartPoint { p: *y, p_s: e_s, p_t: e_t, p_ss: -y, p_st: Vector3::zeros(), p_tt: -y }
}

/// Chart derivatives of `field` at the unit vector `y` in the projected chart.
pub fn chart_derivatives(field: &SphereField, y: &Vector3<f64>) -> ChartDerivatives {
    let y = y.normalize();
    ChartDerivatives::from_jet(&field.jet(&y), &projected_chart(&y))
}

/// `C(field)` at `y`.
pub fn c_invariant(field: &SphereField, y: &Vector3<f64>) -> f64 {
    chart_derivatives(field, y).c
}

/// The graph chart `(s, t) -> (s, sign * sqrt(1 - s^2 - (t / lambda)^2), t / lambda)`
/// around `(0, sign, 0)`.
pub fn graph_chart(s: f64, t: f64, lambda: f64, sign: f64) -> ChartPoint {
    let u = t / lambda;
    let y = (1.0 - s * s - u * u).sqrt();
    let y3 = y * y * y;
    let ys = -s / y;
    let yt = -u / (lambda * y);
    let yss = -1.0 / y - s * s / y3;
    let ytt = -1.0 / (lambda * lambda * y) - u * u / (lambda * lambda * y3);
    let yst = -s * u / (lambda * y3);
    let v = |a: f64, b: f64, c: f64| Vector3::new(a, sign * b, c);
    ChartPoint {
        p: v(s, y, u),
        p_s: v(1.0, ys, 0.0),
        p_t: v(0.0, yt, 1.0 / lambda),
        p_ss: v(0.0, yss, 0.0),
        p_st: v(0.0, yst, 0.0),
        p_tt: v(0.0, ytt, 0.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Definiteness {
    PositiveDefinite,
    NegativeDefinite,
    Indefinite,
    Degenerate,
}

impl Definiteness {
    pub fn is_definite(&self) -> bool {
        matches!(self, Definiteness::PositiveDefinite | Definiteness::NegativeDefinite)
    }
}

/// Sign pattern of the eigenvalues of a symmetric 2x2 matrix; eigenvalues
/// within `tol` of zero count as degenerate.
pub fn classify(h: &Matrix2<f64>, tol: f64) -> Definiteness {
    let eig = h.symmetric_eigenvalues();
    let (lo, hi) = (eig[0].min(eig[1]), eig[0].max(eig[1]));
    if lo.abs() <= tol || hi.abs() <= tol {
        Definiteness::Degenerate
    } else if lo > 0.0 {
        Definiteness::PositiveDefinite
    } else if hi < 0.0 {
        Definiteness::NegativeDefinite
    } else {
        Definiteness::Indefinite
    }
}

/// Chart Hessian of `field` at `y` and its classification.
pub fn hessian_class(field: &SphereField, y: &Vector3<f64>) -> (Matrix2<f64>, Definiteness) {
    let d = chart_derivatives(field, y);
    let h = d.hessian();
    (h, classify(&h, 1e-12 * (1.0 + h.norm())))
}
