//! Osculating circles of convex curves and chords whose endpoints lie on the
//! osculating circle at one of them, cutting an arc of prescribed angular
//! measure.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curve::N_CHECK;
use crate::{Error, PlaneCurve, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OsculatingCircle {
    pub center: Complex64,
    pub radius: f64,
    pub base_t: f64,
}

impl OsculatingCircle {
    /// Distance from `p` to the nearest point of the circle.
    pub fn distance(&self, p: Complex64) -> f64 {
        ((p - self.center).norm() - self.radius).abs()
    }

    pub fn point(&self, angle: f64) -> Complex64 {
        self.center + Complex64::from_polar(self.radius, angle)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChordSolution {
    pub a_t: f64,
    pub a: Complex64,
    pub b: Complex64,
    pub alpha: f64,
    /// `|signed distance|` of `b` to the curve.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChordSearch {
    pub solutions: Vec<ChordSolution>,
    /// `b(a)` lies on the curve for most `a`; `solutions` then samples the
    /// family.
    pub continuum: bool,
}

pub fn osculating_circle(curve: &PlaneCurve, t: f64) -> Result<OsculatingCircle> {
    let jet = curve.jet(t);
    let kappa = jet.curvature();
    if !(kappa > curve.tolerances().curvature) {
        return Err(Error::FlatPoint { t, kappa });
    }
    let unit = jet.d1 / jet.d1.norm();
    let radius = 1.0 / kappa;
    Ok(OsculatingCircle { center: jet.z + Complex64::i() * unit * radius, radius, base_t: t })
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < TAU {
        Ok(())
    } else {
        Err(Error::Input(format!("angular measure {alpha} is outside (0, 2pi)")))
    }
}

/// The point of the osculating circle at `f(t)` reached by turning `f(t)`
/// counter-clockwise by `alpha` about the center.
pub fn b_of_a(curve: &PlaneCurve, t: f64, alpha: f64) -> Result<Complex64> {
    check_alpha(alpha)?;
    let circle = osculating_circle(curve, t)?;
    let a = curve.eval(t);
    Ok(circle.center + Complex64::cis(alpha) * (a - circle.center))
}

fn check_convex(curve: &PlaneCurve) -> Result<()> {
    let tol = curve.tolerances().curvature;
    for j in 0..N_CHECK {
        let t = j as f64 / N_CHECK as f64;
        let kappa = curve.jet(t).curvature();
        if !(kappa > tol) {
            return Err(Error::NotConvex { t, kappa });
        }
    }
    Ok(())
}

fn chord_at(curve: &PlaneCurve, t: f64, alpha: f64) -> Result<ChordSolution> {
    let b = b_of_a(curve, t, alpha)?;
    Ok(ChordSolution {
        a_t: t.rem_euclid(1.0),
        a: curve.eval(t),
        b,
        alpha,
        residual: curve.signed_distance_raw(b).0.abs(),
    })
}

/// All `a = f(t)` for which `b(a)` lies on the curve, located by sign changes
/// of the signed distance of `b(a)` and refined by bisection.
pub fn find_chords(curve: &PlaneCurve, alpha: f64) -> Result<ChordSearch> {
    check_alpha(alpha)?;
    check_convex(curve)?;
    let tol = curve.tolerances().report;
    let n = N_CHECK;
    let phi = |t: f64| -> Result<f64> { Ok(curve.signed_distance_raw(b_of_a(curve, t, alpha)?).0) };
    let values = (0..n).map(|j| phi(j as f64 / n as f64)).collect::<Result<Vec<f64>>>()?;

    let on = values.iter().filter(|v| v.abs() <= tol).count();
    if 2 * on > n {
        let solutions = (0..8)
            .map(|j| chord_at(curve, j as f64 / 8.0, alpha))
            .collect::<Result<Vec<_>>>()?;
        return Ok(ChordSearch { solutions, continuum: true });
    }

    let mut roots = Vec::new();
    for j in 0..n {
        let (v0, v1) = (values[j], values[(j + 1) % n]);
        let (mut lo, mut hi) = (j as f64 / n as f64, (j + 1) as f64 / n as f64);
        if v0 == 0.0 {
            roots.push(lo);
            continue;
        }
        if v0 * v1 >= 0.0 {
            continue;
        }
        let mut best = (v0.abs(), lo);
        while hi - lo > 1e-14 {
            let mid = 0.5 * (lo + hi);
            let v = phi(mid)?;
            if v.abs() < best.0 {
                best = (v.abs(), mid);
            }
            if v == 0.0 {
                break;
            }
            if (v > 0.0) == (v0 > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push(best.1);
    }
    let solutions = roots
        .into_iter()
        .map(|t| chord_at(curve, t, alpha))
        .collect::<Result<Vec<_>>>()?;
    Ok(ChordSearch { solutions, continuum: false })
}

/// `d kappa / dt` from the analytic third derivative.
pub fn curvature_derivative(curve: &PlaneCurve, t: f64) -> f64 {
    let jet = curve.jet(t);
    let d3 = curve.derivative(t, 3);
    let speed2 = jet.d1.norm_sqr();
    let speed = speed2.sqrt();
    let cross = (jet.d1.conj() * jet.d2).im;
    let dot = (jet.d1.conj() * jet.d2).re;
    (jet.d1.conj() * d3).im / (speed2 * speed) - 3.0 * cross * dot / (speed2 * speed2 * speed)
}

/// Parameters of the local extrema of curvature.
pub fn vertex_points(curve: &PlaneCurve) -> Result<Vec<f64>> {
    check_convex(curve)?;
    let n = N_CHECK;
    let dk: Vec<f64> = (0..n).map(|j| curvature_derivative(curve, j as f64 / n as f64)).collect();
    let scale = (0..n)
        .map(|j| curve.jet(j as f64 / n as f64).curvature())
        .fold(0.0, f64::max);
    if dk.iter().all(|v| v.abs() <= 1e-9 * scale) {
        return Err(Error::DegenerateAllOn);
    }
    let mut out: Vec<f64> = Vec::new();
    for j in 0..n {
        let (v0, v1) = (dk[j], dk[(j + 1) % n]);
        let (mut lo, mut hi) = (j as f64 / n as f64, (j + 1) as f64 / n as f64);
        if v0 == 0.0 {
            out.push(lo);
            continue;
        }
        if v0 * v1 >= 0.0 {
            continue;
        }
        while hi - lo > 1e-15 {
            let mid = 0.5 * (lo + hi);
            let v = curvature_derivative(curve, mid);
            if v == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if (v > 0.0) == (v0 > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push((0.5 * (lo + hi)).rem_euclid(1.0));
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-7);
    if out.len() > 1 && out[0] + 1.0 - out[out.len() - 1] < 1e-7 {
        out.pop();
    }
    Ok(out)
}

/// Extremes of the signed distance from 256 points of the circle to the
/// curve: `(min, max)`. A circle inside the curve has `max <= 0` up to the
/// tangency.
pub fn containment(curve: &PlaneCurve, circle: &OsculatingCircle) -> (f64, f64) {
    let base = (curve.eval(circle.base_t) - circle.center).arg();
    (0..256)
        .map(|j| curve.signed_distance_raw(circle.point(base + TAU * j as f64 / 256.0)).0)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Observed order of contact between the curve and its osculating circle at
/// `t`, from the distances at `h = 1e-2, 5e-3, 2.5e-3`. The smaller of the two
/// successive ratio estimates is returned; exact contact gives infinity.
pub fn contact_order(curve: &PlaneCurve, t: f64) -> Result<f64> {
    let circle = osculating_circle(curve, t)?;
    let e: Vec<f64> = [1e-2, 5e-3, 2.5e-3]
        .iter()
        .map(|h| circle.distance(curve.eval(t + h)).max(circle.distance(curve.eval(t - h))))
        .collect();
    if e.iter().any(|v| *v <= 1e-15 * circle.radius) {
        return Ok(f64::INFINITY);
    }
    let o1 = (e[0] / e[1]).log2();
    let o2 = (e[1] / e[2]).log2();
    Ok(o1.min(o2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ellipse() -> PlaneCurve {
        PlaneCurve::ellipse(2.0, 1.0).unwrap()
    }

    #[test]
    fn circle_osculates_itself() {
        for r in [1.0, 2.5] {
            let curve = PlaneCurve::circle(r).unwrap();
            for t in [0.0, 0.3, 0.71] {
                let o = osculating_circle(&curve, t).unwrap();
                assert!(o.center.norm() < 1e-13);
                assert!((o.radius - r).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn ellipse_osculating_at_major_vertex() {
        let o = osculating_circle(&ellipse(), 0.0).unwrap();
        assert!((o.radius - 0.5).abs() < 1e-13);
        assert!((o.center - c(1.5, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn flat_point_rejected() {
        // Limacon-like curve with an inflection.
        let curve = PlaneCurve::fourier(vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.4, 0.0)]).unwrap();
        let flat = (0..2000)
            .map(|j| j as f64 / 2000.0)
            .find(|t| curve.jet(*t).curvature() <= 0.0)
            .unwrap();
        assert!(matches!(osculating_circle(&curve, flat), Err(Error::FlatPoint { .. })));
        assert!(matches!(find_chords(&curve, 1.0), Err(Error::NotConvex { .. })));
    }

    #[test]
    fn b_of_a_examples() {
        let circle = PlaneCurve::circle(1.0).unwrap();
        assert!((b_of_a(&circle, 0.0, PI / 2.0).unwrap() - c(0.0, 1.0)).norm() < 1e-14);
        assert!((b_of_a(&ellipse(), 0.0, PI).unwrap() - c(1.0, 0.0)).norm() < 1e-13);
        let a = ellipse().eval(0.2);
        assert!((b_of_a(&ellipse(), 0.2, 1e-6).unwrap() - a).norm() < 1e-5);
        assert!(b_of_a(&circle, 0.0, 0.0).is_err());
        assert!(b_of_a(&circle, 0.0, TAU).is_err());
    }

    #[test]
    fn circle_chords_are_a_continuum() {
        let s = find_chords(&PlaneCurve::circle(1.0).unwrap(), 1.0).unwrap();
        assert!(s.continuum);
        assert!(s.solutions.iter().all(|x| x.residual < 1e-12));
    }

    #[test]
    fn ellipse_chords() {
        for alpha in [PI / 2.0, PI, 1.5 * PI] {
            let s = find_chords(&ellipse(), alpha).unwrap();
            assert!(!s.continuum);
            assert!(s.solutions.len() >= 4, "{alpha}: {}", s.solutions.len());
            for x in &s.solutions {
                assert!(x.residual <= 1e-8);
                let o = osculating_circle(&ellipse(), x.a_t).unwrap();
                assert!(((x.b - o.center).norm() - o.radius).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn half_turn_chords_come_in_mirror_pairs() {
        let s = find_chords(&ellipse(), PI).unwrap();
        for x in &s.solutions {
            let mirror = c(x.a.re, -x.a.im);
            assert!(s.solutions.iter().any(|y| (y.a - mirror).norm() < 1e-8), "{:?}", x.a);
        }
    }

    #[test]
    fn ellipse_vertices() {
        let v = vertex_points(&ellipse()).unwrap();
        assert_eq!(v.len(), 4, "{v:?}");
        for (got, want) in v.iter().zip([0.0, 0.25, 0.5, 0.75]) {
            assert!((got - want).abs() < 1e-9, "{got} {want}");
        }
        assert!(matches!(vertex_points(&PlaneCurve::circle(1.0).unwrap()), Err(Error::DegenerateAllOn)));
    }

    #[test]
    fn extremal_osculating_circles_nest() {
        let e = ellipse();
        let tol = e.tolerances().report;
        let inner = osculating_circle(&e, 0.0).unwrap();
        assert!(containment(&e, &inner).1 <= tol);
        let outer = osculating_circle(&e, 0.25).unwrap();
        assert!(containment(&e, &outer).0 >= -tol);
    }

    #[test]
    fn contact_order_is_three() {
        let e = ellipse();
        for t in [0.05, 0.13, 0.4, 0.66] {
            let o = contact_order(&e, t).unwrap();
            assert!((2.7..3.5).contains(&o), "{t}: {o}");
        }
    }

    #[test]
    fn curvature_derivative_matches_differences() {
        let e = ellipse();
        let h = 1e-5;
        for t in [0.1, 0.37, 0.8] {
            let fd = (e.jet(t + h).curvature() - e.jet(t - h).curvature()) / (2.0 * h);
            assert!((curvature_derivative(&e, t) - fd).abs() < 1e-6 * (1.0 + fd.abs()));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]

        #[test]
        fn chords_invariant_under_parameter_shift(shift in 0.0f64..1.0, alpha in 0.3f64..6.0) {
            let e = ellipse();
            let base = find_chords(&e, alpha).unwrap();
            let moved = find_chords(&e.shifted(shift), alpha).unwrap();
            prop_assert_eq!(base.solutions.len(), moved.solutions.len());
            for x in &moved.solutions {
                prop_assert!(base.solutions.iter().any(|y| (y.a - x.a).norm() < 1e-8 && (y.b - x.b).norm() < 1e-8));
            }
        }
    }
}
