//! Closed plane curves as truncated complex Fourier series of period 1.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::polyline;
use crate::{Error, Result, Tolerances};

/// Sample count used by the immersion and simplicity checks.
pub const N_CHECK: usize = 2048;
/// Minimum number of coarse seeds used by [`PlaneCurve::closest_point`].
pub const N_SEED: usize = 64;

/// A smooth closed curve `f(t) = sum c_k exp(2 pi i k t)`, `k = -K..=K`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneCurve {
    coeffs: Vec<Complex64>,
    name: Option<String>,
    tol: Tolerances,
    seeds: Vec<Complex64>,
    orientation: f64,
}

/// Position and first two derivatives at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveJet {
    pub z: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
}

impl CurveJet {
    pub fn curvature(&self) -> f64 {
        (self.d1.conj() * self.d2).im / self.d1.norm().powi(3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t: f64,
    pub z: Complex64,
    pub tangent: Complex64,
    pub curvature: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosestPoint {
    /// Foot parameter in `[0, 1)`.
    pub t: f64,
    pub z: Complex64,
    pub dist: f64,
}

impl PlaneCurve {
    /// Builds a curve from `c_{-K}..=c_K`. The slice length must be odd and
    /// at least 3.
    pub fn fourier(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() < 3 || coeffs.len().is_multiple_of(2) {
            return Err(Error::InvalidCurve(format!(
                "expected an odd number (>= 3) of Fourier coefficients, got {}",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::InvalidCurve("non-finite Fourier coefficient".into()));
        }
        Ok(Self::from_coeffs_unchecked(coeffs))
    }

    fn from_coeffs_unchecked(coeffs: Vec<Complex64>) -> Self {
        let mut curve = Self {
            coeffs,
            name: None,
            tol: Tolerances::default(),
            seeds: Vec::new(),
            orientation: 1.0,
        };
        let n_seed = N_SEED.max(16 * curve.coeffs.len());
        curve.seeds = (0..n_seed).map(|j| curve.eval(j as f64 / n_seed as f64)).collect();
        curve.orientation = if curve.signed_area() < 0.0 { -1.0 } else { 1.0 };
        curve
    }

    /// Counter-clockwise circle of radius `r` centred at the origin.
    pub fn circle(r: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidCurve(format!("circle radius must be positive, got {r}")));
        }
        let zero = Complex64::new(0.0, 0.0);
        Ok(Self::from_coeffs_unchecked(vec![zero, zero, Complex64::new(r, 0.0)])
            .named("circle"))
    }

    /// Counter-clockwise ellipse `x = a cos(2 pi t)`, `y = b sin(2 pi t)`.
    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0) {
            return Err(Error::InvalidCurve(format!("ellipse semi-axes must be positive, got {a}, {b}")));
        }
        Ok(Self::from_coeffs_unchecked(vec![
            Complex64::new(0.5 * (a - b), 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.5 * (a + b), 0.0),
        ])
        .named("ellipse"))
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// Truncation degree `K`.
    pub fn degree(&self) -> usize {
        (self.coeffs.len() - 1) / 2
    }

    /// Coefficients `c_{-K}..=c_K`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        let kk = self.degree() as i64;
        if k.abs() > kk {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + kk) as usize]
        }
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.sum_with(t, |_| Complex64::new(1.0, 0.0))
    }

    /// Termwise derivative of the given order.
    pub fn derivative(&self, t: f64, order: u32) -> Complex64 {
        self.sum_with(t, |k| Complex64::new(0.0, TAU * k as f64).powu(order))
    }

    fn sum_with(&self, t: f64, weight: impl Fn(i64) -> Complex64) -> Complex64 {
        let kk = self.degree() as i64;
        let w = Complex64::cis(TAU * t.rem_euclid(1.0));
        let mut pos = Complex64::new(1.0, 0.0);
        let mut acc = self.coeffs[kk as usize] * weight(0);
        for k in 1..=kk {
            pos *= w;
            acc += self.coeffs[(kk + k) as usize] * weight(k) * pos;
            acc += self.coeffs[(kk - k) as usize] * weight(-k) * pos.conj();
        }
        acc
    }

    /// Position, first and second derivative in one pass.
    pub fn jet(&self, t: f64) -> CurveJet {
        let kk = self.degree() as i64;
        let w = Complex64::cis(TAU * t.rem_euclid(1.0));
        let mut pos = Complex64::new(1.0, 0.0);
        let c0 = self.coeffs[kk as usize];
        let (mut z, mut d1, mut d2) = (c0, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for k in 1..=kk {
            pos *= w;
            let om = TAU * k as f64;
            let plus = self.coeffs[(kk + k) as usize] * pos;
            let minus = self.coeffs[(kk - k) as usize] * pos.conj();
            z += plus + minus;
            d1 += Complex64::new(0.0, om) * (plus - minus);
            d2 -= (plus + minus) * (om * om);
        }
        CurveJet { z, d1, d2 }
    }

    pub fn point(&self, t: f64) -> Result<CurvePoint> {
        let j = self.jet(t);
        let speed = j.d1.norm();
        if speed < self.tol.tangent {
            return Err(Error::DegenerateTangent { t, speed });
        }
        Ok(CurvePoint { t, z: j.z, tangent: j.d1, curvature: j.curvature() })
    }

    /// Signed curvature `Im(conj(f') f'') / |f'|^3`.
    pub fn curvature(&self, t: f64) -> Result<f64> {
        self.point(t).map(|p| p.curvature)
    }

    /// Green's-theorem area `(i/2) \oint f d(conj f) = pi sum k |c_k|^2`.
    pub fn signed_area(&self) -> f64 {
        let kk = self.degree() as i64;
        PI * (-kk..=kk).map(|k| k as f64 * self.coeff(k).norm_sqr()).sum::<f64>()
    }

    pub fn is_ccw(&self) -> bool {
        self.orientation > 0.0
    }

    /// Same trace with reversed orientation, `t -> -t`.
    pub fn reversed(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        self.rebuilt(coeffs)
    }

    /// Canonical counter-clockwise representative.
    pub fn to_ccw(&self) -> Self {
        if self.is_ccw() {
            self.clone()
        } else {
            self.reversed()
        }
    }

    /// Reparameterization `t -> t + c`.
    pub fn shifted(&self, c: f64) -> Self {
        let kk = self.degree() as i64;
        let coeffs = (-kk..=kk)
            .map(|k| self.coeff(k) * Complex64::cis(TAU * k as f64 * c))
            .collect();
        self.rebuilt(coeffs)
    }

    /// Image under `z -> alpha z + beta`.
    pub fn transformed(&self, alpha: Complex64, beta: Complex64) -> Self {
        let kk = self.degree() as i64;
        let coeffs = (-kk..=kk)
            .map(|k| {
                let c = self.coeff(k) * alpha;
                if k == 0 {
                    c + beta
                } else {
                    c
                }
            })
            .collect();
        self.rebuilt(coeffs)
    }

    fn rebuilt(&self, coeffs: Vec<Complex64>) -> Self {
        let mut out = Self::from_coeffs_unchecked(coeffs);
        out.name = self.name.clone();
        out.tol = self.tol;
        out
    }

    pub fn samples(&self, n: usize) -> Vec<Complex64> {
        (0..n).map(|j| self.eval(j as f64 / n as f64)).collect()
    }

    /// Upper bound on `sup |f'|`.
    pub fn speed_bound(&self) -> f64 {
        let kk = self.degree() as i64;
        (-kk..=kk).map(|k| TAU * k.abs() as f64 * self.coeff(k).norm()).sum()
    }

    /// Sampled immersion and simplicity checks at `n_check` points.
    pub fn validate(&self, n_check: usize) -> Result<()> {
        for j in 0..n_check {
            let t = j as f64 / n_check as f64;
            let speed = self.derivative(t, 1).norm();
            if speed <= self.tol.tangent {
                return Err(Error::InvalidCurve(format!(
                    "not immersed: |f'({t})| = {speed:.3e}"
                )));
            }
        }
        let pts = self.samples(n_check);
        if let Some(x) = polyline::self_intersections(&pts, true).first() {
            return Err(Error::InvalidCurve(format!(
                "self-intersection near {:.6}{:+.6}i (segments {} and {})",
                x.point.re, x.point.im, x.i, x.j
            )));
        }
        Ok(())
    }

    /// Integer winding number of `f(t) - p`.
    pub fn winding_number(&self, p: Complex64) -> Result<i64> {
        let cp = self.closest_point(p);
        if cp.dist <= self.tol.on_curve {
            return Err(Error::PointOnCurve { distance: cp.dist });
        }
        Ok(self.winding_unchecked(p))
    }

    fn winding_unchecked(&self, p: Complex64) -> i64 {
        let n = N_CHECK;
        let mut total = 0.0;
        let mut prev = self.eval(0.0) - p;
        for j in 1..=n {
            let t1 = j as f64 / n as f64;
            let cur = self.eval(t1) - p;
            total += self.arg_increment(p, (j - 1) as f64 / n as f64, t1, prev, cur, 0);
            prev = cur;
        }
        (total / TAU).round() as i64
    }

    fn arg_increment(
        &self,
        p: Complex64,
        t0: f64,
        t1: f64,
        v0: Complex64,
        v1: Complex64,
        depth: u32,
    ) -> f64 {
        let d = (v1 * v0.conj()).arg();
        if d.abs() < PI / 4.0 || depth >= 24 {
            return d;
        }
        let tm = 0.5 * (t0 + t1);
        let vm = self.eval(tm) - p;
        self.arg_increment(p, t0, tm, v0, vm, depth + 1)
            + self.arg_increment(p, tm, t1, vm, v1, depth + 1)
    }

    /// Global nearest point: coarse seeds followed by safeguarded Newton on
    /// `Re((f(t) - p) conj(f'(t))) = 0`. Ties resolve to the smallest `t`.
    pub fn closest_point(&self, p: Complex64) -> ClosestPoint {
        let n = self.seeds.len();
        let dt = 1.0 / n as f64;
        let d2: Vec<f64> = self.seeds.iter().map(|z| (z - p).norm_sqr()).collect();
        let best_sample = d2.iter().cloned().fold(f64::INFINITY, f64::min).sqrt();
        let slack = self.speed_bound() * dt;

        let mut best: Option<ClosestPoint> = None;
        for j in 0..n {
            let here = d2[j];
            if here > d2[(j + n - 1) % n] || here > d2[(j + 1) % n] {
                continue;
            }
            if here.sqrt() - slack > best_sample {
                continue;
            }
            let t0 = j as f64 * dt;
            let t = self.refine_foot(p, t0 - dt, t0 + dt, t0);
            let z = self.eval(t);
            let cand = ClosestPoint { t: t.rem_euclid(1.0), z, dist: (z - p).norm() };
            best = Some(match best {
                None => cand,
                Some(b) => {
                    let scale = 1e-12 * (1.0 + b.dist);
                    if cand.dist < b.dist - scale
                        || ((cand.dist - b.dist).abs() <= scale && cand.t < b.t)
                    {
                        cand
                    } else {
                        b
                    }
                }
            });
        }
        best.unwrap_or_else(|| {
            let z = self.eval(0.0);
            ClosestPoint { t: 0.0, z, dist: (z - p).norm() }
        })
    }

    fn refine_foot(&self, p: Complex64, mut lo: f64, mut hi: f64, start: f64) -> f64 {
        let g = |t: f64| {
            let j = self.jet(t);
            let w = j.z - p;
            ((w * j.d1.conj()).re, j.d1.norm_sqr() + (w * j.d2.conj()).re)
        };
        let (glo, _) = g(lo);
        let (ghi, _) = g(hi);
        let bracketed = glo < 0.0 && ghi > 0.0;
        let mut t = start;
        for _ in 0..60 {
            let (gv, gd) = g(t);
            if gv == 0.0 {
                break;
            }
            if bracketed {
                if gv < 0.0 {
                    lo = t;
                } else {
                    hi = t;
                }
            }
            let mut next = if gd > 0.0 { t - gv / gd } else { f64::NAN };
            if bracketed {
                if !(next > lo && next < hi) {
                    next = 0.5 * (lo + hi);
                }
            } else if !next.is_finite() || (next - start).abs() > (hi - lo) {
                break;
            }
            let step = (next - t).abs();
            t = next;
            if step < 1e-15 || (bracketed && hi - lo < 1e-15) {
                break;
            }
        }
        let d = |t: f64| (self.eval(t) - p).norm_sqr();
        if d(t) <= d(start) {
            t
        } else {
            start
        }
    }

    /// Signed distance without the on-curve clamp: negative inside.
    pub fn signed_distance_raw(&self, p: Complex64) -> (f64, ClosestPoint) {
        let cp = self.closest_point(p);
        if cp.dist == 0.0 {
            return (0.0, cp);
        }
        let d1 = self.derivative(cp.t, 1);
        let off = p - cp.z;
        let cross = (d1.conj() * off).im;
        let along = (d1.conj() * off).re;
        let inside = if along.abs() <= (1e-6 * d1.norm() * cp.dist).max(0.5 * cross.abs()) {
            cross * self.orientation > 0.0
        } else {
            self.winding_unchecked(p) != 0
        };
        (if inside { -cp.dist } else { cp.dist }, cp)
    }

    /// Distance to the curve, negative inside and zero within the on-curve
    /// tolerance.
    pub fn signed_distance(&self, p: Complex64) -> f64 {
        let (d, _) = self.signed_distance_raw(p);
        if d.abs() <= self.tol.on_curve {
            0.0
        } else {
            d
        }
    }

    /// Random Fourier perturbation with `|dc_k| <= magnitude / (1 + k^2)`
    /// for `|k| <= K + 2`, drawn deterministically from `seed`.
    pub fn perturb(&self, magnitude: f64, seed: u64) -> Result<Self> {
        if magnitude == 0.0 {
            return Ok(self.clone());
        }
        if !(magnitude.is_finite() && magnitude > 0.0) {
            return Err(Error::Input(format!("perturbation magnitude must be positive, got {magnitude}")));
        }
        let kk = self.degree() as i64 + 2;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs: Vec<Complex64> = (-kk..=kk)
            .map(|k| {
                let radius = magnitude / (1.0 + (k * k) as f64) * rng.random::<f64>();
                let angle = TAU * rng.random::<f64>();
                self.coeff(k) + Complex64::from_polar(radius, angle)
            })
            .collect();
        let out = self.rebuilt(coeffs);
        out.validate(N_CHECK).map_err(|e| Error::PerturbationBreaksSimplicity {
            magnitude,
            reason: e.to_string(),
        })?;
        if out.is_ccw() != self.is_ccw() {
            return Err(Error::PerturbationBreaksSimplicity {
                magnitude,
                reason: "orientation flipped".into(),
            });
        }
        Ok(out)
    }
}

/// Bound on `sup |Δf'|` for a perturbation of the given magnitude applied to
/// a curve of degree `degree`.
pub fn perturbation_c1_bound(magnitude: f64, degree: usize) -> f64 {
    let kk = degree as i64 + 2;
    (-kk..=kk)
        .map(|k| TAU * k.abs() as f64 * magnitude / (1.0 + (k * k) as f64))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn cw_circle() -> PlaneCurve {
        PlaneCurve::fourier(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap()
    }

    #[test]
    fn eval_examples() {
        let circle = PlaneCurve::circle(1.0).unwrap();
        assert!(close(circle.eval(0.0), c(1.0, 0.0), 1e-15));
        assert!(close(circle.eval(0.25), c(0.0, 1.0), 1e-15));
        let ellipse = PlaneCurve::ellipse(2.0, 1.0).unwrap();
        assert!(close(ellipse.eval(0.5), c(-2.0, 0.0), 1e-15));
    }

    #[test]
    fn derivative_examples() {
        let circle = PlaneCurve::circle(1.0).unwrap();
        assert!(close(circle.derivative(0.0, 1), c(0.0, TAU), 1e-13));
        assert!(close(circle.derivative(0.0, 2), c(-TAU * TAU, 0.0), 1e-12));
        let ellipse = PlaneCurve::ellipse(2.0, 1.0).unwrap();
        let h = 1e-5;
        let fd = (ellipse.eval(h) - ellipse.eval(-h)) / (2.0 * h);
        let exact = ellipse.derivative(0.0, 1);
        assert!(close(exact, c(0.0, TAU), 1e-13));
        assert!((fd - exact).norm() / exact.norm() < 1e-6);
    }

    #[test]
    fn jet_matches_derivative() {
        let curve = PlaneCurve::fourier(vec![c(0.1, 0.2), c(0.0, -0.1), c(0.3, 0.0), c(1.0, 0.1), c(-0.05, 0.02)]).unwrap();
        for &t in &[0.0, 0.13, 0.77] {
            let j = curve.jet(t);
            assert!(close(j.z, curve.eval(t), 1e-14));
            assert!(close(j.d1, curve.derivative(t, 1), 1e-12));
            assert!(close(j.d2, curve.derivative(t, 2), 1e-10));
        }
    }

    #[test]
    fn curvature_examples() {
        assert!((PlaneCurve::circle(1.0).unwrap().curvature(0.3).unwrap() - 1.0).abs() < 1e-12);
        assert!((PlaneCurve::circle(3.0).unwrap().curvature(0.7).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        // Closed form a b / (a^2 sin^2 + b^2 cos^2)^{3/2} at theta = 0.
        let (a, b) = (2.0_f64, 1.0_f64);
        let closed = a * b / (b * b).powf(1.5);
        let k = PlaneCurve::ellipse(a, b).unwrap().curvature(0.0).unwrap();
        assert!((k - closed).abs() < 1e-12 && (k - 2.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_tangent_is_reported() {
        let zero = c(0.0, 0.0);
        let curve = PlaneCurve::fourier(vec![zero, c(1.0, 0.0), zero]).unwrap();
        assert!(matches!(curve.curvature(0.0), Err(Error::DegenerateTangent { .. })));
    }

    #[test]
    fn area_examples() {
        assert!((PlaneCurve::circle(1.0).unwrap().signed_area() - PI).abs() < 1e-15);
        assert!((PlaneCurve::ellipse(2.0, 1.0).unwrap().signed_area() - 2.0 * PI).abs() < 1e-14);
        assert!((cw_circle().signed_area() + PI).abs() < 1e-15);
        for r in [0.5, 1.0, 3.0] {
            let a = PlaneCurve::circle(r).unwrap().signed_area();
            assert!((a - PI * r * r).abs() <= 1e-12 * PI * r * r);
        }
    }

    #[test]
    fn area_closed_form_matches_quadrature() {
        let curve = PlaneCurve::fourier(vec![
            c(0.02, 0.01), c(0.1, -0.05), c(0.05, 0.0), c(1.2, 0.3), c(-0.1, 0.04),
        ])
        .unwrap();
        let n = 4000;
        let mut acc = 0.0;
        for j in 0..n {
            let t = j as f64 / n as f64;
            let j = curve.jet(t);
            acc += (j.z.conj() * j.d1).im;
        }
        let quad = 0.5 * acc / n as f64;
        assert!((quad - curve.signed_area()).abs() < 1e-12);
    }

    #[test]
    fn winding_examples() {
        let circle = PlaneCurve::circle(1.0).unwrap();
        assert_eq!(circle.winding_number(c(0.0, 0.0)).unwrap(), 1);
        assert_eq!(circle.winding_number(c(3.0, 0.0)).unwrap(), 0);
        assert_eq!(cw_circle().winding_number(c(0.0, 0.0)).unwrap(), -1);
        assert!(matches!(circle.winding_number(c(1.0, 0.0)), Err(Error::PointOnCurve { .. })));
    }

    #[test]
    fn winding_invariant_under_shift() {
        let curve = PlaneCurve::fourier(vec![c(0.1, 0.0), c(0.0, 0.2), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.15)]).unwrap();
        for p in [c(0.0, 0.0), c(0.5, 0.3), c(2.0, -1.0), c(-0.9, 0.1)] {
            let w = curve.winding_number(p).unwrap();
            for shift in [0.1, 0.37, 0.9] {
                assert_eq!(curve.shifted(shift).winding_number(p).unwrap(), w);
            }
        }
    }

    #[test]
    fn closest_point_examples() {
        let circle = PlaneCurve::circle(1.0).unwrap();
        let cp = circle.closest_point(c(2.0, 0.0));
        assert!(cp.t.abs() < 1e-12 && (cp.dist - 1.0).abs() < 1e-12);
        let cp = circle.closest_point(c(0.0, 3.0));
        assert!((cp.t - 0.25).abs() < 1e-12 && (cp.dist - 2.0).abs() < 1e-12);
        let cp = circle.closest_point(c(0.0, 0.0));
        assert_eq!(cp.t, 0.0);
        assert!((cp.dist - 1.0).abs() < 1e-15);
    }

    #[test]
    fn signed_distance_examples() {
        let circle = PlaneCurve::circle(1.0).unwrap();
        assert!((circle.signed_distance(c(2.0, 0.0)) - 1.0).abs() < 1e-12);
        assert!((circle.signed_distance(c(0.5, 0.0)) + 0.5).abs() < 1e-12);
        assert_eq!(circle.signed_distance(c(1.0, 0.0)), 0.0);
        assert!((cw_circle().signed_distance(c(0.5, 0.0)) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn perturb_examples() {
        let circle = PlaneCurve::circle(1.0).unwrap();
        assert_eq!(circle.perturb(0.0, 3).unwrap(), circle);
        let p1 = circle.perturb(1e-3, 1).unwrap();
        let p2 = circle.perturb(1e-3, 1).unwrap();
        assert_eq!(p1.coeffs(), p2.coeffs());
        assert_eq!(p1.degree(), 3);
        let bound = perturbation_c1_bound(1e-3, circle.degree());
        assert!(bound <= 0.1);
        let sup = (0..N_CHECK)
            .map(|j| {
                let t = j as f64 / N_CHECK as f64;
                (p1.derivative(t, 1) - circle.derivative(t, 1)).norm()
            })
            .fold(0.0, f64::max);
        assert!(sup <= bound, "{sup} > {bound}");
        p1.validate(N_CHECK).unwrap();
    }

    #[test]
    fn validate_rejects_figure_eight() {
        // f = e^{2 pi i t} + e^{4 pi i t}-style curves self-intersect once
        // the second harmonic dominates.
        let curve = PlaneCurve::fourier(vec![
            c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.3, 0.0), c(1.0, 0.0),
        ])
        .unwrap();
        assert!(curve.validate(N_CHECK).is_err());
        PlaneCurve::ellipse(2.0, 1.0).unwrap().validate(N_CHECK).unwrap();
    }

    fn wobbly() -> Vec<PlaneCurve> {
        vec![
            PlaneCurve::circle(1.0).unwrap(),
            PlaneCurve::ellipse(2.0, 1.0).unwrap(),
            PlaneCurve::ellipse(3.0, 1.0).unwrap(),
            PlaneCurve::fourier(vec![c(0.05, 0.02), c(0.0, 0.12), c(0.1, 0.0), c(1.0, 0.0), c(0.0, -0.08)]).unwrap(),
            PlaneCurve::fourier(vec![
                c(0.02, 0.0), c(0.0, 0.0), c(0.15, 0.05), c(0.0, 0.0), c(1.3, 0.0), c(0.0, 0.1), c(0.0, 0.03),
            ])
            .unwrap(),
        ]
    }

    #[test]
    fn corpus_curves_are_valid() {
        for curve in wobbly() {
            curve.validate(N_CHECK).unwrap();
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn curvature_matches_finite_differences(t in 0.0f64..1.0, idx in 0usize..5) {
            let curve = &wobbly()[idx];
            let h = 1e-5;
            let d1 = (curve.eval(t + h) - curve.eval(t - h)) / (2.0 * h);
            let d2 = (curve.eval(t + h) - 2.0 * curve.eval(t) + curve.eval(t - h)) / (h * h);
            let fd = (d1.conj() * d2).im / d1.norm().powi(3);
            let exact = curve.curvature(t).unwrap();
            prop_assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1.0), "{} vs {}", fd, exact);
        }

        #[test]
        fn closest_point_is_global(px in -3.0f64..3.0, py in -3.0f64..3.0, idx in 0usize..5) {
            let curve = &wobbly()[idx];
            let p = c(px, py);
            let cp = curve.closest_point(p);
            for j in 0..1000 {
                let t = (j as f64 + 0.5) / 1000.0;
                prop_assert!(cp.dist <= (curve.eval(t) - p).norm() + 1e-12);
            }
        }

        #[test]
        fn signed_distance_sign_agrees_with_winding(px in -3.0f64..3.0, py in -3.0f64..3.0, idx in 0usize..5) {
            let curve = &wobbly()[idx];
            let p = c(px, py);
            let d = curve.signed_distance(p);
            prop_assume!(d.abs() > 1e-6);
            let w = curve.winding_number(p).unwrap();
            prop_assert_eq!(d < 0.0, w != 0);
        }
    }
}
