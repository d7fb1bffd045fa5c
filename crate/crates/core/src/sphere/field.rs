//! Scalar fields on the sphere as expression trees in the ambient
//! coordinates, evaluated together with their gradient and Hessian.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

/// Value, gradient and Hessian of a function of `(x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub v: f64,
    pub g: Vector3<f64>,
    pub h: Matrix3<f64>,
}

impl Jet2 {
    pub fn constant(v: f64) -> Self {
        Self { v, g: Vector3::zeros(), h: Matrix3::zeros() }
    }

    pub fn variable(axis: usize, p: &Vector3<f64>) -> Self {
        let mut g = Vector3::zeros();
        g[axis] = 1.0;
        Self { v: p[axis], g, h: Matrix3::zeros() }
    }

    fn add(self, o: Self) -> Self {
        Self { v: self.v + o.v, g: self.g + o.g, h: self.h + o.h }
    }

    fn mul(self, o: Self) -> Self {
        let cross = self.g * o.g.transpose();
        Self {
            v: self.v * o.v,
            g: self.g * o.v + o.g * self.v,
            h: self.h * o.v + o.h * self.v + cross + cross.transpose(),
        }
    }

    fn scale(self, k: f64) -> Self {
        Self { v: self.v * k, g: self.g * k, h: self.h * k }
    }

    /// `phi(self)` given `phi, phi', phi''` at `self.v`.
    fn compose(self, d0: f64, d1: f64, d2: f64) -> Self {
        Self { v: d0, g: self.g * d1, h: self.h * d1 + self.g * self.g.transpose() * d2 }
    }

    fn powi(self, n: i32) -> Self {
        let nf = n as f64;
        let d0 = self.v.powi(n);
        let d1 = if n == 0 { 0.0 } else { nf * self.v.powi(n - 1) };
        let d2 = if (0..2).contains(&n) { 0.0 } else { nf * (nf - 1.0) * self.v.powi(n - 2) };
        self.compose(d0, d1, d2)
    }
}

/// Smooth step `e(u) / (e(u) + e(1 - u))` with `e(u) = exp(-1/u)` for
/// `u > 0`: zero for `u <= 0`, one for `u >= 1`, and `C^inf` throughout.
pub fn smooth_step(u: f64) -> [f64; 3] {
    if u <= 0.0 {
        return [0.0, 0.0, 0.0];
    }
    if u >= 1.0 {
        return [1.0, 0.0, 0.0];
    }
    let e = |u: f64| -> [f64; 3] {
        let v = (-1.0 / u).exp();
        let u2 = u * u;
        [v, v / u2, v * (1.0 / (u2 * u2) - 2.0 / (u2 * u))]
    };
    let a = e(u);
    let b = e(1.0 - u);
    let n = a;
    let d = [a[0] + b[0], a[1] - b[1], a[2] + b[2]];
    let q = (n[1] * d[0] - n[0] * d[1]) / (d[0] * d[0]);
    let v = n[0] / d[0];
    let v2 = (n[2] * d[0] - n[0] * d[2]) / (d[0] * d[0]) - 2.0 * d[1] * q / d[0];
    [v, q, v2]
}

/// `amp * exp(-c / (1 - (u / half_width)^2))` inside `|u| < half_width`,
/// zero outside.
pub fn bump(u: f64, amp: f64, half_width: f64, c: f64) -> [f64; 3] {
    let x = u / half_width;
    if x.abs() >= 1.0 {
        return [0.0, 0.0, 0.0];
    }
    let q = 1.0 - x * x;
    let e = amp * (-c / q).exp();
    let a = -2.0 * c * x / (q * q);
    let da = -2.0 * c / (q * q) - 8.0 * c * x * x / (q * q * q);
    let k = 1.0 / half_width;
    [e, e * a * k, e * (a * a + da) * k * k]
}

/// One-variable functions that can be applied to a subexpression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Scalar1 {
    /// See [`bump`].
    Bump { amp: f64, half_width: f64, c: f64 },
    /// `smooth_step((u - lo) / (hi - lo))`.
    Step { lo: f64, hi: f64 },
}

impl Scalar1 {
    pub fn eval(&self, u: f64) -> [f64; 3] {
        match *self {
            Scalar1::Bump { amp, half_width, c } => bump(u, amp, half_width, c),
            Scalar1::Step { lo, hi } => {
                let w = hi - lo;
                let [v, d1, d2] = smooth_step((u - lo) / w);
                [v, d1 / w, d2 / (w * w)]
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Const(f64),
    Var(usize),
    Add(Expr, Expr),
    Mul(Expr, Expr),
    Scale(f64, Expr),
    Powi(Expr, i32),
    Apply(Scalar1, Expr),
}

/// Shared, immutable expression in `x, y, z`.
#[derive(Clone, PartialEq)]
pub struct Expr(Arc<Node>);

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Node::Const(c) => write!(f, "{c}"),
            Node::Var(i) => write!(f, "{}", ["x", "y", "z"][*i]),
            Node::Add(a, b) => write!(f, "({a:?} + {b:?})"),
            Node::Mul(a, b) => write!(f, "{a:?}*{b:?}"),
            Node::Scale(k, a) => write!(f, "{k}*{a:?}"),
            Node::Powi(a, n) => write!(f, "{a:?}^{n}"),
            Node::Apply(s, a) => write!(f, "{s:?}({a:?})"),
        }
    }
}

impl Expr {
    fn node(n: Node) -> Self {
        Self(Arc::new(n))
    }

    pub fn constant(c: f64) -> Self {
        Self::node(Node::Const(c))
    }

    pub fn x() -> Self {
        Self::node(Node::Var(0))
    }

    pub fn y() -> Self {
        Self::node(Node::Var(1))
    }

    pub fn z() -> Self {
        Self::node(Node::Var(2))
    }

    pub fn powi(&self, n: i32) -> Self {
        Self::node(Node::Powi(self.clone(), n))
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::node(Node::Scale(k, self.clone()))
    }

    pub fn apply(&self, f: Scalar1) -> Self {
        Self::node(Node::Apply(f, self.clone()))
    }

    pub fn value(&self, p: &Vector3<f64>) -> f64 {
        match &*self.0 {
            Node::Const(c) => *c,
            Node::Var(i) => p[*i],
            Node::Add(a, b) => a.value(p) + b.value(p),
            Node::Mul(a, b) => a.value(p) * b.value(p),
            Node::Scale(k, a) => k * a.value(p),
            Node::Powi(a, n) => a.value(p).powi(*n),
            Node::Apply(s, a) => s.eval(a.value(p))[0],
        }
    }

    pub fn jet(&self, p: &Vector3<f64>) -> Jet2 {
        match &*self.0 {
            Node::Const(c) => Jet2::constant(*c),
            Node::Var(i) => Jet2::variable(*i, p),
            Node::Add(a, b) => a.jet(p).add(b.jet(p)),
            Node::Mul(a, b) => a.jet(p).mul(b.jet(p)),
            Node::Scale(k, a) => a.jet(p).scale(*k),
            Node::Powi(a, n) => a.jet(p).powi(*n),
            Node::Apply(s, a) => {
                let inner = a.jet(p);
                let [d0, d1, d2] = s.eval(inner.v);
                inner.compose(d0, d1, d2)
            }
        }
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, o: Expr) -> Expr {
        Expr::node(Node::Add(self, o))
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, o: Expr) -> Expr {
        self + o.scale(-1.0)
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, o: Expr) -> Expr {
        Expr::node(Node::Mul(self, o))
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.scale(-1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    None,
}

/// A named scalar field with a declared antipodal parity.
#[derive(Debug, Clone)]
pub struct SphereField {
    pub name: String,
    pub expr: Expr,
    pub parity: Parity,
}

impl SphereField {
    pub fn new(name: impl Into<String>, expr: Expr, parity: Parity) -> Self {
        Self { name: name.into(), expr, parity }
    }

    pub fn value(&self, p: &Vector3<f64>) -> f64 {
        self.expr.value(p)
    }

    pub fn jet(&self, p: &Vector3<f64>) -> Jet2 {
        self.expr.jet(p)
    }

    /// Gradient projected to the tangent plane at the unit vector `p`.
    pub fn surface_gradient(&self, p: &Vector3<f64>) -> Vector3<f64> {
        let g = self.jet(p).g;
        g - p * g.dot(p)
    }

    /// Largest `|f(-p) - s f(p)|` over `points`, where `s` is `+1` for even and
    /// `-1` for odd fields. Zero for fields without declared parity.
    pub fn parity_defect(&self, points: &[Vector3<f64>]) -> f64 {
        let sign = match self.parity {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
            Parity::None => return 0.0,
        };
        points
            .iter()
            .map(|p| (self.value(&-p) - sign * self.value(p)).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(e: &Expr, p: Vector3<f64>) {
        let j = e.jet(&p);
        let h = 1e-5;
        for i in 0..3 {
            let mut dp = Vector3::zeros();
            dp[i] = h;
            let g = (e.value(&(p + dp)) - e.value(&(p - dp))) / (2.0 * h);
            assert!((j.g[i] - g).abs() <= 1e-6 * (1.0 + g.abs()), "grad {i}: {} vs {g}", j.g[i]);
            let row = (e.jet(&(p + dp)).g - e.jet(&(p - dp)).g) / (2.0 * h);
            for k in 0..3 {
                assert!((j.h[(i, k)] - row[k]).abs() <= 1e-6 * (1.0 + row[k].abs()));
            }
        }
    }

    #[test]
    fn step_is_smooth_and_symmetric() {
        for u in [0.1, 0.3, 0.5, 0.77] {
            let [a, da, dda] = smooth_step(u);
            let [b, db, ddb] = smooth_step(1.0 - u);
            assert!((a + b - 1.0).abs() < 1e-15);
            assert!((da - db).abs() < 1e-12);
            assert!((dda + ddb).abs() < 1e-10);
        }
        assert_eq!(smooth_step(-0.1), [0.0; 3]);
        assert_eq!(smooth_step(1.2), [1.0, 0.0, 0.0]);
        let h = 1e-6;
        for u in [0.05, 0.4, 0.93] {
            let d = (smooth_step(u + h)[0] - smooth_step(u - h)[0]) / (2.0 * h);
            assert!((smooth_step(u)[1] - d).abs() < 1e-7);
            let dd = (smooth_step(u + h)[1] - smooth_step(u - h)[1]) / (2.0 * h);
            assert!((smooth_step(u)[2] - dd).abs() < 1e-6 * (1.0 + dd.abs()));
        }
    }

    #[test]
    fn bump_derivatives() {
        let h = 1e-6;
        for u in [-0.17, 0.0, 0.05, 0.14] {
            let f = |u| bump(u, 2.0, 0.2, 21.0 / 8.0);
            let d = (f(u + h)[0] - f(u - h)[0]) / (2.0 * h);
            let dd = (f(u + h)[1] - f(u - h)[1]) / (2.0 * h);
            assert!((f(u)[1] - d).abs() < 1e-6 * (1.0 + d.abs()));
            assert!((f(u)[2] - dd).abs() < 1e-6 * (1.0 + dd.abs()));
        }
        assert_eq!(bump(0.2, 1.0, 0.2, 1.0), [0.0; 3]);
    }

    #[test]
    fn expression_jets_match_differences() {
        let e = (Expr::x() * Expr::y().powi(2) + Expr::z().apply(Scalar1::Step { lo: -0.5, hi: 0.5 }))
            .powi(3)
            - Expr::x().apply(Scalar1::Bump { amp: 1.0, half_width: 0.8, c: 1.0 }) * Expr::z();
        for p in [Vector3::new(0.3, -0.2, 0.1), Vector3::new(-0.5, 0.4, 0.7)] {
            fd_check(&e, p);
        }
    }

    #[test]
    fn parity_of_simple_fields() {
        let pts = [Vector3::new(0.6, 0.0, 0.8), Vector3::new(0.0, 0.6, -0.8)];
        let even = SphereField::new("even", Expr::x().powi(2), Parity::Even);
        let odd = SphereField::new("odd", Expr::z().powi(3), Parity::Odd);
        assert_eq!(even.parity_defect(&pts), 0.0);
        assert_eq!(odd.parity_defect(&pts), 0.0);
    }
}
