#![allow(dead_code)]

use std::f64::consts::TAU;

use concyclic_core::{Complex64, PlaneCurve, Quadrangle, Tolerances};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Smooth simple curve `e^{2 pi i t}` plus harmonics `|k| <= 3` with
/// `|c_k| <= 0.25 / (1 + k^2)`.
pub fn random_curve(seed: u64) -> PlaneCurve {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let coeffs: Vec<Complex64> = (-3i64..=3)
            .map(|k| match k {
                1 => c(1.0, 0.0),
                _ => Complex64::from_polar(0.25 / (1.0 + (k * k) as f64) * rng.random::<f64>(), TAU * rng.random::<f64>()),
            })
            .collect();
        let curve = PlaneCurve::fourier(coeffs).unwrap();
        if curve.validate(4096).is_ok() {
            return curve.named(format!("random-{seed}"));
        }
    }
}

pub fn circle_quad(angles: [f64; 4], radius: f64, center: Complex64) -> Quadrangle {
    let [a, b, cc, d] = angles.map(|t| center + Complex64::from_polar(radius, t));
    Quadrangle::new(a, b, cc, d, &Tolerances::default()).unwrap()
}

/// Counter-clockwise angles on the circle with every gap at least `min_gap`.
pub fn random_angles(rng: &mut ChaCha8Rng, min_gap: f64) -> [f64; 4] {
    loop {
        let mut a = [0.0, rng.random::<f64>() * TAU, rng.random::<f64>() * TAU, rng.random::<f64>() * TAU];
        a.sort_by(f64::total_cmp);
        let gaps = [a[1] - a[0], a[2] - a[1], a[3] - a[2], TAU - a[3]];
        if gaps.iter().all(|g| *g >= min_gap) {
            return a;
        }
    }
}

/// Inside test against a dense polygon of the curve, by crossing parity.
pub struct InsideOracle {
    poly: Vec<Complex64>,
}

impl InsideOracle {
    pub fn new(curve: &PlaneCurve, n: usize) -> Self {
        Self { poly: (0..n).map(|j| curve.eval(j as f64 / n as f64)).collect() }
    }

    pub fn inside(&self, p: Complex64) -> bool {
        let n = self.poly.len();
        let mut inside = false;
        for i in 0..n {
            let (a, b) = (self.poly[i], self.poly[(i + 1) % n]);
            if (a.im > p.im) != (b.im > p.im) {
                let x = a.re + (p.im - a.im) / (b.im - a.im) * (b.re - a.re);
                if x > p.re {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Brute-force nearest sample parameter, polished by a few Newton steps
    /// on `<f(t) - p, f'(t)> = 0`.
    pub fn parameter_of(&self, curve: &PlaneCurve, p: Complex64) -> f64 {
        let n = self.poly.len();
        let j = (0..n).min_by(|&i, &k| (self.poly[i] - p).norm().total_cmp(&(self.poly[k] - p).norm())).unwrap();
        let mut t = j as f64 / n as f64;
        for _ in 0..20 {
            let (f, d1, d2) = (curve.eval(t), curve.derivative(t, 1), curve.derivative(t, 2));
            let g = ((f - p).conj() * d1).re;
            let dg = d1.norm_sqr() + ((f - p).conj() * d2).re;
            t -= g / dg;
        }
        t.rem_euclid(1.0)
    }
}
