//! The even field `g`, the odd curve `L`, the odd field `h` vanishing on `L`,
//! and `f = g + h^3`, together with the sampled checks of the level-line
//! obstruction along `L`.

use std::f64::consts::PI;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::chart::{c_invariant, chart_derivatives, graph_chart, hessian_class, ChartDerivatives, Definiteness};
use super::field::{bump, Expr, Parity, Scalar1, SphereField};
use crate::{Error, Result};

/// Exponent of the large bump: `exp(-c / (1 - u^2))` has its inflection
/// points at `|u| = 1/2` exactly when `c = 21/8`.
pub const PHI_EXPONENT: f64 = 21.0 / 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BumpSpec {
    pub eps: f64,
    pub amp_phi: f64,
    pub amp_psi: f64,
    /// Homothety factor applied to `eps` and both amplitudes.
    pub global_scale: f64,
}

impl Default for BumpSpec {
    fn default() -> Self {
        Self { eps: 0.1, amp_phi: 2.0, amp_psi: 0.5, global_scale: 0.2 }
    }
}

impl BumpSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = self.eps > 0.0
            && self.amp_phi > 0.0
            && self.amp_psi > 0.0
            && self.global_scale > 0.0
            && self.global_scale <= 1.0
            && self.eps * self.global_scale < 0.25;
        if ok {
            Ok(())
        } else {
            Err(Error::Input(format!("invalid bump spec {self:?}")))
        }
    }

    /// Support half-width scale `eps` after the homothety.
    pub fn eps_eff(&self) -> f64 {
        self.eps * self.global_scale
    }

    pub fn phi(&self) -> Scalar1 {
        Scalar1::Bump { amp: self.amp_phi * self.global_scale, half_width: 2.0 * self.eps_eff(), c: PHI_EXPONENT }
    }

    pub fn psi(&self) -> Scalar1 {
        Scalar1::Bump { amp: self.amp_psi * self.global_scale, half_width: 0.5 * self.eps_eff(), c: 1.0 }
    }

    /// Sampled shape checks: `phi` vanishes outside `|s| < 2 eps`, is
    /// positive inside, convex on `eps < |s| < 2 eps` and concave on
    /// `|s| < eps`; `psi` vanishes outside `|s| < eps / 2` and is positive
    /// inside. Points where the bump underflows are skipped.
    pub fn check_shape(&self, n: usize) -> Result<()> {
        let e = self.eps_eff();
        let phi = self.phi();
        let psi = self.psi();
        for j in 0..=n {
            let s = -3.0 * e + 6.0 * e * j as f64 / n as f64;
            let [v, _, d2] = phi.eval(s);
            let r = s.abs() / e;
            let fail = |what: &str| Err(Error::ConvexityPatternFailed(format!("{what} at s = {s:e}")));
            if r >= 2.0 {
                if v != 0.0 {
                    return fail("phi nonzero outside support");
                }
            } else if v > 0.0 {
                let margin = 1e-9;
                if r > 1.0 + margin && d2 <= 0.0 {
                    return fail("phi not convex");
                }
                if r < 1.0 - margin && d2 >= 0.0 {
                    return fail("phi not concave");
                }
            } else if r < 1.98 {
                return fail("phi not positive");
            }
            let [w, _, _] = psi.eval(s);
            if r >= 0.5 && w != 0.0 {
                return fail("psi nonzero outside support");
            }
            if r < 0.49 && !(w > 0.0) {
                return fail("psi not positive");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SphereParams {
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub bump: BumpSpec,
    /// Height and half-width of the bend of `L` around `(+-1, 0, 0)`.
    pub bend_amp: f64,
    pub bend_width: f64,
    /// `h = z` for `|z| >= 2 delta`; the modification of `g` uses the same
    /// cutoff.
    pub delta: f64,
    pub delta_miss: f64,
    pub grad_min: f64,
    pub tol_zero: f64,
    pub n_l: usize,
}

impl Default for SphereParams {
    fn default() -> Self {
        Self {
            a: 3.0,
            b: 2.0,
            d: 1.0,
            bump: BumpSpec::default(),
            bend_amp: 0.2,
            bend_width: 0.2,
            delta: 0.2,
            delta_miss: 0.05,
            grad_min: 1e-3,
            tol_zero: 1e-10,
            n_l: 1000,
        }
    }
}

/// `g0 = B + K (s^2 - t^2)` with `(s, t) = (x, lambda z)` near `(0, +-1, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineMatch {
    pub offset: f64,
    pub scale: f64,
    pub lambda: f64,
}

pub fn build_g0(a: f64, b: f64, d: f64) -> Result<SphereField> {
    if !(a > b && b > d && d > 0.0) {
        return Err(Error::BadOrdering { a, b, d });
    }
    let e = Expr::x().powi(2).scale(a) + Expr::y().powi(2).scale(b) + Expr::z().powi(2).scale(d);
    Ok(SphereField::new("g0", e, Parity::Even))
}

fn smooth_sign(e: Expr) -> Expr {
    e.apply(Scalar1::Step { lo: -0.5, hi: 0.5 }).scale(2.0) - Expr::constant(1.0)
}

fn cutoff(z: Expr, delta: f64) -> Expr {
    Expr::constant(1.0) - z.powi(2).apply(Scalar1::Step { lo: delta * delta, hi: 4.0 * delta * delta })
}

/// The odd curve `L = {z = Z(x, y)}`, a graph over longitude.
#[derive(Debug, Clone)]
pub struct OddCurve {
    /// `Z(x, y)` as an expression that ignores `z`.
    pub profile: Expr,
    pub params: SphereParams,
}

impl OddCurve {
    /// Height `Lambda(theta)` of `L` on the meridian at longitude `theta`.
    pub fn height(&self, theta: f64) -> f64 {
        let (c, s) = (theta.cos(), theta.sin());
        let mut z: f64 = 0.0;
        for _ in 0..50 {
            let r = (1.0 - z * z).sqrt();
            let p = Vector3::new(r * c, r * s, z);
            let j = self.profile.jet(&p);
            let dr = -z / r;
            let g = z - j.v;
            let dg = 1.0 - (j.g[0] * c + j.g[1] * s) * dr;
            let step = g / dg;
            z -= step;
            if step.abs() <= 1e-16 {
                break;
            }
        }
        z
    }

    pub fn point(&self, theta: f64) -> Vector3<f64> {
        let z = self.height(theta);
        let r = (1.0 - z * z).sqrt();
        Vector3::new(r * theta.cos(), r * theta.sin(), z)
    }

    /// Longitudes of `n` samples (`n` even): uniform on the circle plus
    /// refinement windows over the bends at `(+-1, 0, 0)` and the bumps at
    /// `(0, +-1, 0)`. The set is invariant under `theta -> theta + pi`.
    pub fn sample_longitudes(&self, n: usize) -> Vec<f64> {
        let half = n / 2;
        let n_uni = (3 * half) / 5;
        let n_bump = (half - n_uni) / 2;
        let n_bend = half - n_uni - n_bump;
        let w_bump = 2.5 * self.params.bump.eps_eff();
        let w_bend = 1.25 * self.params.bend_width;
        let mut th: Vec<f64> = (0..n_uni).map(|j| PI * j as f64 / n_uni as f64).collect();
        th.extend((0..n_bump).map(|j| PI / 2.0 - w_bump + 2.0 * w_bump * (j as f64 + 0.5) / n_bump as f64));
        th.extend((0..n_bend).map(|j| {
            let u = -w_bend + 2.0 * w_bend * (j as f64 + 0.5) / n_bend as f64;
            u.rem_euclid(PI)
        }));
        let mut all: Vec<f64> = th.iter().copied().chain(th.iter().map(|t| t + PI)).collect();
        all.sort_by(f64::total_cmp);
        all
    }

    pub fn samples(&self, n: usize) -> Vec<Vector3<f64>> {
        self.sample_longitudes(n).into_iter().map(|t| self.point(t)).collect()
    }

    /// Largest `|Lambda(theta + pi) + Lambda(theta)|` over the sample set.
    pub fn oddness_defect(&self, n: usize) -> f64 {
        self.sample_longitudes(n)
            .iter()
            .map(|t| (self.height(t + PI) + self.height(*t)).abs())
            .fold(0.0, f64::max)
    }

    /// Smallest geodesic distance from the samples to `(+-1, 0, 0)`.
    pub fn miss_distance(&self, n: usize) -> f64 {
        self.samples(n)
            .iter()
            .map(|p| p[0].abs().clamp(-1.0, 1.0).acos())
            .fold(f64::INFINITY, f64::min)
    }
}

/// All fields of the construction.
#[derive(Debug, Clone)]
pub struct Construction {
    pub params: SphereParams,
    pub affine: AffineMatch,
    pub g0: SphereField,
    pub g: SphereField,
    pub h: SphereField,
    pub f: SphereField,
    pub l: OddCurve,
}

/// Modifies `g0` near `(0, +-1, 0)` to `B + K (s^2 - (t - phi(s))^2)` in the
/// graph chart and bends the equator into `L`.
pub fn build_g_and_l(params: &SphereParams) -> Result<(SphereField, OddCurve, AffineMatch)> {
    let g0 = build_g0(params.a, params.b, params.d)?;
    params.bump.validate()?;
    params.bump.check_shape(4000)?;
    let k = params.a - params.b;
    let lambda = ((params.b - params.d) / (params.a - params.b)).sqrt();
    let affine = AffineMatch { offset: params.b, scale: k, lambda };

    let phi = Expr::x().apply(params.bump.phi());
    let psi = Expr::x().apply(params.bump.psi());
    let chi = cutoff(Expr::z(), params.delta);
    let modification = Expr::z().scale(2.0 * lambda) * phi.clone() * smooth_sign(Expr::y()) - phi.clone().powi(2);
    let g = SphereField::new("g", g0.expr.clone() + (chi * modification).scale(k), Parity::Even);

    let bend = Expr::y().apply(Scalar1::Bump { amp: params.bend_amp, half_width: params.bend_width, c: 1.0 });
    let profile = (phi + psi).scale(1.0 / lambda) * smooth_sign(Expr::y()) + bend * smooth_sign(Expr::x());
    Ok((g, OddCurve { profile, params: *params }, affine))
}

pub fn build_h(l: &OddCurve) -> SphereField {
    let e = Expr::z() - l.profile.clone() * cutoff(Expr::z(), l.params.delta);
    SphereField::new("h", e, Parity::Odd)
}

pub fn build_f(g: &SphereField, h: &SphereField) -> SphereField {
    SphereField::new("f", g.expr.clone() + h.expr.powi(3), Parity::None)
}

pub fn build(params: &SphereParams) -> Result<Construction> {
    let g0 = build_g0(params.a, params.b, params.d)?;
    let (g, l, affine) = build_g_and_l(params)?;
    let h = build_h(&l);
    let f = build_f(&g, &h);
    let c = Construction { params: *params, affine, g0, g, h, f, l };
    c.check_zero_set(720)?;
    Ok(c)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Worst sampled value of the checked quantity.
    pub worst: f64,
    pub threshold: f64,
    pub samples: usize,
}

impl CheckResult {
    fn at_most(name: &str, worst: f64, threshold: f64, samples: usize) -> Self {
        Self { name: name.into(), passed: worst <= threshold, worst, threshold, samples }
    }

    fn at_least(name: &str, worst: f64, threshold: f64, samples: usize) -> Self {
        Self { name: name.into(), passed: worst >= threshold, worst, threshold, samples }
    }

    fn below(name: &str, worst: f64, threshold: f64, samples: usize) -> Self {
        Self { name: name.into(), passed: worst < threshold, worst, threshold, samples }
    }
}

/// Hessian classification at a sample where the gradient is too small for
/// the level-line test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalSample {
    pub point: [f64; 3],
    pub gradient: f64,
    pub class: Definiteness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub samples: usize,
    pub checks: Vec<CheckResult>,
    pub critical: Vec<CriticalSample>,
}

impl ObstructionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// The four on-`L` conditions: `h = 0`, `|dg| >= grad_min`, `C(f) < 0`, and
/// `C(f) = C(g)` to `1e-6 (1 + |C(g)|)`.
pub fn verify_obstruction(
    f: &SphereField,
    g: &SphereField,
    h: &SphereField,
    samples: &[Vector3<f64>],
    params: &SphereParams,
) -> ObstructionReport {
    let n = samples.len();
    let mut h_max: f64 = 0.0;
    let mut grad_min = f64::INFINITY;
    let mut c_max = f64::NEG_INFINITY;
    let mut c_diff: f64 = 0.0;
    let mut critical = Vec::new();
    for p in samples {
        h_max = h_max.max(h.value(p).abs());
        let dg: ChartDerivatives = chart_derivatives(g, p);
        let df = chart_derivatives(f, p);
        grad_min = grad_min.min(dg.gradient_norm());
        c_max = c_max.max(df.c);
        c_diff = c_diff.max((df.c - dg.c).abs() / (1.0 + dg.c.abs()));
        if df.gradient_norm() < params.grad_min {
            let (_, class) = hessian_class(f, p);
            critical.push(CriticalSample { point: [p[0], p[1], p[2]], gradient: df.gradient_norm(), class });
        }
    }
    ObstructionReport {
        samples: n,
        checks: vec![
            CheckResult::at_most("h_on_l", h_max, params.tol_zero, n),
            CheckResult::at_least("grad_g_on_l", grad_min, params.grad_min, n),
            CheckResult::below("c_f_on_l", c_max, 0.0, n),
            CheckResult::at_most("c_f_minus_c_g", c_diff, 1e-6, n),
        ],
        critical,
    }
}

/// Uniform random points on the sphere.
pub fn random_points(n: usize, seed: u64) -> Vec<Vector3<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let z: f64 = rng.random_range(-1.0..1.0);
            let th: f64 = rng.random_range(0.0..2.0 * PI);
            let r = (1.0 - z * z).sqrt();
            Vector3::new(r * th.cos(), r * th.sin(), z)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildReport {
    pub params: SphereParams,
    pub affine: AffineMatch,
    pub checks: Vec<CheckResult>,
    pub obstruction: ObstructionReport,
    /// Largest and smallest `C(g)` over the samples of `L`.
    pub c_g_range: [f64; 2],
}

impl BuildReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed) && self.obstruction.passed()
    }
}

impl Construction {
    /// Every meridian crosses `h = 0` exactly once, at `L`.
    pub fn check_zero_set(&self, n_meridians: usize) -> Result<f64> {
        let mut worst: f64 = 0.0;
        let n_z = 400;
        for m in 0..n_meridians {
            let th = 2.0 * PI * (m as f64 + 0.25) / n_meridians as f64;
            let at = |z: f64| {
                let r = (1.0 - z * z).sqrt();
                self.h.value(&Vector3::new(r * th.cos(), r * th.sin(), z))
            };
            let zs: Vec<f64> = (0..=n_z).map(|j| -0.999 + 1.998 * j as f64 / n_z as f64).collect();
            let vals: Vec<f64> = zs.iter().map(|z| at(*z)).collect();
            let crossings: Vec<usize> = (0..n_z).filter(|&j| vals[j] * vals[j + 1] <= 0.0).collect();
            if crossings.len() != 1 {
                return Err(Error::ZeroSetMismatch(format!(
                    "{} sign changes of h on the meridian at longitude {th}",
                    crossings.len()
                )));
            }
            let (mut lo, mut hi) = (zs[crossings[0]], zs[crossings[0] + 1]);
            let vlo = at(lo);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let v = at(mid);
                if v == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (v > 0.0) == (vlo > 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-16 {
                    break;
                }
            }
            let dev = (0.5 * (lo + hi) - self.l.height(th)).abs();
            worst = worst.max(dev);
        }
        if worst > self.params.tol_zero {
            return Err(Error::ZeroSetMismatch(format!("zero of h is {worst:e} away from L")));
        }
        Ok(worst)
    }

    /// `sup |Lambda| * sup |w'|` over the samples of `L`, which must stay
    /// below one for `z = Lambda w(z)` to have a single solution per meridian.
    pub fn uniqueness_margin(&self) -> f64 {
        let l_sup = self
            .l
            .sample_longitudes(self.params.n_l)
            .into_iter()
            .map(|t| self.l.height(t).abs())
            .fold(0.0, f64::max);
        let w = cutoff(Expr::z(), self.params.delta);
        let w_sup = (0..=2000)
            .map(|j| w.jet(&Vector3::new(0.0, 0.0, j as f64 / 2000.0)).g[2].abs())
            .fold(0.0, f64::max);
        l_sup * w_sup
    }

    /// Largest relative gap between `C(g) / 8` in the graph chart at
    /// `(0, 1, 0)` and `K^3 (psi^2 + psi^3 phi'' - s^2)` on `L`.
    pub fn model_defect(&self, n: usize) -> f64 {
        let b = self.params.bump;
        let e = b.eps_eff();
        let (k, lambda) = (self.affine.scale, self.affine.lambda);
        let (phi, psi) = (b.phi(), b.psi());
        (0..n)
            .map(|j| {
                let s = -2.0 * e + 4.0 * e * (j as f64 + 0.5) / n as f64;
                let [p0, _, p2] = phi.eval(s);
                let q = psi.eval(s)[0];
                let t = p0 + q;
                let cp = graph_chart(s, t, lambda, 1.0);
                let c = ChartDerivatives::from_jet(&self.g.jet(&cp.p), &cp).c / 8.0;
                let model = k.powi(3) * (q * q + q.powi(3) * p2 - s * s);
                (c - model).abs() / model.abs().max(1e-300)
            })
            .fold(0.0, f64::max)
    }

    pub fn report(&self, n_pairs: usize, seed: u64) -> BuildReport {
        let p = &self.params;
        let n_l = p.n_l;
        let l_samples = self.l.samples(n_l);
        let mut pts = random_points(n_pairs, seed);
        let identity = pts
            .iter()
            .map(|y| (self.f.value(y) - self.f.value(&-y) - 2.0 * self.h.value(y).powi(3)).abs())
            .fold(0.0, f64::max);
        pts.extend(l_samples.iter().copied());

        let zero_dev = self.check_zero_set(720);
        let mut checks = vec![
            CheckResult::at_least("l_misses_poles", self.l.miss_distance(n_l), p.delta_miss, n_l),
            CheckResult::below("h_uniqueness", self.uniqueness_margin(), 1.0, 2001),
            CheckResult {
                name: "zero_set".into(),
                passed: zero_dev.is_ok(),
                worst: zero_dev.as_ref().copied().unwrap_or(f64::INFINITY),
                threshold: p.tol_zero,
                samples: 720,
            },
            CheckResult::at_most("parity_g", self.g.parity_defect(&pts), 1e-12, pts.len()),
            CheckResult::at_most("parity_h", self.h.parity_defect(&pts), 1e-12, pts.len()),
            CheckResult::at_most("parity_l", self.l.oddness_defect(n_l), 1e-12, n_l),
            CheckResult::at_most("identity_f_odd_part", identity, 1e-10, n_pairs),
            CheckResult::at_most("model_c_formula", self.model_defect(400), 1e-4, 400),
        ];
        let c_g: Vec<f64> = l_samples.iter().map(|y| c_invariant(&self.g, y)).collect();
        let c_g_range = [
            c_g.iter().copied().fold(f64::INFINITY, f64::min),
            c_g.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ];
        BuildReport {
            params: *p,
            affine: self.affine,
            checks,
            obstruction: verify_obstruction(&self.f, &self.g, &self.h, &l_samples, p),
            c_g_range,
        }
    }
}

/// `phi''` on the sampled window, for inspection.
pub fn phi_second_derivative(spec: &BumpSpec, s: f64) -> f64 {
    let e = spec.eps_eff();
    bump(s, spec.amp_phi * spec.global_scale, 2.0 * e, PHI_EXPONENT)[2]
}
