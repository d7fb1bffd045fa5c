//! The variety of inscribed similar triangles.
//!
//! For a curve `f` and a triangle shape `r = (c - a) / (b - a)`, a pair
//! `(t, s)` with `0 < s < 1` places `a' = f(t)`, `b' = f(t + s)` and
//! `c' = a' + r (b' - a')`. The residual `F(t, s)` is the signed distance from
//! `c'` to the curve; its zero set is traced on the cylinder `t mod 1` with a
//! pseudo-arclength predictor-corrector.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, PlaneCurve, Result};

/// A point of the strip `R x (0, 1)`. Lifted `t` values are kept as is; the
/// deck transform `(t, s) -> (t + 1, s)` is only ever applied explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderPoint {
    pub t: f64,
    pub s: f64,
}

impl CylinderPoint {
    pub fn new(t: f64, s: f64) -> Self {
        Self { t, s }
    }

    pub fn deck(&self, k: i64) -> Self {
        Self { t: self.t + k as f64, s: self.s }
    }

    fn dist(&self, o: &Self) -> f64 {
        (self.t - o.t).hypot(self.s - o.s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TraceConfig {
    pub grid_t: usize,
    pub grid_s: usize,
    pub s_min: f64,
    pub step_min: f64,
    pub step_max: f64,
    pub n_path: usize,
    pub k_max: i64,
    pub max_steps: usize,
    pub max_retries: usize,
}

impl Default for TraceConfig {
    fn default() -> Self {
        Self {
            grid_t: 512,
            grid_s: 256,
            s_min: 1e-3,
            step_min: 1e-5,
            step_max: 5e-3,
            n_path: 4096,
            k_max: 8,
            max_steps: 200_000,
            max_retries: 8,
        }
    }
}

/// A traced closed component of the variety.
///
/// `samples` are consecutive lifted points; the path closes from the last
/// sample back to `samples[0].deck(period_shift)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarietyPath {
    pub samples: Vec<CylinderPoint>,
    pub period_shift: i64,
    pub s_margin: f64,
    /// Samples are equispaced in arclength over one deck period with
    /// `samples[0].t == 0`.
    pub normalized: bool,
}

impl VarietyPath {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn is_periodic(&self) -> bool {
        self.period_shift != 0
    }

    /// Sample `j` of the bi-infinite lift, any integer `j`.
    pub fn lifted(&self, j: i64) -> CylinderPoint {
        let n = self.samples.len() as i64;
        let wraps = j.div_euclid(n);
        self.samples[j.rem_euclid(n) as usize].deck(wraps * self.period_shift)
    }

    /// Piecewise-linear interpolation at `u`, where `u` in `[0, 1]` spans the
    /// stored samples plus the closing segment. Not projected onto the
    /// variety.
    pub fn interpolate(&self, u: f64) -> CylinderPoint {
        let n = self.samples.len();
        let x = u * n as f64;
        let j = x.floor();
        let frac = x - j;
        let p = self.lifted(j as i64);
        let q = self.lifted(j as i64 + 1);
        CylinderPoint::new(p.t + frac * (q.t - p.t), p.s + frac * (q.s - p.s))
    }

    fn margin_of(samples: &[CylinderPoint]) -> f64 {
        samples.iter().map(|p| p.s.min(1.0 - p.s)).fold(f64::INFINITY, f64::min)
    }

    /// Smallest sample in `(t mod 1, s)` order, used to sort components.
    fn sort_key(&self) -> (f64, f64) {
        self.samples
            .iter()
            .map(|p| (p.t.rem_euclid(1.0), p.s))
            .fold((f64::INFINITY, f64::INFINITY), |a, b| if b < a { b } else { a })
    }
}

/// Residual value and gradient at one point.
#[derive(Debug, Clone, Copy)]
pub struct ResidualEval {
    pub value: f64,
    pub grad: [f64; 2],
}

impl ResidualEval {
    fn grad_norm(&self) -> f64 {
        self.grad[0].hypot(self.grad[1])
    }
}

/// The triangle variety of one curve and one triangle shape.
#[derive(Debug, Clone)]
pub struct Variety {
    curve: PlaneCurve,
    r: Complex64,
    cfg: TraceConfig,
    /// `+1` when the traced orientation makes `t` increase along the
    /// periodic component.
    orient: f64,
}

impl Variety {
    pub fn new(curve: PlaneCurve, r: Complex64, cfg: TraceConfig) -> Self {
        let o = if curve.is_ccw() { 1.0 } else { -1.0 };
        let orient = if r.im < 0.0 { -o } else { o };
        Self { curve, r, cfg, orient }
    }

    pub fn curve(&self) -> &PlaneCurve {
        &self.curve
    }

    pub fn ratio(&self) -> Complex64 {
        self.r
    }

    pub fn config(&self) -> &TraceConfig {
        &self.cfg
    }

    fn tol(&self) -> f64 {
        self.curve.tolerances().trace
    }

    /// The three triangle vertices placed by `(t, s)`.
    pub fn vertices(&self, t: f64, s: f64) -> [Complex64; 3] {
        let a = self.curve.eval(t);
        let b = self.curve.eval(t + s);
        [a, b, a + self.r * (b - a)]
    }

    pub fn residual(&self, t: f64, s: f64) -> f64 {
        let [_, _, c] = self.vertices(t, s);
        self.curve.signed_distance_raw(c).0
    }

    pub fn residual_eval(&self, t: f64, s: f64) -> ResidualEval {
        let ja = self.curve.jet(t);
        let jb = self.curve.jet(t + s);
        let c = ja.z + self.r * (jb.z - ja.z);
        let (value, foot) = self.curve.signed_distance_raw(c);
        let tangent = self.curve.derivative(foot.t, 1);
        let o = if self.curve.is_ccw() { 1.0 } else { -1.0 };
        let normal = Complex64::new(0.0, -o) * tangent / tangent.norm();
        let dc_dt = (Complex64::new(1.0, 0.0) - self.r) * ja.d1 + self.r * jb.d1;
        let dc_ds = self.r * jb.d1;
        ResidualEval {
            value,
            grad: [(normal.conj() * dc_dt).re, (normal.conj() * dc_ds).re],
        }
    }

    /// Roots of the residual along the edges of a `grid_t x grid_s` grid over
    /// `[0, 1) x [s_min, 1 - s_min]`, refined by bisection.
    pub fn seed_points(&self) -> Result<Vec<CylinderPoint>> {
        let (gt, gs) = (self.cfg.grid_t, self.cfg.grid_s);
        let s_at = |j: usize| {
            self.cfg.s_min + (1.0 - 2.0 * self.cfg.s_min) * j as f64 / (gs - 1) as f64
        };
        let t_at = |i: usize| i as f64 / gt as f64;
        let values: Vec<f64> = (0..gt * gs)
            .map(|idx| self.residual(t_at(idx / gs), s_at(idx % gs)))
            .collect();
        let val = |i: usize, j: usize| values[(i % gt) * gs + j];

        let mut roots = Vec::new();
        for i in 0..gt {
            for j in 0..gs {
                let here = CylinderPoint::new(t_at(i), s_at(j));
                let v = val(i, j);
                if v == 0.0 {
                    roots.push(here);
                    continue;
                }
                if j + 1 < gs && v * val(i, j + 1) < 0.0 {
                    roots.push(self.bisect_edge(here, CylinderPoint::new(t_at(i), s_at(j + 1)), v));
                }
                if v * val(i + 1, j) < 0.0 {
                    let next = CylinderPoint::new(t_at(i) + 1.0 / gt as f64, s_at(j));
                    roots.push(self.bisect_edge(here, next, v));
                }
            }
        }
        if roots.is_empty() {
            return Err(Error::NoSeedsFound { grid_t: gt, grid_s: gs });
        }
        for p in roots.iter_mut() {
            p.t = p.t.rem_euclid(1.0);
        }
        roots.sort_by(|a, b| (a.t, a.s).partial_cmp(&(b.t, b.s)).unwrap());
        roots.dedup_by(|a, b| a.dist(b) < 1e-9);
        Ok(roots)
    }

    fn bisect_edge(&self, mut lo: CylinderPoint, mut hi: CylinderPoint, vlo: f64) -> CylinderPoint {
        let tol = self.tol();
        let slo = vlo.signum();
        for _ in 0..80 {
            let mid = CylinderPoint::new(0.5 * (lo.t + hi.t), 0.5 * (lo.s + hi.s));
            let v = self.residual(mid.t, mid.s);
            if v.abs() <= 0.01 * tol || lo.dist(&hi) < 1e-15 {
                return mid;
            }
            if v.signum() == slo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        CylinderPoint::new(0.5 * (lo.t + hi.t), 0.5 * (lo.s + hi.s))
    }

    /// Oriented unit tangent `orient * (F_s, -F_t) / |grad F|`.
    fn tangent(&self, e: &ResidualEval) -> [f64; 2] {
        let n = e.grad_norm();
        [self.orient * e.grad[1] / n, -self.orient * e.grad[0] / n]
    }

    /// Newton projection of `pred` onto the variety, constrained to the line
    /// through `pred` orthogonal to `dir`.
    pub fn project(&self, pred: CylinderPoint, dir: [f64; 2]) -> Option<(CylinderPoint, ResidualEval, usize)> {
        let tol = self.tol();
        let mut x = pred;
        for it in 0..12 {
            let e = self.residual_eval(x.t, x.s);
            if !e.value.is_finite() {
                return None;
            }
            if e.value.abs() <= 0.1 * tol {
                return Some((x, e, it));
            }
            let (ft, fs) = (e.grad[0], e.grad[1]);
            let det = ft * dir[1] - fs * dir[0];
            if det.abs() <= 1e-10 * e.grad_norm().max(1e-300) {
                return None;
            }
            let g = (x.t - pred.t) * dir[0] + (x.s - pred.s) * dir[1];
            let dt = (-e.value * dir[1] + g * fs) / det;
            let ds = (-ft * g + dir[0] * e.value) / det;
            x = CylinderPoint::new(x.t + dt, x.s + ds);
            if !(x.s > 0.0 && x.s < 1.0) {
                return None;
            }
        }
        let e = self.residual_eval(x.t, x.s);
        (e.value.abs() <= tol).then_some((x, e, 12))
    }

    /// Projects onto the variety along the `s` direction at fixed `t`.
    fn project_vertical(&self, t: f64, s0: f64) -> Option<f64> {
        let tol = self.tol();
        let mut s = s0;
        for _ in 0..30 {
            let e = self.residual_eval(t, s);
            if e.value.abs() <= 0.01 * tol {
                return Some(s);
            }
            if e.grad[1] == 0.0 {
                return None;
            }
            s -= e.value / e.grad[1];
            if !(s > 0.0 && s < 1.0) {
                return None;
            }
        }
        let e = self.residual_eval(t, s);
        (e.value.abs() <= tol).then_some(s)
    }

    /// Pseudo-arclength continuation from `seed` until the path closes,
    /// either as a bounded loop or modulo a deck shift.
    pub fn trace_component(&self, seed: CylinderPoint) -> Result<VarietyPath> {
        let tol = self.tol();
        let cfg = &self.cfg;
        let e0 = self.residual_eval(seed.t, seed.s);
        if e0.grad_norm() < 1e-8 {
            return Err(Error::SingularPoint { t: seed.t, s: seed.s, gradient: e0.grad_norm() });
        }
        let (start, e0) = if e0.value.abs() <= 0.1 * tol {
            (seed, e0)
        } else {
            let n = e0.grad_norm();
            let dir = [e0.grad[1] / n, -e0.grad[0] / n];
            let (p, e, _) = self.project(seed, dir).ok_or(Error::SingularPoint {
                t: seed.t,
                s: seed.s,
                gradient: n,
            })?;
            (p, e)
        };
        let tau0 = self.tangent(&e0);

        let mut samples = vec![start];
        let mut x = start;
        let mut tau = tau0;
        let mut h = 0.2 * cfg.step_max;
        let mut left_start = false;

        for _ in 0..cfg.max_steps {
            let pred = CylinderPoint::new(x.t + h * tau[0], x.s + h * tau[1]);
            let accepted = self.project(pred, tau).and_then(|(p, e, iters)| {
                if e.grad_norm() < 1e-8 {
                    return None;
                }
                let nt = self.tangent(&e);
                let cos = nt[0] * tau[0] + nt[1] * tau[1];
                let drift = p.dist(&pred);
                (cos > 0.995 && drift < 0.25 * h).then_some((p, nt, iters, cos))
            });
            let Some((p, nt, iters, cos)) = accepted else {
                h *= 0.5;
                if h < cfg.step_min {
                    let e = self.residual_eval(x.t, x.s);
                    if e.grad_norm() < 1e-6 {
                        return Err(Error::SingularPoint { t: x.t, s: x.s, gradient: e.grad_norm() });
                    }
                    return Err(Error::StepCollapse { t: x.t, s: x.s, step_min: cfg.step_min });
                }
                continue;
            };
            if !(p.s > 0.0 && p.s < 1.0) {
                return Err(Error::LeftDomain { t: p.t, s: p.s });
            }

            let dt = p.t - start.t;
            let k = dt.round() as i64;
            let radius = 10.0 * h;
            let offset = CylinderPoint::new(dt - k as f64, p.s - start.s);
            let gap = offset.t.hypot(offset.s);
            if k.abs() <= cfg.k_max {
                if !left_start && gap > radius {
                    left_start = true;
                }
                let aligned = nt[0] * tau0[0] + nt[1] * tau0[1] > 0.5;
                // Remaining distance to the closing point along the tangent.
                let ahead = -(offset.t * nt[0] + offset.s * nt[1]);
                if left_start && aligned && gap < radius && ahead <= h {
                    if ahead > 0.0 {
                        samples.push(p);
                    }
                    return Ok(self.finish(samples, k));
                }
            }

            samples.push(p);
            x = p;
            tau = nt;
            if iters <= 3 && cos > 0.9995 {
                h = (1.5 * h).min(cfg.step_max);
            }
        }
        Err(Error::NoClosure { steps: cfg.max_steps })
    }

    fn finish(&self, samples: Vec<CylinderPoint>, k: i64) -> VarietyPath {
        let s_margin = VarietyPath::margin_of(&samples);
        VarietyPath { samples, period_shift: k, s_margin, normalized: false }
    }

    /// Traces every component reached from the seed grid. Components are
    /// returned sorted by their smallest `(t mod 1, s)` sample.
    pub fn trace_all(&self) -> Result<Vec<VarietyPath>> {
        let seeds = self.seed_points()?;
        let mut index = SegmentIndex::new(0.01);
        let mut paths: Vec<VarietyPath> = Vec::new();
        for seed in seeds {
            if index.near(seed, 2e-4) {
                continue;
            }
            let path = self.trace_component(seed)?;
            index.insert_path(&path);
            paths.push(path);
        }
        paths.sort_by(|a, b| a.sort_key().partial_cmp(&b.sort_key()).unwrap());
        Ok(paths)
    }

    /// Signed count of crossings of all `paths` with the slice `{t} x (0, 1)`.
    /// Crossings are signed by the direction of travel in `t`, with paths
    /// oriented so that the periodic component advances in `t`.
    pub fn vertical_index(&self, paths: &[VarietyPath], t: f64) -> Result<i64> {
        let mut slice = t;
        for attempt in 0..=self.cfg.max_retries {
            if let Some(total) = slice_crossings(paths, slice) {
                return Ok(total);
            }
            slice = t + 0.618_033_988_749_895e-3 * (attempt + 1) as f64;
        }
        Err(Error::NonGenericSlice { retries: self.cfg.max_retries })
    }

    /// Reparameterizes a periodic path by arclength over one deck period,
    /// starting at its lowest crossing of `t = 0 (mod 1)`, and resamples it at
    /// `n_path` points projected back onto the variety.
    pub fn normalize_period(&self, path: &VarietyPath) -> Result<VarietyPath> {
        self.normalize_period_with(path, self.cfg.n_path)
    }

    /// [`Variety::normalize_period`] with an explicit sample count.
    pub fn normalize_period_with(&self, path: &VarietyPath, n_path: usize) -> Result<VarietyPath> {
        let mut path = path.clone();
        if path.period_shift < 0 {
            path = reverse_path(&path);
        }
        let k = path.period_shift;
        if k == 0 {
            return Err(Error::NotPeriodic(k));
        }
        let n = path.samples.len() as i64;

        // Lowest crossing of an integer t.
        let mut best: Option<(f64, i64, i64, f64)> = None; // (s, segment, m, frac)
        for i in 0..n {
            let p = path.lifted(i);
            let q = path.lifted(i + 1);
            let (lo, hi) = if p.t <= q.t { (p.t, q.t) } else { (q.t, p.t) };
            let m_lo = lo.ceil() as i64;
            let m_hi = hi.floor() as i64;
            for m in m_lo..=m_hi {
                let m_f = m as f64;
                if (p.t < q.t && m_f <= p.t) || (p.t > q.t && m_f >= p.t) {
                    continue;
                }
                let frac = if q.t == p.t { 0.0 } else { (m_f - p.t) / (q.t - p.t) };
                let s = p.s + frac * (q.s - p.s);
                if best.is_none_or(|b| s < b.0) {
                    best = Some((s, i, m, frac));
                }
            }
        }
        let (s_guess, seg, m, _) = best.ok_or(Error::NotPeriodic(k))?;
        let s0 = self
            .project_vertical(m as f64, s_guess)
            .ok_or(Error::SingularPoint { t: m as f64, s: s_guess, gradient: 0.0 })?;
        let origin = CylinderPoint::new(0.0, s0);

        // Polyline from the crossing through one full period.
        let mut poly = Vec::with_capacity(n as usize + 2);
        poly.push(origin);
        for j in 1..=n {
            let p = path.lifted(seg + j).deck(-m);
            if p.dist(&origin) > 0.0 && p.dist(&origin.deck(k)) > 0.0 {
                poly.push(p);
            }
        }
        poly.push(origin.deck(k));

        let mut samples = self.resample(&poly, n_path)?;
        for _ in 0..8 {
            let mut closed = samples.clone();
            closed.push(origin.deck(k));
            let next = self.resample(&closed, n_path)?;
            let moved = next
                .iter()
                .zip(&samples)
                .map(|(a, b)| a.dist(b))
                .fold(0.0, f64::max);
            samples = next;
            if moved < 1e-13 {
                break;
            }
        }
        let s_margin = VarietyPath::margin_of(&samples);
        Ok(VarietyPath { samples, period_shift: k, s_margin, normalized: true })
    }

    fn resample(&self, poly: &[CylinderPoint], n_out: usize) -> Result<Vec<CylinderPoint>> {
        let mut cum = Vec::with_capacity(poly.len());
        cum.push(0.0);
        for w in poly.windows(2) {
            cum.push(cum.last().unwrap() + w[0].dist(&w[1]));
        }
        let total = *cum.last().unwrap();
        let mut out = Vec::with_capacity(n_out);
        out.push(poly[0]);
        let mut seg = 0;
        for j in 1..n_out {
            let target = total * j as f64 / n_out as f64;
            while seg + 2 < cum.len() && cum[seg + 1] < target {
                seg += 1;
            }
            let (p, q) = (poly[seg], poly[seg + 1]);
            let len = cum[seg + 1] - cum[seg];
            let frac = if len > 0.0 { (target - cum[seg]) / len } else { 0.0 };
            let pred = CylinderPoint::new(p.t + frac * (q.t - p.t), p.s + frac * (q.s - p.s));
            let dir = if len > 0.0 {
                [(q.t - p.t) / len, (q.s - p.s) / len]
            } else {
                let e = self.residual_eval(pred.t, pred.s);
                self.tangent(&e)
            };
            let (x, _, _) = self.project(pred, dir).ok_or(Error::SingularPoint {
                t: pred.t,
                s: pred.s,
                gradient: 0.0,
            })?;
            out.push(x);
        }
        Ok(out)
    }

    /// The variety point at parameter `u` of a normalized path: linear
    /// interpolation projected back onto the variety.
    pub fn point_at(&self, path: &VarietyPath, u: f64) -> CylinderPoint {
        let pred = path.interpolate(u);
        let n = path.samples.len() as f64;
        let j = (u * n).floor() as i64;
        let (p, q) = (path.lifted(j), path.lifted(j + 1));
        let len = p.dist(&q);
        if len == 0.0 {
            return pred;
        }
        let dir = [(q.t - p.t) / len, (q.s - p.s) / len];
        self.project(pred, dir).map(|(x, _, _)| x).unwrap_or(pred)
    }
}

fn reverse_path(path: &VarietyPath) -> VarietyPath {
    let mut samples = path.samples.clone();
    samples.reverse();
    VarietyPath {
        samples,
        period_shift: -path.period_shift,
        s_margin: path.s_margin,
        normalized: false,
    }
}

/// Total signed crossings with `t = slice (mod 1)`; `None` when a sample sits
/// on the slice.
fn slice_crossings(paths: &[VarietyPath], slice: f64) -> Option<i64> {
    let mut total = 0;
    for path in paths {
        let n = path.samples.len() as i64;
        for i in 0..n {
            let p = path.lifted(i);
            let q = path.lifted(i + 1);
            let a = p.t - slice;
            let b = q.t - slice;
            if (a - a.round()).abs() < 1e-12 {
                return None;
            }
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let count = (hi.floor() - lo.floor()) as i64;
            if count != 0 {
                total += if b > a { count } else { -count };
            }
        }
    }
    Some(total)
}

/// Uniform hash of traced segments on the cylinder.
struct SegmentIndex {
    cell: f64,
    cells: HashMap<(i64, i64), Vec<(CylinderPoint, CylinderPoint)>>,
}

impl SegmentIndex {
    fn new(cell: f64) -> Self {
        Self { cell, cells: HashMap::new() }
    }

    fn key(&self, t: f64, s: f64) -> (i64, i64) {
        ((t / self.cell).floor() as i64, (s / self.cell).floor() as i64)
    }

    fn insert_path(&mut self, path: &VarietyPath) {
        let n = path.samples.len() as i64;
        for i in 0..n {
            let p = path.lifted(i);
            let q = path.lifted(i + 1);
            let shift = p.t.div_euclid(1.0);
            let p = CylinderPoint::new(p.t - shift, p.s);
            let q = CylinderPoint::new(q.t - shift, q.s);
            let lo = self.key(p.t.min(q.t), p.s.min(q.s));
            let hi = self.key(p.t.max(q.t), p.s.max(q.s));
            for a in lo.0..=hi.0 {
                for b in lo.1..=hi.1 {
                    self.cells.entry((a, b)).or_default().push((p, q));
                }
            }
        }
    }

    fn near(&self, x: CylinderPoint, radius: f64) -> bool {
        for shift in [-1.0, 0.0, 1.0] {
            let y = CylinderPoint::new(x.t.rem_euclid(1.0) + shift, x.s);
            let (ka, kb) = self.key(y.t, y.s);
            for a in ka - 1..=ka + 1 {
                for b in kb - 1..=kb + 1 {
                    if let Some(segs) = self.cells.get(&(a, b)) {
                        if segs.iter().any(|(p, q)| point_segment_dist(y, *p, *q) < radius) {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }
}

fn point_segment_dist(x: CylinderPoint, p: CylinderPoint, q: CylinderPoint) -> f64 {
    let (dx, ds) = (q.t - p.t, q.s - p.s);
    let len2 = dx * dx + ds * ds;
    let lambda = if len2 > 0.0 {
        (((x.t - p.t) * dx + (x.s - p.s) * ds) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (x.t - p.t - lambda * dx).hypot(x.s - p.s - lambda * ds)
}

/// Residual `F(t, s)` for a curve and triangle shape.
pub fn residual(curve: &PlaneCurve, r: Complex64, t: f64, s: f64) -> f64 {
    Variety::new(curve.clone(), r, TraceConfig::default()).residual(t, s)
}
