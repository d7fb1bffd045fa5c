//! Fourth-vertex sweep along the periodic component and the two-way
//! alternative: either some similar copy of the quadrangle is inscribed, or two
//! distinct similar copies share their `a, b, c` vertices on the curve and
//! their fourth vertex in the plane.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curve::N_CHECK;
use crate::polyline::{self, shoelace_area, winding_of_samples};
use crate::variety::{TraceConfig, Variety, VarietyPath};
use crate::{Error, PlaneCurve, Quadrangle, Result, ShapeRatios, SimilarityMap};

/// Pairs of sweep parameters closer than this are treated as the same point.
pub const U_SEP: f64 = 1e-3;
/// Loops of the `d'` sweep with smaller enclosed area are discarded.
pub const MIN_LOOP_AREA: f64 = 1e-10;

/// The images `a'(u), b'(u), c'(u), d'(u)` along a normalized path.
#[derive(Debug, Clone)]
pub struct FourthVertexSweep {
    pub variety: Variety,
    pub quad: Quadrangle,
    pub ratios: ShapeRatios,
    pub path: VarietyPath,
    pub a_samples: Vec<Complex64>,
    pub b_samples: Vec<Complex64>,
    pub c_samples: Vec<Complex64>,
    pub d_samples: Vec<Complex64>,
    /// Largest `|F|` over the path samples.
    pub c_residual: f64,
}

impl FourthVertexSweep {
    pub fn new(variety: Variety, quad: &Quadrangle, path: &VarietyPath) -> Result<Self> {
        let ratios = quad.shape_ratios()?;
        let path = if path.normalized { path.clone() } else { variety.normalize_period(path)? };
        let n = path.len();
        let (mut a_s, mut b_s, mut c_s, mut d_s) =
            (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
        let mut c_residual: f64 = 0.0;
        for p in &path.samples {
            let [a, b, c] = variety.vertices(p.t, p.s);
            c_residual = c_residual.max(variety.curve().signed_distance_raw(c).0.abs());
            a_s.push(a);
            b_s.push(b);
            c_s.push(c);
            d_s.push(a + ratios.q * (b - a));
        }
        Ok(Self {
            variety,
            quad: *quad,
            ratios,
            path,
            a_samples: a_s,
            b_samples: b_s,
            c_samples: c_s,
            d_samples: d_s,
            c_residual,
        })
    }

    pub fn len(&self) -> usize {
        self.path.len()
    }

    pub fn is_empty(&self) -> bool {
        self.path.is_empty()
    }

    /// `[a', b', c', d']` at an arbitrary sweep parameter.
    pub fn vertices_at(&self, u: f64) -> [Complex64; 4] {
        let p = self.variety.point_at(&self.path, u);
        let [a, b, c] = self.variety.vertices(p.t, p.s);
        [a, b, c, a + self.ratios.q * (b - a)]
    }

    /// `d d'/du`, using the chord direction of the sample polyline for
    /// `(t, s)'(u)`.
    fn d_velocity(&self, u: f64) -> Complex64 {
        let n = self.path.len() as f64;
        let j = (u * n).floor() as i64;
        let (p, q) = (self.path.lifted(j), self.path.lifted(j + 1));
        let (tu, su) = ((q.t - p.t) * n, (q.s - p.s) * n);
        let x = self.variety.point_at(&self.path, u);
        let curve = self.variety.curve();
        let fa = curve.derivative(x.t, 1);
        let fb = curve.derivative(x.t + x.s, 1);
        let one = Complex64::new(1.0, 0.0);
        (one - self.ratios.q) * fa * tu + self.ratios.q * fb * (tu + su)
    }

    fn map_at(&self, u: f64) -> Result<(SimilarityMap, [Complex64; 4])> {
        let v = self.vertices_at(u);
        let map = SimilarityMap::from_pair(self.quad.a, self.quad.b, v[0], v[1])?;
        Ok((map, v))
    }

    fn d_residual(&self, u: f64) -> f64 {
        let d = self.vertices_at(u)[3];
        self.variety.curve().signed_distance_raw(d).0
    }
}

pub fn sweep_fourth_vertex(curve: &PlaneCurve, quad: &Quadrangle, path: &VarietyPath) -> Result<FourthVertexSweep> {
    let ratios = quad.shape_ratios()?;
    FourthVertexSweep::new(Variety::new(curve.clone(), ratios.r, TraceConfig::default()), quad, path)
}

/// A similarity placing all four vertices on the curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InscriptionCert {
    pub u: f64,
    pub map: SimilarityMap,
    pub vertices: [Complex64; 4],
    /// Largest `|signed distance|` over the four placed vertices.
    pub residual: f64,
}

/// Two distinct similarities that agree on the fourth vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceCert {
    pub u: [f64; 2],
    pub maps: [SimilarityMap; 2],
    pub point: Complex64,
    /// `|sigma_1(d) - sigma_2(d)|`.
    pub gap: f64,
    /// Largest `|signed distance|` over the six placed `a, b, c` vertices.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InscriptionSearch {
    pub certificates: Vec<InscriptionCert>,
    /// The fourth vertex stays on the curve over most of the sweep; the
    /// certificates are a sample of the family.
    pub continuum: bool,
}

impl InscriptionSearch {
    pub fn maps(&self) -> Vec<SimilarityMap> {
        self.certificates.iter().map(|c| c.map).collect()
    }
}

fn certify(sweep: &FourthVertexSweep, u: f64) -> Result<InscriptionCert> {
    let (map, _) = sweep.map_at(u)?;
    let curve = sweep.variety.curve();
    let vertices = sweep.quad.map(&map).points();
    let residual = vertices
        .iter()
        .map(|z| curve.signed_distance_raw(*z).0.abs())
        .fold(0.0, f64::max);
    Ok(InscriptionCert { u, map, vertices, residual })
}

/// Roots of `u -> signed_distance(d'(u))`, refined by bisection, plus grazing
/// contacts whose refined residual is within `tol.report`.
pub fn find_inscriptions(sweep: &FourthVertexSweep) -> Result<InscriptionSearch> {
    let curve = sweep.variety.curve();
    let tol = curve.tolerances().report;
    let n = sweep.len();
    let phi: Vec<f64> = sweep.d_samples.iter().map(|d| curve.signed_distance_raw(*d).0).collect();

    let on = phi.iter().filter(|v| v.abs() <= tol).count();
    if 2 * on > n {
        let mut certificates = Vec::new();
        for j in (0..n).step_by(n.div_ceil(8)) {
            if phi[j].abs() <= tol {
                certificates.push(certify(sweep, j as f64 / n as f64)?);
            }
        }
        return Ok(InscriptionSearch { certificates, continuum: true });
    }

    let mut roots: Vec<f64> = Vec::new();
    for j in 0..n {
        let (v0, v1) = (phi[j], phi[(j + 1) % n]);
        let u0 = j as f64 / n as f64;
        let u1 = (j + 1) as f64 / n as f64;
        if v0 == 0.0 {
            roots.push(u0);
        } else if v0 * v1 < 0.0 {
            roots.push(bisect_root(|u| sweep.d_residual(u), u0, u1, v0));
        } else if v0.abs() <= 1e-4 {
            let vp = phi[(j + n - 1) % n];
            if v0.abs() <= vp.abs() && v0.abs() <= v1.abs() && vp * v0 > 0.0 && v1 * v0 > 0.0 {
                let u = golden_min(|u| sweep.d_residual(u).abs(), u0 - 1.0 / n as f64, u1);
                if sweep.d_residual(u).abs() <= tol {
                    roots.push(u.rem_euclid(1.0));
                }
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9);

    let certificates = roots.into_iter().map(|u| certify(sweep, u)).collect::<Result<Vec<_>>>()?;
    Ok(InscriptionSearch { certificates, continuum: false })
}

fn bisect_root(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, glo: f64) -> f64 {
    let slo = glo.signum();
    let mut best = (glo.abs(), lo);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let v = g(mid);
        if v.abs() < best.0 {
            best = (v.abs(), mid);
        }
        if v == 0.0 || v.abs() <= 1e-14 || hi - lo <= 1e-16 {
            return mid;
        }
        if v.signum() == slo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    best.1
}

fn golden_min(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut g1, mut g2) = (g(x1), g(x2));
    for _ in 0..80 {
        if g1 < g2 {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - r * (hi - lo);
            g1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + r * (hi - lo);
            g2 = g(x2);
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// A crossing of the closed polyline `d` between parameters `u1 < u2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolylineCoincidence {
    pub u1: f64,
    pub u2: f64,
    pub point: Complex64,
    pub loop_area: f64,
}

/// Self-crossings of the closed sample polyline `d`, with parameters in
/// `[0, 1)`. Crossings closer than `U_SEP` in `u` or cutting off a loop of
/// area below `MIN_LOOP_AREA` are dropped.
pub fn polyline_coincidences(d: &[Complex64]) -> Vec<PolylineCoincidence> {
    let n = d.len();
    let mut out = Vec::new();
    for x in polyline::self_intersections(d, true) {
        let u1 = (x.i as f64 + x.lambda) / n as f64;
        let u2 = (x.j as f64 + x.mu) / n as f64;
        let gap = (u2 - u1).abs();
        if gap.min(1.0 - gap) < U_SEP {
            continue;
        }
        let mut lp = vec![x.point];
        lp.extend((x.i + 1..=x.j).map(|k| d[k % n]));
        let loop_area = shoelace_area(&lp);
        if loop_area.abs() < MIN_LOOP_AREA {
            continue;
        }
        out.push(PolylineCoincidence { u1, u2, point: x.point, loop_area });
    }
    out
}

/// Self-intersections of the `d'` sweep, refined by Newton's method on
/// `d'(u1) = d'(u2)`.
pub fn find_coincidences(sweep: &FourthVertexSweep) -> Result<Vec<CoincidenceCert>> {
    let curve = sweep.variety.curve();
    let mut out: Vec<CoincidenceCert> = Vec::new();
    for cand in polyline_coincidences(&sweep.d_samples) {
        let (mut u1, mut u2) = (cand.u1, cand.u2);
        for _ in 0..40 {
            let g = sweep.vertices_at(u1)[3] - sweep.vertices_at(u2)[3];
            if g.norm() <= 1e-15 {
                break;
            }
            let j1 = sweep.d_velocity(u1);
            let j2 = -sweep.d_velocity(u2);
            let det = j1.re * j2.im - j1.im * j2.re;
            if det.abs() < 1e-300 {
                break;
            }
            let du1 = (-g.re * j2.im + g.im * j2.re) / det;
            let du2 = (-j1.re * g.im + j1.im * g.re) / det;
            u1 += du1;
            u2 += du2;
            if du1.abs().max(du2.abs()) < 1e-15 {
                break;
            }
        }
        let (u1, u2) = (u1.rem_euclid(1.0), u2.rem_euclid(1.0));
        let sep = (u1 - u2).abs();
        if sep.min(1.0 - sep) < U_SEP {
            continue;
        }
        let (m1, v1) = sweep.map_at(u1)?;
        let (m2, v2) = sweep.map_at(u2)?;
        let gap = (v1[3] - v2[3]).norm();
        let residual = v1[..3]
            .iter()
            .chain(&v2[..3])
            .map(|z| curve.signed_distance_raw(*z).0.abs())
            .fold(0.0, f64::max);
        let cert = CoincidenceCert {
            u: [u1.min(u2), u1.max(u2)],
            maps: if u1 <= u2 { [m1, m2] } else { [m2, m1] },
            point: 0.5 * (v1[3] + v2[3]),
            gap,
            residual,
        };
        let dup = out.iter().any(|c| {
            (c.u[0] - cert.u[0]).abs() < 1e-9 && (c.u[1] - cert.u[1]).abs() < 1e-9
        });
        if !dup {
            out.push(cert);
        }
    }
    Ok(out)
}

/// Green areas `(i/2) closed-integral x d(conj x)` of the four vertex sweeps,
/// together with the signed area of the curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaReport {
    pub s_a: f64,
    pub s_b: f64,
    pub s_c: f64,
    pub s_d: f64,
    pub s_curve: f64,
    /// `max |S_x - S_C|` over `x` in `a, b, c, d`.
    pub max_deviation: f64,
}

impl AreaReport {
    pub fn relative_deviation(&self) -> f64 {
        self.max_deviation / self.s_curve.abs()
    }
}

pub fn area_report(sweep: &FourthVertexSweep) -> AreaReport {
    let s_a = shoelace_area(&sweep.a_samples);
    let s_b = shoelace_area(&sweep.b_samples);
    let s_c = shoelace_area(&sweep.c_samples);
    let s_d = shoelace_area(&sweep.d_samples);
    let s_curve = sweep.variety.curve().signed_area();
    let max_deviation = [s_a, s_b, s_c, s_d].iter().map(|s| (s - s_curve).abs()).fold(0.0, f64::max);
    AreaReport { s_a, s_b, s_c, s_d, s_curve, max_deviation }
}

/// Turns of `b' - a'` and of `d' - a'` over one period.
pub fn rotation_numbers(sweep: &FourthVertexSweep) -> (i64, i64) {
    let ba: Vec<Complex64> = sweep.a_samples.iter().zip(&sweep.b_samples).map(|(a, b)| b - a).collect();
    let da: Vec<Complex64> = sweep.a_samples.iter().zip(&sweep.d_samples).map(|(a, d)| d - a).collect();
    (winding_of_samples(&ba).round() as i64, winding_of_samples(&da).round() as i64)
}

pub fn rotation_number(sweep: &FourthVertexSweep) -> i64 {
    rotation_numbers(sweep).0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InscribeConfig {
    pub trace: TraceConfig,
    /// Perturbation retries after a tracing failure; magnitudes halve from
    /// `perturb_start`.
    pub max_perturbations: usize,
    pub perturb_start: f64,
    pub seed: u64,
}

impl Default for InscribeConfig {
    fn default() -> Self {
        Self { trace: TraceConfig::default(), max_perturbations: 6, perturb_start: 1e-3, seed: 0 }
    }
}

/// Per-component outcome of the sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub period_shift: i64,
    pub s_margin: f64,
    pub samples: usize,
    pub c_residual: f64,
    pub areas: AreaReport,
    pub rotation_ba: i64,
    pub rotation_da: i64,
    /// Range of the signed distance of `d'` over the samples.
    pub d_distance_range: [f64; 2],
    pub inscriptions: Vec<InscriptionCert>,
    pub continuum: bool,
    pub coincidences: Vec<CoincidenceCert>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InscriptionReport {
    pub alternative: u8,
    /// Alternative 1: every inscribing similarity found. Alternative 2: the
    /// pair of the first coincidence.
    pub similarities: Vec<SimilarityMap>,
    pub continuum: bool,
    /// Worst certificate residual of the reported alternative.
    pub residual: f64,
    pub areas: AreaReport,
    pub rotation_number: i64,
    pub perturbation_used: f64,
    pub vertical_index: i64,
    pub components: Vec<ComponentReport>,
}

impl InscriptionReport {
    pub fn inscriptions(&self) -> impl Iterator<Item = &InscriptionCert> {
        self.components.iter().flat_map(|c| c.inscriptions.iter())
    }

    pub fn coincidences(&self) -> impl Iterator<Item = &CoincidenceCert> {
        self.components.iter().flat_map(|c| c.coincidences.iter())
    }
}

fn is_tracing_failure(e: &Error) -> bool {
    matches!(
        e,
        Error::SingularPoint { .. }
            | Error::StepCollapse { .. }
            | Error::NoClosure { .. }
            | Error::LeftDomain { .. }
            | Error::NonGenericSlice { .. }
            | Error::NotPeriodic(_)
            | Error::PerturbationBreaksSimplicity { .. }
    )
}

/// Per-component analysis of a traced variety.
pub fn analyze_component(variety: &Variety, quad: &Quadrangle, path: &VarietyPath) -> Result<(FourthVertexSweep, ComponentReport)> {
    let sweep = FourthVertexSweep::new(variety.clone(), quad, path)?;
    let areas = area_report(&sweep);
    let (rotation_ba, rotation_da) = rotation_numbers(&sweep);
    let curve = variety.curve();
    let (lo, hi) = sweep
        .d_samples
        .iter()
        .map(|d| curve.signed_distance_raw(*d).0)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let search = find_inscriptions(&sweep)?;
    let coincidences = if search.certificates.is_empty() { find_coincidences(&sweep)? } else { Vec::new() };
    let report = ComponentReport {
        period_shift: sweep.path.period_shift,
        s_margin: sweep.path.s_margin,
        samples: sweep.len(),
        c_residual: sweep.c_residual,
        areas,
        rotation_ba,
        rotation_da,
        d_distance_range: [lo, hi],
        inscriptions: search.certificates,
        continuum: search.continuum,
        coincidences,
    };
    Ok((sweep, report))
}

fn inscribe_once(
    curve: &PlaneCurve,
    quad: &Quadrangle,
    ratios: ShapeRatios,
    cfg: &InscribeConfig,
    sweeps: &mut Vec<Vec<Complex64>>,
) -> Result<InscriptionReport> {
    let variety = Variety::new(curve.clone(), ratios.r, cfg.trace);
    let paths = variety.trace_all()?;
    let vertical_index = variety.vertical_index(&paths, 0.0)?;
    let mut components = Vec::new();
    sweeps.clear();
    for path in paths.iter().filter(|p| p.is_periodic()) {
        let (sweep, report) = analyze_component(&variety, quad, path)?;
        sweeps.push(sweep.d_samples);
        components.push(report);
    }
    if components.is_empty() {
        return Err(Error::NotPeriodic(0));
    }
    let tol = curve.tolerances().report;
    let areas = components[0].areas;
    let rotation_number = components[0].rotation_ba;

    let inscriptions: Vec<&InscriptionCert> = components.iter().flat_map(|c| &c.inscriptions).collect();
    if !inscriptions.is_empty() {
        let residual = inscriptions.iter().map(|c| c.residual).fold(0.0, f64::max);
        if residual > tol {
            return Err(Error::TheoremViolation(format!(
                "inscription certificate residual {residual:e} exceeds {tol:e}"
            )));
        }
        return Ok(InscriptionReport {
            alternative: 1,
            similarities: inscriptions.iter().map(|c| c.map).collect(),
            continuum: components.iter().any(|c| c.continuum),
            residual,
            areas,
            rotation_number,
            perturbation_used: 0.0,
            vertical_index,
            components,
        });
    }

    let good = components
        .iter()
        .flat_map(|c| &c.coincidences)
        .find(|c| c.gap <= tol && c.residual <= tol)
        .copied();
    if let Some(cert) = good {
        return Ok(InscriptionReport {
            alternative: 2,
            similarities: cert.maps.to_vec(),
            continuum: false,
            residual: cert.gap.max(cert.residual),
            areas,
            rotation_number,
            perturbation_used: 0.0,
            vertical_index,
            components,
        });
    }

    let diag: Vec<String> = components
        .iter()
        .map(|c| {
            format!(
                "component k={} margin={:.3e} d-distance range [{:.3e}, {:.3e}] coincidences={} areas dev={:.3e}",
                c.period_shift,
                c.s_margin,
                c.d_distance_range[0],
                c.d_distance_range[1],
                c.coincidences.len(),
                c.areas.max_deviation
            )
        })
        .collect();
    Err(Error::TheoremViolation(format!("neither alternative found; {}", diag.join("; "))))
}

/// Report together with the curve actually used and the fourth-vertex
/// sweep of every periodic component.
#[derive(Debug, Clone)]
pub struct Inscription {
    pub report: InscriptionReport,
    pub curve: PlaneCurve,
    pub d_sweeps: Vec<Vec<Complex64>>,
}

/// Full pipeline: trace the variety of the triangle `a, b, c`, sweep the
/// fourth vertex along every periodic component and certify one of the two
/// alternatives. The curve is first oriented counter-clockwise. When tracing
/// fails on a non-generic curve, a small deterministic perturbation is
/// applied and recorded in the report.
pub fn inscribe(curve: &PlaneCurve, quad: &Quadrangle, cfg: &InscribeConfig) -> Result<InscriptionReport> {
    inscribe_detailed(curve, quad, cfg).map(|i| i.report)
}

pub fn inscribe_detailed(curve: &PlaneCurve, quad: &Quadrangle, cfg: &InscribeConfig) -> Result<Inscription> {
    curve.validate(N_CHECK)?;
    quad.validate(curve.tolerances())?;
    let ratios = quad.shape_ratios()?;
    let base = curve.to_ccw();
    let mut magnitude = 0.0;
    let mut attempt: u64 = 0;
    let mut d_sweeps = Vec::new();
    loop {
        let used = if magnitude == 0.0 { Ok(base.clone()) } else { base.perturb(magnitude, cfg.seed.wrapping_add(attempt)) };
        let result = used.and_then(|c| inscribe_once(&c, quad, ratios, cfg, &mut d_sweeps).map(|r| (r, c)));
        match result {
            Ok((mut report, curve)) => {
                report.perturbation_used = magnitude;
                return Ok(Inscription { report, curve, d_sweeps });
            }
            Err(e) if is_tracing_failure(&e) && (attempt as usize) < cfg.max_perturbations => {
                magnitude = if magnitude == 0.0 { cfg.perturb_start } else { 0.5 * magnitude };
                attempt += 1;
            }
            Err(e) => return Err(e),
        }
    }
}
