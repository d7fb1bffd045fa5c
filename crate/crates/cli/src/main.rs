mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use concyclic_core::io::{self, load_curve, load_quad, to_json};
use concyclic_core::osculating::{find_chords, osculating_circle};
use concyclic_core::nalgebra::Matrix3;
use concyclic_core::sphere::{self, Expr, Parity, SphereField, SphereParams};
use concyclic_core::{
    inscribe_detailed, Complex64, Error, InscribeConfig, PlaneCurve, Quadrangle, Tolerances, TraceConfig, Variety,
};
use serde::Serialize;
use svg::Figure;

#[derive(Parser)]
#[command(name = "concyclic", version, about = "Concyclic quadrangle inscriptions, osculating chords and sphere fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inscribe a concyclic quadrangle in a curve up to similarity.
    Inscribe {
        #[command(flatten)]
        input: CurveQuad,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Green areas of the vertex sweeps along each periodic component.
    Areas {
        #[command(flatten)]
        input: CurveQuad,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Trace the variety of the triangle formed by the first three vertices.
    Trace {
        #[command(flatten)]
        input: CurveQuad,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Chords whose endpoint osculating circles meet at angle alpha.
    Osculate {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Even-plus-odd-cube field on the sphere.
    #[command(name = "sphere-ce", subcommand)]
    SphereCe(SphereCommand),
}

#[derive(Subcommand)]
enum SphereCommand {
    /// Build the field and verify the obstruction along L.
    Build {
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Minimize the spread of the field over rotations of Q(a, b).
    Spread {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long, default_value_t = 200)]
        starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CurveQuad {
    #[arg(long)]
    curve: PathBuf,
    #[arg(long)]
    quad: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relabel the quadrangle so that vertex `n` plays the role of `a`.
    #[arg(long, default_value_t = 0)]
    rotate_roles: usize,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Args)]
struct TolArgs {
    #[arg(long)]
    tol_on_curve: Option<f64>,
    #[arg(long)]
    tol_tangent: Option<f64>,
    #[arg(long)]
    tol_trace: Option<f64>,
    #[arg(long)]
    tol_report: Option<f64>,
    #[arg(long)]
    tol_concyclic: Option<f64>,
    #[arg(long)]
    tol_curvature: Option<f64>,
}

impl TolArgs {
    fn apply(&self, base: Tolerances) -> concyclic_core::Result<Tolerances> {
        let mut t = base;
        let pairs = [
            (&mut t.on_curve, self.tol_on_curve),
            (&mut t.tangent, self.tol_tangent),
            (&mut t.trace, self.tol_trace),
            (&mut t.report, self.tol_report),
            (&mut t.concyclic, self.tol_concyclic),
            (&mut t.curvature, self.tol_curvature),
        ];
        for (slot, v) in pairs {
            if let Some(v) = v {
                *slot = v;
            }
        }
        t.validate()?;
        Ok(t)
    }
}

fn curve_with(path: &Path, tol: &TolArgs) -> concyclic_core::Result<PlaneCurve> {
    let curve = load_curve(path)?;
    let t = tol.apply(*curve.tolerances())?;
    Ok(curve.with_tolerances(t))
}

impl CurveQuad {
    fn load(&self) -> concyclic_core::Result<(PlaneCurve, Quadrangle)> {
        let curve = curve_with(&self.curve, &self.tol)?;
        let quad = load_quad(&self.quad, curve.tolerances())?.rotate_roles(self.rotate_roles);
        Ok((curve, quad))
    }

    fn config(&self) -> InscribeConfig {
        InscribeConfig { seed: self.seed, ..InscribeConfig::default() }
    }
}

fn emit(value: &impl Serialize, path: Option<&Path>) -> anyhow::Result<()> {
    let text = to_json(value)?;
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_svg(fig: &Figure, path: &Path) -> anyhow::Result<()> {
    std::fs::write(path, fig.render(600.0)).with_context(|| format!("writing {}", path.display()))
}

fn curve_outline(curve: &PlaneCurve) -> Vec<Complex64> {
    curve.samples(720)
}

fn run_inscribe(input: &CurveQuad, svg: Option<&Path>, json: Option<&Path>) -> anyhow::Result<()> {
    let (curve, quad) = input.load()?;
    let result = inscribe_detailed(&curve, &quad, &input.config())?;
    emit(&result.report, json)?;
    if let Some(path) = svg {
        let mut fig = Figure::default();
        fig.polygon(curve_outline(&result.curve), "black", 0.003);
        for d in &result.d_sweeps {
            fig.polygon(d.clone(), "#6a9fd8", 0.0015);
        }
        for sigma in result.report.similarities.iter().take(16) {
            let q = quad.map(sigma);
            fig.polygon(q.points().to_vec(), "#c0392b", 0.002);
            for p in q.points() {
                fig.dot(p, "#c0392b", 0.004);
            }
        }
        write_svg(&fig, path)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct AreasOut {
    s_curve: f64,
    perturbation_used: f64,
    components: Vec<ComponentAreas>,
}

#[derive(Serialize)]
struct ComponentAreas {
    period_shift: i64,
    s_a: f64,
    s_b: f64,
    s_c: f64,
    s_d: f64,
    max_deviation: f64,
    relative_deviation: f64,
}

fn run_areas(input: &CurveQuad, json: Option<&Path>) -> anyhow::Result<()> {
    let (curve, quad) = input.load()?;
    let report = inscribe_detailed(&curve, &quad, &input.config())?.report;
    let out = AreasOut {
        s_curve: report.areas.s_curve,
        perturbation_used: report.perturbation_used,
        components: report
            .components
            .iter()
            .map(|c| ComponentAreas {
                period_shift: c.period_shift,
                s_a: c.areas.s_a,
                s_b: c.areas.s_b,
                s_c: c.areas.s_c,
                s_d: c.areas.s_d,
                max_deviation: c.areas.max_deviation,
                relative_deviation: c.areas.relative_deviation(),
            })
            .collect(),
    };
    emit(&out, json)
}

#[derive(Serialize)]
struct TraceOut {
    ratio: [f64; 2],
    vertical_index: i64,
    paths: Vec<PathOut>,
}

#[derive(Serialize)]
struct PathOut {
    period_shift: i64,
    s_margin: f64,
    samples: Vec<[f64; 2]>,
}

fn run_trace(input: &CurveQuad, svg: Option<&Path>, json: Option<&Path>) -> anyhow::Result<()> {
    let (curve, quad) = input.load()?;
    let r = quad.shape_ratios()?.r;
    let variety = Variety::new(curve.to_ccw(), r, TraceConfig::default());
    let paths = variety.trace_all()?;
    let vertical_index = variety.vertical_index(&paths, 0.0)?;
    let mut out = TraceOut { ratio: [r.re, r.im], vertical_index, paths: Vec::new() };
    for p in &paths {
        let p = if p.is_periodic() { variety.normalize_period(p)? } else { p.clone() };
        out.paths.push(PathOut {
            period_shift: p.period_shift,
            s_margin: p.s_margin,
            samples: p.samples.iter().map(|q| [q.t, q.s]).collect(),
        });
    }
    emit(&out, json)?;
    if let Some(path) = svg {
        let mut fig = Figure::default();
        let frame = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)].map(|(x, y)| Complex64::new(x, y));
        fig.polygon(frame.to_vec(), "#999999", 0.002);
        for p in &out.paths {
            let mut run: Vec<Complex64> = Vec::new();
            let mut prev: Option<f64> = None;
            for [t, s] in &p.samples {
                let w = t.rem_euclid(1.0);
                if prev.is_some_and(|q| (w - q).abs() > 0.5) {
                    fig.polyline(std::mem::take(&mut run), "#1f4e79", 0.003);
                }
                run.push(Complex64::new(w, *s));
                prev = Some(w);
            }
            fig.polyline(run, "#1f4e79", 0.003);
        }
        write_svg(&fig, path)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct OsculateOut {
    alpha: f64,
    continuum: bool,
    solutions: Vec<concyclic_core::ChordSolution>,
}

fn run_osculate(curve: &Path, alpha: f64, tol: &TolArgs, svg: Option<&Path>, json: Option<&Path>) -> anyhow::Result<()> {
    let curve = curve_with(curve, tol)?.to_ccw();
    let search = find_chords(&curve, alpha)?;
    emit(&OsculateOut { alpha, continuum: search.continuum, solutions: search.solutions.clone() }, json)?;
    if let Some(path) = svg {
        let mut fig = Figure::default();
        fig.polygon(curve_outline(&curve), "black", 0.003);
        for s in search.solutions.iter().take(32) {
            fig.polyline(vec![s.a, s.b], "#c0392b", 0.002).dot(s.a, "#c0392b", 0.004);
            if let Ok(circle) = osculating_circle(&curve, s.a_t) {
                let ring = (0..=180).map(|j| circle.point(std::f64::consts::TAU * j as f64 / 180.0)).collect();
                fig.polyline(ring, "#6a9fd8", 0.0015);
            }
        }
        write_svg(&fig, path)?;
    }
    Ok(())
}

fn sphere_params(path: Option<&Path>) -> concyclic_core::Result<SphereParams> {
    path.map_or(Ok(SphereParams::default()), |p| io::load_json(p, "sphere parameter"))
}

fn run_sphere_build(params: Option<&Path>, out: Option<&Path>, seed: u64) -> anyhow::Result<()> {
    let c = sphere::build(&sphere_params(params)?)?;
    let report = c.report(1000, seed);
    emit(&report, out)?;
    if !report.passed() {
        let failed: Vec<&str> = report
            .checks
            .iter()
            .chain(&report.obstruction.checks)
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect();
        anyhow::bail!("verification failed: {}", failed.join(", "));
    }
    Ok(())
}

#[derive(Serialize)]
struct SpreadOut {
    a: f64,
    b: f64,
    starts: usize,
    seed: u64,
    field: sphere::SpreadResult,
    /// The same search for the linear field `z`.
    control: sphere::SpreadResult,
    /// Spread of the field at the identity rotation.
    identity: f64,
}

fn run_sphere_spread(a: f64, b: f64, starts: usize, seed: u64, params: Option<&Path>, json: Option<&Path>) -> anyhow::Result<()> {
    let q = sphere::quadruple(a, b)?;
    if starts == 0 {
        return Err(Error::Input("--starts must be positive".into()).into());
    }
    let c = sphere::build(&sphere_params(params)?)?;
    let z = SphereField::new("z", Expr::z(), Parity::Odd);
    let out = SpreadOut {
        a,
        b,
        starts,
        seed,
        field: sphere::min_spread(&c.f, &q, starts, seed),
        control: sphere::min_spread(&z, &q, starts.min(8), seed),
        identity: sphere::spread(&c.f, &q, &Matrix3::identity())?,
    };
    emit(&out, json)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::TheoremViolation(_)) => 3,
        Some(e) if e.is_validation() => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Inscribe { input, svg, json } => run_inscribe(input, svg.as_deref(), json.as_deref()),
        Command::Areas { input, json } => run_areas(input, json.as_deref()),
        Command::Trace { input, svg, json } => run_trace(input, svg.as_deref(), json.as_deref()),
        Command::Osculate { curve, alpha, tol, svg, json } => run_osculate(curve, *alpha, tol, svg.as_deref(), json.as_deref()),
        Command::SphereCe(SphereCommand::Build { params, out, seed }) => run_sphere_build(params.as_deref(), out.as_deref(), *seed),
        Command::SphereCe(SphereCommand::Spread { a, b, starts, seed, params, json }) => {
            run_sphere_spread(*a, *b, *starts, *seed, params.as_deref(), json.as_deref())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = exit_code(&e);
            eprintln!("error: {e:#}");
            if code == 3 {
                eprintln!("diagnostics: {e:?}");
            }
            ExitCode::from(code)
        }
    }
}
