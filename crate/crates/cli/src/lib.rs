//! Command-line front end for the `quatsurf` checks.
//!
//! Every run ends in one of four exit codes: [`EXIT_PASS`], [`EXIT_CHECK_FAILED`],
//! [`EXIT_CONFIG`] or [`EXIT_INTERNAL`]. Reports are JSON documents with sorted
//! keys and 17-significant-digit floats; the schema is in `docs/report-schema.md`.

pub mod report;

use clap::{Parser, Subcommand, ValueEnum};
use quatsurf::calculus::{angles, gauss_curvature, metric_factor};
use quatsurf::checkers::{cartan_residual, check_minimal_cp, check_totally_real, full_report, PropertyEntry, ReportTolerances, Target};
use quatsurf::families::{lift_span_rank, make_classified, make_exponential, ClassifiedSurface, ExponentialFamily, LiftVariant};
use quatsurf::gauge::{horizontalize, integrability_residual, loop_holonomy, GaugeField, SmoothGauge};
use quatsurf::harmonic::{build_sequence, check_prop35, isotropy_order, Isotropy};
use quatsurf::linalg::{hpoint_distance, twistor_project};
use quatsurf::scan::{constraint_scan, scan_fixed};
use quatsurf::tolerances::{HOLONOMY, ISOTROPY, NON_INTEGRABLE};
use quatsurf::{Cell, Error, FdConfig, Grid, Provider, SurfaceMap, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

pub const SCHEMA: &str = "quatsurf-report/1";

#[derive(Debug, Parser)]
#[command(name = "quatsurf", version, about = "Checks for flat totally real minimal surfaces in HP^n")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArg,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandArg {
    /// Run every property check on a surface.
    Verify,
    /// Angles, metric factor and curvature over the grid.
    Angle,
    /// Harmonic sequence, isotropy order and orthogonality relations.
    Sequence,
    /// Gauge a lift by a random SU(2) field and horizontalize it back.
    Gauge,
    /// Solve the moment conditions and analyse the W block.
    Scan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantArg {
    Clifford,
    Companion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LiftArg {
    Interleaved,
    FullEven,
    FullSigned,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Opts {
    #[arg(long, global = true, value_enum)]
    pub variant: Option<VariantArg>,
    #[arg(long, global = true, value_enum)]
    pub lift: Option<LiftArg>,
    #[arg(long, global = true, default_value_t = 1)]
    pub n: usize,
    /// Top index of the exponential family for `scan`.
    #[arg(long, global = true)]
    pub m: Option<usize>,
    /// Comma-separated θ_k (radians), θ_0 = 0.
    #[arg(long, global = true)]
    pub theta: Option<String>,
    /// Comma-separated r_k summing to 1.
    #[arg(long, global = true)]
    pub weights: Option<String>,
    /// Phase angle of the even-n full lift.
    #[arg(long, global = true, default_value_t = 0.0)]
    pub phase: f64,
    /// Grid resolution WxH.
    #[arg(long, global = true, default_value = "9x9")]
    pub grid: String,
    /// Cell bounds x0,x1,y0,y1.
    #[arg(long, global = true)]
    pub cell: Option<String>,
    /// Check tolerance [default: 1e-10 for scan, 1e-6 for gauge, else 1e-8]
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Harmonic sequence depth [default: n+1 for the relations, 2n+2 for isotropy]
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 64)]
    pub trials: usize,
    /// Use finite-difference jets with this step instead of exact jets.
    #[arg(long, global = true)]
    pub fd_step: Option<f64>,
    #[arg(long, global = true, default_value_t = 1)]
    pub richardson: usize,
    /// Write the JSON report here.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Write the pointwise CSV grid here (`angle` only).
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Print the JSON report on stdout instead of the summary.
    #[arg(long, global = true)]
    pub json: bool,
    /// Record wall-clock timings (reports are then not byte-reproducible).
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurfaceSpec {
    Classified(ClassifiedSurface),
    Family { n: usize, family: ExponentialFamily },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: CommandArg,
    pub surface: SurfaceSpec,
    pub grid: Grid,
    pub tol: f64,
    pub depth: Option<usize>,
    pub m: usize,
    pub seed: u64,
    pub trials: usize,
    pub provider: Provider,
    pub timings: bool,
}

#[derive(Debug)]
pub enum RunError {
    Config(String),
    Internal(String),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidFamily(_) | Error::IncompatibleSpec(_) | Error::InvalidGrid(_) | Error::JetOrder { .. } => {
                RunError::Config(e.to_string())
            }
            other => RunError::Internal(other.to_string()),
        }
    }
}

impl RunError {
    pub fn code(&self) -> i32 {
        match self {
            RunError::Config(_) => EXIT_CONFIG,
            RunError::Internal(_) => EXIT_INTERNAL,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            RunError::Config(m) | RunError::Internal(m) => m,
        }
    }
}

fn cfg_err(msg: impl Into<String>) -> RunError {
    RunError::Config(msg.into())
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>, RunError> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| cfg_err(format!("--{what}: cannot parse {t:?}"))))
        .collect()
}

fn parse_grid(s: &str) -> Result<(usize, usize), RunError> {
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(|| cfg_err("--grid must look like WxH"))?;
    let p = |v: &str| v.trim().parse::<usize>().map_err(|_| cfg_err(format!("--grid: bad size {v:?}")));
    Ok((p(w)?, p(h)?))
}

const DEFAULT_TOL: f64 = 1e-8;

impl RunConfig {
    pub fn from_opts(command: CommandArg, o: &Opts) -> Result<RunConfig, RunError> {
        let n = o.n;
        if n == 0 || n > 8 {
            return Err(cfg_err("--n must be between 1 and 8"));
        }
        let surface = match (&o.theta, &o.weights) {
            (Some(t), Some(w)) => {
                if o.variant.is_some() || o.lift.is_some() {
                    return Err(cfg_err("give either --variant/--lift or --theta/--weights"));
                }
                SurfaceSpec::Family {
                    n,
                    family: ExponentialFamily {
                        thetas: parse_list(t, "theta")?,
                        weights: parse_list(w, "weights")?,
                        ambient_slots: 2 * n + 2,
                    },
                }
            }
            (None, None) => {
                let variant = o.variant.unwrap_or(VariantArg::Clifford);
                let lift = o.lift.unwrap_or(match variant {
                    VariantArg::Clifford => LiftArg::Interleaved,
                    VariantArg::Companion => LiftArg::FullSigned,
                });
                let base = match variant {
                    VariantArg::Clifford => ClassifiedSurface::clifford(n),
                    VariantArg::Companion => ClassifiedSurface::companion(n),
                };
                let spec = ClassifiedSurface {
                    lift_variant: match lift {
                        LiftArg::Interleaved => LiftVariant::InterleavedZeros,
                        LiftArg::FullEven => LiftVariant::FullEvenN,
                        LiftArg::FullSigned => LiftVariant::FullSigned,
                    },
                    phase: C64::from_polar(1.0, o.phase),
                    ..base
                };
                spec.validate()?;
                SurfaceSpec::Classified(spec)
            }
            _ => return Err(cfg_err("--theta and --weights must be given together")),
        };
        if let SurfaceSpec::Family { family, .. } = &surface {
            if command != CommandArg::Scan {
                family.validate()?;
            }
        }
        let (nx, ny) = parse_grid(&o.grid)?;
        if nx < 3 || ny < 3 {
            return Err(cfg_err("grid resolution must be at least 3 per axis"));
        }
        let cell = match &o.cell {
            Some(c) => {
                let v = parse_list(c, "cell")?;
                if v.len() != 4 {
                    return Err(cfg_err("--cell takes four numbers x0,x1,y0,y1"));
                }
                Cell {
                    x0: v[0],
                    x1: v[1],
                    y0: v[2],
                    y1: v[3],
                }
            }
            None => Cell::family(n),
        };
        let grid = Grid::new(cell, nx, ny)?;
        let tol = o.tol.unwrap_or(match command {
            CommandArg::Scan => 1e-10,
            CommandArg::Gauge => 1e-6,
            _ => DEFAULT_TOL,
        });
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(cfg_err("--tol must be positive"));
        }
        let provider = match o.fd_step {
            None => Provider::Exact,
            Some(h) if h > 0.0 && h.is_finite() => Provider::FiniteDifference(FdConfig {
                step: h,
                richardson: o.richardson,
            }),
            Some(_) => return Err(cfg_err("--fd-step must be positive")),
        };
        let m = o.m.unwrap_or(1);
        if command == CommandArg::Scan && o.theta.is_none() && (m == 0 || m > 2 * n + 1 || n > 3) {
            return Err(cfg_err("scan needs n <= 3 and 1 <= m <= 2n+1"));
        }
        Ok(RunConfig {
            command,
            surface,
            grid,
            tol,
            depth: o.depth,
            m,
            seed: o.seed,
            trials: o.trials,
            provider,
            timings: o.timings,
        })
    }

    fn n(&self) -> usize {
        match &self.surface {
            SurfaceSpec::Classified(s) => s.n,
            SurfaceSpec::Family { n, .. } => *n,
        }
    }
}

/// What a run produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub report: Value,
    /// Header plus rows, for `angle`.
    pub csv: Option<(String, Vec<Vec<f64>>)>,
}

struct Built {
    surface: SurfaceMap,
    lift: SurfaceMap,
    classified: bool,
}

fn build(cfg: &RunConfig) -> Result<Built, RunError> {
    let (surface, lift, classified) = match &cfg.surface {
        SurfaceSpec::Classified(spec) => {
            let (s, l) = make_classified(spec)?;
            (s, l, true)
        }
        SurfaceSpec::Family { family, .. } => {
            let s = make_exponential(family)?;
            (s.clone(), s, false)
        }
    };
    let with_cell = |s: SurfaceMap| SurfaceMap {
        cell: cfg.grid.cell,
        ..s.with_provider(cfg.provider)
    };
    Ok(Built {
        surface: with_cell(surface),
        lift: with_cell(lift),
        classified,
    })
}

fn entry_value(e: &PropertyEntry) -> Value {
    serde_json::to_value(e).expect("entry serializes")
}

fn c64(v: C64) -> Value {
    json!([v.re, v.im])
}

fn failed_entry(name: &str, residual: f64, tolerance: f64, provider: &Provider) -> PropertyEntry {
    PropertyEntry {
        name: name.into(),
        max_residual: residual,
        tolerance,
        pass: residual <= tolerance,
        worst_point: None,
        degenerate_points: Vec::new(),
        provider: provider.kind().into(),
        target: None,
    }
}

fn isotropy_value(i: Isotropy) -> Value {
    match i {
        Isotropy::Order(r) => json!({"order": r, "exact": true}),
        Isotropy::AtLeast(r) => json!({"order": r, "exact": false}),
    }
}

fn verify(cfg: &RunConfig) -> Result<(Vec<PropertyEntry>, Value), RunError> {
    let b = build(cfg)?;
    let g = &cfg.grid;
    if b.classified {
        let n = cfg.n();
        let rep = full_report(&b.surface, &b.lift, g, &ReportTolerances::uniform(cfg.tol), 2.0)?;
        let mut entries = rep.entries;
        entries.push(check_prop35(&b.lift, g, cfg.depth.unwrap_or(n + 1), cfg.tol)?);
        let depth = cfg.depth.unwrap_or(2 * n + 2);
        let data = json!({
            "isotropy": isotropy_value(isotropy_order(&b.lift, g, depth, ISOTROPY)?),
            "lift_span_rank": lift_span_rank(&b.lift, g)?,
        });
        Ok((entries, data))
    } else {
        let SurfaceSpec::Family { family, .. } = &cfg.surface else { unreachable!() };
        let mut entries = vec![check_minimal_cp(&b.lift, g, cfg.tol)?, check_totally_real(&b.lift, Target::CP, g, cfg.tol)?];
        let cartan = cartan_residual(&b.lift, g)?;
        entries.push(failed_entry("cartan", cartan, 1e-6, &Provider::FiniteDifference(FdConfig::default())));
        let mo = family.moment();
        Ok((entries, json!({"moment": c64(mo), "moment_abs": mo.norm()})))
    }
}

fn angle(cfg: &RunConfig) -> Result<(Vec<PropertyEntry>, Value, Vec<Vec<f64>>), RunError> {
    let b = build(cfg)?;
    let pts = cfg.grid.points();
    let mut rows = Vec::with_capacity(pts.len());
    let (mut max_sq, mut kmax, mut fmin, mut fmax) = (0.0f64, 0.0f64, f64::INFINITY, 0.0f64);
    for &(x, y) in &pts {
        let jet = b.surface.jet_at((x, y), 1)?;
        let row = match (angles(&jet), metric_factor(&jet), gauss_curvature(&b.surface, (x, y))) {
            (Ok(a), Ok(f), Ok(k)) => {
                max_sq = max_sq.max(a.cos_sq_alpha);
                kmax = kmax.max(k.abs());
                fmin = fmin.min(f);
                fmax = fmax.max(f);
                vec![x, y, a.cos_a1, a.cos_a2, a.cos_a3, a.cos_sq_alpha, f, k]
            }
            (Err(Error::Degenerate { .. }), _, _) | (_, Err(Error::Degenerate { .. }), _) | (_, _, Err(Error::Degenerate { .. })) => {
                let mut r = vec![x, y];
                r.extend([f64::NAN; 6]);
                r
            }
            (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => return Err(e.into()),
        };
        rows.push(row);
    }
    let entries = vec![check_totally_real(&b.surface, Target::HP, &cfg.grid, cfg.tol)?];
    let data = json!({
        "max_cos_sq_alpha": max_sq,
        "max_abs_gauss_curvature": kmax,
        "metric_factor_range": [fmin, fmax],
    });
    Ok((entries, data, rows))
}

fn sequence(cfg: &RunConfig) -> Result<(Vec<PropertyEntry>, Value), RunError> {
    let b = build(cfg)?;
    let n = cfg.n();
    let depth = cfg.depth.unwrap_or(n + 1);
    let c = cfg.grid.cell;
    let base = (c.x0, c.y0);
    let seq = build_sequence(&b.lift, base, depth)?;
    let table = |t: Vec<Vec<C64>>| -> Value { t.into_iter().map(|r| r.into_iter().map(c64).collect::<Vec<_>>()).collect() };
    let entries = vec![check_prop35(&b.lift, &cfg.grid, depth, cfg.tol)?];
    let data = json!({
        "base_point": [base.0, base.1],
        "depth": depth,
        "norms": seq.norms,
        "gram": table(seq.gram_table()),
        "jgram": table(seq.jgram_table()),
        "isotropy": isotropy_value(isotropy_order(&b.lift, &cfg.grid, cfg.depth.unwrap_or(2 * n + 2), ISOTROPY)?),
        "lift_span_rank": lift_span_rank(&b.lift, &cfg.grid)?,
    });
    Ok((entries, data))
}

fn gauge(cfg: &RunConfig) -> Result<(Vec<PropertyEntry>, Value), RunError> {
    let b = build(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let gauge = SmoothGauge::random(&mut rng, 0.5);
    let gauged = gauge.apply(&b.lift)?;
    let g = &cfg.grid;
    let c = g.cell;
    let p = &cfg.provider;
    let mut entries = vec![failed_entry("integrability", integrability_residual(&gauged, g)?, NON_INTEGRABLE, p)];
    let field = GaugeField::new(gauged.clone());
    let hol = loop_holonomy(&field, (c.x0, c.y0), (c.x1, c.y1), field.default_step())?;
    let hol_defect = hol.frame.t.sub(&quatsurf::CMat::identity(2)).max_abs();
    entries.push(failed_entry("holonomy", hol_defect, HOLONOMY, p));
    entries.push(failed_entry("su2_conservation", hol.max_unitarity_defect.max(hol.max_det_defect), 1e-8, p));
    let mut data = json!({"gauge": gauge, "loop_steps": hol.steps});
    match horizontalize(&gauged, (c.x0, c.y0)) {
        Ok(h) => {
            entries.push(quatsurf::checkers::check_horizontal(&h, g, cfg.tol)?);
            let mut worst: f64 = 0.0;
            for (x, y) in g.points() {
                let a = twistor_project(&b.lift.unit_value(x, y)?)?;
                let bb = twistor_project(&h.unit_value(x, y)?)?;
                worst = worst.max(hpoint_distance(&a, &bb)?);
            }
            entries.push(failed_entry("hpoint_preserved", worst, 1e-10, p));
        }
        Err(e @ (Error::NonIntegrable { .. } | Error::Holonomy { .. })) => {
            data["horizontalize_error"] = json!(e.to_string());
            entries.push(failed_entry("horizontal", f64::INFINITY, cfg.tol, p));
        }
        Err(e) => return Err(e.into()),
    }
    Ok((entries, data))
}

fn scan(cfg: &RunConfig) -> Result<(Vec<PropertyEntry>, Value), RunError> {
    let n = cfg.n();
    let p = Provider::Exact;
    match &cfg.surface {
        SurfaceSpec::Family { family, .. } => {
            let s = scan_fixed(n, &family.thetas, &family.weights)?;
            let e = failed_entry("moment", s.moment_residual, cfg.tol, &p);
            Ok((vec![e], json!({"fixed": s})))
        }
        SurfaceSpec::Classified(_) => {
            let rep = constraint_scan(n, cfg.m, cfg.trials, cfg.tol, cfg.seed)?;
            let mut e = failed_entry("solutions_found", if rep.solutions.is_empty() { 1.0 } else { 0.0 }, 0.5, &p);
            e.max_residual = rep.solutions.iter().map(|s| s.moment_residual).fold(0.0, f64::max);
            e.tolerance = cfg.tol;
            e.pass = !rep.solutions.is_empty() && e.max_residual <= cfg.tol;
            Ok((vec![e], serde_json::to_value(&rep).expect("scan report serializes")))
        }
    }
}

/// Exit code and report document for a finished set of checks.
pub fn assemble_report(cfg: &RunConfig, entries: &[PropertyEntry], data: Value) -> (i32, Value) {
    let pass = entries.iter().all(|e| e.pass);
    let code = if pass { EXIT_PASS } else { EXIT_CHECK_FAILED };
    let report = json!({
        "schema": SCHEMA,
        "command": cfg.command,
        "config": cfg,
        "checks": entries.iter().map(entry_value).collect::<Vec<_>>(),
        "data": data,
        "pass": pass,
        "exit_code": code,
    });
    (code, report)
}

/// Run one command; the report is built even when checks fail.
pub fn run(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let t0 = Instant::now();
    let mut csv = None;
    let (entries, data) = match cfg.command {
        CommandArg::Verify => verify(cfg)?,
        CommandArg::Angle => {
            let (e, d, rows) = angle(cfg)?;
            csv = Some((report::ANGLE_CSV_HEADER.to_string(), rows));
            (e, d)
        }
        CommandArg::Sequence => sequence(cfg)?,
        CommandArg::Gauge => gauge(cfg)?,
        CommandArg::Scan => scan(cfg)?,
    };
    let (code, mut report) = assemble_report(cfg, &entries, data);
    if cfg.timings {
        report["timings"] = json!({"total_seconds": t0.elapsed().as_secs_f64()});
    }
    Ok(Outcome { code, report, csv })
}

fn write_file(path: &PathBuf, bytes: &[u8]) -> Result<(), RunError> {
    std::fs::write(path, bytes).map_err(|e| RunError::Internal(format!("writing {}: {e}", path.display())))
}

/// Parse-free entry point used by the binary and the tests.
pub fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let res = RunConfig::from_opts(cli.command, &cli.opts).and_then(|cfg| {
        let out = run(&cfg)?;
        let json = report::emit_json(&out.report);
        if let Some(path) = &cli.opts.out {
            write_file(path, &json)?;
        }
        match (&cli.opts.csv, &out.csv) {
            (Some(path), Some((h, rows))) => write_file(path, &report::emit_csv(h, rows))?,
            (Some(_), None) => return Err(cfg_err("--csv is only produced by the angle command")),
            _ => {}
        }
        if cli.opts.json {
            let _ = stdout.write_all(&json);
        } else {
            for e in out.report["checks"].as_array().into_iter().flatten() {
                let _ = writeln!(
                    stdout,
                    "{} {:<20} residual={} tol={}",
                    if e["pass"].as_bool() == Some(true) { "PASS" } else { "FAIL" },
                    e["name"].as_str().unwrap_or("?"),
                    e["max_residual"],
                    e["tolerance"],
                );
            }
        }
        Ok(out.code)
    });
    match res {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.code()
        }
    }
}
