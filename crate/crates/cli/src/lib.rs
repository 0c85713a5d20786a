//! Expression language, report formats and the `qhexa` command line.
//!
//! Exit codes: 0 when every check passes, 1 on a verification failure,
//! 2 on a usage or parse error, 3 on an internal consistency error.

pub mod config;
pub mod print;
pub mod report;
pub mod syntax;

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};
use thiserror::Error;

use qhexa_core::conformal::{
    boost, decompose_hexa, default_alphas, default_basis, motion_derivative, suite_ids, verify_suite_in, AccelParams,
    ObservableSet, SuiteConfig, SuiteContext,
};
use qhexa_core::hexgeom::{self, GeomError, HexaPoint, Hyperboloid, SpaceTimePoint};
use qhexa_core::ncalg::{Basis, NCPoly, RewriteSystem};
use qhexa_core::repnum::{
    calibrate_d_weight, convergence_check, generate_manifest, standard_checks, Oracle, OracleConfig, PacketFamily,
};
use qhexa_core::tables::{self, BasisTable, Manifest, SpinShift};

pub use config::{Config, Format};
pub use print::{eval_free, print_canonical, AlgebraContext, EvalError};
pub use report::{Report, ResultRow};
pub use syntax::{parse, Ast, ParseError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) => EXIT_USAGE,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Internal(e.to_string())
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::NeedsContext(_) => usage(e),
            EvalError::Algebra(a) => internal(a),
        }
    }
}

impl From<GeomError> for CliError {
    fn from(e: GeomError) -> Self {
        usage(e)
    }
}

#[derive(Parser, Debug)]
#[command(name = "qhexa", version, about = "Conformal-algebra engine, hexaspherical geometry and grid oracle")]
pub struct Cli {
    /// Config file (`key = value` lines); defaults to $QHEXA_CONFIG.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format: text or json.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Seed for sampled accelerations and packets.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Include wall-clock times in reports.
    #[arg(long, global = true)]
    timing: bool,
    /// Basis-B manifest to use instead of the embedded one.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Rewrite step bound per normalization.
    #[arg(long, global = true)]
    step_bound: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact operator algebra.
    #[command(subcommand)]
    Alg(AlgCmd),
    /// Classical hexaspherical geometry.
    #[command(subcommand)]
    Geom(GeomCmd),
    /// Grid representation and numerical checks.
    #[command(subcommand)]
    Rep(RepCmd),
    /// Basis-B table documents.
    #[command(subcommand)]
    Manifest(ManifestCmd),
}

#[derive(Subcommand, Debug)]
enum AlgCmd {
    /// Normal form of an expression.
    Normalize {
        expr: String,
        #[arg(long)]
        basis: Option<String>,
    },
    /// The bracket (a, b) = [a, b]/(i hbar).
    Commute {
        a: String,
        b: String,
        #[arg(long)]
        basis: Option<String>,
    },
    /// Runs an identity suite; `all` runs every suite.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        basis: Option<String>,
        /// Acceleration `a,b,c,d` (rationals); repeatable. Replaces the defaults.
        #[arg(long, allow_hyphen_values = true)]
        alpha: Vec<String>,
        /// Spin term of C_mu: `closing` (-3/4) or `printed` (+3/4).
        #[arg(long, default_value = "closing")]
        spin_term: String,
    },
    /// Finite transformation to the frame accelerated by alpha.
    Boost {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 6)]
        order: usize,
    },
    /// Derivative along the motion generated by the inertial mass.
    Motion {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long)]
        observable: String,
        #[arg(long, default_value_t = 1)]
        order: u8,
    },
}

#[derive(Subcommand, Debug)]
enum GeomCmd {
    /// Hexaspherical image of a point.
    Lift {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        lam: String,
    },
    /// Point and conformal factor of a hexaspherical vector.
    Project {
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// Coordinates and factor in the accelerated frame.
    Map {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        lam: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
    },
    /// 6d rotation induced by an acceleration.
    Rotate {
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
    },
    /// Squared 6d distance of two vectors.
    Invariant {
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long, allow_hyphen_values = true)]
        y2: String,
    },
    /// Lift of a hyperboloid and optionally its transform.
    Hyperboloid {
        #[arg(long, allow_hyphen_values = true)]
        omega: String,
        #[arg(long, allow_hyphen_values = true)]
        rho_sq: String,
        #[arg(long, allow_hyphen_values = true)]
        k_sq: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<String>,
    },
    /// Finite-difference check of (dy)^2 = lambda^2 (dx)^2.
    Metric {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        lam: String,
        #[arg(long, allow_hyphen_values = true)]
        dx: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0,0,0,0")]
        alpha: String,
    },
}

#[derive(clap::Args, Debug, Clone)]
struct GridArgs {
    /// Points per axis.
    #[arg(long)]
    grid: Option<usize>,
    /// Relative residual tolerance for single brackets.
    #[arg(long)]
    tol: Option<f64>,
    /// Number of sample packets.
    #[arg(long)]
    samples: Option<usize>,
    /// Packet family: gaussian or squeezed.
    #[arg(long, default_value = "gaussian")]
    family: String,
}

#[derive(Subcommand, Debug)]
enum RepCmd {
    /// Additive weight of the dilatation from hermiticity.
    Calibrate(GridArgs),
    /// Table entries and standard identities on sample packets.
    Check {
        #[command(flatten)]
        grid: GridArgs,
        /// Coarse grid of the refinement check (fine grid is twice as dense).
        #[arg(long, default_value_t = 24)]
        coarse: usize,
    },
    /// Least-squares fits of the derived brackets.
    Fit(GridArgs),
}

#[derive(Subcommand, Debug)]
enum ManifestCmd {
    /// Writes the basis-B manifest.
    Write {
        path: PathBuf,
        /// Refit every derived entry on the grid instead of copying the embedded table.
        #[arg(long)]
        refit: bool,
    },
    /// Loads and validates a manifest.
    Read { path: PathBuf },
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (program name first) and runs the command.
pub fn execute<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    match run(cli) {
        Ok((code, stdout)) => Outcome {
            code,
            stdout,
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn resolve_config(cli: &Cli) -> Result<Config, CliError> {
    let mut cfg = Config::resolve(cli.config.as_deref()).map_err(usage)?;
    if let Some(f) = &cli.format {
        cfg.set("format", f).map_err(usage)?;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if cli.timing {
        cfg.timing = true;
    }
    if let Some(m) = &cli.manifest {
        cfg.manifest = Some(m.clone());
    }
    if let Some(b) = cli.step_bound {
        cfg.set("step_bound", &b.to_string()).map_err(usage)?;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(i32, String), CliError> {
    let mut cfg = resolve_config(&cli)?;
    match cli.command {
        Command::Alg(c) => run_alg(c, &mut cfg),
        Command::Geom(c) => run_geom(c, &cfg),
        Command::Rep(c) => run_rep(c, &mut cfg),
        Command::Manifest(c) => run_manifest(c, &cfg),
    }
}

fn emit(report: &Report, text: String) -> String {
    match report.config.format {
        Format::Json => report.to_json(),
        Format::Text => text,
    }
}

fn exit_for(report: &Report) -> i32 {
    if report.all_pass() {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

fn basis_arg(cfg: &mut Config, flag: Option<&str>, fallback: Basis) -> Result<Basis, CliError> {
    if let Some(b) = flag {
        cfg.set("basis", b).map_err(usage)?;
    }
    Ok(cfg.basis.unwrap_or(fallback))
}

fn read_manifest(path: &Path) -> Result<Manifest, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    Manifest::from_json(&text).map_err(internal)
}

fn basis_b_table(cfg: &Config) -> Result<BasisTable, CliError> {
    match &cfg.manifest {
        Some(p) => read_manifest(p)?.to_table().map_err(internal),
        None => Ok(tables::basis_b_table().map_err(internal)?.clone()),
    }
}

/// Rewrite system and composites for `basis` under the configuration.
pub fn context(cfg: &Config, basis: Basis, shift: SpinShift) -> Result<SuiteContext, CliError> {
    let (rw, eps_sign): (Arc<RewriteSystem>, i64) = match basis {
        Basis::B if cfg.manifest.is_some() => {
            let t = basis_b_table(cfg)?;
            (t.system.clone(), t.epsilon_sign)
        }
        _ => {
            let eps = tables::basis_b_table().map(|t| t.epsilon_sign).unwrap_or(1);
            (tables::system(basis).map_err(internal)?, eps)
        }
    };
    let rw = if rw.step_bound() == cfg.step_bound {
        rw
    } else {
        Arc::new(rw.rebound(cfg.step_bound))
    };
    let obs = match basis {
        Basis::A => ObservableSet::basis_a(&rw, eps_sign),
        Basis::B => ObservableSet::basis_b_with(&rw, shift),
    }
    .map_err(internal)?;
    Ok(SuiteContext { rw, obs, eps_sign })
}

fn parse_alpha(s: &str) -> Result<AccelParams, CliError> {
    s.parse().map_err(|e| usage(format!("--alpha {s:?}: {e}")))
}

/// Prefers the hexaspherical form when the polynomial has one.
fn hexa_or_canonical(p: &NCPoly, obs: &ObservableSet) -> String {
    match decompose_hexa(p, obs) {
        Some(h) => h.to_string(),
        None => print_canonical(p),
    }
}

fn run_alg(cmd: AlgCmd, cfg: &mut Config) -> Result<(i32, String), CliError> {
    match cmd {
        AlgCmd::Normalize { expr, basis } => {
            let basis = basis_arg(cfg, basis.as_deref(), Basis::B)?;
            let ast = parse(&expr)?;
            let ctx = context(cfg, basis, SpinShift::Closing)?;
            let t = Instant::now();
            let p = AlgebraContext { rw: &ctx.rw, obs: &ctx.obs }.eval(&ast)?;
            let text = print_canonical(&p);
            let mut report = Report::new("alg normalize", cfg);
            report.push("normal form", true, Value::Null, ms(t)).value = Some(Value::String(text.clone()));
            Ok((EXIT_OK, emit(&report, format!("{text}\n"))))
        }
        AlgCmd::Commute { a, b, basis } => {
            let basis = basis_arg(cfg, basis.as_deref(), Basis::B)?;
            let (a, b) = (parse(&a)?, parse(&b)?);
            let ctx = context(cfg, basis, SpinShift::Closing)?;
            let t = Instant::now();
            let alg = AlgebraContext { rw: &ctx.rw, obs: &ctx.obs };
            let p = ctx.rw.commutator(&alg.eval(&a)?, &alg.eval(&b)?).map_err(internal)?;
            let text = print_canonical(&p);
            let mut report = Report::new("alg commute", cfg);
            report.push("bracket", true, Value::Null, ms(t)).value = Some(Value::String(text.clone()));
            Ok((EXIT_OK, emit(&report, format!("{text}\n"))))
        }
        AlgCmd::Verify {
            suite,
            basis,
            alpha,
            spin_term,
        } => {
            let shift = match spin_term.as_str() {
                "closing" => SpinShift::Closing,
                "printed" => SpinShift::Printed,
                other => return Err(usage(format!("--spin-term {other:?} is not closing or printed"))),
            };
            if let Some(b) = basis.as_deref() {
                cfg.set("basis", b).map_err(usage)?;
            }
            let alphas = if alpha.is_empty() {
                default_alphas(cfg.seed, 3)
            } else {
                alpha.iter().map(|s| parse_alpha(s)).collect::<Result<_, _>>()?
            };
            let suites: Vec<&str> = if suite == "all" {
                suite_ids()
            } else if suite_ids().contains(&suite.as_str()) {
                vec![suite.as_str()]
            } else {
                return Err(usage(format!("unknown suite {suite:?}; known: all, {}", suite_ids().join(", "))));
            };
            let scfg = SuiteConfig {
                basis: cfg.basis,
                alphas,
                seed: cfg.seed,
                shift,
            };
            let mut report = Report::new(format!("alg verify --suite {suite}"), cfg);
            let mut contexts: Vec<(Basis, SuiteContext)> = Vec::new();
            for s in &suites {
                let b = cfg.basis.or_else(|| default_basis(s)).expect("known suite");
                if !contexts.iter().any(|(cb, _)| *cb == b) {
                    contexts.push((b, context(cfg, b, shift)?));
                }
                let ctx = &contexts.iter().find(|(cb, _)| *cb == b).expect("built").1;
                let rows = verify_suite_in(s, ctx, &scfg).map_err(internal)?;
                for r in rows {
                    let id = if suites.len() > 1 { format!("{s}:{}", r.id) } else { r.id };
                    report.push(id, r.pass, Value::String(print_canonical(&r.residual)), r.time_ms);
                }
            }
            let text = report.to_text();
            Ok((exit_for(&report), emit(&report, text)))
        }
        AlgCmd::Boost { alpha, target, order } => {
            let a = parse_alpha(&alpha)?;
            let ast = parse(&target)?;
            let basis = cfg.basis.unwrap_or(Basis::B);
            let ctx = context(cfg, basis, SpinShift::Closing)?;
            let t = Instant::now();
            let alg = AlgebraContext { rw: &ctx.rw, obs: &ctx.obs };
            let r = boost(&ctx.rw, &ctx.obs, &alg.eval(&ast)?, &a, order).map_err(internal)?;
            let text = hexa_or_canonical(&r.value, &ctx.obs);
            let mut report = Report::new("alg boost", cfg);
            report.push("series terminated", r.terminated, Value::Null, ms(t)).value = Some(json!({
                "expression": text,
                "canonical": print_canonical(&r.value),
                "order": r.order,
            }));
            let code = if r.terminated { EXIT_OK } else { EXIT_FAILED };
            Ok((code, emit(&report, format!("{text}\n"))))
        }
        AlgCmd::Motion {
            alpha,
            observable,
            order,
        } => {
            if !(1..=2).contains(&order) {
                return Err(usage("--order must be 1 or 2"));
            }
            let a = parse_alpha(&alpha)?;
            let ast = parse(&observable)?;
            let basis = cfg.basis.unwrap_or(Basis::B);
            let ctx = context(cfg, basis, SpinShift::Closing)?;
            let t = Instant::now();
            let alg = AlgebraContext { rw: &ctx.rw, obs: &ctx.obs };
            let mut p = alg.eval(&ast)?;
            for _ in 0..order {
                p = motion_derivative(&ctx.rw, &ctx.obs, &p, &a).map_err(internal)?;
            }
            let text = hexa_or_canonical(&p, &ctx.obs);
            let mut report = Report::new("alg motion", cfg);
            report.push(format!("derivative order {order}"), true, Value::Null, ms(t)).value =
                Some(Value::String(text.clone()));
            Ok((EXIT_OK, emit(&report, format!("{text}\n"))))
        }
    }
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn number(s: &str) -> Result<f64, CliError> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let (p, q): (i64, i64) = (
            p.trim().parse().map_err(|_| usage(format!("bad number {s:?}")))?,
            q.trim().parse().map_err(|_| usage(format!("bad number {s:?}")))?,
        );
        if q == 0 {
            return Err(usage(format!("zero denominator in {s:?}")));
        }
        return BigRational::new(p.into(), q.into())
            .to_f64()
            .ok_or_else(|| usage(format!("bad number {s:?}")));
    }
    s.parse().map_err(|_| usage(format!("bad number {s:?}")))
}

fn vector<const N: usize>(s: &str, what: &str) -> Result<[f64; N], CliError> {
    let v: Vec<f64> = s.split(',').map(number).collect::<Result<_, _>>()?;
    v.try_into()
        .map_err(|v: Vec<f64>| usage(format!("{what} needs {N} comma-separated numbers, got {}", v.len())))
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{}", x + 0.0)).collect::<Vec<_>>().join(",")
}

fn run_geom(cmd: GeomCmd, cfg: &Config) -> Result<(i32, String), CliError> {
    let t = Instant::now();
    let mut report = Report::new("geom", cfg);
    let mut lines: Vec<String> = Vec::new();
    let mut code = EXIT_OK;
    match cmd {
        GeomCmd::Lift { x, lam } => {
            let p = SpaceTimePoint::new(vector(&x, "--x")?, number(&lam)?)?;
            let y = hexgeom::lift(&p);
            lines.push(format!("y = {}", join(&y.y)));
            lines.push(format!("y^2 = {}", y.square()));
            report.command = "geom lift".into();
            report.push("lift", true, json!(y.square()), ms(t)).value = Some(json!(y.y));
        }
        GeomCmd::Project { y } => {
            let p = hexgeom::project(&HexaPoint { y: vector(&y, "--y")? })?;
            lines.push(format!("x = {}", join(&p.x)));
            lines.push(format!("lambda = {}", p.lam));
            report.command = "geom project".into();
            report.push("project", true, Value::Null, ms(t)).value = Some(json!({"x": p.x, "lambda": p.lam}));
        }
        GeomCmd::Map { x, lam, alpha } => {
            let p = SpaceTimePoint::new(vector(&x, "--x")?, number(&lam)?)?;
            let q = hexgeom::conformal_map(&p, &vector(&alpha, "--alpha")?)?;
            lines.push(format!("x = {}", join(&q.x)));
            lines.push(format!("lambda = {}", q.lam));
            report.command = "geom map".into();
            report.push("map", true, Value::Null, ms(t)).value = Some(json!({"x": q.x, "lambda": q.lam}));
        }
        GeomCmd::Rotate { y, alpha } => {
            let y = HexaPoint { y: vector(&y, "--y")? };
            let r = hexgeom::rotate_hexa(&y, &vector(&alpha, "--alpha")?);
            let defect = (r.square() - y.square()).abs();
            lines.push(format!("y = {}", join(&r.y)));
            report.command = "geom rotate".into();
            report.push("rotate", true, json!(defect), ms(t)).value = Some(json!(r.y));
        }
        GeomCmd::Invariant { y, y2 } => {
            let (a, b) = (HexaPoint { y: vector(&y, "--y")? }, HexaPoint { y: vector(&y2, "--y2")? });
            let v = hexgeom::pair_invariant(&a, &b);
            lines.push(format!("(y - y')^2 = {v}"));
            lines.push(format!("y.y' = {}", a.dot(&b)));
            report.command = "geom invariant".into();
            report.push("invariant", true, Value::Null, ms(t)).value = Some(json!({"distance": v, "dot": a.dot(&b)}));
        }
        GeomCmd::Hyperboloid {
            omega,
            rho_sq,
            k_sq,
            alpha,
        } => {
            let h = Hyperboloid::new(vector(&omega, "--omega")?, number(&rho_sq)?, number(&k_sq)?)?;
            let y = hexgeom::hyperboloid_lift(&h)?;
            lines.push(format!("y = {}", join(&y.y)));
            lines.push(format!("y^2 = {}", y.square()));
            report.command = "geom hyperboloid".into();
            let defect = (y.square() - h.k_sq).abs() / h.k_sq.abs().max(1.0);
            let pass = defect <= hexgeom::COMPOSED_TOL;
            report.push("lift", pass, json!(defect), ms(t)).value = Some(json!(y.y));
            if !pass {
                code = EXIT_FAILED;
            }
            if let Some(a) = alpha {
                let m = hexgeom::hyperboloid_map(&h, &vector(&a, "--alpha")?)?;
                lines.push(format!("omega' = {}", join(&m.omega)));
                lines.push(format!("rho'^2 = {}", m.rho_sq));
                lines.push(format!("lambda'^2 = {}", m.lam_sq));
                report.push("map", true, Value::Null, ms(t)).value =
                    Some(json!({"omega": m.omega, "rho_sq": m.rho_sq, "k_sq": m.k_sq, "lam_sq": m.lam_sq}));
            }
        }
        GeomCmd::Metric { x, lam, dx, alpha } => {
            let p = SpaceTimePoint::new(vector(&x, "--x")?, number(&lam)?)?;
            let r = hexgeom::metric_check(&p, &vector(&dx, "--dx")?, &vector(&alpha, "--alpha")?)?;
            lines.push(format!("defect {:.3e} at dx, {:.3e} at dx/2", r.defect, r.defect_half));
            match r.ratio {
                Some(q) => lines.push(format!("ratio {q:.3}")),
                None => lines.push("ratio undefined (exact to rounding)".into()),
            }
            lines.push(if r.pass { "PASS" } else { "FAIL" }.into());
            report.command = "geom metric".into();
            report.push("metric", r.pass, json!(r.defect), ms(t)).value = Some(json!(r));
            if !r.pass {
                code = EXIT_FAILED;
            }
        }
    }
    lines.push(String::new());
    Ok((code, emit(&report, lines.join("\n"))))
}

fn oracle_for(cfg: &mut Config, g: &GridArgs) -> Result<Oracle, CliError> {
    if let Some(n) = g.grid {
        cfg.set("grid_n", &n.to_string()).map_err(usage)?;
    }
    if let Some(t) = g.tol {
        cfg.set("tol", &t.to_string()).map_err(usage)?;
    }
    if let Some(s) = g.samples {
        cfg.set("samples", &s.to_string()).map_err(usage)?;
    }
    let family = match g.family.as_str() {
        "gaussian" => PacketFamily::Gaussian,
        "squeezed" => PacketFamily::Squeezed,
        other => return Err(usage(format!("--family {other:?} is not gaussian or squeezed"))),
    };
    let table = basis_b_table(cfg)?;
    let d_weight = match &cfg.manifest {
        Some(p) => read_manifest(p)?.d_weight().map_err(internal)?,
        None => Manifest::embedded().map_err(internal)?.d_weight().map_err(internal)?,
    };
    Ok(Oracle::new(OracleConfig {
        n: cfg.grid_n,
        box_sigmas: cfg.box_sigmas,
        epsilon: cfg.epsilon,
        tol: cfg.tol,
        composite_tol: cfg.composite_tol,
        samples: cfg.samples,
        seed: cfg.seed,
        d_weight: d_weight.to_f64().unwrap_or(f64::NAN),
        eps_sign: table.epsilon_sign,
        family,
        ..OracleConfig::default()
    }))
}

fn run_rep(cmd: RepCmd, cfg: &mut Config) -> Result<(i32, String), CliError> {
    let t = Instant::now();
    match cmd {
        RepCmd::Calibrate(g) => {
            let oracle = oracle_for(cfg, &g)?;
            let (w, snapped) = calibrate_d_weight(&oracle).map_err(usage)?;
            let mut report = Report::new("rep calibrate", cfg);
            let dev = snapped.as_ref().map(|q| (w - q.to_f64().unwrap_or(f64::NAN)).abs());
            let shown = snapped.as_ref().map(|q| q.to_string()).unwrap_or_else(|| "none".into());
            report.push("D weight", snapped.is_some(), json!(dev), ms(t)).value =
                Some(json!({"raw": w, "rational": shown}));
            let text = format!("D weight {w:.12} -> {shown}\n");
            Ok((exit_for(&report), emit(&report, text)))
        }
        RepCmd::Check { grid, coarse } => {
            let oracle = oracle_for(cfg, &grid)?;
            let table = basis_b_table(cfg)?;
            let checks = standard_checks(&table.entries, cfg.tol, cfg.composite_tol);
            let mut report = Report::new("rep check", cfg);
            for r in oracle.run_checks(&checks).map_err(usage)? {
                report.push(r.id, r.pass, json!(r.residual), ms(t));
            }
            let single = Oracle::with_packets(oracle.config.clone(), oracle.packets[..1].to_vec());
            let c = convergence_check(&single, coarse).map_err(usage)?;
            report
                .push(format!("convergence n={} to n={}", c.coarse_n, c.fine_n), c.pass, json!(c.fine_residual), ms(t))
                .value = Some(json!({"coarse": c.coarse_residual, "fine": c.fine_residual, "ratio": c.ratio}));
            let text = report.to_text();
            Ok((exit_for(&report), emit(&report, text)))
        }
        RepCmd::Fit(g) => {
            let oracle = oracle_for(cfg, &g)?;
            let fits = oracle.fit_derived().map_err(|e| CliError::Internal(e.to_string()))?;
            let embedded = basis_b_table(cfg)?;
            let mut report = Report::new("rep fit", cfg);
            for f in &fits {
                let fitted: NCPoly = f
                    .candidates
                    .iter()
                    .zip(&f.coefficients)
                    .fold(NCPoly::zero(), |acc, (c, q)| acc + c.scale_rational(q));
                let stored = embedded
                    .entries
                    .iter()
                    .find(|e| e.left == f.left && e.right == f.right)
                    .map(|e| e.bracket.clone());
                let agrees = stored.as_ref() == Some(&fitted);
                report.push(format!("({},{})", f.left, f.right), agrees, json!(f.residual), ms(t)).value =
                    Some(Value::String(print_canonical(&fitted)));
            }
            let text = report.to_text();
            Ok((exit_for(&report), emit(&report, text)))
        }
    }
}

fn run_manifest(cmd: ManifestCmd, cfg: &Config) -> Result<(i32, String), CliError> {
    let t = Instant::now();
    match cmd {
        ManifestCmd::Write { path, refit } => {
            let manifest = if refit {
                let mut c = cfg.clone();
                let oracle = oracle_for(
                    &mut c,
                    &GridArgs {
                        grid: None,
                        tol: None,
                        samples: None,
                        family: "gaussian".into(),
                    },
                )?;
                generate_manifest(&oracle).map_err(internal)?
            } else {
                match &cfg.manifest {
                    Some(p) => read_manifest(p)?,
                    None => Manifest::embedded().map_err(internal)?,
                }
            };
            let text = manifest.to_json();
            std::fs::write(&path, &text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
            let mut report = Report::new("manifest write", cfg);
            report.push(path.display().to_string(), true, Value::Null, ms(t)).value =
                Some(json!({"entries": manifest.entries.len(), "bytes": text.len()}));
            Ok((EXIT_OK, emit(&report, format!("wrote {} ({} entries)\n", path.display(), manifest.entries.len()))))
        }
        ManifestCmd::Read { path } => {
            let m = read_manifest(&path)?;
            let table = m.to_table().map_err(internal)?;
            let stable = m.to_json() == std::fs::read_to_string(&path).unwrap_or_default();
            let mut report = Report::new("manifest read", cfg);
            report.push("round trip", stable, Value::Null, ms(t)).value = Some(json!({
                "entries": table.entries.len(),
                "epsilon_convention": m.epsilon_convention,
            }));
            let text = format!(
                "{}: {} entries, epsilon {}, re-serialization {}\n",
                path.display(),
                table.entries.len(),
                m.epsilon_convention,
                if stable { "identical" } else { "differs" }
            );
            Ok((exit_for(&report), emit(&report, text)))
        }
    }
}
