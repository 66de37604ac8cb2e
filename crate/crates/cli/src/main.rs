//! `prabhakar`: evaluate `E^γ_{α,β}(−x)`, sample its spectral density, run
//! complete-monotonicity audits and check the Laplace-pair identity.
//!
//! Exit codes: 0 success (or complete monotonicity holds), 1 complete
//! monotonicity refuted, 2 usage or domain error, 3 numerical failure,
//! 4 criterion and numerical evidence disagree.

mod output;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use prabhakar::audit::{default_x_grid, AUDIT_Y_RANGE, MAX_AUDIT_ORDER};
use prabhakar::bromwich::{default_y_grid, geometric_grid, DEFAULT_Y_RANGE, POINTS_PER_DECADE};
use prabhakar::special::gamma;
use prabhakar::{
    density_f, eval_auto, full_report, verify_laplace_identity, Annotation, AuditConfig, CMReport, EvalConfig,
    OracleCase, Params, QuadratureConfig, SeriesOptions, TalbotConfig,
};

use output::{fmt_num, Format, Record, Sink};

const EXIT_REFUTED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_INCONSISTENT: u8 = 4;

/// Figure curves: `α = 1/2`, `γ = 4/3` and these `β`.
const FIGURE_ALPHA: f64 = 0.5;
const FIGURE_GAMMA: f64 = 4.0 / 3.0;
const FIGURE_CURVES: [(&str, f64); 4] = [
    ("I_beta_1/3", 1.0 / 3.0),
    ("II_beta_2/3", 2.0 / 3.0),
    ("III_beta_1", 1.0),
    ("IV_beta_5/3", 5.0 / 3.0),
];

#[derive(Debug, Parser)]
#[command(name = "prabhakar", version, about = "Prabhakar function, spectral densities and complete-monotonicity audits")]
#[command(after_help = "Every option can also be set through an environment variable named PRABHAKAR_<OPTION>, \
                        e.g. PRABHAKAR_NODES=64 or PRABHAKAR_ALPHA=1/3.")]
struct Cli {
    /// Write JSON lines instead of CSV.
    #[arg(long, global = true, env = "PRABHAKAR_JSON")]
    json: bool,

    #[command(flatten)]
    numerics: NumericArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct NumericArgs {
    /// Contour nodes per Laplace inversion (even, at least 16).
    #[arg(long, global = true, env = "PRABHAKAR_NODES", default_value_t = 40)]
    nodes: usize,

    /// Largest accepted imaginary residue of an inversion.
    #[arg(long, global = true, env = "PRABHAKAR_RESIDUE_TOL", default_value_t = 1e-8)]
    residue_tol: f64,

    /// Absolute quadrature tolerance, in [1e-14, 1e-4].
    #[arg(long, global = true, env = "PRABHAKAR_ABS_TOL", default_value_t = 1e-14)]
    abs_tol: f64,

    /// Relative quadrature tolerance, in [1e-14, 1e-4].
    #[arg(long, global = true, env = "PRABHAKAR_REL_TOL", default_value_t = 1e-12)]
    rel_tol: f64,

    /// Relative term size at which the series stops.
    #[arg(long, global = true, env = "PRABHAKAR_SERIES_TOL", default_value_t = prabhakar::series::DEFAULT_TOL)]
    series_tol: f64,
}

impl NumericArgs {
    fn eval_config(&self) -> Result<EvalConfig, Failure> {
        let talbot = TalbotConfig {
            nodes: self.nodes,
            residue_tol: self.residue_tol,
            ..TalbotConfig::default()
        };
        talbot.validate()?;
        let quadrature = QuadratureConfig::new(self.abs_tol, self.rel_tol)?;
        if !(self.series_tol > 0.0 && self.series_tol < 1.0) {
            return Err(Failure::usage(format!("series tolerance must lie in (0, 1), got {}", self.series_tol)));
        }
        Ok(EvalConfig {
            series: SeriesOptions {
                tol: self.series_tol,
                ..SeriesOptions::default()
            },
            quadrature,
            talbot,
            ..EvalConfig::default()
        })
    }

    fn describe(&self) -> String {
        format!(
            "config: nodes={} residue_tol={:e} abs_tol={:e} rel_tol={:e} series_tol={:e}",
            self.nodes, self.residue_tol, self.abs_tol, self.rel_tol, self.series_tol
        )
    }
}

#[derive(Debug, Clone, Copy, Args)]
struct ParamArgs {
    /// α > 0; decimals or fractions such as 1/3.
    #[arg(long, env = "PRABHAKAR_ALPHA", value_parser = parse_number, allow_hyphen_values = true)]
    alpha: f64,

    /// β > 0.
    #[arg(long, env = "PRABHAKAR_BETA", value_parser = parse_number, allow_hyphen_values = true)]
    beta: f64,

    /// γ > 0.
    #[arg(long, env = "PRABHAKAR_GAMMA", value_parser = parse_number, allow_hyphen_values = true)]
    gamma: f64,
}

impl ParamArgs {
    fn params(&self) -> Result<Params, Failure> {
        Ok(Params::new(self.alpha, self.beta, self.gamma)?)
    }

    fn describe(&self) -> String {
        format!("alpha={} beta={} gamma={}", fmt_num(self.alpha), fmt_num(self.beta), fmt_num(self.gamma))
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate E^γ_{α,β}(−x) at one point or on a uniform x range.
    Eval {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_parser = parse_number, conflicts_with_all = ["x_min", "x_max"])]
        x: Option<f64>,
        #[arg(long, value_parser = parse_number, requires = "x_max")]
        x_min: Option<f64>,
        #[arg(long, value_parser = parse_number, requires = "x_min")]
        x_max: Option<f64>,
        /// Number of points from --x-min to --x-max inclusive.
        #[arg(long, default_value_t = 11)]
        x_steps: usize,
    },
    /// Sample the spectral density f (and optionally g) at one y or on a geometric range.
    Density {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_parser = parse_number, conflicts_with_all = ["y_min", "y_max"])]
        y: Option<f64>,
        #[arg(long, value_parser = parse_number, default_value_t = DEFAULT_Y_RANGE.0)]
        y_min: f64,
        #[arg(long, value_parser = parse_number, default_value_t = DEFAULT_Y_RANGE.1)]
        y_max: f64,
        #[arg(long, default_value_t = POINTS_PER_DECADE)]
        per_decade: usize,
        /// Also print g(y) = α y^{−β} f(y) / Γ(γ).
        #[arg(long)]
        g: bool,
        /// Use the closed-form density for these parameters instead of inversion.
        #[arg(long)]
        closed_form: bool,
    },
    /// Audit complete monotonicity and compare with the parameter criterion.
    CmCheck {
        #[command(flatten)]
        params: ParamArgs,
        /// Highest derivative order checked.
        #[arg(long, default_value_t = MAX_AUDIT_ORDER)]
        orders: usize,
        #[arg(long, value_parser = parse_number, default_value_t = AUDIT_Y_RANGE.0)]
        y_min: f64,
        #[arg(long, value_parser = parse_number, default_value_t = AUDIT_Y_RANGE.1)]
        y_max: f64,
        #[arg(long, default_value_t = POINTS_PER_DECADE)]
        y_per_decade: usize,
        /// Geometric x grid for derivative signs; defaults to 48 points on [1e-3, 50].
        #[arg(long, value_parser = parse_number, requires_all = ["x_max", "x_points"])]
        x_min: Option<f64>,
        #[arg(long, value_parser = parse_number, requires = "x_min")]
        x_max: Option<f64>,
        #[arg(long, requires = "x_min")]
        x_points: Option<usize>,
        /// Also check the Laplace-pair identity at this (x, s).
        #[arg(long, value_parser = parse_number, requires = "laplace_s")]
        laplace_x: Option<f64>,
        #[arg(long, value_parser = parse_number, requires = "laplace_x")]
        laplace_s: Option<f64>,
    },
    /// Write the α = 1/2, γ = 4/3 density curves for β = 1/3, 2/3, 1, 5/3 as CSV.
    Figure1 {
        #[arg(long, value_parser = parse_number, default_value_t = 10.0)]
        y_max: f64,
        #[arg(long, default_value_t = 400)]
        points: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Check the Laplace pair of t^{β−1} E^γ_{α,β}(−x t^α) at (x, s).
    Verify {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
        s: f64,
        #[arg(long, value_parser = parse_number, default_value_t = 1e-6)]
        tol: f64,
    },
}

/// Parses a decimal or a fraction `p/q`.
fn parse_number(s: &str) -> Result<f64, String> {
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}"));
    let v = match s.split_once('/') {
        Some((num, den)) => {
            let d = parse(den)?;
            if d == 0.0 {
                return Err(format!("'{s}': zero denominator"));
            }
            parse(num)? / d
        }
        None => parse(s)?,
    };
    if !v.is_finite() {
        return Err(format!("'{s}' is not finite"));
    }
    Ok(v)
}

#[derive(Debug)]
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            msg: msg.into(),
        }
    }

    fn at(what: &str, v: f64, e: prabhakar::Error) -> Self {
        let mut f = Failure::from(e);
        f.msg = format!("{what} = {v}: {}", f.msg);
        f
    }
}

impl From<prabhakar::Error> for Failure {
    fn from(e: prabhakar::Error) -> Self {
        let code = if e.is_domain() { EXIT_USAGE } else { EXIT_NUMERIC };
        Self { code, msg: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self::usage(format!("i/o: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) if f.msg.contains("Broken pipe") => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let format = if cli.json { Format::JsonLines } else { Format::Csv };
    let cfg = cli.numerics.eval_config()?;
    let mut meta = vec![format!("prabhakar {}", env!("CARGO_PKG_VERSION")), cli.numerics.describe()];
    let stdout = io::stdout().lock();
    match &cli.command {
        Command::Eval {
            params,
            x,
            x_min,
            x_max,
            x_steps,
        } => {
            let p = params.params()?;
            let xs = match (x, x_min, x_max) {
                (Some(x), _, _) => vec![*x],
                (None, Some(lo), Some(hi)) => linspace(*lo, *hi, *x_steps)?,
                _ => return Err(Failure::usage("give --x or both --x-min and --x-max")),
            };
            meta.push(format!("command: eval {}", params.describe()));
            let mut sink = Sink::new(stdout, format, meta);
            for x in xs {
                let r = eval_auto(&p, x, &cfg).map_err(|e| Failure::at("x", x, e))?;
                let rec = with_params(Record::new("eval"), &p)
                    .num("x", x)
                    .num("value", r.value)
                    .text("method", r.method.name())
                    .int("terms", r.terms)
                    .int("nodes", r.nodes)
                    .num("cancellation", r.cancellation);
                sink.emit(&rec)?;
            }
            sink.finish()?;
            Ok(0)
        }
        Command::Density {
            params,
            y,
            y_min,
            y_max,
            per_decade,
            g,
            closed_form,
        } => {
            let p = params.params()?;
            let ys = match y {
                Some(y) => vec![*y],
                None if (*y_min, *y_max, *per_decade) == (DEFAULT_Y_RANGE.0, DEFAULT_Y_RANGE.1, POINTS_PER_DECADE) => {
                    default_y_grid()
                }
                None => geometric_grid(*y_min, *y_max, *per_decade)?,
            };
            let oracle = if *closed_form {
                Some(OracleCase::matching(&p).ok_or_else(|| {
                    Failure::usage(format!("no closed-form density for {}", params.describe()))
                })?)
            } else {
                None
            };
            let method = if oracle.is_some() { "closed_form" } else { "talbot" };
            let g_scale = p.alpha() / gamma(p.gamma())?;
            meta.push(format!("command: density {}", params.describe()));
            let mut sink = Sink::new(stdout, format, meta);
            for y in ys {
                let f = match &oracle {
                    Some(o) => o.eval(y),
                    None => density_f(&p, y, &cfg.talbot),
                }
                .map_err(|e| Failure::at("y", y, e))?;
                let mut rec = with_params(Record::new("density"), &p)
                    .text("method", method)
                    .num("y", y)
                    .num("f", f);
                if *g {
                    rec = rec.num("g", g_scale * y.powf(-p.beta()) * f);
                }
                sink.emit(&rec)?;
            }
            sink.finish()?;
            Ok(0)
        }
        Command::CmCheck {
            params,
            orders,
            y_min,
            y_max,
            y_per_decade,
            x_min,
            x_max,
            x_points,
            laplace_x,
            laplace_s,
        } => {
            let p = params.params()?;
            let x_grid = match (x_min, x_max, x_points) {
                (Some(lo), Some(hi), Some(n)) => geometric_points(*lo, *hi, *n)?,
                _ => default_x_grid(),
            };
            if *orders > MAX_AUDIT_ORDER {
                return Err(Failure::usage(format!("--orders must be at most {MAX_AUDIT_ORDER}")));
            }
            let audit = AuditConfig {
                y_grid: geometric_grid(*y_min, *y_max, *y_per_decade)?,
                x_grid,
                max_order: *orders,
                eval: cfg,
                laplace: laplace_x.zip(*laplace_s),
            };
            let report = full_report(&p, &audit);
            for (stage, msg) in &report.errors {
                eprintln!("warning: {stage}: {msg}");
            }
            meta.push(format!("command: cm-check {}", params.describe()));
            meta.push(format!(
                "grids: y={} points on [{:e}, {:e}], x={} points, orders<={}",
                audit.y_grid.len(),
                y_min,
                y_max,
                audit.x_grid.len(),
                orders
            ));
            let mut sink = Sink::new(stdout, format, meta);
            sink.emit(&report_record(&report))?;
            sink.finish()?;
            Ok(report_exit_code(&report))
        }
        Command::Figure1 { y_max, points, output } => {
            meta.push(format!(
                "command: figure1 alpha={} gamma={} y_max={} points={}",
                fmt_num(FIGURE_ALPHA),
                fmt_num(FIGURE_GAMMA),
                fmt_num(*y_max),
                points
            ));
            write_figure(output, *y_max, *points, &cfg.talbot, &meta)?;
            Ok(0)
        }
        Command::Verify { params, x, s, tol } => {
            let p = params.params()?;
            let check = verify_laplace_identity(&p, *x, *s, &cfg)?;
            meta.push(format!("command: verify {} tol={:e}", params.describe(), tol));
            let rec = with_params(Record::new("residual"), &p)
                .num("x", *x)
                .num("s", *s)
                .num("lhs", check.lhs)
                .num("rhs", check.rhs)
                .num("residual", check.residual)
                .num("tol", *tol)
                .text("method", "quadrature");
            let mut sink = Sink::new(stdout, format, meta);
            sink.emit(&rec)?;
            sink.finish()?;
            if check.residual <= *tol {
                Ok(0)
            } else {
                eprintln!("residual {:e} exceeds tolerance {:e}", check.residual, tol);
                Ok(EXIT_NUMERIC)
            }
        }
    }
}

fn with_params(rec: Record, p: &Params) -> Record {
    rec.num("alpha", p.alpha()).num("beta", p.beta()).num("gamma", p.gamma())
}

fn linspace(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, Failure> {
    if n < 2 || hi <= lo {
        return Err(Failure::usage("x range needs --x-min < --x-max and at least 2 steps"));
    }
    let step = (hi - lo) / (n - 1) as f64;
    let mut xs: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
    xs[n - 1] = hi;
    Ok(xs)
}

fn geometric_points(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, Failure> {
    if !(lo > 0.0 && hi > lo) || n < 2 {
        return Err(Failure::usage("x grid needs 0 < --x-min < --x-max and at least 2 points"));
    }
    let step = (hi / lo).ln() / (n - 1) as f64;
    let mut xs: Vec<f64> = (0..n).map(|i| lo * (step * i as f64).exp()).collect();
    xs[n - 1] = hi;
    Ok(xs)
}

fn report_record(r: &CMReport) -> Record {
    let d = r.density.as_ref();
    let locus = d.and_then(|d| d.violation_locus);
    let v = r.derivatives.as_ref();
    let first = v.and_then(|v| v.first_violation);
    let annotation = match r.verdict.annotation {
        Annotation::Consistent => "consistent",
        Annotation::Inconsistent => "inconsistent",
        Annotation::Unconfirmed => "unconfirmed",
    };
    with_params(Record::new("report"), &r.params)
        .flag("criterion_satisfied", r.criterion_satisfied)
        .flag("completely_monotone", r.verdict.completely_monotone)
        .text("annotation", annotation)
        .opt_num("density_min", d.map(|d| d.min_value))
        .opt_num("density_argmin", d.map(|d| d.argmin))
        .opt_num("density_max_abs", d.map(|d| d.max_abs))
        .opt_flag("grid_too_coarse", d.map(|d| d.grid_too_coarse))
        .opt_num("violation_lower", locus.map(|l| l.lower))
        .opt_num("violation_upper", locus.map(|l| l.upper))
        .opt_flag("violation_open_above", locus.map(|l| l.open_above))
        .opt_flag("derivative_sign_ok", v.map(|v| v.sign_ok))
        .opt_int("max_order", v.map(|v| v.max_order))
        .opt_int("series_points", v.map(|v| v.series_points))
        .opt_int("integral_points", v.map(|v| v.integral_points))
        .opt_int("skipped_points", v.map(|v| v.skipped.len()))
        .opt_num("first_violation_x", first.map(|f| f.x))
        .opt_int("first_violation_order", first.map(|f| f.order))
        .opt_num("laplace_residual", r.laplace_residual)
        .opt_flag("routes_agree", r.routes_agree)
}

fn report_exit_code(r: &CMReport) -> u8 {
    if r.density.is_none() && r.derivatives.is_none() {
        return EXIT_NUMERIC;
    }
    if r.routes_agree == Some(false) {
        return EXIT_INCONSISTENT;
    }
    match r.verdict.annotation {
        Annotation::Consistent if r.verdict.completely_monotone => 0,
        Annotation::Consistent => EXIT_REFUTED,
        Annotation::Inconsistent | Annotation::Unconfirmed => EXIT_INCONSISTENT,
    }
}

/// Removes the file on drop unless disarmed.
struct PartialFile<'a> {
    path: &'a Path,
    armed: bool,
}

impl Drop for PartialFile<'_> {
    fn drop(&mut self) {
        if self.armed {
            let _ = fs::remove_file(self.path);
        }
    }
}

fn write_figure(path: &Path, y_max: f64, points: usize, talbot: &TalbotConfig, meta: &[String]) -> Result<(), Failure> {
    if !(y_max > 0.0) || points == 0 {
        return Err(Failure::usage("figure1 needs --y-max > 0 and --points > 0"));
    }
    let curves = FIGURE_CURVES
        .iter()
        .map(|&(_, b)| Params::new(FIGURE_ALPHA, b, FIGURE_GAMMA))
        .collect::<Result<Vec<_>, _>>()?;
    let file = File::create(path)?;
    let mut guard = PartialFile { path, armed: true };
    let mut out = BufWriter::new(file);
    for line in meta {
        writeln!(out, "# {line}")?;
    }
    let header: Vec<&str> = std::iter::once("y").chain(FIGURE_CURVES.iter().map(|c| c.0)).collect();
    writeln!(out, "{}", header.join(","))?;
    for i in 1..=points {
        let y = y_max * i as f64 / points as f64;
        let mut row = vec![fmt_num(y)];
        for p in &curves {
            let f = density_f(p, y, talbot).map_err(|e| Failure::at("y", y, e))?;
            row.push(fmt_num(f));
        }
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()?;
    guard.armed = false;
    Ok(())
}
