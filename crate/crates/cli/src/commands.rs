use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use slhkit::adiabatic::{check_assumptions, check_decoupling, convergence_study, limit_char_op, limit_slh};
use slhkit::characteristic::{char_op, char_op_allpass, char_op_stratonovich, sweep, Axis, FrequencyGrid, Method};
use slhkit::matrix::{c, C64};
use slhkit::model::{series_product, DEFAULT_TOL};
use slhkit::reduction::slow_restriction;
use slhkit::stratonovich::{ito_to_stratonovich, stratonovich_to_ito};
use slhkit::zoo::{self, Params, ZooKind, ZooModel};
use slhkit::SlhModel;

use crate::csv;
use crate::error::{CliError, CliResult};
use crate::io::{write_text, ModelFile};
use crate::plot::{self, Trace};

pub const TOL_ENV: &str = "SLHKIT_TOL";

#[derive(Debug, Parser)]
#[command(name = "slhkit", version, about = "Characteristic operators and adiabatic limits of SLH models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    Imaginary,
    Real,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Direct,
    Allpass,
    Stratonovich,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a model, family or Stratonovich file.
    Check {
        path: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Evaluate T(s) at one point or over a linear grid, writing CSV.
    Eval {
        path: PathBuf,
        /// Single point `re,im`.
        #[arg(long, conflicts_with = "sweep", allow_hyphen_values = true)]
        s: Option<String>,
        /// Grid `min:max:count` along --axis.
        #[arg(long, allow_hyphen_values = true)]
        sweep: Option<String>,
        #[arg(long, value_enum, default_value = "imaginary")]
        axis: AxisArg,
        #[arg(long, value_enum, default_value = "direct")]
        method: MethodArg,
        #[arg(long)]
        out: Option<PathBuf>,
        /// SVG plot of one block of T over the grid.
        #[arg(long)]
        plot: Option<PathBuf>,
        /// Block `j,k` to plot.
        #[arg(long, default_value = "0,0")]
        entry: String,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Assumption report, limit model and decoupling verdict of a family.
    Limit {
        path: PathBuf,
        /// Write the reduced slow model when the limit decouples, the full
        /// limit model otherwise.
        #[arg(long)]
        emit: Option<PathBuf>,
        /// Comma-separated k values for a convergence table.
        #[arg(long)]
        study: Option<String>,
        #[arg(long, default_value = "1,0", allow_hyphen_values = true)]
        s: String,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Series product `B ◁ A`, feeding the output of A into B.
    Compose {
        b: PathBuf,
        a: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// `zoo list`, or build an entry: `zoo NAME key=value ...`.
    Zoo {
        name: String,
        params: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}

fn tolerance(flag: Option<f64>) -> CliResult<f64> {
    let tol = match flag {
        Some(t) => t,
        None => match std::env::var(TOL_ENV) {
            Ok(text) => text
                .trim()
                .parse::<f64>()
                .map_err(|_| CliError::Invalid(format!("{TOL_ENV}=`{text}` is not a number")))?,
            Err(_) => DEFAULT_TOL,
        },
    };
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::Invalid(format!("tolerance must be positive, got {tol}")));
    }
    Ok(tol)
}

fn parse_complex(text: &str) -> CliResult<C64> {
    let bad = || CliError::Invalid(format!("expected `re,im` or `re`, got `{text}`"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    match text.split_once(',') {
        Some((a, b)) => Ok(c(num(a)?, num(b)?)),
        None => Ok(c(num(text)?, 0.0)),
    }
}

fn parse_pair(text: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::Invalid(format!("expected `j,k`, got `{text}`"));
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn parse_grid(text: &str, axis: AxisArg) -> CliResult<FrequencyGrid> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || CliError::Invalid(format!("expected `min:max:count`, got `{text}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let min: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let max: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    let axis = match axis {
        AxisArg::Imaginary => Axis::Imaginary,
        AxisArg::Real => Axis::Real,
    };
    Ok(FrequencyGrid::linear(axis, min, max, count)?)
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => write_text(p, text),
        None => out.write_all(text.as_bytes()).map_err(io_err),
    }
}

fn validated(model: SlhModel, tol: f64, what: &str) -> CliResult<SlhModel> {
    let report = model.validate(tol);
    if !report.passed() {
        return Err(CliError::Invalid(format!("{what}: {}", report.failures().join("; "))));
    }
    Ok(model)
}

fn read_model(path: &Path, tol: f64) -> CliResult<SlhModel> {
    match ModelFile::read(path, tol)? {
        ModelFile::Slh(m) => validated(m, tol, &path.display().to_string()),
        ModelFile::Stratonovich(e) => Ok(stratonovich_to_ito(&e)?),
        ModelFile::Family(_) => Err(CliError::Invalid(format!(
            "{}: scaled families have no single characteristic operator; use `limit`",
            path.display()
        ))),
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> CliResult<()> {
    match &cli.command {
        Command::Check { path, tol } => cmd_check(path, tolerance(*tol)?, out),
        Command::Eval { path, s, sweep, axis, method, out: dest, plot, entry, tol } => {
            let opts = EvalOptions {
                s: s.as_deref(),
                sweep: sweep.as_deref(),
                axis: *axis,
                method: *method,
                out: dest.as_deref(),
                plot: plot.as_deref(),
                entry,
            };
            cmd_eval(path, &opts, tolerance(*tol)?, out)
        }
        Command::Limit { path, emit, study, s, tol } => {
            cmd_limit(path, emit.as_deref(), study.as_deref(), s, tolerance(*tol)?, out)
        }
        Command::Compose { b, a, out: dest, tol } => cmd_compose(b, a, dest.as_deref(), tolerance(*tol)?, out),
        Command::Zoo { name, params, out: dest } => cmd_zoo(name, params, dest.as_deref(), out),
    }
}

fn cmd_check(path: &Path, tol: f64, out: &mut dyn Write) -> CliResult<()> {
    let file = ModelFile::read(path, tol)?;
    let w = |out: &mut dyn Write, line: String| writeln!(out, "{line}").map_err(io_err);
    w(out, format!("{}: kind {}, tol {tol:.1e}", path.display(), file.kind()))?;
    match file {
        ModelFile::Slh(m) => {
            let r = m.validate(tol);
            w(out, format!("  n_inputs {}, dim {}", m.n_inputs(), m.dim()))?;
            w(out, format!("  S unitarity residual   {:.3e}", r.s_unitarity))?;
            w(out, format!("  H hermiticity residual {:.3e}", r.h_hermiticity))?;
            if !r.passed() {
                return Err(CliError::Invalid(r.failures().join("; ")));
            }
        }
        ModelFile::Family(f) => {
            let r = check_assumptions(&f, tol);
            w(out, format!("  n_inputs {}, dim {}, slow {:?}", f.n_inputs(), f.dim(), f.partition().slow()))?;
            w(out, format!("  S unitarity residual     {:.3e}", r.s_unitarity))?;
            w(out, format!("  hermiticity residual     {:.3e}", r.hermiticity))?;
            w(out, format!("  |L1 P_s|                 {:.3e}", r.l1_slow))?;
            w(out, format!("  |P_s H1 P_s|             {:.3e}", r.h1_ss))?;
            w(out, format!("  H2 outside fast block    {:.3e}", r.h2_outside_ff))?;
            w(out, format!("  A_ff condition estimate  {:.3e}", r.a_ff_cond))?;
            w(out, format!("  K identity residuals     {:?}", r.k_identities))?;
            for warning in &r.warnings {
                w(out, format!("  warning: {warning}"))?;
            }
            if !r.passed() {
                return Err(CliError::Invalid(r.failures().join("; ")));
            }
        }
        ModelFile::Stratonovich(e) => {
            w(out, format!("  n_inputs {}, dim {}", e.n_inputs(), e.dim()))?;
            let model = stratonovich_to_ito(&e)?;
            w(out, format!("  Ito S unitarity residual {:.3e}", model.validate(tol).s_unitarity))?;
        }
    }
    w(out, "  ok".into())
}

struct EvalOptions<'a> {
    s: Option<&'a str>,
    sweep: Option<&'a str>,
    axis: AxisArg,
    method: MethodArg,
    out: Option<&'a Path>,
    plot: Option<&'a Path>,
    entry: &'a str,
}

fn cmd_eval(path: &Path, opts: &EvalOptions, tol: f64, out: &mut dyn Write) -> CliResult<()> {
    let model = read_model(path, tol)?;
    let (n, m) = (model.n_inputs(), model.dim());
    let method = match opts.method {
        MethodArg::Direct => Method::Direct,
        MethodArg::Allpass => Method::Allpass,
        MethodArg::Stratonovich => Method::Stratonovich,
    };
    let (bj, bk) = parse_pair(opts.entry)?;
    if bj >= n || bk >= n {
        return Err(CliError::Invalid(format!("--entry {bj},{bk} is out of range for {n} inputs")));
    }

    let (points, xs, x_label) = match (opts.s, opts.sweep) {
        (Some(text), None) => {
            let s = parse_complex(text)?;
            let value = match method {
                Method::Direct => char_op(&model, s),
                Method::Allpass => char_op_allpass(&model, s),
                Method::Stratonovich => ito_to_stratonovich(&model).and_then(|e| char_op_stratonovich(&e, s)),
            };
            (vec![(s, value.ok().map(|t| t.into_data()))], vec![s.im], "Im s")
        }
        (None, Some(text)) => {
            let grid = parse_grid(text, opts.axis)?;
            let result = sweep(&model, &grid, method);
            let label = match grid.axis() {
                Axis::Imaginary => "omega",
                Axis::Real => "s",
            };
            let points = (0..grid.len())
                .map(|i| (grid.s_at(i), result.values[i].as_ref().map(|t| t.data().clone())))
                .collect();
            (points, grid.points().to_vec(), label)
        }
        _ => return Err(CliError::Invalid("give exactly one of --s or --sweep".into())),
    };

    let borrowed: Vec<_> = points.iter().map(|(s, t)| (*s, t.as_ref())).collect();
    emit(out, opts.out, &csv::render_points(&borrowed, n, m))?;

    if let Some(svg_path) = opts.plot {
        let mut traces = Vec::new();
        for a in 0..m {
            for b in 0..m {
                let samples = points
                    .iter()
                    .zip(&xs)
                    .map(|((_, t), &x)| match t {
                        Some(t) => {
                            let z = t[(bj * m + a, bk * m + b)];
                            (x, z.norm(), z.arg())
                        }
                        None => (x, f64::NAN, f64::NAN),
                    })
                    .collect();
                traces.push(Trace { label: format!("T[{bj},{bk}]({a},{b})"), points: samples });
            }
        }
        let title = format!("{} block ({bj},{bk})", path.display());
        write_text(svg_path, &plot::render(&title, x_label, &traces))?;
    }

    if points.iter().all(|(_, t)| t.is_none()) {
        return Err(CliError::Numerical("every evaluation point is singular".into()));
    }
    Ok(())
}

fn cmd_limit(
    path: &Path,
    emit_path: Option<&Path>,
    study: Option<&str>,
    s_text: &str,
    tol: f64,
    out: &mut dyn Write,
) -> CliResult<()> {
    let family = match ModelFile::read(path, tol)? {
        ModelFile::Family(f) => f,
        other => return Err(CliError::Invalid(format!("{}: expected a family file, got `{}`", path.display(), other.kind()))),
    };
    let w = |out: &mut dyn Write, line: String| writeln!(out, "{line}").map_err(io_err);
    let report = check_assumptions(&family, tol);
    w(out, format!("assumptions: {}", if report.passed() { "ok" } else { "violated" }))?;
    w(out, format!("  A_ff condition estimate {:.3e}", report.a_ff_cond))?;
    for warning in &report.warnings {
        w(out, format!("  warning: {warning}"))?;
    }
    if !report.passed() {
        return Err(CliError::Invalid(report.failures().join("; ")));
    }

    let limit = limit_slh(&family)?;
    let verdict = check_decoupling(&limit, tol);
    w(out, format!("S_hat unitarity residual {:.3e}", limit.shat.check_unitary(tol).residual))?;
    w(out, format!("H_hat forms residual     {:.3e}", limit.hamiltonian_forms_residual()))?;
    w(
        out,
        format!(
            "decoupled: {} (|L_f| {:.3e}, |S_sf| {:.3e}, |S_fs| {:.3e})",
            verdict.decoupled, verdict.residuals[0], verdict.residuals[1], verdict.residuals[2]
        ),
    )?;

    let s = parse_complex(s_text)?;
    let t = limit_char_op(&family, s)?;
    let ts = slow_restriction(t.data(), family.partition(), family.n_inputs());
    w(out, format!("limit T at s = {}{:+}i on the slow space:", s.re, s.im))?;
    for i in 0..ts.rows() {
        let row: Vec<String> = (0..ts.cols()).map(|j| format!("{:+.6e}{:+.6e}i", ts[(i, j)].re, ts[(i, j)].im)).collect();
        w(out, format!("  {}", row.join("  ")))?;
    }

    if let Some(ks) = study {
        let ks: Vec<f64> = ks
            .split(',')
            .map(|k| k.trim().parse::<f64>().map_err(|_| CliError::Invalid(format!("bad k value `{k}`"))))
            .collect::<CliResult<_>>()?;
        let table = convergence_study(&family, s, &ks)?;
        w(out, "k,error".into())?;
        for (k, e) in &table.rows {
            w(out, format!("{k:e},{e:.6e}"))?;
        }
        match table.slope {
            Some(slope) => w(out, format!("log-log slope {slope:.3}"))?,
            None => w(out, "log-log slope: fewer than three points with k >= 100".into())?,
        }
    }

    if let Some(p) = emit_path {
        let model = match verdict.slow_model {
            Some(m) => m,
            None => {
                w(out, "limit does not decouple; emitting the full limit model".into())?;
                limit.full_model()?
            }
        };
        ModelFile::Slh(model).write(p)?;
    }
    Ok(())
}

fn cmd_compose(b: &Path, a: &Path, dest: Option<&Path>, tol: f64, out: &mut dyn Write) -> CliResult<()> {
    let mb = read_model(b, tol)?;
    let ma = read_model(a, tol)?;
    let composed = series_product(&mb, &ma)?;
    emit(out, dest, &ModelFile::Slh(composed).to_json())
}

fn cmd_zoo(name: &str, raw: &[String], dest: Option<&Path>, out: &mut dyn Write) -> CliResult<()> {
    if name == "list" {
        let mut text = String::new();
        for e in &zoo::ENTRIES {
            let kind = match e.kind {
                ZooKind::Model => "model",
                ZooKind::Family => "family",
            };
            let params: Vec<String> = e.params.iter().map(|p| format!("{}={}", p.name, p.default.re)).collect();
            text.push_str(&format!("{:<18} {:<6} {}  [{}]\n", e.name, kind, e.summary, params.join(" ")));
        }
        return emit(out, None, &text);
    }
    let mut params = Params::new();
    for item in raw {
        let (k, v) = Params::parse_assignment(item)?;
        params.insert(&k, v);
    }
    let file = match zoo::build(name, &params)? {
        ZooModel::Model(m) => ModelFile::Slh(m),
        ZooModel::Family(f) => ModelFile::Family(f),
    };
    emit(out, dest, &file.to_json())
}
