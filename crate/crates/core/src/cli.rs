//! Command-line front end.
//!
//! Every subcommand takes its structure either from the catalog
//! (`--catalog NAME --param k=v ...`) or from a JSON file (`--input PATH`)
//! of the shape written by `catalog dump`.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog;
use crate::error::{Error, Result};
use crate::flow::{self, BracketPoint, FlowOptions};
use crate::forms::{KForm, Term};
use crate::g2::{ClassificationReport, G2Structure, Tolerances};
use crate::liecoframe::{CoframeAlgebra, CoframeJson, LieAlgebra7, LieAlgebraJson};
use crate::linalg;
use crate::soliton::{self, SolitonCertificate};

#[derive(Parser, Debug)]
#[command(
    name = "g2flow",
    version,
    about = "Closed G2-structures on Lie algebras"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Metric, torsion, curvature and stabilizer data of a structure.
    Inspect(StructureArgs),
    /// Quadratic / ERP / eigenform classification, F and soliton type.
    Classify(StructureArgs),
    /// Laplacian soliton certificate `Q_dτ = cI + sym(D)`.
    Soliton(StructureArgs),
    /// RK4 Laplacian flow on the structure's coframe.
    Flow(FlowArgs),
    /// RK4 on the (a,b,c) bracket-flow ODE; start given by --param a=.. b=.. c=..
    BracketFlow(BracketArgs),
    /// Evaluate a catalog family over a parameter grid (`--param a=start:end:step`).
    Sweep(SweepArgs),
    /// List or dump catalog entries.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand, Debug)]
pub enum CatalogAction {
    /// Names and parameter ranges.
    List(OutputArgs),
    /// Lie algebra (or coframe) and φ of one entry, as JSON.
    Dump {
        name: String,
        #[arg(long = "param", value_name = "K=V")]
        params: Vec<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args, Debug, Clone, Default)]
pub struct InputArgs {
    /// Catalog entry name (see `catalog list`).
    #[arg(long)]
    pub catalog: Option<String>,
    /// Parameter `name=value`, or `name=start:end:step` for sweeps.
    #[arg(long = "param", value_name = "K=V")]
    pub params: Vec<String>,
    /// JSON file with `phi` and either `lie_algebra` or `coframe`.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct TolArgs {
    /// Tolerance override `name=value`; names: closed, quadratic, soliton, steady, parallel.
    #[arg(long = "tol", value_name = "NAME=V")]
    pub tol: Vec<String>,
}

#[derive(Args, Debug, Clone)]
pub struct StructureArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub tol: TolArgs,
}

#[derive(Args, Debug, Clone)]
pub struct FlowArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, default_value_t = 1e-3, allow_negative_numbers = true)]
    pub dt: f64,
    #[arg(long = "t-end", default_value_t = 0.1, allow_negative_numbers = true)]
    pub t_end: f64,
    /// Record every n-th step.
    #[arg(long = "sample-every", default_value_t = 1)]
    pub sample_every: usize,
}

#[derive(Args, Debug, Clone)]
pub struct BracketArgs {
    #[arg(long = "param", value_name = "K=V")]
    pub params: Vec<String>,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, default_value_t = 1e-3, allow_negative_numbers = true)]
    pub dt: f64,
    #[arg(long = "t-end", default_value_t = 1.0, allow_negative_numbers = true)]
    pub t_end: f64,
    #[arg(long = "sample-every", default_value_t = 1)]
    pub sample_every: usize,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub tol: TolArgs,
    /// Comma-separated columns: F, c, kind, lambda, q, erp, tau_norm2, R, residual.
    #[arg(long, value_delimiter = ',', default_value = "F,c,kind")]
    pub emit: Vec<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Json,
    Csv,
}

/// Where a structure comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum InputSource {
    Catalog {
        name: String,
        params: Vec<(String, f64)>,
    },
    File(PathBuf),
}

/// A parameter value: one number or an inclusive `start:end:step` grid.
#[derive(Clone, Debug, PartialEq)]
pub enum ParamSpec {
    Value(f64),
    Range { start: f64, end: f64, step: f64 },
}

impl ParamSpec {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            ParamSpec::Value(v) => vec![v],
            ParamSpec::Range { start, end, step } => {
                let n = ((end - start) / step + 1e-9).floor() as usize;
                (0..=n).map(|i| start + i as f64 * step).collect()
            }
        }
    }
}

/// Parse `name=v` or `name=start:end:step`.
pub fn parse_param(s: &str) -> Result<(String, ParamSpec)> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| Error::Invalid(format!("parameter '{s}' is not name=value")))?;
    let num = |x: &str| {
        x.trim()
            .parse::<f64>()
            .map_err(|_| Error::Invalid(format!("parameter '{s}': '{x}' is not a number")))
    };
    let parts: Vec<&str> = value.split(':').collect();
    let spec = match parts.as_slice() {
        [v] => ParamSpec::Value(num(v)?),
        [a, b, c] => {
            let (start, end, step) = (num(a)?, num(b)?, num(c)?);
            if step.is_nan() || step <= 0.0 || end < start {
                return Err(Error::Invalid(format!(
                    "parameter '{s}': need step > 0 and end >= start"
                )));
            }
            ParamSpec::Range { start, end, step }
        }
        _ => {
            return Err(Error::Invalid(format!(
                "parameter '{s}' is not v or start:end:step"
            )))
        }
    };
    Ok((name.trim().to_string(), spec))
}

fn single_params(raw: &[String]) -> Result<Vec<(String, f64)>> {
    raw.iter()
        .map(|s| match parse_param(s)? {
            (k, ParamSpec::Value(v)) => Ok((k, v)),
            (k, ParamSpec::Range { .. }) => Err(Error::Invalid(format!(
                "parameter '{k}': ranges are only allowed for sweep"
            ))),
        })
        .collect()
}

fn parse_tolerances(raw: &[String]) -> Result<Tolerances> {
    let mut t = Tolerances::default();
    for s in raw {
        let (k, v) = match parse_param(s)? {
            (k, ParamSpec::Value(v)) if v > 0.0 => (k, v),
            _ => {
                return Err(Error::Invalid(format!(
                    "tolerance '{s}' must be name=positive"
                )))
            }
        };
        match k.as_str() {
            "closed" => t.closed = v,
            "quadratic" => t.quadratic = v,
            "soliton" => t.soliton = v,
            "steady" => t.steady = v,
            "parallel" => t.parallel = v,
            other => return Err(Error::Invalid(format!("unknown tolerance '{other}'"))),
        }
    }
    Ok(t)
}

fn input_source(a: &InputArgs, allow_ranges: bool) -> Result<InputSource> {
    match (&a.catalog, &a.input) {
        (Some(name), None) => Ok(InputSource::Catalog {
            name: name.clone(),
            params: if allow_ranges {
                Vec::new()
            } else {
                single_params(&a.params)?
            },
        }),
        (None, Some(path)) if a.params.is_empty() => Ok(InputSource::File(path.clone())),
        (None, Some(_)) => Err(Error::Invalid("--param only applies to --catalog".into())),
        _ => Err(Error::Invalid(
            "exactly one of --catalog or --input is required".into(),
        )),
    }
}

/// Validated run configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: RunCommand,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub tol: Tolerances,
}

#[derive(Clone, Debug)]
pub enum RunCommand {
    Inspect(InputSource),
    Classify(InputSource),
    Soliton(InputSource),
    Flow {
        input: InputSource,
        opts: FlowOptions,
    },
    BracketFlow {
        start: BracketPoint,
        t_end: f64,
        dt: f64,
        sample_every: usize,
    },
    Sweep {
        family: String,
        params: Vec<(String, ParamSpec)>,
        emit: Vec<String>,
    },
    CatalogList,
    CatalogDump {
        name: String,
        params: Vec<(String, f64)>,
    },
}

const EMIT_FIELDS: &[&str] = &[
    "F",
    "c",
    "kind",
    "lambda",
    "q",
    "erp",
    "tau_norm2",
    "R",
    "residual",
];

fn check_step(dt: f64, t_end: f64) -> Result<()> {
    if dt.is_nan() || dt <= 0.0 || t_end.is_nan() || t_end <= 0.0 {
        return Err(Error::Invalid(format!(
            "need --dt > 0 and --t-end > 0, got dt={dt} t-end={t_end}"
        )));
    }
    Ok(())
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<RunConfig> {
        let mk = |command, o: OutputArgs, tol: &[String]| -> Result<RunConfig> {
            Ok(RunConfig {
                command,
                format: o.format,
                out: o.out,
                tol: parse_tolerances(tol)?,
            })
        };
        match cli.command {
            Command::Inspect(a) => mk(
                RunCommand::Inspect(input_source(&a.input, false)?),
                a.output,
                &a.tol.tol,
            ),
            Command::Classify(a) => mk(
                RunCommand::Classify(input_source(&a.input, false)?),
                a.output,
                &a.tol.tol,
            ),
            Command::Soliton(a) => mk(
                RunCommand::Soliton(input_source(&a.input, false)?),
                a.output,
                &a.tol.tol,
            ),
            Command::Flow(a) => {
                check_step(a.dt, a.t_end)?;
                let opts = FlowOptions {
                    t_end: a.t_end,
                    dt: a.dt,
                    sample_every: a.sample_every.max(1),
                };
                mk(
                    RunCommand::Flow {
                        input: input_source(&a.input, false)?,
                        opts,
                    },
                    a.output,
                    &[],
                )
            }
            Command::BracketFlow(a) => {
                check_step(a.dt, a.t_end)?;
                let params = single_params(&a.params)?;
                let mut p = BracketPoint::new(1.0, 1.0, 1.0);
                for (k, v) in params {
                    match k.as_str() {
                        "a" => p.a = v,
                        "b" => p.b = v,
                        "c" => p.c = v,
                        other => {
                            return Err(Error::Invalid(format!("unknown parameter '{other}'")))
                        }
                    }
                }
                if p.a < 0.0 || p.b < 0.0 || p.c < 0.0 {
                    return Err(Error::Invalid("bracket flow needs a, b, c >= 0".into()));
                }
                mk(
                    RunCommand::BracketFlow {
                        start: p,
                        t_end: a.t_end,
                        dt: a.dt,
                        sample_every: a.sample_every.max(1),
                    },
                    a.output,
                    &[],
                )
            }
            Command::Sweep(a) => {
                let family = match input_source(&a.input, true)? {
                    InputSource::Catalog { name, .. } => name,
                    InputSource::File(_) => {
                        return Err(Error::Invalid("sweep needs --catalog".into()))
                    }
                };
                let params = a
                    .input
                    .params
                    .iter()
                    .map(|s| parse_param(s))
                    .collect::<Result<Vec<_>>>()?;
                let emit: Vec<String> = a.emit.iter().map(|s| s.trim().to_string()).collect();
                if let Some(bad) = emit.iter().find(|e| !EMIT_FIELDS.contains(&e.as_str())) {
                    return Err(Error::Invalid(format!(
                        "unknown --emit column '{bad}' (known: {})",
                        EMIT_FIELDS.join(",")
                    )));
                }
                mk(
                    RunCommand::Sweep {
                        family,
                        params,
                        emit,
                    },
                    a.output,
                    &a.tol.tol,
                )
            }
            Command::Catalog { action } => match action {
                CatalogAction::List(o) => mk(RunCommand::CatalogList, o, &[]),
                CatalogAction::Dump {
                    name,
                    params,
                    output,
                } => mk(
                    RunCommand::CatalogDump {
                        name,
                        params: single_params(&params)?,
                    },
                    output,
                    &[],
                ),
            },
        }
    }
}

/// On-disk structure description, also the output of `catalog dump`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StructureJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lie_algebra: Option<LieAlgebraJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coframe: Option<CoframeJson>,
    pub phi: Vec<Term>,
}

impl StructureJson {
    pub fn from_structure(name: &str, s: &G2Structure) -> Self {
        let (lie_algebra, coframe) = match s.lie() {
            Some(l) => (Some(l.to_json()), None),
            None => (None, Some(s.coframe().to_json())),
        };
        StructureJson {
            name: Some(name.to_string()),
            lie_algebra,
            coframe,
            phi: s.phi().to_terms(),
        }
    }

    pub fn to_structure(&self) -> Result<G2Structure> {
        let phi = KForm::from_terms(3, &self.phi)?;
        match (&self.lie_algebra, &self.coframe) {
            (Some(l), None) => G2Structure::from_lie(&LieAlgebra7::from_json(l)?, phi),
            (None, Some(c)) => G2Structure::new(CoframeAlgebra::from_json(c)?, phi),
            _ => Err(Error::Invalid(
                "input needs exactly one of 'lie_algebra' or 'coframe'".into(),
            )),
        }
    }
}

fn load(src: &InputSource) -> Result<(String, G2Structure)> {
    match src {
        InputSource::Catalog { name, params } => {
            let rec = catalog::by_name(name, params)?;
            Ok((rec.name, rec.structure))
        }
        InputSource::File(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
            let json: StructureJson = serde_json::from_str(&text)
                .map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
            let name = json
                .name
                .clone()
                .unwrap_or_else(|| path.display().to_string());
            Ok((name, json.to_structure()?))
        }
    }
}

#[derive(Serialize)]
struct InspectReport {
    name: String,
    phi: KForm,
    /// Row-major.
    metric: Vec<f64>,
    tau: KForm,
    tau_norm2: f64,
    dtau: KForm,
    star_tau_tau: KForm,
    q_dtau: Vec<f64>,
    ricci: Vec<f64>,
    scalar: f64,
    #[serde(rename = "F")]
    f: Option<f64>,
    q_dims: [usize; 3],
    stabilizer_dim: usize,
    closed_residual: f64,
}

#[derive(Serialize)]
struct ClassifyOutput {
    name: String,
    #[serde(flatten)]
    report: ClassificationReport,
    soliton: Option<SolitonCertificate>,
}

#[derive(Serialize)]
struct CatalogEntry {
    name: &'static str,
    parameters: &'static str,
}

fn mat_flat(m: &crate::forms::Matrix7) -> Vec<f64> {
    linalg::flatten(m).as_slice().to_vec()
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), |v| format!("{v}"))
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

/// Execute a validated configuration and return the rendered output.
pub fn run(cfg: &RunConfig) -> Result<String> {
    match &cfg.command {
        RunCommand::Inspect(src) => inspect(src, cfg.format),
        RunCommand::Classify(src) => classify(src, cfg),
        RunCommand::Soliton(src) => {
            let (name, s) = load(src)?;
            let t = s.torsion()?;
            let cert = soliton::detect(&s, &t, &cfg.tol)?;
            Ok(match cfg.format {
                Format::Json => to_json(&cert),
                Format::Table | Format::Csv => {
                    let mut out = format!("structure  {name}\n");
                    let _ = writeln!(out, "kind       {}", cert.kind.as_str());
                    let _ = writeln!(out, "c          {}", cert.c);
                    let _ = writeln!(out, "lambda     {}", cert.lambda);
                    let _ = writeln!(out, "residual   {:e}", cert.residual);
                    let _ = writeln!(out, "algebraic  {}", cert.algebraic);
                    let _ = writeln!(out, "D          {}", cert.d);
                    out
                }
            })
        }
        RunCommand::Flow { input, opts } => {
            let (_, s) = load(input)?;
            let traj = flow::laplacian_flow_with(&s, *opts)?;
            render_flow(&traj, cfg.format)
        }
        RunCommand::BracketFlow {
            start,
            t_end,
            dt,
            sample_every,
        } => {
            let traj = flow::bracket_flow_abc(*start, *t_end, *dt, *sample_every)?;
            Ok(match cfg.format {
                Format::Json => to_json(&traj),
                _ => {
                    let mut buf = Vec::new();
                    traj.write_csv(&mut buf).expect("in-memory write");
                    String::from_utf8(buf).expect("ascii")
                }
            })
        }
        RunCommand::Sweep {
            family,
            params,
            emit,
        } => sweep(family, params, emit, cfg),
        RunCommand::CatalogList => Ok(match cfg.format {
            Format::Json => to_json(
                &catalog::ENTRIES
                    .iter()
                    .map(|&(name, parameters)| CatalogEntry { name, parameters })
                    .collect::<Vec<_>>(),
            ),
            _ => catalog::ENTRIES
                .iter()
                .map(|(n, p)| format!("{n:<20} {p}\n"))
                .collect(),
        }),
        RunCommand::CatalogDump { name, params } => {
            let rec = catalog::by_name(name, params)?;
            Ok(to_json(&StructureJson::from_structure(
                &rec.name,
                &rec.structure,
            )))
        }
    }
}

fn inspect(src: &InputSource, format: Format) -> Result<String> {
    let (name, s) = load(src)?;
    let t = s.torsion()?;
    let rep = InspectReport {
        name,
        phi: s.phi().clone(),
        metric: mat_flat(s.metric().matrix()),
        tau: t.tau.clone(),
        tau_norm2: t.tau_norm2,
        dtau: t.dtau.clone(),
        star_tau_tau: t.star_tau_tau.clone(),
        q_dtau: mat_flat(&t.q_dtau),
        ricci: mat_flat(&t.ricci),
        scalar: t.scalar,
        f: t.f,
        q_dims: s.stabilizer().q_dims,
        stabilizer_dim: s.stabilizer().g2.len(),
        closed_residual: t.closed_residual,
    };
    if format == Format::Json {
        return Ok(to_json(&rep));
    }
    let mut out = String::new();
    let _ = writeln!(out, "structure        {}", rep.name);
    let _ = writeln!(out, "phi              {}", rep.phi);
    let _ = writeln!(
        out,
        "metric diagonal  {:?}",
        s.metric().matrix().diagonal().as_slice()
    );
    let _ = writeln!(out, "dim g2           {}", rep.stabilizer_dim);
    let _ = writeln!(out, "q dims           {:?}", rep.q_dims);
    let _ = writeln!(out, "|dphi|           {:e}", rep.closed_residual);
    let _ = writeln!(out, "tau              {}", rep.tau);
    let _ = writeln!(out, "|tau|^2          {}", rep.tau_norm2);
    let _ = writeln!(out, "dtau             {}", rep.dtau);
    let _ = writeln!(out, "*(tau^tau)       {}", rep.star_tau_tau);
    let _ = writeln!(
        out,
        "Ric eigenvalues  {:?}",
        s.self_adjoint_eigenvalues(&t.ricci)
    );
    let _ = writeln!(out, "R                {}", rep.scalar);
    let _ = writeln!(out, "F                {}", opt(rep.f));
    Ok(out)
}

fn classify(src: &InputSource, cfg: &RunConfig) -> Result<String> {
    let (name, s) = load(src)?;
    let t = s.torsion()?;
    let report = s.classify(&t, &cfg.tol);
    let soliton = match soliton::detect(&s, &t, &cfg.tol) {
        Ok(c) => Some(c),
        Err(Error::NoLieAlgebra) => None,
        Err(e) => return Err(e),
    };
    let o = ClassifyOutput {
        name,
        report,
        soliton,
    };
    if cfg.format == Format::Json {
        return Ok(to_json(&o));
    }
    let r = &o.report;
    let mut out = String::new();
    let _ = writeln!(out, "structure      {}", o.name);
    let _ = writeln!(out, "closed         {}", r.closed);
    let _ = writeln!(out, "parallel       {}", r.parallel);
    let _ = writeln!(out, "eigenform c    {}", opt(r.eigenform_c));
    let _ = writeln!(out, "quadratic q    {}", opt(r.quadratic_q));
    let _ = writeln!(out, "ERP            {}", r.erp);
    let _ = writeln!(out, "|tau|^2        {}", r.tau_norm2);
    let _ = writeln!(out, "F              {}", opt(r.f));
    if r.f_ill_conditioned {
        let _ = writeln!(out, "warning        |Ric| < 1e-6, F is ill-conditioned");
    }
    let _ = writeln!(out, "Ric spectrum   {:?}", r.ricci_eigenvalues);
    match &o.soliton {
        Some(c) => {
            let _ = writeln!(out, "soliton        {}", c.kind.as_str());
            let _ = writeln!(out, "c              {}", c.c);
            let _ = writeln!(out, "residual       {:e}", c.residual);
        }
        None => {
            let _ = writeln!(out, "soliton        unavailable (no Lie algebra)");
        }
    }
    Ok(out)
}

fn render_flow(traj: &flow::FlowTrajectory, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => to_json(traj),
        Format::Csv => {
            let mut buf = Vec::new();
            traj.write_csv(&mut buf).expect("in-memory write");
            String::from_utf8(buf).expect("ascii")
        }
        Format::Table => {
            let mut out = format!(
                "{:>12} {:>16} {:>16} {:>12} {:>10}\n",
                "t", "|tau|^2", "R", "F", "|dphi|"
            );
            for s in &traj.samples {
                let _ = writeln!(
                    out,
                    "{:>12.6} {:>16.8e} {:>16.8e} {:>12} {:>10.2e}",
                    s.t,
                    s.tau_norm2,
                    s.scalar,
                    s.f.map_or_else(|| "-".into(), |f| format!("{f:.8}")),
                    s.closed_residual
                );
            }
            if let Some(t) = traj.singular_at {
                let _ = writeln!(out, "singular at t* = {t}");
            }
            out
        }
    })
}

/// One evaluated sweep point.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub params: Vec<(String, f64)>,
    pub values: Vec<(String, String)>,
}

fn sweep_point(
    family: &str,
    params: &[(String, f64)],
    emit: &[String],
    tol: &Tolerances,
) -> Result<SweepRow> {
    let rec = catalog::by_name(family, params)?;
    let s = &rec.structure;
    let t = s.torsion()?;
    let report = s.classify(&t, tol);
    let cert = match soliton::detect(s, &t, tol) {
        Ok(c) => Some(c),
        Err(Error::NoLieAlgebra) => None,
        Err(e) => return Err(e),
    };
    let num = |x: f64| flow::fmt_f(x);
    let values = emit
        .iter()
        .map(|e| {
            let v = match e.as_str() {
                "F" => t.f.map_or_else(|| "nan".into(), num),
                "c" => cert.as_ref().map_or_else(|| "nan".into(), |c| num(c.c)),
                "lambda" => cert
                    .as_ref()
                    .map_or_else(|| "nan".into(), |c| num(c.lambda)),
                "kind" => cert
                    .as_ref()
                    .map_or_else(|| "unavailable".into(), |c| c.kind.as_str().into()),
                "residual" => cert
                    .as_ref()
                    .map_or_else(|| "nan".into(), |c| num(c.residual)),
                "q" => report.quadratic_q.map_or_else(|| "nan".into(), num),
                "erp" => report.erp.to_string(),
                "tau_norm2" => num(t.tau_norm2),
                "R" => num(t.scalar),
                _ => unreachable!("emit columns validated"),
            };
            (e.clone(), v)
        })
        .collect();
    Ok(SweepRow {
        params: params.to_vec(),
        values,
    })
}

/// Cartesian product of the parameter grids, first parameter slowest.
pub fn sweep_grid(params: &[(String, ParamSpec)]) -> Vec<Vec<(String, f64)>> {
    let mut grid = vec![Vec::new()];
    for (name, spec) in params {
        let values = spec.values();
        grid = grid
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push((name.clone(), v));
                    p
                })
            })
            .collect();
    }
    grid
}

fn sweep(
    family: &str,
    params: &[(String, ParamSpec)],
    emit: &[String],
    cfg: &RunConfig,
) -> Result<String> {
    let grid = sweep_grid(params);
    // collect() on an indexed parallel iterator keeps grid order
    let rows = grid
        .par_iter()
        .map(|p| sweep_point(family, p, emit, &cfg.tol))
        .collect::<Result<Vec<_>>>()?;
    let names: Vec<&str> = params.iter().map(|(n, _)| n.as_str()).collect();
    Ok(match cfg.format {
        Format::Json => to_json(&rows),
        Format::Csv | Format::Table => {
            let sep = if cfg.format == Format::Csv { "," } else { "  " };
            let mut header: Vec<String> = names.iter().map(|s| s.to_string()).collect();
            header.extend(emit.iter().cloned());
            let mut out = header.join(sep);
            out.push('\n');
            for r in &rows {
                let mut cells: Vec<String> =
                    r.params.iter().map(|(_, v)| flow::fmt_f(*v)).collect();
                cells.extend(r.values.iter().map(|(_, v)| v.clone()));
                out.push_str(&cells.join(sep));
                out.push('\n');
            }
            out
        }
    })
}

/// Parse arguments, run, write output; exit 0 on success, 2 on validation
/// errors, 3 on numerical failures.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = RunConfig::from_cli(cli).and_then(|cfg| {
        let text = run(&cfg)?;
        emit(&cfg, &text)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 3 })
        }
    }
}

fn emit(cfg: &RunConfig, text: &str) -> Result<()> {
    match &cfg.out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Error::Invalid(format!("stdout: {e}")))
        }
    }
}
