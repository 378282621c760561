//! Job model behind the `mlrelax` binary: a command, a flat parameter map,
//! an optional grid and an output format. Flags and `--config` files both
//! resolve to a [`JobConfig`], and [`run`] turns one into a [`Table`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use mlrelax::laplace::{InversionMethod, PrabhakarKernel, DEFAULT_TALBOT_NODES};
use mlrelax::levy::{h_function, h_function_auto, HRoute, LevyQuery};
use mlrelax::mlfun::{ml3, ml3_eval, prabhakar, MLParams};
use mlrelax::series::DEFAULT_TOL;
use mlrelax::spectral::{cole_cole_coupling, default_omega_grid, jonscher_exponents, spectrum};
use mlrelax::verify::{fig1, fig1_default_grid, run_all, FIG1_TAUS};
use mlrelax::volterra::{
    solve_closed_cc, solve_integral_eq1_with, solve_integral_rep, solve_laplace_with, solve_series, Eq1Options,
    SolveMethod, VolterraProblem, DEFAULT_MAX_TERMS,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Ml,
    Prabhakar,
    Levy,
    Solve,
    Spectral,
    Jonscher,
    Fig1,
    Verify,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Ml,
        Command::Prabhakar,
        Command::Levy,
        Command::Solve,
        Command::Spectral,
        Command::Jonscher,
        Command::Fig1,
        Command::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Ml => "ml",
            Command::Prabhakar => "prabhakar",
            Command::Levy => "levy",
            Command::Solve => "solve",
            Command::Spectral => "spectral",
            Command::Jonscher => "jonscher",
            Command::Fig1 => "fig1",
            Command::Verify => "verify",
        }
    }

    pub fn about(self) -> &'static str {
        match self {
            Command::Ml => "Three-parameter Mittag-Leffler function E^nu_{alpha,mu}(x)",
            Command::Prabhakar => "Prabhakar function t^{mu-1} E^nu_{alpha,mu}(a t^alpha)",
            Command::Levy => "h_{alpha,lambda}(u, t): stable density (lambda = 0), its primitive (lambda = 1)",
            Command::Solve => "Relaxation f(t) of the Volterra equation with a Prabhakar kernel",
            Command::Spectral => "Spectral function B / (B + (i omega)^{mu-alpha nu} (a + (i omega)^alpha)^nu)",
            Command::Jonscher => "Low- and high-frequency power-law exponents of the spectral function",
            Command::Fig1 => "Cole-Cole relaxation curves for alpha = 3/4, a = 3, B = 1/(4 tau)",
            Command::Verify => "Cross-route agreement suite; exits 0 iff every criterion passes",
        }
    }

    /// Parameter accepted for a single point when no grid is given.
    fn sweep_key(self) -> Option<&'static str> {
        match self {
            Command::Ml => Some("x"),
            Command::Prabhakar | Command::Levy | Command::Solve | Command::Fig1 => Some("t"),
            Command::Spectral | Command::Jonscher => Some("omega"),
            Command::Verify => None,
        }
    }

    pub fn params(self) -> &'static [ParamSpec] {
        match self {
            Command::Ml => ML,
            Command::Prabhakar => PRABHAKAR,
            Command::Levy => LEVY,
            Command::Solve => SOLVE,
            Command::Spectral => SPECTRAL,
            Command::Jonscher => SPECTRAL,
            Command::Fig1 | Command::Verify => &[],
        }
    }

    pub fn takes_grid(self) -> bool {
        self.sweep_key().is_some()
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::param(format!("unknown command {s}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    Num,
    Int,
    Choice(&'static [&'static str]),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Default {
    Required,
    /// Absent unless given; the command derives a value.
    Derived,
    Num(f64),
    Int(u64),
    Text(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSpec {
    pub key: &'static str,
    pub kind: Kind,
    pub default: Default,
    pub help: &'static str,
    pub tolerance: bool,
}

impl ParamSpec {
    /// Long flag: the key with underscores as hyphens.
    pub fn flag(&self) -> String {
        self.key.replace('_', "-")
    }
}

const fn p(key: &'static str, kind: Kind, default: Default, help: &'static str) -> ParamSpec {
    ParamSpec {
        key,
        kind,
        default,
        help,
        tolerance: false,
    }
}

const fn tol(key: &'static str, kind: Kind, default: Default, help: &'static str) -> ParamSpec {
    ParamSpec {
        key,
        kind,
        default,
        help,
        tolerance: true,
    }
}

const ALPHA: ParamSpec = p("alpha", Kind::Num, Default::Required, "alpha > 0");
const SERIES_TOL: ParamSpec = tol("tol", Kind::Num, Default::Num(DEFAULT_TOL), "series stopping tolerance");

const ML: &[ParamSpec] = &[
    ALPHA,
    p("mu", Kind::Num, Default::Num(1.0), "mu"),
    p(
        "nu",
        Kind::Num,
        Default::Num(1.0),
        "nu; nu = -n gives the Mittag-Leffler polynomial",
    ),
    p("x", Kind::Num, Default::Derived, "argument (or use a grid)"),
    p(
        "route",
        Kind::Choice(&["auto", "series"]),
        Default::Text("auto"),
        "auto picks series, large-argument expansion or inversion; series is the guarded power series",
    ),
    SERIES_TOL,
];

const PRABHAKAR: &[ParamSpec] = &[
    ALPHA,
    p("mu", Kind::Num, Default::Num(1.0), "mu"),
    p("nu", Kind::Num, Default::Num(1.0), "nu"),
    p("a", Kind::Num, Default::Required, "rate a in E(a t^alpha)"),
    p("t", Kind::Num, Default::Derived, "time t >= 0 (or use a grid)"),
];

const LEVY: &[ParamSpec] = &[
    p("alpha", Kind::Num, Default::Required, "0 < alpha <= 1"),
    p("u", Kind::Num, Default::Num(1.0), "u > 0"),
    p(
        "lambda",
        Kind::Num,
        Default::Num(0.0),
        "lambda; 0 is the density, 1 its primitive",
    ),
    p("t", Kind::Num, Default::Derived, "time t > 0 (or use a grid)"),
    p(
        "route",
        Kind::Choice(&["auto", "series", "hypergeometric", "inversion"]),
        Default::Text("auto"),
        "evaluation route",
    ),
];

const SOLVE: &[ParamSpec] = &[
    p(
        "method",
        Kind::Choice(&["series", "closed", "integral", "laplace", "eq1"]),
        Default::Text("series"),
        "solution route",
    ),
    ALPHA,
    p("mu", Kind::Num, Default::Derived, "mu (defaults to alpha)"),
    p("nu", Kind::Num, Default::Num(1.0), "nu"),
    p("a", Kind::Num, Default::Num(0.0), "kernel shift a >= 0"),
    p("B", Kind::Num, Default::Required, "coupling B >= 0"),
    p("f0", Kind::Num, Default::Num(1.0), "initial value"),
    p("t", Kind::Num, Default::Derived, "time t >= 0 (or use a grid)"),
    tol(
        "max_terms",
        Kind::Int,
        Default::Int(DEFAULT_MAX_TERMS as u64),
        "series term cap",
    ),
    tol(
        "talbot_nodes",
        Kind::Int,
        Default::Int(DEFAULT_TALBOT_NODES as u64),
        "Talbot nodes",
    ),
    tol("eq1_tol", Kind::Num, Default::Num(1e-4), "eq1 step-halving tolerance"),
    tol("eq1_max_steps", Kind::Int, Default::Int(1 << 15), "eq1 step cap"),
];

const SPECTRAL: &[ParamSpec] = &[
    ALPHA,
    p("mu", Kind::Num, Default::Derived, "mu (defaults to alpha)"),
    p("nu", Kind::Num, Default::Num(1.0), "nu"),
    p("a", Kind::Num, Default::Num(0.0), "kernel shift a >= 0"),
    p("B", Kind::Num, Default::Derived, "coupling B > 0 (defaults to tau^-mu)"),
    p(
        "tau",
        Kind::Num,
        Default::Num(1.0),
        "relaxation time; anchors the default grid and the fit",
    ),
    p(
        "omega",
        Kind::Num,
        Default::Derived,
        "angular frequency (or use a grid)",
    ),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, std::default::Default)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

impl FromStr for Spacing {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "linear" => Ok(Spacing::Linear),
            "log" => Ok(Spacing::Log),
            other => Err(CliError::param(format!("unknown spacing {other}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Grid {
    pub fn points(&self) -> Result<Vec<f64>, CliError> {
        if self.count < 2 {
            return Err(CliError::param(format!("grid count {} must be >= 2", self.count)));
        }
        if !self.start.is_finite() || !self.stop.is_finite() || self.stop <= self.start {
            return Err(CliError::param(format!(
                "grid needs finite start < stop, got [{}, {}]",
                self.start, self.stop
            )));
        }
        let last = (self.count - 1) as f64;
        let pts: Vec<f64> = match self.spacing {
            Spacing::Linear => {
                let h = (self.stop - self.start) / last;
                (0..self.count).map(|i| self.start + i as f64 * h).collect()
            }
            Spacing::Log => {
                if self.start <= 0.0 {
                    return Err(CliError::param("log grid needs start > 0"));
                }
                let (l0, l1) = (self.start.log10(), self.stop.log10());
                (0..self.count)
                    .map(|i| 10f64.powf(l0 + (l1 - l0) * i as f64 / last))
                    .collect()
            }
        };
        // pin the end points exactly
        let mut pts = pts;
        pts[0] = self.start;
        pts[self.count - 1] = self.stop;
        Ok(pts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, std::default::Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::param(format!("unknown output format {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub command: Command,
    #[serde(default)]
    pub parameters: BTreeMap<String, Value>,
    #[serde(default)]
    pub output: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid>,
}

impl JobConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::param(format!("config: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Param(String),
    Core(mlrelax::Error),
}

impl CliError {
    pub fn param(msg: impl Into<String>) -> Self {
        CliError::Param(msg.into())
    }

    /// 2 for bad input, 3 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Param(_) => 2,
            CliError::Core(e) if e.is_parameter_error() => 2,
            CliError::Core(_) => 3,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CliError::Param(_) => "InvalidParam",
            CliError::Core(e) => e.name(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Param(m) => write!(f, "InvalidParam: {m}"),
            CliError::Core(e) => write!(f, "{}: {e}", e.name()),
        }
    }
}

impl From<mlrelax::Error> for CliError {
    fn from(e: mlrelax::Error) -> Self {
        CliError::Core(e)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            // Debug gives the shortest round-trip form and switches to
            // exponent notation for very large or small magnitudes
            Cell::Num(v) => format!("{v:?}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.clone()),
            Cell::Bool(b) => Value::from(*b),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub meta: Value,
    /// False when `verify` saw a failing criterion.
    pub success: bool,
    /// Notes for stderr that must not disturb the data stream (timings).
    pub diagnostics: Vec<String>,
}

impl Table {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut w = csv::WriterBuilder::new()
                    .terminator(csv::Terminator::Any(b'\n'))
                    .from_writer(vec![]);
                w.write_record(&self.columns).expect("in-memory write");
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::csv)).expect("in-memory write");
                }
                String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| {
                        let obj: Map<String, Value> =
                            self.columns.iter().cloned().zip(r.iter().map(Cell::json)).collect();
                        Value::Object(obj)
                    })
                    .collect();
                let doc = json!({ "meta": self.meta, "rows": rows });
                let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
                s.push('\n');
                s
            }
        }
    }
}

/// Parameter lookup against a command's table, recording what was used.
struct Params<'a> {
    specs: &'static [ParamSpec],
    raw: &'a BTreeMap<String, Value>,
    resolved: BTreeMap<String, Value>,
}

impl<'a> Params<'a> {
    fn new(cmd: Command, raw: &'a BTreeMap<String, Value>) -> Result<Self, CliError> {
        let specs = cmd.params();
        if let Some(k) = raw.keys().find(|k| !specs.iter().any(|s| s.key == k.as_str())) {
            return Err(CliError::param(format!("{cmd} does not take parameter {k}")));
        }
        Ok(Params {
            specs,
            raw,
            resolved: BTreeMap::new(),
        })
    }

    fn spec(&self, key: &str) -> &'static ParamSpec {
        self.specs.iter().find(|s| s.key == key).expect("key in command table")
    }

    fn value(&mut self, key: &str) -> Result<Option<Value>, CliError> {
        let spec = self.spec(key);
        let v = match (self.raw.get(key), spec.default) {
            (Some(v), _) => Some(v.clone()),
            (None, Default::Required) => return Err(CliError::param(format!("missing required parameter {key}"))),
            (None, Default::Derived) => None,
            (None, Default::Num(x)) => Some(Value::from(x)),
            (None, Default::Int(x)) => Some(Value::from(x)),
            (None, Default::Text(x)) => Some(Value::from(x)),
        };
        if let Some(v) = &v {
            self.resolved.insert(key.to_string(), v.clone());
        }
        Ok(v)
    }

    fn opt_num(&mut self, key: &str) -> Result<Option<f64>, CliError> {
        match self.value(key)? {
            None => Ok(None),
            Some(v) => v
                .as_f64()
                .filter(|x| !x.is_nan())
                .map(Some)
                .ok_or_else(|| CliError::param(format!("{key} must be a number, got {v}"))),
        }
    }

    fn num(&mut self, key: &str) -> Result<f64, CliError> {
        self.opt_num(key)?
            .ok_or_else(|| CliError::param(format!("missing parameter {key}")))
    }

    fn int(&mut self, key: &str) -> Result<usize, CliError> {
        let v = self
            .value(key)?
            .ok_or_else(|| CliError::param(format!("missing parameter {key}")))?;
        v.as_u64()
            .map(|x| x as usize)
            .ok_or_else(|| CliError::param(format!("{key} must be a non-negative integer, got {v}")))
    }

    fn choice(&mut self, key: &str) -> Result<String, CliError> {
        let spec = self.spec(key);
        let v = self
            .value(key)?
            .ok_or_else(|| CliError::param(format!("missing parameter {key}")))?;
        let s = v
            .as_str()
            .ok_or_else(|| CliError::param(format!("{key} must be a string, got {v}")))?;
        match spec.kind {
            Kind::Choice(options) if options.contains(&s) => Ok(s.to_string()),
            Kind::Choice(options) => Err(CliError::param(format!(
                "{key} must be one of {}, got {s}",
                options.join("|")
            ))),
            _ => Ok(s.to_string()),
        }
    }

    /// Fills in a derived default so that the echoed config shows it.
    fn derive(&mut self, key: &str, v: f64) -> f64 {
        self.resolved.insert(key.to_string(), Value::from(v));
        v
    }

    fn tolerances(&self) -> Value {
        let m: Map<String, Value> = self
            .specs
            .iter()
            .filter(|s| s.tolerance)
            .filter_map(|s| self.resolved.get(s.key).map(|v| (s.key.to_string(), v.clone())))
            .collect();
        Value::Object(m)
    }
}

/// Points to evaluate: the grid, or the single point given by `key`.
fn sweep(
    params: &mut Params,
    grid: Option<&Grid>,
    key: &str,
    fallback: Option<Vec<f64>>,
) -> Result<Vec<f64>, CliError> {
    let single = params.opt_num(key)?;
    match (grid, single) {
        (Some(_), Some(_)) => Err(CliError::param(format!("give either --{key} or a grid, not both"))),
        (Some(g), None) => g.points(),
        (None, Some(v)) => Ok(vec![v]),
        (None, None) => fallback.ok_or_else(|| CliError::param(format!("need --{key} or a grid"))),
    }
}

fn par_rows<F>(points: &[f64], f: F) -> Result<Vec<Vec<Cell>>, CliError>
where
    F: Fn(f64) -> Result<Vec<Cell>, CliError> + Sync,
{
    points.par_iter().map(|&x| f(x)).collect()
}

fn meta(config: &JobConfig, params: &Params, grid: Option<&Grid>, extra: Value) -> Value {
    let mut echoed = config.clone();
    echoed.parameters = params.resolved.clone();
    echoed.grid = grid.copied();
    let mut m = json!({
        "config": echoed,
        "tolerances": params.tolerances(),
    });
    if let (Value::Object(m), Value::Object(extra)) = (&mut m, extra) {
        m.extend(extra);
    }
    m
}

fn table(columns: &[&str], rows: Vec<Vec<Cell>>, meta: Value) -> Table {
    Table {
        columns: columns.iter().map(|c| c.to_string()).collect(),
        rows,
        meta,
        success: true,
        diagnostics: vec![],
    }
}

fn kernel(params: &mut Params) -> Result<(PrabhakarKernel, f64), CliError> {
    let alpha = params.num("alpha")?;
    let mu = match params.opt_num("mu")? {
        Some(m) => m,
        None => params.derive("mu", alpha),
    };
    let nu = params.num("nu")?;
    let a = params.num("a")?;
    Ok((PrabhakarKernel::new(alpha, nu, mu, a)?, mu))
}

/// Executes a job. Numerical failures at any grid point abort the job.
pub fn run(config: &JobConfig) -> Result<Table, CliError> {
    let cmd = config.command;
    let mut params = Params::new(cmd, &config.parameters)?;
    if config.grid.is_some() && !cmd.takes_grid() {
        return Err(CliError::param(format!("{cmd} does not take a grid")));
    }
    let grid = config.grid.as_ref();
    match cmd {
        Command::Ml => {
            let p = MLParams::new(params.num("alpha")?, params.num("mu")?, params.num("nu")?)?;
            let route = params.choice("route")?;
            let tol = params.num("tol")?;
            let xs = sweep(&mut params, grid, "x", None)?;
            let rows = par_rows(&xs, |x| {
                let v = if route == "series" {
                    ml3(&p, x, tol)?
                } else {
                    ml3_eval(&p, x, tol)?
                };
                Ok(vec![Cell::Num(x), Cell::Num(v)])
            })?;
            let m = meta(config, &params, grid, json!({ "method": route }));
            Ok(table(&["x", "value"], rows, m))
        }
        Command::Prabhakar => {
            let p = MLParams::new(params.num("alpha")?, params.num("mu")?, params.num("nu")?)?;
            let a = params.num("a")?;
            let ts = sweep(&mut params, grid, "t", None)?;
            let rows = par_rows(&ts, |t| Ok(vec![Cell::Num(t), Cell::Num(prabhakar(&p, a, t)?)]))?;
            let m = meta(config, &params, grid, json!({ "method": "auto" }));
            Ok(table(&["t", "value"], rows, m))
        }
        Command::Levy => {
            let (alpha, u, lambda) = (params.num("alpha")?, params.num("u")?, params.num("lambda")?);
            let route = params.choice("route")?;
            let ts = sweep(&mut params, grid, "t", None)?;
            let rows = par_rows(&ts, |t| {
                let q = LevyQuery::new(alpha, u, t, lambda)?;
                let (v, used) = match route.as_str() {
                    "auto" => h_function_auto(&q)?,
                    r => {
                        let r: HRoute = r.parse()?;
                        (h_function(&q, r)?, r)
                    }
                };
                Ok(vec![Cell::Num(t), Cell::Num(v), Cell::Text(used.to_string())])
            })?;
            let m = meta(config, &params, grid, json!({ "method": route }));
            Ok(table(&["t", "value", "route"], rows, m))
        }
        Command::Solve => {
            let method: SolveMethod = params.choice("method")?.parse()?;
            let (k, _) = kernel(&mut params)?;
            let b = params.num("B")?;
            let f0 = params.num("f0")?;
            let problem = VolterraProblem::new(k, b)?.with_f0(f0)?;
            let ts = sweep(&mut params, grid, "t", None)?;
            let rows = match method {
                SolveMethod::Eq1 => {
                    let opts = Eq1Options {
                        tol: params.num("eq1_tol")?,
                        max_steps: params.int("eq1_max_steps")?,
                        ..Eq1Options::default()
                    };
                    let (curve, report) = solve_integral_eq1_with(&problem, &ts, &opts)?;
                    let steps = report.steps as u64;
                    curve
                        .values
                        .iter()
                        .zip(&curve.t_grid)
                        .map(|(v, t)| {
                            vec![
                                Cell::Num(*t),
                                Cell::Num(*v),
                                Cell::Text("integral_eq1".into()),
                                Cell::Int(steps),
                            ]
                        })
                        .collect()
                }
                _ => {
                    let max_terms = params.int("max_terms")?;
                    let nodes = params.int("talbot_nodes")?;
                    par_rows(&ts, |t| {
                        let (v, name, work) = match method {
                            SolveMethod::Series => {
                                let (s, m) = solve_series(&problem, t, max_terms)?;
                                (s.value, m.to_string(), s.terms as u64)
                            }
                            SolveMethod::Closed => (solve_closed_cc(&problem, t)?, "closed_cc".into(), 0),
                            SolveMethod::Integral => (solve_integral_rep(&problem, t)?, "integral_rep".into(), 0),
                            SolveMethod::Laplace => (
                                solve_laplace_with(&problem, t, InversionMethod::Talbot, nodes)?,
                                "laplace_numeric".into(),
                                nodes as u64,
                            ),
                            SolveMethod::Eq1 => unreachable!(),
                        };
                        Ok(vec![Cell::Num(t), Cell::Num(v), Cell::Text(name), Cell::Int(work)])
                    })?
                }
            };
            let m = meta(config, &params, grid, json!({ "method": params.resolved["method"] }));
            // work: series terms, Talbot nodes or eq1 steps; 0 for the closed routes
            Ok(table(&["t", "value", "method", "work"], rows, m))
        }
        Command::Spectral | Command::Jonscher => {
            let (k, mu) = kernel(&mut params)?;
            let tau = params.num("tau")?;
            let b = match params.opt_num("B")? {
                Some(b) => b,
                None => params.derive("B", cole_cole_coupling(mu, tau)),
            };
            let ws = sweep(&mut params, grid, "omega", Some(default_omega_grid(tau)?))?;
            let s = spectrum(&k, b, &ws)?;
            if cmd == Command::Spectral {
                let rows = s
                    .omega_grid
                    .iter()
                    .zip(&s.values)
                    .map(|(w, v)| vec![Cell::Num(*w), Cell::Num(v.re), Cell::Num(v.im), Cell::Num(v.norm())])
                    .collect();
                let m = meta(config, &params, grid, json!({ "method": "closed" }));
                Ok(table(&["omega", "re", "im", "abs"], rows, m))
            } else {
                let (m_low, one_minus_n) = jonscher_exponents(&s, tau)?;
                let rows = vec![vec![
                    Cell::Num(m_low),
                    Cell::Num(one_minus_n),
                    Cell::Num(1.0 - one_minus_n),
                ]];
                let m = meta(
                    config,
                    &params,
                    grid,
                    json!({ "method": "log-log slope over the end decades", "points": s.len() }),
                );
                Ok(table(&["m", "one_minus_n", "n"], rows, m))
            }
        }
        Command::Fig1 => {
            let fallback = fig1_default_grid();
            let ts = match grid {
                Some(g) => g.points()?,
                None => fallback,
            };
            let rows = fig1(&ts)?
                .into_iter()
                .map(|r| r.into_iter().map(Cell::Num).collect())
                .collect();
            let mut columns = vec!["t".to_string()];
            columns.extend(FIG1_TAUS.iter().map(|t| format!("f_tau={t:?}")));
            let m = meta(
                config,
                &params,
                grid,
                json!({ "method": "closed_cc", "alpha": 0.75, "a": 3.0, "B": "1/(4 tau)", "f0": 1.0 }),
            );
            Ok(Table {
                columns,
                rows,
                meta: m,
                success: true,
                diagnostics: vec![],
            })
        }
        Command::Verify => {
            let results = run_all();
            let success = results.iter().all(|r| r.passed);
            let rows = results
                .iter()
                .map(|r| {
                    vec![
                        Cell::Int(r.id as u64),
                        Cell::Text(r.name.to_string()),
                        Cell::Bool(r.passed),
                        Cell::Int(r.checks as u64),
                        Cell::Num(r.worst_ratio),
                        Cell::Text(r.detail.clone()),
                    ]
                })
                .collect();
            let diagnostics = results.iter().map(|r| r.to_string()).collect();
            let m = meta(
                config,
                &params,
                grid,
                json!({ "method": "cross-route agreement", "all_passed": success }),
            );
            Ok(Table {
                columns: ["id", "criterion", "passed", "checks", "worst_ratio", "detail"]
                    .iter()
                    .map(|c| c.to_string())
                    .collect(),
                rows,
                meta: m,
                success,
                diagnostics,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn job(cmd: Command, params: &[(&str, Value)]) -> JobConfig {
        JobConfig {
            command: cmd,
            parameters: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            output: Format::Csv,
            grid: None,
        }
    }

    #[test]
    fn exp_at_one() {
        let t = run(&job(Command::Ml, &[("alpha", 1.0.into()), ("x", 1.0.into())])).unwrap();
        assert_eq!(t.render(Format::Csv), "x,value\n1.0,2.718281828459045\n");
    }

    #[test]
    fn linear_grid_pins_end_points() {
        let g = Grid {
            start: 0.0,
            stop: 1.0,
            count: 11,
            spacing: Spacing::Linear,
        };
        let pts = g.points().unwrap();
        assert_eq!(pts.len(), 11);
        assert_eq!(pts[10], 1.0);
        let g = Grid {
            start: 1e-2,
            stop: 1e2,
            count: 5,
            spacing: Spacing::Log,
        };
        assert_eq!(g.points().unwrap()[2], 1.0);
    }

    #[test]
    fn bad_input_is_a_parameter_error() {
        let unknown = run(&job(
            Command::Ml,
            &[("alpha", 1.0.into()), ("x", 1.0.into()), ("beta", 2.0.into())],
        ));
        assert_eq!(unknown.unwrap_err().exit_code(), 2);
        let missing = run(&job(Command::Solve, &[("alpha", 0.5.into()), ("t", 1.0.into())]));
        assert_eq!(missing.unwrap_err().exit_code(), 2);
        let negative = run(&job(Command::Ml, &[("alpha", (-1.0).into()), ("x", 1.0.into())]));
        assert_eq!(negative.unwrap_err().exit_code(), 2);
        let g = Grid {
            start: 0.0,
            stop: 1.0,
            count: 1,
            spacing: Spacing::Linear,
        };
        assert_eq!(g.points().unwrap_err().exit_code(), 2);
    }

    #[test]
    fn numerical_failure_exit_code() {
        // far outside the series' reach and with the large-x routes disabled
        let j = job(
            Command::Ml,
            &[("alpha", 0.5.into()), ("x", (-60.0).into()), ("route", "series".into())],
        );
        let e = run(&j).unwrap_err();
        assert_eq!(e.exit_code(), 3);
        assert_eq!(e.name(), "NonConvergent");
    }

    #[test]
    fn derived_defaults_are_echoed() {
        let j = job(Command::Spectral, &[("alpha", 0.5.into()), ("omega", 1.0.into())]);
        let t = run(&j).unwrap();
        let params = &t.meta["config"]["parameters"];
        assert_eq!(params["mu"], 0.5);
        assert_eq!(params["B"], 1.0);
        assert_eq!(params["tau"], 1.0);
    }

    #[test]
    fn config_round_trips() {
        let text = r#"{"command":"solve","parameters":{"method":"closed","alpha":0.75,"B":1,"t":1},"output":"json"}"#;
        let c = JobConfig::from_json(text).unwrap();
        assert_eq!(c.command, Command::Solve);
        assert_eq!(c.output, Format::Json);
        assert!(JobConfig::from_json(r#"{"command":"nope"}"#).is_err());
    }
}
