//! Experiment configuration: a line-oriented `key = value` file with
//! `[section]` headers.
//!
//! The lexical layer (strings, numbers, arrays, comments) is TOML; this
//! module owns the schema. Every problem found is reported, each with the
//! line it was found on, so one pass over a file surfaces all of its
//! mistakes. [`ExperimentConfig::emit`] writes every key explicitly and
//! parses back to an equal configuration.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

use serde::Serialize;
use toml_edit::{Document, Item, Table, Value};

use crate::coefficients::{FamilyChoice, PhysicalParams, Transcription};
use crate::consistency::ScanSpec;
use crate::error::{ConfigIssue, Error, Result};
use crate::grid::{Backend, Field, Grid, GridSpec};
use crate::harness::PairSpec;
use crate::initial::Pulse;
use crate::reconstruct::ThetaConvention;
use crate::rgn::RgnSpec;
use crate::scalar::Real;
use crate::time::TimeGrid;

/// Scalar model family selected by `[model] family`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyName {
    #[default]
    Rch,
    Gbbm,
    Surface,
    SurfaceRch,
}

/// `[model]` block.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModelConfig {
    pub family: FamilyName,
    pub transcription: Transcription,
    pub theta_convention: ThetaConvention,
}

/// Source of the scalar initial profile.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialProfile {
    Pulse(Pulse),
    /// CSV file with an `x,value` header and one row per grid point.
    File { path: PathBuf },
}

/// How a Green-Naghdi state is built from the scalar profile.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RgnStart {
    /// Reconstructed from the scalar model family.
    #[default]
    Matched,
    /// `eta` is the profile and `u = 0`.
    SurfaceOnly,
    /// `eta = u =` the profile.
    Equal,
}

/// `[initial]` block.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InitialConfig {
    pub profile: InitialProfile,
    pub rgn_start: RgnStart,
}

/// `[solver]` block: knobs of the Green-Naghdi integrator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolverConfig {
    pub b0: f64,
    pub elliptic_tol: f64,
    pub elliptic_maxit: usize,
    pub cfl: f64,
    pub sobolev_s: f64,
    pub norm_ceiling: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            b0: 0.05,
            elliptic_tol: 1e-11,
            elliptic_maxit: 500,
            cfl: 0.5,
            sobolev_s: 2.0,
            norm_ceiling: 1e6,
        }
    }
}

/// `[experiment]` block: sweep lists and fit targets.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentBlock {
    /// Shallowness values, strictly descending.
    pub mu_list: Vec<f64>,
    /// Coriolis frequencies of a convergence study.
    pub omega_list: Vec<f64>,
    /// `eps = m sqrt(mu)` along a sweep.
    pub m: f64,
    /// Sobolev index of residual norms.
    pub s: f64,
    /// Probe times of a scan as multiples of `1/eps`.
    pub probe_factors: Vec<f64>,
    /// Horizon `T`: convergence runs stop at `T / eps`.
    pub horizon: f64,
    /// Derivative count `D` of the regularity assumption, echoed in reports.
    pub derivative_count: u32,
    /// Target slope of the rate fits.
    pub target_slope: f64,
    /// Accepted deviation from the target slope.
    pub slope_tolerance: f64,
}

impl Default for ExperimentBlock {
    fn default() -> Self {
        Self {
            mu_list: vec![1e-2, 3e-3, 1e-3, 3e-4, 1e-4],
            omega_list: vec![0.5],
            m: 1.0,
            s: 1.0,
            probe_factors: vec![0.1, 0.5, 1.0],
            horizon: 1.0,
            derivative_count: 4,
            target_slope: 2.0,
            slope_tolerance: 0.4,
        }
    }
}

/// A complete, validated experiment description.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub physical: PhysicalParams,
    pub grid: GridSpec,
    pub initial: InitialConfig,
    pub time: TimeGrid,
    pub solver: SolverConfig,
    pub experiment: ExperimentBlock,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            model: ModelConfig {
                family: FamilyName::Rch,
                transcription: Transcription::Consistent,
                theta_convention: ThetaConvention::default(),
            },
            physical: PhysicalParams::default(),
            grid: GridSpec::default(),
            initial: InitialConfig {
                profile: InitialProfile::Pulse(Pulse::default()),
                rgn_start: RgnStart::Matched,
            },
            time: TimeGrid {
                t_end: 10.0,
                dt: 0.01,
                dt_out: 0.5,
            },
            solver: SolverConfig::default(),
            experiment: ExperimentBlock::default(),
            output_dir: PathBuf::from("out"),
        }
    }
}

/// String-valued settings with a fixed vocabulary.
trait Choice: Sized + Copy {
    const NAMES: &'static [&'static str];
    fn from_index(i: usize) -> Self;
    fn index(self) -> usize;
    fn name(self) -> &'static str {
        Self::NAMES[self.index()]
    }
}

macro_rules! choice {
    ($ty:ty, [$($variant:path => $name:literal),+ $(,)?]) => {
        impl Choice for $ty {
            const NAMES: &'static [&'static str] = &[$($name),+];
            fn from_index(i: usize) -> Self {
                [$($variant),+][i]
            }
            fn index(self) -> usize {
                [$($variant),+].iter().position(|v| *v == self).expect("listed variant")
            }
        }
    };
}

choice!(FamilyName, [
    FamilyName::Rch => "rch",
    FamilyName::Gbbm => "gbbm",
    FamilyName::Surface => "surface",
    FamilyName::SurfaceRch => "surface-rch",
]);
choice!(Transcription, [
    Transcription::Consistent => "consistent",
    Transcription::Uncorrected => "uncorrected",
]);
choice!(ThetaConvention, [
    ThetaConvention::EpsilonMuScaled => "epsilon-mu-scaled",
    ThetaConvention::Unscaled => "unscaled",
]);
choice!(Backend, [Backend::Fourier => "fourier", Backend::Fd4 => "fd4"]);
choice!(RgnStart, [
    RgnStart::Matched => "matched",
    RgnStart::SurfaceOnly => "surface-only",
    RgnStart::Equal => "equal",
]);

/// Section names in file order.
const SECTIONS: &[&str] = &[
    "model",
    "physical",
    "grid",
    "initial",
    "time",
    "solver",
    "experiment",
    "output",
];

/// Predicate on a number with the message used when it fails.
type Check = (fn(f64) -> bool, &'static str);

const FINITE: Check = (|v| v.is_finite(), "must be finite");
const NON_NEGATIVE: Check = (|v| v >= 0.0 && v.is_finite(), "must be >= 0");
const POSITIVE: Check = (|v| v > 0.0 && v.is_finite(), "must be > 0");
const UNIT_OPEN: Check = (|v| v > 0.0 && v < 1.0, "must lie in (0, 1)");

/// Byte offset to 1-based line number.
fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].bytes().filter(|b| *b == b'\n').count() + 1
}

/// Reader of one section that remembers which keys were consumed.
struct Section<'a> {
    name: &'static str,
    table: Option<&'a Table>,
    src: &'a str,
    used: Vec<&'static str>,
    issues: &'a mut Vec<ConfigIssue>,
}

impl<'a> Section<'a> {
    fn line(&self, key: &str) -> Option<usize> {
        let table = self.table?;
        let span = table
            .key(key)
            .and_then(|k| k.span())
            .or_else(|| table.get(key).and_then(|i| i.span()))?;
        Some(line_of(self.src, span.start))
    }

    fn issue(&mut self, key: &str, message: String) {
        let line = self.line(key);
        self.issues.push(ConfigIssue {
            line,
            key: Some(format!("{}.{key}", self.name)),
            message,
        });
    }

    fn value(&mut self, key: &'static str) -> Option<&'a Value> {
        self.used.push(key);
        match self.table?.get(key)? {
            Item::Value(v) => Some(v),
            _ => {
                self.issue(key, "expected a value, found a table".into());
                None
            }
        }
    }

    fn number(&mut self, key: &'static str, check: Check) -> Option<f64> {
        let v = self.value(key)?;
        let x = match v {
            Value::Float(f) => *f.value(),
            Value::Integer(i) => *i.value() as f64,
            other => {
                self.issue(key, format!("type mismatch: expected a number, found {}", other.type_name()));
                return None;
            }
        };
        if !(check.0)(x) {
            self.issue(key, format!("range violation: {x} {}", check.1));
            return None;
        }
        Some(x)
    }

    fn f64(&mut self, key: &'static str, default: f64, check: Check) -> f64 {
        self.number(key, check).unwrap_or(default)
    }

    fn opt_f64(&mut self, key: &'static str, check: Check) -> Option<f64> {
        self.number(key, check)
    }

    fn count(&mut self, key: &'static str, default: usize, min: usize) -> usize {
        let Some(v) = self.value(key) else {
            return default;
        };
        match v {
            Value::Integer(i) if *i.value() >= min as i64 => *i.value() as usize,
            Value::Integer(i) => {
                let x = *i.value();
                self.issue(key, format!("range violation: {x} must be >= {min}"));
                default
            }
            other => {
                self.issue(key, format!("type mismatch: expected an integer, found {}", other.type_name()));
                default
            }
        }
    }

    fn bool(&mut self, key: &'static str, default: bool) -> bool {
        match self.value(key) {
            None => default,
            Some(Value::Boolean(b)) => *b.value(),
            Some(other) => {
                let t = other.type_name();
                self.issue(key, format!("type mismatch: expected a boolean, found {t}"));
                default
            }
        }
    }

    fn string(&mut self, key: &'static str) -> Option<String> {
        match self.value(key)? {
            Value::String(s) => Some(s.value().clone()),
            other => {
                let t = other.type_name();
                self.issue(key, format!("type mismatch: expected a string, found {t}"));
                None
            }
        }
    }

    fn choice<C: Choice>(&mut self, key: &'static str, default: C) -> C {
        let Some(s) = self.string(key) else {
            return default;
        };
        match C::NAMES.iter().position(|n| *n == s) {
            Some(i) => C::from_index(i),
            None => {
                self.issue(key, format!("unknown value \"{s}\"; expected one of {}", C::NAMES.join(", ")));
                default
            }
        }
    }

    fn list(&mut self, key: &'static str, default: Vec<f64>, check: Check) -> Vec<f64> {
        let Some(v) = self.value(key) else {
            return default;
        };
        let Value::Array(a) = v else {
            let t = v.type_name();
            self.issue(key, format!("type mismatch: expected an array of numbers, found {t}"));
            return default;
        };
        let mut out = Vec::with_capacity(a.len());
        for x in a.iter() {
            let n = match x {
                Value::Float(f) => *f.value(),
                Value::Integer(i) => *i.value() as f64,
                other => {
                    let t = other.type_name();
                    self.issue(key, format!("type mismatch: array entries must be numbers, found {t}"));
                    return default;
                }
            };
            if !(check.0)(n) {
                self.issue(key, format!("range violation: entry {n} {}", check.1));
                return default;
            }
            out.push(n);
        }
        if out.is_empty() {
            self.issue(key, "range violation: the list is empty".into());
            return default;
        }
        out
    }

    /// Reports every key of the section that no reader asked for.
    fn finish(self) {
        let Some(table) = self.table else {
            return;
        };
        for (key, _) in table.iter() {
            if !self.used.contains(&key) {
                let span = table.key(key).and_then(|k| k.span());
                self.issues.push(ConfigIssue {
                    line: span.map(|s| line_of(self.src, s.start)),
                    key: Some(format!("{}.{key}", self.name)),
                    message: "unknown key".into(),
                });
            }
        }
    }
}

/// Parses and validates a configuration, filling defaults for absent keys.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let doc = Document::parse(text).map_err(|e| {
        Error::Config(vec![ConfigIssue {
            line: e.span().map(|s| line_of(text, s.start)),
            key: None,
            message: format!("syntax error: {}", e.message()),
        }])
    })?;
    let root = doc.as_table();
    let mut issues = Vec::new();
    for (name, item) in root.iter() {
        let line = root.key(name).and_then(|k| k.span()).map(|s| line_of(text, s.start));
        if !SECTIONS.contains(&name) {
            issues.push(ConfigIssue {
                line,
                key: Some(name.to_string()),
                message: format!("unknown section; expected one of {}", SECTIONS.join(", ")),
            });
        } else if !item.is_table() {
            issues.push(ConfigIssue {
                line,
                key: Some(name.to_string()),
                message: "expected a [section] header".into(),
            });
        }
    }
    let d = ExperimentConfig::default();
    let section = |name: &str| root.get(name).and_then(Item::as_table);

    let table = section("model");
    let mut s = Section { name: "model", table, src: text, used: vec![], issues: &mut issues };
    let model = ModelConfig {
        family: s.choice("family", d.model.family),
        transcription: s.choice("transcription", d.model.transcription),
        theta_convention: s.choice("theta_convention", d.model.theta_convention),
    };
    s.finish();

    let table = section("physical");
    let mut s = Section { name: "physical", table, src: text, used: vec![], issues: &mut issues };
    let dp = d.physical;
    let physical = PhysicalParams {
        epsilon: s.f64("epsilon", dp.epsilon, NON_NEGATIVE),
        mu: s.f64("mu", dp.mu, NON_NEGATIVE),
        omega: s.f64("omega", dp.omega, NON_NEGATIVE),
        p: s.f64("p", dp.p, FINITE),
        lambda: s.f64("lambda", dp.lambda, (|v| (-1.0 / 6.0..=1.0 / 3.0).contains(&v), "must lie in [-1/6, 1/3]")),
        regime_m: s.f64("regime_m", dp.regime_m, POSITIVE),
        regime_mu0: s.f64("regime_mu0", dp.regime_mu0, POSITIVE),
        enforce_regime: s.bool("enforce_regime", dp.enforce_regime),
    };
    s.finish();

    let table = section("grid");
    let mut s = Section { name: "grid", table, src: text, used: vec![], issues: &mut issues };
    let n = s.count("n", d.grid.n, 32);
    if !n.is_power_of_two() {
        s.issue("n", format!("range violation: {n} must be a power of two"));
    }
    let grid = GridSpec {
        n,
        length: s.f64("length", d.grid.length, POSITIVE),
        backend: s.choice("backend", d.grid.backend),
        dealias: s.bool("dealias", d.grid.dealias),
    };
    s.finish();

    let table = section("initial");
    let mut s = Section { name: "initial", table, src: text, used: vec![], issues: &mut issues };
    let dpulse = Pulse::default();
    let pulse = Pulse {
        amplitude: s.f64("amplitude", dpulse.amplitude, FINITE),
        width: s.f64("width", dpulse.width, POSITIVE),
        center: s.opt_f64("center", FINITE),
    };
    let file = s.string("file");
    let profile = match file {
        Some(path) => {
            for key in ["amplitude", "width", "center"] {
                if s.table.is_some_and(|t| t.contains_key(key)) {
                    s.issue(key, "pulse settings conflict with `file`".into());
                }
            }
            InitialProfile::File { path: PathBuf::from(path) }
        }
        None => InitialProfile::Pulse(pulse),
    };
    let initial = InitialConfig {
        profile,
        rgn_start: s.choice("rgn_start", d.initial.rgn_start),
    };
    s.finish();

    let table = section("time");
    let mut s = Section { name: "time", table, src: text, used: vec![], issues: &mut issues };
    let time = TimeGrid {
        t_end: s.f64("t_end", d.time.t_end, NON_NEGATIVE),
        dt: s.f64("dt", d.time.dt, POSITIVE),
        dt_out: s.f64("dt_out", d.time.dt_out, POSITIVE),
    };
    s.finish();

    let table = section("solver");
    let mut s = Section { name: "solver", table, src: text, used: vec![], issues: &mut issues };
    let ds = d.solver;
    let solver = SolverConfig {
        b0: s.f64("b0", ds.b0, UNIT_OPEN),
        elliptic_tol: s.f64("elliptic_tol", ds.elliptic_tol, UNIT_OPEN),
        elliptic_maxit: s.count("elliptic_maxit", ds.elliptic_maxit, 1),
        cfl: s.f64("cfl", ds.cfl, POSITIVE),
        sobolev_s: s.f64("sobolev_s", ds.sobolev_s, NON_NEGATIVE),
        norm_ceiling: s.f64("norm_ceiling", ds.norm_ceiling, POSITIVE),
    };
    s.finish();

    let table = section("experiment");
    let mut s = Section { name: "experiment", table, src: text, used: vec![], issues: &mut issues };
    let de = d.experiment;
    let mu_list = s.list("mu_list", de.mu_list.clone(), POSITIVE);
    if mu_list.windows(2).any(|w| w[1] >= w[0]) {
        s.issue("mu_list", "range violation: values must be strictly descending".into());
    }
    let derivative_count = s.count("derivative_count", de.derivative_count as usize, 0);
    let experiment = ExperimentBlock {
        mu_list,
        omega_list: s.list("omega_list", de.omega_list, NON_NEGATIVE),
        m: s.f64("m", de.m, POSITIVE),
        s: s.f64("s", de.s, NON_NEGATIVE),
        probe_factors: s.list("probe_factors", de.probe_factors, POSITIVE),
        horizon: s.f64("horizon", de.horizon, POSITIVE),
        derivative_count: u32::try_from(derivative_count).unwrap_or(u32::MAX),
        target_slope: s.f64("target_slope", de.target_slope, FINITE),
        slope_tolerance: s.f64("slope_tolerance", de.slope_tolerance, POSITIVE),
    };
    s.finish();

    let table = section("output");
    let mut s = Section { name: "output", table, src: text, used: vec![], issues: &mut issues };
    let output_dir = s.string("dir").map(PathBuf::from).unwrap_or(d.output_dir);
    s.finish();

    if issues.is_empty() {
        if let Err(e) = physical.validate() {
            issues.push(ConfigIssue {
                line: None,
                key: Some("physical".into()),
                message: e.to_string(),
            });
        }
    }
    if !issues.is_empty() {
        issues.sort_by_key(|i| i.line.unwrap_or(usize::MAX));
        return Err(Error::Config(issues));
    }
    Ok(ExperimentConfig {
        model,
        physical,
        grid,
        initial,
        time,
        solver,
        experiment,
        output_dir,
    })
}

/// Shortest text that parses back to exactly `x`.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn list(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|x| num(*x)).collect();
    format!("[{}]", items.join(", "))
}

/// Basic-string literal; JSON escapes are a subset of the accepted ones.
fn quoted(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

impl ExperimentConfig {
    /// Writes every setting explicitly; [`parse_config`] reads it back to an
    /// equal value.
    pub fn emit(&self) -> String {
        let mut o = String::new();
        let m = &self.model;
        let _ = writeln!(o, "[model]");
        let _ = writeln!(o, "family = {}", quoted(m.family.name()));
        let _ = writeln!(o, "transcription = {}", quoted(m.transcription.name()));
        let _ = writeln!(o, "theta_convention = {}", quoted(m.theta_convention.name()));
        let p = &self.physical;
        let _ = writeln!(o, "\n[physical]");
        let _ = writeln!(o, "epsilon = {}", num(p.epsilon));
        let _ = writeln!(o, "mu = {}", num(p.mu));
        let _ = writeln!(o, "omega = {}", num(p.omega));
        let _ = writeln!(o, "p = {}", num(p.p));
        let _ = writeln!(o, "lambda = {}", num(p.lambda));
        let _ = writeln!(o, "regime_m = {}", num(p.regime_m));
        let _ = writeln!(o, "regime_mu0 = {}", num(p.regime_mu0));
        let _ = writeln!(o, "enforce_regime = {}", p.enforce_regime);
        let g = &self.grid;
        let _ = writeln!(o, "\n[grid]");
        let _ = writeln!(o, "n = {}", g.n);
        let _ = writeln!(o, "length = {}", num(g.length));
        let _ = writeln!(o, "backend = {}", quoted(g.backend.name()));
        let _ = writeln!(o, "dealias = {}", g.dealias);
        let _ = writeln!(o, "\n[initial]");
        match &self.initial.profile {
            InitialProfile::Pulse(pulse) => {
                let _ = writeln!(o, "amplitude = {}", num(pulse.amplitude));
                let _ = writeln!(o, "width = {}", num(pulse.width));
                if let Some(c) = pulse.center {
                    let _ = writeln!(o, "center = {}", num(c));
                }
            }
            InitialProfile::File { path } => {
                let _ = writeln!(o, "file = {}", quoted(&path.to_string_lossy()));
            }
        }
        let _ = writeln!(o, "rgn_start = {}", quoted(self.initial.rgn_start.name()));
        let t = &self.time;
        let _ = writeln!(o, "\n[time]");
        let _ = writeln!(o, "t_end = {}", num(t.t_end));
        let _ = writeln!(o, "dt = {}", num(t.dt));
        let _ = writeln!(o, "dt_out = {}", num(t.dt_out));
        let s = &self.solver;
        let _ = writeln!(o, "\n[solver]");
        let _ = writeln!(o, "b0 = {}", num(s.b0));
        let _ = writeln!(o, "elliptic_tol = {}", num(s.elliptic_tol));
        let _ = writeln!(o, "elliptic_maxit = {}", s.elliptic_maxit);
        let _ = writeln!(o, "cfl = {}", num(s.cfl));
        let _ = writeln!(o, "sobolev_s = {}", num(s.sobolev_s));
        let _ = writeln!(o, "norm_ceiling = {}", num(s.norm_ceiling));
        let e = &self.experiment;
        let _ = writeln!(o, "\n[experiment]");
        let _ = writeln!(o, "mu_list = {}", list(&e.mu_list));
        let _ = writeln!(o, "omega_list = {}", list(&e.omega_list));
        let _ = writeln!(o, "m = {}", num(e.m));
        let _ = writeln!(o, "s = {}", num(e.s));
        let _ = writeln!(o, "probe_factors = {}", list(&e.probe_factors));
        let _ = writeln!(o, "horizon = {}", num(e.horizon));
        let _ = writeln!(o, "derivative_count = {}", e.derivative_count);
        let _ = writeln!(o, "target_slope = {}", num(e.target_slope));
        let _ = writeln!(o, "slope_tolerance = {}", num(e.slope_tolerance));
        let _ = writeln!(o, "\n[output]");
        let _ = writeln!(o, "dir = {}", quoted(&self.output_dir.to_string_lossy()));
        o
    }

    /// The selected family with its free parameters.
    pub fn family(&self) -> FamilyChoice {
        let (p, lambda, transcription) = (self.physical.p, self.physical.lambda, self.model.transcription);
        match self.model.family {
            FamilyName::Rch => FamilyChoice::Rch,
            FamilyName::Gbbm => FamilyChoice::Gbbm { p, lambda },
            FamilyName::Surface => FamilyChoice::Surface { p, transcription },
            FamilyName::SurfaceRch => FamilyChoice::SurfaceRch { transcription },
        }
    }

    /// The periodic grid.
    pub fn build_grid<T: Real>(&self) -> Result<Arc<Grid<T>>> {
        Grid::new(self.grid)
    }

    /// Samples or loads the scalar initial profile on `grid`.
    pub fn initial_profile<T: Real>(&self, grid: &Arc<Grid<T>>) -> Result<Field<T>> {
        match &self.initial.profile {
            InitialProfile::Pulse(p) => {
                p.validate()?;
                Ok(p.sample(grid))
            }
            InitialProfile::File { path } => crate::output::read_profile(path, grid),
        }
    }

    /// Green-Naghdi settings with the solver knobs applied.
    pub fn rgn_spec<T: Real>(&self, params: PhysicalParams, grid: &Arc<Grid<T>>) -> Result<RgnSpec<T>> {
        let mut spec = RgnSpec::new(params, Arc::clone(grid))?;
        let s = &self.solver;
        spec.b0 = s.b0;
        spec.elliptic_tol = s.elliptic_tol;
        spec.elliptic_maxit = s.elliptic_maxit;
        spec.cfl = s.cfl;
        spec.sobolev_s = s.sobolev_s;
        spec.norm_ceiling = s.norm_ceiling;
        Ok(spec)
    }

    /// Residual scan over the shallowness list at the first Coriolis value.
    pub fn scan_spec(&self) -> ScanSpec {
        let e = &self.experiment;
        ScanSpec {
            family: self.family(),
            omega: self.physical.omega,
            mu_list: e.mu_list.clone(),
            m: e.m,
            s: e.s,
            probe_factors: e.probe_factors.clone(),
            dt: self.time.dt,
            theta_convention: self.model.theta_convention,
        }
    }

    /// Pair settings of the configured family with the solver knobs applied.
    pub fn pair_spec(&self, params: PhysicalParams, time: TimeGrid) -> PairSpec {
        PairSpec {
            theta_convention: self.model.theta_convention,
            b0: self.solver.b0,
            elliptic_tol: self.solver.elliptic_tol,
            elliptic_maxit: self.solver.elliptic_maxit,
            cfl: self.solver.cfl,
            ..PairSpec::new(self.family(), params, time)
        }
    }

    /// One matched pair per `(mu, omega)` with `eps = m sqrt(mu)`, each
    /// integrated to `horizon / eps`.
    pub fn pair_specs(&self) -> Vec<PairSpec> {
        let e = &self.experiment;
        let mut specs = Vec::new();
        for &omega in &e.omega_list {
            for &mu in &e.mu_list {
                let epsilon = e.m * mu.sqrt();
                let params = PhysicalParams {
                    epsilon,
                    mu,
                    omega,
                    ..self.physical
                };
                let time = TimeGrid {
                    t_end: e.horizon / epsilon,
                    ..self.time
                };
                specs.push(self.pair_spec(params, time));
            }
        }
        specs
    }
}
