//! `key = value` run configuration with per-scenario defaults.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::external::ExternalPotential;
use crate::grid::GridSpec;
use crate::par::Execution;
use crate::rigid_body::{ChargeProfile, DEFAULT_CUTOFF_SIGMAS};
use crate::{Error, Mat3, Result, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    FreeTop,
    EulerTop,
    StaticCharge,
    MovingSpinningCharge,
    #[serde(rename = "uniform_B_trap")]
    UniformBTrap,
    TransportCheck,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::FreeTop,
        Scenario::EulerTop,
        Scenario::StaticCharge,
        Scenario::MovingSpinningCharge,
        Scenario::UniformBTrap,
        Scenario::TransportCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::FreeTop => "free_top",
            Scenario::EulerTop => "euler_top",
            Scenario::StaticCharge => "static_charge",
            Scenario::MovingSpinningCharge => "moving_spinning_charge",
            Scenario::UniformBTrap => "uniform_B_trap",
            Scenario::TransportCheck => "transport_check",
        }
    }

    /// Scenarios that evolve the field/particle system on a grid.
    pub fn is_coupled(self) -> bool {
        matches!(
            self,
            Scenario::StaticCharge | Scenario::MovingSpinningCharge | Scenario::UniformBTrap
        )
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Scenario::ALL.iter().map(|s| s.name()).collect();
                format!("unknown scenario `{s}` (expected one of {})", names.join(", "))
            })
    }
}

/// External potentials expressible in a config file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExternalSpec {
    Zero,
    UniformE(Vec3),
    UniformB(Vec3),
}

impl ExternalSpec {
    pub fn potential(&self) -> ExternalPotential {
        match *self {
            ExternalSpec::Zero => ExternalPotential::Zero,
            ExternalSpec::UniformE(e) => ExternalPotential::UniformE(e),
            ExternalSpec::UniformB(b) => ExternalPotential::UniformB(b),
        }
    }
}

impl fmt::Display for ExternalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExternalSpec::Zero => f.write_str("zero"),
            ExternalSpec::UniformE(v) => write!(f, "uniform_E {} {} {}", v.x, v.y, v.z),
            ExternalSpec::UniformB(v) => write!(f, "uniform_B {} {} {}", v.x, v.y, v.z),
        }
    }
}

impl FromStr for ExternalSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let mut it = s.split_whitespace();
        let kind = it.next().unwrap_or("");
        let rest: Vec<&str> = it.collect();
        match kind {
            "zero" | "none" if rest.is_empty() => Ok(ExternalSpec::Zero),
            "uniform_E" => Ok(ExternalSpec::UniformE(parse_vec3(&rest.join(" "))?)),
            "uniform_B" => Ok(ExternalSpec::UniformB(parse_vec3(&rest.join(" "))?)),
            _ => Err(format!("expected `zero`, `uniform_E x y z` or `uniform_B x y z`, got `{s}`")),
        }
    }
}

/// What to do when the run outlasts the time before radiation wraps around
/// the periodic box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WrapGuard {
    Error,
    Warn,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub grid_n: usize,
    pub box_length: f64,
    pub sigma: f64,
    /// Support radius of the charge in units of `σ`.
    pub cutoff_sigmas: f64,
    /// Explicit time step; `None` means `cfl·dx` for grid scenarios.
    pub dt: Option<f64>,
    pub cfl: f64,
    /// Run length; `None` means the wrap window for grid scenarios.
    pub t_end: Option<f64>,
    pub external: ExternalSpec,
    pub q0: Vec3,
    pub qdot0: Vec3,
    pub omega0: Vec3,
    /// Inertia tensor for `euler_top`; `None` uses the profile's scalar inertia.
    pub inertia: Option<Mat3>,
    /// Write a CSV row every this many steps (the final step is always written).
    pub sample_every: usize,
    /// Dump raw fields every this many steps.
    pub dump_every: Option<usize>,
    pub seed: u64,
    pub wrap_guard: WrapGuard,
    /// Relative drift allowed for invariants the symmetries declare conserved.
    pub drift_tol: f64,
    pub dealias: bool,
    pub execution: Execution,
    /// Number of random families for `transport_check`.
    pub families: usize,
    /// Finite-difference step for `transport_check`.
    pub fd_step: f64,
    /// Non-fatal guard findings.
    pub warnings: Vec<String>,
}

impl RunConfig {
    /// Defaults of a scenario before any overrides.
    pub fn preset(scenario: Scenario) -> Self {
        let mut c = RunConfig {
            scenario,
            grid_n: 48,
            box_length: 16.0,
            sigma: 1.0,
            cutoff_sigmas: DEFAULT_CUTOFF_SIGMAS,
            dt: None,
            cfl: 0.5,
            t_end: None,
            external: ExternalSpec::Zero,
            q0: Vec3::zeros(),
            qdot0: Vec3::zeros(),
            omega0: Vec3::zeros(),
            inertia: None,
            sample_every: 1,
            dump_every: None,
            seed: 0,
            wrap_guard: WrapGuard::Error,
            drift_tol: 1e-2,
            dealias: false,
            execution: Execution::default(),
            families: 20,
            fd_step: 1e-4,
            warnings: Vec::new(),
        };
        match scenario {
            Scenario::FreeTop => {
                c.dt = Some(1e-3);
                c.t_end = Some(10.0);
                c.omega0 = Vec3::new(0.3, -0.5, 1.0);
                c.drift_tol = 1e-12;
                c.sample_every = 100;
            }
            Scenario::EulerTop => {
                c.dt = Some(1e-3);
                c.t_end = Some(100.0);
                // fast enough that RK4 truncation, not round-off, dominates the drift
                c.omega0 = Vec3::new(20.0, 2.0, 12.0);
                c.inertia = Some(Mat3::from_diagonal(&Vec3::new(1.0, 2.0, 3.0)));
                c.drift_tol = 1e-8;
                c.sample_every = 100;
            }
            Scenario::StaticCharge => {}
            Scenario::MovingSpinningCharge => {
                c.q0 = Vec3::new(0.0, 0.0, 1.0);
                c.qdot0 = Vec3::new(0.1, 0.0, 0.0);
                c.omega0 = Vec3::new(0.0, 0.0, 1.0);
            }
            Scenario::UniformBTrap => {
                c.q0 = Vec3::new(0.0, 0.0, 1.0);
                c.qdot0 = Vec3::new(0.1, 0.0, 0.0);
                c.omega0 = Vec3::new(0.0, 0.0, 1.0);
                c.external = ExternalSpec::UniformB(Vec3::new(0.0, 0.0, 0.5));
            }
            Scenario::TransportCheck => c.drift_tol = 1e-6,
        }
        c
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.grid_n, self.box_length)
    }

    pub fn profile(&self) -> Result<ChargeProfile> {
        ChargeProfile::with_cutoff(self.sigma, self.cutoff_sigmas * self.sigma)
    }

    /// Time before waves leaving the charge support re-enter it through the
    /// periodic boundary: `(L − 2·cutoff)/2` at unit light speed.
    pub fn wrap_window(&self) -> f64 {
        0.5 * (self.box_length - 2.0 * self.cutoff_sigmas * self.sigma)
    }

    /// Step size after defaults: `cfl·dx` for grid scenarios.
    pub fn step(&self) -> f64 {
        self.dt.unwrap_or(self.cfl * self.box_length / self.grid_n as f64)
    }

    pub fn end_time(&self) -> f64 {
        self.t_end.unwrap_or_else(|| self.wrap_window())
    }

    /// Number of steps; the last step lands on `end_time` up to rounding.
    pub fn steps(&self) -> usize {
        (self.end_time() / self.step()).round().max(0.0) as usize
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig::preset(Scenario::FreeTop)
    }
}

fn parse_vec3(s: &str) -> std::result::Result<Vec3, String> {
    let v: Vec<f64> = s
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| format!("`{t}` is not a number")))
        .collect::<std::result::Result<_, _>>()?;
    match v[..] {
        [x, y, z] if v.iter().all(|x| x.is_finite()) => Ok(Vec3::new(x, y, z)),
        _ => Err(format!("expected three finite numbers, got `{s}`")),
    }
}

fn parse_inertia(s: &str) -> std::result::Result<Mat3, String> {
    let v: Vec<f64> = s
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| format!("`{t}` is not a number")))
        .collect::<std::result::Result<_, _>>()?;
    match v.len() {
        3 => Ok(Mat3::from_diagonal(&Vec3::new(v[0], v[1], v[2]))),
        9 => Ok(Mat3::from_row_slice(&v)),
        _ => Err(format!("expected 3 diagonal or 9 row-major entries, got {}", v.len())),
    }
}

fn parse_positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got `{s}`")),
    }
}

fn parse_count(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(format!("expected a positive integer, got `{s}`")),
    }
}

fn parse_bool(s: &str) -> std::result::Result<bool, String> {
    match s {
        "true" | "yes" | "on" => Ok(true),
        "false" | "no" | "off" => Ok(false),
        _ => Err(format!("expected true or false, got `{s}`")),
    }
}

const KEYS: [&str; 22] = [
    "scenario",
    "grid_n",
    "box_length",
    "sigma",
    "cutoff_sigmas",
    "dt",
    "cfl",
    "t_end",
    "external",
    "q0",
    "qdot0",
    "omega0",
    "inertia",
    "sample_every",
    "dump_every",
    "seed",
    "wrap_guard",
    "drift_tol",
    "dealias",
    "execution",
    "families",
    "fd_step",
];

/// Parses and validates a configuration. Every error carries the line it
/// refers to (0 when no single line is responsible).
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut entries: HashMap<&str, (usize, &str)> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| Error::config(line, format!("expected `key = value`, got `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(Error::config(line, format!("unknown key `{key}`")));
        }
        if let Some((first, _)) = entries.insert(key, (line, value)) {
            return Err(Error::config(line, format!("duplicate key `{key}` (first on line {first})")));
        }
    }

    let scenario = match entries.get("scenario") {
        Some(&(line, v)) => v.parse().map_err(|m| Error::config(line, m))?,
        None => return Err(Error::config(0, "missing `scenario`")),
    };
    let mut c = RunConfig::preset(scenario);
    let line_of = |key: &str| entries.get(key).map_or(0, |e| e.0);

    fn set<T>(
        entries: &HashMap<&str, (usize, &str)>,
        key: &str,
        parse: impl Fn(&str) -> std::result::Result<T, String>,
        slot: &mut T,
    ) -> Result<()> {
        if let Some(&(line, v)) = entries.get(key) {
            *slot = parse(v).map_err(|m| Error::config(line, format!("{key}: {m}")))?;
        }
        Ok(())
    }
    let e = &entries;
    set(e, "grid_n", |s| s.parse::<usize>().map_err(|_| format!("`{s}` is not an integer")), &mut c.grid_n)?;
    set(e, "box_length", parse_positive, &mut c.box_length)?;
    set(e, "sigma", parse_positive, &mut c.sigma)?;
    set(e, "cutoff_sigmas", parse_positive, &mut c.cutoff_sigmas)?;
    set(e, "dt", |s| parse_positive(s).map(Some), &mut c.dt)?;
    set(e, "cfl", parse_positive, &mut c.cfl)?;
    set(e, "t_end", |s| parse_positive(s).map(Some), &mut c.t_end)?;
    set(e, "external", ExternalSpec::from_str, &mut c.external)?;
    set(e, "q0", parse_vec3, &mut c.q0)?;
    set(e, "qdot0", parse_vec3, &mut c.qdot0)?;
    set(e, "omega0", parse_vec3, &mut c.omega0)?;
    set(e, "inertia", |s| parse_inertia(s).map(Some), &mut c.inertia)?;
    set(e, "sample_every", parse_count, &mut c.sample_every)?;
    set(e, "dump_every", |s| parse_count(s).map(Some), &mut c.dump_every)?;
    set(e, "seed", |s| s.parse::<u64>().map_err(|_| format!("`{s}` is not a u64")), &mut c.seed)?;
    set(
        e,
        "wrap_guard",
        |s| match s {
            "error" => Ok(WrapGuard::Error),
            "warn" => Ok(WrapGuard::Warn),
            _ => Err(format!("expected `error` or `warn`, got `{s}`")),
        },
        &mut c.wrap_guard,
    )?;
    set(e, "drift_tol", parse_positive, &mut c.drift_tol)?;
    set(e, "dealias", parse_bool, &mut c.dealias)?;
    set(
        e,
        "execution",
        |s| match s {
            "parallel" => Ok(Execution::Parallel),
            "sequential" => Ok(Execution::Sequential),
            _ => Err(format!("expected `parallel` or `sequential`, got `{s}`")),
        },
        &mut c.execution,
    )?;
    set(e, "families", parse_count, &mut c.families)?;
    set(e, "fd_step", parse_positive, &mut c.fd_step)?;

    validate(&mut c, &line_of)?;
    Ok(c)
}

/// Checks the guards of [`RunConfig`]; the CFL bound only warns.
pub fn validate(c: &mut RunConfig, line_of: &dyn Fn(&str) -> usize) -> Result<()> {
    let as_config = |key: &str, err: Error| Error::config(line_of(key), err.to_string());
    if let Some(m) = c.inertia {
        if c.scenario != Scenario::EulerTop {
            return Err(Error::config(line_of("inertia"), "matrix inertia is only supported by euler_top"));
        }
        crate::rigid_body::Inertia::matrix(m).map_err(|e| as_config("inertia", e))?;
    }
    if c.scenario == Scenario::TransportCheck && c.fd_step > 1e-2 {
        return Err(Error::config(line_of("fd_step"), "fd_step must not exceed 1e-2"));
    }
    if !c.scenario.is_coupled() {
        return Ok(());
    }
    let grid = c.grid().map_err(|e| as_config("grid_n", e))?;
    let profile = c.profile().map_err(|e| as_config("sigma", e))?;
    crate::grid::check_support(&profile, &grid).map_err(|e| as_config("sigma", e))?;
    let dt = c.step();
    if dt > crate::coupled::DEFAULT_CFL * grid.dx() {
        c.warnings.push(format!("dt = {dt} exceeds the CFL bound {} = 0.5·dx", 0.5 * grid.dx()));
    }
    let t_end = c.end_time();
    let window = c.wrap_window();
    if t_end > window {
        let msg = format!("t_end = {t_end} exceeds the wrap window (L − 2·cutoff)/2 = {window}");
        match c.wrap_guard {
            WrapGuard::Error => {
                return Err(Error::config(line_of("t_end"), format!("{msg}; set `wrap_guard = warn` to run anyway")))
            }
            WrapGuard::Warn => c.warnings.push(msg),
        }
    }
    if t_end <= 0.0 || window <= 0.0 {
        return Err(Error::config(line_of("t_end"), format!("empty run window (t_end = {t_end}, wrap window = {window})")));
    }
    Ok(())
}
