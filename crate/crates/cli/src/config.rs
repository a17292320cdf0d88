//! Scenario configuration: a flat INI dialect with three sections.
//!
//! ```text
//! [system]
//! kind = fine            # or hyperfine
//! j_b = 3/2
//! j_c = 1/2
//! j_d = 1/2
//! omega_bd = 1.0
//! omega_cd = 1.0
//! dipole = uniform       # or explicit
//! s = 1.0
//!
//! [environment]
//! modifier = vacuum      # vacuum | cavity | photonic
//! field = isotropic      # none | isotropic | cos2 | tabulated | injected
//! n_mean = 1.0
//!
//! [run]
//! quad_order = 16
//! ```
//!
//! Comments start with `#` or `;` at the beginning of a line. Numbers accept
//! decimal, exponent and rational (`4/75`) forms. Unknown sections, unknown
//! keys, duplicate keys and keys that have no effect for the selected kinds
//! are rejected, each error naming the line it came from.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use vrelax_core::angular::{HalfInt, Sigma};
use vrelax_core::environment::{
    ModeDensityModifier, PhotonicCrystal, DEFAULT_PHI_NODES, DEFAULT_QUAD_ORDER,
};
use vrelax_core::operators::{
    BasisState, DipoleScale, HyperfineScheme, Level, LevelScheme, Scheme,
};

/// Where a configuration value came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    File { path: PathBuf, line: usize },
    Preset { name: String, line: usize },
    Text { line: usize },
    Flag(String),
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::File { path, line } => write!(f, "{}:{line}", path.display()),
            Origin::Preset { name, line } => write!(f, "preset {name}:{line}"),
            Origin::Text { line } => write!(f, "line {line}"),
            Origin::Flag(flag) => write!(f, "{flag}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub origin: Option<Origin>,
    pub message: String,
}

impl ConfigError {
    fn at(origin: &Origin, message: impl Into<String>) -> Self {
        ConfigError {
            origin: Some(origin.clone()),
            message: message.into(),
        }
    }

    pub fn bare(message: impl Into<String>) -> Self {
        ConfigError {
            origin: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.origin {
            Some(o) => write!(f, "{o}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

const SYSTEM_KEYS: &[&str] = &[
    "kind",
    "j_b",
    "j_c",
    "j_d",
    "omega_bd",
    "omega_cd",
    "dipole",
    "s",
    "mu_b",
    "mu_c",
    "prefactor",
    "alkali",
    "nuclear_spin",
];
const ENVIRONMENT_KEYS: &[&str] = &[
    "modifier",
    "reflectivity",
    "band_edge",
    "curvature",
    "gapped",
    "field",
    "n_mean",
    "table",
    "k_minus",
    "k_zero",
    "k_plus",
];
const RUN_KEYS: &[&str] = &[
    "quad_order",
    "phi_nodes",
    "dt",
    "t_final",
    "stride",
    "initial",
    "initial_level",
    "initial_state",
    "initial_states",
    "frame",
    "operators",
    "trajectory",
    "sweep",
    "sweep_values",
];

fn known_key(section: &str, key: &str) -> bool {
    match section {
        "system" => SYSTEM_KEYS.contains(&key) || parse_energy_key(key).is_some(),
        "environment" => ENVIRONMENT_KEYS.contains(&key),
        "run" => RUN_KEYS.contains(&key),
        _ => false,
    }
}

/// `energy_<level>_<F>`, e.g. `energy_b_3` or `energy_d_3/2`.
fn parse_energy_key(key: &str) -> Option<(Level, HalfInt)> {
    let rest = key.strip_prefix("energy_")?;
    let (level, f) = rest.split_once('_')?;
    let level = parse_level(level)?;
    let f: HalfInt = f.parse().ok()?;
    (f.twice() >= 0).then_some((level, f))
}

fn parse_level(s: &str) -> Option<Level> {
    match s {
        "b" => Some(Level::B),
        "c" => Some(Level::C),
        "d" => Some(Level::D),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawEntry {
    pub value: String,
    pub origin: Origin,
}

/// Untyped `section.key -> value` map with provenance.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawConfig {
    entries: BTreeMap<(String, String), RawEntry>,
}

impl RawConfig {
    /// Parses INI text; `origin` builds the provenance of a 1-based line.
    pub fn parse(text: &str, origin: impl Fn(usize) -> Origin) -> Result<Self, ConfigError> {
        let mut out = RawConfig::default();
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let o = origin(i + 1);
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| {
                        ConfigError::at(&o, format!("malformed section header `{line}`"))
                    })?
                    .trim();
                if !matches!(name, "system" | "environment" | "run") {
                    return Err(ConfigError::at(
                        &o,
                        format!(
                            "unknown section [{name}] (expected [system], [environment] or [run])"
                        ),
                    ));
                }
                section = Some(name.to_string());
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::at(
                    &o,
                    format!("expected `key = value`, got `{line}`"),
                ));
            };
            let Some(sec) = &section else {
                return Err(ConfigError::at(&o, "key outside of any section"));
            };
            let key = key.trim();
            if !known_key(sec, key) {
                return Err(ConfigError::at(
                    &o,
                    format!("unknown key `{key}` in [{sec}]"),
                ));
            }
            let k = (sec.clone(), key.to_string());
            if let Some(prev) = out.entries.get(&k) {
                return Err(ConfigError::at(
                    &o,
                    format!(
                        "duplicate key `{key}` in [{sec}] (first set at {})",
                        prev.origin
                    ),
                ));
            }
            out.entries.insert(
                k,
                RawEntry {
                    value: value.trim().to_string(),
                    origin: o,
                },
            );
        }
        Ok(out)
    }

    pub fn parse_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            ConfigError::bare(format!("cannot read config {}: {e}", path.display()))
        })?;
        let p = path.to_path_buf();
        Self::parse(&text, |line| Origin::File {
            path: p.clone(),
            line,
        })
    }

    /// Later layers win key by key.
    pub fn merge(&mut self, other: RawConfig) {
        self.entries.extend(other.entries);
    }

    /// Applies `section.key=value`; an empty value removes the key.
    pub fn set(&mut self, assignment: &str, origin: Origin) -> Result<(), ConfigError> {
        let (path, value) = assignment.split_once('=').ok_or_else(|| {
            ConfigError::at(
                &origin,
                format!("expected section.key=value, got `{assignment}`"),
            )
        })?;
        let (sec, key) = path.trim().split_once('.').ok_or_else(|| {
            ConfigError::at(
                &origin,
                format!("expected section.key=value, got `{assignment}`"),
            )
        })?;
        if !known_key(sec, key) {
            return Err(ConfigError::at(
                &origin,
                format!("unknown key `{key}` in [{sec}]"),
            ));
        }
        if value.trim().is_empty() {
            self.entries.remove(&(sec.to_string(), key.to_string()));
            return Ok(());
        }
        self.entries.insert(
            (sec.to_string(), key.to_string()),
            RawEntry {
                value: value.trim().to_string(),
                origin,
            },
        );
        Ok(())
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&RawEntry> {
        self.entries.get(&(section.to_string(), key.to_string()))
    }
}

/// Parses a number: decimal, exponent or `p/q` rational.
pub fn parse_number(s: &str) -> Option<f64> {
    let s = s.trim();
    let x = if let Some((p, q)) = s.split_once('/') {
        let p: f64 = p.trim().parse().ok()?;
        let q: f64 = q.trim().parse().ok()?;
        if q == 0.0 {
            return None;
        }
        p / q
    } else {
        s.parse().ok()?
    };
    x.is_finite().then_some(x)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SystemConfig {
    pub j_b: HalfInt,
    pub j_c: HalfInt,
    pub j_d: HalfInt,
    pub omega_bd: f64,
    pub omega_cd: f64,
    pub dipole: DipoleScale,
    /// Present for hyperfine schemes.
    pub nuclear_spin: Option<HalfInt>,
    /// Hyperfine manifold energies that differ from `ω_jd` (ground: 0).
    pub energies: Vec<(Level, HalfInt, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FieldConfig {
    None,
    Isotropic { n_mean: f64 },
    Cos2 { n_mean: f64 },
    Tabulated { table: PathBuf },
    Injected { minus: f64, zero: f64, plus: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnvironmentConfig {
    pub modifier: ModeDensityModifier,
    pub field: FieldConfig,
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialState {
    ThermalGround,
    LevelUniform(Level),
    SingleSublevel(BasisState),
    /// Pure state with equal real amplitudes on the listed sublevels.
    Superposition(Vec<BasisState>),
    MaximallyMixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrajectoryOutput {
    Full,
    Populations,
}

/// Environment parameter varied by a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParameter {
    Reflectivity,
    BandEdge,
    NMean,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::Reflectivity => "reflectivity",
            SweepParameter::BandEdge => "band_edge",
            SweepParameter::NMean => "n_mean",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub quad_order: usize,
    pub phi_nodes: usize,
    pub dt: f64,
    pub t_final: f64,
    pub stride: usize,
    pub initial: InitialState,
    /// Rotating-frame frequency; `None` means `ω_cd`.
    pub frame: Option<f64>,
    pub relaxation: bool,
    pub stimulated: bool,
    pub trajectory: TrajectoryOutput,
    pub sweep: Option<Sweep>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub system: SystemConfig,
    pub environment: EnvironmentConfig,
    pub run: RunConfig,
}

/// Tracks which keys of a raw config were read.
struct Reader<'a> {
    raw: &'a RawConfig,
    used: std::cell::RefCell<Vec<(String, String)>>,
}

impl<'a> Reader<'a> {
    fn entry(&self, sec: &str, key: &str) -> Option<&'a RawEntry> {
        let e = self.raw.get(sec, key)?;
        self.used
            .borrow_mut()
            .push((sec.to_string(), key.to_string()));
        Some(e)
    }

    fn required(&self, sec: &str, key: &str) -> Result<&'a RawEntry, ConfigError> {
        self.entry(sec, key)
            .ok_or_else(|| ConfigError::bare(format!("missing required key `{key}` in [{sec}]")))
    }

    fn number(&self, sec: &str, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.entry(sec, key) {
            None => Ok(None),
            Some(e) => parse_number(&e.value).map(Some).ok_or_else(|| {
                ConfigError::at(
                    &e.origin,
                    format!("`{key}`: expected a finite number, got `{}`", e.value),
                )
            }),
        }
    }

    fn required_number(&self, sec: &str, key: &str) -> Result<f64, ConfigError> {
        self.required(sec, key)?;
        Ok(self.number(sec, key)?.expect("present"))
    }

    fn count(&self, sec: &str, key: &str) -> Result<Option<usize>, ConfigError> {
        match self.entry(sec, key) {
            None => Ok(None),
            Some(e) => e.value.parse().map(Some).map_err(|_| {
                ConfigError::at(
                    &e.origin,
                    format!(
                        "`{key}`: expected a non-negative integer, got `{}`",
                        e.value
                    ),
                )
            }),
        }
    }

    fn half_int(&self, sec: &str, key: &str) -> Result<HalfInt, ConfigError> {
        let e = self.required(sec, key)?;
        let v: HalfInt = e.value.parse().map_err(|_| {
            ConfigError::at(
                &e.origin,
                format!(
                    "`{key}`: expected an integer or half-integer, got `{}`",
                    e.value
                ),
            )
        })?;
        if v.twice() < 0 {
            return Err(ConfigError::at(
                &e.origin,
                format!("`{key}` must be non-negative"),
            ));
        }
        Ok(v)
    }

    fn word(&self, sec: &str, key: &str, default: &'a str) -> (&'a str, Option<&'a Origin>) {
        match self.entry(sec, key) {
            Some(e) => (e.value.as_str(), Some(&e.origin)),
            None => (default, None),
        }
    }

    fn anchor(&self, sec: &str, key: &str) -> Option<Origin> {
        self.raw.get(sec, key).map(|e| e.origin.clone())
    }

    fn unused(&self) -> Option<(&'a RawEntry, String)> {
        let used = self.used.borrow();
        self.raw
            .entries
            .iter()
            .find(|(k, _)| !used.contains(k))
            .map(|((s, k), e)| (e, format!("[{s}] {k}")))
    }
}

fn bad_choice(origin: Option<&Origin>, key: &str, got: &str, options: &str) -> ConfigError {
    ConfigError {
        origin: origin.cloned(),
        message: format!("`{key}`: unknown value `{got}` (expected {options})"),
    }
}

fn anchored(origin: Option<Origin>, message: String) -> ConfigError {
    ConfigError { origin, message }
}

fn parse_state(s: &str) -> Option<BasisState> {
    let mut parts = s.split_whitespace();
    let level = parse_level(parts.next()?)?;
    let mut f = None;
    let mut m = None;
    for p in parts {
        if let Some(v) = p.strip_prefix("F=") {
            f = Some(v.parse().ok()?);
        } else if let Some(v) = p.strip_prefix("M=") {
            m = Some(v.parse().ok()?);
        } else {
            return None;
        }
    }
    Some(BasisState { level, f, m: m? })
}

fn parse_gapped(s: &str) -> Option<Vec<Sigma>> {
    if s.trim() == "none" {
        return Some(Vec::new());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .trim_start_matches('+')
                .parse::<i32>()
                .ok()
                .and_then(Sigma::from_value)
        })
        .collect()
}

impl ScenarioConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self, ConfigError> {
        let r = Reader {
            raw,
            used: Default::default(),
        };
        let system = Self::read_system(&r)?;
        let environment = Self::read_environment(&r)?;
        let run = Self::read_run(&r, &environment)?;
        if let Some((e, name)) = r.unused() {
            return Err(ConfigError::at(
                &e.origin,
                format!("{name} has no effect with the selected kinds"),
            ));
        }
        let cfg = ScenarioConfig {
            system,
            environment,
            run,
        };
        cfg.scheme()
            .map_err(|e| anchored(r.anchor("system", "j_b"), e))?;
        Ok(cfg)
    }

    pub fn parse_str(text: &str) -> Result<Self, ConfigError> {
        Self::from_raw(&RawConfig::parse(text, |line| Origin::Text { line })?)
    }

    fn read_system(r: &Reader) -> Result<SystemConfig, ConfigError> {
        let (kind, ko) = r.word("system", "kind", "fine");
        let hyper = match kind {
            "fine" => false,
            "hyperfine" => true,
            other => return Err(bad_choice(ko, "kind", other, "fine or hyperfine")),
        };
        let j_b = r.half_int("system", "j_b")?;
        let j_c = r.half_int("system", "j_c")?;
        let j_d = r.half_int("system", "j_d")?;
        let omega_bd = r.required_number("system", "omega_bd")?;
        let omega_cd = r.required_number("system", "omega_cd")?;
        let (dipole, dor) = r.word("system", "dipole", "uniform");
        let dipole = match dipole {
            "uniform" => DipoleScale::Uniform {
                s: r.number("system", "s")?.unwrap_or(1.0),
            },
            "explicit" => {
                let alkali = match r.entry("system", "alkali") {
                    None => false,
                    Some(e) => match e.value.as_str() {
                        "true" => true,
                        "false" => false,
                        other => {
                            return Err(bad_choice(
                                Some(&e.origin),
                                "alkali",
                                other,
                                "true or false",
                            ))
                        }
                    },
                };
                DipoleScale::Explicit {
                    mu_b: r.required_number("system", "mu_b")?,
                    mu_c: r.required_number("system", "mu_c")?,
                    prefactor: r.required_number("system", "prefactor")?,
                    enforce_alkali: alkali,
                }
            }
            other => return Err(bad_choice(dor, "dipole", other, "uniform or explicit")),
        };
        let mut energies = Vec::new();
        let nuclear_spin = if hyper {
            for ((sec, key), e) in &r.raw.entries {
                if sec != "system" {
                    continue;
                }
                if let Some((level, f)) = parse_energy_key(key) {
                    r.entry(sec, key);
                    let w = parse_number(&e.value).ok_or_else(|| {
                        ConfigError::at(&e.origin, format!("`{key}`: expected a finite number"))
                    })?;
                    energies.push((level, f, w));
                }
            }
            Some(r.half_int("system", "nuclear_spin")?)
        } else {
            None
        };
        Ok(SystemConfig {
            j_b,
            j_c,
            j_d,
            omega_bd,
            omega_cd,
            dipole,
            nuclear_spin,
            energies,
        })
    }

    fn read_environment(r: &Reader) -> Result<EnvironmentConfig, ConfigError> {
        let (m, mo) = r.word("environment", "modifier", "vacuum");
        let modifier = match m {
            "vacuum" => ModeDensityModifier::Vacuum,
            "cavity" => {
                let rf = r.required_number("environment", "reflectivity")?;
                ModeDensityModifier::planar_cavity(rf)
                    .map_err(|e| anchored(r.anchor("environment", "reflectivity"), e.to_string()))?
            }
            "photonic" => {
                let edge = r.required_number("environment", "band_edge")?;
                let curv = r.required_number("environment", "curvature")?;
                let g = r.required("environment", "gapped")?;
                let gapped = parse_gapped(&g.value).ok_or_else(|| {
                    ConfigError::at(
                        &g.origin,
                        format!(
                            "`gapped`: expected a list of -1, 0, +1 or `none`, got `{}`",
                            g.value
                        ),
                    )
                })?;
                let pc = PhotonicCrystal::new(edge, curv, gapped)
                    .map_err(|e| anchored(r.anchor("environment", "band_edge"), e.to_string()))?;
                ModeDensityModifier::PhotonicCrystal(pc)
            }
            other => {
                return Err(bad_choice(
                    mo,
                    "modifier",
                    other,
                    "vacuum, cavity or photonic",
                ))
            }
        };
        let (f, fo) = r.word("environment", "field", "none");
        let n_mean = |r: &Reader| -> Result<f64, ConfigError> {
            let n = r.required_number("environment", "n_mean")?;
            if n < 0.0 {
                return Err(anchored(
                    r.anchor("environment", "n_mean"),
                    "`n_mean` must be >= 0".into(),
                ));
            }
            Ok(n)
        };
        let field = match f {
            "none" => FieldConfig::None,
            "isotropic" => FieldConfig::Isotropic { n_mean: n_mean(r)? },
            "cos2" => FieldConfig::Cos2 { n_mean: n_mean(r)? },
            "tabulated" => {
                let e = r.required("environment", "table")?;
                let mut table = PathBuf::from(&e.value);
                if let Origin::File { path, .. } = &e.origin {
                    if table.is_relative() {
                        if let Some(dir) = path.parent() {
                            table = dir.join(table);
                        }
                    }
                }
                FieldConfig::Tabulated { table }
            }
            "injected" => {
                let mut k = [0.0; 3];
                for (slot, key) in k.iter_mut().zip(["k_minus", "k_zero", "k_plus"]) {
                    *slot = r.required_number("environment", key)?;
                    if *slot < 0.0 {
                        return Err(anchored(
                            r.anchor("environment", key),
                            format!("`{key}` must be >= 0"),
                        ));
                    }
                }
                FieldConfig::Injected {
                    minus: k[0],
                    zero: k[1],
                    plus: k[2],
                }
            }
            other => {
                return Err(bad_choice(
                    fo,
                    "field",
                    other,
                    "none, isotropic, cos2, tabulated or injected",
                ))
            }
        };
        Ok(EnvironmentConfig { modifier, field })
    }

    fn read_run(r: &Reader, env: &EnvironmentConfig) -> Result<RunConfig, ConfigError> {
        let quad_order = r.count("run", "quad_order")?.unwrap_or(DEFAULT_QUAD_ORDER);
        if quad_order < 4 {
            return Err(anchored(
                r.anchor("run", "quad_order"),
                format!("`quad_order` must be at least 4, got {quad_order}"),
            ));
        }
        let phi_nodes = r.count("run", "phi_nodes")?.unwrap_or(DEFAULT_PHI_NODES);
        if phi_nodes == 0 {
            return Err(anchored(
                r.anchor("run", "phi_nodes"),
                "`phi_nodes` must be positive".into(),
            ));
        }
        let dt = r.number("run", "dt")?.unwrap_or(0.01);
        if dt <= 0.0 {
            return Err(anchored(
                r.anchor("run", "dt"),
                "`dt` must be positive".into(),
            ));
        }
        let t_final = r.number("run", "t_final")?.unwrap_or(10.0);
        if t_final < 0.0 {
            return Err(anchored(
                r.anchor("run", "t_final"),
                "`t_final` must be >= 0".into(),
            ));
        }
        let stride = r.count("run", "stride")?.unwrap_or(1);
        if stride == 0 {
            return Err(anchored(
                r.anchor("run", "stride"),
                "`stride` must be positive".into(),
            ));
        }
        let (init, io) = r.word("run", "initial", "thermal-ground");
        let initial = match init {
            "thermal-ground" => InitialState::ThermalGround,
            "maximally-mixed" => InitialState::MaximallyMixed,
            "level-uniform" => {
                let e = r.required("run", "initial_level")?;
                let level = parse_level(&e.value).ok_or_else(|| {
                    bad_choice(Some(&e.origin), "initial_level", &e.value, "b, c or d")
                })?;
                InitialState::LevelUniform(level)
            }
            "single-sublevel" => {
                let e = r.required("run", "initial_state")?;
                let s = parse_state(&e.value).ok_or_else(|| {
                    ConfigError::at(
                        &e.origin,
                        format!("`initial_state`: expected `<level> M=<m>` or `<level> F=<f> M=<m>`, got `{}`", e.value),
                    )
                })?;
                InitialState::SingleSublevel(s)
            }
            "superposition" => {
                let e = r.required("run", "initial_states")?;
                let states = e
                    .value
                    .split(',')
                    .map(parse_state)
                    .collect::<Option<Vec<_>>>()
                    .filter(|v| !v.is_empty())
                    .ok_or_else(|| {
                        ConfigError::at(
                            &e.origin,
                            format!("`initial_states`: expected a comma-separated list of states, got `{}`", e.value),
                        )
                    })?;
                for (i, st) in states.iter().enumerate() {
                    if states[..i].contains(st) {
                        return Err(ConfigError::at(
                            &e.origin,
                            format!("`initial_states`: `{st}` listed twice"),
                        ));
                    }
                }
                InitialState::Superposition(states)
            }
            other => return Err(bad_choice(
                io,
                "initial",
                other,
                "thermal-ground, level-uniform, single-sublevel, superposition or maximally-mixed",
            )),
        };
        let frame = r.number("run", "frame")?;
        let has_field = env.field != FieldConfig::None;
        let (relaxation, stimulated) = match r.entry("run", "operators") {
            None => (true, has_field),
            Some(e) => {
                let mut rel = false;
                let mut stim = false;
                if e.value.trim() != "none" {
                    for t in e.value.split(',') {
                        match t.trim() {
                            "relaxation" => rel = true,
                            "stimulated" => stim = true,
                            other => {
                                return Err(bad_choice(
                                    Some(&e.origin),
                                    "operators",
                                    other,
                                    "a list of relaxation, stimulated, or none",
                                ))
                            }
                        }
                    }
                }
                if stim && !has_field {
                    return Err(ConfigError::at(
                        &e.origin,
                        "`operators` includes stimulated but field = none",
                    ));
                }
                (rel, stim)
            }
        };
        let (traj, to) = r.word("run", "trajectory", "populations");
        let trajectory = match traj {
            "populations" => TrajectoryOutput::Populations,
            "full" => TrajectoryOutput::Full,
            other => return Err(bad_choice(to, "trajectory", other, "populations or full")),
        };
        let sweep = match r.entry("run", "sweep") {
            None => None,
            Some(e) => {
                let parameter = match e.value.as_str() {
                    "reflectivity" => SweepParameter::Reflectivity,
                    "band_edge" => SweepParameter::BandEdge,
                    "n_mean" => SweepParameter::NMean,
                    other => {
                        return Err(bad_choice(
                            Some(&e.origin),
                            "sweep",
                            other,
                            "reflectivity, band_edge or n_mean",
                        ))
                    }
                };
                let applies = match parameter {
                    SweepParameter::Reflectivity => {
                        matches!(env.modifier, ModeDensityModifier::PlanarCavity { .. })
                    }
                    SweepParameter::BandEdge => {
                        matches!(env.modifier, ModeDensityModifier::PhotonicCrystal(_))
                    }
                    SweepParameter::NMean => {
                        matches!(
                            env.field,
                            FieldConfig::Isotropic { .. } | FieldConfig::Cos2 { .. }
                        )
                    }
                };
                if !applies {
                    return Err(ConfigError::at(
                        &e.origin,
                        format!(
                            "cannot sweep `{}` with the selected environment",
                            parameter.name()
                        ),
                    ));
                }
                let v = r.required("run", "sweep_values")?;
                let values = v
                    .value
                    .split(',')
                    .map(parse_number)
                    .collect::<Option<Vec<f64>>>()
                    .filter(|vs| !vs.is_empty())
                    .ok_or_else(|| {
                        ConfigError::at(
                            &v.origin,
                            format!(
                                "`sweep_values`: expected a list of numbers, got `{}`",
                                v.value
                            ),
                        )
                    })?;
                let sweep = Sweep { parameter, values };
                for &x in &sweep.values {
                    env.with_parameter(parameter, x).map_err(|msg| {
                        ConfigError::at(&v.origin, format!("`sweep_values`: {msg}"))
                    })?;
                }
                Some(sweep)
            }
        };
        Ok(RunConfig {
            quad_order,
            phi_nodes,
            dt,
            t_final,
            stride,
            initial,
            frame,
            relaxation,
            stimulated,
            trajectory,
            sweep,
        })
    }

    /// The level scheme described by `[system]`.
    pub fn scheme(&self) -> Result<Scheme, String> {
        let s = &self.system;
        let fine = LevelScheme::new(
            s.j_b,
            s.j_c,
            s.j_d,
            s.omega_bd,
            s.omega_cd,
            s.dipole.clone(),
        )
        .map_err(|e| e.to_string())?;
        match s.nuclear_spin {
            None => Ok(Scheme::Fine(fine)),
            Some(i) => {
                let mut h = HyperfineScheme::new(fine, i).map_err(|e| e.to_string())?;
                for &(level, f, w) in &s.energies {
                    h = h.with_energy(level, f, w).map_err(|e| e.to_string())?;
                }
                Ok(Scheme::Hyperfine(h))
            }
        }
    }

    /// Canonical INI text; parsing it gives back an equal configuration.
    pub fn to_ini(&self) -> String {
        let mut o = String::new();
        let s = &self.system;
        o.push_str("[system]\n");
        let kind = if s.nuclear_spin.is_some() {
            "hyperfine"
        } else {
            "fine"
        };
        o.push_str(&format!("kind = {kind}\n"));
        o.push_str(&format!(
            "j_b = {}\nj_c = {}\nj_d = {}\n",
            s.j_b, s.j_c, s.j_d
        ));
        o.push_str(&format!(
            "omega_bd = {}\nomega_cd = {}\n",
            s.omega_bd, s.omega_cd
        ));
        match &s.dipole {
            DipoleScale::Uniform { s } => o.push_str(&format!("dipole = uniform\ns = {s}\n")),
            DipoleScale::Explicit {
                mu_b,
                mu_c,
                prefactor,
                enforce_alkali,
            } => o.push_str(&format!(
                "dipole = explicit\nmu_b = {mu_b}\nmu_c = {mu_c}\nprefactor = {prefactor}\nalkali = {enforce_alkali}\n"
            )),
        }
        if let Some(i) = s.nuclear_spin {
            o.push_str(&format!("nuclear_spin = {i}\n"));
            for (level, f, w) in &s.energies {
                o.push_str(&format!("energy_{level}_{f} = {w}\n"));
            }
        }
        let e = &self.environment;
        o.push_str("\n[environment]\n");
        match &e.modifier {
            ModeDensityModifier::Vacuum => o.push_str("modifier = vacuum\n"),
            ModeDensityModifier::PlanarCavity { reflectivity } => o.push_str(&format!(
                "modifier = cavity\nreflectivity = {reflectivity}\n"
            )),
            ModeDensityModifier::PhotonicCrystal(pc) => {
                let gapped = if pc.gapped.is_empty() {
                    "none".to_string()
                } else {
                    pc.gapped
                        .iter()
                        .map(|g| format!("{:+}", g.value()))
                        .collect::<Vec<_>>()
                        .join(", ")
                };
                o.push_str(&format!(
                    "modifier = photonic\nband_edge = {}\ncurvature = {}\ngapped = {gapped}\n",
                    pc.band_edge, pc.curvature
                ));
            }
        }
        match &e.field {
            FieldConfig::None => o.push_str("field = none\n"),
            FieldConfig::Isotropic { n_mean } => {
                o.push_str(&format!("field = isotropic\nn_mean = {n_mean}\n"))
            }
            FieldConfig::Cos2 { n_mean } => {
                o.push_str(&format!("field = cos2\nn_mean = {n_mean}\n"))
            }
            FieldConfig::Tabulated { table } => {
                o.push_str(&format!("field = tabulated\ntable = {}\n", table.display()))
            }
            FieldConfig::Injected { minus, zero, plus } => o.push_str(&format!(
                "field = injected\nk_minus = {minus}\nk_zero = {zero}\nk_plus = {plus}\n"
            )),
        }
        let r = &self.run;
        o.push_str("\n[run]\n");
        o.push_str(&format!(
            "quad_order = {}\nphi_nodes = {}\ndt = {}\nt_final = {}\nstride = {}\n",
            r.quad_order, r.phi_nodes, r.dt, r.t_final, r.stride
        ));
        match &r.initial {
            InitialState::ThermalGround => o.push_str("initial = thermal-ground\n"),
            InitialState::MaximallyMixed => o.push_str("initial = maximally-mixed\n"),
            InitialState::LevelUniform(l) => {
                o.push_str(&format!("initial = level-uniform\ninitial_level = {l}\n"))
            }
            InitialState::SingleSublevel(s) => {
                o.push_str(&format!("initial = single-sublevel\ninitial_state = {s}\n"))
            }
            InitialState::Superposition(v) => {
                let list: Vec<String> = v.iter().map(|s| s.to_string()).collect();
                o.push_str(&format!(
                    "initial = superposition\ninitial_states = {}\n",
                    list.join(", ")
                ));
            }
        }
        if let Some(f) = r.frame {
            o.push_str(&format!("frame = {f}\n"));
        }
        let ops: Vec<&str> = [(r.relaxation, "relaxation"), (r.stimulated, "stimulated")]
            .into_iter()
            .filter_map(|(on, name)| on.then_some(name))
            .collect();
        let ops = if ops.is_empty() {
            "none".to_string()
        } else {
            ops.join(", ")
        };
        o.push_str(&format!("operators = {ops}\n"));
        let traj = match r.trajectory {
            TrajectoryOutput::Full => "full",
            TrajectoryOutput::Populations => "populations",
        };
        o.push_str(&format!("trajectory = {traj}\n"));
        if let Some(sw) = &r.sweep {
            let vals: Vec<String> = sw.values.iter().map(|v| v.to_string()).collect();
            o.push_str(&format!(
                "sweep = {}\nsweep_values = {}\n",
                sw.parameter.name(),
                vals.join(", ")
            ));
        }
        o
    }
}

impl EnvironmentConfig {
    /// Copy with one swept parameter replaced.
    pub fn with_parameter(&self, parameter: SweepParameter, value: f64) -> Result<Self, String> {
        let mut out = self.clone();
        match (parameter, &mut out.modifier, &mut out.field) {
            (SweepParameter::Reflectivity, m @ ModeDensityModifier::PlanarCavity { .. }, _) => {
                *m = ModeDensityModifier::planar_cavity(value).map_err(|e| e.to_string())?;
            }
            (SweepParameter::BandEdge, ModeDensityModifier::PhotonicCrystal(pc), _) => {
                *pc = PhotonicCrystal::new(value, pc.curvature, pc.gapped.clone())
                    .map_err(|e| e.to_string())?;
            }
            (
                SweepParameter::NMean,
                _,
                FieldConfig::Isotropic { n_mean } | FieldConfig::Cos2 { n_mean },
            ) => {
                if !(value >= 0.0) {
                    return Err(format!("n_mean must be >= 0, got {value}"));
                }
                *n_mean = value;
            }
            _ => {
                return Err(format!(
                    "cannot sweep `{}` with the selected environment",
                    parameter.name()
                ))
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DLINE: &str = "[system]\nj_b = 3/2\nj_c = 1/2\nj_d = 1/2\nomega_bd = 1\nomega_cd = 1\n";

    #[test]
    fn numbers() {
        assert_eq!(parse_number("4/75"), Some(4.0 / 75.0));
        assert_eq!(parse_number(" -1.5e3 "), Some(-1500.0));
        assert_eq!(parse_number("1/0"), None);
        assert_eq!(parse_number("nan"), None);
        assert_eq!(parse_number("inf"), None);
    }

    #[test]
    fn minimal_config_uses_defaults() {
        let c = ScenarioConfig::parse_str(DLINE).unwrap();
        assert_eq!(c.system.dipole, DipoleScale::Uniform { s: 1.0 });
        assert_eq!(c.environment.field, FieldConfig::None);
        assert!(c.run.relaxation && !c.run.stimulated);
        assert_eq!(c.run.quad_order, 16);
    }

    #[test]
    fn errors_name_their_line() {
        let e = ScenarioConfig::parse_str(&format!("{DLINE}bogus = 1\n")).unwrap_err();
        assert_eq!(e.origin, Some(Origin::Text { line: 7 }));
        assert!(e.message.contains("unknown key `bogus`"));
        let e = ScenarioConfig::parse_str(&format!(
            "{DLINE}[environment]\nfield = isotropic\nn_mean = -1\n"
        ))
        .unwrap_err();
        assert_eq!(e.origin, Some(Origin::Text { line: 9 }));
        let e =
            ScenarioConfig::parse_str(&format!("{DLINE}[environment]\nn_mean = 2\n")).unwrap_err();
        assert_eq!(e.origin, Some(Origin::Text { line: 8 }));
        assert!(e.message.contains("no effect"));
        let e = ScenarioConfig::parse_str(&format!("{DLINE}j_b = 1/2\n")).unwrap_err();
        assert!(e.message.contains("duplicate"));
        let e = ScenarioConfig::parse_str("[nope]\n").unwrap_err();
        assert!(e.message.contains("unknown section"));
        let e = ScenarioConfig::parse_str("j_b = 1\n").unwrap_err();
        assert!(e.message.contains("outside"));
    }

    #[test]
    fn scheme_errors_are_config_errors() {
        let e = ScenarioConfig::parse_str(&DLINE.replace("j_b = 3/2", "j_b = 7/2")).unwrap_err();
        assert_eq!(e.origin, Some(Origin::Text { line: 2 }));
        assert!(e.message.contains("dipole allowed"));
        let e =
            ScenarioConfig::parse_str(&DLINE.replace("omega_cd = 1", "omega_cd = 0")).unwrap_err();
        assert!(e.message.contains("omega_cd"));
    }

    #[test]
    fn stimulated_needs_a_field() {
        let e = ScenarioConfig::parse_str(&format!(
            "{DLINE}[run]\noperators = relaxation, stimulated\n"
        ))
        .unwrap_err();
        assert!(e.message.contains("field = none"));
    }

    #[test]
    fn state_syntax() {
        assert_eq!(
            parse_state("b M=1/2"),
            Some(BasisState::fine(Level::B, HalfInt::HALF))
        );
        assert_eq!(
            parse_state("c F=2 M=-1"),
            Some(BasisState::hyperfine(
                Level::C,
                HalfInt::integer(2),
                HalfInt::integer(-1)
            ))
        );
        assert_eq!(parse_state("x M=0"), None);
        assert_eq!(parse_state("b"), None);
    }

    #[test]
    fn set_overrides() {
        let mut raw = RawConfig::parse(DLINE, |line| Origin::Text { line }).unwrap();
        raw.set("system.s=2.5", Origin::Flag("--set".into()))
            .unwrap();
        let c = ScenarioConfig::from_raw(&raw).unwrap();
        assert_eq!(c.system.dipole, DipoleScale::Uniform { s: 2.5 });
        assert!(raw
            .set("system.zzz=1", Origin::Flag("--set".into()))
            .is_err());
        assert!(raw.set("nodot=1", Origin::Flag("--set".into())).is_err());
    }
}
