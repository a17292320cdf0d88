//! The table-producing commands. Each returns the complete output text.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use vrelax_core::angular::Sigma;
use vrelax_core::dynamics::{propagate, steady_state, AtomicHamiltonian, DensityMatrix};
use vrelax_core::environment::{
    AngularDistribution, KMatrix, QuadratureRule, TabulatedDistribution,
};
use vrelax_core::operators::{
    build_relaxation_superop, build_stimulated_superop, interference_report, rates_spontaneous,
    rates_stimulated_from_k, Basis, DipoleScale, InterferenceReport, Level, RateSet, Scheme,
    Superoperator, TransitionK, RATE_CSV_HEADER,
};

use crate::config::{
    ConfigError, EnvironmentConfig, FieldConfig, InitialState, Origin, RawConfig, ScenarioConfig,
    TrajectoryOutput,
};
use crate::{presets, CliError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Kmatrix,
    Rates,
    Superop,
    Evolve,
    Steady,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Kmatrix => "kmatrix",
            Command::Rates => "rates",
            Command::Superop => "superop",
            Command::Evolve => "evolve",
            Command::Steady => "steady",
        }
    }
}

/// Command-line settings layered over the preset and the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    /// `section.key=value` assignments.
    pub sets: Vec<String>,
    /// Planar-cavity reflectivity.
    pub reflectivity: Option<f64>,
}

/// Merges preset < config file < `--set` < `--r` and validates the result.
pub fn load_config(
    config: Option<&Path>,
    preset: Option<&str>,
    overrides: &Overrides,
) -> Result<ScenarioConfig, ConfigError> {
    if config.is_none() && preset.is_none() {
        return Err(ConfigError::bare("either --config or --preset is required"));
    }
    let mut raw = RawConfig::default();
    if let Some(name) = preset {
        raw.merge(presets::load(name)?);
    }
    if let Some(path) = config {
        raw.merge(RawConfig::parse_file(path)?);
    }
    for s in &overrides.sets {
        raw.set(s, Origin::Flag(format!("--set {s}")))?;
    }
    if let Some(r) = overrides.reflectivity {
        let o = Origin::Flag(format!("--r {r}"));
        raw.set("environment.modifier=cavity", o.clone())?;
        raw.set(&format!("environment.reflectivity={r}"), o)?;
    }
    ScenarioConfig::from_raw(&raw)
}

pub fn execute(cmd: Command, cfg: &ScenarioConfig) -> Result<String, CliError> {
    let scheme = cfg
        .scheme()
        .map_err(|e| CliError::Config(ConfigError::bare(e)))?;
    let mut out = header(cmd, cfg, &scheme);
    if cfg.run.sweep.is_some() {
        match cmd {
            Command::Rates | Command::Evolve | Command::Steady => {
                sweep(cmd, cfg, &scheme, &mut out)?
            }
            _ => {
                return Err(ConfigError::bare(format!(
                    "[run] sweep applies to rates, evolve and steady, not {}",
                    cmd.name()
                ))
                .into())
            }
        }
        return Ok(out);
    }
    match cmd {
        Command::Kmatrix => kmatrix(cfg, &scheme, &mut out)?,
        Command::Rates => rates(cfg, &scheme, &mut out)?,
        Command::Superop => superop(cfg, &scheme, &mut out)?,
        Command::Evolve => evolve(cfg, &scheme, &mut out)?,
        Command::Steady => steady(cfg, &scheme, &mut out)?,
    }
    Ok(out)
}

fn header(cmd: Command, cfg: &ScenarioConfig, scheme: &Scheme) -> String {
    let mut h = String::new();
    let _ = writeln!(h, "# vrelax {}", cmd.name());
    h.push_str(
        "# normalization: K(sigma, sigma') is integrated against dOmega/4pi; \
         free space gives K = (2/3) I and an isotropic field of N photons per mode gives K = (2N/3) I\n",
    );
    h.push_str(
        "# normalization: every rate is S_j1j2 * A * A * K; 1/(8 pi^2), hbar, c and the reduced \
         dipole elements are absorbed into S\n",
    );
    match &cfg.system.dipole {
        DipoleScale::Uniform { s } => {
            let _ = writeln!(h, "# S: uniform, S = {s} for every level pair");
        }
        DipoleScale::Explicit { .. } => {
            let f = scheme.fine();
            let _ = writeln!(
                h,
                "# S: explicit, S_bb = {:e}, S_bc = {:e}, S_cb = {:e}, S_cc = {:e}",
                f.s_factor(Level::B, Level::B),
                f.s_factor(Level::B, Level::C),
                f.s_factor(Level::C, Level::B),
                f.s_factor(Level::C, Level::C)
            );
        }
    }
    let n = match &cfg.environment.field {
        FieldConfig::None => "no stimulating field".to_string(),
        FieldConfig::Isotropic { n_mean } => format!("isotropic field, N = {n_mean}"),
        FieldConfig::Cos2 { n_mean } => format!("N cos^2(theta) field, N = {n_mean}"),
        FieldConfig::Tabulated { table } => format!(
            "tabulated field from {}, N carried by the table",
            table.display()
        ),
        FieldConfig::Injected { .. } => {
            "injected K, entries are literal multiples of N".to_string()
        }
    };
    let _ = writeln!(h, "# N: {n}");
    for line in cfg.to_ini().lines().filter(|l| !l.is_empty()) {
        let _ = writeln!(h, "# config: {line}");
    }
    h
}

fn basis_legend(basis: &Basis, out: &mut String) {
    let _ = writeln!(out, "# basis ({} states)", basis.len());
    for (i, s) in basis.states().iter().enumerate() {
        let _ = writeln!(out, "# {i}: {s}");
    }
}

fn rule(cfg: &ScenarioConfig) -> Result<QuadratureRule, CliError> {
    Ok(QuadratureRule::with_phi_nodes(
        cfg.run.quad_order,
        cfg.run.phi_nodes,
    )?)
}

fn stimulated_k(
    cfg: &ScenarioConfig,
    env: &EnvironmentConfig,
    scheme: &Scheme,
) -> Result<Option<TransitionK>, CliError> {
    let dist = match &env.field {
        FieldConfig::None => return Ok(None),
        FieldConfig::Injected { minus, zero, plus } => {
            return Ok(Some(TransitionK::uniform(KMatrix::injected(
                *minus, *zero, *plus,
            )?)))
        }
        FieldConfig::Isotropic { n_mean } => AngularDistribution::isotropic(*n_mean),
        FieldConfig::Cos2 { n_mean } => AngularDistribution::cos2(*n_mean),
        FieldConfig::Tabulated { table } => {
            AngularDistribution::Tabulated(TabulatedDistribution::from_csv_path(table)?)
        }
    };
    Ok(Some(TransitionK::stimulated(
        scheme.fine(),
        &dist,
        &env.modifier,
        &rule(cfg)?,
    )?))
}

struct Assembled {
    relaxation: RateSet,
    stimulated: Option<RateSet>,
}

fn assemble(
    cfg: &ScenarioConfig,
    env: &EnvironmentConfig,
    scheme: &Scheme,
) -> Result<Assembled, CliError> {
    let relaxation = rates_spontaneous(scheme, &env.modifier)?;
    let stimulated = match stimulated_k(cfg, env, scheme)? {
        Some(k) => Some(rates_stimulated_from_k(scheme, &k)?),
        None => None,
    };
    Ok(Assembled {
        relaxation,
        stimulated,
    })
}

fn superoperators(
    cfg: &ScenarioConfig,
    rates: &Assembled,
    basis: &Basis,
) -> Result<Vec<Superoperator>, CliError> {
    let mut list = Vec::new();
    if cfg.run.relaxation {
        list.push(build_relaxation_superop(&rates.relaxation, basis)?);
    }
    if cfg.run.stimulated {
        if let Some(s) = &rates.stimulated {
            list.push(build_stimulated_superop(s, basis)?);
        }
    }
    Ok(list)
}

fn hamiltonian(cfg: &ScenarioConfig, scheme: &Scheme) -> AtomicHamiltonian {
    let frame = cfg.run.frame.unwrap_or(cfg.system.omega_cd);
    AtomicHamiltonian::from_scheme(scheme).in_frame(frame)
}

fn initial_state(cfg: &ScenarioConfig, basis: &Basis) -> Result<DensityMatrix, CliError> {
    let b = basis.clone();
    Ok(match &cfg.run.initial {
        InitialState::ThermalGround => DensityMatrix::thermal_ground(b)?,
        InitialState::MaximallyMixed => DensityMatrix::maximally_mixed(b),
        InitialState::LevelUniform(level) => DensityMatrix::level_uniform(b, *level)?,
        InitialState::SingleSublevel(s) => {
            let i = basis.index_of(s).ok_or_else(|| {
                CliError::Config(ConfigError::bare(format!(
                    "initial_state `{s}` is not a state of the basis"
                )))
            })?;
            DensityMatrix::single_sublevel(b, i)?
        }
        InitialState::Superposition(states) => {
            let mut psi = DVector::<Complex64>::zeros(basis.len());
            let a = Complex64::new(1.0 / (states.len() as f64).sqrt(), 0.0);
            for s in states {
                let i = basis.index_of(s).ok_or_else(|| {
                    CliError::Config(ConfigError::bare(format!(
                        "initial_states: `{s}` is not a state of the basis"
                    )))
                })?;
                psi[i] = a;
            }
            DensityMatrix::new(b, &psi * psi.adjoint())?
        }
    })
}

fn num(x: f64) -> String {
    format!("{:e}", x + 0.0)
}

fn csv_text(
    write: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    write(&mut w)?;
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn kmatrix(cfg: &ScenarioConfig, scheme: &Scheme, out: &mut String) -> Result<(), CliError> {
    let env = &cfg.environment;
    let fine = scheme.fine();
    let spont = TransitionK::spontaneous(fine, &env.modifier)?;
    let stim = stimulated_k(cfg, env, scheme)?;
    let mut tables: Vec<(&str, &TransitionK)> = vec![("spontaneous", &spont)];
    if let Some(s) = &stim {
        tables.push(("stimulated", s));
    }
    for (name, tk) in &tables {
        for level in Level::UPPER {
            let _ = writeln!(
                out,
                "# {name} K at {level} (omega = {:e}): {}",
                fine.omega(level),
                tk.for_level(level).provenance()
            );
        }
    }
    let body = csv_text(|w| {
        w.write_record([
            "matrix",
            "level",
            "omega",
            "sigma",
            "sigma_prime",
            "re",
            "im",
        ])?;
        for (name, tk) in &tables {
            for level in Level::UPPER {
                let k = tk.for_level(level);
                for s1 in Sigma::ALL {
                    for s2 in Sigma::ALL {
                        let z = k.get(s1, s2);
                        w.write_record([
                            name.to_string(),
                            level.to_string(),
                            num(fine.omega(level)),
                            s1.value().to_string(),
                            s2.value().to_string(),
                            num(z.re),
                            num(z.im),
                        ])?;
                    }
                }
            }
        }
        Ok(())
    })?;
    out.push_str(&body);
    Ok(())
}

fn report_lines(label: &str, report: &InterferenceReport, out: &mut String) {
    for line in report.to_string().lines() {
        let _ = writeln!(out, "# {label} {line}");
    }
}

fn rates(cfg: &ScenarioConfig, scheme: &Scheme, out: &mut String) -> Result<(), CliError> {
    let a = assemble(cfg, &cfg.environment, scheme)?;
    report_lines("relaxation", &interference_report(&a.relaxation), out);
    if let Some(s) = &a.stimulated {
        report_lines("stimulated", &interference_report(s), out);
    }
    let body = csv_text(|w| {
        w.write_record(RATE_CSV_HEADER)?;
        a.relaxation.write_csv_records(w)?;
        if let Some(s) = &a.stimulated {
            s.write_csv_records(w)?;
        }
        Ok(())
    })?;
    out.push_str(&body);
    Ok(())
}

fn superop(cfg: &ScenarioConfig, scheme: &Scheme, out: &mut String) -> Result<(), CliError> {
    let basis = scheme.basis();
    let a = assemble(cfg, &cfg.environment, scheme)?;
    let mut total = Superoperator::zero(basis.clone());
    for l in superoperators(cfg, &a, &basis)? {
        total = total.sum(&l)?;
    }
    let mut buf = Vec::new();
    total.write_csv(&mut buf)?;
    out.push_str(&String::from_utf8(buf).expect("UTF-8"));
    Ok(())
}

fn evolve(cfg: &ScenarioConfig, scheme: &Scheme, out: &mut String) -> Result<(), CliError> {
    let basis = scheme.basis();
    let a = assemble(cfg, &cfg.environment, scheme)?;
    let ls = superoperators(cfg, &a, &basis)?;
    let rho0 = initial_state(cfg, &basis)?;
    let run = &cfg.run;
    let traj = propagate(
        &rho0,
        &hamiltonian(cfg, scheme),
        &ls,
        run.t_final,
        run.dt,
        run.stride,
    )?;
    basis_legend(&basis, out);
    let mut buf = Vec::new();
    match run.trajectory {
        TrajectoryOutput::Full => traj.write_csv(&mut buf)?,
        TrajectoryOutput::Populations => traj.write_populations_csv(&mut buf)?,
    }
    out.push_str(&String::from_utf8(buf).expect("UTF-8"));
    Ok(())
}

fn steady(cfg: &ScenarioConfig, scheme: &Scheme, out: &mut String) -> Result<(), CliError> {
    let basis = scheme.basis();
    let a = assemble(cfg, &cfg.environment, scheme)?;
    let ls = superoperators(cfg, &a, &basis)?;
    let rho = steady_state(&hamiltonian(cfg, scheme), &ls)?;
    basis_legend(&basis, out);
    let n = basis.len();
    let body = csv_text(|w| {
        w.write_record(["i", "j", "re", "im"])?;
        for i in 0..n {
            for j in 0..n {
                let z = rho.matrix()[(i, j)];
                w.write_record([i.to_string(), j.to_string(), num(z.re), num(z.im)])?;
            }
        }
        Ok(())
    })?;
    out.push_str(&body);
    Ok(())
}

/// One row group per swept value, computed in parallel and emitted in input order.
fn sweep(
    cmd: Command,
    cfg: &ScenarioConfig,
    scheme: &Scheme,
    out: &mut String,
) -> Result<(), CliError> {
    let sw = cfg.run.sweep.as_ref().expect("sweep present");
    let basis = scheme.basis();
    let n = basis.len();
    let rows: Vec<Vec<Vec<String>>> = sw
        .values
        .par_iter()
        .map(|&v| -> Result<Vec<Vec<String>>, CliError> {
            let env = cfg
                .environment
                .with_parameter(sw.parameter, v)
                .map_err(|e| CliError::Config(ConfigError::bare(e)))?;
            let a = assemble(cfg, &env, scheme)?;
            let value = num(v);
            match cmd {
                Command::Rates => {
                    let cell = |x: Option<f64>| x.map(num).unwrap_or_else(|| "undefined".into());
                    let mut rows = Vec::new();
                    let mut sets = vec![("relaxation", &a.relaxation)];
                    if let Some(s) = &a.stimulated {
                        sets.push(("stimulated", s));
                    }
                    for (kind, set) in sets {
                        for p in interference_report(set).pairs {
                            rows.push(vec![
                                value.clone(),
                                kind.to_string(),
                                p.first.to_string(),
                                p.second.to_string(),
                                cell(p.p),
                                cell(p.magnitude),
                            ]);
                        }
                    }
                    Ok(rows)
                }
                _ => {
                    let ls = superoperators(cfg, &a, &basis)?;
                    let h = hamiltonian(cfg, scheme);
                    let rho = if cmd == Command::Evolve {
                        let rho0 = initial_state(cfg, &basis)?;
                        propagate(&rho0, &h, &ls, cfg.run.t_final, cfg.run.dt, cfg.run.stride)?
                            .last()
                            .clone()
                    } else {
                        steady_state(&h, &ls)?
                    };
                    let mut row = vec![value];
                    row.extend(rho.populations().into_iter().map(num));
                    row.push(num(rho.trace().re));
                    Ok(vec![row])
                }
            }
        })
        .collect::<Result<_, _>>()?;
    let name = sw.parameter.name();
    let mut head: Vec<String> = vec![name.to_string()];
    if cmd == Command::Rates {
        head.extend(["rates", "first", "second", "p", "abs_p"].map(String::from));
    } else {
        basis_legend(&basis, out);
        head.extend((0..n).map(|i| format!("p_{i}")));
        head.push("trace".into());
        if cmd == Command::Evolve {
            let _ = writeln!(out, "# populations at t = {:e}", cfg.run.t_final);
        }
    }
    let body = csv_text(|w| {
        w.write_record(&head)?;
        for group in &rows {
            for r in group {
                w.write_record(r)?;
            }
        }
        Ok(())
    })?;
    out.push_str(&body);
    Ok(())
}
