//! Argument parsing, config-file merging and report printing for the `beating` binary.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use crate::commands::{
    cmd_model, cmd_normalform, cmd_resonances, cmd_simulate, cmd_verify, set_from_modes, ModelArgs, SimulateArgs,
};
use crate::error::{LabError, Result};
use crate::formats::{parse_float_list, parse_int_list};
use crate::verify::{Scenario, Thresholds, TimeAlignment, VerifyParams};

const DEFAULT_SET: &str = "-2,1,2,-1";

#[derive(Debug, Parser)]
#[command(name = "beating", version, about = "Beating dynamics of the quintic NLS on the circle")]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct Cli {
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for randomised checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// JSON file with defaults for any flag; flags given on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate resonances, classify minimal supports and check closure.
    Resonances(ResonancesOpts),
    /// Split Z6 on a resonant set and cross-check the closed forms.
    Normalform(NormalFormOpts),
    /// Integrate the reduced model and sample its phase portrait.
    Model(ModelOpts),
    /// Run the PDE from theorem data and write diagnostics.
    Simulate(SimulateOpts),
    /// Compare the PDE with the reduced model over a list of ν.
    Verify(VerifyOpts),
}

#[derive(Debug, Args)]
pub struct ResonancesOpts {
    #[arg(long, default_value_t = 20)]
    pub bound: i64,
    /// Four modes to recognise, e.g. "-2,1,2,-1".
    #[arg(long, allow_hyphen_values = true)]
    pub set: Option<String>,
}

#[derive(Debug, Args)]
pub struct NormalFormOpts {
    #[arg(long, allow_hyphen_values = true, default_value = DEFAULT_SET)]
    pub set: String,
    #[arg(long, default_value_t = 12)]
    pub bound: i64,
    /// Random spectra for the closed-form cross-check.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct ModelOpts {
    #[arg(long = "A", alias = "a", default_value_t = 0.5)]
    pub a: f64,
    #[arg(long = "K0", alias = "k0")]
    pub k0: Option<f64>,
    /// Initial `K` in the `A = 4` regime; implies `A = 4` unless `--A` is given.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub portrait: bool,
    #[arg(long)]
    pub period: bool,
    #[arg(long)]
    pub action: bool,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Odd counts include `φ = 0`.
    #[arg(long, default_value_t = 401)]
    pub separatrix_samples: usize,
}

#[derive(Debug, Args)]
pub struct PdeOpts {
    #[arg(long, allow_hyphen_values = true, default_value = DEFAULT_SET)]
    pub set: String,
    /// 1: beating data with `K0`; 2: excitation data with `gamma`.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub theorem: u8,
    #[arg(long = "K0", alias = "k0", default_value_t = 0.2)]
    pub k0: f64,
    #[arg(long, default_value_t = 0.05)]
    pub gamma: f64,
    #[arg(long, default_value_t = 2e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 64)]
    pub n_modes: usize,
    #[arg(long, default_value_t = 4)]
    pub pad_factor: usize,
    #[arg(long, default_value_t = 5)]
    pub sample_every: usize,
}

impl PdeOpts {
    fn scenario(&self) -> Scenario {
        match self.theorem {
            1 => Scenario::Beating { k0: self.k0 },
            _ => Scenario::Excitation { gamma: self.gamma },
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateOpts {
    #[command(flatten)]
    pub pde: PdeOpts,
    #[arg(long, default_value_t = 0.01)]
    pub nu: f64,
    /// +1 defocusing, -1 focusing.
    #[arg(long, default_value_t = 1.0)]
    pub sign: f64,
    /// Final time; defaults to the verification window for the scenario.
    #[arg(long)]
    pub t_end: Option<f64>,
}

#[derive(Debug, Args)]
pub struct VerifyOpts {
    #[command(flatten)]
    pub pde: PdeOpts,
    /// Comma-separated list of ν.
    #[arg(long, default_value = "0.04,0.01")]
    pub nus: String,
    /// PDE window in model half periods.
    #[arg(long)]
    pub window: Option<f64>,
    /// `hamiltonian` (τ = νt/3) or `literal` (τ = νt).
    #[arg(long, default_value = "hamiltonian")]
    pub alignment: String,
    #[arg(long, default_value_t = 0.05)]
    pub beating_margin: f64,
    #[arg(long, default_value_t = 0.02)]
    pub k_drift: f64,
}

fn config_value(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Array(items) => items.iter().map(config_value).collect::<Option<Vec<_>>>().map(|v| v.join(",")),
        _ => None,
    }
}

/// Turns config entries into `--key value` pairs for the flags `sub` accepts.
fn config_args(path: &Path, sub: &str) -> Result<(Vec<String>, Vec<String>)> {
    let text = std::fs::read_to_string(path).map_err(LabError::io(path))?;
    let Value::Object(map) = serde_json::from_str::<Value>(&text)? else {
        return Err(LabError::Config(format!("{}: expected a JSON object", path.display())));
    };
    let root = Cli::command();
    let globals: Vec<String> = root.get_arguments().filter_map(|a| a.get_long().map(str::to_owned)).collect();
    let locals: Vec<String> = root
        .find_subcommand(sub)
        .map(|c| {
            c.get_arguments()
                .flat_map(|a| a.get_long().into_iter().chain(a.get_all_aliases().into_iter().flatten()))
                .map(str::to_owned)
                .collect()
        })
        .unwrap_or_default();
    let (mut global, mut local) = (Vec::new(), Vec::new());
    for (key, value) in &map {
        let key = key.replace('_', "-");
        if key == "config" {
            continue;
        }
        let target = if globals.contains(&key) {
            &mut global
        } else if locals.contains(&key) {
            &mut local
        } else {
            continue;
        };
        match value {
            Value::Bool(true) => target.push(format!("--{key}")),
            Value::Bool(false) | Value::Null => {}
            v => {
                let s = config_value(v)
                    .ok_or_else(|| LabError::Config(format!("config key {key:?} has an unsupported value")))?;
                target.push(format!("--{key}={s}"));
            }
        }
    }
    Ok((global, local))
}

/// Parses `argv`, folding in the config file so that command-line flags take precedence.
pub fn parse(argv: Vec<OsString>) -> std::result::Result<Cli, clap::Error> {
    let first = Cli::try_parse_from(&argv)?;
    let Some(path) = first.config.clone() else { return Ok(first) };
    let sub = match &first.command {
        Command::Resonances(_) => "resonances",
        Command::Normalform(_) => "normalform",
        Command::Model(_) => "model",
        Command::Simulate(_) => "simulate",
        Command::Verify(_) => "verify",
    };
    let (global, local) = config_args(&path, sub)
        .map_err(|e| Cli::command().error(clap::error::ErrorKind::Io, e.to_string()))?;
    let pos = argv.iter().position(|a| a == sub).expect("subcommand was parsed");
    let mut merged: Vec<OsString> = argv[..1].to_vec();
    merged.extend(global.into_iter().map(OsString::from));
    merged.extend(argv[1..=pos].iter().cloned());
    merged.extend(local.into_iter().map(OsString::from));
    merged.extend(argv[pos + 1..].iter().cloned());
    let matches = Cli::command().try_get_matches_from(merged)?;
    Cli::from_arg_matches(&matches)
}

fn emit<T: Serialize>(w: &mut dyn Write, json: bool, report: &T, text: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
    let io = |e| LabError::Io { path: "<stdout>".into(), source: e };
    if json {
        let s = serde_json::to_string_pretty(report)?;
        writeln!(w, "{s}").map_err(io)
    } else {
        text(w).map_err(io)
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli, w: &mut dyn Write) -> Result<i32> {
    let out = cli.out.as_path();
    match &cli.command {
        Command::Resonances(o) => {
            let query = o.set.as_deref().map(parse_int_list).transpose()?;
            let r = cmd_resonances(out, o.bound, query.as_deref())?;
            emit(w, cli.json, &r, |w| {
                writeln!(w, "bound {}: {} resonance tuples", r.bound, r.resonance_count)?;
                writeln!(w, "minimal supports: {}", r.supports.len())?;
                for s in &r.resonant_sets {
                    writeln!(w, "  (n, k) = ({}, {})  a2={} b1={} a1={} b2={}", s.n, s.k, s.modes.a2, s.modes.b1, s.modes.a1, s.modes.b2)?;
                }
                writeln!(w, "no support of size <= 3: {}", r.small_support_free)?;
                writeln!(w, "supports form the family: {}", r.supports_are_family)?;
                writeln!(w, "closure: {}", r.closure_holds)?;
                if let Some(q) = &r.query {
                    match &q.set {
                        Some(s) => writeln!(w, "{:?} is resonant with (n, k) = ({}, {})", q.modes, s.n, s.k)?,
                        None => writeln!(w, "{:?} is not a resonant set", q.modes)?,
                    }
                    for p in &r.partner_pairs {
                        writeln!(w, "  partner {p:?}")?;
                    }
                }
                Ok(())
            })?;
            Ok(0)
        }
        Command::Normalform(o) => {
            let set = set_from_modes(&parse_int_list(&o.set)?)?;
            let r = cmd_normalform(out, &set, o.bound, o.samples, cli.seed)?;
            emit(w, cli.json, &r, |w| {
                let c = &r.counts;
                writeln!(w, "set (n, k) = ({}, {}), bound {}", r.set.n, r.set.k, r.bound)?;
                writeln!(w, "classes: Zi {} Ze {} Z1 {} Z2 {} Z3 {}", c.zi, c.ze, c.z1, c.z2, c.z3)?;
                writeln!(w, "Ze multiplicities: {:?}", r.ze_coefficients)?;
                writeln!(w, "Z1 empty: {}", r.z1_empty)?;
                writeln!(w, "Z2 matches partner pairs: {}", r.z2_matches_partner_pairs)?;
                writeln!(
                    w,
                    "max rel error: z4 {:.3e} w4k {:.3e} z6i {:.3e} split {:.3e}",
                    r.max_rel_error_z4, r.max_rel_error_w4k, r.max_rel_error_z6i, r.max_rel_error_split
                )
            })?;
            Ok(0)
        }
        Command::Model(o) => {
            let a = if o.gamma.is_some() && o.a == 0.5 && o.k0.is_none() { 4.0 } else { o.a };
            let k0 = o.k0.or(o.gamma).unwrap_or(0.3);
            let args = ModelArgs {
                a,
                k0,
                portrait: o.portrait,
                period: o.period,
                action: o.action,
                dt: o.dt,
                t_max: o.t_max,
                separatrix_samples: o.separatrix_samples,
            };
            let r = cmd_model(out, &args)?;
            emit(w, cli.json, &r, |w| {
                writeln!(w, "A = {}, K0 = {}, H = {:.12}", r.a, r.k0, r.h0)?;
                writeln!(w, "orbit to t = {:.6}, energy drift {:.3e}", r.t_max, r.energy_drift)?;
                if let (Some(t), Some(k)) = (r.half_period, r.k_at_half_period) {
                    writeln!(w, "T = {t:.10}, K(T) = {k:.10}")?;
                }
                if let Some(d) = r.symmetry_defect {
                    writeln!(w, "|K(0) + K(T) - 1| = {d:.3e}")?;
                }
                if let Some(j) = r.action {
                    writeln!(w, "action = {j:.10}")?;
                }
                writeln!(w, "kappa* = {:.12}", r.kappa_star)?;
                if let Some(l) = r.separatrix_level {
                    writeln!(w, "separatrix level = {l}")?;
                }
                if let Some(b) = r.separatrix_through_kappa_star {
                    writeln!(w, "separatrix passes through (0, kappa*): {b}")?;
                }
                Ok(())
            })?;
            Ok(0)
        }
        Command::Simulate(o) => {
            let args = SimulateArgs {
                set: set_from_modes(&parse_int_list(&o.pde.set)?)?,
                scenario: o.pde.scenario(),
                nu: o.nu,
                sign: o.sign,
                t_end: o.t_end,
                dt: o.pde.dt,
                n_modes: o.pde.n_modes,
                pad_factor: o.pde.pad_factor,
                sample_every: o.pde.sample_every,
            };
            let r = cmd_simulate(out, &args)?;
            emit(w, cli.json, &r, |w| {
                writeln!(w, "nu = {}, t_end = {:.6}, {} samples", r.nu, r.t_end, r.samples)?;
                writeln!(w, "|u_a1|^2 in [{:.6}, {:.6}]", r.min_i_a1, r.max_i_a1)?;
                writeln!(w, "mass drift {:.3e}, energy drift {:.3e}", r.mass_drift, r.energy_drift)?;
                writeln!(w, "wrote {} and {}", r.diagnostics.display(), r.snapshot.display())
            })?;
            Ok(0)
        }
        Command::Verify(o) => {
            let set = set_from_modes(&parse_int_list(&o.pde.set)?)?;
            let scenario = o.pde.scenario();
            let mut p = VerifyParams::new(set, scenario, parse_float_list(&o.nus)?);
            p.n_modes = o.pde.n_modes;
            p.pad_factor = o.pde.pad_factor;
            p.dt = o.pde.dt;
            p.sample_every = o.pde.sample_every;
            p.window = o.window.unwrap_or(scenario.default_window());
            p.alignment = TimeAlignment::parse(&o.alignment)?;
            p.thresholds = Thresholds { beating_margin: o.beating_margin, k_drift: o.k_drift, ..Thresholds::default() };
            let r = cmd_verify(out, &p)?;
            emit(w, cli.json, &r, |w| {
                writeln!(w, "T_model = {:.10}, K(T) = {:.6}, extreme K = {:.6}", r.t_model, r.k_at_t_model, r.k_extreme)?;
                for run in &r.runs {
                    writeln!(
                        w,
                        "nu {:<8} t_max {:>10.3} dev {:.4e} |u_a1|^2 [{:.4}, {:.4}] drift m {:.1e} p {:.1e} e {:.1e} K {:.1e}",
                        run.nu,
                        run.t_max,
                        run.max_deviation,
                        run.min_i_a1,
                        run.max_i_a1,
                        run.mass_drift,
                        run.momentum_drift,
                        run.energy_drift,
                        run.k_drifts.iter().copied().fold(0.0, f64::max)
                    )?;
                }
                let v = &r.verdict;
                writeln!(
                    w,
                    "beating {} monotone {} conservation {} => {}",
                    v.beating,
                    v.monotone_deviation,
                    v.conservation,
                    if v.passed { "PASS" } else { "FAIL" }
                )
            })?;
            Ok(if r.verdict.passed { 0 } else { 1 })
        }
    }
}

/// Entry point shared by the binary and the tests.
pub fn main_with(argv: Vec<OsString>, w: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match parse(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return e.exit_code();
        }
    };
    match run(&cli, w) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                LabError::Check(_) => 1,
                _ => 2,
            }
        }
    }
}
