//! The five subcommands. Each writes its files under `out` and returns a serialisable
//! report; a violated check is reported as [`LabError::Check`].

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use beating_core::normal_form::{
    decompose_z6, external_slots, w4k_closed, w4k_direct, z4_closed, z4_direct, z6_direct, z6i_closed,
    z6i_direct, ActionMap, ModeSpectrum,
};
use beating_core::reduced::{
    action_integral, equilibria, half_period, hstar, integrate_orbit, kappa_star, level_set_at, phase_return,
    separatrix_level, separatrix_points, RegimeParams, ReducedState,
};
use beating_core::resonance::{
    enumerate_resonances, external_pairs, minimal_supports, recognize_resonant_set, same_side_completion,
};
use beating_core::{ResonanceTuple, ResonantSet};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::formats::{
    monomials_json, tuple_json, write_diagnostics_csv, write_json, write_level_csv, write_orbit_csv, SetJson,
    SnapshotJson, TermJson,
};
use crate::solver::{GridSpec, Solver, SolverConfig};
use crate::verify::{predict, verify, Scenario, TimeAlignment, VerifyParams, VerifyReport};

fn ensure_dir(out: &Path) -> Result<()> {
    fs::create_dir_all(out).map_err(LabError::io(out))
}

/// A resonant set from its four modes, in any order.
pub fn set_from_modes(modes: &[i64]) -> Result<ResonantSet> {
    let distinct: BTreeSet<i64> = modes.iter().copied().collect();
    if modes.len() != 4 || distinct.len() != 4 {
        return Err(LabError::Config(format!("a resonant set needs four distinct modes, got {modes:?}")));
    }
    match recognize_resonant_set(modes)? {
        Some((n, k)) => Ok(ResonantSet::new(n, k)?),
        None => Err(LabError::Config(format!("{modes:?} is not of the form {{n, n+k, n+3k, n+4k}}"))),
    }
}

/// Every choice of three `ξ` modes and one `η` mode in the set completes inside it.
fn closure_holds(set: &ResonantSet) -> Result<bool> {
    let m = set.modes();
    for &j1 in &m {
        for &j2 in &m {
            for &j3 in &m {
                for &l1 in &m {
                    for (p1, p2) in same_side_completion(set, [j1, j2, j3], l1)? {
                        if !set.contains(p1) || !set.contains(p2) {
                            return Ok(false);
                        }
                    }
                }
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Serialize)]
pub struct RecognizedSet {
    pub modes: Vec<i64>,
    pub set: Option<SetJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResonancesReport {
    pub bound: i64,
    pub resonance_count: usize,
    pub supports: Vec<Vec<i64>>,
    pub resonant_sets: Vec<SetJson>,
    pub small_support_free: bool,
    pub supports_are_family: bool,
    pub closure_holds: bool,
    pub query: Option<RecognizedSet>,
    pub partner_pairs: Vec<[i64; 6]>,
}

pub fn cmd_resonances(out: &Path, bound: i64, query: Option<&[i64]>) -> Result<ResonancesReport> {
    ensure_dir(out)?;
    let tuples = enumerate_resonances(bound)?;
    let supports = minimal_supports(bound)?;
    let mut sets = Vec::new();
    let mut family = true;
    for s in &supports {
        match recognize_resonant_set(s)? {
            Some((n, k)) if s.len() == 4 => sets.push(ResonantSet::new(n, k)?),
            _ => family = false,
        }
    }
    let small_free = supports.iter().all(|s| s.len() == 4);
    let mut closure = true;
    for set in &sets {
        closure &= closure_holds(set)?;
    }
    let (query, pairs) = match query {
        Some(modes) => {
            let distinct: BTreeSet<i64> = modes.iter().copied().collect();
            if modes.len() != 4 || distinct.len() != 4 {
                return Err(LabError::Config(format!("--set needs four distinct modes, got {modes:?}")));
            }
            let set = recognize_resonant_set(modes)?.map(|(n, k)| ResonantSet::new(n, k)).transpose()?;
            let pairs = set.map(|s| external_pairs(&s).iter().map(|p| tuple_json(&p.tuple())).collect());
            (Some(RecognizedSet { modes: modes.to_vec(), set: set.as_ref().map(SetJson::from) }), pairs.unwrap_or_default())
        }
        None => (None, Vec::new()),
    };
    let report = ResonancesReport {
        bound,
        resonance_count: tuples.len(),
        supports,
        resonant_sets: sets.iter().map(SetJson::from).collect(),
        small_support_free: small_free,
        supports_are_family: family,
        closure_holds: closure,
        query,
        partner_pairs: pairs,
    };
    write_json(&out.join("resonances.json"), &tuples.iter().map(tuple_json).collect::<Vec<_>>())?;
    write_json(&out.join("resonances_report.json"), &report)?;
    if !(small_free && family && closure) {
        return Err(LabError::Check("a resonance lemma is violated; see resonances_report.json".into()));
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct PartCounts {
    pub zi: usize,
    pub ze: usize,
    pub z1: usize,
    pub z2: usize,
    pub z3: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormalFormReport {
    pub set: SetJson,
    pub bound: i64,
    pub counts: PartCounts,
    pub z1_empty: bool,
    pub ze_coefficients: Vec<u64>,
    /// Canonical `Z6,2` classes whose two external modes differ, against the partner-pair algorithm.
    pub z2_matches_partner_pairs: bool,
    pub max_rel_error_z4: f64,
    pub max_rel_error_w4k: f64,
    pub max_rel_error_z6i: f64,
    pub max_rel_error_split: f64,
}

fn random_physical(window: i64, support: &[i64], rng: &mut ChaCha8Rng) -> ModeSpectrum {
    let mut s = ModeSpectrum::symmetric(window);
    for &j in support {
        let a: f64 = rng.gen_range(0.0..1.0);
        s.set_polar(j, a, rng.gen_range(0.0..std::f64::consts::TAU)).expect("mode inside window");
    }
    s
}

fn rel(closed: f64, direct: Complex64) -> f64 {
    (direct - closed).norm() / closed.abs().max(1e-300)
}

pub fn cmd_normalform(out: &Path, set: &ResonantSet, bound: i64, samples: usize, seed: u64) -> Result<NormalFormReport> {
    ensure_dir(out)?;
    if set.max_abs() > bound {
        return Err(LabError::Config(format!("the set needs bound >= {}", set.max_abs())));
    }
    let d = decompose_z6(set, bound)?;
    let canonical = |parts: &[beating_core::normal_form::ResonantMonomial]| -> BTreeSet<ResonanceTuple> {
        parts.iter().map(|m| m.tuple.canonical()).collect()
    };
    let z2 = canonical(&d.two_external);
    let partners: BTreeSet<ResonanceTuple> = external_pairs(set)
        .iter()
        .map(|p| p.tuple())
        .filter(|t| t.j.iter().chain(&t.l).all(|m| m.abs() <= bound))
        .map(|t| t.canonical())
        .collect();
    // Z6,2 classes whose two external slots hold the same mode are not partner pairs.
    let z2_distinct: BTreeSet<ResonanceTuple> = z2
        .into_iter()
        .filter(|t| {
            let ext: BTreeSet<i64> = t.j.iter().chain(&t.l).filter(|m| !set.contains(**m)).copied().collect();
            ext.len() == 2 && external_slots(set, t) == 2
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let window = bound.min(8);
    let (mut e4, mut ew, mut e6, mut es) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let split_window = bound.min(5);
    let split = if split_window == bound { Some(&d) } else { None };
    let small = if split.is_none() { Some(decompose_z6(set, split_window)?) } else { None };
    let split = split.unwrap_or_else(|| small.as_ref().expect("built above"));
    for _ in 0..samples {
        let support: Vec<i64> = (0..5).map(|_| rng.gen_range(-window..=window)).collect();
        let s = random_physical(window, &support, &mut rng);
        let actions: ActionMap = (-window..=window).map(|j| (j, s.action(j).re)).collect();
        e4 = e4.max(rel(z4_closed(&actions), z4_direct(&s, window)));
        e6 = e6.max(rel(z6i_closed(&actions), z6i_direct(&s, window)));
        for &k in &support {
            let c = w4k_closed(&actions, k);
            if c != 0.0 {
                ew = ew.max(rel(c, w4k_direct(&s, k, window)));
            }
        }
        let all: Vec<i64> = (-split_window..=split_window).collect();
        let s = random_physical(split_window, &all, &mut rng);
        let direct = z6_direct(&s, split_window);
        es = es.max((split.evaluate(&s) - direct).norm() / direct.norm().max(1e-300));
    }
    let report = NormalFormReport {
        set: SetJson::from(set),
        bound,
        counts: PartCounts {
            zi: d.actions.len(),
            ze: d.effective.len(),
            z1: d.one_external.len(),
            z2: d.two_external.len(),
            z3: d.three_or_more.len(),
        },
        z1_empty: d.one_external.is_empty(),
        ze_coefficients: d.effective.iter().map(|m| m.multiplicity).collect(),
        z2_matches_partner_pairs: z2_distinct == partners,
        max_rel_error_z4: e4,
        max_rel_error_w4k: ew,
        max_rel_error_z6i: e6,
        max_rel_error_split: es,
    };
    #[derive(Serialize)]
    struct Inventory<'a> {
        set: SetJson,
        bound: i64,
        ze: Vec<TermJson>,
        z2: Vec<TermJson>,
        z1: Vec<TermJson>,
        report: &'a NormalFormReport,
    }
    write_json(
        &out.join("normalform.json"),
        &Inventory {
            set: SetJson::from(set),
            bound,
            ze: monomials_json(&d.effective),
            z2: monomials_json(&d.two_external),
            z1: monomials_json(&d.one_external),
            report: &report,
        },
    )?;
    if !report.z1_empty {
        return Err(LabError::Check("Z6,1 is not empty".into()));
    }
    Ok(report)
}

/// Initial value `K(0)` for the model subcommand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelArgs {
    pub a: f64,
    pub k0: f64,
    pub portrait: bool,
    pub period: bool,
    pub action: bool,
    pub dt: f64,
    pub t_max: Option<f64>,
    pub separatrix_samples: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelReport {
    #[serde(rename = "A")]
    pub a: f64,
    pub k0: f64,
    pub h0: f64,
    pub t_max: f64,
    pub energy_drift: f64,
    pub half_period: Option<f64>,
    pub k_at_half_period: Option<f64>,
    pub symmetry_defect: Option<f64>,
    pub action: Option<f64>,
    pub kappa_star: f64,
    pub separatrix_level: Option<f64>,
    pub separatrix_through_kappa_star: Option<bool>,
    pub equilibria: Vec<(f64, f64)>,
    pub files: Vec<String>,
}

pub fn cmd_model(out: &Path, args: &ModelArgs) -> Result<ModelReport> {
    ensure_dir(out)?;
    let p = RegimeParams::new(args.a)?;
    let s0 = ReducedState::new(0.0, args.k0);
    let h0 = hstar(&s0, &p)?;
    let mut files = Vec::new();

    let (half, k_half) = if args.period {
        let (t, k) = half_period(args.k0, &p)?;
        (Some(t), Some(k))
    } else {
        (None, None)
    };
    let t_max = match args.t_max {
        Some(t) => t,
        None => 2.0 * phase_return(args.k0, &p).map(|r| r.0).unwrap_or(1.0),
    };
    let traj = integrate_orbit(s0, &p, args.dt, t_max)?;
    let path = out.join("orbit.csv");
    write_orbit_csv(&path, &traj.samples)?;
    files.push("orbit.csv".into());

    let level = separatrix_level(&p).ok();
    let mut through = None;
    if args.portrait {
        if let Some(level) = level {
            let sep = separatrix_points(&p, args.separatrix_samples)?;
            write_level_csv(&out.join("separatrix.csv"), &sep.points)?;
            files.push("separatrix.csv".into());
            if p.a() == 0.5 {
                let roots = level_set_at(0.0, &p, level);
                through = Some(roots.iter().any(|k| (k - kappa_star()).abs() < 1e-9));
            }
        }
        // a fan of level sets through (0, K) for K across the strip
        let mut index = Vec::new();
        for (i, k) in (1..10).map(|i| i as f64 / 10.0).enumerate() {
            let Ok(h) = hstar(&ReducedState::new(0.0, k), &p) else { continue };
            let mut pts = Vec::new();
            for n in 0..=180 {
                let phi = -std::f64::consts::FRAC_PI_2 + std::f64::consts::PI * n as f64 / 180.0;
                pts.extend(level_set_at(phi, &p, h).into_iter().map(|k| ReducedState::new(phi, k)));
            }
            let name = format!("portrait_{i:02}.csv");
            write_level_csv(&out.join(&name), &pts)?;
            index.push((name.clone(), h));
            files.push(name);
        }
        write_json(&out.join("portrait_levels.json"), &index)?;
        files.push("portrait_levels.json".into());
    }
    let action = if args.action { Some(action_integral(args.k0, &p)?) } else { None };
    let report = ModelReport {
        a: p.a(),
        k0: args.k0,
        h0,
        t_max,
        energy_drift: traj.max_energy_drift(),
        half_period: half,
        k_at_half_period: k_half,
        symmetry_defect: if p.a() == 0.5 { k_half.map(|k| (args.k0 + k - 1.0).abs()) } else { None },
        action,
        kappa_star: kappa_star(),
        separatrix_level: level,
        separatrix_through_kappa_star: through,
        equilibria: equilibria(&p).iter().map(|s| (s.phi, s.k)).collect(),
        files,
    };
    write_json(&out.join("model_report.json"), &report)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateArgs {
    pub set: ResonantSet,
    pub scenario: Scenario,
    pub nu: f64,
    pub sign: f64,
    pub t_end: Option<f64>,
    pub dt: f64,
    pub n_modes: usize,
    pub pad_factor: usize,
    pub sample_every: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateReport {
    pub set: SetJson,
    pub scenario: Scenario,
    pub nu: f64,
    pub t_end: f64,
    pub steps: u64,
    pub samples: usize,
    pub max_i_a1: f64,
    pub min_i_a1: f64,
    pub mass_drift: f64,
    pub energy_drift: f64,
    pub diagnostics: PathBuf,
    pub snapshot: PathBuf,
}

pub fn cmd_simulate(out: &Path, args: &SimulateArgs) -> Result<SimulateReport> {
    ensure_dir(out)?;
    let grid = GridSpec::new(args.n_modes, args.pad_factor)?;
    let cfg = SolverConfig::new(args.nu, args.sign, args.dt, grid)?;
    let t_end = match args.t_end {
        Some(t) => t,
        None if args.nu > 0.0 => {
            let m = predict(&args.scenario, 1.0)?;
            args.scenario.default_window() * m.t_model / (TimeAlignment::Hamiltonian.factor() * args.nu)
        }
        None => return Err(LabError::Config("--t-end is required when nu = 0".into())),
    };
    let mut state = args.scenario.initial(grid, &args.set)?;
    let samples = Solver::new(cfg).evolve(&mut state, &args.set, t_end, args.sample_every)?;
    let diag = out.join("diagnostics.csv");
    write_diagnostics_csv(&diag, &samples)?;
    let snap = out.join("snapshot.json");
    write_json(&snap, &SnapshotJson::from(&state))?;
    let first = samples[0];
    let fold = |f: fn(f64, f64) -> f64, init: f64| samples.iter().map(|s| s.i_a1).fold(init, f);
    Ok(SimulateReport {
        set: SetJson::from(&args.set),
        scenario: args.scenario,
        nu: args.nu,
        t_end,
        steps: (t_end / args.dt).ceil() as u64,
        samples: samples.len(),
        max_i_a1: fold(f64::max, f64::MIN),
        min_i_a1: fold(f64::min, f64::MAX),
        mass_drift: samples.iter().map(|s| (s.mass - first.mass).abs() / first.mass).fold(0.0, f64::max),
        energy_drift: samples
            .iter()
            .map(|s| (s.energy - first.energy).abs() / first.energy.abs().max(1e-300))
            .fold(0.0, f64::max),
        diagnostics: diag,
        snapshot: snap,
    })
}

pub fn cmd_verify(out: &Path, params: &VerifyParams) -> Result<VerifyReport> {
    ensure_dir(out)?;
    let report = verify(params)?;
    for run in &report.runs {
        write_diagnostics_csv(&out.join(format!("verify_nu_{}.csv", run.nu)), &run.samples)?;
    }
    write_json(&out.join("verify_report.json"), &report)?;
    Ok(report)
}
