use std::f64::consts::PI;

use beating_core::ResonantSet;
use beating_lab::formats::{
    parse_float_list, parse_int_list, read_csv, read_json, write_diagnostics_csv, write_json, DiagnosticRow,
    SetJson, SnapshotJson,
};
use beating_lab::solver::{initial_theorem1, raw_phi0, FieldState, GridSpec, Solver, SolverConfig};
use num_complex::Complex64;
use proptest::prelude::*;
use tempfile::TempDir;

fn grid() -> GridSpec {
    GridSpec::new(16, 4).unwrap()
}

fn random_state() -> impl Strategy<Value = FieldState> {
    prop::collection::vec((0.0f64..0.5, -PI..PI), 16).prop_map(|cs| {
        let mut s = FieldState::zeros(grid());
        for (j, (r, t)) in grid().modes().zip(cs) {
            s.set(j, Complex64::from_polar(r, t)).unwrap();
        }
        s
    })
}

fn wide() -> GridSpec {
    GridSpec::new(64, 4).unwrap()
}

/// Random actions at the theorem scale and random phases on the four modes of a resonant set.
fn resonant_data() -> impl Strategy<Value = FieldState> {
    (prop::array::uniform4(0.05f64..0.5), prop::array::uniform4(-PI..PI), 0usize..3).prop_map(|(a, t, which)| {
        let set = [(-2, 1), (-1, 2), (-1, 1)][which];
        let set = ResonantSet::new(set.0, set.1).unwrap();
        let mut s = FieldState::zeros(wide());
        for ((j, a), t) in set.modes().into_iter().zip(a).zip(t) {
            s.set(j, Complex64::from_polar(a.sqrt(), t)).unwrap();
        }
        s
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Mass and momentum hold while the spectrum stays resolved on the grid.
    #[test]
    fn split_step_conserves_mass_and_momentum(mut s in resonant_data(), sign in prop_oneof![Just(1.0), Just(-1.0)]) {
        let (m0, p0) = (s.mass(), s.momentum());
        let mut solver = Solver::new(SolverConfig::new(0.01, sign, 2e-3, wide()).unwrap());
        for _ in 0..2000 {
            solver.step(&mut s);
        }
        let (dm, dp) = ((s.mass() - m0).abs() / m0, (s.momentum() - p0).abs() / m0);
        prop_assert!(dm <= 1e-10 && dp <= 1e-10, "mass {dm:e} momentum {dp:e} tail {:e}", s.iter().filter(|(j, _)| j.abs() > 20).map(|(_, z)| z.norm_sqr()).sum::<f64>());
    }

    #[test]
    fn split_step_energy_is_second_order(s in resonant_data()) {
        let run = |dt: f64, n: usize| {
            let mut st = s.clone();
            let mut solver = Solver::new(SolverConfig::new(0.05, 1.0, dt, wide()).unwrap());
            let e0 = solver.energy(&st);
            for _ in 0..n {
                solver.step(&mut st);
            }
            (solver.energy(&st) - e0).abs()
        };
        let (coarse, fine) = (run(8e-3, 250), run(2e-3, 1000));
        prop_assert!(fine <= coarse / 8.0 + 1e-13, "coarse {coarse:e} fine {fine:e}");
    }

    #[test]
    fn free_flow_keeps_moduli(mut s in random_state(), n in 1usize..500) {
        let before: Vec<f64> = s.iter().map(|(_, z)| z.norm()).collect();
        let mut solver = Solver::new(SolverConfig::new(0.0, 1.0, 1e-2, grid()).unwrap());
        for _ in 0..n {
            solver.step(&mut s);
        }
        for ((_, z), b) in s.iter().zip(before) {
            prop_assert!((z.norm() - b).abs() <= 1e-15);
        }
    }

    #[test]
    fn phi0_is_invariant_under_gauge_and_translation(k0 in 0.05f64..0.95, a in -PI..PI, x in -PI..PI) {
        let set = ResonantSet::new(-2, 1).unwrap();
        let s = initial_theorem1(grid(), &set, k0).unwrap();
        let mut moved = FieldState::zeros(grid());
        for (j, z) in s.iter() {
            moved.set(j, z * Complex64::from_polar(1.0, a + j as f64 * x)).unwrap();
        }
        let (p, q) = (raw_phi0(&s, &set).unwrap(), raw_phi0(&moved, &set).unwrap());
        let d = (p - q).rem_euclid(PI);
        prop_assert!(d.min(PI - d) < 1e-12);
    }

    #[test]
    fn snapshot_round_trip(mut s in random_state(), t in 0.0f64..100.0) {
        s.t = t;
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("s.json");
        write_json(&path, &SnapshotJson::from(&s)).unwrap();
        let back = read_json::<SnapshotJson>(&path).unwrap().to_state(grid()).unwrap();
        prop_assert_eq!(back.t, s.t);
        for (j, z) in s.iter() {
            prop_assert_eq!(back.coeff(j), z);
        }
    }

    #[test]
    fn set_json_round_trip(n in -50i64..50, k in prop_oneof![-20i64..=-1, 1i64..=20]) {
        let set = ResonantSet::new(n, k).unwrap();
        let j: SetJson = serde_json::from_str(&serde_json::to_string(&SetJson::from(&set)).unwrap()).unwrap();
        prop_assert_eq!(ResonantSet::try_from(j).unwrap(), set);
    }

    #[test]
    fn list_parsing_round_trip(v in prop::collection::vec(any::<i64>(), 1..8), f in prop::collection::vec(-1e6f64..1e6, 1..8)) {
        let text = v.iter().map(i64::to_string).collect::<Vec<_>>().join(",");
        prop_assert_eq!(parse_int_list(&text).unwrap(), v);
        let text = f.iter().map(f64::to_string).collect::<Vec<_>>().join(", ");
        prop_assert_eq!(parse_float_list(&text).unwrap(), f);
    }
}

#[test]
fn diagnostics_csv_round_trip() {
    let set = ResonantSet::new(-2, 1).unwrap();
    let mut s = initial_theorem1(grid(), &set, 0.3).unwrap();
    let mut solver = Solver::new(SolverConfig::new(0.1, 1.0, 1e-2, grid()).unwrap());
    let samples = solver.evolve(&mut s, &set, 1.0, 10).unwrap();
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("d.csv");
    write_diagnostics_csv(&path, &samples).unwrap();
    let header = std::fs::read_to_string(&path).unwrap().lines().next().unwrap().to_owned();
    assert_eq!(header, "t,I_a1,I_a2,I_b1,I_b2,K0,K1,K2,Khalf,phi0,mass,momentum,energy,Hs2,Hs4");
    let rows: Vec<DiagnosticRow> = read_csv(&path).unwrap();
    assert_eq!(rows.len(), samples.len());
    for (r, s) in rows.iter().zip(&samples) {
        assert_eq!(*r, DiagnosticRow::from(s));
    }
}
