//! JSON and CSV encodings of sets, tuples, polynomials, snapshots, orbits and
//! diagnostic series. Floats are written in shortest round-trip form.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use beating_core::normal_form::{ResonantMonomial, SparsePolynomial};
use beating_core::reduced::{OrbitSample, ReducedState};
use beating_core::{ResonanceTuple, ResonantSet};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::solver::{DiagnosticSample, FieldState, GridSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetModes {
    pub a2: i64,
    pub a1: i64,
    pub b2: i64,
    pub b1: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetJson {
    pub n: i64,
    pub k: i64,
    pub modes: SetModes,
}

impl From<&ResonantSet> for SetJson {
    fn from(s: &ResonantSet) -> Self {
        Self { n: s.n(), k: s.k(), modes: SetModes { a2: s.a2(), a1: s.a1(), b2: s.b2(), b1: s.b1() } }
    }
}

impl TryFrom<SetJson> for ResonantSet {
    type Error = LabError;

    fn try_from(v: SetJson) -> Result<Self> {
        let set = ResonantSet::new(v.n, v.k)?;
        if SetJson::from(&set) != v {
            return Err(LabError::Config("mode roles disagree with (n, k)".into()));
        }
        Ok(set)
    }
}

pub fn tuple_json(t: &ResonanceTuple) -> [i64; 6] {
    t.to_array()
}

/// One monomial: `coeff` per ordered index tuple, `multiplicity` ordered tuples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: [f64; 2],
    pub multiplicity: u64,
    pub xi_exponents: BTreeMap<i64, u32>,
    pub eta_exponents: BTreeMap<i64, u32>,
}

fn ratio(r: &num_rational::Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn polynomial_json(p: &SparsePolynomial) -> Vec<TermJson> {
    p.terms()
        .map(|(m, c)| {
            let mult = m.orderings();
            TermJson {
                coeff: [ratio(&c.re) / mult as f64, ratio(&c.im) / mult as f64],
                multiplicity: mult,
                xi_exponents: m.xi_exponents().clone(),
                eta_exponents: m.eta_exponents().clone(),
            }
        })
        .collect()
}

pub fn monomials_json(parts: &[ResonantMonomial]) -> Vec<TermJson> {
    parts
        .iter()
        .map(|m| {
            let mut xi = BTreeMap::new();
            let mut eta = BTreeMap::new();
            m.tuple.j.iter().for_each(|j| *xi.entry(*j).or_insert(0) += 1);
            m.tuple.l.iter().for_each(|l| *eta.entry(*l).or_insert(0) += 1);
            TermJson { coeff: [1.0, 0.0], multiplicity: m.multiplicity, xi_exponents: xi, eta_exponents: eta }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotJson {
    pub t: f64,
    pub modes: Vec<(i64, f64, f64)>,
}

impl From<&FieldState> for SnapshotJson {
    fn from(s: &FieldState) -> Self {
        Self { t: s.t, modes: s.iter().map(|(j, z)| (j, z.re, z.im)).collect() }
    }
}

impl SnapshotJson {
    pub fn to_state(&self, grid: GridSpec) -> Result<FieldState> {
        let mut s = FieldState::zeros(grid);
        s.t = self.t;
        for &(j, re, im) in &self.modes {
            s.set(j, Complex64::new(re, im))?;
        }
        Ok(s)
    }
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(LabError::io(path))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(LabError::io(path))?;
    Ok(serde_json::from_str(&text)?)
}

fn csv_error(path: &Path) -> impl Fn(csv::Error) -> LabError + '_ {
    move |e| LabError::Io { path: path.into(), source: std::io::Error::other(e) }
}

fn write_rows<R: Serialize>(path: &Path, rows: impl IntoIterator<Item = R>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error(path))?;
    for r in rows {
        w.serialize(r).map_err(csv_error(path))?;
    }
    w.flush().map_err(LabError::io(path))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitRow {
    pub t: f64,
    pub phi: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "H")]
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelRow {
    pub phi: f64,
    #[serde(rename = "K")]
    pub k: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRow {
    pub t: f64,
    #[serde(rename = "I_a1")]
    pub i_a1: f64,
    #[serde(rename = "I_a2")]
    pub i_a2: f64,
    #[serde(rename = "I_b1")]
    pub i_b1: f64,
    #[serde(rename = "I_b2")]
    pub i_b2: f64,
    #[serde(rename = "K0")]
    pub k0: f64,
    #[serde(rename = "K1")]
    pub k1: f64,
    #[serde(rename = "K2")]
    pub k2: f64,
    #[serde(rename = "Khalf")]
    pub khalf: f64,
    pub phi0: Option<f64>,
    pub mass: f64,
    pub momentum: f64,
    pub energy: f64,
    #[serde(rename = "Hs2")]
    pub hs2: f64,
    #[serde(rename = "Hs4")]
    pub hs4: f64,
}

impl From<&DiagnosticSample> for DiagnosticRow {
    fn from(d: &DiagnosticSample) -> Self {
        Self {
            t: d.t,
            i_a1: d.i_a1,
            i_a2: d.i_a2,
            i_b1: d.i_b1,
            i_b2: d.i_b2,
            k0: d.k0,
            k1: d.k1,
            k2: d.k2,
            khalf: d.khalf,
            phi0: d.phi0,
            mass: d.mass,
            momentum: d.momentum,
            energy: d.energy,
            hs2: d.hs2,
            hs4: d.hs4,
        }
    }
}

pub fn write_orbit_csv(path: &Path, samples: &[OrbitSample]) -> Result<()> {
    write_rows(path, samples.iter().map(|s| OrbitRow { t: s.t, phi: s.state.phi, k: s.state.k, h: s.h }))
}

pub fn write_level_csv(path: &Path, points: &[ReducedState]) -> Result<()> {
    write_rows(path, points.iter().map(|s| LevelRow { phi: s.phi, k: s.k }))
}

pub fn write_diagnostics_csv(path: &Path, samples: &[DiagnosticSample]) -> Result<()> {
    write_rows(path, samples.iter().map(DiagnosticRow::from))
}

pub fn read_csv<R: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<R>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_error(path))?;
    r.deserialize().collect::<std::result::Result<Vec<R>, _>>().map_err(csv_error(path))
}

/// Writes free-form text, creating the file.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = fs::File::create(path).map_err(LabError::io(path))?;
    f.write_all(text.as_bytes()).map_err(LabError::io(path))
}

/// Parses `"a,b,c"` into integers.
pub fn parse_int_list(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|p| p.trim().parse::<i64>().map_err(|e| LabError::Config(format!("bad integer {p:?}: {e}"))))
        .collect()
}

pub fn parse_float_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| LabError::Config(format!("bad number {p:?}: {e}"))))
        .collect()
}
