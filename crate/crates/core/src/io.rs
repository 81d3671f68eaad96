//! File formats: CSV tables and JSON documents for pairs, tunneling
//! solutions, range experiments and the Hermite validation table.
//!
//! Floats are written in shortest round-trip form, so every file read back
//! reproduces the values bit for bit.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::Grid;
use crate::range_relations::RangeExperimentResult;
use crate::tdho_core::{GeneratedPair, HermitePair, OscillatorState};
use crate::tunneling::{ClassicalAnalog, TunnelSolution};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unrecognized file: {0}")]
    Format(String),
}

fn open(path: &Path) -> Result<File, IoError> {
    File::open(path).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn create(path: &Path) -> Result<File, IoError> {
    File::create(path).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub const PAIR_HEADER: [&str; 8] = [
    "t",
    "x",
    "xdot",
    "rho",
    "theta",
    "omega_inst",
    "omega_sq",
    "e_tk",
];
pub const TUNNEL_HEADER: [&str; 9] = [
    "x",
    "re_psi",
    "im_psi",
    "re_dpsi",
    "im_dpsi",
    "density",
    "theta",
    "u_bar",
    "omega_bar_sq",
];
pub const CELLS_HEADER: [&str; 7] = [
    "theta0",
    "T",
    "delta_e_tk",
    "delta_x",
    "delta_p",
    "norm_energy_product",
    "norm_xp_product",
];
pub const SUMMARY_HEADER: [&str; 6] = [
    "T",
    "Delta_E_TK",
    "Delta_X",
    "Delta_P",
    "norm_energy_product",
    "norm_xp_product",
];
pub const HERMITE_HEADER: [&str; 5] = ["n", "t", "value", "deriv", "omega_sq"];
pub const ANALOG_HEADER: [&str; 6] = ["t_bar", "time", "x1", "x2", "omega_bar_sq", "wronskian"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TunnelRow {
    pub x: f64,
    pub re_psi: f64,
    pub im_psi: f64,
    pub re_dpsi: f64,
    pub im_dpsi: f64,
    pub density: f64,
    pub theta: f64,
    pub u_bar: f64,
    pub omega_bar_sq: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellRow {
    pub theta0: f64,
    #[serde(rename = "T")]
    pub t_cap: f64,
    pub delta_e_tk: f64,
    pub delta_x: f64,
    pub delta_p: f64,
    pub norm_energy_product: f64,
    pub norm_xp_product: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    #[serde(rename = "T")]
    pub t_cap: f64,
    #[serde(rename = "Delta_E_TK")]
    pub delta_e_tk: f64,
    #[serde(rename = "Delta_X")]
    pub delta_x: f64,
    #[serde(rename = "Delta_P")]
    pub delta_p: f64,
    pub norm_energy_product: f64,
    pub norm_xp_product: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HermiteRow {
    pub n: u32,
    pub t: f64,
    pub value: f64,
    pub deriv: f64,
    pub omega_sq: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalogRow {
    pub t_bar: f64,
    pub time: f64,
    pub x1: f64,
    pub x2: f64,
    pub omega_bar_sq: f64,
    pub wronskian: f64,
}

/// JSON form of a generated pair; the phase source allows an exact replay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairDocument {
    pub phase_source: String,
    pub variable: String,
    pub l_tilde: f64,
    pub mass: f64,
    pub grid: Grid,
    pub samples: Vec<OscillatorState>,
}

impl PairDocument {
    pub fn from_pair(pair: &GeneratedPair) -> Self {
        Self {
            phase_source: pair.phase.to_text(),
            variable: pair.phase.variable().to_string(),
            l_tilde: pair.l_tilde,
            mass: pair.mass,
            grid: pair.grid,
            samples: pair.samples.clone(),
        }
    }
}

pub fn write_rows<W: Write, T: Serialize>(
    writer: W,
    rows: impl IntoIterator<Item = T>,
) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|source| IoError::Io {
        path: "<csv>".into(),
        source,
    })?;
    Ok(())
}

pub fn read_rows<R: Read, T: DeserializeOwned>(
    reader: R,
    header: &[&str],
) -> Result<Vec<T>, IoError> {
    let mut r = csv::Reader::from_reader(reader);
    let found: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if found != header {
        return Err(IoError::Format(format!(
            "expected header {}, found {}",
            header.join(","),
            found.join(",")
        )));
    }
    r.deserialize()
        .map(|row| row.map_err(IoError::from))
        .collect()
}

pub fn write_csv_file<T: Serialize>(
    path: &Path,
    rows: impl IntoIterator<Item = T>,
) -> Result<(), IoError> {
    write_rows(create(path)?, rows)
}

pub fn read_csv_file<T: DeserializeOwned>(path: &Path, header: &[&str]) -> Result<Vec<T>, IoError> {
    read_rows(BufReader::new(open(path)?), header)
}

pub fn write_json_file<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut f = create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n").map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(())
}

pub fn read_json_file<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    Ok(serde_json::from_reader(BufReader::new(open(path)?))?)
}

pub fn tunnel_rows(sol: &TunnelSolution) -> impl Iterator<Item = TunnelRow> + '_ {
    (0..sol.len()).map(|i| TunnelRow {
        x: sol.grid[i],
        re_psi: sol.psi[i].re,
        im_psi: sol.psi[i].im,
        re_dpsi: sol.dpsi[i].re,
        im_dpsi: sol.dpsi[i].im,
        density: sol.density[i],
        theta: sol.theta[i],
        u_bar: sol.u_bar[i],
        omega_bar_sq: sol.omega_bar_sq[i],
    })
}

pub fn analog_rows(a: &ClassicalAnalog) -> impl Iterator<Item = AnalogRow> + '_ {
    (0..a.t_bar.len()).map(|i| AnalogRow {
        t_bar: a.t_bar[i],
        time: a.time[i],
        x1: a.x1[i],
        x2: a.x2[i],
        omega_bar_sq: a.omega_bar_sq[i],
        wronskian: a.wronskian[i],
    })
}

pub fn cell_rows(res: &RangeExperimentResult) -> impl Iterator<Item = CellRow> + '_ {
    res.cells.iter().map(|c| CellRow {
        theta0: c.theta0,
        t_cap: c.t_cap,
        delta_e_tk: c.delta_e_tk,
        delta_x: c.delta_x,
        delta_p: c.delta_p,
        norm_energy_product: c.norm_energy_product,
        norm_xp_product: c.norm_xp_product,
    })
}

pub fn summary_rows(res: &RangeExperimentResult) -> impl Iterator<Item = SummaryRow> + '_ {
    res.summary.iter().map(|s| SummaryRow {
        t_cap: s.t_cap,
        delta_e_tk: s.delta_e_tk,
        delta_x: s.delta_x,
        delta_p: s.delta_p,
        norm_energy_product: s.norm_energy_product,
        norm_xp_product: s.norm_xp_product,
    })
}

pub fn hermite_rows(orders: &[HermitePair], grid: Grid) -> Vec<HermiteRow> {
    orders
        .iter()
        .flat_map(|h| {
            grid.points().map(move |t| HermiteRow {
                n: h.n,
                t,
                value: h.solution(t),
                deriv: h.derivative(t),
                omega_sq: h.omega_sq(t),
            })
        })
        .collect()
}

/// File kinds recognized by [`detect_kind`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileKind {
    PairCsv,
    PairJson,
    TunnelCsv,
    RangeCells,
    RangeSummary,
    HermiteTable,
    AnalogCsv,
}

/// Sniffs the first line: a JSON object or one of the known CSV headers.
pub fn detect_kind(path: &Path) -> Result<FileKind, IoError> {
    let mut first = String::new();
    BufReader::new(open(path)?)
        .read_line(&mut first)
        .map_err(|source| IoError::Io {
            path: path.display().to_string(),
            source,
        })?;
    let line = first.trim();
    if line.starts_with('{') {
        return Ok(FileKind::PairJson);
    }
    let cols: Vec<&str> = line.split(',').map(str::trim).collect();
    let kinds: [(&[&str], FileKind); 6] = [
        (&PAIR_HEADER, FileKind::PairCsv),
        (&TUNNEL_HEADER, FileKind::TunnelCsv),
        (&CELLS_HEADER, FileKind::RangeCells),
        (&SUMMARY_HEADER, FileKind::RangeSummary),
        (&HERMITE_HEADER, FileKind::HermiteTable),
        (&ANALOG_HEADER, FileKind::AnalogCsv),
    ];
    kinds
        .iter()
        .find(|(h, _)| *h == cols.as_slice())
        .map(|(_, k)| *k)
        .ok_or_else(|| IoError::Format(format!("{}: unknown header '{line}'", path.display())))
}
