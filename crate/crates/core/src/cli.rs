//! Command-line frontend. Every subcommand returns the text it would print, so
//! the binary is a thin wrapper around [`run`].

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::StateFile;
use crate::measures::{
    eof_pure, fidelity_to_ket, i_concurrence, natural_dimension, normalize_measure, purity, uhlmann_fidelity,
    wootters_concurrence, MeasureName, MeasureValue, StateRef,
};
use crate::states::{make_max_entangled, make_spdc_qudit, make_spdc_qutrit, DensityMatrix, SpdcParams};
use crate::tomography::{
    budget, expected_counts, reconstruct_linear, reconstruct_mle, simulate_counts, standard_settings,
    witness_from_record, MleOptions, SettingsKind, TomographyRecord,
};
use crate::witness::{pconcurrence_known, pconcurrence_search, SearchMode, SubspacePairing, WitnessReport};

/// Default seed for simulated counts.
pub const DEFAULT_SEED: u64 = 1;

#[derive(Parser, Debug)]
#[command(name = "pconc", version, about = "P-concurrence witness, reference measures and simulated tomography")]
pub struct Cli {
    /// Output format for printed results.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    SpdcQutrit,
    MaxEntangled,
    SpdcQudit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Linear,
    Mle,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a state file for one of the built-in families.
    State {
        #[arg(value_enum)]
        family: Family,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 3)]
        d: usize,
        /// Width of the Gaussian OAM spectrum.
        #[arg(long, default_value_t = 1.0)]
        decay: f64,
        /// Store as a density matrix instead of a ket.
        #[arg(long)]
        density: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate one measure on a state file.
    Measure {
        state: PathBuf,
        #[arg(long, default_value = "pconcurrence")]
        measure: String,
        /// Dimension used for normalization (default: smaller side).
        #[arg(long)]
        normalize_dim: Option<usize>,
        #[arg(long, default_value = "known")]
        pairing: String,
    },
    /// Measures of the SPDC qutrit over an (alpha, beta) grid.
    Sweep {
        #[arg(long, default_value_t = 50)]
        grid_n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measures along alpha in [0, 1] with beta = 1.
    Path {
        #[arg(long, default_value_t = 50)]
        grid_n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate coincidence counts for a state file.
    Simulate {
        state: PathBuf,
        #[arg(long, default_value = "pairwise")]
        settings: String,
        #[arg(long, default_value_t = 1e4)]
        rate_hz: f64,
        #[arg(long, default_value_t = 1.0)]
        time_s: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Use rounded expected counts instead of Poisson draws.
        #[arg(long)]
        noiseless: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reconstruct a density matrix from a tomography record.
    Reconstruct {
        record: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Mle)]
        method: Method,
        /// State file to compare the reconstruction against.
        #[arg(long)]
        target: Option<PathBuf>,
        #[arg(long, default_value_t = MleOptions::default().tol)]
        tol: f64,
        #[arg(long, default_value_t = MleOptions::default().max_iter)]
        max_iter: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Subspace table and P-concurrence for a state file or tomography record.
    Witness {
        input: PathBuf,
        /// known, search, brute-force or assignment.
        #[arg(long, default_value = "known")]
        pairing: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measurement count and time: subspace witness vs full tomography.
    Budget {
        #[arg(long, default_value_t = 8)]
        d: usize,
        #[arg(long, default_value_t = 10.0)]
        time_s: f64,
    },
}

/// One point of the SPDC-qutrit sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub beta: f64,
    pub pconcurrence: f64,
    #[serde(rename = "eof_norm")]
    pub eof_normalized: f64,
    #[serde(rename = "iconcurrence_norm")]
    pub iconcurrence_normalized: f64,
}

pub fn sweep_row(alpha: f64, beta: f64) -> Result<SweepRow> {
    let ket = make_spdc_qutrit(SpdcParams::new(alpha, beta)?);
    let pconcurrence = pconcurrence_known(&ket.to_density(), &SubspacePairing::identity(3)?)?.pconcurrence;
    Ok(SweepRow {
        alpha,
        beta,
        pconcurrence,
        eof_normalized: normalize_measure(eof_pure(&ket)?, MeasureName::Eof, 3)?,
        iconcurrence_normalized: normalize_measure(i_concurrence(&ket)?, MeasureName::IConcurrence, 3)?,
    })
}

fn grid(grid_n: usize) -> Result<Vec<f64>> {
    if grid_n < 2 {
        return Err(Error::InvalidArgument(format!("grid_n must be >= 2, got {grid_n}")));
    }
    Ok((0..=grid_n).map(|i| i as f64 / grid_n as f64).collect())
}

/// `(grid_n + 1)²` rows, alpha-major.
pub fn sweep(grid_n: usize) -> Result<Vec<SweepRow>> {
    let g = grid(grid_n)?;
    let points: Vec<(f64, f64)> = g.iter().flat_map(|&a| g.iter().map(move |&b| (a, b))).collect();
    points.par_iter().map(|&(a, b)| sweep_row(a, b)).collect()
}

/// `grid_n + 1` rows with beta = 1.
pub fn alpha_path(grid_n: usize) -> Result<Vec<SweepRow>> {
    grid(grid_n)?.par_iter().map(|&a| sweep_row(a, 1.0)).collect()
}

pub fn rows_to_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn rows_from_csv(s: &str) -> Result<Vec<SweepRow>> {
    csv::Reader::from_reader(s.as_bytes()).deserialize().map(|r| r.map_err(Error::from)).collect()
}

/// Either kind of input accepted by `witness`.
pub enum WitnessInput {
    State(StateFile),
    Record(TomographyRecord),
}

impl WitnessInput {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(s)?;
        if v.get("counts").is_some() {
            Ok(WitnessInput::Record(TomographyRecord::from_json_str(s)?))
        } else {
            Ok(WitnessInput::State(StateFile::from_json_str(s)?))
        }
    }
}

pub fn witness(input: &WitnessInput, mode: SearchMode) -> Result<WitnessReport> {
    match input {
        WitnessInput::State(f) => pconcurrence_search(&f.to_density(), mode),
        WitnessInput::Record(r) => witness_from_record(r, mode, MleOptions::default()),
    }
}

fn measure_state(state: &StateFile, measure: MeasureName, pairing: SearchMode) -> Result<f64> {
    let rho = state.to_density();
    let sref: StateRef = match state {
        StateFile::Ket(k) => k.into(),
        StateFile::Density(r) => r.into(),
    };
    match measure {
        MeasureName::Concurrence => wootters_concurrence(&rho),
        MeasureName::IConcurrence => i_concurrence(sref),
        MeasureName::Eof => eof_pure(sref),
        MeasureName::Pconcurrence => Ok(pconcurrence_search(&rho, pairing)?.pconcurrence),
    }
}

fn read(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

/// Writes `content` to `out` and returns `summary`, or returns `content` when
/// there is no output path.
fn emit(out: Option<&Path>, content: String, summary: impl FnOnce() -> String) -> Result<String> {
    match out {
        Some(p) => {
            std::fs::write(p, &content)?;
            Ok(summary())
        }
        None => Ok(content),
    }
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

/// Runs one command and returns what should go to stdout.
pub fn run(cli: &Cli) -> Result<String> {
    let fmt = cli.format;
    match &cli.command {
        Command::State { family, alpha, beta, d, decay, density, out } => {
            let ket = match family {
                Family::SpdcQutrit => make_spdc_qutrit(SpdcParams::new(*alpha, *beta)?),
                Family::MaxEntangled => make_max_entangled(*d)?,
                Family::SpdcQudit => make_spdc_qudit(*d, *decay)?,
            };
            let file = if *density { StateFile::Density(ket.to_density()) } else { StateFile::Ket(ket) };
            let (a, b) = file.dims();
            emit(out.as_deref(), with_newline(file.to_json_string()), || format!("wrote {a}x{b} state\n"))
        }
        Command::Measure { state, measure, normalize_dim, pairing } => {
            let file = StateFile::from_json_str(&read(state)?)?;
            let name: MeasureName = measure.parse()?;
            let raw = measure_state(&file, name, pairing.parse()?)?;
            let d = normalize_dim.unwrap_or_else(|| match &file {
                StateFile::Ket(k) => natural_dimension(k),
                StateFile::Density(r) => natural_dimension(r),
            });
            let v = MeasureValue::new(name, raw, d)?;
            Ok(match fmt {
                Format::Json => with_newline(serde_json::to_string_pretty(&v)?),
                Format::Csv => format!("measure,raw,normalized\n{},{},{}\n", v.measure, v.raw, v.normalized),
                Format::Text => format!("{}: raw {} normalized {} (d = {d})\n", v.measure, v.raw, v.normalized),
            })
        }
        Command::Sweep { grid_n, out } | Command::Path { grid_n, out } => {
            let rows = match &cli.command {
                Command::Sweep { .. } => sweep(*grid_n)?,
                _ => alpha_path(*grid_n)?,
            };
            let content = match (fmt, out) {
                (Format::Json, None) => with_newline(serde_json::to_string_pretty(&rows)?),
                _ => rows_to_csv(&rows)?,
            };
            emit(out.as_deref(), content, || format!("wrote {} rows\n", rows.len()))
        }
        Command::Simulate { state, settings, rate_hz, time_s, seed, noiseless, out } => {
            let rho = StateFile::from_json_str(&read(state)?)?.to_density();
            let (da, db) = rho.dims();
            if da != db {
                return Err(Error::Dimension(format!("simulation needs equal side dimensions, got {da}x{db}")));
            }
            let kind: SettingsKind = settings.parse()?;
            let set = standard_settings(kind, da)?;
            let record = if *noiseless {
                expected_counts(&rho, &set, *rate_hz, *time_s)?
            } else {
                simulate_counts(&rho, &set, *rate_hz, *time_s, *seed)?
            };
            let total: u64 = record.counts.iter().sum();
            emit(out.as_deref(), with_newline(record.to_json_string()), || {
                format!("wrote {} settings, {total} coincidences\n", record.settings.len())
            })
        }
        Command::Reconstruct { record, method, target, tol, max_iter, out } => {
            let rec = TomographyRecord::from_json_str(&read(record)?)?;
            let (rho, iterations, converged) = match method {
                Method::Linear => (reconstruct_linear(&rec)?, None, None),
                Method::Mle => {
                    let o = reconstruct_mle(&rec, MleOptions { tol: *tol, max_iter: *max_iter })?;
                    (o.state, Some(o.iterations), Some(o.converged))
                }
            };
            let fidelity = match target {
                Some(p) => Some(fidelity_to_target(&rho, &StateFile::from_json_str(&read(p)?)?)?),
                None => None,
            };
            let summary = ReconstructSummary { purity: purity(&rho), fidelity, iterations, converged };
            let file = with_newline(StateFile::Density(rho).to_json_string());
            match out {
                Some(p) => {
                    std::fs::write(p, &file)?;
                    summary.render(fmt)
                }
                None => Ok(file),
            }
        }
        Command::Witness { input, pairing, out } => {
            let input = WitnessInput::from_json_str(&read(input)?)?;
            let report = witness(&input, pairing.parse()?)?;
            let json = with_newline(report.to_json_string());
            if let Some(p) = out {
                std::fs::write(p, &json)?;
            }
            Ok(match fmt {
                Format::Json => json,
                Format::Csv => report_csv(&report),
                Format::Text => report.to_table(None, None),
            })
        }
        Command::Budget { d, time_s } => {
            let b = budget(*d, *time_s)?;
            Ok(match fmt {
                Format::Json => with_newline(serde_json::to_string_pretty(&b)?),
                Format::Csv => format!(
                    "method,measurements,hours\npconcurrence,{},{}\ntomography,{},{}\n",
                    b.pconc_measurements,
                    b.pconc_hours(),
                    b.qst_measurements,
                    b.qst_hours()
                ),
                Format::Text => budget_table(&b),
            })
        }
    }
}

fn fidelity_to_target(rho: &DensityMatrix, target: &StateFile) -> Result<f64> {
    match target {
        StateFile::Ket(k) => fidelity_to_ket(rho, k),
        StateFile::Density(s) => uhlmann_fidelity(rho, s),
    }
}

#[derive(Serialize)]
struct ReconstructSummary {
    purity: f64,
    fidelity: Option<f64>,
    iterations: Option<usize>,
    converged: Option<bool>,
}

impl ReconstructSummary {
    fn render(&self, fmt: Format) -> Result<String> {
        Ok(match fmt {
            Format::Json => with_newline(serde_json::to_string_pretty(self)?),
            Format::Csv => {
                let opt = |x: Option<String>| x.unwrap_or_default();
                format!(
                    "purity,fidelity,iterations,converged\n{},{},{},{}\n",
                    self.purity,
                    opt(self.fidelity.map(|f| f.to_string())),
                    opt(self.iterations.map(|i| i.to_string())),
                    opt(self.converged.map(|c| c.to_string()))
                )
            }
            Format::Text => {
                let mut s = format!("purity      {:.6}\n", self.purity);
                if let Some(f) = self.fidelity {
                    let _ = writeln!(s, "fidelity    {f:.6}");
                }
                if let Some(i) = self.iterations {
                    let _ = writeln!(s, "iterations  {i}");
                }
                if self.converged == Some(false) {
                    s.push_str("warning: MLE stopped at the iteration limit\n");
                }
                s
            }
        })
    }
}

fn report_csv(r: &WitnessReport) -> String {
    let mut s = String::from("a,b,concurrence,fidelity,weight\n");
    for row in &r.subspace_rows {
        let _ = writeln!(s, "\"{}\",\"{}\",{},{},{}", row.a, row.b, row.concurrence, row.fidelity, row.weight);
    }
    s
}

pub fn budget_table(b: &crate::tomography::Budget) -> String {
    format!(
        "d = {}, K = {}\n{:<14}{:>14}{:>10}\n{:<14}{:>14}{:>10.1}\n{:<14}{:>14}{:>10.1}\nreduction     {:.1}x\n",
        b.d,
        b.k,
        "method",
        "measurements",
        "hours",
        "P-concurrence",
        b.pconc_measurements,
        b.pconc_hours(),
        "tomography",
        b.qst_measurements,
        b.qst_hours(),
        b.reduction()
    )
}
