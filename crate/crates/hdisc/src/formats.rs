//! JSON and CSV representations of operators, states, protocols and
//! results.
//!
//! Matrices are row-major arrays of `[re, im]` pairs; a bare number is
//! accepted as a real entry on input.

use std::path::{Path, PathBuf};

use hdisc_core::energy::DecayReport;
use hdisc_core::estimation::{EstimationPoint, UncertaintyReport};
use hdisc_core::linalg::CMatrix;
use hdisc_core::metric::ScheduleSegment;
use hdisc_core::protocol::{DiscriminationProtocol, ProtocolStep, Trajectory};
use hdisc_core::scenarios::{ScenarioResult, SweepTable};
use hdisc_core::spectral::Unitary;
use hdisc_core::{Complex64, HamiltonianSchedule, HermitianOperator, QuantumState, SpaceLayout};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Complex([f64; 2]),
    Real(f64),
}

impl Entry {
    fn value(self) -> Complex64 {
        match self {
            Entry::Complex([re, im]) => Complex64::new(re, im),
            Entry::Real(re) => Complex64::new(re, 0.0),
        }
    }
}

impl From<Complex64> for Entry {
    fn from(z: Complex64) -> Self {
        Entry::Complex([z.re, z.im])
    }
}

pub type MatrixJson = Vec<Vec<Entry>>;

pub fn matrix_from_json(rows: &MatrixJson) -> CliResult<CMatrix> {
    let rows: Vec<Vec<Complex64>> = rows.iter().map(|r| r.iter().map(|e| e.value()).collect()).collect();
    CMatrix::from_rows(&rows).map_err(|e| CliError::config(format!("matrix: {e}")))
}

pub fn matrix_to_json(m: &CMatrix) -> MatrixJson {
    m.rows().map(|r| r.iter().map(|&z| z.into()).collect()).collect()
}

pub fn amplitudes_from_json(v: &[Entry]) -> Vec<Complex64> {
    v.iter().map(|e| e.value()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutJson {
    pub box_dim: usize,
    pub nobox_dim: usize,
    pub ancilla_dim: usize,
}

impl LayoutJson {
    pub fn to_layout(self) -> CliResult<SpaceLayout> {
        SpaceLayout::new(self.box_dim, self.nobox_dim, self.ancilla_dim).map_err(|e| CliError::config(format!("layout: {e}")))
    }
}

impl From<SpaceLayout> for LayoutJson {
    fn from(l: SpaceLayout) -> Self {
        Self { box_dim: l.box_dim(), nobox_dim: l.nobox_dim(), ancilla_dim: l.ancilla_dim() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    pub layout: LayoutJson,
    pub amplitudes: Vec<Entry>,
}

impl StateJson {
    pub fn to_state(&self) -> CliResult<QuantumState> {
        QuantumState::new(self.layout.to_layout()?, amplitudes_from_json(&self.amplitudes))
            .map_err(|e| CliError::config(format!("state: {e}")))
    }
}

impl From<&QuantumState> for StateJson {
    fn from(s: &QuantumState) -> Self {
        Self { layout: s.layout().into(), amplitudes: s.amplitudes().iter().map(|&z| z.into()).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepJson {
    pub dwell: f64,
    /// Identity when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control: Option<MatrixJson>,
}

/// `initial` holds amplitudes only; the layout is given once at the top.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolJson {
    pub layout: LayoutJson,
    pub initial: Vec<Entry>,
    pub steps: Vec<StepJson>,
}

impl ProtocolJson {
    pub fn to_protocol(&self) -> CliResult<DiscriminationProtocol> {
        let layout = self.layout.to_layout()?;
        let cfg = |e: hdisc_core::Error| CliError::config(format!("protocol: {e}"));
        let initial = QuantumState::new(layout, amplitudes_from_json(&self.initial)).map_err(cfg)?;
        let steps = self
            .steps
            .iter()
            .map(|s| {
                let control = match &s.control {
                    Some(m) => Unitary::new(matrix_from_json(m)?).map_err(cfg)?,
                    None => Unitary::identity(layout.total_dim()),
                };
                ProtocolStep::new(s.dwell, control).map_err(cfg)
            })
            .collect::<CliResult<Vec<_>>>()?;
        DiscriminationProtocol::new(layout, initial, steps).map_err(cfg)
    }
}

impl From<&DiscriminationProtocol> for ProtocolJson {
    fn from(p: &DiscriminationProtocol) -> Self {
        Self {
            layout: p.layout().into(),
            initial: p.initial().amplitudes().iter().map(|&z| z.into()).collect(),
            steps: p
                .steps()
                .iter()
                .map(|s| StepJson { dwell: s.dwell, control: Some(matrix_to_json(s.control.matrix())) })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentJson {
    pub duration: f64,
    pub h1: MatrixJson,
    pub h2: MatrixJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleJson {
    pub segments: Vec<SegmentJson>,
}

impl ScheduleJson {
    pub fn to_schedule(&self) -> CliResult<HamiltonianSchedule> {
        let cfg = |e: hdisc_core::Error| CliError::config(format!("schedule: {e}"));
        let segments = self
            .segments
            .iter()
            .map(|s| {
                Ok(ScheduleSegment {
                    duration: s.duration,
                    h1: HermitianOperator::new(matrix_from_json(&s.h1)?).map_err(cfg)?,
                    h2: HermitianOperator::new(matrix_from_json(&s.h2)?).map_err(cfg)?,
                })
            })
            .collect::<CliResult<Vec<_>>>()?;
        HamiltonianSchedule::new(segments).map_err(cfg)
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::io(path, e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e.to_string()))
}

fn write_table(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> CliResult<()> {
    let io = |e: csv::Error| CliError::io(path, e.to_string());
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::io(path, e.to_string()))
}

/// Shortest round-trip representation; stable across runs.
fn num(v: f64) -> String {
    format!("{v:?}")
}

pub fn write_trajectory_csv(path: &Path, traj: &Trajectory) -> CliResult<()> {
    let rows = traj
        .times
        .iter()
        .zip(&traj.overlaps)
        .zip(&traj.thetas)
        .map(|((t, o), th)| vec![num(*t), num(o.re), num(o.im), num(*th)]);
    write_table(path, &["time", "re_overlap", "im_overlap", "theta"], rows)
}

pub fn write_estimation_csv(path: &Path, points: &[EstimationPoint]) -> CliResult<()> {
    let rows = points.iter().map(|p| {
        vec![
            num(p.delta_t),
            num(p.delta_h_closed),
            num(p.delta_h_empirical),
            num(p.stderr),
            num(p.product),
            p.bound_025_ok.to_string(),
        ]
    });
    write_table(path, &["delta_t", "delta_h_closed", "delta_h_empirical", "stderr", "product", "bound_025_ok"], rows)
}

pub fn write_product_csv(path: &Path, curve: &[UncertaintyReport]) -> CliResult<()> {
    let rows = curve
        .iter()
        .map(|r| vec![num(r.delta_t), num(r.delta_h), num(r.product), r.bound_satisfied.to_string()]);
    write_table(path, &["delta_t", "delta_h", "product", "bound_025_ok"], rows)
}

pub fn write_decay_csv(stats: &Path, cutoffs: &Path, report: &DecayReport) -> CliResult<()> {
    write_table(
        stats,
        &["trials", "mean_time", "mean_time_stderr", "fwhm", "lifetime_linewidth_product"],
        [vec![
            report.trials.to_string(),
            num(report.mean_time),
            num(report.mean_time_stderr),
            num(report.fwhm),
            num(report.lifetime_linewidth_product),
        ]],
    )?;
    let rows = report
        .cutoffs
        .iter()
        .map(|c| vec![num(c.lambda), num(c.truncated_empirical), num(c.truncated_closed)]);
    write_table(cutoffs, &["lambda", "truncated_dE", "truncated_dE_closed"], rows)
}

pub fn write_sweep_csv(path: &Path, sweep: &SweepTable) -> CliResult<()> {
    let header: Vec<&str> = sweep.columns.iter().map(String::as_str).collect();
    write_table(path, &header, sweep.rows.iter().map(|r| r.iter().copied().map(num).collect()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioJson<'a> {
    pub name: &'a str,
    pub metrics: &'a std::collections::BTreeMap<String, f64>,
    pub pass: bool,
}

impl<'a> From<&'a ScenarioResult> for ScenarioJson<'a> {
    fn from(r: &'a ScenarioResult) -> Self {
        Self { name: &r.name, metrics: &r.metrics, pass: r.pass }
    }
}

/// `path` with its file stem extended by `suffix` and a new extension.
pub fn sibling(path: &Path, suffix: &str, extension: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}.{extension}"))
}
