//! Dispatch of an [`ExperimentConfig`] to the library, artifact writing and
//! the one-line summary.

use std::f64::consts::PI;
use std::path::Path;

use hdisc_core::energy::{decay_measurement_simulation, spy_bound_experiment, DecayModel};
use hdisc_core::estimation::{
    delta_t_grid, estimation_sweep, max_uncertainty_product, uncertainty_product_curve, HypothesisPair,
};
use hdisc_core::metric::{discrimination_distance, min_discrimination_time, time_dependent_bound, ScheduleSegment};
use hdisc_core::protocol::{
    integrated_speed_limit_excess, saturation_protocol, simulate_protocol, speed_limit_check, DiscriminationProtocol,
};
use hdisc_core::scenarios::{
    scenario_farhi_gutmann, scenario_phase_box, scenario_shared_eigenbasis, scenario_spin_fields, ScenarioResult,
};
use hdisc_core::{dist0, spread, HamiltonianSchedule, HermitianOperator, SpaceLayout};
use serde::Serialize;

use crate::config::{Command, ExperimentConfig};
use crate::error::{CliError, CliResult};
use crate::formats::{
    read_json, sibling, write_decay_csv, write_estimation_csv, write_json, write_product_csv, write_sweep_csv,
    write_trajectory_csv, ProtocolJson, ScenarioJson, ScheduleJson,
};
use crate::generators::{parse_dims, parse_hamiltonian, parse_layout, parse_reals};

/// Outcome of one command: whether its check passed and the line to print.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub pass: bool,
    pub line: String,
}

impl Summary {
    fn new(command: Command, pass: bool, body: String) -> Self {
        let verdict = if pass { "PASS" } else { "FAIL" };
        Self { pass, line: format!("{}: {body}: {verdict}", command.name()) }
    }
}

pub fn run(cfg: &ExperimentConfig) -> CliResult<Summary> {
    match cfg.command {
        Command::Dist => run_dist(cfg),
        Command::Bound => run_bound(cfg),
        Command::Protocol => run_protocol_cmd(cfg),
        Command::Estimate => run_estimate(cfg),
        Command::Product => run_product(cfg),
        Command::Spy => run_spy(cfg),
        Command::Decay => run_decay(cfg),
        Command::Scenario => run_scenario(cfg),
    }
}

fn hamiltonian(cfg: &ExperimentConfig, key: &str) -> CliResult<HermitianOperator> {
    parse_hamiltonian(cfg.require(key)?)
}

fn pair(cfg: &ExperimentConfig) -> CliResult<(HermitianOperator, HermitianOperator)> {
    let (h1, h2) = (hamiltonian(cfg, "h1")?, hamiltonian(cfg, "h2")?);
    if h1.dim() != h2.dim() {
        return Err(CliError::config(format!("--h1 has dimension {} but --h2 has {}", h1.dim(), h2.dim())));
    }
    Ok((h1, h2))
}

fn out_path(cfg: &ExperimentConfig) -> Option<&Path> {
    cfg.output_path.as_deref()
}

#[derive(Serialize)]
struct DistReport {
    d0: f64,
    pi_over_d0: f64,
    spread_of_difference: f64,
}

fn run_dist(cfg: &ExperimentConfig) -> CliResult<Summary> {
    let (h1, h2) = pair(cfg)?;
    let d0 = dist0(&h1, &h2)?;
    let t = min_discrimination_time(&h1, &h2, true)?;
    let report = DistReport { d0, pi_over_d0: t, spread_of_difference: discrimination_distance(&h1, &h2, false)? };
    if let Some(p) = out_path(cfg) {
        write_json(p, &report)?;
    }
    Ok(Summary::new(
        Command::Dist,
        true,
        format!("D0 = {d0:.6}, minimum discrimination time pi/D0 = {t:.6} (without the no-box branch: spread {:.6})", report.spread_of_difference),
    ))
}

#[derive(Serialize)]
struct BoundReport {
    integral: f64,
    pi: f64,
    total_duration: f64,
    certain_discrimination_possible: bool,
}

fn run_bound(cfg: &ExperimentConfig) -> CliResult<Summary> {
    let schedule = match cfg.get("schedule") {
        Some(path) => {
            if ["h1", "h2", "dt"].iter().any(|k| cfg.get(k).is_some()) {
                return Err(CliError::config("give either --schedule or --h1/--h2/--dt"));
            }
            read_json::<ScheduleJson>(Path::new(path))?.to_schedule()?
        }
        None => {
            let (h1, h2) = pair(cfg)?;
            let duration: f64 = cfg.parse_or("dt", f64::NAN)?;
            if duration.is_nan() {
                return Err(CliError::config("`bound` needs --schedule or --dt"));
            }
            HamiltonianSchedule::new(vec![ScheduleSegment { duration, h1, h2 }])
                .map_err(|e| CliError::config(e.to_string()))?
        }
    };
    let b = time_dependent_bound(&schedule)?;
    let report = BoundReport {
        integral: b.integral,
        pi: PI,
        total_duration: schedule.total_duration(),
        certain_discrimination_possible: b.certain_discrimination_possible,
    };
    if let Some(p) = out_path(cfg) {
        write_json(p, &report)?;
    }
    let verdict = if b.certain_discrimination_possible { "reaches" } else { "is below" };
    Ok(Summary::new(
        Command::Bound,
        b.certain_discrimination_possible,
        format!("integral of D0 dt = {:.6} {verdict} pi, so certain discrimination is {}possible", b.integral, if b.certain_discrimination_possible { "" } else { "im" }),
    ))
}

fn run_protocol_cmd(cfg: &ExperimentConfig) -> CliResult<Summary> {
    let (h1, h2) = pair(cfg)?;
    let proto: DiscriminationProtocol = match cfg.get("protocol") {
        Some(path) => {
            if ["layout", "steps", "nu"].iter().any(|k| cfg.get(k).is_some()) {
                return Err(CliError::config("--layout/--steps/--nu only apply to the saturating protocol"));
            }
            read_json::<ProtocolJson>(Path::new(path))?.to_protocol()?
        }
        None => {
            let layout = match cfg.get("layout") {
                Some(l) => parse_layout(l)?,
                None => {
                    // Add a no-box branch only when the |E| terms of D0 dominate.
                    let needs = spread(&h1.sub(&h2)?)? < dist0(&h1, &h2)? * (1.0 - 1e-9);
                    SpaceLayout::new(h1.dim(), usize::from(needs), 1)?
                }
            };
            let steps: usize = cfg.parse_or("steps", 1000)?;
            let nu: f64 = cfg.parse_or("nu", 0.5)?;
            saturation_protocol(&h1, &h2, layout, steps, nu)?
        }
    };
    let out = simulate_protocol(&proto, &h1, &h2)?;
    let traj = &out.trajectory;
    let d0 = dist0(&h1, &h2)?;
    let limit = 0.5 * d0 * proto.total_dwell();
    let pass = integrated_speed_limit_excess(traj, d0) <= 1e-6 && speed_limit_check(traj, d0) <= 1e-6;
    if let Some(p) = out_path(cfg) {
        write_trajectory_csv(p, traj)?;
    }
    Ok(Summary::new(
        Command::Protocol,
        pass,
        format!(
            "final theta = {:.6}, |overlap| = {:.3e}, speed limit theta <= D0*T/2 = {limit:.6} (pi/2 needs T >= pi/D0 = {:.6})",
            traj.final_theta(),
            traj.final_overlap().norm(),
            PI / d0
        ),
    ))
}

fn run_estimate(cfg: &ExperimentConfig) -> CliResult<Summary> {
    let (h1, h2) = match cfg.get("pair") {
        Some(name) => {
            if cfg.get("h1").is_some() || cfg.get("h2").is_some() {
                return Err(CliError::config("give either --pair or --h1/--h2"));
            }
            match name {
                "spin" => (HermitianOperator::pauli_z(), HermitianOperator::pauli_z().scale(-1.0)),
                "pauli-xz" => (HermitianOperator::pauli_x(), HermitianOperator::pauli_z()),
                other => return Err(CliError::config(format!("unknown pair `{other}`"))),
            }
        }
        None => pair(cfg)?,
    };
    let grid: usize = cfg.parse_or("grid", 20)?;
    let trials: u64 = cfg.parse_or("trials", 100_000)?;
    let trotter: usize = cfg.parse_or("trotter", 1000)?;
    if grid == 0 || trials == 0 || trotter == 0 {
        return Err(CliError::config("--grid, --trials and --trotter must be positive"));
    }
    let hyp = HypothesisPair::equiprobable(h1, h2).map_err(|e| CliError::config(e.to_string()))?;
    let d0 = hyp.d0()?;
    if d0 <= 0.0 {
        return Err(CliError::Domain(hdisc_core::Error::Indistinguishable { distance: d0 }));
    }
    let points = estimation_sweep(&hyp, &delta_t_grid(d0, grid), trials, cfg.seed, trotter)?;
    if let Some(p) = out_path(cfg) {
        write_estimation_csv(p, &points)?;
    }
    let agree = points
        .iter()
        .filter(|p| (p.delta_h_empirical - p.delta_h_closed).abs() <= 3.0 * p.stderr)
        .count();
    let best = points.iter().map(|p| p.product).fold(0.0, f64::max);
    let optimum = max_uncertainty_product(d0)?.product_star;
    Ok(Summary::new(
        Command::Estimate,
        agree == points.len(),
        format!(
            "D0 = {d0:.6}, {agree}/{} points within 3 stderr of the closed form, max dt*dH = {best:.6} on the grid (optimum {optimum:.6} >= 1/4)",
            points.len()
        ),
    ))
}

fn run_product(cfg: &ExperimentConfig) -> CliResult<Summary> {
    let d0: f64 = cfg.parse_or("d0", 1.0)?;
    let grid: usize = cfg.parse_or("grid", 101)?;
    if !(d0 > 0.0) || !d0.is_finite() {
        return Err(CliError::config("--d0 must be positive"));
    }
    let curve = uncertainty_product_curve(d0, &delta_t_grid(d0, grid))?;
    let opt = max_uncertainty_product(d0)?;
    if let Some(p) = out_path(cfg) {
        write_product_csv(p, &curve)?;
    }
    Ok(Summary::new(
        Command::Product,
        opt.bound_satisfied,
        format!(
            "max dt*dH = {:.6} at x* = D0*dt/2 = {:.6} (dt* = {:.6}), bound 1/4",
            opt.product_star, opt.x_star, opt.delta_t_star
        ),
    ))
}

#[derive(Serialize)]
struct SpyRow {
    delta_t: f64,
    epsilon: f64,
    level_energy: f64,
    error_probability: f64,
    delta_e_spy: f64,
    product: f64,
    bound_025_ok: bool,
}

fn run_spy(cfg: &ExperimentConfig) -> CliResult<Summary> {
    let h0 = hamiltonian(cfg, "h1")?;
    let level: usize = cfg.parse_or("level", 0)?;
    if level >= h0.dim() {
        return Err(CliError::config(format!("--level {level} out of range for dimension {}", h0.dim())));
    }
    let dts = parse_reals(cfg.get("dt").unwrap_or("0.1,1,10"))?;
    if dts.iter().any(|&t| t <= 0.0) {
        return Err(CliError::config("--dt values must be positive"));
    }
    let rows = dts
        .iter()
        .map(|&dt| {
            let r = spy_bound_experiment(&h0, level, dt)?;
            Ok(SpyRow {
                delta_t: dt,
                epsilon: r.epsilon,
                level_energy: r.level_energy,
                error_probability: r.error_probability,
                delta_e_spy: r.delta_e_spy,
                product: r.report.product,
                bound_025_ok: r.report.bound_satisfied,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    if let Some(p) = out_path(cfg) {
        write_json(p, &rows)?;
    }
    let min = rows.iter().map(|r| r.product).fold(f64::INFINITY, f64::min);
    Ok(Summary::new(
        Command::Spy,
        rows.iter().all(|r| r.bound_025_ok),
        format!("min dt*dE = {min:.6} over {} exposure times, bound 1/4", rows.len()),
    ))
}

fn run_decay(cfg: &ExperimentConfig) -> CliResult<Summary> {
    let gamma: f64 = cfg.parse_or("gamma", 1.0)?;
    let e0: f64 = cfg.parse_or("e0", 0.0)?;
    let trials: u64 = cfg.parse_or("trials", 1_000_000)?;
    let model = DecayModel::new(gamma, e0).map_err(|e| CliError::config(e.to_string()))?;
    let rep = decay_measurement_simulation(&model, trials, cfg.seed).map_err(|e| match e {
        hdisc_core::Error::InvalidArgument(m) => CliError::config(m),
        other => CliError::Domain(other),
    })?;
    if let Some(p) = out_path(cfg) {
        write_decay_csv(p, &sibling(p, "_cutoffs", "csv"), &rep)?;
    }
    let mean_ok = (rep.mean_time - 1.0 / gamma).abs() <= 3.0 * rep.mean_time_stderr;
    let cutoffs_ok = rep.cutoffs.iter().all(|c| (c.truncated_empirical - c.truncated_closed).abs() <= 0.02 * c.truncated_closed);
    let last = rep.cutoffs.last().expect("cutoff table is non-empty");
    Ok(Summary::new(
        Command::Decay,
        mean_ok && cutoffs_ok && rep.accuracy.is_divergent(),
        format!(
            "mean time = {:.6} (1/gamma = {:.6}), FWHM = {:.4} (2 gamma = {:.4}), lifetime x linewidth = {}, dE diverges (truncated at {} = {:.4})",
            rep.mean_time,
            1.0 / gamma,
            rep.fwhm,
            2.0 * gamma,
            rep.lifetime_linewidth_product,
            last.lambda,
            last.truncated_empirical
        ),
    ))
}

fn run_scenario(cfg: &ExperimentConfig) -> CliResult<Summary> {
    let name = cfg.require("name")?;
    let (result, body): (ScenarioResult, String) = match name {
        "spin-fields" => {
            cfg.reject_unused(&["name", "mu-b0"], "spin-fields")?;
            let r = scenario_spin_fields(cfg.parse_or("mu-b0", 1.0)?).map_err(config_or_domain)?;
            let body = format!(
                "first orthogonality at {:.6} vs pi/D0 = {:.6}, sigma_y = {:+.6}/{:+.6}, quoted time off by factor {:.3}",
                r.metric("first_orthogonal_time"),
                r.metric("pi_over_d0"),
                r.metric("sigma_y_h1"),
                r.metric("sigma_y_h2"),
                r.metric("discrepancy_factor")
            );
            (r, body)
        }
        "phase-box" => {
            cfg.reject_unused(&["name", "phi1", "phi2", "h0"], "phase-box")?;
            let h0 = parse_hamiltonian(cfg.get("h0").unwrap_or("zero:1"))?;
            let r = scenario_phase_box(cfg.parse_or("phi1", 1.0)?, cfg.parse_or("phi2", 0.0)?, &h0)?;
            let body = format!(
                "|overlap| at pi/D0 = {:.6} is {:.3e}, without the bypass ||overlap| - 1| <= {:.3e}",
                r.metric("pi_over_d0"),
                r.metric("overlap_at_bound"),
                r.metric("max_unit_deviation_without_bypass")
            );
            (r, body)
        }
        "farhi-gutmann" => {
            cfg.reject_unused(&["name", "energy", "dims", "threshold"], "farhi-gutmann")?;
            let dims = parse_dims(cfg.get("dims").unwrap_or("4..256"))?;
            let r = scenario_farhi_gutmann(cfg.parse_or("energy", 1.0)?, &dims, cfg.parse_or("threshold", 0.9)?)
                .map_err(config_or_domain)?;
            let body = match r.metrics.get("slope") {
                Some(s) => format!("log-log slope of identification time vs d = {s:.4}, sqrt(d) exponent 0.5 +- 0.05"),
                None => format!("single dimension, time {:.6} (no sqrt(d) fit)", r.sweep.rows[0][1]),
            };
            (r, body)
        }
        "shared-eigenbasis" => {
            cfg.reject_unused(&["name", "e1", "e2", "k0", "trials"], "shared-eigenbasis")?;
            let e1 = parse_reals(cfg.get("e1").unwrap_or("0,1,2,3"))?;
            let e2 = parse_reals(cfg.get("e2").unwrap_or("0,3,2,3"))?;
            let r = scenario_shared_eigenbasis(&e1, &e2, cfg.parse_or("k0", 1)?, cfg.parse_or("trials", 100_000)?, cfg.seed)
                .map_err(config_or_domain)?;
            let body = format!(
                "expected time {:.6} vs pi/(dim |dE|) = {:.6}, Monte Carlo {:.6} +- {:.6}",
                r.metric("expected_time_strategy"),
                r.metric("expected_time_formula"),
                r.metric("mc_expected_time"),
                r.metric("mc_expected_time_stderr")
            );
            (r, body)
        }
        other => return Err(CliError::config(format!("unknown scenario `{other}`"))),
    };
    if let Some(p) = out_path(cfg) {
        write_json(p, &ScenarioJson::from(&result))?;
        write_sweep_csv(&sibling(p, "_sweep", "csv"), &result.sweep)?;
    }
    Ok(Summary::new(Command::Scenario, result.pass, format!("{name}: {body}")))
}

/// Argument validation failures inside the library are configuration
/// errors; everything else is a domain error.
fn config_or_domain(e: hdisc_core::Error) -> CliError {
    match e {
        hdisc_core::Error::InvalidArgument(m) => CliError::config(m),
        hdisc_core::Error::DimensionMismatch { .. } => CliError::config(e.to_string()),
        other => CliError::Domain(other),
    }
}
