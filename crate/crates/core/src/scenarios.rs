//! Named end-to-end examples, each producing metrics, a verdict and the
//! sweep data behind it.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::estimation::MonteCarloEstimate;
use crate::metric::{dist0, min_discrimination_time};
use crate::protocol::theta_from_overlap;
use crate::random::{haar_state, trial_rng};
use crate::spectral::{evolve, HermitianOperator, QuantumState, SpaceLayout};
use crate::{Error, Result};

/// Column-labelled numeric table.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl SweepTable {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    pub name: String,
    pub metrics: BTreeMap<String, f64>,
    pub pass: bool,
    pub sweep: SweepTable,
}

impl ScenarioResult {
    fn new(name: &str) -> Self {
        Self { name: name.to_string(), metrics: BTreeMap::new(), pass: false, sweep: SweepTable::default() }
    }

    fn set(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.to_string(), value);
    }

    /// Metric by key; panics on a missing key, which would be a bug in the
    /// scenario that declared it.
    pub fn metric(&self, key: &str) -> f64 {
        self.metrics[key]
    }
}

/// Agreement tolerance for quantities that should match exactly.
pub const EXACT_TOL: f64 = 1e-9;

fn overlap_at(h1: &HermitianOperator, h2: &HermitianOperator, psi: &QuantumState, t: f64) -> Result<Complex64> {
    evolve(h1, t, psi)?.inner(&evolve(h2, t, psi)?)
}

/// A spin in `|↑x⟩` exposed to `±μB₀ σ_z`, read out with `σ_y`.
pub fn scenario_spin_fields(mu_b0: f64) -> Result<ScenarioResult> {
    if !(mu_b0 > 0.0) || !mu_b0.is_finite() {
        return Err(Error::InvalidArgument("field strength must be positive"));
    }
    let h1 = HermitianOperator::pauli_z().scale(mu_b0);
    let h2 = HermitianOperator::pauli_z().scale(-mu_b0);
    let d0 = dist0(&h1, &h2)?;
    let bound = min_discrimination_time(&h1, &h2, true)?;
    let layout = SpaceLayout::plain(2)?;
    let up_x = QuantumState::new(layout, vec![Complex64::new(FRAC_1_SQRT_2, 0.0); 2])?;

    let mut out = ScenarioResult::new("spin-fields");
    out.sweep = SweepTable::new(&["time", "re_overlap", "im_overlap", "theta"]);
    let steps = 200;
    let horizon = 2.0 * bound;
    let dt = horizon / steps as f64;
    let mut bracket = None;
    let mut prev = overlap_at(&h1, &h2, &up_x, 0.0)?.re;
    for i in 0..=steps {
        let t = i as f64 * dt;
        let o = overlap_at(&h1, &h2, &up_x, t)?;
        out.sweep.push(vec![t, o.re, o.im, theta_from_overlap(o.norm())]);
        if bracket.is_none() && i > 0 && (o.re <= 0.0) != (prev <= 0.0) {
            bracket = Some((t - dt, t));
        }
        prev = o.re;
    }
    let (mut lo, mut hi) = bracket.ok_or(Error::Numerical("no orthogonality within two bound times"))?;
    let f_lo = overlap_at(&h1, &h2, &up_x, lo)?.re;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if (overlap_at(&h1, &h2, &up_x, mid)?.re <= 0.0) == (f_lo <= 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t_orth = 0.5 * (lo + hi);
    let sy = HermitianOperator::pauli_y();
    let sy1 = sy.expectation(evolve(&h1, t_orth, &up_x)?.amplitudes())?;
    let sy2 = sy.expectation(evolve(&h2, t_orth, &up_x)?.amplitudes())?;
    let quoted = PI / mu_b0;

    out.set("mu_b0", mu_b0);
    out.set("d0", d0);
    out.set("pi_over_d0", bound);
    out.set("first_orthogonal_time", t_orth);
    out.set("sigma_y_h1", sy1);
    out.set("sigma_y_h2", sy2);
    out.set("quoted_time", quoted);
    out.set("discrepancy_factor", quoted / t_orth);
    out.pass = (t_orth - bound).abs() <= EXACT_TOL * bound
        && (sy1.abs() - 1.0).abs() <= EXACT_TOL
        && (sy1 + sy2).abs() <= EXACT_TOL;
    Ok(out)
}

/// A box that adds phase `φ₁` or `φ₂` on top of `H₀`, probed with and
/// without a branch that bypasses the box.
pub fn scenario_phase_box(phi1: f64, phi2: f64, h0: &HermitianOperator) -> Result<ScenarioResult> {
    let h1 = h0.shifted(phi1);
    let h2 = h0.shifted(phi2);
    let d0 = dist0(&h1, &h2)?;
    let t_bound = min_discrimination_time(&h1, &h2, true)?;
    let dim = h0.dim();
    let ground = h0.eig()?.vector(0);

    let with_box = SpaceLayout::new(dim, 1, 1)?;
    let mut amps: Vec<Complex64> = ground.iter().map(|a| a * FRAC_1_SQRT_2).collect();
    amps.push(Complex64::new(FRAC_1_SQRT_2, 0.0));
    let probe = QuantumState::new(with_box, amps)?;
    let e1 = crate::spectral::extend_to_layout(&h1, with_box)?;
    let e2 = crate::spectral::extend_to_layout(&h2, with_box)?;
    let plain_probe = QuantumState::new(SpaceLayout::plain(dim)?, ground)?;

    let mut out = ScenarioResult::new("phase-box");
    out.sweep = SweepTable::new(&["time", "overlap_with_bypass", "overlap_without_bypass"]);
    let steps = 100;
    let mut unit_dev: f64 = 0.0;
    for i in 0..=steps {
        let t = 2.0 * t_bound * i as f64 / steps as f64;
        let with = overlap_at(&e1, &e2, &probe, t)?.norm();
        let without = overlap_at(&h1, &h2, &plain_probe, t)?.norm();
        unit_dev = unit_dev.max((without - 1.0).abs());
        out.sweep.push(vec![t, with, without]);
    }
    let final_overlap = overlap_at(&e1, &e2, &probe, t_bound)?.norm();

    out.set("phi1", phi1);
    out.set("phi2", phi2);
    out.set("d0", d0);
    out.set("pi_over_d0", t_bound);
    out.set("overlap_at_bound", final_overlap);
    out.set("max_unit_deviation_without_bypass", unit_dev);
    out.pass = final_overlap <= EXACT_TOL && unit_dev <= EXACT_TOL;
    Ok(out)
}

/// Identification probability of `|k⟩` after evolving `|s⟩` with
/// `E|k⟩⟨k|` interleaved with the driver `E|s⟩⟨s|` in steps of `tau`,
/// returning the earliest time the probability reaches `threshold`.
///
/// The driver acts as `ψ + (e^{-iEτ} − 1)⟨s|ψ⟩ s`, so a step costs O(d).
fn grover_crossing_time(e: f64, d: usize, k: usize, tau: f64, threshold: f64, max_steps: usize) -> Result<f64> {
    let x = 1.0 / (d as f64).sqrt();
    let mut psi = vec![Complex64::new(x, 0.0); d];
    let phase = Complex64::from_polar(1.0, -e * tau) - Complex64::new(1.0, 0.0);
    let kick = Complex64::from_polar(1.0, -e * tau);
    let mut prev_p = x * x;
    if prev_p >= threshold {
        return Ok(0.0);
    }
    for step in 1..=max_steps {
        psi[k] *= kick;
        let overlap: Complex64 = psi.iter().sum::<Complex64>() * x;
        let shift = phase * overlap * x;
        for amp in psi.iter_mut() {
            *amp += shift;
        }
        let p = psi[k].norm_sqr();
        if p >= threshold {
            let frac = (threshold - prev_p) / (p - prev_p);
            return Ok((step as f64 - 1.0 + frac) * tau);
        }
        prev_p = p;
    }
    Err(Error::Numerical("identification threshold not reached"))
}

/// Closed-form crossing time of `x² cos²(Ext) + sin²(Ext) ≥ threshold` with
/// `x = d^{-1/2}`.
pub fn grover_crossing_time_exact(e: f64, d: usize, threshold: f64) -> f64 {
    let x2 = 1.0 / d as f64;
    if threshold <= x2 {
        return 0.0;
    }
    ((threshold - x2) / (1.0 - x2)).sqrt().asin() / (e * x2.sqrt())
}

/// Step length of the interleaved driver, in units of `1/E`.
pub const GROVER_STEP: f64 = 0.01;

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Identifying which of `H_k = E|k⟩⟨k|` acts, for each dimension in `dims`,
/// with a resonant driver; the identification time should grow as `√d`.
pub fn scenario_farhi_gutmann(e: f64, dims: &[usize], threshold: f64) -> Result<ScenarioResult> {
    if !(e > 0.0) || !e.is_finite() {
        return Err(Error::InvalidArgument("energy must be positive"));
    }
    if dims.is_empty() || dims.iter().any(|&d| d < 2) {
        return Err(Error::InvalidArgument("dimensions must be at least 2"));
    }
    if !(threshold > 0.5 && threshold < 1.0) {
        return Err(Error::InvalidArgument("threshold must lie in (0.5, 1)"));
    }
    let tau = GROVER_STEP / e;
    let mut out = ScenarioResult::new("farhi-gutmann");
    out.sweep = SweepTable::new(&["d", "time", "exact_time", "sqrt_d_over_e"]);
    let mut log_d = Vec::with_capacity(dims.len());
    let mut log_t = Vec::with_capacity(dims.len());
    let mut max_rel_err: f64 = 0.0;
    for &d in dims {
        let exact = grover_crossing_time_exact(e, d, threshold);
        // Twice the full rotation period leaves ample room.
        let max_steps = (2.0 * PI * (d as f64).sqrt() / (e * tau)).ceil() as usize + 1;
        let mut worst: f64 = 0.0;
        for k in 0..d {
            worst = worst.max(grover_crossing_time(e, d, k, tau, threshold, max_steps)?);
        }
        max_rel_err = max_rel_err.max((worst - exact).abs() / exact);
        let sqrt_ref = (d as f64).sqrt() / e;
        out.sweep.push(vec![d as f64, worst, exact, sqrt_ref]);
        out.set(&format!("time_d{d}"), worst);
        log_d.push((d as f64).ln());
        log_t.push(worst.ln());
    }
    out.set("energy", e);
    out.set("threshold", threshold);
    out.set("max_relative_error_vs_exact", max_rel_err);
    let distinct = log_d.iter().any(|&v| v != log_d[0]);
    if distinct {
        let (slope, intercept) = linear_fit(&log_d, &log_t);
        out.set("slope", slope);
        out.set("prefactor", intercept.exp() * e);
        out.pass = (slope - 0.5).abs() <= 0.05;
    } else {
        out.pass = log_t.iter().all(|t| t.is_finite());
    }
    Ok(out)
}

/// Two Hamiltonians diagonal in a shared known basis that differ only in
/// level `k0`: measure in that basis first, and only when the outcome is
/// `k0` spend `π/|ΔE|` discriminating the two energies.
pub fn scenario_shared_eigenbasis(e1: &[f64], e2: &[f64], k0: usize, trials: u64, seed: u64) -> Result<ScenarioResult> {
    let dim = e1.len();
    if dim == 0 || e2.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: e2.len() });
    }
    if k0 >= dim {
        return Err(Error::InvalidArgument("level index out of range"));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive"));
    }
    let scale = e1.iter().chain(e2).fold(1.0_f64, |m, v| m.max(v.abs()));
    if (0..dim).any(|k| k != k0 && (e1[k] - e2[k]).abs() > EXACT_TOL * scale) {
        return Err(Error::InvalidArgument("spectra must coincide away from the distinguished level"));
    }
    let delta = (e1[k0] - e2[k0]).abs();
    let level1 = HermitianOperator::diagonal(&[e1[k0]])?;
    let level2 = HermitianOperator::diagonal(&[e2[k0]])?;
    let dichotomic = min_discrimination_time(&level1, &level2, true)?;

    // Haar average of |ψ_k0|² is 1/dim.
    let strategy = dichotomic / dim as f64;
    let formula = PI / (dim as f64 * delta);

    let layout = SpaceLayout::plain(dim)?;
    let (mut hits, mut hits_sq) = (0.0, 0.0);
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial);
        let psi = haar_state(&mut rng, layout)?;
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut outcome = dim - 1;
        for (k, a) in psi.amplitudes().iter().enumerate() {
            acc += a.norm_sqr();
            if u < acc {
                outcome = k;
                break;
            }
        }
        let hit = if outcome == k0 { 1.0 } else { 0.0 };
        hits += hit;
        hits_sq += hit;
    }
    let freq = MonteCarloEstimate::from_sums(hits, hits_sq, trials);
    let expected_freq = 1.0 / dim as f64;

    let mut out = ScenarioResult::new("shared-eigenbasis");
    out.sweep = SweepTable::new(&["level", "e1", "e2", "stage_two_time"]);
    for k in 0..dim {
        out.sweep.push(vec![k as f64, e1[k], e2[k], if k == k0 { dichotomic } else { 0.0 }]);
    }
    out.set("dim", dim as f64);
    out.set("delta_e", delta);
    out.set("dichotomic_time", dichotomic);
    out.set("expected_time_strategy", strategy);
    out.set("expected_time_formula", formula);
    out.set("mc_frequency_k0", freq.mean);
    out.set("mc_frequency_stderr", freq.stderr);
    out.set("mc_expected_time", freq.mean * dichotomic);
    out.set("mc_expected_time_stderr", freq.stderr * dichotomic);
    out.pass = (strategy - formula).abs() <= EXACT_TOL * formula && (freq.mean - expected_freq).abs() <= 3.0 * freq.stderr;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spin_fields_example() {
        let r = scenario_spin_fields(1.0).unwrap();
        assert!(r.pass);
        assert!((r.metric("first_orthogonal_time") - PI / 4.0).abs() < 1e-12);
        assert_eq!(r.metric("d0"), 4.0);
        assert!((r.metric("discrepancy_factor") - 4.0).abs() < 1e-9);
        assert!((r.metric("sigma_y_h1") - 1.0).abs() < 1e-9);
        assert!((r.metric("sigma_y_h2") + 1.0).abs() < 1e-9);
        assert!(scenario_spin_fields(0.0).is_err());
    }

    #[test]
    fn spin_fields_scales_with_field() {
        let r = scenario_spin_fields(2.5).unwrap();
        assert!(r.pass);
        assert!((r.metric("first_orthogonal_time") - PI / 10.0).abs() < 1e-12);
    }

    #[test]
    fn phase_box_examples() {
        let r = scenario_phase_box(1.0, 0.0, &HermitianOperator::zero(1).unwrap()).unwrap();
        assert!(r.pass);
        assert!((r.metric("pi_over_d0") - PI).abs() < 1e-12);
        assert!(r.metric("max_unit_deviation_without_bypass") < 1e-12);

        let h0 = HermitianOperator::pauli_x().scale(0.3);
        assert!(scenario_phase_box(0.4, -0.9, &h0).unwrap().pass);
        assert!(matches!(scenario_phase_box(0.5, 0.5, &h0), Err(Error::Indistinguishable { .. })));
    }

    #[test]
    fn grover_step_matches_closed_form() {
        for d in [2, 5, 16] {
            let t = grover_crossing_time(1.0, d, 0, 1e-3, 0.9, 1_000_000).unwrap();
            let exact = grover_crossing_time_exact(1.0, d, 0.9);
            assert!((t - exact).abs() < 2e-3, "d={d}: {t} vs {exact}");
        }
    }

    #[test]
    fn farhi_gutmann_small() {
        let r = scenario_farhi_gutmann(1.0, &[2], 0.9).unwrap();
        assert!(r.pass);
        let t = r.metric("time_d2");
        assert!(t > 0.0 && t < 5.0);
        assert!(!r.metrics.contains_key("slope"));

        let r = scenario_farhi_gutmann(2.0, &[4, 16, 64], 0.9).unwrap();
        assert!((r.metric("slope") - 0.5).abs() < 0.05);
        assert!(r.metric("max_relative_error_vs_exact") < 0.02);

        assert!(scenario_farhi_gutmann(1.0, &[1], 0.9).is_err());
        assert!(scenario_farhi_gutmann(1.0, &[4], 0.4).is_err());
    }

    #[test]
    fn shared_eigenbasis_examples() {
        let r = scenario_shared_eigenbasis(&[0.0, 1.0, 2.0, 3.0], &[0.0, 3.0, 2.0, 3.0], 1, 20_000, 3).unwrap();
        assert!(r.pass);
        assert!((r.metric("expected_time_formula") - PI / 8.0).abs() < 1e-15);
        assert!((r.metric("expected_time_strategy") - PI / 8.0).abs() < 1e-12);

        let one = scenario_shared_eigenbasis(&[1.0], &[-1.0], 0, 100, 0).unwrap();
        assert!(one.pass);
        assert!((one.metric("expected_time_strategy") - PI / 2.0).abs() < 1e-12);

        assert!(scenario_shared_eigenbasis(&[1.0, 2.0], &[1.5, 2.5], 0, 10, 0).is_err());
        assert!(scenario_shared_eigenbasis(&[1.0, 2.0], &[1.0, 2.0], 0, 10, 0).is_err());
    }

    #[test]
    fn shared_eigenbasis_is_reproducible() {
        let a = scenario_shared_eigenbasis(&[0.0, 1.0, 2.0], &[0.0, 1.0, 5.0], 2, 5_000, 11).unwrap();
        let b = scenario_shared_eigenbasis(&[0.0, 1.0, 2.0], &[0.0, 1.0, 5.0], 2, 5_000, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fit_recovers_line() {
        let (s, i) = linear_fit(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]);
        assert!((s - 2.0).abs() < 1e-15 && (i - 1.0).abs() < 1e-15);
    }
}
