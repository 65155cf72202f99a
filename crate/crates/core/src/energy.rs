//! Accuracy of energy measurements when the Hamiltonian is not known in
//! advance.
//!
//! The accuracy of a measurement reporting `E'` on an eigenstate of energy
//! `E` is the mean absolute deviation `Σ p(E'|E) |E' − E|`; on a general state
//! it is averaged with the ideal Born weights `|⟨E|ψ⟩|²`.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::estimation::{max_uncertainty_product, UncertaintyReport};
use crate::metric::dist0;
use crate::protocol::{discrimination_measurement, simulate_protocol, DiscriminationProtocol, ProtocolStep};
use crate::quad;
use crate::random::{open_unit, trial_rng};
use crate::spectral::{tie_tolerance, HermitianOperator, QuantumState, SpaceLayout};
use crate::{Error, Result};

/// Normalization slack for discrete conditional tables.
pub const TABLE_TOL: f64 = 1e-9;
/// Normalization slack for densities.
pub const DENSITY_TOL: f64 = 1e-6;

/// Ideal von Neumann statistics: distinct eigenvalues with their total Born
/// weight, ascending.
pub fn ideal_energy_distribution(h: &HermitianOperator, psi: &QuantumState) -> Result<Vec<(f64, f64)>> {
    if h.dim() != psi.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), got: psi.dim() });
    }
    let e = h.eig()?;
    let tol = tie_tolerance(&e.values);
    let amps = psi.amplitudes();
    let mut out: Vec<(f64, f64, usize)> = Vec::new();
    for k in 0..e.dim() {
        let w: f64 = (0..e.dim())
            .map(|i| e.vectors[(i, k)].conj() * amps[i])
            .sum::<Complex64>()
            .norm_sqr();
        match out.last_mut() {
            Some((energy, weight, count)) if (e.values[k] - *energy / *count as f64).abs() <= tol => {
                *energy += e.values[k];
                *weight += w;
                *count += 1;
            }
            _ => out.push((e.values[k], w, 1)),
        }
    }
    Ok(out.into_iter().map(|(sum, w, n)| (sum / n as f64, w)).collect())
}

/// `p(E'|E)` for one true energy.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalRow {
    pub energy: f64,
    /// `(reported energy, probability)` pairs.
    pub outcomes: Vec<(f64, f64)>,
}

/// Density of the report offset `E' − E`, checked for normalization at use.
#[derive(Clone)]
pub struct NumericDensity {
    density: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// Width scale used to start the cutoff sequence.
    pub scale: f64,
}

impl NumericDensity {
    pub fn new(scale: f64, density: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { density: Arc::new(density), scale }
    }

    pub fn eval(&self, offset: f64) -> f64 {
        (self.density)(offset)
    }
}

impl fmt::Debug for NumericDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NumericDensity").field("scale", &self.scale).finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum MeasurementModel {
    /// Always reports the true energy.
    Perfect,
    /// Finite table of conditional distributions keyed by true energy.
    Discrete(Vec<ConditionalRow>),
    /// Lorentzian line `(γ/π) / (γ² + (E' − E)²)`.
    Lorentzian { gamma: f64 },
    /// Gaussian report offset of standard deviation `sigma`.
    Gaussian { sigma: f64 },
    /// Arbitrary offset density; divergence found by cutoff doubling.
    Numeric(NumericDensity),
}

/// A finite mean absolute deviation, or an explicit divergence with the
/// truncated values that show the growth.
#[derive(Debug, Clone, PartialEq)]
pub enum Accuracy {
    Finite(f64),
    Divergent { growth: Vec<(f64, f64)> },
}

impl Accuracy {
    pub fn is_divergent(&self) -> bool {
        matches!(self, Accuracy::Divergent { .. })
    }

    pub fn value(&self) -> f64 {
        match self {
            Accuracy::Finite(v) => *v,
            Accuracy::Divergent { .. } => f64::INFINITY,
        }
    }
}

/// Cutoffs (in units of the model scale) for reported growth tables.
pub const GROWTH_CUTOFFS: [f64; 4] = [10.0, 100.0, 1000.0, 10000.0];

impl MeasurementModel {
    fn scale(&self) -> f64 {
        match self {
            MeasurementModel::Lorentzian { gamma } => *gamma,
            MeasurementModel::Gaussian { sigma } => *sigma,
            MeasurementModel::Numeric(d) => d.scale,
            _ => 1.0,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            MeasurementModel::Perfect => Ok(()),
            MeasurementModel::Discrete(rows) => {
                for r in rows {
                    let sum: f64 = r.outcomes.iter().map(|o| o.1).sum();
                    if r.outcomes.iter().any(|o| !(o.1 >= 0.0)) || (sum - 1.0).abs() > TABLE_TOL {
                        return Err(Error::MalformedDistribution { sum });
                    }
                }
                Ok(())
            }
            MeasurementModel::Lorentzian { gamma } if !(*gamma > 0.0) => {
                Err(Error::InvalidArgument("Lorentzian width must be positive"))
            }
            MeasurementModel::Gaussian { sigma } if !(*sigma > 0.0) => {
                Err(Error::InvalidArgument("Gaussian width must be positive"))
            }
            MeasurementModel::Numeric(d) => {
                if !(d.scale > 0.0) {
                    return Err(Error::InvalidArgument("density scale must be positive"));
                }
                let mass = numeric_mass(d);
                if (mass - 1.0).abs() > DENSITY_TOL {
                    return Err(Error::MalformedDistribution { sum: mass });
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn row(&self, energy: f64) -> Result<&ConditionalRow> {
        let MeasurementModel::Discrete(rows) = self else {
            unreachable!("row lookup on a non-tabulated model")
        };
        let tol = TABLE_TOL * energy.abs().max(1.0);
        rows.iter().find(|r| (r.energy - energy).abs() <= tol).ok_or(Error::OutsideDomain(energy))
    }

    /// `∫_{|E'−E| ≤ Λ} p(E'|E) |E' − E|`.
    pub fn truncated_accuracy(&self, energy: f64, cutoff: f64) -> Result<f64> {
        self.validate()?;
        Ok(match self {
            MeasurementModel::Perfect => 0.0,
            MeasurementModel::Discrete(_) => self
                .row(energy)?
                .outcomes
                .iter()
                .filter(|(e, _)| (e - energy).abs() <= cutoff)
                .map(|(e, p)| p * (e - energy).abs())
                .sum(),
            MeasurementModel::Lorentzian { gamma } => lorentzian_truncated_accuracy(*gamma, cutoff),
            MeasurementModel::Gaussian { sigma } => {
                sigma * (2.0 / PI).sqrt() * (1.0 - (-cutoff * cutoff / (2.0 * sigma * sigma)).exp())
            }
            MeasurementModel::Numeric(d) => numeric_abs_moment(d, 0.0, cutoff),
        })
    }

    fn growth_table(&self, energy: f64) -> Result<Vec<(f64, f64)>> {
        let s = self.scale();
        GROWTH_CUTOFFS.iter().map(|&c| Ok((c * s, self.truncated_accuracy(energy, c * s)?))).collect()
    }
}

/// `(γ/π) ln(1 + Λ²/γ²)`.
pub fn lorentzian_truncated_accuracy(gamma: f64, cutoff: f64) -> f64 {
    gamma / PI * (1.0 + (cutoff / gamma).powi(2)).ln()
}

fn symmetric_shell<F: Fn(f64) -> f64>(d: &NumericDensity, weight: F, lo: f64, hi: f64) -> f64 {
    let tol = 1e-13 * d.scale.max(1.0);
    quad::integrate(|x| weight(x) * (d.eval(x) + d.eval(-x)), lo, hi, tol)
}

const MAX_DOUBLINGS: usize = 64;

fn numeric_mass(d: &NumericDensity) -> f64 {
    let mut total = symmetric_shell(d, |_| 1.0, 0.0, d.scale);
    let mut cutoff = d.scale;
    for _ in 0..MAX_DOUBLINGS {
        let shell = symmetric_shell(d, |_| 1.0, cutoff, 2.0 * cutoff);
        total += shell;
        cutoff *= 2.0;
        if shell <= 1e-13 {
            break;
        }
    }
    total
}

fn numeric_abs_moment(d: &NumericDensity, lo: f64, hi: f64) -> f64 {
    // Split at the scale so the core of the density is resolved.
    let mid = d.scale.min(hi).max(lo);
    symmetric_shell(d, |x| x, lo, mid) + symmetric_shell(d, |x| x, mid, hi)
}

/// Cutoff-doubling test on `M(Λ) = ∫_{-Λ}^{Λ} |x| f(x) dx`: converged once a
/// doubling changes `M` by a negligible amount, divergent when increments
/// stop shrinking over eight consecutive doublings.
fn numeric_accuracy(d: &NumericDensity) -> Accuracy {
    let mut cutoff = d.scale;
    let mut total = numeric_abs_moment(d, 0.0, cutoff);
    let mut increments: Vec<f64> = Vec::new();
    let mut growth = vec![(cutoff, total)];
    for k in 0..MAX_DOUBLINGS {
        let inc = numeric_abs_moment(d, cutoff, 2.0 * cutoff);
        total += inc;
        cutoff *= 2.0;
        growth.push((cutoff, total));
        if inc <= 1e-10 * total.max(d.scale) {
            return Accuracy::Finite(total);
        }
        increments.push(inc);
        if k >= 8 {
            let recent = &increments[increments.len() - 9..];
            if recent.windows(2).all(|w| w[1] >= 0.9 * w[0]) {
                return Accuracy::Divergent { growth };
            }
        }
    }
    Accuracy::Divergent { growth }
}

/// Mean absolute deviation of the reported energy on the eigenstate `E`.
pub fn accuracy_eigenstate(model: &MeasurementModel, energy: f64) -> Result<Accuracy> {
    model.validate()?;
    Ok(match model {
        MeasurementModel::Perfect => Accuracy::Finite(0.0),
        MeasurementModel::Discrete(_) => {
            let row = model.row(energy)?;
            Accuracy::Finite(row.outcomes.iter().map(|(e, p)| p * (e - energy).abs()).sum())
        }
        // First absolute moment of a Lorentzian diverges logarithmically.
        MeasurementModel::Lorentzian { .. } => Accuracy::Divergent { growth: model.growth_table(energy)? },
        MeasurementModel::Gaussian { sigma } => Accuracy::Finite(sigma * (2.0 / PI).sqrt()),
        MeasurementModel::Numeric(d) => numeric_accuracy(d),
    })
}

/// Weights below this are treated as absent from the state.
const WEIGHT_FLOOR: f64 = 1e-15;

/// Born-weighted accuracy over the ideal energy distribution of `psi`.
pub fn accuracy_state(model: &MeasurementModel, h: &HermitianOperator, psi: &QuantumState) -> Result<Accuracy> {
    let dist = ideal_energy_distribution(h, psi)?;
    let mut total = 0.0;
    let mut divergent = false;
    for &(e, w) in &dist {
        if w <= WEIGHT_FLOOR {
            continue;
        }
        match accuracy_eigenstate(model, e)? {
            Accuracy::Finite(v) => total += w * v,
            Accuracy::Divergent { .. } => divergent = true,
        }
    }
    if !divergent {
        return Ok(Accuracy::Finite(total));
    }
    let s = model.scale();
    let mut growth = Vec::with_capacity(GROWTH_CUTOFFS.len());
    for &c in &GROWTH_CUTOFFS {
        let mut v = 0.0;
        for &(e, w) in dist.iter().filter(|d| d.1 > WEIGHT_FLOOR) {
            v += w * model.truncated_accuracy(e, c * s)?;
        }
        growth.push((c * s, v));
    }
    Ok(Accuracy::Divergent { growth })
}

/// Result of the two-hypothesis reduction `H₀` vs `H₀ + εI`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpyReport {
    pub epsilon: f64,
    pub level_energy: f64,
    pub overlap: f64,
    pub error_probability: f64,
    /// `ε · p_E`.
    pub delta_e_spy: f64,
    /// D₀ of the spy pair (equals ε).
    pub d0: f64,
    pub report: UncertaintyReport,
}

/// Lower-bounds `Δt·ΔE` by the easier problem where the Hamiltonian is known
/// to be `H₀` or `H₀ + εI`, with ε chosen to maximize the dichotomic product.
///
/// The eigenstate `level_index` of `H₀` is identified first; the remaining
/// two-energy question is answered by sending that state through the box in
/// superposition with the no-box branch for a time `Δt`, then measuring with
/// the Helstrom basis.
pub fn spy_bound_experiment(h0: &HermitianOperator, level_index: usize, delta_t: f64) -> Result<SpyReport> {
    if !(delta_t > 0.0) || !delta_t.is_finite() {
        return Err(Error::InvalidArgument("delta_t must be positive"));
    }
    let e = h0.eig()?;
    if level_index >= e.dim() {
        return Err(Error::InvalidArgument("level index out of range"));
    }
    let opt = max_uncertainty_product(1.0)?;
    let epsilon = 2.0 * opt.x_star / delta_t;
    let h1 = h0.shifted(epsilon);

    let dim = h0.dim();
    let layout = SpaceLayout::new(dim, 1, 1)?;
    let level = e.vector(level_index);
    let mut amps: Vec<Complex64> = level.iter().map(|a| a * FRAC_1_SQRT_2).collect();
    amps.push(Complex64::new(FRAC_1_SQRT_2, 0.0));
    let probe = QuantumState::new(layout, amps)?;
    let proto = DiscriminationProtocol::new(layout, probe, vec![ProtocolStep::dwell_only(delta_t, layout.total_dim())?])?;
    let out = simulate_protocol(&proto, h0, &h1)?;
    let basis = discrimination_measurement(&out.psi1, &out.psi2)?;
    let error_probability = basis.error_probability(&out.psi1, &out.psi2)?;
    let delta_e_spy = epsilon * error_probability;
    Ok(SpyReport {
        epsilon,
        level_energy: e.values[level_index],
        overlap: out.psi1.fidelity_amplitude(&out.psi2)?,
        error_probability,
        delta_e_spy,
        d0: dist0(h0, &h1)?,
        report: UncertaintyReport::new(delta_t, delta_e_spy),
    })
}

/// Radiative decay as a universal energy measurement: exponential decay
/// time of rate γ and a Lorentzian photon line of half-width γ centred on E₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayModel {
    gamma: f64,
    e0: f64,
}

impl DecayModel {
    pub fn new(gamma: f64, e0: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() || !e0.is_finite() {
            return Err(Error::InvalidArgument("decay rate must be positive and finite"));
        }
        Ok(Self { gamma, e0 })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn e0(&self) -> f64 {
        self.e0
    }

    pub fn mean_decay_time(&self) -> f64 {
        1.0 / self.gamma
    }

    pub fn line_density(&self, energy: f64) -> f64 {
        let d = energy - self.e0;
        self.gamma / (PI * (self.gamma * self.gamma + d * d))
    }

    pub fn measurement_model(&self) -> MeasurementModel {
        MeasurementModel::Lorentzian { gamma: self.gamma }
    }

    /// `(decay time, photon energy)` by inverse CDF.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let t = -open_unit(rng).ln() / self.gamma;
        let e = self.e0 + self.gamma * (PI * (open_unit(rng) - 0.5)).tan();
        (t, e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffRow {
    pub lambda: f64,
    pub truncated_empirical: f64,
    pub truncated_closed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub trials: u64,
    pub mean_time: f64,
    pub mean_time_stderr: f64,
    pub fwhm: f64,
    pub cutoffs: Vec<CutoffRow>,
    /// Mean lifetime times linewidth, `γ⁻¹ · γ`.
    pub lifetime_linewidth_product: f64,
    pub accuracy: Accuracy,
}

pub const MIN_DECAY_TRIALS: u64 = 10_000;
/// Truncation cutoffs in units of γ.
pub const DECAY_CUTOFFS: [f64; 3] = [10.0, 100.0, 1000.0];
/// Histogram bins per γ, and half-range in units of γ.
pub const BINS_PER_GAMMA: usize = 20;
pub const HALF_RANGE_GAMMAS: usize = 20;

pub fn decay_measurement_simulation(model: &DecayModel, trials: u64, seed: u64) -> Result<DecayReport> {
    if trials < MIN_DECAY_TRIALS {
        return Err(Error::InvalidArgument("decay simulation needs at least 10^4 trials"));
    }
    let gamma = model.gamma();
    let nbins = 2 * HALF_RANGE_GAMMAS * BINS_PER_GAMMA;
    let width = gamma / BINS_PER_GAMMA as f64;
    let lo = model.e0() - HALF_RANGE_GAMMAS as f64 * gamma;
    let mut hist = vec![0u64; nbins];
    let mut t_sum = 0.0;
    let mut t_sq = 0.0;
    let mut truncated = [0.0; DECAY_CUTOFFS.len()];
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial);
        let (t, e) = model.sample(&mut rng);
        t_sum += t;
        t_sq += t * t;
        let offset = (e - model.e0()).abs();
        for (acc, c) in truncated.iter_mut().zip(DECAY_CUTOFFS) {
            if offset <= c * gamma {
                *acc += offset;
            }
        }
        let pos = (e - lo) / width;
        if pos >= 0.0 && pos < nbins as f64 {
            hist[pos as usize] += 1;
        }
    }
    let n = trials as f64;
    let time = crate::estimation::MonteCarloEstimate::from_sums(t_sum, t_sq, trials);
    let cutoffs = DECAY_CUTOFFS
        .iter()
        .zip(truncated)
        .map(|(&c, s)| CutoffRow {
            lambda: c * gamma,
            truncated_empirical: s / n,
            truncated_closed: lorentzian_truncated_accuracy(gamma, c * gamma),
        })
        .collect();
    Ok(DecayReport {
        trials,
        mean_time: time.mean,
        mean_time_stderr: time.stderr,
        fwhm: histogram_fwhm(&hist, lo, width)?,
        cutoffs,
        lifetime_linewidth_product: model.mean_decay_time() * gamma,
        accuracy: accuracy_eigenstate(&model.measurement_model(), model.e0())?,
    })
}

/// Full width at half the tallest bin, with both crossings linearly
/// interpolated between bin centres.
fn histogram_fwhm(hist: &[u64], lo: f64, width: f64) -> Result<f64> {
    let (peak, &top) = hist
        .iter()
        .enumerate()
        .max_by_key(|&(i, &c)| (c, core::cmp::Reverse(i)))
        .ok_or(Error::Numerical("empty histogram"))?;
    let half = top as f64 / 2.0;
    let centre = |i: usize| lo + (i as f64 + 0.5) * width;
    let h = |i: usize| hist[i] as f64;

    let mut r = peak;
    while r + 1 < hist.len() && h(r + 1) >= half {
        r += 1;
    }
    let mut l = peak;
    while l > 0 && h(l - 1) >= half {
        l -= 1;
    }
    if r + 1 >= hist.len() || l == 0 {
        return Err(Error::Numerical("line wider than histogram range"));
    }
    let right = centre(r) + (h(r) - half) / (h(r) - h(r + 1)) * width;
    let left = centre(l) - (h(l) - half) / (h(l) - h(l - 1)) * width;
    Ok(right - left)
}
