//! Estimating which of two Hamiltonians acts, with finite time and finite
//! error.
//!
//! Uncertainty of a guessing strategy, with `D` = D₀:
//!
//! ```text
//! ΔH = Σᵢ p(Hᵢ) Σⱼ p(j|Hᵢ) D(Hᵢ, Gⱼ)
//! ```
//!
//! For two equiprobable hypotheses the optimal strategy (saturating probe,
//! Helstrom measurement, maximum-a-posteriori guess) gives
//! `ΔH = max{0, (D₀/2)(1 − sin(D₀Δt/2))}`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::metric::{dist0, spread};
use crate::protocol::{discrimination_measurement, saturation_protocol_for_duration, simulate_protocol};
use crate::random::trial_rng;
use crate::spectral::{HermitianOperator, SpaceLayout};
use crate::{Error, Result};

/// Slack allowed on probability sums.
pub const DISTRIBUTION_TOL: f64 = 1e-10;

/// The constant in `ΔH·Δt ≥ 1/4`.
pub const PRODUCT_BOUND: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisPair {
    pub h1: HermitianOperator,
    pub h2: HermitianOperator,
    pub p1: f64,
    pub p2: f64,
}

impl HypothesisPair {
    pub fn new(h1: HermitianOperator, h2: HermitianOperator, p1: f64, p2: f64) -> Result<Self> {
        if h1.dim() != h2.dim() {
            return Err(Error::DimensionMismatch { expected: h1.dim(), got: h2.dim() });
        }
        if !(p1 >= 0.0 && p2 >= 0.0) || (p1 + p2 - 1.0).abs() > DISTRIBUTION_TOL {
            return Err(Error::MalformedDistribution { sum: p1 + p2 });
        }
        Ok(Self { h1, h2, p1, p2 })
    }

    pub fn equiprobable(h1: HermitianOperator, h2: HermitianOperator) -> Result<Self> {
        Self::new(h1, h2, 0.5, 0.5)
    }

    pub fn d0(&self) -> Result<f64> {
        dist0(&self.h1, &self.h2)
    }
}

/// Minimum error probability `(1 − √(1 − |⟨ψ₁|ψ₂⟩|²))/2` for two
/// equiprobable pure states.
pub fn helstrom_error(overlap_magnitude: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&overlap_magnitude) {
        return Err(Error::InvalidArgument("overlap magnitude must lie in [0, 1]"));
    }
    let ov2 = overlap_magnitude * overlap_magnitude;
    Ok(0.5 * (1.0 - (1.0 - ov2).sqrt()))
}

/// Outcome statistics `p(j|Hᵢ)` (rows `i`, columns `j`) plus the guess made
/// on each outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct GuessingStrategy {
    pub conditionals: Vec<Vec<f64>>,
    pub guesses: Vec<HermitianOperator>,
}

/// `Σᵢ p(Hᵢ) Σⱼ p(j|Hᵢ) D(Hᵢ, Gⱼ)`.
pub fn estimation_uncertainty<D>(
    hypotheses: &[HermitianOperator],
    priors: &[f64],
    strategy: &GuessingStrategy,
    distance: D,
) -> Result<f64>
where
    D: Fn(&HermitianOperator, &HermitianOperator) -> Result<f64>,
{
    if priors.len() != hypotheses.len() {
        return Err(Error::DimensionMismatch { expected: hypotheses.len(), got: priors.len() });
    }
    if strategy.conditionals.len() != hypotheses.len() {
        return Err(Error::DimensionMismatch { expected: hypotheses.len(), got: strategy.conditionals.len() });
    }
    check_distribution(priors)?;
    let mut total = 0.0;
    for ((h, &prior), row) in hypotheses.iter().zip(priors).zip(&strategy.conditionals) {
        if row.len() != strategy.guesses.len() {
            return Err(Error::DimensionMismatch { expected: strategy.guesses.len(), got: row.len() });
        }
        check_distribution(row)?;
        for (&p, g) in row.iter().zip(&strategy.guesses) {
            if p > 0.0 {
                total += prior * p * distance(h, g)?;
            }
        }
    }
    Ok(total)
}

fn check_distribution(p: &[f64]) -> Result<()> {
    let sum: f64 = p.iter().sum();
    if p.iter().any(|&x| !(x >= 0.0)) || (sum - 1.0).abs() > DISTRIBUTION_TOL {
        return Err(Error::MalformedDistribution { sum });
    }
    Ok(())
}

/// Maximum-a-posteriori guess; ties go to `h1`.
pub fn optimal_guess<'a>(
    posterior1: f64,
    posterior2: f64,
    h1: &'a HermitianOperator,
    h2: &'a HermitianOperator,
) -> Result<&'a HermitianOperator> {
    check_distribution(&[posterior1, posterior2])?;
    Ok(if posterior2 > posterior1 { h2 } else { h1 })
}

/// Contribution `½ p(j|H₁) D(H₁, G) + ½ p(j|H₂) D(H₂, G)` of one outcome.
pub fn outcome_contribution(
    p_given_1: f64,
    p_given_2: f64,
    h1: &HermitianOperator,
    h2: &HermitianOperator,
    guess: &HermitianOperator,
) -> Result<f64> {
    Ok(0.5 * p_given_1 * dist0(h1, guess)? + 0.5 * p_given_2 * dist0(h2, guess)?)
}

/// `max{0, (D₀/2)(1 − sin(D₀Δt/2))}`.
pub fn dichotomic_uncertainty(d0: f64, delta_t: f64) -> Result<f64> {
    if !(d0 > 0.0) {
        return Err(Error::InvalidArgument("D0 must be positive"));
    }
    if !(delta_t >= 0.0) {
        return Err(Error::InvalidArgument("delta_t must be nonnegative"));
    }
    let x = 0.5 * d0 * delta_t;
    if x >= FRAC_PI_2 {
        return Ok(0.0);
    }
    Ok((0.5 * d0 * (1.0 - x.sin())).max(0.0))
}

/// One point of the `ΔH·Δt` curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyReport {
    pub delta_t: f64,
    pub delta_h: f64,
    pub product: f64,
    /// `product ≥ 1/4`.
    pub bound_satisfied: bool,
}

impl UncertaintyReport {
    pub fn new(delta_t: f64, delta_h: f64) -> Self {
        let product = delta_t * delta_h;
        Self { delta_t, delta_h, product, bound_satisfied: product >= PRODUCT_BOUND }
    }
}

/// `x(1 − sin x)` with `x = D₀Δt/2`, and zero once `Δt ≥ π/D₀`.
pub fn product_in_x(x: f64) -> f64 {
    if x >= FRAC_PI_2 {
        0.0
    } else {
        x * (1.0 - x.sin())
    }
}

pub fn uncertainty_product_curve(d0: f64, grid: &[f64]) -> Result<Vec<UncertaintyReport>> {
    grid.iter().map(|&dt| Ok(UncertaintyReport::new(dt, dichotomic_uncertainty(d0, dt)?))).collect()
}

/// Evenly spaced `points` values of Δt on `[0, π/D₀]`.
pub fn delta_t_grid(d0: f64, points: usize) -> Vec<f64> {
    let end = PI / d0;
    match points {
        0 => vec![],
        1 => vec![0.0],
        n => (0..n).map(|k| end * k as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductOptimum {
    /// Maximizer in `x = D₀Δt/2`; independent of D₀.
    pub x_star: f64,
    pub delta_t_star: f64,
    pub product_star: f64,
    pub bound_satisfied: bool,
}

/// Maximizes `x(1 − sin x)` by bisecting its derivative
/// `1 − sin x − x cos x`, which is positive at 0 and negative at 1.
pub fn max_uncertainty_product(d0: f64) -> Result<ProductOptimum> {
    if !(d0 > 0.0) {
        return Err(Error::InvalidArgument("D0 must be positive"));
    }
    let x_star = product_maximizer();
    let product_star = product_in_x(x_star);
    Ok(ProductOptimum {
        x_star,
        delta_t_star: 2.0 * x_star / d0,
        product_star,
        bound_satisfied: product_star >= PRODUCT_BOUND,
    })
}

pub(crate) fn product_maximizer() -> f64 {
    let slope = |x: f64| 1.0 - x.sin() - x * x.cos();
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if slope(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Born statistics of the optimal two-hypothesis strategy at a fixed Δt.
///
/// `probabilities[i][j]` is `p(j | H_{i+1})` for outcome `j ∈ {+, −}` of the
/// measurement `(ψ∥ ± ψ⊥)/√2`; `guess[j]` is 0 for H₁ and 1 for H₂.
#[derive(Debug, Clone, PartialEq)]
pub struct DichotomicExperiment {
    pub d0: f64,
    pub delta_t: f64,
    pub overlap: f64,
    pub probabilities: [[f64; 2]; 2],
    pub guess: [usize; 2],
}

/// Trotter steps used by default when preparing the probe states.
pub const DEFAULT_TROTTER_STEPS: usize = 1000;

impl DichotomicExperiment {
    /// Runs the saturation protocol for a total exposure `delta_t` (ν = ½,
    /// `trotter_steps` splittings) and builds the Helstrom measurement.
    pub fn prepare(pair: &HypothesisPair, delta_t: f64, trotter_steps: usize) -> Result<Self> {
        if (pair.p1 - 0.5).abs() > DISTRIBUTION_TOL {
            return Err(Error::Unsupported("only equal priors are analyzed in closed form"));
        }
        if !(delta_t >= 0.0) || !delta_t.is_finite() {
            return Err(Error::InvalidArgument("delta_t must be finite and nonnegative"));
        }
        let d0 = pair.d0()?;
        let diff = pair.h1.sub(&pair.h2)?;
        // A no-box branch is only needed when the |E| terms of D0 dominate.
        let nobox = usize::from(spread(&diff)? < d0 * (1.0 - 1e-9));
        let layout = SpaceLayout::new(pair.h1.dim(), nobox, 1)?;
        let proto = saturation_protocol_for_duration(&pair.h1, &pair.h2, layout, trotter_steps, 0.5, delta_t)?;
        let out = simulate_protocol(&proto, &pair.h1, &pair.h2)?;
        let basis = discrimination_measurement(&out.psi1, &out.psi2)?;
        let probabilities = [normalize2(basis.probabilities(&out.psi1)?), normalize2(basis.probabilities(&out.psi2)?)];
        let guess = [0, 1].map(|j| usize::from(probabilities[1][j] > probabilities[0][j]));
        // Rounding can push the magnitude a hair above one.
        let overlap = out.psi1.fidelity_amplitude(&out.psi2)?.min(1.0);
        Ok(Self { d0, delta_t, overlap, probabilities, guess })
    }

    /// Expected ΔH from the Born probabilities (no sampling).
    pub fn exact_uncertainty(&self) -> f64 {
        let mut total = 0.0;
        for truth in 0..2 {
            for j in 0..2 {
                if self.guess[j] != truth {
                    total += 0.5 * self.probabilities[truth][j] * self.d0;
                }
            }
        }
        total
    }

    pub fn error_probability(&self) -> f64 {
        self.exact_uncertainty() / self.d0
    }

    /// Monte-Carlo ΔH: each trial draws the true hypothesis (equal priors)
    /// and an outcome from its own `(seed, trial)` stream, guesses by MAP and
    /// scores D₀ for a wrong guess.
    pub fn sample(&self, trials: u64, seed: u64) -> Result<MonteCarloEstimate> {
        if trials == 0 {
            return Err(Error::InvalidArgument("need at least one trial"));
        }
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for trial in 0..trials {
            let mut rng = trial_rng(seed, trial);
            let truth = usize::from(rng.gen::<f64>() >= 0.5);
            let outcome = usize::from(rng.gen::<f64>() >= self.probabilities[truth][0]);
            let loss = if self.guess[outcome] == truth { 0.0 } else { self.d0 };
            sum += loss;
            sum_sq += loss * loss;
        }
        Ok(MonteCarloEstimate::from_sums(sum, sum_sq, trials))
    }
}

fn normalize2(p: [f64; 2]) -> [f64; 2] {
    let s = p[0] + p[1];
    [p[0] / s, p[1] / s]
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
}

impl MonteCarloEstimate {
    pub fn from_sums(sum: f64, sum_sq: f64, trials: u64) -> Self {
        let n = trials as f64;
        let mean = sum / n;
        let var = if trials > 1 { ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
        Self { mean, stderr: (var / n).sqrt(), trials }
    }

    /// `|mean − expected| ≤ k·stderr`.
    pub fn agrees_with(&self, expected: f64, k: f64) -> bool {
        (self.mean - expected).abs() <= k * self.stderr
    }
}

/// One row of an estimation sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationPoint {
    pub delta_t: f64,
    pub delta_h_closed: f64,
    pub delta_h_empirical: f64,
    pub stderr: f64,
    pub product: f64,
    pub bound_025_ok: bool,
}

/// Simulated ΔH at one Δt; equal priors only.
pub fn simulate_dichotomic_estimation(
    pair: &HypothesisPair,
    delta_t: f64,
    trials: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    DichotomicExperiment::prepare(pair, delta_t, DEFAULT_TROTTER_STEPS)?.sample(trials, seed)
}

/// Sweep over `grid`, trial streams keyed by `(seed + point index, trial)`.
pub fn estimation_sweep(
    pair: &HypothesisPair,
    grid: &[f64],
    trials: u64,
    seed: u64,
    trotter_steps: usize,
) -> Result<Vec<EstimationPoint>> {
    let d0 = pair.d0()?;
    grid.iter()
        .enumerate()
        .map(|(k, &dt)| {
            let exp = DichotomicExperiment::prepare(pair, dt, trotter_steps)?;
            let mc = exp.sample(trials, seed.wrapping_add(k as u64))?;
            let report = UncertaintyReport::new(dt, mc.mean);
            Ok(EstimationPoint {
                delta_t: dt,
                delta_h_closed: dichotomic_uncertainty(d0, dt)?,
                delta_h_empirical: mc.mean,
                stderr: mc.stderr,
                product: report.product,
                bound_025_ok: report.bound_satisfied,
            })
        })
        .collect()
}
