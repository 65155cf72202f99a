//! Discrimination protocols: alternate exposures to the unknown Hamiltonian
//! with instantaneous control unitaries, and track the angle between the two
//! hypothesis-conditioned states.
//!
//! The states are written as
//!
//! ```text
//! ψ₁ = e^{+iχ/2} (cos(θ/2) ψ∥ + sin(θ/2) ψ⊥)
//! ψ₂ = e^{−iχ/2} (cos(θ/2) ψ∥ − sin(θ/2) ψ⊥),   0 ≤ θ ≤ π/2
//! ```
//!
//! so `|⟨ψ₁|ψ₂⟩| = cos θ` and certain discrimination means `θ = π/2`. The
//! angle can grow no faster than `D₀/2` per unit exposure.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg;
use crate::metric::{dist0, HamiltonianSchedule};
use crate::spectral::{extend_to_layout, EigenSystem, HermitianOperator, QuantumState, SpaceLayout, Unitary};
use crate::{Error, Result};

/// Tolerance for "the control left the overlap unchanged".
pub const CONTROL_DRIFT_TOL: f64 = 1e-10;

/// One exposure of length `dwell` followed by `control`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolStep {
    pub dwell: f64,
    pub control: Unitary,
}

impl ProtocolStep {
    pub fn new(dwell: f64, control: Unitary) -> Result<Self> {
        if !(dwell >= 0.0) || !dwell.is_finite() {
            return Err(Error::InvalidArgument("dwell times must be finite and nonnegative"));
        }
        Ok(Self { dwell, control })
    }

    /// Exposure without a control.
    pub fn dwell_only(dwell: f64, dim: usize) -> Result<Self> {
        Self::new(dwell, Unitary::identity(dim))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminationProtocol {
    layout: SpaceLayout,
    initial: QuantumState,
    steps: Vec<ProtocolStep>,
}

impl DiscriminationProtocol {
    pub fn new(layout: SpaceLayout, initial: QuantumState, steps: Vec<ProtocolStep>) -> Result<Self> {
        let dim = layout.total_dim();
        if initial.layout() != layout {
            return Err(Error::InvalidLayout("initial state layout differs from protocol layout"));
        }
        for s in &steps {
            if s.control.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: s.control.dim() });
            }
        }
        Ok(Self { layout, initial, steps })
    }

    pub fn layout(&self) -> SpaceLayout {
        self.layout
    }

    pub fn initial(&self) -> &QuantumState {
        &self.initial
    }

    pub fn steps(&self) -> &[ProtocolStep] {
        &self.steps
    }

    pub fn total_dwell(&self) -> f64 {
        self.steps.iter().map(|s| s.dwell).sum()
    }
}

/// Overlap history, one sample at `t = 0` and one after every step.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub overlaps: Vec<Complex64>,
    pub thetas: Vec<f64>,
    /// Largest change of `⟨ψ¹|ψ²⟩` caused by applying a control.
    pub control_drift: f64,
}

impl Trajectory {
    fn push(&mut self, t: f64, overlap: Complex64) {
        self.times.push(t);
        self.overlaps.push(overlap);
        self.thetas.push(theta_from_overlap(overlap.norm()));
    }

    pub fn final_theta(&self) -> f64 {
        *self.thetas.last().expect("trajectory has the t = 0 sample")
    }

    pub fn final_overlap(&self) -> Complex64 {
        *self.overlaps.last().expect("trajectory has the t = 0 sample")
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// `arccos` of an overlap magnitude clamped to `[0, 1]`.
pub fn theta_from_overlap(magnitude: f64) -> f64 {
    magnitude.clamp(0.0, 1.0).acos()
}

/// Trajectory plus the two final states.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolOutcome {
    pub trajectory: Trajectory,
    pub psi1: QuantumState,
    pub psi2: QuantumState,
}

pub fn run_protocol(
    proto: &DiscriminationProtocol,
    h1_box: &HermitianOperator,
    h2_box: &HermitianOperator,
) -> Result<Trajectory> {
    Ok(simulate_protocol(proto, h1_box, h2_box)?.trajectory)
}

/// Evolves the shared initial state under both extended Hamiltonians with
/// the same controls.
pub fn simulate_protocol(
    proto: &DiscriminationProtocol,
    h1_box: &HermitianOperator,
    h2_box: &HermitianOperator,
) -> Result<ProtocolOutcome> {
    let layout = proto.layout();
    let e1 = extend_to_layout(h1_box, layout)?.eig()?;
    let e2 = extend_to_layout(h2_box, layout)?.eig()?;
    let steps = proto.steps().iter().map(|s| (s.dwell, &s.control, &e1, &e2));
    drive(layout, proto.initial(), steps)
}

/// Piecewise-constant time-dependent pair: segment `k` is applied for its
/// whole duration, then `controls[k]`.
pub fn run_schedule(
    layout: SpaceLayout,
    initial: &QuantumState,
    schedule: &HamiltonianSchedule,
    controls: &[Unitary],
) -> Result<ProtocolOutcome> {
    if controls.len() != schedule.segments().len() {
        return Err(Error::InvalidArgument("need one control per schedule segment"));
    }
    if initial.layout() != layout {
        return Err(Error::InvalidLayout("initial state layout differs from protocol layout"));
    }
    let mut eigs = Vec::with_capacity(controls.len());
    for s in schedule.segments() {
        eigs.push((extend_to_layout(&s.h1, layout)?.eig()?, extend_to_layout(&s.h2, layout)?.eig()?));
    }
    let steps = schedule
        .segments()
        .iter()
        .zip(controls)
        .zip(&eigs)
        .map(|((s, u), (a, b))| (s.duration, u, a, b));
    drive(layout, initial, steps)
}

fn drive<'a>(
    layout: SpaceLayout,
    initial: &QuantumState,
    steps: impl Iterator<Item = (f64, &'a Unitary, &'a EigenSystem, &'a EigenSystem)>,
) -> Result<ProtocolOutcome> {
    let mut psi1 = initial.amplitudes().to_vec();
    let mut psi2 = psi1.clone();
    let mut traj = Trajectory { times: vec![], overlaps: vec![], thetas: vec![], control_drift: 0.0 };
    let mut t = 0.0;
    traj.push(t, linalg::inner(&psi1, &psi2));
    for (dwell, control, e1, e2) in steps {
        if control.dim() != psi1.len() {
            return Err(Error::DimensionMismatch { expected: psi1.len(), got: control.dim() });
        }
        psi1 = e1.evolve_vector(dwell, &psi1)?;
        psi2 = e2.evolve_vector(dwell, &psi2)?;
        let before = linalg::inner(&psi1, &psi2);
        psi1 = control.apply(&psi1)?;
        psi2 = control.apply(&psi2)?;
        let after = linalg::inner(&psi1, &psi2);
        traj.control_drift = traj.control_drift.max((after - before).norm());
        t += dwell;
        traj.push(t, after);
    }
    Ok(ProtocolOutcome {
        trajectory: traj,
        psi1: QuantumState::from_raw(layout, psi1),
        psi2: QuantumState::from_raw(layout, psi2),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairDecomposition {
    pub theta: f64,
    pub chi: f64,
    pub psi_par: QuantumState,
    pub psi_perp: QuantumState,
}

/// Below this `sin(θ/2)` the pair is treated as identical up to phase.
const IDENTICAL_TOL: f64 = 1e-12;

/// Splits two states into a common phase `χ`, angle `θ` and the orthonormal
/// pair `ψ∥, ψ⊥`.
pub fn decompose_pair(psi1: &QuantumState, psi2: &QuantumState) -> Result<PairDecomposition> {
    let z = psi1.inner(psi2)?;
    // ⟨ψ₁|ψ₂⟩ = e^{−iχ} cos θ
    let chi = if z.norm() > 0.0 { -z.arg() } else { 0.0 };
    let layout = psi1.layout();
    let rot1 = Complex64::from_polar(1.0, -chi / 2.0);
    let rot2 = Complex64::from_polar(1.0, chi / 2.0);
    let a: Vec<Complex64> = psi1.amplitudes().iter().map(|&x| x * rot1).collect();
    let b: Vec<Complex64> = psi2.amplitudes().iter().map(|&x| x * rot2).collect();

    let mut par: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
    let mut perp: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
    // |a ± b| = 2cos(θ/2), 2sin(θ/2); better conditioned than arccos near θ = 0.
    let theta = 2.0 * linalg::norm_sqr(&perp).sqrt().atan2(linalg::norm_sqr(&par).sqrt());
    linalg::normalize(&mut par);
    if (theta / 2.0).sin() < IDENTICAL_TOL {
        perp = orthogonal_complement_vector(&par);
    } else {
        // Remove rounding-level leakage along ψ∥.
        let leak = linalg::inner(&par, &perp);
        for (p, q) in perp.iter_mut().zip(&par) {
            *p -= leak * q;
        }
        linalg::normalize(&mut perp);
    }
    Ok(PairDecomposition {
        theta,
        chi,
        psi_par: QuantumState::from_raw(layout, par),
        psi_perp: QuantumState::from_raw(layout, perp),
    })
}

/// Gram–Schmidt of the first basis vector not parallel to `v`.
fn orthogonal_complement_vector(v: &[Complex64]) -> Vec<Complex64> {
    let n = v.len();
    for k in 0..n {
        let mut w = vec![Complex64::new(0.0, 0.0); n];
        w[k] = Complex64::new(1.0, 0.0);
        let proj = v[k].conj();
        for (x, y) in w.iter_mut().zip(v) {
            *x -= proj * y;
        }
        if linalg::norm_sqr(&w) > 1e-6 {
            linalg::normalize(&mut w);
            return w;
        }
    }
    // Only possible in one dimension, where no orthogonal vector exists.
    vec![Complex64::new(0.0, 0.0); n]
}

/// Largest excess of any step's `θ` increment over `(D₀/2)·dwell`.
pub fn speed_limit_check(traj: &Trajectory, d0: f64) -> f64 {
    traj.thetas
        .windows(2)
        .zip(traj.times.windows(2))
        .map(|(th, t)| (th[1] - th[0]) - 0.5 * d0 * (t[1] - t[0]))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Integrated form: `θ(T) − θ(0) − (D₀/2)·T`.
pub fn integrated_speed_limit_excess(traj: &Trajectory, d0: f64) -> f64 {
    let (Some(t_end), Some(th_end)) = (traj.times.last(), traj.thetas.last()) else {
        return f64::NEG_INFINITY;
    };
    (th_end - traj.thetas[0]) - 0.5 * d0 * (t_end - traj.times[0])
}

/// `(|λ_max⟩ + |λ_min⟩)/√2` for the extended difference operator.
pub fn optimal_probe(hd_extended: &HermitianOperator, layout: SpaceLayout) -> Result<QuantumState> {
    if hd_extended.dim() != layout.total_dim() {
        return Err(Error::DimensionMismatch { expected: layout.total_dim(), got: hd_extended.dim() });
    }
    let e = hd_extended.eig()?;
    let spread = e.max() - e.min();
    if spread <= crate::spectral::tie_tolerance(&e.values) {
        return Err(Error::Indistinguishable { distance: spread });
    }
    let hi = e.vector(e.max_index());
    let lo = e.vector(e.min_index());
    let amps = hi.iter().zip(&lo).map(|(a, b)| (a + b) * FRAC_1_SQRT_2).collect();
    QuantumState::new(layout, amps)
}

/// The splitting `H̃₁ = H̃⁺ + H̃ᵈ/2`, `H̃₂ = H̃⁺ − H̃ᵈ/2` on `layout`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedPair {
    pub layout: SpaceLayout,
    pub h1: HermitianOperator,
    pub h2: HermitianOperator,
    pub diff: HermitianOperator,
    pub mean: HermitianOperator,
}

impl ExtendedPair {
    pub fn new(h1_box: &HermitianOperator, h2_box: &HermitianOperator, layout: SpaceLayout) -> Result<Self> {
        let h1 = extend_to_layout(h1_box, layout)?;
        let h2 = extend_to_layout(h2_box, layout)?;
        let diff = h1.sub(&h2)?;
        let mean = h1.add(&h2)?.scale(0.5);
        Ok(Self { layout, h1, h2, diff, mean })
    }
}

/// Saturating protocol of total exposure `π / D₀`.
///
/// Starts in [`optimal_probe`] of `H̃ᵈ`, then repeats `N` times: dwell
/// `τ = T/N`, apply `U = exp(−iντH̃ᵈ) exp(+iH̃⁺τ)`. The right factor undoes
/// the common part of both evolutions to first order in τ, leaving
/// `exp(−i(ν ± 1/2)H̃ᵈτ)` per step.
pub fn saturation_protocol(
    h1_box: &HermitianOperator,
    h2_box: &HermitianOperator,
    layout: SpaceLayout,
    n: usize,
    nu: f64,
) -> Result<DiscriminationProtocol> {
    let d0 = dist0(h1_box, h2_box)?;
    if d0 <= 1e-12 * h1_box.matrix().max_abs().max(h2_box.matrix().max_abs()).max(1.0) {
        return Err(Error::Indistinguishable { distance: d0 });
    }
    saturation_protocol_for_duration(h1_box, h2_box, layout, n, nu, PI / d0)
}

/// Same construction as [`saturation_protocol`] stopped after a total
/// exposure `total_time` (which may be zero).
pub fn saturation_protocol_for_duration(
    h1_box: &HermitianOperator,
    h2_box: &HermitianOperator,
    layout: SpaceLayout,
    n: usize,
    nu: f64,
    total_time: f64,
) -> Result<DiscriminationProtocol> {
    if n == 0 {
        return Err(Error::InvalidArgument("saturation protocol needs at least one step"));
    }
    if !(total_time >= 0.0) || !total_time.is_finite() {
        return Err(Error::InvalidArgument("total time must be finite and nonnegative"));
    }
    let pair = ExtendedPair::new(h1_box, h2_box, layout)?;
    let d0 = dist0(h1_box, h2_box)?;
    let diff_eig = pair.diff.eig()?;
    let reachable = diff_eig.max() - diff_eig.min();
    if reachable < d0 * (1.0 - 1e-9) {
        return Err(Error::InvalidLayout("layout needs a no-box sector to reach D0 for this pair"));
    }
    let initial = optimal_probe(&pair.diff, layout)?;
    let tau = total_time / n as f64;
    let undo_mean = pair.mean.eig()?.propagator(-tau);
    let kick = diff_eig.propagator(nu * tau);
    let control = undo_mean.compose(&kick)?;
    let step = ProtocolStep::new(tau, control)?;
    DiscriminationProtocol::new(layout, initial, vec![step; n])
}

/// Two-outcome von Neumann measurement `(ψ∥ ± ψ⊥)/√2`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasis {
    pub plus: QuantumState,
    pub minus: QuantumState,
}

impl MeasurementBasis {
    /// Born probabilities `(p₊, p₋)` for `psi`.
    pub fn probabilities(&self, psi: &QuantumState) -> Result<[f64; 2]> {
        let p = self.plus.inner(psi)?.norm_sqr();
        let m = self.minus.inner(psi)?.norm_sqr();
        Ok([p, m])
    }

    /// Error probability for equiprobable `psi1` (outcome `+`) and `psi2` (outcome `−`).
    pub fn error_probability(&self, psi1: &QuantumState, psi2: &QuantumState) -> Result<f64> {
        let [_, wrong1] = self.probabilities(psi1)?;
        let [wrong2, _] = self.probabilities(psi2)?;
        Ok(0.5 * (wrong1 + wrong2))
    }
}

pub fn discrimination_measurement(psi1: &QuantumState, psi2: &QuantumState) -> Result<MeasurementBasis> {
    let d = decompose_pair(psi1, psi2)?;
    let layout = psi1.layout();
    let par = d.psi_par.amplitudes();
    let perp = d.psi_perp.amplitudes();
    let plus = par.iter().zip(perp).map(|(a, b)| (a + b) * FRAC_1_SQRT_2).collect();
    let minus = par.iter().zip(perp).map(|(a, b)| (a - b) * FRAC_1_SQRT_2).collect();
    Ok(MeasurementBasis {
        plus: QuantumState::from_raw(layout, plus),
        minus: QuantumState::from_raw(layout, minus),
    })
}

/// `0 ≤ θ ≤ π/2`, allowing for rounding at the top.
pub fn is_valid_theta(theta: f64) -> bool {
    (0.0..=FRAC_PI_2 + 1e-12).contains(&theta)
}
