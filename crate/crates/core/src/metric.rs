//! The D₀ operator norm and distance, and the minimum time needed to tell
//! two Hamiltonians apart with certainty.
//!
//! For a Hermitian `H` with extreme eigenvalues `E_min ≤ E_max`,
//!
//! ```text
//! ‖H‖₀ = max { E_max − E_min, |E_max|, |E_min| }
//! ```
//!
//! and `D₀(H₁, H₂) = ‖H₁ − H₂‖₀`. The `|E|` terms are what a probe gains by
//! being allowed to pass either through the box or beside it; without that
//! option only the spread `E_max − E_min` is available.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::spectral::{add_ancilla_hamiltonian, HermitianOperator};
use crate::{Error, Result};

/// `max { E_max − E_min, |E_max|, |E_min| }`.
pub fn norm0(h: &HermitianOperator) -> Result<f64> {
    let e = h.eig()?;
    let (lo, hi) = (e.min(), e.max());
    Ok((hi - lo).max(hi.abs()).max(lo.abs()))
}

/// `norm0(H1 − H2)`.
pub fn dist0(h1: &HermitianOperator, h2: &HermitianOperator) -> Result<f64> {
    check_same_dim(h1, h2)?;
    norm0(&h1.sub(h2)?)
}

/// `E_max − E_min`; the distance available when the probe must go through
/// the box.
pub fn spread(h: &HermitianOperator) -> Result<f64> {
    let e = h.eig()?;
    Ok(e.max() - e.min())
}

/// Distance governing certain discrimination: `dist0` when the probe may
/// bypass the box, otherwise the spread of `H1 − H2`.
pub fn discrimination_distance(h1: &HermitianOperator, h2: &HermitianOperator, use_box_extension: bool) -> Result<f64> {
    check_same_dim(h1, h2)?;
    let d = h1.sub(h2)?;
    if use_box_extension {
        norm0(&d)
    } else {
        spread(&d)
    }
}

/// Smallest total exposure `π / D` that allows certain discrimination.
pub fn min_discrimination_time(h1: &HermitianOperator, h2: &HermitianOperator, use_box_extension: bool) -> Result<f64> {
    let distance = discrimination_distance(h1, h2, use_box_extension)?;
    if distance <= indistinguishable_tol(h1, h2) {
        return Err(Error::Indistinguishable { distance });
    }
    Ok(PI / distance)
}

fn indistinguishable_tol(h1: &HermitianOperator, h2: &HermitianOperator) -> f64 {
    1e-12 * h1.matrix().max_abs().max(h2.matrix().max_abs()).max(1.0)
}

fn check_same_dim(h1: &HermitianOperator, h2: &HermitianOperator) -> Result<()> {
    if h1.dim() != h2.dim() {
        return Err(Error::DimensionMismatch { expected: h1.dim(), got: h2.dim() });
    }
    Ok(())
}

/// Piecewise-constant pair of time-dependent Hamiltonians.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSchedule {
    segments: Vec<ScheduleSegment>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleSegment {
    pub duration: f64,
    pub h1: HermitianOperator,
    pub h2: HermitianOperator,
}

impl HamiltonianSchedule {
    pub fn new(segments: Vec<ScheduleSegment>) -> Result<Self> {
        let Some(first) = segments.first() else {
            return Err(Error::InvalidArgument("schedule must have at least one segment"));
        };
        let dim = first.h1.dim();
        for s in &segments {
            if !(s.duration > 0.0) || !s.duration.is_finite() {
                return Err(Error::InvalidArgument("segment durations must be positive"));
            }
            for h in [&s.h1, &s.h2] {
                if h.dim() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: h.dim() });
                }
            }
        }
        Ok(Self { segments })
    }

    pub fn segments(&self) -> &[ScheduleSegment] {
        &self.segments
    }

    pub fn dim(&self) -> usize {
        self.segments[0].h1.dim()
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }
}

/// Outcome of [`time_dependent_bound`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeDependentBound {
    /// `∫ D₀(H₁(t), H₂(t)) dt`.
    pub integral: f64,
    /// Whether the integral reaches π.
    pub certain_discrimination_possible: bool,
}

pub fn time_dependent_bound(schedule: &HamiltonianSchedule) -> Result<TimeDependentBound> {
    let mut integral = 0.0;
    for s in schedule.segments() {
        integral += s.duration * dist0(&s.h1, &s.h2)?;
    }
    // Absorbs rounding in e.g. (π/4)·4.
    let certain = integral >= PI * (1.0 - 1e-12);
    Ok(TimeDependentBound { integral, certain_discrimination_possible: certain })
}

/// D₀ of a pair before and after coupling both to the same ancilla
/// Hamiltonian via `H ⊗ I + I ⊗ H_anc`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AncillaInvariance {
    pub d_base: f64,
    pub d_composite: f64,
}

pub fn ancilla_invariance_check(
    h1: &HermitianOperator,
    h2: &HermitianOperator,
    h_anc: &HermitianOperator,
) -> Result<AncillaInvariance> {
    let d_base = dist0(h1, h2)?;
    let d_composite = dist0(&add_ancilla_hamiltonian(h1, h_anc), &add_ancilla_hamiltonian(h2, h_anc))?;
    Ok(AncillaInvariance { d_base, d_composite })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::{FRAC_PI_4, SQRT_2};

    fn z() -> HermitianOperator {
        HermitianOperator::pauli_z()
    }

    #[test]
    fn norm0_examples() {
        assert_eq!(norm0(&HermitianOperator::diagonal(&[1.0, -1.0]).unwrap()).unwrap(), 2.0);
        assert_eq!(norm0(&HermitianOperator::diagonal(&[3.0, 1.0]).unwrap()).unwrap(), 3.0);
        for dim in 1..5 {
            assert_eq!(norm0(&HermitianOperator::scalar(dim, 5.0).unwrap()).unwrap(), 5.0);
        }
        assert_eq!(norm0(&HermitianOperator::zero(3).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn dist0_examples() {
        assert!((dist0(&z(), &z().scale(-1.0)).unwrap() - 4.0).abs() < 1e-14);
        let h0 = HermitianOperator::pauli_x().add(&z().scale(0.3)).unwrap();
        let d = dist0(&h0.shifted(0.75), &h0.shifted(-1.5)).unwrap();
        assert!((d - 2.25).abs() < 1e-13);
        assert_eq!(dist0(&h0, &h0).unwrap(), 0.0);
        assert!(matches!(
            dist0(&z(), &HermitianOperator::zero(3).unwrap()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn spread_examples() {
        assert_eq!(spread(&HermitianOperator::scalar(3, 5.0).unwrap()).unwrap(), 0.0);
        assert!((spread(&z().scale(2.0)).unwrap() - 4.0).abs() < 1e-14);
        let d = HermitianOperator::pauli_x().sub(&z()).unwrap();
        assert!((spread(&d).unwrap() - 2.0 * SQRT_2).abs() < 1e-13);
    }

    #[test]
    fn min_time_examples() {
        let t = min_discrimination_time(&z(), &z().scale(-1.0), true).unwrap();
        assert!((t - FRAC_PI_4).abs() < 1e-14);

        let h0 = HermitianOperator::pauli_x();
        let t = min_discrimination_time(&h0.shifted(1.0), &h0, true).unwrap();
        assert!((t - PI).abs() < 1e-13);
        assert!(matches!(
            min_discrimination_time(&h0.shifted(1.0), &h0, false),
            Err(Error::Indistinguishable { .. })
        ));
        assert!(matches!(min_discrimination_time(&h0, &h0, true), Err(Error::Indistinguishable { .. })));
    }

    #[test]
    fn time_dependent_examples() {
        let seg = |duration, h1: HermitianOperator, h2: HermitianOperator| ScheduleSegment { duration, h1, h2 };
        let s = HamiltonianSchedule::new(vec![seg(FRAC_PI_4, z(), z().scale(-1.0))]).unwrap();
        let b = time_dependent_bound(&s).unwrap();
        assert!((b.integral - PI).abs() < 1e-13);
        assert!(b.certain_discrimination_possible);

        let s = HamiltonianSchedule::new(vec![seg(0.1, z(), z().scale(-1.0))]).unwrap();
        let b = time_dependent_bound(&s).unwrap();
        assert!((b.integral - 0.4).abs() < 1e-14);
        assert!(!b.certain_discrimination_possible);

        let s = HamiltonianSchedule::new(vec![seg(0.1, z(), z().scale(-1.0)), seg(7.0, z(), z())]).unwrap();
        assert!((time_dependent_bound(&s).unwrap().integral - 0.4).abs() < 1e-14);

        assert!(HamiltonianSchedule::new(vec![]).is_err());
        assert!(HamiltonianSchedule::new(vec![seg(0.0, z(), z())]).is_err());
        assert!(HamiltonianSchedule::new(vec![seg(1.0, z(), HermitianOperator::zero(3).unwrap())]).is_err());
    }

    #[test]
    fn ancilla_examples() {
        let r = ancilla_invariance_check(&z(), &z().scale(-1.0), &HermitianOperator::pauli_x().scale(7.0)).unwrap();
        assert!((r.d_base - 4.0).abs() < 1e-13);
        assert!((r.d_composite - 4.0).abs() < 1e-12);

        let h1 = HermitianOperator::pauli_x();
        let r = ancilla_invariance_check(&h1, &z(), &HermitianOperator::zero(3).unwrap()).unwrap();
        assert!((r.d_base - r.d_composite).abs() < 1e-12);
    }
}
