//! Hermitian operators, exact unitary evolution and the structured Hilbert
//! space `(box ⊕ no-box) ⊗ ancilla`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{self, CMatrix};
use crate::{Error, Result};

/// Absolute Hermiticity tolerance, scaled by `max(1, max|H_ij|)`.
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const UNITARY_TOL: f64 = 1e-10;
pub const NORM_TOL: f64 = 1e-10;

/// A Hermitian matrix (an energy operator, hbar = 1).
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator(CMatrix);

impl HermitianOperator {
    /// Accepts `m` if it is Hermitian within tolerance and stores `(m + m†)/2`.
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.dim() == 0 {
            return Err(Error::InvalidArgument("operator dimension must be at least 1"));
        }
        let deviation = m.hermitian_deviation();
        if deviation > HERMITIAN_TOL * m.max_abs().max(1.0) {
            return Err(Error::NotHermitian { deviation });
        }
        let sym = m.add(&m.adjoint())?.scale(Complex64::new(0.5, 0.0));
        Ok(Self(sym))
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        Self::new(CMatrix::from_rows(rows)?)
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        Self::new(CMatrix::from_real_diagonal(values))
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::new(CMatrix::zeros(dim))
    }

    /// `value · I` on `dim` dimensions.
    pub fn scalar(dim: usize, value: f64) -> Result<Self> {
        Self::diagonal(&vec![value; dim])
    }

    pub fn pauli_x() -> Self {
        let o = Complex64::new(1.0, 0.0);
        let z = Complex64::new(0.0, 0.0);
        Self(CMatrix::from_rows(&[vec![z, o], vec![o, z]]).expect("2x2"))
    }

    pub fn pauli_y() -> Self {
        let i = Complex64::new(0.0, 1.0);
        let z = Complex64::new(0.0, 0.0);
        Self(CMatrix::from_rows(&[vec![z, -i], vec![i, z]]).expect("2x2"))
    }

    pub fn pauli_z() -> Self {
        Self(CMatrix::from_real_diagonal(&[1.0, -1.0]))
    }

    /// `|v⟩⟨v|` scaled by `weight`.
    pub fn projector(v: &[Complex64], weight: f64) -> Result<Self> {
        Self::new(CMatrix::from_fn(v.len(), |i, j| v[i] * v[j].conj() * weight))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale(Complex64::new(s, 0.0)))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self(self.0.add(&other.0)?))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Self(self.0.sub(&other.0)?))
    }

    /// `self + shift · I`.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut m = self.0.clone();
        for i in 0..m.dim() {
            m[(i, i)] += Complex64::new(shift, 0.0);
        }
        Self(m)
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kron(&other.0))
    }

    pub fn eig(&self) -> Result<EigenSystem> {
        eig_hermitian(self)
    }

    /// `⟨ψ|H|ψ⟩` for a raw amplitude vector.
    pub fn expectation(&self, psi: &[Complex64]) -> Result<f64> {
        let hpsi = self.0.matvec(psi)?;
        Ok(linalg::inner(psi, &hpsi).re)
    }
}

/// Eigenvalues in ascending order with their eigenvectors as columns of a
/// unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn vector(&self, index: usize) -> Vec<Complex64> {
        self.vectors.column(index)
    }

    /// Index of the first eigenvector (in ascending output order) whose
    /// eigenvalue ties with the largest one.
    pub fn max_index(&self) -> usize {
        let top = self.max();
        let tol = tie_tolerance(&self.values);
        self.values.iter().position(|&v| top - v <= tol).unwrap_or(self.dim() - 1)
    }

    pub fn min_index(&self) -> usize {
        0
    }

    /// `V diag(λ) V†`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.dim();
        CMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| self.vectors[(i, k)] * self.values[k] * self.vectors[(j, k)].conj())
                .sum()
        })
    }

    /// `exp(-i H t) ψ` through the spectral decomposition.
    pub fn evolve_vector(&self, t: f64, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.dim();
        if psi.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: psi.len() });
        }
        if t == 0.0 {
            return Ok(psi.to_vec());
        }
        let coeffs: Vec<Complex64> = (0..n)
            .map(|k| {
                let c: Complex64 = (0..n).map(|i| self.vectors[(i, k)].conj() * psi[i]).sum();
                c * Complex64::from_polar(1.0, -self.values[k] * t)
            })
            .collect();
        Ok((0..n).map(|i| (0..n).map(|k| self.vectors[(i, k)] * coeffs[k]).sum()).collect())
    }

    /// The matrix `exp(-i H t)`.
    pub fn propagator(&self, t: f64) -> Unitary {
        let n = self.dim();
        let phases: Vec<Complex64> =
            self.values.iter().map(|&l| Complex64::from_polar(1.0, -l * t)).collect();
        Unitary(CMatrix::from_fn(n, |i, j| {
            (0..n).map(|k| self.vectors[(i, k)] * phases[k] * self.vectors[(j, k)].conj()).sum()
        }))
    }
}

/// Eigenvalues closer than this are treated as degenerate.
pub(crate) fn tie_tolerance(values: &[f64]) -> f64 {
    let scale = values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    1e-9 * scale
}

pub fn eig_hermitian(h: &HermitianOperator) -> Result<EigenSystem> {
    let (values, vectors) = linalg::jacobi_eigh(h.matrix())?;
    Ok(EigenSystem { values, vectors })
}

/// A unitary matrix, checked at construction to `U†U = I` within 1e-10.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary(CMatrix);

impl Unitary {
    pub fn new(m: CMatrix) -> Result<Self> {
        let deviation = m.unitary_deviation();
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self(m))
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMatrix::identity(dim))
    }

    /// `exp(-i K)` for Hermitian `K`.
    pub fn exp_i(k: &HermitianOperator) -> Result<Self> {
        Ok(k.eig()?.propagator(1.0))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn compose(&self, then: &Unitary) -> Result<Unitary> {
        Ok(Unitary(then.0.matmul(&self.0)?))
    }

    pub fn apply(&self, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        self.0.matvec(psi)
    }
}

/// `(box_dim + nobox_dim) · ancilla_dim` dimensional space. Basis order is
/// `(sector index) * ancilla_dim + ancilla index` with box states first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpaceLayout {
    box_dim: usize,
    nobox_dim: usize,
    ancilla_dim: usize,
}

impl SpaceLayout {
    pub fn new(box_dim: usize, nobox_dim: usize, ancilla_dim: usize) -> Result<Self> {
        if box_dim == 0 {
            return Err(Error::InvalidLayout("box_dim must be at least 1"));
        }
        if ancilla_dim == 0 {
            return Err(Error::InvalidLayout("ancilla_dim must be at least 1 (1 = no ancilla)"));
        }
        Ok(Self { box_dim, nobox_dim, ancilla_dim })
    }

    /// Box only, no ancilla.
    pub fn plain(box_dim: usize) -> Result<Self> {
        Self::new(box_dim, 0, 1)
    }

    pub fn box_dim(&self) -> usize {
        self.box_dim
    }

    pub fn nobox_dim(&self) -> usize {
        self.nobox_dim
    }

    pub fn ancilla_dim(&self) -> usize {
        self.ancilla_dim
    }

    pub fn total_dim(&self) -> usize {
        (self.box_dim + self.nobox_dim) * self.ancilla_dim
    }

    /// Flat index of `sector ⊗ ancilla`.
    pub fn index(&self, sector: usize, ancilla: usize) -> usize {
        sector * self.ancilla_dim + ancilla
    }

    /// Flat index of the `k`-th no-box basis state (ancilla index 0).
    pub fn nobox_index(&self, k: usize) -> usize {
        self.index(self.box_dim + k, 0)
    }
}

/// A unit-norm state vector on a [`SpaceLayout`].
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    layout: SpaceLayout,
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    pub fn new(layout: SpaceLayout, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != layout.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.total_dim(),
                got: amplitudes.len(),
            });
        }
        let norm_sqr = linalg::norm_sqr(&amplitudes);
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { layout, amplitudes })
    }

    /// Normalizes `amplitudes` first; fails only on a zero vector.
    pub fn normalized(layout: SpaceLayout, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        if linalg::normalize(&mut amplitudes) == 0.0 {
            return Err(Error::NotNormalized { norm_sqr: 0.0 });
        }
        Self::new(layout, amplitudes)
    }

    pub fn basis(layout: SpaceLayout, index: usize) -> Result<Self> {
        let mut a = vec![Complex64::new(0.0, 0.0); layout.total_dim()];
        if index >= a.len() {
            return Err(Error::InvalidArgument("basis index out of range"));
        }
        a[index] = Complex64::new(1.0, 0.0);
        Self::new(layout, a)
    }

    pub fn layout(&self) -> SpaceLayout {
        self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &QuantumState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(linalg::inner(&self.amplitudes, &other.amplitudes))
    }

    /// `|⟨self|other⟩|`, the phase-insensitive comparison used throughout.
    pub fn fidelity_amplitude(&self, other: &QuantumState) -> Result<f64> {
        Ok(self.inner(other)?.norm())
    }

    pub fn norm(&self) -> f64 {
        linalg::norm_sqr(&self.amplitudes).sqrt()
    }

    pub(crate) fn from_raw(layout: SpaceLayout, amplitudes: Vec<Complex64>) -> Self {
        Self { layout, amplitudes }
    }

    pub fn apply(&self, u: &Unitary) -> Result<QuantumState> {
        Ok(Self::from_raw(self.layout, u.apply(&self.amplitudes)?))
    }
}

/// `exp(-i H t) ψ`. `H` must already act on ψ's full space.
pub fn evolve(h: &HermitianOperator, t: f64, psi: &QuantumState) -> Result<QuantumState> {
    if h.dim() != psi.dim() {
        return Err(Error::DimensionMismatch { expected: psi.dim(), got: h.dim() });
    }
    let eig = h.eig()?;
    Ok(QuantumState::from_raw(psi.layout(), eig.evolve_vector(t, psi.amplitudes())?))
}

/// `(H_box ⊕ 0_nobox) ⊗ I_ancilla`.
pub fn extend_to_layout(h_box: &HermitianOperator, layout: SpaceLayout) -> Result<HermitianOperator> {
    if h_box.dim() != layout.box_dim() {
        return Err(Error::DimensionMismatch { expected: layout.box_dim(), got: h_box.dim() });
    }
    let padded = h_box.matrix().pad_zeros(layout.nobox_dim());
    Ok(HermitianOperator(padded.kron(&CMatrix::identity(layout.ancilla_dim()))))
}

/// `H_sys ⊗ I + I ⊗ H_anc`.
pub fn add_ancilla_hamiltonian(h_sys: &HermitianOperator, h_anc: &HermitianOperator) -> HermitianOperator {
    let sys = h_sys.matrix().kron(&CMatrix::identity(h_anc.dim()));
    let anc = CMatrix::identity(h_sys.dim()).kron(h_anc.matrix());
    HermitianOperator(sys.add(&anc).expect("equal dims by construction"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
    }

    #[test]
    fn rejects_non_hermitian_and_symmetrizes_near_hermitian() {
        let bad = CMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]]).unwrap();
        assert!(matches!(HermitianOperator::new(bad), Err(Error::NotHermitian { .. })));
        let near = CMatrix::from_rows(&[vec![c(1.0, 0.0), c(1.0, 1e-13)], vec![c(1.0, 0.0), c(2.0, 0.0)]]).unwrap();
        let h = HermitianOperator::new(near).unwrap();
        assert_eq!(h.matrix().hermitian_deviation(), 0.0);
        assert!(HermitianOperator::new(CMatrix::zeros(0)).is_err());
    }

    #[test]
    fn eig_of_diagonal_and_pauli_x() {
        let e = HermitianOperator::diagonal(&[1.0, -1.0]).unwrap().eig().unwrap();
        assert_eq!(e.values, vec![-1.0, 1.0]);

        let e = HermitianOperator::pauli_x().eig().unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        let minus = [c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)];
        let plus = [c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)];
        assert!((linalg::inner(&e.vector(0), &minus).norm() - 1.0).abs() < 1e-12);
        assert!((linalg::inner(&e.vector(1), &plus).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn evolve_zero_hamiltonian_is_identity() {
        let layout = SpaceLayout::plain(2).unwrap();
        let psi = QuantumState::normalized(layout, vec![c(0.3, 0.1), c(-0.2, 0.9)]).unwrap();
        let out = evolve(&HermitianOperator::zero(2).unwrap(), 3.7, &psi).unwrap();
        assert!(close(out.amplitudes(), psi.amplitudes(), 1e-15));
    }

    #[test]
    fn evolve_sigma_z_precession() {
        let layout = SpaceLayout::plain(2).unwrap();
        let psi = QuantumState::new(layout, vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]).unwrap();
        let out = evolve(&HermitianOperator::pauli_z(), FRAC_PI_2, &psi).unwrap();
        let expected = [c(0.0, -FRAC_1_SQRT_2), c(0.0, FRAC_1_SQRT_2)];
        assert!(close(out.amplitudes(), &expected, 1e-14));
        // |↓x⟩ up to global phase
        let down_x = QuantumState::new(layout, vec![c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)]).unwrap();
        assert!((out.fidelity_amplitude(&down_x).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn evolve_rejects_dimension_mismatch() {
        let psi = QuantumState::basis(SpaceLayout::plain(3).unwrap(), 0).unwrap();
        assert!(matches!(
            evolve(&HermitianOperator::pauli_z(), 1.0, &psi),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn extend_examples() {
        let h = HermitianOperator::diagonal(&[2.0]).unwrap();
        let ext = extend_to_layout(&h, SpaceLayout::new(1, 1, 1).unwrap()).unwrap();
        assert_eq!(ext, HermitianOperator::diagonal(&[2.0, 0.0]).unwrap());

        let ext = extend_to_layout(&HermitianOperator::pauli_z(), SpaceLayout::new(2, 0, 2).unwrap()).unwrap();
        assert_eq!(ext, HermitianOperator::diagonal(&[1.0, 1.0, -1.0, -1.0]).unwrap());
        let vals = ext.eig().unwrap().values;
        assert_eq!(vals, vec![-1.0, -1.0, 1.0, 1.0]);

        let ext = extend_to_layout(&HermitianOperator::pauli_x(), SpaceLayout::new(2, 1, 1).unwrap()).unwrap();
        assert_eq!(ext.dim(), 3);
        for k in 0..3 {
            assert_eq!(ext.matrix()[(2, k)], c(0.0, 0.0));
            assert_eq!(ext.matrix()[(k, 2)], c(0.0, 0.0));
        }
        let vals = ext.eig().unwrap().values;
        for (v, e) in vals.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((v - e).abs() < 1e-14);
        }

        assert!(extend_to_layout(&HermitianOperator::pauli_x(), SpaceLayout::new(3, 0, 1).unwrap()).is_err());
    }

    #[test]
    fn ancilla_hamiltonian_examples() {
        let z = HermitianOperator::pauli_z();
        let sum = add_ancilla_hamiltonian(&z, &HermitianOperator::zero(2).unwrap());
        assert_eq!(sum, z.kron(&HermitianOperator::diagonal(&[1.0, 1.0]).unwrap()));

        let sum = add_ancilla_hamiltonian(
            &HermitianOperator::diagonal(&[1.5]).unwrap(),
            &HermitianOperator::diagonal(&[-0.25]).unwrap(),
        );
        assert_eq!(sum, HermitianOperator::diagonal(&[1.25]).unwrap());

        let vals = add_ancilla_hamiltonian(&z, &HermitianOperator::pauli_x()).eig().unwrap().values;
        for (v, e) in vals.iter().zip([-2.0, 0.0, 0.0, 2.0]) {
            assert!((v - e).abs() < 1e-12, "{vals:?}");
        }
    }

    #[test]
    fn layout_invariants() {
        assert!(SpaceLayout::new(0, 1, 1).is_err());
        assert!(SpaceLayout::new(1, 1, 0).is_err());
        assert_eq!(SpaceLayout::new(3, 2, 4).unwrap().total_dim(), 20);
    }

    #[test]
    fn state_requires_unit_norm() {
        let layout = SpaceLayout::plain(2).unwrap();
        assert!(matches!(
            QuantumState::new(layout, vec![c(1.0, 0.0), c(1.0, 0.0)]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(QuantumState::new(layout, vec![c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn max_index_breaks_ties_toward_first() {
        let e = HermitianOperator::diagonal(&[1.0, 1.0, 0.0]).unwrap().eig().unwrap();
        assert_eq!(e.max_index(), 1);
        assert_eq!(e.vector(1)[0], c(1.0, 0.0));
    }
}
