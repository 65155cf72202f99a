//! Checks against independent reference computations written here from
//! first principles rather than through the library's own routines.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use approx::assert_abs_diff_eq;
use hdisc_core::energy::lorentzian_truncated_accuracy;
use hdisc_core::estimation::{dichotomic_uncertainty, max_uncertainty_product, product_in_x};
use hdisc_core::random::{haar_state, random_hermitian, trial_rng};
use hdisc_core::scenarios::grover_crossing_time_exact;
use hdisc_core::spectral::evolve;
use hdisc_core::{Complex64, HermitianOperator, QuantumState, SpaceLayout};

type Dense = Vec<Vec<Complex64>>;

fn dense(h: &HermitianOperator) -> Dense {
    h.matrix().rows().map(|r| r.to_vec()).collect()
}

/// Determinant by Gaussian elimination with partial pivoting.
fn determinant(mut m: Dense) -> Complex64 {
    let n = m.len();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n).max_by(|&a, &b| m[a][col].norm().total_cmp(&m[b][col].norm())).unwrap();
        if m[pivot][col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        let (top, rest) = m.split_at_mut(col + 1);
        let pivot_row = &top[col];
        for row in rest {
            let f = row[col] / pivot_row[col];
            for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= f * p;
            }
        }
    }
    det
}

/// Real `det(H − λI)`; its sign changes bracket the eigenvalues.
fn char_poly(h: &Dense, lambda: f64) -> f64 {
    let mut m = h.clone();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] -= lambda;
    }
    determinant(m).re
}

fn eigenvalues_by_bisection(h: &Dense) -> Vec<f64> {
    let bound: f64 = h.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt() + 1.0;
    let steps = 40_000;
    let mut roots = Vec::new();
    let mut prev_x = -bound;
    let mut prev_f = char_poly(h, prev_x);
    for i in 1..=steps {
        let x = -bound + 2.0 * bound * i as f64 / steps as f64;
        let f = char_poly(h, x);
        if (f < 0.0) != (prev_f < 0.0) {
            let (mut lo, mut hi, f_lo) = (prev_x, x, prev_f);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if (char_poly(h, mid) < 0.0) == (f_lo < 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_f = f;
    }
    roots
}

#[test]
fn eigenvalues_match_characteristic_polynomial_roots() {
    for seed in 0..5 {
        let mut rng = trial_rng(900, seed);
        let h = random_hermitian(&mut rng, 6, 1.0).unwrap();
        let oracle = eigenvalues_by_bisection(&dense(&h));
        let values = h.eig().unwrap().values;
        assert_eq!(oracle.len(), 6, "roots not all simple: {oracle:?}");
        for (a, b) in values.iter().zip(&oracle) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-8);
        }
    }
}

fn mat_mul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

/// `exp(−iHt)` by scaling, a 30-term Taylor series and repeated squaring.
fn expm_taylor(h: &Dense, t: f64) -> Dense {
    let n = h.len();
    let norm: f64 = h.iter().flatten().map(|z| z.norm()).sum::<f64>() * t.abs();
    let squarings = (norm.max(1.0).log2().ceil() as i32 + 2).max(0);
    let scale = -Complex64::i() * t / 2f64.powi(squarings);
    let a: Dense = h.iter().map(|r| r.iter().map(|z| z * scale).collect()).collect();
    let identity: Dense = (0..n)
        .map(|i| (0..n).map(|j| Complex64::new(f64::from(u8::from(i == j)), 0.0)).collect())
        .collect();
    let mut sum = identity.clone();
    let mut term = identity;
    for k in 1..30 {
        term = mat_mul(&term, &a).into_iter().map(|r| r.into_iter().map(|z| z / k as f64).collect()).collect();
        for (srow, trow) in sum.iter_mut().zip(&term) {
            for (s, t) in srow.iter_mut().zip(trow) {
                *s += t;
            }
        }
    }
    for _ in 0..squarings {
        sum = mat_mul(&sum, &sum);
    }
    sum
}

fn apply(m: &Dense, v: &[Complex64]) -> Vec<Complex64> {
    m.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

#[test]
fn evolution_matches_taylor_series() {
    let x = HermitianOperator::pauli_x();
    let layout = SpaceLayout::plain(2).unwrap();
    let up = QuantumState::basis(layout, 0).unwrap();
    let got = evolve(&x, 0.7, &up).unwrap();
    let want = apply(&expm_taylor(&dense(&x), 0.7), up.amplitudes());
    for (g, w) in got.amplitudes().iter().zip(&want) {
        assert!((g - w).norm() < 1e-12);
    }
    // The closed form cos t |0⟩ − i sin t |1⟩ as well.
    assert!((got.amplitudes()[0] - Complex64::new(0.7f64.cos(), 0.0)).norm() < 1e-14);
    assert!((got.amplitudes()[1] - Complex64::new(0.0, -(0.7f64.sin()))).norm() < 1e-14);

    for seed in 0..10 {
        let mut rng = trial_rng(901, seed);
        let h = random_hermitian(&mut rng, 5, 1.5).unwrap();
        let psi = haar_state(&mut rng, SpaceLayout::plain(5).unwrap()).unwrap();
        let t = 3.3;
        let got = evolve(&h, t, &psi).unwrap();
        let want = apply(&expm_taylor(&dense(&h), t), psi.amplitudes());
        for (g, w) in got.amplitudes().iter().zip(&want) {
            assert!((g - w).norm() < 1e-10);
        }
    }
}

fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    while b - a > 1e-12 {
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - r * (b - a);
        d = a + r * (b - a);
    }
    0.5 * (a + b)
}

#[test]
fn product_optimum_matches_golden_section() {
    let f = |x: f64| x * (1.0 - x.sin());
    let x_star = golden_section_max(f, 0.0, FRAC_PI_2);
    for d0 in [0.5, 2.0, 7.0] {
        let opt = max_uncertainty_product(d0).unwrap();
        assert_abs_diff_eq!(opt.x_star, x_star, epsilon = 1e-6);
        assert_abs_diff_eq!(opt.product_star, f(x_star), epsilon = 1e-12);
        assert_abs_diff_eq!(opt.delta_t_star, 2.0 * x_star / d0, epsilon = 1e-6);
    }
    assert_abs_diff_eq!(x_star, 0.5560, epsilon = 1e-3);
    assert_abs_diff_eq!(f(x_star), 0.26255, epsilon = 1e-4);
    assert_abs_diff_eq!(product_in_x(x_star), f(x_star), epsilon = 1e-15);
}

#[test]
fn closed_form_matches_helstrom_on_saturated_overlap() {
    // After exposure Δt the best pair overlap is cos(D₀Δt/2); the Helstrom
    // error times D₀ is then the minimal ΔH.
    for d0 in [1.0, 2.0, 3.5] {
        for k in 0..=20 {
            let dt = PI / d0 * k as f64 / 20.0;
            let overlap = (d0 * dt / 2.0).cos();
            let helstrom = 0.5 * (1.0 - (1.0 - overlap * overlap).max(0.0).sqrt());
            assert_abs_diff_eq!(dichotomic_uncertainty(d0, dt).unwrap(), d0 * helstrom, epsilon = 1e-12);
        }
    }
}

/// Composite Simpson with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    h / 3.0 * (f(a) + f(b) + inner)
}

#[test]
fn truncated_lorentzian_accuracy_matches_quadrature() {
    for gamma in [0.3, 1.0, 4.0] {
        for cutoff in [1.0, 10.0, 100.0] {
            let lambda = cutoff * gamma;
            let q = 2.0 * simpson(|x| x * gamma / (PI * (gamma * gamma + x * x)), 0.0, lambda, 200_000);
            assert_abs_diff_eq!(lorentzian_truncated_accuracy(gamma, lambda), q, epsilon = 1e-9 * q.max(1.0));
        }
    }
}

/// Crossing time of the exact (untrotterized) evolution under
/// `E(|k⟩⟨k| + |s⟩⟨s|)` from `|s⟩`, found by dense evolution and bisection.
fn grover_dense_crossing(e: f64, d: usize, threshold: f64) -> f64 {
    let s = vec![Complex64::new(1.0 / (d as f64).sqrt(), 0.0); d];
    let h = HermitianOperator::projector(&s, e).unwrap().add(&HermitianOperator::projector(&{
        let mut k = vec![Complex64::new(0.0, 0.0); d];
        k[0] = Complex64::new(1.0, 0.0);
        k
    }, e).unwrap()).unwrap();
    let layout = SpaceLayout::plain(d).unwrap();
    let start = QuantumState::new(layout, s).unwrap();
    let p = |t: f64| evolve(&h, t, &start).unwrap().amplitudes()[0].norm_sqr();
    let dt = 0.01 / e;
    let mut t = 0.0;
    while p(t + dt) < threshold {
        t += dt;
    }
    let (mut lo, mut hi) = (t, t + dt);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if p(mid) < threshold {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn grover_crossing_time_matches_dense_simulation() {
    for d in [2, 4, 8, 16] {
        for e in [0.5, 1.0] {
            let dense_t = grover_dense_crossing(e, d, 0.9);
            assert_abs_diff_eq!(grover_crossing_time_exact(e, d, 0.9), dense_t, epsilon = 1e-8);
        }
    }
}

#[test]
fn spin_overlap_is_cos_two_t() {
    let z = HermitianOperator::pauli_z();
    let layout = SpaceLayout::plain(2).unwrap();
    let plus = QuantumState::new(layout, vec![Complex64::new(FRAC_1_SQRT_2, 0.0); 2]).unwrap();
    for k in 0..50 {
        let t = 0.05 * k as f64;
        let o = evolve(&z, t, &plus).unwrap().inner(&evolve(&z.scale(-1.0), t, &plus).unwrap()).unwrap();
        assert_abs_diff_eq!(o.re, (2.0 * t).cos(), epsilon = 1e-12);
        assert_abs_diff_eq!(o.im, 0.0, epsilon = 1e-12);
    }
}
