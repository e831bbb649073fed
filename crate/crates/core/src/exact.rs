//! Small-instance ground truth.
//!
//! * [`apply_hamiltonian`] acts with `H` on a dense `2^n` state vector term by
//!   term, never forming the matrix.
//! * [`extremal_eigs`] finds `λ_min` and `λ_max` with a restarted two-pass
//!   Lanczos iteration: the first pass builds the tridiagonal matrix keeping
//!   only two Krylov vectors, the second replays the recurrence to assemble
//!   the Ritz vector, whose true residual decides convergence.
//! * [`brute_force_product`] and [`brute_force_diagonal`] are exhaustive scans
//!   over tetrahedral product states and computational basis states.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pauli::{Hamiltonian, Pauli};
use crate::poly::Assignment;
use crate::qc_map::hamiltonian_to_poly;

pub const MAX_STATE_QUBITS: usize = 20;
pub const MAX_PRODUCT_QUBITS: usize = 12;
pub const MAX_DIAGONAL_QUBITS: usize = 24;
pub const DEFAULT_TOL: f64 = 1e-8;

const START_SEED: u64 = 0x5eed_1a2c_20f0_0d;
const KRYLOV_DIM: usize = 120;
const MAX_MATVECS: usize = 20_000;
const PAR_THRESHOLD: usize = 1 << 12;

/// A Pauli string in bit form: `P|b⟩ = phase · (−1)^{|b ∧ z|} |b ⊕ x⟩`.
#[derive(Clone, Copy)]
struct BitTerm {
    x: usize,
    z: usize,
    phase: Complex64,
}

fn bit_terms(h: &Hamiltonian) -> Vec<BitTerm> {
    h.terms()
        .map(|(s, c)| {
            let (mut x, mut z, mut ny) = (0usize, 0usize, 0u32);
            for &(q, p) in s.ops() {
                match p {
                    Pauli::X => x |= 1 << q,
                    Pauli::Z => z |= 1 << q,
                    Pauli::Y => {
                        x |= 1 << q;
                        z |= 1 << q;
                        ny += 1;
                    }
                }
            }
            // Y = iXZ: Y|0⟩ = i|1⟩, Y|1⟩ = −i|0⟩.
            let phase = Complex64::i().powu(ny) * c;
            BitTerm { x, z, phase }
        })
        .collect()
}

#[inline]
fn parity_sign(bits: usize) -> f64 {
    if bits.count_ones() & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}

fn apply_terms(terms: &[BitTerm], offset: f64, v: &[Complex64]) -> Vec<Complex64> {
    let entry = |b: usize| {
        let mut acc = v[b] * offset;
        for t in terms {
            let src = b ^ t.x;
            acc += t.phase * parity_sign(src & t.z) * v[src];
        }
        acc
    };
    if v.len() >= PAR_THRESHOLD {
        (0..v.len()).into_par_iter().map(entry).collect()
    } else {
        (0..v.len()).map(entry).collect()
    }
}

/// `H·v` for a dense state vector of length `2^n` (bit `i` of the index is qubit `i`).
pub fn apply_hamiltonian(h: &Hamiltonian, v: &[Complex64]) -> Result<Vec<Complex64>> {
    if h.n() > MAX_STATE_QUBITS {
        return Err(Error::TooLarge { what: "state vector", n: h.n(), limit: MAX_STATE_QUBITS });
    }
    let dim = 1usize << h.n();
    if v.len() != dim {
        return Err(Error::LengthMismatch { expected: dim, got: v.len() });
    }
    Ok(apply_terms(&bit_terms(h), h.offset(), v))
}

/// Extremal eigenvalues with the residual of each returned eigenpair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumResult {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Matrix-vector products used, both ends combined.
    pub iterations: usize,
    pub residual_min: f64,
    pub residual_max: f64,
}

impl SpectrumResult {
    /// Operator norm `max(|λ_min|, |λ_max|)`.
    pub fn norm(&self) -> f64 {
        self.lambda_min.abs().max(self.lambda_max.abs())
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

fn scale_in_place(a: &mut [Complex64], s: f64) {
    a.iter_mut().for_each(|z| *z *= s);
}

fn lowest_of_tridiagonal(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let k = alpha.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let (imin, &theta) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty tridiagonal");
    (theta, eig.eigenvectors.column(imin).iter().copied().collect())
}

struct Eigenpair {
    value: f64,
    residual: f64,
    matvecs: usize,
}

/// Smallest eigenvalue of the Hermitian operator `op` by restarted Lanczos.
fn lowest_eigenpair<F>(op: F, start: Vec<Complex64>, tol_abs: f64) -> Result<Eigenpair>
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
{
    let dim = start.len();
    let krylov = KRYLOV_DIM.min(dim);
    let mut v0 = start;
    let n0 = norm(&v0);
    scale_in_place(&mut v0, 1.0 / n0);
    let mut matvecs = 0;
    let mut last_residual = f64::INFINITY;

    loop {
        // First pass: tridiagonal coefficients only.
        let mut alpha = Vec::with_capacity(krylov);
        let mut beta: Vec<f64> = Vec::with_capacity(krylov);
        let mut v_prev = vec![Complex64::new(0.0, 0.0); dim];
        let mut v = v0.clone();
        for j in 0..krylov {
            let mut w = op(&v);
            matvecs += 1;
            let a = dot(&v, &w).re;
            let b_prev = if j > 0 { beta[j - 1] } else { 0.0 };
            for ((wi, vi), pi) in w.iter_mut().zip(&v).zip(&v_prev) {
                *wi -= vi * a + pi * b_prev;
            }
            alpha.push(a);
            let b = norm(&w);
            if j + 1 == krylov || b <= tol_abs * 1e-6 {
                break;
            }
            if (j + 1) % 10 == 0 {
                let (_, s) = lowest_of_tridiagonal(&alpha, &beta);
                if (b * s[j]).abs() <= tol_abs * 1e-2 {
                    break;
                }
            }
            beta.push(b);
            scale_in_place(&mut w, 1.0 / b);
            v_prev = std::mem::replace(&mut v, w);
        }
        let (_, s) = lowest_of_tridiagonal(&alpha, &beta);

        // Second pass: replay the recurrence to build the Ritz vector.
        let mut y: Vec<Complex64> = v0.iter().map(|z| z * s[0]).collect();
        let mut v_prev = vec![Complex64::new(0.0, 0.0); dim];
        let mut v = v0.clone();
        for j in 0..alpha.len() - 1 {
            let mut w = op(&v);
            matvecs += 1;
            let b_prev = if j > 0 { beta[j - 1] } else { 0.0 };
            for ((wi, vi), pi) in w.iter_mut().zip(&v).zip(&v_prev) {
                *wi = (*wi - vi * alpha[j] - pi * b_prev) / beta[j];
            }
            for (yi, wi) in y.iter_mut().zip(&w) {
                *yi += wi * s[j + 1];
            }
            v_prev = std::mem::replace(&mut v, w);
        }
        let ny = norm(&y);
        scale_in_place(&mut y, 1.0 / ny);

        let hy = op(&y);
        matvecs += 1;
        let theta = dot(&y, &hy).re;
        let residual = hy.iter().zip(&y).map(|(a, b)| (a - b * theta).norm_sqr()).sum::<f64>().sqrt();
        if residual <= tol_abs {
            return Ok(Eigenpair { value: theta, residual, matvecs });
        }
        last_residual = last_residual.min(residual);
        if matvecs >= MAX_MATVECS {
            return Err(Error::NoConvergence { iterations: matvecs, residual: last_residual });
        }
        v0 = y;
    }
}

fn start_vector(dim: usize) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    (0..dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

/// `λ_min(H)` and `λ_max(H)`. The top end is found as the bottom of
/// `c·I − H` with `c = ‖Ĥ‖₁ + |offset|`. Residuals satisfy
/// `‖Hv − λv‖ ≤ tol·‖Ĥ‖₁`.
pub fn extremal_eigs(h: &Hamiltonian, tol: f64) -> Result<SpectrumResult> {
    extremal_eigs_with_limit(h, tol, MAX_STATE_QUBITS)
}

pub fn extremal_eigs_with_limit(h: &Hamiltonian, tol: f64, max_n: usize) -> Result<SpectrumResult> {
    let limit = max_n.min(MAX_STATE_QUBITS);
    if h.n() > limit {
        return Err(Error::TooLarge { what: "exact eigensolver", n: h.n(), limit });
    }
    let l1 = h.stats().l1;
    if h.num_terms() == 0 {
        return Ok(SpectrumResult {
            lambda_min: h.offset(),
            lambda_max: h.offset(),
            iterations: 0,
            residual_min: 0.0,
            residual_max: 0.0,
        });
    }
    let terms = bit_terms(h);
    let offset = h.offset();
    let tol_abs = tol * l1;
    let start = start_vector(1usize << h.n());

    let low = lowest_eigenpair(|v| apply_terms(&terms, offset, v), start.clone(), tol_abs)?;

    let shift = l1 + offset.abs();
    let flipped = |v: &[Complex64]| {
        let hv = apply_terms(&terms, offset, v);
        v.iter().zip(hv).map(|(a, b)| a * shift - b).collect()
    };
    let high = lowest_eigenpair(flipped, start, tol_abs)?;

    Ok(SpectrumResult {
        lambda_min: low.value,
        lambda_max: shift - high.value,
        iterations: low.matvecs + high.matvecs,
        residual_min: low.residual,
        residual_max: high.residual,
    })
}

/// Extremes of `f_H` over all tetrahedral product states.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductExtremes {
    pub min: f64,
    pub max: f64,
    pub argmin: Assignment,
    pub argmax: Assignment,
}

/// Exhaustive scan over `{±1}^{2n}` in lexicographic order (`+1` before `−1`);
/// the first extremal point wins ties.
pub fn brute_force_product(h: &Hamiltonian) -> Result<ProductExtremes> {
    let n = h.n();
    if n > MAX_PRODUCT_QUBITS {
        return Err(Error::TooLarge { what: "product-state scan", n, limit: MAX_PRODUCT_QUBITS });
    }
    let f = hamiltonian_to_poly(h);
    let nv = 2 * n;
    // Variable 0 is the most significant position of the counter.
    let to_neg = |c: u64| if nv == 0 { 0 } else { c.reverse_bits() >> (64 - nv) };
    let (mut best_min, mut best_max) = ((f64::INFINITY, 0u64), (f64::NEG_INFINITY, 0u64));
    for c in 0..(1u64 << nv) {
        let val = f.evaluate_neg_words(&[to_neg(c)]);
        if val < best_min.0 {
            best_min = (val, c);
        }
        if val > best_max.0 {
            best_max = (val, c);
        }
    }
    Ok(ProductExtremes {
        min: best_min.0,
        max: best_max.0,
        argmin: Assignment::from_neg_words(nv, &[to_neg(best_min.1)]),
        argmax: Assignment::from_neg_words(nv, &[to_neg(best_max.1)]),
    })
}

/// Extremes of a Z-only Hamiltonian over computational basis states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagonalExtremes {
    pub min: f64,
    pub max: f64,
    /// Basis states, bit `i` = qubit `i`.
    pub argmin: u64,
    pub argmax: u64,
}

impl DiagonalExtremes {
    pub fn norm(&self) -> f64 {
        self.min.abs().max(self.max.abs())
    }
}

fn diagonal_energy(terms: &[(u64, f64)], offset: f64, b: u64) -> f64 {
    offset + terms.iter().map(|&(z, c)| c * parity_sign((b & z) as usize)).sum::<f64>()
}

/// Gray-code walk over all `2^n` basis states, updating only the terms
/// touching the flipped qubit. Extremes are re-evaluated from scratch at the
/// end so accumulated rounding does not leak into the result.
pub fn brute_force_diagonal(h: &Hamiltonian) -> Result<DiagonalExtremes> {
    let n = h.n();
    if let Some((s, _)) = h.terms().find(|(s, _)| !s.is_diagonal()) {
        return Err(Error::NotDiagonal(s.to_string()));
    }
    if n > MAX_DIAGONAL_QUBITS {
        return Err(Error::TooLarge { what: "diagonal scan", n, limit: MAX_DIAGONAL_QUBITS });
    }
    let terms: Vec<(u64, f64)> = h
        .terms()
        .map(|(s, c)| (s.ops().iter().fold(0u64, |m, &(q, _)| m | 1 << q), c))
        .collect();
    let mut touching: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (t, &(z, _)) in terms.iter().enumerate() {
        for (q, list) in touching.iter_mut().enumerate() {
            if z >> q & 1 == 1 {
                list.push(t);
            }
        }
    }
    let mut signs = vec![1.0f64; terms.len()];
    let mut energy = diagonal_energy(&terms, h.offset(), 0);
    let (mut lo, mut hi) = ((energy, 0u64), (energy, 0u64));
    let mut state = 0u64;
    for step in 1..(1u64 << n) {
        let q = step.trailing_zeros() as usize;
        state ^= 1 << q;
        for &t in &touching[q] {
            energy -= 2.0 * terms[t].1 * signs[t];
            signs[t] = -signs[t];
        }
        if energy < lo.0 {
            lo = (energy, state);
        }
        if energy > hi.0 {
            hi = (energy, state);
        }
    }
    Ok(DiagonalExtremes {
        min: diagonal_energy(&terms, h.offset(), lo.1),
        max: diagonal_energy(&terms, h.offset(), hi.1),
        argmin: lo.1,
        argmax: hi.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{complete_zz, random_klocal, random_signed_regular_zz, CoefDist};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
    }

    #[test]
    fn single_qubit_actions() {
        let z: Hamiltonian = "1 Z0".parse().unwrap();
        assert_eq!(apply_hamiltonian(&z, &[c(1., 0.), c(0., 0.)]).unwrap(), vec![c(1., 0.), c(0., 0.)]);
        assert_eq!(apply_hamiltonian(&z, &[c(0., 0.), c(1., 0.)]).unwrap(), vec![c(0., 0.), c(-1., 0.)]);
        let x: Hamiltonian = "1 X0".parse().unwrap();
        assert_eq!(apply_hamiltonian(&x, &[c(1., 0.), c(0., 0.)]).unwrap(), vec![c(0., 0.), c(1., 0.)]);
        let y: Hamiltonian = "1 Y0".parse().unwrap();
        assert_eq!(apply_hamiltonian(&y, &[c(1., 0.), c(0., 0.)]).unwrap(), vec![c(0., 0.), c(0., 1.)]);
        assert_eq!(apply_hamiltonian(&y, &[c(0., 0.), c(1., 0.)]).unwrap(), vec![c(0., -1.), c(0., 0.)]);
        assert!(matches!(apply_hamiltonian(&y, &[c(1., 0.)]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn singlet_is_eigenvector_of_heisenberg_edge() {
        let h: Hamiltonian = "1 X0 X1\n1 Y0 Y1\n1 Z0 Z1".parse().unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // |01⟩ means qubit 0 = 0, qubit 1 = 1, i.e. basis index 2.
        let singlet = [c(0., 0.), c(-r, 0.), c(r, 0.), c(0., 0.)];
        let out = apply_hamiltonian(&h, &singlet).unwrap();
        let want: Vec<_> = singlet.iter().map(|z| z * -3.0).collect();
        assert!(close(&out, &want, 1e-15));
    }

    #[test]
    fn hermiticity_on_random_vectors() {
        let h = random_klocal(6, 25, 3, 3, CoefDist::Uniform).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut rv = || -> Vec<Complex64> {
            (0..64).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
        };
        let (u, v) = (rv(), rv());
        let lhs = dot(&u, &apply_hamiltonian(&h, &v).unwrap());
        let rhs = dot(&v, &apply_hamiltonian(&h, &u).unwrap()).conj();
        assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn eigs_small_cases() {
        let s = extremal_eigs(&"1 Z0".parse().unwrap(), DEFAULT_TOL).unwrap();
        assert!((s.lambda_min + 1.0).abs() < 1e-8 && (s.lambda_max - 1.0).abs() < 1e-8);

        let edge: Hamiltonian = "1 X0 X1\n1 Y0 Y1\n1 Z0 Z1".parse().unwrap();
        let s = extremal_eigs(&edge, DEFAULT_TOL).unwrap();
        assert!((s.lambda_min + 3.0).abs() < 1e-8, "{s:?}");
        assert!((s.lambda_max - 1.0).abs() < 1e-8, "{s:?}");
        assert!(s.residual_min <= DEFAULT_TOL * 3.0);

        let s = extremal_eigs(&complete_zz(4).unwrap(), DEFAULT_TOL).unwrap();
        assert!((s.lambda_min + 2.0).abs() < 1e-8);
        assert!((s.lambda_max - 6.0).abs() < 1e-8);

        let s = extremal_eigs(&"qubits 3\n1.5 I".parse().unwrap(), DEFAULT_TOL).unwrap();
        assert_eq!((s.lambda_min, s.lambda_max), (1.5, 1.5));
    }

    #[test]
    fn eigs_with_offset_shift() {
        let h: Hamiltonian = "2 I\n1 X0 X1\n1 Y0 Y1\n1 Z0 Z1".parse().unwrap();
        let s = extremal_eigs(&h, DEFAULT_TOL).unwrap();
        assert!((s.lambda_min + 1.0).abs() < 1e-8 && (s.lambda_max - 3.0).abs() < 1e-8);
    }

    #[test]
    fn eigs_match_dense_diagonalization() {
        // Independent route: build the dense Hermitian matrix column by column
        // from basis vectors and diagonalize it.
        for seed in 0..4 {
            let h = random_klocal(5, 18, 3, seed, CoefDist::Uniform).unwrap();
            let dim = 32;
            let mut m = DMatrix::<Complex64>::zeros(dim, dim);
            for col in 0..dim {
                let mut e = vec![c(0., 0.); dim];
                e[col] = c(1., 0.);
                for (row, z) in apply_hamiltonian(&h, &e).unwrap().into_iter().enumerate() {
                    m[(row, col)] = z;
                }
            }
            let ev = m.symmetric_eigenvalues();
            let lo = ev.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = ev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let s = extremal_eigs(&h, DEFAULT_TOL).unwrap();
            assert!((s.lambda_min - lo).abs() < 1e-7, "seed {seed}: {} vs {lo}", s.lambda_min);
            assert!((s.lambda_max - hi).abs() < 1e-7, "seed {seed}: {} vs {hi}", s.lambda_max);
        }
    }

    #[test]
    fn eigs_respect_size_limit() {
        let h = complete_zz(6).unwrap();
        assert!(matches!(extremal_eigs_with_limit(&h, DEFAULT_TOL, 5), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn product_scan_examples() {
        let r = brute_force_product(&"1 Z0".parse().unwrap()).unwrap();
        assert!((r.min + 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(r.argmin.values(), &[1, -1]);
        assert_eq!(r.argmax.values(), &[1, 1]);

        let r = brute_force_product(&"1 Z0 Z1".parse().unwrap()).unwrap();
        assert!((r.min + 1.0 / 3.0).abs() < 1e-15 && (r.max - 1.0 / 3.0).abs() < 1e-15);
        assert!(brute_force_product(&Hamiltonian::empty(13)).is_err());
    }

    #[test]
    fn diagonal_scan_examples() {
        let d = brute_force_diagonal(&complete_zz(4).unwrap()).unwrap();
        assert_eq!((d.min, d.max), (-2.0, 6.0));
        assert_eq!(d.argmin.count_ones(), 2);
        let d = brute_force_diagonal(&complete_zz(6).unwrap()).unwrap();
        assert_eq!(d.min, -3.0);
        assert!(matches!(
            brute_force_diagonal(&"1 X0 Z1".parse().unwrap()),
            Err(Error::NotDiagonal(_))
        ));
    }

    #[test]
    fn diagonal_scan_matches_eigensolver() {
        let h = random_signed_regular_zz(12, 4, 5).unwrap();
        let d = brute_force_diagonal(&h).unwrap();
        let s = extremal_eigs(&h, DEFAULT_TOL).unwrap();
        let tol = DEFAULT_TOL * h.stats().l1;
        assert!((d.min - s.lambda_min).abs() <= tol, "{d:?} {s:?}");
        assert!((d.max - s.lambda_max).abs() <= tol, "{d:?} {s:?}");
    }
}
