//! Hamiltonians as polynomials on the Boolean cube.
//!
//! Each qubit gets two Boolean variables `(x₁, x₂) = (x_{2i}, x_{2i+1})`
//! labelling one of four tetrahedral states with Bloch vector
//! `(x₁, x₁x₂, x₂)/√3`. On a product of such states every Pauli string
//! evaluates to a single monomial, so `⟨ψ_x|H|ψ_x⟩` is a polynomial `f_H` of
//! degree at most `2k` with `f̂_H(s) = Ĥ_s 3^{-|s|/2}`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::apply_hamiltonian;
use crate::pauli::{Hamiltonian, Pauli, PauliString};
use crate::poly::{Assignment, BooleanPolynomial, Monomial};

/// Largest qubit count the state-vector oracle accepts by default.
pub const ORACLE_MAX_QUBITS: usize = 20;

/// Tolerance on the imaginary part of `⟨ψ|H|ψ⟩`.
const IMAG_TOL: f64 = 1e-9;

/// `⟨ψ_x|s|ψ_x⟩` for a single-qubit operator (`None` is the identity).
pub fn chi(s: Option<Pauli>, x1: i8, x2: i8) -> f64 {
    let r3 = 3f64.sqrt();
    match s {
        None => 1.0,
        Some(Pauli::X) => f64::from(x1) / r3,
        Some(Pauli::Y) => f64::from(x1 * x2) / r3,
        Some(Pauli::Z) => f64::from(x2) / r3,
    }
}

/// Offsets (relative to `2q`) of the variables a Pauli factor on qubit `q` touches.
fn var_offsets(p: Pauli) -> &'static [usize] {
    match p {
        Pauli::X => &[0],
        Pauli::Y => &[0, 1],
        Pauli::Z => &[1],
    }
}

/// Monomial of `f_H` corresponding to a Pauli string.
pub fn pauli_monomial(s: &PauliString) -> Monomial {
    let vars = s
        .ops()
        .iter()
        .flat_map(|&(q, p)| var_offsets(p).iter().map(move |d| 2 * q + d));
    Monomial::from_vars(vars).expect("distinct qubits give distinct variables")
}

/// `3^{-w/2}`, exact for even `w`.
pub fn weight_factor(w: usize) -> f64 {
    let half = 3f64.powi((w / 2) as i32);
    if w % 2 == 0 {
        1.0 / half
    } else {
        1.0 / (half * 3f64.sqrt())
    }
}

/// Builds `f_H` over `2n` variables. The identity offset becomes `f̂(∅)`.
pub fn hamiltonian_to_poly(h: &Hamiltonian) -> BooleanPolynomial {
    let terms = std::iter::once((Monomial::empty(), h.offset()))
        .chain(h.terms().map(|(s, c)| (pauli_monomial(s), c * weight_factor(s.weight()))));
    BooleanPolynomial::new(2 * h.n(), terms).expect("monomials stay within 2n variables")
}

/// One of the four tetrahedral single-qubit states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TetrahedronState {
    pub label: (i8, i8),
    pub amplitudes: [Complex64; 2],
}

impl TetrahedronState {
    /// `ψ₊₊ = (√(3+√3)|0⟩ + e^{iπ/4}√(3−√3)|1⟩)/√6`; the other labels are
    /// `Zψ₊₊` for `(−,+)`, `Xψ₊₊` for `(+,−)` and `Yψ₊₊` for `(−,−)`.
    pub fn new(x1: i8, x2: i8) -> Result<Self> {
        for v in [x1, x2] {
            if v != 1 && v != -1 {
                return Err(Error::InvalidSpin(v.into()));
            }
        }
        let r3 = 3f64.sqrt();
        let r6 = 6f64.sqrt();
        let a0 = Complex64::new((3.0 + r3).sqrt() / r6, 0.0);
        let a1 = Complex64::from_polar((3.0 - r3).sqrt() / r6, std::f64::consts::FRAC_PI_4);
        let i = Complex64::i();
        let amplitudes = match (x1, x2) {
            (1, 1) => [a0, a1],
            (-1, 1) => [a0, -a1],
            (1, -1) => [a1, a0],
            _ => [-i * a1, i * a0],
        };
        Ok(TetrahedronState { label: (x1, x2), amplitudes })
    }

    /// `(⟨X⟩, ⟨Y⟩, ⟨Z⟩)` computed from the amplitudes.
    pub fn bloch_vector(&self) -> [f64; 3] {
        let [a0, a1] = self.amplitudes;
        let off = a0.conj() * a1;
        [2.0 * off.re, 2.0 * off.im, a0.norm_sqr() - a1.norm_sqr()]
    }
}

/// Tensor product of tetrahedral states labelled by an assignment of `2n` spins.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductState {
    assignment: Assignment,
    factors: Vec<TetrahedronState>,
}

impl ProductState {
    pub fn factors(&self) -> &[TetrahedronState] {
        &self.factors
    }

    pub fn assignment(&self) -> &Assignment {
        &self.assignment
    }

    pub fn num_qubits(&self) -> usize {
        self.factors.len()
    }

    /// Dense amplitudes; basis index bit `i` is qubit `i`.
    pub fn state_vector(&self) -> Result<Vec<Complex64>> {
        let n = self.factors.len();
        if n > ORACLE_MAX_QUBITS {
            return Err(Error::TooLarge { what: "product state vector", n, limit: ORACLE_MAX_QUBITS });
        }
        let mut psi = vec![Complex64::new(1.0, 0.0)];
        for (q, f) in self.factors.iter().enumerate() {
            let mut next = vec![Complex64::new(0.0, 0.0); psi.len() * 2];
            let half = 1usize << q;
            for (b, &amp) in psi.iter().enumerate() {
                next[b] = amp * f.amplitudes[0];
                next[b + half] = amp * f.amplitudes[1];
            }
            psi = next;
        }
        Ok(psi)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Factor {
            label: [i8; 2],
            amplitudes: [[f64; 2]; 2],
        }
        #[derive(Serialize)]
        struct Export<'a> {
            assignment: &'a Assignment,
            factors: Vec<Factor>,
        }
        let export = Export {
            assignment: &self.assignment,
            factors: self
                .factors
                .iter()
                .map(|f| Factor {
                    label: [f.label.0, f.label.1],
                    amplitudes: f.amplitudes.map(|a| [a.re, a.im]),
                })
                .collect(),
        };
        serde_json::to_value(export).expect("plain data serializes")
    }
}

/// Splits `x` into consecutive pairs, one tetrahedral state per pair.
pub fn assignment_to_state(x: &Assignment) -> Result<ProductState> {
    if x.len() % 2 != 0 {
        return Err(Error::OddAssignment(x.len()));
    }
    let factors = x
        .values()
        .chunks_exact(2)
        .map(|b| TetrahedronState::new(b[0], b[1]))
        .collect::<Result<Vec<_>>>()?;
    Ok(ProductState { assignment: x.clone(), factors })
}

/// `⟨ψ_x|H|ψ_x⟩` via explicit state vectors, independent of the polynomial route.
pub fn expectation_oracle(h: &Hamiltonian, x: &Assignment) -> Result<f64> {
    expectation_oracle_with_limit(h, x, ORACLE_MAX_QUBITS)
}

pub fn expectation_oracle_with_limit(h: &Hamiltonian, x: &Assignment, limit: usize) -> Result<f64> {
    if h.n() > limit {
        return Err(Error::TooLarge { what: "expectation oracle", n: h.n(), limit });
    }
    if x.len() != 2 * h.n() {
        return Err(Error::LengthMismatch { expected: 2 * h.n(), got: x.len() });
    }
    let psi = assignment_to_state(x)?.state_vector()?;
    let h_psi = apply_hamiltonian(h, &psi)?;
    let value: Complex64 = psi.iter().zip(&h_psi).map(|(a, b)| a.conj() * b).sum();
    if value.im.abs() > IMAG_TOL * (1.0 + h.stats().l1 + h.offset().abs()) {
        return Err(Error::Internal(format!(
            "expectation value has imaginary part {:e}",
            value.im
        )));
    }
    Ok(value.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{random_klocal, CoefDist};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const R3: f64 = 1.7320508075688772;

    fn x(v: &[i8]) -> Assignment {
        Assignment::new(v.to_vec()).unwrap()
    }

    fn random_x(rng: &mut ChaCha8Rng, n: usize) -> Assignment {
        x(&(0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect::<Vec<_>>())
    }

    #[test]
    fn chi_values() {
        assert_eq!(chi(None, -1, -1), 1.0);
        assert!((chi(Some(Pauli::X), 1, -1) - 0.5773503).abs() < 1e-7);
        assert!((chi(Some(Pauli::Y), -1, 1) + 1.0 / R3).abs() < 1e-15);
        assert!((chi(Some(Pauli::Z), 1, -1) + 1.0 / R3).abs() < 1e-15);
    }

    #[test]
    fn chi_equals_expectation_in_each_tetrahedron_state() {
        for (x1, x2) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
            let b = TetrahedronState::new(x1, x2).unwrap().bloch_vector();
            for (p, v) in [Pauli::X, Pauli::Y, Pauli::Z].into_iter().zip(b) {
                assert!((chi(Some(p), x1, x2) - v).abs() < 1e-15, "{p:?} at {x1},{x2}");
            }
        }
    }

    #[test]
    fn poly_of_single_terms() {
        let f = hamiltonian_to_poly(&"1 Z0 Z1".parse().unwrap());
        assert_eq!(f.n_vars(), 4);
        let m = Monomial::from_vars([1, 3]).unwrap();
        assert!((f.coefficient(&m) - 1.0 / 3.0).abs() < 1e-16);
        assert!((f.variance() - 1.0 / 9.0).abs() < 1e-16);

        let f = hamiltonian_to_poly(&"-2.5 X0".parse().unwrap());
        assert!((f.coefficient(&Monomial::from_vars([0]).unwrap()) + 2.5 / R3).abs() < 1e-15);

        let f = hamiltonian_to_poly(&"1 Y0".parse().unwrap());
        assert!((f.coefficient(&Monomial::from_vars([0, 1]).unwrap()) - 1.0 / R3).abs() < 1e-15);
        assert_eq!(f.degree(), 2);

        let f = hamiltonian_to_poly(&"0.75 I\n1 X2".parse().unwrap());
        assert_eq!(f.constant_term(), 0.75);
        assert_eq!(f.n_vars(), 6);
    }

    #[test]
    fn plus_plus_amplitudes_and_z_flip() {
        let s = assignment_to_state(&x(&[1, 1])).unwrap();
        let [a0, a1] = s.factors()[0].amplitudes;
        assert!((a0.re - (3.0 + R3).sqrt() / 6f64.sqrt()).abs() < 1e-15);
        assert!(a0.im.abs() < 1e-15);
        let mag = (3.0 - R3).sqrt() / 6f64.sqrt();
        assert!((a1.re - mag / 2f64.sqrt()).abs() < 1e-15);
        assert!((a1.im - mag / 2f64.sqrt()).abs() < 1e-15);

        let z = assignment_to_state(&x(&[-1, 1])).unwrap();
        assert_eq!(z.factors()[0].amplitudes, [a0, -a1]);
    }

    #[test]
    fn bloch_vector_of_plus_minus_block() {
        // Independent route: density matrix ρ = |ψ⟩⟨ψ|, ⟨σ⟩ = tr(ρσ).
        let s = TetrahedronState::new(1, -1).unwrap();
        let [a0, a1] = s.amplitudes;
        let rho01 = a0 * a1.conj();
        let (ex, ey, ez) = (2.0 * rho01.re, -2.0 * rho01.im, a0.norm_sqr() - a1.norm_sqr());
        let expect = [1.0 / R3, -1.0 / R3, -1.0 / R3];
        for (got, want) in [ex, ey, ez].into_iter().zip(expect) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn odd_assignment_rejected() {
        assert_eq!(assignment_to_state(&x(&[1, 1, 1])), Err(Error::OddAssignment(3)));
    }

    #[test]
    fn tetrahedron_is_a_two_design() {
        let states: Vec<_> = [(1, 1), (1, -1), (-1, 1), (-1, -1)]
            .into_iter()
            .map(|(a, b)| TetrahedronState::new(a, b).unwrap())
            .collect();
        let mut avg = [[Complex64::new(0.0, 0.0); 2]; 2];
        for s in &states {
            for r in 0..2 {
                for c in 0..2 {
                    avg[r][c] += s.amplitudes[r] * s.amplitudes[c].conj() / 4.0;
                }
            }
        }
        for r in 0..2 {
            for c in 0..2 {
                let want = if r == c { 0.5 } else { 0.0 };
                assert!((avg[r][c] - want).norm() < 1e-12);
            }
        }
        for (i, a) in states.iter().enumerate() {
            let norm: f64 = a.amplitudes.iter().map(|z| z.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-12);
            for b in &states[i + 1..] {
                let ov: Complex64 =
                    a.amplitudes.iter().zip(&b.amplitudes).map(|(p, q)| p.conj() * q).sum();
                assert!((ov.norm_sqr() - 1.0 / 3.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn oracle_examples() {
        let h: Hamiltonian = "1 Z0".parse().unwrap();
        assert!((expectation_oracle(&h, &x(&[1, 1])).unwrap() - 1.0 / R3).abs() < 1e-12);
        let h: Hamiltonian = "qubits 2\n2.0 I".parse().unwrap();
        assert!((expectation_oracle(&h, &x(&[1, -1, -1, 1])).unwrap() - 2.0).abs() < 1e-12);
        assert!(matches!(expectation_oracle(&h, &x(&[1, 1])), Err(Error::LengthMismatch { .. })));
        let big = Hamiltonian::empty(21);
        assert!(matches!(
            expectation_oracle(&big, &Assignment::all_plus(42)),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn correspondence_on_random_three_local() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for seed in 0..20 {
            let h = random_klocal(5, 15, 3, seed, CoefDist::Uniform).unwrap();
            let f = hamiltonian_to_poly(&h);
            for _ in 0..10 {
                let pt = random_x(&mut rng, 10);
                let a = f.evaluate(&pt).unwrap();
                let b = expectation_oracle(&h, &pt).unwrap();
                assert!((a - b).abs() <= 1e-9, "seed {seed}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn mapping_is_linear() {
        let h1 = random_klocal(4, 10, 3, 1, CoefDist::Uniform).unwrap();
        let h2 = random_klocal(4, 10, 2, 2, CoefDist::Uniform).unwrap();
        let (a, b) = (0.7, -1.3);
        let combo = Hamiltonian::from_terms(
            4,
            0.0,
            h1.terms()
                .map(|(s, c)| (s.clone(), a * c))
                .chain(h2.terms().map(|(s, c)| (s.clone(), b * c))),
        )
        .unwrap();
        let (f, f1, f2) = (hamiltonian_to_poly(&combo), hamiltonian_to_poly(&h1), hamiltonian_to_poly(&h2));
        for (m, _) in f1.terms().chain(f2.terms()).chain(f.terms()) {
            let want = a * f1.coefficient(m) + b * f2.coefficient(m);
            assert!((f.coefficient(m) - want).abs() < 1e-12, "{m:?}");
        }
    }

    #[test]
    fn variance_and_influence_identities() {
        for seed in 0..10 {
            let h = random_klocal(5, 12, 3, seed, CoefDist::Uniform).unwrap();
            let f = hamiltonian_to_poly(&h);
            let coef_side: f64 = h.terms().map(|(s, c)| c * c * weight_factor(s.weight()).powi(2)).sum();
            assert!((f.variance() - coef_side).abs() < 1e-12);
            for j in 0..10 {
                let (q, second) = (j / 2, j % 2 == 1);
                let want: f64 = h
                    .terms()
                    .filter(|(s, _)| match s.get(q) {
                        Some(Pauli::Y) => true,
                        Some(Pauli::X) => !second,
                        Some(Pauli::Z) => second,
                        None => false,
                    })
                    .map(|(s, c)| c * c * 3f64.powi(-(s.weight() as i32)))
                    .sum();
                assert!((f.influence(j) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn product_state_json_shape() {
        let s = assignment_to_state(&x(&[1, -1])).unwrap();
        let v = s.to_json_value();
        assert_eq!(v["assignment"], serde_json::json!([1, -1]));
        assert_eq!(v["factors"][0]["label"], serde_json::json!([1, -1]));
        assert_eq!(v["factors"][0]["amplitudes"].as_array().unwrap().len(), 2);
    }
}
