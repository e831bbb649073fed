//! Best-of-N random tetrahedral product states as an operator-norm witness.
//!
//! For traceless `H`, `E_x[f_H(x)²] = Var(f_H)`, and a degree-`2k`
//! polynomial exceeds its standard deviation in absolute value with
//! probability `exp(−O(k))`. Sampling therefore finds, with high
//! probability, a product state with `|⟨ψ|H|ψ⟩| ≥ √Var(f_H)`.
//!
//! Samples are drawn in fixed-size blocks; block `b` uses the ChaCha8 stream
//! `b` of the seed, so the result does not depend on how blocks are spread
//! over threads.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::pauli::Hamiltonian;
use crate::poly::{Assignment, BooleanPolynomial};
use crate::qc_map::{assignment_to_state, hamiltonian_to_poly};

const BLOCK: u64 = 1024;
const THRESHOLD_RTOL: f64 = 1e-12;

/// Default sample count `3^k · 1000`.
pub fn default_samples(k: usize) -> u64 {
    3u64.saturating_pow(k as u32).saturating_mul(1000)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleReport {
    pub n_samples: u64,
    pub seed: u64,
    /// Index of the first sample attaining the best value.
    pub best_index: u64,
    pub best_assignment: Assignment,
    /// `f_H` at the best sample (signed).
    pub best_value: f64,
    /// `|f_H|` at the best sample: a lower bound on `‖H‖`.
    pub best_abs: f64,
    /// `√Var(f_H)`.
    pub threshold: f64,
    /// Fraction of samples with `|f_H| ≥ threshold`.
    pub fraction_above: f64,
    pub mean: f64,
    pub mean_square: f64,
    pub variance: f64,
    pub k: usize,
    pub l2sq: f64,
    pub influences: Vec<f64>,
    pub i_max: f64,
    pub offset: f64,
}

impl SampleReport {
    pub fn to_json_value(&self) -> Result<serde_json::Value> {
        let mut v = serde_json::to_value(self).expect("plain data serializes");
        v["product_state"] = assignment_to_state(&self.best_assignment)?.to_json_value();
        Ok(v)
    }
}

/// Per-variable influences of `f_H` together with their maximum.
pub fn influence_report(h: &Hamiltonian) -> (Vec<f64>, f64) {
    let inf = hamiltonian_to_poly(h).influences();
    let max = inf.iter().copied().fold(0.0, f64::max);
    (inf, max)
}

#[derive(Clone, Copy)]
struct BlockSummary {
    best_abs: f64,
    best_value: f64,
    best_index: u64,
    above: u64,
    sum: f64,
    sum_sq: f64,
}

fn run_block(
    f: &BooleanPolynomial,
    n_words: usize,
    n_vars: usize,
    seed: u64,
    block: u64,
    count: u64,
    threshold: f64,
) -> BlockSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    let mut words = vec![0u64; n_words];
    let tail = n_vars % 64;
    let mut s = BlockSummary {
        best_abs: f64::NEG_INFINITY,
        best_value: 0.0,
        best_index: 0,
        above: 0,
        sum: 0.0,
        sum_sq: 0.0,
    };
    for i in 0..count {
        for w in words.iter_mut() {
            *w = rng.next_u64();
        }
        if tail != 0 {
            words[n_words - 1] &= (1u64 << tail) - 1;
        }
        let v = f.evaluate_neg_words(&words);
        let a = v.abs();
        if a > s.best_abs {
            s.best_abs = a;
            s.best_value = v;
            s.best_index = block * BLOCK + i;
        }
        if a >= threshold * (1.0 - THRESHOLD_RTOL) {
            s.above += 1;
        }
        s.sum += v;
        s.sum_sq += v * v;
    }
    s
}

/// Regenerates sample `index` of a run.
fn sample_at(n_vars: usize, seed: u64, index: u64) -> Assignment {
    let n_words = n_vars.div_ceil(64).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index / BLOCK);
    let mut words = vec![0u64; n_words];
    for _ in 0..=(index % BLOCK) {
        for w in words.iter_mut() {
            *w = rng.next_u64();
        }
    }
    Assignment::from_neg_words(n_vars, &words)
}

/// Draws `n_samples` uniform points of `{±1}^{2n}` and reports the best
/// `|f_H|`, evaluated on the traceless part of `H`. The offset is reported
/// separately.
pub fn sample_norm_bound(h: &Hamiltonian, n_samples: u64, seed: u64) -> SampleReport {
    let traceless = h.traceless_part();
    let f = hamiltonian_to_poly(&traceless);
    let n_vars = f.n_vars();
    let n_words = n_vars.div_ceil(64).max(1);
    let variance = f.variance();
    let threshold = variance.sqrt();
    let stats = h.stats();
    let (influences, i_max) = influence_report(&traceless);

    let n_samples = n_samples.max(1);
    let n_blocks = n_samples.div_ceil(BLOCK);
    let blocks: Vec<BlockSummary> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let count = BLOCK.min(n_samples - b * BLOCK);
            run_block(&f, n_words, n_vars, seed, b, count, threshold)
        })
        .collect();

    // Blocks are merged in index order; sums are therefore partition-independent.
    let mut best = blocks[0];
    let (mut above, mut sum, mut sum_sq) = (0u64, 0.0, 0.0);
    for b in &blocks {
        if b.best_abs > best.best_abs {
            best = *b;
        }
        above += b.above;
        sum += b.sum;
        sum_sq += b.sum_sq;
    }
    let nf = n_samples as f64;
    SampleReport {
        n_samples,
        seed,
        best_index: best.best_index,
        best_assignment: sample_at(n_vars, seed, best.best_index),
        best_value: best.best_value,
        best_abs: best.best_abs,
        threshold,
        fraction_above: above as f64 / nf,
        mean: sum / nf,
        mean_square: sum_sq / nf,
        variance,
        k: stats.k,
        l2sq: stats.l2sq,
        influences,
        i_max,
        offset: h.offset(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{brute_force_diagonal, extremal_eigs, DEFAULT_TOL};
    use crate::instances::{random_klocal, random_signed_regular_zz, CoefDist};
    use crate::qc_map::expectation_oracle;

    const R3: f64 = 1.7320508075688772;

    #[test]
    fn single_z_every_sample_hits_threshold() {
        let r = sample_norm_bound(&"1 Z0".parse().unwrap(), 50, 3);
        assert!((r.best_abs - 1.0 / R3).abs() < 1e-15);
        assert!((r.threshold - 1.0 / R3).abs() < 1e-15);
        assert_eq!(r.fraction_above, 1.0);
    }

    #[test]
    fn zz_two_valued() {
        let r = sample_norm_bound(&"1 Z0 Z1".parse().unwrap(), 200, 0);
        assert!((r.threshold - 1.0 / 3.0).abs() < 1e-15);
        assert!((r.best_abs - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.fraction_above, 1.0);
        assert!((r.variance - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn empty_hamiltonian_reports_zero() {
        let r = sample_norm_bound(&Hamiltonian::empty(3), 10, 0);
        assert_eq!((r.best_abs, r.threshold), (0.0, 0.0));
        assert_eq!(r.best_assignment.len(), 6);
    }

    #[test]
    fn influences_examples() {
        let (inf, max) = influence_report(&"1 X0".parse().unwrap());
        assert!((inf[0] - 1.0 / 3.0).abs() < 1e-15 && inf[1] == 0.0);
        assert!((max - 1.0 / 3.0).abs() < 1e-15);
        let (inf, _) = influence_report(&"1 Y0".parse().unwrap());
        assert!((inf[0] - 1.0 / 3.0).abs() < 1e-15 && (inf[1] - 1.0 / 3.0).abs() < 1e-15);
        let (inf, _) = influence_report(&"1 Z0 Z1".parse().unwrap());
        assert!((inf.iter().sum::<f64>() - 2.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn best_sample_is_reproducible_and_consistent() {
        let h = random_klocal(6, 20, 3, 4, CoefDist::Uniform).unwrap();
        let a = sample_norm_bound(&h, 5000, 77);
        let b = sample_norm_bound(&h, 5000, 77);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let f = hamiltonian_to_poly(&h);
        assert_eq!(f.evaluate(&a.best_assignment).unwrap(), a.best_value);
        let oracle = expectation_oracle(&h, &a.best_assignment).unwrap();
        assert!((oracle - a.best_value).abs() < 1e-9);
        assert_ne!(a, sample_norm_bound(&h, 5000, 78));
    }

    #[test]
    fn block_split_does_not_change_prefix_samples() {
        let h = random_klocal(5, 12, 2, 1, CoefDist::Uniform).unwrap();
        let f = hamiltonian_to_poly(&h);
        let r = sample_norm_bound(&h, 3000, 5);
        let mut best = f64::NEG_INFINITY;
        for i in 0..3000 {
            best = best.max(f.evaluate(&sample_at(10, 5, i)).unwrap().abs());
        }
        assert_eq!(best, r.best_abs);
    }

    #[test]
    fn moments_concentrate() {
        let h = random_klocal(8, 20, 2, 2, CoefDist::Sign).unwrap();
        let n = 20_000u64;
        let r = sample_norm_bound(&h, n, 1);
        let sd = r.variance.sqrt();
        assert!(r.mean.abs() <= 5.0 / (n as f64).sqrt() * sd);
        assert!((r.mean_square - r.variance).abs() <= 10.0 / (n as f64).sqrt() * r.variance);
    }

    #[test]
    fn best_stays_below_norm() {
        let h = random_klocal(6, 15, 2, 9, CoefDist::Uniform).unwrap();
        let s = extremal_eigs(&h, DEFAULT_TOL).unwrap();
        let r = sample_norm_bound(&h, 4000, 2);
        assert!(r.best_abs <= s.norm() + 1e-6);
        let z = random_signed_regular_zz(10, 3, 4).unwrap();
        let d = brute_force_diagonal(&z).unwrap();
        assert!(sample_norm_bound(&z, 4000, 2).best_abs <= d.norm() + 1e-9);
    }

    #[test]
    fn default_sample_count() {
        assert_eq!(default_samples(0), 1000);
        assert_eq!(default_samples(2), 9000);
    }
}
