//! Greedy coefficient elimination on the Boolean cube, and the energy bounds
//! it yields for Hamiltonians.
//!
//! Each round takes the non-constant monomial `S` with the largest `|f̂(S)|`,
//! fixes the variables of `S` to the sub-assignment maximizing
//! `f_S(y) = Σ_{T⊆S} f̂(T) y_T`, and restricts. Averaging over `y` with
//! `y_S = sgn f̂(S)` shows some `y` lifts the constant term by at least
//! `|f̂(S)|`, while the total weight `W` drops by at most `2dℓ|f̂(S)|`. When
//! nothing but the constant is left it therefore sits at or above
//! `f̂(∅) + W/(2dℓ)`, with `d` the degree and `ℓ` the largest number of
//! monomials sharing one variable in the input.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pauli::Hamiltonian;
use crate::poly::{Assignment, BooleanPolynomial, Monomial};
use crate::qc_map::{assignment_to_state, expectation_oracle_with_limit, hamiltonian_to_poly, ProductState};

/// Slack allowed on every audited inequality.
pub const EPS_NUM: f64 = 1e-9;
const EPS_STEP: f64 = 1e-12;

/// One elimination step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreedyRound {
    pub round: usize,
    /// Variables of the eliminated monomial, ascending.
    pub monomial: Vec<usize>,
    /// Coefficient of the eliminated monomial before the step.
    pub coefficient: f64,
    /// `|coefficient|`.
    pub gain_target: f64,
    /// Values chosen for `monomial`, in the same order.
    pub values: Vec<i8>,
    pub constant_before: f64,
    pub constant_after: f64,
    pub weight_before: f64,
    pub weight_after: f64,
    /// Non-constant monomials left after the step.
    pub remaining: usize,
    /// `ĝ(∅) + W(g)/(2 d(g) ℓ(g))` for the polynomial entering this round.
    pub local_floor: f64,
}

/// Outcome of [`greedy_maximize`] with everything needed to re-check it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCertificate {
    /// Final constant, equal to `f(witness)`.
    pub bound: f64,
    /// `f̂(∅) + W/(2dℓ)` from the input polynomial.
    pub floor: f64,
    /// Largest per-round floor; never used as the certified floor.
    pub dynamic_floor: f64,
    pub witness: Assignment,
    pub initial_constant: f64,
    pub initial_degree: usize,
    pub initial_var_degree: usize,
    pub initial_weight: f64,
    pub initial_monomials: usize,
    pub rounds: Vec<GreedyRound>,
}

/// Reason a certificate failed its audit.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditFailure(pub String);

impl std::fmt::Display for AuditFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn floor_of(constant: f64, weight: f64, degree: usize, var_degree: usize) -> f64 {
    if degree == 0 || var_degree == 0 {
        constant
    } else {
        constant + weight / (2.0 * degree as f64 * var_degree as f64)
    }
}

/// Enumerates sub-assignments of `vars` in lexicographic order with `+1`
/// before `−1` and returns the first maximizer of `f_S`.
fn best_sub_assignment(g: &BooleanPolynomial, s: &Monomial, vars: &[usize]) -> (Vec<i8>, f64) {
    let inside: Vec<(Vec<usize>, f64)> = g
        .terms()
        .filter(|(t, _)| t.is_subset_of(s))
        .map(|(t, c)| {
            let pos = t.vars().iter().map(|v| vars.binary_search(v).expect("subset")).collect();
            (pos, c)
        })
        .collect();
    let width = vars.len();
    let mut best: Option<(u64, f64)> = None;
    for code in 0..(1u64 << width) {
        // position 0 is the most significant digit; a set bit is −1
        let neg = |p: usize| code >> (width - 1 - p) & 1 == 1;
        let value: f64 = inside
            .iter()
            .map(|(pos, c)| if pos.iter().filter(|&&p| neg(p)).count() % 2 == 1 { -c } else { *c })
            .sum();
        if best.map_or(true, |(_, b)| value > b) {
            best = Some((code, value));
        }
    }
    let (code, value) = best.expect("at least one sub-assignment");
    let values = (0..width).map(|p| if code >> (width - 1 - p) & 1 == 1 { -1 } else { 1 }).collect();
    (values, value)
}

/// Runs greedy elimination to a constant. Variables never fixed are set to `+1`.
pub fn greedy_maximize(f: &BooleanPolynomial) -> BoundCertificate {
    let initial_degree = f.degree();
    let initial_var_degree = f.var_degree();
    let initial_weight = f.total_weight();
    let initial_constant = f.constant_term();
    let floor = floor_of(initial_constant, initial_weight, initial_degree, initial_var_degree);

    let mut witness = vec![1i8; f.n_vars()];
    let mut g = f.clone();
    let mut rounds = Vec::new();
    let mut dynamic_floor = floor;

    while let Ok((s, coef)) = g.max_abs_coeff() {
        let s = s.clone();
        let vars = s.vars();
        let constant_before = g.constant_term();
        let weight_before = g.total_weight();
        let local_floor = floor_of(constant_before, weight_before, g.degree(), g.var_degree());
        dynamic_floor = dynamic_floor.max(local_floor);

        let (values, _) = best_sub_assignment(&g, &s, &vars);
        let partial: Vec<(usize, i8)> = vars.iter().copied().zip(values.iter().copied()).collect();
        g = g.restrict(&partial).expect("monomial variables are distinct and in range");
        for &(v, val) in &partial {
            witness[v] = val;
        }
        rounds.push(GreedyRound {
            round: rounds.len() + 1,
            monomial: vars,
            coefficient: coef,
            gain_target: coef.abs(),
            values,
            constant_before,
            constant_after: g.constant_term(),
            weight_before,
            weight_after: g.total_weight(),
            remaining: g.num_non_constant(),
            local_floor,
        });
    }

    BoundCertificate {
        bound: g.constant_term(),
        floor,
        dynamic_floor,
        witness: Assignment::new(witness).expect("entries are ±1"),
        initial_constant,
        initial_degree,
        initial_var_degree,
        initial_weight,
        initial_monomials: f.num_non_constant(),
        rounds,
    }
}

impl BoundCertificate {
    /// Re-checks every claim of the certificate against the polynomial it
    /// was produced from.
    pub fn audit(&self, f: &BooleanPolynomial) -> std::result::Result<(), AuditFailure> {
        let fail = |msg: String| Err(AuditFailure(msg));
        let (d, l) = (f.degree(), f.var_degree());
        if d != self.initial_degree || l != self.initial_var_degree {
            return fail(format!(
                "recorded d = {}, l = {} but polynomial has d = {d}, l = {l}",
                self.initial_degree, self.initial_var_degree
            ));
        }
        let floor = floor_of(f.constant_term(), f.total_weight(), d, l);
        if (floor - self.floor).abs() > EPS_NUM {
            return fail(format!("recorded floor {} but recomputed {floor}", self.floor));
        }
        if self.bound < floor - EPS_NUM {
            return fail(format!("bound {} below guaranteed floor {floor}", self.bound));
        }
        let value = f.evaluate(&self.witness).map_err(|e| AuditFailure(e.to_string()))?;
        if (value - self.bound).abs() > EPS_NUM {
            return fail(format!("witness evaluates to {value}, certificate says {}", self.bound));
        }
        let mut g = f.clone();
        let mut previous_remaining = f.num_non_constant();
        for r in &self.rounds {
            let (s, coef) = g.max_abs_coeff().map_err(|e| AuditFailure(e.to_string()))?;
            if s.vars() != r.monomial || coef != r.coefficient {
                return fail(format!("round {}: expected monomial {:?}", r.round, s.vars()));
            }
            let s = s.clone();
            let (_, best) = best_sub_assignment(&g, &s, &r.monomial);
            if r.constant_after < r.constant_before + r.gain_target - EPS_NUM {
                return fail(format!("round {}: constant rose by less than |f̂(S)|", r.round));
            }
            if best < r.constant_before + r.gain_target - EPS_STEP {
                return fail(format!("round {}: no sub-assignment reaches f̂(∅) + |f̂(S)|", r.round));
            }
            let max_drop = 2.0 * d as f64 * l as f64 * r.gain_target;
            if r.weight_after < r.weight_before - max_drop - EPS_NUM {
                return fail(format!("round {}: W dropped by more than 2dℓM", r.round));
            }
            if r.remaining >= previous_remaining {
                return fail(format!("round {}: monomial count did not decrease", r.round));
            }
            previous_remaining = r.remaining;
            let partial: Vec<(usize, i8)> =
                r.monomial.iter().copied().zip(r.values.iter().copied()).collect();
            g = g.restrict(&partial).map_err(|e| AuditFailure(e.to_string()))?;
            if (g.constant_term() - r.constant_after).abs() > EPS_NUM
                || (g.total_weight() - r.weight_after).abs() > EPS_NUM
            {
                return fail(format!("round {}: replay disagrees with recorded values", r.round));
            }
        }
        if !g.is_constant() {
            return fail("rounds end before the polynomial is constant".into());
        }
        if self.rounds.len() > self.initial_monomials {
            return fail("more rounds than initial monomials".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Min,
    Max,
}

/// Energy bound for a Hamiltonian with its product-state witness.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyBound {
    pub direction: Direction,
    /// `⟨ψ|H|ψ⟩` of the witness, offset included.
    pub energy: f64,
    pub offset: f64,
    /// Guaranteed side of the energy: `offset ∓ W(f_H)/(2dℓ_c)`.
    pub certified_floor: f64,
    /// `offset ∓ ‖Ĥ‖₁/(24ℓ_q)` for Hamiltonians with `k ≤ 2`.
    pub two_local_floor: Option<f64>,
    pub l_q: usize,
    pub l_c: usize,
    pub k: usize,
    pub l1: f64,
    pub state: ProductState,
    /// Greedy run on `∓f_H` for the traceless part.
    pub certificate: BoundCertificate,
}

impl EnergyBound {
    /// Whether the energy respects the certified floor (and the `k ≤ 2` floor).
    pub fn within_floors(&self) -> bool {
        let beats = |energy: f64, floor: f64| match self.direction {
            Direction::Min => energy <= floor + EPS_NUM,
            Direction::Max => energy >= floor - EPS_NUM,
        };
        beats(self.energy, self.certified_floor)
            && self.two_local_floor.map_or(true, |p| beats(self.energy, p))
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "direction": self.direction,
            "energy": self.energy,
            "offset": self.offset,
            "certified_floor": self.certified_floor,
            "two_local_floor": self.two_local_floor,
            "k": self.k,
            "l_q": self.l_q,
            "l_c": self.l_c,
            "l1": self.l1,
            "witness": self.certificate.witness,
            "product_state": self.state.to_json_value(),
            "certificate": self.certificate,
        })
    }
}

fn energy_bound(h: &Hamiltonian, direction: Direction) -> Result<EnergyBound> {
    let stats = h.stats();
    let offset = h.offset();
    let f_h = hamiltonian_to_poly(&h.traceless_part());
    let target = match direction {
        Direction::Min => f_h.negated(),
        Direction::Max => f_h.clone(),
    };
    let certificate = greedy_maximize(&target);
    let sign = match direction {
        Direction::Min => -1.0,
        Direction::Max => 1.0,
    };
    let energy = offset + sign * certificate.bound;
    let certified_floor = offset + sign * (certificate.floor - certificate.initial_constant);
    let two_local_floor = (stats.k <= 2 && stats.m > 0)
        .then(|| offset + sign * stats.l1 / (24.0 * stats.l_q as f64));
    let state = assignment_to_state(&certificate.witness)?;
    Ok(EnergyBound {
        direction,
        energy,
        offset,
        certified_floor,
        two_local_floor,
        l_q: stats.l_q,
        l_c: f_h.var_degree(),
        k: stats.k,
        l1: stats.l1,
        state,
        certificate,
    })
}

/// Product state with low energy: `λ_min(H) ≤ energy ≤ offset − W(f_H)/(2dℓ_c)`.
pub fn min_energy_bound(h: &Hamiltonian) -> Result<EnergyBound> {
    energy_bound(h, Direction::Min)
}

/// Product state with high energy: `λ_max(H) ≥ energy ≥ offset + W(f_H)/(2dℓ_c)`.
pub fn max_energy_bound(h: &Hamiltonian) -> Result<EnergyBound> {
    energy_bound(h, Direction::Max)
}

/// Checks an energy bound's witness against the state-vector oracle.
pub fn check_witness_with_oracle(h: &Hamiltonian, b: &EnergyBound, limit: usize) -> Result<f64> {
    let value = expectation_oracle_with_limit(h, &b.certificate.witness, limit)?;
    if (value - b.energy).abs() > EPS_NUM {
        return Err(Error::Internal(format!(
            "oracle gives {value} for the witness, bound reports {}",
            b.energy
        )));
    }
    Ok(value)
}
