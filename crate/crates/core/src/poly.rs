//! Sparse multilinear polynomials on the Boolean cube `{±1}^N`.
//!
//! A polynomial is its Fourier expansion: a map from monomials (sets of
//! variable indices) to real coefficients. Monomials whose variables all fit
//! below 64 are stored as a bitmask; larger ones fall back to a sorted index
//! list. The two encodings are canonical, so equality and hashing are exact.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::EPS_ZERO;

/// A set of variable indices, ordered lexicographically by sorted index list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Monomial {
    Small(u64),
    Large(Box<[usize]>),
}

impl Monomial {
    pub fn empty() -> Self {
        Monomial::Small(0)
    }

    /// Builds a monomial from distinct variable indices. Duplicates are rejected.
    pub fn from_vars(vars: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut v: Vec<usize> = vars.into_iter().collect();
        v.sort_unstable();
        if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DoubleAssignment { var: w[0] });
        }
        Ok(Self::from_sorted(v))
    }

    fn from_sorted(v: Vec<usize>) -> Self {
        if v.last().map_or(true, |&m| m < 64) {
            Monomial::Small(v.iter().fold(0u64, |acc, &i| acc | (1u64 << i)))
        } else {
            Monomial::Large(v.into_boxed_slice())
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Monomial::Small(m) => m.count_ones() as usize,
            Monomial::Large(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn vars(&self) -> Vec<usize> {
        match self {
            Monomial::Small(m) => {
                let mut out = Vec::with_capacity(m.count_ones() as usize);
                let mut rest = *m;
                while rest != 0 {
                    out.push(rest.trailing_zeros() as usize);
                    rest &= rest - 1;
                }
                out
            }
            Monomial::Large(v) => v.to_vec(),
        }
    }

    pub fn max_var(&self) -> Option<usize> {
        match self {
            Monomial::Small(0) => None,
            Monomial::Small(m) => Some(63 - m.leading_zeros() as usize),
            Monomial::Large(v) => v.last().copied(),
        }
    }

    pub fn contains(&self, var: usize) -> bool {
        match self {
            Monomial::Small(m) => var < 64 && m & (1u64 << var) != 0,
            Monomial::Large(v) => v.binary_search(&var).is_ok(),
        }
    }

    pub fn is_subset_of(&self, other: &Monomial) -> bool {
        match (self, other) {
            (Monomial::Small(a), Monomial::Small(b)) => a & !b == 0,
            _ => self.vars().iter().all(|&v| other.contains(v)),
        }
    }

    /// Sign of `∏_{i∈S} x_i`, where bit `i` of `neg` is set iff `x_i = -1`.
    #[inline]
    pub(crate) fn sign_under(&self, neg: &[u64]) -> f64 {
        let odd = match self {
            Monomial::Small(m) => (m & neg.first().copied().unwrap_or(0)).count_ones() & 1 == 1,
            Monomial::Large(v) => {
                v.iter().filter(|&&i| neg[i / 64] >> (i % 64) & 1 == 1).count() & 1 == 1
            }
        };
        if odd {
            -1.0
        } else {
            1.0
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Monomial::Small(a), Monomial::Small(b)) => {
                // Lexicographic order on sorted index lists, done on the masks:
                // the lowest differing bit decides; a missing element means the
                // list ended (or moved on to a larger index).
                // Below the lowest differing bit the lists agree. The set holding
                // that bit is smaller unless the other set has nothing above it
                // (then the other list is a proper prefix).
                let diff = a ^ b;
                if diff == 0 {
                    return Ordering::Equal;
                }
                let low = diff & diff.wrapping_neg();
                let (other, holder_is_a) = if a & low != 0 { (b, true) } else { (a, false) };
                let holder_ord =
                    if other & !(low - 1) == 0 { Ordering::Greater } else { Ordering::Less };
                if holder_is_a {
                    holder_ord
                } else {
                    holder_ord.reverse()
                }
            }
            _ => self.vars().cmp(&other.vars()),
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A point of `{±1}^N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct Assignment {
    values: Vec<i8>,
}

impl Assignment {
    pub fn new(values: Vec<i8>) -> Result<Self> {
        if let Some(&bad) = values.iter().find(|&&v| v != 1 && v != -1) {
            return Err(Error::InvalidSpin(bad as i64));
        }
        Ok(Assignment { values })
    }

    pub fn all_plus(n: usize) -> Self {
        Assignment { values: vec![1; n] }
    }

    /// Bit `i` of the packed words set means `x_i = -1`.
    pub fn from_neg_words(n: usize, words: &[u64]) -> Self {
        let values = (0..n)
            .map(|i| if words[i / 64] >> (i % 64) & 1 == 1 { -1 } else { 1 })
            .collect();
        Assignment { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn get(&self, i: usize) -> i8 {
        self.values[i]
    }

    pub(crate) fn neg_words(&self) -> Vec<u64> {
        let mut words = vec![0u64; self.values.len().div_ceil(64).max(1)];
        for (i, &v) in self.values.iter().enumerate() {
            if v < 0 {
                words[i / 64] |= 1u64 << (i % 64);
            }
        }
        words
    }
}

impl TryFrom<Vec<i8>> for Assignment {
    type Error = Error;
    fn try_from(v: Vec<i8>) -> Result<Self> {
        Assignment::new(v)
    }
}

impl From<Assignment> for Vec<i8> {
    fn from(a: Assignment) -> Self {
        a.values
    }
}

/// Multilinear polynomial `f(x) = Σ_S f̂(S) x_S` over `N` variables.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BooleanPolynomial {
    n_vars: usize,
    coeffs: BTreeMap<Monomial, f64>,
}

impl BooleanPolynomial {
    /// Merges repeated monomials and prunes near-zero non-constant coefficients.
    pub fn new(n_vars: usize, terms: impl IntoIterator<Item = (Monomial, f64)>) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (mono, c) in terms {
            if let Some(v) = mono.max_var() {
                if v >= n_vars {
                    return Err(Error::VariableOutOfRange { var: v, n_vars });
                }
            }
            *coeffs.entry(mono).or_insert(0.0) += c;
        }
        Ok(Self::pruned(n_vars, coeffs))
    }

    pub fn constant(n_vars: usize, c: f64) -> Self {
        Self::pruned(n_vars, BTreeMap::from([(Monomial::empty(), c)]))
    }

    fn pruned(n_vars: usize, mut coeffs: BTreeMap<Monomial, f64>) -> Self {
        coeffs.retain(|m, c| m.is_empty() || c.abs() >= EPS_ZERO);
        if coeffs.get(&Monomial::empty()) == Some(&0.0) {
            coeffs.remove(&Monomial::empty());
        }
        BooleanPolynomial { n_vars, coeffs }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> + '_ {
        self.coeffs.iter().map(|(m, &c)| (m, c))
    }

    /// Stored monomials other than the constant.
    pub fn non_constant_terms(&self) -> impl Iterator<Item = (&Monomial, f64)> + '_ {
        self.terms().filter(|(m, _)| !m.is_empty())
    }

    pub fn num_non_constant(&self) -> usize {
        self.non_constant_terms().count()
    }

    pub fn coefficient(&self, m: &Monomial) -> f64 {
        self.coeffs.get(m).copied().unwrap_or(0.0)
    }

    /// `f̂(∅)`, the mean of `f` over the cube.
    pub fn constant_term(&self) -> f64 {
        self.coefficient(&Monomial::empty())
    }

    pub fn is_constant(&self) -> bool {
        self.num_non_constant() == 0
    }

    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(Monomial::len).max().unwrap_or(0)
    }

    /// Largest number of non-constant monomials sharing one variable.
    pub fn var_degree(&self) -> usize {
        let mut counts = vec![0usize; self.n_vars];
        for (m, _) in self.non_constant_terms() {
            for v in m.vars() {
                counts[v] += 1;
            }
        }
        counts.into_iter().max().unwrap_or(0)
    }

    pub fn evaluate(&self, x: &Assignment) -> Result<f64> {
        if x.len() != self.n_vars {
            return Err(Error::LengthMismatch { expected: self.n_vars, got: x.len() });
        }
        Ok(self.evaluate_neg_words(&x.neg_words()))
    }

    /// Evaluation on a packed point; bit `i` set means `x_i = -1`.
    pub(crate) fn evaluate_neg_words(&self, neg: &[u64]) -> f64 {
        self.coeffs.iter().map(|(m, &c)| c * m.sign_under(neg)).sum()
    }

    /// Substitutes fixed values for some variables. The result keeps the same
    /// variable count; assigned variables no longer occur in any monomial.
    pub fn restrict(&self, partial: &[(usize, i8)]) -> Result<BooleanPolynomial> {
        let mut neg = vec![0u64; self.n_vars.div_ceil(64).max(1)];
        let mut assigned = vec![false; self.n_vars];
        for &(var, val) in partial {
            if var >= self.n_vars {
                return Err(Error::VariableOutOfRange { var, n_vars: self.n_vars });
            }
            if val != 1 && val != -1 {
                return Err(Error::InvalidSpin(val as i64));
            }
            if std::mem::replace(&mut assigned[var], true) {
                return Err(Error::DoubleAssignment { var });
            }
            if val < 0 {
                neg[var / 64] |= 1u64 << (var % 64);
            }
        }
        let assigned_mask = Monomial::from_vars(partial.iter().map(|&(v, _)| v))?;

        let mut out: BTreeMap<Monomial, f64> = BTreeMap::new();
        for (m, &c) in &self.coeffs {
            let (fixed, free) = split(m, &assigned_mask, &assigned);
            let sign = fixed.sign_under(&neg);
            *out.entry(free).or_insert(0.0) += sign * c;
        }
        Ok(Self::pruned(self.n_vars, out))
    }

    /// `Var(f) = Σ_{S≠∅} f̂(S)²`.
    pub fn variance(&self) -> f64 {
        self.non_constant_terms().map(|(_, c)| c * c).sum()
    }

    /// `Inf_j(f) = Σ_{S∋j} f̂(S)²`.
    pub fn influence(&self, j: usize) -> f64 {
        self.non_constant_terms().filter(|(m, _)| m.contains(j)).map(|(_, c)| c * c).sum()
    }

    /// All influences at once, indexed by variable.
    pub fn influences(&self) -> Vec<f64> {
        let mut inf = vec![0.0; self.n_vars];
        for (m, c) in self.non_constant_terms() {
            for v in m.vars() {
                inf[v] += c * c;
            }
        }
        inf
    }

    /// Total Fourier weight `W(f) = Σ_{S≠∅} |f̂(S)|`.
    pub fn total_weight(&self) -> f64 {
        self.non_constant_terms().map(|(_, c)| c.abs()).sum()
    }

    /// Non-constant monomial of largest `|f̂(S)|`; ties go to the
    /// lexicographically smallest index list.
    pub fn max_abs_coeff(&self) -> Result<(&Monomial, f64)> {
        let mut best: Option<(&Monomial, f64)> = None;
        for (m, c) in self.non_constant_terms() {
            if best.map_or(true, |(_, b)| c.abs() > b.abs()) {
                best = Some((m, c));
            }
        }
        best.ok_or(Error::AlreadyConstant)
    }

    /// Negated copy.
    pub fn negated(&self) -> BooleanPolynomial {
        BooleanPolynomial {
            n_vars: self.n_vars,
            coeffs: self.coeffs.iter().map(|(m, &c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let dump = PolyJson {
            n_vars: self.n_vars,
            terms: self.terms().map(|(m, coef)| PolyTermJson { vars: m.vars(), coef }).collect(),
        };
        serde_json::to_string(&dump).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let dump: PolyJson = serde_json::from_str(text)
            .map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
        let terms = dump
            .terms
            .into_iter()
            .map(|t| Ok((Monomial::from_vars(t.vars)?, t.coef)))
            .collect::<Result<Vec<_>>>()?;
        BooleanPolynomial::new(dump.n_vars, terms)
    }
}

fn split(m: &Monomial, assigned_mask: &Monomial, assigned: &[bool]) -> (Monomial, Monomial) {
    match (m, assigned_mask) {
        (Monomial::Small(a), Monomial::Small(b)) => (Monomial::Small(a & b), Monomial::Small(a & !b)),
        _ => {
            let (fixed, free): (Vec<usize>, Vec<usize>) =
                m.vars().into_iter().partition(|&v| assigned[v]);
            (Monomial::from_sorted(fixed), Monomial::from_sorted(free))
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PolyTermJson {
    vars: Vec<usize>,
    coef: f64,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    n_vars: usize,
    terms: Vec<PolyTermJson>,
}
