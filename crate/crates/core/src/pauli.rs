//! Weighted Pauli sums: parsing, canonical form, norms and locality statistics.
//!
//! A [`Hamiltonian`] stores its non-identity Pauli strings in a `BTreeMap`, so
//! iteration (and therefore every downstream computation) is deterministic.
//! The identity component is kept apart as an offset.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients with magnitude below this are treated as zero.
pub const EPS_ZERO: f64 = 1e-12;

/// Non-identity single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn letter(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_letter(c: char) -> Option<Pauli> {
        match c {
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Tensor product of single-qubit Paulis, stored sparsely and sorted by qubit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PauliString {
    ops: Vec<(usize, Pauli)>,
}

impl PauliString {
    /// Builds a string from `(qubit, letter)` pairs in any order.
    pub fn new(ops: impl IntoIterator<Item = (usize, Pauli)>) -> Result<Self> {
        let mut ops: Vec<_> = ops.into_iter().collect();
        ops.sort_by_key(|&(q, _)| q);
        if let Some(w) = ops.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::RepeatedQubit { qubit: w[0].0 });
        }
        Ok(PauliString { ops })
    }

    pub fn identity() -> Self {
        PauliString::default()
    }

    pub fn single(qubit: usize, p: Pauli) -> Self {
        PauliString { ops: vec![(qubit, p)] }
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        self.ops.len()
    }

    pub fn is_identity(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> &[(usize, Pauli)] {
        &self.ops
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.ops.last().map(|&(q, _)| q)
    }

    pub fn get(&self, qubit: usize) -> Option<Pauli> {
        self.ops
            .binary_search_by_key(&qubit, |&(q, _)| q)
            .ok()
            .map(|i| self.ops[i].1)
    }

    /// True when every factor is `Z`.
    pub fn is_diagonal(&self) -> bool {
        self.ops.iter().all(|&(_, p)| p == Pauli::Z)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ops.is_empty() {
            return write!(f, "I");
        }
        for (i, (q, p)) in self.ops.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}{}", p.letter(), q)?;
        }
        Ok(())
    }
}

/// Summary counts and norms of a Hamiltonian. Norms exclude the identity offset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianStats {
    pub n: usize,
    /// Number of non-identity terms.
    pub m: usize,
    /// Locality: largest Pauli weight.
    pub k: usize,
    /// Largest number of terms acting nontrivially on one qubit.
    pub l_q: usize,
    pub l1: f64,
    pub l2sq: f64,
}

/// Weighted sum of Pauli strings on `n` qubits plus an identity offset.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Hamiltonian {
    n: usize,
    offset: f64,
    terms: BTreeMap<PauliString, f64>,
}

impl Hamiltonian {
    /// Canonicalizes a list of terms: identical strings are merged, identity
    /// strings go to the offset, near-zero coefficients are dropped.
    pub fn from_terms(
        n: usize,
        offset: f64,
        terms: impl IntoIterator<Item = (PauliString, f64)>,
    ) -> Result<Self> {
        let mut map: BTreeMap<PauliString, f64> = BTreeMap::new();
        let mut offset = offset;
        for (s, c) in terms {
            if let Some(q) = s.max_qubit() {
                if q >= n {
                    return Err(Error::QubitOutOfRange { index: q, n });
                }
            }
            if s.is_identity() {
                offset += c;
            } else {
                *map.entry(s).or_insert(0.0) += c;
            }
        }
        map.retain(|_, c| c.abs() >= EPS_ZERO);
        if offset.abs() < EPS_ZERO {
            offset = 0.0;
        }
        Ok(Hamiltonian { n, offset, terms: map })
    }

    pub fn empty(n: usize) -> Self {
        Hamiltonian { n, offset: 0.0, terms: BTreeMap::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn is_traceless(&self) -> bool {
        self.offset == 0.0
    }

    pub fn terms(&self) -> impl ExactSizeIterator<Item = (&PauliString, f64)> + '_ {
        self.terms.iter().map(|(s, &c)| (s, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, s: &PauliString) -> f64 {
        if s.is_identity() {
            self.offset
        } else {
            self.terms.get(s).copied().unwrap_or(0.0)
        }
    }

    /// Same terms with the identity offset removed.
    pub fn traceless_part(&self) -> Hamiltonian {
        Hamiltonian { n: self.n, offset: 0.0, terms: self.terms.clone() }
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.keys().all(PauliString::is_diagonal)
    }

    /// Multiplies every coefficient (offset included) by `factor`.
    pub fn scale(&self, factor: f64) -> Hamiltonian {
        Hamiltonian::from_terms(
            self.n,
            self.offset * factor,
            self.terms.iter().map(|(s, &c)| (s.clone(), c * factor)),
        )
        .expect("scaling preserves qubit range")
    }

    pub fn negate(&self) -> Hamiltonian {
        self.scale(-1.0)
    }

    pub fn stats(&self) -> HamiltonianStats {
        let mut per_qubit = vec![0usize; self.n];
        let mut k = 0;
        let mut l1 = 0.0;
        let mut l2sq = 0.0;
        for (s, &c) in &self.terms {
            k = k.max(s.weight());
            l1 += c.abs();
            l2sq += c * c;
            for &(q, _) in s.ops() {
                per_qubit[q] += 1;
            }
        }
        HamiltonianStats {
            n: self.n,
            m: self.terms.len(),
            k,
            l_q: per_qubit.iter().copied().max().unwrap_or(0),
            l1,
            l2sq,
        }
    }

    /// Renders the line-oriented text format accepted by [`FromStr`].
    pub fn to_text(&self) -> String {
        let mut out = format!("qubits {}\n", self.n);
        if self.offset != 0.0 {
            out.push_str(&format!("{} I\n", self.offset));
        }
        for (s, c) in &self.terms {
            out.push_str(&format!("{} {}\n", c, s));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&HamiltonianJson::from(self)).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: HamiltonianJson = serde_json::from_str(text)
            .map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
        raw.try_into()
    }
}

/// Parses the text format:
///
/// ```text
/// # comment
/// qubits 4
/// 1.0 Z0 Z1
/// -0.5 X2
/// 0.25 I
/// ```
impl FromStr for Hamiltonian {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut declared_n: Option<usize> = None;
        let mut offset = 0.0;
        let mut terms = Vec::new();
        let mut saw_term = false;
        let mut max_q: Option<usize> = None;

        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse { line, msg };
            let mut tokens = body.split_whitespace();
            let head = tokens.next().expect("non-empty line has a token");

            if head == "qubits" {
                if declared_n.is_some() || saw_term {
                    return Err(perr("`qubits` header must appear once, before any term".into()));
                }
                let v = tokens.next().ok_or_else(|| perr("`qubits` needs a count".into()))?;
                let n = v.parse::<usize>().map_err(|_| perr(format!("bad qubit count `{v}`")))?;
                if tokens.next().is_some() {
                    return Err(perr("trailing tokens after qubit count".into()));
                }
                declared_n = Some(n);
                continue;
            }

            let coef: f64 = head
                .parse()
                .map_err(|_| perr(format!("non-numeric coefficient `{head}`")))?;
            if !coef.is_finite() {
                return Err(perr(format!("coefficient `{head}` is not finite")));
            }
            saw_term = true;

            let ops: Vec<&str> = tokens.collect();
            if ops.is_empty() {
                return Err(perr("term has no operators (use `I` for the identity)".into()));
            }
            if ops == ["I"] {
                offset += coef;
                continue;
            }
            let mut parsed = Vec::with_capacity(ops.len());
            for tok in ops {
                let mut chars = tok.chars();
                let letter = chars.next().expect("token is non-empty");
                let p = Pauli::from_letter(letter)
                    .ok_or_else(|| perr(format!("unknown Pauli letter in `{tok}`")))?;
                let idx = chars.as_str();
                let q = idx
                    .parse::<usize>()
                    .map_err(|_| perr(format!("bad qubit index in `{tok}`")))?;
                if let Some(n) = declared_n {
                    if q >= n {
                        return Err(perr(format!("qubit {q} out of range for {n} qubits")));
                    }
                }
                max_q = Some(max_q.map_or(q, |m| m.max(q)));
                parsed.push((q, p));
            }
            let s = PauliString::new(parsed).map_err(|e| perr(e.to_string()))?;
            terms.push((s, coef));
        }

        if !saw_term {
            return Err(Error::Parse { line: 0, msg: "empty term list".into() });
        }
        let n = declared_n.unwrap_or_else(|| max_q.map_or(0, |q| q + 1));
        Hamiltonian::from_terms(n, offset, terms)
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    coef: f64,
    paulis: Vec<(Pauli, usize)>,
}

#[derive(Serialize, Deserialize)]
struct HamiltonianJson {
    n: usize,
    offset: f64,
    terms: Vec<TermJson>,
}

impl From<&Hamiltonian> for HamiltonianJson {
    fn from(h: &Hamiltonian) -> Self {
        HamiltonianJson {
            n: h.n,
            offset: h.offset,
            terms: h
                .terms
                .iter()
                .map(|(s, &coef)| TermJson {
                    coef,
                    paulis: s.ops().iter().map(|&(q, p)| (p, q)).collect(),
                })
                .collect(),
        }
    }
}

impl TryFrom<HamiltonianJson> for Hamiltonian {
    type Error = Error;

    fn try_from(raw: HamiltonianJson) -> Result<Self> {
        let terms = raw
            .terms
            .into_iter()
            .map(|t| Ok((PauliString::new(t.paulis.into_iter().map(|(p, q)| (q, p)))?, t.coef)))
            .collect::<Result<Vec<_>>>()?;
        Hamiltonian::from_terms(raw.n, raw.offset, terms)
    }
}
