//! Named Hamiltonian families.
//!
//! All randomness comes from `ChaCha8Rng` (rand_chacha 0.3) seeded with
//! `seed_from_u64`. For the signed regular family the stream is consumed by
//! the graph construction first and by the edge signs second, one `next_u32`
//! per edge in sorted edge order (low bit 0 means `+1`).

use std::collections::{BTreeSet, HashSet};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Hamiltonian, Pauli, PauliString};

const REGULAR_RESTARTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LatticeKind {
    /// Ring of `rows` sites (`cols` must be 1).
    Cycle,
    /// Square lattice, degree 4 when periodic.
    Grid2d,
    /// Triangular lattice on a sheared square grid, degree 6 when periodic.
    Triangular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub kind: LatticeKind,
    pub rows: usize,
    pub cols: usize,
    pub periodic: bool,
}

impl LatticeSpec {
    pub fn cycle(n: usize) -> Self {
        LatticeSpec { kind: LatticeKind::Cycle, rows: n, cols: 1, periodic: true }
    }

    pub fn grid(rows: usize, cols: usize, periodic: bool) -> Self {
        LatticeSpec { kind: LatticeKind::Grid2d, rows, cols, periodic }
    }

    pub fn triangular(rows: usize, cols: usize, periodic: bool) -> Self {
        LatticeSpec { kind: LatticeKind::Triangular, rows, cols, periodic }
    }

    pub fn num_sites(&self) -> usize {
        self.rows * self.cols
    }

    /// Degree every site has when the lattice is periodic.
    pub fn regular_degree(&self) -> usize {
        match self.kind {
            LatticeKind::Cycle => 2,
            LatticeKind::Grid2d => 4,
            LatticeKind::Triangular => 6,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidInstance(msg.to_string()));
        match self.kind {
            LatticeKind::Cycle if self.cols != 1 => bad("a cycle has one column"),
            LatticeKind::Cycle if self.rows < 2 => bad("a cycle needs at least 2 sites"),
            LatticeKind::Cycle if self.periodic && self.rows < 3 => {
                bad("a periodic cycle needs at least 3 sites")
            }
            LatticeKind::Grid2d | LatticeKind::Triangular if self.rows == 0 || self.cols == 0 => {
                bad("lattice dimensions must be positive")
            }
            LatticeKind::Grid2d | LatticeKind::Triangular
                if self.periodic && (self.rows < 3 || self.cols < 3) =>
            {
                bad("periodic lattices need both dimensions at least 3")
            }
            _ => Ok(()),
        }
    }

    /// Sorted, de-duplicated edge list `(i, j)` with `i < j`.
    pub fn edges(&self) -> Result<Vec<(usize, usize)>> {
        self.validate()?;
        let (rows, cols) = (self.rows, self.cols);
        let id = |r: usize, c: usize| r * cols + c;
        let mut edges = BTreeSet::new();
        let mut link = |a: usize, b: usize| {
            if a != b {
                edges.insert((a.min(b), a.max(b)));
            }
        };
        let step = |v: usize, len: usize| -> Option<usize> {
            if v + 1 < len {
                Some(v + 1)
            } else if self.periodic {
                Some(0)
            } else {
                None
            }
        };
        match self.kind {
            LatticeKind::Cycle => {
                for r in 0..rows {
                    if let Some(r2) = step(r, rows) {
                        link(r, r2);
                    }
                }
            }
            LatticeKind::Grid2d | LatticeKind::Triangular => {
                for r in 0..rows {
                    for c in 0..cols {
                        let (down, right) = (step(r, rows), step(c, cols));
                        if let Some(c2) = right {
                            link(id(r, c), id(r, c2));
                        }
                        if let Some(r2) = down {
                            link(id(r, c), id(r2, c));
                        }
                        if self.kind == LatticeKind::Triangular {
                            if let (Some(r2), Some(c2)) = (down, right) {
                                link(id(r, c), id(r2, c2));
                            }
                        }
                    }
                }
            }
        }
        Ok(edges.into_iter().collect())
    }
}

fn two_body(i: usize, j: usize, p: Pauli) -> PauliString {
    PauliString::new([(i, p), (j, p)]).expect("edge endpoints differ")
}

/// `Σ_{⟨i,j⟩} X_iX_j + Y_iY_j + Z_iZ_j` with unit couplings.
pub fn heisenberg_afm(spec: &LatticeSpec) -> Result<Hamiltonian> {
    let edges = spec.edges()?;
    Hamiltonian::from_terms(
        spec.num_sites(),
        0.0,
        edges
            .iter()
            .flat_map(|&(i, j)| [Pauli::X, Pauli::Y, Pauli::Z].map(|p| (two_body(i, j, p), 1.0))),
    )
}

/// Heisenberg model on an explicit edge list.
pub fn heisenberg_on_edges(n: usize, edges: &[(usize, usize)]) -> Result<Hamiltonian> {
    Hamiltonian::from_terms(
        n,
        0.0,
        edges
            .iter()
            .flat_map(|&(i, j)| [Pauli::X, Pauli::Y, Pauli::Z].map(|p| (two_body(i, j, p), 1.0))),
    )
}

/// `Σ_{i<j} Z_iZ_j`.
pub fn complete_zz(n: usize) -> Result<Hamiltonian> {
    if n < 2 {
        return Err(Error::InvalidInstance("complete_zz needs n >= 2".into()));
    }
    let terms = (0..n).flat_map(|i| (i + 1..n).map(move |j| (two_body(i, j, Pauli::Z), 1.0)));
    Hamiltonian::from_terms(n, 0.0, terms)
}

/// Random `r`-regular simple graph on `n` vertices.
///
/// Stubs are paired one at a time: a uniformly random pair of free stubs is
/// accepted unless it would form a self-loop or repeat an edge. When no valid
/// pair turns up the whole pairing restarts, up to a fixed budget.
pub fn random_regular_graph(n: usize, r: usize, rng: &mut ChaCha8Rng) -> Result<Vec<(usize, usize)>> {
    if r >= n || (n * r) % 2 != 0 {
        return Err(Error::InvalidInstance(format!("no simple {r}-regular graph on {n} vertices")));
    }
    'restart: for _ in 0..REGULAR_RESTARTS {
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(r)).collect();
        let mut edges: HashSet<(usize, usize)> = HashSet::with_capacity(n * r / 2);
        let mut order = Vec::with_capacity(n * r / 2);
        while !stubs.is_empty() {
            let len = stubs.len();
            let mut placed = false;
            for _ in 0..(4 * len) {
                let a = rng.gen_range(0..len);
                let b = rng.gen_range(0..len);
                let (u, v) = (stubs[a], stubs[b]);
                let e = (u.min(v), u.max(v));
                if a == b || u == v || edges.contains(&e) {
                    continue;
                }
                edges.insert(e);
                order.push(e);
                let (hi, lo) = (a.max(b), a.min(b));
                stubs.swap_remove(hi);
                stubs.swap_remove(lo);
                placed = true;
                break;
            }
            if !placed {
                continue 'restart;
            }
        }
        order.sort_unstable();
        return Ok(order);
    }
    Err(Error::RetriesExhausted(REGULAR_RESTARTS))
}

/// `Σ_{(i,j)∈E} J_ij Z_iZ_j` on a random `r`-regular graph, `J_ij = ±1`.
pub fn random_signed_regular_zz(n: usize, r: usize, seed: u64) -> Result<Hamiltonian> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = random_regular_graph(n, r, &mut rng)?;
    let terms: Vec<_> = edges
        .iter()
        .map(|&(i, j)| {
            let sign = if rng.next_u32() & 1 == 0 { 1.0 } else { -1.0 };
            (two_body(i, j, Pauli::Z), sign)
        })
        .collect();
    Hamiltonian::from_terms(n, 0.0, terms)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoefDist {
    /// `±1` with equal probability.
    Sign,
    /// Uniform on `[−1, 1]`.
    Uniform,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `m` distinct Pauli strings of weight `1..=k`, drawn uniformly from all such
/// strings, with random coefficients.
pub fn random_klocal(n: usize, m: usize, k: usize, seed: u64, dist: CoefDist) -> Result<Hamiltonian> {
    if k == 0 || k > n {
        return Err(Error::InvalidInstance(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    let counts: Vec<f64> = (1..=k).map(|w| binomial(n, w) * 3f64.powi(w as i32)).collect();
    let available: f64 = counts.iter().sum();
    if m as f64 > available {
        return Err(Error::InvalidInstance(format!(
            "only {available} Pauli strings of weight <= {k} on {n} qubits, asked for {m}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let letters = [Pauli::X, Pauli::Y, Pauli::Z];
    let mut chosen: BTreeSet<PauliString> = BTreeSet::new();
    let mut order = Vec::with_capacity(m);
    while order.len() < m {
        // weight with probability proportional to the number of strings of that weight
        let mut u = rng.gen_range(0.0..available);
        let mut w = k;
        for (i, &c) in counts.iter().enumerate() {
            if u < c {
                w = i + 1;
                break;
            }
            u -= c;
        }
        let qubits = rand::seq::index::sample(&mut rng, n, w);
        let s = PauliString::new(qubits.iter().map(|q| (q, letters[rng.gen_range(0..3)])))
            .expect("sampled qubits are distinct");
        if chosen.insert(s.clone()) {
            order.push(s);
        }
    }
    let terms: Vec<_> = order
        .into_iter()
        .map(|s| {
            let c = match dist {
                CoefDist::Sign => {
                    if rng.gen::<bool>() {
                        1.0
                    } else {
                        -1.0
                    }
                }
                CoefDist::Uniform => loop {
                    let c: f64 = rng.gen_range(-1.0..=1.0);
                    if c.abs() >= 1e-6 {
                        break c;
                    }
                },
            };
            (s, c)
        })
        .collect();
    Hamiltonian::from_terms(n, 0.0, terms)
}
