//! Ground truth used by tests and the benchmark harness: exact TSP by
//! Held-Karp, Pearson chi-square goodness of fit, dense-matrix circuit
//! simulation, and a direct evaluation of the transition rule.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::aco::{Hyperparameters, PheromoneState, MIN_COST};
use crate::error::{invalid, Error, Result};
use crate::graph_io::ProblemInstance;
use crate::statevec::{bit_of, Circuit, GateOp, StateVector};

/// Largest instance [`held_karp`] accepts.
pub const HELD_KARP_LIMIT: usize = 20;

/// Largest register [`matrix_simulate`] accepts.
pub const MATRIX_QUBIT_LIMIT: usize = 4;

pub const CHI_SQUARE_CONFIDENCE: f64 = 0.99;

#[derive(Debug, Clone, PartialEq)]
pub struct ExactResult {
    pub optimal_cost: f64,
    /// Closed: starts and ends at node 0.
    pub optimal_cycle: Vec<usize>,
    pub explored_states: usize,
}

/// Exact minimum Hamiltonian cycle by dynamic programming over subsets.
///
/// `best[S][j]` is the cheapest path leaving node 0, visiting exactly the
/// nodes of `S ⊆ {1..n-1}` and ending at `j ∈ S`. Missing edges are never
/// used, so sparse instances work too.
pub fn held_karp(instance: &ProblemInstance) -> Result<ExactResult> {
    let n = instance.dimension();
    if n > HELD_KARP_LIMIT {
        return Err(Error::SizeLimit { nodes: n, limit: HELD_KARP_LIMIT });
    }
    if n == 1 {
        return Ok(ExactResult { optimal_cost: 0.0, optimal_cycle: vec![0, 0], explored_states: 1 });
    }
    let m = n - 1;
    let subsets = 1usize << m;
    let cost = |a: usize, b: usize| instance.cost(a, b).unwrap_or(f64::INFINITY);
    let mut best = vec![f64::INFINITY; subsets * m];
    let mut parent = vec![u8::MAX; subsets * m];
    for j in 0..m {
        best[(1 << j) * m + j] = cost(0, j + 1);
    }
    let mut explored = 0;
    for set in 1..subsets {
        for last in 0..m {
            let here = best[set * m + last];
            if set & (1 << last) == 0 || !here.is_finite() {
                continue;
            }
            explored += 1;
            for next in 0..m {
                if set & (1 << next) != 0 {
                    continue;
                }
                let step = here + cost(last + 1, next + 1);
                let slot = (set | 1 << next) * m + next;
                if step < best[slot] {
                    best[slot] = step;
                    parent[slot] = last as u8;
                }
            }
        }
    }
    let full = subsets - 1;
    let (end, total) = (0..m)
        .map(|j| (j, best[full * m + j] + cost(j + 1, 0)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one non-start node");
    if !total.is_finite() {
        return Err(invalid("instance has no Hamiltonian cycle"));
    }
    let mut cycle = vec![0];
    let (mut set, mut last) = (full, end);
    loop {
        cycle.push(last + 1);
        let prev = parent[set * m + last];
        set &= !(1 << last);
        if prev == u8::MAX {
            break;
        }
        last = prev as usize;
    }
    cycle.push(0);
    cycle.reverse();
    Ok(ExactResult { optimal_cost: total, optimal_cycle: cycle, explored_states: explored })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareOutcome {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub critical_value: f64,
    pub pass: bool,
}

/// Pearson goodness of fit of `observed` counts to `expected` probabilities at
/// 99% confidence. Categories with zero expected probability must be empty and
/// do not count toward the degrees of freedom.
pub fn chi_square_uniformity(observed: &[u64], expected: &[f64]) -> Result<ChiSquareOutcome> {
    if observed.len() != expected.len() {
        return Err(invalid(format!(
            "{} observed categories but {} expected probabilities",
            observed.len(),
            expected.len()
        )));
    }
    if expected.iter().any(|&p| !(p >= 0.0)) {
        return Err(invalid("expected probabilities must be non-negative"));
    }
    let sum: f64 = expected.iter().sum();
    if (sum - 1.0).abs() > 1e-6 {
        return Err(invalid(format!("expected probabilities sum to {sum}")));
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(invalid("no observations"));
    }
    let total = total as f64;
    let mut statistic = 0.0;
    let mut categories = 0usize;
    for (&o, &p) in observed.iter().zip(expected) {
        if p == 0.0 {
            if o > 0 {
                statistic = f64::INFINITY;
            }
            continue;
        }
        categories += 1;
        let e = total * p;
        statistic += (o as f64 - e).powi(2) / e;
    }
    let dof = categories.saturating_sub(1);
    if dof == 0 {
        let pass = statistic.is_finite();
        return Ok(ChiSquareOutcome { statistic, degrees_of_freedom: 0, critical_value: 0.0, pass });
    }
    let critical = chi_square_quantile(dof, CHI_SQUARE_CONFIDENCE);
    Ok(ChiSquareOutcome { statistic, degrees_of_freedom: dof, critical_value: critical, pass: statistic <= critical })
}

// statrs only resolves the quantile to a few digits, so polish it by bisecting the cdf.
fn chi_square_quantile(dof: usize, p: f64) -> f64 {
    let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    let guess = dist.inverse_cdf(p);
    let (mut lo, mut hi) = (guess * 0.9, guess * 1.1);
    while dist.cdf(lo) > p {
        lo *= 0.5;
    }
    while dist.cdf(hi) < p {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if dist.cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

type Matrix = Vec<Vec<f64>>;

fn identity(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![0.0; ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

fn add(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect()).collect()
}

/// Dense `2^q × 2^q` unitary of one gate, assembled from Kronecker products
/// with qubit 0 as the leftmost factor. A controlled `U` is
/// `I + P₁ ⊗ … ⊗ (U − I) ⊗ …` with `P₁ = |1⟩⟨1|` on every control.
pub fn gate_matrix(gate: &GateOp, q: usize) -> Matrix {
    let single = match gate {
        GateOp::Ry { theta, .. } | GateOp::Cry { theta, .. } => {
            let (s, c) = (theta / 2.0).sin_cos();
            vec![vec![c, -s], vec![s, c]]
        }
        GateOp::Cnot { .. } => vec![vec![0.0, 1.0], vec![1.0, 0.0]],
    };
    let target = gate.target();
    let controls = gate.controls();
    let eye2 = identity(2);
    let projector = vec![vec![0.0, 0.0], vec![0.0, 1.0]];
    let factor = |k: usize, controlled: bool| -> Matrix {
        if k == target {
            if controlled {
                add(&single, &vec![vec![-1.0, 0.0], vec![0.0, -1.0]])
            } else {
                single.clone()
            }
        } else if controls.contains(&k) {
            projector.clone()
        } else {
            eye2.clone()
        }
    };
    let controlled = !controls.is_empty();
    let mut m = factor(0, controlled);
    for k in 1..q {
        m = kron(&m, &factor(k, controlled));
    }
    if controlled {
        add(&identity(1 << q), &m)
    } else {
        m
    }
}

/// Simulates `circuit` by multiplying dense gate matrices. Limited to four
/// qubits.
pub fn matrix_simulate(circuit: &Circuit) -> Result<StateVector> {
    let q = circuit.qubit_count();
    if q > MATRIX_QUBIT_LIMIT {
        return Err(Error::SizeLimit { nodes: q, limit: MATRIX_QUBIT_LIMIT });
    }
    let mut unitary = identity(1 << q);
    for gate in circuit.gates() {
        unitary = matmul(&gate_matrix(gate, q), &unitary);
    }
    let amplitudes = unitary.iter().map(|row| row[0]).collect();
    StateVector::from_amplitudes(q, amplitudes)
}

/// The transition rule evaluated term by term, summing the denominator in
/// reverse order. Returns `(node, probability)` pairs in neighbor order.
pub fn direct_transition(
    instance: &ProblemInstance,
    pheromone: &PheromoneState,
    params: &Hyperparameters,
    current: usize,
    visited: &[bool],
) -> Vec<(usize, f64)> {
    let score = |b: usize| {
        let w = 1.0 / instance.cost(current, b).unwrap().max(MIN_COST);
        (params.alpha * w.ln() + params.beta * pheromone.get(current, b).ln()).exp()
    };
    let open: Vec<usize> = (0..instance.dimension())
        .filter(|&b| b != current && instance.has_edge(current, b) && !visited[b])
        .collect();
    let mut denominator = 0.0;
    for &b in open.iter().rev() {
        denominator += score(b);
    }
    open.into_iter().map(|b| (b, score(b) / denominator)).collect()
}

/// Basis-state index with the given qubit values (qubit 0 first).
pub fn basis_index(bits: &[bool]) -> usize {
    let q = bits.len();
    bits.iter().enumerate().filter(|(_, &b)| b).fold(0, |acc, (k, _)| acc | bit_of(q, k))
}
