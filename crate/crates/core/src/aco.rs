//! Classical ant colony rules: the transition distribution over unvisited
//! neighbors, pheromone evaporation and deposit, and tour bookkeeping.

use crate::error::{invalid, Result};
use crate::graph_io::ProblemInstance;

/// Floor applied to edge costs before inversion.
pub const MIN_COST: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparameters {
    /// Exponent on the edge weight `1/cost`.
    pub alpha: f64,
    /// Exponent on the pheromone.
    pub beta: f64,
    /// Evaporation rate applied after every tour.
    pub rho: f64,
    pub initial_pheromone: f64,
    pub ants: usize,
    /// Measurements per quantum selection.
    pub shots: usize,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Self { alpha: 0.4, beta: 0.6, rho: 0.01, initial_pheromone: 0.5, ants: 1000, shots: 10 }
    }
}

impl Hyperparameters {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) || !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(invalid("alpha and beta must be finite and non-negative"));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(invalid(format!("rho must lie in [0, 1), got {}", self.rho)));
        }
        if !(self.initial_pheromone > 0.0 && self.initial_pheromone.is_finite()) {
            return Err(invalid("initial pheromone must be positive"));
        }
        if self.ants < 1 || self.shots < 1 {
            return Err(invalid("ants and shots must be at least 1"));
        }
        Ok(())
    }
}

/// Per-edge pheromone, stored symmetrically.
#[derive(Debug, Clone, PartialEq)]
pub struct PheromoneState {
    dimension: usize,
    eta: Vec<f64>,
}

impl PheromoneState {
    pub fn uniform(dimension: usize, value: f64) -> Self {
        Self { dimension, eta: vec![value; dimension * dimension] }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.eta[i * self.dimension + j]
    }

    fn add(&mut self, i: usize, j: usize, amount: f64) {
        self.eta[i * self.dimension + j] += amount;
        self.eta[j * self.dimension + i] += amount;
    }

    /// `η ← (1 − ρ)·η` on every edge.
    pub fn evaporate(&mut self, rho: f64) {
        let keep = 1.0 - rho;
        self.eta.iter_mut().for_each(|e| *e *= keep);
    }

    /// Adds `1/total_cost` to every edge of `cycle`, including the closing edge.
    pub fn deposit(&mut self, cycle: &[usize], total_cost: f64) -> Result<()> {
        if !(total_cost > 0.0) {
            return Err(invalid(format!("deposit needs a positive tour cost, got {total_cost}")));
        }
        if cycle.iter().any(|&n| n >= self.dimension) {
            return Err(invalid("cycle references a node outside the instance"));
        }
        let amount = 1.0 / total_cost;
        for (&a, &b) in closed_edges(cycle) {
            self.add(a, b, amount);
        }
        Ok(())
    }

    /// Adds `1/total_cost` along consecutive pairs of `path` only.
    pub fn deposit_path(&mut self, path: &[usize], total_cost: f64) -> Result<()> {
        if !(total_cost > 0.0) {
            return Err(invalid(format!("deposit needs a positive tour cost, got {total_cost}")));
        }
        if path.iter().any(|&n| n >= self.dimension) {
            return Err(invalid("path references a node outside the instance"));
        }
        let amount = 1.0 / total_cost;
        for pair in path.windows(2) {
            self.add(pair[0], pair[1], amount);
        }
        Ok(())
    }

    pub fn values(&self) -> &[f64] {
        &self.eta
    }
}

/// Consecutive pairs of `cycle`, plus last → first when the list is not
/// already closed.
fn closed_edges(cycle: &[usize]) -> impl Iterator<Item = (&usize, &usize)> {
    let open = cycle.len() > 1 && cycle.first() != cycle.last();
    let closing = open.then(|| (cycle.last().unwrap(), cycle.first().unwrap()));
    cycle.iter().zip(cycle.iter().skip(1)).chain(closing)
}

pub fn evaporate(mut pheromone: PheromoneState, rho: f64) -> PheromoneState {
    pheromone.evaporate(rho);
    pheromone
}

pub fn deposit(mut pheromone: PheromoneState, cycle: &[usize], total_cost: f64) -> Result<PheromoneState> {
    pheromone.deposit(cycle, total_cost)?;
    Ok(pheromone)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionDistribution {
    pub candidates: Vec<usize>,
    pub probabilities: Vec<f64>,
}

impl TransitionDistribution {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }
}

/// `P(a → b) ∝ (1/cost(a,b))^α · η(a,b)^β` over the unvisited neighbors of
/// `current`. Returns `None` when the ant is stuck.
pub fn transition_distribution(
    instance: &ProblemInstance,
    pheromone: &PheromoneState,
    params: &Hyperparameters,
    current: usize,
    visited: &[bool],
) -> Option<TransitionDistribution> {
    let candidates: Vec<usize> =
        instance.neighbors(current).iter().copied().filter(|&b| !visited[b]).collect();
    if candidates.is_empty() {
        return None;
    }
    let factors: Vec<(f64, f64)> = candidates
        .iter()
        .map(|&b| {
            let cost = instance.cost(current, b).expect("neighbor has an edge");
            (1.0 / cost.max(MIN_COST), pheromone.get(current, b))
        })
        .collect();
    let direct: Vec<f64> =
        factors.iter().map(|&(w, eta)| w.powf(params.alpha) * eta.powf(params.beta)).collect();
    let in_range = direct.iter().all(|&s| (1e-300..=1e300).contains(&s));
    let probabilities = if in_range {
        let total: f64 = direct.iter().sum();
        direct.iter().map(|s| s / total).collect()
    } else {
        // softmax of the log scores
        let logs: Vec<f64> =
            factors.iter().map(|&(w, eta)| params.alpha * w.ln() + params.beta * eta.ln()).collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
        let total: f64 = exps.iter().sum();
        exps.iter().map(|e| e / total).collect()
    };
    Some(TransitionDistribution { candidates, probabilities })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TourStatus {
    InProgress,
    Success,
    Stuck,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TourState {
    pub path: Vec<usize>,
    pub visited: Vec<bool>,
    pub accumulated_cost: f64,
    pub status: TourStatus,
}

impl TourState {
    pub fn start(dimension: usize, node: usize) -> Self {
        let mut visited = vec![false; dimension];
        visited[node] = true;
        Self { path: vec![node], visited, accumulated_cost: 0.0, status: TourStatus::InProgress }
    }

    pub fn current(&self) -> usize {
        *self.path.last().expect("tour has a start node")
    }

    pub fn advance(&mut self, instance: &ProblemInstance, next: usize) {
        let cost = instance.cost(self.current(), next).expect("ant moved along an existing edge");
        debug_assert!(!self.visited[next]);
        self.visited[next] = true;
        self.path.push(next);
        self.accumulated_cost += cost;
    }

    pub fn is_complete(&self) -> bool {
        self.path.len() == self.visited.len()
    }
}

/// Cost of a cycle given as a node list; a repeated first node at the end is
/// accepted, otherwise the closing edge is added.
pub fn tour_cost(instance: &ProblemInstance, cycle: &[usize]) -> Result<f64> {
    if cycle.iter().any(|&n| n >= instance.dimension()) {
        return Err(invalid("cycle references a node outside the instance"));
    }
    let mut total = 0.0;
    for (&a, &b) in closed_edges(cycle) {
        total += instance
            .cost(a, b)
            .ok_or_else(|| invalid(format!("nodes {a} and {b} are not adjacent")))?;
    }
    Ok(total)
}

/// True when `cycle` visits every node exactly once and all its edges,
/// including the closing one, exist.
pub fn is_hamiltonian_cycle(instance: &ProblemInstance, cycle: &[usize]) -> bool {
    let n = instance.dimension();
    let body = if cycle.len() > 1 && cycle.first() == cycle.last() { &cycle[..cycle.len() - 1] } else { cycle };
    if body.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &node in body {
        if node >= n || std::mem::replace(&mut seen[node], true) {
            return false;
        }
    }
    n == 1 || tour_cost(instance, body).is_ok()
}
