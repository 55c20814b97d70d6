//! Colony orchestration: qubit sizing, start-node and next-hop selection,
//! success adjudication, pheromone updates and best-tour tracking.
//!
//! In sequential mode ants run one after another and each sees the pheromone
//! left by all earlier ants. With `parallel_workers > 1` ants run in batches of
//! that size against a frozen snapshot; after the batch their updates
//! (one evaporation per ant, then its deposit) are committed in worker order.
//!
//! Random streams: worker `w` draws from ChaCha8 keyed by the run seed on
//! stream `w`. Sequential mode is worker 0, so a one-worker parallel run
//! reproduces it exactly.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::aco::{
    is_hamiltonian_cycle, transition_distribution, Hyperparameters, PheromoneState, TourState, TourStatus,
};
use crate::error::{invalid, Result};
use crate::graph_io::ProblemInstance;
use crate::selector::{qubits_for, SelectorCircuit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SamplerKind {
    #[default]
    Quantum,
    /// One uniform draw scanned against cumulative probabilities.
    Classical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub params: Hyperparameters,
    pub sampler: SamplerKind,
    pub seed: u64,
    pub parallel_workers: usize,
    /// Require the last node to connect back to the start.
    pub require_cycle: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            params: Hyperparameters::default(),
            sampler: SamplerKind::Quantum,
            seed: 0,
            parallel_workers: 1,
            require_cycle: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.parallel_workers < 1 {
            return Err(invalid("parallel_workers must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Solved,
    NoSolution,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub status: RunStatus,
    /// Best tour, closed (first node repeated at the end) when cycles are
    /// required. Empty without a successful ant.
    pub best_cycle: Vec<usize>,
    pub best_cost: Option<f64>,
    /// Full-precision error against the instance reference, if it has one.
    pub error_percent: Option<f64>,
    pub successful_ants: usize,
    pub failed_ants: usize,
    /// Tour cost of each ant in order, `None` for failures.
    pub per_ant_costs: Vec<Option<f64>>,
    /// Best cost seen after each ant.
    pub best_trace: Vec<Option<f64>>,
    pub start_qubits: usize,
    pub step_qubits: usize,
    pub final_pheromone: PheromoneState,
    pub elapsed: Duration,
}

/// Register sizes for start-node selection and for next-hop selection.
pub fn qubit_requirements(instance: &ProblemInstance) -> (usize, usize) {
    (qubits_for(instance.dimension()), qubits_for(instance.max_degree()))
}

/// Draws candidate positions from probability vectors.
#[derive(Debug, Clone)]
pub enum Sampler {
    Quantum { start: SelectorCircuit, step: SelectorCircuit, shots: usize },
    Classical,
}

impl Sampler {
    pub fn new(kind: SamplerKind, instance: &ProblemInstance, shots: usize) -> Result<Self> {
        match kind {
            SamplerKind::Quantum => {
                let (start_q, step_q) = qubit_requirements(instance);
                Ok(Sampler::Quantum {
                    start: SelectorCircuit::new(start_q)?,
                    step: SelectorCircuit::new(step_q)?,
                    shots,
                })
            }
            SamplerKind::Classical => Ok(Sampler::Classical),
        }
    }

    fn draw<R: Rng + ?Sized>(&self, probabilities: &[f64], start: bool, rng: &mut R) -> Result<usize> {
        match self {
            Sampler::Quantum { start: s, step, shots } => {
                let circuit = if start { s } else { step };
                circuit.select(probabilities, *shots, rng)
            }
            Sampler::Classical => Ok(cumulative_draw(probabilities, rng)),
        }
    }

    pub fn pick_next<R: Rng + ?Sized>(&self, probabilities: &[f64], rng: &mut R) -> Result<usize> {
        self.draw(probabilities, false, rng)
    }

    pub fn pick_start<R: Rng + ?Sized>(&self, dimension: usize, rng: &mut R) -> Result<usize> {
        let uniform = vec![1.0 / dimension as f64; dimension];
        self.draw(&uniform, true, rng)
    }
}

/// Roulette-wheel draw over a normalized probability vector.
pub fn cumulative_draw<R: Rng + ?Sized>(probabilities: &[f64], rng: &mut R) -> usize {
    let total: f64 = probabilities.iter().sum();
    let x = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for (i, &p) in probabilities.iter().enumerate() {
        acc += p;
        if p > 0.0 && x < acc {
            return i;
        }
    }
    probabilities.iter().rposition(|&p| p > 0.0).expect("some probability is positive")
}

pub fn select_start_node<R: Rng + ?Sized>(instance: &ProblemInstance, sampler: &Sampler, rng: &mut R) -> Result<usize> {
    sampler.pick_start(instance.dimension(), rng)
}

/// Builds one ant's tour. The status is `Success` when every node was visited
/// (and, with `require_cycle`, the last node is adjacent to the start);
/// otherwise `Stuck`, which also covers a complete path with no closing edge.
pub fn construct_tour<R: Rng + ?Sized>(
    instance: &ProblemInstance,
    pheromone: &PheromoneState,
    params: &Hyperparameters,
    sampler: &Sampler,
    require_cycle: bool,
    rng: &mut R,
) -> Result<TourState> {
    let start = select_start_node(instance, sampler, rng)?;
    let mut tour = TourState::start(instance.dimension(), start);
    while let Some(dist) = transition_distribution(instance, pheromone, params, tour.current(), &tour.visited) {
        let pick = sampler.pick_next(&dist.probabilities, rng)?;
        tour.advance(instance, dist.candidates[pick]);
    }
    tour.status = if !tour.is_complete() {
        TourStatus::Stuck
    } else if !require_cycle || instance.dimension() == 1 {
        TourStatus::Success
    } else {
        match instance.cost(tour.current(), start) {
            Some(closing) => {
                tour.accumulated_cost += closing;
                TourStatus::Success
            }
            None => TourStatus::Stuck,
        }
    };
    Ok(tour)
}

/// Stream `worker` of the ChaCha8 generator keyed by `seed`.
pub fn worker_rng(seed: u64, worker: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(worker as u64);
    rng
}

struct Tracker {
    require_cycle: bool,
    rho: f64,
    best_cycle: Vec<usize>,
    best_cost: Option<f64>,
    per_ant_costs: Vec<Option<f64>>,
    best_trace: Vec<Option<f64>>,
}

impl Tracker {
    fn commit(&mut self, instance: &ProblemInstance, pheromone: &mut PheromoneState, tour: TourState) -> Result<()> {
        pheromone.evaporate(self.rho);
        if tour.status != TourStatus::Success {
            self.per_ant_costs.push(None);
            self.best_trace.push(self.best_cost);
            return Ok(());
        }
        let mut path = tour.path;
        if self.require_cycle {
            path.push(path[0]);
            assert!(is_hamiltonian_cycle(instance, &path), "successful ant produced an invalid cycle {path:?}");
        }
        let cost = tour.accumulated_cost;
        if cost > 0.0 {
            pheromone.deposit_path(&path, cost)?;
        }
        if self.best_cost.is_none_or(|b| cost < b) {
            self.best_cost = Some(cost);
            self.best_cycle = path;
        }
        self.per_ant_costs.push(Some(cost));
        self.best_trace.push(self.best_cost);
        Ok(())
    }
}

/// Runs `config.params.ants` ants on `instance`.
pub fn run(instance: &ProblemInstance, config: &SolverConfig) -> Result<RunResult> {
    config.validate()?;
    let started = Instant::now();
    let params = &config.params;
    let sampler = Sampler::new(config.sampler, instance, params.shots)?;
    let (start_qubits, step_qubits) = qubit_requirements(instance);
    let mut pheromone = PheromoneState::uniform(instance.dimension(), params.initial_pheromone);
    let mut tracker = Tracker {
        require_cycle: config.require_cycle,
        rho: params.rho,
        best_cycle: Vec::new(),
        best_cost: None,
        per_ant_costs: Vec::with_capacity(params.ants),
        best_trace: Vec::with_capacity(params.ants),
    };

    if config.parallel_workers == 1 {
        let mut rng = worker_rng(config.seed, 0);
        for _ in 0..params.ants {
            let tour = construct_tour(instance, &pheromone, params, &sampler, config.require_cycle, &mut rng)?;
            tracker.commit(instance, &mut pheromone, tour)?;
        }
    } else {
        let mut rngs: Vec<ChaCha8Rng> =
            (0..config.parallel_workers).map(|w| worker_rng(config.seed, w)).collect();
        let mut remaining = params.ants;
        while remaining > 0 {
            let batch = remaining.min(config.parallel_workers);
            let snapshot = &pheromone;
            let sampler = &sampler;
            let tours: Vec<Result<TourState>> = std::thread::scope(|scope| {
                let handles: Vec<_> = rngs[..batch]
                    .iter_mut()
                    .map(|rng| {
                        scope.spawn(move || {
                            construct_tour(instance, snapshot, params, sampler, config.require_cycle, rng)
                        })
                    })
                    .collect();
                handles.into_iter().map(|h| h.join().expect("ant worker panicked")).collect()
            });
            for tour in tours {
                tracker.commit(instance, &mut pheromone, tour?)?;
            }
            remaining -= batch;
        }
    }

    let successful_ants = tracker.per_ant_costs.iter().filter(|c| c.is_some()).count();
    let error_percent = match (tracker.best_cost, instance.lower_bound()) {
        (Some(found), Some(reference)) => Some(error_in_estimation(found, reference)?),
        _ => None,
    };
    Ok(RunResult {
        status: if tracker.best_cost.is_some() { RunStatus::Solved } else { RunStatus::NoSolution },
        best_cycle: tracker.best_cycle,
        best_cost: tracker.best_cost,
        error_percent,
        successful_ants,
        failed_ants: params.ants - successful_ants,
        per_ant_costs: tracker.per_ant_costs,
        best_trace: tracker.best_trace,
        start_qubits,
        step_qubits,
        final_pheromone: pheromone,
        elapsed: started.elapsed(),
    })
}

/// `100 · (found − reference) / reference`.
pub fn error_in_estimation(found: f64, reference: f64) -> Result<f64> {
    if !(reference > 0.0) {
        return Err(invalid(format!("reference cost must be positive, got {reference}")));
    }
    Ok(100.0 * (found - reference) / reference)
}

/// Two-decimal display rounding.
pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}
