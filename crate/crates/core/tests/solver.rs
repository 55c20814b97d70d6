mod common;

use hqaco::aco::{is_hamiltonian_cycle, Hyperparameters};
use hqaco::solver::{run, RunStatus, SamplerKind, SolverConfig};

fn config(ants: usize, seed: u64, sampler: SamplerKind, workers: usize) -> SolverConfig {
    SolverConfig {
        params: Hyperparameters { ants, ..Default::default() },
        sampler,
        seed,
        parallel_workers: workers,
        ..Default::default()
    }
}

#[test]
fn same_seed_same_run() {
    let g = common::instance("burma14.tsp");
    for workers in [1, 4] {
        let a = run(&g, &config(150, 3, SamplerKind::Quantum, workers)).unwrap();
        let b = run(&g, &config(150, 3, SamplerKind::Quantum, workers)).unwrap();
        assert_eq!(a.per_ant_costs, b.per_ant_costs);
        assert_eq!(a.best_cycle, b.best_cycle);
        assert_eq!(a.final_pheromone, b.final_pheromone);
    }
}

#[test]
fn best_trace_is_non_increasing() {
    let g = common::instance("gr17.tsp");
    let r = run(&g, &config(300, 1, SamplerKind::Quantum, 1)).unwrap();
    assert_eq!(r.status, RunStatus::Solved);
    assert_eq!(r.per_ant_costs.len(), 300);
    assert_eq!(r.successful_ants + r.failed_ants, 300);
    let trace: Vec<f64> = r.best_trace.iter().flatten().copied().collect();
    assert!(trace.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(trace.last().copied(), r.best_cost);
    assert!(is_hamiltonian_cycle(&g, &r.best_cycle));
    assert_eq!(r.error_percent.unwrap(), 100.0 * (r.best_cost.unwrap() - 2085.0) / 2085.0);
}

#[test]
fn classical_sampler_solves_too() {
    let g = common::instance("burma14.tsp");
    let r = run(&g, &config(500, 0, SamplerKind::Classical, 1)).unwrap();
    assert!(r.best_cost.unwrap() >= 3323.0);
    assert!(is_hamiltonian_cycle(&g, &r.best_cycle));
}

#[test]
fn complete_graphs_never_strand_an_ant() {
    let g = common::unit_complete(9);
    let r = run(&g, &config(50, 8, SamplerKind::Quantum, 2)).unwrap();
    assert_eq!(r.failed_ants, 0);
    assert_eq!(r.best_cost, Some(9.0));
}

#[test]
fn parallel_and_sequential_reach_similar_quality() {
    let g = common::instance("burma14.tsp");
    let seq = run(&g, &config(1000, 0, SamplerKind::Quantum, 1)).unwrap();
    let par = run(&g, &config(1000, 0, SamplerKind::Quantum, 8)).unwrap();
    assert!(seq.best_cost.unwrap() <= 3655.0);
    assert!(par.best_cost.unwrap() <= 3655.0);
}
