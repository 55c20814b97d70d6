#![allow(dead_code)]

use std::path::PathBuf;

use hqaco::graph_io::{load_instance, ProblemInstance};
use hqaco::statevec::{Circuit, GateOp};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn instance(name: &str) -> ProblemInstance {
    load_instance(&data(name)).unwrap()
}

/// Complete graph with every edge of cost 1.
pub fn unit_complete(n: usize) -> ProblemInstance {
    let m = (0..n).map(|i| (0..n).map(|j| if i == j { 0.0 } else { 1.0 }).collect()).collect();
    ProblemInstance::complete(format!("k{n}"), m).unwrap()
}

/// Node-4 neighbourhood in candidate order 2, 3, 5, 6.
pub const NODE4_PROBABILITIES: [f64; 4] = [0.32625, 0.19402, 0.24725, 0.23247];

/// Random non-negative vector with unit sum, optionally with some zeros.
pub fn random_distribution<R: Rng>(rng: &mut R, n: usize, zeros: bool) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    if zeros {
        let k = rng.gen_range(1..n);
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(rng);
        for &i in &idx[..k] {
            v[i] = 0.0;
        }
    }
    let s: f64 = v.iter().sum();
    v.iter().map(|x| x / s).collect()
}

/// Random mix of RY, multi-controlled NOT and multi-controlled RY.
pub fn random_circuit<R: Rng>(rng: &mut R, q: usize, len: usize) -> Circuit {
    let mut circuit = Circuit::new(q).unwrap();
    for _ in 0..len {
        let target = rng.gen_range(0..q);
        let mut others: Vec<usize> = (0..q).filter(|&k| k != target).collect();
        others.shuffle(rng);
        let controls: Vec<usize> = if others.is_empty() {
            Vec::new()
        } else {
            others[..rng.gen_range(1..=others.len())].to_vec()
        };
        let theta = rng.gen_range(-2.0 * std::f64::consts::PI..2.0 * std::f64::consts::PI);
        let gate = match rng.gen_range(0..3) {
            _ if controls.is_empty() => GateOp::Ry { target, theta },
            0 => GateOp::Ry { target, theta },
            1 => GateOp::Cnot { controls, target },
            _ => GateOp::Cry { controls, target, theta },
        };
        circuit.push(gate).unwrap();
    }
    circuit
}
