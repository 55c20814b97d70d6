//! Real-amplitude statevector simulation for the gate family used by the
//! selector circuits: `RY`, `CNOT` and multi-controlled `RY`.
//!
//! Basis ordering: qubit 0 is the most significant bit of a basis index, so
//! for `q = 2` the amplitudes are ordered `|00⟩, |01⟩, |10⟩, |11⟩` with the
//! left digit belonging to qubit 0.

use std::fmt;

use rand::Rng;

use crate::error::{invalid, Result};

/// Tolerance on the squared norm of a state handed in from outside.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Largest register the simulator accepts.
pub const MAX_QUBITS: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    qubit_count: usize,
    amplitudes: Vec<f64>,
}

impl StateVector {
    /// `|0…0⟩` on `qubit_count` qubits.
    pub fn zero(qubit_count: usize) -> Result<Self> {
        check_qubit_count(qubit_count)?;
        let mut amplitudes = vec![0.0; 1 << qubit_count];
        amplitudes[0] = 1.0;
        Ok(Self { qubit_count, amplitudes })
    }

    /// Wraps an explicit amplitude vector, checking length and normalization.
    pub fn from_amplitudes(qubit_count: usize, amplitudes: Vec<f64>) -> Result<Self> {
        check_qubit_count(qubit_count)?;
        if amplitudes.len() != 1 << qubit_count {
            return Err(invalid(format!(
                "expected {} amplitudes for {} qubits, got {}",
                1usize << qubit_count,
                qubit_count,
                amplitudes.len()
            )));
        }
        if amplitudes.iter().any(|a| !a.is_finite()) {
            return Err(invalid("amplitudes must be finite"));
        }
        let norm: f64 = amplitudes.iter().map(|a| a * a).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(invalid(format!("state is not normalized (norm² = {norm})")));
        }
        Ok(Self { qubit_count, amplitudes })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    /// Measurement probabilities of each basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a * a).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum()
    }

    /// Applies `gate` in place.
    pub fn apply(&mut self, gate: &GateOp) -> Result<()> {
        gate.validate(self.qubit_count)?;
        let q = self.qubit_count;
        match gate {
            GateOp::Ry { target, theta } => self.rotate(bit_of(q, *target), 0, *theta),
            GateOp::Cry { controls, target, theta } => {
                let mask = controls.iter().fold(0, |m, &c| m | bit_of(q, c));
                self.rotate(bit_of(q, *target), mask, *theta);
            }
            GateOp::Cnot { controls, target } => {
                let t = bit_of(q, *target);
                let c = controls.iter().fold(0, |m, &c| m | bit_of(q, c));
                for i in 0..self.amplitudes.len() {
                    if i & t == 0 && i & c == c {
                        self.amplitudes.swap(i, i | t);
                    }
                }
            }
        }
        Ok(())
    }

    // Ry(θ) = [[cos θ/2, −sin θ/2], [sin θ/2, cos θ/2]] on every amplitude pair
    // (i, i|target) whose index carries all bits of `control_mask`.
    fn rotate(&mut self, target: usize, control_mask: usize, theta: f64) {
        let (s, c) = (theta / 2.0).sin_cos();
        for i in 0..self.amplitudes.len() {
            if i & target != 0 || i & control_mask != control_mask {
                continue;
            }
            let j = i | target;
            let (a0, a1) = (self.amplitudes[i], self.amplitudes[j]);
            self.amplitudes[i] = c * a0 - s * a1;
            self.amplitudes[j] = s * a0 + c * a1;
        }
    }

    /// Draws `shots` independent measurements of the full register.
    pub fn sample<R: Rng + ?Sized>(&self, shots: usize, rng: &mut R) -> Vec<usize> {
        let cumulative: Vec<f64> = self
            .amplitudes
            .iter()
            .scan(0.0, |acc, a| {
                *acc += a * a;
                Some(*acc)
            })
            .collect();
        let total = *cumulative.last().expect("state is never empty");
        // Fallback for a draw that rounds up to `total`.
        let last_nonzero = self
            .amplitudes
            .iter()
            .rposition(|&a| a != 0.0)
            .expect("normalized state has a nonzero amplitude");
        (0..shots)
            .map(|_| {
                let x = rng.gen::<f64>() * total;
                // first index whose cumulative mass exceeds x; its own mass is > 0
                let idx = cumulative.partition_point(|&c| c <= x);
                idx.min(last_nonzero)
            })
            .collect()
    }
}

fn check_qubit_count(q: usize) -> Result<()> {
    if q < 1 {
        return Err(invalid("qubit count must be at least 1"));
    }
    if q > MAX_QUBITS {
        return Err(invalid(format!("qubit count {q} exceeds the simulator limit {MAX_QUBITS}")));
    }
    Ok(())
}

/// Index bit of `qubit` in a `q`-qubit register.
#[inline]
pub fn bit_of(q: usize, qubit: usize) -> usize {
    1 << (q - 1 - qubit)
}

#[derive(Debug, Clone, PartialEq)]
pub enum GateOp {
    Ry { target: usize, theta: f64 },
    /// NOT on `target` where every control qubit is 1. A single control is the
    /// ordinary CNOT; more arise when a CNOT fan is nested under extra controls.
    Cnot { controls: Vec<usize>, target: usize },
    /// Rotation applied only where every control qubit is 1.
    Cry { controls: Vec<usize>, target: usize, theta: f64 },
}

impl GateOp {
    pub fn target(&self) -> usize {
        match self {
            GateOp::Ry { target, .. } | GateOp::Cnot { target, .. } | GateOp::Cry { target, .. } => {
                *target
            }
        }
    }

    pub fn controls(&self) -> Vec<usize> {
        match self {
            GateOp::Ry { .. } => Vec::new(),
            GateOp::Cnot { controls, .. } => controls.clone(),
            GateOp::Cry { controls, .. } => controls.clone(),
        }
    }

    pub fn theta(&self) -> Option<f64> {
        match self {
            GateOp::Ry { theta, .. } | GateOp::Cry { theta, .. } => Some(*theta),
            GateOp::Cnot { .. } => None,
        }
    }

    pub fn validate(&self, qubit_count: usize) -> Result<()> {
        let target = self.target();
        if target >= qubit_count {
            return Err(invalid(format!("target qubit {target} out of range for {qubit_count} qubits")));
        }
        let controls = self.controls();
        if controls.is_empty() && !matches!(self, GateOp::Ry { .. }) {
            return Err(invalid("controlled gate needs at least one control"));
        }
        for (k, &c) in controls.iter().enumerate() {
            if c >= qubit_count {
                return Err(invalid(format!("control qubit {c} out of range for {qubit_count} qubits")));
            }
            if c == target {
                return Err(invalid(format!("qubit {c} is both control and target")));
            }
            if controls[..k].contains(&c) {
                return Err(invalid(format!("duplicate control qubit {c}")));
            }
        }
        if let Some(theta) = self.theta() {
            if !theta.is_finite() {
                return Err(invalid("rotation angle must be finite"));
            }
        }
        Ok(())
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateOp::Ry { target, theta } => write!(f, "RY t={target} theta={theta}"),
            GateOp::Cnot { controls, target } => write!(f, "CNOT c={} t={target}", join(controls)),
            GateOp::Cry { controls, target, theta } => {
                write!(f, "CRY c={} t={target} theta={theta}", join(controls))
            }
        }
    }
}

fn join(indices: &[usize]) -> String {
    indices.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

impl GateOp {
    pub fn cnot(control: usize, target: usize) -> Self {
        GateOp::Cnot { controls: vec![control], target }
    }
}

/// An ordered gate list over a fixed register size.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    qubit_count: usize,
    gates: Vec<GateOp>,
}

impl Circuit {
    pub fn new(qubit_count: usize) -> Result<Self> {
        check_qubit_count(qubit_count)?;
        Ok(Self { qubit_count, gates: Vec::new() })
    }

    pub fn with_gates(qubit_count: usize, gates: Vec<GateOp>) -> Result<Self> {
        let mut circuit = Self::new(qubit_count)?;
        for gate in gates {
            circuit.push(gate)?;
        }
        Ok(circuit)
    }

    pub fn push(&mut self, gate: GateOp) -> Result<()> {
        gate.validate(self.qubit_count)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Simulates the circuit from `|0…0⟩`.
    pub fn run(&self) -> StateVector {
        let mut state = StateVector::zero(self.qubit_count).expect("circuit qubit count checked on construction");
        for gate in &self.gates {
            state.apply(gate).expect("gates checked on push");
        }
        state
    }
}

/// Text gate list, one gate per line.
impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for gate in &self.gates {
            writeln!(f, "{gate}")?;
        }
        Ok(())
    }
}

pub fn zero_state(q: usize) -> Result<StateVector> {
    StateVector::zero(q)
}

pub fn apply_gate(mut state: StateVector, gate: &GateOp) -> Result<StateVector> {
    state.apply(gate)?;
    Ok(state)
}

pub fn run_circuit(circuit: &Circuit) -> StateVector {
    circuit.run()
}

pub fn sample<R: Rng + ?Sized>(state: &StateVector, shots: usize, rng: &mut R) -> Result<Vec<usize>> {
    if shots < 1 {
        return Err(invalid("shots must be at least 1"));
    }
    Ok(state.sample(shots, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn zero_state_basis() {
        assert_eq!(zero_state(1).unwrap().amplitudes(), &[1.0, 0.0]);
        assert_eq!(zero_state(2).unwrap().amplitudes(), &[1.0, 0.0, 0.0, 0.0]);
        let s = zero_state(3).unwrap();
        assert_eq!(s.dimension(), 8);
        assert_eq!(s.amplitudes()[0], 1.0);
        assert!(zero_state(0).is_err());
    }

    #[test]
    fn ry_pi_flips() {
        let s = apply_gate(zero_state(1).unwrap(), &GateOp::Ry { target: 0, theta: PI }).unwrap();
        assert!(close(s.amplitudes(), &[0.0, 1.0], 1e-12));
    }

    #[test]
    fn ry_worked_angle() {
        let s = apply_gate(zero_state(1).unwrap(), &GateOp::Ry { target: 0, theta: 1.982313 }).unwrap();
        assert!((s.amplitudes()[0] - 0.3f64.sqrt()).abs() < 1e-5);
    }

    #[test]
    fn cnot_truth_table() {
        // |10⟩: qubit 0 set, index 2
        let s = StateVector::from_amplitudes(2, vec![0.0, 0.0, 1.0, 0.0]).unwrap();
        let s = apply_gate(s, &GateOp::cnot(0, 1)).unwrap();
        assert_eq!(s.amplitudes(), &[0.0, 0.0, 0.0, 1.0]);
        let s = StateVector::from_amplitudes(2, vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        let s = apply_gate(s, &GateOp::cnot(0, 1)).unwrap();
        assert_eq!(s.amplitudes(), &[0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn cry_acts_only_under_controls() {
        let mut s = zero_state(2).unwrap();
        s.apply(&GateOp::Cry { controls: vec![0], target: 1, theta: PI }).unwrap();
        assert_eq!(s.amplitudes(), &[1.0, 0.0, 0.0, 0.0]);
        s.apply(&GateOp::Ry { target: 0, theta: PI }).unwrap();
        s.apply(&GateOp::Cry { controls: vec![0], target: 1, theta: PI }).unwrap();
        assert!(close(s.amplitudes(), &[0.0, 0.0, 0.0, 1.0], 1e-12));
    }

    #[test]
    fn invalid_gates_rejected() {
        let mut s = zero_state(2).unwrap();
        assert!(s.apply(&GateOp::Ry { target: 2, theta: 0.1 }).is_err());
        assert!(s.apply(&GateOp::cnot(1, 1)).is_err());
        assert!(s.apply(&GateOp::Cry { controls: vec![0, 0], target: 1, theta: 0.1 }).is_err());
        assert!(s.apply(&GateOp::Cry { controls: vec![3], target: 1, theta: 0.1 }).is_err());
        assert!(Circuit::with_gates(1, vec![GateOp::cnot(0, 1)]).is_err());
    }

    #[test]
    fn empty_circuit_is_zero_state() {
        let c = Circuit::new(2).unwrap();
        assert_eq!(run_circuit(&c).amplitudes(), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn single_qubit_generator_half_half() {
        let theta = 2.0 * 0.5f64.sqrt().acos();
        let c = Circuit::with_gates(1, vec![GateOp::Ry { target: 0, theta }]).unwrap();
        let h = 0.5f64.sqrt();
        assert!(close(run_circuit(&c).amplitudes(), &[h, h], 1e-9));
    }

    #[test]
    fn rotation_inverse_and_cnot_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let theta = rng.gen_range(-PI..PI);
            let mut s = zero_state(3).unwrap();
            s.apply(&GateOp::Ry { target: 0, theta: 0.7 }).unwrap();
            s.apply(&GateOp::Ry { target: 2, theta: 1.9 }).unwrap();
            let before = s.clone();
            s.apply(&GateOp::Cry { controls: vec![0, 2], target: 1, theta }).unwrap();
            s.apply(&GateOp::Cry { controls: vec![0, 2], target: 1, theta: -theta }).unwrap();
            assert!(close(s.amplitudes(), before.amplitudes(), 1e-9));
            s.apply(&GateOp::cnot(2, 0)).unwrap();
            s.apply(&GateOp::cnot(2, 0)).unwrap();
            assert!(close(s.amplitudes(), before.amplitudes(), 1e-15));
        }
    }

    #[test]
    fn deterministic_states_sample_deterministically() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let one = StateVector::from_amplitudes(1, vec![0.0, 1.0]).unwrap();
        assert_eq!(sample(&one, 10, &mut rng).unwrap(), vec![1; 10]);
        let zero = zero_state(2).unwrap();
        assert!(sample(&zero, 1000, &mut rng).unwrap().iter().all(|&i| i == 0));
        assert!(sample(&zero, 0, &mut rng).is_err());
    }

    #[test]
    fn from_amplitudes_checks() {
        assert!(StateVector::from_amplitudes(1, vec![1.0, 1.0]).is_err());
        assert!(StateVector::from_amplitudes(2, vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn gate_list_format() {
        let c = Circuit::with_gates(
            3,
            vec![
                GateOp::Ry { target: 0, theta: 0.5 },
                GateOp::cnot(2, 1),
                GateOp::Cry { controls: vec![0, 1], target: 2, theta: -1.25 },
            ],
        )
        .unwrap();
        assert_eq!(c.to_string(), "RY t=0 theta=0.5\nCNOT c=2 t=1\nCRY c=0,1 t=2 theta=-1.25\n");
    }
}
