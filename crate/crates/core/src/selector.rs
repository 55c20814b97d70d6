//! Quantum node selector.
//!
//! A probability vector `{p_i}` is turned into amplitudes `√p_i`, zero padded
//! to `2^q`, and converted into `2^q − 1` spherical angles such that
//!
//! ```text
//! a_1 = cos(r_1/2)
//! a_2 = sin(r_1/2) cos(r_2/2)
//! …
//! a_n = sin(r_1/2) ⋯ sin(r_{n-1}/2)
//! ```
//!
//! The angles are bound into a recursive generator circuit built from `RY`,
//! controlled `RY` and CNOT gates. Running the circuit and measuring draws a
//! candidate with probability `p_i`; a selection takes the majority over a
//! number of shots.
//!
//! The generator leaves amplitude `a_i` on a basis index that is a fixed
//! permutation of `i`. That permutation is recovered once per register size by
//! running the circuit on a probe vector with distinct entries.

use std::f64::consts::PI;

use rand::Rng;

use crate::error::{invalid, Result};
use crate::statevec::{Circuit, GateOp, StateVector, NORM_TOLERANCE};

/// Residual mass below which the remaining angles are irrelevant.
const RESIDUAL_CUTOFF: f64 = 1e-12;

/// Tolerance on `Σ p_i = 1` for probabilities handed to [`select`].
pub const PROBABILITY_TOLERANCE: f64 = 1e-6;

/// Non-negative amplitudes with unit Euclidean norm, length a power of two.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeVector(Vec<f64>);

impl AmplitudeVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 || !values.len().is_power_of_two() {
            return Err(invalid(format!(
                "amplitude vector length must be a power of two ≥ 2, got {}",
                values.len()
            )));
        }
        if values.iter().any(|&a| !a.is_finite() || a < 0.0) {
            return Err(invalid("amplitudes must be finite and non-negative"));
        }
        let norm: f64 = values.iter().map(|a| a * a).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(invalid(format!("amplitudes are not normalized (Σa² = {norm})")));
        }
        Ok(Self(values))
    }

    /// `√p_i` zero padded to `2^qubits`. `probabilities` must already sum to 1.
    pub fn from_probabilities(probabilities: &[f64], qubits: usize) -> Result<Self> {
        let len = 1usize << qubits;
        if probabilities.len() > len {
            return Err(invalid(format!(
                "{} candidates do not fit a {qubits}-qubit register",
                probabilities.len()
            )));
        }
        let mut values: Vec<f64> = probabilities.iter().map(|p| p.max(0.0).sqrt()).collect();
        values.resize(len, 0.0);
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn qubit_count(&self) -> usize {
        self.0.len().trailing_zeros() as usize
    }
}

/// The `2^q − 1` rotation parameters of a `q`-qubit generator.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleVector(Vec<f64>);

impl AngleVector {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() || !(angles.len() + 1).is_power_of_two() {
            return Err(invalid(format!("angle vector length must be 2^q − 1, got {}", angles.len())));
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(invalid("angles must be finite"));
        }
        Ok(Self(angles))
    }

    pub fn angles(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn qubit_count(&self) -> usize {
        (self.0.len() + 1).trailing_zeros() as usize
    }
}

/// Spherical angles of an amplitude vector.
///
/// `r_i = 2·arccos(a_i / ‖a_i..a_n‖)`, evaluated as `2·atan2(‖a_{i+1}..a_n‖, a_i)`
/// on the original vector: the rescaling by `sin(r_i/2)` after each step
/// cancels between the two arguments, so no division is performed. Once the
/// residual mass is negligible the remaining angles are left at 0.
pub fn get_parameters(amplitudes: &AmplitudeVector) -> AngleVector {
    let a = amplitudes.values();
    let n = a.len();
    // suffix[i] = Σ_{j ≥ i} a_j²
    let mut suffix = vec![0.0; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + a[i] * a[i];
    }
    let mut angles = vec![0.0; n - 1];
    for i in 0..n - 1 {
        let tail = suffix[i + 1].sqrt();
        if tail <= RESIDUAL_CUTOFF * suffix[i].sqrt() {
            break;
        }
        angles[i] = 2.0 * tail.atan2(a[i]);
    }
    AngleVector(angles)
}

/// Inverse of [`get_parameters`]: prefix sine products times the next cosine.
pub fn reconstruct_amplitudes(angles: &AngleVector) -> AmplitudeVector {
    let r = angles.angles();
    let mut out = Vec::with_capacity(r.len() + 1);
    let mut prefix = 1.0;
    for &angle in r {
        let (s, c) = (angle / 2.0).sin_cos();
        out.push(prefix * c);
        prefix *= s;
    }
    out.push(prefix);
    AmplitudeVector(out)
}

/// Rotation angle of a template gate: `sign · r[index] + offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSlot {
    pub index: usize,
    pub sign: f64,
    pub offset: f64,
}

impl ParamSlot {
    fn plain(index: usize) -> Self {
        Self { index, sign: 1.0, offset: 0.0 }
    }

    fn resolve(&self, angles: &[f64]) -> f64 {
        self.sign * angles[self.index] + self.offset
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TemplateGate {
    Rotation { controls: Vec<usize>, target: usize, slot: ParamSlot },
    Not { controls: Vec<usize>, target: usize },
}

/// A parameterized `q`-qubit state generator plus the measured-index ↔
/// candidate bijection.
#[derive(Debug, Clone)]
pub struct SelectorCircuit {
    qubit_count: usize,
    template: Vec<TemplateGate>,
    /// candidate position → basis index
    index_map: Vec<usize>,
    /// basis index → candidate position
    candidate_of: Vec<usize>,
}

/// Builds the `q`-qubit generator and fixes its index map.
pub fn build_selector(q: usize) -> Result<SelectorCircuit> {
    SelectorCircuit::new(q)
}

impl SelectorCircuit {
    pub fn new(q: usize) -> Result<Self> {
        // validates q
        StateVector::zero(q)?;
        let lines: Vec<usize> = (0..q).collect();
        let mut template = Vec::new();
        push_generator(&lines, 0, &[], &mut template);
        let mut selector =
            Self { qubit_count: q, template, index_map: Vec::new(), candidate_of: Vec::new() };
        selector.calibrate()?;
        Ok(selector)
    }

    /// Binds a probe with strictly decreasing entries and reads back where
    /// each entry landed.
    fn calibrate(&mut self) -> Result<()> {
        let dim = 1usize << self.qubit_count;
        let weights: Vec<f64> = (1..=dim).rev().map(|w| w as f64).collect();
        let total: f64 = weights.iter().sum();
        let probe: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let amplitudes = AmplitudeVector::from_probabilities(&probe, self.qubit_count)?;
        let state = self.bind(&get_parameters(&amplitudes))?.run();
        let measured = state.probabilities();

        let mut index_map = vec![usize::MAX; dim];
        let mut candidate_of = vec![usize::MAX; dim];
        for (basis, &p) in measured.iter().enumerate() {
            let candidate = probe
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - p).abs().total_cmp(&(b.1 - p).abs()))
                .map(|(i, _)| i)
                .expect("probe is non-empty");
            if (probe[candidate] - p).abs() > 0.25 / total {
                return Err(invalid(format!("generator output {p} at index {basis} matches no probe entry")));
            }
            if index_map[candidate] != usize::MAX {
                return Err(invalid(format!("two basis states map to candidate {candidate}")));
            }
            index_map[candidate] = basis;
            candidate_of[basis] = candidate;
        }
        self.index_map = index_map;
        self.candidate_of = candidate_of;
        Ok(())
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    /// Number of candidates the register can hold.
    pub fn capacity(&self) -> usize {
        1 << self.qubit_count
    }

    pub fn template(&self) -> &[TemplateGate] {
        &self.template
    }

    pub fn index_map(&self) -> &[usize] {
        &self.index_map
    }

    pub fn candidate_of(&self, basis: usize) -> usize {
        self.candidate_of[basis]
    }

    /// Number of distinct rotation parameters the template reads.
    pub fn parameter_count(&self) -> usize {
        let mut seen = vec![false; self.capacity()];
        for gate in &self.template {
            if let TemplateGate::Rotation { slot, .. } = gate {
                seen[slot.index] = true;
            }
        }
        seen.iter().filter(|&&s| s).count()
    }

    /// Substitutes `angles` into the template.
    pub fn bind(&self, angles: &AngleVector) -> Result<Circuit> {
        if angles.len() != self.capacity() - 1 {
            return Err(invalid(format!(
                "{}-qubit selector takes {} angles, got {}",
                self.qubit_count,
                self.capacity() - 1,
                angles.len()
            )));
        }
        let r = angles.angles();
        let gates = self
            .template
            .iter()
            .map(|gate| match gate {
                TemplateGate::Rotation { controls, target, slot } if controls.is_empty() => {
                    GateOp::Ry { target: *target, theta: slot.resolve(r) }
                }
                TemplateGate::Rotation { controls, target, slot } => {
                    GateOp::Cry { controls: controls.clone(), target: *target, theta: slot.resolve(r) }
                }
                TemplateGate::Not { controls, target } => {
                    GateOp::Cnot { controls: controls.clone(), target: *target }
                }
            })
            .collect();
        Circuit::with_gates(self.qubit_count, gates)
    }

    /// Encodes `probabilities`, runs the generator and returns the state.
    pub fn prepare(&self, probabilities: &[f64]) -> Result<StateVector> {
        let normalized = normalize_probabilities(probabilities, self.capacity())?;
        let amplitudes = AmplitudeVector::from_probabilities(&normalized, self.qubit_count)?;
        Ok(self.bind(&get_parameters(&amplitudes))?.run())
    }

    /// One selection: `shots` measurements, majority vote, ties broken
    /// uniformly at random. Returns a candidate position.
    pub fn select<R: Rng + ?Sized>(&self, probabilities: &[f64], shots: usize, rng: &mut R) -> Result<usize> {
        if shots < 1 {
            return Err(invalid("shots must be at least 1"));
        }
        let state = self.prepare(probabilities)?;
        let n = probabilities.len();
        let mut counts = vec![0usize; n];
        let mut taken = 0;
        while taken < shots {
            for basis in state.sample(shots - taken, rng) {
                let candidate = self.candidate_of[basis];
                // Zero-probability candidates keep ~1e-33 of rounding residue
                // after simulation; such draws are repeated.
                if candidate < n && probabilities[candidate] > 0.0 {
                    counts[candidate] += 1;
                    taken += 1;
                }
            }
        }
        Ok(majority(&counts, rng))
    }
}

fn majority<R: Rng + ?Sized>(counts: &[usize], rng: &mut R) -> usize {
    let best = *counts.iter().max().expect("at least one candidate");
    let tied: Vec<usize> = (0..counts.len()).filter(|&i| counts[i] == best).collect();
    if tied.len() == 1 {
        tied[0]
    } else {
        tied[rng.gen_range(0..tied.len())]
    }
}

/// Checks a probability vector and rescales it to sum exactly to 1.
pub fn normalize_probabilities(probabilities: &[f64], capacity: usize) -> Result<Vec<f64>> {
    if probabilities.is_empty() {
        return Err(invalid("no candidates to select from"));
    }
    if probabilities.len() > capacity {
        return Err(invalid(format!(
            "{} candidates exceed selector capacity {capacity}",
            probabilities.len()
        )));
    }
    if probabilities.iter().any(|&p| !p.is_finite() || p < 0.0) {
        return Err(invalid("probabilities must be finite and non-negative"));
    }
    let sum: f64 = probabilities.iter().sum();
    if sum == 0.0 {
        return Err(invalid("all probabilities are zero"));
    }
    if (sum - 1.0).abs() > PROBABILITY_TOLERANCE {
        return Err(invalid(format!("probabilities sum to {sum}, not 1")));
    }
    Ok(probabilities.iter().map(|p| p / sum).collect())
}

/// Smallest register holding `candidates` entries (at least one qubit).
pub fn qubits_for(candidates: usize) -> usize {
    (candidates.max(2).next_power_of_two().trailing_zeros() as usize).max(1)
}

/// Selection on a freshly built register just large enough for the input.
pub fn select<R: Rng + ?Sized>(probabilities: &[f64], shots: usize, rng: &mut R) -> Result<usize> {
    SelectorCircuit::new(qubits_for(probabilities.len()))?.select(probabilities, shots, rng)
}

/// Appends the generator for `lines` (top to bottom) reading parameters
/// `first ..first + 2^n − 1`, with `extra` controls added to every gate.
fn push_generator(lines: &[usize], first: usize, extra: &[usize], out: &mut Vec<TemplateGate>) {
    let with = |own: &[usize]| -> Vec<usize> { own.iter().chain(extra).copied().collect() };
    match lines.len() {
        1 => out.push(TemplateGate::Rotation {
            controls: with(&[]),
            target: lines[0],
            slot: ParamSlot::plain(first),
        }),
        2 => {
            let (top, bottom) = (lines[0], lines[1]);
            out.push(TemplateGate::Rotation { controls: with(&[]), target: top, slot: ParamSlot::plain(first) });
            out.push(TemplateGate::Rotation {
                controls: with(&[top]),
                target: bottom,
                slot: ParamSlot { index: first + 1, sign: -1.0, offset: 0.0 },
            });
            out.push(TemplateGate::Rotation {
                controls: with(&[bottom]),
                target: top,
                slot: ParamSlot { index: first + 2, sign: 1.0, offset: PI },
            });
        }
        n => {
            let half = 1usize << (n - 1);
            let (upper, last) = (&lines[..n - 1], lines[n - 1]);
            push_generator(upper, first, extra, out);
            out.push(TemplateGate::Rotation {
                controls: with(upper),
                target: last,
                slot: ParamSlot::plain(first + half - 1),
            });
            for &line in upper.iter().rev() {
                out.push(TemplateGate::Not { controls: with(&[last]), target: line });
            }
            let nested: Vec<usize> = std::iter::once(last).chain(extra.iter().copied()).collect();
            push_generator(upper, first + half, &nested, out);
        }
    }
}
