//! Dense statevectors and projective measurement.

use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use super::{DensityMatrix, Gate, QuantumError};

/// One of the four single-qubit preparation states used by the protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum StateLabel {
    /// |0⟩
    Zero,
    /// |1⟩
    One,
    /// |+⟩ = (|0⟩+|1⟩)/√2
    Plus,
    /// |−⟩ = (|0⟩−|1⟩)/√2
    Minus,
}

impl StateLabel {
    pub const ALL: [StateLabel; 4] = [
        StateLabel::Zero,
        StateLabel::One,
        StateLabel::Plus,
        StateLabel::Minus,
    ];

    /// Amplitudes (⟨0|s⟩, ⟨1|s⟩) of the labelled state.
    pub fn amplitudes(self) -> [Complex64; 2] {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        match self {
            StateLabel::Zero => [one, zero],
            StateLabel::One => [zero, one],
            StateLabel::Plus => [h, h],
            StateLabel::Minus => [h, -h],
        }
    }

    /// The basis this state is an eigenstate of.
    pub fn basis(self) -> Basis {
        match self {
            StateLabel::Zero | StateLabel::One => Basis::Z,
            StateLabel::Plus | StateLabel::Minus => Basis::X,
        }
    }

    /// The measurement outcome this state yields deterministically in its
    /// own basis: false for |0⟩/|+⟩, true for |1⟩/|−⟩.
    pub fn eigenvalue_bit(self) -> bool {
        matches!(self, StateLabel::One | StateLabel::Minus)
    }

    /// The eigenstate of `basis` with outcome bit `bit`.
    pub fn from_basis_bit(basis: Basis, bit: bool) -> StateLabel {
        match (basis, bit) {
            (Basis::Z, false) => StateLabel::Zero,
            (Basis::Z, true) => StateLabel::One,
            (Basis::X, false) => StateLabel::Plus,
            (Basis::X, true) => StateLabel::Minus,
        }
    }

    pub fn parse(s: &str) -> Result<StateLabel, QuantumError> {
        match s {
            "0" => Ok(StateLabel::Zero),
            "1" => Ok(StateLabel::One),
            "+" => Ok(StateLabel::Plus),
            "-" | "−" => Ok(StateLabel::Minus),
            other => Err(QuantumError::UnknownLabel(other.to_string())),
        }
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StateLabel::Zero => "0",
            StateLabel::One => "1",
            StateLabel::Plus => "+",
            StateLabel::Minus => "-",
        };
        write!(f, "{s}")
    }
}

/// A measurement basis: Z = {|0⟩,|1⟩}, X = {|+⟩,|−⟩}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Basis {
    Z,
    X,
}

impl Basis {
    /// Eigenstates ordered by outcome bit (false, true).
    pub fn eigenstates(self) -> [StateLabel; 2] {
        match self {
            Basis::Z => [StateLabel::Zero, StateLabel::One],
            Basis::X => [StateLabel::Plus, StateLabel::Minus],
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::Z => write!(f, "Z"),
            Basis::X => write!(f, "X"),
        }
    }
}

/// A pure state of `num_qubits` qubits as 2^n complex amplitudes.
///
/// Qubit 0 is the most significant bit of the amplitude index, so the
/// amplitude of |q0 q1 … q_{n-1}⟩ sits at index q0·2^{n-1} + … + q_{n-1}.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Tensor product of labelled single-qubit states, one label per qubit.
    pub fn prepare(labels: &[StateLabel]) -> Result<StateVector, QuantumError> {
        if labels.is_empty() {
            return Err(QuantumError::UnknownLabel("<empty label list>".into()));
        }
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        for label in labels {
            let [a0, a1] = label.amplitudes();
            let mut next = Vec::with_capacity(amps.len() * 2);
            for a in &amps {
                next.push(a * a0);
                next.push(a * a1);
            }
            amps = next;
        }
        Ok(StateVector {
            num_qubits: labels.len(),
            amps,
        })
    }

    /// `num_pairs` EPR pairs, each in (|00⟩+|11⟩)/√2, laid out as
    /// consecutive qubit pairs (0,1), (2,3), ….
    pub fn prepare_epr(num_pairs: usize) -> Result<StateVector, QuantumError> {
        if num_pairs == 0 {
            return Err(QuantumError::BadDistribution(
                "num_pairs must be >= 1".into(),
            ));
        }
        let mut state = StateVector::epr_pair();
        for _ in 1..num_pairs {
            state = state.tensor(&StateVector::epr_pair());
        }
        Ok(state)
    }

    /// Build a state from explicit amplitudes (must be normalized).
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<StateVector, QuantumError> {
        let num_qubits = amps.len().trailing_zeros() as usize;
        if amps.is_empty() || amps.len() != 1 << num_qubits {
            return Err(QuantumError::BadDistribution(format!(
                "amplitude count {} is not a power of two",
                amps.len()
            )));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(QuantumError::BadDistribution(format!(
                "state norm² is {norm}, expected 1"
            )));
        }
        Ok(StateVector { num_qubits, amps })
    }

    /// A single (|00⟩+|11⟩)/√2 pair.
    pub fn epr_pair() -> StateVector {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        StateVector {
            num_qubits: 2,
            amps: vec![h, z, z, h],
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Tensor product self ⊗ other; self's qubits keep their indices,
    /// other's are appended after them.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        StateVector {
            num_qubits: self.num_qubits + other.num_qubits,
            amps,
        }
    }

    fn check_index(&self, target: usize) -> Result<(), QuantumError> {
        if target >= self.num_qubits {
            return Err(QuantumError::QubitOutOfRange {
                index: target,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    fn bit_mask(&self, qubit: usize) -> usize {
        1 << (self.num_qubits - 1 - qubit)
    }

    /// Apply a single-qubit gate to `target`, identity elsewhere.
    pub fn apply_single(&mut self, gate: &Gate, target: usize) -> Result<(), QuantumError> {
        self.check_index(target)?;
        let m = gate
            .single_qubit_matrix()
            .ok_or_else(|| QuantumError::NotSingleQubit(gate.to_string()))?;
        let mask = self.bit_mask(target);
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let a0 = self.amps[i];
                let a1 = self.amps[i | mask];
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | mask] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
        debug_assert!((self.norm_sqr() - 1.0).abs() < 1e-9);
        Ok(())
    }

    /// CNOT with the given control and target qubits.
    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<(), QuantumError> {
        self.check_index(control)?;
        self.check_index(target)?;
        if control == target {
            return Err(QuantumError::ControlEqualsTarget(control));
        }
        let c_mask = self.bit_mask(control);
        let t_mask = self.bit_mask(target);
        for i in 0..self.amps.len() {
            if i & c_mask != 0 && i & t_mask == 0 {
                self.amps.swap(i, i | t_mask);
            }
        }
        Ok(())
    }

    /// Apply the rotation [[cosθ, sinθ], [−sinθ, cosθ]] to `target`.
    pub fn apply_rotation(&mut self, theta: f64, target: usize) -> Result<(), QuantumError> {
        self.apply_single(&Gate::R(theta), target)
    }

    /// Probability of measuring `target` as 0 in the Z basis.
    pub fn prob_zero(&self, target: usize) -> Result<f64, QuantumError> {
        self.check_index(target)?;
        let mask = self.bit_mask(target);
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Projective measurement of one qubit.
    ///
    /// The outcome is drawn from the Born rule using `rng`, the state is
    /// collapsed and renormalized in place, and the outcome bit returned
    /// (false ↔ the first eigenstate of `basis`). Re-measuring the same
    /// qubit in the same basis is then deterministic.
    pub fn measure<R: Rng + ?Sized>(
        &mut self,
        target: usize,
        basis: Basis,
        rng: &mut R,
    ) -> Result<bool, QuantumError> {
        self.check_index(target)?;
        // X-basis measurement = conjugate by H, measure Z, undo.
        if basis == Basis::X {
            self.apply_single(&Gate::H, target)?;
            let bit = self.measure(target, Basis::Z, rng)?;
            self.apply_single(&Gate::H, target)?;
            return Ok(bit);
        }
        let p0 = self.prob_zero(target)?;
        let outcome = rng.gen::<f64>() >= p0;
        self.collapse(target, outcome, if outcome { 1.0 - p0 } else { p0 });
        Ok(outcome)
    }

    fn collapse(&mut self, target: usize, bit: bool, prob: f64) {
        let mask = self.bit_mask(target);
        let keep = if bit { mask } else { 0 };
        let scale = 1.0 / prob.max(f64::MIN_POSITIVE).sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & mask == keep {
                *a *= scale;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Reduced density matrix on the kept qubits, in the order given.
    /// `keep[0]` becomes the most significant bit of the reduced index.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix, QuantumError> {
        if keep.is_empty() || keep.len() > self.num_qubits {
            return Err(QuantumError::BadKeepSet);
        }
        let mut seen = vec![false; self.num_qubits];
        for &q in keep {
            self.check_index(q).map_err(|_| QuantumError::BadKeepSet)?;
            if seen[q] {
                return Err(QuantumError::BadKeepSet);
            }
            seen[q] = true;
        }
        let traced: Vec<usize> = (0..self.num_qubits).filter(|q| !seen[*q]).collect();
        let k = keep.len();
        let dim = 1 << k;
        let env_dim = 1usize << traced.len();

        // Full index for (kept-bits, environment-bits) assignment.
        let index_of = |kept: usize, env: usize| -> usize {
            let mut idx = 0usize;
            for (pos, &q) in keep.iter().enumerate() {
                if kept & (1 << (k - 1 - pos)) != 0 {
                    idx |= self.bit_mask(q);
                }
            }
            for (pos, &q) in traced.iter().enumerate() {
                if env & (1 << (traced.len() - 1 - pos)) != 0 {
                    idx |= self.bit_mask(q);
                }
            }
            idx
        };

        let mut entries = nalgebra::DMatrix::<Complex64>::zeros(dim, dim);
        for row in 0..dim {
            for col in 0..dim {
                let mut sum = Complex64::new(0.0, 0.0);
                for env in 0..env_dim {
                    sum += self.amps[index_of(row, env)] * self.amps[index_of(col, env)].conj();
                }
                entries[(row, col)] = sum;
            }
        }
        Ok(DensityMatrix::from_entries(entries))
    }

    /// Remove a qubit whose value is determined (all amplitude mass on one
    /// bit value), keeping the joint state of the rest.
    pub fn remove_determined_qubit(&mut self, target: usize) -> Result<bool, QuantumError> {
        self.check_index(target)?;
        let p0 = self.prob_zero(target)?;
        let bit = if p0 > 1.0 - 1e-9 {
            false
        } else if p0 < 1e-9 {
            true
        } else {
            return Err(QuantumError::BadDistribution(format!(
                "qubit {target} is not in a determined basis state (p0 = {p0})"
            )));
        };
        let mask = self.bit_mask(target);
        let keep = if bit { mask } else { 0 };
        let mut amps = Vec::with_capacity(self.amps.len() / 2);
        for (i, a) in self.amps.iter().enumerate() {
            if i & mask == keep {
                amps.push(*a);
            }
        }
        // Renormalize away the ~1e-9 tail that may have been dropped.
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        self.amps = amps;
        self.num_qubits -= 1;
        Ok(bit)
    }
}

/// |⟨a|b⟩|²: 1 iff the states are equal up to global phase, 0 iff orthogonal.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64, QuantumError> {
    if a.amps.len() != b.amps.len() {
        return Err(QuantumError::DimensionMismatch(a.amps.len(), b.amps.len()));
    }
    let inner: Complex64 = a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum();
    Ok(inner.norm_sqr())
}

/// Shannon entropy −Σ p log₂ p in bits, with 0·log 0 = 0.
pub fn shannon_entropy(probs: &[f64]) -> Result<f64, QuantumError> {
    let mut sum = 0.0;
    for &p in probs {
        if p < -1e-12 {
            return Err(QuantumError::BadDistribution(format!(
                "negative probability {p}"
            )));
        }
        sum += p;
    }
    if (sum - 1.0).abs() > 1e-9 {
        return Err(QuantumError::BadDistribution(format!(
            "probabilities sum to {sum}, expected 1"
        )));
    }
    Ok(probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum())
}
