//! Qubit handles over many small independent registers.
//!
//! Each protocol instance (one key pair, its traveling photon, any decoys
//! or eavesdropper ancillae) is simulated in its own register. Registers
//! merge only when a two-qubit gate spans them, and shrink again when a
//! measured qubit is discarded, so the register size stays constant in
//! the number of transmitted photons.

use num_complex::Complex64;
use rand::Rng;
use std::collections::HashMap;

use super::{Basis, DensityMatrix, Gate, QuantumError, StateLabel, StateVector};

/// Opaque handle to one qubit somewhere in the registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QubitId(u64);

struct Register {
    state: StateVector,
    qubits: Vec<QubitId>,
}

/// Owns all live registers and maps qubit handles to positions in them.
#[derive(Default)]
pub struct QubitRegistry {
    registers: Vec<Option<Register>>,
    locations: HashMap<QubitId, (usize, usize)>,
    next_id: u64,
}

impl QubitRegistry {
    pub fn new() -> QubitRegistry {
        QubitRegistry::default()
    }

    fn fresh_id(&mut self) -> QubitId {
        let id = QubitId(self.next_id);
        self.next_id += 1;
        id
    }

    fn insert_register(&mut self, state: StateVector, qubits: Vec<QubitId>) {
        let idx = self.registers.len();
        for (pos, q) in qubits.iter().enumerate() {
            self.locations.insert(*q, (idx, pos));
        }
        self.registers.push(Some(Register { state, qubits }));
    }

    fn location(&self, q: QubitId) -> Result<(usize, usize), QuantumError> {
        self.locations
            .get(&q)
            .copied()
            .ok_or(QuantumError::UnknownQubit(q))
    }

    /// Number of live qubits.
    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    /// Allocate a fresh qubit in the given preparation state.
    pub fn alloc(&mut self, label: StateLabel) -> QubitId {
        let id = self.fresh_id();
        let state = StateVector::prepare(&[label]).expect("single label");
        self.insert_register(state, vec![id]);
        id
    }

    /// Allocate an EPR pair (|00⟩+|11⟩)/√2 and return (first, second) handles.
    pub fn alloc_epr(&mut self) -> (QubitId, QubitId) {
        let a = self.fresh_id();
        let b = self.fresh_id();
        self.insert_register(StateVector::epr_pair(), vec![a, b]);
        (a, b)
    }

    pub fn apply_single(&mut self, gate: &Gate, q: QubitId) -> Result<(), QuantumError> {
        let (reg, pos) = self.location(q)?;
        self.registers[reg]
            .as_mut()
            .expect("live register")
            .state
            .apply_single(gate, pos)
    }

    pub fn apply_rotation(&mut self, theta: f64, q: QubitId) -> Result<(), QuantumError> {
        self.apply_single(&Gate::R(theta), q)
    }

    /// CNOT between two qubit handles, merging their registers if distinct.
    pub fn apply_cnot(&mut self, control: QubitId, target: QubitId) -> Result<(), QuantumError> {
        if control == target {
            return Err(QuantumError::ControlEqualsTarget(0));
        }
        let (c_reg, _) = self.location(control)?;
        let (t_reg, _) = self.location(target)?;
        if c_reg != t_reg {
            self.merge(c_reg, t_reg);
        }
        let (reg, c_pos) = self.location(control)?;
        let (_, t_pos) = self.location(target)?;
        self.registers[reg]
            .as_mut()
            .expect("live register")
            .state
            .apply_cnot(c_pos, t_pos)
    }

    fn merge(&mut self, a: usize, b: usize) {
        let rb = self.registers[b].take().expect("live register");
        let ra = self.registers[a].as_mut().expect("live register");
        ra.state = ra.state.tensor(&rb.state);
        let offset = ra.qubits.len();
        for (pos, q) in rb.qubits.iter().enumerate() {
            self.locations.insert(*q, (a, offset + pos));
        }
        ra.qubits.extend(rb.qubits);
    }

    /// Measure one qubit; the collapsed qubit stays in its register.
    pub fn measure<R: Rng + ?Sized>(
        &mut self,
        q: QubitId,
        basis: Basis,
        rng: &mut R,
    ) -> Result<bool, QuantumError> {
        let (reg, pos) = self.location(q)?;
        self.registers[reg]
            .as_mut()
            .expect("live register")
            .state
            .measure(pos, basis, rng)
    }

    /// Measure in the Z basis and drop the qubit from its register.
    pub fn measure_and_discard<R: Rng + ?Sized>(
        &mut self,
        q: QubitId,
        basis: Basis,
        rng: &mut R,
    ) -> Result<bool, QuantumError> {
        let bit = self.measure(q, basis, rng)?;
        // After an X-basis measurement the qubit is |±⟩, not a determined
        // Z eigenstate; rotate it down so the slice-out is exact.
        if basis == Basis::X {
            self.apply_single(&Gate::H, q)?;
        }
        self.discard(q)?;
        Ok(bit)
    }

    /// Remove a qubit that is no longer correlated with its register
    /// (a measured qubit, or the sole occupant of its register).
    pub fn discard(&mut self, q: QubitId) -> Result<(), QuantumError> {
        let (reg, pos) = self.location(q)?;
        let register = self.registers[reg].as_mut().expect("live register");
        if register.qubits.len() == 1 {
            self.registers[reg] = None;
            self.locations.remove(&q);
            return Ok(());
        }
        register
            .state
            .remove_determined_qubit(pos)
            .map_err(|_| QuantumError::NotSeparable(q))?;
        register.qubits.remove(pos);
        self.locations.remove(&q);
        for (new_pos, other) in register.qubits.iter().enumerate().skip(pos) {
            self.locations.insert(*other, (reg, new_pos));
        }
        Ok(())
    }

    /// Reduced density matrix of an arbitrary set of live qubits.
    /// Qubits in different registers are uncorrelated, so their reduced
    /// states combine as a tensor product.
    pub fn reduced_density(&self, qubits: &[QubitId]) -> Result<DensityMatrix, QuantumError> {
        if qubits.is_empty() {
            return Err(QuantumError::BadKeepSet);
        }
        // Group positions by register, preserving qubit order per register.
        let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
        for &q in qubits {
            let (reg, pos) = self.location(q)?;
            match groups.iter_mut().find(|(r, _)| *r == reg) {
                Some((_, positions)) => positions.push(pos),
                None => groups.push((reg, vec![pos])),
            }
        }
        let mut result: Option<DensityMatrix> = None;
        for (reg, positions) in groups {
            let state = &self.registers[reg].as_ref().expect("live register").state;
            let rho = state.partial_trace(&positions)?;
            result = Some(match result {
                None => rho,
                Some(acc) => acc.kron(&rho),
            });
        }
        Ok(result.expect("nonempty"))
    }

    /// ⟨Φ⁺|ρ_ab|Φ⁺⟩ for a pair of qubits: 1 exactly when the pair is an
    /// intact EPR key pair.
    pub fn epr_fidelity(&self, a: QubitId, b: QubitId) -> Result<f64, QuantumError> {
        let rho = self.reduced_density(&[a, b])?;
        Ok(rho.fidelity_with_pure(&StateVector::epr_pair()))
    }

    /// Unnormalized count of registers currently alive (diagnostic).
    pub fn register_count(&self) -> usize {
        self.registers.iter().filter(|r| r.is_some()).count()
    }

    /// Direct view of the joint state containing `q`, with its position.
    /// Diagnostic only: protocol parties never see amplitudes.
    pub fn state_of(&self, q: QubitId) -> Result<(&StateVector, usize), QuantumError> {
        let (reg, pos) = self.location(q)?;
        Ok((
            &self.registers[reg].as_ref().expect("live register").state,
            pos,
        ))
    }

    /// Probability the qubit would measure 0 in the Z basis (diagnostic).
    pub fn prob_zero(&self, q: QubitId) -> Result<f64, QuantumError> {
        let (state, pos) = self.state_of(q)?;
        state.prob_zero(pos)
    }

    /// Amplitudes of the register holding `q`, for tests that pin exact
    /// vectors.
    pub fn amplitudes_of(&self, q: QubitId) -> Result<Vec<Complex64>, QuantumError> {
        let (state, _) = self.state_of(q)?;
        Ok(state.amplitudes().to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::fidelity;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn alloc_and_measure_roundtrip() {
        let mut reg = QubitRegistry::new();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let q = reg.alloc(StateLabel::One);
        assert!(reg.measure(q, Basis::Z, &mut rng).unwrap());
        assert!(reg.measure(q, Basis::Z, &mut rng).unwrap());
        reg.discard(q).unwrap();
        assert!(reg.is_empty());
    }

    #[test]
    fn cnot_merges_registers_and_builds_ghz() {
        let mut reg = QubitRegistry::new();
        let (a, b) = reg.alloc_epr();
        let p = reg.alloc(StateLabel::Zero);
        assert_eq!(reg.register_count(), 2);
        reg.apply_cnot(a, p).unwrap();
        assert_eq!(reg.register_count(), 1);

        let (state, _) = reg.state_of(b).unwrap();
        let mut expected = StateVector::prepare_epr(1)
            .unwrap()
            .tensor(&StateVector::prepare(&[StateLabel::Zero]).unwrap());
        expected.apply_cnot(0, 2).unwrap();
        assert!((fidelity(state, &expected).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn measure_and_discard_shrinks_register() {
        let mut reg = QubitRegistry::new();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (a, b) = reg.alloc_epr();
        let p = reg.alloc(StateLabel::One);
        reg.apply_cnot(a, p).unwrap();
        let bit = reg.measure_and_discard(p, Basis::Z, &mut rng).unwrap();
        // After discarding the measured payload the pair collapsed to a
        // product Z state consistent with the outcome.
        let pa = reg.prob_zero(a).unwrap();
        let pb = reg.prob_zero(b).unwrap();
        assert!((pa - pb).abs() < 1e-12);
        // GHZ with payload |1⟩: payload bit 1 ↔ pair |00⟩.
        if bit {
            assert!((pa - 1.0).abs() < 1e-12);
        } else {
            assert!(pa.abs() < 1e-12);
        }
        assert_eq!(reg.len(), 2);
    }

    #[test]
    fn epr_fidelity_tracks_key_integrity() {
        let mut reg = QubitRegistry::new();
        let (a, b) = reg.alloc_epr();
        assert!((reg.epr_fidelity(a, b).unwrap() - 1.0).abs() < 1e-12);
        // Bilateral rotation leaves the pair alone.
        reg.apply_rotation(0.9, a).unwrap();
        reg.apply_rotation(0.9, b).unwrap();
        assert!((reg.epr_fidelity(a, b).unwrap() - 1.0).abs() < 1e-12);
        // A one-sided rotation does not.
        reg.apply_rotation(0.9, a).unwrap();
        assert!(reg.epr_fidelity(a, b).unwrap() < 1.0 - 1e-6);
    }

    #[test]
    fn cross_register_reduced_density_is_product() {
        let mut reg = QubitRegistry::new();
        let q0 = reg.alloc(StateLabel::Zero);
        let q1 = reg.alloc(StateLabel::One);
        let rho = reg.reduced_density(&[q0, q1]).unwrap();
        let expected = DensityMatrix::from_pure(
            &StateVector::prepare(&[StateLabel::Zero, StateLabel::One]).unwrap(),
        );
        assert!(rho.max_deviation_from(&expected) < 1e-12);
    }

    #[test]
    fn discard_rejects_entangled_qubit() {
        let mut reg = QubitRegistry::new();
        let (a, _b) = reg.alloc_epr();
        assert!(matches!(reg.discard(a), Err(QuantumError::NotSeparable(_))));
    }

    #[test]
    fn unknown_handle_is_an_error() {
        let mut reg = QubitRegistry::new();
        let q = reg.alloc(StateLabel::Zero);
        reg.discard(q).unwrap();
        assert!(matches!(
            reg.apply_single(&Gate::X, q),
            Err(QuantumError::UnknownQubit(_))
        ));
    }
}
