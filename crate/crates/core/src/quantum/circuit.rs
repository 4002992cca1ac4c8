use std::collections::HashSet;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::games::PlayerId;
use crate::linalg::{c, r, Matrix};
use crate::quantum::state::{QuantumState, NORM_DRIFT_TOL};

/// Explicit gates must satisfy `U^dagger U = I` within this slack.
pub const UNITARY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    H,
    X,
    Y,
    Z,
    S,
    T,
    /// Control first, target second.
    Cnot,
    Unitary(Matrix),
}

impl Gate {
    pub fn from_name(name: &str) -> Option<Gate> {
        Some(match name.to_ascii_uppercase().as_str() {
            "H" => Gate::H,
            "X" => Gate::X,
            "Y" => Gate::Y,
            "Z" => Gate::Z,
            "S" => Gate::S,
            "T" => Gate::T,
            "CNOT" | "CX" => Gate::Cnot,
            _ => return None,
        })
    }

    /// Name of a named gate, `None` for explicit unitaries.
    pub fn name(&self) -> Option<&'static str> {
        Some(match self {
            Gate::H => "H",
            Gate::X => "X",
            Gate::Y => "Y",
            Gate::Z => "Z",
            Gate::S => "S",
            Gate::T => "T",
            Gate::Cnot => "CNOT",
            Gate::Unitary(_) => return None,
        })
    }

    pub fn arity(&self) -> usize {
        match self {
            Gate::Cnot => 2,
            Gate::Unitary(m) => m.rows().trailing_zeros() as usize,
            _ => 1,
        }
    }

    pub fn matrix(&self) -> Matrix {
        let z = r(0.0);
        let o = r(1.0);
        match self {
            Gate::H => Matrix::from_real_rows(&[&[FRAC_1_SQRT_2, FRAC_1_SQRT_2], &[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]]),
            Gate::X => Matrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]),
            Gate::Y => Matrix::from_rows(&[vec![z, c(0.0, -1.0)], vec![c(0.0, 1.0), z]]),
            Gate::Z => Matrix::diag(&[1.0, -1.0]),
            Gate::S => Matrix::from_rows(&[vec![o, z], vec![z, c(0.0, 1.0)]]),
            Gate::T => Matrix::from_rows(&[vec![o, z], vec![z, c(FRAC_1_SQRT_2, FRAC_1_SQRT_2)]]),
            Gate::Cnot => Matrix::from_real_rows(&[
                &[1.0, 0.0, 0.0, 0.0],
                &[0.0, 1.0, 0.0, 0.0],
                &[0.0, 0.0, 0.0, 1.0],
                &[0.0, 0.0, 1.0, 0.0],
            ]),
            Gate::Unitary(m) => m.clone(),
        }
    }

    fn check(&self) -> Result<()> {
        if let Gate::Unitary(m) = self {
            if !m.is_square() || !m.rows().is_power_of_two() || m.rows() < 2 {
                return Err(Error::InvalidCircuit(format!("{}x{} is not a qubit gate", m.rows(), m.cols())));
            }
            let defect = (&(&m.adjoint() * m) - &Matrix::identity(m.rows())).max_abs();
            if defect > UNITARY_TOL {
                return Err(Error::InvalidCircuit(format!("gate is not unitary (|U^dagger U - I| = {defect:e})")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateOp {
    pub gate: Gate,
    /// Local register indices.
    pub targets: Vec<usize>,
}

impl GateOp {
    pub fn new(gate: Gate, targets: &[usize]) -> Self {
        Self { gate, targets: targets.to_vec() }
    }
}

/// One player's circuit: unitaries on their register followed by a
/// standard-basis measurement.
///
/// Qubits are addressed through a local register: the owner's qubits in
/// ascending global order, followed by `ancillas` fresh `|0⟩` qubits that the
/// circuit brings in and that stay with the owner afterwards.
#[derive(Clone, Debug, PartialEq)]
pub struct PlayerCircuit {
    pub owner: PlayerId,
    pub ancillas: usize,
    pub gates: Vec<GateOp>,
    /// Local indices, measured in this order (first is most significant).
    pub outputs: Vec<usize>,
    /// `actions[b]` is played on measurement outcome `b`.
    pub actions: Vec<String>,
}

/// Where a circuit's local register lives in the global state.
#[derive(Clone, Debug, PartialEq)]
pub struct Register {
    pub qubits: Vec<usize>,
}

impl PlayerCircuit {
    /// Bare measurement of the listed local qubits.
    pub fn measure(owner: PlayerId, outputs: &[usize], actions: &[&str]) -> Self {
        Self {
            owner,
            ancillas: 0,
            gates: Vec::new(),
            outputs: outputs.to_vec(),
            actions: actions.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// A circuit that measures nothing and always plays `action`.
    pub fn constant(owner: PlayerId, action: &str) -> Self {
        Self::measure(owner, &[], &[action])
    }

    pub fn with_gate(mut self, gate: Gate, targets: &[usize]) -> Self {
        self.gates.push(GateOp::new(gate, targets));
        self
    }

    pub fn with_ancillas(mut self, count: usize) -> Self {
        self.ancillas = count;
        self
    }

    /// Structural checks given the size of the owner's register before
    /// ancillas are added.
    pub fn validate(&self, owned: usize) -> Result<()> {
        let size = owned + self.ancillas;
        for op in &self.gates {
            op.gate.check()?;
            if op.targets.len() != op.gate.arity() {
                return Err(Error::InvalidCircuit(format!(
                    "gate expects {} targets, got {}",
                    op.gate.arity(),
                    op.targets.len()
                )));
            }
            if let Some(&t) = op.targets.iter().find(|&&t| t >= size) {
                return Err(Error::InvalidCircuit(format!(
                    "player {} targets local qubit {t} but holds {size}",
                    self.owner
                )));
            }
        }
        if let Some(&t) = self.outputs.iter().find(|&&t| t >= size) {
            return Err(Error::InvalidCircuit(format!(
                "player {} measures local qubit {t} but holds {size}",
                self.owner
            )));
        }
        let mut seen = HashSet::new();
        if self.outputs.iter().any(|q| !seen.insert(q)) {
            return Err(Error::InvalidCircuit("an output qubit is listed twice".into()));
        }
        if self.actions.len() != 1 << self.outputs.len() {
            return Err(Error::InvalidCircuit(format!(
                "{} output qubits need {} action labels, got {}",
                self.outputs.len(),
                1 << self.outputs.len(),
                self.actions.len()
            )));
        }
        let mut labels = HashSet::new();
        if let Some(dup) = self.actions.iter().find(|a| !labels.insert(a.as_str())) {
            return Err(Error::InvalidCircuit(format!("action `{dup}` is mapped twice")));
        }
        Ok(())
    }

    /// Adds the ancillas to `state` and returns the global register.
    pub fn allocate(&self, state: &mut QuantumState, max_qubits: usize) -> Result<Register> {
        let mut qubits = state.qubits_of(self.owner);
        self.validate(qubits.len())?;
        qubits.extend(state.append_zeros(self.ancillas, self.owner, max_qubits)?);
        Ok(Register { qubits })
    }

    /// Applies the unitaries on an already allocated register.
    pub fn apply_unitaries(&self, state: &mut QuantumState, reg: &Register) -> Result<()> {
        for op in &self.gates {
            let targets: Vec<usize> = op.targets.iter().map(|&t| reg.qubits[t]).collect();
            state.apply(&op.gate.matrix(), &targets)?;
            let norm = state.norm();
            if (norm - 1.0).abs() > NORM_DRIFT_TOL {
                return Err(Error::NormDrift { norm });
            }
        }
        Ok(())
    }

    pub fn output_qubits(&self, reg: &Register) -> Vec<usize> {
        self.outputs.iter().map(|&t| reg.qubits[t]).collect()
    }

    /// Global qubits touched by gates or measurement.
    pub fn touched(&self, reg: &Register) -> Vec<usize> {
        let mut out: Vec<usize> =
            self.gates.iter().flat_map(|g| g.targets.iter()).chain(&self.outputs).map(|&t| reg.qubits[t]).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn is_bare_measurement(&self) -> bool {
        self.gates.is_empty() && self.ancillas == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gate_matrices_are_unitary() {
        for g in [Gate::H, Gate::X, Gate::Y, Gate::Z, Gate::S, Gate::T, Gate::Cnot] {
            let m = g.matrix();
            assert!((&(&m.adjoint() * &m) - &Matrix::identity(m.rows())).max_abs() < 1e-15, "{g:?}");
            assert_eq!(Gate::from_name(g.name().unwrap()), Some(g));
        }
    }

    #[test]
    fn rejects_non_unitary_and_bad_targets() {
        let bad =
            PlayerCircuit::measure(0, &[0], &["T", "B"]).with_gate(Gate::Unitary(Matrix::diag(&[1.0, 2.0])), &[0]);
        assert!(bad.validate(1).is_err());
        let far = PlayerCircuit::measure(0, &[0], &["T", "B"]).with_gate(Gate::H, &[1]);
        assert!(far.validate(1).is_err());
        assert!(far.clone().with_ancillas(1).validate(1).is_ok());
        assert!(PlayerCircuit::measure(0, &[0], &["T"]).validate(1).is_err());
        assert!(PlayerCircuit::measure(0, &[0], &["T", "T"]).validate(1).is_err());
    }

    #[test]
    fn ancilla_register_is_local() {
        let mut s = QuantumState::basis(&[1, 0], vec![1, 0]).unwrap();
        let circ = PlayerCircuit::measure(1, &[1], &["L", "R"]).with_ancillas(1).with_gate(Gate::Cnot, &[0, 1]);
        let reg = circ.allocate(&mut s, 14).unwrap();
        assert_eq!(reg.qubits, vec![0, 2]);
        circ.apply_unitaries(&mut s, &reg).unwrap();
        assert_eq!(s.outcome_probabilities(&circ.output_qubits(&reg)), vec![0.0, 1.0]);
    }
}
