//! The hardware-efficient variational circuit used inside every QLSTM gate,
//! and native-gate resource accounting for whole generators.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::qsim::{Angle, CircuitSpec, GateKind, GateOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Entangler {
    /// CX from qubit q to q+1 (mod n).
    Ring,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnsatzSpec {
    pub n_qubits: usize,
    pub reps: usize,
    pub entangler: Option<Entangler>,
}

impl AnsatzSpec {
    pub fn ring(n_qubits: usize, reps: usize) -> Self {
        AnsatzSpec {
            n_qubits,
            reps,
            entangler: Some(Entangler::Ring),
        }
    }

    /// Ring entangler when the register has room for one, none on a single
    /// qubit.
    pub fn for_register(n_qubits: usize, reps: usize) -> Self {
        AnsatzSpec {
            n_qubits,
            reps,
            entangler: (n_qubits >= 2).then_some(Entangler::Ring),
        }
    }

    pub fn param_count(&self) -> usize {
        3 * self.n_qubits * self.reps
    }
}

/// Angle-encoding layer (one RY per qubit fed from encoder slot q), then
/// `reps` blocks of RX, RY and RZ layers followed by a CX ring.
///
/// Trainable slots are numbered rep-major, then layer (RX, RY, RZ), then
/// qubit.
pub fn build_hw_efficient(spec: &AnsatzSpec) -> Result<CircuitSpec> {
    let n = spec.n_qubits;
    if spec.reps == 0 {
        return Err(Error::config("ansatz needs at least one repetition"));
    }
    if n < 2 && spec.entangler.is_some() {
        return Err(Error::config("ring entangler needs at least two qubits"));
    }
    let mut gates = Vec::with_capacity(n + spec.reps * 4 * n);
    gates.extend((0..n).map(|q| GateOp::ry(q, Angle::Input(q))));
    for rep in 0..spec.reps {
        let base = rep * 3 * n;
        gates.extend((0..n).map(|q| GateOp::rx(q, Angle::Param(base + q))));
        gates.extend((0..n).map(|q| GateOp::ry(q, Angle::Param(base + n + q))));
        gates.extend((0..n).map(|q| GateOp::rz(q, Angle::Param(base + 2 * n + q))));
        match spec.entangler {
            Some(Entangler::Ring) => gates.extend((0..n).map(|q| GateOp::cx(q, (q + 1) % n))),
            None => {}
        }
    }
    CircuitSpec::new(n, n, spec.param_count(), gates)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GateCounts {
    /// Rotations driven by trainable parameters or fixed angles.
    pub variational: usize,
    /// Rotations driven by encoder inputs; not reported as 1QG.
    pub encoding: usize,
    pub two_qubit: usize,
}

pub fn gate_counts(circuit: &CircuitSpec) -> GateCounts {
    let mut counts = GateCounts::default();
    for g in circuit.gates() {
        match (g.kind, g.angle) {
            (GateKind::Cx, _) => counts.two_qubit += 1,
            (_, Some(Angle::Input(_))) => counts.encoding += 1,
            _ => counts.variational += 1,
        }
    }
    counts
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Architecture {
    LstmQgan,
    PatchGan,
}

impl core::str::FromStr for Architecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lstm-qgan" => Ok(Architecture::LstmQgan),
            "patchgan" | "patchgan-baseline" => Ok(Architecture::PatchGan),
            other => Err(Error::config(alloc::format!(
                "unknown architecture '{other}' (expected lstm-qgan or patchgan)"
            ))),
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Architecture::LstmQgan => "lstm-qgan",
            Architecture::PatchGan => "patchgan",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LstmQganResources {
    pub n_qubits: usize,
    pub reps: usize,
    pub layers: usize,
    pub circuits_per_cell: usize,
}

impl Default for LstmQganResources {
    /// Two QLSTM layers of four 7-qubit gate circuits, two repetitions each.
    fn default() -> Self {
        LstmQganResources {
            n_qubits: 7,
            reps: 2,
            layers: 2,
            circuits_per_cell: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatchGanResources {
    pub n_qubits: usize,
    pub subgenerators: usize,
    pub one_qubit_per_qnn: usize,
    pub two_qubit_per_qnn: usize,
}

impl Default for PatchGanResources {
    /// The published 5-qubit, 56 sub-generator MNIST configuration. The
    /// per-circuit gate counts are recorded figures, not derived from a
    /// circuit built here.
    fn default() -> Self {
        PatchGanResources {
            n_qubits: 5,
            subgenerators: 56,
            one_qubit_per_qnn: 30,
            two_qubit_per_qnn: 24,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResourceConfig {
    LstmQgan(LstmQganResources),
    PatchGan(PatchGanResources),
}

impl ResourceConfig {
    pub fn default_for(arch: Architecture) -> Self {
        match arch {
            Architecture::LstmQgan => ResourceConfig::LstmQgan(LstmQganResources::default()),
            Architecture::PatchGan => ResourceConfig::PatchGan(PatchGanResources::default()),
        }
    }

    pub fn architecture(&self) -> Architecture {
        match self {
            ResourceConfig::LstmQgan(_) => Architecture::LstmQgan,
            ResourceConfig::PatchGan(_) => Architecture::PatchGan,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResourceReport {
    pub architecture: Architecture,
    pub qubits_per_qnn: usize,
    pub qnn_count: usize,
    pub total_qubits: usize,
    pub total_1qg: usize,
    pub total_2qg: usize,
}

pub fn count_resources(config: &ResourceConfig) -> Result<ResourceReport> {
    let (architecture, qubits, qnns, one, two) = match *config {
        ResourceConfig::LstmQgan(c) => {
            let circuit = build_hw_efficient(&AnsatzSpec::ring(c.n_qubits, c.reps))?;
            let counts = gate_counts(&circuit);
            (
                Architecture::LstmQgan,
                c.n_qubits,
                c.layers * c.circuits_per_cell,
                counts.variational,
                counts.two_qubit,
            )
        }
        ResourceConfig::PatchGan(c) => (
            Architecture::PatchGan,
            c.n_qubits,
            c.subgenerators,
            c.one_qubit_per_qnn,
            c.two_qubit_per_qnn,
        ),
    };
    if qnns == 0 {
        return Err(Error::config("resource report needs at least one circuit"));
    }
    Ok(ResourceReport {
        architecture,
        qubits_per_qnn: qubits,
        qnn_count: qnns,
        total_qubits: qubits * qnns,
        total_1qg: one * qnns,
        total_2qg: two * qnns,
    })
}
