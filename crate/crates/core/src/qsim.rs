//! Dense statevector simulation of parameterised RX/RY/RZ/CX circuits.
//!
//! Qubit 0 is the most significant bit of a basis-state index: on three
//! qubits, `|100⟩` is index 4. Gates are applied one at a time with in-place
//! stride kernels over the full amplitude vector.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{check_len, Error, Result};
use crate::math::{self, FRAC_PI_2};

pub const MAX_QUBITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl Statevector {
    /// `|0…0⟩` on `n_qubits` qubits.
    pub fn zero_state(n_qubits: usize) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&n_qubits) {
            return Err(Error::QubitCount(n_qubits));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Statevector {
            n_qubits,
            amplitudes,
        })
    }

    /// Wraps raw amplitudes. The caller is responsible for normalisation.
    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&n_qubits) {
            return Err(Error::QubitCount(n_qubits));
        }
        check_len("statevector amplitudes", 1 << n_qubits, amplitudes.len())?;
        Ok(Statevector {
            n_qubits,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// ⟨Z_q⟩ for every qubit.
    pub fn pauli_z_expectations(&self) -> Vec<f64> {
        let n = self.n_qubits;
        let mut out = vec![0.0; n];
        for (k, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            for (q, o) in out.iter_mut().enumerate() {
                if k >> (n - 1 - q) & 1 == 0 {
                    *o += p;
                } else {
                    *o -= p;
                }
            }
        }
        out
    }

    /// Σ_k weights[k]·|a_k|², the contraction a probability cotangent needs.
    pub fn weighted_probability_sum(&self, weights: &[f64]) -> f64 {
        self.amplitudes
            .iter()
            .zip(weights)
            .map(|(a, w)| w * a.norm_sqr())
            .sum()
    }

    fn bit(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    /// Applies `gate` in place with the already-resolved `angle`.
    pub fn apply(&mut self, gate: &GateOp, angle: Option<f64>) -> Result<()> {
        gate.validate(self.n_qubits)?;
        match gate.kind {
            GateKind::Cx => {
                if angle.is_some() {
                    return Err(Error::UnexpectedAngle);
                }
                let control = gate.control.ok_or(Error::MissingAngle)?;
                self.apply_cx(control, gate.target);
            }
            kind => {
                let theta = angle.ok_or(Error::MissingAngle)?;
                let (c, s) = (math::cos(theta / 2.0), math::sin(theta / 2.0));
                let m = match kind {
                    GateKind::Rx => [
                        Complex64::new(c, 0.0),
                        Complex64::new(0.0, -s),
                        Complex64::new(0.0, -s),
                        Complex64::new(c, 0.0),
                    ],
                    GateKind::Ry => [
                        Complex64::new(c, 0.0),
                        Complex64::new(-s, 0.0),
                        Complex64::new(s, 0.0),
                        Complex64::new(c, 0.0),
                    ],
                    GateKind::Rz => {
                        self.apply_diagonal(gate.target, Complex64::new(c, -s), Complex64::new(c, s));
                        return Ok(());
                    }
                    GateKind::Cx => unreachable!(),
                };
                self.apply_single(gate.target, m);
            }
        }
        Ok(())
    }

    fn apply_single(&mut self, qubit: usize, m: [Complex64; 4]) {
        let bit = self.bit(qubit);
        let dim = self.amplitudes.len();
        for block in (0..dim).step_by(2 * bit) {
            for i in block..block + bit {
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i + bit];
                self.amplitudes[i] = m[0] * a0 + m[1] * a1;
                self.amplitudes[i + bit] = m[2] * a0 + m[3] * a1;
            }
        }
    }

    fn apply_diagonal(&mut self, qubit: usize, d0: Complex64, d1: Complex64) {
        let bit = self.bit(qubit);
        for (k, a) in self.amplitudes.iter_mut().enumerate() {
            *a *= if k & bit == 0 { d0 } else { d1 };
        }
    }

    fn apply_cx(&mut self, control: usize, target: usize) {
        let cbit = self.bit(control);
        let tbit = self.bit(target);
        for k in 0..self.amplitudes.len() {
            if k & cbit != 0 && k & tbit == 0 {
                self.amplitudes.swap(k, k | tbit);
            }
        }
    }
}

pub fn zero_state(n_qubits: usize) -> Result<Statevector> {
    Statevector::zero_state(n_qubits)
}

/// Functional form of [`Statevector::apply`].
pub fn apply_gate(mut state: Statevector, gate: &GateOp, angle: Option<f64>) -> Result<Statevector> {
    state.apply(gate, angle)?;
    Ok(state)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    Cx,
}

/// Where a rotation gate takes its angle from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    /// Trainable parameter slot.
    Param(usize),
    /// Encoder slot, filled from the circuit's classical input.
    Input(usize),
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub target: usize,
    pub control: Option<usize>,
    pub angle: Option<Angle>,
}

impl GateOp {
    pub fn rx(target: usize, angle: Angle) -> Self {
        Self::rotation(GateKind::Rx, target, angle)
    }

    pub fn ry(target: usize, angle: Angle) -> Self {
        Self::rotation(GateKind::Ry, target, angle)
    }

    pub fn rz(target: usize, angle: Angle) -> Self {
        Self::rotation(GateKind::Rz, target, angle)
    }

    pub fn cx(control: usize, target: usize) -> Self {
        GateOp {
            kind: GateKind::Cx,
            target,
            control: Some(control),
            angle: None,
        }
    }

    fn rotation(kind: GateKind, target: usize, angle: Angle) -> Self {
        GateOp {
            kind,
            target,
            control: None,
            angle: Some(angle),
        }
    }

    pub fn is_rotation(&self) -> bool {
        self.kind != GateKind::Cx
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let in_range = |q: usize| {
            if q < n_qubits {
                Ok(())
            } else {
                Err(Error::QubitIndex { qubit: q, n_qubits })
            }
        };
        in_range(self.target)?;
        match (self.kind, self.control) {
            (GateKind::Cx, Some(c)) => {
                in_range(c)?;
                if c == self.target {
                    return Err(Error::ControlIsTarget(c));
                }
                if self.angle.is_some() {
                    return Err(Error::UnexpectedAngle);
                }
            }
            (GateKind::Cx, None) => return Err(Error::config("CX gate without a control qubit")),
            (_, Some(_)) => return Err(Error::config("rotation gate with a control qubit")),
            (_, None) => {
                if self.angle.is_none() {
                    return Err(Error::MissingAngle);
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitSpec {
    n_qubits: usize,
    encoder_slots: usize,
    param_count: usize,
    gates: Vec<GateOp>,
}

impl CircuitSpec {
    pub fn new(
        n_qubits: usize,
        encoder_slots: usize,
        param_count: usize,
        gates: Vec<GateOp>,
    ) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&n_qubits) {
            return Err(Error::QubitCount(n_qubits));
        }
        for g in &gates {
            g.validate(n_qubits)?;
            match g.angle {
                Some(Angle::Param(j)) if j >= param_count => {
                    return Err(Error::config("parameter slot beyond param_count"))
                }
                Some(Angle::Input(j)) if j >= encoder_slots => {
                    return Err(Error::config("encoder slot beyond encoder_slots"))
                }
                _ => {}
            }
        }
        Ok(CircuitSpec {
            n_qubits,
            encoder_slots,
            param_count,
            gates,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn encoder_slots(&self) -> usize {
        self.encoder_slots
    }

    pub fn param_count(&self) -> usize {
        self.param_count
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }

    fn check_inputs(&self, params: &[f64], inputs: &[f64]) -> Result<()> {
        check_len("circuit parameters", self.param_count, params.len())?;
        check_len("circuit inputs", self.encoder_slots, inputs.len())
    }
}

fn resolve(angle: Option<Angle>, params: &[f64], inputs: &[f64]) -> Option<f64> {
    angle.map(|a| match a {
        Angle::Param(j) => params[j],
        Angle::Input(j) => inputs[j],
        Angle::Fixed(t) => t,
    })
}

/// Runs `circuit` from `|0…0⟩`.
pub fn run(circuit: &CircuitSpec, params: &[f64], inputs: &[f64]) -> Result<Statevector> {
    circuit.check_inputs(params, inputs)?;
    let mut state = Statevector::zero_state(circuit.n_qubits)?;
    for g in &circuit.gates {
        state.apply(g, resolve(g.angle, params, inputs))?;
    }
    Ok(state)
}

pub fn probabilities(state: &Statevector) -> Vec<f64> {
    state.probabilities()
}

pub fn pauli_z_expectations(state: &Statevector) -> Vec<f64> {
    state.pauli_z_expectations()
}

/// Gradients of `cotangent · probabilities` with respect to both the
/// trainable parameters and the encoder inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftGradient {
    pub params: Vec<f64>,
    pub inputs: Vec<f64>,
}

/// Parameter-shift rule over every variable rotation in the circuit.
///
/// Each occurrence of a slot is shifted independently by ±π/2 and the
/// contributions summed, so slots shared between gates are handled exactly.
pub fn shift_gradient(
    circuit: &CircuitSpec,
    params: &[f64],
    inputs: &[f64],
    cotangent: &[f64],
) -> Result<ShiftGradient> {
    circuit.check_inputs(params, inputs)?;
    check_len("probability cotangent", 1 << circuit.n_qubits, cotangent.len())?;
    let mut grad = ShiftGradient {
        params: vec![0.0; circuit.param_count],
        inputs: vec![0.0; circuit.encoder_slots],
    };
    if cotangent.iter().all(|&c| c == 0.0) {
        return Ok(grad);
    }

    // prefix[k] is the state just before gate k.
    let mut prefix = Vec::with_capacity(circuit.gates.len());
    let mut state = Statevector::zero_state(circuit.n_qubits)?;
    for g in &circuit.gates {
        prefix.push(state.clone());
        state.apply(g, resolve(g.angle, params, inputs))?;
    }

    for (k, g) in circuit.gates.iter().enumerate() {
        let slot = match g.angle {
            Some(Angle::Param(j)) => (true, j),
            Some(Angle::Input(j)) => (false, j),
            _ => continue,
        };
        let theta = resolve(g.angle, params, inputs).ok_or(Error::MissingAngle)?;
        let mut shifted = [0.0; 2];
        for (out, shift) in shifted.iter_mut().zip([FRAC_PI_2, -FRAC_PI_2]) {
            let mut s = prefix[k].clone();
            s.apply(g, Some(theta + shift))?;
            for later in &circuit.gates[k + 1..] {
                s.apply(later, resolve(later.angle, params, inputs))?;
            }
            *out = s.weighted_probability_sum(cotangent);
        }
        let d = 0.5 * (shifted[0] - shifted[1]);
        match slot {
            (true, j) => grad.params[j] += d,
            (false, j) => grad.inputs[j] += d,
        }
    }
    Ok(grad)
}

/// Trainable-parameter part of [`shift_gradient`].
pub fn param_shift_gradient(
    circuit: &CircuitSpec,
    params: &[f64],
    inputs: &[f64],
    cotangent: &[f64],
) -> Result<Vec<f64>> {
    Ok(shift_gradient(circuit, params, inputs, cotangent)?.params)
}
