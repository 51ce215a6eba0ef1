//! QLSTM: LSTM gating where the forget, input, update and output transforms
//! are variational circuits.
//!
//! A cell projects `[h_{t-1}, x_t]` to one encoder angle per qubit
//! (`π·tanh(W v + b)`), runs the hardware-efficient ansatz once per gate with
//! that gate's own parameters, and reads the circuit out either as scaled
//! basis-state probabilities (`2^n · p`, hidden size `2^n`) or as Pauli-Z
//! expectations (hidden size `n`). The classical LSTM update follows:
//!
//! ```text
//! f = σ(m_f)  i = σ(m_i)  u = tanh(m_u)  o = σ(m_o)
//! c' = f ⊙ c + i ⊙ u
//! h' = o ⊙ tanh(c')
//! ```
//!
//! Backward passes are exact: circuit segments use the parameter-shift rule
//! for both trainable angles and encoder angles.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::ansatz::{build_hw_efficient, AnsatzSpec};
use crate::error::{check_len, Error, Result};
use crate::linalg::Matrix;
use crate::math::{self, PI};
use crate::params::{zeros_like, ParamSet};
use crate::qsim::{run, shift_gradient, CircuitSpec, Statevector};
use crate::rng::uniform;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HiddenMode {
    /// `2^n` probabilities scaled by `2^n`.
    Probabilities,
    /// One ⟨Z⟩ per qubit.
    PauliZ,
}

impl core::fmt::Display for HiddenMode {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            HiddenMode::Probabilities => "probabilities",
            HiddenMode::PauliZ => "pauli-z",
        })
    }
}

impl core::str::FromStr for HiddenMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "probabilities" => Ok(HiddenMode::Probabilities),
            "pauli-z" => Ok(HiddenMode::PauliZ),
            other => Err(Error::config(alloc::format!(
                "unknown hidden mode '{other}' (expected probabilities or pauli-z)"
            ))),
        }
    }
}

impl HiddenMode {
    pub fn hidden_dim(self, n_qubits: usize) -> usize {
        match self {
            HiddenMode::Probabilities => 1 << n_qubits,
            HiddenMode::PauliZ => n_qubits,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QlstmConfig {
    pub n_qubits: usize,
    pub reps: usize,
    pub hidden_mode: HiddenMode,
    pub input_dim: usize,
    pub layers: usize,
}

impl QlstmConfig {
    pub fn hidden_dim(&self) -> usize {
        self.hidden_mode.hidden_dim(self.n_qubits)
    }

    /// Input width of `layer`: the external input for layer 0, the previous
    /// layer's hidden size otherwise.
    pub fn layer_input_dim(&self, layer: usize) -> usize {
        if layer == 0 {
            self.input_dim
        } else {
            self.hidden_dim()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers == 0 {
            return Err(Error::config("QLSTM needs at least one layer"));
        }
        if self.input_dim == 0 {
            return Err(Error::config("QLSTM input dimension must be positive"));
        }
        build_hw_efficient(&AnsatzSpec::for_register(self.n_qubits, self.reps)).map(|_| ())
    }
}

pub const FORGET: usize = 0;
pub const INPUT: usize = 1;
pub const UPDATE: usize = 2;
pub const OUTPUT: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct QlstmCellParams {
    circuit: CircuitSpec,
    reps: usize,
    hidden_mode: HiddenMode,
    input_dim: usize,
    /// `n_qubits × (hidden_dim + input_dim)`; columns ordered `[h, x]`.
    pub proj_weights: Matrix,
    pub proj_bias: Vec<f64>,
    /// Forget, input, update, output circuit angles.
    pub vqc: [Vec<f64>; 4],
}

impl QlstmCellParams {
    pub fn zeros(n_qubits: usize, reps: usize, hidden_mode: HiddenMode, input_dim: usize) -> Result<Self> {
        let circuit = build_hw_efficient(&AnsatzSpec::for_register(n_qubits, reps))?;
        if input_dim == 0 {
            return Err(Error::config("QLSTM input dimension must be positive"));
        }
        let hidden = hidden_mode.hidden_dim(n_qubits);
        let pc = circuit.param_count();
        Ok(QlstmCellParams {
            circuit,
            reps,
            hidden_mode,
            input_dim,
            proj_weights: Matrix::zeros(n_qubits, hidden + input_dim),
            proj_bias: vec![0.0; n_qubits],
            vqc: [vec![0.0; pc], vec![0.0; pc], vec![0.0; pc], vec![0.0; pc]],
        })
    }

    /// Projection uniform in ±1/√fan_in, circuit angles uniform in [0, π).
    pub fn init<R: Rng + ?Sized>(
        n_qubits: usize,
        reps: usize,
        hidden_mode: HiddenMode,
        input_dim: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let mut p = Self::zeros(n_qubits, reps, hidden_mode, input_dim)?;
        let bound = 1.0 / math::sqrt(p.proj_weights.cols() as f64);
        for w in p.proj_weights.as_mut_slice() {
            *w = uniform(rng, -bound, bound);
        }
        for b in &mut p.proj_bias {
            *b = uniform(rng, -bound, bound);
        }
        for gate in &mut p.vqc {
            for a in gate.iter_mut() {
                *a = uniform(rng, 0.0, PI);
            }
        }
        Ok(p)
    }

    pub fn n_qubits(&self) -> usize {
        self.circuit.n_qubits()
    }

    pub fn reps(&self) -> usize {
        self.reps
    }

    pub fn hidden_mode(&self) -> HiddenMode {
        self.hidden_mode
    }

    pub fn hidden_dim(&self) -> usize {
        self.hidden_mode.hidden_dim(self.n_qubits())
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn circuit(&self) -> &CircuitSpec {
        &self.circuit
    }

    fn measure(&self, state: &Statevector) -> Vec<f64> {
        match self.hidden_mode {
            HiddenMode::Probabilities => {
                let scale = (1usize << self.n_qubits()) as f64;
                state.probabilities().into_iter().map(|p| p * scale).collect()
            }
            HiddenMode::PauliZ => state.pauli_z_expectations(),
        }
    }

    /// Pulls a cotangent on the measured vector back to basis probabilities.
    fn measure_cotangent(&self, dm: &[f64]) -> Vec<f64> {
        let n = self.n_qubits();
        match self.hidden_mode {
            HiddenMode::Probabilities => {
                let scale = (1usize << n) as f64;
                dm.iter().map(|d| d * scale).collect()
            }
            HiddenMode::PauliZ => (0..1usize << n)
                .map(|k| {
                    dm.iter()
                        .enumerate()
                        .map(|(q, d)| if k >> (n - 1 - q) & 1 == 0 { *d } else { -*d })
                        .sum()
                })
                .collect(),
        }
    }
}

impl ParamSet for QlstmCellParams {
    fn visit(&self, f: &mut dyn FnMut(&[f64])) {
        f(self.proj_weights.as_slice());
        f(&self.proj_bias);
        for g in &self.vqc {
            f(g);
        }
    }

    fn visit_mut(&mut self, f: &mut dyn FnMut(&mut [f64])) {
        f(self.proj_weights.as_mut_slice());
        f(&mut self.proj_bias);
        for g in &mut self.vqc {
            f(g);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QlstmState {
    pub h: Vec<f64>,
    pub c: Vec<f64>,
}

impl QlstmState {
    pub fn zeros(hidden_dim: usize) -> Self {
        QlstmState {
            h: vec![0.0; hidden_dim],
            c: vec![0.0; hidden_dim],
        }
    }
}

/// Intermediates of one cell step, consumed by [`cell_backward`].
#[derive(Debug, Clone)]
pub struct CellCache {
    v: Vec<f64>,
    pre: Vec<f64>,
    angles: Vec<f64>,
    /// f, i, u, o after their activations.
    gates: [Vec<f64>; 4],
    c_prev: Vec<f64>,
    tanh_c: Vec<f64>,
}

impl CellCache {
    /// Encoder angles fed to all four circuits.
    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn gate(&self, which: usize) -> &[f64] {
        &self.gates[which]
    }
}

pub fn cell_forward(params: &QlstmCellParams, x: &[f64], state: &QlstmState) -> Result<(QlstmState, CellCache)> {
    let hidden = params.hidden_dim();
    check_len("QLSTM input", params.input_dim, x.len())?;
    check_len("QLSTM hidden state", hidden, state.h.len())?;
    check_len("QLSTM cell state", hidden, state.c.len())?;
    if !math::all_finite(x) {
        return Err(Error::NonFinite("QLSTM input"));
    }
    if !math::all_finite(&state.h) || !math::all_finite(&state.c) {
        return Err(Error::NonFinite("QLSTM state"));
    }

    let mut v = Vec::with_capacity(hidden + x.len());
    v.extend_from_slice(&state.h);
    v.extend_from_slice(x);
    let mut pre = params.proj_weights.matvec(&v)?;
    for (p, b) in pre.iter_mut().zip(&params.proj_bias) {
        *p += b;
    }
    let angles: Vec<f64> = pre.iter().map(|&z| PI * math::tanh(z)).collect();

    let mut gates: [Vec<f64>; 4] = Default::default();
    for (g, out) in gates.iter_mut().enumerate() {
        let state = run(&params.circuit, &params.vqc[g], &angles)?;
        let m = params.measure(&state);
        *out = if g == UPDATE {
            m.into_iter().map(math::tanh).collect()
        } else {
            m.into_iter().map(math::sigmoid).collect()
        };
    }

    let mut c_new = vec![0.0; hidden];
    let mut h_new = vec![0.0; hidden];
    let mut tanh_c = vec![0.0; hidden];
    for k in 0..hidden {
        c_new[k] = gates[FORGET][k] * state.c[k] + gates[INPUT][k] * gates[UPDATE][k];
        tanh_c[k] = math::tanh(c_new[k]);
        h_new[k] = gates[OUTPUT][k] * tanh_c[k];
    }
    let cache = CellCache {
        v,
        pre,
        angles,
        gates,
        c_prev: state.c.clone(),
        tanh_c,
    };
    Ok((QlstmState { h: h_new, c: c_new }, cache))
}

#[derive(Debug, Clone)]
pub struct CellBackward {
    pub grads: QlstmCellParams,
    pub dx: Vec<f64>,
    pub dh_prev: Vec<f64>,
    pub dc_prev: Vec<f64>,
}

/// Reverse-mode step through one cell given upstream `dh'`, `dc'`.
pub fn cell_backward(params: &QlstmCellParams, cache: &CellCache, dh: &[f64], dc: &[f64]) -> Result<CellBackward> {
    let hidden = params.hidden_dim();
    let n = params.n_qubits();
    if cache.v.len() != hidden + params.input_dim
        || cache.angles.len() != n
        || cache.tanh_c.len() != hidden
        || cache.gates.iter().any(|g| g.len() != hidden)
    {
        return Err(Error::StaleCache);
    }
    check_len("upstream dh", hidden, dh.len())?;
    check_len("upstream dc", hidden, dc.len())?;

    let [f, i, u, o] = &cache.gates;
    let mut dm: [Vec<f64>; 4] = [vec![0.0; hidden], vec![0.0; hidden], vec![0.0; hidden], vec![0.0; hidden]];
    let mut dc_prev = vec![0.0; hidden];
    for k in 0..hidden {
        let t = cache.tanh_c[k];
        let d_o = dh[k] * t;
        let dc_total = dc[k] + dh[k] * o[k] * (1.0 - t * t);
        let d_f = dc_total * cache.c_prev[k];
        let d_i = dc_total * u[k];
        let d_u = dc_total * i[k];
        dc_prev[k] = dc_total * f[k];
        dm[FORGET][k] = d_f * f[k] * (1.0 - f[k]);
        dm[INPUT][k] = d_i * i[k] * (1.0 - i[k]);
        dm[UPDATE][k] = d_u * (1.0 - u[k] * u[k]);
        dm[OUTPUT][k] = d_o * o[k] * (1.0 - o[k]);
    }

    let mut grads = zeros_like(params);
    let mut d_angles = vec![0.0; n];
    for g in 0..4 {
        let cot = params.measure_cotangent(&dm[g]);
        let sg = shift_gradient(&params.circuit, &params.vqc[g], &cache.angles, &cot)?;
        grads.vqc[g] = sg.params;
        for (a, d) in d_angles.iter_mut().zip(&sg.inputs) {
            *a += d;
        }
    }

    let dz: Vec<f64> = d_angles
        .iter()
        .zip(&cache.pre)
        .map(|(da, &z)| {
            let t = math::tanh(z);
            da * PI * (1.0 - t * t)
        })
        .collect();
    grads.proj_weights.add_outer(&dz, &cache.v, 1.0)?;
    grads.proj_bias.copy_from_slice(&dz);
    let dv = params.proj_weights.matvec_t(&dz)?;
    let (dh_prev, dx) = dv.split_at(hidden);
    Ok(CellBackward {
        grads,
        dx: dx.to_vec(),
        dh_prev: dh_prev.to_vec(),
        dc_prev,
    })
}

/// Stacked QLSTM layers; layer `l > 0` consumes layer `l-1`'s hidden state.
#[derive(Debug, Clone, PartialEq)]
pub struct QlstmStack {
    pub layers: Vec<QlstmCellParams>,
}

impl QlstmStack {
    pub fn from_layers(layers: Vec<QlstmCellParams>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::config("QLSTM stack needs at least one layer"));
        }
        for pair in layers.windows(2) {
            if pair[1].input_dim() != pair[0].hidden_dim() {
                return Err(Error::config("QLSTM layer input does not match previous hidden size"));
            }
        }
        Ok(QlstmStack { layers })
    }

    pub fn zeros(cfg: &QlstmConfig) -> Result<Self> {
        cfg.validate()?;
        let layers = (0..cfg.layers)
            .map(|l| QlstmCellParams::zeros(cfg.n_qubits, cfg.reps, cfg.hidden_mode, cfg.layer_input_dim(l)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_layers(layers)
    }

    pub fn init<R: Rng + ?Sized>(cfg: &QlstmConfig, rng: &mut R) -> Result<Self> {
        cfg.validate()?;
        let layers = (0..cfg.layers)
            .map(|l| QlstmCellParams::init(cfg.n_qubits, cfg.reps, cfg.hidden_mode, cfg.layer_input_dim(l), rng))
            .collect::<Result<Vec<_>>>()?;
        Self::from_layers(layers)
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].input_dim()
    }

    pub fn hidden_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].hidden_dim()
    }
}

impl ParamSet for QlstmStack {
    fn visit(&self, f: &mut dyn FnMut(&[f64])) {
        for l in &self.layers {
            l.visit(f);
        }
    }

    fn visit_mut(&mut self, f: &mut dyn FnMut(&mut [f64])) {
        for l in &mut self.layers {
            l.visit_mut(f);
        }
    }
}

#[derive(Debug, Clone)]
pub struct StackCache {
    /// `steps[t][l]`
    steps: Vec<Vec<CellCache>>,
}

impl StackCache {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Unrolls the stack over `xs` from zero states; returns the top layer's
/// hidden vector at each step.
pub fn stack_forward(stack: &QlstmStack, xs: &[Vec<f64>]) -> Result<(Vec<Vec<f64>>, StackCache)> {
    let mut states: Vec<QlstmState> = stack.layers.iter().map(|l| QlstmState::zeros(l.hidden_dim())).collect();
    let mut outputs = Vec::with_capacity(xs.len());
    let mut steps = Vec::with_capacity(xs.len());
    for x in xs {
        let mut input = x.clone();
        let mut caches = Vec::with_capacity(stack.layers.len());
        for (layer, state) in stack.layers.iter().zip(states.iter_mut()) {
            let (next, cache) = cell_forward(layer, &input, state)?;
            input = next.h.clone();
            *state = next;
            caches.push(cache);
        }
        outputs.push(input);
        steps.push(caches);
    }
    Ok((outputs, StackCache { steps }))
}

#[derive(Debug, Clone)]
pub struct StackBackward {
    pub grads: QlstmStack,
    pub dxs: Vec<Vec<f64>>,
}

/// Backpropagation through time.
///
/// `d_outputs` may be shorter than the forward sequence; the pass then starts
/// at step `d_outputs.len() - 1`, which is exact because later steps cannot
/// influence earlier outputs.
pub fn stack_backward(stack: &QlstmStack, cache: &StackCache, d_outputs: &[Vec<f64>]) -> Result<StackBackward> {
    if d_outputs.len() > cache.steps.len() {
        return Err(Error::StaleCache);
    }
    if cache.steps.iter().any(|s| s.len() != stack.layers.len()) {
        return Err(Error::StaleCache);
    }
    let depth = stack.layers.len();
    let mut grads = zeros_like(stack);
    let mut dh_next: Vec<Vec<f64>> = stack.layers.iter().map(|l| vec![0.0; l.hidden_dim()]).collect();
    let mut dc_next = dh_next.clone();
    let mut dxs = vec![Vec::new(); d_outputs.len()];

    for t in (0..d_outputs.len()).rev() {
        let mut from_above = d_outputs[t].clone();
        check_len("output cotangent", stack.hidden_dim(), from_above.len())?;
        for l in (0..depth).rev() {
            let dh: Vec<f64> = from_above.iter().zip(&dh_next[l]).map(|(a, b)| a + b).collect();
            let back = cell_backward(&stack.layers[l], &cache.steps[t][l], &dh, &dc_next[l])?;
            grads.layers[l].add_scaled(&back.grads, 1.0)?;
            dh_next[l] = back.dh_prev;
            dc_next[l] = back.dc_prev;
            from_above = back.dx;
        }
        dxs[t] = from_above;
    }
    Ok(StackBackward { grads, dxs })
}
