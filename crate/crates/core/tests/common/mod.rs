#![allow(dead_code)]

use nalgebra::{Complex, DMatrix, DVector};
use qgan_core::params::ParamSet;
use qgan_core::qsim::{Angle, CircuitSpec, GateKind, GateOp};
use qgan_core::rng::{substream, uniform, StreamRng};

pub fn rng(seed: u64) -> StreamRng {
    substream(seed, "test", 0)
}

pub fn rand_vec(rng: &mut StreamRng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| uniform(rng, lo, hi)).collect()
}

/// `|a − b| / max(|a|, |b|, floor)`; the floor keeps near-zero components
/// from dominating.
pub fn rel_err(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

pub fn assert_rel_close(what: &str, analytic: &[f64], numeric: &[f64], tol: f64) {
    assert_eq!(analytic.len(), numeric.len(), "{what}: length mismatch");
    for (j, (a, n)) in analytic.iter().zip(numeric).enumerate() {
        let e = rel_err(*a, *n, 1e-3);
        assert!(e <= tol, "{what}[{j}]: analytic {a:e} vs numeric {n:e} (rel {e:e})");
    }
}

pub fn central_diff(x: &[f64], h: f64, mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
    let mut x = x.to_vec();
    (0..x.len())
        .map(|j| {
            let orig = x[j];
            x[j] = orig + h;
            let plus = f(&x);
            x[j] = orig - h;
            let minus = f(&x);
            x[j] = orig;
            (plus - minus) / (2.0 * h)
        })
        .collect()
}

/// Central differences of `loss` over every parameter of `p`, in declared
/// order.
pub fn param_diff<P: ParamSet + Clone>(p: &P, h: f64, mut loss: impl FnMut(&P) -> f64) -> Vec<f64> {
    let flat = p.to_flat();
    let mut probe = p.clone();
    central_diff(&flat, h, |x| {
        probe.load_flat(x).unwrap();
        loss(&probe)
    })
}

type C = Complex<f64>;

fn single_qubit(kind: GateKind, theta: f64) -> DMatrix<C> {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let z = C::new(0.0, 0.0);
    match kind {
        GateKind::Rx => DMatrix::from_row_slice(2, 2, &[C::new(c, 0.0), C::new(0.0, -s), C::new(0.0, -s), C::new(c, 0.0)]),
        GateKind::Ry => DMatrix::from_row_slice(2, 2, &[C::new(c, 0.0), C::new(-s, 0.0), C::new(s, 0.0), C::new(c, 0.0)]),
        GateKind::Rz => DMatrix::from_row_slice(2, 2, &[C::new(c, -s), z, z, C::new(c, s)]),
        GateKind::Cx => unreachable!(),
    }
}

/// Full `2^n × 2^n` unitary, qubit 0 as the leftmost Kronecker factor.
pub fn dense_unitary(n: usize, g: &GateOp, theta: f64) -> DMatrix<C> {
    let dim = 1 << n;
    if g.kind == GateKind::Cx {
        let ctrl = g.control.unwrap();
        let mut u = DMatrix::zeros(dim, dim);
        for k in 0..dim {
            let bit = |q: usize| (k >> (n - 1 - q)) & 1;
            let out = if bit(ctrl) == 1 { k ^ (1 << (n - 1 - g.target)) } else { k };
            u[(out, k)] = C::new(1.0, 0.0);
        }
        return u;
    }
    let mut u = DMatrix::from_element(1, 1, C::new(1.0, 0.0));
    for q in 0..n {
        let f = if q == g.target { single_qubit(g.kind, theta) } else { DMatrix::identity(2, 2) };
        u = u.kronecker(&f);
    }
    u
}

pub fn oracle_run(c: &CircuitSpec, params: &[f64], inputs: &[f64]) -> DVector<C> {
    let n = c.n_qubits();
    let mut psi = DVector::from_element(1 << n, C::new(0.0, 0.0));
    psi[0] = C::new(1.0, 0.0);
    for g in c.gates() {
        let theta = match g.angle {
            Some(Angle::Param(j)) => params[j],
            Some(Angle::Input(j)) => inputs[j],
            Some(Angle::Fixed(t)) => t,
            None => 0.0,
        };
        psi = dense_unitary(n, g, theta) * psi;
    }
    psi
}


pub fn oracle_probs(c: &CircuitSpec, params: &[f64], inputs: &[f64]) -> Vec<f64> {
    oracle_run(c, params, inputs).iter().map(|a| a.norm_sqr()).collect()
}
