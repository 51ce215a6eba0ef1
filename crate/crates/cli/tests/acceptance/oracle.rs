//! Independent reference computations in nalgebra.

use nalgebra::{Complex, DMatrix, DVector};
use qgan_core::linalg::Matrix;
use qgan_core::qsim::{Angle, CircuitSpec, GateKind, GateOp};

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

/// Full unitary with qubit 0 as the leftmost Kronecker factor.
fn dense_unitary(n: usize, g: &GateOp, theta: f64) -> DMatrix<C> {
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

pub fn run_dense(c: &CircuitSpec, params: &[f64], inputs: &[f64]) -> Vec<C> {
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
    psi.iter().copied().collect()
}

fn to_na(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

/// Matrix square root by Denman–Beavers iteration.
fn denman_beavers(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = DMatrix::<f64>::identity(n, n);
    for _ in 0..100 {
        let yi = y.clone().try_inverse().unwrap();
        let zi = z.clone().try_inverse().unwrap();
        let y_next = (&y + zi) * 0.5;
        z = (&z + yi) * 0.5;
        let delta = (&y_next - &y).norm();
        y = y_next;
        if delta < 1e-15 {
            break;
        }
    }
    y
}

pub fn frechet(a: &Matrix, b: &Matrix) -> f64 {
    let stats = |m: &Matrix| {
        let x = to_na(m);
        let mu = x.row_mean();
        let centered = DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)] - mu[j]);
        let cov = centered.transpose() * centered / (x.nrows() as f64 - 1.0);
        (mu, cov)
    };
    let (ma, ca) = stats(a);
    let (mb, cb) = stats(b);
    let root = denman_beavers(&(&ca * &cb));
    (ma - mb).norm_squared() + (ca + cb - root * 2.0).trace()
}
