//! Small dense eigenproblems for the projected matrices.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct DenseEig {
    pub values: Vec<C64>,
    /// Right eigenvectors, unit 2-norm columns, in the order of `values`.
    pub vectors: DMatrix<C64>,
    /// Unitary Schur vectors Z with M = Z T Z*.
    pub schur_vectors: DMatrix<C64>,
    pub schur_form: DMatrix<C64>,
}

pub fn frobenius(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// ||M - M*|| / ||M|| in the Frobenius norm; zero for the zero matrix.
pub fn hermitian_defect(m: &DMatrix<C64>) -> f64 {
    let n = frobenius(m);
    if n == 0.0 {
        return 0.0;
    }
    frobenius(&(m - m.adjoint())) / n
}

fn eigvecs_of_triangular(t: &DMatrix<C64>) -> DMatrix<C64> {
    let n = t.nrows();
    let tiny = f64::EPSILON * frobenius(t).max(f64::MIN_POSITIVE);
    let mut y = DMatrix::<C64>::zeros(n, n);
    for k in 0..n {
        let lam = t[(k, k)];
        y[(k, k)] = C64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let mut s = C64::new(0.0, 0.0);
            for l in j + 1..=k {
                s += t[(j, l)] * y[(l, k)];
            }
            let mut d = t[(j, j)] - lam;
            if d.norm() < tiny {
                d = C64::new(tiny, 0.0);
            }
            y[(j, k)] = -s / d;
        }
    }
    y
}

fn normalize_columns(x: &mut DMatrix<C64>) {
    for mut c in x.column_iter_mut() {
        let n = c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if n > 0.0 {
            c /= C64::new(n, 0.0);
        }
    }
}

/// Eigenvalues, eigenvectors and Schur vectors of a small square matrix.
/// With `hermitian` set, the Hermitian part is diagonalized directly.
pub fn dense_eig(m: &DMatrix<C64>, hermitian: bool) -> Result<DenseEig> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::Invalid("dense_eig needs a square matrix".into()));
    }
    if n == 0 {
        return Ok(DenseEig {
            values: Vec::new(),
            vectors: DMatrix::zeros(0, 0),
            schur_vectors: DMatrix::zeros(0, 0),
            schur_form: DMatrix::zeros(0, 0),
        });
    }
    if m.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Invalid("dense_eig: non-finite entries".into()));
    }
    if hermitian {
        let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
        let eig = h.symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let values: Vec<C64> = order.iter().map(|&i| C64::new(eig.eigenvalues[i], 0.0)).collect();
        let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        let schur_form = DMatrix::from_fn(n, n, |i, j| if i == j { values[i] } else { C64::new(0.0, 0.0) });
        return Ok(DenseEig {
            values,
            schur_vectors: vectors.clone(),
            vectors,
            schur_form,
        });
    }
    let schur = m.clone().schur();
    let (z, t) = schur.unpack();
    let y = eigvecs_of_triangular(&t);
    let mut x = &z * y;
    normalize_columns(&mut x);
    let values: Vec<C64> = (0..n).map(|k| t[(k, k)]).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].re.total_cmp(&values[j].re).then(values[i].im.total_cmp(&values[j].im)));
    Ok(DenseEig {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors: DMatrix::from_fn(n, n, |i, j| x[(i, order[j])]),
        schur_vectors: z,
        schur_form: t,
    })
}

/// kappa_i = ||x_i|| ||y_i|| / |y_i x_i| with y_i the rows of X^{-1}.
pub fn eigenvector_conditions(x: &DMatrix<C64>) -> Vec<f64> {
    let n = x.ncols();
    match x.clone().try_inverse() {
        None => vec![f64::INFINITY; n],
        Some(inv) => (0..n)
            .map(|i| {
                let xn = x.column(i).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
                let yn = inv.row(i).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
                xn * yn
            })
            .collect(),
    }
}

/// Solves B^{-1} L for the projected pencil.
pub fn pencil_matrix(l: &DMatrix<C64>, b: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    b.clone()
        .lu()
        .solve(l)
        .ok_or_else(|| Error::Invalid("projected pencil matrix is singular".into()))
}
