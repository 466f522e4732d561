//! Small dense helpers shared by the solver, the unfolding and the physics
//! front-ends. Everything here works on tiny matrices (n ≤ 6 in practice).

use nalgebra::{DMatrix, SymmetricEigen};

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..m.nrows() {
        for k in (j + 1)..m.ncols() {
            worst = worst.max((m[(j, k)] - m[(k, j)]).abs());
        }
    }
    worst
}

/// Eigenvalues of a symmetric matrix sorted ascending, with matching
/// eigenvector columns.
pub(crate) fn sym_eigen_sorted(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Eigenpair of largest magnitude. A tie between `+μ` and `-μ` resolves to
/// the positive one.
pub(crate) fn dominant_eigenpair(m: &DMatrix<f64>) -> (f64, Vec<f64>) {
    let (values, vectors) = sym_eigen_sorted(m);
    let n = values.len();
    let (lo, hi) = (values[0], values[n - 1]);
    let idx = if hi >= -lo { n - 1 } else { 0 };
    (values[idx], vectors.column(idx).iter().copied().collect())
}

/// Flip `v` so that its first component with magnitude above `tol` is
/// positive. Returns whether a flip happened.
pub(crate) fn orient(v: &mut [f64], tol: f64) -> bool {
    match v.iter().find(|c| c.abs() > tol) {
        Some(&c) if c < 0.0 => {
            v.iter_mut().for_each(|c| *c = -*c);
            true
        }
        _ => false,
    }
}
