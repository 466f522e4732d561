//! Piezoelectric-type tensors: order-3 tensors with `a_ijk = a_ikj`.
//!
//! Storage is `n` symmetric slices `A_i = [a_ijk]_{jk}`, each packed by its
//! upper triangle (`j ≤ k`, row-major), so the partial symmetry cannot be
//! violated. Dense views are materialized on demand.

use std::ops::Deref;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{PiezoError, Result};
use crate::linalg::{dot, norm};

/// Tolerance on `| ‖v‖ - 1 |` accepted by [`UnitVector::new`].
pub const UNIT_TOL: f64 = 1e-12;
/// Tolerance on `max |QᵀQ - I|` accepted by [`OrthogonalMatrix::new`].
pub const ORTHO_TOL: f64 = 1e-10;
/// Largest `|a_ijk - a_ikj|` accepted in strict mode.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// How dense input that is not exactly symmetric in `(j, k)` is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SymmetryMode {
    /// Reject input whose worst asymmetry exceeds [`SYMMETRY_TOL`].
    #[default]
    Strict,
    /// Store `(a_ijk + a_ikj) / 2`.
    Symmetrize,
}

/// Worst violation of `a_ijk = a_ikj` in a dense array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Asymmetry {
    pub max_deviation: f64,
    /// Zero-based `(i, j, k)` of the worst entry, with `j < k`.
    pub worst: (usize, usize, usize),
}

/// Number of unique entries in an `n × n` symmetric matrix.
pub fn packed_len(n: usize) -> usize {
    n * (n + 1) / 2
}

#[inline]
fn packed_index(n: usize, j: usize, k: usize) -> usize {
    let (j, k) = if j <= k { (j, k) } else { (k, j) };
    j * (2 * n - j + 1) / 2 + (k - j)
}

#[inline]
fn dense_index(n: usize, i: usize, j: usize, k: usize) -> usize {
    (i * n + j) * n + k
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(PiezoError::DimensionMismatch { expected, found })
    }
}

/// Scan a dense `n³` array for asymmetry in its last two indices.
pub fn dense_asymmetry(n: usize, entries: &[f64]) -> Result<Asymmetry> {
    check_dim(n * n * n, entries.len())?;
    let mut out = Asymmetry {
        max_deviation: 0.0,
        worst: (0, 0, 0),
    };
    for i in 0..n {
        for j in 0..n {
            for k in (j + 1)..n {
                let d = (entries[dense_index(n, i, j, k)] - entries[dense_index(n, i, k, j)]).abs();
                if d > out.max_deviation {
                    out = Asymmetry {
                        max_deviation: d,
                        worst: (i, j, k),
                    };
                }
            }
        }
    }
    Ok(out)
}

/// Order-3, dimension-`n` real tensor symmetric in its last two indices.
#[derive(Debug, Clone, PartialEq)]
pub struct PiezoTensor {
    dim: usize,
    data: Vec<f64>,
}

impl PiezoTensor {
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(PiezoError::ZeroDimension);
        }
        Ok(Self {
            dim,
            data: vec![0.0; dim * packed_len(dim)],
        })
    }

    /// Build from a dense array indexed `entries[(i * n + j) * n + k]`.
    pub fn from_dense(dim: usize, entries: &[f64], mode: SymmetryMode) -> Result<Self> {
        let mut out = Self::zeros(dim)?;
        let asym = dense_asymmetry(dim, entries)?;
        if mode == SymmetryMode::Strict && asym.max_deviation > SYMMETRY_TOL {
            let (i, j, k) = asym.worst;
            return Err(PiezoError::Asymmetric {
                i: i + 1,
                j: j + 1,
                k: k + 1,
                deviation: asym.max_deviation,
            });
        }
        let n = dim;
        for i in 0..n {
            for j in 0..n {
                for k in j..n {
                    let v = 0.5 * (entries[dense_index(n, i, j, k)] + entries[dense_index(n, i, k, j)]);
                    out.data[i * packed_len(n) + packed_index(n, j, k)] = v;
                }
            }
        }
        Ok(out)
    }

    /// Build from zero-based `((i, j, k), value)` entries. Each entry sets
    /// both `a_ijk` and `a_ikj`; later entries overwrite earlier ones.
    pub fn from_entries(dim: usize, entries: &[((usize, usize, usize), f64)]) -> Result<Self> {
        let mut out = Self::zeros(dim)?;
        for &((i, j, k), v) in entries {
            let worst = i.max(j).max(k);
            if worst >= dim {
                return Err(PiezoError::DimensionMismatch {
                    expected: dim,
                    found: worst + 1,
                });
            }
            out.data[i * packed_len(dim) + packed_index(dim, j, k)] = v;
        }
        Ok(out)
    }

    /// Build from `n` symmetric slice matrices `A_i`.
    pub fn from_slices(slices: &[DMatrix<f64>]) -> Result<Self> {
        let n = slices.len();
        let mut out = Self::zeros(n)?;
        for (i, s) in slices.iter().enumerate() {
            check_dim(n, s.nrows())?;
            check_dim(n, s.ncols())?;
            let deviation = crate::linalg::max_asymmetry(s);
            if deviation > SYMMETRY_TOL {
                return Err(PiezoError::AsymmetricMatrix { deviation });
            }
            for j in 0..n {
                for k in j..n {
                    out.data[i * packed_len(n) + packed_index(n, j, k)] = s[(j, k)];
                }
            }
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Zero-based entry `a_ijk`. Panics on out-of-range indices.
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        assert!(i < self.dim && j < self.dim && k < self.dim, "index out of range");
        self.data[i * packed_len(self.dim) + packed_index(self.dim, j, k)]
    }

    /// Packed storage: slice `i` occupies `[i * n(n+1)/2, (i + 1) * n(n+1)/2)`.
    pub fn packed(&self) -> &[f64] {
        &self.data
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out[dense_index(n, i, j, k)] = self.get(i, j, k);
                }
            }
        }
        out
    }

    /// The symmetric matrix `[a_ijk]_{jk}` for a fixed first index.
    pub fn slice(&self, i: usize) -> DMatrix<f64> {
        let n = self.dim;
        DMatrix::from_fn(n, n, |j, k| self.get(i, j, k))
    }

    /// `G(x) = Σ_i x_i A_i`, the symmetric matrix with `y^T G y = x A y y`.
    pub fn weighted_slice_sum(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        check_dim(self.dim, x.len())?;
        Ok(self.weighted_slice_sum_unchecked(x))
    }

    pub(crate) fn weighted_slice_sum_unchecked(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.dim;
        let mut g = DMatrix::zeros(n, n);
        for j in 0..n {
            for k in j..n {
                let v: f64 = (0..n).map(|i| x[i] * self.get(i, j, k)).sum();
                g[(j, k)] = v;
                g[(k, j)] = v;
            }
        }
        g
    }

    /// `(A y y)_i = Σ_{j,k} a_ijk y_j y_k`.
    pub fn contract_yy(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim, y.len())?;
        Ok(self.contract_yy_unchecked(y))
    }

    pub(crate) fn contract_yy_unchecked(&self, y: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let p = packed_len(n);
        (0..n)
            .map(|i| {
                let s = &self.data[i * p..(i + 1) * p];
                let mut acc = 0.0;
                for j in 0..n {
                    let base = packed_index(n, j, j);
                    acc += s[base] * y[j] * y[j];
                    for k in (j + 1)..n {
                        acc += 2.0 * s[base + (k - j)] * y[j] * y[k];
                    }
                }
                acc
            })
            .collect()
    }

    /// `(x A y)_k = Σ_{i,j} x_i a_ijk y_j`.
    pub fn contract_xy(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim, x.len())?;
        check_dim(self.dim, y.len())?;
        Ok(self.contract_xy_unchecked(x, y))
    }

    pub(crate) fn contract_xy_unchecked(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let n = self.dim;
        (0..n)
            .map(|k| {
                let mut acc = 0.0;
                for (i, &xi) in x.iter().enumerate() {
                    if xi == 0.0 {
                        continue;
                    }
                    let row: f64 = (0..n).map(|j| self.get(i, j, k) * y[j]).sum();
                    acc += xi * row;
                }
                acc
            })
            .collect()
    }

    /// `x A y y = Σ a_ijk x_i y_j y_k`.
    pub fn scalar_form(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        check_dim(self.dim, y.len())?;
        Ok(self.scalar_form_unchecked(x, y))
    }

    pub(crate) fn scalar_form_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        dot(x, &self.contract_yy_unchecked(y))
    }

    /// Frobenius norm over all `n³` dense entries.
    pub fn frobenius_norm(&self) -> f64 {
        self.inner_unchecked(self).sqrt()
    }

    /// `⟨A, B⟩ = Σ a_ijk b_ijk` over dense indices.
    pub fn inner(&self, other: &PiezoTensor) -> Result<f64> {
        check_dim(self.dim, other.dim)?;
        Ok(self.inner_unchecked(other))
    }

    fn inner_unchecked(&self, other: &PiezoTensor) -> f64 {
        let n = self.dim;
        let p = packed_len(n);
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in j..n {
                    let idx = i * p + packed_index(n, j, k);
                    let w = if j == k { 1.0 } else { 2.0 };
                    acc += w * self.data[idx] * other.data[idx];
                }
            }
        }
        acc
    }

    pub fn scaled(&self, c: f64) -> PiezoTensor {
        PiezoTensor {
            dim: self.dim,
            data: self.data.iter().map(|v| c * v).collect(),
        }
    }

    /// Entrywise `self + other`.
    pub fn added(&self, other: &PiezoTensor) -> Result<PiezoTensor> {
        check_dim(self.dim, other.dim)?;
        Ok(PiezoTensor {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    /// Largest entrywise difference to `other`.
    pub fn max_abs_diff(&self, other: &PiezoTensor) -> Result<f64> {
        check_dim(self.dim, other.dim)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// `[A Q³]_rst = Σ a_ijk q_ir q_js q_kt`.
    pub fn rotate(&self, q: &OrthogonalMatrix) -> Result<PiezoTensor> {
        let n = self.dim;
        check_dim(n, q.dim())?;
        let q = q.matrix();
        let a = self.to_dense();
        // mode-by-mode: each pass contracts one index with Q
        let mut t1 = vec![0.0; n * n * n];
        for r in 0..n {
            for j in 0..n {
                for k in 0..n {
                    t1[dense_index(n, r, j, k)] = (0..n).map(|i| a[dense_index(n, i, j, k)] * q[(i, r)]).sum();
                }
            }
        }
        let mut t2 = vec![0.0; n * n * n];
        for r in 0..n {
            for s in 0..n {
                for k in 0..n {
                    t2[dense_index(n, r, s, k)] = (0..n).map(|j| t1[dense_index(n, r, j, k)] * q[(j, s)]).sum();
                }
            }
        }
        let mut t3 = vec![0.0; n * n * n];
        for r in 0..n {
            for s in 0..n {
                for t in 0..n {
                    t3[dense_index(n, r, s, t)] = (0..n).map(|k| t2[dense_index(n, r, s, k)] * q[(k, t)]).sum();
                }
            }
        }
        PiezoTensor::from_dense(n, &t3, SymmetryMode::Symmetrize)
    }

    /// `‖A - λ x∘y∘y‖_F` via `‖A‖² - 2λ⟨A, x∘y∘y⟩ + λ²` (unit `x`, `y`).
    pub fn rank1_residual(&self, r: &Rank1PiezoTensor) -> Result<f64> {
        check_dim(self.dim, r.left.dim())?;
        check_dim(self.dim, r.right.dim())?;
        let nrm2 = self.inner_unchecked(self);
        let overlap = self.scalar_form_unchecked(&r.left, &r.right);
        let sq = nrm2 - 2.0 * r.scale * overlap + r.scale * r.scale;
        Ok(sq.max(0.0).sqrt())
    }
}

/// A vector with Euclidean norm 1.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector(Vec<f64>);

impl UnitVector {
    /// Accepts `v` only if `| ‖v‖ - 1 | ≤ 1e-12`.
    pub fn new(v: Vec<f64>) -> Result<Self> {
        if v.is_empty() {
            return Err(PiezoError::ZeroDimension);
        }
        let nrm = norm(&v);
        if (nrm - 1.0).abs() > UNIT_TOL || !nrm.is_finite() {
            return Err(PiezoError::NotUnit { norm: nrm });
        }
        Ok(Self(v))
    }

    pub fn normalize(mut v: Vec<f64>) -> Result<Self> {
        if v.is_empty() {
            return Err(PiezoError::ZeroDimension);
        }
        let nrm = norm(&v);
        if nrm == 0.0 || !nrm.is_finite() {
            return Err(PiezoError::ZeroVector);
        }
        v.iter_mut().for_each(|c| *c /= nrm);
        Ok(Self(v))
    }

    /// Caller guarantees a nonzero finite vector.
    pub(crate) fn normalized_unchecked(mut v: Vec<f64>) -> Self {
        let nrm = norm(&v);
        v.iter_mut().for_each(|c| *c /= nrm);
        Self(v)
    }

    /// `e_i` in dimension `n`.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        Self(v)
    }

    /// Uniformly distributed on the unit sphere.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        loop {
            let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            if norm(&v) > 1e-8 {
                return Self::normalized_unchecked(v);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|c| -c).collect())
    }
}

impl Deref for UnitVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for UnitVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// `λ x∘y∘y` with unit `x`, `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rank1PiezoTensor {
    pub scale: f64,
    pub left: UnitVector,
    pub right: UnitVector,
}

impl Rank1PiezoTensor {
    pub fn new(scale: f64, left: UnitVector, right: UnitVector) -> Result<Self> {
        check_dim(left.dim(), right.dim())?;
        Ok(Self { scale, left, right })
    }

    pub fn materialize(&self) -> PiezoTensor {
        let n = self.left.dim();
        let p = packed_len(n);
        let mut data = vec![0.0; n * p];
        for i in 0..n {
            for j in 0..n {
                for k in j..n {
                    data[i * p + packed_index(n, j, k)] = self.scale * self.left[i] * self.right[j] * self.right[k];
                }
            }
        }
        PiezoTensor { dim: n, data }
    }
}

/// Square matrix with `QᵀQ = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalMatrix(DMatrix<f64>);

impl OrthogonalMatrix {
    pub fn new(q: DMatrix<f64>) -> Result<Self> {
        if q.nrows() == 0 {
            return Err(PiezoError::ZeroDimension);
        }
        check_dim(q.nrows(), q.ncols())?;
        let n = q.nrows();
        let gram = q.transpose() * &q;
        let deviation = (gram - DMatrix::<f64>::identity(n, n)).amax();
        if deviation > ORTHO_TOL {
            return Err(PiezoError::NotOrthogonal { deviation });
        }
        Ok(Self(q))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    /// Orthonormalized Gaussian matrix. The determinant sign is not fixed.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        loop {
            let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
            let qr = g.qr();
            let r = qr.r();
            if (0..n).all(|i| r[(i, i)].abs() > 1e-8) {
                // fix column signs so the factorization is unique
                let mut q = qr.q();
                for c in 0..n {
                    if r[(c, c)] < 0.0 {
                        q.column_mut(c).neg_mut();
                    }
                }
                return Self(q);
            }
        }
    }

    /// Rotation by `angle` in the `(a, b)` coordinate plane.
    pub fn plane_rotation(n: usize, a: usize, b: usize, angle: f64) -> Self {
        let mut q = DMatrix::identity(n, n);
        let (s, c) = angle.sin_cos();
        q[(a, a)] = c;
        q[(b, b)] = c;
        q[(a, b)] = -s;
        q[(b, a)] = s;
        Self(q)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    /// `Q v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n).map(|r| (0..n).map(|c| self.0[(r, c)] * v[c]).sum()).collect()
    }

    /// `Qᵀ v`.
    pub fn apply_transpose(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n).map(|c| (0..n).map(|r| self.0[(r, c)] * v[r]).sum()).collect()
    }
}
