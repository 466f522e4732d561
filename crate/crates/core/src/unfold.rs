//! Matrix unfolding `M(A)`: row `i` is the isometric vectorization of the
//! symmetric slice `A_i`, so that `A y y = M(A) vec(y yᵀ)`.
//!
//! `vec(S) = (s_11, …, s_nn, √2 s_(n-1)n, …, √2 s_12)`: diagonals first, then
//! the off-diagonal pairs `j < k` by descending `j`, then descending `k`. For
//! `n = 3` the off-diagonal order is Voigt's (23, 13, 12).

use nalgebra::DMatrix;

use crate::error::{PiezoError, Result};
use crate::linalg::{max_asymmetry, sym_eigen_sorted};
use crate::solver::{largest, SolverConfig};
use crate::tensor::{packed_len, PiezoTensor};

/// Largest accepted `|s_jk - s_kj|` in [`vec_sym`].
pub const VEC_SYM_TOL: f64 = 1e-10;
/// `λ* ≤ μ*` is asserted with this slack.
pub const GAP_SLACK: f64 = 1e-8;
/// Gaps above this are reported as strict.
pub const STRICT_GAP: f64 = 1e-6;

/// Off-diagonal `(j, k)` index pairs in column order.
pub fn offdiag_order(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for j in (0..n).rev() {
        for k in ((j + 1)..n).rev() {
            out.push((j, k));
        }
    }
    out
}

pub fn vec_sym(s: &DMatrix<f64>) -> Result<Vec<f64>> {
    if s.nrows() != s.ncols() {
        return Err(PiezoError::DimensionMismatch {
            expected: s.nrows(),
            found: s.ncols(),
        });
    }
    let deviation = max_asymmetry(s);
    if deviation > VEC_SYM_TOL {
        return Err(PiezoError::AsymmetricMatrix { deviation });
    }
    let n = s.nrows();
    let mut out: Vec<f64> = (0..n).map(|j| s[(j, j)]).collect();
    let r2 = std::f64::consts::SQRT_2;
    out.extend(offdiag_order(n).into_iter().map(|(j, k)| r2 * s[(j, k)]));
    Ok(out)
}

/// The `n × n(n+1)/2` unfolding of a tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct UnfoldMatrix(DMatrix<f64>);

impl UnfoldMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    /// `M v`.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols() {
            return Err(PiezoError::DimensionMismatch {
                expected: self.cols(),
                found: v.len(),
            });
        }
        Ok((0..self.rows())
            .map(|r| (0..self.cols()).map(|c| self.0[(r, c)] * v[c]).sum())
            .collect())
    }
}

pub fn unfold(a: &PiezoTensor) -> UnfoldMatrix {
    let n = a.dim();
    let offdiag = offdiag_order(n);
    let r2 = std::f64::consts::SQRT_2;
    let m = DMatrix::from_fn(n, packed_len(n), |i, c| {
        if c < n {
            a.get(i, c, c)
        } else {
            let (j, k) = offdiag[c - n];
            r2 * a.get(i, j, k)
        }
    });
    UnfoldMatrix(m)
}

/// `μ*`, the spectral norm of `M`, from the largest eigenvalue of the
/// `n × n` Gram matrix `M Mᵀ`.
pub fn largest_singular_value(m: &UnfoldMatrix) -> f64 {
    let gram = &m.0 * m.0.transpose();
    let (values, _) = sym_eigen_sorted(&gram);
    values.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonReport {
    pub lambda_star: f64,
    pub mu_star: f64,
    /// `μ* - λ*`.
    pub gap: f64,
    pub strict: bool,
}

/// Largest C-eigenvalue against the largest singular value of `M(A)`.
pub fn compare(a: &PiezoTensor, cfg: &SolverConfig) -> Result<ComparisonReport> {
    let lambda_star = largest(a, cfg)?.value;
    let mu_star = largest_singular_value(&unfold(a));
    let gap = mu_star - lambda_star;
    if gap < -GAP_SLACK {
        return Err(PiezoError::GapViolation { lambda_star, mu_star });
    }
    Ok(ComparisonReport {
        lambda_star,
        mu_star,
        gap,
        strict: gap > STRICT_GAP,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{Rank1PiezoTensor, UnitVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn a0() -> PiezoTensor {
        PiezoTensor::from_entries(2, &[((0, 0, 1), 1.0), ((1, 1, 1), 1.0)]).unwrap()
    }

    fn random_tensor(n: usize, rng: &mut ChaCha8Rng) -> PiezoTensor {
        let mut entries = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in j..n {
                    entries.push(((i, j, k), rng.sample(StandardNormal)));
                }
            }
        }
        PiezoTensor::from_entries(n, &entries).unwrap()
    }

    /// Power iteration on MᵀM, independent of the Gram eigen route.
    fn power_sigma(m: &DMatrix<f64>) -> f64 {
        let mtm = m.transpose() * m;
        let mut v = nalgebra::DVector::from_element(m.ncols(), 1.0);
        v[0] += 0.37;
        let mut sigma2 = 0.0;
        for _ in 0..5000 {
            let w = &mtm * &v;
            let nw = w.norm();
            if nw == 0.0 {
                return 0.0;
            }
            sigma2 = nw / v.norm();
            v = w / nw;
        }
        sigma2.sqrt()
    }

    #[test]
    fn column_order() {
        assert_eq!(offdiag_order(3), vec![(1, 2), (0, 2), (0, 1)]);
        assert_eq!(offdiag_order(2), vec![(0, 1)]);
        assert!(offdiag_order(1).is_empty());
    }

    #[test]
    fn vec_sym_examples() {
        assert_eq!(
            vec_sym(&DMatrix::identity(3, 3)).unwrap(),
            vec![1.0, 1.0, 1.0, 0.0, 0.0, 0.0]
        );
        let y = nalgebra::DVector::from_element(3, 1.0 / 3f64.sqrt());
        let v = vec_sym(&(&y * y.transpose())).unwrap();
        let r2 = std::f64::consts::SQRT_2;
        for (got, want) in v
            .iter()
            .zip([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, r2 / 3.0, r2 / 3.0, r2 / 3.0])
        {
            assert!((got - want).abs() < 1e-15);
        }
        assert!((v.iter().map(|c| c * c).sum::<f64>() - 1.0).abs() < 1e-15);
        let s = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert_eq!(vec_sym(&s).unwrap(), vec![0.0, 0.0, r2]);
        let bad = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.5, 0.0]);
        assert!(matches!(vec_sym(&bad), Err(PiezoError::AsymmetricMatrix { .. })));
    }

    #[test]
    fn unfold_examples() {
        let r2 = std::f64::consts::SQRT_2;
        let m = unfold(&a0());
        assert_eq!(
            m.matrix(),
            &DMatrix::from_row_slice(2, 3, &[0.0, 0.0, r2, 0.0, 1.0, 0.0])
        );
        assert_eq!(unfold(&PiezoTensor::zeros(3).unwrap()).matrix(), &DMatrix::zeros(3, 6));

        let a1 = PiezoTensor::from_entries(3, &[((0, 1, 2), -1.0), ((1, 0, 2), -1.0), ((2, 0, 1), -1.0)]).unwrap();
        let m = unfold(&a1);
        let expect = DMatrix::from_row_slice(
            3,
            6,
            &[
                0.0, 0.0, 0.0, -r2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -r2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -r2,
            ],
        );
        assert!((m.matrix() - expect).amax() < 1e-15);
    }

    #[test]
    fn singular_value_examples() {
        let mu = largest_singular_value(&unfold(&a0()));
        assert!((mu - std::f64::consts::SQRT_2).abs() < 1e-14);
        assert_eq!(largest_singular_value(&unfold(&PiezoTensor::zeros(3).unwrap())), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let m = unfold(&random_tensor(3, &mut rng));
            let a = largest_singular_value(&m);
            let b = power_sigma(m.matrix());
            assert!((a - b).abs() <= 1e-9 * b, "{a} vs {b}");
        }
    }

    #[test]
    fn compare_a0_is_strict() {
        let r = compare(&a0(), &SolverConfig::default()).unwrap();
        assert!((r.lambda_star - 2.0 / 3f64.sqrt()).abs() < 1e-10);
        assert!((r.mu_star - std::f64::consts::SQRT_2).abs() < 1e-10);
        assert!(r.strict);
    }

    #[test]
    fn compare_rank_one_is_tight() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let r1 = Rank1PiezoTensor::new(1.0, UnitVector::random(3, &mut rng), UnitVector::random(3, &mut rng)).unwrap();
        let r = compare(&r1.materialize(), &SolverConfig::default()).unwrap();
        assert!((r.lambda_star - 1.0).abs() < 1e-10);
        assert!((r.mu_star - 1.0).abs() < 1e-10);
        assert!(!r.strict);
    }

    #[test]
    fn isometry_and_factorization() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for trial in 0..100 {
            let n = 1 + trial % 5;
            let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
            let s = &g + g.transpose();
            let v = vec_sym(&s).unwrap();
            let vn = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            assert!((vn - s.norm()).abs() <= 1e-12 * s.norm().max(1e-300));

            let a = random_tensor(n, &mut rng);
            let m = unfold(&a);
            assert!((m.frobenius_norm() - a.frobenius_norm()).abs() <= 1e-12 * a.frobenius_norm());
            let y = UnitVector::random(n, &mut rng);
            let yv = nalgebra::DVector::from_column_slice(&y);
            let lhs = a.contract_yy(&y).unwrap();
            let rhs = m.apply(&vec_sym(&(&yv * yv.transpose())).unwrap()).unwrap();
            for (p, q) in lhs.iter().zip(&rhs) {
                assert!((p - q).abs() < 1e-12 * (1.0 + p.abs()));
            }
        }
    }
}
