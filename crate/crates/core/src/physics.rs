//! Direct and converse piezoelectric effects.
//!
//! Under a unit uniaxial stress `T = y yᵀ` the polarization is `P = A y y`;
//! an electric field `E` produces the strain `S_jk = Σ_i a_ijk E_i`. Both
//! extremal problems are solved by the largest C-eigenpair.
//!
//! Units follow the input tensor (pC/N for the bundled datasets).

use nalgebra::DMatrix;

use crate::error::{PiezoError, Result};
use crate::linalg::{max_asymmetry, norm, sym_eigen_sorted};
use crate::solver::{largest, SolverConfig};
use crate::tensor::{PiezoTensor, UnitVector};

/// Symmetry tolerance for [`StrainMatrix::new`].
pub const STRAIN_SYMMETRY_TOL: f64 = 1e-12;

/// Axis of a unit uniaxial stress `T = y yᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct StressDirection(pub UnitVector);

/// Unit electric field.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldVector(pub UnitVector);

#[derive(Debug, Clone, PartialEq)]
pub struct StrainMatrix(DMatrix<f64>);

impl StrainMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(PiezoError::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let deviation = max_asymmetry(&m);
        if deviation > STRAIN_SYMMETRY_TOL {
            return Err(PiezoError::AsymmetricMatrix { deviation });
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }
}

/// Both readings of `‖S‖₂`: the largest eigenvalue (`max yᵀ S y`) and the
/// largest eigenvalue magnitude (the operator norm).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralNorm {
    pub max_eigenvalue: f64,
    pub max_abs_eigenvalue: f64,
}

pub fn spectral_norm(s: &StrainMatrix) -> SpectralNorm {
    let (values, _) = sym_eigen_sorted(&s.0);
    let lo = values[0];
    let hi = values[values.len() - 1];
    SpectralNorm {
        max_eigenvalue: hi,
        max_abs_eigenvalue: hi.abs().max(lo.abs()),
    }
}

fn check(a: &PiezoTensor, v: &UnitVector) -> Result<()> {
    if a.dim() != v.dim() {
        return Err(PiezoError::DimensionMismatch {
            expected: a.dim(),
            found: v.dim(),
        });
    }
    Ok(())
}

/// `P = A y y`.
pub fn polarization(a: &PiezoTensor, t: &StressDirection) -> Result<Vec<f64>> {
    check(a, &t.0)?;
    a.contract_yy(&t.0)
}

/// `S_jk = Σ_i e_i a_ijk`.
pub fn strain(a: &PiezoTensor, e: &FieldVector) -> Result<StrainMatrix> {
    check(a, &e.0)?;
    Ok(StrainMatrix(a.weighted_slice_sum(&e.0)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxPolarization {
    pub norm: f64,
    pub direction: UnitVector,
}

/// Largest `‖P‖₂` over unit uniaxial stresses and the stress axis attaining it.
pub fn max_polarization(a: &PiezoTensor, cfg: &SolverConfig) -> Result<MaxPolarization> {
    let top = largest(a, cfg)?;
    debug_assert!((norm(&a.contract_yy(&top.right)?) - top.value).abs() <= 1e-8 * top.value.max(1.0));
    Ok(MaxPolarization {
        norm: top.value,
        direction: top.right,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxStrain {
    pub norm: f64,
    pub field: UnitVector,
    /// Unit `y` with `yᵀ S y` equal to `norm`.
    pub direction: UnitVector,
}

/// Largest `max_y yᵀ S y` over unit fields.
pub fn max_strain_spectral_norm(a: &PiezoTensor, cfg: &SolverConfig) -> Result<MaxStrain> {
    let top = largest(a, cfg)?;
    Ok(MaxStrain {
        norm: top.value,
        field: top.left,
        direction: top.right,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn banio3() -> PiezoTensor {
        PiezoTensor::from_entries(
            3,
            &[
                ((0, 0, 2), 0.038385),
                ((1, 1, 2), 0.038385),
                ((2, 0, 0), 6.89822),
                ((2, 1, 1), 6.89822),
                ((2, 2, 2), 27.4628),
            ],
        )
        .unwrap()
    }

    fn e(i: usize) -> UnitVector {
        UnitVector::basis(3, i)
    }

    #[test]
    fn polarization_examples() {
        let p = polarization(&banio3(), &StressDirection(e(2))).unwrap();
        assert_eq!(p, vec![0.0, 0.0, 27.4628]);
        let z = PiezoTensor::zeros(3).unwrap();
        assert_eq!(polarization(&z, &StressDirection(e(1))).unwrap(), vec![0.0; 3]);
        assert!(polarization(&z, &StressDirection(UnitVector::basis(2, 0))).is_err());
    }

    #[test]
    fn strain_examples() {
        let a1 = PiezoTensor::from_entries(3, &[((0, 1, 2), -1.0), ((1, 0, 2), -1.0), ((2, 0, 1), -1.0)]).unwrap();
        let s = strain(&a1, &FieldVector(UnitVector::new(vec![0.0, 0.0, -1.0]).unwrap())).unwrap();
        let expect = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(s.matrix(), &expect);

        let s = strain(&banio3(), &FieldVector(e(2))).unwrap();
        assert_eq!(
            s.matrix(),
            &DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![6.89822, 6.89822, 27.4628]))
        );

        let z = PiezoTensor::zeros(3).unwrap();
        assert_eq!(strain(&z, &FieldVector(e(0))).unwrap().matrix(), &DMatrix::zeros(3, 3));
    }

    #[test]
    fn spectral_norm_examples() {
        let n = spectral_norm(&StrainMatrix::new(DMatrix::identity(3, 3)).unwrap());
        assert!((n.max_eigenvalue - 1.0).abs() < 1e-15);
        let d = StrainMatrix::new(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            6.89822, 6.89822, 27.4628,
        ])))
        .unwrap();
        assert!((spectral_norm(&d).max_eigenvalue - 27.4628).abs() < 1e-13);
        let off = StrainMatrix::new(DMatrix::from_row_slice(
            3,
            3,
            &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        ))
        .unwrap();
        let n = spectral_norm(&off);
        assert!((n.max_eigenvalue - 1.0).abs() < 1e-14);
        assert!((n.max_abs_eigenvalue - 1.0).abs() < 1e-14);
        let neg = StrainMatrix::new(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-3.0, 1.0]))).unwrap();
        let n = spectral_norm(&neg);
        assert_eq!((n.max_eigenvalue, n.max_abs_eigenvalue), (1.0, 3.0));
        assert!(StrainMatrix::new(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn maxima_on_banio3_and_zero() {
        let cfg = SolverConfig::default();
        let m = max_strain_spectral_norm(&banio3(), &cfg).unwrap();
        assert!((m.norm - 27.4628).abs() < 1e-10);
        assert!((m.field[2].abs() - 1.0).abs() < 1e-10);
        let z = PiezoTensor::zeros(3).unwrap();
        assert_eq!(max_polarization(&z, &cfg).unwrap().norm, 0.0);
        assert_eq!(max_strain_spectral_norm(&z, &cfg).unwrap().norm, 0.0);
    }
}
