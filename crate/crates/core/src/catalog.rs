//! Point-group coefficient patterns, bundled material tensors, and the
//! closed-form spectrum of the cubic tensor `A(α)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{PiezoError, Result};
use crate::io::read_tensor;
use crate::solver::{canonicalize, spectrum_order, CEigenPair, EigenSpectrum, PairDiagnostics};
use crate::tensor::{PiezoTensor, SymmetryMode, UnitVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointGroup {
    /// 23 and -43m: `a_123 = a_213 = a_312 = -α`.
    Cubic23OrM43m,
    Trigonal32,
    /// -4.
    TetragonalM4,
    Trigonal3m,
    OrthorhombicMm2,
    Monoclinic2,
    Triclinic1,
    Hexagonal6,
}

impl PointGroup {
    pub const ALL: [PointGroup; 8] = [
        PointGroup::Cubic23OrM43m,
        PointGroup::Trigonal32,
        PointGroup::TetragonalM4,
        PointGroup::Trigonal3m,
        PointGroup::OrthorhombicMm2,
        PointGroup::Monoclinic2,
        PointGroup::Triclinic1,
        PointGroup::Hexagonal6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PointGroup::Cubic23OrM43m => "cubic_23_or_m43m",
            PointGroup::Trigonal32 => "trigonal_32",
            PointGroup::TetragonalM4 => "tetragonal_m4",
            PointGroup::Trigonal3m => "trigonal_3m",
            PointGroup::OrthorhombicMm2 => "orthorhombic_mm2",
            PointGroup::Monoclinic2 => "monoclinic_2",
            PointGroup::Triclinic1 => "triclinic_1",
            PointGroup::Hexagonal6 => "hexagonal_6",
        }
    }

    pub fn param_count(self) -> usize {
        match self {
            PointGroup::Cubic23OrM43m => 1,
            PointGroup::Trigonal32 => 2,
            PointGroup::TetragonalM4 => 4,
            PointGroup::Trigonal3m => 4,
            PointGroup::OrthorhombicMm2 => 5,
            PointGroup::Monoclinic2 => 8,
            PointGroup::Triclinic1 => 18,
            PointGroup::Hexagonal6 => 3,
        }
    }

    /// One-based `(i, j, k, coefficient, parameter)` entries: `a_ijk =
    /// coefficient · params[parameter]`.
    fn pattern(self) -> &'static [(usize, usize, usize, f64, usize)] {
        match self {
            PointGroup::Cubic23OrM43m => &[(1, 2, 3, -1.0, 0), (2, 1, 3, -1.0, 0), (3, 1, 2, -1.0, 0)],
            PointGroup::Trigonal32 => &[
                (1, 1, 1, 1.0, 0),
                (1, 2, 2, -1.0, 0),
                (2, 1, 2, -1.0, 0),
                (1, 2, 3, 1.0, 1),
                (2, 1, 3, -1.0, 1),
            ],
            PointGroup::TetragonalM4 => &[
                (1, 2, 3, 1.0, 0),
                (2, 1, 3, 1.0, 0),
                (1, 1, 3, 1.0, 1),
                (2, 2, 3, -1.0, 1),
                (3, 1, 1, 1.0, 2),
                (3, 2, 2, -1.0, 2),
                (3, 1, 2, 1.0, 3),
            ],
            // a_222 = -a_112 = -a_211; the shear term sits in slice 1
            PointGroup::Trigonal3m => &[
                (1, 1, 3, 1.0, 0),
                (2, 2, 3, 1.0, 0),
                (2, 2, 2, 1.0, 1),
                (1, 1, 2, -1.0, 1),
                (2, 1, 1, -1.0, 1),
                (3, 1, 1, 1.0, 2),
                (3, 2, 2, 1.0, 2),
                (3, 3, 3, 1.0, 3),
            ],
            PointGroup::OrthorhombicMm2 => &[
                (1, 1, 3, 1.0, 0),
                (2, 2, 3, 1.0, 1),
                (3, 1, 1, 1.0, 2),
                (3, 2, 2, 1.0, 3),
                (3, 3, 3, 1.0, 4),
            ],
            PointGroup::Monoclinic2 => &[
                (1, 2, 3, 1.0, 0),
                (1, 1, 2, 1.0, 1),
                (2, 1, 1, 1.0, 2),
                (2, 2, 2, 1.0, 3),
                (2, 3, 3, 1.0, 4),
                (2, 1, 3, 1.0, 5),
                (3, 2, 3, 1.0, 6),
                (3, 1, 2, 1.0, 7),
            ],
            PointGroup::Triclinic1 => &[
                (1, 1, 1, 1.0, 0),
                (1, 2, 2, 1.0, 1),
                (1, 3, 3, 1.0, 2),
                (1, 2, 3, 1.0, 3),
                (1, 1, 3, 1.0, 4),
                (1, 1, 2, 1.0, 5),
                (2, 1, 1, 1.0, 6),
                (2, 2, 2, 1.0, 7),
                (2, 3, 3, 1.0, 8),
                (2, 2, 3, 1.0, 9),
                (2, 1, 3, 1.0, 10),
                (2, 1, 2, 1.0, 11),
                (3, 1, 1, 1.0, 12),
                (3, 2, 2, 1.0, 13),
                (3, 3, 3, 1.0, 14),
                (3, 2, 3, 1.0, 15),
                (3, 1, 3, 1.0, 16),
                (3, 1, 2, 1.0, 17),
            ],
            PointGroup::Hexagonal6 => &[
                (1, 1, 3, 1.0, 0),
                (2, 2, 3, 1.0, 0),
                (3, 1, 1, 1.0, 1),
                (3, 2, 2, 1.0, 1),
                (3, 3, 3, 1.0, 2),
            ],
        }
    }
}

impl fmt::Display for PointGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PointGroup {
    type Err = PiezoError;

    fn from_str(s: &str) -> Result<Self> {
        PointGroup::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| PiezoError::UnknownPointGroup(s.to_string()))
    }
}

/// A point group with its free parameters, in the group's listing order.
#[derive(Debug, Clone, PartialEq)]
pub struct CrystalSpec {
    point_group: PointGroup,
    params: Vec<f64>,
}

impl CrystalSpec {
    pub fn new(point_group: PointGroup, params: Vec<f64>) -> Result<Self> {
        if params.len() != point_group.param_count() {
            return Err(PiezoError::ParamCount {
                group: point_group.name(),
                expected: point_group.param_count(),
                found: params.len(),
            });
        }
        Ok(Self { point_group, params })
    }

    pub fn point_group(&self) -> PointGroup {
        self.point_group
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }
}

pub fn build(spec: &CrystalSpec) -> Result<PiezoTensor> {
    let entries: Vec<_> = spec
        .point_group
        .pattern()
        .iter()
        .map(|&(i, j, k, c, p)| ((i - 1, j - 1, k - 1), c * spec.params[p]))
        .collect();
    PiezoTensor::from_entries(3, &entries)
}

/// A measured material tensor (pC/N).
#[derive(Debug, Clone, PartialEq)]
pub struct NamedDataset {
    pub name: &'static str,
    pub point_group: PointGroup,
    pub tensor: PiezoTensor,
}

struct Bundled {
    name: &'static str,
    point_group: PointGroup,
    text: &'static str,
}

const BUNDLED: [Bundled; 8] = [
    Bundled {
        name: "VFeSb",
        point_group: PointGroup::Cubic23OrM43m,
        text: include_str!("../data/VFeSb.pz"),
    },
    Bundled {
        name: "SiO2",
        point_group: PointGroup::Trigonal32,
        text: include_str!("../data/SiO2.pz"),
    },
    Bundled {
        name: "Cr2AgBiO8",
        point_group: PointGroup::TetragonalM4,
        text: include_str!("../data/Cr2AgBiO8.pz"),
    },
    Bundled {
        name: "RbTaO3",
        point_group: PointGroup::Trigonal3m,
        text: include_str!("../data/RbTaO3.pz"),
    },
    Bundled {
        name: "NaBiS2",
        point_group: PointGroup::OrthorhombicMm2,
        text: include_str!("../data/NaBiS2.pz"),
    },
    Bundled {
        name: "LiBiB2O5",
        point_group: PointGroup::Monoclinic2,
        text: include_str!("../data/LiBiB2O5.pz"),
    },
    Bundled {
        name: "KBi2F7",
        point_group: PointGroup::Triclinic1,
        text: include_str!("../data/KBi2F7.pz"),
    },
    Bundled {
        name: "BaNiO3",
        point_group: PointGroup::Hexagonal6,
        text: include_str!("../data/BaNiO3.pz"),
    },
];

pub fn dataset_names() -> Vec<&'static str> {
    BUNDLED.iter().map(|b| b.name).collect()
}

pub fn dataset(name: &str) -> Result<NamedDataset> {
    let b = BUNDLED
        .iter()
        .find(|b| b.name == name)
        .ok_or_else(|| PiezoError::UnknownDataset {
            name: name.to_string(),
            available: dataset_names().join(", "),
        })?;
    Ok(NamedDataset {
        name: b.name,
        point_group: b.point_group,
        tensor: read_tensor(b.text, SymmetryMode::Strict)?,
    })
}

/// Raw text of a bundled dataset file.
pub fn dataset_source(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|b| b.name == name).map(|b| b.text)
}

pub fn all_datasets() -> Vec<NamedDataset> {
    BUNDLED
        .iter()
        .map(|b| dataset(b.name).expect("bundled datasets parse"))
        .collect()
}

/// The 13 closed-form eigenpair groups of `A(α)`, canonicalized.
pub fn analytic_spectrum_a_alpha(alpha: f64) -> Result<EigenSpectrum> {
    if alpha == 0.0 || !alpha.is_finite() {
        return Err(PiezoError::ZeroAlpha);
    }
    let a = build(&CrystalSpec::new(PointGroup::Cubic23OrM43m, vec![alpha])?)?;
    let r2 = std::f64::consts::FRAC_1_SQRT_2;
    let r3 = 1.0 / 3f64.sqrt();
    let lam_axis = alpha;
    let lam_diag = 2.0 * alpha / 3f64.sqrt();

    let mut raw: Vec<(f64, [f64; 3], [f64; 3])> = vec![
        (0.0, [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]),
        (0.0, [0.0, 1.0, 0.0], [0.0, 1.0, 0.0]),
        (0.0, [0.0, 0.0, 1.0], [0.0, 0.0, 1.0]),
        (lam_axis, [0.0, 0.0, -1.0], [r2, r2, 0.0]),
        (lam_axis, [0.0, 0.0, 1.0], [r2, -r2, 0.0]),
        (lam_axis, [0.0, -1.0, 0.0], [r2, 0.0, r2]),
        (lam_axis, [0.0, 1.0, 0.0], [r2, 0.0, -r2]),
        (lam_axis, [-1.0, 0.0, 0.0], [0.0, r2, r2]),
        (lam_axis, [1.0, 0.0, 0.0], [0.0, r2, -r2]),
    ];
    // y = s/√3 for a sign vector s gives A y y = -(2α/3)(s₂s₃, s₁s₃, s₁s₂)
    for s in [[1.0, 1.0, 1.0], [1.0, -1.0, 1.0], [1.0, 1.0, -1.0], [1.0, -1.0, -1.0]] {
        let x = [-s[1] * s[2], -s[0] * s[2], -s[0] * s[1]];
        raw.push((lam_diag, x.map(|c| c * r3), s.map(|c| c * r3)));
    }

    let mut pairs: Vec<CEigenPair> = raw
        .into_iter()
        .map(|(v, x, y)| {
            let p = CEigenPair::evaluated(
                &a,
                v,
                UnitVector::normalize(x.to_vec()).expect("unit"),
                UnitVector::normalize(y.to_vec()).expect("unit"),
            )
            .expect("dimension 3");
            let mut c = canonicalize(&p, 1e-6);
            if c.value == 0.0 {
                c.diagnostics = PairDiagnostics {
                    degenerate: true,
                    ..Default::default()
                };
            }
            c
        })
        .collect();
    pairs.sort_by(spectrum_order);
    let basin_counts = vec![0; pairs.len()];
    Ok(EigenSpectrum {
        pairs,
        basin_counts,
        rejected: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::residuals;

    fn reference_spec(name: &str) -> CrystalSpec {
        let (g, p): (PointGroup, Vec<f64>) = match name {
            "VFeSb" => (PointGroup::Cubic23OrM43m, vec![3.68180667]),
            "SiO2" => (PointGroup::Trigonal32, vec![-0.13685, -0.009715]),
            "Cr2AgBiO8" => (PointGroup::TetragonalM4, vec![-0.22163, 2.608665, 0.152485, -0.37153]),
            "RbTaO3" => (PointGroup::Trigonal3m, vec![-8.40955, -5.412525, -4.3031, -5.14766]),
            "NaBiS2" => (
                PointGroup::OrthorhombicMm2,
                vec![-8.90808, -0.00842, -7.11526, -0.6222, -7.93831],
            ),
            "LiBiB2O5" => (
                PointGroup::Monoclinic2,
                vec![2.35682, 0.34929, 0.16101, 0.12562, 0.1361, -0.05587, 6.91074, 2.57812],
            ),
            "KBi2F7" => (
                PointGroup::Triclinic1,
                vec![
                    12.64393, 1.08802, 4.14350, 1.59052, 1.96801, 0.22465, 2.59187, 0.08263, 0.81041, 0.51165, 0.71432,
                    0.10570, 1.51254, 0.68235, -0.23019, 0.19013, 0.39030, 0.08381,
                ],
            ),
            "BaNiO3" => (PointGroup::Hexagonal6, vec![0.038385, 6.89822, 27.4628]),
            _ => unreachable!(),
        };
        CrystalSpec::new(g, p).unwrap()
    }

    #[test]
    fn bundled_files_match_builders() {
        for d in all_datasets() {
            let spec = reference_spec(d.name);
            assert_eq!(spec.point_group(), d.point_group);
            let built = build(&spec).unwrap();
            assert_eq!(built, d.tensor, "{}", d.name);
        }
    }

    #[test]
    fn cubic_builds_vfesb() {
        let t = build(&CrystalSpec::new(PointGroup::Cubic23OrM43m, vec![3.68180667]).unwrap()).unwrap();
        for (i, j, k) in [(0, 1, 2), (1, 0, 2), (2, 0, 1), (0, 2, 1), (1, 2, 0), (2, 1, 0)] {
            assert_eq!(t.get(i, j, k), -3.68180667);
        }
        assert_eq!(t.to_dense().iter().filter(|v| **v != 0.0).count(), 6);
    }

    #[test]
    fn trigonal_32_relations() {
        let t = dataset("SiO2").unwrap().tensor;
        assert_eq!(t.get(0, 0, 0), -0.13685);
        assert_eq!(t.get(0, 1, 1), 0.13685);
        assert_eq!(t.get(1, 0, 1), 0.13685);
        assert_eq!(t.get(0, 1, 2), -0.009715);
        assert_eq!(t.get(1, 0, 2), 0.009715);
    }

    #[test]
    fn dataset_entries() {
        let k = dataset("KBi2F7").unwrap().tensor;
        assert_eq!(k.get(0, 0, 0), 12.64393);
        assert_eq!(k.get(2, 0, 1), 0.08381);
        let unique = (0..3)
            .flat_map(|i| (0..3).flat_map(move |j| (j..3).map(move |kk| (i, j, kk))))
            .filter(|&(i, j, kk)| k.get(i, j, kk) != 0.0)
            .count();
        assert_eq!(unique, 18);

        let b = dataset("BaNiO3").unwrap().tensor;
        assert_eq!(b.get(0, 0, 2), 0.038385);
        assert_eq!(b.get(1, 1, 2), 0.038385);
        assert_eq!(b.get(2, 0, 0), 6.89822);
        assert_eq!(b.get(2, 1, 1), 6.89822);
        assert_eq!(b.get(2, 2, 2), 27.4628);

        let n = dataset("NaBiS2").unwrap().tensor;
        assert_eq!(
            [
                n.get(0, 0, 2),
                n.get(1, 1, 2),
                n.get(2, 0, 0),
                n.get(2, 1, 1),
                n.get(2, 2, 2)
            ],
            [-8.90808, -0.00842, -7.11526, -0.6222, -7.93831]
        );
    }

    #[test]
    fn unknown_dataset_lists_names() {
        match dataset("Quartz") {
            Err(PiezoError::UnknownDataset { available, .. }) => {
                assert!(available.contains("SiO2") && available.contains("BaNiO3"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn param_count_checked() {
        assert!(matches!(
            CrystalSpec::new(PointGroup::Trigonal32, vec![1.0]),
            Err(PiezoError::ParamCount {
                expected: 2,
                found: 1,
                ..
            })
        ));
        assert_eq!("hexagonal_6".parse::<PointGroup>().unwrap(), PointGroup::Hexagonal6);
        assert!("cubic_432".parse::<PointGroup>().is_err());
    }

    #[test]
    fn zero_params_and_linearity() {
        for g in PointGroup::ALL {
            let zero = build(&CrystalSpec::new(g, vec![0.0; g.param_count()]).unwrap()).unwrap();
            assert_eq!(zero, PiezoTensor::zeros(3).unwrap());
            let p: Vec<f64> = (0..g.param_count()).map(|i| 0.3 * i as f64 - 1.1).collect();
            let q: Vec<f64> = (0..g.param_count()).map(|i| 2.0 - 0.7 * i as f64).collect();
            let sum: Vec<f64> = p.iter().zip(&q).map(|(a, b)| a + b).collect();
            let lhs = build(&CrystalSpec::new(g, sum).unwrap()).unwrap();
            let rhs = build(&CrystalSpec::new(g, p).unwrap())
                .unwrap()
                .added(&build(&CrystalSpec::new(g, q).unwrap()).unwrap())
                .unwrap();
            assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-14, "{g}");
        }
    }

    #[test]
    fn analytic_spectrum_shape() {
        let s = analytic_spectrum_a_alpha(1.0).unwrap();
        assert_eq!(s.len(), 13);
        let top = 2.0 / 3f64.sqrt();
        assert_eq!(s.pairs.iter().filter(|p| (p.value - top).abs() < 1e-15).count(), 4);
        assert_eq!(s.pairs.iter().filter(|p| (p.value - 1.0).abs() < 1e-15).count(), 6);
        assert_eq!(s.pairs.iter().filter(|p| p.value == 0.0).count(), 3);
        let r2 = std::f64::consts::FRAC_1_SQRT_2;
        assert!(s.pairs.iter().any(|p| p.value == 1.0
            && p.left.as_slice() == [0.0, 0.0, -1.0]
            && (p.right[0] - r2).abs() < 1e-15
            && (p.right[1] - r2).abs() < 1e-15));
    }

    #[test]
    fn analytic_pairs_solve_the_system() {
        for alpha in [1.0, -2.0, 3.68180667] {
            let a = build(&CrystalSpec::new(PointGroup::Cubic23OrM43m, vec![alpha]).unwrap()).unwrap();
            let s = analytic_spectrum_a_alpha(alpha).unwrap();
            assert!(s.pairs.iter().all(|p| p.value >= 0.0));
            for p in &s.pairs {
                let (r1, r2) = residuals(&a, p);
                assert!(r1 < 1e-12 && r2 < 1e-12, "alpha {alpha}: {p:?}");
            }
        }
        let s = analytic_spectrum_a_alpha(3.68180667).unwrap();
        assert!((s.pairs[0].value - 4.25138).abs() < 5e-6);
        assert_eq!(analytic_spectrum_a_alpha(0.0), Err(PiezoError::ZeroAlpha));
    }
}
