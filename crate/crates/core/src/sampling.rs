//! Seeded random configurations and the checks run on each of them.
//!
//! A case is fully determined by `(family, base_seed, index)`; the record
//! produced by [`Case::record`] carries every matrix so a failing case can be
//! replayed without the generator.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::info::{
    central_from_smoothing, mutual_from_smoothing, projective_bipartite_from_sets, subsystem_central_from_smoothing,
    tripartite_checks, IdentityReport, InequalityReport,
};
use crate::measurement::{
    haar_unitary, random_density_with, random_measurement_set_with, random_projective_with, seeded_rng, MeasurementSet,
};
use crate::qmat::{pauli_x, BipartiteDims, CMatrix, DensityMatrix, Subsystem};
use crate::retrodiction::smooth;

/// Defect allowed in the average-smoothing identity `sum_y p(y) rho_y = rho_Omega`.
pub const AVERAGE_IDENTITY_TOL: f64 = 1e-10;
/// Defect allowed when an inequality is expected to be tight.
pub const EQUALITY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Family {
    /// One system of dimension 2-4, two Kraus sets with 2-4 outcomes each.
    Single,
    /// 2x2 or 2x3 system with joint Kraus sets on the whole space.
    Bipartite,
    /// Projective measurement on `b`, then a Kraus set on `a`.
    ProjectiveBipartite,
    /// 2x2 system, two outcomes per measurement, checked with classical registers.
    Tripartite,
    /// Qubit measured twice in the same random basis.
    SameBasis,
    /// Qubit measured in the `sigma_z` basis, then the `sigma_x` basis.
    Unbiased,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Single,
        Family::Bipartite,
        Family::ProjectiveBipartite,
        Family::Tripartite,
        Family::SameBasis,
        Family::Unbiased,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Single => "single",
            Family::Bipartite => "bipartite",
            Family::ProjectiveBipartite => "projective-bipartite",
            Family::Tripartite => "tripartite",
            Family::SameBasis => "same-basis",
            Family::Unbiased => "unbiased",
        }
    }

    fn tag(self) -> u64 {
        match self {
            Family::Single => 1,
            Family::Bipartite => 2,
            Family::ProjectiveBipartite => 3,
            Family::Tripartite => 4,
            Family::SameBasis => 5,
            Family::Unbiased => 6,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown family '{s}'")))
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator seed of case `index` of `family` under `base_seed`.
pub fn case_seed(family: Family, base_seed: u64, index: u64) -> u64 {
    splitmix64(base_seed ^ splitmix64((family.tag() << 48) ^ index))
}

/// One generated configuration.
#[derive(Clone, Debug)]
pub struct Case {
    pub family: Family,
    pub base_seed: u64,
    pub index: u64,
    pub seed: u64,
    /// Bipartite split, if the family has one.
    pub dims: Option<BipartiteDims>,
    pub rho: DensityMatrix,
    pub first: MeasurementSet,
    pub second: MeasurementSet,
}

impl Case {
    pub fn generate(family: Family, base_seed: u64, index: u64) -> Result<Case> {
        let seed = case_seed(family, base_seed, index);
        let mut rng = seeded_rng(seed);
        let (dims, rho, first, second) = match family {
            Family::Single => {
                let d = rng.random_range(2..=4usize);
                let n1 = rng.random_range(2..=4usize);
                let n2 = rng.random_range(2..=4usize);
                let rho = random_density_with(&mut rng, d);
                let first = random_measurement_set_with(&mut rng, d, n1)?;
                let second = random_measurement_set_with(&mut rng, d, n2)?;
                (None, rho, first, second)
            }
            Family::Bipartite => {
                let dims = BipartiteDims::new(2, rng.random_range(2..=3usize));
                let n1 = rng.random_range(2..=4usize);
                let n2 = rng.random_range(2..=4usize);
                let rho = random_density_with(&mut rng, dims.total());
                let first = random_measurement_set_with(&mut rng, dims.total(), n1)?;
                let second = random_measurement_set_with(&mut rng, dims.total(), n2)?;
                (Some(dims), rho, first, second)
            }
            Family::ProjectiveBipartite => {
                let dims = BipartiteDims::new(2, rng.random_range(2..=3usize));
                let n2 = rng.random_range(2..=3usize);
                let rho = random_density_with(&mut rng, dims.total());
                let first = random_projective_with(&mut rng, dims.b).tensor_identity_left(dims.a);
                let second = random_measurement_set_with(&mut rng, dims.a, n2)?.tensor_identity_right(dims.b);
                (Some(dims), rho, first, second)
            }
            Family::Tripartite => {
                let dims = BipartiteDims::new(2, 2);
                let rho = random_density_with(&mut rng, 4);
                let first = random_measurement_set_with(&mut rng, 4, 2)?;
                let second = random_measurement_set_with(&mut rng, 4, 2)?;
                (Some(dims), rho, first, second)
            }
            Family::SameBasis => {
                let rho = random_density_with(&mut rng, 2);
                let basis = haar_unitary(&mut rng, 2);
                let first = MeasurementSet::projective(&basis)?;
                let second = first.clone();
                (None, rho, first, second)
            }
            Family::Unbiased => {
                let rho = random_density_with(&mut rng, 2);
                let first = MeasurementSet::computational(2);
                let second = MeasurementSet::projective(&pauli_x_basis())?;
                (None, rho, first, second)
            }
        };
        Ok(Case {
            family,
            base_seed,
            index,
            seed,
            dims,
            rho,
            first,
            second,
        })
    }

    /// Replay record with every matrix written out.
    pub fn record(&self) -> CaseRecord {
        CaseRecord {
            family: self.family,
            base_seed: self.base_seed,
            index: self.index,
            seed: self.seed,
            dims: self.dims.map(|d| [d.a, d.b]),
            rho: MatrixRecord::from(self.rho.matrix()),
            first: self.first.operators().iter().map(MatrixRecord::from).collect(),
            second: self.second.operators().iter().map(MatrixRecord::from).collect(),
        }
    }
}

/// Eigenbasis of `sigma_x` as columns, `|+x>` first.
fn pauli_x_basis() -> CMatrix {
    let e = crate::qmat::hermitian_eigen(&pauli_x()).expect("sigma_x is Hermitian");
    // Ascending eigenvalues put |-x> first; swap so the +1 vector leads.
    CMatrix::from_fn(2, 2, |i, j| e.vectors[(i, 1 - j)])
}

/// Row-major complex matrix as `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MatrixRecord {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl From<&CMatrix> for MatrixRecord {
    fn from(m: &CMatrix) -> Self {
        MatrixRecord {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.as_slice().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl MatrixRecord {
    pub fn to_matrix(&self) -> Result<CMatrix> {
        let data = self
            .entries
            .iter()
            .map(|&[re, im]| num_complex::Complex64::new(re, im))
            .collect();
        CMatrix::from_vec(self.rows, self.cols, data)
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CaseRecord {
    pub family: Family,
    pub base_seed: u64,
    pub index: u64,
    pub seed: u64,
    pub dims: Option<[usize; 2]>,
    pub rho: MatrixRecord,
    pub first: Vec<MatrixRecord>,
    pub second: Vec<MatrixRecord>,
}

/// Everything checked on one case.
#[derive(Clone, Debug, PartialEq)]
pub struct CaseOutcome {
    pub identities: Vec<IdentityReport>,
    pub inequalities: Vec<InequalityReport>,
}

impl CaseOutcome {
    pub fn all_hold(&self) -> bool {
        self.identities.iter().all(|r| r.holds) && self.inequalities.iter().all(|r| r.satisfied)
    }

    pub fn inequality(&self, name: &str) -> Option<&InequalityReport> {
        self.inequalities.iter().find(|r| r.name == name)
    }

    pub fn identity(&self, name: &str) -> Option<&IdentityReport> {
        self.identities.iter().find(|r| r.name == name)
    }
}

/// Runs every check that applies to the case's family.
pub fn check_case(case: &Case) -> Result<CaseOutcome> {
    let res = smooth(&case.rho, &case.first, &case.second)?;
    let mut identities = vec![IdentityReport::new(
        "average_smoothing",
        res.average_identity_defect(),
        0.0,
        AVERAGE_IDENTITY_TOL,
        "max |sum_y p(y) rho_y - rho_Omega|",
    )];
    let central = central_from_smoothing(&res)?;
    let mut inequalities = central.reports.clone();

    match case.family {
        Family::Single => {}
        Family::Bipartite | Family::Tripartite => {
            let dims = case.dims.expect("bipartite family has dims");
            for keep in [Subsystem::A, Subsystem::B] {
                inequalities.extend(subsystem_central_from_smoothing(&res, dims, keep)?.reports);
            }
            inequalities.extend(mutual_from_smoothing(&res, dims)?.reports);
            if case.family == Family::Tripartite {
                let states: Vec<DensityMatrix> = res
                    .ensemble
                    .states
                    .iter()
                    .map(|s| {
                        s.clone()
                            .unwrap_or_else(|| DensityMatrix::maximally_mixed(dims.total()))
                    })
                    .collect();
                let t = tripartite_checks(&res.joint, &states, dims)?;
                identities.extend(t.identities);
                inequalities.extend(t.reports);
            }
        }
        Family::ProjectiveBipartite => {
            let dims = case.dims.expect("bipartite family has dims");
            let rep = projective_bipartite_from_sets(&case.rho, dims, &case.first, &case.second)?;
            identities.extend(rep.identities);
            inequalities.extend(rep.reports);
        }
        Family::SameBasis | Family::Unbiased => {
            let (name, target) = if case.family == Family::SameBasis {
                ("equality_lower", "central_lower")
            } else {
                ("equality_upper", "central_upper")
            };
            let margin = central
                .reports
                .iter()
                .find(|r| r.name == target)
                .map(|r| r.margin)
                .ok_or_else(|| Error::Precondition(format!("missing report {target}")))?;
            identities.push(IdentityReport::new(
                name,
                margin,
                0.0,
                EQUALITY_TOL,
                format!("margin of {target} vanishes"),
            ));
        }
    }
    Ok(CaseOutcome {
        identities,
        inequalities,
    })
}

/// Smallest margin per report family, with the name's `[...]` suffix dropped.
pub fn min_margins<'a, I>(reports: I) -> Vec<(String, f64)>
where
    I: IntoIterator<Item = &'a InequalityReport>,
{
    let mut out: Vec<(String, f64)> = Vec::new();
    for r in reports {
        let key = r.name.split('[').next().unwrap_or(&r.name);
        match out.iter_mut().find(|(k, _)| k == key) {
            Some((_, m)) => *m = m.min(r.margin),
            None => out.push((key.into(), r.margin)),
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}
