//! System definition, validation and Riesz-spectral classification.
//!
//! A system is the quadruple `(lambda0, M, K, L)` of
//! `dz/dt = -d/dzeta(lambda0 z) + M z` on `[0, 1]` with the boundary condition
//! `lambda0(0) K z(0) + lambda0(1) L z(1) = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{HypspecError, Result};
use crate::linalg::{reciprocal_condition, CMatrix};
use crate::profile::{CoefficientProfile, MatrixProfile};

/// Default threshold on the reciprocal condition number below which a
/// boundary matrix is treated as singular.
pub const DEFAULT_SINGULAR_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub n: usize,
    pub lambda0: CoefficientProfile,
    pub m: MatrixProfile,
    pub k: CMatrix,
    pub l: CMatrix,
}

/// A [`SystemSpec`] whose invariants have been checked.
#[derive(Debug, Clone)]
pub struct ValidatedSystem {
    spec: SystemSpec,
    epsilon: f64,
    m_bound: f64,
}

impl ValidatedSystem {
    pub fn spec(&self) -> &SystemSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn lambda0(&self) -> &CoefficientProfile {
        &self.spec.lambda0
    }

    /// Estimated lower bound of `lambda0` (grid minimum, not a certified bound).
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Largest entry modulus of `M` over `[0, 1]`.
    pub fn m_bound(&self) -> f64 {
        self.m_bound
    }

    pub fn k(&self) -> &CMatrix {
        &self.spec.k
    }

    pub fn l(&self) -> &CMatrix {
        &self.spec.l
    }

    pub fn m_at(&self, zeta: f64) -> CMatrix {
        self.spec.m.eval(zeta)
    }

    /// Sorted interior points where `lambda0` or `M` is only piecewise smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.spec.m.breakpoints();
        b.extend_from_slice(self.spec.lambda0.breakpoints());
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }
}

fn check_positive(profile: &CoefficientProfile) -> Result<f64> {
    let (min, at) = profile.sampled_minimum();
    if !(min > 0.0) || !min.is_finite() {
        return Err(HypspecError::NonPositiveSpeed { zeta: at, value: min });
    }
    if let CoefficientProfile::Sampled(p) = profile {
        if let Some(i) = p.values().iter().position(|v| !(*v > 0.0)) {
            return Err(HypspecError::NonPositiveSpeed {
                zeta: p.nodes()[i],
                value: p.values()[i],
            });
        }
    }
    Ok(min)
}

pub fn validate_system(spec: SystemSpec) -> Result<ValidatedSystem> {
    let n = spec.n;
    if n == 0 {
        return Err(HypspecError::InvalidArgument("n must be positive".into()));
    }
    for (name, mat) in [("K", &spec.k), ("L", &spec.l)] {
        if mat.nrows() != n {
            return Err(HypspecError::dims(format!("{name} rows"), n, mat.nrows()));
        }
        if mat.ncols() != n {
            return Err(HypspecError::dims(format!("{name} columns"), n, mat.ncols()));
        }
    }
    for (r, c) in spec.m.shapes() {
        if r != n {
            return Err(HypspecError::dims("M rows", n, r));
        }
        if c != n {
            return Err(HypspecError::dims("M columns", n, c));
        }
    }
    if let MatrixProfile::Sampled { nodes, .. } = &spec.m {
        crate::profile::check_grid("M", nodes)?;
    }
    let epsilon = check_positive(&spec.lambda0)?;
    for f in spec.m.scalar_profiles() {
        if f.sampled_minimum().0.is_nan() {
            return Err(HypspecError::InvalidArgument("M profile evaluates to NaN".into()));
        }
    }
    let m_bound = spec.m.max_entry_magnitude();
    if !m_bound.is_finite() {
        return Err(HypspecError::InvalidArgument("M is not bounded".into()));
    }
    Ok(ValidatedSystem {
        spec,
        epsilon,
        m_bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassificationTag {
    /// `K` singular: the dynamics do not generate a C0-semigroup.
    NotWellPosed,
    /// `K` invertible, `L` singular: a C0-semigroup but not a group.
    SemigroupOnly,
    /// Both invertible: discrete Riesz-spectral operator generating a C0-group.
    RieszSpectralGroup,
}

impl std::fmt::Display for ClassificationTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ClassificationTag::NotWellPosed => "NotWellPosed",
            ClassificationTag::SemigroupOnly => "SemigroupOnly",
            ClassificationTag::RieszSpectralGroup => "RieszSpectralGroup",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralClassification {
    pub tag: ClassificationTag,
    pub rcond_k: f64,
    pub rcond_l: f64,
    pub tolerance: f64,
}

impl SpectralClassification {
    pub fn is_riesz_spectral(&self) -> bool {
        self.tag == ClassificationTag::RieszSpectralGroup
    }
}

/// Classifies the operator dynamics from the invertibility of `K` and `L`.
///
/// A matrix counts as invertible when its reciprocal condition number
/// exceeds `singular_tol`.
pub fn classify(system: &ValidatedSystem, singular_tol: f64) -> SpectralClassification {
    let rcond_k = reciprocal_condition(system.k());
    let rcond_l = reciprocal_condition(system.l());
    let tag = if rcond_k <= singular_tol {
        ClassificationTag::NotWellPosed
    } else if rcond_l <= singular_tol {
        ClassificationTag::SemigroupOnly
    } else {
        ClassificationTag::RieszSpectralGroup
    };
    SpectralClassification {
        tag,
        rcond_k,
        rcond_l,
        tolerance: singular_tol,
    }
}
