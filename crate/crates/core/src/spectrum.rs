//! Boundary matrix `A_d = -K^{-1} L P(1)`, its Jordan structure, and the
//! eigenvalue lattice `mu_kl = eta(1)^{-1} (log|rho_k| + i(theta_k + 2 pi l))`
//! of the transport operator.

use std::f64::consts::TAU;

use nalgebra::Schur;
use serde::Serialize;

use crate::error::{HypspecError, Result};
use crate::linalg::{normalize_phase, null_space, orthonormal_span, reciprocal_condition, CMatrix, CVector, C64};
use crate::systems::ValidatedSystem;

/// Unified tolerance for eigenvalue clustering and rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// `A_d = -K^{-1} L P(1)`, via a linear solve against `K`.
pub fn boundary_matrix(system: &ValidatedSystem, p1: &CMatrix, singular_tol: f64) -> Result<CMatrix> {
    let k = system.k();
    let rcond = reciprocal_condition(k);
    if rcond <= singular_tol {
        return Err(HypspecError::SingularK { rcond });
    }
    let rhs = system.l() * p1;
    let x = k
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or(HypspecError::SingularK { rcond })?;
    Ok(-x)
}

/// Chain `{(rho - A_d)^j v}_{j=0}^{p-1}` of generalized eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct JordanChain {
    vectors: Vec<CVector>,
}

impl JordanChain {
    #[cfg(test)]
    pub(crate) fn from_vectors(vectors: Vec<CVector>) -> Self {
        JordanChain { vectors }
    }

    /// Chain length `p`.
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// `(rho - A_d)^j v`.
    pub fn vector(&self, j: usize) -> &CVector {
        &self.vectors[j]
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    /// Generating vector `v` (unit norm, phase-normalized).
    pub fn head(&self) -> &CVector {
        &self.vectors[0]
    }

    /// True eigenvector `(rho - A_d)^{p-1} v`.
    pub fn eigenvector(&self) -> &CVector {
        self.vectors.last().unwrap()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistinctEigenvalue {
    pub value: C64,
    pub modulus: f64,
    /// Argument in `[0, 2 pi)`.
    pub theta: f64,
    pub algebraic: usize,
    pub geometric: usize,
    pub chains: Vec<JordanChain>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryEigenStructure {
    a_d: CMatrix,
    eigenvalues: Vec<DistinctEigenvalue>,
    rank_tol: f64,
}

impl BoundaryEigenStructure {
    pub fn a_d(&self) -> &CMatrix {
        &self.a_d
    }

    pub fn eigenvalues(&self) -> &[DistinctEigenvalue] {
        &self.eigenvalues
    }

    pub fn n_distinct(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn rank_tol(&self) -> f64 {
        self.rank_tol
    }

    /// Distinct eigenvalue `k` (1-based, ordered by decreasing modulus then argument).
    pub fn eigenvalue(&self, k: usize) -> Result<&DistinctEigenvalue> {
        if k == 0 || k > self.eigenvalues.len() {
            return Err(HypspecError::ModeIndexOutOfRange(format!(
                "k = {k}, expected 1..={}",
                self.eigenvalues.len()
            )));
        }
        Ok(&self.eigenvalues[k - 1])
    }

    pub fn is_diagonalizable(&self) -> bool {
        self.eigenvalues.iter().all(|e| e.algebraic == e.geometric)
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().map(|e| e.modulus).fold(0.0, f64::max)
    }
}

/// Argument of `z` in `[0, 2 pi)`.
pub fn principal_angle(z: C64) -> f64 {
    let mut t = z.im.atan2(z.re);
    if t < 0.0 {
        t += TAU;
    }
    if t >= TAU {
        t = 0.0;
    }
    t
}

fn cluster(values: &[C64], tol: f64) -> Vec<Vec<C64>> {
    let mut clusters: Vec<Vec<C64>> = Vec::new();
    for &v in values {
        let close = |u: &C64| (u - v).norm() <= tol * v.norm().max(1.0).max(u.norm());
        match clusters.iter_mut().find(|c| c.iter().any(close)) {
            Some(c) => c.push(v),
            None => clusters.push(vec![v]),
        }
    }
    clusters
}

fn matrix_power(b: &CMatrix, p: usize) -> CMatrix {
    let n = b.nrows();
    (0..p).fold(CMatrix::identity(n, n), |acc, _| &acc * b)
}

fn jordan_chains(a: &CMatrix, rho: C64, algebraic: usize, tol: f64) -> Result<Vec<JordanChain>> {
    let n = a.nrows();
    let b = CMatrix::identity(n, n) * rho - a;
    // kernels[j - 1] = ker B^j
    let mut kernels: Vec<Vec<CVector>> = Vec::new();
    for j in 1..=algebraic {
        let ker = null_space(&matrix_power(&b, j), tol);
        let done = ker.len() >= algebraic;
        kernels.push(ker);
        if done {
            break;
        }
    }
    let top = kernels.last().map_or(0, |k| k.len());
    if top != algebraic {
        return Err(HypspecError::EigDecompFailure(format!(
            "eigenvalue {rho}: generalized eigenspace has dimension {top}, algebraic multiplicity {algebraic}"
        )));
    }
    let dim = |j: usize| if j == 0 { 0 } else { kernels[j - 1].len() };

    // (head, length) pairs, longest chains first
    let mut heads: Vec<(CVector, usize)> = Vec::new();
    for j in (1..=kernels.len()).rev() {
        let images: Vec<CVector> = heads
            .iter()
            .map(|(v, p)| matrix_power(&b, p - j) * v)
            .collect();
        let wanted = dim(j) - dim(j - 1);
        if wanted < images.len() {
            return Err(HypspecError::EigDecompFailure(format!(
                "eigenvalue {rho}: inconsistent kernel dimensions"
            )));
        }
        let needed = wanted - images.len();
        if needed == 0 {
            continue;
        }
        let mut known: Vec<CVector> = if j >= 2 { kernels[j - 2].clone() } else { Vec::new() };
        known.extend(images);
        let q = orthonormal_span(&known, n, tol);
        let project = |x: &CVector| {
            let mut y = x.clone();
            for u in &q {
                let coef = u.dotc(&y);
                y -= u * coef;
            }
            y
        };
        let candidates: Vec<CVector> = kernels[j - 1].iter().map(project).collect();
        let fresh = orthonormal_span(&candidates, n, tol);
        if fresh.len() < needed {
            return Err(HypspecError::EigDecompFailure(format!(
                "eigenvalue {rho}: could not complete Jordan chains of length {j}"
            )));
        }
        for v in fresh.into_iter().take(needed) {
            heads.push((normalize_phase(&v, tol), j));
        }
    }

    Ok(heads
        .into_iter()
        .map(|(v, p)| {
            let mut vectors = Vec::with_capacity(p);
            let mut cur = v;
            for _ in 0..p {
                let next = &b * &cur;
                vectors.push(cur);
                cur = next;
            }
            JordanChain { vectors }
        })
        .collect())
}

/// Eigenvalues, multiplicities and Jordan chains of `a_d`.
///
/// Eigenvalues within `rank_tol * max(1, |rho|)` of each other are treated as
/// one eigenvalue; kernel dimensions of `(rho - A_d)^j` use the same
/// tolerance relative to the largest singular value.
pub fn eigen_structure(a_d: &CMatrix, rank_tol: f64) -> Result<BoundaryEigenStructure> {
    if !(rank_tol > 0.0) {
        return Err(HypspecError::InvalidArgument("rank_tol must be positive".into()));
    }
    let n = a_d.nrows();
    if a_d.ncols() != n || n == 0 {
        return Err(HypspecError::dims("A_d", n, a_d.ncols()));
    }
    if a_d.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(HypspecError::EigDecompFailure("A_d has non-finite entries".into()));
    }
    let schur = Schur::try_new(a_d.clone(), 1e-15, 10_000)
        .ok_or_else(|| HypspecError::EigDecompFailure("Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    let raw: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();

    let mut eigenvalues = Vec::new();
    for members in cluster(&raw, rank_tol) {
        let algebraic = members.len();
        let value = members.iter().sum::<C64>() / algebraic as f64;
        let chains = jordan_chains(a_d, value, algebraic, rank_tol)?;
        eigenvalues.push(DistinctEigenvalue {
            value,
            modulus: value.norm(),
            theta: principal_angle(value),
            algebraic,
            geometric: chains.len(),
            chains,
        });
    }
    eigenvalues.sort_by(|a, b| b.modulus.total_cmp(&a.modulus).then(a.theta.total_cmp(&b.theta)));
    Ok(BoundaryEigenStructure {
        a_d: a_d.clone(),
        eigenvalues,
        rank_tol,
    })
}

/// `mu_kl = eta(1)^{-1} (log|rho_k| + i(theta_k + 2 pi l))`.
pub fn mode_eigenvalue(es: &BoundaryEigenStructure, eta1: f64, k: usize, l: i64) -> Result<C64> {
    let e = es.eigenvalue(k)?;
    if e.modulus == 0.0 {
        return Err(HypspecError::ZeroEigenvalue { k });
    }
    Ok(lattice_point(e.modulus, e.theta, eta1, l))
}

// 2*pi as an unevaluated sum hi + lo
const TAU_HI: f64 = TAU;
const TAU_LO: f64 = 2.449_293_598_294_706_4e-16;

/// `(theta + 2 pi l) / eta1` in double-double arithmetic, rounded once.
fn lattice_frequency(theta: f64, eta1: f64, l: i64) -> f64 {
    let lf = l as f64;
    let p = lf * TAU_HI;
    let p_err = lf.mul_add(TAU_HI, -p);
    let s = theta + p;
    let bb = s - theta;
    let s_err = (theta - (s - bb)) + (p - bb);
    let tail = s_err + p_err + lf * TAU_LO;
    let q = s / eta1;
    let r = (-q).mul_add(eta1, s);
    q + (r + tail) / eta1
}

pub(crate) fn lattice_point(modulus: f64, theta: f64, eta1: f64, l: i64) -> C64 {
    C64::new(modulus.ln() / eta1, lattice_frequency(theta, eta1, l))
}

/// `omega_0 = eta(1)^{-1} max_k log|rho_k|`.
pub fn growth_bound(es: &BoundaryEigenStructure, eta1: f64) -> f64 {
    es.spectral_radius().ln() / eta1
}

/// Exponential stability: every `rho_k` strictly inside the unit circle.
pub fn stability_verdict(es: &BoundaryEigenStructure) -> bool {
    es.spectral_radius() < 1.0
}

/// Identifies one (generalized) eigenfunction.
///
/// `k` selects the distinct eigenvalue `rho_k` (1-based), `chain` the Jordan
/// chain of `rho_k` (1-based; always 1 unless the geometric multiplicity
/// exceeds one), `l` the lattice index and `j` the position in the chain
/// (`j = 1` for true eigenfunctions).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ModeIndex {
    pub k: usize,
    pub chain: usize,
    pub l: i64,
    pub j: usize,
}

impl ModeIndex {
    pub fn eigen(k: usize, l: i64) -> Self {
        ModeIndex { k, chain: 1, l, j: 1 }
    }
}

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub eigenstructure: BoundaryEigenStructure,
    pub eta1: f64,
    pub growth_bound: f64,
    pub stable: bool,
}

impl SpectrumResult {
    pub fn new(eigenstructure: BoundaryEigenStructure, eta1: f64) -> Self {
        let growth_bound = growth_bound(&eigenstructure, eta1);
        let stable = stability_verdict(&eigenstructure);
        SpectrumResult {
            eigenstructure,
            eta1,
            growth_bound,
            stable,
        }
    }

    pub fn lattice(&self, k: usize, l: i64) -> Result<C64> {
        mode_eigenvalue(&self.eigenstructure, self.eta1, k, l)
    }
}

/// All `(k, l)` with `|l| <= l_max`, by decreasing `Re mu`, then increasing
/// `|Im mu|`, then `(k, l)`.
pub fn enumerate_modes(result: &SpectrumResult, l_max: usize) -> Result<Vec<(ModeIndex, C64)>> {
    let l_max = l_max as i64;
    let mut modes = Vec::new();
    for k in 1..=result.eigenstructure.n_distinct() {
        for l in -l_max..=l_max {
            modes.push((ModeIndex::eigen(k, l), result.lattice(k, l)?));
        }
    }
    modes.sort_by(|(ia, a), (ib, b)| {
        b.re.total_cmp(&a.re)
            .then(a.im.abs().total_cmp(&b.im.abs()))
            .then(ia.k.cmp(&ib.k))
            .then(ia.l.cmp(&ib.l))
    });
    Ok(modes)
}
