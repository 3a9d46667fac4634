//! Eigenfunctions, Jordan-chain generalized eigenfunctions, the weighted
//! inner product that makes the eigenfunctions orthonormal, and modal
//! projection.
//!
//! For an eigenvalue `rho_k` of `A_d` with chain `{(rho_k - A_d)^j v}` of
//! length `p`, the vectors `omega_1..omega_p` solve
//! `(rho_k - A_d) omega_m = A_d sum_{q<m} Omega_q(1) omega_{m-q}` and
//!
//! ```text
//! phi_klj(zeta) = lambda0(0)/lambda0(zeta) e^{-mu_kl eta(zeta)}
//!                 [omega_j + sum_{m=0}^{j-2} omega_{j-1-m} Omega_{m+1}(zeta)]
//! ```

use crate::error::{HypspecError, Result};
use crate::field::{x_norm, Field};
use crate::geometry::GeometryTables;
use crate::linalg::{least_squares, CMatrix, CVector, C64, ZERO};
use crate::spectrum::{mode_eigenvalue, BoundaryEigenStructure, JordanChain, ModeIndex};

/// Points per finite-difference stencil used when applying the operator.
pub const STENCIL_POINTS: usize = 7;

/// A (generalized) eigenfunction of the transport operator.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeFunction {
    pub mode: ModeIndex,
    pub mu: C64,
    omegas: Vec<CVector>,
    lambda0_at_zero: f64,
}

impl ModeFunction {
    /// Chain position `j`.
    pub fn order(&self) -> usize {
        self.omegas.len()
    }

    pub fn omegas(&self) -> &[CVector] {
        &self.omegas
    }

    fn bracket<F: Fn(usize) -> f64>(&self, omega_at: F) -> CVector {
        let j = self.omegas.len();
        let mut acc = self.omegas[j - 1].clone();
        for m in 0..j.saturating_sub(1) {
            acc += &self.omegas[j - 2 - m] * C64::from(omega_at(m + 1));
        }
        acc
    }

    /// Value at an arbitrary `zeta` in `[0, 1]`.
    pub fn evaluate(&self, geom: &GeometryTables, zeta: f64) -> CVector {
        let scale = self.lambda0_at_zero / geom.lambda0().eval(zeta) * (-self.mu * geom.eta(zeta)).exp();
        self.bracket(|m| geom.omega(m, zeta)) * scale
    }

    /// Values at the master-grid nodes, straight from the tables.
    pub fn sample(&self, geom: &GeometryTables) -> Field {
        let n = self.omegas[0].len();
        let eta = geom.eta_values();
        let lam = geom.lambda_values();
        Field::from_node_fn(geom.len(), n, |i| {
            let scale = self.lambda0_at_zero / lam[i] * (-self.mu * eta[i]).exp();
            self.bracket(|m| geom.omega_values(m)[i]) * scale
        })
    }
}

fn chain_of<'a>(es: &'a BoundaryEigenStructure, k: usize, chain: usize) -> Result<&'a JordanChain> {
    let e = es.eigenvalue(k)?;
    if chain == 0 || chain > e.chains.len() {
        return Err(HypspecError::NoEigenvector { k, chain });
    }
    Ok(&e.chains[chain - 1])
}

/// `phi_kl = lambda0(0)/lambda0 e^{-mu_kl eta} v_k`, for the first chain of `rho_k`.
pub fn eigenfunction(es: &BoundaryEigenStructure, geom: &GeometryTables, k: usize, l: i64) -> Result<ModeFunction> {
    mode_function(es, geom, ModeIndex::eigen(k, l))
}

/// Builds `omega_1..omega_p` for one Jordan chain of `rho`.
///
/// `omega_at_one[q - 1]` must hold `Omega_q(1)` for `q = 1..p-1`.
pub fn jordan_omegas(
    rho: C64,
    chain: &JordanChain,
    omega_at_one: &[f64],
    a_d: &CMatrix,
    rank_tol: f64,
) -> Result<Vec<CVector>> {
    let p = chain.len();
    if omega_at_one.len() + 1 < p {
        return Err(HypspecError::InvalidArgument(format!(
            "need Omega_q(1) for q < {p}, got {}",
            omega_at_one.len()
        )));
    }
    let n = a_d.nrows();
    let b = CMatrix::identity(n, n) * rho - a_d;
    if (&b * chain.eigenvector()).norm() > rank_tol * chain.head().norm().max(1.0) * a_d.norm().max(1.0) {
        return Err(HypspecError::DefectiveChain("chain is not annihilated at step p".into()));
    }
    // u(r) = (rho - A_d)^{p-r} v
    let u = |r: usize| chain.vector(p - r);
    let mut omegas = vec![u(1).clone()];
    for m in 2..=p {
        let mut rhs = CVector::zeros(n);
        for q in 1..m {
            rhs += &omegas[m - q - 1] * C64::from(omega_at_one[q - 1]);
        }
        let rhs = a_d * rhs;
        let basis: Vec<CVector> = (1..m).map(|r| u(r).clone()).collect();
        let (beta, residual) = least_squares(&basis, &rhs, rank_tol);
        if residual > rank_tol * rhs.norm().max(1.0) * 1e2 {
            return Err(HypspecError::DefectiveChain(format!(
                "omega_{m}: residual {residual:e} in chain basis"
            )));
        }
        let mut next = CVector::zeros(n);
        for (q, bq) in beta.iter().enumerate() {
            next += u(q + 2) * *bq;
        }
        omegas.push(next);
    }
    Ok(omegas)
}

/// `phi_klj` from precomputed `omega_1..omega_p` (uses the first `j`).
pub fn generalized_eigenfunction(
    mode: ModeIndex,
    mu: C64,
    omegas: &[CVector],
    geom: &GeometryTables,
) -> Result<ModeFunction> {
    let j = mode.j;
    if j == 0 || j > omegas.len() {
        return Err(HypspecError::IndexOutOfChain { j, p: omegas.len() });
    }
    if j > geom.m_max() + 1 {
        return Err(HypspecError::InvalidArgument(format!(
            "geometry tables hold Omega up to m = {}, chain order {j} needs {}",
            geom.m_max(),
            j - 1
        )));
    }
    Ok(ModeFunction {
        mode,
        mu,
        omegas: omegas[..j].to_vec(),
        lambda0_at_zero: geom.lambda_values()[0],
    })
}

/// Builds the mode function for any [`ModeIndex`].
pub fn mode_function(es: &BoundaryEigenStructure, geom: &GeometryTables, mode: ModeIndex) -> Result<ModeFunction> {
    let chain = chain_of(es, mode.k, mode.chain)?;
    if mode.j == 0 || mode.j > chain.len() {
        return Err(HypspecError::IndexOutOfChain { j: mode.j, p: chain.len() });
    }
    let mu = mode_eigenvalue(es, geom.eta1(), mode.k, mode.l)?;
    let rho = es.eigenvalue(mode.k)?.value;
    let omega_at_one: Vec<f64> = (1..chain.len())
        .map(|q| {
            if q <= geom.m_max() {
                Ok(*geom.omega_values(q).last().unwrap())
            } else {
                Err(HypspecError::InvalidArgument(format!("geometry lacks Omega_{q}")))
            }
        })
        .collect::<Result<_>>()?;
    let omegas = jordan_omegas(rho, chain, &omega_at_one, es.a_d(), es.rank_tol())?;
    generalized_eigenfunction(mode, mu, &omegas, geom)
}

/// Boundary residual `||lambda0(0) phi(0) - A_d lambda0(1) phi(1)||`
/// (zero exactly when `phi` lies in the operator domain).
pub fn boundary_residual(mf: &ModeFunction, geom: &GeometryTables, a_d: &CMatrix) -> f64 {
    let lam = geom.lambda_values();
    let left = mf.evaluate(geom, 0.0) * C64::from(lam[0]);
    let right = a_d * mf.evaluate(geom, 1.0) * C64::from(*lam.last().unwrap());
    (left - right).norm()
}

/// Fornberg's finite-difference weights for the first derivative at `x0`.
pub fn derivative_weights(x0: f64, xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    // c[j][k]: weight of xs[j] for derivative order k (k = 0, 1)
    let mut c = vec![[0.0_f64; 2]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(1);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|w| w[1]).collect()
}

/// `(mu - A) f = mu f + d/dzeta(lambda0 f)` on the master grid, with
/// centred stencils inside and one-sided stencils near the ends.
pub fn apply_shifted_operator(f: &Field, mu: C64, geom: &GeometryTables) -> Field {
    let nodes = geom.len();
    let n = f.components();
    let h = geom.grid().step();
    let lam = geom.lambda_values();
    let half = STENCIL_POINTS / 2;
    let offsets: Vec<f64> = (0..STENCIL_POINTS).map(|i| i as f64).collect();
    let weights: Vec<Vec<f64>> = (0..STENCIL_POINTS)
        .map(|pos| derivative_weights(pos as f64, &offsets).iter().map(|w| w / h).collect())
        .collect();
    let mut out = Field::zeros(nodes, n);
    for i in 0..nodes {
        let start = i.saturating_sub(half).min(nodes - STENCIL_POINTS);
        let w = &weights[i - start];
        let fi = f.node(i);
        let target = out.node_mut(i);
        for c in 0..n {
            let mut d = ZERO;
            for (s, ws) in w.iter().enumerate() {
                d += f.node(start + s)[c] * (ws * lam[start + s]);
            }
            target[c] = mu * fi[c] + d;
        }
    }
    out
}

/// Applies `(mu - A)` `j` times to the sampled `f` and returns the
/// `X`-norms of the `j`-th and `(j-1)`-th iterates.
pub fn chain_residuals(f: &Field, mu: C64, j: usize, geom: &GeometryTables) -> (f64, f64) {
    let mut prev = f.clone();
    let mut cur = f.clone();
    for _ in 0..j {
        prev = cur;
        cur = apply_shifted_operator(&prev, mu, geom);
    }
    if j == 0 {
        return (x_norm(&cur, geom), f64::NAN);
    }
    (x_norm(&cur, geom), x_norm(&prev, geom))
}

/// Weight `W(zeta) = V^{-*} diag(w_k(zeta)) V^{-1}` of the inner product that
/// makes the eigenfunctions orthonormal (diagonalizable `A_d` only).
#[derive(Debug, Clone)]
pub struct WeightMatrix {
    basis: Vec<(usize, usize)>,
    v: CMatrix,
    v_inv: CMatrix,
    scalars: Vec<Vec<f64>>,
    matrices: Vec<CMatrix>,
}

impl WeightMatrix {
    /// `(k, chain)` of each eigenvector column of `V`.
    pub fn basis(&self) -> &[(usize, usize)] {
        &self.basis
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.v
    }

    pub fn eigenvectors_inverse(&self) -> &CMatrix {
        &self.v_inv
    }

    /// `w_k` at every node, for basis column `col`.
    pub fn scalar(&self, col: usize) -> &[f64] {
        &self.scalars[col]
    }

    /// `W` at node `i`.
    pub fn at(&self, i: usize) -> &CMatrix {
        &self.matrices[i]
    }
}

pub fn build_weight(es: &BoundaryEigenStructure, geom: &GeometryTables) -> Result<WeightMatrix> {
    if !es.is_diagonalizable() {
        return Err(HypspecError::NotDiagonalizable);
    }
    let mut basis = Vec::new();
    let mut columns = Vec::new();
    let mut log_moduli = Vec::new();
    for (ki, e) in es.eigenvalues().iter().enumerate() {
        for (ci, ch) in e.chains.iter().enumerate() {
            basis.push((ki + 1, ci + 1));
            columns.push(ch.head().clone());
            log_moduli.push(e.modulus.ln());
        }
    }
    let v = CMatrix::from_columns(&columns);
    let v_inv = v.clone().try_inverse().ok_or(HypspecError::NotDiagonalizable)?;
    let eta1 = geom.eta1();
    let lam0 = geom.lambda_values()[0];
    let norm = 1.0 / (lam0 * lam0 * eta1);
    let scalars: Vec<Vec<f64>> = log_moduli
        .iter()
        .map(|lr| {
            geom.eta_values()
                .iter()
                .map(|eta| (2.0 * eta / eta1 * lr).exp() * norm)
                .collect()
        })
        .collect();
    let v_inv_adj = v_inv.adjoint();
    let n = v.nrows();
    let matrices = (0..geom.len())
        .map(|i| {
            let d = CMatrix::from_diagonal(&CVector::from_iterator(n, scalars.iter().map(|s| C64::from(s[i]))));
            &v_inv_adj * d * &v_inv
        })
        .collect();
    Ok(WeightMatrix {
        basis,
        v,
        v_inv,
        scalars,
        matrices,
    })
}

/// `<f, g>_W = ∫ g^* lambda0 W f` by composite Simpson on the master grid.
pub fn weighted_inner_product(f: &Field, g: &Field, weight: &WeightMatrix, geom: &GeometryTables) -> Result<C64> {
    let n = weight.v.nrows();
    f.check_shape("f", geom.len(), n)?;
    g.check_shape("g", geom.len(), n)?;
    let w = geom.weights();
    let lam = geom.lambda_values();
    let mut acc = ZERO;
    for i in 0..geom.len() {
        let wf = weight.at(i) * f.node_vector(i);
        let dot = g.node(i).iter().zip(wf.iter()).fold(ZERO, |s, (a, b)| s + a.conj() * b);
        acc += dot * (w[i] * lam[i]);
    }
    Ok(acc)
}

/// Sampled eigenfunctions `phi_kl`, every eigenvector and `|l| <= l_max`.
#[derive(Debug, Clone)]
pub struct ModalBasis {
    pub l_max: usize,
    pub modes: Vec<(ModeIndex, C64, Field)>,
}

impl ModalBasis {
    pub fn new(es: &BoundaryEigenStructure, geom: &GeometryTables, l_max: usize) -> Result<Self> {
        if !es.is_diagonalizable() {
            return Err(HypspecError::NotDiagonalizable);
        }
        let l_max_i = l_max as i64;
        let mut modes = Vec::new();
        for (ki, e) in es.eigenvalues().iter().enumerate() {
            for ci in 0..e.chains.len() {
                for l in -l_max_i..=l_max_i {
                    let mode = ModeIndex {
                        k: ki + 1,
                        chain: ci + 1,
                        l,
                        j: 1,
                    };
                    let mf = mode_function(es, geom, mode)?;
                    modes.push((mode, mf.mu, mf.sample(geom)));
                }
            }
        }
        Ok(ModalBasis { l_max, modes })
    }
}

/// `c_kl = <z0, phi_kl>_W` for every mode of `basis`.
pub fn project_initial_state(
    z0: &Field,
    basis: &ModalBasis,
    weight: &WeightMatrix,
    geom: &GeometryTables,
) -> Result<Vec<(ModeIndex, C64)>> {
    basis
        .modes
        .iter()
        .map(|(mode, _, phi)| Ok((*mode, weighted_inner_product(z0, phi, weight, geom)?)))
        .collect()
}

/// `sum c_kl e^{mu_kl t} phi_kl`.
pub fn modal_sum(basis: &ModalBasis, coefficients: &[(ModeIndex, C64)], t: f64) -> Field {
    let first = &basis.modes[0].2;
    let mut out = Field::zeros(first.nodes(), first.components());
    for ((_, mu, phi), (_, c)) in basis.modes.iter().zip(coefficients) {
        out.add_scaled(c * (mu * t).exp(), phi);
    }
    out
}
