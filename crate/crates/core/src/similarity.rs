//! Fundamental matrix `P' = lambda0^{-1} M P`, `P(0) = I`, and its inverse.
//!
//! `P^{-1}` is integrated from its own equation
//! `(P^{-1})' = -lambda0^{-1} P^{-1} M`, `P^{-1}(0) = I`, so the product defect
//! `P P^{-1} - I` measures the integration error of two independent runs.

use crate::error::{HypspecError, Result};
use crate::field::Field;
use crate::geometry::{GeometryTables, MasterGrid};
use crate::linalg::{identity_defect, CMatrix, C64};
use crate::ode::{integrate_dense, Tolerances};
use crate::quadrature::cumulative_simpson;
use crate::systems::ValidatedSystem;

pub const DEFAULT_RTOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct SimilaritySolution {
    grid: MasterGrid,
    p_values: Vec<CMatrix>,
    pinv_values: Vec<CMatrix>,
    p1: CMatrix,
    logdet_check: f64,
    inverse_defect: f64,
}

impl SimilaritySolution {
    pub fn grid(&self) -> MasterGrid {
        self.grid
    }

    pub fn p(&self, i: usize) -> &CMatrix {
        &self.p_values[i]
    }

    pub fn p_inv(&self, i: usize) -> &CMatrix {
        &self.pinv_values[i]
    }

    /// `P(1)`.
    pub fn p1(&self) -> &CMatrix {
        &self.p1
    }

    /// Largest relative deviation of `det P(zeta)` from `exp(∫ tr(M / lambda0))`.
    pub fn logdet_check(&self) -> f64 {
        self.logdet_check
    }

    /// Largest `||P(zeta) P^{-1}(zeta) - I||_F` over the nodes.
    pub fn inverse_defect(&self) -> f64 {
        self.inverse_defect
    }

    pub fn dimension(&self) -> usize {
        self.p1.nrows()
    }
}

fn unpack(n: usize, y: &[C64]) -> CMatrix {
    CMatrix::from_column_slice(n, n, y)
}

/// Solves for `P` and `P^{-1}` on the master grid of `geom`.
pub fn solve_p(system: &ValidatedSystem, geom: &GeometryTables, rtol: f64) -> Result<SimilaritySolution> {
    if !(1e-14..=1e-4).contains(&rtol) {
        return Err(HypspecError::InvalidArgument(format!("rtol = {rtol:e} outside [1e-14, 1e-4]")));
    }
    let n = system.n();
    let tol = Tolerances { rtol, atol: rtol * 1e-2 };
    let grid = geom.grid();
    let nodes = grid.nodes();
    let lambda0 = system.lambda0();
    let identity: Vec<C64> = CMatrix::identity(n, n).as_slice().to_vec();
    let breakpoints = system.breakpoints();

    let forward = integrate_dense(
        |x, y, dy| {
            let rhs = system.m_at(x) * unpack(n, y) / C64::from(lambda0.eval(x));
            dy.copy_from_slice(rhs.as_slice());
        },
        &identity,
        &nodes,
        &breakpoints,
        tol,
    )?;
    let inverse = integrate_dense(
        |x, y, dy| {
            let rhs = -(unpack(n, y) * system.m_at(x)) / C64::from(lambda0.eval(x));
            dy.copy_from_slice(rhs.as_slice());
        },
        &identity,
        &nodes,
        &breakpoints,
        tol,
    )?;

    let mut p_values: Vec<CMatrix> = forward.iter().map(|y| unpack(n, y)).collect();
    let mut pinv_values: Vec<CMatrix> = inverse.iter().map(|y| unpack(n, y)).collect();
    p_values[0] = CMatrix::identity(n, n);
    pinv_values[0] = CMatrix::identity(n, n);

    // Liouville: det P = exp(∫ tr(M) / lambda0)
    let h = grid.step();
    let traces: Vec<C64> = nodes.iter().map(|&z| system.m_at(z).trace() / lambda0.eval(z)).collect();
    let re = cumulative_simpson(&traces.iter().map(|t| t.re).collect::<Vec<_>>(), h);
    let im = cumulative_simpson(&traces.iter().map(|t| t.im).collect::<Vec<_>>(), h);
    let mut logdet_check: f64 = 0.0;
    let mut inverse_defect: f64 = 0.0;
    for i in 0..nodes.len() {
        let expected = C64::new(re[i], im[i]).exp();
        let det = p_values[i].clone().determinant();
        logdet_check = logdet_check.max((det - expected).norm() / expected.norm());
        inverse_defect = inverse_defect.max(identity_defect(&(&p_values[i] * &pinv_values[i])));
    }

    let p1 = p_values.last().unwrap().clone();
    Ok(SimilaritySolution {
        grid,
        p_values,
        pinv_values,
        p1,
        logdet_check,
        inverse_defect,
    })
}

fn apply_pointwise(mats: &[CMatrix], field: &Field, what: &str) -> Result<Field> {
    let n = mats[0].nrows();
    field.check_shape(what, mats.len(), n)?;
    Ok(Field::from_node_fn(mats.len(), n, |i| &mats[i] * field.node_vector(i)))
}

/// `z(zeta) = P^{-1}(zeta) z~(zeta)` at every node.
pub fn transform_state(sim: &SimilaritySolution, ztilde: &Field) -> Result<Field> {
    apply_pointwise(&sim.pinv_values, ztilde, "state")
}

/// `z~(zeta) = P(zeta) z(zeta)` at every node.
pub fn inverse_transform(sim: &SimilaritySolution, z: &Field) -> Result<Field> {
    apply_pointwise(&sim.p_values, z, "state")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_geometry;
    use crate::linalg::c;
    use crate::profile::{CoefficientProfile, MatrixProfile};
    use crate::systems::{validate_system, SystemSpec};

    fn scalar_system(m: f64) -> ValidatedSystem {
        validate_system(SystemSpec {
            n: 1,
            lambda0: CoefficientProfile::constant(1.0),
            m: MatrixProfile::Constant(CMatrix::from_element(1, 1, c(m, 0.0))),
            k: CMatrix::identity(1, 1),
            l: -CMatrix::identity(1, 1),
        })
        .unwrap()
    }

    #[test]
    fn zero_coupling_gives_identity() {
        let sys = scalar_system(0.0);
        let g = build_geometry(&sys, 64, 1).unwrap();
        let sim = solve_p(&sys, &g, DEFAULT_RTOL).unwrap();
        for i in 0..g.len() {
            assert_eq!(sim.p(i), &CMatrix::identity(1, 1));
        }
    }

    #[test]
    fn scalar_exponential() {
        let sys = scalar_system(-0.8);
        let g = build_geometry(&sys, 64, 1).unwrap();
        let sim = solve_p(&sys, &g, DEFAULT_RTOL).unwrap();
        for i in 0..g.len() {
            let z = g.grid().node(i);
            assert!((sim.p(i)[(0, 0)].re - (-0.8 * z).exp()).abs() < 1e-9);
            assert!((sim.p_inv(i)[(0, 0)].re - (0.8 * z).exp()).abs() < 1e-9);
        }
        assert!(sim.inverse_defect() < 1e-9);
        assert!(sim.logdet_check() < 1e-8);
    }

    #[test]
    fn rtol_range_enforced() {
        let sys = scalar_system(1.0);
        let g = build_geometry(&sys, 16, 1).unwrap();
        assert!(solve_p(&sys, &g, 1e-3).is_err());
        assert!(solve_p(&sys, &g, 1e-16).is_err());
    }

    #[test]
    fn transform_shape_mismatch() {
        let sys = scalar_system(1.0);
        let g = build_geometry(&sys, 16, 1).unwrap();
        let sim = solve_p(&sys, &g, DEFAULT_RTOL).unwrap();
        let bad = Field::zeros(g.len(), 2);
        assert!(matches!(transform_state(&sim, &bad), Err(HypspecError::DimensionMismatch { .. })));
        let zero = Field::zeros(g.len(), 1);
        assert_eq!(transform_state(&sim, &zero).unwrap(), zero);
    }
}
