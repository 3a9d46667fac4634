//! Time evolution of `z_t = -(lambda0 z)_zeta` with `w(0) = A_d w(eta(1))`,
//! where `w = lambda0 z` is written in the travel-time coordinate.
//!
//! Two independent methods are provided: the exact characteristics solution
//! and the truncated modal expansion `sum c_kl e^{mu_kl t} phi_kl`.

use serde::Serialize;

use crate::eigenfunctions::{build_weight, modal_sum, project_initial_state, ModalBasis};
use crate::error::{HypspecError, Result};
use crate::field::{x_norm, Field};
use crate::geometry::GeometryTables;
use crate::interp::{cubic_weights, locate};
use crate::linalg::{CMatrix, CVector, C64};
use crate::similarity::{inverse_transform, transform_state, SimilaritySolution};
use crate::spectrum::BoundaryEigenStructure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Method {
    Oracle,
    Modal { l_max: usize },
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Oracle => write!(f, "oracle"),
            Method::Modal { l_max } => write!(f, "modal({l_max})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimulationResult {
    pub times: Vec<f64>,
    pub grid: Vec<f64>,
    pub states: Vec<Field>,
    pub method: Method,
}

fn check_time(t: f64) -> Result<()> {
    if t < 0.0 || !t.is_finite() {
        return Err(HypspecError::NegativeTime(t));
    }
    Ok(())
}

/// Exact solution along characteristics for fixed initial data.
#[derive(Debug, Clone)]
pub struct CharacteristicsOracle<'a> {
    geom: &'a GeometryTables,
    a_d: CMatrix,
    z0: Field,
    w0: Field,
}

impl<'a> CharacteristicsOracle<'a> {
    pub fn new(geom: &'a GeometryTables, a_d: &CMatrix, z0: &Field) -> Result<Self> {
        let n = a_d.nrows();
        z0.check_shape("initial state", geom.len(), n)?;
        let lam = geom.lambda_values();
        let mut w0 = z0.clone();
        for (i, &l) in lam.iter().enumerate() {
            w0.node_mut(i).iter_mut().for_each(|v| *v *= l);
        }
        Ok(CharacteristicsOracle {
            geom,
            a_d: a_d.clone(),
            z0: z0.clone(),
            w0,
        })
    }

    /// `w0` at travel time `s` in `[0, eta(1)]`, by four-point Lagrange
    /// interpolation in `eta`.
    pub fn w0_at(&self, s: f64) -> CVector {
        let eta = self.geom.eta_values();
        let i = locate(eta, s);
        if eta[i] == s {
            return self.w0.node_vector(i);
        }
        if eta[i + 1] == s {
            return self.w0.node_vector(i + 1);
        }
        let (start, w) = cubic_weights(eta, s);
        let mut out = CVector::zeros(self.w0.components());
        for (a, wa) in w.iter().enumerate() {
            out += self.w0.node_vector(start + a) * C64::from(*wa);
        }
        out
    }

    /// `z(., t)` at the master-grid nodes.
    ///
    /// At `t > 0` the outflow node takes its limit from inside the domain,
    /// so incompatible data give `z(1, t) = lim z(zeta, t)` as `zeta -> 1`.
    pub fn state(&self, t: f64) -> Result<Field> {
        check_time(t)?;
        if t == 0.0 {
            return Ok(self.z0.clone());
        }
        let eta = self.geom.eta_values();
        let eta1 = self.geom.eta1();
        let lam = self.geom.lambda_values();
        let last = eta.len() - 1;
        let n = self.a_d.nrows();
        let mut powers: Vec<CMatrix> = vec![CMatrix::identity(n, n)];
        let mut out = Field::zeros(eta.len(), n);
        for (i, &s) in eta.iter().enumerate() {
            let mut x = (t - s) / eta1;
            if (x - x.round()).abs() < 1e-12 {
                x = x.round();
            }
            let m = if i == last { x.floor() + 1.0 } else { x.ceil() }.max(0.0);
            let arg = (s - t + m * eta1).clamp(0.0, eta1);
            let m = m as usize;
            while powers.len() <= m {
                let next = &self.a_d * powers.last().unwrap();
                powers.push(next);
            }
            let value = &powers[m] * self.w0_at(arg) / C64::from(lam[i]);
            out.node_mut(i).copy_from_slice(value.as_slice());
        }
        Ok(out)
    }
}

/// `z(., t)` by characteristics; see [`CharacteristicsOracle`].
pub fn characteristics_oracle(geom: &GeometryTables, a_d: &CMatrix, z0: &Field, t: f64) -> Result<Field> {
    CharacteristicsOracle::new(geom, a_d, z0)?.state(t)
}

/// Truncated modal expansion for several output times (diagonalizable `A_d`).
pub fn modal_simulate(
    es: &BoundaryEigenStructure,
    geom: &GeometryTables,
    z0: &Field,
    times: &[f64],
    l_max: usize,
) -> Result<Vec<Field>> {
    for &t in times {
        check_time(t)?;
    }
    let weight = build_weight(es, geom)?;
    let basis = ModalBasis::new(es, geom, l_max)?;
    z0.check_shape("initial state", geom.len(), es.a_d().nrows())?;
    let coefficients = project_initial_state(z0, &basis, &weight, geom)?;
    Ok(times.iter().map(|&t| modal_sum(&basis, &coefficients, t)).collect())
}

/// Evolves the transformed state for every time in `times`.
pub fn simulate(
    es: &BoundaryEigenStructure,
    geom: &GeometryTables,
    z0: &Field,
    times: &[f64],
    method: Method,
) -> Result<SimulationResult> {
    let states = match method {
        Method::Oracle => {
            let oracle = CharacteristicsOracle::new(geom, es.a_d(), z0)?;
            times.iter().map(|&t| oracle.state(t)).collect::<Result<Vec<_>>>()?
        }
        Method::Modal { l_max } => modal_simulate(es, geom, z0, times, l_max)?,
    };
    Ok(SimulationResult {
        times: times.to_vec(),
        grid: geom.grid().nodes(),
        states,
        method,
    })
}

/// Evolves original-variable data: `z0 = P^{-1} z~0`, evolve, `z~ = P z`.
pub fn simulate_original(
    es: &BoundaryEigenStructure,
    sim: &SimilaritySolution,
    geom: &GeometryTables,
    ztilde0: &Field,
    times: &[f64],
    method: Method,
) -> Result<SimulationResult> {
    let z0 = transform_state(sim, ztilde0)?;
    let mut result = simulate(es, geom, &z0, times, method)?;
    result.states = result
        .states
        .iter()
        .map(|z| inverse_transform(sim, z))
        .collect::<Result<_>>()?;
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Comparison {
    pub absolute: f64,
    pub relative: f64,
}

/// Difference of two states in the `lambda0`-weighted norm. `relative` is
/// taken against the first state (and equals `absolute` if that is zero).
pub fn compare_methods(reference: &Field, other: &Field, geom: &GeometryTables) -> Result<Comparison> {
    reference.check_shape("reference state", geom.len(), reference.components())?;
    other.check_shape("compared state", geom.len(), reference.components())?;
    let absolute = x_norm(&reference.sub(other), geom);
    let scale = x_norm(reference, geom);
    Ok(Comparison {
        absolute,
        relative: if scale > 0.0 { absolute / scale } else { absolute },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenfunctions::eigenfunction;
    use crate::geometry::build_geometry;
    use crate::linalg::c;
    use crate::profile::{CoefficientProfile, MatrixProfile};
    use crate::spectrum::{eigen_structure, DEFAULT_RANK_TOL};
    use crate::systems::{validate_system, SystemSpec};

    fn geometry_on(lambda0: CoefficientProfile, n: usize, intervals: usize) -> GeometryTables {
        let sys = validate_system(SystemSpec {
            n,
            lambda0,
            m: MatrixProfile::zeros(n),
            k: CMatrix::identity(n, n),
            l: -CMatrix::identity(n, n),
        })
        .unwrap();
        build_geometry(&sys, intervals, n).unwrap()
    }

    fn geometry(lambda0: CoefficientProfile, n: usize) -> GeometryTables {
        geometry_on(lambda0, n, 128)
    }

    fn scalar(x: f64) -> CMatrix {
        CMatrix::from_element(1, 1, c(x, 0.0))
    }

    #[test]
    fn zero_time_is_exact() {
        let g = geometry(CoefficientProfile::affine(1.0, 0.5), 1);
        let z0 = Field::from_node_fn(g.len(), 1, |i| CVector::from_element(1, c((i as f64).sin(), 0.1)));
        assert_eq!(characteristics_oracle(&g, &scalar(0.3), &z0, 0.0).unwrap(), z0);
        assert!(matches!(
            characteristics_oracle(&g, &scalar(0.3), &z0, -1.0),
            Err(HypspecError::NegativeTime(_))
        ));
    }

    #[test]
    fn full_period_with_identity() {
        let g = geometry(CoefficientProfile::constant(1.0), 1);
        let z0 = Field::from_node_fn(g.len(), 1, |i| {
            let z = g.grid().node(i);
            CVector::from_element(1, c((2.0 * std::f64::consts::PI * z).cos(), 0.0))
        });
        let z1 = characteristics_oracle(&g, &scalar(1.0), &z0, 1.0).unwrap();
        assert!(z1.sub(&z0).max_abs() < 1e-12);
    }

    #[test]
    fn one_reflection_halves_constant() {
        let g = geometry(CoefficientProfile::constant(1.0), 1);
        let z0 = Field::from_node_fn(g.len(), 1, |_| CVector::from_element(1, c(1.0, 0.0)));
        let z1 = characteristics_oracle(&g, &scalar(0.5), &z0, 1.0).unwrap();
        for i in 0..g.len() {
            assert!((z1.node(i)[0] - c(0.5, 0.0)).norm() < 1e-14, "node {i}");
        }
    }

    #[test]
    fn eigenmode_evolves_by_exponential() {
        let g = geometry_on(CoefficientProfile::affine(1.0, 1.0), 1, 512);
        let es = eigen_structure(&scalar(0.6), DEFAULT_RANK_TOL).unwrap();
        let phi = eigenfunction(&es, &g, 1, 2).unwrap();
        let z0 = phi.sample(&g);
        let t = 0.37 * g.eta1();
        let expect = z0.scaled((phi.mu * t).exp());
        let oracle = characteristics_oracle(&g, es.a_d(), &z0, t).unwrap();
        let modal = modal_simulate(&es, &g, &z0, &[t], 3).unwrap().remove(0);
        let e_oracle = compare_methods(&expect, &oracle, &g).unwrap().relative;
        let e_modal = compare_methods(&expect, &modal, &g).unwrap().relative;
        let e_cross = compare_methods(&oracle, &modal, &g).unwrap().absolute;
        assert!(e_oracle < 1e-6, "{e_oracle:e}");
        assert!(e_modal < 1e-6, "{e_modal:e}");
        assert!(e_cross < 1e-5, "{e_cross:e}");
    }

    #[test]
    fn identical_states_compare_to_zero() {
        let g = geometry(CoefficientProfile::constant(1.0), 2);
        let z = Field::from_node_fn(g.len(), 2, |i| CVector::from_element(2, c(i as f64, 1.0)));
        let cmp = compare_methods(&z, &z, &g).unwrap();
        assert_eq!((cmp.absolute, cmp.relative), (0.0, 0.0));
        let short = Field::zeros(3, 2);
        assert!(matches!(
            compare_methods(&z, &short, &g),
            Err(HypspecError::DimensionMismatch { .. })
        ));
    }
}
