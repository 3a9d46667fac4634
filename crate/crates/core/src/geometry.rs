//! Travel-time coordinate `eta(zeta) = ∫_0^zeta 1/lambda0` and the nested
//! integrals `Omega_m` that enter the Jordan-chain eigenfunctions.
//!
//! Everything is tabulated on one uniform master grid with composite Simpson
//! quadrature. Between nodes the tables are evaluated by cubic Hermite
//! interpolation using the exact derivatives `eta' = 1/lambda0` and
//! `Omega_m' = Omega_{m-1}/lambda0`.

use crate::error::{HypspecError, Result};
use crate::interp::{hermite, hermite_slope};
use crate::profile::CoefficientProfile;
use crate::quadrature::{cumulative_simpson, simpson_weights};
use crate::systems::ValidatedSystem;

/// Default number of master-grid intervals.
pub const DEFAULT_GRID_N: usize = 2048;

/// Uniform grid `zeta_i = i / n_intervals` on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MasterGrid {
    n_intervals: usize,
}

impl MasterGrid {
    pub fn new(n_intervals: usize) -> Result<Self> {
        if n_intervals < 16 || n_intervals % 2 != 0 {
            return Err(HypspecError::InvalidArgument(format!(
                "grid size N = {n_intervals} must be even and at least 16"
            )));
        }
        Ok(MasterGrid { n_intervals })
    }

    pub fn intervals(&self) -> usize {
        self.n_intervals
    }

    pub fn len(&self) -> usize {
        self.n_intervals + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        1.0 / self.n_intervals as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.n_intervals {
            1.0
        } else {
            i as f64 / self.n_intervals as f64
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }
}

#[derive(Debug, Clone)]
pub struct GeometryTables {
    grid: MasterGrid,
    lambda0: CoefficientProfile,
    lambda_values: Vec<f64>,
    inv_lambda: Vec<f64>,
    eta_values: Vec<f64>,
    /// `omega_tables[m - 1]` holds `Omega_m` at the nodes.
    omega_tables: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

/// Tabulates `eta` and `Omega_1..Omega_{m_max}` on `n_intervals` uniform intervals.
pub fn build_geometry(system: &ValidatedSystem, n_intervals: usize, m_max: usize) -> Result<GeometryTables> {
    let grid = MasterGrid::new(n_intervals)?;
    if m_max == 0 {
        return Err(HypspecError::InvalidArgument("m_max must be at least 1".into()));
    }
    let h = grid.step();
    let lambda0 = system.lambda0().clone();
    let lambda_values: Vec<f64> = (0..grid.len()).map(|i| lambda0.eval(grid.node(i))).collect();
    let inv_lambda: Vec<f64> = lambda_values.iter().map(|v| 1.0 / v).collect();
    let eta_values = cumulative_simpson(&inv_lambda, h);

    let mut omega_tables: Vec<Vec<f64>> = Vec::with_capacity(m_max);
    let mut previous = vec![1.0; grid.len()];
    for _ in 0..m_max {
        let integrand: Vec<f64> = previous.iter().zip(&inv_lambda).map(|(o, g)| o * g).collect();
        let next = cumulative_simpson(&integrand, h);
        omega_tables.push(next.clone());
        previous = next;
    }

    Ok(GeometryTables {
        grid,
        lambda0,
        lambda_values,
        inv_lambda,
        eta_values,
        omega_tables,
        weights: simpson_weights(n_intervals, h),
    })
}

impl GeometryTables {
    pub fn grid(&self) -> MasterGrid {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn lambda0(&self) -> &CoefficientProfile {
        &self.lambda0
    }

    pub fn lambda_values(&self) -> &[f64] {
        &self.lambda_values
    }

    pub fn eta_values(&self) -> &[f64] {
        &self.eta_values
    }

    /// `eta(1)`, the crossing time of the domain.
    pub fn eta1(&self) -> f64 {
        *self.eta_values.last().unwrap()
    }

    pub fn m_max(&self) -> usize {
        self.omega_tables.len()
    }

    /// Node values of `Omega_m`; `m = 0` is not stored (it is identically 1).
    pub fn omega_values(&self, m: usize) -> &[f64] {
        &self.omega_tables[m - 1]
    }

    /// Simpson weights of the master grid.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn interval(&self, zeta: f64) -> (usize, Option<usize>) {
        let n = self.grid.intervals();
        let s = (zeta * n as f64).clamp(0.0, n as f64);
        let i = (s.floor() as usize).min(n - 1);
        let exact = if zeta == self.grid.node(i) {
            Some(i)
        } else if zeta == self.grid.node(i + 1) {
            Some(i + 1)
        } else {
            None
        };
        (i, exact)
    }

    pub fn eta(&self, zeta: f64) -> f64 {
        let (i, exact) = self.interval(zeta);
        if let Some(j) = exact {
            return self.eta_values[j];
        }
        hermite(
            self.grid.node(i),
            self.grid.node(i + 1),
            self.eta_values[i],
            self.eta_values[i + 1],
            self.inv_lambda[i],
            self.inv_lambda[i + 1],
            zeta,
        )
    }

    fn eta_slope(&self, zeta: f64) -> f64 {
        let (i, _) = self.interval(zeta);
        hermite_slope(
            self.grid.node(i),
            self.grid.node(i + 1),
            self.eta_values[i],
            self.eta_values[i + 1],
            self.inv_lambda[i],
            self.inv_lambda[i + 1],
            zeta,
        )
    }

    /// `Omega_m(zeta)`, with `Omega_0 = 1`.
    ///
    /// # Panics
    /// If `m` exceeds the tabulated `m_max`.
    pub fn omega(&self, m: usize, zeta: f64) -> f64 {
        if m == 0 {
            return 1.0;
        }
        let table = &self.omega_tables[m - 1];
        let (i, exact) = self.interval(zeta);
        if let Some(j) = exact {
            return table[j];
        }
        let lower = |j: usize| {
            if m == 1 {
                1.0
            } else {
                self.omega_tables[m - 2][j]
            }
        };
        hermite(
            self.grid.node(i),
            self.grid.node(i + 1),
            table[i],
            table[i + 1],
            self.inv_lambda[i] * lower(i),
            self.inv_lambda[i + 1] * lower(i + 1),
            zeta,
        )
    }

    /// Inverse travel time: the `zeta` with `eta(zeta) = s`.
    pub fn eta_inverse(&self, s: f64) -> Result<f64> {
        let eta1 = self.eta1();
        if !(0.0..=eta1).contains(&s) {
            return Err(HypspecError::OutOfRange { value: s, lo: 0.0, hi: eta1 });
        }
        let i = match self.eta_values.binary_search_by(|p| p.total_cmp(&s)) {
            Ok(j) => return Ok(self.grid.node(j)),
            Err(j) => j - 1,
        };
        let (mut lo, mut hi) = (self.grid.node(i), self.grid.node(i + 1));
        let tol = 1e-14 * eta1.max(1.0);
        // linear guess, then safeguarded Newton
        let (e0, e1) = (self.eta_values[i], self.eta_values[i + 1]);
        let mut z = lo + (hi - lo) * (s - e0) / (e1 - e0);
        for _ in 0..100 {
            let r = self.eta(z) - s;
            if r.abs() <= tol {
                break;
            }
            if r > 0.0 {
                hi = z;
            } else {
                lo = z;
            }
            let slope = self.eta_slope(z);
            let newton = z - r / slope;
            z = if slope > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo <= f64::EPSILON * hi.max(1e-300) {
                break;
            }
        }
        Ok(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, CMatrix};
    use crate::profile::MatrixProfile;
    use crate::systems::{validate_system, SystemSpec};

    fn system(lambda0: CoefficientProfile) -> ValidatedSystem {
        validate_system(SystemSpec {
            n: 1,
            lambda0,
            m: MatrixProfile::zeros(1),
            k: CMatrix::from_element(1, 1, c(1.0, 0.0)),
            l: CMatrix::from_element(1, 1, c(-1.0, 0.0)),
        })
        .unwrap()
    }

    #[test]
    fn unit_speed_tables() {
        let g = build_geometry(&system(CoefficientProfile::constant(1.0)), 100, 4).unwrap();
        assert!((g.eta1() - 1.0).abs() < 1e-14);
        let mut fact = 1.0;
        for m in 1..=4 {
            fact *= m as f64;
            for &z in &[0.0_f64, 0.37, 0.5, 1.0] {
                let expect = z.powi(m as i32) / fact;
                assert!((g.omega(m, z) - expect).abs() < 1e-10, "m = {m}, z = {z}, err = {:e}", g.omega(m, z) - expect);
            }
        }
    }

    #[test]
    fn speed_two_tables() {
        let g = build_geometry(&system(CoefficientProfile::constant(2.0)), 64, 2).unwrap();
        assert!((g.eta1() - 0.5).abs() < 1e-15);
        assert!((g.omega(1, 1.0) - 0.5).abs() < 1e-15);
        assert!((g.omega(2, 1.0) - 0.125).abs() < 1e-15);
        assert!((g.eta_inverse(0.25).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_grid_and_range() {
        let v = system(CoefficientProfile::constant(1.0));
        assert!(build_geometry(&v, 15, 1).is_err());
        assert!(build_geometry(&v, 8, 1).is_err());
        assert!(build_geometry(&v, 16, 0).is_err());
        let g = build_geometry(&v, 16, 1).unwrap();
        assert!(matches!(g.eta_inverse(1.5), Err(HypspecError::OutOfRange { .. })));
        assert!(matches!(g.eta_inverse(-0.1), Err(HypspecError::OutOfRange { .. })));
        assert!((g.eta_inverse(0.25).unwrap() - 0.25).abs() < 1e-14);
    }
}
