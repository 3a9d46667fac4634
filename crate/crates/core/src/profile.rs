//! Coefficient profiles on `[0, 1]`: the transport speed and the coupling matrix.

use crate::error::{HypspecError, Result};
use crate::interp::{hermite, locate, pchip_slopes};
use crate::linalg::CMatrix;

/// Number of evaluation points used to estimate lower and upper bounds.
pub const BOUND_GRID: usize = 1001;

/// Positive scalar profile `lambda0(zeta)`.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientProfile {
    Constant(f64),
    /// `a + b * zeta`
    Affine { a: f64, b: f64 },
    /// Monotone cubic (Fritsch–Carlson) interpolation of node samples.
    Sampled(SampledProfile),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledProfile {
    nodes: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl SampledProfile {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Checks `0 = x_0 < x_1 < ... < x_N = 1`.
pub(crate) fn check_grid(what: &str, nodes: &[f64]) -> Result<()> {
    let increasing = nodes.windows(2).all(|w| w[1] > w[0]);
    if nodes.len() < 2 || !increasing || nodes[0] != 0.0 || *nodes.last().unwrap() != 1.0 {
        return Err(HypspecError::NonIncreasingGrid { what: what.into() });
    }
    Ok(())
}

impl CoefficientProfile {
    pub fn constant(value: f64) -> Self {
        CoefficientProfile::Constant(value)
    }

    pub fn affine(a: f64, b: f64) -> Self {
        CoefficientProfile::Affine { a, b }
    }

    pub fn sampled(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_grid("profile nodes", &nodes)?;
        if values.len() != nodes.len() {
            return Err(HypspecError::dims("profile samples", nodes.len(), values.len()));
        }
        let slopes = pchip_slopes(&nodes, &values);
        Ok(CoefficientProfile::Sampled(SampledProfile {
            nodes,
            values,
            slopes,
        }))
    }

    pub fn eval(&self, zeta: f64) -> f64 {
        match self {
            CoefficientProfile::Constant(v) => *v,
            CoefficientProfile::Affine { a, b } => a + b * zeta,
            CoefficientProfile::Sampled(p) => {
                let i = locate(&p.nodes, zeta);
                if zeta == p.nodes[i] {
                    return p.values[i];
                }
                if zeta == p.nodes[i + 1] {
                    return p.values[i + 1];
                }
                hermite(
                    p.nodes[i],
                    p.nodes[i + 1],
                    p.values[i],
                    p.values[i + 1],
                    p.slopes[i],
                    p.slopes[i + 1],
                    zeta,
                )
            }
        }
    }

    /// Interior points where the profile is only piecewise smooth.
    pub fn breakpoints(&self) -> &[f64] {
        match self {
            CoefficientProfile::Sampled(p) => &p.nodes[1..p.nodes.len() - 1],
            _ => &[],
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CoefficientProfile::Constant(_) => "constant",
            CoefficientProfile::Affine { .. } => "affine",
            CoefficientProfile::Sampled(_) => "sampled",
        }
    }

    /// Minimum over a 1001-point uniform grid and the profile's own nodes,
    /// returned with its location.
    pub fn sampled_minimum(&self) -> (f64, f64) {
        let mut best = (f64::INFINITY, 0.0);
        let mut visit = |z: f64| {
            let v = self.eval(z);
            // NaN counts as a violation
            if v < best.0 || v.is_nan() {
                best = (v, z);
            }
        };
        for i in 0..BOUND_GRID {
            visit(i as f64 / (BOUND_GRID - 1) as f64);
        }
        if let CoefficientProfile::Sampled(p) = self {
            p.nodes.iter().for_each(|&z| visit(z));
        }
        best
    }
}

/// Matrix-valued coupling profile `M(zeta)`.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixProfile {
    Constant(CMatrix),
    /// Entrywise linear interpolation between node matrices.
    Sampled { nodes: Vec<f64>, values: Vec<CMatrix> },
    /// `sum_i f_i(zeta) * C_i` with scalar profiles `f_i` and constant matrices `C_i`.
    Combination(Vec<(CoefficientProfile, CMatrix)>),
}

impl MatrixProfile {
    pub fn zeros(n: usize) -> Self {
        MatrixProfile::Constant(CMatrix::zeros(n, n))
    }

    pub fn sampled(nodes: Vec<f64>, values: Vec<CMatrix>) -> Result<Self> {
        check_grid("M", &nodes)?;
        if values.len() != nodes.len() {
            return Err(HypspecError::dims("M samples", nodes.len(), values.len()));
        }
        Ok(MatrixProfile::Sampled { nodes, values })
    }

    pub fn eval(&self, zeta: f64) -> CMatrix {
        match self {
            MatrixProfile::Constant(m) => m.clone(),
            MatrixProfile::Sampled { nodes, values } => {
                let i = locate(nodes, zeta);
                let t = ((zeta - nodes[i]) / (nodes[i + 1] - nodes[i])).clamp(0.0, 1.0);
                &values[i] * nalgebra::Complex::from(1.0 - t) + &values[i + 1] * nalgebra::Complex::from(t)
            }
            MatrixProfile::Combination(terms) => {
                let n = terms.first().map_or(0, |t| t.1.nrows());
                terms.iter().fold(CMatrix::zeros(n, n), |acc, (f, m)| {
                    acc + m * nalgebra::Complex::from(f.eval(zeta))
                })
            }
        }
    }

    /// Interior points where the profile is only piecewise smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            MatrixProfile::Constant(_) => Vec::new(),
            MatrixProfile::Sampled { nodes, .. } => nodes[1..nodes.len() - 1].to_vec(),
            MatrixProfile::Combination(terms) => terms.iter().flat_map(|(f, _)| f.breakpoints().to_vec()).collect(),
        }
    }

    /// Every stored matrix as `(rows, cols)`.
    pub(crate) fn shapes(&self) -> Vec<(usize, usize)> {
        match self {
            MatrixProfile::Constant(m) => vec![m.shape()],
            MatrixProfile::Sampled { values, .. } => values.iter().map(|m| m.shape()).collect(),
            MatrixProfile::Combination(terms) => terms.iter().map(|(_, m)| m.shape()).collect(),
        }
    }

    pub(crate) fn scalar_profiles(&self) -> Vec<&CoefficientProfile> {
        match self {
            MatrixProfile::Combination(terms) => terms.iter().map(|(f, _)| f).collect(),
            _ => Vec::new(),
        }
    }

    /// Largest entry modulus over `[0, 1]` (exact for constant and sampled
    /// kinds, a grid estimate for combinations).
    pub fn max_entry_magnitude(&self) -> f64 {
        let max_abs = |m: &CMatrix| m.iter().fold(0.0_f64, |a, z| a.max(z.norm()));
        match self {
            MatrixProfile::Constant(m) => max_abs(m),
            MatrixProfile::Sampled { values, .. } => values.iter().map(max_abs).fold(0.0, f64::max),
            MatrixProfile::Combination(_) => (0..BOUND_GRID)
                .map(|i| max_abs(&self.eval(i as f64 / (BOUND_GRID - 1) as f64)))
                .fold(0.0, f64::max),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn sampled_profile_reproduces_endpoints() {
        let p = CoefficientProfile::sampled(vec![0.0, 0.3, 1.0], vec![1.5, 2.0, 0.7]).unwrap();
        assert_eq!(p.eval(0.0), 1.5);
        assert_eq!(p.eval(1.0), 0.7);
        assert_eq!(p.eval(0.3), 2.0);
    }

    #[test]
    fn sampled_profile_rejects_bad_grids() {
        assert!(matches!(
            CoefficientProfile::sampled(vec![0.0, 0.5, 0.5, 1.0], vec![1.0; 4]),
            Err(HypspecError::NonIncreasingGrid { .. })
        ));
        assert!(matches!(
            CoefficientProfile::sampled(vec![0.1, 1.0], vec![1.0; 2]),
            Err(HypspecError::NonIncreasingGrid { .. })
        ));
    }

    #[test]
    fn affine_minimum_found() {
        let (v, z) = CoefficientProfile::affine(1.0, -2.0).sampled_minimum();
        assert_eq!(v, -1.0);
        assert_eq!(z, 1.0);
    }

    #[test]
    fn matrix_profile_linear_interpolation() {
        let a = CMatrix::from_element(1, 1, c(1.0, 0.0));
        let b = CMatrix::from_element(1, 1, c(3.0, 2.0));
        let m = MatrixProfile::sampled(vec![0.0, 1.0], vec![a, b]).unwrap();
        let mid = m.eval(0.5);
        assert!((mid[(0, 0)] - c(2.0, 1.0)).norm() < 1e-15);
        assert!((m.max_entry_magnitude() - 13f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn combination_profile() {
        let m = MatrixProfile::Combination(vec![(
            CoefficientProfile::affine(1.0, 1.0),
            CMatrix::identity(2, 2),
        )]);
        assert!((m.eval(0.5)[(1, 1)].re - 1.5).abs() < 1e-15);
    }
}
