//! Vector fields sampled on the master grid.

use crate::error::{HypspecError, Result};
use crate::geometry::GeometryTables;
use crate::interp::cubic_weights;
use crate::linalg::{CVector, C64, ZERO};

/// `components`-vector per grid node, stored node-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    components: usize,
    values: Vec<C64>,
}

impl Field {
    pub fn zeros(nodes: usize, components: usize) -> Self {
        Field {
            components,
            values: vec![ZERO; nodes * components],
        }
    }

    pub fn from_node_fn<F: FnMut(usize) -> CVector>(nodes: usize, components: usize, mut f: F) -> Self {
        let mut values = Vec::with_capacity(nodes * components);
        for i in 0..nodes {
            let v = f(i);
            assert_eq!(v.len(), components, "node {i} has wrong component count");
            values.extend(v.iter().copied());
        }
        Field { components, values }
    }

    pub fn from_values(components: usize, values: Vec<C64>) -> Result<Self> {
        if components == 0 || values.len() % components != 0 {
            return Err(HypspecError::dims("field values", components, values.len()));
        }
        Ok(Field { components, values })
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn nodes(&self) -> usize {
        self.values.len() / self.components.max(1)
    }

    pub fn node(&self, i: usize) -> &[C64] {
        &self.values[i * self.components..(i + 1) * self.components]
    }

    pub fn node_mut(&mut self, i: usize) -> &mut [C64] {
        &mut self.values[i * self.components..(i + 1) * self.components]
    }

    pub fn node_vector(&self, i: usize) -> CVector {
        CVector::from_column_slice(self.node(i))
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// `self += alpha * other`
    pub fn add_scaled(&mut self, alpha: C64, other: &Field) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += alpha * b;
        }
    }

    pub fn scaled(&self, alpha: C64) -> Field {
        Field {
            components: self.components,
            values: self.values.iter().map(|v| v * alpha).collect(),
        }
    }

    pub fn sub(&self, other: &Field) -> Field {
        Field {
            components: self.components,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub(crate) fn check_shape(&self, what: &str, nodes: usize, components: usize) -> Result<()> {
        if self.components != components {
            return Err(HypspecError::dims(format!("{what} components"), components, self.components));
        }
        if self.nodes() != nodes {
            return Err(HypspecError::dims(format!("{what} nodes"), nodes, self.nodes()));
        }
        Ok(())
    }
}

/// Resamples a field given at strictly increasing nodes `zeta` (spanning
/// `[0, 1]`, at least four of them) onto `targets` by cubic Lagrange
/// interpolation.
pub fn resample_field(zeta: &[f64], field: &Field, targets: &[f64]) -> Result<Field> {
    if zeta.len() != field.nodes() {
        return Err(HypspecError::dims("resample nodes", field.nodes(), zeta.len()));
    }
    if zeta.len() < 4 {
        return Err(HypspecError::InvalidArgument(format!(
            "need at least 4 nodes to resample, got {}",
            zeta.len()
        )));
    }
    if zeta.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(HypspecError::InvalidArgument("resample nodes must be strictly increasing".into()));
    }
    let (lo, hi) = (zeta[0], zeta[zeta.len() - 1]);
    if lo.abs() > 1e-12 || (hi - 1.0).abs() > 1e-12 {
        return Err(HypspecError::InvalidArgument(format!(
            "resample nodes must span [0, 1], got [{lo}, {hi}]"
        )));
    }
    let nc = field.components();
    Ok(Field::from_node_fn(targets.len(), nc, |i| {
        let (start, w) = cubic_weights(zeta, targets[i]);
        let mut v = CVector::zeros(nc);
        for (a, wa) in w.iter().enumerate() {
            v += field.node_vector(start + a) * C64::from(*wa);
        }
        v
    }))
}

/// State-space inner product `<f, g>_X = ∫ lambda0 g^* f` (Simpson on the master grid).
pub fn x_inner(f: &Field, g: &Field, geom: &GeometryTables) -> C64 {
    let w = geom.weights();
    let lam = geom.lambda_values();
    (0..f.nodes()).fold(ZERO, |acc, i| {
        let dot = f.node(i).iter().zip(g.node(i)).fold(ZERO, |s, (a, b)| s + b.conj() * a);
        acc + dot * (w[i] * lam[i])
    })
}

/// Norm induced by [`x_inner`].
pub fn x_norm(f: &Field, geom: &GeometryTables) -> f64 {
    x_inner(f, f, geom).re.max(0.0).sqrt()
}
