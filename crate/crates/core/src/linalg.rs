//! Small dense complex linear-algebra helpers on top of nalgebra.

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Singular values sorted in decreasing order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Reciprocal 2-norm condition number `sigma_min / sigma_max` (0 for the zero matrix).
pub fn reciprocal_condition(m: &CMatrix) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&max), Some(&min)) if max > 0.0 => min / max,
        _ => 0.0,
    }
}

/// Orthonormal basis of the numerical null space of a square matrix.
///
/// A singular value counts as zero when it is at most `tol * max(1, sigma_max)`.
pub fn null_space(m: &CMatrix, tol: f64) -> Vec<CVector> {
    let n = m.ncols();
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let s = &svd.singular_values;
    let smax = s.iter().fold(0.0_f64, |a, &b| a.max(b));
    let cutoff = tol * smax.max(1.0);
    let mut out = Vec::new();
    // rows of v_t beyond the returned singular values span the kernel too
    for i in 0..v_t.nrows() {
        let sigma = if i < s.len() { s[i] } else { 0.0 };
        if sigma <= cutoff {
            out.push(v_t.row(i).adjoint().into_owned());
        }
    }
    debug_assert!(out.len() <= n);
    out
}

/// Orthonormal basis for the span of `vectors` (rank decided at `tol`).
pub fn orthonormal_span(vectors: &[CVector], dim: usize, tol: f64) -> Vec<CVector> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let m = CMatrix::from_columns(vectors);
    let svd = m.svd(true, false);
    let u = svd.u.expect("u requested");
    let s = &svd.singular_values;
    let smax = s.iter().fold(0.0_f64, |a, &b| a.max(b));
    let cutoff = tol * smax.max(1.0);
    (0..s.len())
        .filter(|&i| s[i] > cutoff)
        .map(|i| u.column(i).into_owned())
        .filter(|v| v.len() == dim)
        .collect()
}

/// Least-squares solve of `basis * beta = rhs`; returns `beta` and the residual norm.
pub fn least_squares(basis: &[CVector], rhs: &CVector, tol: f64) -> (CVector, f64) {
    if basis.is_empty() {
        return (CVector::zeros(0), rhs.norm());
    }
    let a = CMatrix::from_columns(basis);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().fold(0.0_f64, |x, &y| x.max(y));
    let beta = svd
        .solve(rhs, tol * smax.max(f64::MIN_POSITIVE))
        .unwrap_or_else(|_| CVector::zeros(basis.len()));
    let res = (&a * &beta - rhs).norm();
    (beta, res)
}

/// Rescale `v` to unit norm and rotate its phase so the first component with
/// modulus above `tol` is real and positive.
pub fn normalize_phase(v: &CVector, tol: f64) -> CVector {
    let norm = v.norm();
    if norm == 0.0 {
        return v.clone();
    }
    let u = v.unscale(norm);
    let pivot = u
        .iter()
        .find(|z| z.norm() > tol)
        .copied()
        .or_else(|| {
            u.iter()
                .copied()
                .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        })
        .unwrap_or(ONE);
    let phase = pivot.conj() / pivot.norm();
    u * phase
}

/// Frobenius norm of `a - I`.
pub fn identity_defect(a: &CMatrix) -> f64 {
    let n = a.nrows();
    (a - CMatrix::identity(n, n)).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rcond_of_identity_and_singular() {
        assert!((reciprocal_condition(&CMatrix::identity(3, 3)) - 1.0).abs() < 1e-15);
        assert_eq!(reciprocal_condition(&CMatrix::zeros(2, 2)), 0.0);
        let m = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]);
        assert!(reciprocal_condition(&m) < 1e-15);
    }

    #[test]
    fn null_space_of_rank_one() {
        let m = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ONE, ONE]);
        let ns = null_space(&m, 1e-10);
        assert_eq!(ns.len(), 1);
        assert!((&m * &ns[0]).norm() < 1e-12);
    }

    #[test]
    fn phase_normalization_makes_first_component_positive() {
        let v = CVector::from_vec(vec![c(0.0, 2.0), c(1.0, 1.0)]);
        let u = normalize_phase(&v, 1e-8);
        assert!((u.norm() - 1.0).abs() < 1e-14);
        assert!(u[0].im.abs() < 1e-15 && u[0].re > 0.0);
    }

    #[test]
    fn phase_normalization_skips_tiny_leading_entry() {
        let v = CVector::from_vec(vec![c(1e-12, 0.0), c(0.0, -3.0)]);
        let u = normalize_phase(&v, 1e-8);
        assert!(u[1].im.abs() < 1e-15 && u[1].re > 0.0);
    }
}
