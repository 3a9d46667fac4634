//! Co-current heat exchanger
//!
//! ```text
//! d/dt T_i = -v d/dzeta T_i + alpha_1 (T_e - T_i)
//! d/dt T_e = -v d/dzeta T_e + alpha_2 (T_i - T_e)
//! ```
//!
//! with boundary feedback of gain `kappa`. Everything here is evaluated from
//! closed forms with adaptive quadrature and serves as an independent check on
//! the generic pipeline.

use serde::Serialize;

use crate::analysis::{Analysis, AnalysisOptions};
use crate::error::{HypspecError, Result};
use crate::linalg::{c, CMatrix, ONE, ZERO};
use crate::profile::{CoefficientProfile, MatrixProfile};
use crate::quadrature::adaptive_gk;
use crate::systems::{ClassificationTag, SystemSpec};

/// Absolute tolerance of the closed-form quadratures.
pub const QUAD_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct HeatExchangerSpec {
    alpha1: CoefficientProfile,
    alpha2: CoefficientProfile,
    v: CoefficientProfile,
    kappa: f64,
}

fn positive(name: &str, p: &CoefficientProfile) -> Result<()> {
    let (min, at) = p.sampled_minimum();
    if !(min > 0.0 && min.is_finite()) {
        return Err(HypspecError::InvalidArgument(format!(
            "{name} must be positive on [0, 1], found {min} at zeta = {at}"
        )));
    }
    Ok(())
}

impl HeatExchangerSpec {
    pub fn new(alpha1: CoefficientProfile, alpha2: CoefficientProfile, v: CoefficientProfile, kappa: f64) -> Result<Self> {
        positive("alpha1", &alpha1)?;
        positive("alpha2", &alpha2)?;
        positive("v", &v)?;
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(HypspecError::InvalidArgument(format!("kappa must be positive, got {kappa}")));
        }
        Ok(HeatExchangerSpec {
            alpha1,
            alpha2,
            v,
            kappa,
        })
    }

    /// Unit transfer coefficients and speed.
    pub fn baseline(kappa: f64) -> Result<Self> {
        let one = CoefficientProfile::constant(1.0);
        Self::new(one.clone(), one.clone(), one, kappa)
    }

    pub fn alpha1(&self) -> &CoefficientProfile {
        &self.alpha1
    }

    pub fn alpha2(&self) -> &CoefficientProfile {
        &self.alpha2
    }

    pub fn v(&self) -> &CoefficientProfile {
        &self.v
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        Self::new(self.alpha1.clone(), self.alpha2.clone(), self.v.clone(), kappa)
    }

    /// `∫_0^zeta f`, split at the profiles' breakpoints.
    fn integrate<F: Fn(f64) -> f64>(&self, f: F, zeta: f64) -> f64 {
        let mut cuts: Vec<f64> = [&self.alpha1, &self.alpha2, &self.v]
            .iter()
            .flat_map(|p| p.breakpoints().iter().copied())
            .filter(|&b| b < zeta)
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut total = 0.0;
        let mut a = 0.0;
        for b in cuts.into_iter().chain(std::iter::once(zeta)) {
            total += adaptive_gk(&f, a, b, QUAD_TOL);
            a = b;
        }
        total
    }

    /// `h(zeta) = -∫_0^zeta (alpha_1 + alpha_2)/v`.
    pub fn h(&self, zeta: f64) -> f64 {
        -self.integrate(|x| (self.alpha1.eval(x) + self.alpha2.eval(x)) / self.v.eval(x), zeta)
    }

    /// `∫_0^zeta e^h alpha_i / v` for `i = 1, 2`.
    pub fn transfer_integral(&self, i: usize, zeta: f64) -> f64 {
        let alpha = if i == 1 { &self.alpha1 } else { &self.alpha2 };
        self.integrate(|x| self.h(x).exp() * alpha.eval(x) / self.v.eval(x), zeta)
    }

    /// Crossing time `∫_0^1 1/v`.
    pub fn eta1(&self) -> f64 {
        self.integrate(|x| 1.0 / self.v.eval(x), 1.0)
    }
}

pub fn hx_to_system(hx: &HeatExchangerSpec) -> SystemSpec {
    let real = |d: [f64; 4]| CMatrix::from_row_slice(2, 2, &d.map(|x| c(x, 0.0)));
    let k = hx.kappa;
    SystemSpec {
        n: 2,
        lambda0: hx.v.clone(),
        m: MatrixProfile::Combination(vec![
            (hx.alpha1.clone(), real([-1.0, 1.0, 0.0, 0.0])),
            (hx.alpha2.clone(), real([0.0, 0.0, 1.0, -1.0])),
        ]),
        k: real([-1.0, 0.0, 0.0, 1.0]),
        l: real([-k, k, 0.0, -1.0]),
    }
}

/// `P(zeta) = [[P_1, P_2 - e^h], [P_1 - e^h, P_2]]`, `P_i = 1 - ∫ e^h alpha_i / v`.
pub fn hx_closed_form_p(hx: &HeatExchangerSpec, zeta: f64) -> CMatrix {
    if zeta == 0.0 {
        return CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ONE]);
    }
    let eh = hx.h(zeta).exp();
    let p1 = 1.0 - hx.transfer_integral(1, zeta);
    let p2 = 1.0 - hx.transfer_integral(2, zeta);
    CMatrix::from_row_slice(2, 2, &[c(p1, 0.0), c(p2 - eh, 0.0), c(p1 - eh, 0.0), c(p2, 0.0)])
}

/// `(lambda_1, lambda_2)`, the eigenvalues of `A_d`, with `lambda_1 > 0 > lambda_2`.
pub fn hx_eigenvalues(hx: &HeatExchangerSpec) -> (f64, f64) {
    let keh = hx.kappa * hx.h(1.0).exp();
    let i2 = hx.transfer_integral(2, 1.0);
    let rho = (-1.0 + keh + i2).powi(2) + 4.0 * keh;
    let base = 1.0 - keh - i2;
    (0.5 * (base + rho.sqrt()), 0.5 * (base - rho.sqrt()))
}

/// `kappa* = e^{-h(1)} (2 - ∫_0^1 e^h alpha_2 / v) / 2`; stable iff `kappa < kappa*`.
pub fn hx_kappa_threshold(hx: &HeatExchangerSpec) -> f64 {
    0.5 * (-hx.h(1.0)).exp() * (2.0 - hx.transfer_integral(2, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HxReport {
    pub kappa: f64,
    pub classification: ClassificationTag,
    pub lambda1: f64,
    pub lambda2: f64,
    pub kappa_star: f64,
    pub eta1: f64,
    pub growth_bound: f64,
    pub stable: bool,
    /// Eigenvalues of `A_d` from the generic pipeline, as `[re, im]`, by decreasing modulus.
    pub generic_eigenvalues: Vec<[f64; 2]>,
    /// Largest distance between closed-form and generic eigenvalues.
    pub eigenvalue_mismatch: f64,
    /// Largest entry difference between closed-form and generic `P(1)`.
    pub p1_mismatch: f64,
    pub consistent: bool,
}

/// Agreement required between closed forms and the generic pipeline.
pub const CROSS_CHECK_TOL: f64 = 1e-8;

/// Closed-form results cross-checked against the generic pipeline.
pub fn hx_report(hx: &HeatExchangerSpec, options: AnalysisOptions) -> Result<HxReport> {
    let (lambda1, lambda2) = hx_eigenvalues(hx);
    let kappa_star = hx_kappa_threshold(hx);
    let eta1 = hx.eta1();
    let radius = lambda1.abs().max(lambda2.abs());
    let analysis = Analysis::new(hx_to_system(hx), options)?;
    let p1 = hx_closed_form_p(hx, 1.0);
    let p1_mismatch = (analysis.similarity.p1() - &p1).iter().map(|d| d.norm()).fold(0.0, f64::max);
    let generic: Vec<_> = analysis
        .spectrum
        .eigenstructure
        .eigenvalues()
        .iter()
        .flat_map(|e| std::iter::repeat(e.value).take(e.algebraic))
        .collect();
    let closed = [c(lambda1, 0.0), c(lambda2, 0.0)];
    let eigenvalue_mismatch = closed
        .iter()
        .map(|l| generic.iter().map(|g| (g - l).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    Ok(HxReport {
        kappa: hx.kappa,
        classification: analysis.classification.tag,
        lambda1,
        lambda2,
        kappa_star,
        eta1,
        growth_bound: radius.ln() / eta1,
        stable: radius < 1.0,
        generic_eigenvalues: generic.iter().map(|g| [g.re, g.im]).collect(),
        eigenvalue_mismatch,
        p1_mismatch,
        consistent: eigenvalue_mismatch <= CROSS_CHECK_TOL && p1_mismatch <= CROSS_CHECK_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{classify, validate_system, DEFAULT_SINGULAR_TOL};

    // (1 - e^{-2}) / 2 and derived quantities, from 30-digit arithmetic
    const I2: f64 = 0.432_332_358_381_693_654;
    const P_DIAG: f64 = 0.567_667_641_618_306_346;
    const LAMBDA1: f64 = 0.642_854_707_584_313_238;
    const LAMBDA2: f64 = -0.210_522_349_202_619_584;
    const KAPPA_STAR: f64 = 5.791_792_074_197_987_67;

    #[test]
    fn baseline_closed_forms() {
        let hx = HeatExchangerSpec::baseline(1.0).unwrap();
        assert!((hx.h(1.0) + 2.0).abs() < 1e-14);
        assert!((hx.transfer_integral(2, 1.0) - I2).abs() < 1e-13);
        let p = hx_closed_form_p(&hx, 1.0);
        assert!((p[(0, 0)].re - P_DIAG).abs() < 1e-12);
        assert!((p[(1, 1)].re - P_DIAG).abs() < 1e-12);
        assert!((p[(0, 1)].re - I2).abs() < 1e-12);
        assert!((p[(1, 0)].re - I2).abs() < 1e-12);
        assert_eq!(hx_closed_form_p(&hx, 0.0), CMatrix::identity(2, 2));
        let (l1, l2) = hx_eigenvalues(&hx);
        assert!((l1 - LAMBDA1).abs() < 1e-12 && (l2 - LAMBDA2).abs() < 1e-12);
        assert!((hx_kappa_threshold(&hx) - KAPPA_STAR).abs() < 1e-11);
    }

    #[test]
    fn baseline_system() {
        let hx = HeatExchangerSpec::baseline(1.0).unwrap();
        let sys = validate_system(hx_to_system(&hx)).unwrap();
        let m = sys.m_at(0.4);
        let expect = CMatrix::from_row_slice(2, 2, &[c(-1.0, 0.0), ONE, ONE, c(-1.0, 0.0)]);
        assert_eq!(m, expect);
        assert_eq!(classify(&sys, DEFAULT_SINGULAR_TOL).tag, ClassificationTag::RieszSpectralGroup);
    }

    #[test]
    fn rejects_nonpositive_kappa() {
        assert!(HeatExchangerSpec::baseline(0.0).is_err());
        assert!(HeatExchangerSpec::baseline(-1.0).is_err());
        let one = CoefficientProfile::constant(1.0);
        assert!(HeatExchangerSpec::new(one.clone(), CoefficientProfile::affine(1.0, -1.0), one, 1.0).is_err());
    }

    #[test]
    fn reports_across_threshold() {
        let opts = AnalysisOptions {
            grid_n: 256,
            ..AnalysisOptions::default()
        };
        let r = hx_report(&HeatExchangerSpec::baseline(1.0).unwrap(), opts).unwrap();
        assert!(r.stable && r.growth_bound < 0.0 && r.consistent, "{r:?}");
        let r = hx_report(&HeatExchangerSpec::baseline(6.0).unwrap(), opts).unwrap();
        assert!(!r.stable && r.consistent, "{r:?}");
    }
}
