#![allow(dead_code)]

use std::f64::consts::PI;

use hypspec_core::linalg::c;
use hypspec_core::{
    Analysis, AnalysisOptions, CMatrix, CVector, CoefficientProfile, Field, GeometryTables, MatrixProfile,
    SystemSpec, C64,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_lambda0(rng: &mut StdRng) -> CoefficientProfile {
    if rng.gen_bool(0.4) {
        CoefficientProfile::constant(rng.gen_range(0.6..1.6))
    } else {
        let a = rng.gen_range(0.7..1.4);
        CoefficientProfile::affine(a, a * rng.gen_range(-0.3..0.6))
    }
}

pub fn random_complex(rng: &mut StdRng, rows: usize, cols: usize, scale: f64) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale)
}

pub fn random_real(rng: &mut StdRng, n: usize, scale: f64) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0) * scale, 0.0))
}

pub fn random_m(rng: &mut StdRng, n: usize) -> MatrixProfile {
    match rng.gen_range(0..3) {
        0 => MatrixProfile::zeros(n),
        1 => MatrixProfile::Constant(random_complex(rng, n, n, 0.8)),
        _ => {
            let a = rng.gen_range(-1.0..1.0);
            let b = rng.gen_range(-1.0..1.0);
            MatrixProfile::Combination(vec![
                (CoefficientProfile::affine(a, b), random_real(rng, n, 0.8)),
                (CoefficientProfile::constant(1.0), random_complex(rng, n, n, 0.5)),
            ])
        }
    }
}

/// Random invertible matrix, comfortably away from singular.
pub fn well_conditioned(rng: &mut StdRng, n: usize) -> CMatrix {
    random_complex(rng, n, n, 0.5) + CMatrix::identity(n, n) * c(1.5, 0.0)
}

pub fn random_system(rng: &mut StdRng, n: usize) -> SystemSpec {
    SystemSpec {
        n,
        lambda0: random_lambda0(rng),
        m: random_m(rng, n),
        k: well_conditioned(rng, n),
        l: random_complex(rng, n, n, 1.0),
    }
}

/// Replaces the last row by a combination of the others (zero for n = 1).
pub fn rank_deficient(rng: &mut StdRng, m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let mut out = m.clone();
    let mut row = nalgebra::RowDVector::<C64>::zeros(n);
    for r in 0..n - 1 {
        row += m.row(r) * c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    out.set_row(n - 1, &row);
    out
}

pub fn analyze(spec: SystemSpec) -> Analysis {
    Analysis::new(spec, AnalysisOptions::default()).expect("pipeline")
}

/// Same system with `L` rescaled so that the spectral radius of `A_d` is `radius`.
pub fn with_spectral_radius(spec: SystemSpec, radius: f64) -> SystemSpec {
    let a = analyze(spec.clone());
    let r = a.spectrum.eigenstructure.spectral_radius();
    SystemSpec {
        l: spec.l * c(radius / r, 0.0),
        ..spec
    }
}

/// Same `lambda0`, `M`, `K` with `L` chosen so that `A_d = target`.
pub fn with_boundary_matrix(spec: SystemSpec, target: &CMatrix) -> SystemSpec {
    let a = analyze(spec.clone());
    let p1_inv = a.similarity.p1().clone().try_inverse().expect("P(1) invertible");
    SystemSpec {
        l: -(&spec.k * target * p1_inv),
        ..spec
    }
}

/// Random Riesz-spectral system with diagonalizable `A_d`.
pub fn random_diagonalizable(rng: &mut StdRng, n: usize) -> SystemSpec {
    loop {
        let spec = random_system(rng, n);
        let a = analyze(spec.clone());
        let es = &a.spectrum.eigenstructure;
        if a.classification.is_riesz_spectral() && es.is_diagonalizable() && es.n_distinct() == n {
            return spec;
        }
    }
}

pub fn random_stable_diagonalizable(rng: &mut StdRng, n: usize) -> SystemSpec {
    let radius = rng.gen_range(0.5..0.9);
    with_spectral_radius(random_diagonalizable(rng, n), radius)
}

/// Boundary matrix with one dominant eigenvalue and all others smaller by
/// at least four orders of magnitude.
pub fn dominant_boundary_matrix(rng: &mut StdRng, n: usize) -> CMatrix {
    let lead = rng.gen_range(0.4..0.95) * (c(0.0, rng.gen_range(-PI..PI))).exp();
    let diag: Vec<C64> = (0..n)
        .map(|i| {
            if i == 0 {
                lead
            } else {
                lead.norm() * rng.gen_range(1e-6..1e-4) * (c(0.0, rng.gen_range(-PI..PI))).exp()
            }
        })
        .collect();
    let v = well_conditioned(rng, n);
    let v_inv = v.clone().try_inverse().unwrap();
    v * CMatrix::from_diagonal(&CVector::from_vec(diag)) * v_inv
}

/// `sum_k a_k sum_l q^{|l|} e^{i l phase_k} phi_kl` in closed form: each
/// eigenvector carries a Poisson kernel in the normalized travel time.
pub fn poisson_data(analysis: &Analysis, q: f64, amplitudes: &[(C64, f64)]) -> Field {
    let geom: &GeometryTables = &analysis.geometry;
    let es = &analysis.spectrum.eigenstructure;
    let eta1 = geom.eta1();
    let lam = geom.lambda_values();
    let n = analysis.system.n();
    Field::from_node_fn(geom.len(), n, |i| {
        let x = geom.eta_values()[i] / eta1;
        let mut out = CVector::zeros(n);
        for (e, (a, phase)) in es.eigenvalues().iter().zip(amplitudes) {
            let kernel = (1.0 - q * q) / (1.0 - 2.0 * q * (2.0 * PI * x - phase).cos() + q * q);
            let decay = (-(c(e.modulus.ln(), e.theta)) * x).exp();
            out += e.chains[0].head() * (a * decay * (kernel * lam[0] / lam[i]));
        }
        out
    })
}

pub fn random_amplitudes(rng: &mut StdRng, count: usize) -> Vec<(C64, f64)> {
    (0..count)
        .map(|_| {
            (
                c(rng.gen_range(0.5..1.5), rng.gen_range(-0.5..0.5)),
                rng.gen_range(0.0..2.0 * PI),
            )
        })
        .collect()
}

/// Low-order random trigonometric data, not tied to any mode.
pub fn smooth_data(rng: &mut StdRng, geom: &GeometryTables, n: usize) -> Field {
    let terms: Vec<(f64, f64, CVector)> = (0..4)
        .map(|p| (p as f64, rng.gen_range(0.0..2.0 * PI), random_complex(rng, n, 1, 1.0).column(0).into_owned()))
        .collect();
    Field::from_node_fn(geom.len(), n, |i| {
        let z = geom.grid().node(i);
        let mut out = CVector::zeros(n);
        for (p, phase, b) in &terms {
            out += b * c((PI * p * z + phase).cos(), 0.0);
        }
        out
    })
}
