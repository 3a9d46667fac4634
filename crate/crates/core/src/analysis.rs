//! The full pipeline for one system, from validation to the spectrum.

use crate::error::Result;
use crate::geometry::{build_geometry, GeometryTables, DEFAULT_GRID_N};
use crate::linalg::CMatrix;
use crate::similarity::{solve_p, SimilaritySolution, DEFAULT_RTOL};
use crate::spectrum::{boundary_matrix, eigen_structure, SpectrumResult, DEFAULT_RANK_TOL};
use crate::systems::{classify, validate_system, SpectralClassification, SystemSpec, ValidatedSystem, DEFAULT_SINGULAR_TOL};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    /// Number of master-grid intervals (even).
    pub grid_n: usize,
    pub singular_tol: f64,
    pub rtol: f64,
    pub rank_tol: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            grid_n: DEFAULT_GRID_N,
            singular_tol: DEFAULT_SINGULAR_TOL,
            rtol: DEFAULT_RTOL,
            rank_tol: DEFAULT_RANK_TOL,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub system: ValidatedSystem,
    pub classification: SpectralClassification,
    pub geometry: GeometryTables,
    pub similarity: SimilaritySolution,
    pub spectrum: SpectrumResult,
}

impl Analysis {
    /// Runs validation, classification, geometry, `P`, `A_d` and its
    /// eigenstructure. Fails with `SingularK` when `K` is not invertible.
    pub fn new(spec: SystemSpec, options: AnalysisOptions) -> Result<Self> {
        let system = validate_system(spec)?;
        let classification = classify(&system, options.singular_tol);
        let geometry = build_geometry(&system, options.grid_n, system.n())?;
        let similarity = solve_p(&system, &geometry, options.rtol)?;
        let a_d = boundary_matrix(&system, similarity.p1(), options.singular_tol)?;
        let es = eigen_structure(&a_d, options.rank_tol)?;
        let spectrum = SpectrumResult::new(es, geometry.eta1());
        Ok(Analysis {
            system,
            classification,
            geometry,
            similarity,
            spectrum,
        })
    }

    pub fn a_d(&self) -> &CMatrix {
        self.spectrum.eigenstructure.a_d()
    }
}
