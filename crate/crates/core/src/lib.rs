//! Spectral analysis of boundary-coupled linear hyperbolic systems
//!
//! `dz~/dt = -d/dzeta(lambda0 z~) + M z~` on `[0, 1]`, with
//! `lambda0(0) K z~(0) + lambda0(1) L z~(1) = 0`.
//!
//! The pipeline validates and classifies a system, tabulates the travel time
//! `eta`, removes the coupling `M` with the fundamental matrix `P`, computes the
//! boundary matrix `A_d = -K^{-1} L P(1)` and from its Jordan structure the
//! exact eigenvalues and (generalized) eigenfunctions of the operator. Time
//! evolution is available both as a modal expansion and as an exact
//! characteristics solution.

pub mod analysis;
pub mod config;
pub mod eigenfunctions;
pub mod error;
pub mod field;
pub mod geometry;
pub mod heat_exchanger;
pub mod interp;
pub mod linalg;
pub mod ode;
pub mod profile;
pub mod quadrature;
pub mod semigroup;
pub mod similarity;
pub mod spectrum;
pub mod systems;

pub use analysis::{Analysis, AnalysisOptions};
pub use config::{load_config, Config};
pub use eigenfunctions::{
    build_weight, chain_residuals, eigenfunction, generalized_eigenfunction, jordan_omegas, mode_function,
    project_initial_state, weighted_inner_product, ModalBasis, ModeFunction, WeightMatrix,
};
pub use error::{HypspecError, Result};
pub use field::{resample_field, x_inner, x_norm, Field};
pub use geometry::{build_geometry, GeometryTables, MasterGrid};
pub use heat_exchanger::{
    hx_closed_form_p, hx_eigenvalues, hx_kappa_threshold, hx_report, hx_to_system, HeatExchangerSpec, HxReport,
};
pub use linalg::{CMatrix, CVector, C64};
pub use profile::{CoefficientProfile, MatrixProfile};
pub use similarity::{inverse_transform, solve_p, transform_state, SimilaritySolution};
pub use semigroup::{
    characteristics_oracle, compare_methods, modal_simulate, simulate, simulate_original, CharacteristicsOracle,
    Comparison, Method, SimulationResult,
};
pub use spectrum::{
    boundary_matrix, eigen_structure, enumerate_modes, growth_bound, mode_eigenvalue, stability_verdict,
    BoundaryEigenStructure, ModeIndex, SpectrumResult,
};
pub use systems::{classify, validate_system, ClassificationTag, SpectralClassification, SystemSpec, ValidatedSystem};
