//! `hypspec` command-line front-end.
//!
//! Report commands (`validate`, `classify`, `stability`, `hx`) print a short
//! summary, or JSON with `--format json`. Table commands print CSV to stdout,
//! or write it to `--out` and print a summary instead.
//!
//! Exit codes: 0 ok or stable, 2 invalid input, 3 unstable, 4 not
//! Riesz-spectral, 5 numerical failure.

pub mod input;
pub mod table;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use hypspec_core::analysis::{Analysis, AnalysisOptions};
use hypspec_core::geometry::DEFAULT_GRID_N;
use hypspec_core::semigroup::Method;
use hypspec_core::{
    build_geometry, build_weight, classify, enumerate_modes, hx_report, load_config, mode_function,
    project_initial_state, simulate_original, transform_state, validate_system, x_norm, Config, Field,
    GeometryTables, HeatExchangerSpec, HypspecError, ModalBasis, ModeIndex, SpectralClassification,
};
use serde_json::{json, Value};

use crate::input::{parse_profile, random_initial_state, read_initial_state, state_columns};
use crate::table::{Cell, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_UNSTABLE: i32 = 3;
pub const EXIT_NOT_RIESZ: i32 = 4;
pub const EXIT_NUMERICAL: i32 = 5;

/// An error with its exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    fn not_riesz(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_NOT_RIESZ,
            message: message.into(),
        }
    }
}

impl From<HypspecError> for Failure {
    fn from(e: HypspecError) -> Self {
        let code = match &e {
            HypspecError::SingularK { .. } | HypspecError::ZeroEigenvalue { .. } => EXIT_NOT_RIESZ,
            e if e.is_numerical() => EXIT_NUMERICAL,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Oracle,
    Modal,
}

#[derive(Debug, Parser)]
#[command(name = "hypspec", version, about = "Spectral analysis of boundary-coupled linear hyperbolic systems")]
pub struct Cli {
    /// Output format (reports default to a text summary, tables to CSV).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Seed for generated initial data.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Master-grid intervals (even, at least 16).
    #[arg(long = "grid-n", global = true, env = "HYPSPEC_GRID_N", default_value_t = DEFAULT_GRID_N)]
    pub grid_n: usize,

    /// Relative tolerance of the fundamental-matrix integration.
    #[arg(long, global = true)]
    pub rtol: Option<f64>,

    /// Eigenvalue clustering and rank tolerance.
    #[arg(long = "rank-tol", global = true)]
    pub rank_tol: Option<f64>,

    /// Reciprocal condition number below which K or L counts as singular
    /// (overrides the config file).
    #[arg(long = "singular-tol", global = true)]
    pub singular_tol: Option<f64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a configuration and print basic properties.
    Validate { config: PathBuf },
    /// Riesz-spectral classification from the invertibility of K and L.
    Classify { config: PathBuf },
    /// Travel time and nested integrals on the master grid.
    Geometry {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fundamental matrix P and its inverse on the master grid.
    Similarity {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Eigenvalue lattice for |l| <= lmax.
    Spectrum {
        config: PathBuf,
        #[arg(long, default_value_t = 10)]
        lmax: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Growth bound and stability verdict.
    Stability { config: PathBuf },
    /// One (generalized) eigenfunction on a uniform grid.
    Modes {
        config: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        l: i64,
        #[arg(long, default_value_t = 1)]
        j: usize,
        #[arg(long, default_value_t = 1)]
        chain: usize,
        /// Number of uniform intervals.
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Modal coefficients of an initial state.
    Project {
        config: PathBuf,
        /// CSV with columns zeta, Re/Im per component (random smooth data if absent).
        #[arg(long)]
        init: Option<PathBuf>,
        #[arg(long, default_value_t = 16)]
        lmax: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time evolution of an initial state.
    Simulate {
        config: PathBuf,
        #[arg(long)]
        init: Option<PathBuf>,
        /// Comma-separated output times.
        #[arg(long = "t", value_delimiter = ',', required = true, allow_negative_numbers = true)]
        times: Vec<f64>,
        #[arg(long, value_enum, default_value_t = MethodArg::Oracle)]
        method: MethodArg,
        #[arg(long, default_value_t = 32)]
        lmax: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Co-current heat exchanger with boundary feedback gain kappa.
    Hx {
        #[arg(long, default_value = "const:1")]
        alpha1: String,
        #[arg(long, default_value = "const:1")]
        alpha2: String,
        #[arg(long, default_value = "const:1")]
        v: String,
        #[arg(long)]
        kappa: f64,
        /// Also write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

// Write errors on stdout (a closed pipe, typically) are ignored.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = write!(std::io::stdout().lock(), $($t)*);
    }};
}

macro_rules! outln {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

/// Parses `argv` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32, Failure> {
    match &cli.command {
        Command::Validate { config } => cmd_validate(cli, config),
        Command::Classify { config } => cmd_classify(cli, config),
        Command::Geometry { config, out } => cmd_geometry(cli, config, out.as_deref()),
        Command::Similarity { config, out } => cmd_similarity(cli, config, out.as_deref()),
        Command::Spectrum { config, lmax, out } => cmd_spectrum(cli, config, *lmax, out.as_deref()),
        Command::Stability { config } => cmd_stability(cli, config),
        Command::Modes {
            config,
            k,
            l,
            j,
            chain,
            grid,
            out,
        } => {
            let mode = ModeIndex {
                k: *k,
                chain: *chain,
                l: *l,
                j: *j,
            };
            cmd_modes(cli, config, mode, *grid, out.as_deref())
        }
        Command::Project { config, init, lmax, out } => {
            cmd_project(cli, config, init.as_deref(), *lmax, out.as_deref())
        }
        Command::Simulate {
            config,
            init,
            times,
            method,
            lmax,
            out,
        } => {
            let method = match method {
                MethodArg::Oracle => Method::Oracle,
                MethodArg::Modal => Method::Modal { l_max: *lmax },
            };
            cmd_simulate(cli, config, init.as_deref(), times, method, out.as_deref())
        }
        Command::Hx {
            alpha1,
            alpha2,
            v,
            kappa,
            report,
        } => cmd_hx(cli, alpha1, alpha2, v, *kappa, report.as_deref()),
    }
}

fn load(cli: &Cli, path: &Path) -> Result<Config, Failure> {
    let mut config = load_config(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    if let Some(tol) = cli.singular_tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Failure::input("--singular-tol must be positive"));
        }
        config.singular_tol = tol;
    }
    Ok(config)
}

fn options(cli: &Cli, config: &Config) -> AnalysisOptions {
    let mut opts = AnalysisOptions {
        grid_n: cli.grid_n,
        singular_tol: config.singular_tol,
        ..AnalysisOptions::default()
    };
    if let Some(r) = cli.rtol {
        opts.rtol = r;
    }
    if let Some(r) = cli.rank_tol {
        opts.rank_tol = r;
    }
    opts
}

fn check_tolerances(opts: &AnalysisOptions) -> Result<(), Failure> {
    for (flag, v) in [("--rtol", opts.rtol), ("--rank-tol", opts.rank_tol)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Failure::input(format!("{flag} must lie in (0, 1), got {v}")));
        }
    }
    Ok(())
}

fn classification_of(config: &Config) -> Result<SpectralClassification, Failure> {
    let system = validate_system(config.system.clone())?;
    Ok(classify(&system, config.singular_tol))
}

fn require_riesz(cls: &SpectralClassification, what: &str) -> Result<(), Failure> {
    if cls.is_riesz_spectral() {
        return Ok(());
    }
    Err(Failure::not_riesz(format!(
        "classification: {} (rcond K = {:.3e}, rcond L = {:.3e}); {what} needs a Riesz-spectral system",
        cls.tag, cls.rcond_k, cls.rcond_l
    )))
}

fn analyze(cli: &Cli, config: &Config) -> Result<Analysis, Failure> {
    let opts = options(cli, config);
    check_tolerances(&opts)?;
    Ok(Analysis::new(config.system.clone(), opts)?)
}

fn geometry_only(cli: &Cli, config: &Config) -> Result<GeometryTables, Failure> {
    let system = validate_system(config.system.clone())?;
    Ok(build_geometry(&system, cli.grid_n, system.n())?)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let fail = |e: &dyn std::fmt::Display| Failure::input(format!("output {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| fail(&e))?;
    tmp.write_all(bytes).map_err(|e| fail(&e))?;
    tmp.as_file().sync_all().map_err(|e| fail(&e))?;
    tmp.persist(path).map_err(|e| fail(&e.error))?;
    Ok(())
}

fn render_table(cli: &Cli, table: &Table) -> String {
    match cli.format {
        Some(Format::Json) => format!("{}\n", serde_json::to_string_pretty(&table.to_json()).unwrap()),
        _ => table.to_csv_string(),
    }
}

fn emit_table(cli: &Cli, table: &Table, out: Option<&Path>, summary: &[String]) -> Result<(), Failure> {
    let text = render_table(cli, table);
    match out {
        Some(path) => {
            write_atomic(path, text.as_bytes())?;
            for line in summary {
                outln!("{line}");
            }
            outln!(
                "wrote {} rows x {} columns to {}",
                table.rows.len(),
                table.columns.len(),
                path.display()
            );
        }
        None => out!("{text}"),
    }
    Ok(())
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn emit_report(cli: &Cli, report: &Value, summary: &[String]) {
    match cli.format {
        Some(Format::Json) => outln!("{}", serde_json::to_string_pretty(report).unwrap()),
        Some(Format::Csv) => {
            outln!("key,value");
            if let Value::Object(map) = report {
                for (k, v) in map {
                    let text = scalar_text(v);
                    if text.contains(',') || text.contains('"') {
                        outln!("{k},\"{}\"", text.replace('"', "\"\""));
                    } else {
                        outln!("{k},{text}");
                    }
                }
            }
        }
        None => {
            for line in summary {
                outln!("{line}");
            }
        }
    }
}

fn cmd_validate(cli: &Cli, path: &Path) -> Result<i32, Failure> {
    let config = load(cli, path)?;
    let system = validate_system(config.system.clone())?;
    let geom = build_geometry(&system, cli.grid_n, system.n())?;
    let report = json!({
        "n": system.n(),
        "lambda0": system.lambda0().kind(),
        "lambda0_min": system.epsilon(),
        "m_bound": system.m_bound(),
        "eta1": geom.eta1(),
        "singular_tol": config.singular_tol,
        "heat_exchanger": config.heat_exchanger.is_some(),
    });
    emit_report(
        cli,
        &report,
        &[
            format!("{}: valid system", path.display()),
            format!("  n                 {}", system.n()),
            format!("  lambda0           {} (min {:.6})", system.lambda0().kind(), system.epsilon()),
            format!("  max |M|           {:.6}", system.m_bound()),
            format!("  eta(1)            {:.12}", geom.eta1()),
        ],
    );
    Ok(EXIT_OK)
}

fn classification_json(cls: &SpectralClassification) -> Value {
    json!({
        "tag": cls.tag.to_string(),
        "rcond_k": cls.rcond_k,
        "rcond_l": cls.rcond_l,
        "tolerance": cls.tolerance,
        "riesz_spectral": cls.is_riesz_spectral(),
    })
}

fn cmd_classify(cli: &Cli, path: &Path) -> Result<i32, Failure> {
    let config = load(cli, path)?;
    let cls = classification_of(&config)?;
    emit_report(
        cli,
        &classification_json(&cls),
        &[
            format!("classification    {}", cls.tag),
            format!("  rcond(K)          {:.6e}", cls.rcond_k),
            format!("  rcond(L)          {:.6e}", cls.rcond_l),
            format!("  tolerance         {:.1e}", cls.tolerance),
        ],
    );
    Ok(if cls.is_riesz_spectral() { EXIT_OK } else { EXIT_NOT_RIESZ })
}

fn cmd_geometry(cli: &Cli, path: &Path, out: Option<&Path>) -> Result<i32, Failure> {
    let config = load(cli, path)?;
    let geom = geometry_only(cli, &config)?;
    let m_max = geom.m_max();
    let mut cols = vec!["zeta".to_string(), "eta".to_string()];
    cols.extend((1..=m_max).map(|m| format!("omega_{m}")));
    let mut table = Table::new(cols);
    let nodes = geom.grid().nodes();
    for (i, &z) in nodes.iter().enumerate() {
        let mut row = vec![Cell::from(z), Cell::from(geom.eta_values()[i])];
        row.extend((1..=m_max).map(|m| Cell::from(geom.omega_values(m)[i])));
        table.push(row);
    }
    emit_table(cli, &table, out, &[format!("eta(1) = {:.12}", geom.eta1())])?;
    Ok(EXIT_OK)
}

fn cmd_similarity(cli: &Cli, path: &Path, out: Option<&Path>) -> Result<i32, Failure> {
    let config = load(cli, path)?;
    let opts = options(cli, &config);
    check_tolerances(&opts)?;
    let system = validate_system(config.system.clone())?;
    let geom = build_geometry(&system, opts.grid_n, system.n())?;
    let sim = hypspec_core::solve_p(&system, &geom, opts.rtol)?;
    let n = system.n();
    let mut cols = vec!["zeta".to_string()];
    for name in ["P", "Pinv"] {
        for r in 1..=n {
            for c in 1..=n {
                cols.push(format!("Re_{name}_{r}_{c}"));
                cols.push(format!("Im_{name}_{r}_{c}"));
            }
        }
    }
    let mut table = Table::new(cols);
    for (i, z) in geom.grid().nodes().into_iter().enumerate() {
        let mut row = vec![Cell::from(z)];
        for m in [sim.p(i), sim.p_inv(i)] {
            for r in 0..n {
                for c in 0..n {
                    row.push(m[(r, c)].re.into());
                    row.push(m[(r, c)].im.into());
                }
            }
        }
        table.push(row);
    }
    emit_table(
        cli,
        &table,
        out,
        &[
            format!("max |P P^-1 - I| = {:.3e}", sim.inverse_defect()),
            format!("Liouville check  = {:.3e}", sim.logdet_check()),
        ],
    )?;
    Ok(EXIT_OK)
}

fn cmd_spectrum(cli: &Cli, path: &Path, lmax: usize, out: Option<&Path>) -> Result<i32, Failure> {
    let config = load(cli, path)?;
    require_riesz(&classification_of(&config)?, "the eigenvalue lattice")?;
    let analysis = analyze(cli, &config)?;
    let spec = &analysis.spectrum;
    let es = &spec.eigenstructure;
    let mut table = Table::new([
        "k",
        "l",
        "Re_mu",
        "Im_mu",
        "abs_rho",
        "theta",
        "alg_mult",
        "geom_mult",
    ]);
    for (mode, mu) in enumerate_modes(spec, lmax)? {
        let e = es.eigenvalue(mode.k)?;
        table.push(vec![
            mode.k.into(),
            mode.l.into(),
            mu.re.into(),
            mu.im.into(),
            e.modulus.into(),
            e.theta.into(),
            e.algebraic.into(),
            e.geometric.into(),
        ]);
    }
    emit_table(
        cli,
        &table,
        out,
        &[
            format!("distinct boundary eigenvalues: {}", es.n_distinct()),
            format!("growth bound omega_0 = {:.12}", spec.growth_bound),
        ],
    )?;
    Ok(EXIT_OK)
}

fn cmd_stability(cli: &Cli, path: &Path) -> Result<i32, Failure> {
    let config = load(cli, path)?;
    let cls = classification_of(&config)?;
    if !cls.is_riesz_spectral() {
        let report = json!({ "classification": classification_json(&cls), "verdict": "not Riesz-spectral" });
        emit_report(
            cli,
            &report,
            &[
                format!("classification    {}", cls.tag),
                "verdict           not Riesz-spectral".to_string(),
            ],
        );
        return Ok(EXIT_NOT_RIESZ);
    }
    let analysis = analyze(cli, &config)?;
    let spec = &analysis.spectrum;
    let es = &spec.eigenstructure;
    let verdict = if spec.stable { "exponentially stable" } else { "not exponentially stable" };
    let eigenvalues: Vec<[f64; 2]> = es.eigenvalues().iter().map(|e| [e.value.re, e.value.im]).collect();
    let report = json!({
        "classification": classification_json(&cls),
        "eta1": spec.eta1,
        "spectral_radius": es.spectral_radius(),
        "growth_bound": spec.growth_bound,
        "stable": spec.stable,
        "verdict": verdict,
        "boundary_eigenvalues": eigenvalues,
    });
    let mut summary = vec![
        format!("classification    {}", cls.tag),
        format!("eta(1)            {:.12}", spec.eta1),
        format!("spectral radius   {:.12}", es.spectral_radius()),
        format!("omega_0           {:.12}", spec.growth_bound),
        format!("verdict           {verdict}"),
    ];
    for (k, e) in es.eigenvalues().iter().enumerate() {
        summary.push(format!(
            "  rho_{}  = {:+.12} {:+.12}i  (alg {}, geom {})",
            k + 1,
            e.value.re,
            e.value.im,
            e.algebraic,
            e.geometric
        ));
    }
    emit_report(cli, &report, &summary);
    Ok(if spec.stable { EXIT_OK } else { EXIT_UNSTABLE })
}

fn state_row(prefix: &[Cell], field: &Field, i: usize) -> Vec<Cell> {
    let mut row = prefix.to_vec();
    for v in field.node(i) {
        row.push(v.re.into());
        row.push(v.im.into());
    }
    row
}

fn cmd_modes(cli: &Cli, path: &Path, mode: ModeIndex, grid: usize, out: Option<&Path>) -> Result<i32, Failure> {
    if grid == 0 {
        return Err(Failure::input("--grid must be at least 1"));
    }
    let config = load(cli, path)?;
    require_riesz(&classification_of(&config)?, "eigenfunction construction")?;
    let analysis = analyze(cli, &config)?;
    let mf = mode_function(&analysis.spectrum.eigenstructure, &analysis.geometry, mode)?;
    let n = analysis.system.n();
    let mut table = Table::new(state_columns(n));
    for i in 0..=grid {
        let z = if i == grid { 1.0 } else { i as f64 / grid as f64 };
        let v = mf.evaluate(&analysis.geometry, z);
        let mut row = vec![Cell::from(z)];
        for c in v.iter() {
            row.push(c.re.into());
            row.push(c.im.into());
        }
        table.push(row);
    }
    emit_table(
        cli,
        &table,
        out,
        &[format!(
            "mode k={} chain={} l={} j={}: mu = {:.12} {:+.12}i",
            mode.k, mode.chain, mode.l, mode.j, mf.mu.re, mf.mu.im
        )],
    )?;
    Ok(EXIT_OK)
}

fn initial_state(cli: &Cli, init: Option<&Path>, n: usize, geom: &GeometryTables) -> Result<Field, Failure> {
    match init {
        Some(p) => read_initial_state(p, n, geom),
        None => Ok(random_initial_state(cli.seed, n, geom)),
    }
}

// Simpson needs several nodes per oscillation of the highest mode.
fn warn_resolution(cli: &Cli, l_max: usize) {
    if 8 * l_max > cli.grid_n {
        eprintln!(
            "warning: --lmax {l_max} is coarse-resolved on {} grid intervals; expect quadrature error (raise --grid-n)",
            cli.grid_n
        );
    }
}

fn modal_context(e: HypspecError) -> Failure {
    match e {
        HypspecError::NotDiagonalizable => Failure::input(
            "modal expansion: boundary matrix A_d is not diagonalizable (use --method oracle)",
        ),
        other => other.into(),
    }
}

fn cmd_project(
    cli: &Cli,
    path: &Path,
    init: Option<&Path>,
    lmax: usize,
    out: Option<&Path>,
) -> Result<i32, Failure> {
    let config = load(cli, path)?;
    require_riesz(&classification_of(&config)?, "modal projection")?;
    let analysis = analyze(cli, &config)?;
    let geom = &analysis.geometry;
    let es = &analysis.spectrum.eigenstructure;
    warn_resolution(cli, lmax);
    let ztilde0 = initial_state(cli, init, analysis.system.n(), geom)?;
    let z0 = transform_state(&analysis.similarity, &ztilde0)?;
    let weight = build_weight(es, geom).map_err(modal_context)?;
    let basis = ModalBasis::new(es, geom, lmax).map_err(modal_context)?;
    let coeffs = project_initial_state(&z0, &basis, &weight, geom)?;
    let mut table = Table::new(["k", "chain", "l", "Re_c", "Im_c"]);
    for (mode, c) in &coeffs {
        table.push(vec![mode.k.into(), mode.chain.into(), mode.l.into(), c.re.into(), c.im.into()]);
    }
    let energy: f64 = coeffs.iter().map(|(_, c)| c.norm_sqr()).sum::<f64>().sqrt();
    emit_table(
        cli,
        &table,
        out,
        &[
            format!("{} coefficients (|l| <= {lmax})", coeffs.len()),
            format!("coefficient l2 norm = {energy:.12}"),
        ],
    )?;
    Ok(EXIT_OK)
}

fn cmd_simulate(
    cli: &Cli,
    path: &Path,
    init: Option<&Path>,
    times: &[f64],
    method: Method,
    out: Option<&Path>,
) -> Result<i32, Failure> {
    if let Some(t) = times.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(Failure::input(format!("--t: times must be finite and non-negative, got {t}")));
    }
    let config = load(cli, path)?;
    let analysis = analyze(cli, &config)?;
    if let Method::Modal { l_max } = method {
        warn_resolution(cli, l_max);
    }
    let geom = &analysis.geometry;
    let n = analysis.system.n();
    let ztilde0 = initial_state(cli, init, n, geom)?;
    let result = simulate_original(
        &analysis.spectrum.eigenstructure,
        &analysis.similarity,
        geom,
        &ztilde0,
        times,
        method,
    )
    .map_err(modal_context)?;
    let mut cols = vec!["t".to_string()];
    cols.extend(state_columns(n));
    let mut table = Table::new(cols);
    let mut summary = vec![format!("method {method}, {} times", times.len())];
    for (t, state) in result.times.iter().zip(&result.states) {
        for (i, &z) in result.grid.iter().enumerate() {
            table.push(state_row(&[Cell::from(*t), Cell::from(z)], state, i));
        }
        summary.push(format!("  t = {t}: |z| = {:.12}", x_norm(state, geom)));
    }
    emit_table(cli, &table, out, &summary)?;
    Ok(EXIT_OK)
}

fn cmd_hx(
    cli: &Cli,
    alpha1: &str,
    alpha2: &str,
    v: &str,
    kappa: f64,
    report_path: Option<&Path>,
) -> Result<i32, Failure> {
    let hx = HeatExchangerSpec::new(
        parse_profile("alpha1", alpha1)?,
        parse_profile("alpha2", alpha2)?,
        parse_profile("v", v)?,
        kappa,
    )?;
    let mut opts = AnalysisOptions {
        grid_n: cli.grid_n,
        ..AnalysisOptions::default()
    };
    if let Some(r) = cli.rtol {
        opts.rtol = r;
    }
    if let Some(r) = cli.rank_tol {
        opts.rank_tol = r;
    }
    if let Some(s) = cli.singular_tol {
        opts.singular_tol = s;
    }
    check_tolerances(&opts)?;
    let report = hx_report(&hx, opts)?;
    let value = serde_json::to_value(&report).expect("report serializes");
    if let Some(p) = report_path {
        let text = format!("{}\n", serde_json::to_string_pretty(&value).unwrap());
        write_atomic(p, text.as_bytes())?;
    }
    let verdict = if report.stable { "exponentially stable" } else { "not exponentially stable" };
    emit_report(
        cli,
        &value,
        &[
            format!("heat exchanger, kappa = {}", report.kappa),
            format!("  lambda_1          {:.15}", report.lambda1),
            format!("  lambda_2          {:.15}", report.lambda2),
            format!("  kappa*            {:.15}", report.kappa_star),
            format!("  omega_0           {:.12}", report.growth_bound),
            format!("  verdict           {verdict} (kappa {} kappa*)", if kappa < report.kappa_star { "<" } else { ">=" }),
            format!(
                "  cross-check       P(1) {:.1e}, eigenvalues {:.1e}",
                report.p1_mismatch, report.eigenvalue_mismatch
            ),
        ],
    );
    if !report.consistent {
        return Err(Failure {
            code: EXIT_NUMERICAL,
            message: format!(
                "heat exchanger cross-check: closed form and generic pipeline differ (P(1) {:.3e}, eigenvalues {:.3e})",
                report.p1_mismatch, report.eigenvalue_mismatch
            ),
        });
    }
    Ok(EXIT_OK)
}
