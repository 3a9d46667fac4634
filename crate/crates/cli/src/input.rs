//! Command-line inputs: profile specs, initial-state CSV files and seeded
//! random initial data.

use std::f64::consts::TAU;
use std::fs::File;
use std::path::Path;

use hypspec_core::{resample_field, CVector, CoefficientProfile, Field, GeometryTables, C64};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::table::Table;
use crate::Failure;

fn read_table(path: &Path, what: &str) -> Result<Table, Failure> {
    let file = File::open(path).map_err(|e| Failure::input(format!("{what} {}: {e}", path.display())))?;
    Table::read_csv(file).map_err(|e| Failure::input(format!("{what} {}: {e}", path.display())))
}

/// `const:c`, `affine:a,b` (value `a + b zeta`) or `file:path.csv` with
/// columns `zeta, value`.
pub fn parse_profile(flag: &str, spec: &str) -> Result<CoefficientProfile, Failure> {
    let bad = |msg: String| Failure::input(format!("--{flag} {spec:?}: {msg}"));
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| bad("expected const:c, affine:a,b or file:path.csv".into()))?;
    let numbers = |s: &str| -> Result<Vec<f64>, Failure> {
        s.split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|e| bad(format!("{x:?}: {e}"))))
            .collect()
    };
    match kind {
        "const" => match numbers(rest)?.as_slice() {
            [c] => Ok(CoefficientProfile::constant(*c)),
            _ => Err(bad("const takes one number".into())),
        },
        "affine" => match numbers(rest)?.as_slice() {
            [a, b] => Ok(CoefficientProfile::affine(*a, *b)),
            _ => Err(bad("affine takes two numbers a,b".into())),
        },
        "file" => {
            let t = read_table(Path::new(rest), &format!("--{flag} profile"))?;
            if t.columns.len() != 2 {
                return Err(bad(format!("expected 2 columns (zeta, value), found {}", t.columns.len())));
            }
            CoefficientProfile::sampled(t.column(0).collect(), t.column(1).collect()).map_err(|e| bad(e.to_string()))
        }
        other => Err(bad(format!("unknown profile kind `{other}`"))),
    }
}

/// Reads `zeta, Re_1, Im_1, ..., Re_n, Im_n` and resamples onto the master grid.
pub fn read_initial_state(path: &Path, n: usize, geom: &GeometryTables) -> Result<Field, Failure> {
    let t = read_table(path, "--init")?;
    if t.columns.len() != 1 + 2 * n {
        return Err(Failure::input(format!(
            "--init {}: expected {} columns (zeta and Re/Im of {n} components), found {}",
            path.display(),
            1 + 2 * n,
            t.columns.len()
        )));
    }
    let zeta: Vec<f64> = t.column(0).collect();
    let field = Field::from_node_fn(t.rows.len(), n, |i| {
        let r = &t.rows[i];
        CVector::from_iterator(n, (0..n).map(|c| C64::new(r[1 + 2 * c].as_f64(), r[2 + 2 * c].as_f64())))
    });
    resample_field(&zeta, &field, &geom.grid().nodes())
        .map_err(|e| Failure::input(format!("--init {}: {e}", path.display())))
}

/// Smooth random data: a few Fourier modes per component with decaying amplitudes.
pub fn random_initial_state(seed: u64, n: usize, geom: &GeometryTables) -> Field {
    const DEGREE: usize = 4;
    let mut rng = StdRng::seed_from_u64(seed);
    let coeffs: Vec<Vec<(C64, C64)>> = (0..n)
        .map(|_| {
            (0..=DEGREE)
                .map(|q| {
                    let s = 1.0 / (1.0 + q as f64).powi(2);
                    let mut draw = || C64::new(rng.gen_range(-s..s), rng.gen_range(-s..s));
                    (draw(), draw())
                })
                .collect()
        })
        .collect();
    let nodes = geom.grid().nodes();
    Field::from_node_fn(nodes.len(), n, |i| {
        let x = nodes[i];
        CVector::from_iterator(
            n,
            coeffs.iter().map(|cs| {
                cs.iter()
                    .enumerate()
                    .map(|(q, (a, b))| a * (TAU * q as f64 * x).cos() + b * (TAU * q as f64 * x).sin())
                    .sum::<C64>()
            }),
        )
    })
}

/// Header for a state table: `zeta, Re_1, Im_1, ...`.
pub fn state_columns(n: usize) -> Vec<String> {
    let mut cols = vec!["zeta".to_string()];
    for c in 1..=n {
        cols.push(format!("Re_{c}"));
        cols.push(format!("Im_{c}"));
    }
    cols
}
