//! Configuration files: a system given by its coefficients, or the built-in
//! heat exchanger. JSON (`.json`) and TOML (anything else) are accepted; unknown
//! keys are rejected.
//!
//! Complex numbers are `[re, im]` pairs. Matrices are either nested rows of
//! pairs or a flat row-major list of pairs.
//!
//! ```json
//! {
//!   "n": 1,
//!   "lambda0": { "kind": "affine", "a": 1.0, "b": 1.0 },
//!   "M": { "kind": "zero" },
//!   "K": [[[1.0, 0.0]]],
//!   "L": [[-0.5, 0.0]]
//! }
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{HypspecError, Result};
use crate::heat_exchanger::{hx_to_system, HeatExchangerSpec};
use crate::linalg::{c, CMatrix};
use crate::profile::{CoefficientProfile, MatrixProfile};
use crate::systems::{SystemSpec, DEFAULT_SINGULAR_TOL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixRepr {
    Nested(Vec<Vec<[f64; 2]>>),
    Flat(Vec<[f64; 2]>),
}

impl MatrixRepr {
    pub fn from_matrix(m: &CMatrix) -> Self {
        MatrixRepr::Nested(
            (0..m.nrows())
                .map(|r| (0..m.ncols()).map(|col| [m[(r, col)].re, m[(r, col)].im]).collect())
                .collect(),
        )
    }

    fn to_matrix(&self, key: &str, n: usize) -> Result<CMatrix> {
        let flat: Vec<[f64; 2]> = match self {
            MatrixRepr::Nested(rows) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(HypspecError::config(key, format!("expected {n} rows of {n} entries")));
                }
                rows.concat()
            }
            MatrixRepr::Flat(v) => v.clone(),
        };
        if flat.len() != n * n {
            return Err(HypspecError::config(
                key,
                format!("expected {} entries, found {}", n * n, flat.len()),
            ));
        }
        if flat.iter().flatten().any(|x| !x.is_finite()) {
            return Err(HypspecError::config(key, "entries must be finite"));
        }
        Ok(CMatrix::from_row_iterator(n, n, flat.iter().map(|[re, im]| c(*re, *im))))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProfileRepr {
    Constant { value: f64 },
    Affine { a: f64, b: f64 },
    Sampled { nodes: Vec<f64>, values: Vec<f64> },
}

impl ProfileRepr {
    pub fn to_profile(&self, key: &str) -> Result<CoefficientProfile> {
        let p = match self {
            ProfileRepr::Constant { value } => CoefficientProfile::constant(*value),
            ProfileRepr::Affine { a, b } => CoefficientProfile::affine(*a, *b),
            ProfileRepr::Sampled { nodes, values } => CoefficientProfile::sampled(nodes.clone(), values.clone())
                .map_err(|e| HypspecError::config(key, e.to_string()))?,
        };
        Ok(p)
    }

    pub fn from_profile(p: &CoefficientProfile) -> Self {
        match p {
            CoefficientProfile::Constant(value) => ProfileRepr::Constant { value: *value },
            CoefficientProfile::Affine { a, b } => ProfileRepr::Affine { a: *a, b: *b },
            CoefficientProfile::Sampled(s) => ProfileRepr::Sampled {
                nodes: s.nodes().to_vec(),
                values: s.values().to_vec(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MatrixProfileRepr {
    Zero,
    Constant { entries: MatrixRepr },
    Sampled { nodes: Vec<f64>, entries: Vec<MatrixRepr> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatExchangerRepr {
    pub alpha1: ProfileRepr,
    pub alpha2: ProfileRepr,
    pub v: ProfileRepr,
    pub kappa: f64,
}

/// Raw file contents.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda0: Option<ProfileRepr>,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<MatrixProfileRepr>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<MatrixRepr>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub l: Option<MatrixRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub singular_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heat_exchanger: Option<HeatExchangerRepr>,
}

/// A parsed and checked configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub system: SystemSpec,
    pub singular_tol: f64,
    pub heat_exchanger: Option<HeatExchangerSpec>,
}

fn required<'a, T>(value: &'a Option<T>, key: &str) -> Result<&'a T> {
    value.as_ref().ok_or_else(|| HypspecError::config(key, "missing"))
}

impl ConfigFile {
    pub fn from_system(spec: &SystemSpec, singular_tol: Option<f64>) -> Result<Self> {
        let m = match &spec.m {
            MatrixProfile::Constant(m) if m.iter().all(|x| *x == crate::linalg::ZERO) => MatrixProfileRepr::Zero,
            MatrixProfile::Constant(m) => MatrixProfileRepr::Constant {
                entries: MatrixRepr::from_matrix(m),
            },
            MatrixProfile::Sampled { nodes, values } => MatrixProfileRepr::Sampled {
                nodes: nodes.clone(),
                entries: values.iter().map(MatrixRepr::from_matrix).collect(),
            },
            MatrixProfile::Combination(_) => {
                return Err(HypspecError::config("M", "profile combinations have no file representation"))
            }
        };
        Ok(ConfigFile {
            n: Some(spec.n),
            lambda0: Some(ProfileRepr::from_profile(&spec.lambda0)),
            m: Some(m),
            k: Some(MatrixRepr::from_matrix(&spec.k)),
            l: Some(MatrixRepr::from_matrix(&spec.l)),
            singular_tol,
            heat_exchanger: None,
        })
    }

    pub fn into_config(self) -> Result<Config> {
        let singular_tol = self.singular_tol.unwrap_or(DEFAULT_SINGULAR_TOL);
        if !(singular_tol > 0.0 && singular_tol.is_finite()) {
            return Err(HypspecError::config("singular_tol", "must be positive"));
        }
        if let Some(hx) = &self.heat_exchanger {
            for (key, present) in [
                ("n", self.n.is_some()),
                ("lambda0", self.lambda0.is_some()),
                ("M", self.m.is_some()),
                ("K", self.k.is_some()),
                ("L", self.l.is_some()),
            ] {
                if present {
                    return Err(HypspecError::config(key, "not allowed together with heat_exchanger"));
                }
            }
            let spec = HeatExchangerSpec::new(
                hx.alpha1.to_profile("heat_exchanger.alpha1")?,
                hx.alpha2.to_profile("heat_exchanger.alpha2")?,
                hx.v.to_profile("heat_exchanger.v")?,
                hx.kappa,
            )
            .map_err(|e| HypspecError::config("heat_exchanger", e.to_string()))?;
            return Ok(Config {
                system: hx_to_system(&spec),
                singular_tol,
                heat_exchanger: Some(spec),
            });
        }
        let n = *required(&self.n, "n")?;
        if n == 0 {
            return Err(HypspecError::config("n", "must be positive"));
        }
        let lambda0 = required(&self.lambda0, "lambda0")?.to_profile("lambda0")?;
        let m = match required(&self.m, "M")? {
            MatrixProfileRepr::Zero => MatrixProfile::zeros(n),
            MatrixProfileRepr::Constant { entries } => MatrixProfile::Constant(entries.to_matrix("M.entries", n)?),
            MatrixProfileRepr::Sampled { nodes, entries } => {
                let values = entries
                    .iter()
                    .enumerate()
                    .map(|(i, e)| e.to_matrix(&format!("M.entries[{i}]"), n))
                    .collect::<Result<Vec<_>>>()?;
                MatrixProfile::sampled(nodes.clone(), values).map_err(|e| HypspecError::config("M", e.to_string()))?
            }
        };
        let k = required(&self.k, "K")?.to_matrix("K", n)?;
        let l = required(&self.l, "L")?.to_matrix("L", n)?;
        Ok(Config {
            system: SystemSpec { n, lambda0, m, k, l },
            singular_tol,
            heat_exchanger: None,
        })
    }
}

fn path_error<E: std::fmt::Display>(e: serde_path_to_error::Error<E>) -> HypspecError {
    let key = e.path().to_string();
    let key = if key == "." { "<document>".to_string() } else { key };
    HypspecError::config(key, e.inner().to_string())
}

pub fn parse_json(text: &str) -> Result<Config> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: ConfigFile = serde_path_to_error::deserialize(de).map_err(path_error)?;
    file.into_config()
}

pub fn parse_toml(text: &str) -> Result<Config> {
    let de = toml::Deserializer::parse(text).map_err(|e| HypspecError::config("<document>", e.to_string()))?;
    let file: ConfigFile = serde_path_to_error::deserialize(de).map_err(path_error)?;
    file.into_config()
}

/// Reads a configuration, choosing the format by extension.
pub fn load_config(path: &Path) -> Result<Config> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HypspecError::config("<file>", format!("{}: {e}", path.display())))?;
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("json") => parse_json(&text),
        _ => parse_toml(&text),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_nested_and_flat() {
        let cfg = parse_json(
            r#"{"n": 2, "lambda0": {"kind": "affine", "a": 1, "b": 1}, "M": {"kind": "zero"},
                "K": [[[1,0],[0,0]],[[0,0],[1,0]]], "L": [[-1,0],[0,0],[0,0],[-1,0]]}"#,
        )
        .unwrap();
        assert_eq!(cfg.system.k, CMatrix::identity(2, 2));
        assert_eq!(cfg.system.l, -CMatrix::identity(2, 2));
        assert_eq!(cfg.singular_tol, DEFAULT_SINGULAR_TOL);
    }

    #[test]
    fn toml_system() {
        let cfg = parse_toml(
            "n = 1\nsingular_tol = 1e-8\nK = [[1.0, 0.0]]\nL = [[-0.5, 0.0]]\n[lambda0]\nkind = \"constant\"\nvalue = 2.0\n[M]\nkind = \"constant\"\nentries = [[0.1, 0.2]]\n",
        )
        .unwrap();
        assert_eq!(cfg.system.lambda0, CoefficientProfile::constant(2.0));
        assert_eq!(cfg.singular_tol, 1e-8);
        assert_eq!(cfg.system.m.eval(0.3)[(0, 0)], c(0.1, 0.2));
    }

    #[test]
    fn unknown_keys_named() {
        let err = parse_json(r#"{"n": 1, "lambda": 3}"#).unwrap_err();
        assert!(err.to_string().contains("lambda"), "{err}");
        let err = parse_json(r#"{"n": 1, "lambda0": {"kind": "constant", "value": 1, "b": 2}}"#).unwrap_err();
        assert!(err.to_string().contains("lambda0"), "{err}");
    }

    #[test]
    fn missing_and_misshaped_keys_named() {
        let err = parse_json(r#"{"n": 1, "lambda0": {"kind": "constant", "value": 1}, "M": {"kind": "zero"}, "K": [[1, 0]]}"#)
            .unwrap_err();
        assert_eq!(err, HypspecError::config("L", "missing"));
        let err = parse_json(
            r#"{"n": 2, "lambda0": {"kind": "constant", "value": 1}, "M": {"kind": "zero"}, "K": [[1, 0]], "L": [[1, 0]]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, HypspecError::Config { ref key, .. } if key == "K"));
    }

    #[test]
    fn heat_exchanger_preset() {
        let cfg = parse_json(
            r#"{"heat_exchanger": {"alpha1": {"kind": "constant", "value": 1}, "alpha2": {"kind": "constant", "value": 1},
                "v": {"kind": "constant", "value": 1}, "kappa": 1.0}}"#,
        )
        .unwrap();
        assert_eq!(cfg.heat_exchanger.unwrap().kappa(), 1.0);
        assert_eq!(cfg.system.n, 2);
    }

    #[test]
    fn round_trip() {
        let cfg = parse_json(
            r#"{"n": 1, "lambda0": {"kind": "sampled", "nodes": [0, 0.5, 1], "values": [1, 2, 1.5]},
                "M": {"kind": "sampled", "nodes": [0, 1], "entries": [[[0.1, 0]], [[0.2, 0]]]}, "K": [[1, 0]], "L": [[-2, 1]]}"#,
        )
        .unwrap();
        let file = ConfigFile::from_system(&cfg.system, None).unwrap();
        let text = serde_json::to_string(&file).unwrap();
        assert_eq!(parse_json(&text).unwrap(), cfg);
    }
}
