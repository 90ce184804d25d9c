//! Experiment configuration: one JSON file holding the algebra, the
//! generator and the run parameters. Complex entries are `[re, im]` pairs.

use std::path::{Path, PathBuf};

use qrw::gns::LindbladGenerator;
use qrw::linalg::{self, c64, CMat};
use qrw::models;
use qrw::star_algebra::StarAlgebra;
use qrw::toy_fock::DEFAULT_MAX_DIM;
use serde::Deserialize;

use crate::CliError;

/// Rows of `[re, im]` pairs.
pub type MatrixSpec = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub algebra: AlgebraSpec,
    #[serde(default)]
    pub generator: GeneratorSpec,
    #[serde(default)]
    pub run: RunParams,
    #[serde(default)]
    pub output: OutputPaths,
}

/// Either a preset string such as `"full_matrix(2)"`, `"diagonal(3)"` or
/// `"direct_sum(1,2)"`, or matrices generating the algebra.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum AlgebraSpec {
    Preset(String),
    Explicit { generators: Vec<MatrixSpec> },
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    #[serde(rename = "H")]
    pub h: Option<MatrixSpec>,
    #[serde(default)]
    pub lindblad: Vec<MatrixSpec>,
    /// Random Hamiltonian and jump operators instead of explicit ones.
    pub random: Option<RandomGenerator>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomGenerator {
    pub ops: usize,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaKind {
    /// The series truncated at `order`.
    Truncated,
    /// The exact unitary step, full matrix algebras only.
    Unitary,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkParams {
    #[serde(default = "default_beta")]
    pub beta: BetaKind,
    #[serde(default = "default_walk_order")]
    pub order: usize,
    /// Steps for the full-space checks; skipped when absent.
    pub full_space_steps: Option<usize>,
    /// Accepted band for the error ratios; not enforced when absent.
    pub expect_ratio: Option<[f64; 2]>,
}

fn default_beta() -> BetaKind {
    BetaKind::Truncated
}

fn default_walk_order() -> usize {
    1
}

impl Default for WalkParams {
    fn default() -> Self {
        WalkParams {
            beta: default_beta(),
            order: default_walk_order(),
            full_space_steps: None,
            expect_ratio: None,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub gns: f64,
    pub relations: f64,
    pub dagger: f64,
    pub walk: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            gns: 1e-10,
            relations: 1e-8,
            dagger: 1e-10,
            walk: 1e-9,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunParams {
    pub order: usize,
    pub t: f64,
    pub h_list: Vec<f64>,
    pub tol: Tolerances,
    pub seed: u64,
    pub pairs: usize,
    pub max_dim: usize,
    pub walk: WalkParams,
}

impl Default for RunParams {
    fn default() -> Self {
        RunParams {
            order: 4,
            t: 1.0,
            h_list: (4..=8).map(|k| 2f64.powi(-k)).collect(),
            tol: Tolerances::default(),
            seed: 1,
            pairs: 100,
            max_dim: DEFAULT_MAX_DIM,
            walk: WalkParams::default(),
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    pub coefficients: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| config_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let r = &self.run;
        if r.order < 1 {
            return Err(config_err("run.order must be at least 1"));
        }
        if r.walk.order < 1 {
            return Err(config_err("run.walk.order must be at least 1"));
        }
        if !(r.t > 0.0 && r.t.is_finite()) {
            return Err(config_err("run.t must be positive"));
        }
        let tols = [
            ("gns", r.tol.gns),
            ("relations", r.tol.relations),
            ("dagger", r.tol.dagger),
            ("walk", r.tol.walk),
        ];
        for (name, v) in tols {
            if !(v > 0.0 && v.is_finite()) {
                return Err(config_err(format!("run.tol.{name} must be positive")));
            }
        }
        if r.h_list.is_empty() || r.h_list.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
            return Err(config_err("run.h_list must hold positive step sizes"));
        }
        if r.h_list.windows(2).any(|w| w[1] >= w[0]) {
            return Err(config_err("run.h_list must be strictly decreasing"));
        }
        if let Some([lo, hi]) = r.walk.expect_ratio {
            if !(lo > 0.0 && hi > lo) {
                return Err(config_err("run.walk.expect_ratio must be [lo, hi] with 0 < lo < hi"));
            }
        }
        if self.generator.random.is_some() && (self.generator.h.is_some() || !self.generator.lindblad.is_empty()) {
            return Err(config_err("generator.random excludes H and lindblad"));
        }
        Ok(())
    }

    pub fn algebra(&self) -> Result<StarAlgebra, CliError> {
        let alg = match &self.algebra {
            AlgebraSpec::Preset(s) => parse_preset(s)?,
            AlgebraSpec::Explicit { generators } => {
                let mats = generators.iter().map(matrix).collect::<Result<Vec<_>, _>>()?;
                StarAlgebra::build(&mats, 1e-10)?
            }
        };
        Ok(alg)
    }

    pub fn generator(&self, d: usize) -> Result<LindbladGenerator, CliError> {
        let g = &self.generator;
        if let Some(r) = &g.random {
            return Ok(models::random_full(d, r.ops, r.seed).1);
        }
        let h = match &g.h {
            Some(h) => matrix(h)?,
            None => linalg::zeros(d, d),
        };
        if h.nrows() != d {
            return Err(config_err(format!("H is {}x{}, algebra acts on C^{d}", h.nrows(), h.ncols())));
        }
        let ops = g.lindblad.iter().map(matrix).collect::<Result<Vec<_>, _>>()?;
        Ok(LindbladGenerator::new(h, ops)?)
    }
}

/// Parses a `[re, im]` matrix; rows must have equal length.
pub fn matrix(spec: &MatrixSpec) -> Result<CMat, CliError> {
    let rows = spec.len();
    let cols = spec.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 || spec.iter().any(|r| r.len() != cols) {
        return Err(config_err("matrices must be non-empty with rows of equal length"));
    }
    if spec.iter().flatten().flatten().any(|v| !v.is_finite()) {
        return Err(config_err("matrix entries must be finite"));
    }
    Ok(CMat::from_fn(rows, cols, |i, j| {
        let [re, im] = spec[i][j];
        c64::new(re, im)
    }))
}

/// `full_matrix(d)`, `diagonal(n)`, `direct_sum(n1, n2, ...)`; the
/// direct-sum list may also be bracketed.
pub fn parse_preset(s: &str) -> Result<StarAlgebra, CliError> {
    let bad = || config_err(format!("unknown algebra preset {s:?}"));
    let s = s.trim();
    let open = s.find('(').ok_or_else(bad)?;
    let name = s[..open].trim();
    let inner = s[open + 1..].strip_suffix(')').ok_or_else(bad)?;
    let inner = inner.trim().trim_start_matches('[').trim_end_matches(']');
    let args: Vec<usize> = inner
        .split(',')
        .map(|a| a.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    if args.contains(&0) {
        return Err(config_err("preset sizes must be positive"));
    }
    let alg = match (name, args.as_slice()) {
        ("full_matrix", [d]) => StarAlgebra::full_matrix(*d)?,
        ("diagonal", [n]) => StarAlgebra::diagonal(*n)?,
        ("direct_sum", blocks) if !blocks.is_empty() => StarAlgebra::direct_sum(blocks)?,
        _ => return Err(bad()),
    };
    Ok(alg)
}
