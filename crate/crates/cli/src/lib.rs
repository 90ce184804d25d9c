//! Batch front end: read an [`ExperimentConfig`], run one stage of the
//! pipeline and print a plain-text report.
//!
//! Exit codes: 0 success, 1 invariant failure, 2 configuration error,
//! 3 cohomological obstruction.

pub mod config;

use std::io::Write;
use std::path::{Path, PathBuf};

use qrw::coeff_file::CoefficientFile;
use qrw::coefficients::{BetaBlock, CoeffError, CoefficientEngine};
use qrw::el_module::{Corner, ElModule};
use qrw::gns::{GnsData, GnsError};
use qrw::hochschild::{CohomologyReport, HochschildError};
use qrw::star_algebra::{AlgebraError, StarAlgebra};
use qrw::toy_fock::{self, Walk, WalkError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use config::{BetaKind, ExperimentConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("invariant failure: {0}")]
    Invariant(String),
    #[error("obstruction: corner {corner} at level {n} has no solution, dim H² = {h2}")]
    Obstruction { corner: Corner, n: usize, h2: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invariant(_) => 1,
            CliError::Config(_) => 2,
            CliError::Obstruction { .. } => 3,
        }
    }
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<GnsError> for CliError {
    fn from(e: GnsError) -> Self {
        match e {
            GnsError::Linalg(_) | GnsError::Invariant { .. } => CliError::Invariant(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<HochschildError> for CliError {
    fn from(e: HochschildError) -> Self {
        CliError::Invariant(e.to_string())
    }
}

impl From<CoeffError> for CliError {
    fn from(e: CoeffError) -> Self {
        match e {
            CoeffError::Obstruction { corner, n, h2, .. } => CliError::Obstruction { corner, n, h2 },
            CoeffError::MissingLevel(_) => CliError::Config(e.to_string()),
            _ => CliError::Invariant(e.to_string()),
        }
    }
}

impl From<WalkError> for CliError {
    fn from(e: WalkError) -> Self {
        match e {
            WalkError::MemoryCap { .. } | WalkError::NotFullAlgebra { .. } => CliError::Config(e.to_string()),
            WalkError::Coefficients(c) => c.into(),
            _ => CliError::Invariant(e.to_string()),
        }
    }
}

fn io(e: std::io::Error) -> CliError {
    CliError::Config(format!("i/o: {e}"))
}

/// Algebra, GNS data and `E_L` for a config.
pub struct Setup {
    pub alg: StarAlgebra,
    pub gns: GnsData,
    pub el: ElModule,
}

impl Setup {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self, CliError> {
        let alg = cfg.algebra()?;
        let gen = cfg.generator(alg.ambient_dim())?;
        let gns = GnsData::build(&alg, &gen)?;
        let el = ElModule::build(&gns)?;
        Ok(Setup { alg, gns, el })
    }
}

/// Overrides taken from the command line.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub order: Option<usize>,
    pub degree: Option<usize>,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
}

fn check_tol(tol: Option<f64>) -> Result<(), CliError> {
    match tol {
        Some(t) if !(t > 0.0 && t.is_finite()) => Err(CliError::Config("--tol must be positive".into())),
        _ => Ok(()),
    }
}

/// GNS dimensions and the largest GNS-identity residual over random pairs.
pub fn cmd_gns(cfg: &ExperimentConfig, ov: &Overrides, out: &mut dyn Write) -> Result<(), CliError> {
    check_tol(ov.tol)?;
    let tol = ov.tol.unwrap_or(cfg.run.tol.gns);
    let s = Setup::new(cfg)?;
    let residual = s.gns.max_gns_defect(cfg.run.pairs, cfg.run.seed);
    let rep = s.el.report();
    writeln!(out, "algebra dim {} on C^{}", s.alg.dim(), s.alg.ambient_dim()).map_err(io)?;
    writeln!(out, "jump operators {}", s.gns.multiplicity()).map_err(io)?;
    writeln!(out, "dim M {}", s.gns.dim()).map_err(io)?;
    writeln!(out, "dim B^a(M) {}", s.el.corner(Corner::C11).dim()).map_err(io)?;
    writeln!(out, "dim E_L {}", s.el.total_dim()).map_err(io)?;
    writeln!(out, "E_L closure residual {:.3e}", rep.closure_residual).map_err(io)?;
    writeln!(out, "E_L adjoint residual {:.3e}", rep.adjoint_residual).map_err(io)?;
    writeln!(out, "E_L axioms residual {:.3e}", rep.axioms_residual).map_err(io)?;
    writeln!(
        out,
        "GNS identity residual {residual:.3e} over {} pairs (tol {tol:.1e})",
        cfg.run.pairs
    )
    .map_err(io)?;
    if residual.is_nan() || residual > tol {
        return Err(CliError::Invariant(format!("GNS identity residual {residual:.3e} > {tol:.1e}")));
    }
    Ok(())
}

/// Cohomology table per corner and for `E_L`; all degrees up to 2 unless
/// `--degree` picks one.
pub fn cmd_cohomology(cfg: &ExperimentConfig, ov: &Overrides, out: &mut dyn Write) -> Result<(), CliError> {
    let degrees: Vec<usize> = match ov.degree {
        Some(n) if n > 2 => return Err(CliError::Config(format!("degree {n} not supported (0, 1 or 2)"))),
        Some(n) => vec![n],
        None => vec![0, 1, 2],
    };
    let s = Setup::new(cfg)?;
    let engine = CoefficientEngine::new(s.el);
    writeln!(
        out,
        "{:<6} {:>6} {:>10} {:>10} {:>10} {:>8}",
        "module", "degree", "dim C^n", "rank d_n", "dim ker", "dim H^n"
    )
    .map_err(io)?;
    for &n in &degrees {
        let mut total = CohomologyReport {
            degree: n,
            cochain_dim: 0,
            rank_prev: 0,
            rank: 0,
            kernel_dim: 0,
            dim: 0,
        };
        for c in Corner::ALL {
            let r = engine.complex(c).cohomology(n)?;
            write_row(out, c.label(), &r)?;
            total.cochain_dim += r.cochain_dim;
            total.rank_prev += r.rank_prev;
            total.rank += r.rank;
            total.kernel_dim += r.kernel_dim;
            total.dim += r.dim;
        }
        write_row(out, "E_L", &total)?;
    }
    Ok(())
}

fn write_row(out: &mut dyn Write, name: &str, r: &CohomologyReport) -> Result<(), CliError> {
    writeln!(
        out,
        "{:<6} {:>6} {:>10} {:>10} {:>10} {:>8}",
        name, r.degree, r.cochain_dim, r.rank, r.kernel_dim, r.dim
    )
    .map_err(io)
}

/// Runs the coefficient induction, writes the coefficient file and returns
/// its path.
pub fn cmd_coeffs(cfg: &ExperimentConfig, ov: &Overrides, out: &mut dyn Write) -> Result<PathBuf, CliError> {
    check_tol(ov.tol)?;
    let order = ov.order.unwrap_or(cfg.run.order);
    if order < 1 {
        return Err(CliError::Config("--order must be at least 1".into()));
    }
    let tol = ov.tol.unwrap_or(cfg.run.tol.relations);
    let path = ov
        .out
        .clone()
        .or_else(|| cfg.output.coefficients.clone())
        .unwrap_or_else(|| PathBuf::from("coefficients.json"));
    let s = Setup::new(cfg)?;
    let engine = CoefficientEngine::new(s.el);
    let fam = engine.build(order)?;
    let relations = engine.verify_relations(&fam).max_residual();
    let dagger = engine.dagger_symmetry(&fam);
    let unitality = engine.unitality_defect(&fam);
    let file = CoefficientFile::new(engine.el(), &fam);
    write_file(&path, &file.to_json())?;

    writeln!(out, "order {order}").map_err(io)?;
    for rec in &fam.records {
        let worst = |v: &[Option<f64>; 4]| v.iter().flatten().fold(0.0f64, |a, b| a.max(*b));
        writeln!(
            out,
            "level {} cocycle residual {:.3e} solve residual {:.3e}",
            rec.n,
            worst(&rec.cocycle_residual),
            worst(&rec.solve_residual)
        )
        .map_err(io)?;
    }
    writeln!(out, "max relation residual {relations:.3e} (tol {tol:.1e})").map_err(io)?;
    writeln!(out, "dagger symmetry {dagger:.3e}").map_err(io)?;
    writeln!(out, "unitality defect {unitality:.3e}").map_err(io)?;
    if unitality > tol {
        writeln!(out, "warning: θ(1) deviates from the unital pattern").map_err(io)?;
    }
    writeln!(out, "wrote {}", path.display()).map_err(io)?;
    if relations.is_nan() || relations > tol {
        return Err(CliError::Invariant(format!("relation residual {relations:.3e} > {tol:.1e}")));
    }
    if dagger.is_nan() || dagger > cfg.run.tol.dagger {
        return Err(CliError::Invariant(format!("dagger symmetry {dagger:.3e}")));
    }
    Ok(path)
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    std::fs::write(path, text).map_err(io)
}

/// Compares the walk's vacuum expectations with the semigroup, writes the
/// convergence CSV and returns its path.
pub fn cmd_walk(cfg: &ExperimentConfig, ov: &Overrides, out: &mut dyn Write) -> Result<PathBuf, CliError> {
    check_tol(ov.tol)?;
    let run = &cfg.run;
    let wp = &run.walk;
    let order = ov.order.unwrap_or(wp.order);
    if order < 1 {
        return Err(CliError::Config("--order must be at least 1".into()));
    }
    let tol = ov.tol.unwrap_or(run.tol.walk);
    let path = ov
        .out
        .clone()
        .or_else(|| cfg.output.report.clone())
        .unwrap_or_else(|| PathBuf::from("walk_report.csv"));
    let s = Setup::new(cfg)?;
    let gen = s.gns.generator().clone();
    let alg = s.alg.clone();
    let engine = CoefficientEngine::new(s.el);
    let fam = match wp.beta {
        BetaKind::Truncated => Some(engine.build(order)?),
        BetaKind::Unitary => None,
    };
    let beta_for = |h: f64| -> Result<BetaBlock, WalkError> {
        match &fam {
            Some(fam) => Ok(engine.assemble_beta(fam, h, order)?),
            None => toy_fock::beta_unitary(&alg, &gen, h),
        }
    };
    let rows = toy_fock::convergence_report(&alg, &gen, beta_for, run.t, &run.h_list)?;
    write_file(&path, &toy_fock::report_csv(&rows))?;

    let label = match wp.beta {
        BetaKind::Truncated => format!("truncated at order {order}"),
        BetaKind::Unitary => "unitary".to_string(),
    };
    writeln!(out, "step {label}, t = {}", run.t).map_err(io)?;
    let mut out_of_band = Vec::new();
    for r in rows.iter().filter(|r| r.ratio.is_some()) {
        let ratio = r.ratio.unwrap_or_default();
        writeln!(
            out,
            "h {:.6e} basis {} error {:.6e} ratio {:.4}",
            r.h, r.basis_index, r.error, ratio
        )
        .map_err(io)?;
        if let Some([lo, hi]) = wp.expect_ratio {
            if !(lo..=hi).contains(&ratio) {
                out_of_band.push(format!("h {:e} basis {}: {ratio:.4}", r.h, r.basis_index));
            }
        }
    }

    if let Some(n) = wp.full_space_steps {
        let beta = beta_for(run.h_list[0])?;
        let walk = Walk::new(&alg, &beta, run.max_dim)?;
        let mut rng = ChaCha8Rng::seed_from_u64(run.seed);
        let x = alg.random_element(&mut rng).coeffs;
        let y = alg.random_element(&mut rng).coeffs;
        let xy = alg.table().mul(&x, &y);
        let jx = walk.operator(&x, n)?;
        let jy = walk.operator(&y, n)?;
        let jxy = walk.operator(&xy, n)?;
        let hom = qrw::linalg::frobenius(&(&jx * &jy - &jxy));
        let vac = walk.vacuum_from_operator(&x, n)?;
        let direct = alg.matrix_from_coeffs(&toy_fock::vacuum_expectation(&alg, &beta, &x, n)?);
        let compression = qrw::linalg::frobenius(&(&vac - &direct));
        writeln!(out, "full space n = {n}, dim {}", walk.dim_after(n)).map_err(io)?;
        writeln!(out, "homomorphism defect {hom:.3e}").map_err(io)?;
        writeln!(out, "vacuum compression vs 00-block iteration {compression:.3e}").map_err(io)?;
        if compression.is_nan() || compression > tol {
            return Err(CliError::Invariant(format!("vacuum compression mismatch {compression:.3e}")));
        }
        if wp.beta == BetaKind::Unitary && (hom.is_nan() || hom > tol) {
            return Err(CliError::Invariant(format!("homomorphism defect {hom:.3e}")));
        }
    }
    writeln!(out, "wrote {}", path.display()).map_err(io)?;
    if !out_of_band.is_empty() {
        return Err(CliError::Invariant(format!("ratios outside band: {}", out_of_band.join("; "))));
    }
    Ok(path)
}
