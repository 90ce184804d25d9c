//! Order-by-order construction of the coefficient maps `θ_μν^(n)` and the
//! truncated block maps `β(h)` they define.
//!
//! With `t = √h` the four series carry weights `2n` (corner 00), `2n − 1`
//! (corners 01 and 10) and `2n − 2` (corner 11). Multiplicativity of `β`
//! then reads, weight by weight,
//!
//! ```text
//! Θ_μν[w](xy) = Σ_η Σ_{a+b=w} Θ_μη[a](x) Θ_ην[b](y)
//! ```
//!
//! and each level `n` is obtained by moving the boundary terms (those with
//! an identity or `π` factor) to the left, where they form `∂θ`, and solving
//! the resulting coboundary equation corner by corner in the order
//! 11, 10, 01, 00.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::el_module::{Corner, ElModule, ProductTable};
use crate::exec::{DefaultExec, Exec};
use crate::hochschild::{Cochain, HochschildComplex, HochschildError};
use crate::linalg::{self, c64, frobenius, CMat};

/// Residual bound for cocycle checks and coboundary solves.
pub const SOLVE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoeffError {
    #[error("right-hand side for corner {corner} at level {n} is not a cocycle (residual {residual:.3e})")]
    NotCocycle { corner: Corner, n: usize, residual: f64 },
    #[error("corner {corner} at level {n}: no solution (residual {residual:.3e}, dim H² = {h2})")]
    Obstruction {
        corner: Corner,
        n: usize,
        residual: f64,
        h2: usize,
    },
    #[error("level {0} is not available")]
    MissingLevel(usize),
    #[error(transparent)]
    Hochschild(#[from] HochschildError),
}

/// Residuals recorded while producing one level. Corner 01 is defined as a
/// dagger and has no entries.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub n: usize,
    pub cocycle_residual: [Option<f64>; 4],
    pub solve_residual: [Option<f64>; 4],
}

/// The maps `θ_μν^(n)` for `n ≤ order`, stored as 1-cochains in the corner
/// coordinates of [`ElModule`]. `theta[c][n]` holds level `n` of corner `c`;
/// level 0 is the identity for corner 00 and zero elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaFamily {
    pub order: usize,
    pub theta: [Vec<Cochain>; 4],
    pub records: Vec<LevelRecord>,
}

impl ThetaFamily {
    pub fn get(&self, c: Corner, n: usize) -> &Cochain {
        &self.theta[c.index()][n]
    }
}

/// Relation residuals, one entry per corner and level.
#[derive(Clone, Debug, Default)]
pub struct RelationReport {
    pub entries: Vec<(Corner, usize, f64)>,
}

impl RelationReport {
    pub fn max_residual(&self) -> f64 {
        self.entries.iter().map(|e| e.2).fold(0.0, f64::max)
    }
}

/// A block map `A → E_L`, `x ↦ β(x)`, stored by the images of the basis as
/// `D × D` matrices on `h ⊕ (h ⊗ k)`.
#[derive(Clone, Debug)]
pub struct BetaBlock {
    pub h: f64,
    /// Truncation order, `None` for maps that are not truncated series.
    pub order: Option<usize>,
    pub d: usize,
    pub nk: usize,
    pub images: Vec<CMat>,
}

impl BetaBlock {
    pub fn block_dim(&self) -> usize {
        self.d * (1 + self.nk)
    }

    pub fn apply(&self, coeffs: &[c64]) -> CMat {
        let n = self.block_dim();
        let mut out = linalg::zeros(n, n);
        for (img, c) in self.images.iter().zip(coeffs) {
            linalg::add_scaled(&mut out, img, *c);
        }
        out
    }

    /// Corner `c` of `X`, as a matrix of its natural shape.
    pub fn block(&self, x: &CMat, c: Corner) -> CMat {
        let d = self.d;
        let size = |i: usize| if i == 0 { d } else { d * self.nk };
        x.submatrix(c.row() * d, c.col() * d, size(c.row()), size(c.col()))
            .to_owned()
    }

    /// Per-corner `max_{i,j} ‖β(B_i B_j) − β(B_i)β(B_j)‖_F`, indexed by
    /// [`Corner::index`].
    pub fn multiplicativity_defect(&self, table: &crate::star_algebra::AlgebraTable) -> [f64; 4] {
        let m = table.dim();
        let per_i = DefaultExec::map(m, |i| {
            let mut worst = [0.0f64; 4];
            for j in 0..m {
                let lhs = self.apply(table.product_row(i, j));
                let diff = &lhs - &(&self.images[i] * &self.images[j]);
                for c in Corner::ALL {
                    worst[c.index()] = worst[c.index()].max(frobenius(&self.block(&diff, c)));
                }
            }
            worst
        });
        let mut out = [0.0f64; 4];
        for w in per_i {
            for k in 0..4 {
                out[k] = out[k].max(w[k]);
            }
        }
        out
    }
}

/// Holds `E_L` and the four cochain complexes used by the induction.
#[derive(Debug)]
pub struct CoefficientEngine {
    el: ElModule,
    complexes: [HochschildComplex; 4],
}

fn weight(c: Corner, n: usize) -> isize {
    let n = n as isize;
    match c {
        Corner::C00 => 2 * n,
        Corner::C01 | Corner::C10 => 2 * n - 1,
        Corner::C11 => 2 * n - 2,
    }
}

/// Level of corner `c` carrying weight `w`, if any.
fn level_of(c: Corner, w: isize) -> Option<usize> {
    let n = match c {
        Corner::C00 if w >= 0 && w % 2 == 0 => w / 2,
        Corner::C01 | Corner::C10 if w >= 1 && w % 2 == 1 => (w + 1) / 2,
        Corner::C11 if w >= 0 && w % 2 == 0 => w / 2 + 1,
        _ => return None,
    };
    Some(n as usize)
}

impl CoefficientEngine {
    pub fn new(el: ElModule) -> Self {
        let table = el.gns().algebra().table().clone();
        let complexes = Corner::ALL
            .map(|c| HochschildComplex::new(table.clone(), el.corner(c).module.clone()));
        CoefficientEngine { el, complexes }
    }

    pub fn el(&self) -> &ElModule {
        &self.el
    }

    pub fn complex(&self, c: Corner) -> &HochschildComplex {
        &self.complexes[c.index()]
    }

    fn m(&self) -> usize {
        self.el.gns().algebra().dim()
    }

    fn zero(&self, c: Corner, degree: usize) -> Cochain {
        Cochain::zeros(degree, self.m(), self.el.corner(c).dim())
    }

    /// A 1-cochain from the matrices `f(B_i)`; fails if they leave the corner.
    fn cochain_from(&self, c: Corner, f: impl Fn(&CMat) -> CMat) -> Cochain {
        let space = self.el.corner(c);
        let mut out = self.zero(c, 1);
        for (i, b) in self.el.gns().algebra().basis().iter().enumerate() {
            let (coords, resid) = space.coords(&f(b));
            debug_assert!(resid < 1e-10, "seed leaves corner {c}: {resid:e}");
            out.value_mut(i).copy_from_slice(&coords);
        }
        out
    }

    /// Order-1 family: `θ_00^(0) = id`, `θ_00^(1) = L`, `θ_10^(1) = δ`,
    /// `θ_01^(1) = δ†`, `θ_11^(1) = π`.
    pub fn seed(&self) -> ThetaFamily {
        let gen = self.el.gns().generator();
        let p_k = self.el.gns().range_projector().clone();
        let id = self.cochain_from(Corner::C00, |x| x.clone());
        let l = self.cochain_from(Corner::C00, |x| gen.apply_matrix(x));
        let delta = self.cochain_from(Corner::C10, |x| gen.delta(x));
        let delta_dag = dagger(&delta);
        let pi = self.cochain_from(Corner::C11, |x| gen.pi(x) * &p_k);
        let theta = [
            vec![id, l],
            vec![self.zero(Corner::C01, 1), delta_dag],
            vec![self.zero(Corner::C10, 1), delta],
            vec![self.zero(Corner::C11, 1), pi],
        ];
        ThetaFamily {
            order: 1,
            theta,
            records: vec![LevelRecord {
                n: 1,
                ..Default::default()
            }],
        }
    }

    /// `φ(x, y) += a(x) b(y)` over all basis pairs.
    fn cup_into(&self, phi: &mut Cochain, ca: Corner, a: &Cochain, cb: Corner, b: &Cochain) {
        let table: &ProductTable = self.el.product(ca, cb);
        let m = self.m();
        let p = phi.p;
        let rows = DefaultExec::map(m, |i| {
            let mut out = vec![c64::new(0.0, 0.0); m * p];
            for j in 0..m {
                table.accumulate(a.value(i), b.value(j), &mut out[j * p..(j + 1) * p]);
            }
            out
        });
        for (i, row) in rows.into_iter().enumerate() {
            for (o, v) in phi.data[i * m * p..(i + 1) * m * p].iter_mut().zip(row) {
                *o += v;
            }
        }
    }

    /// Right-hand side `φ_μν^(n)` of `∂θ_μν^(n) = φ_μν^(n)`.
    pub fn phi(&self, fam: &ThetaFamily, corner: Corner, n: usize) -> Result<Cochain, CoeffError> {
        use Corner::*;
        let need = |c: Corner, k: usize| -> Result<&Cochain, CoeffError> {
            fam.theta[c.index()].get(k).ok_or(CoeffError::MissingLevel(k))
        };
        let mut phi = self.zero(corner, 2);
        let terms: Vec<(Corner, usize, Corner, usize)> = match corner {
            C11 => (1..n)
                .map(|k| (C10, k, C01, n - k))
                .chain((2..n).map(|k| (C11, k, C11, n - k + 1)))
                .collect(),
            C10 => (1..n)
                .map(|k| (C10, k, C00, n - k))
                .chain((2..=n).map(|k| (C11, k, C10, n - k + 1)))
                .collect(),
            C01 => (1..n)
                .map(|k| (C00, k, C01, n - k))
                .chain((1..n).map(|k| (C01, k, C11, n - k + 1)))
                .collect(),
            C00 => (1..n)
                .map(|k| (C00, k, C00, n - k))
                .chain((1..=n).map(|k| (C01, k, C10, n - k + 1)))
                .collect(),
        };
        for (ca, ka, cb, kb) in terms {
            let a = need(ca, ka)?;
            let b = need(cb, kb)?;
            self.cup_into(&mut phi, ca, a, cb, b);
        }
        Ok(phi)
    }

    fn solve_corner(
        &self,
        fam: &ThetaFamily,
        corner: Corner,
        n: usize,
        symmetrize: bool,
        record: &mut LevelRecord,
    ) -> Result<Cochain, CoeffError> {
        let phi = self.phi(fam, corner, n)?;
        let cx = self.complex(corner);
        let (_, cocycle) = cx.is_cocycle(&phi, SOLVE_TOL)?;
        record.cocycle_residual[corner.index()] = Some(cocycle);
        if cocycle > SOLVE_TOL {
            return Err(CoeffError::NotCocycle {
                corner,
                n,
                residual: cocycle,
            });
        }
        let sol = cx.solve_coboundary(&phi, SOLVE_TOL).map_err(|e| match e {
            HochschildError::Obstruction { residual, h2 } => CoeffError::Obstruction {
                corner,
                n,
                residual,
                h2,
            },
            other => other.into(),
        })?;
        let mut theta = sol.theta;
        let mut residual = sol.residual;
        if symmetrize {
            // ½(θ + θ†) is the real part in a Hermitian basis
            for z in theta.data.iter_mut() {
                *z = c64::new(z.re, 0.0);
            }
            residual = cx
                .coboundary(&theta)?
                .data
                .iter()
                .zip(&phi.data)
                .map(|(a, b)| a - b)
                .collect::<Vec<_>>()
                .chunks(phi.p.max(1))
                .map(linalg::vnorm)
                .fold(0.0, f64::max);
        }
        record.solve_residual[corner.index()] = Some(residual);
        if residual > SOLVE_TOL {
            return Err(CoeffError::Obstruction {
                corner,
                n,
                residual,
                h2: cx.cohomology_dim(2)?,
            });
        }
        Ok(theta)
    }

    /// Adds level `order + 1`.
    pub fn extend(&self, fam: &mut ThetaFamily) -> Result<(), CoeffError> {
        let n = fam.order + 1;
        let mut record = LevelRecord {
            n,
            ..Default::default()
        };
        let t11 = self.solve_corner(fam, Corner::C11, n, true, &mut record)?;
        fam.theta[Corner::C11.index()].push(t11);
        let t10 = self.solve_corner(fam, Corner::C10, n, false, &mut record)?;
        fam.theta[Corner::C01.index()].push(dagger(&t10));
        fam.theta[Corner::C10.index()].push(t10);
        let t00 = self.solve_corner(fam, Corner::C00, n, true, &mut record)?;
        fam.theta[Corner::C00.index()].push(t00);
        fam.order = n;
        fam.records.push(record);
        Ok(())
    }

    /// Seed and extend up to `order`.
    pub fn build(&self, order: usize) -> Result<ThetaFamily, CoeffError> {
        let mut fam = self.seed();
        while fam.order < order {
            self.extend(&mut fam)?;
        }
        Ok(fam)
    }

    /// Checks the weight-graded product relations at every level with the
    /// full range of terms, including the boundary terms.
    pub fn verify_relations(&self, fam: &ThetaFamily) -> RelationReport {
        let table = self.el.gns().algebra().table();
        let m = self.m();
        let mut report = RelationReport::default();
        for n in 1..=fam.order {
            for corner in Corner::ALL {
                let w = weight(corner, n);
                let theta = fam.get(corner, n);
                // θ(xy) over all basis pairs
                let mut diff = self.zero(corner, 2);
                for i in 0..m {
                    for j in 0..m {
                        let out = diff.value_mut(i * m + j);
                        for (k, c) in table.product_row(i, j).iter().enumerate() {
                            for (o, v) in out.iter_mut().zip(theta.value(k)) {
                                *o += c * v;
                            }
                        }
                    }
                }
                let mut rhs = self.zero(corner, 2);
                for eta in 0..2 {
                    let ca = Corner::from_indices(corner.row(), eta);
                    let cb = Corner::from_indices(eta, corner.col());
                    for a in 0..=w {
                        let (Some(la), Some(lb)) = (level_of(ca, a), level_of(cb, w - a)) else {
                            continue;
                        };
                        self.cup_into(&mut rhs, ca, fam.get(ca, la), cb, fam.get(cb, lb));
                    }
                }
                for (d, r) in diff.data.iter_mut().zip(&rhs.data) {
                    *d -= r;
                }
                report.entries.push((corner, n, diff.max_norm()));
            }
        }
        report
    }

    /// `max ‖θ_μν^(n)(x*) − θ_νμ^(n)(x)*‖_F` over levels, corners and basis
    /// elements, evaluated on the realized matrices.
    pub fn dagger_symmetry(&self, fam: &ThetaFamily) -> f64 {
        let m = self.m();
        let mut worst = 0.0f64;
        for n in 1..=fam.order {
            for c in Corner::ALL {
                let space = self.el.corner(c);
                let partner = self.el.corner(c.dagger());
                for i in 0..m {
                    // basis elements are Hermitian, so x* = x
                    let lhs = space.matrix(fam.get(c, n).value(i));
                    let rhs = linalg::adjoint(&partner.matrix(fam.get(c.dagger(), n).value(i)));
                    worst = worst.max(frobenius(&(&lhs - &rhs)));
                }
            }
        }
        worst
    }

    /// `max_n ‖θ^(n)(1) − θ^(n)(1)|_{expected}‖`: zero except `θ_00^(0)(1) = 1`
    /// and `θ_11^(1)(1) = π(1)`.
    pub fn unitality_defect(&self, fam: &ThetaFamily) -> f64 {
        let unit = self.el.gns().algebra().table().unit().to_vec();
        let mut worst = 0.0f64;
        for n in 1..=fam.order {
            for c in Corner::ALL {
                if c == Corner::C11 && n == 1 {
                    continue;
                }
                let theta = fam.get(c, n);
                let mut v = vec![c64::new(0.0, 0.0); theta.p];
                for (i, u) in unit.iter().enumerate() {
                    for (o, t) in v.iter_mut().zip(theta.value(i)) {
                        *o += u * t;
                    }
                }
                worst = worst.max(linalg::vnorm(&v));
            }
        }
        worst
    }

    /// `β(h)` truncated at level `order`.
    pub fn assemble_beta(&self, fam: &ThetaFamily, h: f64, order: usize) -> Result<BetaBlock, CoeffError> {
        if order > fam.order {
            return Err(CoeffError::MissingLevel(order));
        }
        let m = self.m();
        let d = self.el.gns().algebra().ambient_dim();
        let nk = self.el.gns().multiplicity();
        let images = (0..m)
            .map(|i| {
                let mut coords: [Vec<c64>; 4] =
                    Corner::ALL.map(|c| vec![c64::new(0.0, 0.0); self.el.corner(c).dim()]);
                for c in Corner::ALL {
                    let first = if c == Corner::C00 { 0 } else { 1 };
                    for n in first..=order {
                        let scale = h.powf(weight(c, n) as f64 / 2.0);
                        for (o, v) in coords[c.index()].iter_mut().zip(fam.get(c, n).value(i)) {
                            *o += v * scale;
                        }
                    }
                }
                self.el
                    .assemble([&coords[0], &coords[1], &coords[2], &coords[3]])
            })
            .collect();
        Ok(BetaBlock {
            h,
            order: Some(order),
            d,
            nk,
            images,
        })
    }
}

/// `ψ†(x) = ψ(x*)*` in coordinates: conjugation, moving to the partner
/// corner.
pub fn dagger(psi: &Cochain) -> Cochain {
    Cochain {
        degree: psi.degree,
        m: psi.m,
        p: psi.p,
        data: ElModule::dagger_coords(&psi.data),
    }
}
