//! Quantum random walks on `h ⊗ k̂^{⊗n}` with `k̂ = CΩ ⊕ k`.
//!
//! A one-step map `β` sends `x` to a `(1 + N_k) × (1 + N_k)` array of `d × d`
//! blocks. The walk is `j_0(x) = x` and `j_n = (j_{n−1} ⊗ id) ∘ β`; the slot
//! added last is the outermost tensor factor, so block `(s, s')` of `j_n(x)`
//! is `j_{n−1}(β(x)[s, s'])`. Compressing every slot to the vacuum leaves
//! the `d × d` top-left block, which is `β_00^{∘n}(x)`.

use thiserror::Error;

use crate::coefficients::{BetaBlock, CoeffError};
use crate::el_module::Corner;
use crate::exec::{DefaultExec, Exec};
use crate::gns::LindbladGenerator;
use crate::linalg::{self, block_diag_repeat, c64, expm, frobenius, CMat, LinalgError};
use crate::star_algebra::StarAlgebra;

/// Default bound on the side length `d (1 + N_k)^n` of a walk operator.
pub const DEFAULT_MAX_DIM: usize = 8192;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WalkError {
    #[error("walk operator would be {dim}x{dim}, above the cap {cap}")]
    MemoryCap { dim: usize, cap: usize },
    #[error("block ({s}, {t}) of β(B_{j}) is not in the algebra (residual {residual:.3e})")]
    BlockOutsideAlgebra {
        j: usize,
        s: usize,
        t: usize,
        residual: f64,
    },
    #[error("the unitary step needs the full matrix algebra (dim {dim}, d^2 = {full})")]
    NotFullAlgebra { dim: usize, full: usize },
    #[error("payload for kind {kind} has shape {rows}x{cols}, expected {er}x{ec}")]
    Shape {
        kind: Corner,
        rows: usize,
        cols: usize,
        er: usize,
        ec: usize,
    },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Coefficients(#[from] CoeffError),
}

/// One slot `k̂ = CΩ ⊕ k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ToySlot {
    pub nk: usize,
}

impl ToySlot {
    pub fn dim(&self) -> usize {
        1 + self.nk
    }

    pub fn vacuum(&self) -> Vec<c64> {
        let mut v = vec![c64::new(0.0, 0.0); self.dim()];
        v[0] = c64::new(1.0, 0.0);
        v
    }
}

/// An operator on `h ⊗ k̂` with a single nonzero block.
#[derive(Clone, Debug, PartialEq)]
pub struct CompressedN {
    pub kind: Corner,
    pub payload: CMat,
    d: usize,
    nk: usize,
}

impl CompressedN {
    pub fn new(kind: Corner, payload: CMat, d: usize, nk: usize) -> Result<Self, WalkError> {
        let size = |i: usize| if i == 0 { d } else { d * nk };
        let (er, ec) = (size(kind.row()), size(kind.col()));
        if payload.nrows() != er || payload.ncols() != ec {
            return Err(WalkError::Shape {
                kind,
                rows: payload.nrows(),
                cols: payload.ncols(),
                er,
                ec,
            });
        }
        Ok(CompressedN {
            kind,
            payload,
            d,
            nk,
        })
    }

    /// The operator on `h ⊗ k̂`, `d (1 + N_k)` square.
    pub fn realize(&self) -> CMat {
        let n = self.d * (1 + self.nk);
        let mut out = linalg::zeros(n, n);
        out.submatrix_mut(
            self.kind.row() * self.d,
            self.kind.col() * self.d,
            self.payload.nrows(),
            self.payload.ncols(),
        )
        .copy_from(&self.payload);
        out
    }

    /// `(N_X^{μν})* = N_{X*}^{νμ}`.
    pub fn adjoint(&self) -> CompressedN {
        CompressedN {
            kind: self.kind.dagger(),
            payload: linalg::adjoint(&self.payload),
            d: self.d,
            nk: self.nk,
        }
    }

    /// `N_X^{μν} N_Y^{ηξ} = δ_ν^η N_{XY}^{μξ}`; `None` when the product
    /// vanishes.
    pub fn compose(&self, other: &CompressedN) -> Option<CompressedN> {
        if self.kind.col() != other.kind.row() {
            return None;
        }
        Some(CompressedN {
            kind: Corner::from_indices(self.kind.row(), other.kind.col()),
            payload: &self.payload * &other.payload,
            d: self.d,
            nk: self.nk,
        })
    }
}

/// `‖U_h* U_h − 1‖_F` and friends are checked by callers; this only builds
/// the step.
fn polar_unitary(a: &CMat) -> Result<CMat, WalkError> {
    let svd = a.svd().map_err(|_| LinalgError::NoConvergence)?;
    let smin = (0..a.nrows()).map(|i| svd.S()[i].re).fold(f64::INFINITY, f64::min);
    if smin <= 1e-8 {
        return Err(LinalgError::Unstable {
            step: 0,
            residual: smin,
        }
        .into());
    }
    Ok(svd.U() * svd.V().adjoint())
}

/// `U_h`: the polar factor of `[[1 + hG, −√h L*], [√h L, 1]]`.
pub fn step_unitary(gen: &LindbladGenerator, h: f64) -> Result<CMat, WalkError> {
    let d = gen.dim();
    let nk = gen.multiplicity();
    let n = d * (1 + nk);
    let col = linalg::scaled(&gen.stacked(), c64::new(h.sqrt(), 0.0));
    let mut raw = linalg::identity(n);
    let mut top = linalg::identity(d);
    linalg::add_scaled(&mut top, gen.g(), c64::new(h, 0.0));
    raw.submatrix_mut(0, 0, d, d).copy_from(&top);
    if nk > 0 {
        raw.submatrix_mut(d, 0, d * nk, d).copy_from(&col);
        let row = linalg::scaled(&linalg::adjoint(&col), c64::new(-1.0, 0.0));
        raw.submatrix_mut(0, d, d, d * nk).copy_from(&row);
    }
    polar_unitary(&raw)
}

/// The exact *-homomorphism `β(h)(x) = U_h* (x ⊗ 1_{k̂}) U_h`.
pub fn beta_unitary(alg: &StarAlgebra, gen: &LindbladGenerator, h: f64) -> Result<BetaBlock, WalkError> {
    let d = alg.ambient_dim();
    if alg.dim() != d * d {
        return Err(WalkError::NotFullAlgebra {
            dim: alg.dim(),
            full: d * d,
        });
    }
    let nk = gen.multiplicity();
    let u = step_unitary(gen, h)?;
    let images = alg
        .basis()
        .iter()
        .map(|b| u.adjoint() * block_diag_repeat(b, 1 + nk) * &u)
        .collect();
    Ok(BetaBlock {
        h,
        order: None,
        d,
        nk,
        images,
    })
}

/// A one-step map with every block expressed in algebra coordinates, ready
/// to be iterated.
#[derive(Clone, Debug)]
pub struct Walk {
    alg: StarAlgebra,
    slot: ToySlot,
    /// `blocks[j][s * S + t]`: coordinates of block `(s, t)` of `β(B_j)`.
    blocks: Vec<Vec<Vec<c64>>>,
    max_dim: usize,
}

impl Walk {
    pub fn new(alg: &StarAlgebra, beta: &BetaBlock, max_dim: usize) -> Result<Self, WalkError> {
        let d = beta.d;
        let s_dim = 1 + beta.nk;
        let mut blocks = Vec::with_capacity(beta.images.len());
        for (j, img) in beta.images.iter().enumerate() {
            let mut row = Vec::with_capacity(s_dim * s_dim);
            for s in 0..s_dim {
                for t in 0..s_dim {
                    let blk = img.submatrix(s * d, t * d, d, d).to_owned();
                    let (coeffs, residual) = alg.project(&blk);
                    if residual > 1e-10 {
                        return Err(WalkError::BlockOutsideAlgebra { j, s, t, residual });
                    }
                    row.push(coeffs);
                }
            }
            blocks.push(row);
        }
        Ok(Walk {
            alg: alg.clone(),
            slot: ToySlot { nk: beta.nk },
            blocks,
            max_dim,
        })
    }

    pub fn slot(&self) -> ToySlot {
        self.slot
    }

    pub fn dim_after(&self, n: usize) -> usize {
        self.alg.ambient_dim() * self.slot.dim().pow(n as u32)
    }

    fn block_coeffs(&self, x: &[c64], st: usize) -> Vec<c64> {
        let m = self.alg.dim();
        let mut out = vec![c64::new(0.0, 0.0); m];
        for (xj, blocks) in x.iter().zip(&self.blocks) {
            if *xj == c64::new(0.0, 0.0) {
                continue;
            }
            for (o, b) in out.iter_mut().zip(&blocks[st]) {
                *o += xj * b;
            }
        }
        out
    }

    /// `j_n(x)` for `x` given by coordinates.
    pub fn operator(&self, x: &[c64], n: usize) -> Result<CMat, WalkError> {
        let dim = self.dim_after(n);
        if dim > self.max_dim {
            return Err(WalkError::MemoryCap {
                dim,
                cap: self.max_dim,
            });
        }
        Ok(self.operator_with::<DefaultExec>(x, n))
    }

    /// As [`Walk::operator`] with an explicit execution strategy for the
    /// top-level block expansion; no memory cap.
    pub fn operator_with<E: Exec>(&self, x: &[c64], n: usize) -> CMat {
        if n == 0 {
            return self.alg.matrix_from_coeffs(x);
        }
        let s_dim = self.slot.dim();
        let inner = self.dim_after(n - 1);
        let subs = E::map(s_dim * s_dim, |st| {
            self.operator_rec(&self.block_coeffs(x, st), n - 1)
        });
        let mut out = linalg::zeros(inner * s_dim, inner * s_dim);
        for (st, sub) in subs.iter().enumerate() {
            let (s, t) = (st / s_dim, st % s_dim);
            out.submatrix_mut(s * inner, t * inner, inner, inner).copy_from(sub);
        }
        out
    }

    fn operator_rec(&self, x: &[c64], n: usize) -> CMat {
        if n == 0 {
            return self.alg.matrix_from_coeffs(x);
        }
        let s_dim = self.slot.dim();
        let inner = self.dim_after(n - 1);
        let mut out = linalg::zeros(inner * s_dim, inner * s_dim);
        for st in 0..s_dim * s_dim {
            let y = self.block_coeffs(x, st);
            if y.iter().all(|z| *z == c64::new(0.0, 0.0)) {
                continue;
            }
            let (s, t) = (st / s_dim, st % s_dim);
            let sub = self.operator_rec(&y, n - 1);
            out.submatrix_mut(s * inner, t * inner, inner, inner).copy_from(&sub);
        }
        out
    }

    /// Top-left `d × d` block of `j_n(x)`.
    pub fn vacuum_from_operator(&self, x: &[c64], n: usize) -> Result<CMat, WalkError> {
        let d = self.alg.ambient_dim();
        Ok(self.operator(x, n)?.submatrix(0, 0, d, d).to_owned())
    }
}

/// `β_00` in algebra coordinates, `m × m`.
pub fn vacuum_step(alg: &StarAlgebra, beta: &BetaBlock) -> Result<CMat, WalkError> {
    let m = alg.dim();
    let mut out = linalg::zeros(m, m);
    for (j, img) in beta.images.iter().enumerate() {
        let (coeffs, residual) = alg.project(&beta.block(img, Corner::C00));
        if residual > 1e-10 {
            return Err(WalkError::BlockOutsideAlgebra {
                j,
                s: 0,
                t: 0,
                residual,
            });
        }
        for (k, c) in coeffs.into_iter().enumerate() {
            out[(k, j)] = c;
        }
    }
    Ok(out)
}

/// `β_00^{∘n}(x)` by iterating the `m × m` vacuum step.
pub fn vacuum_expectation(alg: &StarAlgebra, beta: &BetaBlock, x: &[c64], n: usize) -> Result<Vec<c64>, WalkError> {
    let step = vacuum_step(alg, beta)?;
    let mut y = x.to_vec();
    for _ in 0..n {
        y = (0..y.len())
            .map(|k| (0..y.len()).map(|j| step[(k, j)] * y[j]).sum())
            .collect();
    }
    Ok(y)
}

/// Matrix of `L` in algebra coordinates.
pub fn generator_matrix(alg: &StarAlgebra, gen: &LindbladGenerator) -> CMat {
    let m = alg.dim();
    let mut out = linalg::zeros(m, m);
    for (j, b) in alg.basis().iter().enumerate() {
        let (coeffs, _) = alg.project(&gen.apply_matrix(b));
        for (k, c) in coeffs.into_iter().enumerate() {
            out[(k, j)] = c;
        }
    }
    out
}

/// `e^{tL}` in algebra coordinates.
pub fn semigroup(alg: &StarAlgebra, gen: &LindbladGenerator, t: f64) -> CMat {
    expm(&linalg::scaled(&generator_matrix(alg, gen), c64::new(t, 0.0)))
}

/// Errors below this are round-off (e.g. the unit, which every walk fixes)
/// and give meaningless ratios.
pub const RATIO_FLOOR: f64 = 1e-10;

/// One line of a convergence report.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub h: f64,
    pub n: usize,
    pub basis_index: usize,
    pub error: f64,
    /// `error(previous h) / error(this h)`; absent on the first row of each
    /// basis index and when either error is below [`RATIO_FLOOR`].
    pub ratio: Option<f64>,
}

/// `‖β_00(h)^{∘n}(B_i) − e^{tL}(B_i)‖_F` for each `h` in `h_list`, with
/// `n = round(t / h)`. Rows for different `h` are computed independently.
pub fn convergence_report<F>(
    alg: &StarAlgebra,
    gen: &LindbladGenerator,
    beta_for: F,
    t: f64,
    h_list: &[f64],
) -> Result<Vec<ReportRow>, WalkError>
where
    F: Fn(f64) -> Result<BetaBlock, WalkError> + Sync + Send,
{
    let m = alg.dim();
    let exact = semigroup(alg, gen, t);
    let per_h = DefaultExec::map(h_list.len(), |hi| -> Result<Vec<(f64, usize, f64)>, WalkError> {
        let h = h_list[hi];
        let n = (t / h).round() as usize;
        let beta = beta_for(h)?;
        let step = vacuum_step(alg, &beta)?;
        let mut power = linalg::identity(m);
        // square-and-multiply keeps the step count logarithmic
        let mut base = step;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                power = &power * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        let diff = &power - &exact;
        Ok((0..m)
            .map(|i| {
                let col: Vec<c64> = (0..m).map(|k| diff[(k, i)]).collect();
                (h, n, linalg::vnorm(&col))
            })
            .collect())
    });
    let mut rows = Vec::new();
    let mut prev: Option<Vec<(f64, usize, f64)>> = None;
    for res in per_h {
        let cur = res?;
        for (i, &(h, n, error)) in cur.iter().enumerate() {
            rows.push(ReportRow {
                h,
                n,
                basis_index: i,
                error,
                ratio: prev
                    .as_ref()
                    .filter(|p| p[i].2 > RATIO_FLOOR && error > RATIO_FLOOR)
                    .map(|p| p[i].2 / error),
            });
        }
        prev = Some(cur);
    }
    Ok(rows)
}

/// CSV with header `h,n,basis_index,error,ratio`.
pub fn report_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from("h,n,basis_index,error,ratio\n");
    for r in rows {
        let ratio = r.ratio.map(|x| format!("{x:.6}")).unwrap_or_default();
        out.push_str(&format!("{:e},{},{},{:.6e},{}\n", r.h, r.n, r.basis_index, r.error, ratio));
    }
    out
}

/// A product vector `u ⊗ v_1 ⊗ … ⊗ v_n` in the walk layout (last slot
/// outermost). Slot vectors need not be normalized; the usual compression
/// of an exponential vector puts `(1, √h f_k)` in slot `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductState {
    pub system: Vec<c64>,
    pub slots: Vec<Vec<c64>>,
}

impl ProductState {
    pub fn vector(&self) -> Vec<c64> {
        let mut v = self.system.clone();
        for slot in &self.slots {
            let mut next = Vec::with_capacity(v.len() * slot.len());
            for s in slot {
                next.extend(v.iter().map(|a| s * a));
            }
            v = next;
        }
        v
    }

    /// `⟨ψ, X ψ⟩`.
    pub fn expectation(&self, x: &CMat) -> c64 {
        let v = self.vector();
        let mut acc = c64::new(0.0, 0.0);
        for i in 0..v.len() {
            let mut row = c64::new(0.0, 0.0);
            for (j, vj) in v.iter().enumerate() {
                row += x[(i, j)] * vj;
            }
            acc += v[i].conj() * row;
        }
        acc
    }
}

/// `‖U* U − 1‖_F`.
pub fn unitarity_defect(u: &CMat) -> f64 {
    frobenius(&(u.adjoint() * u - linalg::identity(u.nrows())))
}
