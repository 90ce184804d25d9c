//! Dense and sparse complex linear algebra shared by every module.
//!
//! Dense work goes through `faer`. Coboundary operators are assembled as
//! [`SparseMatrix`] values, since their row count grows like `m^{n+1}` while
//! each row only touches a handful of columns.

use faer::linalg::solvers::Solve;
use faer::{Mat, MatRef, Side};
use thiserror::Error;

use crate::exec::Exec;

pub use faer::c64;

/// Dense complex matrix.
pub type CMat = Mat<c64>;

/// Relative singular-value threshold used for every rank decision.
pub const RANK_RTOL: f64 = 1e-10;

/// Above this many stored entries a sparse rank is computed from the
/// eigenvalues of its Gram matrix instead of a dense SVD.
pub const DENSE_SVD_LIMIT: usize = 1 << 21;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("rank decision is ambiguous: value {value:.3e} lies within a factor 10 of threshold {threshold:.3e}")]
    RankGap { value: f64, threshold: f64 },
    #[error("orthonormalization lost rank at step {step} (residual {residual:.3e})")]
    Unstable { step: usize, residual: f64 },
    #[error("eigen/singular value decomposition did not converge")]
    NoConvergence,
}

pub fn zeros(rows: usize, cols: usize) -> CMat {
    Mat::zeros(rows, cols)
}

pub fn identity(n: usize) -> CMat {
    Mat::identity(n, n)
}

pub fn adjoint(a: &CMat) -> CMat {
    a.adjoint().to_owned()
}

pub fn scaled(a: &CMat, s: c64) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * s)
}

/// `acc += s * a`
pub fn add_scaled(acc: &mut CMat, a: &CMat, s: c64) {
    debug_assert_eq!((acc.nrows(), acc.ncols()), (a.nrows(), a.ncols()));
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            acc[(i, j)] += a[(i, j)] * s;
        }
    }
}

pub fn frobenius(a: &CMat) -> f64 {
    a.norm_l2()
}

/// Operator 2-norm (largest singular value).
pub fn op_norm(a: &CMat) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0.0;
    }
    a.singular_values()
        .map(|s| s.first().copied().unwrap_or(0.0))
        .unwrap_or(f64::NAN)
}

/// Trace inner product `Tr(a* b)`.
pub fn inner(a: &CMat, b: &CMat) -> c64 {
    let mut acc = c64::new(0.0, 0.0);
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            acc += a[(i, j)].conj() * b[(i, j)];
        }
    }
    acc
}

/// `x ⊗ 1_copies` in the copy-major layout used throughout: a block diagonal
/// matrix holding `copies` copies of `x`.
pub fn block_diag_repeat(x: &CMat, copies: usize) -> CMat {
    let (r, c) = (x.nrows(), x.ncols());
    let mut out = zeros(r * copies, c * copies);
    for k in 0..copies {
        out.submatrix_mut(k * r, k * c, r, c).copy_from(x);
    }
    out
}

/// Column-major flattening.
pub fn vectorize(a: &CMat) -> Vec<c64> {
    let mut v = Vec::with_capacity(a.nrows() * a.ncols());
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            v.push(a[(i, j)]);
        }
    }
    v
}

pub fn unvectorize(v: &[c64], rows: usize, cols: usize) -> CMat {
    assert_eq!(v.len(), rows * cols);
    Mat::from_fn(rows, cols, |i, j| v[j * rows + i])
}

pub fn vnorm(v: &[c64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).fold(0.0, |a, b| a + b).sqrt()
}

/// `Σ conj(a_i) b_i`
pub fn vdot(a: &[c64], b: &[c64]) -> c64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn axpy(y: &mut [c64], alpha: c64, x: &[c64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Which route produced a [`RankReport`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankMethod {
    /// Singular values of the matrix itself.
    Svd,
    /// Square roots of the eigenvalues of `A* A`; the relative threshold
    /// then applies to `σ²`.
    Gram,
}

#[derive(Clone, Debug)]
pub struct RankReport {
    pub rank: usize,
    /// Singular values in nonincreasing order.
    pub singular_values: Vec<f64>,
    /// Absolute cut on the singular values.
    pub threshold: f64,
    pub method: RankMethod,
    /// Set when a singular value sits within a factor 10 of the cut.
    pub ambiguous: Option<f64>,
}

impl RankReport {
    fn from_values(values: Vec<f64>, method: RankMethod) -> Self {
        // `values` are singular values (Svd) or eigenvalues of the Gram
        // matrix (Gram), both nonincreasing.
        let top = values.first().copied().unwrap_or(0.0).max(0.0);
        let cut = RANK_RTOL * top;
        let rank = if top == 0.0 {
            0
        } else {
            values.iter().filter(|&&v| v > cut).count()
        };
        let ambiguous = if top == 0.0 {
            None
        } else {
            values
                .iter()
                .copied()
                .find(|&v| v > cut / 10.0 && v <= cut * 10.0)
        };
        let (singular_values, threshold, ambiguous) = match method {
            RankMethod::Svd => (values, cut, ambiguous),
            RankMethod::Gram => (
                values.iter().map(|v| v.max(0.0).sqrt()).collect(),
                cut.sqrt(),
                ambiguous.map(f64::sqrt),
            ),
        };
        RankReport {
            rank,
            singular_values,
            threshold,
            method,
            ambiguous,
        }
    }

    pub fn check(&self) -> Result<usize, LinalgError> {
        match self.ambiguous {
            Some(value) => Err(LinalgError::RankGap {
                value,
                threshold: self.threshold,
            }),
            None => Ok(self.rank),
        }
    }
}

pub fn dense_rank(a: MatRef<'_, c64>) -> Result<RankReport, LinalgError> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(RankReport::from_values(vec![], RankMethod::Svd));
    }
    let s = a.singular_values().map_err(|_| LinalgError::NoConvergence)?;
    Ok(RankReport::from_values(s, RankMethod::Svd))
}

/// Rank of `A` given its Hermitian positive semidefinite Gram matrix `A* A`.
pub fn gram_rank(gram: &CMat) -> Result<RankReport, LinalgError> {
    if gram.nrows() == 0 {
        return Ok(RankReport::from_values(vec![], RankMethod::Gram));
    }
    let mut ev = gram
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| LinalgError::NoConvergence)?;
    ev.reverse();
    Ok(RankReport::from_values(ev, RankMethod::Gram))
}

/// Orthonormal basis (as columns) of the null space of a dense matrix.
pub fn nullspace(a: &CMat) -> Result<Vec<Vec<c64>>, LinalgError> {
    let (r, n) = (a.nrows(), a.ncols());
    if n == 0 {
        return Ok(vec![]);
    }
    if r == 0 {
        return Ok((0..n)
            .map(|j| (0..n).map(|i| c64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
            .collect());
    }
    // Tall matrices go through the thin SVD of the adjoint, whose left
    // singular vectors are the right singular vectors of `a`.
    let (v, s) = if r >= n {
        let svd = a
            .adjoint()
            .to_owned()
            .thin_svd()
            .map_err(|_| LinalgError::NoConvergence)?;
        let s: Vec<f64> = (0..n).map(|i| svd.S()[i].re).collect();
        (svd.U().to_owned(), s)
    } else {
        let svd = a.svd().map_err(|_| LinalgError::NoConvergence)?;
        let s: Vec<f64> = (0..r).map(|i| svd.S()[i].re).collect();
        (svd.V().to_owned(), s)
    };
    let rank = RankReport::from_values(s, RankMethod::Svd).check()?;
    Ok((rank..n)
        .map(|j| (0..n).map(|i| v[(i, j)]).collect())
        .collect())
}

/// Null space of `A` from its Gram matrix `A* A`.
pub fn gram_nullspace(gram: &CMat) -> Result<Vec<Vec<c64>>, LinalgError> {
    let n = gram.nrows();
    if n == 0 {
        return Ok(vec![]);
    }
    let eig = gram
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| LinalgError::NoConvergence)?;
    // eigenvalues ascend
    let mut values: Vec<f64> = (0..n).map(|i| eig.S()[i].re).collect();
    values.reverse();
    let report = RankReport::from_values(values, RankMethod::Gram);
    let rank = report.check()?;
    let u = eig.U();
    Ok((0..n - rank)
        .map(|j| (0..n).map(|i| u[(i, j)]).collect())
        .collect())
}

/// Orthonormal basis for the span of `candidates`, chosen by pivoted
/// modified Gram-Schmidt: at every step the candidate with the largest
/// residual is taken (ties go to the lowest index). The span dimension comes
/// from the singular values of the candidate matrix.
pub fn orthonormal_span(candidates: &[Vec<c64>]) -> Result<Vec<Vec<c64>>, LinalgError> {
    let Some(first) = candidates.first() else {
        return Ok(vec![]);
    };
    let len = first.len();
    let a = Mat::from_fn(len, candidates.len(), |i, j| candidates[j][i]);
    let report = dense_rank(a.as_ref())?;
    let rank = report.check()?;

    let mut residual: Vec<Vec<c64>> = candidates.to_vec();
    let mut used = vec![false; candidates.len()];
    let mut out: Vec<Vec<c64>> = Vec::with_capacity(rank);
    for step in 0..rank {
        let mut best = None::<(usize, f64)>;
        for (i, v) in residual.iter().enumerate() {
            if used[i] {
                continue;
            }
            let nrm = vnorm(v);
            if best.is_none_or(|(_, b)| nrm > b) {
                best = Some((i, nrm));
            }
        }
        let (idx, nrm) = best.ok_or(LinalgError::Unstable { step, residual: 0.0 })?;
        if nrm <= report.threshold {
            return Err(LinalgError::Unstable {
                step,
                residual: nrm,
            });
        }
        used[idx] = true;
        let q: Vec<c64> = residual[idx].iter().map(|z| z / nrm).collect();
        for (i, v) in residual.iter_mut().enumerate() {
            if used[i] {
                continue;
            }
            for _ in 0..2 {
                let c = vdot(&q, v);
                axpy(v, -c, &q);
            }
        }
        out.push(q);
    }
    Ok(out)
}

/// Same as [`orthonormal_span`] for matrices of a common shape.
pub fn orthonormal_matrix_span(candidates: &[CMat]) -> Result<Vec<CMat>, LinalgError> {
    let Some(first) = candidates.first() else {
        return Ok(vec![]);
    };
    let (r, c) = (first.nrows(), first.ncols());
    let vecs: Vec<Vec<c64>> = candidates.iter().map(vectorize).collect();
    Ok(orthonormal_span(&vecs)?
        .iter()
        .map(|v| unvectorize(v, r, c))
        .collect())
}

/// Hermitian orthonormal basis of a *-closed space of square matrices.
///
/// `span` must be an orthonormal basis of the space. If `first` is given it
/// must be a nonzero Hermitian member of the space; it becomes the first
/// basis vector (normalized). Every returned matrix is exactly Hermitian.
pub fn hermitian_basis(span: &[CMat], first: Option<&CMat>) -> Result<Vec<CMat>, LinalgError> {
    let dim = span.len();
    if dim == 0 {
        return Ok(vec![]);
    }
    let i_unit = c64::new(0.0, 1.0);
    let mut cands: Vec<CMat> = Vec::with_capacity(2 * dim + 1);
    for q in span {
        let qa = adjoint(q);
        cands.push(Mat::from_fn(q.nrows(), q.ncols(), |i, j| (q[(i, j)] + qa[(i, j)]) * 0.5));
        cands.push(Mat::from_fn(q.nrows(), q.ncols(), |i, j| {
            (q[(i, j)] - qa[(i, j)]) / (i_unit * 2.0)
        }));
    }
    let real_dot = |a: &CMat, b: &CMat| inner(a, b).re;

    let mut out: Vec<CMat> = Vec::with_capacity(dim);
    let mut residual = cands;
    let orthogonalize = |residual: &mut Vec<CMat>, q: &CMat| {
        for v in residual.iter_mut() {
            for _ in 0..2 {
                let c = real_dot(q, v);
                add_scaled(v, q, c64::new(-c, 0.0));
            }
        }
    };
    if let Some(f) = first {
        let nrm = frobenius(f);
        if nrm == 0.0 {
            return Err(LinalgError::Unstable {
                step: 0,
                residual: 0.0,
            });
        }
        let q = hermitize(&scaled(f, c64::new(1.0 / nrm, 0.0)));
        orthogonalize(&mut residual, &q);
        out.push(q);
    }
    while out.len() < dim {
        let (idx, nrm) = residual
            .iter()
            .enumerate()
            .map(|(i, v)| (i, frobenius(v)))
            .fold((usize::MAX, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if idx == usize::MAX || nrm <= 1e-8 {
            return Err(LinalgError::Unstable {
                step: out.len(),
                residual: nrm.max(0.0),
            });
        }
        let q = hermitize(&scaled(&residual[idx], c64::new(1.0 / nrm, 0.0)));
        residual.swap_remove(idx);
        orthogonalize(&mut residual, &q);
        out.push(q);
    }
    Ok(out)
}

/// `(a + a*) / 2`, exactly Hermitian in floating point.
pub fn hermitize(a: &CMat) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5)
}

/// Moore-Penrose pseudo-inverse with the crate-wide rank threshold.
pub fn pinv(a: &CMat) -> Result<CMat, LinalgError> {
    let (r, c) = (a.nrows(), a.ncols());
    if r == 0 || c == 0 {
        return Ok(zeros(c, r));
    }
    let svd = a.thin_svd().map_err(|_| LinalgError::NoConvergence)?;
    let k = r.min(c);
    let s: Vec<f64> = (0..k).map(|i| svd.S()[i].re).collect();
    let rank = RankReport::from_values(s.clone(), RankMethod::Svd).check()?;
    let u = svd.U();
    let v = svd.V();
    Ok(Mat::from_fn(c, r, |i, j| {
        (0..rank).map(|t| v[(i, t)] * u[(j, t)].conj() / s[t]).sum()
    }))
}

/// Minimum-norm least-squares solver built from a thin SVD.
#[derive(Clone, Debug)]
pub struct MinNormSolver {
    u: CMat,
    v: CMat,
    inv_s: Vec<f64>,
    rank: usize,
}

impl MinNormSolver {
    pub fn new(a: &CMat) -> Result<Self, LinalgError> {
        let k = a.nrows().min(a.ncols());
        if k == 0 {
            return Ok(MinNormSolver {
                u: zeros(a.nrows(), 0),
                v: zeros(a.ncols(), 0),
                inv_s: vec![],
                rank: 0,
            });
        }
        let svd = a.thin_svd().map_err(|_| LinalgError::NoConvergence)?;
        let s: Vec<f64> = (0..k).map(|i| svd.S()[i].re).collect();
        let report = RankReport::from_values(s.clone(), RankMethod::Svd);
        let rank = report.check()?;
        let inv_s = s.iter().take(rank).map(|x| 1.0 / x).collect();
        Ok(MinNormSolver {
            u: svd.U().subcols(0, rank).to_owned(),
            v: svd.V().subcols(0, rank).to_owned(),
            inv_s,
            rank,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `x = V Σ⁺ U* b`
    pub fn solve(&self, b: &[c64]) -> Vec<c64> {
        let mut coeffs = vec![c64::new(0.0, 0.0); self.rank];
        for (k, c) in coeffs.iter_mut().enumerate() {
            let mut acc = c64::new(0.0, 0.0);
            for (i, bi) in b.iter().enumerate() {
                acc += self.u[(i, k)].conj() * bi;
            }
            *c = acc * self.inv_s[k];
        }
        (0..self.v.nrows())
            .map(|i| {
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, c)| self.v[(i, k)] * c)
                    .sum()
            })
            .collect()
    }
}

/// Compressed sparse row matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<c64>,
}

impl SparseMatrix {
    /// Builds from per-row entry lists. Duplicate columns within a row are
    /// summed, exact zeros dropped.
    pub fn from_rows(cols: usize, rows: Vec<Vec<(usize, c64)>>) -> Self {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for mut row in rows.iter().cloned() {
            row.sort_by_key(|e| e.0);
            let mut i = 0;
            while i < row.len() {
                let c = row[i].0;
                let mut v = row[i].1;
                i += 1;
                while i < row.len() && row[i].0 == c {
                    v += row[i].1;
                    i += 1;
                }
                if v != c64::new(0.0, 0.0) {
                    debug_assert!(c < cols);
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        SparseMatrix {
            rows: rows.len(),
            cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn from_dense(a: &CMat) -> Self {
        let rows = (0..a.nrows())
            .map(|i| (0..a.ncols()).map(|j| (j, a[(i, j)])).collect())
            .collect();
        Self::from_rows(a.ncols(), rows)
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, c64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn to_dense(&self) -> CMat {
        let mut out = zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for (j, v) in self.row(i) {
                out[(i, j)] = v;
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[c64]) -> Vec<c64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    /// Sparse product `self * other` (Gustavson).
    pub fn matmul<E: Exec>(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, other.rows);
        let rows = E::map(self.rows, |i| {
            // dense scatter row; `touched` keeps the output sparse
            let mut acc = vec![c64::new(0.0, 0.0); other.cols];
            let mut seen = vec![false; other.cols];
            let mut touched = Vec::new();
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    if !seen[j] {
                        seen[j] = true;
                        touched.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            touched.sort_unstable();
            touched.into_iter().map(|j| (j, acc[j])).collect::<Vec<_>>()
        });
        SparseMatrix::from_rows(other.cols, rows)
    }

    pub fn frobenius(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).fold(0.0, |a, b| a + b).sqrt()
    }

    /// Transposed copy (no conjugation).
    pub fn transpose(&self) -> SparseMatrix {
        let mut rows: Vec<Vec<(usize, c64)>> = vec![Vec::new(); self.cols];
        for i in 0..self.rows {
            for (j, v) in self.row(i) {
                rows[j].push((i, v));
            }
        }
        SparseMatrix::from_rows(self.rows, rows)
    }

    /// Dense Gram matrix `A* A`, assembled one output row at a time.
    pub fn gram<E: Exec>(&self) -> CMat {
        let t = self.transpose();
        let n = self.cols;
        let rows = E::map(n, |i| {
            let mut acc = vec![c64::new(0.0, 0.0); n];
            for (r, a) in t.row(i) {
                let a = a.conj();
                for (j, b) in self.row(r) {
                    acc[j] += a * b;
                }
            }
            acc
        });
        Mat::from_fn(n, n, |i, j| rows[i][j])
    }

    /// Numerical rank: dense SVD for small matrices, Gram eigenvalues above
    /// [`DENSE_SVD_LIMIT`] stored entries.
    pub fn rank<E: Exec>(&self) -> Result<RankReport, LinalgError> {
        if self.rows == 0 || self.cols == 0 || self.nnz() == 0 {
            return Ok(RankReport::from_values(vec![], RankMethod::Svd));
        }
        if self.rows.saturating_mul(self.cols) <= DENSE_SVD_LIMIT {
            let dense = self.to_dense();
            if self.rows >= self.cols {
                dense_rank(dense.as_ref())
            } else {
                dense_rank(dense.adjoint().to_owned().as_ref())
            }
        } else if self.cols <= self.rows {
            gram_rank(&self.gram::<E>())
        } else {
            gram_rank(&self.conj_transpose().gram::<E>())
        }
    }

    pub fn conj_transpose(&self) -> SparseMatrix {
        let mut rows: Vec<Vec<(usize, c64)>> = vec![Vec::new(); self.cols];
        for i in 0..self.rows {
            for (j, v) in self.row(i) {
                rows[j].push((i, v.conj()));
            }
        }
        SparseMatrix::from_rows(self.rows, rows)
    }
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

fn one_norm(a: &CMat) -> f64 {
    (0..a.ncols())
        .map(|j| (0..a.nrows()).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with the degree-13 Padé
/// approximant.
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    if n == 0 {
        return zeros(0, 0);
    }
    let norm = one_norm(a);
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = scaled(a, c64::new(0.5f64.powi(s), 0.0));
    let id = identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = |k: usize| c64::new(PADE13[k], 0.0);

    let mut inner_u = scaled(&a6, b(13));
    add_scaled(&mut inner_u, &a4, b(11));
    add_scaled(&mut inner_u, &a2, b(9));
    let mut u = &a6 * &inner_u;
    add_scaled(&mut u, &a6, b(7));
    add_scaled(&mut u, &a4, b(5));
    add_scaled(&mut u, &a2, b(3));
    add_scaled(&mut u, &id, b(1));
    let u = &a * &u;

    let mut inner_v = scaled(&a6, b(12));
    add_scaled(&mut inner_v, &a4, b(10));
    add_scaled(&mut inner_v, &a2, b(8));
    let mut v = &a6 * &inner_v;
    add_scaled(&mut v, &a6, b(6));
    add_scaled(&mut v, &a4, b(4));
    add_scaled(&mut v, &a2, b(2));
    add_scaled(&mut v, &id, b(0));

    let p = Mat::from_fn(n, n, |i, j| v[(i, j)] + u[(i, j)]);
    let q = Mat::from_fn(n, n, |i, j| v[(i, j)] - u[(i, j)]);
    let mut r = q.partial_piv_lu().solve(&p);
    for _ in 0..s {
        r = &r * &r;
    }
    r
}
