//! Brute-force Hochschild cohomology from concrete matrices.
//!
//! Nothing here reads structure constants or action tensors from the
//! library. Products are evaluated as matrix products, coordinates come from
//! least squares against whatever basis the caller supplies, the coboundary
//! is the general alternating sum for any degree, and `dim H^n` is the
//! nullity of the Laplacian `∂_n* ∂_n + ∂_{n−1} ∂_{n−1}*` rather than a
//! difference of ranks.

#![allow(dead_code)]

use qrw::linalg::{c64, frobenius, gram_rank, inner, pinv, zeros};
use qrw::CMat;

/// An algebra of matrices acting on a space of matrices by
/// `x·n = E(x) n` and `n·x = n E(x)`.
pub struct ConcreteBimodule {
    pub algebra: Vec<CMat>,
    pub module: Vec<CMat>,
    pub embed: Box<dyn Fn(&CMat) -> CMat>,
}

struct Coordinates {
    basis: Vec<CMat>,
    gram_inv: CMat,
}

impl Coordinates {
    fn new(basis: &[CMat]) -> Self {
        let p = basis.len();
        let gram = CMat::from_fn(p, p, |i, j| inner(&basis[i], &basis[j]));
        Coordinates {
            basis: basis.to_vec(),
            gram_inv: pinv(&gram).expect("basis Gram matrix"),
        }
    }

    /// Coordinates of `x`; panics when `x` is not in the span.
    fn of(&self, x: &CMat) -> Vec<c64> {
        let p = self.basis.len();
        let rhs: Vec<c64> = self.basis.iter().map(|b| inner(b, x)).collect();
        let c: Vec<c64> = (0..p)
            .map(|i| (0..p).map(|j| self.gram_inv[(i, j)] * rhs[j]).sum())
            .collect();
        let mut back = zeros(x.nrows(), x.ncols());
        for (b, ci) in self.basis.iter().zip(&c) {
            back += qrw::linalg::scaled(b, *ci);
        }
        let resid = frobenius(&(&back - x));
        assert!(resid <= 1e-10 * (1.0 + frobenius(x)), "not in span: {resid:e}");
        c
    }
}

/// Dense action data derived once from the concrete matrices.
struct Tables {
    m: usize,
    p: usize,
    /// `prod[a * m + b]`: coordinates of `A_a A_b`.
    prod: Vec<Vec<c64>>,
    /// `left[a][(k, k')]`: coordinate `k` of `A_a · N_{k'}`.
    left: Vec<CMat>,
    right: Vec<CMat>,
}

impl Tables {
    fn new(bm: &ConcreteBimodule) -> Self {
        let m = bm.algebra.len();
        let p = bm.module.len();
        let alg = Coordinates::new(&bm.algebra);
        let module = Coordinates::new(&bm.module);
        let mut prod = Vec::with_capacity(m * m);
        for a in &bm.algebra {
            for b in &bm.algebra {
                prod.push(alg.of(&(a * b)));
            }
        }
        let mut left = Vec::with_capacity(m);
        let mut right = Vec::with_capacity(m);
        for a in &bm.algebra {
            let e = (bm.embed)(a);
            let mut l = zeros(p, p);
            let mut r = zeros(p, p);
            for (kk, n) in bm.module.iter().enumerate() {
                for (k, v) in module.of(&(&e * n)).into_iter().enumerate() {
                    l[(k, kk)] = v;
                }
                for (k, v) in module.of(&(n * &e)).into_iter().enumerate() {
                    r[(k, kk)] = v;
                }
            }
            left.push(l);
            right.push(r);
        }
        Tables { m, p, prod, left, right }
    }

    fn tuple(&self, mut t: usize, len: usize) -> Vec<usize> {
        let mut out = vec![0; len];
        for slot in out.iter_mut().rev() {
            *slot = t % self.m;
            t /= self.m;
        }
        out
    }

    fn index(&self, tuple: &[usize]) -> usize {
        tuple.iter().fold(0, |acc, a| acc * self.m + a)
    }

    /// Rows of `∂_n`, each as unmerged `(column, value)` entries.
    fn coboundary_rows(&self, n: usize) -> Vec<Vec<(usize, c64)>> {
        let (m, p) = (self.m, self.p);
        let zero = c64::new(0.0, 0.0);
        let mut rows = Vec::with_capacity(m.pow(n as u32 + 1) * p);
        for t in 0..m.pow(n as u32 + 1) {
            let a = self.tuple(t, n + 1);
            for k in 0..p {
                let mut row = Vec::new();
                // a_1 · f(a_2, …)
                let s = self.index(&a[1..]);
                for kk in 0..p {
                    let v = self.left[a[0]][(k, kk)];
                    if v != zero {
                        row.push((s * p + kk, v));
                    }
                }
                // Σ (−1)^i f(…, a_i a_{i+1}, …)
                for i in 0..n {
                    let sign = if (i + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
                    for (q, c) in self.prod[a[i] * m + a[i + 1]].iter().enumerate() {
                        if c.norm() == 0.0 {
                            continue;
                        }
                        let mut merged: Vec<usize> = a[..i].to_vec();
                        merged.push(q);
                        merged.extend_from_slice(&a[i + 2..]);
                        row.push((self.index(&merged) * p + k, c * sign));
                    }
                }
                // (−1)^{n+1} f(…, a_n) · a_{n+1}
                let sign = if (n + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
                let s = self.index(&a[..n]);
                for kk in 0..p {
                    let v = self.right[a[n]][(k, kk)];
                    if v != zero {
                        row.push((s * p + kk, v * sign));
                    }
                }
                rows.push(row);
            }
        }
        rows
    }

    fn cochain_dim(&self, n: usize) -> usize {
        self.m.pow(n as u32) * self.p
    }
}

/// Result of one degree.
#[derive(Debug, Clone, Copy)]
pub struct OracleDegree {
    pub degree: usize,
    pub dim: usize,
    /// Smallest Laplacian eigenvalue counted as nonzero, relative to the
    /// largest; `1.0` when everything is in the kernel.
    pub gap: f64,
}

/// Relative eigenvalue threshold for the Laplacian kernel.
pub const KERNEL_RTOL: f64 = 1e-9;

pub fn cohomology(bm: &ConcreteBimodule, n: usize) -> OracleDegree {
    let tables = Tables::new(bm);
    let dim_n = tables.cochain_dim(n);
    if dim_n == 0 {
        return OracleDegree { degree: n, dim: 0, gap: 1.0 };
    }
    // ∂_n* ∂_n, accumulated row by row
    let mut lap = zeros(dim_n, dim_n);
    for row in tables.coboundary_rows(n) {
        for &(i, a) in &row {
            let a = a.conj();
            for &(j, b) in &row {
                lap[(i, j)] += a * b;
            }
        }
    }
    if n > 0 {
        let prev = dense(&tables.coboundary_rows(n - 1), tables.cochain_dim(n - 1));
        lap += &prev * prev.adjoint();
    }
    let ev = gram_rank(&lap).expect("eigenvalues").singular_values;
    let top = ev.iter().cloned().fold(0.0f64, f64::max);
    let cut = KERNEL_RTOL * top;
    let dim = ev.iter().filter(|v| **v <= cut).count();
    let gap = ev.iter().filter(|v| **v > cut).cloned().fold(f64::INFINITY, f64::min);
    OracleDegree {
        degree: n,
        dim,
        gap: if gap.is_finite() && top > 0.0 { gap / top } else { 1.0 },
    }
}

/// `‖∂_{n+1} ∂_n‖_F` with both maps as dense matrices.
pub fn square_defect(bm: &ConcreteBimodule, n: usize) -> f64 {
    let tables = Tables::new(bm);
    let first = dense(&tables.coboundary_rows(n), tables.cochain_dim(n));
    let second = dense(&tables.coboundary_rows(n + 1), tables.cochain_dim(n + 1));
    frobenius(&(second * first))
}

fn dense(rows: &[Vec<(usize, c64)>], cols: usize) -> CMat {
    let mut out = zeros(rows.len(), cols);
    for (i, row) in rows.iter().enumerate() {
        for &(j, v) in row {
            out[(i, j)] += v;
        }
    }
    out
}

/// Matrix units of `M_d`.
pub fn matrix_units(d: usize) -> Vec<CMat> {
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let mut e = zeros(d, d);
            e[(i, j)] = c64::new(1.0, 0.0);
            out.push(e);
        }
    }
    out
}

/// `M_d` acting on itself.
pub fn full_matrix_regular(d: usize) -> ConcreteBimodule {
    ConcreteBimodule {
        algebra: matrix_units(d),
        module: matrix_units(d),
        embed: Box::new(|x| x.clone()),
    }
}

/// Dual numbers as `span{1, E_12}` in `M_2`, acting on itself.
pub fn dual_numbers() -> ConcreteBimodule {
    let basis = vec![CMat::identity(2, 2), matrix_units(2)[1].clone()];
    ConcreteBimodule {
        algebra: basis.clone(),
        module: basis,
        embed: Box::new(|x| x.clone()),
    }
}
