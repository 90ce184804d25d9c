//! Finite-dimensional unital *-subalgebras of `M_d`.
//!
//! An algebra is stored by a basis that is orthonormal for `Tr(a* b)` and
//! made of Hermitian matrices, with `1/√d` as the first element. With such a
//! basis the star table is the identity and the adjoint of an element is
//! plain coefficient conjugation, which is an exact involution in floating
//! point.

use rand::Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::linalg::{
    self, adjoint, c64, frobenius, hermitian_basis, identity, inner, orthonormal_matrix_span,
    CMat, LinalgError,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("generator {index} is {rows}x{cols}, expected {d}x{d}")]
    NonSquare {
        index: usize,
        rows: usize,
        cols: usize,
        d: usize,
    },
    #[error("no generators given")]
    Empty,
    #[error("span grew to {dim} > d^2 = {max}; rank misjudged (residual {residual:.3e})")]
    SpanExplosion { dim: usize, max: usize, residual: f64 },
    #[error("closure check failed with residual {residual:.3e} > tol {tol:.3e}")]
    Closure { residual: f64, tol: f64 },
    #[error("matrix is not in the algebra (residual {residual:.3e})")]
    NotMember { residual: f64 },
    #[error("element belongs to a different algebra")]
    Mismatch,
    #[error("structure constants: {0}")]
    BadTable(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Multiplication table of an `m`-dimensional unital algebra, with no star
/// operation attached. This is all the cochain complex needs, so it doubles
/// as the input format for algebras that are not *-closed.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraTable {
    m: usize,
    /// `mult[(i * m + j) * m + k]` is the `k`-th coefficient of `B_i B_j`.
    mult: Vec<c64>,
    unit: Vec<c64>,
}

impl AlgebraTable {
    /// Validates associativity and the unit on the basis.
    pub fn new(m: usize, mult: Vec<c64>, unit: Vec<c64>, tol: f64) -> Result<Self, AlgebraError> {
        if mult.len() != m * m * m || unit.len() != m {
            return Err(AlgebraError::BadTable(format!(
                "expected {} products and {} unit coefficients",
                m * m * m,
                m
            )));
        }
        let t = AlgebraTable { m, mult, unit };
        let assoc = t.associativity_defect();
        let unit_err = t.unit_defect();
        if assoc > tol || unit_err > tol {
            return Err(AlgebraError::BadTable(format!(
                "associativity defect {assoc:.3e}, unit defect {unit_err:.3e}"
            )));
        }
        Ok(t)
    }

    /// The dual numbers `C[ε]/(ε²)` on the basis `{1, ε}`.
    pub fn dual_numbers() -> Self {
        let one = c64::new(1.0, 0.0);
        let zero = c64::new(0.0, 0.0);
        // 1*1 = 1, 1*ε = ε, ε*1 = ε, ε*ε = 0
        let mult = vec![one, zero, zero, one, zero, one, zero, zero];
        AlgebraTable {
            m: 2,
            mult,
            unit: vec![one, zero],
        }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    /// Coefficient `c_{ij}^k`.
    #[inline]
    pub fn c(&self, i: usize, j: usize, k: usize) -> c64 {
        self.mult[(i * self.m + j) * self.m + k]
    }

    /// Coefficients of `B_i B_j`.
    pub fn product_row(&self, i: usize, j: usize) -> &[c64] {
        let start = (i * self.m + j) * self.m;
        &self.mult[start..start + self.m]
    }

    pub fn unit(&self) -> &[c64] {
        &self.unit
    }

    pub fn mul(&self, a: &[c64], b: &[c64]) -> Vec<c64> {
        let m = self.m;
        let mut out = vec![c64::new(0.0, 0.0); m];
        for (i, ai) in a.iter().enumerate() {
            if *ai == c64::new(0.0, 0.0) {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                let s = ai * bj;
                if s == c64::new(0.0, 0.0) {
                    continue;
                }
                for (k, o) in out.iter_mut().enumerate() {
                    *o += s * self.c(i, j, k);
                }
            }
        }
        out
    }

    fn basis_vec(&self, i: usize) -> Vec<c64> {
        let mut v = vec![c64::new(0.0, 0.0); self.m];
        v[i] = c64::new(1.0, 0.0);
        v
    }

    pub fn associativity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.m {
            for j in 0..self.m {
                let ij = self.product_row(i, j).to_vec();
                for k in 0..self.m {
                    let left = self.mul(&ij, &self.basis_vec(k));
                    let jk = self.product_row(j, k).to_vec();
                    let right = self.mul(&self.basis_vec(i), &jk);
                    let diff: Vec<c64> = left.iter().zip(&right).map(|(a, b)| a - b).collect();
                    worst = worst.max(linalg::vnorm(&diff));
                }
            }
        }
        worst
    }

    pub fn unit_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.m {
            let e = self.basis_vec(i);
            for p in [self.mul(&self.unit, &e), self.mul(&e, &self.unit)] {
                let diff: Vec<c64> = p.iter().zip(&e).map(|(a, b)| a - b).collect();
                worst = worst.max(linalg::vnorm(&diff));
            }
        }
        worst
    }
}

/// Coefficient vector of an element, tagged with its algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    pub coeffs: Vec<c64>,
    tag: u64,
}

/// A unital *-subalgebra of `M_d` with a Hermitian orthonormal basis.
#[derive(Clone, Debug)]
pub struct StarAlgebra {
    d: usize,
    basis: Vec<CMat>,
    table: AlgebraTable,
    star_table: CMat,
    fingerprint: [u8; 32],
}

impl StarAlgebra {
    /// Smallest unital *-closed span containing `generators`.
    pub fn build(generators: &[CMat], tol: f64) -> Result<Self, AlgebraError> {
        let first = generators.first().ok_or(AlgebraError::Empty)?;
        let d = first.nrows();
        for (index, g) in generators.iter().enumerate() {
            if g.nrows() != d || g.ncols() != d {
                return Err(AlgebraError::NonSquare {
                    index,
                    rows: g.nrows(),
                    cols: g.ncols(),
                    d,
                });
            }
        }
        let mut cands = vec![identity(d)];
        for g in generators {
            cands.push(g.clone());
            cands.push(adjoint(g));
        }
        let mut span = orthonormal_matrix_span(&cands)?;
        loop {
            let mut next = span.clone();
            for a in &span {
                for b in &span {
                    next.push(a * b);
                }
            }
            let grown = orthonormal_matrix_span(&next)?;
            if grown.len() > d * d {
                return Err(AlgebraError::SpanExplosion {
                    dim: grown.len(),
                    max: d * d,
                    residual: closure_residual(&grown),
                });
            }
            let done = grown.len() == span.len();
            span = grown;
            if done {
                break;
            }
        }
        let basis = hermitian_basis(&span, Some(&identity(d)))?;
        Self::from_hermitian_basis(d, basis, tol)
    }

    /// Builds from a basis that is already Hermitian and orthonormal; checks
    /// closure against `tol`.
    pub fn from_hermitian_basis(d: usize, basis: Vec<CMat>, tol: f64) -> Result<Self, AlgebraError> {
        let m = basis.len();
        let mut mult = Vec::with_capacity(m * m * m);
        let mut worst = 0.0f64;
        for bi in &basis {
            for bj in &basis {
                let p = bi * bj;
                let coeffs: Vec<c64> = basis.iter().map(|bk| inner(bk, &p)).collect();
                let mut rebuilt = linalg::zeros(d, d);
                for (bk, c) in basis.iter().zip(&coeffs) {
                    linalg::add_scaled(&mut rebuilt, bk, *c);
                }
                worst = worst.max(frobenius(&(&p - &rebuilt)));
                mult.extend(coeffs);
            }
        }
        let mut star_worst = 0.0f64;
        for b in &basis {
            star_worst = star_worst.max(frobenius(&(b - &adjoint(b))));
        }
        let unit: Vec<c64> = basis.iter().map(|b| inner(b, &identity(d))).collect();
        let mut one = linalg::zeros(d, d);
        for (b, c) in basis.iter().zip(&unit) {
            linalg::add_scaled(&mut one, b, *c);
        }
        worst = worst
            .max(star_worst)
            .max(frobenius(&(&one - &identity(d))));
        if worst > tol {
            return Err(AlgebraError::Closure {
                residual: worst,
                tol,
            });
        }
        let fingerprint = fingerprint(d, &basis);
        Ok(StarAlgebra {
            d,
            table: AlgebraTable { m, mult, unit },
            star_table: identity(m),
            basis,
            fingerprint,
        })
    }

    /// All of `M_d`.
    pub fn full_matrix(d: usize) -> Result<Self, AlgebraError> {
        Self::build(&matrix_units(d, &[(0, d)]), 1e-10)
    }

    /// Diagonal matrices `C^n`.
    pub fn diagonal(n: usize) -> Result<Self, AlgebraError> {
        let gens: Vec<CMat> = (0..n)
            .map(|i| {
                let mut e = linalg::zeros(n, n);
                e[(i, i)] = c64::new(1.0, 0.0);
                e
            })
            .collect();
        Self::build(&gens, 1e-10)
    }

    /// Block diagonal `M_{n_1} ⊕ … ⊕ M_{n_r}`.
    pub fn direct_sum(blocks: &[usize]) -> Result<Self, AlgebraError> {
        let d: usize = blocks.iter().sum();
        let mut ranges = Vec::new();
        let mut at = 0;
        for &b in blocks {
            ranges.push((at, b));
            at += b;
        }
        Self::build(&matrix_units(d, &ranges), 1e-10)
    }

    pub fn ambient_dim(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CMat] {
        &self.basis
    }

    pub fn table(&self) -> &AlgebraTable {
        &self.table
    }

    /// `B_i* = Σ_k s[(i, k)] B_k`; the identity for our bases.
    pub fn star_table(&self) -> &CMat {
        &self.star_table
    }

    /// SHA-256 over the dimensions and basis entries.
    pub fn fingerprint(&self) -> [u8; 32] {
        self.fingerprint
    }

    fn tag(&self) -> u64 {
        u64::from_le_bytes(self.fingerprint[..8].try_into().expect("8 bytes"))
    }

    pub fn element(&self, coeffs: Vec<c64>) -> Result<AlgebraElement, AlgebraError> {
        if coeffs.len() != self.dim() {
            return Err(AlgebraError::Mismatch);
        }
        Ok(AlgebraElement {
            coeffs,
            tag: self.tag(),
        })
    }

    pub fn basis_element(&self, i: usize) -> AlgebraElement {
        let mut c = vec![c64::new(0.0, 0.0); self.dim()];
        c[i] = c64::new(1.0, 0.0);
        AlgebraElement {
            coeffs: c,
            tag: self.tag(),
        }
    }

    pub fn unit(&self) -> AlgebraElement {
        AlgebraElement {
            coeffs: self.table.unit.clone(),
            tag: self.tag(),
        }
    }

    fn check(&self, a: &AlgebraElement) -> Result<(), AlgebraError> {
        if a.tag != self.tag() || a.coeffs.len() != self.dim() {
            return Err(AlgebraError::Mismatch);
        }
        Ok(())
    }

    pub fn multiply(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        self.check(a)?;
        self.check(b)?;
        Ok(AlgebraElement {
            coeffs: self.table.mul(&a.coeffs, &b.coeffs),
            tag: self.tag(),
        })
    }

    /// Coefficient conjugation; exact because every basis matrix is Hermitian.
    pub fn adjoint(&self, a: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        self.check(a)?;
        Ok(AlgebraElement {
            coeffs: a.coeffs.iter().map(|c| c.conj()).collect(),
            tag: self.tag(),
        })
    }

    pub fn to_matrix(&self, a: &AlgebraElement) -> CMat {
        self.matrix_from_coeffs(&a.coeffs)
    }

    pub fn matrix_from_coeffs(&self, coeffs: &[c64]) -> CMat {
        let mut out = linalg::zeros(self.d, self.d);
        for (b, c) in self.basis.iter().zip(coeffs) {
            linalg::add_scaled(&mut out, b, *c);
        }
        out
    }

    /// Orthogonal projection onto the algebra and the distance to it.
    pub fn project(&self, x: &CMat) -> (Vec<c64>, f64) {
        let coeffs: Vec<c64> = self.basis.iter().map(|b| inner(b, x)).collect();
        let residual = frobenius(&(x - &self.matrix_from_coeffs(&coeffs)));
        (coeffs, residual)
    }

    pub fn from_matrix(&self, x: &CMat, tol: f64) -> Result<AlgebraElement, AlgebraError> {
        let (coeffs, residual) = self.project(x);
        if residual > tol {
            return Err(AlgebraError::NotMember { residual });
        }
        Ok(AlgebraElement {
            coeffs,
            tag: self.tag(),
        })
    }

    /// Basis of the center, as the null space of `z ↦ ([z, B_i])_i`.
    pub fn center(&self) -> Result<Vec<AlgebraElement>, AlgebraError> {
        let m = self.dim();
        let t = &self.table;
        let a = CMat::from_fn(m * m, m, |row, j| {
            let (i, k) = (row / m, row % m);
            t.c(j, i, k) - t.c(i, j, k)
        });
        Ok(linalg::nullspace(&a)?
            .into_iter()
            .map(|coeffs| AlgebraElement {
                coeffs,
                tag: self.tag(),
            })
            .collect())
    }

    /// Element with independent standard normal-ish coefficients in
    /// `[-1, 1] + i[-1, 1]`.
    pub fn random_element<R: Rng>(&self, rng: &mut R) -> AlgebraElement {
        AlgebraElement {
            coeffs: (0..self.dim())
                .map(|_| c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect(),
            tag: self.tag(),
        }
    }
}

fn matrix_units(d: usize, ranges: &[(usize, usize)]) -> Vec<CMat> {
    let mut out = Vec::new();
    for &(start, len) in ranges {
        for i in start..start + len {
            for j in start..start + len {
                let mut e = linalg::zeros(d, d);
                e[(i, j)] = c64::new(1.0, 0.0);
                out.push(e);
            }
        }
    }
    out
}

/// Largest distance of a pairwise product from the span of `span`.
fn closure_residual(span: &[CMat]) -> f64 {
    let mut worst = 0.0f64;
    for a in span {
        for b in span {
            let p = a * b;
            let mut rebuilt = linalg::zeros(p.nrows(), p.ncols());
            for q in span {
                linalg::add_scaled(&mut rebuilt, q, inner(q, &p));
            }
            worst = worst.max(frobenius(&(&p - &rebuilt)));
        }
    }
    worst
}

fn fingerprint(d: usize, basis: &[CMat]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update((d as u64).to_le_bytes());
    h.update((basis.len() as u64).to_le_bytes());
    for b in basis {
        for j in 0..b.ncols() {
            for i in 0..b.nrows() {
                h.update(b[(i, j)].re.to_le_bytes());
                h.update(b[(i, j)].im.to_le_bytes());
            }
        }
    }
    h.finalize().into()
}
