//! Hochschild cochains `C^n(A, N)` for `n ≤ 2`, with coefficients in a
//! finite-dimensional bimodule.
//!
//! A cochain of degree `n` stores `f(B_{i1}, …, B_{in})` as `p` coordinates
//! at offset `t·p`, where `t` is the lexicographic index of `(i1, …, in)`
//! with `i1` most significant. Coboundaries:
//!
//! ```text
//! (∂n)(x)       = x·n − n·x
//! (∂f)(x, y)    = f(xy) − x·f(y) − f(x)·y
//! (∂φ)(x, y, z) = x·φ(y, z) − φ(xy, z) + φ(x, yz) − φ(x, y)·z
//! ```

use std::sync::OnceLock;

use thiserror::Error;

use crate::bimodule::Bimodule;
use crate::exec::{DefaultExec, Exec};
use crate::linalg::{c64, vnorm, LinalgError, MinNormSolver, RankReport, SparseMatrix};
use crate::star_algebra::AlgebraTable;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HochschildError {
    #[error("coboundaries are implemented for degrees 0, 1 and 2 only (got {0})")]
    Degree(usize),
    #[error("cochain has {got} entries, expected {expected}")]
    Shape { got: usize, expected: usize },
    #[error("∂θ = φ has no solution: residual {residual:.3e}, dim H² = {h2}")]
    Obstruction { residual: f64, h2: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A degree-`n` cochain in coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain {
    pub degree: usize,
    pub m: usize,
    pub p: usize,
    pub data: Vec<c64>,
}

impl Cochain {
    pub fn zeros(degree: usize, m: usize, p: usize) -> Self {
        Cochain {
            degree,
            m,
            p,
            data: vec![c64::new(0.0, 0.0); m.pow(degree as u32) * p],
        }
    }

    pub fn from_data(degree: usize, m: usize, p: usize, data: Vec<c64>) -> Result<Self, HochschildError> {
        let expected = m.pow(degree as u32) * p;
        if data.len() != expected {
            return Err(HochschildError::Shape {
                got: data.len(),
                expected,
            });
        }
        Ok(Cochain { degree, m, p, data })
    }

    pub fn tuples(&self) -> usize {
        self.m.pow(self.degree as u32)
    }

    /// Coordinates of the value on the `t`-th basis tuple.
    pub fn value(&self, t: usize) -> &[c64] {
        &self.data[t * self.p..(t + 1) * self.p]
    }

    pub fn value_mut(&mut self, t: usize) -> &mut [c64] {
        &mut self.data[t * self.p..(t + 1) * self.p]
    }

    /// Largest coordinate norm over basis tuples.
    pub fn max_norm(&self) -> f64 {
        (0..self.tuples())
            .map(|t| vnorm(self.value(t)))
            .fold(0.0, f64::max)
    }
}

/// Dimensions in one degree of the complex.
#[derive(Clone, Debug)]
pub struct CohomologyReport {
    pub degree: usize,
    pub cochain_dim: usize,
    /// Rank of `∂_{n−1}` (zero for `n = 0`).
    pub rank_prev: usize,
    /// Rank of `∂_n`.
    pub rank: usize,
    pub kernel_dim: usize,
    pub dim: usize,
}

/// Result of a coboundary solve.
#[derive(Clone, Debug)]
pub struct Solution {
    pub theta: Cochain,
    /// `max_t ‖∂θ(t) − φ(t)‖`.
    pub residual: f64,
}

/// The cochain complex of an algebra with coefficients in a bimodule.
///
/// Coboundary matrices and the solver are built on first use and cached;
/// concurrent readers share them and construction is idempotent.
#[derive(Debug)]
pub struct HochschildComplex {
    table: AlgebraTable,
    module: Bimodule,
    coboundaries: [OnceLock<SparseMatrix>; 3],
    solver: OnceLock<Result<MinNormSolver, LinalgError>>,
    ranks: [OnceLock<Result<usize, LinalgError>>; 3],
}

impl HochschildComplex {
    pub fn new(table: AlgebraTable, module: Bimodule) -> Self {
        assert_eq!(table.dim(), module.algebra_dim());
        HochschildComplex {
            table,
            module,
            coboundaries: Default::default(),
            solver: OnceLock::new(),
            ranks: Default::default(),
        }
    }

    pub fn table(&self) -> &AlgebraTable {
        &self.table
    }

    pub fn module(&self) -> &Bimodule {
        &self.module
    }

    pub fn cochain_dim(&self, n: usize) -> usize {
        self.table.dim().pow(n as u32) * self.module.dim()
    }

    /// `∂_n : C^n → C^{n+1}` as a sparse matrix.
    pub fn coboundary_matrix(&self, n: usize) -> Result<&SparseMatrix, HochschildError> {
        if n > 2 {
            return Err(HochschildError::Degree(n));
        }
        Ok(self.coboundaries[n]
            .get_or_init(|| coboundary_matrix_with::<DefaultExec>(&self.table, &self.module, n)))
    }

    pub fn coboundary(&self, f: &Cochain) -> Result<Cochain, HochschildError> {
        let n = f.degree;
        let expected = self.cochain_dim(n);
        if f.data.len() != expected || f.p != self.module.dim() {
            return Err(HochschildError::Shape {
                got: f.data.len(),
                expected,
            });
        }
        let d = self.coboundary_matrix(n)?;
        Ok(Cochain {
            degree: n + 1,
            m: f.m,
            p: f.p,
            data: d.mul_vec(&f.data),
        })
    }

    pub fn rank(&self, n: usize) -> Result<usize, HochschildError> {
        if n > 2 {
            return Err(HochschildError::Degree(n));
        }
        let r = self.ranks[n].get_or_init(|| {
            let d = self.coboundary_matrix(n).expect("degree checked");
            d.rank::<DefaultExec>().and_then(|r: RankReport| r.check())
        });
        Ok(r.clone()?)
    }

    /// `dim H^n = dim ker ∂_n − rank ∂_{n−1}`.
    pub fn cohomology(&self, n: usize) -> Result<CohomologyReport, HochschildError> {
        let rank = self.rank(n)?;
        let rank_prev = if n == 0 { 0 } else { self.rank(n - 1)? };
        let cochain_dim = self.cochain_dim(n);
        let kernel_dim = cochain_dim - rank;
        Ok(CohomologyReport {
            degree: n,
            cochain_dim,
            rank_prev,
            rank,
            kernel_dim,
            dim: kernel_dim - rank_prev,
        })
    }

    pub fn cohomology_dim(&self, n: usize) -> Result<usize, HochschildError> {
        Ok(self.cohomology(n)?.dim)
    }

    /// `(‖∂φ‖ ≤ tol, ‖∂φ‖)` with the norm maximized over basis tuples.
    pub fn is_cocycle(&self, phi: &Cochain, tol: f64) -> Result<(bool, f64), HochschildError> {
        let r = self.coboundary(phi)?.max_norm();
        Ok((r <= tol, r))
    }

    /// Minimum-norm solution of `∂θ = φ` for a 2-cochain `φ`.
    pub fn solve_coboundary(&self, phi: &Cochain, tol: f64) -> Result<Solution, HochschildError> {
        if phi.degree != 2 {
            return Err(HochschildError::Degree(phi.degree));
        }
        let solver = self
            .solver
            .get_or_init(|| {
                let d1 = self.coboundary_matrix(1).expect("degree 1").to_dense();
                MinNormSolver::new(&d1)
            })
            .as_ref()
            .map_err(|e| e.clone())?;
        let theta = Cochain {
            degree: 1,
            m: phi.m,
            p: phi.p,
            data: solver.solve(&phi.data),
        };
        let back = self.coboundary(&theta)?;
        let residual = (0..back.tuples())
            .map(|t| {
                let diff: Vec<c64> = back.value(t).iter().zip(phi.value(t)).map(|(a, b)| a - b).collect();
                vnorm(&diff)
            })
            .fold(0.0, f64::max);
        if residual > tol {
            let h2 = self.cohomology_dim(2)?;
            return Err(HochschildError::Obstruction { residual, h2 });
        }
        Ok(Solution { theta, residual })
    }
}

/// Assembles `∂_n` row by row with the given execution strategy.
pub fn coboundary_matrix_with<E: Exec>(table: &AlgebraTable, module: &Bimodule, n: usize) -> SparseMatrix {
    let m = table.dim();
    let p = module.dim();
    let zero = c64::new(0.0, 0.0);
    let tuples_out = m.pow(n as u32 + 1);
    let cols = m.pow(n as u32) * p;
    let rows = E::map(tuples_out, |t| {
        let mut block: Vec<Vec<(usize, c64)>> = vec![Vec::new(); p];
        let mut push = |k: usize, col: usize, v: c64| {
            if v != zero {
                block[k].push((col, v));
            }
        };
        match n {
            0 => {
                let i = t;
                for k in 0..p {
                    for kk in 0..p {
                        push(k, kk, module.left(i)[(k, kk)] - module.right(i)[(k, kk)]);
                    }
                }
            }
            1 => {
                let (i, j) = (t / m, t % m);
                for k in 0..p {
                    for (l, c) in table.product_row(i, j).iter().enumerate() {
                        push(k, l * p + k, *c);
                    }
                    for kk in 0..p {
                        push(k, j * p + kk, -module.left(i)[(k, kk)]);
                        push(k, i * p + kk, -module.right(j)[(k, kk)]);
                    }
                }
            }
            2 => {
                let (i, j, l) = (t / (m * m), (t / m) % m, t % m);
                for k in 0..p {
                    for kk in 0..p {
                        push(k, (j * m + l) * p + kk, module.left(i)[(k, kk)]);
                        push(k, (i * m + j) * p + kk, -module.right(l)[(k, kk)]);
                    }
                    for (q, c) in table.product_row(i, j).iter().enumerate() {
                        push(k, (q * m + l) * p + k, -c);
                    }
                    for (q, c) in table.product_row(j, l).iter().enumerate() {
                        push(k, (i * m + q) * p + k, *c);
                    }
                }
            }
            _ => unreachable!("degree checked by caller"),
        }
        block
    });
    SparseMatrix::from_rows(cols, rows.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;
    use crate::star_algebra::StarAlgebra;

    #[test]
    fn dual_numbers_have_one_dimensional_h2() {
        let t = AlgebraTable::dual_numbers();
        let c = HochschildComplex::new(t.clone(), Bimodule::regular(&t));
        assert_eq!(c.cohomology_dim(2).unwrap(), 1);
    }

    #[test]
    fn m2_with_itself() {
        let alg = StarAlgebra::full_matrix(2).unwrap();
        let c = HochschildComplex::new(alg.table().clone(), Bimodule::regular(alg.table()));
        assert_eq!(c.cohomology_dim(0).unwrap(), 1);
        assert_eq!(c.cohomology_dim(1).unwrap(), 0);
        assert_eq!(c.cohomology_dim(2).unwrap(), 0);
    }

    #[test]
    fn square_of_coboundary_vanishes() {
        let alg = StarAlgebra::direct_sum(&[1, 2]).unwrap();
        let t = alg.table().clone();
        let module = Bimodule::regular(&t);
        for n in 0..2 {
            let a = coboundary_matrix_with::<Sequential>(&t, &module, n);
            let b = coboundary_matrix_with::<Sequential>(&t, &module, n + 1);
            assert!(b.matmul::<Sequential>(&a).frobenius() < 1e-12);
        }
    }

    #[test]
    fn zero_right_hand_side_gives_zero() {
        let alg = StarAlgebra::full_matrix(2).unwrap();
        let c = HochschildComplex::new(alg.table().clone(), Bimodule::regular(alg.table()));
        let sol = c.solve_coboundary(&Cochain::zeros(2, 4, 4), 1e-9).unwrap();
        assert!(sol.theta.data.iter().all(|z| *z == c64::new(0.0, 0.0)));
    }

    #[test]
    fn degree_three_is_rejected() {
        let t = AlgebraTable::dual_numbers();
        let c = HochschildComplex::new(t.clone(), Bimodule::regular(&t));
        assert_eq!(c.coboundary_matrix(3).unwrap_err(), HochschildError::Degree(3));
    }
}
