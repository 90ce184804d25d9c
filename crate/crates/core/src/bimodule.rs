//! Finite-dimensional bimodules in coordinates.

use crate::linalg::{self, c64, inner, CMat};
use crate::star_algebra::{AlgebraTable, StarAlgebra};

/// An `A`–`A` bimodule on `C^p`. `left[i]` and `right[i]` are the `p × p`
/// matrices of `n ↦ B_i · n` and `n ↦ n · B_i` acting on coordinate columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Bimodule {
    p: usize,
    left: Vec<CMat>,
    right: Vec<CMat>,
}

impl Bimodule {
    pub fn new(p: usize, left: Vec<CMat>, right: Vec<CMat>) -> Self {
        assert_eq!(left.len(), right.len());
        for a in left.iter().chain(&right) {
            assert_eq!((a.nrows(), a.ncols()), (p, p));
        }
        Bimodule { p, left, right }
    }

    /// `A` acting on itself by multiplication.
    pub fn regular(table: &AlgebraTable) -> Self {
        let m = table.dim();
        let left = (0..m)
            .map(|i| CMat::from_fn(m, m, |k, j| table.c(i, j, k)))
            .collect();
        let right = (0..m)
            .map(|i| CMat::from_fn(m, m, |k, j| table.c(j, i, k)))
            .collect();
        Bimodule { p: m, left, right }
    }

    /// Coordinates of a concrete bimodule of matrices with orthonormal basis
    /// `basis`. Returns the module and the largest distance of an action
    /// result from the span, which must be negligible for the result to mean
    /// anything.
    pub fn from_concrete<L, R>(alg: &StarAlgebra, basis: &[CMat], left: L, right: R) -> (Self, f64)
    where
        L: Fn(&CMat, &CMat) -> CMat,
        R: Fn(&CMat, &CMat) -> CMat,
    {
        let p = basis.len();
        let mut worst = 0.0f64;
        let mut coords = |act: &dyn Fn(&CMat, &CMat) -> CMat| -> Vec<CMat> {
            alg.basis()
                .iter()
                .map(|x| {
                    let mut out = linalg::zeros(p, p);
                    for (j, bj) in basis.iter().enumerate() {
                        let img = act(x, bj);
                        let mut rebuilt = linalg::zeros(img.nrows(), img.ncols());
                        for (k, bk) in basis.iter().enumerate() {
                            let c = inner(bk, &img);
                            out[(k, j)] = c;
                            linalg::add_scaled(&mut rebuilt, bk, c);
                        }
                        worst = worst.max(linalg::frobenius(&(&img - &rebuilt)));
                    }
                    out
                })
                .collect()
        };
        let l = coords(&left);
        let r = coords(&right);
        (Bimodule::new(p, l, r), worst)
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn algebra_dim(&self) -> usize {
        self.left.len()
    }

    pub fn left(&self, i: usize) -> &CMat {
        &self.left[i]
    }

    pub fn right(&self, i: usize) -> &CMat {
        &self.right[i]
    }

    /// Worst violation of `(xy)·n = x·(y·n)`, `n·(xy) = (n·x)·y`,
    /// `(x·n)·y = x·(n·y)` and `1·n = n = n·1` over basis elements.
    pub fn axioms_defect(&self, table: &AlgebraTable) -> f64 {
        let m = table.dim();
        let combine = |mats: &[CMat], coeffs: &[c64]| {
            let mut out = linalg::zeros(self.p, self.p);
            for (a, c) in mats.iter().zip(coeffs) {
                linalg::add_scaled(&mut out, a, *c);
            }
            out
        };
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in 0..m {
                let xy = table.product_row(i, j);
                let l_xy = combine(&self.left, xy);
                let r_xy = combine(&self.right, xy);
                worst = worst.max(linalg::frobenius(&(&l_xy - &(&self.left[i] * &self.left[j]))));
                worst = worst.max(linalg::frobenius(&(&r_xy - &(&self.right[j] * &self.right[i]))));
                worst = worst.max(linalg::frobenius(
                    &(&(&self.right[j] * &self.left[i]) - &(&self.left[i] * &self.right[j])),
                ));
            }
        }
        let id = linalg::identity(self.p);
        worst = worst.max(linalg::frobenius(&(&combine(&self.left, table.unit()) - &id)));
        worst = worst.max(linalg::frobenius(&(&combine(&self.right, table.unit()) - &id)));
        worst
    }
}
