//! The module `E_L = B^a(A ⊕ M)` and its four corners.
//!
//! Elements of `E_L` are realized as `D × D` matrices on `h ⊕ (h ⊗ k)` with
//! `D = d(1 + N_k)`:
//!
//! ```text
//!   [ A    M* ]     00: d×d        01: d×dN_k
//!   [ M  B(M) ]     10: dN_k×d     11: dN_k×dN_k
//! ```
//!
//! Multiplication in `E_L` is then matrix multiplication, the dagger is the
//! matrix adjoint, and every corner carries a basis that makes the dagger a
//! coefficient conjugation: Hermitian bases for 00 and 11, and `{e_j}` /
//! `{e_j*}` for 10 / 01.

use serde::{Deserialize, Serialize};

use crate::bimodule::Bimodule;
use crate::gns::{GnsData, GnsError};
use crate::linalg::{
    self, adjoint, c64, frobenius, hermitian_basis, inner, orthonormal_matrix_span, pinv, CMat,
};

/// One of the four corners of `E_L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Corner {
    #[serde(rename = "00")]
    C00,
    #[serde(rename = "01")]
    C01,
    #[serde(rename = "10")]
    C10,
    #[serde(rename = "11")]
    C11,
}

impl Corner {
    pub const ALL: [Corner; 4] = [Corner::C00, Corner::C01, Corner::C10, Corner::C11];

    pub fn from_indices(row: usize, col: usize) -> Corner {
        match (row, col) {
            (0, 0) => Corner::C00,
            (0, 1) => Corner::C01,
            (1, 0) => Corner::C10,
            (1, 1) => Corner::C11,
            _ => panic!("corner index out of range"),
        }
    }

    pub fn row(self) -> usize {
        matches!(self, Corner::C10 | Corner::C11) as usize
    }

    pub fn col(self) -> usize {
        matches!(self, Corner::C01 | Corner::C11) as usize
    }

    /// The corner holding the adjoints of this one.
    pub fn dagger(self) -> Corner {
        Corner::from_indices(self.col(), self.row())
    }

    pub fn index(self) -> usize {
        2 * self.row() + self.col()
    }

    pub fn label(self) -> &'static str {
        ["00", "01", "10", "11"][self.index()]
    }
}

impl std::fmt::Display for Corner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Basis and bimodule structure of one corner.
#[derive(Clone, Debug)]
pub struct CornerSpace {
    pub rows: usize,
    pub cols: usize,
    pub basis: Vec<CMat>,
    pub module: Bimodule,
}

impl CornerSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn matrix(&self, coords: &[c64]) -> CMat {
        let mut out = linalg::zeros(self.rows, self.cols);
        for (b, c) in self.basis.iter().zip(coords) {
            linalg::add_scaled(&mut out, b, *c);
        }
        out
    }

    /// Coordinates of `x` and its distance from the corner.
    pub fn coords(&self, x: &CMat) -> (Vec<c64>, f64) {
        let c: Vec<c64> = self.basis.iter().map(|b| inner(b, x)).collect();
        let resid = frobenius(&(x - &self.matrix(&c)));
        (c, resid)
    }
}

/// Structure constants of a corner product `(μη) × (ην) → (μν)`.
#[derive(Clone, Debug)]
pub struct ProductTable {
    pa: usize,
    pb: usize,
    pc: usize,
    data: Vec<c64>,
}

impl ProductTable {
    fn new(a: &CornerSpace, b: &CornerSpace, c: &CornerSpace) -> (Self, f64) {
        let (pa, pb, pc) = (a.dim(), b.dim(), c.dim());
        let mut data = Vec::with_capacity(pa * pb * pc);
        let mut worst = 0.0f64;
        for x in &a.basis {
            for y in &b.basis {
                let (coords, resid) = c.coords(&(x * y));
                worst = worst.max(resid);
                data.extend(coords);
            }
        }
        (ProductTable { pa, pb, pc, data }, worst)
    }

    /// Coordinates of the product of two coordinate vectors, added to `out`.
    pub fn accumulate(&self, x: &[c64], y: &[c64], out: &mut [c64]) {
        debug_assert_eq!((x.len(), y.len(), out.len()), (self.pa, self.pb, self.pc));
        let zero = c64::new(0.0, 0.0);
        for (a, xa) in x.iter().enumerate() {
            if *xa == zero {
                continue;
            }
            for (b, yb) in y.iter().enumerate() {
                let s = xa * yb;
                if s == zero {
                    continue;
                }
                let row = &self.data[(a * self.pb + b) * self.pc..(a * self.pb + b + 1) * self.pc];
                for (o, r) in out.iter_mut().zip(row) {
                    *o += s * r;
                }
            }
        }
    }
}

/// Verification figures gathered while building [`ElModule`].
#[derive(Clone, Debug, Default)]
pub struct ElReport {
    /// Dimension of the right-linear endomorphisms of `M` found as a
    /// commutant.
    pub commutant_dim: usize,
    /// Dimension of `span{ξ η*}`; must equal `commutant_dim`.
    pub finite_rank_dim: usize,
    /// Largest distance of a corner product or action from its target.
    pub closure_residual: f64,
    /// Largest violation of `⟨T*ξ, η⟩ = ⟨ξ, Tη⟩` over basis elements.
    pub adjoint_residual: f64,
    /// Largest violation of the bimodule axioms over the corners.
    pub axioms_residual: f64,
}

/// `E_L` with its corners and products.
#[derive(Clone, Debug)]
pub struct ElModule {
    gns: GnsData,
    corners: [CornerSpace; 4],
    products: Vec<((Corner, Corner), ProductTable)>,
    report: ElReport,
}

const TOL: f64 = 1e-10;

impl ElModule {
    pub fn build(gns: &GnsData) -> Result<Self, GnsError> {
        let alg = gns.algebra();
        let gen = gns.generator();
        let d = alg.ambient_dim();
        let nk = gns.multiplicity();
        let mut report = ElReport::default();

        let (m00, r00) = Bimodule::from_concrete(alg, alg.basis(), |x, a| x * a, |x, a| a * x);
        let c00 = CornerSpace {
            rows: d,
            cols: d,
            basis: alg.basis().to_vec(),
            module: m00,
        };
        let c10 = CornerSpace {
            rows: d * nk,
            cols: d,
            basis: gns.basis().to_vec(),
            module: gns.bimodule().clone(),
        };
        let basis01: Vec<CMat> = gns.basis().iter().map(adjoint).collect();
        let (m01, r01) = Bimodule::from_concrete(alg, &basis01, |x, q| x * q, |x, q| q * gen.pi(x));
        let c01 = CornerSpace {
            rows: d,
            cols: d * nk,
            basis: basis01,
            module: m01,
        };
        let basis11 = right_linear_endomorphisms(gns, &mut report)?;
        let (m11, r11) = Bimodule::from_concrete(
            alg,
            &basis11,
            |x, t| gen.pi(x) * t,
            |x, t| t * gen.pi(x),
        );
        let c11 = CornerSpace {
            rows: d * nk,
            cols: d * nk,
            basis: basis11,
            module: m11,
        };
        report.closure_residual = r00.max(r01).max(r11);

        let corners = [c00, c01, c10, c11];
        let mut products = Vec::new();
        for a in Corner::ALL {
            for b in Corner::ALL {
                if a.col() != b.row() {
                    continue;
                }
                let c = Corner::from_indices(a.row(), b.col());
                let (t, resid) =
                    ProductTable::new(&corners[a.index()], &corners[b.index()], &corners[c.index()]);
                report.closure_residual = report.closure_residual.max(resid);
                products.push(((a, b), t));
            }
        }
        report.axioms_residual = corners
            .iter()
            .map(|c| c.module.axioms_defect(alg.table()))
            .fold(0.0, f64::max);
        report.adjoint_residual = module_adjoint_residual(gns, &corners[3]);

        let checks = [
            ("corner closure", report.closure_residual),
            ("corner bimodule axioms", report.axioms_residual),
            ("module adjoint", report.adjoint_residual),
        ];
        for (what, residual) in checks {
            if residual > TOL {
                return Err(GnsError::Invariant {
                    what,
                    residual,
                    tol: TOL,
                });
            }
        }
        Ok(ElModule {
            gns: gns.clone(),
            corners,
            products,
            report,
        })
    }

    pub fn gns(&self) -> &GnsData {
        &self.gns
    }

    pub fn corner(&self, c: Corner) -> &CornerSpace {
        &self.corners[c.index()]
    }

    pub fn report(&self) -> &ElReport {
        &self.report
    }

    pub fn total_dim(&self) -> usize {
        self.corners.iter().map(CornerSpace::dim).sum()
    }

    /// Side length `d(1 + N_k)` of the block matrices.
    pub fn block_dim(&self) -> usize {
        self.gns.algebra().ambient_dim() * (1 + self.gns.multiplicity())
    }

    /// Table for `a × b`; `a.col()` must equal `b.row()`.
    pub fn product(&self, a: Corner, b: Corner) -> &ProductTable {
        &self
            .products
            .iter()
            .find(|(k, _)| *k == (a, b))
            .expect("corners are not composable")
            .1
    }

    /// Coordinates of the dagger, which live in `c.dagger()`.
    pub fn dagger_coords(coords: &[c64]) -> Vec<c64> {
        coords.iter().map(|z| z.conj()).collect()
    }

    /// `D × D` block matrix from coordinates in each corner.
    pub fn assemble(&self, coords: [&[c64]; 4]) -> CMat {
        let d = self.gns.algebra().ambient_dim();
        let n = self.block_dim();
        let mut out = linalg::zeros(n, n);
        for c in Corner::ALL {
            let space = self.corner(c);
            if space.rows == 0 || space.cols == 0 {
                continue;
            }
            let block = space.matrix(coords[c.index()]);
            out.submatrix_mut(c.row() * d, c.col() * d, space.rows, space.cols)
                .copy_from(&block);
        }
        out
    }

    /// Inverse of [`ElModule::assemble`]; also returns the distance of the
    /// matrix from `E_L`.
    pub fn split(&self, x: &CMat) -> ([Vec<c64>; 4], f64) {
        let d = self.gns.algebra().ambient_dim();
        let mut worst = 0.0f64;
        let mut take = |c: Corner| {
            let space = self.corner(c);
            let block = x
                .submatrix(c.row() * d, c.col() * d, space.rows, space.cols)
                .to_owned();
            let (coords, resid) = space.coords(&block);
            worst = worst.max(resid);
            coords
        };
        let out = [
            take(Corner::C00),
            take(Corner::C01),
            take(Corner::C10),
            take(Corner::C11),
        ];
        (out, worst)
    }
}

/// Right-A-linear maps on `M`, realized as operators on `h ⊗ k` that vanish
/// off the range of `M`, returned as a Hermitian orthonormal basis whose first
/// element is the range projector.
fn right_linear_endomorphisms(gns: &GnsData, report: &mut ElReport) -> Result<Vec<CMat>, GnsError> {
    let p = gns.dim();
    if p == 0 {
        return Ok(vec![]);
    }
    let m = gns.algebra().dim();
    let module = gns.bimodule();
    // T right-linear  <=>  T R_a = R_a T for every basis element a.
    let mut constraints = linalg::zeros(m * p * p, p * p);
    for a in 0..m {
        let ra = module.right(a);
        for i in 0..p {
            for j in 0..p {
                let row = (a * p + i) * p + j;
                for l in 0..p {
                    constraints[(row, i * p + l)] += ra[(l, j)];
                }
                for k in 0..p {
                    constraints[(row, k * p + j)] -= ra[(i, k)];
                }
            }
        }
    }
    let solutions = linalg::nullspace(&constraints)?;
    report.commutant_dim = solutions.len();

    let basis = gns.basis();
    let (rows, d) = (basis[0].nrows(), basis[0].ncols());
    let mut e = linalg::zeros(rows, p * d);
    for (j, ej) in basis.iter().enumerate() {
        e.submatrix_mut(0, j * d, rows, d).copy_from(ej);
    }
    let e_pinv = pinv(&e)?;
    let realized: Vec<CMat> = solutions
        .iter()
        .map(|t| {
            let mut y = linalg::zeros(rows, p * d);
            for j in 0..p {
                let mut col = linalg::zeros(rows, d);
                for (k, ek) in basis.iter().enumerate() {
                    linalg::add_scaled(&mut col, ek, t[k * p + j]);
                }
                y.submatrix_mut(0, j * d, rows, d).copy_from(&col);
            }
            &y * &e_pinv
        })
        .collect();
    let span = orthonormal_matrix_span(&realized)?;
    let out = hermitian_basis(&span, Some(gns.range_projector()))?;

    let mut rank_one = Vec::with_capacity(p * p);
    for a in basis {
        for b in basis {
            rank_one.push(a * adjoint(b));
        }
    }
    let finite = orthonormal_matrix_span(&rank_one)?;
    report.finite_rank_dim = finite.len();
    if finite.len() != out.len() || out.len() != report.commutant_dim {
        return Err(GnsError::Invariant {
            what: "B^a(M) dimension agreement",
            residual: (finite.len() as f64 - out.len() as f64).abs(),
            tol: 0.0,
        });
    }
    // every ξη* must lie in the span found
    let space = CornerSpace {
        rows,
        cols: rows,
        basis: out.clone(),
        module: Bimodule::new(0, vec![], vec![]),
    };
    let worst = finite
        .iter()
        .map(|f| space.coords(f).1)
        .fold(0.0, f64::max);
    if worst > TOL {
        return Err(GnsError::Invariant {
            what: "span{ξη*} ⊆ B^a(M)",
            residual: worst,
            tol: TOL,
        });
    }
    Ok(out)
}

/// For each basis `T` of corner 11, takes the trace-form adjoint `T♯` of its
/// coordinate matrix on `M` and checks `(T♯ξ)* η = ξ* (Tη)` as elements of `A`.
fn module_adjoint_residual(gns: &GnsData, c11: &CornerSpace) -> f64 {
    let basis = gns.basis();
    let p = basis.len();
    let mut worst = 0.0f64;
    for t in &c11.basis {
        let coords = CMat::from_fn(p, p, |k, j| inner(&basis[k], &(t * &basis[j])));
        let apply = |mat: &CMat, j: usize| {
            let mut out = linalg::zeros(basis[0].nrows(), basis[0].ncols());
            for (k, ek) in basis.iter().enumerate() {
                linalg::add_scaled(&mut out, ek, mat[(k, j)]);
            }
            out
        };
        let sharp = adjoint(&coords);
        for i in 0..p {
            let ts_xi = apply(&sharp, i);
            for j in 0..p {
                let t_eta = apply(&coords, j);
                let lhs = ts_xi.adjoint() * &basis[j];
                let rhs = basis[i].adjoint() * &t_eta;
                worst = worst.max(frobenius(&(&lhs - &rhs)));
            }
        }
    }
    worst
}
