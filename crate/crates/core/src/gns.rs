//! Lindblad generators and their GNS bimodule `(M, π, δ)`.
//!
//! `M` sits inside `B(h, h ⊗ k)` as `d·N_k × d` matrices whose `s`-th `d × d`
//! block row is the component along the `s`-th Lindblad operator. With that
//! layout `π(x) = x ⊗ 1_k` is block diagonal and the `A`-valued inner product
//! is `⟨ξ, η⟩ = ξ* η`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bimodule::Bimodule;
use crate::linalg::{
    self, adjoint, block_diag_repeat, c64, frobenius, op_norm, orthonormal_matrix_span,
    orthonormal_span, CMat, LinalgError,
};
use crate::star_algebra::{AlgebraElement, AlgebraError, StarAlgebra};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GnsError {
    #[error("Hamiltonian is not Hermitian (‖H − H*‖ = {0:.3e})")]
    NotHermitian(f64),
    #[error("operator {index} has shape {rows}x{cols}, expected {d}x{d}")]
    Shape {
        index: usize,
        rows: usize,
        cols: usize,
        d: usize,
    },
    #[error("generator does not leave the algebra invariant (residual {0:.3e})")]
    NotInvariant(f64),
    #[error("{what} residual {residual:.3e} exceeds {tol:.1e}")]
    Invariant {
        what: &'static str,
        residual: f64,
        tol: f64,
    },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `L(x) = Σ L_i* x L_i + G* x + x G` with `G = −iH − ½ Σ L_i* L_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct LindbladGenerator {
    h: CMat,
    ops: Vec<CMat>,
    g: CMat,
}

impl LindbladGenerator {
    pub fn new(h: CMat, ops: Vec<CMat>) -> Result<Self, GnsError> {
        let d = h.nrows();
        let all = std::iter::once(&h).chain(&ops);
        for (index, a) in all.enumerate() {
            if a.nrows() != d || a.ncols() != d {
                return Err(GnsError::Shape {
                    index,
                    rows: a.nrows(),
                    cols: a.ncols(),
                    d,
                });
            }
        }
        let herm = frobenius(&(&h - &adjoint(&h)));
        if herm > 1e-12 {
            return Err(GnsError::NotHermitian(herm));
        }
        let mut g = linalg::scaled(&h, c64::new(0.0, -1.0));
        for l in &ops {
            linalg::add_scaled(&mut g, &(l.adjoint() * l), c64::new(-0.5, 0.0));
        }
        Ok(LindbladGenerator { h, ops, g })
    }

    /// `H = 0`, no Lindblad operators.
    pub fn zero(d: usize) -> Self {
        Self::new(linalg::zeros(d, d), vec![]).expect("zero generator is valid")
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    pub fn multiplicity(&self) -> usize {
        self.ops.len()
    }

    pub fn hamiltonian(&self) -> &CMat {
        &self.h
    }

    pub fn lindblad_ops(&self) -> &[CMat] {
        &self.ops
    }

    pub fn g(&self) -> &CMat {
        &self.g
    }

    /// The operators stacked into a column, `d·N_k × d`.
    pub fn stacked(&self) -> CMat {
        let d = self.dim();
        let mut out = linalg::zeros(d * self.ops.len(), d);
        for (s, l) in self.ops.iter().enumerate() {
            out.submatrix_mut(s * d, 0, d, d).copy_from(l);
        }
        out
    }

    pub fn apply_matrix(&self, x: &CMat) -> CMat {
        let mut out = self.g.adjoint() * x + x * &self.g;
        for l in &self.ops {
            out += l.adjoint() * x * l;
        }
        out
    }

    /// `L(x)` as an algebra element; fails if `L(x)` leaves the algebra.
    pub fn apply(&self, alg: &StarAlgebra, x: &AlgebraElement) -> Result<AlgebraElement, GnsError> {
        let y = self.apply_matrix(&alg.to_matrix(x));
        let (coeffs, residual) = alg.project(&y);
        if residual > 1e-10 {
            return Err(GnsError::NotInvariant(residual));
        }
        Ok(alg.element(coeffs)?)
    }

    /// Largest distance of `L(B_i)` from the algebra.
    pub fn invariance_residual(&self, alg: &StarAlgebra) -> f64 {
        alg.basis()
            .iter()
            .map(|b| alg.project(&self.apply_matrix(b)).1)
            .fold(0.0, f64::max)
    }

    /// `δ(x) = (x L_s − L_s x)_s`.
    pub fn delta(&self, x: &CMat) -> CMat {
        let d = self.dim();
        let mut out = linalg::zeros(d * self.ops.len(), d);
        for (s, l) in self.ops.iter().enumerate() {
            let block = x * l - l * x;
            out.submatrix_mut(s * d, 0, d, d).copy_from(&block);
        }
        out
    }

    /// `δ†(x) = δ(x*)*`.
    pub fn delta_dagger(&self, x: &CMat) -> CMat {
        adjoint(&self.delta(&adjoint(x)))
    }

    /// `π(x) = x ⊗ 1_k`.
    pub fn pi(&self, x: &CMat) -> CMat {
        block_diag_repeat(x, self.ops.len())
    }
}

/// The GNS bimodule of a generator restricted to an algebra.
#[derive(Clone, Debug)]
pub struct GnsData {
    alg: StarAlgebra,
    generator: LindbladGenerator,
    m_basis: Vec<CMat>,
    /// Projector onto the span of the ranges of the elements of `M`.
    p_k: CMat,
    module: Bimodule,
}

impl GnsData {
    pub fn build(alg: &StarAlgebra, generator: &LindbladGenerator) -> Result<Self, GnsError> {
        let d = alg.ambient_dim();
        if generator.dim() != d {
            return Err(GnsError::Shape {
                index: 0,
                rows: generator.dim(),
                cols: generator.dim(),
                d,
            });
        }
        let inv = generator.invariance_residual(alg);
        if inv > 1e-10 {
            return Err(GnsError::NotInvariant(inv));
        }
        let nk = generator.multiplicity();
        let deltas: Vec<CMat> = alg.basis().iter().map(|b| generator.delta(b)).collect();
        let mut cands = Vec::with_capacity(deltas.len() * alg.dim());
        for dj in &deltas {
            for bl in alg.basis() {
                cands.push(dj * bl);
            }
        }
        let m_basis = if nk == 0 {
            vec![]
        } else {
            orthonormal_matrix_span(&cands)?
        };

        let mut columns = Vec::new();
        for e in &m_basis {
            for j in 0..e.ncols() {
                columns.push((0..e.nrows()).map(|i| e[(i, j)]).collect::<Vec<_>>());
            }
        }
        let mut p_k = linalg::zeros(d * nk, d * nk);
        for v in orthonormal_span(&columns)? {
            for j in 0..v.len() {
                for i in 0..v.len() {
                    p_k[(i, j)] += v[i] * v[j].conj();
                }
            }
        }

        let (module, resid) = Bimodule::from_concrete(
            alg,
            &m_basis,
            |x, xi| generator.pi(x) * xi,
            |x, xi| xi * x,
        );
        if resid > 1e-10 {
            return Err(GnsError::Invariant {
                what: "M closure under the actions",
                residual: resid,
                tol: 1e-10,
            });
        }
        let out = GnsData {
            alg: alg.clone(),
            generator: generator.clone(),
            m_basis,
            p_k,
            module,
        };
        let span = out.delta_span_residual();
        if span > 1e-10 {
            return Err(GnsError::Invariant {
                what: "δ(A) ⊆ M",
                residual: span,
                tol: 1e-10,
            });
        }
        Ok(out)
    }

    pub fn algebra(&self) -> &StarAlgebra {
        &self.alg
    }

    pub fn generator(&self) -> &LindbladGenerator {
        &self.generator
    }

    pub fn multiplicity(&self) -> usize {
        self.generator.multiplicity()
    }

    pub fn dim(&self) -> usize {
        self.m_basis.len()
    }

    pub fn basis(&self) -> &[CMat] {
        &self.m_basis
    }

    pub fn range_projector(&self) -> &CMat {
        &self.p_k
    }

    /// `M` in coordinates, with `π` on the left and multiplication on the
    /// right.
    pub fn bimodule(&self) -> &Bimodule {
        &self.module
    }

    /// Coordinates of a matrix in the basis of `M` and its distance from `M`.
    pub fn coords(&self, xi: &CMat) -> (Vec<c64>, f64) {
        let c: Vec<c64> = self.m_basis.iter().map(|e| linalg::inner(e, xi)).collect();
        let mut rebuilt = linalg::zeros(xi.nrows(), xi.ncols());
        for (e, ci) in self.m_basis.iter().zip(&c) {
            linalg::add_scaled(&mut rebuilt, e, *ci);
        }
        let resid = frobenius(&(xi - &rebuilt));
        (c, resid)
    }

    fn delta_span_residual(&self) -> f64 {
        self.alg
            .basis()
            .iter()
            .map(|b| self.coords(&self.generator.delta(b)).1)
            .fold(0.0, f64::max)
    }

    /// `‖L(xy) − xL(y) − L(x)y − δ†(x)δ(y)‖` in operator norm.
    pub fn gns_defect(&self, x: &CMat, y: &CMat) -> f64 {
        let g = &self.generator;
        let lhs = g.apply_matrix(&(x * y)) - x * g.apply_matrix(y) - g.apply_matrix(x) * y;
        let rhs = g.delta_dagger(x) * g.delta(y);
        op_norm(&(&lhs - &rhs))
    }

    /// Largest [`gns_defect`](Self::gns_defect) over `pairs` random pairs
    /// drawn from a ChaCha8 stream seeded with `seed`.
    pub fn max_gns_defect(&self, pairs: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..pairs)
            .map(|_| {
                let x = self.alg.to_matrix(&self.alg.random_element(&mut rng));
                let y = self.alg.to_matrix(&self.alg.random_element(&mut rng));
                self.gns_defect(&x, &y)
            })
            .fold(0.0, f64::max)
    }

    /// `‖δ(xy) − π(x)δ(y) − δ(x)y‖` in operator norm.
    pub fn derivation_defect(&self, x: &CMat, y: &CMat) -> f64 {
        let g = &self.generator;
        let r = g.delta(&(x * y)) - g.pi(x) * g.delta(y) - g.delta(x) * y;
        op_norm(&r)
    }
}
