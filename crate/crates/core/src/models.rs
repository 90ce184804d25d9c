//! Reference models used by tests, benches and the CLI presets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gns::LindbladGenerator;
use crate::linalg::{self, c64, CMat};
use crate::star_algebra::StarAlgebra;

/// Seed of the generic three-level model.
pub const RANDOM_M3_SEED: u64 = 20240917;

/// Matrix unit `E_{ij}` (zero-based) in `M_d`.
pub fn unit(d: usize, i: usize, j: usize) -> CMat {
    let mut e = linalg::zeros(d, d);
    e[(i, j)] = c64::new(1.0, 0.0);
    e
}

/// `M_2` with `H = 0` and the single jump operator `E_21`.
pub fn amplitude_damping() -> (StarAlgebra, LindbladGenerator) {
    let alg = StarAlgebra::full_matrix(2).expect("M_2");
    let gen = LindbladGenerator::new(linalg::zeros(2, 2), vec![unit(2, 1, 0)]).expect("valid");
    (alg, gen)
}

/// Diagonal `C^2` with the same jump operator; commutative and invariant.
pub fn diagonal_damping() -> (StarAlgebra, LindbladGenerator) {
    let alg = StarAlgebra::diagonal(2).expect("C^2");
    let gen = LindbladGenerator::new(linalg::zeros(2, 2), vec![unit(2, 1, 0)]).expect("valid");
    (alg, gen)
}

/// `M_d` with a random Hermitian `H` and `n_ops` random jump operators.
pub fn random_full(d: usize, n_ops: usize, seed: u64) -> (StarAlgebra, LindbladGenerator) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |scale: f64| {
        CMat::from_fn(d, d, |_, _| {
            c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale
        })
    };
    let raw = draw(0.5);
    let h = linalg::hermitize(&raw);
    let ops: Vec<CMat> = (0..n_ops).map(|_| draw(0.5)).collect();
    let alg = StarAlgebra::full_matrix(d).expect("M_d");
    let gen = LindbladGenerator::new(h, ops).expect("valid");
    (alg, gen)
}

/// The generic three-level model: `M_3`, two jump operators, fixed seed.
pub fn random_m3() -> (StarAlgebra, LindbladGenerator) {
    random_full(3, 2, RANDOM_M3_SEED)
}
