use proptest::prelude::*;
use qrw::el_module::{Corner, ElModule};
use qrw::gns::{GnsData, GnsError, LindbladGenerator};
use qrw::linalg::{adjoint, c64, frobenius, scaled, zeros};
use qrw::models::{self, unit};
use qrw::star_algebra::StarAlgebra;
use qrw::CMat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn amplitude_damping() -> (StarAlgebra, GnsData) {
    let (alg, gen) = models::amplitude_damping();
    let gns = GnsData::build(&alg, &gen).unwrap();
    (alg, gns)
}

fn random_m3() -> (StarAlgebra, GnsData) {
    let (alg, gen) = models::random_m3();
    let gns = GnsData::build(&alg, &gen).unwrap();
    (alg, gns)
}

#[test]
fn lindbladian_on_matrix_units() {
    let (_, gen) = models::amplitude_damping();
    let e11 = unit(2, 0, 0);
    let e22 = unit(2, 1, 1);
    assert!(frobenius(&(gen.apply_matrix(&e11) + &e11)) < 1e-15);
    assert!(frobenius(&(gen.apply_matrix(&e22) - &e11)) < 1e-15);
    assert!(frobenius(&gen.apply_matrix(&CMat::identity(2, 2))) < 1e-15);
}

#[test]
fn generators_annihilate_the_unit() {
    for (_, gen) in [models::amplitude_damping(), models::random_m3()] {
        let d = gen.dim();
        assert!(frobenius(&gen.apply_matrix(&CMat::identity(d, d))) < 1e-12);
    }
}

#[test]
fn derivation_values() {
    let (_, gen) = models::amplitude_damping();
    // E_11 σ₋ − σ₋ E_11 = −E_21
    assert!(frobenius(&(gen.delta(&unit(2, 0, 0)) + unit(2, 1, 0))) < 1e-15);
    assert!(frobenius(&gen.delta(&unit(2, 1, 0))) < 1e-15);
}

#[test]
fn module_dimensions() {
    let (_, gns) = amplitude_damping();
    assert_eq!(gns.dim(), 4);
    let el = ElModule::build(&gns).unwrap();
    for c in Corner::ALL {
        assert_eq!(el.corner(c).dim(), 4, "corner {c}");
    }
    let (_, gns) = random_m3();
    assert_eq!(gns.dim(), 18);
    let el = ElModule::build(&gns).unwrap();
    assert_eq!(el.corner(Corner::C11).dim(), 36);
    assert_eq!(el.total_dim(), 81);

    let zero = GnsData::build(&StarAlgebra::full_matrix(2).unwrap(), &LindbladGenerator::zero(2)).unwrap();
    assert_eq!(zero.dim(), 0);
}

#[test]
fn gns_identity_on_random_pairs() {
    for (_, gns) in [amplitude_damping(), random_m3()] {
        assert!(gns.max_gns_defect(100, 5) <= 1e-10);
    }
    let (_, gns) = amplitude_damping();
    let (sp, sm) = (unit(2, 0, 1), unit(2, 1, 0));
    assert!(gns.gns_defect(&sp, &sm) <= 1e-10);
    assert!(gns.gns_defect(&CMat::identity(2, 2), &CMat::identity(2, 2)) <= 1e-15);
}

#[test]
fn derivation_property_on_basis_pairs() {
    for (alg, gns) in [amplitude_damping(), random_m3()] {
        for x in alg.basis() {
            for y in alg.basis() {
                assert!(gns.derivation_defect(x, y) <= 1e-10);
            }
        }
    }
}

#[test]
fn sign_of_the_derivation_does_not_matter() {
    let (alg, gen) = models::random_m3();
    let flipped_ops: Vec<CMat> = gen
        .lindblad_ops()
        .iter()
        .map(|l| scaled(l, c64::new(-1.0, 0.0)))
        .collect();
    let flipped = LindbladGenerator::new(gen.hamiltonian().clone(), flipped_ops).unwrap();
    for x in alg.basis() {
        assert!(frobenius(&(gen.delta(x) + flipped.delta(x))) < 1e-14);
        for y in alg.basis() {
            let a = gen.delta_dagger(x) * gen.delta(y);
            let b = flipped.delta_dagger(x) * flipped.delta(y);
            assert!(frobenius(&(a - b)) < 1e-14);
        }
    }
}

#[test]
fn representation_is_a_star_map() {
    let (alg, gns) = random_m3();
    let gen = gns.generator();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let x = alg.to_matrix(&alg.random_element(&mut rng));
        assert!(frobenius(&(gen.pi(&adjoint(&x)) - adjoint(&gen.pi(&x)))) < 1e-14);
        // δ†(x) = δ(x*)*
        assert!(frobenius(&(gen.delta_dagger(&x) - adjoint(&gen.delta(&adjoint(&x))))) < 1e-14);
    }
}

#[test]
fn bimodule_axioms_hold_everywhere() {
    for (alg, gns) in [amplitude_damping(), random_m3()] {
        assert!(gns.bimodule().axioms_defect(alg.table()) <= 1e-10);
        let el = ElModule::build(&gns).unwrap();
        for c in Corner::ALL {
            assert!(el.corner(c).module.axioms_defect(alg.table()) <= 1e-10, "corner {c}");
        }
        let rep = el.report();
        assert_eq!(rep.commutant_dim, rep.finite_rank_dim);
        assert!(rep.adjoint_residual <= 1e-10);
        assert!(rep.closure_residual <= 1e-10);
    }
}

#[test]
fn left_action_on_rank_one_maps() {
    // x·(ξη*) = (π(x)ξ)η*, read through the corner-11 action tensors
    let (alg, gns) = random_m3();
    let el = ElModule::build(&gns).unwrap();
    let space = el.corner(Corner::C11);
    let pi = |x: &CMat| gns.generator().pi(x);
    let m = gns.basis();
    for (i, b) in alg.basis().iter().enumerate() {
        for (xi, eta) in [(&m[0], &m[1]), (&m[3], &m[2]), (&m[5], &m[5])] {
            let t = xi * adjoint(eta);
            let (coords, resid) = space.coords(&t);
            assert!(resid < 1e-12);
            let acted: Vec<c64> = (0..coords.len())
                .map(|k| (0..coords.len()).map(|j| space.module.left(i)[(k, j)] * coords[j]).sum())
                .collect();
            let want = (pi(b) * xi) * adjoint(eta);
            assert!(frobenius(&(space.matrix(&acted) - want)) <= 1e-12);
        }
    }
}

#[test]
fn gns_coordinates_reconstruct_derivations() {
    let (alg, gns) = random_m3();
    for x in alg.basis() {
        let (_, resid) = gns.coords(&gns.generator().delta(x));
        assert!(resid < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn el_dagger_and_block_assembly(seed in any::<u64>()) {
        let (_, gns) = amplitude_damping();
        let el = ElModule::build(&gns).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coords: Vec<Vec<c64>> = Corner::ALL
            .iter()
            .map(|c| (0..el.corner(*c).dim()).map(|_| c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect())
            .collect();
        let x = el.assemble([&coords[0], &coords[1], &coords[2], &coords[3]]);
        let (back, resid) = el.split(&x);
        prop_assert!(resid < 1e-12);
        for (a, b) in back.iter().zip(&coords) {
            for (u, v) in a.iter().zip(b) {
                prop_assert!((u - v).norm() < 1e-12);
            }
        }
        // dagger: conjugate coordinates, exchanging corners 01 and 10
        let dag: Vec<Vec<c64>> = coords.iter().map(|c| ElModule::dagger_coords(c)).collect();
        prop_assert_eq!(&ElModule::dagger_coords(&dag[1]), &coords[1]);
        let y = el.assemble([&dag[0], &dag[2], &dag[1], &dag[3]]);
        prop_assert!(frobenius(&(y - adjoint(&x))) < 1e-12);
    }
}

#[test]
fn invalid_generators_are_rejected() {
    let mut h = zeros(2, 2);
    h[(0, 1)] = c64::new(1.0, 0.0);
    assert!(matches!(LindbladGenerator::new(h, vec![]), Err(GnsError::NotHermitian(_))));

    let sx = unit(2, 0, 1) + unit(2, 1, 0);
    let gen = LindbladGenerator::new(zeros(2, 2), vec![sx]).unwrap();
    let diag = StarAlgebra::diagonal(2).unwrap();
    // σ_x-dephasing maps diagonals to diagonals, but H = σ_x does not
    assert!(GnsData::build(&diag, &gen).is_ok());
    let rot = LindbladGenerator::new(unit(2, 0, 1) + unit(2, 1, 0), vec![]).unwrap();
    assert!(matches!(GnsData::build(&diag, &rot), Err(GnsError::NotInvariant(_))));
}
