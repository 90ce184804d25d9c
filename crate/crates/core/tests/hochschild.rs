use proptest::prelude::*;
use qrw::bimodule::Bimodule;
use qrw::coefficients::CoefficientEngine;
use qrw::el_module::{Corner, ElModule};
use qrw::exec::Sequential;
use qrw::gns::GnsData;
use qrw::hochschild::{Cochain, HochschildComplex, HochschildError};
use qrw::linalg::c64;
use qrw::models;
use qrw::star_algebra::{AlgebraTable, StarAlgebra};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn regular(alg: &StarAlgebra) -> HochschildComplex {
    HochschildComplex::new(alg.table().clone(), Bimodule::regular(alg.table()))
}

fn dual_numbers() -> HochschildComplex {
    let t = AlgebraTable::dual_numbers();
    HochschildComplex::new(t.clone(), Bimodule::regular(&t))
}

fn engine(model: (StarAlgebra, qrw::gns::LindbladGenerator)) -> CoefficientEngine {
    let (alg, gen) = model;
    CoefficientEngine::new(ElModule::build(&GnsData::build(&alg, &gen).unwrap()).unwrap())
}

fn random_cochain(cx: &HochschildComplex, degree: usize, rng: &mut impl Rng) -> Cochain {
    let m = cx.table().dim();
    let p = cx.module().dim();
    let data = (0..cx.cochain_dim(degree))
        .map(|_| c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    Cochain::from_data(degree, m, p, data).unwrap()
}

fn square_defect(cx: &HochschildComplex, n: usize) -> f64 {
    let a = cx.coboundary_matrix(n).unwrap();
    let b = cx.coboundary_matrix(n + 1).unwrap();
    b.matmul::<Sequential>(a).frobenius()
}

#[test]
fn coboundary_squares_to_zero() {
    let mut complexes = vec![
        regular(&StarAlgebra::full_matrix(2).unwrap()),
        regular(&StarAlgebra::direct_sum(&[1, 2]).unwrap()),
        dual_numbers(),
    ];
    for model in [models::amplitude_damping(), models::random_m3(), models::diagonal_damping()] {
        let eng = engine(model);
        for c in Corner::ALL {
            complexes.push(HochschildComplex::new(
                eng.complex(c).table().clone(),
                eng.complex(c).module().clone(),
            ));
        }
    }
    for cx in &complexes {
        for n in 0..2 {
            assert!(square_defect(cx, n) <= 1e-10);
        }
    }
}

#[test]
fn matrix_algebra_with_itself() {
    let cx = regular(&StarAlgebra::full_matrix(2).unwrap());
    assert_eq!(cx.cohomology_dim(0).unwrap(), 1);
    assert_eq!(cx.cohomology_dim(1).unwrap(), 0);
    assert_eq!(cx.cohomology_dim(2).unwrap(), 0);
}

#[test]
fn dual_numbers_negative_control() {
    let cx = dual_numbers();
    assert_eq!(cx.cohomology_dim(0).unwrap(), 2);
    assert_eq!(cx.cohomology_dim(1).unwrap(), 1);
    assert_eq!(cx.cohomology_dim(2).unwrap(), 1);
    // φ(ε, ε) = 1 is a cocycle that is not a coboundary
    let mut phi = Cochain::zeros(2, 2, 2);
    phi.value_mut(3)[0] = c64::new(1.0, 0.0);
    let (ok, _) = cx.is_cocycle(&phi, 1e-12).unwrap();
    assert!(ok);
    match cx.solve_coboundary(&phi, 1e-9) {
        Err(HochschildError::Obstruction { residual, h2 }) => {
            assert!(residual > 0.1);
            assert_eq!(h2, 1);
        }
        other => panic!("expected an obstruction, got {other:?}"),
    }
}

#[test]
fn corners_have_no_higher_cohomology() {
    let eng = engine(models::amplitude_damping());
    for c in Corner::ALL {
        let cx = eng.complex(c);
        assert_eq!(cx.cohomology_dim(0).unwrap(), 1, "corner {c}");
        assert_eq!(cx.cohomology_dim(1).unwrap(), 0, "corner {c}");
        assert_eq!(cx.cohomology_dim(2).unwrap(), 0, "corner {c}");
    }
    // the commutative model has a two-dimensional center
    let eng = engine(models::diagonal_damping());
    for c in Corner::ALL {
        let cx = eng.complex(c);
        assert_eq!(cx.cohomology_dim(1).unwrap(), 0, "corner {c}");
        assert_eq!(cx.cohomology_dim(2).unwrap(), 0, "corner {c}");
    }
}

#[test]
fn ranks_are_consistent_with_the_table() {
    let eng = engine(models::amplitude_damping());
    let cx = eng.complex(Corner::C10);
    let r = cx.cohomology(2).unwrap();
    assert_eq!(r.cochain_dim, 64);
    assert_eq!(r.kernel_dim, r.cochain_dim - r.rank);
    assert_eq!(r.dim, r.kernel_dim - r.rank_prev);
    assert_eq!(r.rank_prev, cx.rank(1).unwrap());
}

#[test]
fn zero_right_hand_side_has_zero_solution() {
    let eng = engine(models::amplitude_damping());
    let cx = eng.complex(Corner::C11);
    let sol = cx.solve_coboundary(&Cochain::zeros(2, 4, 4), 1e-9).unwrap();
    assert!(sol.theta.data.iter().all(|z| *z == c64::new(0.0, 0.0)));
}

#[test]
fn degree_three_is_out_of_scope() {
    let cx = dual_numbers();
    assert!(matches!(cx.coboundary_matrix(3), Err(HochschildError::Degree(3))));
    assert!(matches!(cx.rank(3), Err(HochschildError::Degree(3))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn coboundaries_are_solved(seed in any::<u64>(), corner in 0usize..4) {
        let eng = engine(models::amplitude_damping());
        let cx = eng.complex(Corner::ALL[corner]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let theta0 = random_cochain(cx, 1, &mut rng);
        let phi = cx.coboundary(&theta0).unwrap();
        let (ok, _) = cx.is_cocycle(&phi, 1e-10).unwrap();
        prop_assert!(ok);
        let sol = cx.solve_coboundary(&phi, 1e-9).unwrap();
        prop_assert!(sol.residual <= 1e-9);
        // solutions differ from θ₀ by a 1-cocycle
        let diff = Cochain::from_data(
            1, theta0.m, theta0.p,
            sol.theta.data.iter().zip(&theta0.data).map(|(a, b)| a - b).collect(),
        ).unwrap();
        prop_assert!(cx.coboundary(&diff).unwrap().max_norm() <= 1e-9);
        // minimum norm: solving again returns the same θ
        let again = cx.solve_coboundary(&cx.coboundary(&sol.theta).unwrap(), 1e-9).unwrap();
        for (a, b) in again.theta.data.iter().zip(&sol.theta.data) {
            prop_assert!((a - b).norm() <= 1e-10);
        }
        prop_assert!(qrw::linalg::vnorm(&sol.theta.data) <= qrw::linalg::vnorm(&theta0.data) + 1e-10);
    }

    #[test]
    fn random_two_cochains_are_not_cocycles(seed in any::<u64>()) {
        let eng = engine(models::amplitude_damping());
        let cx = eng.complex(Corner::C00);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = random_cochain(cx, 2, &mut rng);
        let (ok, residual) = cx.is_cocycle(&phi, 1e-9).unwrap();
        prop_assert!(!ok);
        prop_assert!(residual > 1e-3);
    }
}

#[test]
fn solving_is_deterministic() {
    let eng = engine(models::random_m3());
    let cx = eng.complex(Corner::C10);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let theta0 = random_cochain(cx, 1, &mut rng);
    let phi = cx.coboundary(&theta0).unwrap();
    let a = cx.solve_coboundary(&phi, 1e-9).unwrap();
    let fresh = engine(models::random_m3());
    let b = fresh.complex(Corner::C10).solve_coboundary(&phi, 1e-9).unwrap();
    assert_eq!(a.theta, b.theta);
}

#[test]
fn shape_mismatch_is_reported() {
    let cx = dual_numbers();
    let wrong = Cochain::zeros(1, 2, 3);
    assert!(matches!(cx.coboundary(&wrong), Err(HochschildError::Shape { .. })));
}
