use proptest::prelude::*;
use qrw::linalg::{adjoint, c64, frobenius};
use qrw::models::unit;
use qrw::star_algebra::{AlgebraError, StarAlgebra};
use qrw::CMat;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn presets() -> Vec<StarAlgebra> {
    vec![
        StarAlgebra::full_matrix(2).unwrap(),
        StarAlgebra::full_matrix(3).unwrap(),
        StarAlgebra::diagonal(3).unwrap(),
        StarAlgebra::direct_sum(&[1, 2]).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn products_match_dense_multiplication(which in 0usize..4, seed in any::<u64>()) {
        let alg = &presets()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = alg.random_element(&mut rng);
        let b = alg.random_element(&mut rng);
        let ab = alg.multiply(&a, &b).unwrap();
        let dense = alg.to_matrix(&a) * alg.to_matrix(&b);
        prop_assert!(frobenius(&(alg.to_matrix(&ab) - dense)) <= 1e-12);
    }

    #[test]
    fn adjoint_is_an_exact_involution(which in 0usize..4, seed in any::<u64>()) {
        let alg = &presets()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = alg.random_element(&mut rng);
        let star = alg.adjoint(&a).unwrap();
        prop_assert_eq!(&alg.adjoint(&star).unwrap().coeffs, &a.coeffs);
        let dense = adjoint(&alg.to_matrix(&a));
        prop_assert!(frobenius(&(alg.to_matrix(&star) - dense)) <= 1e-12);
    }

    #[test]
    fn unit_is_neutral(which in 0usize..4, seed in any::<u64>()) {
        let alg = &presets()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = alg.random_element(&mut rng);
        let left = alg.multiply(&alg.unit(), &a).unwrap();
        let right = alg.multiply(&a, &alg.unit()).unwrap();
        for (x, y) in left.coeffs.iter().zip(&a.coeffs).chain(right.coeffs.iter().zip(&a.coeffs)) {
            prop_assert!((x - y).norm() <= 1e-12);
        }
    }
}

#[test]
fn rebuilding_from_the_basis_is_idempotent() {
    for alg in presets() {
        let again = StarAlgebra::build(alg.basis(), 1e-10).unwrap();
        assert_eq!(again.dim(), alg.dim());
        let twice = StarAlgebra::build(again.basis(), 1e-10).unwrap();
        assert_eq!(twice.dim(), alg.dim());
    }
}

#[test]
fn closure_of_generators() {
    // a single off-diagonal unit generates all of M_2
    assert_eq!(StarAlgebra::build(&[unit(2, 0, 1)], 1e-10).unwrap().dim(), 4);
    // a diagonal projection generates C ⊕ C
    assert_eq!(StarAlgebra::build(&[unit(3, 0, 0)], 1e-10).unwrap().dim(), 2);
    // E_12 in M_3 with E_33 separately: M_2 ⊕ C
    let alg = StarAlgebra::build(&[unit(3, 0, 1), unit(3, 2, 2)], 1e-10).unwrap();
    assert_eq!(alg.dim(), 5);
    assert_eq!(alg.center().unwrap().len(), 2);
}

#[test]
fn basis_is_hermitian_and_orthonormal_with_normalized_unit_first() {
    for alg in presets() {
        let d = alg.ambient_dim() as f64;
        let b = alg.basis();
        let first = &b[0] - qrw::linalg::scaled(&CMat::identity(alg.ambient_dim(), alg.ambient_dim()), c64::new(d.sqrt().recip(), 0.0));
        assert!(frobenius(&first) < 1e-14);
        for (i, x) in b.iter().enumerate() {
            assert!(frobenius(&(x - adjoint(x))) < 1e-14);
            for (j, y) in b.iter().enumerate() {
                let g = qrw::linalg::inner(x, y);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g - c64::new(want, 0.0)).norm() < 1e-13);
            }
        }
    }
}

#[test]
fn center_dimensions() {
    assert_eq!(StarAlgebra::full_matrix(2).unwrap().center().unwrap().len(), 1);
    assert_eq!(StarAlgebra::diagonal(2).unwrap().center().unwrap().len(), 2);
    assert_eq!(StarAlgebra::direct_sum(&[2, 3]).unwrap().center().unwrap().len(), 2);
}

#[test]
fn membership_is_checked() {
    let diag = StarAlgebra::diagonal(2).unwrap();
    assert!(matches!(
        diag.from_matrix(&unit(2, 0, 1), 1e-10),
        Err(AlgebraError::NotMember { .. })
    ));
    let x = diag.from_matrix(&unit(2, 1, 1), 1e-10).unwrap();
    assert!(frobenius(&(diag.to_matrix(&x) - unit(2, 1, 1))) < 1e-14);
}

#[test]
fn elements_of_different_algebras_do_not_mix() {
    let a = StarAlgebra::full_matrix(2).unwrap();
    let b = StarAlgebra::diagonal(4).unwrap();
    assert_eq!(a.multiply(&a.unit(), &b.unit()), Err(AlgebraError::Mismatch));
}

#[test]
fn structure_constants_are_associative() {
    for alg in presets() {
        assert!(alg.table().associativity_defect() < 1e-12);
        assert!(alg.table().unit_defect() < 1e-12);
    }
}

#[test]
fn fingerprint_separates_algebras() {
    let a = StarAlgebra::full_matrix(2).unwrap();
    assert_eq!(a.fingerprint(), StarAlgebra::full_matrix(2).unwrap().fingerprint());
    assert_ne!(a.fingerprint(), StarAlgebra::diagonal(2).unwrap().fingerprint());
}
