use dyalg::algebra::*;
use dyalg::combinatorics::{DecorationMonoid, Permutation};
use dyalg::rational::Q;
use dyalg::rewriter::{random_propterm, straighten, straighten_scheduled};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const T: DecorationMonoid = DecorationMonoid::Trivial;

fn random_element(seed: u64, n: usize, max_strands: usize, m: &DecorationMonoid) -> AlgebraElement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = AlgebraElement::zero(n, m.clone());
    for k in 0..=max_strands {
        let b = basis(n, k, m).unwrap();
        for _ in 0..2 {
            let c: i64 = rng.gen_range(-3..=3);
            let e = AlgebraElement::from_basis(b[rng.gen_range(0..b.len())].clone(), m.clone());
            x.add_assign_scaled(&Q::from_integer(c.into()), &e);
        }
    }
    x
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn faces_are_homomorphisms_and_cosimplicial(seed in any::<u64>()) {
        let x = random_element(seed, 2, 2, &T);
        let y = random_element(seed ^ 0x5eed, 2, 1, &T);
        let xy = x.mul(&y).unwrap();
        for i in 0..=3 {
            prop_assert_eq!(xy.face_map(i).unwrap(), x.face_map(i).unwrap().mul(&y.face_map(i).unwrap()).unwrap());
        }
        for j in 1..=4 {
            for i in 0..j {
                let l = x.face_map(i).unwrap().face_map(j).unwrap();
                let r = x.face_map(j - 1).unwrap().face_map(i).unwrap();
                prop_assert_eq!(l, r);
            }
        }
        prop_assert!(x.hochschild_d().hochschild_d().is_zero());
    }

    #[test]
    fn rewrite_schedules_agree(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_propterm(&mut rng, 2, 5, &T);
        let x = straighten(&t, &T).unwrap();
        for _ in 0..3 {
            prop_assert_eq!(&straighten_scheduled(&t, &T, &mut rng).unwrap(), &x);
        }
    }
}

#[test]
fn decoration_maps_are_homomorphisms() {
    // ρ̃ is cut at height 6; compare only terms with all decorations ≤ 3
    let cone = DecorationMonoid::RootCone { rank: 2, cap: 6 };
    let inner = |z: &AlgebraElement| z.filter(|b| b.decor.iter().all(|d| d.height() <= 3));
    for seed in 0..6 {
        let x = random_element(seed, 1, 1, &T);
        let y = random_element(seed + 100, 1, 1, &T);
        let xy = x.mul(&y).unwrap();
        let a = |z: &AlgebraElement| alpha_map(z).unwrap();
        let b = |z: &AlgebraElement| beta_map(z).unwrap();
        let rho = |z: &AlgebraElement| rho_tilde_b(z, &[0, 1], &cone).unwrap();
        assert!(a(&xy) == a(&x).mul(&a(&y)).unwrap(), "α on seed {seed}");
        assert!(b(&xy) == b(&x).mul(&b(&y)).unwrap(), "β on seed {seed}");
        assert!(inner(&rho(&xy)) == inner(&rho(&x).mul(&rho(&y)).unwrap()), "ρ̃ on seed {seed}");
    }
}

#[test]
fn alt_is_a_projector() {
    let x = random_element(9, 3, 2, &T);
    assert_eq!(x.alt().alt(), x.alt());
    let r = r_matrix(2, 1, 2, &T).unwrap();
    let r21 = r.permute_slots(&Permutation::from_images(&[2, 1]).unwrap()).unwrap();
    assert_eq!(r.alt(), r.sub(&r21).scale(&dyalg::rational::qf(1, 2)));
    assert!(omega(2, 1, 2, &T).unwrap().alt().is_zero());
}

#[test]
fn json_round_trip_decorated() {
    for m in [T, DecorationMonoid::Split, DecorationMonoid::RootCone { rank: 2, cap: 2 }] {
        let x = random_element(4, 2, 2, &m);
        assert_eq!(AlgebraElement::from_json_str(&x.to_json_string()).unwrap(), x);
    }
}

#[test]
fn invariance_examples() {
    assert!(is_invariant(&omega(2, 1, 2, &T).unwrap()).unwrap());
    assert!(!is_invariant(&r_matrix(2, 1, 2, &T).unwrap()).unwrap());
    assert!(is_invariant(&AlgebraElement::one(3, T)).unwrap());
}
