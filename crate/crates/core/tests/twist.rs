use dyalg::algebra::{kappa, omega, GradedSeries};
use dyalg::combinatorics::{maximal_nested_sets, DecorationMonoid, Diagram};
use dyalg::rational::qf;
use dyalg::twist_lab::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const T: DecorationMonoid = DecorationMonoid::Trivial;

#[test]
fn series_product_is_associative() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = random_unit_series(&mut rng, 2, &T, 2).unwrap();
    let b = random_unit_series(&mut rng, 2, &T, 2).unwrap();
    let c = random_unit_series(&mut rng, 2, &T, 2).unwrap();
    let l = mul(&mul(&a, &b).unwrap(), &c).unwrap();
    let r = mul(&a, &mul(&b, &c).unwrap()).unwrap();
    assert_eq!(l, r);
}

#[test]
fn gauge_group_action() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let u = random_unit_series(&mut rng, 1, &T, 3).unwrap();
    let v = random_unit_series(&mut rng, 1, &T, 3).unwrap();
    let j = random_unit_series(&mut rng, 2, &T, 3).unwrap();
    let lhs = gauge(&u, &gauge(&v, &j).unwrap()).unwrap();
    let rhs = gauge(&mul(&u, &v).unwrap(), &j).unwrap();
    assert_eq!(lhs, rhs);
    assert_eq!(gauge(&GradedSeries::one(1, &T, 3), &j).unwrap(), j);
    let mut bad = u.clone();
    bad.parts[0] = bad.parts[0].scale(&qf(2, 1));
    assert!(gauge(&bad, &j).is_err());
}

#[test]
fn central_gauges_fix_the_twisted_associator() {
    let phi = associator_two_jet(&T, 3).unwrap();
    let j = gauge(&central_gauge(&qf(1, 3), &T, 3).unwrap(), &GradedSeries::one(2, &T, 3)).unwrap();
    let u = central_gauge(&qf(-2, 5), &T, 3).unwrap();
    let a = twist_conjugate(&phi, &gauge(&u, &j).unwrap()).unwrap();
    assert_eq!(a, twist_conjugate(&phi, &j).unwrap());
    assert_eq!(a, phi);
    assert_eq!(twist_conjugate(&phi, &GradedSeries::one(2, &T, 3)).unwrap(), phi);
}

#[test]
fn linearised_twist_residual_is_the_differential() {
    // J = 1 + J₁ with J₁ symmetric: degree-1 change of Φ is d(J₁)
    let phi = GradedSeries::one(3, &T, 1);
    let j1 = omega(2, 1, 2, &T).unwrap();
    let mut j = GradedSeries::one(2, &T, 1);
    j.parts[1] = j1.clone();
    let out = twist_conjugate(&phi, &j).unwrap();
    assert_eq!(out.parts[1], j1.hochschild_d());
}

#[test]
fn composite_twist() {
    let phi = associator_two_jet(&T, 3).unwrap();
    let one = GradedSeries::one(2, &T, 3);
    let j = gauge(&central_gauge(&qf(1, 2), &T, 3).unwrap(), &one).unwrap();
    let k = gauge(&central_gauge(&qf(3, 1), &T, 3).unwrap(), &one).unwrap();
    let twice = twist_conjugate(&twist_conjugate(&phi, &j).unwrap(), &k).unwrap();
    assert_eq!(twice, twist_conjugate(&phi, &mul(&k, &j).unwrap()).unwrap());
}

#[test]
fn solve_gauge_is_a_retraction() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let phi = associator_two_jet(&T, 3).unwrap();
    for _ in 0..5 {
        let j = gauge(&random_unit_series(&mut rng, 1, &T, 3).unwrap(), &GradedSeries::one(2, &T, 3)).unwrap();
        let u = random_unit_series(&mut rng, 1, &T, 3).unwrap();
        assert_eq!(solve_gauge(&j, &gauge(&u, &j).unwrap(), &phi, 3).unwrap(), u);
    }
}

#[test]
fn series_json_round_trip() {
    let phi = associator_two_jet(&T, 3).unwrap();
    let j = series_to_json(&phi);
    let s = serde_json::to_string(&j).unwrap();
    let back: SeriesJson = serde_json::from_str(&s).unwrap();
    assert_eq!(series_from_json_auto(&back).unwrap(), phi);
}

#[test]
fn coxeter_family_on_a2_and_a3() {
    for n in 2..=3 {
        let d = Diagram::path(n);
        let fam = coxeter_family_from_twist(&d, &qf(1, 2), &T, 3).unwrap();
        let r = check_coxeter_family(&fam, &d, 3).unwrap();
        assert!(r.pass(), "{r:?}");
        if n == 3 {
            assert_eq!(maximal_nested_sets(&d).len(), 5);
            assert!(r.get("factorisation").unwrap().instances > 0);
        }
    }
}

#[test]
fn coxeter_orientation_seeded_failure() {
    let d = Diagram::path(2);
    let mut fam = coxeter_family_from_twist(&d, &qf(1, 2), &T, 3).unwrap();
    let mns = maximal_nested_sets(&d);
    let key = (mns[1].clone(), mns[0].clone());
    let u = fam.upsilon.get_mut(&key).unwrap();
    let k = kappa(1, 1, &T).unwrap();
    u.parts[2] = u.parts[2].add(&k.mul(&k).unwrap());
    let r = check_coxeter_family(&fam, &d, 3).unwrap();
    assert!(r.get("orientation").unwrap().failures > 0);
    fam.upsilon.remove(&key);
    assert!(check_coxeter_family(&fam, &d, 3).is_err());
}
