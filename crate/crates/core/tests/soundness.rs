use dyalg::combinatorics::DecorationMonoid;
use dyalg::linalg::Mat;
use dyalg::rational::Q;
use dyalg::realization::*;
use dyalg::rewriter::*;
use num::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn eval_sum(terms: &[(Word, i64)], m: &DecorationMonoid, a: &LieBialgebraData, mods: &[DYModuleData]) -> Mat {
    let mut acc: Option<Mat> = None;
    for (w, c) in terms {
        let e = evaluate_word(w, m, a, mods).unwrap().scale(&Q::from_integer((*c).into()));
        acc = Some(match acc {
            None => e,
            Some(x) => x.add(&e),
        });
    }
    acc.unwrap()
}

fn check_words(a: &LieBialgebraData, mods: &[DYModuleData], m: &DecorationMonoid, seed: u64, trials: usize) {
    let ctx = Ctx::of(m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = mods.len();
    let mut checked = 0;
    while checked < trials {
        let strands = rng.gen_range(2..=3);
        let w = random_word(&mut rng, n, strands, m);
        let inv = w.inversions();
        if inv.is_empty() {
            continue;
        }
        let (k, p) = inv[rng.gen_range(0..inv.len())];
        let lhs = evaluate_word(&w, m, a, mods).unwrap();
        let rhs = eval_sum(&rewrite_at(&ctx, &w, k, p), m, a, mods);
        assert_eq!(lhs, rhs, "exchange rule on {w:?} at ({k},{p})");
        checked += 1;
    }
}

#[test]
fn exchange_rule_sound_on_sl2_fleet() {
    let a = sl2_borel();
    for (name, v) in sl2_fleet() {
        eprintln!("{name}");
        check_words(&a, &[v.clone()], &DecorationMonoid::Trivial, 1, 30);
    }
    let f = sl2_fleet();
    check_words(&a, &[f[0].1.clone(), f[2].1.clone()], &DecorationMonoid::Trivial, 2, 30);
}

#[test]
fn net_rules_sound() {
    let a = sl2_borel();
    let m = DecorationMonoid::Trivial;
    let ctx = Ctx::of(&m);
    let f = sl2_fleet();
    let mods = [f[0].1.clone(), f[1].1.clone()];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    while checked < 40 {
        let t = random_propterm(&mut rng, 2, 5, &m);
        for net in t.to_nets(&m).unwrap() {
            for rule in net.candidates() {
                let lhs = evaluate_net(&net, &m, &a, &mods).unwrap();
                let mut rhs = Mat::zeros(lhs.rows, lhs.cols);
                for (n2, c) in net.apply(&ctx, rule) {
                    rhs.add_scaled(&Q::from_integer(c.into()), &evaluate_net(&n2, &m, &a, &mods).unwrap());
                }
                assert_eq!(lhs, rhs, "{rule:?} on {net:?}");
                checked += 1;
            }
        }
    }
    let _ = Q::zero();
}

fn a2() -> KacMoodyBorel {
    build_kac_moody_borel(&KacMoodyData::new(vec![vec![2, -1], vec![-1, 2]], 2)).unwrap()
}

#[test]
fn exchange_rule_sound_split() {
    let b = sl2_borel();
    let a = direct_sum_split(&b, &b);
    let v = DYModuleData::direct_sum_module(&sl2_borel_module(2, Q::zero()), &sl2_borel_module(2, num::One::one()));
    assert!(validate_dy_module(&a, &v).unwrap().is_valid());
    check_words(&a, &[v], &DecorationMonoid::Split, 4, 40);

    let k = a2();
    let s = split_by_support(&k.algebra, &[0]).unwrap();
    let v = adjoint_double_module(&k.algebra).unwrap();
    check_words(&s, &[v], &DecorationMonoid::Split, 5, 25);
}

#[test]
fn exchange_rule_sound_cone() {
    let k = a2();
    let v = adjoint_double_module(&k.algebra).unwrap();
    assert!(validate_dy_module(&k.algebra, &v).unwrap().is_valid());
    let m = DecorationMonoid::RootCone { rank: 2, cap: 2 };
    check_words(&k.algebra, &[v], &m, 6, 25);
}
