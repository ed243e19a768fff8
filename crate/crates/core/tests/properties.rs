use proptest::prelude::*;
use weilspace::exact_algebra::{rat, rat_int, Real};
use weilspace::height_space::{embed_fa, integral, linear_combine, lp_norm, refine, LpExponent, StepFunction};
use weilspace::number_fields::{FieldElement, NumberField};
use weilspace::place_tower::Tower;
use weilspace::places::{height, height_mahler};

const PREC: u32 = 128;

fn qi() -> NumberField {
    NumberField::quadratic(0, 1, "Q(i)").unwrap()
}

fn qi_tower() -> Tower {
    let k = qi();
    Tower::new(vec![NumberField::rationals(), k.clone()], vec![FieldElement::zero(&k)]).unwrap()
}

fn gaussian(k: &NumberField, a: i64, b: i64, d: i64) -> FieldElement {
    FieldElement::from_coords(k, vec![rat(a, d), rat(b, d)]).unwrap()
}

fn small() -> impl Strategy<Value = (i64, i64, i64)> {
    (-30i64..=30, -30i64..=30, 1i64..=12).prop_filter("nonzero", |(a, b, _)| *a != 0 || *b != 0)
}

fn tol() -> Real {
    Real::from_f64(1e-25, 256)
}

fn max_gap(f: &StepFunction, g: &StepFunction) -> Real {
    f.cells()
        .chain(g.cells())
        .map(|(v, c)| (&f.value(v, &c.place_id) - &g.value(v, &c.place_id)).abs())
        .fold(Real::zero(256), |m, x| m.max(&x))
}

fn h(a: &FieldElement) -> Real {
    height(a, PREC).unwrap().value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn product_becomes_sum((a, b, d) in small(), (c, e, f) in small()) {
        let t = qi_tower();
        let k = t.level(1).unwrap().clone();
        let (x, y) = (gaussian(&k, a, b, d), gaussian(&k, c, e, f));
        let fxy = embed_fa(&t, 1, &x.mul(&y).unwrap()).unwrap();
        let sum = linear_combine(&[(rat_int(1), embed_fa(&t, 1, &x).unwrap()), (rat_int(1), embed_fa(&t, 1, &y).unwrap())]).unwrap();
        prop_assert!(max_gap(&fxy, &sum) < tol());
    }

    #[test]
    fn norm_is_twice_height_and_mass_vanishes((a, b, d) in small()) {
        let t = qi_tower();
        let x = gaussian(t.level(1).unwrap(), a, b, d);
        let f = embed_fa(&t, 1, &x).unwrap();
        let two_h = &height_mahler(&x, PREC).unwrap().value * &Real::from_i64(2, 256);
        prop_assert!((&lp_norm(&f, LpExponent::Finite(1.0)).unwrap() - &two_h).abs() < tol());
        prop_assert!(integral(&f).abs() < tol());
    }

    #[test]
    fn inverse_has_same_height((a, b, d) in small()) {
        let x = gaussian(&qi(), a, b, d);
        prop_assert!((&h(&x) - &h(&x.inv().unwrap())).abs() < tol());
    }

    #[test]
    fn height_is_subadditive((a, b, d) in small(), (c, e, f) in small()) {
        let k = qi();
        let (x, y) = (gaussian(&k, a, b, d), gaussian(&k, c, e, f));
        let bound = &h(&x) + &h(&y);
        prop_assert!(h(&x.mul(&y).unwrap()) <= &bound + &tol());
        let s = x.add(&y).unwrap();
        if !s.is_zero() {
            let ln2 = Real::from_i64(2, 256).ln();
            prop_assert!(h(&s) <= &(&bound + &ln2) + &tol());
        }
    }

    #[test]
    fn roots_of_unity_do_not_change_height(c in prop::collection::vec(-6i64..=6, 4), k in 0i64..5) {
        prop_assume!(c.iter().any(|x| *x != 0));
        let z5 = NumberField::cyclotomic(5).unwrap();
        let x = FieldElement::from_coords(&z5, c.iter().map(|n| rat_int(*n)).collect()).unwrap();
        let zeta = FieldElement::generator(&z5).pow(k).unwrap();
        prop_assert!((&h(&x) - &h(&x.mul(&zeta).unwrap())).abs() < tol());
    }

    #[test]
    fn scalars_pull_out_of_norms((a, b, d) in small(), r in -50i64..=50, s in 1i64..=50, p in 0usize..4) {
        prop_assume!(r != 0);
        let t = qi_tower();
        let f = embed_fa(&t, 1, &gaussian(t.level(1).unwrap(), a, b, d)).unwrap();
        let p = [LpExponent::Finite(1.0), LpExponent::Finite(2.0), LpExponent::Finite(2.5), LpExponent::Infinity][p];
        let q = rat(r, s);
        let lhs = lp_norm(&linear_combine(&[(q.clone(), f.clone())]).unwrap(), p).unwrap();
        let rhs = &Real::from_rational(&q, 256).abs() * &lp_norm(&f, p).unwrap();
        prop_assert!((&lhs - &rhs).abs() < tol());
    }

    #[test]
    fn refinement_preserves_norms(n in -500i64..=500, m in 1i64..=500) {
        prop_assume!(n != 0);
        let t = qi_tower();
        let x = FieldElement::from_rational(t.level(0).unwrap(), rat(n, m));
        let f = embed_fa(&t, 0, &x).unwrap();
        let r = refine(&f, 1).unwrap();
        let direct = embed_fa(&t, 1, &t.embed(&x, 0, 1).unwrap()).unwrap();
        prop_assert!(max_gap(&r, &direct) < tol());
        for p in [LpExponent::Finite(1.0), LpExponent::Finite(3.0), LpExponent::Infinity] {
            prop_assert!((&lp_norm(&r, p).unwrap() - &lp_norm(&f, p).unwrap()).abs() < tol());
        }
        prop_assert!((&integral(&r) - &integral(&f)).abs() < tol());
    }
}
