//! Step functions on the places of a tower level, the map `a -> f_a`, its
//! norms, the S-unit matrix and the approximation engine.

mod approx;
mod step;
mod sunit;

pub use approx::{approximate, ApproxRecord, ApproxSolution};
pub use step::{
    embed_fa, function_from_json, integral, linear_combine, lp_norm, place_of_id, refine, FunctionTable, LpExponent,
    StepCell, StepFunction, TableEntry,
};
pub use sunit::{angle_to_ones, rational_s, sunit_matrix, SUnitMatrix, SUnitRecord};

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::error::Error;
    use crate::exact_algebra::quadratic::fundamental_unit;
    use crate::exact_algebra::{rat, rat_int, Rational, Real};
    use crate::number_fields::{FieldElement, NumberField};
    use crate::place_tower::Tower;
    use crate::places::{arch_places, RationalPlace};

    fn q_tower() -> Tower {
        Tower::new(vec![NumberField::rationals()], vec![]).unwrap()
    }

    fn qi_tower() -> Tower {
        let qi = NumberField::quadratic(0, 1, "Q(i)").unwrap();
        Tower::new(vec![NumberField::rationals(), qi.clone()], vec![FieldElement::zero(&qi)]).unwrap()
    }

    fn int(t: &Tower, n: i64) -> FieldElement {
        FieldElement::from_int(t.level(0).unwrap(), n)
    }

    fn near(x: &Real, y: f64) -> bool {
        (x.to_f64() - y).abs() < 1e-14
    }

    const L2: f64 = std::f64::consts::LN_2;

    #[test]
    fn f_of_two_and_gaussian() {
        let t = q_tower();
        let f2 = embed_fa(&t, 0, &int(&t, 2)).unwrap();
        assert_eq!(f2.support(), vec![RationalPlace::Infinity, RationalPlace::Prime(2)]);
        assert!(near(&f2.value(RationalPlace::Infinity, "arch:r0"), L2));
        assert!(near(&f2.value(RationalPlace::Prime(2), "fin:2:0.1"), -L2));
        assert!(embed_fa(&t, 0, &int(&t, 1)).unwrap().is_zero());

        let u = qi_tower();
        let a = u.level(1).unwrap().element("2+t").unwrap();
        let f = embed_fa(&u, 1, &a).unwrap();
        assert!(near(&f.value(RationalPlace::Infinity, "arch:c0"), 0.5 * 5f64.ln()));
        assert!(near(&f.value(RationalPlace::Prime(5), "fin:5:2.1"), -5f64.ln()));
        assert!(near(&f.value(RationalPlace::Prime(5), "fin:5:3.1"), 0.0));
        assert!(integral(&f).to_f64().abs() < 1e-30);
    }

    #[test]
    fn integrals_and_norms() {
        let u = qi_tower();
        let bits = 192;
        let ind: BTreeMap<RationalPlace, BTreeMap<String, Real>> = [(
            RationalPlace::Prime(5),
            [("fin:5:2.1".to_string(), Real::one(bits)), ("fin:5:3.1".to_string(), Real::zero(bits))].into(),
        )]
        .into();
        let f = StepFunction::from_values(&u, 1, &ind).unwrap();
        assert_eq!(integral(&f).to_rational(), rat(1, 2));
        assert!(integral(&StepFunction::zero(&u, 1)).is_zero());

        let t = q_tower();
        let f2 = embed_fa(&t, 0, &int(&t, 2)).unwrap();
        assert!(near(&lp_norm(&f2, LpExponent::Finite(1.0)).unwrap(), 2.0 * L2));
        assert!(near(&lp_norm(&f2, LpExponent::Finite(2.0)).unwrap(), 2f64.sqrt() * L2));
        assert!(near(&lp_norm(&f2, LpExponent::Infinity).unwrap(), L2));
        assert!(near(&lp_norm(&f2, LpExponent::Finite(3.5)).unwrap(), 2f64.powf(1.0 / 3.5) * L2));
        assert!(lp_norm(&StepFunction::zero(&t, 0), LpExponent::Finite(2.0)).unwrap().is_zero());
        assert_eq!(LpExponent::new(0.5).unwrap_err(), Error::BadExponent("0.5".into()));
        assert!(matches!(lp_norm(&f2, LpExponent::Finite(0.0)), Err(Error::BadExponent(_))));
    }

    #[test]
    fn combinations() {
        let t = q_tower();
        let f = |n| embed_fa(&t, 0, &int(&t, n)).unwrap();
        let g = linear_combine(&[(rat_int(1), f(2)), (rat_int(1), f(3))]).unwrap();
        let six = f(6);
        for (v, c) in six.cells() {
            assert!((g.value(v, &c.place_id).to_f64() - c.value.to_f64()).abs() < 1e-30);
        }
        assert!(near(&g.value(RationalPlace::Prime(3), "fin:3:0.1"), -3f64.ln()));
        let third = linear_combine(&[(rat(1, 3), f(2))]).unwrap();
        assert!(near(&third.value(RationalPlace::Infinity, "arch:r0"), L2 / 3.0));
        assert!(near(&lp_norm(&third, LpExponent::Finite(1.0)).unwrap(), 2.0 * L2 / 3.0));
        assert!(linear_combine(&[]).unwrap().is_zero());
        let cancel = linear_combine(&[(rat_int(1), f(2)), (rat_int(-1), f(2))]).unwrap();
        assert!(cancel.is_zero());
        let u = qi_tower();
        let h = embed_fa(&u, 1, &u.level(1).unwrap().element("2").unwrap()).unwrap();
        assert_eq!(linear_combine(&[(rat_int(1), f(2)), (rat_int(1), h)]).unwrap_err(), Error::LevelMismatch);
    }

    #[test]
    fn refinement_keeps_values_and_norms() {
        let u = qi_tower();
        let f2 = embed_fa(&u, 0, &int(&u, 2)).unwrap();
        let r = refine(&f2, 1).unwrap();
        assert!(near(&r.value(RationalPlace::Prime(2), "fin:2:1.1"), -L2));
        let direct = embed_fa(&u, 1, &u.level(1).unwrap().element("2").unwrap()).unwrap();
        for (v, c) in direct.cells() {
            assert!((r.value(v, &c.place_id).to_f64() - c.value.to_f64()).abs() < 1e-30);
        }
        for p in [LpExponent::Finite(1.0), LpExponent::Finite(2.0), LpExponent::Infinity] {
            assert!((lp_norm(&r, p).unwrap().to_f64() - lp_norm(&f2, p).unwrap().to_f64()).abs() < 1e-30);
        }
        assert!(refine(&StepFunction::zero(&u, 0), 1).unwrap().is_zero());
    }

    #[test]
    fn sunit_matrices() {
        let s = rational_s(&[2, 3], 128).unwrap();
        let q = NumberField::rationals();
        let m = sunit_matrix(&q, &s, &[FieldElement::from_int(&q, 2), FieldElement::from_int(&q, 3)], 128).unwrap();
        assert_eq!(m.rank, 2);
        assert!(near(&m.entries[0][0], L2) && near(&m.entries[0][1], -L2) && m.entries[0][2].is_zero());
        assert!(near(&m.entries[1][2], -3f64.ln()));
        assert_eq!(m.nullspace_basis.len(), 1);
        assert!(m.max_nullspace_angle() < 1e-10);
        let bad = sunit_matrix(&q, &s, &[FieldElement::from_int(&q, 2), FieldElement::from_int(&q, 5)], 128);
        assert_eq!(bad.unwrap_err(), Error::NotAnSUnit("fin:5:0.1 (generator 5)".into()));

        let s2 = rational_s(&[2], 128).unwrap();
        let m = sunit_matrix(&q, &s2, &[FieldElement::from_int(&q, 2)], 128).unwrap();
        assert_eq!(m.rank, 1);

        let k = NumberField::quadratic(0, -2, "Q(sqrt2)").unwrap();
        let eps = fundamental_unit(&2.into()).unwrap();
        let xi = FieldElement::from_coords(&k, vec![eps.a.clone(), eps.b.clone()]).unwrap();
        let m = sunit_matrix(&k, &arch_places(&k, 128).unwrap(), &[xi], 128).unwrap();
        let l = (1.0 + 2f64.sqrt()).ln();
        assert!(near(&m.entries[0][0], -l) && near(&m.entries[0][1], l));
        assert_eq!(m.rank, 1);
        assert!(m.max_nullspace_angle() < 1e-10);
    }

    fn q_target(t: &Tower, vals: &[(RationalPlace, &str, f64)]) -> StepFunction {
        let bits = 192;
        let mut m: BTreeMap<RationalPlace, BTreeMap<String, Real>> = BTreeMap::new();
        for (v, id, x) in vals {
            m.entry(*v).or_default().insert(id.to_string(), Real::from_f64(*x, bits));
        }
        StepFunction::from_values(t, 0, &m).unwrap()
    }

    #[test]
    fn exact_recovery_and_gate() {
        let t = q_tower();
        let f2 = embed_fa(&t, 0, &int(&t, 2)).unwrap();
        let sol = approximate(&f2, &[int(&t, 2), int(&t, 3)], 100, 128).unwrap();
        assert_eq!(sol.coefficients, vec![rat_int(1), rat_int(0)]);
        assert!(sol.residual_l1.is_zero() && sol.residual_l2.is_zero());
        let c = q_target(&t, &[(RationalPlace::Infinity, "arch:r0", L2)]);
        assert!(matches!(approximate(&c, &[int(&t, 2)], 100, 128), Err(Error::NotInX(_))));
        assert_eq!(approximate(&f2, &[], 100, 128).unwrap_err(), Error::EmptyBasis);
    }

    /// Best L2 rounding by brute force over every denominator up to `bound`.
    fn brute_best(bound: i64) -> (Rational, f64) {
        let mut best = (rat_int(0), f64::INFINITY);
        for q in 1..=bound {
            let p0 = (q as f64 / L2).floor() as i64;
            for p in [p0, p0 + 1] {
                let r = rat(p, q);
                let c = p as f64 / q as f64;
                let err = 2.0 * (1.0 - c * L2).powi(2);
                if err < best.1 - 1e-18 {
                    best = (r, err);
                }
            }
        }
        best
    }

    #[test]
    fn rounded_reciprocal_log_two() {
        let t = q_tower();
        let target = q_target(&t, &[(RationalPlace::Infinity, "arch:r0", 1.0), (RationalPlace::Prime(2), "fin:2:0.1", -1.0)]);
        let sol = approximate(&target, &[int(&t, 2)], 100, 128).unwrap();
        let (oracle, _) = brute_best(100);
        assert_eq!(sol.coefficients[0], oracle);
        assert_eq!(oracle, rat(88, 61));
        let c = 88.0 / 61.0;
        assert!((sol.residual_l1.to_f64() - 2.0 * (1.0 - c * L2).abs()).abs() < 1e-12);
        assert!(sol.residual_l2_unrounded < 1e-12);
    }
}
