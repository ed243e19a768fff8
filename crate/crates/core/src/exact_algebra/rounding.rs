use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rational::Rational;

/// Nearest rational to `x` with denominator at most `bound`, found by walking
/// the Stern-Brocot tree in continued-fraction strides. Ties go to the
/// smaller denominator.
pub fn nearest_rational(x: &Rational, bound: u64) -> Rational {
    assert!(bound >= 1, "denominator bound must be positive");
    let max_den = BigInt::from(bound);
    if x.denom() <= &max_den {
        return x.clone();
    }
    if x.is_negative() {
        return -nearest_rational(&-x, bound);
    }
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let (mut n, mut d) = (x.numer().clone(), x.denom().clone());
    loop {
        let a = n.div_floor(&d);
        let q2 = &q0 + &a * &q1;
        if q2 > max_den {
            break;
        }
        let p2 = &p0 + &a * &p1;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let r = &n - &a * &d;
        n = std::mem::replace(&mut d, r);
    }
    let k = (&max_den - &q0) / &q1;
    let semi = Rational::new(&p0 + &k * &p1, &q0 + &k * &q1);
    let conv = Rational::new(p1, q1);
    let (ds, dc) = ((&semi - x).abs(), (&conv - x).abs());
    if dc < ds || (dc == ds && conv.denom() <= semi.denom()) {
        conv
    } else {
        semi
    }
}
