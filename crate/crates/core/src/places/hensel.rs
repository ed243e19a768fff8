//! p-adic valuations at unramified places through Hensel-lifted factors.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::exact_algebra::modp::FpPoly;
use crate::exact_algebra::rational::int_valuation;
use crate::exact_algebra::IntPolynomial;

fn mod_poly(f: &IntPolynomial, m: &BigInt) -> IntPolynomial {
    IntPolynomial::new(f.coeffs().iter().map(|c| c.mod_floor(m)).collect())
}

/// Remainder of `a` by the monic `g` over the integers.
pub fn rem_monic(a: &IntPolynomial, g: &IntPolynomial) -> IntPolynomial {
    let dg = g.degree();
    let mut r: Vec<BigInt> = a.coeffs().to_vec();
    while r.len() > dg && !r.is_empty() {
        let k = r.len() - 1;
        let c = r[k].clone();
        if !c.is_zero() {
            for (j, gc) in g.coeffs().iter().enumerate() {
                r[k - dg + j] -= &c * gc;
            }
        }
        r.pop();
    }
    IntPolynomial::new(r)
}

/// Lifts the monic factor `g` of the monic `f` (with `g` coprime to `f/g`
/// mod p) to a monic factor modulo `p^n`.
pub fn hensel_lift(f: &IntPolynomial, g: &FpPoly, n: u32) -> IntPolynomial {
    let p = g.modulus();
    let bp = BigInt::from(p);
    let fp = FpPoly::from_int(f, p);
    let (h0, r) = fp.divrem(g);
    assert!(r.is_zero(), "factor does not divide f mod p");
    let (one, _, t) = g.xgcd(&h0);
    assert!(one.is_one(), "factor is repeated mod p");
    let mut gz = g.to_int();
    let mut hz = h0.to_int();
    let mut pk = bp.clone();
    for _ in 1..n {
        let diff = f.sub(&gz.mul(&hz));
        let c = FpPoly::new(p, diff.coeffs().iter().map(|x| (x / &pk).mod_floor(&bp).try_into().expect("small")).collect());
        let (_, dg) = t.mul(&c).divrem(g);
        let (dh, rem) = c.sub(&dg.mul(&h0)).divrem(g);
        debug_assert!(rem.is_zero());
        gz = gz.add(&dg.to_int().scale(&pk));
        hz = hz.add(&dh.to_int().scale(&pk));
        pk *= &bp;
        gz = mod_poly(&gz, &pk);
        hz = mod_poly(&hz, &pk);
    }
    gz
}

/// `v_p(A(beta))` for a root `beta` of the lift `g_lift` of an irreducible
/// factor, read from `A mod g_lift` modulo `p^n`; `None` when every
/// coefficient vanishes to that precision.
pub fn valuation_at_root(a: &IntPolynomial, g_lift: &IntPolynomial, p: u64, n: u32) -> Option<u32> {
    let pn = num_traits::pow(BigInt::from(p), n as usize);
    let r = mod_poly(&rem_monic(a, g_lift), &pn);
    r.coeffs().iter().filter(|c| !c.is_zero()).map(|c| int_valuation(c, p)).min()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ip(cs: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64s(cs)
    }

    #[test]
    fn lifted_root_of_x2_plus_1_mod_5() {
        let f = ip(&[1, 0, 1]);
        let g = FpPoly::new(5, vec![2, 1]);
        let n = 12;
        let gl = hensel_lift(&f, &g, n);
        let pn = num_traits::pow(BigInt::from(5), n as usize);
        // g = x + c: -c is a square root of -1 modulo 5^n
        let root = (-gl.coeff(0)).mod_floor(&pn);
        assert_eq!((&root * &root + BigInt::from(1)).mod_floor(&pn), BigInt::zero());
        assert_eq!(root.mod_floor(&BigInt::from(5)), BigInt::from(3));
    }

    #[test]
    fn valuations_in_gaussian_integers() {
        let f = ip(&[1, 0, 1]);
        let gl = hensel_lift(&f, &FpPoly::new(5, vec![2, 1]), 20);
        // the place is x = 3 mod 5, so 2 + x vanishes there and 2 - x does not
        assert_eq!(valuation_at_root(&ip(&[2, 1]), &gl, 5, 20), Some(1));
        assert_eq!(valuation_at_root(&ip(&[2, -1]), &gl, 5, 20), Some(0));
        assert_eq!(valuation_at_root(&ip(&[25]), &gl, 5, 20), Some(2));
    }
}
