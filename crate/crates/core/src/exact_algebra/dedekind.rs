use num_bigint::BigInt;
use num_traits::Zero;

use super::modp::{factor_mod_p, FpPoly};
use super::poly::IntPolynomial;
use super::primes::is_prime;
use super::resultant::discriminant;
use crate::error::{Error, Result};

/// Dedekind's criterion: whether `Z[x]/(f)` is maximal at `p`.
pub fn dedekind_maximal_at_p(f: &IntPolynomial, p: u64) -> Result<bool> {
    if !f.is_monic() {
        return Err(Error::NotMonic);
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let disc = discriminant(f)?;
    if !(disc.numer() % BigInt::from(p)).is_zero() {
        return Ok(true);
    }
    let factors = factor_mod_p(f, p)?;
    let mut g = FpPoly::one(p);
    let mut h = FpPoly::one(p);
    for (gi, e) in &factors {
        g = g.mul(gi);
        for _ in 1..*e {
            h = h.mul(gi);
        }
    }
    let (gz, hz) = (g.to_int(), h.to_int());
    let diff = gz.mul(&hz).sub(f);
    let bp = BigInt::from(p);
    let lifted = IntPolynomial::new(diff.coeffs().iter().map(|c| c / &bp).collect());
    let big_f = FpPoly::from_int(&lifted, p);
    let d = big_f.gcd(&g).gcd(&h);
    Ok(d.degree() == 0)
}
