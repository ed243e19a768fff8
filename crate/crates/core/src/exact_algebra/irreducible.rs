//! Irreducibility over Q without a full factorization stack: a certificate is
//! produced or the polynomial is rejected.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::modp::factor_mod_p;
use super::poly::IntPolynomial;
use super::primes::{divisors, phi_inverse, primes_below};
use super::rational::{format_rational, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IrreducibilityCertificate {
    Linear,
    /// Degree 2 or 3 with no rational root.
    NoRationalRoot,
    /// Irreducible modulo a prime not dividing the leading coefficient.
    ModP { p: u64 },
    /// Factor degree patterns modulo these primes admit no common proper
    /// factor degree.
    DegreePatterns { primes: Vec<u64> },
    /// Equal to the n-th cyclotomic polynomial.
    Cyclotomic { n: u64 },
}

impl fmt::Display for IrreducibilityCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IrreducibilityCertificate::Linear => write!(f, "linear"),
            IrreducibilityCertificate::NoRationalRoot => write!(f, "no rational root (degree <= 3)"),
            IrreducibilityCertificate::ModP { p } => write!(f, "irreducible mod {p}"),
            IrreducibilityCertificate::DegreePatterns { primes } => write!(f, "degree patterns mod {primes:?}"),
            IrreducibilityCertificate::Cyclotomic { n } => write!(f, "cyclotomic polynomial Phi_{n}"),
        }
    }
}

/// The n-th cyclotomic polynomial by exact division of `x^n - 1`.
pub fn cyclotomic_polynomial(n: u64) -> IntPolynomial {
    assert!(n >= 1, "cyclotomic index must be positive");
    let mut c = vec![BigInt::zero(); n as usize + 1];
    c[0] = -BigInt::one();
    c[n as usize] = BigInt::one();
    let mut f = IntPolynomial::new(c);
    for d in 1..n {
        if n % d == 0 {
            f = f.div_exact_monic(&cyclotomic_polynomial(d)).expect("cyclotomic divisor");
        }
    }
    f
}

/// Some rational root of `f`, if one exists.
pub fn rational_root(f: &IntPolynomial) -> Option<Rational> {
    if f.degree() == 0 {
        return None;
    }
    if f.coeff(0).is_zero() {
        return Some(Rational::zero());
    }
    let fr = f.to_rat();
    let nums = divisors(&f.coeff(0));
    let dens = divisors(&f.leading());
    for d in &dens {
        for n in &nums {
            for s in [n.clone(), -n.clone()] {
                let q = Rational::new(s, d.clone());
                if fr.eval(&q).is_zero() {
                    return Some(q);
                }
            }
        }
    }
    None
}

/// Possible degrees of proper factors consistent with one factorization
/// pattern mod p.
fn subset_degrees(degs: &[usize], n: usize) -> BTreeSet<usize> {
    let mut sums = BTreeSet::from([0usize]);
    for &d in degs {
        let next: Vec<usize> = sums.iter().map(|s| s + d).collect();
        sums.extend(next);
    }
    sums.into_iter().filter(|&s| s > 0 && s < n).collect()
}

pub fn certify_irreducible(f: &IntPolynomial) -> Result<IrreducibilityCertificate> {
    let n = f.degree();
    if f.is_zero() || n == 0 {
        return Err(Error::NotIrreducible(format!("{f} is constant")));
    }
    if n == 1 {
        return Ok(IrreducibilityCertificate::Linear);
    }
    if !f.to_rat().is_squarefree() {
        return Err(Error::NotIrreducible(format!("{f} has a repeated factor")));
    }
    if let Some(r) = rational_root(f) {
        return Err(Error::NotIrreducible(format!("{f} has the rational root {}", format_rational(&r))));
    }
    if n <= 3 {
        return Ok(IrreducibilityCertificate::NoRationalRoot);
    }
    // no rational root rules out factors of degree 1 and n - 1
    let mut allowed: BTreeSet<usize> = (2..n - 1).collect();
    let mut used = vec![];
    let lead = f.leading();
    for p in primes_below(100) {
        if (&lead % BigInt::from(p)).is_zero() {
            continue;
        }
        let facs = factor_mod_p(f, p)?;
        if facs.iter().any(|(_, e)| *e > 1) {
            continue;
        }
        if facs.len() == 1 {
            return Ok(IrreducibilityCertificate::ModP { p });
        }
        let degs: Vec<usize> = facs.iter().map(|(g, _)| g.degree()).collect();
        let possible = subset_degrees(&degs, n);
        let before = allowed.len();
        allowed = allowed.intersection(&possible).copied().collect();
        if allowed.len() < before {
            used.push(p);
        }
        if allowed.is_empty() {
            return Ok(IrreducibilityCertificate::DegreePatterns { primes: used });
        }
    }
    if f.is_monic() {
        for m in phi_inverse(n as u64) {
            if cyclotomic_polynomial(m) == *f {
                return Ok(IrreducibilityCertificate::Cyclotomic { n: m });
            }
        }
    }
    Err(Error::Unverifiable(f.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn ip(cs: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64s(cs)
    }

    #[test]
    fn cyclotomic_values() {
        assert_eq!(cyclotomic_polynomial(1), ip(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(5), ip(&[1, 1, 1, 1, 1]));
        assert_eq!(cyclotomic_polynomial(8), ip(&[1, 0, 0, 0, 1]));
        assert_eq!(cyclotomic_polynomial(12), ip(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn certificates() {
        assert_eq!(certify_irreducible(&ip(&[-1, 1])).unwrap(), IrreducibilityCertificate::Linear);
        assert_eq!(certify_irreducible(&ip(&[1, 0, 1])).unwrap(), IrreducibilityCertificate::NoRationalRoot);
        assert_eq!(certify_irreducible(&ip(&[-2, 0, 0, 1])).unwrap(), IrreducibilityCertificate::NoRationalRoot);
        assert_eq!(certify_irreducible(&ip(&[1, 1, 1, 1, 1])).unwrap(), IrreducibilityCertificate::ModP { p: 2 });
        // x^4 + 1 splits modulo every prime
        assert_eq!(certify_irreducible(&ip(&[1, 0, 0, 0, 1])).unwrap(), IrreducibilityCertificate::Cyclotomic { n: 8 });
    }

    #[test]
    fn rejections() {
        assert!(matches!(certify_irreducible(&ip(&[-1, 0, 1])), Err(Error::NotIrreducible(_))));
        assert!(matches!(certify_irreducible(&ip(&[1, 2, 1])), Err(Error::NotIrreducible(_))));
        assert!(matches!(certify_irreducible(&ip(&[-2, 3])), Ok(IrreducibilityCertificate::Linear)));
        assert!(matches!(certify_irreducible(&ip(&[5])), Err(Error::NotIrreducible(_))));
        // (x^2+1)(x^2+2) has no rational root but is reducible
        assert!(matches!(certify_irreducible(&ip(&[2, 0, 3, 0, 1])), Err(Error::Unverifiable(_))));
        // x^4 - 10x^2 + 1 is irreducible yet splits into quadratics everywhere
        assert!(matches!(certify_irreducible(&ip(&[1, 0, -10, 0, 1])), Err(Error::Unverifiable(_))));
    }

    #[test]
    fn non_monic_rational_root() {
        assert_eq!(rational_root(&ip(&[-2, 3, 0, 3])), None);
        assert_eq!(rational_root(&ip(&[-1, 0, 4])).map(|q| q.abs()), Some(Rational::new(1.into(), 2.into())));
    }
}
