use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::poly::IntPolynomial;
use super::rational::Rational;
use crate::error::{Error, Result};

/// Determinant of a square integer matrix by fraction-free Bareiss elimination.
pub fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = 1;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

fn sylvester(f: &IntPolynomial, g: &IntPolynomial) -> Vec<Vec<BigInt>> {
    let (m, n) = (f.degree(), g.degree());
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    // coefficients highest degree first
    let fc: Vec<BigInt> = f.coeffs().iter().rev().cloned().collect();
    let gc: Vec<BigInt> = g.coeffs().iter().rev().cloned().collect();
    for i in 0..n {
        let mut row = vec![BigInt::zero(); size];
        for (j, c) in fc.iter().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![BigInt::zero(); size];
        for (j, c) in gc.iter().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    rows
}

/// Resultant as the Sylvester determinant. A zero operand against a nonzero
/// one gives 0.
pub fn resultant(f: &IntPolynomial, g: &IntPolynomial) -> Result<Rational> {
    match (f.is_zero(), g.is_zero()) {
        (true, true) => return Err(Error::BothZero),
        (true, false) | (false, true) => return Ok(Rational::zero()),
        _ => {}
    }
    Ok(Rational::from_integer(bareiss_det(sylvester(f, g))))
}

/// Discriminant `(-1)^(n(n-1)/2) Res(f, f') / lc(f)`.
pub fn discriminant(f: &IntPolynomial) -> Result<Rational> {
    let n = f.degree();
    if n == 0 {
        return Ok(Rational::one());
    }
    let r = resultant(f, &f.derivative())? / Rational::from_integer(f.leading());
    Ok(if (n * (n - 1) / 2) % 2 == 1 { -r } else { r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::rational::rat_int;

    fn ip(cs: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64s(cs)
    }

    #[test]
    fn documented_values() {
        assert_eq!(resultant(&ip(&[-2, 0, 1]), &ip(&[-3, 1])).unwrap(), rat_int(7));
        assert_eq!(resultant(&ip(&[5, 4, 3, 1]), &ip(&[1])).unwrap(), rat_int(1));
        assert_eq!(resultant(&ip(&[1, 0, 1]), &ip(&[0, 1])).unwrap(), rat_int(1));
        assert_eq!(resultant(&IntPolynomial::zero(), &IntPolynomial::zero()), Err(Error::BothZero));
    }

    #[test]
    fn constant_power_rule() {
        assert_eq!(resultant(&ip(&[1, 2, 3]), &ip(&[5])).unwrap(), rat_int(25));
    }

    #[test]
    fn discriminants() {
        assert_eq!(discriminant(&ip(&[1, 0, 1])).unwrap(), rat_int(-4));
        assert_eq!(discriminant(&ip(&[-5, 0, 1])).unwrap(), rat_int(20));
        assert_eq!(discriminant(&ip(&[1, 1, 1, 1, 1])).unwrap(), rat_int(125));
        assert_eq!(discriminant(&ip(&[1, 0, 0, 0, 1])).unwrap(), rat_int(256));
    }

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        fn cof(m: &[Vec<BigInt>]) -> BigInt {
            if m.len() == 1 {
                return m[0][0].clone();
            }
            let mut acc = BigInt::zero();
            for j in 0..m.len() {
                let minor: Vec<Vec<BigInt>> =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, v)| v.clone()).collect()).collect();
                let t = &m[0][j] * cof(&minor);
                acc += if j % 2 == 0 { t } else { -t };
            }
            acc
        }
        let m: Vec<Vec<BigInt>> = [[0, 2, -1, 3], [4, 0, 5, 1], [-2, 7, 0, 0], [1, 1, 1, 1]]
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        assert_eq!(bareiss_det(m.clone()), cof(&m));
    }
}
