use std::fmt;

use num_traits::{One, Zero};

use super::NumberField;
use crate::error::{Error, Result};
use crate::exact_algebra::primes::phi_inverse;
use crate::exact_algebra::real::eval_rational_poly;
use crate::exact_algebra::{complex_roots, Complex, IntPolynomial, RatPolynomial, Rational, Real};

/// `sum coords[i] * t^i` with `t` the field generator.
#[derive(Clone)]
pub struct FieldElement {
    field: NumberField,
    coords: Vec<Rational>,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &FieldElement) -> bool {
        self.field == other.field && self.coords == other.coords
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in {}", self, self.field.label())
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_poly().display_in("t"))
    }
}

fn reduce(field: &NumberField, p: &RatPolynomial) -> Vec<Rational> {
    let r = p.rem(field.min_rat());
    let d = field.degree();
    (0..d).map(|i| r.coeff(i)).collect()
}

impl FieldElement {
    pub fn from_coords(field: &NumberField, coords: Vec<Rational>) -> Result<FieldElement> {
        if coords.len() != field.degree() {
            return Err(Error::BadShape(format!("expected {} coordinates, got {}", field.degree(), coords.len())));
        }
        Ok(FieldElement { field: field.clone(), coords })
    }

    pub fn from_poly(field: &NumberField, p: &RatPolynomial) -> FieldElement {
        FieldElement { field: field.clone(), coords: reduce(field, p) }
    }

    pub fn from_rational(field: &NumberField, q: Rational) -> FieldElement {
        FieldElement::from_poly(field, &RatPolynomial::constant(q))
    }

    pub fn from_int(field: &NumberField, n: i64) -> FieldElement {
        FieldElement::from_rational(field, Rational::from_integer(n.into()))
    }

    pub fn zero(field: &NumberField) -> FieldElement {
        FieldElement::from_int(field, 0)
    }

    pub fn one(field: &NumberField) -> FieldElement {
        FieldElement::from_int(field, 1)
    }

    pub fn generator(field: &NumberField) -> FieldElement {
        FieldElement::from_poly(field, &RatPolynomial::x())
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn to_poly(&self) -> RatPolynomial {
        RatPolynomial::new(self.coords.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        *self == FieldElement::one(&self.field)
    }

    /// The rational value when the element lies in Q.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.coords.iter().skip(1).all(|c| c.is_zero()) {
            Some(self.coords.first().cloned().unwrap_or_else(Rational::zero))
        } else {
            None
        }
    }

    fn check(&self, o: &FieldElement) -> Result<()> {
        if self.field == o.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn add(&self, o: &FieldElement) -> Result<FieldElement> {
        self.check(o)?;
        let coords = self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect();
        Ok(FieldElement { field: self.field.clone(), coords })
    }

    pub fn sub(&self, o: &FieldElement) -> Result<FieldElement> {
        self.check(o)?;
        let coords = self.coords.iter().zip(&o.coords).map(|(a, b)| a - b).collect();
        Ok(FieldElement { field: self.field.clone(), coords })
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement { field: self.field.clone(), coords: self.coords.iter().map(|a| -a).collect() }
    }

    pub fn mul(&self, o: &FieldElement) -> Result<FieldElement> {
        self.check(o)?;
        Ok(FieldElement::from_poly(&self.field, &self.to_poly().mul(&o.to_poly())))
    }

    pub fn scale(&self, q: &Rational) -> FieldElement {
        FieldElement { field: self.field.clone(), coords: self.coords.iter().map(|a| a * q).collect() }
    }

    pub fn inv(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (g, s, _) = self.to_poly().xgcd(self.field.min_rat());
        debug_assert!(g.degree() == 0, "defining polynomial is irreducible");
        Ok(FieldElement::from_poly(&self.field, &s))
    }

    pub fn div(&self, o: &FieldElement) -> Result<FieldElement> {
        self.check(o)?;
        self.mul(&o.inv()?)
    }

    /// Integer power; negative exponents invert first.
    pub fn pow(&self, e: i64) -> Result<FieldElement> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut n = e.unsigned_abs();
        let mut acc = FieldElement::one(&self.field);
        let mut b = base;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&b)?;
            }
            b = b.mul(&b)?;
            n >>= 1;
        }
        Ok(acc)
    }

    /// `p(self)` computed in the field.
    pub fn eval_poly(&self, p: &RatPolynomial) -> FieldElement {
        let mut acc = FieldElement::zero(&self.field);
        for c in p.coeffs().iter().rev() {
            acc = acc.mul(self).expect("same field").add(&FieldElement::from_rational(&self.field, c.clone())).expect("same field");
        }
        acc
    }

    /// Matrix of multiplication by `self` in the power basis; column j holds
    /// the coordinates of `self * t^j`.
    pub fn mult_matrix(&self) -> Vec<Vec<Rational>> {
        let d = self.field.degree();
        let mut cols = Vec::with_capacity(d);
        let t = FieldElement::generator(&self.field);
        let mut cur = self.clone();
        for _ in 0..d {
            cols.push(cur.coords.clone());
            cur = cur.mul(&t).expect("same field");
        }
        (0..d).map(|i| (0..d).map(|j| cols[j][i].clone()).collect()).collect()
    }

    /// Characteristic polynomial of multiplication by `self` (monic, degree d),
    /// by the Faddeev-LeVerrier recursion.
    pub fn char_poly(&self) -> RatPolynomial {
        let a = self.mult_matrix();
        let n = a.len();
        let mut c = vec![Rational::zero(); n + 1];
        c[n] = Rational::one();
        let mut m = vec![vec![Rational::zero(); n]; n];
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{n-k+1} I
            let mut next = matmul(&a, &m);
            for (i, row) in next.iter_mut().enumerate() {
                row[i] += &c[n - k + 1];
            }
            m = next;
            let am = matmul(&a, &m);
            let tr: Rational = (0..n).map(|i| am[i][i].clone()).fold(Rational::zero(), |x, y| x + y);
            c[n - k] = -tr / Rational::from_integer((k as i64).into());
        }
        RatPolynomial::new(c)
    }

    /// Monic minimal polynomial over Q.
    pub fn min_poly_monic(&self) -> RatPolynomial {
        self.char_poly().squarefree_part()
    }

    /// Minimal polynomial cleared to a primitive integer polynomial with
    /// positive leading coefficient, e.g. `2x - 7` for `7/2`.
    pub fn min_poly(&self) -> IntPolynomial {
        self.min_poly_monic().to_primitive_int()
    }

    pub fn norm(&self) -> Rational {
        let c0 = self.char_poly().coeff(0);
        if self.field.degree() % 2 == 1 {
            -c0
        } else {
            c0
        }
    }

    pub fn trace(&self) -> Rational {
        let d = self.field.degree();
        -self.char_poly().coeff(d - 1)
    }

    /// Value under the embedding sending `t` to `root`.
    pub fn embed(&self, root: &Complex) -> Complex {
        eval_rational_poly(&self.coords, root)
    }

    /// Whether `self` is a root of unity. The minimal polynomial must be
    /// monic integral with every root on or inside the unit circle; the
    /// answer is then confirmed exactly by checking `self^n = 1` for the
    /// orders `n` compatible with its degree.
    pub fn is_torsion(&self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::ZeroElement);
        }
        let m = self.min_poly_monic();
        let Some(mi) = m.to_int() else {
            return Ok(false);
        };
        if !mi.coeff(0).magnitude().is_one() {
            return Ok(false);
        }
        let bits = 128;
        let roots = complex_roots(&mi, bits)?;
        let limit = Real::one(256) + Real::pow2(-40, 256);
        for r in roots.iter() {
            if &r.center().abs() - &r.radius > limit {
                return Ok(false);
            }
        }
        for n in phi_inverse(mi.degree() as u64) {
            if self.pow(n as i64)?.is_one() {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

fn matmul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut s = Rational::zero();
                    for k in 0..n {
                        if !a[i][k].is_zero() && !b[k][j].is_zero() {
                            s += &a[i][k] * &b[k][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::{rat, rat_int};
    use crate::number_fields::poly;

    fn qi() -> NumberField {
        NumberField::quadratic(0, 1, "Q(i)").unwrap()
    }

    #[test]
    fn documented_arithmetic() {
        let k = qi();
        let t = FieldElement::generator(&k);
        let one = FieldElement::one(&k);
        assert_eq!(one.add(&t).unwrap().mul(&one.sub(&t).unwrap()).unwrap(), FieldElement::from_int(&k, 2));
        assert_eq!(one.div(&t).unwrap(), t.neg());
        assert_eq!(t.add(&FieldElement::zero(&k)).unwrap(), t);
        assert_eq!(one.div(&FieldElement::zero(&k)), Err(Error::DivisionByZero));
        let q = NumberField::rationals();
        assert_eq!(t.add(&FieldElement::one(&q)), Err(Error::FieldMismatch));
    }

    #[test]
    fn minimal_polynomials() {
        let k = qi();
        let a = k.element("2+t").unwrap();
        assert_eq!(a.min_poly(), poly(&[5, -4, 1]));
        let r = FieldElement::from_rational(&k, rat(7, 2));
        assert_eq!(r.min_poly(), poly(&[-7, 2]));
        assert_eq!(r.min_poly_monic(), RatPolynomial::new(vec![rat(-7, 2), rat_int(1)]));
        let s2 = NumberField::quadratic(0, -2, "Q(sqrt2)").unwrap();
        assert_eq!(FieldElement::generator(&s2).min_poly(), poly(&[-2, 0, 1]));
    }

    #[test]
    fn norms() {
        let k = qi();
        assert_eq!(k.element("2+t").unwrap().norm(), rat_int(5));
        let z5 = NumberField::cyclotomic(5).unwrap();
        assert_eq!(FieldElement::from_rational(&z5, rat(2, 3)).norm(), rat(16, 81));
        let s2 = NumberField::quadratic(0, -2, "Q(sqrt2)").unwrap();
        assert_eq!(FieldElement::generator(&s2).norm(), rat_int(-2));
    }

    #[test]
    fn torsion() {
        let k = qi();
        assert!(FieldElement::generator(&k).is_torsion().unwrap());
        assert!(!FieldElement::from_int(&NumberField::rationals(), 2).is_torsion().unwrap());
        let s5 = NumberField::quadratic(0, -5, "Q(sqrt5)").unwrap();
        assert!(!s5.element("(1+t)/2").unwrap().is_torsion().unwrap());
        let z5 = NumberField::cyclotomic(5).unwrap();
        assert!(z5.element("-t^3").unwrap().is_torsion().unwrap());
        // (3+4i)/5 has modulus one but is not a root of unity
        assert!(!k.element("(3+4t)/5").unwrap().is_torsion().unwrap());
        assert_eq!(FieldElement::zero(&k).is_torsion(), Err(Error::ZeroElement));
    }
}
