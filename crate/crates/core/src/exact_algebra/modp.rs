//! Polynomials over the prime field F_p and their factorization
//! (squarefree decomposition, distinct-degree, then Cantor-Zassenhaus
//! equal-degree splitting).

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use super::poly::IntPolynomial;
use super::primes::is_prime;
use crate::error::{Error, Result};

/// Polynomial over F_p with coefficients in `[0, p)`, lowest degree first,
/// no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpPoly {
    p: u64,
    c: Vec<u64>,
}

fn mulm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn addm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

fn subm(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        ((a as u128 + p as u128 - b as u128) % p as u128) as u64
    }
}

fn powm(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulm(r, b, p);
        }
        b = mulm(b, b, p);
        e >>= 1;
    }
    r
}

fn invm(a: u64, p: u64) -> u64 {
    assert!(a % p != 0, "inverse of zero mod {p}");
    powm(a, p - 2, p)
}

/// Reduces an integer into `[0, p)`.
pub fn reduce_int(c: &BigInt, p: u64) -> u64 {
    c.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits")
}

impl FpPoly {
    pub fn new(p: u64, mut c: Vec<u64>) -> FpPoly {
        for x in c.iter_mut() {
            *x %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        FpPoly { p, c }
    }

    pub fn from_int(f: &IntPolynomial, p: u64) -> FpPoly {
        FpPoly::new(p, f.coeffs().iter().map(|c| reduce_int(c, p)).collect())
    }

    pub fn zero(p: u64) -> FpPoly {
        FpPoly { p, c: vec![] }
    }

    pub fn one(p: u64) -> FpPoly {
        FpPoly::new(p, vec![1])
    }

    pub fn x(p: u64) -> FpPoly {
        FpPoly::new(p, vec![0, 1])
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c == [1]
    }

    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn leading(&self) -> u64 {
        self.c.last().copied().unwrap_or(0)
    }

    fn coeff(&self, i: usize) -> u64 {
        self.c.get(i).copied().unwrap_or(0)
    }

    /// Lift with coefficients in `[0, p)`.
    pub fn to_int(&self) -> IntPolynomial {
        IntPolynomial::new(self.c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn add(&self, o: &FpPoly) -> FpPoly {
        let n = self.c.len().max(o.c.len());
        FpPoly::new(self.p, (0..n).map(|i| addm(self.coeff(i), o.coeff(i), self.p)).collect())
    }

    pub fn sub(&self, o: &FpPoly) -> FpPoly {
        let n = self.c.len().max(o.c.len());
        FpPoly::new(self.p, (0..n).map(|i| subm(self.coeff(i), o.coeff(i), self.p)).collect())
    }

    pub fn mul(&self, o: &FpPoly) -> FpPoly {
        if self.is_zero() || o.is_zero() {
            return FpPoly::zero(self.p);
        }
        let p = self.p;
        let mut out = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                out[i + j] = addm(out[i + j], mulm(a, b, p), p);
            }
        }
        FpPoly::new(p, out)
    }

    pub fn scale(&self, k: u64) -> FpPoly {
        FpPoly::new(self.p, self.c.iter().map(|&a| mulm(a, k, self.p)).collect())
    }

    pub fn monic(&self) -> FpPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(invm(self.leading(), self.p))
    }

    pub fn divrem(&self, d: &FpPoly) -> (FpPoly, FpPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let p = self.p;
        let dd = d.degree();
        if self.c.len() <= dd {
            return (FpPoly::zero(p), self.clone());
        }
        let inv = invm(d.leading(), p);
        let mut r = self.c.clone();
        let mut q = vec![0u64; r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = mulm(r[k + dd], inv, p);
            if c != 0 {
                for (j, &dc) in d.c.iter().enumerate() {
                    r[k + j] = subm(r[k + j], mulm(c, dc, p), p);
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (FpPoly::new(p, q), FpPoly::new(p, r))
    }

    pub fn rem(&self, d: &FpPoly) -> FpPoly {
        self.divrem(d).1
    }

    pub fn gcd(&self, o: &FpPoly) -> FpPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s*self + t*o = g` and `g` monic.
    pub fn xgcd(&self, o: &FpPoly) -> (FpPoly, FpPoly, FpPoly) {
        let p = self.p;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (FpPoly::one(p), FpPoly::zero(p));
        let (mut t0, mut t1) = (FpPoly::zero(p), FpPoly::one(p));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s2 = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s2);
            let t2 = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t2);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let l = invm(r0.leading(), p);
        (r0.scale(l), s0.scale(l), t0.scale(l))
    }

    pub fn derivative(&self) -> FpPoly {
        FpPoly::new(
            self.p,
            self.c.iter().enumerate().skip(1).map(|(i, &a)| mulm(a, i as u64 % self.p, self.p)).collect(),
        )
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, e: &BigUint, m: &FpPoly) -> FpPoly {
        let mut result = FpPoly::one(self.p).rem(m);
        let mut base = self.rem(m);
        for i in 0..e.bits() {
            if e.bit(i) {
                result = result.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
        }
        result
    }

    /// Inverse of `x -> x^p` on a polynomial whose derivative vanishes.
    fn pth_root(&self) -> FpPoly {
        let p = self.p as usize;
        FpPoly::new(self.p, self.c.iter().step_by(p).copied().collect())
    }

    /// Evaluation at an element of F_p.
    pub fn eval(&self, x: u64) -> u64 {
        self.c.iter().rev().fold(0, |acc, &a| addm(mulm(acc, x, self.p), a, self.p))
    }
}

/// Squarefree decomposition of a monic polynomial: pairs (squarefree
/// factor, multiplicity).
fn squarefree_decomposition(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let p = f.p;
    let mut out = vec![];
    let mut c = f.gcd(&f.derivative());
    let mut w = f.divrem(&c).0;
    let mut i = 1;
    while w.degree() > 0 {
        let y = w.gcd(&c);
        let fac = w.divrem(&y).0;
        if fac.degree() > 0 {
            out.push((fac.monic(), i));
        }
        w = y;
        c = c.divrem(&w).0;
        i += 1;
    }
    if c.degree() > 0 {
        for (g, m) in squarefree_decomposition(&c.pth_root().monic()) {
            out.push((g, m * p as usize));
        }
    }
    out
}

fn distinct_degree(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let p = f.p;
    let x = FpPoly::x(p);
    let pe = BigUint::from(p);
    let mut out = vec![];
    let mut g = f.clone();
    let mut h = x.clone();
    let mut d = 1;
    while g.degree() >= 2 * d {
        h = h.pow_mod(&pe, &g);
        let gi = g.gcd(&h.sub(&x));
        if gi.degree() > 0 {
            g = g.divrem(&gi).0;
            h = h.rem(&g);
            out.push((gi, d));
        }
        d += 1;
    }
    if g.degree() > 0 {
        let dg = g.degree();
        out.push((g.monic(), dg));
    }
    out
}

fn random_poly(rng: &mut ChaCha8Rng, p: u64, below_degree: usize) -> FpPoly {
    FpPoly::new(p, (0..below_degree).map(|_| rng.random_range(0..p)).collect())
}

/// Splits a squarefree monic `f` whose irreducible factors all have degree `d`.
fn equal_degree(f: &FpPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<FpPoly> {
    let p = f.p;
    if f.degree() == d {
        return vec![f.monic()];
    }
    let n = f.degree();
    loop {
        let a = random_poly(rng, p, n);
        if a.degree() == 0 {
            continue;
        }
        let b = if p == 2 {
            // absolute trace a + a^2 + ... + a^(2^(d-1))
            let mut t = a.rem(f);
            let mut acc = t.clone();
            for _ in 1..d {
                t = t.mul(&t).rem(f);
                acc = acc.add(&t);
            }
            acc
        } else {
            let e = (BigUint::from(p).pow(d as u32) - 1u32) / 2u32;
            a.pow_mod(&e, f).sub(&FpPoly::one(p))
        };
        let g = f.gcd(&b);
        if g.degree() > 0 && g.degree() < n {
            let h = f.divrem(&g).0.monic();
            let mut out = equal_degree(&g, d, rng);
            out.extend(equal_degree(&h, d, rng));
            return out;
        }
    }
}

fn seeded_rng(f: &IntPolynomial, p: u64) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(p.to_le_bytes());
    for c in f.coeffs() {
        hasher.update(c.to_signed_bytes_le());
        hasher.update([0xff]);
    }
    let digest = hasher.finalize();
    let mut seed = [0u8; 8];
    seed.copy_from_slice(&digest[..8]);
    ChaCha8Rng::seed_from_u64(u64::from_le_bytes(seed))
}

/// Monic irreducible factors of `f mod p` with multiplicities, sorted by
/// degree and then by coefficient vector (lowest degree first).
pub fn factor_mod_p(f: &IntPolynomial, p: u64) -> Result<Vec<(FpPoly, usize)>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let fp = FpPoly::from_int(f, p);
    if fp.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut rng = seeded_rng(f, p);
    let mut out = vec![];
    for (sq, mult) in squarefree_decomposition(&fp.monic()) {
        for (part, d) in distinct_degree(&sq) {
            for g in equal_degree(&part, d, &mut rng) {
                out.push((g, mult));
            }
        }
    }
    out.sort_by(|(a, _), (b, _)| a.degree().cmp(&b.degree()).then_with(|| a.c.cmp(&b.c)));
    Ok(out)
}

/// `poly_factor_mod_p` with factors lifted to integer polynomials in `[0, p)`.
pub fn poly_factor_mod_p(f: &IntPolynomial, p: u64) -> Result<Vec<(IntPolynomial, usize)>> {
    Ok(factor_mod_p(f, p)?.into_iter().map(|(g, m)| (g.to_int(), m)).collect())
}
