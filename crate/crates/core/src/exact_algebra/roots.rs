//! Certified complex roots of integer polynomials.
//!
//! Approximations come from Aberth iteration (first in `f64`, then at the
//! working precision). Each approximation is then enclosed in the disk
//! `D(z_i, n |W_i|)` where `W_i` is the Weierstrass correction; when these
//! disks are pairwise disjoint each holds exactly one root. Rounding in the
//! evaluation of `f(z_i)` is absorbed into the radius with an explicit bound.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use super::poly::IntPolynomial;
use super::real::{working_bits, Complex, Real};
use crate::error::{Error, Result};

/// Precision is doubled at most this many times before giving up.
pub const MAX_DOUBLINGS: u32 = 4;

#[derive(Clone, Debug)]
pub struct ComplexApprox {
    pub re: Real,
    pub im: Real,
    /// The exact root lies in the closed disk of this radius about `(re, im)`.
    pub radius: Real,
    pub precision_bits: u32,
    /// Index of the complex-conjugate root, `None` for real roots.
    pub conjugate: Option<usize>,
}

impl ComplexApprox {
    pub fn center(&self) -> Complex {
        Complex::new(self.re.clone(), self.im.clone())
    }

    pub fn is_real(&self) -> bool {
        self.conjugate.is_none()
    }
}

fn cauchy_radius(c: &[Complex64]) -> f64 {
    let n = c.len() - 1;
    let lead = c[n].norm();
    (1..=n).map(|k| 2.0 * (c[n - k].norm() / lead).powf(1.0 / k as f64)).fold(0.0, f64::max).max(1e-3)
}

fn horner64(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    for a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

fn aberth_f64(coeffs: &[BigInt]) -> Option<Vec<Complex64>> {
    let c: Vec<Complex64> = coeffs.iter().map(|a| Complex64::new(a.to_f64().unwrap_or(f64::INFINITY), 0.0)).collect();
    if c.iter().any(|a| !a.re.is_finite()) {
        return None;
    }
    let n = c.len() - 1;
    let r = cauchy_radius(&c);
    let mut z: Vec<Complex64> =
        (0..n).map(|k| Complex64::from_polar(r, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4)).collect();
    for _ in 0..2000 {
        let mut done = true;
        for i in 0..n {
            let (p, dp) = horner64(&c, z[i]);
            if p.is_zero() {
                continue;
            }
            let w = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = w / (Complex64::new(1.0, 0.0) - w * s);
            if !step.re.is_finite() || !step.im.is_finite() {
                return None;
            }
            z[i] -= step;
            if step.norm() > 1e-14 * z[i].norm().max(1.0) {
                done = false;
            }
        }
        if done {
            return Some(z);
        }
    }
    Some(z)
}

fn horner(c: &[Real], z: &Complex) -> (Complex, Complex) {
    let bits = z.bits();
    let mut p = Complex::zero(bits);
    let mut dp = Complex::zero(bits);
    for a in c.iter().rev() {
        dp = dp.mul(z).add(&p);
        p = p.mul(z);
        p.re = &p.re + a;
    }
    (p, dp)
}

fn initial_guesses(coeffs: &[BigInt], bits: usize) -> Vec<Complex> {
    if let Some(z) = aberth_f64(coeffs) {
        return z.into_iter().map(|w| Complex::from_f64(w.re, w.im, bits)).collect();
    }
    let n = coeffs.len() - 1;
    let lead = Real::from_int(&coeffs[n], 64).abs();
    let r = coeffs[..n].iter().map(|a| (Real::from_int(a, 64).abs() / &lead).to_f64()).fold(1.0f64, f64::max) + 1.0;
    (0..n)
        .map(|k| {
            let w = Complex64::from_polar(r, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4);
            Complex::from_f64(w.re, w.im, bits)
        })
        .collect()
}

fn aberth(coeffs: &[Real], mut z: Vec<Complex>, bits: usize) -> Vec<Complex> {
    let n = z.len();
    let one = Real::one(bits);
    let tol = Real::pow2(-(bits as i64) + 24, bits);
    let mut settled = 0;
    for _ in 0..400 {
        let mut max_rel = Real::zero(bits);
        for i in 0..n {
            let (p, dp) = horner(coeffs, &z[i]);
            if p.re.is_zero() && p.im.is_zero() {
                continue;
            }
            let w = p.div(&dp);
            let mut s = Complex::zero(bits);
            for j in 0..n {
                if j != i {
                    s = s.add(&Complex::from_real(one.clone()).div(&z[i].sub(&z[j])));
                }
            }
            let denom = Complex::from_real(one.clone()).sub(&w.mul(&s));
            let step = w.div(&denom);
            z[i] = z[i].sub(&step);
            let rel = step.abs() / z[i].abs().max(&one);
            max_rel = max_rel.max(&rel);
        }
        if max_rel < tol {
            settled += 1;
            if settled >= 2 {
                break;
            }
        }
    }
    z
}

/// Absolute error bound for evaluating `f` at `z` by Horner at `bits`.
fn eval_error_bound(abs_coeffs: &[Real], z_abs: &Real, bits: usize) -> Real {
    let n = abs_coeffs.len();
    let mut acc = Real::zero(bits);
    for a in abs_coeffs.iter().rev() {
        acc = &(&acc * z_abs) + a;
    }
    let factor = Real::from_i64(4 * n as i64 + 4, bits) * Real::pow2(-(bits as i64) + 1, bits);
    acc * factor
}

struct Certified {
    centers: Vec<Complex>,
    radii: Vec<Real>,
}

fn certify(coeffs: &[Real], z: &[Complex], bits: usize) -> Option<Certified> {
    let n = z.len();
    let hi = bits * 2;
    let coeffs_hi: Vec<Real> = coeffs.iter().map(|c| c.with_bits(hi)).collect();
    let abs_coeffs: Vec<Real> = coeffs_hi.iter().map(|c| c.abs()).collect();
    let lead = abs_coeffs[n].clone();
    let slack = Real::one(hi) + Real::pow2(-40, hi);
    let nn = Real::from_i64(n as i64, hi);
    let mut radii = Vec::with_capacity(n);
    let zh: Vec<Complex> = z.iter().map(|w| w.with_bits(hi)).collect();
    for i in 0..n {
        let (p, _) = horner(&coeffs_hi, &zh[i]);
        let err = eval_error_bound(&abs_coeffs, &zh[i].abs(), hi);
        let mut prod = lead.clone();
        for j in 0..n {
            if j != i {
                prod = &prod * &zh[i].sub(&zh[j]).abs();
            }
        }
        if prod.is_zero() {
            return None;
        }
        let w = &(&p.abs() + &err) / &prod;
        radii.push(&(&nn * &w) * &slack);
    }
    for i in 0..n {
        for j in i + 1..n {
            if zh[i].sub(&zh[j]).abs() <= &radii[i] + &radii[j] {
                return None;
            }
        }
    }
    Some(Certified { centers: zh, radii })
}

/// Decides which certified disks hold real roots and which pair up as
/// complex conjugates, using that the root set is closed under conjugation.
fn classify(c: Certified, bits: usize) -> Option<Vec<(Complex, Real, Option<usize>)>> {
    let n = c.centers.len();
    let mut partner: Vec<Option<usize>> = vec![None; n];
    let mut real = vec![false; n];
    for i in 0..n {
        let zc = c.centers[i].conj();
        let hits: Vec<usize> =
            (0..n).filter(|&j| zc.sub(&c.centers[j]).abs() <= &c.radii[i] + &c.radii[j]).collect();
        match hits.as_slice() {
            [j] if *j == i => real[i] = true,
            [j] => partner[i] = Some(*j),
            _ => return None,
        }
    }
    let mut out: Vec<(Complex, Real, Option<usize>)> = Vec::with_capacity(n);
    for i in 0..n {
        let z = &c.centers[i];
        if real[i] {
            let r = &c.radii[i] + &z.im.abs();
            out.push((Complex::from_real(z.re.with_bits(bits)), r.with_bits(bits), None));
        } else {
            let j = partner[i]?;
            if partner[j] != Some(i) || i == j {
                return None;
            }
            // symmetrize so conjugate centers are exact mirror images
            let w = &c.centers[j];
            let two = Real::from_i64(2, z.bits());
            let re = &(&z.re + &w.re) / &two;
            let im = &(&z.im - &w.im) / &two;
            let shift = Complex::new(re.clone(), im.clone()).sub(z).abs();
            let r = &c.radii[i].max(&c.radii[j]) + &shift;
            out.push((Complex::new(re.with_bits(bits), im.with_bits(bits)), r.with_bits(bits), Some(j)));
        }
    }
    Some(out)
}

/// All complex roots of a squarefree `f`, each with a certified error radius
/// below `2^(-precision_bits/2)`, sorted by real part then imaginary part.
pub fn complex_roots(f: &IntPolynomial, precision_bits: u32) -> Result<Vec<ComplexApprox>> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !f.to_rat().is_squarefree() {
        return Err(Error::NotSquarefree);
    }
    let n = f.degree();
    if n == 0 {
        return Ok(vec![]);
    }
    let precision_bits = precision_bits.max(53);
    let target = Real::pow2(-(precision_bits as i64 / 2), working_bits(precision_bits));
    let mut bits = working_bits(precision_bits);
    let mut z = initial_guesses(f.coeffs(), bits);
    for _ in 0..=MAX_DOUBLINGS {
        let coeffs: Vec<Real> = f.coeffs().iter().map(|a| Real::from_int(a, bits)).collect();
        z = aberth(&coeffs, z.into_iter().map(|w| w.with_bits(bits)).collect(), bits);
        let classified = certify(&coeffs, &z, bits).and_then(|c| classify(c, bits));
        if let Some(found) = classified {
            if found.iter().all(|(_, r, _)| r < &target) {
                return Ok(finish(found, precision_bits));
            }
        }
        bits *= 2;
    }
    Err(Error::PrecisionExhausted { bits: precision_bits })
}

fn finish(found: Vec<(Complex, Real, Option<usize>)>, precision_bits: u32) -> Vec<ComplexApprox> {
    let mut order: Vec<usize> = (0..found.len()).collect();
    order.sort_by(|&a, &b| {
        let (za, zb) = (&found[a].0, &found[b].0);
        za.re.partial_cmp(&zb.re).unwrap().then(za.im.partial_cmp(&zb.im).unwrap())
    });
    let mut rank = vec![0; found.len()];
    for (new, &old) in order.iter().enumerate() {
        rank[old] = new;
    }
    order
        .into_iter()
        .map(|old| {
            let (z, r, conj) = &found[old];
            ComplexApprox {
                re: z.re.clone(),
                im: z.im.clone(),
                radius: r.clone(),
                precision_bits,
                conjugate: conj.map(|j| rank[j]),
            }
        })
        .collect()
}

/// Number of real roots, read off a certified root list.
pub fn real_root_count(roots: &[ComplexApprox]) -> usize {
    roots.iter().filter(|r| r.is_real()).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ip(cs: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64s(cs)
    }

    // Newton iteration for sqrt(2) in exact rationals, an independent oracle.
    fn sqrt2_oracle() -> crate::exact_algebra::rational::Rational {
        use crate::exact_algebra::rational::rat;
        let mut x = rat(3, 2);
        for _ in 0..8 {
            x = (&x + rat(2, 1) / &x) / rat(2, 1);
        }
        x
    }

    #[test]
    fn sqrt_two() {
        let r = complex_roots(&ip(&[-2, 0, 1]), 128).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|z| z.is_real()));
        let oracle = Real::from_rational(&sqrt2_oracle(), 256);
        assert!((&r[1].re - &oracle).abs() < Real::pow2(-120, 256));
        assert!((&r[0].re + &oracle).abs() < Real::pow2(-120, 256));
        assert!(r.iter().all(|z| z.radius < Real::pow2(-64, 64)));
    }

    #[test]
    fn gaussian_pair() {
        let r = complex_roots(&ip(&[1, 0, 1]), 128).unwrap();
        assert_eq!(r[0].conjugate, Some(1));
        assert_eq!(r[1].conjugate, Some(0));
        assert!(r[0].im.is_negative());
        assert!((&r[1].im - &Real::one(192)).abs() < Real::pow2(-100, 192));
        assert!(r[0].re.abs() < Real::pow2(-100, 192));
    }

    #[test]
    fn golden_ratio() {
        let r = complex_roots(&ip(&[-1, -1, 1]), 128).unwrap();
        let s5 = Real::from_i64(5, 256).sqrt();
        let phi = (&Real::one(256) + &s5) / Real::from_i64(2, 256);
        assert!((&r[1].re - &phi).abs() < Real::pow2(-120, 256));
        assert!((&r[0].re - &(&Real::one(256) - &phi)).abs() < Real::pow2(-120, 256));
    }

    #[test]
    fn rejects_square_factors() {
        assert_eq!(complex_roots(&ip(&[1, 2, 1]), 128).unwrap_err(), Error::NotSquarefree);
    }

    #[test]
    fn cyclotomic_roots_have_modulus_one() {
        let r = complex_roots(&ip(&[1, 1, 1, 1, 1]), 128).unwrap();
        assert_eq!(r.len(), 4);
        assert_eq!(real_root_count(&r), 0);
        for z in &r {
            assert!((&z.center().abs() - &Real::one(192)).abs() < Real::pow2(-100, 192));
        }
    }

    #[test]
    fn rational_root_and_degree_one() {
        let r = complex_roots(&ip(&[0, 1]), 64).unwrap();
        assert!(r[0].re.is_zero() && r[0].is_real());
        let r = complex_roots(&ip(&[-2, 3]), 64).unwrap();
        let want = Real::from_rational(&crate::exact_algebra::rational::rat(2, 3), 128);
        assert!((&r[0].re - &want).abs() <= r[0].radius.with_bits(128) + Real::pow2(-100, 128));
    }

    #[test]
    fn higher_degree_with_close_real_roots() {
        // Wilkinson-style product (x-1)(x-2)...(x-8)
        let mut f = IntPolynomial::one();
        for k in 1..=8 {
            f = f.mul(&ip(&[-k, 1]));
        }
        let r = complex_roots(&f, 128).unwrap();
        for (k, z) in r.iter().enumerate() {
            assert!(z.is_real());
            assert!((&z.re - &Real::from_i64(k as i64 + 1, 192)).abs() < Real::pow2(-100, 192));
        }
    }
}
