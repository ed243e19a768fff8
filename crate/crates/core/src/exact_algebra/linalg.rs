//! Exact linear algebra over Q.

use num_traits::Zero;

use super::Rational;

/// Solves `A x = b` for a matrix given by rows. Returns `None` when the
/// system is inconsistent; free variables are set to zero.
pub fn solve_rational(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut m: Vec<Vec<Rational>> = a.iter().zip(b).map(|(r, y)| r.iter().cloned().chain([y.clone()]).collect()).collect();
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, pr);
        let inv = Rational::from_integer(1.into()) / &m[r][c];
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in c..=cols {
                    let t = &f * &m[r][k];
                    m[i][k] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][cols].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::{rat, rat_int};

    #[test]
    fn small_systems() {
        let a = vec![vec![rat_int(2), rat_int(1)], vec![rat_int(1), rat_int(3)]];
        assert_eq!(solve_rational(&a, &[rat_int(3), rat_int(4)]), Some(vec![rat_int(1), rat_int(1)]));
        let a = vec![vec![rat_int(1)], vec![rat_int(2)]];
        assert_eq!(solve_rational(&a, &[rat_int(1), rat_int(3)]), None);
        assert_eq!(solve_rational(&a, &[rat(1, 2), rat_int(1)]), Some(vec![rat(1, 2)]));
    }
}
