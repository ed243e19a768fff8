//! Exact rational and polynomial arithmetic and the numeric kernels built on
//! it: factorization over F_p, resultants, certified complex roots and the
//! Dedekind criterion.

pub mod dedekind;
pub mod irreducible;
pub mod linalg;
pub mod modp;
pub mod poly;
pub mod primes;
pub mod quadratic;
pub mod rational;
pub mod real;
pub mod resultant;
pub mod roots;
pub mod rounding;

pub use dedekind::dedekind_maximal_at_p;
pub use irreducible::{certify_irreducible, cyclotomic_polynomial, IrreducibilityCertificate};
pub use linalg::solve_rational;
pub use modp::{poly_factor_mod_p, FpPoly};
pub use poly::{IntPolynomial, RatPolynomial};
pub use rational::{format_rational, parse_rational, rat, rat_int, Rational};
pub use real::{Complex, Real};
pub use resultant::{discriminant, resultant};
pub use roots::{complex_roots, ComplexApprox};
