use std::fmt;

use super::{FieldElement, NumberField};
use crate::error::{Error, Result};

/// A field automorphism, stored as the image of the generator.
#[derive(Clone, PartialEq)]
pub struct Automorphism {
    image: FieldElement,
}

impl fmt::Debug for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t -> {}", self.image)
    }
}

impl fmt::Display for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t -> {}", self.image)
    }
}

impl Automorphism {
    pub(crate) fn new(image: FieldElement) -> Automorphism {
        Automorphism { image }
    }

    /// Validated constructor: the image must be a root of the defining
    /// polynomial.
    pub fn from_image(image: FieldElement) -> Result<Automorphism> {
        if !image.eval_poly(image.field().min_rat()).is_zero() {
            return Err(Error::BadAutomorphism { index: 0 });
        }
        Ok(Automorphism { image })
    }

    pub fn identity(field: &NumberField) -> Automorphism {
        Automorphism { image: FieldElement::generator(field) }
    }

    pub fn field(&self) -> &NumberField {
        self.image.field()
    }

    pub fn generator_image(&self) -> &FieldElement {
        &self.image
    }

    pub fn is_identity(&self) -> bool {
        self.image == FieldElement::generator(self.field())
    }

    /// `sigma(a) = a(sigma(t))`.
    pub fn apply(&self, a: &FieldElement) -> Result<FieldElement> {
        if a.field() != self.field() {
            return Err(Error::FieldMismatch);
        }
        Ok(self.image.eval_poly(&a.to_poly()))
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Automorphism) -> Result<Automorphism> {
        Ok(Automorphism { image: self.apply(&other.image)? })
    }

    /// Inverse as the power `self^(k-1)` where `k` is the order.
    pub fn inverse(&self) -> Automorphism {
        let mut prev = Automorphism::identity(self.field());
        let mut cur = self.clone();
        let bound = self.field().degree().max(1);
        for _ in 0..bound {
            if cur.is_identity() {
                return prev;
            }
            prev = cur.clone();
            cur = self.compose(&cur).expect("same field");
        }
        panic!("automorphism order exceeds the field degree");
    }

    /// Position of this automorphism in its field's list.
    pub fn index_in_field(&self) -> Option<usize> {
        self.field().automorphisms().iter().position(|a| a == self)
    }
}

pub fn compose_automorphisms(sigma: &Automorphism, tau: &Automorphism) -> Result<Automorphism> {
    sigma.compose(tau)
}
