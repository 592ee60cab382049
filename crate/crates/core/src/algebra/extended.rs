//! Cyclic elements written over formal powers `g^0 .. g^(s-1)` without the
//! relation `g^n = 1`, used to hide the group order of a public key.

use num_bigint::BigInt;
use num_traits::Zero;

use super::coeffs::{Coeff, CoefficientRing};
use super::groupring::GroupRingElement;
use super::groups::Group;
use super::ntt;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedElement {
    ring: CoefficientRing,
    coeffs: Vec<Coeff>,
}

impl ExtendedElement {
    pub fn new(ring: &CoefficientRing, coeffs: Vec<Coeff>) -> Self {
        ExtendedElement {
            ring: ring.clone(),
            coeffs: coeffs.into_iter().map(|c| ring.reduce_owned(c)).collect(),
        }
    }

    /// Formal length `s`.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn ring(&self) -> &CoefficientRing {
        &self.ring
    }

    pub fn coeffs(&self) -> &[Coeff] {
        &self.coeffs
    }

    /// Embeds a cyclic element as formal length `s >= n` with zero padding.
    pub fn pad(u: &GroupRingElement, s: usize) -> Result<Self> {
        let n = cyclic_order(u.group())?;
        if s < n {
            return Err(Error::invalid(format!("extended length {s} is below the group order {n}")));
        }
        let mut coeffs = u.dense_coeffs()?;
        coeffs.resize(s, BigInt::zero());
        Ok(ExtendedElement {
            ring: u.ring().clone(),
            coeffs,
        })
    }

    /// Reduces with `g^n = 1`: the coefficient at `j` lands on `j mod n`.
    pub fn fold(&self, group: &Group) -> Result<GroupRingElement> {
        let n = cyclic_order(group)?;
        let mut out = vec![BigInt::zero(); n];
        for (j, c) in self.coeffs.iter().enumerate() {
            out[j % n] += c;
        }
        GroupRingElement::from_coeffs(group, &self.ring, out)
    }

    /// Plain polynomial product `w * self` of length `n + s - 1`.
    pub fn mul_nonreduced(w: &GroupRingElement, k: &ExtendedElement) -> Result<ExtendedElement> {
        cyclic_order(w.group())?;
        if w.ring() != &k.ring {
            return Err(Error::RingMismatch(w.ring().to_string(), k.ring.to_string()));
        }
        let a = w.dense_coeffs()?;
        let raw = if a.len().min(k.len()) >= ntt::CONVOLUTION_THRESHOLD {
            ntt::linear_convolution(&a, &k.coeffs)
        } else {
            ntt::naive_linear_convolution(&a, &k.coeffs)
        };
        Ok(ExtendedElement::new(&k.ring, raw))
    }
}

fn cyclic_order(group: &Group) -> Result<usize> {
    group
        .cyclic_order()
        .ok_or_else(|| Error::Unsupported(format!("extended elements need a cyclic group, got {group}")))
}
