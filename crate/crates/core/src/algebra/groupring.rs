//! Elements of a group ring `RG` and their arithmetic.
//!
//! Elements are stored densely (one coefficient per listing index) when the
//! group has a listing and the support is large or the group is cyclic,
//! and sparsely (a sorted map from group element to non-zero coefficient)
//! otherwise. Large permutation groups such as `S_10` are always sparse.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::coeffs::{Coeff, CoefficientRing};
use super::groups::{Group, GroupElement, GroupKind};
use super::ntt;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub enum Coeffs {
    /// Indexed by natural listing index; length equals the group order.
    Dense(Vec<Coeff>),
    /// Non-zero coefficients only.
    Sparse(BTreeMap<GroupElement, Coeff>),
}

#[derive(Clone, Debug)]
pub struct GroupRingElement {
    group: Group,
    ring: CoefficientRing,
    coeffs: Coeffs,
}

impl GroupRingElement {
    pub fn zero(group: &Group, ring: &CoefficientRing) -> Self {
        let coeffs = match group.dense_order() {
            Ok(n) if group.cyclic_order().is_some() => Coeffs::Dense(vec![BigInt::zero(); n]),
            _ => Coeffs::Sparse(BTreeMap::new()),
        };
        GroupRingElement {
            group: group.clone(),
            ring: ring.clone(),
            coeffs,
        }
    }

    pub fn one(group: &Group, ring: &CoefficientRing) -> Self {
        Self::basis(group, ring, group.identity())
    }

    /// The element `1 * e`.
    pub fn basis(group: &Group, ring: &CoefficientRing, e: GroupElement) -> Self {
        Self::from_map(group, ring, BTreeMap::from([(e, ring.reduce(&BigInt::one()))]))
    }

    /// Dense constructor; shorter inputs are padded with zeros.
    pub fn from_coeffs(group: &Group, ring: &CoefficientRing, coeffs: Vec<Coeff>) -> Result<Self> {
        let n = group.dense_order()?;
        if coeffs.len() > n {
            return Err(Error::invalid(format!(
                "{} coefficients given for a group of order {n}",
                coeffs.len()
            )));
        }
        let mut dense: Vec<Coeff> = coeffs.into_iter().map(|c| ring.reduce_owned(c)).collect();
        dense.resize(n, BigInt::zero());
        Ok(GroupRingElement {
            group: group.clone(),
            ring: ring.clone(),
            coeffs: Coeffs::Dense(dense),
        }
        .normalized())
    }

    pub fn from_i64s(group: &Group, ring: &CoefficientRing, coeffs: &[i64]) -> Result<Self> {
        Self::from_coeffs(group, ring, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Builds `sum c_k * e_k`; repeated elements accumulate.
    pub fn from_terms<I>(group: &Group, ring: &CoefficientRing, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (GroupElement, Coeff)>,
    {
        let mut map: BTreeMap<GroupElement, Coeff> = BTreeMap::new();
        for (e, c) in terms {
            group.check_element(&e)?;
            *map.entry(e).or_insert_with(BigInt::zero) += c;
        }
        Ok(Self::from_map(group, ring, map))
    }

    fn from_map(group: &Group, ring: &CoefficientRing, map: BTreeMap<GroupElement, Coeff>) -> Self {
        let map = map
            .into_iter()
            .filter_map(|(e, c)| {
                let c = ring.reduce_owned(c);
                (!c.is_zero()).then_some((e, c))
            })
            .collect();
        GroupRingElement {
            group: group.clone(),
            ring: ring.clone(),
            coeffs: Coeffs::Sparse(map),
        }
        .normalized()
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn ring(&self) -> &CoefficientRing {
        &self.ring
    }

    pub fn coeffs(&self) -> &Coeffs {
        &self.coeffs
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.coeffs, Coeffs::Dense(_))
    }

    /// Applies the representation policy: cyclic groups are always dense;
    /// other listed groups go dense once the support exceeds half the order.
    fn normalized(self) -> Self {
        let order = match self.group.dense_order() {
            Ok(n) => n,
            Err(_) => return self.into_sparse(),
        };
        let want_dense = self.group.cyclic_order().is_some() || 2 * self.support_len() > order;
        if want_dense {
            self.into_dense().expect("group has a listing")
        } else {
            self.into_sparse()
        }
    }

    fn into_dense(self) -> Result<Self> {
        match self.coeffs {
            Coeffs::Dense(_) => Ok(self),
            Coeffs::Sparse(map) => {
                let n = self.group.dense_order()?;
                let mut dense = vec![BigInt::zero(); n];
                for (e, c) in map {
                    dense[self.group.index_of(&e)?] = c;
                }
                Ok(GroupRingElement {
                    group: self.group,
                    ring: self.ring,
                    coeffs: Coeffs::Dense(dense),
                })
            }
        }
    }

    fn into_sparse(self) -> Self {
        match self.coeffs {
            Coeffs::Sparse(_) => self,
            Coeffs::Dense(dense) => {
                let map = dense
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(i, c)| (self.group.element(i).expect("dense index"), c))
                    .collect();
                GroupRingElement {
                    group: self.group,
                    ring: self.ring,
                    coeffs: Coeffs::Sparse(map),
                }
            }
        }
    }

    /// Dense copy regardless of the representation policy.
    pub fn to_dense(&self) -> Result<Self> {
        self.clone().into_dense()
    }

    /// Sparse copy regardless of the representation policy.
    pub fn to_sparse(&self) -> Self {
        self.clone().into_sparse()
    }

    /// Coefficients by natural listing index.
    pub fn dense_coeffs(&self) -> Result<Vec<Coeff>> {
        match self.to_dense()?.coeffs {
            Coeffs::Dense(v) => Ok(v),
            Coeffs::Sparse(_) => unreachable!(),
        }
    }

    /// Non-zero terms sorted by group element.
    pub fn terms(&self) -> Vec<(GroupElement, Coeff)> {
        match &self.coeffs {
            Coeffs::Sparse(map) => map.iter().map(|(e, c)| (e.clone(), c.clone())).collect(),
            Coeffs::Dense(_) => match self.to_sparse().coeffs {
                Coeffs::Sparse(map) => map.into_iter().collect(),
                Coeffs::Dense(_) => unreachable!(),
            },
        }
    }

    pub fn coeff(&self, e: &GroupElement) -> Coeff {
        match &self.coeffs {
            Coeffs::Sparse(map) => map.get(e).cloned().unwrap_or_default(),
            Coeffs::Dense(v) => self
                .group
                .index_of(e)
                .map(|i| v[i].clone())
                .unwrap_or_default(),
        }
    }

    pub fn support_len(&self) -> usize {
        match &self.coeffs {
            Coeffs::Sparse(map) => map.len(),
            Coeffs::Dense(v) => v.iter().filter(|c| !c.is_zero()).count(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.support_len() == 0
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one(&self.group, &self.ring)
    }

    /// Sum of all coefficients.
    pub fn augmentation(&self) -> Coeff {
        let total: BigInt = match &self.coeffs {
            Coeffs::Sparse(map) => map.values().sum(),
            Coeffs::Dense(v) => v.iter().sum(),
        };
        self.ring.reduce_owned(total)
    }

    pub fn max_abs_coeff(&self) -> Coeff {
        let it: Box<dyn Iterator<Item = &Coeff>> = match &self.coeffs {
            Coeffs::Sparse(map) => Box::new(map.values()),
            Coeffs::Dense(v) => Box::new(v.iter()),
        };
        it.map(|c| c.abs()).max().unwrap_or_default()
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if !self.group.same_group(&other.group) {
            return Err(Error::GroupMismatch(self.group.to_string(), other.group.to_string()));
        }
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring.to_string(), other.ring.to_string()));
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&Coeff, &Coeff) -> Coeff) -> Result<Self> {
        self.check_compatible(other)?;
        match (&self.coeffs, &other.coeffs) {
            (Coeffs::Dense(a), Coeffs::Dense(b)) => Ok(GroupRingElement {
                group: self.group.clone(),
                ring: self.ring.clone(),
                coeffs: Coeffs::Dense(a.iter().zip(b).map(|(x, y)| f(x, y)).collect()),
            }
            .normalized()),
            _ => {
                let mut map: BTreeMap<GroupElement, Coeff> = self.terms().into_iter().collect();
                let zero = BigInt::zero();
                for (e, c) in other.terms() {
                    let slot = map.entry(e).or_insert_with(BigInt::zero);
                    *slot = f(slot, &c);
                }
                for (e, c) in map.iter_mut() {
                    if other.coeff(e).is_zero() {
                        *c = f(c, &zero);
                    }
                }
                Ok(Self::from_map(&self.group, &self.ring, map))
            }
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let ring = self.ring.clone();
        self.zip_with(other, |a, b| ring.add(a, b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        let ring = self.ring.clone();
        self.zip_with(other, |a, b| ring.sub(a, b))
    }

    pub fn negate(&self) -> Self {
        self.map_coeffs(|c| self.ring.neg(c))
    }

    /// `c * self`.
    pub fn scale(&self, c: &Coeff) -> Self {
        let c = self.ring.reduce(c);
        self.map_coeffs(|x| self.ring.mul(&c, x))
    }

    fn map_coeffs(&self, f: impl Fn(&Coeff) -> Coeff) -> Self {
        match &self.coeffs {
            Coeffs::Dense(v) => GroupRingElement {
                group: self.group.clone(),
                ring: self.ring.clone(),
                coeffs: Coeffs::Dense(v.iter().map(f).collect()),
            }
            .normalized(),
            Coeffs::Sparse(map) => Self::from_map(
                &self.group,
                &self.ring,
                map.iter().map(|(e, c)| (e.clone(), f(c))).collect(),
            ),
        }
    }

    /// Coefficientwise image in `target` (reduction, or lift of canonical
    /// residues to `Z`).
    pub fn map_ring(&self, target: &CoefficientRing) -> Self {
        let mut out = self.clone();
        out.ring = target.clone();
        out.map_coeffs(|c| target.reduce(c))
    }

    /// Group-ring product `self * other`. Picks the transform path for large
    /// cyclic groups, schoolbook products otherwise.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if let (Some(n), Coeffs::Dense(_), Coeffs::Dense(_)) =
            (self.group.cyclic_order(), &self.coeffs, &other.coeffs)
        {
            if n >= ntt::CONVOLUTION_THRESHOLD {
                return self.mul_fast_cyclic(other);
            }
        }
        self.mul_naive(other)
    }

    /// Schoolbook product over the group law.
    pub fn mul_naive(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        match (&self.coeffs, &other.coeffs) {
            (Coeffs::Dense(a), Coeffs::Dense(b)) => {
                let raw = match self.group.kind() {
                    GroupKind::Cyclic(_) => ntt::naive_cyclic_convolution(a, b),
                    _ => {
                        let mut out = vec![BigInt::zero(); a.len()];
                        for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
                            for (j, y) in b.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
                                out[self.group.mul(i, j)?] += x * y;
                            }
                        }
                        out
                    }
                };
                Ok(self.with_dense(raw))
            }
            _ => Ok(self.mul_sparse(other)),
        }
    }

    fn mul_sparse(&self, other: &Self) -> Self {
        let a = self.terms();
        let b = other.terms();
        let mut acc: HashMap<GroupElement, Coeff> = HashMap::with_capacity(a.len() * b.len());
        for (ea, ca) in &a {
            for (eb, cb) in &b {
                let e = self.group.mul_elements(ea, eb);
                *acc.entry(e).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        Self::from_map(&self.group, &self.ring, acc.into_iter().collect())
    }

    /// Cyclic product through exact number-theoretic transforms.
    pub fn mul_fast_cyclic(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if self.group.cyclic_order().is_none() {
            return Err(Error::Unsupported(format!(
                "transform multiplication needs a cyclic group, got {}",
                self.group
            )));
        }
        let a = self.dense_coeffs()?;
        let b = other.dense_coeffs()?;
        Ok(self.with_dense(ntt::cyclic_convolution(&a, &b)))
    }

    fn with_dense(&self, raw: Vec<BigInt>) -> Self {
        GroupRingElement {
            group: self.group.clone(),
            ring: self.ring.clone(),
            coeffs: Coeffs::Dense(raw.into_iter().map(|c| self.ring.reduce_owned(c)).collect()),
        }
        .normalized()
    }

    /// `self^k` by square-and-multiply; `k = 0` gives the identity.
    pub fn pow(&self, k: u64) -> Self {
        let mut result = Self::one(&self.group, &self.ring);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.try_mul(&base).expect("same ring");
            }
            k >>= 1;
            if k > 0 {
                base = base.try_mul(&base).expect("same ring");
            }
        }
        result
    }
}

impl PartialEq for GroupRingElement {
    fn eq(&self, other: &Self) -> bool {
        if self.check_compatible(other).is_err() {
            return false;
        }
        match (&self.coeffs, &other.coeffs) {
            (Coeffs::Dense(a), Coeffs::Dense(b)) => a == b,
            (Coeffs::Sparse(a), Coeffs::Sparse(b)) => a == b,
            _ => self.terms() == other.terms(),
        }
    }
}

impl Eq for GroupRingElement {}

fn fmt_cyclic_term(f: &mut fmt::Formatter<'_>, first: bool, c: &BigInt, k: usize) -> fmt::Result {
    let (neg, mag) = (c.is_negative(), c.abs());
    if neg {
        write!(f, "-")?;
    } else if !first {
        write!(f, "+")?;
    }
    match (k, mag.is_one()) {
        (0, _) => write!(f, "{mag}"),
        (1, true) => write!(f, "g"),
        (1, false) => write!(f, "{mag}*g"),
        (_, true) => write!(f, "g^{k}"),
        (_, false) => write!(f, "{mag}*g^{k}"),
    }
}

/// Cyclic elements print as `-408-402*g-374*g^2...` with residues shown
/// in signed form; other groups print `c*<element>` terms.
impl fmt::Display for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if let (Some(_), Coeffs::Dense(v)) = (self.group.cyclic_order(), &self.coeffs) {
            let mut first = true;
            for (k, c) in v.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                fmt_cyclic_term(f, first, &self.ring.signed(c), k)?;
                first = false;
            }
            return Ok(());
        }
        for (i, (e, c)) in self.terms().iter().enumerate() {
            let c = self.ring.signed(c);
            if i > 0 && !c.is_negative() {
                write!(f, "+")?;
            }
            write!(f, "{c}*{e}")?;
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $inner:ident) => {
        impl $trait<&GroupRingElement> for &GroupRingElement {
            type Output = GroupRingElement;

            /// Panics on a group or ring mismatch; the `try_` form returns
            /// the error instead.
            fn $method(self, rhs: &GroupRingElement) -> GroupRingElement {
                self.$inner(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }

        impl $trait<GroupRingElement> for GroupRingElement {
            type Output = GroupRingElement;

            fn $method(self, rhs: GroupRingElement) -> GroupRingElement {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &GroupRingElement {
    type Output = GroupRingElement;

    fn neg(self) -> GroupRingElement {
        self.negate()
    }
}

impl Neg for GroupRingElement {
    type Output = GroupRingElement;

    fn neg(self) -> GroupRingElement {
        self.negate()
    }
}
