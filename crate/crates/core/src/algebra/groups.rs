//! Finite groups with an indexed element listing.
//!
//! A [`GroupSpec`] knows how to multiply and invert its elements, and, when
//! the group is small enough, how to enumerate them so that group-ring
//! elements can be stored densely by listing index. Index 0 is always the
//! identity.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::perm::Permutation;
use crate::error::{Error, Result};

/// Default upper bound on the number of elements a dense listing may hold.
pub const DEFAULT_DENSE_CAP: u64 = 1 << 20;

pub type Group = Arc<GroupSpec>;

/// A group element, independent of any listing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    /// `g^k` in a cyclic group.
    Power(u64),
    /// One component per direct-product factor.
    Tuple(Vec<GroupElement>),
    Perm(Permutation),
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Power(k) => write!(f, "g^{k}"),
            GroupElement::Perm(p) => write!(f, "{p}"),
            GroupElement::Tuple(parts) => {
                write!(f, "(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl FromStr for GroupElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(exp) = s.strip_prefix("g^") {
            let k = exp
                .parse::<u64>()
                .map_err(|_| Error::invalid(format!("bad cyclic element '{s}'")))?;
            return Ok(GroupElement::Power(k));
        }
        if s == "1" || s == "g^0" {
            return Ok(GroupElement::Power(0));
        }
        if s == "g" {
            return Ok(GroupElement::Power(1));
        }
        if s.starts_with("p:") {
            return Ok(GroupElement::Perm(s.parse()?));
        }
        if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            let parts = split_top_level(inner, ';')
                .into_iter()
                .map(|p| p.parse())
                .collect::<Result<Vec<_>>>()?;
            return Ok(GroupElement::Tuple(parts));
        }
        Err(Error::invalid(format!("unrecognised element descriptor '{s}'")))
    }
}

#[derive(Clone, Debug)]
pub enum GroupKind {
    Cyclic(u64),
    Product(Vec<Group>),
    Permutation {
        degree: usize,
        generators: Vec<Permutation>,
        /// Generated by the standard transposition and d-cycle.
        symmetric: bool,
    },
}

impl PartialEq for GroupKind {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (GroupKind::Cyclic(a), GroupKind::Cyclic(b)) => a == b,
            (GroupKind::Product(a), GroupKind::Product(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.same_group(y))
            }
            (
                GroupKind::Permutation {
                    degree: d1,
                    generators: g1,
                    symmetric: s1,
                },
                GroupKind::Permutation {
                    degree: d2,
                    generators: g2,
                    symmetric: s2,
                },
            ) => d1 == d2 && ((*s1 && *s2) || g1 == g2),
            _ => false,
        }
    }
}

#[derive(Debug)]
struct PermListing {
    elements: Vec<Permutation>,
    index: HashMap<Permutation, usize>,
}

#[derive(Debug)]
pub struct GroupSpec {
    kind: GroupKind,
    order: Option<u64>,
    perm_listing: Option<PermListing>,
    dense: bool,
    listing_permutation: Option<Vec<usize>>,
}

fn factorial(d: usize) -> Option<u64> {
    (1..=d as u64).try_fold(1u64, |acc, k| acc.checked_mul(k))
}

fn standard_generators(degree: usize) -> Vec<Permutation> {
    let mut gens = Vec::new();
    if degree >= 2 {
        gens.push(Permutation::from_cycles(degree, &[&[0, 1]]).expect("transposition"));
    }
    if degree >= 3 {
        let cycle: Vec<u32> = (0..degree as u32).collect();
        gens.push(Permutation::from_cycles(degree, &[&cycle]).expect("d-cycle"));
    }
    gens
}

/// Breadth-first closure of `generators` starting from the identity.
fn enumerate_closure(degree: usize, generators: &[Permutation], cap: u64) -> Result<PermListing> {
    let id = Permutation::identity(degree);
    let mut elements = vec![id.clone()];
    let mut index = HashMap::from([(id, 0usize)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(at) = queue.pop_front() {
        for gen in generators {
            let next = gen.compose(&elements[at]);
            if !index.contains_key(&next) {
                if elements.len() as u64 >= cap {
                    return Err(Error::ListingTooLarge {
                        order: elements.len() as u64 + 1,
                        cap,
                    });
                }
                index.insert(next.clone(), elements.len());
                elements.push(next);
                queue.push_back(elements.len() - 1);
            }
        }
    }
    Ok(PermListing { elements, index })
}

impl GroupSpec {
    fn build(kind: GroupKind, order: Option<u64>, perm_listing: Option<PermListing>, dense: bool) -> Group {
        Arc::new(GroupSpec {
            kind,
            order,
            perm_listing,
            dense,
            listing_permutation: None,
        })
    }

    /// Cyclic group of order `n`, listed as `g^0, g^1, .., g^(n-1)`.
    pub fn cyclic(n: u64) -> Result<Group> {
        if n == 0 {
            return Err(Error::invalid("cyclic group order must be at least 1"));
        }
        if n > DEFAULT_DENSE_CAP {
            return Err(Error::ListingTooLarge {
                order: n,
                cap: DEFAULT_DENSE_CAP,
            });
        }
        Ok(Self::build(GroupKind::Cyclic(n), Some(n), None, true))
    }

    /// Direct product; listing index is mixed-radix with the first factor
    /// most significant.
    pub fn product(factors: Vec<Group>) -> Result<Group> {
        if factors.is_empty() {
            return Err(Error::invalid("direct product needs at least one factor"));
        }
        let order = factors
            .iter()
            .try_fold(1u64, |acc, f| f.order.and_then(|o| acc.checked_mul(o)));
        let dense = factors.iter().all(|f| f.dense)
            && order.is_some_and(|o| o <= DEFAULT_DENSE_CAP);
        Ok(Self::build(GroupKind::Product(factors), order, None, dense))
    }

    /// Subgroup of `S_degree` generated by `generators`, enumerated densely.
    pub fn permutation(degree: usize, generators: Vec<Permutation>) -> Result<Group> {
        Self::permutation_with_cap(degree, generators, DEFAULT_DENSE_CAP)
    }

    pub fn permutation_with_cap(degree: usize, generators: Vec<Permutation>, cap: u64) -> Result<Group> {
        Self::check_generators(degree, &generators)?;
        let listing = enumerate_closure(degree, &generators, cap)?;
        let order = listing.elements.len() as u64;
        Ok(Self::build(
            GroupKind::Permutation {
                degree,
                generators,
                symmetric: false,
            },
            Some(order),
            Some(listing),
            true,
        ))
    }

    /// Permutation group kept in sparse mode only: nothing is enumerated
    /// and the order is left unknown.
    pub fn permutation_sparse(degree: usize, generators: Vec<Permutation>) -> Result<Group> {
        Self::check_generators(degree, &generators)?;
        Ok(Self::build(
            GroupKind::Permutation {
                degree,
                generators,
                symmetric: false,
            },
            None,
            None,
            false,
        ))
    }

    /// Full symmetric group `S_d`. Enumerated when `d!` fits under the dense
    /// cap, otherwise sparse-only.
    pub fn symmetric(degree: usize) -> Result<Group> {
        Self::symmetric_with_cap(degree, DEFAULT_DENSE_CAP)
    }

    pub fn symmetric_with_cap(degree: usize, cap: u64) -> Result<Group> {
        if degree == 0 {
            return Err(Error::invalid("permutation degree must be at least 1"));
        }
        let generators = standard_generators(degree);
        let order = factorial(degree);
        let listing = match order {
            Some(o) if o <= cap => Some(enumerate_closure(degree, &generators, cap)?),
            _ => None,
        };
        let dense = listing.is_some();
        Ok(Self::build(
            GroupKind::Permutation {
                degree,
                generators,
                symmetric: true,
            },
            order,
            listing,
            dense,
        ))
    }

    fn check_generators(degree: usize, generators: &[Permutation]) -> Result<()> {
        if degree == 0 {
            return Err(Error::invalid("permutation degree must be at least 1"));
        }
        if let Some(bad) = generators.iter().find(|g| g.degree() != degree) {
            return Err(Error::invalid(format!(
                "generator {bad} does not act on {degree} points"
            )));
        }
        Ok(())
    }

    /// Returns a copy whose message listing is reordered by `perm`:
    /// message position `i` is carried by the element at natural index
    /// `perm[i]`. `perm[0]` must be 0 so the identity stays first.
    pub fn with_listing_permutation(self: &Group, perm: Vec<usize>) -> Result<Group> {
        let n = self.dense_order()?;
        if perm.len() != n {
            return Err(Error::invalid(format!(
                "listing permutation has length {} but the group has order {n}",
                perm.len()
            )));
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(Error::invalid("listing permutation is not a bijection"));
            }
            seen[p] = true;
        }
        if perm[0] != 0 {
            return Err(Error::invalid("listing permutation must fix index 0"));
        }
        let listing_permutation = if perm.iter().enumerate().all(|(i, &p)| i == p) {
            None
        } else {
            Some(perm)
        };
        Ok(Arc::new(GroupSpec {
            kind: self.kind.clone(),
            order: self.order,
            perm_listing: self.perm_listing.as_ref().map(|l| PermListing {
                elements: l.elements.clone(),
                index: l.index.clone(),
            }),
            dense: self.dense,
            listing_permutation,
        }))
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    /// Order of the group, if known.
    pub fn order(&self) -> Option<u64> {
        self.order
    }

    pub fn is_dense(&self) -> bool {
        self.dense
    }

    /// Order as a listing length; fails for sparse-only groups.
    pub fn dense_order(&self) -> Result<usize> {
        match (self.dense, self.order) {
            (true, Some(o)) => Ok(o as usize),
            _ => Err(Error::NoDenseListing(self.to_string())),
        }
    }

    pub fn cyclic_order(&self) -> Option<usize> {
        match self.kind {
            GroupKind::Cyclic(n) => Some(n as usize),
            _ => None,
        }
    }

    pub fn listing_permutation(&self) -> Option<&[usize]> {
        self.listing_permutation.as_deref()
    }

    /// Natural index of the element carrying message position `position`.
    pub fn listed_index(&self, position: usize) -> usize {
        match &self.listing_permutation {
            Some(p) => p[position],
            None => position,
        }
    }

    /// Same underlying group (listing permutation is ignored).
    pub fn same_group(&self, other: &GroupSpec) -> bool {
        std::ptr::eq(self, other) || self.kind == other.kind
    }

    pub fn identity(&self) -> GroupElement {
        match &self.kind {
            GroupKind::Cyclic(_) => GroupElement::Power(0),
            GroupKind::Product(fs) => GroupElement::Tuple(fs.iter().map(|f| f.identity()).collect()),
            GroupKind::Permutation { degree, .. } => {
                GroupElement::Perm(Permutation::identity(*degree))
            }
        }
    }

    /// Checks that `e` has the right shape for this group.
    pub fn check_element(&self, e: &GroupElement) -> Result<()> {
        let ok = match (&self.kind, e) {
            (GroupKind::Cyclic(n), GroupElement::Power(k)) => k < n,
            (GroupKind::Product(fs), GroupElement::Tuple(parts)) => {
                fs.len() == parts.len()
                    && fs.iter().zip(parts).all(|(f, p)| f.check_element(p).is_ok())
            }
            (GroupKind::Permutation { degree, .. }, GroupElement::Perm(p)) => {
                p.degree() == *degree
                    && self
                        .perm_listing
                        .as_ref()
                        .is_none_or(|l| l.index.contains_key(p))
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("{e} is not an element of {self}")))
        }
    }

    pub fn mul_elements(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        match (&self.kind, a, b) {
            (GroupKind::Cyclic(n), GroupElement::Power(x), GroupElement::Power(y)) => {
                GroupElement::Power((x + y) % n)
            }
            (GroupKind::Product(fs), GroupElement::Tuple(xs), GroupElement::Tuple(ys)) => {
                GroupElement::Tuple(
                    fs.iter()
                        .zip(xs.iter().zip(ys))
                        .map(|(f, (x, y))| f.mul_elements(x, y))
                        .collect(),
                )
            }
            (GroupKind::Permutation { .. }, GroupElement::Perm(x), GroupElement::Perm(y)) => {
                GroupElement::Perm(x.compose(y))
            }
            _ => panic!("element shape does not match group {self}"),
        }
    }

    pub fn inv_element(&self, a: &GroupElement) -> GroupElement {
        match (&self.kind, a) {
            (GroupKind::Cyclic(n), GroupElement::Power(x)) => GroupElement::Power((n - x) % n),
            (GroupKind::Product(fs), GroupElement::Tuple(xs)) => {
                GroupElement::Tuple(fs.iter().zip(xs).map(|(f, x)| f.inv_element(x)).collect())
            }
            (GroupKind::Permutation { .. }, GroupElement::Perm(x)) => GroupElement::Perm(x.inverse()),
            _ => panic!("element shape does not match group {self}"),
        }
    }

    pub fn pow_element(&self, a: &GroupElement, k: u64) -> GroupElement {
        let mut result = self.identity();
        let mut base = a.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = self.mul_elements(&result, &base);
            }
            base = self.mul_elements(&base, &base);
            k >>= 1;
        }
        result
    }

    pub fn element_order(&self, a: &GroupElement) -> u64 {
        match (&self.kind, a) {
            (GroupKind::Cyclic(n), GroupElement::Power(x)) => n / num_integer::gcd(*n, *x),
            (GroupKind::Product(fs), GroupElement::Tuple(xs)) => fs
                .iter()
                .zip(xs)
                .fold(1, |acc, (f, x)| num_integer::lcm(acc, f.element_order(x))),
            (GroupKind::Permutation { .. }, GroupElement::Perm(p)) => p.order(),
            _ => panic!("element shape does not match group {self}"),
        }
    }

    /// Element at natural listing index `i`.
    pub fn element(&self, i: usize) -> Result<GroupElement> {
        let n = self.dense_order()?;
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, order: n });
        }
        Ok(self.element_unchecked(i))
    }

    fn element_unchecked(&self, i: usize) -> GroupElement {
        match &self.kind {
            GroupKind::Cyclic(_) => GroupElement::Power(i as u64),
            GroupKind::Product(fs) => {
                let mut rest = i;
                let mut parts = vec![GroupElement::Power(0); fs.len()];
                for (k, f) in fs.iter().enumerate().rev() {
                    let o = f.order.expect("dense factor") as usize;
                    parts[k] = f.element_unchecked(rest % o);
                    rest /= o;
                }
                GroupElement::Tuple(parts)
            }
            GroupKind::Permutation { .. } => GroupElement::Perm(
                self.perm_listing.as_ref().expect("dense listing").elements[i].clone(),
            ),
        }
    }

    /// Natural listing index of `e`.
    pub fn index_of(&self, e: &GroupElement) -> Result<usize> {
        if !self.dense {
            return Err(Error::NoDenseListing(self.to_string()));
        }
        self.index_of_unchecked(e)
            .ok_or_else(|| Error::invalid(format!("{e} is not an element of {self}")))
    }

    fn index_of_unchecked(&self, e: &GroupElement) -> Option<usize> {
        match (&self.kind, e) {
            (GroupKind::Cyclic(n), GroupElement::Power(k)) => (k < n).then_some(*k as usize),
            (GroupKind::Product(fs), GroupElement::Tuple(parts)) if parts.len() == fs.len() => {
                let mut idx = 0usize;
                for (f, p) in fs.iter().zip(parts) {
                    idx = idx * f.order? as usize + f.index_of_unchecked(p)?;
                }
                Some(idx)
            }
            (GroupKind::Permutation { .. }, GroupElement::Perm(p)) => {
                self.perm_listing.as_ref()?.index.get(p).copied()
            }
            _ => None,
        }
    }

    fn check_index(&self, i: usize) -> Result<usize> {
        let n = self.dense_order()?;
        if i >= n {
            Err(Error::IndexOutOfRange { index: i, order: n })
        } else {
            Ok(n)
        }
    }

    /// Index of `element(i) * element(j)`.
    pub fn mul(&self, i: usize, j: usize) -> Result<usize> {
        let n = self.check_index(i)?;
        self.check_index(j)?;
        match &self.kind {
            GroupKind::Cyclic(_) => Ok((i + j) % n),
            _ => {
                let prod = self.mul_elements(&self.element_unchecked(i), &self.element_unchecked(j));
                Ok(self.index_of_unchecked(&prod).expect("closed under multiplication"))
            }
        }
    }

    /// Index of the inverse of `element(i)`.
    pub fn inv(&self, i: usize) -> Result<usize> {
        let n = self.check_index(i)?;
        match &self.kind {
            GroupKind::Cyclic(_) => Ok((n - i) % n),
            _ => {
                let inv = self.inv_element(&self.element_unchecked(i));
                Ok(self.index_of_unchecked(&inv).expect("closed under inversion"))
            }
        }
    }
}

/// Same group and same listing permutation.
impl PartialEq for GroupSpec {
    fn eq(&self, other: &Self) -> bool {
        self.same_group(other) && self.listing_permutation == other.listing_permutation
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            GroupKind::Cyclic(n) => write!(f, "cyclic {n}"),
            GroupKind::Product(fs) => {
                write!(f, "product ")?;
                for (i, g) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ";")?;
                    }
                    if matches!(g.kind, GroupKind::Product(_)) {
                        write!(f, "({g})")?;
                    } else {
                        write!(f, "{g}")?;
                    }
                }
                Ok(())
            }
            GroupKind::Permutation {
                degree,
                generators,
                symmetric,
            } => {
                if *symmetric {
                    write!(f, "sym {degree}")
                } else {
                    write!(f, "perm {degree}")?;
                    for g in generators {
                        write!(f, " {g}")?;
                    }
                    Ok(())
                }
            }
        }
    }
}

fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                parts.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

/// Parses `cyclic <n>`, `sym <d>`, `perm <d> p:.. p:..` or
/// `product <spec>;<spec>` (parenthesise nested products).
pub fn parse_group(s: &str) -> Result<Group> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        return parse_group(inner);
    }
    let (head, rest) = s.split_once(char::is_whitespace).unwrap_or((s, ""));
    let rest = rest.trim();
    let bad = || Error::invalid(format!("bad group description '{s}'"));
    match head {
        "cyclic" => GroupSpec::cyclic(rest.parse().map_err(|_| bad())?),
        "sym" => GroupSpec::symmetric(rest.parse().map_err(|_| bad())?),
        "perm" => {
            let mut tokens = rest.split_whitespace();
            let degree: usize = tokens.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let gens = tokens.map(|t| t.parse()).collect::<Result<Vec<Permutation>>>()?;
            GroupSpec::permutation(degree, gens)
        }
        "product" => {
            let factors = split_top_level(rest, ';')
                .into_iter()
                .map(parse_group)
                .collect::<Result<Vec<_>>>()?;
            GroupSpec::product(factors)
        }
        _ => Err(bad()),
    }
}
