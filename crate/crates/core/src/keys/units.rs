//! Unit construction, certified inversion and key assembly.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::coeffs::{Coeff, CoefficientRing};
use crate::algebra::extended::ExtendedElement;
use crate::algebra::groupring::GroupRingElement;
use crate::algebra::groups::{Group, GroupElement};
use crate::algebra::poly::{self, BigMod, EuclidOutcome, PivotFailure, Rationals, SmallMod};
use crate::error::{Error, Result};

/// Which side(s) of the message the public unit multiplies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// `c = w * u`
    Right,
    /// `c = u * w`
    Left,
    /// `c = v * w * u`
    TwoSided,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Right => "right",
            Side::Left => "left",
            Side::TwoSided => "two-sided",
        })
    }
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "right" => Ok(Side::Right),
            "left" => Ok(Side::Left),
            "two-sided" => Ok(Side::TwoSided),
            other => Err(Error::invalid(format!("unknown side `{other}`"))),
        }
    }
}

/// How a unit was obtained. Kept with the private material only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Bass { n: u64, i: u64, m: u64 },
    Bicyclic { a: GroupElement, b: GroupElement },
    Trial,
    Random { seed: u64 },
    Embedded(Box<Provenance>),
    Product(Vec<Provenance>),
    Power(Box<Provenance>, u64),
    Reduced(Box<Provenance>, BigInt),
}

/// A unit together with its inverse. Construction always checks
/// `u * inv = 1 = inv * u`.
#[derive(Clone, Debug)]
pub struct UnitKey {
    unit: GroupRingElement,
    inverse: GroupRingElement,
    provenance: Provenance,
}

impl UnitKey {
    pub fn certify(unit: GroupRingElement, inverse: GroupRingElement, provenance: Provenance) -> Result<Self> {
        let one = GroupRingElement::one(unit.group(), unit.ring());
        if unit.try_mul(&inverse)? != one || inverse.try_mul(&unit)? != one {
            return Err(Error::NotAUnit("claimed inverse does not multiply to 1".into()));
        }
        Ok(UnitKey {
            unit,
            inverse,
            provenance,
        })
    }

    /// Certifies an arbitrary cyclic element by inverting it.
    pub fn trial(unit: GroupRingElement) -> Result<Self> {
        let inverse = invert_cyclic(&unit)?;
        Ok(UnitKey {
            unit,
            inverse,
            provenance: Provenance::Trial,
        })
    }

    pub fn identity(group: &Group, ring: &CoefficientRing) -> Self {
        let one = GroupRingElement::one(group, ring);
        UnitKey {
            unit: one.clone(),
            inverse: one,
            provenance: Provenance::Trial,
        }
    }

    pub fn unit(&self) -> &GroupRingElement {
        &self.unit
    }

    pub fn inverse(&self) -> &GroupRingElement {
        &self.inverse
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// `u^k` with inverse `(u^-1)^k`.
    pub fn power(&self, k: u64) -> UnitKey {
        UnitKey {
            unit: self.unit.pow(k),
            inverse: self.inverse.pow(k),
            provenance: Provenance::Power(Box::new(self.provenance.clone()), k),
        }
    }

    /// Expanded product `k_1 * k_2 * ...` with inverse `... * k_2^-1 * k_1^-1`.
    pub fn product(keys: &[UnitKey]) -> Result<UnitKey> {
        let (first, rest) = keys
            .split_first()
            .ok_or_else(|| Error::invalid("product of no units"))?;
        let mut unit = first.unit.clone();
        let mut inverse = first.inverse.clone();
        for k in rest {
            unit = unit.try_mul(&k.unit)?;
            inverse = k.inverse.try_mul(&inverse)?;
        }
        Ok(UnitKey {
            unit,
            inverse,
            provenance: Provenance::Product(keys.iter().map(|k| k.provenance.clone()).collect()),
        })
    }

    /// Image of both elements in `Mod(m)`.
    pub fn reduce_mod(&self, m: &BigInt) -> Result<UnitKey> {
        let target = CoefficientRing::modulo(m.clone())?;
        Ok(UnitKey {
            unit: self.unit.map_ring(&target),
            inverse: self.inverse.map_ring(&target),
            provenance: Provenance::Reduced(Box::new(self.provenance.clone()), m.clone()),
        })
    }
}

/// Multiplicative order of `i` modulo `n`; `gcd(i, n) = 1` is assumed.
fn multiplicative_order(i: u64, n: u64) -> u64 {
    let mut x = i % n;
    let mut m = 1;
    while x != 1 % n {
        x = ((x as u128 * i as u128) % n as u128) as u64;
        m += 1;
    }
    m
}

/// Bass cyclic unit `(1 + g + ... + g^(i-1))^m + ((1 - i^m) / n) * ĝ`
/// in `Z[C_n]`, where `m` is the order of `i` mod `n`.
pub fn bass_cyclic_unit(group: &Group, i: u64) -> Result<UnitKey> {
    let n = group
        .cyclic_order()
        .ok_or_else(|| Error::invalid(format!("Bass units need a cyclic group, got {group}")))?
        as u64;
    let z = CoefficientRing::Integers;
    if i == 1 || n == 1 {
        return Ok(UnitKey::identity(group, &z));
    }
    if i == 0 || i >= n || num_integer::gcd(i, n) != 1 {
        return Err(Error::invalid(format!("Bass parameter i = {i} needs 1 <= i < {n} and gcd(i, {n}) = 1")));
    }
    let m = multiplicative_order(i, n);
    let partial = GroupRingElement::from_coeffs(group, &z, vec![BigInt::one(); i as usize])?;
    let i_pow_m = num_traits::pow(BigInt::from(i), m as usize);
    let (correction, rem) = (BigInt::one() - i_pow_m).div_rem(&BigInt::from(n));
    debug_assert!(rem.is_zero());
    let hat = GroupRingElement::from_coeffs(group, &z, vec![correction; n as usize])?;
    let unit = partial.pow(m).try_add(&hat)?;
    let inverse = invert_cyclic(&unit)?;
    Ok(UnitKey {
        unit,
        inverse,
        provenance: Provenance::Bass { n, i, m },
    })
}

/// Bicyclic unit `1 + (1 - a) * b * â` with inverse `1 - (1 - a) * b * â`.
pub fn bicyclic_unit(group: &Group, ring: &CoefficientRing, a: &GroupElement, b: &GroupElement) -> Result<UnitKey> {
    group.check_element(a)?;
    group.check_element(b)?;
    let ord = group.element_order(a);
    let mut terms = Vec::with_capacity(2 * ord as usize);
    let mut a_k = group.identity();
    for _ in 0..ord {
        let b_ak = group.mul_elements(b, &a_k);
        terms.push((group.mul_elements(a, &b_ak), -BigInt::one()));
        terms.push((b_ak, BigInt::one()));
        a_k = group.mul_elements(&a_k, a);
    }
    let x = GroupRingElement::from_terms(group, ring, terms)?;
    let one = GroupRingElement::one(group, ring);
    UnitKey::certify(
        one.try_add(&x)?,
        one.try_sub(&x)?,
        Provenance::Bicyclic {
            a: a.clone(),
            b: b.clone(),
        },
    )
}

/// Image of a cyclic unit under `g -> a`; requires `ord(a) | n`.
pub fn embed_cyclic(key: &UnitKey, target: &Group, a: &GroupElement) -> Result<UnitKey> {
    let n = key
        .unit
        .group()
        .cyclic_order()
        .ok_or_else(|| Error::invalid("embedding needs a cyclic source group"))? as u64;
    target.check_element(a)?;
    if !n.is_multiple_of(target.element_order(a)) {
        return Err(Error::invalid(format!("order of {a} does not divide {n}")));
    }
    let image = |x: &GroupRingElement| -> Result<GroupRingElement> {
        let terms = x
            .terms()
            .into_iter()
            .map(|(e, c)| match e {
                GroupElement::Power(k) => (target.pow_element(a, k), c),
                _ => unreachable!("cyclic element"),
            });
        GroupRingElement::from_terms(target, x.ring(), terms)
    };
    UnitKey::certify(
        image(&key.unit)?,
        image(&key.inverse)?,
        Provenance::Embedded(Box::new(key.provenance.clone())),
    )
}

/// Random cyclic unit with exactly `support` non-zero coefficients.
/// Candidates are drawn until one inverts, which is practical over
/// finite rings only: random integral elements are almost never units.
pub fn random_cyclic_unit(group: &Group, ring: &CoefficientRing, support: usize, seed: u64) -> Result<UnitKey> {
    let n = group
        .cyclic_order()
        .ok_or_else(|| Error::invalid(format!("random units need a cyclic group, got {group}")))?;
    if support == 0 || support > n {
        return Err(Error::invalid(format!("support {support} outside 1..={n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..64 {
        let mut coeffs = vec![BigInt::zero(); n];
        for pos in rand::seq::index::sample(&mut rng, n, support) {
            coeffs[pos] = random_nonzero(&mut rng, ring);
        }
        let candidate = GroupRingElement::from_coeffs(group, ring, coeffs)?;
        if let Ok(inverse) = invert_cyclic(&candidate) {
            return Ok(UnitKey {
                unit: candidate,
                inverse,
                provenance: Provenance::Random { seed },
            });
        }
    }
    Err(Error::NotAUnit(format!("no invertible candidate found over {ring}")))
}

/// Random cyclic unit over a prime field built as `c g^k` times `factors`
/// binomials `a + b g^k`. Each binomial is inverted in closed form:
/// with `y = g^k` of order `d`,
/// `(a + b y) * sum_j a^(d-1-j) (-b)^j y^j = a^d - (-b)^d`.
/// No Euclidean step is involved, so the inverse is known independently.
pub fn binomial_product_unit(group: &Group, ring: &CoefficientRing, factors: usize, seed: u64) -> Result<UnitKey> {
    let n = group
        .cyclic_order()
        .ok_or_else(|| Error::invalid(format!("binomial units need a cyclic group, got {group}")))? as u64;
    let p = ring
        .modulus()
        .filter(|m| crate::crypto::rsa::is_probable_prime(m))
        .ok_or_else(|| Error::invalid(format!("binomial units need a prime modulus, got {ring}")))?
        .clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = rng.gen_range(BigInt::one()..p.clone());
    let shift = rng.gen_range(0..n);
    let mut unit = GroupRingElement::basis(group, ring, GroupElement::Power(shift)).scale(&c);
    let mut inverse = GroupRingElement::basis(group, ring, GroupElement::Power((n - shift) % n))
        .scale(&ring.inv(&c)?);
    let mut made = 0;
    while made < factors {
        let k = rng.gen_range(1..n.max(2)) % n;
        let d = n / num_integer::gcd(n, k);
        let a = rng.gen_range(BigInt::one()..p.clone());
        let b = rng.gen_range(BigInt::one()..p.clone());
        let neg_b = ring.neg(&b);
        let det = ring.sub(&a.modpow(&BigInt::from(d), &p), &neg_b.modpow(&BigInt::from(d), &p));
        if det.is_zero() {
            continue;
        }
        let scale = ring.inv(&det)?;
        let factor = GroupRingElement::from_terms(
            group,
            ring,
            [(GroupElement::Power(0), a.clone()), (GroupElement::Power(k), b)],
        )?;
        let terms = (0..d).map(|j| {
            let coeff = a.modpow(&BigInt::from(d - 1 - j), &p) * neg_b.modpow(&BigInt::from(j), &p) * &scale;
            (GroupElement::Power(j * k % n), coeff)
        });
        let factor_inv = GroupRingElement::from_terms(group, ring, terms)?;
        unit = unit.try_mul(&factor)?;
        inverse = factor_inv.try_mul(&inverse)?;
        made += 1;
    }
    UnitKey::certify(unit, inverse, Provenance::Random { seed })
}

fn random_nonzero(rng: &mut ChaCha8Rng, ring: &CoefficientRing) -> Coeff {
    match ring.modulus() {
        Some(m) => rng.gen_range(BigInt::one()..m.clone()),
        None => {
            let v: i64 = rng.gen_range(1..=9);
            BigInt::from(if rng.gen_bool(0.5) { v } else { -v })
        }
    }
}

/// Inverse of `u` in `R[C_n] = R[x]/(x^n - 1)` by extended Euclid, or
/// `NotAUnit`. Over `Z` the rational inverse must come out integral;
/// over a composite modulus a blocked pivot splits the modulus (coprime
/// parts by CRT, repeated primes by Newton lifting).
pub fn invert_cyclic(u: &GroupRingElement) -> Result<GroupRingElement> {
    let group = u.group();
    let n = group
        .cyclic_order()
        .ok_or_else(|| Error::Unsupported(format!("Euclidean inversion needs a cyclic group, got {group}")))?;
    let coeffs = u.dense_coeffs()?;
    let inverse = match u.ring().modulus() {
        None => invert_over_integers(&coeffs, n)?,
        Some(m) => invert_over_modulus(&coeffs, n, m)?,
    };
    let v = GroupRingElement::from_coeffs(group, u.ring(), inverse)?;
    let one = GroupRingElement::one(group, u.ring());
    if u.try_mul(&v)? != one || v.try_mul(u)? != one {
        return Err(Error::NotAUnit("inverse failed verification".into()));
    }
    Ok(v)
}

fn not_a_unit(degree: usize) -> Error {
    Error::NotAUnit(format!("shares a factor of degree {degree} with x^n - 1"))
}

fn invert_over_integers(coeffs: &[BigInt], n: usize) -> Result<Vec<BigInt>> {
    let q: Vec<BigRational> = coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect();
    match poly::invert_mod_xn_minus_1(&Rationals, &q, n).expect("a field has no pivot failures") {
        EuclidOutcome::NonTrivialGcd(d) => Err(not_a_unit(d)),
        EuclidOutcome::Inverse(v) => v
            .into_iter()
            .map(|c| {
                if c.is_integer() {
                    Ok(c.to_integer())
                } else {
                    Err(Error::NotAUnit(format!("rational inverse has coefficient {c}")))
                }
            })
            .collect(),
    }
}

fn euclid_mod(coeffs: &[BigInt], n: usize, m: &BigInt) -> std::result::Result<EuclidOutcome<BigInt>, PivotFailure> {
    match m.to_u64().filter(|&x| x < 1 << 63) {
        Some(small) => {
            let u: Vec<u64> = coeffs
                .iter()
                .map(|c| c.mod_floor(m).to_u64().expect("reduced"))
                .collect();
            Ok(match poly::invert_mod_xn_minus_1(&SmallMod(small), &u, n)? {
                EuclidOutcome::Inverse(v) => EuclidOutcome::Inverse(v.into_iter().map(BigInt::from).collect()),
                EuclidOutcome::NonTrivialGcd(d) => EuclidOutcome::NonTrivialGcd(d),
            })
        }
        None => {
            let u: Vec<BigInt> = coeffs.iter().map(|c| c.mod_floor(m)).collect();
            poly::invert_mod_xn_minus_1(&BigMod(m.clone()), &u, n)
        }
    }
}

fn invert_over_modulus(coeffs: &[BigInt], n: usize, m: &BigInt) -> Result<Vec<BigInt>> {
    let g = match euclid_mod(coeffs, n, m) {
        Ok(EuclidOutcome::Inverse(v)) => return Ok(v),
        Ok(EuclidOutcome::NonTrivialGcd(d)) => return Err(not_a_unit(d)),
        Err(PivotFailure(g)) => g,
    };
    // Split m = m1 * m2 where m1 collects every prime power shared with g.
    let mut m1 = BigInt::one();
    let mut m2 = m.clone();
    loop {
        let t = m2.gcd(&g);
        if t.is_one() {
            break;
        }
        m1 *= &t;
        m2 /= &t;
    }
    if !m2.is_one() {
        let v1 = invert_over_modulus(coeffs, n, &m1)?;
        let v2 = invert_over_modulus(coeffs, n, &m2)?;
        let inv = crate::algebra::coeffs::mod_inverse(&m1, &m2).expect("coprime parts");
        return Ok(v1
            .iter()
            .zip(&v2)
            .map(|(a, b)| (a + &m1 * ((b - a) * &inv).mod_floor(&m2)).mod_floor(m))
            .collect());
    }
    // Every prime of m divides g < m: invert mod g, then lift v <- v (2 - u v).
    let mut v = invert_over_modulus(coeffs, n, &g)?;
    let mut modulus = g;
    while !(&modulus % m).is_zero() {
        modulus = &modulus * &modulus;
        let uv = cyclic_product_mod(coeffs, &v, &modulus);
        let mut two_minus: Vec<BigInt> = uv.into_iter().map(|c| (-c).mod_floor(&modulus)).collect();
        two_minus[0] += 2;
        v = cyclic_product_mod(&v, &two_minus, &modulus);
    }
    Ok(v.into_iter().map(|c| c.mod_floor(m)).collect())
}

fn cyclic_product_mod(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    crate::algebra::ntt::cyclic_convolution(a, b)
        .into_iter()
        .map(|c| c.mod_floor(m))
        .collect()
}

/// Public form of a key. Only expanded products are ever exposed.
#[derive(Clone, Debug, PartialEq)]
pub enum PublicKey {
    Right(GroupRingElement),
    Left(GroupRingElement),
    /// `c = left * w * right`
    TwoSided {
        left: GroupRingElement,
        right: GroupRingElement,
    },
    /// Right-sided key over formal length `s`; the group order is withheld.
    Disguised(ExtendedElement),
}

impl PublicKey {
    pub fn side(&self) -> Side {
        match self {
            PublicKey::Right(_) | PublicKey::Disguised(_) => Side::Right,
            PublicKey::Left(_) => Side::Left,
            PublicKey::TwoSided { .. } => Side::TwoSided,
        }
    }

    pub fn ring(&self) -> &CoefficientRing {
        match self {
            PublicKey::Right(u) | PublicKey::Left(u) => u.ring(),
            PublicKey::TwoSided { right, .. } => right.ring(),
            PublicKey::Disguised(x) => x.ring(),
        }
    }

    /// Coefficients reduced mod `m`.
    pub fn reduce_mod(&self, m: &BigInt) -> Result<PublicKey> {
        let target = CoefficientRing::modulo(m.clone())?;
        let map = |x: &GroupRingElement| x.map_ring(&target);
        Ok(match self {
            PublicKey::Right(u) => PublicKey::Right(map(u)),
            PublicKey::Left(u) => PublicKey::Left(map(u)),
            PublicKey::TwoSided { left, right } => PublicKey::TwoSided {
                left: map(left),
                right: map(right),
            },
            PublicKey::Disguised(x) => PublicKey::Disguised(ExtendedElement::new(&target, x.coeffs().to_vec())),
        })
    }

    /// Group of the key, `None` for disguised keys.
    pub fn group(&self) -> Option<&Group> {
        match self {
            PublicKey::Right(u) | PublicKey::Left(u) => Some(u.group()),
            PublicKey::TwoSided { right, .. } => Some(right.group()),
            PublicKey::Disguised(_) => None,
        }
    }
}

/// Inverse factors in application order: a ciphertext `c` becomes
/// `f * c` for each left factor and `c * f` for each right factor.
#[derive(Clone, Debug, PartialEq)]
pub struct PrivateKey {
    pub side: Side,
    pub left_factors: Vec<GroupRingElement>,
    pub right_factors: Vec<GroupRingElement>,
    /// Formal length of the matching disguised public key.
    pub extlen: Option<usize>,
}

impl PrivateKey {
    pub fn group(&self) -> &Group {
        self.left_factors
            .first()
            .or(self.right_factors.first())
            .expect("a private key holds at least one factor")
            .group()
    }

    pub fn ring(&self) -> &CoefficientRing {
        self.left_factors
            .first()
            .or(self.right_factors.first())
            .expect("a private key holds at least one factor")
            .ring()
    }

    /// Factors with coefficients reduced mod `m`.
    pub fn reduce_mod(&self, m: &BigInt) -> Result<PrivateKey> {
        let target = CoefficientRing::modulo(m.clone())?;
        Ok(self.map_factors(|x| x.map_ring(&target)))
    }

    fn map_factors(&self, f: impl Fn(&GroupRingElement) -> GroupRingElement) -> PrivateKey {
        PrivateKey {
            side: self.side,
            left_factors: self.left_factors.iter().map(&f).collect(),
            right_factors: self.right_factors.iter().map(&f).collect(),
            extlen: self.extlen,
        }
    }
}

#[derive(Clone, Debug)]
pub struct KeyPair {
    pub public: PublicKey,
    pub private: PrivateKey,
}

impl KeyPair {
    /// `left` multiplies the message from the left, `right` from the right;
    /// either chain may be empty but not both.
    pub fn from_chains(left: &[UnitKey], right: &[UnitKey]) -> Result<KeyPair> {
        let expand = |chain: &[UnitKey]| -> Result<Option<GroupRingElement>> {
            if chain.is_empty() {
                return Ok(None);
            }
            Ok(Some(UnitKey::product(chain)?.unit))
        };
        let (l, r) = (expand(left)?, expand(right)?);
        if let (Some(a), Some(b)) = (&l, &r) {
            a.check_compatible(b)?;
        }
        let public = match (l, r) {
            (None, None) => return Err(Error::invalid("a key needs at least one unit")),
            (None, Some(u)) => PublicKey::Right(u),
            (Some(u), None) => PublicKey::Left(u),
            (Some(left), Some(right)) => PublicKey::TwoSided { left, right },
        };
        let private = PrivateKey {
            side: public.side(),
            left_factors: left.iter().map(|k| k.inverse.clone()).collect(),
            right_factors: right.iter().rev().map(|k| k.inverse.clone()).collect(),
            extlen: None,
        };
        Ok(KeyPair { public, private })
    }

    pub fn right(key: &UnitKey) -> KeyPair {
        Self::from_chains(&[], std::slice::from_ref(key)).expect("single unit")
    }

    pub fn left(key: &UnitKey) -> KeyPair {
        Self::from_chains(std::slice::from_ref(key), &[]).expect("single unit")
    }

    pub fn two_sided(v: &UnitKey, u: &UnitKey) -> Result<KeyPair> {
        Self::from_chains(std::slice::from_ref(v), std::slice::from_ref(u))
    }

    /// Replaces a right-sided cyclic public unit by a padded form of length `s`.
    pub fn disguised(&self, s: usize, seed: u64) -> Result<KeyPair> {
        let u = match &self.public {
            PublicKey::Right(u) => u,
            _ => return Err(Error::SideMismatch("only right-sided keys can be disguised".into())),
        };
        let padded = disguise(u, s, seed)?;
        let mut private = self.private.clone();
        private.extlen = Some(s);
        Ok(KeyPair {
            public: PublicKey::Disguised(padded),
            private,
        })
    }

    /// Coefficients of both halves reduced mod `m`.
    pub fn reduce_mod(&self, m: &BigInt) -> Result<KeyPair> {
        Ok(KeyPair {
            public: self.public.reduce_mod(m)?,
            private: self.private.reduce_mod(m)?,
        })
    }
}

/// Right-sided key for the expanded product `keys[0] * keys[1] * ...`;
/// the private chain holds the inverses last-to-first.
pub fn unit_product(keys: &[UnitKey]) -> Result<KeyPair> {
    KeyPair::from_chains(&[], keys)
}

/// Right-sided key for `key^k`.
pub fn unit_power(key: &UnitKey, k: u64) -> Result<KeyPair> {
    if k == 0 {
        return Err(Error::invalid("power must be at least 1"));
    }
    Ok(KeyPair::right(&key.power(k)))
}

/// Pads `u` over `C_n` to formal length `s`: seeded `β_j` sit at `j >= n`
/// and are subtracted from `α_(j mod n)`, so folding gives back `u`.
pub fn disguise(u: &GroupRingElement, s: usize, seed: u64) -> Result<ExtendedElement> {
    let mut padded = ExtendedElement::pad(u, s)?;
    let n = u.group().cyclic_order().expect("pad checked the group");
    let ring = u.ring().clone();
    let mut coeffs = padded.coeffs().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = u.max_abs_coeff().max(BigInt::from(100));
    for j in n..s {
        let beta = match ring.modulus() {
            Some(m) => rng.gen_range(BigInt::zero()..m.clone()),
            None => rng.gen_range(-bound.clone()..=bound.clone()),
        };
        coeffs[j % n] = ring.sub(&coeffs[j % n], &beta);
        coeffs[j] = ring.reduce(&beta);
    }
    padded = ExtendedElement::new(&ring, coeffs);
    Ok(padded)
}

/// Bounded torsion check: smallest `k <= limit` with `u^k = 1`.
pub fn torsion_order(u: &GroupRingElement, limit: u64) -> Option<u64> {
    let mut acc = u.clone();
    for k in 1..=limit {
        if acc.is_one() {
            return Some(k);
        }
        acc = acc.try_mul(u).ok()?;
    }
    None
}

/// Largest absolute coefficient, handy for sizing moduli.
pub fn coefficient_bound(u: &GroupRingElement) -> BigInt {
    u.terms().into_iter().map(|(_, c)| c.abs()).max().unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::groups::GroupSpec;
    use crate::algebra::perm::Permutation;

    fn z() -> CoefficientRing {
        CoefficientRing::Integers
    }

    fn perm(d: usize, cycles: &[&[u32]]) -> GroupElement {
        GroupElement::Perm(Permutation::from_cycles(d, cycles).unwrap())
    }

    #[test]
    fn bass_example_c5() {
        let g = GroupSpec::cyclic(5).unwrap();
        let key = bass_cyclic_unit(&g, 2).unwrap();
        assert_eq!(key.unit(), &GroupRingElement::from_i64s(&g, &z(), &[-2, 1, 3, 1, -2]).unwrap());
        assert_eq!(key.provenance(), &Provenance::Bass { n: 5, i: 2, m: 4 });
    }

    #[test]
    fn bass_parameters() {
        let g = GroupSpec::cyclic(16).unwrap();
        assert!(bass_cyclic_unit(&g, 1).unwrap().unit().is_one());
        assert!(bass_cyclic_unit(&g, 4).is_err());
        for i in [3u64, 5, 7, 9, 11, 13, 15] {
            let m = multiplicative_order(i, 16);
            let i_m: BigInt = num_traits::pow(BigInt::from(i), m as usize);
            assert!(((BigInt::one() - i_m) % 16u32).is_zero());
            bass_cyclic_unit(&g, i).unwrap();
        }
    }

    #[test]
    fn monomial_inverse() {
        let g = GroupSpec::cyclic(9).unwrap();
        let u = GroupRingElement::basis(&g, &z(), GroupElement::Power(4));
        let v = invert_cyclic(&u).unwrap();
        assert_eq!(v, GroupRingElement::basis(&g, &z(), GroupElement::Power(5)));
    }

    #[test]
    fn zero_divisor_is_not_a_unit() {
        let g = GroupSpec::cyclic(2).unwrap();
        let u = GroupRingElement::from_i64s(&g, &z(), &[1, 1]).unwrap();
        assert!(matches!(invert_cyclic(&u), Err(Error::NotAUnit(_))));
        // no candidate with small coefficients works either
        for a in -6i64..=6 {
            for b in -6i64..=6 {
                let v = GroupRingElement::from_i64s(&g, &z(), &[a, b]).unwrap();
                assert!(!(&u * &v).is_one());
            }
        }
    }

    #[test]
    fn rational_but_not_integral() {
        // 3 is invertible over Q but not over Z
        let g = GroupSpec::cyclic(4).unwrap();
        let u = GroupRingElement::from_i64s(&g, &z(), &[3]).unwrap();
        assert!(matches!(invert_cyclic(&u), Err(Error::NotAUnit(_))));
    }

    #[test]
    fn composite_moduli_split_and_lift() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for m in [16i64, 12, 36, 1000, 2 * 3 * 5 * 7] {
            let ring = CoefficientRing::modulo(m).unwrap();
            let g = GroupSpec::cyclic(8).unwrap();
            let mut found = 0;
            for _ in 0..300 {
                let c: Vec<i64> = (0..8).map(|_| rng.gen_range(0..m)).collect();
                let u = GroupRingElement::from_i64s(&g, &ring, &c).unwrap();
                match invert_cyclic(&u) {
                    Ok(v) => {
                        assert!((&u * &v).is_one());
                        found += 1;
                    }
                    Err(Error::NotAUnit(_)) => {
                        // a unit mod m is exactly a unit mod every prime factor
                        let primes = (2..=m).filter(|p| m % p == 0 && (2..*p).all(|d| p % d != 0));
                        let all_units = primes
                            .map(|p| u.map_ring(&CoefficientRing::modulo(p).unwrap()))
                            .all(|red| invert_cyclic(&red).is_ok());
                        assert!(!all_units, "missed a unit mod {m}: {u}");
                    }
                    Err(e) => panic!("{e}"),
                }
            }
            assert!(found > 0, "no units found mod {m}");
        }
    }

    #[test]
    fn units_from_integers_invert_after_reduction() {
        let g = GroupSpec::cyclic(16).unwrap();
        let key = bass_cyclic_unit(&g, 3).unwrap();
        for m in [2i64, 16, 97, 1 << 40] {
            let r = key.reduce_mod(&BigInt::from(m)).unwrap();
            assert_eq!(invert_cyclic(r.unit()).unwrap(), *r.inverse());
        }
    }

    #[test]
    fn bicyclic_in_s3() {
        let g = GroupSpec::symmetric(3).unwrap();
        let a = perm(3, &[&[0, 1]]);
        let b = perm(3, &[&[0, 1, 2]]);
        let key = bicyclic_unit(&g, &z(), &a, &b).unwrap();
        assert!(!key.unit().is_one());
        assert_eq!(key.unit().support_len(), 5);
        // <(0 1 2)> is normal in S_3, so with the roles swapped the unit is trivial
        assert!(bicyclic_unit(&g, &z(), &b, &a).unwrap().unit().is_one());
        let two = GroupRingElement::one(&g, &z()).scale(&BigInt::from(2));
        assert!((key.unit() * &(&two - key.unit())).is_one());
        // b a power of a gives the trivial unit
        let b2 = g.pow_element(&b, 2);
        assert!(bicyclic_unit(&g, &z(), &b, &b2).unwrap().unit().is_one());
    }

    #[test]
    fn bicyclic_nilpotent_everywhere_in_s3() {
        let g = GroupSpec::symmetric(3).unwrap();
        let one = GroupRingElement::one(&g, &z());
        for i in 0..6 {
            for j in 0..6 {
                let (a, b) = (g.element(i).unwrap(), g.element(j).unwrap());
                let x = bicyclic_unit(&g, &z(), &a, &b).unwrap().unit() - &one;
                assert!((&x * &x).is_zero());
            }
        }
    }

    #[test]
    fn bicyclic_nilpotent_sampled() {
        let d4 = GroupSpec::permutation(4, vec![
            Permutation::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap(),
            Permutation::from_cycles(4, &[&[0, 2]]).unwrap(),
        ])
        .unwrap();
        for g in [GroupSpec::symmetric(4).unwrap(), d4] {
            let one = GroupRingElement::one(&g, &z());
            let n = g.dense_order().unwrap();
            for i in (0..n).step_by(3) {
                for j in (0..n).step_by(5) {
                    let (a, b) = (g.element(i).unwrap(), g.element(j).unwrap());
                    let x = bicyclic_unit(&g, &z(), &a, &b).unwrap().unit() - &one;
                    assert!((&x * &x).is_zero());
                }
            }
        }
    }

    #[test]
    fn products_and_chains() {
        let g = GroupSpec::cyclic(16).unwrap();
        let a = bass_cyclic_unit(&g, 3).unwrap();
        let b = bass_cyclic_unit(&g, 5).unwrap();
        let single = unit_product(std::slice::from_ref(&a)).unwrap();
        assert_eq!(single.public, PublicKey::Right(a.unit().clone()));
        let pair = unit_product(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(pair.private.right_factors, vec![b.inverse().clone(), a.inverse().clone()]);
        let left = KeyPair::from_chains(&[a.clone(), b.clone()], &[]).unwrap();
        assert_eq!(left.private.left_factors, vec![a.inverse().clone(), b.inverse().clone()]);
    }

    #[test]
    fn power_compatibility() {
        let g = GroupSpec::cyclic(8).unwrap();
        let key = bass_cyclic_unit(&g, 3).unwrap();
        for (j, k) in [(1u64, 1u64), (2, 3), (4, 5)] {
            assert_eq!(key.power(j + k).unit(), &(key.power(j).unit() * key.power(k).unit()));
        }
        assert!((key.power(5).unit() * key.power(5).inverse()).is_one());
        assert_eq!(unit_power(&key, 1).unwrap().public, PublicKey::Right(key.unit().clone()));
        assert!(unit_power(&key, 0).is_err());
    }

    #[test]
    fn disguise_folds_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = GroupSpec::cyclic(16).unwrap();
        for seed in 0..20 {
            let c: Vec<i64> = (0..16).map(|_| rng.gen_range(-30..30)).collect();
            let u = GroupRingElement::from_i64s(&g, &z(), &c).unwrap();
            let padded = disguise(&u, 40, seed).unwrap();
            assert_eq!(padded.len(), 40);
            assert_eq!(padded.fold(&g).unwrap(), u);
        }
        let u = GroupRingElement::one(&g, &z());
        assert_eq!(disguise(&u, 16, 0).unwrap(), ExtendedElement::pad(&u, 16).unwrap());
        assert!(disguise(&u, 15, 0).is_err());
    }

    #[test]
    fn embedding_preserves_unit_property() {
        let key = bass_cyclic_unit(&GroupSpec::cyclic(5).unwrap(), 2).unwrap();
        let s5 = GroupSpec::symmetric(5).unwrap();
        let a = perm(5, &[&[0, 1, 2, 3, 4]]);
        let e = embed_cyclic(&key, &s5, &a).unwrap();
        assert_eq!(e.unit().support_len(), 5);
        assert!(embed_cyclic(&key, &s5, &perm(5, &[&[0, 1]])).is_err());
    }

    #[test]
    fn binomial_products_carry_their_inverse() {
        let g = GroupSpec::cyclic(32).unwrap();
        let ring = CoefficientRing::modulo(97).unwrap();
        for seed in 0..20 {
            let key = binomial_product_unit(&g, &ring, 6, seed).unwrap();
            assert!(key.unit().support_len() > 1);
        }
        assert!(binomial_product_unit(&g, &CoefficientRing::modulo(96).unwrap(), 2, 0).is_err());
    }

    #[test]
    fn random_units_over_prime() {
        let g = GroupSpec::cyclic(32).unwrap();
        let ring = CoefficientRing::modulo(97).unwrap();
        for seed in 0..10 {
            let key = random_cyclic_unit(&g, &ring, 32, seed).unwrap();
            assert!((key.unit() * key.inverse()).is_one());
        }
    }
}
