//! File plumbing shared by the commands, plus exit-code mapping.

use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_traits::Zero;

use grunits::crypto::pipeline::MessageCodec;
use grunits::format::{parse_message, parse_private_key, parse_public_key};
use grunits::{CoefficientRing, Error, Group, GroupRingElement, PrivateKey, PublicKey, UnitKey};
use grunits::keys::units::Provenance;

pub const VALIDATION: u8 = 2;
pub const CRYPTO_MISMATCH: u8 = 3;
pub const ATTACK_FAILED: u8 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub msg: String,
}

impl Failure {
    pub fn new(code: u8, msg: impl Into<String>) -> Self {
        Failure { code, msg: msg.into() }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Self::new(VALIDATION, msg)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::VerificationFailed => CRYPTO_MISMATCH,
            _ => VALIDATION,
        };
        Failure::new(code, e.to_string())
    }
}

pub fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::invalid(format!("cannot read {}: {e}", path.display())))
}

pub fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::invalid(format!("cannot write {}: {e}", path.display())))
}

/// `base` with an extra extension, so `keys/alice` gives `keys/alice.pub`.
pub fn with_ext(base: &Path, ext: &str) -> PathBuf {
    let mut s = base.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn in_file<T>(path: &Path, r: Result<T, Error>) -> Result<T, Failure> {
    r.map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}

pub fn load_public(path: &Path) -> Result<PublicKey, Failure> {
    in_file(path, parse_public_key(&read(path)?))
}

pub fn load_private(path: &Path) -> Result<PrivateKey, Failure> {
    in_file(path, parse_private_key(&read(path)?))
}

/// Rebuilds the unit and its inverse from a key pair written by `keygen`.
pub fn load_unit(base: &Path) -> Result<UnitKey, Failure> {
    let public = load_public(&with_ext(base, "pub"))?;
    let private = load_private(&with_ext(base, "key"))?;
    let unit = match &public {
        PublicKey::Right(u) | PublicKey::Left(u) => u.clone(),
        PublicKey::Disguised(x) => x.fold(private.group())?,
        PublicKey::TwoSided { .. } => {
            return Err(Failure::invalid(format!("{}: two-sided keys hold two units", base.display())))
        }
    };
    let mut inverse = GroupRingElement::one(unit.group(), unit.ring());
    for f in &private.right_factors {
        inverse = inverse.try_mul(f)?;
    }
    for f in &private.left_factors {
        inverse = f.try_mul(&inverse)?;
    }
    UnitKey::certify(unit, inverse, Provenance::Trial)
        .map_err(|e| Failure::invalid(format!("{}: halves do not match: {e}", base.display())))
}

/// Plaintext for a key with group `group` (or a cyclic group sized to the
/// input when the group is hidden). With `base` the file holds one integer;
/// otherwise a list of coefficients or a `GRMSG` file.
pub fn read_plaintext(
    path: &Path,
    group: Option<&Group>,
    ring: &CoefficientRing,
    base: Option<u64>,
) -> Result<(GroupRingElement, Option<usize>), Failure> {
    let text = read(path)?;
    let trimmed = text.trim();
    if trimmed.starts_with("GRMSG") {
        let msg = in_file(path, parse_message(&text))?;
        let w = msg
            .body
            .element()
            .ok_or_else(|| Failure::invalid("plaintext cannot be an extended ciphertext"))?
            .clone();
        if let Some(g) = group {
            if !g.same_group(w.group()) {
                return Err(Failure::invalid(format!("plaintext is over {}, key over {g}", w.group())));
            }
        }
        return Ok((w.map_ring(ring), None));
    }
    let hidden = |len: usize| grunits::GroupSpec::cyclic(len.max(1) as u64);
    match base {
        Some(b) => {
            let value: BigInt = if trimmed.is_empty() {
                BigInt::zero()
            } else {
                trimmed
                    .parse()
                    .map_err(|_| Failure::invalid(format!("{}: expected one decimal integer", path.display())))?
            };
            let g = match group {
                Some(g) => g.clone(),
                None => hidden(MessageCodec::new(&hidden(1)?, b)?.digits_of(&value)?.len())?,
            };
            let codec = MessageCodec::new(&g, b)?;
            let digits = codec.digits_of(&value)?;
            Ok((codec.encode_digits(&digits, ring)?, Some(digits.len())))
        }
        None => {
            let values = trimmed
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<BigInt>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| Failure::invalid(format!("{}: expected integer coefficients", path.display())))?;
            let g = match group {
                Some(g) => g.clone(),
                None => hidden(values.len())?,
            };
            let n = g.dense_order()?;
            if values.len() > n {
                return Err(Error::TooManyDigits {
                    digits: values.len(),
                    capacity: n,
                }
                .into());
            }
            Ok((GroupRingElement::from_coeffs(&g, ring, values)?, None))
        }
    }
}

/// Coefficients in listing order without trailing zeros, signed over `Z`.
pub fn format_coefficients(w: &GroupRingElement) -> Result<String, Failure> {
    let mut values = w.dense_coeffs()?;
    while values.last().is_some_and(|v| v.is_zero()) {
        values.pop();
    }
    let parts: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    Ok(parts.join(" ") + "\n")
}
