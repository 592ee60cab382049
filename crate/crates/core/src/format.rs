//! Line-based text formats for keys, messages, RSA keys and coded data.
//!
//! Blank lines and lines starting with `#` are ignored. Elements are either
//! one `coeffs c0 c1 ...` line (canonical residues, listing order) or a
//! `sparse <t>` line followed by `t` lines `term <coeff> <element>`.

use std::fmt::Write as _;

use num_bigint::BigInt;

use crate::algebra::coeffs::CoefficientRing;
use crate::algebra::extended::ExtendedElement;
use crate::algebra::groupring::{Coeffs, GroupRingElement};
use crate::algebra::groups::{parse_group, Group, GroupElement};
use crate::coding::hamming::{bits_to_string, parse_bits, CodedBits, CodedCoeffs};
use crate::crypto::pipeline::Ciphertext;
use crate::crypto::rsa::{LayerOrder, RsaKey, RsaPrivateKey, RsaPublicKey};
use crate::error::{Error, Result};
use crate::keys::units::{PrivateKey, PublicKey, Side};

const KEY_MAGIC: &str = "GRKEY v1";
const PRIVATE_MAGIC: &str = "GRKEY v1 private";
const MSG_MAGIC: &str = "GRMSG v1";
const RSA_MAGIC: &str = "RSAKEY v1";
const RSA_PRIVATE_MAGIC: &str = "RSAKEY v1 private";
const CODE_MAGIC: &str = "GRCODE v1";

struct Lines<'a> {
    items: Vec<(usize, &'a str)>,
    at: usize,
}

/// Line of the most recently consumed item, for errors about its value.
fn consumed_line(lines: &Lines) -> usize {
    match lines.at {
        0 => 1,
        k => lines.items[k - 1].0,
    }
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let items = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        Lines { items, at: 0 }
    }

    fn line_no(&self) -> usize {
        self.items.get(self.at).map_or_else(|| self.items.last().map_or(1, |l| l.0 + 1), |l| l.0)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.line_no(), msg)
    }

    fn peek_keyword(&self) -> Option<&'a str> {
        self.items
            .get(self.at)
            .map(|(_, l)| l.split_whitespace().next().unwrap_or(""))
    }

    fn exact(&mut self, text: &str) -> Result<()> {
        match self.items.get(self.at) {
            Some((_, l)) if *l == text => {
                self.at += 1;
                Ok(())
            }
            Some((_, l)) => Err(self.err(format!("expected `{text}`, found `{l}`"))),
            None => Err(self.err(format!("expected `{text}`, found end of input"))),
        }
    }

    /// Remainder of the next line, which must start with `keyword`.
    fn field(&mut self, keyword: &str) -> Result<&'a str> {
        match self.peek_keyword() {
            Some(k) if k == keyword => {
                let (_, l) = self.items[self.at];
                self.at += 1;
                Ok(l[keyword.len()..].trim())
            }
            Some(k) => Err(self.err(format!("expected `{keyword}`, found `{k}`"))),
            None => Err(self.err(format!("expected `{keyword}`, found end of input"))),
        }
    }

    fn optional(&mut self, keyword: &str) -> Option<&'a str> {
        (self.peek_keyword() == Some(keyword)).then(|| self.field(keyword).expect("peeked"))
    }

    fn parsed<T: std::str::FromStr>(&mut self, keyword: &str) -> Result<T> {
        let line = self.line_no();
        let raw = self.field(keyword)?;
        raw.parse()
            .map_err(|_| Error::parse(line, format!("bad value `{raw}` for `{keyword}`")))
    }

    fn optional_parsed<T: std::str::FromStr>(&mut self, keyword: &str) -> Result<Option<T>> {
        if self.peek_keyword() == Some(keyword) {
            self.parsed(keyword).map(Some)
        } else {
            Ok(None)
        }
    }

    fn finish(&self) -> Result<()> {
        match self.items.get(self.at) {
            None => Ok(()),
            Some((_, l)) => Err(self.err(format!("unexpected trailing line `{l}`"))),
        }
    }

    fn value_err(&self, msg: impl Into<String>) -> Error {
        Error::parse(consumed_line(self), msg)
    }

    fn wrap<T>(&self, r: Result<T>) -> Result<T> {
        r.map_err(|e| match e {
            Error::Parse { .. } => e,
            other => self.value_err(other.to_string()),
        })
    }
}

fn parse_ints(lines: &Lines, raw: &str) -> Result<Vec<BigInt>> {
    raw.split_whitespace()
        .map(|t| t.parse::<BigInt>().map_err(|_| lines.value_err(format!("bad integer `{t}`"))))
        .collect()
}

fn write_ints(out: &mut String, keyword: &str, values: &[BigInt]) {
    out.push_str(keyword);
    for v in values {
        let _ = write!(out, " {v}");
    }
    out.push('\n');
}

fn write_element(out: &mut String, x: &GroupRingElement) {
    match x.coeffs() {
        Coeffs::Dense(v) => write_ints(out, "coeffs", v),
        Coeffs::Sparse(map) => {
            let _ = writeln!(out, "sparse {}", map.len());
            for (e, c) in map {
                let _ = writeln!(out, "term {c} {e}");
            }
        }
    }
}

fn read_element(lines: &mut Lines, group: &Group, ring: &CoefficientRing) -> Result<GroupRingElement> {
    if lines.peek_keyword() == Some("sparse") {
        let t: usize = lines.parsed("sparse")?;
        let mut terms = Vec::with_capacity(t);
        for _ in 0..t {
            let raw = lines.field("term")?;
            let (c, e) = raw
                .split_once(char::is_whitespace)
                .ok_or_else(|| lines.value_err("term needs a coefficient and an element"))?;
            let c: BigInt = c.parse().map_err(|_| lines.value_err(format!("bad coefficient `{c}`")))?;
            let e: GroupElement = lines.wrap(e.parse())?;
            terms.push((e, c));
        }
        return lines.wrap(GroupRingElement::from_terms(group, ring, terms));
    }
    let raw = lines.field("coeffs")?;
    let values = parse_ints(lines, raw)?;
    let n = lines.wrap(group.dense_order())?;
    if values.len() != n {
        return Err(lines.value_err(format!("{} coefficients for a group of order {n}", values.len())));
    }
    lines.wrap(GroupRingElement::from_coeffs(group, ring, values))
}

fn write_group(out: &mut String, group: &Group) {
    let _ = writeln!(out, "group {group}");
    if let Some(p) = group.listing_permutation() {
        out.push_str("listing");
        for i in p {
            let _ = write!(out, " {i}");
        }
        out.push('\n');
    }
}

fn read_group(lines: &mut Lines) -> Result<Group> {
    let raw = lines.field("group")?;
    let group = lines.wrap(parse_group(raw))?;
    match lines.optional("listing") {
        None => Ok(group),
        Some(raw) => {
            let perm = raw
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|_| lines.value_err(format!("bad listing index `{t}`"))))
                .collect::<Result<Vec<_>>>()?;
            lines.wrap(group.with_listing_permutation(perm))
        }
    }
}

fn read_ring(lines: &mut Lines) -> Result<CoefficientRing> {
    let raw = lines.field("ring")?;
    lines.wrap(raw.parse())
}

pub fn public_key_to_string(key: &PublicKey) -> String {
    let mut out = format!("{KEY_MAGIC}\n");
    match key {
        PublicKey::Disguised(x) => {
            let _ = writeln!(out, "extlen {}", x.len());
            let _ = writeln!(out, "ring {}", x.ring());
            let _ = writeln!(out, "side {}", Side::Right);
            write_ints(&mut out, "coeffs", x.coeffs());
        }
        PublicKey::Right(u) | PublicKey::Left(u) => {
            write_group(&mut out, u.group());
            let _ = writeln!(out, "ring {}", u.ring());
            let _ = writeln!(out, "side {}", key.side());
            write_element(&mut out, u);
        }
        PublicKey::TwoSided { left, right } => {
            write_group(&mut out, left.group());
            let _ = writeln!(out, "ring {}", left.ring());
            let _ = writeln!(out, "side {}", Side::TwoSided);
            out.push_str("left\n");
            write_element(&mut out, left);
            out.push_str("right\n");
            write_element(&mut out, right);
        }
    }
    out
}

pub fn parse_public_key(text: &str) -> Result<PublicKey> {
    let mut lines = Lines::new(text);
    lines.exact(KEY_MAGIC)?;
    let key = if let Some(s) = lines.optional_parsed::<usize>("extlen")? {
        let ring = read_ring(&mut lines)?;
        let side: Side = lines.parsed("side")?;
        if side != Side::Right {
            return Err(lines.value_err("disguised keys are right-sided"));
        }
        let raw = lines.field("coeffs")?;
        let values = parse_ints(&lines, raw)?;
        if values.len() != s {
            return Err(lines.value_err(format!("{} coefficients for extended length {s}", values.len())));
        }
        PublicKey::Disguised(ExtendedElement::new(&ring, values))
    } else {
        let group = read_group(&mut lines)?;
        let ring = read_ring(&mut lines)?;
        let side: Side = lines.parsed("side")?;
        match side {
            Side::Right => PublicKey::Right(read_element(&mut lines, &group, &ring)?),
            Side::Left => PublicKey::Left(read_element(&mut lines, &group, &ring)?),
            Side::TwoSided => {
                lines.exact("left")?;
                let left = read_element(&mut lines, &group, &ring)?;
                lines.exact("right")?;
                let right = read_element(&mut lines, &group, &ring)?;
                PublicKey::TwoSided { left, right }
            }
        }
    };
    lines.finish()?;
    Ok(key)
}

fn write_factors(out: &mut String, keyword: &str, factors: &[GroupRingElement]) {
    let _ = writeln!(out, "{keyword} {}", factors.len());
    for f in factors {
        write_element(out, f);
    }
}

fn read_factors(lines: &mut Lines, keyword: &str, group: &Group, ring: &CoefficientRing) -> Result<Vec<GroupRingElement>> {
    let k: usize = lines.parsed(keyword)?;
    (0..k).map(|_| read_element(lines, group, ring)).collect()
}

pub fn private_key_to_string(key: &PrivateKey) -> String {
    let mut out = format!("{PRIVATE_MAGIC}\n");
    write_group(&mut out, key.group());
    let _ = writeln!(out, "ring {}", key.ring());
    let _ = writeln!(out, "side {}", key.side);
    if let Some(s) = key.extlen {
        let _ = writeln!(out, "extlen {s}");
    }
    match key.side {
        Side::Right => write_factors(&mut out, "factors", &key.right_factors),
        Side::Left => write_factors(&mut out, "factors", &key.left_factors),
        Side::TwoSided => {
            write_factors(&mut out, "left-factors", &key.left_factors);
            write_factors(&mut out, "right-factors", &key.right_factors);
        }
    }
    out
}

pub fn parse_private_key(text: &str) -> Result<PrivateKey> {
    let mut lines = Lines::new(text);
    lines.exact(PRIVATE_MAGIC)?;
    let group = read_group(&mut lines)?;
    let ring = read_ring(&mut lines)?;
    let side: Side = lines.parsed("side")?;
    let extlen = lines.optional_parsed("extlen")?;
    let (left_factors, right_factors) = match side {
        Side::Right => (Vec::new(), read_factors(&mut lines, "factors", &group, &ring)?),
        Side::Left => (read_factors(&mut lines, "factors", &group, &ring)?, Vec::new()),
        Side::TwoSided => (
            read_factors(&mut lines, "left-factors", &group, &ring)?,
            read_factors(&mut lines, "right-factors", &group, &ring)?,
        ),
    };
    if left_factors.is_empty() && right_factors.is_empty() {
        return Err(lines.err("a private key needs at least one factor"));
    }
    lines.finish()?;
    Ok(PrivateKey {
        side,
        left_factors,
        right_factors,
        extlen,
    })
}

/// Message or ciphertext file contents.
#[derive(Clone, Debug, PartialEq)]
pub struct MessageFile {
    pub body: Ciphertext,
    /// Positional base of the encoded integer, if any.
    pub base: Option<u64>,
    /// Digit count of the encoded integer.
    pub digits: Option<usize>,
    /// Layer order for hybrid ciphertexts.
    pub hybrid: Option<LayerOrder>,
}

impl MessageFile {
    pub fn element(body: GroupRingElement) -> Self {
        MessageFile {
            body: Ciphertext::Element(body),
            base: None,
            digits: None,
            hybrid: None,
        }
    }
}

pub fn message_to_string(msg: &MessageFile) -> String {
    let mut out = format!("{MSG_MAGIC}\n");
    match &msg.body {
        Ciphertext::Element(e) => {
            write_group(&mut out, e.group());
            let _ = writeln!(out, "ring {}", e.ring());
        }
        Ciphertext::Extended(x) => {
            let _ = writeln!(out, "extlen {}", x.len());
            let _ = writeln!(out, "ring {}", x.ring());
        }
    }
    if let Some(b) = msg.base {
        let _ = writeln!(out, "base {b}");
    }
    if let Some(d) = msg.digits {
        let _ = writeln!(out, "digits {d}");
    }
    if let Some(o) = msg.hybrid {
        let _ = writeln!(out, "hybrid {o}");
    }
    match &msg.body {
        Ciphertext::Element(e) => write_element(&mut out, e),
        Ciphertext::Extended(x) => write_ints(&mut out, "coeffs", x.coeffs()),
    }
    out
}

pub fn parse_message(text: &str) -> Result<MessageFile> {
    let mut lines = Lines::new(text);
    lines.exact(MSG_MAGIC)?;
    let extlen: Option<usize> = lines.optional_parsed("extlen")?;
    let group = match extlen {
        Some(_) => None,
        None => Some(read_group(&mut lines)?),
    };
    let ring = read_ring(&mut lines)?;
    let base = lines.optional_parsed("base")?;
    let digits = lines.optional_parsed("digits")?;
    let hybrid = lines.optional_parsed("hybrid")?;
    let body = match group {
        Some(g) => Ciphertext::Element(read_element(&mut lines, &g, &ring)?),
        None => {
            let raw = lines.field("coeffs")?;
            Ciphertext::Extended(ExtendedElement::new(&ring, parse_ints(&lines, raw)?))
        }
    };
    lines.finish()?;
    Ok(MessageFile {
        body,
        base,
        digits,
        hybrid,
    })
}

pub fn rsa_public_to_string(key: &RsaPublicKey) -> String {
    format!("{RSA_MAGIC}\nn {}\ne {}\n", key.n, key.e)
}

pub fn rsa_private_to_string(key: &RsaKey) -> String {
    format!("{RSA_PRIVATE_MAGIC}\nn {}\ne {}\nd {}\n", key.n, key.e, key.d)
}

fn read_rsa(lines: &mut Lines) -> Result<(RsaPublicKey, Option<RsaPrivateKey>)> {
    let private = match lines.items.get(lines.at) {
        Some((_, l)) if *l == RSA_PRIVATE_MAGIC => true,
        Some((_, l)) if *l == RSA_MAGIC => false,
        _ => return Err(lines.err(format!("expected `{RSA_MAGIC}`"))),
    };
    lines.at += 1;
    let n: BigInt = lines.parsed("n")?;
    let e: BigInt = lines.parsed("e")?;
    let d = if private { Some(lines.parsed::<BigInt>("d")?) } else { None };
    Ok((
        RsaPublicKey { n: n.clone(), e },
        d.map(|d| RsaPrivateKey { n, d }),
    ))
}

pub fn parse_rsa_public(text: &str) -> Result<RsaPublicKey> {
    let mut lines = Lines::new(text);
    let (key, _) = read_rsa(&mut lines)?;
    lines.finish()?;
    Ok(key)
}

pub fn parse_rsa_private(text: &str) -> Result<RsaPrivateKey> {
    let mut lines = Lines::new(text);
    let (_, key) = read_rsa(&mut lines)?;
    lines.finish()?;
    key.ok_or_else(|| lines.err("not a private RSA key"))
}

/// Splits a hybrid key file into its RSA and unit-key sections.
pub fn split_hybrid(text: &str) -> Result<(&str, &str)> {
    let at = text
        .find("GRKEY")
        .ok_or_else(|| Error::parse(1, "hybrid key file lacks a GRKEY section"))?;
    Ok((&text[..at], &text[at..]))
}

/// Coded data file: coefficientwise codewords of an element, or a coded
/// bitstream.
#[derive(Clone, Debug, PartialEq)]
pub enum CodedFile {
    Coeffs {
        group: Group,
        ring: CoefficientRing,
        coded: CodedCoeffs,
    },
    Bits(CodedBits),
}

pub fn coded_to_string(file: &CodedFile) -> String {
    let mut out = format!("{CODE_MAGIC}\n");
    match file {
        CodedFile::Coeffs { group, ring, coded } => {
            write_group(&mut out, group);
            let _ = writeln!(out, "ring {ring}");
            let _ = writeln!(out, "{coded}");
        }
        CodedFile::Bits(b) => {
            let _ = writeln!(out, "r {}", b.r);
            let _ = writeln!(out, "length {}", b.len);
            let _ = writeln!(out, "bits {}", bits_to_string(&b.bits));
        }
    }
    out
}

pub fn parse_coded(text: &str) -> Result<CodedFile> {
    let mut lines = Lines::new(text);
    lines.exact(CODE_MAGIC)?;
    let file = if lines.peek_keyword() == Some("group") {
        let group = read_group(&mut lines)?;
        let ring = read_ring(&mut lines)?;
        let line = lines.line_no();
        let raw = lines.field("coded")?;
        let coded = format!("coded {raw}")
            .parse()
            .map_err(|e: Error| Error::parse(line, e.to_string()))?;
        CodedFile::Coeffs { group, ring, coded }
    } else {
        let r = lines.parsed("r")?;
        let len = lines.parsed("length")?;
        let raw = lines.field("bits")?;
        let bits = lines.wrap(parse_bits(raw))?;
        CodedFile::Bits(CodedBits { r, len, bits })
    };
    lines.finish()?;
    Ok(file)
}
