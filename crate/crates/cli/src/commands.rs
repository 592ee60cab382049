use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use grunits::analysis::attacks::{attack_benchmark, attack_public_key, bench_csv};
use grunits::coding::hamming::{
    bitstream_code_unwrap, bitstream_code_wrap, bits_to_string, coeff_code_unwrap, coeff_code_wrap,
    inject_single_errors, parse_bits, HammingCode,
};
use grunits::crypto::pipeline::{self, MessageCodec};
use grunits::crypto::rsa::{self as rsa, HybridCiphertext, LayerOrder};
use grunits::format::{
    coded_to_string, message_to_string, parse_coded, parse_message, parse_private_key, parse_public_key,
    parse_rsa_private, parse_rsa_public, private_key_to_string, public_key_to_string, rsa_private_to_string,
    rsa_public_to_string, split_hybrid, CodedFile, MessageFile,
};
use grunits::keys::units::{bass_cyclic_unit, bicyclic_unit, binomial_product_unit, random_cyclic_unit};
use grunits::{parse_group, CoefficientRing, GroupElement, GroupRingElement, KeyPair, PrivateKey, PublicKey, Side, UnitKey};

use crate::io::{
    format_coefficients, load_private, load_public, load_unit, read, read_plaintext, with_ext, write, Failure,
    ATTACK_FAILED, CRYPTO_MISMATCH,
};
use crate::{
    AttackArgs, AttackBenchArgs, CodeUnwrapArgs, CodeWrapArgs, DecryptArgs, EncryptArgs, HybridDecryptArgs,
    HybridEncryptArgs, KeygenArgs, RsaKeygenArgs, SignArgs, VerifyArgs,
};

fn need<T: Clone>(value: &Option<T>, flag: &str, kind: &str) -> Result<T, Failure> {
    value
        .clone()
        .ok_or_else(|| Failure::invalid(format!("--kind {kind} needs {flag}")))
}

/// Units of the key in multiplication order; only `product` gives more than one.
fn base_chain(a: &KeygenArgs) -> Result<Vec<UnitKey>, Failure> {
    let group = parse_group(&a.group)?;
    let ring: CoefficientRing = a.ring.parse()?;
    let chain = match a.kind.as_str() {
        "bass" => vec![bass_cyclic_unit(&group, need(&a.i, "--i", "bass")?)?],
        "bicyclic" => {
            let x: GroupElement = need(&a.a, "--a", "bicyclic")?.parse()?;
            let y: GroupElement = need(&a.b, "--b", "bicyclic")?.parse()?;
            vec![bicyclic_unit(&group, &ring, &x, &y)?]
        }
        "trial" => {
            let raw = need(&a.coeffs, "--coeffs", "trial")?;
            let values = raw
                .split(',')
                .map(|t| t.trim().parse::<BigInt>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| Failure::invalid(format!("bad coefficient list `{raw}`")))?;
            vec![UnitKey::trial(GroupRingElement::from_coeffs(&group, &ring, values)?)?]
        }
        "random" => vec![random_cyclic_unit(&group, &ring, need(&a.support, "--support", "random")?, a.seed)?],
        "binomial" => vec![binomial_product_unit(&group, &ring, a.factors, a.seed)?],
        "product" => {
            let names = need(&a.from, "--from", "product")?;
            names
                .split(',')
                .map(|n| load_unit(n.trim().as_ref()))
                .collect::<Result<Vec<_>, _>>()?
        }
        other => return Err(Failure::invalid(format!("unknown key kind `{other}`"))),
    };
    // Bass and loaded keys live over their own ring; only reduction is possible.
    chain
        .into_iter()
        .map(|k| match ring.modulus() {
            _ if &ring == k.unit().ring() => Ok(k),
            Some(m) => Ok(k.reduce_mod(m)?),
            None => Err(Failure::invalid(format!("cannot lift a key over {} to Z", k.unit().ring()))),
        })
        .collect()
}

pub fn keygen(a: &KeygenArgs) -> Result<(), Failure> {
    let mut chain = base_chain(a)?;
    if let Some(k) = a.power {
        if k == 0 {
            return Err(Failure::invalid("--power must be at least 1"));
        }
        chain = vec![UnitKey::product(&chain)?.power(k)];
    }
    let side: Side = a.side.parse()?;
    let mut pair = match side {
        Side::Right => KeyPair::from_chains(&[], &chain)?,
        Side::Left => KeyPair::from_chains(&chain, &[])?,
        Side::TwoSided => {
            let name = a
                .left_from
                .as_ref()
                .ok_or_else(|| Failure::invalid("--side two-sided needs --left-from"))?;
            KeyPair::from_chains(&[load_unit(name.as_ref())?], &chain)?
        }
    };
    if let Some(s) = a.disguise {
        pair = pair.disguised(s, a.seed)?;
    }
    write(&with_ext(&a.out, "pub"), &public_key_to_string(&pair.public))?;
    write(&with_ext(&a.out, "key"), &private_key_to_string(&pair.private))
}

pub fn encrypt(a: &EncryptArgs) -> Result<(), Failure> {
    let key = load_public(&a.key)?;
    let (w, digits) = read_plaintext(&a.input, key.group(), key.ring(), a.base)?;
    let body = pipeline::encrypt(&w, &key)?;
    let msg = MessageFile {
        body,
        base: a.base,
        digits,
        hybrid: None,
    };
    write(&a.out, &message_to_string(&msg))
}

/// Writes the plaintext in the form `encrypt` reads it.
fn write_plaintext(path: &std::path::Path, w: &GroupRingElement, base: Option<u64>, digits: Option<usize>) -> Result<(), Failure> {
    let text = match base {
        Some(b) => {
            let codec = MessageCodec::new(w.group(), b)?;
            let value = codec
                .decode_value(w, digits)
                .map_err(|e| Failure::new(CRYPTO_MISMATCH, format!("decryption produced no valid message: {e}")))?;
            format!("{value}\n")
        }
        None if w.group().is_dense() => format_coefficients(w)?,
        None => message_to_string(&MessageFile::element(w.clone())),
    };
    write(path, &text)
}

pub fn decrypt(a: &DecryptArgs) -> Result<(), Failure> {
    let key = load_private(&a.key)?;
    let msg = parse_message(&read(&a.input)?)?;
    if msg.hybrid.is_some() {
        return Err(Failure::invalid("hybrid ciphertext: use hybrid-decrypt"));
    }
    // Disguised senders size the plaintext group to their input; decoding
    // over the full group sees the same digits followed by zeros.
    let w = pipeline::decrypt(&msg.body, &key)?;
    write_plaintext(&a.out, &w, msg.base, msg.digits)
}

/// Product of a right-sided private key's factors.
fn right_secret(key: &PrivateKey) -> Result<GroupRingElement, Failure> {
    if key.side != Side::Right || key.extlen.is_some() {
        return Err(Failure::invalid("signatures use plain right-sided keys"));
    }
    let mut acc = GroupRingElement::one(key.group(), key.ring());
    for f in &key.right_factors {
        acc = acc.try_mul(f)?;
    }
    Ok(acc)
}

pub fn sign(a: &SignArgs) -> Result<(), Failure> {
    let key = load_private(&a.key)?;
    let secret = right_secret(&key)?;
    let (w, _) = read_plaintext(&a.input, Some(key.group()), key.ring(), None)?;
    let sig = pipeline::sign(&w, &secret)?;
    write(&a.out, &message_to_string(&MessageFile::element(sig)))
}

pub fn verify(a: &VerifyArgs) -> Result<(), Failure> {
    let key = load_public(&a.key)?;
    let u = match &key {
        PublicKey::Right(u) => u,
        _ => return Err(Failure::invalid("signatures use plain right-sided keys")),
    };
    let sig = parse_message(&read(&a.sig)?)?;
    let sig = sig
        .body
        .element()
        .ok_or_else(|| Failure::invalid("signature must be a group-ring element"))?
        .clone();
    let (claimed, _) = read_plaintext(&a.input, Some(u.group()), u.ring(), None)?;
    pipeline::verify(&sig, u, &claimed)?;
    println!("signature valid");
    Ok(())
}

pub fn rsa_keygen(a: &RsaKeygenArgs) -> Result<(), Failure> {
    let int = |s: &str, flag: &str| -> Result<BigInt, Failure> {
        s.parse().map_err(|_| Failure::invalid(format!("{flag} must be a decimal integer")))
    };
    let e = int(&a.e, "--e")?;
    let (p, q) = match (&a.p, &a.q) {
        (Some(p), Some(q)) => (int(p, "--p")?, int(q, "--q")?),
        (None, None) => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            loop {
                let p = rsa::random_prime(a.bits, &mut rng)?;
                let q = rsa::random_prime(a.bits, &mut rng)?;
                if p != q && grunits::algebra::coeffs::mod_inverse(&e, &((&p - 1u32) * (&q - 1u32))).is_some() {
                    break (p, q);
                }
            }
        }
        _ => return Err(Failure::invalid("give both --p and --q, or neither")),
    };
    let key = rsa::rsa_keygen(&p, &q, &e)?;
    let (mut public, mut private) = (rsa_public_to_string(&key.public()), rsa_private_to_string(&key));
    if let Some(unit) = &a.with {
        public.push_str(&read(&with_ext(unit, "pub"))?);
        private.push_str(&read(&with_ext(unit, "key"))?);
    }
    write(&with_ext(&a.out, "pub"), &public)?;
    write(&with_ext(&a.out, "key"), &private)
}

pub fn hybrid_encrypt(a: &HybridEncryptArgs) -> Result<(), Failure> {
    let text = read(&a.key)?;
    let (rsa_text, unit_text) = split_hybrid(&text)?;
    let rsa_key = parse_rsa_public(rsa_text)?;
    let unit = parse_public_key(unit_text)?;
    let order: LayerOrder = a.order.parse()?;
    let group = unit
        .group()
        .ok_or_else(|| Failure::invalid("hybrid encryption needs a key with a visible group"))?;
    let codec = MessageCodec::new(group, a.base)?;
    let raw = read(&a.input)?;
    let plain: BigInt = raw
        .trim()
        .parse()
        .map_err(|_| Failure::invalid(format!("{}: expected one decimal integer", a.input.display())))?;
    let ct = rsa::hybrid_encrypt(&plain, &rsa_key, &unit, &codec, order)?;
    let msg = MessageFile {
        body: ct.body,
        base: Some(a.base),
        digits: Some(ct.digits),
        hybrid: Some(ct.order),
    };
    write(&a.out, &message_to_string(&msg))
}

pub fn hybrid_decrypt(a: &HybridDecryptArgs) -> Result<(), Failure> {
    let text = read(&a.key)?;
    let (rsa_text, unit_text) = split_hybrid(&text)?;
    let rsa_key = parse_rsa_private(rsa_text)?;
    let unit = parse_private_key(unit_text)?;
    let msg = parse_message(&read(&a.input)?)?;
    let (order, base, digits) = match (msg.hybrid, msg.base, msg.digits) {
        (Some(o), Some(b), Some(d)) => (o, b, d),
        _ => return Err(Failure::invalid("not a hybrid ciphertext")),
    };
    let codec = MessageCodec::new(unit.group(), base)?;
    let ct = HybridCiphertext {
        order,
        digits,
        body: msg.body,
    };
    let plain = rsa::hybrid_decrypt(&ct, &rsa_key, &unit, &codec).map_err(|e| match e {
        grunits::Error::DigitOutOfRange { .. } => Failure::new(CRYPTO_MISMATCH, e.to_string()),
        other => other.into(),
    })?;
    write(&a.out, &format!("{plain}\n"))
}

pub fn code_wrap(a: &CodeWrapArgs) -> Result<(), Failure> {
    let code = HammingCode::new(a.r)?;
    let mut rng = a.inject.map(ChaCha8Rng::seed_from_u64);
    let file = match (&a.input, &a.bits) {
        (Some(path), None) => {
            let msg = parse_message(&read(path)?)?;
            let x = msg
                .body
                .element()
                .ok_or_else(|| Failure::invalid("extended ciphertexts cannot be coded coefficientwise"))?;
            let mut coded = coeff_code_wrap(x, &code)?;
            if let Some(rng) = rng.as_mut() {
                inject_single_errors(&mut coded.words, &code, rng);
            }
            CodedFile::Coeffs {
                group: x.group().clone(),
                ring: x.ring().clone(),
                coded,
            }
        }
        (None, Some(bits)) => {
            let mut coded = bitstream_code_wrap(&parse_bits(bits)?, &code)?;
            if let Some(rng) = rng.as_mut() {
                let n = code.length();
                for block in coded.bits.chunks_mut(n) {
                    block[rng.gen_range(0..n)] ^= 1;
                }
            }
            CodedFile::Bits(coded)
        }
        _ => return Err(Failure::invalid("give exactly one of --in and --bits")),
    };
    write(&a.out, &coded_to_string(&file))
}

pub fn code_unwrap(a: &CodeUnwrapArgs) -> Result<(), Failure> {
    let file = parse_coded(&read(&a.input)?)?;
    match file {
        CodedFile::Coeffs { group, ring, coded } => {
            let (x, fixed) = coeff_code_unwrap(&coded, &group, &ring)?;
            eprintln!("corrected {fixed} codeword(s)");
            write(&a.out, &message_to_string(&MessageFile::element(x)))
        }
        CodedFile::Bits(coded) => {
            let (bits, fixed) = bitstream_code_unwrap(&coded)?;
            eprintln!("corrected positions: {fixed:?}");
            write(&a.out, &format!("bits {}\n", bits_to_string(&bits)))
        }
    }
}

pub fn attack(a: &AttackArgs) -> Result<(), Failure> {
    let key = load_public(&a.public)?;
    let reports = attack_public_key(&key).map_err(|e| Failure::new(ATTACK_FAILED, e.to_string()))?;
    let mut recovered = Vec::new();
    for r in &reports {
        println!(
            "target: {}\nsuccess: {}\nelapsed_ms: {:.3}\nnotes: {}",
            r.target,
            r.success,
            r.elapsed.as_secs_f64() * 1e3,
            r.notes
        );
        match &r.recovered {
            Some(v) => {
                println!("inverse: {v}");
                recovered.push(v.clone());
            }
            None => return Err(Failure::new(ATTACK_FAILED, format!("attack failed: {}", r.notes))),
        }
    }
    if let Some(out) = &a.out {
        let private = match (&key, recovered.as_slice()) {
            (PublicKey::Right(_), [v]) => PrivateKey {
                side: Side::Right,
                left_factors: vec![],
                right_factors: vec![v.clone()],
                extlen: None,
            },
            (PublicKey::Left(_), [v]) => PrivateKey {
                side: Side::Left,
                left_factors: vec![v.clone()],
                right_factors: vec![],
                extlen: None,
            },
            (_, [l, r]) => PrivateKey {
                side: Side::TwoSided,
                left_factors: vec![l.clone()],
                right_factors: vec![r.clone()],
                extlen: None,
            },
            _ => unreachable!("one report per public unit"),
        };
        write(out, &private_key_to_string(&private))?;
    }
    Ok(())
}

pub fn attack_bench(a: &AttackBenchArgs) -> Result<(), Failure> {
    let ring: CoefficientRing = a.ring.parse()?;
    let rows = attack_benchmark(&a.sizes, &ring, a.trials, a.seed)?;
    let csv = bench_csv(&rows);
    match &a.out {
        Some(path) => write(path, &csv)?,
        None => print!("{csv}"),
    }
    if rows.iter().any(|r| r.trials > 0 && r.success_rate < 1.0) {
        return Err(Failure::new(ATTACK_FAILED, "some attacks failed"));
    }
    Ok(())
}
