//! Key recovery against cyclic public keys by extended Euclid, using only
//! public data.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use crate::algebra::coeffs::CoefficientRing;
use crate::algebra::groupring::GroupRingElement;
use crate::algebra::groups::GroupSpec;
use crate::error::{Error, Result};
use crate::keys::units::{binomial_product_unit, invert_cyclic, PublicKey};

#[derive(Clone, Debug)]
pub struct AttackReport {
    pub target: String,
    pub success: bool,
    /// Certified inverse of the target when `success` holds.
    pub recovered: Option<GroupRingElement>,
    pub elapsed: Duration,
    pub notes: String,
}

/// Inverts `u` against `x^n - 1`. Success is certified by multiplication.
pub fn euclid_attack(u: &GroupRingElement) -> AttackReport {
    let target = format!("{} over {}", u.group(), u.ring());
    let start = Instant::now();
    let outcome = invert_cyclic(u);
    let elapsed = start.elapsed();
    match outcome {
        Ok(v) => AttackReport {
            target,
            success: true,
            recovered: Some(v),
            elapsed,
            notes: match u.ring().modulus() {
                None => "Euclid over Q, inverse integral".into(),
                Some(_) => "Euclid over the coefficient ring".into(),
            },
        },
        Err(e) => AttackReport {
            target,
            success: false,
            recovered: None,
            elapsed,
            notes: match e {
                Error::Unsupported(_) => format!("inapplicable: {e}"),
                other => other.to_string(),
            },
        },
    }
}

/// Attack on every public unit of a key. Disguised keys withhold the
/// group order and are refused.
pub fn attack_public_key(key: &PublicKey) -> Result<Vec<AttackReport>> {
    match key {
        PublicKey::Right(u) | PublicKey::Left(u) => Ok(vec![euclid_attack(u)]),
        PublicKey::TwoSided { left, right } => Ok(vec![euclid_attack(left), euclid_attack(right)]),
        PublicKey::Disguised(_) => Err(Error::Unsupported(
            "the group order of a disguised key is not public".into(),
        )),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub ring: String,
    pub trials: usize,
    pub success_rate: f64,
    pub median_ms: f64,
}

/// Attacks `trials` random units per size; units come with independently
/// known inverses, and each recovered inverse must match.
pub fn attack_benchmark(sizes: &[usize], ring: &CoefficientRing, trials: usize, seed: u64) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::with_capacity(sizes.len());
    for (s, &n) in sizes.iter().enumerate() {
        let group = GroupSpec::cyclic(n as u64)?;
        let mut times = Vec::with_capacity(trials);
        let mut successes = 0usize;
        for t in 0..trials {
            let key = binomial_product_unit(&group, ring, 4, seed ^ ((s as u64) << 32) ^ t as u64)?;
            let report = euclid_attack(key.unit());
            if report.recovered.as_ref() == Some(key.inverse()) {
                successes += 1;
            }
            times.push(report.elapsed.as_secs_f64() * 1e3);
        }
        times.sort_by(|a, b| a.total_cmp(b));
        let median_ms = match times.len() {
            0 => 0.0,
            k if k % 2 == 1 => times[k / 2],
            k => (times[k / 2 - 1] + times[k / 2]) / 2.0,
        };
        rows.push(BenchRow {
            n,
            ring: ring.to_string(),
            trials,
            success_rate: if trials == 0 { 0.0 } else { successes as f64 / trials as f64 },
            median_ms,
        });
    }
    Ok(rows)
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("n,ring,trials,success_rate,median_ms\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{:.4},{:.4}", r.n, r.ring, r.trials, r.success_rate, r.median_ms);
    }
    out
}
