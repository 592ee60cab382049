//! Fixed reference instances with known vectors, used by the demo command
//! and handy for experiments.

use num_bigint::BigInt;

use crate::algebra::coeffs::CoefficientRing;
use crate::algebra::groupring::GroupRingElement;
use crate::algebra::groups::{Group, GroupElement, GroupSpec};
use crate::algebra::perm::Permutation;
use crate::error::Result;
use crate::keys::units::{bicyclic_unit, embed_cyclic, random_cyclic_unit, UnitKey, Provenance};

/// Unit over `Z[C_16]` and its inverse.
pub const C16_UNIT: [i64; 16] = [
    -408, -402, -374, -298, -144, 94, 374, 606, 697, 606, 374, 94, -144, -298, -374, -402,
];
pub const C16_UNIT_INV: [i64; 16] = [
    -13464, 5106, 9622, -12470, -144, 12674, -9622, -5310, 13753, -5310, -9622, 12674, -144, -12470, 9622, 5106,
];
pub const C16_MESSAGE: [i64; 16] = [-3, 12, -16, 72, -123, 1, -1, 0, 1234, -17, 143, 0, 64, -173, 13, -234];
pub const C16_CIPHERTEXT: [i64; 16] = [
    1033182, 949413, 646149, 228128, -179124, -488007, -663825, -718750, -688787, -614702, -516410, -379628,
    -164099, 153119, 534225, 870088,
];

/// Second unit over `Z[C_16]` and its inverse.
pub const C16_SECOND: [i64; 16] = [1, -1, 0, 1, -1, 1, 0, -1, 1, 0, 0, 0, 0, 0, 0, 0];
pub const C16_SECOND_INV: [i64; 16] = [1, 0, -1, -2, -2, -2, -1, 0, 1, 1, 1, 1, 1, 1, 1, 1];
pub const C16_PRODUCT: [i64; 16] = [25, 18, -18, -66, -88, -66, -18, 18, 25, 17, 18, 31, 39, 31, 18, 17];
pub const C16_PRODUCT_INV: [i64; 16] = [
    25, -3497, 2663, 1459, -3791, 1459, 2663, -3497, 25, 3462, -2663, -1424, 3742, -1424, -2663, 3462,
];
pub const C16_MESSAGE_2: [i64; 16] = [-12, -12, -234, 345, -435, 0, 165, -142, 43, -17, -12, 456, -2341, -321, 23, -76];
pub const C16_CIPHERTEXT_2: [i64; 16] = [
    185871, 165276, 68927, -21364, -51052, -34033, -26102, -48807, -73742, -67942, -44554, -41339, -63822,
    -63651, 1671, 112093,
];

/// RSA parameters and a unit over `Z[C_11]` for the hybrid scheme.
pub const RSA_P: u64 = 7459;
pub const RSA_Q: u64 = 10459;
pub const RSA_E: u64 = 5;
pub const RSA_N: u64 = 78013681;
pub const RSA_PHI: u64 = 77995764;
pub const RSA_D: u64 = 15599153;
pub const HYBRID_PLAIN: u64 = 1231;
pub const HYBRID_RSA: u64 = 15134643;
pub const HYBRID_DIGITS: [i64; 8] = [1, 5, 1, 3, 4, 6, 4, 3];
pub const C11_UNIT: [i64; 11] = [2983, 1407, -573, -2308, -3301, -3301, -2308, -573, 1407, 2983, 3585];
pub const C11_UNIT_INV: [i64; 11] = [-14659, 22389, -14659, -3190, 18832, -21472, 9295, 9295, -21472, 18832, -3190];
pub const HYBRID_CIPHERTEXT: [i64; 11] = [
    -11135, 11911, 31358, 41330, 38402, 22982, -201, -23410, -38792, -41440, -30978,
];

/// Coding over `Z_16[C_11]` with the `C_11` unit above.
pub const CODED_MESSAGE: [i64; 11] = [11, 15, 12, 8, 0, 13, 11, 7, 13, 4, 7];
pub const CODED_CIPHERTEXT: [i64; 4] = [11, 14, 5, 7];
pub const CODED_WORDS: [u64; 4] = [51, 22, 37, 15];
pub const CODED_RECEIVED: [u64; 4] = [19, 44, 91, 79];
/// Bitstream coding over `Z_2[C_11]`.
pub const BITS_START: [i64; 4] = [1, 0, 1, 1];
pub const BITS_CIPHERTEXT: [u8; 11] = [1, 1, 1, 0, 1, 0, 1, 1, 0, 0, 1];
pub const BITS_CODEWORD: [u8; 15] = [1, 0, 1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0, 0, 1];

/// Large power instance: group order, base support, exponent.
pub const POWER_N: u64 = 4096;
pub const POWER_SUPPORT: usize = 511;
pub const POWER_EXPONENT: u64 = 127;
pub const POWER_MODULUS: u64 = 2147483647;
pub const POWER_SEED: u64 = 511_127;

pub fn element(group: &Group, ring: &CoefficientRing, coeffs: &[i64]) -> GroupRingElement {
    GroupRingElement::from_i64s(group, ring, coeffs).expect("fixed sample fits its group")
}

fn certified(n: u64, unit: &[i64], inv: &[i64]) -> UnitKey {
    let g = GroupSpec::cyclic(n).expect("positive order");
    let z = CoefficientRing::Integers;
    UnitKey::certify(element(&g, &z, unit), element(&g, &z, inv), Provenance::Trial).expect("fixed sample is a unit")
}

pub fn c16_unit() -> UnitKey {
    certified(16, &C16_UNIT, &C16_UNIT_INV)
}

pub fn c16_second() -> UnitKey {
    certified(16, &C16_SECOND, &C16_SECOND_INV)
}

pub fn c11_unit() -> UnitKey {
    certified(11, &C11_UNIT, &C11_UNIT_INV)
}

/// Base unit of the large power instance over `Z_p[C_4096]`.
pub fn power_base() -> Result<UnitKey> {
    let g = GroupSpec::cyclic(POWER_N)?;
    random_cyclic_unit(&g, &CoefficientRing::modulo(POWER_MODULUS)?, POWER_SUPPORT, POWER_SEED)
}

/// Non-commuting units over `Z[S_10]` plus a cyclic unit carried into it.
pub struct SymmetricInstance {
    pub group: Group,
    pub a: GroupElement,
    pub b: GroupElement,
    /// `1 + (1 - a) b â`
    pub uab: UnitKey,
    /// `1 + (1 - b) a b̂`
    pub bau: UnitKey,
    /// The `C_16` unit pushed through `g -> c` for an 8-cycle `c`.
    pub h: UnitKey,
}

pub fn symmetric_instance() -> Result<SymmetricInstance> {
    let group = GroupSpec::symmetric(10)?;
    let z = CoefficientRing::Integers;
    let a = GroupElement::Perm(Permutation::from_cycles(10, &[&[0, 1]])?);
    let b = GroupElement::Perm(Permutation::from_cycles(10, &[&[0, 2, 3, 4, 5]])?);
    let c = GroupElement::Perm(Permutation::from_cycles(10, &[&[2, 3, 4, 5, 6, 7, 8, 9]])?);
    let uab = bicyclic_unit(&group, &z, &a, &b)?;
    let bau = bicyclic_unit(&group, &z, &b, &a)?;
    let h = embed_cyclic(&c16_unit(), &group, &c)?;
    Ok(SymmetricInstance {
        group,
        a,
        b,
        uab,
        bau,
        h,
    })
}

/// Signed integers of a fixed vector as `BigInt`s.
pub fn bigints(values: &[i64]) -> Vec<BigInt> {
    values.iter().map(|&v| BigInt::from(v)).collect()
}
