//! Exact integer convolution.
//!
//! Inputs are reduced modulo enough 62-bit NTT-friendly primes
//! (`p = c * 2^32 + 1`) to cover the worst-case output magnitude, convolved
//! in each residue field, and recombined by Garner's algorithm into signed
//! integers. No floating point is involved, so results are bit-exact.

use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};

/// Below this length the schoolbook product is cheaper than transforms.
pub const CONVOLUTION_THRESHOLD: usize = 32;

#[derive(Clone, Copy, Debug)]
pub(crate) struct NttPrime {
    pub p: u64,
    root: u64,
}

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut f = 2u64;
    while f * f <= n {
        if n.is_multiple_of(f) {
            out.push(f);
            while n.is_multiple_of(f) {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn primitive_root(p: u64) -> u64 {
    let factors = prime_factors(p - 1);
    (2..)
        .find(|&g| factors.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
        .expect("primes have primitive roots")
}

const MAX_LOG_LEN: u32 = 32;

fn prime_table() -> &'static Mutex<(u64, Vec<NttPrime>)> {
    static TABLE: OnceLock<Mutex<(u64, Vec<NttPrime>)>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(((1u64 << 30) - 1, Vec::new())))
}

/// The first `k` primes `c * 2^32 + 1` with `2^61 < p < 2^62`, largest first.
pub(crate) fn ntt_primes(k: usize) -> Vec<NttPrime> {
    let mut guard = prime_table().lock().expect("prime table poisoned");
    let (next_c, primes) = &mut *guard;
    while primes.len() < k {
        let c = *next_c;
        assert!(c >= 1 << 29, "ran out of 62-bit NTT primes");
        *next_c -= 1;
        let p = (c << MAX_LOG_LEN) | 1;
        if is_prime_u64(p) {
            primes.push(NttPrime {
                p,
                root: primitive_root(p),
            });
        }
    }
    primes[..k].to_vec()
}

fn ntt(a: &mut [u64], prime: NttPrime, invert: bool) {
    let n = a.len();
    let p = prime.p;
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let mut w_len = pow_mod(prime.root, (p - 1) / len as u64, p);
        if invert {
            w_len = pow_mod(w_len, p - 2, p);
        }
        let half = len / 2;
        let mut twiddles = Vec::with_capacity(half);
        let mut w = 1u64;
        for _ in 0..half {
            twiddles.push(w);
            w = mul_mod(w, w_len, p);
        }
        for chunk in a.chunks_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for ((x, y), &w) in lo.iter_mut().zip(hi.iter_mut()).zip(&twiddles) {
                let u = *x;
                let v = mul_mod(*y, w, p);
                *x = if u + v >= p { u + v - p } else { u + v };
                *y = if u >= v { u - v } else { u + p - v };
            }
        }
        len <<= 1;
    }
    if invert {
        let n_inv = pow_mod(n as u64, p - 2, p);
        for x in a.iter_mut() {
            *x = mul_mod(*x, n_inv, p);
        }
    }
}

/// Magnitude digits and sign of each input, computed once.
struct Limbs {
    negative: Vec<bool>,
    digits: Vec<Vec<u64>>,
}

impl Limbs {
    fn new(values: &[BigInt]) -> Self {
        let mut negative = Vec::with_capacity(values.len());
        let mut digits = Vec::with_capacity(values.len());
        for v in values {
            let (sign, d) = v.to_u64_digits();
            negative.push(sign == Sign::Minus);
            digits.push(d);
        }
        Limbs { negative, digits }
    }

    fn max_bits(&self) -> u64 {
        self.digits
            .iter()
            .map(|d| match d.last() {
                None => 0,
                Some(top) => 64 * (d.len() as u64 - 1) + (64 - top.leading_zeros() as u64),
            })
            .max()
            .unwrap_or(0)
    }

    fn residues(&self, p: u64, len: usize) -> Vec<u64> {
        let mut out = vec![0u64; len];
        for (slot, (d, &neg)) in out.iter_mut().zip(self.digits.iter().zip(&self.negative)) {
            let mut r = 0u128;
            for &limb in d.iter().rev() {
                r = ((r << 64) | limb as u128) % p as u128;
            }
            let r = r as u64;
            *slot = if neg && r != 0 { p - r } else { r };
        }
        out
    }
}

/// Garner reconstruction of signed values from residues.
#[allow(clippy::needless_range_loop)]
fn reconstruct(primes: &[NttPrime], residues: &[Vec<u64>], len: usize) -> Vec<BigInt> {
    let k = primes.len();
    // inv[i][j] = p_j^{-1} mod p_i for j < i
    let inv: Vec<Vec<u64>> = (0..k)
        .map(|i| {
            (0..i)
                .map(|j| pow_mod(primes[j].p % primes[i].p, primes[i].p - 2, primes[i].p))
                .collect()
        })
        .collect();
    let mut modulus = BigUint::one();
    for pr in primes {
        modulus *= pr.p;
    }
    let modulus = BigInt::from(modulus);
    let half = &modulus >> 1usize;

    let mut out = Vec::with_capacity(len);
    let mut digits = vec![0u64; k];
    for idx in 0..len {
        for i in 0..k {
            let p = primes[i].p;
            let mut x = residues[i][idx];
            for j in 0..i {
                let d = digits[j] % p;
                x = if x >= d { x - d } else { x + p - d };
                x = mul_mod(x, inv[i][j], p);
            }
            digits[i] = x;
        }
        let mut value = BigInt::zero();
        for i in (0..k).rev() {
            value *= primes[i].p;
            value += digits[i];
        }
        if value > half {
            value -= &modulus;
        }
        out.push(value);
    }
    out
}

fn primes_for(bits: u64) -> Vec<NttPrime> {
    // every prime exceeds 2^61
    let k = bits.div_ceil(61).max(1) as usize;
    ntt_primes(k)
}

fn convolve_residues(a: &Limbs, b: &Limbs, size: usize, prime: NttPrime) -> Vec<u64> {
    let mut fa = a.residues(prime.p, size);
    let mut fb = b.residues(prime.p, size);
    ntt(&mut fa, prime, false);
    ntt(&mut fb, prime, false);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x = mul_mod(*x, *y, prime.p);
    }
    ntt(&mut fa, prime, true);
    fa
}

/// Residue-wise products of `a` and `b` at transform length `size`.
/// Every output coefficient is a sum of at most `terms` products.
fn transform_product(a: &[BigInt], b: &[BigInt], size: usize, terms: usize, out_len: usize) -> Vec<BigInt> {
    let la = Limbs::new(a);
    let lb = Limbs::new(b);
    // |output| <= terms * max|a| * max|b|; one extra bit for the sign
    let bits = la.max_bits() + lb.max_bits() + (64 - (terms as u64).leading_zeros() as u64) + 2;
    let primes = primes_for(bits);
    let residues: Vec<Vec<u64>> = primes
        .iter()
        .map(|&pr| convolve_residues(&la, &lb, size, pr))
        .collect();
    reconstruct(&primes, &residues, out_len)
}

/// Plain polynomial product, length `a.len() + b.len() - 1`.
pub fn linear_convolution(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let out_len = a.len() + b.len() - 1;
    let size = out_len.next_power_of_two();
    assert!(size.trailing_zeros() <= MAX_LOG_LEN, "convolution too long");
    let terms = a.len().min(b.len());
    transform_product(a, b, size, terms, out_len)
}

/// Product in `Z[x]/(x^n - 1)` for two length-`n` sequences.
pub fn cyclic_convolution(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    assert_eq!(a.len(), b.len(), "cyclic convolution needs equal lengths");
    let n = a.len();
    if n == 0 {
        return Vec::new();
    }
    if n.is_power_of_two() {
        return transform_product(a, b, n, n, n);
    }
    let linear = linear_convolution(a, b);
    let mut out = vec![BigInt::zero(); n];
    for (k, c) in linear.into_iter().enumerate() {
        out[k % n] += c;
    }
    out
}

/// Word-sized copies when every product sum provably fits an `i128`.
fn small_copies(a: &[BigInt], b: &[BigInt], terms: usize) -> Option<(Vec<i64>, Vec<i64>)> {
    let bits = |v: &[BigInt]| v.iter().map(|x| x.bits()).max().unwrap_or(0);
    let term_bits = 64 - (terms as u64).leading_zeros() as u64;
    if bits(a) + bits(b) + term_bits > 126 {
        return None;
    }
    let conv = |v: &[BigInt]| v.iter().map(|x| i64::try_from(x).ok()).collect::<Option<Vec<_>>>();
    Some((conv(a)?, conv(b)?))
}

/// Schoolbook cyclic product, skipping zero coefficients.
pub fn naive_cyclic_convolution(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    assert_eq!(a.len(), b.len(), "cyclic convolution needs equal lengths");
    let n = a.len();
    if let Some((sa, sb)) = small_copies(a, b, n) {
        let mut acc = vec![0i128; n];
        for (i, &x) in sa.iter().enumerate().filter(|(_, x)| **x != 0) {
            for (j, &y) in sb.iter().enumerate() {
                let k = if i + j >= n { i + j - n } else { i + j };
                acc[k] += x as i128 * y as i128;
            }
        }
        return acc.into_iter().map(BigInt::from).collect();
    }
    let mut out = vec![BigInt::zero(); n];
    for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        for (j, y) in b.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
            out[(i + j) % n] += x * y;
        }
    }
    out
}

pub fn naive_linear_convolution(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let len = a.len() + b.len() - 1;
    if let Some((sa, sb)) = small_copies(a, b, a.len().min(b.len())) {
        let mut acc = vec![0i128; len];
        for (i, &x) in sa.iter().enumerate().filter(|(_, x)| **x != 0) {
            for (j, &y) in sb.iter().enumerate() {
                acc[i + j] += x as i128 * y as i128;
            }
        }
        return acc.into_iter().map(BigInt::from).collect();
    }
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        for (j, y) in b.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
            out[i + j] += x * y;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vec(rng: &mut ChaCha8Rng, n: usize, bits: u32) -> Vec<BigInt> {
        (0..n)
            .map(|_| {
                let mut v = BigInt::zero();
                for _ in 0..(bits / 32 + 1) {
                    v = (v << 32u32) + rng.gen::<u32>();
                }
                v >>= (bits / 32 + 1) * 32 - bits;
                if rng.gen() {
                    -v
                } else {
                    v
                }
            })
            .collect()
    }

    #[test]
    fn primes_are_ntt_friendly() {
        for pr in ntt_primes(8) {
            assert!(is_prime_u64(pr.p));
            assert_eq!((pr.p - 1) % (1 << 32), 0);
            assert!(pr.p > 1 << 61 && pr.p < 1 << 62);
            assert_eq!(pow_mod(pr.root, (pr.p - 1) / 2, pr.p), pr.p - 1);
        }
    }

    #[test]
    fn miller_rabin_small_cases() {
        let sieve: Vec<u64> = (2..2000u64)
            .filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0))
            .collect();
        for n in 0..2000u64 {
            assert_eq!(is_prime_u64(n), sieve.contains(&n), "{n}");
        }
        assert!(is_prime_u64(2_147_483_647));
        assert!(!is_prime_u64(78_013_681));
    }

    #[test]
    fn matches_schoolbook_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &(n, bits) in &[(1, 10), (3, 5), (11, 40), (16, 64), (50, 200), (64, 3), (100, 900)] {
            let a = random_vec(&mut rng, n, bits);
            let b = random_vec(&mut rng, n, bits);
            assert_eq!(cyclic_convolution(&a, &b), naive_cyclic_convolution(&a, &b));
            let c = random_vec(&mut rng, n + 7, bits);
            assert_eq!(linear_convolution(&a, &c), naive_linear_convolution(&a, &c));
        }
    }

    #[test]
    fn zero_and_identity() {
        let a: Vec<BigInt> = [5, -3, 0, 7].iter().map(|&x| BigInt::from(x)).collect();
        let one: Vec<BigInt> = [1, 0, 0, 0].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(cyclic_convolution(&a, &one), a);
        assert_eq!(cyclic_convolution(&a, &[BigInt::zero(), BigInt::zero(), BigInt::zero(), BigInt::zero()]), vec![BigInt::zero(); 4]);
        assert!(linear_convolution(&a, &[]).is_empty());
    }
}
