//! Small numeric helpers shared by the counting kernels.

use std::hash::{BuildHasherDefault, Hasher};

/// Binomial coefficient C(n, 2) as u64.
#[inline]
pub fn binom2(n: u64) -> u64 {
    n * n.wrapping_sub(1) / 2
}

/// Binomial coefficient C(n, 3) as u64.
#[inline]
pub fn binom3(n: u64) -> u64 {
    if n < 3 {
        0
    } else {
        // n(n-1)(n-2)/6 evaluated without intermediate overflow for n < 2^21.
        let p = n as u128 * (n - 1) as u128 * (n - 2) as u128 / 6;
        u64::try_from(p).expect("binom3 overflow")
    }
}

/// Binomial coefficient C(n, k) as u128, saturating at u128::MAX.
pub fn binom(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        match acc.checked_mul((n - i) as u128) {
            Some(v) => acc = v / (i as u128 + 1),
            None => return u128::MAX,
        }
    }
    acc
}

/// Binary gcd of two non-negative values; gcd(0, 0) = 0.
#[inline]
pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

#[inline]
pub fn gcd_i64(a: i64, b: i64) -> i64 {
    gcd_u64(a.unsigned_abs(), b.unsigned_abs()) as i64
}

/// FxHash-style multiplicative hasher. The counting kernels hash packed
/// integer keys billions of times; SipHash is too slow for that.
#[derive(Default)]
pub struct FxHasher {
    hash: u64,
}

const SEED: u64 = 0x51_7c_c1_b7_27_22_0a_95;

impl Hasher for FxHasher {
    #[inline]
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.write_u64(b as u64);
        }
    }

    #[inline]
    fn write_u64(&mut self, v: u64) {
        self.hash = (self.hash.rotate_left(5) ^ v).wrapping_mul(SEED);
    }

    #[inline]
    fn write_u128(&mut self, v: u128) {
        self.write_u64(v as u64);
        self.write_u64((v >> 64) as u64);
    }

    #[inline]
    fn write_usize(&mut self, v: usize) {
        self.write_u64(v as u64);
    }

    #[inline]
    fn finish(&self) -> u64 {
        self.hash
    }
}

pub type FxBuildHasher = BuildHasherDefault<FxHasher>;
pub type FxHashMap<K, V> = std::collections::HashMap<K, V, FxBuildHasher>;
pub type FxHashSet<K> = std::collections::HashSet<K, FxBuildHasher>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_small_values() {
        assert_eq!(gcd_u64(0, 0), 0);
        assert_eq!(gcd_u64(0, 7), 7);
        assert_eq!(gcd_u64(12, 18), 6);
        assert_eq!(gcd_u64(35, 64), 1);
        assert_eq!(gcd_i64(-12, 18), 6);
    }

    #[test]
    fn binomials() {
        assert_eq!(binom2(0), 0);
        assert_eq!(binom2(5), 10);
        assert_eq!(binom3(2), 0);
        assert_eq!(binom3(5), 10);
        assert_eq!(binom(5, 2), 10);
        assert_eq!(binom(40, 3), 9880);
        assert_eq!(binom(3, 7), 0);
    }
}
