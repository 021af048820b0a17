//! Arithmetic in the prime field `F_q = {0, 1, ..., q-1}`.
//!
//! Elements are plain integers reduced modulo `q`. The public [`FieldElem`]
//! API carries its modulus so mixing elements from different fields is
//! reported instead of silently producing garbage; the hot loops elsewhere in
//! the crate work on raw `u32` residues through the `*_raw` helpers.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported modulus, `2^31 - 1`. Sums of two residues fit in `u32`.
pub const MAX_MODULUS: u64 = (1 << 31) - 1;

/// Moduli up to this size get a precomputed inverse table.
const INVERSE_TABLE_LIMIT: u32 = 1 << 20;

/// A prime field handle.
#[derive(Clone, Debug)]
pub struct Field {
    q: u32,
    inverses: Option<Arc<[u32]>>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q
    }
}

impl Eq for Field {}

/// An element of a prime field, tagged with its modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElem {
    value: u32,
    modulus: u32,
}

impl FieldElem {
    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.modulus
    }
}

/// The binary field operations exposed by [`Field::arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        r
    };
    'witness: for a in SMALL {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Inverse of `a` modulo `m` by the extended Euclidean algorithm.
/// Returns `None` when `gcd(a, m) != 1`.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

impl Field {
    /// Builds `F_q`, rejecting composite or out-of-range moduli.
    pub fn new(q: u64) -> Result<Self> {
        if q < 2 {
            return Err(Error::TooSmall(q));
        }
        if q > MAX_MODULUS {
            return Err(Error::ModulusTooLarge(q));
        }
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        let q = q as u32;
        let inverses = (q <= INVERSE_TABLE_LIMIT).then(|| {
            let mut table = vec![0u32; q as usize];
            for a in 1..q {
                table[a as usize] = mod_inverse(a as u64, q as u64).unwrap() as u32;
            }
            Arc::from(table)
        });
        Ok(Field { q, inverses })
    }

    #[inline]
    pub fn order(&self) -> u32 {
        self.q
    }

    /// Wraps `value` into the field, reducing it modulo `q`.
    pub fn elem(&self, value: u64) -> FieldElem {
        FieldElem {
            value: (value % self.q as u64) as u32,
            modulus: self.q,
        }
    }

    pub fn zero(&self) -> FieldElem {
        self.elem(0)
    }

    pub fn one(&self) -> FieldElem {
        self.elem(1)
    }

    fn check(&self, a: FieldElem) -> Result<()> {
        if a.modulus != self.q {
            return Err(Error::FieldMismatch {
                expected: self.q,
                found: a.modulus,
            });
        }
        Ok(())
    }

    pub fn arith(&self, a: FieldElem, b: FieldElem, op: FieldOp) -> Result<FieldElem> {
        self.check(a)?;
        self.check(b)?;
        let value = match op {
            FieldOp::Add => self.add_raw(a.value, b.value),
            FieldOp::Sub => self.sub_raw(a.value, b.value),
            FieldOp::Mul => self.mul_raw(a.value, b.value),
        };
        Ok(FieldElem {
            value,
            modulus: self.q,
        })
    }

    pub fn add(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        self.arith(a, b, FieldOp::Add)
    }

    pub fn sub(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        self.arith(a, b, FieldOp::Sub)
    }

    pub fn mul(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        self.arith(a, b, FieldOp::Mul)
    }

    pub fn neg(&self, a: FieldElem) -> Result<FieldElem> {
        self.check(a)?;
        Ok(FieldElem {
            value: self.neg_raw(a.value),
            modulus: self.q,
        })
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem> {
        self.check(a)?;
        if a.value == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(FieldElem {
            value: self.inv_raw(a.value),
            modulus: self.q,
        })
    }

    #[inline]
    pub(crate) fn add_raw(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub(crate) fn sub_raw(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    pub(crate) fn neg_raw(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub(crate) fn mul_raw(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    /// Inverse of a nonzero residue.
    #[inline]
    pub(crate) fn inv_raw(&self, a: u32) -> u32 {
        debug_assert!(a != 0 && a < self.q);
        match &self.inverses {
            Some(table) => table[a as usize],
            None => mod_inverse(a as u64, self.q as u64).unwrap() as u32,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_xoshiro::SplitMix64;

    fn primes_upto(n: u64) -> Vec<u64> {
        (2..=n).filter(|&p| (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)).collect()
    }

    #[test]
    fn construction() {
        assert_eq!(Field::new(7).unwrap().order(), 7);
        assert_eq!(Field::new(8009).unwrap().order(), 8009);
        assert!(matches!(Field::new(9), Err(Error::NotPrime(9))));
        assert!(matches!(Field::new(1), Err(Error::TooSmall(1))));
        assert!(matches!(Field::new(0), Err(Error::TooSmall(0))));
        assert!(Field::new(MAX_MODULUS).is_ok());
        assert!(matches!(Field::new(4294967311), Err(Error::ModulusTooLarge(_))));
    }

    #[test]
    fn miller_rabin_matches_trial_division() {
        let small = primes_upto(5000);
        for n in 0..5000u64 {
            assert_eq!(is_prime(n), small.binary_search(&n).is_ok(), "n = {n}");
        }
        // strong pseudoprimes to several small bases
        for n in [3215031751u64, 2152302898747, 3474749660383, 341550071728321] {
            assert!(!is_prime(n));
        }
        assert!(is_prime(2147483647));
    }

    #[test]
    fn spot_values() {
        let f5 = Field::new(5).unwrap();
        assert_eq!(f5.add(f5.elem(3), f5.elem(4)).unwrap().value(), 2);
        let f7 = Field::new(7).unwrap();
        assert_eq!(f7.inv(f7.elem(3)).unwrap().value(), 5);
        assert!(matches!(f7.inv(f7.zero()), Err(Error::DivisionByZero)));
        assert!(matches!(
            f7.add(f7.one(), f5.one()),
            Err(Error::FieldMismatch { expected: 7, found: 5 })
        ));
    }

    #[test]
    fn inverse_and_negation_exhaustive() {
        for q in primes_upto(101) {
            let f = Field::new(q).unwrap();
            for a in 0..q {
                let x = f.elem(a);
                assert_eq!(f.add(f.neg(x).unwrap(), x).unwrap(), f.zero());
                if a != 0 {
                    let inv = f.inv(x).unwrap();
                    assert_eq!(f.mul(inv, x).unwrap(), f.one(), "q={q} a={a}");
                }
            }
        }
    }

    #[test]
    fn large_modulus_arithmetic() {
        let f = Field::new(MAX_MODULUS).unwrap();
        let a = f.elem(MAX_MODULUS - 1);
        assert_eq!(f.mul(a, a).unwrap(), f.one());
        assert_eq!(f.add(a, a).unwrap().value() as u64, MAX_MODULUS - 2);
        assert_eq!(f.mul(f.inv(a).unwrap(), a).unwrap(), f.one());
    }

    #[test]
    fn commutative_and_associative_random_triples() {
        let mut rng = SplitMix64::seed_from_u64(11);
        for q in [2u64, 3, 5, 7, 4673] {
            let f = Field::new(q).unwrap();
            for _ in 0..2000 {
                let (a, b, c) = (
                    f.elem(rng.gen_range(0..q)),
                    f.elem(rng.gen_range(0..q)),
                    f.elem(rng.gen_range(0..q)),
                );
                for op in [FieldOp::Add, FieldOp::Mul] {
                    assert_eq!(f.arith(a, b, op).unwrap(), f.arith(b, a, op).unwrap());
                    let left = f.arith(f.arith(a, b, op).unwrap(), c, op).unwrap();
                    let right = f.arith(a, f.arith(b, c, op).unwrap(), op).unwrap();
                    assert_eq!(left, right);
                }
                let ab = f.sub(a, b).unwrap();
                assert_eq!(f.add(ab, b).unwrap(), a);
            }
        }
    }
}
