//! Arithmetic in the prime field `F_p` for odd primes.

use std::fmt;
use std::sync::Arc;

use crate::lambda::{LambdaError, RewriteMemo};

/// Shared context for one odd prime: scalar tables plus the pair-rewrite memo
/// used by straightening.
///
/// Cloning is cheap; every clone refers to the same tables and memo.
#[derive(Clone)]
pub struct PrimeContext {
    inner: Arc<Inner>,
}

struct Inner {
    p: u32,
    inverses: Vec<u32>,
    memo: RewriteMemo,
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeContext {
    /// Build the context for `p`. Only odd primes are accepted.
    pub fn new(p: u32) -> Result<Self, LambdaError> {
        if p < 3 || !is_prime(p) || p > 1 << 15 {
            return Err(LambdaError::InvalidPrime(p));
        }
        let mut inverses = vec![0u32; p as usize];
        for a in 1..p {
            inverses[a as usize] = pow_mod(a, p - 2, p);
        }
        Ok(PrimeContext {
            inner: Arc::new(Inner {
                p,
                inverses,
                memo: RewriteMemo::default(),
            }),
        })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.inner.p
    }

    pub(crate) fn memo(&self) -> &RewriteMemo {
        &self.inner.memo
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        (a + b) % self.inner.p
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        (a + self.inner.p - b) % self.inner.p
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        (a * b) % self.inner.p
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        (self.inner.p - a) % self.inner.p
    }

    /// Multiplicative inverse. Panics on zero.
    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        assert!(!a.is_multiple_of(self.inner.p), "inverse of zero in F_{}", self.inner.p);
        self.inner.inverses[(a % self.inner.p) as usize]
    }

    /// Reduce any signed integer into `0..p`.
    #[inline]
    pub fn reduce(&self, a: i64) -> u32 {
        a.rem_euclid(self.inner.p as i64) as u32
    }

    /// `(-1)^e` as a scalar.
    #[inline]
    pub fn sign(&self, e: i64) -> u32 {
        if e.rem_euclid(2) == 0 {
            1
        } else {
            self.inner.p - 1
        }
    }

    /// Binomial coefficient `C(n, k) mod p` by Lucas' theorem; zero when
    /// `k < 0` or `k > n`.
    pub fn binom(&self, n: u64, k: i64) -> u32 {
        if k < 0 || k as u64 > n {
            return 0;
        }
        let p = self.inner.p as u64;
        let (mut n, mut k) = (n, k as u64);
        let mut acc = 1u32;
        while n > 0 || k > 0 {
            let (nd, kd) = ((n % p) as u32, (k % p) as u32);
            if kd > nd {
                return 0;
            }
            acc = self.mul(acc, self.small_binom(nd, kd));
            n /= p;
            k /= p;
        }
        acc
    }

    fn small_binom(&self, n: u32, k: u32) -> u32 {
        // n < p, so the factorials involved are invertible.
        let mut num = 1u32;
        let mut den = 1u32;
        for i in 0..k {
            num = self.mul(num, n - i);
            den = self.mul(den, i + 1);
        }
        self.mul(num, self.inv(den))
    }
}

/// Free-function form of [`PrimeContext::binom`].
pub fn binom_mod_p(n: u64, k: i64, ctx: &PrimeContext) -> u32 {
    ctx.binom(n, k)
}

fn pow_mod(base: u32, mut exp: u32, p: u32) -> u32 {
    let mut acc = 1u64;
    let mut b = base as u64 % p as u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % p as u64;
        }
        b = b * b % p as u64;
        exp >>= 1;
    }
    acc as u32
}

impl PartialEq for PrimeContext {
    fn eq(&self, other: &Self) -> bool {
        self.inner.p == other.inner.p
    }
}

impl Eq for PrimeContext {}

impl fmt::Debug for PrimeContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PrimeContext(p={})", self.inner.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact_binom(n: u64, k: u64) -> u128 {
        if k > n {
            return 0;
        }
        let mut acc: u128 = 1;
        for i in 0..k {
            acc = acc * (n - i) as u128 / (i + 1) as u128;
        }
        acc
    }

    #[test]
    fn rejects_two_and_composites() {
        assert!(PrimeContext::new(2).is_err());
        assert!(PrimeContext::new(9).is_err());
        assert!(PrimeContext::new(1).is_err());
        assert!(PrimeContext::new(5).is_ok());
    }

    #[test]
    fn binomial_examples() {
        let c3 = PrimeContext::new(3).unwrap();
        assert_eq!(binom_mod_p(5, 2, &c3), 1);
        assert_eq!(binom_mod_p(7, 0, &c3), 1);
        assert_eq!(binom_mod_p(3, 5, &c3), 0);
        assert_eq!(binom_mod_p(3, -1, &c3), 0);
    }

    #[test]
    fn lucas_matches_exact_reduction() {
        for p in [3u32, 5, 7] {
            let ctx = PrimeContext::new(p).unwrap();
            for n in 0..60u64 {
                for k in 0..=n {
                    let want = (exact_binom(n, k) % p as u128) as u32;
                    assert_eq!(ctx.binom(n, k as i64), want, "C({n},{k}) mod {p}");
                }
            }
        }
    }

    #[test]
    fn field_ops_stay_in_range() {
        let ctx = PrimeContext::new(5).unwrap();
        for a in 0..5 {
            for b in 0..5 {
                assert!(ctx.add(a, b) < 5 && ctx.sub(a, b) < 5 && ctx.mul(a, b) < 5);
            }
            if a != 0 {
                assert_eq!(ctx.mul(a, ctx.inv(a)), 1);
            }
        }
        assert_eq!(ctx.reduce(-7), 3);
        assert_eq!(ctx.sign(3), 4);
    }
}
