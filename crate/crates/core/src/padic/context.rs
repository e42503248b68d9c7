use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{PadicError, Result};

/// The prime `p` together with the exponent `epsilon` of the powerful
/// condition: 1 for odd `p`, 2 for `p = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeContext {
    p: u32,
    epsilon: u32,
}

impl PrimeContext {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) || p > u32::MAX as u64 {
            return Err(PadicError::NotPrime(p));
        }
        let epsilon = if p == 2 { 2 } else { 1 };
        Ok(Self {
            p: p as u32,
            epsilon,
        })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn epsilon(&self) -> u32 {
        self.epsilon
    }

    pub fn p_big(&self) -> BigInt {
        BigInt::from(self.p)
    }

    /// `p^e` as a big integer.
    pub fn pow(&self, e: u32) -> BigInt {
        num_traits::pow(self.p_big(), e as usize)
    }

    pub(crate) fn check_same(&self, other: &PrimeContext) -> Result<()> {
        if self.p != other.p {
            return Err(PadicError::PrimeMismatch(self.p, other.p));
        }
        Ok(())
    }

    /// `v_p(n)` for a nonzero integer; `None` for zero.
    pub fn valuation_u64(&self, mut n: u64) -> Option<u32> {
        if n == 0 {
            return None;
        }
        let p = self.p as u64;
        let mut v = 0;
        while n.is_multiple_of(p) {
            n /= p;
            v += 1;
        }
        Some(v)
    }

    pub fn valuation_i128(&self, n: i128) -> Option<u32> {
        if n == 0 {
            return None;
        }
        let p = self.p as i128;
        let mut n = n;
        let mut v = 0;
        while n % p == 0 {
            n /= p;
            v += 1;
        }
        Some(v)
    }

    /// Splits a nonzero big integer as `p^v * u` with `p` not dividing `u`.
    pub fn split_big(&self, n: &BigInt) -> Option<(u32, BigInt)> {
        if n.is_zero() {
            return None;
        }
        let p = self.p_big();
        let mut u = n.clone();
        let mut v = 0;
        loop {
            let (q, r) = u.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            u = q;
            v += 1;
        }
        Some((v, u))
    }

    /// `v_p(k!)` by Legendre's formula.
    pub fn legendre_valuation(&self, k: u64) -> u64 {
        let p = self.p as u64;
        let mut total = 0;
        let mut q = k / p;
        while q > 0 {
            total += q;
            q /= p;
        }
        total
    }

    /// `floor(log_p k)` for `k >= 1`, and 0 for `k = 0`.
    pub fn floor_log(&self, k: u64) -> u32 {
        let p = self.p as u64;
        let mut e = 0;
        let mut pe = p;
        while pe <= k {
            e += 1;
            match pe.checked_mul(p) {
                Some(next) => pe = next,
                None => break,
            }
        }
        e
    }
}

impl TryFrom<u64> for PrimeContext {
    type Error = PadicError;

    fn try_from(p: u64) -> Result<Self> {
        PrimeContext::new(p)
    }
}

impl From<PrimeContext> for u64 {
    fn from(ctx: PrimeContext) -> u64 {
        ctx.p as u64
    }
}

/// Deterministic trial division; primes used here are small.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Inverse of `a` modulo `m` by the extended Euclidean algorithm.
pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let egcd = a.mod_floor(m).extended_gcd(m);
    if !egcd.gcd.is_one() {
        return None;
    }
    Some(egcd.x.mod_floor(m))
}

/// Reduces into `[0, m)`.
#[inline]
pub(crate) fn reduce(a: &BigInt, m: &BigInt) -> BigInt {
    let r = a % m;
    if r.is_negative() {
        r + m
    } else {
        r
    }
}
