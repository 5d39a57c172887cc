//! Word-sized prime fields, CRT and rational reconstruction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// 2^61 - 1, the default modulus.
pub const DEFAULT_PRIME: u64 = (1 << 61) - 1;

pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    acc
}

pub fn inv_mod(a: u64, p: u64) -> Option<u64> {
    if a % p == 0 {
        None
    } else {
        Some(pow_mod(a, p - 2, p))
    }
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'outer: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Largest prime strictly below `p`.
pub fn prev_prime(p: u64) -> u64 {
    let mut c = p - 1;
    while !is_prime(c) {
        c -= 1;
    }
    c
}

/// `DEFAULT_PRIME` followed by successively smaller primes.
pub fn prime_sequence() -> impl Iterator<Item = u64> {
    std::iter::successors(Some(DEFAULT_PRIME), |&p| Some(prev_prime(p)))
}

pub fn reduce_int(x: &BigInt, p: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(p));
    r.try_into().expect("residue fits in u64")
}

pub fn reduce_rational(x: &BigRational, p: u64) -> Result<u64> {
    let den = reduce_int(x.denom(), p);
    let inv = inv_mod(den, p).ok_or(Error::BadPrime(p))?;
    Ok(mul_mod(reduce_int(x.numer(), p), inv, p))
}

/// Combines `x ≡ a (mod m)` with `x ≡ b (mod p)`, returning the residue mod `m p`.
pub fn crt_combine(a: &BigInt, m: &BigInt, b: u64, p: u64) -> BigInt {
    let pb = BigInt::from(p);
    let a_mod_p = reduce_int(a, p);
    let m_mod_p = reduce_int(m, p);
    let diff = (b + p - a_mod_p) % p;
    let t = mul_mod(diff, inv_mod(m_mod_p, p).expect("coprime moduli"), p);
    let out = a + m * BigInt::from(t);
    out.mod_floor(&(m * pb))
}

/// Wang's rational reconstruction: the fraction `n/d` with `|n|, d <= sqrt(m/2)`
/// and `n ≡ a d (mod m)`, if one exists.
pub fn rational_reconstruct(a: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let qt = &r0 / &r1;
        let r2 = &r0 - &qt * &r1;
        let t2 = &t0 - &qt * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(BigRational::new(r1, t1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_prime_is_prime() {
        assert!(is_prime(DEFAULT_PRIME));
        assert!(!is_prime(DEFAULT_PRIME - 2));
        let p2 = prev_prime(DEFAULT_PRIME);
        assert!(p2 < DEFAULT_PRIME && is_prime(p2) && p2 > 1 << 60);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(561));
    }

    #[test]
    fn reconstruction_recovers_small_fractions() {
        let m = BigInt::from(DEFAULT_PRIME);
        for (n, d) in [(3i64, 7i64), (-5, 12), (0, 1), (123456, 789)] {
            let x = BigRational::new(n.into(), d.into());
            let a = BigInt::from(reduce_rational(&x, DEFAULT_PRIME).unwrap());
            assert_eq!(rational_reconstruct(&a, &m), Some(x));
        }
    }

    #[test]
    fn crt_recombines_two_primes() {
        let (p, q) = (1_000_000_007u64, 998_244_353u64);
        let x = BigInt::from(123_456_789_012_345i64);
        let a = BigInt::from(reduce_int(&x, p));
        let c = crt_combine(&a, &BigInt::from(p), reduce_int(&x, q), q);
        assert_eq!(c, x);
    }

    #[test]
    fn zero_denominator_mod_p_is_a_retry_signal() {
        let x = BigRational::new(1.into(), 7.into());
        assert_eq!(reduce_rational(&x, 7), Err(Error::BadPrime(7)));
    }
}
