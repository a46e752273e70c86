//! Elementary integer and rational helpers shared by every module.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational numbers used for valuations and distances.
pub type Rational = Ratio<i64>;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factors with multiplicity, ascending.
pub fn factorize(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        while n.is_multiple_of(d) {
            out.push(d);
            n /= d;
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Distinct prime divisors, ascending.
pub fn prime_divisors(n: u64) -> Vec<u64> {
    let mut f = factorize(n);
    f.dedup();
    f
}

/// Multiplicative order of `a` modulo `n` (n >= 2, gcd(a, n) = 1).
pub fn multiplicative_order(a: u64, n: u64) -> u64 {
    debug_assert!(n >= 2 && a.gcd(&n) == 1);
    let mut x = a % n;
    let mut k = 1;
    while x != 1 {
        x = x * a % n;
        k += 1;
    }
    k
}

/// Euler's totient.
pub fn totient(n: u64) -> u64 {
    prime_divisors(n)
        .into_iter()
        .fold(n, |acc, q| acc / q * (q - 1))
}

/// p-adic valuation of a nonzero integer.
pub fn vp_i64(mut n: i64, p: i64) -> i64 {
    debug_assert!(n != 0);
    let mut k = 0;
    while n % p == 0 {
        n /= p;
        k += 1;
    }
    k
}

/// p-adic valuation of a rational; `None` for zero.
pub fn vp_rational(x: &Rational, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let p = p as i64;
    Some(vp_i64(*x.numer(), p) - vp_i64(*x.denom(), p))
}

/// Modular inverse of `a` mod `n`, if it exists.
pub fn mod_inverse(a: i64, n: i64) -> Option<i64> {
    let e = a.rem_euclid(n).extended_gcd(&n);
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(n))
}

/// Canonical string for a rational: `"a"` or `"a/b"`.
pub fn fmt_rational(x: &Rational) -> String {
    if *x.denom() == 1 {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((a, b)) => {
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let b: i64 = b.trim().parse().map_err(|_| bad())?;
            if b == 0 {
                return Err(bad());
            }
            Ok(Rational::new(a, b))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn abs_rational(x: Rational) -> Rational {
    x.abs()
}

/// `ε_k`: 1 when p divides k, else 0.
pub fn epsilon(p: u64, k: u64) -> i64 {
    i64::from(k.is_multiple_of(p))
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_and_factors() {
        assert_eq!(multiplicative_order(2, 3), 2);
        assert_eq!(multiplicative_order(3, 2), 1);
        assert_eq!(multiplicative_order(2, 7), 3);
        assert_eq!(factorize(12), vec![2, 2, 3]);
        assert_eq!(totient(8), 4);
        assert_eq!(totient(9), 6);
    }

    #[test]
    fn rational_text() {
        let r = parse_rational("-3/6").unwrap();
        assert_eq!(fmt_rational(&r), "-1/2");
        assert_eq!(fmt_rational(&parse_rational("4").unwrap()), "4");
        assert!(parse_rational("1/0").is_err());
        assert_eq!(vp_rational(&Rational::new(8, 3), 2), Some(3));
        assert_eq!(vp_rational(&Rational::new(8, 3), 3), Some(-1));
    }

    #[test]
    fn inverses() {
        assert_eq!(mod_inverse(2, 5), Some(3));
        assert_eq!(mod_inverse(3, 7), Some(5));
        assert_eq!(mod_inverse(2, 4), None);
    }
}
