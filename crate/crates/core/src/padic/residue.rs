//! Polynomials over F_p, just enough to find a monic irreducible of given degree.

use crate::arith::prime_divisors;

type Poly = Vec<u64>;

fn trim(mut a: Poly) -> Poly {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
    a
}

fn is_zero(a: &Poly) -> bool {
    a.iter().all(|&c| c == 0)
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // p is prime and small; Fermat.
    let mut r = 1u64;
    let mut b = a % p;
    let mut k = p - 2;
    while k > 0 {
        if k & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        k >>= 1;
    }
    r
}

fn poly_rem(a: &Poly, m: &Poly, p: u64) -> Poly {
    let mut r = trim(a.clone());
    let m = trim(m.clone());
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while r.len() > dm && !is_zero(&r) {
        let dr = r.len() - 1;
        let c = r[dr] * lead_inv % p;
        for i in 0..=dm {
            let sub = c * m[i] % p;
            r[dr - dm + i] = (r[dr - dm + i] + p - sub) % p;
        }
        r = trim(r);
        if r.len() - 1 < dm {
            break;
        }
    }
    r
}

fn poly_mul_mod(a: &Poly, b: &Poly, m: &Poly, p: u64) -> Poly {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    poly_rem(&prod, m, p)
}

fn poly_pow_mod(a: &Poly, mut n: u64, m: &Poly, p: u64) -> Poly {
    let mut result = vec![1u64];
    let mut base = poly_rem(a, m, p);
    while n > 0 {
        if n & 1 == 1 {
            result = poly_mul_mod(&result, &base, m, p);
        }
        base = poly_mul_mod(&base, &base, m, p);
        n >>= 1;
    }
    result
}

fn poly_sub(a: &Poly, b: &Poly, p: u64) -> Poly {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(out)
}

fn poly_gcd(a: &Poly, b: &Poly, p: u64) -> Poly {
    let (mut a, mut b) = (trim(a.clone()), trim(b.clone()));
    while !is_zero(&b) {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// x^(p^k) mod m, by k successive p-th powers.
fn frobenius_power(k: u32, m: &Poly, p: u64) -> Poly {
    let mut x = vec![0, 1];
    for _ in 0..k {
        x = poly_pow_mod(&x, p, m, p);
    }
    x
}

/// Rabin's irreducibility test for a monic polynomial of degree f.
pub(crate) fn is_irreducible(m: &[u64], p: u64) -> bool {
    let f = (m.len() - 1) as u32;
    let x = vec![0u64, 1];
    if !is_zero(&poly_sub(&frobenius_power(f, &m.to_vec(), p), &x, p)) {
        return false;
    }
    for q in prime_divisors(u64::from(f)) {
        let g = poly_gcd(
            &m.to_vec(),
            &poly_sub(&frobenius_power(f / q as u32, &m.to_vec(), p), &x, p),
            p,
        );
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// Lexicographically first monic irreducible polynomial of degree `f` over F_p,
/// returned as its lower coefficients (length f).
pub(crate) fn first_irreducible(p: u64, f: u32) -> Vec<u64> {
    if f == 1 {
        return vec![0];
    }
    let f = f as usize;
    let total = (p as u128).pow(f as u32);
    for code in 0..total {
        let mut lower = Vec::with_capacity(f);
        let mut c = code;
        for _ in 0..f {
            lower.push((c % p as u128) as u64);
            c /= p as u128;
        }
        if lower[0] == 0 {
            continue;
        }
        let mut full = lower.clone();
        full.push(1);
        if is_irreducible(&full, p) {
            return lower;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over F_p")
}
