//! Finite-precision arithmetic in K = Q_p(ζ_m).
//!
//! K is built as the unramified extension W = Q_p(ζ_u) (u the prime-to-p part
//! of m) followed by the totally ramified Q_p(ζ_{p^r}), whose ring of integers
//! is W[π]/(E(π)) with E(x) = Φ_{p^r}(x + 1) Eisenstein and π = ζ_{p^r} - 1.
//! Every element is stored as `p^shift * unit` where `unit` is a vector over
//! the basis θ^i π^j modulo p^M and not divisible by p. Valuations are exact
//! rationals normalized so that v(p) = 1; internally they are counted in
//! π-units (1/e_ram).

mod residue;
mod ring;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{
    fmt_rational, is_prime, multiplicative_order, parse_rational, prime_divisors, totient, Rational,
};
use crate::error::{Error, Result};
use ring::{Ring, Vector};

/// Default absolute precision, in uniformizer digits.
pub const DEFAULT_PRECISION: u32 = 64;

/// Saturation bound for precision arithmetic.
const EXACT: i64 = i64::MAX / 4;

const GUARD_DIGITS: u32 = 4;

/// Exact valuation with a top element for "zero to working precision".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(Rational),
    Top,
}

impl Valuation {
    pub fn finite(&self) -> Option<Rational> {
        match self {
            Valuation::Finite(v) => Some(*v),
            Valuation::Top => None,
        }
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Valuation::Top)
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Top, Valuation::Top) => Ordering::Equal,
            (Valuation::Top, _) => Ordering::Greater,
            (_, Valuation::Top) => Ordering::Less,
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => f.write_str(&fmt_rational(v)),
            Valuation::Top => f.write_str("inf"),
        }
    }
}

/// Parameters of the field K = Q_p(ζ_m) at a fixed precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldDescriptor {
    pub p: u64,
    pub m: u64,
    /// p-adic valuation of m.
    pub r: u32,
    /// Prime-to-p part of m.
    pub u: u64,
    /// Inertia degree: order of p modulo u.
    pub f: u32,
    /// Ramification index φ(p^r).
    pub e_ram: u32,
    /// Absolute precision in uniformizer digits.
    pub precision: u32,
}

#[derive(Serialize, Deserialize)]
struct FieldJson {
    p: u64,
    m: u64,
    precision: u32,
}

#[derive(Debug)]
struct FieldData {
    desc: FieldDescriptor,
    ring: Ring,
    /// Teichmüller root of unity of order u, as a ring vector.
    zeta_u: Vector,
}

/// Shared handle to a field; cheap to clone.
#[derive(Debug, Clone)]
pub struct Field(Arc<FieldData>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.desc == other.0.desc
    }
}

impl Eq for Field {}

impl Serialize for Field {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let d = self.descriptor();
        FieldJson {
            p: d.p,
            m: d.m,
            precision: d.precision,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Field {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = FieldJson::deserialize(d)?;
        make_field(j.p, j.m, j.precision).map_err(serde::de::Error::custom)
    }
}

/// Build K = Q_p(ζ_m) with `precision` uniformizer digits of absolute precision.
pub fn make_field(p: u64, m: u64, precision: u32) -> Result<Field> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if m == 0 {
        return Err(Error::InvalidField("m must be positive".into()));
    }
    if precision == 0 {
        return Err(Error::InvalidField("precision must be positive".into()));
    }
    let mut r = 0u32;
    let mut u = m;
    while u.is_multiple_of(p) {
        u /= p;
        r += 1;
    }
    let f = if u > 1 {
        multiplicative_order(p % u, u) as u32
    } else {
        1
    };
    let e_ram = if r >= 1 { totient(p.pow(r)) as u32 } else { 1 };
    let desc = FieldDescriptor {
        p,
        m,
        r,
        u,
        f,
        e_ram,
        precision,
    };

    // A few guard digits so that moderately negative valuations keep the
    // full absolute precision.
    let digits = precision.div_ceil(e_ram) + GUARD_DIGITS;
    let pb = BigInt::from(p);
    let modulus = num_traits::pow(pb.clone(), digits as usize);
    let h = residue::first_irreducible(p, f)
        .into_iter()
        .map(BigInt::from)
        .collect();
    let eis = eisenstein(p, r);
    let ring = Ring {
        p: pb,
        digits,
        modulus,
        e: e_ram as usize,
        f: f as usize,
        h,
        eis,
    };
    let zeta_u = teichmuller_root(&ring, p, u);
    Ok(Field(Arc::new(FieldData { desc, ring, zeta_u })))
}

/// Lower coefficients of Φ_{p^r}(x + 1); for r = 0 the polynomial x.
fn eisenstein(p: u64, r: u32) -> Vec<BigInt> {
    if r == 0 {
        return vec![BigInt::zero()];
    }
    let step = p.pow(r - 1) as usize;
    let degree = step * (p as usize - 1);
    let mut coeffs = vec![BigInt::zero(); degree + 1];
    for k in 0..p as usize {
        // (x + 1)^(k * step)
        let n = k * step;
        let mut binom = BigInt::one();
        for (i, c) in coeffs.iter_mut().enumerate().take(n + 1) {
            *c += &binom;
            binom = binom * BigInt::from(n - i) / BigInt::from(i + 1);
        }
    }
    debug_assert!(coeffs[degree].is_one());
    coeffs.truncate(degree);
    coeffs
}

/// Teichmüller lift of a residue element whose power has exact order u.
fn teichmuller_root(ring: &Ring, p: u64, u: u64) -> Vector {
    if u == 1 {
        return ring.one();
    }
    let q = ring.residue_size();
    let cofactor = (&q - 1u32) / BigUint::from(u);
    let f = ring.f;
    let total = q.to_u64().expect("residue field too large");
    for code in 1..total {
        let mut v = ring.zero();
        let mut c = code;
        for slot in v.iter_mut().take(f) {
            *slot = BigInt::from(c % p);
            c /= p;
        }
        let mut t = v;
        for _ in 0..ring.digits {
            t = ring.pow(&t, &q);
        }
        let w = ring.pow(&t, &cofactor);
        let primitive = prime_divisors(u).into_iter().all(|l| {
            let x = ring.pow(&w, &BigUint::from(u / l));
            ring.min_vp(&ring.sub(&x, &ring.one())) == Some(0)
        });
        if primitive {
            return w;
        }
    }
    unreachable!("F_q^* is cyclic of order divisible by u")
}

impl Field {
    pub fn descriptor(&self) -> &FieldDescriptor {
        &self.0.desc
    }

    pub fn p(&self) -> u64 {
        self.0.desc.p
    }

    pub fn e_ram(&self) -> i64 {
        i64::from(self.0.desc.e_ram)
    }

    fn ring(&self) -> &Ring {
        &self.0.ring
    }

    /// Representational absolute precision for an element with the given shift.
    fn cap(&self, shift: i64) -> i64 {
        self.e_ram() * (shift + i64::from(self.ring().digits))
    }

    /// Absolute precision given to fresh inputs, in π-units.
    fn input_prec(&self, shift: i64) -> i64 {
        i64::from(self.0.desc.precision).min(self.cap(shift))
    }

    pub fn zero(&self) -> PadicElement {
        let prec = self.input_prec(0);
        PadicElement {
            field: self.clone(),
            shift: 0,
            unit: self.ring().zero(),
            prec,
        }
    }

    pub fn one(&self) -> PadicElement {
        self.int(1)
    }

    pub fn int(&self, n: i64) -> PadicElement {
        self.rational(&Rational::from_integer(n))
    }

    pub fn rational(&self, x: &Rational) -> PadicElement {
        if x.is_zero() {
            return self.zero();
        }
        let p = self.p() as i64;
        let (mut num, mut den) = (*x.numer(), *x.denom());
        let mut shift = 0i64;
        while num % p == 0 {
            num /= p;
            shift += 1;
        }
        while den % p == 0 {
            den /= p;
            shift -= 1;
        }
        let ring = self.ring();
        let num = BigInt::from(num);
        let den = BigInt::from(den);
        let inv = big_mod_inverse(&den, &ring.modulus);
        let unit = ring.int(&(num * inv));
        PadicElement::normalized(self.clone(), shift, unit, self.input_prec(shift))
    }

    /// The uniformizer π = ζ_{p^r} - 1 (or p when the field is unramified).
    pub fn uniformizer(&self) -> PadicElement {
        if self.e_ram() == 1 {
            return self.int(self.p() as i64);
        }
        PadicElement::normalized(self.clone(), 0, self.ring().pi(), self.input_prec(0))
    }

    /// p^(k div e) * π^(k mod e): an element of valuation k/e. This is not π^k
    /// in general since p = π^e only up to a unit.
    pub fn uniformizer_pow(&self, k: i64) -> PadicElement {
        let e = self.e_ram();
        let ring = self.ring();
        if e == 1 {
            return PadicElement::normalized(self.clone(), k, ring.one(), self.input_prec(k));
        }
        let (q, r) = (k.div_euclid(e), k.rem_euclid(e));
        let unit = ring.pow(&ring.pi(), &BigUint::from(r as u64));
        PadicElement::normalized(self.clone(), q, unit, self.input_prec(q))
    }

    /// Primitive k-th root of unity (k must divide m).
    pub fn root_of_unity(&self, k: u64) -> Result<PadicElement> {
        root_of_unity(self, k)
    }

    /// Parse the text form `val:<q>;digits:<c,..>[;prec:<q>]`, the
    /// rational shorthand `a/b`, or an integer.
    pub fn parse_element(&self, s: &str) -> Result<PadicElement> {
        let s = s.trim();
        if !s.starts_with("val:") {
            return Ok(self.rational(&parse_rational(s)?));
        }
        let mut val = None;
        let mut digits = None;
        let mut prec = None;
        for part in s.split(';') {
            let (k, v) = part
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("malformed element {s:?}")))?;
            match k.trim() {
                "val" => val = Some(v.trim().to_string()),
                "digits" => digits = Some(v.trim().to_string()),
                "prec" => prec = Some(v.trim().to_string()),
                other => return Err(Error::Parse(format!("unknown key {other:?}"))),
            }
        }
        let val = val.ok_or_else(|| Error::Parse("missing val".into()))?;
        let e = self.e_ram();
        let prec_pi = match prec.as_deref() {
            None => None,
            Some(q) => {
                let q = parse_rational(q)? * e;
                if !q.is_integer() {
                    return Err(Error::Parse(format!("precision {q} not in (1/e)Z")));
                }
                Some(q.to_integer())
            }
        };
        if val == "inf" {
            let prec = prec_pi.unwrap_or(self.input_prec(0));
            return Ok(PadicElement::normalized(
                self.clone(),
                0,
                self.ring().zero(),
                prec,
            ));
        }
        let v = parse_rational(&val)?;
        let shift = v.floor().to_integer();
        let ring = self.ring();
        let raw: Vec<BigInt> = digits
            .unwrap_or_default()
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| {
                t.trim()
                    .parse::<BigInt>()
                    .map_err(|_| Error::Parse(format!("bad digit {t:?}")))
            })
            .collect::<Result<_>>()?;
        if raw.len() != ring.len() {
            return Err(Error::Parse(format!(
                "expected {} digits, got {}",
                ring.len(),
                raw.len()
            )));
        }
        let mut unit = raw;
        ring.reduce(&mut unit);
        let prec = prec_pi.map_or(self.input_prec(shift), |q| q.min(self.cap(shift)));
        let x = PadicElement::normalized(self.clone(), shift, unit, prec);
        if x.valuation() != Valuation::Finite(v) {
            return Err(Error::Parse(format!("digits inconsistent with val {val}")));
        }
        Ok(x)
    }
}

fn big_mod_inverse(a: &BigInt, n: &BigInt) -> BigInt {
    let g = a.extended_gcd(n);
    debug_assert!(g.gcd.is_one());
    g.x.mod_floor(n)
}

/// ζ_k for k | m: the p-power part is a power of 1 + π, the prime-to-p part a
/// power of the Teichmüller generator.
pub fn root_of_unity(field: &Field, k: u64) -> Result<PadicElement> {
    let d = field.descriptor();
    if k == 0 || !d.m.is_multiple_of(k) {
        return Err(Error::RootOrderNotDivisor { k, m: d.m });
    }
    let ring = field.ring();
    let mut a = 0u32;
    let mut b = k;
    while b.is_multiple_of(d.p) {
        b /= d.p;
        a += 1;
    }
    let mut v = ring.one();
    if a > 0 {
        let zeta_pr = ring.add(&ring.one(), &ring.pi());
        let exp = BigUint::from(d.p.pow(d.r - a));
        v = ring.pow(&zeta_pr, &exp);
    }
    if b > 1 {
        let w = ring.pow(&field.0.zeta_u, &BigUint::from(d.u / b));
        v = ring.mul(&v, &w);
    }
    let z = PadicElement::normalized(field.clone(), 0, v, field.input_prec(0));
    // Guard: the construction must give an element of exact order k.
    let one = field.one();
    for l in prime_divisors(k) {
        if (z.pow(k as i64 / l as i64) - one.clone()).is_zero() {
            return Err(Error::InsufficientPrecision(format!(
                "cannot separate roots of unity of order {k}"
            )));
        }
    }
    Ok(z)
}

/// Element of K known modulo π^prec.
#[derive(Clone)]
pub struct PadicElement {
    field: Field,
    shift: i64,
    unit: Vector,
    /// Absolute precision in π-units.
    prec: i64,
}

impl fmt::Debug for PadicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Display for PadicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl PadicElement {
    fn normalized(field: Field, shift: i64, unit: Vector, prec: i64) -> Self {
        let ring = field.ring();
        let prec = prec.min(EXACT);
        match ring.min_vp(&unit) {
            None => PadicElement {
                shift: 0,
                unit: ring.zero(),
                prec,
                field,
            },
            Some(k) => {
                let unit = if k > 0 {
                    ring.div_p_pow(&unit, k)
                } else {
                    unit
                };
                let shift = shift + i64::from(k);
                let v = field.e_ram() * shift + ring.vpi(&unit).unwrap();
                if v >= prec {
                    return PadicElement {
                        shift: 0,
                        unit: ring.zero(),
                        prec,
                        field,
                    };
                }
                let mut unit = unit;
                ring.truncate(&mut unit, shift, prec);
                PadicElement {
                    field,
                    shift,
                    unit,
                    prec,
                }
            }
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// True when the element is zero to working precision.
    pub fn is_zero(&self) -> bool {
        self.unit.iter().all(Zero::is_zero)
    }

    /// Valuation in π-units, `None` when zero to precision.
    pub fn val_pi(&self) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        Some(self.field.e_ram() * self.shift + self.field.ring().vpi(&self.unit).unwrap())
    }

    /// Valuation normalized by v(p) = 1.
    pub fn valuation(&self) -> Valuation {
        match self.val_pi() {
            Some(v) => Valuation::Finite(Rational::new(v, self.field.e_ram())),
            None => Valuation::Top,
        }
    }

    /// Absolute precision in π-units.
    pub fn precision_pi(&self) -> i64 {
        self.prec
    }

    /// Absolute precision in v(p) = 1 units.
    pub fn precision(&self) -> Rational {
        Rational::new(self.prec, self.field.e_ram())
    }

    /// Lower bound for the valuation: the exact value, or the precision when zero.
    fn val_or_prec(&self) -> i64 {
        self.val_pi().unwrap_or(self.prec)
    }

    /// Copy with absolute precision lowered to at most `prec` π-units.
    pub fn with_precision_pi(&self, prec: i64) -> Self {
        let prec = prec.min(self.prec);
        PadicElement::normalized(self.field.clone(), self.shift, self.unit.clone(), prec)
    }

    /// Copy whose precision is reset to what the stored digits can represent.
    /// Used after iterations whose true error is known by other means.
    fn trusted(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut x = self.clone();
        x.prec = self.field.cap(self.shift);
        x
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.add_impl(other))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.add_impl(&other.neg_impl()))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.mul_impl(other))
    }

    fn add_impl(&self, other: &Self) -> Self {
        let prec = self.prec.min(other.prec);
        if self.is_zero() {
            return other.with_precision_pi(prec);
        }
        if other.is_zero() {
            return self.with_precision_pi(prec);
        }
        let ring = self.field.ring();
        let s = self.shift.min(other.shift);
        let lift = |x: &PadicElement| -> Vector {
            let d = x.shift - s;
            if d >= i64::from(ring.digits) {
                ring.zero()
            } else {
                ring.mul_p_pow(&x.unit, d as u32)
            }
        };
        let sum = ring.add(&lift(self), &lift(other));
        let prec = prec.min(self.field.cap(s));
        PadicElement::normalized(self.field.clone(), s, sum, prec)
    }

    fn neg_impl(&self) -> Self {
        let ring = self.field.ring();
        let mut x = self.clone();
        x.unit = ring.neg(&self.unit);
        ring.truncate(&mut x.unit, x.shift, x.prec);
        x
    }

    fn mul_impl(&self, other: &Self) -> Self {
        let prec = self
            .prec
            .saturating_add(other.val_or_prec())
            .min(other.prec.saturating_add(self.val_or_prec()))
            .min(EXACT);
        if self.is_zero() || other.is_zero() {
            return self.field.zero().with_precision_pi(prec);
        }
        let ring = self.field.ring();
        let shift = self.shift + other.shift;
        let unit = ring.mul(&self.unit, &other.unit);
        PadicElement::normalized(
            self.field.clone(),
            shift,
            unit,
            prec.min(self.field.cap(shift)),
        )
    }

    /// Multiplicative inverse.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZeroToPrecision);
        }
        let ring = self.field.ring();
        let e = self.field.e_ram();
        let v = self.val_pi().unwrap();
        let t = ring.vpi(&self.unit).unwrap();
        let rel = self.prec.saturating_sub(v);
        let (shift, unit, lost) = if t == 0 {
            (-self.shift, ring.inv_unit(&self.unit), 0)
        } else {
            let pi_pow = ring.pow(&ring.pi(), &BigUint::from((e - t) as u64));
            let c = ring.div_p_pow(&ring.mul(&self.unit, &pi_pow), 1);
            let w = ring.inv_unit(&c);
            (-self.shift - 1, ring.mul(&pi_pow, &w), e)
        };
        let prec = (-v)
            .saturating_add(rel)
            .min(-v + self.field.cap(0) - lost)
            .min(self.field.cap(shift));
        Ok(PadicElement::normalized(
            self.field.clone(),
            shift,
            unit,
            prec,
        ))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.mul_impl(&other.inv()?))
    }

    /// Integer power (negative exponents invert).
    pub fn pow(&self, n: i64) -> Self {
        if n < 0 {
            return self
                .inv()
                .expect("power of zero with negative exponent")
                .pow(-n);
        }
        let mut result = self.field.one();
        let mut base = self.clone();
        let mut n = n as u64;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul_impl(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_impl(&base);
            }
        }
        result
    }

    /// Difference is zero to precision.
    pub fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_zero()
    }

    /// Square root in K, if the element is a square. `Ok(None)` means no
    /// square root exists in the working field.
    pub fn sqrt(&self) -> Result<Option<Self>> {
        if self.is_zero() {
            return Ok(Some(self.field.zero().with_precision_pi(self.prec / 2)));
        }
        let v = self.val_pi().unwrap();
        if v % 2 != 0 {
            return Ok(None);
        }
        let field = &self.field;
        let half = field.uniformizer_pow(v / 2);
        let w = self.div(&(&half * &half))?;
        let ring = field.ring();
        let e = field.e_ram();
        let v2 = if field.p() == 2 { e } else { 0 };
        let target = 2 * v2 + 1;
        // Residue digit representatives.
        let q = ring.residue_size().to_u64().unwrap();
        let reps: Vec<PadicElement> = (0..q)
            .map(|code| {
                let mut vec = ring.zero();
                let mut c = code;
                for slot in vec.iter_mut().take(ring.f) {
                    *slot = BigInt::from(c % field.p());
                    c /= field.p();
                }
                PadicElement::normalized(field.clone(), 0, vec, field.input_prec(0))
            })
            .collect();
        let mut partial = vec![field.zero()];
        for k in 0..target {
            let pik = field.uniformizer_pow(k);
            let mut next = Vec::new();
            for x in &partial {
                for d in &reps {
                    let y = x.clone() + d.clone() * pik.clone();
                    let r = y.clone() * y.clone() - w.clone();
                    if r.val_or_prec() > k {
                        next.push(y);
                    }
                }
            }
            if next.len() > 1 << 16 {
                return Err(Error::InsufficientPrecision(
                    "square-root search too large".into(),
                ));
            }
            partial = next;
        }
        let Some(x0) = partial.into_iter().next() else {
            return Ok(None);
        };
        let two = field.int(2);
        let mut x = x0.trusted();
        let mut best = i64::MIN;
        for _ in 0..64 {
            let r = x.clone() * x.clone() - w.clone();
            if r.is_zero() || r.val_or_prec() <= best {
                break;
            }
            best = r.val_or_prec();
            let step = r.div(&(two.clone() * x.clone()))?;
            x = (x - step).trusted();
        }
        // Certify: |x - root| <= |x^2 - w| / |2x|.
        let r = x.clone() * x.clone() - w.clone();
        let certified = r.val_or_prec() - v2 - x.val_pi().unwrap_or(0);
        let x = x.with_precision_pi(certified.min(w.prec - v2));
        Ok(Some(x * half))
    }

    /// Text form `val:<q>;digits:<c0,..>;prec:<q>`.
    pub fn to_text(&self) -> String {
        let prec = fmt_rational(&Rational::new(self.prec, self.field.e_ram()));
        if self.is_zero() {
            return format!("val:inf;digits:;prec:{prec}");
        }
        let digits: Vec<String> = self.unit.iter().map(|c| c.to_string()).collect();
        format!(
            "val:{};digits:{};prec:{}",
            self.valuation(),
            digits.join(","),
            prec
        )
    }

    /// The element as a rational number, when it lies in Q and the unit part
    /// is a small integer or its negative (used for diagnostics only).
    pub fn to_small_integer(&self) -> Option<i64> {
        if self.is_zero() {
            return Some(0);
        }
        if self.unit[1..].iter().any(|c| !c.is_zero()) || self.shift < 0 {
            return None;
        }
        let ring = self.field.ring();
        let half = &ring.modulus / 2;
        let c = &self.unit[0];
        let c = if c > &half {
            c - &ring.modulus
        } else {
            c.clone()
        };
        if c.abs() > BigInt::from(1_000_000i64) {
            return None;
        }
        let p = self.field.p() as i64;
        Some(c.to_i64()? * p.checked_pow(self.shift as u32)?)
    }
}

impl Add for PadicElement {
    type Output = PadicElement;
    fn add(self, rhs: Self) -> Self {
        self.checked_add(&rhs).expect("field mismatch")
    }
}

impl Sub for PadicElement {
    type Output = PadicElement;
    fn sub(self, rhs: Self) -> Self {
        self.checked_sub(&rhs).expect("field mismatch")
    }
}

impl Mul for PadicElement {
    type Output = PadicElement;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(&rhs).expect("field mismatch")
    }
}

impl<'a> Add<&'a PadicElement> for &'a PadicElement {
    type Output = PadicElement;
    fn add(self, rhs: Self) -> PadicElement {
        self.checked_add(rhs).expect("field mismatch")
    }
}

impl<'a> Sub<&'a PadicElement> for &'a PadicElement {
    type Output = PadicElement;
    fn sub(self, rhs: Self) -> PadicElement {
        self.checked_sub(rhs).expect("field mismatch")
    }
}

impl<'a> Mul<&'a PadicElement> for &'a PadicElement {
    type Output = PadicElement;
    fn mul(self, rhs: Self) -> PadicElement {
        self.checked_mul(rhs).expect("field mismatch")
    }
}

impl Neg for PadicElement {
    type Output = PadicElement;
    fn neg(self) -> Self {
        self.neg_impl()
    }
}

impl Neg for &PadicElement {
    type Output = PadicElement;
    fn neg(self) -> PadicElement {
        self.neg_impl()
    }
}

/// Field operations exposed as one entry point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Pow(i64),
}

pub fn field_arith(x: &PadicElement, y: &PadicElement, op: ArithOp) -> Result<PadicElement> {
    match op {
        ArithOp::Add => x.checked_add(y),
        ArithOp::Sub => x.checked_sub(y),
        ArithOp::Mul => x.checked_mul(y),
        ArithOp::Div => x.div(y),
        ArithOp::Neg => Ok(-x),
        ArithOp::Pow(n) => {
            if n < 0 && x.is_zero() {
                Err(Error::DivisionByZeroToPrecision)
            } else {
                Ok(x.pow(n))
            }
        }
    }
}

pub fn val(x: &PadicElement) -> Valuation {
    x.valuation()
}

/// Compare |x| with |y| through valuations; never uses floating point.
pub fn abs_cmp(x: &PadicElement, y: &PadicElement) -> Result<Ordering> {
    x.same_field(y)?;
    match (x.val_pi(), y.val_pi()) {
        (Some(a), Some(b)) => Ok(b.cmp(&a)),
        (None, Some(b)) if x.prec > b => Ok(Ordering::Less),
        (Some(a), None) if y.prec > a => Ok(Ordering::Greater),
        _ => Err(Error::InsufficientPrecision(
            "cannot certify absolute-value comparison".into(),
        )),
    }
}

/// Certified comparison of a valuation against a rational threshold:
/// returns the ordering of v(x) relative to `t`.
pub fn cmp_val(x: &PadicElement, t: Rational) -> Result<Ordering> {
    let e = x.field.e_ram();
    match x.val_pi() {
        Some(v) => Ok(Rational::new(v, e).cmp(&t)),
        None if Rational::new(x.prec, e) > t => Ok(Ordering::Greater),
        None => Err(Error::InsufficientPrecision(format!(
            "element is zero to precision {} but compared against {}",
            fmt_rational(&Rational::new(x.prec, e)),
            fmt_rational(&t)
        ))),
    }
}

/// Lower bound of the valuation as a rational: exact value, or precision.
pub fn val_lower_bound(x: &PadicElement) -> Rational {
    Rational::new(x.val_or_prec().min(EXACT), x.field.e_ram())
}
