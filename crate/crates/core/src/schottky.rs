//! Explicit Schottky generators for the kernels of C_d * C_e -> C_n, realized
//! by s = diag(α, 1) and t = φ diag(β, 1) φ^{-1} with φ = (λ 1; 1 1), and a
//! Ford-domain certificate for them.
//!
//! Matrices are kept free of the 1/(λ - 1) prefactors: every t-syllable is
//! evaluated as φ diag(β^x, 1) adj(φ), which is (λ - 1) times the true matrix.

use serde::{Deserialize, Serialize};

use num_integer::Integer;

use crate::arith::{is_prime, mod_inverse, prime_divisors, Rational};
use crate::error::{Error, Result};
use crate::group::{CyclicAssignment, FreeProduct, FreeProductWord};
use crate::moebius::{
    classify_map, disks_disjoint, isometric_circle, MapClass, MoebiusMap, UltrametricDisk,
};
use crate::padic::{make_field, Field, PadicElement, Valuation, DEFAULT_PRECISION};

const NAMES: [&str; 2] = ["s", "t"];
const S: usize = 0;
const T: usize = 1;

/// The unique f in [1, q) with a f = 1 mod q.
pub fn exponents_to_f(a: u64, q: u64) -> Result<u64> {
    mod_inverse(a as i64, q as i64)
        .map(|f| f as u64)
        .ok_or_else(|| Error::InvalidCoverSpec(format!("{a} is not invertible modulo {q}")))
}

/// Input of the synthesis: orders of s and t, the branch parameter λ and the
/// twist exponents of the defining map onto C_n.
#[derive(Clone, Debug)]
pub struct CoverSpec {
    pub field: Field,
    pub d: u64,
    pub e: u64,
    pub lambda: PadicElement,
    /// Prime and totally ramified cases: t -> f.
    pub f: u64,
    /// Divisor case twist, and the s-twist in the coprime and mixed cases.
    pub k: u64,
    /// t-twist in the coprime and mixed cases.
    pub l: u64,
}

impl CoverSpec {
    /// Build the spec over Q_p(ζ_n), n = lcm(d, e).
    pub fn new(p: u64, d: u64, e: u64, lambda: &str, precision: Option<u32>) -> Result<Self> {
        if d < 2 || e < 2 {
            return Err(Error::InvalidCoverSpec("orders must be at least 2".into()));
        }
        let field = make_field(p, d.lcm(&e), precision.unwrap_or(DEFAULT_PRECISION))?;
        let lambda = field.parse_element(lambda)?;
        Ok(CoverSpec {
            field,
            d,
            e,
            lambda,
            f: 1,
            k: 1,
            l: 1,
        })
    }

    pub fn with_twists(mut self, f: u64, k: u64, l: u64) -> Self {
        self.f = f;
        self.k = k;
        self.l = l;
        self
    }

    pub fn n(&self) -> u64 {
        self.d.lcm(&self.e)
    }

    fn validate(&self) -> Result<()> {
        if self.d < 2 || self.e < 2 {
            return Err(Error::InvalidCoverSpec("orders must be at least 2".into()));
        }
        let m = self.field.descriptor().m;
        if !m.is_multiple_of(self.n()) {
            return Err(Error::RootOrderNotDivisor { k: self.n(), m });
        }
        if self.lambda.field() != &self.field {
            return Err(Error::FieldMismatch);
        }
        let lm1 = &self.lambda - &self.field.one();
        if lm1.is_zero() || self.lambda.valuation() != Valuation::Finite(Rational::from_integer(0))
        {
            return Err(Error::InvalidCoverSpec(
                "λ must satisfy |λ| = 1 and λ ≠ 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    Prime,
    TotalRam,
    Divisor,
    Coprime,
    Mixed,
    Reidemeister,
}

#[derive(Clone, Debug)]
pub struct Generator {
    /// Word as written in the construction, e.g. `s^2 t s^-3`.
    pub label: String,
    /// Reduced word in C_d * C_e.
    pub word: FreeProductWord,
    /// Where the generator comes from in the recursive construction.
    pub origin: String,
    /// Matrix with the (λ - 1) prefactors cleared.
    pub matrix: MoebiusMap,
}

#[derive(Clone, Debug)]
pub struct SchottkyPresentation {
    pub field: Field,
    pub case: CaseTag,
    pub d: u64,
    pub e: u64,
    pub lambda: PadicElement,
    /// Primitive n-th root of unity the rotations are taken from.
    pub zeta: PadicElement,
    pub assignment: CyclicAssignment,
    pub expected_rank: usize,
    pub generators: Vec<Generator>,
    s: MoebiusMap,
    t_root: PadicElement,
}

/// Rotation angles of s and t as powers of ζ_n.
fn root_exponents(case: CaseTag, d: u64, e: u64) -> (u64, u64) {
    let n = d.lcm(&e);
    match case {
        CaseTag::Coprime => {
            // s^e = diag(ζ^e) and t^d = φ diag(ζ^d) φ^{-1}.
            let y = mod_inverse(e as i64, d as i64).unwrap() as u64;
            let z = mod_inverse(d as i64, e as i64).unwrap() as u64;
            ((e * y) % n, (d * z) % n)
        }
        _ => (n / d, n / e),
    }
}

struct Rep {
    alpha: PadicElement,
    beta: PadicElement,
    lambda: PadicElement,
}

impl Rep {
    fn s_pow(&self, x: u64) -> MoebiusMap {
        let one = self.alpha.field().one();
        MoebiusMap::diag(self.alpha.pow(x as i64), one)
    }

    /// φ diag(β^x, 1) adj(φ) = (λ - 1) t^x.
    fn t_pow(&self, x: u64) -> Result<MoebiusMap> {
        let f = self.alpha.field();
        let one = f.one();
        let b = self.beta.pow(x as i64);
        let lam = &self.lambda;
        // (λ 1; 1 1) diag(b, 1) (1 -1; -1 λ)
        let a11 = lam * &b - one.clone();
        let a12 = lam * &(one.clone() - b.clone());
        let a21 = &b - &one;
        let a22 = lam - &b;
        MoebiusMap::new(a11, a12, a21, a22).map_err(|_| {
            Error::InsufficientPrecision("(λ - 1)^2 vanishes at working precision".into())
        })
    }

    fn word(&self, w: &FreeProductWord) -> Result<MoebiusMap> {
        let mut out = MoebiusMap::identity(self.alpha.field());
        for &(f, x) in w.syllables() {
            let m = if f == S {
                self.s_pow(x)
            } else {
                self.t_pow(x)?
            };
            out = out.compose(&m);
        }
        Ok(out)
    }
}

fn label(raw: &[(usize, i64)]) -> String {
    let parts: Vec<String> = raw
        .iter()
        .filter(|(_, x)| *x != 0)
        .map(|&(f, x)| {
            if x == 1 {
                NAMES[f].to_string()
            } else {
                format!("{}^{x}", NAMES[f])
            }
        })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join(" ")
    }
}

fn conjugate_raw(conj: &[(usize, i64)], inner: &[(usize, i64)]) -> Vec<(usize, i64)> {
    let mut out = conj.to_vec();
    out.extend_from_slice(inner);
    out.extend(conj.iter().rev().map(|&(f, x)| (f, -x)));
    out
}

struct Builder {
    fp: FreeProduct,
    rep: Rep,
    gens: Vec<Generator>,
}

impl Builder {
    fn push(&mut self, raw: Vec<(usize, i64)>, origin: String) -> Result<()> {
        let word = self.fp.word(&raw);
        let matrix = self.rep.word(&word)?;
        self.gens.push(Generator {
            label: label(&raw),
            word,
            origin,
            matrix,
        });
        Ok(())
    }
}

/// Dispatch on the arithmetic of (d, e).
pub fn synthesize(spec: &CoverSpec) -> Result<SchottkyPresentation> {
    let (d, e) = (spec.d, spec.e);
    if d == e {
        if is_prime(d) {
            synth_prime(spec)
        } else {
            synth_total_ram(spec)
        }
    } else if d % e == 0 || e % d == 0 {
        synth_divisor(spec)
    } else if d.gcd(&e) == 1 {
        synth_coprime(spec)
    } else {
        synth_mixed(spec)
    }
}

fn start(
    spec: &CoverSpec,
    case: CaseTag,
    images: Vec<u64>,
) -> Result<(Builder, CyclicAssignment, PadicElement)> {
    spec.validate()?;
    let n = spec.n();
    let fp = FreeProduct::new(vec![spec.d, spec.e])?;
    let assignment = CyclicAssignment::new(&fp, n, images)?;
    let zeta = spec.field.root_of_unity(n)?;
    let (a, b) = root_exponents(case, spec.d, spec.e);
    let rep = Rep {
        alpha: zeta.pow(a as i64),
        beta: zeta.pow(b as i64),
        lambda: spec.lambda.clone(),
    };
    Ok((
        Builder {
            fp,
            rep,
            gens: Vec::new(),
        },
        assignment,
        zeta,
    ))
}

fn finish(
    spec: &CoverSpec,
    case: CaseTag,
    b: Builder,
    assignment: CyclicAssignment,
    zeta: PadicElement,
    expected_rank: usize,
) -> SchottkyPresentation {
    debug_assert_eq!(b.gens.len(), expected_rank);
    let s = b.rep.s_pow(1);
    SchottkyPresentation {
        field: spec.field.clone(),
        case,
        d: spec.d,
        e: spec.e,
        lambda: spec.lambda.clone(),
        zeta,
        assignment,
        expected_rank,
        generators: b.gens,
        s,
        t_root: b.rep.beta,
    }
}

/// d = e = q prime, map s -> 1, t -> f: generators s^i t s^{-f-i}, i = 1..q-1.
pub fn synth_prime(spec: &CoverSpec) -> Result<SchottkyPresentation> {
    let q = spec.d;
    if spec.e != q || !is_prime(q) {
        return Err(Error::InvalidCoverSpec(
            "prime case needs d = e prime".into(),
        ));
    }
    if spec.f.is_multiple_of(q) {
        return Err(Error::InvalidCoverSpec(format!(
            "f = {} must be prime to {q}",
            spec.f
        )));
    }
    let f = (spec.f % q) as i64;
    let (mut b, a, zeta) = start(spec, CaseTag::Prime, vec![1, f as u64])?;
    for i in 1..q as i64 {
        b.push(
            vec![(S, i), (T, 1), (S, -f - i)],
            format!("Γ({q},{q})[{i}]"),
        )?;
    }
    Ok(finish(spec, CaseTag::Prime, b, a, zeta, (q - 1) as usize))
}

fn smallest_prime(m: u64) -> u64 {
    prime_divisors(m)[0]
}

/// Position of s^j t s^{-j-f} in the descent Γ(m,m) = <Γ(q,q), ζ_q^b Γ(m',m') ζ_q^{-b}>
/// with q the smallest prime factor and ζ_q = s^{m'}.
fn total_ram_origin(m: u64, j: u64) -> String {
    if is_prime(m) {
        return format!("Γ({m},{m})[{j}]");
    }
    let q = smallest_prime(m);
    let mp = m / q;
    let (a, bb) = (j % mp, j / mp);
    if a == 0 {
        format!("Γ({q},{q})[{bb}] via s^{mp}")
    } else if bb == 0 {
        total_ram_origin(mp, a)
    } else {
        format!("s^{} {} s^-{}", mp * bb, total_ram_origin(mp, a), mp * bb)
    }
}

/// d = e = m, map s -> 1, t -> f: generators s^j t s^{-j-f}, j = 1..m-1, with
/// origins recording the descent through the prime factors of m.
pub fn synth_total_ram(spec: &CoverSpec) -> Result<SchottkyPresentation> {
    let m = spec.d;
    if spec.e != m {
        return Err(Error::InvalidCoverSpec(
            "totally ramified case needs d = e".into(),
        ));
    }
    if spec.f.gcd(&m) != 1 {
        return Err(Error::InvalidCoverSpec(format!(
            "f = {} must be prime to {m}",
            spec.f
        )));
    }
    let f = (spec.f % m) as i64;
    let (mut b, a, zeta) = start(spec, CaseTag::TotalRam, vec![1, f as u64])?;
    for j in 1..m {
        b.push(
            vec![(S, j as i64), (T, 1), (S, -(j as i64) - f)],
            total_ram_origin(m, j),
        )?;
    }
    Ok(finish(
        spec,
        CaseTag::TotalRam,
        b,
        a,
        zeta,
        (m - 1) as usize,
    ))
}

/// One order divides the other. With B the factor of order n and A the other
/// (order a, f = n/a): map B -> 1, A -> f k, generators
/// B^c (B^{fk})^j A (B^{fk})^{-j-1} B^{-c}, j = 1..a-1, for f conjugators c.
pub fn synth_divisor(spec: &CoverSpec) -> Result<SchottkyPresentation> {
    let (d, e) = (spec.d, spec.e);
    let (big, small, n, a) = if d % e == 0 {
        (S, T, d, e)
    } else if e % d == 0 {
        (T, S, e, d)
    } else {
        return Err(Error::InvalidCoverSpec(
            "divisor case needs e | d or d | e".into(),
        ));
    };
    if spec.k.gcd(&a) != 1 {
        return Err(Error::InvalidCoverSpec(format!(
            "k = {} must be prime to {a}",
            spec.k
        )));
    }
    let f = n / a;
    let k = spec.k % n;
    let fk = (f * k) as i64;
    let mut images = vec![0; 2];
    images[big] = 1;
    images[small] = f * k % n;
    let (mut b, asg, zeta) = start(spec, CaseTag::Divisor, images)?;
    // The conjugators must run over B modulo <B^f>; i k does when k is prime to f.
    let coprime = k.gcd(&f) == 1;
    for i in 1..=f {
        let c = if coprime { (i * k) as i64 } else { i as i64 };
        for j in 1..a as i64 {
            let inner = vec![(big, fk * j), (small, 1), (big, -fk * (j + 1))];
            let raw = conjugate_raw(&[(big, c)], &inner);
            b.push(
                raw,
                format!("{}^{c} γ[{j}] {}^-{c}", NAMES[big], NAMES[big]),
            )?;
        }
    }
    Ok(finish(
        spec,
        CaseTag::Divisor,
        b,
        asg,
        zeta,
        (f * (a - 1)) as usize,
    ))
}

/// gcd(d, e) = 1, map s -> e k, t -> d l: commutators σ^-i τ^-j σ^i τ^j with
/// σ = s^e, τ = t^d.
pub fn synth_coprime(spec: &CoverSpec) -> Result<SchottkyPresentation> {
    let (d, e) = (spec.d, spec.e);
    if d.gcd(&e) != 1 {
        return Err(Error::InvalidCoverSpec(
            "coprime case needs gcd(d, e) = 1".into(),
        ));
    }
    let n = d * e;
    let (mut b, asg, zeta) = start(spec, CaseTag::Coprime, vec![e * spec.k % n, d * spec.l % n])?;
    let (d_, e_) = (d as i64, e as i64);
    for i in 1..d_ {
        for j in 1..e_ {
            let raw = vec![(S, -e_ * i), (T, -d_ * j), (S, e_ * i), (T, d_ * j)];
            b.push(raw, format!("[σ^{i}, τ^{j}]"))?;
        }
    }
    Ok(finish(
        spec,
        CaseTag::Coprime,
        b,
        asg,
        zeta,
        ((d - 1) * (e - 1)) as usize,
    ))
}

/// General case with ℓ = gcd(d, e) > 1 and neither order dividing the other;
/// d = ℓ d', e = ℓ e', m = d' e', n = ℓ m, map s -> e' k, t -> d' l.
///
/// The kernel K' of the reduction to C_m is free on
/// x_ab = s^a t^b s t^-b s^-(a+1) (0 <= a < d'-1, 0 < b < e') times the
/// order-ℓ factors A_b = t^b s^d' t^-b and B_a = s^a t^e' s^-a. The kernel
/// of K' -> C_ℓ is then spanned by the A_0-conjugates of the x_ab and by
/// A_0^c Y A_0^(-c-f) (c = 1..ℓ-1) for every other factor Y, exactly as in
/// the totally ramified case.
pub fn synth_mixed(spec: &CoverSpec) -> Result<SchottkyPresentation> {
    let (d, e) = (spec.d, spec.e);
    let ell = d.gcd(&e);
    if ell == 1 || d % e == 0 || e % d == 0 {
        return Err(Error::InvalidCoverSpec(
            "mixed case needs 1 < gcd(d, e) with d ∤ e and e ∤ d".into(),
        ));
    }
    let (dp, ep) = (d / ell, e / ell);
    let n = ell * dp * ep;
    let (k, l) = (spec.k, spec.l);
    let (mut b, asg, zeta) = start(spec, CaseTag::Mixed, vec![ep * k % n, dp * l % n])?;
    let kinv = mod_inverse(k as i64, ell as i64)
        .ok_or_else(|| Error::InvalidCoverSpec(format!("k = {k} must be prime to {ell}")))?;
    let fb = (l as i64 * kinv).rem_euclid(ell as i64);
    let (ell_, dp_, ep_) = (ell as i64, dp as i64, ep as i64);
    let a0 = |c: i64| vec![(S, dp_ * c)];
    for c in 0..ell_ {
        for a in 0..dp_ - 1 {
            for bb in 1..ep_ {
                let x = vec![(S, a), (T, bb), (S, 1), (T, -bb), (S, -(a + 1))];
                let origin = format!("Γ({dp},{ep}) x[{a},{bb}]");
                if c == 0 {
                    b.push(x, origin)?;
                } else {
                    b.push(
                        conjugate_raw(&a0(c), &x),
                        format!("s^{} {origin} s^-{}", dp_ * c, dp_ * c),
                    )?;
                }
            }
        }
    }
    for bb in 1..ep_ {
        for c in 1..ell_ {
            let raw = vec![
                (S, dp_ * c),
                (T, bb),
                (S, dp_),
                (T, -bb),
                (S, -dp_ * (c + 1)),
            ];
            b.push(
                raw,
                format!("Γ({ell},{ell})[{c}] on s^{dp}, t^{bb} s^{dp} t^-{bb}"),
            )?;
        }
    }
    for a in 0..dp_ {
        for c in 1..ell_ {
            let raw = vec![(S, dp_ * c + a), (T, ep_), (S, -a - dp_ * (c + fb))];
            b.push(
                raw,
                format!("Γ({ell},{ell})[{c}] on s^{dp}, s^{a} t^{ep} s^-{a}"),
            )?;
        }
    }
    let rank = ((dp - 1) * (ep - 1) + (ell - 1) * dp * ep) as usize;
    Ok(finish(spec, CaseTag::Mixed, b, asg, zeta, rank))
}

/// Words s_0^j s_i s_0^{-j-1} (j = 1..n-1, i = 1..m) in the free product of
/// m + 1 copies of C_n, with the matching product structure.
pub fn synth_reidemeister(
    m: usize,
    n: u64,
) -> Result<(FreeProduct, Vec<(String, FreeProductWord)>)> {
    if m < 1 || n < 2 {
        return Err(Error::InvalidCoverSpec("need m >= 1 and n >= 2".into()));
    }
    let fp = FreeProduct::new(vec![n; m + 1])?;
    let mut out = Vec::new();
    for i in 1..=m {
        for j in 1..n as i64 {
            let w = fp.word(&[(0, j), (i, 1), (0, -j - 1)]);
            out.push((format!("s0^{j} s{i} s0^-{}", j + 1), w));
        }
    }
    Ok((fp, out))
}

/// Riemann-Hurwitz for a cyclic cover of degree n with the given
/// ramification indices: 2g - 2 = -2n + Σ (n / e_i)(e_i - 1).
pub fn expected_genus(n: u64, ram: &[u64]) -> Result<i64> {
    if n < 1 {
        return Err(Error::InvalidRamification("degree must be positive".into()));
    }
    let mut total = -2 * n as i64;
    for &e in ram {
        if e < 2 || !n.is_multiple_of(e) {
            return Err(Error::InvalidRamification(format!(
                "index {e} does not divide {n}"
            )));
        }
        total += ((n / e) * (e - 1)) as i64;
    }
    if total % 2 != 0 {
        return Err(Error::InvalidRamification("2g - 2 is odd".into()));
    }
    Ok(total / 2 + 1)
}

impl SchottkyPresentation {
    pub fn free_product(&self) -> FreeProduct {
        FreeProduct::new(vec![self.d, self.e]).unwrap()
    }

    /// s and (λ - 1) t as matrices.
    pub fn base_matrices(&self) -> Result<(MoebiusMap, MoebiusMap)> {
        let rep = self.rep();
        Ok((rep.s_pow(1), rep.t_pow(1)?))
    }

    fn rep(&self) -> Rep {
        let alpha = self.s.a.clone();
        Rep {
            alpha,
            beta: self.t_root.clone(),
            lambda: self.lambda.clone(),
        }
    }

    /// Matrix of an arbitrary word under the same normalization.
    pub fn word_matrix(&self, w: &FreeProductWord) -> Result<MoebiusMap> {
        self.rep().word(w)
    }

    /// Number of (λ - 1) factors carried by the matrix of `w`.
    pub fn scale_power(w: &FreeProductWord) -> i64 {
        w.syllables().iter().filter(|(f, _)| *f == T).count() as i64
    }

    /// Determinant of the true matrix: det / (λ - 1)^{2 #t-syllables}.
    pub fn true_det(&self, g: &Generator) -> Result<PadicElement> {
        let lm1 = &self.lambda - &self.field.one();
        g.matrix.det().div(&lm1.pow(2 * Self::scale_power(&g.word)))
    }

    pub fn genus(&self) -> Result<i64> {
        let n = self.d.lcm(&self.e);
        expected_genus(n, &[self.d, self.d, self.e, self.e])
    }
}

/// Ford-domain certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub all_hyperbolic: bool,
    pub first_non_hyperbolic: Option<String>,
    pub circles_disjoint: bool,
    pub first_intersecting_pair: Option<(String, String)>,
    pub is_schottky_certified: bool,
    /// Certified non-hyperbolic generator: the group is not Schottky.
    pub refuted: bool,
    pub genus: i64,
    /// Largest v(c1 - c2) over the compared circle pairs.
    #[serde(serialize_with = "crate::tree::ser_opt_rational")]
    pub closest_centers_val: Option<Rational>,
    pub skipped_coincident_pairs: usize,
}

pub fn verify_schottky(pres: &SchottkyPresentation) -> Result<VerificationReport> {
    let genus = pres.expected_rank as i64;
    let mut report = VerificationReport {
        all_hyperbolic: true,
        first_non_hyperbolic: None,
        circles_disjoint: false,
        first_intersecting_pair: None,
        is_schottky_certified: false,
        refuted: false,
        genus,
        closest_centers_val: None,
        skipped_coincident_pairs: 0,
    };
    for g in &pres.generators {
        let class = classify_map(&g.matrix).map_err(|e| match e {
            Error::InsufficientPrecision(m) => {
                Error::InsufficientPrecision(format!("{}: {m}", g.label))
            }
            e => e,
        })?;
        if class == MapClass::NonHyperbolic {
            report.all_hyperbolic = false;
            report.refuted = true;
            report.first_non_hyperbolic = Some(g.label.clone());
            return Ok(report);
        }
    }
    let mut circles: Vec<(String, UltrametricDisk)> = Vec::new();
    for g in &pres.generators {
        for (name, m) in [
            (g.label.clone(), g.matrix.clone()),
            (format!("({})^-1", g.label), g.matrix.adjugate()),
        ] {
            match isometric_circle(&m) {
                Ok(c) => circles.push((name, c)),
                Err(Error::FixesInfinity) => {
                    report.first_intersecting_pair = Some((name, "inf".into()));
                    return Ok(report);
                }
                Err(e) => return Err(e),
            }
        }
    }
    for i in 0..circles.len() {
        for j in i + 1..circles.len() {
            let (ni, ci) = &circles[i];
            let (nj, cj) = &circles[j];
            let diff = &ci.center - &cj.center;
            if diff.is_zero() && ci.radius_val == cj.radius_val {
                report.skipped_coincident_pairs += 1;
                continue;
            }
            if let Some(v) = diff.valuation().finite() {
                report.closest_centers_val =
                    Some(report.closest_centers_val.map_or(v, |w| w.max(v)));
            }
            let disjoint = disks_disjoint(ci, cj).map_err(|e| match e {
                Error::InsufficientPrecision(m) => {
                    Error::InsufficientPrecision(format!("{ni} vs {nj}: {m}"))
                }
                e => e,
            })?;
            if !disjoint && report.first_intersecting_pair.is_none() {
                report.first_intersecting_pair = Some((ni.clone(), nj.clone()));
            }
        }
    }
    report.circles_disjoint = report.first_intersecting_pair.is_none();
    report.is_schottky_certified = report.all_hyperbolic && report.circles_disjoint;
    Ok(report)
}

/// JSON form of a presentation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PresentationJson {
    pub field: Field,
    pub case: CaseTag,
    pub d: u64,
    pub e: u64,
    pub lambda: String,
    pub images: Vec<u64>,
    pub expected_rank: usize,
    pub generators: Vec<GeneratorJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorJson {
    pub label: String,
    pub word: String,
    pub origin: String,
    pub matrix: [[String; 2]; 2],
}

impl SchottkyPresentation {
    pub fn to_json(&self) -> PresentationJson {
        let fp = self.free_product();
        PresentationJson {
            field: self.field.clone(),
            case: self.case,
            d: self.d,
            e: self.e,
            lambda: self.lambda.to_text(),
            images: self.assignment.images.clone(),
            expected_rank: self.expected_rank,
            generators: self
                .generators
                .iter()
                .map(|g| GeneratorJson {
                    label: g.label.clone(),
                    word: fp.format(&g.word, Some(&NAMES)),
                    origin: g.origin.clone(),
                    matrix: g.matrix.to_strings(),
                })
                .collect(),
        }
    }

    /// Rebuild from JSON; each stored matrix must agree with its word.
    pub fn from_json(j: &PresentationJson) -> Result<Self> {
        let field = j.field.clone();
        let lambda = field.parse_element(&j.lambda)?;
        let n = j.d.lcm(&j.e);
        let fp = FreeProduct::new(vec![j.d, j.e])?;
        let assignment = CyclicAssignment::new(&fp, n, j.images.clone())?;
        let zeta = field.root_of_unity(n)?;
        let (a, b) = root_exponents(j.case, j.d, j.e);
        let rep = Rep {
            alpha: zeta.pow(a as i64),
            beta: zeta.pow(b as i64),
            lambda: lambda.clone(),
        };
        let mut generators = Vec::new();
        for g in &j.generators {
            let word = fp.parse(&g.word, Some(&NAMES))?;
            let matrix = MoebiusMap::from_strings(&field, &g.matrix)?;
            if !matrix.proj_eq(&rep.word(&word)?) {
                return Err(Error::Parse(format!(
                    "matrix of {} does not match its word",
                    g.label
                )));
            }
            generators.push(Generator {
                label: g.label.clone(),
                word,
                origin: g.origin.clone(),
                matrix,
            });
        }
        let s = rep.s_pow(1);
        Ok(SchottkyPresentation {
            field,
            case: j.case,
            d: j.d,
            e: j.e,
            lambda,
            zeta,
            assignment,
            expected_rank: j.expected_rank,
            generators,
            s,
            t_root: rep.beta,
        })
    }
}
