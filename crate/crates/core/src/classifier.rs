//! Deciding whether a cyclic Kummer cover of P^1 is a Mumford cover.

use std::cmp::Ordering;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::{epsilon, fmt_rational, Rational};
use crate::error::{Error, Result};
use crate::moebius::{apply_map, normalize_triple, ProjectivePoint};
use crate::padic::{make_field, Field, PadicElement, Valuation, DEFAULT_PRECISION};
use crate::tree::{arrange, ser_opt_rational, ser_rational, GeodesicLine, LineArrangement};

/// Valuation threshold (ε_m + ε_n)/(p - 1) of the bound |1 - ζ_p|^{ε_m + ε_n}.
pub fn alpha_bound(p: u64, m: u64, n: u64) -> Valuation {
    Valuation::Finite(threshold(p, m, n))
}

fn threshold(p: u64, m: u64, n: u64) -> Rational {
    Rational::new(epsilon(p, m) + epsilon(p, n), p as i64 - 1)
}

/// The bound written as a power of |p|, e.g. `|2|^2`, `|3|^(1/2)` or `1`.
pub fn bound_text(p: u64, t: Rational) -> String {
    if t == Rational::from_integer(0) {
        "1".to_string()
    } else if t.is_integer() {
        format!("|{p}|^{}", t.to_integer())
    } else {
        format!("|{p}|^({})", fmt_rational(&t))
    }
}

/// y^m = prod (x - P_i)^{a_i}, with infinity listed explicitly when branched.
#[derive(Clone, Debug)]
pub struct KummerEquation {
    field: Field,
    degree: u64,
    terms: Vec<(ProjectivePoint, u64)>,
}

impl KummerEquation {
    pub fn new(field: Field, degree: u64, terms: Vec<(ProjectivePoint, u64)>) -> Result<Self> {
        if degree < 2 {
            return Err(Error::InvalidEquation("degree must be at least 2".into()));
        }
        for (i, (pt, a)) in terms.iter().enumerate() {
            if *a == 0 || *a >= degree {
                return Err(Error::InvalidEquation(format!(
                    "exponent {a} outside 1..{degree}"
                )));
            }
            if pt.field() != &field {
                return Err(Error::FieldMismatch);
            }
            if terms[..i].iter().any(|(q, _)| q.same_point(pt)) {
                return Err(Error::InvalidEquation(format!(
                    "repeated branch point {pt}"
                )));
            }
        }
        let sum: u64 = terms.iter().map(|(_, a)| a).sum();
        if !sum.is_multiple_of(degree) {
            return Err(Error::InvalidEquation(format!(
                "exponent sum {sum} is not divisible by {degree}; list infinity explicitly"
            )));
        }
        Ok(KummerEquation {
            field,
            degree,
            terms,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn terms(&self) -> &[(ProjectivePoint, u64)] {
        &self.terms
    }

    /// Same equation with every branch point moved by `g`.
    pub fn transform(&self, g: &crate::moebius::MoebiusMap) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|(pt, a)| Ok((apply_map(g, pt)?, *a)))
            .collect::<Result<_>>()?;
        KummerEquation::new(self.field.clone(), self.degree, terms)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermInput {
    pub point: String,
    pub exp: u64,
}

/// JSON request shape for classification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KummerInput {
    pub p: u64,
    #[serde(default)]
    pub precision: Option<u32>,
    /// Order of the root of unity adjoined to the working field (default 1).
    #[serde(default)]
    pub m: Option<u64>,
    pub degree: u64,
    pub terms: Vec<TermInput>,
}

impl KummerInput {
    pub fn build(&self) -> Result<KummerEquation> {
        let field = make_field(
            self.p,
            self.m.unwrap_or(1),
            self.precision.unwrap_or(DEFAULT_PRECISION),
        )?;
        let terms = self
            .terms
            .iter()
            .map(|t| Ok((ProjectivePoint::parse(&field, &t.point)?, t.exp)))
            .collect::<Result<_>>()?;
        KummerEquation::new(field, self.degree, terms)
    }
}

/// One pair of branch points with complementary exponents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HMPair {
    pub indices: (usize, usize),
    pub points: [String; 2],
    pub exps: (u64, u64),
    /// Ramification index m / gcd(m, a).
    pub e: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HMDecomposition {
    pub pairs: Vec<HMPair>,
}

impl HMDecomposition {
    pub fn ram_indices(&self) -> Vec<u64> {
        self.pairs.iter().map(|p| p.e).collect()
    }
}

/// All perfect matchings with exponent sums divisible by m, in lexicographic order.
pub fn hm_decompose(eq: &KummerEquation) -> Result<Vec<HMDecomposition>> {
    let n = eq.terms.len();
    if n % 2 == 1 {
        return Err(Error::OddTermCount);
    }
    let m = eq.degree;
    let mut out = Vec::new();
    let mut used = vec![false; n];
    let mut current = Vec::new();
    fn rec(
        eq: &KummerEquation,
        m: u64,
        used: &mut Vec<bool>,
        current: &mut Vec<(usize, usize)>,
        out: &mut Vec<HMDecomposition>,
    ) {
        let Some(i) = used.iter().position(|u| !u) else {
            let pairs = current
                .iter()
                .map(|&(i, j)| {
                    let (a, b) = (eq.terms[i].1, eq.terms[j].1);
                    HMPair {
                        indices: (i, j),
                        points: [eq.terms[i].0.to_text(), eq.terms[j].0.to_text()],
                        exps: (a, b),
                        e: m / m.gcd(&a),
                    }
                })
                .collect();
            out.push(HMDecomposition { pairs });
            return;
        };
        used[i] = true;
        for j in i + 1..used.len() {
            if !used[j] && (eq.terms[i].1 + eq.terms[j].1).is_multiple_of(m) {
                used[j] = true;
                current.push((i, j));
                rec(eq, m, used, current, out);
                current.pop();
                used[j] = false;
            }
        }
        used[i] = false;
    }
    rec(eq, m, &mut used, &mut current, &mut out);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    NotHMType,
    PairsNotSeparated,
    BoundViolated,
    BoundaryEquality,
}

impl FailureReason {
    /// Lower is closer to passing.
    fn severity(self) -> u8 {
        match self {
            FailureReason::BoundaryEquality => 0,
            FailureReason::BoundViolated => 1,
            FailureReason::PairsNotSeparated => 2,
            FailureReason::NotHMType => 3,
        }
    }
}

/// Outcome for one pair of clusters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairCheck {
    pub clusters: (usize, usize),
    pub arrangement: Option<LineArrangement>,
    /// Tree distance between the cluster geodesics (0 when they cross at a vertex).
    #[serde(serialize_with = "ser_opt_rational")]
    pub distance: Option<Rational>,
    #[serde(serialize_with = "ser_rational")]
    pub required: Rational,
    pub failure: Option<FailureReason>,
}

impl PairCheck {
    fn new(
        clusters: (usize, usize),
        arrangement: Option<LineArrangement>,
        distance: Option<Rational>,
        required: Rational,
    ) -> Self {
        let failure = match distance {
            None => Some(FailureReason::PairsNotSeparated),
            Some(d) => match d.cmp(&required) {
                Ordering::Greater => None,
                Ordering::Equal => Some(FailureReason::BoundaryEquality),
                Ordering::Less => Some(FailureReason::BoundViolated),
            },
        };
        PairCheck {
            clusters,
            arrangement,
            distance,
            required,
            failure,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MumfordVerdict {
    pub is_mumford: bool,
    /// The passing decomposition, or the one closest to passing.
    pub decomposition: Option<HMDecomposition>,
    pub pair_checks: Vec<PairCheck>,
    pub failure: Option<FailureReason>,
}

impl MumfordVerdict {
    fn not_hm() -> Self {
        MumfordVerdict {
            is_mumford: false,
            decomposition: None,
            pair_checks: vec![],
            failure: Some(FailureReason::NotHMType),
        }
    }

    pub fn witness(&self) -> Option<&HMDecomposition> {
        if self.is_mumford {
            self.decomposition.as_ref()
        } else {
            None
        }
    }
}

fn worst(checks: &[PairCheck]) -> Option<FailureReason> {
    checks
        .iter()
        .filter_map(|c| c.failure)
        .max_by_key(|f| f.severity())
}

/// Try every decomposition; report the first passing one, else the one whose
/// worst failure is mildest.
fn decide<F>(eq: &KummerEquation, mut check: F) -> Result<MumfordVerdict>
where
    F: FnMut(&HMDecomposition) -> Result<Vec<PairCheck>>,
{
    let decs = match hm_decompose(eq) {
        Ok(d) => d,
        Err(Error::OddTermCount) => return Ok(MumfordVerdict::not_hm()),
        Err(e) => return Err(e),
    };
    let mut best: Option<MumfordVerdict> = None;
    for dec in decs {
        let checks = check(&dec)?;
        let failure = worst(&checks);
        let verdict = MumfordVerdict {
            is_mumford: failure.is_none(),
            decomposition: Some(dec),
            pair_checks: checks,
            failure,
        };
        if verdict.is_mumford {
            return Ok(verdict);
        }
        let better = best
            .as_ref()
            .is_none_or(|b| failure.unwrap().severity() < b.failure.unwrap().severity());
        if better {
            best = Some(verdict);
        }
    }
    Ok(best.unwrap_or_else(MumfordVerdict::not_hm))
}

fn point(eq: &KummerEquation, i: usize) -> &ProjectivePoint {
    &eq.terms[i].0
}

/// Four branch points: move one pair to (0, ∞) and the other to (1, λ), then
/// require |λ| = 1 and v(λ - 1) above the threshold.
pub fn classify_four_point(eq: &KummerEquation) -> Result<MumfordVerdict> {
    if eq.terms.len() != 4 {
        return Err(Error::InvalidEquation(format!(
            "expected 4 branch points, got {}",
            eq.terms.len()
        )));
    }
    let p = eq.field.p();
    decide(eq, |dec| {
        let (a, b) = dec.pairs[0].indices;
        let (c, d) = dec.pairs[1].indices;
        let g = normalize_triple(point(eq, a), point(eq, b), point(eq, c))?;
        let lam = apply_map(&g, point(eq, d))?
            .affine_value()
            .ok_or(Error::CoincidentPoints)?;
        let required = threshold(p, dec.pairs[0].e, dec.pairs[1].e);
        let vl = lam.valuation().finite().ok_or(Error::CoincidentPoints)?;
        let check = if vl != Rational::from_integer(0) {
            let len = if vl > Rational::from_integer(0) {
                vl
            } else {
                -vl
            };
            PairCheck::new(
                (0, 1),
                Some(LineArrangement::OverlapSegment { length: len }),
                None,
                required,
            )
        } else {
            let lm1 = &lam - &eq.field.one();
            let dist = lm1.valuation().finite().ok_or(Error::CoincidentPoints)?;
            let arr = if dist == Rational::from_integer(0) {
                LineArrangement::CrossAtVertex
            } else {
                LineArrangement::Disjoint { distance: dist }
            };
            PairCheck::new((0, 1), Some(arr), Some(dist), required)
        };
        Ok(vec![check])
    })
}

/// General criterion: cluster geodesics pairwise disjoint with distance above
/// (ε_{e_i} + ε_{e_j})/(p - 1) for every pair of clusters.
pub fn classify(eq: &KummerEquation) -> Result<MumfordVerdict> {
    let p = eq.field.p();
    decide(eq, |dec| {
        let lines = dec
            .pairs
            .iter()
            .map(|pr| {
                GeodesicLine::new(
                    point(eq, pr.indices.0).clone(),
                    point(eq, pr.indices.1).clone(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let mut checks = Vec::new();
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                let required = threshold(p, dec.pairs[i].e, dec.pairs[j].e);
                let check = match arrange(&lines[i], &lines[j]) {
                    Ok(arr @ LineArrangement::Disjoint { distance }) => {
                        PairCheck::new((i, j), Some(arr), Some(distance), required)
                    }
                    Ok(arr @ LineArrangement::CrossAtVertex) => {
                        PairCheck::new((i, j), Some(arr), Some(Rational::from_integer(0)), required)
                    }
                    Ok(arr) => PairCheck::new((i, j), Some(arr), None, required),
                    Err(Error::SharedEnd) => PairCheck::new((i, j), None, None, required),
                    Err(e) => return Err(e),
                };
                checks.push(check);
            }
        }
        Ok(checks)
    })
}

/// j-invariant of the Legendre curve and the two sides of the Tate criterion.
#[derive(Debug, Clone)]
pub struct TateCheck {
    pub j: PadicElement,
    /// |λ - 1| < |2|^2
    pub lambda_close: bool,
    /// |j| > |2|^4
    pub j_large: bool,
    pub consistent: bool,
}

pub fn tate_j_check(lambda: &PadicElement) -> Result<TateCheck> {
    let field = lambda.field();
    if field.p() != 2 {
        return Err(Error::InvalidField(
            "the j-invariant test is stated for p = 2".into(),
        ));
    }
    let one = field.one();
    let lm1 = lambda - &one;
    if lambda.is_zero()
        || lm1.is_zero()
        || lambda.valuation() != Valuation::Finite(Rational::from_integer(0))
    {
        return Err(Error::InvalidEquation(
            "λ must be a unit different from 1".into(),
        ));
    }
    let num = field.int(256) * (lambda * lambda - lambda.clone() + one).pow(3);
    let den = lambda * lambda * (&lm1 * &lm1);
    let j = num.div(&den)?;
    let lambda_close = lm1.valuation() > Valuation::Finite(Rational::from_integer(2));
    let j_large = j.valuation() < Valuation::Finite(Rational::from_integer(4));
    Ok(TateCheck {
        j,
        lambda_close,
        j_large,
        consistent: lambda_close == j_large,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::MoebiusMap;
    use proptest::prelude::*;

    fn eq_from(p: u64, degree: u64, terms: &[(&str, u64)]) -> KummerEquation {
        KummerInput {
            p,
            precision: Some(64),
            m: None,
            degree,
            terms: terms
                .iter()
                .map(|(pt, e)| TermInput {
                    point: pt.to_string(),
                    exp: *e,
                })
                .collect(),
        }
        .build()
        .unwrap()
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(
            alpha_bound(2, 2, 2),
            Valuation::Finite(Rational::from_integer(2))
        );
        assert_eq!(
            alpha_bound(5, 2, 3),
            Valuation::Finite(Rational::from_integer(0))
        );
        assert_eq!(alpha_bound(3, 6, 2), Valuation::Finite(Rational::new(1, 2)));
        assert_eq!(bound_text(2, Rational::from_integer(2)), "|2|^2");
        for p in [2, 3, 5, 7] {
            for m in 1..13 {
                for n in 1..13 {
                    assert_eq!(alpha_bound(p, m, n), alpha_bound(p, n, m));
                }
            }
        }
    }

    #[test]
    fn decomposition_examples() {
        let e = eq_from(5, 2, &[("0", 1), ("1", 1), ("7", 1), ("11", 1)]);
        assert_eq!(hm_decompose(&e).unwrap().len(), 3);
        let e = eq_from(5, 3, &[("0", 1), ("1", 2), ("7", 1), ("11", 2)]);
        let decs = hm_decompose(&e).unwrap();
        assert_eq!(decs.len(), 2);
        for d in &decs {
            for pr in &d.pairs {
                assert_eq!((pr.exps.0 + pr.exps.1) % 3, 0);
                assert_eq!(pr.e, 3);
            }
        }
        let e = eq_from(5, 3, &[("0", 1), ("1", 1), ("7", 1)]);
        assert_eq!(hm_decompose(&e).unwrap_err(), Error::OddTermCount);
        assert_eq!(
            classify(&e).unwrap().failure,
            Some(FailureReason::NotHMType)
        );
        let e = eq_from(5, 4, &[("0", 1), ("1", 1), ("7", 1), ("11", 1)]);
        assert!(hm_decompose(&e).unwrap().is_empty());
        assert_eq!(
            classify(&e).unwrap().failure,
            Some(FailureReason::NotHMType)
        );
    }

    #[test]
    fn invalid_equations() {
        let f = make_field(3, 1, 16).unwrap();
        let pt = |x: i64| ProjectivePoint::affine(f.int(x));
        assert!(matches!(
            KummerEquation::new(f.clone(), 2, vec![(pt(0), 1), (pt(1), 2)]),
            Err(Error::InvalidEquation(_))
        ));
        assert!(matches!(
            KummerEquation::new(f.clone(), 2, vec![(pt(0), 1), (pt(0), 1)]),
            Err(Error::InvalidEquation(_))
        ));
        assert!(matches!(
            KummerEquation::new(f.clone(), 3, vec![(pt(0), 1), (pt(1), 1)]),
            Err(Error::InvalidEquation(_))
        ));
    }

    #[test]
    fn four_point_examples() {
        let v = classify_four_point(&eq_from(2, 2, &[("0", 1), ("inf", 1), ("1", 1), ("9", 1)]))
            .unwrap();
        assert!(v.is_mumford);
        assert_eq!(v.pair_checks[0].distance, Some(Rational::from_integer(3)));
        let v = classify_four_point(&eq_from(2, 2, &[("0", 1), ("inf", 1), ("1", 1), ("5", 1)]))
            .unwrap();
        assert!(!v.is_mumford);
        assert_eq!(v.failure, Some(FailureReason::BoundaryEquality));
        // threshold 0 and |λ - 1| < 1
        let v = classify_four_point(&eq_from(5, 2, &[("0", 1), ("inf", 1), ("1", 1), ("6", 1)]))
            .unwrap();
        assert!(v.is_mumford);
        // |λ - 1| = 1 sits exactly on the bound α = 1
        let v = classify_four_point(&eq_from(5, 2, &[("0", 1), ("inf", 1), ("1", 1), ("3", 1)]))
            .unwrap();
        assert_eq!(v.failure, Some(FailureReason::BoundaryEquality));
    }

    #[test]
    fn six_point_example() {
        // Clusters {0, ∞}, {1, 9}, {λ, 9λ} with v(λ) = -10.
        let lam = "1/1024";
        let lam9 = "9/1024";
        let v = classify(&eq_from(
            2,
            2,
            &[
                ("0", 1),
                ("inf", 1),
                ("1", 1),
                ("9", 1),
                (lam, 1),
                (lam9, 1),
            ],
        ))
        .unwrap();
        assert!(v.is_mumford, "{v:?}");
        for c in &v.pair_checks {
            assert!(c.distance.unwrap() >= Rational::from_integer(3));
        }
    }

    #[test]
    fn tate_examples() {
        let f = make_field(2, 1, 64).unwrap();
        let t = tate_j_check(&f.int(9)).unwrap();
        assert_eq!(
            t.j.valuation(),
            Valuation::Finite(Rational::from_integer(2))
        );
        assert!(t.lambda_close && t.j_large && t.consistent);
        let t = tate_j_check(&f.int(5)).unwrap();
        assert_eq!(
            t.j.valuation(),
            Valuation::Finite(Rational::from_integer(4))
        );
        assert!(!t.lambda_close && !t.j_large && t.consistent);
        let t = tate_j_check(&f.int(-1)).unwrap();
        assert_eq!(
            t.j.valuation(),
            Valuation::Finite(Rational::from_integer(6))
        );
        assert!(t.consistent);
        assert!(tate_j_check(&f.int(2)).is_err());
    }

    #[test]
    fn four_point_agrees_with_general_criterion_on_grid() {
        for p in [2u64, 3, 5] {
            for m in [2u64, 3, 4, 6] {
                for k in 1..=6u32 {
                    let lam = (1 + p.pow(k)).to_string();
                    for a in 1..m {
                        let terms = [("0", a), ("inf", m - a), ("1", 1), (lam.as_str(), m - 1)];
                        let e = eq_from(p, m, &terms);
                        assert_eq!(
                            classify(&e).unwrap(),
                            classify_four_point(&e).unwrap(),
                            "p={p} m={m} k={k} a={a}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn strict_threshold_in_ramified_fields() {
        // λ = 1 + (ζ_p - 1)^k has v(λ - 1) = k/(p - 1).
        for p in [2u64, 3, 5] {
            for (m, n) in [(p, p), (p, 2 * p + 1), (2 * p, 3)] {
                let t = threshold(p, m, n);
                let degree = m.lcm(&n);
                let f = make_field(p, p, 48).unwrap();
                let pi = f.root_of_unity(p).unwrap() - f.one();
                let kt = (t * (p as i64 - 1)).to_integer();
                for (k, expect) in [(kt, false), (kt + 1, true)] {
                    if k == 0 {
                        continue;
                    }
                    let lam = f.one() + pi.pow(k);
                    let pt = |x: PadicElement| ProjectivePoint::affine(x);
                    let terms = vec![
                        (pt(f.zero()), degree / m),
                        (ProjectivePoint::infinity(&f), degree - degree / m),
                        (pt(f.one()), degree / n),
                        (pt(lam), degree - degree / n),
                    ];
                    let e = KummerEquation::new(f.clone(), degree, terms).unwrap();
                    let v = classify_four_point(&e).unwrap();
                    assert_eq!(v.is_mumford, expect, "p={p} m={m} n={n} k={k}");
                    assert_eq!(classify(&e).unwrap().is_mumford, expect);
                    if !expect {
                        assert_eq!(v.failure, Some(FailureReason::BoundaryEquality));
                    }
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn verdict_is_moebius_invariant(p in prop::sample::select(vec![2u64, 3, 5]), k in 1u32..6, shift in -20i64..20, g in prop::collection::vec(-15i64..15, 4), six in any::<bool>()) {
            prop_assume!(g[0] * g[3] - g[1] * g[2] != 0);
            let lam = (1 + (p as i64).pow(k)).to_string();
            // v(far) = -6, so the extra pair never collides with 0, 1, λ.
            let num = 1 + (p as i64) * shift.abs() * 7;
            let far = format!("{}/{}", num, (p as i64).pow(6));
            let far2 = format!("{}/{}", num + (p as i64).pow(4), (p as i64).pow(6));
            let mut terms = vec![("0", 1u64), ("inf", 1), ("1", 1), (lam.as_str(), 1)];
            if six {
                terms.push((far.as_str(), 1));
                terms.push((far2.as_str(), 1));
            }
            let e = eq_from(p, 2, &terms);
            let h = MoebiusMap::new(e.field().int(g[0]), e.field().int(g[1]), e.field().int(g[2]), e.field().int(g[3])).unwrap();
            let moved = e.transform(&h).unwrap();
            prop_assert_eq!(classify(&e).unwrap().is_mumford, classify(&moved).unwrap().is_mumford);
        }
    }
}
