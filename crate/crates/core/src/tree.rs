//! Geodesics of the Bruhat-Tits tree through cross-ratios, and the quotient
//! segment for a free product of two cyclic groups.

use serde::Serialize;

use crate::arith::{epsilon, fmt_rational, is_prime, Rational};
use crate::error::{Error, Result};
use crate::moebius::{fixed_points, MoebiusMap, ProjectivePoint};
use crate::padic::PadicElement;

/// R(a,b;c,d) = (a1c0-a0c1)(b1d0-b0d1) / ((a0b1-a1b0)(c0d1-c1d0)).
pub fn cross_ratio(
    a: &ProjectivePoint,
    b: &ProjectivePoint,
    c: &ProjectivePoint,
    d: &ProjectivePoint,
) -> Result<PadicElement> {
    let (a0, a1) = a.coords();
    let (b0, b1) = b.coords();
    let (c0, c1) = c.coords();
    let (d0, d1) = d.coords();
    let num = (a1 * c0 - a0 * c1) * (b1 * d0 - b0 * d1);
    let den = (a0 * b1 - a1 * b0) * (c0 * d1 - c1 * d0);
    if den.is_zero() {
        return Err(Error::DegenerateTuple);
    }
    num.div(&den)
}

/// Bi-infinite geodesic joining two distinct ends.
#[derive(Clone, Debug)]
pub struct GeodesicLine {
    pub end_a: ProjectivePoint,
    pub end_b: ProjectivePoint,
}

impl GeodesicLine {
    pub fn new(end_a: ProjectivePoint, end_b: ProjectivePoint) -> Result<Self> {
        if end_a.same_point(&end_b) {
            return Err(Error::CoincidentPoints);
        }
        Ok(GeodesicLine { end_a, end_b })
    }
}

/// How two geodesics sit relative to each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LineArrangement {
    CrossAtVertex,
    Disjoint {
        #[serde(serialize_with = "ser_rational")]
        distance: Rational,
    },
    OverlapSegment {
        #[serde(serialize_with = "ser_rational")]
        length: Rational,
    },
}

pub(crate) fn ser_opt_rational<S: serde::Serializer>(
    r: &Option<Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&fmt_rational(r)),
        None => s.serialize_none(),
    }
}

pub(crate) fn ser_rational<S: serde::Serializer>(
    r: &Rational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rational(r))
}

fn abs_val(x: &PadicElement) -> Result<Rational> {
    let v = x.valuation().finite().ok_or_else(|| {
        Error::InsufficientPrecision("cross-ratio is zero to working precision".into())
    })?;
    Ok(if v < Rational::from_integer(0) { -v } else { v })
}

/// Trichotomy for two geodesics with four distinct ends, decided by the
/// valuations of R(a,b;c,d) and R(b,a;c,d).
pub fn arrange(l1: &GeodesicLine, l2: &GeodesicLine) -> Result<LineArrangement> {
    let (a, b) = (&l1.end_a, &l1.end_b);
    let (c, d) = (&l2.end_a, &l2.end_b);
    for x in [a, b] {
        for y in [c, d] {
            if x.same_point(y) {
                return Err(Error::SharedEnd);
            }
        }
    }
    let x = abs_val(&cross_ratio(a, b, c, d)?)?;
    let y = abs_val(&cross_ratio(b, a, c, d)?)?;
    let zero = Rational::from_integer(0);
    Ok(if x == zero && y == zero {
        LineArrangement::CrossAtVertex
    } else if x == y {
        LineArrangement::Disjoint { distance: x }
    } else {
        LineArrangement::OverlapSegment { length: x.max(y) }
    })
}

/// Geodesic between the fixed points of a map of the declared finite order.
pub fn mirror(g: &MoebiusMap, order: u32) -> Result<GeodesicLine> {
    if order < 2 || !g.pow(i64::from(order)).is_identity() || g.is_identity() {
        return Err(Error::NotFiniteOrder(order));
    }
    let (x, y) = fixed_points(g)?;
    GeodesicLine::new(x, y)
}

/// One entry along the quotient segment x - v - w - y.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SegmentVertex {
    pub name: String,
    pub stabilizer_order: u64,
    pub label: String,
}

/// Quotient tree of C_m * C_n: a segment with mirror ends x, y and the
/// vertices v, w where the stabilizers drop to C_p and then vanish.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientTreeDescriptor {
    pub p: u64,
    pub m: u64,
    pub n: u64,
    #[serde(serialize_with = "ser_rational")]
    pub dist_x_v: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub dist_v_w: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub dist_w_y: Rational,
    /// Both ends at x carry C_m, both at y carry C_n.
    pub end_labels: [(String, u64); 4],
    pub segment: Vec<SegmentVertex>,
    /// Lengths of the C_{p^r}-stabilized pieces inside [x, v] and [w, y] are
    /// not determined; only the totals are.
    pub unresolved: Vec<String>,
}

fn p_part(p: u64, mut k: u64) -> u64 {
    let mut out = 1;
    while k.is_multiple_of(p) {
        k /= p;
        out *= p;
    }
    out
}

pub fn quotient_tree(
    p: u64,
    m: u64,
    n: u64,
    lambda_val: Rational,
) -> Result<QuotientTreeDescriptor> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if m < 2 || n < 2 {
        return Err(Error::InvalidCoverSpec("orders must be at least 2".into()));
    }
    let unit = Rational::new(1, p as i64 - 1);
    let dist_x_v = unit * epsilon(p, m);
    let dist_w_y = unit * epsilon(p, n);
    let dist_v_w = lambda_val - dist_x_v - dist_w_y;
    if dist_v_w <= Rational::from_integer(0) {
        return Err(Error::BoundViolated(format!(
            "v(λ-1) = {} does not exceed {}",
            fmt_rational(&lambda_val),
            fmt_rational(&(dist_x_v + dist_w_y))
        )));
    }
    let vertex = |name: &str, order: u64| SegmentVertex {
        name: name.to_string(),
        stabilizer_order: order,
        label: if order == 1 {
            "trivial".to_string()
        } else {
            format!("C_{order}")
        },
    };
    let mut segment = vec![vertex("x", m)];
    let mut unresolved = Vec::new();
    if m.is_multiple_of(p) {
        segment.push(vertex("x_p", p_part(p, m)));
        segment.push(vertex("v", p));
        unresolved.push(format!(
            "subdivision of [x, v] (total {})",
            fmt_rational(&dist_x_v)
        ));
    } else {
        segment.push(vertex("v", 1));
    }
    segment.push(vertex("interior", 1));
    if n.is_multiple_of(p) {
        segment.push(vertex("w", p));
        segment.push(vertex("y_p", p_part(p, n)));
        unresolved.push(format!(
            "subdivision of [w, y] (total {})",
            fmt_rational(&dist_w_y)
        ));
    } else {
        segment.push(vertex("w", 1));
    }
    segment.push(vertex("y", n));
    let end = |s: &str, k: u64| (s.to_string(), k);
    Ok(QuotientTreeDescriptor {
        p,
        m,
        n,
        dist_x_v,
        dist_v_w,
        dist_w_y,
        end_labels: [end("x", m), end("x", m), end("y", n), end("y", n)],
        segment,
        unresolved,
    })
}

impl QuotientTreeDescriptor {
    pub fn total_length(&self) -> Rational {
        self.dist_x_v + self.dist_v_w + self.dist_w_y
    }

    /// Graphviz rendering: ends, the four marked vertices and edge lengths.
    pub fn to_dot(&self) -> String {
        let stab = |name: &str| {
            self.segment
                .iter()
                .find(|v| v.name == name)
                .map(|v| v.label.clone())
                .unwrap_or_default()
        };
        let mut out = String::new();
        out.push_str(&format!(
            "graph quotient_tree_p{}_m{}_n{} {{\n",
            self.p, self.m, self.n
        ));
        out.push_str("  node [shape=circle];\n");
        for name in ["x", "v", "w", "y"] {
            out.push_str(&format!("  {name} [label=\"{name}\\n{}\"];\n", stab(name)));
        }
        for (i, (at, k)) in self.end_labels.iter().enumerate() {
            out.push_str(&format!(
                "  end{i} [shape=plaintext, label=\"C_{k}\"];\n  {at} -- end{i} [style=dotted];\n"
            ));
        }
        let edge = |a: &str, b: &str, len: &Rational, style: &str| {
            format!("  {a} -- {b} [label=\"{}\"{style}];\n", fmt_rational(len))
        };
        out.push_str(&edge("x", "v", &self.dist_x_v, ", style=dashed"));
        out.push_str(&edge("v", "w", &self.dist_v_w, ""));
        out.push_str(&edge("w", "y", &self.dist_w_y, ", style=dashed"));
        out.push_str("}\n");
        out
    }
}
