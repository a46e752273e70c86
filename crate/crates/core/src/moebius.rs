//! Projective 2x2 matrices over K and the ultrametric disks they define.

use std::cmp::Ordering;
use std::fmt;

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::padic::{cmp_val, Field, PadicElement, Valuation};

/// Point of P^1(K) in homogeneous coordinates `(x0 : x1)`; affine points are
/// `(z : 1)` and infinity is `(1 : 0)`.
#[derive(Clone, Debug)]
pub struct ProjectivePoint {
    x0: PadicElement,
    x1: PadicElement,
}

impl ProjectivePoint {
    /// Normalize so that the coordinate of smaller valuation becomes 1.
    pub fn new(x0: PadicElement, x1: PadicElement) -> Result<Self> {
        match (x0.val_pi(), x1.val_pi()) {
            (None, None) => Err(Error::DegenerateTuple),
            (_, Some(v1)) if x0.val_pi().is_none_or(|v0| v1 <= v0) => {
                let one = x1.field().one();
                Ok(ProjectivePoint {
                    x0: x0.div(&x1)?,
                    x1: one,
                })
            }
            _ => {
                let one = x0.field().one();
                Ok(ProjectivePoint {
                    x1: x1.div(&x0)?,
                    x0: one,
                })
            }
        }
    }

    pub fn affine(z: PadicElement) -> Self {
        let one = z.field().one();
        ProjectivePoint { x0: z, x1: one }
    }

    pub fn infinity(field: &Field) -> Self {
        ProjectivePoint {
            x0: field.one(),
            x1: field.zero(),
        }
    }

    /// Parse `inf`, the rational shorthand, or the element text form.
    pub fn parse(field: &Field, s: &str) -> Result<Self> {
        let t = s.trim();
        if t == "inf" || t == "∞" {
            Ok(Self::infinity(field))
        } else {
            Ok(Self::affine(field.parse_element(t)?))
        }
    }

    pub fn coords(&self) -> (&PadicElement, &PadicElement) {
        (&self.x0, &self.x1)
    }

    pub fn field(&self) -> &Field {
        self.x0.field()
    }

    pub fn is_infinity(&self) -> bool {
        self.x1.is_zero()
    }

    /// Affine coordinate, or `None` at infinity.
    pub fn affine_value(&self) -> Option<PadicElement> {
        if self.is_infinity() {
            None
        } else {
            Some(self.x0.div(&self.x1).expect("x1 is nonzero"))
        }
    }

    /// Certified equality in P^1.
    pub fn same_point(&self, other: &Self) -> bool {
        (&self.x0 * &other.x1 - &self.x1 * &other.x0).is_zero()
    }

    pub fn to_text(&self) -> String {
        match self.affine_value() {
            None => "inf".to_string(),
            Some(z) => z.to_text(),
        }
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Invertible 2x2 matrix up to scalars.
#[derive(Clone, Debug)]
pub struct MoebiusMap {
    pub a: PadicElement,
    pub b: PadicElement,
    pub c: PadicElement,
    pub d: PadicElement,
    det: PadicElement,
}

impl MoebiusMap {
    pub fn new(a: PadicElement, b: PadicElement, c: PadicElement, d: PadicElement) -> Result<Self> {
        let det = &a * &d - &b * &c;
        Self::with_det(a, b, c, d, det)
    }

    fn with_det(
        a: PadicElement,
        b: PadicElement,
        c: PadicElement,
        d: PadicElement,
        det: PadicElement,
    ) -> Result<Self> {
        if det.is_zero() {
            return Err(Error::DivisionByZeroToPrecision);
        }
        Ok(MoebiusMap { a, b, c, d, det })
    }

    pub fn identity(field: &Field) -> Self {
        Self::diag(field.one(), field.one())
    }

    pub fn diag(x: PadicElement, y: PadicElement) -> Self {
        let zero = x.field().zero();
        let det = &x * &y;
        MoebiusMap {
            a: x,
            b: zero.clone(),
            c: zero,
            d: y,
            det,
        }
    }

    pub fn field(&self) -> &Field {
        self.a.field()
    }

    pub fn det(&self) -> &PadicElement {
        &self.det
    }

    pub fn trace(&self) -> PadicElement {
        &self.a + &self.d
    }

    /// Matrix product `self * other`; the determinant is multiplied rather
    /// than recomputed so that cancellation cannot erode it.
    pub fn compose(&self, other: &Self) -> Self {
        MoebiusMap {
            a: &self.a * &other.a + &self.b * &other.c,
            b: &self.a * &other.b + &self.b * &other.d,
            c: &self.c * &other.a + &self.d * &other.c,
            d: &self.c * &other.b + &self.d * &other.d,
            det: &self.det * &other.det,
        }
    }

    /// The adjugate, which represents the inverse projectively.
    pub fn adjugate(&self) -> Self {
        MoebiusMap {
            a: self.d.clone(),
            b: -&self.b,
            c: -&self.c,
            d: self.a.clone(),
            det: self.det.clone(),
        }
    }

    /// Multiply every entry by `k`.
    pub fn scale(&self, k: &PadicElement) -> Self {
        MoebiusMap {
            a: &self.a * k,
            b: &self.b * k,
            c: &self.c * k,
            d: &self.d * k,
            det: &self.det * &(k * k),
        }
    }

    /// Integer power; negative exponents use the adjugate.
    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.adjugate() } else { self.clone() };
        let mut n = n.unsigned_abs();
        let mut result = Self::identity(self.field());
        let mut sq = base;
        while n > 0 {
            if n & 1 == 1 {
                result = result.compose(&sq);
            }
            n >>= 1;
            if n > 0 {
                sq = sq.compose(&sq);
            }
        }
        result
    }

    /// Equality in PGL_2: all 2x2 minors of the stacked entry vectors vanish.
    pub fn proj_eq(&self, other: &Self) -> bool {
        let x = [&self.a, &self.b, &self.c, &self.d];
        let y = [&other.a, &other.b, &other.c, &other.d];
        (0..4).all(|i| (i + 1..4).all(|j| (x[i] * y[j] - x[j] * y[i]).is_zero()))
    }

    pub fn is_identity(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && (&self.a - &self.d).is_zero()
    }

    /// Entries as element strings, row-major.
    pub fn to_strings(&self) -> [[String; 2]; 2] {
        [
            [self.a.to_text(), self.b.to_text()],
            [self.c.to_text(), self.d.to_text()],
        ]
    }

    pub fn from_strings(field: &Field, m: &[[String; 2]; 2]) -> Result<Self> {
        let e = |s: &String| field.parse_element(s);
        Self::new(e(&m[0][0])?, e(&m[0][1])?, e(&m[1][0])?, e(&m[1][1])?)
    }
}

impl PartialEq for MoebiusMap {
    fn eq(&self, other: &Self) -> bool {
        self.proj_eq(other)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MapClass {
    Hyperbolic,
    NonHyperbolic,
}

/// Hyperbolic iff 2 v(trace) < v(det).
pub fn classify_map(g: &MoebiusMap) -> Result<MapClass> {
    let vdet = g
        .det()
        .valuation()
        .finite()
        .ok_or(Error::DivisionByZeroToPrecision)?;
    let half = vdet / 2;
    match cmp_val(&g.trace(), half) {
        Ok(Ordering::Less) => Ok(MapClass::Hyperbolic),
        Ok(_) => Ok(MapClass::NonHyperbolic),
        Err(_) => Err(Error::InsufficientPrecision(
            "trace is zero to a precision below v(det)/2".into(),
        )),
    }
}

/// Fixed points of a non-identity map, ordered by increasing valuation with
/// infinity first. A parabolic map yields the same point twice.
pub fn fixed_points(g: &MoebiusMap) -> Result<(ProjectivePoint, ProjectivePoint)> {
    if g.is_identity() {
        return Err(Error::IdentityMap);
    }
    let field = g.field();
    let amd = &g.a - &g.d;
    if g.c.is_zero() {
        let inf = ProjectivePoint::infinity(field);
        if amd.is_zero() {
            return Ok((inf.clone(), inf));
        }
        let z = (-&g.b).div(&amd)?;
        return Ok((inf, ProjectivePoint::affine(z)));
    }
    let tr = g.trace();
    let disc = &tr * &tr - &field.int(4) * g.det();
    let two_c = &field.int(2) * &g.c;
    if disc.is_zero() {
        let z = amd.div(&two_c)?;
        return Ok((
            ProjectivePoint::affine(z.clone()),
            ProjectivePoint::affine(z),
        ));
    }
    let root = disc.sqrt()?.ok_or(Error::ExtensionRequired)?;
    let z1 = (&amd + &root).div(&two_c)?;
    let z2 = (&amd - &root).div(&two_c)?;
    let (z1, z2) = if z2.valuation() < z1.valuation() {
        (z2, z1)
    } else {
        (z1, z2)
    };
    Ok((ProjectivePoint::affine(z1), ProjectivePoint::affine(z2)))
}

/// Open disk `{x : v(x - center) > radius_val}`.
#[derive(Clone, Debug)]
pub struct UltrametricDisk {
    pub center: PadicElement,
    pub radius_val: Rational,
}

impl UltrametricDisk {
    pub fn contains(&self, x: &PadicElement) -> Result<bool> {
        Ok(cmp_val(&(x - &self.center), self.radius_val)? == Ordering::Greater)
    }
}

/// Isometric circle: center -d/c and radius |det|^{1/2} / |c|, i.e.
/// radius_val = v(det)/2 - v(c). Invariant under rescaling the matrix.
pub fn isometric_circle(g: &MoebiusMap) -> Result<UltrametricDisk> {
    if g.c.is_zero() {
        return Err(Error::FixesInfinity);
    }
    let center = (-&g.d).div(&g.c)?;
    let vdet = g
        .det()
        .valuation()
        .finite()
        .ok_or(Error::DivisionByZeroToPrecision)?;
    let vc = g.c.valuation().finite().unwrap();
    Ok(UltrametricDisk {
        center,
        radius_val: vdet / 2 - vc,
    })
}

/// Two open disks are disjoint iff |c1 - c2| >= max of the radii.
pub fn disks_disjoint(d1: &UltrametricDisk, d2: &UltrametricDisk) -> Result<bool> {
    let bound = d1.radius_val.min(d2.radius_val);
    Ok(cmp_val(&(&d1.center - &d2.center), bound)? != Ordering::Greater)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiskRelation {
    Disjoint,
    Equal,
    FirstInsideSecond,
    SecondInsideFirst,
}

/// Balls in an ultrametric space are nested or disjoint.
pub fn disk_relation(d1: &UltrametricDisk, d2: &UltrametricDisk) -> Result<DiskRelation> {
    if disks_disjoint(d1, d2)? {
        return Ok(DiskRelation::Disjoint);
    }
    Ok(match d1.radius_val.cmp(&d2.radius_val) {
        Ordering::Equal => DiskRelation::Equal,
        Ordering::Greater => DiskRelation::FirstInsideSecond,
        Ordering::Less => DiskRelation::SecondInsideFirst,
    })
}

pub fn apply_map(g: &MoebiusMap, x: &ProjectivePoint) -> Result<ProjectivePoint> {
    let (x0, x1) = x.coords();
    ProjectivePoint::new(&g.a * x0 + &g.b * x1, &g.c * x0 + &g.d * x1)
}

/// `P.x1 * X0 - P.x0 * X1`, a linear form vanishing exactly at P.
fn vanishing_form(p: &ProjectivePoint, x: &ProjectivePoint) -> PadicElement {
    let (p0, p1) = p.coords();
    let (x0, x1) = x.coords();
    p1 * x0 - p0 * x1
}

/// The unique map sending p1 -> 0, p2 -> inf, p3 -> 1.
pub fn normalize_triple(
    p1: &ProjectivePoint,
    p2: &ProjectivePoint,
    p3: &ProjectivePoint,
) -> Result<MoebiusMap> {
    let alpha = vanishing_form(p2, p3);
    let beta = vanishing_form(p1, p3);
    if alpha.is_zero() || beta.is_zero() || vanishing_form(p1, p2).is_zero() {
        return Err(Error::CoincidentPoints);
    }
    let (a0, a1) = p1.coords();
    let (b0, b1) = p2.coords();
    MoebiusMap::new(&alpha * a1, -(&alpha * a0), &beta * b1, -(&beta * b0))
}

/// Valuation helper for reports.
pub fn radius_text(v: &Valuation) -> String {
    v.to_string()
}
