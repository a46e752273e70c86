//! Acceptance gate. Each criterion prints one PASS/FAIL line with its
//! elapsed time; the process exits non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mumford_core::arith::epsilon;
use mumford_core::group::kernel_rank_formula;
use mumford_core::{
    apply_map, arrange, classify, classify_four_point, kernel_generators_rs, make_field, mirror,
    quotient_tree, subgroup_index, synthesize, tate_j_check, torsion_scan, verify_schottky,
    CaseTag, CoverSpec, CyclicAssignment, Field, FreeProduct, GeodesicLine, KummerEquation,
    KummerInput, LineArrangement, MoebiusMap, PadicElement, ProjectivePoint, Rational, TermInput,
    Valuation,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, u64);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn equation(p: u64, degree: u64, terms: &[(String, u64)]) -> KummerEquation {
    KummerInput {
        p,
        precision: Some(64),
        m: None,
        degree,
        terms: terms
            .iter()
            .map(|(pt, e)| TermInput {
                point: pt.clone(),
                exp: *e,
            })
            .collect(),
    }
    .build()
    .unwrap()
}

fn int(v: i64) -> Rational {
    Rational::from_integer(v)
}

// 1. Legendre curve y^2 = x(x - 1)(x - λ) over Q_2.
fn tate_bound() -> Outcome {
    for k in 1..=6u32 {
        let lam = (1 + 2i64.pow(k)).to_string();
        let terms: Vec<(String, u64)> = ["0", "1", "inf", lam.as_str()]
            .iter()
            .map(|s| (s.to_string(), 1))
            .collect();
        let eq = equation(2, 2, &terms);
        let general = classify(&eq).unwrap();
        let four = classify_four_point(&eq).unwrap();
        check(general.is_mumford == (k >= 3), || {
            format!("classify k={k}: {}", general.is_mumford)
        })?;
        check(four == general, || format!("four-point disagrees at k={k}"))?;
        let f = make_field(2, 1, 64).unwrap();
        let t = tate_j_check(&f.int(1 + 2i64.pow(k))).unwrap();
        check(
            t.lambda_close == (k >= 3) && t.j_large == (k >= 3) && t.consistent,
            || format!("j test k={k}"),
        )?;
    }
    Ok(
        "accepts λ = 1 + 2^k exactly for k >= 3; |j| > |2|^4 iff |λ - 1| < |2|^2 on k = 1..6"
            .into(),
    )
}

// 2. λ = 1 + p^k in the prime case.
fn sharpness() -> Outcome {
    let mut certified = Vec::new();
    for p in [2u64, 3, 5] {
        for k in 1..=6u32 {
            let spec = CoverSpec::new(p, p, p, &(1 + p.pow(k)).to_string(), Some(160)).unwrap();
            let pres = synthesize(&spec).unwrap();
            let r = verify_schottky(&pres).unwrap();
            let expect = Rational::from_integer(k as i64) > Rational::new(2, p as i64 - 1);
            check(r.is_schottky_certified == expect, || {
                format!("p={p} k={k}: certified={}", r.is_schottky_certified)
            })?;
            if Rational::from_integer(k as i64) == Rational::new(2, p as i64 - 1) {
                check(r.refuted && r.first_non_hyperbolic.is_some(), || {
                    format!("p={p} k={k} boundary not refuted")
                })?;
            }
            if r.is_schottky_certified {
                certified.push(format!("{p}:{k}"));
            }
        }
    }
    Ok(format!(
        "certified iff k > 2/(p-1); boundary refuted at (2,2), (3,1); {} certified",
        certified.len()
    ))
}

/// Closed rank formulas by arithmetic case.
fn closed_rank(d: u64, e: u64) -> u64 {
    let ell = d.gcd(&e);
    if d == e {
        d - 1
    } else if d.is_multiple_of(e) {
        (d / e) * (e - 1)
    } else if e.is_multiple_of(d) {
        (e / d) * (d - 1)
    } else if ell == 1 {
        (d - 1) * (e - 1)
    } else {
        let (dp, ep) = (d / ell, e / ell);
        (dp - 1) * (ep - 1) + (ell - 1) * dp * ep
    }
}

/// One representative image pair per kernel: (a, b) and (u a, u b) with u a
/// unit of C_n have the same kernel.
fn assignments(d: u64, e: u64) -> Vec<CyclicAssignment> {
    let n = d.lcm(&e);
    let fp = FreeProduct::new(vec![d, e]).unwrap();
    let units: Vec<u64> = (1..n).filter(|u| u.gcd(&n) == 1).collect();
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let Ok(asg) = CyclicAssignment::new(&fp, n, vec![a, b]) else {
                continue;
            };
            let key = units
                .iter()
                .map(|u| (u * a % n, u * b % n))
                .min()
                .unwrap_or((a, b));
            if seen.insert(key) {
                out.push(asg);
            }
        }
    }
    out
}

struct KernelCase {
    fp: FreeProduct,
    asg: CyclicAssignment,
}

fn kernel_cases() -> Vec<KernelCase> {
    let mut out = Vec::new();
    for d in 2..=12u64 {
        for e in 2..=12u64 {
            if d.lcm(&e) > 36 {
                continue;
            }
            for asg in assignments(d, e) {
                out.push(KernelCase {
                    fp: FreeProduct::new(vec![d, e]).unwrap(),
                    asg,
                });
            }
        }
    }
    for m in 1..=3usize {
        for n in 2..=6u64 {
            let fp = FreeProduct::new(vec![n; m + 1]).unwrap();
            let asg = CyclicAssignment::new(&fp, n, vec![1; m + 1]).unwrap();
            out.push(KernelCase { fp, asg });
        }
    }
    out
}

// 3. Reidemeister-Schreier rank against the closed formulas.
fn rank_oracle() -> Outcome {
    let cases = kernel_cases();
    for c in &cases {
        let gens = kernel_generators_rs(&c.fp, &c.asg).unwrap();
        let orders = c.fp.orders();
        let n = c.asg.n;
        let expect = if orders.len() == 2 {
            closed_rank(orders[0], orders[1])
        } else {
            (orders.len() as u64 - 1) * (n - 1)
        };
        check(gens.len() as u64 == expect, || {
            format!(
                "orders {orders:?} images {:?}: {} != {expect}",
                c.asg.images,
                gens.len()
            )
        })?;
        check(kernel_rank_formula(&c.fp, n) == expect as i64, || {
            format!("Euler characteristic disagrees for {orders:?}")
        })?;
        check(
            subgroup_index(&c.fp, &gens, 100_000) == Some(n as usize),
            || {
                format!(
                    "generators of {orders:?} {:?} have wrong index",
                    c.asg.images
                )
            },
        )?;
    }
    check(cases.len() >= 20, || "too few cases".into())?;
    Ok(format!(
        "{} kernels, index <= 36, all ranks and coset indices match",
        cases.len()
    ))
}

fn close(a: &PadicElement, b: &PadicElement) -> bool {
    (a - b).is_zero()
}

// 4. Displayed traces, determinants and the d_ij rewrite.
fn closed_forms() -> Outcome {
    let mut checked = 0;
    for q in [3u64, 5, 7] {
        for f in 1..q {
            let spec = CoverSpec::new(q, q, q, &(1 + q * q).to_string(), None)
                .unwrap()
                .with_twists(f, 1, 1);
            let pres = synthesize(&spec).unwrap();
            let (z, l, one) = (&pres.zeta, &pres.lambda, pres.field.one());
            let lm1 = l - &one;
            let fi = f as i64;
            for g in &pres.generators {
                let tr = ((one.clone() + z.pow(1 - fi)) * l.clone() - (z.clone() + z.pow(-fi)))
                    .div(&lm1)
                    .unwrap();
                check(close(&g.matrix.trace().div(&lm1).unwrap(), &tr), || {
                    format!("trace q={q} f={f} {}", g.label)
                })?;
                check(close(&pres.true_det(g).unwrap(), &z.pow(1 - fi)), || {
                    format!("det q={q} f={f} {}", g.label)
                })?;
                checked += 1;
            }
        }
        for (d, e) in [(2u64, 3u64), (3, 4), (2, 5)] {
            let spec = CoverSpec::new(q, d, e, &(1 + q).to_string(), None).unwrap();
            let pres = synthesize(&spec).unwrap();
            check(pres.case == CaseTag::Coprime, || "dispatch".into())?;
            let (z, l, one) = (&pres.zeta, &pres.lambda, pres.field.one());
            let lm1 = l - &one;
            let mut it = pres.generators.iter();
            for i in 1..d as i64 {
                for j in 1..e as i64 {
                    let g = it.next().unwrap();
                    let (zei, zdj, zmdj) = (
                        z.pow(e as i64 * i),
                        z.pow(d as i64 * j),
                        z.pow(-(d as i64) * j),
                    );
                    check(close(&pres.true_det(g).unwrap(), &one), || {
                        format!("det q={q} ({d},{e}) {i},{j}")
                    })?;
                    let rewrite =
                        lm1.pow(2) + l.clone() * (&one - &zei) * (&one - &zdj) * (&one - &zmdj);
                    check(close(&g.matrix.d, &rewrite), || {
                        format!("d_ij q={q} ({d},{e}) {i},{j}")
                    })?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} generator identities hold at 64 digits"))
}

fn random_point(rng: &mut ChaCha8Rng, f: &Field) -> (ProjectivePoint, Option<Rational>) {
    if rng.gen_ratio(1, 12) {
        return (ProjectivePoint::infinity(f), None);
    }
    let den = [1i64, 2, 3, 4, 5, 8, 9, 25, 27][rng.gen_range(0..9)];
    let r = Rational::new(rng.gen_range(-300..300), den);
    (ProjectivePoint::affine(f.rational(&r)), Some(r))
}

fn random_map(rng: &mut ChaCha8Rng, f: &Field) -> MoebiusMap {
    loop {
        let e: Vec<i64> = (0..4).map(|_| rng.gen_range(-40..40)).collect();
        if e[0] * e[3] - e[1] * e[2] != 0 {
            return MoebiusMap::new(f.int(e[0]), f.int(e[1]), f.int(e[2]), f.int(e[3])).unwrap();
        }
    }
}

// 5. Line arrangements: one variant, symmetric, Möbius invariant.
fn trichotomy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut counts = [0usize; 3];
    for p in [2u64, 3, 5] {
        let f = make_field(p, 1, 64).unwrap();
        let mut done = 0;
        while done < 500 {
            let pts: Vec<_> = (0..4).map(|_| random_point(&mut rng, &f)).collect();
            let distinct = (0..4).all(|i| (i + 1..4).all(|j| pts[i].1 != pts[j].1));
            if !distinct {
                continue;
            }
            let line = |a: usize, b: usize, g: Option<&MoebiusMap>| {
                let (x, y) = (pts[a].0.clone(), pts[b].0.clone());
                match g {
                    Some(g) => {
                        GeodesicLine::new(apply_map(g, &x).unwrap(), apply_map(g, &y).unwrap())
                            .unwrap()
                    }
                    None => GeodesicLine::new(x, y).unwrap(),
                }
            };
            let r = arrange(&line(0, 1, None), &line(2, 3, None)).unwrap();
            let r_sym = arrange(&line(2, 3, None), &line(0, 1, None)).unwrap();
            let r_flip = arrange(&line(1, 0, None), &line(3, 2, None)).unwrap();
            check(r == r_sym && r == r_flip, || {
                format!("p={p}: asymmetric {r:?} {r_sym:?}")
            })?;
            counts[match r {
                LineArrangement::Disjoint { .. } => 0,
                LineArrangement::CrossAtVertex => 1,
                LineArrangement::OverlapSegment { .. } => 2,
            }] += 1;
            for _ in 0..20 {
                let g = random_map(&mut rng, &f);
                let rg = arrange(&line(0, 1, Some(&g)), &line(2, 3, Some(&g))).unwrap();
                check(rg == r, || {
                    format!("p={p}: conjugation changed {r:?} to {rg:?}")
                })?;
            }
            done += 1;
        }
    }
    check(counts.iter().all(|&c| c > 0), || {
        format!("variant never seen: {counts:?}")
    })?;
    Ok(format!(
        "1500 configurations x 20 conjugations; disjoint/cross/overlap = {counts:?}"
    ))
}

/// Fixed-set radius of an elliptic rotation by ζ_k: max over nontrivial
/// powers of v(ζ^j - 1).
fn rotation_radius(f: &Field, k: u64) -> Rational {
    let z = f.root_of_unity(k).unwrap();
    (1..k as i64)
        .map(|j| (z.pow(j) - f.one()).valuation())
        .filter_map(|v| match v {
            Valuation::Finite(r) => Some(r),
            Valuation::Top => None,
        })
        .max()
        .unwrap()
}

// 6. Mirror offsets against an independent computation in Q_p(ζ_lcm).
fn quotient_trees() -> Outcome {
    let mut seen = std::collections::BTreeSet::new();
    for p in [2u64, 3, 5] {
        for m in [2u64, 3, 4, 6] {
            for n in [2u64, 3, 4, 6] {
                let f = make_field(p, m.lcm(&n), 32).unwrap();
                let lam = f.int(1 + (p as i64).pow(3));
                let s = MoebiusMap::diag(f.root_of_unity(m).unwrap(), f.one());
                let phi = MoebiusMap::new(lam.clone(), f.one(), f.one(), f.one()).unwrap();
                let t = phi
                    .compose(&MoebiusMap::diag(f.root_of_unity(n).unwrap(), f.one()))
                    .compose(&phi.adjugate());
                let gap = match arrange(
                    &mirror(&s, m as u32).unwrap(),
                    &mirror(&t, n as u32).unwrap(),
                )
                .unwrap()
                {
                    LineArrangement::Disjoint { distance } => distance,
                    other => return Err(format!("mirrors not disjoint: {other:?}")),
                };
                let (ox, oy) = (rotation_radius(&f, m), rotation_radius(&f, n));
                let q = quotient_tree(p, m, n, gap).unwrap();
                let unit = Rational::new(1, p as i64 - 1);
                check(q.dist_x_v == ox && q.dist_w_y == oy, || {
                    format!(
                        "({p},{m},{n}): offsets {:?} vs {:?}",
                        (q.dist_x_v, q.dist_w_y),
                        (ox, oy)
                    )
                })?;
                check(q.total_length() == gap, || format!("({p},{m},{n}): total"))?;
                let pattern = unit * (epsilon(p, m) + epsilon(p, n));
                check(ox + oy == pattern, || format!("({p},{m},{n}): ε pattern"))?;
                seen.insert(ox + oy);
            }
        }
    }
    check(seen.len() >= 3, || format!("offset totals seen: {seen:?}"))?;
    Ok("offsets 0, 1/(p-1), 2/(p-1) match v(ζ^j - 1) on all 48 triples".into())
}

/// A branch-point pair whose geodesic tops out at the ball B(p^c, c + δ), at
/// distance δ from the axis (0, ∞); δ = 0 gives a pair straddling the axis.
#[derive(Clone, Copy)]
struct Cluster {
    c: i64,
    delta: i64,
}

impl Cluster {
    fn points(self, p: u64) -> [Rational; 2] {
        let pw = |k: i64| Rational::from_integer(p as i64).pow(k as i32);
        if self.delta == 0 {
            [pw(self.c), pw(self.c) * 2]
        } else {
            [pw(self.c), pw(self.c) + pw(self.c + self.delta)]
        }
    }

    /// Tree distance between two such geodesics with different c.
    fn dist(self, o: Cluster) -> Rational {
        let low = self.c.min(o.c);
        int(self.c + self.delta - low + o.c + o.delta - low)
    }
}

fn fmt(r: Rational) -> String {
    mumford_core::arith::fmt_rational(&r)
}

// 7. Many-point separation.
fn many_point() -> Outcome {
    for p in [2u64, 3, 5] {
        for m in [2u64, 3, 4, 6] {
            for k in 1..=6u32 {
                let lam = (1 + p.pow(k)).to_string();
                for a in (1..m).filter(|a| a.gcd(&m) == 1) {
                    let terms = vec![
                        ("0".to_string(), a),
                        ("inf".into(), m - a),
                        ("1".into(), 1),
                        (lam.clone(), m - 1),
                    ];
                    let eq = equation(p, m, &terms);
                    check(
                        classify(&eq).unwrap() == classify_four_point(&eq).unwrap(),
                        || format!("grid p={p} m={m} k={k}"),
                    )?;
                }
            }
        }
    }
    let mut flips = 0;
    for (p, m) in [(2u64, 2u64), (2, 4), (2, 6), (3, 3), (3, 6), (5, 5)] {
        let t = Rational::new(2, p as i64 - 1);
        let x = (1..m).find(|x| x.gcd(&m) == 1).unwrap();
        let exps = (x, m - x);
        let base = [
            Cluster { c: 2, delta: 6 },
            Cluster { c: 0, delta: 6 },
            Cluster { c: -4, delta: 6 },
        ];
        for size in [2usize, 3] {
            for vary in 0..size {
                let mut prev: Option<bool> = None;
                let first = if p == 2 { 1 } else { 0 };
                for delta in first..=5 {
                    let mut cl = base[..size].to_vec();
                    cl[vary].delta = delta;
                    let mut terms = vec![("0".to_string(), exps.0), ("inf".to_string(), exps.1)];
                    let mut dists: Vec<Rational> = cl.iter().map(|c| int(c.delta)).collect();
                    for (i, c) in cl.iter().enumerate() {
                        let [u, w] = c.points(p);
                        terms.push((fmt(u), exps.0));
                        terms.push((fmt(w), exps.1));
                        for o in &cl[i + 1..] {
                            dists.push(c.dist(*o));
                        }
                    }
                    let eq = equation(p, m, &terms);
                    let v = classify(&eq).unwrap();
                    let expect = dists.iter().all(|d| *d > t);
                    let points = 2 * size + 2;
                    check(v.is_mumford == expect, || {
                        format!("{points} points p={p} m={m} δ={delta}: {:?}", v.failure)
                    })?;
                    if expect {
                        let mut got: Vec<_> =
                            v.pair_checks.iter().map(|c| c.distance.unwrap()).collect();
                        got.sort();
                        dists.sort();
                        check(got == dists, || format!("distances {got:?} vs {dists:?}"))?;
                    }
                    if let Some(pv) = prev {
                        if pv != v.is_mumford {
                            flips += 1;
                            check(!pv && int(delta - 1) <= t && int(delta) > t, || {
                                format!("flip away from the threshold at δ={delta}")
                            })?;
                        }
                    }
                    prev = Some(v.is_mumford);
                }
                check(prev == Some(true), || {
                    format!("p={p} m={m}: never accepted")
                })?;
            }
        }
    }
    check(flips == 30, || {
        format!("expected one flip per family, saw {flips}")
    })?;
    Ok(format!(
        "4-point grid agrees; {flips} 6/8-point families flip exactly at their ε-threshold"
    ))
}

// 8. Torsion scan at L = 6.
fn torsion() -> Outcome {
    let cases = kernel_cases();
    let mut ambient = std::collections::BTreeSet::new();
    for c in &cases {
        check(torsion_scan(&c.fp, Some(&c.asg), 6), || {
            format!("torsion in kernel {:?} {:?}", c.fp.orders(), c.asg.images)
        })?;
        if ambient.insert(c.fp.orders().to_vec()) {
            check(!torsion_scan(&c.fp, None, 6), || {
                format!("no torsion found in {:?}", c.fp.orders())
            })?;
        }
    }
    Ok(format!(
        "{} kernels torsion-free up to 6 syllables; {} ambient products have torsion",
        cases.len(),
        ambient.len()
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 tate bound", tate_bound, 1),
        ("2 sharpness sweep", sharpness, 5),
        ("3 rank oracle", rank_oracle, 30),
        ("4 closed forms", closed_forms, 10),
        ("5 cross-ratio trichotomy", trichotomy, 30),
        ("6 quotient tree", quotient_trees, 1),
        ("7 many-point consistency", many_point, 10),
        ("8 torsion scan", torsion, 60),
    ];
    let mut failed = 0;
    for (name, f, budget) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if took > Duration::from_secs(budget) => {
                Err(format!("{msg}; over the {budget} s budget"))
            }
            o => o,
        };
        match outcome {
            Ok(msg) => println!("PASS criterion {name} ({:.2} s): {msg}", took.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name} ({:.2} s): {msg}", took.as_secs_f64());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
