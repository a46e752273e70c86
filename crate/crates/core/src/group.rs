//! Words in free products of finite cyclic groups, maps onto C_n, and the
//! Reidemeister-Schreier kernel computation used as an independent oracle.

use std::collections::VecDeque;
use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::moebius::MoebiusMap;

/// C_{o_0} * C_{o_1} * ... with generators s_i of order o_i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeProduct {
    orders: Vec<u64>,
}

/// Reduced word: syllables `(factor, exponent)` with exponent in `1..order`
/// and no two adjacent syllables from the same factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FreeProductWord {
    syllables: Vec<(usize, u64)>,
}

impl FreeProductWord {
    pub fn syllables(&self) -> &[(usize, u64)] {
        &self.syllables
    }

    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }
}

impl FreeProduct {
    pub fn new(orders: Vec<u64>) -> Result<Self> {
        if orders.is_empty() || orders.iter().any(|&o| o < 2) {
            return Err(Error::InvalidCoverSpec(
                "factor orders must be at least 2".into(),
            ));
        }
        Ok(FreeProduct { orders })
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn identity(&self) -> FreeProductWord {
        FreeProductWord::default()
    }

    pub fn generator(&self, i: usize) -> FreeProductWord {
        self.word(&[(i, 1)])
    }

    /// Reduce an arbitrary syllable list with signed exponents.
    pub fn word(&self, syllables: &[(usize, i64)]) -> FreeProductWord {
        let mut out: Vec<(usize, u64)> = Vec::with_capacity(syllables.len());
        for &(f, e) in syllables {
            let o = self.orders[f];
            let e = e.rem_euclid(o as i64) as u64;
            self.push(&mut out, f, e);
        }
        FreeProductWord { syllables: out }
    }

    fn push(&self, out: &mut Vec<(usize, u64)>, f: usize, e: u64) {
        let o = self.orders[f];
        let e = e % o;
        if e == 0 {
            return;
        }
        match out.last_mut() {
            Some(last) if last.0 == f => {
                let merged = (last.1 + e) % o;
                if merged == 0 {
                    out.pop();
                } else {
                    last.1 = merged;
                }
            }
            _ => out.push((f, e)),
        }
    }

    pub fn reduce(&self, w: &FreeProductWord) -> FreeProductWord {
        let raw: Vec<(usize, i64)> = w.syllables.iter().map(|&(f, e)| (f, e as i64)).collect();
        self.word(&raw)
    }

    pub fn mul(&self, a: &FreeProductWord, b: &FreeProductWord) -> FreeProductWord {
        let mut out = a.syllables.clone();
        for &(f, e) in &b.syllables {
            self.push(&mut out, f, e);
        }
        FreeProductWord { syllables: out }
    }

    pub fn inverse(&self, w: &FreeProductWord) -> FreeProductWord {
        FreeProductWord {
            syllables: w
                .syllables
                .iter()
                .rev()
                .map(|&(f, e)| (f, self.orders[f] - e))
                .collect(),
        }
    }

    pub fn pow(&self, w: &FreeProductWord, n: i64) -> FreeProductWord {
        let base = if n < 0 { self.inverse(w) } else { w.clone() };
        let mut out = self.identity();
        for _ in 0..n.unsigned_abs() {
            out = self.mul(&out, &base);
        }
        out
    }

    pub fn conjugate(&self, g: &FreeProductWord, w: &FreeProductWord) -> FreeProductWord {
        self.mul(&self.mul(g, w), &self.inverse(g))
    }

    /// Balanced exponent for display: `e` or `e - order`, whichever is smaller in size.
    fn balanced(&self, f: usize, e: u64) -> i64 {
        let o = self.orders[f] as i64;
        let e = e as i64;
        if 2 * e > o {
            e - o
        } else {
            e
        }
    }

    /// Render with the given factor names (default `s0`, `s1`, ...).
    pub fn format(&self, w: &FreeProductWord, names: Option<&[&str]>) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        w.syllables
            .iter()
            .map(|&(f, e)| {
                let name = names.map_or_else(|| format!("s{f}"), |n| n[f].to_string());
                format!("{name}^{}", self.balanced(f, e))
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Parse `s0^2 s1^-1`, or named letters such as `s^2 t s^-3`; a bare
    /// letter means exponent 1 and `1` is the identity.
    pub fn parse(&self, s: &str, names: Option<&[&str]>) -> Result<FreeProductWord> {
        let mut raw = Vec::new();
        for tok in s.split_whitespace() {
            if tok == "1" {
                continue;
            }
            let (name, exp) = match tok.split_once('^') {
                Some((n, e)) => (
                    n,
                    e.parse::<i64>()
                        .map_err(|_| Error::Parse(format!("bad exponent in {tok:?}")))?,
                ),
                None => (tok, 1),
            };
            let f = match names {
                Some(ns) => ns.iter().position(|n| *n == name),
                None => name.strip_prefix('s').and_then(|i| i.parse::<usize>().ok()),
            }
            .filter(|&f| f < self.orders.len())
            .ok_or_else(|| Error::Parse(format!("unknown generator {name:?}")))?;
            raw.push((f, exp));
        }
        Ok(self.word(&raw))
    }
}

impl fmt::Display for FreeProductWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .syllables
            .iter()
            .map(|(i, e)| format!("s{i}^{e}"))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// Normal form of a word given only the factor orders.
pub fn word_reduce(orders: &[u64], w: &[(usize, i64)]) -> Result<FreeProductWord> {
    Ok(FreeProduct::new(orders.to_vec())?.word(w))
}

/// Homomorphism onto C_n sending s_i to `images[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicAssignment {
    pub n: u64,
    pub images: Vec<u64>,
}

impl CyclicAssignment {
    /// Checks that the map is well defined, surjective, and injective on
    /// each factor (so the kernel is torsion-free).
    pub fn new(fp: &FreeProduct, n: u64, images: Vec<u64>) -> Result<Self> {
        if n < 1 || images.len() != fp.rank() {
            return Err(Error::InvalidCoverSpec(
                "one image per factor is required".into(),
            ));
        }
        let images: Vec<u64> = images.into_iter().map(|x| x % n).collect();
        for (&o, &x) in fp.orders.iter().zip(&images) {
            if (o * x) % n != 0 {
                return Err(Error::InvalidCoverSpec(format!(
                    "s of order {o} cannot map to {x} in C_{n}"
                )));
            }
        }
        if images.iter().fold(n, |g, &x| g.gcd(&x)) != 1 {
            return Err(Error::NonGenerating);
        }
        for (&o, &x) in fp.orders.iter().zip(&images) {
            if n / n.gcd(&x) != o {
                return Err(Error::KernelHasTorsion);
            }
        }
        Ok(CyclicAssignment { n, images })
    }
}

pub fn hom_image(w: &FreeProductWord, a: &CyclicAssignment) -> u64 {
    w.syllables
        .iter()
        .fold(0, |acc, &(f, e)| (acc + e % a.n * a.images[f]) % a.n)
}

/// Cosets of the kernel, identified with C_n; generator i adds images[i].
#[derive(Debug, Clone)]
pub struct CosetTable {
    pub n: u64,
    /// `action[c][i]` is the coset of `c * s_i`.
    pub action: Vec<Vec<u64>>,
    /// Schreier transversal: shortest positive words, lexicographic tie-break.
    pub transversal: Vec<FreeProductWord>,
}

impl CosetTable {
    pub fn build(fp: &FreeProduct, a: &CyclicAssignment) -> Self {
        let n = a.n as usize;
        let action: Vec<Vec<u64>> = (0..a.n)
            .map(|c| a.images.iter().map(|&x| (c + x) % a.n).collect())
            .collect();
        let mut transversal: Vec<Option<FreeProductWord>> = vec![None; n];
        transversal[0] = Some(fp.identity());
        let mut queue = VecDeque::from([0usize]);
        while let Some(c) = queue.pop_front() {
            for (i, &d) in action[c].iter().enumerate() {
                let d = d as usize;
                if transversal[d].is_none() {
                    let w = fp.mul(transversal[c].as_ref().unwrap(), &fp.generator(i));
                    transversal[d] = Some(w);
                    queue.push_back(d);
                }
            }
        }
        CosetTable {
            n: a.n,
            action,
            transversal: transversal.into_iter().map(Option::unwrap).collect(),
        }
    }

    pub fn to_csv(&self, fp: &FreeProduct) -> String {
        let mut out = String::from("coset,representative");
        for i in 0..fp.rank() {
            out.push_str(&format!(",s{i}"));
        }
        out.push('\n');
        for (c, row) in self.action.iter().enumerate() {
            out.push_str(&format!("{c},{}", fp.format(&self.transversal[c], None)));
            for x in row {
                out.push_str(&format!(",{x}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Free basis of the kernel by Reidemeister-Schreier: Schreier generators
/// t_c s_i t_{c s_i}^{-1}, with trivial ones dropped and, in each s_i-cycle of
/// cosets, the first nontrivial generator removed using the cycle relator.
pub fn kernel_generators_rs(
    fp: &FreeProduct,
    a: &CyclicAssignment,
) -> Result<Vec<FreeProductWord>> {
    let a = CyclicAssignment::new(fp, a.n, a.images.clone())?;
    let table = CosetTable::build(fp, &a);
    let n = a.n as usize;
    let mut out = Vec::new();
    for i in 0..fp.rank() {
        let mut seen = vec![false; n];
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut eliminated = false;
            let mut c = start;
            loop {
                seen[c] = true;
                let d = table.action[c][i] as usize;
                let g = fp.mul(
                    &fp.mul(&table.transversal[c], &fp.generator(i)),
                    &fp.inverse(&table.transversal[d]),
                );
                if !g.is_empty() {
                    if eliminated {
                        out.push(g);
                    } else {
                        eliminated = true;
                    }
                }
                c = d;
                if c == start {
                    break;
                }
            }
        }
    }
    Ok(out)
}

/// Free rank of the kernel, 1 - n χ with χ = Σ 1/o_i - (k - 1).
pub fn kernel_rank_formula(fp: &FreeProduct, n: u64) -> i64 {
    let k = fp.rank() as i64;
    let sum: i64 = fp.orders.iter().map(|&o| (n / o) as i64).sum();
    1 - (sum - (k - 1) * n as i64)
}

/// Enumerate reduced words of at most `max_len` syllables, optionally only
/// those in the kernel of `a`; report whether none of them has finite order.
pub fn torsion_scan(fp: &FreeProduct, a: Option<&CyclicAssignment>, max_len: usize) -> bool {
    let bound = fp.orders.iter().fold(1u64, |l, &o| l.lcm(&o)) as i64;
    let mut stack: Vec<(usize, u64)> = Vec::new();
    fn rec(
        fp: &FreeProduct,
        a: Option<&CyclicAssignment>,
        max_len: usize,
        bound: i64,
        stack: &mut Vec<(usize, u64)>,
        image: u64,
        found: &mut bool,
    ) {
        if *found {
            return;
        }
        if !stack.is_empty() && a.is_none_or(|_| image == 0) {
            let w = FreeProductWord {
                syllables: stack.clone(),
            };
            let mut power = w.clone();
            for _ in 2..=bound {
                power = fp.mul(&power, &w);
                if power.is_empty() {
                    *found = true;
                    return;
                }
            }
        }
        if stack.len() == max_len {
            return;
        }
        for f in 0..fp.rank() {
            if stack.last().is_some_and(|&(g, _)| g == f) {
                continue;
            }
            for e in 1..fp.orders[f] {
                let img = a.map_or(0, |a| (image + e * a.images[f]) % a.n);
                stack.push((f, e));
                rec(fp, a, max_len, bound, stack, img, found);
                stack.pop();
            }
        }
    }
    let mut found = false;
    rec(fp, a, max_len, bound, &mut stack, 0, &mut found);
    !found
}

/// Product of matrix powers, one per syllable.
pub fn word_to_matrix(w: &FreeProductWord, rep: &[MoebiusMap]) -> Result<MoebiusMap> {
    let first = rep
        .first()
        .ok_or_else(|| Error::InvalidCoverSpec("empty representation".into()))?;
    let mut out = MoebiusMap::identity(first.field());
    for &(f, e) in &w.syllables {
        let g = rep
            .get(f)
            .ok_or_else(|| Error::InvalidCoverSpec(format!("no matrix for factor {f}")))?;
        out = out.compose(&g.pow(e as i64));
    }
    Ok(out)
}

/// Index of the subgroup generated by `gens`, by Todd-Coxeter coset
/// enumeration (HLT strategy); `None` if more than `max_cosets` are needed.
pub fn subgroup_index(
    fp: &FreeProduct,
    gens: &[FreeProductWord],
    max_cosets: usize,
) -> Option<usize> {
    let k = fp.rank();
    let cols = 2 * k;
    let inv = |x: usize| if x < k { x + k } else { x - k };
    let letters = |w: &FreeProductWord| -> Vec<usize> {
        w.syllables
            .iter()
            .flat_map(|&(f, e)| std::iter::repeat_n(f, e as usize))
            .collect()
    };
    let relators: Vec<Vec<usize>> = (0..k).map(|i| vec![i; fp.orders[i] as usize]).collect();
    let subgens: Vec<Vec<usize>> = gens.iter().map(letters).collect();
    let mut e = Enumeration {
        table: vec![vec![None; cols]],
        parent: vec![0],
        cols,
        queue: Vec::new(),
    };
    let inv_ref = &inv;
    for w in &subgens {
        e.scan_and_fill(0, w, inv_ref, max_cosets)?;
    }
    let mut c = 0;
    while c < e.table.len() {
        if e.parent[c] == c {
            for r in &relators {
                if e.parent[c] != c {
                    break;
                }
                e.scan_and_fill(c, r, inv_ref, max_cosets)?;
            }
            if e.parent[c] == c {
                for x in 0..cols {
                    if e.table[c][x].is_none() {
                        e.define(c, x, inv_ref, max_cosets)?;
                    }
                }
            }
        }
        c += 1;
    }
    Some((0..e.table.len()).filter(|&c| e.parent[c] == c).count())
}

struct Enumeration {
    table: Vec<Vec<Option<usize>>>,
    parent: Vec<usize>,
    cols: usize,
    queue: Vec<usize>,
}

impl Enumeration {
    fn define(
        &mut self,
        c: usize,
        x: usize,
        inv: &dyn Fn(usize) -> usize,
        max: usize,
    ) -> Option<usize> {
        if self.table.len() >= max {
            return None;
        }
        let d = self.table.len();
        self.table.push(vec![None; self.cols]);
        self.parent.push(d);
        self.table[c][x] = Some(d);
        self.table[d][inv(x)] = Some(c);
        Some(d)
    }

    fn rep(&mut self, c: usize) -> usize {
        let mut r = c;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = c;
        while self.parent[c] != r {
            let next = self.parent[c];
            self.parent[c] = r;
            c = next;
        }
        r
    }

    fn merge(&mut self, a: usize, b: usize) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a == b {
            return;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        self.parent[hi] = lo;
        self.queue.push(hi);
    }

    fn coincidence(&mut self, a: usize, b: usize, inv: &dyn Fn(usize) -> usize) {
        self.queue.clear();
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let g = self.queue[i];
            i += 1;
            for x in 0..self.cols {
                let Some(d) = self.table[g][x] else { continue };
                if self.table[d][inv(x)] == Some(g) {
                    self.table[d][inv(x)] = None;
                }
                let mu = self.rep(g);
                let nu = self.rep(d);
                if let Some(t) = self.table[mu][x] {
                    self.merge(nu, t);
                } else if let Some(t) = self.table[nu][inv(x)] {
                    self.merge(mu, t);
                } else {
                    self.table[mu][x] = Some(nu);
                    self.table[nu][inv(x)] = Some(mu);
                }
            }
        }
    }

    /// Trace `w` forwards and backwards from `c`, defining cosets as needed;
    /// the final gap is closed by a deduction or a coincidence.
    fn scan_and_fill(
        &mut self,
        c: usize,
        w: &[usize],
        inv: &dyn Fn(usize) -> usize,
        max: usize,
    ) -> Option<()> {
        let (mut f, mut b) = (c, c);
        let (mut i, mut j) = (0i64, w.len() as i64 - 1);
        loop {
            while i <= j {
                let Some(t) = self.table[f][w[i as usize]] else {
                    break;
                };
                f = t;
                i += 1;
            }
            if i > j {
                if f != b {
                    self.coincidence(f, b, inv);
                }
                return Some(());
            }
            while j >= i {
                let Some(t) = self.table[b][inv(w[j as usize])] else {
                    break;
                };
                b = t;
                j -= 1;
            }
            if j < i {
                self.coincidence(f, b, inv);
                return Some(());
            }
            if i == j {
                let x = w[i as usize];
                self.table[f][x] = Some(b);
                self.table[b][inv(x)] = Some(f);
                return Some(());
            }
            self.define(f, w[i as usize], inv, max)?;
        }
    }
}

#[cfg(test)]
mod tests;
