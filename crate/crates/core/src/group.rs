//! Finite abelian p-groups and homomorphisms between them.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{inv_mod, ipow, is_prime, rem};
use crate::error::{Error, Result};

/// Default bound on group orders for enumeration-heavy operations.
pub const DEFAULT_ORDER_BOUND: u64 = 4096;

/// `Z/p^λ₁ ⊕ Z/p^λ₂ ⊕ …` with `λ` non-increasing. The empty partition is the
/// trivial group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GroupType {
    pub p: u64,
    pub lambda: Vec<u32>,
}

#[derive(Deserialize)]
struct RawGroup {
    p: u64,
    lambda: Vec<u32>,
}

impl<'de> Deserialize<'de> for GroupType {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawGroup::deserialize(d)?;
        GroupType::new(raw.p, raw.lambda).map_err(serde::de::Error::custom)
    }
}

impl GroupType {
    pub fn new(p: u64, mut lambda: Vec<u32>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::ParseError { pos: 0, msg: format!("{p} is not prime") });
        }
        if lambda.iter().any(|&l| l == 0) {
            return Err(Error::ParseError { pos: 0, msg: "exponents must be positive".into() });
        }
        lambda.sort_unstable_by(|a, b| b.cmp(a));
        Ok(GroupType { p, lambda })
    }

    pub fn trivial(p: u64) -> Self {
        GroupType { p, lambda: vec![] }
    }

    pub fn cyclic(p: u64, k: u32) -> Self {
        if k == 0 {
            Self::trivial(p)
        } else {
            GroupType { p, lambda: vec![k] }
        }
    }

    pub fn elementary(p: u64, m: usize) -> Self {
        GroupType { p, lambda: vec![1; m] }
    }

    /// `(Z/p^n)^m`.
    pub fn free(p: u64, n: u32, m: usize) -> Self {
        if n == 0 {
            Self::trivial(p)
        } else {
            GroupType { p, lambda: vec![n; m] }
        }
    }

    pub fn rank(&self) -> usize {
        self.lambda.len()
    }

    pub fn log_order(&self) -> u32 {
        self.lambda.iter().sum()
    }

    pub fn order(&self) -> u64 {
        self.p.pow(self.log_order())
    }

    pub fn exponent(&self) -> u32 {
        self.lambda.first().copied().unwrap_or(0)
    }

    pub fn is_trivial(&self) -> bool {
        self.lambda.is_empty()
    }

    pub fn is_cyclic(&self) -> bool {
        self.lambda.len() <= 1
    }

    pub fn moduli(&self) -> Vec<i64> {
        self.lambda.iter().map(|&l| ipow(self.p, l)).collect()
    }

    /// Cache key, e.g. `p2-l2.1`.
    pub fn key(&self) -> String {
        let parts: Vec<String> = self.lambda.iter().map(|l| l.to_string()).collect();
        format!("p{}-l{}", self.p, parts.join("."))
    }

    pub fn check_order(&self, bound: u64) -> Result<()> {
        if self.order() > bound {
            return Err(Error::ScaleExceeded { what: format!("|{self}|"), got: self.order(), bound });
        }
        Ok(())
    }

    // ---- elements ---------------------------------------------------------

    pub fn reduce(&self, x: &mut [i64]) {
        for (xi, m) in x.iter_mut().zip(self.moduli()) {
            *xi = rem(*xi, m);
        }
    }

    /// Index of a reduced element; the first coordinate is most significant.
    pub fn index_of(&self, x: &[i64]) -> usize {
        let mut idx = 0usize;
        for (xi, m) in x.iter().zip(self.moduli()) {
            idx = idx * m as usize + *xi as usize;
        }
        idx
    }

    pub fn element_at(&self, mut idx: usize) -> Vec<i64> {
        let mods = self.moduli();
        let mut x = vec![0; mods.len()];
        for i in (0..mods.len()).rev() {
            x[i] = (idx % mods[i] as usize) as i64;
            idx /= mods[i] as usize;
        }
        x
    }

    pub fn elements(&self) -> Vec<Vec<i64>> {
        (0..self.order() as usize).map(|i| self.element_at(i)).collect()
    }

    /// The element has order `p^eta`.
    pub fn eta(&self, x: &[i64]) -> u32 {
        let mut e = 0;
        for (xi, &l) in x.iter().zip(&self.lambda) {
            if *xi != 0 {
                let v = crate::arith::vp(*xi, self.p).min(l);
                e = e.max(l - v);
            }
        }
        e
    }
}

impl PartialOrd for GroupType {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Ordered by prime, then order, then partition.
impl Ord for GroupType {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.p, self.log_order(), &self.lambda).cmp(&(other.p, other.log_order(), &other.lambda))
    }
}

impl fmt::Display for GroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lambda.is_empty() {
            return write!(f, "1");
        }
        let mut parts = vec![];
        let mut i = 0;
        while i < self.lambda.len() {
            let mut j = i;
            while j < self.lambda.len() && self.lambda[j] == self.lambda[i] {
                j += 1;
            }
            let c = self.p.pow(self.lambda[i]);
            if j - i == 1 {
                parts.push(format!("C{c}"));
            } else {
                parts.push(format!("C{c}^{}", j - i));
            }
            i = j;
        }
        write!(f, "{}", parts.join("x"))
    }
}

// ---- hom-sets ---------------------------------------------------------------

/// Shape data for `Hom(source, target)`: a matrix with one row per target
/// coordinate and one column per source coordinate. Entry `(i,j)` lives in
/// `p^{max(0, μ_i − λ_j)} Z / p^{μ_i}`.
#[derive(Clone, Debug)]
pub struct HomShape {
    pub source: GroupType,
    pub target: GroupType,
    pub rows: usize,
    pub cols: usize,
    pub row_mod: Vec<i64>,
    /// Step of entry (i,j), row-major.
    pub step: Vec<i64>,
    /// Number of admissible values of entry (i,j), row-major.
    pub count: Vec<u64>,
}

impl HomShape {
    pub fn new(source: &GroupType, target: &GroupType) -> Self {
        let p = source.p;
        let (rows, cols) = (target.rank(), source.rank());
        let mut step = Vec::with_capacity(rows * cols);
        let mut count = Vec::with_capacity(rows * cols);
        for &mu in &target.lambda {
            for &la in &source.lambda {
                step.push(ipow(p, mu.saturating_sub(la)));
                count.push(p.pow(mu.min(la)));
            }
        }
        HomShape {
            source: source.clone(),
            target: target.clone(),
            rows,
            cols,
            row_mod: target.moduli(),
            step,
            count,
        }
    }

    /// Number of homomorphisms; `None` if it does not fit in `u64`.
    pub fn hom_count(&self) -> Option<u64> {
        self.count.iter().try_fold(1u64, |a, &c| a.checked_mul(c))
    }

    /// Mixed-radix code; numeric order equals row-major lexicographic order.
    pub fn encode(&self, m: &[i64]) -> u64 {
        let mut c = 0u64;
        for k in 0..m.len() {
            c = c * self.count[k] + (m[k] / self.step[k]) as u64;
        }
        c
    }

    pub fn decode(&self, mut c: u64) -> Vec<i64> {
        let n = self.rows * self.cols;
        let mut m = vec![0; n];
        for k in (0..n).rev() {
            m[k] = (c % self.count[k]) as i64 * self.step[k];
            c /= self.count[k];
        }
        m
    }
}

/// Flat row-major product `g∘f` where `f` is `r_f × s` and `g` is `r × r_f`.
pub fn compose_raw(g: &[i64], f: &[i64], r: usize, mid: usize, s: usize, row_mod: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64; r * s];
    for i in 0..r {
        let m = row_mod[i] as i128;
        for k in 0..s {
            let mut acc: i128 = 0;
            for j in 0..mid {
                acc += g[i * mid + j] as i128 * f[j * s + k] as i128;
            }
            out[i * s + k] = acc.rem_euclid(m) as i64;
        }
    }
    out
}

/// Rank over `F_p` of a small integer matrix.
pub fn rank_mod_p(m: &[i64], rows: usize, cols: usize, p: u64) -> usize {
    let p = p as i64;
    let mut a: Vec<i64> = m.iter().map(|&x| rem(x, p)).collect();
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| a[r * cols + c] != 0) else { continue };
        for k in 0..cols {
            a.swap(piv * cols + k, rank * cols + k);
        }
        let inv = inv_mod(a[rank * cols + c], p).unwrap();
        for r in 0..rows {
            if r != rank && a[r * cols + c] != 0 {
                let f = a[r * cols + c] * inv % p;
                for k in 0..cols {
                    a[r * cols + k] = rem(a[r * cols + k] - f * a[rank * cols + k], p);
                }
            }
        }
        rank += 1;
    }
    rank
}

// ---- morphisms --------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Morphism {
    pub source: GroupType,
    pub target: GroupType,
    /// Row-major, `target.rank() × source.rank()`.
    pub m: Vec<i64>,
}

impl PartialOrd for Morphism {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Morphism {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.source, &self.target, &self.m).cmp(&(&other.source, &other.target, &other.m))
    }
}

#[derive(Serialize, Deserialize)]
struct RawMorphism {
    source: GroupType,
    target: GroupType,
    matrix: Vec<Vec<i64>>,
}

impl Serialize for Morphism {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawMorphism { source: self.source.clone(), target: self.target.clone(), matrix: self.rows() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Morphism {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawMorphism::deserialize(d)?;
        make_morphism(&raw.source, &raw.target, &raw.matrix).map_err(serde::de::Error::custom)
    }
}

/// Validates and canonicalizes a matrix (rows = target coordinates).
pub fn make_morphism(source: &GroupType, target: &GroupType, matrix: &[Vec<i64>]) -> Result<Morphism> {
    if source.p != target.p {
        return Err(Error::ShapeMismatch("different primes".into()));
    }
    let (r, s) = (target.rank(), source.rank());
    if matrix.len() != r || matrix.iter().any(|row| row.len() != s) {
        return Err(Error::ShapeMismatch(format!("expected {r}x{s} matrix")));
    }
    let shape = HomShape::new(source, target);
    let mut m = Vec::with_capacity(r * s);
    for (i, row) in matrix.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            let step = shape.step[i * s + j];
            let v = rem(x, shape.row_mod[i]);
            if v % step != 0 {
                return Err(Error::DivisibilityViolation { row: i, col: j, value: x, modulus: step });
            }
            m.push(v);
        }
    }
    Ok(Morphism { source: source.clone(), target: target.clone(), m })
}

impl Morphism {
    pub fn identity(g: &GroupType) -> Self {
        let r = g.rank();
        let mut m = vec![0; r * r];
        for i in 0..r {
            m[i * r + i] = 1;
        }
        Morphism { source: g.clone(), target: g.clone(), m }
    }

    /// The unique map to the trivial group.
    pub fn to_trivial(g: &GroupType) -> Self {
        Morphism { source: g.clone(), target: GroupType::trivial(g.p), m: vec![] }
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        let s = self.source.rank();
        (0..self.target.rank()).map(|i| self.m[i * s..(i + 1) * s].to_vec()).collect()
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.m[i * self.source.rank() + j]
    }

    /// `self ∘ f`.
    pub fn compose(&self, f: &Morphism) -> Morphism {
        assert_eq!(self.source, f.target, "composing incompatible morphisms");
        let m = compose_raw(
            &self.m,
            &f.m,
            self.target.rank(),
            self.source.rank(),
            f.source.rank(),
            &self.target.moduli(),
        );
        Morphism { source: f.source.clone(), target: self.target.clone(), m }
    }

    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        let s = self.source.rank();
        self.target
            .moduli()
            .iter()
            .enumerate()
            .map(|(i, &md)| {
                let acc: i128 = (0..s).map(|j| self.m[i * s + j] as i128 * x[j] as i128).sum();
                acc.rem_euclid(md as i128) as i64
            })
            .collect()
    }

    /// Onto iff the induced map on Frattini quotients is onto.
    pub fn is_surjective(&self) -> bool {
        rank_mod_p(&self.m, self.target.rank(), self.source.rank(), self.source.p) == self.target.rank()
    }

    pub fn code(&self) -> u64 {
        HomShape::new(&self.source, &self.target).encode(&self.m)
    }
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}:{:?}", self.source, self.target, self.rows())
    }
}

// ---- epimorphisms -----------------------------------------------------------

/// Incremental echelon form over `F_p` used to prune non-surjective prefixes.
#[derive(Clone)]
struct ModPEchelon {
    p: i64,
    rows: Vec<(usize, Vec<i64>)>,
}

impl ModPEchelon {
    fn new(p: u64) -> Self {
        ModPEchelon { p: p as i64, rows: vec![] }
    }

    fn reduce(&self, v: &mut [i64]) {
        for (piv, row) in &self.rows {
            let c = v[*piv];
            if c != 0 {
                for k in 0..v.len() {
                    v[k] = rem(v[k] - c * row[k], self.p);
                }
            }
        }
    }

    fn push(&mut self, mut v: Vec<i64>) -> bool {
        for x in v.iter_mut() {
            *x = rem(*x, self.p);
        }
        self.reduce(&mut v);
        let Some(piv) = v.iter().position(|&x| x != 0) else { return false };
        let inv = inv_mod(v[piv], self.p).unwrap();
        for x in v.iter_mut() {
            *x = *x * inv % self.p;
        }
        self.rows.push((piv, v));
        true
    }

    fn is_independent(&self, v: &[i64]) -> bool {
        let mut w: Vec<i64> = v.iter().map(|&x| rem(x, self.p)).collect();
        self.reduce(&mut w);
        w.iter().any(|&x| x != 0)
    }
}

/// Steps to the next admissible row for target coordinate `i` in
/// lexicographic order; `false` once the row wraps around to zero.
fn next_row(shape: &HomShape, i: usize, row: &mut [i64]) -> bool {
    let s = shape.cols;
    for j in (0..s).rev() {
        let (step, cnt) = (shape.step[i * s + j], shape.count[i * s + j] as i64);
        row[j] += step;
        if row[j] < step * cnt {
            return true;
        }
        row[j] = 0;
    }
    false
}

/// Calls `f` on every surjection `t → g` (flat matrix) in lexicographic order.
/// Stops early when `f` returns `false`. Rows are generated lazily, so the
/// first few surjections are cheap even when the hom-set is huge.
pub fn for_each_epi<F: FnMut(&[i64]) -> bool>(t: &GroupType, g: &GroupType, mut f: F) {
    if t.p != g.p || g.rank() > t.rank() || g.log_order() > t.log_order() {
        return;
    }
    let shape = HomShape::new(t, g);
    let r = shape.rows;
    if r == 0 {
        f(&[]);
        return;
    }
    let mut current = vec![0i64; r * shape.cols];
    fn rec<F: FnMut(&[i64]) -> bool>(i: usize, shape: &HomShape, ech: &ModPEchelon, cur: &mut Vec<i64>, f: &mut F) -> bool {
        let (r, s) = (shape.rows, shape.cols);
        let mut row = vec![0i64; s];
        loop {
            if ech.is_independent(&row) {
                cur[i * s..(i + 1) * s].copy_from_slice(&row);
                if i + 1 == r {
                    if !f(cur) {
                        return false;
                    }
                } else {
                    let mut e2 = ech.clone();
                    e2.push(row.clone());
                    if !rec(i + 1, shape, &e2, cur, f) {
                        return false;
                    }
                }
            }
            if !next_row(shape, i, &mut row) {
                return true;
            }
        }
    }
    rec(0, &shape, &ModPEchelon::new(t.p), &mut current, &mut f);
}

/// All surjections `t → g`, lexicographically ordered.
pub fn enumerate_epis(t: &GroupType, g: &GroupType) -> Vec<Morphism> {
    let mut out = vec![];
    for_each_epi(t, g, |m| {
        out.push(Morphism { source: t.clone(), target: g.clone(), m: m.to_vec() });
        true
    });
    out
}

/// Codes of all surjections `t → g`, ascending.
pub fn epi_codes(t: &GroupType, g: &GroupType) -> Vec<u64> {
    let shape = HomShape::new(t, g);
    let mut out = vec![];
    for_each_epi(t, g, |m| {
        out.push(shape.encode(m));
        true
    });
    out
}

/// Number of surjections `t → g`. Enumerates independent mod-p row prefixes
/// and counts the completions of the final row directly.
pub fn count_epis(t: &GroupType, g: &GroupType) -> u64 {
    if t.p != g.p || g.rank() > t.rank() || g.log_order() > t.log_order() {
        return 0;
    }
    let r = g.rank();
    if r == 0 {
        return 1;
    }
    let p = t.p;
    let shape = HomShape::new(t, g);
    let s = shape.cols;
    // Coordinates where row i can be nonzero mod p, and lifts per residue row.
    let mut support: Vec<Vec<usize>> = vec![];
    let mut lifts = 1u64;
    for i in 0..r {
        let sup: Vec<usize> = (0..s).filter(|&j| shape.step[i * s + j] == 1).collect();
        let total: u64 = (0..s).map(|j| shape.count[i * s + j]).product();
        lifts *= total / p.pow(sup.len() as u32);
        support.push(sup);
    }
    // λ is non-increasing, so the supports are nested and row i only has to
    // avoid the span of the i earlier rows inside F_p^{support_i}
    debug_assert!(support.windows(2).all(|w| w[0].iter().all(|j| w[1].contains(j))));
    let mut total = lifts;
    for (i, sup) in support.iter().enumerate() {
        let free = p.pow(sup.len() as u32);
        let taken = p.pow(i as u32);
        if free <= taken {
            return 0;
        }
        total *= free - taken;
    }
    total
}

pub fn automorphisms(g: &GroupType) -> Result<Vec<Morphism>> {
    g.check_order(DEFAULT_ORDER_BOUND)?;
    Ok(enumerate_epis(g, g))
}

/// Generators of `Aut((Z/p^n)^m)`: elementary transvections and diagonal
/// matrices `diag(u,1,…,1)` for generators `u` of the unit group.
pub fn free_aut_generators(g: &GroupType) -> Vec<Morphism> {
    let r = g.rank();
    if r == 0 {
        return vec![Morphism::identity(g)];
    }
    let n = g.lambda[0];
    assert!(g.lambda.iter().all(|&l| l == n), "free_aut_generators needs (Z/p^n)^m");
    let p = g.p;
    let md = ipow(p, n);
    let mut gens = vec![];
    for i in 0..r {
        for j in 0..r {
            if i != j {
                let mut a = Morphism::identity(g);
                a.m[i * r + j] = 1 % md;
                gens.push(a);
            }
        }
    }
    for u in unit_generators(p, n) {
        let mut a = Morphism::identity(g);
        a.m[0] = u;
        gens.push(a);
    }
    gens
}

/// Generators of `Aut(G)` for any abelian p-group: elementary transvections
/// `x_i += c·x_j` with the smallest admissible `c`, and `diag(1,…,u,…,1)` for
/// unit generators `u` mod `p^{λ_i}`.
pub fn aut_generators(g: &GroupType) -> Vec<Morphism> {
    let r = g.rank();
    let shape = HomShape::new(g, g);
    let mut gens = vec![];
    for i in 0..r {
        for j in 0..r {
            if i != j {
                let mut a = Morphism::identity(g);
                a.m[i * r + j] = shape.step[i * r + j] % shape.row_mod[i];
                gens.push(a);
            }
        }
        for u in unit_generators(g.p, g.lambda[i]) {
            let mut a = Morphism::identity(g);
            a.m[i * r + i] = u;
            gens.push(a);
        }
    }
    gens.sort();
    gens.dedup();
    gens
}

/// Inverse of an automorphism.
pub fn inverse(a: &Morphism) -> Morphism {
    // the powers of a permutation of a finite set cycle back to the identity
    let id = Morphism::identity(&a.source);
    let mut prev = id.clone();
    let mut cur = a.clone();
    while cur != id {
        prev = cur.clone();
        cur = cur.compose(a);
    }
    prev
}

/// Generators of `(Z/p^n)^×`.
pub fn unit_generators(p: u64, n: u32) -> Vec<i64> {
    let md = ipow(p, n);
    if md <= 2 {
        return vec![];
    }
    if p == 2 {
        if n == 2 {
            return vec![3];
        }
        return vec![md - 1, 5];
    }
    // a primitive root mod p lifts to one mod p^n after at most one correction
    let phi = (md / p as i64) * (p as i64 - 1);
    let is_generator = |g: i64| {
        let mut x = 1i64;
        let mut ord = 0;
        loop {
            x = crate::arith::mulmod(x, g, md);
            ord += 1;
            if x == 1 {
                break;
            }
        }
        ord == phi
    };
    let g = (2..md).find(|&g| g % p as i64 != 0 && is_generator(g)).unwrap();
    vec![g]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(p: u64, l: &[u32]) -> GroupType {
        GroupType::new(p, l.to_vec()).unwrap()
    }

    #[test]
    fn make_morphism_examples() {
        assert!(make_morphism(&g(2, &[2]), &g(2, &[1]), &[vec![1]]).is_ok());
        assert!(matches!(
            make_morphism(&g(2, &[1]), &g(2, &[2]), &[vec![1]]),
            Err(Error::DivisibilityViolation { .. })
        ));
        assert!(make_morphism(&g(2, &[2, 1]), &g(2, &[2]), &[vec![1, 2]]).is_ok());
        assert!(matches!(
            make_morphism(&g(2, &[2, 1]), &g(2, &[2]), &[vec![1]]),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn surjectivity_examples() {
        let f = make_morphism(&g(2, &[2]), &g(2, &[1]), &[vec![1]]).unwrap();
        assert!(f.is_surjective());
        let f = make_morphism(&g(2, &[1, 1]), &g(2, &[1]), &[vec![1, 1]]).unwrap();
        assert!(f.is_surjective());
        let f = make_morphism(&g(2, &[2]), &g(2, &[2]), &[vec![2]]).unwrap();
        assert!(!f.is_surjective());
    }

    #[test]
    fn epi_examples() {
        assert_eq!(enumerate_epis(&g(2, &[1, 1]), &g(2, &[1])).len(), 3);
        assert!(enumerate_epis(&g(2, &[1]), &g(2, &[2])).is_empty());
        assert_eq!(automorphisms(&g(2, &[1, 1])).unwrap().len(), 6);
        assert_eq!(automorphisms(&g(2, &[2])).unwrap().len(), 2);
        assert_eq!(automorphisms(&GroupType::trivial(2)).unwrap().len(), 1);
    }

    #[test]
    fn count_matches_enumeration() {
        for (p, bound) in [(2u64, 32u64), (3, 27)] {
            let ms = crate::family::Family::all(p).members(bound);
            for t in &ms {
                for h in &ms {
                    let mut n = 0u64;
                    for_each_epi(t, h, |_| {
                        n += 1;
                        true
                    });
                    assert_eq!(count_epis(t, h), n, "{t} -> {h}");
                }
            }
        }
    }

    #[test]
    fn codes_follow_lex_order() {
        let t = g(2, &[2, 1]);
        let h = g(2, &[2, 1]);
        let shape = HomShape::new(&t, &h);
        let epis = enumerate_epis(&t, &h);
        let codes: Vec<u64> = epis.iter().map(|e| shape.encode(&e.m)).collect();
        assert!(codes.windows(2).all(|w| w[0] < w[1]));
        for e in &epis {
            assert_eq!(shape.decode(shape.encode(&e.m)), e.m);
        }
    }

    #[test]
    fn display_and_key() {
        assert_eq!(g(2, &[1, 2]).to_string(), "C4xC2");
        assert_eq!(g(2, &[1, 1, 1]).to_string(), "C2^3");
        assert_eq!(g(2, &[2, 1]).key(), "p2-l2.1");
        assert_eq!(GroupType::trivial(3).to_string(), "1");
    }

    #[test]
    fn unit_generators_generate() {
        for (p, n) in [(2u64, 1u32), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (5, 2)] {
            let md = ipow(p, n);
            let gens = unit_generators(p, n);
            let mut seen = std::collections::BTreeSet::from([1 % md]);
            let mut frontier = vec![1 % md];
            while let Some(x) = frontier.pop() {
                for &u in &gens {
                    let y = crate::arith::mulmod(x, u, md);
                    if seen.insert(y) {
                        frontier.push(y);
                    }
                }
            }
            let units = (0..md).filter(|x| x % p as i64 != 0).count();
            assert_eq!(seen.len(), units.max(1), "p={p} n={n}");
        }
    }

    #[test]
    fn aut_generators_generate() {
        for grp in [g(2, &[1, 1]), g(2, &[2, 1]), g(2, &[3, 1, 1]), g(3, &[2, 1]), g(2, &[2, 2]), g(2, &[1, 1, 1])] {
            let gens = aut_generators(&grp);
            let id = Morphism::identity(&grp);
            let mut seen = std::collections::HashSet::from([id.clone()]);
            let mut frontier = vec![id];
            while let Some(x) = frontier.pop() {
                for a in &gens {
                    let y = a.compose(&x);
                    if seen.insert(y.clone()) {
                        frontier.push(y);
                    }
                }
            }
            assert_eq!(seen.len() as u64, count_epis(&grp, &grp), "{grp}");
            for a in seen.iter().take(20) {
                assert_eq!(inverse(a).compose(a), Morphism::identity(&grp));
            }
        }
    }
}
