//! Subgroups of finite abelian p-groups.
//!
//! A subgroup `S ≤ G = ⊕ Z/p^{λ_i}` is stored through the lattice
//! `L = π⁻¹(S) ⊂ Z^r`, which contains `diag(p^{λ_i})`. Its Hermite normal form
//! is upper triangular with diagonal `p^{a_i}` and entries above the diagonal
//! reduced into `[0, p^{a_j})`; this form is unique, so equality of subgroups is
//! equality of normal forms. `|S| = p^{Σ(λ_i − a_i)}`.

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::arith::{inv_mod, ipow, rem, vp_cap, xgcd};
use crate::error::{Error, Result};
use crate::group::{GroupType, Morphism, DEFAULT_ORDER_BOUND};

/// Hermite normal form of a full-rank lattice containing `diag(moduli)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lattice {
    pub moduli: Vec<i64>,
    /// Row-major `n × n`, upper triangular.
    pub rows: Vec<i64>,
}

impl Lattice {
    /// The lattice `diag(moduli)` itself.
    pub fn base(moduli: Vec<i64>) -> Self {
        let n = moduli.len();
        let mut rows = vec![0; n * n];
        for i in 0..n {
            rows[i * n + i] = moduli[i];
        }
        Lattice { moduli, rows }
    }

    pub fn dim(&self) -> usize {
        self.moduli.len()
    }

    pub fn diag(&self, i: usize) -> i64 {
        self.rows[i * self.dim() + i]
    }

    /// Adds a vector to the lattice, keeping the normal form.
    pub fn insert(&mut self, v: &[i64]) {
        let n = self.dim();
        let mut v: Vec<i64> = v.iter().zip(&self.moduli).map(|(&x, &m)| rem(x, m)).collect();
        let mut changed = false;
        for i in 0..n {
            if v[i] == 0 {
                continue;
            }
            let b = self.rows[i * n + i];
            if v[i] % b == 0 {
                let q = v[i] / b;
                for k in i..n {
                    v[k] = rem(v[k] - q * self.rows[i * n + k], self.moduli[k]);
                }
                continue;
            }
            // [row_i; v] <- [[s, t], [v_i/g, -b/g]] [row_i; v]
            let (g, s, t) = xgcd(b, v[i]);
            let (a1, a2) = (v[i] / g, b / g);
            for k in i..n {
                let r = self.rows[i * n + k] as i128;
                let x = v[k] as i128;
                let m = self.moduli[k] as i128;
                let nr = (s as i128 * r + t as i128 * x).rem_euclid(m);
                let nv = (a1 as i128 * r - a2 as i128 * x).rem_euclid(m);
                self.rows[i * n + k] = nr as i64;
                v[k] = nv as i64;
            }
            // the new diagonal entry is g (mod p^λ it may have been reduced)
            self.rows[i * n + i] = g;
            v[i] = 0;
            changed = true;
        }
        if changed {
            self.normalize();
        }
    }

    /// Reduces entries above the diagonal.
    fn normalize(&mut self) {
        let n = self.dim();
        for i in 0..n {
            if self.rows[i * n + i] == 0 {
                self.rows[i * n + i] = self.moduli[i];
            }
        }
        for j in 0..n {
            let d = self.rows[j * n + j];
            for i in 0..j {
                let q = self.rows[i * n + j].div_euclid(d);
                if q != 0 {
                    for k in j..n {
                        self.rows[i * n + k] -= q * self.rows[j * n + k];
                    }
                }
            }
        }
        // entries right of the diagonal of a row may exceed their modulus after
        // the subtraction above; reducing them mod p^λ stays inside the lattice
        // and the column pass is repeated until stable.
        loop {
            let mut dirty = false;
            for i in 0..n {
                for k in i + 1..n {
                    let x = self.rows[i * n + k];
                    let d = self.rows[k * n + k];
                    if x < 0 || x >= d {
                        dirty = true;
                        let q = x.div_euclid(d);
                        for kk in k..n {
                            self.rows[i * n + kk] -= q * self.rows[k * n + kk];
                        }
                    }
                }
            }
            if !dirty {
                break;
            }
        }
    }

    /// Membership test; returns the coefficients `z` with `v ≡ z·rows`.
    pub fn solve(&self, v: &[i64]) -> Option<Vec<i64>> {
        let n = self.dim();
        let mut v: Vec<i64> = v.iter().zip(&self.moduli).map(|(&x, &m)| rem(x, m)).collect();
        let mut z = vec![0; n];
        for i in 0..n {
            let b = self.rows[i * n + i];
            if v[i] % b != 0 {
                return None;
            }
            let q = v[i] / b;
            z[i] = q;
            for k in i..n {
                v[k] = rem(v[k] - q * self.rows[i * n + k], self.moduli[k]);
            }
        }
        Some(z)
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.solve(v).is_some()
    }

    pub fn row(&self, i: usize) -> &[i64] {
        let n = self.dim();
        &self.rows[i * n..(i + 1) * n]
    }
}

/// Smith form over `Z/p^M` of an integer matrix, tracking column operations.
/// Returns the diagonal valuations (capped at `M`), `V` and `V⁻¹` (both `c × c`).
fn smith_columns(a: &[i64], rows: usize, cols: usize, p: u64, big: u32) -> (Vec<u32>, Vec<i64>, Vec<i64>) {
    let md = ipow(p, big);
    let mut a: Vec<i64> = a.iter().map(|&x| rem(x, md)).collect();
    let mut v = vec![0i64; cols * cols];
    let mut vi = vec![0i64; cols * cols];
    for i in 0..cols {
        v[i * cols + i] = 1 % md;
        vi[i * cols + i] = 1 % md;
    }
    let mut diag = vec![];
    let mut used_rows = vec![false; rows];
    for t in 0..cols {
        // pivot of minimal valuation among unused rows and columns >= t
        let mut best: Option<(u32, usize, usize)> = None;
        for r in 0..rows {
            if used_rows[r] {
                continue;
            }
            for c in t..cols {
                let x = a[r * cols + c];
                if x != 0 {
                    let val = vp_cap(x, p, big);
                    if best.map_or(true, |b| val < b.0) {
                        best = Some((val, r, c));
                    }
                }
            }
        }
        let Some((val, r, c)) = best else {
            diag.extend(std::iter::repeat(big).take(cols - t));
            break;
        };
        // swap columns t and c
        if c != t {
            for rr in 0..rows {
                a.swap(rr * cols + t, rr * cols + c);
            }
            for rr in 0..cols {
                v.swap(rr * cols + t, rr * cols + c);
            }
            for k in 0..cols {
                vi.swap(t * cols + k, c * cols + k);
            }
        }
        // scale column t so the pivot becomes p^val
        let unit = a[r * cols + t] / ipow(p, val);
        let uinv = inv_mod(unit, md).unwrap();
        for rr in 0..rows {
            a[rr * cols + t] = crate::arith::mulmod(a[rr * cols + t], uinv, md);
        }
        for rr in 0..cols {
            v[rr * cols + t] = crate::arith::mulmod(v[rr * cols + t], uinv, md);
        }
        for k in 0..cols {
            vi[t * cols + k] = crate::arith::mulmod(vi[t * cols + k], unit, md);
        }
        // clear the rest of row r with column operations
        let piv = ipow(p, val);
        for c2 in 0..cols {
            if c2 == t {
                continue;
            }
            let x = a[r * cols + c2];
            if x == 0 {
                continue;
            }
            let q = x / piv; // exact: pivot has minimal valuation
            for rr in 0..rows {
                a[rr * cols + c2] = rem(a[rr * cols + c2] - crate::arith::mulmod(q, a[rr * cols + t], md), md);
            }
            for rr in 0..cols {
                v[rr * cols + c2] = rem(v[rr * cols + c2] - crate::arith::mulmod(q, v[rr * cols + t], md), md);
            }
            for k in 0..cols {
                vi[t * cols + k] = rem(vi[t * cols + k] + crate::arith::mulmod(q, vi[c2 * cols + k], md), md);
            }
        }
        // other rows: column t only matters through row ops, which we do not
        // track; zero them since row operations do not change the quotient
        for rr in 0..rows {
            if rr != r {
                let x = a[rr * cols + t];
                if x != 0 {
                    let q = x / piv;
                    for c2 in 0..cols {
                        a[rr * cols + c2] = rem(a[rr * cols + c2] - crate::arith::mulmod(q, a[r * cols + c2], md), md);
                    }
                }
            }
        }
        used_rows[r] = true;
        diag.push(val);
    }
    (diag, v, vi)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgroup {
    pub ambient: GroupType,
    pub lattice: Lattice,
}

#[derive(Serialize, Deserialize)]
struct RawSubgroup {
    ambient: GroupType,
    normal_form: Vec<Vec<i64>>,
    order: u64,
}

impl Serialize for Subgroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.ambient.rank();
        RawSubgroup {
            ambient: self.ambient.clone(),
            normal_form: (0..n).map(|i| self.lattice.row(i).to_vec()).collect(),
            order: self.order(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Subgroup {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSubgroup::deserialize(d)?;
        let s = Subgroup::generated(&raw.ambient, &raw.normal_form);
        if (0..raw.ambient.rank()).any(|i| s.lattice.row(i) != raw.normal_form[i].as_slice()) {
            return Err(serde::de::Error::custom("not a normal form"));
        }
        Ok(s)
    }
}

/// Data describing a quotient map `G → G/S ≅ Q`.
#[derive(Clone, Debug)]
pub struct QuotientData {
    pub quotient: GroupType,
    pub projection: Morphism,
    /// Row `k` is a lift in `G` of the `k`-th generator of `Q`.
    pub section: Vec<Vec<i64>>,
}

/// Isomorphism type of a subgroup with an embedding.
#[derive(Clone, Debug)]
pub struct SubgroupType {
    pub group: GroupType,
    /// Injective homomorphism `group → ambient` with image the subgroup.
    pub embedding: Morphism,
    /// `coords` solves `x = embedding(y)` via `y = x·…`; stored as the
    /// matrix `V` of the Smith step and the diagonal valuations.
    pivot_v: Vec<i64>,
    kept: Vec<usize>,
}

impl Subgroup {
    pub fn trivial(g: &GroupType) -> Self {
        Subgroup { ambient: g.clone(), lattice: Lattice::base(g.moduli()) }
    }

    pub fn whole(g: &GroupType) -> Self {
        let n = g.rank();
        let mut rows = vec![0; n * n];
        for i in 0..n {
            rows[i * n + i] = 1;
        }
        Subgroup { ambient: g.clone(), lattice: Lattice { moduli: g.moduli(), rows } }
    }

    pub fn generated(g: &GroupType, gens: &[Vec<i64>]) -> Self {
        let mut l = Lattice::base(g.moduli());
        for v in gens {
            l.insert(v);
        }
        Subgroup { ambient: g.clone(), lattice: l }
    }

    pub fn log_order(&self) -> u32 {
        let n = self.ambient.rank();
        (0..n)
            .map(|i| self.ambient.lambda[i] - crate::arith::vp(self.lattice.diag(i), self.ambient.p))
            .sum()
    }

    pub fn order(&self) -> u64 {
        self.ambient.p.pow(self.log_order())
    }

    pub fn index(&self) -> u64 {
        self.ambient.order() / self.order()
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.lattice.contains(x)
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        (0..self.ambient.rank()).all(|i| other.contains(self.lattice.row(i)))
    }

    /// Generators as elements of the ambient group (rows of the normal form).
    pub fn generators(&self) -> Vec<Vec<i64>> {
        let n = self.ambient.rank();
        (0..n)
            .map(|i| {
                let mut r = self.lattice.row(i).to_vec();
                self.ambient.reduce(&mut r);
                r
            })
            .filter(|r| r.iter().any(|&x| x != 0))
            .collect()
    }

    pub fn join(&self, other: &Subgroup) -> Subgroup {
        let mut l = self.lattice.clone();
        for i in 0..self.ambient.rank() {
            l.insert(other.lattice.row(i));
        }
        Subgroup { ambient: self.ambient.clone(), lattice: l }
    }

    pub fn meet(&self, other: &Subgroup) -> Subgroup {
        // (u, u) for u in L and (w, 0) for w in L'; rows with zero first block
        // give L ∩ L'.
        let n = self.ambient.rank();
        let mut moduli = self.ambient.moduli();
        moduli.extend(self.ambient.moduli());
        let mut l = Lattice::base(moduli);
        for i in 0..n {
            let u = self.lattice.row(i);
            let mut v = u.to_vec();
            v.extend_from_slice(u);
            l.insert(&v);
            let mut w = other.lattice.row(i).to_vec();
            w.extend(std::iter::repeat(0).take(n));
            l.insert(&w);
        }
        let rows: Vec<i64> = (n..2 * n).flat_map(|i| l.row(i)[n..].to_vec()).collect();
        Subgroup { ambient: self.ambient.clone(), lattice: Lattice { moduli: self.ambient.moduli(), rows } }
    }

    pub fn elements(&self) -> Vec<Vec<i64>> {
        let gens = self.generators();
        let mut seen = HashSet::new();
        let zero = vec![0; self.ambient.rank()];
        seen.insert(zero.clone());
        let mut out = vec![zero];
        let mut i = 0;
        while i < out.len() {
            for g in &gens {
                let mut y: Vec<i64> = out[i].iter().zip(g).map(|(a, b)| a + b).collect();
                self.ambient.reduce(&mut y);
                if seen.insert(y.clone()) {
                    out.push(y);
                }
            }
            i += 1;
        }
        out.sort();
        out
    }

    /// `G/S` with its canonical projection.
    pub fn quotient(&self) -> QuotientData {
        let g = &self.ambient;
        let n = g.rank();
        let big = g.exponent().max(1);
        let (diag, v, vi) = smith_columns(&self.lattice.rows, n, n, g.p, big);
        // keep factors with d_k > 1, sorted by decreasing exponent
        let mut kept: Vec<usize> = (0..n).filter(|&k| diag[k] > 0).collect();
        kept.sort_by(|&a, &b| diag[b].cmp(&diag[a]).then(a.cmp(&b)));
        let q = GroupType { p: g.p, lambda: kept.iter().map(|&k| diag[k]).collect() };
        let qmods = q.moduli();
        let mut m = vec![0i64; q.rank() * n];
        for (qi, &k) in kept.iter().enumerate() {
            for j in 0..n {
                m[qi * n + j] = rem(v[j * n + k], qmods[qi]);
            }
        }
        let projection = Morphism { source: g.clone(), target: q.clone(), m };
        let section = kept
            .iter()
            .map(|&k| {
                let mut r = vi[k * n..(k + 1) * n].to_vec();
                g.reduce(&mut r);
                r
            })
            .collect();
        QuotientData { quotient: q, projection, section }
    }

    pub fn quotient_type(&self) -> GroupType {
        self.quotient().quotient
    }

    /// Isomorphism type of `S` and an embedding `S → G`.
    pub fn subgroup_type(&self) -> SubgroupType {
        let g = &self.ambient;
        let n = g.rank();
        let b = &self.lattice.rows;
        // X with X·B = D (triangular solve, exact over Z)
        let mods = g.moduli();
        let mut x = vec![0i64; n * n];
        for i in 0..n {
            // row i of X: solve x·B = m_i e_i, x upper-triangular support
            let mut target = vec![0i128; n];
            target[i] = mods[i] as i128;
            let mut row = vec![0i128; n];
            for j in 0..n {
                let mut acc = target[j];
                for k in 0..j {
                    acc -= row[k] * b[k * n + j] as i128;
                }
                let d = b[j * n + j] as i128;
                debug_assert_eq!(acc % d, 0);
                row[j] = acc / d;
            }
            for j in 0..n {
                x[i * n + j] = row[j] as i64;
            }
        }
        let big = g.exponent().max(1);
        let (diag, v, vi) = smith_columns(&x, n, n, g.p, big);
        let mut kept: Vec<usize> = (0..n).filter(|&k| diag[k] > 0).collect();
        kept.sort_by(|&a, &c| diag[c].cmp(&diag[a]).then(a.cmp(&c)));
        let s = GroupType { p: g.p, lambda: kept.iter().map(|&k| diag[k]).collect() };
        // generator k of S is row k of V⁻¹·B
        let mut emb = vec![0i64; n * s.rank()];
        for (col, &k) in kept.iter().enumerate() {
            for j in 0..n {
                let mut acc: i128 = 0;
                for l in 0..n {
                    acc += vi[k * n + l] as i128 * b[l * n + j] as i128;
                }
                emb[j * s.rank() + col] = (acc.rem_euclid(mods[j] as i128)) as i64;
            }
        }
        SubgroupType {
            group: s.clone(),
            embedding: Morphism { source: s, target: g.clone(), m: emb },
            pivot_v: v,
            kept,
        }
    }
}

impl SubgroupType {
    /// Coordinates in `group` of an element of the subgroup.
    pub fn coords(&self, sub: &Subgroup, x: &[i64]) -> Option<Vec<i64>> {
        let z = sub.lattice.solve(x)?;
        let n = sub.ambient.rank();
        let mods = self.group.moduli();
        Some(
            self.kept
                .iter()
                .enumerate()
                .map(|(col, &k)| {
                    let acc: i128 = (0..n).map(|l| z[l] as i128 * self.pivot_v[l * n + k] as i128).sum();
                    acc.rem_euclid(mods[col] as i128) as i64
                })
                .collect(),
        )
    }
}

/// Kernel of a homomorphism.
pub fn kernel(f: &Morphism) -> Subgroup {
    let (s, r) = (f.target.rank(), f.source.rank());
    let mut moduli = f.target.moduli();
    moduli.extend(f.source.moduli());
    let mut l = Lattice::base(moduli);
    for j in 0..r {
        let mut v: Vec<i64> = (0..s).map(|i| f.entry(i, j)).collect();
        v.extend((0..r).map(|k| (k == j) as i64));
        l.insert(&v);
    }
    let n = s + r;
    let rows: Vec<i64> = (s..n).flat_map(|i| l.row(i)[s..].to_vec()).collect();
    Subgroup { ambient: f.source.clone(), lattice: Lattice { moduli: f.source.moduli(), rows } }
}

pub fn image(f: &Morphism) -> Subgroup {
    let r = f.source.rank();
    let gens: Vec<Vec<i64>> =
        (0..r).map(|j| (0..f.target.rank()).map(|i| f.entry(i, j)).collect()).collect();
    Subgroup::generated(&f.target, &gens)
}

pub fn preimage(f: &Morphism, t: &Subgroup) -> Subgroup {
    let q = t.quotient();
    kernel(&q.projection.compose(f))
}

/// Image of a subgroup under a homomorphism.
pub fn image_of(f: &Morphism, s: &Subgroup) -> Subgroup {
    let gens: Vec<Vec<i64>> = s.generators().iter().map(|x| f.apply(x)).collect();
    Subgroup::generated(&f.target, &gens)
}

/// `quotient(G, S)`: the isomorphism type of `G/S` and the projection.
pub fn quotient(g: &GroupType, s: &Subgroup) -> Result<(GroupType, Morphism)> {
    if &s.ambient != g {
        return Err(Error::NotASubgroup(format!("subgroup of {} used in {}", s.ambient, g)));
    }
    let q = s.quotient();
    Ok((q.quotient, q.projection))
}

/// Every subgroup exactly once, sorted by (order, normal form).
pub fn enumerate_subgroups(g: &GroupType, order_filter: Option<u64>) -> Result<Vec<Subgroup>> {
    enumerate_subgroups_bounded(g, order_filter, DEFAULT_ORDER_BOUND)
}

pub fn enumerate_subgroups_bounded(g: &GroupType, order_filter: Option<u64>, bound: u64) -> Result<Vec<Subgroup>> {
    g.check_order(bound)?;
    let all = all_subgroups(g);
    Ok(match order_filter {
        Some(o) => all.into_iter().filter(|s| s.order() == o).collect(),
        None => all,
    })
}

fn all_subgroups(g: &GroupType) -> Vec<Subgroup> {
    let mut cyclic = BTreeSet::new();
    for x in g.elements() {
        cyclic.insert(Subgroup::generated(g, &[x]));
    }
    let cyclic: Vec<Subgroup> = cyclic.into_iter().collect();
    let mut seen: HashSet<Subgroup> = HashSet::new();
    let mut queue = VecDeque::new();
    let triv = Subgroup::trivial(g);
    seen.insert(triv.clone());
    queue.push_back(triv);
    while let Some(s) = queue.pop_front() {
        for c in &cyclic {
            if c.is_subgroup_of(&s) {
                continue;
            }
            let j = s.join(c);
            if seen.insert(j.clone()) {
                queue.push_back(j);
            }
        }
    }
    let mut out: Vec<Subgroup> = seen.into_iter().collect();
    out.sort_by(|a, b| (a.order(), &a.lattice).cmp(&(b.order(), &b.lattice)));
    out
}

/// `N(G, n)`: subgroups of index at most `n` with their containment relation.
#[derive(Clone, Debug, Serialize)]
pub struct NormalQuotientPoset {
    pub group: GroupType,
    pub bound: u64,
    pub elements: Vec<Subgroup>,
    /// `relation[i][j]` iff `elements[i] ≤ elements[j]`.
    pub relation: Vec<Vec<bool>>,
}

pub fn normal_quotient_poset(g: &GroupType, n: u64) -> Result<NormalQuotientPoset> {
    let elements: Vec<Subgroup> = enumerate_subgroups(g, None)?.into_iter().filter(|s| s.index() <= n).collect();
    let relation = elements
        .iter()
        .map(|a| elements.iter().map(|b| a.is_subgroup_of(b)).collect())
        .collect();
    Ok(NormalQuotientPoset { group: g.clone(), bound: n, elements, relation })
}
