//! Ordered-set combinatorics behind the Gröbner argument: `†`-monotone
//! surjections, the category `ℒ†` of labelled ordered sets, lexicographic
//! hom-orderings, good-pair search, and framings of `p`-groups.
//!
//! Maps are stored at the level of sets. A [`DagSurjection`] is a morphism
//! `source → target` of `ℒ†`; the Gröbner category is `ℒ†^op`, so the same
//! value is read as `target → source` there.

mod framing;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use framing::{factor_framing, running_max_labels, tautological_framings, Framing, TAUT_BOUND};

/// A surjection `{0..map.len()} → {0..target}` of totally ordered sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Surjection {
    pub map: Vec<usize>,
    pub target: usize,
}

impl Surjection {
    pub fn new(map: Vec<usize>, target: usize) -> Result<Self> {
        let mut hit = vec![false; target];
        for &y in &map {
            if y >= target {
                return Err(Error::ShapeMismatch(format!("value {y} outside a target of size {target}")));
            }
            hit[y] = true;
        }
        if hit.iter().any(|h| !h) {
            return Err(Error::NotSurjective);
        }
        Ok(Surjection { map, target })
    }

    pub fn identity(n: usize) -> Self {
        Surjection { map: (0..n).collect(), target: n }
    }

    pub fn source(&self) -> usize {
        self.map.len()
    }

    /// `φ†(y) = min φ⁻¹(y)`.
    pub fn dag(&self) -> Vec<usize> {
        let mut out = vec![usize::MAX; self.target];
        for (x, &y) in self.map.iter().enumerate().rev() {
            out[y] = x;
        }
        out
    }

    pub fn is_dag_monotone(&self) -> bool {
        self.dag().windows(2).all(|w| w[0] < w[1])
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &Surjection) -> Result<Surjection> {
        if first.target != self.source() {
            return Err(Error::ShapeMismatch(format!("cannot compose {} -> {} after {} -> {}", self.source(), self.target, first.source(), first.target)));
        }
        Ok(Surjection { map: first.map.iter().map(|&x| self.map[x]).collect(), target: self.target })
    }
}

/// `φ†` with its monotonicity verdict. Also checks `φφ† = 1` and `φ†φ ≤ 1`.
pub fn dagger(phi: &Surjection) -> Result<(Vec<usize>, bool)> {
    let phi = Surjection::new(phi.map.clone(), phi.target)?;
    let d = phi.dag();
    assert!((0..phi.target).all(|y| phi.map[d[y]] == y), "φφ† is the identity");
    assert!((0..phi.source()).all(|x| d[phi.map[x]] <= x), "φ†φ ≤ 1");
    let mono = phi.is_dag_monotone();
    Ok((d, mono))
}

/// `(ψφ)† = φ†ψ†` for composable `†`-monotone `φ: X → Y`, `ψ: Y → Z`.
pub fn compose_check(phi: &Surjection, psi: &Surjection) -> Result<bool> {
    if !phi.is_dag_monotone() || !psi.is_dag_monotone() {
        return Err(Error::NotDagMonotone);
    }
    let comp = psi.after(phi)?;
    let (pd, qd) = (phi.dag(), psi.dag());
    let lhs = comp.dag();
    let rhs: Vec<usize> = qd.iter().map(|&y| pd[y]).collect();
    Ok(lhs == rhs && comp.is_dag_monotone())
}

/// Lexicographic order on surjections with the same source and target.
pub fn lex_compare(phi: &Surjection, psi: &Surjection) -> Result<Ordering> {
    if phi.source() != psi.source() || phi.target != psi.target {
        return Err(Error::ShapeMismatch("surjections between different sets".into()));
    }
    Ok(phi.map.cmp(&psi.map))
}

/// The lexicographically least `(i, j)` with `i < j` and `seq[i] ≤ seq[j]`.
pub fn find_good_pair<T>(seq: &[T], le: impl Fn(&T, &T) -> bool) -> Option<(usize, usize)> {
    (0..seq.len()).find_map(|i| (i + 1..seq.len()).find(|&j| le(&seq[i], &seq[j])).map(|j| (i, j)))
}

/// Product order on `ℕ^k`.
pub fn product_le(a: &[u32], b: &[u32]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Higman order on words: a strictly increasing embedding `a ↪ b` with
/// `a[i] ≤ b[φ(i)]` letterwise. Greedy leftmost matching decides it.
pub fn higman_le<T>(a: &[T], b: &[T], le: impl Fn(&T, &T) -> bool) -> bool {
    higman_embedding(a, b, le).is_some()
}

/// The greedy leftmost embedding, if any.
pub fn higman_embedding<T>(a: &[T], b: &[T], le: impl Fn(&T, &T) -> bool) -> Option<Vec<usize>> {
    let mut out = Vec::with_capacity(a.len());
    let mut j = 0;
    for x in a {
        while j < b.len() && !le(x, &b[j]) {
            j += 1;
        }
        if j == b.len() {
            return None;
        }
        out.push(j);
        j += 1;
    }
    Some(out)
}

/// Indices of a longest nondecreasing subsequence, by patience sorting. The
/// finite stand-in for extracting a very good subsequence.
pub fn longest_nondecreasing<T: Ord>(seq: &[T]) -> Vec<usize> {
    // tails[k]: index ending the best subsequence of length k+1 found so far
    let mut tails: Vec<usize> = vec![];
    let mut prev = vec![usize::MAX; seq.len()];
    for i in 0..seq.len() {
        let k = tails.partition_point(|&t| seq[t] <= seq[i]);
        if k > 0 {
            prev[i] = tails[k - 1];
        }
        if k == tails.len() {
            tails.push(i);
        } else {
            tails[k] = i;
        }
    }
    let mut out = vec![];
    let mut cur = tails.last().copied().unwrap_or(usize::MAX);
    while cur != usize::MAX {
        out.push(cur);
        cur = prev[cur];
    }
    out.reverse();
    out
}

/// A nonempty finite totally ordered set `0 < 1 < … < n−1` with labels `e`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrderedLabeledSet {
    pub e: Vec<u32>,
}

impl OrderedLabeledSet {
    pub fn new(e: Vec<u32>) -> Result<Self> {
        if e.is_empty() {
            return Err(Error::ShapeMismatch("labelled ordered sets are nonempty".into()));
        }
        Ok(OrderedLabeledSet { e })
    }

    pub fn size(&self) -> usize {
        self.e.len()
    }
}

/// A morphism `source → target` of `ℒ†`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DagSurjection {
    pub source: OrderedLabeledSet,
    pub target: OrderedLabeledSet,
    pub map: Vec<usize>,
}

impl DagSurjection {
    /// Surjective, `†`-monotone, and `e_target(φ(x)) ≤ e_source(x)`.
    pub fn is_valid(&self) -> bool {
        if self.map.len() != self.source.size() {
            return false;
        }
        let Ok(s) = Surjection::new(self.map.clone(), self.target.size()) else { return false };
        s.is_dag_monotone() && self.map.iter().enumerate().all(|(x, &y)| self.target.e[y] <= self.source.e[x])
    }

    pub fn surjection(&self) -> Surjection {
        Surjection { map: self.map.clone(), target: self.target.size() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LdagInvariants {
    pub alpha: u32,
    pub beta: u32,
    /// `(e(x), e′(x))` for `x` past the minimum, `e′(x)` the least earlier label.
    pub gamma: Vec<(u32, u32)>,
}

pub fn ldag_invariants(x: &OrderedLabeledSet) -> LdagInvariants {
    let mut gamma = vec![];
    let mut run = x.e[0];
    for &l in &x.e[1..] {
        gamma.push((l, run));
        run = run.min(l);
    }
    LdagInvariants { alpha: x.e[0], beta: *x.e.iter().min().unwrap(), gamma }
}

fn pair_le(a: &(u32, u32), b: &(u32, u32)) -> bool {
    a.0 <= b.0 && a.1 <= b.1
}

/// The preorder on `ℕ² × S(ℕ²)` through which `ℒ†^op` is compared.
pub fn ldag_triple_le(x: &OrderedLabeledSet, y: &OrderedLabeledSet) -> bool {
    let (a, b) = (ldag_invariants(x), ldag_invariants(y));
    a.alpha <= b.alpha && a.beta <= b.beta && higman_le(&a.gamma, &b.gamma, pair_le)
}

/// A morphism `Y → X` built from an embedding of `γ(X)` into `γ(Y)`, or `None`
/// when the invariants of `X` do not lie below those of `Y`.
///
/// Elements of `Y` off the embedding go to the least `x` with `e(x) = β(X)`
/// when they lie past its image, and otherwise to the least `x < x′` with
/// `e(x) = e′(x′)`, where `x′` is the first element embedded above them.
pub fn ldag_construct_morphism(x: &OrderedLabeledSet, y: &OrderedLabeledSet) -> Option<DagSurjection> {
    let (ix, iy) = (ldag_invariants(x), ldag_invariants(y));
    if !(ix.alpha <= iy.alpha && ix.beta <= iy.beta) {
        return None;
    }
    let emb = higman_embedding(&ix.gamma, &iy.gamma, pair_le)?;
    // ψ: X → Y, shifted past the minima
    let mut psi = vec![0usize];
    psi.extend(emb.iter().map(|&j| j + 1));
    let beta_at = x.e.iter().position(|&l| l == ix.beta).unwrap();
    let mut phi = vec![usize::MAX; y.size()];
    for (i, &j) in psi.iter().enumerate() {
        phi[j] = i;
    }
    let last = *psi.last().unwrap();
    for yi in 0..y.size() {
        if phi[yi] != usize::MAX {
            continue;
        }
        phi[yi] = if yi > last {
            beta_at
        } else {
            let xp = psi.iter().position(|&j| j > yi).unwrap();
            let want = ix.gamma[xp - 1].1;
            (0..xp).find(|&i| x.e[i] == want).unwrap()
        };
    }
    let out = DagSurjection { source: y.clone(), target: x.clone(), map: phi };
    debug_assert!(out.is_valid());
    Some(out)
}

/// Every surjection `n → m` (as value lists), in lexicographic order.
pub fn all_surjections(n: usize, m: usize) -> Vec<Surjection> {
    let mut out = vec![];
    if m == 0 || m > n {
        return out;
    }
    let mut cur = vec![0usize; n];
    loop {
        if let Ok(s) = Surjection::new(cur.clone(), m) {
            out.push(s);
        }
        let mut k = n;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            cur[k] += 1;
            if cur[k] < m {
                break;
            }
            cur[k] = 0;
        }
    }
}

/// The `†`-monotone surjections `n → m`. These are the restricted growth
/// strings: each value first appears right after all smaller ones have.
pub fn dag_monotone_surjections(n: usize, m: usize) -> Vec<Surjection> {
    fn rec(n: usize, m: usize, cur: &mut Vec<usize>, top: usize, out: &mut Vec<Surjection>) {
        if cur.len() == n {
            if top == m {
                out.push(Surjection { map: cur.clone(), target: m });
            }
            return;
        }
        // values still to introduce must fit in the remaining slots
        if m - top > n - cur.len() {
            return;
        }
        for v in 0..=top.min(m - 1) {
            cur.push(v);
            rec(n, m, cur, top.max(v + 1), out);
            cur.pop();
        }
    }
    let mut out = vec![];
    if m >= 1 && m <= n {
        rec(n, m, &mut vec![], 0, &mut out);
    }
    out
}

/// `ℒ†` morphisms `x → y`, in lexicographic order.
pub fn ldag_homs(x: &OrderedLabeledSet, y: &OrderedLabeledSet) -> Vec<DagSurjection> {
    dag_monotone_surjections(x.size(), y.size())
        .into_iter()
        .map(|s| DagSurjection { source: x.clone(), target: y.clone(), map: s.map })
        .filter(|d| d.is_valid())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(map: &[usize], t: usize) -> Surjection {
        Surjection::new(map.to_vec(), t).unwrap()
    }

    fn ols(e: &[u32]) -> OrderedLabeledSet {
        OrderedLabeledSet::new(e.to_vec()).unwrap()
    }

    #[test]
    fn dagger_examples() {
        assert_eq!(dagger(&s(&[0, 1, 0], 2)).unwrap(), (vec![0, 1], true));
        assert_eq!(dagger(&Surjection::identity(4)).unwrap(), (vec![0, 1, 2, 3], true));
        assert_eq!(dagger(&s(&[1, 0], 2)).unwrap(), (vec![1, 0], false));
        assert_eq!(dagger(&Surjection { map: vec![0, 0], target: 2 }), Err(Error::NotSurjective));
        assert!(compose_check(&Surjection::identity(3), &Surjection::identity(3)).unwrap());
        assert_eq!(compose_check(&s(&[1, 0], 2), &Surjection::identity(2)), Err(Error::NotDagMonotone));
    }

    #[test]
    fn lex_examples() {
        assert_eq!(lex_compare(&s(&[0, 0, 1], 2), &s(&[0, 1, 0], 2)).unwrap(), Ordering::Less);
        let a = s(&[0, 1, 1], 2);
        assert_eq!(lex_compare(&a, &a).unwrap(), Ordering::Equal);
        assert!(lex_compare(&a, &s(&[0, 1], 2)).is_err());
    }

    #[test]
    fn good_pairs() {
        let v = |r: &[[u32; 2]]| r.iter().map(|x| x.to_vec()).collect::<Vec<_>>();
        let le = |a: &Vec<u32>, b: &Vec<u32>| product_le(a, b);
        assert_eq!(find_good_pair(&v(&[[2, 0], [1, 1], [0, 2], [3, 3]]), le), Some((0, 3)));
        assert_eq!(find_good_pair(&v(&[[0, 0], [1, 0]]), le), Some((0, 1)));
        assert_eq!(find_good_pair(&v(&[[2, 0], [1, 1], [0, 2]]), le), None);
        let words = [vec![3u32, 1], vec![2], vec![1, 4, 1]];
        assert_eq!(find_good_pair(&words, |a, b| higman_le(a, b, |x, y| x <= y)), Some((0, 2)));
        assert_eq!(longest_nondecreasing(&[3, 1, 2, 2, 0, 5]), vec![1, 2, 3, 5]);
    }

    #[test]
    fn invariants() {
        let i = ldag_invariants(&ols(&[2, 1]));
        assert_eq!((i.alpha, i.beta, i.gamma), (2, 1, vec![(1, 2)]));
        let i = ldag_invariants(&ols(&[3]));
        assert_eq!((i.alpha, i.beta, i.gamma.len()), (3, 3, 0));
        let i = ldag_invariants(&ols(&[1, 2, 1]));
        assert_eq!(i.gamma, vec![(2, 1), (1, 1)]);
    }

    #[test]
    fn construct_examples() {
        let m = ldag_construct_morphism(&ols(&[1]), &ols(&[2, 1])).unwrap();
        assert_eq!(m.map, vec![0, 0]);
        let x = ols(&[2, 3, 1]);
        assert_eq!(ldag_construct_morphism(&x, &x).unwrap().map, vec![0, 1, 2]);
        assert!(ldag_construct_morphism(&ols(&[2, 1]), &ols(&[1, 1])).is_none());
        assert!(OrderedLabeledSet::new(vec![]).is_err());
    }

    #[test]
    fn surjection_enumeration() {
        // Stirling numbers times m!
        assert_eq!(all_surjections(4, 2).len(), 14);
        assert_eq!(all_surjections(5, 3).len(), 150);
        assert_eq!(all_surjections(3, 4).len(), 0);
        for n in 1..=6 {
            for m in 1..=n {
                let brute: Vec<Surjection> = all_surjections(n, m).into_iter().filter(|s| s.is_dag_monotone()).collect();
                assert_eq!(dag_monotone_surjections(n, m), brute, "{n} -> {m}");
            }
        }
    }
}
