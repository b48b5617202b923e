//! Tensor products and internal homs of generators.
//!
//! `e_G ⊗ e_H` splits over wide subgroups of `G × H`, and `uHom(e_G, e_H)`
//! over virtual homomorphisms. All groups are abelian, so the conjugation
//! actions that would otherwise produce stabilizer summands are trivial and
//! every decomposition is a plain direct sum.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::{Arc, LazyLock};

use parking_lot::Mutex;

use serde::{Serialize, Serializer};

mod lmn;
mod pullback;
pub use lmn::{lmn_bijections_check, LmnReport};
pub use pullback::{sigma_pullback_check, SigmaPullbackReport};

use crate::error::{Error, Result};
use crate::family::Family;
use crate::group::{count_epis, enumerate_epis, GroupType, Morphism};
use crate::subgroup::{enumerate_subgroups, image_of, kernel, Subgroup};

/// Largest `|G|·|H|` accepted by the enumerations here.
pub const PRODUCT_BOUND: u64 = 1 << 12;

/// A direct product `G_1 × … × G_k` in canonical coordinates.
#[derive(Clone, Debug)]
pub struct Product {
    pub factors: Vec<GroupType>,
    pub group: GroupType,
    /// `pos[i][c]`: coordinate of `(factor i, coordinate c)` in `group`.
    pos: Vec<Vec<usize>>,
}

impl Product {
    pub fn new(factors: &[GroupType]) -> Self {
        let p = factors[0].p;
        let mut slots: Vec<(u32, usize, usize)> = vec![];
        for (i, f) in factors.iter().enumerate() {
            for (c, &l) in f.lambda.iter().enumerate() {
                slots.push((l, i, c));
            }
        }
        // stable sort by decreasing exponent, as in GroupType::new
        slots.sort_by(|a, b| b.0.cmp(&a.0));
        let mut pos: Vec<Vec<usize>> = factors.iter().map(|f| vec![0; f.rank()]).collect();
        for (k, &(_, i, c)) in slots.iter().enumerate() {
            pos[i][c] = k;
        }
        let group = GroupType { p, lambda: slots.iter().map(|s| s.0).collect() };
        Product { factors: factors.to_vec(), group, pos }
    }

    pub fn embed(&self, parts: &[&[i64]]) -> Vec<i64> {
        let mut x = vec![0; self.group.rank()];
        for (i, part) in parts.iter().enumerate() {
            for (c, &v) in part.iter().enumerate() {
                x[self.pos[i][c]] = v;
            }
        }
        x
    }

    pub fn part(&self, x: &[i64], i: usize) -> Vec<i64> {
        self.pos[i].iter().map(|&k| x[k]).collect()
    }

    pub fn inclusion(&self, i: usize) -> Morphism {
        let (r, s) = (self.group.rank(), self.factors[i].rank());
        let mut m = vec![0; r * s];
        for c in 0..s {
            m[self.pos[i][c] * s + c] = 1;
        }
        Morphism { source: self.factors[i].clone(), target: self.group.clone(), m }
    }

    pub fn projection(&self, i: usize) -> Morphism {
        let (r, s) = (self.factors[i].rank(), self.group.rank());
        let mut m = vec![0; r * s];
        for c in 0..r {
            m[c * s + self.pos[i][c]] = 1;
        }
        Morphism { source: self.group.clone(), target: self.factors[i].clone(), m }
    }

    /// The subgroup `1 × … × G_i × … × 1`.
    pub fn factor(&self, i: usize) -> Subgroup {
        image_of(&self.inclusion(i), &Subgroup::whole(&self.factors[i]))
    }

    /// The homomorphism `Π G_i → target` given by one map per factor.
    pub fn hom_from_factors(&self, maps: &[Morphism], target: &GroupType) -> Morphism {
        let (r, s) = (target.rank(), self.group.rank());
        let mut m = vec![0; r * s];
        for (i, f) in maps.iter().enumerate() {
            for c in 0..self.factors[i].rank() {
                for row in 0..r {
                    m[row * s + self.pos[i][c]] = f.entry(row, c);
                }
            }
        }
        Morphism { source: self.group.clone(), target: target.clone(), m }
    }
}

fn sub_morphisms(a: &Morphism, b: &Morphism) -> Morphism {
    let mods = a.target.moduli();
    let s = a.source.rank();
    let m = a.m.iter().zip(&b.m).enumerate().map(|(k, (x, y))| (x - y).rem_euclid(mods[k / s])).collect();
    Morphism { source: a.source.clone(), target: a.target.clone(), m }
}

fn check_product(g: &GroupType, h: &GroupType) -> Result<()> {
    if g.p != h.p {
        return Err(Error::ShapeMismatch(format!("{g} and {h} have different primes")));
    }
    let n = g.order().saturating_mul(h.order());
    if n > PRODUCT_BOUND {
        return Err(Error::ScaleExceeded { what: "|G||H|".into(), got: n, bound: PRODUCT_BOUND });
    }
    Ok(())
}

/// `H(N_1, α, N_2) ≤ G × H` with its classifying triple.
#[derive(Clone, Debug, Serialize)]
pub struct WideSubgroup {
    pub left: GroupType,
    pub right: GroupType,
    pub n1: Subgroup,
    pub n2: Subgroup,
    /// `α` as an automorphism of the standard form of `G/N_1 ≅ H/N_2`.
    pub alpha: Morphism,
    /// The subgroup itself, in the coordinates of [`Product`] `(G, H)`.
    pub embedded: Subgroup,
    /// Isomorphism type of the subgroup.
    pub group: GroupType,
    pub spread_left: GroupType,
    pub spread_right: GroupType,
}

fn quotients_by_type(g: &GroupType) -> Result<BTreeMap<GroupType, Vec<(Subgroup, Morphism)>>> {
    let mut out: BTreeMap<GroupType, Vec<(Subgroup, Morphism)>> = BTreeMap::new();
    for n in enumerate_subgroups(g, None)? {
        let q = n.quotient();
        out.entry(q.quotient).or_default().push((n, q.projection));
    }
    Ok(out)
}

/// Every wide subgroup of `G × H`, in order of (spread, `N_1`, `N_2`, `α`).
pub fn wide_subgroups(g: &GroupType, h: &GroupType) -> Result<Vec<WideSubgroup>> {
    check_product(g, h)?;
    let prod = Product::new(&[g.clone(), h.clone()]);
    let (qg, qh) = (quotients_by_type(g)?, quotients_by_type(h)?);
    let (pg, ph) = (prod.projection(0), prod.projection(1));
    let mut out = vec![];
    for (q, lefts) in &qg {
        let Some(rights) = qh.get(q) else { continue };
        let auts = enumerate_epis(q, q);
        for (n1, p1) in lefts {
            let f1 = p1.compose(&pg);
            for (n2, p2) in rights {
                let f2 = p2.compose(&ph);
                for a in &auts {
                    let w = kernel(&sub_morphisms(&a.compose(&f1), &f2));
                    out.push(WideSubgroup {
                        left: g.clone(),
                        right: h.clone(),
                        n1: n1.clone(),
                        n2: n2.clone(),
                        alpha: a.clone(),
                        group: w.subgroup_type().group,
                        embedded: w,
                        spread_left: q.clone(),
                        spread_right: q.clone(),
                    });
                }
            }
        }
    }
    Ok(out)
}

/// `Wide(G, H)`: wide subgroups of `G × H` lying in `u`, deduplicated by
/// normal form.
pub fn enumerate_wide(g: &GroupType, h: &GroupType, u: &Family) -> Result<Vec<WideSubgroup>> {
    let mut seen = HashSet::new();
    Ok(wide_subgroups(g, h)?
        .into_iter()
        .filter(|w| u.contains(&w.group))
        .filter(|w| seen.insert(w.embedded.clone()))
        .collect())
}

/// `|Wide(G, H)|` over all wide subgroups, from the triple classification:
/// `Σ |Aut Q|` over pairs `(N_1, N_2)` with `G/N_1 ≅ H/N_2 ≅ Q`.
pub fn count_wide(g: &GroupType, h: &GroupType) -> Result<u64> {
    let count = |x: &GroupType| -> Result<BTreeMap<GroupType, u64>> {
        let mut m = BTreeMap::new();
        for n in enumerate_subgroups(x, None)? {
            *m.entry(n.quotient_type()).or_insert(0) += 1;
        }
        Ok(m)
    };
    let (a, b) = (count(g)?, count(h)?);
    Ok(a.iter().filter_map(|(q, x)| b.get(q).map(|y| x * y * count_epis(q, q))).sum())
}

/// A multiset of generators `⊕ e_{G_i}^{m_i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub family: Family,
    pub summands: Vec<(GroupType, usize)>,
}

impl Decomposition {
    fn from_groups(family: &Family, groups: impl IntoIterator<Item = GroupType>) -> Self {
        let mut m: BTreeMap<GroupType, usize> = BTreeMap::new();
        for g in groups {
            *m.entry(g).or_insert(0) += 1;
        }
        Decomposition { family: family.clone(), summands: m.into_iter().collect() }
    }

    pub fn groups(&self) -> Vec<GroupType> {
        self.summands.iter().flat_map(|(g, m)| std::iter::repeat(g.clone()).take(*m)).collect()
    }

    /// `Σ m_i |Epi(T, G_i)|`.
    pub fn dim_at(&self, t: &GroupType) -> u64 {
        self.summands.iter().map(|(g, m)| *m as u64 * count_epis(t, g)).sum()
    }
}

#[derive(Serialize)]
struct SummandOut<'a> {
    group: String,
    key: String,
    multiplicity: usize,
    #[serde(skip)]
    _g: std::marker::PhantomData<&'a ()>,
}

impl Serialize for Decomposition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out<'a> {
            summands: Vec<SummandOut<'a>>,
            family: String,
        }
        Out {
            summands: self
                .summands
                .iter()
                .map(|(g, m)| SummandOut { group: g.to_string(), key: g.key(), multiplicity: *m, _g: Default::default() })
                .collect(),
            family: self.family.id(),
        }
        .serialize(s)
    }
}

/// `e_G ⊗ e_H = ⊕_{W ∈ Wide(G,H)} e_W`.
pub fn tensor_decompose(g: &GroupType, h: &GroupType, u: &Family) -> Result<Decomposition> {
    u.check_member(g)?;
    u.check_member(h)?;
    Ok(Decomposition::from_groups(u, enumerate_wide(g, h, u)?.into_iter().map(|w| w.group)))
}

/// A pair `(A, A')` with `A ≤ G × H` wide, `A' ≤ A`, `A' ∩ (1 × H) = 1` and
/// `A/A'` in the family.
#[derive(Clone, Debug, Serialize)]
pub struct VirtualHom {
    pub a: WideSubgroup,
    pub a_prime: Subgroup,
    pub spread: GroupType,
    /// `A'` inside the abstract group of `A`.
    #[serde(skip)]
    inner: Subgroup,
}

/// `VHom(G, H)`. `A` itself is not required to lie in `u`.
pub fn enumerate_vhom(g: &GroupType, h: &GroupType, u: &Family) -> Result<Vec<VirtualHom>> {
    let prod = Product::new(&[g.clone(), h.clone()]);
    let right = prod.factor(1);
    let mut out = vec![];
    for a in wide_subgroups(g, h)? {
        let st = a.embedded.subgroup_type();
        for s in enumerate_subgroups(&st.group, None)? {
            let ap = image_of(&st.embedding, &s);
            if ap.meet(&right).order() != 1 {
                continue;
            }
            let spread = s.quotient_type();
            if !u.contains(&spread) {
                continue;
            }
            out.push(VirtualHom { a: a.clone(), a_prime: ap, spread, inner: s });
        }
    }
    Ok(out)
}

type VhomKey = (GroupType, GroupType, Family);
static VHOM_MEMO: LazyLock<Mutex<HashMap<VhomKey, Arc<Vec<VirtualHom>>>>> = LazyLock::new(Default::default);

/// [`enumerate_vhom`], remembered for the lifetime of the process.
pub fn vhoms(g: &GroupType, h: &GroupType, u: &Family) -> Result<Arc<Vec<VirtualHom>>> {
    let key = (g.clone(), h.clone(), u.clone());
    if let Some(v) = VHOM_MEMO.lock().get(&key) {
        return Ok(v.clone());
    }
    let v = Arc::new(enumerate_vhom(g, h, u)?);
    VHOM_MEMO.lock().insert(key, v.clone());
    Ok(v)
}

/// `uHom(e_G, e_H) = ⊕_{(A,A') ∈ VHom(G,H)} e_{A/A'}`.
pub fn hom_decompose(g: &GroupType, h: &GroupType, u: &Family) -> Result<Decomposition> {
    if !u.global_multiplicative() {
        return Err(Error::FamilyNotGlobalMultiplicative(u.to_string()));
    }
    u.check_member(g)?;
    u.check_member(h)?;
    Ok(Decomposition::from_groups(u, vhoms(g, h, u)?.iter().map(|v| v.spread.clone())))
}

/// `dim uHom(e_G, e_H)(T) = dim A(e_T ⊗ e_G, e_H) = Σ_{W ∈ Wide(T,G)} |Epi(W, H)|`.
pub fn hom_eval_oracle(g: &GroupType, h: &GroupType, t: &GroupType, u: &Family) -> Result<u64> {
    for x in [g, h, t] {
        u.check_member(x)?;
    }
    Ok(enumerate_wide(t, g, u)?.iter().map(|w| count_epis(&w.group, h)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(p: u64, l: &[u32]) -> GroupType {
        GroupType::new(p, l.to_vec()).unwrap()
    }

    #[test]
    fn product_coordinates() {
        let pr = Product::new(&[g(2, &[1]), g(2, &[2, 1])]);
        assert_eq!(pr.group, g(2, &[2, 1, 1]));
        let x = pr.embed(&[&[1], &[3, 0]]);
        assert_eq!(pr.part(&x, 0), vec![1]);
        assert_eq!(pr.part(&x, 1), vec![3, 0]);
        assert_eq!(pr.projection(1).compose(&pr.inclusion(1)), Morphism::identity(&g(2, &[2, 1])));
        assert_eq!(pr.factor(0).order(), 2);
    }

    #[test]
    fn wide_examples() {
        let (c2, c4) = (g(2, &[1]), g(2, &[2]));
        let all = Family::all(2);
        let w = enumerate_wide(&c4, &c2, &all).unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(enumerate_wide(&c4, &c2, &Family::cyclic(2)).unwrap().len(), 1);
        assert_eq!(enumerate_wide(&c4, &GroupType::trivial(2), &all).unwrap().len(), 1);
        let d = tensor_decompose(&c2, &c4, &all).unwrap();
        assert_eq!(d.groups(), vec![c4.clone(), g(2, &[2, 1])]);
        assert_eq!(tensor_decompose(&c2, &c2, &all).unwrap().groups(), vec![c2.clone(), g(2, &[1, 1])]);
        assert_eq!(tensor_decompose(&c2, &c4, &Family::cyclic(2)).unwrap().groups(), vec![c4]);
    }

    #[test]
    fn wide_subgroups_are_wide_and_distinct() {
        let all = Family::all(2);
        for a in all.members(8) {
            for b in all.members(8) {
                let ws = wide_subgroups(&a, &b).unwrap();
                let pr = Product::new(&[a.clone(), b.clone()]);
                let distinct: HashSet<&Subgroup> = ws.iter().map(|w| &w.embedded).collect();
                assert_eq!(distinct.len(), ws.len());
                assert_eq!(ws.len() as u64, count_wide(&a, &b).unwrap());
                for w in &ws {
                    assert!(image_of(&pr.projection(0), &w.embedded) == Subgroup::whole(&a));
                    assert!(image_of(&pr.projection(1), &w.embedded) == Subgroup::whole(&b));
                    assert_eq!(w.embedded.meet(&pr.factor(0)), image_of(&pr.inclusion(0), &w.n1));
                }
            }
        }
    }

    #[test]
    fn vhom_examples() {
        let all = Family::all(2);
        let (c2, one) = (g(2, &[1]), GroupType::trivial(2));
        let v = enumerate_vhom(&one, &g(2, &[2, 1]), &all).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].spread, g(2, &[2, 1]));
        let v = enumerate_vhom(&g(2, &[1, 1]), &one, &all).unwrap();
        assert_eq!(v.len(), enumerate_subgroups(&g(2, &[1, 1]), None).unwrap().len());
        let d = hom_decompose(&c2, &c2, &all).unwrap();
        assert_eq!(d.groups(), vec![one.clone(), c2.clone(), c2.clone(), c2.clone(), g(2, &[1, 1])]);
        assert_eq!(d.dim_at(&c2), 4);
        assert_eq!(d.dim_at(&g(2, &[1, 1])), 16);
        assert_eq!(hom_decompose(&c2, &one, &all).unwrap().groups(), vec![one.clone(), c2.clone()]);
        assert_eq!(hom_decompose(&one, &c2, &all).unwrap().groups(), vec![c2.clone()]);
        assert!(matches!(hom_decompose(&c2, &c2, &Family::cyclic(2)), Err(Error::FamilyNotGlobalMultiplicative(_))));
    }

    #[test]
    fn hom_oracle_examples() {
        let all = Family::all(2);
        let c2 = g(2, &[1]);
        assert_eq!(hom_eval_oracle(&c2, &c2, &c2, &all).unwrap(), 4);
        assert_eq!(hom_eval_oracle(&c2, &c2, &g(2, &[1, 1]), &all).unwrap(), 16);
        let one = GroupType::trivial(2);
        let c4 = g(2, &[2]);
        assert_eq!(hom_eval_oracle(&c4, &c2, &one, &all).unwrap(), count_epis(&c4, &c2));
    }

    #[test]
    fn cyclic_wide_are_graphs() {
        let cyc = Family::cyclic(2);
        for a in cyc.members(16) {
            for b in cyc.members(16) {
                if a.order() < b.order() {
                    continue;
                }
                for w in enumerate_wide(&a, &b, &cyc).unwrap() {
                    assert!(w.n2.order() == 1 && w.group == a);
                }
            }
        }
    }
}
