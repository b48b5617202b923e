//! Data for the transitivity and bijectivity properties of a family whose
//! skeleton is a chain under `≫`.
//!
//! `U_2(G,H) = U(G,H)^2 / Aut(G)` is counted as orbits of pairs under
//! generators of `Aut(G)`, by union-find. Two independent counts back it up:
//! orbits of the stabilizer `Φ(α)` on `U(G,H)`, and for cyclic families the
//! invariant `ξ[α,β] = φ` with `β = φα`, which should biject onto `Aut(H)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{Family, FamilyKind};
use crate::group::{aut_generators, automorphisms, count_epis, enumerate_epis, GroupType, Morphism};

/// Largest `|Aut(G)|` enumerated for the stabilizer count.
const AUT_ENUM_BOUND: usize = 20_000;
/// Largest `|U(G,H)|^2` examined.
const PAIR_BOUND: usize = 4_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairData {
    pub g: GroupType,
    pub h: GroupType,
    pub epis: usize,
    /// `Aut(G)` is transitive on `U(G,H)`.
    pub transitive: bool,
    /// `|U_2(G,H)|` from orbits of pairs.
    pub u2: usize,
    /// `|U(G,H)/Φ(α)|`, when `Aut(G)` was small enough to list.
    pub u2_via_stabilizer: Option<usize>,
    pub aut_h: usize,
    /// `ξ` is well defined and bijective onto `Aut(H)` (cyclic families only).
    pub xi_bijective: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransBijReport {
    pub family: Family,
    pub bound: u64,
    pub chain: Vec<GroupType>,
    pub pairs: Vec<PairData>,
    pub transitive: bool,
    /// For each `H`, the least `G` such that `λ: U_2(G,H) → U_2(G',H)` was
    /// bijective for every tested `G' ≫ G`.
    pub bijective_from: Vec<(GroupType, Option<GroupType>)>,
    pub ok: bool,
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }
    fn find(&mut self, mut a: usize) -> usize {
        while self.0[a] != a {
            self.0[a] = self.0[self.0[a]];
            a = self.0[a];
        }
        a
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        self.0[a.max(b)] = a.min(b);
    }
    /// Component ids numbered `0..k` in order of first appearance.
    fn labels(&mut self) -> (Vec<usize>, usize) {
        let n = self.0.len();
        let mut id = vec![usize::MAX; n];
        let mut out = vec![0; n];
        let mut k = 0;
        for i in 0..n {
            let r = self.find(i);
            if id[r] == usize::MAX {
                id[r] = k;
                k += 1;
            }
            out[i] = id[r];
        }
        (out, k)
    }
}

struct PairOrbits {
    epis: Vec<Morphism>,
    index: std::collections::HashMap<Vec<i64>, usize>,
    /// Orbit id of the pair `(i, j)` at `i * n + j`.
    orbit: Vec<usize>,
    count: usize,
}

fn pair_orbits(g: &GroupType, h: &GroupType) -> Result<(PairOrbits, bool)> {
    let epis = enumerate_epis(g, h);
    let n = epis.len();
    if n * n > PAIR_BOUND {
        return Err(Error::ScaleExceeded { what: format!("pairs in U({g},{h})"), got: (n * n) as u64, bound: PAIR_BOUND as u64 });
    }
    let index: std::collections::HashMap<Vec<i64>, usize> = epis.iter().enumerate().map(|(i, e)| (e.m.clone(), i)).collect();
    let perms: Vec<Vec<usize>> = aut_generators(g)
        .iter()
        .map(|a| epis.iter().map(|e| index[&e.compose(a).m]).collect())
        .collect();
    let mut single = Dsu::new(n);
    let mut pairs = Dsu::new(n * n);
    for perm in &perms {
        for i in 0..n {
            single.union(i, perm[i]);
            for j in 0..n {
                pairs.union(i * n + j, perm[i] * n + perm[j]);
            }
        }
    }
    let transitive = single.labels().1 <= 1;
    let (orbit, count) = pairs.labels();
    Ok((PairOrbits { epis, index, orbit, count }, transitive))
}

/// `|U(G,H)/Φ(α)|` with `Φ(α) = {φ ∈ Aut(G) : αφ = α}` for the first `α`.
fn stabilizer_orbits(g: &GroupType, po: &PairOrbits) -> Result<Option<usize>> {
    if count_epis(g, g) as usize > AUT_ENUM_BOUND {
        return Ok(None);
    }
    let alpha = &po.epis[0];
    let stab: Vec<Morphism> = automorphisms(g)?.into_iter().filter(|phi| alpha.compose(phi) == *alpha).collect();
    let mut dsu = Dsu::new(po.epis.len());
    for phi in &stab {
        for (i, e) in po.epis.iter().enumerate() {
            dsu.union(i, po.index[&e.compose(phi).m]);
        }
    }
    Ok(Some(dsu.labels().1))
}

/// Checks that `[α,β] ↦ φ` (with `β = φα`) is constant on orbits and a
/// bijection from `U_2(G,H)` onto `Aut(H)`.
fn xi_check(h: &GroupType, po: &PairOrbits) -> Result<bool> {
    let auts = automorphisms(h)?;
    let n = po.epis.len();
    let mut xi_of_orbit = vec![usize::MAX; po.count];
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (&po.epis[i], &po.epis[j]);
            let Some(phi) = auts.iter().position(|f| f.compose(a) == *b) else { return Ok(false) };
            let o = po.orbit[i * n + j];
            if xi_of_orbit[o] == usize::MAX {
                xi_of_orbit[o] = phi;
            } else if xi_of_orbit[o] != phi {
                return Ok(false);
            }
        }
    }
    let mut seen = xi_of_orbit.clone();
    seen.sort();
    seen.dedup();
    Ok(seen.len() == po.count && po.count == auts.len())
}

/// `λ: U_2(G,H) → U_2(G',H)` via one `φ ∈ U(G',G)`, checked well defined on
/// every pair and then for bijectivity.
fn lambda_bijective(phi: &Morphism, small: &PairOrbits, big: &PairOrbits) -> bool {
    let n = small.epis.len();
    let nb = big.epis.len();
    let mut image = vec![usize::MAX; small.count];
    for i in 0..n {
        let a = big.index[&small.epis[i].compose(phi).m];
        for j in 0..n {
            let b = big.index[&small.epis[j].compose(phi).m];
            let o = small.orbit[i * n + j];
            let t = big.orbit[a * nb + b];
            if image[o] == usize::MAX {
                image[o] = t;
            } else if image[o] != t {
                return false;
            }
        }
    }
    let mut seen = image;
    seen.sort();
    seen.dedup();
    seen.len() == small.count && small.count == big.count
}

pub fn trans_bij_check(u: &Family, bound: u64) -> Result<TransBijReport> {
    let chain = u.members(bound);
    // members are sorted by order; ≫ must be a total order on them
    for (i, a) in chain.iter().enumerate() {
        for b in &chain[..i] {
            if count_epis(a, b) == 0 {
                return Err(Error::NotAInfinity(u.to_string(), format!("{a} and {b} are incomparable")));
            }
        }
    }
    let cyclic = matches!(u.kind, FamilyKind::CpInf | FamilyKind::Cpn(_));
    let mut pairs = vec![];
    let mut orbits = vec![];
    for (gi, g) in chain.iter().enumerate() {
        let mut row = vec![];
        for h in &chain[..=gi] {
            let (po, transitive) = pair_orbits(g, h)?;
            let xi_bijective = if cyclic { Some(xi_check(h, &po)?) } else { None };
            pairs.push(PairData {
                g: g.clone(),
                h: h.clone(),
                epis: po.epis.len(),
                transitive,
                u2: po.count,
                u2_via_stabilizer: stabilizer_orbits(g, &po)?,
                aut_h: count_epis(h, h) as usize,
                xi_bijective,
            });
            row.push(po);
        }
        orbits.push(row);
    }
    let mut bijective_from = vec![];
    for (hi, h) in chain.iter().enumerate() {
        // ok[gi]: λ from G = chain[gi] is bijective into every larger tested G'
        let mut ok = vec![true; chain.len()];
        for gi in hi..chain.len() {
            for gpi in gi + 1..chain.len() {
                let phi = enumerate_epis(&chain[gpi], &chain[gi]).into_iter().next().expect("chain members surject downwards");
                if !lambda_bijective(&phi, &orbits[gi][hi], &orbits[gpi][hi]) {
                    ok[gi] = false;
                }
            }
        }
        let from = (hi..chain.len()).rev().take_while(|&gi| ok[gi]).last().map(|gi| chain[gi].clone());
        bijective_from.push((h.clone(), from));
    }
    let transitive = pairs.iter().all(|p| p.transitive);
    let ok = transitive
        && pairs.iter().all(|p| p.u2_via_stabilizer.map_or(true, |s| s == p.u2) && p.xi_bijective != Some(false))
        && bijective_from.iter().all(|(_, f)| f.is_some());
    Ok(TransBijReport { family: u.clone(), bound, chain, pairs, transitive, bijective_from, ok })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(p: u64, l: &[u32]) -> GroupType {
        GroupType::new(p, l.to_vec()).unwrap()
    }

    fn pair<'a>(r: &'a TransBijReport, a: &GroupType, b: &GroupType) -> &'a PairData {
        r.pairs.iter().find(|p| p.g == *a && p.h == *b).unwrap()
    }

    #[test]
    fn cyclic_examples() {
        let r = trans_bij_check(&Family::cyclic(2), 16).unwrap();
        assert!(r.ok && r.transitive);
        assert_eq!(pair(&r, &g(2, &[2]), &g(2, &[1])).u2, 1);
        let r = trans_bij_check(&Family::cyclic(3), 27).unwrap();
        let p = pair(&r, &g(3, &[2]), &g(3, &[1]));
        assert_eq!((p.u2, p.aut_h, p.xi_bijective), (2, 2, Some(true)));
        assert!(r.pairs.iter().all(|p| p.u2 == p.aut_h));
    }

    #[test]
    fn elementary_and_failures() {
        let r = trans_bij_check(&Family::elementary(2), 8).unwrap();
        assert!(r.transitive);
        assert!(r.pairs.iter().all(|p| p.u2_via_stabilizer == Some(p.u2)));
        assert!(matches!(trans_bij_check(&Family::exponent(2, 2), 16), Err(Error::NotAInfinity(..))));
        let r = trans_bij_check(&Family::cyclic(5), 1).unwrap();
        assert!(r.ok);
        assert_eq!(r.chain.len(), 1);
    }
}
