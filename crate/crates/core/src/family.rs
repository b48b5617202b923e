//! Families of finite abelian p-groups (full subcategories of the category of
//! groups and surjections).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::is_prime;
use crate::error::{Error, Result};
use crate::group::{enumerate_epis, GroupType, Morphism};
use crate::subgroup::{enumerate_subgroups, quotient, Subgroup};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    /// All abelian p-groups.
    ZpInf,
    /// Exponent dividing `p^n`.
    Zpn(u32),
    /// Cyclic groups.
    CpInf,
    /// Cyclic groups of order dividing `p^n`.
    Cpn(u32),
    /// Free `Z/p^n`-modules.
    Fpn(u32),
    /// Elementary abelian groups.
    Ep,
    /// Members of the base family of order at most the bound.
    TruncatedLeq(Box<Family>, u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Family {
    pub p: u64,
    pub kind: FamilyKind,
}

impl Family {
    pub fn new(p: u64, kind: FamilyKind) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::ParseError { pos: 0, msg: format!("{p} is not prime") });
        }
        match &kind {
            FamilyKind::Zpn(0) | FamilyKind::Cpn(0) | FamilyKind::Fpn(0) => {
                return Err(Error::ParseError { pos: 0, msg: "n must be positive".into() })
            }
            FamilyKind::TruncatedLeq(b, _) if b.p != p => {
                return Err(Error::ParseError { pos: 0, msg: "prime mismatch".into() })
            }
            _ => {}
        }
        Ok(Family { p, kind })
    }

    pub fn all(p: u64) -> Self {
        Family { p, kind: FamilyKind::ZpInf }
    }
    pub fn cyclic(p: u64) -> Self {
        Family { p, kind: FamilyKind::CpInf }
    }
    pub fn elementary(p: u64) -> Self {
        Family { p, kind: FamilyKind::Ep }
    }
    pub fn free(p: u64, n: u32) -> Self {
        Family { p, kind: FamilyKind::Fpn(n) }
    }
    pub fn exponent(p: u64, n: u32) -> Self {
        Family { p, kind: FamilyKind::Zpn(n) }
    }
    pub fn truncated(&self, bound: u64) -> Self {
        Family { p: self.p, kind: FamilyKind::TruncatedLeq(Box::new(self.clone()), bound) }
    }

    pub fn contains(&self, g: &GroupType) -> bool {
        if g.p != self.p {
            return false;
        }
        match &self.kind {
            FamilyKind::ZpInf => true,
            FamilyKind::Zpn(n) => g.exponent() <= *n,
            FamilyKind::CpInf => g.is_cyclic(),
            FamilyKind::Cpn(n) => g.is_cyclic() && g.exponent() <= *n,
            FamilyKind::Fpn(n) => g.lambda.iter().all(|l| l == n),
            FamilyKind::Ep => g.exponent() <= 1,
            FamilyKind::TruncatedLeq(b, bound) => g.order() <= *bound && b.contains(g),
        }
    }

    pub fn check_member(&self, g: &GroupType) -> Result<()> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(Error::NotInFamily { group: g.to_string(), family: self.to_string() })
        }
    }

    /// Closed under wide subgroups of products.
    pub fn widely_closed(&self) -> bool {
        matches!(self.kind, FamilyKind::ZpInf | FamilyKind::Zpn(_) | FamilyKind::Ep)
    }

    /// Closed under finite products.
    pub fn multiplicative(&self) -> bool {
        matches!(self.kind, FamilyKind::ZpInf | FamilyKind::Zpn(_) | FamilyKind::Ep | FamilyKind::Fpn(_))
    }

    pub fn subgroup_closed(&self) -> bool {
        match &self.kind {
            FamilyKind::Fpn(_) => false,
            FamilyKind::TruncatedLeq(b, _) => b.subgroup_closed(),
            _ => true,
        }
    }

    /// Closed under quotients.
    pub fn downward_closed(&self) -> bool {
        match &self.kind {
            FamilyKind::Fpn(_) => false,
            FamilyKind::TruncatedLeq(b, _) => b.downward_closed(),
            _ => true,
        }
    }

    pub fn global_multiplicative(&self) -> bool {
        self.multiplicative() && self.subgroup_closed() && self.downward_closed()
    }

    pub fn expansive(&self) -> bool {
        matches!(self.kind, FamilyKind::Ep | FamilyKind::Fpn(_) | FamilyKind::Zpn(_))
    }

    /// Bound on the exponent of members, if any.
    pub fn exponent_bound(&self) -> Option<u32> {
        match &self.kind {
            FamilyKind::ZpInf | FamilyKind::CpInf => None,
            FamilyKind::Zpn(n) | FamilyKind::Cpn(n) | FamilyKind::Fpn(n) => Some(*n),
            FamilyKind::Ep => Some(1),
            FamilyKind::TruncatedLeq(b, bound) => {
                let cap = (*bound as f64).log(self.p as f64).floor() as u32 + 1;
                Some(b.exponent_bound().map_or(cap, |e| e.min(cap)))
            }
        }
    }

    /// All members of order at most `bound`, sorted.
    pub fn members(&self, bound: u64) -> Vec<GroupType> {
        let mut out = vec![];
        let mut parts = vec![];
        partitions(self.p, bound, u32::MAX, &mut parts, &mut out);
        out.retain(|g| self.contains(g));
        out.sort();
        out
    }

    /// Members with at most `max_rank` cyclic factors and order at most `bound`.
    pub fn members_by_rank(&self, max_rank: usize, bound: u64) -> Vec<GroupType> {
        self.members(bound).into_iter().filter(|g| g.rank() <= max_rank).collect()
    }

    /// Identifier used on the command line.
    pub fn id(&self) -> String {
        match &self.kind {
            FamilyKind::ZpInf => format!("Z{}inf", self.p),
            FamilyKind::Zpn(n) => format!("Zpn:{},{}", self.p, n),
            FamilyKind::CpInf => format!("Cpinf:{}", self.p),
            FamilyKind::Cpn(n) => format!("Cpn:{},{}", self.p, n),
            FamilyKind::Fpn(n) => format!("Fpn:{},{}", self.p, n),
            FamilyKind::Ep => format!("Ep:{}", self.p),
            FamilyKind::TruncatedLeq(b, n) => format!("{}<={}", b.id(), n),
        }
    }
}

fn partitions(p: u64, bound: u64, max_part: u32, cur: &mut Vec<u32>, out: &mut Vec<GroupType>) {
    out.push(GroupType { p, lambda: cur.clone() });
    let order: u64 = p.pow(cur.iter().sum());
    let mut k = 1;
    while k <= max_part && order.saturating_mul(p.saturating_pow(k)) <= bound {
        cur.push(k);
        partitions(p, bound, k, cur, out);
        cur.pop();
        k += 1;
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.p;
        match &self.kind {
            FamilyKind::ZpInf => write!(f, "Z[{p}^inf]"),
            FamilyKind::Zpn(n) => write!(f, "Z[{p}^{n}]"),
            FamilyKind::CpInf => write!(f, "C[{p}^inf]"),
            FamilyKind::Cpn(n) => write!(f, "C[{p}^{n}]"),
            FamilyKind::Fpn(n) => write!(f, "F[{p}^{n}]"),
            FamilyKind::Ep => write!(f, "E[{p}]"),
            FamilyKind::TruncatedLeq(b, n) => write!(f, "{b}<={n}"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    /// `Z2inf`, `Z3inf`, `Zpn:p,n`, `Cpinf:p`, `Cpn:p,n`, `Fpn:p,n`, `Ep:p`, with
    /// an optional `<=N` suffix for truncation.
    fn from_str(s: &str) -> Result<Self> {
        let err = |pos: usize, msg: &str| Error::ParseError { pos, msg: msg.to_string() };
        if let Some(i) = s.find("<=") {
            let base: Family = s[..i].parse()?;
            let n: u64 = s[i + 2..].trim().parse().map_err(|_| err(i + 2, "expected an order bound"))?;
            return Ok(base.truncated(n));
        }
        let nums = |rest: &str, off: usize| -> Result<Vec<u64>> {
            rest.split(',')
                .map(|t| t.trim().parse::<u64>().map_err(|_| err(off, "expected integer")))
                .collect()
        };
        let (head, rest) = match s.find(':') {
            Some(i) => (&s[..i], Some((&s[i + 1..], i + 1))),
            None => (s, None),
        };
        let fam = match (head, rest) {
            (h, None) if h.starts_with('Z') && h.ends_with("inf") => {
                let p: u64 = h[1..h.len() - 3].parse().map_err(|_| err(1, "expected prime"))?;
                Family::new(p, FamilyKind::ZpInf)?
            }
            ("Zpinf", Some((r, o))) => Family::new(one(nums(r, o)?, o)?, FamilyKind::ZpInf)?,
            ("Cpinf", Some((r, o))) => Family::new(one(nums(r, o)?, o)?, FamilyKind::CpInf)?,
            ("Ep", Some((r, o))) => Family::new(one(nums(r, o)?, o)?, FamilyKind::Ep)?,
            ("Zpn" | "Cpn" | "Fpn", Some((r, o))) => {
                let v = nums(r, o)?;
                if v.len() != 2 {
                    return Err(err(o, "expected p,n"));
                }
                let n = v[1] as u32;
                let kind = match head {
                    "Zpn" => FamilyKind::Zpn(n),
                    "Cpn" => FamilyKind::Cpn(n),
                    _ => FamilyKind::Fpn(n),
                };
                Family::new(v[0], kind)?
            }
            _ => return Err(err(0, &format!("unknown family '{s}'"))),
        };
        Ok(fam)
    }
}

fn one(v: Vec<u64>, off: usize) -> Result<u64> {
    if v.len() == 1 {
        Ok(v[0])
    } else {
        Err(Error::ParseError { pos: off, msg: "expected a single prime".into() })
    }
}

impl Serialize for Family {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.id())
    }
}

impl<'de> Deserialize<'de> for Family {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Quotient of `g` by the intersection of the kernels of all surjections onto
/// members of `u` of order at most `n`.
pub fn q_leq_n(g: &GroupType, n: u64, u: &Family) -> Result<(GroupType, Morphism)> {
    if !(u.multiplicative() && u.subgroup_closed()) {
        return Err(Error::FamilyNotSubmultiplicative(u.to_string()));
    }
    let mut meet = Subgroup::whole(g);
    for s in enumerate_subgroups(g, None)? {
        if s.index() <= n && u.contains(&s.quotient_type()) {
            meet = meet.meet(&s);
        }
    }
    quotient(g, &meet)
}

/// Given surjections `alpha: A → C` and `beta: B → C` with `A` free over
/// `Z/p^n`, `B` of exponent at most `p^n` and `rank A ≥ rank B`, returns a
/// surjection `gamma: A → B` with `beta ∘ gamma = alpha`.
pub fn lift_epi(alpha: &Morphism, beta: &Morphism) -> Result<Morphism> {
    let (a, b) = (&alpha.source, &beta.source);
    if alpha.target != beta.target {
        return Err(Error::ShapeMismatch("lift_epi: targets differ".into()));
    }
    if !alpha.is_surjective() || !beta.is_surjective() {
        return Err(Error::NotSurjective);
    }
    let n = a.exponent();
    if !a.lambda.iter().all(|&l| l == n) || b.exponent() > n || a.rank() < b.rank() {
        return Err(Error::ShapeMismatch("lift_epi: needs A free, exp B ≤ exp A, rank A ≥ rank B".into()));
    }
    let bel = b.elements();
    // preimages of each element of C, and the kernel of beta
    let mut pre: std::collections::HashMap<Vec<i64>, Vec<i64>> = Default::default();
    let mut kern = vec![];
    for x in &bel {
        let y = beta.apply(x);
        if y.iter().all(|&c| c == 0) {
            kern.push(x.clone());
        }
        pre.entry(y).or_insert_with(|| x.clone());
    }
    let m = a.rank();
    let base: Vec<Vec<i64>> = (0..m)
        .map(|j| {
            let e: Vec<i64> = (0..m).map(|k| (k == j) as i64).collect();
            pre[&alpha.apply(&e)].clone()
        })
        .collect();
    // pick a kernel correction per generator so the images span B mod p
    let build = |choice: &[usize]| -> Morphism {
        let r = b.rank();
        let mut mat = vec![0i64; r * m];
        for j in 0..m {
            let mut v: Vec<i64> = base[j].iter().zip(&kern[choice[j]]).map(|(x, y)| x + y).collect();
            b.reduce(&mut v);
            for i in 0..r {
                mat[i * m + j] = v[i];
            }
        }
        Morphism { source: a.clone(), target: b.clone(), m: mat }
    };
    let mut choice = vec![0usize; m];
    fn search(j: usize, choice: &mut Vec<usize>, k: usize, done: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if j == choice.len() {
            return done(choice);
        }
        for c in 0..k {
            choice[j] = c;
            if search(j + 1, choice, k, done) {
                return true;
            }
        }
        false
    }
    let mut found = None;
    let k = kern.len();
    search(0, &mut choice, k, &mut |c| {
        let g = build(c);
        if g.is_surjective() {
            found = Some(g);
            true
        } else {
            false
        }
    });
    found.ok_or(Error::NotSurjective)
}

/// Brute-force reference: some epi `A → B` over `C`, if one exists.
pub fn lift_epi_brute(alpha: &Morphism, beta: &Morphism) -> Option<Morphism> {
    enumerate_epis(&alpha.source, &beta.source)
        .into_iter()
        .find(|g| beta.compose(g) == *alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(p: u64, l: &[u32]) -> GroupType {
        GroupType::new(p, l.to_vec()).unwrap()
    }

    #[test]
    fn membership() {
        assert!(Family::cyclic(2).contains(&g(2, &[2])));
        assert!(!Family::cyclic(2).contains(&g(2, &[1, 1])));
        assert!(!Family::free(2, 2).contains(&g(2, &[2, 1])));
        assert!(Family::free(2, 2).contains(&g(2, &[2, 2])));
        for f in ["Z2inf", "Zpn:2,2", "Cpinf:3", "Fpn:2,2", "Ep:3", "Cpn:2,3"] {
            let fam: Family = f.parse().unwrap();
            assert!(fam.contains(&GroupType::trivial(fam.p)));
            assert_eq!(fam.id(), f);
            assert_eq!(fam.id().parse::<Family>().unwrap(), fam);
        }
        assert!("Q2".parse::<Family>().is_err());
        assert!("Cpinf:6".parse::<Family>().is_err());
    }

    #[test]
    fn members_listing() {
        let m = Family::all(2).members(16);
        assert_eq!(m.len(), 1 + 1 + 2 + 3 + 5);
        assert_eq!(Family::elementary(3).members(81).len(), 5);
        assert_eq!(Family::cyclic(2).members(32).len(), 6);
    }

    #[test]
    fn q_leq_n_examples() {
        let z = Family::all(2);
        assert_eq!(q_leq_n(&g(2, &[2]), 2, &z).unwrap().0, g(2, &[1]));
        assert_eq!(q_leq_n(&g(2, &[2]), 4, &z).unwrap().0, g(2, &[2]));
        assert_eq!(q_leq_n(&g(2, &[1, 1, 1]), 2, &z).unwrap().0, g(2, &[1, 1, 1]));
        assert!(matches!(q_leq_n(&g(2, &[2]), 2, &Family::cyclic(2)), Err(Error::FamilyNotSubmultiplicative(_))));
        for grp in Family::all(2).members(32) {
            let (q, _) = q_leq_n(&grp, 4, &z).unwrap();
            assert_eq!(q_leq_n(&q, 4, &z).unwrap().0, q);
        }
    }

    #[test]
    fn dotted_arrow() {
        for (a, b, c) in [
            (g(2, &[2, 2]), g(2, &[2, 1]), g(2, &[1])),
            (g(2, &[1, 1, 1]), g(2, &[1, 1]), g(2, &[1])),
            (g(2, &[2, 2]), g(2, &[2]), g(2, &[2])),
            (g(3, &[1, 1]), g(3, &[1, 1]), g(3, &[1])),
        ] {
            for alpha in enumerate_epis(&a, &c) {
                for beta in enumerate_epis(&b, &c) {
                    let gamma = lift_epi(&alpha, &beta).unwrap();
                    assert!(gamma.is_surjective());
                    assert_eq!(beta.compose(&gamma), alpha);
                    assert!(lift_epi_brute(&alpha, &beta).is_some());
                }
            }
        }
    }
}
