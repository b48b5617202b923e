//! The standard objects `e_G`, `c_G`, `t_{G,k}`, `s_{G,k}`, `χ` and the unit,
//! plus a few named example objects.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::Family;
use crate::group::{aut_generators, enumerate_epis, make_morphism, GroupType, Morphism};
use crate::linalg::q;

use super::finmod::{present, ChiModule, SModule, TModule};
use super::{MorphismCombination, PresentedObject, Relation};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Builtin {
    E { group: GroupType },
    C { group: GroupType },
    TTriv { group: GroupType },
    STriv { group: GroupType },
    /// Members with `lo ≤ |T| ≤ hi`.
    Chi { lo: u64, hi: u64 },
    Unit,
}

pub fn e(family: &Family, g: &GroupType) -> Result<PresentedObject> {
    PresentedObject::free(family.clone(), vec![g.clone()])
}

pub fn unit(family: &Family) -> Result<PresentedObject> {
    e(family, &GroupType::trivial(family.p))
}

/// `c_G = e_G / (a − 1)` over generators `a` of `Aut(G)`.
pub fn c(family: &Family, g: &GroupType) -> Result<PresentedObject> {
    let id = Morphism::identity(g);
    let mut rels = vec![];
    for a in aut_generators(g) {
        if a == id {
            continue;
        }
        let comb = MorphismCombination::new(g, g, vec![(a, q(1)), (id.clone(), q(-1))])?;
        rels.push(Relation { source: g.clone(), entries: vec![(0, comb)] });
    }
    PresentedObject::new(family.clone(), vec![g.clone()], rels)
}

/// A presentation of the builtin valid for all members of order `≤ scale`.
pub fn builtin_to_presentation(b: &Builtin, family: &Family, scale: u64) -> Result<PresentedObject> {
    match b {
        Builtin::E { group } => e(family, group),
        Builtin::Unit => unit(family),
        Builtin::C { group } => c(family, group),
        Builtin::TTriv { group } => present(&TModule::new(family.clone(), group.clone())?, scale),
        Builtin::STriv { group } => present(&SModule::new(family.clone(), group.clone())?, scale),
        Builtin::Chi { lo, hi } => {
            if lo > hi {
                return Err(Error::ShapeMismatch("empty order interval".into()));
            }
            present(&ChiModule::new(family.clone(), *lo, *hi), scale)
        }
    }
}

/// `coker(λ_* − ρ_*: e_{C²} → e_C)` in `Z[p^∞]`, `C` cyclic of order `p`.
pub fn misc_a(p: u64) -> Result<PresentedObject> {
    let c = GroupType::cyclic(p, 1);
    let c2 = GroupType::elementary(p, 2);
    let lambda = make_morphism(&c2, &c, &[vec![1, 0]])?;
    let rho = make_morphism(&c2, &c, &[vec![0, 1]])?;
    let comb = MorphismCombination::new(&c2, &c, vec![(lambda, q(1)), (rho, q(-1))])?;
    PresentedObject::new(Family::all(p), vec![c], vec![Relation { source: c2, entries: vec![(0, comb)] }])
}

/// `coker(λ_* + ρ_* + σ_*: e_{C²} → e_C)` in `Z[2^∞]`, summing all three maps.
pub fn misc_b() -> Result<PresentedObject> {
    let c = GroupType::cyclic(2, 1);
    let c2 = GroupType::elementary(2, 2);
    let terms = enumerate_epis(&c2, &c).into_iter().map(|m| (m, q(1))).collect();
    let comb = MorphismCombination::new(&c2, &c, terms)?;
    PresentedObject::new(Family::all(2), vec![c], vec![Relation { source: c2, entries: vec![(0, comb)] }])
}
