//! Colimit towers `G_0 ← G_1 ← …` and the colimit functor `L`.
//!
//! Every stage is a free `Z/p^e`-module `(Z/p^e)^r`, so `Aut(G_m)` acts
//! transitively on `Epi(G_m, H)` for each quotient `H` of `G_m`. The
//! coinvariants of `e_H(G_m)` are therefore one-dimensional when `H` is a
//! quotient of `G_m` and zero otherwise, which makes `Λ_m X` computable from
//! the presentation alone.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{Family, FamilyKind};
use crate::group::{for_each_epi, free_aut_generators, GroupType, Morphism};
use crate::linalg::{coinvariants, sparse_from_map, Quotient, RationalMatrix, Span, Q};

use super::{Evaluator, PresentedObject};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TowerRule {
    /// `Z/p^m`.
    Cyclic,
    /// `C_p^m`.
    Elementary,
    /// `(Z/p^n)^m`.
    Free(u32),
    /// `(Z/p^m)^m`.
    Diagonal,
}

#[derive(Clone, Debug, Serialize)]
pub struct ColimitTower {
    pub family: Family,
    pub rule: TowerRule,
}

impl ColimitTower {
    pub fn for_family(f: &Family) -> Result<Self> {
        let rule = match &f.kind {
            FamilyKind::CpInf => TowerRule::Cyclic,
            FamilyKind::Ep => TowerRule::Elementary,
            FamilyKind::Fpn(n) | FamilyKind::Zpn(n) => TowerRule::Free(*n),
            FamilyKind::ZpInf => TowerRule::Diagonal,
            _ => return Err(Error::TowerUnavailable(f.to_string())),
        };
        Ok(ColimitTower { family: f.clone(), rule })
    }

    /// `(exponent, rank)` of stage `m`.
    pub fn shape(&self, m: usize) -> (u32, usize) {
        match self.rule {
            TowerRule::Cyclic => (m as u32, (m > 0) as usize),
            TowerRule::Elementary => ((m > 0) as u32, m),
            TowerRule::Free(n) => (if m > 0 { n } else { 0 }, m),
            TowerRule::Diagonal => (m as u32, m),
        }
    }

    pub fn stage(&self, m: usize) -> GroupType {
        let (e, r) = self.shape(m);
        GroupType::free(self.family.p, e, r)
    }

    /// `ε_m: G_{m+1} → G_m`, projecting away the last coordinate (if any)
    /// and reducing.
    pub fn epsilon(&self, m: usize) -> Morphism {
        let (src, tgt) = (self.stage(m + 1), self.stage(m));
        let (r, s) = (tgt.rank(), src.rank());
        let mut mat = vec![0i64; r * s];
        for i in 0..r {
            mat[i * s + i] = 1;
        }
        Morphism { source: src, target: tgt, m: mat }
    }

    pub fn is_quotient_of_stage(&self, h: &GroupType, m: usize) -> bool {
        let (e, r) = self.shape(m);
        h.exponent() <= e && h.rank() <= r
    }

    /// First stage admitting a surjection onto `h`, searching up to `max_stage`.
    pub fn first_stage_onto(&self, h: &GroupType, max_stage: usize) -> Option<usize> {
        (0..=max_stage).find(|&m| self.is_quotient_of_stage(h, m))
    }

    /// `α_m: G_m → G`: the least surjection at the first admissible stage,
    /// composed with the tower maps afterwards.
    pub fn map_to(&self, g: &GroupType, m: usize) -> Option<Morphism> {
        let m0 = self.first_stage_onto(g, m)?;
        let mut alpha = None;
        for_each_epi(&self.stage(m0), g, |a| {
            alpha = Some(Morphism { source: self.stage(m0), target: g.clone(), m: a.to_vec() });
            false
        });
        let mut alpha = alpha?;
        for k in m0..m {
            alpha = alpha.compose(&self.epsilon(k));
        }
        Some(alpha)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LResult {
    pub dim: usize,
    pub stabilized: bool,
    /// `dim Λ_m` for each computed stage.
    pub stage_dims: Vec<usize>,
}

/// `Λ_m` as a quotient of the span of the generators that are quotients of
/// stage `m` (coordinates indexed by generator number).
fn lambda_stage(x: &PresentedObject, tower: &ColimitTower, m: usize) -> (Vec<usize>, Quotient) {
    let present: Vec<usize> =
        (0..x.generators.len()).filter(|&i| tower.is_quotient_of_stage(&x.generators[i], m)).collect();
    let n = x.generators.len();
    let mut span = Span::new(n);
    for r in &x.relations {
        if !tower.is_quotient_of_stage(&r.source, m) {
            continue;
        }
        let mut v = std::collections::BTreeMap::new();
        for (i, c) in &r.entries {
            let s: Q = c.terms.iter().map(|t| t.coeff.clone()).sum();
            *v.entry(*i).or_insert_with(Q::zero) += s;
        }
        span.insert(&sparse_from_map(v));
    }
    // generators absent at this stage are zero in Λ_m
    for i in 0..n {
        if !present.contains(&i) {
            span.insert(&vec![(i, Q::one())]);
        }
    }
    (present, Quotient::new(span))
}

/// `L X = colim_m Λ_m X`, stopping once `window` consecutive connecting maps
/// are isomorphisms. Stages that are too small to surject onto every
/// generator and relation source do not count towards the window.
pub fn colimit_l(x: &PresentedObject, tower: &ColimitTower, window: usize) -> Result<LResult> {
    const MAX_STAGE: usize = 64;
    let mut stage_dims = vec![];
    let mut run = 0;
    let (_, mut prev) = lambda_stage(x, tower, 0);
    stage_dims.push(prev.dim());
    for m in 1..=MAX_STAGE {
        let (_, cur) = lambda_stage(x, tower, m);
        stage_dims.push(cur.dim());
        // connecting map [i] ↦ [i]
        let mut map = RationalMatrix::zeros(cur.dim(), prev.dim());
        for (col, &i) in prev.basis.iter().enumerate() {
            for (row, c) in cur.project(&vec![(i, Q::one())]) {
                map.set(row, col, c);
            }
        }
        let covers = x.generators.iter().chain(x.relations.iter().map(|r| &r.source))
            .all(|h| tower.is_quotient_of_stage(h, m - 1));
        let iso = covers && map.rows == map.cols && map.rank() == map.rows;
        run = if iso { run + 1 } else { 0 };
        prev = cur;
        if run >= window.max(1) {
            return Ok(LResult { dim: prev.dim(), stabilized: true, stage_dims });
        }
    }
    Ok(LResult { dim: prev.dim(), stabilized: false, stage_dims })
}

/// `Λ_m X` computed from the values `X(G_m)` and their automorphisms, with the
/// connecting maps. Slow; used to cross-check [`colimit_l`].
pub fn lambda_generic(x: &PresentedObject, tower: &ColimitTower, stages: usize) -> Result<(Vec<usize>, Vec<RationalMatrix>)> {
    let ev = Evaluator::new(x.clone());
    let mut quots = vec![];
    for m in 0..=stages {
        let g = tower.stage(m);
        let d = ev.dim(&g)?;
        let acts = free_aut_generators(&g)
            .iter()
            .map(|a| ev.structure_map(a))
            .collect::<Result<Vec<_>>>()?;
        quots.push((d, coinvariants(d, &acts)));
    }
    let mut maps = vec![];
    for m in 0..stages {
        let eps = ev.structure_map(&tower.epsilon(m))?;
        let (qa, qb) = (&quots[m].1, &quots[m + 1].1);
        let mut map = RationalMatrix::zeros(qb.dim(), qa.dim());
        for (col, &i) in qa.basis.iter().enumerate() {
            let v = eps.column(i);
            for (row, c) in qb.project(&v) {
                map.set(row, col, c);
            }
        }
        maps.push(map);
    }
    Ok((quots.iter().map(|q| q.1.dim()).collect(), maps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functor::builtin::{builtin_to_presentation, e, misc_a, misc_b, Builtin};

    fn g(p: u64, l: &[u32]) -> GroupType {
        GroupType::new(p, l.to_vec()).unwrap()
    }

    #[test]
    fn tower_shapes() {
        let t = ColimitTower::for_family(&Family::all(2)).unwrap();
        assert_eq!(t.stage(2), g(2, &[2, 2]));
        assert!(t.epsilon(2).is_surjective());
        let c = ColimitTower::for_family(&Family::cyclic(3)).unwrap();
        assert_eq!(c.stage(3), g(3, &[3]));
        assert!(c.epsilon(0).is_surjective());
        assert!(ColimitTower::for_family(&"Cpn:2,3".parse().unwrap()).is_err());
        let f = ColimitTower::for_family(&Family::free(2, 2)).unwrap();
        let a = f.map_to(&g(2, &[2, 1]), 4).unwrap();
        assert_eq!(a.source, g(2, &[2, 2, 2, 2]));
        assert!(a.is_surjective());
    }

    #[test]
    fn l_of_generators() {
        for fam in [Family::all(2), Family::cyclic(2), Family::elementary(2), Family::free(2, 2), Family::exponent(2, 2)] {
            let tower = ColimitTower::for_family(&fam).unwrap();
            for grp in fam.members(16) {
                let r = colimit_l(&e(&fam, &grp).unwrap(), &tower, 2).unwrap();
                assert_eq!((r.dim, r.stabilized), (1, true), "{fam} {grp}");
            }
        }
        let cyc = Family::cyclic(2);
        let t = builtin_to_presentation(&Builtin::TTriv { group: g(2, &[1]) }, &cyc, 16).unwrap();
        assert_eq!(colimit_l(&t, &ColimitTower::for_family(&cyc).unwrap(), 2).unwrap().dim, 0);
    }

    #[test]
    fn fast_and_generic_agree() {
        let cases = [
            (misc_a(3).unwrap(), Family::all(3), 2usize),
            (misc_b().unwrap(), Family::all(2), 2),
            (misc_b().unwrap().with_family(Family::elementary(2)).unwrap(), Family::elementary(2), 4),
            (misc_a(2).unwrap().with_family(Family::exponent(2, 2)).unwrap(), Family::exponent(2, 2), 2),
        ];
        for (x, fam, stages) in cases {
            let tower = ColimitTower::for_family(&fam).unwrap();
            let (dims, _) = lambda_generic(&x, &tower, stages).unwrap();
            for (m, d) in dims.iter().enumerate() {
                assert_eq!(*d, lambda_stage(&x, &tower, m).1.dim(), "{fam} stage {m}");
            }
        }
    }
}
