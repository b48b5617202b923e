//! Torsion in `X(G)`, found two ways.
//!
//! [`torsion_subspace`] takes kernels of `α_m^*: X(G) → X(G_m)` along a colimit
//! tower. [`torsion_oracle_via_l`] instead asks whether `1_G ⊗ x` dies in
//! `L(e_G ⊗ X)`, computing `Λ_m(e_G ⊗ X)` as `Aut(G_m)`-coinvariants of
//! `k[Epi(G_m, G)] ⊗ X(G_m)`. The two share no code past evaluation.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functor::tower::ColimitTower;
use crate::functor::{Evaluator, PresentedObject};
use crate::group::{enumerate_epis, free_aut_generators, GroupType, Morphism};
use crate::linalg::{q_to_string, snf_reduce, sparse_from_map, BasedSpace, Quotient, Rat, RationalMatrix, Span, Q};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionSubspace {
    pub group: GroupType,
    pub space: BasedSpace,
    /// Basis of the torsion subspace in the coordinates of `X(G)`.
    pub vectors: Vec<Vec<Rat>>,
    /// Two consecutive stages agreed after the presentation was fully visible,
    /// or the whole space was already torsion.
    pub exhausted: bool,
    /// `(stage, kernel dimension)` for each stage examined.
    pub kernel_dims: Vec<(usize, usize)>,
}

/// First stage that surjects onto every generator and relation source.
fn covering_stage(x: &PresentedObject, tower: &ColimitTower, max_stage: usize) -> Option<usize> {
    (0..=max_stage).find(|&m| {
        x.generators.iter().chain(x.relations.iter().map(|r| &r.source)).all(|h| tower.is_quotient_of_stage(h, m))
    })
}

fn vec_label(v: &[Q]) -> String {
    let parts: Vec<String> = v.iter().map(q_to_string).collect();
    format!("[{}]", parts.join(","))
}

pub fn torsion_subspace(x: &PresentedObject, g: &GroupType, tower: &ColimitTower, max_stage: usize) -> Result<TorsionSubspace> {
    torsion_subspace_with(&Evaluator::new(x.clone()), g, tower, max_stage)
}

/// As [`torsion_subspace`], sharing an evaluator across calls.
pub fn torsion_subspace_with(ev: &Evaluator, g: &GroupType, tower: &ColimitTower, max_stage: usize) -> Result<TorsionSubspace> {
    let x = &ev.object;
    if tower.family.p != x.family.p {
        return Err(Error::TowerUnavailable(tower.family.to_string()));
    }
    let d = ev.dim(g)?;
    let m0 = tower.first_stage_onto(g, max_stage).ok_or(Error::NotStabilized(max_stage))?;
    let cover = covering_stage(x, tower, max_stage).map(|c| c.max(m0));
    let mut kernel: Vec<Vec<Q>> = vec![];
    let mut kernel_dims = vec![];
    let mut exhausted = d == 0;
    for m in m0..=max_stage {
        if exhausted {
            break;
        }
        let alpha = tower.map_to(g, m).expect("stage surjects onto the group");
        let ker = snf_reduce(&ev.structure_map(&alpha)?).kernel_basis;
        let grew = kernel_dims.last().map_or(true, |&(_, k)| k != ker.len());
        exhausted = ker.len() == d || (!grew && cover.is_some_and(|c| m > c));
        kernel_dims.push((m, ker.len()));
        kernel = ker;
    }
    let labels = kernel.iter().map(|v| vec_label(v)).collect();
    Ok(TorsionSubspace {
        group: g.clone(),
        space: BasedSpace::new(labels),
        vectors: kernel.into_iter().map(|v| v.into_iter().map(Rat).collect()).collect(),
        exhausted,
        kernel_dims,
    })
}

/// `Λ_m(e_G ⊗ X)` at one stage.
struct LStage {
    stage: GroupType,
    epis: Vec<Morphism>,
    index: HashMap<Vec<i64>, usize>,
    d: usize,
    quot: Quotient,
}

impl LStage {
    fn build(ev: &Evaluator, tower: &ColimitTower, g: &GroupType, m: usize) -> Result<Self> {
        let stage = tower.stage(m);
        let epis = enumerate_epis(&stage, g);
        let index: HashMap<Vec<i64>, usize> = epis.iter().enumerate().map(|(i, e)| (e.m.clone(), i)).collect();
        let d = ev.dim(&stage)?;
        let mut span = Span::new(epis.len() * d);
        for a in free_aut_generators(&stage) {
            let act = ev.structure_map(&a)?;
            for (e, beta) in epis.iter().enumerate() {
                let moved = index[&beta.compose(&a).m];
                for j in 0..d {
                    let mut v: BTreeMap<usize, Q> = BTreeMap::new();
                    for (i, c) in act.column(j) {
                        *v.entry(moved * d + i).or_insert_with(Q::zero) += c;
                    }
                    *v.entry(e * d + j).or_insert_with(Q::zero) -= Q::from_integer(1.into());
                    span.insert(&sparse_from_map(v));
                }
            }
        }
        Ok(LStage { stage, epis, index, d, quot: Quotient::new(span) })
    }

    /// Class of `β ⊗ y`.
    fn class(&self, beta: &Morphism, y: &[Q]) -> Vec<Q> {
        let e = self.index[&beta.m];
        let v: Vec<(usize, Q)> = y.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(j, c)| (e * self.d + j, c.clone())).collect();
        self.quot.project_dense(&v)
    }

    /// `Λ_m → Λ_{m+1}` induced by `ε_m`.
    fn connecting(&self, next: &LStage, eps: &Morphism, eps_star: &RationalMatrix) -> RationalMatrix {
        let mut out = RationalMatrix::zeros(next.quot.dim(), self.quot.dim());
        for (col, &i) in self.quot.basis.iter().enumerate() {
            let (e, j) = (i / self.d, i % self.d);
            let beta = self.epis[e].compose(eps);
            let y: Vec<Q> = (0..eps_star.rows).map(|r| eps_star.get(r, j).clone()).collect();
            for (row, c) in next.class(&beta, &y).into_iter().enumerate() {
                out.set(row, col, c);
            }
        }
        out
    }
}

/// Whether `x ∈ X(G)` is torsion, decided by the image of `1_G ⊗ x` in
/// `L(e_G ⊗ X)`. `true` once the class vanishes at some stage; `false` once it
/// is nonzero at a stage whose connecting map from the previous one is an
/// isomorphism with the presentation fully visible.
pub fn torsion_oracle_via_l(x: &PresentedObject, g: &GroupType, v: &[Q], tower: &ColimitTower, max_stage: usize) -> Result<bool> {
    let ev = Evaluator::new(x.clone());
    let d = ev.dim(g)?;
    if v.len() != d {
        return Err(Error::ShapeMismatch(format!("vector of length {} in a space of dimension {d}", v.len())));
    }
    if v.iter().all(|c| c.is_zero()) {
        return Ok(true);
    }
    let m0 = tower.first_stage_onto(g, max_stage).ok_or(Error::NotStabilized(max_stage))?;
    let cover = covering_stage(x, tower, max_stage).map_or(usize::MAX, |c| c.max(m0));
    let mut prev: Option<LStage> = None;
    for m in m0..=max_stage {
        let cur = LStage::build(&ev, tower, g, m)?;
        let alpha = tower.map_to(g, m).expect("stage surjects onto the group");
        let pulled = ev.structure_map(&alpha)?.apply(v);
        if cur.class(&alpha, &pulled).iter().all(|c| c.is_zero()) {
            return Ok(true);
        }
        if let Some(p) = &prev {
            if m > cover {
                let eps = tower.epsilon(m - 1);
                debug_assert_eq!(eps.source, cur.stage);
                let map = p.connecting(&cur, &eps, &ev.structure_map(&eps)?);
                if map.rows == map.cols && map.rank() == map.rows {
                    return Ok(false);
                }
            }
        }
        prev = Some(cur);
    }
    Err(Error::NotStabilized(max_stage))
}
