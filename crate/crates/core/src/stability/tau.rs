//! `τ_n X(G) = colim_{H ∈ N(G,n)} X(G/H)` and its counit to `X(G)`.
//!
//! Arrows run `X(G/H′) → X(G/H)` for `H ⋖ H′`, pulling back along the induced
//! map `G/H → G/H′`. Only covering pairs are used; the other comparable pairs
//! are composites of these and add nothing to the colimit.

use crate::error::Result;
use crate::functor::{Evaluator, PresentedObject};
use crate::group::{GroupType, Morphism};
use crate::linalg::{colimit_of_diagram, Arrow, BasedSpace, FinitePosetDiagram, RationalMatrix};
use crate::subgroup::{enumerate_subgroups, Subgroup};

/// Largest `|G|` for which the subgroup poset is built.
pub const TAU_BOUND: u64 = 1024;

struct Node {
    index: u64,
    dim: usize,
    /// `π_H^*: X(G/H) → X(G)`.
    pullback: RationalMatrix,
}

/// The diagram of `X(G/H)` over all `H` with `G/H` in the family and index at
/// most `max_index`, from which every `τ_n` with `n ≤ max_index` is cut out.
pub(crate) struct TauDiagram {
    dim_g: usize,
    nodes: Vec<Node>,
    /// `(from, to, matrix)` with `from = H′`, `to = H`.
    arrows: Vec<(usize, usize, RationalMatrix)>,
}

fn induced(q_small: &crate::subgroup::QuotientData, q_big: &crate::subgroup::QuotientData) -> Morphism {
    let (src, tgt) = (&q_small.quotient, &q_big.quotient);
    let (r, s) = (tgt.rank(), src.rank());
    let mut m = vec![0i64; r * s];
    for (k, lift) in q_small.section.iter().enumerate() {
        let img = q_big.projection.apply(lift);
        for i in 0..r {
            m[i * s + k] = img[i];
        }
    }
    Morphism { source: src.clone(), target: tgt.clone(), m }
}

impl TauDiagram {
    pub(crate) fn build(ev: &Evaluator, g: &GroupType, max_index: u64) -> Result<Self> {
        g.check_order(TAU_BOUND)?;
        let fam = &ev.object.family;
        let subs: Vec<Subgroup> = enumerate_subgroups(g, None)?
            .into_iter()
            .filter(|s| s.index() <= max_index)
            .collect();
        let mut kept = vec![];
        let mut quots = vec![];
        for s in subs {
            let qd = s.quotient();
            if fam.contains(&qd.quotient) {
                kept.push(s);
                quots.push(qd);
            }
        }
        let mut nodes = vec![];
        for (s, qd) in kept.iter().zip(&quots) {
            nodes.push(Node { index: s.index(), dim: ev.dim(&qd.quotient)?, pullback: ev.structure_map(&qd.projection)? });
        }
        let n = kept.len();
        let ord: Vec<u64> = kept.iter().map(|s| s.order()).collect();
        let rel: Vec<Vec<bool>> = (0..n)
            .map(|a| (0..n).map(|b| ord[a] < ord[b] && kept[a].is_subgroup_of(&kept[b])).collect())
            .collect();
        let mut arrows = vec![];
        for h in 0..n {
            for hp in 0..n {
                if !rel[h][hp] {
                    continue;
                }
                let covers = (0..n).all(|k| !(rel[h][k] && rel[k][hp]));
                // a zero target still matters: it kills the source
                if !covers || nodes[hp].dim == 0 {
                    continue;
                }
                let f = induced(&quots[h], &quots[hp]);
                arrows.push((hp, h, ev.structure_map(&f)?));
            }
        }
        Ok(TauDiagram { dim_g: ev.dim(g)?, nodes, arrows })
    }

    /// `τ_n X(G)` with the counit matrix `dim X(G) × dim τ_n X(G)`.
    pub(crate) fn truncate(&self, n: u64) -> (BasedSpace, RationalMatrix) {
        let live: Vec<usize> = (0..self.nodes.len()).filter(|&i| self.nodes[i].index <= n).collect();
        let mut pos = vec![usize::MAX; self.nodes.len()];
        for (k, &i) in live.iter().enumerate() {
            pos[i] = k;
        }
        let diagram = FinitePosetDiagram {
            dims: live.iter().map(|&i| self.nodes[i].dim).collect(),
            arrows: self
                .arrows
                .iter()
                .filter(|(a, b, _)| pos[*a] != usize::MAX && pos[*b] != usize::MAX)
                .map(|(a, b, m)| Arrow { from: pos[*a], to: pos[*b], matrix: m.clone() })
                .collect(),
        };
        let colim = colimit_of_diagram(&diagram);
        let mut counit = RationalMatrix::zeros(self.dim_g, colim.origins.len());
        for (col, &(node, j)) in colim.origins.iter().enumerate() {
            for (row, x) in self.nodes[live[node]].pullback.column(j) {
                counit.set(row, col, x);
            }
        }
        (colim.space, counit)
    }
}

pub(crate) fn is_iso(m: &RationalMatrix) -> bool {
    m.rows == m.cols && m.rank() == m.rows
}

/// `τ_n X(G)` and the comparison map to `X(G)`.
pub fn truncate_tau(x: &PresentedObject, n: u64, g: &GroupType) -> Result<(BasedSpace, RationalMatrix)> {
    let ev = Evaluator::new(x.clone());
    x.family.check_member(g)?;
    Ok(TauDiagram::build(&ev, g, n.min(g.order()))?.truncate(n))
}
