//! Framings `α₀: X → A` of finite abelian `p`-groups and their factorization
//! through tautological ones.
//!
//! A tautological framing here is an ordered generating subset `X ⊆ A` with
//! labels `e_X = η`. Running-maximum labels do not satisfy the label
//! condition of the factoring map in general; [`running_max_labels`] is kept
//! so the failure can be exhibited.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{DagSurjection, OrderedLabeledSet};
use crate::error::{Error, Result};
use crate::group::{rank_mod_p, GroupType};

/// Largest number of ordered subsets of `A` walked by [`tautological_framings`].
pub const TAUT_BOUND: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Framing {
    pub domain: OrderedLabeledSet,
    pub target: GroupType,
    /// `α₀(x)` for each `x`, as reduced coordinates in `target`.
    pub assignment: Vec<Vec<i64>>,
}

/// The elements generate `A` iff they span `A/pA`.
fn generates(a: &GroupType, elems: &[Vec<i64>]) -> bool {
    let r = a.rank();
    if r == 0 {
        return true;
    }
    let flat: Vec<i64> = elems.iter().flatten().copied().collect();
    rank_mod_p(&flat, elems.len(), r, a.p) == r
}

impl Framing {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidFraming(m));
        if self.assignment.len() != self.domain.size() {
            return bad(format!("{} elements assigned for a domain of size {}", self.assignment.len(), self.domain.size()));
        }
        let mods = self.target.moduli();
        for (x, a) in self.assignment.iter().enumerate() {
            if a.len() != mods.len() || a.iter().zip(&mods).any(|(c, m)| *c < 0 || c >= m) {
                return bad(format!("{a:?} is not a reduced element of {}", self.target));
            }
            if self.target.eta(a) > self.domain.e[x] {
                return bad(format!("element {x} has label {} below the exponent of {a:?}", self.domain.e[x]));
            }
        }
        if !generates(&self.target, &self.assignment) {
            return bad(format!("the image does not generate {}", self.target));
        }
        Ok(())
    }

    /// Distinct values in first-occurrence order.
    fn is_injective(&self) -> bool {
        self.assignment.iter().collect::<BTreeSet<_>>().len() == self.assignment.len()
    }

    /// Tautological: injective with labels equal to `η`.
    pub fn is_tautological(&self) -> bool {
        self.is_injective() && self.assignment.iter().zip(&self.domain.e).all(|(a, &l)| self.target.eta(a) == l)
    }
}

/// `e(x) = max{η(w) : w ≤ x}` along an ordered subset.
pub fn running_max_labels(a: &GroupType, elems: &[Vec<i64>]) -> Vec<u32> {
    let mut run = 0;
    elems
        .iter()
        .map(|x| {
            run = run.max(a.eta(x));
            run
        })
        .collect()
}

fn ordered_subset_count(n: u64) -> u64 {
    // Σ_k n!/(n−k)!, saturating
    let mut total: u64 = 0;
    let mut term: u64 = 1;
    for k in 0..n {
        term = term.saturating_mul(n - k);
        total = total.saturating_add(term);
    }
    total
}

/// Every tautological framing of `A`, in lexicographic order of the element
/// index lists. With `omega`, only those whose labels all lie in it.
pub fn tautological_framings(a: &GroupType, omega: Option<&BTreeSet<u32>>) -> Result<Vec<Framing>> {
    let n = a.order();
    let count = ordered_subset_count(n);
    if count > TAUT_BOUND {
        return Err(Error::ScaleExceeded { what: format!("ordered subsets of {a}"), got: count, bound: TAUT_BOUND });
    }
    let elems = a.elements();
    let mut out = vec![];
    let mut used = vec![false; elems.len()];
    let mut cur: Vec<usize> = vec![];
    walk(a, &elems, omega, &mut used, &mut cur, &mut out);
    Ok(out)
}

fn walk(a: &GroupType, elems: &[Vec<i64>], omega: Option<&BTreeSet<u32>>, used: &mut [bool], cur: &mut Vec<usize>, out: &mut Vec<Framing>) {
    if !cur.is_empty() {
        let chosen: Vec<Vec<i64>> = cur.iter().map(|&i| elems[i].clone()).collect();
        if generates(a, &chosen) {
            let e: Vec<u32> = chosen.iter().map(|x| a.eta(x)).collect();
            if omega.map_or(true, |o| e.iter().all(|l| o.contains(l))) {
                out.push(Framing { domain: OrderedLabeledSet { e }, target: a.clone(), assignment: chosen });
            }
        }
    }
    for i in 0..elems.len() {
        if !used[i] {
            used[i] = true;
            cur.push(i);
            walk(a, elems, omega, used, cur, out);
            cur.pop();
            used[i] = false;
        }
    }
}

/// `α₀ = ᾱ ∘ φ` with `X̄ = α₀(X)` ordered by first occurrence and labelled by
/// `η`. Returns the `ℒ†` morphism `φ: X → X̄` and the tautological `ᾱ`.
pub fn factor_framing(f: &Framing) -> Result<(DagSurjection, Framing)> {
    f.validate()?;
    let mut image: Vec<Vec<i64>> = vec![];
    let mut map = Vec::with_capacity(f.assignment.len());
    for a in &f.assignment {
        let pos = match image.iter().position(|b| b == a) {
            Some(p) => p,
            None => {
                image.push(a.clone());
                image.len() - 1
            }
        };
        map.push(pos);
    }
    let e = image.iter().map(|x| f.target.eta(x)).collect();
    let bar = Framing { domain: OrderedLabeledSet { e }, target: f.target.clone(), assignment: image };
    let phi = DagSurjection { source: f.domain.clone(), target: bar.domain.clone(), map };
    debug_assert!(phi.is_valid() && bar.is_tautological());
    Ok((phi, bar))
}
