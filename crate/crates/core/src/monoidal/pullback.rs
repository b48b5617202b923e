//! `σ` along pullbacks: for `φ: T' → T` and `(W, λ) ∈ ℕ(T)`, every
//! `(W', λ ∘ (φ × 1))` with `W' ≤ T' × G` wide and `(φ × 1)(W') = W` has
//! `σ ≥ σ(W, λ)`, with equality exactly at `W' = (φ × 1)⁻¹(W)`.
//!
//! `σ(W, λ) = |T| / |K|` with `K = {t : (t, 0) ∈ W, λ(t, 0) = 0}`, and the
//! kernel upstairs is `{s : (s, 0) ∈ W', φ(s) ∈ K}`. So only `K` matters,
//! and the homomorphisms `λ` are grouped by it.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::Family;
use crate::group::{for_each_epi, GroupType, Morphism};

use super::lmn::{subgroup_elems, Bits, Table, LMN_BOUND};
use super::{enumerate_wide, Product};

#[derive(Clone, Debug, Serialize)]
pub struct SigmaPullbackReport {
    pub phi: Morphism,
    /// Number of pairs `((W,λ), (W',λ'))` with `(W',λ') ∈ E(φ, (W,λ))`.
    pub pairs: usize,
    pub strict: usize,
    pub equal: usize,
    pub inequality_holds: bool,
    pub equality_iff_pullback: bool,
}

impl SigmaPullbackReport {
    pub fn ok(&self) -> bool {
        self.inequality_holds && self.equality_iff_pullback
    }
}

/// For every `(W,λ) ∈ ℕ(T)` and `(W',λ') ∈ E(φ,(W,λ))`, checks
/// `σ(W',λ') ≥ σ(W,λ)` with equality exactly at `φ^*(W,λ)`.
pub fn sigma_pullback_check(phi: &Morphism, g: &GroupType, h: &GroupType, u: &Family) -> Result<SigmaPullbackReport> {
    if !phi.is_surjective() {
        return Err(Error::NotSurjective);
    }
    let (t2, t) = (&phi.source, &phi.target);
    if t2.p != g.p || g.p != h.p {
        return Err(Error::ShapeMismatch("T, G, H must share a prime".into()));
    }
    for x in [t2, g] {
        if x.order() > 64 {
            return Err(Error::ScaleExceeded { what: format!("|{x}|"), got: x.order(), bound: 64 });
        }
    }
    let n = t2.order() * g.order();
    if n > LMN_BOUND {
        return Err(Error::ScaleExceeded { what: "|T'||G|".into(), got: n, bound: LMN_BOUND });
    }
    let (nt2, nt, ng) = (t2.order() as usize, t.order() as usize, g.order() as usize);
    let th = Table::new(h);
    let h_mods: Vec<usize> = h.moduli().iter().map(|&m| m as usize).collect();
    let phi_at: Vec<usize> = t2.elements().iter().map(|s| t.index_of(&phi.apply(s))).collect();

    let ptg = Product::new(&[t.clone(), g.clone()]);
    let p_new = Product::new(&[t2.clone(), g.clone()]);
    let ws = enumerate_wide(t, g, u)?;
    let w_bits: Vec<Bits> = ws.iter().map(|w| subgroup_elems(&ptg, &w.embedded, (nt, ng)).1).collect();
    let index: HashMap<&Bits, usize> = w_bits.iter().enumerate().map(|(i, b)| (b, i)).collect();
    // wide W' ≤ T' × G, sorted by their image in T × G
    let mut above: Vec<Vec<Bits>> = vec![vec![]; ws.len()];
    for w2 in enumerate_wide(t2, g, u)? {
        let (elems, bits, _) = subgroup_elems(&p_new, &w2.embedded, (nt2, ng));
        let mut img = Bits::new(nt * ng);
        for &x in &elems {
            img.set(phi_at[x / ng] * ng + x % ng);
        }
        if let Some(&i) = index.get(&img) {
            above[i].push(bits);
        }
    }

    let mut rep = SigmaPullbackReport {
        phi: phi.clone(),
        pairs: 0,
        strict: 0,
        equal: 0,
        inequality_holds: true,
        equality_iff_pullback: true,
    };
    for (wi, w) in ws.iter().enumerate() {
        let mut pull = Bits::new(nt2 * ng);
        for s in 0..nt2 {
            for x in 0..ng {
                if w_bits[wi].get(phi_at[s] * ng + x) {
                    pull.set(s * ng + x);
                }
            }
        }
        // K for every λ ∈ Epi(W, H), as a mask on T
        let st = w.embedded.subgroup_type();
        let wt = &st.group;
        let on_t: Vec<(Vec<i64>, usize)> = wt
            .elements()
            .into_iter()
            .filter_map(|x| {
                let y = st.embedding.apply(&x);
                let (tp, gp) = (ptg.part(&y, 0), ptg.part(&y, 1));
                gp.iter().all(|&c| c == 0).then(|| (x, t.index_of(&tp)))
            })
            .collect();
        let s = wt.rank();
        let mut imgs = vec![0; s];
        let mut kernels: BTreeMap<u64, usize> = BTreeMap::new();
        for_each_epi(wt, h, |m| {
            for (c, img) in imgs.iter_mut().enumerate() {
                *img = (0..h.rank()).fold(0, |acc, r| acc * h_mods[r] + m[r * s + c] as usize);
            }
            let mut k = 0u64;
            for (x, ti) in &on_t {
                let lam = x.iter().zip(&imgs).fold(0, |acc, (&c, &img)| th.add(acc, th.times(c, img)));
                if lam == 0 {
                    k |= 1 << ti;
                }
            }
            *kernels.entry(k).or_insert(0) += 1;
            true
        });
        for (&k, &mult) in &kernels {
            let sigma = nt / k.count_ones() as usize;
            for w2 in &above[wi] {
                let k2 = (0..nt2).filter(|&s| w2.get(s * ng) && k >> phi_at[s] & 1 == 1).count();
                let sigma2 = nt2 / k2;
                rep.pairs += mult;
                if sigma2 < sigma {
                    rep.inequality_holds = false;
                }
                if sigma2 == sigma {
                    rep.equal += mult;
                } else {
                    rep.strict += mult;
                }
                if (sigma2 == sigma) != (*w2 == pull) {
                    rep.equality_iff_pullback = false;
                }
            }
        }
    }
    Ok(rep)
}
