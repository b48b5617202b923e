//! Projective resolutions over a truncated family `𝒰_{≤bound}`.
//!
//! Each term is a sum `⊕_G e_G ⊗_{Aut G} V_G` with `V_G` an `Aut(G)`-stable
//! subspace of the object being covered. Canonical resolutions take
//! `V_G` to be everything; minimal ones take an equivariant complement of the
//! decomposables, so `Q(d_k) = 0`.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::Zero;
use parking_lot::Mutex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::Family;
use crate::group::{aut_generators, automorphisms, compose_raw, for_each_epi, GroupType, HomShape, Morphism};
use crate::linalg::{q, snf_reduce, sparse_from_dense, RationalMatrix, SVec, Span, Q};

use super::finmod::{decomposables, FinModule};
use super::{Evaluator, PresentedObject};

/// Largest group order a resolution may range over.
pub const RESOLUTION_BOUND: u64 = 256;

/// `Epi(T, G)` split into free `Aut(G)`-orbits; every `φ` is `a ∘ rep`.
struct OrbitTable {
    codes: Vec<u64>,
    /// `(orbit, aut index)` for each code.
    place: Vec<(usize, usize)>,
    reps: Vec<Vec<i64>>,
}

struct InducedTerm {
    g: GroupType,
    auts: Vec<Morphism>,
    /// Basis of `V_G` in coordinates of the covered object at `G`.
    basis: Vec<SVec>,
    span: Span,
    /// `a^*` restricted to `V_G`, by automorphism index, filled on demand.
    act: Mutex<HashMap<usize, Arc<RationalMatrix>>>,
}

/// `⊕_j e_{G_j} ⊗_{Aut G_j} V_j` together with its counit to the covered
/// object. Basis at `T`: per term, (orbit of `Epi(T, G_j)`, basis index of `V_j`).
pub struct InducedSum {
    family: Family,
    terms: Vec<InducedTerm>,
    target: Arc<dyn FinModule>,
    tables: Mutex<HashMap<(usize, GroupType), Arc<OrbitTable>>>,
}

impl InducedSum {
    fn new(family: Family, target: Arc<dyn FinModule>, spaces: Vec<(GroupType, Span)>) -> Result<Self> {
        let mut terms = vec![];
        for (g, span) in spaces {
            if span.rank() == 0 {
                continue;
            }
            let auts = automorphisms(&g)?;
            let basis = span.basis();
            terms.push(InducedTerm { g, act: Mutex::new(HashMap::new()), auts, basis, span });
        }
        Ok(InducedSum { family, terms, target, tables: Mutex::new(HashMap::new()) })
    }

    /// `a^*` restricted to `V_j`, for the automorphism with index `ai`.
    fn act(&self, j: usize, ai: usize) -> Result<Arc<RationalMatrix>> {
        let term = &self.terms[j];
        if let Some(m) = term.act.lock().get(&ai) {
            return Ok(m.clone());
        }
        let m = self.target.pullback(&term.auts[ai])?;
        let n = term.basis.len();
        let mut r = RationalMatrix::zeros(n, n);
        for (k, v) in term.basis.iter().enumerate() {
            let w = m.apply(&dense(v, m.cols));
            let c = term.span.coordinates(&sparse_from_dense(&w)).ok_or_else(|| {
                Error::ShapeMismatch(format!("subspace at {} is not Aut-stable", term.g))
            })?;
            for (l, x) in c.into_iter().enumerate() {
                if !x.is_zero() {
                    r.set(l, k, x);
                }
            }
        }
        let r = Arc::new(r);
        term.act.lock().insert(ai, r.clone());
        Ok(r)
    }

    /// `(G_j, dim V_j)` per term.
    pub fn generators(&self) -> Vec<(GroupType, usize)> {
        self.terms.iter().map(|t| (t.g.clone(), t.basis.len())).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn table(&self, j: usize, t: &GroupType) -> Arc<OrbitTable> {
        let key = (j, t.clone());
        if let Some(x) = self.tables.lock().get(&key) {
            return x.clone();
        }
        let term = &self.terms[j];
        let g = &term.g;
        let shape = HomShape::new(t, g);
        let mut codes = vec![];
        for_each_epi(t, g, |m| {
            codes.push(shape.encode(m));
            true
        });
        let mut place = vec![(usize::MAX, 0); codes.len()];
        let mut reps = vec![];
        for k in 0..codes.len() {
            if place[k].0 != usize::MAX {
                continue;
            }
            let phi = shape.decode(codes[k]);
            let o = reps.len();
            for (ai, a) in term.auts.iter().enumerate() {
                let m = compose_raw(&a.m, &phi, g.rank(), g.rank(), t.rank(), &g.moduli());
                let idx = codes.binary_search(&shape.encode(&m)).expect("automorphism image is an epi");
                place[idx] = (o, ai);
            }
            reps.push(phi);
        }
        let tab = Arc::new(OrbitTable { codes, place, reps });
        self.tables.lock().insert(key, tab.clone());
        tab
    }

    fn offsets(&self, t: &GroupType) -> Vec<usize> {
        let mut off = vec![0];
        for (j, term) in self.terms.iter().enumerate() {
            let n = self.table(j, t).reps.len() * term.basis.len();
            off.push(off[j] + n);
        }
        off
    }

    /// Matrix of the counit `P(T) → X(T)`.
    pub fn counit(&self, t: &GroupType) -> Result<RationalMatrix> {
        let off = self.offsets(t);
        let d = self.target.dim(t)?;
        let mut m = RationalMatrix::zeros(d, off[self.terms.len()]);
        for (j, term) in self.terms.iter().enumerate() {
            let tab = self.table(j, t);
            let dv = term.basis.len();
            let dg = self.target.dim(&term.g)?;
            for (o, rep) in tab.reps.iter().enumerate() {
                let phi = Morphism { source: t.clone(), target: term.g.clone(), m: rep.clone() };
                let pb = self.target.pullback(&phi)?;
                for (k, v) in term.basis.iter().enumerate() {
                    for (r, x) in pb.apply(&dense(v, dg)).into_iter().enumerate() {
                        if !x.is_zero() {
                            m.set(r, off[j] + o * dv + k, x);
                        }
                    }
                }
            }
        }
        Ok(m)
    }
}

impl FinModule for InducedSum {
    fn family(&self) -> &Family {
        &self.family
    }
    fn dim(&self, t: &GroupType) -> Result<usize> {
        Ok(*self.offsets(t).last().unwrap())
    }
    fn pullback(&self, alpha: &Morphism) -> Result<RationalMatrix> {
        let (t2, t) = (&alpha.source, &alpha.target);
        let (off2, off) = (self.offsets(t2), self.offsets(t));
        let mut m = RationalMatrix::zeros(off2[self.terms.len()], off[self.terms.len()]);
        for (j, term) in self.terms.iter().enumerate() {
            let (tab, tab2) = (self.table(j, t), self.table(j, t2));
            let g = &term.g;
            let shape2 = HomShape::new(t2, g);
            let dv = term.basis.len();
            for (o, rep) in tab.reps.iter().enumerate() {
                let psi = compose_raw(rep, &alpha.m, g.rank(), t.rank(), t2.rank(), &g.moduli());
                let idx = tab2.codes.binary_search(&shape2.encode(&psi)).expect("composite is an epi");
                let (o2, a) = tab2.place[idx];
                // rep∘α = a∘rep', and a∘rep' ⊗ v = rep' ⊗ a^*v
                let act = self.act(j, a)?;
                for k in 0..dv {
                    for l in 0..dv {
                        let x = act.get(l, k);
                        if !x.is_zero() {
                            m.set(off2[j] + o2 * dv + l, off[j] + o * dv + k, x.clone());
                        }
                    }
                }
            }
        }
        Ok(m)
    }
}

/// Kernel of an [`InducedSum`]'s counit, with bases from echelon forms.
pub struct KernelModule {
    source: Arc<InducedSum>,
    cache: Mutex<HashMap<GroupType, Arc<Span>>>,
}

impl KernelModule {
    fn new(source: Arc<InducedSum>) -> Self {
        KernelModule { source, cache: Mutex::new(HashMap::new()) }
    }

    fn span(&self, t: &GroupType) -> Result<Arc<Span>> {
        if let Some(s) = self.cache.lock().get(t) {
            return Ok(s.clone());
        }
        let c = self.source.counit(t)?;
        let mut span = Span::new(c.cols);
        for v in snf_reduce(&c).kernel_basis {
            span.insert_dense(&v);
        }
        let span = Arc::new(span);
        self.cache.lock().insert(t.clone(), span.clone());
        Ok(span)
    }

    /// Basis vectors of `K(T)` in coordinates of the ambient term.
    fn basis(&self, t: &GroupType) -> Result<Vec<SVec>> {
        Ok(self.span(t)?.basis())
    }
}

impl FinModule for KernelModule {
    fn family(&self) -> &Family {
        &self.source.family
    }
    fn dim(&self, t: &GroupType) -> Result<usize> {
        Ok(self.span(t)?.rank())
    }
    fn pullback(&self, alpha: &Morphism) -> Result<RationalMatrix> {
        let (s2, s) = (self.span(&alpha.source)?, self.span(&alpha.target)?);
        let pb = self.source.pullback(alpha)?;
        let mut m = RationalMatrix::zeros(s2.rank(), s.rank());
        for (k, b) in s.basis().iter().enumerate() {
            let w = pb.apply(&dense(b, pb.cols));
            let c = s2
                .coordinates(&sparse_from_dense(&w))
                .ok_or_else(|| Error::ShapeMismatch("kernel not preserved by pullback".into()))?;
            for (l, x) in c.into_iter().enumerate() {
                if !x.is_zero() {
                    m.set(l, k, x);
                }
            }
        }
        Ok(m)
    }
}

fn dense(v: &SVec, n: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); n];
    for (i, x) in v {
        out[*i] = x.clone();
    }
    out
}

/// An `Aut(G)`-stable complement of the decomposables `D` of `y` at `g`.
///
/// With `B` a basis of `D` and `A_a` the action of `a` on it, an equivariant
/// projection onto `D` is `B·C` where `C B = 1` and `C M_a = A_a C` for
/// generators `a`; such `C` exists by semisimplicity and `ker C` is the
/// complement.
fn minimal_generators(y: &dyn FinModule, g: &GroupType) -> Result<Span> {
    let d = y.dim(g)?;
    let dec = decomposables(y, g)?;
    let mut out = Span::new(d);
    let r = dec.rank();
    if r == d {
        return Ok(out);
    }
    if r == 0 {
        for i in 0..d {
            out.insert(&vec![(i, q(1))]);
        }
        return Ok(out);
    }
    let basis = dec.basis();
    // unknowns: C[i][k] at i*d + k, then the scalar t at r*d
    let nvar = r * d + 1;
    let mut eqs: Vec<Vec<Q>> = vec![];
    for i in 0..r {
        for j in 0..r {
            let mut e = vec![Q::zero(); nvar];
            for (k, x) in &basis[j] {
                e[i * d + k] = x.clone();
            }
            if i == j {
                e[r * d] = q(-1);
            }
            eqs.push(e);
        }
    }
    for a in aut_generators(g) {
        let m = y.pullback(&a)?;
        // A_a: coordinates of M_a b_j in the basis of D
        let mut am = RationalMatrix::zeros(r, r);
        for (j, b) in basis.iter().enumerate() {
            let w = m.apply(&dense(b, d));
            let c = dec
                .coordinates(&sparse_from_dense(&w))
                .ok_or_else(|| Error::ShapeMismatch("decomposables not Aut-stable".into()))?;
            for (l, x) in c.into_iter().enumerate() {
                am.set(l, j, x);
            }
        }
        // (C M)[i][k] − (A C)[i][k] = 0
        for i in 0..r {
            for k in 0..d {
                let mut e = vec![Q::zero(); nvar];
                for l in 0..d {
                    let x = m.get(l, k);
                    if !x.is_zero() {
                        e[i * d + l] += x;
                    }
                }
                for l in 0..r {
                    let x = am.get(i, l);
                    if !x.is_zero() {
                        e[l * d + k] -= x;
                    }
                }
                if e.iter().any(|x| !x.is_zero()) {
                    eqs.push(e);
                }
            }
        }
    }
    let mut sys = RationalMatrix::zeros(eqs.len(), nvar);
    for (row, e) in eqs.into_iter().enumerate() {
        for (col, x) in e.into_iter().enumerate() {
            if !x.is_zero() {
                sys.set(row, col, x);
            }
        }
    }
    let sol = snf_reduce(&sys)
        .kernel_basis
        .into_iter()
        .find(|v| !v[r * d].is_zero())
        .ok_or_else(|| Error::ShapeMismatch(format!("no equivariant projection at {g}")))?;
    let t = sol[r * d].clone();
    let mut c = RationalMatrix::zeros(r, d);
    for i in 0..r {
        for k in 0..d {
            let x = &sol[i * d + k] / &t;
            if !x.is_zero() {
                c.set(i, k, x);
            }
        }
    }
    for v in snf_reduce(&c).kernel_basis {
        out.insert_dense(&v);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct ResolutionLevel {
    pub level: usize,
    /// `(G, dim V_G)` for each summand `e_G ⊗_{Aut G} V_G`.
    pub generators: Vec<(GroupType, usize)>,
    /// Per summand, the images of `V_G` in the previous term at `G`
    /// (in `X(G)` for level 0), one column per basis vector.
    pub differential: Vec<RationalMatrix>,
    /// Whether `Q(d_k) = 0`; `None` at level 0.
    pub q_differential_zero: Option<bool>,
}

#[derive(Serialize)]
pub struct Resolution {
    pub family: Family,
    pub bound: u64,
    pub minimal: bool,
    pub levels: Vec<ResolutionLevel>,
    #[serde(skip)]
    pub terms: Vec<Arc<InducedSum>>,
}

impl Resolution {
    /// Number of nonzero terms.
    pub fn length(&self) -> usize {
        self.levels.len()
    }
}

/// A projective resolution of `x` valid on members of order `≤ bound`, with at
/// most `depth + 1` terms.
pub fn resolution(x: &PresentedObject, bound: u64, depth: usize, minimal: bool) -> Result<Resolution> {
    if bound > RESOLUTION_BOUND {
        return Err(Error::ScaleExceeded { what: "resolution bound".into(), got: bound, bound: RESOLUTION_BOUND });
    }
    let family = x.family.truncated(bound);
    let members = family.members(bound);
    let mut covered: Arc<dyn FinModule> = Arc::new(Evaluator::new(x.with_family(family.clone())?));
    let mut prev: Option<Arc<InducedSum>> = None;
    let mut levels = vec![];
    let mut terms = vec![];
    for level in 0..=depth {
        if members.iter().try_fold(true, |z, t| Ok::<_, Error>(z && covered.dim(t)? == 0))? {
            return Ok(Resolution { family, bound, minimal, levels, terms });
        }
        let mut spaces = vec![];
        for g in &members {
            let d = covered.dim(g)?;
            if d == 0 {
                continue;
            }
            let span = if minimal {
                minimal_generators(covered.as_ref(), g)?
            } else {
                let mut s = Span::new(d);
                for i in 0..d {
                    s.insert(&vec![(i, q(1))]);
                }
                s
            };
            spaces.push((g.clone(), span));
        }
        let p = Arc::new(InducedSum::new(family.clone(), covered.clone(), spaces)?);
        // images of the generators in the previous term
        let mut differential = vec![];
        let mut q_zero = true;
        for term in &p.terms {
            let vectors: Vec<SVec> = match &prev {
                None => term.basis.clone(),
                Some(pk) => {
                    let kb = KernelModule::new(pk.clone()).basis(&term.g)?;
                    term.basis
                        .iter()
                        .map(|c| {
                            let mut acc: std::collections::BTreeMap<usize, Q> = Default::default();
                            for (i, x) in c {
                                for (j, y) in &kb[*i] {
                                    *acc.entry(*j).or_insert_with(Q::zero) += x * y;
                                }
                            }
                            crate::linalg::sparse_from_map(acc)
                        })
                        .collect()
                }
            };
            let rows = match &prev {
                None => covered.dim(&term.g)?,
                Some(pk) => pk.dim(&term.g)?,
            };
            if let Some(pk) = &prev {
                let dec = decomposables(pk.as_ref(), &term.g)?;
                q_zero &= vectors.iter().all(|v| dec.contains(v));
            }
            let mut m = RationalMatrix::zeros(rows, vectors.len());
            for (c, v) in vectors.iter().enumerate() {
                for (r, x) in v {
                    m.set(*r, c, x.clone());
                }
            }
            differential.push(m);
        }
        if minimal && prev.is_some() {
            assert!(q_zero, "minimal resolution with Q(d) ≠ 0");
        }
        levels.push(ResolutionLevel {
            level,
            generators: p.generators(),
            differential,
            q_differential_zero: prev.as_ref().map(|_| q_zero),
        });
        terms.push(p.clone());
        covered = Arc::new(KernelModule::new(p.clone()));
        prev = Some(p);
    }
    if members.iter().try_fold(true, |z, t| Ok::<_, Error>(z && covered.dim(t)? == 0))? {
        return Ok(Resolution { family, bound, minimal, levels, terms });
    }
    Err(Error::DepthExceeded(depth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functor::builtin::{builtin_to_presentation, e, misc_a, Builtin};

    fn g(p: u64, l: &[u32]) -> GroupType {
        GroupType::new(p, l.to_vec()).unwrap()
    }

    #[test]
    fn free_object_resolves_in_degree_zero() {
        let fam = Family::all(2);
        let x = e(&fam, &g(2, &[1])).unwrap();
        for minimal in [true, false] {
            let r = resolution(&x, 8, 3, minimal).unwrap();
            if minimal {
                assert_eq!(r.levels.len(), 1);
                assert_eq!(r.levels[0].generators, vec![(g(2, &[1]), 1)]);
            }
            for t in fam.members(8) {
                let d = Evaluator::new(x.clone()).dim(&t).unwrap();
                assert_eq!(r.terms[0].counit(&t).unwrap().rank(), d);
            }
        }
    }

    #[test]
    fn t_trivial_in_cyclic_family() {
        let cyc = Family::cyclic(2);
        let x = builtin_to_presentation(&Builtin::TTriv { group: g(2, &[]) }, &cyc, 8).unwrap();
        let r = resolution(&x, 8, 4, true).unwrap();
        let gens: Vec<_> = r.levels.iter().map(|l| l.generators.clone()).collect();
        assert_eq!(gens, vec![vec![(g(2, &[]), 1)], vec![(g(2, &[1]), 1)]]);
        assert_eq!(r.levels[1].q_differential_zero, Some(true));
    }

    fn euler_check(x: &PresentedObject, r: &Resolution) {
        let ev = Evaluator::new(x.clone());
        for t in r.family.members(r.bound) {
            let mut chi: i64 = 0;
            for (k, p) in r.terms.iter().enumerate() {
                let d = p.dim(&t).unwrap() as i64;
                chi += if k % 2 == 0 { d } else { -d };
            }
            assert_eq!(chi, ev.dim(&t).unwrap() as i64, "Euler characteristic at {t}");
        }
    }

    #[test]
    fn misc_a_resolutions_terminate() {
        let x = misc_a(3).unwrap();
        let r = resolution(&x, 27, 6, true).unwrap();
        euler_check(&x, &r);
        assert!(r.levels.iter().skip(1).all(|l| l.q_differential_zero == Some(true)));
        let c = resolution(&x, 9, 6, false).unwrap();
        euler_check(&x, &c);
        // base grows with the level
        let base_x = 3u64;
        for (k, p) in c.terms.iter().enumerate() {
            let base = c.family.members(9).into_iter().find(|t| p.dim(t).unwrap() > 0).unwrap().order();
            assert!(base >= base_x + k as u64);
        }
    }

    #[test]
    fn depth_is_enforced() {
        let x = misc_a(3).unwrap();
        assert!(matches!(resolution(&x, 27, 0, true), Err(Error::DepthExceeded(0))));
    }
}
