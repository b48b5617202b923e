//! Functors given by explicit values and pullback matrices, as opposed to a
//! presentation. Used for the builtin objects that are not free, for tensor
//! products, and for the terms of resolutions. [`present`] turns any of them
//! into a [`PresentedObject`] valid up to an order bound.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use parking_lot::Mutex;

use crate::error::{Error, Result};
use crate::family::Family;
use crate::group::{aut_generators, compose_raw, enumerate_epis, epi_codes, for_each_epi, GroupType, HomShape, Morphism};
use crate::linalg::{snf_reduce, sparse_from_dense, RationalMatrix, SVec, Span, Q};
use crate::subgroup::enumerate_subgroups;

use super::{Evaluator, MorphismCombination, PresentedObject, Relation};

/// A functor described by `dim X(T)` and the matrices of `α^*`.
pub trait FinModule: Send + Sync {
    fn family(&self) -> &Family;
    fn dim(&self, t: &GroupType) -> Result<usize>;
    /// Matrix of `α^*: X(target) → X(source)`.
    fn pullback(&self, alpha: &Morphism) -> Result<RationalMatrix>;
}

impl FinModule for Evaluator {
    fn family(&self) -> &Family {
        &self.object.family
    }
    fn dim(&self, t: &GroupType) -> Result<usize> {
        Evaluator::dim(self, t)
    }
    fn pullback(&self, alpha: &Morphism) -> Result<RationalMatrix> {
        self.structure_map(alpha)
    }
}

/// `Σ_{1≠N} π_N^* X(G/N)` inside `X(G)`, over `N` with `G/N` in the family.
/// For quotient-closed families the subgroups of order `p` suffice.
pub fn decomposables(x: &dyn FinModule, g: &GroupType) -> Result<Span> {
    let fam = x.family();
    let mut span = Span::new(x.dim(g)?);
    if g.is_trivial() {
        return Ok(span);
    }
    let subs = if fam.downward_closed() {
        enumerate_subgroups(g, Some(g.p))?
    } else {
        enumerate_subgroups(g, None)?.into_iter().filter(|s| s.order() > 1).collect()
    };
    for s in subs {
        let q = s.quotient();
        if !fam.contains(&q.quotient) {
            continue;
        }
        let m = x.pullback(&q.projection)?;
        for j in 0..m.cols {
            span.insert(&m.column(j));
        }
    }
    Ok(span)
}

// ---- t_{G,k} ----------------------------------------------------------------

struct OrbitTable {
    codes: Vec<u64>,
    orbit: Vec<usize>,
    reps: Vec<usize>,
}

/// `t_{G,k}(T) = Map_{Aut G}(Epi(G,T), k)`: functions constant on the orbits
/// of `Aut(G)` acting on `Epi(G,T)` by precomposition. The basis is the
/// orbit indicators, ordered by the least code in each orbit.
pub struct TModule {
    family: Family,
    g: GroupType,
    gens: Vec<Morphism>,
    cache: Mutex<HashMap<GroupType, Arc<OrbitTable>>>,
}

impl TModule {
    pub fn new(family: Family, g: GroupType) -> Result<Self> {
        family.check_member(&g)?;
        let gens = aut_generators(&g);
        Ok(TModule { family, g, gens, cache: Mutex::new(HashMap::new()) })
    }

    fn table(&self, t: &GroupType) -> Arc<OrbitTable> {
        if let Some(x) = self.cache.lock().get(t) {
            return x.clone();
        }
        let shape = HomShape::new(&self.g, t);
        let codes = epi_codes(&self.g, t);
        let n = codes.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let r = self.g.rank();
        for (k, &c) in codes.iter().enumerate() {
            let psi = shape.decode(c);
            for a in &self.gens {
                let m = compose_raw(&psi, &a.m, t.rank(), r, r, &t.moduli());
                let other = codes.binary_search(&shape.encode(&m)).unwrap();
                let (x, y) = (find(&mut parent, k), find(&mut parent, other));
                if x != y {
                    parent[x.max(y)] = x.min(y);
                }
            }
        }
        let mut orbit = vec![0; n];
        let mut reps = vec![];
        let mut id_of_root: HashMap<usize, usize> = HashMap::new();
        for k in 0..n {
            let root = find(&mut parent, k);
            let next = id_of_root.len();
            let id = *id_of_root.entry(root).or_insert_with(|| {
                reps.push(k);
                next
            });
            orbit[k] = id;
        }
        let tab = Arc::new(OrbitTable { codes, orbit, reps });
        self.cache.lock().insert(t.clone(), tab.clone());
        tab
    }
}

impl FinModule for TModule {
    fn family(&self) -> &Family {
        &self.family
    }

    fn dim(&self, t: &GroupType) -> Result<usize> {
        self.family.check_member(t)?;
        Ok(self.table(t).reps.len())
    }

    fn pullback(&self, alpha: &Morphism) -> Result<RationalMatrix> {
        let (tp, t) = (&alpha.source, &alpha.target);
        let (tab, tabp) = (self.table(t), self.table(tp));
        let shape_p = HomShape::new(&self.g, tp);
        let shape = HomShape::new(&self.g, t);
        let mut m = RationalMatrix::zeros(tabp.reps.len(), tab.reps.len());
        for (row, &k) in tabp.reps.iter().enumerate() {
            let psi = shape_p.decode(tabp.codes[k]);
            let comp = compose_raw(&alpha.m, &psi, t.rank(), tp.rank(), self.g.rank(), &t.moduli());
            let idx = tab.codes.binary_search(&shape.encode(&comp)).unwrap();
            m.set(row, tab.orbit[idx], Q::one());
        }
        Ok(m)
    }
}

// ---- s_{G,k} and χ ------------------------------------------------------------

/// `s_{G,k}`: `k` at groups isomorphic to `G`, zero elsewhere.
pub struct SModule {
    family: Family,
    g: GroupType,
}

impl SModule {
    pub fn new(family: Family, g: GroupType) -> Result<Self> {
        family.check_member(&g)?;
        Ok(SModule { family, g })
    }
}

impl FinModule for SModule {
    fn family(&self) -> &Family {
        &self.family
    }
    fn dim(&self, t: &GroupType) -> Result<usize> {
        self.family.check_member(t)?;
        Ok((*t == self.g) as usize)
    }
    fn pullback(&self, alpha: &Morphism) -> Result<RationalMatrix> {
        let (a, b) = ((alpha.source == self.g) as usize, (alpha.target == self.g) as usize);
        let mut m = RationalMatrix::zeros(a, b);
        if a == 1 && b == 1 {
            m.set(0, 0, Q::one());
        }
        Ok(m)
    }
}

/// Characteristic function of the members with order in `[lo, hi]`.
pub struct ChiModule {
    family: Family,
    lo: u64,
    hi: u64,
}

impl ChiModule {
    pub fn new(family: Family, lo: u64, hi: u64) -> Self {
        ChiModule { family, lo, hi }
    }
    fn inside(&self, t: &GroupType) -> bool {
        (self.lo..=self.hi).contains(&t.order())
    }
}

impl FinModule for ChiModule {
    fn family(&self) -> &Family {
        &self.family
    }
    fn dim(&self, t: &GroupType) -> Result<usize> {
        self.family.check_member(t)?;
        Ok(self.inside(t) as usize)
    }
    fn pullback(&self, alpha: &Morphism) -> Result<RationalMatrix> {
        let (a, b) = (self.inside(&alpha.source) as usize, self.inside(&alpha.target) as usize);
        let mut m = RationalMatrix::zeros(a, b);
        if a == 1 && b == 1 {
            m.set(0, 0, Q::one());
        }
        Ok(m)
    }
}

/// Pointwise tensor product.
pub struct TensorModule {
    pub left: Arc<dyn FinModule>,
    pub right: Arc<dyn FinModule>,
}

impl FinModule for TensorModule {
    fn family(&self) -> &Family {
        self.left.family()
    }
    fn dim(&self, t: &GroupType) -> Result<usize> {
        Ok(self.left.dim(t)? * self.right.dim(t)?)
    }
    fn pullback(&self, alpha: &Morphism) -> Result<RationalMatrix> {
        let a = self.left.pullback(alpha)?;
        let b = self.right.pullback(alpha)?;
        let mut m = RationalMatrix::zeros(a.rows * b.rows, a.cols * b.cols);
        for i in 0..a.rows {
            for j in 0..a.cols {
                let x = a.get(i, j);
                if x.is_zero() {
                    continue;
                }
                for k in 0..b.rows {
                    for l in 0..b.cols {
                        let y = b.get(k, l);
                        if !y.is_zero() {
                            m.set(i * b.rows + k, j * b.cols + l, x * y);
                        }
                    }
                }
            }
        }
        Ok(m)
    }
}

// ---- presentations ------------------------------------------------------------

/// A presentation agreeing with `x` on every member of order at most `scale`.
///
/// Members are visited in increasing order. At each `T` the images of the
/// generators found so far are compared with `X(T)`; missing directions become
/// new generators at `T`. Then the kernel of `⊕ k[Epi(T, G_i)] → X(T)` is
/// compared with the pullbacks of earlier relations; missing kernel vectors
/// become new relations with source `T`.
pub fn present(x: &dyn FinModule, scale: u64) -> Result<PresentedObject> {
    let fam = x.family().clone();
    let mut gens: Vec<(GroupType, Vec<Q>)> = vec![];
    let mut rels: Vec<(GroupType, SVec)> = vec![];
    for t in fam.members(scale) {
        let d = x.dim(&t)?;
        // labels of P0(T)
        let mut labels: Vec<(usize, Morphism)> = vec![];
        let mut cols: Vec<Vec<Q>> = vec![];
        let mut image = Span::new(d);
        for (i, (gi, xi)) in gens.iter().enumerate() {
            for phi in enumerate_epis(&t, gi) {
                let v = x.pullback(&phi)?.apply(xi);
                image.insert_dense(&v);
                cols.push(v);
                labels.push((i, phi));
            }
        }
        let mut auts: Option<Vec<Morphism>> = None;
        let aut_list = |auts: &mut Option<Vec<Morphism>>| -> Vec<Morphism> {
            auts.get_or_insert_with(|| enumerate_epis(&t, &t)).clone()
        };
        for k in 0..d {
            if image.rank() == d {
                break;
            }
            let mut e = vec![Q::zero(); d];
            e[k] = Q::one();
            if image.contains(&sparse_from_dense(&e)) {
                continue;
            }
            let i = gens.len();
            gens.push((t.clone(), e.clone()));
            for a in aut_list(&mut auts) {
                let v = x.pullback(&a)?.apply(&e);
                image.insert_dense(&v);
                cols.push(v);
                labels.push((i, a));
            }
        }
        let n = labels.len();
        if n == 0 {
            continue;
        }
        let index: HashMap<(usize, Vec<i64>), usize> =
            labels.iter().enumerate().map(|(k, (i, m))| ((*i, m.m.clone()), k)).collect();
        // kernel of P0(T) → X(T)
        let mut f = RationalMatrix::zeros(d, n);
        for (c, v) in cols.iter().enumerate() {
            for (r, q) in v.iter().enumerate() {
                if !q.is_zero() {
                    f.set(r, c, q.clone());
                }
            }
        }
        let kernel = snf_reduce(&f).kernel_basis;
        if kernel.is_empty() {
            continue;
        }
        let mut rspan = Span::new(n);
        for (h, r) in &rels {
            for beta in enumerate_epis(&t, h) {
                let v = pull_relation(r, h, &gens, &beta, &index);
                rspan.insert(&v);
            }
        }
        for v in kernel {
            let sv = sparse_from_dense(&v);
            if rspan.contains(&sv) {
                continue;
            }
            for a in aut_list(&mut auts) {
                rspan.insert(&pull_relation(&sv, &t, &gens, &a, &index));
            }
            rels.push((t.clone(), sv));
        }
    }
    // assemble
    let generators: Vec<GroupType> = gens.iter().map(|(g, _)| g.clone()).collect();
    let mut relations = vec![];
    for (h, r) in &rels {
        let labels: Vec<(usize, Morphism)> = gens
            .iter()
            .enumerate()
            .flat_map(|(i, (gi, _))| enumerate_epis(h, gi).into_iter().map(move |m| (i, m)))
            .collect();
        let mut per_gen: std::collections::BTreeMap<usize, Vec<(Morphism, Q)>> = Default::default();
        for (k, c) in r {
            let (i, m) = &labels[*k];
            per_gen.entry(*i).or_default().push((m.clone(), c.clone()));
        }
        let entries = per_gen
            .into_iter()
            .map(|(i, terms)| Ok((i, MorphismCombination::new(h, &generators[i], terms)?)))
            .collect::<Result<Vec<_>>>()?;
        relations.push(Relation { source: h.clone(), entries });
    }
    PresentedObject::new(fam, generators, relations)
}

/// Pullback along `beta: T → H` of a relation vector living in `P0(H)`,
/// expressed in the labels of `P0(T)`. Labels of `P0(H)` are enumerated in
/// the same (generator, lexicographic epi) order as in [`present`].
fn pull_relation(
    r: &SVec,
    h: &GroupType,
    gens: &[(GroupType, Vec<Q>)],
    beta: &Morphism,
    index: &HashMap<(usize, Vec<i64>), usize>,
) -> SVec {
    let mut labels: Vec<(usize, Vec<i64>)> = vec![];
    for (i, (gi, _)) in gens.iter().enumerate() {
        for_each_epi(h, gi, |m| {
            labels.push((i, m.to_vec()));
            true
        });
    }
    let t = &beta.source;
    let mut acc: std::collections::BTreeMap<usize, Q> = Default::default();
    for (k, c) in r {
        let (i, m) = &labels[*k];
        let gi = &gens[*i].0;
        let comp = compose_raw(m, &beta.m, gi.rank(), h.rank(), t.rank(), &gi.moduli());
        *acc.entry(index[&(*i, comp)]).or_insert_with(Q::zero) += c;
    }
    crate::linalg::sparse_from_map(acc)
}

/// Checks that a presentation reproduces the dimensions of `x` up to `scale`.
pub fn presentation_matches(x: &dyn FinModule, p: &PresentedObject, scale: u64) -> Result<bool> {
    let ev = Evaluator::new(p.clone());
    for t in x.family().members(scale) {
        if ev.dim(&t)? != x.dim(&t)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn not_supported(what: &str) -> Error {
    Error::FamilyUnsupported(what.to_string())
}
