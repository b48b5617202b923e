//! Finitely presented contravariant functors on a family of groups, with
//! values in rational vector spaces.
//!
//! A presentation lists generators `e_{G_i}` and relations. A relation has a
//! source group `H_j` and, for each generator, a combination of surjections
//! `H_j → G_i` (a map `e_{H_j} → e_{G_i}` by Yoneda). The value at `T` is
//! `⊕_i k[Epi(T, G_i)]` modulo the images of all `β ∈ Epi(T, H_j)`.

pub mod builtin;
pub mod finmod;
pub mod resolution;
pub mod tower;

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use parking_lot::Mutex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::family::Family;
use crate::group::{compose_raw, epi_codes, for_each_epi, GroupType, HomShape, Morphism};
use crate::linalg::{q_parse, q_to_string, BasedSpace, Quotient, RationalMatrix, SVec, Span, Q};
use crate::subgroup::enumerate_subgroups;

/// Largest number of basis labels or relation vectors an evaluation may touch.
pub const EVAL_BOUND: u64 = 2_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub morphism: Morphism,
    pub coeff: Q,
}

/// An element of `k[Epi(source, target)]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismCombination {
    pub source: GroupType,
    pub target: GroupType,
    /// Sorted by morphism, no zero coefficients, no repeated morphisms.
    pub terms: Vec<Term>,
}

impl MorphismCombination {
    pub fn new(source: &GroupType, target: &GroupType, terms: Vec<(Morphism, Q)>) -> Result<Self> {
        let mut acc: std::collections::BTreeMap<Morphism, Q> = Default::default();
        for (m, c) in terms {
            if m.source != *source || m.target != *target {
                return Err(Error::ShapeMismatch(format!("term {m} is not a map {source} -> {target}")));
            }
            if !m.is_surjective() {
                return Err(Error::NotSurjective);
            }
            *acc.entry(m).or_insert_with(Q::zero) += c;
        }
        let terms = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(morphism, coeff)| Term { morphism, coeff })
            .collect();
        Ok(MorphismCombination { source: source.clone(), target: target.clone(), terms })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// One relation column: source group and the nonzero entries per generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub source: GroupType,
    pub entries: Vec<(usize, MorphismCombination)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresentedObject {
    pub family: Family,
    pub generators: Vec<GroupType>,
    pub relations: Vec<Relation>,
}

impl PresentedObject {
    pub fn new(family: Family, generators: Vec<GroupType>, relations: Vec<Relation>) -> Result<Self> {
        for g in &generators {
            family.check_member(g)?;
        }
        for r in &relations {
            family.check_member(&r.source)?;
            for (i, c) in &r.entries {
                let g = generators
                    .get(*i)
                    .ok_or_else(|| Error::ShapeMismatch(format!("relation refers to generator {i}")))?;
                if c.source != r.source || &c.target != g {
                    return Err(Error::ShapeMismatch("relation entry has the wrong shape".into()));
                }
            }
        }
        Ok(PresentedObject { family, generators, relations })
    }

    /// Free object on the given generators.
    pub fn free(family: Family, generators: Vec<GroupType>) -> Result<Self> {
        Self::new(family, generators, vec![])
    }

    pub fn zero(family: Family) -> Self {
        PresentedObject { family, generators: vec![], relations: vec![] }
    }

    /// Direct sum.
    pub fn sum(&self, other: &PresentedObject) -> Result<PresentedObject> {
        if self.family != other.family {
            return Err(Error::ShapeMismatch("direct sum across families".into()));
        }
        let k = self.generators.len();
        let mut gens = self.generators.clone();
        gens.extend(other.generators.iter().cloned());
        let mut rels = self.relations.clone();
        for r in &other.relations {
            rels.push(Relation {
                source: r.source.clone(),
                entries: r.entries.iter().map(|(i, c)| (i + k, c.clone())).collect(),
            });
        }
        Ok(PresentedObject { family: self.family.clone(), generators: gens, relations: rels })
    }

    /// Same presentation read in another family containing all its groups.
    pub fn with_family(&self, family: Family) -> Result<PresentedObject> {
        Self::new(family, self.generators.clone(), self.relations.clone())
    }

    /// Largest order among generators and relation sources.
    pub fn degree(&self) -> u64 {
        self.generators
            .iter()
            .chain(self.relations.iter().map(|r| &r.source))
            .map(|g| g.order())
            .max()
            .unwrap_or(1)
    }
}

// ---- JSON -------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct RawTerm {
    matrix: Vec<Vec<i64>>,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct RawCombination {
    terms: Vec<RawTerm>,
}

#[derive(Serialize, Deserialize)]
struct RawObject {
    family: Family,
    generators: Vec<GroupType>,
    relation_sources: Vec<GroupType>,
    /// `relations[i][j]`: generator `i`, relation `j`.
    relations: Vec<Vec<RawCombination>>,
}

impl Serialize for PresentedObject {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut rows: Vec<Vec<RawCombination>> = self
            .generators
            .iter()
            .map(|_| self.relations.iter().map(|_| RawCombination { terms: vec![] }).collect())
            .collect();
        for (j, r) in self.relations.iter().enumerate() {
            for (i, c) in &r.entries {
                rows[*i][j].terms = c
                    .terms
                    .iter()
                    .map(|t| RawTerm { matrix: t.morphism.rows(), coeff: q_to_string(&t.coeff) })
                    .collect();
            }
        }
        RawObject {
            family: self.family.clone(),
            generators: self.generators.clone(),
            relation_sources: self.relations.iter().map(|r| r.source.clone()).collect(),
            relations: rows,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PresentedObject {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawObject::deserialize(d)?;
        if raw.relations.len() != raw.generators.len()
            || raw.relations.iter().any(|r| r.len() != raw.relation_sources.len())
        {
            return Err(D::Error::custom("relation matrix shape mismatch"));
        }
        let mut rels = vec![];
        for (j, h) in raw.relation_sources.iter().enumerate() {
            let mut entries = vec![];
            for (i, g) in raw.generators.iter().enumerate() {
                let mut terms = vec![];
                for t in &raw.relations[i][j].terms {
                    let m = crate::group::make_morphism(h, g, &t.matrix).map_err(D::Error::custom)?;
                    let c = q_parse(&t.coeff).ok_or_else(|| D::Error::custom(format!("bad rational {}", t.coeff)))?;
                    terms.push((m, c));
                }
                let comb = MorphismCombination::new(h, g, terms).map_err(D::Error::custom)?;
                if !comb.is_zero() {
                    entries.push((i, comb));
                }
            }
            rels.push(Relation { source: h.clone(), entries });
        }
        PresentedObject::new(raw.family, raw.generators, rels).map_err(D::Error::custom)
    }
}

// ---- evaluation -------------------------------------------------------------

struct Block {
    shape: HomShape,
    codes: Vec<u64>,
}

/// `X(T)` as a quotient of `⊕_i k[Epi(T, G_i)]`.
pub struct Evaluation {
    pub group: GroupType,
    blocks: Vec<Block>,
    offsets: Vec<usize>,
    pub quotient: Quotient,
}

impl Evaluation {
    pub fn dim(&self) -> usize {
        self.quotient.dim()
    }

    pub fn ambient_dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Ambient index of the label `(i, φ)`.
    pub fn index(&self, i: usize, m: &[i64]) -> usize {
        let b = &self.blocks[i];
        let c = b.shape.encode(m);
        self.offsets[i] + b.codes.binary_search(&c).expect("label is not a surjection")
    }

    /// Generator index and flat matrix of an ambient label.
    pub fn label(&self, idx: usize) -> (usize, Vec<i64>) {
        let i = self.offsets.partition_point(|&o| o <= idx) - 1;
        let b = &self.blocks[i];
        (i, b.shape.decode(b.codes[idx - self.offsets[i]]))
    }

    pub fn label_string(&self, idx: usize) -> String {
        let (i, m) = self.label(idx);
        let b = &self.blocks[i];
        let s = b.shape.cols;
        let rows: Vec<String> = (0..b.shape.rows)
            .map(|r| format!("{:?}", &m[r * s..(r + 1) * s]))
            .collect();
        format!("{}:[{}]", i, rows.join(","))
    }

    pub fn based_space(&self) -> BasedSpace {
        BasedSpace::new(self.quotient.basis.iter().map(|&i| self.label_string(i)).collect())
    }

    /// Class of an ambient vector in `X(T)` coordinates.
    pub fn project(&self, v: &SVec) -> Vec<Q> {
        self.quotient.project_dense(v)
    }

    /// Relation subspace of the ambient space.
    pub fn relations(&self) -> &Span {
        &self.quotient.span
    }
}

pub fn evaluate_raw(x: &PresentedObject, t: &GroupType) -> Result<Evaluation> {
    x.family.check_member(t)?;
    let mut blocks = vec![];
    let mut offsets = vec![0usize];
    let mut budget = 0u64;
    for g in &x.generators {
        let shape = HomShape::new(t, g);
        budget = budget.saturating_add(shape.hom_count().unwrap_or(u64::MAX));
        if budget > EVAL_BOUND.saturating_mul(16) {
            return Err(Error::ScaleExceeded { what: format!("hom-set size at {t}"), got: budget, bound: EVAL_BOUND });
        }
        let codes = epi_codes(t, g);
        offsets.push(offsets.last().unwrap() + codes.len());
        blocks.push(Block { shape, codes });
    }
    let n = *offsets.last().unwrap();
    if n as u64 > EVAL_BOUND {
        return Err(Error::ScaleExceeded { what: format!("dim e(T) at {t}"), got: n as u64, bound: EVAL_BOUND });
    }
    let mut span = Span::new(n);
    let mut ev = Evaluation { group: t.clone(), blocks, offsets, quotient: Quotient::new(Span::new(0)) };
    let mut count = 0u64;
    'outer: for r in &x.relations {
        if span.rank() == n {
            break;
        }
        let hr = r.source.rank();
        let tr = t.rank();
        let mut result = Ok(());
        for_each_epi(t, &r.source, |beta| {
            count += 1;
            if count > EVAL_BOUND {
                result = Err(Error::ScaleExceeded { what: format!("relation vectors at {t}"), got: count, bound: EVAL_BOUND });
                return false;
            }
            let mut acc: std::collections::BTreeMap<usize, Q> = Default::default();
            for (i, comb) in &r.entries {
                let g = &x.generators[*i];
                let gm = g.moduli();
                for term in &comb.terms {
                    let m = compose_raw(&term.morphism.m, beta, g.rank(), hr, tr, &gm);
                    *acc.entry(ev.index(*i, &m)).or_insert_with(Q::zero) += &term.coeff;
                }
            }
            span.insert(&crate::linalg::sparse_from_map(acc));
            span.rank() < n
        });
        result?;
        if span.rank() == n {
            break 'outer;
        }
    }
    ev.quotient = Quotient::new(span);
    Ok(ev)
}

/// Memoizing evaluator for one presented object.
pub struct Evaluator {
    pub object: PresentedObject,
    cache: Mutex<HashMap<GroupType, Arc<Evaluation>>>,
}

impl Evaluator {
    pub fn new(object: PresentedObject) -> Self {
        Evaluator { object, cache: Mutex::new(HashMap::new()) }
    }

    pub fn eval(&self, t: &GroupType) -> Result<Arc<Evaluation>> {
        if let Some(e) = self.cache.lock().get(t) {
            return Ok(e.clone());
        }
        let e = Arc::new(evaluate_raw(&self.object, t)?);
        self.cache.lock().insert(t.clone(), e.clone());
        Ok(e)
    }

    pub fn dim(&self, t: &GroupType) -> Result<usize> {
        Ok(self.eval(t)?.dim())
    }

    /// Matrix of `α^*: X(T) → X(T')` for `α: T' → T`.
    pub fn structure_map(&self, alpha: &Morphism) -> Result<RationalMatrix> {
        if !alpha.is_surjective() {
            return Err(Error::NotSurjective);
        }
        let (tp, t) = (&alpha.source, &alpha.target);
        let et = self.eval(t)?;
        let etp = self.eval(tp)?;
        let mut out = RationalMatrix::zeros(etp.dim(), et.dim());
        for (col, &idx) in et.quotient.basis.iter().enumerate() {
            let (i, m) = et.label(idx);
            let g = &self.object.generators[i];
            let composed = compose_raw(&m, &alpha.m, g.rank(), t.rank(), tp.rank(), &g.moduli());
            let v = vec![(etp.index(i, &composed), Q::one())];
            for (row, x) in etp.quotient.project(&v) {
                out.set(row, col, x);
            }
        }
        Ok(out)
    }

    /// `Σ_{N} π_N^* X(G/N)` over nontrivial `N` with `G/N` in the family.
    pub fn decomposables(&self, g: &GroupType) -> Result<Span> {
        finmod::decomposables(self, g)
    }
}

pub fn evaluate(x: &PresentedObject, t: &GroupType) -> Result<BasedSpace> {
    Ok(evaluate_raw(x, t)?.based_space())
}

pub fn structure_map(x: &PresentedObject, alpha: &Morphism) -> Result<RationalMatrix> {
    x.family.check_member(&alpha.source)?;
    x.family.check_member(&alpha.target)?;
    Evaluator::new(x.clone()).structure_map(alpha)
}

/// `(QX)(G)`: dimension and basis labels of the indecomposables.
pub fn indecomposables_q(x: &PresentedObject, g: &GroupType) -> Result<BasedSpace> {
    let ev = Evaluator::new(x.clone());
    let e = ev.eval(g)?;
    let d = ev.decomposables(g)?;
    let q = Quotient::new(d);
    Ok(BasedSpace::new(q.basis.iter().map(|&k| format!("{}", e.label_string(e.quotient.basis[k]))).collect()))
}

/// A subspace of `X(G)` given by a basis (rows of `basis`, in `X(G)` coordinates).
#[derive(Clone, Debug, Serialize)]
pub struct Subspace {
    pub ambient_dim: usize,
    pub dim: usize,
    pub basis: RationalMatrix,
}

impl Subspace {
    pub fn from_span(span: &Span) -> Self {
        let basis = span.basis();
        let mut m = RationalMatrix::zeros(basis.len(), span.ambient());
        for (r, v) in basis.iter().enumerate() {
            for (c, x) in v {
                m.set(r, *c, x.clone());
            }
        }
        Subspace { ambient_dim: span.ambient(), dim: basis.len(), basis: m }
    }
}

/// `(L_{≤n} X)(G)`: span of `α^* X(H)` over `|H| ≤ n`.
pub fn filtration_l(x: &PresentedObject, n: u64, g: &GroupType) -> Result<Subspace> {
    let ev = Evaluator::new(x.clone());
    let dim = ev.dim(g)?;
    let mut span = Span::new(dim);
    for s in enumerate_subgroups(g, None)? {
        if s.index() > n {
            continue;
        }
        let q = s.quotient();
        if !x.family.contains(&q.quotient) {
            continue;
        }
        let m = ev.structure_map(&q.projection)?;
        for j in 0..m.cols {
            span.insert(&m.column(j));
        }
    }
    Ok(Subspace::from_span(&span))
}

/// `base(X)` (None for the zero object within range) and the support.
#[derive(Clone, Debug, Serialize)]
pub struct BaseSupport {
    pub base: Option<u64>,
    pub support: Vec<GroupType>,
    pub bound: u64,
}

pub fn base_and_support(x: &PresentedObject, bound: u64) -> Result<BaseSupport> {
    let ev = Evaluator::new(x.clone());
    let mut support = vec![];
    for t in x.family.members(bound) {
        if ev.dim(&t)? > 0 {
            support.push(t);
        }
    }
    Ok(BaseSupport { base: support.iter().map(|t| t.order()).min(), support, bound })
}
