//! Property tests. Random inputs are drawn by proptest; several checks
//! compare against small brute-force oracles written here from scratch.

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use num_traits::Zero;
use proptest::prelude::*;
use proptest::test_runner::{RngAlgorithm, TestRng};
use serde_json::Value;

use repstab::cli::{parse_group_with, run};
use repstab::family::{lift_epi, Family};
use repstab::functor::builtin::{e, misc_a, misc_b};
use repstab::functor::finmod::{present, FinModule, TensorModule};
use repstab::functor::resolution::resolution;
use repstab::functor::tower::ColimitTower;
use repstab::functor::{base_and_support, Evaluator, MorphismCombination, PresentedObject, Relation};
use repstab::group::{count_epis, enumerate_epis, GroupType, HomShape, Morphism};
use repstab::linalg::{colimit_of_diagram, q, Arrow, FinitePosetDiagram, RationalMatrix, Span, Q};
use repstab::monoidal::tensor_decompose;
use repstab::stability::{central_stability_degree, omega_order, torsion_oracle_via_l, torsion_subspace, StabilityReport};
use repstab::subgroup::{kernel, quotient};
use repstab::wqo::{find_good_pair, product_le, Framing, OrderedLabeledSet};

fn g(p: u64, l: &[u32]) -> GroupType {
    GroupType::new(p, l.to_vec()).unwrap()
}

fn rng_from(seed: u64) -> TestRng {
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    TestRng::from_seed(RngAlgorithm::ChaCha, &bytes)
}

fn pick<T: Clone>(rng: &mut TestRng, xs: &[T]) -> T {
    xs[(rng.next_u32() as usize) % xs.len()].clone()
}

// ---- brute-force group helpers ---------------------------------------------------

fn add(gr: &GroupType, a: &[i64], b: &[i64]) -> Vec<i64> {
    gr.moduli().iter().zip(a.iter().zip(b)).map(|(m, (x, y))| (x + y).rem_euclid(*m)).collect()
}

/// Size of the subgroup generated by `gens`, by closure.
fn generated_order(gr: &GroupType, gens: &[Vec<i64>]) -> usize {
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let mut stack = vec![vec![0; gr.rank()]];
    while let Some(x) = stack.pop() {
        if seen.insert(x.clone()) {
            for s in gens {
                stack.push(add(gr, &x, s));
            }
        }
    }
    seen.len()
}

/// Surjections `t → gr` as images of the standard generators of `t`, found by
/// trying every tuple of elements.
fn brute_epis(t: &GroupType, gr: &GroupType) -> BTreeSet<Vec<Vec<i64>>> {
    let elems = gr.elements();
    let mods = gr.moduli();
    let r = t.rank();
    let mut out = BTreeSet::new();
    let total = elems.len().pow(r as u32);
    for code in 0..total {
        let imgs: Vec<Vec<i64>> = (0..r).map(|j| elems[(code / elems.len().pow(j as u32)) % elems.len()].clone()).collect();
        let well_defined = imgs.iter().zip(&t.lambda).all(|(x, &l)| {
            let ord = (t.p as i64).pow(l);
            x.iter().zip(&mods).all(|(c, m)| (c * ord) % m == 0)
        });
        if well_defined && generated_order(gr, &imgs) == elems.len() {
            out.insert(imgs);
        }
    }
    out
}

fn unit(n: usize, j: usize) -> Vec<i64> {
    (0..n).map(|i| i64::from(i == j)).collect()
}

fn images(f: &Morphism) -> Vec<Vec<i64>> {
    (0..f.source.rank()).map(|j| f.apply(&unit(f.source.rank(), j))).collect()
}

/// Row rank over `Q` by plain Gaussian elimination.
fn dense_rank(mut rows: Vec<Vec<Q>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(pr) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else { continue };
        rows.swap(rank, pr);
        let pivot = rows[rank][c].clone();
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_zero() {
                let f = &rows[r][c] / &pivot;
                for k in c..cols {
                    let d = &f * &rows[rank][k];
                    rows[r][k] -= d;
                }
            }
        }
        rank += 1;
    }
    rank
}

// ---- random presentations ----------------------------------------------------------

/// A presentation over `family` whose generators and relation sources are
/// drawn from `groups`, with up to two relations of up to two terms each.
fn random_object(seed: u64, family: &Family, groups: &[GroupType]) -> PresentedObject {
    let mut rng = rng_from(seed);
    let ngens = 1 + (rng.next_u32() % 2) as usize;
    let gens: Vec<GroupType> = (0..ngens).map(|_| pick(&mut rng, groups)).collect();
    let mut rels = vec![];
    for _ in 0..rng.next_u32() % 3 {
        let s = pick(&mut rng, groups);
        let mut entries = vec![];
        for (i, gi) in gens.iter().enumerate() {
            let epis = enumerate_epis(&s, gi);
            if epis.is_empty() || rng.next_u32() % 2 == 0 {
                continue;
            }
            let terms: Vec<(Morphism, Q)> =
                (0..1 + rng.next_u32() % 2).map(|_| (pick(&mut rng, &epis), q(pick(&mut rng, &[-2, -1, 1, 2])))).collect();
            let comb = MorphismCombination::new(&s, gi, terms).unwrap();
            if !comb.is_zero() {
                entries.push((i, comb));
            }
        }
        rels.push(Relation { source: s, entries });
    }
    PresentedObject::new(family.clone(), gens, rels).unwrap()
}

fn two_groups(max_order: u64) -> Vec<GroupType> {
    Family::all(2).members(max_order)
}

/// `dim X(T)` as the corank of the relation vectors in `⊕ k[Epi(T, G_i)]`,
/// all surjections found by brute force.
fn dense_dim(x: &PresentedObject, t: &GroupType) -> usize {
    let blocks: Vec<Vec<Vec<Vec<i64>>>> = x.generators.iter().map(|gi| brute_epis(t, gi).into_iter().collect()).collect();
    let mut offset = vec![0];
    for b in &blocks {
        offset.push(offset.last().unwrap() + b.len());
    }
    let ambient = *offset.last().unwrap();
    let mut rows = vec![];
    for r in &x.relations {
        for beta in brute_epis(t, &r.source) {
            let mut row = vec![Q::zero(); ambient];
            for (i, comb) in &r.entries {
                for term in &comb.terms {
                    let composed: Vec<Vec<i64>> = beta.iter().map(|b| term.morphism.apply(b)).collect();
                    let k = blocks[*i].binary_search(&composed).unwrap();
                    row[offset[*i] + k] += term.coeff.clone();
                }
            }
            rows.push(row);
        }
    }
    ambient - dense_rank(rows)
}

// ---- epimorphisms ----------------------------------------------------------------------

#[test]
fn epi_enumeration_matches_brute_force() {
    let mut pairs = 0;
    for p in [2u64, 3] {
        let groups = Family::all(p).members(if p == 2 { 16 } else { 27 });
        for t in &groups {
            for h in &groups {
                if (h.order() as usize).pow(t.rank() as u32) > 1 << 17 {
                    continue;
                }
                let brute = brute_epis(t, h);
                let lib: BTreeSet<Vec<Vec<i64>>> = enumerate_epis(t, h).iter().map(images).collect();
                assert_eq!(lib, brute, "Epi({t}, {h})");
                assert_eq!(count_epis(t, h), brute.len() as u64, "count of Epi({t}, {h})");
                pairs += 1;
            }
        }
    }
    assert!(pairs > 100);
}

fn small_pair(max_order: u64) -> impl Strategy<Value = (GroupType, GroupType)> {
    let groups = two_groups(max_order);
    let n = groups.len();
    (0..n, 0..n).prop_map(move |(i, j)| (groups[i].clone(), groups[j].clone()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn surjectivity_is_image_equality((s, t) in small_pair(64), seed in any::<u64>()) {
        let shape = HomShape::new(&s, &t);
        let total = shape.hom_count().unwrap();
        let f = Morphism { source: s.clone(), target: t.clone(), m: shape.decode(seed % total) };
        let img = generated_order(&t, &images(&f));
        prop_assert_eq!(f.is_surjective(), img as u64 == t.order());
    }

    #[test]
    fn first_isomorphism_theorem((s, t) in small_pair(16), seed in any::<u64>()) {
        let epis = enumerate_epis(&s, &t);
        prop_assume!(!epis.is_empty());
        let f = &epis[(seed % epis.len() as u64) as usize];
        let (qt, _) = quotient(&s, &kernel(f)).unwrap();
        prop_assert_eq!(qt, t);
    }

    #[test]
    fn surjections_are_epimorphisms((a, b) in small_pair(16), c_idx in any::<usize>(), seed in any::<u64>()) {
        let groups = two_groups(8);
        let c = &groups[c_idx % groups.len()];
        let s = enumerate_epis(&a, &b);
        prop_assume!(!s.is_empty());
        let s = &s[(seed % s.len() as u64) as usize];
        let epis = enumerate_epis(&b, c);
        let pulled: HashSet<Morphism> = epis.iter().map(|f| f.compose(s)).collect();
        prop_assert_eq!(pulled.len(), epis.len());
    }

    #[test]
    fn dotted_arrow_lifts(p in prop_oneof![Just(2u64), Just(3)], n in 1u32..3, r in 1usize..3, seeds in any::<(u64, u64, u64, u64)>()) {
        prop_assume!(p == 2 || n == 1);
        let a = GroupType::free(p, n, r);
        let bs: Vec<GroupType> = Family::all(p).members(a.order()).into_iter().filter(|b| b.exponent() <= n && b.rank() <= r).collect();
        let b = &bs[(seeds.0 % bs.len() as u64) as usize];
        let cs: Vec<GroupType> = Family::all(p).members(b.order()).into_iter().filter(|c| count_epis(b, c) > 0).collect();
        let c = &cs[(seeds.1 % cs.len() as u64) as usize];
        let alphas = enumerate_epis(&a, c);
        let betas = enumerate_epis(b, c);
        let alpha = &alphas[(seeds.2 % alphas.len() as u64) as usize];
        let beta = &betas[(seeds.3 % betas.len() as u64) as usize];
        let gamma = lift_epi(alpha, beta).unwrap();
        prop_assert!(gamma.is_surjective());
        prop_assert_eq!((&gamma.source, &gamma.target), (&a, b));
        prop_assert_eq!(&beta.compose(&gamma), alpha);
    }

    #[test]
    fn tensor_dims_are_products(gh in small_pair(8), ti in any::<usize>()) {
        let (gg, h) = gh;
        let ts = two_groups(16);
        let t = &ts[ti % ts.len()];
        let d = tensor_decompose(&gg, &h, &Family::all(2)).unwrap();
        let via_groups: u64 = d.summands.iter().map(|(w, k)| *k as u64 * count_epis(t, w)).sum();
        prop_assert_eq!(count_epis(t, &gg) * count_epis(t, &h), via_groups);
    }
}

// ---- evaluation ------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn evaluation_is_the_cokernel(seed in any::<u64>()) {
        let x = random_object(seed, &Family::all(2), &two_groups(8));
        let ev = Evaluator::new(x.clone());
        for t in two_groups(16) {
            prop_assert_eq!(ev.dim(&t).unwrap(), dense_dim(&x, &t), "X({}) for {:?}", t, x);
        }
    }

    #[test]
    fn structure_maps_are_functorial(seed in any::<u64>(), idx in any::<(usize, usize, usize, u64, u64)>()) {
        let x = random_object(seed, &Family::all(2), &two_groups(4));
        let ev = Evaluator::new(x);
        let groups = two_groups(32);
        let a = &groups[idx.0 % groups.len()];
        let below: Vec<&GroupType> = groups.iter().filter(|b| count_epis(a, b) > 0).collect();
        let b = below[idx.1 % below.len()];
        let lower: Vec<&GroupType> = groups.iter().filter(|c| count_epis(b, c) > 0).collect();
        let c = lower[idx.2 % lower.len()];
        let betas = enumerate_epis(a, b);
        let alphas = enumerate_epis(b, c);
        let beta = &betas[(idx.3 % betas.len() as u64) as usize];
        let alpha = &alphas[(idx.4 % alphas.len() as u64) as usize];
        let whole = ev.structure_map(&alpha.compose(beta)).unwrap();
        let parts = ev.structure_map(beta).unwrap().mul(&ev.structure_map(alpha).unwrap());
        prop_assert_eq!(whole, parts);
        let id = ev.structure_map(&Morphism::identity(a)).unwrap();
        prop_assert_eq!(id, RationalMatrix::identity(ev.dim(a).unwrap()));
    }

    #[test]
    fn indecomposable_surjectivity_detects_surjectivity(seed in any::<u64>()) {
        let mut rng = rng_from(seed);
        let groups = two_groups(4);
        let srcs: Vec<GroupType> = (0..1 + rng.next_u32() % 3).map(|_| pick(&mut rng, &groups)).collect();
        let tgts: Vec<GroupType> = (0..1 + rng.next_u32() % 2).map(|_| pick(&mut rng, &groups)).collect();
        // f(id_{G_a}) = Σ c·h over a few surjections h: G_a → H_b
        let mut f: Vec<Vec<(usize, Morphism, Q)>> = vec![];
        for s in &srcs {
            let mut terms = vec![];
            for (b, h) in tgts.iter().enumerate() {
                let epis = enumerate_epis(s, h);
                if !epis.is_empty() && rng.next_u32() % 3 != 0 {
                    terms.push((b, pick(&mut rng, &epis), q(pick(&mut rng, &[-1, 1, 2]))));
                }
            }
            f.push(terms);
        }
        let y = Evaluator::new(PresentedObject::free(Family::all(2), tgts).unwrap());
        let (mut all_q, mut all_f) = (true, true);
        for t in two_groups(16) {
            let ey = y.eval(&t).unwrap();
            let mut span = Span::new(ey.dim());
            for (a, s) in srcs.iter().enumerate() {
                for gamma in enumerate_epis(&t, s) {
                    let mut v = std::collections::BTreeMap::new();
                    for (b, h, c) in &f[a] {
                        let k = ey.index(*b, &h.compose(&gamma).m);
                        *v.entry(k).or_insert_with(Q::zero) += c.clone();
                    }
                    span.insert(&v.into_iter().filter(|(_, c)| !c.is_zero()).collect());
                }
            }
            all_f &= span.rank() == ey.dim();
            for w in y.decomposables(&t).unwrap().basis() {
                span.insert(&w);
            }
            all_q &= span.rank() == ey.dim();
        }
        prop_assert!(!all_q || all_f, "Qf onto but f not onto");
        prop_assert!(!all_f || all_q);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn resolutions_cover_and_climb(seed in any::<u64>()) {
        let fam = Family::all(2);
        let x = random_object(seed, &fam, &two_groups(4));
        let bound = 8;
        let ev = Evaluator::new(x.clone());
        let r = resolution(&x, bound, 3, false).unwrap();
        for t in fam.members(bound) {
            let covered = r.terms.first().map_or(0, |p0| p0.counit(&t).unwrap().rank());
            prop_assert_eq!(covered, ev.dim(&t).unwrap(), "counit at {}", t);
        }
        let Some(base_x) = base_and_support(&x, bound).unwrap().base else { return Ok(()) };
        for (k, p) in r.terms.iter().enumerate() {
            if let Some(t) = fam.members(bound).into_iter().find(|t| p.dim(t).unwrap() > 0) {
                prop_assert!(t.order() >= base_x + k as u64, "base of P_{} is {}, base X = {}", k, t.order(), base_x);
            }
        }
    }

    #[test]
    fn central_stability_within_presentation_degree(seed in any::<u64>()) {
        let fam = Family::elementary(2);
        let x = random_object(seed, &fam, &fam.members(4));
        let rep = central_stability_degree(&x, 16).unwrap();
        let n = rep.central_degree.expect("no stable range found");
        prop_assert!(n <= x.degree().max(1), "degree {} above {}", n, x.degree());
        let back: StabilityReport = serde_json::from_str(&serde_json::to_string(&rep).unwrap()).unwrap();
        prop_assert_eq!(back, rep);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn torsion_algorithms_agree(seed in any::<u64>(), p in prop_oneof![Just(2u64), Just(3)]) {
        let fam = Family::cyclic(p);
        let x = random_object(seed, &fam, &fam.members(p * p));
        let tower = ColimitTower::for_family(&fam).unwrap();
        let ev = Evaluator::new(x.clone());
        for t in fam.members(p * p * p) {
            let tors = torsion_subspace(&x, &t, &tower, 8).unwrap();
            let d = ev.dim(&t).unwrap();
            let mut span = Span::new(d);
            for v in &tors.vectors {
                span.insert_dense(&v.iter().map(|r| r.0.clone()).collect::<Vec<_>>());
            }
            for k in 0..d {
                let ek: Vec<Q> = (0..d).map(|i| q(i64::from(i == k))).collect();
                let oracle = torsion_oracle_via_l(&x, &t, &ek, &tower, 8).unwrap();
                prop_assert_eq!(oracle, span.contains(&vec![(k, q(1))]), "basis vector {} of X({})", k, t);
            }
        }
    }
}

// ---- colimits ----------------------------------------------------------------------------

fn square(d: usize) -> impl Strategy<Value = RationalMatrix> {
    proptest::collection::vec(-2i64..3, d * d)
        .prop_map(move |v| RationalMatrix::from_ints(&v.chunks(d).map(|c| c.to_vec()).collect::<Vec<_>>()))
}

proptest! {
    #[test]
    fn colimit_of_isomorphisms_is_the_terminal_node(
        (d, mats) in (1usize..4).prop_flat_map(|d| (Just(d), proptest::collection::vec(square(d), 1..4))),
        star in any::<bool>(),
    ) {
        prop_assume!(mats.iter().all(|m| m.rank() == d));
        let k = mats.len();
        // a chain 0 → 1 → … → k, or a star into k; both commute
        let arrows = mats
            .into_iter()
            .enumerate()
            .map(|(i, matrix)| Arrow { from: i, to: if star { k } else { i + 1 }, matrix })
            .collect();
        let c = colimit_of_diagram(&FinitePosetDiagram { dims: vec![d; k + 1], arrows });
        prop_assert_eq!(c.space.dim, d);
        prop_assert!(c.maps[k].is_injective() && c.maps[k].is_surjective());
    }
}

// ---- torsion -----------------------------------------------------------------------------

/// Adds one relation per torsion vector of `x` at each member of order `≤ bound`.
fn mod_torsion(x: &PresentedObject, bound: u64, max_stage: usize) -> (PresentedObject, usize) {
    let tower = ColimitTower::for_family(&x.family).unwrap();
    let ev = Evaluator::new(x.clone());
    let mut rels = x.relations.clone();
    let mut killed = 0;
    for t in x.family.members(bound) {
        let tors = torsion_subspace(x, &t, &tower, max_stage).unwrap();
        let e = ev.eval(&t).unwrap();
        for v in &tors.vectors {
            let mut per_gen: Vec<Vec<(Morphism, Q)>> = vec![vec![]; x.generators.len()];
            for (k, c) in v.iter().enumerate() {
                if !c.0.is_zero() {
                    let (i, m) = e.label(e.quotient.basis[k]);
                    per_gen[i].push((Morphism { source: t.clone(), target: x.generators[i].clone(), m }, c.0.clone()));
                }
            }
            let entries = per_gen
                .into_iter()
                .enumerate()
                .filter(|(_, terms)| !terms.is_empty())
                .map(|(i, terms)| (i, MorphismCombination::new(&t, &x.generators[i], terms).unwrap()))
                .collect();
            rels.push(Relation { source: t.clone(), entries });
            killed += 1;
        }
    }
    (PresentedObject::new(x.family.clone(), x.generators.clone(), rels).unwrap(), killed)
}

#[test]
fn quotient_by_torsion_is_torsion_free() {
    for (x, bound) in [(misc_a(3).unwrap(), 27), (misc_b().unwrap(), 16)] {
        let (y, killed) = mod_torsion(&x, bound, 8);
        assert!(killed > 0);
        let tower = ColimitTower::for_family(&y.family).unwrap();
        for t in y.family.members(bound) {
            let tors = torsion_subspace(&y, &t, &tower, 8).unwrap();
            assert!(tors.vectors.is_empty(), "X/tors has torsion at {t}: {:?}", tors.vectors);
        }
    }
}

#[test]
fn tensor_with_torsion_is_torsion() {
    // misc-b is torsion in E[2]; so is its tensor with anything
    let fam = Family::elementary(2);
    let z = Arc::new(Evaluator::new(misc_b().unwrap().with_family(fam.clone()).unwrap()));
    let tower = ColimitTower::for_family(&fam).unwrap();
    for other in [e(&fam, &g(2, &[1])).unwrap(), e(&fam, &g(2, &[1, 1])).unwrap(), misc_b().unwrap().with_family(fam.clone()).unwrap()] {
        let prod = TensorModule { left: Arc::new(Evaluator::new(other)), right: z.clone() };
        let pres = present(&prod, 16).unwrap();
        let ev = Evaluator::new(pres.clone());
        for t in fam.members(16) {
            let tors = torsion_subspace(&pres, &t, &tower, 6).unwrap();
            assert_eq!(tors.vectors.len(), ev.dim(&t).unwrap(), "tensor not torsion at {t}");
        }
    }
}

// ---- growth orders -----------------------------------------------------------------------

#[test]
fn omega_is_subadditive_on_sums() {
    let fam = Family::elementary(2);
    let x = e(&fam, &g(2, &[1])).unwrap();
    let z = e(&fam, &g(2, &[1, 1])).unwrap();
    let xz = x.sum(&z).unwrap();
    for n in [1u64, 2, 4] {
        let [ox, oz, oxz] = [&x, &z, &xz].map(|o| omega_order(o, n, &fam, 6).unwrap());
        for t in [&ox, &oz, &oxz] {
            assert!(t.tail_max.windows(2).all(|w| w[0].1 .0 >= w[1].1 .0), "tail maxima increase");
        }
        for ((a, b), c) in ox.tail_max.iter().zip(&oz.tail_max).zip(&oxz.tail_max) {
            assert_eq!((a.0, b.0), (c.0, c.0));
            assert!(a.1 .0.clone().max(b.1 .0.clone()) <= c.1 .0, "n = {n}, m = {}", c.0);
            assert!(c.1 .0 <= &a.1 .0 + &b.1 .0, "n = {n}, m = {}", c.0);
        }
    }
}

// ---- well-quasi-orders -------------------------------------------------------------------

/// Longest bad sequence in `{0, 1, 2}²` under the product order, by search.
fn longest_bad_sequence() -> usize {
    fn rec(seq: &mut Vec<[u32; 2]>, pts: &[[u32; 2]]) -> usize {
        let mut best = seq.len();
        for p in pts {
            if seq.iter().all(|s| !product_le(s, p)) {
                seq.push(*p);
                best = best.max(rec(seq, pts));
                seq.pop();
            }
        }
        best
    }
    let pts: Vec<[u32; 2]> = (0..3).flat_map(|a| (0..3).map(move |b| [a, b])).collect();
    rec(&mut vec![], &pts)
}

fn point() -> impl Strategy<Value = [u32; 2]> {
    (0u32..3, 0u32..3).prop_map(|(a, b)| [a, b])
}

proptest! {
    #[test]
    fn long_sequences_have_good_pairs(seq in proptest::collection::vec(point(), 1..12)) {
        let bad_len = longest_bad_sequence();
        let found = find_good_pair(&seq, |a, b| product_le(a, b));
        let any_good = (0..seq.len()).any(|j| (0..j).any(|i| product_le(&seq[i], &seq[j])));
        prop_assert_eq!(found.is_some(), any_good);
        if let Some((i, j)) = found {
            prop_assert!(i < j && product_le(&seq[i], &seq[j]));
        }
        if seq.len() > bad_len {
            prop_assert!(found.is_some());
        }
    }
}

// ---- serialization -----------------------------------------------------------------------

fn group() -> impl Strategy<Value = GroupType> {
    (prop_oneof![Just(2u64), Just(3), Just(5)], proptest::collection::vec(1u32..5, 0..4)).prop_map(|(p, l)| g(p, &l))
}

fn roundtrip<T: serde::Serialize + serde::de::DeserializeOwned + PartialEq + std::fmt::Debug>(x: &T) -> Result<(), TestCaseError> {
    let s = serde_json::to_string(x).unwrap();
    let back: T = serde_json::from_str(&s).unwrap();
    prop_assert_eq!(&back, x);
    prop_assert_eq!(serde_json::to_string(&back).unwrap(), s);
    Ok(())
}

proptest! {
    #[test]
    fn groups_roundtrip(gr in group()) {
        roundtrip(&gr)?;
        prop_assert_eq!(parse_group_with(&gr.to_string(), Some(gr.p)).unwrap(), gr);
    }

    #[test]
    fn morphisms_roundtrip((s, t) in small_pair(16), seed in any::<u64>()) {
        let shape = HomShape::new(&s, &t);
        let f = Morphism { source: s, target: t, m: shape.decode(seed % shape.hom_count().unwrap()) };
        roundtrip(&f)?;
    }

    #[test]
    fn presentations_roundtrip(seed in any::<u64>()) {
        roundtrip(&random_object(seed, &Family::all(2), &two_groups(8)))?;
    }

    #[test]
    fn framings_roundtrip(labels in proptest::collection::vec(0u32..4, 1..5), seed in any::<u64>()) {
        let a = g(2, &[2, 1]);
        let elems = a.elements();
        let mut rng = rng_from(seed);
        let f = Framing {
            domain: OrderedLabeledSet::new(labels.clone()).unwrap(),
            target: a,
            assignment: labels.iter().map(|_| pick(&mut rng, &elems)).collect(),
        };
        roundtrip(&f)?;
    }

    #[test]
    fn matrices_roundtrip(m in square(3)) {
        roundtrip(&m)?;
    }
}

#[test]
fn families_roundtrip() {
    for s in ["Z2inf", "Zpn:3,2", "Cpinf:5", "Cpn:2,3", "Fpn:3,1", "Ep:7", "Z2inf<=64", "Ep:2<=16"] {
        let f: Family = s.parse().unwrap();
        assert_eq!(f.id().parse::<Family>().unwrap(), f, "{s}");
        let back: Family = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back, f);
    }
}

// ---- command line ------------------------------------------------------------------------

fn cli(args: &[&str]) -> (i32, String) {
    let (mut out, mut err) = (vec![], vec![]);
    let code = run(std::iter::once("repstab").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap())
}

#[test]
fn cli_output_is_deterministic_across_caches() {
    let commands: [&[&str]; 5] = [
        &["decompose-tensor", "--g", "C4", "--h", "C2^2", "--family", "Z2inf"],
        &["eval", "--object", "misc-a(3)", "--group", "C3^2"],
        &["stability-scan", "--object", "misc-a(3)", "--family", "Ep:3", "--max-rank", "3"],
        &["omega", "--object", "e(C2)", "--family", "Ep:2", "--n", "2", "--max-rank", "4"],
        &["framing-factor", "--group", "C4", "--labels", "[2,1,2]", "--assignment", "[[1],[2],[1]]"],
    ];
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for cmd in commands {
        for fmt in ["json", "csv"] {
            let with = |d: &tempfile::TempDir| {
                let mut v: Vec<&str> = cmd.to_vec();
                v.extend(["--format", fmt, "--cache", d.path().to_str().unwrap()]);
                cli(&v)
            };
            let cold = with(&a);
            assert_eq!(cold.0, 0, "{cmd:?}: {}", cold.1);
            assert_eq!(with(&a), cold, "warm cache differs for {cmd:?}");
            assert_eq!(with(&b), cold, "second cold run differs for {cmd:?}");
            if fmt == "json" {
                let v: Value = serde_json::from_str(&cold.1).unwrap();
                let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
                assert_eq!(again, v);
            }
        }
    }
    // the scan artifact parses back into the report type
    let (_, out) = cli(&["stability-scan", "--object", "misc-a(3)", "--family", "Ep:3", "--max-rank", "3"]);
    let rep: StabilityReport = serde_json::from_str(&out).unwrap();
    assert_eq!(serde_json::to_value(&rep).unwrap(), serde_json::from_str::<Value>(&out).unwrap());
}
