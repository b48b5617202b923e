//! Bounded scans: injectivity and surjectivity thresholds along a chain of
//! groups, growth ratios `dim X(T) / n^{δ(T)}`, and the `q_{≤n}` comparison.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{q_leq_n, Family, FamilyKind};
use crate::functor::{Evaluator, PresentedObject};
use crate::group::{count_epis, for_each_epi, free_aut_generators, GroupType, Morphism};
use crate::linalg::{Rat, RationalMatrix, Span, Q};

use super::{GroupRow, StabilityReport};

/// `C_{p^r}`, `C_p^r` or `(Z/p^n)^r` for `r = 0..=max_rank`.
fn chain(fam: &Family, max_rank: usize) -> Result<Vec<GroupType>> {
    let p = fam.p;
    Ok(match fam.kind {
        FamilyKind::CpInf => (0..=max_rank).map(|r| GroupType::cyclic(p, r as u32)).collect(),
        FamilyKind::Ep => (0..=max_rank).map(|r| GroupType::elementary(p, r)).collect(),
        FamilyKind::Fpn(n) => (0..=max_rank).map(|r| GroupType::free(p, n, r)).collect(),
        _ => return Err(Error::FamilyUnsupported(fam.to_string())),
    })
}

fn some_epi(b: &GroupType, a: &GroupType) -> Morphism {
    let mut out = None;
    for_each_epi(b, a, |m| {
        out = Some(Morphism { source: b.clone(), target: a.clone(), m: m.to_vec() });
        false
    });
    out.expect("chain members surject downwards")
}

/// Span of `a^* v` over `v ∈ start` and the group generated by `gens`.
fn aut_closure(start: &RationalMatrix, gens: &[RationalMatrix]) -> usize {
    let n = start.rows;
    let mut span = Span::new(n);
    let mut queue: Vec<Vec<Q>> = vec![];
    for j in 0..start.cols {
        let col: Vec<Q> = (0..n).map(|i| start.get(i, j).clone()).collect();
        if span.insert_dense(&col) {
            queue.push(col);
        }
    }
    while let Some(v) = queue.pop() {
        if span.rank() == n {
            break;
        }
        for a in gens {
            let w = a.apply(&v);
            if span.insert_dense(&w) {
                queue.push(w);
            }
        }
    }
    span.rank()
}

/// Thresholds for eventual torsion-freeness and stable surjectivity of the
/// restriction of `x` to a chain family, within ranks `0..=max_rank`.
///
/// In these families `Aut(B)` acts transitively on `Epi(B, A)`, so one `α` per
/// pair decides injectivity, and the image of `X(A) ⊗ k[U(B,A)]` is the
/// `Aut(B)`-closure of `im α^*`.
pub fn stability_scan(x: &PresentedObject, restricted: &Family, max_rank: usize) -> Result<StabilityReport> {
    if restricted.p != x.family.p {
        return Err(Error::FamilyUnsupported(restricted.to_string()));
    }
    let members = chain(restricted, max_rank)?;
    for m in &members {
        x.family.check_member(m)?;
    }
    let ev = Evaluator::new(x.clone());
    let top = members.len() - 1;
    let mut report = StabilityReport::new(restricted.clone(), members[top].order());
    let mut injective = vec![true; members.len()];
    let mut onto = vec![true; members.len()];
    for (ai, a) in members.iter().enumerate() {
        for b in &members[ai + 1..] {
            let alpha = some_epi(b, a);
            let m = ev.structure_map(&alpha)?;
            let rank = m.rank();
            if rank < m.cols {
                injective[ai] = false;
                report.witnesses.push(format!("{b} -> {a}: pullback of rank {rank} on a space of dimension {}", m.cols));
            }
            let gens = free_aut_generators(b).iter().map(|g| ev.structure_map(g)).collect::<Result<Vec<_>>>()?;
            let reach = aut_closure(&m, &gens);
            if reach < m.rows {
                onto[ai] = false;
                report.witnesses.push(format!("{a} -> {b}: pullbacks span {reach} of {}", m.rows));
            }
        }
    }
    for (i, m) in members.iter().enumerate() {
        let mut flags = vec![];
        if i < top {
            flags.push(if injective[i] { "injective" } else { "not-injective" }.to_string());
            flags.push(if onto[i] { "onto" } else { "not-onto" }.to_string());
        }
        report.rows.push(GroupRow { group: m.clone(), dim: ev.dim(m)?, torsion_dim: None, tau_iso: vec![], flags });
    }
    // the tail must contain a pair with A ≠ B, so the top member alone never counts
    let from = |ok: &[bool]| (0..top).rev().take_while(|&i| ok[i]).last().map(|i| members[i].order());
    report.torsion_free_from = from(&injective);
    report.surjective_from = from(&onto);
    let bound = members[top].order();
    report.verdicts.push(match report.torsion_free_from {
        Some(r) => format!("eventually torsion-free: injective for {r} <= |A| <= |B| <= {bound}; verified up to {bound} only"),
        None => format!("eventual torsion-freeness not observed up to {bound}"),
    });
    report.verdicts.push(match report.surjective_from {
        Some(r) => format!("stably surjective: onto for {r} <= |A| <= |B| <= {bound}; verified up to {bound} only"),
        None => format!("stable surjectivity not observed up to {bound}"),
    });
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub group: GroupType,
    pub dim: u64,
    pub delta: usize,
    /// `dim / n^δ`.
    pub ratio: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderEstimate {
    pub n: u64,
    pub family: Family,
    pub max_rank: usize,
    /// Sorted by `(δ, group)`.
    pub samples: Vec<Sample>,
    /// `(m, max ratio over sampled T with δ(T) ≥ m)`, non-increasing in `m`.
    pub tail_max: Vec<(usize, Rat)>,
}

fn sample_groups(u: &Family, max_rank: usize) -> Result<Vec<GroupType>> {
    let p = u.p;
    Ok(match u.kind {
        FamilyKind::Ep => (0..=max_rank).map(|r| GroupType::elementary(p, r)).collect(),
        FamilyKind::Fpn(n) => (0..=max_rank).map(|r| GroupType::free(p, n, r)).collect(),
        FamilyKind::Zpn(n) => {
            let bound = p.checked_pow(n * max_rank as u32).ok_or_else(|| Error::ScaleExceeded {
                what: "sample order".into(),
                got: u64::MAX,
                bound: u64::MAX,
            })?;
            u.members(bound).into_iter().filter(|g| g.rank() <= max_rank).collect()
        }
        _ => return Err(Error::FamilyNotExpansive(u.to_string())),
    })
}

/// `dim X(T)`; for free objects this is a sum of surjection counts.
fn dim_at(ev: &Evaluator, t: &GroupType) -> Result<u64> {
    let x = &ev.object;
    if x.relations.is_empty() {
        x.family.check_member(t)?;
        return Ok(x.generators.iter().map(|g| count_epis(t, g)).sum());
    }
    Ok(ev.dim(t)? as u64)
}

/// Exact ratios `dim X(T) / n^{δ(T)}` over every `T ∈ U` with `δ(T) ≤ max_rank`,
/// with the running maxima over the tails `δ ≥ m`.
pub fn omega_order(x: &PresentedObject, n: u64, u: &Family, max_rank: usize) -> Result<OrderEstimate> {
    if !u.expansive() {
        return Err(Error::FamilyNotExpansive(u.to_string()));
    }
    if n == 0 {
        return Err(Error::ShapeMismatch("growth base must be positive".into()));
    }
    let ev = Evaluator::new(x.clone());
    let mut samples = vec![];
    for t in sample_groups(u, max_rank)? {
        let dim = dim_at(&ev, &t)?;
        let delta = t.rank();
        let ratio = Q::new(BigInt::from(dim), BigInt::from(n).pow(delta as u32));
        samples.push(Sample { group: t, dim, delta, ratio: Rat(ratio) });
    }
    samples.sort_by(|a, b| (a.delta, &a.group).cmp(&(b.delta, &b.group)));
    let mut tail_max = vec![];
    for m in (0..=max_rank).rev() {
        let best = samples.iter().filter(|s| s.delta >= m).map(|s| s.ratio.clone()).max();
        if let Some(b) = best {
            tail_max.push((m, b));
        }
    }
    tail_max.reverse();
    Ok(OrderEstimate { n, family: u.clone(), max_rank, samples, tail_max })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QstarRow {
    pub group: GroupType,
    pub quotient: GroupType,
    pub dim: usize,
    pub quotient_dim: usize,
    /// `π^*: X(q_{≤n}G) → X(G)` is an isomorphism.
    pub iso: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QstarReport {
    pub n: u64,
    pub bound: u64,
    pub rows: Vec<QstarRow>,
    pub ok: bool,
}

/// Compares `X(G)` with `X(q_{≤n}G)` through the projection, for every member
/// of order at most `bound`.
pub fn qstar_check(x: &PresentedObject, n: u64, bound: u64) -> Result<QstarReport> {
    let ev = Evaluator::new(x.clone());
    let mut rows = vec![];
    for g in x.family.members(bound) {
        let (q, pi) = q_leq_n(&g, n, &x.family)?;
        let m = ev.structure_map(&pi)?;
        let iso = m.rows == m.cols && m.rank() == m.rows;
        rows.push(QstarRow { dim: m.rows, quotient_dim: m.cols, group: g, quotient: q, iso });
    }
    let ok = rows.iter().all(|r| r.iso);
    Ok(QstarReport { n, bound, rows, ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functor::builtin::{e, misc_a, unit};
    use crate::linalg::q_frac;

    fn g(p: u64, l: &[u32]) -> GroupType {
        GroupType::new(p, l.to_vec()).unwrap()
    }

    #[test]
    fn scans_of_small_objects() {
        let cyc = Family::cyclic(2);
        let x = e(&Family::all(2), &g(2, &[1])).unwrap();
        let r = stability_scan(&x, &cyc, 4).unwrap();
        assert_eq!(r.torsion_free_from, Some(1));
        let u = unit(&Family::all(3)).unwrap();
        let r = stability_scan(&u, &Family::elementary(3), 3).unwrap();
        assert_eq!((r.torsion_free_from, r.surjective_from), (Some(1), Some(1)));
        assert!(matches!(stability_scan(&u, &Family::all(3), 2), Err(Error::FamilyUnsupported(_))));
    }

    #[test]
    fn misc_a_in_elementary() {
        let r = stability_scan(&misc_a(3).unwrap(), &Family::elementary(3), 4).unwrap();
        let dims: Vec<usize> = r.rows.iter().map(|row| row.dim).collect();
        assert_eq!(dims, vec![0, 2, 1, 1, 1]);
        assert_eq!(r.torsion_free_from, Some(9));
        assert_eq!(r.surjective_from, Some(3));
    }

    #[test]
    fn omega_samples() {
        let u = Family::elementary(2);
        let est = omega_order(&unit(&u).unwrap(), 1, &u, 4).unwrap();
        assert!(est.samples.iter().all(|s| s.ratio.0 == q_frac(1, 1)));
        let x = e(&u, &g(2, &[1])).unwrap();
        let est = omega_order(&x.sum(&x).unwrap(), 2, &u, 6).unwrap();
        // 2(2^m − 1)/2^m
        assert_eq!(est.samples[6].ratio.0, q_frac(2 * 63, 64));
        assert_eq!(est.tail_max[0].1 .0, q_frac(126, 64));
        assert!(matches!(omega_order(&x, 2, &Family::cyclic(2), 3), Err(Error::FamilyNotExpansive(_))));
    }

    #[test]
    fn qstar_examples() {
        let fam = Family::all(2);
        assert!(qstar_check(&e(&fam, &g(2, &[1])).unwrap(), 2, 16).unwrap().ok);
        assert!(qstar_check(&unit(&fam).unwrap(), 1, 16).unwrap().ok);
        assert!(qstar_check(&misc_a(3).unwrap(), 9, 81).unwrap().ok);
        assert!(!qstar_check(&e(&fam, &g(2, &[2])).unwrap(), 2, 16).unwrap().ok);
        assert!(matches!(qstar_check(&e(&Family::free(2, 1), &g(2, &[1])).unwrap(), 2, 4), Err(Error::FamilyNotSubmultiplicative(_))));
    }
}
