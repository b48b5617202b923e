//! Stability phenomena at bounded scale: truncations `τ_n`, torsion,
//! injectivity and surjectivity thresholds, growth order, `q_{≤n}` and the
//! noetherianity criterion data for chains of groups.
//!
//! Every verdict here is about the tested range only. Reports carry that range
//! explicitly and never claim anything past it.

mod criterion;
mod scan;
mod tau;
mod torsion;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::Family;
use crate::functor::{Evaluator, PresentedObject};
use crate::group::GroupType;

pub use criterion::{trans_bij_check, PairData, TransBijReport};
pub use scan::{omega_order, qstar_check, stability_scan, OrderEstimate, QstarReport, QstarRow, Sample};
pub use tau::{truncate_tau, TAU_BOUND};
pub use torsion::{torsion_oracle_via_l, torsion_subspace, torsion_subspace_with, TorsionSubspace};

use tau::{is_iso, TauDiagram};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupRow {
    pub group: GroupType,
    pub dim: usize,
    pub torsion_dim: Option<usize>,
    /// `(n, counit of τ_n is an isomorphism)`.
    pub tau_iso: Vec<(u64, bool)>,
    pub flags: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub family: Family,
    /// Largest group order examined.
    pub tested_bound: u64,
    pub rows: Vec<GroupRow>,
    /// Least member order from which every tested `α^*` out of it is injective.
    pub torsion_free_from: Option<u64>,
    /// Least member order from which `X(A) ⊗ k[U(B,A)] → X(B)` is onto for
    /// every tested `B`.
    pub surjective_from: Option<u64>,
    pub central_degree: Option<u64>,
    pub witnesses: Vec<String>,
    pub verdicts: Vec<String>,
}

impl StabilityReport {
    fn new(family: Family, tested_bound: u64) -> Self {
        StabilityReport {
            family,
            tested_bound,
            rows: vec![],
            torsion_free_from: None,
            surjective_from: None,
            central_degree: None,
            witnesses: vec![],
            verdicts: vec![],
        }
    }

    /// CSV with columns `group_key, dim, torsion_dim, tau_iso(n), flags`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(vec![]);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["group_key", "dim", "torsion_dim", "tau_iso(n)", "flags"]).map_err(io)?;
        for r in &self.rows {
            let tau: Vec<String> = r.tau_iso.iter().map(|(n, ok)| format!("{n}:{}", if *ok { "yes" } else { "no" })).collect();
            w.write_record([
                r.group.key(),
                r.dim.to_string(),
                r.torsion_dim.map_or(String::new(), |d| d.to_string()),
                tau.join(";"),
                r.flags.join(";"),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Powers of `p` up to `bound`, starting at 1.
fn powers(p: u64, bound: u64) -> Vec<u64> {
    let mut out = vec![1];
    while out.last().unwrap() * p <= bound {
        out.push(out.last().unwrap() * p);
    }
    out
}

/// Least `N` such that `τ_n X → X` is an isomorphism at every member of order
/// `≤ test_bound`, for every `n` with `N ≤ n ≤ test_bound`.
///
/// Indices of subgroups are powers of `p`, so `τ_n = τ_{p^k}` for the largest
/// `p^k ≤ n`; only those `n` are computed. `N` is then the least such power.
pub fn central_stability_degree(x: &PresentedObject, test_bound: u64) -> Result<StabilityReport> {
    let fam = &x.family;
    let ev = Evaluator::new(x.clone());
    let ns = powers(fam.p, test_bound);
    let mut report = StabilityReport::new(fam.clone(), test_bound);
    let mut ok_at = vec![true; ns.len()];
    for g in fam.members(test_bound) {
        let diagram = TauDiagram::build(&ev, &g, test_bound)?;
        let mut tau_iso = vec![];
        for (k, &n) in ns.iter().enumerate() {
            let (_, counit) = diagram.truncate(n);
            let iso = is_iso(&counit);
            if !iso {
                ok_at[k] = false;
                report.witnesses.push(format!("tau_{n} counit at {g}: {}x{} of rank {}", counit.rows, counit.cols, counit.rank()));
            }
            tau_iso.push((n, iso));
        }
        report.rows.push(GroupRow { dim: ev.dim(&g)?, group: g, torsion_dim: None, tau_iso, flags: vec![] });
    }
    let first = (0..ns.len()).rev().take_while(|&k| ok_at[k]).last();
    report.central_degree = first.map(|k| ns[k]);
    report.verdicts.push(match report.central_degree {
        Some(n) => format!("tau_n X -> X is an isomorphism for {n} <= n <= {test_bound}, verified at all members of order <= {test_bound}"),
        None => format!("no n <= {test_bound} gives an isomorphism at all members of order <= {test_bound}"),
    });
    Ok(report)
}
