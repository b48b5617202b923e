//! The `repstab` command line: argument parsing, fixture lookup, dispatch and
//! output rendering. Every command produces a JSON value first; CSV output is
//! rendered from that value so cold and warm cache runs print the same bytes.
//!
//! Exit codes: 0 on success, 2 when a verification command found a
//! counterexample, 1 on usage or computation errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::cache::Cache;
use crate::error::{Error, Result};
use crate::family::Family;
use crate::functor::builtin::{builtin_to_presentation, c, e, misc_a, misc_b, unit, Builtin};
use crate::functor::resolution::resolution;
use crate::functor::tower::ColimitTower;
use crate::functor::{Evaluator, PresentedObject};
use crate::group::GroupType;
use crate::linalg::q_to_string;
use crate::monoidal::{hom_decompose, tensor_decompose};
use crate::stability::{central_stability_degree, omega_order, stability_scan, torsion_subspace, StabilityReport};
use crate::wqo::{factor_framing, find_good_pair, ldag_construct_morphism, ldag_homs, ldag_invariants, ldag_triple_le, Framing, OrderedLabeledSet};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;

/// Largest set size accepted by `wqo-check`; hom-sets are enumerated.
const WQO_MAX_SIZE: usize = 7;
const DEFAULT_BOUND: u64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(name = "repstab", version, about = "Representation stability for functors on finite abelian p-groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Z2inf, Z3inf, Zpn:p,n, Cpinf:p, Cpn:p,n, Fpn:p,n, Ep:p, optionally with <=N.
    #[arg(long, global = true)]
    family: Option<String>,
    /// Order bound for scans and for presenting fixtures.
    #[arg(long, global = true)]
    bound: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Cache directory; REPSTAB_CACHE takes precedence.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decompose e_G ⊗ e_H into generators.
    DecomposeTensor {
        #[arg(long)]
        g: String,
        #[arg(long)]
        h: String,
    },
    /// Decompose the internal hom from e_G to e_H into generators.
    DecomposeHom {
        #[arg(long)]
        g: String,
        #[arg(long)]
        h: String,
    },
    /// Dimension of X(G).
    Eval {
        #[arg(long)]
        object: String,
        #[arg(long)]
        group: String,
    },
    /// Projective resolution up to the order bound.
    Resolve {
        #[arg(long)]
        object: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long)]
        minimal: bool,
    },
    /// Torsion subspace of X(G) along a colimit tower.
    Torsion {
        #[arg(long)]
        object: String,
        #[arg(long)]
        group: String,
        /// F<p^n>, E<p>, C<p>inf or Z<p>inf; defaults to the object's family.
        #[arg(long)]
        tower: Option<String>,
        #[arg(long, default_value_t = 6)]
        max_stage: usize,
    },
    /// Injectivity and surjectivity thresholds on a chain family (--family).
    StabilityScan {
        #[arg(long)]
        object: String,
        #[arg(long, default_value_t = 3)]
        max_rank: usize,
    },
    /// Central stability degree via truncations, up to --bound.
    TauScan {
        #[arg(long)]
        object: String,
    },
    /// Growth of dim X(G) against |U(G, C^n)| in an expansive family (--family).
    Omega {
        #[arg(long)]
        object: String,
        #[arg(long, default_value_t = 1)]
        n: u64,
        #[arg(long, default_value_t = 4)]
        max_rank: usize,
    },
    /// Check rigidity and the comonotone construction on labelled ordered sets.
    WqoCheck {
        /// JSON list of label lists, e.g. [[2,1],[1],[1,2,1]].
        #[arg(long)]
        sets: String,
    },
    /// Factor a framing through a tautological one.
    FramingFactor {
        #[arg(long)]
        group: String,
        /// JSON list of labels.
        #[arg(long)]
        labels: String,
        /// JSON list of elements, each a coordinate list.
        #[arg(long)]
        assignment: String,
    },
    /// List cache entries.
    CacheInfo,
}

// ---- parsing ------------------------------------------------------------------

fn perr(pos: usize, msg: impl Into<String>) -> Error {
    Error::ParseError { pos, msg: msg.into() }
}

/// `n = p^k` with `k ≥ 1`.
fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let p = (2..=n).find(|d| n % d == 0 || d * d > n).map(|d| if n % d == 0 { d } else { n }).unwrap();
    let (mut m, mut k) = (n, 0);
    while m % p == 0 {
        m /= p;
        k += 1;
    }
    (m == 1).then_some((p, k))
}

fn digits(s: &str, at: usize) -> (usize, Option<u64>) {
    let len = s[at..].bytes().take_while(u8::is_ascii_digit).count();
    (len, s[at..at + len].parse().ok())
}

/// `p=3;lambda=[1,1]`, or products of `C<p^k>` and `C<p^k>^<m>` joined by `x`
/// such as `C4xC2` and `C2^3`. `1` and `C1` denote the trivial group and need
/// `prime` to fix `p`.
pub fn parse_group_with(text: &str, prime: Option<u64>) -> Result<GroupType> {
    let s = text.trim();
    let off = text.len() - text.trim_start().len();
    if let Some(rest) = s.strip_prefix("p=") {
        let (n, p) = digits(s, 2);
        let p = p.ok_or_else(|| perr(off + 2, "expected a prime"))?;
        let rest = rest[n..].strip_prefix(';').ok_or_else(|| perr(off + 2 + n, "expected ';'"))?;
        let at = 3 + n;
        let body = rest.strip_prefix("lambda=[").ok_or_else(|| perr(off + at, "expected 'lambda=['"))?;
        let close = body.find(']').ok_or_else(|| perr(off + s.len(), "expected ']'"))?;
        if close + 1 != body.len() {
            return Err(perr(off + at + 8 + close + 1, "trailing input"));
        }
        let mut lambda = vec![];
        let mut pos = at + 8;
        for part in body[..close].split(',') {
            if !part.trim().is_empty() {
                lambda.push(part.trim().parse::<u32>().map_err(|_| perr(off + pos, format!("'{}' is not a part", part.trim())))?);
            }
            pos += part.len() + 1;
        }
        return GroupType::new(p, lambda).map_err(|e| match e {
            Error::ParseError { msg, .. } => perr(off + 2, msg),
            other => other,
        });
    }
    if s.is_empty() {
        return Err(perr(off, "empty group"));
    }
    let mut p: Option<u64> = None;
    let mut lambda = vec![];
    let mut pos = 0;
    for factor in s.split('x') {
        let start = pos;
        pos += factor.len() + 1;
        let body = if factor == "1" { "C1" } else { factor };
        let Some(num) = body.strip_prefix('C') else { return Err(perr(off + start, format!("expected 'C' in '{factor}'"))) };
        let (len, n) = digits(num, 0);
        let n = n.ok_or_else(|| perr(off + start + 1, "expected an order"))?;
        let mult = match &num[len..] {
            "" => 1,
            r => {
                let m = r.strip_prefix('^').ok_or_else(|| perr(off + start + 1 + len, "expected '^' or 'x'"))?;
                m.parse::<usize>().map_err(|_| perr(off + start + 2 + len, "expected a multiplicity"))?
            }
        };
        if n == 1 {
            continue;
        }
        let (q, k) = prime_power(n).ok_or_else(|| perr(off + start + 1, format!("{n} is not a prime power")))?;
        match p {
            Some(p0) if p0 != q => return Err(perr(off + start + 1, format!("{n} is not a power of {p0}"))),
            _ => p = Some(q),
        }
        lambda.extend(std::iter::repeat(k as u32).take(mult));
    }
    let p = match (p, prime) {
        (Some(q), Some(h)) if q != h => return Err(perr(off, format!("expected a {h}-group"))),
        (Some(q), _) | (None, Some(q)) => q,
        (None, None) => return Err(perr(off, "the trivial group needs a prime; write p=<p>;lambda=[]")),
    };
    GroupType::new(p, lambda)
}

pub fn parse_group_spec(text: &str) -> Result<GroupType> {
    parse_group_with(text, None)
}

/// Fixture names: `misc-a`, `misc-a(p)`, `misc-b`, `unit`, `e(G)`, `c(G)`,
/// `s(G)`, `t(G)`. A trailing `.json` is ignored.
pub fn fixture(name: &str, family: Option<&Family>, prime: Option<u64>, scale: u64) -> Result<PresentedObject> {
    let name = name.strip_suffix(".json").unwrap_or(name);
    let (head, arg) = match name.find('(') {
        Some(i) if name.ends_with(')') => (&name[..i], Some(&name[i + 1..name.len() - 1])),
        Some(i) => return Err(perr(i, "unclosed '('")),
        None => (name, None),
    };
    let p = prime.or(family.map(|f| f.p));
    let fam = |p: u64| family.cloned().unwrap_or_else(|| Family::all(p));
    let group = |a: Option<&str>| -> Result<GroupType> {
        let a = a.ok_or_else(|| perr(head.len(), format!("{head} needs a group argument")))?;
        parse_group_with(a, p).map_err(|e| match e {
            Error::ParseError { pos, msg } => perr(head.len() + 1 + pos, msg),
            other => other,
        })
    };
    let x = match head {
        "misc-a" => {
            let p = match arg {
                Some(a) => a.trim().parse().map_err(|_| perr(head.len() + 1, "expected a prime"))?,
                None => p.unwrap_or(3),
            };
            misc_a(p)?
        }
        "misc-b" => misc_b()?,
        "unit" => unit(&fam(p.ok_or_else(|| perr(0, "unit needs --family"))?))?,
        "e" | "c" | "s" | "t" => {
            let g = group(arg)?;
            let f = fam(g.p);
            match head {
                "e" => e(&f, &g)?,
                "c" => c(&f, &g)?,
                "s" => builtin_to_presentation(&Builtin::STriv { group: g }, &f, scale)?,
                _ => builtin_to_presentation(&Builtin::TTriv { group: g }, &f, scale)?,
            }
        }
        _ => return Err(perr(0, format!("no file or fixture named '{name}'"))),
    };
    Ok(x)
}

fn load_object(spec: &str, family: Option<&Family>, prime: Option<u64>, scale: u64) -> Result<PresentedObject> {
    let path = std::path::Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(e.to_string()))?;
        return serde_json::from_str(&text).map_err(|e| perr(e.column(), e.to_string()));
    }
    fixture(spec, family, prime, scale)
}

/// `F<p^n>`, `E<p>`, `C<p>inf`, `Z<p>inf`.
fn parse_tower(s: &str) -> Result<ColimitTower> {
    let fam = if let Some(r) = s.strip_prefix('F') {
        let n: u64 = r.parse().map_err(|_| perr(1, "expected F<p^n>"))?;
        let (p, k) = prime_power(n).ok_or_else(|| perr(1, format!("{n} is not a prime power")))?;
        Family::free(p, k)
    } else if let Some(r) = s.strip_prefix('E') {
        Family::new(r.parse().map_err(|_| perr(1, "expected E<p>"))?, crate::family::FamilyKind::Ep)?
    } else if let Some(r) = s.strip_prefix('C').and_then(|r| r.strip_suffix("inf")) {
        Family::new(r.parse().map_err(|_| perr(1, "expected C<p>inf"))?, crate::family::FamilyKind::CpInf)?
    } else {
        s.parse::<Family>()?
    };
    ColimitTower::for_family(&fam)
}

fn parse_json<T: serde::de::DeserializeOwned>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| perr(e.column().saturating_sub(1), e.to_string()))
}

// ---- commands -----------------------------------------------------------------

fn to_value<T: serde::Serialize>(x: &T) -> Result<Value> {
    serde_json::to_value(x).map_err(|e| Error::Io(e.to_string()))
}

fn wqo_check(sets: &[Vec<u32>]) -> Result<Value> {
    let objs: Vec<OrderedLabeledSet> = sets.iter().map(|e| OrderedLabeledSet::new(e.clone())).collect::<Result<_>>()?;
    if let Some(big) = objs.iter().find(|x| x.size() > WQO_MAX_SIZE) {
        return Err(Error::ScaleExceeded { what: "labelled set size".into(), got: big.size() as u64, bound: WQO_MAX_SIZE as u64 });
    }
    let mut counterexamples = vec![];
    for (i, x) in objs.iter().enumerate() {
        let ends = ldag_homs(x, x);
        if ends.len() != 1 || ends[0].map != (0..x.size()).collect::<Vec<_>>() {
            counterexamples.push(json!({"kind": "rigidity", "set": i, "endomorphisms": ends.len()}));
        }
    }
    let (mut comparable, mut constructed) = (0, 0);
    for (i, x) in objs.iter().enumerate() {
        for (j, y) in objs.iter().enumerate() {
            let le = ldag_triple_le(x, y);
            if le {
                comparable += 1;
                match ldag_construct_morphism(x, y) {
                    Some(m) if m.is_valid() => constructed += 1,
                    _ => counterexamples.push(json!({"kind": "construction", "x": i, "y": j})),
                }
            } else if !ldag_homs(y, x).is_empty() {
                counterexamples.push(json!({"kind": "monotone", "x": i, "y": j}));
            }
        }
    }
    let good = find_good_pair(&objs, ldag_triple_le);
    let invariants: Vec<Value> = objs
        .iter()
        .map(|x| {
            let inv = ldag_invariants(x);
            json!({"alpha": inv.alpha, "beta": inv.beta, "gamma": inv.gamma})
        })
        .collect();
    Ok(json!({
        "sets": objs.len(),
        "invariants": invariants,
        "good_pair": good.map(|(i, j)| vec![i, j]),
        "comparable_pairs": comparable,
        "constructed": constructed,
        "counterexamples": counterexamples,
        "ok": counterexamples.is_empty(),
    }))
}

fn framing_factor(f: &Framing) -> Result<Value> {
    let (phi, bar) = factor_framing(f)?;
    let composite: Vec<Vec<i64>> = phi.map.iter().map(|&i| bar.assignment[i].clone()).collect();
    let ok = composite == f.assignment && phi.is_valid() && bar.is_tautological();
    Ok(json!({
        "target": f.target.to_string(),
        "tautological": {"labels": bar.domain.e, "assignment": bar.assignment},
        "map": phi.map,
        "composite": composite,
        "ok": ok,
    }))
}

struct Ctx {
    family: Option<Family>,
    bound: Option<u64>,
    cache: Cache,
}

impl Ctx {
    fn family(&self) -> Result<&Family> {
        self.family.as_ref().ok_or_else(|| perr(0, "--family is required"))
    }

    fn object(&self, spec: &str, prime: Option<u64>, scale: u64) -> Result<PresentedObject> {
        load_object(spec, self.family.as_ref(), prime, scale)
    }

    fn cached(&self, op: &str, key: String, f: impl FnOnce() -> Result<Value>) -> Result<Value> {
        Ok(self.cache.get_or_compute(op, &key, f)?.0)
    }
}

fn object_key(x: &PresentedObject) -> Result<String> {
    serde_json::to_string(x).map_err(|e| Error::Io(e.to_string()))
}

fn dispatch(cmd: &Command, ctx: &Ctx) -> Result<(&'static str, Value)> {
    let fam_prime = ctx.family.as_ref().map(|f| f.p);
    let out = match cmd {
        Command::DecomposeTensor { g, h } | Command::DecomposeHom { g, h } => {
            let (g, h) = (parse_group_with(g, fam_prime)?, parse_group_with(h, fam_prime)?);
            let u = ctx.family.clone().unwrap_or_else(|| Family::all(g.p));
            let tensor = matches!(cmd, Command::DecomposeTensor { .. });
            let op = if tensor { "decompose-tensor" } else { "decompose-hom" };
            let v = ctx.cached(op, format!("{}|{}|{}", u.id(), g.key(), h.key()), || {
                to_value(&if tensor { tensor_decompose(&g, &h, &u)? } else { hom_decompose(&g, &h, &u)? })
            })?;
            (op, v)
        }
        Command::Eval { object, group } => {
            let g = parse_group_with(group, fam_prime)?;
            let x = ctx.object(object, Some(g.p), ctx.bound.unwrap_or(DEFAULT_BOUND).max(g.order()))?;
            let v = ctx.cached("eval", format!("{}|{}", object_key(&x)?, g.key()), || {
                Ok(json!({"group": g.to_string(), "key": g.key(), "dim": Evaluator::new(x.clone()).dim(&g)?}))
            })?;
            ("eval", v)
        }
        Command::Resolve { object, depth, minimal } => {
            let bound = ctx.bound.unwrap_or(16);
            let x = ctx.object(object, fam_prime, bound)?;
            let v = ctx.cached("resolve", format!("{}|{bound}|{depth}|{minimal}", object_key(&x)?), || to_value(&resolution(&x, bound, *depth, *minimal)?))?;
            ("resolve", v)
        }
        Command::Torsion { object, group, tower, max_stage } => {
            let g = parse_group_with(group, fam_prime)?;
            let x = ctx.object(object, Some(g.p), ctx.bound.unwrap_or(DEFAULT_BOUND).max(g.order()))?;
            let tower = match tower {
                Some(t) => parse_tower(t)?,
                None => ColimitTower::for_family(&x.family)?,
            };
            let key = format!("{}|{}|{}|{max_stage}", object_key(&x)?, g.key(), tower.family.id());
            let v = ctx.cached("torsion", key, || {
                let t = torsion_subspace(&x, &g, &tower, *max_stage)?;
                let vectors: Vec<Vec<String>> = t.vectors.iter().map(|v| v.iter().map(|r| q_to_string(&r.0)).collect()).collect();
                Ok(json!({
                    "group": g.to_string(),
                    "key": g.key(),
                    "tower": tower.family.id(),
                    "dim": Evaluator::new(x.clone()).dim(&g)?,
                    "torsion_dim": t.space.dim,
                    "exhausted": t.exhausted,
                    "kernel_dims": t.kernel_dims,
                    "vectors": vectors,
                }))
            })?;
            ("torsion", v)
        }
        Command::StabilityScan { object, max_rank } => {
            let fam = ctx.family()?.clone();
            let x = ctx.object(object, Some(fam.p), ctx.bound.unwrap_or(DEFAULT_BOUND))?;
            let v = ctx.cached("stability-scan", format!("{}|{}|{max_rank}", object_key(&x)?, fam.id()), || to_value(&stability_scan(&x, &fam, *max_rank)?))?;
            ("stability-scan", v)
        }
        Command::TauScan { object } => {
            let bound = ctx.bound.unwrap_or(16);
            let x = ctx.object(object, fam_prime, bound)?;
            let v = ctx.cached("tau-scan", format!("{}|{bound}", object_key(&x)?), || to_value(&central_stability_degree(&x, bound)?))?;
            ("tau-scan", v)
        }
        Command::Omega { object, n, max_rank } => {
            let u = ctx.family()?.clone();
            let x = ctx.object(object, Some(u.p), ctx.bound.unwrap_or(DEFAULT_BOUND))?;
            let v = ctx.cached("omega", format!("{}|{}|{n}|{max_rank}", object_key(&x)?, u.id()), || to_value(&omega_order(&x, *n, &u, *max_rank)?))?;
            ("omega", v)
        }
        Command::WqoCheck { sets } => {
            let sets: Vec<Vec<u32>> = parse_json(sets)?;
            let v = ctx.cached("wqo-check", serde_json::to_string(&sets).unwrap(), || wqo_check(&sets))?;
            ("wqo-check", v)
        }
        Command::FramingFactor { group, labels, assignment } => {
            let target = parse_group_with(group, fam_prime)?;
            let f = Framing { domain: OrderedLabeledSet::new(parse_json(labels)?)?, target, assignment: parse_json(assignment)? };
            let key = serde_json::to_string(&f).unwrap();
            ("framing-factor", ctx.cached("framing-factor", key, || framing_factor(&f))?)
        }
        Command::CacheInfo => ("cache-info", json!({"dir": ctx.cache.dir().map(|d| d.display().to_string()), "entries": to_value(&ctx.cache.info()?)?})),
    };
    Ok(out)
}

// ---- rendering ----------------------------------------------------------------

fn csv_rows(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(vec![]);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?).map_err(|e| Error::Io(e.to_string()))
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn render_csv(op: &str, v: &Value) -> Result<String> {
    let list = |k: &str| v[k].as_array().cloned().unwrap_or_default();
    match op {
        "decompose-tensor" | "decompose-hom" => csv_rows(
            &["group_key", "group", "multiplicity"],
            list("summands").iter().map(|s| vec![cell(&s["key"]), cell(&s["group"]), cell(&s["multiplicity"])]).collect(),
        ),
        "eval" => csv_rows(&["group_key", "dim"], vec![vec![cell(&v["key"]), cell(&v["dim"])]]),
        "torsion" => csv_rows(
            &["group_key", "dim", "torsion_dim", "exhausted"],
            vec![vec![cell(&v["key"]), cell(&v["dim"]), cell(&v["torsion_dim"]), cell(&v["exhausted"])]],
        ),
        "stability-scan" | "tau-scan" => {
            let r: StabilityReport = serde_json::from_value(v.clone()).map_err(|e| Error::Io(e.to_string()))?;
            r.to_csv()
        }
        "omega" => csv_rows(
            &["group_key", "dim", "delta", "ratio"],
            list("samples")
                .iter()
                .map(|s| {
                    let g: GroupType = serde_json::from_value(s["group"].clone()).map_err(|e| Error::Io(e.to_string()))?;
                    Ok(vec![g.key(), cell(&s["dim"]), cell(&s["delta"]), cell(&s["ratio"])])
                })
                .collect::<Result<_>>()?,
        ),
        // one row per domain element: its image under the factoring map and under α₀
        "framing-factor" => csv_rows(
            &["x", "image", "element"],
            list("map")
                .iter()
                .zip(list("composite"))
                .enumerate()
                .map(|(x, (i, a))| vec![x.to_string(), cell(i), cell(&a)])
                .collect(),
        ),
        "cache-info" => csv_rows(
            &["op", "key", "version", "bytes", "file"],
            list("entries").iter().map(|e| ["op", "key", "version", "bytes", "file"].iter().map(|k| cell(&e[*k])).collect()).collect(),
        ),
        _ => Err(perr(0, format!("csv output is not available for {op}"))),
    }
}

/// Runs the command line and writes results to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let result = (|| {
        let family = cli.family.as_deref().map(str::parse::<Family>).transpose()?;
        let ctx = Ctx { family, bound: cli.bound, cache: Cache::from_env_or(cli.cache.clone()) };
        let (op, v) = dispatch(&cli.command, &ctx)?;
        let text = match cli.format {
            Format::Json => serde_json::to_string_pretty(&v).map_err(|e| Error::Io(e.to_string()))? + "\n",
            Format::Csv => render_csv(op, &v)?,
        };
        Ok::<_, Error>((text, v.get("ok") == Some(&Value::Bool(false))))
    })();
    match result {
        Ok((text, failed)) => {
            if out.write_all(text.as_bytes()).is_err() {
                return EXIT_USAGE;
            }
            if failed {
                EXIT_VERIFY
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            let _ = writeln!(err, "{}", json!({"error": e.code(), "message": e.to_string()}));
            EXIT_USAGE
        }
    }
}
