//! Exact linear algebra over the rationals.
//!
//! The workhorse is [`Span`], a subspace of `Q^n` kept in echelon form with the
//! pivot of each row at its *last* nonzero coordinate. Reducing a vector sweeps
//! coordinates from the top down. The coordinates that are not pivots are then
//! exactly the basis vectors a greedy left-to-right scan would pick for the
//! quotient `Q^n / span`, which is the cokernel basis convention used
//! everywhere.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// `"num/den"`, always with an explicit denominator.
pub fn q_to_string(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn q_parse(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Q::new(n.trim().parse().ok()?, d))
        }
        None => Some(Q::from_integer(s.parse().ok()?)),
    }
}

/// A rational that serializes as `"num/den"`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(pub Q);

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&q_to_string(&self.0))
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        q_parse(&s).map(Rat).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s}")))
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&q_to_string(&self.0))
    }
}

/// Sparse vector: strictly increasing indices, nonzero values.
pub type SVec = Vec<(usize, Q)>;

pub fn sparse_from_dense(v: &[Q]) -> SVec {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect()
}

pub fn sparse_from_map(m: BTreeMap<usize, Q>) -> SVec {
    m.into_iter().filter(|(_, x)| !x.is_zero()).collect()
}

/// Subspace of `Q^n`.
#[derive(Clone, Debug)]
pub struct Span {
    n: usize,
    rows: Vec<Option<SVec>>,
    rank: usize,
}

impl Span {
    pub fn new(n: usize) -> Self {
        Span { n, rows: vec![None; n], rank: 0 }
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_pivot(&self, i: usize) -> bool {
        self.rows[i].is_some()
    }

    /// Reduces `v` completely: the result has no pivot coordinates.
    pub fn reduce(&self, v: &SVec) -> SVec {
        let mut w: BTreeMap<usize, Q> = v.iter().cloned().collect();
        let mut out = vec![];
        while let Some((i, c)) = w.pop_last() {
            if c.is_zero() {
                continue;
            }
            match &self.rows[i] {
                Some(row) => {
                    for (j, x) in &row[..row.len() - 1] {
                        let e = w.entry(*j).or_insert_with(Q::zero);
                        *e -= &c * x;
                    }
                }
                None => out.push((i, c)),
            }
        }
        out.reverse();
        out
    }

    /// Inserts `v`; returns whether the span grew.
    pub fn insert(&mut self, v: &SVec) -> bool {
        let r = self.reduce(v);
        let Some((piv, c)) = r.last().cloned() else { return false };
        let inv = c.recip();
        let row: SVec = r.into_iter().map(|(i, x)| (i, x * &inv)).collect();
        self.rows[piv] = Some(row);
        self.rank += 1;
        true
    }

    pub fn insert_dense(&mut self, v: &[Q]) -> bool {
        self.insert(&sparse_from_dense(v))
    }

    pub fn contains(&self, v: &SVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Coefficients of `v` on [`Span::basis`], or `None` if `v` is outside.
    pub fn coordinates(&self, v: &SVec) -> Option<Vec<Q>> {
        let mut w: BTreeMap<usize, Q> = v.iter().cloned().collect();
        let mut coeff: BTreeMap<usize, Q> = BTreeMap::new();
        while let Some((i, c)) = w.pop_last() {
            if c.is_zero() {
                continue;
            }
            let row = self.rows[i].as_ref()?;
            for (j, x) in &row[..row.len() - 1] {
                let e = w.entry(*j).or_insert_with(Q::zero);
                *e -= &c * x;
            }
            coeff.insert(i, c);
        }
        let mut out = vec![Q::zero(); self.rank];
        let mut k = 0;
        for i in 0..self.n {
            if self.rows[i].is_some() {
                if let Some(c) = coeff.remove(&i) {
                    out[k] = c;
                }
                k += 1;
            }
        }
        Some(out)
    }

    /// Non-pivot coordinates, ascending: the cokernel basis.
    pub fn complement(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.rows[i].is_none()).collect()
    }

    /// Basis of the subspace (one vector per pivot, ascending pivot).
    pub fn basis(&self) -> Vec<SVec> {
        self.rows.iter().flatten().cloned().collect()
    }
}

/// The quotient `Q^n / S` with its chosen basis and projection.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub span: Span,
    /// Surviving ambient coordinates, ascending.
    pub basis: Vec<usize>,
    position: Vec<usize>,
}

impl Quotient {
    pub fn new(span: Span) -> Self {
        let basis = span.complement();
        let mut position = vec![usize::MAX; span.ambient()];
        for (k, &i) in basis.iter().enumerate() {
            position[i] = k;
        }
        Quotient { span, basis, position }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of the class of `v`.
    pub fn project(&self, v: &SVec) -> SVec {
        self.span.reduce(v).into_iter().map(|(i, x)| (self.position[i], x)).collect()
    }

    pub fn project_dense(&self, v: &SVec) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.dim()];
        for (i, x) in self.project(v) {
            out[i] = x;
        }
        out
    }

    /// Matrix of the projection (`dim × ambient`).
    pub fn projection_matrix(&self) -> RationalMatrix {
        let n = self.span.ambient();
        let mut m = RationalMatrix::zeros(self.dim(), n);
        for j in 0..n {
            for (i, x) in self.project(&vec![(j, Q::one())]) {
                m.set(i, j, x);
            }
        }
        m
    }
}

/// Dense matrix of exact rationals, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Q>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, entries: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Q::one());
        }
        m
    }

    pub fn from_ints(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        RationalMatrix { rows: r, cols: c, entries: rows.iter().flatten().map(|&x| q(x)).collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Q) {
        self.entries[i * self.cols + j] = x;
    }

    pub fn column(&self, j: usize) -> SVec {
        (0..self.rows).filter_map(|i| {
            let x = self.get(i, j);
            (!x.is_zero()).then(|| (i, x.clone()))
        })
        .collect()
    }

    pub fn mul(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        (0..self.rows)
            .map(|i| (0..self.cols).fold(Q::zero(), |acc, j| acc + self.get(i, j) * &v[j]))
            .collect()
    }

    pub fn rank(&self) -> usize {
        let mut s = Span::new(self.rows);
        for j in 0..self.cols {
            s.insert(&self.column(j));
        }
        s.rank()
    }

    pub fn is_injective(&self) -> bool {
        self.rank() == self.cols
    }

    pub fn is_surjective(&self) -> bool {
        self.rank() == self.rows
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|x| x.is_zero())
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Serialize for RationalMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> =
            (0..self.rows).map(|i| (0..self.cols).map(|j| q_to_string(self.get(i, j))).collect()).collect();
        #[derive(Serialize)]
        struct Raw {
            rows: usize,
            cols: usize,
            entries: Vec<Vec<String>>,
        }
        Raw { rows: self.rows, cols: self.cols, entries: rows }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            rows: usize,
            cols: usize,
            entries: Vec<Vec<String>>,
        }
        let raw = Raw::deserialize(d)?;
        if raw.entries.len() != raw.rows || raw.entries.iter().any(|r| r.len() != raw.cols) {
            return Err(serde::de::Error::custom("matrix shape mismatch"));
        }
        let entries = raw
            .entries
            .iter()
            .flatten()
            .map(|s| q_parse(s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s}"))))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(RationalMatrix { rows: raw.rows, cols: raw.cols, entries })
    }
}

/// A vector space with a named basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasedSpace {
    pub dim: usize,
    pub basis: Vec<String>,
}

impl BasedSpace {
    pub fn new(basis: Vec<String>) -> Self {
        BasedSpace { dim: basis.len(), basis }
    }
}

#[derive(Clone, Debug)]
pub struct SnfResult {
    pub rank: usize,
    /// Basis of the null space, as dense vectors of length `cols`.
    pub kernel_basis: Vec<Vec<Q>>,
    /// Surviving row indices of the cokernel.
    pub cokernel_basis: Vec<usize>,
    /// `cokernel_dim × rows` projection.
    pub cokernel_projection: RationalMatrix,
}

/// Rank, kernel and cokernel of a matrix.
pub fn snf_reduce(m: &RationalMatrix) -> SnfResult {
    // column span in Q^rows, tracking which combination of columns gave each row
    let (r, c) = (m.rows, m.cols);
    let mut image = Span::new(r);
    for j in 0..c {
        image.insert(&m.column(j));
    }
    let coker = Quotient::new(image);
    // kernel via row reduction of the transpose problem: reduced row echelon form
    let mut a: Vec<Vec<Q>> = (0..r).map(|i| (0..c).map(|j| m.get(i, j).clone()).collect()).collect();
    let mut pivots = vec![];
    let mut row = 0;
    for col in 0..c {
        let Some(pr) = (row..r).find(|&i| !a[i][col].is_zero()) else { continue };
        a.swap(row, pr);
        let inv = a[row][col].recip();
        for x in a[row].iter_mut() {
            *x *= &inv;
        }
        for i in 0..r {
            if i != row && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for k in 0..c {
                    let d = &f * &a[row][k];
                    a[i][k] -= d;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..c).filter(|j| !pivots.contains(j)).collect();
    let kernel_basis = free
        .iter()
        .map(|&fcol| {
            let mut v = vec![Q::zero(); c];
            v[fcol] = Q::one();
            for (k, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[k][fcol].clone();
            }
            v
        })
        .collect();
    SnfResult {
        rank: pivots.len(),
        kernel_basis,
        cokernel_basis: coker.basis.clone(),
        cokernel_projection: coker.projection_matrix(),
    }
}

#[derive(Clone, Debug)]
pub struct Arrow {
    pub from: usize,
    pub to: usize,
    /// `dim(to) × dim(from)`.
    pub matrix: RationalMatrix,
}

#[derive(Clone, Debug, Default)]
pub struct FinitePosetDiagram {
    pub dims: Vec<usize>,
    pub arrows: Vec<Arrow>,
}

#[derive(Clone, Debug)]
pub struct Colimit {
    pub space: BasedSpace,
    /// `(node, j)` whose basis vector represents each colimit basis element.
    pub origins: Vec<(usize, usize)>,
    /// One `dim(colim) × dim(node)` matrix per node.
    pub maps: Vec<RationalMatrix>,
}

/// Cokernel of `⊕_arrows source → ⊕_nodes`, `x ↦ ι_to(f x) − ι_from(x)`.
pub fn colimit_of_diagram(d: &FinitePosetDiagram) -> Colimit {
    let mut offset = vec![0usize];
    for &n in &d.dims {
        offset.push(offset.last().unwrap() + n);
    }
    let total = *offset.last().unwrap();
    let mut span = Span::new(total);
    for a in &d.arrows {
        assert_eq!(a.matrix.cols, d.dims[a.from]);
        assert_eq!(a.matrix.rows, d.dims[a.to]);
        for j in 0..a.matrix.cols {
            let mut v: BTreeMap<usize, Q> = BTreeMap::new();
            for (i, x) in a.matrix.column(j) {
                *v.entry(offset[a.to] + i).or_insert_with(Q::zero) += x;
            }
            *v.entry(offset[a.from] + j).or_insert_with(Q::zero) -= Q::one();
            span.insert(&sparse_from_map(v));
        }
    }
    let quot = Quotient::new(span);
    let origins: Vec<(usize, usize)> = quot
        .basis
        .iter()
        .map(|&i| {
            let node = offset.partition_point(|&o| o <= i) - 1;
            (node, i - offset[node])
        })
        .collect();
    let labels = origins.iter().map(|(n, j)| format!("{n}:{j}")).collect();
    let maps = d
        .dims
        .iter()
        .enumerate()
        .map(|(node, &n)| {
            let mut m = RationalMatrix::zeros(quot.dim(), n);
            for j in 0..n {
                for (i, x) in quot.project(&vec![(offset[node] + j, Q::one())]) {
                    m.set(i, j, x);
                }
            }
            m
        })
        .collect();
    Colimit { space: BasedSpace::new(labels), origins, maps }
}

/// Coinvariants `V / span{(g − 1)v}`; returns the quotient with its projection.
pub fn coinvariants(dim: usize, action: &[RationalMatrix]) -> Quotient {
    let mut span = Span::new(dim);
    for g in action {
        for j in 0..dim {
            let mut col: BTreeMap<usize, Q> = g.column(j).into_iter().collect();
            *col.entry(j).or_insert_with(Q::zero) -= Q::one();
            span.insert(&sparse_from_map(col));
        }
    }
    Quotient::new(span)
}

pub fn is_zero_vec(v: &[Q]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn abs_max(v: &[Q]) -> Q {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(Q::zero)
}
