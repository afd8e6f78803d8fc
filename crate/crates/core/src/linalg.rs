//! Exact sparse linear algebra over the rationals.
//!
//! Everything in this crate that needs a rank, a kernel, a quotient or a
//! homology group goes through [`Echelon`], an incremental row-echelon
//! basis that optionally remembers how each pivot row was assembled from
//! the inserted vectors. No floating point is used anywhere.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `(-1)^e` as a rational.
pub fn sign(e: i64) -> Rational {
    if e.rem_euclid(2) == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Renders `num/den`, or just `num` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("malformed rational {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// Sparse coordinate vector: sorted `(index, value)` pairs without zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVec {
    entries: Vec<(usize, Rational)>,
}

impl SparseVec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn unit(i: usize) -> Self {
        SparseVec {
            entries: vec![(i, Rational::one())],
        }
    }

    /// Builds a vector from unsorted pairs, summing duplicates.
    pub fn from_pairs<I: IntoIterator<Item = (usize, Rational)>>(pairs: I) -> Self {
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        for (i, v) in pairs {
            *acc.entry(i).or_insert_with(Rational::zero) += v;
        }
        SparseVec {
            entries: acc.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        }
    }

    pub fn from_dense(values: &[Rational]) -> Self {
        SparseVec {
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i, v.clone()))
                .collect(),
        }
    }

    pub fn from_ints(values: &[i64]) -> Self {
        Self::from_dense(&values.iter().map(|&v| rat(v)).collect::<Vec<_>>())
    }

    pub fn to_dense(&self, len: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); len];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize) -> Rational {
        match self.entries.binary_search_by_key(&i, |(j, _)| *j) {
            Ok(pos) => self.entries[pos].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> + '_ {
        self.entries.iter().map(|(i, v)| (*i, v))
    }

    pub fn leading(&self) -> Option<(usize, &Rational)> {
        self.entries.first().map(|(i, v)| (*i, v))
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|(i, _)| *i)
    }

    pub fn scale(&mut self, c: &Rational) {
        if c.is_zero() {
            self.entries.clear();
            return;
        }
        for (_, v) in &mut self.entries {
            *v *= c;
        }
    }

    pub fn scaled(&self, c: &Rational) -> SparseVec {
        let mut out = self.clone();
        out.scale(c);
        out
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: &Rational, other: &SparseVec) {
        if c.is_zero() || other.is_zero() {
            return;
        }
        let mut merged = Vec::with_capacity(self.entries.len() + other.entries.len());
        let mut a = std::mem::take(&mut self.entries).into_iter().peekable();
        let mut b = other.entries.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (Some((ia, _)), Some((ib, _))) => {
                    if ia < ib {
                        merged.push(a.next().unwrap());
                    } else if ib < ia {
                        let (ib, vb) = b.next().unwrap();
                        merged.push((*ib, c * vb));
                    } else {
                        let (ia, va) = a.next().unwrap();
                        let (_, vb) = b.next().unwrap();
                        let s = va + c * vb;
                        if !s.is_zero() {
                            merged.push((ia, s));
                        }
                    }
                }
                (Some(_), None) => merged.push(a.next().unwrap()),
                (None, Some(_)) => {
                    let (ib, vb) = b.next().unwrap();
                    merged.push((*ib, c * vb));
                }
                (None, None) => break,
            }
        }
        self.entries = merged;
    }

    pub fn add(&self, other: &SparseVec) -> SparseVec {
        let mut out = self.clone();
        out.axpy(&Rational::one(), other);
        out
    }

    pub fn sub(&self, other: &SparseVec) -> SparseVec {
        let mut out = self.clone();
        out.axpy(&-Rational::one(), other);
        out
    }

    pub fn dot(&self, other: &SparseVec) -> Rational {
        let mut acc = Rational::zero();
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() && j < other.entries.len() {
            let (a, va) = &self.entries[i];
            let (b, vb) = &other.entries[j];
            if a < b {
                i += 1;
            } else if b < a {
                j += 1;
            } else {
                acc += va * vb;
                i += 1;
                j += 1;
            }
        }
        acc
    }

    /// Re-indexes every entry through `f`; entries mapped to `None` are dropped.
    pub fn remap(&self, mut f: impl FnMut(usize) -> Option<usize>) -> SparseVec {
        SparseVec::from_pairs(
            self.entries
                .iter()
                .filter_map(|(i, v)| f(*i).map(|j| (j, v.clone()))),
        )
    }

    /// Index of the first entry at or after `from` (an index into `entries`).
    fn position_at_or_after(&self, col: usize) -> usize {
        self.entries.partition_point(|(i, _)| *i < col)
    }
}

/// Exact sparse matrix, stored column by column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseRationalMatrix {
    n_rows: usize,
    n_cols: usize,
    cols: Vec<SparseVec>,
}

impl SparseRationalMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        SparseRationalMatrix {
            n_rows,
            n_cols,
            cols: vec![SparseVec::new(); n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseRationalMatrix {
            n_rows: n,
            n_cols: n,
            cols: (0..n).map(SparseVec::unit).collect(),
        }
    }

    /// Panics if a column has an entry outside `n_rows`.
    pub fn from_columns(n_rows: usize, cols: Vec<SparseVec>) -> Self {
        for c in &cols {
            if let Some(m) = c.max_index() {
                assert!(
                    m < n_rows,
                    "column entry {m} out of bounds for {n_rows} rows"
                );
            }
        }
        SparseRationalMatrix {
            n_rows,
            n_cols: cols.len(),
            cols,
        }
    }

    /// Dense row-major integer constructor, mostly for tests.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.len());
        let cols = (0..n_cols)
            .map(|c| {
                SparseVec::from_pairs(rows.iter().enumerate().map(|(r, row)| (r, rat(row[c]))))
            })
            .collect();
        SparseRationalMatrix {
            n_rows,
            n_cols,
            cols,
        }
    }

    pub fn from_entries(
        n_rows: usize,
        n_cols: usize,
        entries: impl IntoIterator<Item = ((usize, usize), Rational)>,
    ) -> Self {
        let mut per_col: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); n_cols];
        for ((r, c), v) in entries {
            assert!(r < n_rows && c < n_cols, "entry ({r},{c}) out of bounds");
            per_col[c].push((r, v));
        }
        SparseRationalMatrix {
            n_rows,
            n_cols,
            cols: per_col.into_iter().map(SparseVec::from_pairs).collect(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn column(&self, c: usize) -> &SparseVec {
        &self.cols[c]
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        self.cols[c].get(r)
    }

    /// Nonzero entries in column-major order.
    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), &Rational)> + '_ {
        self.cols
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |(r, v)| ((r, c), v)))
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(SparseVec::nnz).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(SparseVec::is_zero)
    }

    pub fn mul_vec(&self, x: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (c, v) in x.iter() {
            out.axpy(v, &self.cols[c]);
        }
        out
    }

    /// `self * rhs`; panics on a shape mismatch.
    pub fn mul(&self, rhs: &SparseRationalMatrix) -> SparseRationalMatrix {
        assert_eq!(
            self.n_cols, rhs.n_rows,
            "shape mismatch: {}x{} * {}x{}",
            self.n_rows, self.n_cols, rhs.n_rows, rhs.n_cols
        );
        SparseRationalMatrix {
            n_rows: self.n_rows,
            n_cols: rhs.n_cols,
            cols: rhs.cols.iter().map(|c| self.mul_vec(c)).collect(),
        }
    }

    pub fn add(&self, rhs: &SparseRationalMatrix) -> SparseRationalMatrix {
        self.axpy(&Rational::one(), rhs)
    }

    pub fn sub(&self, rhs: &SparseRationalMatrix) -> SparseRationalMatrix {
        self.axpy(&-Rational::one(), rhs)
    }

    /// `self + c * rhs`.
    pub fn axpy(&self, c: &Rational, rhs: &SparseRationalMatrix) -> SparseRationalMatrix {
        assert_eq!((self.n_rows, self.n_cols), (rhs.n_rows, rhs.n_cols));
        let cols = self
            .cols
            .iter()
            .zip(&rhs.cols)
            .map(|(a, b)| {
                let mut a = a.clone();
                a.axpy(c, b);
                a
            })
            .collect();
        SparseRationalMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            cols,
        }
    }

    pub fn scaled(&self, c: &Rational) -> SparseRationalMatrix {
        SparseRationalMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            cols: self.cols.iter().map(|col| col.scaled(c)).collect(),
        }
    }

    pub fn transpose(&self) -> SparseRationalMatrix {
        SparseRationalMatrix::from_entries(
            self.n_cols,
            self.n_rows,
            self.entries().map(|((r, c), v)| ((c, r), v.clone())),
        )
    }

    /// Stacks matrices with a common column count on top of each other.
    pub fn vstack(n_cols: usize, blocks: &[&SparseRationalMatrix]) -> SparseRationalMatrix {
        let mut cols = vec![Vec::new(); n_cols];
        let mut offset = 0;
        for b in blocks {
            assert_eq!(b.n_cols, n_cols);
            for ((r, c), v) in b.entries() {
                cols[c].push((r + offset, v.clone()));
            }
            offset += b.n_rows;
        }
        SparseRationalMatrix {
            n_rows: offset,
            n_cols,
            cols: cols.into_iter().map(SparseVec::from_pairs).collect(),
        }
    }

    /// Restricts to a subset of columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> SparseRationalMatrix {
        SparseRationalMatrix {
            n_rows: self.n_rows,
            n_cols: cols.len(),
            cols: cols.iter().map(|&c| self.cols[c].clone()).collect(),
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        let mut out = vec![vec![Rational::zero(); self.n_cols]; self.n_rows];
        for ((r, c), v) in self.entries() {
            out[r][c] = v.clone();
        }
        out
    }

    pub fn rank(&self) -> usize {
        let mut ech = Echelon::new(false);
        for c in &self.cols {
            ech.insert(c.clone());
        }
        ech.rank()
    }
}

impl fmt::Display for SparseRationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.to_dense() {
            let cells: Vec<String> = row.iter().map(format_rational).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
struct PivotRow {
    vec: SparseVec,
    combo: SparseVec,
}

/// Incremental semi-echelon basis.
///
/// Every stored row has coefficient 1 at its pivot, which is also its
/// smallest column. Inserted vectors are numbered in insertion order; with
/// tracking enabled each row also records its expression in those inputs,
/// which is what makes kernels, coordinates and quotient projections
/// available.
#[derive(Clone, Debug)]
pub struct Echelon {
    rows: Vec<PivotRow>,
    pivot_of: BTreeMap<usize, usize>,
    inserted: usize,
    track: bool,
}

/// Outcome of inserting a vector into an [`Echelon`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Insertion {
    /// The vector was independent; it became pivot row `row`.
    Independent { input: usize, pivot_col: usize },
    /// The vector was dependent; `relation` is a combination of inputs
    /// (including this one with coefficient 1) that vanishes.
    Dependent { input: usize, relation: SparseVec },
}

impl Echelon {
    pub fn new(track: bool) -> Self {
        Echelon {
            rows: Vec::new(),
            pivot_of: BTreeMap::new(),
            inserted: 0,
            track,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn inserted(&self) -> usize {
        self.inserted
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivot_of.keys().copied()
    }

    /// Fully reduces `v` against the pivot rows. Returns the residual and the
    /// accumulated multiple `sum_k c_k row_k` expressed in inputs, so that
    /// `v = residual + (that combination of inputs)`.
    fn reduce(&self, mut v: SparseVec) -> (SparseVec, SparseVec) {
        let mut acc = SparseVec::new();
        let mut cursor = 0usize;
        loop {
            let start = v.position_at_or_after(cursor);
            let hit = v.entries[start..]
                .iter()
                .find_map(|(c, val)| self.pivot_of.get(c).map(|&r| (*c, r, val.clone())));
            let Some((col, r, coeff)) = hit else { break };
            let row = &self.rows[r];
            v.axpy(&-coeff.clone(), &row.vec);
            if self.track {
                acc.axpy(&coeff, &row.combo);
            }
            cursor = col + 1;
        }
        (v, acc)
    }

    pub fn insert(&mut self, v: SparseVec) -> Insertion {
        let input = self.inserted;
        self.inserted += 1;
        let (residual, acc) = self.reduce(v);
        if residual.is_zero() {
            let mut relation = SparseVec::unit(input);
            relation.axpy(&-Rational::one(), &acc);
            return Insertion::Dependent { input, relation };
        }
        let (pivot_col, lead) = {
            let (c, l) = residual.leading().unwrap();
            (c, l.clone())
        };
        let inv = lead.recip();
        let mut vec = residual;
        vec.scale(&inv);
        let combo = if self.track {
            let mut combo = SparseVec::unit(input);
            combo.axpy(&-Rational::one(), &acc);
            combo.scale(&inv);
            combo
        } else {
            SparseVec::new()
        };
        self.pivot_of.insert(pivot_col, self.rows.len());
        self.rows.push(PivotRow { vec, combo });
        Insertion::Independent { input, pivot_col }
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v.clone()).0.is_zero()
    }

    /// Expresses `v` as a combination of the inserted vectors, if it lies in
    /// their span. Requires tracking.
    pub fn coordinates(&self, v: &SparseVec) -> Option<SparseVec> {
        assert!(self.track, "coordinates need a tracking echelon basis");
        let (residual, acc) = self.reduce(v.clone());
        residual.is_zero().then_some(acc)
    }
}

/// Ordered list of distinct opaque basis tags.
#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct LabeledBasis {
    labels: Vec<String>,
}

impl LabeledBasis {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for l in &labels {
            if !seen.insert(l) {
                return Err(Error::Invariant(format!("duplicate basis label {l}")));
            }
        }
        Ok(LabeledBasis { labels })
    }

    pub fn dimension(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// Rank of `m` and a basis of its kernel.
pub fn rank_and_kernel(m: &SparseRationalMatrix) -> (usize, Vec<SparseVec>) {
    let mut ech = Echelon::new(true);
    let mut kernel = Vec::new();
    for c in m.columns() {
        if let Insertion::Dependent { relation, .. } = ech.insert(c.clone()) {
            kernel.push(relation);
        }
    }
    (ech.rank(), kernel)
}

/// Columns of `m` forming a basis of its column space.
pub fn image_basis(m: &SparseRationalMatrix) -> Vec<SparseVec> {
    let mut ech = Echelon::new(false);
    let mut out = Vec::new();
    for c in m.columns() {
        if let Insertion::Independent { .. } = ech.insert(c.clone()) {
            out.push(c.clone());
        }
    }
    out
}

/// Standard basis vectors projecting onto a basis of `ambient / span(subspace)`.
pub fn quotient_basis(ambient_dim: usize, subspace: &[SparseVec]) -> (usize, Vec<SparseVec>) {
    let mut ech = Echelon::new(false);
    for v in subspace {
        debug_assert!(v.max_index().is_none_or(|m| m < ambient_dim));
        ech.insert(v.clone());
    }
    let reps: Vec<SparseVec> = (0..ambient_dim)
        .filter_map(|i| match ech.insert(SparseVec::unit(i)) {
            Insertion::Independent { .. } => Some(SparseVec::unit(i)),
            Insertion::Dependent { .. } => None,
        })
        .collect();
    (reps.len(), reps)
}

/// Homology of `A --f--> B --g--> C` at `B`.
pub fn homology_at(
    f: &SparseRationalMatrix,
    g: &SparseRationalMatrix,
) -> Result<(usize, Vec<SparseVec>)> {
    if g.n_cols() != f.n_rows() {
        return Err(Error::Shape(format!(
            "cannot compose {}x{} after {}x{}",
            g.n_rows(),
            g.n_cols(),
            f.n_rows(),
            f.n_cols()
        )));
    }
    if !g.mul(f).is_zero() {
        return Err(Error::NotAComplex);
    }
    let (_, kernel) = rank_and_kernel(g);
    let mut ech = Echelon::new(false);
    for c in f.columns() {
        ech.insert(c.clone());
    }
    let reps: Vec<SparseVec> = kernel
        .into_iter()
        .filter(|k| matches!(ech.insert(k.clone()), Insertion::Independent { .. }))
        .collect();
    Ok((reps.len(), reps))
}

/// Renders a coordinate vector against a list of labels, e.g. `x - 2*y`.
pub fn render_combination(v: &SparseVec, labels: &[String]) -> String {
    if v.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (i, c)) in v.iter().enumerate() {
        let neg = c.is_negative();
        let abs = c.abs();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if !abs.is_one() {
            out.push_str(&format_rational(&abs));
            out.push('*');
        }
        out.push_str(&labels[i]);
    }
    out
}
