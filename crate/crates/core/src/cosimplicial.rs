//! Cosimplicial chain complexes, their normalization and totalization, and
//! the spectral sequence of the filtration of `Tot` by cosimplicial degree.
//!
//! Pages are computed from the truncated filtered complex `Tot^N` with the
//! textbook formula `E_r^s = Z_r^s / (Z_{r-1}^{s+1} + D Z_{r-1}^{s-r+1})`.
//! Columns are indexed by `s = -p >= 0`. Since `Tot^N = Tot / F^{N+1}`, an
//! entry at page `r` agrees with the one of the untruncated sequence as soon
//! as `F^{N+1} ⊆ F^{s+r}`, i.e. `s + r <= N + 1`: every differential
//! `d_1..d_{r-1}` into or out of it is then seen by the truncation. Only
//! such entries are flagged stable.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chords::cosimplicial_identities;
use crate::chords::PointMap;
use crate::error::{Error, Result};
use crate::linalg::{
    homology_at, rank_and_kernel, render_combination, sign, Echelon, SparseRationalMatrix,
    SparseVec,
};

/// A bounded chain complex over ℚ with labelled bases; `boundary[q]` maps
/// degree `q` to degree `q-1`, and a missing entry means zero.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ChainComplexQ {
    labels: BTreeMap<i64, Vec<String>>,
    boundary: BTreeMap<i64, SparseRationalMatrix>,
}

impl ChainComplexQ {
    /// A complex with zero differential.
    pub fn graded(labels: BTreeMap<i64, Vec<String>>) -> Self {
        let labels = labels.into_iter().filter(|(_, l)| !l.is_empty()).collect();
        ChainComplexQ {
            labels,
            boundary: BTreeMap::new(),
        }
    }

    pub fn with_boundary(mut self, q: i64, m: SparseRationalMatrix) -> Result<Self> {
        if m.n_cols() != self.dim(q) || m.n_rows() != self.dim(q - 1) {
            return Err(Error::Shape(format!(
                "boundary in degree {q} is {}x{}, expected {}x{}",
                m.n_rows(),
                m.n_cols(),
                self.dim(q - 1),
                self.dim(q)
            )));
        }
        if !m.is_zero() {
            self.boundary.insert(q, m);
        }
        Ok(self)
    }

    pub fn dim(&self, q: i64) -> usize {
        self.labels.get(&q).map_or(0, Vec::len)
    }

    pub fn labels(&self, q: i64) -> &[String] {
        self.labels.get(&q).map_or(&[], Vec::as_slice)
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.labels.keys().copied()
    }

    pub fn boundary(&self, q: i64) -> SparseRationalMatrix {
        self.boundary
            .get(&q)
            .cloned()
            .unwrap_or_else(|| SparseRationalMatrix::zeros(self.dim(q - 1), self.dim(q)))
    }

    pub fn has_zero_differential(&self) -> bool {
        self.boundary.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.labels.values().map(Vec::len).sum()
    }

    pub fn check(&self) -> Result<()> {
        for &q in self.boundary.keys() {
            if !self.boundary(q - 1).mul(&self.boundary(q)).is_zero() {
                return Err(Error::NotAComplex);
            }
        }
        Ok(())
    }

    pub fn homology_dims(&self) -> Result<BTreeMap<i64, usize>> {
        let mut out = BTreeMap::new();
        for q in self.degrees() {
            let (dim, _) = homology_at(&self.boundary(q + 1), &self.boundary(q))?;
            if dim > 0 {
                out.insert(q, dim);
            }
        }
        Ok(out)
    }
}

/// Degree-preserving linear map between graded spaces; missing degrees are
/// zero.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GradedMap {
    pub blocks: BTreeMap<i64, SparseRationalMatrix>,
}

impl GradedMap {
    pub fn at(&self, q: i64, rows: usize, cols: usize) -> SparseRationalMatrix {
        self.blocks
            .get(&q)
            .cloned()
            .unwrap_or_else(|| SparseRationalMatrix::zeros(rows, cols))
    }
}

/// Levels `0..=N` with cofaces `d^i : n -> n+1` and codegeneracies
/// `s^j : n -> n-1`.
#[derive(Clone, Debug, Default)]
pub struct CosimplicialChainComplex {
    pub levels: Vec<ChainComplexQ>,
    /// `cofaces[n][i]`, for `n < N` and `0 <= i <= n+1`.
    pub cofaces: Vec<Vec<GradedMap>>,
    /// `codegeneracies[n][j]`, for `n <= N` and `0 <= j < n`.
    pub codegeneracies: Vec<Vec<GradedMap>>,
}

impl CosimplicialChainComplex {
    /// Checks shapes, that structure maps are chain maps, and all
    /// cosimplicial identities within the truncation.
    pub fn new(
        levels: Vec<ChainComplexQ>,
        cofaces: Vec<Vec<GradedMap>>,
        codegeneracies: Vec<Vec<GradedMap>>,
    ) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidParameter("need at least level 0".into()));
        }
        let v = CosimplicialChainComplex {
            levels,
            cofaces,
            codegeneracies,
        };
        v.validate()?;
        Ok(v)
    }

    /// The constant cosimplicial object on `c`, truncated at `n`.
    pub fn constant(c: ChainComplexQ, n: usize) -> Result<Self> {
        let id: GradedMap = GradedMap {
            blocks: c
                .degrees()
                .map(|q| (q, SparseRationalMatrix::identity(c.dim(q))))
                .collect(),
        };
        Self::new(
            vec![c; n + 1],
            (0..n).map(|k| vec![id.clone(); k + 2]).collect(),
            (0..=n).map(|k| vec![id.clone(); k]).collect(),
        )
    }

    pub fn truncation(&self) -> usize {
        self.levels.len() - 1
    }

    fn degrees(&self) -> BTreeSet<i64> {
        self.levels.iter().flat_map(|l| l.degrees()).collect()
    }

    pub fn coface(&self, n: usize, i: usize, q: i64) -> SparseRationalMatrix {
        self.cofaces[n][i].at(q, self.levels[n + 1].dim(q), self.levels[n].dim(q))
    }

    pub fn codegeneracy(&self, n: usize, j: usize, q: i64) -> SparseRationalMatrix {
        self.codegeneracies[n][j].at(q, self.levels[n - 1].dim(q), self.levels[n].dim(q))
    }

    fn structure(&self, map: PointMap, q: i64) -> SparseRationalMatrix {
        match map {
            PointMap::Coface { i, n } => self.coface(n, i, q),
            PointMap::Codegeneracy { j, n } => self.codegeneracy(n, j, q),
        }
    }

    pub fn has_zero_vertical(&self) -> bool {
        self.levels.iter().all(ChainComplexQ::has_zero_differential)
    }

    fn validate(&self) -> Result<()> {
        let top = self.truncation();
        if self.cofaces.len() != top || self.codegeneracies.len() != top + 1 {
            return Err(Error::Shape(
                "structure map lists do not match the levels".into(),
            ));
        }
        for (n, maps) in self.cofaces.iter().enumerate() {
            if maps.len() != n + 2 {
                return Err(Error::Shape(format!("level {n} needs {} cofaces", n + 2)));
            }
        }
        for (n, maps) in self.codegeneracies.iter().enumerate() {
            if maps.len() != n {
                return Err(Error::Shape(format!("level {n} needs {n} codegeneracies")));
            }
        }
        for l in &self.levels {
            l.check()?;
        }
        let degrees = self.degrees();
        let check_map = |map: PointMap, m: &GradedMap| -> Result<()> {
            let (s, t) = (&self.levels[map.source()], &self.levels[map.target()]);
            for (&q, block) in &m.blocks {
                if block.n_rows() != t.dim(q) || block.n_cols() != s.dim(q) {
                    return Err(Error::Shape(format!("{} in degree {q}", map.name())));
                }
            }
            for &q in &degrees {
                let lhs = t.boundary(q).mul(&m.at(q, t.dim(q), s.dim(q)));
                let rhs = m.at(q - 1, t.dim(q - 1), s.dim(q - 1)).mul(&s.boundary(q));
                if lhs != rhs {
                    return Err(Error::Invariant(format!(
                        "{} is not a chain map in degree {q}",
                        map.name()
                    )));
                }
            }
            Ok(())
        };
        for (n, maps) in self.cofaces.iter().enumerate() {
            for (i, m) in maps.iter().enumerate() {
                check_map(PointMap::Coface { i, n }, m)?;
            }
        }
        for (n, maps) in self.codegeneracies.iter().enumerate() {
            for (j, m) in maps.iter().enumerate() {
                check_map(PointMap::Codegeneracy { j, n }, m)?;
            }
        }
        for n in 0..=top {
            for id in cosimplicial_identities(n, top) {
                for &q in &degrees {
                    let compose = |(a, b): (PointMap, PointMap)| {
                        self.structure(b, q).mul(&self.structure(a, q))
                    };
                    let rhs = match id.rhs {
                        Some(pair) => compose(pair),
                        None => SparseRationalMatrix::identity(self.levels[n].dim(q)),
                    };
                    if compose(id.lhs) != rhs {
                        return Err(Error::Invariant(format!(
                            "cosimplicial identity {} fails in degree {q}",
                            id.name
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// `N^p` together with its inclusion into level `p`.
#[derive(Clone, Debug)]
pub struct NormalizedColumn {
    pub p: usize,
    pub complex: ChainComplexQ,
    /// Per degree, columns are the basis of `N^p` in level coordinates.
    pub inclusion: BTreeMap<i64, SparseRationalMatrix>,
}

impl NormalizedColumn {
    pub fn dim(&self, q: i64) -> usize {
        self.complex.dim(q)
    }

    fn coordinates(&self, q: i64, v: &SparseVec) -> Result<SparseVec> {
        if v.is_zero() {
            return Ok(SparseVec::new());
        }
        let incl = self.inclusion.get(&q).ok_or_else(|| {
            Error::Invariant(format!("vector outside N^{} in degree {q}", self.p))
        })?;
        let mut ech = Echelon::new(true);
        for c in incl.columns() {
            ech.insert(c.clone());
        }
        ech.coordinates(v)
            .ok_or_else(|| Error::Invariant(format!("vector outside N^{} in degree {q}", self.p)))
    }
}

/// `N^p = A^p ∩ ker s^0 ∩ ... ∩ ker s^{p-1}`, degreewise.
pub fn normalize(v: &CosimplicialChainComplex, p: usize) -> Result<NormalizedColumn> {
    if p > v.truncation() {
        return Err(Error::IndexOutOfRange(format!(
            "column {p} beyond truncation {}",
            v.truncation()
        )));
    }
    let level = &v.levels[p];
    let mut labels = BTreeMap::new();
    let mut inclusion = BTreeMap::new();
    for q in level.degrees() {
        let dim = level.dim(q);
        let kernel = if p == 0 {
            (0..dim).map(SparseVec::unit).collect()
        } else {
            let blocks: Vec<SparseRationalMatrix> =
                (0..p).map(|j| v.codegeneracy(p, j, q)).collect();
            let refs: Vec<&SparseRationalMatrix> = blocks.iter().collect();
            rank_and_kernel(&SparseRationalMatrix::vstack(dim, &refs)).1
        };
        labels.insert(
            q,
            kernel
                .iter()
                .map(|k| render_combination(k, level.labels(q)))
                .collect(),
        );
        inclusion.insert(q, SparseRationalMatrix::from_columns(dim, kernel));
    }
    let mut column = NormalizedColumn {
        p,
        complex: ChainComplexQ::graded(labels),
        inclusion,
    };
    column.inclusion.retain(|_, m| m.n_cols() > 0);
    let degrees: Vec<i64> = column.complex.degrees().collect();
    for q in degrees {
        if level.boundary(q).is_zero() {
            continue;
        }
        let images = level.boundary(q).mul(&column.inclusion[&q]);
        let cols = images
            .columns()
            .iter()
            .map(|c| column.coordinates(q - 1, c))
            .collect::<Result<Vec<_>>>()?;
        let m = SparseRationalMatrix::from_columns(column.dim(q - 1), cols);
        column.complex = column.complex.with_boundary(q, m)?;
    }
    Ok(column)
}

/// `Σ (-1)^i d^i` from level `p` to level `p+1` in degree `q`.
pub fn alternating_coface_sum(
    v: &CosimplicialChainComplex,
    p: usize,
    q: i64,
) -> SparseRationalMatrix {
    let mut acc = SparseRationalMatrix::zeros(v.levels[p + 1].dim(q), v.levels[p].dim(q));
    for i in 0..=p + 1 {
        acc = acc.axpy(&sign(i as i64), &v.coface(p, i, q));
    }
    acc
}

/// The horizontal differential `N^p -> N^{p+1}` in every degree.
pub fn horizontal_differential(
    v: &CosimplicialChainComplex,
    from: &NormalizedColumn,
    to: &NormalizedColumn,
) -> Result<GradedMap> {
    let p = from.p;
    if to.p != p + 1 || p + 1 > v.truncation() {
        return Err(Error::IndexOutOfRange(format!(
            "no horizontal map out of column {p}"
        )));
    }
    let mut blocks = BTreeMap::new();
    for (&q, incl) in &from.inclusion {
        let images = alternating_coface_sum(v, p, q).mul(incl);
        let cols = images
            .columns()
            .iter()
            .map(|c| to.coordinates(q, c))
            .collect::<Result<Vec<_>>>()?;
        let m = SparseRationalMatrix::from_columns(to.dim(q), cols);
        if !m.is_zero() {
            blocks.insert(q, m);
        }
    }
    Ok(GradedMap { blocks })
}

/// `Tot^n`: degree `j` is `⊕_p N^p_{p+j}`, with differential
/// `D = ∂ + (-1)^q δ` on `N^p_q`.
#[derive(Clone, Debug)]
pub struct TotalComplex {
    pub n: usize,
    pub columns: Vec<NormalizedColumn>,
    pub horizontal: Vec<GradedMap>,
    pub complex: ChainComplexQ,
    /// Per total degree, `(p, offset)` of each nonzero column block.
    blocks: BTreeMap<i64, Vec<(usize, usize, usize)>>,
}

impl TotalComplex {
    fn block_range(&self, j: i64, p: usize) -> Option<(usize, usize)> {
        self.blocks
            .get(&j)?
            .iter()
            .find(|b| b.0 == p)
            .map(|&(_, off, len)| (off, len))
    }
}

pub fn total_complex(v: &CosimplicialChainComplex, n: usize) -> Result<TotalComplex> {
    if n > v.truncation() {
        return Err(Error::IndexOutOfRange(format!(
            "Tot^{n} needs truncation at least {n}, have {}",
            v.truncation()
        )));
    }
    let columns = (0..=n)
        .into_par_iter()
        .map(|p| normalize(v, p))
        .collect::<Result<Vec<_>>>()?;
    let horizontal = (0..n)
        .into_par_iter()
        .map(|p| horizontal_differential(v, &columns[p], &columns[p + 1]))
        .collect::<Result<Vec<_>>>()?;

    let mut blocks: BTreeMap<i64, Vec<(usize, usize, usize)>> = BTreeMap::new();
    let mut labels: BTreeMap<i64, Vec<String>> = BTreeMap::new();
    for (p, col) in columns.iter().enumerate() {
        for q in col.complex.degrees() {
            let j = q - p as i64;
            let entry = labels.entry(j).or_default();
            blocks
                .entry(j)
                .or_default()
                .push((p, entry.len(), col.dim(q)));
            entry.extend(col.complex.labels(q).iter().map(|l| format!("[{p}] {l}")));
        }
    }
    let mut tot = TotalComplex {
        n,
        columns,
        horizontal,
        complex: ChainComplexQ::graded(labels),
        blocks,
    };
    let degrees: Vec<i64> = tot.complex.degrees().collect();
    for j in degrees {
        let mut entries = Vec::new();
        for &(p, off, len) in &tot.blocks[&j] {
            let q = p as i64 + j;
            let col = &tot.columns[p];
            if let Some((toff, _)) = tot.block_range(j - 1, p) {
                for ((r, c), x) in col.complex.boundary(q).entries() {
                    entries.push(((toff + r, off + c), x.clone()));
                }
            }
            if p < n {
                if let Some((toff, _)) = tot.block_range(j - 1, p + 1) {
                    let h = tot.horizontal[p].at(q, tot.columns[p + 1].dim(q), len);
                    let s = sign(q);
                    for ((r, c), x) in h.entries() {
                        entries.push(((toff + r, off + c), x * &s));
                    }
                }
            }
        }
        let m =
            SparseRationalMatrix::from_entries(tot.complex.dim(j - 1), tot.complex.dim(j), entries);
        tot.complex = tot.complex.with_boundary(j, m)?;
    }
    tot.complex.check()?;
    Ok(tot)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageEntry {
    /// Column `s = -p`.
    pub s: usize,
    pub q: i64,
    pub dim: usize,
    pub labels: Vec<String>,
    pub stable: bool,
}

impl PageEntry {
    /// Column in the nonpositive indexing `p = -s`.
    pub fn p(&self) -> i64 {
        -(self.s as i64)
    }
}

/// One page `E^r`; `differentials[(s, q)]` is `d_r : E^r_{-s,q} -> E^r_{-s-r,q+r-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralSequencePage {
    pub r: usize,
    pub truncation: usize,
    pub entries: Vec<PageEntry>,
    pub differentials: BTreeMap<(usize, i64), SparseRationalMatrix>,
}

impl SpectralSequencePage {
    pub fn entry(&self, s: usize, q: i64) -> Option<&PageEntry> {
        self.entries.iter().find(|e| e.s == s && e.q == q)
    }

    pub fn dim(&self, s: usize, q: i64) -> usize {
        self.entry(s, q).map_or(0, |e| e.dim)
    }

    /// `Σ_s (-1)^s dim E_{-s,q}` per internal degree `q`. Preserved from
    /// `E¹` to `E²`, since `d¹` keeps `q` and raises `s` by one. (Column
    /// sums are not: `d¹` moves between columns.)
    pub fn row_euler_characteristics(&self) -> BTreeMap<i64, i64> {
        let mut out = BTreeMap::new();
        for e in &self.entries {
            *out.entry(e.q).or_insert(0) += if e.s % 2 == 0 {
                e.dim as i64
            } else {
                -(e.dim as i64)
            };
        }
        out
    }

    /// `Σ (-1)^{q-s} dim E_{-s,q}` over the whole page; equal on every page
    /// (and to the Euler characteristic of `Tot^N`).
    pub fn euler_characteristic(&self) -> i64 {
        self.entries
            .iter()
            .map(|e| {
                if (e.q - e.s as i64) % 2 == 0 {
                    e.dim as i64
                } else {
                    -(e.dim as i64)
                }
            })
            .sum()
    }
}

/// Filtered-complex bookkeeping shared by all pages.
struct FilteredTot<'a> {
    tot: &'a TotalComplex,
    z_cache: Mutex<HashMap<(usize, usize, i64), Vec<SparseVec>>>,
}

impl<'a> FilteredTot<'a> {
    fn top(&self) -> usize {
        self.tot.n
    }

    fn offset(&self, j: i64, s: usize) -> usize {
        self.tot
            .blocks
            .get(&j)
            .map_or(0, |bs| bs.iter().filter(|b| b.0 < s).map(|b| b.2).sum())
    }

    /// `Z_r^s` in degree `j`: elements of `F^s` whose boundary lies in `F^{s+r}`.
    fn z(&self, r: usize, s: usize, j: i64) -> Vec<SparseVec> {
        if let Some(v) = self.z_cache.lock().unwrap().get(&(r, s, j)) {
            return v.clone();
        }
        let dim = self.tot.complex.dim(j);
        let start = self.offset(j, s);
        let out: Vec<SparseVec> = if s > self.top() || start >= dim {
            Vec::new()
        } else if r == 0 {
            (start..dim).map(SparseVec::unit).collect()
        } else {
            let d = self.tot.complex.boundary(j);
            let row_lo = self.offset(j - 1, s);
            let row_hi = self.offset(j - 1, s + r);
            let cols: Vec<SparseVec> = (start..dim)
                .map(|c| {
                    d.column(c)
                        .remap(|i| (i >= row_lo && i < row_hi).then(|| i - row_lo))
                })
                .collect();
            let m = SparseRationalMatrix::from_columns(row_hi - row_lo, cols);
            rank_and_kernel(&m)
                .1
                .into_iter()
                .map(|k| k.remap(|i| Some(i + start)))
                .collect()
        };
        self.z_cache.lock().unwrap().insert((r, s, j), out.clone());
        out
    }

    /// `Z_{r-1}^{s+1} + D Z_{r-1}^{s-r+1}` in degree `j`.
    fn denominator(&self, r: usize, s: usize, j: i64) -> Vec<SparseVec> {
        let mut out = self.z(r - 1, s + 1, j);
        let src = s.saturating_sub(r - 1);
        let d = self.tot.complex.boundary(j + 1);
        // elements of F^src whose boundary lies in F^s
        out.extend(self.z(s - src, src, j + 1).iter().map(|x| d.mul_vec(x)));
        out
    }

    /// Representatives of `E_r^s` in degree `j`, and an echelon holding an
    /// independent part of the denominator followed by the representatives,
    /// whose inputs start at the returned offset.
    fn page(&self, r: usize, s: usize, j: i64) -> (Vec<SparseVec>, Echelon, usize) {
        let mut ech = Echelon::new(true);
        for v in self.denominator(r, s, j) {
            if !ech.contains(&v) {
                ech.insert(v);
            }
        }
        let offset = ech.inserted();
        let mut reps = Vec::new();
        for v in self.z(r, s, j) {
            if !ech.contains(&v) {
                ech.insert(v.clone());
                reps.push(v);
            }
        }
        (reps, ech, offset)
    }
}

/// Pages `E^1 .. E^{r_max}` of the spectral sequence of `Tot^N`.
pub fn bkss_pages(v: &CosimplicialChainComplex, r_max: usize) -> Result<Vec<SpectralSequencePage>> {
    let tot = total_complex(v, v.truncation())?;
    pages_of_total(&tot, r_max)
}

pub fn pages_of_total(tot: &TotalComplex, r_max: usize) -> Result<Vec<SpectralSequencePage>> {
    if r_max == 0 {
        return Err(Error::InvalidParameter("pages start at r = 1".into()));
    }
    let ft = FilteredTot {
        tot,
        z_cache: Mutex::new(HashMap::new()),
    };
    let n = tot.n;
    // bidegrees present on E^1
    let mut cells: Vec<(usize, i64)> = Vec::new();
    for (p, col) in tot.columns.iter().enumerate() {
        for q in col.complex.degrees() {
            cells.push((p, q));
        }
    }
    let mut pages = Vec::new();
    for r in 1..=r_max {
        let computed: Vec<((usize, i64), Vec<SparseVec>, Echelon, usize)> = cells
            .par_iter()
            .map(|&(s, q)| {
                let j = q - s as i64;
                let (reps, ech, off) = ft.page(r, s, j);
                ((s, q), reps, ech, off)
            })
            .collect();
        let by_cell: BTreeMap<(usize, i64), (Vec<SparseVec>, Echelon, usize)> = computed
            .into_iter()
            .map(|(k, reps, ech, off)| (k, (reps, ech, off)))
            .collect();

        let mut entries = Vec::new();
        let mut differentials = BTreeMap::new();
        for (&(s, q), (reps, _, _)) in &by_cell {
            let j = q - s as i64;
            let col = &tot.columns[s];
            let labels = reps
                .iter()
                .map(|x| {
                    let (off, len) = tot.block_range(j, s).unwrap_or((0, 0));
                    let local = x.remap(|i| (i >= off && i < off + len).then(|| i - off));
                    render_combination(&local, col.complex.labels(q))
                })
                .collect();
            entries.push(PageEntry {
                s,
                q,
                dim: reps.len(),
                labels,
                stable: s + r <= n + 1,
            });
            if reps.is_empty() {
                continue;
            }
            let target = (s + r, q + r as i64 - 1);
            let Some((treps, tech, toff)) = by_cell.get(&target) else {
                continue;
            };
            let d = tot.complex.boundary(j);
            let cols = reps
                .iter()
                .map(|x| {
                    let y = d.mul_vec(x);
                    let coords = tech.coordinates(&y).ok_or_else(|| {
                        Error::Invariant(format!("d_{r} leaves Z at column {}", s + r))
                    })?;
                    Ok(coords.remap(|i| i.checked_sub(*toff)))
                })
                .collect::<Result<Vec<_>>>()?;
            let m = SparseRationalMatrix::from_columns(treps.len(), cols);
            if !m.is_zero() {
                differentials.insert((s, q), m);
            }
        }
        pages.push(SpectralSequencePage {
            r,
            truncation: n,
            entries,
            differentials,
        });
    }
    Ok(pages)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseEntry {
    pub s: usize,
    pub q: i64,
    pub r: usize,
    pub dim_r: usize,
    pub dim_2: usize,
    pub stable: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseReport {
    pub truncation: usize,
    pub r_max: usize,
    pub entries: Vec<CollapseEntry>,
    pub passed: bool,
}

/// Compares `E^r` with `E^2` on every stable entry for `2 < r <= r_max`;
/// meant for complexes with zero vertical differential.
pub fn formality_collapse_check(
    v: &CosimplicialChainComplex,
    r_max: usize,
) -> Result<CollapseReport> {
    if !v.has_zero_vertical() {
        return Err(Error::InvalidParameter(
            "collapse check expects zero vertical differentials".into(),
        ));
    }
    let pages = bkss_pages(v, r_max.max(2))?;
    Ok(collapse_report(&pages, r_max))
}

pub fn collapse_report(pages: &[SpectralSequencePage], r_max: usize) -> CollapseReport {
    let e2 = &pages[1];
    let mut entries = Vec::new();
    for page in pages.iter().filter(|p| p.r > 2 && p.r <= r_max) {
        for e in &page.entries {
            entries.push(CollapseEntry {
                s: e.s,
                q: e.q,
                r: page.r,
                dim_r: e.dim,
                dim_2: e2.dim(e.s, e.q),
                stable: e.stable,
            });
        }
    }
    let passed = entries.iter().all(|e| !e.stable || e.dim_r == e.dim_2);
    CollapseReport {
        truncation: e2.truncation,
        r_max,
        entries,
        passed,
    }
}

/// `E^2` dimensions computed on the full levels with `Σ (-1)^i d^i`, for a
/// complex with zero vertical differential; only columns `s < N` are
/// returned.
pub fn unnormalized_e2_dims(v: &CosimplicialChainComplex) -> Result<BTreeMap<(usize, i64), usize>> {
    if !v.has_zero_vertical() {
        return Err(Error::InvalidParameter(
            "expects zero vertical differentials".into(),
        ));
    }
    let top = v.truncation();
    let mut out = BTreeMap::new();
    for s in 0..top {
        for q in v.levels[s].degrees() {
            let incoming = if s == 0 {
                SparseRationalMatrix::zeros(v.levels[0].dim(q), 0)
            } else {
                alternating_coface_sum(v, s - 1, q)
            };
            let (dim, _) = homology_at(&incoming, &alternating_coface_sum(v, s, q))?;
            if dim > 0 {
                out.insert((s, q), dim);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;
    use num::Signed;

    fn graded(dims: &[(i64, usize)]) -> ChainComplexQ {
        ChainComplexQ::graded(
            dims.iter()
                .map(|&(q, n)| (q, (0..n).map(|i| format!("e{q}_{i}")).collect()))
                .collect(),
        )
    }

    #[test]
    fn constant_complex_normalizes_away() {
        let c = graded(&[(0, 1), (2, 2)]);
        let v = CosimplicialChainComplex::constant(c.clone(), 3).unwrap();
        assert_eq!(normalize(&v, 0).unwrap().complex.total_dim(), 3);
        for p in 1..=3 {
            assert_eq!(normalize(&v, p).unwrap().complex.total_dim(), 0);
        }
        let tot = total_complex(&v, 3).unwrap();
        assert_eq!(tot.complex.dim(0), 1);
        assert_eq!(tot.complex.dim(2), 2);
        let pages = bkss_pages(&v, 3).unwrap();
        for page in &pages {
            assert_eq!(page.dim(0, 2), 2);
            assert!(page.entries.iter().all(|e| e.s == 0));
        }
        assert!(formality_collapse_check(&v, 4).unwrap().passed);
    }

    /// Constant complex on a two-term chain complex with nonzero
    /// differential: E^1 is its homology.
    #[test]
    fn vertical_differential_is_taken_first() {
        let c = graded(&[(0, 1), (1, 1)])
            .with_boundary(1, SparseRationalMatrix::from_rows(&[vec![1]]))
            .unwrap();
        let v = CosimplicialChainComplex::constant(c, 2).unwrap();
        let pages = bkss_pages(&v, 2).unwrap();
        assert!(pages[0].entries.iter().all(|e| e.dim == 0));
    }

    /// A filtered complex with a genuine `d_2`: `a` in column 0, `b`, `c`
    /// in column 1 with vertical `c -> b`, `f` in column 2, and
    /// `D a = b`, `D c = b + f`. Then `a - c` is a cycle modulo `F^2` and
    /// `d_2 a = -f`.
    #[test]
    fn staircase_has_d2() {
        let columns = vec![
            column(0, &[(1, 1)]),
            column(1, &[(1, 1), (2, 1)]),
            column(2, &[(2, 1)]),
        ];
        let blocks = BTreeMap::from([
            (1, vec![(0, 0, 1), (1, 1, 1)]),
            (0, vec![(1, 0, 1), (2, 1, 1)]),
        ]);
        let labels = BTreeMap::from([
            (1, vec!["a".to_string(), "c".to_string()]),
            (0, vec!["b".to_string(), "f".to_string()]),
        ]);
        let d1 = SparseRationalMatrix::from_rows(&[vec![1, 1], vec![0, 1]]);
        let complex = ChainComplexQ::graded(labels).with_boundary(1, d1).unwrap();
        let tot = TotalComplex {
            n: 2,
            columns,
            horizontal: Vec::new(),
            complex,
            blocks,
        };
        let pages = pages_of_total(&tot, 3).unwrap();
        let dims = |r: usize| -> Vec<usize> {
            [(0, 1), (1, 1), (1, 2), (2, 2)]
                .iter()
                .map(|&(s, q)| pages[r - 1].dim(s, q))
                .collect()
        };
        assert_eq!(dims(1), [1, 0, 0, 1]);
        assert_eq!(dims(2), [1, 0, 0, 1]);
        assert_eq!(dims(3), [0, 0, 0, 0]);
        assert!(pages[0].differentials.is_empty());
        let d2 = &pages[1].differentials[&(0, 1)];
        assert_eq!(d2.get(0, 0).abs(), rat(1));
        assert!(pages[1].entry(0, 1).unwrap().stable);
    }

    fn column(p: usize, dims: &[(i64, usize)]) -> NormalizedColumn {
        let complex = graded(dims);
        let inclusion = dims
            .iter()
            .map(|&(q, n)| (q, SparseRationalMatrix::identity(n)))
            .collect();
        NormalizedColumn {
            p,
            complex,
            inclusion,
        }
    }

    /// Zero-differential complex whose only nonconstant piece is a single
    /// nondegenerate class at level 1: `ℚ` in degree 0 at level 0 and
    /// `ℚ²` at level 1 with `d^0 = e_0`, `d^1 = e_1`, `s^0 = (1, 1)`.
    fn interval() -> CosimplicialChainComplex {
        let l0 = graded(&[(0, 1)]);
        let l1 = graded(&[(0, 2)]);
        let map = |rows: &[Vec<i64>]| GradedMap {
            blocks: BTreeMap::from([(0, SparseRationalMatrix::from_rows(rows))]),
        };
        CosimplicialChainComplex::new(
            vec![l0, l1],
            vec![vec![map(&[vec![1], vec![0]]), map(&[vec![0], vec![1]])]],
            vec![vec![], vec![map(&[vec![1, 1]])]],
        )
        .unwrap()
    }

    #[test]
    fn interval_pages() {
        let v = interval();
        let n1 = normalize(&v, 1).unwrap();
        assert_eq!(n1.dim(0), 1);
        let pages = bkss_pages(&v, 2).unwrap();
        assert_eq!(pages[0].dim(0, 0), 1);
        assert_eq!(pages[0].dim(1, 0), 1);
        // d^0 - d^1 is injective on level 0
        assert_eq!(pages[1].dim(0, 0), 0);
        assert_eq!(pages[1].dim(1, 0), 0);
        assert!(pages[0].differentials.contains_key(&(0, 0)));
        assert!(pages[0].entry(1, 0).unwrap().stable);
        assert!(pages[1].entry(0, 0).unwrap().stable);
        assert!(!pages[1].entry(1, 0).unwrap().stable);
    }

    #[test]
    fn rejects_broken_identities() {
        let l0 = graded(&[(0, 1)]);
        let l1 = graded(&[(0, 1)]);
        let one = GradedMap {
            blocks: BTreeMap::from([(0, SparseRationalMatrix::identity(1))]),
        };
        let two = GradedMap {
            blocks: BTreeMap::from([(0, SparseRationalMatrix::identity(1).scaled(&rat(2)))]),
        };
        let r = CosimplicialChainComplex::new(
            vec![l0, l1],
            vec![vec![one.clone(), two]],
            vec![vec![], vec![one]],
        );
        assert!(matches!(r, Err(Error::Invariant(_))));
    }

    #[test]
    fn total_complex_of_interval() {
        let v = interval();
        let tot = total_complex(&v, 1).unwrap();
        // Tot_0 = N^0_0, Tot_{-1} = N^1_0
        assert_eq!(tot.complex.dim(0), 1);
        assert_eq!(tot.complex.dim(-1), 1);
        assert_eq!(tot.complex.homology_dims().unwrap(), BTreeMap::new());
    }
}
