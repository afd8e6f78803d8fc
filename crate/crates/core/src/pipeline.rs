//! From `χ•` to rational homotopy groups of the space of long knots
//! (modulo immersions), plus the homology-side spectral sequence used as a
//! cross-check.
//!
//! The homotopy side places `χ(n)` of weight `w` in degree
//! `q = w(d-2) + 1`. Since the spectral sequence collapses at `E²`,
//! `π_m ⊗ ℚ` is the sum of `E²_{p,q}` over `q + p = m`. Every normalized
//! column of weight `w` vanishes beyond `p = w + 1` (verified, not assumed),
//! which bounds the weights and columns that can reach a given `m`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::chi::ChiAlgebra;
use crate::chords::PointMap;
use crate::conf::{homology_map, ConfSpace};
use crate::cosimplicial::{
    alternating_coface_sum, pages_of_total, total_complex, ChainComplexQ, CosimplicialChainComplex,
    GradedMap, SpectralSequencePage, TotalComplex,
};
use crate::error::{Error, Result};
use crate::linalg::{rank_and_kernel, SparseRationalMatrix};

/// Upper limits on the work a single request may trigger.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub max_weight: usize,
    pub max_level: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_weight: 4,
            max_level: 9,
        }
    }
}

pub fn homotopy_degree(d: usize, weight: usize) -> i64 {
    (weight * (d - 2) + 1) as i64
}

/// Weight of a homotopy-side degree, if it is one.
pub fn weight_of_degree(d: usize, q: i64) -> Option<usize> {
    let step = (d - 2) as i64;
    (q > 1 && (q - 1) % step == 0).then(|| ((q - 1) / step) as usize)
}

fn require_d(d: usize) -> Result<()> {
    if d < 4 {
        return Err(Error::InvalidParameter(format!(
            "the knot-space spectral sequence needs d >= 4, got d = {d}"
        )));
    }
    Ok(())
}

/// `χ•` truncated at level `p_max`, weights `1..=weight_max`, as a
/// cosimplicial complex with zero vertical differential.
pub fn chi_cosimplicial(
    chi: &ChiAlgebra,
    p_max: usize,
    weight_max: usize,
) -> Result<CosimplicialChainComplex> {
    let d = chi.d();
    let mut levels = Vec::new();
    for n in 0..=p_max {
        let mut labels = BTreeMap::new();
        for w in 1..=weight_max {
            labels.insert(
                homotopy_degree(d, w),
                chi.component(n, w)?.labels().to_vec(),
            );
        }
        levels.push(ChainComplexQ::graded(labels));
    }
    let graded = |map: PointMap| -> Result<GradedMap> {
        let mut blocks = BTreeMap::new();
        for w in 1..=weight_max {
            let m = chi.structure_map(map, w)?;
            if !m.matrix.is_zero() {
                blocks.insert(homotopy_degree(d, w), m.matrix.clone());
            }
        }
        Ok(GradedMap { blocks })
    };
    let cofaces = (0..p_max)
        .map(|n| {
            (0..=n + 1)
                .map(|i| graded(PointMap::Coface { i, n }))
                .collect()
        })
        .collect::<Result<Vec<Vec<_>>>>()?;
    let codegeneracies = (0..=p_max)
        .map(|n| {
            (0..n)
                .map(|j| graded(PointMap::Codegeneracy { j, n }))
                .collect()
        })
        .collect::<Result<Vec<Vec<_>>>>()?;
    CosimplicialChainComplex::new(levels, cofaces, codegeneracies)
}

/// `H_+(K(•))` in degrees `k(d-1) <= degree_max`, truncated at `p_max`.
pub fn homology_cosimplicial(
    d: usize,
    p_max: usize,
    degree_max: usize,
) -> Result<CosimplicialChainComplex> {
    let k_max = degree_max / (d - 1);
    let deg = |k: usize| (k * (d - 1)) as i64;
    let mut levels = Vec::new();
    for n in 0..=p_max {
        let x = ConfSpace::new(n, d)?;
        let labels = (1..=k_max)
            .map(|k| (deg(k), x.homology_labels(k)))
            .collect();
        levels.push(ChainComplexQ::graded(labels));
    }
    let graded = |map: PointMap| -> Result<GradedMap> {
        let mut blocks = BTreeMap::new();
        for k in 1..=k_max {
            let m = homology_map(map, k, d)?;
            if !m.is_zero() {
                blocks.insert(deg(k), m);
            }
        }
        Ok(GradedMap { blocks })
    };
    let cofaces = (0..p_max)
        .map(|n| {
            (0..=n + 1)
                .map(|i| graded(PointMap::Coface { i, n }))
                .collect()
        })
        .collect::<Result<Vec<Vec<_>>>>()?;
    let codegeneracies = (0..=p_max)
        .map(|n| {
            (0..n)
                .map(|j| graded(PointMap::Codegeneracy { j, n }))
                .collect()
        })
        .collect::<Result<Vec<Vec<_>>>>()?;
    CosimplicialChainComplex::new(levels, cofaces, codegeneracies)
}

/// The homotopy-side `E¹` with everything needed for later pages.
#[derive(Clone, Debug)]
pub struct HomotopyE1 {
    pub d: usize,
    pub p_max: usize,
    pub weight_max: usize,
    pub complex: CosimplicialChainComplex,
    pub total: TotalComplex,
    pub page: SpectralSequencePage,
}

pub fn homotopy_e1(chi: &ChiAlgebra, p_max: usize, weight_max: usize) -> Result<HomotopyE1> {
    require_d(chi.d())?;
    let complex = chi_cosimplicial(chi, p_max, weight_max)?;
    let total = total_complex(&complex, p_max)?;
    let page = pages_of_total(&total, 1)?.remove(0);
    for e in &page.entries {
        if e.dim > 0 && weight_of_degree(chi.d(), e.q).is_none() {
            return Err(Error::Invariant(format!(
                "E¹ entry off the weight grid at q = {}",
                e.q
            )));
        }
    }
    Ok(HomotopyE1 {
        d: chi.d(),
        p_max,
        weight_max,
        complex,
        total,
        page,
    })
}

pub fn e2_page(e1: &HomotopyE1) -> Result<SpectralSequencePage> {
    Ok(pages_of_total(&e1.total, 2)?.remove(1))
}

/// Dimensions of the normalized columns of `χ•` in one weight, computed as
/// kernels of the stacked codegeneracies.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportCheck {
    pub weight: usize,
    pub max_level: usize,
    /// `dim N^p` for `p = 0..=max_level`.
    pub column_dims: Vec<usize>,
    /// Largest column with `N^p ≠ 0`.
    pub last_nonzero: Option<usize>,
    /// `N^p = 0` for every `p > w + 1` up to `max_level`.
    pub holds: bool,
}

impl SupportCheck {
    /// `N^p = 0` for every `p > 2w` up to `max_level`.
    pub fn holds_2w(&self) -> bool {
        self.last_nonzero.is_none_or(|p| p <= 2 * self.weight)
    }
}

pub fn verify_support_bound(
    chi: &ChiAlgebra,
    weight: usize,
    max_level: usize,
) -> Result<SupportCheck> {
    let mut column_dims = Vec::with_capacity(max_level + 1);
    for p in 0..=max_level {
        let comp = chi.component(p, weight)?;
        let dim = if p == 0 {
            comp.dim()
        } else {
            let maps = (0..p)
                .map(|j| chi.codegeneracy_map(j, p, weight))
                .collect::<Result<Vec<_>>>()?;
            let refs: Vec<&SparseRationalMatrix> = maps.iter().map(|m| &m.matrix).collect();
            rank_and_kernel(&SparseRationalMatrix::vstack(comp.dim(), &refs))
                .1
                .len()
        };
        column_dims.push(dim);
    }
    let last_nonzero = column_dims.iter().rposition(|&x| x > 0);
    Ok(SupportCheck {
        weight,
        max_level,
        holds: last_nonzero.is_none_or(|p| p <= weight + 1),
        column_dims,
        last_nonzero,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bidegree {
    pub p: i64,
    pub q: i64,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiRow {
    pub m: i64,
    pub dim: usize,
    pub bidegrees: Vec<Bidegree>,
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnotPiTable {
    pub d: usize,
    pub m_max: i64,
    pub weight_max: usize,
    pub p_max: usize,
    pub rows: Vec<PiRow>,
    pub support: Vec<SupportCheck>,
}

/// Weight and truncation needed for every `m <= m_max` to be final.
pub fn pi_table_plan(d: usize, m_max: usize) -> Result<(usize, usize)> {
    require_d(d)?;
    // weight w first reaches m = w(d-3), from column p = w + 1
    let weight_max = (m_max / (d - 3)).max(1);
    // E² at column w + 1 is final once w + 1 + 2 <= N + 1
    Ok((weight_max, weight_max + 2))
}

pub fn knot_pi_table(chi: &ChiAlgebra, m_max: usize, limits: Limits) -> Result<KnotPiTable> {
    let d = chi.d();
    let (weight_max, p_max) = pi_table_plan(d, m_max)?;
    if weight_max > limits.max_weight || p_max > limits.max_level {
        return Err(Error::ResourceGuard(format!(
            "m_max = {m_max} at d = {d} needs weights up to {weight_max} and {p_max} levels \
             (limits: weight {}, level {})",
            limits.max_weight, limits.max_level
        )));
    }
    let support = (1..=weight_max)
        .map(|w| verify_support_bound(chi, w, p_max))
        .collect::<Result<Vec<_>>>()?;
    let e1 = homotopy_e1(chi, p_max, weight_max)?;
    let e2 = e2_page(&e1)?;

    let mut rows = Vec::new();
    for m in 1..=m_max as i64 {
        let mut bidegrees = Vec::new();
        let mut dim = 0;
        let mut complete = true;
        for e in e2.entries.iter().filter(|e| e.q - e.s as i64 == m) {
            if e.dim > 0 {
                bidegrees.push(Bidegree {
                    p: e.p(),
                    q: e.q,
                    dim: e.dim,
                });
                dim += e.dim;
            }
            complete &= e.stable;
        }
        // every weight that could reach m must have a verified support bound
        for s in &support {
            if s.weight * (d - 3) <= m as usize {
                complete &= s.holds;
            }
        }
        rows.push(PiRow {
            m,
            dim,
            bidegrees,
            complete,
        });
    }
    Ok(KnotPiTable {
        d,
        m_max: m_max as i64,
        weight_max,
        p_max,
        rows,
        support,
    })
}

/// A row where an externally supplied table disagrees with a computed one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableMismatch {
    pub m: i64,
    pub expected: usize,
    /// `None` when `m` is outside the computed range.
    pub computed: Option<usize>,
}

pub fn compare_pi_table(
    table: &KnotPiTable,
    expected: &BTreeMap<i64, usize>,
) -> Vec<TableMismatch> {
    expected
        .iter()
        .filter_map(|(&m, &dim)| {
            let computed = table.rows.iter().find(|r| r.m == m).map(|r| r.dim);
            (computed != Some(dim)).then_some(TableMismatch {
                m,
                expected: dim,
                computed,
            })
        })
        .collect()
}

/// `E²` of the homology-side spectral sequence built from `H_+(K(•))`.
pub fn homology_side_e2(d: usize, p_max: usize, degree_max: usize) -> Result<SpectralSequencePage> {
    require_d(d)?;
    let v = homology_cosimplicial(d, p_max, degree_max)?;
    let tot = total_complex(&v, p_max)?;
    Ok(pages_of_total(&tot, 2)?.remove(1))
}

/// The weight-one alternating coface sums of `χ•` agree with those of
/// `H_{d-1}(K(•))` under `B_ij ↔ γ_ij`, level by level.
pub fn hurewicz_check(chi: &ChiAlgebra, p_max: usize) -> Result<bool> {
    let d = chi.d();
    let homotopy = chi_cosimplicial(chi, p_max, 1)?;
    let homology = homology_cosimplicial(d, p_max, d - 1)?;
    let q = (d - 1) as i64;
    Ok((0..p_max).all(|p| {
        alternating_coface_sum(&homotopy, p, q) == alternating_coface_sum(&homology, p, q)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cosimplicial::{normalize, unnormalized_e2_dims};

    #[test]
    fn two_point_column() {
        for d in [4usize, 5] {
            let chi = ChiAlgebra::new(d).unwrap();
            let e1 = homotopy_e1(&chi, 4, 2).unwrap();
            for s in 0..2 {
                assert!(e1
                    .page
                    .entries
                    .iter()
                    .filter(|e| e.s == s)
                    .all(|e| e.dim == 0));
            }
            let col2: Vec<(i64, usize)> = e1
                .page
                .entries
                .iter()
                .filter(|e| e.s == 2 && e.dim > 0)
                .map(|e| (e.q, e.dim))
                .collect();
            if d == 5 {
                assert_eq!(col2, [(4, 1), (7, 1)]);
            } else {
                assert_eq!(col2, [(3, 1)]);
            }
            let e2 = e2_page(&e1).unwrap();
            assert_eq!(e2.dim(2, d as i64 - 1), 1);
            assert!(e2.entry(2, d as i64 - 1).unwrap().stable);
        }
    }

    #[test]
    fn normalized_column_two_is_everything() {
        let chi = ChiAlgebra::new(4).unwrap();
        let v = chi_cosimplicial(&chi, 3, 1).unwrap();
        let n2 = normalize(&v, 2).unwrap();
        assert_eq!(n2.dim(3), 1);
        assert_eq!(n2.complex.labels(3), ["B21"]);
        // d⁰ - d¹ + d² - d³ on B21
        assert!(alternating_coface_sum(&v, 2, 3).column(0).is_zero());
    }

    #[test]
    fn support_bound_small() {
        for d in [4, 5] {
            let chi = ChiAlgebra::new(d).unwrap();
            for w in 1..=3 {
                let s = verify_support_bound(&chi, w, 6).unwrap();
                assert!(s.holds && s.holds_2w(), "{s:?}");
                assert_eq!(s.last_nonzero, Some(w + 1));
            }
        }
    }

    #[test]
    fn normalized_matches_unnormalized() {
        for d in [4, 5] {
            let chi = ChiAlgebra::new(d).unwrap();
            let e1 = homotopy_e1(&chi, 4, 3).unwrap();
            let e2 = e2_page(&e1).unwrap();
            let full = unnormalized_e2_dims(&e1.complex).unwrap();
            for s in 0..4 {
                for e in e2.entries.iter().filter(|e| e.s == s) {
                    assert_eq!(
                        e.dim,
                        full.get(&(s, e.q)).copied().unwrap_or(0),
                        "s={s} q={}",
                        e.q
                    );
                }
            }
        }
    }

    #[test]
    fn pi_table_low_rows() {
        for d in [4usize, 5] {
            let chi = ChiAlgebra::new(d).unwrap();
            let m_max = if d == 4 { 3 } else { 4 };
            let t = knot_pi_table(&chi, m_max, Limits::default()).unwrap();
            for row in &t.rows {
                assert!(row.complete);
                if row.m < d as i64 - 3 {
                    assert_eq!(row.dim, 0);
                }
            }
            assert!(t.rows[d - 4].dim >= 1);
        }
    }

    #[test]
    fn external_table_comparison() {
        let chi = ChiAlgebra::new(5).unwrap();
        let t = knot_pi_table(&chi, 4, Limits::default()).unwrap();
        let good = BTreeMap::from([(1, 0), (2, 1), (4, 1)]);
        assert!(compare_pi_table(&t, &good).is_empty());
        let bad = BTreeMap::from([(3, 1), (9, 0)]);
        let mm = compare_pi_table(&t, &bad);
        assert_eq!(mm.len(), 2);
        assert_eq!(mm[0].computed, Some(0));
        assert_eq!(mm[1].computed, None);
    }

    #[test]
    fn resource_guard_trips() {
        let chi = ChiAlgebra::new(4).unwrap();
        let r = knot_pi_table(&chi, 40, Limits::default());
        assert!(matches!(r, Err(Error::ResourceGuard(_))));
        assert!(matches!(
            ChiAlgebra::new(3).map(|c| homotopy_e1(&c, 2, 1)),
            Ok(Err(Error::InvalidParameter(_)))
        ));
    }

    #[test]
    fn homology_side_and_hurewicz() {
        for d in [4usize, 5] {
            let e2 = homology_side_e2(d, 4, 2 * (d - 1)).unwrap();
            assert!(e2.entries.iter().filter(|e| e.s < 2).all(|e| e.dim == 0));
            let v = homology_cosimplicial(d, 4, 2 * (d - 1)).unwrap();
            let n2 = normalize(&v, 2).unwrap();
            assert_eq!(n2.complex.total_dim(), 1);
            assert_eq!(n2.dim((d - 1) as i64), 1);
            let chi = ChiAlgebra::new(d).unwrap();
            assert!(hurewicz_check(&chi, 4).unwrap());
        }
    }
}
