//! The Quillen model `L(H_*(K(n)))`: the free graded Lie algebra on the
//! desuspended positive homology with the quadratic differential coming
//! from the reduced diagonal, and the comparison map `φ` onto `χ(n)`.
//!
//! A generator `s⁻¹ξ` with `ξ` of word length `k` has degree `k(d-1)-1` and
//! length `k`. The differential preserves total length `ℓ` and adds one to
//! the bracket length `b`, so each `ℓ` gives a finite complex
//! `C(ℓ,1) -> C(ℓ,2) -> ... -> C(ℓ,ℓ)`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chi::ChiAlgebra;
use crate::chords::{maps_from, PointMap};
use crate::conf::{homology_map, ConfSpace};
use crate::error::{Error, Result};
use crate::free_lie::{content_basis, Assoc, BracketWord, FreeLieAlgebra, GeneratorSpec, Letter};
use crate::linalg::{homology_at, rat_frac, sign, LabeledBasis, SparseRationalMatrix, SparseVec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuillenGenerator {
    /// Word length of the homology class.
    pub length: usize,
    /// Position of the class in the admissible basis of that length.
    pub class: usize,
    pub label: String,
}

#[derive(Debug)]
struct ChainGroup {
    words: Vec<BracketWord>,
    position: BTreeMap<BracketWord, usize>,
}

/// Truncated Quillen model of `H_*(K(n))` with total length at most
/// `max_length`.
#[derive(Debug)]
pub struct QuillenDGL {
    pub n: usize,
    pub d: usize,
    pub max_length: usize,
    space: ConfSpace,
    gens: Vec<QuillenGenerator>,
    letters: Vec<Vec<Letter>>,
    lie: FreeLieAlgebra,
    boundary: Vec<Assoc>,
    chains: BTreeMap<(usize, usize), ChainGroup>,
    differentials: BTreeMap<(usize, usize), SparseRationalMatrix>,
}

impl QuillenDGL {
    pub fn generators(&self) -> &[QuillenGenerator] {
        &self.gens
    }

    pub fn space(&self) -> &ConfSpace {
        &self.space
    }

    pub fn lie(&self) -> &FreeLieAlgebra {
        &self.lie
    }

    /// Letter of `s⁻¹ξ` for the class `class` of word length `length`.
    pub fn letter(&self, length: usize, class: usize) -> Letter {
        self.letters[length][class]
    }

    /// `∂(s⁻¹ξ)` in the tensor algebra.
    pub fn boundary_of_generator(&self, l: Letter) -> &Assoc {
        &self.boundary[l as usize]
    }

    /// Degree of a chain of total length `ℓ` and bracket length `b`.
    pub fn degree(&self, length: usize, brackets: usize) -> i64 {
        (length * (self.d - 1)) as i64 - brackets as i64
    }

    pub fn chain_dim(&self, length: usize, brackets: usize) -> usize {
        self.chains
            .get(&(length, brackets))
            .map_or(0, |c| c.words.len())
    }

    pub fn chain_basis(&self, length: usize, brackets: usize) -> Result<LabeledBasis> {
        let words = self
            .chains
            .get(&(length, brackets))
            .map_or(&[][..], |c| c.words.as_slice());
        LabeledBasis::new(words.iter().map(|w| self.lie.render(w)).collect())
    }

    /// `∂ : C(ℓ,b) -> C(ℓ,b+1)`.
    pub fn differential(&self, length: usize, brackets: usize) -> SparseRationalMatrix {
        self.differentials
            .get(&(length, brackets))
            .cloned()
            .unwrap_or_else(|| {
                SparseRationalMatrix::zeros(
                    self.chain_dim(length, brackets + 1),
                    self.chain_dim(length, brackets),
                )
            })
    }

    fn coordinates(&self, length: usize, brackets: usize, a: &Assoc) -> Result<SparseVec> {
        if a.is_zero() {
            return Ok(SparseVec::new());
        }
        let group = self.chains.get(&(length, brackets)).ok_or_else(|| {
            Error::Invariant(format!(
                "no chains in length {length}, bracket length {brackets}"
            ))
        })?;
        let e = self.lie.lie_coordinates(a)?;
        let mut pairs = Vec::new();
        for (w, c) in e.terms() {
            let pos = group.position.get(w).ok_or_else(|| {
                Error::Invariant(format!(
                    "{} is outside C({length},{brackets})",
                    self.lie.render(w)
                ))
            })?;
            pairs.push((*pos, c.clone()));
        }
        Ok(SparseVec::from_pairs(pairs))
    }

    fn basis_expansion(&self, length: usize, brackets: usize, idx: usize) -> Assoc {
        self.lie
            .expand(&self.chains[&(length, brackets)].words[idx])
    }
}

/// Builds the Quillen model and checks `∂² = 0` in every bidegree.
pub fn build_quillen_dgl(n: usize, d: usize, max_length: usize) -> Result<QuillenDGL> {
    if max_length == 0 {
        return Err(Error::InvalidParameter(
            "length cap must be at least 1".into(),
        ));
    }
    let space = ConfSpace::new(n, d)?;
    let e = d - 1;
    let top = space.top_length().min(max_length);
    let mut gens = Vec::new();
    let mut specs = Vec::new();
    let mut letters = vec![Vec::new(); top + 1];
    for k in 1..=top {
        for (class, label) in space.homology_labels(k).into_iter().enumerate() {
            let label = format!("s⁻¹{label}");
            letters[k].push(gens.len() as Letter);
            specs.push(GeneratorSpec {
                id: gens.len(),
                name: label.clone(),
                degree: (k * e) as i64 - 1,
            });
            gens.push(QuillenGenerator {
                length: k,
                class,
                label,
            });
        }
    }
    let lie = FreeLieAlgebra::new(specs)?;
    let deg = |l: Letter| lie.degree_of(l);

    // ∂(s⁻¹c) = ½ Σ (-1)^{|a|} [s⁻¹a, s⁻¹b] over Δ̄c = Σ a ⊗ b
    let half = rat_frac(1, 2);
    let mut boundary = Vec::with_capacity(gens.len());
    for g in &gens {
        let mut img = Assoc::zero();
        for (l, a, b, c) in space.reduced_diagonal(g.length, g.class)? {
            let x = Assoc::letter(letters[l][a]);
            let y = Assoc::letter(letters[g.length - l][b]);
            let coeff = &half * sign((l * e) as i64) * c;
            img.add_scaled(&coeff, &crate::free_lie::super_bracket(&x, &y, &deg));
        }
        boundary.push(img);
    }

    let mut chains = BTreeMap::new();
    for length in 1..=max_length {
        for brackets in 1..=length {
            let words: Vec<BracketWord> = contents_with_length(&gens, brackets, length)
                .iter()
                .flat_map(|c| content_basis(c, &deg))
                .collect();
            let position = words
                .iter()
                .cloned()
                .enumerate()
                .map(|(i, w)| (w, i))
                .collect();
            chains.insert((length, brackets), ChainGroup { words, position });
        }
    }
    let mut q = QuillenDGL {
        n,
        d,
        max_length,
        space,
        gens,
        letters,
        lie,
        boundary,
        chains,
        differentials: BTreeMap::new(),
    };

    let mut differentials = BTreeMap::new();
    for length in 1..=max_length {
        for brackets in 1..length {
            let cols = (0..q.chain_dim(length, brackets))
                .into_par_iter()
                .map(|idx| {
                    let x = q.basis_expansion(length, brackets, idx);
                    let dx = x.apply_derivation(
                        -1,
                        |l| q.lie.degree_of(l),
                        |l| q.boundary[l as usize].clone(),
                    );
                    q.coordinates(length, brackets + 1, &dx)
                })
                .collect::<Result<Vec<_>>>()?;
            differentials.insert(
                (length, brackets),
                SparseRationalMatrix::from_columns(q.chain_dim(length, brackets + 1), cols),
            );
        }
    }
    q.differentials = differentials;

    for length in 1..=max_length {
        for brackets in 1..length.saturating_sub(1) {
            let dd = q
                .differential(length, brackets + 1)
                .mul(&q.differential(length, brackets));
            if !dd.is_zero() {
                return Err(Error::Verification(format!(
                    "∂² ≠ 0 on C({length},{brackets}) for n={n}, d={d}"
                )));
            }
        }
    }
    Ok(q)
}

/// Sorted letter multisets of size `brackets` whose lengths sum to `length`.
fn contents_with_length(
    gens: &[QuillenGenerator],
    brackets: usize,
    length: usize,
) -> Vec<Vec<Letter>> {
    fn rec(
        gens: &[QuillenGenerator],
        start: usize,
        left: usize,
        budget: usize,
        cur: &mut Vec<Letter>,
        out: &mut Vec<Vec<Letter>>,
    ) {
        if left == 0 {
            if budget == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for (l, g) in gens.iter().enumerate().skip(start) {
            // every remaining letter needs length at least 1
            if g.length + (left - 1) > budget {
                continue;
            }
            cur.push(l as Letter);
            rec(gens, l, left - 1, budget - g.length, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(gens, 0, brackets, length, &mut Vec::new(), &mut out);
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyEntry {
    pub length: usize,
    pub brackets: usize,
    pub degree: i64,
    pub dim: usize,
}

/// Homology of the Quillen model in every bidegree within the cap.
pub fn quillen_homology(q: &QuillenDGL) -> Result<Vec<HomologyEntry>> {
    let mut out = Vec::new();
    for length in 1..=q.max_length {
        for brackets in 1..=length {
            let incoming = if brackets > 1 {
                q.differential(length, brackets - 1)
            } else {
                SparseRationalMatrix::zeros(q.chain_dim(length, 1), 0)
            };
            let outgoing = if brackets < length {
                q.differential(length, brackets)
            } else {
                SparseRationalMatrix::zeros(0, q.chain_dim(length, brackets))
            };
            let (dim, _) = homology_at(&incoming, &outgoing)?;
            out.push(HomologyEntry {
                length,
                brackets,
                degree: q.degree(length, brackets),
                dim,
            });
        }
    }
    Ok(out)
}

/// `φ` on the chains `C(ℓ,ℓ)`, as matrices into `χ(n)` of weight `ℓ`. On
/// every other bidegree `φ` vanishes, since it kills all generators of
/// length above one.
#[derive(Clone, Debug)]
pub struct PhiMap {
    pub n: usize,
    pub d: usize,
    pub matrices: BTreeMap<usize, SparseRationalMatrix>,
}

pub fn phi_map(q: &QuillenDGL, chi: &ChiAlgebra) -> Result<PhiMap> {
    if chi.d() != q.d {
        return Err(Error::InvalidParameter(
            "φ needs matching dimensions".into(),
        ));
    }
    let n_chords = q.letters.get(1).map_or(0, Vec::len);
    let mut matrices = BTreeMap::new();
    for length in 1..=q.max_length {
        let target = chi.component(q.n, length)?;
        let cols = (0..q.chain_dim(length, length))
            .into_par_iter()
            .map(|idx| {
                let x = q.basis_expansion(length, length, idx);
                // length-one letters come first and follow the chord order
                let img = x.substitute_letters(|l| {
                    if (l as usize) < n_chords {
                        vec![(l, crate::linalg::rat(1))]
                    } else {
                        Vec::new()
                    }
                });
                target.reduce(&img)
            })
            .collect::<Result<Vec<_>>>()?;
        matrices.insert(
            length,
            SparseRationalMatrix::from_columns(target.dim(), cols),
        );
    }
    let phi = PhiMap {
        n: q.n,
        d: q.d,
        matrices,
    };
    for length in 2..=q.max_length {
        let composite = phi.matrices[&length].mul(&q.differential(length, length - 1));
        let offending = composite.entries().next().map(|((_, c), _)| c);
        if let Some(c) = offending {
            let basis = q.chain_basis(length, length - 1)?;
            let label = &basis.labels()[c];
            return Err(Error::Verification(format!(
                "φ∘∂ ≠ 0 on {label} (n={}, d={})",
                q.n, q.d
            )));
        }
    }
    Ok(phi)
}

/// The Lie map induced on Quillen models by a structure map, in bidegree
/// `(ℓ, b)`.
pub fn quillen_structure_map(
    src: &QuillenDGL,
    tgt: &QuillenDGL,
    map: PointMap,
    length: usize,
    brackets: usize,
) -> Result<SparseRationalMatrix> {
    let mut images: Vec<Vec<(Letter, crate::linalg::Rational)>> = vec![Vec::new(); src.gens.len()];
    for k in 1..src.letters.len() {
        let m = homology_map(map, k, src.d)?;
        for (col, letter) in src.letters[k].iter().enumerate() {
            images[*letter as usize] = m
                .column(col)
                .iter()
                .map(|(row, c)| (tgt.letters[k][row], c.clone()))
                .collect();
        }
    }
    let cols = (0..src.chain_dim(length, brackets))
        .into_par_iter()
        .map(|idx| {
            let x = src.basis_expansion(length, brackets, idx);
            tgt.coordinates(
                length,
                brackets,
                &x.substitute_letters(|l| images[l as usize].clone()),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SparseRationalMatrix::from_columns(
        tgt.chain_dim(length, brackets),
        cols,
    ))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiIsoEntry {
    pub length: usize,
    pub brackets: usize,
    pub degree: i64,
    pub homology_dim: usize,
    pub chi_dim: usize,
    pub phi_rank: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NaturalityCheck {
    pub map: String,
    pub length: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiIsoReport {
    pub n: usize,
    pub d: usize,
    pub max_length: usize,
    pub chain_map: bool,
    pub entries: Vec<QuasiIsoEntry>,
    pub naturality: Vec<NaturalityCheck>,
}

impl QuasiIsoReport {
    pub fn passed(&self) -> bool {
        self.chain_map
            && self.entries.iter().all(|e| e.pass)
            && self.naturality.iter().all(|c| c.pass)
    }
}

/// Checks that `φⁿ` is a chain map inducing an isomorphism in every
/// bidegree up to `max_length`, and that it commutes with every structure
/// map out of level `n`.
pub fn verify_quasi_iso(chi: &ChiAlgebra, n: usize, max_length: usize) -> Result<QuasiIsoReport> {
    let d = chi.d();
    let q = build_quillen_dgl(n, d, max_length)?;
    let (phi, chain_map) = match phi_map(&q, chi) {
        Ok(p) => (Some(p), true),
        Err(Error::Verification(_)) => (None, false),
        Err(e) => return Err(e),
    };
    let mut entries = Vec::new();
    for h in quillen_homology(&q)? {
        let chi_dim = if h.brackets == h.length {
            chi.component(n, h.length)?.dim()
        } else {
            0
        };
        let phi_rank = match (&phi, h.brackets == h.length) {
            (Some(p), true) => p.matrices[&h.length].rank(),
            _ => 0,
        };
        entries.push(QuasiIsoEntry {
            length: h.length,
            brackets: h.brackets,
            degree: h.degree,
            homology_dim: h.dim,
            chi_dim,
            phi_rank,
            pass: chain_map && h.dim == chi_dim && phi_rank == chi_dim,
        });
    }

    let mut naturality = Vec::new();
    if let Some(phi) = &phi {
        let mut targets: BTreeMap<usize, (QuillenDGL, PhiMap)> = BTreeMap::new();
        for map in maps_from(n) {
            let t = map.target();
            if let std::collections::btree_map::Entry::Vacant(e) = targets.entry(t) {
                let tq = build_quillen_dgl(t, d, max_length)?;
                let tphi = phi_map(&tq, chi)?;
                e.insert((tq, tphi));
            }
            let (tq, tphi) = &targets[&t];
            for length in 1..=max_length {
                let f = quillen_structure_map(&q, tq, map, length, length)?;
                let g = chi.structure_map(map, length)?;
                let mut pass =
                    tphi.matrices[&length].mul(&f) == g.matrix.mul(&phi.matrices[&length]);
                // the induced map must also be a chain map
                for b in 1..length {
                    let fb = quillen_structure_map(&q, tq, map, length, b)?;
                    let fb1 = quillen_structure_map(&q, tq, map, length, b + 1)?;
                    pass &=
                        tq.differential(length, b).mul(&fb) == fb1.mul(&q.differential(length, b));
                }
                naturality.push(NaturalityCheck {
                    map: map.name(),
                    length,
                    pass,
                });
            }
        }
    }
    Ok(QuasiIsoReport {
        n,
        d,
        max_length,
        chain_map,
        entries,
        naturality,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chords::Chord;
    use crate::free_lie::super_bracket;
    use crate::linalg::rat;

    #[test]
    fn boundary_of_xi_21_31() {
        for d in [4, 5] {
            let q = build_quillen_dgl(3, d, 2).unwrap();
            let deg = |l: Letter| q.lie().degree_of(l);
            let g = |i, j| Assoc::letter(q.letter(1, Chord::new(i, j).index()));
            let mut expect = super_bracket(&g(2, 1), &g(3, 1), &deg);
            expect.add_scaled(&rat(-1), &super_bracket(&g(3, 1), &g(3, 2), &deg));
            assert_eq!(q.boundary_of_generator(q.letter(2, 0)), &expect);
            for c in 0..3 {
                assert!(q.boundary_of_generator(q.letter(1, c)).is_zero());
            }
        }
    }

    #[test]
    fn two_points_has_zero_differential() {
        for d in [4, 5] {
            let q = build_quillen_dgl(2, d, 3).unwrap();
            assert_eq!(q.generators().len(), 1);
            for l in 1..=3 {
                for b in 1..l {
                    assert!(q.differential(l, b).is_zero());
                }
            }
        }
    }

    #[test]
    fn homology_of_three_points() {
        let chi = ChiAlgebra::new(4).unwrap();
        let q = build_quillen_dgl(3, 4, 2).unwrap();
        let h = quillen_homology(&q).unwrap();
        let at = |l, b| {
            h.iter()
                .find(|e| e.length == l && e.brackets == b)
                .unwrap()
                .dim
        };
        assert_eq!(at(1, 1), 3);
        assert_eq!(at(2, 1), 0);
        assert_eq!(at(2, 2), chi.component(3, 2).unwrap().dim());
    }

    #[test]
    fn small_quasi_isos() {
        for d in [4, 5] {
            let chi = ChiAlgebra::new(d).unwrap();
            for n in 0..=3 {
                let r = verify_quasi_iso(&chi, n, 2).unwrap();
                assert!(r.passed(), "{r:?}");
            }
        }
    }

    #[test]
    fn phi_of_higher_generators_vanishes() {
        let chi = ChiAlgebra::new(5).unwrap();
        let q = build_quillen_dgl(3, 5, 2).unwrap();
        let phi = phi_map(&q, &chi).unwrap();
        // C(2,1) is spanned by the two ξ generators, which φ kills; on C(2,2)
        // the image of ∂ must vanish.
        assert_eq!(q.chain_dim(2, 1), 2);
        assert!(phi.matrices[&2].mul(&q.differential(2, 1)).is_zero());
    }
}
