//! The Drinfeld–Kohno Lie algebras `χ(n)`: the free graded Lie algebra on
//! chords `B_ij` (degree `d-2`) modulo the infinitesimal Yang–Baxter
//! relations, together with the cosimplicial structure maps.
//!
//! The relations are homogeneous for the set of points a bracket touches,
//! so `χ(n)` splits into blocks indexed by subsets `S` of points, and the
//! block at `S` is a relabelled copy of the full-support block of
//! `χ(|S|)`. Only full-support blocks are ever eliminated; everything else
//! is relabelling. A full-support block in weight `w` is empty once the
//! point count exceeds `2w`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cache::{Cache, CacheKey};
use crate::chords::{chord_count, chords, cosimplicial_identities, Chord, PointMap};
use crate::error::{Error, Result};
use crate::free_lie::{
    content_basis, contents_of_weight, super_bracket, Assoc, BracketWord, Letter, Word,
};
use crate::linalg::{
    format_rational, parse_rational, rat, sign, Echelon, Insertion, LabeledBasis,
    SparseRationalMatrix, SparseVec,
};

/// A named weight-2 relation.
#[derive(Clone, Debug)]
pub struct Relation {
    pub label: String,
    pub element: Assoc,
}

pub fn chord_name(c: Chord, prefix: &str) -> String {
    if c.i > 9 {
        format!("{prefix}{},{}", c.i, c.j)
    } else {
        c.label(prefix)
    }
}

fn letter_name(l: Letter) -> String {
    chord_name(Chord::from_letter(l), "B")
}

/// Points touched by a word of chord letters, as a bit mask (bit `a-1` for
/// point `a`).
pub fn support_mask(w: &[Letter]) -> u64 {
    w.iter().fold(0u64, |m, &l| {
        let c = Chord::from_letter(l);
        m | (1 << (c.i - 1)) | (1 << (c.j - 1))
    })
}

pub fn mask_points(mask: u64) -> Vec<usize> {
    (0..64)
        .filter(|b| mask >> b & 1 == 1)
        .map(|b| b + 1)
        .collect()
}

/// Relabels chord letters through a point map `a -> points[a-1]`, which
/// must be increasing.
fn relabel_letter(l: Letter, points: &[usize]) -> Letter {
    let c = Chord::from_letter(l);
    Chord::new(points[c.i - 1], points[c.j - 1]).letter()
}

/// Inverse of [`relabel_letter`] for letters supported inside `points`.
fn unrelabel_letter(l: Letter, points: &[usize]) -> Letter {
    let c = Chord::from_letter(l);
    let pos = |p: usize| {
        points
            .iter()
            .position(|&q| q == p)
            .expect("letter inside support")
            + 1
    };
    Chord::new(pos(c.i), pos(c.j)).letter()
}

/// The infinitesimal Yang–Baxter relations of `χ(n)` in dimension `d`.
pub fn yang_baxter_relations(n: usize, d: usize) -> Vec<Relation> {
    let deg = |_: Letter| d as i64 - 2;
    let b = |i: usize, j: usize| Assoc::letter(Chord::new(i, j).letter());
    let mut out = Vec::new();
    let all: Vec<Chord> = chords(n).collect();
    for (x, c1) in all.iter().enumerate() {
        for c2 in &all[x + 1..] {
            if !c1.touches(c2.i) && !c1.touches(c2.j) {
                out.push(Relation {
                    label: format!("[{},{}]", chord_name(*c1, "B"), chord_name(*c2, "B")),
                    element: super_bracket(&b(c1.i, c1.j), &b(c2.i, c2.j), &deg),
                });
            }
        }
    }
    let sd = sign(d as i64);
    for i in 1..=n {
        for t in 1..i {
            for j in 1..t {
                let mut second = b(i, t);
                second.add_scaled(&sd, &b(t, j));
                out.push(Relation {
                    label: format!("[B{i}{j},B{i}{t}+(-1)^d B{t}{j}]"),
                    element: super_bracket(&b(i, j), &second, &deg),
                });
                let mut third = b(i, j);
                third.add_scaled(&rat(1), &b(i, t));
                out.push(Relation {
                    label: format!("[B{t}{j},B{i}{j}+B{i}{t}]"),
                    element: super_bracket(&b(t, j), &third, &deg),
                });
            }
        }
    }
    out
}

type SerAssoc = Vec<(Word, String)>;

fn ser_assoc(a: &Assoc) -> SerAssoc {
    a.terms()
        .map(|(w, c)| (w.clone(), format_rational(c)))
        .collect()
}

fn de_assoc(s: &SerAssoc) -> Result<Assoc> {
    let mut out = Assoc::zero();
    for (w, c) in s {
        out.add_term(w.clone(), parse_rational(c)?);
    }
    Ok(out)
}

/// Serialized form of a full-support block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockData {
    pub k: usize,
    pub d: usize,
    pub weight: usize,
    pub basis_words: Vec<BracketWord>,
    pub basis: Vec<SerAssoc>,
    pub ideal: Vec<SerAssoc>,
}

/// Full-support part of `χ(k)` in one weight: a quotient basis and the
/// independent ideal elements, with the echelon data used for reduction.
#[derive(Debug)]
pub struct SupportBlock {
    pub k: usize,
    pub weight: usize,
    pub basis_words: Vec<BracketWord>,
    pub basis: Vec<Assoc>,
    pub ideal: Vec<Assoc>,
    /// Dimension of the full-support part of the free Lie algebra.
    pub free_dim: usize,
    index: BTreeMap<Word, usize>,
    echelon: Echelon,
}

impl SupportBlock {
    fn empty(k: usize, weight: usize) -> Self {
        SupportBlock {
            k,
            weight,
            basis_words: Vec::new(),
            basis: Vec::new(),
            ideal: Vec::new(),
            free_dim: 0,
            index: BTreeMap::new(),
            echelon: Echelon::new(true),
        }
    }

    fn assemble(
        k: usize,
        weight: usize,
        basis_words: Vec<BracketWord>,
        basis: Vec<Assoc>,
        ideal: Vec<Assoc>,
    ) -> Self {
        let mut index = BTreeMap::new();
        for a in ideal.iter().chain(&basis) {
            for (w, _) in a.terms() {
                let next = index.len();
                index.entry(w.clone()).or_insert(next);
            }
        }
        let mut echelon = Echelon::new(true);
        for a in ideal.iter().chain(&basis) {
            let v = to_vec(a, &index).expect("indexed above");
            let ins = echelon.insert(v);
            assert!(matches!(ins, Insertion::Independent { .. }));
        }
        SupportBlock {
            k,
            weight,
            free_dim: ideal.len() + basis.len(),
            basis_words,
            basis,
            ideal,
            index,
            echelon,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Quotient coordinates of a full-support element given over the
    /// letters of `χ(k)`.
    pub fn reduce(&self, a: &Assoc) -> Result<SparseVec> {
        if a.is_zero() {
            return Ok(SparseVec::new());
        }
        let not_lie = || {
            Error::Invariant(format!(
                "element is not in the free Lie algebra block (k={}, w={})",
                self.k, self.weight
            ))
        };
        let v = to_vec(a, &self.index).ok_or_else(not_lie)?;
        let coords = self.echelon.coordinates(&v).ok_or_else(not_lie)?;
        let shift = self.ideal.len();
        Ok(coords.remap(|i| i.checked_sub(shift)))
    }

    fn to_data(&self, d: usize) -> BlockData {
        BlockData {
            k: self.k,
            d,
            weight: self.weight,
            basis_words: self.basis_words.clone(),
            basis: self.basis.iter().map(ser_assoc).collect(),
            ideal: self.ideal.iter().map(ser_assoc).collect(),
        }
    }

    fn from_data(data: &BlockData) -> Result<Self> {
        let basis = data
            .basis
            .iter()
            .map(de_assoc)
            .collect::<Result<Vec<_>>>()?;
        let ideal = data
            .ideal
            .iter()
            .map(de_assoc)
            .collect::<Result<Vec<_>>>()?;
        if basis.len() != data.basis_words.len() {
            return Err(Error::Parse(
                "block basis and labels differ in length".into(),
            ));
        }
        Ok(Self::assemble(
            data.k,
            data.weight,
            data.basis_words.clone(),
            basis,
            ideal,
        ))
    }
}

fn to_vec(a: &Assoc, index: &BTreeMap<Word, usize>) -> Option<SparseVec> {
    crate::free_lie::assoc_to_vec(a, index)
}

#[derive(Debug)]
struct ComponentPart {
    points: Vec<usize>,
    block: Arc<SupportBlock>,
    offset: usize,
}

/// The weight-`w` component of `χ(n)`, assembled from relabelled blocks.
#[derive(Debug)]
pub struct ChiComponent {
    pub n: usize,
    pub d: usize,
    pub weight: usize,
    parts: Vec<ComponentPart>,
    part_of_mask: BTreeMap<u64, usize>,
    blocks_by_size: BTreeMap<usize, Arc<SupportBlock>>,
    basis: LabeledBasis,
    free_dim: usize,
}

impl ChiComponent {
    pub fn dim(&self) -> usize {
        self.basis.dimension()
    }

    pub fn basis(&self) -> &LabeledBasis {
        &self.basis
    }

    pub fn labels(&self) -> &[String] {
        self.basis.labels()
    }

    /// Internal homological degree `w(d-2)`.
    pub fn degree(&self) -> usize {
        self.weight * (self.d - 2)
    }

    /// Dimension of the weight-`w` part of the free Lie algebra on the chords.
    pub fn free_dim(&self) -> usize {
        self.free_dim
    }

    /// Basis element `idx` as a Lie element over the chords of `χ(n)`.
    pub fn basis_element(&self, idx: usize) -> Assoc {
        let part_idx = self.parts.partition_point(|p| p.offset <= idx) - 1;
        let part = &self.parts[part_idx];
        let local = &part.block.basis[idx - part.offset];
        local.map_words(|w| w.iter().map(|&l| relabel_letter(l, &part.points)).collect())
    }

    pub fn basis_word(&self, idx: usize) -> BracketWord {
        let part_idx = self.parts.partition_point(|p| p.offset <= idx) - 1;
        let part = &self.parts[part_idx];
        part.block.basis_words[idx - part.offset].relabel(&|l| relabel_letter(l, &part.points))
    }

    /// Support (as a bit mask) of basis element `idx`.
    pub fn basis_support(&self, idx: usize) -> u64 {
        let part_idx = self.parts.partition_point(|p| p.offset <= idx) - 1;
        self.parts[part_idx]
            .points
            .iter()
            .fold(0, |m, p| m | 1 << (p - 1))
    }

    /// Coordinates of a weight-`w` Lie element over the chords of `χ(n)`;
    /// exactly the Yang–Baxter ideal is sent to zero.
    pub fn reduce(&self, e: &Assoc) -> Result<SparseVec> {
        let n_letters = chord_count(self.n) as Letter;
        let mut by_mask: BTreeMap<u64, Assoc> = BTreeMap::new();
        for (w, c) in e.terms() {
            if w.len() != self.weight {
                return Err(Error::WeightMismatch {
                    expected: self.weight,
                    got: w.len(),
                });
            }
            if let Some(bad) = w.iter().find(|&&l| l >= n_letters) {
                return Err(Error::IndexOutOfRange(format!(
                    "{} is not a generator of chi({})",
                    letter_name(*bad),
                    self.n
                )));
            }
            by_mask
                .entry(support_mask(w))
                .or_default()
                .add_term(w.clone(), c.clone());
        }
        let mut out = SparseVec::new();
        for (mask, part) in by_mask {
            let points = mask_points(mask);
            let k = points.len();
            let local =
                part.map_words(|w| w.iter().map(|&l| unrelabel_letter(l, &points)).collect());
            let Some(block) = self.blocks_by_size.get(&k) else {
                return Err(Error::Invariant(format!(
                    "support of size {k} cannot occur in weight {}",
                    self.weight
                )));
            };
            let coords = block.reduce(&local)?;
            if let Some(&pi) = self.part_of_mask.get(&mask) {
                let offset = self.parts[pi].offset;
                out = out.add(&coords.remap(|i| Some(i + offset)));
            } else {
                debug_assert!(coords.is_zero());
            }
        }
        Ok(out)
    }
}

/// A cosimplicial structure map of `χ•` in one weight.
#[derive(Clone, Debug)]
pub struct CosimplicialLieMap {
    pub map: PointMap,
    pub weight: usize,
    pub matrix: SparseRationalMatrix,
}

/// Outcome of one cosimplicial identity in one weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityCheck {
    pub name: String,
    pub weight: usize,
    pub holds: bool,
}

/// Context for computing with `χ(n)` in a fixed ambient dimension `d`.
pub struct ChiAlgebra {
    d: usize,
    cache: Option<Cache>,
    blocks: Mutex<HashMap<(usize, usize), Arc<SupportBlock>>>,
    components: Mutex<HashMap<(usize, usize), Arc<ChiComponent>>>,
    maps: Mutex<HashMap<(PointMap, usize), Arc<CosimplicialLieMap>>>,
}

impl ChiAlgebra {
    pub fn new(d: usize) -> Result<Self> {
        Self::with_cache(d, None)
    }

    pub fn with_cache(d: usize, cache: Option<Cache>) -> Result<Self> {
        if d < 3 {
            return Err(Error::InvalidParameter(format!(
                "chord generators need degree d-2 >= 1, got d = {d}"
            )));
        }
        Ok(ChiAlgebra {
            d,
            cache,
            blocks: Mutex::new(HashMap::new()),
            components: Mutex::new(HashMap::new()),
            maps: Mutex::new(HashMap::new()),
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    fn generator_degree(&self) -> i64 {
        self.d as i64 - 2
    }

    pub fn relations(&self, n: usize) -> Vec<Relation> {
        yang_baxter_relations(n, self.d)
    }

    /// Full-support block of `χ(k)` in weight `w`.
    pub fn block(&self, k: usize, weight: usize) -> Result<Arc<SupportBlock>> {
        if weight == 0 {
            return Err(Error::InvalidParameter("weight must be at least 1".into()));
        }
        if let Some(b) = self.blocks.lock().unwrap().get(&(k, weight)) {
            return Ok(b.clone());
        }
        let block = if k < 2 || k > 2 * weight {
            SupportBlock::empty(k, weight)
        } else {
            let key = CacheKey::new("chi-block", k, self.d, weight);
            match &self.cache {
                Some(cache) => {
                    let data = cache.get_or_compute(&key, || {
                        Ok(self.compute_block(k, weight)?.to_data(self.d))
                    })?;
                    SupportBlock::from_data(&data)?
                }
                None => self.compute_block(k, weight)?,
            }
        };
        let block = Arc::new(block);
        self.blocks
            .lock()
            .unwrap()
            .insert((k, weight), block.clone());
        Ok(block)
    }

    fn compute_block(&self, k: usize, weight: usize) -> Result<SupportBlock> {
        let gd = self.generator_degree();
        let deg = move |_: Letter| gd;
        let full: u64 = (1u64 << k) - 1;
        let n_letters = chord_count(k);

        let words: Vec<BracketWord> = contents_of_weight(n_letters, weight)
            .into_iter()
            .filter(|c| support_mask(c) == full)
            .flat_map(|c| content_basis(&c, &deg))
            .collect();
        let expansions: Vec<Assoc> = words.par_iter().map(|w| w.expand(&deg)).collect();
        let mut index = BTreeMap::new();
        for a in &expansions {
            for (w, _) in a.terms() {
                let next = index.len();
                index.entry(w.clone()).or_insert(next);
            }
        }

        let candidates = self.ideal_candidates(k, weight)?;
        let mut echelon = Echelon::new(false);
        let mut ideal = Vec::new();
        for cand in candidates {
            let v = to_vec(&cand, &index).ok_or_else(|| {
                Error::Invariant(format!(
                    "ideal element leaves the free Lie block (k={k}, w={weight})"
                ))
            })?;
            if let Insertion::Independent { .. } = echelon.insert(v) {
                ideal.push(cand);
            }
        }
        let mut basis_words = Vec::new();
        let mut basis = Vec::new();
        for (w, a) in words.into_iter().zip(expansions) {
            let v = to_vec(&a, &index).expect("indexed above");
            if let Insertion::Independent { .. } = echelon.insert(v) {
                basis_words.push(w);
                basis.push(a);
            }
        }
        Ok(SupportBlock::assemble(k, weight, basis_words, basis, ideal))
    }

    /// Spanning set of the full-support part of the ideal in weight `w`.
    fn ideal_candidates(&self, k: usize, weight: usize) -> Result<Vec<Assoc>> {
        let full: u64 = (1u64 << k) - 1;
        if weight < 2 {
            return Ok(Vec::new());
        }
        if weight == 2 {
            return Ok(yang_baxter_relations(k, self.d)
                .into_iter()
                .map(|r| r.element)
                .filter(|e| e.terms().all(|(w, _)| support_mask(w) == full))
                .collect());
        }
        let gd = self.generator_degree();
        let deg = move |_: Letter| gd;
        let mut jobs: Vec<(Vec<usize>, Arc<SupportBlock>, Vec<Letter>)> = Vec::new();
        for mask in 1..=full {
            let size = mask.count_ones() as usize;
            if size < 3 || size + 2 < k {
                continue;
            }
            let sub = self.block(size, weight - 1)?;
            if sub.ideal.is_empty() {
                continue;
            }
            let gens: Vec<Letter> = chords(k)
                .filter(|c| mask | (1 << (c.i - 1)) | (1 << (c.j - 1)) == full)
                .map(Chord::letter)
                .collect();
            jobs.push((mask_points(mask), sub, gens));
        }
        let out: Vec<Vec<Assoc>> = jobs
            .par_iter()
            .map(|(points, sub, gens)| {
                let mut local = Vec::new();
                for y in &sub.ideal {
                    let y = y.map_words(|w| w.iter().map(|&l| relabel_letter(l, points)).collect());
                    for &g in gens {
                        local.push(super_bracket(&Assoc::letter(g), &y, &deg));
                    }
                }
                local
            })
            .collect();
        Ok(out.into_iter().flatten().collect())
    }

    /// The weight-`w` component of `χ(n)`.
    pub fn component(&self, n: usize, weight: usize) -> Result<Arc<ChiComponent>> {
        if weight == 0 {
            return Err(Error::InvalidParameter("weight must be at least 1".into()));
        }
        if let Some(c) = self.components.lock().unwrap().get(&(n, weight)) {
            return Ok(c.clone());
        }
        let max_k = n.min(2 * weight);
        let mut blocks_by_size = BTreeMap::new();
        for k in 2..=max_k {
            blocks_by_size.insert(k, self.block(k, weight)?);
        }
        let mut parts = Vec::new();
        let mut part_of_mask = BTreeMap::new();
        let mut labels = Vec::new();
        let mut offset = 0;
        let mut free_dim = 0;
        let limit: u64 = if n == 0 { 0 } else { (1u64 << n) - 1 };
        for mask in 1..=limit {
            let k = mask.count_ones() as usize;
            let Some(block) = blocks_by_size.get(&k) else {
                continue;
            };
            free_dim += block.free_dim;
            if block.dim() == 0 {
                continue;
            }
            let points = mask_points(mask);
            for w in &block.basis_words {
                let word = w.relabel(&|l| relabel_letter(l, &points));
                labels.push(word.render(&letter_name));
            }
            part_of_mask.insert(mask, parts.len());
            parts.push(ComponentPart {
                points,
                block: block.clone(),
                offset,
            });
            offset += block.dim();
        }
        let comp = Arc::new(ChiComponent {
            n,
            d: self.d,
            weight,
            parts,
            part_of_mask,
            blocks_by_size,
            basis: LabeledBasis::new(labels)?,
            free_dim,
        });
        self.components
            .lock()
            .unwrap()
            .insert((n, weight), comp.clone());
        Ok(comp)
    }

    /// Matrix of a coface or codegeneracy in one weight.
    pub fn structure_map(&self, map: PointMap, weight: usize) -> Result<Arc<CosimplicialLieMap>> {
        if let Some(m) = self.maps.lock().unwrap().get(&(map, weight)) {
            return Ok(m.clone());
        }
        let source = self.component(map.source(), weight)?;
        let target = self.component(map.target(), weight)?;
        let d = self.d;
        let cols = (0..source.dim())
            .into_par_iter()
            .map(|idx| {
                let img = source
                    .basis_element(idx)
                    .substitute_letters(|l| map.chord_image(Chord::from_letter(l), d));
                target.reduce(&img)
            })
            .collect::<Result<Vec<_>>>()?;
        let m = Arc::new(CosimplicialLieMap {
            map,
            weight,
            matrix: SparseRationalMatrix::from_columns(target.dim(), cols),
        });
        self.maps.lock().unwrap().insert((map, weight), m.clone());
        Ok(m)
    }

    pub fn coface_map(&self, i: usize, n: usize, weight: usize) -> Result<Arc<CosimplicialLieMap>> {
        self.structure_map(PointMap::coface(i, n)?, weight)
    }

    pub fn codegeneracy_map(
        &self,
        j: usize,
        n: usize,
        weight: usize,
    ) -> Result<Arc<CosimplicialLieMap>> {
        self.structure_map(PointMap::codegeneracy(j, n)?, weight)
    }

    /// Checks that `map` sends every Yang–Baxter relation of its source into
    /// the ideal of its target.
    pub fn check_ideal_preserved(&self, map: PointMap) -> Result<()> {
        let target = self.component(map.target(), 2)?;
        for rel in self.relations(map.source()) {
            let img = rel
                .element
                .substitute_letters(|l| map.chord_image(Chord::from_letter(l), self.d));
            if !target.reduce(&img)?.is_zero() {
                return Err(Error::Verification(format!(
                    "{} does not preserve the ideal: relation {} survives",
                    map.name(),
                    rel.label
                )));
            }
        }
        Ok(())
    }

    /// Checks all cosimplicial identities among levels `0..=max_level` in
    /// the given weight, as exact matrix equalities.
    pub fn check_cosimplicial_identities(
        &self,
        max_level: usize,
        weight: usize,
    ) -> Result<Vec<IdentityCheck>> {
        let mut out = Vec::new();
        for n in 0..=max_level {
            for id in cosimplicial_identities(n, max_level) {
                let compose = |(a, b): (PointMap, PointMap)| -> Result<SparseRationalMatrix> {
                    Ok(self
                        .structure_map(b, weight)?
                        .matrix
                        .mul(&self.structure_map(a, weight)?.matrix))
                };
                let lhs = compose(id.lhs)?;
                let rhs = match id.rhs {
                    Some(pair) => compose(pair)?,
                    None => SparseRationalMatrix::identity(self.component(n, weight)?.dim()),
                };
                out.push(IdentityCheck {
                    name: id.name.clone(),
                    weight,
                    holds: lhs == rhs,
                });
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(i: usize, j: usize) -> Assoc {
        Assoc::letter(Chord::new(i, j).letter())
    }

    fn br(a: &Assoc, c: &Assoc, d: usize) -> Assoc {
        super_bracket(a, c, &|_| d as i64 - 2)
    }

    #[test]
    fn relations_small_n() {
        assert!(yang_baxter_relations(2, 4).is_empty());
        for d in [4, 5] {
            let rels = yang_baxter_relations(3, d);
            assert_eq!(rels.len(), 2);
            let mut second = b(3, 2);
            second.add_scaled(&sign(d as i64), &b(2, 1));
            assert_eq!(rels[0].element, br(&b(3, 1), &second, d));
            let mut third = b(3, 1);
            third.add_scaled(&rat(1), &b(3, 2));
            assert_eq!(rels[1].element, br(&b(2, 1), &third, d));
        }
        let rels = yang_baxter_relations(4, 4);
        assert!(rels.iter().any(|r| r.element == br(&b(2, 1), &b(4, 3), 4)));
    }

    #[test]
    fn small_components() {
        let chi4 = ChiAlgebra::new(4).unwrap();
        let c = chi4.component(2, 1).unwrap();
        assert_eq!(c.dim(), 1);
        assert_eq!(c.labels(), ["B21"]);
        assert_eq!(chi4.component(3, 2).unwrap().dim(), 1);
        assert_eq!(chi4.component(1, 3).unwrap().dim(), 0);
        assert_eq!(chi4.component(0, 1).unwrap().dim(), 0);
        let chi5 = ChiAlgebra::new(5).unwrap();
        let c = chi5.component(2, 2).unwrap();
        assert_eq!(c.dim(), 1);
        assert_eq!(c.labels(), ["[B21,B21]"]);
    }

    #[test]
    fn reduction_kills_relations() {
        for d in [4, 5] {
            let chi = ChiAlgebra::new(d).unwrap();
            let c = chi.component(4, 2).unwrap();
            for rel in chi.relations(4) {
                assert!(c.reduce(&rel.element).unwrap().is_zero(), "{}", rel.label);
            }
            for idx in 0..c.dim() {
                assert_eq!(
                    c.reduce(&c.basis_element(idx)).unwrap(),
                    SparseVec::unit(idx)
                );
            }
            // the combination that appears in the chain-map check
            let c3 = chi.component(3, 2).unwrap();
            let mut e = br(&b(2, 1), &b(3, 1), d);
            e.add_scaled(&rat(-1), &br(&b(3, 1), &b(3, 2), d));
            assert!(c3.reduce(&e).unwrap().is_zero());
        }
    }

    #[test]
    fn reduce_rejects_wrong_weight() {
        let chi = ChiAlgebra::new(4).unwrap();
        let c = chi.component(3, 2).unwrap();
        assert!(matches!(
            c.reduce(&b(2, 1)),
            Err(Error::WeightMismatch { .. })
        ));
        let c1 = chi.component(2, 1).unwrap();
        assert!(matches!(
            c1.reduce(&b(3, 1)),
            Err(Error::IndexOutOfRange(_))
        ));
    }

    #[test]
    fn coface_and_codegeneracy_examples() {
        let chi = ChiAlgebra::new(4).unwrap();
        let c3 = chi.component(3, 1).unwrap();
        let col = |m: &CosimplicialLieMap| m.matrix.column(0).clone();
        let idx = |lbl: &str| c3.basis().position(lbl).unwrap();
        assert_eq!(
            col(&chi.coface_map(0, 2, 1).unwrap()),
            SparseVec::unit(idx("B32"))
        );
        assert_eq!(
            col(&chi.coface_map(2, 2, 1).unwrap()),
            SparseVec::unit(idx("B21")).add(&SparseVec::unit(idx("B31")))
        );
        assert_eq!(
            col(&chi.coface_map(3, 2, 1).unwrap()),
            SparseVec::unit(idx("B21"))
        );
        assert!(chi.coface_map(4, 2, 1).is_err());

        assert_eq!(chi.codegeneracy_map(0, 2, 1).unwrap().matrix.n_rows(), 0);
        let s0 = chi.codegeneracy_map(0, 3, 1).unwrap();
        let c2 = chi.component(2, 1).unwrap();
        assert_eq!(c2.labels(), ["B21"]);
        assert!(s0.matrix.column(idx("B21")).is_zero());
        assert_eq!(s0.matrix.column(idx("B32")), &SparseVec::unit(0));
        let s2 = chi.codegeneracy_map(2, 3, 1).unwrap();
        assert_eq!(s2.matrix.column(idx("B21")), &SparseVec::unit(0));
        assert!(s2.matrix.column(idx("B31")).is_zero());
    }

    #[test]
    fn cofaces_preserve_ideal() {
        for d in [4, 5] {
            let chi = ChiAlgebra::new(d).unwrap();
            for n in 0..=4 {
                for i in 0..=n + 1 {
                    chi.check_ideal_preserved(PointMap::coface(i, n).unwrap())
                        .unwrap();
                }
                for j in 0..n {
                    chi.check_ideal_preserved(PointMap::codegeneracy(j, n).unwrap())
                        .unwrap();
                }
            }
        }
    }

    #[test]
    fn identities_low_weight() {
        for d in [4, 5] {
            let chi = ChiAlgebra::new(d).unwrap();
            for w in 1..=2 {
                for check in chi.check_cosimplicial_identities(4, w).unwrap() {
                    assert!(check.holds, "d={d} {} w={w}", check.name);
                }
            }
        }
    }

    #[test]
    fn sphere_dimensions() {
        let chi4 = ChiAlgebra::new(4).unwrap();
        let dims4: Vec<usize> = (1..=4)
            .map(|w| chi4.component(2, w).unwrap().dim())
            .collect();
        assert_eq!(dims4, [1, 0, 0, 0]);
        let chi5 = ChiAlgebra::new(5).unwrap();
        let dims5: Vec<usize> = (1..=4)
            .map(|w| chi5.component(2, w).unwrap().dim())
            .collect();
        assert_eq!(dims5, [1, 1, 0, 0]);
    }

    #[test]
    fn cache_roundtrip_block() {
        let dir = tempfile::tempdir().unwrap();
        let cold = ChiAlgebra::with_cache(5, Some(Cache::new(dir.path()).unwrap())).unwrap();
        let a = cold.component(4, 3).unwrap();
        let warm = ChiAlgebra::with_cache(5, Some(Cache::new(dir.path()).unwrap())).unwrap();
        let b = warm.component(4, 3).unwrap();
        assert_eq!(a.labels(), b.labels());
        let plain = ChiAlgebra::new(5).unwrap();
        let c = plain.component(4, 3).unwrap();
        assert_eq!(a.labels(), c.labels());
        let blk_a = cold.block(4, 3).unwrap().to_data(5);
        let blk_b = warm.block(4, 3).unwrap().to_data(5);
        assert_eq!(blk_a, blk_b);
        let _ = format_rational(&rat(1));
    }
}
