//! Free graded Lie algebras over the rationals.
//!
//! Elements are computed with through their image in the free associative
//! algebra, where the graded bracket is `[u, v] = uv - (-1)^{|u||v|} vu`.
//! That embedding is injective over a field of characteristic zero, so
//! linear algebra on associative words decides every identity between Lie
//! elements.
//!
//! The canonical basis is the super-Lyndon basis: standard bracketings of
//! Lyndon words, together with the squares `[[u],[u]]` of odd-degree Lyndon
//! words. For even-degree generators this is the classical Lyndon basis.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{format_rational, sign, Echelon, Insertion, LabeledBasis, Rational, SparseVec};

pub type Letter = u32;
pub type Word = Vec<Letter>;

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct GeneratorSpec {
    pub id: usize,
    pub name: String,
    pub degree: i64,
}

/// Element of the free associative algebra on the letters.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Assoc {
    terms: BTreeMap<Word, Rational>,
}

impl Assoc {
    pub fn zero() -> Self {
        Assoc::default()
    }

    pub fn letter(l: Letter) -> Self {
        Self::word(vec![l], Rational::one())
    }

    pub fn word(w: Word, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(w, c);
        }
        Assoc { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Word, Rational)>>(terms: I) -> Self {
        let mut out = Assoc::zero();
        for (w, c) in terms {
            out.add_term(w, c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Rational)> + '_ {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, w: &[Letter]) -> Rational {
        self.terms.get(w).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, w: Word, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: &Rational, other: &Assoc) {
        if c.is_zero() {
            return;
        }
        for (w, v) in &other.terms {
            self.add_term(w.clone(), c * v);
        }
    }

    pub fn scaled(&self, c: &Rational) -> Assoc {
        let mut out = Assoc::zero();
        out.add_scaled(c, self);
        out
    }

    /// Concatenation product.
    pub fn mul(&self, other: &Assoc) -> Assoc {
        let mut out = Assoc::zero();
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                let mut w = u.clone();
                w.extend_from_slice(v);
                out.add_term(w, a * b);
            }
        }
        out
    }

    /// Applies the algebra morphism sending each letter to a linear
    /// combination of letters.
    pub fn substitute_letters(&self, image: impl Fn(Letter) -> Vec<(Letter, Rational)>) -> Assoc {
        let mut cache: HashMap<Letter, Vec<(Letter, Rational)>> = HashMap::new();
        let mut out = Assoc::zero();
        for (w, c) in &self.terms {
            let mut partial: Vec<(Word, Rational)> = vec![(Vec::with_capacity(w.len()), c.clone())];
            for l in w {
                let img = cache.entry(*l).or_insert_with(|| image(*l));
                if img.is_empty() {
                    partial.clear();
                    break;
                }
                let mut next = Vec::with_capacity(partial.len() * img.len());
                for (pw, pc) in &partial {
                    for (il, ic) in img.iter() {
                        let mut nw = pw.clone();
                        nw.push(*il);
                        next.push((nw, pc * ic));
                    }
                }
                partial = next;
            }
            for (nw, nc) in partial {
                out.add_term(nw, nc);
            }
        }
        out
    }

    /// Applies the degree `shift` derivation determined by `image` on letters,
    /// with Koszul signs `(-1)^{shift * |prefix|}`.
    pub fn apply_derivation(
        &self,
        shift: i64,
        degree: impl Fn(Letter) -> i64,
        image: impl Fn(Letter) -> Assoc,
    ) -> Assoc {
        let mut out = Assoc::zero();
        for (w, c) in &self.terms {
            let mut prefix_degree = 0i64;
            for (pos, l) in w.iter().enumerate() {
                let img = image(*l);
                if !img.is_zero() {
                    let s = sign(shift * prefix_degree) * c;
                    for (iw, ic) in img.terms() {
                        let mut nw = Vec::with_capacity(w.len() + iw.len());
                        nw.extend_from_slice(&w[..pos]);
                        nw.extend_from_slice(iw);
                        nw.extend_from_slice(&w[pos + 1..]);
                        out.add_term(nw, &s * ic);
                    }
                }
                prefix_degree += degree(*l);
            }
        }
        out
    }

    pub fn map_words(&self, f: impl Fn(&[Letter]) -> Word) -> Assoc {
        Assoc::from_terms(self.terms.iter().map(|(w, c)| (f(w), c.clone())))
    }
}

/// Graded commutator in the free associative algebra.
pub fn super_bracket(a: &Assoc, b: &Assoc, degree: &impl Fn(Letter) -> i64) -> Assoc {
    let mut out = Assoc::zero();
    let word_degree = |w: &[Letter]| w.iter().map(|l| degree(*l)).sum::<i64>();
    for (u, x) in a.terms() {
        let du = word_degree(u);
        for (v, y) in b.terms() {
            let dv = word_degree(v);
            let c = x * y;
            let mut uv = u.clone();
            uv.extend_from_slice(v);
            out.add_term(uv, c.clone());
            let mut vu = v.clone();
            vu.extend_from_slice(u);
            out.add_term(vu, -(sign(du * dv) * c));
        }
    }
    out
}

/// Binary bracket tree whose leaves are generator ids.
#[derive(
    Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize,
)]
pub enum BracketWord {
    Leaf(Letter),
    Node(Box<BracketWord>, Box<BracketWord>),
}

impl BracketWord {
    pub fn leaf(l: Letter) -> Self {
        BracketWord::Leaf(l)
    }

    pub fn node(a: BracketWord, b: BracketWord) -> Self {
        BracketWord::Node(Box::new(a), Box::new(b))
    }

    pub fn weight(&self) -> usize {
        match self {
            BracketWord::Leaf(_) => 1,
            BracketWord::Node(a, b) => a.weight() + b.weight(),
        }
    }

    pub fn leaves(&self) -> Word {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Word) {
        match self {
            BracketWord::Leaf(l) => out.push(*l),
            BracketWord::Node(a, b) => {
                a.collect_leaves(out);
                b.collect_leaves(out);
            }
        }
    }

    /// Sorted multiset of leaves.
    pub fn content(&self) -> Word {
        let mut c = self.leaves();
        c.sort_unstable();
        c
    }

    pub fn degree(&self, degree: &impl Fn(Letter) -> i64) -> i64 {
        self.leaves().iter().map(|l| degree(*l)).sum()
    }

    pub fn relabel(&self, f: &impl Fn(Letter) -> Letter) -> BracketWord {
        match self {
            BracketWord::Leaf(l) => BracketWord::Leaf(f(*l)),
            BracketWord::Node(a, b) => BracketWord::node(a.relabel(f), b.relabel(f)),
        }
    }

    /// Expansion in the free associative algebra.
    pub fn expand(&self, degree: &impl Fn(Letter) -> i64) -> Assoc {
        match self {
            BracketWord::Leaf(l) => Assoc::letter(*l),
            BracketWord::Node(a, b) => super_bracket(&a.expand(degree), &b.expand(degree), degree),
        }
    }

    pub fn render(&self, name: &impl Fn(Letter) -> String) -> String {
        match self {
            BracketWord::Leaf(l) => name(*l),
            BracketWord::Node(a, b) => format!("[{},{}]", a.render(name), b.render(name)),
        }
    }
}

/// Strict Lyndon test: `w` is smaller than each of its proper rotations.
pub fn is_lyndon(w: &[Letter]) -> bool {
    if w.is_empty() {
        return false;
    }
    let n = w.len();
    (1..n).all(|i| {
        let rotated = w[i..].iter().chain(&w[..i]);
        w.iter().lt(rotated)
    })
}

/// Standard bracketing: `[std(u), std(v)]` with `v` the longest proper
/// Lyndon suffix.
pub fn standard_bracketing(w: &[Letter]) -> BracketWord {
    if w.len() == 1 {
        return BracketWord::Leaf(w[0]);
    }
    let split = (1..w.len())
        .find(|&i| is_lyndon(&w[i..]))
        .expect("a single letter is always a Lyndon suffix");
    BracketWord::node(
        standard_bracketing(&w[..split]),
        standard_bracketing(&w[split..]),
    )
}

/// All distinct permutations of a multiset, in lexicographic order.
pub fn multiset_permutations(content: &[Letter]) -> Vec<Word> {
    let mut cur: Word = content.to_vec();
    cur.sort_unstable();
    let mut out = vec![cur.clone()];
    loop {
        // next_permutation
        let n = cur.len();
        if n < 2 {
            break;
        }
        let mut i = n - 1;
        while i > 0 && cur[i - 1] >= cur[i] {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        let mut j = n - 1;
        while cur[j] <= cur[i - 1] {
            j -= 1;
        }
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
    out
}

/// Non-decreasing sequences of length `weight` over `0..n_letters`.
pub fn contents_of_weight(n_letters: usize, weight: usize) -> Vec<Word> {
    fn rec(start: Letter, n: Letter, left: usize, cur: &mut Word, out: &mut Vec<Word>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for l in start..n {
            cur.push(l);
            rec(l, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if weight == 0 {
        return out;
    }
    rec(0, n_letters as Letter, weight, &mut Vec::new(), &mut out);
    out
}

/// Super-Lyndon basis words of a given content (sorted multiset of letters).
pub fn content_basis(content: &[Letter], degree: &impl Fn(Letter) -> i64) -> Vec<BracketWord> {
    let mut out: Vec<BracketWord> = multiset_permutations(content)
        .into_iter()
        .filter(|w| is_lyndon(w))
        .map(|w| standard_bracketing(&w))
        .collect();
    // squares of odd Lyndon elements
    if !content.is_empty() && content.len().is_multiple_of(2) {
        let mut half = Vec::with_capacity(content.len() / 2);
        let mut ok = true;
        let mut i = 0;
        while i < content.len() {
            let l = content[i];
            let run = content[i..].iter().take_while(|&&x| x == l).count();
            if run % 2 != 0 {
                ok = false;
                break;
            }
            half.extend(std::iter::repeat_n(l, run / 2));
            i += run;
        }
        let half_degree: i64 = half.iter().map(|l| degree(*l)).sum();
        if ok && half_degree.rem_euclid(2) == 1 {
            for u in multiset_permutations(&half)
                .into_iter()
                .filter(|w| is_lyndon(w))
            {
                let b = standard_bracketing(&u);
                out.push(BracketWord::node(b.clone(), b));
            }
        }
    }
    out
}

/// Linear combination of canonical basis words, homogeneous of one weight.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LieElement {
    terms: BTreeMap<BracketWord, Rational>,
    weight: usize,
}

impl LieElement {
    pub fn zero(weight: usize) -> Self {
        LieElement {
            terms: BTreeMap::new(),
            weight,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BracketWord, &Rational)> + '_ {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &BracketWord) -> Rational {
        self.terms.get(w).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_scaled(&mut self, c: &Rational, other: &LieElement) {
        if other.is_zero() {
            return;
        }
        assert!(
            self.is_zero() || self.weight == other.weight,
            "adding Lie elements of different weights"
        );
        if self.is_zero() {
            self.weight = other.weight;
        }
        for (w, v) in &other.terms {
            let e = self.terms.entry(w.clone()).or_insert_with(Rational::zero);
            *e += c * v;
            if e.is_zero() {
                self.terms.remove(w);
            }
        }
    }

    pub fn scaled(&self, c: &Rational) -> LieElement {
        let mut out = LieElement::zero(self.weight);
        out.add_scaled(c, self);
        out
    }
}

struct ContentTable {
    words: Vec<BracketWord>,
    index: BTreeMap<Word, usize>,
    echelon: Echelon,
}

/// Free graded Lie algebra on a fixed list of generators.
pub struct FreeLieAlgebra {
    gens: Vec<GeneratorSpec>,
    tables: Mutex<HashMap<Word, Arc<ContentTable>>>,
}

impl fmt::Debug for FreeLieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FreeLieAlgebra")
            .field("gens", &self.gens)
            .finish()
    }
}

impl FreeLieAlgebra {
    pub fn new(gens: Vec<GeneratorSpec>) -> Result<Self> {
        for (i, g) in gens.iter().enumerate() {
            if g.id != i {
                return Err(Error::InvalidParameter(format!(
                    "generator ids must be dense, found {} at position {i}",
                    g.id
                )));
            }
            if g.degree < 1 {
                return Err(Error::InvalidParameter(format!(
                    "generator {} has degree {} < 1",
                    g.name, g.degree
                )));
            }
        }
        Ok(FreeLieAlgebra {
            gens,
            tables: Mutex::new(HashMap::new()),
        })
    }

    /// Generators named `x0, x1, ...` with the given degrees.
    pub fn with_degrees(degrees: &[i64]) -> Result<Self> {
        Self::new(
            degrees
                .iter()
                .enumerate()
                .map(|(id, &degree)| GeneratorSpec {
                    id,
                    name: format!("x{id}"),
                    degree,
                })
                .collect(),
        )
    }

    pub fn generators(&self) -> &[GeneratorSpec] {
        &self.gens
    }

    pub fn degree_of(&self, l: Letter) -> i64 {
        self.gens[l as usize].degree
    }

    fn degree_fn(&self) -> impl Fn(Letter) -> i64 + '_ {
        move |l| self.gens[l as usize].degree
    }

    pub fn render(&self, w: &BracketWord) -> String {
        w.render(&|l| self.gens[l as usize].name.clone())
    }

    pub fn expand(&self, w: &BracketWord) -> Assoc {
        w.expand(&self.degree_fn())
    }

    pub fn expand_element(&self, e: &LieElement) -> Assoc {
        let mut out = Assoc::zero();
        for (w, c) in e.terms() {
            out.add_scaled(c, &self.expand(w));
        }
        out
    }

    /// Canonical basis of the weight-`weight` component, ordered by content
    /// and then by Lyndon word.
    pub fn lie_basis(&self, weight: usize) -> (Vec<BracketWord>, LabeledBasis) {
        let deg = self.degree_fn();
        let words: Vec<BracketWord> = contents_of_weight(self.gens.len(), weight)
            .iter()
            .flat_map(|c| content_basis(c, &deg))
            .collect();
        let labels = words.iter().map(|w| self.render(w)).collect();
        let basis = LabeledBasis::new(labels).expect("basis words render distinctly");
        (words, basis)
    }

    pub fn dimension(&self, weight: usize) -> usize {
        let deg = self.degree_fn();
        contents_of_weight(self.gens.len(), weight)
            .iter()
            .map(|c| content_basis(c, &deg).len())
            .sum()
    }

    fn table(&self, content: &[Letter]) -> Arc<ContentTable> {
        if let Some(t) = self.tables.lock().unwrap().get(content) {
            return t.clone();
        }
        let deg = self.degree_fn();
        let words = content_basis(content, &deg);
        let index: BTreeMap<Word, usize> = multiset_permutations(content)
            .into_iter()
            .enumerate()
            .map(|(i, w)| (w, i))
            .collect();
        let mut echelon = Echelon::new(true);
        for w in &words {
            let v = assoc_to_vec(&self.expand(w), &index).expect("expansion stays in content");
            let ins = echelon.insert(v);
            assert!(
                matches!(ins, Insertion::Independent { .. }),
                "super-Lyndon basis is dependent at content {content:?}"
            );
        }
        let t = Arc::new(ContentTable {
            words,
            index,
            echelon,
        });
        self.tables
            .lock()
            .unwrap()
            .insert(content.to_vec(), t.clone());
        t
    }

    /// Coordinates of a Lie element, given through its associative expansion,
    /// in the canonical basis. Fails if `a` is not a Lie element or mixes
    /// weights.
    pub fn lie_coordinates(&self, a: &Assoc) -> Result<LieElement> {
        let mut by_content: BTreeMap<Word, Assoc> = BTreeMap::new();
        let mut weight = None;
        for (w, c) in a.terms() {
            match weight {
                None => weight = Some(w.len()),
                Some(k) if k != w.len() => {
                    return Err(Error::WeightMismatch {
                        expected: k,
                        got: w.len(),
                    })
                }
                _ => {}
            }
            let mut content = w.clone();
            content.sort_unstable();
            by_content
                .entry(content)
                .or_default()
                .add_term(w.clone(), c.clone());
        }
        let mut out = LieElement::zero(weight.unwrap_or(0));
        for (content, part) in by_content {
            let table = self.table(&content);
            let v = assoc_to_vec(&part, &table.index).expect("words match their content");
            let coords = table.echelon.coordinates(&v).ok_or_else(|| {
                Error::Invariant(format!(
                    "element is not a Lie element (content {content:?})"
                ))
            })?;
            for (i, c) in coords.iter() {
                out.terms.insert(table.words[i].clone(), c.clone());
            }
        }
        Ok(out)
    }

    /// Expands `coeff * w` in the canonical basis.
    pub fn normal_form(&self, w: &BracketWord, coeff: &Rational) -> LieElement {
        let mut out = self
            .lie_coordinates(&self.expand(w))
            .expect("bracket words are Lie elements");
        out.weight = w.weight();
        out.scaled(coeff)
    }

    pub fn generator(&self, l: Letter) -> LieElement {
        self.normal_form(&BracketWord::Leaf(l), &Rational::one())
    }

    pub fn bracket(&self, a: &LieElement, b: &LieElement) -> LieElement {
        let deg = self.degree_fn();
        let prod = super_bracket(&self.expand_element(a), &self.expand_element(b), &deg);
        let mut out = self
            .lie_coordinates(&prod)
            .expect("brackets of Lie elements are Lie elements");
        out.weight = a.weight + b.weight;
        out
    }

    pub fn render_element(&self, e: &LieElement) -> String {
        if e.is_zero() {
            return "0".into();
        }
        e.terms()
            .map(|(w, c)| format!("{}*{}", format_rational(c), self.render(w)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Coordinates of an associative element against a word index; `None` if a
/// word is missing from the index.
pub fn assoc_to_vec(a: &Assoc, index: &BTreeMap<Word, usize>) -> Option<SparseVec> {
    let mut pairs = Vec::with_capacity(a.len());
    for (w, c) in a.terms() {
        pairs.push((*index.get(w)?, c.clone()));
    }
    Some(SparseVec::from_pairs(pairs))
}

/// Witt's necklace count: dimension of the weight-`w` part of the free Lie
/// algebra on `m` even-degree generators.
pub fn witt_dimension(m: u64, w: u64) -> u64 {
    fn mobius(mut n: u64) -> i64 {
        let mut result = 1i64;
        let mut p = 2;
        while p * p <= n {
            if n.is_multiple_of(p) {
                n /= p;
                if n.is_multiple_of(p) {
                    return 0;
                }
                result = -result;
            }
            p += 1;
        }
        if n > 1 {
            result = -result;
        }
        result
    }
    let total: i64 = (1..=w)
        .filter(|e| w.is_multiple_of(*e))
        .map(|e| mobius(e) * (m as i64).pow((w / e) as u32))
        .sum();
    (total / w as i64) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    /// Rank of all left-normed brackets of a content: an elimination oracle
    /// independent of the Lyndon enumeration.
    fn left_normed_rank(content: &[Letter], degree: &impl Fn(Letter) -> i64) -> usize {
        let index: BTreeMap<Word, usize> = multiset_permutations(content)
            .into_iter()
            .enumerate()
            .map(|(i, w)| (w, i))
            .collect();
        let mut ech = Echelon::new(false);
        for perm in multiset_permutations(content) {
            let mut e = Assoc::letter(perm[0]);
            for l in &perm[1..] {
                e = super_bracket(&e, &Assoc::letter(*l), degree);
            }
            ech.insert(assoc_to_vec(&e, &index).unwrap());
        }
        ech.rank()
    }

    #[test]
    fn lyndon_words() {
        assert!(is_lyndon(&[0, 1]));
        assert!(!is_lyndon(&[1, 0]));
        assert!(!is_lyndon(&[0, 0]));
        assert!(is_lyndon(&[0, 0, 1]));
        assert!(is_lyndon(&[0, 1, 1]));
        assert!(!is_lyndon(&[0, 1, 0, 1]));
        assert_eq!(
            standard_bracketing(&[0, 0, 1]),
            BracketWord::node(
                BracketWord::leaf(0),
                BracketWord::node(BracketWord::leaf(0), BracketWord::leaf(1))
            )
        );
    }

    #[test]
    fn single_generator_weight_two() {
        let even = FreeLieAlgebra::with_degrees(&[2]).unwrap();
        assert_eq!(even.dimension(2), 0);
        let odd = FreeLieAlgebra::with_degrees(&[3]).unwrap();
        let (words, basis) = odd.lie_basis(2);
        assert_eq!(basis.dimension(), 1);
        assert_eq!(
            words[0],
            BracketWord::node(BracketWord::leaf(0), BracketWord::leaf(0))
        );
        assert_eq!(odd.dimension(3), 0);
    }

    #[test]
    fn weight_one_is_generators() {
        let l = FreeLieAlgebra::with_degrees(&[1, 4]).unwrap();
        assert_eq!(l.dimension(1), 2);
    }

    #[test]
    fn antisymmetry_normal_form() {
        let l = FreeLieAlgebra::with_degrees(&[2, 2]).unwrap();
        let yx = BracketWord::node(BracketWord::leaf(1), BracketWord::leaf(0));
        let xy = BracketWord::node(BracketWord::leaf(0), BracketWord::leaf(1));
        let nf = l.normal_form(&yx, &rat(1));
        assert_eq!(nf.coefficient(&xy), rat(-1));
        assert_eq!(nf.terms().count(), 1);
        // idempotent on basis words
        let nf_xy = l.normal_form(&xy, &rat(3));
        assert_eq!(nf_xy.coefficient(&xy), rat(3));
    }

    #[test]
    fn odd_cube_vanishes() {
        let l = FreeLieAlgebra::with_degrees(&[1]).unwrap();
        let x = BracketWord::leaf(0);
        let w = BracketWord::node(x.clone(), BracketWord::node(x.clone(), x));
        assert!(l.normal_form(&w, &rat(1)).is_zero());
    }

    #[test]
    fn witt_numbers_match_basis_for_even_generators() {
        for m in 1..=4u64 {
            let degrees = vec![2; m as usize];
            let l = FreeLieAlgebra::with_degrees(&degrees).unwrap();
            for w in 1..=6u64 {
                if m.pow(w as u32) > 5000 {
                    continue;
                }
                assert_eq!(
                    l.dimension(w as usize) as u64,
                    witt_dimension(m, w),
                    "m={m} w={w}"
                );
            }
        }
        assert_eq!(witt_dimension(2, 4), 3);
        assert_eq!(witt_dimension(3, 3), 8);
    }

    #[test]
    fn super_lyndon_counts_match_left_normed_oracle() {
        let degree_sets: [&[i64]; 5] = [&[1, 1], &[1, 2], &[2, 3, 3], &[1, 1, 1], &[3, 2, 5]];
        for degrees in degree_sets {
            let deg = |l: Letter| degrees[l as usize];
            for w in 1..=5 {
                for content in contents_of_weight(degrees.len(), w) {
                    let ours = content_basis(&content, &deg).len();
                    let oracle = left_normed_rank(&content, &deg);
                    assert_eq!(ours, oracle, "degrees {degrees:?} content {content:?}");
                }
            }
        }
    }

    #[test]
    fn graded_jacobi_on_basis_triples() {
        for degrees in [&[1i64, 2][..], &[1, 1], &[2, 3]] {
            let l = FreeLieAlgebra::with_degrees(degrees).unwrap();
            let deg = |e: &LieElement| -> i64 {
                let (w, _) = e.terms().next().unwrap();
                w.degree(&|x| degrees[x as usize])
            };
            let mut elems = Vec::new();
            for w in 1..=3 {
                let (words, _) = l.lie_basis(w);
                elems.extend(words.into_iter().map(|b| l.normal_form(&b, &rat(1))));
            }
            for a in &elems {
                for b in &elems {
                    for c in &elems {
                        if a.weight() + b.weight() + c.weight() > 5 {
                            continue;
                        }
                        let lhs = l.bracket(a, &l.bracket(b, c));
                        let mut rhs = l.bracket(&l.bracket(a, b), c);
                        rhs.add_scaled(&sign(deg(a) * deg(b)), &l.bracket(b, &l.bracket(a, c)));
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn bracket_with_zero() {
        let l = FreeLieAlgebra::with_degrees(&[2]).unwrap();
        let x = l.generator(0);
        assert!(l.bracket(&x, &LieElement::zero(1)).is_zero());
    }

    #[test]
    fn rejects_degree_zero() {
        assert!(FreeLieAlgebra::with_degrees(&[0]).is_err());
    }
}
