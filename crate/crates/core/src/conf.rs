//! Rational (co)homology of the configuration spaces `K(n)` of `n` points
//! in `R^d`.
//!
//! Cohomology is generated by classes `A_ij` of degree `d-1` subject to
//! `A_ij^2 = 0` and the three-term relation. A monomial is admissible when
//! its factors have pairwise distinct first indices; admissible monomials
//! written in increasing order of first index form a basis. Homology is
//! the dual coalgebra, with the dual basis `ξ` and `γ_ij` in degree `d-1`.
//! Tensor pairings carry the Koszul sign, so the reduced diagonal satisfies
//! `<Δξ, α⊗β> = (-1)^{|β||α|}<ξ, αβ>` entrywise.

use std::collections::BTreeMap;

use crate::chords::{chord_count, chords, cosimplicial_identities, Chord, PointMap};
use crate::error::{Error, Result};
use crate::linalg::{rat, sign, Rational, SparseRationalMatrix, SparseVec};

/// Factors of a cohomology monomial, in product order.
pub type Monomial = Vec<Chord>;

pub fn is_admissible(m: &[Chord]) -> bool {
    m.windows(2).all(|w| w[0].i < w[1].i)
}

pub fn monomial_label(m: &[Chord]) -> String {
    if m.is_empty() {
        return "1".into();
    }
    m.iter().map(|c| c.label("A")).collect()
}

pub fn homology_label(m: &[Chord]) -> String {
    match m.len() {
        0 => "1".into(),
        1 => m[0].label("γ"),
        _ => {
            let parts: Vec<String> = m.iter().map(|c| c.label("")).collect();
            format!("ξ{}", parts.join(","))
        }
    }
}

/// Rewrites a product of generators as a combination of admissible
/// monomials, using graded commutativity (degree `d-1`), `A^2 = 0` and
/// `A_ij A_ik = A_kj A_ik - A_kj A_ij` for `j < k < i`.
pub fn arnold_reduce(factors: &[Chord], d: usize) -> BTreeMap<Monomial, Rational> {
    let mut out = BTreeMap::new();
    reduce_into(factors.to_vec(), rat(1), (d - 1) % 2 == 1, &mut out);
    out.retain(|_, c: &mut Rational| !num::Zero::is_zero(c));
    out
}

fn reduce_into(
    mut f: Monomial,
    mut coeff: Rational,
    odd: bool,
    out: &mut BTreeMap<Monomial, Rational>,
) {
    // insertion sort by (i, j), tracking the Koszul sign
    for a in 1..f.len() {
        let mut b = a;
        while b > 0 && f[b - 1] > f[b] {
            f.swap(b - 1, b);
            if odd {
                coeff = -coeff;
            }
            b -= 1;
        }
    }
    let Some(pos) = f.windows(2).position(|w| w[0].i == w[1].i) else {
        *out.entry(f).or_insert_with(|| rat(0)) += coeff;
        return;
    };
    let (i, j, k) = (f[pos].i, f[pos].j, f[pos + 1].j);
    if j == k {
        return;
    }
    let mut first = f.clone();
    first[pos] = Chord::new(k, j);
    first[pos + 1] = Chord::new(i, k);
    reduce_into(first, coeff.clone(), odd, out);
    let mut second = f;
    second[pos] = Chord::new(k, j);
    second[pos + 1] = Chord::new(i, j);
    reduce_into(second, -coeff, odd, out);
}

/// Admissible monomials of length `k` on `n` points, in lexicographic order.
pub fn admissible_monomials(n: usize, k: usize) -> Vec<Monomial> {
    fn rec(n: usize, k: usize, min_i: usize, cur: &mut Monomial, out: &mut Vec<Monomial>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in min_i..=n {
            for j in 1..i {
                cur.push(Chord::new(i, j));
                rec(n, k, i + 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(n, k, 2, &mut Vec::new(), &mut out);
    out
}

/// Coefficients of `∏_{m=1}^{n-1} (1 + m t)`.
pub fn poincare_coefficients(n: usize) -> Vec<u64> {
    let mut p = vec![1u64];
    for m in 1..n as u64 {
        let mut next = vec![0; p.len() + 1];
        for (k, c) in p.iter().enumerate() {
            next[k] += c;
            next[k + 1] += c * m;
        }
        p = next;
    }
    p
}

/// (Co)homology of `K(n)` with its admissible basis in every degree.
#[derive(Clone, Debug)]
pub struct ConfSpace {
    pub n: usize,
    pub d: usize,
    bases: Vec<Vec<Monomial>>,
    index: Vec<BTreeMap<Monomial, usize>>,
}

impl ConfSpace {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        if d < 3 {
            return Err(Error::InvalidParameter(format!("need d >= 3, got {d}")));
        }
        let top = n.saturating_sub(1);
        let bases: Vec<Vec<Monomial>> = (0..=top).map(|k| admissible_monomials(n, k)).collect();
        let index = bases
            .iter()
            .map(|b| b.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect())
            .collect();
        Ok(ConfSpace { n, d, bases, index })
    }

    /// Degree of the generators, `d - 1`.
    pub fn generator_degree(&self) -> usize {
        self.d - 1
    }

    /// Largest word length with nonzero cohomology.
    pub fn top_length(&self) -> usize {
        self.bases.len() - 1
    }

    pub fn dim(&self, k: usize) -> usize {
        self.bases.get(k).map_or(0, Vec::len)
    }

    pub fn basis(&self, k: usize) -> &[Monomial] {
        self.bases.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn cohomology_labels(&self, k: usize) -> Vec<String> {
        self.basis(k).iter().map(|m| monomial_label(m)).collect()
    }

    pub fn homology_labels(&self, k: usize) -> Vec<String> {
        self.basis(k).iter().map(|m| homology_label(m)).collect()
    }

    /// Coordinates of a product of generators in the admissible basis.
    pub fn reduce(&self, factors: &[Chord]) -> Result<SparseVec> {
        if let Some(c) = factors.iter().find(|c| c.i > self.n) {
            return Err(Error::IndexOutOfRange(format!(
                "A{}{} is not a class of K({})",
                c.i, c.j, self.n
            )));
        }
        let k = factors.len();
        Ok(SparseVec::from_pairs(
            arnold_reduce(factors, self.d)
                .into_iter()
                .map(|(m, c)| (self.index[k][&m], c)),
        ))
    }

    /// Matrix of the `(l, k-l)` part of the reduced diagonal in homology
    /// length `k`: columns are `ξ` in length `k`, rows are pairs
    /// `a * dim(k-l) + b` standing for `ξ_a ⊗ ξ_b`.
    pub fn diagonal_matrix(&self, k: usize, l: usize) -> Result<SparseRationalMatrix> {
        if l == 0 || l >= k {
            return Err(Error::InvalidParameter(format!(
                "reduced diagonal needs 0 < l < k, got l={l}, k={k}"
            )));
        }
        let (dl, dr) = (self.dim(l), self.dim(k - l));
        let s = sign((l * (k - l) * (self.d - 1)) as i64);
        let mut entries = Vec::new();
        for (a, ma) in self.basis(l).iter().enumerate() {
            for (b, mb) in self.basis(k - l).iter().enumerate() {
                let mut prod = ma.clone();
                prod.extend_from_slice(mb);
                for (col, c) in self.reduce(&prod)?.iter() {
                    entries.push(((a * dr + b, col), c * &s));
                }
            }
        }
        Ok(SparseRationalMatrix::from_entries(
            dl * dr,
            self.dim(k),
            entries,
        ))
    }

    /// Reduced diagonal of the basis class `idx` in length `k`, as
    /// `(l, a, b, coefficient)` for the terms `ξ_a ⊗ ξ_b` with `|a| = l`.
    pub fn reduced_diagonal(
        &self,
        k: usize,
        idx: usize,
    ) -> Result<Vec<(usize, usize, usize, Rational)>> {
        let mut out = Vec::new();
        for l in 1..k {
            let dr = self.dim(k - l);
            let m = self.diagonal_matrix(k, l)?;
            for (row, c) in m.column(idx).iter() {
                out.push((l, row / dr, row % dr, c.clone()));
            }
        }
        Ok(out)
    }
}

/// Pullback of a structure map on cohomology in length `k`: columns are the
/// admissible basis of the target level, rows that of the source level.
pub fn cohomology_pullback(map: PointMap, k: usize, d: usize) -> Result<SparseRationalMatrix> {
    let src = ConfSpace::new(map.source(), d)?;
    let tgt = ConfSpace::new(map.target(), d)?;
    // A_c pulls back to Σ_t <γ_c, f(γ_t)> A_t
    let mut pull: Vec<Vec<(Chord, Rational)>> = vec![Vec::new(); chord_count(map.target())];
    for t in chords(map.source()) {
        for (l, c) in map.chord_image(t, d) {
            pull[l as usize].push((t, c));
        }
    }
    let mut cols = Vec::with_capacity(tgt.dim(k));
    for m in tgt.basis(k) {
        let mut terms: Vec<(Monomial, Rational)> = vec![(Vec::new(), rat(1))];
        for c in m {
            let mut next = Vec::new();
            for (prefix, coeff) in &terms {
                for (t, x) in &pull[c.index()] {
                    let mut p = prefix.clone();
                    p.push(*t);
                    next.push((p, coeff * x));
                }
            }
            terms = next;
        }
        let mut col = SparseVec::new();
        for (p, coeff) in terms {
            col.axpy(&coeff, &src.reduce(&p)?);
        }
        cols.push(col);
    }
    Ok(SparseRationalMatrix::from_columns(src.dim(k), cols))
}

/// A structure map on homology in length `k` (degree `k(d-1)`), in the dual
/// bases.
pub fn homology_map(map: PointMap, k: usize, d: usize) -> Result<SparseRationalMatrix> {
    Ok(cohomology_pullback(map, k, d)?.transpose())
}

/// Kronecker product `a ⊗ b` with row/column pairs `(i, j) -> i * n_b + j`.
pub fn kron(a: &SparseRationalMatrix, b: &SparseRationalMatrix) -> SparseRationalMatrix {
    let mut entries = Vec::new();
    for ((ra, ca), x) in a.entries() {
        for ((rb, cb), y) in b.entries() {
            entries.push(((ra * b.n_rows() + rb, ca * b.n_cols() + cb), x * y));
        }
    }
    SparseRationalMatrix::from_entries(a.n_rows() * b.n_rows(), a.n_cols() * b.n_cols(), entries)
}

/// Checks `(f⊗f)∘Δ̄ = Δ̄∘f` for a structure map in every length up to `k_max`.
pub fn check_coalgebra_map(map: PointMap, k_max: usize, d: usize) -> Result<()> {
    let src = ConfSpace::new(map.source(), d)?;
    let tgt = ConfSpace::new(map.target(), d)?;
    for k in 2..=k_max {
        let fk = homology_map(map, k, d)?;
        for l in 1..k {
            let lhs = kron(&homology_map(map, l, d)?, &homology_map(map, k - l, d)?)
                .mul(&src.diagonal_matrix(k, l)?);
            let rhs = tgt.diagonal_matrix(k, l)?.mul(&fk);
            if lhs != rhs {
                return Err(Error::Verification(format!(
                    "{} does not commute with the ({l},{}) diagonal in length {k}",
                    map.name(),
                    k - l
                )));
            }
        }
    }
    Ok(())
}

/// Checks that the generator-level pullback respects the three-term
/// relations of the target, so it extends to a ring map.
pub fn check_relations_preserved(map: PointMap, d: usize) -> Result<()> {
    let src = ConfSpace::new(map.source(), d)?;
    let m = map.target();
    let mut pull: Vec<Vec<(Chord, Rational)>> = vec![Vec::new(); chord_count(m)];
    for t in chords(map.source()) {
        for (l, c) in map.chord_image(t, d) {
            pull[l as usize].push((t, c));
        }
    }
    let image = |f: &[Chord]| -> Result<SparseVec> {
        let mut acc = SparseVec::new();
        for (x, cx) in &pull[f[0].index()] {
            for (y, cy) in &pull[f[1].index()] {
                acc.axpy(&(cx * cy), &src.reduce(&[*x, *y])?);
            }
        }
        Ok(acc)
    };
    for i in 1..=m {
        for k in 1..i {
            for j in 1..k {
                let lhs = image(&[Chord::new(i, j), Chord::new(i, k)])?;
                let rhs = image(&[Chord::new(k, j), Chord::new(i, k)])?
                    .sub(&image(&[Chord::new(k, j), Chord::new(i, j)])?);
                if lhs != rhs {
                    return Err(Error::Verification(format!(
                        "{} breaks the three-term relation for ({i},{k},{j})",
                        map.name()
                    )));
                }
            }
            let sq = image(&[Chord::new(i, k), Chord::new(i, k)])?;
            if !sq.is_zero() {
                return Err(Error::Verification(format!(
                    "{} breaks A{i}{k}^2 = 0",
                    map.name()
                )));
            }
        }
    }
    Ok(())
}

/// Outcome of the homology cosimplicial identities in one length.
pub fn check_homology_identities(
    max_level: usize,
    k: usize,
    d: usize,
) -> Result<Vec<(String, bool)>> {
    let mut out = Vec::new();
    for n in 0..=max_level {
        for id in cosimplicial_identities(n, max_level) {
            let compose = |(a, b): (PointMap, PointMap)| -> Result<SparseRationalMatrix> {
                Ok(homology_map(b, k, d)?.mul(&homology_map(a, k, d)?))
            };
            let lhs = compose(id.lhs)?;
            let rhs = match id.rhs {
                Some(pair) => compose(pair)?,
                None => SparseRationalMatrix::identity(ConfSpace::new(n, d)?.dim(k)),
            };
            out.push((format!("{} k={k}", id.name), lhs == rhs));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rank_and_kernel, Echelon};

    fn c(i: usize, j: usize) -> Chord {
        Chord::new(i, j)
    }

    #[test]
    fn arnold_examples() {
        for d in [4, 5] {
            let r = arnold_reduce(&[c(2, 1), c(3, 1)], d);
            assert_eq!(r, BTreeMap::from([(vec![c(2, 1), c(3, 1)], rat(1))]));
            let r = arnold_reduce(&[c(3, 1), c(3, 2)], d);
            assert_eq!(
                r,
                BTreeMap::from([
                    (vec![c(2, 1), c(3, 2)], rat(1)),
                    (vec![c(2, 1), c(3, 1)], rat(-1))
                ])
            );
            assert!(arnold_reduce(&[c(2, 1), c(2, 1)], d).is_empty());
        }
        // graded commutativity: A31 A21 = (-1)^{d-1} A21 A31
        assert_eq!(
            arnold_reduce(&[c(3, 1), c(2, 1)], 4)[&vec![c(2, 1), c(3, 1)]],
            rat(-1)
        );
        assert_eq!(
            arnold_reduce(&[c(3, 1), c(2, 1)], 5)[&vec![c(2, 1), c(3, 1)]],
            rat(1)
        );
    }

    #[test]
    fn reduction_is_idempotent_on_admissibles() {
        for d in [4, 5] {
            for k in 0..4 {
                for m in admissible_monomials(5, k) {
                    assert!(is_admissible(&m));
                    assert_eq!(arnold_reduce(&m, d), BTreeMap::from([(m.clone(), rat(1))]));
                }
            }
        }
    }

    #[test]
    fn basis_of_k3() {
        let x = ConfSpace::new(3, 4).unwrap();
        assert_eq!(x.cohomology_labels(2), ["A21A31", "A21A32"]);
        assert_eq!(x.homology_labels(2), ["ξ21,31", "ξ21,32"]);
        assert_eq!(ConfSpace::new(2, 4).unwrap().cohomology_labels(1), ["A21"]);
        assert_eq!((0..3).map(|k| x.dim(k)).collect::<Vec<_>>(), [1, 3, 2]);
    }

    /// All words in the generators span the same space modulo the
    /// relations as the admissible monomials: compare ranks of the full
    /// reduction matrix with the claimed dimension.
    #[test]
    fn poincare_polynomial() {
        for d in [4, 5] {
            for n in 0..=6 {
                let x = ConfSpace::new(n, d).unwrap();
                let coeffs = poincare_coefficients(n);
                for (k, &expect) in coeffs.iter().enumerate() {
                    assert_eq!(x.dim(k) as u64, expect, "n={n} k={k}");
                }
                if n <= 4 {
                    for k in 0..coeffs.len() {
                        let all: Vec<Chord> = chords(n).collect();
                        let mut cols = Vec::new();
                        let mut word = vec![0usize; k];
                        loop {
                            let f: Vec<Chord> = word.iter().map(|&t| all[t]).collect();
                            cols.push(x.reduce(&f).unwrap());
                            let mut pos = 0;
                            while pos < k && word[pos] + 1 == all.len() {
                                word[pos] = 0;
                                pos += 1;
                            }
                            if pos == k || all.is_empty() {
                                break;
                            }
                            word[pos] += 1;
                        }
                        let m = SparseRationalMatrix::from_columns(x.dim(k), cols);
                        assert_eq!(m.rank(), x.dim(k), "n={n} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn diagonal_of_xi_21_31() {
        for d in [4usize, 5] {
            let x = ConfSpace::new(3, d).unwrap();
            let e = sign(d as i64 - 1);
            let diag = x.reduced_diagonal(2, 0).unwrap();
            let g = |i, j| x.basis(1).iter().position(|m| m[0] == c(i, j)).unwrap();
            let mut expect = vec![
                (1, g(2, 1), g(3, 1), rat(1)),
                (1, g(3, 1), g(2, 1), e.clone()),
                (1, g(3, 1), g(3, 2), rat(-1)),
                (1, g(3, 2), g(3, 1), -e.clone()),
            ];
            // the Koszul pairing multiplies every term by (-1)^{d-1}
            for t in &mut expect {
                t.3 *= &e;
            }
            let mut diag = diag;
            diag.sort();
            expect.sort();
            assert_eq!(diag, expect);
        }
    }

    #[test]
    fn diagonal_adjunction_and_cocommutativity() {
        for d in [4, 5] {
            let x = ConfSpace::new(4, d).unwrap();
            for k in 2..=3 {
                for l in 1..k {
                    let m = x.diagonal_matrix(k, l).unwrap();
                    let swap = x.diagonal_matrix(k, k - l).unwrap();
                    let (dl, dr) = (x.dim(l), x.dim(k - l));
                    let s = sign((l * (k - l) * (d - 1)) as i64);
                    for a in 0..dl {
                        for b in 0..dr {
                            let mut prod = x.basis(l)[a].clone();
                            prod.extend_from_slice(&x.basis(k - l)[b]);
                            let pairing = x.reduce(&prod).unwrap();
                            for col in 0..x.dim(k) {
                                assert_eq!(m.get(a * dr + b, col), &s * pairing.get(col));
                                assert_eq!(m.get(a * dr + b, col), &s * swap.get(b * dl + a, col));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn diagonal_is_coassociative() {
        for d in [4, 5] {
            let x = ConfSpace::new(4, d).unwrap();
            let k = 3;
            // (Δ̄_{1,1} ⊗ 1) Δ̄_{2,1} = (1 ⊗ Δ̄_{1,1}) Δ̄_{1,2}
            let id1 = SparseRationalMatrix::identity(x.dim(1));
            let lhs = kron(&x.diagonal_matrix(2, 1).unwrap(), &id1)
                .mul(&x.diagonal_matrix(k, 2).unwrap());
            let rhs = kron(&id1, &x.diagonal_matrix(2, 1).unwrap())
                .mul(&x.diagonal_matrix(k, 1).unwrap());
            assert_eq!(lhs, rhs);
            assert!(!lhs.is_zero());
        }
    }

    #[test]
    fn homology_map_examples() {
        let d2 = homology_map(PointMap::coface(2, 2).unwrap(), 1, 4).unwrap();
        let t = ConfSpace::new(3, 4).unwrap();
        let pos = |l: &str| t.homology_labels(1).iter().position(|x| x == l).unwrap();
        assert_eq!(
            d2.column(0),
            &SparseVec::unit(pos("γ21")).add(&SparseVec::unit(pos("γ31")))
        );
        let d0 = homology_map(PointMap::coface(0, 2).unwrap(), 1, 4).unwrap();
        assert_eq!(d0.column(0), &SparseVec::unit(pos("γ32")));
        let s0 = homology_map(PointMap::codegeneracy(0, 1).unwrap(), 0, 4).unwrap();
        assert_eq!(s0, SparseRationalMatrix::identity(1));
    }

    #[test]
    fn structure_maps_are_coalgebra_maps() {
        for d in [4, 5] {
            for n in 0..=4 {
                for i in 0..=n + 1 {
                    let f = PointMap::coface(i, n).unwrap();
                    check_relations_preserved(f, d).unwrap();
                    check_coalgebra_map(f, n.min(3), d).unwrap();
                }
                for j in 0..n {
                    let f = PointMap::codegeneracy(j, n).unwrap();
                    check_relations_preserved(f, d).unwrap();
                    check_coalgebra_map(f, n.saturating_sub(1).min(3), d).unwrap();
                }
            }
        }
    }

    #[test]
    fn homology_identities() {
        for d in [4, 5] {
            for k in 0..=3 {
                for (name, ok) in check_homology_identities(4, k, d).unwrap() {
                    assert!(ok, "d={d} {name}");
                }
            }
        }
    }

    #[test]
    fn kernel_helpers_agree() {
        let x = ConfSpace::new(3, 4).unwrap();
        let m = x.diagonal_matrix(2, 1).unwrap();
        let (r, k) = rank_and_kernel(&m);
        assert_eq!(r + k.len(), 2);
        let mut e = Echelon::new(false);
        for col in m.columns() {
            e.insert(col.clone());
        }
        assert_eq!(e.rank(), r);
    }
}
