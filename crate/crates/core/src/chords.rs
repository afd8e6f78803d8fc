//! Point bookkeeping shared by the Lie and homology models: chord indexing
//! and the action of cofaces (doubling) and codegeneracies (forgetting) on
//! points and chords.

use crate::error::{Error, Result};
use crate::free_lie::Letter;
use crate::linalg::{rat, sign, Rational};

/// A chord `(i, j)` between points `1 <= j < i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Chord {
    pub i: usize,
    pub j: usize,
}

impl Chord {
    pub fn new(i: usize, j: usize) -> Self {
        assert!(1 <= j && j < i, "chord ({i},{j}) needs 1 <= j < i");
        Chord { i, j }
    }

    /// Position in the order `21, 31, 32, 41, 42, 43, ...`.
    pub fn index(self) -> usize {
        (self.i - 1) * (self.i - 2) / 2 + (self.j - 1)
    }

    pub fn letter(self) -> Letter {
        self.index() as Letter
    }

    pub fn from_index(idx: usize) -> Self {
        let mut i = 2;
        while (i - 1) * i / 2 <= idx {
            i += 1;
        }
        let j = idx - (i - 1) * (i - 2) / 2 + 1;
        Chord { i, j }
    }

    pub fn from_letter(l: Letter) -> Self {
        Self::from_index(l as usize)
    }

    pub fn touches(self, p: usize) -> bool {
        self.i == p || self.j == p
    }

    pub fn label(self, prefix: &str) -> String {
        format!("{prefix}{}{}", self.i, self.j)
    }
}

pub fn chord_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

pub fn chords(n: usize) -> impl Iterator<Item = Chord> {
    (2..=n).flat_map(|i| (1..i).map(move |j| Chord { i, j }))
}

/// A structure map of the cosimplicial point model, acting on `{1..n}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum PointMap {
    /// `d^i : n -> n+1`. `i = 0` adds a first point, `i = n+1` a last one,
    /// otherwise point `i` is doubled into `i, i+1`.
    Coface { i: usize, n: usize },
    /// `s^j : n -> n-1`, forgetting point `j+1`.
    Codegeneracy { j: usize, n: usize },
}

impl PointMap {
    pub fn coface(i: usize, n: usize) -> Result<Self> {
        if i > n + 1 {
            return Err(Error::IndexOutOfRange(format!(
                "coface d^{i} on level {n} needs 0 <= i <= {}",
                n + 1
            )));
        }
        Ok(PointMap::Coface { i, n })
    }

    pub fn codegeneracy(j: usize, n: usize) -> Result<Self> {
        if n == 0 || j >= n {
            return Err(Error::IndexOutOfRange(format!(
                "codegeneracy s^{j} on level {n} needs 0 <= j < n"
            )));
        }
        Ok(PointMap::Codegeneracy { j, n })
    }

    pub fn source(self) -> usize {
        match self {
            PointMap::Coface { n, .. } | PointMap::Codegeneracy { n, .. } => n,
        }
    }

    pub fn target(self) -> usize {
        match self {
            PointMap::Coface { n, .. } => n + 1,
            PointMap::Codegeneracy { n, .. } => n - 1,
        }
    }

    pub fn name(self) -> String {
        match self {
            PointMap::Coface { i, n } => format!("d^{i}@{n}"),
            PointMap::Codegeneracy { j, n } => format!("s^{j}@{n}"),
        }
    }

    /// Images of a point, in increasing order.
    pub fn points(self, a: usize) -> Vec<usize> {
        match self {
            PointMap::Coface { i, .. } => {
                if i == 0 || a > i {
                    vec![a + 1]
                } else if a < i {
                    vec![a]
                } else {
                    vec![a, a + 1]
                }
            }
            PointMap::Codegeneracy { j, .. } => {
                let forgotten = j + 1;
                if a == forgotten {
                    vec![]
                } else if a < forgotten {
                    vec![a]
                } else {
                    vec![a - 1]
                }
            }
        }
    }

    /// Image of the chord class `(i, j)` as signed chord letters of the
    /// target, using `X_{ab} = (-1)^d X_{ba}` for reversed pairs.
    pub fn chord_image(self, c: Chord, d: usize) -> Vec<(Letter, Rational)> {
        let mut out: Vec<(Letter, Rational)> = Vec::new();
        for a in self.points(c.i) {
            for b in self.points(c.j) {
                let (ch, s) = if a > b {
                    (Chord::new(a, b), rat(1))
                } else {
                    (Chord::new(b, a), sign(d as i64))
                };
                match out.iter_mut().find(|(l, _)| *l == ch.letter()) {
                    Some((_, v)) => *v += s,
                    None => out.push((ch.letter(), s)),
                }
            }
        }
        out.retain(|(_, v)| !num::Zero::is_zero(v));
        out.sort_by_key(|(l, _)| *l);
        out
    }
}

/// All cofaces out of level `n` followed by all codegeneracies out of it.
pub fn maps_from(n: usize) -> Vec<PointMap> {
    let mut out: Vec<PointMap> = (0..=n + 1).map(|i| PointMap::Coface { i, n }).collect();
    out.extend((0..n).map(|j| PointMap::Codegeneracy { j, n }));
    out
}

/// One cosimplicial identity `lhs_2 ∘ lhs_1 = rhs_2 ∘ rhs_1` starting at a
/// given level. `None` on the right stands for the identity map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosimplicialIdentity {
    pub name: String,
    pub lhs: (PointMap, PointMap),
    pub rhs: Option<(PointMap, PointMap)>,
}

/// Every instance of the cosimplicial identities whose maps start at `n`
/// and stay within levels `0..=max_level`.
pub fn cosimplicial_identities(n: usize, max_level: usize) -> Vec<CosimplicialIdentity> {
    let mut out = Vec::new();
    // d^j d^i = d^i d^{j-1}, i < j, on level n -> n+2
    if n + 2 <= max_level {
        for j in 0..=n + 2 {
            for i in 0..j {
                out.push(CosimplicialIdentity {
                    name: format!("d^{j}d^{i}=d^{i}d^{}@{n}", j - 1),
                    lhs: (
                        PointMap::Coface { i, n },
                        PointMap::Coface { i: j, n: n + 1 },
                    ),
                    rhs: Some((
                        PointMap::Coface { i: j - 1, n },
                        PointMap::Coface { i, n: n + 1 },
                    )),
                });
            }
        }
    }
    // s^j s^i = s^i s^{j+1}, i <= j, on level n -> n-2
    if n >= 2 {
        for j in 0..n - 1 {
            for i in 0..=j {
                out.push(CosimplicialIdentity {
                    name: format!("s^{j}s^{i}=s^{i}s^{}@{n}", j + 1),
                    lhs: (
                        PointMap::Codegeneracy { j: i, n },
                        PointMap::Codegeneracy { j, n: n - 1 },
                    ),
                    rhs: Some((
                        PointMap::Codegeneracy { j: j + 1, n },
                        PointMap::Codegeneracy { j: i, n: n - 1 },
                    )),
                });
            }
        }
    }
    // s^j d^i on level n -> n
    if n < max_level {
        for j in 0..=n {
            for i in 0..=n + 1 {
                let lhs = (
                    PointMap::Coface { i, n },
                    PointMap::Codegeneracy { j, n: n + 1 },
                );
                let (name, rhs) = if i < j {
                    (
                        format!("s^{j}d^{i}=d^{i}s^{}@{n}", j - 1),
                        Some((
                            PointMap::Codegeneracy { j: j - 1, n },
                            PointMap::Coface { i, n: n - 1 },
                        )),
                    )
                } else if i == j || i == j + 1 {
                    (format!("s^{j}d^{i}=id@{n}"), None)
                } else {
                    (
                        format!("s^{j}d^{i}=d^{}s^{j}@{n}", i - 1),
                        Some((
                            PointMap::Codegeneracy { j, n },
                            PointMap::Coface { i: i - 1, n: n - 1 },
                        )),
                    )
                };
                out.push(CosimplicialIdentity { name, lhs, rhs });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chord_indexing_roundtrip() {
        for (k, c) in chords(7).enumerate() {
            assert_eq!(c.index(), k);
            assert_eq!(Chord::from_index(k), c);
        }
        assert_eq!(chord_count(4), 6);
    }

    #[test]
    fn coface_examples_on_two_points() {
        let c = Chord::new(2, 1);
        let d0 = PointMap::coface(0, 2).unwrap().chord_image(c, 4);
        assert_eq!(d0, vec![(Chord::new(3, 2).letter(), rat(1))]);
        let d2 = PointMap::coface(2, 2).unwrap().chord_image(c, 4);
        assert_eq!(
            d2,
            vec![
                (Chord::new(2, 1).letter(), rat(1)),
                (Chord::new(3, 1).letter(), rat(1))
            ]
        );
        let d3 = PointMap::coface(3, 2).unwrap().chord_image(c, 4);
        assert_eq!(d3, vec![(Chord::new(2, 1).letter(), rat(1))]);
        assert!(PointMap::coface(4, 2).is_err());
    }

    #[test]
    fn codegeneracy_examples() {
        let s0 = PointMap::codegeneracy(0, 3).unwrap();
        assert_eq!(
            s0.chord_image(Chord::new(3, 2), 4),
            vec![(Chord::new(2, 1).letter(), rat(1))]
        );
        assert!(s0.chord_image(Chord::new(2, 1), 4).is_empty());
        let s2 = PointMap::codegeneracy(2, 3).unwrap();
        assert_eq!(
            s2.chord_image(Chord::new(2, 1), 4),
            vec![(Chord::new(2, 1).letter(), rat(1))]
        );
        assert!(s2.chord_image(Chord::new(3, 1), 4).is_empty());
        assert!(PointMap::codegeneracy(3, 3).is_err());
    }

    #[test]
    fn point_maps_satisfy_identities() {
        // on points, composites of multi-valued maps must agree
        for n in 0..=5 {
            for id in cosimplicial_identities(n, 7) {
                for a in 1..=n {
                    let apply = |pair: (PointMap, PointMap)| -> Vec<usize> {
                        let mut v: Vec<usize> = pair
                            .0
                            .points(a)
                            .into_iter()
                            .flat_map(|b| pair.1.points(b))
                            .collect();
                        v.sort();
                        v
                    };
                    let rhs = id.rhs.map(apply).unwrap_or_else(|| vec![a]);
                    assert_eq!(apply(id.lhs), rhs, "{}", id.name);
                }
            }
        }
    }
}
