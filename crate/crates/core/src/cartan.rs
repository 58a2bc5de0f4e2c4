//! Cartan data, reduced words of the longest Weyl element, and the
//! coordinate labelling `u_i^k = v_j` attached to a word.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qscalar::{rat, rint, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LieType {
    A1,
    A2,
    A3,
    B2,
    /// Langlands dual of `B2` (root 1 long). Only reachable through
    /// [`CartanDatum::langlands_dual`].
    C2,
}

impl fmt::Display for LieType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LieType::A1 => "A1",
            LieType::A2 => "A2",
            LieType::A3 => "A3",
            LieType::B2 => "B2",
            LieType::C2 => "C2",
        };
        f.write_str(s)
    }
}

impl FromStr for LieType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A1" => Ok(LieType::A1),
            "A2" => Ok(LieType::A2),
            "A3" => Ok(LieType::A3),
            "B2" => Ok(LieType::B2),
            other => Err(Error::UnsupportedType(other.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartanDatum {
    pub lie_type: LieType,
    /// `a[i][j] = a_ij`, zero-based.
    pub a: Vec<Vec<i64>>,
    /// Root scales `m_i`, so that `q_i = q^{m_i}`.
    pub m: Vec<Rat>,
}

pub fn cartan_datum(lie_type: LieType) -> Result<CartanDatum> {
    let (a, m) = match lie_type {
        LieType::A1 => (vec![vec![2]], vec![rint(1)]),
        LieType::A2 => (vec![vec![2, -1], vec![-1, 2]], vec![rint(1); 2]),
        LieType::A3 => (
            vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]],
            vec![rint(1); 3],
        ),
        LieType::B2 => (vec![vec![2, -2], vec![-1, 2]], vec![rat(1, 2), rint(1)]),
        LieType::C2 => return Err(Error::UnsupportedType("C2".into())),
    };
    Ok(CartanDatum { lie_type, a, m })
}

impl CartanDatum {
    pub fn rank(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self, i: usize, j: usize) -> i64 {
        self.a[i][j]
    }

    pub fn is_simply_laced(&self) -> bool {
        self.m.iter().all(|m| *m == self.m[0])
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        i != j && self.a[i][j] != 0
    }

    /// Number of positive roots, i.e. `l(w0)`.
    pub fn num_positive_roots(&self) -> usize {
        self.positive_roots().len()
    }

    /// Simple reflection on a root written in the simple-root basis:
    /// `s_i(β) = β − (Σ_j a_ij β_j) α_i`.
    pub fn reflect_root(&self, i: usize, beta: &[i64]) -> Vec<i64> {
        let pair: i64 = (0..self.rank()).map(|j| self.a[i][j] * beta[j]).sum();
        let mut out = beta.to_vec();
        out[i] -= pair;
        out
    }

    pub fn positive_roots(&self) -> Vec<Vec<i64>> {
        let n = self.rank();
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        for i in 0..n {
            let mut e = vec![0; n];
            e[i] = 1;
            seen.insert(e.clone());
            queue.push_back(e);
        }
        while let Some(r) = queue.pop_front() {
            for i in 0..n {
                let s = self.reflect_root(i, &r);
                if seen.insert(s.clone()) {
                    queue.push_back(s);
                }
            }
        }
        seen.into_iter()
            .filter(|r| r.iter().all(|c| *c >= 0))
            .collect()
    }

    /// Check symmetrizability, diagonal, sign pattern and invertibility.
    pub fn validate(&self) -> bool {
        let n = self.rank();
        for i in 0..n {
            if self.a[i][i] != 2 {
                return false;
            }
            for j in 0..n {
                if i != j && self.a[i][j] > 0 {
                    return false;
                }
                if self.m[i] * rint(self.a[i][j]) != self.m[j] * rint(self.a[j][i]) {
                    return false;
                }
            }
        }
        let m: Vec<Vec<Rat>> = self
            .a
            .iter()
            .map(|r| r.iter().map(|x| rint(*x)).collect())
            .collect();
        crate::linalg::inverse(&m).is_some()
    }

    /// Transposed Cartan matrix with scales `m̃_i = min(m)/m_i`.
    pub fn langlands_dual(&self) -> CartanDatum {
        let n = self.rank();
        let a = (0..n)
            .map(|i| (0..n).map(|j| self.a[j][i]).collect())
            .collect();
        let mmin = *self.m.iter().min().unwrap();
        let m = self.m.iter().map(|x| mmin / *x).collect();
        let lie_type = match self.lie_type {
            LieType::B2 => LieType::C2,
            LieType::C2 => LieType::B2,
            t => t,
        };
        CartanDatum { lie_type, a, m }
    }

    /// `s_i(λ)_j = λ_j − a_ij λ_i`.
    pub fn weyl_lambda_action(&self, i: usize, lambda: &[Rat]) -> Vec<Rat> {
        (0..self.rank())
            .map(|j| lambda[j] - rint(self.a[i][j]) * lambda[i])
            .collect()
    }

    /// Matrix of the λ-action of `s_i` (row `j` gives the image of `λ_j`).
    pub fn lambda_reflection_matrix(&self, i: usize) -> Vec<Vec<Rat>> {
        let n = self.rank();
        (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| {
                        let mut v = if j == k { Rat::one() } else { Rat::zero() };
                        if k == i {
                            v -= rint(self.a[i][j]);
                        }
                        v
                    })
                    .collect()
            })
            .collect()
    }

    /// Order of the group generated by the λ-reflections.
    pub fn weyl_group_order(&self) -> usize {
        let n = self.rank();
        let gens: Vec<_> = (0..n).map(|i| self.lambda_reflection_matrix(i)).collect();
        let id: Vec<Vec<Rat>> = (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| if j == k { Rat::one() } else { Rat::zero() })
                    .collect()
            })
            .collect();
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(id.clone());
        queue.push_back(id);
        while let Some(g) = queue.pop_front() {
            for s in &gens {
                let h = crate::linalg::matmul(s, &g);
                if seen.insert(h.clone()) {
                    queue.push_back(h);
                }
            }
        }
        seen.len()
    }

    /// Braid-move length `m_ij` (3 for simply-laced edges, 4 for double).
    pub fn braid_length(&self, i: usize, j: usize) -> usize {
        match self.a[i][j] * self.a[j][i] {
            0 => 2,
            1 => 3,
            2 => 4,
            _ => 6,
        }
    }
}

/// Word `s_{i_1} … s_{i_N}` with one-based letters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReducedWord {
    pub letters: Vec<usize>,
}

impl ReducedWord {
    pub fn new(letters: Vec<usize>) -> Self {
        Self { letters }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn last(&self) -> usize {
        *self.letters.last().unwrap()
    }

    /// Apply one braid move at position `pos` if `i j i …` matches there.
    pub fn braid_move(&self, datum: &CartanDatum, pos: usize) -> Option<ReducedWord> {
        let l = &self.letters;
        if pos + 1 >= l.len() {
            return None;
        }
        let (i, j) = (l[pos], l[pos + 1]);
        if i == j {
            return None;
        }
        let m = datum.braid_length(i - 1, j - 1);
        if pos + m > l.len() {
            return None;
        }
        for t in 0..m {
            let want = if t % 2 == 0 { i } else { j };
            if l[pos + t] != want {
                return None;
            }
        }
        let mut out = l.clone();
        for t in 0..m {
            out[pos + t] = if t % 2 == 0 { j } else { i };
        }
        Some(ReducedWord::new(out))
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.letters.iter().map(|i| format!("s{i}")).collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for ReducedWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        let cleaned = s.replace(['s', ' ', ',', '\t'], " ");
        for tok in cleaned.split_whitespace() {
            for part in tok.chars() {
                let d = part
                    .to_digit(10)
                    .ok_or_else(|| Error::NotLongestWord(s.to_string()))?;
                letters.push(d as usize);
            }
        }
        if letters.is_empty() {
            return Err(Error::NotLongestWord(s.to_string()));
        }
        Ok(ReducedWord { letters })
    }
}

/// True iff `word` is a reduced expression of `w0` for `datum`.
pub fn check_longest_word(datum: &CartanDatum, word: &ReducedWord) -> bool {
    let n = datum.rank();
    if word.letters.iter().any(|&i| i == 0 || i > n) {
        return false;
    }
    let roots = datum.positive_roots();
    if word.len() != roots.len() {
        return false;
    }
    roots.iter().all(|r| {
        let mut beta = r.clone();
        for &i in word.letters.iter().rev() {
            beta = datum.reflect_root(i - 1, &beta);
        }
        beta.iter().all(|c| *c <= 0)
    })
}

/// Labels `u_i^k = v_j` for a reduced word; `k` counts from the right.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordinateLabels {
    /// `(i, k) -> j`, all one-based.
    pub v_index: BTreeMap<(usize, usize), usize>,
    /// `root_of[j-1] = r(j)`.
    pub root_of: Vec<usize>,
    /// Display names `u_i^k (v_j)`.
    pub names: Vec<String>,
}

impl CoordinateLabels {
    pub fn v(&self, i: usize, k: usize) -> usize {
        self.v_index[&(i, k)]
    }

    pub fn multiplicity(&self, i: usize) -> usize {
        self.root_of.iter().filter(|r| **r == i).count()
    }
}

pub fn coordinate_labels(datum: &CartanDatum, word: &ReducedWord) -> Result<CoordinateLabels> {
    if !check_longest_word(datum, word) {
        return Err(Error::NotLongestWord(word.to_string()));
    }
    let n = word.len();
    let mut v_index = BTreeMap::new();
    let mut names = vec![String::new(); n];
    for (pos, &i) in word.letters.iter().enumerate() {
        let k = word.letters[pos..].iter().filter(|&&x| x == i).count();
        v_index.insert((i, k), pos + 1);
        names[pos] = format!("u_{i}^{k} (v_{})", pos + 1);
    }
    Ok(CoordinateLabels {
        v_index,
        root_of: word.letters.clone(),
        names,
    })
}

/// Standard reduced word used by the presets of each type.
pub fn default_word(lie_type: LieType) -> ReducedWord {
    let letters = match lie_type {
        LieType::A1 => vec![1],
        LieType::A2 => vec![2, 1, 2],
        LieType::A3 => vec![3, 2, 1, 3, 2, 3],
        LieType::B2 | LieType::C2 => vec![1, 2, 1, 2],
    };
    ReducedWord::new(letters)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> ReducedWord {
        s.parse().unwrap()
    }

    #[test]
    fn data() {
        let a2 = cartan_datum(LieType::A2).unwrap();
        assert_eq!(a2.a, vec![vec![2, -1], vec![-1, 2]]);
        let b2 = cartan_datum(LieType::B2).unwrap();
        assert_eq!(b2.a, vec![vec![2, -2], vec![-1, 2]]);
        assert_eq!(b2.m, vec![rat(1, 2), rint(1)]);
        assert_eq!(cartan_datum(LieType::A1).unwrap().a, vec![vec![2]]);
        for t in [LieType::A1, LieType::A2, LieType::A3, LieType::B2] {
            assert!(cartan_datum(t).unwrap().validate());
        }
        assert!(matches!(
            "G2".parse::<LieType>(),
            Err(Error::UnsupportedType(_))
        ));
    }

    #[test]
    fn longest_words() {
        let a2 = cartan_datum(LieType::A2).unwrap();
        assert!(check_longest_word(&a2, &w("s2 s1 s2")));
        assert!(!check_longest_word(&a2, &w("s1 s1 s1")));
        let a3 = cartan_datum(LieType::A3).unwrap();
        assert!(check_longest_word(&a3, &w("s3 s2 s1 s3 s2 s3")));
        let b2 = cartan_datum(LieType::B2).unwrap();
        assert!(check_longest_word(&b2, &w("s1 s2 s1 s2")));
        assert!(!check_longest_word(&b2, &w("s1 s2 s1")));
    }

    #[test]
    fn labels() {
        let a3 = cartan_datum(LieType::A3).unwrap();
        let l = coordinate_labels(&a3, &w("s3s2s1s3s2s3")).unwrap();
        let expect = [(3, 3), (2, 2), (1, 1), (3, 2), (2, 1), (3, 1)];
        for (j, (i, k)) in expect.iter().enumerate() {
            assert_eq!(l.v(*i, *k), j + 1);
        }
        let a2 = cartan_datum(LieType::A2).unwrap();
        let l = coordinate_labels(&a2, &w("s2 s1 s2")).unwrap();
        assert_eq!((l.v(2, 2), l.v(1, 1), l.v(2, 1)), (1, 2, 3));
        assert!(coordinate_labels(&a2, &w("s1 s2")).is_err());
    }

    #[test]
    fn lambda_action() {
        let a2 = cartan_datum(LieType::A2).unwrap();
        let l = vec![rint(3), rint(5)];
        assert_eq!(a2.weyl_lambda_action(0, &l), vec![rint(-3), rint(8)]);
        assert_eq!(a2.weyl_lambda_action(0, &a2.weyl_lambda_action(0, &l)), l);
        let a1 = cartan_datum(LieType::A1).unwrap();
        assert_eq!(a1.weyl_lambda_action(0, &[rint(2)]), vec![rint(-2)]);
    }

    #[test]
    fn group_orders() {
        let orders = [
            (LieType::A1, 2),
            (LieType::A2, 6),
            (LieType::A3, 24),
            (LieType::B2, 8),
        ];
        for (t, o) in orders {
            assert_eq!(cartan_datum(t).unwrap().weyl_group_order(), o);
        }
    }

    #[test]
    fn braid_moves_preserve_longest() {
        for t in [LieType::A2, LieType::A3, LieType::B2] {
            let d = cartan_datum(t).unwrap();
            let word = default_word(t);
            for pos in 0..word.len() {
                if let Some(w2) = word.braid_move(&d, pos) {
                    assert!(check_longest_word(&d, &w2), "{t} {w2}");
                }
            }
        }
    }

    #[test]
    fn dual_of_b2() {
        let d = cartan_datum(LieType::B2).unwrap().langlands_dual();
        assert_eq!(d.a, vec![vec![2, -1], vec![-2, 2]]);
        assert_eq!(d.m, vec![rint(1), rat(1, 2)]);
        assert!(d.validate());
    }
}
