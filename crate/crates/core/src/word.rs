//! Finite words over a signed graph and the signed lexicographic orders on
//! them.
//!
//! Two sequences are compared at their first disagreement `n`; the raw letter
//! difference is multiplied by the sign of the common prefix, so each vertex
//! of sign `-1` flips the order of everything that follows it.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{SignedGraph, Vertex};

/// A finite word; doubles as the period of `w^∞`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<Vertex>);

impl Word {
    pub fn new(letters: Vec<Vertex>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Parse a word and check every letter is a vertex of `g`.
    pub fn parse(g: &SignedGraph, text: &str) -> Result<Self> {
        let w: Word = text.parse()?;
        if let Some(&bad) = w.iter().find(|&&v| v >= g.vertex_count()) {
            return Err(Error::InvalidWord(format!(
                "letter {bad} is not a vertex of {}",
                g.name()
            )));
        }
        Ok(w)
    }

    pub fn letters(&self) -> &[Vertex] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Vertex> {
        self.0
    }

    pub fn prefix(&self, k: usize) -> Word {
        Word(self.0[..k].to_vec())
    }

    pub fn suffix(&self, k: usize) -> Word {
        Word(self.0[self.0.len() - k..].to_vec())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn push(&mut self, v: Vertex) {
        self.0.push(v);
    }

    pub fn extend(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn pow(&self, k: usize) -> Word {
        Word(self.0.repeat(k))
    }

    /// `σ^k` applied to the word viewed cyclically.
    pub fn rotate(&self, k: usize) -> Word {
        let mut v = self.0.clone();
        if !v.is_empty() {
            v.rotate_left(k % self.0.len());
        }
        Word(v)
    }

    /// Letter `i` of `w^∞`.
    pub fn periodic_at(&self, i: usize) -> Vertex {
        self.0[i % self.0.len()]
    }

    /// Shortest `u` with `w = u^k`.
    pub fn primitive_root(&self) -> Word {
        let n = self.0.len();
        for d in 1..n {
            if n.is_multiple_of(d) && (d..n).all(|i| self.0[i] == self.0[i - d]) {
                return self.prefix(d);
            }
        }
        self.clone()
    }
}

impl Deref for Word {
    type Target = [Vertex];

    fn deref(&self) -> &[Vertex] {
        &self.0
    }
}

impl From<Vec<Vertex>> for Word {
    fn from(v: Vec<Vertex>) -> Self {
        Word(v)
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Digits (`"1001"`) or comma-separated labels (`"10,3,0"`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let letters: Result<Vec<Vertex>> = if s.contains(',') {
            s.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<Vertex>()
                        .map_err(|_| Error::InvalidWord(format!("bad letter `{t}` in `{s}`")))
                })
                .collect()
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as Vertex)
                        .ok_or_else(|| Error::InvalidWord(format!("bad letter `{c}` in `{s}`")))
                })
                .collect()
        };
        letters.map(Word)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&v| v < 10) {
            for v in &self.0 {
                write!(f, "{v}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Outcome of comparing two words or sequences under the signed order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Comparison {
    Less,
    Equal,
    Greater,
    /// Finite words only: one is a proper prefix of the other.
    Incomparable,
}

impl Comparison {
    pub fn from_ordering(o: Ordering) -> Self {
        match o {
            Ordering::Less => Comparison::Less,
            Ordering::Equal => Comparison::Equal,
            Ordering::Greater => Comparison::Greater,
        }
    }

    pub fn to_ordering(self) -> Option<Ordering> {
        match self {
            Comparison::Less => Some(Ordering::Less),
            Comparison::Equal => Some(Ordering::Equal),
            Comparison::Greater => Some(Ordering::Greater),
            Comparison::Incomparable => None,
        }
    }

    pub fn is_le(self) -> bool {
        matches!(self, Comparison::Less | Comparison::Equal)
    }
}

impl SignedGraph {
    /// Product of vertex signs; `+1` for the empty word.
    pub fn sign(&self, w: &[Vertex]) -> i8 {
        w.iter().fold(1, |s, &v| s * self.sign_of(v))
    }

    /// Signed comparison of two letter streams on their first `limit` letters.
    /// `None` when they agree on all of them.
    pub(crate) fn signed_cmp<A, B>(&self, a: A, b: B, limit: usize) -> Option<Ordering>
    where
        A: IntoIterator<Item = Vertex>,
        B: IntoIterator<Item = Vertex>,
    {
        let mut sign = 1i8;
        for (x, y) in a.into_iter().zip(b).take(limit) {
            if x != y {
                let raw = x.cmp(&y);
                return Some(if sign > 0 { raw } else { raw.reverse() });
            }
            sign *= self.sign_of(x);
        }
        None
    }

    /// The partial order on finite words.
    pub fn compare_words(&self, u: &[Vertex], v: &[Vertex]) -> Comparison {
        let common = u.len().min(v.len());
        match self.signed_cmp(u.iter().copied(), v.iter().copied(), common) {
            Some(o) => Comparison::from_ordering(o),
            None if u.len() == v.len() => Comparison::Equal,
            None => Comparison::Incomparable,
        }
    }

    /// Compare `u^∞` with `v^∞`. Sequences of periods `p`, `q` that agree on
    /// `p + q` letters are equal.
    pub fn compare_periodic(&self, u: &Word, v: &Word) -> Result<Comparison> {
        for w in [u, v] {
            if !self.is_periodic(w) {
                return Err(Error::NotPeriodic(w.to_string()));
            }
        }
        Ok(self.compare_periodic_unchecked(u, v))
    }

    /// As [`compare_periodic`](Self::compare_periodic) for words already known
    /// to be nonempty.
    pub(crate) fn compare_periodic_unchecked(&self, u: &[Vertex], v: &[Vertex]) -> Comparison {
        let limit = u.len() + v.len();
        let a = u.iter().copied().cycle();
        let b = v.iter().copied().cycle();
        match self.signed_cmp(a, b, limit) {
            Some(o) => Comparison::from_ordering(o),
            None => Comparison::Equal,
        }
    }

    /// Compare `σ^k(w^∞)` against `w^∞`.
    pub fn compare_shift(&self, w: &Word, k: usize) -> Result<Comparison> {
        if !self.is_periodic(w) {
            return Err(Error::NotPeriodic(w.to_string()));
        }
        if k >= w.len() {
            return Err(Error::PreconditionViolation(format!(
                "shift {k} out of range for word of length {}",
                w.len()
            )));
        }
        Ok(self.compare_shift_unchecked(w, k))
    }

    pub(crate) fn compare_shift_unchecked(&self, w: &[Vertex], k: usize) -> Comparison {
        let n = w.len();
        let shifted = (0..n).map(|i| w[(i + k) % n]);
        match self.signed_cmp(shifted, w.iter().copied(), n) {
            Some(o) => Comparison::from_ordering(o),
            None => Comparison::Equal,
        }
    }

    /// All consecutive pairs are edges, plus the closing pair when `wrap`.
    pub fn is_path_word(&self, w: &[Vertex], wrap: bool) -> bool {
        if w.iter().any(|&v| v >= self.vertex_count()) {
            return false;
        }
        let inner = w.windows(2).all(|p| self.has_edge(p[0], p[1]));
        let closing = match (wrap, w.first(), w.last()) {
            (true, Some(&first), Some(&last)) => self.has_edge(last, first),
            _ => true,
        };
        inner && closing
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn signs() {
        let g = SignedGraph::unimodal();
        assert_eq!(g.sign(&w("")), 1);
        assert_eq!(g.sign(&w("10")), -1);
        assert_eq!(g.sign(&w("1001")), 1);
    }

    #[test]
    fn finite_order() {
        let g = SignedGraph::unimodal();
        assert_eq!(g.compare_words(&w("0"), &w("1")), Comparison::Less);
        assert_eq!(g.compare_words(&w("01"), &w("10")), Comparison::Less);
        assert_eq!(g.compare_words(&w("10"), &w("11")), Comparison::Greater);
        assert_eq!(g.compare_words(&w("1"), &w("10")), Comparison::Incomparable);
        assert_eq!(g.compare_words(&w("101"), &w("101")), Comparison::Equal);
    }

    #[test]
    fn periodic_order() {
        let g = SignedGraph::unimodal();
        let cmp = |a: &str, b: &str| g.compare_periodic(&w(a), &w(b)).unwrap();
        assert_eq!(cmp("10", "1010"), Comparison::Equal);
        assert_eq!(cmp("10", "11"), Comparison::Greater);
        assert_eq!(cmp("101", "1001"), Comparison::Less);
        assert!(matches!(
            g.compare_periodic(&w("01"), &w("1")),
            Err(Error::NotPeriodic(_))
        ));
    }

    #[test]
    fn shifts() {
        let g = SignedGraph::unimodal();
        assert_eq!(g.compare_shift(&w("1001"), 0).unwrap(), Comparison::Equal);
        assert_eq!(g.compare_shift(&w("1001"), 3).unwrap(), Comparison::Less);
        assert_eq!(g.compare_shift(&w("110"), 1).unwrap(), Comparison::Greater);
        assert!(g.compare_shift(&w("110"), 3).is_err());
    }

    #[test]
    fn path_words() {
        let g = SignedGraph::unimodal();
        assert!(g.is_path_word(&w("0110100"), true));
        let tree = SignedGraph::builtin("tree").unwrap();
        assert!(!tree.is_path_word(&w("32"), false));
        assert!(tree.is_path_word(&w("310"), true));
        assert!(tree.is_path_word(&w("30210"), true));
        assert!(!tree.is_path_word(&w("31"), true));
        assert!(!tree.is_path_word(&w("39"), false));
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(w("1001").letters(), &[1, 0, 0, 1]);
        assert_eq!(w("10,3,0").letters(), &[10, 3, 0]);
        assert_eq!(w("10,3,0").to_string(), "10,3,0");
        assert_eq!(w("").len(), 0);
        assert!("1x".parse::<Word>().is_err());
        let g = SignedGraph::unimodal();
        assert!(Word::parse(&g, "12").is_err());
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(w("1010").primitive_root(), w("10"));
        assert_eq!(w("1001").primitive_root(), w("1001"));
        assert_eq!(w("111").primitive_root(), w("1"));
    }
}
