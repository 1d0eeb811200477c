//! Certified constructions: admissible concatenations `w·v^n`, dominant
//! extensions `w^n·b`, and bridges `a^n·c·b^n`.
//!
//! Every constructor re-classifies its own output and returns
//! [`Error::CertificationFailure`] if the claimed property does not hold.

use std::collections::VecDeque;

use serde::Serialize;

use crate::classify::{is_irreducible, ClassificationReport};
use crate::error::{Error, Result};
use crate::graph::{SignedGraph, Vertex};
use crate::word::{Comparison, Word};

/// Frontier budget for the breadth-first fallbacks.
const SEARCH_NODE_BUDGET: usize = 200_000;

/// Common prefix-suffixes of an admissible word and their complements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Psrs {
    pub ps: Vec<Word>,
    pub rs: Vec<Word>,
}

/// How a dominant word was obtained.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Strategy {
    /// `w` was already dominant; `b = w_min²`.
    DominantBase,
    /// `b = w^(n'-n)·t^m` for a dominant `t` built from the base of `w`.
    Recursive {
        t: Word,
        extra_powers: usize,
        t_powers: usize,
    },
    /// Breadth-first suffix search.
    Search,
    /// Dominant word followed by admissible powers (`concat` and `bridge`).
    Concatenation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertifiedWord {
    pub word: Word,
    pub certificate: ClassificationReport,
    pub strategy: Strategy,
    pub construction_trace: Vec<String>,
}

fn violation(msg: impl Into<String>) -> Error {
    Error::PreconditionViolation(msg.into())
}

impl SignedGraph {
    pub fn compute_psrs(&self, w: &Word) -> Result<Psrs> {
        if !self.is_admissible_word(w) {
            return Err(Error::NotAdmissible(w.to_string()));
        }
        if !is_irreducible(w) {
            return Err(Error::NotIrreducible(w.to_string()));
        }
        let top = self.top();
        let mut ps = Vec::new();
        let mut rs = Vec::new();
        for k in 1..w.len() {
            if w[..k] == w[w.len() - k..] && w[k] == top {
                ps.push(w.prefix(k));
                rs.push(Word::new(w[k..].to_vec()));
            }
        }
        Ok(Psrs { ps, rs })
    }

    fn certify(&self, word: Word, strategy: Strategy, trace: Vec<String>) -> CertifiedWord {
        CertifiedWord {
            certificate: self.classify(&word),
            word,
            strategy,
            construction_trace: trace,
        }
    }

    /// `w·v^n`, certified admissible.
    pub fn concat_admissible(&self, w: &Word, v: &Word, n: usize) -> Result<CertifiedWord> {
        if !self.is_dominant(w) {
            return Err(violation(format!("w = {w} is not dominant")));
        }
        if self.sign(w) != 1 {
            return Err(violation(format!("w = {w} has sign -1")));
        }
        if !self.is_admissible_word(v) {
            return Err(violation(format!("v = {v} is not admissible")));
        }
        if !is_irreducible(v) {
            return Err(violation(format!("v = {v} is not irreducible")));
        }
        if self.compare_periodic_unchecked(v, w) != Comparison::Less {
            return Err(violation(format!("v^∞ < w^∞ fails for v = {v}, w = {w}")));
        }
        if n == 0 {
            return Err(violation("n must be positive"));
        }
        if n * v.len() >= w.len() {
            return Err(violation(format!(
                "n|v| = {} is not below |w| = {}",
                n * v.len(),
                w.len()
            )));
        }
        let word = w.concat(&v.pow(n));
        if !self.is_admissible_word(&word) {
            return Err(Error::CertificationFailure(format!(
                "{w}·({v})^{n} = {word} is not admissible"
            )));
        }
        let trace = vec![format!("w = {w} dominant, v = {v} admissible, n = {n}")];
        Ok(self.certify(word, Strategy::Concatenation, trace))
    }

    /// `w^n·b`, certified dominant.
    pub fn make_dominant(&self, w: &Word, n: usize, search_cap: usize) -> Result<CertifiedWord> {
        self.check_dominant_preconditions(w, n)?;
        let mut trace = Vec::new();
        let (b, strategy) = self.dominant_suffix(w, n, search_cap, w.len(), false, &mut trace)?;
        let word = w.pow(n).concat(&b);
        if !self.is_dominant(&word) {
            return Err(Error::CertificationFailure(format!(
                "{word} built from {w} is not dominant"
            )));
        }
        Ok(self.certify(word, strategy, trace))
    }

    fn check_dominant_preconditions(&self, w: &Word, n: usize) -> Result<()> {
        if !self.is_admissible_word(w) {
            return Err(violation(format!("{w} is not admissible")));
        }
        if !is_irreducible(w) {
            return Err(violation(format!("{w} is not irreducible")));
        }
        if self.detect_renormalization(w)?.is_some() {
            return Err(violation(format!("{w} is renormalizable")));
        }
        if self.is_min_power(w) {
            return Err(violation(format!("{w} is a power of the minimal word")));
        }
        if n == 0 {
            return Err(violation("n must be positive"));
        }
        Ok(())
    }

    /// Find `b` with `w^n·b` dominant (and of sign `+1` when requested).
    fn dominant_suffix(
        &self,
        w: &Word,
        n: usize,
        cap: usize,
        depth: usize,
        positive: bool,
        trace: &mut Vec<String>,
    ) -> Result<(Word, Strategy)> {
        let head = w.pow(n);
        let w_min = self
            .find_w_min(w.len())
            .ok_or_else(|| violation("system has no minimal word up to |w|"))?;

        if self.is_dominant(w) {
            let b = w_min.pow(2);
            if b.len() <= cap && self.is_dominant(&head.concat(&b)) {
                trace.push(format!("{w} is dominant; appending w_min² = {b}"));
                return Ok((b, Strategy::DominantBase));
            }
            trace.push(format!(
                "{w} is dominant but {w}^{n}·w_min² is not; continuing"
            ));
        }

        if depth > 0 {
            match self.recursive_suffix(w, n, cap, depth, positive, &w_min, trace) {
                Ok(Some(found)) => return Ok(found),
                Ok(None) => {}
                Err(e) => trace.push(format!("recursive construction for {w} failed: {e}")),
            }
        }

        trace.push(format!("searching suffixes of {w}^{n} up to length {cap}"));
        let b = self
            .search_dominant_suffix(&head, cap, positive)?
            .ok_or_else(|| Error::SearchExhausted {
                cap,
                context: format!("no dominant extension of {w}^{n}"),
            })?;
        trace.push(format!("search found b = {b}"));
        Ok((b, Strategy::Search))
    }

    /// Follow the inductive construction: split `w = v₀·z₀` at the complement
    /// `z₀` maximizing `z^∞`, take the nonrenormalizable base `a` of `v₀`,
    /// build a dominant `t` from `a`, then look for `w^{n'}·t^m` dominant.
    #[allow(clippy::too_many_arguments)]
    fn recursive_suffix(
        &self,
        w: &Word,
        n: usize,
        cap: usize,
        depth: usize,
        positive: bool,
        w_min: &Word,
        trace: &mut Vec<String>,
    ) -> Result<Option<(Word, Strategy)>> {
        let psrs = self.compute_psrs(w)?;
        let Some(z0) = psrs.rs.iter().cloned().reduce(|best, z| {
            if self.compare_periodic_unchecked(&z, &best) == Comparison::Greater {
                z
            } else {
                best
            }
        }) else {
            return Ok(None);
        };
        let v0 = w.prefix(w.len() - z0.len());
        trace.push(format!("{w} = {v0}·{z0} with z₀ maximal in RS"));
        let base = self.base_decomposition(&v0)?;
        let a = base.pair.lower.clone();
        trace.push(format!(
            "{v0} = ({}, {}) ∗ {}",
            base.pair.lower, base.pair.upper, base.exponent
        ));

        let above_rs = |t: &Word| {
            psrs.rs
                .iter()
                .all(|z| self.compare_periodic_unchecked(t, z) == Comparison::Greater)
        };
        let below_w = |t: &Word| match self.compare_words(t, w) {
            Comparison::Less => true,
            Comparison::Incomparable => self.compare_periodic_unchecked(t, w) == Comparison::Less,
            _ => false,
        };

        let mut t = None;
        if is_irreducible(&a) {
            for k in 1..=cap.max(1) {
                if k * a.len() > cap {
                    break;
                }
                let mut sub_trace = Vec::new();
                let Ok((c, _)) = self.dominant_suffix(&a, k, cap, depth - 1, false, &mut sub_trace)
                else {
                    break;
                };
                let cand = a.pow(k).concat(&c);
                if self.is_dominant(&cand) && above_rs(&cand) && below_w(&cand) {
                    trace.push(format!("t = {a}^{k}·{c} is dominant"));
                    t = Some(cand);
                    break;
                }
            }
        } else if a == w_min.pow(2)
            && base.pair.upper.iter().filter(|&&x| x == self.top()).count() == 1
        {
            let upper = &base.pair.upper;
            let mut j = 1;
            while upper.len() + j * w_min.len() <= cap {
                let cand = upper.concat(&w_min.pow(j));
                if self.is_dominant(&cand) && above_rs(&cand) && below_w(&cand) {
                    trace.push(format!("t = {upper}·w_min^{j} is dominant"));
                    t = Some(cand);
                    break;
                }
                j += 2;
            }
        } else {
            trace.push(format!("base {a} is reducible and not w_min²"));
        }
        let Some(t) = t else {
            return Ok(None);
        };

        // dovetail over n' + m
        let mut total = n + 1;
        loop {
            let mut any_within_cap = false;
            for extra in 0..total - n {
                let m = total - n - extra;
                let b = w.pow(extra).concat(&t.pow(m));
                if b.len() > cap {
                    continue;
                }
                any_within_cap = true;
                let word = w.pow(n).concat(&b);
                if (!positive || self.sign(&word) == 1) && self.is_dominant(&word) {
                    trace.push(format!("{w}^{}·t^{m} is dominant", n + extra));
                    return Ok(Some((
                        b,
                        Strategy::Recursive {
                            t,
                            extra_powers: extra,
                            t_powers: m,
                        },
                    )));
                }
            }
            if !any_within_cap {
                trace.push(format!("no dominant w^n'·t^m within cap {cap}"));
                return Ok(None);
            }
            total += 1;
        }
    }

    /// Breadth-first search for the shortest `b` making `head·b` dominant.
    ///
    /// Each node tracks the starts whose suffix still agrees with the prefix
    /// of the word; a start that compares greater prunes the node.
    fn search_dominant_suffix(
        &self,
        head: &Word,
        cap: usize,
        positive: bool,
    ) -> Result<Option<Word>> {
        let mut root = SuffixState::default();
        for &x in head.iter() {
            if !root.push(self, x) {
                return Ok(None);
            }
        }
        let mut frontier = VecDeque::from([root]);
        let mut visited = 0usize;
        while let Some(state) = frontier.pop_front() {
            visited += 1;
            if visited > SEARCH_NODE_BUDGET {
                return Err(Error::SearchExhausted {
                    cap,
                    context: format!("node budget {SEARCH_NODE_BUDGET} exhausted"),
                });
            }
            let added = state.letters.len() - head.len();
            if added > 0 && state.completes(self) {
                let word = Word::new(state.letters.clone());
                if (!positive || self.sign(&word) == 1) && self.is_dominant(&word) {
                    return Ok(Some(Word::new(state.letters[head.len()..].to_vec())));
                }
            }
            if added == cap {
                continue;
            }
            let last = *state.letters.last().expect("nonempty");
            for &x in self.successors(last) {
                let mut child = state.clone();
                if child.push(self, x) {
                    frontier.push_back(child);
                }
            }
        }
        Ok(None)
    }

    /// `a^n·c·b^n`, certified admissible.
    pub fn concat_bridge(
        &self,
        a: &Word,
        b: &Word,
        n: usize,
        search_cap: usize,
    ) -> Result<CertifiedWord> {
        if !self.is_admissible_word(a) {
            return Err(violation(format!("a = {a} is not admissible")));
        }
        if self.detect_renormalization(a)?.is_some() {
            return Err(violation(format!("a = {a} is renormalizable")));
        }
        if !self.is_admissible_word(b) {
            return Err(violation(format!("b = {b} is not admissible")));
        }
        if n == 0 {
            return Err(violation("n must be positive"));
        }
        if self.compare_periodic_unchecked(b, a) != Comparison::Less {
            return Err(violation(format!("b^∞ < a^∞ fails for a = {a}, b = {b}")));
        }
        let a_root = a.primitive_root();
        let a_mult = a.len() / a_root.len();
        if !self.is_admissible_word(&a_root) {
            return Err(violation(format!(
                "a = {a} is a power of {a_root}, which is not admissible"
            )));
        }
        if self.is_min_power(&a_root) {
            return Err(violation(format!("a = {a} is a power of the minimal word")));
        }
        let b_root = b.primitive_root();
        let b_mult = b.len() / b_root.len();

        let mut trace = Vec::new();
        if self.is_admissible_word(&b_root) {
            let max_powers = n + search_cap / a.len().max(1) + 1;
            for powers in n..=max_powers {
                let mut sub = Vec::new();
                let Ok((tail, _)) = self.dominant_suffix(
                    &a_root,
                    powers * a_mult,
                    search_cap,
                    a_root.len(),
                    true,
                    &mut sub,
                ) else {
                    continue;
                };
                let t = a_root.pow(powers * a_mult).concat(&tail);
                if self.compare_periodic_unchecked(b, &t) != Comparison::Less
                    || n * b.len() >= t.len()
                {
                    continue;
                }
                let out = self.concat_admissible(&t, &b_root, n * b_mult)?;
                trace.extend(sub);
                trace.push(format!("t = {a}^{powers}·{tail} is dominant with sign +1"));
                trace.push(format!(
                    "c = {}",
                    Word::new(out.word[n * a.len()..out.word.len() - n * b.len()].to_vec())
                ));
                trace.extend(out.construction_trace);
                return Ok(self.certify(out.word, Strategy::Concatenation, trace));
            }
            trace.push("no dominant positive t found; falling back to search".into());
        } else {
            trace.push(format!(
                "b = {b} has a non-admissible root; searching directly"
            ));
        }

        let c = self
            .search_bridge(a, b, n, search_cap)?
            .ok_or_else(|| Error::SearchExhausted {
                cap: search_cap,
                context: format!("no admissible {a}^{n}·c·{b}^{n}"),
            })?;
        let word = a.pow(n).concat(&c).concat(&b.pow(n));
        if !self.is_admissible_word(&word) {
            return Err(Error::CertificationFailure(format!(
                "{word} is not admissible"
            )));
        }
        trace.push(format!("search found c = {c}"));
        Ok(self.certify(word, Strategy::Search, trace))
    }

    fn search_bridge(&self, a: &Word, b: &Word, n: usize, cap: usize) -> Result<Option<Word>> {
        let head = a.pow(n);
        let tail = b.pow(n);
        let mut frontier: VecDeque<Vec<Vertex>> = VecDeque::from([Vec::new()]);
        let mut visited = 0usize;
        while let Some(c) = frontier.pop_front() {
            visited += 1;
            if visited > SEARCH_NODE_BUDGET {
                return Err(Error::SearchExhausted {
                    cap,
                    context: format!("node budget {SEARCH_NODE_BUDGET} exhausted"),
                });
            }
            let c_word = Word::new(c.clone());
            let word = head.concat(&c_word).concat(&tail);
            if self.is_admissible_word(&word) {
                return Ok(Some(c_word));
            }
            if c.len() == cap {
                continue;
            }
            let last = c.last().copied().unwrap_or(*head.last().expect("nonempty"));
            for &x in self.successors(last) {
                let mut next = c.clone();
                next.push(x);
                frontier.push_back(next);
            }
        }
        Ok(None)
    }
}

/// Partial dominance check state for the suffix search.
#[derive(Debug, Clone, Default)]
struct SuffixState {
    letters: Vec<Vertex>,
    /// `(start, sign of the matched segment)` for suffixes still equal to
    /// the corresponding prefix.
    pending: Vec<(usize, i8)>,
}

impl SuffixState {
    /// Append a letter; `false` if some suffix is now greater than the prefix.
    fn push(&mut self, g: &SignedGraph, x: Vertex) -> bool {
        let p = self.letters.len();
        let mut keep = Vec::with_capacity(self.pending.len() + 1);
        for &(start, sign) in &self.pending {
            let reference = self.letters[p - start];
            if x == reference {
                keep.push((start, sign * g.sign_of(x)));
            } else if (sign > 0) == (x > reference) {
                return false;
            }
        }
        if p >= 1 && x == g.top() {
            keep.push((p, g.sign_of(x)));
        }
        self.letters.push(x);
        self.pending = keep;
        true
    }

    /// Whether closing the word with the top letter makes every pending suffix
    /// strictly smaller than the prefix.
    fn completes(&self, g: &SignedGraph) -> bool {
        let last = *self.letters.last().expect("nonempty");
        if !g.has_edge(last, g.top()) {
            return false;
        }
        let len = self.letters.len();
        self.pending.iter().all(|&(start, sign)| {
            let reference = self.letters[len - start];
            reference != g.top() && sign < 0
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn psrs() {
        let g = SignedGraph::unimodal();
        let p = g.compute_psrs(&w("1001")).unwrap();
        assert!(p.ps.is_empty() && p.rs.is_empty());
        let p = g.compute_psrs(&w("101")).unwrap();
        assert!(p.ps.is_empty());
        assert!(matches!(
            g.compute_psrs(&w("10011001")),
            Err(Error::NotIrreducible(_))
        ));
        assert!(matches!(
            g.compute_psrs(&w("10")),
            Err(Error::NotAdmissible(_))
        ));
    }

    #[test]
    fn psrs_matches_dominance() {
        let g = SignedGraph::unimodal();
        for n in 1..=10 {
            for x in g.enumerate_wn(n, 1 << 12).unwrap() {
                if g.is_admissible_word(&x) && is_irreducible(&x) {
                    let p = g.compute_psrs(&x).unwrap();
                    assert_eq!(p.ps.is_empty(), g.is_dominant(&x), "{x}");
                    for (v, z) in p.ps.iter().zip(&p.rs) {
                        assert_eq!(v.concat(z), x);
                    }
                }
            }
        }
    }

    #[test]
    fn concatenation() {
        let g = SignedGraph::unimodal();
        let c = g.concat_admissible(&w("1001"), &w("101"), 1).unwrap();
        assert_eq!(c.word, w("1001101"));
        assert!(c.certificate.admissible);
        assert!(matches!(
            g.concat_admissible(&w("1001"), &w("101"), 2),
            Err(Error::PreconditionViolation(_))
        ));
        assert!(matches!(
            g.concat_admissible(&w("101"), &w("1001"), 1),
            Err(Error::PreconditionViolation(_))
        ));
    }

    #[test]
    fn dominant_extensions() {
        let g = SignedGraph::unimodal();
        let d = g.make_dominant(&w("101"), 1, 64).unwrap();
        assert_eq!(d.word, w("10111"));
        assert_eq!(d.strategy, Strategy::DominantBase);
        let d = g.make_dominant(&w("1001"), 1, 64).unwrap();
        assert!(d.certificate.dominant);
        assert!(d.word.starts_with(&[1, 0, 0, 1]));
        assert!(matches!(
            g.make_dominant(&w("11"), 1, 64),
            Err(Error::PreconditionViolation(_))
        ));
    }

    #[test]
    fn suffix_search_finds_shortest() {
        let g = SignedGraph::unimodal();
        let b = g
            .search_dominant_suffix(&w("101"), 8, false)
            .unwrap()
            .unwrap();
        // brute force over all b of length ≤ |b|
        for len in 1..b.len() {
            for bits in 0..(1u32 << len) {
                let tail: Vec<usize> = (0..len).map(|i| ((bits >> i) & 1) as usize).collect();
                let cand = w("101").concat(&Word::new(tail));
                assert!(!g.is_dominant(&cand), "{cand} is shorter");
            }
        }
        assert!(g.is_dominant(&w("101").concat(&b)));
    }

    #[test]
    fn bridges() {
        let g = SignedGraph::unimodal();
        let out = g.concat_bridge(&w("1001"), &w("101"), 1, 64).unwrap();
        assert!(out.certificate.admissible);
        assert!(out.word.starts_with(&[1, 0, 0, 1]));
        assert!(out.word.ends_with(&[1, 0, 1]));
        let out = g.concat_bridge(&w("1001"), &w("101"), 2, 64).unwrap();
        assert!(out.certificate.admissible);
        assert!(out.word.starts_with(&[1, 0, 0, 1, 1, 0, 0, 1]));
        assert!(out.word.ends_with(&[1, 0, 1, 1, 0, 1]));
        assert!(matches!(
            g.concat_bridge(&w("10001001"), &w("101"), 1, 64),
            Err(Error::PreconditionViolation(_))
        ));
    }
}
