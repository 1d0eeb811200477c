//! Word classes: periodic, irreducible, extremal, admissible, dominant; the
//! ordered sets `W_n` of periodic words of a fixed length and their
//! successor/predecessor maps.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{SignedGraph, Vertex};
use crate::word::{Comparison, Word};

/// Default cap on the size of an enumerated `W_n`.
pub const DEFAULT_ENUMERATION_CAP: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailedPredicate {
    Periodic,
    Extremal,
    Dominant,
}

/// Smallest index at which a defining inequality fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub predicate: FailedPredicate,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub word: Word,
    pub sign: i8,
    pub periodic: bool,
    pub irreducible: bool,
    pub extremal: bool,
    pub admissible: bool,
    pub dominant: bool,
    pub failure_witness: Option<Witness>,
}

impl SignedGraph {
    /// `w^∞ ∈ Σ` and `w` starts with the top letter.
    pub fn is_periodic(&self, w: &[Vertex]) -> bool {
        w.first() == Some(&self.top()) && self.is_path_word(w, true)
    }

    pub fn is_extremal(&self, w: &[Vertex]) -> bool {
        self.periodic_failure(w).is_none() && self.extremal_failure(w).is_none()
    }

    pub fn is_admissible_word(&self, w: &[Vertex]) -> bool {
        self.is_extremal(w) && self.sign(w) == 1
    }

    pub fn is_dominant(&self, w: &[Vertex]) -> bool {
        self.is_periodic(w) && self.dominance_failure(w).is_none()
    }

    fn periodic_failure(&self, w: &[Vertex]) -> Option<Witness> {
        if self.is_periodic(w) {
            return None;
        }
        let k = if w.first() != Some(&self.top()) {
            0
        } else {
            // first pair (cyclically) that is not an edge
            (0..w.len())
                .find(|&i| !self.has_edge(w[i], w[(i + 1) % w.len()]))
                .map_or(0, |i| i + 1)
        };
        Some(Witness {
            predicate: FailedPredicate::Periodic,
            k,
        })
    }

    /// Smallest `k` with `σ^k(w^∞) > w^∞`.
    fn extremal_failure(&self, w: &[Vertex]) -> Option<Witness> {
        (1..w.len())
            .find(|&k| self.compare_shift_unchecked(w, k) == Comparison::Greater)
            .map(|k| Witness {
                predicate: FailedPredicate::Extremal,
                k,
            })
    }

    /// Smallest `k ∈ [2, |w|]` with `Suff_k(wN) ≮ Pre_k(w)`.
    fn dominance_failure(&self, w: &[Vertex]) -> Option<Witness> {
        let mut extended = w.to_vec();
        extended.push(self.top());
        let n = extended.len();
        (2..=w.len())
            .find(|&k| self.compare_words(&extended[n - k..], &w[..k]) != Comparison::Less)
            .map(|k| Witness {
                predicate: FailedPredicate::Dominant,
                k,
            })
    }

    pub fn classify(&self, w: &Word) -> ClassificationReport {
        let periodic_fail = self.periodic_failure(w);
        let periodic = periodic_fail.is_none();
        let extremal_fail = if periodic {
            self.extremal_failure(w)
        } else {
            None
        };
        let extremal = periodic && extremal_fail.is_none();
        let dominant_fail = if periodic {
            self.dominance_failure(w)
        } else {
            None
        };
        let dominant = periodic && dominant_fail.is_none();
        let sign = self.sign(w);
        ClassificationReport {
            word: w.clone(),
            sign,
            periodic,
            irreducible: is_irreducible(w),
            extremal,
            admissible: extremal && sign == 1,
            dominant,
            failure_witness: periodic_fail.or(extremal_fail).or(dominant_fail),
        }
    }

    /// Periodic words of length `n` in ascending order.
    pub fn enumerate_wn(&self, n: usize, cap: usize) -> Result<Vec<Word>> {
        if n == 0 {
            return Err(Error::PreconditionViolation("n must be at least 1".into()));
        }
        let table = self.completion_table(n);
        let mut out = Vec::new();
        let mut current = vec![self.top()];
        if table[n - 1][self.top()] {
            self.enumerate_rec(&table, n, &mut current, &mut out, cap)?;
        }
        out.sort_by(|a, b| {
            self.compare_words(a, b)
                .to_ordering()
                .unwrap_or(Ordering::Equal)
        });
        Ok(out)
    }

    fn enumerate_rec(
        &self,
        table: &[Vec<bool>],
        n: usize,
        current: &mut Vec<Vertex>,
        out: &mut Vec<Word>,
        cap: usize,
    ) -> Result<()> {
        if current.len() == n {
            if out.len() >= cap {
                return Err(Error::ResourceBound(format!(
                    "W_{n} has more than {cap} elements"
                )));
            }
            out.push(Word::new(current.clone()));
            return Ok(());
        }
        let remaining = n - current.len() - 1;
        let last = *current.last().expect("nonempty");
        for &c in self.successors(last) {
            if table[remaining][c] {
                current.push(c);
                self.enumerate_rec(table, n, current, out, cap)?;
                current.pop();
            }
        }
        Ok(())
    }

    /// Extend `prefix` by `remaining` letters to the smallest (or largest)
    /// periodic word. The prefix must admit some completion.
    fn extreme_completion(
        &self,
        table: &[Vec<bool>],
        prefix: &mut Vec<Vertex>,
        remaining: usize,
        largest: bool,
    ) {
        let mut sign = self.sign(prefix);
        for r in (0..remaining).rev() {
            let last = *prefix.last().expect("nonempty prefix");
            let feasible = self
                .successors(last)
                .iter()
                .copied()
                .filter(|&c| table[r][c]);
            // want the smallest sequence: smallest letter under +, largest under -
            let pick_max = (sign > 0) == largest;
            let c = if pick_max {
                feasible.max()
            } else {
                feasible.min()
            }
            .expect("completion table guarantees a feasible successor");
            prefix.push(c);
            sign *= self.sign_of(c);
        }
    }

    /// Smallest element of `W_n`, if `W_n` is nonempty.
    pub fn min_wn(&self, n: usize) -> Option<Word> {
        self.extreme_wn(n, false)
    }

    pub fn max_wn(&self, n: usize) -> Option<Word> {
        self.extreme_wn(n, true)
    }

    fn extreme_wn(&self, n: usize, largest: bool) -> Option<Word> {
        if n == 0 {
            return None;
        }
        let table = self.completion_table(n);
        if !table[n - 1][self.top()] {
            return None;
        }
        let mut prefix = vec![self.top()];
        self.extreme_completion(&table, &mut prefix, n - 1, largest);
        Some(Word::new(prefix))
    }

    /// Immediate successor of `w` in `W_{|w|}`.
    pub fn next_word(&self, w: &Word) -> Result<Option<Word>> {
        self.neighbour(w, true)
    }

    /// Immediate predecessor of `w` in `W_{|w|}`.
    pub fn prev_word(&self, w: &Word) -> Result<Option<Word>> {
        self.neighbour(w, false)
    }

    /// Change the rightmost position that can move in the requested
    /// direction by the smallest possible step, then complete extremally.
    fn neighbour(&self, w: &Word, upward: bool) -> Result<Option<Word>> {
        if !self.is_periodic(w) {
            return Err(Error::NotPeriodic(w.to_string()));
        }
        let n = w.len();
        let table = self.completion_table(n);
        for i in (1..n).rev() {
            let prefix_sign = self.sign(&w[..i]);
            let remaining = n - 1 - i;
            let current = w[i];
            // raw letter direction that moves the sequence up (or down)
            let raw_up = (prefix_sign > 0) == upward;
            let mut candidates: Vec<Vertex> = self
                .successors(w[i - 1])
                .iter()
                .copied()
                .filter(|&c| if raw_up { c > current } else { c < current })
                .filter(|&c| table[remaining][c])
                .collect();
            if raw_up {
                candidates.sort_unstable();
            } else {
                candidates.sort_unstable_by(|a, b| b.cmp(a));
            }
            if let Some(&c) = candidates.first() {
                let mut prefix = w[..i].to_vec();
                prefix.push(c);
                // successor completes minimally, predecessor maximally
                self.extreme_completion(&table, &mut prefix, remaining, !upward);
                return Ok(Some(Word::new(prefix)));
            }
        }
        Ok(None)
    }
}

/// Not a proper power of a shorter word.
pub fn is_irreducible(w: &[Vertex]) -> bool {
    let n = w.len();
    if n == 0 {
        return false;
    }
    !(1..n).any(|d| n.is_multiple_of(d) && (d..n).all(|i| w[i] == w[i - d]))
}
