//! Tuning pairs, the star operation `a ∗ v`, renormalization detection and the
//! bounded tunability audit.
//!
//! Exponent words `v` always live in the unimodal system `Γ₂`: letter `0`
//! selects the lower word of the pair, letter `1` the upper one.

use std::sync::OnceLock;

use serde::Serialize;

use crate::classify::{is_irreducible, DEFAULT_ENUMERATION_CAP};
use crate::error::{Error, Result};
use crate::graph::SignedGraph;
use crate::word::Word;

/// The exponent system `Γ₂`.
pub fn exponent_system() -> &'static SignedGraph {
    static GAMMA2: OnceLock<SignedGraph> = OnceLock::new();
    GAMMA2.get_or_init(SignedGraph::unimodal)
}

/// `(a, a')` with `a` admissible, `a' = Next(a)` extremal of sign `-1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TuningPair {
    pub lower: Word,
    pub upper: Word,
}

/// `w = pair ∗ exponent` with `pair.lower` nonrenormalizable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Renormalization {
    pub pair: TuningPair,
    pub exponent: Word,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TunabilityReport {
    pub system: String,
    pub w_min: Option<Word>,
    pub verified_up_to: usize,
    /// `Some(L)` when both conditions hold for every length up to `L`.
    pub tunable_up_to: Option<usize>,
    pub words_checked: usize,
    pub pairs_found: usize,
    pub violations: Vec<Word>,
}

impl SignedGraph {
    /// Shortest periodic word `m` with a single top letter and sign `-1` such
    /// that `m·N` is the smallest length-`|m|+1` word beginning a path from
    /// `N`.
    pub fn find_w_min(&self, max_len: usize) -> Option<Word> {
        let top = self.top();
        let mut prefix = vec![top];
        let mut sign = self.sign_of(top);
        // the greedy minimal path from N; its length-(L+1) prefix is the
        // minimal length-(L+1) word
        for len in 1..=max_len {
            let last = *prefix.last().expect("nonempty");
            let succ = self.successors(last);
            let next = if sign > 0 {
                *succ.iter().min().expect("validated graph")
            } else {
                *succ.iter().max().expect("validated graph")
            };
            if next == top {
                let candidate = Word::new(prefix.clone());
                let single_top = candidate.iter().filter(|&&v| v == top).count() == 1;
                if single_top && sign == -1 && self.is_periodic(&candidate) {
                    return Some(candidate);
                }
            }
            debug_assert_eq!(prefix.len(), len);
            prefix.push(next);
            sign *= self.sign_of(next);
        }
        None
    }

    /// Whether `w` is `w_min^k` for some `k ≥ 1`.
    pub fn is_min_power(&self, w: &Word) -> bool {
        match self.find_w_min(w.len()) {
            Some(m) => w.len().is_multiple_of(m.len()) && *w == m.pow(w.len() / m.len()),
            None => false,
        }
    }

    pub fn find_tuning_pair(&self, a: &Word) -> Result<Option<TuningPair>> {
        if !self.is_admissible_word(a) {
            return Err(Error::NotAdmissible(a.to_string()));
        }
        Ok(self.next_word(a)?.and_then(|upper| {
            (self.is_extremal(&upper) && self.sign(&upper) == -1).then(|| TuningPair {
                lower: a.clone(),
                upper,
            })
        }))
    }

    /// The tuning pair whose upper word is `upper`, if any.
    fn pair_below(&self, upper: &Word) -> Option<TuningPair> {
        if !self.is_extremal(upper) || self.sign(upper) != -1 {
            return None;
        }
        let lower = self.prev_word(upper).ok()??;
        self.is_admissible_word(&lower).then(|| TuningPair {
            lower,
            upper: upper.clone(),
        })
    }

    /// Block substitution `pair ∗ v`.
    pub fn tune(&self, pair: &TuningPair, v: &Word) -> Result<Word> {
        if !exponent_system().is_extremal(v) {
            return Err(Error::InvalidExponent(v.to_string()));
        }
        if self.next_word(&pair.lower)?.as_ref() != Some(&pair.upper)
            || !self.is_admissible_word(&pair.lower)
            || !self.is_extremal(&pair.upper)
            || self.sign(&pair.upper) != -1
        {
            return Err(Error::PreconditionViolation(format!(
                "({}, {}) is not a tuning pair",
                pair.lower, pair.upper
            )));
        }
        Ok(substitute(pair, v))
    }

    /// Shortest-base decomposition `w = a ∗ v` over all divisors of `|w|`.
    fn shortest_decomposition(&self, w: &Word) -> Option<Renormalization> {
        let n = w.len();
        for d in (1..=n).filter(|d| n.is_multiple_of(*d)) {
            let Some(pair) = self.pair_below(&w.prefix(d)) else {
                continue;
            };
            let exponent: Option<Vec<usize>> = w
                .chunks(d)
                .map(|block| {
                    if block == pair.lower.letters() {
                        Some(0)
                    } else if block == pair.upper.letters() {
                        Some(1)
                    } else {
                        None
                    }
                })
                .collect();
            let Some(exponent) = exponent.map(Word::new) else {
                continue;
            };
            if exponent_system().is_extremal(&exponent) {
                return Some(Renormalization { pair, exponent });
            }
        }
        None
    }

    /// `Some` iff the extremal word `w` is a tuning; the base returned is the
    /// shortest one. Admissible words are the usual callers, but tunings by
    /// exponents with an odd number of `1`s have sign `-1` and are accepted too.
    pub fn detect_renormalization(&self, w: &Word) -> Result<Option<Renormalization>> {
        if !self.is_extremal(w) {
            return Err(Error::NotExtremal(w.to_string()));
        }
        Ok(self.shortest_decomposition(w))
    }

    pub fn is_nonrenormalizable(&self, w: &Word) -> Result<bool> {
        Ok(self.detect_renormalization(w)?.is_none())
    }

    /// Write an extremal word of sign `-1` as `w' ∗ v` with `w'`
    /// nonrenormalizable.
    pub fn base_decomposition(&self, w: &Word) -> Result<Renormalization> {
        if !self.is_extremal(w) {
            return Err(Error::NotExtremal(w.to_string()));
        }
        if self.sign(w) != -1 {
            return Err(Error::PreconditionViolation(format!(
                "{w} has sign +1; base decomposition needs sign -1"
            )));
        }
        if self.is_min_power(w) {
            return Err(Error::MinimalWord(w.to_string()));
        }
        let found = self
            .shortest_decomposition(w)
            .ok_or_else(|| Error::NotTunable(w.to_string()))?;
        if substitute(&found.pair, &found.exponent) != *w {
            return Err(Error::CertificationFailure(format!(
                "re-tuning the base of {w} does not reproduce it"
            )));
        }
        if self.shortest_decomposition(&found.pair.lower).is_some() {
            return Err(Error::CertificationFailure(format!(
                "shortest base {} of {w} is renormalizable",
                found.pair.lower
            )));
        }
        Ok(found)
    }

    /// Audit both tunability conditions on every length up to `max_len`.
    pub fn check_tunable(&self, max_len: usize) -> Result<TunabilityReport> {
        let w_min = self.find_w_min(max_len);
        let mut violations = Vec::new();
        let mut words_checked = 0;
        let mut pairs_found = 0;
        for n in 1..=max_len {
            for a in self.enumerate_wn(n, DEFAULT_ENUMERATION_CAP)? {
                if self.sign(&a) != -1 || !is_irreducible(&a) || !self.is_extremal(&a) {
                    continue;
                }
                words_checked += 1;
                // irreducible, so w_min^k with k odd means k = 1
                if w_min.as_ref() == Some(&a) {
                    continue;
                }
                if self.pair_below(&a).is_some() {
                    pairs_found += 1;
                } else {
                    violations.push(a);
                }
            }
        }
        let tunable_up_to = (w_min.is_some() && violations.is_empty()).then_some(max_len);
        Ok(TunabilityReport {
            system: self.name().to_string(),
            w_min,
            verified_up_to: max_len,
            tunable_up_to,
            words_checked,
            pairs_found,
            violations,
        })
    }
}

pub(crate) fn substitute(pair: &TuningPair, v: &Word) -> Word {
    let mut out = Word::empty();
    for &letter in v.iter() {
        out.extend(if letter == 0 {
            &pair.lower
        } else {
            &pair.upper
        });
    }
    out
}
