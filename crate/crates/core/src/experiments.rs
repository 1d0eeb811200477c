//! Teapot point clouds and the persistence experiment.

use std::io::Write;

use num_complex::Complex;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::classify::DEFAULT_ENUMERATION_CAP;
use crate::error::{Error, Result};
use crate::graph::SignedGraph;
use crate::spectral::{entropy, spectral_radius, spectrum};
use crate::word::{Comparison, Word};

/// Default suffix budget for the constructions behind persistence runs.
pub const DEFAULT_SEARCH_CAP: usize = 64;

/// Default band around the unit circle.
pub const DEFAULT_CIRCLE_TOL: f64 = 1e-8;

/// Run `f` on a pool capped by `KNEADKIT_THREADS` when that is set.
pub fn with_thread_cap<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    match std::env::var("KNEADKIT_THREADS") {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("KNEADKIT_THREADS={v} is not a count")))?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(e.to_string()))?;
            Ok(pool.install(f))
        }
        Err(_) => Ok(f()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TeapotRow {
    pub re: f64,
    pub im: f64,
    pub lambda: f64,
    pub word: Word,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TeapotCloud {
    pub system: String,
    pub max_len: usize,
    pub circle_tol: f64,
    pub words: usize,
    pub rows: Vec<TeapotRow>,
}

impl TeapotCloud {
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "re,im,lambda,word")?;
        for r in &self.rows {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{}",
                r.re, r.im, r.lambda, r.word
            )?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii")
    }
}

impl SignedGraph {
    /// Admissible words of length `1..=max_len`, shortest first, each length
    /// in increasing order.
    pub fn admissible_words(&self, max_len: usize) -> Result<Vec<Word>> {
        let mut out = Vec::new();
        for n in 1..=max_len {
            out.extend(
                self.enumerate_wn(n, DEFAULT_ENUMERATION_CAP)?
                    .into_iter()
                    .filter(|x| self.is_admissible_word(x)),
            );
        }
        Ok(out)
    }

    /// Every `(eigenvalue, spectral radius)` pair over admissible words up to
    /// `max_len`. Rows are ordered by word, then by eigenvalue `(re, im)`.
    pub fn teapot_sweep(&self, max_len: usize) -> Result<TeapotCloud> {
        if max_len == 0 {
            return Err(Error::PreconditionViolation(
                "max_len must be positive".into(),
            ));
        }
        let words = self.admissible_words(max_len)?;
        let per_word: Vec<Result<Vec<TeapotRow>>> = with_thread_cap(|| {
            words
                .par_iter()
                .map(|word| {
                    let m = self.markov_matrix(word)?;
                    let lambda = spectral_radius(&m.entries)?;
                    let spec = spectrum::<f64>(&m.entries, DEFAULT_CIRCLE_TOL)?;
                    Ok(spec
                        .eigenvalues
                        .iter()
                        .map(|z| TeapotRow {
                            re: z.re,
                            im: z.im,
                            lambda,
                            word: word.clone(),
                        })
                        .collect())
                })
                .collect()
        })?;
        let mut rows = Vec::new();
        for r in per_word {
            rows.extend(r?);
        }
        Ok(TeapotCloud {
            system: self.name().to_string(),
            max_len,
            circle_tol: DEFAULT_CIRCLE_TOL,
            words: words.len(),
            rows,
        })
    }

    /// Build `w'_n = w^n·c·v^n` for `n = 1..=n_max` and watch its entropy
    /// approach that of `w` while its spectrum approaches every eigenvalue of
    /// `v` strictly inside the unit circle.
    pub fn run_persistence(
        &self,
        w: &Word,
        v: &Word,
        eps: f64,
        n_max: usize,
        search_cap: usize,
    ) -> Result<PersistenceResult> {
        if !(eps > 0.0) {
            return Err(Error::PreconditionViolation(format!(
                "eps = {eps} must be positive"
            )));
        }
        if n_max == 0 {
            return Err(Error::PreconditionViolation(
                "n_max must be positive".into(),
            ));
        }
        for (name, x) in [("w", w), ("v", v)] {
            if !self.is_admissible_word(x) {
                return Err(Error::PreconditionViolation(format!(
                    "{name} = {x} is not admissible"
                )));
            }
        }
        if self.detect_renormalization(w)?.is_some() {
            return Err(Error::PreconditionViolation(format!(
                "w = {w} is renormalizable"
            )));
        }
        let mw = self.markov_matrix(w)?;
        if !mw.core().is_irreducible() {
            return Err(Error::PreconditionViolation(format!(
                "core incidence matrix of w = {w} is reducible"
            )));
        }
        if self.compare_periodic_unchecked(v, w) != Comparison::Less {
            return Err(Error::PreconditionViolation(format!(
                "v^∞ < w^∞ fails for v = {v}, w = {w}"
            )));
        }
        let target_entropy = entropy(&mw.entries)?;
        let mv = self.markov_matrix(v)?;
        let targets: Vec<Complex<f64>> = spectrum::<f64>(&mv.entries, DEFAULT_CIRCLE_TOL)?
            .inside
            .into_iter()
            .filter(|z| z.norm() > 0.0)
            .collect();

        let mut steps = Vec::new();
        let mut achieved_n = None;
        for n in 1..=n_max {
            let built = self.concat_bridge(w, v, n, search_cap)?;
            let m = self.markov_matrix(&built.word)?;
            let spec = spectrum::<f64>(&m.entries, DEFAULT_CIRCLE_TOL)?;
            let distances: Vec<f64> = targets
                .iter()
                .map(|z| {
                    spec.eigenvalues
                        .iter()
                        .map(|e| (e - z).norm())
                        .fold(f64::INFINITY, f64::min)
                })
                .collect();
            let max_distance = distances.iter().copied().fold(0.0, f64::max);
            let entropy_gap = (entropy(&m.entries)? - target_entropy).abs();
            steps.push(PersistenceStep {
                n,
                word: built.word,
                distances,
                max_distance,
                entropy_gap,
            });
            if max_distance < eps && entropy_gap < eps {
                achieved_n = Some(n);
                break;
            }
        }
        let achieved_epsilon = steps
            .iter()
            .map(|s| s.max_distance.max(s.entropy_gap))
            .fold(f64::INFINITY, f64::min);
        Ok(PersistenceResult {
            system: self.name().to_string(),
            w: w.clone(),
            v: v.clone(),
            eps,
            targets,
            target_entropy,
            steps,
            success: achieved_n.is_some(),
            achieved_n,
            achieved_epsilon,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PersistenceStep {
    pub n: usize,
    pub word: Word,
    /// Distance from each target to the nearest eigenvalue of the new word.
    pub distances: Vec<f64>,
    pub max_distance: f64,
    pub entropy_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceResult {
    pub system: String,
    pub w: Word,
    pub v: Word,
    pub eps: f64,
    /// Nonzero eigenvalues of `v` strictly inside the unit circle.
    pub targets: Vec<Complex<f64>>,
    pub target_entropy: f64,
    pub steps: Vec<PersistenceStep>,
    pub success: bool,
    pub achieved_n: Option<usize>,
    /// Smallest `max(distance, entropy gap)` seen over all steps.
    pub achieved_epsilon: f64,
}

impl Serialize for PersistenceResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("PersistenceResult", 10)?;
        s.serialize_field("system", &self.system)?;
        s.serialize_field("w", &self.w)?;
        s.serialize_field("v", &self.v)?;
        s.serialize_field("eps", &self.eps)?;
        let targets: Vec<[f64; 2]> = self.targets.iter().map(|z| [z.re, z.im]).collect();
        s.serialize_field("targets", &targets)?;
        s.serialize_field("target_entropy", &self.target_entropy)?;
        s.serialize_field("steps", &self.steps)?;
        s.serialize_field("success", &self.success)?;
        s.serialize_field("achieved_n", &self.achieved_n)?;
        s.serialize_field("achieved_epsilon", &self.achieved_epsilon)?;
        s.end()
    }
}
