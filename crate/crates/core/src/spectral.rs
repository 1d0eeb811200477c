//! Markov partitions of the shift space below a periodic kneading sequence,
//! their incidence matrices, entropy, spectra and zeta denominators, and the
//! kneading polynomial `F_w`.
//!
//! The space attached to an extremal word `w` is
//! `X_w = {b ∈ Σ : σ^k(b) ≤ w^∞ for all k ≥ 0}`. Its partition points are the
//! distinct rotations of `w^∞` together with the minimum of `Σ`; pieces are the
//! nonempty intersections of consecutive partition intervals with the
//! one-letter cylinders. Endpoints are eventually periodic sequences and every
//! comparison between them is exact.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_traits::{Float, One, Signed, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{SignedGraph, Vertex};
use crate::matrix::Matrix;
use crate::poly::Poly;
use crate::roots::{canonicalize, polynomial_roots};
use crate::word::Word;
use crate::IntPoly;

/// An eventually periodic sequence `pre·cycle^∞`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Seq {
    pub pre: Vec<Vertex>,
    pub cycle: Vec<Vertex>,
}

impl Seq {
    pub fn periodic(w: &[Vertex]) -> Self {
        assert!(!w.is_empty(), "empty period");
        Seq {
            pre: Vec::new(),
            cycle: w.to_vec(),
        }
    }

    pub fn letters(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.pre.iter().chain(self.cycle.iter().cycle()).copied()
    }

    pub fn first(&self) -> Vertex {
        self.pre.first().copied().unwrap_or(self.cycle[0])
    }

    pub fn shift(&self) -> Seq {
        if self.pre.is_empty() {
            let mut cycle = self.cycle.clone();
            cycle.rotate_left(1);
            Seq {
                pre: Vec::new(),
                cycle,
            }
        } else {
            Seq {
                pre: self.pre[1..].to_vec(),
                cycle: self.cycle.clone(),
            }
        }
    }
}

impl fmt::Display for Seq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wide = self.pre.iter().chain(&self.cycle).any(|&v| v >= 10);
        let join = |xs: &[Vertex]| {
            let parts: Vec<String> = xs.iter().map(ToString::to_string).collect();
            parts.join(if wide { "," } else { "" })
        };
        write!(f, "{}({})", join(&self.pre), join(&self.cycle))
    }
}

impl Serialize for Seq {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// One piece `[lo, hi] ⊂ J_interval ∩ I_vertex`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Piece {
    pub interval: usize,
    pub vertex: Vertex,
    pub lo: Seq,
    pub hi: Seq,
}

impl Piece {
    pub fn label(&self) -> String {
        format!("J{}∩I{}", self.interval, self.vertex)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MarkovPartition {
    pub word: Word,
    /// Distinct rotations of `w^∞` in decreasing order, then the minimum of `Σ`.
    pub orbit_points: Vec<Seq>,
    /// Number of distinct rotations, `m`.
    pub rotations: usize,
    pub pieces: Vec<Piece>,
    /// Single-point intersections, dropped.
    pub degenerate: Vec<Piece>,
}

/// Square 0/1 matrix on the surviving pieces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IncidenceMatrix {
    pub entries: Matrix<i64>,
    pub labels: Vec<Piece>,
    /// Pieces removed because their row or column vanished; this only
    /// removes zero eigenvalues.
    pub trimmed: Vec<Piece>,
    /// Intervals `J_1..J_k` lying between the largest and smallest orbit
    /// points; the interval below the orbit, down to `min Σ`, is not counted.
    pub orbit_intervals: usize,
}

impl IncidenceMatrix {
    pub fn from_matrix(entries: Matrix<i64>) -> Self {
        assert!(entries.is_square(), "square matrix required");
        IncidenceMatrix {
            entries,
            labels: Vec::new(),
            trimmed: Vec::new(),
            orbit_intervals: usize::MAX,
        }
    }

    pub fn size(&self) -> usize {
        self.entries.rows()
    }

    /// Restriction to the pieces between the smallest and largest orbit
    /// points, closed under the transition relation. Its rows only point back
    /// into the same set, so it is a diagonal block of a block-triangular form
    /// and its spectrum is a sub-multiset of the full one. A matrix without
    /// piece labels is its own core.
    pub fn core(&self) -> IncidenceMatrix {
        let n = self.size();
        let mut seen: Vec<bool> = (0..n)
            .map(|k| {
                self.labels
                    .get(k)
                    .is_none_or(|p| p.interval <= self.orbit_intervals.max(1))
            })
            .collect();
        let mut stack: Vec<usize> = (0..n).filter(|&k| seen[k]).collect();
        while let Some(r) = stack.pop() {
            for c in 0..n {
                if *self.entries.get(r, c) != 0 && !seen[c] {
                    seen[c] = true;
                    stack.push(c);
                }
            }
        }
        let keep: Vec<usize> = (0..n).filter(|&k| seen[k]).collect();
        IncidenceMatrix {
            entries: self.entries.select(&keep, &keep),
            labels: keep.iter().map(|&k| self.labels[k].clone()).collect(),
            trimmed: self
                .trimmed
                .iter()
                .cloned()
                .chain((0..n).filter(|&k| !seen[k]).map(|k| self.labels[k].clone()))
                .collect(),
            orbit_intervals: self.orbit_intervals,
        }
    }

    pub fn is_irreducible(&self) -> bool {
        if self.size() == 0 {
            return false;
        }
        let blocks = scc_blocks(&self.entries);
        blocks.len() == 1 && {
            let b = &blocks[0];
            b.len() > 1 || *self.entries.get(b[0], b[0]) != 0
        }
    }
}

impl SignedGraph {
    /// Signed comparison of eventually periodic sequences.
    pub fn compare_seq(&self, a: &Seq, b: &Seq) -> Ordering {
        let limit = a.pre.len().max(b.pre.len()) + a.cycle.len() + b.cycle.len();
        self.signed_cmp(a.letters(), b.letters(), limit)
            .unwrap_or(Ordering::Equal)
    }

    /// Greatest (or least) sequence of `Σ` beginning with `start`.
    pub fn greedy_extreme(&self, start: Vertex, maximize: bool) -> Seq {
        let mut letters = vec![start];
        let mut sign = self.sign_of(start);
        let mut seen: HashMap<(Vertex, i8), usize> = HashMap::from([((start, sign), 0)]);
        loop {
            let succ = self.successors(*letters.last().expect("nonempty"));
            let next = if (sign > 0) == maximize {
                *succ.last().expect("validated graph")
            } else {
                succ[0]
            };
            sign *= self.sign_of(next);
            if let Some(&pos) = seen.get(&(next, sign)) {
                return Seq {
                    pre: letters[..pos].to_vec(),
                    cycle: letters[pos..].to_vec(),
                };
            }
            seen.insert((next, sign), letters.len());
            letters.push(next);
        }
    }

    /// The least element of `Σ`; it begins with the smallest letter.
    pub fn minimal_sequence(&self) -> Seq {
        self.greedy_extreme(0, false)
    }

    pub fn maximal_sequence(&self) -> Seq {
        self.greedy_extreme(self.top(), true)
    }

    pub fn markov_partition(&self, w: &Word) -> Result<MarkovPartition> {
        if !self.is_extremal(w) {
            return Err(Error::NotExtremal(w.to_string()));
        }
        let mut points: Vec<Seq> = (0..w.len()).map(|k| Seq::periodic(&w.rotate(k))).collect();
        points.sort_by(|a, b| self.compare_seq(b, a));
        points.dedup_by(|a, b| self.compare_seq(a, b) == Ordering::Equal);
        let rotations = points.len();
        let min = self.minimal_sequence();
        if self.compare_seq(points.last().expect("nonempty"), &min) == Ordering::Greater {
            points.push(min);
        }

        let lows: Vec<Seq> = (0..self.vertex_count())
            .map(|j| self.greedy_extreme(j, false))
            .collect();
        let highs: Vec<Seq> = (0..self.vertex_count())
            .map(|j| self.greedy_extreme(j, true))
            .collect();
        let mut pieces = Vec::new();
        let mut degenerate = Vec::new();
        for (i, pair) in points.windows(2).enumerate() {
            let (upper, lower) = (&pair[0], &pair[1]);
            for j in (0..self.vertex_count()).rev() {
                let lo = if self.compare_seq(lower, &lows[j]) == Ordering::Greater {
                    lower
                } else {
                    &lows[j]
                };
                let hi = if self.compare_seq(upper, &highs[j]) == Ordering::Less {
                    upper
                } else {
                    &highs[j]
                };
                let piece = Piece {
                    interval: i + 1,
                    vertex: j,
                    lo: lo.clone(),
                    hi: hi.clone(),
                };
                match self.compare_seq(lo, hi) {
                    Ordering::Less => pieces.push(piece),
                    Ordering::Equal => degenerate.push(piece),
                    Ordering::Greater => {}
                }
            }
        }
        Ok(MarkovPartition {
            word: w.clone(),
            orbit_points: points,
            rotations,
            pieces,
            degenerate,
        })
    }

    /// Entry `(P, Q)` is 1 when `σ(P)` covers `Q`. Images are computed from the
    /// endpoints (reversed on negative cylinders) and capped at `w^∞`.
    pub fn incidence_matrix(&self, p: &MarkovPartition) -> IncidenceMatrix {
        let top = &p.orbit_points[0];
        let n = p.pieces.len();
        let mut full = vec![vec![0i64; n]; n];
        for (r, piece) in p.pieces.iter().enumerate() {
            let (mut lo, mut hi) = (piece.lo.shift(), piece.hi.shift());
            if self.sign_of(piece.vertex) < 0 {
                std::mem::swap(&mut lo, &mut hi);
            }
            if self.compare_seq(&hi, top) == Ordering::Greater {
                hi = top.clone();
            }
            for (c, q) in p.pieces.iter().enumerate() {
                if self.has_edge(piece.vertex, q.vertex)
                    && self.compare_seq(&lo, &q.lo) != Ordering::Greater
                    && self.compare_seq(&q.hi, &hi) != Ordering::Greater
                {
                    full[r][c] = 1;
                }
            }
        }

        let mut alive = vec![true; n];
        loop {
            let mut changed = false;
            for k in 0..n {
                if !alive[k] {
                    continue;
                }
                let row = (0..n).any(|c| alive[c] && full[k][c] != 0);
                let col = (0..n).any(|r| alive[r] && full[r][k] != 0);
                if !row || !col {
                    alive[k] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let keep: Vec<usize> = (0..n).filter(|&k| alive[k]).collect();
        let entries = Matrix::from_rows(
            keep.iter()
                .map(|&r| keep.iter().map(|&c| full[r][c]).collect())
                .collect(),
        );
        IncidenceMatrix {
            entries,
            labels: keep.iter().map(|&k| p.pieces[k].clone()).collect(),
            trimmed: (0..n)
                .filter(|&k| !alive[k])
                .map(|k| p.pieces[k].clone())
                .collect(),
            orbit_intervals: p.rotations - 1,
        }
    }

    pub fn markov_matrix(&self, w: &Word) -> Result<IncidenceMatrix> {
        Ok(self.incidence_matrix(&self.markov_partition(w)?))
    }

    /// Integer polynomials `p_0..p_N`, coprime, solving
    /// `λ p_i = Σ_{(i,j) ∈ E} p_j` for `i < N`, with `p_N` having a positive
    /// leading coefficient.
    pub fn elimination_polys(&self) -> Result<Vec<IntPoly>> {
        let n = self.vertex_count();
        let top = self.top();
        let lambda: IntPoly = Poly::x();
        let entry = |i: usize, k: usize| -> IntPoly {
            let mut e = if self.has_edge(i, k) {
                -IntPoly::one()
            } else {
                IntPoly::zero()
            };
            if i == k {
                e = e + lambda.clone();
            }
            e
        };
        let mut polys = Vec::with_capacity(n);
        for k in 0..n {
            let cols: Vec<usize> = (0..n).filter(|&c| c != k).collect();
            let minor = Matrix::from_rows(
                (0..top)
                    .map(|i| cols.iter().map(|&c| entry(i, c)).collect())
                    .collect(),
            );
            let det = minor.determinant();
            polys.push(if k % 2 == 0 { det } else { -det });
        }
        if polys.iter().all(Zero::is_zero) {
            let at = BigInt::from(1_000_003);
            let rows: Vec<Vec<BigInt>> = (0..top)
                .map(|i| (0..n).map(|c| entry(i, c).eval(&at)).collect())
                .collect();
            return Err(Error::DegenerateKernel(n - integer_rank(rows)));
        }
        let g = polys.iter().fold(IntPoly::zero(), |acc, p| acc.gcd(p));
        let mut polys: Vec<IntPoly> = polys
            .iter()
            .map(|p| p.div_exact(&g).expect("gcd divides"))
            .collect();
        let lead = polys
            .iter()
            .rev()
            .find_map(|p| p.leading().cloned())
            .expect("some nonzero");
        if lead.is_negative() {
            polys = polys.into_iter().map(|p| -p).collect();
        }
        Ok(polys)
    }

    pub fn kneading_poly(&self, w: &Word) -> Result<IntPoly> {
        self.kneading_poly_with(w, KneadingConvention::Oriented)
    }

    /// `F_w = F_{w_{n-1},w_0} ∘ … ∘ F_{w_0,w_1}(p_N) - p_N`.
    pub fn kneading_poly_with(&self, w: &Word, convention: KneadingConvention) -> Result<IntPoly> {
        if !self.is_periodic(w) {
            return Err(Error::NotPeriodic(w.to_string()));
        }
        let p = self.elimination_polys()?;
        let lambda: IntPoly = Poly::x();
        let top = self.top();
        let mut x = p[top].clone();
        for t in 0..w.len() {
            let i = w[t];
            let j = w.periodic_at(t + 1);
            let sum = |pred: &dyn Fn(usize) -> bool| {
                self.successors(i)
                    .iter()
                    .filter(|&&k| pred(k))
                    .fold(IntPoly::zero(), |acc, &k| acc + p[k].clone())
            };
            x = if self.sign_of(i) > 0 {
                lambda.clone() * x - sum(&|k| k < j)
            } else {
                match convention {
                    KneadingConvention::Oriented => sum(&|k| k >= j) - lambda.clone() * x,
                    KneadingConvention::AsPrinted => {
                        p[j].clone() - lambda.clone() * (p[i].clone() - x) + sum(&|k| k > j)
                    }
                }
            };
        }
        Ok(x - p[top].clone())
    }

    /// Compare the nonzero off-circle roots of `F_w` with the nonzero
    /// off-circle eigenvalues of the incidence matrix of `w`. Any extremal
    /// word is accepted.
    pub fn match_off_circle(&self, w: &Word, tol: f64) -> Result<MatchReport> {
        if !self.is_extremal(w) {
            return Err(Error::NotExtremal(w.to_string()));
        }
        let f = self.kneading_poly(w)?;
        let m = self.markov_matrix(w)?;
        let off = |z: &Complex<f64>| z.norm() != 0.0 && (z.norm() - 1.0).abs() > tol;
        let degenerate = f.is_zero();
        let roots: Vec<Complex<f64>> = if degenerate {
            Vec::new()
        } else {
            int_poly_roots::<f64>(&f.strip_zero_roots())?
                .into_iter()
                .filter(off)
                .collect()
        };
        let spec = spectrum::<f64>(&m.entries, tol)?;
        let eigs: Vec<Complex<f64>> = spec.eigenvalues.iter().copied().filter(off).collect();
        let (pairs, max_distance) = min_cost_matching(&roots, &eigs);
        let hausdorff = hausdorff(&roots, &eigs);
        Ok(MatchReport {
            word: w.clone(),
            kneading_poly: f,
            matrix_irreducible: m.is_irreducible(),
            core_irreducible: m.core().is_irreducible(),
            degenerate,
            kneading_roots: roots,
            eigenvalues: eigs,
            pairs,
            max_distance,
            hausdorff,
            circle_tol: tol,
        })
    }
}

/// Negative-orientation branch of `F_{i,j}`.
///
/// `Oriented` measures positions in every cylinder from its least element, so
/// a reversing branch sends `x` to `Σ_{k ≥ j} p_k - λx`. `AsPrinted` is the
/// variant `p_j - λ(p_i - x) + Σ_{k > j} p_k`, which coincides with the
/// orientation-preserving branch whenever `i < N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KneadingConvention {
    #[default]
    Oriented,
    AsPrinted,
}

fn integer_rank(mut rows: Vec<Vec<BigInt>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, piv);
        for r in rank + 1..rows.len() {
            if rows[r][c].is_zero() {
                continue;
            }
            let (a, b) = (rows[rank][c].clone(), rows[r][c].clone());
            for k in 0..cols {
                rows[r][k] = &rows[r][k] * &a - &rows[rank][k] * &b;
            }
        }
        rank += 1;
    }
    rank
}

/// Strongly connected components, each sorted, ordered by smallest member.
pub fn scc_blocks(m: &Matrix<i64>) -> Vec<Vec<usize>> {
    let n = m.rows();
    let mut g = DiGraph::<(), ()>::with_capacity(n, 0);
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for i in 0..n {
        for j in 0..n {
            if *m.get(i, j) != 0 {
                g.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut v: Vec<usize> = c.into_iter().map(|x| x.index()).collect();
            v.sort_unstable();
            v
        })
        .collect();
    blocks.sort();
    blocks
}

/// `det(xI - M)`; the product of the characteristic polynomials of the
/// diagonal blocks of the strongly connected decomposition.
pub fn char_poly(m: &Matrix<i64>) -> IntPoly {
    char_poly_factors(m)
        .into_iter()
        .fold(IntPoly::one(), |acc, f| acc * f)
}

fn char_poly_factors(m: &Matrix<i64>) -> Vec<IntPoly> {
    scc_blocks(m)
        .iter()
        .map(|b| m.select(b, b).charpoly())
        .collect()
}

/// `det(I - tM) = t^n·charpoly(1/t)`.
pub fn zeta_denominator(m: &Matrix<i64>) -> IntPoly {
    let cp = char_poly(m);
    Poly::new(cp.coeffs().iter().rev().cloned().collect())
}

/// All complex roots with multiplicity, via square-free factorization.
pub fn int_poly_roots<F: Float>(p: &IntPoly) -> Result<Vec<Complex<F>>> {
    if p.is_zero() {
        return Err(Error::ConvergenceFailure("zero polynomial".into()));
    }
    let zeros = p.zero_root_multiplicity();
    let mut out = vec![Complex::new(F::zero(), F::zero()); zeros];
    for (factor, mult) in p.strip_zero_roots().square_free_decomposition() {
        let coeffs: Vec<F> = factor
            .to_f64_scaled()
            .into_iter()
            .map(|c| F::from(c).expect("float cast"))
            .collect();
        let roots = polynomial_roots(&coeffs)?;
        for _ in 0..mult {
            out.extend(roots.iter().copied());
        }
    }
    canonicalize(&mut out, F::from(1e-14).expect("float cast"));
    Ok(out)
}

/// Eigenvalues with multiplicity, split by position relative to the unit
/// circle.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<F> {
    pub eigenvalues: Vec<Complex<F>>,
    pub radius: F,
    pub circle_tol: F,
    pub inside: Vec<Complex<F>>,
    pub on_circle: Vec<Complex<F>>,
    pub outside: Vec<Complex<F>>,
}

pub fn spectrum<F: Float>(m: &Matrix<i64>, circle_tol: F) -> Result<Spectrum<F>> {
    let mut eigenvalues = Vec::with_capacity(m.rows());
    for f in char_poly_factors(m) {
        eigenvalues.extend(int_poly_roots::<F>(&f)?);
    }
    canonicalize(&mut eigenvalues, F::from(1e-14).expect("float cast"));
    let radius = eigenvalues.iter().map(|z| z.norm()).fold(F::zero(), F::max);
    let mut inside = Vec::new();
    let mut on_circle = Vec::new();
    let mut outside = Vec::new();
    for &z in &eigenvalues {
        let r = z.norm();
        if r < F::one() - circle_tol {
            inside.push(z);
        } else if r > F::one() + circle_tol {
            outside.push(z);
        } else {
            on_circle.push(z);
        }
    }
    Ok(Spectrum {
        eigenvalues,
        radius,
        circle_tol,
        inside,
        on_circle,
        outside,
    })
}

fn complex_pairs<F: Float>(zs: &[Complex<F>]) -> Vec<[f64; 2]> {
    zs.iter()
        .map(|z| {
            [
                z.re.to_f64().unwrap_or(f64::NAN),
                z.im.to_f64().unwrap_or(f64::NAN),
            ]
        })
        .collect()
}

impl<F: Float> Serialize for Spectrum<F> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Spectrum", 6)?;
        s.serialize_field("eigenvalues", &complex_pairs(&self.eigenvalues))?;
        s.serialize_field("radius", &self.radius.to_f64())?;
        s.serialize_field("circle_tol", &self.circle_tol.to_f64())?;
        s.serialize_field("inside", &complex_pairs(&self.inside))?;
        s.serialize_field("on_circle", &complex_pairs(&self.on_circle))?;
        s.serialize_field("outside", &complex_pairs(&self.outside))?;
        s.end()
    }
}

/// Collatz-Wielandt iteration limit, in multiply-adds.
const POWER_WORK_LIMIT: usize = 400_000_000;

/// Spectral radius of a nonnegative integer matrix: the largest Perron root
/// among strongly connected blocks.
pub fn spectral_radius(m: &Matrix<i64>) -> Result<f64> {
    let mut rho = 0.0f64;
    for b in scc_blocks(m) {
        let r = if b.len() == 1 {
            m.get(b[0], b[0]).abs() as f64
        } else {
            perron_root(&m.select(&b, &b))?
        };
        rho = rho.max(r);
    }
    Ok(rho)
}

/// Natural log of the spectral radius.
pub fn entropy(m: &Matrix<i64>) -> Result<f64> {
    Ok(spectral_radius(m)?.ln())
}

/// Perron root of an irreducible nonnegative matrix. Power iteration on
/// `B + I` (primitive) squeezes the Collatz-Wielandt bounds; if they do not
/// meet, fall back to the largest root of the characteristic polynomial.
fn perron_root(b: &Matrix<i64>) -> Result<f64> {
    let n = b.rows();
    let sparse: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|i| {
            b.row(i)
                .iter()
                .enumerate()
                .filter(|(_, a)| **a != 0)
                .map(|(j, &a)| (j, a as f64))
                .collect()
        })
        .collect();
    let nnz: usize = sparse.iter().map(Vec::len).sum::<usize>() + n;
    let max_iter = (POWER_WORK_LIMIT / nnz.max(1)).max(1000);
    let mut x = vec![1.0f64; n];
    for _ in 0..max_iter {
        let y: Vec<f64> = (0..n)
            .map(|i| x[i] + sparse[i].iter().map(|&(j, a)| a * x[j]).sum::<f64>())
            .collect();
        let mut lower = f64::INFINITY;
        let mut upper = 0.0f64;
        for i in 0..n {
            let q = y[i] / x[i];
            lower = lower.min(q);
            upper = upper.max(q);
        }
        if upper - lower <= 1e-14 * upper {
            return Ok(0.5 * (lower + upper) - 1.0);
        }
        let scale = y.iter().copied().fold(0.0, f64::max);
        x = y
            .into_iter()
            .map(|v| (v / scale).max(f64::MIN_POSITIVE))
            .collect();
    }
    let roots = int_poly_roots::<f64>(&b.charpoly())?;
    roots
        .iter()
        .filter(|z| z.im.abs() < 1e-9)
        .map(|z| z.re)
        .fold(None, |acc: Option<f64>, r| {
            Some(acc.map_or(r, |a| a.max(r)))
        })
        .ok_or_else(|| Error::ConvergenceFailure("no real Perron root found".into()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchReport {
    pub word: Word,
    pub kneading_poly: IntPoly,
    pub matrix_irreducible: bool,
    /// Irreducibility of the restriction to the orbit core.
    pub core_irreducible: bool,
    /// `F_w` vanished identically.
    pub degenerate: bool,
    /// Nonzero roots of `F_w` off the unit circle.
    pub kneading_roots: Vec<Complex<f64>>,
    /// Nonzero eigenvalues off the unit circle.
    pub eigenvalues: Vec<Complex<f64>>,
    /// `(root index, eigenvalue index)` of a minimum-cost matching.
    pub pairs: Vec<(usize, usize)>,
    pub max_distance: f64,
    /// Set-level distance; infinite when exactly one side is empty.
    pub hausdorff: f64,
    pub circle_tol: f64,
}

impl MatchReport {
    pub fn multiset_sizes_agree(&self) -> bool {
        self.kneading_roots.len() == self.eigenvalues.len()
    }
}

impl Serialize for MatchReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("MatchReport", 11)?;
        s.serialize_field("word", &self.word)?;
        s.serialize_field("kneading_poly", &self.kneading_poly)?;
        s.serialize_field("matrix_irreducible", &self.matrix_irreducible)?;
        s.serialize_field("core_irreducible", &self.core_irreducible)?;
        s.serialize_field("degenerate", &self.degenerate)?;
        s.serialize_field("kneading_roots", &complex_pairs(&self.kneading_roots))?;
        s.serialize_field("eigenvalues", &complex_pairs(&self.eigenvalues))?;
        s.serialize_field("pairs", &self.pairs)?;
        s.serialize_field("max_distance", &self.max_distance)?;
        s.serialize_field(
            "hausdorff",
            &self.hausdorff.is_finite().then_some(self.hausdorff),
        )?;
        s.serialize_field("circle_tol", &self.circle_tol)?;
        s.end()
    }
}

fn hausdorff(a: &[Complex<f64>], b: &[Complex<f64>]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    let one_way = |x: &[Complex<f64>], y: &[Complex<f64>]| {
        x.iter()
            .map(|p| {
                y.iter()
                    .map(|q| (p - q).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// Minimum-cost matching of the smaller set into the larger (Hungarian
/// method). Returns index pairs `(a, b)` and the largest matched distance.
pub fn min_cost_matching(a: &[Complex<f64>], b: &[Complex<f64>]) -> (Vec<(usize, usize)>, f64) {
    if a.is_empty() || b.is_empty() {
        return (Vec::new(), 0.0);
    }
    let swap = a.len() > b.len();
    let (rows, cols) = if swap { (b, a) } else { (a, b) };
    let cost: Vec<Vec<f64>> = rows
        .iter()
        .map(|p| cols.iter().map(|q| (p - q).norm()).collect())
        .collect();
    let assign = hungarian(&cost);
    let mut pairs: Vec<(usize, usize)> = assign
        .iter()
        .enumerate()
        .map(|(r, &c)| if swap { (c, r) } else { (r, c) })
        .collect();
    pairs.sort_unstable();
    let max = assign
        .iter()
        .enumerate()
        .map(|(r, &c)| cost[r][c])
        .fold(0.0, f64::max);
    (pairs, max)
}

/// Rectangular assignment with `rows ≤ cols`; returns the column of each row.
fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    let m = cost[0].len();
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut out = vec![0usize; n];
    for j in 1..=m {
        if p[j] != 0 {
            out[p[j] - 1] = j - 1;
        }
    }
    out
}

/// Divide every polynomial by the gcd of all of them.
pub fn normalize_family(polys: &[IntPoly]) -> Vec<IntPoly> {
    let g = polys.iter().fold(IntPoly::zero(), |acc, p| acc.gcd(p));
    if g.is_zero() {
        return polys.to_vec();
    }
    polys
        .iter()
        .map(|p| p.div_exact(&g).expect("gcd divides"))
        .collect()
}

/// `|c|` of the largest coefficient, as a `BigInt`.
pub fn coefficient_height(p: &IntPoly) -> BigInt {
    p.coeffs().iter().map(|c| c.abs()).max().unwrap_or_default()
}

/// `gcd` of two integers, exposed for callers normalizing families by hand.
pub fn int_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}
