//! Dense matrices and exact characteristic polynomials.
//!
//! Integer matrices get their characteristic polynomial from a Hessenberg
//! reduction modulo several 62-bit primes followed by Chinese remaindering.
//! Berkowitz's division-free algorithm works over any coefficient ring and is
//! used for polynomial matrices and as a cross-check.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::poly::{Coeff, Poly};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    /// Panics if the rows have different lengths.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        Matrix {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// The submatrix on the given row and column indices.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Matrix {
            rows: rows.len(),
            cols: cols.len(),
            data: rows
                .iter()
                .flat_map(|&i| cols.iter().map(move |&j| self.get(i, j).clone()))
                .collect(),
        }
    }
}

impl<T: Coeff> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        let mut m = Self::filled(n, n, T::zero());
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::filled(self.rows, other.cols, T::zero());
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j).clone() + a.clone() * other.get(k, j).clone();
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// `det(xI - A)` by Berkowitz's algorithm; `O(n^4)` ring operations.
    pub fn charpoly_berkowitz(&self) -> Poly<T> {
        assert!(self.is_square(), "square matrix required");
        let n = self.rows;
        if n == 0 {
            return Poly::one();
        }
        // descending coefficients of det(xI - A_r) for the leading r×r block
        let mut v = vec![T::one(), -self.get(0, 0).clone()];
        for r in 1..n {
            // Toeplitz column: 1, -a_rr, -R·C, -R·A·C, ..., -R·A^(r-1)·C
            let mut t = Vec::with_capacity(r + 2);
            t.push(T::one());
            t.push(-self.get(r, r).clone());
            let mut c: Vec<T> = (0..r).map(|i| self.get(i, r).clone()).collect();
            for _ in 0..r {
                let rc = (0..r).fold(T::zero(), |acc, j| {
                    acc + self.get(r, j).clone() * c[j].clone()
                });
                t.push(-rc);
                c = (0..r)
                    .map(|i| {
                        (0..r).fold(T::zero(), |acc, j| {
                            acc + self.get(i, j).clone() * c[j].clone()
                        })
                    })
                    .collect();
            }
            let next: Vec<T> = (0..=r + 1)
                .map(|k| {
                    (0..=k.min(r)).fold(T::zero(), |acc, j| acc + t[k - j].clone() * v[j].clone())
                })
                .collect();
            v = next;
        }
        v.reverse();
        Poly::new(v)
    }

    pub fn determinant(&self) -> T {
        let cp = self.charpoly_berkowitz();
        let c0 = cp.coeff(0);
        if self.rows.is_multiple_of(2) {
            c0
        } else {
            -c0
        }
    }
}

impl Matrix<i64> {
    /// Exact `det(xI - A)`.
    pub fn charpoly(&self) -> Poly<BigInt> {
        assert!(self.is_square(), "square matrix required");
        let n = self.rows;
        if n == 0 {
            return Poly::one();
        }
        let bits = self.charpoly_coefficient_bits();
        let primes = primes_for_bits(bits + 2);
        let mut acc: Vec<BigInt> = vec![BigInt::zero(); n + 1];
        let mut modulus = BigInt::one();
        for &p in &primes {
            let residues = charpoly_mod(self, p);
            let pb = BigInt::from(p);
            let inv = mod_inverse(&(&modulus % &pb), &pb);
            for (a, r) in acc.iter_mut().zip(residues) {
                // Garner step: a + M·((r - a)·M⁻¹ mod p)
                let diff = (BigInt::from(r) - &*a).mod_floor(&pb);
                let k = (diff * &inv).mod_floor(&pb);
                *a += &modulus * k;
            }
            modulus *= pb;
        }
        let half = &modulus >> 1;
        for a in acc.iter_mut() {
            if *a > half {
                *a -= &modulus;
            }
        }
        Poly::new(acc)
    }

    /// Upper bound on `log2 |c_k|` over all coefficients: a degree-`k`
    /// coefficient is a signed sum of `C(n,k)` principal minors, each bounded
    /// by the product of its row norms.
    fn charpoly_coefficient_bits(&self) -> usize {
        let n = self.rows;
        let mut norms: Vec<f64> = (0..n)
            .map(|i| {
                let s: f64 = self.row(i).iter().map(|&a| (a as f64) * (a as f64)).sum();
                s.sqrt().max(1.0).log2()
            })
            .collect();
        norms.sort_by(|a, b| b.total_cmp(a));
        let mut best = 0.0f64;
        let mut log_binom = 0.0f64;
        let mut log_prod = 0.0f64;
        for k in 1..=n {
            log_binom += ((n - k + 1) as f64).log2() - (k as f64).log2();
            log_prod += norms[k - 1];
            best = best.max(log_binom + log_prod);
        }
        best.ceil() as usize + 1
    }
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

const PRIME_BITS: usize = 61;

/// Primes just below `2^62`, in decreasing order; each contributes at least
/// 61 bits to the CRT modulus.
fn primes_for_bits(bits: usize) -> Vec<u64> {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    let needed = bits.div_ceil(PRIME_BITS).max(1);
    let table = PRIMES.get_or_init(|| {
        let mut out = Vec::with_capacity(256);
        let mut c = (1u64 << 62) - 1;
        while out.len() < 256 {
            if is_prime_u64(c) {
                out.push(c);
            }
            c -= 2;
        }
        out
    });
    if needed <= table.len() {
        return table[..needed].to_vec();
    }
    let mut out = table.clone();
    let mut c = *out.last().expect("nonempty") - 2;
    while out.len() < needed {
        if is_prime_u64(c) {
            out.push(c);
        }
        c -= 2;
    }
    out
}

fn mod_inverse(a: &BigInt, p: &BigInt) -> BigInt {
    let e = a.extended_gcd(p);
    assert!(e.gcd.is_one(), "modulus is not coprime");
    e.x.mod_floor(p)
}

/// Characteristic polynomial modulo `p`, ascending coefficients.
fn charpoly_mod(a: &Matrix<i64>, p: u64) -> Vec<u64> {
    let n = a.rows();
    let pi = p as i128;
    let mut h: Vec<Vec<u64>> = (0..n)
        .map(|i| {
            a.row(i)
                .iter()
                .map(|&x| (x as i128).rem_euclid(pi) as u64)
                .collect()
        })
        .collect();
    // reduce to upper Hessenberg form by similarity transforms
    for j in 0..n.saturating_sub(2) {
        let Some(piv) = (j + 1..n).find(|&i| h[i][j] != 0) else {
            continue;
        };
        if piv != j + 1 {
            h.swap(piv, j + 1);
            for row in h.iter_mut() {
                row.swap(piv, j + 1);
            }
        }
        let inv = pow_mod(h[j + 1][j], p - 2, p);
        for i in j + 2..n {
            if h[i][j] == 0 {
                continue;
            }
            let u = mul_mod(h[i][j], inv, p);
            for k in 0..n {
                let sub = mul_mod(u, h[j + 1][k], p);
                h[i][k] = (h[i][k] + p - sub) % p;
            }
            for row in h.iter_mut() {
                let add = mul_mod(u, row[i], p);
                row[j + 1] = (row[j + 1] + add) % p;
            }
        }
    }
    // p_m = (x - h_mm)·p_(m-1) - Σ h_(m-i,m)·(∏ subdiagonal)·p_(m-i-1)
    let mut polys: Vec<Vec<u64>> = vec![vec![1]];
    for m in 1..=n {
        let prev = &polys[m - 1];
        let mut cur = vec![0u64; m + 1];
        let d = h[m - 1][m - 1];
        for (k, &c) in prev.iter().enumerate() {
            cur[k + 1] = (cur[k + 1] + c) % p;
            cur[k] = (cur[k] + p - mul_mod(d, c, p)) % p;
        }
        let mut t = 1u64;
        for i in 1..m {
            t = mul_mod(t, h[m - i][m - i - 1], p);
            if t == 0 {
                break;
            }
            let f = mul_mod(t, h[m - i - 1][m - 1], p);
            if f == 0 {
                continue;
            }
            for (k, &c) in polys[m - i - 1].iter().enumerate() {
                cur[k] = (cur[k] + p - mul_mod(f, c, p)) % p;
            }
        }
        polys.push(cur);
    }
    polys.pop().expect("nonempty")
}

/// Largest absolute entry, for diagnostics.
pub fn max_abs_entry(m: &Matrix<i64>) -> i64 {
    (0..m.rows())
        .flat_map(|i| m.row(i).iter().map(|a| a.abs()))
        .max()
        .unwrap_or(0)
}
