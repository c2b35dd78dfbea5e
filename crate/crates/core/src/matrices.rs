//! Square matrices with nonnegative integer entries.
//!
//! Entries are arbitrary precision so that powers of transition matrices
//! never overflow. Decisions about the matrix (irreducibility, primitivity,
//! being a permutation) are exact; only the Perron-Frobenius eigenpair is
//! computed in floating point, and it always comes with its residual.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonnegIntMatrix {
    size: usize,
    entries: Vec<BigUint>,
}

/// Dominant eigenpair of an irreducible matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PfResult {
    pub lambda: f64,
    /// Positive eigenvector normalized to unit sum.
    pub eigvec: Vec<f64>,
    /// `max_i |(M v)_i - lambda v_i|`.
    pub residual: f64,
    pub iterations: usize,
}

const MAX_ITERATIONS: usize = 200_000;

impl NonnegIntMatrix {
    pub fn new(rows: Vec<Vec<BigUint>>) -> Result<Self> {
        let size = rows.len();
        if size == 0 {
            return Err(Error::InvalidArgument("matrix must be nonempty".into()));
        }
        let mut entries = Vec::with_capacity(size * size);
        for row in rows {
            if row.len() != size {
                return Err(Error::DimensionMismatch(row.len(), size));
            }
            entries.extend(row);
        }
        Ok(NonnegIntMatrix { size, entries })
    }

    pub fn from_rows<R: AsRef<[u64]>>(rows: &[R]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| r.as_ref().iter().map(|&x| BigUint::from(x)).collect())
                .collect(),
        )
    }

    pub fn zeros(size: usize) -> Self {
        NonnegIntMatrix {
            size,
            entries: vec![BigUint::zero(); size * size],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size);
        for i in 0..size {
            m.entries[i * size + i] = BigUint::one();
        }
        m
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> &BigUint {
        &self.entries[i * self.size + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut BigUint {
        &mut self.entries[i * self.size + j]
    }

    pub fn rows(&self) -> Vec<Vec<BigUint>> {
        self.entries.chunks(self.size).map(|r| r.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let n = self.size;
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t.entries[j * n + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.size != other.size {
            return Err(Error::DimensionMismatch(self.size, other.size));
        }
        let n = self.size;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * n + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, mut p: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(self.size);
        while p > 0 {
            if p & 1 == 1 {
                acc = acc.mul(&base).expect("same size");
            }
            p >>= 1;
            if p > 0 {
                base = base.mul(&base).expect("same size");
            }
        }
        acc
    }

    pub fn column_sum(&self, j: usize) -> BigUint {
        (0..self.size).map(|i| self.get(i, j)).sum()
    }

    pub fn trace(&self) -> BigUint {
        (0..self.size).map(|i| self.get(i, i)).sum()
    }

    fn support(&self) -> Vec<bool> {
        self.entries.iter().map(|x| !x.is_zero()).collect()
    }

    fn to_f64(&self) -> Vec<f64> {
        self.entries
            .iter()
            .map(|x| x.to_f64().unwrap_or(f64::INFINITY))
            .collect()
    }

    /// Strong connectivity of the graph with an edge `i -> j` whenever
    /// `M[i][j] > 0`. The `1 x 1` zero matrix is not irreducible: it has no
    /// cycle, so its PF eigenvalue would be 0.
    pub fn is_irreducible(&self) -> bool {
        let n = self.size;
        if self.is_zero() {
            return false;
        }
        let s = self.support();
        let reach = |forward: bool| {
            let mut seen = vec![false; n];
            let mut stack = vec![0usize];
            seen[0] = true;
            while let Some(i) = stack.pop() {
                for j in 0..n {
                    let edge = if forward { s[i * n + j] } else { s[j * n + i] };
                    if edge && !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
            seen.into_iter().all(|b| b)
        };
        reach(true) && reach(false)
    }

    /// Smallest `p` with `M^p` entrywise positive, searched up to the
    /// Wielandt bound `l^2 - 2l + 2`; `None` when the matrix is not primitive.
    pub fn primitivity_exponent(&self) -> Option<usize> {
        let n = self.size;
        let bound = n * n + 2 - 2 * n;
        let base = self.support();
        let mut power = base.clone();
        for p in 1..=bound {
            if power.iter().all(|&b| b) {
                return Some(p);
            }
            let mut next = vec![false; n * n];
            for i in 0..n {
                for k in 0..n {
                    if power[i * n + k] {
                        for j in 0..n {
                            next[i * n + j] |= base[k * n + j];
                        }
                    }
                }
            }
            power = next;
        }
        None
    }

    pub fn is_primitive(&self) -> bool {
        self.primitivity_exponent().is_some()
    }

    /// A 0/1 matrix with a single 1 in each row and column whose permutation
    /// is one cycle through all indices.
    pub fn is_transitive_permutation(&self) -> bool {
        let n = self.size;
        let mut image = vec![usize::MAX; n];
        let mut hit = vec![false; n];
        for i in 0..n {
            for j in 0..n {
                let x = self.get(i, j);
                if x.is_zero() {
                    continue;
                }
                if !x.is_one() || image[i] != usize::MAX || hit[j] {
                    return false;
                }
                image[i] = j;
                hit[j] = true;
            }
            if image[i] == usize::MAX {
                return false;
            }
        }
        let mut i = 0;
        for step in 1..=n {
            i = image[i];
            if i == 0 {
                return step == n;
            }
        }
        false
    }

    /// Perron-Frobenius eigenpair by power iteration.
    ///
    /// Iterates `M + I` from the all-ones vector; the shift has the same
    /// dominant eigenvector and is primitive whenever `M` is irreducible, so
    /// periodic matrices converge too. Once the residual drops below `tol`
    /// the iteration continues while the residual keeps shrinking.
    pub fn pf_eigenvalue(&self, tol: f64) -> Result<PfResult> {
        if !self.is_irreducible() {
            return Err(Error::NotIrreducible);
        }
        let n = self.size;
        let m = self.to_f64();
        let apply = |v: &[f64]| -> Vec<f64> {
            (0..n)
                .map(|i| (0..n).map(|j| m[i * n + j] * v[j]).sum())
                .collect()
        };
        let measure = |v: &[f64]| -> (f64, f64) {
            let mv = apply(v);
            let lambda: f64 = mv.iter().sum::<f64>() / v.iter().sum::<f64>();
            let residual = mv
                .iter()
                .zip(v)
                .map(|(a, b)| (a - lambda * b).abs())
                .fold(0.0, f64::max);
            (lambda, residual)
        };

        let mut v = vec![1.0 / n as f64; n];
        let (mut lambda, mut residual) = measure(&v);
        let mut iterations = 0;
        let mut converged_at = None;
        let mut stalls = 0;
        while iterations < MAX_ITERATIONS {
            if residual < tol && converged_at.is_none() {
                converged_at = Some(iterations);
            }
            if let Some(at) = converged_at {
                if residual < tol * 1e-3 || stalls >= 3 || iterations > 2 * at + 64 {
                    break;
                }
            }
            let mv = apply(&v);
            let mut next: Vec<f64> = mv.iter().zip(&v).map(|(a, b)| a + b).collect();
            let s: f64 = next.iter().sum();
            next.iter_mut().for_each(|x| *x /= s);
            let (l, r) = measure(&next);
            iterations += 1;
            if converged_at.is_some() && r >= residual {
                stalls += 1;
                continue;
            }
            v = next;
            lambda = l;
            residual = r;
        }
        if residual < tol {
            Ok(PfResult {
                lambda,
                eigvec: v,
                residual,
                iterations,
            })
        } else {
            Err(Error::NoConvergence {
                iterations,
                residual,
                lambda,
                last: v,
            })
        }
    }

    /// Collatz-Wielandt enclosure `[min_i (Mv)_i / v_i, max_i (Mv)_i / v_i]`
    /// of the PF eigenvalue, valid for any positive `v`.
    pub fn pf_enclosure(&self, v: &[f64]) -> (f64, f64) {
        let n = self.size;
        let m = self.to_f64();
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for i in 0..n {
            let mv: f64 = (0..n).map(|j| m[i * n + j] * v[j]).sum();
            let q = mv / v[i];
            lo = lo.min(q);
            hi = hi.max(q);
        }
        (lo, hi)
    }

    /// Exact test of `det(M - k I) == 0`.
    pub fn has_eigenvalue(&self, k: i64) -> bool {
        let n = self.size;
        let mut a: Vec<Vec<BigInt>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let x = BigInt::from(self.get(i, j).clone());
                        if i == j {
                            x - k
                        } else {
                            x
                        }
                    })
                    .collect()
            })
            .collect();
        bareiss_determinant(&mut a).is_zero()
    }
}

/// Fraction-free Gaussian elimination; destroys `a`.
pub(crate) fn bareiss_determinant(a: &mut [Vec<BigInt>]) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    if n == 0 {
        return BigInt::one();
    }
    sign * &a[n - 1][n - 1]
}

impl fmt::Display for NonnegIntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.entries.chunks(self.size) {
            let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}
