//! Sparse symmetric positive definite solvers used by the mixed BVP module.
//!
//! Tensor grids produce banded SPD systems, so the default path is a banded
//! Cholesky factorization (factor once, back-substitute for every right-hand
//! side). Grids whose band storage would be too large fall back to conjugate
//! gradients preconditioned by incomplete Cholesky, run to a relative
//! residual of 1e-12.

use crate::error::{Error, Result};

/// Relative residual target for the iterative fallback.
pub const CG_RTOL: f64 = 1e-12;

/// Band storage cap before switching to PCG (bytes of factor storage).
const MAX_BAND_BYTES: usize = 256 * 1024 * 1024;

/// Triplet accumulator for symmetric assembly.
pub struct Triplets {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl Triplets {
    pub fn new(n: usize) -> Self {
        Self { n, entries: Vec::new() }
    }

    pub fn push(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.n && j < self.n);
        if v != 0.0 {
            self.entries.push((i, j, v));
        }
    }

    /// Adds v at (i, j) and (j, i), and is a plain diagonal add when i == j.
    pub fn push_sym(&mut self, i: usize, j: usize, v: f64) {
        self.push(i, j, v);
        if i != j {
            self.push(j, i, v);
        }
    }

    pub fn into_csr(mut self) -> Csr {
        self.entries.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut indptr = vec![0usize; self.n + 1];
        let mut indices: Vec<usize> = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in self.entries {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(j);
                values.push(v);
                indptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..self.n {
            indptr[i + 1] += indptr[i];
        }
        Csr { n: self.n, indptr, indices, values }
    }
}

/// Compressed sparse row matrix (square).
#[derive(Debug, Clone)]
pub struct Csr {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl Csr {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let a = self.indptr[i];
        let b = self.indptr[i + 1];
        self.indices[a..b].iter().copied().zip(self.values[a..b].iter().copied())
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        for i in 0..self.n {
            let mut s = 0.0;
            for (j, v) in self.row(i) {
                s += v * x[j];
            }
            y[i] = s;
        }
    }

    pub fn matvec_alloc(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec(x, &mut y);
        y
    }

    /// Largest |A_ij − A_ji| relative to the largest |A_ij|.
    pub fn max_relative_asymmetry(&self) -> f64 {
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                let vt = self.get(j, i);
                worst = worst.max((v - vt).abs());
            }
        }
        worst / scale
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        for (jj, v) in self.row(i) {
            if jj == j {
                return v;
            }
        }
        0.0
    }

    /// Restriction to the index set `keep` (order preserved).
    pub fn restrict(&self, keep: &[usize]) -> Csr {
        let mut map = vec![usize::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let mut indptr = vec![0usize; keep.len() + 1];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for (new_i, &old_i) in keep.iter().enumerate() {
            for (j, v) in self.row(old_i) {
                if map[j] != usize::MAX {
                    indices.push(map[j]);
                    values.push(v);
                }
            }
            indptr[new_i + 1] = indices.len();
        }
        Csr { n: keep.len(), indptr, indices, values }
    }

    pub fn bandwidth(&self) -> usize {
        let mut bw = 0usize;
        for i in 0..self.n {
            for (j, _) in self.row(i) {
                bw = bw.max(i.abs_diff(j));
            }
        }
        bw
    }
}

/// Banded Cholesky factorization of an SPD matrix.
pub struct BandedCholesky {
    n: usize,
    bw: usize,
    /// Lower band, row major: `band[i*(bw+1) + d] = L[i][i-d]`, d = 0..=bw.
    band: Vec<f64>,
}

impl BandedCholesky {
    pub fn factor(a: &Csr) -> Result<Self> {
        let n = a.n();
        let bw = a.bandwidth();
        let stride = bw + 1;
        let mut band = vec![0.0f64; n * stride];
        for i in 0..n {
            for (j, v) in a.row(i) {
                if j <= i {
                    band[i * stride + (i - j)] = v;
                }
            }
        }
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            for j in lo..=i {
                let mut sum = band[i * stride + (i - j)];
                let kmin = lo.max(j.saturating_sub(bw));
                for k in kmin..j {
                    sum -= band[i * stride + (i - k)] * band[j * stride + (j - k)];
                }
                if i == j {
                    if !(sum > 0.0) {
                        return Err(Error::SolverDivergence(format!(
                            "Cholesky pivot {sum} at row {i}; matrix not positive definite"
                        )));
                    }
                    band[i * stride + 0] = sum.sqrt();
                } else {
                    band[i * stride + (i - j)] = sum / band[j * stride + 0];
                }
            }
        }
        Ok(Self { n, bw, band })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        debug_assert_eq!(b.len(), self.n);
        let stride = self.bw + 1;
        let mut y = b.to_vec();
        // forward: L y = b
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            let mut s = y[i];
            for j in lo..i {
                s -= self.band[i * stride + (i - j)] * y[j];
            }
            y[i] = s / self.band[i * stride];
        }
        // backward: Lᵀ x = y
        for i in (0..self.n).rev() {
            let hi = (i + self.bw).min(self.n - 1);
            let mut s = y[i];
            for j in (i + 1)..=hi {
                s -= self.band[j * stride + (j - i)] * y[j];
            }
            y[i] = s / self.band[i * stride];
        }
        y
    }
}

/// Incomplete Cholesky (zero fill) preconditioner with diagonal-shift retry.
struct IncompleteCholesky {
    // lower-triangular factor, rows sorted, diagonal last in each row
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
    // transpose (upper) for the backward solve
    t_indptr: Vec<usize>,
    t_indices: Vec<usize>,
    t_values: Vec<f64>,
}

impl IncompleteCholesky {
    fn try_factor(a: &Csr, shift: f64) -> Option<Self> {
        let n = a.n();
        let mut indptr = vec![0usize; n + 1];
        let mut indices: Vec<usize> = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        for i in 0..n {
            let mut row: Vec<(usize, f64)> = a
                .row(i)
                .filter(|&(j, _)| j <= i)
                .map(|(j, v)| if j == i { (j, v * (1.0 + shift)) } else { (j, v) })
                .collect();
            row.sort_unstable_by_key(|e| e.0);
            for (j, aij) in row {
                // dot of rows i and j of L over columns < j
                let mut s = aij;
                {
                    let (ri0, ri1) = (indptr[i], indices.len());
                    let (rj0, rj1) = if j < i {
                        (indptr[j], indptr[j + 1])
                    } else {
                        (indptr[i], indices.len())
                    };
                    let mut p = ri0;
                    let mut q = rj0;
                    while p < ri1 && q < rj1 {
                        let cp = indices[p];
                        let cq = indices[q];
                        if cp >= j || cq >= j {
                            break;
                        }
                        match cp.cmp(&cq) {
                            std::cmp::Ordering::Less => p += 1,
                            std::cmp::Ordering::Greater => q += 1,
                            std::cmp::Ordering::Equal => {
                                s -= values[p] * values[q];
                                p += 1;
                                q += 1;
                            }
                        }
                    }
                }
                if j == i {
                    if !(s > 0.0) {
                        return None;
                    }
                    indices.push(j);
                    values.push(s.sqrt());
                } else {
                    let dj = {
                        // diagonal of row j is its last entry
                        values[indptr[j + 1] - 1]
                    };
                    indices.push(j);
                    values.push(s / dj);
                }
            }
            indptr[i + 1] = indices.len();
        }
        // transpose
        let nnz = indices.len();
        let mut t_indptr = vec![0usize; n + 1];
        for &j in &indices {
            t_indptr[j + 1] += 1;
        }
        for i in 0..n {
            t_indptr[i + 1] += t_indptr[i];
        }
        let mut t_indices = vec![0usize; nnz];
        let mut t_values = vec![0.0f64; nnz];
        let mut cursor = t_indptr.clone();
        for i in 0..n {
            for p in indptr[i]..indptr[i + 1] {
                let j = indices[p];
                let at = cursor[j];
                t_indices[at] = i;
                t_values[at] = values[p];
                cursor[j] += 1;
            }
        }
        Some(Self { indptr, indices, values, t_indptr, t_indices, t_values })
    }

    fn factor(a: &Csr) -> Self {
        let mut shift = 0.0;
        loop {
            if let Some(ic) = Self::try_factor(a, shift) {
                return ic;
            }
            shift = if shift == 0.0 { 1e-8 } else { shift * 10.0 };
            if shift > 1.0 {
                // diagonal (Jacobi) fallback: L = sqrt(diag)
                let n = a.n();
                let mut indptr = vec![0usize; n + 1];
                let mut indices = Vec::with_capacity(n);
                let mut values = Vec::with_capacity(n);
                for i in 0..n {
                    indices.push(i);
                    values.push(a.get(i, i).abs().max(1e-300).sqrt());
                    indptr[i + 1] = i + 1;
                }
                return Self {
                    indptr: indptr.clone(),
                    indices: indices.clone(),
                    values: values.clone(),
                    t_indptr: indptr,
                    t_indices: indices,
                    t_values: values,
                };
            }
        }
    }

    /// z = (L Lᵀ)⁻1 r
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        let n = r.len();
        // forward L y = r (diagonal is last entry of each row)
        for i in 0..n {
            let mut s = r[i];
            let (a, b) = (self.indptr[i], self.indptr[i + 1]);
            for p in a..b - 1 {
                s -= self.values[p] * z[self.indices[p]];
            }
            z[i] = s / self.values[b - 1];
        }
        // backward Lᵀ x = y using the transpose rows (first entry is diagonal)
        for i in (0..n).rev() {
            let (a, b) = (self.t_indptr[i], self.t_indptr[i + 1]);
            let mut s = z[i];
            for p in a + 1..b {
                s -= self.t_values[p] * z[self.t_indices[p]];
            }
            z[i] = s / self.t_values[a];
        }
    }
}

/// Conjugate gradients with incomplete-Cholesky preconditioning.
pub struct Pcg {
    a: Csr,
    ic: IncompleteCholesky,
    rtol: f64,
}

impl Pcg {
    pub fn new(a: Csr) -> Self {
        let ic = IncompleteCholesky::factor(&a);
        Self { a, ic, rtol: CG_RTOL }
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = b.len();
        let bnorm = norm2(b);
        if bnorm == 0.0 {
            return Ok(vec![0.0; n]);
        }
        let tol = self.rtol * bnorm;
        let mut x = vec![0.0; n];
        let mut r = b.to_vec();
        let mut z = vec![0.0; n];
        self.ic.apply(&r, &mut z);
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        let mut ap = vec![0.0; n];
        let max_iter = 20 * n + 200;
        for _ in 0..max_iter {
            if norm2(&r) <= tol {
                return Ok(x);
            }
            self.a.matvec(&p, &mut ap);
            let pap = dot(&p, &ap);
            if !(pap > 0.0) {
                return Err(Error::SolverDivergence(format!(
                    "CG curvature breakdown, pᵀAp = {pap}"
                )));
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            self.ic.apply(&r, &mut z);
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        if norm2(&r) <= tol {
            Ok(x)
        } else {
            Err(Error::SolverDivergence(format!(
                "CG stalled at relative residual {:.3e}",
                norm2(&r) / bnorm
            )))
        }
    }
}

/// Factorized SPD solver: direct banded Cholesky when the band fits in
/// memory, PCG otherwise.
pub enum SpdSolver {
    Banded(BandedCholesky),
    Iterative(Pcg),
}

impl SpdSolver {
    pub fn new(a: Csr) -> Result<Self> {
        let band_bytes = a.n().saturating_mul(a.bandwidth() + 1).saturating_mul(8);
        if band_bytes <= MAX_BAND_BYTES {
            Ok(SpdSolver::Banded(BandedCholesky::factor(&a)?))
        } else {
            log::info!(
                "band storage {} MB exceeds cap; using IC(0)-preconditioned CG",
                band_bytes / (1024 * 1024)
            );
            Ok(SpdSolver::Iterative(Pcg::new(a)))
        }
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        match self {
            SpdSolver::Banded(c) => Ok(c.solve(b)),
            SpdSolver::Iterative(p) => p.solve(b),
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
