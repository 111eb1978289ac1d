//! Sparse matrix kernels for the QP solver.
//!
//! Two storage schemes are enough for everything in this crate: row-major
//! compressed storage ([`CsrMatrix`]) for constraint matrices, and an
//! upper-triangle column-compressed form ([`SparseSym`]) for the symmetric
//! systems handed to the no-pivot [`LdlFactor`]. The factorization is the
//! classic up-looking LDL^T with an elimination tree; it is valid for
//! positive definite and (regularized) quasi-definite matrices, which is all
//! the solver ever produces.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::math;

/// Row-compressed sparse matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Empty matrix with the given shape.
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CsrMatrix {
            nrows,
            ncols,
            indptr: vec![0; nrows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Build from (row, col, value) triplets; duplicates are summed and
    /// entries within a row end up sorted by column.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        order.sort_unstable_by_key(|&t| (triplets[t].0, triplets[t].1));

        let mut indptr = vec![0usize; nrows + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        for &t in &order {
            let (r, c, v) = triplets[t];
            debug_assert!(r < nrows && c < ncols);
            if let (Some(&last_c), true) = (indices.last(), indptr[r + 1] > 0) {
                // same row as previous entry and same column: merge
                if indptr[r + 1] == indices.len() && last_c == c {
                    *values.last_mut().unwrap() += v;
                    continue;
                }
            }
            indices.push(c);
            values.push(v);
            indptr[r + 1] = indices.len();
        }
        // forward-fill row pointers for empty rows
        for r in 0..nrows {
            if indptr[r + 1] < indptr[r] {
                unreachable!();
            }
            if indptr[r + 1] == 0 {
                indptr[r + 1] = indptr[r];
            }
        }
        CsrMatrix {
            nrows,
            ncols,
            indptr,
            indices,
            values,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    /// Column indices and values of one row.
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let lo = self.indptr[r];
        let hi = self.indptr[r + 1];
        (&self.indices[lo..hi], &self.values[lo..hi])
    }

    /// y = A x
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            let mut acc = 0.0;
            for (c, v) in cols.iter().zip(vals) {
                acc += v * x[*c];
            }
            y[r] = acc;
        }
    }

    /// y = A^T v (sequential scatter, deterministic)
    pub fn mul_t_vec(&self, v: &[f64], y: &mut [f64]) {
        debug_assert_eq!(v.len(), self.nrows);
        debug_assert_eq!(y.len(), self.ncols);
        y.fill(0.0);
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            let vr = v[r];
            if vr == 0.0 {
                continue;
            }
            for (c, val) in cols.iter().zip(vals) {
                y[*c] += val * vr;
            }
        }
    }

    /// Iterate all stored entries as (row, col, value).
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter()
                .zip(vals)
                .map(move |(c, v)| (r, *c, *v))
                .collect::<Vec<_>>()
        })
    }

    /// Infinity norm of each row.
    pub fn row_inf_norms(&self) -> Vec<f64> {
        (0..self.nrows)
            .map(|r| math::inf_norm(self.row(r).1))
            .collect()
    }

    /// Scale row r by s[r] and column c by t[c] in place.
    pub fn scale(&mut self, row_scale: &[f64], col_scale: &[f64]) {
        for r in 0..self.nrows {
            let lo = self.indptr[r];
            let hi = self.indptr[r + 1];
            for p in lo..hi {
                self.values[p] *= row_scale[r] * col_scale[self.indices[p]];
            }
        }
    }
}

/// Symmetric matrix stored as the upper triangle in column-compressed form.
#[derive(Debug, Clone)]
pub struct SparseSym {
    n: usize,
    colptr: Vec<usize>,
    rowidx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSym {
    /// Build from triplets. Each logical entry must appear once; (i, j) and
    /// (j, i) are folded onto the upper triangle and duplicates are summed.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut folded: Vec<(usize, usize, f64)> = triplets
            .iter()
            .map(|&(i, j, v)| if i <= j { (j, i, v) } else { (i, j, v) })
            .collect();
        // sort by (col, row); note folded tuples are (col, row, v)
        folded.sort_unstable_by_key(|&(c, r, _)| (c, r));

        let mut colptr = vec![0usize; n + 1];
        let mut rowidx = Vec::with_capacity(folded.len());
        let mut values = Vec::with_capacity(folded.len());
        for (c, r, v) in folded {
            if colptr[c + 1] == rowidx.len() && rowidx.last() == Some(&r) && colptr[c + 1] > 0 {
                *values.last_mut().unwrap() += v;
                continue;
            }
            rowidx.push(r);
            values.push(v);
            colptr[c + 1] = rowidx.len();
        }
        for c in 0..n {
            if colptr[c + 1] == 0 {
                colptr[c + 1] = colptr[c];
            }
        }
        SparseSym {
            n,
            colptr,
            rowidx,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn col(&self, c: usize) -> (&[usize], &[f64]) {
        let lo = self.colptr[c];
        let hi = self.colptr[c + 1];
        (&self.rowidx[lo..hi], &self.values[lo..hi])
    }

    /// y = S x for the full symmetric operator.
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        y.fill(0.0);
        for c in 0..self.n {
            let (rows, vals) = self.col(c);
            for (r, v) in rows.iter().zip(vals) {
                y[*r] += v * x[c];
                if *r != c {
                    y[c] += v * x[*r];
                }
            }
        }
    }
}

/// No-pivot LDL^T factorization of a [`SparseSym`].
#[derive(Debug, Clone)]
pub struct LdlFactor {
    n: usize,
    lp: Vec<usize>,
    li: Vec<usize>,
    lx: Vec<f64>,
    d: Vec<f64>,
}

impl LdlFactor {
    /// Factor S = L D L^T. Fails only if a pivot collapses to zero, which a
    ///正definite or regularized quasi-definite input cannot produce.
    pub fn factor(s: &SparseSym) -> Result<Self, Error> {
        let n = s.n;
        // elimination tree and column counts
        let mut parent = vec![usize::MAX; n];
        let mut flag = vec![usize::MAX; n];
        let mut lnz = vec![0usize; n];
        for j in 0..n {
            flag[j] = j;
            let (rows, _) = s.col(j);
            for &i in rows {
                if i >= j {
                    continue;
                }
                let mut k = i;
                while flag[k] != j {
                    if parent[k] == usize::MAX {
                        parent[k] = j;
                    }
                    lnz[k] += 1;
                    flag[k] = j;
                    k = parent[k];
                }
            }
        }
        let mut lp = vec![0usize; n + 1];
        for j in 0..n {
            lp[j + 1] = lp[j] + lnz[j];
        }
        let nnz_l = lp[n];
        let mut li = vec![0usize; nnz_l];
        let mut lx = vec![0.0f64; nnz_l];
        let mut d = vec![0.0f64; n];

        let mut y = vec![0.0f64; n];
        let mut pattern = vec![0usize; n];
        let mut lnz_filled = vec![0usize; n];
        let mut flag = vec![usize::MAX; n];

        for k in 0..n {
            flag[k] = k;
            let mut top = n;
            let (rows, vals) = s.col(k);
            let mut dk = 0.0;
            for (&i, &v) in rows.iter().zip(vals) {
                if i > k {
                    continue;
                }
                if i == k {
                    dk += v;
                    continue;
                }
                y[i] += v;
                let mut len = 0usize;
                let mut kk = i;
                while flag[kk] != k {
                    pattern[len] = kk;
                    len += 1;
                    flag[kk] = k;
                    kk = parent[kk];
                }
                while len > 0 {
                    len -= 1;
                    top -= 1;
                    pattern[top] = pattern[len];
                }
                // entries below `top` in pattern are scratch; only [top..n) matter
            }
            d[k] = dk;
            for t in top..n {
                let i = pattern[t];
                let yi = y[i];
                y[i] = 0.0;
                let lo = lp[i];
                let hi = lp[i] + lnz_filled[i];
                for p in lo..hi {
                    y[li[p]] -= lx[p] * yi;
                }
                let lki = yi / d[i];
                d[k] -= lki * yi;
                li[hi] = k;
                lx[hi] = lki;
                lnz_filled[i] += 1;
            }
            if d[k] == 0.0 || !d[k].is_finite() {
                return Err(Error::SolutionMismatch(alloc::format!(
                    "LDL pivot {k} is zero or non-finite"
                )));
            }
        }

        Ok(LdlFactor { n, lp, li, lx, d })
    }

    /// Solve S x = b in place.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        for j in 0..self.n {
            let xj = x[j];
            if xj != 0.0 {
                for p in self.lp[j]..self.lp[j + 1] {
                    x[self.li[p]] -= self.lx[p] * xj;
                }
            }
        }
        for j in 0..self.n {
            x[j] /= self.d[j];
        }
        for j in (0..self.n).rev() {
            let mut xj = x[j];
            for p in self.lp[j]..self.lp[j + 1] {
                xj -= self.lx[p] * x[self.li[p]];
            }
            x[j] = xj;
        }
    }

    /// Solve with a few rounds of iterative refinement against `op`
    /// (typically the unregularized matrix).
    pub fn solve_refined(&self, op: &SparseSym, b: &[f64], rounds: usize) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        let mut ax = vec![0.0; self.n];
        for _ in 0..rounds {
            op.mul_vec(&x, &mut ax);
            let mut r: Vec<f64> = b.iter().zip(&ax).map(|(bi, axi)| bi - axi).collect();
            if math::inf_norm(&r) == 0.0 {
                break;
            }
            self.solve_in_place(&mut r);
            for (xi, ri) in x.iter_mut().zip(&r) {
                *xi += ri;
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    // dense reference solve (partial pivoting) for checking the sparse path
    fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut m: Vec<Vec<f64>> = a.to_vec();
        let mut x = b.to_vec();
        for k in 0..n {
            let piv = (k..n)
                .max_by(|&i, &j| m[i][k].abs().partial_cmp(&m[j][k].abs()).unwrap())
                .unwrap();
            m.swap(k, piv);
            x.swap(k, piv);
            for i in k + 1..n {
                let f = m[i][k] / m[k][k];
                for j in k..n {
                    m[i][j] -= f * m[k][j];
                }
                x[i] -= f * x[k];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] -= m[i][j] * x[j];
            }
            x[i] /= m[i][i];
        }
        x
    }

    fn sym_from_dense(a: &[Vec<f64>]) -> SparseSym {
        let n = a.len();
        let mut trips = vec![];
        for i in 0..n {
            for j in i..n {
                if a[i][j] != 0.0 {
                    trips.push((i, j, a[i][j]));
                }
            }
        }
        SparseSym::from_triplets(n, &trips)
    }

    #[test]
    fn csr_triplets_sum_duplicates() {
        let a = CsrMatrix::from_triplets(2, 3, &[(0, 1, 2.0), (0, 1, 3.0), (1, 0, -1.0)]);
        assert_eq!(a.nnz(), 2);
        let (cols, vals) = a.row(0);
        assert_eq!(cols, &[1]);
        assert_eq!(vals, &[5.0]);
        let mut y = vec![0.0; 2];
        a.mul_vec(&[1.0, 1.0, 1.0], &mut y);
        assert_eq!(y, vec![5.0, -1.0]);
    }

    #[test]
    fn csr_transpose_mul() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 2.0), (1, 1, 3.0)]);
        let mut y = vec![0.0; 2];
        a.mul_t_vec(&[1.0, 1.0], &mut y);
        assert_eq!(y, vec![1.0, 5.0]);
    }

    #[test]
    fn ldl_matches_dense_on_spd() {
        let a = vec![
            vec![4.0, 1.0, 0.0, 0.5],
            vec![1.0, 3.0, 0.2, 0.0],
            vec![0.0, 0.2, 2.0, 0.3],
            vec![0.5, 0.0, 0.3, 5.0],
        ];
        let s = sym_from_dense(&a);
        let f = LdlFactor::factor(&s).unwrap();
        let b = vec![1.0, -2.0, 3.0, 0.25];
        let mut x = b.clone();
        f.solve_in_place(&mut x);
        let xd = dense_solve(&a, &b);
        for (xi, xdi) in x.iter().zip(&xd) {
            assert!((xi - xdi).abs() < 1e-12, "{xi} vs {xdi}");
        }
    }

    #[test]
    fn ldl_quasi_definite() {
        // KKT-style [[I, A^T], [A, -I]] block matrix
        let a = vec![
            vec![1.0, 0.0, 1.0, 2.0],
            vec![0.0, 1.0, 0.0, 1.0],
            vec![1.0, 0.0, -1.0, 0.0],
            vec![2.0, 1.0, 0.0, -1.0],
        ];
        let s = sym_from_dense(&a);
        let f = LdlFactor::factor(&s).unwrap();
        let b = vec![0.5, 1.5, -1.0, 2.0];
        let mut x = b.clone();
        f.solve_in_place(&mut x);
        let xd = dense_solve(&a, &b);
        for (xi, xdi) in x.iter().zip(&xd) {
            assert!((xi - xdi).abs() < 1e-12);
        }
    }

    #[test]
    fn refined_solve_improves_regularized_factor() {
        let exact = vec![
            vec![2.0, 1.0, 0.0],
            vec![1.0, 2.0, 1.0],
            vec![0.0, 1.0, 2.0],
        ];
        let mut reg = exact.clone();
        for i in 0..3 {
            reg[i][i] += 1e-4;
        }
        let s_exact = sym_from_dense(&exact);
        let s_reg = sym_from_dense(&reg);
        let f = LdlFactor::factor(&s_reg).unwrap();
        let b = vec![1.0, 0.0, -1.0];
        let x = f.solve_refined(&s_exact, &b, 4);
        let xd = dense_solve(&exact, &b);
        for (xi, xdi) in x.iter().zip(&xd) {
            assert!((xi - xdi).abs() < 1e-10);
        }
    }
}
