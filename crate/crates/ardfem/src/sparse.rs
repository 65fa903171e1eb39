//! Compressed sparse row matrices for the assembled operators.
//!
//! Column indices are sorted and unique within each row. Matrices assembled
//! on the same space share one sparsity pattern (every local element block is
//! inserted, including exact zeros), which lets a time stepper combine them
//! entry-wise and reuse a cached symbolic factorization across steps.

/// CSR matrix over `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a CSR matrix from `(row, col, value)` triplets; duplicate
    /// entries are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut entries: Vec<(usize, usize, f64)> = triplets.to_vec();
        for &(r, c, _) in &entries {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
        }
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));

        let mut row_counts = vec![0usize; nrows];
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            if last == Some((r, c)) {
                // Same (row, col) as the previous entry: accumulate.
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_counts[r] += 1;
                last = Some((r, c));
            }
        }
        let mut row_ptr = vec![0usize; nrows + 1];
        for r in 0..nrows {
            row_ptr[r + 1] = row_ptr[r] + row_counts[r];
        }
        SparseMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
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
        self.values.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }

    fn row_mut(&mut self, i: usize) -> (&[usize], &mut [f64]) {
        let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[lo..hi], &mut self.values[lo..hi])
    }

    /// Stored value at `(i, j)`, zero when the entry is not in the pattern.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for i in 0..self.nrows {
            let (cols, vals) = (
                &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]],
                &self.values[self.row_ptr[i]..self.row_ptr[i + 1]],
            );
            let mut acc = 0.0;
            for (c, v) in cols.iter().zip(vals) {
                acc += v * x[*c];
            }
            y[i] = acc;
        }
    }

    /// Multiplies every stored entry of row `i` by `s`.
    pub fn scale_row(&mut self, i: usize, s: f64) {
        let (_, vals) = self.row_mut(i);
        for v in vals {
            *v *= s;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols))
            .map(|i| self.get(i, i))
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn same_pattern(&self, other: &SparseMatrix) -> bool {
        self.nrows == other.nrows
            && self.ncols == other.ncols
            && self.row_ptr == other.row_ptr
            && self.col_idx == other.col_idx
    }

    /// `sum_k c_k A_k` over matrices sharing one sparsity pattern.
    pub fn linear_combination(terms: &[(f64, &SparseMatrix)]) -> SparseMatrix {
        assert!(!terms.is_empty());
        let first = terms[0].1;
        let mut out = SparseMatrix {
            nrows: first.nrows,
            ncols: first.ncols,
            row_ptr: first.row_ptr.clone(),
            col_idx: first.col_idx.clone(),
            values: vec![0.0; first.nnz()],
        };
        for &(c, m) in terms {
            assert!(m.same_pattern(first), "pattern mismatch in combination");
            for (o, v) in out.values.iter_mut().zip(&m.values) {
                *o += c * v;
            }
        }
        out
    }

    /// Pattern and values in compressed sparse column order
    /// (`col_ptr`, `row_idx`, `values`); row indices ascend in each column.
    pub fn to_csc(&self) -> (Vec<usize>, Vec<usize>, Vec<f64>) {
        let mut col_ptr = vec![0usize; self.ncols + 1];
        for &c in &self.col_idx {
            col_ptr[c + 1] += 1;
        }
        for c in 0..self.ncols {
            col_ptr[c + 1] += col_ptr[c];
        }
        let mut row_idx = vec![0usize; self.nnz()];
        let mut vals = vec![0.0; self.nnz()];
        let mut cursor = col_ptr.clone();
        for r in 0..self.nrows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.col_idx[k];
                let dst = cursor[c];
                row_idx[dst] = r;
                vals[dst] = self.values[k];
                cursor[c] += 1;
            }
        }
        (col_ptr, row_idx, vals)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.ncols]; self.nrows];
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (c, v) in cols.iter().zip(vals) {
                dense[r][*c] = *v;
            }
        }
        dense
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        if self.nrows != self.ncols {
            return false;
        }
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (c, v) in cols.iter().zip(vals) {
                if (v - self.get(*c, r)).abs() > tol {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_are_sorted_and_duplicates_summed() {
        let m = SparseMatrix::from_triplets(
            3,
            3,
            &[
                (2, 0, 5.0),
                (0, 1, 1.0),
                (0, 0, 2.0),
                (0, 1, 3.0),
                (1, 2, -1.0),
            ],
        );
        assert_eq!(m.nnz(), 4);
        assert_eq!(m.get(0, 1), 4.0);
        assert_eq!(m.get(0, 0), 2.0);
        assert_eq!(m.get(2, 0), 5.0);
        assert_eq!(m.get(1, 1), 0.0);
        for r in 0..3 {
            let (cols, _) = m.row(r);
            assert!(cols.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn matvec_matches_dense_product() {
        let m = SparseMatrix::from_triplets(
            2,
            3,
            &[(0, 0, 1.0), (0, 2, 2.0), (1, 1, -3.0), (1, 2, 0.5)],
        );
        let y = m.matvec(&[1.0, 2.0, 4.0]);
        assert_eq!(y, vec![9.0, -4.0]);
    }

    #[test]
    fn row_scaling_and_diagonal() {
        let mut m =
            SparseMatrix::from_triplets(2, 2, &[(0, 0, 2.0), (0, 1, 4.0), (1, 1, 6.0)]);
        m.scale_row(0, 0.5);
        assert_eq!(m.get(0, 0), 1.0);
        assert_eq!(m.get(0, 1), 2.0);
        assert_eq!(m.diagonal(), vec![1.0, 6.0]);
    }

    #[test]
    fn linear_combination_requires_shared_pattern() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 1, 2.0), (0, 1, 0.0)]);
        let b = SparseMatrix::from_triplets(2, 2, &[(0, 0, 3.0), (1, 1, -1.0), (0, 1, 2.0)]);
        let c = SparseMatrix::linear_combination(&[(2.0, &a), (1.0, &b)]);
        assert_eq!(c.get(0, 0), 5.0);
        assert_eq!(c.get(1, 1), 3.0);
        assert_eq!(c.get(0, 1), 2.0);
    }

    #[test]
    fn csc_conversion_preserves_the_matrix() {
        let m = SparseMatrix::from_triplets(
            3,
            4,
            &[(0, 3, 1.0), (1, 0, 2.0), (2, 3, 3.0), (1, 1, 4.0), (0, 0, 5.0)],
        );
        let (col_ptr, row_idx, vals) = m.to_csc();
        assert_eq!(col_ptr.len(), 5);
        assert_eq!(*col_ptr.last().unwrap(), m.nnz());
        let mut dense = vec![vec![0.0; 4]; 3];
        for c in 0..4 {
            for k in col_ptr[c]..col_ptr[c + 1] {
                dense[row_idx[k]][c] = vals[k];
            }
            let rows = &row_idx[col_ptr[c]..col_ptr[c + 1]];
            assert!(rows.windows(2).all(|w| w[0] < w[1]));
        }
        assert_eq!(dense, m.to_dense());
    }
}
