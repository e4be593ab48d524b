use super::scalar::Scalar;

/// Compressed sparse row storage of a Hermitian matrix; both triangles stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseHermitian<T> {
    pub dim: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<T>,
}

/// Sparsity pattern shared by all matrices of one discretization.
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    pub dim: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
}

impl Pattern {
    /// Builds a pattern from the (unsorted, possibly repeated) column lists of each row.
    pub fn from_rows(mut rows: Vec<Vec<usize>>) -> Self {
        let dim = rows.len();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut col_idx = Vec::new();
        row_ptr.push(0);
        for row in rows.iter_mut() {
            row.sort_unstable();
            row.dedup();
            col_idx.extend_from_slice(row);
            row_ptr.push(col_idx.len());
        }
        Self { dim, row_ptr, col_idx }
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    /// Position of `(i, j)` in the value array.
    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        let row = &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]];
        row.binary_search(&j).ok().map(|k| self.row_ptr[i] + k)
    }

    pub fn with_values<T>(&self, values: Vec<T>) -> SparseHermitian<T> {
        assert_eq!(values.len(), self.nnz());
        SparseHermitian {
            dim: self.dim,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values,
        }
    }
}

impl<T: Scalar> SparseHermitian<T> {
    pub fn pattern(&self) -> Pattern {
        Pattern { dim: self.dim, row_ptr: self.row_ptr.clone(), col_idx: self.col_idx.clone() }
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let row = &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]];
        match row.binary_search(&j) {
            Ok(k) => self.values[self.row_ptr[i] + k],
            Err(_) => T::ZERO,
        }
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()].iter().copied().zip(self.values[range].iter().copied())
    }

    pub fn matvec(&self, x: &[T], y: &mut [T]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.dim) {
            let mut acc = T::ZERO;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *yi = acc;
        }
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::ZERO; self.dim];
        self.matvec(x, &mut y);
        y
    }

    /// `max |A_ij - conj(A_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i).conj()).abs2().sqrt());
            }
        }
        worst
    }

    /// `max |Im A_ij|`.
    pub fn max_imag(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.im().abs()))
    }

    /// Symmetric permutation `P A P^T` where `perm[new] = old`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut inverse = vec![0; self.dim];
        for (new, &old) in perm.iter().enumerate() {
            inverse[old] = new;
        }
        let mut entries: Vec<Vec<(usize, T)>> = vec![Vec::new(); self.dim];
        for (new, &old) in perm.iter().enumerate() {
            entries[new] = self.row(old).map(|(j, v)| (inverse[j], v)).collect();
            entries[new].sort_by_key(|e| e.0);
        }
        let mut row_ptr = vec![0];
        let mut col_idx = Vec::with_capacity(self.values.len());
        let mut values = Vec::with_capacity(self.values.len());
        for row in entries {
            for (j, v) in row {
                col_idx.push(j);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        Self { dim: self.dim, row_ptr, col_idx, values }
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut dense = vec![vec![T::ZERO; self.dim]; self.dim];
        for (i, row) in dense.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        dense
    }
}
