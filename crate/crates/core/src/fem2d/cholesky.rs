//! Reverse Cuthill-McKee ordering and envelope (skyline) Cholesky factorization.

use std::collections::VecDeque;

use super::scalar::Scalar;
use super::sparse::{Pattern, SparseHermitian};
use crate::error::{Error, Result};

/// Reverse Cuthill-McKee permutation, `perm[new] = old`.
pub fn reverse_cuthill_mckee(pattern: &Pattern) -> Vec<usize> {
    let n = pattern.dim;
    let neighbours = |i: usize| pattern.col_idx[pattern.row_ptr[i]..pattern.row_ptr[i + 1]].iter().copied();
    let degree = |i: usize| pattern.row_ptr[i + 1] - pattern.row_ptr[i];
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut level = vec![0usize; n];

    let bfs_depth = |start: usize, level: &mut [usize]| -> (usize, usize) {
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        level[start] = 0;
        let mut last = start;
        while let Some(v) = queue.pop_front() {
            last = v;
            for w in neighbours(v) {
                if !seen[w] {
                    seen[w] = true;
                    level[w] = level[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        (level[last], last)
    };

    for seed in 0..n {
        if visited[seed] {
            continue;
        }
        // pseudo-peripheral start: repeat BFS from the farthest low-degree node
        let mut start = seed;
        let (mut depth, mut far) = bfs_depth(start, &mut level);
        for _ in 0..8 {
            let (d, f) = bfs_depth(far, &mut level);
            if d <= depth {
                break;
            }
            start = far;
            depth = d;
            far = f;
        }
        visited[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut next = Vec::new();
        while let Some(v) = queue.pop_front() {
            order.push(v);
            next.clear();
            next.extend(neighbours(v).filter(|&w| !visited[w]));
            next.sort_by_key(|&w| (degree(w), w));
            for &w in &next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// Profile of the lower triangle of a symmetrically permuted pattern.
#[derive(Debug, Clone)]
pub struct SkylineLayout {
    pub perm: Vec<usize>,
    pub inverse: Vec<usize>,
    /// First stored column of each (permuted) row.
    pub first: Vec<usize>,
    /// Offset of each row in the value array; row `i` holds columns `first[i]..=i`.
    pub offset: Vec<usize>,
}

impl SkylineLayout {
    pub fn new(pattern: &Pattern) -> Self {
        Self::with_permutation(pattern, reverse_cuthill_mckee(pattern))
    }

    pub fn with_permutation(pattern: &Pattern, perm: Vec<usize>) -> Self {
        let n = pattern.dim;
        let mut inverse = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inverse[old] = new;
        }
        let mut first = vec![0; n];
        for (i, &old) in perm.iter().enumerate() {
            let row = &pattern.col_idx[pattern.row_ptr[old]..pattern.row_ptr[old + 1]];
            first[i] = row.iter().map(|&j| inverse[j]).filter(|&j| j <= i).min().unwrap_or(i);
        }
        let mut offset = Vec::with_capacity(n + 1);
        offset.push(0);
        for i in 0..n {
            offset.push(offset[i] + (i - first[i] + 1));
        }
        SkylineLayout { perm, inverse, first, offset }
    }

    pub fn storage(&self) -> usize {
        *self.offset.last().unwrap_or(&0)
    }

    /// Factors `A - shift * M` as `L L^H`. Fails with the first non-positive pivot,
    /// which happens exactly when the shifted matrix is not positive definite.
    pub fn factor<T: Scalar>(&self, a: &SparseHermitian<T>, m: &SparseHermitian<T>, shift: f64) -> Result<Skyline<T>> {
        let n = self.perm.len();
        let mut values = vec![T::ZERO; self.storage()];
        for (i, &old) in self.perm.iter().enumerate() {
            let base = self.offset[i] - self.first[i];
            let range = a.row_ptr[old]..a.row_ptr[old + 1];
            for k in range {
                let j = self.inverse[a.col_idx[k]];
                if j <= i {
                    values[base + j] += a.values[k];
                }
            }
            let range = m.row_ptr[old]..m.row_ptr[old + 1];
            for k in range {
                let j = self.inverse[m.col_idx[k]];
                if j <= i {
                    values[base + j] -= m.values[k].scale(shift);
                }
            }
        }
        for i in 0..n {
            let fi = self.first[i];
            let oi = self.offset[i];
            for j in fi..i {
                let fj = self.first[j];
                let oj = self.offset[j];
                let start = fi.max(fj);
                let (head, tail) = values.split_at_mut(oi);
                let row_j = &head[oj..];
                let row_i = &mut tail[..];
                let mut s = row_i[j - fi];
                for k in start..j {
                    s -= row_i[k - fi] * row_j[k - fj].conj();
                }
                row_i[j - fi] = s.scale(1.0 / row_j[j - fj].re());
            }
            let row_i = &mut values[oi..self.offset[i + 1]];
            let mut d = row_i[i - fi].re();
            for v in &row_i[..i - fi] {
                d -= v.abs2();
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::Factorization { pivot: i, shift });
            }
            row_i[i - fi] = T::from_re(d.sqrt());
        }
        Ok(Skyline { layout: self.clone(), values, shift })
    }
}

/// Envelope Cholesky factor of a shifted Hermitian pencil.
#[derive(Debug, Clone)]
pub struct Skyline<T> {
    pub layout: SkylineLayout,
    pub values: Vec<T>,
    pub shift: f64,
}

impl<T: Scalar> Skyline<T> {
    /// Solves `(A - shift M) x = b` in the original numbering.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let lay = &self.layout;
        let n = lay.perm.len();
        let mut y: Vec<T> = lay.perm.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let fi = lay.first[i];
            let row = &self.values[lay.offset[i]..lay.offset[i + 1]];
            let mut s = y[i];
            for (k, v) in row[..i - fi].iter().enumerate() {
                s -= *v * y[fi + k];
            }
            y[i] = s.scale(1.0 / row[i - fi].re());
        }
        for i in (0..n).rev() {
            let fi = lay.first[i];
            let row = &self.values[lay.offset[i]..lay.offset[i + 1]];
            let xi = y[i].scale(1.0 / row[i - fi].re());
            y[i] = xi;
            for (k, v) in row[..i - fi].iter().enumerate() {
                y[fi + k] -= v.conj() * xi;
            }
        }
        let mut x = vec![T::ZERO; n];
        for (i, &old) in lay.perm.iter().enumerate() {
            x[old] = y[i];
        }
        x
    }
}
