use nalgebra::DMatrix;

/// Coordinate-format accumulator. Duplicates are summed in insertion order
/// when compressed.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Triplets {
    pub nrows: usize,
    pub ncols: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl Triplets {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Triplets { nrows, ncols, entries: Vec::new() }
    }

    pub fn push(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.nrows && j < self.ncols, "({i}, {j}) outside {}x{}", self.nrows, self.ncols);
        self.entries.push((i, j, v));
    }

    /// Adds `v` at `(i, j)` and `(j, i)` (once on the diagonal).
    pub fn push_sym(&mut self, i: usize, j: usize, v: f64) {
        self.push(i, j, v);
        if i != j {
            self.push(j, i, v);
        }
    }

    /// Adds a symmetric local block using only its upper triangle.
    pub fn push_sym_block(&mut self, dofs: &[usize], local: &[Vec<f64>]) {
        for (r, &i) in dofs.iter().enumerate() {
            for (c, &j) in dofs.iter().enumerate().skip(r) {
                self.push_sym(i, j, local[r][c]);
            }
        }
    }

    /// Appends another accumulator shifted by `(row_offset, col_offset)`.
    pub fn append_shifted(&mut self, other: &SparseMatrix, row_offset: usize, col_offset: usize) {
        for (i, j, v) in other.iter() {
            self.push(i + row_offset, j + col_offset, v);
        }
    }

    /// Appends the transpose of `other` shifted by `(row_offset, col_offset)`.
    pub fn append_transposed(&mut self, other: &SparseMatrix, row_offset: usize, col_offset: usize) {
        for (i, j, v) in other.iter() {
            self.push(j + row_offset, i + col_offset, v);
        }
    }

    pub fn to_matrix(&self) -> SparseMatrix {
        SparseMatrix::from_triplets(self)
    }
}

/// Compressed sparse column matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub col_ptr: Vec<usize>,
    pub row_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseMatrix {
    pub fn from_triplets(t: &Triplets) -> Self {
        let mut order: Vec<usize> = (0..t.entries.len()).collect();
        order.sort_by_key(|&k| (t.entries[k].1, t.entries[k].0));
        let mut col_ptr = vec![0; t.ncols + 1];
        let mut row_idx = Vec::with_capacity(order.len());
        let mut values: Vec<f64> = Vec::with_capacity(order.len());
        let mut last: Option<(usize, usize)> = None;
        for k in order {
            let (i, j, v) = t.entries[k];
            if last == Some((i, j)) {
                *values.last_mut().expect("previous entry") += v;
            } else {
                row_idx.push(i);
                values.push(v);
                col_ptr[j + 1] += 1;
                last = Some((i, j));
            }
        }
        for j in 0..t.ncols {
            col_ptr[j + 1] += col_ptr[j];
        }
        SparseMatrix { nrows: t.nrows, ncols: t.ncols, col_ptr, row_idx, values }
    }

    pub fn identity(n: usize) -> Self {
        let mut t = Triplets::new(n, n);
        for i in 0..n {
            t.push(i, i, 1.0);
        }
        t.to_matrix()
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Stored entries `(row, col, value)` in column-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.ncols).flat_map(move |j| {
            (self.col_ptr[j]..self.col_ptr[j + 1]).map(move |k| (self.row_idx[k], j, self.values[k]))
        })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.col_ptr[j]..self.col_ptr[j + 1];
        match self.row_idx[range.clone()].binary_search(&i) {
            Ok(k) => self.values[range.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        for (i, j, v) in self.iter() {
            y[i] += v * x[j];
        }
        y
    }

    pub fn transpose_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.ncols)
            .map(|j| (self.col_ptr[j]..self.col_ptr[j + 1]).map(|k| self.values[k] * x[self.row_idx[k]]).sum())
            .collect()
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut t = Triplets::new(self.ncols, self.nrows);
        for (i, j, v) in self.iter() {
            t.push(j, i, v);
        }
        t.to_matrix()
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.ncols)
            .map(|j| self.values[self.col_ptr[j]..self.col_ptr[j + 1]].iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `max |A - Aᵀ|` over stored entries.
    pub fn max_asymmetry(&self) -> f64 {
        if self.nrows != self.ncols {
            return f64::INFINITY;
        }
        self.iter().map(|(i, j, v)| (v - self.get(j, i)).abs()).fold(0.0, f64::max)
    }

    /// Bitwise symmetry of values and pattern.
    pub fn is_symmetric(&self) -> bool {
        self.nrows == self.ncols && self.iter().all(|(i, j, v)| self.get(j, i).to_bits() == v.to_bits())
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.iter() {
            d[(i, j)] += v;
        }
        d
    }

    /// Column `j` as `(row, value)` pairs.
    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.col_ptr[j]..self.col_ptr[j + 1]).map(move |k| (self.row_idx[k], self.values[k]))
    }

    /// Zeroes the rows and columns in `dofs` and puts one on their diagonal.
    pub fn eliminate(&mut self, dofs: &[bool]) {
        let mut t = Triplets::new(self.nrows, self.ncols);
        for (i, j, v) in self.iter() {
            if !dofs[i] && !dofs[j] {
                t.push(i, j, v);
            }
        }
        for (i, &d) in dofs.iter().enumerate() {
            if d {
                t.push(i, i, 1.0);
            }
        }
        *self = t.to_matrix();
    }
}
