//! Dense row-major matrices over a [`Field`], plus echelon-form subspaces.
//!
//! All routines take the field explicitly; matrices store only their entries.

use std::ops::{Index, IndexMut};

use crate::field::{Fe, Field};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Fe>,
}

impl Index<(usize, usize)> for Mat {
    type Output = Fe;
    fn index(&self, (i, j): (usize, usize)) -> &Fe {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Fe {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Fe>>) -> Mat {
        assert!(!rows.is_empty(), "from_rows needs at least one row");
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let data = rows.concat();
        Mat { rows: rows.len(), cols, data }
    }

    pub fn row(&self, i: usize) -> &[Fe] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Fe> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &Mat, f: &Field) -> Mat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other[(k, j)];
                    if b != 0 {
                        out[(i, j)] = f.add(out[(i, j)], f.mul(a, b));
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Mat, f: &Field) -> Mat {
        assert!(self.rows == other.rows && self.cols == other.cols);
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: Fe, f: &Field) -> Mat {
        let data = self.data.iter().map(|&a| f.mul(a, c)).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn apply(&self, v: &[Fe], f: &Field) -> Vec<Fe> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matrix-vector product");
        let mut out = vec![0; self.rows];
        for i in 0..self.rows {
            let mut acc: Fe = 0;
            let row = self.row(i);
            for (j, &x) in v.iter().enumerate() {
                if x != 0 && row[j] != 0 {
                    acc = f.add(acc, f.mul(row[j], x));
                }
            }
            out[i] = acc;
        }
        out
    }

    pub fn pow(&self, e: usize, f: &Field) -> Mat {
        assert_eq!(self.rows, self.cols);
        let mut acc = Mat::identity(self.rows);
        for _ in 0..e {
            acc = acc.mul(self, f);
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&a| a == 0)
    }

    /// Reduced row echelon form; returns (rref, pivot columns).
    pub fn rref(&self, f: &Field) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let mut pivot_row = None;
            for i in r..m.rows {
                if m[(i, c)] != 0 {
                    pivot_row = Some(i);
                    break;
                }
            }
            let Some(pr) = pivot_row else { continue };
            if pr != r {
                for j in 0..m.cols {
                    m.data.swap(r * m.cols + j, pr * m.cols + j);
                }
            }
            let inv = f.inv(m[(r, c)]);
            for j in c..m.cols {
                m[(r, j)] = f.mul(m[(r, j)], inv);
            }
            for i in 0..m.rows {
                if i != r && m[(i, c)] != 0 {
                    let factor = m[(i, c)];
                    for j in c..m.cols {
                        let t = f.mul(factor, m[(r, j)]);
                        m[(i, j)] = f.sub(m[(i, j)], t);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self, f: &Field) -> usize {
        self.rref(f).1.len()
    }

    pub fn det(&self, f: &Field) -> Fe {
        assert_eq!(self.rows, self.cols);
        let mut m = self.clone();
        let n = m.rows;
        let mut det: Fe = 1;
        for c in 0..n {
            let mut pivot_row = None;
            for i in c..n {
                if m[(i, c)] != 0 {
                    pivot_row = Some(i);
                    break;
                }
            }
            let Some(pr) = pivot_row else { return 0 };
            if pr != c {
                for j in 0..n {
                    m.data.swap(c * n + j, pr * n + j);
                }
                det = f.neg(det);
            }
            det = f.mul(det, m[(c, c)]);
            let inv = f.inv(m[(c, c)]);
            for i in c + 1..n {
                if m[(i, c)] != 0 {
                    let factor = f.mul(m[(i, c)], inv);
                    for j in c..n {
                        let t = f.mul(factor, m[(c, j)]);
                        m[(i, j)] = f.sub(m[(i, j)], t);
                    }
                }
            }
        }
        det
    }

    pub fn inverse(&self, f: &Field) -> Option<Mat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Mat::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)];
            }
            aug[(i, n + i)] = 1;
        }
        let (r, pivots) = aug.rref(f);
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        let mut inv = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r[(i, n + j)];
            }
        }
        Some(inv)
    }

    /// One solution x of A x = b, if any.
    pub fn solve(&self, b: &[Fe], f: &Field) -> Option<Vec<Fe>> {
        assert_eq!(self.rows, b.len());
        let mut aug = Mat::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)];
            }
            aug[(i, self.cols)] = b[i];
        }
        let (r, pivots) = aug.rref(f);
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![0; self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r[(row, self.cols)];
        }
        Some(x)
    }

    /// Echelon basis of the right kernel {x : A x = 0}.
    pub fn kernel_basis(&self, f: &Field) -> Vec<Vec<Fe>> {
        let (r, pivots) = self.rref(f);
        let mut basis = Vec::new();
        let pivot_set: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &p in &pivots {
                v[p] = true;
            }
            v
        };
        for free in 0..self.cols {
            if pivot_set[free] {
                continue;
            }
            let mut x = vec![0; self.cols];
            x[free] = 1;
            for (row, &pc) in pivots.iter().enumerate() {
                if pc < free {
                    x[pc] = f.neg(r[(row, free)]);
                }
            }
            basis.push(x);
        }
        basis
    }
}

/// A subspace stored as a reduced-echelon row basis; equality is syntactic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    pub ambient: usize,
    /// Rows form a reduced echelon basis (possibly zero rows omitted).
    pub basis: Mat,
    pub pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Subspace {
        Subspace { ambient, basis: Mat::zeros(0, ambient), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Subspace {
        Subspace { ambient, basis: Mat::identity(ambient), pivots: (0..ambient).collect() }
    }

    /// Span of the given vectors, reduced to canonical echelon form.
    pub fn span(vectors: &[Vec<Fe>], ambient: usize, f: &Field) -> Subspace {
        if vectors.is_empty() {
            return Subspace::zero(ambient);
        }
        assert!(vectors.iter().all(|v| v.len() == ambient), "vector length mismatch");
        let m = Mat::from_rows(vectors.to_vec());
        let (r, pivots) = m.rref(f);
        let rank = pivots.len();
        let mut basis = Mat::zeros(rank, ambient);
        for i in 0..rank {
            for j in 0..ambient {
                basis[(i, j)] = r[(i, j)];
            }
        }
        Subspace { ambient, basis, pivots }
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn contains(&self, v: &[Fe], f: &Field) -> bool {
        self.reduce(v, f).iter().all(|&c| c == 0)
    }

    /// v modulo this subspace: subtract the echelon projection.
    pub fn reduce(&self, v: &[Fe], f: &Field) -> Vec<Fe> {
        assert_eq!(v.len(), self.ambient);
        let mut w = v.to_vec();
        for (row, &pc) in self.pivots.iter().enumerate() {
            if w[pc] != 0 {
                let c = w[pc];
                for j in 0..self.ambient {
                    let t = f.mul(c, self.basis[(row, j)]);
                    w[j] = f.sub(w[j], t);
                }
            }
        }
        w
    }

    /// Coordinates of v in this subspace's echelon basis; None if v is
    /// outside.
    pub fn coords(&self, v: &[Fe], f: &Field) -> Option<Vec<Fe>> {
        let mut w = v.to_vec();
        let mut coords = vec![0; self.dim()];
        for (row, &pc) in self.pivots.iter().enumerate() {
            if w[pc] != 0 {
                let c = w[pc];
                coords[row] = c;
                for j in 0..self.ambient {
                    let t = f.mul(c, self.basis[(row, j)]);
                    w[j] = f.sub(w[j], t);
                }
            }
        }
        if w.iter().all(|&c| c == 0) {
            Some(coords)
        } else {
            None
        }
    }

    pub fn sum(&self, other: &Subspace, f: &Field) -> Subspace {
        assert_eq!(self.ambient, other.ambient);
        let mut rows: Vec<Vec<Fe>> = Vec::new();
        for i in 0..self.basis.rows {
            rows.push(self.basis.row(i).to_vec());
        }
        for i in 0..other.basis.rows {
            rows.push(other.basis.row(i).to_vec());
        }
        Subspace::span(&rows, self.ambient, f)
    }

    pub fn basis_vectors(&self) -> Vec<Vec<Fe>> {
        (0..self.basis.rows).map(|i| self.basis.row(i).to_vec()).collect()
    }

    /// All q^dim vectors of the subspace (small subspaces only).
    pub fn all_vectors(&self, f: &Field) -> Vec<Vec<Fe>> {
        let dim = self.dim();
        let mut out = Vec::with_capacity(f.q.pow(dim as u32));
        let mut counter = vec![0u16; dim];
        loop {
            let mut v = vec![0; self.ambient];
            for (row, &c) in counter.iter().enumerate() {
                if c != 0 {
                    for j in 0..self.ambient {
                        v[j] = f.add(v[j], f.mul(c, self.basis[(row, j)]));
                    }
                }
            }
            out.push(v);
            let mut k = 0;
            loop {
                if k == dim {
                    return out;
                }
                counter[k] += 1;
                if (counter[k] as usize) < f.q {
                    break;
                }
                counter[k] = 0;
                k += 1;
            }
        }
    }
}
