use super::field::Field;
use crate::error::{invalid, Result};

/// Dense row-major matrix over a finite field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u8>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<u8>], cols: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return invalid("ragged matrix rows");
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [u8] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        self.data[i * self.cols + j] = v;
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.cols && self.rows > 0 && other.rows > 0 {
            return invalid("column mismatch in vstack");
        }
        let cols = if self.rows > 0 { self.cols } else { other.cols };
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix {
            rows: self.rows + other.rows,
            cols,
            data,
        })
    }

    /// First `k` rows.
    pub fn top_rows(&self, k: usize) -> Matrix {
        Matrix {
            rows: k,
            cols: self.cols,
            data: self.data[..k * self.cols].to_vec(),
        }
    }

    /// Row vector times matrix: sum_i x_i * row_i.
    pub fn left_mul(&self, f: &Field, x: &[u8]) -> Vec<u8> {
        let mut out = vec![0u8; self.cols];
        for (i, &c) in x.iter().enumerate().take(self.rows) {
            f.axpy(&mut out, c, self.row(i));
        }
        out
    }

    pub fn rank(&self, f: &Field) -> usize {
        let mut m = self.clone();
        row_reduce(f, &mut m, None).len()
    }
}

/// Reduces `m` to reduced row echelon form in place, applying the same row
/// operations to `rhs`. Returns the pivot columns.
fn row_reduce(f: &Field, m: &mut Matrix, mut rhs: Option<&mut Vec<u8>>) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        let Some(piv) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
            continue;
        };
        if piv != r {
            for j in 0..m.cols {
                m.data.swap(piv * m.cols + j, r * m.cols + j);
            }
            if let Some(b) = rhs.as_deref_mut() {
                b.swap(piv, r);
            }
        }
        let inv = f.inv(m.get(r, c)).expect("pivot is nonzero");
        for j in 0..m.cols {
            let v = f.mul(inv, m.get(r, j));
            m.set(r, j, v);
        }
        if let Some(b) = rhs.as_deref_mut() {
            b[r] = f.mul(inv, b[r]);
        }
        for i in 0..m.rows {
            if i == r {
                continue;
            }
            let factor = m.get(i, c);
            if factor == 0 {
                continue;
            }
            let nf = f.neg(factor);
            for j in 0..m.cols {
                let v = f.add(m.get(i, j), f.mul(nf, m.get(r, j)));
                m.set(i, j, v);
            }
            if let Some(b) = rhs.as_deref_mut() {
                b[i] = f.add(b[i], f.mul(nf, b[r]));
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Solution set `particular + span(basis)` of a linear system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineSolution {
    pub particular: Vec<u8>,
    pub basis: Vec<Vec<u8>>,
}

/// Solves `a * z = b` where `a` has one row per equation and one column per unknown.
/// Returns `None` if the system is inconsistent.
pub fn solve_affine(f: &Field, a: &Matrix, b: &[u8]) -> Option<AffineSolution> {
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    let pivots = row_reduce(f, &mut m, Some(&mut rhs));
    if rhs[pivots.len()..].iter().any(|&v| v != 0) {
        return None;
    }
    let unknowns = a.cols;
    let mut particular = vec![0u8; unknowns];
    for (r, &c) in pivots.iter().enumerate() {
        particular[c] = rhs[r];
    }
    let mut is_pivot = vec![false; unknowns];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut basis = Vec::new();
    for free in (0..unknowns).filter(|&c| !is_pivot[c]) {
        let mut v = vec![0u8; unknowns];
        v[free] = 1;
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = f.neg(m.get(r, free));
        }
        basis.push(v);
    }
    Some(AffineSolution { particular, basis })
}

/// Walks every vector `base + sum_i a_i rows_i` for `a` in F_q^k.
///
/// Consecutive steps change one coefficient at a time in odometer order, so each
/// step costs one or two vector additions instead of a full recomputation.
pub struct AffineWalker<'a> {
    field: &'a Field,
    multiples: Vec<Vec<Vec<u8>>>,
    digits: Vec<u8>,
    current: Vec<u8>,
    started: bool,
    done: bool,
}

impl<'a> AffineWalker<'a> {
    pub fn new(field: &'a Field, base: &[u8], rows: &[&[u8]]) -> Self {
        let q = field.order();
        let multiples = rows
            .iter()
            .map(|row| {
                (0..q as u8)
                    .map(|c| row.iter().map(|&x| field.mul(c, x)).collect())
                    .collect()
            })
            .collect();
        Self {
            field,
            multiples,
            digits: vec![0; rows.len()],
            current: base.to_vec(),
            started: false,
            done: false,
        }
    }

    /// Coefficients of the current vector.
    pub fn coefficients(&self) -> &[u8] {
        &self.digits
    }

    /// Advances and returns the next vector, or `None` when exhausted.
    pub fn next_vector(&mut self) -> Option<&[u8]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.current);
        }
        let q = self.field.order() as u8;
        for i in 0..self.digits.len() {
            let old = self.digits[i];
            let new = if old + 1 == q { 0 } else { old + 1 };
            self.digits[i] = new;
            let (sub, add) = (
                &self.multiples[i][old as usize],
                &self.multiples[i][new as usize],
            );
            for ((c, &s), &a) in self.current.iter_mut().zip(sub).zip(add) {
                *c = self.field.add(self.field.sub(*c, s), a);
            }
            if new != 0 {
                return Some(&self.current);
            }
        }
        self.done = true;
        None
    }
}

/// Iterates F_q^len in odometer order.
pub fn for_each_vector(q: usize, len: usize, mut visit: impl FnMut(&[u8])) {
    let mut v = vec![0u8; len];
    loop {
        visit(&v);
        let mut i = 0;
        loop {
            if i == len {
                return;
            }
            v[i] += 1;
            if (v[i] as usize) < q {
                break;
            }
            v[i] = 0;
            i += 1;
        }
    }
}
