//! Dense row-major tensors of rank 1 or 2.

use crate::numerics::NumericsError;
use crate::scalar::Scalar;

/// Dense tensor; `data.len()` always equals the product of `shape`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor<S> {
    shape: Vec<usize>,
    data: Vec<S>,
}

impl<S: Scalar> Tensor<S> {
    pub fn from_vec(shape: Vec<usize>, data: Vec<S>) -> Result<Self, NumericsError> {
        let expect: usize = shape.iter().product();
        if expect != data.len() {
            return Err(NumericsError::ShapeMismatch {
                op: "from_vec",
                detail: format!("shape {:?} needs {} entries, got {}", shape, expect, data.len()),
            });
        }
        Ok(Self { shape, data })
    }

    /// Rank-1 tensor.
    pub fn vector(data: Vec<S>) -> Self {
        Self { shape: vec![data.len()], data }
    }

    /// Rank-2 row-major tensor.
    pub fn matrix(rows: usize, cols: usize, data: Vec<S>) -> Result<Self, NumericsError> {
        Self::from_vec(vec![rows, cols], data)
    }

    pub fn scalar(x: S) -> Self {
        Self { shape: vec![1], data: vec![x] }
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let n: usize = shape.iter().product();
        Self { shape, data: vec![S::zero(); n] }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [S] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<S> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn is_scalar(&self) -> bool {
        self.data.len() == 1
    }

    /// Single element of a scalar tensor.
    pub fn item(&self) -> Result<S, NumericsError> {
        if self.is_scalar() {
            Ok(self.data[0])
        } else {
            Err(NumericsError::NonScalarOutput { len: self.data.len() })
        }
    }

    /// Views the tensor as `(rows, cols)`, treating rank-1 as one row.
    pub fn as_2d(&self) -> (usize, usize) {
        match self.shape.len() {
            1 => (1, self.shape[0]),
            2 => (self.shape[0], self.shape[1]),
            _ => unreachable!("tensors are rank 1 or 2"),
        }
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn map(&self, f: impl Fn(S) -> S) -> Self {
        Self {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    fn zip(&self, other: &Self, op: &'static str, f: impl Fn(S, S) -> S) -> Result<Self, NumericsError> {
        if self.shape != other.shape {
            return Err(NumericsError::ShapeMismatch {
                op,
                detail: format!("{:?} vs {:?}", self.shape, other.shape),
            });
        }
        Ok(Self {
            shape: self.shape.clone(),
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self, NumericsError> {
        self.zip(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, NumericsError> {
        self.zip(other, "sub", |a, b| a - b)
    }

    pub fn mul_elem(&self, other: &Self) -> Result<Self, NumericsError> {
        self.zip(other, "mul", |a, b| a * b)
    }

    pub fn scale(&self, c: S) -> Self {
        self.map(|x| x * c)
    }

    pub fn sum(&self) -> S {
        self.data.iter().copied().sum()
    }

    /// `x · Wᵀ + b` applied row-wise; `x` is `(B, n)` (or a length-`n`
    /// vector), `w` is `(m, n)`, `b` is length `m`.
    pub fn linear(&self, w: &Self, b: &Self) -> Result<Self, NumericsError> {
        let (rows, n) = self.as_2d();
        let (m, wn) = w.as_2d();
        if w.shape.len() != 2 || wn != n || b.shape != vec![m] {
            return Err(NumericsError::ShapeMismatch {
                op: "linear",
                detail: format!("x {:?}, w {:?}, b {:?}", self.shape, w.shape, b.shape),
            });
        }
        let mut out = vec![S::zero(); rows * m];
        for r in 0..rows {
            let x_row = &self.data[r * n..(r + 1) * n];
            let out_row = &mut out[r * m..(r + 1) * m];
            for (j, o) in out_row.iter_mut().enumerate() {
                let w_row = &w.data[j * n..(j + 1) * n];
                let mut acc = b.data[j];
                for i in 0..n {
                    acc += x_row[i] * w_row[i];
                }
                *o = acc;
            }
        }
        let shape = if self.shape.len() == 1 { vec![m] } else { vec![rows, m] };
        Tensor::from_vec(shape, out)
    }

    /// Plain matrix product; shapes `(r, k) × (k, c)`.
    pub fn matmul(&self, other: &Self) -> Result<Self, NumericsError> {
        let (r, k) = self.as_2d();
        let (k2, c) = other.as_2d();
        if k != k2 {
            return Err(NumericsError::ShapeMismatch {
                op: "matmul",
                detail: format!("{:?} × {:?}", self.shape, other.shape),
            });
        }
        let mut out = vec![S::zero(); r * c];
        for i in 0..r {
            for l in 0..k {
                let a = self.data[i * k + l];
                if a == S::zero() {
                    continue;
                }
                let b_row = &other.data[l * c..(l + 1) * c];
                let out_row = &mut out[i * c..(i + 1) * c];
                for j in 0..c {
                    out_row[j] += a * b_row[j];
                }
            }
        }
        Tensor::from_vec(vec![r, c], out)
    }

    pub fn transpose(&self) -> Self {
        let (r, c) = self.as_2d();
        let mut out = vec![S::zero(); r * c];
        for i in 0..r {
            for j in 0..c {
                out[j * r + i] = self.data[i * c + j];
            }
        }
        Self { shape: vec![c, r], data: out }
    }

    /// Sums each row of a `(B, n)` tensor into a `(B, 1)` tensor.
    pub fn row_sum(&self) -> Self {
        let (rows, cols) = self.as_2d();
        let data = (0..rows)
            .map(|r| self.data[r * cols..(r + 1) * cols].iter().copied().sum())
            .collect();
        Self { shape: vec![rows, 1], data }
    }

    /// Sums columns of a `(B, n)` tensor into a length-`n` vector.
    pub fn col_sum(&self) -> Self {
        let (rows, cols) = self.as_2d();
        let mut data = vec![S::zero(); cols];
        for r in 0..rows {
            for (j, d) in data.iter_mut().enumerate() {
                *d += self.data[r * cols + j];
            }
        }
        Self { shape: vec![cols], data }
    }

    /// Repeats a length-`n` vector into `(rows, n)`.
    pub fn broadcast_rows(&self, rows: usize) -> Result<Self, NumericsError> {
        if self.shape.len() != 1 {
            return Err(NumericsError::ShapeMismatch {
                op: "broadcast_rows",
                detail: format!("expected rank-1, got {:?}", self.shape),
            });
        }
        let n = self.data.len();
        let mut data = Vec::with_capacity(rows * n);
        for _ in 0..rows {
            data.extend_from_slice(&self.data);
        }
        Ok(Self { shape: vec![rows, n], data })
    }

    /// Concatenates along the last axis; row counts must agree.
    pub fn concat_cols(&self, other: &Self) -> Result<Self, NumericsError> {
        let (r1, c1) = self.as_2d();
        let (r2, c2) = other.as_2d();
        if r1 != r2 || self.shape.len() != other.shape.len() {
            return Err(NumericsError::ShapeMismatch {
                op: "concat",
                detail: format!("{:?} ++ {:?}", self.shape, other.shape),
            });
        }
        let mut data = Vec::with_capacity(self.data.len() + other.data.len());
        for r in 0..r1 {
            data.extend_from_slice(&self.data[r * c1..(r + 1) * c1]);
            data.extend_from_slice(&other.data[r * c2..(r + 1) * c2]);
        }
        let shape = if self.shape.len() == 1 { vec![c1 + c2] } else { vec![r1, c1 + c2] };
        Ok(Self { shape, data })
    }

    /// Splits off the first `cols` columns, returning `(left, right)`.
    pub fn split_cols(&self, cols: usize) -> Result<(Self, Self), NumericsError> {
        let (rows, total) = self.as_2d();
        if cols > total {
            return Err(NumericsError::ShapeMismatch {
                op: "split",
                detail: format!("split at {} of {:?}", cols, self.shape),
            });
        }
        let mut left = Vec::with_capacity(rows * cols);
        let mut right = Vec::with_capacity(rows * (total - cols));
        for r in 0..rows {
            left.extend_from_slice(&self.data[r * total..r * total + cols]);
            right.extend_from_slice(&self.data[r * total + cols..(r + 1) * total]);
        }
        let rank1 = self.shape.len() == 1;
        let mk = |c: usize, d: Vec<S>| {
            if rank1 {
                Self { shape: vec![c], data: d }
            } else {
                Self { shape: vec![rows, c], data: d }
            }
        };
        Ok((mk(cols, left), mk(total - cols, right)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_matches_by_hand() {
        // w = [[1,2],[3,4],[5,6]], x = (1,1), b = (10,20,30)
        let w = Tensor::matrix(3, 2, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let x = Tensor::vector(vec![1.0, 1.0]);
        let b = Tensor::vector(vec![10.0, 20.0, 30.0]);
        let y = x.linear(&w, &b).unwrap();
        assert_eq!(y.data(), &[13.0, 27.0, 41.0]);
    }

    #[test]
    fn linear_batched() {
        let w = Tensor::matrix(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let b = Tensor::vector(vec![1.0, -1.0]);
        let x = Tensor::matrix(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let y = x.linear(&w, &b).unwrap();
        assert_eq!(y.shape(), &[2, 2]);
        assert_eq!(y.data(), &[2.0, 1.0, 4.0, 3.0]);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let a = Tensor::vector(vec![1.0, 2.0]);
        let b = Tensor::vector(vec![1.0]);
        assert!(a.add(&b).is_err());
    }

    #[test]
    fn split_concat_roundtrip() {
        let t = Tensor::matrix(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let (l, r) = t.split_cols(2).unwrap();
        assert_eq!(l.shape(), &[2, 2]);
        assert_eq!(r.shape(), &[2, 1]);
        assert_eq!(l.concat_cols(&r).unwrap(), t);
    }

    #[test]
    fn row_and_col_sums() {
        let t = Tensor::matrix(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(t.row_sum().data(), &[3.0, 7.0]);
        assert_eq!(t.col_sum().data(), &[4.0, 6.0]);
    }
}
