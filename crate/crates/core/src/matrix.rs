//! Minimal dense complex matrix. Dimensions here never exceed 64, so a
//! flat row-major `Vec` beats anything fancier.

use crate::{Real, C};

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T: Real> {
    dim: usize,
    data: Vec<C<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(dim: usize) -> ComplexMatrix<T> {
        ComplexMatrix {
            dim,
            data: vec![C::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C<T> {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: C<T>) {
        self.data[row * self.dim + col] = value;
    }

    #[inline]
    pub fn add_to(&mut self, row: usize, col: usize, value: C<T>) {
        self.data[row * self.dim + col] = self.data[row * self.dim + col] + value;
    }

    /// out = self * y
    pub fn matvec(&self, y: &[C<T>], out: &mut [C<T>]) {
        debug_assert_eq!(y.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        for (row, o) in out.iter_mut().enumerate() {
            let mut acc = C::new(T::zero(), T::zero());
            let base = row * self.dim;
            for (k, yk) in y.iter().enumerate() {
                acc = acc + self.data[base + k] * *yk;
            }
            *o = acc;
        }
    }

    /// out += scale * (self * y)
    pub fn matvec_acc(&self, y: &[C<T>], scale: C<T>, out: &mut [C<T>]) {
        for (row, o) in out.iter_mut().enumerate() {
            let mut acc = C::new(T::zero(), T::zero());
            let base = row * self.dim;
            for (k, yk) in y.iter().enumerate() {
                acc = acc + self.data[base + k] * *yk;
            }
            *o = *o + scale * acc;
        }
    }

    /// self += scale * other, elementwise.
    pub fn add_scaled(&mut self, other: &ComplexMatrix<T>, scale: C<T>) {
        debug_assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(other.data.iter()) {
            *a = *a + scale * *b;
        }
    }

    pub fn max_hermiticity_defect(&self) -> T {
        let mut worst = T::zero();
        for j in 0..self.dim {
            for k in j..self.dim {
                let d = (self.get(j, k) - self.get(k, j).conj()).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }
}
