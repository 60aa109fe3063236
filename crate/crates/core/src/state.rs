//! Small fixed-capacity vectors and matrices for states in `R^n`, `n <= MAX_DIM`.

use core::fmt;
use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use crate::math::sqrt;

/// Largest supported system dimension (Euler plus one clock component).
pub const MAX_DIM: usize = 4;
const CAP: usize = MAX_DIM + 1;

/// A state vector with inline storage.
#[derive(Clone, Copy, PartialEq)]
pub struct State {
    data: [f64; CAP],
    len: usize,
}

impl State {
    pub fn zeros(n: usize) -> Self {
        assert!((1..=CAP).contains(&n), "state dimension {n} unsupported");
        State {
            data: [0.0; CAP],
            len: n,
        }
    }

    pub fn from_slice(v: &[f64]) -> Self {
        let mut s = State::zeros(v.len());
        s.data[..v.len()].copy_from_slice(v);
        s
    }

    pub fn scalar(x: f64) -> Self {
        State::from_slice(&[x])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut s = State::zeros(n);
        s.data[i] = 1.0;
        s
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data[..self.len]
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data[..self.len]
    }

    pub fn dot(&self, other: &State) -> f64 {
        self.as_slice()
            .iter()
            .zip(other.as_slice())
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        sqrt(self.dot(self))
    }

    pub fn norm_inf(&self) -> f64 {
        self.as_slice().iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.as_slice().iter().all(|x| *x == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.as_slice().iter().all(|x| x.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> State {
        let mut s = *self;
        for x in s.as_mut_slice() {
            *x = f(*x);
        }
        s
    }

    /// Append one component (used by augmented systems).
    pub fn push(&self, x: f64) -> State {
        let mut s = State::zeros(self.len + 1);
        s.data[..self.len].copy_from_slice(self.as_slice());
        s.data[self.len] = x;
        s
    }

    /// Drop the last component.
    pub fn truncate(&self, n: usize) -> State {
        State::from_slice(&self.as_slice()[..n])
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.as_slice()).finish()
    }
}

impl Index<usize> for State {
    type Output = f64;
    #[inline]
    fn index(&self, i: usize) -> &f64 {
        &self.as_slice()[i]
    }
}

impl IndexMut<usize> for State {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.as_mut_slice()[i]
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $tra:ident, $fa:ident, $op:tt) => {
        impl $tr for State {
            type Output = State;
            #[inline]
            #[allow(clippy::assign_op_pattern)]
            fn $f(mut self, rhs: State) -> State {
                debug_assert_eq!(self.len, rhs.len);
                for i in 0..self.len {
                    self.data[i] = self.data[i] $op rhs.data[i];
                }
                self
            }
        }
        impl $tra for State {
            #[inline]
            fn $fa(&mut self, rhs: State) {
                *self = *self $op rhs;
            }
        }
    };
}
binop!(Add, add, AddAssign, add_assign, +);
binop!(Sub, sub, SubAssign, sub_assign, -);

impl Mul<f64> for State {
    type Output = State;
    #[inline]
    fn mul(mut self, k: f64) -> State {
        for x in self.as_mut_slice() {
            *x *= k;
        }
        self
    }
}

impl Mul<State> for f64 {
    type Output = State;
    #[inline]
    fn mul(self, s: State) -> State {
        s * self
    }
}

impl Neg for State {
    type Output = State;
    fn neg(self) -> State {
        self * -1.0
    }
}

/// Dense square matrix with inline storage, row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct Mat {
    a: [[f64; CAP]; CAP],
    n: usize,
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        assert!((1..=CAP).contains(&n));
        Mat {
            a: [[0.0; CAP]; CAP],
            n,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m.a[i][i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let mut m = Mat::zeros(rows.len());
        for (i, r) in rows.iter().enumerate() {
            m.a[i][..r.len()].copy_from_slice(r);
        }
        m
    }

    /// Matrix whose columns are the given states.
    pub fn from_cols(cols: &[State]) -> Self {
        let mut m = Mat::zeros(cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..c.len() {
                m.a[i][j] = c[i];
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i][j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i][j] = v;
    }

    pub fn row(&self, i: usize) -> State {
        State::from_slice(&self.a[i][..self.n])
    }

    pub fn col(&self, j: usize) -> State {
        let mut s = State::zeros(self.n);
        for i in 0..self.n {
            s[i] = self.a[i][j];
        }
        s
    }

    pub fn mul_vec(&self, v: &State) -> State {
        let mut out = State::zeros(self.n);
        for i in 0..self.n {
            let mut acc = 0.0;
            for j in 0..self.n {
                acc += self.a[i][j] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// Max absolute entry.
    pub fn norm_max(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                m = m.max(self.a[i][j].abs());
            }
        }
        m
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        let mut m = *self;
        for i in 0..self.n {
            for j in 0..self.n {
                m.a[i][j] -= other.a[i][j];
            }
        }
        m
    }

    /// Solve `A x = b` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, b: &State) -> Option<State> {
        let n = self.n;
        let mut a = self.a;
        let mut x = *b;
        for k in 0..n {
            let mut p = k;
            for i in k + 1..n {
                if a[i][k].abs() > a[p][k].abs() {
                    p = i;
                }
            }
            if a[p][k] == 0.0 || !a[p][k].is_finite() {
                return None;
            }
            a.swap(k, p);
            x.data.swap(k, p);
            for i in k + 1..n {
                let f = a[i][k] / a[k][k];
                if f != 0.0 {
                    for j in k..n {
                        a[i][j] -= f * a[k][j];
                    }
                    x.data[i] -= f * x.data[k];
                }
            }
        }
        for k in (0..n).rev() {
            let mut acc = x.data[k];
            for j in k + 1..n {
                acc -= a[k][j] * x.data[j];
            }
            x.data[k] = acc / a[k][k];
        }
        if x.is_finite() {
            Some(x)
        } else {
            None
        }
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut l = f.debug_list();
        for i in 0..self.n {
            l.entry(&&self.a[i][..self.n]);
        }
        l.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_recovers_known_solution() {
        let m = Mat::from_rows(&[&[0.0, 2.0, 1.0], &[1.0, 1.0, 0.0], &[3.0, 0.0, 1.0]]);
        let x = State::from_slice(&[1.0, -2.0, 0.5]);
        let b = m.mul_vec(&x);
        let y = m.solve(&b).unwrap();
        assert!((y - x).norm() < 1e-14);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let m = Mat::from_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(m.solve(&State::from_slice(&[1.0, 1.0])).is_none());
    }

    #[test]
    fn push_and_truncate_round_trip() {
        let s = State::from_slice(&[1.0, 2.0]);
        assert_eq!(s.push(3.0).truncate(2), s);
        assert_eq!(s.push(3.0)[2], 3.0);
    }
}
