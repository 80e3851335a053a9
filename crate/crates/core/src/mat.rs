//! Dense matrices over a [`Scalar`] backend. Sizes in this crate stay small
//! (a few hundred rows at most), so the implementation favors exactness and
//! determinism over asymptotics: plain Gaussian elimination with partial
//! pivoting by magnitude, reduced echelon form, null spaces with
//! echelon-pivot bases.

use crate::scalar::{Scalar, Tol};
use std::fmt;

#[derive(Clone, PartialEq)]
pub struct Mat<S> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> fmt::Debug for Mat<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{} ", self.at(i, j))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<S: Scalar> Mat<S> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zero(n, n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Column vector from a slice.
    pub fn col_vec(v: &[S]) -> Self {
        Mat { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    pub fn row_vec(v: &[S]) -> Self {
        Mat { rows: 1, cols: v.len(), data: v.to_vec() }
    }

    pub fn scalar(s: S) -> Self {
        Mat { rows: 1, cols: 1, data: vec![s] }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul(&self, o: &Mat<S>) -> Mat<S> {
        assert_eq!(self.cols, o.rows, "shape mismatch in mul: {}x{} * {}x{}", self.rows, self.cols, o.rows, o.cols);
        let mut out: Mat<S> = Mat::zero(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.at(i, j).add(&a.mul(b));
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    pub fn add(&self, o: &Mat<S>) -> Mat<S> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, o: &Mat<S>) -> Mat<S> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn neg(&self) -> Mat<S> {
        self.map(|s| s.neg())
    }

    pub fn scale(&self, s: &S) -> Mat<S> {
        self.map(|x| x.mul(s))
    }

    pub fn map(&self, f: impl Fn(&S) -> S) -> Mat<S> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Mat<S> {
        Mat::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    /// Kronecker product; row-major on both factors, so `kron(A,B)` acts on
    /// `a ⊗ b` with the first tensor leg varying slowest.
    pub fn kron(&self, o: &Mat<S>) -> Mat<S> {
        let mut out = Mat::zero(self.rows * o.rows, self.cols * o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.at(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..o.rows {
                    for l in 0..o.cols {
                        let b = o.at(k, l);
                        if b.is_zero() {
                            continue;
                        }
                        out.set(i * o.rows + k, j * o.cols + l, a.mul(b));
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> S {
        assert!(self.is_square());
        let mut t = S::zero();
        for i in 0..self.rows {
            t = t.add(self.at(i, i));
        }
        t
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|s| s.abs()).fold(0.0, f64::max)
    }

    /// Residual of the identity `self == o`: largest entrywise difference.
    pub fn residual(&self, o: &Mat<S>) -> f64 {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "residual shape mismatch");
        self.sub(o).max_abs()
    }

    pub fn hjoin(&self, o: &Mat<S>) -> Mat<S> {
        assert_eq!(self.rows, o.rows);
        Mat::from_fn(self.rows, self.cols + o.cols, |i, j| {
            if j < self.cols { self.at(i, j).clone() } else { o.at(i, j - self.cols).clone() }
        })
    }

    pub fn vjoin(&self, o: &Mat<S>) -> Mat<S> {
        assert_eq!(self.cols, o.cols);
        Mat::from_fn(self.rows + o.rows, self.cols, |i, j| {
            if i < self.rows { self.at(i, j).clone() } else { o.at(i - self.rows, j).clone() }
        })
    }

    pub fn column(&self, j: usize) -> Mat<S> {
        Mat::from_fn(self.rows, 1, |i, _| self.at(i, j).clone())
    }

    /// Flattens row-major into a column vector.
    pub fn vec(&self) -> Vec<S> {
        self.data.clone()
    }

    /// In-place reduced row echelon form. Returns pivot column indices.
    /// Entries with magnitude below `zero_eps` (scaled) are treated as zero in
    /// the floating backend; the exact backend tests on the nose.
    pub fn rref(&mut self) -> Vec<usize> {
        let zero_eps = if S::EXACT { 0.0 } else { self.max_abs().max(1.0) * 1e-11 };
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row >= self.rows {
                break;
            }
            // Partial pivot: largest magnitude in this column at or below `row`.
            let mut best = row;
            let mut best_abs = self.at(row, col).abs();
            for r in row + 1..self.rows {
                let a = self.at(r, col).abs();
                if a > best_abs {
                    best = r;
                    best_abs = a;
                }
            }
            if best_abs <= zero_eps {
                for r in row..self.rows {
                    self.set(r, col, S::zero());
                }
                continue;
            }
            if best != row {
                for j in 0..self.cols {
                    let tmp = self.at(row, j).clone();
                    self.set(row, j, self.at(best, j).clone());
                    self.set(best, j, tmp);
                }
            }
            let inv = self.at(row, col).inv().expect("pivot nonzero");
            for j in col..self.cols {
                let v = self.at(row, j).mul(&inv);
                self.set(row, j, v);
            }
            self.set(row, col, S::one());
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let factor = self.at(r, col).clone();
                if factor.is_zero() {
                    continue;
                }
                for j in col..self.cols {
                    let v = self.at(r, j).sub(&factor.mul(self.at(row, j)));
                    self.set(r, j, v);
                }
                self.set(r, col, S::zero());
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the right null space, one column vector per free column.
    /// The basis is deterministic: reduced echelon pivots with free variables
    /// set to one in column order.
    pub fn nullspace(&self) -> Vec<Mat<S>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = Mat::zero(self.cols, 1);
            v.set(free, 0, S::one());
            for (r, &pc) in pivots.iter().enumerate() {
                v.set(pc, 0, m.at(r, free).neg());
            }
            basis.push(v);
        }
        basis
    }

    /// Solves `self * X = rhs` exactly-or-at-tolerance; `None` if inconsistent.
    pub fn solve(&self, rhs: &Mat<S>) -> Option<Mat<S>> {
        assert_eq!(self.rows, rhs.rows);
        let mut aug = self.hjoin(rhs);
        let pivots = aug.rref();
        // Inconsistent if a pivot lands in the rhs block.
        if pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut x = Mat::zero(self.cols, rhs.cols);
        for (r, &pc) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.set(pc, j, aug.at(r, self.cols + j).clone());
            }
        }
        // Verify residual for over-determined floating systems.
        if !S::EXACT {
            let res = self.mul(&x).residual(rhs);
            let scale = self.max_abs().max(rhs.max_abs()).max(1.0);
            if res > 1e-7 * scale {
                return None;
            }
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Mat<S>> {
        assert!(self.is_square());
        let n = self.rows;
        let mut aug = self.hjoin(&Mat::identity(n));
        let pivots = aug.rref();
        if pivots.len() < n || pivots.iter().take(n).enumerate().any(|(i, &p)| p != i) {
            return None;
        }
        Some(Mat::from_fn(n, n, |i, j| aug.at(i, n + j).clone()))
    }

    pub fn det(&self) -> S {
        assert!(self.is_square());
        let n = self.rows;
        let mut m = self.clone();
        let mut det = S::one();
        let zero_eps = if S::EXACT { 0.0 } else { m.max_abs().max(1.0) * 1e-12 };
        for col in 0..n {
            let mut best = col;
            let mut best_abs = m.at(col, col).abs();
            for r in col + 1..n {
                let a = m.at(r, col).abs();
                if a > best_abs {
                    best = r;
                    best_abs = a;
                }
            }
            if best_abs <= zero_eps {
                return S::zero();
            }
            if best != col {
                for j in 0..n {
                    let tmp = m.at(col, j).clone();
                    m.set(col, j, m.at(best, j).clone());
                    m.set(best, j, tmp);
                }
                det = det.neg();
            }
            let piv = m.at(col, col).clone();
            det = det.mul(&piv);
            let inv = piv.inv().unwrap();
            for r in col + 1..n {
                let factor = m.at(r, col).mul(&inv);
                if factor.is_zero() {
                    continue;
                }
                for j in col..n {
                    let v = m.at(r, j).sub(&factor.mul(m.at(col, j)));
                    m.set(r, j, v);
                }
            }
        }
        det
    }

    /// If the matrix is (approximately) `c * I`, returns `(c, residual)` with
    /// `c` the mean of the diagonal; the residual measures the distance to
    /// `c * I`.
    pub fn scalar_identity_part(&self) -> (S, f64) {
        assert!(self.is_square());
        let n = self.rows;
        if n == 0 {
            return (S::zero(), 0.0);
        }
        let mut mean = S::zero();
        for i in 0..n {
            mean = mean.add(self.at(i, i));
        }
        let mean = mean.mul(&S::from_ratio(1, n as i64));
        let res = self.residual(&Mat::identity(n).scale(&mean));
        (mean, res)
    }

    /// Entrywise approximate equality under the tolerance contract.
    pub fn approx_eq(&self, o: &Mat<S>, tol: &Tol) -> bool {
        if (self.rows, self.cols) != (o.rows, o.cols) {
            return false;
        }
        if S::EXACT {
            self == o
        } else {
            tol.is_zero_rel(self.residual(o), self.max_abs().max(o.max_abs()))
        }
    }

    /// Deterministic basis of the column space (pivot columns of the rref of
    /// the transpose trick: rref on self, then pick original pivot columns).
    pub fn col_space_basis(&self) -> Vec<Mat<S>> {
        let mut m = self.clone();
        let pivots = m.rref();
        pivots.into_iter().map(|p| self.column(p)).collect()
    }

    pub fn convert<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Mat<T> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl Tol {
    pub fn is_zero_rel(&self, r: f64, scale: f64) -> bool {
        r <= self.eps_abs + self.eps_rel * scale
    }
}

/// Max-abs of `a*b - c` style identities already materialized by the caller.
pub fn residual_zero<S: Scalar>(m: &Mat<S>) -> f64 {
    m.max_abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Rat, C64};
    use proptest::prelude::*;

    fn rat(p: i64, q: i64) -> Rat {
        Rat::from_ratio(p, q)
    }

    #[test]
    fn exact_inverse_and_det() {
        let m = Mat::from_rows(vec![
            vec![rat(2, 1), rat(1, 1)],
            vec![rat(1, 1), rat(1, 1)],
        ]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Mat::identity(2));
        assert_eq!(m.det(), rat(1, 1));
    }

    #[test]
    fn nullspace_annihilates() {
        let m = Mat::from_rows(vec![
            vec![rat(1, 1), rat(2, 1), rat(3, 1)],
            vec![rat(2, 1), rat(4, 1), rat(6, 1)],
        ]);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert_eq!(m.mul(v).max_abs(), 0.0);
        }
    }

    #[test]
    fn kron_shapes() {
        let a = Mat::<Rat>::identity(2);
        let b = Mat::from_rows(vec![vec![rat(0, 1), rat(1, 1)], vec![rat(1, 1), rat(0, 1)]]);
        let k = a.kron(&b);
        assert_eq!((k.rows, k.cols), (4, 4));
        assert_eq!(k.at(0, 1), &rat(1, 1));
        assert_eq!(k.at(2, 3), &rat(1, 1));
    }

    proptest! {
        #[test]
        fn transpose_of_product(seed in 0u64..500) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let a = Mat::from_fn(3, 2, |_, _| C64::random_small(&mut rng));
            let b = Mat::from_fn(2, 4, |_, _| C64::random_small(&mut rng));
            let lhs = a.mul(&b).transpose();
            let rhs = b.transpose().mul(&a.transpose());
            prop_assert!(lhs.residual(&rhs) < 1e-12);
        }

        #[test]
        fn float_nullspace_annihilates(seed in 0u64..200) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let a = Mat::from_fn(3, 5, |_, _| C64::random_small(&mut rng));
            for v in a.nullspace() {
                prop_assert!(a.mul(&v).max_abs() < 1e-9);
            }
        }
    }
}
