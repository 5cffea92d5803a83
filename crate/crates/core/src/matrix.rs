//! Dense matrices over any [`Ring`], with exact elimination over fields.

use std::fmt;

use serde::Serialize;

use crate::ring::{FieldLike, Ring};

#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
    /// A zero of the coefficient ring, kept so empty matrices still know it.
    zero: T,
}

impl<T: Ring> Matrix<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>, zero: T) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has wrong length");
        Matrix { rows, cols, data, zero }
    }
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let zero = rows[0][0].zero_like();
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Self::from_vec(r, c, rows.into_iter().flatten().collect(), zero)
    }
    pub fn from_fn(rows: usize, cols: usize, zero: T, f: impl Fn(usize, usize) -> T) -> Self {
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        Matrix { rows, cols, data, zero }
    }
    pub fn zeros(rows: usize, cols: usize, zero: T) -> Self {
        Matrix { rows, cols, data: vec![zero.clone(); rows * cols], zero }
    }
    pub fn identity(n: usize, zero: T) -> Self {
        let one = zero.one_like();
        Self::from_fn(n, n, zero, |i, j| if i == j { one.clone() } else { one.zero_like() })
    }
    pub fn scalar(n: usize, c: T) -> Self {
        let z = c.zero_like();
        Self::from_fn(n, n, z.clone(), |i, j| if i == j { c.clone() } else { z.clone() })
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
    pub fn zero_elem(&self) -> &T {
        &self.zero
    }
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }
    pub fn entries(&self) -> &[T] {
        &self.data
    }
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
    pub fn map<U: Ring>(&self, zero: U, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect(), zero }
    }
    pub fn try_map<U: Ring, E>(&self, zero: U, f: impl Fn(&T) -> Result<U, E>) -> Result<Matrix<U>, E> {
        let data = self.data.iter().map(f).collect::<Result<Vec<_>, E>>()?;
        Ok(Matrix { rows: self.rows, cols: self.cols, data, zero })
    }
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }
    pub fn is_identity(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..self.cols).all(|j| if i == j { self.get(i, j).is_one() } else { self.get(i, j).is_zero() }))
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "shape mismatch in add");
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a.add_ref(b)).collect();
        Matrix { rows: self.rows, cols: self.cols, data, zero: self.zero.clone() }
    }
    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "shape mismatch in sub");
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a.sub_ref(b)).collect();
        Matrix { rows: self.rows, cols: self.cols, data, zero: self.zero.clone() }
    }
    pub fn neg(&self) -> Self {
        self.map(self.zero.clone(), |a| a.neg_ref())
    }
    pub fn scale(&self, c: &T) -> Self {
        self.map(self.zero.clone(), |a| c.mul_ref(a))
    }
    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "shape mismatch in mul");
        let mut data = Vec::with_capacity(self.rows * o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = self.zero.clone();
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    if a.is_zero() {
                        continue;
                    }
                    let b = o.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    acc = acc.add_ref(&a.mul_ref(b));
                }
                data.push(acc);
            }
        }
        Matrix { rows: self.rows, cols: o.cols, data, zero: self.zero.clone() }
    }
    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(self.zero.clone(), |acc, (a, b)| acc.add_ref(&a.mul_ref(b))))
            .collect()
    }
    pub fn pow(&self, e: u64) -> Self {
        self.pow_u(e)
    }
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, self.zero.clone(), |i, j| self.get(j, i).clone())
    }
    /// Kronecker product; the left factor indexes the slow (major) position.
    pub fn kron(&self, o: &Self) -> Self {
        let (r, c) = (self.rows * o.rows, self.cols * o.cols);
        Self::from_fn(r, c, self.zero.clone(), |i, j| {
            self.get(i / o.rows, j / o.cols).mul_ref(o.get(i % o.rows, j % o.cols))
        })
    }
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), self.zero.clone(), |i, j| self.get(rows[i], cols[j]).clone())
    }
    /// 2x2 block matrix from equal-shape blocks.
    pub fn block2(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        let (n, m) = (a.rows, a.cols);
        Self::from_fn(2 * n, 2 * m, a.zero.clone(), |i, j| {
            let blk = match (i < n, j < m) {
                (true, true) => a,
                (true, false) => b,
                (false, true) => c,
                (false, false) => d,
            };
            blk.get(i % n, j % m).clone()
        })
    }
    pub fn hstack(&self, o: &Self) -> Self {
        assert_eq!(self.rows, o.rows);
        Self::from_fn(self.rows, self.cols + o.cols, self.zero.clone(), |i, j| {
            if j < self.cols { self.get(i, j).clone() } else { o.get(i, j - self.cols).clone() }
        })
    }
    pub fn vstack(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.cols);
        Self::from_fn(self.rows + o.rows, self.cols, self.zero.clone(), |i, j| {
            if i < self.rows { self.get(i, j).clone() } else { o.get(i - self.rows, j).clone() }
        })
    }
    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(self.zero.clone(), |a, i| a.add_ref(self.get(i, i)))
    }

    /// Characteristic polynomial det(xI - M), monic, coefficients low degree
    /// first (Berkowitz; division-free, valid over any commutative ring).
    pub fn charpoly(&self) -> Vec<T> {
        assert!(self.is_square());
        let n = self.rows;
        let one = self.zero.one_like();
        // Berkowitz: build Toeplitz vectors step by step. Coefficients high first.
        let mut vect: Vec<T> = vec![one.clone()];
        for r in 0..n {
            // Submatrix leading principal (r+1)x(r+1); partition with a = M[r][r].
            let a = self.get(r, r).clone();
            let col: Vec<T> = (0..r).map(|i| self.get(i, r).clone()).collect();
            let row: Vec<T> = (0..r).map(|j| self.get(r, j).clone()).collect();
            let sub = self.submatrix(&(0..r).collect::<Vec<_>>(), &(0..r).collect::<Vec<_>>());
            // t = [1, -a, -R C, -R A C, ..., -R A^{r-1} C]
            let mut t = vec![one.clone(), a.neg_ref()];
            let mut v = col.clone();
            for _ in 0..r {
                let rc = row.iter().zip(&v).fold(self.zero.clone(), |acc, (x, y)| acc.add_ref(&x.mul_ref(y)));
                t.push(rc.neg_ref());
                v = sub.mul_vec(&v);
            }
            // new = T * vect, with T the (r+2)x(r+1) lower-triangular Toeplitz matrix from t.
            let mut next = vec![self.zero.clone(); r + 2];
            for (i, nx) in next.iter_mut().enumerate() {
                for (j, vj) in vect.iter().enumerate() {
                    if i >= j && i - j < t.len() {
                        *nx = nx.add_ref(&t[i - j].mul_ref(vj));
                    }
                }
            }
            vect = next;
        }
        vect.reverse();
        vect
    }

    /// Determinant via the characteristic polynomial (division-free).
    pub fn det_generic(&self) -> T {
        let cp = self.charpoly();
        let c0 = cp[0].clone();
        if self.rows % 2 == 1 { c0.neg_ref() } else { c0 }
    }
}

impl<T: FieldLike> Matrix<T> {
    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = vec![];
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else { continue };
            m.swap_rows(r, p);
            let inv = m.get(r, c).inv_opt().expect("nonzero pivot must be invertible");
            for j in 0..m.cols {
                let v = m.get(r, j).mul_ref(&inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in 0..m.cols {
                    let v = m.get(i, j).sub_ref(&f.mul_ref(m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }
    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }
    /// Basis of the right null space {v : M v = 0}, as vectors.
    pub fn nullspace(&self) -> Vec<Vec<T>> {
        let (r, piv) = self.rref();
        let one = self.zero.one_like();
        let free: Vec<usize> = (0..self.cols).filter(|c| !piv.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![self.zero.clone(); self.cols];
                v[f] = one.clone();
                for (i, &p) in piv.iter().enumerate() {
                    v[p] = r.get(i, f).neg_ref();
                }
                v
            })
            .collect()
    }
    pub fn det(&self) -> T {
        assert!(self.is_square());
        let mut m = self.clone();
        let n = m.rows;
        let mut det = self.zero.one_like();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else { return self.zero.clone() };
            if p != c {
                m.swap_rows(p, c);
                det = det.neg_ref();
            }
            let piv = m.get(c, c).clone();
            det = det.mul_ref(&piv);
            let inv = piv.inv_opt().expect("nonzero pivot must be invertible");
            for i in c + 1..n {
                if m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).mul_ref(&inv);
                for j in c..n {
                    let v = m.get(i, j).sub_ref(&f.mul_ref(m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        det
    }
    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square());
        let n = self.rows;
        let aug = self.hstack(&Self::identity(n, self.zero.clone()));
        let (r, piv) = aug.rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        Some(r.submatrix(&(0..n).collect::<Vec<_>>(), &(n..2 * n).collect::<Vec<_>>()))
    }
    /// Rows spanning the row space, in echelon form.
    pub fn row_space(&self) -> Self {
        let (r, piv) = self.rref();
        r.submatrix(&(0..piv.len()).collect::<Vec<_>>(), &(0..self.cols).collect::<Vec<_>>())
    }
}

impl<T: Ring + fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}
impl<T: Ring + fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries((0..self.rows).map(|i| self.row(i))).finish()
    }
}

/// Encoded as a list of rows.
impl<T: Ring + Serialize> Serialize for Matrix<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<&[T]> = (0..self.rows).map(|i| self.row(i)).collect();
        rows.serialize(s)
    }
}

/// Square matrices form a (noncommutative) ring; polynomial evaluation
/// `a(M)` only ever multiplies powers of one matrix.
impl<T: Ring> Ring for Matrix<T> {
    fn zero_like(&self) -> Self {
        Self::zeros(self.rows, self.cols, self.zero.clone())
    }
    fn one_like(&self) -> Self {
        Self::identity(self.rows, self.zero.clone())
    }
    fn is_zero(&self) -> bool {
        Matrix::is_zero(self)
    }
    fn add_ref(&self, r: &Self) -> Self {
        self.add(r)
    }
    fn sub_ref(&self, r: &Self) -> Self {
        self.sub(r)
    }
    fn mul_ref(&self, r: &Self) -> Self {
        self.mul(r)
    }
    fn neg_ref(&self) -> Self {
        self.neg()
    }
    fn from_int_like(&self, n: i64) -> Self {
        Self::scalar(self.rows, self.zero.from_int_like(n))
    }
    fn is_one(&self) -> bool {
        self.is_identity()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FieldConfig, FqElem};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_mat(f: crate::field::Fq, n: usize, rng: &mut ChaCha8Rng) -> Matrix<FqElem> {
        let data = (0..n * n).map(|_| f.elem(rng.gen_range(0..f.q()))).collect();
        Matrix::from_vec(n, n, data, f.zero())
    }

    #[test]
    fn charpoly_cayley_hamilton_and_det() {
        let f = FieldConfig::builtin(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..6 {
            let m = rand_mat(f, n, &mut rng);
            let cp = m.charpoly();
            assert!(cp[n].is_one());
            let mut acc = m.zero_like();
            for c in cp.iter().rev() {
                acc = acc.mul(&m).add(&Matrix::scalar(n, *c));
            }
            assert!(acc.is_zero());
            assert_eq!(m.det(), m.det_generic());
        }
    }

    #[test]
    fn inverse_rank_nullspace() {
        let f = FieldConfig::builtin(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let m = rand_mat(f, 4, &mut rng);
            match m.inverse() {
                Some(inv) => {
                    assert!(m.mul(&inv).is_identity());
                    assert_eq!(m.rank(), 4);
                }
                None => {
                    assert!(m.det().is_zero());
                    for v in m.nullspace() {
                        assert!(m.mul_vec(&v).iter().all(|x| x.is_zero()));
                    }
                    assert_eq!(m.rank() + m.nullspace().len(), 4);
                }
            }
        }
    }

    #[test]
    fn kron_is_multiplicative() {
        let f = FieldConfig::builtin(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (a, b, c, d) = (rand_mat(f, 2, &mut rng), rand_mat(f, 3, &mut rng), rand_mat(f, 2, &mut rng), rand_mat(f, 3, &mut rng));
        assert_eq!(a.kron(&b).mul(&c.kron(&d)), a.mul(&c).kron(&b.mul(&d)));
    }
}
