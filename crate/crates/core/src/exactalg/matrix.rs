//! Dense matrices over `F_q` and row reduction with a fixed pivot order.

use super::field::{FieldSpec, Scalar};
use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![Scalar::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::ONE);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Scalar>]) -> Result<Matrix> {
        let cols = rows.first().map_or(0, |r| r.len());
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::LengthMismatch { expected: cols, found: bad.len() });
        }
        Ok(Matrix { rows: rows.len(), cols, data: rows.concat() })
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<Scalar>]) -> Result<Matrix> {
        let mut m = Matrix::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::LengthMismatch { expected: rows, found: c.len() });
            }
            for (i, &v) in c.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }
    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.data[i * self.cols + j]
    }
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Scalar>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, field: &FieldSpec, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::LengthMismatch { expected: self.cols, found: other.rows });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = field.mul_add(a, b, out.get(i, j));
                        out.set(i, j, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, field: &FieldSpec, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if v.len() != self.cols {
            return Err(Error::LengthMismatch { expected: self.cols, found: v.len() });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Scalar::ZERO, |acc, (&a, &b)| field.mul_add(a, b, acc))
            })
            .collect())
    }

    pub fn sub(&self, field: &FieldSpec, other: &Matrix) -> Result<Matrix> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::LengthMismatch { expected: self.rows * self.cols, found: other.rows * other.cols });
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| field.sub(a, b)).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    /// Stack `self` on top of `other`.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.cols && self.rows > 0 && other.rows > 0 {
            return Err(Error::LengthMismatch { expected: self.cols, found: other.cols });
        }
        let cols = if self.rows > 0 { self.cols } else { other.cols };
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix { rows: self.rows + other.rows, cols, data })
    }
}

impl Matrix {
    /// Inverse of a square matrix, `None` when singular.
    pub fn inverse(&self, field: &FieldSpec) -> Option<Matrix> {
        let n = self.rows;
        if n != self.cols {
            return None;
        }
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, Scalar::ONE);
        }
        let red = reduce(field, &aug);
        if red.pivots.iter().take_while(|&&c| c < n).count() < n {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, red.rref.get(i, n + j));
            }
        }
        Some(inv)
    }
}

/// Output of [`reduce`].
#[derive(Clone, Debug)]
pub struct Reduction {
    pub rank: usize,
    /// `cols x nullity`; columns are kernel vectors, one per free column.
    pub kernel: Matrix,
    /// `rows x rank`; the pivot columns of the input.
    pub image: Matrix,
    /// Reduced row echelon form, same shape as the input.
    pub rref: Matrix,
    pub pivots: Vec<usize>,
}

/// Gauss-Jordan elimination. Pivots are taken in the leftmost column that
/// still has a nonzero entry, using the topmost such row.
pub fn reduce(field: &FieldSpec, m: &Matrix) -> Reduction {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        let Some(piv) = (row..a.rows).find(|&i| !a.get(i, col).is_zero()) else {
            continue;
        };
        if piv != row {
            for j in 0..a.cols {
                a.data.swap(piv * a.cols + j, row * a.cols + j);
            }
        }
        let inv = field.inv_nz(a.get(row, col));
        for j in col..a.cols {
            let v = field.mul(a.get(row, j), inv);
            a.set(row, j, v);
        }
        for i in 0..a.rows {
            if i == row {
                continue;
            }
            let c = a.get(i, col);
            if c.is_zero() {
                continue;
            }
            let nc = field.neg(c);
            for j in col..a.cols {
                let pj = a.get(row, j);
                if !pj.is_zero() {
                    let v = field.mul_add(nc, pj, a.get(i, j));
                    a.set(i, j, v);
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let rank = pivots.len();
    let free: Vec<usize> = (0..a.cols).filter(|c| !pivots.contains(c)).collect();
    let mut kernel = Matrix::zeros(a.cols, free.len());
    for (k, &fc) in free.iter().enumerate() {
        kernel.set(fc, k, Scalar::ONE);
        for (r, &pc) in pivots.iter().enumerate() {
            kernel.set(pc, k, field.neg(a.get(r, fc)));
        }
    }
    let mut image = Matrix::zeros(m.rows, rank);
    for (k, &pc) in pivots.iter().enumerate() {
        for i in 0..m.rows {
            image.set(i, k, m.get(i, pc));
        }
    }
    Reduction { rank, kernel, image, rref: a, pivots }
}

/// A complement of `span(sub)` inside `F_q^ambient` with a coordinate map
/// modulo `span(sub)`.
#[derive(Clone, Debug)]
pub struct QuotientBasis {
    field: FieldSpec,
    /// `ambient x k`; standard basis vectors at the non-pivot positions.
    pub reps: Matrix,
    rep_positions: Vec<usize>,
    sub_rref: Matrix,
    sub_pivots: Vec<usize>,
}

impl QuotientBasis {
    pub fn dim(&self) -> usize {
        self.rep_positions.len()
    }

    /// Coordinates of `v + span(sub)` with respect to `reps`.
    pub fn project(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        let n = self.sub_rref.cols();
        if v.len() != n {
            return Err(Error::LengthMismatch { expected: n, found: v.len() });
        }
        let mut w = v.to_vec();
        for (r, &pc) in self.sub_pivots.iter().enumerate() {
            let c = w[pc];
            if c.is_zero() {
                continue;
            }
            let nc = self.field.neg(c);
            for (j, slot) in w.iter_mut().enumerate().skip(pc) {
                let e = self.sub_rref.get(r, j);
                if !e.is_zero() {
                    *slot = self.field.mul_add(nc, e, *slot);
                }
            }
        }
        Ok(self.rep_positions.iter().map(|&i| w[i]).collect())
    }

    /// A vector in the coset with the given coordinates.
    pub fn lift(&self, coords: &[Scalar]) -> Vec<Scalar> {
        let mut v = vec![Scalar::ZERO; self.sub_rref.cols()];
        for (&pos, &c) in self.rep_positions.iter().zip(coords) {
            v[pos] = c;
        }
        v
    }
}

/// Extend the independent columns of `sub` (an `ambient x k` matrix) to a
/// basis of `F_q^ambient`.
pub fn quotient_basis(field: &FieldSpec, sub: &Matrix, ambient_dim: usize) -> Result<QuotientBasis> {
    if sub.cols() > 0 && sub.rows() != ambient_dim {
        return Err(Error::LengthMismatch { expected: ambient_dim, found: sub.rows() });
    }
    let as_rows = if sub.cols() == 0 { Matrix::zeros(0, ambient_dim) } else { sub.transpose() };
    let red = reduce(field, &as_rows);
    if red.rank < sub.cols() {
        return Err(Error::DependentColumns);
    }
    let rep_positions: Vec<usize> = (0..ambient_dim).filter(|i| !red.pivots.contains(i)).collect();
    let mut reps = Matrix::zeros(ambient_dim, rep_positions.len());
    for (k, &i) in rep_positions.iter().enumerate() {
        reps.set(i, k, Scalar::ONE);
    }
    let mut sub_rref = Matrix::zeros(red.rank, ambient_dim);
    for r in 0..red.rank {
        for j in 0..ambient_dim {
            sub_rref.set(r, j, red.rref.get(r, j));
        }
    }
    Ok(QuotientBasis { field: field.clone(), reps, rep_positions, sub_rref, sub_pivots: red.pivots })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s(v: u32) -> Scalar {
        Scalar(v)
    }

    #[test]
    fn reduce_examples() {
        let f2 = FieldSpec::prime(2).unwrap();
        let z = reduce(&f2, &Matrix::zeros(3, 3));
        assert_eq!(z.rank, 0);
        assert_eq!(z.kernel, Matrix::identity(3));

        let m = Matrix::from_rows(&[vec![s(1), s(1)], vec![s(1), s(1)]]).unwrap();
        let r = reduce(&f2, &m);
        assert_eq!(r.rank, 1);
        assert_eq!(r.kernel.column(0), vec![s(1), s(1)]);

        let r = reduce(&f2, &Matrix::identity(4));
        assert_eq!(r.rank, 4);
        assert_eq!(r.kernel.cols(), 0);
    }

    #[test]
    fn reduce_properties_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for f in [FieldSpec::prime(2).unwrap(), FieldSpec::prime(3).unwrap(), FieldSpec::new(2, 2, None).unwrap()] {
            for _ in 0..60 {
                let (rows, cols) = (rng.gen_range(0..7), rng.gen_range(0..7));
                let mut m = Matrix::zeros(rows, cols);
                for i in 0..rows {
                    for j in 0..cols {
                        if rng.gen_bool(0.5) {
                            m.set(i, j, Scalar(rng.gen_range(0..f.q())));
                        }
                    }
                }
                let red = reduce(&f, &m);
                assert_eq!(red.rank + red.kernel.cols(), cols);
                assert!(m.mul(&f, &red.kernel).unwrap().is_zero());
                assert_eq!(reduce(&f, &red.rref).rank, red.rank);
                assert_eq!(reduce(&f, &red.rref).rref, red.rref);
                assert_eq!(reduce(&f, &red.image).rank, red.rank);
            }
        }
    }

    #[test]
    fn quotient_examples() {
        let f2 = FieldSpec::prime(2).unwrap();
        let qb = quotient_basis(&f2, &Matrix::zeros(3, 0), 3).unwrap();
        assert_eq!(qb.dim(), 3);
        assert_eq!(qb.project(&[s(1), s(0), s(1)]).unwrap(), vec![s(1), s(0), s(1)]);

        let qb = quotient_basis(&f2, &Matrix::identity(2), 2).unwrap();
        assert_eq!(qb.dim(), 0);
        assert!(qb.project(&[s(1), s(1)]).unwrap().is_empty());

        let sub = Matrix::from_columns(2, &[vec![s(1), s(1)]]).unwrap();
        let qb = quotient_basis(&f2, &sub, 2).unwrap();
        assert_eq!(qb.dim(), 1);
        assert_eq!(qb.project(&[s(0), s(1)]).unwrap(), qb.project(&[s(1), s(0)]).unwrap());
        for k in 0..qb.dim() {
            assert_eq!(qb.project(&qb.reps.column(k)).unwrap(), vec![s(1)]);
        }

        let dep = Matrix::from_columns(2, &[vec![s(1), s(1)], vec![s(1), s(1)]]).unwrap();
        assert_eq!(quotient_basis(&f2, &dep, 2).unwrap_err(), Error::DependentColumns);
    }

    #[test]
    fn quotient_lift_difference_lies_in_sub() {
        let f3 = FieldSpec::prime(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let sub = Matrix::from_columns(4, &[vec![s(1), s(2), s(0), s(1)], vec![s(0), s(1), s(1), s(2)]]).unwrap();
        let qb = quotient_basis(&f3, &sub, 4).unwrap();
        for _ in 0..100 {
            let v: Vec<Scalar> = (0..4).map(|_| Scalar(rng.gen_range(0..3))).collect();
            let lifted = qb.lift(&qb.project(&v).unwrap());
            let diff: Vec<Scalar> = v.iter().zip(&lifted).map(|(&a, &b)| f3.sub(a, b)).collect();
            // membership solve: rank does not grow when diff is appended
            let mut cols = sub.columns();
            cols.push(diff);
            assert_eq!(reduce(&f3, &Matrix::from_columns(4, &cols).unwrap()).rank, 2);
        }
    }
}
