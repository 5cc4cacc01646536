//! Sparse vectors, column-major sparse matrices and an incremental echelon
//! basis with optional combination tracking.
//!
//! [`Echelon`] is the workhorse for every kernel, image and subquotient in the
//! crate. Rows are kept with distinct leading indices (normalized to 1); a
//! row inserted with a tag remembers which combination of inserted vectors it
//! equals, which is how kernels and quotient coordinates are read off.

use super::field::{FieldSpec, Scalar};
use super::matrix::Matrix;
use crate::error::{Error, Result};

/// Sorted `(index, nonzero value)` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVec {
    entries: Vec<(usize, Scalar)>,
}

impl SparseVec {
    pub fn new() -> SparseVec {
        SparseVec { entries: Vec::new() }
    }

    pub fn unit(i: usize) -> SparseVec {
        SparseVec { entries: vec![(i, Scalar::ONE)] }
    }

    /// From unsorted pairs; duplicates are summed and zeros dropped.
    pub fn from_pairs(field: &FieldSpec, mut pairs: Vec<(usize, Scalar)>) -> SparseVec {
        pairs.sort_unstable_by_key(|e| e.0);
        let mut entries: Vec<(usize, Scalar)> = Vec::with_capacity(pairs.len());
        for (i, v) in pairs {
            match entries.last_mut() {
                Some(last) if last.0 == i => last.1 = field.add(last.1, v),
                _ => entries.push((i, v)),
            }
        }
        entries.retain(|e| !e.1.is_zero());
        SparseVec { entries }
    }

    /// From pairs already sorted by index with no zeros or duplicates.
    pub fn from_sorted(entries: Vec<(usize, Scalar)>) -> SparseVec {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|e| !e.1.is_zero()));
        SparseVec { entries }
    }

    pub fn from_dense(v: &[Scalar]) -> SparseVec {
        SparseVec {
            entries: v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, &x)| (i, x)).collect(),
        }
    }

    pub fn to_dense(&self, dim: usize) -> Vec<Scalar> {
        let mut v = vec![Scalar::ZERO; dim];
        for &(i, x) in &self.entries {
            v[i] = x;
        }
        v
    }

    #[inline]
    pub fn entries(&self) -> &[(usize, Scalar)] {
        &self.entries
    }
    #[inline]
    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }
    #[inline]
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize) -> Scalar {
        match self.entries.binary_search_by_key(&i, |e| e.0) {
            Ok(k) => self.entries[k].1,
            Err(_) => Scalar::ZERO,
        }
    }

    pub fn leading(&self) -> Option<(usize, Scalar)> {
        self.entries.first().copied()
    }

    /// Largest index present, plus one.
    pub fn support_end(&self) -> usize {
        self.entries.last().map_or(0, |e| e.0 + 1)
    }

    pub fn scale(&mut self, field: &FieldSpec, c: Scalar) {
        if c.is_zero() {
            self.entries.clear();
            return;
        }
        for e in &mut self.entries {
            e.1 = field.mul(e.1, c);
        }
    }

    pub fn scaled(&self, field: &FieldSpec, c: Scalar) -> SparseVec {
        let mut v = self.clone();
        v.scale(field, c);
        v
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, field: &FieldSpec, c: Scalar, other: &SparseVec) {
        self.axpy_from(field, 0, c, other);
    }

    // Merge `c * other` into `self.entries[start..]`; `other` must have no
    // index below `self.entries[start].0` when `start > 0`.
    fn axpy_from(&mut self, field: &FieldSpec, start: usize, c: Scalar, other: &SparseVec) {
        if c.is_zero() || other.is_zero() {
            return;
        }
        let tail = self.entries.split_off(start);
        let mut merged = Vec::with_capacity(tail.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        while i < tail.len() && j < other.entries.len() {
            let (a, b) = (tail[i], other.entries[j]);
            if a.0 < b.0 {
                merged.push(a);
                i += 1;
            } else if b.0 < a.0 {
                merged.push((b.0, field.mul(c, b.1)));
                j += 1;
            } else {
                let v = field.mul_add(c, b.1, a.1);
                if !v.is_zero() {
                    merged.push((a.0, v));
                }
                i += 1;
                j += 1;
            }
        }
        merged.extend_from_slice(&tail[i..]);
        merged.extend(other.entries[j..].iter().map(|&(k, v)| (k, field.mul(c, v))));
        self.entries.extend(merged);
    }

    pub fn add(&self, field: &FieldSpec, other: &SparseVec) -> SparseVec {
        let mut v = self.clone();
        v.axpy(field, Scalar::ONE, other);
        v
    }

    pub fn sub(&self, field: &FieldSpec, other: &SparseVec) -> SparseVec {
        let mut v = self.clone();
        v.axpy(field, field.neg(Scalar::ONE), other);
        v
    }

    /// Shift every index by `offset`.
    pub fn shifted(&self, offset: usize) -> SparseVec {
        SparseVec { entries: self.entries.iter().map(|&(i, v)| (i + offset, v)).collect() }
    }

    /// Restrict to indices in `[lo, hi)` and re-base them at 0.
    pub fn window(&self, lo: usize, hi: usize) -> SparseVec {
        SparseVec {
            entries: self
                .entries
                .iter()
                .filter(|e| e.0 >= lo && e.0 < hi)
                .map(|&(i, v)| (i - lo, v))
                .collect(),
        }
    }
}

/// Column-major sparse matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    columns: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn new(rows: usize, columns: Vec<SparseVec>) -> SparseMatrix {
        debug_assert!(columns.iter().all(|c| c.support_end() <= rows));
        SparseMatrix { rows, columns }
    }

    pub fn zeros(rows: usize, cols: usize) -> SparseMatrix {
        SparseMatrix { rows, columns: vec![SparseVec::new(); cols] }
    }

    pub fn identity(n: usize) -> SparseMatrix {
        SparseMatrix { rows: n, columns: (0..n).map(SparseVec::unit).collect() }
    }

    pub fn from_dense(m: &Matrix) -> SparseMatrix {
        SparseMatrix { rows: m.rows(), columns: m.columns().iter().map(|c| SparseVec::from_dense(c)).collect() }
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.rows, self.columns.len());
        for (j, c) in self.columns.iter().enumerate() {
            for &(i, v) in c.entries() {
                m.set(i, j, v);
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }
    #[inline]
    pub fn cols(&self) -> usize {
        self.columns.len()
    }
    #[inline]
    pub fn column(&self, j: usize) -> &SparseVec {
        &self.columns[j]
    }
    pub fn columns(&self) -> &[SparseVec] {
        &self.columns
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_zero())
    }

    pub fn apply(&self, field: &FieldSpec, v: &SparseVec) -> SparseVec {
        let mut pairs = Vec::new();
        for &(j, x) in v.entries() {
            for &(i, y) in self.columns[j].entries() {
                pairs.push((i, field.mul(x, y)));
            }
        }
        SparseVec::from_pairs(field, pairs)
    }

    /// `self * other`.
    pub fn mul(&self, field: &FieldSpec, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.cols() != other.rows {
            return Err(Error::LengthMismatch { expected: self.cols(), found: other.rows });
        }
        Ok(SparseMatrix { rows: self.rows, columns: other.columns.iter().map(|c| self.apply(field, c)).collect() })
    }

    pub fn sub(&self, field: &FieldSpec, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.rows != other.rows || self.cols() != other.cols() {
            return Err(Error::LengthMismatch { expected: self.cols(), found: other.cols() });
        }
        Ok(SparseMatrix {
            rows: self.rows,
            columns: self.columns.iter().zip(&other.columns).map(|(a, b)| a.sub(field, b)).collect(),
        })
    }

    pub fn add(&self, field: &FieldSpec, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.rows != other.rows || self.cols() != other.cols() {
            return Err(Error::LengthMismatch { expected: self.cols(), found: other.cols() });
        }
        Ok(SparseMatrix {
            rows: self.rows,
            columns: self.columns.iter().zip(&other.columns).map(|(a, b)| a.add(field, b)).collect(),
        })
    }

    pub fn rank(&self, field: &FieldSpec) -> usize {
        let mut e = Echelon::new(field, self.rows);
        for c in &self.columns {
            e.insert(c.clone());
        }
        e.rank()
    }
}

/// Outcome of [`Echelon::insert_tagged`].
#[derive(Clone, Debug)]
pub enum Insert {
    /// The vector was new; it now occupies this row.
    Independent(usize),
    /// The vector was already in the span; the tag combination that vanishes.
    Dependent(SparseVec),
}

/// Incrementally built echelon basis of a subspace of `F_q^dim`.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: FieldSpec,
    dim: usize,
    rows: Vec<SparseVec>,
    tags: Vec<SparseVec>,
    pivot_row: Vec<u32>,
}

const NO_PIVOT: u32 = u32::MAX;

impl Echelon {
    pub fn new(field: &FieldSpec, dim: usize) -> Echelon {
        Echelon { field: field.clone(), dim, rows: Vec::new(), tags: Vec::new(), pivot_row: vec![NO_PIVOT; dim] }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }
    #[inline]
    pub fn rank(&self) -> usize {
        self.rows.len()
    }
    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }
    pub fn tags(&self) -> &[SparseVec] {
        &self.tags
    }
    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().map(|r| r.leading().unwrap().0)
    }

    pub fn is_pivot(&self, i: usize) -> bool {
        self.pivot_row[i] != NO_PIVOT
    }

    /// Reduce `v` to its normal form; returns the residual and the tag
    /// combination `sum c_k tag_k` that was subtracted.
    pub fn reduce(&self, v: &SparseVec) -> (SparseVec, SparseVec) {
        let f = &self.field;
        let mut w = v.clone();
        let mut comb = SparseVec::new();
        let mut pos = 0;
        while pos < w.entries.len() {
            let (idx, val) = w.entries[pos];
            let r = self.pivot_row[idx];
            if r == NO_PIVOT {
                pos += 1;
                continue;
            }
            let r = r as usize;
            w.axpy_from(f, pos, f.neg(val), &self.rows[r]);
            if !self.tags[r].is_zero() {
                comb.axpy(f, val, &self.tags[r]);
            }
        }
        (w, comb)
    }

    /// Residual of `v` modulo the span.
    pub fn residual(&self, v: &SparseVec) -> SparseVec {
        self.reduce(v).0
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).0.is_zero()
    }

    /// Insert without tracking; returns whether the rank grew.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        matches!(self.insert_tagged(v, SparseVec::new()), Insert::Independent(_))
    }

    /// Insert `v` remembering that it equals the combination `tag`.
    pub fn insert_tagged(&mut self, v: SparseVec, tag: SparseVec) -> Insert {
        let f = self.field.clone();
        let (mut w, comb) = self.reduce(&v);
        let mut t = tag;
        t.axpy(&f, f.neg(Scalar::ONE), &comb);
        let Some((lead, c)) = w.leading() else {
            return Insert::Dependent(t);
        };
        let inv = f.inv_nz(c);
        w.scale(&f, inv);
        t.scale(&f, inv);
        let idx = self.rows.len();
        self.pivot_row[lead] = idx as u32;
        self.rows.push(w);
        self.tags.push(t);
        Insert::Independent(idx)
    }

    /// The unique reduced row echelon basis of the span, sorted by pivot.
    pub fn rref_rows(&self) -> Vec<SparseVec> {
        let f = &self.field;
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&r| std::cmp::Reverse(self.rows[r].leading().unwrap().0));
        let mut done: Vec<Option<SparseVec>> = vec![None; self.rows.len()];
        for &r in &order {
            let mut w = self.rows[r].clone();
            let mut pos = 1;
            while pos < w.entries.len() {
                let (idx, val) = w.entries[pos];
                let pr = self.pivot_row[idx];
                if pr == NO_PIVOT {
                    pos += 1;
                    continue;
                }
                let other = done[pr as usize].as_ref().expect("higher pivots reduced first");
                w.axpy_from(f, pos, f.neg(val), other);
            }
            done[r] = Some(w);
        }
        let mut out: Vec<SparseVec> = done.into_iter().map(|r| r.unwrap()).collect();
        out.sort_by_key(|r| r.leading().unwrap().0);
        out
    }
}

/// Reduced row echelon basis of the span of `vectors`.
pub fn canonical_basis(field: &FieldSpec, dim: usize, vectors: impl IntoIterator<Item = SparseVec>) -> Vec<SparseVec> {
    let mut e = Echelon::new(field, dim);
    for v in vectors {
        e.insert(v);
    }
    e.rref_rows()
}

/// Kernel of the map whose columns are given: vectors `k` with
/// `sum_j k_j column_j = 0`. Returns `(rank, kernel basis)`.
pub fn kernel_of_columns(field: &FieldSpec, dim: usize, columns: impl IntoIterator<Item = SparseVec>) -> (usize, Vec<SparseVec>) {
    let mut e = Echelon::new(field, dim);
    let mut kernel = Vec::new();
    for (j, c) in columns.into_iter().enumerate() {
        if let Insert::Dependent(k) = e.insert_tagged(c, SparseVec::unit(j)) {
            kernel.push(k);
        }
    }
    (e.rank(), kernel)
}

/// A subquotient `upper / lower` of `F_q^ambient`, with `lower` contained in
/// `upper`, presented by representatives and a coordinate projection.
#[derive(Clone, Debug)]
pub struct Subquotient {
    echelon: Echelon,
    reps: Vec<SparseVec>,
    lower_basis: Vec<SparseVec>,
}

impl Subquotient {
    /// Generators of `lower` are inserted first; generators of `upper` that
    /// stay independent become the representatives, in input order.
    pub fn new(
        field: &FieldSpec,
        ambient: usize,
        lower: impl IntoIterator<Item = SparseVec>,
        upper: impl IntoIterator<Item = SparseVec>,
    ) -> Subquotient {
        let mut echelon = Echelon::new(field, ambient);
        let mut lower_basis = Vec::new();
        for v in lower {
            if echelon.insert(v.clone()) {
                lower_basis.push(v);
            }
        }
        let mut reps = Vec::new();
        for v in upper {
            let k = reps.len();
            if let Insert::Independent(_) = echelon.insert_tagged(v.clone(), SparseVec::unit(k)) {
                reps.push(v);
            }
        }
        Subquotient { echelon, reps, lower_basis }
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }
    pub fn ambient(&self) -> usize {
        self.echelon.dim()
    }
    pub fn reps(&self) -> &[SparseVec] {
        &self.reps
    }
    /// An independent spanning set of the lower space.
    pub fn lower_basis(&self) -> &[SparseVec] {
        &self.lower_basis
    }
    pub fn field(&self) -> &FieldSpec {
        self.echelon.field()
    }

    /// Coordinates of the class of `v`; fails when `v` is outside `upper`.
    pub fn project(&self, v: &SparseVec) -> Result<Vec<Scalar>> {
        let (res, comb) = self.echelon.reduce(v);
        if !res.is_zero() {
            return Err(Error::NotInSubspace);
        }
        Ok(comb.to_dense(self.reps.len()))
    }

    /// Whether `v` lies in the lower space.
    pub fn is_trivial_class(&self, v: &SparseVec) -> Result<bool> {
        Ok(self.project(v)?.iter().all(|c| c.is_zero()))
    }

    /// The representative combination with the given coordinates.
    pub fn lift(&self, coords: &[Scalar]) -> SparseVec {
        let f = self.echelon.field();
        let mut v = SparseVec::new();
        for (rep, &c) in self.reps.iter().zip(coords) {
            v.axpy(f, c, rep);
        }
        v
    }
}
