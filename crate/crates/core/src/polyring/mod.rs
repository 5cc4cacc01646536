//! Sparse polynomials over `F_q` in a fixed number of variables.
//!
//! The monomial order is graded lexicographic with `x0 > x1 > ...`, fixed for
//! the whole crate. Graded bases list monomials from largest to smallest.

mod groebner;
mod text;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::exactalg::{FieldSpec, Scalar, SparseMatrix, SparseVec};

pub use groebner::{groebner_basis, is_groebner_basis, is_zero_dimensional, normal_form};

/// Tag recorded in reports for the global monomial order.
pub const MONOMIAL_ORDER: &str = "grlex(x0>x1>...)";

pub(crate) type Exps = SmallVec<[u16; 8]>;

/// An exponent vector.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub(crate) Exps);

impl Monomial {
    pub fn one(nvars: usize) -> Monomial {
        Monomial(SmallVec::from_elem(0, nvars))
    }

    pub fn from_exps(exps: &[u32]) -> Monomial {
        Monomial(exps.iter().map(|&e| u16::try_from(e).expect("exponent overflow")).collect())
    }

    pub fn var(nvars: usize, j: usize) -> Monomial {
        let mut m = Monomial::one(nvars);
        m.0[j] = 1;
        m
    }

    pub fn exps(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().map(|&e| e as u32)
    }

    #[inline]
    pub fn exp(&self, j: usize) -> u32 {
        self.0[j] as u32
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(&a, &b)| a.checked_add(b).expect("exponent overflow")).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming divisibility.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(&a, &b)| b - a).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(&a, &b)| a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(&a, &b)| a == 0 || b == 0)
    }

    /// `Some(j)` when this is a pure power of `x_j` with positive exponent.
    pub fn pure_power_var(&self) -> Option<usize> {
        let mut found = None;
        for (j, &e) in self.0.iter().enumerate() {
            if e > 0 {
                if found.is_some() {
                    return None;
                }
                found = Some(j);
            }
        }
        found
    }

    pub fn scale_exps(&self, k: u32) -> Monomial {
        Monomial(self.0.iter().map(|&e| u16::try_from(e as u32 * k).expect("exponent overflow")).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}
impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// All degree-`n` monomials in `nvars` variables, largest first.
#[derive(Debug)]
pub struct GradedBasis {
    nvars: usize,
    degree: usize,
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl GradedBasis {
    pub fn new(nvars: usize, degree: usize) -> GradedBasis {
        let mut monomials = Vec::new();
        let mut cur: Exps = SmallVec::from_elem(0, nvars);
        fn rec(j: usize, left: usize, cur: &mut Exps, out: &mut Vec<Monomial>) {
            let n = cur.len();
            if j + 1 == n {
                cur[j] = left as u16;
                out.push(Monomial(cur.clone()));
                return;
            }
            for e in (0..=left).rev() {
                cur[j] = e as u16;
                rec(j + 1, left - e, cur, out);
            }
            cur[j] = 0;
        }
        if nvars == 0 {
            if degree == 0 {
                monomials.push(Monomial::one(0));
            }
        } else {
            rec(0, degree, &mut cur, &mut monomials);
        }
        let index = monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        GradedBasis { nvars, degree, monomials, index }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }
    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn len(&self) -> usize {
        self.monomials.len()
    }
    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }
    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }
    pub fn monomial(&self, i: usize) -> &Monomial {
        &self.monomials[i]
    }
    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }
}

/// Number of degree-`n` monomials in `d` variables, `C(n + d - 1, d - 1)`.
pub fn graded_dimension(d: usize, n: usize) -> usize {
    if d == 0 {
        return usize::from(n == 0);
    }
    let (top, k) = (n + d - 1, d - 1);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (top - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

struct RingInner {
    field: FieldSpec,
    nvars: usize,
    bases: Mutex<HashMap<usize, Arc<GradedBasis>>>,
}

/// `F_q[x_0, ..., x_{d-1}]` with a cache of graded bases. Cheap to clone.
#[derive(Clone)]
pub struct PolyRing {
    inner: Arc<RingInner>,
}

impl fmt::Debug for PolyRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}[x0..x{}]", self.inner.field, self.inner.nvars)
    }
}

impl PartialEq for PolyRing {
    fn eq(&self, other: &Self) -> bool {
        self.inner.nvars == other.inner.nvars && self.inner.field == other.inner.field
    }
}
impl Eq for PolyRing {}

impl PolyRing {
    pub fn new(field: FieldSpec, nvars: usize) -> PolyRing {
        PolyRing { inner: Arc::new(RingInner { field, nvars, bases: Mutex::new(HashMap::new()) }) }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.inner.field
    }
    pub fn nvars(&self) -> usize {
        self.inner.nvars
    }

    pub fn basis(&self, n: usize) -> Arc<GradedBasis> {
        let mut cache = self.inner.bases.lock().unwrap();
        cache.entry(n).or_insert_with(|| Arc::new(GradedBasis::new(self.inner.nvars, n))).clone()
    }

    pub fn zero(&self) -> Polynomial {
        Polynomial::zero(self.field(), self.nvars())
    }
    pub fn one(&self) -> Polynomial {
        Polynomial::constant(self.field(), self.nvars(), Scalar::ONE)
    }
    pub fn var(&self, j: usize) -> Polynomial {
        Polynomial::var(self.field(), self.nvars(), j)
    }

    pub fn parse(&self, s: &str) -> Result<Polynomial> {
        Polynomial::parse(self.field(), self.nvars(), s)
    }

    pub fn from_vector(&self, n: usize, v: &[Scalar]) -> Result<Polynomial> {
        Polynomial::from_vector(self.field(), &self.basis(n), v)
    }

    pub fn from_sparse(&self, n: usize, v: &SparseVec) -> Polynomial {
        Polynomial::from_sparse(self.field(), &self.basis(n), v)
    }

    /// Matrix of multiplication by homogeneous `s` from `R_m` to `R_{m + deg s}`.
    pub fn mult_matrix(&self, s: &Polynomial, m: usize) -> Result<SparseMatrix> {
        let k = match s.homogeneity() {
            Homogeneity::Zero => 0,
            Homogeneity::Homogeneous(k) => k,
            Homogeneity::Inhomogeneous => return Err(Error::Inhomogeneous),
        };
        let (src, dst) = (self.basis(m), self.basis(m + k));
        let f = self.field();
        let columns = src
            .monomials()
            .iter()
            .map(|mu| {
                let pairs = s.terms.iter().map(|(nu, &c)| (dst.index_of(&mu.mul(nu)).unwrap(), c)).collect();
                SparseVec::from_pairs(f, pairs)
            })
            .collect();
        Ok(SparseMatrix::new(dst.len(), columns))
    }
}

/// Result of a homogeneity query.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Homogeneity {
    Zero,
    Homogeneous(usize),
    Inhomogeneous,
}

/// A polynomial in `nvars` variables; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    field: FieldSpec,
    nvars: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl Polynomial {
    pub fn zero(field: &FieldSpec, nvars: usize) -> Polynomial {
        Polynomial { field: field.clone(), nvars, terms: BTreeMap::new() }
    }

    pub fn constant(field: &FieldSpec, nvars: usize, c: Scalar) -> Polynomial {
        Polynomial::term(field, Monomial::one(nvars), c)
    }

    pub fn var(field: &FieldSpec, nvars: usize, j: usize) -> Polynomial {
        Polynomial::term(field, Monomial::var(nvars, j), Scalar::ONE)
    }

    pub fn term(field: &FieldSpec, m: Monomial, c: Scalar) -> Polynomial {
        let nvars = m.nvars();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { field: field.clone(), nvars, terms }
    }

    /// Build from `(monomial, coefficient)` pairs, summing duplicates.
    pub fn from_terms(field: &FieldSpec, nvars: usize, pairs: impl IntoIterator<Item = (Monomial, Scalar)>) -> Polynomial {
        let mut p = Polynomial::zero(field, nvars);
        for (m, c) in pairs {
            debug_assert_eq!(m.nvars(), nvars);
            p.add_term(m, c);
        }
        p
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }
    pub fn nvars(&self) -> usize {
        self.nvars
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms from largest to smallest monomial.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, Scalar)> {
        self.terms.iter().rev().map(|(m, &c)| (m, c))
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).copied().unwrap_or(Scalar::ZERO)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, Scalar)> {
        self.terms.last_key_value().map(|(m, &c)| (m, c))
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = self.field.add(*e.get(), c);
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    /// `self += c * shift * g`.
    pub(crate) fn axpy_shifted(&mut self, c: Scalar, shift: &Monomial, g: &Polynomial) {
        if c.is_zero() {
            return;
        }
        for (m, &v) in &g.terms {
            let prod = self.field.mul(c, v);
            self.add_term(shift.mul(m), prod);
        }
    }

    fn compatible(&self, other: &Polynomial) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.nvars != other.nvars {
            return Err(Error::NvarsMismatch(self.nvars, other.nvars));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), self.field.neg(c));
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.compatible(other)?;
        let f = &self.field;
        if self.terms.len() == 1 {
            let (m, &c) = self.terms.iter().next().unwrap();
            return Ok(other.mul_term(m, c));
        }
        let mut acc: HashMap<Monomial, Scalar> = HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                let e = acc.entry(a.mul(b)).or_insert(Scalar::ZERO);
                *e = f.mul_add(ca, cb, *e);
            }
        }
        Ok(Polynomial {
            field: f.clone(),
            nvars: self.nvars,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        })
    }

    pub fn scale(&self, c: Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.field, self.nvars);
        }
        Polynomial {
            field: self.field.clone(),
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, &v)| (m.clone(), self.field.mul(c, v))).collect(),
        }
    }

    /// `c * m * self`.
    pub fn mul_term(&self, m: &Monomial, c: Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.field, self.nvars);
        }
        Polynomial {
            field: self.field.clone(),
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, &v)| (k.mul(m), self.field.mul(c, v))).collect(),
        }
    }

    /// `self^p`, computed termwise (Frobenius).
    pub fn frobenius(&self) -> Polynomial {
        let p = self.field.p();
        Polynomial {
            field: self.field.clone(),
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, &c)| (m.scale_exps(p), self.field.frobenius(c))).collect(),
        }
    }

    pub fn pow(&self, mut e: u64) -> Polynomial {
        let p = self.field.p() as u64;
        let mut base = self.clone();
        while e > 0 && e.is_multiple_of(p) {
            base = base.frobenius();
            e /= p;
        }
        let mut acc = Polynomial::constant(&self.field, self.nvars, Scalar::ONE);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Largest total degree of a term; `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn homogeneity(&self) -> Homogeneity {
        let mut degs = self.terms.keys().map(|m| m.degree());
        match degs.next() {
            None => Homogeneity::Zero,
            Some(d) => {
                if degs.all(|e| e == d) {
                    Homogeneity::Homogeneous(d)
                } else {
                    Homogeneity::Inhomogeneous
                }
            }
        }
    }

    /// Degree of a homogeneous polynomial (`None` for zero).
    pub fn homogeneous_degree(&self) -> Result<Option<usize>> {
        match self.homogeneity() {
            Homogeneity::Zero => Ok(None),
            Homogeneity::Homogeneous(d) => Ok(Some(d)),
            Homogeneity::Inhomogeneous => Err(Error::Inhomogeneous),
        }
    }

    pub fn graded_component(&self, n: usize) -> Polynomial {
        Polynomial {
            field: self.field.clone(),
            nvars: self.nvars,
            terms: self.terms.iter().filter(|(m, _)| m.degree() == n).map(|(m, &c)| (m.clone(), c)).collect(),
        }
    }

    fn check_basis(&self, basis: &GradedBasis) -> Result<()> {
        if basis.nvars() != self.nvars {
            return Err(Error::NvarsMismatch(basis.nvars(), self.nvars));
        }
        match self.homogeneity() {
            Homogeneity::Zero => Ok(()),
            Homogeneity::Homogeneous(d) if d == basis.degree() => Ok(()),
            Homogeneity::Homogeneous(d) => Err(Error::DegreeMismatch { expected: basis.degree(), found: d }),
            Homogeneity::Inhomogeneous => Err(Error::Inhomogeneous),
        }
    }

    pub fn coeff_vector(&self, basis: &GradedBasis) -> Result<Vec<Scalar>> {
        self.check_basis(basis)?;
        let mut v = vec![Scalar::ZERO; basis.len()];
        for (m, &c) in &self.terms {
            v[basis.index_of(m).unwrap()] = c;
        }
        Ok(v)
    }

    pub fn coeff_sparse(&self, basis: &GradedBasis) -> Result<SparseVec> {
        self.check_basis(basis)?;
        let pairs = self.terms.iter().map(|(m, &c)| (basis.index_of(m).unwrap(), c)).collect();
        Ok(SparseVec::from_pairs(&self.field, pairs))
    }

    pub fn from_vector(field: &FieldSpec, basis: &GradedBasis, v: &[Scalar]) -> Result<Polynomial> {
        if v.len() != basis.len() {
            return Err(Error::LengthMismatch { expected: basis.len(), found: v.len() });
        }
        Ok(Polynomial::from_terms(
            field,
            basis.nvars(),
            v.iter().enumerate().map(|(i, &c)| (basis.monomial(i).clone(), c)),
        ))
    }

    pub fn from_sparse(field: &FieldSpec, basis: &GradedBasis, v: &SparseVec) -> Polynomial {
        Polynomial {
            field: field.clone(),
            nvars: basis.nvars(),
            terms: v.entries().iter().map(|&(i, c)| (basis.monomial(i).clone(), c)).collect(),
        }
    }

    /// Substitute `images[j]` for `x_j` (all images in a common ring).
    pub fn substitute(&self, images: &[Polynomial]) -> Result<Polynomial> {
        if images.len() != self.nvars {
            return Err(Error::LengthMismatch { expected: self.nvars, found: images.len() });
        }
        let Some(first) = images.first() else {
            return Ok(self.clone());
        };
        let target_nvars = first.nvars;
        let mut cache: Vec<Vec<Polynomial>> = images.iter().map(|_| Vec::new()).collect();
        let mut out = Polynomial::zero(&self.field, target_nvars);
        for (m, &c) in &self.terms {
            let mut t = Polynomial::constant(&self.field, target_nvars, c);
            for (j, e) in m.exps().enumerate() {
                if e == 0 {
                    continue;
                }
                let pw = &mut cache[j];
                if pw.is_empty() {
                    pw.push(Polynomial::constant(&self.field, target_nvars, Scalar::ONE));
                }
                while pw.len() <= e as usize {
                    let next = pw.last().unwrap().checked_mul(&images[j])?;
                    pw.push(next);
                }
                t = t.checked_mul(&pw[e as usize])?;
            }
            out = out.checked_add(&t)?;
        }
        Ok(out)
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    /// Panics on mixed rings; use [`Polynomial::checked_add`] to get an error.
    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        self.checked_add(rhs).expect("polynomials from different rings")
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        self.checked_sub(rhs).expect("polynomials from different rings")
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        self.checked_mul(rhs).expect("polynomials from different rings")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(self.field.neg(Scalar::ONE))
    }
}

#[cfg(test)]
pub(crate) mod tests_support {
    use super::*;
    use rand::Rng;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_poly(rng: &mut ChaCha8Rng, ring: &PolyRing, max_deg: usize, terms: usize) -> Polynomial {
        let f = ring.field();
        let pairs: Vec<(Monomial, Scalar)> = (0..terms)
            .map(|_| {
                let n = rng.gen_range(0..=max_deg);
                let b = ring.basis(n);
                let m = b.monomial(rng.gen_range(0..b.len())).clone();
                (m, Scalar(rng.gen_range(0..f.q())))
            })
            .collect();
        Polynomial::from_terms(f, ring.nvars(), pairs)
    }
}
