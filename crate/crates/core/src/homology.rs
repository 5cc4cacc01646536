//! Degreewise Koszul homology over `S`, colon quotients, annihilation
//! tables and a depth estimate.
//!
//! Chain modules are `K_i = sum_{|J| = i} S(-e_J)`, so the degree-`n` piece
//! of `K_i` is the direct sum of the slices `S_{n - e_J}`, in invariant
//! coordinates, over the subsets `J` (listed in lexicographic order) with
//! `e_J <= n`.

use std::collections::{BTreeMap, HashMap};
use std::ops::RangeInclusive;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::exactalg::{kernel_of_columns, Echelon, SparseMatrix, SparseVec, Subquotient};
use crate::invariants::{check_invariant, validate_hsop, InvariantRing};
use crate::polyring::{Homogeneity, Polynomial};

/// One degree piece `H_i(x)_n` with the boundary maps around it.
#[derive(Clone, Debug)]
pub struct KoszulSlice {
    pub i: usize,
    pub n: usize,
    /// `dim K_{i,n}`.
    pub chain_dim: usize,
    /// `d_{i+1}: K_{i+1,n} -> K_{i,n}`.
    pub boundary_in: SparseMatrix,
    /// `d_i: K_{i,n} -> K_{i-1,n}`.
    pub boundary_out: SparseMatrix,
    pub homology: Subquotient,
}

impl KoszulSlice {
    pub fn dim(&self) -> usize {
        self.homology.dim()
    }
}

#[derive(Clone, Copy, Debug)]
struct Block {
    mask: u32,
    offset: usize,
    /// Degree of the `S` slice carried by this block.
    degree: usize,
    dim: usize,
}

pub struct KoszulComplex {
    s: Arc<InvariantRing>,
    x: Vec<Polynomial>,
    degrees: Vec<usize>,
    mult: Mutex<HashMap<(usize, usize), Arc<SparseMatrix>>>,
    slices: Mutex<BTreeMap<(usize, usize), Arc<KoszulSlice>>>,
}

fn subsets(r: usize, i: usize) -> Vec<u32> {
    // lexicographic order of the sorted index lists
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..i).collect();
    if i > r {
        return out;
    }
    loop {
        out.push(idx.iter().fold(0u32, |m, &k| m | (1 << k)));
        let mut p = i;
        while p > 0 && idx[p - 1] == r - i + p - 1 {
            p -= 1;
        }
        if p == 0 {
            return out;
        }
        idx[p - 1] += 1;
        for k in p..i {
            idx[k] = idx[k - 1] + 1;
        }
    }
}

fn homogeneous_degree_of(f: &Polynomial) -> Result<usize> {
    match f.homogeneity() {
        Homogeneity::Zero => Ok(0),
        Homogeneity::Homogeneous(k) => Ok(k),
        Homogeneity::Inhomogeneous => Err(Error::Inhomogeneous),
    }
}

impl KoszulComplex {
    pub fn new(s: Arc<InvariantRing>, x: Vec<Polynomial>) -> Result<KoszulComplex> {
        if x.len() > 16 {
            return Err(Error::Input("at most 16 sequence elements".into()));
        }
        let mut degrees = Vec::with_capacity(x.len());
        for f in &x {
            degrees.push(homogeneous_degree_of(f)?);
            check_invariant(s.group(), f)?;
        }
        Ok(KoszulComplex { s, x, degrees, mult: Mutex::new(HashMap::new()), slices: Mutex::new(BTreeMap::new()) })
    }

    pub fn invariants(&self) -> &Arc<InvariantRing> {
        &self.s
    }
    pub fn sequence(&self) -> &[Polynomial] {
        &self.x
    }
    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }
    pub fn len(&self) -> usize {
        self.x.len()
    }
    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    fn mask_degree(&self, mask: u32) -> usize {
        (0..self.x.len()).filter(|k| mask & (1 << k) != 0).map(|k| self.degrees[k]).sum()
    }

    fn blocks(&self, i: usize, n: usize) -> Result<Vec<Block>> {
        let mut out = Vec::new();
        let mut offset = 0;
        for mask in subsets(self.x.len(), i) {
            let e = self.mask_degree(mask);
            if e > n {
                continue;
            }
            let dim = self.s.dim(n - e)?;
            out.push(Block { mask, offset, degree: n - e, dim });
            offset += dim;
        }
        Ok(out)
    }

    pub fn chain_dim(&self, i: usize, n: usize) -> Result<usize> {
        Ok(self.blocks(i, n)?.iter().map(|b| b.dim).sum())
    }

    fn mult_by(&self, k: usize, degree: usize) -> Result<Arc<SparseMatrix>> {
        if let Some(m) = self.mult.lock().unwrap().get(&(k, degree)) {
            return Ok(m.clone());
        }
        let m = Arc::new(self.s.mult_matrix(&self.x[k], degree)?);
        self.mult.lock().unwrap().insert((k, degree), m.clone());
        Ok(m)
    }

    /// `d_i` on the degree-`n` piece: `e_J -> sum_pos (-1)^pos x_{j_pos} e_{J - j_pos}`.
    pub fn boundary(&self, i: usize, n: usize) -> Result<SparseMatrix> {
        let src = self.blocks(i, n)?;
        let cols: usize = src.iter().map(|b| b.dim).sum();
        if i == 0 {
            return Ok(SparseMatrix::zeros(0, cols));
        }
        let dst = self.blocks(i - 1, n)?;
        let rows: usize = dst.iter().map(|b| b.dim).sum();
        let index: HashMap<u32, Block> = dst.iter().map(|b| (b.mask, *b)).collect();
        let field = self.s.field();
        let mut columns = Vec::with_capacity(cols);
        for b in &src {
            let parts: Vec<(usize, bool, Arc<SparseMatrix>, usize)> = (0..self.x.len())
                .filter(|k| b.mask & (1 << k) != 0)
                .enumerate()
                .map(|(pos, k)| {
                    let target = index[&(b.mask & !(1 << k))];
                    Ok((k, pos % 2 == 1, self.mult_by(k, b.degree)?, target.offset))
                })
                .collect::<Result<_>>()?;
            for c in 0..b.dim {
                let mut v = SparseVec::new();
                for (_, negate, m, offset) in &parts {
                    let img = m.column(c).shifted(*offset);
                    let coeff = if *negate { field.neg(field.from_int(1)) } else { field.from_int(1) };
                    v.axpy(field, coeff, &img);
                }
                columns.push(v);
            }
        }
        Ok(SparseMatrix::new(rows, columns))
    }

    pub fn slice(&self, i: usize, n: usize) -> Result<Arc<KoszulSlice>> {
        if let Some(s) = self.slices.lock().unwrap().get(&(i, n)) {
            return Ok(s.clone());
        }
        let field = self.s.field();
        let boundary_out = self.boundary(i, n)?;
        let boundary_in = self.boundary(i + 1, n)?;
        let chain_dim = boundary_out.cols();
        if !boundary_out.mul(field, &boundary_in)?.is_zero() {
            return Err(Error::Audit(format!("Koszul boundary squares to a nonzero map at i = {i}, n = {n}")));
        }
        let (_, cycles) = kernel_of_columns(field, boundary_out.rows(), boundary_out.columns().to_vec());
        let homology = Subquotient::new(field, chain_dim, boundary_in.columns().to_vec(), cycles);
        let s = Arc::new(KoszulSlice { i, n, chain_dim, boundary_in, boundary_out, homology });
        self.slices.lock().unwrap().insert((i, n), s.clone());
        Ok(s)
    }

    /// Multiply a chain in `K_{i,n}` by a homogeneous invariant `q`, landing in `K_{i,n + deg q}`.
    pub fn multiply_chain(&self, q: &Polynomial, i: usize, n: usize, v: &SparseVec) -> Result<SparseVec> {
        let k = homogeneous_degree_of(q)?;
        let src = self.blocks(i, n)?;
        let dst: HashMap<u32, Block> = self.blocks(i, n + k)?.into_iter().map(|b| (b.mask, b)).collect();
        let field = self.s.field();
        let mut out = SparseVec::new();
        for b in &src {
            let part = v.window(b.offset, b.offset + b.dim);
            if part.is_zero() {
                continue;
            }
            let m = self.s.mult_matrix(q, b.degree)?;
            out.axpy(field, field.from_int(1), &m.apply(field, &part).shifted(dst[&b.mask].offset));
        }
        Ok(out)
    }

    /// `sum (-1)^i dim K_{i,n}` and `sum (-1)^i dim H_i(x)_n`.
    pub fn euler_characteristics(&self, n: usize) -> Result<(i64, i64)> {
        let mut chains = 0i64;
        let mut homology = 0i64;
        for i in 0..=self.x.len() {
            let sign = if i % 2 == 0 { 1 } else { -1 };
            let s = self.slice(i, n)?;
            chains += sign * s.chain_dim as i64;
            homology += sign * s.dim() as i64;
        }
        Ok((chains, homology))
    }

    /// A spanning set of `(x_1..x_t)_n` in invariant coordinates (first `t` elements).
    fn ideal_span(&self, t: usize, n: usize) -> Result<Vec<SparseVec>> {
        let mut out = Vec::new();
        for k in 0..t {
            if self.degrees[k] <= n {
                out.extend(self.mult_by(k, n - self.degrees[k])?.columns().iter().cloned());
            }
        }
        Ok(out)
    }

    fn ideal_echelon(&self, t: usize, n: usize) -> Result<Echelon> {
        let mut e = Echelon::new(self.s.field(), self.s.dim(n)?);
        for v in self.ideal_span(t, n)? {
            e.insert(v);
        }
        Ok(e)
    }

    /// `((x_1..x_{t-1}) : x_t / (x_1..x_{t-1}))_n` for `1 <= t <= len`.
    pub fn colon_quotient_slice(&self, t: usize, n: usize) -> Result<ColonQuotientSlice> {
        if t == 0 || t > self.x.len() {
            return Err(Error::PositionOutOfRange { index: t, len: self.x.len() });
        }
        let field = self.s.field();
        let dim = self.s.dim(n)?;
        let target = self.ideal_echelon(t - 1, n + self.degrees[t - 1])?;
        let mult = self.mult_by(t - 1, n)?;
        let residuals: Vec<SparseVec> = mult.columns().iter().map(|c| target.residual(c)).collect();
        let (_, colon) = kernel_of_columns(field, target.dim(), residuals);
        let quotient = Subquotient::new(field, dim, self.ideal_span(t - 1, n)?, colon);
        for u in quotient.reps() {
            if !target.contains(&mult.apply(field, u)) {
                return Err(Error::Audit(format!("colon representative fails membership at t = {t}, n = {n}")));
            }
        }
        Ok(ColonQuotientSlice { t, n, quotient })
    }

    /// Compares `dim colon(t)_n` with `dim H_1(x_1..x_t)_{n + e_t}`. Equal whenever
    /// `H_1(x_1..x_{t-1})` vanishes in that degree, never smaller otherwise.
    pub fn colon_cross_check(&self, t: usize, n: usize) -> Result<ColonCrossCheck> {
        let colon = self.colon_quotient_slice(t, n)?.dim();
        let prefix = KoszulComplex::new(self.s.clone(), self.x[..t].to_vec())?;
        let shifted = n + self.degrees[t - 1];
        let koszul = prefix.slice(1, shifted)?.dim();
        let shorter = if t > 1 {
            KoszulComplex::new(self.s.clone(), self.x[..t - 1].to_vec())?.slice(1, shifted)?.dim()
        } else {
            0
        };
        let consistent = if shorter == 0 { koszul == colon } else { koszul >= colon };
        Ok(ColonCrossCheck { t, n, colon, koszul, shorter, consistent })
    }
}

#[derive(Clone, Debug)]
pub struct ColonCrossCheck {
    pub t: usize,
    pub n: usize,
    pub colon: usize,
    pub koszul: usize,
    /// `dim H_1(x_1..x_{t-1})` in the shifted degree.
    pub shorter: usize,
    pub consistent: bool,
}

#[derive(Clone, Debug)]
pub struct ColonQuotientSlice {
    pub t: usize,
    pub n: usize,
    /// Colon ideal modulo `(x_1..x_{t-1})`, inside `S_n` coordinates.
    pub quotient: Subquotient,
}

impl ColonQuotientSlice {
    pub fn dim(&self) -> usize {
        self.quotient.dim()
    }
}

#[derive(Clone, Debug)]
pub struct AnnihilationRow {
    pub degree: usize,
    pub dim: usize,
    /// Largest number of factors needed over the slice's representatives.
    pub factors_used: usize,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct AnnihilationReport {
    pub label: String,
    /// `base^power` is the element tested.
    pub base: Polynomial,
    pub power: usize,
    pub rows: Vec<AnnihilationRow>,
}

impl AnnihilationReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
    pub fn vacuous(&self) -> bool {
        self.rows.iter().all(|r| r.dim == 0)
    }
}

fn check_window(window: &RangeInclusive<usize>) -> Result<()> {
    if window.is_empty() {
        return Err(Error::WindowTooSmall(format!("empty degree range {}..={}", window.start(), window.end())));
    }
    Ok(())
}

/// Whether `base^power` kills `H_i(x)_n` for every `n` in the window. Classes
/// are multiplied by `base` one factor at a time and tested after each factor,
/// so a class dies as soon as some partial product is a boundary.
pub fn annihilation_check_koszul(
    koszul: &KoszulComplex,
    i: usize,
    base: &Polynomial,
    power: usize,
    window: RangeInclusive<usize>,
) -> Result<AnnihilationReport> {
    check_window(&window)?;
    check_invariant(koszul.s.group(), base)?;
    let k = homogeneous_degree_of(base)?;
    let mut rows = Vec::new();
    for n in window {
        let slice = koszul.slice(i, n)?;
        let mut used = 0;
        let mut pass = true;
        for rep in slice.homology.reps() {
            let mut cur = rep.clone();
            let mut died = None;
            for b in 1..=power {
                cur = koszul.multiply_chain(base, i, n + (b - 1) * k, &cur)?;
                if koszul.slice(i, n + b * k)?.homology.is_trivial_class(&cur)? {
                    died = Some(b);
                    break;
                }
            }
            match died {
                Some(b) => used = used.max(b),
                None => pass = false,
            }
        }
        rows.push(AnnihilationRow { degree: n, dim: slice.dim(), factors_used: used, pass });
    }
    Ok(AnnihilationReport { label: format!("H_{i}"), base: base.clone(), power, rows })
}

/// Whether `base^power` kills the colon quotient at position `t` in the window.
pub fn annihilation_check_colon(
    koszul: &KoszulComplex,
    t: usize,
    base: &Polynomial,
    power: usize,
    window: RangeInclusive<usize>,
) -> Result<AnnihilationReport> {
    check_window(&window)?;
    check_invariant(koszul.s.group(), base)?;
    let k = homogeneous_degree_of(base)?;
    let field = koszul.s.field().clone();
    let mut rows = Vec::new();
    for n in window {
        let slice = koszul.colon_quotient_slice(t, n)?;
        let mut used = 0;
        let mut pass = true;
        for rep in slice.quotient.reps() {
            let mut cur = rep.clone();
            let mut died = None;
            for b in 1..=power {
                let from = n + (b - 1) * k;
                cur = koszul.s.mult_matrix(base, from)?.apply(&field, &cur);
                if koszul.ideal_echelon(t - 1, from + k)?.contains(&cur) {
                    died = Some(b);
                    break;
                }
            }
            match died {
                Some(b) => used = used.max(b),
                None => pass = false,
            }
        }
        rows.push(AnnihilationRow { degree: n, dim: slice.dim(), factors_used: used, pass });
    }
    Ok(AnnihilationReport { label: format!("colon t={t}"), base: base.clone(), power, rows })
}

#[derive(Clone, Debug)]
pub struct DepthEstimate {
    pub d: usize,
    pub window: usize,
    /// `d - max{i : some H_i(x)_n != 0, n <= window}`.
    pub upper: usize,
    /// `min(dim V^P + 2, d)` for a Sylow `p`-subgroup `P`.
    pub lower: usize,
    pub fixed_dim: usize,
    pub sylow_order: usize,
    /// `(i, n, dim)` for every nonzero `H_i(x)_n` with `i >= 1`.
    pub nonzero: Vec<(usize, usize, usize)>,
    /// Number of consecutive top degrees of the window where all `H_i`, `i >= 1`, vanish.
    pub trailing_zero_run: usize,
}

impl DepthEstimate {
    /// Window evidence only: a zero run at least as long as the largest hsop degree.
    pub fn vanishing_looks_stable(&self, max_degree: usize) -> bool {
        self.trailing_zero_run >= max_degree.max(1)
    }
}

pub fn depth_estimate(s: Arc<InvariantRing>, x: &[Polynomial], window: usize) -> Result<DepthEstimate> {
    let group = s.group().clone();
    if !validate_hsop(&group, x)? {
        return Err(Error::HsopInvalid("sequence is not zero-dimensional".into()));
    }
    let d = group.d();
    let koszul = KoszulComplex::new(s, x.to_vec())?;
    let mut nonzero = Vec::new();
    let mut last_nonzero_degree = None;
    for n in 0..=window {
        for i in 1..=d {
            let dim = koszul.slice(i, n)?.dim();
            if dim > 0 {
                nonzero.push((i, n, dim));
                last_nonzero_degree = Some(n);
            }
        }
    }
    let top = nonzero.iter().map(|&(i, _, _)| i).max().unwrap_or(0);
    let upper = d - top;
    let sylow = group.sylow_p();
    let (fixed_dim, _) = group.fixed_subspace(&sylow)?;
    let lower = (fixed_dim + 2).min(d);
    let trailing_zero_run = match last_nonzero_degree {
        Some(n) => window - n,
        None => window + 1,
    };
    if upper < lower {
        return Err(Error::Audit(format!(
            "depth bounds contradict: Koszul upper {upper} < fixed-point lower {lower} (dim V^P = {fixed_dim}, |P| = {}, nonzero slices {nonzero:?})",
            sylow.len()
        )));
    }
    Ok(DepthEstimate { d, window, upper, lower, fixed_dim, sylow_order: sylow.len(), nonzero, trailing_zero_run })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::FieldSpec;
    use crate::group::{int_matrix, GroupContext, MatrixGroup};

    fn transvection() -> Arc<InvariantRing> {
        let f2 = FieldSpec::prime(2).unwrap();
        let ctx = GroupContext::new(f2.clone(), 2).unwrap();
        let g = MatrixGroup::close_generators(&ctx, &[int_matrix(&f2, &[&[1, 1], &[0, 1]])]).unwrap();
        Arc::new(InvariantRing::new(Arc::new(g)))
    }

    #[test]
    fn subset_order() {
        assert_eq!(subsets(3, 2), vec![0b011, 0b101, 0b110]);
        assert_eq!(subsets(3, 0), vec![0]);
        assert_eq!(subsets(2, 3), Vec::<u32>::new());
    }

    #[test]
    fn unit_sequence_is_exact() {
        let s = transvection();
        let k = KoszulComplex::new(s.clone(), vec![s.ring().one()]).unwrap();
        for n in 0..6 {
            assert_eq!(k.slice(0, n).unwrap().dim(), 0);
            assert_eq!(k.slice(1, n).unwrap().dim(), 0);
        }
    }

    #[test]
    fn regular_sequence_transvection() {
        let s = transvection();
        let x = vec![s.ring().parse("x1").unwrap(), s.ring().parse("x0^2 + x0*x1").unwrap()];
        let k = KoszulComplex::new(s.clone(), x.clone()).unwrap();
        for n in 0..=12 {
            for i in 1..=2 {
                assert_eq!(k.slice(i, n).unwrap().dim(), 0, "H_{i} in degree {n}");
            }
            // S/(x) is the ground field
            assert_eq!(k.slice(0, n).unwrap().dim(), usize::from(n == 0));
            let (a, b) = k.euler_characteristics(n).unwrap();
            assert_eq!(a, b);
            assert_eq!(k.colon_quotient_slice(2, n).unwrap().dim(), 0);
        }
        let est = depth_estimate(s, &x, 12).unwrap();
        assert_eq!((est.upper, est.lower, est.fixed_dim), (2, 2, 1));
    }

    #[test]
    fn colon_of_redundant_element_is_everything() {
        let s = transvection();
        let y = s.ring().parse("x1").unwrap();
        let k = KoszulComplex::new(s.clone(), vec![y.clone(), &y * &y]).unwrap();
        for n in 0..6 {
            let full = s.dim(n).unwrap();
            let ideal = if n >= 1 { s.dim(n - 1).unwrap() } else { 0 };
            assert_eq!(k.colon_quotient_slice(2, n).unwrap().dim(), full - ideal);
        }
        assert!(matches!(k.colon_quotient_slice(3, 0), Err(Error::PositionOutOfRange { .. })));
    }
}
