//! Windowed annihilator certificates for `H^i(G, R)` over `S`.
//!
//! Everything here is restricted to a finite range of internal degrees
//! (the window). A certificate says that `s^a` kills every slice `H^i_m`
//! with `m <= N`; it says nothing about larger `m`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::cohomology::{Cohomology, CohomologySlice, Model};
use crate::error::{Error, Result};
use crate::exactalg::{kernel_of_columns, Scalar, SparseMatrix, SparseVec};
use crate::invariants::{check_invariant, DicksonClass, InvariantRing};
use crate::polyring::{Homogeneity, Polynomial};
use crate::steenrod::steenrod_p;

/// Per-degree data of a certificate.
#[derive(Clone, Debug)]
pub struct SliceWitness {
    pub m: usize,
    pub dim: usize,
    /// Least `a` killing this slice (0 when the slice is zero).
    pub exponent: usize,
    /// Single-step action matrices `H_{m + jk} -> H_{m + (j+1)k}` for `j < exponent`.
    pub steps: Vec<SparseMatrix>,
}

#[derive(Clone, Debug)]
pub struct NilpotencyCertificate {
    pub i: usize,
    pub window: usize,
    pub model: Model,
    pub s: Polynomial,
    pub s_degree: usize,
    /// Least `a >= 1` with `s^a` acting as zero on every slice in the window.
    pub a: usize,
    pub slices: Vec<SliceWitness>,
    /// A degree where `s^{a-1}` acts nontrivially, if any slice is nonzero.
    pub minimality_degree: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Exhaustion {
    pub i: usize,
    pub window: usize,
    pub max_power: usize,
    pub largest_surviving_degree: usize,
    /// `(m, rank of the action of s^A on H_m)` for every surviving slice.
    pub survivors: Vec<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub enum NilpotencyOutcome {
    Certificate(NilpotencyCertificate),
    Exhausted(Exhaustion),
}

impl NilpotencyOutcome {
    pub fn certificate(&self) -> Option<&NilpotencyCertificate> {
        match self {
            NilpotencyOutcome::Certificate(c) => Some(c),
            NilpotencyOutcome::Exhausted(_) => None,
        }
    }
}

fn degree_of(s: &Polynomial) -> Result<usize> {
    match s.homogeneity() {
        Homogeneity::Zero => Ok(0),
        Homogeneity::Homogeneous(k) => Ok(k),
        Homogeneity::Inhomogeneous => Err(Error::Inhomogeneous),
    }
}

/// Smallest `a <= max_power` with `s^a H^i_m = 0` for all `m <= window`.
/// The power is found by composing single-step action matrices and then
/// rechecked by multiplying representatives by `s^a` directly.
pub fn nilpotency_search(
    coh: &Cohomology,
    model: Model,
    i: usize,
    s: &Polynomial,
    window: usize,
    max_power: usize,
) -> Result<NilpotencyOutcome> {
    if i == 0 {
        return Err(Error::IndexZero);
    }
    check_invariant(coh.group(), s)?;
    let k = degree_of(s)?;
    let field = coh.field().clone();
    let mut steps: HashMap<usize, SparseMatrix> = HashMap::new();
    let mut slices = Vec::new();
    let mut survivors = Vec::new();
    for m in 0..=window {
        let src = coh.slice(model, i, m)?;
        if src.dim() == 0 {
            slices.push(SliceWitness { m, dim: 0, exponent: 0, steps: Vec::new() });
            continue;
        }
        let mut comp = SparseMatrix::identity(src.dim());
        let mut chain = Vec::new();
        let mut found = None;
        for step in 1..=max_power {
            let from_deg = m + (step - 1) * k;
            if let std::collections::hash_map::Entry::Vacant(e) = steps.entry(from_deg) {
                let from = coh.slice(model, i, from_deg)?;
                let to = coh.slice(model, i, from_deg + k)?;
                e.insert(coh.s_action(s, &from, &to)?);
            }
            let act = &steps[&from_deg];
            chain.push(act.clone());
            comp = act.mul(&field, &comp)?;
            if comp.is_zero() {
                found = Some(step);
                break;
            }
        }
        match found {
            Some(a) => slices.push(SliceWitness { m, dim: src.dim(), exponent: a, steps: chain }),
            None => survivors.push((m, comp.rank(&field))),
        }
    }
    if let Some(&(largest, _)) = survivors.last() {
        return Ok(NilpotencyOutcome::Exhausted(Exhaustion {
            i,
            window,
            max_power,
            largest_surviving_degree: largest,
            survivors,
        }));
    }
    let a = slices.iter().map(|w| w.exponent).max().unwrap_or(0).max(1);
    let minimality_degree = slices.iter().find(|w| w.exponent == a).map(|w| w.m);
    let cert = NilpotencyCertificate { i, window, model, s: s.clone(), s_degree: k, a, slices, minimality_degree };
    recheck_certificate(coh, &cert)?;
    Ok(NilpotencyOutcome::Certificate(cert))
}

/// Independent check of a certificate: multiply every cocycle representative
/// by the polynomial `s^a` and project; also confirm minimality with `s^{a-1}`.
pub fn recheck_certificate(coh: &Cohomology, cert: &NilpotencyCertificate) -> Result<()> {
    let sa = cert.s.pow(cert.a as u64);
    for m in 0..=cert.window {
        let src = coh.slice(cert.model, cert.i, m)?;
        if src.dim() == 0 {
            continue;
        }
        let target = coh.slice(cert.model, cert.i, m + cert.a * cert.s_degree)?;
        for rep in src.reps() {
            if !target.is_coboundary(&coh.multiply_cochain(&sa, m, rep)?)? {
                return Err(Error::Audit(format!("s^{} does not kill H^{}_{m}", cert.a, cert.i)));
            }
        }
    }
    if let Some(m) = cert.minimality_degree {
        let src = coh.slice(cert.model, cert.i, m)?;
        let lower = cert.s.pow(cert.a as u64 - 1);
        let target = coh.slice(cert.model, cert.i, m + (cert.a - 1) * cert.s_degree)?;
        let mut all_trivial = true;
        for rep in src.reps() {
            if !target.is_coboundary(&coh.multiply_cochain(&lower, m, rep)?)? {
                all_trivial = false;
                break;
            }
        }
        if all_trivial {
            return Err(Error::Audit(format!("exponent {} is not minimal at m = {m}", cert.a)));
        }
    }
    Ok(())
}

/// Invariants of degree `k <= degree_window` killing every slice `m <= window`.
/// Truncating the window can only add elements, so each degree piece is a
/// superset of the corresponding piece of the true annihilator.
#[derive(Clone, Debug)]
pub struct WindowedAnnihilator {
    pub i: usize,
    pub window: usize,
    pub degree_window: usize,
    pub model: Model,
    /// `(k, dim S_k, basis of the annihilating subspace of S_k)`.
    pub degrees: Vec<(usize, usize, Vec<Polynomial>)>,
}

impl WindowedAnnihilator {
    pub fn elements(&self) -> impl Iterator<Item = &Polynomial> {
        self.degrees.iter().flat_map(|(_, _, b)| b.iter())
    }
}

fn flatten(m: &SparseMatrix, out: &mut Vec<(usize, Scalar)>, offset: usize) -> usize {
    for (j, c) in m.columns().iter().enumerate() {
        for &(r, v) in c.entries() {
            out.push((offset + j * m.rows() + r, v));
        }
    }
    m.rows() * m.cols()
}

pub fn windowed_annihilator(
    coh: &Cohomology,
    invariants: &InvariantRing,
    model: Model,
    i: usize,
    window: usize,
    degree_window: usize,
) -> Result<WindowedAnnihilator> {
    if i == 0 {
        return Err(Error::IndexZero);
    }
    let field = coh.field().clone();
    let nonzero: Vec<Arc<CohomologySlice>> =
        (0..=window).map(|m| coh.slice(model, i, m)).filter(|s| s.as_ref().map_or(true, |s| s.dim() > 0)).collect::<Result<_>>()?;
    let mut degrees = Vec::new();
    for k in 0..=degree_window {
        let sk = invariants.slice(k)?;
        let mut columns = Vec::with_capacity(sk.dim());
        let mut total = 0;
        for b in sk.basis() {
            let mut pairs = Vec::new();
            let mut offset = 0;
            for src in &nonzero {
                let to = coh.slice(model, i, src.m + k)?;
                offset += flatten(&coh.s_action(b, src, &to)?, &mut pairs, offset);
            }
            total = offset;
            columns.push(SparseVec::from_pairs(&field, pairs));
        }
        let (_, kernel) = kernel_of_columns(&field, total, columns);
        let basis = crate::exactalg::canonical_basis(&field, sk.dim(), kernel)
            .iter()
            .map(|c| {
                let v = sk.lift(&field, c);
                invariants.ring().from_sparse(k, &v)
            })
            .collect();
        degrees.push((k, sk.dim(), basis));
    }
    Ok(WindowedAnnihilator { i, window, degree_window, model, degrees })
}

/// Whether `t` acts as zero on every nonzero slice `m <= limit`.
fn kills_window(coh: &Cohomology, model: Model, i: usize, t: &Polynomial, limit: usize) -> Result<bool> {
    let k = degree_of(t)?;
    for m in 0..=limit {
        let src = coh.slice(model, i, m)?;
        if src.dim() == 0 || t.is_zero() {
            continue;
        }
        let to = coh.slice(model, i, m + k)?;
        if !coh.s_action(t, &src, &to)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug)]
pub struct PStarEntry {
    pub power: usize,
    pub image: Polynomial,
    /// Slices `m <= checked_up_to` were tested; `None` when no slice qualifies.
    pub checked_up_to: Option<usize>,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct PStarReport {
    pub i: usize,
    pub window: usize,
    pub t: Polynomial,
    pub entries: Vec<PStarEntry>,
    /// When `deg t <= max_power`: whether `P^{deg t}(t)` equals `t^q`.
    pub top_power_is_frobenius: Option<bool>,
}

impl PStarReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass) && self.top_power_is_frobenius != Some(false)
    }
}

/// For an annihilating `t`, checks that each `P^j(t)`, `1 <= j <= max_power`,
/// also annihilates the slices `m` with `m + j(q-1) <= window`: those are the
/// slices on which the module formula for `Q^j` only involves in-window data.
pub fn pstar_invariance_check(
    coh: &Cohomology,
    model: Model,
    i: usize,
    t: &Polynomial,
    max_power: usize,
    window: usize,
) -> Result<PStarReport> {
    if i == 0 {
        return Err(Error::IndexZero);
    }
    check_invariant(coh.group(), t)?;
    if !kills_window(coh, model, i, t, window)? {
        return Err(Error::NotAnnihilating(format!("{t} on H^{i}, m <= {window}")));
    }
    let q = coh.field().q() as usize;
    let mut entries = Vec::new();
    for j in 1..=max_power {
        let image = steenrod_p(j, t);
        check_invariant(coh.group(), &image).map_err(|_| Error::Audit(format!("P^{j}(t) is not invariant")))?;
        let shift = j * (q - 1);
        let (checked_up_to, pass) = if shift > window {
            (None, true)
        } else {
            let lim = window - shift;
            (Some(lim), kills_window(coh, model, i, &image, lim)?)
        };
        entries.push(PStarEntry { power: j, image, checked_up_to, pass });
    }
    let top_power_is_frobenius = match t.homogeneity() {
        Homogeneity::Homogeneous(n) if n <= max_power => Some(entries[n - 1].image == t.pow(q as u64)),
        _ => None,
    };
    Ok(PStarReport { i, window, t: t.clone(), entries, top_power_is_frobenius })
}

/// The exponents `a_j` and products `q_i = prod_{j <= i} d^{a_j}`.
#[derive(Clone, Debug)]
pub struct ExponentLedger {
    pub top: Polynomial,
    pub top_degree: usize,
    pub exponents: Vec<usize>,
    pub products: Vec<Polynomial>,
}

impl ExponentLedger {
    /// Total exponent of `d` in `q_i`.
    pub fn power(&self, i: usize) -> usize {
        self.exponents[..=i].iter().sum()
    }
    pub fn degree(&self, i: usize) -> usize {
        self.power(i) * self.top_degree
    }
}

/// Assemble `q_0..q_i` from certificates `a_j`, `j <= i`.
pub fn exponent_ledger(top: &DicksonClass, exponents: &BTreeMap<usize, usize>, i: usize) -> Result<ExponentLedger> {
    let mut a = Vec::with_capacity(i + 1);
    for j in 0..=i {
        let aj = *exponents.get(&j).ok_or(Error::MissingCertificate(j))?;
        if aj == 0 {
            return Err(Error::Input(format!("exponent a_{j} must be at least 1")));
        }
        a.push(aj);
    }
    let mut products: Vec<Polynomial> = Vec::with_capacity(i + 1);
    let mut total = 0u64;
    for (j, &aj) in a.iter().enumerate() {
        total += aj as u64;
        let step = top.poly.pow(aj as u64);
        let q = match products.last() {
            Some(prev) => prev * &step,
            None => step,
        };
        if q != top.poly.pow(total) {
            return Err(Error::Audit(format!("q_{j} is not d^{total}")));
        }
        if q.homogeneous_degree()? != Some(total as usize * top.degree) {
            return Err(Error::Audit(format!("q_{j} has the wrong degree")));
        }
        products.push(q);
    }
    Ok(ExponentLedger { top: top.poly.clone(), top_degree: top.degree, exponents: a, products })
}
