//! Graded group cohomology `H^i(G, R_m)`.
//!
//! The bar model uses inhomogeneous cochains `G^n -> R_m`, stored flat: the
//! tuple `(g_1, ..., g_n)` has index `sum g_k |G|^{n-k}` (lexicographic) and
//! occupies the block `[index * dim R_m, (index + 1) * dim R_m)`. The
//! differential is
//! `(d psi)(g_1..g_{n+1}) = g_1 psi(g_2..g_{n+1})
//!   + sum_{i=1}^{n} (-1)^i psi(.., g_i g_{i+1}, ..) + (-1)^{n+1} psi(g_1..g_n)`.
//!
//! For a cyclic group the periodic model (one copy of `R_m` per level, with
//! differentials alternating `g - 1` and the norm) computes the same groups
//! with far smaller matrices. `Q^m` is only ever defined on the bar model.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::exactalg::{kernel_of_columns, FieldSpec, Scalar, SparseMatrix, SparseVec, Subquotient};
use crate::group::MatrixGroup;
use crate::invariants::check_invariant;
use crate::polyring::{Homogeneity, Polynomial};
use crate::steenrod::steenrod_matrix;

/// Default limit on `|G|^{n+1} * dim R_m`.
pub const COCHAIN_BUDGET: u128 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Model {
    Bar,
    Periodic,
}

/// An element of `C^n(G, R_m)` in the flat layout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    pub n: usize,
    pub m: usize,
    pub order: usize,
    pub block: usize,
    pub values: Vec<Scalar>,
}

impl Cochain {
    pub fn zero(n: usize, m: usize, order: usize, block: usize) -> Cochain {
        Cochain { n, m, order, block, values: vec![Scalar::ZERO; order.pow(n as u32) * block] }
    }

    pub fn from_sparse(n: usize, m: usize, order: usize, block: usize, v: &SparseVec) -> Cochain {
        let mut c = Cochain::zero(n, m, order, block);
        for &(i, x) in v.entries() {
            c.values[i] = x;
        }
        c
    }

    pub fn to_sparse(&self) -> SparseVec {
        SparseVec::from_dense(&self.values)
    }

    pub fn num_tuples(&self) -> usize {
        self.order.pow(self.n as u32)
    }

    pub fn tuple_index(&self, tuple: &[usize]) -> usize {
        tuple.iter().fold(0, |acc, &g| acc * self.order + g)
    }

    /// The value at a tuple, as a coefficient vector in `R_m`.
    pub fn value(&self, tuple: &[usize]) -> &[Scalar] {
        let t = self.tuple_index(tuple);
        &self.values[t * self.block..(t + 1) * self.block]
    }
}

/// Apply `mat` (mapping blocks of size `src` to blocks of size `dst`) to every block of `v`.
pub fn blockwise_apply(field: &FieldSpec, mat: &SparseMatrix, v: &SparseVec, src: usize, dst: usize) -> SparseVec {
    let mut pairs = Vec::new();
    for &(idx, c) in v.entries() {
        let (blk, local) = (idx / src, idx % src);
        for &(r, x) in mat.column(local).entries() {
            pairs.push((blk * dst + r, field.mul(c, x)));
        }
    }
    SparseVec::from_pairs(field, pairs)
}

/// `H^i(G, R_m)` as a subquotient of the cochain space.
#[derive(Debug)]
pub struct CohomologySlice {
    pub model: Model,
    pub i: usize,
    pub m: usize,
    /// Number of blocks in a cochain (`|G|^i` for the bar model, 1 for the periodic one).
    pub blocks: usize,
    /// `dim R_m`.
    pub block: usize,
    pub cocycle_dim: usize,
    pub coboundary_rank: usize,
    sub: Subquotient,
}

impl CohomologySlice {
    pub fn dim(&self) -> usize {
        self.sub.dim()
    }
    pub fn ambient(&self) -> usize {
        self.blocks * self.block
    }
    /// Cocycle representatives of a basis, as flat vectors.
    pub fn reps(&self) -> &[SparseVec] {
        self.sub.reps()
    }
    pub fn coboundary_basis(&self) -> &[SparseVec] {
        self.sub.lower_basis()
    }
    /// Class coordinates of a cocycle.
    pub fn project(&self, v: &SparseVec) -> Result<Vec<Scalar>> {
        self.sub.project(v)
    }
    pub fn is_coboundary(&self, v: &SparseVec) -> Result<bool> {
        self.sub.is_trivial_class(v)
    }
    pub fn lift(&self, coords: &[Scalar]) -> SparseVec {
        self.sub.lift(coords)
    }
    /// Representatives as cochains (bar model only).
    pub fn cocycle_reps(&self, order: usize) -> Vec<Cochain> {
        self.reps().iter().map(|v| Cochain::from_sparse(self.i, self.m, order, self.block, v)).collect()
    }
}

/// Cohomology computations for one group, with caches for differentials and slices.
pub struct Cohomology {
    group: Arc<MatrixGroup>,
    budget: u128,
    generator: Option<usize>,
    diffs: Mutex<HashMap<(Model, usize, usize), Arc<SparseMatrix>>>,
    slices: Mutex<HashMap<(Model, usize, usize), Arc<CohomologySlice>>>,
}

impl Cohomology {
    pub fn new(group: Arc<MatrixGroup>) -> Cohomology {
        Cohomology { group, budget: COCHAIN_BUDGET, generator: None, diffs: Mutex::default(), slices: Mutex::default() }
    }

    pub fn with_budget(mut self, budget: u128) -> Cohomology {
        self.budget = budget;
        self
    }

    /// Fix the generator used by the periodic model.
    pub fn with_cyclic_generator(mut self, g: usize) -> Result<Cohomology> {
        let order = self.group.order();
        if g >= order {
            return Err(Error::BadElement(g));
        }
        let go = self.group.element_order(g);
        if go != order {
            return Err(Error::NotCyclic { gen_order: go, order });
        }
        self.generator = Some(g);
        Ok(self)
    }

    pub fn group(&self) -> &Arc<MatrixGroup> {
        &self.group
    }
    pub fn field(&self) -> &FieldSpec {
        self.group.field()
    }

    /// The generator of the periodic model: the chosen one, else the first
    /// group generator if it has full order, else the first element that does.
    pub fn cyclic_generator(&self) -> Result<usize> {
        if let Some(g) = self.generator {
            return Ok(g);
        }
        let order = self.group.order();
        if order == 1 {
            return Ok(0);
        }
        let candidates = self.group.generators().iter().copied().chain(1..order);
        for g in candidates {
            if self.group.element_order(g) == order {
                return Ok(g);
            }
        }
        let gen_order = self.group.generators().first().map_or(1, |&g| self.group.element_order(g));
        Err(Error::NotCyclic { gen_order, order })
    }

    fn check_budget(&self, level: usize, m: usize) -> Result<()> {
        let dim = self.group.ring().basis(m).len() as u128;
        let needed = (self.group.order() as u128).saturating_pow(level as u32 + 1).saturating_mul(dim);
        if needed > self.budget {
            return Err(Error::Budget { needed, limit: self.budget, level, degree: m });
        }
        Ok(())
    }

    /// Matrix of `d^n: C^n(G, R_m) -> C^{n+1}(G, R_m)` in the given model.
    pub fn differential(&self, model: Model, n: usize, m: usize) -> Result<Arc<SparseMatrix>> {
        if let Some(d) = self.diffs.lock().unwrap().get(&(model, n, m)) {
            return Ok(d.clone());
        }
        let d = Arc::new(match model {
            Model::Bar => {
                self.check_budget(n, m)?;
                self.bar_differential(n, m)?
            }
            Model::Periodic => self.periodic_differential(n, m)?,
        });
        self.diffs.lock().unwrap().insert((model, n, m), d.clone());
        Ok(d)
    }

    fn bar_differential(&self, n: usize, m: usize) -> Result<SparseMatrix> {
        let g = &*self.group;
        let field = g.field();
        let order = g.order();
        let block = g.ring().basis(m).len();
        let actions: Vec<Arc<SparseMatrix>> = (0..order).map(|e| g.action_matrix(e, m)).collect::<Result<_>>()?;
        let ntuples = order.pow(n as u32);
        let minus = field.neg(Scalar::ONE);
        let sign = |k: usize| if k.is_multiple_of(2) { Scalar::ONE } else { minus };
        let mut columns = Vec::with_capacity(ntuples * block);
        let mut tuple = vec![0usize; n];
        let mut out_tuple = vec![0usize; n + 1];
        let index = |t: &[usize]| t.iter().fold(0usize, |acc, &x| acc * order + x);
        for t in 0..ntuples {
            let mut rest = t;
            for k in (0..n).rev() {
                tuple[k] = rest % order;
                rest /= order;
            }
            for mu in 0..block {
                let mut pairs: Vec<(usize, Scalar)> = Vec::with_capacity((n + 2) * order);
                for (h, act) in actions.iter().enumerate() {
                    // g_1 psi(g_2..g_{n+1}) with g_1 = h
                    out_tuple[0] = h;
                    out_tuple[1..].copy_from_slice(&tuple);
                    let base = index(&out_tuple) * block;
                    for &(r, c) in act.column(mu).entries() {
                        pairs.push((base + r, c));
                    }
                    // (-1)^i psi(.., g_i g_{i+1}, ..): g_i = h, g_{i+1} = h^{-1} t_i
                    for i in 1..=n {
                        out_tuple[..i - 1].copy_from_slice(&tuple[..i - 1]);
                        out_tuple[i - 1] = h;
                        out_tuple[i] = g.mul(g.inverse(h), tuple[i - 1]);
                        out_tuple[i + 1..].copy_from_slice(&tuple[i..]);
                        pairs.push((index(&out_tuple) * block + mu, sign(i)));
                    }
                    // (-1)^{n+1} psi(g_1..g_n) with g_{n+1} = h
                    out_tuple[..n].copy_from_slice(&tuple);
                    out_tuple[n] = h;
                    pairs.push((index(&out_tuple) * block + mu, sign(n + 1)));
                }
                columns.push(SparseVec::from_pairs(field, pairs));
            }
        }
        Ok(SparseMatrix::new(ntuples * order * block, columns))
    }

    fn periodic_differential(&self, n: usize, m: usize) -> Result<SparseMatrix> {
        let gen = self.cyclic_generator()?;
        let g = &*self.group;
        let field = g.field();
        let block = g.ring().basis(m).len();
        let mut cols = Vec::with_capacity(block);
        if n.is_multiple_of(2) {
            let a = g.action_matrix(gen, m)?;
            for mu in 0..block {
                cols.push(a.column(mu).sub(field, &SparseVec::unit(mu)));
            }
        } else {
            let mut powers = vec![0usize];
            while powers.len() < g.order() {
                powers.push(g.mul(*powers.last().unwrap(), gen));
            }
            let mats: Vec<Arc<SparseMatrix>> = powers.iter().map(|&e| g.action_matrix(e, m)).collect::<Result<_>>()?;
            for mu in 0..block {
                let mut c = SparseVec::new();
                for a in &mats {
                    c.axpy(field, Scalar::ONE, a.column(mu));
                }
                cols.push(c);
            }
        }
        Ok(SparseMatrix::new(block, cols))
    }

    /// Number of blocks of a level-`n` cochain in a model.
    pub fn blocks(&self, model: Model, n: usize) -> usize {
        match model {
            Model::Bar => self.group.order().pow(n as u32),
            Model::Periodic => 1,
        }
    }

    /// `ker d^i / im d^{i-1}`; also asserts `d^i d^{i-1} = 0`.
    pub fn slice(&self, model: Model, i: usize, m: usize) -> Result<Arc<CohomologySlice>> {
        if let Some(s) = self.slices.lock().unwrap().get(&(model, i, m)) {
            return Ok(s.clone());
        }
        let field = self.field().clone();
        let block = self.group.ring().basis(m).len();
        let blocks = self.blocks(model, i);
        let di = self.differential(model, i, m)?;
        let (_, cocycles) = kernel_of_columns(&field, di.rows(), di.columns().iter().cloned());
        let coboundaries: Vec<SparseVec> = if i == 0 {
            Vec::new()
        } else {
            let prev = self.differential(model, i - 1, m)?;
            let composite = di.mul(&field, &prev)?;
            if !composite.is_zero() {
                return Err(Error::Audit(format!("d^{i} d^{} != 0 in degree {m}", i - 1)));
            }
            prev.columns().to_vec()
        };
        let cocycle_dim = cocycles.len();
        let sub = Subquotient::new(&field, blocks * block, coboundaries, cocycles);
        let coboundary_rank = sub.lower_basis().len();
        let s = Arc::new(CohomologySlice { model, i, m, blocks, block, cocycle_dim, coboundary_rank, sub });
        self.slices.lock().unwrap().insert((model, i, m), s.clone());
        Ok(s)
    }

    /// Bar-model slice.
    pub fn cohomology_slice(&self, i: usize, m: usize) -> Result<Arc<CohomologySlice>> {
        self.slice(Model::Bar, i, m)
    }

    /// Periodic-model slice (cyclic groups only).
    pub fn periodic_slice(&self, i: usize, m: usize) -> Result<Arc<CohomologySlice>> {
        self.slice(Model::Periodic, i, m)
    }

    /// Multiply every block of a cochain vector by `s`.
    pub fn multiply_cochain(&self, s: &Polynomial, m: usize, v: &SparseVec) -> Result<SparseVec> {
        let ring = self.group.ring();
        let k = homogeneous_degree_or_zero(s)?;
        let mat = ring.mult_matrix(s, m)?;
        Ok(blockwise_apply(self.field(), &mat, v, ring.basis(m).len(), ring.basis(m + k).len()))
    }

    /// Matrix of multiplication by the invariant `s` from `from` to `to`
    /// (columns are images of the basis classes of `from`). Checks that
    /// coboundaries go to coboundaries.
    pub fn s_action(&self, s: &Polynomial, from: &CohomologySlice, to: &CohomologySlice) -> Result<SparseMatrix> {
        check_invariant(&self.group, s)?;
        let k = homogeneous_degree_or_zero(s)?;
        if from.model != to.model || from.i != to.i || (!s.is_zero() && to.m != from.m + k) {
            return Err(Error::SliceMismatch(format!(
                "degree-{k} action from (i = {}, m = {}) to (i = {}, m = {})",
                from.i, from.m, to.i, to.m
            )));
        }
        if s.is_zero() {
            return Ok(SparseMatrix::zeros(to.dim(), from.dim()));
        }
        for b in from.coboundary_basis() {
            if !to.is_coboundary(&self.multiply_cochain(s, from.m, b)?)? {
                return Err(Error::Audit("multiplication does not preserve coboundaries".into()));
            }
        }
        let cols = from
            .reps()
            .iter()
            .map(|r| Ok(SparseVec::from_dense(&to.project(&self.multiply_cochain(s, from.m, r)?)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(SparseMatrix::new(to.dim(), cols))
    }

    /// `Q^mpow` on level-`n` cochains of degree `m`, block diagonal.
    pub fn q_matrix(&self, n: usize, m: usize, mpow: usize) -> SparseMatrix {
        let ring = self.group.ring();
        let p = steenrod_matrix(ring, mpow, m);
        let (src, dst) = (p.cols(), p.rows());
        let blocks = self.group.order().pow(n as u32);
        let field = self.field();
        let cols = (0..blocks * src).map(|c| blockwise_apply(field, &p, &SparseVec::unit(c), src, dst)).collect();
        SparseMatrix::new(blocks * dst, cols)
    }

    /// `Q^mpow(psi)`: apply `P^mpow` to every value.
    pub fn q_operator(&self, mpow: usize, psi: &Cochain) -> Cochain {
        let ring = self.group.ring();
        let p = steenrod_matrix(ring, mpow, psi.m);
        let shift = mpow * (self.field().q() as usize - 1);
        let out = blockwise_apply(self.field(), &p, &psi.to_sparse(), p.cols(), p.rows());
        Cochain::from_sparse(psi.n, psi.m + shift, psi.order, p.rows(), &out)
    }

    /// Induced map of `Q^mpow` from `from` to `to` on bar cohomology.
    pub fn q_on_slices(&self, mpow: usize, from: &CohomologySlice, to: &CohomologySlice) -> Result<SparseMatrix> {
        let shift = mpow * (self.field().q() as usize - 1);
        if from.model != Model::Bar || to.model != Model::Bar || from.i != to.i || to.m != from.m + shift {
            return Err(Error::SliceMismatch("Q^m needs bar slices at matching degrees".into()));
        }
        let q = self.q_matrix(from.i, from.m, mpow);
        let field = self.field();
        for b in from.coboundary_basis() {
            if !to.is_coboundary(&q.apply(field, b))? {
                return Err(Error::Audit("Q^m does not preserve coboundaries".into()));
            }
        }
        let cols = from
            .reps()
            .iter()
            .map(|r| Ok(SparseVec::from_dense(&to.project(&q.apply(field, r))?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(SparseMatrix::new(to.dim(), cols))
    }
}

fn homogeneous_degree_or_zero(s: &Polynomial) -> Result<usize> {
    match s.homogeneity() {
        Homogeneity::Zero => Ok(0),
        Homogeneity::Homogeneous(k) => Ok(k),
        Homogeneity::Inhomogeneous => Err(Error::Inhomogeneous),
    }
}

/// Bar-model differential for a group (builds an uncached context).
pub fn differential(group: Arc<MatrixGroup>, n: usize, m: usize) -> Result<Arc<SparseMatrix>> {
    Cohomology::new(group).differential(Model::Bar, n, m)
}

/// Dimension of `H^i` in the periodic model with generator `g`.
pub fn periodic_oracle(group: Arc<MatrixGroup>, g: usize, i: usize, m: usize) -> Result<Arc<CohomologySlice>> {
    Cohomology::new(group).with_cyclic_generator(g)?.periodic_slice(i, m)
}
