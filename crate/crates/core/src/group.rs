//! Finite matrix groups `G <= GL_d(F_q)` and their action on `R`.
//!
//! Convention: `(g.f)(v) = f(g^{-1} v)`, so `g . x_j = sum_k (g^{-1})_{jk} x_k`.

use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, Mutex};

use rand::Rng;

use crate::error::{Error, Result};
use crate::exactalg::{reduce, FieldSpec, Matrix, Scalar, SparseMatrix, SparseVec};
use crate::polyring::{Monomial, PolyRing, Polynomial};

pub const DEFAULT_GROUP_CAP: usize = 64;

/// The field, the dimension `d` of `V`, and the ring `R = F_q[x_0..x_{d-1}]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupContext {
    ring: PolyRing,
}

impl GroupContext {
    pub fn new(field: FieldSpec, d: usize) -> Result<GroupContext> {
        if d == 0 {
            return Err(Error::Input("dimension d must be at least 1".into()));
        }
        Ok(GroupContext { ring: PolyRing::new(field, d) })
    }

    pub fn field(&self) -> &FieldSpec {
        self.ring.field()
    }
    pub fn d(&self) -> usize {
        self.ring.nvars()
    }
    pub fn ring(&self) -> &PolyRing {
        &self.ring
    }
    pub fn var_names(&self) -> Vec<String> {
        (0..self.d()).map(|j| format!("x{j}")).collect()
    }

    /// Images of the variables under the matrix `m` acting as `x_j -> sum_k m_{jk} x_k`.
    fn substitution(&self, m: &Matrix) -> Vec<Polynomial> {
        let f = self.field();
        (0..self.d())
            .map(|j| {
                Polynomial::from_terms(f, self.d(), (0..self.d()).map(|k| (Monomial::var(self.d(), k), m.get(j, k))))
            })
            .collect()
    }

    /// Action of an arbitrary invertible matrix on a polynomial.
    pub fn act_by_matrix(&self, g: &Matrix, f: &Polynomial) -> Result<Polynomial> {
        self.check_poly(f)?;
        let inv = g.inverse(self.field()).ok_or(Error::SingularGenerator(0))?;
        f.substitute(&self.substitution(&inv))
    }

    fn check_poly(&self, f: &Polynomial) -> Result<()> {
        if f.field() != self.field() || f.nvars() != self.d() {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }
}

/// A uniformly random element of `GL_d(F_q)`, by rejection.
pub fn random_gl_element<R: Rng>(field: &FieldSpec, d: usize, rng: &mut R) -> Matrix {
    loop {
        let mut m = Matrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m.set(i, j, Scalar(rng.gen_range(0..field.q())));
            }
        }
        if reduce(field, &m).rank == d {
            return m;
        }
    }
}

/// A finite group of invertible matrices, closed from generators.
pub struct MatrixGroup {
    ctx: GroupContext,
    elements: Vec<Matrix>,
    generators: Vec<usize>,
    mult: Vec<u32>,
    inverse: Vec<usize>,
    /// For each element `g`, the matrix of `g^{-1}` (the substitution for `x_j`).
    subst: Vec<Matrix>,
    actions: Mutex<HashMap<(usize, usize), Arc<SparseMatrix>>>,
}

impl std::fmt::Debug for MatrixGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "MatrixGroup(order {}, d = {})", self.order(), self.ctx.d())
    }
}

impl MatrixGroup {
    /// Closure of `gens` with the default cap.
    pub fn close_generators(ctx: &GroupContext, gens: &[Matrix]) -> Result<MatrixGroup> {
        MatrixGroup::close_generators_capped(ctx, gens, DEFAULT_GROUP_CAP)
    }

    /// Breadth-first closure from the identity; new elements are `h * g` for
    /// `h` in queue order and generators `g` in the given order.
    pub fn close_generators_capped(ctx: &GroupContext, gens: &[Matrix], cap: usize) -> Result<MatrixGroup> {
        let field = ctx.field();
        let d = ctx.d();
        for (i, g) in gens.iter().enumerate() {
            if g.rows() != d || g.cols() != d {
                return Err(Error::GeneratorShape { index: i, d });
            }
            if !entries_in_field(g, field) {
                return Err(Error::Input(format!("generator {i} has entries outside F_{}", field.q())));
            }
            if reduce(field, g).rank != d {
                return Err(Error::SingularGenerator(i));
            }
        }
        let id = Matrix::identity(d);
        let mut elements = vec![id.clone()];
        let mut index: HashMap<Matrix, usize> = HashMap::from([(id, 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(h) = queue.pop_front() {
            for g in gens {
                let prod = elements[h].mul(field, g)?;
                if !index.contains_key(&prod) {
                    if elements.len() == cap {
                        return Err(Error::GroupTooLarge(cap));
                    }
                    index.insert(prod.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(prod);
                }
            }
        }
        let n = elements.len();
        let mut mult = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                let prod = elements[a].mul(field, &elements[b])?;
                mult[a * n + b] = *index.get(&prod).ok_or(Error::NotClosed)? as u32;
            }
        }
        let inverse: Vec<usize> = (0..n).map(|a| (0..n).find(|&b| mult[a * n + b] == 0).unwrap()).collect();
        let generators = gens.iter().map(|g| index[g]).collect();
        let subst = inverse.iter().map(|&b| elements[b].clone()).collect();
        Ok(MatrixGroup { ctx: ctx.clone(), elements, generators, mult, inverse, subst, actions: Mutex::new(HashMap::new()) })
    }

    /// The trivial group in the given context.
    pub fn trivial(ctx: &GroupContext) -> MatrixGroup {
        MatrixGroup::close_generators(ctx, &[]).expect("trivial group")
    }

    pub fn context(&self) -> &GroupContext {
        &self.ctx
    }
    pub fn field(&self) -> &FieldSpec {
        self.ctx.field()
    }
    pub fn ring(&self) -> &PolyRing {
        self.ctx.ring()
    }
    pub fn d(&self) -> usize {
        self.ctx.d()
    }
    pub fn order(&self) -> usize {
        self.elements.len()
    }
    pub fn elements(&self) -> &[Matrix] {
        &self.elements
    }
    pub fn element(&self, i: usize) -> &Matrix {
        &self.elements[i]
    }
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a * self.order() + b] as usize
    }
    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn index_of(&self, m: &Matrix) -> Option<usize> {
        self.elements.iter().position(|e| e == m)
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut k = 1;
        let mut cur = a;
        while cur != 0 {
            cur = self.mul(cur, a);
            k += 1;
        }
        k
    }

    fn check_element(&self, a: usize) -> Result<()> {
        if a < self.order() {
            Ok(())
        } else {
            Err(Error::BadElement(a))
        }
    }

    pub fn act_on_poly(&self, g: usize, f: &Polynomial) -> Result<Polynomial> {
        self.check_element(g)?;
        self.ctx.check_poly(f)?;
        if g == 0 {
            return Ok(f.clone());
        }
        f.substitute(&self.ctx.substitution(&self.subst[g]))
    }

    /// Matrix of `g` acting on `R_n` in the graded basis (columns are images of monomials).
    pub fn action_matrix(&self, g: usize, n: usize) -> Result<Arc<SparseMatrix>> {
        self.check_element(g)?;
        if let Some(m) = self.actions.lock().unwrap().get(&(g, n)) {
            return Ok(m.clone());
        }
        let m = Arc::new(self.build_action_matrix(g, n)?);
        self.actions.lock().unwrap().insert((g, n), m.clone());
        Ok(m)
    }

    fn build_action_matrix(&self, g: usize, n: usize) -> Result<SparseMatrix> {
        let ring = self.ring();
        let field = self.field();
        let d = self.d();
        let basis = ring.basis(n);
        if g == 0 {
            return Ok(SparseMatrix::identity(basis.len()));
        }
        let s = &self.subst[g];
        // Monomial matrix: each variable maps to a scalar multiple of one variable.
        let monomial_rows: Option<Vec<(usize, Scalar)>> = (0..d)
            .map(|j| {
                let nz: Vec<usize> = (0..d).filter(|&k| !s.get(j, k).is_zero()).collect();
                (nz.len() == 1).then(|| (nz[0], s.get(j, nz[0])))
            })
            .collect();
        if let Some(rows) = monomial_rows {
            let columns = basis
                .monomials()
                .iter()
                .map(|mu| {
                    let mut exps = vec![0u32; d];
                    let mut c = Scalar::ONE;
                    for (j, e) in mu.exps().enumerate() {
                        let (k, a) = rows[j];
                        exps[k] += e;
                        c = field.mul(c, field.pow(a, e as u64));
                    }
                    SparseVec::from_sorted(vec![(basis.index_of(&Monomial::from_exps(&exps)).unwrap(), c)])
                })
                .collect();
            return Ok(SparseMatrix::new(basis.len(), columns));
        }
        if n == 0 {
            return Ok(SparseMatrix::identity(1));
        }
        let prev = self.action_matrix(g, n - 1)?;
        let prev_basis = ring.basis(n - 1);
        let lin = self.ctx.substitution(s);
        let columns = basis
            .monomials()
            .iter()
            .map(|mu| {
                let j = (0..d).rev().find(|&j| mu.exp(j) > 0).unwrap();
                let mut rest = mu.clone();
                rest.0[j] -= 1;
                let image_rest = Polynomial::from_sparse(field, &prev_basis, prev.column(prev_basis.index_of(&rest).unwrap()));
                (&image_rest * &lin[j]).coeff_sparse(&basis)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SparseMatrix::new(basis.len(), columns))
    }

    /// Whether `subset` is closed under multiplication (hence a subgroup).
    pub fn is_closed(&self, subset: &[usize]) -> bool {
        let mut member = vec![false; self.order()];
        for &a in subset {
            if a >= self.order() {
                return false;
            }
            member[a] = true;
        }
        !subset.is_empty() && subset.iter().all(|&a| subset.iter().all(|&b| member[self.mul(a, b)]))
    }

    /// Sorted elements of the subgroup generated by `gens`.
    pub fn generated_subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let mut member = vec![false; self.order()];
        member[0] = true;
        let mut out = vec![0];
        let mut i = 0;
        while i < out.len() {
            let h = out[i];
            for &g in gens {
                let x = self.mul(h, g);
                if !member[x] {
                    member[x] = true;
                    out.push(x);
                }
            }
            i += 1;
        }
        out.sort_unstable();
        out
    }

    /// `V^H` for a subgroup given by its element indices: dimension and basis columns.
    pub fn fixed_subspace(&self, subgroup: &[usize]) -> Result<(usize, Matrix)> {
        if !self.is_closed(subgroup) {
            return Err(Error::NotClosed);
        }
        let field = self.field();
        let d = self.d();
        let mut stacked = Matrix::zeros(0, d);
        for &h in subgroup {
            let mut diff = self.elements[h].clone();
            for i in 0..d {
                diff.set(i, i, field.sub(diff.get(i, i), Scalar::ONE));
            }
            stacked = stacked.vstack(&diff)?;
        }
        let red = reduce(field, &stacked);
        Ok((red.kernel.cols(), red.kernel))
    }

    pub fn all_elements(&self) -> Vec<usize> {
        (0..self.order()).collect()
    }

    /// A Sylow `p`-subgroup: start from `{1}` and repeatedly adjoin the first
    /// `p`-element (by index) that keeps the generated subgroup a `p`-group.
    /// This never gets stuck, since a non-Sylow `p`-subgroup has a `p`-element
    /// in its normaliser outside it.
    pub fn sylow_p(&self) -> Vec<usize> {
        let p = self.field().p() as usize;
        let mut target = 1;
        let mut n = self.order();
        while n.is_multiple_of(p) {
            target *= p;
            n /= p;
        }
        let is_p_power = |mut k: usize| {
            while k.is_multiple_of(p) {
                k /= p;
            }
            k == 1
        };
        let mut gens: Vec<usize> = Vec::new();
        let mut current = vec![0];
        while current.len() < target {
            let mut extended = false;
            for a in 1..self.order() {
                if current.binary_search(&a).is_ok() || !is_p_power(self.element_order(a)) {
                    continue;
                }
                let mut trial = gens.clone();
                trial.push(a);
                let h = self.generated_subgroup(&trial);
                if is_p_power(h.len()) {
                    gens = trial;
                    current = h;
                    extended = true;
                    break;
                }
            }
            assert!(extended, "Sylow extension failed");
        }
        current
    }
}

fn entries_in_field(m: &Matrix, field: &FieldSpec) -> bool {
    (0..m.rows()).all(|i| m.row(i).iter().all(|&v| field.check(v).is_ok()))
}

/// Cyclic permutation `e_i -> e_{i+1 mod d}` as a matrix.
pub fn cyclic_permutation(d: usize) -> Matrix {
    let mut m = Matrix::zeros(d, d);
    for i in 0..d {
        m.set((i + 1) % d, i, Scalar::ONE);
    }
    m
}

/// Matrix from small integer entries reduced into the prime subfield.
pub fn int_matrix(field: &FieldSpec, rows: &[&[i64]]) -> Matrix {
    let rows: Vec<Vec<Scalar>> = rows.iter().map(|r| r.iter().map(|&v| field.from_int(v)).collect()).collect();
    Matrix::from_rows(&rows).expect("rectangular")
}
