//! The invariant ring `S = R^G`, computed one degree at a time, and the
//! Dickson classes.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exactalg::{canonical_basis, kernel_of_columns, FieldSpec, Matrix, Scalar, SparseMatrix, SparseVec};
use crate::group::{random_gl_element, GroupContext, MatrixGroup};
use crate::polyring::{is_zero_dimensional, Homogeneity, Monomial, PolyRing, Polynomial};

/// Default cap on `q^d` for Dickson computations.
pub const DICKSON_BUDGET: u64 = 1 << 12;

/// A basis of `S_n`: the reduced row echelon basis of the invariant
/// subspace of `R_n`, so coordinates are read off at pivot positions.
#[derive(Clone, Debug)]
pub struct InvariantBasis {
    degree: usize,
    ambient: usize,
    vectors: Vec<SparseVec>,
    pivots: Vec<usize>,
    basis: Vec<Polynomial>,
}

impl InvariantBasis {
    fn new(ring: &PolyRing, degree: usize, vectors: Vec<SparseVec>) -> InvariantBasis {
        let pivots = vectors.iter().map(|v| v.leading().unwrap().0).collect();
        let basis = vectors.iter().map(|v| ring.from_sparse(degree, v)).collect();
        InvariantBasis { degree, ambient: ring.basis(degree).len(), vectors, pivots, basis }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }
    /// `dim R_n`.
    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }
    pub fn basis(&self) -> &[Polynomial] {
        &self.basis
    }
    pub fn vectors(&self) -> &[SparseVec] {
        &self.vectors
    }
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Coefficient vectors as the columns of a dense `dim R_n x dim S_n` matrix.
    pub fn coeff_matrix(&self) -> Matrix {
        let cols: Vec<Vec<Scalar>> = self.vectors.iter().map(|v| v.to_dense(self.ambient)).collect();
        Matrix::from_columns(self.ambient, &cols).expect("consistent lengths")
    }

    /// Coordinates of `v` (a vector in `R_n`) in this basis.
    pub fn coords(&self, field: &FieldSpec, v: &SparseVec) -> Result<Vec<Scalar>> {
        let c: Vec<Scalar> = self.pivots.iter().map(|&p| v.get(p)).collect();
        let mut back = SparseVec::new();
        for (b, &ci) in self.vectors.iter().zip(&c) {
            back.axpy(field, ci, b);
        }
        if back != *v {
            return Err(Error::NotInSubspace);
        }
        Ok(c)
    }

    /// Sparse coordinates, without the membership check.
    pub fn coords_unchecked(&self, v: &SparseVec) -> SparseVec {
        SparseVec::from_sorted(
            self.pivots.iter().enumerate().map(|(k, &p)| (k, v.get(p))).filter(|(_, c)| !c.is_zero()).collect(),
        )
    }

    /// Vector in `R_n` with the given coordinates.
    pub fn lift(&self, field: &FieldSpec, coords: &SparseVec) -> SparseVec {
        let mut v = SparseVec::new();
        for &(k, c) in coords.entries() {
            v.axpy(field, c, &self.vectors[k]);
        }
        v
    }
}

/// Basis of `(R_n)^G`: the common kernel of `rho_n(g) - I` over the generators.
pub fn invariant_space(group: &MatrixGroup, n: usize) -> Result<InvariantBasis> {
    let ring = group.ring();
    let field = group.field();
    let dim = ring.basis(n).len();
    let mats: Vec<Arc<SparseMatrix>> = group.generators().iter().map(|&g| group.action_matrix(g, n)).collect::<Result<_>>()?;
    let monomial_action = mats.iter().all(|m| m.columns().iter().all(|c| c.nnz() == 1));
    let vectors = if monomial_action {
        orbitwise_invariants(field, dim, &mats)
    } else {
        let columns = (0..dim).map(|j| {
            let mut col = SparseVec::new();
            for (k, m) in mats.iter().enumerate() {
                let mut c = m.column(j).clone();
                c.axpy(field, field.neg(Scalar::ONE), &SparseVec::unit(j));
                col = col.add(field, &c.shifted(k * dim));
            }
            col
        });
        let (_, kernel) = kernel_of_columns(field, dim * mats.len().max(1), columns);
        if mats.is_empty() {
            (0..dim).map(SparseVec::unit).collect()
        } else {
            canonical_basis(field, dim, kernel)
        }
    };
    Ok(InvariantBasis::new(ring, n, vectors))
}

/// Generators acting by scaled permutations of monomials: the invariant
/// space splits along monomial orbits, so each orbit is solved separately.
fn orbitwise_invariants(field: &FieldSpec, dim: usize, mats: &[Arc<SparseMatrix>]) -> Vec<SparseVec> {
    let mut orbit_of = vec![usize::MAX; dim];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for start in 0..dim {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let mut members = vec![start];
        orbit_of[start] = id;
        let mut i = 0;
        while i < members.len() {
            let j = members[i];
            for m in mats {
                let (t, _) = m.column(j).entries()[0];
                if orbit_of[t] == usize::MAX {
                    orbit_of[t] = id;
                    members.push(t);
                }
            }
            i += 1;
        }
        members.sort_unstable();
        orbits.push(members);
    }
    let mut out = Vec::new();
    for members in &orbits {
        let local: BTreeMap<usize, usize> = members.iter().enumerate().map(|(k, &j)| (j, k)).collect();
        let len = members.len();
        let columns = members.iter().map(|&j| {
            let mut col = SparseVec::new();
            for (k, m) in mats.iter().enumerate() {
                let (t, c) = m.column(j).entries()[0];
                let v = SparseVec::from_pairs(field, vec![(k * len + local[&t], c), (k * len + local[&j], field.neg(Scalar::ONE))]);
                col = col.add(field, &v);
            }
            col
        });
        let (_, kernel) = kernel_of_columns(field, len * mats.len().max(1), columns);
        let kernel = if mats.is_empty() { (0..len).map(SparseVec::unit).collect() } else { kernel };
        for k in kernel {
            out.push(SparseVec::from_pairs(field, k.entries().iter().map(|&(i, c)| (members[i], c)).collect()));
        }
    }
    canonical_basis(field, dim, out)
}

/// Whether `f` is fixed by every generator; errors name the first failing one.
pub fn check_invariant(group: &MatrixGroup, f: &Polynomial) -> Result<()> {
    for (k, &g) in group.generators().iter().enumerate() {
        if group.act_on_poly(g, f)? != *f {
            return Err(Error::NotInvariant(k));
        }
    }
    Ok(())
}

/// Degreewise cache of invariant bases for one group.
pub struct InvariantRing {
    group: Arc<MatrixGroup>,
    slices: Mutex<BTreeMap<usize, Arc<InvariantBasis>>>,
}

impl InvariantRing {
    pub fn new(group: Arc<MatrixGroup>) -> InvariantRing {
        InvariantRing { group, slices: Mutex::new(BTreeMap::new()) }
    }

    pub fn group(&self) -> &Arc<MatrixGroup> {
        &self.group
    }
    pub fn ring(&self) -> &PolyRing {
        self.group.ring()
    }
    pub fn field(&self) -> &FieldSpec {
        self.group.field()
    }

    pub fn slice(&self, n: usize) -> Result<Arc<InvariantBasis>> {
        if let Some(s) = self.slices.lock().unwrap().get(&n) {
            return Ok(s.clone());
        }
        let s = Arc::new(invariant_space(&self.group, n)?);
        self.slices.lock().unwrap().insert(n, s.clone());
        Ok(s)
    }

    pub fn dim(&self, n: usize) -> Result<usize> {
        Ok(self.slice(n)?.dim())
    }

    /// Coordinates of a homogeneous invariant in the basis of its degree.
    pub fn coords(&self, f: &Polynomial) -> Result<(usize, Vec<Scalar>)> {
        let n = f.homogeneous_degree()?.unwrap_or(0);
        let v = f.coeff_sparse(&self.ring().basis(n))?;
        Ok((n, self.slice(n)?.coords(self.field(), &v)?))
    }

    /// Multiplication by a homogeneous invariant `s` as a map `S_n -> S_{n + deg s}`
    /// in invariant coordinates (columns indexed by the basis of `S_n`).
    pub fn mult_matrix(&self, s: &Polynomial, n: usize) -> Result<SparseMatrix> {
        let k = match s.homogeneity() {
            Homogeneity::Inhomogeneous => return Err(Error::Inhomogeneous),
            Homogeneity::Zero => 0,
            Homogeneity::Homogeneous(k) => k,
        };
        let src = self.slice(n)?;
        let dst = self.slice(n + k)?;
        let m = self.ring().mult_matrix(s, n)?;
        let field = self.field();
        let cols = src
            .vectors()
            .iter()
            .map(|v| {
                let img = m.apply(field, v);
                dst.coords(field, &img).map(|c| SparseVec::from_dense(&c))
            })
            .collect::<Result<Vec<_>>>()
            .map_err(|e| if e == Error::NotInSubspace { Error::NotInvariant(0) } else { e })?;
        Ok(SparseMatrix::new(dst.dim(), cols))
    }
}

/// The product of all nonzero linear forms, of degree `q^d - 1`.
#[derive(Clone, Debug)]
pub struct DicksonClass {
    pub poly: Polynomial,
    pub degree: usize,
}

fn dickson_budget(ctx: &GroupContext, budget: u64) -> Result<u64> {
    let qd = (ctx.field().q() as u64).checked_pow(ctx.d() as u32).unwrap_or(u64::MAX);
    if qd > budget {
        return Err(Error::DicksonBudget(qd, budget));
    }
    Ok(qd)
}

/// Nonzero coordinate vectors of `F_q^d` in graded-lex order of their linear forms.
fn nonzero_linear_forms(ctx: &GroupContext) -> Vec<Polynomial> {
    let field = ctx.field();
    let d = ctx.d();
    let q = field.q();
    let total = (q as u64).pow(d as u32);
    let mut forms: Vec<Polynomial> = (1..total)
        .map(|mut code| {
            let pairs: Vec<(Monomial, Scalar)> = (0..d)
                .map(|k| {
                    let c = Scalar((code % q as u64) as u32);
                    code /= q as u64;
                    (Monomial::var(d, k), c)
                })
                .collect();
            Polynomial::from_terms(field, d, pairs)
        })
        .collect();
    forms.sort_by(|a, b| {
        let ka: Vec<(Monomial, Scalar)> = a.terms().map(|(m, c)| (m.clone(), c)).collect();
        let kb: Vec<(Monomial, Scalar)> = b.terms().map(|(m, c)| (m.clone(), c)).collect();
        kb.iter().map(|(m, c)| (m, c.raw())).cmp(ka.iter().map(|(m, c)| (m, c.raw())))
    });
    forms
}

/// `d_{d,0}` with the default budget.
pub fn dickson_top(ctx: &GroupContext) -> Result<DicksonClass> {
    dickson_top_with_budget(ctx, DICKSON_BUDGET)
}

pub fn dickson_top_with_budget(ctx: &GroupContext, budget: u64) -> Result<DicksonClass> {
    let qd = dickson_budget(ctx, budget)?;
    let mut poly = ctx.ring().one();
    for form in nonzero_linear_forms(ctx) {
        poly = &poly * &form;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x0d1c);
    for _ in 0..3 {
        let g = random_gl_element(ctx.field(), ctx.d(), &mut rng);
        if ctx.act_by_matrix(&g, &poly)? != poly {
            return Err(Error::Audit("top Dickson class not fixed by a GL element".into()));
        }
    }
    Ok(DicksonClass { poly, degree: (qd - 1) as usize })
}

/// A homogeneous system of parameters `theta_1..theta_d`.
#[derive(Clone, Debug)]
pub struct Hsop {
    pub elements: Vec<Polynomial>,
    pub degrees: Vec<usize>,
}

impl Hsop {
    /// Wraps homogeneous nonzero polynomials; no validation.
    pub fn new(elements: Vec<Polynomial>) -> Result<Hsop> {
        let degrees = elements
            .iter()
            .map(|e| match e.homogeneity() {
                Homogeneity::Homogeneous(k) => Ok(k),
                Homogeneity::Zero => Err(Error::HsopInvalid("zero element".into())),
                Homogeneity::Inhomogeneous => Err(Error::Inhomogeneous),
            })
            .collect::<Result<_>>()?;
        Ok(Hsop { elements, degrees })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Coefficients of `X^{q^i}` in `prod_{v in V*} (X + v)`, for `i = 0..d-1`,
/// computed through the additive recursion over a growing basis of `V*`:
/// adjoining `u` sends `P(X)` to `P(X)^q - P(u)^{q-1} P(X)`.
pub fn dickson_coefficients(ctx: &GroupContext) -> Result<Vec<Polynomial>> {
    dickson_budget(ctx, DICKSON_BUDGET)?;
    let ring = ctx.ring();
    let field = ctx.field();
    let q = field.q() as u64;
    // coeffs[i] multiplies X^{q^i}
    let mut coeffs = vec![ring.one()];
    for k in 0..ctx.d() {
        let u = ring.var(k);
        let mut at_u = ring.zero();
        for (i, c) in coeffs.iter().enumerate() {
            at_u = &at_u + &(c * &u.pow(q.pow(i as u32)));
        }
        let factor = at_u.pow(q - 1);
        let mut next = vec![ring.zero(); coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i + 1] = &next[i + 1] + &c.pow(q);
            next[i] = &next[i] - &(&factor * c);
        }
        coeffs = next;
    }
    coeffs.pop();
    Ok(coeffs)
}

/// The Dickson family as an hsop: the class of degree `q^d - q^i` in
/// position `i`. Position 0 is the top class.
pub fn dickson_family(ctx: &GroupContext) -> Result<Hsop> {
    let coeffs = dickson_coefficients(ctx)?;
    let hsop = Hsop::new(coeffs)?;
    if !is_zero_dimensional(ctx.d(), &hsop.elements)? {
        return Err(Error::Audit("Dickson family is not zero dimensional".into()));
    }
    Ok(hsop)
}

/// Averaging over the group; needs `p` not dividing `|G|`.
pub fn reynolds(group: &MatrixGroup, f: &Polynomial) -> Result<Polynomial> {
    let field = group.field();
    let n = group.order();
    if n.is_multiple_of(field.p() as usize) {
        return Err(Error::CharacteristicDividesOrder { p: field.p(), order: n });
    }
    let mut acc = group.ring().zero();
    for g in 0..n {
        acc = acc.checked_add(&group.act_on_poly(g, f)?)?;
    }
    Ok(acc.scale(field.inv_nz(field.from_int(n as i64))))
}

/// Whether `theta` (exactly `d` homogeneous invariants) is an hsop.
pub fn validate_hsop(group: &MatrixGroup, theta: &[Polynomial]) -> Result<bool> {
    if theta.len() != group.d() {
        return Err(Error::HsopInvalid(format!("expected {} elements, got {}", group.d(), theta.len())));
    }
    for t in theta {
        if t.homogeneity() == Homogeneity::Inhomogeneous {
            return Err(Error::Inhomogeneous);
        }
        check_invariant(group, t)?;
    }
    is_zero_dimensional(group.d(), theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{cyclic_permutation, int_matrix};
    use crate::polyring::tests_support::random_poly;

    fn f2() -> FieldSpec {
        FieldSpec::prime(2).unwrap()
    }

    fn transvection() -> MatrixGroup {
        let ctx = GroupContext::new(f2(), 2).unwrap();
        MatrixGroup::close_generators(&ctx, &[int_matrix(&f2(), &[&[1, 1], &[0, 1]])]).unwrap()
    }

    fn minus_one() -> MatrixGroup {
        let f3 = FieldSpec::prime(3).unwrap();
        let ctx = GroupContext::new(f3.clone(), 2).unwrap();
        MatrixGroup::close_generators(&ctx, &[int_matrix(&f3, &[&[-1, 0], &[0, -1]])]).unwrap()
    }

    fn bertin() -> MatrixGroup {
        let ctx = GroupContext::new(f2(), 4).unwrap();
        MatrixGroup::close_generators(&ctx, &[cyclic_permutation(4)]).unwrap()
    }

    /// Oracle: expand prod_v (X + v) directly as a polynomial in X.
    fn naive_family(ctx: &GroupContext) -> Vec<Polynomial> {
        let ring = ctx.ring();
        let mut coeffs = vec![ring.one()];
        let mut forms = nonzero_linear_forms(ctx);
        forms.push(ring.zero());
        for v in forms {
            let mut next = vec![ring.zero(); coeffs.len() + 1];
            for (k, c) in coeffs.iter().enumerate() {
                next[k + 1] = &next[k + 1] + c;
                next[k] = &next[k] + &(c * &v);
            }
            coeffs = next;
        }
        let q = ctx.field().q() as usize;
        for (k, c) in coeffs.iter().enumerate() {
            let is_q_power = (0..=ctx.d()).any(|i| q.pow(i as u32) == k);
            assert!(is_q_power || c.is_zero(), "unexpected X^{k} coefficient");
        }
        (0..ctx.d()).map(|i| coeffs[q.pow(i as u32)].clone()).collect()
    }

    #[test]
    fn invariant_space_examples() {
        let ctx = GroupContext::new(f2(), 2).unwrap();
        assert_eq!(invariant_space(&MatrixGroup::trivial(&ctx), 2).unwrap().dim(), 3);
        let g = transvection();
        let s1 = invariant_space(&g, 1).unwrap();
        assert_eq!(s1.basis(), &[g.ring().var(1)]);
        for n in 0..=10 {
            assert_eq!(invariant_space(&g, n).unwrap().dim(), n / 2 + 1, "n = {n}");
        }
    }

    #[test]
    fn invariants_fixed_by_all_elements() {
        for g in [transvection(), minus_one(), bertin()] {
            for n in 0..=6 {
                let s = invariant_space(&g, n).unwrap();
                for f in s.basis() {
                    for e in 0..g.order() {
                        assert_eq!(&g.act_on_poly(e, f).unwrap(), f);
                    }
                }
            }
        }
    }

    #[test]
    fn orbit_path_matches_generic_kernel() {
        // A non-monomial generator forces the generic path; compare both on a permutation group.
        let g = bertin();
        for n in 0..=5 {
            let fast = invariant_space(&g, n).unwrap();
            let field = g.field();
            let dim = g.ring().basis(n).len();
            let m = g.action_matrix(g.generators()[0], n).unwrap();
            let cols = (0..dim).map(|j| {
                let mut c = m.column(j).clone();
                c.axpy(field, Scalar::ONE, &SparseVec::unit(j));
                c
            });
            let (_, ker) = kernel_of_columns(field, dim, cols);
            assert_eq!(fast.vectors(), canonical_basis(field, dim, ker).as_slice());
        }
    }

    #[test]
    fn products_stay_in_s() {
        let s = InvariantRing::new(Arc::new(bertin()));
        for a in 0..=4 {
            for b in 0..=4 {
                let sa = s.slice(a).unwrap();
                let sb = s.slice(b).unwrap();
                for f in sa.basis() {
                    for g in sb.basis() {
                        s.coords(&(f * g)).unwrap();
                    }
                }
            }
        }
    }

    #[test]
    fn shrinking_the_group_grows_s() {
        let g = bertin();
        let ctx = g.context().clone();
        let sub = MatrixGroup::close_generators(&ctx, &[g.element(g.mul(g.generators()[0], g.generators()[0])).clone()]).unwrap();
        assert_eq!(sub.order(), 2);
        for n in 0..=6 {
            assert!(invariant_space(&g, n).unwrap().dim() <= invariant_space(&sub, n).unwrap().dim());
        }
    }

    #[test]
    fn dickson_top_examples() {
        let ctx1 = GroupContext::new(f2(), 1).unwrap();
        assert_eq!(dickson_top(&ctx1).unwrap().poly, ctx1.ring().var(0));
        let ctx2 = GroupContext::new(f2(), 2).unwrap();
        let top = dickson_top(&ctx2).unwrap();
        assert_eq!(top.poly, ctx2.ring().parse("x0^2*x1 + x0*x1^2").unwrap());
        assert_eq!(top.degree, 3);
        let f3 = FieldSpec::prime(3).unwrap();
        let ctx3 = GroupContext::new(f3, 1).unwrap();
        assert_eq!(dickson_top(&ctx3).unwrap().poly, ctx3.ring().parse("2*x0^2").unwrap());
        let big = GroupContext::new(f2(), 13).unwrap();
        assert_eq!(dickson_top(&big).unwrap_err(), Error::DicksonBudget(8192, 4096));
    }

    #[test]
    fn dickson_top_gl_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for (p, d) in [(2u32, 2usize), (2, 3), (3, 2)] {
            let ctx = GroupContext::new(FieldSpec::prime(p).unwrap(), d).unwrap();
            let top = dickson_top(&ctx).unwrap();
            assert_eq!(top.poly.homogeneous_degree().unwrap(), Some((p as usize).pow(d as u32) - 1));
            for _ in 0..100 {
                let g = random_gl_element(ctx.field(), d, &mut rng);
                assert_eq!(ctx.act_by_matrix(&g, &top.poly).unwrap(), top.poly);
            }
        }
    }

    #[test]
    fn dickson_family_matches_naive_expansion() {
        let cases = [(f2(), 1), (f2(), 2), (f2(), 3), (FieldSpec::prime(3).unwrap(), 2), (FieldSpec::new(2, 2, None).unwrap(), 2)];
        for (f, d) in cases {
            let ctx = GroupContext::new(f.clone(), d).unwrap();
            let fam = dickson_family(&ctx).unwrap();
            assert_eq!(fam.elements, naive_family(&ctx));
            assert_eq!(fam.elements[0], dickson_top(&ctx).unwrap().poly);
            let q = f.q() as usize;
            let qd = q.pow(d as u32);
            for (i, &deg) in fam.degrees.iter().enumerate() {
                assert_eq!(deg, qd - q.pow(i as u32));
            }
        }
        let ctx = GroupContext::new(f2(), 2).unwrap();
        let fam = dickson_family(&ctx).unwrap();
        assert_eq!(fam.elements[1], ctx.ring().parse("x0^2 + x0*x1 + x1^2").unwrap());
    }

    #[test]
    fn reynolds_examples() {
        let g = minus_one();
        let r = g.ring();
        assert!(reynolds(&g, &r.var(0)).unwrap().is_zero());
        let inv = r.parse("x0^2 + x0*x1").unwrap();
        assert_eq!(reynolds(&g, &inv).unwrap(), inv);
        let ctx = GroupContext::new(FieldSpec::prime(3).unwrap(), 2).unwrap();
        let f = ctx.ring().parse("x0 + 2*x1^3").unwrap();
        assert_eq!(reynolds(&MatrixGroup::trivial(&ctx), &f).unwrap(), f);
        assert!(matches!(reynolds(&transvection(), &transvection().ring().var(0)), Err(Error::CharacteristicDividesOrder { .. })));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let f = random_poly(&mut rng, r, 5, 4);
            let once = reynolds(&g, &f).unwrap();
            assert_eq!(reynolds(&g, &once).unwrap(), once);
        }
    }

    #[test]
    fn hsop_validation() {
        let g = transvection();
        let r = g.ring();
        let p = |s: &str| r.parse(s).unwrap();
        assert!(validate_hsop(&g, &[p("x1"), p("x0^2 + x0*x1")]).unwrap());
        assert!(!validate_hsop(&g, &[p("x1"), p("x1")]).unwrap());
        assert_eq!(validate_hsop(&g, &[p("x0"), p("x1")]), Err(Error::NotInvariant(0)));
        assert!(matches!(validate_hsop(&g, &[p("x1")]), Err(Error::HsopInvalid(_))));
        let fam = dickson_family(g.context()).unwrap();
        assert!(validate_hsop(&g, &fam.elements).unwrap());
        let b = bertin();
        let fam4 = dickson_family(b.context()).unwrap();
        assert!(validate_hsop(&b, &fam4.elements).unwrap());
    }

    #[test]
    fn mult_matrix_rejects_non_invariant() {
        let s = InvariantRing::new(Arc::new(transvection()));
        let x = s.ring().var(0);
        assert!(s.mult_matrix(&x, 1).is_err());
        let y = s.ring().var(1);
        let m = s.mult_matrix(&y, 2).unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 2));
    }
}
