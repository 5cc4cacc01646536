//! Steenrod reduced powers on `R`: the total operation sends each variable
//! `v` to `v + v^q xi` and is extended multiplicatively.

use crate::error::{Error, Result};
use crate::exactalg::{FieldSpec, Scalar, SparseMatrix, SparseVec};
use crate::group::MatrixGroup;
use crate::invariants::check_invariant;
use crate::polyring::{Monomial, PolyRing, Polynomial};

/// `P(xi)(f)` as the list `[P^0 f, P^1 f, ..., P^k f]`, with `k = deg f`.
#[derive(Clone, Debug, PartialEq)]
pub struct TotalPower {
    pub base: Polynomial,
    pub coeffs: Vec<Polynomial>,
}

impl TotalPower {
    pub fn truncation(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// `P^i f`; zero beyond the truncation.
    pub fn get(&self, i: usize) -> Polynomial {
        self.coeffs.get(i).cloned().unwrap_or_else(|| Polynomial::zero(self.base.field(), self.base.nvars()))
    }
}

/// `C(n, k) mod p` by Lucas' theorem.
pub fn binomial_mod_p(mut n: u64, mut k: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    while k > 0 {
        let (nd, kd) = (n % p, k % p);
        if kd > nd {
            return 0;
        }
        acc = acc * small_binomial(nd, kd, p) % p;
        n /= p;
        k /= p;
    }
    acc
}

fn small_binomial(n: u64, k: u64, p: u64) -> u64 {
    let (mut num, mut den) = (1u64, 1u64);
    for i in 0..k {
        num = num * ((n - i) % p) % p;
        den = den * ((i + 1) % p) % p;
    }
    num * pow_mod(den, p - 2, p) % p
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// Terms `(xi-degree, monomial, coefficient)` of `P(xi)(x^a)` with xi-degree in `lo..=hi`.
fn expand_monomial(field: &FieldSpec, m: &Monomial, lo: usize, hi: usize) -> Vec<(usize, Monomial, Scalar)> {
    let p = field.p() as u64;
    let q = field.q();
    let exps: Vec<u32> = m.exps().collect();
    let d = exps.len();
    // suffix[j] = largest xi-degree reachable from variables j..
    let mut suffix = vec![0usize; d + 1];
    for j in (0..d).rev() {
        suffix[j] = suffix[j + 1] + exps[j] as usize;
    }
    let mut out = Vec::new();
    let mut cur = vec![0u32; d];
    #[allow(clippy::too_many_arguments)]
    fn rec(
        j: usize,
        k: usize,
        c: u64,
        exps: &[u32],
        suffix: &[usize],
        cur: &mut Vec<u32>,
        (p, q, lo, hi): (u64, u32, usize, usize),
        field: &FieldSpec,
        out: &mut Vec<(usize, Monomial, Scalar)>,
    ) {
        if j == exps.len() {
            if k >= lo {
                out.push((k, Monomial::from_exps(cur), field.from_int(c as i64)));
            }
            return;
        }
        if k + suffix[j] < lo {
            return;
        }
        let a = exps[j];
        for kj in 0..=a {
            if k + kj as usize > hi {
                break;
            }
            let b = binomial_mod_p(a as u64, kj as u64, p);
            if b == 0 {
                continue;
            }
            cur[j] = a - kj + kj * q;
            rec(j + 1, k + kj as usize, c * b % p, exps, suffix, cur, (p, q, lo, hi), field, out);
        }
        cur[j] = 0;
    }
    rec(0, 0, 1, &exps, &suffix, &mut cur, (p, q, lo, hi), field, &mut out);
    out
}

pub fn total_power(f: &Polynomial) -> TotalPower {
    let field = f.field();
    let k = f.degree().unwrap_or(0);
    let mut coeffs = vec![Polynomial::zero(field, f.nvars()); k + 1];
    for (m, c) in f.terms() {
        for (i, mono, b) in expand_monomial(field, m, 0, k) {
            coeffs[i].add_term(mono, field.mul(b, c));
        }
    }
    TotalPower { base: f.clone(), coeffs }
}

/// The `xi^i` coefficient of `P(xi)(f)`.
pub fn steenrod_p(i: usize, f: &Polynomial) -> Polynomial {
    let field = f.field();
    let mut out = Polynomial::zero(field, f.nvars());
    for (m, c) in f.terms() {
        if m.degree() < i {
            continue;
        }
        for (_, mono, b) in expand_monomial(field, m, i, i) {
            out.add_term(mono, field.mul(b, c));
        }
    }
    out
}

/// Matrix of `P^i: R_n -> R_{n + i(q-1)}` in the graded bases.
pub fn steenrod_matrix(ring: &PolyRing, i: usize, n: usize) -> SparseMatrix {
    let field = ring.field();
    let src = ring.basis(n);
    let dst = ring.basis(n + i * (field.q() as usize - 1));
    let cols = src
        .monomials()
        .iter()
        .map(|m| {
            let pairs = expand_monomial(field, m, i, i).into_iter().map(|(_, mono, c)| (dst.index_of(&mono).unwrap(), c)).collect();
            SparseVec::from_pairs(field, pairs)
        })
        .collect();
    SparseMatrix::new(dst.len(), cols)
}

/// `P^i(s)` for an invariant `s`, re-verified to be invariant.
pub fn check_invariant_closure(group: &MatrixGroup, s: &Polynomial, i: usize) -> Result<Polynomial> {
    check_invariant(group, s)?;
    let out = steenrod_p(i, s);
    check_invariant(group, &out).map_err(|_| Error::Audit(format!("P^{i} of an invariant is not invariant")))?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{cyclic_permutation, int_matrix, GroupContext};
    use crate::polyring::tests_support::random_poly;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fields() -> Vec<FieldSpec> {
        vec![FieldSpec::prime(2).unwrap(), FieldSpec::prime(3).unwrap(), FieldSpec::new(2, 2, None).unwrap()]
    }

    fn random_homogeneous(rng: &mut ChaCha8Rng, ring: &PolyRing, max_deg: usize) -> Polynomial {
        let n = rng.gen_range(0..=max_deg);
        random_poly(rng, ring, max_deg, 4).graded_component(n)
    }

    #[test]
    fn lucas() {
        assert_eq!(binomial_mod_p(4, 2, 2), 0);
        assert_eq!(binomial_mod_p(5, 1, 2), 1);
        assert_eq!(binomial_mod_p(10, 3, 7), 120 % 7);
        for n in 0..30u64 {
            let mut row = vec![1u64];
            for k in 1..=n {
                row.push(row[k as usize - 1] * (n - k + 1) / k);
            }
            for (k, &c) in row.iter().enumerate() {
                for p in [2, 3, 5] {
                    assert_eq!(binomial_mod_p(n, k as u64, p), c % p);
                }
            }
        }
    }

    #[test]
    fn examples() {
        let r = PolyRing::new(FieldSpec::prime(2).unwrap(), 2);
        let p = |s: &str| r.parse(s).unwrap();
        assert_eq!(total_power(&p("x0")).coeffs, vec![p("x0"), p("x0^2")]);
        assert_eq!(total_power(&r.one()).coeffs, vec![r.one()]);
        assert_eq!(total_power(&p("x0*x1")).coeffs, vec![p("x0*x1"), p("x0^2*x1 + x0*x1^2"), p("x0^2*x1^2")]);
        assert_eq!(steenrod_p(0, &p("x0^3 + x1")), p("x0^3 + x1"));
        assert_eq!(steenrod_p(1, &p("x0*x1")), p("x0^2*x1 + x0*x1^2"));
        assert!(steenrod_p(2, &p("x1")).is_zero());
        assert!(steenrod_p(1, &r.one()).is_zero());
    }

    #[test]
    fn cartan_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for f in fields() {
            let mut count = 0;
            for d in 1..=3 {
                let ring = PolyRing::new(f.clone(), d);
                for _ in 0..70 {
                    let u = random_homogeneous(&mut rng, &ring, 6);
                    let v = random_homogeneous(&mut rng, &ring, 6);
                    let uv = &u * &v;
                    for k in 0..=uv.degree().unwrap_or(0) + 1 {
                        let mut rhs = ring.zero();
                        for i in 0..=k {
                            rhs = &rhs + &(&steenrod_p(i, &u) * &steenrod_p(k - i, &v));
                        }
                        assert_eq!(steenrod_p(k, &uv), rhs);
                    }
                    count += 1;
                }
            }
            assert!(count >= 200);
        }
    }

    #[test]
    fn top_power_and_vanishing() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for f in fields() {
            let ring = PolyRing::new(f.clone(), 3);
            for _ in 0..200 {
                let u = random_homogeneous(&mut rng, &ring, 6);
                let n = u.degree().unwrap_or(0);
                assert_eq!(steenrod_p(n, &u), u.pow(f.q() as u64));
                assert!(steenrod_p(n + 1, &u).is_zero());
                assert!(steenrod_p(n + 3, &u).is_zero());
                let tp = total_power(&u);
                for i in 0..=n {
                    assert_eq!(tp.get(i), steenrod_p(i, &u));
                    if !tp.get(i).is_zero() {
                        assert_eq!(tp.get(i).homogeneous_degree().unwrap(), Some(n + i * (f.q() as usize - 1)));
                    }
                }
            }
        }
    }

    #[test]
    fn linearity_and_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for f in fields() {
            let ring = PolyRing::new(f.clone(), 2);
            for _ in 0..50 {
                let u = random_poly(&mut rng, &ring, 5, 4);
                let v = random_poly(&mut rng, &ring, 5, 4);
                let (a, b) = (Scalar(rng.gen_range(0..f.q())), Scalar(rng.gen_range(0..f.q())));
                let comb = &u.scale(a) + &v.scale(b);
                for i in 0..4 {
                    assert_eq!(steenrod_p(i, &comb), &steenrod_p(i, &u).scale(a) + &steenrod_p(i, &v).scale(b));
                }
            }
            for n in 0..=4 {
                for i in 0..=n {
                    let m = steenrod_matrix(&ring, i, n);
                    for (j, mono) in ring.basis(n).monomials().iter().enumerate() {
                        let img = steenrod_p(i, &Polynomial::term(&f, mono.clone(), Scalar::ONE));
                        assert_eq!(ring.from_sparse(n + i * (f.q() as usize - 1), m.column(j)), img);
                    }
                }
            }
        }
    }

    #[test]
    fn equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let f2 = FieldSpec::prime(2).unwrap();
        let f3 = FieldSpec::prime(3).unwrap();
        let f4 = FieldSpec::new(2, 2, None).unwrap();
        let t = f4.generator_t();
        let groups = [
            MatrixGroup::close_generators(&GroupContext::new(f2.clone(), 2).unwrap(), &[int_matrix(&f2, &[&[1, 1], &[0, 1]])]).unwrap(),
            MatrixGroup::close_generators(&GroupContext::new(f2.clone(), 3).unwrap(), &[cyclic_permutation(3)]).unwrap(),
            MatrixGroup::close_generators(&GroupContext::new(f3.clone(), 2).unwrap(), &[int_matrix(&f3, &[&[1, 1], &[0, 1]])]).unwrap(),
            MatrixGroup::close_generators(
                &GroupContext::new(f4.clone(), 2).unwrap(),
                &[crate::exactalg::Matrix::from_rows(&[vec![Scalar::ONE, t], vec![Scalar::ZERO, Scalar::ONE]]).unwrap()],
            )
            .unwrap(),
        ];
        for g in &groups {
            for _ in 0..30 {
                let r = random_poly(&mut rng, g.ring(), 5, 4);
                let s = rng.gen_range(0..g.order());
                for i in 0..4 {
                    assert_eq!(g.act_on_poly(s, &steenrod_p(i, &r)).unwrap(), steenrod_p(i, &g.act_on_poly(s, &r).unwrap()));
                }
            }
        }
    }

    #[test]
    fn closure_on_invariants() {
        let f2 = FieldSpec::prime(2).unwrap();
        let ctx = GroupContext::new(f2.clone(), 2).unwrap();
        let g = MatrixGroup::close_generators(&ctx, &[int_matrix(&f2, &[&[1, 1], &[0, 1]])]).unwrap();
        let top = ctx.ring().parse("x0^2*x1 + x0*x1^2").unwrap();
        // by hand: both terms of the top class contribute x0^2*x1^2 to P^1
        assert!(check_invariant_closure(&g, &top, 1).unwrap().is_zero());
        let p2 = check_invariant_closure(&g, &top, 2).unwrap();
        assert_eq!(p2, ctx.ring().parse("x0^4*x1 + x0*x1^4").unwrap());
        assert!(check_invariant_closure(&g, &ctx.ring().one(), 2).unwrap().is_zero());
        assert_eq!(check_invariant_closure(&g, &ctx.ring().var(0), 1), Err(Error::NotInvariant(0)));
        let triv = MatrixGroup::trivial(&ctx);
        check_invariant_closure(&triv, &ctx.ring().parse("x0^3 + x1").unwrap(), 2).unwrap();
    }
}
