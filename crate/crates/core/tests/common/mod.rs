#![allow(dead_code)]

use std::sync::Arc;

use modinv::exactalg::{FieldSpec, Scalar, SparseVec};
use modinv::group::{cyclic_permutation, int_matrix, GroupContext, MatrixGroup};
use modinv::invariants::InvariantRing;
use modinv::{PolyRing, Polynomial};
use rand::Rng;

pub fn f2() -> FieldSpec {
    FieldSpec::prime(2).unwrap()
}

pub fn trivial(d: usize) -> Arc<MatrixGroup> {
    Arc::new(MatrixGroup::trivial(&GroupContext::new(f2(), d).unwrap()))
}

/// `[[1, 1], [0, 1]]` over `F_p`.
pub fn transvection_over(p: u32) -> Arc<MatrixGroup> {
    let f = FieldSpec::prime(p).unwrap();
    let ctx = GroupContext::new(f.clone(), 2).unwrap();
    Arc::new(MatrixGroup::close_generators(&ctx, &[int_matrix(&f, &[&[1, 1], &[0, 1]])]).unwrap())
}

pub fn transvection() -> Arc<MatrixGroup> {
    transvection_over(2)
}

/// Cyclic permutation of four coordinates over `F_2`.
pub fn bertin() -> Arc<MatrixGroup> {
    let ctx = GroupContext::new(f2(), 4).unwrap();
    Arc::new(MatrixGroup::close_generators(&ctx, &[cyclic_permutation(4)]).unwrap())
}

/// `{I, -I}` in `GL_2(F_3)`.
pub fn minus_one() -> Arc<MatrixGroup> {
    let f3 = FieldSpec::prime(3).unwrap();
    let ctx = GroupContext::new(f3.clone(), 2).unwrap();
    Arc::new(MatrixGroup::close_generators(&ctx, &[int_matrix(&f3, &[&[-1, 0], &[0, -1]])]).unwrap())
}

pub fn parse_all(ring: &PolyRing, texts: &[&str]) -> Vec<Polynomial> {
    texts.iter().map(|t| ring.parse(t).unwrap()).collect()
}

pub fn transvection_hsop(ring: &PolyRing) -> Vec<Polynomial> {
    parse_all(ring, &["x1", "x0^2 + x0*x1"])
}

pub fn minus_one_hsop(ring: &PolyRing) -> Vec<Polynomial> {
    parse_all(ring, &["x0^2", "x1^2"])
}

/// Elementary symmetric polynomials in four variables.
pub fn bertin_hsop(ring: &PolyRing) -> Vec<Polynomial> {
    parse_all(
        ring,
        &[
            "x0 + x1 + x2 + x3",
            "x0*x1 + x0*x2 + x0*x3 + x1*x2 + x1*x3 + x2*x3",
            "x0*x1*x2 + x0*x1*x3 + x0*x2*x3 + x1*x2*x3",
            "x0*x1*x2*x3",
        ],
    )
}

pub fn invariants(g: &Arc<MatrixGroup>) -> Arc<InvariantRing> {
    Arc::new(InvariantRing::new(g.clone()))
}

pub fn random_scalar<R: Rng>(field: &FieldSpec, rng: &mut R) -> Scalar {
    field.from_int(rng.gen_range(0..field.q() as i64))
}

pub fn random_vector<R: Rng>(field: &FieldSpec, dim: usize, rng: &mut R) -> SparseVec {
    let v: Vec<Scalar> = (0..dim).map(|_| random_scalar(field, rng)).collect();
    SparseVec::from_dense(&v)
}

pub fn random_homogeneous<R: Rng>(ring: &PolyRing, n: usize, rng: &mut R) -> Polynomial {
    let dim = ring.basis(n).len();
    let v: Vec<Scalar> = (0..dim).map(|_| random_scalar(ring.field(), rng)).collect();
    ring.from_vector(n, &v).unwrap()
}

/// A random element of `S_k`.
pub fn random_invariant<R: Rng>(s: &InvariantRing, k: usize, rng: &mut R) -> Polynomial {
    let slice = s.slice(k).unwrap();
    let mut acc = s.ring().zero();
    for b in slice.basis() {
        acc = &acc + &b.scale(random_scalar(s.field(), rng));
    }
    acc
}
