mod common;

use std::sync::Arc;

use common::*;
use modinv::exactalg::{SparseMatrix, SparseVec};
use modinv::homology::depth_estimate;
use modinv::invariants::{dickson_top, InvariantRing};
use modinv::localcoh::*;
use modinv::Polynomial;

/// `A / (theta)` over `A = F_2[theta]`: one copy of the field in degree 0.
struct ResidueField;

impl GradedTarget for ResidueField {
    fn dim(&self, n: usize) -> modinv::Result<usize> {
        Ok(usize::from(n == 0))
    }
    fn act(&self, _j: usize, _n: usize, _v: &SparseVec) -> modinv::Result<SparseVec> {
        Ok(SparseVec::new())
    }
}

fn bertin_resolution(window: usize) -> (Arc<InvariantRing>, Vec<Polynomial>, GradedResolution) {
    let s = invariants(&bertin());
    let theta = bertin_hsop(s.ring());
    let pres = present_over_hsop(s.clone(), &theta, window).unwrap();
    let res = free_resolution(&pres, 4).unwrap();
    (s, theta, res)
}

#[test]
fn cohen_macaulay_invariants_are_free() {
    let t = invariants(&transvection());
    let pres = present_over_hsop(t.clone(), &transvection_hsop(t.ring()), 12).unwrap();
    assert_eq!(pres.generator_degrees(), &[0]);
    assert!(pres.is_free());

    let m = invariants(&minus_one());
    let theta = minus_one_hsop(m.ring());
    let pres = present_over_hsop(m.clone(), &theta, 12).unwrap();
    assert_eq!(pres.generator_degrees(), &[0, 2]);
    assert!(pres.is_free());
    let res = free_resolution(&pres, 2).unwrap();
    assert_eq!(res.alternating_rank(), 2);
    for i in 1..=2 {
        assert!(ext_slices(&res, i, -6..=12).unwrap().is_zero());
    }
    // the generator of degree 2 is x*y up to a unit
    let lifted = m.slice(2).unwrap().lift(m.field(), &pres.generators.generators[1]);
    let gen = m.ring().from_sparse(2, &lifted);
    let xy = m.ring().parse("x0*x1").unwrap();
    assert!(m.field().elements().skip(1).any(|c| gen == xy.scale(c)));
}

#[test]
fn residue_field_has_one_step_resolution() {
    let alg = Arc::new(WeightedAlgebra::new(f2(), vec![1]).unwrap());
    let pres = present_module(alg, Arc::new(ResidueField), 8).unwrap();
    assert_eq!(pres.generator_degrees(), &[0]);
    assert_eq!(pres.relation_degrees(), &[1]);
    let res = free_resolution(&pres, 1).unwrap();
    assert_eq!(res.length(), 1);
    assert_eq!(res.alternating_rank(), 0);
    let ext1 = ext_slices(&res, 1, -3..=3).unwrap();
    assert_eq!(ext1.dims(), vec![(-3, 0), (-2, 0), (-1, 1), (0, 0), (1, 0), (2, 0), (3, 0)]);
    assert!(ext_slices(&res, 0, -3..=3).unwrap().is_zero());
    // a second resolution step would be needed for length 0
    assert!(free_resolution(&pres, 0).is_err());
}

#[test]
fn bertin_presentation_is_pinned() {
    let (_, _, res) = bertin_resolution(22);
    assert_eq!(res.twists(0), &[0, 2, 3, 4, 4, 5, 6]);
    assert_eq!(res.twists(1), &[6]);
    assert_eq!(res.length(), 1);
    // rank of S over A is (1*2*3*4)/|G|
    assert_eq!(res.alternating_rank(), 6);
}

#[test]
fn bertin_ext_is_periodic() {
    let (_, _, res) = bertin_resolution(22);
    assert_eq!(ext_lower_degree(&res, 1), -6);
    let ext1 = ext_slices(&res, 1, -8..=10).unwrap();
    for (m, dim) in ext1.dims() {
        let expected = usize::from(m >= -6 && (m + 6) % 4 == 0);
        assert_eq!(dim, expected, "m = {m}");
    }
    for i in [2, 3, 4] {
        assert!(ext_slices(&res, i, -8..=10).unwrap().is_zero());
    }
}

#[test]
fn two_lifts_induce_the_same_maps() {
    let (s, _, res) = bertin_resolution(22);
    let f = s.ring().parse("x0*x2 + x1*x3").unwrap();
    let first = lift_action(&res, &f, 1, None).unwrap();
    for seed in 1..4 {
        let other = lift_action(&res, &f, 1, Some(seed)).unwrap();
        for m in -6..=6 {
            let from = ext_slice(&res, 1, m).unwrap();
            let to = ext_slice(&res, 1, m + 2).unwrap();
            assert_eq!(
                induced_on_ext(&res, &first, 1, &from, &to).unwrap(),
                induced_on_ext(&res, &other, 1, &from, &to).unwrap()
            );
        }
    }
}

#[test]
fn hsop_elements_act_through_the_algebra() {
    let (_, theta, res) = bertin_resolution(22);
    for (j, t) in theta.iter().enumerate() {
        let lift = lift_action(&res, t, 1, None).unwrap();
        let e = res.algebra.degrees()[j] as i64;
        for m in -6..=6 {
            let from = ext_slice(&res, 1, m).unwrap();
            let to = ext_slice(&res, 1, m + e).unwrap();
            let induced = induced_on_ext(&res, &lift, 1, &from, &to).unwrap();
            let cols: Vec<SparseVec> = from
                .quotient
                .reps()
                .iter()
                .map(|r| SparseVec::from_dense(&to.quotient.project(&scale_hom(&res, 1, j, m, r)).unwrap()))
                .collect();
            assert_eq!(induced, SparseMatrix::new(to.dim(), cols), "theta_{j} at m = {m}");
        }
    }
}

#[test]
fn induced_action_is_multiplicative() {
    let (s, _, res) = bertin_resolution(22);
    let f = s.ring().parse("x0*x2 + x1*x3").unwrap();
    let g = s.ring().parse("x0*x1 + x1*x2 + x2*x3 + x0*x3").unwrap();
    let lf = lift_action(&res, &f, 1, None).unwrap();
    let lg = lift_action(&res, &g, 1, None).unwrap();
    let lfg = lift_action(&res, &(&f * &g), 1, None).unwrap();
    for m in -6..=6 {
        let a = ext_slice(&res, 1, m).unwrap();
        let b = ext_slice(&res, 1, m + 2).unwrap();
        let c = ext_slice(&res, 1, m + 4).unwrap();
        let composed = induced_on_ext(&res, &lf, 1, &b, &c).unwrap().mul(res.algebra.field(), &induced_on_ext(&res, &lg, 1, &a, &b).unwrap()).unwrap();
        assert_eq!(composed, induced_on_ext(&res, &lfg, 1, &a, &c).unwrap());
    }
}

#[test]
fn top_dickson_class_is_nilpotent_on_ext() {
    let (s, _, res) = bertin_resolution(22);
    let top = dickson_top(s.group().context()).unwrap();
    let out = local_nilpotency(&res, &top.poly, 3, -6..=6, 4).unwrap();
    let cert = out.certificate().expect("certificate");
    assert_eq!((cert.ext_index, cert.a), (1, 1));
    assert_eq!(cert.minimality_degree, Some(-6));
    for j in 0..3 {
        let vacuous = local_nilpotency(&res, &top.poly, j, -6..=6, 4).unwrap();
        let c = vacuous.certificate().unwrap();
        assert_eq!(c.a, 1);
        assert!(c.slices.iter().all(|w| w.dim == 0));
    }
}

#[test]
fn insufficient_headroom_is_reported() {
    let (s, _, res) = bertin_resolution(12);
    let top = dickson_top(s.group().context()).unwrap();
    assert!(matches!(local_nilpotency(&res, &top.poly, 3, -6..=6, 4), Err(modinv::Error::WindowTooSmall(_))));
}

#[test]
fn cm_detector_agrees_with_depth_estimate() {
    for g in [transvection(), minus_one()] {
        let s = invariants(&g);
        let theta = if g.field().p() == 2 { transvection_hsop(s.ring()) } else { minus_one_hsop(s.ring()) };
        let res = free_resolution(&present_over_hsop(s.clone(), &theta, 12).unwrap(), 2).unwrap();
        let ext_zero = (0..2).all(|j| ext_slices(&res, 2 - j, -6..=12).unwrap().is_zero());
        let est = depth_estimate(s, &theta, 12).unwrap();
        assert_eq!(ext_zero, est.upper == 2);
        assert!(ext_zero);
        assert!(cm_short_circuit(&g).is_some());
    }
    assert!(cm_short_circuit(&bertin()).is_none());
}
