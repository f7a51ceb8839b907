mod common;

use common::{q, qs, rand_ind, to_f64};
use gst_core::geometry::{component_label, eigen_frame, segment_classify, surface_sample, SegmentClass};
use gst_core::points::{affine_point, cross_term, equivalent, involution, membership};
use gst_core::quadform::{hessian, psi};
use gst_core::rng::SplitMix64;
use gst_core::Rational;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (1i64..=48).prop_flat_map(|den| (0..=den).prop_map(move |num| q(num, den)))
}

fn nonzero() -> impl Strategy<Value = Rational> {
    (1i64..=24, 1i64..=24, any::<bool>()).prop_map(|(a, b, neg)| if neg { q(-a, b) } else { q(a, b) })
}

fn vector(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<Rational>> {
    n.prop_flat_map(|n| prop::collection::vec(rational(), n))
}

fn pair() -> impl Strategy<Value = (Vec<Rational>, Vec<Rational>)> {
    (3usize..=9).prop_flat_map(|n| (prop::collection::vec(rational(), n), prop::collection::vec(rational(), n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn psi_is_the_quadratic_form_of_q(p in vector(3..=10)) {
        let info = hessian::<Rational>(p.len()).unwrap();
        prop_assert_eq!(psi(&p), info.q.bilinear(&p, &p).unwrap());
    }

    #[test]
    fn psi_scales_quadratically_under_affine_maps(p in vector(3..=10), a in nonzero(), b in rational()) {
        let moved = affine_point(&p, &a, &b);
        prop_assert_eq!(psi(&moved), a.clone() * a * psi(&p));
    }

    #[test]
    fn cross_term_polarizes_psi((p, r) in pair()) {
        let sum: Vec<Rational> = p.iter().zip(&r).map(|(x, y)| x + y).collect();
        prop_assert_eq!(psi(&sum), psi(&p) + psi(&r) + cross_term(&p, &r).unwrap());
    }

    #[test]
    fn involution_preserves_psi(p in vector(3..=10)) {
        prop_assert_eq!(psi(&involution(&p)), psi(&p));
    }

    #[test]
    fn equivalence_witnesses_compose(p in vector(3..=8), a in nonzero(), b in rational(), c in nonzero(), d in rational()) {
        prop_assume!(p.iter().any(|v| *v != p[0]));
        let r = affine_point(&p, &a, &b);
        let s = affine_point(&r, &c, &d);
        let w_rp = equivalent(&r, &p, 0.0).unwrap().expect("r ∼ p");
        let w_sr = equivalent(&s, &r, 0.0).unwrap().expect("s ∼ r");
        prop_assert_eq!(&w_rp.a, &a);
        prop_assert_eq!(&w_rp.b, &b);
        let w_sp = w_sr.compose(&w_rp);
        prop_assert_eq!(Some(w_sp), equivalent(&s, &p, 0.0).unwrap());
        prop_assert_eq!(Some(w_rp.inverse()), equivalent(&p, &r, 0.0).unwrap());
        prop_assert_eq!(equivalent(&p, &p, 0.0).unwrap().map(|w| (w.a, w.b)), Some((Rational::one(), Rational::zero())));
    }

    #[test]
    fn lines_through_constant_points_stay_on_the_quadric(seed in any::<u64>(), n in 3usize..=9, c in rational(), t in rational()) {
        let mut rng = SplitMix64::new(seed);
        let p = rand_ind(&mut rng, n);
        prop_assert!(psi(&p).is_zero());
        let line: Vec<Rational> = p.iter().map(|v| (Rational::one() - &t) * &c + &t * v).collect();
        prop_assert!(psi(&line).is_zero());
        // and a point off the quadric is never joined to the constant line
        let mut off = p.clone();
        off[0] = &off[0] + q(1, 7);
        if !psi(&off).is_zero() && !t.is_zero() {
            let bent: Vec<Rational> = off.iter().map(|v| (Rational::one() - &t) * &c + &t * v).collect();
            prop_assert!(!psi(&bent).is_zero());
        }
    }

    #[test]
    fn generated_ind_points_are_members(seed in any::<u64>(), n in 2usize..=9) {
        let mut rng = SplitMix64::new(seed);
        let p = rand_ind(&mut rng, n);
        let m = membership(&p, 0.0);
        prop_assert!(m.in_box && m.in_ind);
    }
}

#[test]
fn label_tracks_orientation_for_n3() {
    let frame = eigen_frame(3).unwrap();
    let sample = surface_sample(&frame, 200, 0.3, 17).unwrap();
    let mut relation = None;
    for p in &sample.points {
        let label = component_label(&frame, p, 1e-9).unwrap().sign;
        let orient = if p[0] > p[2] { 1 } else { -1 };
        let r = label * orient;
        assert_eq!(*relation.get_or_insert(r), r, "at {p:?}");
    }
}

#[test]
fn label_constant_on_in_gst_segments() {
    let frame = eigen_frame(3).unwrap();
    let mut rng = SplitMix64::new(23);
    let mut checked = 0;
    while checked < 40 {
        let p = rand_ind(&mut rng, 3);
        if !membership(&p, 0.0).in_gst {
            continue;
        }
        let r = affine_point(&p, &q(1, 2), &q(1, 4));
        let seg = segment_classify(&p, &r, 16, 0.0).unwrap();
        assert_eq!(seg.class, SegmentClass::AllInGst);
        let a = component_label(&frame, &p, 1e-9).unwrap();
        for k in 0..=8 {
            let t = q(k, 8);
            let mid: Vec<Rational> = p.iter().zip(&r).map(|(x, y)| (Rational::one() - &t) * x + &t * y).collect();
            assert_eq!(component_label(&frame, &to_f64(&mid), 1e-9).unwrap(), a);
        }
        checked += 1;
    }
}

#[test]
fn involution_swaps_influence_witness_side() {
    let p = qs(&[(1, 1), (1, 2), (1, 3)]);
    let m = membership(&involution(&p), 0.0);
    assert!(m.in_gst);
    assert_eq!(m.influence_witness, membership(&p, 0.0).influence_witness);
}
