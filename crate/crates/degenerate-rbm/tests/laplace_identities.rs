mod common;

use degenerate_rbm::laplace::{consistency_check, CaseTag, StationaryLaplace};
use degenerate_rbm::model::{analyze, Preset};
use degenerate_rbm::specfun::C64;
use rand::Rng;

fn random_s(rng: &mut impl Rng, r: f64) -> C64 {
    C64::new(rng.random_range(-r..r), rng.random_range(-r..r))
}

#[test]
fn sampler_covers_every_case_tag() {
    let tags: Vec<CaseTag> = common::parameter_sets(3).into_iter().map(|(t, _)| t).collect();
    assert!(tags.len() >= 14, "{tags:?}");
    for (tag, sets) in common::parameter_sets(3) {
        assert_eq!(sets.len(), 3, "{tag:?}");
    }
}

#[test]
fn difference_equation_and_eta_invariance() {
    let mut rng = common::rng(11);
    for (tag, sets) in common::parameter_sets(5) {
        for p in sets {
            let l = StationaryLaplace::new(&p).unwrap();
            let sc = l.phi1.surface;
            for _ in 0..100 {
                let s = random_s(&mut rng, 4.0);
                let r = l.phi1.difference_residual(s).unwrap();
                assert!(r < 1e-9, "{tag:?} {p:?} s={s}: {r}");
                let a = l.phi1.unnormalized(s).unwrap();
                let b = l.phi1.unnormalized(sc.eta(s)).unwrap();
                assert!((a - b).norm() <= 1e-10 * a.norm(), "{tag:?} s={s}");
            }
        }
    }
}

#[test]
fn functional_equation_on_the_surface() {
    let mut rng = common::rng(12);
    for (tag, sets) in common::parameter_sets(3) {
        for p in sets {
            let l = StationaryLaplace::new(&p).unwrap();
            let sc = l.phi1.surface;
            let mut n = 0;
            while n < 200 {
                let s = random_s(&mut rng, 2.0);
                if !sc.membership(s).in_delta() {
                    continue;
                }
                n += 1;
                let r = l.surface_residual(s).unwrap();
                assert!(r < 1e-8, "{tag:?} s={s}: {r}");
            }
        }
    }
}

#[test]
fn normalization_matches_boundary_masses() {
    let mut rng = common::rng(13);
    for _ in 0..20 {
        let p = common::random_general_params(&mut rng);
        let l = StationaryLaplace::new(&p).unwrap();
        let (m1, m2) = l.boundary_masses();
        let z = C64::new(0.0, 0.0);
        assert!((l.phi1(z).unwrap().re - m1).abs() <= 1e-12 * m1);
        assert!((l.phi2(z).unwrap().re - m2).abs() <= 1e-12 * m2);
        assert_eq!(l.phi(z, z).unwrap(), C64::new(1.0, 0.0));
    }
}

#[test]
fn homogeneity_of_phi() {
    let mut rng = common::rng(14);
    for _ in 0..20 {
        let p = common::random_general_params(&mut rng);
        let l = StationaryLaplace::new(&p).unwrap();
        let s = &l.normalized.scale;
        let q = degenerate_rbm::model::to_float(&s.q);
        let (s1, s2) = (
            degenerate_rbm::model::to_float(&s.sigma1),
            degenerate_rbm::model::to_float(&s.sigma2),
        );
        for _ in 0..20 {
            let x = C64::new(rng.random_range(-3.0..-0.05), 0.0);
            let y = C64::new(rng.random_range(-3.0..-0.05), 0.0);
            let a = l.phi(x, y).unwrap();
            let b = l.phi_normalized(s1 * x / q, s2 * y / q).unwrap();
            assert!((a - b).norm() <= 1e-10 * b.norm(), "{p:?}: {a} vs {b}");
        }
    }
}

#[test]
fn transforms_decay_along_vertical_lines() {
    for (tag, sets) in common::parameter_sets(2) {
        for p in sets {
            let l = StationaryLaplace::new(&p).unwrap();
            let mu1 = l.phi1.surface.mu1;
            let s = |t: f64| C64::new(0.6 * mu1 - 0.1, t);
            let near = l.phi1.unnormalized(s(1.0)).unwrap().norm();
            let far = l.phi1.unnormalized(s(40.0)).unwrap().norm();
            let farther = l.phi1.unnormalized(s(400.0)).unwrap().norm();
            assert!(far < near && farther < far && farther < 0.05 * near, "{tag:?}: {near} {far} {farther}");
        }
    }
}

#[test]
fn consistency_with_reflection_form() {
    for (tag, sets) in common::parameter_sets(3) {
        for p in sets {
            let (_, c) = analyze(&p).unwrap();
            match consistency_check(&c) {
                Ok(d) => assert!(d < 1e-9, "{tag:?}: {d}"),
                Err(e) => assert!(matches!(tag, CaseTag::GeneralCase(_))
                    || matches!(tag, CaseTag::R1MinusOne { gamma2_nat: false, .. })
                    || matches!(tag, CaseTag::R2MinusOne { gamma1_nat: false, .. }), "{tag:?} {e}"),
            }
        }
    }
}

#[test]
fn symmetric_preset_is_swap_invariant() {
    let l = StationaryLaplace::new(&Preset::Symmetric.params()).unwrap();
    for y in [-0.1, -1.0, -4.0] {
        let a = l.phi1(C64::new(y, 0.0)).unwrap();
        let b = l.phi2(C64::new(y, 0.0)).unwrap();
        assert!((a - b).norm() < 1e-14 * a.norm());
    }
}
