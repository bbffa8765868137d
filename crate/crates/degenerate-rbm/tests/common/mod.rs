#![allow(dead_code)]

use degenerate_rbm::laplace::{build_case, CaseTag};
use degenerate_rbm::model::{analyze, rat, ModelParams, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn grid() -> Vec<Rational> {
    (-14..=18).filter(|&k| k != 0).map(|k| rat(k, 4)).collect()
}

const MU1: [(i128, i128); 5] = [(1, 2), (1, 3), (2, 3), (1, 4), (3, 5)];

/// Valid normalized parameter sets grouped by case tag, at most `per_tag` each.
pub fn parameter_sets(per_tag: usize) -> Vec<(CaseTag, Vec<ModelParams>)> {
    let mut buckets: Vec<(CaseTag, Vec<ModelParams>)> = Vec::new();
    let mut push = |p: ModelParams| {
        let Ok((_, c)) = analyze(&p) else { return };
        let Ok(case) = build_case(&c) else { return };
        match buckets.iter_mut().find(|(t, _)| *t == case.tag) {
            Some((_, v)) if v.len() < per_tag => v.push(p),
            Some(_) => {}
            None => buckets.push((case.tag, vec![p])),
        }
    };
    for g1 in grid() {
        for (a, b) in MU1 {
            let mu1 = rat(a, b);
            for g2 in grid() {
                if let Some(p) = ModelParams::from_exponents(mu1, g1, g2) {
                    push(p);
                }
            }
            if let Some(p) = ModelParams::with_r1_minus_one(mu1, g1) {
                push(p);
            }
            if let Some(p) = ModelParams::with_r2_minus_one(mu1, g1) {
                push(p);
            }
        }
    }
    buckets
}

/// Random non-normalized parameters satisfying the hypotheses.
pub fn random_general_params(rng: &mut ChaCha8Rng) -> ModelParams {
    loop {
        let mut q = |lo: i128, hi: i128, d: i128| rat(rng.random_range(lo..=hi), d);
        let p = ModelParams::new(q(1, 12, 4), q(1, 12, 4), q(1, 12, 4), q(1, 12, 4), q(-8, 8, 4), q(-8, 8, 4));
        if analyze(&p).is_ok() {
            return p;
        }
    }
}
