//! Desk-scale checks of the averaged-shift quantities at a fixed parameter
//! point: small for the mixing candidates, pinned away from zero for the
//! periodic control, and the indicator-weighted average small for a random
//! set.

use wmlab::corr::{
    b_nj, backward_shift_norm, cube_average, forward_shift_norm, theorem1_witness,
    weighted_product_norm, Direction, WeightSeq,
};
use wmlab::poly::Poly;
use wmlab::rng;
use wmlab::seqgen::{
    gen_bernoulli, gen_periodic, Alpha, Density, DensitySource, GeneratorSpec, NormalizedSeq,
};
use std::collections::BTreeSet;

const SQRT2M1: f64 = std::f64::consts::SQRT_2 - 1.0;
const N_BASE: u64 = 2000;
const J_COUNT: u64 = 200;

fn p(text: &str) -> Poly {
    Poly::parse(text).unwrap()
}

fn coverage(poly: &Poly) -> u64 {
    poly.eval_u64(N_BASE + J_COUNT).unwrap() as u64 + 1
}

#[test]
fn backward_norm_small_for_weyl2() {
    let square = p("0,0,1");
    let w = GeneratorSpec::Weyl2 {
        alpha: Alpha::Float(SQRT2M1),
        interval: (0.0, 0.3),
    }
    .generate(0, coverage(&square))
    .unwrap();
    let xi = NormalizedSeq::new(w, Density::Float(0.3), DensitySource::Analytic).unwrap();
    let r = backward_shift_norm(&xi, &square, N_BASE, J_COUNT).unwrap();
    assert!(r.value < 0.05, "norm {}", r.value);
    assert_eq!(r.edge_terms, 0);
}

#[test]
fn forward_norm_small_for_rotation() {
    // linear shifts inside a quadratic window: total ergodicity at work
    let square = p("0,0,1");
    let linear = p("0,1");
    let top = square.eval_u64(N_BASE).unwrap() as u64 + N_BASE + J_COUNT + 2;
    let w = GeneratorSpec::Rotation {
        alpha: Alpha::Float(SQRT2M1),
        interval: (0.0, 0.3),
    }
    .generate(0, top)
    .unwrap();
    let xi = NormalizedSeq::new(w, Density::Float(0.3), DensitySource::Analytic).unwrap();
    let r = forward_shift_norm(&xi, &linear, &square, N_BASE, J_COUNT).unwrap();
    assert!(r.value < 0.05, "norm {}", r.value);
}

#[test]
fn forward_norm_pinned_for_periodic_control() {
    // q(n) = 2n against the evens: the shifted parity never moves, the norm
    // sits at 1/2 for every J tested
    let square = p("0,0,1");
    let even_shift = p("0,2");
    let top = square.eval_u64(N_BASE).unwrap() as u64 + 2 * (N_BASE + J_COUNT) + 2;
    let evens = gen_periodic(2, &BTreeSet::from([0]), 0, top).unwrap();
    let xi = NormalizedSeq::new(
        evens,
        Density::Rational { num: 1, den: 2 },
        DensitySource::Analytic,
    )
    .unwrap();
    for j in [10u64, 50, 200] {
        let r = forward_shift_norm(&xi, &even_shift, &square, N_BASE, j).unwrap();
        assert!(r.value >= 0.4, "J={j} norm {}", r.value);
    }
}

#[test]
fn weighted_backward_small_for_bernoulli() {
    let family = [p("0,1,1"), p("0,0,1")];
    let w = gen_bernoulli(0.5, 1, 0, coverage(&family[0])).unwrap();
    let xi = NormalizedSeq::new(w, Density::Float(0.5), DensitySource::Analytic).unwrap();
    let a = WeightSeq::ones(0, N_BASE + J_COUNT + 1).unwrap();
    let r = weighted_product_norm(&xi, &family, &a, None, N_BASE, J_COUNT, Direction::Backward)
        .unwrap();
    assert!(r.value < 0.05, "norm {}", r.value);
}

#[test]
fn bnj_small_for_bernoulli() {
    let family = [p("0,1,1"), p("0,0,1")];
    let a = gen_bernoulli(0.5, 2, 0, coverage(&family[0])).unwrap();
    let weights = WeightSeq::ones(0, N_BASE + J_COUNT + 1).unwrap();
    let r = b_nj(
        &a,
        &weights,
        &family,
        N_BASE,
        J_COUNT,
        Density::Float(0.5),
    )
    .unwrap();
    assert!(r.value.abs() < 0.05, "B_NJ {}", r.value);
}

#[test]
fn witness_hits_for_mixing_instance() {
    // a random half-density set against the evens: some polynomial value
    // lands in A + B essentially immediately
    let square = p("0,0,1");
    let a = gen_bernoulli(0.5, 6, 0, coverage(&square)).unwrap();
    let m = square.eval_u64(N_BASE).unwrap() as u64;
    let b = gen_periodic(2, &BTreeSet::from([0]), 0, m + 2).unwrap();
    let r = theorem1_witness(&a, &b, &square, N_BASE, J_COUNT, Density::Float(0.5)).unwrap();
    assert!(!r.no_hit);
    assert!(r.witness.abs() < 0.05, "witness {}", r.witness);
}

#[test]
fn cube_averages_mostly_small_for_bernoulli() {
    let n_len = 100_000u64;
    let w = gen_bernoulli(0.5, 1, 0, n_len + 250).unwrap();
    let xi = NormalizedSeq::new(w, Density::Float(0.5), DensitySource::Analytic).unwrap();
    let mut good = 0u32;
    let trials = 100u64;
    for t in 0..trials {
        let h1 = 1 + rng::draw(77, 2 * t) % 100;
        let h2 = 1 + rng::draw(77, 2 * t + 1) % 100;
        let c = cube_average(&xi, &[h1, h2], n_len).unwrap();
        if c.value.abs() < 0.01 {
            good += 1;
        }
    }
    assert!(good >= 90, "only {good} of {trials} cube averages were small");
}

#[test]
fn remark_emptiness_scales_with_any_seed() {
    // the pruned-set construction suppresses every solution regardless of
    // the base set
    for seed in [4u64, 11, 99] {
        let a = gen_bernoulli(0.5, seed, 0, 1_000_000).unwrap();
        let polys = [p("0,1"), p("0,0,0,1")];
        let (pruned, _) =
            wmlab::setops::remove_counterexample(&a, &polys[0], &polys[1]).unwrap();
        let hs = wmlab::setops::r_multi_mixed_degree(
            &pruned,
            &pruned,
            &polys,
            100,
            wmlab::setops::Coverage::Truncate,
        )
        .unwrap();
        assert_eq!(hs.hits.count_ones(), 0, "seed {seed}");
    }
}
