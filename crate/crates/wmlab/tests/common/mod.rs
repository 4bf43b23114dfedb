//! Shared brute-force oracles for the integration suites. These stay naive
//! on purpose: plain rational arithmetic, double loops, no word tricks, no
//! shared kernel code beyond window membership itself.
#![allow(dead_code)] // each suite uses a different subset

use wmlab::bitwindow::{BitWindow, Membership};
use wmlab::poly::Poly;
use wmlab::rng;
use wmlab::Rat;

/// xi as a rational, derived directly from the membership bit and d=num/den.
pub fn xi_rat(window: &BitWindow, num: i128, den: i128, n: i128) -> Rat {
    if n <= 0 {
        return Rat::new(0, 1);
    }
    match window.query(n) {
        Membership::In => Rat::new(den - num, den),
        Membership::NotIn => Rat::new(-num, den),
        Membership::Outside => Rat::new(0, 1),
    }
}

/// || (1/J) sum_j prod_f xi(sign*n + offsets_f(j)) ||^2 over n = 1..M,
/// literal double loop in rational arithmetic.
#[allow(clippy::too_many_arguments)]
pub fn oracle_norm_sq(
    window: &BitWindow,
    num: i128,
    den: i128,
    factor_offsets: &[Vec<i128>],
    sign: i128,
    m: u64,
    j_count: u64,
    weights: Option<&[bool]>,
) -> Rat {
    let mut total = Rat::new(0, 1);
    for n in 1..=m as i128 {
        let mut jsum = Rat::new(0, 1);
        for j in 0..j_count as usize {
            if let Some(w) = weights {
                if !w[j] {
                    continue;
                }
            }
            let mut prod = Rat::new(1, 1);
            for offs in factor_offsets {
                prod *= xi_rat(window, num, den, sign * n + offs[j]);
            }
            jsum += prod;
        }
        let avg = jsum / Rat::new(j_count as i128, 1);
        total += avg * avg;
    }
    total / Rat::new(m as i128, 1)
}

/// <1_B, (1/J) sum_j xi(p(N+j) - n)>_{p(N)} by the same literal loops.
pub fn oracle_witness(
    a: &BitWindow,
    b: &BitWindow,
    num: i128,
    den: i128,
    offsets: &[i128],
    m: u64,
) -> Rat {
    let mut total = Rat::new(0, 1);
    for n in 1..=m as i128 {
        if !matches!(b.query(n), Membership::In) {
            continue;
        }
        let mut jsum = Rat::new(0, 1);
        for &t in offsets {
            jsum += xi_rat(a, num, den, t - n);
        }
        total += jsum / Rat::new(offsets.len() as i128, 1);
    }
    total / Rat::new(m as i128, 1)
}

/// Window with roughly num/den density, decided bit by bit from the seed.
pub fn random_window(seed: u64, lo: u64, hi: u64, num: u64, den: u64) -> BitWindow {
    BitWindow::from_members(lo, hi, (lo..hi).filter(|n| rng::draw(seed, *n) % den < num))
        .expect("valid window")
}

pub fn offsets(p: &Poly, n_base: u64, j_count: u64) -> Vec<i128> {
    (1..=j_count)
        .map(|j| p.eval_u64(n_base + j).expect("no overflow in test sizes"))
        .collect()
}
