//! Averaged polynomial-shift norms over L2 windows.
//!
//! One kernel evaluates every operation here: vectors of the form
//! `u_j(n) = w_j * prod_f chi_f(offset_f(j) + sign*n)` where each factor is
//! either the normalized sequence xi or the plain indicator of its set.
//! The norm ops reduce `(1/M) sum_n ((1/J) sum_j u_j(n))^2`; the witness and
//! the indicator-weighted averages reduce
//! `(1/M) sum_n outer(n) (1/J) sum_j u_j(n)`.
//! Sharing the kernel makes the k=1 specializations of the product norms
//! bit-identical to the plain shift norms.

use rayon::prelude::*;

use crate::bitwindow::{BitWindow, Membership};
use crate::error::{Error, Result};
use crate::poly::{essentially_distinct, Poly, PolyFamily};
use crate::seqgen::{Density, DensitySource, NormalizedSeq};
use crate::Rat;

use super::{Compensated, WeightSeq};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormResult {
    pub value: f64,
    pub edge_terms: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactValue {
    pub value: Rat,
    pub edge_terms: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WitnessResult {
    pub witness: f64,
    pub no_hit: bool,
    pub edge_terms: u64,
}

struct FactorSpec {
    indicator: bool,
    offsets: Vec<i128>, // indexed by j - 1
}

struct Problem<'a> {
    xi: &'a NormalizedSeq,
    m: u64,
    j_count: u64,
    sign: i128,
    factors: Vec<FactorSpec>,
    weights: Option<Vec<bool>>,
}

/// xi factor or indicator factor at a signed argument, float mode.
#[inline]
fn eval_factor(xi: &NormalizedSeq, indicator: bool, arg: i128) -> (f64, bool) {
    if indicator {
        if arg < 0 {
            return (0.0, false);
        }
        match xi.window().query(arg) {
            Membership::In => (1.0, false),
            Membership::NotIn => (0.0, false),
            Membership::Outside => (0.0, true),
        }
    } else {
        xi.xi_with_edge(arg)
    }
}

/// Same in exact mode: numerator over den (xi) or a plain 0/1 (indicator).
#[inline]
fn eval_factor_exact(xi: &NormalizedSeq, indicator: bool, arg: i128) -> (i128, bool) {
    if indicator {
        if arg < 0 {
            return (0, false);
        }
        match xi.window().query(arg) {
            Membership::In => (1, false),
            Membership::NotIn => (0, false),
            Membership::Outside => (0, true),
        }
    } else {
        xi.xi_numer(arg)
    }
}

const N_CHUNK: u64 = 8192;

fn norm_sq_float(p: &Problem<'_>) -> (f64, u64) {
    let chunks: Vec<u64> = (0..p.m.div_ceil(N_CHUNK)).collect();
    let partials: Vec<(f64, u64)> = chunks
        .par_iter()
        .map(|&c| {
            let from = c * N_CHUNK + 1;
            let to = ((c + 1) * N_CHUNK).min(p.m);
            let mut acc = Compensated::new();
            let mut edges = 0u64;
            for n in from..=to {
                let sn = p.sign * n as i128;
                let mut jsum = 0.0f64;
                for j in 0..p.j_count as usize {
                    if let Some(w) = &p.weights {
                        if !w[j] {
                            continue;
                        }
                    }
                    let mut prod = 1.0f64;
                    for f in &p.factors {
                        let (v, e) = eval_factor(p.xi, f.indicator, f.offsets[j] + sn);
                        edges += e as u64;
                        prod *= v;
                    }
                    jsum += prod;
                }
                let s = jsum / p.j_count as f64;
                acc.add(s * s);
            }
            (acc.total(), edges)
        })
        .collect();
    let mut total = Compensated::new();
    let mut edges = 0u64;
    for (v, e) in partials {
        total.add(v);
        edges += e;
    }
    (total.total() / p.m as f64, edges)
}

fn norm_sq_exact(p: &Problem<'_>) -> Result<ExactValue> {
    let den = p.xi.exact_denominator()?;
    let mut term_den: i128 = 1;
    for f in &p.factors {
        if !f.indicator {
            term_den = term_den
                .checked_mul(den)
                .ok_or(Error::Overflow("exact norm denominator"))?;
        }
    }
    let mut total: i128 = 0;
    let mut edges = 0u64;
    for n in 1..=p.m {
        let sn = p.sign * n as i128;
        let mut jsum: i128 = 0;
        for j in 0..p.j_count as usize {
            if let Some(w) = &p.weights {
                if !w[j] {
                    continue;
                }
            }
            let mut prod: i128 = 1;
            for f in &p.factors {
                let (v, e) = eval_factor_exact(p.xi, f.indicator, f.offsets[j] + sn);
                edges += e as u64;
                prod = prod
                    .checked_mul(v)
                    .ok_or(Error::Overflow("exact norm term"))?;
            }
            jsum = jsum
                .checked_add(prod)
                .ok_or(Error::Overflow("exact norm j-sum"))?;
        }
        total = jsum
            .checked_mul(jsum)
            .and_then(|sq| total.checked_add(sq))
            .ok_or(Error::Overflow("exact norm accumulation"))?;
    }
    let scale = (p.j_count as i128)
        .checked_mul(term_den)
        .ok_or(Error::Overflow("exact norm scale"))?;
    let denom = scale
        .checked_mul(scale)
        .and_then(|s| s.checked_mul(p.m as i128))
        .ok_or(Error::Overflow("exact norm scale"))?;
    Ok(ExactValue {
        value: Rat::new(total, denom),
        edge_terms: edges,
    })
}

/// `(1/M) sum_n outer(n) (1/J) sum_j u_j(n)`, plus whether any term had the
/// outer indicator set together with every factor bit genuinely in its set.
fn weighted_inner_float(p: &Problem<'_>, outer: &BitWindow) -> (f64, u64, bool) {
    let chunks: Vec<u64> = (0..p.m.div_ceil(N_CHUNK)).collect();
    let partials: Vec<(f64, u64, bool)> = chunks
        .par_iter()
        .map(|&c| {
            let from = c * N_CHUNK + 1;
            let to = ((c + 1) * N_CHUNK).min(p.m);
            let mut acc = Compensated::new();
            let mut edges = 0u64;
            let mut any_hit = false;
            for n in from..=to {
                let outer_in = match outer.query(n as i128) {
                    Membership::In => true,
                    Membership::NotIn => false,
                    Membership::Outside => {
                        edges += 1;
                        false
                    }
                };
                if !outer_in {
                    continue;
                }
                let sn = p.sign * n as i128;
                let mut jsum = 0.0f64;
                for j in 0..p.j_count as usize {
                    if let Some(w) = &p.weights {
                        if !w[j] {
                            continue;
                        }
                    }
                    let mut prod = 1.0f64;
                    let mut all_in = true;
                    for f in &p.factors {
                        let arg = f.offsets[j] + sn;
                        let (v, e) = eval_factor(p.xi, f.indicator, arg);
                        edges += e as u64;
                        prod *= v;
                        all_in &= matches!(p.xi.window().query(arg), Membership::In);
                    }
                    any_hit |= all_in;
                    jsum += prod;
                }
                acc.add(jsum / p.j_count as f64);
            }
            (acc.total(), edges, any_hit)
        })
        .collect();
    let mut total = Compensated::new();
    let mut edges = 0u64;
    let mut any_hit = false;
    for (v, e, h) in partials {
        total.add(v);
        edges += e;
        any_hit |= h;
    }
    (total.total() / p.m as f64, edges, any_hit)
}

fn weighted_inner_exact(p: &Problem<'_>, outer: &BitWindow) -> Result<(ExactValue, bool)> {
    let den = p.xi.exact_denominator()?;
    let mut term_den: i128 = 1;
    for f in &p.factors {
        if !f.indicator {
            term_den = term_den
                .checked_mul(den)
                .ok_or(Error::Overflow("exact inner denominator"))?;
        }
    }
    let mut total: i128 = 0;
    let mut edges = 0u64;
    let mut any_hit = false;
    for n in 1..=p.m {
        let outer_in = match outer.query(n as i128) {
            Membership::In => true,
            Membership::NotIn => false,
            Membership::Outside => {
                edges += 1;
                false
            }
        };
        if !outer_in {
            continue;
        }
        let sn = p.sign * n as i128;
        for j in 0..p.j_count as usize {
            if let Some(w) = &p.weights {
                if !w[j] {
                    continue;
                }
            }
            let mut prod: i128 = 1;
            let mut all_in = true;
            for f in &p.factors {
                let arg = f.offsets[j] + sn;
                let (v, e) = eval_factor_exact(p.xi, f.indicator, arg);
                edges += e as u64;
                prod = prod
                    .checked_mul(v)
                    .ok_or(Error::Overflow("exact inner term"))?;
                all_in &= matches!(p.xi.window().query(arg), Membership::In);
            }
            any_hit |= all_in;
            total = total
                .checked_add(prod)
                .ok_or(Error::Overflow("exact inner sum"))?;
        }
    }
    let denom = (p.m as i128)
        .checked_mul(p.j_count as i128)
        .and_then(|v| v.checked_mul(term_den))
        .ok_or(Error::Overflow("exact inner scale"))?;
    Ok((
        ExactValue {
            value: Rat::new(total, denom),
            edge_terms: edges,
        },
        any_hit,
    ))
}

// --- precondition helpers -----------------------------------------------------

fn window_len(p: &Poly, n_base: u64, name: &str) -> Result<u64> {
    let v = p.eval_u64(n_base)?;
    if v < 1 {
        return Err(Error::DegreePrecondition(format!(
            "{name}(N) = {v} must be >= 1 at N = {n_base}"
        )));
    }
    Ok(v as u64)
}

fn offsets_for(p: &Poly, n_base: u64, j_count: u64) -> Result<Vec<i128>> {
    if j_count == 0 {
        return Err(Error::InvalidInput {
            what: "J",
            detail: "must be >= 1".into(),
        });
    }
    (1..=j_count).map(|j| p.eval_u64(n_base + j)).collect()
}

fn weight_bits(a: &WeightSeq, n_base: u64, j_count: u64) -> Result<Vec<bool>> {
    (1..=j_count).map(|j| a.get(n_base + j)).collect()
}

fn check_positive_leading(polys: &[Poly]) -> Result<()> {
    for p in polys {
        if p.degree() == 0 || p.leading_coeff() <= 0 {
            return Err(Error::DegreePrecondition(format!(
                "{p} must be non-constant with a positive leading coefficient"
            )));
        }
    }
    Ok(())
}

fn check_distinct(polys: &[Poly]) -> Result<()> {
    if polys.len() >= 2 {
        let family = PolyFamily::new(polys.to_vec())?;
        if !essentially_distinct(&family) {
            return Err(Error::NotEssentiallyDistinct);
        }
    }
    Ok(())
}

/// Backward-family conditions: same degree, p_1 eventually dominant.
fn check_backward_family(polys: &[Poly]) -> Result<()> {
    check_positive_leading(polys)?;
    check_distinct(polys)?;
    let d = polys[0].degree();
    for p in &polys[1..] {
        if p.degree() != d {
            return Err(Error::DegreePrecondition(
                "backward product norm needs one common degree".into(),
            ));
        }
        if polys[0].diff_leading_coeff(p) <= 0 {
            return Err(Error::DegreePrecondition(format!(
                "p_1 = {} must eventually dominate {}",
                polys[0], p
            )));
        }
    }
    Ok(())
}

/// Forward-family condition: the window polynomial grows faster than every
/// shift polynomial.
fn check_forward_window(polys: &[Poly], q: &Poly) -> Result<()> {
    if q.degree() == 0 || q.leading_coeff() <= 0 {
        return Err(Error::DegreePrecondition(format!(
            "window polynomial {q} must be non-constant with positive leading coefficient"
        )));
    }
    for p in polys {
        let ok = q.degree() > p.degree()
            || (q.degree() == p.degree() && q.leading_coeff() > p.leading_coeff());
        if !ok {
            return Err(Error::DegreePrecondition(format!(
                "window polynomial {q} must grow faster than {p}"
            )));
        }
    }
    Ok(())
}

// --- public operations ----------------------------------------------------------

/// `|| (1/J) sum_j xi(p(N+j) - n) ||_{p(N)}`.
pub fn backward_shift_norm(
    xi: &NormalizedSeq,
    p: &Poly,
    n_base: u64,
    j_count: u64,
) -> Result<NormResult> {
    let prob = backward_problem(xi, p, n_base, j_count)?;
    let (sq, edge_terms) = norm_sq_float(&prob);
    Ok(NormResult {
        value: sq.max(0.0).sqrt(),
        edge_terms,
    })
}

pub fn backward_shift_norm_sq_exact(
    xi: &NormalizedSeq,
    p: &Poly,
    n_base: u64,
    j_count: u64,
) -> Result<ExactValue> {
    norm_sq_exact(&backward_problem(xi, p, n_base, j_count)?)
}

fn backward_problem<'a>(
    xi: &'a NormalizedSeq,
    p: &Poly,
    n_base: u64,
    j_count: u64,
) -> Result<Problem<'a>> {
    let m = window_len(p, n_base, "p")?;
    Ok(Problem {
        xi,
        m,
        j_count,
        sign: -1,
        factors: vec![FactorSpec {
            indicator: false,
            offsets: offsets_for(p, n_base, j_count)?,
        }],
        weights: None,
    })
}

/// `|| (1/J) sum_j xi(n + q(N+j)) ||_{p(N)}` with deg q < deg p.
pub fn forward_shift_norm(
    xi: &NormalizedSeq,
    q: &Poly,
    p: &Poly,
    n_base: u64,
    j_count: u64,
) -> Result<NormResult> {
    let prob = forward_problem(xi, q, p, n_base, j_count)?;
    let (sq, edge_terms) = norm_sq_float(&prob);
    Ok(NormResult {
        value: sq.max(0.0).sqrt(),
        edge_terms,
    })
}

pub fn forward_shift_norm_sq_exact(
    xi: &NormalizedSeq,
    q: &Poly,
    p: &Poly,
    n_base: u64,
    j_count: u64,
) -> Result<ExactValue> {
    norm_sq_exact(&forward_problem(xi, q, p, n_base, j_count)?)
}

fn forward_problem<'a>(
    xi: &'a NormalizedSeq,
    q: &Poly,
    p: &Poly,
    n_base: u64,
    j_count: u64,
) -> Result<Problem<'a>> {
    check_positive_leading(std::slice::from_ref(q))?;
    check_positive_leading(std::slice::from_ref(p))?;
    if q.degree() >= p.degree() {
        return Err(Error::DegreePrecondition(format!(
            "forward shift norm needs deg({q}) < deg({p})"
        )));
    }
    let m = window_len(p, n_base, "p")?;
    Ok(Problem {
        xi,
        m,
        j_count,
        sign: 1,
        factors: vec![FactorSpec {
            indicator: false,
            offsets: offsets_for(q, n_base, j_count)?,
        }],
        weights: None,
    })
}

/// Weighted product norms. Forward (window `q(N)`, factors
/// `xi(n - p_i(N+j))`) needs `q`; backward (window `p_1(N)`, factors
/// `xi(p_i(N+j) - n)`) ignores it.
pub fn weighted_product_norm(
    xi: &NormalizedSeq,
    polys: &[Poly],
    a: &WeightSeq,
    q: Option<&Poly>,
    n_base: u64,
    j_count: u64,
    direction: Direction,
) -> Result<NormResult> {
    let prob = product_problem(xi, polys, a, q, n_base, j_count, direction)?;
    let (sq, edge_terms) = norm_sq_float(&prob);
    Ok(NormResult {
        value: sq.max(0.0).sqrt(),
        edge_terms,
    })
}

pub fn weighted_product_norm_sq_exact(
    xi: &NormalizedSeq,
    polys: &[Poly],
    a: &WeightSeq,
    q: Option<&Poly>,
    n_base: u64,
    j_count: u64,
    direction: Direction,
) -> Result<ExactValue> {
    norm_sq_exact(&product_problem(xi, polys, a, q, n_base, j_count, direction)?)
}

fn product_problem<'a>(
    xi: &'a NormalizedSeq,
    polys: &[Poly],
    a: &WeightSeq,
    q: Option<&Poly>,
    n_base: u64,
    j_count: u64,
    direction: Direction,
) -> Result<Problem<'a>> {
    if polys.is_empty() {
        return Err(Error::InvalidInput {
            what: "polynomial family",
            detail: "must be nonempty".into(),
        });
    }
    let weights = Some(weight_bits(a, n_base, j_count)?);
    match direction {
        Direction::Backward => {
            check_backward_family(polys)?;
            let m = window_len(&polys[0], n_base, "p_1")?;
            let factors = polys
                .iter()
                .map(|p| {
                    Ok(FactorSpec {
                        indicator: false,
                        offsets: offsets_for(p, n_base, j_count)?,
                    })
                })
                .collect::<Result<_>>()?;
            Ok(Problem {
                xi,
                m,
                j_count,
                sign: -1,
                factors,
                weights,
            })
        }
        Direction::Forward => {
            check_positive_leading(polys)?;
            check_distinct(polys)?;
            let q = q.ok_or(Error::InvalidInput {
                what: "window polynomial",
                detail: "forward direction needs q".into(),
            })?;
            check_forward_window(polys, q)?;
            let m = window_len(q, n_base, "q")?;
            let factors = polys
                .iter()
                .map(|p| {
                    Ok(FactorSpec {
                        indicator: false,
                        offsets: offsets_for(p, n_base, j_count)?
                            .into_iter()
                            .map(|v| -v)
                            .collect(),
                    })
                })
                .collect::<Result<_>>()?;
            Ok(Problem {
                xi,
                m,
                j_count,
                sign: 1,
                factors,
                weights,
            })
        }
    }
}

/// `<1_B, (1/J) sum_j xi(p(N+j) - n)>_{p(N)}` built from A and the supplied
/// density, plus the no-hit flag: no (j, b) had `p(N+j) - b` land in A.
pub fn theorem1_witness(
    a: &BitWindow,
    b: &BitWindow,
    p: &Poly,
    n_base: u64,
    j_count: u64,
    d: Density,
) -> Result<WitnessResult> {
    let (xi, m) = witness_setup(a, b, p, n_base, j_count, d)?;
    let prob = Problem {
        xi: &xi,
        m,
        j_count,
        sign: -1,
        factors: vec![FactorSpec {
            indicator: false,
            offsets: offsets_for(p, n_base, j_count)?,
        }],
        weights: None,
    };
    let (witness, edge_terms, any_hit) = weighted_inner_float(&prob, b);
    Ok(WitnessResult {
        witness,
        no_hit: !any_hit,
        edge_terms,
    })
}

pub fn theorem1_witness_exact(
    a: &BitWindow,
    b: &BitWindow,
    p: &Poly,
    n_base: u64,
    j_count: u64,
    d: Density,
) -> Result<(ExactValue, bool)> {
    let (xi, m) = witness_setup(a, b, p, n_base, j_count, d)?;
    let prob = Problem {
        xi: &xi,
        m,
        j_count,
        sign: -1,
        factors: vec![FactorSpec {
            indicator: false,
            offsets: offsets_for(p, n_base, j_count)?,
        }],
        weights: None,
    };
    let (value, any_hit) = weighted_inner_exact(&prob, b)?;
    Ok((value, !any_hit))
}

fn witness_setup(
    a: &BitWindow,
    b: &BitWindow,
    p: &Poly,
    n_base: u64,
    j_count: u64,
    d: Density,
) -> Result<(NormalizedSeq, u64)> {
    if j_count == 0 {
        return Err(Error::InvalidInput {
            what: "J",
            detail: "must be >= 1".into(),
        });
    }
    let m = window_len(p, n_base, "p")?;
    if b.lo() > 1 || (b.hi() as i128) <= m as i128 {
        return Err(Error::Coverage(format!(
            "B window [{}, {}) must cover [1, {m}]",
            b.lo(),
            b.hi()
        )));
    }
    let reach = p.eval_u64(n_base + j_count)?;
    if a.lo() > 1 || (a.hi() as i128) <= reach {
        return Err(Error::Coverage(format!(
            "A window [{}, {}) must cover [1, {reach}]",
            a.lo(),
            a.hi()
        )));
    }
    let xi = NormalizedSeq::new(a.clone(), d, DensitySource::Analytic)?;
    Ok((xi, m))
}

/// The indicator-weighted average whose last factor is normalized:
/// `(1/p_1(N)) sum_n (1/J) sum_j a_{N+j} 1_A(n) 1_A(p_1(N+j)-n) ...
///  1_A(p_{k-1}(N+j)-n) xi(p_k(N+j)-n)`.
pub fn b_nj(
    a: &BitWindow,
    weights: &WeightSeq,
    polys: &[Poly],
    n_base: u64,
    j_count: u64,
    d: Density,
) -> Result<super::CorrValue> {
    let (xi, prob_parts) = bnj_setup(a, weights, polys, n_base, j_count, d)?;
    let prob = Problem {
        xi: &xi,
        m: prob_parts.0,
        j_count,
        sign: -1,
        factors: prob_parts.1,
        weights: Some(prob_parts.2),
    };
    let (value, edge_terms, _) = weighted_inner_float(&prob, a);
    Ok(super::CorrValue { value, edge_terms })
}

pub fn b_nj_exact(
    a: &BitWindow,
    weights: &WeightSeq,
    polys: &[Poly],
    n_base: u64,
    j_count: u64,
    d: Density,
) -> Result<ExactValue> {
    let (xi, prob_parts) = bnj_setup(a, weights, polys, n_base, j_count, d)?;
    let prob = Problem {
        xi: &xi,
        m: prob_parts.0,
        j_count,
        sign: -1,
        factors: prob_parts.1,
        weights: Some(prob_parts.2),
    };
    let (value, _) = weighted_inner_exact(&prob, a)?;
    Ok(value)
}

#[allow(clippy::type_complexity)]
fn bnj_setup(
    a: &BitWindow,
    weights: &WeightSeq,
    polys: &[Poly],
    n_base: u64,
    j_count: u64,
    d: Density,
) -> Result<(NormalizedSeq, (u64, Vec<FactorSpec>, Vec<bool>))> {
    check_backward_family(polys)?;
    let m = window_len(&polys[0], n_base, "p_1")?;
    let reach = polys[0].eval_u64(n_base + j_count)?;
    if a.lo() > 1 || (a.hi() as i128) <= reach {
        return Err(Error::Coverage(format!(
            "A window [{}, {}) must cover [1, {reach}]",
            a.lo(),
            a.hi()
        )));
    }
    let w = weight_bits(weights, n_base, j_count)?;
    // indicators at p_1..p_{k-1}, the normalized factor at p_k
    let mut factors = Vec::with_capacity(polys.len());
    for (i, p) in polys.iter().enumerate() {
        factors.push(FactorSpec {
            indicator: i + 1 < polys.len(),
            offsets: offsets_for(p, n_base, j_count)?,
        });
    }
    let xi = NormalizedSeq::new(a.clone(), d, DensitySource::Analytic)?;
    Ok((xi, (m, factors, w)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqgen::{gen_bernoulli, gen_periodic, Density, DensitySource, NormalizedSeq};
    use std::collections::BTreeSet;

    fn p(coeffs: &[i64]) -> Poly {
        Poly::new(coeffs.to_vec())
    }

    fn evens_xi(hi: u64) -> NormalizedSeq {
        NormalizedSeq::new(
            gen_periodic(2, &BTreeSet::from([0]), 0, hi).unwrap(),
            Density::Rational { num: 1, den: 2 },
            DensitySource::Analytic,
        )
        .unwrap()
    }

    fn zero_xi(hi: u64) -> NormalizedSeq {
        NormalizedSeq::new(
            crate::bitwindow::BitWindow::empty(0, hi).unwrap(),
            Density::Rational { num: 0, den: 1 },
            DensitySource::Analytic,
        )
        .unwrap()
    }

    #[test]
    fn zero_sequence_gives_zero_norms() {
        let xi = zero_xi(100_000);
        let r = backward_shift_norm(&xi, &p(&[0, 0, 1]), 30, 10).unwrap();
        assert_eq!(r.value, 0.0);
        let r = forward_shift_norm(&xi, &p(&[0, 1]), &p(&[0, 0, 1]), 30, 10).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn evens_backward_parity_closed_form() {
        // p(n) = 2n keeps p(N+j) even, so xi(p(N+j) - n) depends only on n's
        // parity: the average is +-1/2 pointwise and the norm is exactly 1/2.
        let xi = evens_xi(20_000);
        for j_count in [1u64, 3, 10, 64] {
            let r = backward_shift_norm(&xi, &p(&[0, 2]), 500, j_count).unwrap();
            assert!((r.value - 0.5).abs() < 1e-12, "J={j_count} got {}", r.value);
            assert_eq!(r.edge_terms, 0);
        }
    }

    #[test]
    fn evens_forward_parity_closed_form() {
        // q(n) = 2n, p(n) = n^2: xi(n + 2(N+j)) again fixed by n's parity.
        let xi = evens_xi(20_000);
        for j_count in [2u64, 25, 100] {
            let r = forward_shift_norm(&xi, &p(&[0, 2]), &p(&[0, 0, 1]), 100, j_count).unwrap();
            assert!((r.value - 0.5).abs() < 1e-12, "J={j_count} got {}", r.value);
            assert!(r.value >= 0.4);
        }
    }

    #[test]
    fn forward_requires_smaller_degree() {
        let xi = evens_xi(1000);
        assert!(matches!(
            forward_shift_norm(&xi, &p(&[0, 0, 1]), &p(&[0, 1]), 10, 5),
            Err(Error::DegreePrecondition(_))
        ));
    }

    #[test]
    fn backward_rejects_nonpositive_window() {
        let xi = evens_xi(1000);
        assert!(matches!(
            backward_shift_norm(&xi, &p(&[-100, 1]), 5, 3),
            Err(Error::DegreePrecondition(_))
        ));
    }

    #[test]
    fn zero_weights_zero_value() {
        let xi = evens_xi(5_000);
        let a = WeightSeq::zeros(0, 200).unwrap();
        let r = weighted_product_norm(
            &xi,
            &[p(&[0, 2])],
            &a,
            None,
            20,
            15,
            Direction::Backward,
        )
        .unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.edge_terms, 0);
    }

    #[test]
    fn weighted_backward_k1_equals_backward_to_the_ulp() {
        let w = gen_bernoulli(0.4, 3, 0, 40_000).unwrap();
        let xi = NormalizedSeq::from_measured_prefix(w, 30_000).unwrap();
        let a = WeightSeq::ones(0, 500).unwrap();
        let poly = p(&[0, 1, 1]);
        let plain = backward_shift_norm(&xi, &poly, 150, 40).unwrap();
        let product =
            weighted_product_norm(&xi, &[poly], &a, None, 150, 40, Direction::Backward).unwrap();
        assert_eq!(plain.value.to_bits(), product.value.to_bits());
        assert_eq!(plain.edge_terms, product.edge_terms);
    }

    #[test]
    fn backward_family_preconditions() {
        let xi = evens_xi(1000);
        let a = WeightSeq::ones(0, 100).unwrap();
        // not essentially distinct
        assert!(matches!(
            weighted_product_norm(
                &xi,
                &[p(&[0, 0, 1]), p(&[5, 0, 1])],
                &a,
                None,
                5,
                5,
                Direction::Backward
            ),
            Err(Error::NotEssentiallyDistinct)
        ));
        // p_1 not dominant
        assert!(matches!(
            weighted_product_norm(
                &xi,
                &[p(&[0, 0, 1]), p(&[0, 1, 1])],
                &a,
                None,
                5,
                5,
                Direction::Backward
            ),
            Err(Error::DegreePrecondition(_))
        ));
        // mixed degrees
        assert!(matches!(
            weighted_product_norm(
                &xi,
                &[p(&[0, 0, 0, 1]), p(&[0, 1])],
                &a,
                None,
                5,
                5,
                Direction::Backward
            ),
            Err(Error::DegreePrecondition(_))
        ));
    }

    #[test]
    fn forward_window_growth_enforced() {
        let xi = evens_xi(1000);
        let a = WeightSeq::ones(0, 100).unwrap();
        assert!(matches!(
            weighted_product_norm(
                &xi,
                &[p(&[0, 0, 2])],
                &a,
                Some(&p(&[0, 0, 1])),
                5,
                5,
                Direction::Forward
            ),
            Err(Error::DegreePrecondition(_))
        ));
        assert!(weighted_product_norm(
            &xi,
            &[p(&[0, 0, 1])],
            &a,
            Some(&p(&[0, 0, 2])),
            5,
            5,
            Direction::Forward
        )
        .is_ok());
        assert!(matches!(
            weighted_product_norm(
                &xi,
                &[p(&[0, 0, 1])],
                &a,
                None,
                5,
                5,
                Direction::Forward
            ),
            Err(Error::InvalidInput { .. })
        ));
    }

    #[test]
    fn witness_empty_a() {
        let a = crate::bitwindow::BitWindow::empty(0, 100).unwrap();
        let b = crate::bitwindow::BitWindow::from_members(0, 100, [1u64, 2, 3]).unwrap();
        let r = theorem1_witness(
            &a,
            &b,
            &p(&[0, 1]),
            5,
            3,
            Density::Rational { num: 0, den: 1 },
        )
        .unwrap();
        assert_eq!(r.witness, 0.0);
        assert!(r.no_hit);
    }

    #[test]
    fn witness_tiny_brute_force_identity() {
        // A = {1}, B = {1}, p(n) = n, N = 3, J = 2
        let a = crate::bitwindow::BitWindow::from_members(0, 10, [1u64]).unwrap();
        let b = crate::bitwindow::BitWindow::from_members(0, 10, [1u64]).unwrap();
        let d = Density::Rational { num: 1, den: 3 }; // prefix density on [1,3]
        let (exact, no_hit) =
            theorem1_witness_exact(&a, &b, &p(&[0, 1]), 3, 2, d).unwrap();
        // offsets p(N+j) = 4, 5; only n = 1 is in B; args 3 and 4, neither
        // in A, so by hand: (1/3) * (1/2) * ((-1/3) + (-1/3)) = -1/9
        assert!(no_hit);
        assert_eq!(exact.value, Rat::new(-1, 9));
        // identity: -d |B cap [1, p(N)]| / p(N) = -(1/3)(1)/3
        assert_eq!(exact.value, -Rat::new(1, 3) / Rat::new(3, 1));
        assert_eq!(exact.edge_terms, 0);
    }

    #[test]
    fn witness_coverage_errors() {
        let a = crate::bitwindow::BitWindow::empty(0, 10).unwrap();
        let b = crate::bitwindow::BitWindow::empty(0, 10).unwrap();
        assert!(matches!(
            theorem1_witness(
                &a,
                &b,
                &p(&[0, 0, 1]),
                5,
                5,
                Density::Rational { num: 0, den: 1 }
            ),
            Err(Error::Coverage(_))
        ));
    }

    #[test]
    fn bnj_zero_weights() {
        let a = gen_bernoulli(0.5, 1, 0, 3000).unwrap();
        let weights = WeightSeq::zeros(0, 100).unwrap();
        let v = b_nj(
            &a,
            &weights,
            &[p(&[0, 1, 1]), p(&[0, 0, 1])],
            20,
            10,
            Density::Float(0.5),
        )
        .unwrap();
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn bnj_k1_matches_witness_on_a() {
        // with a == 1 and k = 1 the average collapses to the witness
        // inner product of A against itself
        let a = gen_bernoulli(0.5, 8, 0, 4000).unwrap();
        let weights = WeightSeq::ones(0, 100).unwrap();
        let d = Density::Rational { num: 1, den: 2 };
        let poly = p(&[0, 1, 1]);
        for (n_base, j_count) in [(10u64, 5u64), (30, 12), (50, 3)] {
            let via_bnj = b_nj_exact(&a, &weights, std::slice::from_ref(&poly), n_base, j_count, d).unwrap();
            let (via_witness, _) =
                theorem1_witness_exact(&a, &a, &poly, n_base, j_count, d).unwrap();
            assert_eq!(via_bnj.value, via_witness.value);
        }
    }
}
