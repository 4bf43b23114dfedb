//! Finite L2(N) inner products, cube averages, autocorrelations, the
//! averaged-shift norms, and the finitary van der Corput checker.
//!
//! The scalar product throughout is `<u,v>_N = (1/N) sum_{n=1..N} u(n)v(n)`.
//! Float mode uses block-compensated summation (plain vectorizable sums
//! inside fixed blocks, Neumaier across blocks, fixed block order) so
//! results are deterministic and independent of thread count. Exact mode
//! accumulates integer numerators over a common denominator and reduces to
//! a rational at the end.

mod shifts;
mod vdc;

pub use shifts::{
    b_nj, b_nj_exact, backward_shift_norm, backward_shift_norm_sq_exact, forward_shift_norm,
    forward_shift_norm_sq_exact, theorem1_witness, theorem1_witness_exact, weighted_product_norm,
    weighted_product_norm_sq_exact, Direction, ExactValue, NormResult, WitnessResult,
};
pub use vdc::{vdc_check, VdcReport};

use crate::bitwindow::BitWindow;
use crate::error::{Error, Result};
use crate::seqgen::NormalizedSeq;
use crate::Rat;

/// Neumaier-compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

pub(crate) const SUM_BLOCK: usize = 1024;

/// Plain sums inside fixed blocks, compensated across blocks.
pub fn compensated_sum(values: &[f64]) -> f64 {
    let mut acc = Compensated::new();
    for block in values.chunks(SUM_BLOCK) {
        acc.add(block.iter().sum());
    }
    acc.total()
}

fn compensated_dot_raw(u: &[f64], v: &[f64]) -> f64 {
    let mut acc = Compensated::new();
    let mut i = 0;
    while i < u.len() {
        let end = (i + SUM_BLOCK).min(u.len());
        let mut block = 0.0;
        for k in i..end {
            block += u[k] * v[k];
        }
        acc.add(block);
        i = end;
    }
    acc.total()
}

/// Element of L2(N): values indexed n = 1..=N.
#[derive(Clone, Debug, PartialEq)]
pub struct VecN {
    values: Vec<f64>,
}

impl VecN {
    pub fn new(values: Vec<f64>) -> Result<VecN> {
        if values.is_empty() {
            return Err(Error::InvalidInput {
                what: "VecN",
                detail: "needs N >= 1".into(),
            });
        }
        Ok(VecN { values })
    }

    #[allow(clippy::len_without_is_empty)] // N >= 1 is a construction invariant
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Samples xi over n = base+1 ..= base+n_len.
    pub fn from_xi(xi: &NormalizedSeq, base: u64, n_len: u64) -> Result<VecN> {
        if n_len == 0 {
            return Err(Error::InvalidInput {
                what: "VecN",
                detail: "needs N >= 1".into(),
            });
        }
        Ok(VecN {
            values: (1..=n_len)
                .map(|n| xi.xi((base + n) as i128))
                .collect(),
        })
    }
}

/// `<u,v>_N = (1/N) sum u(n)v(n)`.
pub fn inner(u: &VecN, v: &VecN) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    Ok(compensated_dot_raw(&u.values, &v.values) / u.len() as f64)
}

pub fn norm(u: &VecN) -> Result<f64> {
    Ok(inner(u, u)?.max(0.0).sqrt())
}

/// Weight sequence over an index range: values in {0,1}. Lookups outside
/// the range are an error (weights have no zero-extension convention).
#[derive(Clone, Debug)]
pub struct WeightSeq {
    bits: BitWindow,
}

impl WeightSeq {
    pub fn ones(lo: u64, hi: u64) -> Result<WeightSeq> {
        Ok(WeightSeq {
            bits: BitWindow::full(lo, hi)?,
        })
    }

    pub fn zeros(lo: u64, hi: u64) -> Result<WeightSeq> {
        Ok(WeightSeq {
            bits: BitWindow::empty(lo, hi)?,
        })
    }

    pub fn from_window(bits: BitWindow) -> WeightSeq {
        WeightSeq { bits }
    }

    pub fn window(&self) -> &BitWindow {
        &self.bits
    }

    pub fn get(&self, n: u64) -> Result<bool> {
        self.bits.contains(n)
    }
}

/// Carries a float value plus the count of zero-extended evaluations that
/// fell outside the sequence window (the finite boundary terms).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrValue {
    pub value: f64,
    pub edge_terms: u64,
}

const MAX_CUBE_DIM: usize = 16;

fn cube_shifts(h: &[u64]) -> Result<Vec<i128>> {
    if h.len() > MAX_CUBE_DIM {
        return Err(Error::InvalidInput {
            what: "cube dimension",
            detail: format!("k = {} exceeds {MAX_CUBE_DIM}", h.len()),
        });
    }
    let mut shifts = Vec::with_capacity(1 << h.len());
    for mask in 0u32..(1 << h.len()) {
        let mut s: i128 = 0;
        for (i, &hi) in h.iter().enumerate() {
            if mask >> i & 1 == 1 {
                s += hi as i128;
            }
        }
        shifts.push(s);
    }
    Ok(shifts)
}

/// Finite cube average `(1/N) sum_n prod_{eps in {0,1}^k} xi(n + eps . h)`.
/// k = 0 is the plain mean of xi over [1, N]; k = 1 is the autocorrelation
/// at lag h_1.
pub fn cube_average(xi: &NormalizedSeq, h: &[u64], n_len: u64) -> Result<CorrValue> {
    if n_len == 0 {
        return Err(Error::InvalidInput {
            what: "N",
            detail: "must be >= 1".into(),
        });
    }
    let shifts = cube_shifts(h)?;
    let mut acc = Compensated::new();
    let mut edges = 0u64;
    let mut block = 0.0f64;
    for n in 1..=n_len as i128 {
        let mut prod = 1.0f64;
        // every factor is evaluated so the edge accounting stays complete
        for &s in &shifts {
            let (v, e) = xi.xi_with_edge(n + s);
            edges += e as u64;
            prod *= v;
        }
        block += prod;
        if n % SUM_BLOCK as i128 == 0 {
            acc.add(block);
            block = 0.0;
        }
    }
    acc.add(block);
    Ok(CorrValue {
        value: acc.total() / n_len as f64,
        edge_terms: edges,
    })
}

/// Exact-mode cube average (requires a rational density).
pub fn cube_average_exact(xi: &NormalizedSeq, h: &[u64], n_len: u64) -> Result<(Rat, u64)> {
    if n_len == 0 {
        return Err(Error::InvalidInput {
            what: "N",
            detail: "must be >= 1".into(),
        });
    }
    let den = xi.exact_denominator()?;
    let shifts = cube_shifts(h)?;
    let mut term_den: i128 = 1;
    for _ in &shifts {
        term_den = term_den
            .checked_mul(den)
            .ok_or(Error::Overflow("cube average denominator"))?;
    }
    let mut total: i128 = 0;
    let mut edges = 0u64;
    for n in 1..=n_len as i128 {
        let mut prod: i128 = 1;
        for &s in &shifts {
            let (v, e) = xi.xi_numer(n + s);
            edges += e as u64;
            prod = prod
                .checked_mul(v)
                .ok_or(Error::Overflow("cube average term"))?;
        }
        total = total
            .checked_add(prod)
            .ok_or(Error::Overflow("cube average sum"))?;
    }
    let denom = term_den
        .checked_mul(n_len as i128)
        .ok_or(Error::Overflow("cube average denominator"))?;
    Ok((Rat::new(total, denom), edges))
}

/// Cesàro average of absolute autocorrelations:
/// `(1/H) sum_{h=1..H} |(1/N) sum_n xi(n) xi(n+h)|`.
/// The working mixing-vs-rigidity discriminator.
pub fn autocorr_cesaro(xi: &NormalizedSeq, n_len: u64, h_max: u64) -> Result<CorrValue> {
    if h_max == 0 {
        return Err(Error::InvalidInput {
            what: "H",
            detail: "must be >= 1".into(),
        });
    }
    let mut acc = Compensated::new();
    let mut edges = 0u64;
    for h in 1..=h_max {
        let c = cube_average(xi, &[h], n_len)?;
        acc.add(c.value.abs());
        edges += c.edge_terms;
    }
    Ok(CorrValue {
        value: acc.total() / h_max as f64,
        edge_terms: edges,
    })
}
