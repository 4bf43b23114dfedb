//! Density, sliding-window (finite Banach) density, and gap statistics.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::bitwindow::BitWindow;
use crate::error::{Error, Result};

/// Exact rational count ratio, kept unreduced as hits/length.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CountRatio {
    pub num: u64,
    pub den: u64,
}

impl CountRatio {
    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// |S cap [1, N]| / N as an exact ratio. The window must reach N; if the
/// window starts above 1 the count necessarily runs from its lo (documented
/// truncation, still divided by N).
pub fn prefix_density(s: &BitWindow, n: u64) -> Result<CountRatio> {
    if n == 0 || n >= s.hi() {
        return Err(Error::OutOfWindow {
            n: n as i128,
            lo: s.lo(),
            hi: s.hi(),
        });
    }
    let start = s.lo().max(1);
    let num = if start > n { 0 } else { s.count_in(start, n + 1)? };
    Ok(CountRatio { num, den: n })
}

/// Minimum density over every length-L sub-window, by one sliding popcount
/// pass over the whole window.
pub fn banach_lower_density(s: &BitWindow, l: u64) -> Result<CountRatio> {
    if l == 0 {
        return Err(Error::InvalidInput {
            what: "window length L",
            detail: "must be >= 1".into(),
        });
    }
    if l > s.len() {
        return Err(Error::InvalidInput {
            what: "window length L",
            detail: format!("{l} exceeds window length {}", s.len()),
        });
    }
    let lo = s.lo();
    let mut count = s.count_in(lo, lo + l)?;
    let mut min = count;
    for a in lo + 1..=s.hi() - l {
        // slide: drop a-1, take a+l-1
        count -= s.contains(a - 1)? as u64;
        count += s.contains(a + l - 1)? as u64;
        if count < min {
            min = count;
            if min == 0 {
                break;
            }
        }
    }
    Ok(CountRatio { num: min, den: l })
}

#[derive(Clone, Debug, Serialize)]
pub struct GapStats {
    pub max_gap: u64,
    pub mean_gap: f64,
    /// gap value -> number of occurrences
    pub histogram: BTreeMap<u64, u64>,
}

/// Differences of consecutive members. Errors on an empty set; a singleton
/// has no gaps (max_gap 0, empty histogram).
pub fn gap_stats(s: &BitWindow) -> Result<GapStats> {
    let mut members = s.members();
    let Some(first) = members.next() else {
        return Err(Error::InvalidInput {
            what: "gap statistics",
            detail: "set is empty".into(),
        });
    };
    let mut histogram = BTreeMap::new();
    let mut max_gap = 0u64;
    let mut total = 0u64;
    let mut count = 0u64;
    let mut prev = first;
    for m in members {
        let gap = m - prev;
        *histogram.entry(gap).or_insert(0) += 1;
        max_gap = max_gap.max(gap);
        total += gap;
        count += 1;
        prev = m;
    }
    Ok(GapStats {
        max_gap,
        mean_gap: if count == 0 {
            0.0
        } else {
            total as f64 / count as f64
        },
        histogram,
    })
}

/// The combined per-window record the CLI emits.
#[derive(Clone, Debug, Serialize)]
pub struct DensityStats {
    pub prefix_density: CountRatio,
    pub window_min_density: CountRatio,
    pub window_len: u64,
    pub max_gap: u64,
    pub mean_gap: f64,
}

pub fn density_stats(s: &BitWindow, prefix_n: u64, l: u64) -> Result<DensityStats> {
    let gaps = gap_stats(s)?;
    Ok(DensityStats {
        prefix_density: prefix_density(s, prefix_n)?,
        window_min_density: banach_lower_density(s, l)?,
        window_len: l,
        max_gap: gaps.max_gap,
        mean_gap: gaps.mean_gap,
    })
}
