//! High-throughput bit-window set algebra: sumsets, the polynomial
//! intersection sets, and the degree-gap counterexample constructor.
//!
//! Each word-parallel kernel has a scalar reference implementation next to
//! it; the oracle suite holds them equal bit for bit.

use rayon::prelude::*;

use crate::bitwindow::{BitWindow, Membership};
use crate::error::{Error, Result};
use crate::poly::{essentially_distinct, Poly, PolyFamily};

/// How to treat windows that do not cover the full argument range.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coverage {
    /// Coverage shortfalls are an error up front.
    Strict,
    /// Out-of-window arguments count as absent; the hit set records that
    /// truncation was touched.
    Truncate,
}

/// Scan result: which n hit, plus witnesses for audit.
#[derive(Clone, Debug)]
pub struct HitSet {
    /// Bit n set iff n is a hit; window [1, nmax+1).
    pub hits: BitWindow,
    /// (n, b) samples, one witness per recorded hit, capped.
    pub witnesses: Vec<(u64, u64)>,
    /// Number of n whose scan touched arguments beyond a window edge.
    pub edge_n: u64,
    pub truncated: bool,
}

impl HitSet {
    /// JSON sidecar accompanying the BW1 dump of `hits`.
    pub fn sidecar(&self, window_l: u64) -> serde_json::Value {
        let nmax = self.hits.hi() - 1;
        let hit_count = self.hits.count_ones();
        let l = window_l.clamp(1, self.hits.len());
        let (max_gap, min_density) = if hit_count > 0 {
            let gaps = crate::stats::gap_stats(&self.hits).expect("nonempty");
            let d = crate::stats::banach_lower_density(&self.hits, l).expect("valid L");
            (
                serde_json::json!(gaps.max_gap),
                serde_json::json!({ "num": d.num, "den": d.den }),
            )
        } else {
            (serde_json::Value::Null, serde_json::json!({ "num": 0, "den": l }))
        };
        serde_json::json!({
            "nmax": nmax,
            "hit_count": hit_count,
            "max_gap": max_gap,
            "window_min_density_at_L": min_density,
            "L": l,
            "edge_n": self.edge_n,
            "truncated": self.truncated,
        })
    }

    /// Writes `<path>` as BW1 and `<path>.json` as the sidecar.
    pub fn write_files(&self, path: &std::path::Path, window_l: u64) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.hits.encode_to(&mut f)?;
        std::io::Write::flush(&mut f)?;
        let sidecar_path = path.with_extension(
            path.extension()
                .map(|e| format!("{}.json", e.to_string_lossy()))
                .unwrap_or_else(|| "json".into()),
        );
        std::fs::write(
            sidecar_path,
            serde_json::to_string_pretty(&self.sidecar(window_l)).expect("serializes"),
        )?;
        Ok(())
    }
}

const WITNESS_CAP: usize = 1 << 16;
const SCAN_CHUNK: u64 = 256;

// --- sumset -----------------------------------------------------------------

/// A + B restricted to [lo, hi), by word-level shift-OR of A over each
/// member of B.
pub fn sumset(a: &BitWindow, b: &BitWindow, lo: u64, hi: u64) -> Result<BitWindow> {
    let max_sum = (a.hi() as u128 - 1) + (b.hi() as u128 - 1);
    if max_sum >= 1u128 << 63 {
        return Err(Error::Overflow("sumset position beyond 2^63"));
    }
    let mut out = BitWindow::empty(lo, hi)?;
    for bv in b.members() {
        if bv >= hi {
            break; // members ascend; a + bv >= bv >= hi
        }
        out.or_shifted(a, bv);
    }
    Ok(out)
}

/// Scalar reference for [`sumset`].
pub fn sumset_scalar(a: &BitWindow, b: &BitWindow, lo: u64, hi: u64) -> Result<BitWindow> {
    let max_sum = (a.hi() as u128 - 1) + (b.hi() as u128 - 1);
    if max_sum >= 1u128 << 63 {
        return Err(Error::Overflow("sumset position beyond 2^63"));
    }
    let mut out = BitWindow::empty(lo, hi)?;
    for av in a.members() {
        for bv in b.members() {
            let m = av + bv;
            if m >= lo && m < hi {
                out.set(m).expect("in window");
            }
        }
    }
    Ok(out)
}

// --- R_p and R_{p_1..p_k} ----------------------------------------------------

fn check_coverage(
    win: &BitWindow,
    need_hi_inclusive: i128,
    name: &str,
    coverage: Coverage,
) -> Result<bool> {
    let covered = win.lo() == 0 && (win.hi() as i128) > need_hi_inclusive;
    if !covered && coverage == Coverage::Strict {
        return Err(Error::Coverage(format!(
            "{name} window [{}, {}) must cover [0, {need_hi_inclusive}]",
            win.lo(),
            win.hi()
        )));
    }
    Ok(covered)
}

struct ChunkResult {
    hits: Vec<u64>,
    witnesses: Vec<(u64, u64)>,
    edge_n: u64,
}

/// Shared scan: n is a hit iff some b in B has p_i(n) - b in A for every i.
/// Offsets are tested word-parallel: one B word AND the reverse-extracted
/// A chunks at each offset, O(words of B) per n with early exit.
fn scan_hits(
    a: &BitWindow,
    b: &BitWindow,
    polys: &[Poly],
    nmax: u64,
    coverage: Coverage,
) -> Result<HitSet> {
    if nmax == 0 {
        return Err(Error::InvalidInput {
            what: "nmax",
            detail: "must be >= 1".into(),
        });
    }
    let mut need: i128 = 0;
    for p in polys {
        need = need.max(p.eval_u64(nmax)?);
    }
    let a_covered = check_coverage(a, need, "A", coverage)?;
    let b_covered = check_coverage(b, need, "B", coverage)?;

    let chunks: Vec<u64> = (0..nmax.div_ceil(SCAN_CHUNK)).collect();
    let results: Vec<ChunkResult> = chunks
        .par_iter()
        .map(|&c| {
            let from = c * SCAN_CHUNK + 1;
            let to = ((c + 1) * SCAN_CHUNK).min(nmax);
            scan_chunk(a, b, polys, from, to)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut hits = BitWindow::empty(1, nmax + 1)?;
    let mut witnesses = Vec::new();
    let mut edge_n = 0u64;
    for r in results {
        for n in r.hits {
            hits.set(n).expect("in window");
        }
        if witnesses.len() < WITNESS_CAP {
            witnesses.extend(r.witnesses);
        }
        edge_n += r.edge_n;
    }
    witnesses.truncate(WITNESS_CAP);
    Ok(HitSet {
        hits,
        witnesses,
        edge_n,
        truncated: !(a_covered && b_covered) || edge_n > 0,
    })
}

fn scan_chunk(
    a: &BitWindow,
    b: &BitWindow,
    polys: &[Poly],
    from: u64,
    to: u64,
) -> Result<ChunkResult> {
    let mut out = ChunkResult {
        hits: Vec::new(),
        witnesses: Vec::new(),
        edge_n: 0,
    };
    let mut offsets = vec![0i128; polys.len()];
    for n in from..=to {
        let mut t_min = i128::MAX;
        let mut negative = false;
        for (o, p) in offsets.iter_mut().zip(polys) {
            *o = p.eval_u64(n)?;
            if *o < 0 {
                negative = true;
            }
            t_min = t_min.min(*o);
        }
        if negative {
            continue; // a value below 0 cannot land in A + b
        }
        // candidate b in B cap [0, t_min]; larger b would push some
        // p_i(n) - b below 0
        let b_lo = b.lo() as i128;
        let b_hi_inc = (b.hi() as i128 - 1).min(t_min);
        // edge accounting: candidates b below B's window, or arguments
        // p_i(n) - b above A's window, were truncated away
        let mut edge = b.lo() > 0 && t_min >= 0;
        for &t in offsets.iter() {
            if t - b_lo >= a.hi() as i128 {
                edge = true;
            }
        }
        if t_min >= b.hi() as i128 {
            edge = true;
        }
        if edge {
            out.edge_n += 1;
        }
        if b_hi_inc < b_lo {
            continue;
        }
        let rel_hi = (b_hi_inc - b_lo) as u64;
        let last_word = (rel_hi / 64) as usize;
        'words: for w in 0..=last_word {
            let base = b_lo + (w as i128) * 64;
            let mut chunk = b.extract64(base);
            if w == last_word {
                let keep = (rel_hi % 64) as u32;
                chunk &= if keep == 63 {
                    u64::MAX
                } else {
                    (1u64 << (keep + 1)) - 1
                };
            }
            if chunk == 0 {
                continue;
            }
            for &t in offsets.iter() {
                chunk &= a.extract64_rev(t - base);
                if chunk == 0 {
                    continue 'words;
                }
            }
            let j = chunk.trailing_zeros() as i128;
            out.hits.push(n);
            out.witnesses.push((n, (base + j) as u64));
            break;
        }
    }
    Ok(out)
}

/// R_p = { n in [1, nmax] : p(n) in A + B }.
pub fn r_p(
    a: &BitWindow,
    b: &BitWindow,
    p: &Poly,
    nmax: u64,
    coverage: Coverage,
) -> Result<HitSet> {
    if p.degree() == 0 || p.leading_coeff() <= 0 {
        return Err(Error::DegreePrecondition(format!(
            "r_p needs a non-constant polynomial with positive leading coefficient, got {p}"
        )));
    }
    scan_hits(a, b, std::slice::from_ref(p), nmax, coverage)
}

/// Scalar reference for [`r_p`] (hit bits only).
pub fn r_p_scalar(a: &BitWindow, b: &BitWindow, p: &Poly, nmax: u64) -> Result<BitWindow> {
    r_multi_scalar(a, b, std::slice::from_ref(p), nmax)
}

fn validate_multi(polys: &[Poly], require_equal_degree: bool) -> Result<()> {
    if polys.is_empty() {
        return Err(Error::InvalidInput {
            what: "polynomial family",
            detail: "must be nonempty".into(),
        });
    }
    for p in polys {
        if p.degree() == 0 || p.leading_coeff() <= 0 {
            return Err(Error::DegreePrecondition(format!(
                "each polynomial must be non-constant with positive leading coefficient, got {p}"
            )));
        }
    }
    if polys.len() >= 2 {
        let family = PolyFamily::new(polys.to_vec())?;
        if !essentially_distinct(&family) {
            return Err(Error::NotEssentiallyDistinct);
        }
        if require_equal_degree {
            let d = polys[0].degree();
            if polys.iter().any(|p| p.degree() != d) {
                return Err(Error::DegreePrecondition(
                    "polynomials must share one degree".into(),
                ));
            }
        }
    }
    Ok(())
}

/// R_{p_1..p_k} = { n : exists b in B with every p_i(n) in A + b }.
/// Enforces the same-degree hypothesis; k = 1 coincides with [`r_p`].
pub fn r_multi(
    a: &BitWindow,
    b: &BitWindow,
    polys: &[Poly],
    nmax: u64,
    coverage: Coverage,
) -> Result<HitSet> {
    validate_multi(polys, true)?;
    scan_hits(a, b, polys, nmax, coverage)
}

/// [`r_multi`] without the same-degree check, for the counterexample
/// construction where the degrees differ on purpose.
pub fn r_multi_mixed_degree(
    a: &BitWindow,
    b: &BitWindow,
    polys: &[Poly],
    nmax: u64,
    coverage: Coverage,
) -> Result<HitSet> {
    validate_multi(polys, false)?;
    scan_hits(a, b, polys, nmax, coverage)
}

/// Scalar reference for the multi-polynomial scan.
pub fn r_multi_scalar(
    a: &BitWindow,
    b: &BitWindow,
    polys: &[Poly],
    nmax: u64,
) -> Result<BitWindow> {
    let mut hits = BitWindow::empty(1, nmax + 1)?;
    for n in 1..=nmax {
        let values: Vec<i128> = polys
            .iter()
            .map(|p| p.eval_u64(n))
            .collect::<Result<_>>()?;
        if values.iter().any(|&v| v < 0) {
            continue;
        }
        'b_loop: for bv in b.members() {
            for &v in &values {
                if matches!(a.query(v - bv as i128), Membership::In) {
                    continue;
                }
                continue 'b_loop;
            }
            hits.set(n).expect("in window");
            break;
        }
    }
    Ok(hits)
}

// --- counterexample construction ---------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RemovalStats {
    pub intervals: u64,
    pub cleared_positions: u64,
    pub removed_members: u64,
}

/// A with every interval [p_hi(n) - p_lo(n), p_hi(n)] cleared, for every n
/// whose interval meets the window (clamped at the edges). Requires the
/// degrees to differ by at least two.
pub fn remove_counterexample(
    a: &BitWindow,
    p_lo: &Poly,
    p_hi: &Poly,
) -> Result<(BitWindow, RemovalStats)> {
    if p_lo.leading_coeff() <= 0 || p_hi.leading_coeff() <= 0 {
        return Err(Error::DegreePrecondition(
            "both polynomials need positive leading coefficients".into(),
        ));
    }
    if p_lo.degree() + 2 > p_hi.degree() {
        return Err(Error::DegreePrecondition(format!(
            "need deg({p_lo}) <= deg({p_hi}) - 2"
        )));
    }
    // interval start as a polynomial; its leading coefficient is p_hi's
    let gap_coeffs: Vec<i64> = (0..=p_hi.degree())
        .map(|i| {
            let h = p_hi.coeffs().get(i).copied().unwrap_or(0);
            let l = p_lo.coeffs().get(i).copied().unwrap_or(0);
            h.checked_sub(l).ok_or(Error::Overflow("interval polynomial"))
        })
        .collect::<Result<_>>()?;
    let gap_poly = Poly::new(gap_coeffs);
    let settle = p_hi.monotone_from()?.max(gap_poly.monotone_from()?);

    let mut mask = BitWindow::empty(a.lo(), a.hi())?;
    let mut intervals = 0u64;
    let mut n: u64 = 0;
    loop {
        let hi_v = p_hi.eval_u64(n)?;
        let lo_v = gap_poly.eval_u64(n)?;
        if lo_v < a.hi() as i128 && hi_v >= a.lo() as i128 {
            mask.set_range_inclusive(lo_v, hi_v);
            intervals += 1;
        }
        if n >= settle && lo_v >= a.hi() as i128 {
            break;
        }
        n += 1;
    }
    let cleared_positions = mask.count_ones();
    let removed_members = a.intersect(&mask)?.count_ones();
    let pruned = a.difference(&mask)?;
    Ok((
        pruned,
        RemovalStats {
            intervals,
            cleared_positions,
            removed_members,
        },
    ))
}

/// Scalar reference for the interval-clearing (membership predicate form).
pub fn remove_counterexample_scalar(
    a: &BitWindow,
    p_lo: &Poly,
    p_hi: &Poly,
) -> Result<BitWindow> {
    let mut out = a.clone();
    let mut n: u64 = 0;
    let settle = p_hi.monotone_from()?.max(
        Poly::new(
            (0..=p_hi.degree())
                .map(|i| {
                    p_hi.coeffs().get(i).copied().unwrap_or(0)
                        - p_lo.coeffs().get(i).copied().unwrap_or(0)
                })
                .collect(),
        )
        .monotone_from()?,
    );
    loop {
        let hi_v = p_hi.eval_u64(n)?;
        let lo_v = hi_v - p_lo.eval_u64(n)?;
        for m in a.lo()..a.hi() {
            if (m as i128) >= lo_v && (m as i128) <= hi_v {
                out.unset(m).expect("in window");
            }
        }
        if n >= settle && lo_v >= a.hi() as i128 {
            break;
        }
        n += 1;
    }
    Ok(out)
}
