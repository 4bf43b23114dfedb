//! Named, reproducible experiments. Each one wires generators, set
//! arithmetic and statistics into a single pass/fail report with every
//! threshold echoed back in the parameter block.

use std::collections::BTreeMap;
use std::time::Instant;

use serde_json::{json, Value};

use crate::bitwindow::BitWindow;
use crate::corr::{vdc_check, VecN};
use crate::error::{Error, Result};
use crate::poly::{residue_obstruction, Poly};
use crate::report::ExperimentReport;
use crate::rng;
use crate::seqgen::GeneratorSpec;
use crate::setops::{r_multi, r_multi_mixed_degree, r_p, remove_counterexample, Coverage, HitSet};
use crate::stats::{banach_lower_density, gap_stats};

fn finish(
    experiment: &str,
    params: BTreeMap<String, Value>,
    metrics: BTreeMap<String, Value>,
    pass: bool,
    started: Instant,
    mode: &str,
) -> ExperimentReport {
    ExperimentReport {
        experiment: experiment.into(),
        params,
        metrics,
        pass,
        runtime_ms: started.elapsed().as_millis() as u64,
        mode: mode.into(),
    }
}

// --- residue obstruction -----------------------------------------------------

#[derive(Clone, Debug)]
pub struct ObstructionCfg {
    pub poly: Poly,
    pub prime: u64,
}

/// Finds the mod-q image of the value set; passes iff the projection is
/// not surjective (an obstruction exists).
pub fn run_obstruction(cfg: &ObstructionCfg) -> Result<ExperimentReport> {
    let started = Instant::now();
    let rep = residue_obstruction(&cfg.poly, cfg.prime)?;
    let params = BTreeMap::from([
        ("poly".into(), json!(cfg.poly.to_string())),
        ("prime".into(), json!(cfg.prime)),
    ]);
    let metrics = BTreeMap::from([
        ("image".into(), json!(rep.image)),
        ("image_size".into(), json!(rep.image.len())),
        ("surjective".into(), json!(rep.surjective)),
        ("pair".into(), json!(rep.pair)),
    ]);
    let pass = !rep.surjective;
    Ok(finish("obstruction", params, metrics, pass, started, "exact"))
}

// --- hit-set experiments -----------------------------------------------------

fn eval_slice(hits: &HitSet, eval_lo: u64, nmax: u64) -> Result<BitWindow> {
    hits.hits.slice(eval_lo, nmax + 1)
}

fn hit_metrics(hits: &HitSet, eval: &BitWindow) -> BTreeMap<String, Value> {
    BTreeMap::from([
        ("hit_count".into(), json!(hits.hits.count_ones())),
        ("eval_hit_count".into(), json!(eval.count_ones())),
        ("eval_len".into(), json!(eval.len())),
        ("edge_n".into(), json!(hits.edge_n)),
        ("truncated".into(), json!(hits.truncated)),
        ("witness_samples".into(), json!(hits.witnesses.len())),
    ])
}

#[derive(Clone, Debug)]
pub struct Theorem1Cfg {
    pub a: GeneratorSpec,
    pub b: GeneratorSpec,
    pub poly: Poly,
    pub nmax: u64,
    /// gap statistics run on [eval_lo, nmax]
    pub eval_lo: u64,
    pub max_gap: u64,
}

/// Syndeticity experiment: R_p nonempty with bounded gaps on the
/// evaluation range.
pub fn run_theorem1(cfg: &Theorem1Cfg) -> Result<(ExperimentReport, HitSet)> {
    let started = Instant::now();
    let need = cfg.poly.eval_u64(cfg.nmax)?;
    if need < 1 {
        return Err(Error::DegreePrecondition(format!(
            "p(nmax) = {need} must be positive"
        )));
    }
    let window_hi = need as u64 + 1;
    let a = cfg.a.generate(0, window_hi)?;
    let b = cfg.b.generate(0, window_hi)?;
    let hits = r_p(&a, &b, &cfg.poly, cfg.nmax, Coverage::Strict)?;
    let eval = eval_slice(&hits, cfg.eval_lo, cfg.nmax)?;

    let mut metrics = hit_metrics(&hits, &eval);
    let nonempty = hits.hits.count_ones() > 0;
    let pass = if eval.count_ones() == 0 {
        metrics.insert("max_gap".into(), Value::Null);
        false
    } else {
        let gaps = gap_stats(&eval)?;
        metrics.insert("max_gap".into(), json!(gaps.max_gap));
        metrics.insert("mean_gap".into(), json!(gaps.mean_gap));
        nonempty && gaps.max_gap <= cfg.max_gap
    };

    let params = BTreeMap::from([
        ("A".into(), json!(cfg.a.to_string())),
        ("B".into(), json!(cfg.b.to_string())),
        ("poly".into(), json!(cfg.poly.to_string())),
        ("nmax".into(), json!(cfg.nmax)),
        ("eval_lo".into(), json!(cfg.eval_lo)),
        ("max_gap_threshold".into(), json!(cfg.max_gap)),
        ("window_hi".into(), json!(window_hi)),
    ]);
    Ok((finish("theorem1", params, metrics, pass, started, "exact"), hits))
}

#[derive(Clone, Debug)]
pub struct Theorem2Cfg {
    pub a: GeneratorSpec,
    pub b: GeneratorSpec,
    pub poly: Poly,
    pub nmax: u64,
    pub eval_lo: u64,
    pub min_frac: f64,
    pub banach_l: u64,
    pub min_banach: f64,
}

/// Density-one experiment: hit fraction and minimum sliding-window density
/// of R_p over the evaluation range.
pub fn run_theorem2(cfg: &Theorem2Cfg) -> Result<(ExperimentReport, HitSet)> {
    let started = Instant::now();
    let need = cfg.poly.eval_u64(cfg.nmax)?;
    let window_hi = need as u64 + 1;
    let a = cfg.a.generate(0, window_hi)?;
    let b = cfg.b.generate(0, window_hi)?;
    let hits = r_p(&a, &b, &cfg.poly, cfg.nmax, Coverage::Strict)?;
    let eval = eval_slice(&hits, cfg.eval_lo, cfg.nmax)?;

    let frac = eval.count_ones() as f64 / eval.len() as f64;
    let banach = banach_lower_density(&eval, cfg.banach_l)?;
    let mut metrics = hit_metrics(&hits, &eval);
    metrics.insert("hit_fraction".into(), json!(frac));
    metrics.insert(
        "min_window_density".into(),
        json!({ "num": banach.num, "den": banach.den }),
    );
    let pass = frac >= cfg.min_frac && banach.as_f64() >= cfg.min_banach;

    let params = BTreeMap::from([
        ("A".into(), json!(cfg.a.to_string())),
        ("B".into(), json!(cfg.b.to_string())),
        ("poly".into(), json!(cfg.poly.to_string())),
        ("nmax".into(), json!(cfg.nmax)),
        ("eval_lo".into(), json!(cfg.eval_lo)),
        ("min_frac".into(), json!(cfg.min_frac)),
        ("banach_l".into(), json!(cfg.banach_l)),
        ("min_banach".into(), json!(cfg.min_banach)),
        ("window_hi".into(), json!(window_hi)),
    ]);
    Ok((finish("theorem2", params, metrics, pass, started, "exact"), hits))
}

#[derive(Clone, Debug)]
pub struct Theorem3Cfg {
    pub a: GeneratorSpec,
    pub b: GeneratorSpec,
    pub polys: Vec<Poly>,
    pub nmax: u64,
    pub eval_lo: u64,
    pub min_frac: f64,
}

/// Several polynomials, one common b: hit fraction of R_{p_1..p_k}.
pub fn run_theorem3(cfg: &Theorem3Cfg) -> Result<(ExperimentReport, HitSet)> {
    let started = Instant::now();
    let mut need: i128 = 1;
    for p in &cfg.polys {
        need = need.max(p.eval_u64(cfg.nmax)?);
    }
    let window_hi = need as u64 + 1;
    let a = cfg.a.generate(0, window_hi)?;
    let b = cfg.b.generate(0, window_hi)?;
    let hits = r_multi(&a, &b, &cfg.polys, cfg.nmax, Coverage::Strict)?;
    let eval = eval_slice(&hits, cfg.eval_lo, cfg.nmax)?;

    let frac = eval.count_ones() as f64 / eval.len() as f64;
    let mut metrics = hit_metrics(&hits, &eval);
    metrics.insert("hit_fraction".into(), json!(frac));
    let pass = frac >= cfg.min_frac;

    let polys_text: Vec<String> = cfg.polys.iter().map(|p| p.to_string()).collect();
    let params = BTreeMap::from([
        ("A".into(), json!(cfg.a.to_string())),
        ("B".into(), json!(cfg.b.to_string())),
        ("polys".into(), json!(polys_text)),
        ("nmax".into(), json!(cfg.nmax)),
        ("eval_lo".into(), json!(cfg.eval_lo)),
        ("min_frac".into(), json!(cfg.min_frac)),
        ("window_hi".into(), json!(window_hi)),
    ]);
    Ok((finish("theorem3", params, metrics, pass, started, "exact"), hits))
}

#[derive(Clone, Debug)]
pub struct CounterexampleCfg {
    pub a: GeneratorSpec,
    pub p_lo: Poly,
    pub p_hi: Poly,
    /// Base window [0, window_hi); defaults to p_hi(nmax) + 1 when None.
    pub window_hi: Option<u64>,
    pub nmax: u64,
    pub max_removed_frac: f64,
}

/// Degree-gap counterexample: prune A along [p_hi(n)-p_lo(n), p_hi(n)] and
/// verify the pruned set solves nothing, at a removal cost that vanishes.
pub fn run_counterexample(cfg: &CounterexampleCfg) -> Result<(ExperimentReport, HitSet)> {
    let started = Instant::now();
    let window_hi = match cfg.window_hi {
        Some(h) => h,
        None => cfg.p_hi.eval_u64(cfg.nmax)? as u64 + 1,
    };
    let a = cfg.a.generate(0, window_hi)?;
    let a_count = a.count_ones();
    let (pruned, removal) = remove_counterexample(&a, &cfg.p_lo, &cfg.p_hi)?;
    let polys = [cfg.p_lo.clone(), cfg.p_hi.clone()];
    let hits = r_multi_mixed_degree(&pruned, &pruned, &polys, cfg.nmax, Coverage::Truncate)?;

    let removed_frac = removal.removed_members as f64 / a_count.max(1) as f64;
    let solutions = hits.hits.count_ones();
    let pass = solutions == 0 && removed_frac <= cfg.max_removed_frac;

    let metrics = BTreeMap::from([
        ("a_members".into(), json!(a_count)),
        ("pruned_members".into(), json!(pruned.count_ones())),
        ("removed_members".into(), json!(removal.removed_members)),
        ("cleared_positions".into(), json!(removal.cleared_positions)),
        ("cleared_intervals".into(), json!(removal.intervals)),
        ("removed_fraction".into(), json!(removed_frac)),
        ("r_multi_hits".into(), json!(solutions)),
        ("truncated".into(), json!(hits.truncated)),
    ]);
    let params = BTreeMap::from([
        ("A".into(), json!(cfg.a.to_string())),
        ("p_lo".into(), json!(cfg.p_lo.to_string())),
        ("p_hi".into(), json!(cfg.p_hi.to_string())),
        ("window_hi".into(), json!(window_hi)),
        ("nmax".into(), json!(cfg.nmax)),
        ("max_removed_frac".into(), json!(cfg.max_removed_frac)),
    ]);
    Ok((
        finish("counterexample", params, metrics, pass, started, "exact"),
        hits,
    ))
}

// --- van der Corput Monte Carlo ------------------------------------------------

#[derive(Clone, Debug)]
pub struct VdcCfg {
    pub n_len: usize,
    pub j_count: usize,
    pub i_count: usize,
    pub eps: f64,
    pub families: u64,
    pub seed: u64,
}

/// Random bounded families of +-1/sqrt(N) sign vectors; passes when no
/// family produces a counterexample-candidate record.
pub fn run_vdc(cfg: &VdcCfg) -> Result<ExperimentReport> {
    use rayon::prelude::*;
    let started = Instant::now();
    let amp = 1.0 / (cfg.n_len as f64).sqrt();
    let total = cfg.j_count + cfg.i_count;

    let reports: Vec<(f64, f64, bool)> = (0..cfg.families)
        .collect::<Vec<u64>>()
        .par_iter()
        .map(|&fam| {
            let fam_seed = rng::split(cfg.seed, fam);
            let family: Vec<VecN> = (0..total)
                .map(|j| {
                    VecN::new(
                        (0..cfg.n_len)
                            .map(|k| {
                                let bit = rng::draw(
                                    fam_seed,
                                    (j * cfg.n_len + k) as u64,
                                ) & 1;
                                if bit == 1 {
                                    amp
                                } else {
                                    -amp
                                }
                            })
                            .collect(),
                    )
                    .expect("n_len >= 1")
                })
                .collect();
            let rep = vdc_check(&family, cfg.eps, cfg.i_count)?;
            Ok((
                rep.hyp_fraction,
                rep.avg_norm,
                rep.counterexample_candidate,
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    let candidates = reports.iter().filter(|r| r.2).count() as u64;
    let min_hyp = reports.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let max_norm = reports.iter().map(|r| r.1).fold(0.0f64, f64::max);
    let pass = candidates == 0;

    let metrics = BTreeMap::from([
        ("families".into(), json!(cfg.families)),
        ("counterexample_candidates".into(), json!(candidates)),
        ("min_hyp_fraction".into(), json!(min_hyp)),
        ("max_avg_norm".into(), json!(max_norm)),
    ]);
    let params = BTreeMap::from([
        ("N".into(), json!(cfg.n_len)),
        ("J".into(), json!(cfg.j_count)),
        ("I".into(), json!(cfg.i_count)),
        ("eps".into(), json!(cfg.eps)),
        ("families".into(), json!(cfg.families)),
        ("seed".into(), json!(cfg.seed)),
    ]);
    Ok(finish("vdc", params, metrics, pass, started, "float"))
}
