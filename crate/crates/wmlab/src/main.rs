//! Command-line front end: reproducible experiments and one-off operations,
//! each emitting a single JSON object.
//!
//! Exit codes: 0 pass, 2 threshold failure, 3 input error,
//! 4 overflow/coverage error.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use wmlab::corr::{
    autocorr_cesaro, b_nj, backward_shift_norm, cube_average, forward_shift_norm,
    theorem1_witness, weighted_product_norm, Direction, WeightSeq,
};
use wmlab::error::{Error, Result};
use wmlab::experiments::{
    run_counterexample, run_obstruction, run_theorem1, run_theorem2, run_theorem3, run_vdc,
    CounterexampleCfg, ObstructionCfg, Theorem1Cfg, Theorem2Cfg, Theorem3Cfg, VdcCfg,
};
use wmlab::poly::Poly;
use wmlab::report::OpRecord;
use wmlab::seqgen::{DensitySource, GeneratorSpec, NormalizedSeq};
use wmlab::stats::density_stats;
use wmlab::BitWindow;

#[derive(Parser)]
#[command(name = "wmlab", version, about = "Windowed-set laboratory")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a bit window and write it in BW1 format.
    Gen {
        /// mod:<m>,<r..> | rot:<alpha>,<a>,<b> | weyl2:<alpha>,<a>,<b> | bern:<p>,<seed>
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 0)]
        lo: u64,
        #[arg(long)]
        hi: u64,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Density and gap statistics of a generated or stored window.
    Stats {
        #[arg(long, conflicts_with = "input")]
        spec: Option<String>,
        /// BW1 file to read instead of generating.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        lo: u64,
        #[arg(long)]
        hi: Option<u64>,
        /// N for the prefix density (defaults to the window top - 1).
        #[arg(long)]
        prefix_n: Option<u64>,
        /// Sliding window length L for the minimum density.
        #[arg(long, default_value_t = 500)]
        window_l: u64,
    },
    /// Averaged-shift norms and related values for one parameter point.
    Norms {
        /// backward | forward | product-backward | product-forward | cube |
        /// autocorr | witness
        #[arg(long)]
        op: String,
        #[arg(long = "A")]
        a: String,
        /// Second set (witness only).
        #[arg(long = "B")]
        b: Option<String>,
        #[arg(long)]
        poly: Option<String>,
        /// Shift polynomial q (forward) or window polynomial (product-forward).
        #[arg(long)]
        q: Option<String>,
        /// Semicolon-separated family, e.g. "0,1,1;0,0,1".
        #[arg(long)]
        polys: Option<String>,
        #[arg(long, default_value_t = 2000)]
        n_base: u64,
        #[arg(long = "J", default_value_t = 200)]
        j_count: u64,
        /// Cube shifts h_1,..,h_k (cube only).
        #[arg(long)]
        h: Option<String>,
        /// Averaging length (cube/autocorr).
        #[arg(long)]
        n_len: Option<u64>,
        /// Lag bound H (autocorr).
        #[arg(long, default_value_t = 200)]
        h_max: u64,
        /// analytic | measured
        #[arg(long, default_value = "analytic")]
        density: String,
        /// float | exact
        #[arg(long, default_value = "float")]
        mode: String,
    },
    /// Monte Carlo van der Corput check over random bounded families.
    Vdc {
        #[arg(long = "N", default_value_t = 256)]
        n_len: usize,
        #[arg(long = "J", default_value_t = 4096)]
        j_count: usize,
        #[arg(long = "I", default_value_t = 64)]
        i_count: usize,
        #[arg(long, default_value_t = 0.2)]
        eps: f64,
        #[arg(long, default_value_t = 1000)]
        families: u64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Residue obstruction of a polynomial's value set mod a prime.
    Obstruction {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        prime: u64,
    },
    /// Syndeticity experiment: gaps of R_p.
    Theorem1 {
        #[arg(long = "A")]
        a: String,
        #[arg(long = "B")]
        b: String,
        #[arg(long)]
        poly: String,
        #[arg(long, default_value_t = 10_000)]
        nmax: u64,
        #[arg(long, default_value_t = 100)]
        eval_lo: u64,
        #[arg(long, default_value_t = 20)]
        maxgap: u64,
        /// Write the hit set as BW1 plus a JSON sidecar.
        #[arg(long)]
        out_hits: Option<PathBuf>,
        /// Sidecar sliding-window length.
        #[arg(long, default_value_t = 500)]
        sidecar_l: u64,
    },
    /// Density-one experiment: hit fraction and sliding density of R_p.
    Theorem2 {
        #[arg(long = "A")]
        a: String,
        #[arg(long = "B")]
        b: String,
        #[arg(long)]
        poly: String,
        #[arg(long, default_value_t = 10_000)]
        nmax: u64,
        #[arg(long, default_value_t = 100)]
        eval_lo: u64,
        #[arg(long, default_value_t = 0.999)]
        minfrac: f64,
        #[arg(long, default_value_t = 500)]
        banach_l: u64,
        #[arg(long, default_value_t = 0.99)]
        min_banach: f64,
        /// Write the hit set as BW1 plus a JSON sidecar.
        #[arg(long)]
        out_hits: Option<PathBuf>,
    },
    /// Several-polynomials experiment: hit fraction of R_{p_1..p_k}.
    Theorem3 {
        #[arg(long = "A")]
        a: String,
        #[arg(long = "B")]
        b: String,
        /// Semicolon-separated family, e.g. "0,1,1;0,0,1".
        #[arg(long)]
        polys: String,
        #[arg(long, default_value_t = 3000)]
        nmax: u64,
        #[arg(long, default_value_t = 100)]
        eval_lo: u64,
        #[arg(long, default_value_t = 0.99)]
        minfrac: f64,
        /// Write the hit set as BW1 plus a JSON sidecar.
        #[arg(long)]
        out_hits: Option<PathBuf>,
        /// Sidecar sliding-window length.
        #[arg(long, default_value_t = 500)]
        sidecar_l: u64,
    },
    /// Degree-gap counterexample: prune A and verify emptiness.
    Counterexample {
        #[arg(long = "A", default_value = "bern:0.5,4")]
        a: String,
        #[arg(long)]
        plo: String,
        #[arg(long)]
        phi: String,
        /// Base window top (defaults to p_hi(nmax) + 1).
        #[arg(long)]
        window_hi: Option<u64>,
        #[arg(long, default_value_t = 100)]
        nmax: u64,
        #[arg(long, default_value_t = 0.1)]
        max_removed: f64,
    },
}

fn parse_polys(s: &str) -> Result<Vec<Poly>> {
    s.split(';').map(Poly::parse).collect()
}

fn emit_experiment(rep: wmlab::report::ExperimentReport) -> ExitCode {
    println!("{}", rep.to_json());
    if rep.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Gen { spec, lo, hi, out } => {
            let gen = GeneratorSpec::parse(&spec)?;
            let window = gen.generate(lo, hi)?;
            match out {
                Some(path) => {
                    let mut file = BufWriter::new(File::create(path)?);
                    window.encode_to(&mut file)?;
                    file.flush()?;
                }
                None => {
                    let mut stdout = std::io::stdout().lock();
                    stdout.write_all(&window.encode())?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Stats {
            spec,
            input,
            lo,
            hi,
            prefix_n,
            window_l,
        } => {
            let window = match (spec, input) {
                (Some(s), None) => {
                    let hi = hi.ok_or(Error::InvalidInput {
                        what: "stats",
                        detail: "--hi is required with --spec".into(),
                    })?;
                    GeneratorSpec::parse(&s)?.generate(lo, hi)?
                }
                (None, Some(path)) => {
                    let bytes = std::fs::read(path)?;
                    BitWindow::decode(&bytes)?
                }
                _ => {
                    return Err(Error::InvalidInput {
                        what: "stats",
                        detail: "need exactly one of --spec or --input".into(),
                    })
                }
            };
            let n = prefix_n.unwrap_or(window.hi() - 1);
            let stats = density_stats(&window, n, window_l)?;
            println!("{}", serde_json::to_string_pretty(&stats).expect("serializes"));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Norms {
            op,
            a,
            b,
            poly,
            q,
            polys,
            n_base,
            j_count,
            h,
            n_len,
            h_max,
            density,
            mode,
        } => {
            let record = run_norms_op(NormsArgs {
                op,
                a,
                b,
                poly,
                q,
                polys,
                n_base,
                j_count,
                h,
                n_len,
                h_max,
                density,
                mode,
            })?;
            println!("{}", record.to_json());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Vdc {
            n_len,
            j_count,
            i_count,
            eps,
            families,
            seed,
        } => Ok(emit_experiment(run_vdc(&VdcCfg {
            n_len,
            j_count,
            i_count,
            eps,
            families,
            seed,
        })?)),
        Cmd::Obstruction { poly, prime } => Ok(emit_experiment(run_obstruction(
            &ObstructionCfg {
                poly: Poly::parse(&poly)?,
                prime,
            },
        )?)),
        Cmd::Theorem1 {
            a,
            b,
            poly,
            nmax,
            eval_lo,
            maxgap,
            out_hits,
            sidecar_l,
        } => {
            let (rep, hits) = run_theorem1(&Theorem1Cfg {
                a: GeneratorSpec::parse(&a)?,
                b: GeneratorSpec::parse(&b)?,
                poly: Poly::parse(&poly)?,
                nmax,
                eval_lo,
                max_gap: maxgap,
            })?;
            if let Some(path) = out_hits {
                hits.write_files(&path, sidecar_l)?;
            }
            Ok(emit_experiment(rep))
        }
        Cmd::Theorem2 {
            a,
            b,
            poly,
            nmax,
            eval_lo,
            minfrac,
            banach_l,
            min_banach,
            out_hits,
        } => {
            let (rep, hits) = run_theorem2(&Theorem2Cfg {
                a: GeneratorSpec::parse(&a)?,
                b: GeneratorSpec::parse(&b)?,
                poly: Poly::parse(&poly)?,
                nmax,
                eval_lo,
                min_frac: minfrac,
                banach_l,
                min_banach,
            })?;
            if let Some(path) = out_hits {
                hits.write_files(&path, banach_l)?;
            }
            Ok(emit_experiment(rep))
        }
        Cmd::Theorem3 {
            a,
            b,
            polys,
            nmax,
            eval_lo,
            minfrac,
            out_hits,
            sidecar_l,
        } => {
            let (rep, hits) = run_theorem3(&Theorem3Cfg {
                a: GeneratorSpec::parse(&a)?,
                b: GeneratorSpec::parse(&b)?,
                polys: parse_polys(&polys)?,
                nmax,
                eval_lo,
                min_frac: minfrac,
            })?;
            if let Some(path) = out_hits {
                hits.write_files(&path, sidecar_l)?;
            }
            Ok(emit_experiment(rep))
        }
        Cmd::Counterexample {
            a,
            plo,
            phi,
            window_hi,
            nmax,
            max_removed,
        } => {
            let (rep, _) = run_counterexample(&CounterexampleCfg {
                a: GeneratorSpec::parse(&a)?,
                p_lo: Poly::parse(&plo)?,
                p_hi: Poly::parse(&phi)?,
                window_hi,
                nmax,
                max_removed_frac: max_removed,
            })?;
            Ok(emit_experiment(rep))
        }
    }
}

struct NormsArgs {
    op: String,
    a: String,
    b: Option<String>,
    poly: Option<String>,
    q: Option<String>,
    polys: Option<String>,
    n_base: u64,
    j_count: u64,
    h: Option<String>,
    n_len: Option<u64>,
    h_max: u64,
    density: String,
    mode: String,
}

fn need<T>(v: Option<T>, what: &'static str) -> Result<T> {
    v.ok_or(Error::InvalidInput {
        what,
        detail: "required for this op".into(),
    })
}

fn run_norms_op(args: NormsArgs) -> Result<OpRecord> {
    if args.mode != "float" && args.mode != "exact" {
        return Err(Error::InvalidInput {
            what: "mode",
            detail: format!("{} (expected float or exact)", args.mode),
        });
    }
    let exact = args.mode == "exact";
    let spec = GeneratorSpec::parse(&args.a)?;
    let mut params = BTreeMap::from([
        ("A".into(), json!(args.a)),
        ("N".into(), json!(args.n_base)),
        ("J".into(), json!(args.j_count)),
        ("density".into(), json!(args.density)),
    ]);

    // window big enough for every argument the op can touch
    let coverage_hi = |polys: &[&Poly]| -> Result<u64> {
        let mut need: i128 = 2;
        for p in polys {
            need = need.max(p.eval_u64(args.n_base + args.j_count)? + 1);
            let at_base = p.eval_u64(args.n_base)?;
            need = need.max(at_base.checked_mul(2).ok_or(Error::Overflow("window size"))?);
        }
        u64::try_from(need).map_err(|_| Error::Overflow("window size"))
    };

    let build_xi = |window: BitWindow| -> Result<NormalizedSeq> {
        match args.density.as_str() {
            "analytic" => NormalizedSeq::new(
                window,
                spec.analytic_density(),
                DensitySource::Analytic,
            ),
            "measured" => {
                let upto = window.hi() - 1;
                NormalizedSeq::from_measured_prefix(window, upto)
            }
            other => Err(Error::InvalidInput {
                what: "density",
                detail: format!("{other} (expected analytic or measured)"),
            }),
        }
    };

    let (value, edge_terms): (Value, u64) = match args.op.as_str() {
        "backward" => {
            let p = Poly::parse(&need(args.poly, "poly")?)?;
            params.insert("poly".into(), json!(p.to_string()));
            let xi = build_xi(spec.generate(0, coverage_hi(&[&p])?)?)?;
            if exact {
                let r = wmlab::corr::backward_shift_norm_sq_exact(
                    &xi, &p, args.n_base, args.j_count,
                )?;
                (json!({"norm_sq": r.value.to_string()}), r.edge_terms)
            } else {
                let r = backward_shift_norm(&xi, &p, args.n_base, args.j_count)?;
                (json!(r.value), r.edge_terms)
            }
        }
        "forward" => {
            let p = Poly::parse(&need(args.poly, "poly")?)?;
            let qp = Poly::parse(&need(args.q, "q")?)?;
            params.insert("poly".into(), json!(p.to_string()));
            params.insert("q".into(), json!(qp.to_string()));
            let hi = coverage_hi(&[&p, &qp])?;
            let xi = build_xi(spec.generate(0, hi + qp.eval_u64(args.n_base + args.j_count)? as u64)?)?;
            if exact {
                let r = wmlab::corr::forward_shift_norm_sq_exact(
                    &xi, &qp, &p, args.n_base, args.j_count,
                )?;
                (json!({"norm_sq": r.value.to_string()}), r.edge_terms)
            } else {
                let r = forward_shift_norm(&xi, &qp, &p, args.n_base, args.j_count)?;
                (json!(r.value), r.edge_terms)
            }
        }
        "product-backward" | "product-forward" => {
            let family = parse_polys(&need(args.polys, "polys")?)?;
            params.insert(
                "polys".into(),
                json!(family.iter().map(|p| p.to_string()).collect::<Vec<_>>()),
            );
            let direction = if args.op == "product-backward" {
                Direction::Backward
            } else {
                Direction::Forward
            };
            let qp = match (&direction, args.q) {
                (Direction::Forward, q) => Some(Poly::parse(&need(q, "q")?)?),
                (Direction::Backward, _) => None,
            };
            if let Some(qp) = &qp {
                params.insert("q".into(), json!(qp.to_string()));
            }
            let mut refs: Vec<&Poly> = family.iter().collect();
            if let Some(qp) = &qp {
                refs.push(qp);
            }
            let xi = build_xi(spec.generate(0, coverage_hi(&refs)?)?)?;
            let weights = WeightSeq::ones(0, args.n_base + args.j_count + 1)?;
            if exact {
                let r = wmlab::corr::weighted_product_norm_sq_exact(
                    &xi,
                    &family,
                    &weights,
                    qp.as_ref(),
                    args.n_base,
                    args.j_count,
                    direction,
                )?;
                (json!({"norm_sq": r.value.to_string()}), r.edge_terms)
            } else {
                let r = weighted_product_norm(
                    &xi,
                    &family,
                    &weights,
                    qp.as_ref(),
                    args.n_base,
                    args.j_count,
                    direction,
                )?;
                (json!(r.value), r.edge_terms)
            }
        }
        "cube" => {
            let n_len = need(args.n_len, "n-len")?;
            let shifts: Vec<u64> = match &args.h {
                Some(text) if !text.is_empty() => text
                    .split(',')
                    .map(|t| {
                        t.trim().parse::<u64>().map_err(|_| Error::InvalidInput {
                            what: "h",
                            detail: format!("bad shift {t:?}"),
                        })
                    })
                    .collect::<Result<_>>()?,
                _ => Vec::new(),
            };
            params.insert("h".into(), json!(shifts));
            params.insert("n_len".into(), json!(n_len));
            let top = n_len + shifts.iter().sum::<u64>() + 2;
            let xi = build_xi(spec.generate(0, top)?)?;
            if exact {
                let (v, e) = wmlab::corr::cube_average_exact(&xi, &shifts, n_len)?;
                (json!({"value": v.to_string()}), e)
            } else {
                let r = cube_average(&xi, &shifts, n_len)?;
                (json!(r.value), r.edge_terms)
            }
        }
        "autocorr" => {
            let n_len = need(args.n_len, "n-len")?;
            params.insert("n_len".into(), json!(n_len));
            params.insert("H".into(), json!(args.h_max));
            let xi = build_xi(spec.generate(0, n_len + args.h_max + 2)?)?;
            let r = autocorr_cesaro(&xi, n_len, args.h_max)?;
            (json!(r.value), r.edge_terms)
        }
        "witness" => {
            let p = Poly::parse(&need(args.poly, "poly")?)?;
            let b_spec = GeneratorSpec::parse(&need(args.b, "B")?)?;
            params.insert("poly".into(), json!(p.to_string()));
            params.insert("B".into(), json!(b_spec.to_string()));
            let hi = coverage_hi(&[&p])?;
            let a_win = spec.generate(0, hi)?;
            let b_win = b_spec.generate(0, hi)?;
            let d = match args.density.as_str() {
                "analytic" => spec.analytic_density(),
                "measured" => {
                    NormalizedSeq::from_measured_prefix(a_win.clone(), a_win.hi() - 1)?.density()
                }
                other => {
                    return Err(Error::InvalidInput {
                        what: "density",
                        detail: format!("{other} (expected analytic or measured)"),
                    })
                }
            };
            if exact {
                let (r, no_hit) = wmlab::corr::theorem1_witness_exact(
                    &a_win, &b_win, &p, args.n_base, args.j_count, d,
                )?;
                (
                    json!({"witness": r.value.to_string(), "no_hit": no_hit}),
                    r.edge_terms,
                )
            } else {
                let r = theorem1_witness(&a_win, &b_win, &p, args.n_base, args.j_count, d)?;
                (
                    json!({"witness": r.witness, "no_hit": r.no_hit}),
                    r.edge_terms,
                )
            }
        }
        "bnj" => {
            let family = parse_polys(&need(args.polys, "polys")?)?;
            params.insert(
                "polys".into(),
                json!(family.iter().map(|p| p.to_string()).collect::<Vec<_>>()),
            );
            let refs: Vec<&Poly> = family.iter().collect();
            let a_win = spec.generate(0, coverage_hi(&refs)?)?;
            let weights = WeightSeq::ones(0, args.n_base + args.j_count + 1)?;
            let d = spec.analytic_density();
            if exact {
                let r = wmlab::corr::b_nj_exact(
                    &a_win, &weights, &family, args.n_base, args.j_count, d,
                )?;
                (json!({"value": r.value.to_string()}), r.edge_terms)
            } else {
                let r = b_nj(&a_win, &weights, &family, args.n_base, args.j_count, d)?;
                (json!(r.value), r.edge_terms)
            }
        }
        other => {
            return Err(Error::InvalidInput {
                what: "op",
                detail: format!("unknown norms op {other:?}"),
            })
        }
    };

    Ok(OpRecord {
        op: args.op,
        params,
        value,
        edge_terms,
        mode: args.mode,
    })
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
