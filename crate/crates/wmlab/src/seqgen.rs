//! Candidate-set generators and normalized sequences.
//!
//! Four families of subsets of the naturals, realized as bit windows:
//! residue-periodic sets, irrational-rotation coded sets (totally ergodic
//! but not mixing), quadratic-Weyl coded sets and Bernoulli random sets
//! (the mixing candidates). All generators are pure functions of their
//! spec, so disjoint sub-windows can be generated independently with
//! bit-identical results.
//!
//! Fractional parts are computed by exact modular arithmetic: a float alpha
//! is treated as the dyadic rational its bits denote, a rational alpha as
//! num/den. Either way `frac(n*alpha)` carries no accumulated drift; the
//! only rounding is the final conversion to f64 (< 2^-51), far inside the
//! 2^-40 budget the interval tests need.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Float;

use crate::bitwindow::{BitWindow, Membership};
use crate::error::{Error, Result};
use crate::rng;

/// Rotation/Weyl coefficient: a float (used as the exact dyadic rational it
/// encodes) or an explicit fraction such as a continued-fraction convergent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Alpha {
    Float(f64),
    Ratio { num: u64, den: u64 },
}

const RATIO_LIMIT: u64 = u32::MAX as u64;

impl Alpha {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Alpha::Float(a) => {
                if !(a > 1e-12 && a < 1.0) {
                    return Err(Error::InvalidInput {
                        what: "alpha",
                        detail: format!("{a} outside (0, 1)"),
                    });
                }
            }
            Alpha::Ratio { num, den } => {
                if den == 0 || num == 0 || num >= den || den > RATIO_LIMIT {
                    return Err(Error::InvalidInput {
                        what: "alpha",
                        detail: format!("{num}/{den} not a reduced fraction in (0,1) with den <= 2^32"),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn as_f64(&self) -> f64 {
        match *self {
            Alpha::Float(a) => a,
            Alpha::Ratio { num, den } => num as f64 / den as f64,
        }
    }

    /// frac(k * alpha) for k >= 0, exactly reduced before the single final
    /// rounding to f64.
    pub fn frac_mul(&self, k: u128) -> f64 {
        match *self {
            Alpha::Float(a) => {
                let (mantissa, exponent, _sign) = a.integer_decode();
                debug_assert!(exponent < 0);
                let s = (-exponent) as u32; // alpha = mantissa / 2^s, s <= 117 after validate
                let r = mulmod_pow2(k, mantissa, s);
                (r as f64) * 2f64.powi(-(s as i32))
            }
            Alpha::Ratio { num, den } => {
                let r = (k % den as u128) * num as u128 % den as u128;
                r as f64 / den as f64
            }
        }
    }

    pub fn parse(s: &str) -> Result<Alpha> {
        let alpha = if let Some((n, d)) = s.split_once('/') {
            let num = n.trim().parse::<u64>().map_err(|_| Error::InvalidInput {
                what: "alpha",
                detail: format!("bad numerator in {s:?}"),
            })?;
            let den = d.trim().parse::<u64>().map_err(|_| Error::InvalidInput {
                what: "alpha",
                detail: format!("bad denominator in {s:?}"),
            })?;
            Alpha::Ratio { num, den }
        } else {
            Alpha::Float(s.trim().parse::<f64>().map_err(|_| Error::InvalidInput {
                what: "alpha",
                detail: format!("cannot parse {s:?}"),
            })?)
        };
        alpha.validate()?;
        Ok(alpha)
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Alpha::Float(a) => write!(f, "{a}"),
            Alpha::Ratio { num, den } => write!(f, "{num}/{den}"),
        }
    }
}

/// (a mod 2^s) * m mod 2^s without overflowing 128 bits.
#[inline]
fn mulmod_pow2(a: u128, m: u64, s: u32) -> u128 {
    debug_assert!(s <= 127);
    let mask: u128 = (1u128 << s) - 1;
    let a = a & mask;
    let lo = (a & u64::MAX as u128) * m as u128;
    let carry = if s > 64 {
        (((a >> 64) * m as u128) & ((1u128 << (s - 64)) - 1)) << 64
    } else {
        0
    };
    lo.wrapping_add(carry) & mask
}

#[derive(Clone, Debug, PartialEq)]
pub enum GeneratorSpec {
    Periodic { modulus: u64, residues: BTreeSet<u64> },
    Rotation { alpha: Alpha, interval: (f64, f64) },
    Weyl2 { alpha: Alpha, interval: (f64, f64) },
    Bernoulli { p: f64, seed: u64 },
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            GeneratorSpec::Periodic { modulus, residues } => {
                if *modulus == 0 {
                    return Err(Error::ZeroModulus);
                }
                for &r in residues {
                    if r >= *modulus {
                        return Err(Error::ResidueOutOfRange {
                            residue: r,
                            modulus: *modulus,
                        });
                    }
                }
                Ok(())
            }
            GeneratorSpec::Rotation { alpha, interval }
            | GeneratorSpec::Weyl2 { alpha, interval } => {
                alpha.validate()?;
                let (a, b) = *interval;
                if !(0.0 <= a && a < b && b <= 1.0) {
                    return Err(Error::DegenerateInterval { a, b });
                }
                Ok(())
            }
            GeneratorSpec::Bernoulli { p, .. } => {
                if !(*p > 0.0 && *p < 1.0) {
                    return Err(Error::ProbabilityRange(*p));
                }
                Ok(())
            }
        }
    }

    /// Density the generator is aimed at: |R|/m, b-a, or p.
    pub fn analytic_density(&self) -> Density {
        match self {
            GeneratorSpec::Periodic { modulus, residues } => Density::Rational {
                num: residues.len() as u64,
                den: *modulus,
            },
            GeneratorSpec::Rotation { interval, .. } | GeneratorSpec::Weyl2 { interval, .. } => {
                Density::Float(interval.1 - interval.0)
            }
            GeneratorSpec::Bernoulli { p, .. } => Density::Float(*p),
        }
    }

    pub fn generate(&self, lo: u64, hi: u64) -> Result<BitWindow> {
        self.validate()?;
        match self {
            GeneratorSpec::Periodic { modulus, residues } => {
                gen_periodic(*modulus, residues, lo, hi)
            }
            GeneratorSpec::Rotation { alpha, interval } => {
                gen_rotation(*alpha, interval.0, interval.1, lo, hi)
            }
            GeneratorSpec::Weyl2 { alpha, interval } => {
                gen_weyl2(*alpha, interval.0, interval.1, lo, hi)
            }
            GeneratorSpec::Bernoulli { p, seed } => gen_bernoulli(*p, *seed, lo, hi),
        }
    }

    /// CLI grammar: `mod:<m>,<r1>[,<r2>...]` | `rot:<alpha>,<a>,<b>` |
    /// `weyl2:<alpha>,<a>,<b>` | `bern:<p>,<seed>`.
    pub fn parse(s: &str) -> Result<GeneratorSpec> {
        let bad = |detail: String| Error::InvalidInput {
            what: "generator spec",
            detail,
        };
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| bad(format!("{s:?} has no kind prefix")))?;
        let fields: Vec<&str> = rest.split(',').collect();
        let spec = match kind {
            "mod" => {
                if fields.len() < 2 {
                    return Err(bad(format!("mod needs a modulus and residues: {s:?}")));
                }
                let modulus = fields[0]
                    .parse::<u64>()
                    .map_err(|_| bad(format!("bad modulus in {s:?}")))?;
                let residues = fields[1..]
                    .iter()
                    .map(|t| t.parse::<u64>())
                    .collect::<std::result::Result<BTreeSet<u64>, _>>()
                    .map_err(|_| bad(format!("bad residue in {s:?}")))?;
                GeneratorSpec::Periodic { modulus, residues }
            }
            "rot" | "weyl2" => {
                if fields.len() != 3 {
                    return Err(bad(format!("{kind} needs alpha,a,b: {s:?}")));
                }
                let alpha = Alpha::parse(fields[0])?;
                let a = fields[1]
                    .parse::<f64>()
                    .map_err(|_| bad(format!("bad interval start in {s:?}")))?;
                let b = fields[2]
                    .parse::<f64>()
                    .map_err(|_| bad(format!("bad interval end in {s:?}")))?;
                if kind == "rot" {
                    GeneratorSpec::Rotation {
                        alpha,
                        interval: (a, b),
                    }
                } else {
                    GeneratorSpec::Weyl2 {
                        alpha,
                        interval: (a, b),
                    }
                }
            }
            "bern" => {
                if fields.len() != 2 {
                    return Err(bad(format!("bern needs p,seed: {s:?}")));
                }
                let p = fields[0]
                    .parse::<f64>()
                    .map_err(|_| bad(format!("bad probability in {s:?}")))?;
                let seed = fields[1]
                    .parse::<u64>()
                    .map_err(|_| bad(format!("bad seed in {s:?}")))?;
                GeneratorSpec::Bernoulli { p, seed }
            }
            other => return Err(bad(format!("unknown generator kind {other:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::Periodic { modulus, residues } => {
                write!(f, "mod:{modulus}")?;
                for r in residues {
                    write!(f, ",{r}")?;
                }
                Ok(())
            }
            GeneratorSpec::Rotation { alpha, interval } => {
                write!(f, "rot:{alpha},{},{}", interval.0, interval.1)
            }
            GeneratorSpec::Weyl2 { alpha, interval } => {
                write!(f, "weyl2:{alpha},{},{}", interval.0, interval.1)
            }
            GeneratorSpec::Bernoulli { p, seed } => write!(f, "bern:{p},{seed}"),
        }
    }
}

pub fn gen_periodic(
    modulus: u64,
    residues: &BTreeSet<u64>,
    lo: u64,
    hi: u64,
) -> Result<BitWindow> {
    if modulus == 0 {
        return Err(Error::ZeroModulus);
    }
    for &r in residues {
        if r >= modulus {
            return Err(Error::ResidueOutOfRange {
                residue: r,
                modulus,
            });
        }
    }
    let mut w = BitWindow::empty(lo, hi)?;
    for n in lo..hi {
        if residues.contains(&(n % modulus)) {
            w.set(n).expect("index in window");
        }
    }
    Ok(w)
}

pub fn gen_rotation(alpha: Alpha, a: f64, b: f64, lo: u64, hi: u64) -> Result<BitWindow> {
    alpha.validate()?;
    if !(0.0 <= a && a < b && b <= 1.0) {
        return Err(Error::DegenerateInterval { a, b });
    }
    let mut w = BitWindow::empty(lo, hi)?;
    for n in lo..hi {
        let y = alpha.frac_mul(n as u128);
        if y >= a && y < b {
            w.set(n).expect("index in window");
        }
    }
    Ok(w)
}

pub fn gen_weyl2(alpha: Alpha, a: f64, b: f64, lo: u64, hi: u64) -> Result<BitWindow> {
    alpha.validate()?;
    if !(0.0 <= a && a < b && b <= 1.0) {
        return Err(Error::DegenerateInterval { a, b });
    }
    let mut w = BitWindow::empty(lo, hi)?;
    for n in lo..hi {
        let n2 = (n as u128) * (n as u128); // exact square before reduction
        let y = alpha.frac_mul(n2);
        if y >= a && y < b {
            w.set(n).expect("index in window");
        }
    }
    Ok(w)
}

pub fn gen_bernoulli(p: f64, seed: u64, lo: u64, hi: u64) -> Result<BitWindow> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::ProbabilityRange(p));
    }
    let threshold = (p * 18_446_744_073_709_551_616.0) as u64; // p * 2^64, saturating
    let mut w = BitWindow::empty(lo, hi)?;
    for n in lo..hi {
        if rng::draw(seed, n) < threshold {
            w.set(n).expect("index in window");
        }
    }
    Ok(w)
}

// --- normalized sequences ---------------------------------------------------

/// Density parameter for a normalized sequence: an exact rational (measured
/// counts, or |R|/m) or a float (interval length, Bernoulli p).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Density {
    Rational { num: u64, den: u64 },
    Float(f64),
}

impl Density {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Density::Rational { num, den } => {
                if den == 0 || num > den {
                    return Err(Error::DensityRange(if den == 0 {
                        f64::NAN
                    } else {
                        num as f64 / den as f64
                    }));
                }
            }
            Density::Float(d) => {
                if !(0.0..=1.0).contains(&d) {
                    return Err(Error::DensityRange(d));
                }
            }
        }
        Ok(())
    }

    pub fn as_f64(&self) -> f64 {
        match *self {
            Density::Rational { num, den } => num as f64 / den as f64,
            Density::Float(d) => d,
        }
    }

    pub fn rational(&self) -> Option<(u64, u64)> {
        match *self {
            Density::Rational { num, den } => Some((num, den)),
            Density::Float(_) => None,
        }
    }
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Density::Rational { num, den } => write!(f, "{num}/{den}"),
            Density::Float(d) => write!(f, "{d}"),
        }
    }
}

/// Which density went into a normalized sequence; recorded so reports can
/// say whether identities are exact or approximate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DensitySource {
    Analytic,
    MeasuredPrefix { upto: u64 },
}

impl fmt::Display for DensitySource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DensitySource::Analytic => write!(f, "analytic"),
            DensitySource::MeasuredPrefix { upto } => write!(f, "measured[1..={upto}]"),
        }
    }
}

/// The mean-zero encoding of a set over its window: `1_A(n) - d` inside,
/// exactly 0 for `n <= 0` and outside the window.
#[derive(Clone, Debug)]
pub struct NormalizedSeq {
    window: BitWindow,
    density: Density,
    source: DensitySource,
}

/// Spec-level constructor name for [`NormalizedSeq::new`].
pub fn normalize(
    window: BitWindow,
    density: Density,
    source: DensitySource,
) -> Result<NormalizedSeq> {
    NormalizedSeq::new(window, density, source)
}

impl NormalizedSeq {
    pub fn new(window: BitWindow, density: Density, source: DensitySource) -> Result<Self> {
        density.validate()?;
        Ok(NormalizedSeq {
            window,
            density,
            source,
        })
    }

    /// Normalizes by the exact prefix density |A cap [1, upto]| / upto.
    pub fn from_measured_prefix(window: BitWindow, upto: u64) -> Result<Self> {
        if upto == 0 || upto >= window.hi() {
            return Err(Error::OutOfWindow {
                n: upto as i128,
                lo: window.lo(),
                hi: window.hi(),
            });
        }
        let start = window.lo().max(1);
        let num = window.count_in(start, upto + 1)?;
        Ok(NormalizedSeq {
            window,
            density: Density::Rational { num, den: upto },
            source: DensitySource::MeasuredPrefix { upto },
        })
    }

    pub fn window(&self) -> &BitWindow {
        &self.window
    }

    pub fn density(&self) -> Density {
        self.density
    }

    pub fn source(&self) -> DensitySource {
        self.source
    }

    /// xi(n) in float arithmetic. Zero for n <= 0 (convention) and outside
    /// the window (truncation).
    #[inline]
    pub fn xi(&self, n: i128) -> f64 {
        self.xi_with_edge(n).0
    }

    /// Like [`xi`](Self::xi) but reports whether the zero came from window
    /// truncation (n >= 1 yet outside the window) rather than from the
    /// n <= 0 convention.
    #[inline]
    pub fn xi_with_edge(&self, n: i128) -> (f64, bool) {
        if n <= 0 {
            return (0.0, false);
        }
        match self.window.query(n) {
            Membership::In => (1.0 - self.density.as_f64(), false),
            Membership::NotIn => (-self.density.as_f64(), false),
            Membership::Outside => (0.0, true),
        }
    }

    /// Exact-mode denominator; the sequence values are integers over it.
    pub fn exact_denominator(&self) -> Result<i128> {
        match self.density {
            Density::Rational { den, .. } => Ok(den as i128),
            Density::Float(_) => Err(Error::ExactNeedsRationalDensity),
        }
    }

    /// Numerator of xi(n) over [`exact_denominator`](Self::exact_denominator):
    /// den-num, -num, or 0, with the same edge flag as the float path.
    #[inline]
    pub fn xi_numer(&self, n: i128) -> (i128, bool) {
        let (num, den) = match self.density {
            Density::Rational { num, den } => (num as i128, den as i128),
            Density::Float(_) => unreachable!("checked by exact_denominator"),
        };
        if n <= 0 {
            return (0, false);
        }
        match self.window.query(n) {
            Membership::In => (den - num, false),
            Membership::NotIn => (-num, false),
            Membership::Outside => (0, true),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT2_M1: f64 = std::f64::consts::SQRT_2 - 1.0;

    fn evens(lo: u64, hi: u64) -> BitWindow {
        gen_periodic(2, &BTreeSet::from([0]), lo, hi).unwrap()
    }

    #[test]
    fn periodic_examples() {
        let w = evens(0, 10);
        assert_eq!(w.members().collect::<Vec<_>>(), vec![0, 2, 4, 6, 8]);

        let w = gen_periodic(7, &BTreeSet::from([1]), 0, 8).unwrap();
        assert_eq!(w.members().collect::<Vec<_>>(), vec![1]);

        let w = gen_periodic(1, &BTreeSet::from([0]), 5, 9).unwrap();
        assert_eq!(w.members().collect::<Vec<_>>(), vec![5, 6, 7, 8]);
    }

    #[test]
    fn periodic_errors() {
        assert!(matches!(
            gen_periodic(2, &BTreeSet::from([0]), 4, 4),
            Err(Error::EmptyWindow { .. })
        ));
        assert!(matches!(
            gen_periodic(5, &BTreeSet::from([5]), 0, 10),
            Err(Error::ResidueOutOfRange { .. })
        ));
        assert!(matches!(
            gen_periodic(0, &BTreeSet::new(), 0, 10),
            Err(Error::ZeroModulus)
        ));
    }

    #[test]
    fn periodic_complement_partitions_window() {
        let r: BTreeSet<u64> = [0, 3].into();
        let rc: BTreeSet<u64> = [1, 2, 4].into();
        let a = gen_periodic(5, &r, 0, 1000).unwrap();
        let b = gen_periodic(5, &rc, 0, 1000).unwrap();
        assert_eq!(a.union(&b).unwrap().count_ones(), 1000);
        assert_eq!(a.intersect(&b).unwrap().count_ones(), 0);
    }

    #[test]
    fn rotation_full_interval_is_full_window() {
        let w = gen_rotation(Alpha::Float(SQRT2_M1), 0.0, 1.0, 0, 100).unwrap();
        assert_eq!(w.count_ones(), 100);
    }

    #[test]
    fn rotation_interval_errors() {
        assert!(matches!(
            gen_rotation(Alpha::Float(SQRT2_M1), 0.5, 0.5, 0, 10),
            Err(Error::DegenerateInterval { .. })
        ));
        assert!(matches!(
            gen_rotation(Alpha::Float(SQRT2_M1), 0.7, 0.2, 0, 10),
            Err(Error::DegenerateInterval { .. })
        ));
    }

    #[test]
    fn rotation_density_converges() {
        let n = 1_000_000;
        let w = gen_rotation(Alpha::Float(SQRT2_M1), 0.0, 0.5, 0, n).unwrap();
        let density = w.count_ones() as f64 / n as f64;
        assert!((density - 0.5).abs() <= 1e-2, "density {density}");
    }

    #[test]
    fn rotation_complement_partition() {
        let a = gen_rotation(Alpha::Float(SQRT2_M1), 0.0, 0.3, 0, 5000).unwrap();
        let b = gen_rotation(Alpha::Float(SQRT2_M1), 0.3, 1.0, 0, 5000).unwrap();
        assert_eq!(a.union(&b).unwrap().count_ones(), 5000);
        assert_eq!(a.intersect(&b).unwrap().count_ones(), 0);
    }

    #[test]
    fn rotation_rational_alpha_matches_float_of_same_value() {
        // 1/4 is exactly representable both ways
        let wf = gen_rotation(Alpha::Float(0.25), 0.0, 0.5, 0, 64).unwrap();
        let wr = gen_rotation(Alpha::Ratio { num: 1, den: 4 }, 0.0, 0.5, 0, 64).unwrap();
        assert_eq!(wf, wr);
    }

    #[test]
    fn weyl2_full_interval_and_density() {
        let w = gen_weyl2(Alpha::Float(SQRT2_M1), 0.0, 1.0, 0, 50).unwrap();
        assert_eq!(w.count_ones(), 50);

        let n = 1_000_000;
        let w = gen_weyl2(Alpha::Float(SQRT2_M1), 0.0, 0.3, 0, n).unwrap();
        let density = w.count_ones() as f64 / n as f64;
        assert!((density - 0.3).abs() <= 1e-2, "density {density}");
    }

    #[test]
    fn weyl2_square_reduced_exactly() {
        // frac(n^2/ den) with rational alpha equals integer arithmetic
        let alpha = Alpha::Ratio { num: 3, den: 7 };
        for n in 0u64..100 {
            let expect = ((n as u128 * n as u128 % 7) * 3 % 7) as f64 / 7.0;
            assert_eq!(alpha.frac_mul((n as u128) * (n as u128)), expect);
        }
    }

    #[test]
    fn bernoulli_density_and_determinism() {
        let n = 1_000_000;
        let w1 = gen_bernoulli(0.5, 1, 0, n).unwrap();
        let density = w1.count_ones() as f64 / n as f64;
        assert!((density - 0.5).abs() <= 5e-3, "density {density}");

        let w2 = gen_bernoulli(0.5, 1, 0, n).unwrap();
        assert_eq!(w1, w2);
        let w3 = gen_bernoulli(0.5, 2, 0, n).unwrap();
        assert_ne!(w1, w3);
    }

    #[test]
    fn bernoulli_rejects_degenerate_probability() {
        assert!(matches!(
            gen_bernoulli(0.0, 1, 0, 10),
            Err(Error::ProbabilityRange(_))
        ));
        assert!(matches!(
            gen_bernoulli(1.0, 1, 0, 10),
            Err(Error::ProbabilityRange(_))
        ));
    }

    #[test]
    fn generators_are_pure_over_subwindows() {
        for spec in [
            GeneratorSpec::parse("mod:3,0,2").unwrap(),
            GeneratorSpec::parse("rot:0.41421356,0,0.3").unwrap(),
            GeneratorSpec::parse("weyl2:0.41421356,0.2,0.9").unwrap(),
            GeneratorSpec::parse("bern:0.3,9").unwrap(),
        ] {
            let whole = spec.generate(0, 2000).unwrap();
            let left = spec.generate(0, 777).unwrap();
            let right = spec.generate(777, 2000).unwrap();
            for n in 0..777 {
                assert_eq!(whole.contains(n).unwrap(), left.contains(n).unwrap());
            }
            for n in 777..2000 {
                assert_eq!(whole.contains(n).unwrap(), right.contains(n).unwrap());
            }
        }
    }

    #[test]
    fn spec_parse_display_round_trip() {
        for text in ["mod:7,1,3", "rot:0.25,0,0.3", "weyl2:169/408,0.1,0.4", "bern:0.5,3"] {
            let spec = GeneratorSpec::parse(text).unwrap();
            assert_eq!(GeneratorSpec::parse(&spec.to_string()).unwrap(), spec);
        }
        assert!(GeneratorSpec::parse("huh:1").is_err());
        assert!(GeneratorSpec::parse("rot:1.5,0,0.3").is_err());
        assert!(GeneratorSpec::parse("mod:5").is_err());
    }

    #[test]
    fn normalize_empty_set_zero_density() {
        let xi = NormalizedSeq::new(
            BitWindow::empty(0, 10).unwrap(),
            Density::Rational { num: 0, den: 1 },
            DensitySource::Analytic,
        )
        .unwrap();
        for n in -3i128..15 {
            assert_eq!(xi.xi(n), 0.0);
        }
    }

    #[test]
    fn normalize_evens_alternates_and_sums_to_zero() {
        let xi = NormalizedSeq::new(
            evens(0, 12),
            Density::Rational { num: 1, den: 2 },
            DensitySource::Analytic,
        )
        .unwrap();
        // over n = 1..=10: five odd (-1/2), five even (+1/2)
        let mut sum = 0.0;
        for n in 1..=10i128 {
            let v = xi.xi(n);
            assert!(v == 0.5 || v == -0.5);
            sum += v;
        }
        assert_eq!(sum, 0.0);
        // n = 0 is zero by convention even though 0 is in the window
        assert_eq!(xi.xi(0), 0.0);
    }

    #[test]
    fn measured_prefix_sums_to_zero_exactly() {
        let w = gen_bernoulli(0.3, 5, 0, 2048).unwrap();
        let xi = NormalizedSeq::from_measured_prefix(w, 2000).unwrap();
        let den = xi.exact_denominator().unwrap();
        let mut numer_sum: i128 = 0;
        let mut edges = 0u64;
        for n in 1..=2000i128 {
            let (v, e) = xi.xi_numer(n);
            numer_sum += v;
            edges += e as u64;
        }
        assert_eq!(numer_sum, 0, "denominator {den}");
        assert_eq!(edges, 0);

        // float path: one ulp per term budget
        let mut float_sum = 0.0f64;
        for n in 1..=2000i128 {
            float_sum += xi.xi(n);
        }
        assert!(float_sum.abs() <= 2000.0 * f64::EPSILON);
    }

    #[test]
    fn xi_edge_flags_distinguish_truncation_from_convention() {
        let xi = NormalizedSeq::new(
            evens(4, 10),
            Density::Float(0.5),
            DensitySource::Analytic,
        )
        .unwrap();
        assert_eq!(xi.xi_with_edge(-2), (0.0, false));
        assert_eq!(xi.xi_with_edge(0), (0.0, false));
        assert_eq!(xi.xi_with_edge(2), (0.0, true)); // n >= 1, outside window
        assert_eq!(xi.xi_with_edge(4), (0.5, false));
        assert_eq!(xi.xi_with_edge(11), (0.0, true));
    }

    #[test]
    fn exact_mode_requires_rational_density() {
        let xi = NormalizedSeq::new(
            evens(0, 10),
            Density::Float(0.5),
            DensitySource::Analytic,
        )
        .unwrap();
        assert!(matches!(
            xi.exact_denominator(),
            Err(Error::ExactNeedsRationalDensity)
        ));
    }
}
