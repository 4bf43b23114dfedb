//! Exact integer polynomials: overflow-checked Horner evaluation, essential
//! distinctness, leading-coefficient group counts, value sets, and the
//! residue-image obstruction finder.

use std::fmt;

use crate::bitwindow::BitWindow;
use crate::error::{Error, Result};

/// Integer polynomial with 64-bit coefficients, constant term first.
/// Evaluation is exact in 128 bits; overflow is an error, never a wrap.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<i64>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl Poly {
    /// Trailing zero coefficients are trimmed; the zero polynomial is `[0]`.
    pub fn new(mut coeffs: Vec<i64>) -> Poly {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0);
        }
        Poly { coeffs }
    }

    /// Parses the CLI form "c0,c1,...,cd" (constant term first).
    pub fn parse(s: &str) -> Result<Poly> {
        let coeffs: std::result::Result<Vec<i64>, _> =
            s.split(',').map(|t| t.trim().parse::<i64>()).collect();
        match coeffs {
            Ok(c) if !c.is_empty() => Ok(Poly::new(c)),
            _ => Err(Error::InvalidInput {
                what: "polynomial",
                detail: format!("cannot parse {:?} as c0,c1,...,cd", s),
            }),
        }
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading_coeff(&self) -> i64 {
        *self.coeffs.last().unwrap()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs == [0]
    }

    /// Exact Horner evaluation in 128-bit arithmetic.
    pub fn eval(&self, n: i128) -> Result<i128> {
        let mut acc: i128 = 0;
        for &c in self.coeffs.iter().rev() {
            acc = acc
                .checked_mul(n)
                .and_then(|v| v.checked_add(c as i128))
                .ok_or(Error::Overflow("polynomial evaluation"))?;
        }
        Ok(acc)
    }

    pub fn eval_u64(&self, n: u64) -> Result<i128> {
        self.eval(n as i128)
    }

    /// Difference `self - other` with widened coefficients (internal use:
    /// distinctness and dominance checks).
    fn diff_coeffs(&self, other: &Poly) -> Vec<i128> {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0i128; len];
        for (i, slot) in out.iter_mut().enumerate() {
            let a = self.coeffs.get(i).copied().unwrap_or(0) as i128;
            let b = other.coeffs.get(i).copied().unwrap_or(0) as i128;
            *slot = a - b;
        }
        while out.len() > 1 && *out.last().unwrap() == 0 {
            out.pop();
        }
        out
    }

    /// Degree of `self - other` (0 for a constant difference).
    pub fn diff_degree(&self, other: &Poly) -> usize {
        self.diff_coeffs(other).len() - 1
    }

    /// Leading coefficient of `self - other`.
    pub fn diff_leading_coeff(&self, other: &Poly) -> i128 {
        *self.diff_coeffs(other).last().unwrap()
    }

    /// Smallest argument beyond which the polynomial is strictly increasing,
    /// from a derivative domination bound. Requires degree >= 1 and a
    /// positive leading coefficient.
    pub fn monotone_from(&self) -> Result<u64> {
        let d = self.degree();
        if d == 0 || self.leading_coeff() <= 0 {
            return Err(Error::DegreePrecondition(format!(
                "{} must be non-constant with a positive leading coefficient",
                self
            )));
        }
        // p'(x) = sum i*c_i x^(i-1); the top term dominates once
        // x >= 1 + (sum_{1<=i<d} |i*c_i|) / (d*c_d).
        let top = d as i128 * self.leading_coeff() as i128;
        let rest: i128 = (1..d)
            .map(|i| (i as i128 * self.coeffs[i] as i128).abs())
            .sum();
        Ok((1 + rest / top + 1) as u64)
    }
}

/// Nonempty family of polynomials.
#[derive(Clone, Debug)]
pub struct PolyFamily {
    members: Vec<Poly>,
}

impl PolyFamily {
    pub fn new(members: Vec<Poly>) -> Result<PolyFamily> {
        if members.is_empty() {
            return Err(Error::InvalidInput {
                what: "polynomial family",
                detail: "must be nonempty".into(),
            });
        }
        Ok(PolyFamily { members })
    }

    pub fn members(&self) -> &[Poly] {
        &self.members
    }
}

/// True iff every pairwise difference is non-constant. Vacuously true for a
/// single polynomial.
pub fn essentially_distinct(family: &PolyFamily) -> bool {
    let m = family.members();
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            if m[i].diff_degree(&m[j]) == 0 {
                return false;
            }
        }
    }
    true
}

/// Per-degree counts of distinct leading coefficients: `counts[i-1]` is the
/// number of leading-coefficient groups among the degree-`i` members.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharVector {
    counts: Vec<usize>,
}

impl CharVector {
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn max_degree(&self) -> usize {
        self.counts.len()
    }
}

pub fn characteristic_vector(family: &PolyFamily) -> Result<CharVector> {
    if !essentially_distinct(family) {
        return Err(Error::NotEssentiallyDistinct);
    }
    let d = family
        .members()
        .iter()
        .map(|p| p.degree())
        .max()
        .expect("family is nonempty");
    if d == 0 {
        return Err(Error::DegreePrecondition(
            "characteristic vector needs at least one non-constant polynomial".into(),
        ));
    }
    let mut counts = vec![0usize; d];
    for deg in 1..=d {
        let mut leads: Vec<i64> = family
            .members()
            .iter()
            .filter(|p| p.degree() == deg)
            .map(|p| p.leading_coeff())
            .collect();
        leads.sort_unstable();
        leads.dedup();
        counts[deg - 1] = leads.len();
    }
    Ok(CharVector { counts })
}

/// Marks `{p(n) : n >= 0}` inside `[lo, hi)`. The polynomial must have a
/// positive leading coefficient (it is eventually increasing, which bounds
/// the scan).
pub fn value_set(p: &Poly, lo: u64, hi: u64) -> Result<BitWindow> {
    let monotone_from = p.monotone_from()?;
    let mut out = BitWindow::empty(lo, hi)?;
    let mut n: u64 = 0;
    loop {
        let v = p.eval_u64(n)?;
        if v >= lo as i128 && v < hi as i128 {
            out.set(v as u64)?;
        }
        if n >= monotone_from && v >= hi as i128 {
            break;
        }
        n += 1;
    }
    Ok(out)
}

/// Image of the value set in the residues mod a prime, plus (when the image
/// is not all of them) a residue pair whose sum-class misses it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionReport {
    pub prime: u64,
    /// Sorted residues attained by `p(n) mod q`.
    pub image: Vec<u64>,
    pub surjective: bool,
    /// Residue classes `(a, b)` with `(a + b) mod q` outside the image:
    /// the sumset of the two classes avoids the value set entirely.
    pub pair: Option<(u64, u64)>,
}

const PRIME_LIMIT: u64 = 1_000_000;

pub fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    if q.is_multiple_of(2) {
        return q == 2;
    }
    let mut d = 3u64;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub fn residue_obstruction(p: &Poly, q: u64) -> Result<ObstructionReport> {
    if q > PRIME_LIMIT {
        return Err(Error::PrimeTooLarge(q, PRIME_LIMIT));
    }
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    let mut hit = vec![false; q as usize];
    for n in 0..q {
        let v = p.eval_u64(n)?;
        hit[v.rem_euclid(q as i128) as usize] = true;
    }
    let image: Vec<u64> = (0..q).filter(|&r| hit[r as usize]).collect();
    let surjective = image.len() as u64 == q;
    let mut pair = None;
    if !surjective {
        // Smallest pair of nonzero classes first (classes of naturals >= 1),
        // falling back to pairs involving the zero class for tiny primes.
        'outer: for include_zero in [false, true] {
            let start = if include_zero { 0 } else { 1 };
            for a in start..q {
                for b in start..q {
                    if !hit[((a + b) % q) as usize] {
                        pair = Some((a, b));
                        break 'outer;
                    }
                }
            }
        }
    }
    Ok(ObstructionReport {
        prime: q,
        image,
        surjective,
        pair,
    })
}
