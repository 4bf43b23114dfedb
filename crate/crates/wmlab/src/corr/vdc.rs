//! Finitary van der Corput checker.
//!
//! The underlying statement has existential thresholds I'(eps) and
//! J'(I, eps) that are never made effective, so this checker does not
//! assert the implication as a property. It measures both sides — the
//! fraction of lags with small averaged pair correlations, and the norm of
//! the averaged vector — and flags a would-be counterexample record when
//! the hypothesis holds at the supplied (I, J) but the conclusion fails.
//! Every report is tagged as coming from an unverified-threshold regime.

use serde::Serialize;

use crate::error::{Error, Result};

use super::{inner, norm, Compensated, VecN};

#[derive(Clone, Debug, Serialize)]
pub struct VdcReport {
    pub eps: f64,
    pub i_count: u64,
    pub j_count: u64,
    /// Fraction of i in [1, I] with |(1/J) sum_j <u_j, u_{j+i}>| < eps/2.
    pub hyp_fraction: f64,
    /// ||(1/J) sum_{j=1..J} u_j||.
    pub avg_norm: f64,
    /// avg_norm < eps.
    pub conclusion_holds: bool,
    /// Hypothesis present at density >= 1 - eps/3 yet conclusion absent.
    pub counterexample_candidate: bool,
    /// The statement's thresholds are existential and not effective; this
    /// run checked one finite (I, J) point only.
    pub regime: &'static str,
}

/// Checks a family `u_1..u_{J+I}` of vectors with norms <= 1.
pub fn vdc_check(u: &[VecN], eps: f64, i_count: usize) -> Result<VdcReport> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidInput {
            what: "eps",
            detail: format!("{eps} must be > 0"),
        });
    }
    if i_count == 0 || u.len() <= i_count {
        return Err(Error::InvalidInput {
            what: "family",
            detail: format!(
                "need J = len - I >= 1 and I >= 1, got len {} and I {i_count}",
                u.len()
            ),
        });
    }
    let j_count = u.len() - i_count;
    let n = u[0].len();
    for v in u {
        if v.len() != n {
            return Err(Error::LengthMismatch {
                left: n,
                right: v.len(),
            });
        }
        let nv = norm(v)?;
        if nv > 1.0 + 1e-12 {
            return Err(Error::NormBound(nv));
        }
    }

    // j outer / i inner keeps u_j hot while u_{j+1..j+I} stream through
    let mut lag_sums = vec![Compensated::new(); i_count + 1];
    for j in 0..j_count {
        for i in 1..=i_count {
            lag_sums[i].add(inner(&u[j], &u[j + i])?);
        }
    }
    let good = (1..=i_count)
        .filter(|&i| (lag_sums[i].total() / j_count as f64).abs() < eps / 2.0)
        .count();
    let hyp_fraction = good as f64 / i_count as f64;

    let mut mean = vec![0.0f64; n];
    for v in u.iter().take(j_count) {
        for (m, x) in mean.iter_mut().zip(v.values()) {
            *m += x;
        }
    }
    for m in mean.iter_mut() {
        *m /= j_count as f64;
    }
    let avg_norm = norm(&VecN::new(mean)?)?;

    let conclusion_holds = avg_norm < eps;
    Ok(VdcReport {
        eps,
        i_count: i_count as u64,
        j_count: j_count as u64,
        hyp_fraction,
        avg_norm,
        conclusion_holds,
        counterexample_candidate: hyp_fraction >= 1.0 - eps / 3.0 && !conclusion_holds,
        regime: "unverified: I'(eps) and J'(I,eps) are not effective",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn sign_vector(seed: u64, idx: u64, n: usize, amp: f64) -> VecN {
        VecN::new(
            (0..n)
                .map(|k| {
                    if rng::draw(seed, idx * n as u64 + k as u64) & 1 == 1 {
                        amp
                    } else {
                        -amp
                    }
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn all_equal_unit_vectors_fail_hypothesis() {
        let v = VecN::new(vec![1.0; 64]).unwrap();
        let family: Vec<VecN> = (0..80).map(|_| v.clone()).collect();
        let rep = vdc_check(&family, 0.2, 16).unwrap();
        assert_eq!(rep.hyp_fraction, 0.0);
        assert!((rep.avg_norm - 1.0).abs() < 1e-12);
        assert!(!rep.conclusion_holds);
        assert!(!rep.counterexample_candidate);
    }

    #[test]
    fn zero_vectors_satisfy_everything() {
        let v = VecN::new(vec![0.0; 32]).unwrap();
        let family: Vec<VecN> = (0..40).map(|_| v.clone()).collect();
        let rep = vdc_check(&family, 0.2, 8).unwrap();
        assert_eq!(rep.hyp_fraction, 1.0);
        assert_eq!(rep.avg_norm, 0.0);
        assert!(rep.conclusion_holds);
        assert!(!rep.counterexample_candidate);
    }

    #[test]
    fn random_sign_family_no_candidate() {
        let n = 256usize;
        let amp = 1.0 / (n as f64).sqrt();
        let family: Vec<VecN> = (0..(4096 + 64))
            .map(|j| sign_vector(5, j, n, amp))
            .collect();
        let rep = vdc_check(&family, 0.2, 64).unwrap();
        assert_eq!(rep.hyp_fraction, 1.0);
        assert!(rep.avg_norm < 0.2, "avg norm {}", rep.avg_norm);
        assert!(rep.conclusion_holds);
        assert!(!rep.counterexample_candidate);
    }

    #[test]
    fn norm_bound_enforced() {
        let v = VecN::new(vec![2.0; 16]).unwrap();
        let family: Vec<VecN> = (0..20).map(|_| v.clone()).collect();
        assert!(matches!(
            vdc_check(&family, 0.2, 4),
            Err(Error::NormBound(_))
        ));
    }

    #[test]
    fn shape_errors() {
        let v = VecN::new(vec![0.0; 16]).unwrap();
        assert!(vdc_check(std::slice::from_ref(&v), 0.2, 4).is_err());
        let mixed = vec![v.clone(), VecN::new(vec![0.0; 8]).unwrap(), v.clone()];
        assert!(matches!(
            vdc_check(&mixed, 0.2, 1),
            Err(Error::LengthMismatch { .. })
        ));
    }
}
