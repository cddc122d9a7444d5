//! Two-stage adaptive false discovery rate control.
//!
//! Stage 1 runs Benjamini–Hochberg at `q' = q/(1+q)` and gives `r1`
//! rejections. With `m0 = m − r1`, stage 2 runs Benjamini–Hochberg at
//! `q'·m/m0`. When stage 1 rejects everything, all hypotheses are rejected.

use serde::{Deserialize, Serialize};

use super::MidasError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiTestReport {
    pub q: f64,
    pub raw: Vec<f64>,
    /// Smallest level at which each hypothesis is rejected, capped at 1.
    pub adjusted: Vec<f64>,
    pub rejected: Vec<bool>,
    pub stage1_rejections: usize,
    /// Estimated number of true nulls.
    pub m0_hat: usize,
    /// Stage 1 rejected every hypothesis.
    pub saturated: bool,
}

/// Number of step-up rejections with thresholds `k·level/m`.
fn step_up(sorted: &[f64], level: f64) -> usize {
    let m = sorted.len() as f64;
    (1..=sorted.len())
        .rev()
        .find(|&k| sorted[k - 1] <= k as f64 * level / m)
        .unwrap_or(0)
}

/// `min(1, min_{k ≥ rank} factor·p(k)/k)` in the original order.
fn step_up_adjusted(p: &[f64], order: &[usize], factor: f64) -> Vec<f64> {
    let m = p.len();
    let mut adjusted = vec![1.0; m];
    let mut running = f64::INFINITY;
    for rank in (1..=m).rev() {
        let i = order[rank - 1];
        running = running.min(factor * p[i] / rank as f64);
        adjusted[i] = running.min(1.0);
    }
    adjusted
}

pub fn adjust_pvalues(p: &[f64], q: f64) -> Result<MultiTestReport, MidasError> {
    if let Some(bad) = p.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(MidasError::InvalidPValue(*bad));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(MidasError::InvalidPValue(q));
    }
    let m = p.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p[a].total_cmp(&p[b]).then(a.cmp(&b)));
    let sorted: Vec<f64> = order.iter().map(|&i| p[i]).collect();

    let q1 = q / (1.0 + q);
    let r1 = step_up(&sorted, q1);
    let m0 = m - r1;
    let mut rejected = vec![false; m];
    let (adjusted, saturated) = if m == 0 {
        (Vec::new(), false)
    } else if m0 == 0 {
        rejected.iter_mut().for_each(|r| *r = true);
        (step_up_adjusted(p, &order, (1.0 + q) * m as f64), true)
    } else {
        let r2 = if r1 == 0 { 0 } else { step_up(&sorted, q1 * m as f64 / m0 as f64) };
        for &i in &order[..r2] {
            rejected[i] = true;
        }
        (step_up_adjusted(p, &order, (1.0 + q) * m0 as f64), false)
    };
    Ok(MultiTestReport {
        q,
        raw: p.to_vec(),
        adjusted,
        rejected,
        stage1_rejections: r1,
        m0_hat: m0,
        saturated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Direct transcription of the two stages with explicit thresholds.
    fn oracle(p: &[f64], q: f64) -> Vec<bool> {
        let m = p.len();
        let mut s: Vec<(f64, usize)> = p.iter().copied().zip(0..).collect();
        s.sort_by(|a, b| a.0.total_cmp(&b.0));
        let q1 = q / (1.0 + q);
        let mut r1 = 0;
        for k in 1..=m {
            if s[k - 1].0 <= k as f64 * q1 / m as f64 {
                r1 = k;
            }
        }
        let mut out = vec![false; m];
        if r1 == 0 {
            return out;
        }
        if r1 == m {
            return vec![true; m];
        }
        let m0 = (m - r1) as f64;
        let mut r2 = 0;
        for k in 1..=m {
            if s[k - 1].0 <= k as f64 * q1 / m0 {
                r2 = k;
            }
        }
        for &(_, i) in &s[..r2] {
            out[i] = true;
        }
        out
    }

    #[test]
    fn six_vector_example() {
        let p = [0.001, 0.008, 0.039, 0.041, 0.09, 0.7];
        let expected = oracle(&p, 0.05);
        assert_eq!(expected, vec![true, true, true, true, false, false]);
        let r = adjust_pvalues(&p, 0.05).unwrap();
        assert_eq!(r.rejected, expected);
        assert_eq!((r.stage1_rejections, r.m0_hat), (2, 4));
        for (adj, rej) in r.adjusted.iter().zip(&r.rejected) {
            assert_eq!(*adj <= 0.05, *rej);
        }
    }

    #[test]
    fn extremes() {
        let r = adjust_pvalues(&[0.0; 33], 0.05).unwrap();
        assert!(r.rejected.iter().all(|&x| x));
        assert!(r.saturated);
        let r = adjust_pvalues(&[1.0; 33], 0.05).unwrap();
        assert!(r.rejected.iter().all(|&x| !x));
        assert!(r.adjusted.iter().all(|&a| a == 1.0));
        assert!(adjust_pvalues(&[0.5, 1.2], 0.05).is_err());
        assert!(adjust_pvalues(&[], 0.05).unwrap().rejected.is_empty());
    }

    proptest! {
        #[test]
        fn matches_oracle_and_is_a_prefix(p in prop::collection::vec(0.0f64..=1.0, 1..40)) {
            let r = adjust_pvalues(&p, 0.05).unwrap();
            prop_assert_eq!(&r.rejected, &oracle(&p, 0.05));
            let max_rejected = p.iter().zip(&r.rejected).filter(|(_, &x)| x).map(|(v, _)| *v).fold(-1.0, f64::max);
            for (v, rej) in p.iter().zip(&r.rejected) {
                if !rej {
                    prop_assert!(*v >= max_rejected);
                }
            }
            for a in &r.adjusted {
                prop_assert!((0.0..=1.0).contains(a));
            }
            if !r.saturated {
                for (a, rej) in r.adjusted.iter().zip(&r.rejected) {
                    prop_assert_eq!(*a <= 0.05, *rej);
                }
            }
        }
    }
}
