//! Multi-horizon average superior predictive ability test.
//!
//! The differentials `d_{t,h} = L_benchmark − L_model` are combined across
//! horizons into `z_t = Σ_h w_h·d_{t,h}`. The statistic is
//! `√T·z̄/ω̂` with a Bartlett long-run variance of lag `ℓ − 1`. Its null
//! distribution comes from a moving-block bootstrap of `z`: each resample is
//! recentered on the bootstrap mean `E*[z̄*]` and studentized with its own
//! block variance. Large statistics favour the model, so the p-value is
//! the share of resampled statistics above the sample one.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::hac::bartlett_lrv;
use super::EvalError;
use crate::stats::{mean, population_variance};

pub const DEFAULT_BOOTSTRAP: usize = 999;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HorizonWeights {
    /// `w_h ∝ 1/sd_h`.
    InverseSd,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AspaOptions {
    /// Block length; `None` means `⌈T^{1/3}⌉`.
    pub block_length: Option<usize>,
    pub bootstrap: usize,
    pub weights: HorizonWeights,
    pub seed: u64,
}

impl Default for AspaOptions {
    fn default() -> Self {
        AspaOptions {
            block_length: None,
            bootstrap: DEFAULT_BOOTSTRAP,
            weights: HorizonWeights::InverseSd,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AspaResult {
    pub statistic: f64,
    pub p_value: f64,
    pub block_length: usize,
    pub bootstrap: usize,
    /// Normalized horizon weights.
    pub weights: Vec<f64>,
    pub subset: String,
}

pub fn default_block_length(t: usize) -> usize {
    ((t as f64).cbrt().ceil() as usize).max(1)
}

/// Normalized weights summing to one. Horizons with zero spread get the
/// largest finite weight; all-zero spread falls back to uniform.
pub fn horizon_weights(differentials: &[Vec<f64>], kind: HorizonWeights) -> Vec<f64> {
    let k = differentials.len();
    let raw: Vec<f64> = match kind {
        HorizonWeights::Uniform => vec![1.0; k],
        HorizonWeights::InverseSd => {
            let inv: Vec<Option<f64>> = differentials
                .iter()
                .map(|d| {
                    let sd = population_variance(d).sqrt();
                    (sd > 0.0).then(|| 1.0 / sd)
                })
                .collect();
            let cap = inv.iter().flatten().fold(0.0f64, |a, &b| a.max(b));
            if cap == 0.0 {
                vec![1.0; k]
            } else {
                inv.into_iter().map(|w| w.unwrap_or(cap)).collect()
            }
        }
    };
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// `num/den`, where a denominator at rounding level sends the ratio to 0
/// or ±∞ depending on whether the numerator is also at rounding level.
fn studentize(num: f64, den: f64, tiny: f64) -> f64 {
    if den > tiny {
        num / den
    } else if num.abs() <= tiny {
        0.0
    } else {
        num.signum() * f64::INFINITY
    }
}

pub fn aspa_test(differentials: &[Vec<f64>], subset: &str, opts: &AspaOptions) -> Result<AspaResult, EvalError> {
    let Some(first) = differentials.first() else {
        return Err(EvalError::Misaligned("no horizons".into()));
    };
    let t = first.len();
    if differentials.iter().any(|d| d.len() != t) {
        return Err(EvalError::Misaligned("differential vectors differ in length".into()));
    }
    if differentials.iter().flatten().any(|v| !v.is_finite()) {
        return Err(EvalError::NonFinite);
    }
    let l = opts.block_length.unwrap_or_else(|| default_block_length(t));
    if l == 0 || t < 2 * l {
        return Err(EvalError::BlockTooLong { t, block: l });
    }
    if opts.bootstrap == 0 {
        return Err(EvalError::TooFewObservations { needed: 1, found: 0 });
    }
    let weights = horizon_weights(differentials, opts.weights);
    let z: Vec<f64> = (0..t)
        .map(|i| differentials.iter().zip(&weights).map(|(d, w)| w * d[i]).sum())
        .collect();
    let zbar = mean(&z);
    let root_t = (t as f64).sqrt();
    let tiny = 1e-10 * root_t * z.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let statistic = studentize(root_t * zbar, bartlett_lrv(&z, l - 1).sqrt(), tiny);

    // Block means over all T − ℓ + 1 starting points; their average is E*[z̄*]
    // when every block has full length.
    let starts = t - l + 1;
    let n_blocks = t.div_ceil(l);
    let expected = {
        let mut prefix = vec![0.0; t + 1];
        for i in 0..t {
            prefix[i + 1] = prefix[i] + z[i];
        }
        // Resamples are truncated to T values; weight each start by how much
        // of its block is kept so the recentering is exact.
        let full = t / l;
        let tail = t - full * l;
        let block_sum = |s: usize, len: usize| prefix[s + len] - prefix[s];
        let mean_full: f64 = (0..starts).map(|s| block_sum(s, l)).sum::<f64>() / starts as f64;
        let mean_tail: f64 = if tail > 0 {
            (0..starts).map(|s| block_sum(s, tail)).sum::<f64>() / starts as f64
        } else {
            0.0
        };
        (full as f64 * mean_full + mean_tail) / t as f64
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut sample = vec![0.0; t];
    let mut exceed = 0usize;
    for _ in 0..opts.bootstrap {
        let mut filled = 0;
        for _ in 0..n_blocks {
            let s = rng.gen_range(0..starts);
            let take = l.min(t - filled);
            sample[filled..filled + take].copy_from_slice(&z[s..s + take]);
            filled += take;
        }
        let m = mean(&sample);
        // Block-based variance of the resample: the average squared block
        // sum of deviations, scaled by the block length.
        let mut acc = 0.0;
        let mut blocks = 0;
        for chunk in sample.chunks(l) {
            let dev: f64 = chunk.iter().map(|v| v - m).sum();
            acc += dev * dev / chunk.len() as f64;
            blocks += 1;
        }
        let omega = (acc / blocks as f64).sqrt();
        let t_star = studentize(root_t * (m - expected), omega, tiny);
        if t_star > statistic {
            exceed += 1;
        }
    }
    Ok(AspaResult {
        statistic,
        p_value: exceed as f64 / opts.bootstrap as f64,
        block_length: l,
        bootstrap: opts.bootstrap,
        weights,
        subset: subset.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand_distr::{Distribution, StandardNormal};

    fn noise(t: usize, mu: f64, sd: f64, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..t)
            .map(|_| {
                let e: f64 = StandardNormal.sample(&mut rng);
                mu + sd * e
            })
            .collect()
    }

    #[test]
    fn strong_gain_gives_small_p() {
        let d = vec![noise(52, 1.0, 0.1, 1), noise(52, 1.0, 0.1, 2)];
        let r = aspa_test(&d, "forecast", &AspaOptions::default()).unwrap();
        assert!(r.p_value < 0.01);
        assert_eq!(r.block_length, 4);
    }

    #[test]
    fn constant_positive_differential() {
        let d = vec![vec![0.3; 52]];
        let r = aspa_test(&d, "nowcast", &AspaOptions::default()).unwrap();
        assert_eq!(r.statistic, f64::INFINITY);
        assert_eq!(r.p_value, 0.0);
    }

    #[test]
    fn short_sample_rejected() {
        let d = vec![vec![0.1; 7]];
        let opts = AspaOptions {
            block_length: Some(4),
            ..AspaOptions::default()
        };
        assert!(matches!(aspa_test(&d, "x", &opts), Err(EvalError::BlockTooLong { .. })));
    }

    #[test]
    fn weights_normalized_inverse_sd() {
        let w = horizon_weights(&[vec![1.0, -1.0], vec![2.0, -2.0]], HorizonWeights::InverseSd);
        assert!((w[0] - 2.0 / 3.0).abs() < 1e-15 && (w[1] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(horizon_weights(&[vec![0.0; 3], vec![0.0; 3]], HorizonWeights::InverseSd), vec![0.5, 0.5]);
    }

    #[test]
    fn recentering_matches_bootstrap_mean() {
        // With T a multiple of ℓ the exact bootstrap mean is the average of
        // all block means; check against a brute-force average.
        let z = noise(12, 0.0, 1.0, 4);
        let l = 3;
        let starts = z.len() - l + 1;
        let brute: f64 = (0..starts).map(|s| z[s..s + l].iter().sum::<f64>() / l as f64).sum::<f64>() / starts as f64;
        let mut prefix = vec![0.0];
        for v in &z {
            prefix.push(prefix.last().unwrap() + v);
        }
        let fast = (0..starts).map(|s| prefix[s + l] - prefix[s]).sum::<f64>() / starts as f64 / l as f64;
        assert!((brute - fast).abs() < 1e-12);
    }

    #[test]
    fn reproducible() {
        let d = vec![noise(52, 0.1, 1.0, 7)];
        let a = aspa_test(&d, "f", &AspaOptions::default()).unwrap();
        let b = aspa_test(&d, "f", &AspaOptions::default()).unwrap();
        assert_eq!(a.p_value.to_bits(), b.p_value.to_bits());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn adding_a_positive_constant_never_raises_p(seed in 0u64..1000, c in 0.01f64..2.0) {
            let d = vec![noise(40, 0.0, 1.0, seed), noise(40, 0.0, 2.0, seed + 1)];
            let shifted: Vec<Vec<f64>> = d.iter().map(|v| v.iter().map(|x| x + c).collect()).collect();
            let opts = AspaOptions { bootstrap: 199, seed, ..AspaOptions::default() };
            let a = aspa_test(&d, "f", &opts).unwrap();
            let b = aspa_test(&shifted, "f", &opts).unwrap();
            prop_assert!(b.p_value <= a.p_value);
        }
    }
}
