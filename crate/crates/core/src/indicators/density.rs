//! Gaussian kernel densities of an indicator by business-cycle regime.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::{IndicatorSeries, Regime, RegimeCalendar};
use crate::diag::Diagnostic;
use crate::stats::{quantile_sorted, sample_sd};

pub const GRID_POINTS: usize = 512;
pub const MIN_REGIME_OBS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityCurve {
    pub regime: Regime,
    pub bandwidth: f64,
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    sample: Vec<f64>,
}

impl DensityCurve {
    /// Kernel estimate with Silverman's bandwidth, tabulated on a grid over
    /// the data range widened by three bandwidths. `None` when the sample is
    /// constant.
    pub fn fit(regime: Regime, sample: Vec<f64>) -> Option<DensityCurve> {
        let mut sorted = sample.clone();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len() as f64;
        let sd = sample_sd(&sorted);
        let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
        let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
        if !(spread > 0.0) {
            return None;
        }
        let bandwidth = 0.9 * spread * n.powf(-0.2);
        let lo = sorted[0] - 3.0 * bandwidth;
        let hi = sorted[sorted.len() - 1] + 3.0 * bandwidth;
        let step = (hi - lo) / (GRID_POINTS - 1) as f64;
        let grid: Vec<f64> = (0..GRID_POINTS).map(|i| lo + step * i as f64).collect();
        let mut curve = DensityCurve {
            regime,
            bandwidth,
            grid,
            density: Vec::new(),
            sample,
        };
        curve.density = curve.grid.iter().map(|&x| curve.evaluate(x)).collect();
        Some(curve)
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        let h = self.bandwidth;
        let norm = 1.0 / (self.sample.len() as f64 * h * (2.0 * PI).sqrt());
        norm * self
            .sample
            .iter()
            .map(|&xi| (-0.5 * ((x - xi) / h).powi(2)).exp())
            .sum::<f64>()
    }

    pub fn n_obs(&self) -> usize {
        self.sample.len()
    }

    /// Trapezoid-rule integral over the grid.
    pub fn integral(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(self.density.windows(2))
            .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
            .sum()
    }
}

/// One density per regime present in the series. Each observation takes the
/// regime of its period's first day; regimes with fewer than
/// [`MIN_REGIME_OBS`] observations are skipped with a diagnostic.
pub fn regime_density(series: &IndicatorSeries, calendar: &RegimeCalendar) -> (Vec<DensityCurve>, Vec<Diagnostic>) {
    let mut by_regime: BTreeMap<Regime, Vec<f64>> = BTreeMap::new();
    for (p, v) in series.observed() {
        if let Some(r) = calendar.label(p.start_date()) {
            by_regime.entry(r).or_default().push(v);
        }
    }
    let label = format!("{}/{}", series.country, series.name);
    let mut curves = Vec::new();
    let mut diagnostics = Vec::new();
    for (regime, sample) in by_regime {
        if sample.len() < MIN_REGIME_OBS {
            diagnostics.push(Diagnostic::new(
                label.clone(),
                format!("{regime}: {} observations, need {MIN_REGIME_OBS}", sample.len()),
            ));
            continue;
        }
        match DensityCurve::fit(regime, sample) {
            Some(c) => curves.push(c),
            None => diagnostics.push(Diagnostic::new(label.clone(), format!("{regime}: constant sample"))),
        }
    }
    (curves, diagnostics)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calendar::Period;
    use crate::indicators::RegimeSpan;
    use chrono::NaiveDate;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    fn normal_sample(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn standard_normal_peak() {
        let c = DensityCurve::fit(Regime::Expansion, normal_sample(10_000, 7)).unwrap();
        let analytic = 1.0 / (2.0 * PI).sqrt();
        assert!((c.evaluate(0.0) - analytic).abs() < 0.05);
        assert!((c.integral() - 1.0).abs() < 1e-3);
        assert_eq!(c.grid.len(), GRID_POINTS);
    }

    #[test]
    fn small_samples_integrate_to_one() {
        for seed in 0..50 {
            let c = DensityCurve::fit(Regime::Recession, normal_sample(5 + seed as usize, seed)).unwrap();
            assert!((c.integral() - 1.0).abs() < 1e-3, "seed {seed}: {}", c.integral());
        }
    }

    #[test]
    fn regimes_split_and_skip() {
        let d = |y, m, day| NaiveDate::from_ymd_opt(y, m, day).unwrap();
        let cal = RegimeCalendar::new(vec![
            RegimeSpan { start: d(2000, 1, 1), end: d(2007, 12, 31), label: Regime::Expansion },
            RegimeSpan { start: d(2008, 1, 1), end: d(2008, 3, 31), label: Regime::Recession },
        ])
        .unwrap();
        let vals = normal_sample(99, 3).into_iter().map(Some).collect();
        let s = IndicatorSeries::new("IT", "economy", Period::month(2000, 1), vals);
        let (curves, diags) = regime_density(&s, &cal);
        assert_eq!(curves.len(), 1);
        assert_eq!(curves[0].regime, Regime::Expansion);
        assert_eq!(curves[0].n_obs(), 96);
        assert_eq!(diags.len(), 1);
    }
}
