//! Comparator estimators: closed-form maximum likelihood, grid-searched
//! likelihood for multimodal families, the maximum spacing product
//! estimator, and simple order statistics. All results are clamped to the
//! model rectangle so risk comparisons stay within the parameter space.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{Model, Sample};

/// Which baseline to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineKind {
    MleClosed,
    MleGrid,
    Mspe,
    Median,
    Mean,
    Mvub,
    Midrange,
}

/// Settings for the grid-backed baselines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineSpec {
    pub kind: BaselineKind,
    /// Grid resolution for `MleGrid` (per anchor window) and `Mspe` (across
    /// the whole rectangle).
    pub grid_points: usize,
}

impl BaselineSpec {
    pub fn new(kind: BaselineKind) -> Self {
        Self { kind, grid_points: 100_000 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_points < 1_000 {
            return Err(Error::InvalidConfig("grid baselines need at least 1000 points".into()));
        }
        Ok(())
    }
}

/// Closed-form MLE, clamped to the rectangle.
pub fn mle_closed(model: &Model, sample: &Sample) -> Result<Vec<f64>> {
    model.closed_mle(sample.values()).ok_or_else(|| {
        Error::Unsupported(format!("`{}` has no closed-form maximum likelihood", model.name()))
    })
}

/// Grid-search MLE for unidimensional models with possibly multimodal
/// likelihood: the log-likelihood is evaluated on `grid_points` equally
/// spaced points in a width-2 window around each anchor (clamped to the
/// rectangle) and the best point overall is returned; ties go to the
/// smallest parameter.
pub fn mle_grid(model: &Model, sample: &Sample, spec: &BaselineSpec, anchors: &[f64]) -> Result<f64> {
    spec.validate()?;
    if model.dim() != 1 {
        return Err(Error::Unsupported("grid likelihood search is unidimensional".into()));
    }
    let (m, mm) = (model.rect().lower(0), model.rect().upper(0));
    let mut best_theta = f64::NAN;
    let mut best_ll = f64::NEG_INFINITY;
    for &anchor in anchors {
        let lo = (anchor - 1.0).max(m);
        let hi = (anchor + 1.0).min(mm);
        if !(hi > lo) {
            continue;
        }
        let step = (hi - lo) / (spec.grid_points - 1) as f64;
        for i in 0..spec.grid_points {
            let theta = lo + step * i as f64;
            let ll: f64 = sample.values().iter().map(|&x| model.log_density(&[theta], x)).sum();
            if ll > best_ll || (ll == best_ll && theta < best_theta) {
                best_ll = ll;
                best_theta = theta;
            }
        }
    }
    if best_theta.is_nan() {
        return Err(Error::InvalidConfig("no usable anchor window".into()));
    }
    Ok(best_theta)
}

/// Maximum spacing product estimator on a rectangle-wide grid: maximizes
/// `sum log(F(x_(i+1)) - F(x_(i)))` over sorted observations with sentinel
/// spacings to 0 and 1. Zero spacings force the objective to negative
/// infinity; if every grid value is degenerate that way (tied observations),
/// the argmax of the sum restricted to positive spacings is returned.
pub fn mspe(model: &Model, sample: &Sample, spec: &BaselineSpec) -> Result<f64> {
    spec.validate()?;
    if model.dim() != 1 {
        return Err(Error::Unsupported("spacing estimator is unidimensional".into()));
    }
    if sample.n() < 2 {
        return Err(Error::InvalidSample("spacing estimator needs n >= 2".into()));
    }
    let sorted = sample.sorted();
    let (m, mm) = (model.rect().lower(0), model.rect().upper(0));
    let step = (mm - m) / (spec.grid_points - 1) as f64;

    let objective = |theta: f64, skip_zero: bool| -> f64 {
        let mut prev = 0.0f64;
        let mut total = 0.0f64;
        for &x in &sorted {
            let f = model.cdf(&[theta], x);
            let gap = f - prev;
            prev = f;
            if gap > 0.0 {
                total += gap.ln();
            } else if !skip_zero {
                return f64::NEG_INFINITY;
            }
        }
        let last = 1.0 - prev;
        if last > 0.0 {
            total += last.ln();
        } else if !skip_zero {
            return f64::NEG_INFINITY;
        }
        total
    };

    let scan = |skip_zero: bool| -> (f64, f64) {
        let mut best = (f64::NEG_INFINITY, m);
        for i in 0..spec.grid_points {
            let theta = m + step * i as f64;
            let v = objective(theta, skip_zero);
            if v > best.0 {
                best = (v, theta);
            }
        }
        best
    };

    let (best_val, best_theta) = scan(false);
    if best_val.is_finite() {
        Ok(best_theta)
    } else {
        Ok(scan(true).1)
    }
}

/// Order-statistic baselines: lower median, mean, minimum-variance unbiased
/// scale estimate `(n+1)/n max`, and midrange. Clamped to the rectangle.
pub fn simple_stats(model: &Model, sample: &Sample, kind: BaselineKind) -> Result<f64> {
    let values = sample.values();
    let n = values.len();
    let stat = match kind {
        BaselineKind::Median => {
            let sorted = sample.sorted();
            sorted[(n - 1) / 2]
        }
        BaselineKind::Mean => values.iter().sum::<f64>() / n as f64,
        BaselineKind::Mvub => {
            let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            (n as f64 + 1.0) / n as f64 * max
        }
        BaselineKind::Midrange => {
            let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
            0.5 * (max + min)
        }
        _ => return Err(Error::InvalidConfig(format!("{kind:?} is not an order statistic"))),
    };
    Ok(stat.clamp(model.rect().lower(0), model.rect().upper(0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{catalog_lookup, draw_sample, Provenance};
    use approx::assert_relative_eq;

    fn sample(values: &[f64]) -> Sample {
        Sample::new(values.to_vec(), Provenance::Synthetic).unwrap()
    }

    #[test]
    fn closed_mles() {
        let exp = catalog_lookup("exp-rate").unwrap();
        assert_relative_eq!(mle_closed(&exp, &sample(&[1.0, 2.0, 3.0])).unwrap()[0], 0.5);
        let unif = catalog_lookup("unif-scale").unwrap();
        assert_relative_eq!(mle_closed(&unif, &sample(&[0.3, 1.7])).unwrap()[0], 1.7);
        let gauss = catalog_lookup("gauss-loc").unwrap();
        assert_relative_eq!(mle_closed(&gauss, &sample(&[-1.0, 1.0])).unwrap()[0], 0.0);
        let pareto = catalog_lookup("pareto-shift").unwrap();
        assert_relative_eq!(mle_closed(&pareto, &sample(&[0.4, 2.0, 0.9])).unwrap()[0], 0.4);
    }

    #[test]
    fn closed_mle_unsupported() {
        let cauchy = catalog_lookup("cauchy-loc").unwrap();
        assert!(matches!(mle_closed(&cauchy, &sample(&[0.0, 1.0])), Err(Error::Unsupported(_))));
    }

    #[test]
    fn grid_mle_tracks_closed_mle_on_gaussian() {
        let m = catalog_lookup("gauss-loc").unwrap();
        let s = draw_sample(&m, &[0.0], 50, 3).unwrap();
        let exact = mle_closed(&m, &s).unwrap()[0];
        let spec = BaselineSpec { kind: BaselineKind::MleGrid, grid_points: 100_000 };
        let grid = mle_grid(&m, &s, &spec, &[exact]).unwrap();
        let step = 2.0 / (spec.grid_points - 1) as f64;
        assert!((grid - exact).abs() <= step, "grid {grid} vs exact {exact}");
    }

    #[test]
    fn grid_mle_covers_disjoint_anchor_windows() {
        let m = catalog_lookup("gauss-loc").unwrap();
        let s = sample(&[5.0, 5.1, 4.9]);
        let spec = BaselineSpec { kind: BaselineKind::MleGrid, grid_points: 20_000 };
        // One window far away, one containing the truth; the union argmax
        // must come from the good window.
        let v = mle_grid(&m, &s, &spec, &[-8.0, 5.0]).unwrap();
        assert!((v - 5.0).abs() < 0.05, "{v}");
    }

    #[test]
    fn grid_mle_refinement_consistency_on_cauchy() {
        let m = catalog_lookup("cauchy-loc").unwrap();
        let s = draw_sample(&m, &[1.0], 75, 10).unwrap();
        let median = simple_stats(&m, &s, BaselineKind::Median).unwrap();
        let coarse = BaselineSpec { kind: BaselineKind::MleGrid, grid_points: 1_000 };
        let fine = BaselineSpec { kind: BaselineKind::MleGrid, grid_points: 100_000 };
        let a = mle_grid(&m, &s, &coarse, &[median]).unwrap();
        let b = mle_grid(&m, &s, &fine, &[median]).unwrap();
        let coarse_step = 2.0 / (coarse.grid_points - 1) as f64;
        assert!((a - b).abs() <= 2.0 * coarse_step, "{a} vs {b}");
    }

    #[test]
    fn mspe_recovers_location_scale() {
        let m = catalog_lookup("sqrt-singular").unwrap();
        let s = draw_sample(&m, &[0.0], 100, 9).unwrap();
        let spec = BaselineSpec { kind: BaselineKind::Mspe, grid_points: 20_000 };
        let v = mspe(&m, &s, &spec).unwrap();
        assert!(v.abs() <= 0.5, "{v}");
        assert!((-1.0..=1.0).contains(&v));
    }

    #[test]
    fn mspe_small_sample_brute_force_check() {
        // n = 2 in the uniform location model with a symmetric pair around
        // 0.3: the spacing product peaks at the midpoint.
        let m = catalog_lookup("unif-loc").unwrap();
        let s = sample(&[0.2, 0.4]);
        let spec = BaselineSpec { kind: BaselineKind::Mspe, grid_points: 40_000 };
        let v = mspe(&m, &s, &spec).unwrap();
        let mut best = (f64::NEG_INFINITY, f64::NAN);
        let fine = 400_001usize;
        for i in 0..fine {
            let theta = -10.0 + 20.0 * i as f64 / (fine - 1) as f64;
            let f1 = m.cdf(&[theta], 0.2);
            let f2 = m.cdf(&[theta], 0.4);
            let (a, b, c) = (f1, f2 - f1, 1.0 - f2);
            if a > 0.0 && b > 0.0 && c > 0.0 {
                let obj = a.ln() + b.ln() + c.ln();
                if obj > best.0 {
                    best = (obj, theta);
                }
            }
        }
        assert!((v - best.1).abs() < 2e-3, "grid {v} vs oracle {}", best.1);
        assert!((v - 0.3).abs() < 0.01);
    }

    #[test]
    fn mspe_survives_duplicate_observations() {
        let m = catalog_lookup("unif-loc").unwrap();
        let s = sample(&[0.25, 0.25, 0.4]);
        let spec = BaselineSpec { kind: BaselineKind::Mspe, grid_points: 5_000 };
        let v = mspe(&m, &s, &spec).unwrap();
        assert!((-10.0..=10.0).contains(&v));
    }

    #[test]
    fn order_statistics() {
        let m = catalog_lookup("unif-scale").unwrap();
        assert_relative_eq!(simple_stats(&m, &sample(&[1.0, 2.0, 3.0]), BaselineKind::Mvub).unwrap(), 4.0);
        let loc = catalog_lookup("unif-loc").unwrap();
        assert_relative_eq!(simple_stats(&loc, &sample(&[-2.0, 4.0]), BaselineKind::Midrange).unwrap(), 1.0);
        assert_relative_eq!(simple_stats(&loc, &sample(&[5.0]), BaselineKind::Median).unwrap(), 5.0);
        // Lower median on even n.
        assert_relative_eq!(simple_stats(&loc, &sample(&[3.0, 1.0, 2.0, 4.0]), BaselineKind::Median).unwrap(), 2.0);
    }

    #[test]
    fn clamping_keeps_estimates_in_rectangle() {
        let m = catalog_lookup("unif-scale").unwrap();
        // Mvub of a large sample value exceeds the upper bound 10.
        let v = simple_stats(&m, &sample(&[9.99]), BaselineKind::Mvub).unwrap();
        assert!(v <= 10.0);
    }
}
