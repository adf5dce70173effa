//! Interval-shrinking estimation for unidimensional models.
//!
//! Starting from the full parameter interval, each step tests the two
//! endpoints against each other and moves the endpoint the test speaks
//! against inward, by a radius guaranteed to stay inside the scaled
//! Hellinger ball around it. The loop stops when the interval is narrower
//! than `eta`; the estimate is the final midpoint.

use serde::{Deserialize, Serialize};

use crate::distance;
use crate::error::{Error, Result};
use crate::models::geometry::{self, Direction};
use crate::models::{Model, Sample};
use crate::quad::QuadratureSpec;
use crate::testing::{test_statistic, GridSpec};

/// Critical threshold for the shrink parameter kappa: the search's risk
/// guarantee needs `kappa` strictly below this value.
pub fn kappa_bar() -> f64 {
    let ratio: f64 = (2.0 + std::f64::consts::SQRT_2) / (2.0 - std::f64::consts::SQRT_2);
    (1.0 + ratio.sqrt()).powi(-2)
}

/// How endpoint radii are computed from the current pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadiusRule1D {
    /// Exact ball geometry from the closed distance formula (largest valid
    /// radii). Falls back to `HellingerBased` for families without one.
    Optimal,
    /// `((kappa / R_upper) h^2)^(1/alpha)`, using one distance evaluation.
    HellingerBased,
    /// `(kappa R_lower / R_upper)^(1/alpha) (theta' - theta)`, using no
    /// distance evaluation at all.
    Parametric,
}

/// Configuration of the unidimensional search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig1D {
    pub kappa: f64,
    /// Grid thinness (0 disables discretization).
    pub t: f64,
    /// Stopping width.
    pub eta: f64,
    pub radius_rule: RadiusRule1D,
    pub max_iterations: usize,
    /// Record the full interval/test trace (disable inside large
    /// simulations to save memory).
    pub record_trace: bool,
}

impl EstimatorConfig1D {
    /// Defaults used throughout the simulation studies: no discretization,
    /// `kappa` at half the critical value, `eta` at 1e-8 of the interval
    /// width, and the per-family radius rule assignment (exact geometry
    /// where closed, distance-based for the Cauchy and shifted-Pareto
    /// families, parametric for the singular one).
    pub fn defaults_for(model: &Model) -> Self {
        let rule = match model.name() {
            "cauchy-loc" | "pareto-shift" => RadiusRule1D::HellingerBased,
            "sqrt-singular" => RadiusRule1D::Parametric,
            _ => RadiusRule1D::Optimal,
        };
        Self {
            kappa: 0.5 * kappa_bar(),
            t: 0.0,
            eta: model.rect().width(0) * 1e-8,
            radius_rule: rule,
            max_iterations: 1_000_000,
            record_trace: true,
        }
    }

    pub fn validate(&self, model: &Model) -> Result<()> {
        if model.dim() != 1 {
            return Err(Error::InvalidConfig(format!(
                "`{}` is {}-dimensional; the interval search needs d = 1",
                model.name(),
                model.dim()
            )));
        }
        if !(self.kappa > 0.0 && self.kappa < kappa_bar()) {
            return Err(Error::InvalidConfig(format!(
                "kappa = {} must lie in (0, {:.16})",
                self.kappa,
                kappa_bar()
            )));
        }
        if !(self.eta > 0.0) {
            return Err(Error::InvalidConfig("eta must be positive".into()));
        }
        if self.t < 0.0 {
            return Err(Error::InvalidConfig("t must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Step-by-step record of one search run.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SearchTrace1D {
    /// Successive intervals, starting from the full rectangle (recorded only
    /// when the config asks for a trace).
    pub intervals: Vec<(f64, f64)>,
    /// Test values in step order (same gating).
    pub test_values: Vec<f64>,
    /// Number of tests computed, always maintained.
    pub test_count: usize,
}

/// Result of a search run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Estimate1D {
    pub theta_hat: f64,
    pub interval: (f64, f64),
    pub trace: SearchTrace1D,
    pub config: EstimatorConfig1D,
    /// Set when `Optimal` was requested but the family has no closed
    /// geometry and the distance-based rule was used instead.
    pub radius_rule_fallback: bool,
}

/// Both endpoint radii for the current pair `m <= theta < theta' <= M`:
/// `r_bar` limits how far the lower endpoint may move up, `r_under` how far
/// the upper endpoint may move down. Returns the radii and whether a
/// fallback from the exact rule occurred.
pub fn radius_pair_1d(
    model: &Model,
    theta: f64,
    theta_prime: f64,
    kappa: f64,
    rule: RadiusRule1D,
    quad: &QuadratureSpec,
) -> Result<(f64, f64, bool)> {
    debug_assert!(theta < theta_prime);
    let alpha = model.constants().alpha(0);
    let r_up = model.constants().r_upper(0);
    match rule {
        RadiusRule1D::Optimal => {
            let h2 = distance::hellinger_sq(model, &[theta], &[theta_prime], quad)?;
            let xi = kappa * h2;
            let up = geometry::optimal_radius_1d(model.family(), theta, xi, Direction::Up);
            let down = geometry::optimal_radius_1d(model.family(), theta_prime, xi, Direction::Down);
            match (up, down) {
                (Some(r_bar), Some(r_under)) => Ok((r_bar, r_under, false)),
                _ => {
                    let r = (xi / r_up).powf(1.0 / alpha);
                    Ok((r, r, true))
                }
            }
        }
        RadiusRule1D::HellingerBased => {
            let h2 = distance::hellinger_sq(model, &[theta], &[theta_prime], quad)?;
            let r = (kappa * h2 / r_up).powf(1.0 / alpha);
            Ok((r, r, false))
        }
        RadiusRule1D::Parametric => {
            let r_low = model.constants().r_lower(0);
            let r = (kappa * r_low / r_up).powf(1.0 / alpha) * (theta_prime - theta);
            Ok((r, r, false))
        }
    }
}

/// Run the interval search on a sample.
pub fn estimate_1d(model: &Model, sample: &Sample, config: &EstimatorConfig1D) -> Result<Estimate1D> {
    config.validate(model)?;
    let quad = QuadratureSpec::default();
    let grid = GridSpec::new(model, &[config.t], sample.n())?;

    let m = model.rect().lower(0);
    let mm = model.rect().upper(0);
    let mut lo = m;
    let mut hi = mm;
    let mut trace = SearchTrace1D::default();
    if config.record_trace {
        trace.intervals.push((lo, hi));
    }
    let mut fallback = false;

    while hi - lo > config.eta {
        if trace.test_count >= config.max_iterations {
            return Err(Error::IterationCapExceeded {
                stage: "interval search",
                cap: config.max_iterations,
            });
        }
        let (r_bar, r_under, fb) =
            radius_pair_1d(model, lo, hi, config.kappa, config.radius_rule, &quad)?;
        fallback |= fb;
        let half = 0.5 * (hi - lo);
        let r = r_bar.min(half);
        let r_prime = r_under.min(half);

        let test = test_statistic(model, &[lo], &[hi], sample.values(), &grid, &quad)?;
        trace.test_count += 1;
        if config.record_trace {
            trace.test_values.push(test.value);
        }

        // Both branches fire on an exact tie; the confidence argument
        // excludes a ball around each endpoint in that event.
        if test.value >= 0.0 {
            lo += r;
        }
        if test.value <= 0.0 {
            hi -= r_prime;
        }
        if config.record_trace {
            trace.intervals.push((lo, hi));
        }
    }

    Ok(Estimate1D {
        theta_hat: 0.5 * (lo + hi),
        interval: (lo, hi),
        trace,
        config: config.clone(),
        radius_rule_fallback: fallback,
    })
}

/// Upper bound on the number of tests the interval search computes, valid
/// whenever the radii dominate the parametric rule:
/// `1 + max((R_upper/(kappa R_lower))^(1/alpha), 1/ln 2) * ln((M - m)/eta)`.
pub fn test_count_bound_1d(model: &Model, kappa: f64, eta: f64) -> f64 {
    let alpha = model.constants().alpha(0);
    let ratio = model.constants().r_upper(0) / (kappa * model.constants().r_lower(0));
    let lead = ratio.powf(1.0 / alpha).max(1.0 / std::f64::consts::LN_2);
    let span = (model.rect().width(0) / eta).ln().max(0.0);
    1.0 + lead * span
}
