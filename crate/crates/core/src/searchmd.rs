//! Rectangle-shrinking estimation for multidimensional models.
//!
//! Each outer step selects the coordinate whose scaled width dominates,
//! anchors a lower probe on the `a_k` face and an upper probe on the `b_k`
//! face, and sweeps both probes across the remaining coordinates. Sweep
//! steps use per-coordinate ball radii; the running minimum of the radii
//! seen along a completed sweep is how far the face can safely move. The
//! outer loop stops when every side is narrower than its `eta_j`, and the
//! estimate is the center of the final rectangle.

use serde::{Deserialize, Serialize};

use crate::distance;
use crate::error::{Error, Result};
use crate::models::geometry;
use crate::models::{Model, ParamRect, Sample};
use crate::quad::QuadratureSpec;
use crate::search1d::kappa_bar;
use crate::testing::{test_statistic, GridSpec};

/// Radius strategy for the rectangle sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadiusRuleMD {
    /// Per-family ball rectangles (exact or sufficient-condition closed
    /// geometry); errors on families without one.
    Geometry,
    /// Componentwise `((kappa / R_upper_j) h^2)^(1/alpha_j)`.
    HellingerBased,
    /// Componentwise
    /// `((kappa / R_upper_j) sup_k R_lower_k |theta'_k - theta_k|^alpha_k)^(1/alpha_j)`,
    /// needing no distance evaluation.
    Parametric,
}

/// Whether the coordinate-selection constants are refreshed per rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RectConstantsMode {
    /// Use the catalog constants everywhere.
    Global,
    /// Recompute lower constants on each rectangle (available for the
    /// Gaussian and shifted-exponential families).
    PerRectangle,
}

/// Rectangle-local regularity constants actually used by a step.
#[derive(Debug, Clone, PartialEq)]
pub struct RectConstants {
    pub r_lower: Vec<f64>,
    pub r_upper: Vec<f64>,
}

/// Constants for `rect` under the requested mode. Per-rectangle refinements
/// never fall below the global constants.
pub fn rect_constants(model: &Model, rect: &ParamRect, mode: RectConstantsMode) -> Result<RectConstants> {
    let d = model.dim();
    let global_lower: Vec<f64> = (0..d).map(|j| model.constants().r_lower(j)).collect();
    let r_upper: Vec<f64> = (0..d).map(|j| model.constants().r_upper(j)).collect();
    let r_lower = match mode {
        RectConstantsMode::Global => global_lower,
        RectConstantsMode::PerRectangle => {
            let refined = geometry::rect_lower_constants(model.family(), rect).ok_or_else(|| {
                Error::Unsupported(format!(
                    "per-rectangle constants are not available for `{}`",
                    model.name()
                ))
            })?;
            refined
                .into_iter()
                .zip(global_lower)
                .map(|(r, g)| r.max(g))
                .collect()
        }
    };
    Ok(RectConstants { r_lower, r_upper })
}

/// Configuration of the multidimensional search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfigMD {
    pub kappa: f64,
    /// Grid thinness per coordinate (0 disables discretization).
    pub t: Vec<f64>,
    /// Stopping widths per coordinate.
    pub eta: Vec<f64>,
    pub radius_rule: RadiusRuleMD,
    /// Sweep orders: `sweep_maps[j]` enumerates the coordinates other than
    /// `j` in the order the probes advance them. `None` means increasing
    /// order, the reproducible canonical choice.
    pub sweep_maps: Option<Vec<Vec<usize>>>,
    pub rect_constants_mode: RectConstantsMode,
    pub max_outer_steps: usize,
    /// Cap on the total number of tests across all steps.
    pub max_tests: usize,
    pub record_trace: bool,
}

impl EstimatorConfigMD {
    /// Defaults used in the bidimensional studies: no discretization,
    /// `kappa` at 0.9 of the critical value, per-side `eta` at 1e-6 of the
    /// width, the closed ball geometry, and per-rectangle constants for the
    /// two families that have them.
    pub fn defaults_for(model: &Model) -> Self {
        let d = model.dim();
        let rule = if geometry::ball_rectangle_md(model.family(), &model.rect().center(), model.rect(), 0.01).is_some() {
            RadiusRuleMD::Geometry
        } else {
            RadiusRuleMD::HellingerBased
        };
        let mode = if geometry::rect_lower_constants(model.family(), model.rect()).is_some() {
            RectConstantsMode::PerRectangle
        } else {
            RectConstantsMode::Global
        };
        Self {
            kappa: 0.9 * kappa_bar(),
            t: vec![0.0; d],
            eta: (0..d).map(|j| model.rect().width(j) * 1e-6).collect(),
            radius_rule: rule,
            sweep_maps: None,
            rect_constants_mode: mode,
            max_outer_steps: 100_000,
            max_tests: 200_000_000,
            record_trace: true,
        }
    }

    pub fn validate(&self, model: &Model) -> Result<()> {
        let d = model.dim();
        if d < 2 {
            return Err(Error::InvalidConfig(format!(
                "`{}` is unidimensional; the rectangle search needs d >= 2",
                model.name()
            )));
        }
        if !(self.kappa > 0.0 && self.kappa < kappa_bar()) {
            return Err(Error::InvalidConfig(format!(
                "kappa = {} must lie in (0, {:.16})",
                self.kappa,
                kappa_bar()
            )));
        }
        if self.eta.len() != d || self.eta.iter().any(|&e| !(e > 0.0)) {
            return Err(Error::InvalidConfig("eta must have d positive components".into()));
        }
        if self.t.len() != d {
            return Err(Error::InvalidConfig("t must have d components".into()));
        }
        if let Some(maps) = &self.sweep_maps {
            if maps.len() != d {
                return Err(Error::InvalidConfig("need one sweep map per coordinate".into()));
            }
            for (j, map) in maps.iter().enumerate() {
                let mut seen = vec![false; d];
                if map.len() != d - 1 {
                    return Err(Error::InvalidConfig(format!("sweep map {j} must have d-1 entries")));
                }
                for &c in map {
                    if c >= d || c == j || seen[c] {
                        return Err(Error::InvalidConfig(format!(
                            "sweep map {j} is not a bijection onto the other coordinates"
                        )));
                    }
                    seen[c] = true;
                }
            }
        }
        if self.radius_rule == RadiusRuleMD::Geometry
            && geometry::ball_rectangle_md(model.family(), &model.rect().center(), model.rect(), 0.01).is_none()
        {
            return Err(Error::Unsupported(format!(
                "`{}` has no closed ball geometry; choose another radius rule",
                model.name()
            )));
        }
        if self.rect_constants_mode == RectConstantsMode::PerRectangle
            && geometry::rect_lower_constants(model.family(), model.rect()).is_none()
        {
            return Err(Error::Unsupported(format!(
                "`{}` has no per-rectangle constants; use the global mode",
                model.name()
            )));
        }
        Ok(())
    }

    fn sweep_order(&self, k: usize, d: usize) -> Vec<usize> {
        match &self.sweep_maps {
            Some(maps) => maps[k].clone(),
            None => (0..d).filter(|&j| j != k).collect(),
        }
    }
}

/// Record of one multidimensional run.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SearchTraceMD {
    /// Rectangle after every outer step (bounds as `(lower, upper)` pairs),
    /// starting from the full rectangle; recorded only when tracing.
    pub rectangles: Vec<(Vec<f64>, Vec<f64>)>,
    /// Tests per outer step (always maintained).
    pub inner_counts: Vec<usize>,
    /// Total number of tests.
    pub test_count: usize,
}

/// Result of a multidimensional run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimateMD {
    pub theta_hat: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub trace: SearchTraceMD,
    pub config: EstimatorConfigMD,
}

/// Select the working coordinate: the argmax of
/// `R_lower_j (b_j - a_j)^alpha_j`, ties resolved to the smallest index.
pub fn select_coordinate(rect_bounds: (&[f64], &[f64]), constants: &RectConstants, alpha: &[f64]) -> usize {
    let (lower, upper) = rect_bounds;
    let mut best = 0usize;
    let mut best_score = f64::NEG_INFINITY;
    for j in 0..lower.len() {
        let score = constants.r_lower[j] * (upper[j] - lower[j]).powf(alpha[j]);
        if score > best_score {
            best = j;
            best_score = score;
        }
    }
    best
}

/// All radii needed for one probe pair.
struct ProbeRadii {
    /// Upward radii at the lower probe, all coordinates.
    up_lower: Vec<f64>,
    /// Upward radii at the upper probe, all coordinates.
    up_upper: Vec<f64>,
    /// Downward radius at the upper probe in the working coordinate.
    down_upper_k: f64,
}

/// Componentwise radii for both probes under a given rule.
///
/// Exposed form: the `(r_bar, r_under)` vectors around a single probe,
/// as the spec's radius operation; `r_bar` holds the upward and `r_under`
/// the downward components.
pub fn radius_vector_md(
    model: &Model,
    rect: &ParamRect,
    theta: &[f64],
    theta_prime: &[f64],
    kappa: f64,
    rule: RadiusRuleMD,
    constants: &RectConstants,
    quad: &QuadratureSpec,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = model.dim();
    match rule {
        RadiusRuleMD::Geometry => {
            let h2 = distance::hellinger_sq(model, theta, theta_prime, quad)?;
            let xi = kappa * h2;
            let (down, up) = geometry::ball_rectangle_md(model.family(), theta, rect, xi)
                .ok_or_else(|| Error::Unsupported(format!("no ball geometry for `{}`", model.name())))?;
            Ok((up, down))
        }
        RadiusRuleMD::HellingerBased => {
            let h2 = distance::hellinger_sq(model, theta, theta_prime, quad)?;
            let r: Vec<f64> = (0..d)
                .map(|j| (kappa * h2 / constants.r_upper[j]).powf(1.0 / model.constants().alpha(j)))
                .collect();
            Ok((r.clone(), r))
        }
        RadiusRuleMD::Parametric => {
            let mut sup = 0.0f64;
            for k in 0..d {
                sup = sup.max(
                    constants.r_lower[k]
                        * (theta_prime[k] - theta[k]).abs().powf(model.constants().alpha(k)),
                );
            }
            let r: Vec<f64> = (0..d)
                .map(|j| (kappa * sup / constants.r_upper[j]).powf(1.0 / model.constants().alpha(j)))
                .collect();
            Ok((r.clone(), r))
        }
    }
}

struct Search<'a> {
    model: &'a Model,
    sample: &'a Sample,
    config: &'a EstimatorConfigMD,
    grid: GridSpec,
    quad: QuadratureSpec,
}

impl Search<'_> {
    fn probe_radii(
        &self,
        rect: &ParamRect,
        constants: &RectConstants,
        theta: &[f64],
        theta_prime: &[f64],
        k: usize,
    ) -> Result<ProbeRadii> {
        match self.config.radius_rule {
            RadiusRuleMD::Geometry => {
                let h2 = distance::hellinger_sq(self.model, theta, theta_prime, &self.quad)?;
                let xi = self.config.kappa * h2;
                let fam = self.model.family();
                let (_, up_lower) = geometry::ball_rectangle_md(fam, theta, rect, xi)
                    .ok_or_else(|| Error::Unsupported("missing ball geometry".into()))?;
                let (down_upper, up_upper) = geometry::ball_rectangle_md(fam, theta_prime, rect, xi)
                    .ok_or_else(|| Error::Unsupported("missing ball geometry".into()))?;
                Ok(ProbeRadii { up_lower, up_upper, down_upper_k: down_upper[k] })
            }
            RadiusRuleMD::HellingerBased | RadiusRuleMD::Parametric => {
                let (up, down) = radius_vector_md(
                    self.model,
                    rect,
                    theta,
                    theta_prime,
                    self.config.kappa,
                    self.config.radius_rule,
                    constants,
                    &self.quad,
                )?;
                // Symmetric rules: identical at both probes.
                Ok(ProbeRadii { up_lower: up.clone(), up_upper: up, down_upper_k: down[k] })
            }
        }
    }

    /// One outer step: shrink the working coordinate of `rect`.
    fn step(&self, rect: &ParamRect, tests_so_far: usize) -> Result<(ParamRect, usize)> {
        let d = self.model.dim();
        let constants = rect_constants(self.model, rect, self.config.rect_constants_mode)?;
        let alpha: Vec<f64> = (0..d).map(|j| self.model.constants().alpha(j)).collect();
        let lower: Vec<f64> = (0..d).map(|j| rect.lower(j)).collect();
        let upper: Vec<f64> = (0..d).map(|j| rect.upper(j)).collect();
        let k = select_coordinate((&lower, &upper), &constants, &alpha);
        let sweep = self.config.sweep_order(k, d);

        let mut theta = lower.clone();
        let mut theta_prime = lower.clone();
        theta_prime[k] = upper[k];

        let init = self.probe_radii(rect, &constants, &theta, &theta_prime, k)?;
        let mut eps = init.up_lower.clone();
        let mut eps_prime = init.up_upper.clone();
        let half = 0.5 * (upper[k] - lower[k]);
        eps[k] = half;
        eps_prime[k] = half;

        let mut tests = 0usize;
        let (mut lower_done, mut upper_done);
        loop {
            if tests_so_far + tests >= self.config.max_tests {
                return Err(Error::IterationCapExceeded {
                    stage: "rectangle sweep",
                    cap: self.config.max_tests,
                });
            }
            let test = test_statistic(
                self.model,
                &theta,
                &theta_prime,
                self.sample.values(),
                &self.grid,
                &self.quad,
            )?;
            tests += 1;
            let radii = self.probe_radii(rect, &constants, &theta, &theta_prime, k)?;
            lower_done = false;
            upper_done = false;

            if test.value >= 0.0 {
                eps[sweep[0]] = radii.up_lower[sweep[0]];
                for &j in &sweep[1..] {
                    eps[j] = eps[j].min(radii.up_lower[j]);
                }
                eps[k] = eps[k].min(radii.up_lower[k]);
                match sweep.iter().position(|&j| theta[j] + eps[j] < upper[j]) {
                    Some(pos) => {
                        for &j in &sweep[..pos] {
                            theta[j] = lower[j];
                        }
                        theta[sweep[pos]] += eps[sweep[pos]];
                    }
                    None => lower_done = true,
                }
            }
            if test.value <= 0.0 {
                eps_prime[sweep[0]] = radii.up_upper[sweep[0]];
                for &j in &sweep[1..] {
                    eps_prime[j] = eps_prime[j].min(radii.up_upper[j]);
                }
                eps_prime[k] = eps_prime[k].min(radii.down_upper_k);
                match sweep.iter().position(|&j| theta_prime[j] + eps_prime[j] < upper[j]) {
                    Some(pos) => {
                        for &j in &sweep[..pos] {
                            theta_prime[j] = lower[j];
                        }
                        theta_prime[sweep[pos]] += eps_prime[sweep[pos]];
                    }
                    None => upper_done = true,
                }
            }
            if lower_done || upper_done {
                break;
            }
        }

        let mut new_lower = lower;
        let mut new_upper = upper;
        if lower_done {
            new_lower[k] += eps[k];
        }
        if upper_done {
            new_upper[k] -= eps_prime[k];
        }
        Ok((rect.sub(new_lower, new_upper)?, tests))
    }
}

/// One rectangle step in isolation; the estimator loop below is the main
/// entry point.
pub fn step_rectangle(
    model: &Model,
    sample: &Sample,
    rect: &ParamRect,
    config: &EstimatorConfigMD,
) -> Result<(ParamRect, usize)> {
    config.validate(model)?;
    let search = Search {
        model,
        sample,
        config,
        grid: GridSpec::new(model, &config.t, sample.n())?,
        quad: QuadratureSpec::default(),
    };
    search.step(rect, 0)
}

/// Run the rectangle search on a sample.
pub fn estimate_md(model: &Model, sample: &Sample, config: &EstimatorConfigMD) -> Result<EstimateMD> {
    config.validate(model)?;
    let d = model.dim();
    let search = Search {
        model,
        sample,
        config,
        grid: GridSpec::new(model, &config.t, sample.n())?,
        quad: QuadratureSpec::default(),
    };

    let mut rect = model.rect().clone();
    let mut trace = SearchTraceMD::default();
    if config.record_trace {
        trace.rectangles.push(bounds_of(&rect));
    }
    let mut outer = 0usize;
    while (0..d).any(|j| rect.width(j) > config.eta[j]) {
        if outer >= config.max_outer_steps {
            return Err(Error::IterationCapExceeded {
                stage: "rectangle search",
                cap: config.max_outer_steps,
            });
        }
        let (next, tests) = search.step(&rect, trace.test_count)?;
        trace.test_count += tests;
        trace.inner_counts.push(tests);
        if config.record_trace {
            trace.rectangles.push(bounds_of(&next));
        }
        rect = next;
        outer += 1;
    }

    Ok(EstimateMD {
        theta_hat: rect.center(),
        lower: (0..d).map(|j| rect.lower(j)).collect(),
        upper: (0..d).map(|j| rect.upper(j)).collect(),
        trace,
        config: config.clone(),
    })
}

fn bounds_of(rect: &ParamRect) -> (Vec<f64>, Vec<f64>) {
    let d = rect.dim();
    ((0..d).map(|j| rect.lower(j)).collect(), (0..d).map(|j| rect.upper(j)).collect())
}

/// Upper bound on the total number of tests:
/// `4 prod_j (1 + (R_upper_j/(kappa R_lower_j))^(1/alpha_j))
///    * sum_j max(1, ln((M_j - m_j)/eta_j))`.
pub fn test_count_bound_md(model: &Model, kappa: f64, eta: &[f64]) -> f64 {
    let d = model.dim();
    let mut prod = 1.0;
    let mut sum = 0.0;
    for j in 0..d {
        let ratio = model.constants().r_upper(j) / (kappa * model.constants().r_lower(j));
        prod *= 1.0 + ratio.powf(1.0 / model.constants().alpha(j));
        sum += (model.rect().width(j) / eta[j]).ln().max(1.0);
    }
    4.0 * prod * sum
}
