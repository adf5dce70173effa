//! Model catalog: parametric families with their parameter rectangles,
//! regularity constants, samplers and closed forms.
//!
//! Eight unidimensional and six bidimensional models are addressable by
//! string identifier. Each carries constants `(alpha_j, R_lower_j,
//! R_upper_j)` for which the two-sided bound
//!
//! ```text
//! sup_j R_lower_j |theta_j - theta'_j|^alpha_j
//!     <= h^2(f_theta, f_theta')
//!     <= sup_j R_upper_j |theta_j - theta'_j|^alpha_j
//! ```
//!
//! holds over the whole rectangle. Where the constants are not forced by a
//! closed distance formula they were fixed from a dense numerical scan of
//! the distance-to-parameter ratio (with margin below the observed infimum)
//! and are re-verified by `verify_assumption1`.

mod family;
pub mod geometry;
pub mod sampler;

use std::path::{Path, PathBuf};

pub use family::Family;
pub use sampler::{rng_from_seed, Rng};

use crate::error::{Error, Result};
use crate::quad::QuadratureSpec;

/// Axis-aligned parameter rectangle `prod_j [lower_j, upper_j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamRect {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl ParamRect {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::InvalidParameter(
                "rectangle needs matching, nonempty bound vectors".into(),
            ));
        }
        for (l, u) in lower.iter().zip(upper.iter()) {
            if !(l.is_finite() && u.is_finite() && l < u) {
                return Err(Error::InvalidParameter(format!(
                    "rectangle side [{l}, {u}] is not a nondegenerate finite interval"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self, j: usize) -> f64 {
        self.lower[j]
    }

    pub fn upper(&self, j: usize) -> f64 {
        self.upper[j]
    }

    pub fn width(&self, j: usize) -> f64 {
        self.upper[j] - self.lower[j]
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| 0.5 * (l + u))
            .collect()
    }

    pub fn contains(&self, theta: &[f64]) -> bool {
        theta.len() == self.dim()
            && theta
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(t, (l, u))| t.is_finite() && *t >= *l && *t <= *u)
    }

    /// Componentwise projection onto the rectangle.
    pub fn clamp(&self, theta: &[f64]) -> Vec<f64> {
        theta
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(t, (l, u))| t.clamp(*l, *u))
            .collect()
    }

    /// The sub-rectangle `prod_j [a_j, b_j]`; bounds are not checked beyond
    /// the usual rectangle invariants.
    pub fn sub(&self, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        Self::new(lower, upper)
    }
}

/// Regularity constants of the two-sided Hellinger/parameter bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Regularity {
    alpha: Vec<f64>,
    r_lower: Vec<f64>,
    r_upper: Vec<f64>,
}

impl Regularity {
    pub fn new(alpha: Vec<f64>, r_lower: Vec<f64>, r_upper: Vec<f64>) -> Result<Self> {
        let d = alpha.len();
        if d == 0 || r_lower.len() != d || r_upper.len() != d {
            return Err(Error::InvalidParameter("constant vectors must share a positive length".into()));
        }
        for j in 0..d {
            if !(alpha[j] > 0.0 && r_lower[j] > 0.0 && r_lower[j] <= r_upper[j]) {
                return Err(Error::InvalidParameter(format!(
                    "need 0 < R_lower <= R_upper and alpha > 0 in coordinate {j}"
                )));
            }
        }
        Ok(Self { alpha, r_lower, r_upper })
    }

    pub fn alpha(&self, j: usize) -> f64 {
        self.alpha[j]
    }

    pub fn r_lower(&self, j: usize) -> f64 {
        self.r_lower[j]
    }

    pub fn r_upper(&self, j: usize) -> f64 {
        self.r_upper[j]
    }

    /// `sup_j c_j |delta_j|^alpha_j` for a constant selector.
    fn sup_weighted(&self, a: &[f64], b: &[f64], coef: &[f64]) -> f64 {
        let mut sup = 0.0f64;
        for j in 0..self.alpha.len() {
            let term = coef[j] * (a[j] - b[j]).abs().powf(self.alpha[j]);
            sup = sup.max(term);
        }
        sup
    }

    pub fn lower_envelope(&self, a: &[f64], b: &[f64]) -> f64 {
        self.sup_weighted(a, b, &self.r_lower)
    }

    pub fn upper_envelope(&self, a: &[f64], b: &[f64]) -> f64 {
        self.sup_weighted(a, b, &self.r_upper)
    }
}

/// A fully specified parametric model.
#[derive(Debug, Clone)]
pub struct Model {
    name: String,
    family: Family,
    rect: ParamRect,
    constants: Regularity,
}

impl Model {
    fn new(name: &str, family: Family, rect: ParamRect, constants: Regularity) -> Self {
        debug_assert_eq!(family.dim(), rect.dim());
        debug_assert_eq!(rect.dim(), constants.alpha.len());
        Self { name: name.into(), family, rect, constants }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn dim(&self) -> usize {
        self.rect.dim()
    }

    pub fn rect(&self) -> &ParamRect {
        &self.rect
    }

    pub fn constants(&self) -> &Regularity {
        &self.constants
    }

    pub fn translation_even(&self) -> bool {
        self.family.translation_even()
    }

    pub fn density(&self, theta: &[f64], x: f64) -> f64 {
        self.family.density(theta, x)
    }

    pub fn log_density(&self, theta: &[f64], x: f64) -> f64 {
        self.family.log_density(theta, x)
    }

    pub fn cdf(&self, theta: &[f64], x: f64) -> f64 {
        self.family.cdf(theta, x)
    }

    /// Closed-form MLE clamped to the parameter rectangle, if the family has
    /// one.
    pub fn closed_mle(&self, values: &[f64]) -> Option<Vec<f64>> {
        self.family.closed_mle(values).map(|t| self.rect.clamp(&t))
    }

    pub fn check_in_rect(&self, theta: &[f64]) -> Result<()> {
        if self.rect.contains(theta) {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "parameter {theta:?} outside the rectangle of `{}`",
                self.name
            )))
        }
    }
}

/// Identifiers of the fourteen catalog models, in catalog order.
pub const CATALOG_NAMES: [&str; 14] = [
    "exp-rate",
    "gauss-loc",
    "rayleigh",
    "cauchy-loc",
    "unif-scale",
    "pareto-shift",
    "unif-loc",
    "sqrt-singular",
    "gauss-2d",
    "cauchy-2d",
    "gamma-2d",
    "beta-2d",
    "shiftexp-2d",
    "unif-locscale-2d",
];

// Lower regularity constants without a closed derivation, frozen from dense
// numerical scans of h^2 / sup_j |delta_j|^alpha_j over the rectangle (the
// quoted values sit below the scanned infima and below the small-move Fisher
// limits at the worst corners).
const CAUCHY_LOC_R_LOWER: f64 = 1.9e-3; // scan infimum 1.9139e-3 at full width
const CAUCHY_2D_R_LOWER: f64 = 1.5e-3; // scan infimum 1.6537e-3
const GAMMA_2D_R_LOWER: f64 = 8.0e-5; // Fisher limit ~1.016e-4 at (0.6, 20)
const BETA_2D_R_LOWER: f64 = 9.0e-5; // Fisher limit ~1.11e-4 near (20, 0.8)
const UNIF_LOCSCALE_R_LOWER: f64 = 0.25; // exact infimum of the ratio

fn build(name: &str) -> Result<Model> {
    let model = match name {
        "exp-rate" => {
            let (m, mm) = (0.01, 100.0);
            Model::new(
                name,
                Family::ExpRate,
                ParamRect::new(vec![m], vec![mm])?,
                // h^2 = (t - t')^2 / ((t + t')(sqrt t + sqrt t')^2); the ratio
                // to (t - t')^2 is monotone, extremal on the diagonal corners.
                Regularity::new(vec![2.0], vec![1.0 / (8.0 * mm * mm)], vec![1.0 / (8.0 * m * m)])?,
            )
        }
        "gauss-loc" => {
            let w: f64 = 200.0;
            Model::new(
                name,
                Family::GaussLoc,
                ParamRect::new(vec![-100.0], vec![100.0])?,
                // h^2 = 1 - exp(-d^2/8): the ratio to d^2 decreases from 1/8.
                Regularity::new(
                    vec![2.0],
                    vec![-(-w * w / 8.0).exp_m1() / (w * w)],
                    vec![0.125],
                )?,
            )
        }
        "rayleigh" => {
            let (m, mm) = (0.01, 100.0);
            Model::new(
                name,
                Family::Rayleigh,
                ParamRect::new(vec![m], vec![mm])?,
                // h^2 = (t - t')^2 / (t^2 + t'^2).
                Regularity::new(vec![2.0], vec![1.0 / (2.0 * mm * mm)], vec![1.0 / (2.0 * m * m)])?,
            )
        }
        "cauchy-loc" => Model::new(
            name,
            Family::CauchyLoc,
            ParamRect::new(vec![-10.0], vec![10.0])?,
            Regularity::new(vec![2.0], vec![CAUCHY_LOC_R_LOWER], vec![1.0 / 16.0])?,
        ),
        "unif-scale" => {
            let (m, mm) = (0.01, 10.0);
            Model::new(
                name,
                Family::UnifScale,
                ParamRect::new(vec![m], vec![mm])?,
                Regularity::new(vec![1.0], vec![1.0 / (2.0 * mm)], vec![1.0 / (2.0 * m)])?,
            )
        }
        "pareto-shift" => {
            let w: f64 = 20.0;
            Model::new(
                name,
                Family::ParetoShift,
                ParamRect::new(vec![-10.0], vec![10.0])?,
                // h^2(d) = 1 - ln(1 + d)/d; the ratio to d decreases from 1/2.
                Regularity::new(vec![1.0], vec![(1.0 - (1.0 + w).ln() / w) / w], vec![0.5])?,
            )
        }
        "unif-loc" => Model::new(
            name,
            Family::UnifLoc,
            ParamRect::new(vec![-10.0], vec![10.0])?,
            // h^2 = min(|d|, 1).
            Regularity::new(vec![1.0], vec![0.05], vec![1.0])?,
        ),
        "sqrt-singular" => Model::new(
            name,
            Family::SqrtSingular,
            ParamRect::new(vec![-1.0], vec![1.0])?,
            Regularity::new(vec![0.5], vec![0.17], vec![std::f64::consts::FRAC_1_SQRT_2])?,
        ),
        "gauss-2d" => {
            let rect = ParamRect::new(vec![-5.0, 0.2], vec![5.0, 5.0])?;
            let r_lower = geometry::rect_lower_constants(Family::Gauss2d, &rect)
                .expect("gauss-2d has rectangle constants");
            let s_lo = rect.lower(1);
            Model::new(
                name,
                Family::Gauss2d,
                rect,
                Regularity::new(
                    vec![2.0, 2.0],
                    r_lower,
                    // From h^2 <= dm^2/(8 s_lo^2) + ds^2/(4 s_lo^2), doubled to
                    // dominate the two-term sum by a single sup.
                    vec![1.0 / (4.0 * s_lo * s_lo), 1.0 / (2.0 * s_lo * s_lo)],
                )?,
            )
        }
        "cauchy-2d" => {
            let rect = ParamRect::new(vec![-5.0, 0.2], vec![5.0, 5.0])?;
            let s_lo = rect.lower(1);
            let up = 1.0 / (4.0 * s_lo * s_lo);
            Model::new(
                name,
                Family::Cauchy2d,
                rect,
                Regularity::new(vec![2.0, 2.0], vec![CAUCHY_2D_R_LOWER; 2], vec![up, up])?,
            )
        }
        "gamma-2d" => {
            let rect = ParamRect::new(vec![0.6, 0.1], vec![10.0, 20.0])?;
            let psi_a_lo = crate::distance::trigamma(rect.lower(0))?;
            let b_lo = rect.lower(1);
            let a_hi = rect.upper(0);
            Model::new(
                name,
                Family::Gamma2d,
                rect,
                // Shape move: h^2 <= trigamma(a_lo) da^2 / 8 per slice; rate
                // move: 1 - x^a <= max(a,1)(1-x) and 1 - 2 sqrt(bb')/(b+b')
                // <= db^2/(8 b_lo^2); both doubled twice (triangle split plus
                // sum-to-sup domination).
                Regularity::new(
                    vec![2.0, 2.0],
                    vec![GAMMA_2D_R_LOWER; 2],
                    vec![0.5 * psi_a_lo, a_hi / (2.0 * b_lo * b_lo)],
                )?,
            )
        }
        "beta-2d" => {
            let rect = ParamRect::new(vec![0.7, 0.7], vec![20.0, 20.0])?;
            let span = crate::distance::trigamma(rect.lower(0))?
                - crate::distance::trigamma(rect.upper(0) + rect.lower(1))?;
            Model::new(
                name,
                Family::Beta2d,
                rect,
                Regularity::new(vec![2.0, 2.0], vec![BETA_2D_R_LOWER; 2], vec![0.5 * span, 0.5 * span])?,
            )
        }
        "shiftexp-2d" => {
            let rect = ParamRect::new(vec![-1.0, 0.2], vec![1.0, 5.0])?;
            let r_lower = geometry::rect_lower_constants(Family::ShiftExp2d, &rect)
                .expect("shiftexp-2d has rectangle constants");
            let l_lo = rect.lower(1);
            let l_hi = rect.upper(1);
            Model::new(
                name,
                Family::ShiftExp2d,
                rect,
                Regularity::new(
                    vec![1.0, 2.0],
                    r_lower,
                    vec![l_hi, 1.0 / (4.0 * l_lo * l_lo)],
                )?,
            )
        }
        "unif-locscale-2d" => {
            let rect = ParamRect::new(vec![-0.5, 0.1], vec![0.5, 2.0])?;
            let r_lo = rect.lower(1);
            Model::new(
                name,
                Family::UnifLocScale2d,
                rect,
                Regularity::new(
                    vec![1.0, 1.0],
                    vec![UNIF_LOCSCALE_R_LOWER; 2],
                    vec![2.0 / r_lo, 1.0 / r_lo],
                )?,
            )
        }
        _ => return Err(Error::UnknownModel(name.into())),
    };
    Ok(model)
}

/// Look up a catalog model by identifier.
pub fn catalog_lookup(name: &str) -> Result<Model> {
    build(name)
}

/// A Gaussian location-scale model on a caller-chosen rectangle (the
/// robustness studies use a wider box than the catalog model).
pub fn gaussian_loc_scale(rect: ParamRect) -> Result<Model> {
    if rect.dim() != 2 || rect.lower(1) <= 0.0 {
        return Err(Error::InvalidParameter(
            "gaussian location-scale needs a 2-d rectangle with positive scale".into(),
        ));
    }
    let r_lower =
        geometry::rect_lower_constants(Family::Gauss2d, &rect).expect("gaussian rectangle constants");
    let s_lo = rect.lower(1);
    let constants = Regularity::new(
        vec![2.0, 2.0],
        r_lower,
        vec![1.0 / (4.0 * s_lo * s_lo), 1.0 / (2.0 * s_lo * s_lo)],
    )?;
    Ok(Model::new("gauss-2d-custom", Family::Gauss2d, rect, constants))
}

/// Synthetic two-parameter family used to cross-check the multidimensional
/// search against coordinatewise behaviour: a half-half mixture of two unit
/// Gaussians at locations `theta_1 - 50` and `theta_2 + 50`. The supports of
/// the bumps are numerically disjoint, so its squared Hellinger distance is
/// the coordinatewise average of two Gaussian-location distances.
pub fn split_gauss_pair() -> Model {
    let rect = ParamRect::new(vec![-5.0, -5.0], vec![5.0, 5.0]).expect("static rectangle");
    let w: f64 = 10.0;
    let low = 0.5 * -(-w * w / 8.0).exp_m1() / (w * w);
    let constants =
        Regularity::new(vec![2.0, 2.0], vec![low, low], vec![0.125, 0.125]).expect("static constants");
    Model::new("split-gauss-pair", Family::SplitGaussPair, rect, constants)
}

/// Where a sample came from, for reproducibility bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Seeded { seed: u64 },
    File(PathBuf),
    Synthetic,
}

/// An ordered batch of real observations.
#[derive(Debug, Clone)]
pub struct Sample {
    values: Vec<f64>,
    provenance: Provenance,
}

impl Sample {
    pub fn new(values: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSample("sample is empty".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidSample(format!("non-finite observation {bad}")));
        }
        Ok(Self { values, provenance })
    }

    /// Read one observation per line of plain decimal text; blank lines are
    /// skipped.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut values = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let v: f64 = line.parse().map_err(|_| {
                Error::InvalidSample(format!("line {}: `{line}` is not a number", i + 1))
            })?;
            values.push(v);
        }
        Self::new(values, Provenance::File(path.to_path_buf()))
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
        v
    }
}

/// Draw `n` i.i.d. observations from `f_theta`. Identical `(theta, n, seed)`
/// reproduce the sample bit-exactly.
pub fn draw_sample(model: &Model, theta: &[f64], n: usize, seed: u64) -> Result<Sample> {
    model.check_in_rect(theta)?;
    if n == 0 {
        return Err(Error::InvalidSample("requested zero observations".into()));
    }
    let mut rng = rng_from_seed(seed);
    let values = (0..n).map(|_| model.family.sample(theta, &mut rng)).collect();
    Sample::new(values, Provenance::Seeded { seed })
}

/// Outcome of checking the two-sided Hellinger/parameter bound on a grid.
#[derive(Debug, Clone)]
pub struct Assumption1Report {
    pub grid_per_dim: usize,
    pub pairs_checked: usize,
    /// Worst positive excess of the lower envelope over h^2.
    pub max_lower_violation: f64,
    /// Worst positive excess of h^2 over the upper envelope.
    pub max_upper_violation: f64,
    /// Pairs violating either side beyond the tolerance.
    pub violations: usize,
    pub tolerance: f64,
}

impl Assumption1Report {
    pub fn clean(&self) -> bool {
        self.violations == 0
    }
}

/// Evaluate both envelope inequalities for all pairs on a per-dimension grid
/// of `grid_per_dim` points (endpoints included).
pub fn verify_assumption1(
    model: &Model,
    grid_per_dim: usize,
    quad: &QuadratureSpec,
) -> Result<Assumption1Report> {
    if grid_per_dim < 2 {
        return Err(Error::InvalidConfig("need at least 2 grid points per dimension".into()));
    }
    let d = model.dim();
    let axis = |j: usize| -> Vec<f64> {
        (0..grid_per_dim)
            .map(|i| model.rect.lower(j) + model.rect.width(j) * i as f64 / (grid_per_dim - 1) as f64)
            .collect()
    };
    let mut points: Vec<Vec<f64>> = vec![vec![]];
    for j in 0..d {
        let ax = axis(j);
        points = points
            .into_iter()
            .flat_map(|p| {
                ax.iter().map(move |&x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }

    let tolerance = 1e-9 + 10.0 * quad.abs_tol;
    let mut report = Assumption1Report {
        grid_per_dim,
        pairs_checked: 0,
        max_lower_violation: 0.0,
        max_upper_violation: 0.0,
        violations: 0,
        tolerance,
    };
    for i in 0..points.len() {
        for k in (i + 1)..points.len() {
            let (a, b) = (&points[i], &points[k]);
            let h2 = crate::distance::hellinger_sq(model, a, b, quad)?;
            let lo = model.constants.lower_envelope(a, b);
            let hi = model.constants.upper_envelope(a, b);
            let lower_viol = (lo - h2).max(0.0);
            let upper_viol = (h2 - hi).max(0.0);
            report.max_lower_violation = report.max_lower_violation.max(lower_viol);
            report.max_upper_violation = report.max_upper_violation.max(upper_viol);
            if lower_viol > tolerance || upper_viol > tolerance {
                report.violations += 1;
            }
            report.pairs_checked += 1;
        }
    }
    Ok(report)
}
