//! Robust parametric density estimation from i.i.d. samples.
//!
//! The estimator never maximizes a likelihood. It shrinks the parameter
//! rectangle by repeatedly running a pairwise robust test between two
//! candidate densities: the sign of the test says which candidate the data
//! is Hellinger-closer to, and a closed ball-geometry argument says how much
//! of the rectangle around the losing candidate can be discarded. The
//! result inherits maximum-likelihood-like accuracy on regular models while
//! remaining stable on models where the likelihood is unbounded or the data
//! are contaminated.
//!
//! Crate layout:
//!
//! - [`models`]: the catalog of parametric families (densities, CDFs,
//!   samplers, regularity constants, closed forms).
//! - [`distance`]: squared Hellinger distances, closed-form or by adaptive
//!   quadrature, plus the trigamma function.
//! - [`testing`]: the pairwise robust test statistic and the optional
//!   parameter-grid discretization.
//! - [`search1d`] / [`searchmd`]: the interval and rectangle searches with
//!   their radius rules and test-count bounds.
//! - [`baselines`]: maximum likelihood (closed or grid), maximum spacing
//!   product, and order-statistic comparators.
//! - [`simlab`]: the Monte Carlo laboratory (risk tables, agreement
//!   quantiles, contamination and mixture sweeps, CSV reports).
//! - [`diagnostics`]: theory-side calculators for configuration checks.

pub mod baselines;
pub mod diagnostics;
pub mod distance;
mod error;
pub mod models;
pub mod quad;
pub mod search1d;
pub mod searchmd;
pub mod simlab;
pub mod testing;

pub use error::{Error, Result};
pub use models::{
    catalog_lookup, draw_sample, gaussian_loc_scale, split_gauss_pair, verify_assumption1,
    Assumption1Report, Family, Model, ParamRect, Provenance, Regularity, Sample, CATALOG_NAMES,
};
pub use quad::QuadratureSpec;
pub use search1d::{
    estimate_1d, kappa_bar, radius_pair_1d, test_count_bound_1d, Estimate1D, EstimatorConfig1D,
    RadiusRule1D, SearchTrace1D,
};
pub use searchmd::{
    estimate_md, radius_vector_md, select_coordinate, step_rectangle, test_count_bound_md,
    EstimateMD, EstimatorConfigMD, RadiusRuleMD, RectConstants, RectConstantsMode, SearchTraceMD,
};
pub use testing::{baraud_statistic, project_to_grid, test_statistic, GridSpec, TestValue};
