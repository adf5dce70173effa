//! Theory-side calculators: harmonic mean of the smoothness exponents, the
//! dimension-like complexity quantity of the risk bounds, and the test-count
//! bounds, bundled for configuration sanity checks.
//!
//! The constant `c` inside the dimension-like quantity is an unspecified
//! function of kappa in the underlying theory; it is taken as an explicit
//! input defaulting to 1 and results must be read as relative diagnostics,
//! not certified constants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::Model;
use crate::search1d::test_count_bound_1d;
use crate::searchmd::test_count_bound_md;

/// Harmonic mean of the smoothness exponents: `d / sum_j (1/alpha_j)`.
pub fn harmonic_mean_alpha(alpha: &[f64]) -> f64 {
    let d = alpha.len() as f64;
    d / alpha.iter().map(|a| 1.0 / a).sum::<f64>()
}

/// Diagnostics bundle for one model/configuration pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TheoryBundle {
    pub alpha_bar: f64,
    /// Dimension-like quantity in its multidimensional form:
    /// `max(d, sum_j ln(1 + t_j^-1 ((d/alpha_bar)(c R_up_j/R_low_j))^(1/alpha_j)))`.
    pub d_f: f64,
    /// The unidimensional variant
    /// `max(1, ln(1 + t^-1 (c R_up/(alpha R_low))^(1/alpha)))`, which places
    /// the exponent inside the ratio differently; only set when d = 1.
    pub d_f_1d: Option<f64>,
    /// Test-count bound of the interval search (d = 1 only).
    pub bound_1d: Option<f64>,
    /// Test-count bound of the rectangle search (any d, using the same eta).
    pub bound_md: f64,
    /// The constant assumed inside the logarithms.
    pub c: f64,
}

/// Evaluate the bundle. Requires theory mode (`t_j > 0` for all j).
pub fn compute_theory_bundle(
    model: &Model,
    t: &[f64],
    kappa: f64,
    eta: &[f64],
    c: f64,
) -> Result<TheoryBundle> {
    let d = model.dim();
    if t.len() != d || eta.len() != d {
        return Err(Error::InvalidConfig(format!("t and eta need {d} components")));
    }
    if t.iter().any(|&tj| !(tj > 0.0)) {
        return Err(Error::TheoryModeRequired);
    }
    if !(c > 0.0) {
        return Err(Error::InvalidConfig("c must be positive".into()));
    }
    let alpha: Vec<f64> = (0..d).map(|j| model.constants().alpha(j)).collect();
    let alpha_bar = harmonic_mean_alpha(&alpha);

    let mut sum = 0.0;
    for j in 0..d {
        let ratio = c * model.constants().r_upper(j) / model.constants().r_lower(j);
        sum += (1.0 + ((d as f64 / alpha_bar) * ratio).powf(1.0 / alpha[j]) / t[j]).ln();
    }
    let d_f = (d as f64).max(sum);

    let (d_f_1d, bound_1d) = if d == 1 {
        let ratio = c * model.constants().r_upper(0) / (alpha[0] * model.constants().r_lower(0));
        let variant = (1.0f64).max((1.0 + ratio.powf(1.0 / alpha[0]) / t[0]).ln());
        (Some(variant), Some(test_count_bound_1d(model, kappa, eta[0])))
    } else {
        (None, None)
    };

    Ok(TheoryBundle {
        alpha_bar,
        d_f,
        d_f_1d,
        bound_1d,
        bound_md: test_count_bound_md(model, kappa, eta),
        c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::catalog_lookup;
    use crate::search1d::kappa_bar;
    use approx::assert_relative_eq;

    #[test]
    fn harmonic_mean_values() {
        assert_relative_eq!(harmonic_mean_alpha(&[2.0, 2.0]), 2.0);
        assert_relative_eq!(harmonic_mean_alpha(&[1.0, 2.0]), 4.0 / 3.0);
        assert_relative_eq!(harmonic_mean_alpha(&[0.5]), 0.5);
    }

    #[test]
    fn practice_mode_is_rejected() {
        let m = catalog_lookup("gauss-loc").unwrap();
        let err = compute_theory_bundle(&m, &[0.0], 0.04, &[1e-6], 1.0).unwrap_err();
        assert!(matches!(err, Error::TheoryModeRequired));
    }

    #[test]
    fn dimension_quantity_dominates_d() {
        for name in ["gauss-loc", "gauss-2d", "sqrt-singular", "beta-2d"] {
            let m = catalog_lookup(name).unwrap();
            let d = m.dim();
            let t = vec![1.0; d];
            let eta = vec![1e-6; d];
            let b = compute_theory_bundle(&m, &t, 0.04, &eta, 1.0).unwrap();
            assert!(b.d_f >= d as f64, "{name}");
        }
    }

    #[test]
    fn direct_formula_evaluation_d1() {
        // d = 1, t = 1, equal constants, c = 1, alpha = 2:
        // d_f = max(1, ln(1 + ((1/2)*1)^(1/2))).
        let m = catalog_lookup("gauss-loc").unwrap();
        // Constants are unequal for the catalog model; rebuild the formula
        // by hand with the model's own constants to pin the arithmetic.
        let b = compute_theory_bundle(&m, &[1.0], 0.04, &[2e-6], 1.0).unwrap();
        let ratio = m.constants().r_upper(0) / m.constants().r_lower(0);
        let expect = (1.0f64).max((1.0 + ((1.0 / b.alpha_bar) * ratio).sqrt()).ln());
        assert_relative_eq!(b.d_f, expect, epsilon = 1e-12);
    }

    #[test]
    fn bounds_monotone_in_constant_ratio() {
        let m = catalog_lookup("gauss-2d").unwrap();
        let b1 = compute_theory_bundle(&m, &[1.0, 1.0], 0.04, &[1e-5, 1e-5], 1.0).unwrap();
        let b2 = compute_theory_bundle(&m, &[1.0, 1.0], 0.04, &[1e-5, 1e-5], 4.0).unwrap();
        assert!(b2.d_f > b1.d_f);
    }

    #[test]
    fn md_bound_exceeds_1d_bound_on_reduction() {
        // At d = 1 the product formula has an extra factor 4 and a weaker
        // leading term, so it dominates the dedicated interval bound.
        let m = catalog_lookup("gauss-loc").unwrap();
        let kappa = 0.5 * kappa_bar();
        let b = compute_theory_bundle(&m, &[1.0], kappa, &[2e-6], 1.0).unwrap();
        assert!(b.bound_md >= b.bound_1d.unwrap());
    }
}
