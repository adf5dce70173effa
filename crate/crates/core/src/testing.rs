//! The pairwise robust test: empirical statistic, optional parameter-grid
//! discretization, and the projected test used by the search procedures.
//!
//! For candidate densities g = f_theta and g' = f_theta', the statistic is
//!
//! ```text
//! T(g, g') = (1/n) sum_i (sqrt g'(X_i) - sqrt g(X_i)) / sqrt(g(X_i) + g'(X_i))
//!          + (1/2) int sqrt(g + g') (sqrt g' - sqrt g) d mu
//! ```
//!
//! with the convention 0/0 = 0 in the sum. A nonnegative value is evidence
//! that the truth is Hellinger-closer to g' than the test's scaled ball
//! around g, and symmetrically for nonpositive values. The implementation
//! evaluates the statistic once per unordered pair and negates, so swapping
//! the arguments flips the sign bit-exactly.

use crate::distance;
use crate::error::{Error, Result};
use crate::models::Model;
use crate::quad::{self, QuadratureSpec};

/// Discretization grid for the parameter rectangle.
///
/// Mesh `eps_j = t_j * (R_upper_j * n)^(-1/alpha_j)`; `t_j = 0` disables
/// discretization in coordinate j (the practice default). Theory mode
/// requires `t_j` in `(0, d^(1/alpha_j)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    t: Vec<f64>,
    eps: Vec<f64>,
    origin: Vec<f64>,
}

impl GridSpec {
    /// Build the mesh for a model and sample size from thinness parameters.
    pub fn new(model: &Model, t: &[f64], n: usize) -> Result<Self> {
        let d = model.dim();
        if t.len() != d {
            return Err(Error::InvalidConfig(format!(
                "grid thinness needs {d} components, got {}",
                t.len()
            )));
        }
        let mut eps = Vec::with_capacity(d);
        for j in 0..d {
            if t[j] < 0.0 {
                return Err(Error::InvalidConfig("grid thinness must be nonnegative".into()));
            }
            if t[j] == 0.0 {
                eps.push(0.0);
            } else {
                let alpha = model.constants().alpha(j);
                let max_t = (d as f64).powf(1.0 / alpha);
                if t[j] > max_t {
                    return Err(Error::InvalidConfig(format!(
                        "t_{j} = {} exceeds the admissible maximum {max_t}",
                        t[j]
                    )));
                }
                let ru = model.constants().r_upper(j);
                eps.push(t[j] * (ru * n as f64).powf(-1.0 / alpha));
            }
        }
        let origin = (0..d).map(|j| model.rect().lower(j)).collect();
        Ok(Self { t: t.to_vec(), eps, origin })
    }

    /// The identity grid (no discretization in any coordinate).
    pub fn none(model: &Model) -> Self {
        let d = model.dim();
        Self {
            t: vec![0.0; d],
            eps: vec![0.0; d],
            origin: (0..d).map(|j| model.rect().lower(j)).collect(),
        }
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn eps(&self) -> &[f64] {
        &self.eps
    }

    pub fn is_identity(&self) -> bool {
        self.eps.iter().all(|&e| e == 0.0)
    }
}

/// Componentwise floor projection onto the grid:
/// `pi(x)_j = m_j + floor((x_j - m_j)/eps_j) eps_j`, identity where
/// `eps_j = 0`.
pub fn project_to_grid(x: &[f64], grid: &GridSpec) -> Vec<f64> {
    x.iter()
        .enumerate()
        .map(|(j, &xj)| {
            let eps = grid.eps[j];
            if eps == 0.0 {
                return xj;
            }
            let q = (xj - grid.origin[j]) / eps;
            // Snap nearly integral quotients so grid points project to
            // themselves (floor alone can slip one cell down in rounding).
            let rounded = q.round();
            let k = if (q - rounded).abs() <= 1e-9 * rounded.abs().max(1.0) {
                rounded
            } else {
                q.floor()
            };
            grid.origin[j] + k.max(0.0) * eps
        })
        .collect()
}

/// A computed test value together with the grid-projected candidates that
/// were actually compared.
#[derive(Debug, Clone, PartialEq)]
pub struct TestValue {
    pub value: f64,
    pub f_theta_used: Vec<f64>,
    pub f_theta_prime_used: Vec<f64>,
}

/// The raw statistic on unprojected parameters.
pub fn baraud_statistic(
    model: &Model,
    theta: &[f64],
    theta_prime: &[f64],
    sample: &[f64],
    quad: &QuadratureSpec,
) -> Result<f64> {
    // Canonical argument order, negated on swap: antisymmetry is exact by
    // construction rather than by numerical coincidence.
    if !lex_le(theta, theta_prime) {
        return Ok(-baraud_statistic(model, theta_prime, theta, sample, quad)?);
    }
    if theta == theta_prime {
        return Ok(0.0);
    }

    let mut sum = 0.0f64;
    for &x in sample {
        let g = model.density(theta, x);
        let gp = model.density(theta_prime, x);
        let s = g + gp;
        if s > 0.0 {
            sum += (gp.sqrt() - g.sqrt()) / s.sqrt();
        }
        // g = g' = 0 contributes zero by the 0/0 = 0 convention.
    }
    let empirical = sum / sample.len() as f64;

    let integral = if model.translation_even() {
        // Pure location family with even shape: the ordinate term vanishes.
        0.0
    } else {
        let (domain, cuts) = distance::pair_domain(model, theta, theta_prime, true)
            .expect("union of supports is nonempty");
        let fam = model.family();
        let (a, b) = (theta.to_vec(), theta_prime.to_vec());
        let f = move |x: f64| {
            let g = fam.density(&a, x);
            let gp = fam.density(&b, x);
            (g + gp).sqrt() * (gp.sqrt() - g.sqrt())
        };
        0.5 * quad::integrate_domain(f, &domain, &cuts, quad)?
    };

    Ok(empirical + integral)
}

fn lex_le(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b.iter()) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    true
}

/// The discretized test: both candidates are projected onto the grid before
/// the statistic is evaluated.
pub fn test_statistic(
    model: &Model,
    theta: &[f64],
    theta_prime: &[f64],
    sample: &[f64],
    grid: &GridSpec,
    quad: &QuadratureSpec,
) -> Result<TestValue> {
    let a = project_to_grid(theta, grid);
    let b = project_to_grid(theta_prime, grid);
    let value = baraud_statistic(model, &a, &b, sample, quad)?;
    Ok(TestValue { value, f_theta_used: a, f_theta_prime_used: b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{catalog_lookup, draw_sample};
    use approx::assert_relative_eq;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn projection_floor_arithmetic() {
        let m = catalog_lookup("unif-scale").unwrap();
        let grid = GridSpec {
            t: vec![1.0],
            eps: vec![0.1],
            origin: vec![0.0],
        };
        assert_relative_eq!(project_to_grid(&[0.25], &grid)[0], 0.2, epsilon = 1e-12);
        let none = GridSpec::none(&m);
        assert_eq!(project_to_grid(&[0.37], &none)[0], 0.37);
    }

    #[test]
    fn projection_componentwise() {
        let grid = GridSpec {
            t: vec![1.0, 1.0],
            eps: vec![0.2, 0.5],
            origin: vec![0.0, 1.0],
        };
        let p = project_to_grid(&[0.35, 1.99], &grid);
        assert_relative_eq!(p[0], 0.2, epsilon = 1e-12);
        assert_relative_eq!(p[1], 1.5, epsilon = 1e-12);
    }

    #[test]
    fn projection_is_idempotent_and_within_cell() {
        let grid = GridSpec {
            t: vec![1.0],
            eps: vec![0.0123],
            origin: vec![-3.0],
        };
        let mut x = -3.0;
        while x < 3.0 {
            let p = project_to_grid(&[x], &grid);
            let pp = project_to_grid(&p, &grid);
            assert_eq!(p[0].to_bits(), pp[0].to_bits(), "x = {x}");
            assert!(x - p[0] >= -1e-12 && x - p[0] < grid.eps[0] + 1e-12);
            x += 0.0371;
        }
    }

    #[test]
    fn statistic_vanishes_on_identical_candidates() {
        let m = catalog_lookup("gauss-loc").unwrap();
        let s = draw_sample(&m, &[0.0], 25, 3).unwrap();
        let v = baraud_statistic(&m, &[1.0], &[1.0], s.values(), &q()).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn statistic_is_antisymmetric_bit_exactly() {
        let m = catalog_lookup("unif-scale").unwrap();
        let s = draw_sample(&m, &[1.0], 50, 9).unwrap();
        let ab = baraud_statistic(&m, &[0.7], &[2.3], s.values(), &q()).unwrap();
        let ba = baraud_statistic(&m, &[2.3], &[0.7], s.values(), &q()).unwrap();
        assert_eq!(ab.to_bits(), (-ba).to_bits());
    }

    #[test]
    fn location_family_midpoint_observation_is_neutral() {
        // Single observation halfway between two Gaussian locations: the
        // empirical term cancels and the ordinate term is identically zero.
        let m = catalog_lookup("gauss-loc").unwrap();
        let v = baraud_statistic(&m, &[0.0], &[1.0], &[0.5], &q()).unwrap();
        assert_relative_eq!(v, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn ordinate_term_vanishes_for_translation_even_families() {
        // The implementation short-circuits the ordinate term to an exact
        // zero for these families; cross-check the analytic cancellation by
        // explicit quadrature (looser tolerance where the integrand has
        // kinks or singularities).
        for (name, tol) in [
            ("gauss-loc", 1e-12),
            ("cauchy-loc", 1e-12),
            ("unif-loc", 1e-9),
            ("sqrt-singular", 1e-8),
        ] {
            let m = catalog_lookup(name).unwrap();
            let (a, b) = ([-0.4], [0.55]);
            let (domain, cuts) = distance::pair_domain(&m, &a, &b, true).unwrap();
            let fam = m.family();
            let f = move |x: f64| {
                let g = fam.density(&a, x);
                let gp = fam.density(&b, x);
                (g + gp).sqrt() * (gp.sqrt() - g.sqrt())
            };
            let v = quad::integrate_domain(f, &domain, &cuts, &q()).unwrap();
            assert!(v.abs() < tol, "{name}: ordinate term {v}");
        }
    }

    #[test]
    fn empirical_term_is_bounded_by_one() {
        let m = catalog_lookup("unif-loc").unwrap();
        let s = draw_sample(&m, &[0.0], 40, 5).unwrap();
        let v = baraud_statistic(&m, &[-3.0], &[3.0], s.values(), &q()).unwrap();
        assert!(v.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn identity_grid_matches_raw_statistic() {
        let m = catalog_lookup("exp-rate").unwrap();
        let s = draw_sample(&m, &[1.0], 30, 2).unwrap();
        let grid = GridSpec::none(&m);
        let t = test_statistic(&m, &[0.5], &[2.0], s.values(), &grid, &q()).unwrap();
        let raw = baraud_statistic(&m, &[0.5], &[2.0], s.values(), &q()).unwrap();
        assert_eq!(t.value.to_bits(), raw.to_bits());
        assert_eq!(t.f_theta_used, vec![0.5]);
    }

    #[test]
    fn same_cell_candidates_test_as_equal() {
        let m = catalog_lookup("gauss-loc").unwrap();
        let grid = GridSpec::new(&m, &[1.0], 10).unwrap();
        assert!(grid.eps()[0] > 0.3); // coarse at n = 10
        let s = draw_sample(&m, &[0.0], 10, 8).unwrap();
        let within = grid.eps()[0] * 0.4;
        let t = test_statistic(&m, &[-100.0 + 0.1 * within], &[-100.0 + 0.9 * within], s.values(), &grid, &q()).unwrap();
        assert_eq!(t.value, 0.0);
        assert_eq!(t.f_theta_used, t.f_theta_prime_used);
    }

    #[test]
    fn grid_spec_validates_thinness() {
        let m = catalog_lookup("gauss-loc").unwrap();
        assert!(GridSpec::new(&m, &[-0.1], 10).is_err());
        assert!(GridSpec::new(&m, &[1.5], 10).is_err()); // above d^(1/alpha) = 1
        let g = GridSpec::new(&m, &[1.0], 100).unwrap();
        // eps = t (R_upper n)^(-1/alpha) = (0.125 * 100)^(-1/2)
        assert_relative_eq!(g.eps()[0], (12.5f64).powf(-0.5), epsilon = 1e-12);
    }

    #[test]
    fn test_prefers_truth_side_under_sampling() {
        // Data from f_1 in the uniform scale model: testing theta = 1 against
        // theta' = 2 should favor theta (strictly negative statistic) for
        // nearly every draw.
        let m = catalog_lookup("unif-scale").unwrap();
        let mut negative = 0;
        for seedling in 0..100u64 {
            let s = draw_sample(&m, &[1.0], 100, 3000 + seedling).unwrap();
            let v = baraud_statistic(&m, &[1.0], &[2.0], s.values(), &q()).unwrap();
            if v < 0.0 {
                negative += 1;
            }
        }
        assert!(negative >= 95, "only {negative}/100 negative");
    }
}
