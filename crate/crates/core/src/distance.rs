//! Squared Hellinger distance between catalog densities, plus the trigamma
//! special function used by the gamma/beta radius geometry.
//!
//! `hellinger_sq` prefers a closed form when the family has one and falls
//! back to adaptive quadrature of the affinity integral otherwise. The
//! quadrature route canonicalizes the argument order first, so the computed
//! value is bit-exactly symmetric.

use crate::error::{Error, Result};
use crate::models::Model;
use crate::quad::{self, Domain, QuadratureSpec};

/// Second derivative of `ln Gamma` (the derivative of the digamma function).
///
/// Upward recurrence pushes the argument above 10, where the asymptotic
/// Bernoulli series converges to better than 1e-12 relative error.
pub fn trigamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "trigamma requires a positive argument, got {x}"
        )));
    }
    let mut acc = 0.0;
    let mut z = x;
    while z < 10.0 {
        acc += 1.0 / (z * z);
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    // 1/z + 1/(2z^2) + sum B_2k / z^(2k+1)
    let series = inv
        + 0.5 * inv2
        + inv2 * inv * (1.0 / 6.0 + inv2 * (-1.0 / 30.0 + inv2 * (1.0 / 42.0 + inv2 * (-1.0 / 30.0 + inv2 * (5.0 / 66.0 + inv2 * (-691.0 / 2730.0 + inv2 * (7.0 / 6.0)))))));
    Ok(acc + series)
}

/// Squared Hellinger distance from the family's closed form, when it exists.
pub fn closed_hellinger_sq(model: &Model, a: &[f64], b: &[f64]) -> Option<f64> {
    model.family().closed_hellinger(a, b)
}

/// Squared Hellinger distance h^2(f_a, f_b) in [0, 1].
///
/// Both parameter points must lie in the model rectangle.
pub fn hellinger_sq(model: &Model, a: &[f64], b: &[f64], quad: &QuadratureSpec) -> Result<f64> {
    model.check_in_rect(a)?;
    model.check_in_rect(b)?;
    if let Some(h2) = closed_hellinger_sq(model, a, b) {
        return Ok(h2);
    }
    // Canonical order makes quadrature segments identical for (a, b) and
    // (b, a); the affinity integrand is symmetric by construction.
    let (a, b) = if lex_le(a, b) { (a, b) } else { (b, a) };
    let rho = affinity_quadrature(model, a, b, quad)?;
    Ok((1.0 - rho).clamp(0.0, 1.0))
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

/// Integral of sqrt(f_a * f_b) over the intersection of the two supports.
fn affinity_quadrature(model: &Model, a: &[f64], b: &[f64], quad: &QuadratureSpec) -> Result<f64> {
    let fam = model.family();
    let (domain, cuts) = match pair_domain(model, a, b, false) {
        Some(dc) => dc,
        None => return Ok(0.0), // disjoint supports
    };
    let av = a.to_vec();
    let bv = b.to_vec();
    let f = move |x: f64| (fam.density(&av, x) * fam.density(&bv, x)).sqrt();
    quad::integrate_domain(f, &domain, &cuts, quad)
}

/// Build the integration domain for a pair of parameter points: the union of
/// the two supports when `union` is set, their intersection otherwise.
/// Returns `None` when the intersection is empty.
pub(crate) fn pair_domain(
    model: &Model,
    a: &[f64],
    b: &[f64],
    union: bool,
) -> Option<(Domain, Vec<f64>)> {
    let fam = model.family();
    let (lo_a, hi_a) = fam.support(a);
    let (lo_b, hi_b) = fam.support(b);
    let (lo, hi) = if union {
        (lo_a.min(lo_b), hi_a.max(hi_b))
    } else {
        let lo = lo_a.max(lo_b);
        let hi = hi_a.min(hi_b);
        if lo >= hi {
            return None;
        }
        (lo, hi)
    };

    let mut cuts = Vec::with_capacity(8);
    fam.breakpoints(a, &mut cuts);
    fam.breakpoints(b, &mut cuts);

    let scale = fam.scale_hint(a).max(fam.scale_hint(b));
    let domain = if lo.is_finite() && hi.is_finite() {
        Domain::Bounded { lo, hi }
    } else if lo.is_finite() {
        Domain::SemiInfinite { lo, scale }
    } else {
        debug_assert!(hi.is_infinite(), "no catalog support is bounded above only");
        let center = 0.5 * (fam.center_hint(a) + fam.center_hint(b));
        Domain::Real { center, scale }
    };
    Some((domain, cuts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::catalog_lookup;
    use approx::assert_relative_eq;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn trigamma_at_one_is_pi2_over_6() {
        // Oracle: 50-term direct sum of 1/(x+k)^2 with an Euler-Maclaurin
        // tail correction, independent of the production series.
        let oracle = |x: f64| {
            let mut s = 0.0;
            for k in 0..50 {
                let t = x + k as f64;
                s += 1.0 / (t * t);
            }
            let z: f64 = x + 50.0;
            let z2 = z * z;
            s + 1.0 / z + 1.0 / (2.0 * z2) + 1.0 / (6.0 * z2 * z) - 1.0 / (30.0 * z2 * z2 * z)
        };
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        assert_relative_eq!(trigamma(1.0).unwrap(), pi2 / 6.0, max_relative = 1e-12);
        assert_relative_eq!(trigamma(1.0).unwrap(), 1.6449340668482264, max_relative = 1e-12);
        assert_relative_eq!(trigamma(0.5).unwrap(), pi2 / 2.0, max_relative = 1e-12);
        assert_relative_eq!(trigamma(0.5).unwrap(), 4.934802200544679, max_relative = 1e-12);
        for &x in &[0.1, 0.6, 0.7, 2.3, 9.5, 20.7, 123.0] {
            assert_relative_eq!(trigamma(x).unwrap(), oracle(x), max_relative = 1e-11);
        }
    }

    #[test]
    fn trigamma_rejects_nonpositive() {
        assert!(trigamma(0.0).is_err());
        assert!(trigamma(-2.0).is_err());
    }

    #[test]
    fn identical_parameters_have_zero_distance() {
        let m = catalog_lookup("gauss-loc").unwrap();
        assert_eq!(hellinger_sq(&m, &[0.0], &[0.0], &q()).unwrap(), 0.0);
    }

    #[test]
    fn uniform_scale_closed_form_value() {
        // h^2(f_1, f_4) = |4-1| / ((sqrt(1)+sqrt(4)) * sqrt(4)) = 3/6.
        let m = catalog_lookup("unif-scale").unwrap();
        assert_relative_eq!(hellinger_sq(&m, &[1.0], &[4.0], &q()).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn gauss_2d_closed_form_value() {
        // Same mean, sigma 1 vs 2: 1 - sqrt(4/5).
        let m = catalog_lookup("gauss-2d").unwrap();
        let h2 = hellinger_sq(&m, &[0.0, 1.0], &[0.0, 2.0], &q()).unwrap();
        assert_relative_eq!(h2, 1.0 - (0.8f64).sqrt(), epsilon = 1e-15);
        assert_relative_eq!(h2, 0.10557280900008414, epsilon = 1e-12);
    }

    #[test]
    fn shifted_exponential_closed_form_value() {
        let m = catalog_lookup("shiftexp-2d").unwrap();
        let h2 = hellinger_sq(&m, &[0.0, 1.0], &[0.5, 1.0], &q()).unwrap();
        assert_relative_eq!(h2, -(-0.25f64).exp_m1(), epsilon = 1e-15);
        assert_relative_eq!(h2, 0.22119921692859512, epsilon = 1e-12);
    }

    #[test]
    fn exp_rate_closed_form_matches_quadrature_oracle() {
        // h^2(f_1, f_4) = 1 - 2*sqrt(4)/5 = 0.2, cross-checked by numeric
        // integration of the affinity.
        let m = catalog_lookup("exp-rate").unwrap();
        let closed = closed_hellinger_sq(&m, &[1.0], &[4.0]).unwrap();
        assert_relative_eq!(closed, 0.2, epsilon = 1e-15);
        let rho = quad::integrate_domain(
            |x| ((-x as f64).exp() * 4.0 * (-4.0 * x).exp()).sqrt(),
            &Domain::SemiInfinite { lo: 0.0, scale: 1.0 },
            &[],
            &q(),
        )
        .unwrap();
        assert_relative_eq!(closed, 1.0 - rho, epsilon = 1e-9);
    }

    #[test]
    fn rayleigh_closed_form_value() {
        let m = catalog_lookup("rayleigh").unwrap();
        assert_relative_eq!(
            hellinger_sq(&m, &[1.0], &[2.0], &q()).unwrap(),
            0.2,
            epsilon = 1e-15
        );
    }

    #[test]
    fn unif_loc_closed_form_value() {
        let m = catalog_lookup("unif-loc").unwrap();
        assert_relative_eq!(
            hellinger_sq(&m, &[0.0], &[0.25], &q()).unwrap(),
            0.25,
            epsilon = 1e-15
        );
    }

    #[test]
    fn quadrature_families_have_no_closed_form() {
        for name in ["cauchy-loc", "cauchy-2d", "gamma-2d", "beta-2d", "pareto-shift", "sqrt-singular"] {
            let m = catalog_lookup(name).unwrap();
            let c = m.rect().center();
            assert!(closed_hellinger_sq(&m, &c, &c).is_none(), "{name}");
        }
    }

    #[test]
    fn quadrature_symmetry_is_bit_exact() {
        let m = catalog_lookup("cauchy-loc").unwrap();
        let ab = hellinger_sq(&m, &[-1.5], &[2.0], &q()).unwrap();
        let ba = hellinger_sq(&m, &[2.0], &[-1.5], &q()).unwrap();
        assert_eq!(ab.to_bits(), ba.to_bits());
    }

    #[test]
    fn rejects_out_of_rectangle_points() {
        let m = catalog_lookup("unif-scale").unwrap();
        assert!(hellinger_sq(&m, &[0.001], &[1.0], &q()).is_err());
    }
}
