//! Adaptive Gauss-Kronrod quadrature.
//!
//! A 7-15 point Gauss-Kronrod pair drives an adaptive bisection scheme over a
//! list of initial segments. Unbounded domains are handled by rational and
//! tangent substitutions chosen from the integrand's support; callers supply
//! interior breakpoints (support edges, kinks, integrable singularities) so
//! that every initial segment is smooth in its interior.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Tolerances and budget for one adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Absolute tolerance on the total integral.
    pub abs_tol: f64,
    /// Relative tolerance on the total integral.
    pub rel_tol: f64,
    /// Maximum number of interval bisections before giving up.
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-10, max_subdivisions: 2000 }
    }
}

// 15-point Kronrod abscissae (positive half), 7-point Gauss weights embedded.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One Gauss-Kronrod pass over `[a, b]`. Returns the Kronrod estimate and a
/// rescaled error bound following the classic QUADPACK heuristic.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = eval(f, center);
    let mut res_kronrod = fc * WGK[7];
    let mut res_gauss = fc * WG[3];
    let mut res_abs = res_kronrod.abs();

    for (j, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * x;
        let f1 = eval(f, center - dx);
        let f2 = eval(f, center + dx);
        let sum = f1 + f2;
        res_kronrod += WGK[j] * sum;
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * sum;
        }
    }

    let value = res_kronrod * half;
    res_abs *= half.abs();

    // The raw Gauss/Kronrod difference, floored at the roundoff level. The
    // usual variation-based rescaling is deliberately not applied: it
    // assumes local smoothness and persistently under-reports the error on
    // self-similar algebraic singularities, stalling refinement two orders
    // of magnitude short of the requested tolerance. The raw difference
    // over-estimates on smooth cells, which merely costs a few extra
    // bisections of cheap integrands.
    let mut err = ((res_kronrod - res_gauss) * half).abs();
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

#[inline]
fn eval<F: Fn(f64) -> f64>(f: &F, x: f64) -> f64 {
    let y = f(x);
    // Transformed endpoints may produce inf * 0 artifacts in vanishing tails.
    if y.is_finite() { y } else { 0.0 }
}

struct Interval {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

/// Adaptively integrate `f` over the union of `segments`.
///
/// Segments with zero or negative length are skipped. The worst interval is
/// bisected until the accumulated error estimate meets the tolerance or the
/// subdivision budget is exhausted.
pub fn integrate_segments<F: Fn(f64) -> f64>(
    f: F,
    segments: &[(f64, f64)],
    spec: &QuadratureSpec,
) -> Result<f64> {
    let mut heap: BinaryHeap<Interval> = BinaryHeap::new();
    let mut total = 0.0f64;
    let mut total_err = 0.0f64;

    for &(a, b) in segments {
        if !(b > a) {
            continue;
        }
        let (v, e) = gk15(&f, a, b);
        total += v;
        total_err += e;
        heap.push(Interval { a, b, value: v, error: e });
    }
    if heap.is_empty() {
        return Ok(0.0);
    }

    let tolerance = |sum: f64| spec.abs_tol.max(spec.rel_tol * sum.abs());

    let mut subdivisions = 0usize;
    while total_err > tolerance(total) && subdivisions < spec.max_subdivisions {
        let worst = heap.pop().expect("heap nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            // Interval no longer splittable at f64 resolution; its error is
            // irreducible, so accept it and stop refining this region.
            heap.push(Interval { error: 0.0, ..worst });
            subdivisions += 1;
            continue;
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Interval { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Interval { a: mid, b: worst.b, value: v2, error: e2 });
        subdivisions += 1;
    }

    // Re-accumulate from the final partition in a fixed order: the running
    // totals above drift from cancellation, and a deterministic sum keeps
    // results bit-stable for identical inputs.
    let mut parts: Vec<Interval> = heap.into_vec();
    parts.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap_or(Ordering::Equal));
    let value: f64 = parts.iter().map(|p| p.value).sum();
    let error: f64 = parts.iter().map(|p| p.error).sum();

    if error > tolerance(value) {
        return Err(Error::QuadratureNonConvergence { error, subdivisions });
    }
    Ok(value)
}

/// How an integrand's domain should be mapped to finite segments.
#[derive(Debug, Clone)]
pub enum Domain {
    /// Finite interval `[lo, hi]` with optional interior breakpoints.
    Bounded { lo: f64, hi: f64 },
    /// `[lo, +inf)`, mapped through `x = lo + scale * u / (1 - u)`.
    SemiInfinite { lo: f64, scale: f64 },
    /// The whole real line, mapped through `x = center + scale * tan(u)`.
    Real { center: f64, scale: f64 },
}

/// Integrate `f` over `domain`, splitting at the given interior breakpoints.
///
/// Breakpoints outside the domain are ignored. The substitutions keep
/// algebraically decaying tails bounded, so adaptive refinement converges for
/// every integrand arising from the model catalog (density tails decay at
/// least like x^-2).
pub fn integrate_domain<F: Fn(f64) -> f64>(
    f: F,
    domain: &Domain,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64> {
    match *domain {
        Domain::Bounded { lo, hi } => {
            let cuts = segment_cuts(lo, hi, breakpoints, |x| x);
            integrate_segments(f, &cuts, spec)
        }
        Domain::SemiInfinite { lo, scale } => {
            let s = if scale.is_finite() && scale > 0.0 { scale } else { 1.0 };
            // u in [0, 1); x = lo + s*u/(1-u), dx = s/(1-u)^2 du.
            let map_back = |x: f64| {
                let d = x - lo;
                (d / (d + s)).clamp(0.0, 1.0)
            };
            let cuts = segment_cuts(0.0, 1.0, &map(breakpoints, map_back), |u| u);
            let g = move |u: f64| {
                let om = 1.0 - u;
                if om <= 0.0 {
                    return 0.0;
                }
                let x = lo + s * u / om;
                f(x) * s / (om * om)
            };
            integrate_segments(g, &cuts, spec)
        }
        Domain::Real { center, scale } => {
            let s = if scale.is_finite() && scale > 0.0 { scale } else { 1.0 };
            use std::f64::consts::FRAC_PI_2;
            let map_back = |x: f64| ((x - center) / s).atan();
            let cuts = segment_cuts(-FRAC_PI_2, FRAC_PI_2, &map(breakpoints, map_back), |u| u);
            let g = move |u: f64| {
                let t = u.tan();
                let x = center + s * t;
                f(x) * s * (1.0 + t * t)
            };
            integrate_segments(g, &cuts, spec)
        }
    }
}

fn map(points: &[f64], m: impl Fn(f64) -> f64) -> Vec<f64> {
    points.iter().map(|&x| m(x)).collect()
}

fn segment_cuts(lo: f64, hi: f64, breakpoints: &[f64], m: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
    let mut pts: Vec<f64> = vec![lo, hi];
    for &b in breakpoints {
        let b = m(b);
        if b > lo && b < hi {
            pts.push(b);
        }
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    pts.dedup();
    pts.windows(2).map(|w| (w[0], w[1])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn polynomial_is_exact() {
        let v = integrate_segments(|x| 3.0 * x * x, &[(0.0, 2.0)], &spec()).unwrap();
        assert_relative_eq!(v, 8.0, max_relative = 1e-14);
    }

    #[test]
    fn gaussian_over_real_line() {
        let d = Domain::Real { center: 0.3, scale: 1.0 };
        let f = |x: f64| (-(x - 0.3f64) * (x - 0.3) / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let v = integrate_domain(f, &d, &[], &spec()).unwrap();
        assert_relative_eq!(v, 1.0, max_relative = 1e-10);
    }

    #[test]
    fn exponential_tail_semi_infinite() {
        let d = Domain::SemiInfinite { lo: 1.0, scale: 0.5 };
        let v = integrate_domain(|x| (-2.0 * (x - 1.0)).exp(), &d, &[], &spec()).unwrap();
        assert_relative_eq!(v, 0.5, max_relative = 1e-10);
    }

    #[test]
    fn quadratic_tail_semi_infinite() {
        // Pareto-like integrand: exactly constant after the substitution.
        let d = Domain::SemiInfinite { lo: 0.0, scale: 1.0 };
        let v = integrate_domain(|x| (1.0 + x).powi(-2), &d, &[], &spec()).unwrap();
        assert_relative_eq!(v, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn integrable_endpoint_singularity() {
        // 1/sqrt(x) on (0, 1]: adaptive bisection must dig into the corner.
        let v = integrate_segments(|x| if x > 0.0 { x.powf(-0.5) } else { 0.0 }, &[(0.0, 1.0)], &spec());
        let v = v.unwrap();
        assert_relative_eq!(v, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn breakpoints_split_kinks() {
        let f = |x: f64| if x < 0.5 { 1.0 } else { 2.0 };
        let v = integrate_segments(f, &[(0.0, 0.5), (0.5, 1.0)], &spec()).unwrap();
        assert_relative_eq!(v, 1.5, max_relative = 1e-14);
    }

    #[test]
    fn nonconvergence_reports_error() {
        let tight = QuadratureSpec { abs_tol: 1e-300, rel_tol: 1e-300, max_subdivisions: 8 };
        let r = integrate_segments(|x: f64| (x.abs() + 1e-3).powf(-0.5), &[(-1.0, 1.0)], &tight);
        assert!(matches!(r, Err(Error::QuadratureNonConvergence { .. })));
    }
}
