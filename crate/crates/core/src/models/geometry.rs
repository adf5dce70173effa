//! Closed-form Hellinger-ball geometry per family.
//!
//! For a probe theta and a budget `xi` on the squared Hellinger distance,
//! these routines return how far the parameter may move in each direction
//! while keeping h^2(f_theta, f_moved) <= xi. The unidimensional solvers are
//! exact inversions of the closed distance formulas; the bidimensional ones
//! are the sufficient-condition rectangles used by the multidimensional
//! search, evaluated at the current search rectangle where they depend on it.

use crate::distance::trigamma;
use crate::models::{Family, ParamRect};

/// Direction of a one-dimensional move away from a probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// From the lower endpoint upward.
    Up,
    /// From the upper endpoint downward.
    Down,
}

/// Exact ball radius for the unidimensional families whose Hellinger
/// distance inverts in closed form. Returns `None` for the others.
pub fn optimal_radius_1d(family: Family, theta: f64, xi: f64, dir: Direction) -> Option<f64> {
    debug_assert!((0.0..1.0).contains(&xi));
    let r = match family {
        Family::GaussLoc => (-8.0 * (1.0 - xi).ln()).sqrt(),
        Family::ExpRate => {
            // Solve 2 sqrt(t(t+r)) / (2t+r) = 1 - xi for r in units of t.
            let c = 1.0 - xi;
            let a = 4.0 * (1.0 - c * c) / (c * c);
            let root = (a * a + 4.0 * a).sqrt();
            match dir {
                Direction::Up => theta * 0.5 * (a + root),
                Direction::Down => theta * 0.5 * (root - a),
            }
        }
        Family::Rayleigh => {
            // h^2((t, t+r)) = r^2 / (t^2 + (t+r)^2).
            let s = (2.0 * xi - xi * xi).sqrt();
            match dir {
                Direction::Up => theta * (xi + s) / (1.0 - xi),
                Direction::Down => theta * (s - xi) / (1.0 - xi),
            }
        }
        Family::UnifScale => {
            // h^2(t, t') = 1 - sqrt(t/t') for t < t'.
            let g = 2.0 * xi - xi * xi;
            match dir {
                Direction::Up => theta * g / ((1.0 - xi) * (1.0 - xi)),
                Direction::Down => theta * g,
            }
        }
        Family::UnifLoc => xi, // h^2 = min(|delta|, 1), xi < 1
        _ => return None,
    };
    Some(r)
}

/// Componentwise ball rectangle for the bidimensional families: returns
/// `(down, up)` radii such that the box
/// `prod_j [theta_j - down_j, theta_j + up_j]`, intersected with `rect`,
/// stays inside the squared-Hellinger ball of radius `xi` around `theta`.
/// Returns `None` for families without such a geometry.
pub fn ball_rectangle_md(
    family: Family,
    theta: &[f64],
    rect: &ParamRect,
    xi: f64,
) -> Option<(Vec<f64>, Vec<f64>)> {
    debug_assert!((0.0..1.0).contains(&xi));
    match family {
        Family::Gauss2d => {
            let sigma = theta[1];
            let q = (2.0 * xi - xi * xi).sqrt();
            let om = 1.0 - xi;
            let rm = 2.0 * ((1.0 - q) / om) * (1.0 / om).ln().sqrt() * sigma;
            let r_sig_down = (q - xi) / om * sigma;
            let r_sig_up = (q + xi) / om * sigma;
            Some((vec![rm, r_sig_down], vec![rm, r_sig_up]))
        }
        Family::Cauchy2d => {
            let sigma = theta[1];
            let s = xi.sqrt();
            let rm = 2.0 * sigma * s;
            let r_sig_down = sigma * (1.0 - (-2.0 * s).exp());
            let r_sig_up = sigma * ((2.0 * s).exp() - 1.0);
            Some((vec![rm, r_sig_down], vec![rm, r_sig_up]))
        }
        Family::Gamma2d => {
            let (a, b) = (theta[0], theta[1]);
            let a1 = rect.lower(0);
            let ra_down = (2.0 * xi / trigamma(a1).ok()?).sqrt();
            let ra_up = (2.0 * xi / trigamma(a).ok()?).sqrt();
            // Shape-a slice: keep (2 sqrt(bb')/(b+b'))^a above 1 - xi/4.
            let xip = (1.0 - 0.25 * xi).powf(1.0 / a);
            let w = (1.0 - xip * xip).sqrt();
            let lo = (1.0 - w) * (1.0 - w) / (xip * xip);
            let hi = (1.0 + w) * (1.0 + w) / (xip * xip);
            Some((vec![ra_down, b * (1.0 - lo)], vec![ra_up, b * (hi - 1.0)]))
        }
        Family::Beta2d => {
            let (a, b) = (theta[0], theta[1]);
            let a1 = rect.lower(0);
            let b1 = rect.lower(1);
            let b2 = rect.upper(1);
            let tg = |x: f64| trigamma(x).ok();
            let ra_down = (2.0 * xi / (tg(a1)? - tg(a1 + b2)?)).sqrt();
            let ra_up = (2.0 * xi / (tg(a)? - tg(a + b2)?)).sqrt();
            let rb_down = (2.0 * xi / (tg(b1)? - tg(a + b1)?)).sqrt();
            let rb_up = (2.0 * xi / (tg(b)? - tg(a + b)?)).sqrt();
            Some((vec![ra_down, rb_down], vec![ra_up, rb_up]))
        }
        Family::ShiftExp2d => {
            let lambda = theta[1];
            let s = xi.sqrt();
            let big = (1.0 + s) * (1.0 + s);
            let small = (1.0 - s) * (1.0 - s);
            let om = 1.0 - xi;
            let len = (1.0 / om).ln() / lambda;
            let rm_down = om / big * len;
            let rm_up = len;
            let rl_down = lambda * (1.0 - small / om);
            let rl_up = lambda * (big / om - 1.0);
            Some((vec![rm_down, rl_down], vec![rm_up, rl_up]))
        }
        Family::UnifLocScale2d => {
            let r = theta[1];
            let half = 1.0 - 0.5 * xi;
            // Largest downward location move that keeps the worst corner
            // (scale also at its lower box bound) inside the ball:
            // m - m' <= sqrt(r')(sqrt(r') - (1-xi) sqrt(r)) at r' = half^2 r.
            let rm_down = 0.5 * xi * half * r;
            let rm_up = xi / (2.0 - xi) * r;
            let rr_down = r * (1.0 - half * half);
            let rr_up = r * (1.0 / (half * half) - 1.0);
            Some((vec![rm_down, rr_down], vec![rm_up, rr_up]))
        }
        _ => None,
    }
}

/// Rectangle-local lower regularity constants, for the families where a
/// tighter bound than the global one is available on a sub-rectangle.
pub fn rect_lower_constants(family: Family, rect: &ParamRect) -> Option<Vec<f64>> {
    match family {
        Family::Gauss2d => {
            let (m_lo, m_hi) = (rect.lower(0), rect.upper(0));
            let (s_lo, s_hi) = (rect.lower(1), rect.upper(1));
            let amp = (2.0 * s_hi * s_lo / (s_hi * s_hi + s_lo * s_lo)).sqrt();
            let w = m_hi - m_lo;
            let mean_coef = if w > 0.0 {
                -(-w * w / (8.0 * s_hi * s_hi)).exp_m1() / (w * w)
            } else {
                1.0 / (8.0 * s_hi * s_hi)
            };
            Some(vec![amp * mean_coef, 1.0 / (4.0 * s_hi * s_hi)])
        }
        Family::ShiftExp2d => {
            let (m_lo, m_hi) = (rect.lower(0), rect.upper(0));
            let (l_lo, l_hi) = (rect.lower(1), rect.upper(1));
            let amp = 2.0 * (l_hi * l_lo).sqrt() / (l_hi + l_lo);
            let w = m_hi - m_lo;
            let mean_coef = if w > 0.0 {
                -(-0.5 * l_lo * w).exp_m1() / w
            } else {
                0.5 * l_lo
            };
            Some(vec![amp * mean_coef, 1.0 / (8.0 * l_hi * l_hi)])
        }
        _ => None,
    }
}
