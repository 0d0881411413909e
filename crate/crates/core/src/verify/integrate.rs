//! Exact average of the slot protocol's agreement probability over `theta`.
//!
//! For fixed `(x, y)` the fixed-slot comparison, the antipodal flip and the
//! choice of family do not depend on `theta`. What does depend on it is
//! which family slot `x` and `y` fall in and where the separating point
//! sits. Both change only at the finitely many `theta` where a family point
//! crosses `x`, the effective `y`, or the antipode of `y` (where the arc
//! length to `y` stops growing and starts shrinking). Between consecutive
//! crossings the integrand is either constant or `1 - (3pi/10) sin(u)` with
//! `u` affine in `theta` with slope `+1` or `-1`, which integrates in closed
//! form.

use std::f64::consts::{PI, TAU};

use crate::protocols::slot::{bob_plan, pr_equal_given_theta, Separation, COIN_SCALE};
use crate::slots::{
    alpha_slot, beta_slot, circular_slot_distance, decode_interval, encode_interval, Angle,
    Family, Theta, THETA_RANGE,
};

/// Breakpoints closer than this are merged.
pub const BREAKPOINT_DEDUP: f64 = 1e-13;

/// Offsets of family points before the shift, in radians.
fn family_offsets(family: Family) -> [f64; 3] {
    let zero = Theta::new(0.0).expect("zero is in range");
    family.points(zero).map(Angle::value)
}

/// Sorted, deduplicated cut points in `[0, 3pi/5]` where any family point
/// passes one of `targets`.
fn breakpoints(family: Family, targets: &[Angle]) -> Vec<f64> {
    let mut cuts = vec![0.0, THETA_RANGE];
    for offset in family_offsets(family) {
        for t in targets {
            let theta = (t.value() - offset).rem_euclid(TAU);
            if theta > 0.0 && theta < THETA_RANGE {
                cuts.push(theta);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|b, a| *b - *a < BREAKPOINT_DEDUP);
    if let Some(last) = cuts.last_mut() {
        *last = THETA_RANGE;
    }
    cuts
}

fn theta_at(v: f64) -> Theta {
    Theta::new(v.min(f64::from_bits(THETA_RANGE.to_bits() - 1)))
        .expect("piece midpoints are in range")
}

/// `Pr[a = b]` of the four-bit protocol for settings `(x, y)`, averaged
/// exactly over `theta`.
pub fn integrate_slot(x: Angle, y: Angle) -> f64 {
    let flipped = circular_slot_distance(alpha_slot(x), alpha_slot(y)) > 2;
    let y_eff = if flipped { y.antipode() } else { y };
    let family = if matches!(alpha_slot(y_eff), 7 | 8 | 9 | 0 | 1) {
        Family::Gamma
    } else {
        Family::Beta
    };
    let cuts = breakpoints(family, &[x, y_eff, y_eff.antipode()]);

    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let width = hi - lo;
        if width <= 0.0 {
            continue;
        }
        let mid = theta_at(0.5 * (lo + hi));
        let m = encode_interval(x, mid);
        let x_slots = decode_interval(m, mid).expect("encoder never names an empty interval");
        let plan = bob_plan(y, x_slots, mid);
        debug_assert_eq!(plan.flipped, flipped);
        debug_assert_eq!(plan.family, family);
        let keep = match plan.separation {
            Separation::SameSlot => width,
            Separation::Boundary { point, u } => {
                // The point moves counterclockwise with theta; u grows when the
                // point is ahead of y on the short arc.
                let ahead = (point.value() - plan.y_effective.value()).rem_euclid(TAU) < PI;
                let slope = if ahead { 1.0 } else { -1.0 };
                let u_lo = u + slope * (lo - mid.value());
                let u_hi = u + slope * (hi - mid.value());
                let sin_integral = (u_lo.cos() - u_hi.cos()) / slope;
                width - COIN_SCALE * sin_integral
            }
        };
        total += if flipped { width - keep } else { keep };
    }
    total / THETA_RANGE
}

/// Midpoint-rule average of [`pr_equal_given_theta`] over `points` nodes.
pub fn integrate_slot_midpoint(x: Angle, y: Angle, points: usize) -> f64 {
    let h = THETA_RANGE / points as f64;
    let sum: f64 = (0..points)
        .map(|i| pr_equal_given_theta(x, y, theta_at((i as f64 + 0.5) * h)))
        .sum();
    sum / points as f64
}

/// Probability over `theta` that `x` and `y` fall in different beta slots.
pub fn beta_separation_probability(x: Angle, y: Angle) -> f64 {
    let cuts = breakpoints(Family::Beta, &[x, y]);
    let mut apart = 0.0;
    for w in cuts.windows(2) {
        let mid = theta_at(0.5 * (w[0] + w[1]));
        if beta_slot(x, mid) != beta_slot(y, mid) {
            apart += w[1] - w[0];
        }
    }
    apart / THETA_RANGE
}
