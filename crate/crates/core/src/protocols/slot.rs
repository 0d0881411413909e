//! Four-bit protocol for real measurements on one Bell pair.
//!
//! Shared randomness is a uniform bit `c` and a uniform angle `theta` in
//! `[0, 3pi/5)`. Alice sends the index of the interval (one of sixteen)
//! holding `x` and outputs `c`. Bob, knowing `y` exactly and `x` only up to
//! its fixed, beta and gamma slots, runs:
//!
//! 1. if the fixed slots of `x` and `y` are more than two apart on the
//!    ten-cycle, replace `y` by `y + pi` and `c` by `!c`;
//! 2. if `y` (as updated) sits in fixed slot 7, 8, 9, 0 or 1, use the gamma
//!    points instead of the beta points;
//! 3. if `x` and `y` share a slot of the active family, output `c`;
//! 4. otherwise let `u` be the arc length from `y` to the family point
//!    separating the two slots and output `c` with probability
//!    `1 - (3pi/10) sin(u)`, else `!c`.
//!
//! Averaged over `theta` this yields `Pr[a = b] = cos^2((x - y) / 2)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::engine::{Direction, Party, Protocol, Transcript};
use crate::error::Result;
use crate::rng::Stream;
use crate::slots::{
    alpha_slot, circular_slot_distance, decode_interval, encode_interval, Angle, Family,
    IntervalMessage, SlotTriple, Theta, THETA_RANGE,
};

/// Scale of the correction term in Bob's coin, `3pi/10`.
pub const COIN_SCALE: f64 = 3.0 * PI / 10.0;

/// Shared hidden variables, held identically by both parties.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlotHidden {
    pub c: bool,
    pub theta: Theta,
}

impl SlotHidden {
    pub fn sample(shared: &mut Stream) -> SlotHidden {
        let c = shared.bit();
        let theta = Theta::from_unit(shared.uniform());
        SlotHidden { c, theta }
    }
}

/// Alice's message and output.
pub fn slot_alice(x: Angle, h: &SlotHidden) -> (IntervalMessage, bool) {
    (encode_interval(x, h.theta), h.c)
}

/// How `x` and the effective `y` relate in the active family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Separation {
    SameSlot,
    /// Distinct slots; `point` is the family point between them and `u`
    /// the arc length from `y` to it.
    Boundary { point: Angle, u: f64 },
}

/// Everything Bob decides before tossing his coin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BobPlan {
    /// Whether `y` was moved to its antipode (and `c` negated).
    pub flipped: bool,
    /// The `y` the slot comparisons use.
    pub y_effective: Angle,
    pub family: Family,
    pub separation: Separation,
}

impl BobPlan {
    /// Probability that Bob outputs the (possibly negated) `c` he works with.
    pub fn pr_keep(&self) -> f64 {
        match self.separation {
            Separation::SameSlot => 1.0,
            Separation::Boundary { u, .. } => 1.0 - COIN_SCALE * u.sin(),
        }
    }

    /// Probability that Bob's output equals Alice's output `c`.
    pub fn pr_equal(&self) -> f64 {
        if self.flipped {
            1.0 - self.pr_keep()
        } else {
            self.pr_keep()
        }
    }
}

/// Bob's deterministic steps 1 to 3 plus the boundary lookup of step 4.
pub fn bob_plan(y: Angle, x_slots: SlotTriple, theta: Theta) -> BobPlan {
    let flipped = circular_slot_distance(x_slots.alpha, alpha_slot(y)) > 2;
    let y_effective = if flipped { y.antipode() } else { y };
    let family = if matches!(alpha_slot(y_effective), 7 | 8 | 9 | 0 | 1) {
        Family::Gamma
    } else {
        Family::Beta
    };
    let points = family.points(theta);
    let jx = x_slots.family(family);
    let jy = family.slot(y_effective, theta);
    let separation = if jx == jy {
        Separation::SameSlot
    } else {
        // Three slots: x is either in the slot after y's (the crossing is
        // x's left end) or in the slot before it (the crossing is y's left
        // end).
        let point = if jx == (jy + 1) % 3 {
            points[usize::from(jx)]
        } else {
            points[usize::from(jy)]
        };
        let u = y_effective.arc_distance(point);
        debug_assert!(u <= THETA_RANGE + 1e-9, "separating point too far: u = {u}");
        Separation::Boundary { point, u }
    };
    BobPlan {
        flipped,
        y_effective,
        family,
        separation,
    }
}

/// Bob's output for measurement `y` after receiving `m`.
pub fn slot_bob(y: Angle, h: &SlotHidden, m: IntervalMessage, rng: &mut Stream) -> Result<bool> {
    let x_slots = decode_interval(m, h.theta)?;
    let plan = bob_plan(y, x_slots, h.theta);
    let c = h.c ^ plan.flipped;
    let keep = match plan.separation {
        Separation::SameSlot => true,
        Separation::Boundary { .. } => rng.bernoulli(plan.pr_keep()),
    };
    Ok(if keep { c } else { !c })
}

/// Exact `Pr[a = b]` for fixed `theta`, averaged over `c` and Bob's coin.
pub fn pr_equal_given_theta(x: Angle, y: Angle, theta: Theta) -> f64 {
    let m = encode_interval(x, theta);
    let x_slots = decode_interval(m, theta).expect("encoder never names an empty interval");
    bob_plan(y, x_slots, theta).pr_equal()
}

/// The four-bit protocol as a two-party engine protocol.
#[derive(Debug, Clone, Copy, Default)]
pub struct SlotProtocol;

pub struct SlotAlice {
    bits: [bool; 4],
    c: bool,
}

pub struct SlotBob {
    y: Angle,
    hidden: SlotHidden,
    rng: Stream,
}

impl Party for SlotAlice {
    type Output = bool;

    fn send(&mut self, t: &Transcript) -> bool {
        self.bits[t.len()]
    }

    fn output(&mut self, _: &Transcript) -> bool {
        self.c
    }
}

impl Party for SlotBob {
    type Output = bool;

    fn send(&mut self, _: &Transcript) -> bool {
        unreachable!("bob never speaks in the slot protocol")
    }

    fn output(&mut self, t: &Transcript) -> bool {
        let bits: Vec<bool> = t.bits_from(Direction::AliceToBob).collect();
        let m = IntervalMessage::from_bits(&bits).expect("four message bits");
        slot_bob(self.y, &self.hidden, m, &mut self.rng)
            .expect("message was encoded under the same theta")
    }
}

impl Protocol for SlotProtocol {
    type AliceInput = Angle;
    type BobInput = Angle;
    type AliceHidden = SlotHidden;
    type BobHidden = SlotHidden;
    type Alice = SlotAlice;
    type Bob = SlotBob;

    fn budget(&self) -> usize {
        IntervalMessage::BITS
    }

    fn prepare(&self, shared: &mut Stream) -> (SlotHidden, SlotHidden) {
        let h = SlotHidden::sample(shared);
        (h, h)
    }

    fn alice(&self, x: &Angle, u: SlotHidden, _: Stream) -> SlotAlice {
        let (m, c) = slot_alice(*x, &u);
        SlotAlice { bits: m.bits(), c }
    }

    fn bob(&self, y: &Angle, v: SlotHidden, private: Stream) -> SlotBob {
        SlotBob {
            y: *y,
            hidden: v,
            rng: private,
        }
    }

    fn direction(&self, round: usize, _: &Transcript) -> Option<Direction> {
        (round < IntervalMessage::BITS).then_some(Direction::AliceToBob)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::run;
    use crate::rng::derive_stream;

    fn a(v: f64) -> Angle {
        Angle::new(v).unwrap()
    }

    #[test]
    fn alice_outputs_c() {
        for (c, x) in [(false, 0.3), (true, 5.0), (false, 6.2)] {
            let h = SlotHidden { c, theta: Theta::new(0.7).unwrap() };
            assert_eq!(slot_alice(a(x), &h).1, c);
        }
    }

    #[test]
    fn alice_message_for_small_angle() {
        let t = Theta::new(0.02).unwrap();
        let (m, _) = slot_alice(a(0.01), &SlotHidden { c: false, theta: t });
        assert_eq!(
            decode_interval(m, t).unwrap(),
            SlotTriple { alpha: 0, beta: 2, gamma: 1 }
        );
    }

    #[test]
    fn message_depends_on_theta() {
        let x = a(1.0);
        let m1 = encode_interval(x, Theta::new(0.1).unwrap());
        let m2 = encode_interval(x, Theta::new(1.5).unwrap());
        assert_ne!(m1, m2);
    }

    #[test]
    fn same_slot_is_deterministic() {
        // 2.0 and 2.5 both lie in beta slot [3pi/5, 6pi/5) at theta = 0.
        let theta = Theta::new(0.0).unwrap();
        let h = SlotHidden { c: true, theta };
        let (m, _) = slot_alice(a(2.0), &h);
        let mut rng = derive_stream(0, &[]);
        for _ in 0..100 {
            assert!(slot_bob(a(2.5), &h, m, &mut rng).unwrap());
        }
        assert_eq!(pr_equal_given_theta(a(2.0), a(2.5), theta), 1.0);
    }

    #[test]
    fn low_alpha_slot_uses_gamma_points() {
        // y = pi/3 is in alpha slot 1, so the gamma point pi/5 separates it
        // from x = 0.
        let theta = Theta::new(0.0).unwrap();
        let expected = 1.0 - COIN_SCALE * (PI / 3.0 - PI / 5.0).sin();
        let got = pr_equal_given_theta(a(0.0), a(PI / 3.0), theta);
        assert!((got - expected).abs() < 1e-12, "{got}");
    }

    #[test]
    fn equal_settings_always_agree() {
        for t in [0.0, 0.5, 1.3, 1.88] {
            let t = Theta::new(t).unwrap();
            for x in [0.0, 0.9, 3.2, 6.0] {
                assert_eq!(pr_equal_given_theta(a(x), a(x), t), 1.0);
            }
        }
    }

    #[test]
    fn boundary_on_y_keeps_c() {
        // y sits exactly on beta_1 = 3pi/5 + theta, x is in the slot before.
        let theta = Theta::new(0.1).unwrap();
        let y = a(3.0 * PI / 5.0 + 0.1);
        let x = a(1.2);
        let plan = bob_plan(y, SlotTriple::of(x, theta), theta);
        assert!(!plan.flipped);
        match plan.separation {
            Separation::Boundary { u, .. } => assert!(u.abs() < 1e-15),
            Separation::SameSlot => panic!("expected distinct slots"),
        }
        assert!((plan.pr_keep() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn antipodal_settings_flip() {
        let theta = Theta::new(0.4).unwrap();
        let plan = bob_plan(a(PI), SlotTriple::of(a(0.0), theta), theta);
        assert!(plan.flipped);
        assert_eq!(plan.y_effective.value(), 0.0);
        assert_eq!(plan.pr_equal(), 0.0);
    }

    #[test]
    fn transcript_is_four_alice_bits() {
        for seed in 0..200 {
            let r = run(&SlotProtocol, a(seed as f64 * 0.37), a(seed as f64 * 1.1), seed).unwrap();
            assert_eq!(r.transcript.len(), 4);
            assert!(r
                .transcript
                .entries()
                .iter()
                .all(|e| e.0 == Direction::AliceToBob));
        }
    }

    #[test]
    fn alice_ignores_y() {
        for seed in 0..200 {
            let r1 = run(&SlotProtocol, a(2.0), a(0.1), seed).unwrap();
            let r2 = run(&SlotProtocol, a(2.0), a(4.4), seed).unwrap();
            assert_eq!(r1.a, r2.a);
            assert_eq!(r1.transcript, r2.transcript);
        }
    }
}
