//! Angles on the unit circle and the three slot families used by the
//! four-bit protocol.
//!
//! The fixed family splits the circle into ten arcs of width `pi/5`
//! starting at `0`. The two moving families each place three points on the
//! circle, offset by the shared hidden angle `theta`:
//!
//! * beta:  `theta`, `3pi/5 + theta`, `6pi/5 + theta`
//! * gamma: `pi + theta`, `8pi/5 + theta`, `pi/5 + theta`
//!
//! Every slot is a half-open arc `[left, right)` taken counterclockwise, so a
//! point sitting exactly on a boundary belongs to the slot on its right.
//! No epsilon is applied anywhere; all membership tests are exact float
//! comparisons between normalized values.

use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Width of the hidden-angle range, `3pi/5`.
pub const THETA_RANGE: f64 = 3.0 * PI / 5.0;

/// Number of fixed (alpha) slots.
pub const ALPHA_SLOTS: u8 = 10;

/// Number of intervals the three families cut the circle into.
pub const INTERVALS: usize = 16;

/// A point on the unit circle, stored in `[0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);

    /// Reduces `raw` modulo `2pi`.
    pub fn new(raw: f64) -> Result<Self> {
        normalize(raw)
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// `self + delta`, wrapped.
    #[inline]
    pub fn rotate(self, delta: f64) -> Angle {
        Angle(wrap(self.0 + delta))
    }

    /// The reflection `-self`, wrapped.
    #[inline]
    pub fn reflect(self) -> Angle {
        Angle(wrap(-self.0))
    }

    /// The antipodal point `self + pi`.
    #[inline]
    pub fn antipode(self) -> Angle {
        self.rotate(PI)
    }

    /// Length of the shorter arc between two angles, in `[0, pi]`.
    pub fn arc_distance(self, other: Angle) -> f64 {
        let d = (self.0 - other.0).abs();
        d.min(TAU - d)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl TryFrom<f64> for Angle {
    type Error = Error;
    fn try_from(raw: f64) -> Result<Self> {
        normalize(raw)
    }
}

impl From<Angle> for f64 {
    fn from(a: Angle) -> f64 {
        a.0
    }
}

#[inline]
fn wrap(raw: f64) -> f64 {
    let r = raw.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs.
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Reduces a finite real into the canonical range `[0, 2pi)`.
pub fn normalize(raw: f64) -> Result<Angle> {
    if !raw.is_finite() {
        return Err(Error::InvalidAngle(raw));
    }
    Ok(Angle(wrap(raw)))
}

/// The shared hidden angle, uniform on `[0, 3pi/5)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Theta(f64);

impl Theta {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && (0.0..THETA_RANGE).contains(&value) {
            Ok(Theta(value))
        } else {
            Err(Error::InvalidTheta(value))
        }
    }

    /// Maps a uniform draw from `[0, 1)` onto `[0, 3pi/5)`.
    pub fn from_unit(u: f64) -> Theta {
        debug_assert!((0.0..1.0).contains(&u));
        let v = u * THETA_RANGE;
        // u < 1 can still round up to the excluded endpoint.
        if v >= THETA_RANGE {
            Theta(f64::from_bits(THETA_RANGE.to_bits() - 1))
        } else {
            Theta(v)
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

/// The two moving three-point families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Beta,
    Gamma,
}

impl Family {
    /// Offsets of the family's points before the `theta` shift, in units of
    /// `pi/5`.
    fn offsets(self) -> [u8; 3] {
        match self {
            Family::Beta => [0, 3, 6],
            Family::Gamma => [5, 8, 1],
        }
    }

    /// The three boundary points for this `theta`.
    pub fn points(self, theta: Theta) -> [Angle; 3] {
        self.offsets()
            .map(|k| alpha_point(k).rotate(theta.value()))
    }

    /// Index `j` of the slot `[p_j, p_{(j+1) mod 3})` containing `x`.
    pub fn slot(self, x: Angle, theta: Theta) -> u8 {
        slot_among(x, &self.points(theta))
    }
}

/// The `j`-th fixed point `j*pi/5`.
#[inline]
pub fn alpha_point(j: u8) -> Angle {
    debug_assert!(j < ALPHA_SLOTS);
    Angle(f64::from(j) * PI / 5.0)
}

/// Index of the fixed slot `[j*pi/5, (j+1)*pi/5)` containing `x`.
pub fn alpha_slot(x: Angle) -> u8 {
    // Compare against the same point values the encoder sorts, so slot
    // assignment never disagrees with the interval decomposition.
    let mut j = (x.value() / (PI / 5.0)) as u8;
    j = j.min(ALPHA_SLOTS - 1);
    while j > 0 && x < alpha_point(j) {
        j -= 1;
    }
    while j + 1 < ALPHA_SLOTS && x >= alpha_point(j + 1) {
        j += 1;
    }
    j
}

pub fn beta_points(theta: Theta) -> [Angle; 3] {
    Family::Beta.points(theta)
}

pub fn gamma_points(theta: Theta) -> [Angle; 3] {
    Family::Gamma.points(theta)
}

pub fn beta_slot(x: Angle, theta: Theta) -> u8 {
    Family::Beta.slot(x, theta)
}

pub fn gamma_slot(x: Angle, theta: Theta) -> u8 {
    Family::Gamma.slot(x, theta)
}

/// True when `x` lies on the counterclockwise half-open arc `[from, to)`.
#[inline]
pub fn on_arc(x: Angle, from: Angle, to: Angle) -> bool {
    if from <= to {
        from <= x && x < to
    } else {
        x >= from || x < to
    }
}

fn slot_among(x: Angle, points: &[Angle; 3]) -> u8 {
    for j in 0..3 {
        if on_arc(x, points[j], points[(j + 1) % 3]) {
            return j as u8;
        }
    }
    unreachable!("three distinct points always cover the circle")
}

/// The fixed, beta and gamma slot numbers of one angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SlotTriple {
    pub alpha: u8,
    pub beta: u8,
    pub gamma: u8,
}

impl SlotTriple {
    pub fn of(x: Angle, theta: Theta) -> SlotTriple {
        SlotTriple {
            alpha: alpha_slot(x),
            beta: beta_slot(x, theta),
            gamma: gamma_slot(x, theta),
        }
    }

    pub fn family(&self, family: Family) -> u8 {
        match family {
            Family::Beta => self.beta,
            Family::Gamma => self.gamma,
        }
    }
}

/// A four-bit interval index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntervalMessage(u8);

impl IntervalMessage {
    pub const BITS: usize = 4;

    pub fn new(index: u8) -> Result<Self> {
        if usize::from(index) < INTERVALS {
            Ok(IntervalMessage(index))
        } else {
            Err(Error::MessageOutOfRange(index))
        }
    }

    pub fn index(self) -> u8 {
        self.0
    }

    /// Big-endian bits, most significant first.
    pub fn bits(self) -> [bool; 4] {
        [3, 2, 1, 0].map(|s| (self.0 >> s) & 1 == 1)
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        if bits.len() != Self::BITS {
            return Err(Error::Dimension(format!(
                "interval message needs 4 bits, got {}",
                bits.len()
            )));
        }
        let index = bits.iter().fold(0u8, |acc, &b| (acc << 1) | u8::from(b));
        IntervalMessage::new(index)
    }
}

/// All sixteen boundary points for `theta`, sorted increasingly from `0`.
/// Coincident points are kept, which leaves some intervals empty at the
/// finitely many `theta` where a moving point lands on a fixed one.
pub fn boundaries(theta: Theta) -> [Angle; INTERVALS] {
    let mut pts = [Angle::ZERO; INTERVALS];
    for j in 0..ALPHA_SLOTS {
        pts[usize::from(j)] = alpha_point(j);
    }
    pts[10..13].copy_from_slice(&beta_points(theta));
    pts[13..16].copy_from_slice(&gamma_points(theta));
    pts.sort_unstable_by(|a, b| a.value().total_cmp(&b.value()));
    pts
}

/// Index of the interval `[p_i, p_{i+1})` containing `x`, where `p` is the
/// sorted boundary list. Among coincident boundaries the last one is used,
/// so the named interval is never empty.
pub fn encode_interval(x: Angle, theta: Theta) -> IntervalMessage {
    let mut count = 1u8; // alpha_0 = 0 is always <= x
    for j in 1..ALPHA_SLOTS {
        count += u8::from(alpha_point(j) <= x);
    }
    for p in beta_points(theta).into_iter().chain(gamma_points(theta)) {
        count += u8::from(p <= x);
    }
    IntervalMessage(count - 1)
}

/// Recovers the slot triple of every angle in the named interval.
pub fn decode_interval(m: IntervalMessage, theta: Theta) -> Result<SlotTriple> {
    let pts = boundaries(theta);
    let i = usize::from(m.0);
    let left = pts[i];
    if i + 1 < INTERVALS && pts[i + 1] <= left {
        return Err(Error::InconsistentMessage {
            index: m.0,
            theta: theta.value(),
        });
    }
    Ok(SlotTriple::of(left, theta))
}

/// Distance between two fixed-slot numbers on the ten-cycle.
pub fn circular_slot_distance(s1: u8, s2: u8) -> u8 {
    let d = s1.abs_diff(s2) % ALPHA_SLOTS;
    d.min(ALPHA_SLOTS - d)
}
