//! Eight-bit protocol for general von Neumann measurements `S(x, x')`,
//! built from two runs of the four-bit slot protocol.
//!
//! The first run uses Alice's phase `x'` and Bob's negated phase `-y'`, so
//! its outputs agree with probability `cos^2((x' + y') / 2)`. The second run
//! uses `(-1)^{a'} x` and `(-1)^{b'} y`, which gives agreement
//! `cos^2((x - y) / 2)` when the first outputs matched and
//! `cos^2((x + y) / 2)` when they did not.

use serde::{Deserialize, Serialize};

use crate::engine::{Direction, Party, Protocol, Transcript};
use crate::error::Result;
use crate::quantum::GeneralMeasurement;
use crate::rng::Stream;
use crate::slots::{Angle, IntervalMessage};

use super::slot::{slot_alice, slot_bob, SlotHidden};

/// Final and first-stage outputs of one party.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComposedBit {
    pub bit: bool,
    pub first: bool,
}

#[inline]
fn signed(angle: Angle, negate: bool) -> Angle {
    if negate {
        angle.reflect()
    } else {
        angle
    }
}

/// Both parties' outputs for one execution with explicit hidden variables.
pub fn composed_run(
    alice: GeneralMeasurement,
    bob: GeneralMeasurement,
    h1: &SlotHidden,
    h2: &SlotHidden,
    rng: &mut Stream,
) -> Result<(ComposedBit, ComposedBit)> {
    let (m1, a1) = slot_alice(alice.phase, h1);
    let b1 = slot_bob(bob.phase.reflect(), h1, m1, rng)?;
    let (m2, a) = slot_alice(signed(alice.x, a1), h2);
    let b = slot_bob(signed(bob.x, b1), h2, m2, rng)?;
    Ok((
        ComposedBit { bit: a, first: a1 },
        ComposedBit { bit: b, first: b1 },
    ))
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ComposedProtocol;

pub struct ComposedAlice {
    bits: [bool; 8],
    out: ComposedBit,
}

pub struct ComposedBob {
    measurement: GeneralMeasurement,
    hidden: (SlotHidden, SlotHidden),
    rng: Stream,
}

impl Party for ComposedAlice {
    type Output = ComposedBit;

    fn send(&mut self, t: &Transcript) -> bool {
        self.bits[t.len()]
    }

    fn output(&mut self, _: &Transcript) -> ComposedBit {
        self.out
    }
}

impl Party for ComposedBob {
    type Output = ComposedBit;

    fn send(&mut self, _: &Transcript) -> bool {
        unreachable!("bob never speaks in the composed protocol")
    }

    fn output(&mut self, t: &Transcript) -> ComposedBit {
        let bits: Vec<bool> = t.bits_from(Direction::AliceToBob).collect();
        let m1 = IntervalMessage::from_bits(&bits[..4]).expect("first message");
        let m2 = IntervalMessage::from_bits(&bits[4..]).expect("second message");
        let (h1, h2) = self.hidden;
        let b1 = slot_bob(self.measurement.phase.reflect(), &h1, m1, &mut self.rng)
            .expect("first message was encoded under h1");
        let b = slot_bob(signed(self.measurement.x, b1), &h2, m2, &mut self.rng)
            .expect("second message was encoded under h2");
        ComposedBit { bit: b, first: b1 }
    }
}

impl Protocol for ComposedProtocol {
    type AliceInput = GeneralMeasurement;
    type BobInput = GeneralMeasurement;
    type AliceHidden = (SlotHidden, SlotHidden);
    type BobHidden = (SlotHidden, SlotHidden);
    type Alice = ComposedAlice;
    type Bob = ComposedBob;

    fn budget(&self) -> usize {
        2 * IntervalMessage::BITS
    }

    fn prepare(&self, shared: &mut Stream) -> (Self::AliceHidden, Self::BobHidden) {
        let h1 = SlotHidden::sample(shared);
        let h2 = SlotHidden::sample(shared);
        ((h1, h2), (h1, h2))
    }

    fn alice(&self, x: &GeneralMeasurement, u: Self::AliceHidden, _: Stream) -> ComposedAlice {
        let (h1, h2) = u;
        let (m1, a1) = slot_alice(x.phase, &h1);
        let (m2, a) = slot_alice(signed(x.x, a1), &h2);
        let mut bits = [false; 8];
        bits[..4].copy_from_slice(&m1.bits());
        bits[4..].copy_from_slice(&m2.bits());
        ComposedAlice {
            bits,
            out: ComposedBit { bit: a, first: a1 },
        }
    }

    fn bob(&self, y: &GeneralMeasurement, v: Self::BobHidden, private: Stream) -> ComposedBob {
        ComposedBob {
            measurement: *y,
            hidden: v,
            rng: private,
        }
    }

    fn direction(&self, round: usize, _: &Transcript) -> Option<Direction> {
        (round < 2 * IntervalMessage::BITS).then_some(Direction::AliceToBob)
    }
}
