//! Two-party execution with a metered channel.
//!
//! A run has a preparation stage and a measurement stage. Preparation draws
//! the hidden variables `(u, v)` from a shared stream. After that each party
//! is built from its own measurement, its own hidden variable and a private
//! stream; neither constructor ever sees the other side's measurement, so
//! the only path from one party to the other is the transcript.
//!
//! Rounds run strictly in order. Before each round the protocol names the
//! speaker (or ends the stage); a protocol that asks for a round beyond its
//! declared budget aborts the run.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{derive_stream, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    AliceToBob,
    BobToAlice,
}

/// Bits sent during the measurement stage, in order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    entries: Vec<(Direction, bool)>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, direction: Direction, bit: bool) {
        self.entries.push((direction, bit));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(Direction, bool)] {
        &self.entries
    }

    /// Bits sent in one direction, in order.
    pub fn bits_from(&self, direction: Direction) -> impl Iterator<Item = bool> + '_ {
        self.entries
            .iter()
            .filter(move |(d, _)| *d == direction)
            .map(|&(_, b)| b)
    }

    /// The first `len` entries.
    pub fn prefix(&self, len: usize) -> Transcript {
        Transcript {
            entries: self.entries[..len.min(self.entries.len())].to_vec(),
        }
    }
}

/// Number of bits communicated.
pub fn bits_used(t: &Transcript) -> usize {
    t.len()
}

/// One side of a protocol during the measurement stage.
pub trait Party {
    type Output;

    /// The next bit this party sends, given everything communicated so far.
    fn send(&mut self, transcript: &Transcript) -> bool;

    /// The party's final output once communication is over.
    fn output(&mut self, transcript: &Transcript) -> Self::Output;
}

/// A local hidden variable scheme augmented with a bounded number of bits.
pub trait Protocol {
    type AliceInput;
    type BobInput;
    type AliceHidden;
    type BobHidden;
    type Alice: Party;
    type Bob: Party;

    /// Most bits the measurement stage may use.
    fn budget(&self) -> usize;

    /// Preparation stage: draws `(u, v)` from shared randomness.
    fn prepare(&self, shared: &mut Stream) -> (Self::AliceHidden, Self::BobHidden);

    fn alice(&self, x: &Self::AliceInput, u: Self::AliceHidden, private: Stream) -> Self::Alice;

    fn bob(&self, y: &Self::BobInput, v: Self::BobHidden, private: Stream) -> Self::Bob;

    /// Who speaks in `round`, or `None` when the measurement stage is over.
    fn direction(&self, round: usize, transcript: &Transcript) -> Option<Direction>;
}

pub type AliceOutput<P> = <<P as Protocol>::Alice as Party>::Output;
pub type BobOutput<P> = <<P as Protocol>::Bob as Party>::Output;

/// Everything observable about one execution.
pub struct ProtocolRun<P: Protocol> {
    pub x: P::AliceInput,
    pub y: P::BobInput,
    pub a: AliceOutput<P>,
    pub b: BobOutput<P>,
    pub transcript: Transcript,
    pub seed: u64,
}

impl<P: Protocol> PartialEq for ProtocolRun<P>
where
    P::AliceInput: PartialEq,
    P::BobInput: PartialEq,
    AliceOutput<P>: PartialEq,
    BobOutput<P>: PartialEq,
{
    fn eq(&self, other: &Self) -> bool {
        self.x == other.x
            && self.y == other.y
            && self.a == other.a
            && self.b == other.b
            && self.transcript == other.transcript
            && self.seed == other.seed
    }
}

impl<P: Protocol> std::fmt::Debug for ProtocolRun<P>
where
    P::AliceInput: std::fmt::Debug,
    P::BobInput: std::fmt::Debug,
    AliceOutput<P>: std::fmt::Debug,
    BobOutput<P>: std::fmt::Debug,
{
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProtocolRun")
            .field("x", &self.x)
            .field("y", &self.y)
            .field("a", &self.a)
            .field("b", &self.b)
            .field("transcript", &self.transcript)
            .field("seed", &self.seed)
            .finish()
    }
}

/// Label of the preparation stream under a run seed.
pub const SHARED_LABEL: u64 = 0;
/// Label of Alice's private stream under a run seed.
pub const ALICE_LABEL: u64 = 1;
/// Label of Bob's private stream under a run seed.
pub const BOB_LABEL: u64 = 2;

/// Executes one run. The seed fixes the shared stream and both private
/// streams, so replaying a seed reproduces the run bit for bit.
pub fn run<P>(protocol: &P, x: P::AliceInput, y: P::BobInput, seed: u64) -> Result<ProtocolRun<P>>
where
    P: Protocol,
{
    let mut shared = derive_stream(seed, &[SHARED_LABEL]);
    let (u, v) = protocol.prepare(&mut shared);
    let mut alice = protocol.alice(&x, u, derive_stream(seed, &[ALICE_LABEL]));
    let mut bob = protocol.bob(&y, v, derive_stream(seed, &[BOB_LABEL]));

    let budget = protocol.budget();
    let mut transcript = Transcript::new();
    let mut round = 0;
    while let Some(dir) = protocol.direction(round, &transcript) {
        if round >= budget {
            return Err(Error::BudgetViolation {
                budget,
                attempted: round + 1,
            });
        }
        let bit = match dir {
            Direction::AliceToBob => alice.send(&transcript),
            Direction::BobToAlice => bob.send(&transcript),
        };
        transcript.push(dir, bit);
        round += 1;
    }
    let a = alice.output(&transcript);
    let b = bob.output(&transcript);
    Ok(ProtocolRun {
        x,
        y,
        a,
        b,
        transcript,
        seed,
    })
}

/// Bits of `value`, most significant first, over `width` bits.
pub fn to_bits_be(value: u64, width: usize) -> Vec<bool> {
    (0..width).rev().map(|s| (value >> s) & 1 == 1).collect()
}

pub fn from_bits_be(bits: impl IntoIterator<Item = bool>) -> u64 {
    bits.into_iter().fold(0, |acc, b| (acc << 1) | u64::from(b))
}
