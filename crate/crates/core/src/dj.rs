//! Restricted equality from an exact Deutsch-Jozsa simulator.
//!
//! Alice and Bob hold `x, y` in `{0,1}^{2^n}` with the promise that either
//! `x = y` or the Hamming distance is exactly `2^{n-1}`. Running any exact
//! simulation of the Deutsch-Jozsa scenario on `(x, y)` gives outcomes with
//! `Pr[a = b] = 1` in the first case and `0` in the second, so Alice only has
//! to append her `n`-bit outcome and Bob compares. The wrapped protocol uses
//! the simulator's bits plus `n`.

use serde::{Deserialize, Serialize};

use crate::engine::{
    from_bits_be, run, Direction, Party, Protocol, Transcript,
};
use crate::error::{Error, Result};
use crate::quantum::DjMeasurement;
use crate::rng::{derive_stream, Stream};

/// Largest `n` for which every promise pair is listed.
pub const EXHAUSTIVE_MAX_N: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PromiseKind {
    Equal,
    HalfDistance,
}

/// Two parameter strings of length `2^n` satisfying the promise.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PromisePair {
    pub x: DjMeasurement,
    pub y: DjMeasurement,
    pub kind: PromiseKind,
}

impl PromisePair {
    /// Checks the promise and classifies the pair; `None` when neither case
    /// holds.
    pub fn classify(x: DjMeasurement, y: DjMeasurement) -> Result<Option<PromisePair>> {
        let d = x.hamming(&y)?;
        let half = 1usize << (x.n() - 1);
        let kind = if d == 0 {
            PromiseKind::Equal
        } else if d == half {
            PromiseKind::HalfDistance
        } else {
            return Ok(None);
        };
        Ok(Some(PromisePair { x, y, kind }))
    }

    /// The answer restricted equality must give.
    pub fn expected_answer(&self) -> bool {
        self.kind == PromiseKind::Equal
    }
}

/// Every promise pair for `n <= 2`, ordered by `(x, y)` code.
pub fn enumerate_promise_pairs(n: u32) -> Result<Vec<PromisePair>> {
    if n == 0 || n > EXHAUSTIVE_MAX_N {
        return Err(Error::ResourceLimit(format!(
            "exhaustive enumeration supports 1 <= n <= {EXHAUSTIVE_MAX_N}, got {n}; \
             use sample_promise_pairs"
        )));
    }
    let count = 1u64 << (1u32 << n);
    let mut out = Vec::new();
    for p in 0..count {
        for q in 0..count {
            let x = DjMeasurement::from_code(n, p)?;
            let y = DjMeasurement::from_code(n, q)?;
            if let Some(pair) = PromisePair::classify(x, y)? {
                out.push(pair);
            }
        }
    }
    Ok(out)
}

/// A deterministic pseudorandom sample of promise pairs. Pairs alternate
/// between the two kinds; half-distance partners flip a uniformly chosen
/// set of `2^{n-1}` positions.
pub fn sample_promise_pairs(n: u32, count: usize, seed: u64) -> Result<Vec<PromisePair>> {
    if n == 0 || n > 20 {
        return Err(Error::InvalidArgument(format!("n must be in 1..=20, got {n}")));
    }
    let len = 1usize << n;
    let mut rng = derive_stream(seed, &[u64::from(n)]);
    let mut out = Vec::with_capacity(count);
    let mut positions: Vec<usize> = (0..len).collect();
    for i in 0..count {
        let x: Vec<bool> = (0..len).map(|_| rng.bit()).collect();
        let mut y = x.clone();
        let kind = if i % 2 == 0 {
            PromiseKind::Equal
        } else {
            // Partial Fisher-Yates: the first len/2 slots become a uniform subset.
            for k in 0..len / 2 {
                let j = k + rng.below((len - k) as u64) as usize;
                positions.swap(k, j);
                y[positions[k]] ^= true;
            }
            PromiseKind::HalfDistance
        };
        out.push(PromisePair {
            x: DjMeasurement::new(n, x)?,
            y: DjMeasurement::new(n, y)?,
            kind,
        });
    }
    Ok(out)
}

/// Outcome of one restricted-equality execution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EqProtocolResult {
    pub answer: bool,
    pub bits_used: usize,
}

/// Wraps an exact Deutsch-Jozsa simulator whose outputs are outcome indices
/// in `0..2^n`.
pub struct RestrictedEquality<'p, P> {
    inner: &'p P,
    n: u32,
}

impl<'p, P: Protocol> RestrictedEquality<'p, P> {
    pub fn new(inner: &'p P, n: u32) -> Self {
        RestrictedEquality { inner, n }
    }
}

/// Round at which the inner protocol's measurement stage ended, if it has.
fn inner_len<P: Protocol>(inner: &P, t: &Transcript) -> Option<usize> {
    (0..=t.len()).find(|&r| inner.direction(r, &t.prefix(r)).is_none())
}

pub struct EqAlice<'p, P: Protocol> {
    inner_protocol: &'p P,
    inner: P::Alice,
    n: u32,
    outcome: Option<usize>,
}

pub struct EqBob<'p, P: Protocol> {
    inner_protocol: &'p P,
    inner: P::Bob,
    n: u32,
}

impl<'p, P> Party for EqAlice<'p, P>
where
    P: Protocol,
    P::Alice: Party<Output = usize>,
{
    type Output = usize;

    fn send(&mut self, t: &Transcript) -> bool {
        match inner_len(self.inner_protocol, t) {
            None => self.inner.send(t),
            Some(end) => {
                let a = self.output(&t.prefix(end));
                let k = t.len() - end;
                (a >> (self.n as usize - 1 - k)) & 1 == 1
            }
        }
    }

    fn output(&mut self, t: &Transcript) -> usize {
        if let Some(a) = self.outcome {
            return a;
        }
        let a = self.inner.output(t);
        self.outcome = Some(a);
        a
    }
}

impl<'p, P> Party for EqBob<'p, P>
where
    P: Protocol,
    P::Bob: Party<Output = usize>,
{
    /// `true` when Bob declares the inputs equal.
    type Output = bool;

    fn send(&mut self, t: &Transcript) -> bool {
        self.inner.send(t)
    }

    fn output(&mut self, t: &Transcript) -> bool {
        let end = inner_len(self.inner_protocol, t).expect("inner protocol finished");
        debug_assert_eq!(t.len() - end, self.n as usize);
        let b = self.inner.output(&t.prefix(end));
        let a = from_bits_be(t.entries()[end..].iter().map(|e| e.1)) as usize;
        a == b
    }
}

impl<'p, P> Protocol for RestrictedEquality<'p, P>
where
    P: Protocol,
    P::Alice: Party<Output = usize>,
    P::Bob: Party<Output = usize>,
{
    type AliceInput = P::AliceInput;
    type BobInput = P::BobInput;
    type AliceHidden = P::AliceHidden;
    type BobHidden = P::BobHidden;
    type Alice = EqAlice<'p, P>;
    type Bob = EqBob<'p, P>;

    fn budget(&self) -> usize {
        self.inner.budget() + self.n as usize
    }

    fn prepare(&self, shared: &mut Stream) -> (P::AliceHidden, P::BobHidden) {
        self.inner.prepare(shared)
    }

    fn alice(&self, x: &P::AliceInput, u: P::AliceHidden, private: Stream) -> EqAlice<'p, P> {
        EqAlice {
            inner_protocol: self.inner,
            inner: self.inner.alice(x, u, private),
            n: self.n,
            outcome: None,
        }
    }

    fn bob(&self, y: &P::BobInput, v: P::BobHidden, private: Stream) -> EqBob<'p, P> {
        EqBob {
            inner_protocol: self.inner,
            inner: self.inner.bob(y, v, private),
            n: self.n,
        }
    }

    fn direction(&self, round: usize, t: &Transcript) -> Option<Direction> {
        match inner_len(self.inner, t) {
            None => self.inner.direction(round, t),
            Some(end) => (round < end + self.n as usize).then_some(Direction::AliceToBob),
        }
    }
}

/// Runs restricted equality on top of `sim` for one input pair.
pub fn restricted_eq<P>(
    sim: &P,
    n: u32,
    x: P::AliceInput,
    y: P::BobInput,
    seed: u64,
) -> Result<EqProtocolResult>
where
    P: Protocol,
    P::Alice: Party<Output = usize>,
    P::Bob: Party<Output = usize>,
{
    let wrapped = RestrictedEquality::new(sim, n);
    let r = run(&wrapped, x, y, seed)?;
    Ok(EqProtocolResult {
        answer: r.b,
        bits_used: r.transcript.len(),
    })
}
