//! Table protocol for any finite measurement scenario.
//!
//! Alice's outcome distribution for a measurement `x` does not depend on
//! Bob's choice `y`, so the parties can pre-sample one outcome `a(x)` per
//! Alice measurement and, for every pair, an outcome `b(x, y)` from the
//! conditional distribution given `a(x)`. During the measurement stage Alice
//! sends the index of `x` (`ceil(log2 |M_A|)` bits, big-endian) and each
//! party reads its entry.

use std::f64::consts::PI;

use crate::engine::{from_bits_be, to_bits_be, Direction, Party, Protocol, Transcript};
use crate::error::{Error, Result};
use crate::quantum::{bell_joint_real, dj_joint, DjMeasurement, RealMeasurement};
use crate::rng::{derive_stream, Stream};
use crate::slots::Angle;

/// Largest `n` for which the full Deutsch-Jozsa scenario is built.
pub const DJ_SCENARIO_MAX_N: u32 = 3;

/// Tolerance on Alice's marginal agreeing across Bob's measurements.
pub const MARGINAL_TOLERANCE: f64 = 1e-9;

/// Finite measurement sets with the exact joint outcome table of every pair.
#[derive(Debug, Clone)]
pub struct FiniteScenario<A, B> {
    alice: Vec<A>,
    bob: Vec<B>,
    alice_outcomes: usize,
    bob_outcomes: usize,
    /// `tables[x * |M_B| + y]`, each row-major `alice_outcomes x bob_outcomes`.
    tables: Vec<Vec<f64>>,
    marginals: Vec<Vec<f64>>,
}

impl<A, B> FiniteScenario<A, B> {
    /// Builds and validates a scenario. `joint(x, y)` must return the
    /// row-major outcome table for that pair.
    pub fn new<F>(
        alice: Vec<A>,
        bob: Vec<B>,
        alice_outcomes: usize,
        bob_outcomes: usize,
        joint: F,
    ) -> Result<Self>
    where
        F: Fn(&A, &B) -> Result<Vec<f64>>,
    {
        if alice.is_empty() || bob.is_empty() {
            return Err(Error::InvalidScenario("empty measurement set".into()));
        }
        let cells = alice_outcomes * bob_outcomes;
        let mut tables = Vec::with_capacity(alice.len() * bob.len());
        let mut marginals = Vec::with_capacity(alice.len());
        for (xi, x) in alice.iter().enumerate() {
            let mut reference: Option<Vec<f64>> = None;
            for (yi, y) in bob.iter().enumerate() {
                let t = joint(x, y)?;
                if t.len() != cells {
                    return Err(Error::InvalidScenario(format!(
                        "pair ({xi}, {yi}) has {} cells, expected {cells}",
                        t.len()
                    )));
                }
                let total: f64 = t.iter().sum();
                if t.iter().any(|&p| p.is_nan() || p < 0.0) || (total - 1.0).abs() > MARGINAL_TOLERANCE {
                    return Err(Error::InvalidScenario(format!(
                        "pair ({xi}, {yi}) is not a probability table"
                    )));
                }
                let marginal: Vec<f64> = t
                    .chunks(bob_outcomes)
                    .map(|row| row.iter().sum())
                    .collect();
                match &reference {
                    None => reference = Some(marginal),
                    Some(r) => {
                        let drift = r
                            .iter()
                            .zip(&marginal)
                            .map(|(p, q)| (p - q).abs())
                            .fold(0.0, f64::max);
                        if drift > MARGINAL_TOLERANCE {
                            return Err(Error::InvalidScenario(format!(
                                "alice's marginal for measurement {xi} changes with bob's \
                                 measurement {yi} (by {drift:e})"
                            )));
                        }
                    }
                }
                tables.push(t);
            }
            marginals.push(reference.expect("bob set is non-empty"));
        }
        Ok(FiniteScenario {
            alice,
            bob,
            alice_outcomes,
            bob_outcomes,
            tables,
            marginals,
        })
    }

    pub fn alice_measurements(&self) -> &[A] {
        &self.alice
    }

    pub fn bob_measurements(&self) -> &[B] {
        &self.bob
    }

    pub fn alice_outcomes(&self) -> usize {
        self.alice_outcomes
    }

    pub fn bob_outcomes(&self) -> usize {
        self.bob_outcomes
    }

    /// The exact joint table for measurement indices `(x, y)`.
    pub fn joint(&self, x: usize, y: usize) -> &[f64] {
        &self.tables[x * self.bob.len() + y]
    }

    pub fn alice_marginal(&self, x: usize) -> &[f64] {
        &self.marginals[x]
    }

    /// Bits Alice needs to name one of her measurements.
    pub fn message_bits(&self) -> usize {
        index_width(self.alice.len())
    }

    fn conditional_row(&self, x: usize, y: usize, a: usize) -> &[f64] {
        let t = self.joint(x, y);
        &t[a * self.bob_outcomes..(a + 1) * self.bob_outcomes]
    }

    fn sample_bob(&self, x: usize, y: usize, a: usize, rng: &mut Stream) -> usize {
        rng.categorical(self.conditional_row(x, y, a))
    }
}

impl<A: PartialEq, B: PartialEq> FiniteScenario<A, B> {
    pub fn alice_index(&self, x: &A) -> Option<usize> {
        self.alice.iter().position(|m| m == x)
    }

    pub fn bob_index(&self, y: &B) -> Option<usize> {
        self.bob.iter().position(|m| m == y)
    }
}

/// `ceil(log2 count)`, zero for a single measurement.
pub fn index_width(count: usize) -> usize {
    if count <= 1 {
        0
    } else {
        (usize::BITS - (count - 1).leading_zeros()) as usize
    }
}

pub type BellScenario = FiniteScenario<RealMeasurement, RealMeasurement>;
pub type DjScenario = FiniteScenario<DjMeasurement, DjMeasurement>;

/// A scenario of real measurements on one Bell pair.
pub fn bell_scenario(alice: &[f64], bob: &[f64]) -> Result<BellScenario> {
    let to_m = |v: &f64| Angle::new(*v).map(|x| RealMeasurement { x });
    let alice = alice.iter().map(to_m).collect::<Result<Vec<_>>>()?;
    let bob = bob.iter().map(to_m).collect::<Result<Vec<_>>>()?;
    FiniteScenario::new(alice, bob, 2, 2, |x, y| Ok(bell_joint_real(*x, *y).cells().to_vec()))
}

/// `M_A = M_B = {0, pi/2}`.
pub fn correlated_example() -> BellScenario {
    bell_scenario(&[0.0, PI / 2.0], &[0.0, PI / 2.0]).expect("valid scenario")
}

/// `M_A = {-pi/8, 3pi/8}`, `M_B = -M_A`: the CHSH settings.
pub fn chsh_example() -> BellScenario {
    bell_scenario(&[-PI / 8.0, 3.0 * PI / 8.0], &[PI / 8.0, -3.0 * PI / 8.0])
        .expect("valid scenario")
}

/// Every Deutsch-Jozsa measurement on `n` qubits for both parties, ordered
/// by code so measurement index `i` has parameter bits `i`.
pub fn dj_scenario(n: u32) -> Result<DjScenario> {
    if n == 0 || n > DJ_SCENARIO_MAX_N {
        return Err(Error::ResourceLimit(format!(
            "deutsch-jozsa scenario supports 1 <= n <= {DJ_SCENARIO_MAX_N}, got {n}"
        )));
    }
    let count = 1u64 << (1u64 << n);
    let ms = (0..count)
        .map(|code| DjMeasurement::from_code(n, code))
        .collect::<Result<Vec<_>>>()?;
    let dim = 1usize << n;
    FiniteScenario::new(ms.clone(), ms, dim, dim, |x, y| Ok(dj_joint(x, y)?.probs))
}

/// How Bob's table entries are produced.
#[derive(Debug, Clone, PartialEq)]
pub enum BobTable {
    /// Every `b(x, y)`, indexed `x * |M_B| + y`.
    Full(Vec<usize>),
    /// `b(x, y)` is drawn on demand from the stream `(key, [x, y])`,
    /// conditioned on the shared `a(x)`. Each entry is a fixed function of
    /// the shared key, so this is the same hidden variable as a full table,
    /// only evaluated where it is read.
    Lazy { key: u64 },
}

/// The pre-sampled outcome tables.
#[derive(Debug, Clone, PartialEq)]
pub struct TableHidden {
    pub alice: Vec<usize>,
    pub bob: BobTable,
}

impl TableHidden {
    pub fn alice_outcome(&self, x: usize) -> usize {
        self.alice[x]
    }

    pub fn bob_outcome<A, B>(&self, s: &FiniteScenario<A, B>, x: usize, y: usize) -> usize {
        match &self.bob {
            BobTable::Full(b) => b[x * s.bob.len() + y],
            BobTable::Lazy { key } => {
                let mut rng = derive_stream(*key, &[x as u64, y as u64]);
                s.sample_bob(x, y, self.alice[x], &mut rng)
            }
        }
    }
}

fn sample_alice<A, B>(s: &FiniteScenario<A, B>, rng: &mut Stream) -> Vec<usize> {
    (0..s.alice.len())
        .map(|x| rng.categorical(s.alice_marginal(x)))
        .collect()
}

/// Samples `a(x)` for every `x` and `b(x, y)` for every pair.
pub fn table_prepare<A, B>(s: &FiniteScenario<A, B>, rng: &mut Stream) -> TableHidden {
    let alice = sample_alice(s, rng);
    let mut bob = Vec::with_capacity(s.alice.len() * s.bob.len());
    for (x, &a) in alice.iter().enumerate() {
        for y in 0..s.bob.len() {
            bob.push(s.sample_bob(x, y, a, rng));
        }
    }
    TableHidden {
        alice,
        bob: BobTable::Full(bob),
    }
}

/// Samples `a(x)` for every `x` and a key from which any `b(x, y)` can be
/// drawn later.
pub fn table_prepare_lazy<A, B>(s: &FiniteScenario<A, B>, rng: &mut Stream) -> TableHidden {
    let alice = sample_alice(s, rng);
    let key = rng.next_u64();
    TableHidden {
        alice,
        bob: BobTable::Lazy { key },
    }
}

/// The table protocol over a scenario. Inputs are measurement indices.
#[derive(Debug, Clone, Copy)]
pub struct TableProtocol<'s, A, B> {
    scenario: &'s FiniteScenario<A, B>,
    lazy: bool,
}

impl<'s, A, B> TableProtocol<'s, A, B> {
    /// Prepares full tables on every run.
    pub fn new(scenario: &'s FiniteScenario<A, B>) -> Self {
        TableProtocol {
            scenario,
            lazy: false,
        }
    }

    /// Prepares Alice's column in full and Bob's entries on demand.
    pub fn lazy(scenario: &'s FiniteScenario<A, B>) -> Self {
        TableProtocol {
            scenario,
            lazy: true,
        }
    }

    pub fn scenario(&self) -> &'s FiniteScenario<A, B> {
        self.scenario
    }
}

pub struct TableAlice {
    bits: Vec<bool>,
    a: usize,
}

pub struct TableBob<'s, A, B> {
    scenario: &'s FiniteScenario<A, B>,
    y: usize,
    hidden: TableHidden,
}

impl Party for TableAlice {
    type Output = usize;

    fn send(&mut self, t: &Transcript) -> bool {
        self.bits[t.len()]
    }

    fn output(&mut self, _: &Transcript) -> usize {
        self.a
    }
}

impl<A, B> Party for TableBob<'_, A, B> {
    type Output = usize;

    fn send(&mut self, _: &Transcript) -> bool {
        unreachable!("bob never speaks in the table protocol")
    }

    fn output(&mut self, t: &Transcript) -> usize {
        let width = self.scenario.message_bits();
        let x = from_bits_be(t.bits_from(Direction::AliceToBob).take(width)) as usize;
        self.hidden.bob_outcome(self.scenario, x, self.y)
    }
}

impl<'s, A, B> Protocol for TableProtocol<'s, A, B> {
    type AliceInput = usize;
    type BobInput = usize;
    type AliceHidden = Vec<usize>;
    type BobHidden = TableHidden;
    type Alice = TableAlice;
    type Bob = TableBob<'s, A, B>;

    fn budget(&self) -> usize {
        self.scenario.message_bits()
    }

    fn prepare(&self, shared: &mut Stream) -> (Vec<usize>, TableHidden) {
        let h = if self.lazy {
            table_prepare_lazy(self.scenario, shared)
        } else {
            table_prepare(self.scenario, shared)
        };
        (h.alice.clone(), h)
    }

    fn alice(&self, x: &usize, u: Vec<usize>, _: Stream) -> TableAlice {
        TableAlice {
            bits: to_bits_be(*x as u64, self.scenario.message_bits()),
            a: u[*x],
        }
    }

    fn bob(&self, y: &usize, v: TableHidden, _: Stream) -> TableBob<'s, A, B> {
        TableBob {
            scenario: self.scenario,
            y: *y,
            hidden: v,
        }
    }

    fn direction(&self, round: usize, _: &Transcript) -> Option<Direction> {
        (round < self.scenario.message_bits()).then_some(Direction::AliceToBob)
    }
}

/// Runs the table protocol on measurement values, checking membership.
pub fn table_run<'s, A: PartialEq + Clone, B: PartialEq + Clone>(
    protocol: &TableProtocol<'s, A, B>,
    x: &A,
    y: &B,
    seed: u64,
) -> Result<crate::engine::ProtocolRun<TableProtocol<'s, A, B>>> {
    let s = protocol.scenario;
    let xi = s
        .alice_index(x)
        .ok_or_else(|| Error::UnknownMeasurement("alice's measurement is not in M_A".into()))?;
    let yi = s
        .bob_index(y)
        .ok_or_else(|| Error::UnknownMeasurement("bob's measurement is not in M_B".into()))?;
    crate::engine::run(protocol, xi, yi, seed)
}
