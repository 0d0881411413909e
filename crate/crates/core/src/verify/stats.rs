//! Monte-Carlo estimation and Pearson goodness-of-fit.

use serde::{Deserialize, Serialize};

use crate::engine::{run, AliceOutput, BobOutput, Protocol};
use crate::error::{Error, Result};
use crate::rng::derive_stream;

/// Outcome counts of repeated runs at one measurement pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmpiricalJoint {
    pub rows: usize,
    pub cols: usize,
    /// Row-major, `counts[a * cols + b]`.
    pub counts: Vec<u64>,
    pub total: u64,
    pub seed: u64,
    /// Shortest and longest transcript seen, in bits.
    pub min_bits: usize,
    pub max_bits: usize,
}

impl EmpiricalJoint {
    pub fn new(rows: usize, cols: usize, seed: u64) -> Self {
        EmpiricalJoint {
            rows,
            cols,
            counts: vec![0; rows * cols],
            total: 0,
            seed,
            min_bits: usize::MAX,
            max_bits: 0,
        }
    }

    pub fn note_bits(&mut self, bits: usize) {
        self.min_bits = self.min_bits.min(bits);
        self.max_bits = self.max_bits.max(bits);
    }

    pub fn record(&mut self, a: usize, b: usize) {
        self.counts[a * self.cols + b] += 1;
        self.total += 1;
    }

    pub fn count(&self, a: usize, b: usize) -> u64 {
        self.counts[a * self.cols + b]
    }

    /// Fraction of runs with `a == b` (square tables).
    pub fn equal_fraction(&self) -> f64 {
        let eq: u64 = (0..self.rows.min(self.cols)).map(|i| self.count(i, i)).sum();
        eq as f64 / self.total as f64
    }
}

/// Seed of run `index` at a sweep point; every run gets its own seed so runs
/// are independent and replayable one at a time.
pub fn run_seed(seed: u64, labels: &[u64], index: u64) -> u64 {
    derive_stream(seed, labels).child(&[index]).next_u64()
}

/// Runs `protocol` `runs` times at `(x, y)` and tallies outcome cells.
/// `cell` maps the two outputs to a `(row, column)` of a `rows x cols`
/// table.
#[allow(clippy::too_many_arguments)]
pub fn empirical_joint<P, F>(
    protocol: &P,
    x: &P::AliceInput,
    y: &P::BobInput,
    shape: (usize, usize),
    runs: u64,
    seed: u64,
    labels: &[u64],
    cell: F,
) -> Result<EmpiricalJoint>
where
    P: Protocol,
    P::AliceInput: Clone,
    P::BobInput: Clone,
    F: Fn(&AliceOutput<P>, &BobOutput<P>) -> (usize, usize),
{
    if runs == 0 {
        return Err(Error::InvalidArgument("need at least one run".into()));
    }
    let point = derive_stream(seed, labels);
    let mut e = EmpiricalJoint::new(shape.0, shape.1, seed);
    for i in 0..runs {
        let r = run(protocol, x.clone(), y.clone(), point.child(&[i]).next_u64())?;
        let (a, b) = cell(&r.a, &r.b);
        e.record(a, b);
        e.note_bits(r.transcript.len());
    }
    Ok(e)
}

/// Result of a Pearson chi-square test against an exact distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GofReport {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    /// Runs that landed on a cell of probability zero.
    pub impossible: u64,
    pub pass: bool,
}

/// Pearson chi-square over cells with positive expected probability. Any
/// count in a zero-probability cell fails the test outright.
pub fn chi_square_gof(e: &EmpiricalJoint, expected: &[f64], significance: f64) -> Result<GofReport> {
    if expected.len() != e.counts.len() {
        return Err(Error::Dimension(format!(
            "{} expected cells for {} observed",
            expected.len(),
            e.counts.len()
        )));
    }
    let n = e.total as f64;
    let mut statistic = 0.0;
    let mut positive = 0usize;
    let mut impossible = 0u64;
    for (&obs, &p) in e.counts.iter().zip(expected) {
        if p > 0.0 {
            positive += 1;
            let exp = n * p;
            let d = obs as f64 - exp;
            statistic += d * d / exp;
        } else {
            impossible += obs;
        }
    }
    let dof = positive.saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        chi_square_sf(statistic, dof as f64)
    };
    Ok(GofReport {
        statistic,
        degrees_of_freedom: dof,
        p_value,
        impossible,
        pass: impossible == 0 && p_value >= significance,
    })
}

/// Upper tail `Pr[X >= statistic]` for `X ~ chi^2(dof)`.
pub fn chi_square_sf(statistic: f64, dof: f64) -> f64 {
    if statistic <= 0.0 {
        return 1.0;
    }
    gamma_q(dof / 2.0, statistic / 2.0)
}

/// `ln Gamma(x)` for `x > 0`, Lanczos approximation (g = 7, 9 terms),
/// relative error below 1e-15.
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + G + 0.5;
    for (i, c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

const GAMMA_EPS: f64 = 1e-15;
const GAMMA_MAX_ITER: usize = 10_000;

/// Regularized upper incomplete gamma `Q(a, x) = Gamma(a, x) / Gamma(a)`.
/// Uses the power series of `P` for `x < a + 1` and a Lentz continued
/// fraction for `Q` otherwise; both converge to about 1e-14 absolute.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    assert!(a > 0.0, "shape must be positive");
    if x <= 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_fraction(a, x)
    }
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        gamma_p_series(a, x)
    } else {
        1.0 - gamma_q_fraction(a, x)
    }
}

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..GAMMA_MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * GAMMA_EPS {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

fn gamma_q_fraction(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..GAMMA_MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < GAMMA_EPS {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// False-alarm policy for sweeps of many goodness-of-fit tests.
///
/// A sweep fails if any test saw an impossible outcome, or if more than
/// `max_floor_fraction` of the tests fall below `floor`. Tests between
/// `floor` and `significance` are counted and reported but are expected at
/// rate `significance` under exact simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPolicy {
    pub significance: f64,
    pub floor: f64,
    pub max_floor_fraction: f64,
}

impl Default for SweepPolicy {
    fn default() -> Self {
        SweepPolicy {
            significance: 1e-3,
            floor: 1e-6,
            max_floor_fraction: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepVerdict {
    pub tests: usize,
    pub below_significance: usize,
    pub below_floor: usize,
    pub allowed_below_floor: usize,
    pub impossible: u64,
    pub pass: bool,
}

impl SweepPolicy {
    pub fn evaluate(&self, reports: &[GofReport]) -> SweepVerdict {
        let tests = reports.len();
        let below_significance = reports
            .iter()
            .filter(|r| r.p_value < self.significance)
            .count();
        let below_floor = reports.iter().filter(|r| r.p_value < self.floor).count();
        let impossible = reports.iter().map(|r| r.impossible).sum();
        let allowed_below_floor = (self.max_floor_fraction * tests as f64).floor() as usize;
        SweepVerdict {
            tests,
            below_significance,
            below_floor,
            allowed_below_floor,
            impossible,
            pass: impossible == 0 && below_floor <= allowed_below_floor,
        }
    }
}
