use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use super::report::{Report, Summary};
use super::{Mode, ScenarioKind};
use crate::dj::{enumerate_promise_pairs, restricted_eq, sample_promise_pairs, PromiseKind};
use crate::error::{Error, Result};
use crate::protocols::table::{BellScenario, FiniteScenario};
use crate::protocols::{
    chsh_example, correlated_example, dj_scenario, ComposedProtocol, SlotProtocol, TableProtocol,
};
use crate::quantum::{
    bell_joint_real, dj_joint, dj_pr_equal, general_pr_equal, DjMeasurement, GeneralMeasurement,
    RealMeasurement, DJ_JOINT_MAX_N,
};
use crate::slots::Angle;
use crate::verify::{
    chi_square_gof, empirical_joint, integrate_slot, run_seed, EmpiricalJoint, GofReport,
    SweepPolicy,
};

/// Largest grid side accepted by the sweep commands.
pub const MAX_GRID: usize = 4096;
/// Tolerance of the analytic check.
pub const ANALYTIC_TOLERANCE: f64 = 1e-9;
/// Standard errors allowed between a Monte-Carlo rate and its target.
pub const SIGMA_BOUND: f64 = 4.0;
/// Absolute slack added to the sigma bound for targets within rounding of 0 or 1.
pub const RATE_FLOOR: f64 = 1e-12;
/// Tolerance for Deutsch-Jozsa closed form vs brute force.
pub const DJ_TOLERANCE: f64 = 1e-10;

fn params(pairs: &[(&str, Value)]) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    for (k, v) in pairs {
        m.insert((*k).into(), v.clone());
    }
    m
}

fn check_grid(grid: usize) -> Result<()> {
    if grid == 0 || grid > MAX_GRID {
        return Err(Error::InvalidArgument(format!(
            "grid must be in 1..={MAX_GRID}, got {grid}"
        )));
    }
    Ok(())
}

fn check_runs(samples: u64) -> Result<()> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be positive".into()));
    }
    Ok(())
}

fn angle(v: f64) -> Angle {
    Angle::new(v).expect("grid values are finite")
}

fn grid_value(i: usize, grid: usize) -> f64 {
    TAU * i as f64 / grid as f64
}

fn std_error(p: f64, runs: u64) -> f64 {
    (p * (1.0 - p) / runs as f64).max(0.0).sqrt()
}

fn within_sigma(observed: f64, expected: f64, runs: u64) -> bool {
    (observed - expected).abs() <= SIGMA_BOUND * std_error(expected, runs) + RATE_FLOOR
}

fn bitstring(m: &DjMeasurement) -> String {
    m.bits().iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn dj_code(m: &DjMeasurement) -> usize {
    m.bits()
        .iter()
        .enumerate()
        .map(|(i, &b)| usize::from(b) << i)
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlotRow {
    pub i: usize,
    pub j: usize,
    pub x: f64,
    pub y: f64,
    pub expected: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub actual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runs: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n00: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n01: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n10: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n11: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub statistic: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dof: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub impossible: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bits: Option<usize>,
    pub pass: bool,
}

impl SlotRow {
    fn gof(&self) -> GofReport {
        GofReport {
            statistic: self.statistic.unwrap_or(0.0),
            degrees_of_freedom: self.dof.unwrap_or(0),
            p_value: self.p_value.unwrap_or(1.0),
            impossible: self.impossible.unwrap_or(0),
            pass: self.pass,
        }
    }
}

/// Sweeps the four-bit protocol over a `grid x grid` lattice.
pub fn verify_slot(
    grid: usize,
    samples: u64,
    seed: u64,
    mode: Mode,
    significance: f64,
) -> Result<Report<SlotRow>> {
    check_grid(grid)?;
    check_runs(samples)?;
    let analytic = matches!(mode, Mode::Analytic | Mode::Both);
    let montecarlo = matches!(mode, Mode::Montecarlo | Mode::Both);
    eprintln!("verify-slot: {} points, mode {mode:?}", grid * grid);

    let rows = (0..grid * grid)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / grid, k % grid);
            let (x, y) = (angle(grid_value(i, grid)), angle(grid_value(j, grid)));
            let table = bell_joint_real(RealMeasurement { x }, RealMeasurement { x: y });
            let expected = table.pr_equal();
            let mut row = SlotRow {
                i,
                j,
                x: x.value(),
                y: y.value(),
                expected,
                actual: None,
                abs_error: None,
                runs: None,
                n00: None,
                n01: None,
                n10: None,
                n11: None,
                statistic: None,
                dof: None,
                p_value: None,
                impossible: None,
                bits: None,
                pass: true,
            };
            if analytic {
                let actual = integrate_slot(x, y);
                let err = (actual - expected).abs();
                row.actual = Some(actual);
                row.abs_error = Some(err);
                row.pass &= err < ANALYTIC_TOLERANCE;
            }
            if montecarlo {
                let e = empirical_joint(
                    &SlotProtocol,
                    &x,
                    &y,
                    (2, 2),
                    samples,
                    seed,
                    &[i as u64, j as u64],
                    |a, b| (usize::from(*a), usize::from(*b)),
                )?;
                let gof = chi_square_gof(&e, &table.cells(), significance)?;
                row.runs = Some(e.total);
                row.n00 = Some(e.count(0, 0));
                row.n01 = Some(e.count(0, 1));
                row.n10 = Some(e.count(1, 0));
                row.n11 = Some(e.count(1, 1));
                row.statistic = Some(gof.statistic);
                row.dof = Some(gof.degrees_of_freedom);
                row.p_value = Some(gof.p_value);
                row.impossible = Some(gof.impossible);
                row.bits = Some(bits_if_constant(&e));
                row.pass &= gof.pass && bits_ok(&e, 4);
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut details = Map::new();
    let mut failures = 0;
    let mut pass = true;
    if analytic {
        let bad = rows
            .iter()
            .filter(|r| r.abs_error.unwrap_or(0.0) >= ANALYTIC_TOLERANCE)
            .count();
        let max_err = rows
            .iter()
            .filter_map(|r| r.abs_error)
            .fold(0.0, f64::max);
        details.insert("analytic_failures".into(), json!(bad));
        details.insert("max_abs_error".into(), json!(max_err));
        failures += bad;
        pass &= bad == 0;
    }
    if montecarlo {
        let reports: Vec<_> = rows.iter().map(SlotRow::gof).collect();
        let bit_violations = rows.iter().filter(|r| r.bits != Some(4)).count();
        let (mc_fail, mc_pass) = mc_summary(&reports, bit_violations, significance, &mut details);
        failures += mc_fail;
        pass &= mc_pass;
    }
    Ok(Report {
        command: "verify-slot".into(),
        params: params(&[
            ("grid", json!(grid)),
            ("samples", json!(samples)),
            ("mode", json!(format!("{mode:?}").to_lowercase())),
            ("significance", json!(significance)),
        ]),
        seed,
        rows,
        summary: Summary {
            pass,
            failures,
            details,
        },
    })
}

fn bits_ok(e: &EmpiricalJoint, bits: usize) -> bool {
    e.min_bits == bits && e.max_bits == bits
}

fn bits_if_constant(e: &EmpiricalJoint) -> usize {
    if e.min_bits == e.max_bits {
        e.min_bits
    } else {
        usize::MAX
    }
}

/// Applies the sweep policy to per-point reports and folds in message-length
/// violations. Returns the failure count and the overall verdict.
fn mc_summary(
    reports: &[GofReport],
    bit_violations: usize,
    significance: f64,
    details: &mut Map<String, Value>,
) -> (usize, bool) {
    let policy = SweepPolicy {
        significance,
        ..SweepPolicy::default()
    };
    let verdict = policy.evaluate(reports);
    let impossible_points = reports.iter().filter(|r| r.impossible > 0).count();
    details.insert("policy".into(), json!(policy));
    details.insert("verdict".into(), json!(verdict));
    details.insert("bit_violations".into(), json!(bit_violations));
    let policy_failures = if verdict.pass {
        0
    } else {
        verdict.below_floor.max(impossible_points)
    };
    (
        policy_failures + bit_violations,
        verdict.pass && bit_violations == 0,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComposedRow {
    pub i: usize,
    pub j: usize,
    pub x: f64,
    pub x_phase: f64,
    pub y: f64,
    pub y_phase: f64,
    pub runs: u64,
    pub expected: f64,
    pub observed: f64,
    pub std_error: f64,
    pub first_expected: f64,
    pub first_observed: f64,
    pub first_std_error: f64,
    pub bits: usize,
    pub pass: bool,
}

/// The measurement pair at grid point `(i, j)` of the composed sweep:
/// `x = 2pi i/g`, `x' = 2pi j/g + pi/5`, `y = 2pi j/g + pi/7`,
/// `y' = 2pi i/g + pi/11`.
pub fn composed_grid_point(i: usize, j: usize, grid: usize) -> (GeneralMeasurement, GeneralMeasurement) {
    let (u, v) = (grid_value(i, grid), grid_value(j, grid));
    (
        GeneralMeasurement {
            x: angle(u),
            phase: angle(v + PI / 5.0),
        },
        GeneralMeasurement {
            x: angle(v + PI / 7.0),
            phase: angle(u + PI / 11.0),
        },
    )
}

/// Sweeps the eight-bit protocol over a `grid x grid` slice of the four
/// measurement parameters.
pub fn verify_composed(grid: usize, samples: u64, seed: u64) -> Result<Report<ComposedRow>> {
    check_grid(grid)?;
    check_runs(samples)?;
    eprintln!("verify-composed: {} points x {samples} runs", grid * grid);
    let rows = (0..grid * grid)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / grid, k % grid);
            let (a, b) = composed_grid_point(i, j, grid);
            // Cells index (final bit, first-stage bit) for each party.
            let e = empirical_joint(
                &ComposedProtocol,
                &a,
                &b,
                (4, 4),
                samples,
                seed,
                &[i as u64, j as u64],
                |p, q| {
                    (
                        2 * usize::from(p.bit) + usize::from(p.first),
                        2 * usize::from(q.bit) + usize::from(q.first),
                    )
                },
            )?;
            let mut equal = 0u64;
            let mut first_equal = 0u64;
            for ca in 0..4 {
                for cb in 0..4 {
                    let c = e.count(ca, cb);
                    if ca >> 1 == cb >> 1 {
                        equal += c;
                    }
                    if ca & 1 == cb & 1 {
                        first_equal += c;
                    }
                }
            }
            let observed = equal as f64 / e.total as f64;
            let first_observed = first_equal as f64 / e.total as f64;
            let expected = general_pr_equal(a, b);
            let first_expected = ((a.phase.value() + b.phase.value()) / 2.0).cos().powi(2);
            let pass = within_sigma(observed, expected, e.total)
                && within_sigma(first_observed, first_expected, e.total)
                && bits_ok(&e, 8);
            Ok(ComposedRow {
                i,
                j,
                x: a.x.value(),
                x_phase: a.phase.value(),
                y: b.x.value(),
                y_phase: b.phase.value(),
                runs: e.total,
                expected,
                observed,
                std_error: std_error(expected, e.total),
                first_expected,
                first_observed,
                first_std_error: std_error(first_expected, e.total),
                bits: bits_if_constant(&e),
                pass,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let failures = rows.iter().filter(|r| !r.pass).count();
    let mut details = Map::new();
    details.insert("sigma_bound".into(), json!(SIGMA_BOUND));
    Ok(Report {
        command: "verify-composed".into(),
        params: params(&[("grid", json!(grid)), ("samples", json!(samples))]),
        seed,
        rows,
        summary: Summary {
            pass: failures == 0,
            failures,
            details,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub x_index: usize,
    pub y_index: usize,
    pub x: String,
    pub y: String,
    pub runs: u64,
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub impossible: u64,
    pub expected_equal: f64,
    pub observed_equal: f64,
    pub std_error: f64,
    pub bits: usize,
    pub pass: bool,
}

impl TableRow {
    fn gof(&self) -> GofReport {
        GofReport {
            statistic: self.statistic,
            degrees_of_freedom: self.dof,
            p_value: self.p_value,
            impossible: self.impossible,
            pass: self.pass,
        }
    }
}

fn table_rows<A: Sync, B: Sync>(
    s: &FiniteScenario<A, B>,
    label_a: impl Fn(&A) -> String + Sync,
    label_b: impl Fn(&B) -> String + Sync,
    samples: u64,
    seed: u64,
    significance: f64,
) -> Result<Vec<TableRow>> {
    let protocol = TableProtocol::lazy(s);
    let nb = s.bob_measurements().len();
    let total = s.alice_measurements().len() * nb;
    (0..total)
        .into_par_iter()
        .map(|k| {
            let (xi, yi) = (k / nb, k % nb);
            let e = empirical_joint(
                &protocol,
                &xi,
                &yi,
                (s.alice_outcomes(), s.bob_outcomes()),
                samples,
                seed,
                &[xi as u64, yi as u64],
                |a, b| (*a, *b),
            )?;
            let expected = s.joint(xi, yi);
            let gof = chi_square_gof(&e, expected, significance)?;
            let expected_equal: f64 = (0..s.alice_outcomes().min(s.bob_outcomes()))
                .map(|c| expected[c * s.bob_outcomes() + c])
                .sum();
            Ok(TableRow {
                x_index: xi,
                y_index: yi,
                x: label_a(&s.alice_measurements()[xi]),
                y: label_b(&s.bob_measurements()[yi]),
                runs: e.total,
                statistic: gof.statistic,
                dof: gof.degrees_of_freedom,
                p_value: gof.p_value,
                impossible: gof.impossible,
                expected_equal,
                observed_equal: e.equal_fraction(),
                std_error: std_error(expected_equal, e.total),
                bits: bits_if_constant(&e),
                pass: gof.pass && bits_ok(&e, s.message_bits()),
            })
        })
        .collect()
}

/// Sweeps the table protocol over every measurement pair of a scenario.
pub fn verify_table(
    scenario: ScenarioKind,
    n: u32,
    samples: u64,
    seed: u64,
    significance: f64,
) -> Result<Report<TableRow>> {
    check_runs(samples)?;
    let real_label = |m: &RealMeasurement| m.x.value().to_string();
    let (name, rows, bits) = match scenario {
        ScenarioKind::Bell | ScenarioKind::Correlated => {
            let s: BellScenario = if scenario == ScenarioKind::Bell {
                chsh_example()
            } else {
                correlated_example()
            };
            eprintln!("verify-table: {} pairs x {samples} runs", 4);
            let rows = table_rows(&s, real_label, real_label, samples, seed, significance)?;
            (format!("{scenario:?}").to_lowercase(), rows, s.message_bits())
        }
        ScenarioKind::Dj => {
            if n == 0 || n > 2 {
                return Err(Error::ResourceLimit(format!(
                    "verify-table sweeps every pair; dj scenario supports 1 <= n <= 2, got {n}"
                )));
            }
            let s = dj_scenario(n)?;
            eprintln!(
                "verify-table: {} pairs x {samples} runs",
                s.alice_measurements().len().pow(2)
            );
            let rows = table_rows(&s, bitstring, bitstring, samples, seed, significance)?;
            ("dj".to_string(), rows, s.message_bits())
        }
    };
    let mut details = Map::new();
    details.insert("message_bits".into(), json!(bits));
    let reports: Vec<_> = rows.iter().map(TableRow::gof).collect();
    let bit_violations = rows.iter().filter(|r| r.bits != bits).count();
    let (failures, pass) = mc_summary(&reports, bit_violations, significance, &mut details);
    let mut p = vec![
        ("scenario", json!(name)),
        ("samples", json!(samples)),
        ("significance", json!(significance)),
        ("preparation", json!("lazy")),
    ];
    if scenario == ScenarioKind::Dj {
        p.push(("n", json!(n)));
    }
    Ok(Report {
        command: "verify-table".into(),
        params: params(&p),
        seed,
        rows,
        summary: Summary {
            pass,
            failures,
            details,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DjCheckRow {
    pub x: String,
    pub y: String,
    pub hamming: usize,
    pub kind: String,
    pub closed_form: f64,
    pub brute_force: f64,
    pub abs_error: f64,
    pub pass: bool,
}

fn kind_label(kind: Option<PromiseKind>) -> &'static str {
    match kind {
        Some(PromiseKind::Equal) => "equal",
        Some(PromiseKind::HalfDistance) => "half-distance",
        None => "other",
    }
}

fn dj_row(x: &DjMeasurement, y: &DjMeasurement) -> Result<DjCheckRow> {
    let hamming = x.hamming(y)?;
    let half = 1usize << (x.n() - 1);
    let kind = match hamming {
        0 => Some(PromiseKind::Equal),
        d if d == half => Some(PromiseKind::HalfDistance),
        _ => None,
    };
    let closed_form = dj_pr_equal(x, y)?;
    let brute_force = dj_joint(x, y)?.diagonal_mass();
    let abs_error = (closed_form - brute_force).abs();
    let property = match kind {
        Some(PromiseKind::Equal) => closed_form == 1.0 && (brute_force - 1.0).abs() <= DJ_TOLERANCE,
        Some(PromiseKind::HalfDistance) => closed_form == 0.0 && brute_force.abs() <= DJ_TOLERANCE,
        None => true,
    };
    Ok(DjCheckRow {
        x: bitstring(x),
        y: bitstring(y),
        hamming,
        kind: kind_label(kind).into(),
        closed_form,
        brute_force,
        abs_error,
        pass: property && abs_error <= DJ_TOLERANCE,
    })
}

/// Checks equal-outcome probabilities of Deutsch-Jozsa measurement pairs:
/// every pair for `n <= 2`, sampled promise pairs above.
pub fn dj_check(n: u32, samples: usize, seed: u64) -> Result<Report<DjCheckRow>> {
    if n == 0 || n > DJ_JOINT_MAX_N {
        return Err(Error::ResourceLimit(format!(
            "dj-check supports 1 <= n <= {DJ_JOINT_MAX_N}, got {n}"
        )));
    }
    let pairs: Vec<(DjMeasurement, DjMeasurement)> = if n <= 2 {
        let count = 1u64 << (1u32 << n);
        let mut v = Vec::new();
        for p in 0..count {
            for q in 0..count {
                v.push((DjMeasurement::from_code(n, p)?, DjMeasurement::from_code(n, q)?));
            }
        }
        v
    } else {
        sample_promise_pairs(n, samples, seed)?
            .into_iter()
            .map(|p| (p.x, p.y))
            .collect()
    };
    eprintln!("dj-check: {} pairs", pairs.len());
    let rows = pairs
        .par_iter()
        .map(|(x, y)| dj_row(x, y))
        .collect::<Result<Vec<_>>>()?;
    let failures = rows.iter().filter(|r| !r.pass).count();
    let max_err = rows.iter().map(|r| r.abs_error).fold(0.0, f64::max);
    let mut details = Map::new();
    details.insert("pairs".into(), json!(rows.len()));
    details.insert("exhaustive".into(), json!(n <= 2));
    details.insert("max_abs_error".into(), json!(max_err));
    Ok(Report {
        command: "dj-check".into(),
        params: params(&[("n", json!(n)), ("samples", json!(samples))]),
        seed,
        rows,
        summary: Summary {
            pass: failures == 0,
            failures,
            details,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EqRow {
    pub x: String,
    pub y: String,
    pub kind: String,
    pub runs: u64,
    pub correct: u64,
    pub bits: usize,
    pub pass: bool,
}

/// Runs restricted equality over promise pairs, wrapping the table
/// simulator of the Deutsch-Jozsa scenario.
pub fn eq_reduce(n: u32, seeds: u64, samples: usize, seed: u64) -> Result<Report<EqRow>> {
    if n == 0 || n > 3 {
        return Err(Error::ResourceLimit(format!("eq-reduce supports 1 <= n <= 3, got {n}")));
    }
    check_runs(seeds)?;
    let s = dj_scenario(n)?;
    let pairs = if n <= 2 {
        enumerate_promise_pairs(n)?
    } else {
        sample_promise_pairs(n, samples, seed)?
    };
    let expected_bits = (1usize << n) + n as usize;
    // Full tables are cheap up to n = 2; at n = 3 Bob's entries are drawn on
    // demand.
    let sim = if n <= 2 {
        TableProtocol::new(&s)
    } else {
        TableProtocol::lazy(&s)
    };
    eprintln!("eq-reduce: {} pairs x {seeds} seeds", pairs.len());
    let rows = pairs
        .par_iter()
        .enumerate()
        .map(|(k, p)| {
            let (xi, yi) = (dj_code(&p.x), dj_code(&p.y));
            let mut correct = 0;
            let mut bits_min = usize::MAX;
            let mut bits_max = 0;
            for r in 0..seeds {
                let res = restricted_eq(&sim, n, xi, yi, run_seed(seed, &[k as u64], r))?;
                correct += u64::from(res.answer == p.expected_answer());
                bits_min = bits_min.min(res.bits_used);
                bits_max = bits_max.max(res.bits_used);
            }
            let bits = if bits_min == bits_max { bits_min } else { usize::MAX };
            Ok(EqRow {
                x: bitstring(&p.x),
                y: bitstring(&p.y),
                kind: kind_label(Some(p.kind)).into(),
                runs: seeds,
                correct,
                bits,
                pass: correct == seeds && bits == expected_bits,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let failures = rows.iter().filter(|r| !r.pass).count();
    let runs: u64 = rows.iter().map(|r| r.runs).sum();
    let correct: u64 = rows.iter().map(|r| r.correct).sum();
    let mut details = Map::new();
    details.insert("pairs".into(), json!(rows.len()));
    details.insert("runs".into(), json!(runs));
    details.insert("correct_rate".into(), json!(correct as f64 / runs as f64));
    details.insert("bits_used".into(), json!(expected_bits));
    Ok(Report {
        command: "eq-reduce".into(),
        params: params(&[
            ("n", json!(n)),
            ("seeds", json!(seeds)),
            ("samples", json!(samples)),
            ("simulator", json!("table")),
        ]),
        seed,
        rows,
        summary: Summary {
            pass: failures == 0,
            failures,
            details,
        },
    })
}
