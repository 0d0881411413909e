//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.
//!
//! Run with `cargo test -p entsim --test acceptance`.

use std::f64::consts::{PI, TAU};
use std::process::{Command, ExitCode};
use std::time::Instant;

use entsim::cli::{
    dj_check, eq_reduce, verify_composed, verify_slot, verify_table, Mode, ScenarioKind,
};
use entsim::engine::{run, Direction};
use entsim::protocols::SlotProtocol;
use entsim::slots::Angle;

const SEED: u64 = 20_261_016;
const SIGNIFICANCE: f64 = 1e-3;
const ANALYTIC_TOLERANCE: f64 = 1e-9;
const SIGMA_BOUND: f64 = 4.0;
const DJ_TOLERANCE: f64 = 1e-10;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn expect(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn analytic_grid() -> Check {
    let r = verify_slot(64, 1, SEED, Mode::Analytic, SIGNIFICANCE).map_err(|e| e.to_string())?;
    let max = r.rows.iter().filter_map(|row| row.abs_error).fold(0.0, f64::max);
    let all_below = r
        .rows
        .iter()
        .all(|row| row.abs_error.is_some_and(|e| e < ANALYTIC_TOLERANCE));
    expect(
        r.rows.len() == 4096 && all_below && r.summary.pass,
        format!("4096 points, max |error| = {max:.3e} (bound 1e-9)"),
    )
}

fn slot_statistics() -> Check {
    let r = verify_slot(8, 1_000_000, SEED, Mode::Montecarlo, SIGNIFICANCE)
        .map_err(|e| e.to_string())?;
    let diagonal_impossible: u64 = r
        .rows
        .iter()
        .filter(|row| row.i == row.j)
        .map(|row| row.impossible.unwrap_or(u64::MAX))
        .sum();
    let below = r
        .rows
        .iter()
        .filter(|row| row.p_value.is_some_and(|p| p < SIGNIFICANCE))
        .count();
    let min_p = r.rows.iter().filter_map(|row| row.p_value).fold(1.0, f64::min);
    expect(
        r.rows.len() == 64 && r.summary.pass && diagonal_impossible == 0,
        format!(
            "64 points x 1e6 runs, {below} below 1e-3, min p = {min_p:.3e}, \
             impossible on x = y: {diagonal_impossible}"
        ),
    )
}

fn slot_bits() -> Check {
    // Every run of a sweep records its transcript length; the direct runs
    // also look at the direction of each bit.
    let r = verify_slot(8, 10_000, SEED, Mode::Montecarlo, SIGNIFICANCE)
        .map_err(|e| e.to_string())?;
    let sweep_ok = r.rows.iter().all(|row| row.bits == Some(4));
    let mut bad = 0;
    for k in 0..100_000u64 {
        let x = Angle::new(TAU * (k % 97) as f64 / 97.0).unwrap();
        let y = Angle::new(TAU * (k % 89) as f64 / 89.0).unwrap();
        let t = run(&SlotProtocol, x, y, k).map_err(|e| e.to_string())?.transcript;
        if t.len() != 4 || t.entries().iter().any(|e| e.0 != Direction::AliceToBob) {
            bad += 1;
        }
    }
    expect(
        sweep_ok && bad == 0,
        format!("sweep bits all 4: {sweep_ok}; 1e5 direct runs, {bad} off-budget or Bob->Alice"),
    )
}

fn composed_statistics() -> Check {
    let r = verify_composed(8, 1_000_000, SEED).map_err(|e| e.to_string())?;
    let z = |o: f64, e: f64, se: f64| if se > 0.0 { (o - e).abs() / se } else { 0.0 };
    let worst = r
        .rows
        .iter()
        .map(|row| {
            z(row.observed, row.expected, row.std_error)
                .max(z(row.first_observed, row.first_expected, row.first_std_error))
        })
        .fold(0.0, f64::max);
    let bits = r.rows.iter().all(|row| row.bits == 8);
    expect(
        r.rows.len() == 64 && r.summary.pass && bits && worst <= SIGMA_BOUND,
        format!("64 points x 1e6 runs, worst deviation {worst:.2} SE (bound 4), bits all 8: {bits}"),
    )
}

fn table_statistics() -> Check {
    let mut lines = Vec::new();
    let mut ok = true;
    let cases = [
        ("example 1", ScenarioKind::Correlated, 1, 1),
        ("example 2", ScenarioKind::Bell, 1, 1),
        ("dj n=1", ScenarioKind::Dj, 1, 2),
        ("dj n=2", ScenarioKind::Dj, 2, 4),
    ];
    for (name, kind, n, bits) in cases {
        let r = verify_table(kind, n, 100_000, SEED, SIGNIFICANCE).map_err(|e| e.to_string())?;
        let bits_ok = r.rows.iter().all(|row| row.bits == bits);
        ok &= r.summary.pass && bits_ok;
        lines.push(format!(
            "{name}: {} pairs pass={} bits={bits}",
            r.rows.len(),
            r.summary.pass && bits_ok
        ));
        if kind == ScenarioKind::Bell {
            let target = (PI / 8.0).sin().powi(2);
            let row = r
                .rows
                .iter()
                .find(|row| row.x_index == 1 && row.y_index == 1)
                .expect("pair (3pi/8, -3pi/8)");
            let hit = (row.observed_equal - target).abs() <= SIGMA_BOUND * row.std_error
                && (row.expected_equal - target).abs() < 1e-12;
            ok &= hit;
            lines.push(format!(
                "sin^2(pi/8) = {target:.4}, observed {:.4} +- {:.4}",
                row.observed_equal, row.std_error
            ));
        }
    }
    expect(ok, lines.join("; "))
}

fn dj_properties() -> Check {
    let mut ok = true;
    let mut lines = Vec::new();
    for n in 1..=3 {
        let r = dj_check(n, 1000, SEED).map_err(|e| e.to_string())?;
        let max = r.rows.iter().map(|row| row.abs_error).fold(0.0, f64::max);
        let expected_rows = match n {
            1 => 16,
            2 => 256,
            _ => 1000,
        };
        ok &= r.summary.pass && r.rows.len() == expected_rows && max <= DJ_TOLERANCE;
        lines.push(format!("n={n}: {} pairs, max |error| {max:.1e}", r.rows.len()));
    }
    expect(ok, lines.join("; "))
}

fn restricted_equality() -> Check {
    let r = eq_reduce(2, 100, 0, SEED).map_err(|e| e.to_string())?;
    let runs: u64 = r.rows.iter().map(|row| row.runs).sum();
    let correct: u64 = r.rows.iter().map(|row| row.correct).sum();
    let bits = r.rows.iter().all(|row| row.bits == 6);
    expect(
        r.rows.len() == 112 && runs == 11_200 && correct == runs && bits && r.summary.pass,
        format!("{} pairs, {correct}/{runs} correct, bits all 6: {bits}", r.rows.len()),
    )
}

fn cli_determinism() -> Check {
    let exe = env!("CARGO_BIN_EXE_entsim");
    let invocations: &[&[&str]] = &[
        &["verify-slot", "--grid", "4", "--mode", "both", "--samples", "2000"],
        &["verify-composed", "--grid", "3", "--samples", "2000", "--format", "csv"],
        &["verify-table", "--scenario", "dj", "--n", "1", "--samples", "2000"],
        &["dj-check", "--n", "3", "--samples", "50"],
        &["eq-reduce", "--n", "3", "--seeds", "3", "--samples", "40", "--format", "csv"],
    ];
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for (k, args) in invocations.iter().enumerate() {
        let invoke = |extra: &[&str]| {
            Command::new(exe)
                .args(*args)
                .args(["--seed", "7"])
                .args(extra)
                .output()
                .map_err(|e| e.to_string())
        };
        let first = invoke(&[])?;
        let second = invoke(&[])?;
        let path = dir.path().join(format!("report-{k}"));
        let to_file = invoke(&["--out", path.to_str().unwrap()])?;
        let file = std::fs::read(&path).map_err(|e| e.to_string())?;
        if !first.status.success() || first.stdout.is_empty() {
            return Err(format!("{} exited with {}", args[0], first.status));
        }
        if first.stdout != second.stdout || !to_file.stdout.is_empty() || file != first.stdout {
            return Err(format!("{} reports differ between runs", args[0]));
        }
    }
    expect(
        true,
        format!("{} invocations byte-identical on stdout and --out", invocations.len()),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 slot protocol, analytic 64x64", analytic_grid),
        ("2 slot protocol, chi-square 8x8 x 1e6", slot_statistics),
        ("3 slot protocol, 4 bits Alice->Bob", slot_bits),
        ("4 composed protocol, 8x8 x 1e6", composed_statistics),
        ("5 table protocol, examples and dj", table_statistics),
        ("6 deutsch-jozsa properties", dj_properties),
        ("7 restricted equality at n=2", restricted_equality),
        ("8 cli determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let (tag, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} [{name}] {detail} ({:.1}s)", start.elapsed().as_secs_f64());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
