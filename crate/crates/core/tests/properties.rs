use std::f64::consts::{PI, TAU};

use entsim::dj::{restricted_eq, sample_promise_pairs};
use entsim::engine::run;
use entsim::protocols::{
    chsh_example, dj_scenario, ComposedProtocol, SlotProtocol, TableProtocol,
};
use entsim::quantum::GeneralMeasurement;
use entsim::rng::derive_stream;
use entsim::slots::{
    alpha_slot, beta_slot, decode_interval, encode_interval, gamma_slot, Angle, SlotTriple, Theta,
};
use entsim::verify::{
    chi_square_gof, chi_square_sf, empirical_joint, gamma_q, integrate_slot,
    integrate_slot_midpoint,
};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::gamma::gamma_ur;

fn a(v: f64) -> Angle {
    Angle::new(v).unwrap()
}

#[test]
fn encode_decode_round_trip_on_random_points() {
    let mut rng = derive_stream(11, &[]);
    for _ in 0..10_000 {
        let x = Angle::new(TAU * rng.uniform()).unwrap();
        let theta = Theta::from_unit(rng.uniform());
        let got = decode_interval(encode_interval(x, theta), theta).unwrap();
        let want = SlotTriple {
            alpha: alpha_slot(x),
            beta: beta_slot(x, theta),
            gamma: gamma_slot(x, theta),
        };
        assert_eq!(got, want, "x = {x:?}, theta = {theta:?}");
    }
}

#[test]
fn closed_form_integral_matches_midpoint_rule() {
    let mut rng = derive_stream(12, &[]);
    for _ in 0..20 {
        let x = a(TAU * rng.uniform());
        let y = a(TAU * rng.uniform());
        let exact = integrate_slot(x, y);
        let mid = integrate_slot_midpoint(x, y, 1_000_000);
        assert!((exact - mid).abs() < 1e-5, "{x:?} {y:?}: {exact} vs {mid}");
    }
}

#[test]
fn upper_gamma_agrees_with_statrs() {
    for &s in &[0.5, 1.0, 1.5, 2.0, 3.5, 7.5, 20.0] {
        for &x in &[1e-3, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0, 80.0] {
            let ours = gamma_q(s, x);
            let theirs = gamma_ur(s, x);
            assert!((ours - theirs).abs() < 1e-10, "Q({s}, {x}) = {ours} vs {theirs}");
        }
    }
}

#[test]
fn chi_square_tail_agrees_with_statrs() {
    for dof in [1.0, 2.0, 3.0, 15.0, 255.0] {
        let d = ChiSquared::new(dof).unwrap();
        for stat in [0.01, 0.5, 1.6, 3.841, 10.0, 40.0, 300.0] {
            let ours = chi_square_sf(stat, dof);
            assert!((ours - d.sf(stat)).abs() < 1e-10, "dof {dof} stat {stat}");
        }
    }
    assert!((chi_square_sf(3.841, 1.0) - 0.05).abs() < 1e-4);
}

#[test]
fn runs_replay_from_their_seed() {
    let x = a(1.1);
    let y = a(4.0);
    for seed in 0..200 {
        assert_eq!(run(&SlotProtocol, x, y, seed).unwrap(), run(&SlotProtocol, x, y, seed).unwrap());
    }
    let g = GeneralMeasurement { x: a(0.3), phase: a(2.0) };
    let h = GeneralMeasurement { x: a(5.0), phase: a(0.7) };
    for seed in 0..200 {
        assert_eq!(
            run(&ComposedProtocol, g, h, seed).unwrap(),
            run(&ComposedProtocol, g, h, seed).unwrap()
        );
    }
}

#[test]
fn alice_side_ignores_bob_setting() {
    let x = a(2.2);
    for seed in 0..500 {
        let r1 = run(&SlotProtocol, x, a(0.4), seed).unwrap();
        let r2 = run(&SlotProtocol, x, a(5.9), seed).unwrap();
        assert_eq!(r1.a, r2.a);
        assert_eq!(r1.transcript, r2.transcript);
    }
}

#[test]
fn eager_tables_pass_chi_square() {
    let s = chsh_example();
    let p = TableProtocol::new(&s);
    for xi in 0..2 {
        for yi in 0..2 {
            let e = empirical_joint(&p, &xi, &yi, (2, 2), 50_000, 5, &[xi as u64, yi as u64], |a, b| {
                (*a, *b)
            })
            .unwrap();
            let gof = chi_square_gof(&e, s.joint(xi, yi), 1e-4).unwrap();
            assert!(gof.pass, "({xi}, {yi}): {gof:?}");
            assert_eq!((e.min_bits, e.max_bits), (1, 1));
        }
    }
}

#[test]
fn restricted_equality_on_sampled_three_qubit_pairs() {
    let s = dj_scenario(3).unwrap();
    let sim = TableProtocol::lazy(&s);
    for (k, pair) in sample_promise_pairs(3, 60, 9).unwrap().into_iter().enumerate() {
        let code = |m: &entsim::quantum::DjMeasurement| {
            m.bits().iter().enumerate().map(|(i, &b)| usize::from(b) << i).sum::<usize>()
        };
        let r = restricted_eq(&sim, 3, code(&pair.x), code(&pair.y), k as u64).unwrap();
        assert_eq!(r.answer, pair.expected_answer());
        assert_eq!(r.bits_used, 8 + 3);
    }
}

#[test]
fn composed_protocol_spot_value() {
    let g = GeneralMeasurement { x: a(PI / 3.0), phase: a(PI / 5.0) };
    let h = GeneralMeasurement { x: a(PI / 7.0), phase: a(PI / 11.0) };
    let target = entsim::quantum::general_pr_equal(g, h);
    let runs = 1_000_000u64;
    let e = empirical_joint(&ComposedProtocol, &g, &h, (2, 2), runs, 3, &[], |p, q| {
        (usize::from(p.bit), usize::from(q.bit))
    })
    .unwrap();
    let se = (target * (1.0 - target) / runs as f64).sqrt();
    let got = e.equal_fraction();
    assert!((got - target).abs() < 3.0 * se, "{got} vs {target} (se {se})");
}
