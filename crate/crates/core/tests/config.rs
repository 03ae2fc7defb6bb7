use std::path::PathBuf;

use proptest::prelude::*;
use rotgn::config::{parse_config, ExperimentConfig, FamilyName, InitialProfile, RgnStart};
use rotgn::error::{ConfigIssue, Error};
use rotgn::grid::Backend;
use rotgn::initial::Pulse;
use rotgn::reconstruct::ThetaConvention;

fn issues(text: &str) -> Vec<ConfigIssue> {
    match parse_config(text) {
        Err(Error::Config(v)) => v,
        other => panic!("expected a configuration error, got {other:?}"),
    }
}

#[test]
fn empty_text_gives_defaults() {
    assert_eq!(parse_config("").unwrap(), ExperimentConfig::default());
}

#[test]
fn minimal_config_fills_defaults() {
    let c = parse_config("[physical]\nmu = 0.02\n").unwrap();
    assert_eq!(c.physical.mu, 0.02);
    assert_eq!(c.physical.epsilon, ExperimentConfig::default().physical.epsilon);
    assert_eq!(c.grid, ExperimentConfig::default().grid);
}

#[test]
fn negative_mu_is_a_range_violation_with_line() {
    let v = issues("# header\n[physical]\nepsilon = 0.1\nmu = -1\n");
    assert_eq!(v.len(), 1);
    assert_eq!(v[0].line, Some(4));
    assert_eq!(v[0].key.as_deref(), Some("physical.mu"));
    assert!(v[0].message.contains("range violation"), "{}", v[0].message);
}

#[test]
fn unknown_key_is_rejected_with_line() {
    let v = issues("[grid]\nn = 256\nresolution = 3\n");
    assert_eq!(v.len(), 1);
    assert_eq!(v[0].line, Some(3));
    assert_eq!(v[0].key.as_deref(), Some("grid.resolution"));
    assert_eq!(v[0].message, "unknown key");
}

#[test]
fn unknown_section_is_rejected() {
    let v = issues("[plots]\ncolor = \"red\"\n");
    assert_eq!(v[0].line, Some(1));
    assert!(v[0].message.contains("unknown section"));
}

#[test]
fn type_mismatch_is_reported() {
    let v = issues("[time]\ndt = \"small\"\n");
    assert_eq!(v[0].line, Some(2));
    assert!(v[0].message.contains("type mismatch"));
}

#[test]
fn every_issue_is_reported_in_line_order() {
    let v = issues("[grid]\nn = 100\n[time]\ndt = 0\nfoo = 1\n[model]\nfamily = \"kdv\"\n");
    let lines: Vec<_> = v.iter().map(|i| i.line).collect();
    assert_eq!(lines, vec![Some(2), Some(4), Some(5), Some(7)]);
}

#[test]
fn syntax_error_carries_line() {
    let v = issues("[grid]\nn = 256\nlength = = 3\n");
    assert_eq!(v[0].line, Some(3));
    assert!(v[0].message.starts_with("syntax error"));
}

#[test]
fn mu_list_must_descend() {
    let v = issues("[experiment]\nmu_list = [1e-3, 1e-2]\n");
    assert_eq!(v[0].key.as_deref(), Some("experiment.mu_list"));
}

#[test]
fn integers_are_accepted_as_numbers() {
    let c = parse_config("[grid]\nlength = 40\n").unwrap();
    assert_eq!(c.grid.length, 40.0);
}

#[test]
fn file_profile_conflicts_with_pulse_keys() {
    let c = parse_config("[initial]\nfile = \"u0.csv\"\n").unwrap();
    assert_eq!(c.initial.profile, InitialProfile::File { path: PathBuf::from("u0.csv") });
    let v = issues("[initial]\nfile = \"u0.csv\"\nwidth = 2\n");
    assert_eq!(v[0].line, Some(3));
}

#[test]
fn physical_cross_checks_run_after_field_checks() {
    let v = issues("[physical]\nenforce_regime = true\nepsilon = 0.5\nmu = 0.01\n");
    assert_eq!(v[0].line, None);
    assert_eq!(v[0].key.as_deref(), Some("physical"));
}

#[test]
fn default_round_trips() {
    let c = ExperimentConfig::default();
    assert_eq!(parse_config(&c.emit()).unwrap(), c);
}

fn arb_config() -> impl Strategy<Value = ExperimentConfig> {
    (
        (0usize..4, any::<bool>(), any::<bool>(), 0usize..3, any::<bool>()),
        (0.0f64..1.0, 1e-6f64..1.0, 0.0f64..5.0, -3.0f64..3.0, -1.0f64 / 6.0..1.0 / 3.0),
        (5u32..12, 1.0f64..200.0, any::<bool>()),
        (proptest::option::of(-10.0f64..10.0), -2.0f64..2.0, 0.1f64..5.0, any::<bool>()),
        (0.0f64..100.0, 1e-5f64..0.1, 1e-3f64..1.0),
        (proptest::collection::vec(1e-6f64..1.0, 1..6), 1e-3f64..2.0),
    )
        .prop_map(|(m, p, g, i, t, e)| {
            let mut c = ExperimentConfig::default();
            c.model.family = [FamilyName::Rch, FamilyName::Gbbm, FamilyName::Surface, FamilyName::SurfaceRch][m.0];
            c.model.transcription = if m.1 {
                rotgn::coefficients::Transcription::Uncorrected
            } else {
                rotgn::coefficients::Transcription::Consistent
            };
            c.model.theta_convention = if m.2 {
                ThetaConvention::Unscaled
            } else {
                ThetaConvention::EpsilonMuScaled
            };
            c.initial.rgn_start = [RgnStart::Matched, RgnStart::SurfaceOnly, RgnStart::Equal][m.3];
            c.grid.dealias = m.4;
            c.physical.epsilon = p.0;
            c.physical.mu = p.1;
            c.physical.omega = p.2;
            c.physical.p = p.3;
            c.physical.lambda = p.4;
            c.grid.n = 1 << g.0;
            c.grid.length = g.1;
            c.grid.backend = if g.2 { Backend::Fd4 } else { Backend::Fourier };
            c.initial.profile = if i.3 {
                InitialProfile::Pulse(Pulse {
                    amplitude: i.1,
                    width: i.2,
                    center: i.0,
                })
            } else {
                InitialProfile::File {
                    path: PathBuf::from("data/u \"0\".csv"),
                }
            };
            c.time.t_end = t.0;
            c.time.dt = t.1;
            c.time.dt_out = t.2;
            let mut mus = e.0;
            mus.sort_by(|a, b| b.total_cmp(a));
            mus.dedup();
            c.experiment.mu_list = mus;
            c.experiment.m = e.1;
            c
        })
}

proptest! {
    #[test]
    fn emit_then_parse_is_identity(c in arb_config()) {
        let text = c.emit();
        let back = parse_config(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.emit(), text);
    }
}

#[test]
fn shipped_configurations_parse() {
    for text in [
        include_str!("../../../configs/consistency.cfg"),
        include_str!("../../../configs/converge.cfg"),
        include_str!("../../../configs/simulate_rgn.cfg"),
        include_str!("../../../configs/simulate_rch.cfg"),
    ] {
        let c = parse_config(text).unwrap();
        assert_eq!(parse_config(&c.emit()).unwrap(), c);
    }
}
