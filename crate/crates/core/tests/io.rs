//! Configuration parsing, OVF1 files, time series and reports.

use std::f64::consts::PI;

use proptest::prelude::*;
use visco_spectral::analysis::{dispersion_sweep, fit_decay_exponent};
use visco_spectral::app::{decay_reports, simulate_to_dir, snapshot_path};
use visco_spectral::checks::random_field;
use visco_spectral::constitutive::QSpec;
use visco_spectral::io::*;
use visco_spectral::solver::{Case, ModelParams, Target};
use visco_spectral::{Error, Grid, Rank};

fn config_error(text: &str) -> (String, String) {
    match parse_config(text) {
        Err(Error::Config { path, msg }) => (path, msg),
        other => panic!("expected a config error, got {other:?}"),
    }
}

// ---------------------------------------------------------------- config

#[test]
fn minimal_config_applies_case_defaults() {
    let c = parse_config("[model]\ncase = \"I\"\n").unwrap();
    assert_eq!(c.model, ModelParams { nu1: 1.0, nu2: 0.0, alpha: 1.0, mu: 1.0, d: 2, case: Case::I });
    assert_eq!(c.grid, Grid::desk());
    assert_eq!(c.q, QSpec::None);
    assert!(c.nonlinear);
    assert_eq!(c, RunConfig::for_case(Case::I));
    assert_eq!(c.decay_window(), [5.0, 100.0]);
}

#[test]
fn full_config_is_read() {
    let text = r#"
command = "decay"
[grid]
d = 2
n = 32
box_length = 12.5
[model]
case = "III"
mu = 1
[q]
variant = "giesekus"
beta = 0.5
[init]
amplitude = 0.01
seed = 42
[time]
dt = 0.01
t_final = 2
sample_every = 5
[[norms]]
label = "mine"
s = -0.5
t = 1.5
j0 = 1
target = "pdiv"
[output]
dir = "somewhere"
snapshot_times = [0, 1]
[decay]
s0 = [1]
t_hi = 1.5
"#;
    let c = parse_config(text).unwrap();
    assert_eq!(c.command.as_deref(), Some("decay"));
    assert_eq!(c.grid, Grid::new(2, 32, 12.5).unwrap());
    assert_eq!(c.model.case, Case::III);
    assert_eq!(c.q, QSpec::Giesekus { beta: 0.5 });
    assert_eq!(c.init.amplitude, Some(0.01));
    assert_eq!(c.init.seed, 42);
    assert_eq!((c.time.dt, c.time.t_final, c.time.sample_every), (0.01, 2.0, 5));
    assert_eq!(c.norms.len(), 1);
    assert_eq!((c.norms[0].target, c.norms[0].j0, c.norms[0].s), (Target::Pdiv, 1, -0.5));
    assert_eq!(c.output.snapshot_times, vec![0.0, 1.0]);
    assert_eq!(c.decay_window(), [5.0, 1.5]);
}

#[test]
fn config_errors_name_the_key_path() {
    assert_eq!(config_error("[model]\n").0, "model.case");
    assert_eq!(config_error("[model]\ncase = \"I\"\nnu3 = 1\n").0, "model.nu3");
    assert_eq!(config_error("[model]\ncase = \"VI\"\n").0, "model.case");
    assert_eq!(config_error("bogus = 1\n[model]\ncase = \"I\"\n").0, "bogus");
    assert_eq!(config_error("[model]\ncase = \"I\"\n[time]\ndt = -1.0\n").0, "time.dt");
    assert_eq!(config_error("[model]\ncase = \"I\"\n[time]\ndt = \"fast\"\n").0, "time.dt");
    assert_eq!(config_error("[model]\ncase = \"I\"\n[grid]\nn = 100\n").0, "grid");
    assert_eq!(config_error("[model]\ncase = \"I\"\n[[norms]]\nlabel = \"x\"\ns = 1\nt = 1\n").0, "norms[0].target");
    assert_eq!(config_error("command = \"fly\"\n[model]\ncase = \"I\"\n").0, "command");
    assert_eq!(config_error("[model\n").0, "<document>");
}

#[test]
fn inadmissible_q_is_rejected_with_monomial_message() {
    let (path, msg) = config_error("[model]\ncase = \"V\"\n[q]\nvariant = \"oldroyd_b\"\nb = 1.0\n");
    assert_eq!(path, "q");
    assert!(msg.contains("τ∇u monomial not admissible in Case V"), "{msg}");
    // The Giesekus law carries the convected derivative as well.
    assert_eq!(config_error("[model]\ncase = \"V\"\n[q]\nvariant = \"giesekus\"\nbeta = 0.3\n").0, "q");
    // Case V admits the pure stress-square term.
    let text = "[model]\ncase = \"V\"\n[q]\nvariant = \"generic_quadratic\"\nqa = 0.5\nqb = 0\nqc = 0\n";
    assert_eq!(parse_config(text).unwrap().q, QSpec::GenericQuadratic { qa: 0.5, qb: 0.0, qc: 0.0 });
}

#[test]
fn config_roundtrips_through_canonical_text() {
    for case in Case::ALL {
        let mut c = RunConfig::for_case(case);
        c.q = case.maximal_q();
        c.command = Some("simulate".into());
        c.init.amplitude = Some(0.125);
        c.output.snapshot_times = vec![0.5, 2.0];
        c.norms.push(visco_spectral::analysis::NormDecl::new("extra", Target::Tau, 0.25, 1.75, -2));
        c.decay.t_hi = Some(40.0);
        let text = c.to_toml().unwrap();
        let back = parse_config(&text).unwrap();
        assert_eq!(back, c, "{text}");
        assert_eq!(back.hash().unwrap(), c.hash().unwrap());
    }
}

#[test]
fn hash_tracks_content() {
    let a = RunConfig::for_case(Case::I);
    let mut b = a.clone();
    assert_eq!(a.hash().unwrap().len(), 64);
    b.init.seed += 1;
    assert_ne!(a.hash().unwrap(), b.hash().unwrap());
}

// ---------------------------------------------------------------- OVF1

#[test]
fn ovf_roundtrip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    for (grid, rank) in [
        (Grid::new(2, 16, 2.0 * PI).unwrap(), Rank::SymTensor),
        (Grid::new(3, 16, 1.25).unwrap(), Rank::Vector),
        (Grid::new(2, 32, 7.0).unwrap(), Rank::Scalar),
    ] {
        let f = random_field(grid, rank, 3);
        let path = dir.path().join("f.ovf1");
        write_field(&f, &path).unwrap();
        let g = read_field(&path).unwrap();
        assert_eq!(g, f);
        assert_eq!(encode_field(&g), std::fs::read(&path).unwrap());
    }
}

#[test]
fn ovf_header_layout() {
    let f = random_field(Grid::new(2, 16, 3.5).unwrap(), Rank::Vector, 1);
    let b = encode_field(&f);
    assert_eq!(&b[0..4], b"OVF1");
    assert_eq!(u32::from_le_bytes(b[4..8].try_into().unwrap()), 1);
    assert_eq!(u32::from_le_bytes(b[8..12].try_into().unwrap()), 2);
    assert_eq!(u32::from_le_bytes(b[12..16].try_into().unwrap()), 16);
    assert_eq!(f64::from_le_bytes(b[20..28].try_into().unwrap()), 3.5);
    assert_eq!(b.len(), 28 + 2 * 256 * 16);
    // First coefficient of the first component follows the header.
    assert_eq!(f64::from_le_bytes(b[28..36].try_into().unwrap()), f.comps[0][0].re);
}

#[test]
fn ovf_rejects_corrupt_files() {
    let f = random_field(Grid::new(2, 16, 1.0).unwrap(), Rank::Scalar, 1);
    let good = encode_field(&f);
    let mut bad = good.clone();
    bad[0] = b'X';
    assert!(matches!(decode_field(&bad), Err(Error::BadMagic(_))));
    let mut bad = good.clone();
    bad[4] = 2;
    assert!(matches!(decode_field(&bad), Err(Error::BadVersion(2))));
    assert!(matches!(decode_field(&good[..good.len() - 1]), Err(Error::PayloadLength { .. })));
    assert!(matches!(decode_field(&good[..10]), Err(Error::PayloadLength { .. })));
    let mut bad = good.clone();
    bad[12..16].copy_from_slice(&u32::MAX.to_le_bytes());
    assert!(matches!(decode_field(&bad), Err(Error::DimensionOverflow(_))));
    let mut bad = good.clone();
    bad[8..12].copy_from_slice(&7u32.to_le_bytes());
    assert!(matches!(decode_field(&bad), Err(Error::DimensionOverflow(_))));
    let mut bad = good;
    bad[16..20].copy_from_slice(&9u32.to_le_bytes());
    assert!(matches!(decode_field(&bad), Err(Error::DimensionOverflow(_))));
    assert!(matches!(read_field("/nonexistent/field.ovf1"), Err(Error::Io { .. })));
}

// ---------------------------------------------------------------- series and reports

#[test]
fn series_rejects_bad_rows() {
    let mut s = TimeSeries::new(&["a".to_string(), "b".to_string()]);
    s.push(0.0, &[1.0, 2.0]).unwrap();
    assert!(s.push(1.0, &[1.0]).is_err());
    assert!(s.push(0.0, &[1.0, 2.0]).is_err());
    assert!(TimeSeries::from_columns(vec![0.0, 1.0], vec![("a".into(), vec![1.0])]).is_err());
    assert!(TimeSeries::from_columns(vec![1.0, 0.0], vec![]).is_err());
}

#[test]
fn csv_uses_round_trip_floats() {
    let mut s = TimeSeries::new(&["x".to_string(), "y".to_string()]);
    s.push(0.0, &[0.1, 1e-300]).unwrap();
    s.push(0.25, &[1.0 / 3.0, 2.0]).unwrap();
    let csv = s.to_csv();
    assert_eq!(csv, "t,x,y\n0.0,0.1,1e-300\n0.25,0.3333333333333333,2.0\n");
    for line in csv.lines().skip(1) {
        for v in line.split(',') {
            let x: f64 = v.parse().unwrap();
            assert_eq!(format!("{x:?}"), v);
        }
    }
}

#[test]
fn decay_report_verdicts() {
    let times: Vec<f64> = (0..=100).map(|i| i as f64).collect();
    let vals = times.iter().map(|t| (1.0 + t).powf(-0.8)).collect();
    let s = TimeSeries::from_columns(times, vec![("n".into(), vals)]).unwrap();
    let fit = fit_decay_exponent(&s, "n", [5.0, 50.0]).unwrap();
    assert_eq!(DecayReport::new(&fit, -1.0, 0.25).verdict, "pass");
    assert_eq!(DecayReport::new(&fit, -0.5, 0.25).verdict, "fail");
    let json = serde_json::to_value(DecayReport::new(&fit, -1.0, 0.25)).unwrap();
    let keys: Vec<&str> = json.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    for k in ["label", "window", "exponent", "stderr", "r2", "theory_exponent", "verdict"] {
        assert!(keys.contains(&k), "{k}");
    }
}

#[test]
fn dispersion_csv_columns() {
    let symbols = dispersion_sweep(&ModelParams::for_case(Case::IV, 2), 0.01, 1.0, 3);
    let csv = dispersion_csv(&symbols);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("xi_mag,re_lambda1,im_lambda1,re_lambda2,im_lambda2"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 3);
    for (row, s) in rows.iter().zip(&symbols) {
        assert_eq!(row[0], s.xi_mag);
        assert_eq!((row[1], row[2]), (s.slow().re, s.slow().im));
        assert_eq!((row[3], row[4]), (s.fast().re, s.fast().im));
    }
}

fn small_run_config(dir: &str) -> RunConfig {
    let mut c = RunConfig::for_case(Case::I);
    c.grid = Grid::new(2, 32, 16.0 * PI).unwrap();
    c.q = Case::I.maximal_q();
    c.time.dt = 0.05;
    c.time.t_final = 3.0;
    c.time.sample_every = 1;
    c.decay.t_lo = 0.5;
    c.decay.t_hi = Some(2.5);
    c.output.dir = dir.into();
    c.output.snapshot_times = vec![1.0];
    c
}

#[test]
fn simulate_writes_reports_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let c = small_run_config(&dir.path().display().to_string());
    let (out, fits) = simulate_to_dir(&c, dir.path(), true).unwrap();
    assert_eq!(fits.len(), 2);
    assert_eq!(fits, decay_reports(&c, &out.series).unwrap());
    let csv = std::fs::read_to_string(dir.path().join("timeseries.csv")).unwrap();
    assert_eq!(csv, out.series.to_csv());
    assert_eq!(csv.lines().count(), 1 + 61);
    let decay: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("decay.json")).unwrap()).unwrap();
    assert_eq!(decay.as_array().unwrap().len(), 2);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config_hash"], c.hash().unwrap());
    assert_eq!(parse_config(manifest["config"].as_str().unwrap()).unwrap(), c);
    let u = read_field(snapshot_path(dir.path(), "u", 1.0)).unwrap();
    assert_eq!(u, out.snapshots[0].u);
    assert!(snapshot_path(dir.path(), "tau", 1.0).exists());
}

#[test]
fn case_two_has_no_decay_verdicts() {
    let mut c = small_run_config("unused");
    c.model = ModelParams::for_case(Case::II, 2);
    c.q = QSpec::None;
    let out = visco_spectral::solver::run(&c).unwrap();
    assert!(decay_reports(&c, &out.series).unwrap().is_empty());
    assert!(out.series.labels().all(|l| !l.starts_with("decay")));
}

#[test]
fn norm_report_json() {
    let f = random_field(Grid::new(2, 16, 2.0 * PI).unwrap(), Rank::Scalar, 1);
    let bank = visco_spectral::lp::build_filter_bank(f.grid, 1.0).unwrap();
    let spec = visco_spectral::lp::BesovSpec::new(0.0, 1.0, 0);
    let parts = visco_spectral::lp::hybrid_besov_parts(&bank, &f, &spec).unwrap();
    let v: serde_json::Value = serde_json::from_str(&NormReport::new("f", spec, parts).to_json().unwrap()).unwrap();
    assert_eq!(v["field_id"], "f");
    assert_eq!(v["total"].as_f64().unwrap(), parts.total);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn config_numbers_roundtrip(dt in 1e-6f64..1.0, seed in 0u64..1_000_000, slope in -5.0f64..5.0, e0 in 0.0f64..1.0) {
        let mut c = RunConfig::for_case(Case::IV);
        c.time.dt = dt;
        c.init.seed = seed;
        c.init.low_slope = slope;
        c.init.e0 = e0;
        let back = parse_config(&c.to_toml().unwrap()).unwrap();
        prop_assert_eq!(back, c);
    }
}
