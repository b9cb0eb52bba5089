use std::path::PathBuf;
use std::process::Command;

use ifc_cli::commands::{self, DELTA_REL};
use ifc_cli::{write_outputs, RunReport, ScenarioFile};
use ifc_core::engine::{envelope_bound, rate_from_errors};
use ifc_core::ifun::{Axiom, Witness};
use ifc_core::numkit::weighted_max_norm_vec;
use proptest::prelude::*;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn load(name: &str) -> ScenarioFile {
    ScenarioFile::load(&fixture(name)).unwrap()
}

fn ifc(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_ifc")).args(args).output().unwrap()
}

fn exit_code(args: &[&str]) -> i32 {
    ifc(args).status.code().unwrap()
}

#[test]
fn exit_codes() {
    let ex4 = fixture("example4_ubpc.json");
    let bad = fixture("infeasible_linear.json");
    let ex1 = fixture("fixture_example1.json");
    assert_eq!(exit_code(&["certify", "--scenario", ex4.to_str().unwrap()]), 0);
    assert_eq!(exit_code(&["certify", "--scenario", bad.to_str().unwrap()]), 2);
    assert_eq!(exit_code(&["run", "--scenario", ex1.to_str().unwrap()]), 3);
    assert_eq!(exit_code(&["run", "--scenario", bad.to_str().unwrap()]), 3);
    assert_eq!(exit_code(&["run", "--scenario", ex4.to_str().unwrap()]), 0);

    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{\"algorithm\": {\"family\": \"linear\"").unwrap();
    assert_eq!(exit_code(&["certify", "--scenario", junk.to_str().unwrap()]), 4);
    std::fs::write(&junk, "{\"algorithm\": {\"family\": \"linear\"}}").unwrap();
    let out = ifc(&["certify", "--scenario", junk.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("network"));
    let missing = dir.path().join("absent.json");
    assert_eq!(exit_code(&["run", "--scenario", missing.to_str().unwrap()]), 4);
}

#[test]
fn json_report_on_stdout_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let ex4 = fixture("example4_ubpc.json");
    let out = ifc(&[
        "run",
        "--scenario",
        ex4.to_str().unwrap(),
        "--json",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let printed: RunReport = serde_json::from_slice(&out.stdout).unwrap();
    let text = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    let written: RunReport = serde_json::from_str(&text).unwrap();
    assert_eq!(printed, written);
    assert!(dir.path().join("trace.csv").exists());
    assert!(written.certified);
    assert!(written.decisions.iter().any(|d| d.contains("(I - M_b)^-1 1")));
}

struct CsvTrace {
    powers: Vec<Vec<f64>>,
    err: Vec<Option<f64>>,
    env: Vec<Option<f64>>,
}

fn parse_csv(text: &str, k: usize) -> CsvTrace {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rd.headers().unwrap().iter().map(String::from).collect();
    let mut expect = vec!["step".to_string()];
    expect.extend((1..=k).map(|i| format!("p_{i}")));
    expect.extend(["err_weighted".to_string(), "envelope_bound".to_string()]);
    assert_eq!(header, expect);
    let cell = |s: &str| if s.is_empty() { None } else { Some(s.parse::<f64>().unwrap()) };
    let mut t = CsvTrace {
        powers: Vec::new(),
        err: Vec::new(),
        env: Vec::new(),
    };
    for (n, rec) in rd.records().enumerate() {
        let rec = rec.unwrap();
        assert_eq!(rec[0].parse::<usize>().unwrap(), n);
        t.powers.push((1..=k).map(|i| rec[i].parse().unwrap()).collect());
        t.err.push(cell(&rec[k + 1]));
        t.env.push(cell(&rec[k + 2]));
    }
    t
}

fn check_report_against_csv(file: &ScenarioFile, seed: Option<u64>) {
    let out = commands::run(file, seed).unwrap();
    let report = &out.report;
    let run = report.run.as_ref().unwrap();
    let csv = parse_csv(out.trace_csv.as_ref().unwrap(), report.users);
    assert_eq!(csv.powers.len(), run.steps + 1);
    assert_eq!(csv.powers.last().unwrap(), &run.final_power);

    let p_star = run.fixed_point.as_ref().unwrap();
    let v = &run.error_weights;
    let err: Vec<f64> = csv.err.iter().map(|e| e.unwrap()).collect();
    // errors re-derived from the logged powers
    for (p, &e) in csv.powers.iter().zip(&err) {
        let d: Vec<f64> = p.iter().zip(p_star).map(|(a, b)| a - b).collect();
        let again = weighted_max_norm_vec(&d, v).unwrap();
        assert!((again - e).abs() <= 1e-12 * e.max(1e-300) + 1e-300, "{again} vs {e}");
    }
    // rate re-derived from the logged errors
    let scale = weighted_max_norm_vec(p_star, v).unwrap();
    let rate = rate_from_errors(&err, scale).unwrap();
    let reported = run.empirical_rate.as_ref().unwrap();
    assert!((rate.rate - reported.rate).abs() <= 1e-12 * reported.rate);
    // envelope column and the per-row inequality
    let m = run.envelope_modulus.unwrap();
    for (n, (e, b)) in err.iter().zip(&csv.env).enumerate() {
        let b = b.unwrap();
        assert!((b - envelope_bound(err[0], m, n)).abs() <= 1e-12 * b.max(1e-300));
        assert!(*e <= b * (1.0 + 1e-9), "step {n}: {e} > {b}");
    }
    assert!(run.envelope.as_ref().unwrap().passed);
    // T_delta re-derived
    let delta = DELTA_REL * err[0];
    assert_eq!(run.delta, Some(delta));
    assert_eq!(run.t_delta_measured, err.iter().position(|&e| e <= delta));
    assert_eq!(run.t_delta_within_bound, Some(true));
}

#[test]
fn report_recomputable_from_csv() {
    check_report_against_csv(&load("example4_ubpc.json"), None);
    check_report_against_csv(&load("example4_async.json"), None);
    check_report_against_csv(&load("example4_async.json"), Some(11));
    check_report_against_csv(&load("fixture_example3.json"), None);
}

#[test]
fn async_runs_are_deterministic() {
    let file = load("example4_async.json");
    let a = commands::run(&file, None).unwrap();
    let b = commands::run(&file, None).unwrap();
    assert_eq!(a.trace_csv, b.trace_csv);
    assert_eq!(a.report, b.report);
    let c = commands::run(&file, Some(99)).unwrap();
    assert_ne!(a.trace_csv, c.trace_csv);

    let total = load("mpa_three_bases.json");
    let x = commands::run(&total, None).unwrap();
    let y = commands::run(&total, None).unwrap();
    assert_eq!(x.trace_csv, y.trace_csv);
    let run = x.report.run.as_ref().unwrap();
    assert!(run.envelope.is_none(), "no envelope for total asynchrony");
    let p_star = run.fixed_point.as_ref().unwrap();
    for (a, b) in run.final_power.iter().zip(p_star) {
        assert!((a - b).abs() <= 1e-9 * b);
    }

    let dir = tempfile::tempdir().unwrap();
    write_outputs(&file, &a, dir.path()).unwrap();
    let on_disk = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(Some(on_disk), a.trace_csv);
}

#[test]
fn fixture_behaviour() {
    let ex1 = commands::run(&load("fixture_example1.json"), None).unwrap();
    assert_eq!(ex1.exit_code, 3);
    assert!(ex1.report.run.as_ref().unwrap().fixed_point.is_none());
    assert_eq!(ex1.report.rho, Some(2.0));

    let ex2 = commands::run(&load("fixture_example2.json"), None).unwrap();
    let rate = ex2.report.run.as_ref().unwrap().empirical_rate.clone().unwrap();
    assert!(rate.sublinear && rate.rate >= 0.999);

    let ex3 = commands::check_axioms(&load("fixture_example3.json"), 500, 1).unwrap();
    let axioms = ex3.report.axioms.unwrap();
    let get = |a: Axiom| axioms.iter().find(|v| v.axiom == a).unwrap();
    assert!(get(Axiom::Contractivity).passed);
    assert!(get(Axiom::Positivity).passed);
    let scal = get(Axiom::Scalability);
    assert!(!scal.passed);
    match scal.witness.as_ref().unwrap() {
        Witness::Scalability { p, alpha, .. } => {
            assert_eq!(p, &vec![0.125]);
            assert_eq!(*alpha, 2.0);
        }
        w => panic!("unexpected witness {w:?}"),
    }

    let nfp = commands::run(&load("fixture_no_fixed_point.json"), None).unwrap();
    let run = nfp.report.run.unwrap();
    assert!(run.fixed_point.is_none());
    assert_ne!(run.stop, ifc_core::engine::StopReason::Tolerance);
}

#[test]
fn enumeration_agrees_with_common_v() {
    let out = commands::enumerate(&load("mpa_three_bases.json")).unwrap();
    let e = out.report.enumeration.unwrap();
    assert_eq!(e.spectra.len(), 8);
    assert!(e.agree && e.all_below_one && e.common_v_certified);
    let out = commands::enumerate(&load("infeasible_linear.json")).unwrap();
    let e = out.report.enumeration.unwrap();
    assert!(e.agree && !e.all_below_one && !e.common_v_certified);
}

const NETWORK: &str = r#""network": {"K": 3, "R": 2,
    "gains": [[1.0, 0.6, 0.5], [0.5, 1.0, 0.9]], "noise": [1.0, 0.5],
    "targets": {"unit": "linear", "values": [0.3, 0.3, 0.3]}}"#;

#[test]
fn every_family_certifies_and_converges() {
    let algs = [
        r#"{"family": "linear"}"#,
        r#"{"family": "mpa"}"#,
        r#"{"family": "macro"}"#,
        r#"{"family": "macro-over"}"#,
        r#"{"family": "ubpc", "a": [5, 5, 5], "alpha": [50, 50, 50]}"#,
        r#"{"family": "drpc", "lower": [[0, 0.1, 0.1], [0.1, 0, 0.1], [0.1, 0.1, 0]],
            "upper": [[0, 0.3, 0.2], [0.2, 0, 0.3], [0.3, 0.2, 0]]}"#,
        r#"{"family": "clamped-mpa", "p_min": [0.1, 0.1, 0.1], "p_max": [0.5, 0.5, 0.5]}"#,
    ];
    for alg in algs {
        let text = format!(r#"{{{NETWORK}, "algorithm": {alg}, "run": {{"tol": 1e-13}}}}"#);
        let file = ScenarioFile::from_json(&text).unwrap();
        let cert = commands::certify(&file).unwrap();
        assert_eq!(cert.exit_code, 0, "{alg}: {:?}", cert.report.failure);
        assert!(cert.report.certificate.as_ref().unwrap().verify());
        let out = commands::run(&file, None).unwrap();
        let run = out.report.run.unwrap();
        assert_eq!(run.stop, ifc_core::engine::StopReason::Tolerance, "{alg}");
        assert!(run.envelope.unwrap().passed, "{alg}");
        let axioms = commands::check_axioms(&file, 200, 5).unwrap().report.axioms.unwrap();
        for v in &axioms {
            let expect = match v.axiom {
                // clamping breaks scalability; para-contraction needs the certificate norm
                Axiom::Scalability => !alg.contains("clamped"),
                _ => true,
            };
            if expect {
                assert!(v.passed, "{alg}: {:?} {:?}", v.axiom, v.witness);
            }
        }
    }
}

#[test]
fn ubpc_outside_domain_is_a_certification_failure() {
    let text = format!(
        r#"{{{NETWORK}, "algorithm": {{"family": "ubpc", "a": [1, 1, 1], "alpha": [0, 1, 1]}}}}"#
    );
    let file = ScenarioFile::from_json(&text).unwrap();
    let err = commands::certify(&file).err().unwrap();
    assert_eq!(err.exit_code(), ifc_cli::EXIT_UNCERTIFIED);
}

fn scenario_strategy() -> impl Strategy<Value = String> {
    (1usize..5, 1usize..4).prop_flat_map(|(k, r)| {
        (
            prop::collection::vec(prop::collection::vec(0.01f64..10.0, k), r),
            prop::collection::vec(0.1f64..5.0, r),
            prop::collection::vec(-5.0f64..10.0, k),
            prop::option::of(prop::collection::vec(1usize..=r, k)),
            any::<u64>(),
            prop::bool::ANY,
        )
            .prop_map(move |(gains, noise, targets, assignment, seed, asynchronous)| {
                let mut net = serde_json::json!({
                    "K": k, "R": r, "gains": gains, "noise": noise,
                    "targets": {"unit": "dB", "values": targets},
                });
                if let Some(a) = assignment {
                    net["assignment"] = serde_json::json!(a);
                }
                let run = if asynchronous {
                    serde_json::json!({"mode": "async", "D": 2, "seed": seed})
                } else {
                    serde_json::json!({"mode": "sync", "seed": seed, "tol": 1e-9})
                };
                serde_json::json!({
                    "network": net,
                    "algorithm": {"family": "mpa"},
                    "run": run,
                })
                .to_string()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scenario_round_trips(text in scenario_strategy()) {
        let file = ScenarioFile::from_json(&text).unwrap();
        let again = ScenarioFile::from_json(&file.to_json()).unwrap();
        prop_assert_eq!(&file, &again);
        prop_assert_eq!(file.network_scenario().unwrap(), again.network_scenario().unwrap());
    }
}
