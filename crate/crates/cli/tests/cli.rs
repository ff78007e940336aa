use std::fs;
use std::io::Cursor;
use std::path::Path;

use vigil_cli::{exit, run};
use vigil_core::fixtures;
use vigil_core::runtime::{TraceRecord, Verdict, VerdictResult};
use vigil_core::solver::{load_strategy, strategy_file_name};

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn vigil(args: &[&str], stdin: &str) -> Output {
    let mut argv = vec!["vigil"];
    argv.extend_from_slice(args);
    let mut input = Cursor::new(stdin.as_bytes().to_vec());
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(argv, &mut input, &mut out, &mut err);
    Output { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synthesize_into(world: &str, dir: &Path) -> Output {
    vigil(&["synthesize", world, "-o", path(dir)], "")
}

#[test]
fn validate_prints_canonical_world() {
    let o = vigil(&["validate", "fig3world"], "");
    assert_eq!(o.code, exit::OK, "{}", o.stderr);
    let w = vigil_core::parse_world(&o.stdout).unwrap();
    assert_eq!(w, fixtures::fig3world());
    assert!(o.stdout.ends_with("}\n"));
}

#[test]
fn validate_rejects_bad_world() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.json");
    fs::write(&file, fixtures::FIG3WORLD.replace("\"init\": 20", "\"init\": 12")).unwrap();
    let o = vigil(&["validate", path(&file)], "");
    assert_eq!(o.code, exit::ERROR);
    assert!(o.stdout.is_empty());
    assert!(o.stderr.contains("error"), "{}", o.stderr);
    assert_eq!(vigil(&["validate", "no-such-world"], "").code, exit::ERROR);
}

#[test]
fn decompose_writes_one_document_per_region() {
    let dir = tempfile::tempdir().unwrap();
    let o = vigil(&["decompose", "fig3world", "-o", path(dir.path())], "");
    assert_eq!(o.code, exit::OK, "{}", o.stderr);
    for (i, size) in [(1, 12), (2, 10)] {
        let text = fs::read_to_string(dir.path().join(format!("subgame_{i}.json"))).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(doc["outside"], -1);
        assert_eq!(doc["subgame"], i);
        assert_eq!(doc["partition"][0].as_array().unwrap().len(), size);
    }
    let o = vigil(&["decompose", "fig3world"], "");
    let docs: Vec<serde_json::Value> = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(docs.len(), 2);
}

#[test]
fn synthesize_fig3world() {
    let dir = tempfile::tempdir().unwrap();
    let o = synthesize_into("fig3world", dir.path());
    assert_eq!(o.code, exit::OK, "{}", o.stderr);
    assert!(o.stdout.is_empty());
    let report: vigil_cli::report::SynthesisReport =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    let sizes: Vec<usize> = report.subgames.iter().map(|s| s.region_size).collect();
    assert_eq!(sizes, vec![12, 10]);
    assert_eq!(report.totals.locations, 22);
    assert!(report.totals.realizable);
    let w = fixtures::fig3world();
    for i in 0..2 {
        let text = fs::read_to_string(dir.path().join(strategy_file_name(i))).unwrap();
        let s = load_strategy(&w, i, &text).unwrap();
        assert!(s.realizable);
        assert_eq!(s.to_json(&w), text);
    }
    let timings: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("timings.json")).unwrap()).unwrap();
    assert_eq!(timings["subgames"].as_array().unwrap().len(), 2);
}

#[test]
fn synthesize_single_subgame() {
    let dir = tempfile::tempdir().unwrap();
    let o = vigil(&["synthesize", "fig3world", "--subgame", "2", "-o", path(dir.path())], "");
    assert_eq!(o.code, exit::OK, "{}", o.stderr);
    assert!(!dir.path().join("strategy_1.json").exists());
    assert!(dir.path().join("strategy_2.json").exists());
    assert_eq!(vigil(&["synthesize", "fig3world", "--subgame", "3", "-o", path(dir.path())], "").code, exit::ERROR);
}

#[test]
fn synthesize_unrealizable_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("safety1.json");
    fs::write(&file, fixtures::FIG3WORLD.replace(r#""type": "safety", "b": 4"#, r#""type": "safety", "b": 1"#)).unwrap();
    let o = synthesize_into(path(&file), &dir.path().join("out"));
    assert_eq!(o.code, exit::UNREALIZABLE, "{}", o.stderr);
    assert!(o.stderr.contains("subgame 1: unrealizable"));
}

#[test]
fn synthesize_cap_and_exact_mode() {
    let dir = tempfile::tempdir().unwrap();
    let o = vigil(&["synthesize", "fig3world", "--cap", "5", "-o", path(dir.path())], "");
    assert_eq!(o.code, exit::ERROR);
    assert!(o.stderr.contains("belief explosion"), "{}", o.stderr);
    let o = vigil(&["synthesize", "fig3world", "--trigger-mode", "exact", "-o", path(dir.path())], "");
    assert_eq!(o.code, exit::OK, "{}", o.stderr);
    assert!(fs::read_to_string(dir.path().join("report.json")).unwrap().contains("\"trigger_mode\": \"exact\""));
    assert_eq!(vigil(&["synthesize", "fig3world", "--trigger-mode", "fuzzy", "-o", "x"], "").code, exit::ERROR);
}

#[test]
fn jobs_change_no_output_byte() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(vigil(&["synthesize", "fig3alarms", "--jobs", "1", "-o", path(a.path())], "").code, exit::OK);
    assert_eq!(vigil(&["synthesize", "fig3alarms", "--jobs", "3", "-o", path(b.path())], "").code, exit::OK);
    for name in ["strategy_1.json", "strategy_2.json", "report.json"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }
}

#[test]
fn verify_fixture_strategies() {
    let dir = tempfile::tempdir().unwrap();
    synthesize_into("fig3world", dir.path());
    let o = vigil(&["verify", "fig3world", path(dir.path())], "");
    assert_eq!(o.code, exit::OK, "{}", o.stderr);
    let v: Verdict = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v.result, VerdictResult::Holds);
    assert!(v.witness.is_none());
    assert!(!o.stdout.contains("witness"));
}

#[test]
fn verify_missing_strategy_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    synthesize_into("fig3world", dir.path());
    fs::remove_file(dir.path().join("strategy_2.json")).unwrap();
    let o = vigil(&["verify", "fig3world", path(dir.path())], "");
    assert_eq!(o.code, exit::ERROR);
    assert!(o.stderr.contains("strategy_2.json"), "{}", o.stderr);
}

#[test]
fn verify_corrupted_strategy_exits_4() {
    // strategies for Safety(4) checked against a world demanding Safety(2)
    let dir = tempfile::tempdir().unwrap();
    synthesize_into("fig3world", dir.path());
    let strict = dir.path().join("strict.json");
    fs::write(&strict, fixtures::FIG3WORLD.replace(r#""type": "safety", "b": 4"#, r#""type": "safety", "b": 2"#)).unwrap();
    let out = dir.path().join("verdict.json");
    let o = vigil(&["verify", path(&strict), path(dir.path()), "-o", path(&out)], "");
    assert_eq!(o.code, exit::VIOLATED, "{}", o.stderr);
    let v: Verdict = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    let w = v.witness.unwrap();
    assert_eq!(w.stem[0].target, 14);
    assert!(w.stem.last().unwrap().invisible > 2);
}

#[test]
fn simulate_random_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    synthesize_into("fig3world", dir.path());
    let run = || vigil(&["simulate", "fig3world", path(dir.path()), "--seed", "7", "--steps", "100"], "");
    let a = run();
    assert_eq!(a.code, exit::OK, "{}", a.stderr);
    assert_eq!(a.stdout, run().stdout);
    let lines: Vec<TraceRecord> = a.stdout.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 101);
    assert!(lines.iter().all(|r| r.predicates.safety == Some(true)));
    assert!(lines.iter().all(|r| r.global_belief.contains(&r.target)));
}

#[test]
fn simulate_interactive_from_stdin() {
    let dir = tempfile::tempdir().unwrap();
    synthesize_into("fig3world", dir.path());
    let o = vigil(&["simulate", "fig3world", path(dir.path()), "--adversary", "interactive"], "9\n4 3\n");
    assert_eq!(o.code, exit::OK, "{}", o.stderr);
    let lines: Vec<TraceRecord> = o.stdout.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.iter().map(|r| r.target).collect::<Vec<_>>(), vec![14, 9, 4, 3]);
    assert_eq!(lines[1].local_beliefs, vec![vec![-1, 19], vec![9]]);
    assert_eq!(lines[1].global_belief, vec![9]);

    let o = vigil(&["simulate", "fig3world", path(dir.path()), "--adversary", "interactive"], "9 19");
    assert_eq!(o.code, exit::ERROR);
    assert!(o.stderr.contains("illegal target move to 19"), "{}", o.stderr);
}

#[test]
fn simulate_refuses_unrealizable_without_allow_partial() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("safety1.json");
    fs::write(&file, fixtures::FIG3WORLD.replace(r#""type": "safety", "b": 4"#, r#""type": "safety", "b": 1"#)).unwrap();
    let strategies = dir.path().join("out");
    synthesize_into(path(&file), &strategies);
    let o = vigil(&["simulate", path(&file), path(&strategies), "--steps", "5"], "");
    assert_eq!(o.code, exit::ERROR);
    assert!(o.stderr.contains("--allow-partial"), "{}", o.stderr);
    let o = vigil(&["simulate", path(&file), path(&strategies), "--steps", "5", "--allow-partial"], "");
    assert_eq!(o.code, exit::OK, "{}", o.stderr);
    assert_eq!(o.stdout.lines().count(), 6);
}

#[test]
fn solve_arena_prints_regions() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("arena.txt");
    fs::write(&file, "init 0\nnode 0 p 0; 1 2\nnode 1 a 1; 1\nnode 2 a 2; 2\n").unwrap();
    let o = vigil(&["solve-arena", path(&file)], "");
    assert_eq!(o.code, exit::OK, "{}", o.stderr);
    let doc: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(doc["protagonist"], serde_json::json!([0, 2]));
    assert_eq!(doc["antagonist"], serde_json::json!([1]));
    assert_eq!(doc["moves"]["0"], 2);
    assert_eq!(doc["realizable"], true);
    fs::write(&file, "node 0 p 0;\n").unwrap();
    assert_eq!(vigil(&["solve-arena", path(&file)], "").code, exit::ERROR);
}

#[test]
fn cap_from_environment() {
    let cap = vigil_cli::CapArg { cap: None };
    // VIGIL_CAP is not set by the test harness
    if std::env::var(vigil_cli::CAP_ENV).is_err() {
        assert_eq!(cap.resolve().unwrap(), vigil_core::DEFAULT_CAP);
    }
    assert_eq!(vigil_cli::CapArg { cap: Some(7) }.resolve().unwrap(), 7);
    assert!(vigil_cli::CapArg { cap: Some(0) }.resolve().is_err());
}

#[test]
fn help_goes_to_stdout() {
    let o = vigil(&["--help"], "");
    assert_eq!(o.code, exit::OK);
    for cmd in ["validate", "decompose", "synthesize", "verify", "simulate", "serve", "solve-arena"] {
        assert!(o.stdout.contains(cmd), "{cmd}");
    }
    assert_eq!(vigil(&["frobnicate"], "").code, exit::ERROR);
}
