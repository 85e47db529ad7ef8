//! The `deladas` binary end to end: exit codes, files written, determinism.

mod support;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use deladas::ddd::{parse_ddd, parse_document};
use deladas::model::Configuration;
use deladas::solver::check_configuration;
use support::randc;

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn deladas(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Run {
    let output = Command::new(env!("CARGO_BIN_EXE_deladas"))
        .args(args.iter().map(|a| a.as_ref()))
        .output()
        .unwrap();
    Run {
        code: output.status.code().unwrap(),
        stdout: String::from_utf8(output.stdout).unwrap(),
        stderr: String::from_utf8(output.stderr).unwrap(),
    }
}

#[test]
fn check_lists_inferred_ports() {
    let r = deladas(&[&"check", &example("randc.dls")]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(
        r.stdout,
        "goal randc: 5 clauses, 6 hosts\nRouter{cin:IN, cout:OUT, rou:OUT, rin:IN}\nClient{out:OUT, in:IN}\n"
    );
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(deladas(&[&"check", &dir.path().join("missing.dls")]).code, 2);

    let bad = dir.path().join("bad.dls");
    fs::write(&bad, "components { A }\nhosts { h1 }\nconstraintset c = constraintset {\nforall A a in deployment ( a.x connectsto )\n}\n").unwrap();
    let r = deladas(&[&"check", &bad]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("bad.dls:4:"), "{}", r.stderr);

    assert_eq!(deladas(&[&"frobnicate"]).code, 2);
}

#[test]
fn one_host_is_unsat() {
    let r = deladas(&[&"solve", &example("randc-1host.dls")]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.starts_with("UNSAT nodes="));
}

#[test]
fn tiny_budget_is_reported() {
    let r = deladas(&[&"solve", &example("randc.dls"), &"--budget", &"3"]);
    assert_eq!(r.code, 3);
    assert!(r.stdout.starts_with("BUDGET_EXHAUSTED"));
}

#[test]
fn solve_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let r = deladas(&[&"solve", &example("randc.dls"), &"--seed", &"42", &"--out", &dir.path()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let ddd = dir.path().join("solution-1.ddd.json");
    let v = deladas(&[&"verify", &example("randc.dls"), &ddd]);
    assert_eq!((v.code, v.stdout.as_str()), (0, "VALID\n"));
}

#[test]
fn several_solutions_are_distinct_and_valid() {
    let dir = tempfile::tempdir().unwrap();
    let goal = dir.path().join("randc3.dls");
    fs::write(&goal, support::RANDC.replace("h1, h2, h3, h4, h5, h6", "h1, h2, h3")).unwrap();
    let r = deladas(&[&"solve", &goal, &"--max-solutions", &"3", &"--out", &dir.path()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.starts_with("SAT solutions=3 "));
    let configs: Vec<Configuration> = (1..=3)
        .map(|k| parse_ddd(&fs::read_to_string(dir.path().join(format!("solution-{k}.ddd.json"))).unwrap()).unwrap())
        .collect();
    for c in &configs {
        assert!(check_configuration(c, &randc(3)).is_valid());
    }
    assert_ne!(configs[0], configs[1]);
    assert_ne!(configs[1], configs[2]);
    assert_ne!(configs[0], configs[2]);
}

#[test]
fn verify_names_the_broken_clause() {
    let dir = tempfile::tempdir().unwrap();
    deladas(&[&"solve", &example("randc.dls"), &"--out", &dir.path()]);
    let path = dir.path().join("solution-1.ddd.json");
    let mut doc = parse_document(&fs::read_to_string(&path).unwrap()).unwrap();
    // Drop a client's outbound channel.
    let i = doc.channels.iter().position(|c| c.from.ends_with(".out")).unwrap();
    doc.channels.remove(i);
    fs::write(&path, doc.to_json()).unwrap();
    let r = deladas(&[&"verify", &example("randc.dls"), &path]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.starts_with("VIOLATED\nclause 2 (at 13:1) does not hold"), "{}", r.stdout);

    let mut doc = parse_document(&fs::read_to_string(&path).unwrap()).unwrap();
    doc.instances[0].host = "h9".into();
    fs::write(&path, doc.to_json()).unwrap();
    let r = deladas(&[&"verify", &example("randc.dls"), &path]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("h9"), "{}", r.stderr);

    fs::write(&path, "{\"formatVersion\": 99}").unwrap();
    assert_eq!(deladas(&[&"verify", &example("randc.dls"), &path]).code, 2);
}

#[test]
fn run_exit_codes_follow_the_final_phase() {
    let dir = tempfile::tempdir().unwrap();
    let status = dir.path().join("status.json");
    let end = dir.path().join("end.ddd.json");
    let r = deladas(&[
        &"run", &example("randc.dls"), &"--scenario", &example("fail-h6.scenario.json"),
        &"--ticks", &"10", &"--status", &status, &"--out", &end,
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("cause=\"probe events HOST_FAILED(h6)\""), "{}", r.stdout);
    assert!(r.stdout.ends_with("final phase=STEADY recoveries=1 solver_calls=2\n"), "{}", r.stdout);
    let status: serde_json::Value = serde_json::from_str(&fs::read_to_string(status).unwrap()).unwrap();
    assert_eq!(status["phase"], "STEADY");
    let end = parse_ddd(&fs::read_to_string(end).unwrap()).unwrap();
    assert!(end.instances().iter().all(|i| i.host != "h6"));

    let r = deladas(&[&"run", &example("randc-2host.dls"), &"--scenario", &example("fail-h2.scenario.json"), &"--ticks", &"4"]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("phase=STALLED_UNSAT"));

    let r = deladas(&[
        &"run", &example("randc-2host.dls"), &"--scenario", &example("fail-h2-add-h3.scenario.json"), &"--ticks", &"8",
    ]);
    assert_eq!(r.code, 0, "{}", r.stdout);
}

#[test]
fn diff_prints_a_plan() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.ddd.json");
    let plan = dir.path().join("plan.json");
    fs::write(&empty, "{\"formatVersion\":1,\"goalName\":\"randc\",\"goalRevision\":0,\"instances\":[],\"channels\":[]}").unwrap();
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/randc-6host-seed7.ddd.json");
    let r = deladas(&[&"diff", &empty, &golden]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let printed: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    let actions = printed.as_array().unwrap();
    assert_eq!(actions.len(), 6 + 6 + 10);
    assert_eq!(deladas(&[&"diff", &golden, &golden, &"--out", &plan]).code, 0);
    let identity: serde_json::Value = serde_json::from_str(&fs::read_to_string(plan).unwrap()).unwrap();
    assert!(identity.as_array().unwrap().is_empty());
}

#[test]
fn repeated_invocations_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let r = deladas(&[&"solve", &example("randc.dls"), &"--seed", &"7", &"--max-solutions", &"2", &"--out", d]);
        assert_eq!(r.code, 0);
    }
    for k in 1..=2 {
        let name = format!("solution-{k}.ddd.json");
        assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap());
    }
    let golden = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/randc-6host-seed7.ddd.json")).unwrap();
    assert_eq!(fs::read_to_string(a.join("solution-1.ddd.json")).unwrap(), golden);

    let args: [&dyn AsRef<std::ffi::OsStr>; 6] =
        [&"run", &example("randc.dls"), &"--scenario", &example("fail-h6.scenario.json"), &"--ticks", &"10"];
    assert_eq!(deladas(&args).stdout, deladas(&args).stdout);
}
