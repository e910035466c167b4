use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn pb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pb"))
        .args(args)
        .output()
        .expect("pb runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_fixtures() -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().to_path_buf();
    let o = pb(&["fixtures", "--write-all", root.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    (dir, root)
}

fn files(root: &Path, name: &str) -> (String, String) {
    let d = root.join(name);
    (
        d.join("instance.json").to_str().unwrap().to_string(),
        d.join("votes.json").to_str().unwrap().to_string(),
    )
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("tests/golden")
            .join(format!("{name}.json")),
    )
    .unwrap()
}

const FIXTURES: [&str; 5] = [
    "ballot-demo",
    "example3",
    "obs4-complements",
    "obs5-substitutes",
    "thm2-nonlaminar",
];

#[test]
fn fixtures_match_goldens() {
    let (_guard, root) = write_fixtures();
    for name in FIXTURES {
        let (inst, votes) = files(&root, name);
        let o = pb(&[
            "tally",
            &inst,
            &votes,
            "--mode",
            "oracle",
            "--format",
            "structured",
        ]);
        assert!(o.status.success(), "{name}: {}", stderr(&o));
        assert_eq!(stdout(&o), golden(name), "{name}");

        let meta: Value = serde_json::from_str(
            &std::fs::read_to_string(root.join(name).join("fixture.json")).unwrap(),
        )
        .unwrap();
        let mode = match meta["mode"].as_str().unwrap() {
            "force-exact" => "exact",
            "force-oracle" => "oracle",
            "force-greedy" => "greedy",
            "force-distinct" => "distinct",
            _ => "auto",
        };
        let o = pb(&[
            "tally",
            &inst,
            &votes,
            "--mode",
            mode,
            "--format",
            "structured",
        ]);
        assert!(o.status.success(), "{name}: {}", stderr(&o));
        let got: Value = serde_json::from_str(&stdout(&o)).unwrap();
        let want: Value = serde_json::from_str(&golden(name)).unwrap();
        assert_eq!(got["outcome"], want["outcome"], "{name}");
        assert_eq!(got["social_welfare"], want["social_welfare"], "{name}");
    }
}

#[test]
fn tally_text_report() {
    let (_guard, root) = write_fixtures();
    let (inst, votes) = files(&root, "obs4-complements");
    let o = pb(&["tally", &inst, &votes, "--mode", "exact"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("outcome: p1,p2,p4"), "{text}");
    assert!(text.contains("social welfare: 6"), "{text}");
}

#[test]
fn structured_output_is_stable() {
    let (_guard, root) = write_fixtures();
    let (inst, votes) = files(&root, "ballot-demo");
    let a = stdout(&pb(&["tally", &inst, &votes, "--format", "structured"]));
    let b = stdout(&pb(&["tally", &inst, &votes, "--format", "structured"]));
    assert_eq!(a, b);
    let out = root.join("report.json");
    let o = pb(&[
        "tally",
        &inst,
        &votes,
        "--format",
        "structured",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(out).unwrap(), a);
}

#[test]
fn attack_prints_the_complement_deviation() {
    let (_guard, root) = write_fixtures();
    let (inst, votes) = files(&root, "obs4-complements");
    let o = pb(&[
        "attack",
        &inst,
        &votes,
        "--voter",
        "3",
        "--exhaustive",
        "--mode",
        "exact",
        "--format",
        "structured",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let d = &r["deviation"];
    assert_eq!(d["deviated_vote"]["entries"]["1"]["funds"], 3);
    assert_eq!(
        d["deviated_vote"]["entries"]["1"]["approvals"],
        serde_json::json!([1, 2, 3])
    );
    assert_eq!(d["deviated_vote"]["entries"]["1"]["complement"], true);
    assert_eq!(
        d["deviated_outcome"]["selected"],
        serde_json::json!([1, 2, 3])
    );
    assert_eq!(
        d["true_utility_after"].as_u64().unwrap() - d["true_utility_before"].as_u64().unwrap(),
        1
    );

    let o = pb(&["attack", &inst, &votes, "--voter", "3", "--no-complements"]);
    assert!(stdout(&o).contains("no profitable deviation"));
}

#[test]
fn attack_on_overlapping_labels_uses_the_oracle() {
    let (_guard, root) = write_fixtures();
    let (inst, votes) = files(&root, "thm2-nonlaminar");
    let o = pb(&[
        "attack",
        &inst,
        &votes,
        "--voter",
        "3",
        "--mode",
        "oracle",
        "--format",
        "structured",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(
        r["deviation"]["deviated_outcome"]["selected"],
        serde_json::json!([1, 2])
    );
}

#[test]
fn classify_prints_verdicts() {
    let (_guard, root) = write_fixtures();
    let (inst, votes) = files(&root, "example3");
    let text = stdout(&pb(&["classify", &inst, &votes]));
    assert!(text.contains("g1: independent"), "{text}");
    assert!(
        text.contains("g2: substitute chains [p4>p5>p6] [p8>p9>p7]"),
        "{text}"
    );
}

#[test]
fn exit_codes() {
    let (_guard, root) = write_fixtures();
    let (inst, votes) = files(&root, "obs4-complements");

    let bad = root.join("bad.json");
    std::fs::write(&bad, r#"[{"voter": 1, "entries": {"1": {"funds": "x"}}}]"#).unwrap();
    let o = pb(&["tally", &inst, bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 1 column"), "{}", stderr(&o));

    std::fs::write(
        &bad,
        r#"[{"voter": 1, "entries": {"1": {"funds": 4, "approvals": [1]}}}]"#,
    )
    .unwrap();
    let o = pb(&["tally", &inst, bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("BudgetExceeded") && stderr(&o).contains("v1"),
        "{}",
        stderr(&o)
    );

    let mut file: Value = serde_json::from_str(&std::fs::read_to_string(&inst).unwrap()).unwrap();
    file["labels"][0]["min"] = 3.into();
    file["labels"][0]["max"] = 3.into();
    file["groups"][0]["kind"] = "contradictory".into();
    file["groups"][0]["max_approvals"] = 1.into();
    file["groups"][1]["kind"] = "contradictory".into();
    file["groups"][1]["max_approvals"] = 1.into();
    let infeasible = root.join("infeasible.json");
    std::fs::write(&infeasible, file.to_string()).unwrap();
    let o = pb(&["tally", infeasible.to_str().unwrap(), &votes]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));

    let o = pb(&["tally", &inst, &votes, "--mode", "exact", "--smax-cap", "1"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("GroupTooLarge") && stderr(&o).contains("g1"));

    let o = pb(&["attack", &inst, &votes, "--voter", "3", "--space-cap", "5"]);
    assert_eq!(o.status.code(), Some(4));

    let o = pb(&["tally", &inst, &votes, "--frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    let o = pb(&["tally", &inst, &votes, "--tiebreak", "sideways"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tiebreak_override() {
    let (_guard, root) = write_fixtures();
    let (inst, votes) = files(&root, "obs5-substitutes");
    let tally = |extra: &[&str]| -> Value {
        let mut args = vec![
            "tally",
            &inst,
            &votes,
            "--mode",
            "exact",
            "--format",
            "structured",
        ];
        args.extend_from_slice(extra);
        serde_json::from_str(&stdout(&pb(&args))).unwrap()
    };
    assert_eq!(tally(&[])["outcome"]["selected"], serde_json::json!([1, 2]));
    assert_eq!(
        tally(&["--tiebreak", "index-sum"])["outcome"]["selected"],
        serde_json::json!([1, 2])
    );
    let policy = root.join("tb.json");
    std::fs::write(
        &policy,
        r#"{"project_priority": [3, 2, 1, 4, 5, 6, 7, 8, 9, 10]}"#,
    )
    .unwrap();
    let arg = format!("file:{}", policy.display());
    let r = tally(&["--tiebreak", &arg]);
    assert_eq!(r["social_welfare"], 6);
    assert_eq!(r["outcome"]["selected"], serde_json::json!([2, 3]));
}

#[test]
fn gen_round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g");
    let o = pb(&[
        "gen",
        "--seed",
        "11",
        "--kind",
        "def3",
        "--projects",
        "4:8",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (inst, votes) = (out.join("instance.json"), out.join("votes.json"));
    let from_files = stdout(&pb(&[
        "tally",
        inst.to_str().unwrap(),
        votes.to_str().unwrap(),
        "--format",
        "structured",
    ]));

    let o = pb(&["gen", "--seed", "11", "--kind", "def3", "--projects", "4:8"]);
    let both: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(
        both["instance"],
        serde_json::from_str::<Value>(&std::fs::read_to_string(&inst).unwrap()).unwrap()
    );

    let params = pb_core::gen::GenParams {
        projects: (4, 8),
        ..Default::default()
    }
    .with_seed(11)
    .with_kind(pb_core::gen::ProfileKind::Def3);
    let instance = pb_core::gen::gen_instance(&params).unwrap();
    let profile = pb_core::gen::gen_profile(&instance, &params);
    let (votes, _) = pb_core::model::validate_profile(&instance, &profile.votes).unwrap();
    let in_memory = pb_core::solve(
        &instance,
        &votes,
        pb_core::SolveMode::Auto,
        &Default::default(),
    )
    .unwrap();
    assert_eq!(from_files, format!("{}\n", in_memory.to_json()));
}

#[test]
fn validate_reports_bounds() {
    let (_guard, root) = write_fixtures();
    let (inst, votes) = files(&root, "ballot-demo");
    let o = pb(&["validate", &inst, &votes, "--format", "structured"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["valid"], true);
    assert_eq!(r["voters"], 3);
    let (inst, _) = files(&root, "thm2-nonlaminar");
    let o = pb(&["validate", &inst]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("NonLaminarLabels"));
}
