use islkit::app::{run, EXIT_USAGE};

fn sample(name: &str) -> String {
    format!("{}/../../samples/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn islkit(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("islkit").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn wpo_of_the_alias_sample() {
    let (code, out, _) = islkit(&["wpo", &sample("free_alias.isl"), "--loop-bound", "2"]);
    assert_eq!(code, 0);
    assert_eq!(out, "x == y * x != null * y != null * y -/>\n");
}

#[test]
fn er_frame_sample_is_refuted_with_a_witness() {
    let (code, out, _) = islkit(&["check", &sample("frame_er.triple"), "--witness"]);
    assert_eq!(code, 1);
    assert!(out.contains("witness: {x=l1} | {l1=null}"), "{out}");
}

#[test]
fn check_exit_codes() {
    assert_eq!(islkit(&["check", "[ exists v . x -> v ] free(x) [ ok: x -/> ]"]).0, 0);
    assert_eq!(islkit(&["check", "[ x -> null ] free(x) [ ok: x -> null ]"]).0, 1);
}

#[test]
fn entails_exit_codes_and_explanation() {
    assert_eq!(islkit(&["entails", "x -> null", "exists a . x -> a"]).0, 0);
    let (code, out, _) = islkit(&["entails", "x -> null", "x -/>", "--explain"]);
    assert_eq!(code, 1);
    assert!(out.contains("{x=l1} | {l1=null}"), "{out}");
}

#[test]
fn canonicalize_prints_one_case_per_line() {
    let (code, out, _) = islkit(&["canonicalize", "y -> null", "--cmd", "free(x)"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 3);
}

#[test]
fn synthesized_proofs_are_accepted() {
    let (code, proof, _) = islkit(&["prove-synth", "[ x -> y ] free(x) [ ok: x -/> ]"]);
    assert_eq!(code, 0);
    let dir = std::env::temp_dir().join(format!("islkit-proof-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("free.proof");
    std::fs::write(&file, &proof).unwrap();
    let (code, out, _) = islkit(&["prove-check", file.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
    std::fs::write(&file, proof.replacen("x -/>", "x -> y", 1)).unwrap();
    assert_eq!(islkit(&["prove-check", file.to_str().unwrap()]).0, 1);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn usage_errors() {
    assert_eq!(islkit(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(islkit(&["wpo", "x -> ; free(x) ; ok"]).0, EXIT_USAGE);
    assert_eq!(islkit(&["diff-test", "--suite", "nope"]).0, EXIT_USAGE);
    assert_eq!(islkit(&["--help"]).0, 0);
}

#[test]
fn diff_test_reports_are_deterministic() {
    let args = [
        "diff-test",
        "--suite",
        "expressiveness",
        "--seed",
        "7",
        "--cases",
        "40",
        "--format",
        "machine",
    ];
    let (code, a, _) = islkit(&args);
    let (_, b, _) = islkit(&args);
    assert_eq!(code, 0, "{a}");
    assert_eq!(a, b);
    assert!(a.contains("failed=0\n"));
    let mut seq = args.to_vec();
    seq.push("--sequential");
    assert_eq!(islkit(&seq).1, a);
}

#[test]
fn single_case_rerun() {
    let (code, out, _) = islkit(&["diff-test", "--suite", "cano", "--seed", "3", "--case", "5"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("cano case 5: Pass"), "{out}");
    assert!(out.contains("input: "));
}
