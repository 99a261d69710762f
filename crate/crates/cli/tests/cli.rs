use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use powalt_cli::Report;

const BIN: &str = env!("CARGO_BIN_EXE_powalt");

fn inputs(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("inputs").join(name).display().to_string()
}

fn facts(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/facts").join(name).display().to_string()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("powalt-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn powalt_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("POWALT_PROFILE");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        code: out.status.code().expect("exited normally"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn powalt(args: &[&str]) -> Run {
    powalt_env(args, &[])
}

/// Runs with `--json` and returns the run plus the parsed report.
fn with_json(name: &str, args: &[&str]) -> (Run, Report, String) {
    let path = scratch(&format!("{name}.json"));
    let p = path.display().to_string();
    let mut all: Vec<&str> = args.to_vec();
    all.extend(["--json", &p]);
    let run = powalt(&all);
    let text = fs::read_to_string(&path).unwrap_or_else(|_| panic!("no JSON written; stderr: {}", run.stderr));
    let report = Report::from_json(&text).unwrap();
    (run, report, text)
}

#[test]
fn exponent_of_the_path() {
    let r = powalt(&["exponent", "--graph", &inputs("path34.gv")]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("(m = 3): m' = 6"));
    assert!(r.stdout.contains("(m = 4): m' = 2"));
    assert!(r.stdout.contains("\nN = 6\n"));
}

#[test]
fn stabilisation_probe_on_the_solvable_example() {
    let r = powalt(&["probe-stabilisation", "--gog", &inputs("bs12.json"), "--ray", "b", "--window", "4"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("StrictDecreaseWitness <a> ⊋ <a^2> ⊋ <a^4> ⊋ <a^8>"), "{}", r.stdout);
    assert!(r.stdout.contains("H_3 = <a^8> (γ of length 3), separated by a^8"));
}

#[test]
fn elliptic_pair_in_the_free_product() {
    let r = powalt(&["pair-check", "--gog", &inputs("trivial-amalgam.json"), "--g", "a", "--h", "b"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("case: elliptic-elliptic"));
    assert!(r.stdout.contains("n = 1, verified to length L = 10"), "{}", r.stdout);
}

#[test]
fn reports_round_trip_through_json() {
    let cases: Vec<(&str, Vec<String>)> = vec![
        ("classify", vec!["classify-graph".into(), "--graph".into(), inputs("square3.gv")]),
        ("exponent", vec!["exponent".into(), "--graph".into(), inputs("path34.gv")]),
        ("split", vec!["split".into(), "--graph".into(), inputs("square3.gv")]),
        ("reduce", vec!["reduce".into(), "--graph".into(), inputs("path34.gv")]),
        ("dihedral", vec!["dihedral".into(), "--m".into(), "4".into()]),
        ("upa", vec!["upa-derive".into(), "--facts".into(), facts("braid3.json")]),
        (
            "probe",
            vec!["probe-stabilisation".into(), "--gog".into(), inputs("bs12.json"), "--ray".into(), "b".into()],
        ),
        (
            "law",
            vec!["law-check".into(), "--gog".into(), inputs("bs12.json"), "--law".into(), "[[x,y],[z,w]]".into(), "--samples".into(), "20".into()],
        ),
        (
            "pair",
            vec!["pair-check".into(), "--gog".into(), inputs("a3_b_a4.json"), "--g".into(), "a".into(), "--h".into(), "c".into()],
        ),
    ];
    for (name, args) in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (run, report, text) = with_json(name, &args);
        assert_eq!(report.render(), run.stdout, "{name}: text rendering differs after a JSON round trip");
        assert_eq!(report.to_json(), text, "{name}: JSON is not canonical");
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["law-check", "--graph", &inputs("path34.gv"), "--law", "[x,y]", "--samples", "30"];
    let (a, b) = (powalt(&args), powalt(&args));
    assert_eq!(a.stdout, b.stdout);
    let (_, _, j1) = with_json("det1", &["reduce", "--graph", &inputs("square3.gv")]);
    let (_, _, j2) = with_json("det2", &["reduce", "--graph", &inputs("square3.gv")]);
    assert_eq!(j1, j2);
}

#[test]
fn emitted_certificates_replay() {
    let (run, report, _) = with_json("growth", &["growth", "--graph", &inputs("path34.gv"), "--m", "6", "--max-word-len", "8"]);
    assert_eq!(run.code, 0);
    let cert = scratch("growth-cert.json");
    fs::write(&cert, report.data["certificate"].to_string()).unwrap();
    let v = powalt(&["certify-verify", "--cert", &cert.display().to_string()]);
    assert_eq!(v.code, 0, "{}{}", v.stdout, v.stderr);
    assert!(v.stdout.contains("replayed to length 8: 3280 reduced words"), "{}", v.stdout);

    let (_, report, _) = with_json("pair", &["pair-check", "--gog", &inputs("trivial-amalgam.json"), "--g", "a^2", "--h", "b*a*b^-1"]);
    fs::write(&cert, report.data["verdict"].to_string()).unwrap();
    let v = powalt(&["certify-verify", "--cert", &cert.display().to_string()]);
    assert_eq!(v.code, 0, "{}{}", v.stdout, v.stderr);
    assert!(v.stdout.contains("ping-pong: passed"));
}

#[test]
fn tampered_certificate_is_rejected() {
    let (_, report, _) = with_json("tamper", &["pair-check", "--gog", &inputs("trivial-amalgam.json"), "--g", "a", "--h", "b"]);
    let mut c = report.data["verdict"].clone();
    c["h"] = "a^2".into();
    c.as_object_mut().unwrap().remove("ping_pong");
    let cert = scratch("tampered.json");
    fs::write(&cert, c.to_string()).unwrap();
    let v = powalt(&["certify-verify", "--cert", &cert.display().to_string()]);
    assert_eq!(v.code, 2);
    assert!(v.stdout.contains("certify-verify: rejected"));
    assert!(v.stdout.contains("trivial word"));
}

#[test]
fn exit_codes_follow_the_contract() {
    // Unknown verdict.
    let r = powalt(&["pair-check", "--gog", &inputs("bs12.json"), "--g", "a", "--h", "b"]);
    assert_eq!(r.code, 2);
    assert!(r.stdout.contains("Unknown (stabilisation-unverified)"));
    // Parse errors name the token and its position.
    let r = powalt(&["pair-check", "--gog", &inputs("bs12.json"), "--g", "a*%", "--h", "b"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("position 2 near `%`"), "{}", r.stderr);
    let r = powalt(&["pair-check", "--gog", &inputs("bs12.json"), "--g", "q", "--h", "b"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("`q`"), "{}", r.stderr);
    assert_eq!(powalt(&["exponent", "--graph", "/nonexistent/graph.gv"]).code, 1);
    assert_eq!(powalt(&["no-such-command"]).code, 1);
    assert_eq!(powalt(&["exponent"]).code, 1);
    // Two group sources at once.
    let g = inputs("bs12.json");
    assert_eq!(powalt(&["law-check", "--gog", &g, "--graph", &g, "--law", "x"]).code, 1);
    assert_eq!(powalt(&["--help"]).code, 0);
}

#[test]
fn malformed_graph_reports_position() {
    let bad = scratch("bad.gv");
    fs::write(&bad, "graph g {\n  a -- b [label=x];\n}\n").unwrap();
    let r = powalt(&["classify-graph", "--graph", &bad.display().to_string()]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("bad.gv") && r.stderr.contains("position"), "{}", r.stderr);
}

#[test]
fn failed_derivation_is_unknown() {
    let f = scratch("missing.json");
    fs::write(
        &f,
        r#"{"schema_version": 1, "goal": {"group": "G", "class": "upa"},
            "facts": [{"subject": "G", "assertion": {"kind": "direct_product_of", "factors": ["H", "K"]}},
                      {"subject": "H", "assertion": {"kind": "free", "rank": 2}},
                      {"subject": "K", "assertion": {"kind": "bounded_torsion", "bound": 2}}]}"#,
    )
    .unwrap();
    let r = powalt(&["upa-derive", "--facts", &f.display().to_string()]);
    assert_eq!(r.code, 2, "{}{}", r.stdout, r.stderr);
    assert!(r.stdout.contains("no derivation of G ∈ UPA"));
    let r = powalt(&["upa-derive", "--facts", &facts("f2xf2.json"), "--goal", "F2", "--class", "upa0"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("F2 ∈ UPA_0"));
}

#[test]
fn budget_profile_and_overrides() {
    let args = ["pair-check", "--gog", &inputs("trivial-amalgam.json"), "--g", "a", "--h", "b"];
    let quick = powalt_env(&args, &[("POWALT_PROFILE", "quick")]);
    assert!(quick.stdout.contains("verified to length L = 8"), "{}", quick.stdout);
    let mut over = args.to_vec();
    over.extend(["--max-word-len", "6"]);
    let r = powalt_env(&over, &[("POWALT_PROFILE", "quick")]);
    assert!(r.stdout.contains("verified to length L = 6"));
    assert_eq!(powalt_env(&args, &[("POWALT_PROFILE", "lavish")]).code, 1);
    let r = powalt(&["--jobs", "1", "exponent", "--graph", &inputs("path34.gv")]);
    assert_eq!(r.code, 0);
}

#[test]
fn every_claim_carries_provenance() {
    for args in [
        vec!["classify-graph".to_string(), "--graph".into(), inputs("path34.gv")],
        vec!["dihedral".into(), "--m".into(), "6".into()],
        vec!["upa-derive".into(), "--facts".into(), facts("free_by_z.json")],
        vec!["split".into(), "--graph".into(), inputs("path34.gv")],
    ] {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let r = powalt(&args);
        assert_eq!(r.code, 0, "{args:?}: {}", r.stderr);
        assert!(r.stdout.contains("provenance:\n  - "), "{args:?}");
        assert!(r.stdout.contains("BY-RULE") || r.stdout.contains("UNVERIFIED") || r.stdout.contains("exhaustive"), "{args:?}");
    }
}
