use std::fs;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use std::io::Write;

fn satscale(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_satscale")).args(args).env_remove("SATSCALE_OUT").output().expect("spawn")
}

fn satscale_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_satscale"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_uses_threshold_clause_count() {
    let o = satscale(&["gen", "--family", "locked-1in3", "--n", "100", "--seed", "7"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().any(|l| l == "p native locked-1in3 100 79"), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("c ")).count(), 79);
    assert_eq!(text, stdout(&satscale(&["gen", "--family", "locked-1in3", "--n", "100", "--seed", "7"])));
}

#[test]
fn walksat_on_satisfied_formula_takes_no_flips() {
    let o = satscale_stdin(&["walksat", "--noise", "0.5"], "c trivially satisfied\np cnf 3 0\n");
    assert_eq!(o.status.code(), Some(0));
    let rec: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(rec["flips"], 0);
    assert_eq!(rec["solved"], true);
    for key in ["instance_id", "noise", "flips", "tries", "seed", "solved"] {
        assert!(rec.get(key).is_some(), "{key}");
    }
}

#[test]
fn file_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("raw.nat");
    let usa = dir.path().join("usa.nat");
    let cnf = dir.path().join("usa.cnf");
    assert!(satscale(&["gen", "--family", "locked-1in3", "--n", "24", "--count", "12", "--seed", "5", "-o", p(&raw)]).status.success());
    let f = satscale(&["filter", "-i", p(&raw), "-o", p(&usa)]);
    assert!(f.status.success());
    let kept = fs::read_to_string(&usa).unwrap();
    let n_kept = kept.lines().filter(|l| l.starts_with("p native")).count();
    assert!(n_kept > 0);
    assert_eq!(kept.lines().filter(|l| l.starts_with("s ")).count(), n_kept);
    assert!(satscale(&["encode", "-i", p(&usa), "-o", p(&cnf)]).status.success());
    let w = satscale(&["walksat", "-i", p(&cnf), "--seed", "3", "--runs", "3", "--id", "pipe"]);
    assert_eq!(w.status.code(), Some(0));
    let records: Vec<serde_json::Value> = stdout(&w).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(records.len(), 3);
    assert!(records.iter().all(|r| r["instance_id"] == "pipe" && r["solved"] == true));
    let s = satscale(&["solve", "-i", p(&usa), "--method", "dpll"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&s).trim()).unwrap();
    assert_eq!(v["count_class"], "one");
}

#[test]
fn solvers_agree_on_a_small_xorsat_file() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("x.nat");
    assert!(satscale(&["gen", "--family", "xorsat-poisson", "--n", "14", "--seed", "2", "--raw-parity", "-o", p(&inst)]).status.success());
    let classes: Vec<String> = ["dpll", "gf2", "brute"]
        .iter()
        .map(|m| {
            let o = satscale(&["solve", "-i", p(&inst), "--method", m]);
            assert!(o.status.success(), "{m}");
            let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
            v["count_class"].as_str().unwrap().to_string()
        })
        .collect();
    assert!(classes.windows(2).all(|w| w[0] == w[1]), "{classes:?}");
}

#[test]
fn study_is_byte_identical_across_reruns_and_workers() {
    let base = ["study", "--family", "xorsat-3reg", "--sizes", "12:24:4", "--per-size", "10", "--seed", "1"];
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    let extra: [&[&str]; 3] = [&[], &["--workers", "3"], &["--sequential"]];
    for (d, e) in dirs.iter().zip(extra) {
        let mut args = base.to_vec();
        args.extend_from_slice(&["--out-dir", p(d.path())]);
        args.extend_from_slice(e);
        let o = satscale(&args);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let summary: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
        assert_eq!(summary["study"], "xorsat-3reg_default");
    }
    let read = |d: &Path| {
        let mut v: Vec<_> = fs::read_dir(d).unwrap().map(|e| e.unwrap().path()).collect();
        v.sort();
        v.iter().map(|f| (f.file_name().unwrap().to_owned(), fs::read(f).unwrap())).collect::<Vec<_>>()
    };
    let first = read(dirs[0].path());
    assert_eq!(first.len(), 4);
    for d in &dirs[1..] {
        assert_eq!(read(d.path()), first);
    }
}

#[test]
fn fit_reads_a_study_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = satscale(&["study", "--family", "locked-1in3", "--sizes", "12,16,20,24", "--per-size", "8", "--out-dir", p(dir.path())]);
    assert!(o.status.success());
    let table = dir.path().join("locked-1in3_default_scaling.csv");
    let f = satscale(&["fit", "-i", p(&table), "--all"]);
    assert!(f.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&f).trim()).unwrap();
    assert_eq!(v["window"], serde_json::json!([12, 16, 20, 24]));
    assert!(v["mu"].is_number() && v["A"].is_number() && v["stderr"].is_number());
    let one = satscale(&["fit", "-i", p(&table), "--fit-from", "24"]);
    assert_eq!(one.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&one.stderr).contains("fit window < 3 points"));
}

#[test]
fn usa_curve_honours_output_env() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_satscale"))
        .args(["usa-curve", "--family", "xorsat-3reg", "--sizes", "16:32:8", "--trials", "50", "--seed", "4"])
        .env("SATSCALE_OUT", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    let csv = fs::read_to_string(dir.path().join("xorsat-3reg_usa.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,inv_n,trials,usa_count,p_usa,err,degenerate,undecided"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn exit_codes() {
    assert_eq!(satscale(&["gen", "--family", "locked-1in3"]).status.code(), Some(2));
    assert_eq!(satscale(&["gen", "--family", "locked-1in3", "--n", "9", "--bogus"]).status.code(), Some(2));
    assert_eq!(satscale(&["study", "--family", "xorsat-3reg", "--sizes", "9:3:1"]).status.code(), Some(2));
    assert_eq!(satscale(&["encode", "-i", "/definitely/not/here"]).status.code(), Some(4));
    let unsat = "p cnf 1 2\n1 0\n-1 0\n";
    assert_eq!(satscale_stdin(&["walksat", "--max-flips", "10", "--max-tries", "2"], unsat).status.code(), Some(3));
    let needs_branching = "p cnf 2 4\n1 2 0\n1 -2 0\n-1 2 0\n-1 -2 0\n";
    assert_eq!(satscale_stdin(&["solve", "--budget", "0"], needs_branching).status.code(), Some(3));
    assert_eq!(satscale_stdin(&["solve"], needs_branching).status.code(), Some(0));
    assert_eq!(satscale(&["--help"]).status.code(), Some(0));
}

#[test]
fn json_errors_are_structured() {
    let o = satscale(&["--json-errors", "encode", "-i", "/definitely/not/here"]);
    assert_eq!(o.status.code(), Some(4));
    let v: serde_json::Value = serde_json::from_str(String::from_utf8_lossy(&o.stderr).trim()).unwrap();
    assert_eq!(v["error"], "io");
    assert_eq!(v["exit_code"], 4);
    let o = satscale(&["gen", "--json-errors", "--family", "nope", "--n", "4"]);
    let v: serde_json::Value = serde_json::from_str(String::from_utf8_lossy(&o.stderr).trim()).unwrap();
    assert_eq!(v["error"], "usage");
}

/// Every flag the parser accepts is listed in its subcommand's help and in
/// the README.
#[test]
fn flags_are_documented() {
    let readme = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../README.md")).unwrap();
    let mut cmd = satscale_cli::command();
    let globals: Vec<String> = cmd.get_arguments().filter_map(|a| a.get_long()).map(|l| format!("--{l}")).collect();
    for flag in &globals {
        assert!(readme.contains(flag.as_str()), "README lacks global {flag}");
    }
    let subs: Vec<String> = cmd.get_subcommands().map(|s| s.get_name().to_string()).collect();
    assert_eq!(subs, ["gen", "filter", "encode", "solve", "walksat", "study", "usa-curve", "fit"]);
    for name in subs {
        let sub = cmd.find_subcommand_mut(&name).unwrap();
        let help = sub.render_long_help().to_string();
        let section = readme
            .split("\n### ")
            .find(|s| s.starts_with(&format!("`{name}`")))
            .unwrap_or_else(|| panic!("README has no section for {name}"));
        for arg in sub.get_arguments() {
            let Some(long) = arg.get_long() else { continue };
            if long == "help" || globals.contains(&format!("--{long}")) {
                continue;
            }
            let flag = format!("--{long}");
            assert!(help.contains(&flag), "{name} help lacks {flag}");
            assert!(section.contains(&format!("`{flag}")), "README section for {name} lacks {flag}");
        }
    }
}
