use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_covercount"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("covercount-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn file(&self, name: &str, text: &str) -> String {
        let p = self.0.join(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn counts_a_small_formula() {
    let s = Scratch::new("small");
    let f = s.file("tri.cnf", "c triangle\np cnf 3 3\n1 2 0\n2 3 0\n1 3 0\n");
    let out = run(&["count-cnf", &f, "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["count"], "4");
    assert_eq!(v["mode"], "adaptive");
    assert_eq!(v["n_vars"], 3);
    assert!(v.get("wall_time_ms").is_none());
    let exact = json(&run(&["exact", &f, "--json"]));
    assert_eq!(exact["count"], "4");
    assert_eq!(exact["input_digest"], v["input_digest"]);
}

#[test]
fn certified_and_heuristic_modes() {
    let s = Scratch::new("modes");
    let f = s.file("a.cnf", "p cnf 10 3\n1 2 0\n2 3 4 0\n5 6 0\n");
    let v = json(&run(&["count-cnf", &f, "--mode", "certified", "--epsilon", "0.1", "--json"]));
    assert_eq!(v["depth"], 407);
    assert!(v["guarantee"].as_str().unwrap().starts_with("certified"));
    let v = json(&run(&["count-cnf", &f, "--depth", "3", "--json"]));
    assert_eq!(v["mode"], "heuristic");
    assert_eq!(v["depth"], 3);
    assert_eq!(run(&["count-cnf", &f, "--mode", "heuristic"]).status.code(), Some(2));
}

#[test]
fn setcover_with_uncovered_element_counts_zero() {
    let s = Scratch::new("sc");
    let f = s.file("a.sc", "2 3\n1 2\n2\n");
    let v = json(&run(&["count-setcover", &f, "--json"]));
    assert_eq!(v["count"], "0");
    assert!(v["ln_count"].is_null());
    let f = s.file("b.sc", "2 2\n1 2\n2\n");
    // set 1 is the only one covering element 1; set 2 is optional
    assert_eq!(json(&run(&["count-setcover", &f, "--json"]))["count"], "2");
}

#[test]
fn matching_commands() {
    let s = Scratch::new("match");
    let tri = s.file("tri.hg", "3 3\n1 2\n2 3\n1 3\n");
    assert_eq!(json(&run(&["count-matching", &tri, "--json"]))["count"], "4");
    assert_eq!(run(&["count-3dm", &tri]).status.code(), Some(2));
    let h = s.file("h.hg", "6 2\n1 2 3\n3 4 5\n");
    assert_eq!(json(&run(&["count-3dm", &h, "--json"]))["count"], "3");
    let a = s.file("a.json", r#"{"n_vars": 3, "constraints": [[0, 1, 2]]}"#);
    // at most one of three variables is zero: 4 assignments
    assert_eq!(json(&run(&["count-matching", &a, "--json"]))["count"], "4");
}

#[test]
fn exit_codes() {
    let s = Scratch::new("exit");
    let neg = s.file("neg.cnf", "p cnf 2 1\n-1 2 0\n");
    let out = run(&["count-cnf", &neg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    let deg = s.file("deg.cnf", "p cnf 7 6\n1 2 0\n1 3 0\n1 4 0\n1 5 0\n1 6 0\n1 7 0\n");
    assert_eq!(run(&["count-cnf", &deg]).status.code(), Some(2));
    assert_eq!(run(&["count-cnf", "/nonexistent/x.cnf"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));

    let big = s.file("big.cnf", &String::from_utf8(run(&["gen", "cnf", "--seed", "1", "--vars", "40", "--count", "40"]).stdout).unwrap());
    assert_eq!(run(&["count-cnf", &big, "--depth", "12", "--node-budget", "10"]).status.code(), Some(3));
    assert_eq!(run(&["exact", &big, "--cap", "10"]).status.code(), Some(3));
    assert_eq!(run(&["verify-decay", "--resolution", "8"]).status.code(), Some(2));
}

#[test]
fn reports_are_deterministic_across_thread_counts() {
    let s = Scratch::new("det");
    let text = String::from_utf8(run(&["gen", "cnf", "--seed", "9", "--vars", "16", "--count", "20", "--max-size", "4"]).stdout).unwrap();
    let f = s.file("g.cnf", &text);
    let outputs: Vec<Vec<u8>> = ["1", "2", "1"]
        .iter()
        .map(|t| bin().env("COVERCOUNT_THREADS", t).args(["count-cnf", &f, "--json", "--seed", "9"]).output().unwrap().stdout)
        .collect();
    assert!(!outputs[0].is_empty());
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
    let timed = json(&run(&["count-cnf", &f, "--json", "--timing"]));
    assert!(timed["wall_time_ms"].as_f64().is_some());
}

#[test]
fn gen_is_seeded_and_parseable() {
    let a = run(&["gen", "matching", "--seed", "4", "--vars", "9", "--count", "8", "--min-size", "3"]).stdout;
    let b = run(&["gen", "matching", "--seed", "4", "--vars", "9", "--count", "8", "--min-size", "3"]).stdout;
    assert_eq!(a, b);
    let h = covercount::io::formats::parse_hypergraph(std::str::from_utf8(&a).unwrap()).unwrap();
    assert!(h.is_uniform(3));
    let sc = run(&["gen", "cnf", "--seed", "4", "--format", "setcover"]).stdout;
    assert!(covercount::io::formats::parse_setcover(std::str::from_utf8(&sc).unwrap()).is_ok());
}

#[test]
fn bench_and_verify_run() {
    let out = run(&["bench", "--instances", "3", "--vars", "8", "--count", "8", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["instances"].as_array().unwrap().len(), 3);
    assert!(v["worst_abs_ln_error"].as_f64().unwrap() < 0.01);
    let out = run(&["verify-decay"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
}

#[test]
fn reads_stdin() {
    use std::io::Write;
    let mut child = bin()
        .args(["count-cnf", "-", "--json"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"p cnf 2 1\n1 2 0\n").unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(json(&out)["count"], "3");
}
