use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ndlab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ndlab")).current_dir(dir).args(args).output().expect("binary runs")
}

fn report(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn edgeless_mis_returns_every_node() {
    let dir = tempfile::tempdir().unwrap();
    let out = ndlab(dir.path(), &["run", "--algorithm", "mis", "--family", "er:100:0", "--out", "is.txt", "--report", "r.json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let ids = std::fs::read_to_string(dir.path().join("is.txt")).unwrap();
    assert_eq!(ids.lines().count(), 100);
    let r = report(&dir.path().join("r.json"));
    assert_eq!(r["passed"], true);
    assert_eq!(r["result"]["size"], 100);
}

#[test]
fn path_decomposition_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = ndlab(
        dir.path(),
        &["run", "--algorithm", "net-decomp", "--family", "path:50", "--mode", "desk", "--out", "nd.txt", "--report", "r.json"],
    );
    assert!(out.status.success());
    let r = report(&dir.path().join("r.json"));
    assert_eq!(r["result"]["uncolored"], 0);
    assert!(r["result"]["colors_used"].as_u64().unwrap() >= 1);
    assert!(r["result"]["max_component_diameter"].is_u64());
    assert_eq!(r["config"]["mode"], "desk-scaled");
    assert!(r["config"]["overridden_constants"].as_array().unwrap().iter().any(|c| c["name"] == "nd_base_floor"));
    assert!(!r["ledger"]["charging_rules"].as_array().unwrap().is_empty());
    let raw = std::fs::read_to_string(dir.path().join("r.json")).unwrap();
    let order: Vec<usize> = ["\"tool\"", "\"config\"", "\"verification\"", "\"ledger\"", "\"wall_clock_ms\""]
        .iter()
        .map(|k| raw.find(k).unwrap())
        .collect();
    assert!(order.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn replay_is_byte_identical() {
    let runs: Vec<(Vec<u8>, String)> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().unwrap();
            let args = ["run", "--algorithm", "mis", "--family", "er:300:0.03", "--seed", "4", "--out", "is.txt", "--report", "r.json"];
            assert!(ndlab(dir.path(), &args).status.success());
            let raw = std::fs::read_to_string(dir.path().join("r.json")).unwrap();
            let report = raw.lines().filter(|l| !l.contains("\"wall_clock_ms\"")).collect::<Vec<_>>().join("\n");
            (std::fs::read(dir.path().join("is.txt")).unwrap(), report)
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn adjacent_pair_fails_naming_the_edge() {
    let dir = tempfile::tempdir().unwrap();
    assert!(ndlab(dir.path(), &["gen", "--family", "path:5", "--out", "g.txt"]).status.success());
    std::fs::write(dir.path().join("is.txt"), "1\n3\n4\n").unwrap();
    let out = ndlab(dir.path(), &["verify", "--graph", "g.txt", "--artifact", "is.txt", "--kind", "is", "--report", "v.json"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&dir.path().join("v.json"));
    assert_eq!(r["passed"], false);
    assert_eq!(r["verification"][0]["counterexample"], "edge 3 4 has both ends in the set");
}

#[test]
fn recolored_node_fails_naming_the_bound() {
    let dir = tempfile::tempdir().unwrap();
    assert!(ndlab(dir.path(), &["gen", "--family", "grid:6x6", "--out", "g.txt"]).status.success());
    let out = ndlab(dir.path(), &["run", "--algorithm", "net-decomp", "--graph", "g.txt", "--out", "nd.txt", "--report", "r.json"]);
    assert!(out.status.success());
    let ok = ndlab(dir.path(), &["verify", "--graph", "g.txt", "--artifact", "nd.txt", "--kind", "nd", "--report", "v.json"]);
    assert!(ok.status.success());
    let text = std::fs::read_to_string(dir.path().join("nd.txt")).unwrap();
    let planted: String = text.lines().map(|l| if l.starts_with("7 ") { "7 100000" } else { l }).collect::<Vec<_>>().join("\n");
    std::fs::write(dir.path().join("bad.txt"), planted).unwrap();
    let out = ndlab(dir.path(), &["verify", "--graph", "g.txt", "--artifact", "bad.txt", "--kind", "nd", "--report", "v.json"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("node 7 has color 100000, outside the budget C(N)"), "{stderr}");
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.cfg"),
        "# sample\nalgorithm = ruling-set\nfamily = clique:10\nseed = 3\nset.rs_min_degree = 4\n",
    )
    .unwrap();
    let out = ndlab(dir.path(), &["run", "--config", "run.cfg", "--family", "star:40", "--set", "rs_min_degree=8", "--report", "r.json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&dir.path().join("r.json"));
    assert_eq!(r["config"]["graph"], "star:40");
    assert_eq!(r["config"]["seed"], 3);
    assert_eq!(r["config"]["set"]["rs_min_degree"], "8");
    assert_eq!(r["config"]["constants"]["rs_min_degree"], "8");
}

#[test]
fn bad_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(ndlab(dir.path(), &["run", "--algorithm", "mis", "--family", "nope:3"]).status.code(), Some(2));
    assert_eq!(
        ndlab(dir.path(), &["run", "--algorithm", "mis", "--family", "path:3", "--set", "bogus=1"]).status.code(),
        Some(2)
    );
    std::fs::write(dir.path().join("g.txt"), "1 2\n").unwrap();
    std::fs::write(dir.path().join("is.txt"), "5\n").unwrap();
    let out = ndlab(dir.path(), &["verify", "--graph", "g.txt", "--artifact", "is.txt", "--kind", "is"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bench_prints_one_line_per_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = ndlab(
        dir.path(),
        &["bench", "--algorithm", "luby", "--family", "path:20", "--family", "cycle:30", "--seeds", "2"],
    );
    assert!(out.status.success());
    let lines: Vec<Value> =
        String::from_utf8(out.stdout).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 4);
    assert!(lines.iter().all(|l| l["passed"] == true));
}
