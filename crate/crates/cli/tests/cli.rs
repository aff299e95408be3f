use std::io::Write;
use std::process::Command;

use nielsen_lab::group::FiniteGroup;
use nielsen_lab::invariants::rank;
use nielsen_lab::lattice::{enumerate, DEFAULT_BUDGET, DEFAULT_MAX_ORDER};
use nielsen_lab::normalize::ExactSequenceData;
use serde_json::Value;

const CORPUS: [&str; 10] = ["sym:3", "sym:4", "sym:5", "cyc:6", "ab:2,2", "ab:3,3", "lamp:3,2", "gl:2,3", "D4", "Q8"];

fn run(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_nielsen-lab")).args(args).output().unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let v = serde_json::from_str(&stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), v, stdout)
}

fn ok(args: &[&str]) -> Value {
    let (code, v, _) = run(args);
    assert_eq!(code, 0, "{args:?}");
    v["report"].clone()
}

fn ids(xs: &[u32]) -> String {
    xs.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

/// Deterministic filler entries so tuples are not just padded generators.
fn filler(order: usize, len: usize, salt: usize) -> Vec<u32> {
    (0..len).map(|i| ((i * 7 + salt * 13 + 5) % order) as u32).collect()
}

#[test]
fn documented_examples() {
    let r = ok(&["invariants", "--group", "sym:4"]);
    assert_eq!((r["ic"].as_u64(), r["cl"].as_u64()), (Some(3), Some(4)));
    let r = ok(&["constants", "--m", "1"]);
    assert_eq!(r["n"]["ceil"], "7");
    assert_eq!(r["jordan"], "1");
    let r = ok(&["orbits", "--group", "cyc:2", "--n", "2"]);
    assert_eq!(r["orbit_count"], 2);
    let r = ok(&["sp-reduce", "--g", "3", "--w", "1,2,3,4,5,6"]);
    assert_eq!(r["check"]["symplectic"], true);
    assert_eq!(r["image"], serde_json::json!([1, 0, 0, 0, 0, 0]));
    let r = ok(&["stabilize", "--g", "3", "--moduli", "2,3", "--v", "1,2;0,1;1,1;0,0;1,2;1,1"]);
    assert_eq!(r["check"], serde_json::json!({"symplectic": true, "last_pair_zero": true, "recomputed_matches": true}));
    let r = ok(&["sp-reduce", "--g", "1", "--w", "-3,5"]);
    assert_eq!(r["image"], serde_json::json!([1, 0]));
}

#[test]
fn reports_carry_schema_and_budgets() {
    let (_, v, _) = run(&["lattice", "--group", "Q8", "--cap", "77", "--max-order", "100"]);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "lattice");
    assert_eq!(v["budgets"]["cap"], 77);
    assert_eq!(v["budgets"]["max_order"], 100);
    assert_eq!(v["report"]["subgroups"].as_array().unwrap().len(), 6);
}

#[test]
fn json_reports_round_trip_byte_for_byte() {
    let cases: [&[&str]; 7] = [
        &["invariants", "--group", "D4"],
        &["lattice", "--group", "sym:3"],
        &["orbits", "--group", "ab:2,2", "--n", "2"],
        &["redundant", "--group", "sym:3", "--tuple", "1,2,3"],
        &["constants", "--m", "3"],
        &["walk", "--group", "cyc:3", "--n", "2", "--steps", "2000"],
        &["normalize", "--group", "sym:3", "--tuple", "1,2,3,4", "--mode", "jordan"],
    ];
    for args in cases {
        let (code, v, text) = run(args);
        assert_eq!(code, 0, "{args:?}");
        assert_eq!(format!("{}\n", serde_json::to_string_pretty(&v).unwrap()), text, "{args:?}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["invariants", "--group", "sym:0"]).0, 2);
    assert_eq!(run(&["invariants", "--group", "sym:4", "--bogus"]).0, 2);
    assert_eq!(run(&["normalize", "--group", "sym:3", "--tuple", "1,2", "--mode", "exseq"]).0, 2);
    assert_eq!(run(&["sp-reduce", "--g", "2", "--w", "2,4,6,8"]).0, 2);
    assert_eq!(run(&["stabilize", "--g", "2", "--moduli", "2,3", "--v", "1,1,1,1,1,1,1,1"]).0, 2);
    assert_eq!(run(&["orbits", "--group", "sym:4", "--n", "3", "--cap", "100"]).0, 3);
    let (code, v, _) = run(&["invariants", "--group", "sym:5", "--budget", "10"]);
    assert_eq!(code, 3);
    assert_eq!(v["report"]["partial"], true);
}

#[test]
fn walks_are_reproducible_and_thread_independent() {
    let a = ok(&["walk", "--group", "sym:3", "--n", "3", "--steps", "1e5", "--seed", "9", "--chains", "4"]);
    let b = ok(&["walk", "--group", "sym:3", "--n", "3", "--steps", "100000", "--seed", "9", "--chains", "4", "--threads", "1"]);
    assert_eq!(a, b);
    assert!(a["tv"].as_f64().unwrap() < 0.1);
}

#[test]
fn table_format_renders() {
    let (code, _, text) = run(&["orbits", "--group", "cyc:2", "--n", "2", "--format", "table"]);
    assert_eq!(code, 0);
    assert!(text.contains("orbit_count: 2"));
    assert!(text.contains("[orbits]"));
}

fn witness_file(v: &Value) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(serde_json::to_string(v).unwrap().as_bytes()).unwrap();
    f
}

fn assert_verifies(group: &str, report: &Value) {
    let f = witness_file(report);
    let r = ok(&["verify-witness", "--group", group, "--witness", f.path().to_str().unwrap()]);
    assert_eq!(r["valid"], true, "{group}: {report}");
}

#[test]
fn verify_witness_accepts_normalize_and_redundant_output() {
    for s in CORPUS {
        let g = FiniteGroup::parse(s).unwrap();
        let l = enumerate(&g, DEFAULT_MAX_ORDER, DEFAULT_BUDGET).unwrap();
        let data = ExactSequenceData::largest_abelian_kernel(&g, &l).unwrap();
        let (d, gens) = rank(&g);
        let ic = nielsen_lab::invariants::report(&g, &l, true, u64::MAX).unwrap().ic as usize;
        for salt in 0..3 {
            let mut epi = gens.clone();
            epi.extend(filler(g.order(), ic, salt));
            let mut modes = vec![("epi", epi)];
            modes.push(("exseq", filler(g.order(), data.redundancy_bound(), salt)));
            modes.push(("jordan", filler(g.order(), data.jordan_bound(), salt)));
            if g.is_abelian() {
                modes.push(("abelian", filler(g.order(), d as usize + 1, salt)));
            }
            for (mode, t) in modes {
                let r = ok(&["normalize", "--group", s, "--tuple", &ids(&t), "--mode", mode]);
                assert_verifies(s, &r);
            }
            if g.order() <= 24 {
                let t = filler(g.order(), d as usize + 1, salt);
                let r = ok(&["redundant", "--group", s, "--tuple", &ids(&t)]);
                if r["result"] == "redundant" {
                    assert_verifies(s, &r);
                }
            }
        }
    }
}

#[test]
fn verify_witness_rejects_tampering() {
    let r = ok(&["normalize", "--group", "sym:3", "--tuple", "1,2,3,4,5", "--mode", "jordan"]);
    let mut bad = r.clone();
    bad["target"] = serde_json::json!([0, 0, 0, 0, 0]);
    let f = witness_file(&bad);
    let (code, v, _) = run(&["verify-witness", "--group", "sym:3", "--witness", f.path().to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(v["report"]["valid"], false);
    // a move that kills a generator changes the image
    let moves = serde_json::json!([{"op": "rmul", "i": 1, "j": 1, "inv": true}]);
    let f = witness_file(&moves);
    let (code, _, _) = run(&["verify-witness", "--group", "sym:3", "--tuple", "1,2", "--witness", f.path().to_str().unwrap()]);
    assert_eq!(code, 2);
    let moves = serde_json::json!([{"op": "swap", "i": 1, "j": 2}]);
    let f = witness_file(&moves);
    let v = ok(&["verify-witness", "--group", "sym:3", "--tuple", "1,2", "--witness", f.path().to_str().unwrap()]);
    assert_eq!(v["endpoint"], serde_json::json!([2, 1]));
}
