use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use tempfile::TempDir;
use univcat::cli::{run, Outcome};

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p
}

fn univcat(args: &[&str]) -> Outcome {
    run(std::iter::once("univcat").chain(args.iter().copied()))
}

fn parsed(o: &Outcome) -> Value {
    serde_json::from_str(&o.stdout).unwrap_or_else(|e| panic!("{e}: {o:?}"))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn regular_c2() -> Value {
    json!({
        "objects": ["l"],
        "arrows": [{"id": "s", "src": "l", "dst": "l"}],
        "ring": "Z",
        "values": {"l": 2},
        "matrices": {"s": {"rows": 2, "cols": 2, "entries": [[0, 1], [1, 0]]}}
    })
}

#[test]
fn snf() {
    let d = TempDir::new().unwrap();
    let m = write(d.path(), "m.json", &json!([[2, 4], [6, 8]]));
    let o = univcat(&["snf", p(&m)]);
    assert_eq!(o.code, 0);
    assert_eq!(parsed(&o)["diagonal"], json!([2, 4]));
    let id = write(d.path(), "id.json", &json!({"rows": 2, "cols": 2, "entries": [[1, 0], [0, 1]]}));
    let o = univcat(&["snf", p(&id)]);
    assert_eq!(parsed(&o)["s"], json!({"rows": 2, "cols": 2, "entries": [[1, 0], [0, 1]]}));
    let bad = d.path().join("bad.json");
    std::fs::write(&bad, "[[2, 4],\n [6, 8\n").unwrap();
    let o = univcat(&["snf", p(&bad)]);
    assert_ne!(o.code, 0);
    assert!(o.stderr.contains("line"), "{}", o.stderr);
}

#[test]
fn end() {
    let d = TempDir::new().unwrap();
    let rep = write(d.path(), "rep.json", &regular_c2());
    let o = univcat(&["end", p(&rep)]);
    assert_eq!(o.code, 0);
    assert_eq!(parsed(&o)["dim"], 2);
    let single = write(
        d.path(),
        "single.json",
        &json!({"objects": ["p"], "ring": "Z", "values": {"p": 3}}),
    );
    assert_eq!(parsed(&univcat(&["end", p(&single), "--stage", "p"]))["dim"], 9);
    let o = univcat(&["end", p(&rep), "--stage", "nowhere"]);
    assert_ne!(o.code, 0);
    assert!(o.stderr.contains("valid stages") && o.stderr.contains('l'), "{}", o.stderr);
    let q = univcat(&["--ring", "Q", "end", p(&rep)]);
    assert_eq!(parsed(&q)["ring"], "Q");
}

#[test]
fn homology_and_les() {
    let d = TempDir::new().unwrap();
    let circle = write(
        d.path(),
        "circle.json",
        &json!({"vertices": ["v"], "edges": [{"id": "e", "a": "v", "b": "v"}]}),
    );
    let o = univcat(&["homology", p(&circle)]);
    assert_eq!(o.code, 0);
    assert_eq!(parsed(&o)["rank"], 1);
    let interval = json!({
        "vertices": ["v0", "v1"],
        "edges": [{"id": "e", "a": "v0", "b": "v1"}],
        "Y": {"vertices": ["v0", "v1"]},
        "Z": {"vertices": ["v0"]}
    });
    let i = write(d.path(), "interval.json", &interval);
    let o = univcat(&["homology", p(&i)]);
    assert_eq!(parsed(&o)["group"], json!({"free_rank": 1, "torsion": []}));
    let o = univcat(&["les-check", p(&i)]);
    assert_eq!(o.code, 0, "{o:?}");
    assert_eq!(parsed(&o)["verdict"], "PASS");
    let bad = write(
        d.path(),
        "bad.json",
        &json!({"vertices": ["v0", "v1"], "edges": [{"id": "e", "a": "v0", "b": "v1"}], "Y": {"edges": ["e"]}}),
    );
    let o = univcat(&["homology", p(&bad)]);
    assert_ne!(o.code, 0);
    assert!(o.stderr.contains("invalid"), "{}", o.stderr);
}

#[test]
fn galois_criterion() {
    let d = TempDir::new().unwrap();
    let dir = d.path().join("s3");
    let o = univcat(&["--quiet", "galois", "S3", "--dir", p(&dir)]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.is_empty());
    let rep = dir.join("representation.json");
    let target = dir.join("target.json");
    let o = univcat(&["criterion", p(&rep), p(&target), p(&dir.join("maps.json"))]);
    assert_eq!(o.code, 0, "{o:?}");
    assert_eq!(parsed(&o)["overall"], "PASS");
    let o = univcat(&["criterion", p(&rep), p(&target), p(&dir.join("maps_non_equivariant.json"))]);
    assert_eq!(o.code, 1);
    let v = parsed(&o);
    assert_eq!(v["overall"], "FAIL");
    assert_eq!(v["conditionC"]["status"], "FAIL");
    let items = v["conditionC"]["items"].as_array().unwrap();
    assert!(items.iter().any(|i| i["status"] == "FAIL" && i.get("kernelGen").is_some()));

    // without a coproduct table condition (a) cannot be checked
    let mut bare: Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    bare["coproducts"] = json!([]);
    let bare = write(d.path(), "bare.json", &bare);
    let o = univcat(&["criterion", p(&bare), p(&target), p(&dir.join("maps.json"))]);
    assert_ne!(o.code, 0);
    let v = parsed(&o);
    assert_eq!(v["conditionA"]["status"], "NOT-CHECKED");
    assert_ne!(v["overall"], "PASS");
}

#[test]
fn swap_violating_map_fails_condition_c() {
    let d = TempDir::new().unwrap();
    let rep = write(d.path(), "rep.json", &regular_c2());
    let target = write(
        d.path(),
        "target.json",
        &json!({
            "algebra": {
                "dim": 2,
                "structure": [[0, 0, 0, 1], [0, 1, 1, 1], [1, 0, 1, 1], [1, 1, 0, 1]],
                "unit": [1, 0]
            },
            "modules": {"R": {"generators": 2, "action": [
                {"rows": 2, "cols": 2, "entries": [[1, 0], [0, 1]]},
                {"rows": 2, "cols": 2, "entries": [[0, 1], [1, 0]]}
            ]}},
            "S": {"l": "R"}
        }),
    );
    let maps = write(
        d.path(),
        "maps.json",
        &json!({"maps": [{"name": "first", "object": "l", "matrix": {"rows": 1, "cols": 2, "entries": [[1, 0]]}}]}),
    );
    let o = univcat(&["criterion", p(&rep), p(&target), p(&maps)]);
    let v = parsed(&o);
    assert_eq!(v["conditionC"]["status"], "FAIL", "{v}");
    assert_ne!(o.code, 0);
}

#[test]
fn tower() {
    let d = TempDir::new().unwrap();
    let rep = write(d.path(), "rep.json", &regular_c2());
    let stage = json!({"objects": ["l"], "arrows": ["s"]});
    let chain = write(d.path(), "chain.json", &json!({"stages": [stage, stage]}));
    let o = univcat(&["tower", p(&rep), p(&chain)]);
    assert_eq!(o.code, 0, "{o:?}");
    let v = parsed(&o);
    assert_eq!(v["traces"][0]["flag"], "STABILIZED");
    assert_eq!(v["traces"][0]["stage"], 1);
    let shrinking = write(
        d.path(),
        "shrink.json",
        &json!({"stages": [stage, {"objects": ["l"], "arrows": []}]}),
    );
    let o = univcat(&["tower", p(&rep), p(&shrinking)]);
    assert_ne!(o.code, 0);
    assert!(o.stderr.contains("not increasing"), "{}", o.stderr);
}

#[test]
fn hom_and_output_file() {
    let d = TempDir::new().unwrap();
    let swap = json!({"rows": 2, "cols": 2, "entries": [[0, 1], [1, 0]]});
    let m = write(d.path(), "m.json", &json!({"generators": 2, "action": [swap]}));
    let t = write(d.path(), "t.json", &json!({"generators": 1, "action": [{"rows": 1, "cols": 1, "entries": [[1]]}]}));
    let out = d.path().join("hom.json");
    let o = univcat(&["hom", p(&m), p(&m), "--out", p(&out)]);
    assert_eq!(o.code, 0, "{o:?}");
    assert_eq!(parsed(&o)["rank"], 2);
    assert_eq!(std::fs::read_to_string(&out).unwrap(), o.stdout);
    let o = univcat(&["hom", p(&m), p(&t)]);
    assert_eq!(parsed(&o)["rank"], 1, "{o:?}");
}

#[test]
fn output_is_deterministic() {
    let d = TempDir::new().unwrap();
    let dir = d.path().join("c2xc2");
    univcat(&["--quiet", "galois", "C2xC2", "--dir", p(&dir)]);
    let files = ["representation.json", "target.json", "maps.json"].map(|f| dir.join(f));
    let args = ["criterion", p(&files[0]), p(&files[1]), p(&files[2])];
    let a = univcat(&args);
    let b = univcat(&args);
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout, b.stdout);
}
