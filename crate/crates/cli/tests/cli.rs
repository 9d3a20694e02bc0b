use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn walkscale(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_walkscale"))
        .args(args)
        .current_dir(dir)
        .env_remove("WALKSCALE_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn write_k4(dir: &Path) {
    std::fs::write(dir.join("k4.txt"), "1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n").unwrap();
}

#[test]
fn census_of_k4() {
    let dir = tempfile::tempdir().unwrap();
    write_k4(dir.path());
    let v = json_of(&walkscale(dir.path(), &["census", "--graph", "k4.txt", "--kmax", "5"]));
    let walks = &v["result"]["census"]["closed_walks"];
    // Tr A^k for K_4 is 3^k + 3 (-1)^k
    for k in 2..=5u32 {
        let expect = 3i64.pow(k) + 3 * (-1i64).pow(k);
        assert_eq!(walks[k.to_string()].as_i64().unwrap(), expect);
    }
    assert_eq!(v["result"]["census"]["cycles"]["3"], 4);
    assert_eq!(v["manifest"]["seed"], 0);
    assert_eq!(v["manifest"]["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn generate_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["generate", "--model", "er", "--n", "100", "--p", "0.1", "--seed", "7", "--out", "g.txt"];
    for d in [&a, &b] {
        assert!(walkscale(d.path(), &args).status.success());
    }
    let ga = std::fs::read(a.path().join("g.txt")).unwrap();
    let gb = std::fs::read(b.path().join("g.txt")).unwrap();
    assert_eq!(ga, gb);
    assert!(String::from_utf8(ga).unwrap().starts_with("# {\"tool\":\"walkscale\""));
}

#[test]
fn out_dir_override() {
    let cwd = tempfile::tempdir().unwrap();
    let target = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_walkscale"))
        .args(["generate", "--model", "pa", "--n", "30", "--out", "pa.txt"])
        .current_dir(cwd.path())
        .env("WALKSCALE_OUT_DIR", target.path())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(target.path().join("pa.txt").exists());
    assert!(!cwd.path().join("pa.txt").exists());
}

#[test]
fn predict_kernel_example() {
    let dir = tempfile::tempdir().unwrap();
    let v = json_of(&walkscale(
        dir.path(),
        &["predict", "--model", "kernel", "--n", "4096", "--rho", "0.00390625", "--k", "4"],
    ));
    assert_eq!(v["result"]["dominant"], serde_json::json!(["P3"]));
    assert!((v["result"]["k_star"].as_f64().unwrap() - 6.0).abs() < 1e-9);
}

#[test]
fn predict_nb_and_powerlaw() {
    let dir = tempfile::tempdir().unwrap();
    let v = json_of(&walkscale(dir.path(), &["predict", "--model", "nb", "--n", "4096", "--rho", "0.00390625", "--k", "6"]));
    assert_eq!(v["result"]["dominant"], serde_json::json!(["C6"]));
    let v = json_of(&walkscale(dir.path(), &["predict", "--model", "powerlaw", "--gamma", "0.2", "--beta", "0", "--k", "5"]));
    assert_eq!(v["result"]["labels"], serde_json::json!(["C_5"]));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    write_k4(dir.path());
    assert_eq!(walkscale(dir.path(), &["census", "--graph", "k4.txt", "--nope"]).status.code(), Some(1));
    assert_eq!(walkscale(dir.path(), &["frobnicate"]).status.code(), Some(1));
    assert_eq!(walkscale(dir.path(), &["generate", "--model", "er", "--n", "10"]).status.code(), Some(1));
    assert_eq!(walkscale(dir.path(), &["census", "--graph", "absent.txt"]).status.code(), Some(2));
    std::fs::write(dir.path().join("bad.txt"), "1 2 3\n").unwrap();
    assert_eq!(walkscale(dir.path(), &["census", "--graph", "bad.txt"]).status.code(), Some(2));
    assert_eq!(walkscale(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn summarize_writes_three_files_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert!(walkscale(p, &["generate", "--model", "er", "--n", "60", "--p", "0.2", "--seed", "3", "--out", "g.txt"])
        .status
        .success());
    let args = [
        "summarize", "--graph", "g.txt", "--kmax", "4", "--alpha", "0.2", "--sizes", "20,25", "--replicates", "30",
        "--seed", "5", "--out", "run",
    ];
    let first = walkscale(p, &args);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let read = |name: &str| std::fs::read(p.join(name)).unwrap();
    let (csv, json, svg) = (read("run.samples.csv"), read("run.violin.json"), read("run.violin.svg"));
    assert!(walkscale(p, &args).status.success());
    assert_eq!(csv, read("run.samples.csv"));
    assert_eq!(json, read("run.violin.json"));
    assert_eq!(svg, read("run.violin.svg"));
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().nth(1), Some("k,r,size,t"));
    assert_eq!(text.lines().count(), 2 + 3 * 30);
    let svg = String::from_utf8(svg).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<!-- {"));
    assert_eq!(svg.matches("<path").count(), 3);

    let from_csv = walkscale(p, &["render-violin", "--samples", "run.samples.csv", "--alpha", "0.2"]);
    assert!(from_csv.status.success());
    let from_json = walkscale(p, &["render-violin", "--violin", "run.violin.json"]);
    assert!(from_json.status.success());
    assert_eq!(String::from_utf8_lossy(&from_csv.stdout).matches("<path").count(), 3);
}

#[test]
fn select_sizes_and_rates() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(p.join("k.txt"), {
        let mut s = String::new();
        for i in 0..40 {
            for j in i + 1..40 {
                s.push_str(&format!("{i} {j}\n"));
            }
        }
        s
    })
    .unwrap();
    let v = json_of(&walkscale(p, &["select-sizes", "--graph", "k.txt", "--kmax", "4", "--alpha", "0.1", "--ns", "3"]));
    let sizes: Vec<u64> = v["result"]["sizes"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
    assert_eq!(sizes.len(), 3);
    assert!(sizes.windows(2).all(|w| w[0] <= w[1]));

    let v = json_of(&walkscale(p, &["rates", "--alphas", "0,1", "--log2-min", "5", "--log2-max", "6", "--budget", "7"]));
    let rows = v["result"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1]["predicted"], 1.0);
}

#[test]
fn build_networks() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(
        p.join("m.csv"),
        "user,timestamp,text,urls\nann,0,hello world,http://a\nbob,100,hello world!,http://a\ncat,500000,zzz,http://b\n",
    )
    .unwrap();
    let out = walkscale(p, &["build-network", "--mode", "url", "--messages", "m.csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>(), ["ann bob"]);
    let out = walkscale(p, &["build-network", "--mode", "editsim", "--messages", "m.csv", "--max-edit", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>(), ["ann bob"]);
}
