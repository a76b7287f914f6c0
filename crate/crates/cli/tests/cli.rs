use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hcm(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hcm"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn generate_triangles_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let spec = hcm(&["catalog", "triangle", "-o", "tri.json"], dir.path());
    assert!(spec.status.success());

    let args = [
        "--seed", "7", "generate", "tri.json", "-n", "4", "-o", "a.txt",
    ];
    let summary = json(&hcm(&args, dir.path()));
    assert_eq!(summary["E"], 18);
    assert_eq!(summary["N"], 12);
    assert_eq!(summary["manifest"]["seed"], 7);
    let first = std::fs::read(dir.path().join("a.txt")).unwrap();
    let text = String::from_utf8(first.clone()).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 18);
    assert!(text.lines().nth(1).unwrap().starts_with("# manifest {"));

    let again = json(&hcm(&args, dir.path()));
    assert_eq!(again, summary);
    assert_eq!(std::fs::read(dir.path().join("a.txt")).unwrap(), first);
}

#[test]
fn parity_repair_is_logged() {
    let dir = tempfile::tempdir().unwrap();
    let out = hcm(
        &[
            "generate",
            "--family",
            "single_vertex",
            "--param",
            "k=3",
            "-n",
            "5",
            "-o",
            "g.txt",
        ],
        dir.path(),
    );
    // Five odd communities can never be evened out by redrawing the last.
    assert_eq!(out.status.code(), Some(2));

    let spec = r#"{"communities":[
        {"prob":0.5,"size":1,"out_stubs":[1]},
        {"prob":0.5,"size":1,"out_stubs":[2]}]}"#;
    std::fs::write(dir.path().join("mix.json"), spec).unwrap();
    let mut logged = false;
    for seed in 0..20 {
        let seed = seed.to_string();
        let out = hcm(
            &[
                "--seed", &seed, "generate", "mix.json", "-n", "9", "-o", "g.txt",
            ],
            dir.path(),
        );
        let summary = json(&out);
        if summary["parity_redraws"].as_u64().unwrap() > 0 {
            assert!(String::from_utf8_lossy(&out.stderr).contains("parity repair"));
            logged = true;
        }
    }
    assert!(logged);
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{not json").unwrap();
    assert_eq!(
        hcm(&["threshold", "bad.json"], dir.path()).status.code(),
        Some(2)
    );
    let unnormalized = r#"{"communities":[{"prob":0.5,"size":1,"out_stubs":[3]}]}"#;
    std::fs::write(dir.path().join("half.json"), unnormalized).unwrap();
    let out = hcm(&["generate", "half.json", "-n", "3"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    assert_eq!(
        hcm(&["catalog", "nonsense"], dir.path()).status.code(),
        Some(2)
    );
    assert_eq!(hcm(&["giant"], dir.path()).status.code(), Some(2));
}

#[test]
fn threshold_of_star_endpoints() {
    let dir = tempfile::tempdir().unwrap();
    let out = json(&hcm(
        &["threshold", "--family", "star_endpoints", "--param", "L=9"],
        dir.path(),
    ));
    let pi_c = out["pi_c"].as_f64().unwrap();
    assert!((pi_c - 0.5).abs() < 1e-9);
}

#[test]
fn giant_at_full_retention_matches_unpercolated() {
    let dir = tempfile::tempdir().unwrap();
    let src = ["--family", "household", "--param", "k=4"];
    let plain = json(&hcm(&[&["giant"][..], &src].concat(), dir.path()));
    let full = json(&hcm(
        &[&["giant"][..], &src, &["--pi", "1"]].concat(),
        dir.path(),
    ));
    let a = plain["analytic"]["vertex_fraction"].as_f64().unwrap();
    let b = full["analytic"]["fraction"].as_f64().unwrap();
    assert!(a > 0.5);
    assert!((a - b).abs() < 1e-9);
}

#[test]
fn sweep_flips_critical_order() {
    let dir = tempfile::tempdir().unwrap();
    let read = |a: &str| -> Vec<(f64, f64)> {
        let out = hcm(
            &[
                "sweep",
                "--family",
                "clique_degree",
                "--param",
                &format!("a={a}"),
                "--param",
                "gamma3=0",
                "--vary",
                "gamma3=0,1",
            ],
            dir.path(),
        );
        assert!(out.status.success());
        String::from_utf8(out.stdout)
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with('#'))
            .skip(1)
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                (f[0].parse().unwrap(), f[1].parse().unwrap())
            })
            .collect()
    };
    let low = read("0.75");
    let high = read("0.95");
    assert!(low[1].1 < low[0].1 - 0.01, "{low:?}");
    assert!(high[1].1 > high[0].1 + 0.01, "{high:?}");
}

#[test]
fn sweep_over_pi_with_simulation() {
    let dir = tempfile::tempdir().unwrap();
    let out = hcm(
        &[
            "sweep",
            "--family",
            "star_endpoints",
            "--param",
            "L=9",
            "--pi",
            "0.3,0.9",
            "--replicates",
            "2",
            "--mc-n",
            "2000",
            "-o",
            "s.csv",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert!(text.starts_with("# manifest {"));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][3], 0.0);
    assert!(rows[0][4] < 0.01);
    assert!((rows[1][3] - rows[1][4]).abs() < 0.05);
}

#[test]
fn analyze_routes_metrics_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let gen = hcm(
        &[
            "generate", "--family", "triangle", "-n", "3000", "-o", "g.txt",
        ],
        dir.path(),
    );
    assert!(gen.status.success());
    let out = json(&hcm(&["analyze", "g.txt", "--csv-dir", "csv"], dir.path()));
    assert_eq!(out["vertex_count"], 9000);
    if out["simple"].as_bool().unwrap() {
        let c = out["clustering"].as_f64().unwrap();
        assert!((c - 1.0 / 3.0).abs() < 0.03);
    } else {
        assert!(out["clustering_error"]
            .as_str()
            .unwrap()
            .contains("not simple"));
    }
    for name in ["degree.csv", "components.csv", "clustering.csv", "tail.csv"] {
        let text = std::fs::read_to_string(dir.path().join("csv").join(name)).unwrap();
        assert!(text.starts_with("# manifest {"), "{name}");
    }

    let gen = hcm(
        &[
            "generate",
            "--family",
            "single_vertex",
            "--param",
            "k=4",
            "-n",
            "50",
            "-o",
            "m.txt",
        ],
        dir.path(),
    );
    assert!(gen.status.success());
    let out = json(&hcm(&["analyze", "m.txt"], dir.path()));
    if !out["simple"].as_bool().unwrap() {
        assert!(out["clustering"].is_null());
        assert!(!out["clustering_error"].is_null());
    }
}

#[test]
fn triangle_model_clusters_have_size_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = json(&hcm(
        &[
            "newman",
            "--edge-pmf",
            "0:0.8,1:0.2",
            "--tri-pmf",
            "1:1",
            "-n",
            "3000",
            "--edges",
            "nw.txt",
        ],
        dir.path(),
    ));
    assert_eq!(out["clusters"]["size_biased_mean"], 3.0);
    assert_eq!(out["expected_cluster_size"], 3.0);
    assert_eq!(out["has_giant"], false);
    assert!(dir.path().join("nw.txt").exists());
}
