use dulab_core::ensembles::{postselect, EnsembleKind, EnsembleParams, UnitarySample};
use dulab_core::numkit::{read_cmat, ComplexMatrix};
use dulab_core::spectra::{count_clusters, kappa_cr, DEFAULT_GAP_FACTOR};
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dulab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dulab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("DULAB_JOBS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], out: &Path) {
    let o = dulab(args, out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path)
        .unwrap()
        .records()
        .map(Result::unwrap)
        .collect()
}

#[test]
fn spectrum_writes_one_file_per_kappa_and_seed() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        &[
            "spectrum",
            "--ensemble",
            "cue",
            "--L",
            "4",
            "--r",
            "5",
            "--kappa",
            "0.1,0.5,0.8",
            "--seeds",
            "11:2",
        ],
        dir.path(),
    );
    let meta = json(&dir.path().join("spectrum.json"));
    let files = meta["files"].as_array().unwrap();
    assert_eq!(files.len(), 6);
    for f in files {
        let path = dir.path().join(f.as_str().unwrap());
        let table = rows(&path);
        assert_eq!(table.len(), 256);
        assert_eq!(table.iter().filter(|r| &r[7] == "1").count(), 1);
    }
    let header = fs::read_to_string(dir.path().join("spectrum_k000_s000.csv")).unwrap();
    assert!(header.starts_with("seed,ensemble,L,r,kappa,re,im,is_trivial\n"));
    let predictions = meta["metadata"]["predictions"].as_array().unwrap();
    assert_eq!(predictions.len(), 3);
    assert!(predictions[0]["r_plus_pred"].as_f64().unwrap() > predictions[2]["r_plus_pred"].as_f64().unwrap());
}

#[test]
fn unitary_spectrum_rows_lie_on_the_circle() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["spectrum", "--L", "3", "--r", "2", "--kappa", "0"], dir.path());
    for r in rows(&dir.path().join("spectrum_k000_s000.csv")) {
        let (re, im): (f64, f64) = (r[5].parse().unwrap(), r[6].parse().unwrap());
        assert!((re * re + im * im - 1.0).abs() < 1e-9);
    }
}

#[test]
fn spectrum_rerun_is_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = [
        "spectrum",
        "--ensemble",
        "freefermion",
        "--L",
        "3",
        "--kappa",
        "0.2,0.7",
        "--seeds",
        "5:3",
    ];
    ok(&args, a.path());
    ok(&args, b.path());
    for k in 0..2 {
        for s in 0..3 {
            let name = format!("spectrum_k{k:03}_s{s:03}.csv");
            assert_eq!(
                fs::read(a.path().join(&name)).unwrap(),
                fs::read(b.path().join(&name)).unwrap()
            );
        }
    }
}

#[test]
fn velocity_single_point_and_qft_prediction() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        &[
            "velocity",
            "--ensemble",
            "qft",
            "--L",
            "3",
            "--r",
            "5",
            "--kappa-grid",
            "0.3:0.3:1",
            "--seeds",
            "2:2",
        ],
        dir.path(),
    );
    assert_eq!(rows(&dir.path().join("velocity_model.csv")).len(), 1);
    assert_eq!(rows(&dir.path().join("velocity_baseline.csv")).len(), 1);
    let meta = json(&dir.path().join("velocity.json"));
    assert_eq!(
        meta["metadata"]["predicted_kappa_cr"].as_f64().unwrap(),
        kappa_cr(4, 5.0).unwrap()
    );
    assert_eq!(meta["metadata"]["cluster_count"], 4);
    let header = fs::read_to_string(dir.path().join("velocity_model.csv")).unwrap();
    assert!(header.starts_with("ensemble,L,r,kappa,mean_velocity,n_discarded,n_seeds\n"));
}

#[test]
fn qft_postselection_succeeds_immediately() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        &[
            "clusters",
            "--ensemble",
            "qft",
            "--L",
            "4",
            "--target-n",
            "4",
            "--max-attempts",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(json(&dir.path().join("clusters.json"))["metadata"]["n"], 4);
}

#[test]
fn identity_postselects_as_one_cluster() {
    let id = UnitarySample::new(
        EnsembleKind::Cue,
        3,
        ComplexMatrix::identity(8),
        0,
        EnsembleParams::None,
    )
    .unwrap();
    let accepted = postselect(1, 1, DEFAULT_GAP_FACTOR, |_| Ok(id.clone())).unwrap();
    assert_eq!(accepted.matrix, id.matrix);
}

#[test]
fn clifford_postselection_recount_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let o = dulab(
        &[
            "clusters",
            "--ensemble",
            "clifford",
            "--L",
            "4",
            "--target-n",
            "8",
            "--max-attempts",
            "500",
            "--seeds",
            "2024",
        ],
        dir.path(),
    );
    match o.status.code() {
        Some(0) => {
            let file = fs::File::open(dir.path().join("clusters_unitary.cmat")).unwrap();
            let m = read_cmat(std::io::BufReader::new(file)).unwrap();
            let u = UnitarySample::new(EnsembleKind::Clifford, 4, m, 0, EnsembleParams::None).unwrap();
            let first = count_clusters(&u, DEFAULT_GAP_FACTOR).unwrap();
            let second = count_clusters(&u, DEFAULT_GAP_FACTOR).unwrap();
            assert_eq!(first.n, 8);
            assert_eq!(first, second);
        }
        Some(4) => assert!(String::from_utf8_lossy(&o.stderr).contains("observed")),
        other => panic!("unexpected exit {other:?}: {}", String::from_utf8_lossy(&o.stderr)),
    }
}

#[test]
fn failed_postselection_exits_4_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = dulab(
        &[
            "clusters",
            "--ensemble",
            "cue",
            "--L",
            "3",
            "--target-n",
            "1",
            "--max-attempts",
            "4",
        ],
        &out,
    );
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("observed"));
    assert!(!out.exists());
}

#[test]
fn fidelity_without_noise_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        &[
            "fidelity",
            "--L",
            "3",
            "--kappa",
            "0",
            "--layers",
            "8",
            "--realizations",
            "5",
        ],
        dir.path(),
    );
    let table = rows(&dir.path().join("fidelity.csv"));
    assert_eq!(table.len(), 8);
    for r in table {
        assert!((r[5].parse::<f64>().unwrap() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn fidelity_tail_reaches_the_mixed_value() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        &[
            "fidelity",
            "--L",
            "2",
            "--kappa",
            "0.5",
            "--layers",
            "40",
            "--realizations",
            "100",
        ],
        dir.path(),
    );
    let table = rows(&dir.path().join("fidelity.csv"));
    let last: f64 = table.last().unwrap()[5].parse().unwrap();
    assert!((last - 0.25).abs() < 0.02, "{last}");
    let meta = json(&dir.path().join("fidelity.json"));
    assert_eq!(meta["metadata"]["curves"][0]["analytic"].as_array().unwrap().len(), 40);
}

#[test]
fn invalid_configs_exit_2_and_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["spectrum", "--L", "7", "--kappa", "0.1"],
        &["spectrum", "--L", "6", "--kappa", "0.1"],
        &["spectrum", "--L", "2", "--r", "16", "--kappa", "0.1"],
        &["spectrum", "--L", "3", "--kappa", "1.5"],
        &["spectrum", "--L", "3"],
        &["spectrum", "--ensemble", "spinchain", "--L", "3", "--kappa", "0.2"],
        &["velocity", "--L", "3", "--kappa", "0"],
        &["velocity", "--L", "3", "--kappa", "0.5,0.4"],
        &["velocity", "--L", "3", "--kappa", "0.5", "--epsilon", "-1"],
        &["clusters", "--L", "3"],
        &["fidelity", "--L", "3", "--kappa", "0.1", "--layers", "0"],
        &["sample", "--L", "3", "--kappa", "0.1"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let out = dir.path().join(format!("case{i}"));
        let o = dulab(args, &out);
        assert_eq!(
            o.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert!(!out.exists(), "{args:?} left output behind");
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"ensemble": "clifford", "L": 2, "r": 3, "kappa": [0.2, 0.4], "seeds": {"master": 9, "count": 2}}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    ok(&["spectrum", "--config", cfg.to_str().unwrap(), "--r", "4"], &out);
    let meta = json(&out.join("spectrum.json"));
    assert_eq!(meta["config"]["r"], 4);
    assert_eq!(meta["config"]["L"], 2);
    assert_eq!(meta["metadata"]["spectra"].as_array().unwrap().len(), 4);
    assert_eq!(rows(&out.join("spectrum_k000_s000.csv"))[0][1].to_owned(), "clifford");

    fs::write(&cfg, r#"{"kappa": 0.2, "bogus": 1}"#).unwrap();
    let o = dulab(
        &["spectrum", "--config", cfg.to_str().unwrap()],
        &dir.path().join("bad"),
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn worker_count_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_dulab"))
        .args(["spectrum", "--L", "2", "--kappa", "0.3", "--out"])
        .arg(dir.path())
        .env("DULAB_JOBS", "3")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(json(&dir.path().join("spectrum.json"))["config"]["jobs"], 3);

    let o = Command::new(env!("CARGO_BIN_EXE_dulab"))
        .args(["spectrum", "--L", "2", "--kappa", "0.3", "--out"])
        .arg(dir.path().join("bad"))
        .env("DULAB_JOBS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sample_persists_unitary_and_superoperator() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        &[
            "sample",
            "--ensemble",
            "clifford",
            "--L",
            "2",
            "--r",
            "3",
            "--kappa",
            "0.25",
            "--seeds",
            "4",
        ],
        dir.path(),
    );
    let read = |name: &str| {
        let f = fs::File::open(dir.path().join(name)).unwrap();
        read_cmat(std::io::BufReader::new(f)).unwrap()
    };
    let u = read("unitary.cmat");
    assert!(u.unitarity_residual() < 1e-12);
    let phi = read("superoperator.cmat");
    assert_eq!((phi.rows(), phi.cols()), (16, 16));
    let meta = json(&dir.path().join("sample.json"));
    assert_eq!(meta["metadata"]["unitary"]["params"]["depth"], 48);
}
