use std::path::Path;
use std::process::{Command, Output};

use diqc_core::certify::{FidelityCertificate, LinearBoundCertificate, BETA_STAR};
use tempfile::TempDir;

fn diqc(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_diqc"));
    cmd.args(args).env_remove("DIQC_CACHE_DIR");
    if let Some(dir) = cache {
        cmd.env("DIQC_CACHE_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn csv_rows(text: &str) -> (String, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (header, rows)
}

fn field(header: &str, row: &[String], name: &str) -> f64 {
    let idx = header.split(',').position(|h| h == name).unwrap();
    row[idx].parse().unwrap()
}

#[test]
fn cutoff_anchor_at_max_entanglement() {
    let out = diqc(
        &["cutoff", "--theta", "0.7853981634", "--inequality", "new"],
        None,
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 1);
    let i_star = field(&header, &rows[0], "i_star");
    assert!((i_star - 0.7445).abs() < 0.01, "{i_star}");
}

#[test]
fn tilted_cutoff_exceeds_new_cutoff() {
    let cache = TempDir::new().unwrap();
    let get = |q: &str| {
        let out = diqc(
            &[
                "cutoff",
                "--theta",
                "0.6",
                "--inequality",
                q,
                "--format",
                "json",
            ],
            Some(cache.path()),
        );
        assert_eq!(out.status.code(), Some(0));
        serde_json::from_str::<LinearBoundCertificate>(&stdout(&out)).unwrap()
    };
    let (new, tilted) = (get("new"), get("tilted"));
    assert!(tilted.i_star > new.i_star);
}

#[test]
fn usage_errors_exit_with_one() {
    let bad_theta = diqc(&["cutoff", "--theta", "abc"], None);
    assert_eq!(bad_theta.status.code(), Some(1));
    assert!(stderr(&bad_theta).contains("--theta"));
    assert_eq!(
        diqc(&["cutoff", "--theta", "0.6", "--grid-n", "50"], None)
            .status
            .code(),
        Some(1)
    );
    assert_eq!(diqc(&["frobnicate"], None).status.code(), Some(1));
    assert_eq!(
        diqc(&["certify", "--theta", "0.6"], None).status.code(),
        Some(1)
    );
    assert_eq!(
        diqc(&["cutoff", "--theta", "0.6", "--format", "xml"], None)
            .status
            .code(),
        Some(1)
    );
    assert_eq!(diqc(&["--help"], None).status.code(), Some(0));
}

#[test]
fn domain_errors_exit_with_two() {
    let out = diqc(&["cutoff", "--theta", "2.0"], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("theta"));
}

#[test]
fn infeasible_cutoff_reports_worst_point() {
    let out = diqc(
        &[
            "cutoff", "--theta", "0.77", "--delta", "linear", "--grid-n", "101",
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("margin") && err.contains("(a, b)"), "{err}");
    assert!(stdout(&out).is_empty());
}

#[test]
fn certify_endpoints() {
    let cache = TempDir::new().unwrap();
    let run = |beta: &str, i0: &str| {
        let out = diqc(
            &[
                "certify", "--theta", "0.6", "--beta", beta, "--i0", i0, "--i1", "1", "--p0", "0.5",
            ],
            Some(cache.path()),
        );
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        let (header, rows) = csv_rows(&stdout(&out));
        assert_eq!(header, "beta,i0,i1,p0,f_in,f_out0,f_out1,f_out,bound");
        (header, rows[0].clone())
    };
    let (h, top) = run("2.8284271247461903", "1");
    assert!((field(&h, &top, "bound") - 1.0).abs() < 1e-9);
    let (h, mid) = run(&format!("{BETA_STAR:.17}"), "1");
    assert!((field(&h, &mid, "bound") - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6);
    let (h, low) = run("2.7", "0.5");
    assert_eq!(field(&h, &low, "f_out0"), 0.6f64.cos());
    assert!(field(&h, &low, "bound") > 0.0);

    let nonquantum = diqc(
        &[
            "certify", "--theta", "0.6", "--beta", "3", "--i0", "1", "--i1", "1", "--p0", "0.5",
        ],
        Some(cache.path()),
    );
    assert_eq!(nonquantum.status.code(), Some(2));
}

#[test]
fn certificates_round_trip() {
    let cache = TempDir::new().unwrap();
    let args = [
        "cutoff",
        "--theta",
        "0.45",
        "--inequality",
        "tilted",
        "--grid-n",
        "101",
    ];
    let json = diqc(
        &[&args[..], &["--format", "json"]].concat(),
        Some(cache.path()),
    );
    let cert: LinearBoundCertificate = serde_json::from_str(&stdout(&json)).unwrap();
    let reserialized = serde_json::to_string(&cert).unwrap();
    assert_eq!(
        serde_json::from_str::<LinearBoundCertificate>(&reserialized).unwrap(),
        cert
    );

    let csv = diqc(&args, Some(cache.path()));
    let (h, rows) = csv_rows(&stdout(&csv));
    let row = &rows[0];
    assert_eq!(field(&h, row, "theta").to_bits(), cert.theta.to_bits());
    assert_eq!(field(&h, row, "i_star").to_bits(), cert.i_star.to_bits());
    assert_eq!(field(&h, row, "slope").to_bits(), cert.slope.to_bits());
    assert_eq!(
        field(&h, row, "intercept").to_bits(),
        cert.intercept.to_bits()
    );
    assert_eq!(
        field(&h, row, "worst_margin").to_bits(),
        cert.worst_margin.to_bits()
    );
    assert_eq!(
        field(&h, row, "worst_a").to_bits(),
        cert.worst_point.0.to_bits()
    );
    assert_eq!(field(&h, row, "tol").to_bits(), cert.tol.to_bits());
    assert_eq!(row[1], "tilted");
    assert_eq!(row.last().unwrap(), "logarithmic");

    let fid = diqc(
        &[
            "certify",
            "--theta",
            "0.45",
            "--inequality",
            "tilted",
            "--grid-n",
            "101",
            "--beta",
            "2.7",
            "--i0",
            "0.99",
            "--i1",
            "0.995",
            "--p0",
            "0.4",
            "--format",
            "json",
        ],
        Some(cache.path()),
    );
    let f: FidelityCertificate = serde_json::from_str(&stdout(&fid)).unwrap();
    let again: FidelityCertificate =
        serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
    assert_eq!(f, again);
}

#[test]
fn cache_is_written_and_reused() {
    let cache = TempDir::new().unwrap();
    let args = [
        "cutoff", "--theta", "0.5", "--grid-n", "101", "--format", "json",
    ];
    let first = diqc(&args, Some(cache.path()));
    let entries: Vec<_> = std::fs::read_dir(cache.path()).unwrap().collect();
    assert_eq!(entries.len(), 1);
    let second = diqc(&args, Some(cache.path()));
    assert_eq!(stdout(&first), stdout(&second));

    let flag_dir = TempDir::new().unwrap();
    let flagged = diqc(
        &[
            &args[..],
            &["--cache-dir", flag_dir.path().to_str().unwrap()],
        ]
        .concat(),
        None,
    );
    assert_eq!(stdout(&flagged), stdout(&first));
    assert_eq!(std::fs::read_dir(flag_dir.path()).unwrap().count(), 1);
}

#[test]
fn out_flag_writes_file() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("cert.csv");
    let out = diqc(
        &[
            "certify",
            "--theta",
            "0.6",
            "--grid-n",
            "101",
            "--beta",
            "2.8",
            "--i0",
            "1",
            "--i1",
            "1",
            "--p0",
            "0.5",
            "--out",
            path.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("beta,i0,i1,p0,f_in,f_out0,f_out1,f_out,bound\n"));
    assert!(text.ends_with('\n'));
}

#[test]
fn fig4_sweep_rows() {
    let cache = TempDir::new().unwrap();
    let out = diqc(
        &["sweep-fig4", "--n-theta", "4", "--grid-n", "101"],
        Some(cache.path()),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(
        header,
        "theta,inequality,i_star,slope,intercept,worst_margin,grid_n,delta_variant"
    );
    assert_eq!(rows.len(), 8);
    let thetas: Vec<f64> = rows.iter().map(|r| field(&header, r, "theta")).collect();
    assert!(thetas.windows(2).all(|w| w[0] <= w[1]));
    // The smallest angle is outside the reach of the extraction channels.
    assert!(stderr(&out).contains("warning"));
    let last_new = &rows[6];
    assert_eq!(last_new[1], "new");
    assert!((field(&header, last_new, "i_star") - 0.7445).abs() < 0.01);
}

#[test]
fn fig5_sweep_rows() {
    let cache = TempDir::new().unwrap();
    let out = diqc(
        &[
            "sweep-fig5",
            "--n-beta",
            "6",
            "--n-i",
            "5",
            "--grid-n",
            "101",
        ],
        Some(cache.path()),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(header, "theta,beta,i_theta,p0,f_in,f_out,bound");
    assert_eq!(rows.len(), 30);
    let bound = |k: usize, j: usize| field(&header, &rows[k * 5 + j], "bound");
    assert!((bound(5, 4) - 1.0).abs() < 1e-9);
    for k in 0..6 {
        for j in 0..5 {
            if k < 5 {
                assert!(bound(k + 1, j) >= bound(k, j));
            }
            if j < 4 {
                assert!(bound(k, j + 1) >= bound(k, j));
            }
        }
    }
}

#[test]
fn simulate_zero_noise() {
    let out = diqc(&["simulate", "--theta", "0.6", "--grid-n", "101"], None);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let (header, rows) = csv_rows(&stdout(&out));
    assert!((field(&header, &rows[0], "bound") - 1.0).abs() < 1e-6);
    assert!((field(&header, &rows[0], "oracle") - 1.0).abs() < 1e-9);

    let noisy = diqc(
        &[
            "simulate",
            "--theta",
            "0.6",
            "--grid-n",
            "101",
            "--visibility",
            "0.95",
            "--alice-offset",
            "-0.02",
            "--eta",
            "0.05",
            "--format",
            "json",
        ],
        None,
    );
    assert_eq!(noisy.status.code(), Some(0), "{}", stderr(&noisy));
    let v: serde_json::Value = serde_json::from_str(&stdout(&noisy)).unwrap();
    let bound = v["certificate"]["bound"].as_f64().unwrap();
    assert!(bound <= v["oracle"].as_f64().unwrap() + 1e-6);

    let bad = diqc(&["simulate", "--theta", "0.6", "--visibility", "1.5"], None);
    assert_eq!(bad.status.code(), Some(2));
}
