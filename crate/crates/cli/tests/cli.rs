use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fresh_core::{save_png, Image};

const SMALL: &[&str] = &["--width", "16", "--hidden-layers", "1"];

fn fresh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fresh")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn pattern_png(dir: &Path, side: usize) -> PathBuf {
    let img = Image::from_fn(3, side, side, |c, r, col| {
        let (r, col) = (r as f64 / side as f64, col as f64 / side as f64);
        (0.5 + 0.3 * (6.0 * r + c as f64).sin() * (4.0 * col).cos()).clamp(0.0, 1.0)
    })
    .unwrap();
    let path = dir.join("pattern.png");
    save_png(&img, &path).unwrap();
    path
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn args<'a>(base: &[&'a str], extra: &[&'a str]) -> Vec<&'a str> {
    base.iter().chain(extra).copied().collect()
}

#[test]
fn help_lists_flags_with_defaults() {
    let out = fresh(&["select", "--help"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for flag in ["--model", "--grid", "--n", "--repeats", "--resolution", "--seed", "--jobs", "--out", "--config"] {
        assert!(text.contains(flag), "missing {flag}");
    }
    assert!(text.contains("[default: 64]"));
    assert!(text.contains("10:200:10"));
    let train = stdout(&fresh(&["train", "--help"]));
    assert!(train.contains("--steps") && train.contains("[default: 2000]"));
    assert!(train.contains("--lr") && train.contains("--fresh"));
}

#[test]
fn select_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let img = pattern_png(dir.path(), 32);
    let out_dir = dir.path().join("sel");
    let out = fresh(&args(
        &["select", "--image", img.to_str().unwrap(), "--out", out_dir.to_str().unwrap()],
        &["--grid", "10:50:20", "--resolution", "32", "--n", "16", "--repeats", "2", "--width", "16", "--hidden-layers", "1"],
    ));
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("chosen siren"));
    let rows = csv_rows(&out_dir.join("selection.csv"));
    assert_eq!(rows.len(), 3);
    assert_eq!(rows.iter().filter(|r| r[3] == "1").count(), 1);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("selection.json")).unwrap()).unwrap();
    assert_eq!(json["scores"].as_array().unwrap().len(), 3);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let flat = dir.path().join("flat.png");
    save_png(&Image::filled(1, 32, 32, 0.4).unwrap(), &flat).unwrap();
    let out_dir = dir.path().join("o");
    let o = out_dir.to_str().unwrap();

    let degenerate = fresh(&["select", "--image", flat.to_str().unwrap(), "--out", o, "--resolution", "32", "--n", "16"]);
    assert_eq!(code(&degenerate), 2);

    let img = pattern_png(dir.path(), 32);
    let bad_grid = fresh(&["select", "--image", img.to_str().unwrap(), "--grid", "50:10:10", "--out", o]);
    assert_eq!(code(&bad_grid), 64);
    assert_eq!(code(&fresh(&["select", "--bogus"])), 64);

    let missing = fresh(&["select", "--image", "/nonexistent.png", "--out", o]);
    assert_eq!(code(&missing), 66);

    let diverged = fresh(&args(
        &["train", "--image", img.to_str().unwrap(), "--out", o, "--model", "fourier", "--lr", "1e30", "--steps", "20"],
        SMALL,
    ));
    assert_eq!(code(&diverged), 3);
    assert!(String::from_utf8_lossy(&diverged.stderr).contains("diverged"));

    let not_png = dir.path().join("junk.png");
    std::fs::write(&not_png, b"not an image").unwrap();
    assert_eq!(code(&fresh(&["select", "--image", not_png.to_str().unwrap(), "--out", o])), 65);
}

#[test]
fn train_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let img = pattern_png(dir.path(), 24);
    let run = |name: &str| {
        let out_dir = dir.path().join(name);
        let out = fresh(&args(
            &["train", "--image", img.to_str().unwrap(), "--out", out_dir.to_str().unwrap()],
            &["--omega0", "20", "--steps", "30", "--log-every", "10", "--seed", "7", "--width", "16", "--hidden-layers", "1"],
        ));
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        out_dir
    };
    let (a, b) = (run("a"), run("b"));
    let csv_a = std::fs::read(a.join("train.csv")).unwrap();
    assert_eq!(csv_a, std::fs::read(b.join("train.csv")).unwrap());
    assert_eq!(csv_rows(&a.join("train.csv")).len(), 3);
    assert!(a.join("reconstruction.png").exists());
    assert!(a.join("checkpoint.json").exists());
}

#[test]
fn train_fresh_chains_selection() {
    let dir = tempfile::tempdir().unwrap();
    let img = pattern_png(dir.path(), 32);
    let out_dir = dir.path().join("f");
    let out = fresh(&args(
        &["train", "--fresh", "--image", img.to_str().unwrap(), "--out", out_dir.to_str().unwrap()],
        &["--grid", "10,30", "--resolution", "32", "--n", "16", "--repeats", "2", "--steps", "10", "--width", "16", "--hidden-layers", "1"],
    ));
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("selected siren"));
    assert!(out_dir.join("selection.csv").exists());
    assert!(out_dir.join("train.csv").exists());
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let img = pattern_png(dir.path(), 24);
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "steps = 40\nlog_every = 10\nwidth = 16\nhidden_layers = 1\n").unwrap();
    let out_dir = dir.path().join("c");
    let out = fresh(&[
        "train",
        "--config",
        cfg.to_str().unwrap(),
        "--image",
        img.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--steps",
        "20",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let steps: Vec<String> = csv_rows(&out_dir.join("train.csv")).into_iter().map(|r| r[0].clone()).collect();
    assert_eq!(steps, ["10", "20"]);
}

#[test]
fn sweep_ranks_like_individual_runs() {
    let dir = tempfile::tempdir().unwrap();
    let img = pattern_png(dir.path(), 64);
    let common = ["--steps", "40", "--log-every", "20", "--width", "16", "--hidden-layers", "1", "--seed", "3"];
    let sweep_dir = dir.path().join("s");
    let out = fresh(&args(
        &["sweep", "--image", img.to_str().unwrap(), "--out", sweep_dir.to_str().unwrap(), "--grid", "10,30,60"],
        &args(&common, &["--resolution", "64", "--n", "32", "--repeats", "2"]),
    ));
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("gap"));
    let rows = csv_rows(&sweep_dir.join("sweep.csv"));
    assert_eq!(rows.len(), 3);
    assert_eq!(rows.iter().filter(|r| r[3] == "1").count(), 1);

    let mut individual = Vec::new();
    for omega in ["10", "30", "60"] {
        let d = dir.path().join(format!("t{omega}"));
        let o = fresh(&args(
            &["train", "--image", img.to_str().unwrap(), "--out", d.to_str().unwrap(), "--omega0", omega],
            &common,
        ));
        assert_eq!(code(&o), 0);
        let last = csv_rows(&d.join("train.csv")).pop().unwrap();
        individual.push(last[2].parse::<f64>().unwrap());
    }
    for (row, psnr) in rows.iter().zip(&individual) {
        assert_eq!(row[1].parse::<f64>().unwrap(), *psnr);
    }
    let best = individual
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap()
        .0;
    assert_eq!(rows[best][3], "1");
}

#[test]
fn analyze_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let img = pattern_png(dir.path(), 32);
    let i = img.to_str().unwrap();

    let untrained = dir.path().join("u");
    let out = fresh(&["analyze", "--image", i, "--out", untrained.to_str().unwrap(), "--omega0", "30", "--width", "64"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(csv_rows(&untrained.join("spectrum.csv")).len(), 31);
    let mags = csv_rows(&untrained.join("magnitudes.csv"));
    assert_eq!(mags.len(), 64);
    let bound = 30.0 * 2f64.sqrt() / 2.0;
    assert!(mags.iter().all(|r| r[1].parse::<f64>().unwrap() <= bound));
    let hist = csv_rows(&untrained.join("magnitude_hist.csv"));
    assert_eq!(hist.iter().map(|r| r[2].parse::<usize>().unwrap()).sum::<usize>(), 64);

    let trained = dir.path().join("t");
    let t = fresh(&args(
        &["train", "--image", i, "--out", trained.to_str().unwrap(), "--steps", "10"],
        SMALL,
    ));
    assert_eq!(code(&t), 0);
    let ckpt = trained.join("checkpoint.json");
    let c = ckpt.to_str().unwrap();
    let self_ratio = dir.path().join("r");
    let out = fresh(&["analyze", "--image", i, "--checkpoint", c, "--baseline", c, "--n", "16", "--out", self_ratio.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let ratio = csv_rows(&self_ratio.join("residual_ratio.csv"));
    assert_eq!(ratio.len(), 16);
    assert!(ratio.iter().all(|r| r[1] == "1"));

    let missing = fresh(&["analyze", "--checkpoint", "/nonexistent.json", "--out", self_ratio.to_str().unwrap()]);
    assert_eq!(code(&missing), 66);
}
