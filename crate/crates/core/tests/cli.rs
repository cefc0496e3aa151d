//! End-to-end runs of the `aerofoil` binary.

mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use aerofoil::cli::RunManifest;
use aerofoil::dataio::load_dataset;
use aerofoil::raster::parse_grid_text;
use common::corpus_dir;

fn aerofoil(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aerofoil"))
        .args(args)
        .env_remove("AEROFOIL_SEED")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = aerofoil(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Small oracle dataset: every corpus airfoil at two angles, one Mach, one Re.
fn small_dataset(dir: &Path) -> PathBuf {
    let out = dir.join("prep");
    ok(&[
        "prepare", s(&corpus_dir()), "--oracle", "--alphas", "-2,6", "--machs", "0.5", "--reynolds", "1e6",
        "--out", s(&out),
    ]);
    out.join("dataset.csv")
}

#[test]
fn prepare_oracle_with_flip_counts_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        ok(&["prepare", s(&corpus_dir()), "--oracle", "--flip", "--out", s(out)]);
    }
    let data = load_dataset(a.join("dataset.csv")).unwrap();
    // Cambered sections gain a full mirrored copy; symmetric sections only
    // gain the mirrors of angles whose negation is off the grid (12..30).
    let symmetric = data.airfoils().values().filter(|g| g.is_symmetric()).count();
    let cambered_originals = data.airfoils().keys().filter(|n| !n.ends_with("-flipped")).count() - symmetric;
    assert_eq!((symmetric, cambered_originals), (5, 15));
    assert_eq!(data.len(), cambered_originals * 2 * 378 + symmetric * (378 + 10 * 18));
    for f in ["dataset.csv", "dataset.geometry.txt"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap());
    }
    let m = RunManifest::load(&a.join("manifest.json")).unwrap();
    assert_eq!(m.command, "prepare");
    assert_eq!(m.inputs.len(), 20);
}

#[test]
fn prepare_rejects_empty_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty");
    std::fs::create_dir(&empty).unwrap();
    let out = aerofoil(&["prepare", s(&empty), "--oracle", "--out", s(&dir.path().join("o"))]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("no parseable airfoil"));
}

#[test]
fn prepare_from_polars() {
    let dir = tempfile::tempdir().unwrap();
    let polars = common::manifest_dir().join("data/polars");
    let out = dir.path().join("p");
    ok(&["prepare", s(&corpus_dir()), "--polars", s(&polars), "--out", s(&out)]);
    let data = load_dataset(out.join("dataset.csv")).unwrap();
    assert_eq!(data.len(), 11);
    let e = data
        .entries()
        .iter()
        .find(|e| e.airfoil == "NACA 2412" && e.flow.alpha == 5.0)
        .unwrap();
    assert_eq!((e.cl, e.flow.mach, e.flow.reynolds), (0.8612, 0.3, 1e6));

    // A diverged row is skipped, or fatal under --strict.
    let mixed = dir.path().join("mixed");
    std::fs::create_dir(&mixed).unwrap();
    std::fs::copy(common::fixture("diverged.pol"), mixed.join("naca4412_m0.5.pol")).unwrap();
    let lenient = aerofoil(&["prepare", s(&corpus_dir()), "--polars", s(&mixed), "--out", s(&dir.path().join("l"))]);
    assert!(lenient.status.success());
    assert!(String::from_utf8_lossy(&lenient.stderr).contains("skipping"));
    assert_eq!(load_dataset(dir.path().join("l/dataset.csv")).unwrap().len(), 1);
    let strict = aerofoil(&[
        "prepare", s(&corpus_dir()), "--polars", s(&mixed), "--strict", "--out", s(&dir.path().join("s")),
    ]);
    assert!(!strict.status.success());
}

fn read_grid(dir: &Path) -> Vec<f64> {
    let text = std::fs::read_to_string(dir.join("image.txt")).unwrap();
    assert_eq!(text.lines().count(), 49);
    assert!(text.lines().all(|l| l.split_whitespace().count() == 49));
    parse_grid_text(&text).unwrap().values
}

#[test]
fn rasterize_scales_with_mach() {
    let dir = tempfile::tempdir().unwrap();
    let file = corpus_dir().join("naca4412.dat");
    let (hi, lo) = (dir.path().join("hi"), dir.path().join("lo"));
    ok(&["rasterize", s(&file), "--alpha", "24", "--mach", "0.8", "--out", s(&hi)]);
    ok(&["rasterize", s(&file), "--alpha", "24", "--mach", "0.6", "--out", s(&lo)]);
    for (a, b) in read_grid(&hi).iter().zip(read_grid(&lo)) {
        // Text grids carry six significant digits.
        assert!((b - 0.75 * a).abs() <= 1e-5 * a.abs().max(1e-6), "{a} {b}");
    }
    let pgm = std::fs::read(hi.join("image.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n49 49\n255\n"));
    assert_eq!(pgm.len(), b"P5\n49 49\n255\n".len() + 49 * 49);

    let out = aerofoil(&["rasterize", s(&file), "--alpha", "50", "--mach", "0.8", "--out", s(&dir.path().join("x"))]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("angle of attack"));
}

#[test]
fn train_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let data = small_dataset(dir.path());
    let out = s(&dir.path().join("m")).to_string();
    for bad in [
        vec!["train", s(&data), "--arch", "mlp", "--epochs", "0", "--out", &out],
        vec!["train", s(&data), "--arch", "resnet", "--epochs", "1", "--out", &out],
        vec!["train", s(&data), "--arch", "mlp", "--epochs", "1", "--split", "1.5", "--out", &out],
    ] {
        assert_eq!(aerofoil(&bad).status.code(), Some(2), "{bad:?}");
    }
}

#[test]
fn train_eval_predict_round() {
    let dir = tempfile::tempdir().unwrap();
    let data = small_dataset(dir.path());
    let model_dir = dir.path().join("mlp");
    ok(&[
        "train", s(&data), "--arch", "mlp", "--epochs", "3", "--split", "0.85", "--quiet", "--out", s(&model_dir),
    ]);
    let history = std::fs::read_to_string(model_dir.join("history.csv")).unwrap();
    assert_eq!(history.lines().count(), 4);
    assert!(history.starts_with("epoch,train_mse,val_mse,seconds\n"));
    let model = model_dir.join("model.txt");

    let eval_dir = dir.path().join("eval");
    let out = ok(&["eval", s(&model), s(&data), "--out", s(&eval_dir), "--curve", "NACA 2412@0.5"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("train_mse") && stdout.contains("validation_mse"), "{stdout}");
    let scatter = std::fs::read_to_string(eval_dir.join("scatter.csv")).unwrap();
    assert_eq!(scatter.lines().next(), Some("actual_cl,predicted_cl,split_side"));
    assert_eq!(scatter.lines().count(), 41);
    let curve = std::fs::read_to_string(eval_dir.join("curve_NACA_2412_0.5.csv")).unwrap();
    assert_eq!(curve.lines().count(), 3);

    let airfoil = corpus_dir().join("naca2412.dat");
    let args = ["predict", s(&model), s(&airfoil), "--alpha", "4", "--mach", "0.5", "--reynolds", "1e6"];
    let (a, b) = (ok(&args), ok(&args));
    assert_eq!(a.stdout, b.stdout);
    let value: f64 = String::from_utf8_lossy(&a.stdout).trim().parse().unwrap();
    assert!(value.is_finite());

    let missing = aerofoil(&["predict", s(&model), s(&airfoil), "--alpha", "4", "--mach", "0.5"]);
    assert_eq!(missing.status.code(), Some(2));

    let outside = ok(&["predict", s(&model), s(&airfoil), "--alpha", "35", "--mach", "0.5", "--reynolds", "1e6"]);
    assert!(String::from_utf8_lossy(&outside.stderr).contains("warning"));

    let wrong = aerofoil(&["eval", s(&model), s(&data), "--arch", "aerocnn2", "--out", s(&eval_dir)]);
    assert!(String::from_utf8_lossy(&wrong.stderr).contains("does not match"));
}

#[test]
fn image_model_needs_no_reynolds() {
    let dir = tempfile::tempdir().unwrap();
    let data = small_dataset(dir.path());
    let model_dir = dir.path().join("cnn");
    ok(&[
        "train", s(&data), "--arch", "aerocnn2", "--epochs", "1", "--split", "0.5", "--quiet", "--out", s(&model_dir),
    ]);
    let airfoil = corpus_dir().join("naca0012.dat");
    let out = ok(&["predict", s(&model_dir.join("model.txt")), s(&airfoil), "--alpha", "3", "--mach", "0.7"]);
    let value: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!(value.is_finite());
}

#[test]
fn seed_from_environment_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let data = small_dataset(dir.path());
    let out = dir.path().join("env");
    let status = Command::new(env!("CARGO_BIN_EXE_aerofoil"))
        .args(["train", s(&data), "--arch", "mlp", "--epochs", "1", "--quiet", "--out", s(&out)])
        .env("AEROFOIL_SEED", "7")
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(RunManifest::load(&out.join("manifest.json")).unwrap().seed, Some(7));

    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "epochs = 4\nsplit = 0.5\nseed = 11\nquiet = true\n").unwrap();
    let out = dir.path().join("cfg");
    ok(&["--config", s(&cfg), "train", s(&data), "--arch", "mlp", "--epochs", "2", "--out", s(&out)]);
    let m = RunManifest::load(&out.join("manifest.json")).unwrap();
    assert_eq!((m.seed, m.config["epochs"].as_str(), m.config["split"].as_str()), (Some(11), "2", "0.5"));
}
