//! End-to-end tests of the `touchlink` binary: pipeline wiring, run
//! reproducibility, and exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn touchlink(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_touchlink"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, data: &Path) -> std::path::PathBuf {
    let path = dir.join("cfg.toml");
    std::fs::write(
        &path,
        format!(
            r#"
[data]
path = "{}"

[model]
image_size = 16
patch_size = 8
depth = 1
width = 16
heads = 2
embed_dim = 8
vocab_size = 256
max_text_len = 16

[train]
batch_size = 8
epochs = 2
base_lr = 1e-3
warmup_steps = 2
seed = 7
"#,
            data.display()
        ),
    )
    .unwrap();
    path
}

fn gen_data(dir: &Path) -> std::path::PathBuf {
    let data = dir.join("data");
    let out = touchlink(&[
        "gen",
        "--m",
        "4",
        "--n",
        "32",
        "--height",
        "16",
        "--width",
        "16",
        "--seed",
        "7",
        "--corruption-rate",
        "0.25",
        "--out",
        data.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "gen failed: {}", String::from_utf8_lossy(&out.stderr));
    data
}

#[test]
fn gen_writes_dataset_and_run_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let data = gen_data(dir.path());
    assert!(data.join("manifest.json").exists());
    assert!(data.join("records.jsonl").exists());
    assert!(data.join("run_manifest.json").exists());
    assert!(data.join("images").read_dir().unwrap().count() >= 64);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(data.join("run_manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["command"], "gen");
    assert_eq!(manifest["seed"], 7);
    assert!(manifest["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn train_probe_zeroshot_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let data = gen_data(dir.path());
    let cfg = write_config(dir.path(), &data);
    let run = dir.path().join("run");
    let out = touchlink(&[
        "train",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        run.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "train failed: {}", String::from_utf8_lossy(&out.stderr));
    assert!(run.join("metrics.csv").exists());
    assert!(run.join("checkpoint.json").exists());

    let ckpt = run.join("checkpoint.json");
    for cmd in ["probe", "zeroshot"] {
        let out_dir = dir.path().join(cmd);
        let args = vec![
            cmd,
            "--checkpoint",
            ckpt.to_str().unwrap(),
            "--data",
            data.to_str().unwrap(),
            "--task",
            "material",
            "--out",
            out_dir.to_str().unwrap(),
        ];
        let out = touchlink(&args);
        assert!(out.status.success(), "{cmd} failed: {}", String::from_utf8_lossy(&out.stderr));
        assert!(out_dir.join("report.json").exists());
        assert!(out_dir.join("run_manifest.json").exists());
    }
}

#[test]
fn identical_invocations_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let data = gen_data(dir.path());
    let cfg = write_config(dir.path(), &data);
    let run = dir.path().join("run");
    let args: Vec<String> = vec![
        "train".into(),
        "--config".into(),
        cfg.display().to_string(),
        "--out".into(),
        run.display().to_string(),
    ];
    let argv: Vec<&str> = args.iter().map(String::as_str).collect();

    assert!(touchlink(&argv).status.success());
    let metrics_first = std::fs::read(run.join("metrics.csv")).unwrap();
    let checkpoint_first = std::fs::read(run.join("checkpoint.json")).unwrap();
    assert!(touchlink(&argv).status.success());
    let metrics_second = std::fs::read(run.join("metrics.csv")).unwrap();
    let checkpoint_second = std::fs::read(run.join("checkpoint.json")).unwrap();
    assert_eq!(metrics_first, metrics_second, "metrics.csv differs across identical runs");
    assert_eq!(checkpoint_first, checkpoint_second, "checkpoint differs across identical runs");

    // Reports too: same argv, same bytes.
    let probe = dir.path().join("probe");
    let ckpt = run.join("checkpoint.json");
    let probe_args = [
        "probe",
        "--checkpoint",
        ckpt.to_str().unwrap(),
        "--data",
        data.to_str().unwrap(),
        "--out",
        probe.to_str().unwrap(),
    ];
    assert!(touchlink(&probe_args).status.success());
    let report_first = std::fs::read(probe.join("report.json")).unwrap();
    assert!(touchlink(&probe_args).status.success());
    let report_second = std::fs::read(probe.join("report.json")).unwrap();
    assert_eq!(report_first, report_second);
}

#[test]
fn no_curriculum_flag_is_recorded_and_zeroes_beta() {
    let dir = tempfile::tempdir().unwrap();
    let data = gen_data(dir.path());
    let cfg = write_config(dir.path(), &data);
    let run = dir.path().join("run_nc");
    let out = touchlink(&[
        "train",
        "--config",
        cfg.to_str().unwrap(),
        "--no-curriculum",
        "--out",
        run.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(run.join("run_manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["config"]["train"]["curriculum"], false);
    assert_eq!(manifest["config"]["schedule"]["enabled"], false);
    let metrics = std::fs::read_to_string(run.join("metrics.csv")).unwrap();
    for line in metrics.lines().skip(1) {
        assert_eq!(line.split(',').nth(2).unwrap(), "0");
    }
}

#[test]
fn curate_splits_clean_from_queue() {
    let dir = tempfile::tempdir().unwrap();
    let data = gen_data(dir.path());
    let out_dir = dir.path().join("curate");
    let out = touchlink(&[
        "curate",
        "--data",
        data.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let queue = std::fs::read_to_string(out_dir.join("correction_queue.jsonl")).unwrap();
    // floor(0.25 * 32) = 8 corrupted records.
    assert_eq!(queue.lines().count(), 8);
    let clean: Vec<String> = serde_json::from_str(
        &std::fs::read_to_string(out_dir.join("clean_ids.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(clean.len(), 24);
}

#[test]
fn help_exits_zero_and_lists_defaults() {
    let out = touchlink(&["--help"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in [
        "gen", "filter", "curate", "train", "probe", "zeroshot", "grasp", "ablate-scale",
        "ablate-curriculum", "project",
    ] {
        assert!(text.contains(sub), "--help must list {sub}");
    }
    for sub in ["gen", "train", "probe", "zeroshot", "grasp", "ablate-scale", "project"] {
        let out = touchlink(&[sub, "--help"]);
        assert!(out.status.success(), "{sub} --help should exit 0");
        let text = String::from_utf8_lossy(&out.stdout);
        assert!(
            text.contains("default"),
            "{sub} --help should show flag defaults:\n{text}"
        );
    }
}

#[test]
fn bad_usage_exits_one_and_runtime_failures_exit_two() {
    let out = touchlink(&["bogus-subcommand"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());

    let out = touchlink(&["gen", "--unknown-flag", "--out", "/tmp/x"]);
    assert_eq!(out.status.code(), Some(1));

    // Validation: corruption rate out of range.
    let dir = tempfile::tempdir().unwrap();
    let out = touchlink(&[
        "gen",
        "--corruption-rate",
        "1.5",
        "--out",
        dir.path().join("d").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));

    // Missing checkpoint is a validation failure (exit 1).
    let out = touchlink(&[
        "probe",
        "--checkpoint",
        "/nonexistent/ckpt.json",
        "--data",
        "/nonexistent/data",
        "--out",
        dir.path().join("p").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn grasp_pipeline_runs_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let gdata = dir.path().join("gdata");
    let out = touchlink(&[
        "gen",
        "--task",
        "grasp",
        "--n",
        "16",
        "--height",
        "16",
        "--width",
        "16",
        "--out",
        gdata.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    // Train on the material data, evaluate grasp with the checkpoint.
    let data = gen_data(dir.path());
    let cfg = write_config(dir.path(), &data);
    let run = dir.path().join("run");
    assert!(touchlink(&[
        "train",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        run.to_str().unwrap()
    ])
    .status
    .success());
    let out_dir = dir.path().join("grasp_eval");
    let out = touchlink(&[
        "grasp",
        "--checkpoint",
        run.join("checkpoint.json").to_str().unwrap(),
        "--data",
        gdata.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let reports: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("reports.json")).unwrap())
            .unwrap();
    assert_eq!(reports.as_array().unwrap().len(), 2);
}
