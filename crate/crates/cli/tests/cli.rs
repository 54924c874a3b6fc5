use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use argmine_cli::{experiment_files, render_ablation, sha256_hex, synth_files};
use argmine_core::corpus::{corpus_stats, generate_synthetic, load_corpus, SynthConfig};
use argmine_core::features::render_feature_catalog;
use argmine_core::harness::{render_report, run_ablation, run_experiment_with, Experiment};

fn argmine(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_argmine"));
    cmd.args(args).env_remove("ARGMINE_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn fixture(dir: &Path) -> PathBuf {
    let out = dir.join("fixture");
    let o = argmine(&["synth", "--out", s(&out), "--transcripts", "4", "--moves", "12", "--seed", "5"], &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out.join("corpus.jsonl")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

const MAJORITY: &str = r#"{"model": {"family": "majority"}, "seed": 1}"#;
const LOGREG_DIALOGUE: &str = r#"{"model": {"family": "logreg", "feature_sets": ["dialogue"]}, "seed": 2}"#;

#[test]
fn synth_output_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = fixture(dir.path());
    let cfg = SynthConfig {
        n_transcripts: 4,
        moves_per_transcript_mean: 12.0,
        seed: 5,
        ..SynthConfig::default()
    };
    let files = synth_files(&cfg, &generate_synthetic(&cfg).unwrap()).unwrap();
    assert_eq!(fs::read(&corpus).unwrap(), files[0].1);
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(corpus.with_file_name("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(manifest["corpus_sha256"], sha256_hex(&files[0].1));
}

#[test]
fn validate_prints_library_stats() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = fixture(dir.path());
    let o = argmine(&["validate", s(&corpus)], &[]);
    assert_eq!(o.status.code(), Some(0));
    let expected = corpus_stats(&load_corpus(&corpus).unwrap()).render();
    assert_eq!(String::from_utf8(o.stdout).unwrap(), expected);
}

#[test]
fn validate_rejects_duplicate_ids_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let line = r#"{"id": "lesson-7", "moves": [{"speaker": "S1", "text": "I think so.", "arg": "claim", "spec": "low"}]}"#;
    let p = write(dir.path(), "dup.jsonl", &format!("{line}\n{line}\n"));
    let o = argmine(&["validate", s(&p)], &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("lesson-7"), "{err}");
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn missing_inputs_exit_2() {
    let o = argmine(&["validate", "/nonexistent/corpus.jsonl"], &[]);
    assert_eq!(o.status.code(), Some(2));
    let o = argmine(&["bogus-command"], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_config_exits_2_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = fixture(dir.path());
    let cfg = write(dir.path(), "bad.json", r#"{"model": {"family": "majority", "hiden": 3}}"#);
    let o = argmine(
        &["run", "--config", s(&cfg), "--corpus", s(&corpus), "--out", s(&dir.path().join("o"))],
        &[],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("hiden"));
}

#[test]
fn run_writes_reconstructible_deterministic_reports() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = fixture(dir.path());
    let cfg = write(dir.path(), "lr.json", LOGREG_DIALOGUE);
    let run = |out: &str, threads: &str| {
        let o = argmine(
            &["run", "--config", s(&cfg), "--corpus", s(&corpus), "--out", s(&dir.path().join(out))],
            &[("ARGMINE_THREADS", threads)],
        );
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        fs::read(dir.path().join(out).join("report.json")).unwrap()
    };
    let a = run("a", "1");
    let b = run("b", "1");
    let c = run("c", "3");
    assert_eq!(a, b);
    assert_eq!(a, c);

    let exp = Experiment::from_json(LOGREG_DIALOGUE).unwrap();
    let lib = run_experiment_with(&load_corpus(&corpus).unwrap(), &exp, Some(1)).unwrap();
    let files = experiment_files(&lib).unwrap();
    assert_eq!(a, files[0].1);
    assert_eq!(fs::read(dir.path().join("a/report.md")).unwrap(), files[1].1);

    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("a/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config_sha256"], sha256_hex(LOGREG_DIALOGUE.as_bytes()));
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(manifest["seed"], 2);
}

#[test]
fn majority_report_has_kappa_column() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = fixture(dir.path());
    let cfg = write(dir.path(), "maj.json", MAJORITY);
    let out = dir.path().join("o");
    let o = argmine(&["run", "--config", s(&cfg), "--corpus", s(&corpus), "--out", s(&out)], &[]);
    assert_eq!(o.status.code(), Some(0));
    let md = fs::read_to_string(out.join("report.md")).unwrap();
    assert!(md.contains("Kappa"));

    // report re-renders the saved json
    let o = argmine(&["report", s(&out.join("report.json"))], &[]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8(o.stdout).unwrap(), md);
}

#[test]
fn seed_override_changes_the_echoed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = fixture(dir.path());
    let cfg = write(dir.path(), "maj.json", MAJORITY);
    let out = dir.path().join("o");
    let o = argmine(
        &["run", "--config", s(&cfg), "--corpus", s(&corpus), "--out", s(&out), "--seed", "77"],
        &[],
    );
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&fs::read(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["experiment"]["seed"], 77);
}

#[test]
fn ablate_flag_writes_one_report_per_group() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = fixture(dir.path());
    let cfg = write(dir.path(), "lr.json", LOGREG_DIALOGUE);
    let out = dir.path().join("o");
    let o = argmine(
        &["run", "--config", s(&cfg), "--corpus", s(&corpus), "--out", s(&out), "--ablate"],
        &[],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for g in ["dlg_semantic_density", "dlg_lexical", "dlg_syntax"] {
        assert!(out.join("ablation").join(g).join("report.json").is_file(), "{g}");
    }
    let exp = Experiment::from_json(LOGREG_DIALOGUE).unwrap();
    let ab = run_ablation(&load_corpus(&corpus).unwrap(), &exp, &[], Some(1)).unwrap();
    assert_eq!(fs::read_to_string(out.join("ablation.md")).unwrap(), render_ablation(&ab));
    assert_eq!(fs::read_to_string(out.join("report.md")).unwrap(), render_report(&ab.reference));
}

#[test]
fn ablate_command_rejects_unknown_group() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = fixture(dir.path());
    let cfg = write(dir.path(), "lr.json", LOGREG_DIALOGUE);
    let out = dir.path().join("o");
    let args = ["ablate", "--config", s(&cfg), "--corpus", s(&corpus), "--out", s(&out)];
    let o = argmine(&[&args[..], &["--groups", "dlg_nonsense"]].concat(), &[]);
    assert_eq!(o.status.code(), Some(2));
    let o = argmine(&[&args[..], &["--groups", "dlg_syntax"]].concat(), &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(out.join("ablation/dlg_syntax/report.json").is_file());
    assert!(!out.join("ablation/dlg_lexical").exists());
}

#[test]
fn features_command_prints_catalog() {
    let o = argmine(&["features"], &[]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8(o.stdout).unwrap(), render_feature_catalog());
}

#[test]
fn runtime_failure_exits_1() {
    // a two-transcript corpus where one transcript holds every warrant
    let dir = tempfile::tempdir().unwrap();
    let lines = [
        r#"{"id": "a", "moves": [{"speaker": "S1", "text": "I think so.", "arg": "claim", "spec": "low"}, {"speaker": "S2", "text": "Page two says it.", "arg": "evidence", "spec": "med"}]}"#,
        r#"{"id": "b", "moves": [{"speaker": "S1", "text": "Because it shows why.", "arg": "warrant", "spec": "med"}]}"#,
    ];
    let corpus = write(dir.path(), "c.jsonl", &lines.join("\n"));
    let cfg = write(dir.path(), "lr.json", LOGREG_DIALOGUE);
    let o = argmine(
        &["run", "--config", s(&cfg), "--corpus", s(&corpus), "--out", s(&dir.path().join("o"))],
        &[],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stderr).unwrap().contains("absent from the training fold"));
}
