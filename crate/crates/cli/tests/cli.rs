use std::path::Path;
use std::process::{Command, Output};

fn semcom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semcom")).args(args).env_remove("SEMCOM_SEED").output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = semcom(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn number(args: &[&str]) -> f64 {
    stdout(args).trim().parse().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn calculators() {
    assert_eq!(number(&["entropy", "0.5", "0.25", "0.125", "0.125"]), 1.75);
    assert_eq!(number(&["calc", "entropy", "0.5", "0.5"]), 1.0);
    assert_eq!(number(&["kb-gain", "--hc", "4", "--ikb", "2"]), 2.0);
    assert_eq!(number(&["capacity", "--skb", "1", "--hc", "2", "--m", "2", "--bw", "1", "--snr-linear", "1"]), 1.0);
    let combined = stdout(&["combine", "0.25", "0.25", "0.5", "--groups", "0,1;2"]);
    assert_eq!(combined, "probs\t0.5,0.5\nentropy_before\t1.5\nentropy_after\t1\n");
}

#[test]
fn code_prints_fano_codewords() {
    let text = stdout(&["code", "0.5", "0.25", "0.125", "0.125"]);
    for w in ["0", "10", "110", "111"] {
        assert!(text.lines().any(|l| l.split_whitespace().last() == Some(w)), "{text}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(semcom(&["entropy", "0.5", "0.6"]).status.code(), Some(3));
    assert_eq!(semcom(&["kb-gain", "--hc", "2", "--ikb", "2"]).status.code(), Some(3));
    assert_eq!(semcom(&["experiment", "fig11"]).status.code(), Some(2));
    assert_eq!(semcom(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(semcom(&["entropy", "--space", "/nonexistent/space.json"]).status.code(), Some(3));
}

#[test]
fn bad_config_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"messages": 0}"#).unwrap();
    let out = semcom(&["experiment", "fig6", "--config", path(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("messages"));
    std::fs::write(&cfg, r#"{"bogus": 1}"#).unwrap();
    assert_eq!(semcom(&["experiment", "fig6", "--config", path(&cfg)]).status.code(), Some(2));
}

#[test]
fn experiment_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig6.csv");
    let args = ["experiment", "fig6", "--messages", "200", "--seed", "7", "--out", path(&out)];
    stdout(&args);
    let first = std::fs::read_to_string(&out).unwrap();
    stdout(&args);
    assert_eq!(first, std::fs::read_to_string(&out).unwrap());
    assert!(first.starts_with("# experiment: fig6\n# config: {"));
    let header = first.lines().find(|l| !l.starts_with('#')).unwrap();
    assert!(header.starts_with("snr_db,flip_prob,seed,n,traditional,parity,semantic"));
    assert_eq!(first.lines().filter(|l| !l.starts_with('#')).count(), 10);
}

#[test]
fn channel_sim_emits_one_row_per_codec_and_point() {
    let text = stdout(&["channel-sim", "--messages", "50", "--snr-start", "0", "--snr-stop", "10", "--snr-step", "5"]);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert!(rows[0].starts_with("codec,snr_db"));
    assert_eq!(rows.len(), 1 + 3 * 3);
}

#[test]
fn generated_sources_feed_the_calculators() {
    let dir = tempfile::tempdir().unwrap();
    let space = dir.path().join("space.json");
    let kb = dir.path().join("kb.json");
    let ens = dir.path().join("ens.json");

    stdout(&["sources", "space", "--attrs", "3,4", "--seed", "11", "--out", path(&space)]);
    let h = number(&["entropy", "--space", path(&space)]);
    let text = stdout(&["categorizing-entropy", "--space", path(&space), "--all"]);
    for l in text.lines() {
        let v: f64 = l.split_whitespace().last().unwrap().parse().unwrap();
        assert!((v - h).abs() < 1e-9, "{l}");
    }

    stdout(&["sources", "synonyms", "--space", path(&space), "--out", path(&kb)]);
    let text = stdout(&["code", "--kind", "semantic-fano-kb", "--space", path(&space), "--kb", path(&kb)]);
    assert!(!text.is_empty());

    stdout(&["sources", "kb", "--n", "4", "--k", "2", "--a", "2", "--rho", "0.5", "--ensemble-out", path(&ens), "--out", path(&kb)]);
    let hc = number(&["entropy", "--ensemble", path(&ens)]);
    let hs = number(&["entropy", "--ensemble", path(&ens), "--kb", path(&kb)]);
    let gain = number(&["kb-gain", "--ensemble", path(&ens), "--kb", path(&kb)]);
    assert!(hs <= hc);
    assert!((gain - hc / hs).abs() < 1e-9);
}

#[test]
fn seed_comes_from_the_environment() {
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_semcom"))
            .args(["sources", "space", "--attrs", "3,3"])
            .env("SEMCOM_SEED", seed)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("5"), run("5"));
    assert_ne!(run("5"), run("6"));
}
