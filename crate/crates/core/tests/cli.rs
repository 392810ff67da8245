use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lexlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lexlab")).args(args).output().unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn generate_writes_header_and_utterances() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.txt");
    let o = lexlab(&["generate", "--kind", "np", "--n", "50", "--seed", "9", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body.len(), 50);

    let stdout = lexlab(&["generate", "--kind", "np", "--n", "50", "--seed", "9"]);
    assert_eq!(String::from_utf8(stdout.stdout).unwrap(), text);
}

#[test]
fn runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let body = "seed = 77\ntest_mode = on\nexemplar_count = 2000\nminimum_amount_of_data = 1000\n";
    let a = write_config(dir.path(), "a.cfg", &format!("{body}output_dir = a\n"));
    let b = write_config(dir.path(), "b.cfg", &format!("{body}output_dir = b\n"));
    for cfg in [&a, &b] {
        let o = lexlab(&["run", "--config", cfg]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["corpus.txt", "frequency.csv", "daughter.jsonl", "lexstats.csv", "topk.csv", "boxplot.csv", "fisher.json"]
    {
        let x = fs::read(dir.path().join("a").join(f)).unwrap();
        let y = fs::read(dir.path().join("b").join(f)).unwrap();
        assert!(x == y, "{f} differs between identical runs");
    }
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for (name, body) in [
        ("unknown.cfg", "seed = 1\ncolour = blue\n"),
        ("zero.cfg", "seed = 1\nthreshold_for_functional_category_acquisition = 0\n"),
        ("noseed.cfg", "exemplar_count = 10\n"),
    ] {
        let cfg = write_config(dir.path(), name, body);
        let o = lexlab(&["run", "--config", &cfg]);
        assert_eq!(o.status.code(), Some(2), "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let cfg = write_config(dir.path(), "t.cfg", "seed = 5\nexemplar_count = 10\noutput_dir = t\n");
    let cfg2 = write_config(dir.path(), "u.cfg", "seed = 5\nexemplar_count = 10\noutput_dir = u\n");
    let o = lexlab(&["run-pair", "--train", &cfg, "--test", &cfg2]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains('5'));
}

#[test]
fn pipeline_failure_exits_3_and_logs_phase() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "m.cfg", "seed = 1\ncorpus_path = nowhere.txt\noutput_dir = out\n");
    let o = lexlab(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(3));
    let log = json(&dir.path().join("out/log.json"));
    assert_eq!(log["aborted_at"], "corpus");
}

#[test]
fn short_run_reports_not_fired() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "s.cfg", "seed = 2\nexemplar_count = 1000\noutput_dir = s\n");
    let o = lexlab(&["run", "--config", &cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let acq = json(&dir.path().join("s/acquisition.json"));
    assert_eq!(acq["fired"], false);
    assert_eq!(acq["not_fired"], "below_min_exemplars");
    assert!(!dir.path().join("s/fisher.json").exists());
}

#[test]
fn evaluate_and_export_plots() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "e.cfg",
        "seed = 3\ntype_of_phrase = np\nexemplar_count = 600\nminimum_amount_of_data = 600\noutput_dir = e\n",
    );
    assert!(lexlab(&["run", "--config", &cfg]).status.success());
    let run = dir.path().join("e");
    let report = dir.path().join("report");
    let o = lexlab(&[
        "evaluate",
        "--lexicon-dump",
        run.join("daughter.jsonl").to_str().unwrap(),
        "--corpus",
        run.join("corpus.txt").to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["lexstats.csv", "topk.csv", "boxplot.csv", "fisher.json"] {
        assert_eq!(fs::read(report.join(f)).unwrap(), fs::read(run.join(f)).unwrap(), "{f}");
    }

    let o = lexlab(&["export-plots", "--run-dir", run.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let points = fs::read_to_string(run.join("plot_points.csv")).unwrap();
    assert!(points.lines().count() > 1);
}
