use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tweetcast(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tweetcast"))
        .args(args)
        .env("NO_COLOR", "1")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn small_fixture(dir: &Path) {
    let out = dir.to_str().unwrap();
    let o = tweetcast(&["fixture", "--scale", "small", "--seed", "4", "--out", out]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn run_all_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    small_fixture(dir.path());
    let config = dir.path().join("config.json");
    let config = config.to_str().unwrap();
    let mut summaries = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let o = tweetcast(&[
            "run-all",
            "--config",
            config,
            "--out",
            out.to_str().unwrap(),
            "--jobs",
            "2",
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(stdout(&o).contains("rate-series-thcnt"));
        assert!(!stdout(&o).contains('\x1b'));
        summaries.push(fs::read(out.join("summary.txt")).unwrap());
    }
    assert_eq!(summaries[0], summaries[1]);
}

#[test]
fn predictor_override_replaces_experiments() {
    let dir = tempfile::tempdir().unwrap();
    small_fixture(dir.path());
    let config = dir.path().join("config.json");
    let o = tweetcast(&[
        "run-all",
        "--config",
        config.to_str().unwrap(),
        "--predictors",
        "thcnt,avg-rate+thcnt",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = dir.path().join("report");
    assert!(report.join("fits/thcnt.json").exists());
    assert!(report.join("fits/avg-rate_thcnt.json").exists());
    assert!(!report.join("fits/rate-series-thcnt.json").exists());
}

#[test]
fn stage_subcommands_chain() {
    let dir = tempfile::tempdir().unwrap();
    small_fixture(dir.path());
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let (corpus, topics, labels) = (p("corpus.jsonl"), p("topics.json"), p("labels.jsonl"));

    let o = tweetcast(&["ingest", "--corpus", &corpus, "--topics", &topics]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["topics"].as_array().unwrap().len(), 12);

    let o = tweetcast(&[
        "features",
        "--corpus",
        &corpus,
        "--topics",
        &topics,
        "--out",
        &p("feat"),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = fs::read_to_string(dir.path().join("feat/features.csv")).unwrap();
    assert!(table.starts_with("topic,feature,index,value"));

    let o = tweetcast(&[
        "sentiment-train",
        "--labels",
        &labels,
        "--topics",
        &topics,
        "--out",
        &p("model"),
        "--ngram-order",
        "5",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["order"], 5);

    let o = tweetcast(&[
        "sentiment-apply",
        "--model",
        &p("model/model.json"),
        "--corpus",
        &corpus,
        "--topics",
        &topics,
        "--out",
        &p("applied"),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let polarity = fs::read_to_string(dir.path().join("applied/polarity.csv")).unwrap();
    assert_eq!(polarity.lines().count(), 1 + 12 * 3);
}

#[test]
fn fit_and_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let design = dir.path().join("d.csv");
    let rows: String = (0..12)
        .map(|i| {
            let (a, b) = (i as f64, ((i * 7) % 5) as f64);
            format!(
                "{i},{a},{b},{}\n",
                1.0 + 2.0 * a - b + if i % 2 == 0 { 0.1 } else { -0.1 }
            )
        })
        .collect();
    fs::write(&design, format!("id,a,b,y\n{rows}")).unwrap();
    let o = tweetcast(&[
        "fit",
        "--design",
        design.to_str().unwrap(),
        "--response",
        "y",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("(Intercept)"));

    let preds = dir.path().join("p.csv");
    fs::write(&preds, "predicted,actual\n10,10\n9,11\n").unwrap();
    let o = tweetcast(&["evaluate", "--predictions", preds.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let amape = v["amape"].as_f64().unwrap();
    assert!((amape - 10.0).abs() < 1e-12, "{amape}");
    assert_eq!(v["score"].as_f64().unwrap(), 100.0 - amape);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();

    // usage errors
    assert_eq!(tweetcast(&["run-all"]).status.code(), Some(1));
    assert_eq!(tweetcast(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        tweetcast(&["fixture", "--scale", "huge", "--out", "x"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(tweetcast(&["--help"]).status.code(), Some(0));

    // data error naming the missing file
    let corpus = dir.path().join("c.jsonl");
    fs::write(&corpus, "").unwrap();
    let o = tweetcast(&[
        "ingest",
        "--corpus",
        corpus.to_str().unwrap(),
        "--topics",
        "/no/such/topics.json",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("/no/such/topics.json"),
        "{}",
        stderr(&o)
    );
    assert!(!stderr(&o).contains('\x1b'));

    // numerical error: second column duplicates the first
    let design = dir.path().join("d.csv");
    fs::write(&design, "a,b,y\n1,2,1\n2,4,3\n3,6,2\n4,8,5\n5,10,4\n").unwrap();
    let o = tweetcast(&[
        "fit",
        "--design",
        design.to_str().unwrap(),
        "--response",
        "y",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains('b'));
}

#[test]
fn empty_corpus_run_succeeds_with_warning() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.jsonl"), "").unwrap();
    fs::write(
        dir.path().join("t.json"),
        r#"[{"name":"Avatar","keywords":["avatar"],"release":"2009-12-18","theater_count":3452}]"#,
    )
    .unwrap();
    fs::write(
        dir.path().join("config.json"),
        r#"{"corpora":["c.jsonl"],"topics":"t.json"}"#,
    )
    .unwrap();
    let o = tweetcast(&[
        "run-all",
        "--config",
        dir.path().join("config.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("zero topics"));
}
