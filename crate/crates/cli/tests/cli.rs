use std::path::Path;
use std::process::{Command, Output};

fn newscast(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_newscast")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write_config(dir: &Path, corpus: &str) -> String {
    std::fs::write(dir.join("corpus.jsonl"), corpus).unwrap();
    let path = dir.join("config.toml");
    std::fs::write(&path, "seed = 3\ncountries = [\"FR\"]\n\n[paths]\ncorpus = \"corpus.jsonl\"\n").unwrap();
    path.to_string_lossy().into_owned()
}

fn data_lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

const TRIBUNE: &str = r#"{"id":"t1","outlet":"La Tribune","country":"FR","date":"2009-03-02","title":"","body":"The French economy has been experiencing its worst recession since 1968, while Italy entered into recession with a GDP drop.","language":"en"}"#;

#[test]
fn single_article_corpus_scores_once() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &format!("{TRIBUNE}\n"));
    let out = newscast(&["--config", &config, "sentiment"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let scores = dir.path().join("output/scores.csv");
    let text = std::fs::read_to_string(&scores).unwrap();
    assert!(text.starts_with("# newscast 0.1.0 config_hash="));
    assert!(text.lines().next().unwrap().ends_with(" seed=3"));
    let rows = data_lines(&scores);
    assert_eq!(rows[0], "article_id,sentence_index,topic,country,score,n_terms");
    let economy: Vec<&String> = rows.iter().filter(|r| r.contains(",economy,FR,")).collect();
    assert_eq!(economy.len(), 1);
    let score: f64 = economy[0].split(',').nth(4).unwrap().parse().unwrap();
    assert!(score <= -0.5);
}

#[test]
fn empty_corpus_gives_header_only_scores() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "");
    let out = newscast(&["--config", &config, "sentiment"]);
    assert_eq!(code(&out), 0);
    assert_eq!(data_lines(&dir.path().join("output/scores.csv")).len(), 1);
}

#[test]
fn malformed_record_is_partial() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &format!("{TRIBUNE}\n{{not json\n"));
    let out = newscast(&["--config", &config, "ingest"]);
    assert_eq!(code(&out), 2);
    let diags = std::fs::read_to_string(dir.path().join("output/diagnostics_ingest.txt")).unwrap();
    assert!(diags.contains("line 2"));
    let parses = std::fs::read_to_string(dir.path().join("output/parses.conllu")).unwrap();
    assert!(parses.contains("# article_id = t1"), "{parses}");

    // Scoring from the parse file matches scoring with the built-in parser.
    let direct = newscast(&["--config", &config, "sentiment"]);
    assert_eq!(code(&direct), 2);
    let scores = dir.path().join("output/scores.csv");
    let expected = data_lines(&scores);
    let with_parses = format!("{}parses = \"output/parses.conllu\"\n", std::fs::read_to_string(&config).unwrap());
    std::fs::write(&config, with_parses).unwrap();
    assert_eq!(code(&newscast(&["--config", &config, "sentiment"])), 2);
    assert_eq!(data_lines(&scores), expected);
}

#[test]
fn fatal_errors_exit_one() {
    assert_eq!(code(&newscast(&["sentiment"])), 1);
    assert_eq!(code(&newscast(&["--config", "/nonexistent/config.toml", "sentiment"])), 1);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.toml");
    std::fs::write(&path, "seed = 1\nbogus = 2\n").unwrap();
    let out = newscast(&["--config", path.to_str().unwrap(), "vintages"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
    std::fs::write(&path, "seed = 1\n").unwrap();
    let out = newscast(&["--config", path.to_str().unwrap(), "vintages"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("paths.vintages"));
}

#[test]
fn full_pipeline_on_synthetic_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = dir.path().join("fixture");
    let fixture_s = fixture.to_str().unwrap();
    let out = newscast(&["synth", "--out", fixture_s, "--seed", "7"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let config = fixture.join("config.toml");
    let config = config.to_str().unwrap();
    for cmd in ["ingest", "sentiment", "indicators", "vintages", "forecast", "evaluate", "report"] {
        let out = newscast(&["--config", config, cmd]);
        assert_eq!(code(&out), 0, "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let output = fixture.join("output");
    for f in [
        "parses.conllu",
        "scores.csv",
        "indicators.csv",
        "correlations.csv",
        "densities.csv",
        "vintages_normalized.csv",
        "targets.csv",
        "insample.csv",
        "forecasts.csv",
        "msfe_ratios.csv",
        "evaluation.csv",
        "fluctuation.csv",
        "pa_tests.csv",
        "audit.txt",
        "report.txt",
    ] {
        let text = std::fs::read_to_string(output.join(f)).unwrap_or_else(|e| panic!("{f}: {e}"));
        assert!(text.starts_with("# newscast 0.1.0 config_hash="), "{f}");
        assert!(text.lines().next().unwrap().ends_with(" seed=7"), "{f}");
    }
    let audit = std::fs::read_to_string(output.join("audit.txt")).unwrap();
    assert!(audit.contains("violations=0"));

    // The seed flag overrides the config and thread count does not matter.
    let evaluation = std::fs::read(output.join("evaluation.csv")).unwrap();
    let out = newscast(&["--config", config, "--jobs", "3", "evaluate"]);
    assert_eq!(code(&out), 0);
    assert_eq!(std::fs::read(output.join("evaluation.csv")).unwrap(), evaluation);
    let out = newscast(&["--config", config, "--seed", "8", "evaluate"]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(output.join("evaluation.csv")).unwrap();
    assert!(text.lines().next().unwrap().ends_with(" seed=8"));
}
