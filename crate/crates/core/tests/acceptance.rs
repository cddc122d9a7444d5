//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit when
//! any criterion fails. Oracles are computed here, independently of the
//! library code they check.

use std::path::Path;
use std::time::{Duration, Instant};

use chrono::NaiveDate;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use newscast::commands;
use newscast::config::{ExperimentConfig, LoadedConfig};
use newscast::eval::fluctuation::window_length;
use newscast::eval::oos::build_panels;
use newscast::eval::{aspa_test, fluctuation_test, AspaOptions};
use newscast::figas::{score_chunk, Chunk, Engine, Lexicon, TopicSet};
use newscast::midas::testutil::{orthonormal_design, sparse_dgp};
use newscast::midas::{adjust_pvalues, audit_design, double_lasso, lasso_fit, soft_threshold, DoubleLassoOptions, LassoOptions};
use newscast::text::shallow::parse_with_ids;
use newscast::text::{shallow_parse, RawArticle};

const LA_TRIBUNE: &str =
    "The French economy has been experiencing its worst recession since 1968, while Italy entered into recession with a GDP drop.";
const LEXICON: &str = include_str!("../data/lexicon.csv");
const E2E_SEED: u64 = 42;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn criterion_1() -> Outcome {
    let engine = Engine::shipped();
    let article = RawArticle {
        article_id: "tribune".into(),
        outlet: "La Tribune".into(),
        outlet_country: "FR".into(),
        publish_date: NaiveDate::from_ymd_opt(2009, 3, 2).unwrap(),
        title: String::new(),
        body: LA_TRIBUNE.into(),
        language: "en".into(),
    };
    let sentence = shallow_parse(LA_TRIBUNE).unwrap();
    let scores = engine.score_article(&article, &[sentence]);
    let hits: Vec<_> = scores.iter().filter(|s| s.topic == "economy" && s.country == "FR").collect();
    let pass = hits.len() == 1 && hits[0].score <= -0.5;
    outcome(pass, format!("(economy, FR) scores: {:?}", hits.iter().map(|s| s.score).collect::<Vec<_>>()))
}

/// Lemmas of the shipped lexicon, read from the data file.
fn lexicon_lemmas() -> Vec<String> {
    LEXICON
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#') && !l.starts_with('[') && !l.starts_with("lemma,"))
        .filter_map(|l| l.split(',').next())
        .map(str::to_string)
        .collect()
}

fn criterion_2() -> Outcome {
    const CASES: usize = 10_000;
    let lex = Lexicon::shipped();
    let topics = TopicSet::shipped();
    let economy = topics.get("economy").unwrap();
    let unemployment = topics.get("unemployment").unwrap();
    let monpol = topics.get("monpol").unwrap();
    let engine = Engine::shipped();
    let vocab: Vec<String> = lexicon_lemmas().into_iter().filter(|l| !lex.is_negator(l)).collect();
    let words = [
        "the", "economy", "is", "not", "growing", "very", "strong", "Italy", "rose", "unemployment", "fell", "sharply", "and", "banks",
        "industrial", "production", "declined", "its", "worst", "recession", "ECB", "raised", "interest", "rates", "inflation", "in",
        "Germany", "France", "weak", "never", "slightly", ",",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut failures = Vec::new();
    for case in 0..CASES {
        let k = rng.gen_range(1..=8);
        let lemmas: Vec<&str> = (0..k).map(|_| vocab[rng.gen_range(0..vocab.len())].as_str()).collect();
        let base = score_chunk(&Chunk::from_lemmas(&lemmas), economy, &lex).score;
        let mut once = lemmas.clone();
        once.push("not");
        let negated = score_chunk(&Chunk::from_lemmas(&once), economy, &lex).score;
        let mut twice = once.clone();
        twice.push("not");
        let restored = score_chunk(&Chunk::from_lemmas(&twice), economy, &lex).score;
        let reversed = score_chunk(&Chunk::from_lemmas(&lemmas), unemployment, &lex).score;
        if !(-1.0..=1.0).contains(&base) || negated != -base || restored != base || reversed != -base {
            failures.push(format!("case {case} {lemmas:?}: {base} {negated} {restored} {reversed}"));
        }

        // {interest, rate, raise} in any order among unscored fillers.
        let mut rate = vec!["interest", "rate", "raise"];
        for _ in 0..rng.gen_range(0..4) {
            rate.push(["xqa", "xqb", "xqc"][rng.gen_range(0..3)]);
        }
        for i in (1..rate.len()).rev() {
            rate.swap(i, rng.gen_range(0..=i));
        }
        let s = score_chunk(&Chunk::from_lemmas(&rate), monpol, &lex).score;
        if !(s > 0.0) {
            failures.push(format!("case {case} interest-rate chunk {rate:?}: {s}"));
        }

        // Whole sentences through the parser and engine.
        let n = rng.gen_range(1..=20);
        let text = (0..n).map(|_| words[rng.gen_range(0..words.len())]).collect::<Vec<_>>().join(" ");
        let sentence = parse_with_ids(&text, "fuzz", 0).unwrap();
        let article = RawArticle {
            article_id: "fuzz".into(),
            outlet: "o".into(),
            outlet_country: "GB".into(),
            publish_date: NaiveDate::from_ymd_opt(2010, 1, 1).unwrap(),
            title: String::new(),
            body: text.clone(),
            language: "en".into(),
        };
        for sc in engine.score_sentence(&sentence, &article) {
            if !(-1.0..=1.0).contains(&sc.score) {
                failures.push(format!("case {case} `{text}`: {}", sc.score));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("{CASES} cases, {} failures{}", failures.len(), failures.first().map(|f| format!("; first: {f}")).unwrap_or_default()),
    )
}

fn criterion_3() -> Outcome {
    let opts = LassoOptions {
        intercept: false,
        ..LassoOptions::default()
    };
    let (n, p) = (64, 16);
    let mut worst_soft = 0.0f64;
    let mut worst_ols = 0.0f64;
    let mut nonempty = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = orthonormal_design(n, p, &mut rng);
        let y: Vec<f64> = (0..n).map(|_| 2.0 * normal(&mut rng)).collect();
        let z: Vec<f64> = (0..p).map(|j| x.column(j).iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() / n as f64).collect();
        let lambda = rng.gen_range(0.0..0.5);
        let fit = lasso_fit(&x, &y, lambda, &opts).unwrap();
        for j in 0..p {
            worst_soft = worst_soft.max((fit.beta[j] - soft_threshold(z[j], lambda)).abs());
        }
        let zero = lasso_fit(&x, &y, 0.0, &opts).unwrap();
        let ols = x.clone().svd(true, true).solve(&DVector::from_vec(y.clone()), 1e-12).unwrap();
        for j in 0..p {
            worst_ols = worst_ols.max((zero.beta[j] - ols[j]).abs());
        }
        // KKT bound for the empty model: max_j |x_j'y| / n.
        let bound = z.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if !lasso_fit(&x, &y, bound * 1.0001, &opts).unwrap().active.is_empty() {
            nonempty += 1;
        }
    }
    outcome(
        worst_soft < 1e-8 && worst_ols < 1e-6 && nonempty == 0,
        format!("max |soft-threshold gap| {worst_soft:.2e}, max |OLS gap| {worst_ols:.2e}, non-empty above bound {nonempty}"),
    )
}

fn criterion_4() -> Outcome {
    const REPS: u64 = 2000;
    let opts = DoubleLassoOptions::default();
    let (mut covered, mut rejected, mut errors) = (0, 0, 0);
    for rep in 0..REPS {
        let mut rng = ChaCha8Rng::seed_from_u64(10_000 + rep);
        let (y, s, x) = sparse_dgp(200, 50, 1.0, &mut rng);
        match double_lasso(&y, &s, &x, &opts) {
            Ok(r) => covered += usize::from((r.eta_hat - 1.0).abs() <= 1.959_963_984_540_054 * r.std_err),
            Err(_) => errors += 1,
        }
        let mut rng = ChaCha8Rng::seed_from_u64(50_000 + rep);
        let (y, s, x) = sparse_dgp(200, 50, 0.0, &mut rng);
        match double_lasso(&y, &s, &x, &opts) {
            Ok(r) => rejected += usize::from(r.p_value < 0.05),
            Err(_) => errors += 1,
        }
    }
    let coverage = covered as f64 / REPS as f64;
    let size = rejected as f64 / REPS as f64;
    outcome(
        (0.92..=0.98).contains(&coverage) && (0.03..=0.07).contains(&size) && errors == 0,
        format!("{REPS} reps: coverage {coverage:.4}, rejection under eta=0 {size:.4}, errors {errors}"),
    )
}

fn criterion_5() -> Outcome {
    // Two-stage step-up at q = 0.05 by hand: q' = q/(1+q) = 0.047619.
    // Stage 1 thresholds k·q'/6 reject p(1), p(2) only, so m0 = 6 − 2 = 4.
    // Stage 2 thresholds k·q'·6/4/6 = k·0.011905: p(4) = 0.041 ≤ 0.047619
    // and p(5) = 0.09 > 0.059524, so the first four are rejected.
    let p = [0.001, 0.008, 0.039, 0.041, 0.09, 0.7];
    let expected = [true, true, true, true, false, false];
    let six = adjust_pvalues(&p, 0.05).unwrap().rejected;
    let zeros = adjust_pvalues(&[0.0; 12], 0.05).unwrap().rejected;
    let ones = adjust_pvalues(&[1.0; 12], 0.05).unwrap().rejected;
    outcome(
        six == expected && zeros.iter().all(|&r| r) && ones.iter().all(|&r| !r),
        format!("six-vector rejections {six:?}"),
    )
}

fn aspa_panel(rng: &mut ChaCha8Rng, t: usize, horizons: usize, shift: f64) -> Vec<Vec<f64>> {
    (0..horizons).map(|_| (0..t).map(|_| shift + normal(rng)).collect()).collect()
}

fn criterion_6() -> Outcome {
    const RUNS: u64 = 1000;
    let t = 52;
    let (mut size, mut power) = (0, 0);
    for run in 0..RUNS {
        let opts = AspaOptions {
            seed: 900 + run,
            ..AspaOptions::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(run);
        let null = aspa_panel(&mut rng, t, 3, 0.0);
        size += usize::from(aspa_test(&null, "null", &opts).unwrap().p_value < 0.05);
        let alt = aspa_panel(&mut rng, t, 3, 1.0);
        power += usize::from(aspa_test(&alt, "alt", &opts).unwrap().p_value < 0.05);
    }
    let size = size as f64 / RUNS as f64;
    let power = power as f64 / RUNS as f64;
    outcome(
        (0.03..=0.07).contains(&size) && power > 0.80,
        format!("T={t}, 3 horizons, {RUNS} runs: size {size:.3}, power at 1 sd {power:.3}"),
    )
}

fn criterion_7() -> Outcome {
    let mut lengths_ok = true;
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for t in [40, 52, 53, 60, 100] {
        let d: Vec<f64> = (0..t).map(|_| normal(&mut rng)).collect();
        let w = (0.2 * t as f64).ceil() as usize;
        let r = fluctuation_test(&d, 0.2, 0.10, 1).unwrap();
        lengths_ok &= r.window == w && window_length(t, 0.2) == w && r.statistics.len() == t - w + 1;
    }
    const SIMS: u64 = 200;
    let t = 52;
    let (lo, hi) = (t as f64 / 3.0, 2.0 * t as f64 / 3.0);
    let mut localized = 0;
    for sim in 0..SIMS {
        let mut rng = ChaCha8Rng::seed_from_u64(5_000 + sim);
        let d: Vec<f64> = (0..t)
            .map(|i| {
                let gain = if (i as f64) >= lo && (i as f64) < hi { 1.0 } else { 0.0 };
                gain + normal(&mut rng)
            })
            .collect();
        let r = fluctuation_test(&d, 0.2, 0.10, 1).unwrap();
        let mid = r.midpoints[r.argmax()];
        localized += usize::from(mid >= lo && mid < hi);
    }
    let rate = localized as f64 / SIMS as f64;
    outcome(
        lengths_ok && rate >= 0.90,
        format!("path lengths {}, 1-sd gain in the middle third of T={t} localized in {localized}/{SIMS}", if lengths_ok { "ok" } else { "WRONG" }),
    )
}

/// Synthetic fixture plus the full pipeline; returns the loaded config.
fn e2e_run(dir: &Path) -> Result<LoadedConfig, String> {
    commands::synth(dir, None, E2E_SEED).map_err(|e| e.to_string())?;
    let cfg = ExperimentConfig::load(&dir.join("config.toml"), None).map_err(|e| e.to_string())?;
    commands::sentiment(&cfg).map_err(|e| e.to_string())?;
    commands::indicators(&cfg).map_err(|e| e.to_string())?;
    commands::forecast(&cfg).map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn read_rows(path: &Path) -> Vec<csv::StringRecord> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path).unwrap();
    rdr.records().map(Result::unwrap).collect()
}

fn criterion_8(cfg: &LoadedConfig) -> Outcome {
    let audit = std::fs::read_to_string(cfg.output_dir().join("audit.txt")).unwrap();
    let field = |key: &str| -> usize {
        audit
            .lines()
            .find_map(|l| l.strip_prefix(key))
            .and_then(|v| v.parse().ok())
            .unwrap_or(usize::MAX)
    };
    let (checked, violations) = (field("cells_checked="), field("violations="));
    let clean = violations == 0 && checked > 0 && checked != usize::MAX;

    let mut store = commands::load_store(cfg).unwrap();
    let scored = commands::score_corpus(cfg).unwrap();
    let (_, monthly) = commands::monthly_indicators(cfg, &scored.scores);
    commands::add_sentiment(cfg, &mut store, &monthly).unwrap();
    let targets = commands::targets(cfg, &store).unwrap();
    let panels = build_panels(&store, &targets, &cfg.oos_spec()).unwrap();
    let design = panels.iter().find(|d| d.horizon == 90).unwrap();
    let before = audit_design(&store, design);
    let row = design.rows.iter().find(|r| r.target.quarter >= cfg.oos_start).unwrap();
    let newest = row.controls.iter().find(|c| c.series == "ip").unwrap().period;
    let mut corrupted = store.clone();
    let series = corrupted.get_mut(&design.country, "ip").unwrap();
    let moved = &mut series.observations_mut(newest.next()).unwrap()[0];
    let original = moved.release_date;
    moved.release_date = row.info_date - chrono::Duration::days(1);
    let after = audit_design(&corrupted, design);
    let caught = !after.passed() && after.violations.iter().any(|v| v.contains(&row.target.quarter.to_string()));
    outcome(
        clean && before.passed() && caught,
        format!(
            "pipeline audit: {checked} cells, {violations} violations; ip {} release moved from {original} to {} flagged by {} violation(s)",
            newest.next(),
            row.info_date - chrono::Duration::days(1),
            after.violations.len()
        ),
    )
}

fn criterion_9(cfg: &LoadedConfig) -> Outcome {
    let dir = cfg.output_dir();
    let threshold = cfg.config.horizons.nowcast_threshold;
    let planted = "ARXS:sent_economy";
    let noise = "sent_finsector";
    let msfe = read_rows(&dir.join("msfe_ratios.csv"));
    let evaluation = read_rows(&dir.join("evaluation.csv"));
    let mut problems = Vec::new();
    let mut worst_planted = 0.0f64;
    let mut by_h: std::collections::BTreeMap<u32, (Option<f64>, f64)> = Default::default();
    for r in &msfe {
        let (model, h, ratio): (&str, u32, f64) = (&r[1], r[2].parse().unwrap(), r[3].parse().unwrap());
        if model == planted && h > threshold {
            worst_planted = worst_planted.max(ratio);
            if ratio >= 1.0 {
                problems.push(format!("{model} h={h} ratio {ratio:.3}"));
            }
        }
        let e = by_h.entry(h).or_insert((None, 0.0));
        if model == "AVERAGE" {
            e.0 = Some(ratio);
        } else {
            e.1 = e.1.max(ratio);
        }
    }
    let forecast_horizons = cfg.config.horizons.grid().forecast().len();
    let planted_count = msfe.iter().filter(|r| &r[1] == planted && r[2].parse::<u32>().unwrap() > threshold).count();
    if planted_count != forecast_horizons {
        problems.push(format!("{planted_count} planted ratios for {forecast_horizons} forecast horizons"));
    }
    let mut worst_average = 0.0f64;
    for (h, (avg, worst)) in &by_h {
        match avg {
            Some(a) => {
                worst_average = worst_average.max(a / worst);
                if *a > 1.05 * worst {
                    problems.push(format!("AVERAGE h={h} {a:.3} > 1.05 x {worst:.3}"));
                }
            }
            None => problems.push(format!("no AVERAGE ratio at h={h}")),
        }
    }
    let p = |sentiment: &str, subset: &str| -> f64 {
        evaluation
            .iter()
            .find(|r| &r[1] == sentiment && &r[2] == subset)
            .map(|r| r[3].parse().unwrap())
            .unwrap_or(f64::NAN)
    };
    let planted_p = p("sent_economy", "forecast");
    let (noise_now, noise_fc) = (p(noise, "nowcast"), p(noise, "forecast"));
    if !(planted_p < 0.05) {
        problems.push(format!("planted forecast-subset p {planted_p}"));
    }
    if !(noise_now > 0.10 && noise_fc > 0.10) {
        problems.push(format!("noise p {noise_now} / {noise_fc}"));
    }
    outcome(
        problems.is_empty(),
        format!(
            "planted max MSFE ratio beyond {threshold}d {worst_planted:.3}, aSPA p {planted_p:.3}; {noise} p {noise_now:.3}/{noise_fc:.3}; max AVERAGE/worst {worst_average:.3}{}",
            problems.first().map(|p| format!("; {p}")).unwrap_or_default()
        ),
    )
}

fn csv_files(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    names.sort();
    names
}

fn criterion_10(a: &LoadedConfig, b: &LoadedConfig) -> Outcome {
    let (da, db) = (a.output_dir(), b.output_dir());
    let names = csv_files(&da);
    let differing: Vec<&String> = names
        .iter()
        .filter(|n| std::fs::read(da.join(n)).ok() != std::fs::read(db.join(n)).ok())
        .collect();
    outcome(
        !names.is_empty() && differing.is_empty() && csv_files(&db) == names,
        format!("{} CSV files compared, differing: {differing:?}", names.len()),
    )
}

fn main() {
    // `cargo test` passes harness flags; a name filter that excludes this
    // target skips it.
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !args.is_empty() && !args.iter().any(|a| "acceptance".contains(a.as_str()) || a.contains("criterion")) {
        return;
    }
    let mut results: Vec<(usize, Outcome, Duration, Duration)> = Vec::new();
    // `offset` adds time spent before the check, such as the pipeline run.
    let mut run = |n: usize, limit: Duration, offset: Duration, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = f();
        let elapsed = start.elapsed() + offset;
        let status = if o.pass && elapsed <= limit { "PASS" } else { "FAIL" };
        println!("criterion {n:>2} {status} ({:.1}s, limit {}s): {}", elapsed.as_secs_f64(), limit.as_secs(), o.detail);
        results.push((n, o, elapsed, limit));
    };
    let secs = Duration::from_secs;
    run(1, secs(1), Duration::ZERO, &mut criterion_1);
    run(2, secs(30), Duration::ZERO, &mut criterion_2);
    run(3, secs(10), Duration::ZERO, &mut criterion_3);
    run(4, secs(300), Duration::ZERO, &mut criterion_4);
    run(5, secs(1), Duration::ZERO, &mut criterion_5);
    run(6, secs(300), Duration::ZERO, &mut criterion_6);
    run(7, secs(120), Duration::ZERO, &mut criterion_7);

    let tmp_a = tempfile::tempdir().unwrap();
    let tmp_b = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let first = e2e_run(tmp_a.path());
    let e2e_time = start.elapsed();
    let second = e2e_run(tmp_b.path());
    match (&first, &second) {
        (Ok(a), Ok(b)) => {
            run(8, secs(900), Duration::ZERO, &mut || criterion_8(a));
            run(9, secs(900), e2e_time, &mut || criterion_9(a));
            run(10, secs(1800), Duration::ZERO, &mut || criterion_10(a, b));
        }
        _ => {
            let err = first.as_ref().err().or(second.as_ref().err()).cloned().unwrap_or_default();
            for n in 8..=10 {
                println!("criterion {n:>2} FAIL: end-to-end run failed: {err}");
                results.push((n, outcome(false, err.clone()), Duration::ZERO, Duration::ZERO));
            }
        }
    }
    println!("end-to-end pipeline: {:.1}s per run", e2e_time.as_secs_f64());
    let failed: Vec<usize> = results.iter().filter(|(_, o, e, l)| !o.pass || e > l).map(|r| r.0).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria PASS", results.len());
    } else {
        println!("acceptance: FAIL {failed:?}");
        std::process::exit(1);
    }
}
