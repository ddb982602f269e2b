//! Acceptance suite: one PASS/FAIL/SKIP line per criterion, nonzero exit on
//! any failure.
//!
//! Set `CUSHLEPOR_PSQM_TSV` to a canonical-schema TSV with a `psqm` column to
//! run the data-dependent check.

mod common;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use common::oracle::{all_sequences, naive_hlepor};
use cushlepor::corpus::{pearson, rmse, write_corpus, Corpus, CorpusFormat, GoldScale, SegmentRecord};
use cushlepor::metric::hlepor;
use cushlepor::optimizer::{objective, split_holdout, tune_random, tune_tpe, CorpusObjective, SearchSpace, TpeConfig};
use cushlepor::params::{preset, presets, Flavor};
use cushlepor::HLeporParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn random_params(rng: &mut ChaCha8Rng) -> HLeporParams {
    let mut real = || rng.gen_range(0.01..20.0);
    let (a, b, e, p, r) = (real(), real(), real(), real(), real());
    HLeporParams::new(a, b, rng.gen_range(1..=10), e, p, r).unwrap()
}

fn random_text(rng: &mut ChaCha8Rng) -> String {
    const WORDS: &[&str] = &["The", "comet", "struck", "earth", "a", "big", "río", "naïve", "3.5", "don't", "x", "the"];
    const EDGES: &[&str] = &["", "", "", "(", ")", ",", ".", "\"", "!", "?"];
    let len = rng.gen_range(1..=30);
    (0..len)
        .map(|_| {
            let w = WORDS[rng.gen_range(0..WORDS.len())];
            format!("{}{w}{}", EDGES[rng.gen_range(0..EDGES.len())], EDGES[rng.gen_range(0..EDGES.len())])
        })
        .collect::<Vec<_>>()
        .join(if rng.gen_bool(0.1) { "  " } else { " " })
}

fn identity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let texts: Vec<String> = (0..1000).map(|_| random_text(&mut rng)).collect();
    let params: Vec<HLeporParams> = (0..50).map(|_| random_params(&mut rng)).collect();
    let mut worst = 0.0f64;
    for t in &texts {
        for p in &params {
            worst = worst.max((hlepor(t, t, p).unwrap().score - 1.0).abs());
        }
    }
    let elapsed = start.elapsed();
    check(
        worst <= 1e-9 && elapsed < Duration::from_secs(10),
        format!("50000 pairs, max |score-1| {worst:e}, {}", secs(elapsed)),
    )
}

fn hand_trace() -> Outcome {
    let p = HLeporParams::new(1.0, 1.0, 2, 1.0, 1.0, 1.0).unwrap();
    let got = hlepor("a c b", "a b c", &p).unwrap();
    // Alignment a1-a1, c2-c3, b3-b2: |0| + |1| + |1| over 3 words.
    let npd = (0.0 + 1.0 + 1.0) / 3.0;
    let npos = f64::exp(-npd);
    let (lp, hpr) = (1.0, 1.0);
    let score = 3.0 / (1.0 / lp + 1.0 / npos + 1.0 / hpr);
    let ok = (got.npd - 2.0 / 3.0).abs() < 1e-5
        && (got.npos_penal - (-2.0f64 / 3.0).exp()).abs() < 1e-5
        && (got.score - score).abs() < 1e-5;
    check(
        ok,
        format!(
            "npd {:.6}, npos_penal {:.6}, score {:.6} vs independent {score:.6} (the quoted 0.75904 is off by {:.1e})",
            got.npd,
            got.npos_penal,
            got.score,
            (score - 0.75904f64).abs()
        ),
    )
}

fn exhaustive() -> Outcome {
    let start = Instant::now();
    let sequences = all_sequences(&["a", "b", "c"], 4);
    let param_sets = [
        HLeporParams::new(1.0, 1.0, 2, 1.0, 1.0, 1.0).unwrap(),
        preset("en-cs", Flavor::Default).unwrap(),
        preset("zh-en", Flavor::CushleporLm).unwrap(),
        HLeporParams::new(0.5, 12.0, 1, 0.2, 9.0, 3.0).unwrap(),
    ];
    let mut pairs = 0;
    let mut mismatches = 0;
    for h in &sequences {
        let ht = h.join(" ");
        for r in &sequences {
            let rt = r.join(" ");
            pairs += 1;
            for p in &param_sets {
                let got = hlepor(&ht, &rt, p).unwrap();
                let want = naive_hlepor(h, r, p);
                let same = [got.lp, got.npd, got.npos_penal, got.precision, got.recall, got.hpr, got.score]
                    .map(f64::to_bits)
                    == [want.lp, want.npd, want.npos_penal, want.precision, want.recall, want.hpr, want.score]
                        .map(f64::to_bits);
                mismatches += usize::from(!same);
            }
        }
    }
    let elapsed = start.elapsed();
    check(
        pairs == 14_400 && mismatches == 0 && elapsed < Duration::from_secs(60),
        format!("{pairs} pairs x {} parameter sets, {mismatches} bitwise mismatches, {}", param_sets.len(), secs(elapsed)),
    )
}

fn preset_fidelity() -> Outcome {
    // Published value blocks, verbatim.
    const PUBLISHED: [(&str, [&str; 6]); 14] = [
        ("en-cs:default", ["9.0", "1.0", "2", "2.0", "1.0", "7.0"]),
        ("en-ru:default", ["9.0", "1.0", "2", "2.0", "1.0", "7.0"]),
        ("en-de:default", ["9.0", "1.0", "2", "3.0", "7.0", "1.0"]),
        ("cs-en:default", ["1.0", "9.0", "2", "2.0", "1.0", "7.0"]),
        ("es-en:default", ["1.0", "9.0", "2", "2.0", "1.0", "7.0"]),
        ("ru-en:default", ["1.0", "9.0", "2", "2.0", "1.0", "7.0"]),
        ("de-en:default", ["9.0", "1.0", "2", "2.0", "1.0", "3.0"]),
        ("fr-en:default", ["9.0", "1.0", "2", "2.0", "1.0", "3.0"]),
        ("en-es:default", ["9.0", "1.0", "2", "2.0", "1.0", "3.0"]),
        ("en-fr:default", ["9.0", "1.0", "2", "2.0", "1.0", "3.0"]),
        ("zh-en:cushlepor_lm", ["2.85", "4.73", "1", "1.01", "11.13", "4.62"]),
        ("zh-en:cushlepor_psqm", ["9.09", "3.55", "3", "1.01", "14.98", "1.57"]),
        ("en-de:cushlepor_lm", ["2.95", "2.68", "2", "1.0", "11.79", "1.87"]),
        ("en-de:cushlepor_psqm", ["1.13", "1.71", "2", "1.06", "11.90", "1.01"]),
    ];
    let registry = presets();
    let mut bad = Vec::new();
    for (name, values) in PUBLISHED {
        let Some(p) = registry.iter().find(|p| p.name() == name) else {
            bad.push(format!("{name} missing"));
            continue;
        };
        let v = p.params;
        let ours = [v.alpha, v.beta, v.n as f64, v.weight_elp, v.weight_pos, v.weight_pr];
        for (have, text) in ours.iter().zip(values) {
            if *have != text.parse::<f64>().unwrap() {
                bad.push(format!("{name}: {have} != {text}"));
            }
        }
    }
    check(
        bad.is_empty() && registry.len() == PUBLISHED.len(),
        if bad.is_empty() {
            format!("{} presets match their published blocks", registry.len())
        } else {
            bad.join("; ")
        },
    )
}

fn recovery() -> Outcome {
    let start = Instant::now();
    let space = SearchSpace::default();
    let results: Vec<(u64, f64)> = (0..20u64)
        .into_par_iter()
        .map(|seed| {
            let theta = common::hidden_params(&space, seed);
            let corpus = common::with_metric_gold(common::synthetic_pairs(500, 1000 + seed), "gold", &theta);
            let obj = CorpusObjective::new(&corpus, "gold", &GoldScale::unit()).unwrap();
            let config = TpeConfig { seed, budget: 300, ..Default::default() };
            (seed, tune_tpe(&obj, &space, &config).unwrap().best.objective)
        })
        .collect();
    let elapsed = start.elapsed();
    let hits = results.iter().filter(|(_, v)| *v <= 0.01).count();
    let misses: Vec<String> = results
        .iter()
        .filter(|(_, v)| *v > 0.01)
        .map(|(s, v)| format!("seed {s}: {v:.4}"))
        .collect();
    check(
        hits >= 18 && elapsed < Duration::from_secs(300),
        format!(
            "{hits}/20 seeds reach RMSE <= 0.01 at budget 300, {}{}",
            secs(elapsed),
            if misses.is_empty() { String::new() } else { format!(" (misses: {})", misses.join(", ")) }
        ),
    )
}

fn tpe_vs_random() -> Outcome {
    let space = SearchSpace::default();
    let (mut tpe, mut random): (Vec<f64>, Vec<f64>) = (0..20u64)
        .into_par_iter()
        .map(|seed| {
            let config = TpeConfig { seed, budget: 200, ..Default::default() };
            (
                tune_tpe(&common::quadratic, &space, &config).unwrap().best.objective,
                tune_random(&common::quadratic, &space, 200, seed).unwrap().best.objective,
            )
        })
        .unzip();
    let (t, r) = (common::median(&mut tpe), common::median(&mut random));
    check(t <= r, format!("median best at 200 trials: tpe {t:.4}, random {r:.4}"))
}

fn statistics() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    let mut expect = |label: &str, pass: bool| {
        if !pass {
            ok = false;
            notes.push(label.to_string());
        }
    };
    expect("rmse identical", rmse(&[0.3, 0.7, 0.1], &[0.3, 0.7, 0.1]).unwrap() == 0.0);
    expect("rmse swapped", rmse(&[0.0, 1.0], &[1.0, 0.0]).unwrap() == 1.0);
    let closed = (((0.2f64 - 0.1).powi(2) + (0.4f64 - 0.5).powi(2) + (0.9f64 - 0.7).powi(2)) / 3.0).sqrt();
    expect("rmse three-point", rmse(&[0.2, 0.4, 0.9], &[0.1, 0.5, 0.7]).unwrap() == closed);
    let x = [0.5, 1.0, 4.0, -2.0, 3.25];
    let affine: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
    let negated: Vec<f64> = x.iter().map(|v| -v).collect();
    expect("pearson 2x+1", (pearson(&x, &affine).unwrap() - 1.0).abs() < 1e-12);
    expect("pearson -x", pearson(&x, &negated).unwrap() == -1.0);
    expect("pearson [1,2,3]/[1,3,2]", pearson(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap() == 0.5);
    expect("pearson zero variance", pearson(&[1.0, 1.0], &[0.0, 1.0]).is_err());
    check(ok, if notes.is_empty() { "rmse and pearson fixtures exact".into() } else { notes.join(", ") })
}

fn reproducible_tune() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let theta = common::hidden_params(&SearchSpace::default(), 11);
    let corpus = common::with_metric_gold(common::synthetic_pairs(300, 11), "gold", &theta);
    let input = dir.path().join("corpus.tsv");
    write_corpus(&corpus, &input, CorpusFormat::Tsv).unwrap();
    let run = |out: &Path| {
        Command::new(env!("CARGO_BIN_EXE_cushlepor"))
            .args(["tune", "--input"])
            .arg(&input)
            .args(["--gold", "gold", "--seed", "42", "--budget", "300", "--quiet", "--out"])
            .arg(out)
            .status()
            .map(|s| s.success())
            .unwrap_or(false)
    };
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    if !(run(&a) && run(&b)) {
        return Outcome::Fail("tune run failed".into());
    }
    let same = |name: &str| std::fs::read(a.join(name)).ok() == std::fs::read(b.join(name)).ok();
    check(
        same("best.preset") && same("trials.jsonl"),
        format!("best.preset identical: {}, trials.jsonl identical: {}", same("best.preset"), same("trials.jsonl")),
    )
}

/// Reads a canonical-schema TSV, averaging the `psqm` column over repeated
/// (seg_id, system_id) rows from multiple raters.
fn read_rated_tsv(path: &Path) -> Result<Corpus, String> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .quoting(false)
        .flexible(true)
        .from_path(path)
        .map_err(|e| e.to_string())?;
    let header = reader.headers().map_err(|e| e.to_string())?.clone();
    let col = |name: &str| header.iter().position(|h| h == name).ok_or(format!("missing column `{name}`"));
    let (seg, sys, hyp, reference, gold) =
        (col("seg_id")?, col("system_id")?, col("hypothesis")?, col("reference")?, col("psqm")?);
    let mut grouped: BTreeMap<(String, String), (String, String, f64, usize)> = BTreeMap::new();
    for row in reader.records() {
        let row = row.map_err(|e| e.to_string())?;
        let Ok(score) = row.get(gold).unwrap_or("").parse::<f64>() else { continue };
        let key = (row[seg].to_string(), row[sys].to_string());
        let entry = grouped.entry(key).or_insert_with(|| (row[hyp].to_string(), row[reference].to_string(), 0.0, 0));
        entry.2 += score;
        entry.3 += 1;
    }
    let records = grouped
        .into_iter()
        .filter(|(_, (h, r, _, _))| !h.trim().is_empty() && !r.trim().is_empty())
        .map(|((seg_id, system_id), (hypothesis, reference, sum, count))| SegmentRecord {
            seg_id,
            system_id,
            source: None,
            hypothesis,
            reference,
            gold: BTreeMap::from([("psqm".to_string(), sum / count as f64)]),
        })
        .collect();
    Ok(Corpus::new(records))
}

fn heldout_direction() -> Outcome {
    let Some(path) = std::env::var_os("CUSHLEPOR_PSQM_TSV").map(PathBuf::from) else {
        return Outcome::Skip("CUSHLEPOR_PSQM_TSV not set".into());
    };
    if !path.exists() {
        return Outcome::Skip(format!("{} not found", path.display()));
    }
    let corpus = match read_rated_tsv(&path) {
        Ok(c) if !c.is_empty() => c,
        Ok(_) => return Outcome::Fail("no usable rows".into()),
        Err(e) => return Outcome::Fail(e),
    };
    let scale = GoldScale::psqm();
    let (train, held) = split_holdout(&corpus, 20);
    let obj = CorpusObjective::new(&train, "psqm", &scale).unwrap();
    let tuned = tune_tpe(&obj, &SearchSpace::default(), &TpeConfig::default()).unwrap().best;
    let tuned_rmse = objective(&held, "psqm", &scale, &tuned.params).unwrap();
    let default_rmse = objective(&held, "psqm", &scale, &preset("en-de", Flavor::Default).unwrap()).unwrap();
    check(
        tuned_rmse <= default_rmse,
        format!("held-out RMSE tuned {tuned_rmse:.4} vs en-de default {default_rmse:.4} ({} segments held out)", held.len()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("identity suite", identity),
        ("hand-trace oracle", hand_trace),
        ("exhaustive small-instance equivalence", exhaustive),
        ("preset fidelity", preset_fidelity),
        ("optimizer recovery", recovery),
        ("tpe beats random", tpe_vs_random),
        ("statistics sanity", statistics),
        ("tune reproducibility", reproducible_tune),
        ("held-out direction on rated data", heldout_direction),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (tag, detail) = match run() {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Outcome::Skip(d) => ("SKIP", d),
        };
        println!("{tag} [{}] {name}: {detail}", i + 1);
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
