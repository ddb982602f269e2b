//! Shared fixtures for integration tests.
#![allow(dead_code)]

pub mod oracle;

use std::collections::BTreeMap;

use cushlepor::corpus::{score_corpus, Corpus, SegmentRecord};
use cushlepor::optimizer::SearchSpace;
use cushlepor::HLeporParams;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const VOCAB: &[&str] = &[
    "the", "a", "of", "to", "and", "in", "is", "it", "that", "was", "for", "on", "with", "as", "he", "she", "they",
    "at", "by", "this", "from", "but", "not", "comet", "earth", "struck", "time", "did", "house", "river", "green",
    "small", "large", "quickly", "said", "report", "government", "new", "year", "people", "city", "water", "light",
    "night", "day", "man", "woman", "child", "world", "life",
];

fn sentence(rng: &mut ChaCha8Rng) -> Vec<&'static str> {
    let len = rng.gen_range(4..=24);
    // Skewed draws so function words repeat within a sentence.
    (0..len)
        .map(|_| {
            let i = if rng.gen_bool(0.5) { rng.gen_range(0..12) } else { rng.gen_range(0..VOCAB.len()) };
            VOCAB[i]
        })
        .collect()
}

fn perturb(reference: &[&'static str], rng: &mut ChaCha8Rng) -> Vec<&'static str> {
    let mut hyp: Vec<&'static str> = reference.to_vec();
    let edits = rng.gen_range(0..=6);
    for _ in 0..edits {
        match rng.gen_range(0..6) {
            0 if hyp.len() > 1 => {
                let i = rng.gen_range(0..hyp.len());
                hyp.remove(i);
            }
            1 => {
                let i = rng.gen_range(0..=hyp.len());
                hyp.insert(i, VOCAB[rng.gen_range(0..VOCAB.len())]);
            }
            2 => {
                let i = rng.gen_range(0..hyp.len());
                hyp[i] = VOCAB[rng.gen_range(0..VOCAB.len())];
            }
            3 if hyp.len() > 1 => {
                let i = rng.gen_range(0..hyp.len() - 1);
                hyp.swap(i, i + 1);
            }
            4 if hyp.len() > 3 => {
                // Move a chunk elsewhere.
                let start = rng.gen_range(0..hyp.len() - 2);
                let end = rng.gen_range(start + 1..hyp.len());
                let chunk: Vec<_> = hyp.drain(start..end).collect();
                let at = rng.gen_range(0..=hyp.len());
                for (k, w) in chunk.into_iter().enumerate() {
                    hyp.insert(at + k, w);
                }
            }
            5 if rng.gen_bool(0.2) => hyp.shuffle(rng),
            _ => {}
        }
    }
    if hyp.is_empty() {
        hyp.push(reference[0]);
    }
    hyp
}

/// `size` segment pairs without gold scores.
pub fn synthetic_pairs(size: usize, seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let records = (0..size)
        .map(|i| {
            let reference = sentence(&mut rng);
            let hyp = perturb(&reference, &mut rng);
            SegmentRecord {
                seg_id: format!("s{i}"),
                system_id: format!("sys{}", i % 5),
                source: None,
                hypothesis: hyp.join(" "),
                reference: reference.join(" "),
                gold: BTreeMap::new(),
            }
        })
        .collect();
    Corpus::new(records)
}

/// Adds a `gold` column holding the metric's own scores under `params`.
pub fn with_metric_gold(mut corpus: Corpus, column: &str, params: &HLeporParams) -> Corpus {
    let scores = score_corpus(&corpus, params).expect("synthetic corpus scores");
    for (record, score) in corpus.records.iter_mut().zip(scores.scores()) {
        record.gold.insert(column.to_string(), score);
    }
    corpus
}

/// Hidden parameters drawn uniformly from `space`.
pub fn hidden_params(space: &SearchSpace, seed: u64) -> HLeporParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_cafe);
    space.sample_uniform(&mut rng)
}

pub fn quadratic(p: &HLeporParams) -> cushlepor::Result<f64> {
    let w = [p.alpha, p.beta, p.weight_elp, p.weight_pos, p.weight_pr];
    Ok(w.iter().map(|v| (v - 5.0).powi(2)).sum::<f64>() + (p.n as f64 - 2.0).powi(2))
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 0 {
        (values[m - 1] + values[m]) / 2.0
    } else {
        values[m]
    }
}
