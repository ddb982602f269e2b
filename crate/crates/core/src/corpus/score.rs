use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{normalize_gold, pearson, rmse, GoldScale, Histogram};
use super::{Corpus, SegmentRecord};
use crate::error::{Error, Result};
use crate::metric::{FactorBreakdown, SegmentStats};
use crate::params::HLeporParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentScore {
    pub seg_id: String,
    pub system_id: String,
    pub breakdown: FactorBreakdown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemScore {
    pub system_id: String,
    pub segments: usize,
    pub mean: f64,
}

/// Agreement between metric scores and one normalized gold column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    pub gold_column: String,
    pub scale: GoldScale,
    /// Segments carrying the gold value.
    pub segments: usize,
    pub rmse: f64,
    /// `None` when either side has zero variance.
    pub pearson: Option<f64>,
    /// Gold values that fell outside the scale.
    pub clamped: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusScores {
    pub params: HLeporParams,
    /// In corpus order.
    pub segments: Vec<SegmentScore>,
    /// Sorted by system id.
    pub systems: Vec<SystemScore>,
    pub histogram: Histogram,
    pub agreement: BTreeMap<String, Agreement>,
}

impl CorpusScores {
    pub fn scores(&self) -> Vec<f64> {
        self.segments.iter().map(|s| s.breakdown.score).collect()
    }

    /// Computes agreement with `gold_column` and stores it.
    pub fn attach_agreement(&mut self, corpus: &Corpus, gold_column: &str, scale: &GoldScale) -> Result<&Agreement> {
        let a = agreement(corpus, self, gold_column, scale)?;
        Ok(self.agreement.entry(gold_column.to_string()).or_insert(a))
    }
}

fn score_record(record: &SegmentRecord, corpus: &Corpus, params: &HLeporParams) -> Result<FactorBreakdown> {
    let hyp = corpus.tokenizer.tokenize(&record.hypothesis);
    let reference = corpus.tokenizer.tokenize(&record.reference);
    SegmentStats::from_tokens(&hyp, &reference, params.n as usize)
        .map(|stats| stats.breakdown(params))
        .map_err(|e| Error::Segment {
            seg_id: record.seg_id.clone(),
            system_id: record.system_id.clone(),
            source: Box::new(e),
        })
}

/// Scores every segment (in parallel, assembled in corpus order) and
/// aggregates per-system means and the score histogram.
pub fn score_corpus(corpus: &Corpus, params: &HLeporParams) -> Result<CorpusScores> {
    params.validate()?;
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let results: Vec<Result<FactorBreakdown>> = corpus
        .records
        .par_iter()
        .map(|r| score_record(r, corpus, params))
        .collect();
    let mut segments = Vec::with_capacity(results.len());
    for (record, result) in corpus.records.iter().zip(results) {
        segments.push(SegmentScore {
            seg_id: record.seg_id.clone(),
            system_id: record.system_id.clone(),
            breakdown: result?,
        });
    }

    let mut by_system: BTreeMap<&str, (usize, f64)> = BTreeMap::new();
    for s in &segments {
        let entry = by_system.entry(&s.system_id).or_insert((0, 0.0));
        entry.0 += 1;
        entry.1 += s.breakdown.score;
    }
    let systems = by_system
        .into_iter()
        .map(|(id, (count, sum))| SystemScore {
            system_id: id.to_string(),
            segments: count,
            mean: sum / count as f64,
        })
        .collect();
    let histogram = Histogram::from_values(segments.iter().map(|s| s.breakdown.score));
    Ok(CorpusScores {
        params: *params,
        segments,
        systems,
        histogram,
        agreement: BTreeMap::new(),
    })
}

/// RMSE and Pearson over the segments that carry `gold_column`.
pub fn agreement(corpus: &Corpus, scores: &CorpusScores, gold_column: &str, scale: &GoldScale) -> Result<Agreement> {
    let mut metric = Vec::new();
    let mut gold = Vec::new();
    let mut clamped = 0;
    for (record, score) in corpus.records.iter().zip(&scores.segments) {
        if let Some(&raw) = record.gold.get(gold_column) {
            let g = normalize_gold(raw, scale);
            clamped += usize::from(g.clamped);
            metric.push(score.breakdown.score);
            gold.push(g.value);
        }
    }
    if metric.is_empty() {
        let first = corpus.records.first().ok_or(Error::EmptyCorpus)?;
        return Err(Error::MissingGold {
            column: gold_column.to_string(),
            seg_id: first.seg_id.clone(),
            system_id: first.system_id.clone(),
        });
    }
    if clamped > 0 {
        log::warn!("{clamped} `{gold_column}` values outside scale {scale} were clamped");
    }
    Ok(Agreement {
        gold_column: gold_column.to_string(),
        scale: scale.clone(),
        segments: metric.len(),
        rmse: rmse(&metric, &gold)?,
        pearson: pearson(&metric, &gold).ok(),
        clamped,
    })
}
