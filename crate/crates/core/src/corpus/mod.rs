//! Evaluation datasets: ingestion, scoring, agreement statistics, reports.

mod ingest;
mod report;
mod score;
mod stats;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::metric::Tokenizer;

pub use ingest::{ingest, write_corpus, ColumnMap, GoldSelection, IngestOptions, IngestOutcome};
pub use report::{build_report, Histograms, Report, ReportFormat, ReportMeta, SegmentRow};
pub use score::{agreement, score_corpus, Agreement, CorpusScores, SegmentScore, SystemScore};
pub use stats::{normalize_gold, pearson, rmse, GoldScale, Histogram, NormalizedGold, HISTOGRAM_BINS};

/// One evaluation row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentRecord {
    pub seg_id: String,
    pub system_id: String,
    pub source: Option<String>,
    pub hypothesis: String,
    pub reference: String,
    /// Gold scores keyed by column name.
    pub gold: BTreeMap<String, f64>,
}

/// A validated set of segment records, in file order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Corpus {
    pub records: Vec<SegmentRecord>,
    pub tokenizer: Tokenizer,
}

impl Corpus {
    pub fn new(records: Vec<SegmentRecord>) -> Self {
        Corpus {
            records,
            tokenizer: Tokenizer::Standard,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Sorted union of gold column names across all records.
    pub fn gold_columns(&self) -> Vec<String> {
        let mut names: Vec<String> = self
            .records
            .iter()
            .flat_map(|r| r.gold.keys().cloned())
            .collect();
        names.sort();
        names.dedup();
        names
    }

    pub fn has_source(&self) -> bool {
        self.records.iter().any(|r| r.source.is_some())
    }

    /// Hex SHA-256 of the canonical JSONL serialization.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        for record in &self.records {
            hasher.update(ingest::jsonl_line(record).as_bytes());
            hasher.update(b"\n");
        }
        format!("{:x}", hasher.finalize())
    }

    /// Returns every segment's gold value for `column`, failing on the first
    /// segment that lacks it.
    pub fn gold_values(&self, column: &str) -> Result<Vec<f64>, Error> {
        if self.records.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        self.records
            .iter()
            .map(|r| {
                r.gold.get(column).copied().ok_or_else(|| Error::MissingGold {
                    column: column.to_string(),
                    seg_id: r.seg_id.clone(),
                    system_id: r.system_id.clone(),
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    #[default]
    Tsv,
    Jsonl,
}

impl FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "tsv" => Ok(CorpusFormat::Tsv),
            "jsonl" => Ok(CorpusFormat::Jsonl),
            other => Err(Error::InvalidConfig(format!("unknown corpus format `{other}` (tsv, jsonl)"))),
        }
    }
}

impl fmt::Display for CorpusFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorpusFormat::Tsv => "tsv",
            CorpusFormat::Jsonl => "jsonl",
        })
    }
}
