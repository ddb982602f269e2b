use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::score::{agreement, Agreement, CorpusScores, SystemScore};
use super::stats::{normalize_gold, GoldScale, Histogram, HISTOGRAM_BINS};
use super::Corpus;
use crate::error::{Error, Result};
use crate::params::HLeporParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::InvalidConfig(format!("unknown report format `{other}` (json, csv)"))),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub tool: String,
    pub version: String,
    pub params: HLeporParams,
    pub seed: Option<u64>,
    pub corpus_sha256: String,
    pub gold_column: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentRow {
    pub seg_id: String,
    pub system_id: String,
    pub lp: f64,
    pub npd: f64,
    pub npos_penal: f64,
    pub precision: f64,
    pub recall: f64,
    pub hpr: f64,
    pub score: f64,
    pub gold: Option<f64>,
    pub gold_normalized: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histograms {
    /// `[low, high)` per bin; the last bin is closed.
    pub bin_edges: Vec<[f64; 2]>,
    pub metric: Vec<usize>,
    pub gold: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub segments: Vec<SegmentRow>,
    pub systems: Vec<SystemScore>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub agreement: Option<Agreement>,
    pub histograms: Histograms,
    pub meta: ReportMeta,
}

/// Assembles a report. With a gold column, adds the agreement section and the
/// normalized-gold histogram.
pub fn build_report(
    corpus: &Corpus,
    scores: &CorpusScores,
    gold: Option<(&str, &GoldScale)>,
    seed: Option<u64>,
) -> Result<Report> {
    let agreement = gold
        .map(|(column, scale)| agreement(corpus, scores, column, scale))
        .transpose()?;
    let segments: Vec<SegmentRow> = corpus
        .records
        .iter()
        .zip(&scores.segments)
        .map(|(record, s)| {
            let raw = gold.and_then(|(column, _)| record.gold.get(column).copied());
            let b = &s.breakdown;
            SegmentRow {
                seg_id: s.seg_id.clone(),
                system_id: s.system_id.clone(),
                lp: b.lp,
                npd: b.npd,
                npos_penal: b.npos_penal,
                precision: b.precision,
                recall: b.recall,
                hpr: b.hpr,
                score: b.score,
                gold: raw,
                gold_normalized: raw.zip(gold).map(|(v, (_, scale))| normalize_gold(v, scale).value),
            }
        })
        .collect();
    let gold_hist = gold.map(|_| Histogram::from_values(segments.iter().filter_map(|r| r.gold_normalized)).counts);
    Ok(Report {
        histograms: Histograms {
            bin_edges: (0..HISTOGRAM_BINS).map(|i| Histogram::bin_edges(i).into()).collect(),
            metric: scores.histogram.counts.clone(),
            gold: gold_hist,
        },
        segments,
        systems: scores.systems.clone(),
        agreement,
        meta: ReportMeta {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            params: scores.params,
            seed,
            corpus_sha256: corpus.fingerprint(),
            gold_column: gold.map(|(c, _)| c.to_string()),
        },
    })
}

impl Report {
    /// Writes `report.json`, or one CSV per section, into `dir` (created if
    /// missing). Returns the written paths.
    pub fn write(&self, dir: &Path, format: ReportFormat) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        match format {
            ReportFormat::Json => {
                let path = dir.join("report.json");
                self.write_json(&path)?;
                Ok(vec![path])
            }
            ReportFormat::Csv => self.write_csv(dir),
        }
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    fn write_csv(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let mut written = Vec::new();
        let opt = |v: Option<f64>| v.map(|v| format!("{v:?}")).unwrap_or_default();

        let mut rows = vec![vec![
            "seg_id", "system_id", "lp", "npd", "npos_penal", "precision", "recall", "hpr", "score", "gold",
            "gold_normalized",
        ]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>()];
        for r in &self.segments {
            rows.push(vec![
                r.seg_id.clone(),
                r.system_id.clone(),
                format!("{:?}", r.lp),
                format!("{:?}", r.npd),
                format!("{:?}", r.npos_penal),
                format!("{:?}", r.precision),
                format!("{:?}", r.recall),
                format!("{:?}", r.hpr),
                format!("{:?}", r.score),
                opt(r.gold),
                opt(r.gold_normalized),
            ]);
        }
        written.push(write_rows(&dir.join("segments.csv"), &rows)?);

        let mut rows = vec![vec!["system_id".to_string(), "segments".into(), "mean".into()]];
        for s in &self.systems {
            rows.push(vec![s.system_id.clone(), s.segments.to_string(), format!("{:?}", s.mean)]);
        }
        written.push(write_rows(&dir.join("systems.csv"), &rows)?);

        if let Some(a) = &self.agreement {
            let rows = vec![
                ["gold_column", "scale", "segments", "rmse", "pearson", "clamped"]
                    .map(String::from)
                    .to_vec(),
                vec![
                    a.gold_column.clone(),
                    a.scale.to_string(),
                    a.segments.to_string(),
                    format!("{:?}", a.rmse),
                    opt(a.pearson),
                    a.clamped.to_string(),
                ],
            ];
            written.push(write_rows(&dir.join("agreement.csv"), &rows)?);
        }

        let mut rows = vec![["bin_low", "bin_high", "metric", "gold"].map(String::from).to_vec()];
        for (i, [lo, hi]) in self.histograms.bin_edges.iter().enumerate() {
            rows.push(vec![
                format!("{lo:?}"),
                format!("{hi:?}"),
                self.histograms.metric[i].to_string(),
                self.histograms.gold.as_ref().map(|g| g[i].to_string()).unwrap_or_default(),
            ]);
        }
        written.push(write_rows(&dir.join("histograms.csv"), &rows)?);

        let m = &self.meta;
        let p = &m.params;
        let meta = [
            ("tool", m.tool.clone()),
            ("version", m.version.clone()),
            ("alpha", format!("{:?}", p.alpha)),
            ("beta", format!("{:?}", p.beta)),
            ("n", p.n.to_string()),
            ("weight_elp", format!("{:?}", p.weight_elp)),
            ("weight_pos", format!("{:?}", p.weight_pos)),
            ("weight_pr", format!("{:?}", p.weight_pr)),
            ("seed", m.seed.map(|s| s.to_string()).unwrap_or_default()),
            ("corpus_sha256", m.corpus_sha256.clone()),
            ("gold_column", m.gold_column.clone().unwrap_or_default()),
        ];
        let mut rows = vec![vec!["key".to_string(), "value".to_string()]];
        rows.extend(meta.into_iter().map(|(k, v)| vec![k.to_string(), v]));
        written.push(write_rows(&dir.join("meta.csv"), &rows)?);
        Ok(written)
    }
}

fn write_rows(path: &Path, rows: &[Vec<String>]) -> Result<PathBuf> {
    let to_err = |e: csv::Error| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = csv::Writer::from_writer(file);
    for row in rows {
        writer.write_record(row).map_err(to_err)?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(path.to_path_buf())
}
