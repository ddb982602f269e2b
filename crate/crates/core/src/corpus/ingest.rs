use std::collections::{BTreeMap, HashSet};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::warn;

use super::{Corpus, CorpusFormat, SegmentRecord};
use crate::error::{Error, Result, RowIssue};
use crate::metric::Tokenizer;

const SEG_ID: &str = "seg_id";
const SYSTEM_ID: &str = "system_id";
const SOURCE: &str = "source";
const HYPOTHESIS: &str = "hypothesis";
const REFERENCE: &str = "reference";

const CANONICAL: [&str; 5] = [SEG_ID, SYSTEM_ID, SOURCE, HYPOTHESIS, REFERENCE];
const REQUIRED: [&str; 4] = [SEG_ID, SYSTEM_ID, HYPOTHESIS, REFERENCE];

/// Maps canonical field names to the column names used in a file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ColumnMap {
    renames: BTreeMap<String, String>,
}

impl ColumnMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, canonical: &str, column: &str) -> Result<Self> {
        if !CANONICAL.contains(&canonical) {
            return Err(Error::InvalidConfig(format!(
                "unknown field `{canonical}` in column map (expected one of {})",
                CANONICAL.join(", ")
            )));
        }
        self.renames.insert(canonical.to_string(), column.to_string());
        Ok(self)
    }

    pub fn column<'a>(&'a self, canonical: &'a str) -> &'a str {
        self.renames.get(canonical).map(String::as_str).unwrap_or(canonical)
    }

    fn is_mapped_column(&self, column: &str) -> bool {
        CANONICAL.iter().any(|c| self.column(c) == column)
    }
}

impl FromStr for ColumnMap {
    type Err = Error;

    /// Parses `field=column,field=column`.
    fn from_str(s: &str) -> Result<Self> {
        let mut map = ColumnMap::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (canonical, column) = part.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("column map entry `{part}` is not `field=column`"))
            })?;
            map = map.with(canonical.trim(), column.trim())?;
        }
        Ok(map)
    }
}

/// Which non-canonical columns are read as gold scores.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum GoldSelection {
    /// Every column that is not mapped to a canonical field.
    #[default]
    All,
    /// Only the named columns; each must be present in the file.
    Only(Vec<String>),
}

#[derive(Debug, Clone, Default)]
pub struct IngestOptions {
    pub format: CorpusFormat,
    pub columns: ColumnMap,
    pub gold: GoldSelection,
    /// Strict: any invalid row fails the whole ingestion. Lenient: invalid
    /// rows are skipped and bad gold cells dropped, with warnings.
    pub strict: bool,
    pub tokenizer: Tokenizer,
}

#[derive(Debug, Clone)]
pub struct IngestOutcome {
    pub corpus: Corpus,
    /// Skipped rows and dropped gold values (lenient mode only).
    pub issues: Vec<RowIssue>,
}

enum Cell {
    Text(String),
    Number(f64),
    Null,
}

impl Cell {
    fn as_text(&self) -> Option<String> {
        match self {
            Cell::Text(s) => Some(s.clone()),
            Cell::Number(v) => Some(v.to_string()),
            Cell::Null => None,
        }
    }
}

struct RawRow {
    line: usize,
    cells: BTreeMap<String, Cell>,
}

pub fn ingest(path: &Path, options: &IngestOptions) -> Result<IngestOutcome> {
    let rows = match options.format {
        CorpusFormat::Tsv => read_tsv_rows(path, options)?,
        CorpusFormat::Jsonl => read_jsonl_rows(path, options)?,
    };
    let (records, issues, fatal) = validate_rows(rows, options);
    if options.strict && !issues.is_empty() {
        return Err(Error::InvalidRows {
            path: path.to_path_buf(),
            issues,
        });
    }
    for issue in &issues {
        warn!("{}: {issue}", path.display());
    }
    if fatal > 0 {
        warn!("{}: skipped {fatal} invalid rows", path.display());
    }
    Ok(IngestOutcome {
        corpus: Corpus {
            records,
            tokenizer: options.tokenizer,
        },
        issues,
    })
}

fn missing_column(path: &Path, column: &str) -> Error {
    Error::MissingColumn {
        path: path.to_path_buf(),
        column: column.to_string(),
    }
}

fn check_columns(path: &Path, present: &[String], options: &IngestOptions) -> Result<()> {
    let has = |c: &str| present.iter().any(|p| p == c);
    for canonical in REQUIRED {
        let column = options.columns.column(canonical);
        if !has(column) {
            return Err(missing_column(path, column));
        }
    }
    if let GoldSelection::Only(names) = &options.gold {
        if let Some(name) = names.iter().find(|n| !has(n)) {
            return Err(missing_column(path, name));
        }
    }
    Ok(())
}

fn read_tsv_rows(path: &Path, options: &IngestOptions) -> Result<Vec<RawRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    check_columns(path, &header, options)?;

    let mut rows = Vec::new();
    for result in reader.records() {
        let record = result.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let mut cells = BTreeMap::new();
        if record.len() != header.len() {
            // Recorded as a row issue during validation.
            cells.insert(
                String::new(),
                Cell::Text(format!("expected {} fields, found {}", header.len(), record.len())),
            );
        } else {
            for (name, value) in header.iter().zip(record.iter()) {
                cells.insert(name.clone(), Cell::Text(value.to_string()));
            }
        }
        rows.push(RawRow { line, cells });
    }
    Ok(rows)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    if e.is_io_error() {
        if let csv::ErrorKind::Io(io) = e.into_kind() {
            return Error::io(path, io);
        }
        unreachable!("is_io_error implies ErrorKind::Io");
    }
    Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn read_jsonl_rows(path: &Path, options: &IngestOptions) -> Result<Vec<RawRow>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rows = Vec::new();
    let mut checked = false;
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let line_no = idx + 1;
        let value: serde_json::Value = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: format!("line {line_no}: {e}"),
        })?;
        let serde_json::Value::Object(object) = value else {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                message: format!("line {line_no}: expected a JSON object"),
            });
        };
        if !checked {
            let keys: Vec<String> = object.keys().cloned().collect();
            check_columns(path, &keys, options)?;
            checked = true;
        }
        let cells = object
            .into_iter()
            .map(|(k, v)| {
                let cell = match v {
                    serde_json::Value::Null => Cell::Null,
                    serde_json::Value::String(s) => Cell::Text(s),
                    serde_json::Value::Number(n) => n.as_f64().map_or(Cell::Null, Cell::Number),
                    other => Cell::Text(other.to_string()),
                };
                (k, cell)
            })
            .collect();
        rows.push(RawRow { line: line_no, cells });
    }
    Ok(rows)
}

fn parse_gold(cell: &Cell) -> std::result::Result<Option<f64>, String> {
    let value = match cell {
        Cell::Null => return Ok(None),
        Cell::Number(v) => *v,
        Cell::Text(s) if s.trim().is_empty() => return Ok(None),
        Cell::Text(s) => s.trim().parse::<f64>().map_err(|_| s.clone())?,
    };
    if value.is_finite() {
        Ok(Some(value))
    } else {
        Err(value.to_string())
    }
}

/// Returns kept records, all issues, and the number of skipped rows.
fn validate_rows(rows: Vec<RawRow>, options: &IngestOptions) -> (Vec<SegmentRecord>, Vec<RowIssue>, usize) {
    let cols = &options.columns;
    let mut seen = HashSet::new();
    let mut records = Vec::new();
    let mut issues = Vec::new();
    let mut skipped = 0;

    for row in rows {
        let mut row_issues: Vec<String> = Vec::new();
        let mut warnings: Vec<String> = Vec::new();
        if let Some(Cell::Text(message)) = row.cells.get("") {
            row_issues.push(message.clone());
        }
        let text = |canonical: &str| row.cells.get(cols.column(canonical)).and_then(Cell::as_text);

        let mut required = |canonical: &str| match text(canonical) {
            Some(v) => v,
            None => {
                row_issues.push(format!("missing field `{}`", cols.column(canonical)));
                String::new()
            }
        };
        let seg_id = required(SEG_ID);
        let system_id = required(SYSTEM_ID);
        let hypothesis = required(HYPOTHESIS);
        let reference = required(REFERENCE);
        let source = text(SOURCE).filter(|s| !s.is_empty());

        if row_issues.is_empty() {
            if seg_id.trim().is_empty() {
                row_issues.push("empty seg_id".into());
            }
            if system_id.trim().is_empty() {
                row_issues.push("empty system_id".into());
            }
            if options.tokenizer.tokenize(&hypothesis).is_empty() {
                row_issues.push("empty hypothesis".into());
            }
            if options.tokenizer.tokenize(&reference).is_empty() {
                row_issues.push("empty reference".into());
            }
        }

        let mut gold = BTreeMap::new();
        let gold_names: Vec<&String> = match &options.gold {
            GoldSelection::All => row.cells.keys().filter(|k| !k.is_empty() && !cols.is_mapped_column(k)).collect(),
            GoldSelection::Only(names) => names.iter().collect(),
        };
        for name in gold_names {
            let Some(cell) = row.cells.get(name) else { continue };
            match parse_gold(cell) {
                Ok(Some(v)) => {
                    gold.insert(name.clone(), v);
                }
                Ok(None) => {}
                Err(raw) => warnings.push(format!("non-numeric gold value {raw:?} in column `{name}`")),
            }
        }

        if row_issues.is_empty() && !seen.insert((seg_id.clone(), system_id.clone())) {
            row_issues.push(format!("duplicate (seg_id, system_id) = ({seg_id}, {system_id})"));
        }

        let fatal = !row_issues.is_empty();
        let mut messages = row_issues;
        if options.strict || !fatal {
            messages.extend(warnings);
        }
        issues.extend(messages.into_iter().map(|message| RowIssue { line: row.line, message }));
        if fatal {
            skipped += 1;
            continue;
        }
        records.push(SegmentRecord {
            seg_id,
            system_id,
            source,
            hypothesis,
            reference,
            gold,
        });
    }
    (records, issues, skipped)
}

pub(crate) fn jsonl_line(record: &SegmentRecord) -> String {
    let mut object = serde_json::Map::new();
    object.insert(SEG_ID.into(), record.seg_id.clone().into());
    object.insert(SYSTEM_ID.into(), record.system_id.clone().into());
    if let Some(source) = &record.source {
        object.insert(SOURCE.into(), source.clone().into());
    }
    object.insert(HYPOTHESIS.into(), record.hypothesis.clone().into());
    object.insert(REFERENCE.into(), record.reference.clone().into());
    for (name, value) in &record.gold {
        object.insert(name.clone(), (*value).into());
    }
    serde_json::Value::Object(object).to_string()
}

/// Writes `corpus` with canonical column names.
pub fn write_corpus(corpus: &Corpus, path: &Path, format: CorpusFormat) -> Result<()> {
    let io = |e| Error::io(PathBuf::from(path), e);
    match format {
        CorpusFormat::Jsonl => {
            let mut out = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
            for record in &corpus.records {
                writeln!(out, "{}", jsonl_line(record)).map_err(io)?;
            }
            out.flush().map_err(io)
        }
        CorpusFormat::Tsv => {
            let gold_columns = corpus.gold_columns();
            let with_source = corpus.has_source();
            let mut writer = csv::WriterBuilder::new()
                .delimiter(b'\t')
                .from_path(path)
                .map_err(|e| csv_error(path, e))?;
            let mut header = vec![SEG_ID, SYSTEM_ID];
            if with_source {
                header.push(SOURCE);
            }
            header.extend([HYPOTHESIS, REFERENCE]);
            header.extend(gold_columns.iter().map(String::as_str));
            writer.write_record(&header).map_err(|e| csv_error(path, e))?;
            for r in &corpus.records {
                let mut row = vec![r.seg_id.clone(), r.system_id.clone()];
                if with_source {
                    row.push(r.source.clone().unwrap_or_default());
                }
                row.push(r.hypothesis.clone());
                row.push(r.reference.clone());
                for name in &gold_columns {
                    row.push(r.gold.get(name).map(|v| format!("{v:?}")).unwrap_or_default());
                }
                writer.write_record(&row).map_err(|e| csv_error(path, e))?;
            }
            writer.flush().map_err(io)
        }
    }
}
