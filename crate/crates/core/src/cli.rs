//! Command-line front end: `score`, `report`, `tune` and `presets`.
//!
//! Every flag may also come from a `--config` file of `key = value` lines
//! (keys are the long flag names; `-` and `_` are interchangeable). Flags
//! win over the file, the file wins over built-in defaults.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::corpus::{
    build_report, ingest, score_corpus, ColumnMap, Corpus, CorpusFormat, GoldScale, GoldSelection, IngestOptions,
    ReportFormat,
};
use crate::error::{Error, ErrorClass, Result};
use crate::kvfile;
use crate::metric::Tokenizer;
use crate::optimizer::{
    export_params, objective, split_holdout, tune_random, tune_tpe, write_trial_log, CorpusObjective, Objective,
    SearchSpace, TpeConfig,
};
use crate::params::{presets, preset_by_name, read_preset_file, HLeporParams, Provenance};

/// Baseline for `tune` when no parameter source is given.
pub const DEFAULT_BASELINE: &str = "en-cs:default";

#[derive(Debug, Parser)]
#[command(name = "cushlepor", version, about = "hLEPOR scoring and parameter tuning")]
pub struct Cli {
    /// Flat `key = value` file supplying values for any flag.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Print errors only.
    #[arg(short, long, global = true, conflicts_with = "verbose")]
    pub quiet: bool,

    /// More log output; repeat for debug detail.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score a corpus and write segment, system and histogram tables.
    Score(ScoreArgs),
    /// Score a corpus and measure agreement with a gold column.
    Report(ScoreArgs),
    /// Tune the six parameters towards a gold column.
    Tune(TuneArgs),
    /// List the built-in presets.
    Presets,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Corpus file.
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,

    /// `tsv` or `jsonl`; inferred from the extension when omitted.
    #[arg(long, value_name = "FORMAT")]
    pub format: Option<String>,

    /// Column renames, e.g. `seg_id=sid,hypothesis=mt`.
    #[arg(long, value_name = "MAP")]
    pub columns: Option<String>,

    /// Reject the whole file on any invalid row instead of skipping it.
    #[arg(long)]
    pub strict: bool,

    /// Text is already tokenized: split on whitespace only.
    #[arg(long)]
    pub pretokenized: bool,

    /// Gold score column.
    #[arg(long, value_name = "COLUMN")]
    pub gold: Option<String>,

    /// `psqm`, `unit`, or `MIN:MAX[:inverted]` (default `unit`).
    #[arg(long, value_name = "SCALE")]
    pub gold_scale: Option<String>,

    /// Output directory, created if missing.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    /// Built-in preset, e.g. `en-de` or `zh-en:cushlepor_psqm`.
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,

    /// Preset file written by `tune`.
    #[arg(long, value_name = "FILE")]
    pub params_file: Option<PathBuf>,

    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Context window for alignment.
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub weight_elp: Option<f64>,
    #[arg(long)]
    pub weight_pos: Option<f64>,
    #[arg(long)]
    pub weight_pr: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub input: InputArgs,

    #[command(flatten)]
    pub params: ParamArgs,

    /// `json` (one report.json) or `csv` (one file per table).
    #[arg(long, value_name = "FORMAT")]
    pub report_format: Option<String>,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Baseline parameters for the before/after comparison.
    #[command(flatten)]
    pub params: ParamArgs,

    /// `tpe` or `random`.
    #[arg(long, value_name = "TUNER")]
    pub tuner: Option<String>,

    #[arg(long)]
    pub budget: Option<usize>,

    /// Generated and printed when omitted.
    #[arg(long)]
    pub seed: Option<u64>,

    #[arg(long)]
    pub gamma: Option<f64>,

    #[arg(long)]
    pub n_startup: Option<usize>,

    #[arg(long)]
    pub n_candidates: Option<usize>,

    #[arg(long)]
    pub prior_weight: Option<f64>,

    /// Percent of segments held out from tuning and scored afterwards.
    #[arg(long, value_name = "PERCENT")]
    pub split_holdout: Option<u8>,

    /// Record per-trial wall time in the trial log.
    #[arg(long)]
    pub log_timing: bool,
}

const CONFIG_KEYS: &[&str] = &[
    "input",
    "format",
    "columns",
    "strict",
    "pretokenized",
    "gold",
    "gold_scale",
    "out",
    "preset",
    "params_file",
    "alpha",
    "beta",
    "n",
    "weight_elp",
    "weight_pos",
    "weight_pr",
    "report_format",
    "tuner",
    "budget",
    "seed",
    "gamma",
    "n_startup",
    "n_candidates",
    "prior_weight",
    "split_holdout",
    "log_timing",
];

/// Values from a `--config` file.
#[derive(Debug, Default)]
struct Config {
    map: BTreeMap<String, String>,
}

impl Config {
    fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let raw = kvfile::read(path).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let mut map = BTreeMap::new();
        for (key, value) in raw {
            let key = key.replace('-', "_");
            if !CONFIG_KEYS.contains(&key.as_str()) {
                return Err(Error::InvalidConfig(format!("{}: unknown key `{key}`", path.display())));
            }
            map.insert(key, value);
        }
        Ok(Config { map })
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        self.map
            .get(key)
            .map(|raw| {
                raw.parse()
                    .map_err(|e| Error::InvalidConfig(format!("config key `{key}` = {raw:?}: {e}")))
            })
            .transpose()
    }

    fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    fn switch(&self, flag: bool, key: &str) -> Result<bool> {
        Ok(flag || self.get(key)?.unwrap_or(false))
    }
}

/// One of the mutually exclusive ways to name a parameter set.
enum ParamSource {
    Preset(String),
    File(PathBuf),
    Inline([Option<f64>; 5], Option<u32>),
}

impl ParamSource {
    fn collect(
        preset: Option<String>,
        file: Option<PathBuf>,
        reals: [Option<f64>; 5],
        n: Option<u32>,
    ) -> Result<Option<Self>> {
        let inline = reals.iter().any(Option::is_some) || n.is_some();
        let given = usize::from(preset.is_some()) + usize::from(file.is_some()) + usize::from(inline);
        if given > 1 {
            return Err(Error::InvalidConfig(
                "give exactly one parameter source: --preset, --params-file, or the six inline values".into(),
            ));
        }
        Ok(match (preset, file) {
            (Some(name), _) => Some(ParamSource::Preset(name)),
            (_, Some(path)) => Some(ParamSource::File(path)),
            _ if inline => Some(ParamSource::Inline(reals, n)),
            _ => None,
        })
    }

    fn resolve(self) -> Result<(String, HLeporParams)> {
        match self {
            ParamSource::Preset(name) => {
                let params = preset_by_name(&name)?;
                Ok((name, params))
            }
            ParamSource::File(path) => {
                let (params, _) = read_preset_file(&path)?;
                Ok((path.display().to_string(), params))
            }
            ParamSource::Inline(reals, n) => {
                const NAMES: [&str; 5] = ["--alpha", "--beta", "--weight-elp", "--weight-pos", "--weight-pr"];
                let mut missing: Vec<&str> = NAMES
                    .iter()
                    .zip(&reals)
                    .filter(|(_, v)| v.is_none())
                    .map(|(name, _)| *name)
                    .collect();
                if n.is_none() {
                    missing.push("--n");
                }
                if !missing.is_empty() {
                    return Err(Error::InvalidConfig(format!(
                        "inline parameters need all six values; missing {}",
                        missing.join(", ")
                    )));
                }
                let [a, b, e, p, r] = reals.map(|v| v.expect("checked above"));
                Ok(("inline".into(), HLeporParams::new(a, b, n.expect("checked above"), e, p, r)?))
            }
        }
    }
}

/// Flags take precedence as a whole: a source on the command line hides any
/// source in the config file.
fn resolve_params(args: &ParamArgs, config: &Config) -> Result<Option<(String, HLeporParams)>> {
    let from_flags = ParamSource::collect(
        args.preset.clone(),
        args.params_file.clone(),
        [args.alpha, args.beta, args.weight_elp, args.weight_pos, args.weight_pr],
        args.n,
    )?;
    let source = match from_flags {
        Some(s) => Some(s),
        None => ParamSource::collect(
            config.get("preset")?,
            config.get("params_file")?,
            [
                config.get("alpha")?,
                config.get("beta")?,
                config.get("weight_elp")?,
                config.get("weight_pos")?,
                config.get("weight_pr")?,
            ],
            config.get("n")?,
        )?,
    };
    source.map(ParamSource::resolve).transpose()
}

struct Input {
    path: PathBuf,
    options: IngestOptions,
    gold: Option<String>,
    scale: GoldScale,
    out: Option<PathBuf>,
}

fn resolve_input(args: &InputArgs, config: &Config) -> Result<Input> {
    let path: PathBuf = config
        .pick(args.input.clone(), "input")?
        .ok_or_else(|| Error::InvalidConfig("--input is required".into()))?;
    let format = match config.pick(args.format.clone(), "format")? {
        Some(f) => f.parse()?,
        None => match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl" | "json") => CorpusFormat::Jsonl,
            _ => CorpusFormat::Tsv,
        },
    };
    let columns = match config.pick(args.columns.clone(), "columns")? {
        Some(spec) => spec.parse::<ColumnMap>()?,
        None => ColumnMap::default(),
    };
    let gold: Option<String> = config.pick(args.gold.clone(), "gold")?;
    let scale = match config.pick(args.gold_scale.clone(), "gold_scale")? {
        Some(s) => s.parse()?,
        None => GoldScale::unit(),
    };
    let tokenizer = if config.switch(args.pretokenized, "pretokenized")? {
        Tokenizer::Whitespace
    } else {
        Tokenizer::Standard
    };
    let options = IngestOptions {
        format,
        columns,
        gold: GoldSelection::Only(gold.iter().cloned().collect()),
        strict: config.switch(args.strict, "strict")?,
        tokenizer,
    };
    Ok(Input {
        path,
        options,
        gold,
        scale,
        out: config.pick(args.out.clone(), "out")?,
    })
}

fn load(input: &Input) -> Result<Corpus> {
    let outcome = ingest(&input.path, &input.options)?;
    log::info!("{}: {} segments", input.path.display(), outcome.corpus.len());
    if outcome.corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Ok(outcome.corpus)
}

fn stdout_error(e: std::io::Error) -> Error {
    Error::io(Path::new("<stdout>"), e)
}

fn cmd_score(args: &ScoreArgs, config: &Config, need_gold: bool, quiet: bool, out: &mut dyn Write) -> Result<()> {
    let input = resolve_input(&args.input, config)?;
    let (source, params) = resolve_params(&args.params, config)?.ok_or_else(|| {
        Error::InvalidConfig(
            "no parameter source: give --preset, --params-file, or all six of --alpha, --beta, --n, --weight-elp, \
             --weight-pos, --weight-pr"
                .into(),
        )
    })?;
    if need_gold && input.gold.is_none() {
        return Err(Error::InvalidConfig("report needs --gold COLUMN".into()));
    }
    let format: ReportFormat = match config.pick(args.report_format.clone(), "report_format")? {
        Some(f) => f.parse()?,
        None => ReportFormat::Json,
    };
    if input.out.is_none() && format == ReportFormat::Csv {
        return Err(Error::InvalidConfig("--report-format csv needs --out DIR".into()));
    }
    log::info!("parameters from {source}: {params}");

    let corpus = load(&input)?;
    let scores = score_corpus(&corpus, &params)?;
    let gold = input.gold.as_deref().map(|g| (g, &input.scale));
    let report = build_report(&corpus, &scores, gold, None)?;

    let Some(dir) = &input.out else {
        serde_json::to_writer_pretty(&mut *out, &report).map_err(|e| stdout_error(e.into()))?;
        return writeln!(out).map_err(stdout_error);
    };
    for path in report.write(dir, format)? {
        log::info!("wrote {}", path.display());
    }
    if quiet {
        return Ok(());
    }
    writeln!(out, "{:<16} {:>8} {:>10}", "system", "segments", "mean").map_err(stdout_error)?;
    for s in &report.systems {
        writeln!(out, "{:<16} {:>8} {:>10.6}", s.system_id, s.segments, s.mean).map_err(stdout_error)?;
    }
    if let Some(a) = &report.agreement {
        let pearson = a.pearson.map_or_else(|| "undefined".to_string(), |r| format!("{r:.6}"));
        writeln!(
            out,
            "agreement with `{}` ({} segments): rmse {:.6} pearson {pearson}",
            a.gold_column, a.segments, a.rmse
        )
        .map_err(stdout_error)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Tuner {
    Tpe,
    Random,
}

impl FromStr for Tuner {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tpe" => Ok(Tuner::Tpe),
            "random" => Ok(Tuner::Random),
            other => Err(Error::InvalidConfig(format!("unknown tuner `{other}` (tpe, random)"))),
        }
    }
}

#[derive(Debug, Serialize)]
struct Evaluated {
    name: String,
    params: HLeporParams,
    rmse: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    holdout_rmse: Option<f64>,
}

#[derive(Debug, Serialize)]
struct TuneSummary {
    tool: &'static str,
    version: &'static str,
    tuner: Tuner,
    seed: u64,
    config: TpeConfig,
    space: SearchSpace,
    gold_column: String,
    gold_scale: GoldScale,
    corpus_sha256: String,
    tuning_segments: usize,
    holdout_segments: usize,
    best_trial: usize,
    baseline: Evaluated,
    tuned: Evaluated,
}

fn cmd_tune(args: &TuneArgs, config: &Config, quiet: bool, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let input = resolve_input(&args.input, config)?;
    let gold = input
        .gold
        .clone()
        .ok_or_else(|| Error::InvalidConfig("tune needs --gold COLUMN".into()))?;
    let dir = input
        .out
        .clone()
        .ok_or_else(|| Error::InvalidConfig("tune needs --out DIR".into()))?;
    let tuner = config.pick(args.tuner.clone(), "tuner")?.map_or(Ok(Tuner::Tpe), |t| t.parse())?;
    let defaults = TpeConfig::default();
    let seed = match config.pick(args.seed, "seed")? {
        Some(seed) => seed,
        None => {
            let seed = rand::random::<u64>();
            writeln!(err, "seed: {seed}").map_err(|e| Error::io(Path::new("<stderr>"), e))?;
            seed
        }
    };
    let tpe = TpeConfig {
        budget: config.pick(args.budget, "budget")?.unwrap_or(defaults.budget),
        n_startup: config.pick(args.n_startup, "n_startup")?.unwrap_or(defaults.n_startup),
        gamma: config.pick(args.gamma, "gamma")?.unwrap_or(defaults.gamma),
        n_candidates: config.pick(args.n_candidates, "n_candidates")?.unwrap_or(defaults.n_candidates),
        seed,
        prior_weight: config.pick(args.prior_weight, "prior_weight")?.unwrap_or(defaults.prior_weight),
    };
    if tpe.budget == 0 {
        return Err(Error::InvalidConfig("budget must be at least 1".into()));
    }
    // A short budget is all warmup.
    let tpe = TpeConfig {
        n_startup: tpe.n_startup.min(tpe.budget),
        ..tpe
    };
    tpe.validate()?;
    let holdout: u8 = config.pick(args.split_holdout, "split_holdout")?.unwrap_or(0);
    if holdout >= 100 {
        return Err(Error::InvalidConfig(format!("--split-holdout must be below 100, got {holdout}")));
    }
    let log_timing = config.switch(args.log_timing, "log_timing")?;
    let (baseline_name, baseline) = match resolve_params(&args.params, config)? {
        Some(found) => found,
        None => (DEFAULT_BASELINE.to_string(), preset_by_name(DEFAULT_BASELINE)?),
    };

    let corpus = load(&input)?;
    let (train, held) = if holdout > 0 {
        split_holdout(&corpus, holdout)
    } else {
        (corpus.clone(), Corpus::new(Vec::new()))
    };
    if train.is_empty() {
        return Err(Error::InvalidConfig(format!("--split-holdout {holdout} leaves no segments to tune on")));
    }
    log::info!("tuning on {} segments, {} held out", train.len(), held.len());
    let space = SearchSpace::default();
    let obj = CorpusObjective::new(&train, &gold, &input.scale)?;
    let result = match tuner {
        Tuner::Tpe => tune_tpe(&obj, &space, &tpe)?,
        Tuner::Random => tune_random(&obj, &space, tpe.budget, seed)?,
    };
    let best = &result.best;
    let evaluate = |name: String, params: HLeporParams, rmse: f64| -> Result<Evaluated> {
        let holdout_rmse = (!held.is_empty())
            .then(|| objective(&held, &gold, &input.scale, &params))
            .transpose()?;
        Ok(Evaluated {
            name,
            params,
            rmse,
            holdout_rmse,
        })
    };
    let summary = TuneSummary {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        tuner,
        seed,
        config: tpe,
        space,
        gold_column: gold.clone(),
        gold_scale: input.scale.clone(),
        corpus_sha256: train.fingerprint(),
        tuning_segments: train.len(),
        holdout_segments: held.len(),
        best_trial: best.index,
        baseline: evaluate(baseline_name, baseline, obj.evaluate(&baseline)?)?,
        tuned: evaluate("tuned".into(), best.params, best.objective)?,
    };

    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let provenance = Provenance {
        objective: None,
        seed: Some(seed),
        budget: Some(tpe.budget),
        gold_column: Some(gold.clone()),
        corpus_sha256: Some(summary.corpus_sha256.clone()),
    };
    export_params(best, &dir.join("best.preset"), provenance)?;
    write_trial_log(&dir.join("trials.jsonl"), &result.trials, log_timing)?;
    let summary_path = dir.join("summary.json");
    let mut text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    text.push('\n');
    std::fs::write(&summary_path, text).map_err(|e| Error::io(&summary_path, e))?;

    if quiet {
        return Ok(());
    }
    let line = |e: &Evaluated| match e.holdout_rmse {
        Some(h) => format!("rmse {:.6}, held-out rmse {h:.6}", e.rmse),
        None => format!("rmse {:.6}", e.rmse),
    };
    writeln!(out, "baseline {}: {}", summary.baseline.name, line(&summary.baseline)).map_err(stdout_error)?;
    writeln!(out, "tuned (trial {}): {}", best.index, line(&summary.tuned)).map_err(stdout_error)?;
    writeln!(out, "tuned parameters: {}", best.params).map_err(stdout_error)?;
    writeln!(out, "wrote {}", dir.display()).map_err(stdout_error)?;
    Ok(())
}

fn cmd_presets(out: &mut dyn Write) -> Result<()> {
    writeln!(
        out,
        "{:<22} {:<48} provenance",
        "preset", "(alpha, beta, n, weight_elp, weight_pos, weight_pr)"
    )
    .map_err(stdout_error)?;
    for p in presets() {
        let v = &p.params;
        let values = format!(
            "({:?}, {:?}, {}, {:?}, {:?}, {:?})",
            v.alpha, v.beta, v.n, v.weight_elp, v.weight_pos, v.weight_pr
        );
        writeln!(out, "{:<22} {values:<48} {}", p.name(), p.provenance).map_err(stdout_error)?;
    }
    Ok(())
}

fn init_logging(quiet: bool, verbose: u8) {
    let level = match (quiet, verbose) {
        (true, _) => log::LevelFilter::Off,
        (false, 0) => log::LevelFilter::Warn,
        (false, 1) => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .format_target(false)
        .try_init();
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let config = Config::load(cli.config.as_deref())?;
    match &cli.command {
        Command::Score(args) => cmd_score(args, &config, false, cli.quiet, out),
        Command::Report(args) => cmd_score(args, &config, true, cli.quiet, out),
        Command::Tune(args) => cmd_tune(args, &config, cli.quiet, out, err),
        Command::Presets => cmd_presets(out),
    }
}

/// Exit status for an error class.
pub fn exit_code(class: ErrorClass) -> i32 {
    match class {
        ErrorClass::Usage => 1,
        ErrorClass::Data => 2,
        ErrorClass::Runtime => 3,
    }
}

fn diagnostic(err: &mut dyn Write, tag: &str, message: &str) {
    let message = message.split_whitespace().collect::<Vec<_>>().join(" ");
    let _ = writeln!(err, "error[{tag}]: {message}");
}

/// Parses `args` (program name first), runs the command, and returns the
/// exit status. Failures print one `error[usage|data|runtime]: ...` line.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = write!(out, "{e}");
            return 0;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or_default();
            let first = if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                "missing subcommand (score, report, tune, presets)"
            } else {
                first.strip_prefix("error: ").unwrap_or(first)
            };
            diagnostic(err, "usage", first);
            return 1;
        }
    };
    init_logging(cli.quiet, cli.verbose);
    match execute(&cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let class = e.class();
            let tag = match class {
                ErrorClass::Usage => "usage",
                ErrorClass::Data => "data",
                ErrorClass::Runtime => "runtime",
            };
            diagnostic(err, tag, &e.to_string());
            exit_code(class)
        }
    }
}
