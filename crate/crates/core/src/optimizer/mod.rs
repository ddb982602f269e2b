//! Parameter tuning against a gold score column.
//!
//! The objective is the RMSE between metric scores and min-max normalized
//! gold scores. Two tuners share one RNG discipline: every point is drawn
//! from a single ChaCha8 stream seeded by the caller, so a TPE run whose
//! budget does not exceed its warmup reproduces random search exactly.

mod parzen;

use std::io::Write;
use std::path::Path;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{normalize_gold, rmse, Corpus, GoldScale};
use crate::error::{Error, Result};
use crate::metric::{SegmentStats, TokenSeq};
use crate::params::{write_preset_file, HLeporParams, Provenance, MAX_WINDOW};

pub use parzen::{CategoricalEstimator, ParzenEstimator};

/// Closed real interval `[low, high]`; sampling is uniform on `[low, high)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealRange {
    pub low: f64,
    pub high: f64,
}

impl RealRange {
    pub fn new(low: f64, high: f64) -> Self {
        RealRange { low, high }
    }

    pub fn contains(&self, v: f64) -> bool {
        (self.low..=self.high).contains(&v)
    }

    pub fn width(&self) -> f64 {
        self.high - self.low
    }
}

/// Bounded domain of the six parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub alpha: RealRange,
    pub beta: RealRange,
    /// Inclusive integer bounds for the window radius.
    pub n: (u32, u32),
    pub weight_elp: RealRange,
    pub weight_pos: RealRange,
    pub weight_pr: RealRange,
}

impl Default for SearchSpace {
    fn default() -> Self {
        let r = RealRange::new(1.0, 15.0);
        SearchSpace {
            alpha: r,
            beta: r,
            n: (1, 4),
            weight_elp: r,
            weight_pos: r,
            weight_pr: r,
        }
    }
}

impl SearchSpace {
    pub fn validate(&self) -> Result<()> {
        for (name, r) in self.reals() {
            if !(r.low.is_finite() && r.high.is_finite() && r.low > 0.0 && r.low < r.high) {
                return Err(Error::InvalidSpace(format!(
                    "{name}: need 0 < low < high, got [{}, {}]",
                    r.low, r.high
                )));
            }
        }
        let (lo, hi) = self.n;
        if lo < 1 || lo > hi || hi > MAX_WINDOW {
            return Err(Error::InvalidSpace(format!("n: need 1 <= low <= high <= {MAX_WINDOW}, got {lo}..={hi}")));
        }
        Ok(())
    }

    fn reals(&self) -> [(&'static str, RealRange); 5] {
        [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("weight_elp", self.weight_elp),
            ("weight_pos", self.weight_pos),
            ("weight_pr", self.weight_pr),
        ]
    }

    pub fn n_choices(&self) -> usize {
        (self.n.1 - self.n.0 + 1) as usize
    }

    pub fn contains(&self, p: &HLeporParams) -> bool {
        self.alpha.contains(p.alpha)
            && self.beta.contains(p.beta)
            && (self.n.0..=self.n.1).contains(&p.n)
            && self.weight_elp.contains(p.weight_elp)
            && self.weight_pos.contains(p.weight_pos)
            && self.weight_pr.contains(p.weight_pr)
    }

    /// One uniform draw, dimensions in canonical order.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> HLeporParams {
        HLeporParams {
            alpha: rng.gen_range(self.alpha.low..self.alpha.high),
            beta: rng.gen_range(self.beta.low..self.beta.high),
            n: rng.gen_range(self.n.0..=self.n.1),
            weight_elp: rng.gen_range(self.weight_elp.low..self.weight_elp.high),
            weight_pos: rng.gen_range(self.weight_pos.low..self.weight_pos.high),
            weight_pr: rng.gen_range(self.weight_pr.low..self.weight_pr.high),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TpeConfig {
    pub budget: usize,
    /// Uniform random trials before the density model takes over.
    pub n_startup: usize,
    /// Fraction of completed trials forming the "good" group.
    pub gamma: f64,
    /// Candidates drawn from the good density per suggestion.
    pub n_candidates: usize,
    pub seed: u64,
    /// Weight of the uniform prior component in every density.
    pub prior_weight: f64,
}

impl Default for TpeConfig {
    fn default() -> Self {
        TpeConfig {
            budget: 300,
            n_startup: 20,
            gamma: 0.1,
            n_candidates: 24,
            seed: 0,
            prior_weight: 3.0,
        }
    }
}

impl TpeConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.budget < 1 {
            return bad("budget must be at least 1".into());
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad(format!("gamma must lie in (0, 1), got {}", self.gamma));
        }
        if self.n_startup > self.budget {
            return bad(format!("n_startup ({}) exceeds budget ({})", self.n_startup, self.budget));
        }
        if self.n_candidates < 1 {
            return bad("n_candidates must be at least 1".into());
        }
        if !(self.prior_weight.is_finite() && self.prior_weight > 0.0) {
            return bad(format!("prior_weight must be positive, got {}", self.prior_weight));
        }
        Ok(())
    }
}

/// One objective evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trial {
    pub index: usize,
    pub params: HLeporParams,
    pub objective: f64,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuneResult {
    pub best: Trial,
    pub trials: Vec<Trial>,
}

impl TuneResult {
    fn from_trials(trials: Vec<Trial>) -> Self {
        let best = *trials
            .iter()
            .reduce(|best, t| if t.objective < best.objective { t } else { best })
            .expect("budget >= 1");
        TuneResult { best, trials }
    }

    /// Best objective seen after each trial.
    pub fn running_best(&self) -> Vec<f64> {
        self.trials
            .iter()
            .scan(f64::INFINITY, |best, t| {
                *best = best.min(t.objective);
                Some(*best)
            })
            .collect()
    }
}

/// Anything that maps a parameter point to a non-negative loss.
pub trait Objective: Sync {
    fn evaluate(&self, params: &HLeporParams) -> Result<f64>;
}

impl<F> Objective for F
where
    F: Fn(&HLeporParams) -> Result<f64> + Sync,
{
    fn evaluate(&self, params: &HLeporParams) -> Result<f64> {
        self(params)
    }
}

/// RMSE against a gold column, with alignments cached per window size so
/// repeated evaluations only redo the closed-form combination step.
#[derive(Debug)]
pub struct CorpusObjective {
    pairs: Vec<(TokenSeq, TokenSeq)>,
    gold: Vec<f64>,
    stats: Vec<OnceLock<Vec<SegmentStats>>>,
}

impl CorpusObjective {
    pub fn new(corpus: &Corpus, gold_column: &str, scale: &GoldScale) -> Result<Self> {
        let raw = corpus.gold_values(gold_column)?;
        let gold = raw.iter().map(|&v| normalize_gold(v, scale).value).collect();
        let mut pairs = Vec::with_capacity(corpus.len());
        for record in &corpus.records {
            let hyp = corpus.tokenizer.tokenize(&record.hypothesis);
            let reference = corpus.tokenizer.tokenize(&record.reference);
            // Surfaces empty sides up front; later alignments cannot fail.
            SegmentStats::from_tokens(&hyp, &reference, 1).map_err(|e| Error::Segment {
                seg_id: record.seg_id.clone(),
                system_id: record.system_id.clone(),
                source: Box::new(e),
            })?;
            pairs.push((hyp, reference));
        }
        Ok(CorpusObjective {
            pairs,
            gold,
            stats: (0..MAX_WINDOW).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    fn stats_for(&self, window: u32) -> &[SegmentStats] {
        self.stats[window as usize - 1].get_or_init(|| {
            self.pairs
                .par_iter()
                .map(|(h, r)| SegmentStats::from_tokens(h, r, window as usize).expect("validated at construction"))
                .collect()
        })
    }

    /// Metric scores under `params`, in corpus order.
    pub fn scores(&self, params: &HLeporParams) -> Result<Vec<f64>> {
        params.validate()?;
        Ok(self
            .stats_for(params.n)
            .iter()
            .map(|s| s.breakdown(params).score)
            .collect())
    }
}

impl Objective for CorpusObjective {
    fn evaluate(&self, params: &HLeporParams) -> Result<f64> {
        rmse(&self.scores(params)?, &self.gold)
    }
}

/// Scores `corpus` under `params` and returns the RMSE to the normalized gold column.
pub fn objective(corpus: &Corpus, gold_column: &str, scale: &GoldScale, params: &HLeporParams) -> Result<f64> {
    CorpusObjective::new(corpus, gold_column, scale)?.evaluate(params)
}

fn run_trial<O: Objective + ?Sized>(objective: &O, index: usize, params: HLeporParams) -> Result<Trial> {
    let start = Instant::now();
    let value = objective.evaluate(&params)?;
    if !value.is_finite() {
        return Err(Error::NonFiniteObjective(value));
    }
    Ok(Trial {
        index,
        params,
        objective: value,
        wall_time: start.elapsed(),
    })
}

/// Uniform random search. Points are drawn sequentially from the seeded
/// stream, evaluated concurrently, and logged in draw order.
pub fn tune_random<O: Objective + ?Sized>(objective: &O, space: &SearchSpace, budget: usize, seed: u64) -> Result<TuneResult> {
    space.validate()?;
    if budget < 1 {
        return Err(Error::InvalidConfig("budget must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<HLeporParams> = (0..budget).map(|_| space.sample_uniform(&mut rng)).collect();
    let trials = points
        .into_par_iter()
        .enumerate()
        .map(|(i, p)| run_trial(objective, i, p))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(TuneResult::from_trials(trials))
}

/// Sequential Tree-structured Parzen Estimator search.
pub fn tune_tpe<O: Objective + ?Sized>(objective: &O, space: &SearchSpace, config: &TpeConfig) -> Result<TuneResult> {
    space.validate()?;
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut trials: Vec<Trial> = Vec::with_capacity(config.budget);
    for index in 0..config.budget {
        let params = if index < config.n_startup {
            space.sample_uniform(&mut rng)
        } else {
            suggest(&trials, space, config, &mut rng)
        };
        trials.push(run_trial(objective, index, params)?);
    }
    Ok(TuneResult::from_trials(trials))
}

/// Value of real dimension `d` (canonical order without `n`).
fn real_dim(p: &HLeporParams, d: usize) -> f64 {
    [p.alpha, p.beta, p.weight_elp, p.weight_pos, p.weight_pr][d]
}

fn suggest<R: Rng + ?Sized>(trials: &[Trial], space: &SearchSpace, config: &TpeConfig, rng: &mut R) -> HLeporParams {
    if trials.is_empty() {
        return space.sample_uniform(rng);
    }
    let mut order: Vec<&Trial> = trials.iter().collect();
    order.sort_by(|a, b| a.objective.total_cmp(&b.objective).then(a.index.cmp(&b.index)));
    let n_good = ((config.gamma * trials.len() as f64).ceil() as usize).clamp(1, trials.len());
    let (good, bad) = order.split_at(n_good);

    let ranges = space.reals().map(|(_, r)| r);
    let fit = |group: &[&Trial]| {
        let reals: Vec<ParzenEstimator> = (0..5)
            .map(|d| {
                let obs: Vec<f64> = group.iter().map(|t| real_dim(&t.params, d)).collect();
                ParzenEstimator::fit(&obs, ranges[d].low, ranges[d].high, config.prior_weight)
            })
            .collect();
        let obs: Vec<usize> = group.iter().map(|t| (t.params.n - space.n.0) as usize).collect();
        let n = CategoricalEstimator::fit(&obs, space.n_choices(), config.prior_weight);
        (reals, n)
    };
    let (l_reals, l_n) = fit(good);
    let (g_reals, g_n) = fit(bad);

    let mut best: Option<(f64, HLeporParams)> = None;
    for _ in 0..config.n_candidates {
        let mut x = [0.0; 5];
        let mut log_ratio = 0.0;
        // Draw order follows the canonical parameter order.
        let mut draw_real = |d: usize, rng: &mut R| {
            x[d] = l_reals[d].sample(rng);
            log_ratio += l_reals[d].pdf(x[d]).ln() - g_reals[d].pdf(x[d]).ln();
        };
        draw_real(0, rng);
        draw_real(1, rng);
        let n_idx = l_n.sample(rng);
        draw_real(2, rng);
        draw_real(3, rng);
        draw_real(4, rng);
        log_ratio += l_n.pmf(n_idx).ln() - g_n.pmf(n_idx).ln();
        let candidate = HLeporParams {
            alpha: x[0],
            beta: x[1],
            n: space.n.0 + n_idx as u32,
            weight_elp: x[2],
            weight_pos: x[3],
            weight_pr: x[4],
        };
        if best.is_none_or(|(b, _)| log_ratio > b) {
            best = Some((log_ratio, candidate));
        }
    }
    best.expect("n_candidates >= 1").1
}

#[derive(Serialize, Deserialize)]
struct TrialLine {
    index: usize,
    params: HLeporParams,
    objective: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    wall_time: Option<f64>,
}

/// Writes one JSON object per trial. Wall-clock times are included only on
/// request, since they differ between otherwise identical runs.
pub fn write_trial_log(path: &Path, trials: &[Trial], include_wall_time: bool) -> Result<()> {
    let io = |e| Error::io(path, e);
    let mut out = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
    for t in trials {
        let line = TrialLine {
            index: t.index,
            params: t.params,
            objective: t.objective,
            wall_time: include_wall_time.then(|| t.wall_time.as_secs_f64()),
        };
        writeln!(out, "{}", serde_json::to_string(&line).expect("trial serializes")).map_err(io)?;
    }
    out.flush().map_err(io)
}

pub fn read_trial_log(path: &Path) -> Result<Vec<Trial>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, line)| {
            let t: TrialLine = serde_json::from_str(line).map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                message: format!("line {}: {e}", i + 1),
            })?;
            Ok(Trial {
                index: t.index,
                params: t.params,
                objective: t.objective,
                wall_time: Duration::from_secs_f64(t.wall_time.unwrap_or(0.0)),
            })
        })
        .collect()
}

/// Writes the trial's parameters and provenance as a preset file.
pub fn export_params(trial: &Trial, out: &Path, mut provenance: Provenance) -> Result<()> {
    provenance.objective = Some(trial.objective);
    write_preset_file(out, &trial.params, &provenance)
}

/// Splits a corpus into (tuning, held-out) parts by a hash of `seg_id`, so
/// every system's output for a segment lands on the same side.
pub fn split_holdout(corpus: &Corpus, holdout_percent: u8) -> (Corpus, Corpus) {
    let (mut train, mut held) = (Vec::new(), Vec::new());
    for record in &corpus.records {
        let digest = Sha256::digest(record.seg_id.as_bytes());
        let bucket = u64::from_be_bytes(digest[..8].try_into().expect("8 bytes")) % 100;
        if bucket < u64::from(holdout_percent) {
            held.push(record.clone());
        } else {
            train.push(record.clone());
        }
    }
    let make = |records| Corpus {
        records,
        tokenizer: corpus.tokenizer,
    };
    (make(train), make(held))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{score_corpus, SegmentRecord};
    use std::collections::BTreeMap;

    fn quadratic(p: &HLeporParams) -> Result<f64> {
        let w = [p.alpha, p.beta, p.weight_elp, p.weight_pos, p.weight_pr];
        Ok(w.iter().map(|v| (v - 5.0).powi(2)).sum::<f64>() + (p.n as f64 - 2.0).powi(2))
    }

    fn corpus_with_gold(params: &HLeporParams) -> Corpus {
        let pairs = [
            ("the cat sat on the mat", "the cat sat on a mat"),
            ("a b c d", "d c b a"),
            ("one two three", "one two three four five"),
            ("x y z", "x q z y"),
        ];
        let records: Vec<SegmentRecord> = pairs
            .iter()
            .enumerate()
            .map(|(i, (h, r))| SegmentRecord {
                seg_id: i.to_string(),
                system_id: "sys".into(),
                source: None,
                hypothesis: h.to_string(),
                reference: r.to_string(),
                gold: BTreeMap::new(),
            })
            .collect();
        let mut corpus = Corpus::new(records);
        let scores = score_corpus(&corpus, params).unwrap();
        for (r, s) in corpus.records.iter_mut().zip(scores.scores()) {
            r.gold.insert("self".into(), s);
        }
        corpus
    }

    #[test]
    fn self_agreement_is_zero() {
        let p = HLeporParams::new(3.0, 2.0, 2, 1.5, 9.0, 2.5).unwrap();
        let corpus = corpus_with_gold(&p);
        assert_eq!(objective(&corpus, "self", &GoldScale::unit(), &p).unwrap(), 0.0);
        let other = HLeporParams::new(9.0, 1.0, 2, 3.0, 7.0, 1.0).unwrap();
        assert!(objective(&corpus, "self", &GoldScale::unit(), &other).unwrap() > 0.0);
    }

    #[test]
    fn single_residual() {
        let mut corpus = corpus_with_gold(&HLeporParams::new(1.0, 1.0, 2, 1.0, 1.0, 1.0).unwrap());
        corpus.records.truncate(1);
        let p = HLeporParams::new(1.0, 1.0, 2, 1.0, 1.0, 1.0).unwrap();
        let metric = crate::metric::hlepor(&corpus.records[0].hypothesis, &corpus.records[0].reference, &p)
            .unwrap()
            .score;
        corpus.records[0].gold.insert("psqm".into(), 3.0);
        let v = objective(&corpus, "psqm", &GoldScale::psqm(), &p).unwrap();
        assert!((v - (metric - 0.5).abs()).abs() < 1e-15);
    }

    #[test]
    fn objective_errors() {
        let p = HLeporParams::new(1.0, 1.0, 2, 1.0, 1.0, 1.0).unwrap();
        let corpus = corpus_with_gold(&p);
        assert!(matches!(
            objective(&corpus, "labse", &GoldScale::unit(), &p),
            Err(Error::MissingGold { .. })
        ));
        assert!(matches!(
            objective(&Corpus::default(), "self", &GoldScale::unit(), &p),
            Err(Error::EmptyCorpus)
        ));
    }

    #[test]
    fn random_search_basics() {
        let space = SearchSpace::default();
        let one = tune_random(&quadratic, &space, 1, 5).unwrap();
        assert_eq!(one.trials.len(), 1);
        assert_eq!(one.best, one.trials[0]);

        let a = tune_random(&quadratic, &space, 50, 11).unwrap();
        let b = tune_random(&quadratic, &space, 50, 11).unwrap();
        let strip = |r: &TuneResult| r.trials.iter().map(|t| (t.params, t.objective)).collect::<Vec<_>>();
        assert_eq!(strip(&a), strip(&b));
        assert!(a.trials.iter().all(|t| space.contains(&t.params)));

        let constant = |_: &HLeporParams| Ok(0.25);
        assert_eq!(tune_random(&constant, &space, 20, 1).unwrap().best.objective, 0.25);
        assert!(tune_random(&quadratic, &space, 0, 1).is_err());
    }

    #[test]
    fn warmup_only_tpe_equals_random() {
        let space = SearchSpace::default();
        let config = TpeConfig {
            budget: 20,
            n_startup: 20,
            seed: 99,
            ..Default::default()
        };
        let tpe = tune_tpe(&quadratic, &space, &config).unwrap();
        let random = tune_random(&quadratic, &space, 20, 99).unwrap();
        for (a, b) in tpe.trials.iter().zip(&random.trials) {
            assert_eq!((a.index, a.params, a.objective), (b.index, b.params, b.objective));
        }
        // Longer runs share the warmup prefix.
        let long = tune_tpe(&quadratic, &space, &TpeConfig { budget: 40, ..config }).unwrap();
        assert_eq!(long.trials[..20].iter().map(|t| t.params).collect::<Vec<_>>(),
                   random.trials.iter().map(|t| t.params).collect::<Vec<_>>());
    }

    #[test]
    fn tpe_is_reproducible_contained_and_monotone() {
        let space = SearchSpace::default();
        let config = TpeConfig {
            budget: 80,
            seed: 4,
            ..Default::default()
        };
        let a = tune_tpe(&quadratic, &space, &config).unwrap();
        let b = tune_tpe(&quadratic, &space, &config).unwrap();
        let strip = |r: &TuneResult| r.trials.iter().map(|t| (t.params, t.objective)).collect::<Vec<_>>();
        assert_eq!(strip(&a), strip(&b));
        assert!(a.trials.iter().all(|t| space.contains(&t.params)));
        let running = a.running_best();
        assert!(running.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(*running.last().unwrap(), a.best.objective);
    }

    #[test]
    fn config_validation() {
        let ok = TpeConfig::default();
        ok.validate().unwrap();
        assert!(TpeConfig { gamma: 1.0, ..ok }.validate().is_err());
        assert!(TpeConfig { gamma: 0.0, ..ok }.validate().is_err());
        assert!(TpeConfig { n_startup: 301, ..ok }.validate().is_err());
        assert!(TpeConfig { n_candidates: 0, ..ok }.validate().is_err());
        assert!(TpeConfig { budget: 0, n_startup: 0, ..ok }.validate().is_err());
        let mut space = SearchSpace::default();
        space.alpha = RealRange::new(0.0, 1.0);
        assert!(space.validate().is_err());
        space = SearchSpace { n: (3, 2), ..Default::default() };
        assert!(space.validate().is_err());
    }

    #[test]
    fn trial_log_and_export_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let result = tune_tpe(&quadratic, &SearchSpace::default(), &TpeConfig { budget: 25, ..Default::default() }).unwrap();
        let log = dir.path().join("trials.jsonl");
        write_trial_log(&log, &result.trials, false).unwrap();
        assert!(!std::fs::read_to_string(&log).unwrap().contains("wall_time"));
        let back = read_trial_log(&log).unwrap();
        assert_eq!(back.len(), 25);
        assert!(back.iter().zip(&result.trials).all(|(a, b)| a.params == b.params && a.objective == b.objective));
        write_trial_log(&log, &result.trials, true).unwrap();
        assert!(std::fs::read_to_string(&log).unwrap().contains("wall_time"));

        let preset = dir.path().join("best.preset");
        export_params(&result.best, &preset, Provenance::default()).unwrap();
        let (params, prov) = crate::params::read_preset_file(&preset).unwrap();
        assert_eq!(params, result.best.params);
        assert_eq!(prov.objective, Some(result.best.objective));

        let missing = dir.path().join("no/such/dir/best.preset");
        let err = export_params(&result.best, &missing, Provenance::default()).unwrap_err();
        assert!(err.to_string().contains("no/such/dir"), "{err}");
    }

    #[test]
    fn holdout_split_is_by_segment() {
        let records: Vec<SegmentRecord> = (0..400)
            .map(|i| SegmentRecord {
                seg_id: (i / 2).to_string(),
                system_id: (i % 2).to_string(),
                source: None,
                hypothesis: "a".into(),
                reference: "a".into(),
                gold: BTreeMap::new(),
            })
            .collect();
        let corpus = Corpus::new(records);
        let (train, held) = split_holdout(&corpus, 20);
        assert_eq!(train.len() + held.len(), 400);
        assert!(held.len() > 40 && held.len() < 130, "{}", held.len());
        for r in &held.records {
            assert!(train.records.iter().all(|t| t.seg_id != r.seg_id));
        }
        assert_eq!(split_holdout(&corpus, 20), (train, held));
    }
}
