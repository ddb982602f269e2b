//! C ABI over the `cushlepor` library.
//!
//! Every fallible function returns a [`ChlStatus`]; on failure the message is
//! available from [`chl_last_error_message`] on the same thread. Strings are
//! NUL-terminated UTF-8. Corpora are opaque handles released with
//! [`chl_corpus_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use cushlepor::corpus::{agreement, ingest, score_corpus, Corpus, CorpusFormat, GoldScale, IngestOptions};
use cushlepor::error::ErrorClass;
use cushlepor::optimizer::{tune_random, tune_tpe, CorpusObjective, SearchSpace, TpeConfig};
use cushlepor::params::preset_by_name;
use cushlepor::{hlepor, Error, FactorBreakdown, HLeporParams};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChlParams {
    pub alpha: f64,
    pub beta: f64,
    pub n: u32,
    pub weight_elp: f64,
    pub weight_pos: f64,
    pub weight_pr: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChlBreakdown {
    pub lp: f64,
    pub npd: f64,
    pub npos_penal: f64,
    pub precision: f64,
    pub recall: f64,
    pub hpr: f64,
    pub score: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChlStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Bad parameters, preset name, scale, or configuration.
    Usage = 3,
    /// Malformed or degenerate input data.
    Data = 4,
    /// I/O or other environmental failure.
    Runtime = 5,
    /// A caller-supplied buffer has the wrong length.
    BufferSize = 6,
    /// Internal panic; the library state is unchanged.
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChlTuner {
    Tpe = 0,
    Random = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChlTuneConfig {
    pub tuner: ChlTuner,
    pub budget: usize,
    pub n_startup: usize,
    pub gamma: f64,
    pub n_candidates: usize,
    pub seed: u64,
    pub prior_weight: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChlTuneResult {
    pub params: ChlParams,
    /// RMSE of the best trial.
    pub objective: f64,
    pub best_index: usize,
    pub trials: usize,
}

/// Opaque corpus handle.
pub struct ChlCorpus {
    corpus: Corpus,
}

impl From<HLeporParams> for ChlParams {
    fn from(p: HLeporParams) -> Self {
        ChlParams {
            alpha: p.alpha,
            beta: p.beta,
            n: p.n,
            weight_elp: p.weight_elp,
            weight_pos: p.weight_pos,
            weight_pr: p.weight_pr,
        }
    }
}

impl ChlParams {
    fn validated(&self) -> Result<HLeporParams, Error> {
        HLeporParams::new(self.alpha, self.beta, self.n, self.weight_elp, self.weight_pos, self.weight_pr)
    }
}

impl From<FactorBreakdown> for ChlBreakdown {
    fn from(b: FactorBreakdown) -> Self {
        ChlBreakdown {
            lp: b.lp,
            npd: b.npd,
            npos_penal: b.npos_penal,
            precision: b.precision,
            recall: b.recall,
            hpr: b.hpr,
            score: b.score,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure {
    status: ChlStatus,
    message: String,
}

impl Failure {
    fn new(status: ChlStatus, message: impl Into<String>) -> Self {
        Failure {
            status,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e.class() {
            ErrorClass::Usage => ChlStatus::Usage,
            ErrorClass::Data => ChlStatus::Data,
            ErrorClass::Runtime => ChlStatus::Runtime,
        };
        Failure::new(status, e.to_string())
    }
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).expect("NUL bytes removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

/// Runs `body`, converting errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> ChlStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => ChlStatus::Ok,
        Ok(Err(f)) => {
            set_last_error(&f.message);
            f.status
        }
        Err(panic) => {
            let detail = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("internal error: {detail}"));
            ChlStatus::Panic
        }
    }
}

fn non_null<'a, T>(ptr: *const T, name: &str) -> Result<&'a T, Failure> {
    // SAFETY: callers pass pointers that are either null or valid for reads.
    unsafe { ptr.as_ref() }.ok_or_else(|| Failure::new(ChlStatus::NullArgument, format!("`{name}` is null")))
}

fn out_ptr<'a, T>(ptr: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    // SAFETY: callers pass pointers that are either null or valid for writes.
    unsafe { ptr.as_mut() }.ok_or_else(|| Failure::new(ChlStatus::NullArgument, format!("`{name}` is null")))
}

fn string<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if ptr.is_null() {
        return Err(Failure::new(ChlStatus::NullArgument, format!("`{name}` is null")));
    }
    // SAFETY: non-null and NUL-terminated per the API contract.
    unsafe { CStr::from_ptr(ptr) }
        .to_str()
        .map_err(|_| Failure::new(ChlStatus::InvalidUtf8, format!("`{name}` is not valid UTF-8")))
}

fn optional_string<'a>(ptr: *const c_char, name: &str) -> Result<Option<&'a str>, Failure> {
    if ptr.is_null() {
        Ok(None)
    } else {
        string(ptr, name).map(Some)
    }
}

fn corpus_ref<'a>(ptr: *const ChlCorpus) -> Result<&'a Corpus, Failure> {
    non_null(ptr, "corpus").map(|c| &c.corpus)
}

fn scale(ptr: *const c_char) -> Result<GoldScale, Failure> {
    Ok(match optional_string(ptr, "scale")? {
        Some(s) => s.parse()?,
        None => GoldScale::unit(),
    })
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn chl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn chl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Looks up a built-in preset such as `en-de` or `zh-en:cushlepor_psqm`.
///
/// # Safety
/// `name` must be null or a NUL-terminated string; `out` must be null or
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn chl_params_preset(name: *const c_char, out: *mut ChlParams) -> ChlStatus {
    guard(|| {
        let name = string(name, "name")?;
        let out = out_ptr(out, "out")?;
        *out = preset_by_name(name)?.into();
        Ok(())
    })
}

/// Scores one hypothesis against one reference.
///
/// # Safety
/// String arguments must be null or NUL-terminated; `params` must be null or
/// valid for reads; `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn chl_hlepor(
    hypothesis: *const c_char,
    reference: *const c_char,
    params: *const ChlParams,
    out: *mut ChlBreakdown,
) -> ChlStatus {
    guard(|| {
        let hyp = string(hypothesis, "hypothesis")?;
        let reference = string(reference, "reference")?;
        let params = non_null(params, "params")?.validated()?;
        let out = out_ptr(out, "out")?;
        *out = hlepor(hyp, reference, &params)?.into();
        Ok(())
    })
}

/// Loads a corpus file. `format` is `tsv`, `jsonl`, or null to infer it from
/// the extension. Every non-canonical column is read as a gold column. In
/// lenient mode (`strict == false`) invalid rows are skipped.
///
/// # Safety
/// String arguments must be null or NUL-terminated; `out` must be null or
/// valid for writes. The handle written to `out` must be released with
/// `chl_corpus_free`.
#[no_mangle]
pub unsafe extern "C" fn chl_corpus_load(
    path: *const c_char,
    format: *const c_char,
    strict: bool,
    out: *mut *mut ChlCorpus,
) -> ChlStatus {
    guard(|| {
        let path = Path::new(string(path, "path")?);
        let out = out_ptr(out, "out")?;
        let format = match optional_string(format, "format")? {
            Some(f) => f.parse()?,
            None if path.extension().is_some_and(|e| e == "jsonl" || e == "json") => CorpusFormat::Jsonl,
            None => CorpusFormat::Tsv,
        };
        let options = IngestOptions {
            format,
            strict,
            ..Default::default()
        };
        let corpus = ingest(path, &options)?.corpus;
        *out = Box::into_raw(Box::new(ChlCorpus { corpus }));
        Ok(())
    })
}

/// Number of segments, or 0 for a null handle.
///
/// # Safety
/// `corpus` must be null or a live handle from `chl_corpus_load`.
#[no_mangle]
pub unsafe extern "C" fn chl_corpus_len(corpus: *const ChlCorpus) -> usize {
    corpus_ref(corpus).map_or(0, Corpus::len)
}

/// Writes one score per segment, in corpus order, into `scores`, which must
/// hold exactly `len` values.
///
/// # Safety
/// `corpus` must be null or a live handle; `params` null or readable;
/// `scores` null or valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn chl_corpus_score(
    corpus: *const ChlCorpus,
    params: *const ChlParams,
    scores: *mut f64,
    len: usize,
) -> ChlStatus {
    guard(|| {
        let corpus = corpus_ref(corpus)?;
        let params = non_null(params, "params")?.validated()?;
        if scores.is_null() {
            return Err(Failure::new(ChlStatus::NullArgument, "`scores` is null"));
        }
        if len != corpus.len() {
            return Err(Failure::new(
                ChlStatus::BufferSize,
                format!("buffer holds {len} values, corpus has {} segments", corpus.len()),
            ));
        }
        let result = score_corpus(corpus, &params)?;
        // SAFETY: non-null and valid for `len` writes per the contract.
        let out = unsafe { std::slice::from_raw_parts_mut(scores, len) };
        for (slot, s) in out.iter_mut().zip(&result.segments) {
            *slot = s.breakdown.score;
        }
        Ok(())
    })
}

/// RMSE and Pearson correlation against a gold column. `scale` is `psqm`,
/// `unit`, `MIN:MAX[:inverted]`, or null for `unit`. Pearson is NaN when
/// undefined.
///
/// # Safety
/// `corpus` must be null or a live handle; strings null or NUL-terminated;
/// `params` null or readable; output pointers null or writable.
#[no_mangle]
pub unsafe extern "C" fn chl_corpus_agreement(
    corpus: *const ChlCorpus,
    params: *const ChlParams,
    gold_column: *const c_char,
    scale_name: *const c_char,
    out_rmse: *mut f64,
    out_pearson: *mut f64,
) -> ChlStatus {
    guard(|| {
        let corpus = corpus_ref(corpus)?;
        let params = non_null(params, "params")?.validated()?;
        let column = string(gold_column, "gold_column")?;
        let scale = scale(scale_name)?;
        let (out_rmse, out_pearson) = (out_ptr(out_rmse, "out_rmse")?, out_ptr(out_pearson, "out_pearson")?);
        let scores = score_corpus(corpus, &params)?;
        let a = agreement(corpus, &scores, column, &scale)?;
        *out_rmse = a.rmse;
        *out_pearson = a.pearson.unwrap_or(f64::NAN);
        Ok(())
    })
}

/// Default tuner settings.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn chl_tune_config_default(out: *mut ChlTuneConfig) -> ChlStatus {
    guard(|| {
        let d = TpeConfig::default();
        *out_ptr(out, "out")? = ChlTuneConfig {
            tuner: ChlTuner::Tpe,
            budget: d.budget,
            n_startup: d.n_startup,
            gamma: d.gamma,
            n_candidates: d.n_candidates,
            seed: d.seed,
            prior_weight: d.prior_weight,
        };
        Ok(())
    })
}

/// Tunes the parameters towards `gold_column` over the default search space.
///
/// # Safety
/// `corpus` must be null or a live handle; strings null or NUL-terminated;
/// `config` null or readable; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn chl_tune(
    corpus: *const ChlCorpus,
    gold_column: *const c_char,
    scale_name: *const c_char,
    config: *const ChlTuneConfig,
    out: *mut ChlTuneResult,
) -> ChlStatus {
    guard(|| {
        let corpus = corpus_ref(corpus)?;
        let column = string(gold_column, "gold_column")?;
        let scale = scale(scale_name)?;
        let c = non_null(config, "config")?;
        let out = out_ptr(out, "out")?;
        let tpe = TpeConfig {
            budget: c.budget,
            n_startup: c.n_startup,
            gamma: c.gamma,
            n_candidates: c.n_candidates,
            seed: c.seed,
            prior_weight: c.prior_weight,
        };
        let space = SearchSpace::default();
        let objective = CorpusObjective::new(corpus, column, &scale)?;
        let result = match c.tuner {
            ChlTuner::Tpe => tune_tpe(&objective, &space, &tpe)?,
            ChlTuner::Random => tune_random(&objective, &space, tpe.budget, tpe.seed)?,
        };
        *out = ChlTuneResult {
            params: result.best.params.into(),
            objective: result.best.objective,
            best_index: result.best.index,
            trials: result.trials.len(),
        };
        Ok(())
    })
}

/// Releases a corpus handle. Null is ignored.
///
/// # Safety
/// `corpus` must be null or a handle from `chl_corpus_load` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn chl_corpus_free(corpus: *mut ChlCorpus) {
    if !corpus.is_null() {
        // SAFETY: the handle came from Box::into_raw in chl_corpus_load.
        drop(unsafe { Box::from_raw(corpus) });
    }
}
