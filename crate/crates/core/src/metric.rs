//! Word-level hLEPOR.
//!
//! The score of a hypothesis against a single reference is the weighted
//! harmonic mean of three factors:
//!
//! * `LP`, a two-sided length penalty,
//! * `NPosPenal = exp(-NPD)`, where `NPD` is the mean absolute position
//!   difference of aligned words, normalised by the hypothesis length,
//! * `HPR`, the weighted harmonic mean of unigram precision and recall.
//!
//! Every intermediate quantity is returned in a [`FactorBreakdown`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Side};
use crate::params::HLeporParams;

/// Case-folded word tokens of one sentence.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenSeq {
    tokens: Vec<String>,
}

impl TokenSeq {
    pub fn new(tokens: Vec<String>) -> Self {
        TokenSeq { tokens }
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

impl<S: Into<String>> FromIterator<S> for TokenSeq {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        TokenSeq::new(iter.into_iter().map(Into::into).collect())
    }
}

/// How raw text is turned into tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Tokenizer {
    /// Case-fold, split on whitespace, and detach leading/trailing punctuation.
    #[default]
    Standard,
    /// Case-fold and split on whitespace only, for pre-tokenized input.
    Whitespace,
}

impl Tokenizer {
    pub fn tokenize(self, text: &str) -> TokenSeq {
        match self {
            Tokenizer::Standard => tokenize(text),
            Tokenizer::Whitespace => text.split_whitespace().map(str::to_lowercase).collect(),
        }
    }
}

fn is_punct(c: char) -> bool {
    !c.is_alphanumeric()
}

/// Splits `text` into case-folded tokens.
///
/// Each whitespace-delimited chunk is lowercased; non-alphanumeric characters
/// at either end of the chunk become single-character tokens. Inner
/// punctuation ("don't", "3.5") stays attached.
pub fn tokenize(text: &str) -> TokenSeq {
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        let folded = chunk.to_lowercase();
        let chars: Vec<char> = folded.chars().collect();
        let start = chars.iter().position(|&c| !is_punct(c));
        let Some(start) = start else {
            tokens.extend(chars.iter().map(|c| c.to_string()));
            continue;
        };
        // A non-punctuation character exists, so rposition finds one.
        let end = chars.iter().rposition(|&c| !is_punct(c)).unwrap_or(start) + 1;
        tokens.extend(chars[..start].iter().map(|c| c.to_string()));
        tokens.push(chars[start..end].iter().collect());
        tokens.extend(chars[end..].iter().map(|c| c.to_string()));
    }
    TokenSeq { tokens }
}

/// One-to-one matching between identical hypothesis and reference tokens.
///
/// Positions are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Alignment {
    pub pairs: Vec<(usize, usize)>,
}

impl Alignment {
    pub fn aligned_num(&self) -> usize {
        self.pairs.len()
    }

    /// Σ |hyp_pos − ref_pos| over the aligned pairs.
    pub fn position_difference_sum(&self) -> usize {
        self.pairs.iter().map(|&(h, r)| h.abs_diff(r)).sum()
    }
}

/// Number of offsets `k` in `-window..=window`, `k != 0`, whose neighbours agree.
fn context_score(hyp: &[String], reference: &[String], i: usize, j: usize, window: usize) -> usize {
    let mut score = 0;
    for k in 1..=window {
        if i >= k && j >= k && hyp[i - k] == reference[j - k] {
            score += 1;
        }
        if i + k < hyp.len() && j + k < reference.len() && hyp[i + k] == reference[j + k] {
            score += 1;
        }
    }
    score
}

/// Greedy left-to-right alignment over hypothesis positions.
///
/// For each hypothesis token the candidates are the unconsumed reference
/// positions holding the same token. The candidate with the most agreeing
/// neighbours within `window` words on either side wins; ties go to the
/// smallest position distance, then to the leftmost reference position.
pub fn align(hyp: &TokenSeq, reference: &TokenSeq, window: usize) -> Alignment {
    let (h, r) = (hyp.tokens(), reference.tokens());
    let mut consumed = vec![false; r.len()];
    let mut pairs = Vec::new();
    for (i, token) in h.iter().enumerate() {
        let mut best: Option<(usize, usize, usize)> = None; // (j, context, distance)
        for (j, candidate) in r.iter().enumerate() {
            if consumed[j] || candidate != token {
                continue;
            }
            let context = context_score(h, r, i, j, window);
            let distance = i.abs_diff(j);
            let better = match best {
                None => true,
                Some((_, bc, bd)) => context > bc || (context == bc && distance < bd),
            };
            if better {
                best = Some((j, context, distance));
            }
        }
        if let Some((j, _, _)) = best {
            consumed[j] = true;
            pairs.push((i + 1, j + 1));
        }
    }
    Alignment { pairs }
}

/// Two-sided exponential length penalty.
pub fn length_penalty(len_hyp: usize, len_ref: usize) -> Result<f64> {
    check_lengths(len_hyp, len_ref)?;
    Ok(lp_nonzero(len_hyp, len_ref))
}

fn lp_nonzero(len_hyp: usize, len_ref: usize) -> f64 {
    let (h, r) = (len_hyp as f64, len_ref as f64);
    match len_hyp.cmp(&len_ref) {
        std::cmp::Ordering::Equal => 1.0,
        std::cmp::Ordering::Less => (1.0 - r / h).exp(),
        std::cmp::Ordering::Greater => (1.0 - h / r).exp(),
    }
}

/// Mean absolute position difference over the hypothesis length.
///
/// Unaligned hypothesis words contribute nothing to the sum. A zero
/// `len_hyp` yields 0.
pub fn npd(alignment: &Alignment, len_hyp: usize) -> f64 {
    if len_hyp == 0 {
        return 0.0;
    }
    alignment.position_difference_sum() as f64 / len_hyp as f64
}

pub fn npos_penal(npd_value: f64) -> f64 {
    (-npd_value).exp()
}

fn precision_recall(aligned_num: usize, len_hyp: usize, len_ref: usize) -> (f64, f64) {
    let a = aligned_num as f64;
    (a / len_hyp as f64, a / len_ref as f64)
}

fn weighted_pr(precision: f64, recall: f64, alpha: f64, beta: f64) -> f64 {
    if precision == 0.0 || recall == 0.0 {
        return 0.0;
    }
    (alpha + beta) * precision * recall / (alpha * precision + beta * recall)
}

/// Harmonic mean of precision and recall, `alpha` weighting recall and
/// `beta` weighting precision. Zero when nothing is aligned.
pub fn hpr(aligned_num: usize, len_hyp: usize, len_ref: usize, alpha: f64, beta: f64) -> Result<f64> {
    check_lengths(len_hyp, len_ref)?;
    if aligned_num > len_hyp.min(len_ref) {
        return Err(Error::InvalidParams(format!(
            "aligned count {aligned_num} exceeds min({len_hyp}, {len_ref})"
        )));
    }
    let (p, r) = precision_recall(aligned_num, len_hyp, len_ref);
    Ok(weighted_pr(p, r, alpha, beta))
}

fn check_lengths(len_hyp: usize, len_ref: usize) -> Result<()> {
    if len_hyp == 0 {
        return Err(Error::ZeroLength {
            side: Side::Hypothesis,
        });
    }
    if len_ref == 0 {
        return Err(Error::ZeroLength {
            side: Side::Reference,
        });
    }
    Ok(())
}

/// The parameter-independent part of a segment evaluation for one window size.
///
/// Everything the final score needs from the text is captured here, so a
/// segment can be rescored under many parameter sets without realigning.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentStats {
    pub len_hyp: usize,
    pub len_ref: usize,
    pub aligned_num: usize,
    pub position_difference_sum: usize,
}

impl SegmentStats {
    pub fn from_tokens(hyp: &TokenSeq, reference: &TokenSeq, window: usize) -> Result<Self> {
        if hyp.is_empty() {
            return Err(Error::EmptySide {
                side: Side::Hypothesis,
            });
        }
        if reference.is_empty() {
            return Err(Error::EmptySide {
                side: Side::Reference,
            });
        }
        let alignment = align(hyp, reference, window);
        Ok(SegmentStats {
            len_hyp: hyp.len(),
            len_ref: reference.len(),
            aligned_num: alignment.aligned_num(),
            position_difference_sum: alignment.position_difference_sum(),
        })
    }

    /// Combines the stats with the weighting parameters. Lengths are
    /// non-zero by construction.
    pub fn breakdown(&self, params: &HLeporParams) -> FactorBreakdown {
        let lp = lp_nonzero(self.len_hyp, self.len_ref);
        let npd = self.position_difference_sum as f64 / self.len_hyp as f64;
        let npos_penal = npos_penal(npd);
        let (precision, recall) = precision_recall(self.aligned_num, self.len_hyp, self.len_ref);
        let hpr = weighted_pr(precision, recall, params.alpha, params.beta);
        let score = if hpr == 0.0 {
            0.0
        } else {
            (params.weight_elp + params.weight_pos + params.weight_pr)
                / (params.weight_elp / lp + params.weight_pos / npos_penal + params.weight_pr / hpr)
        };
        FactorBreakdown {
            lp,
            npd,
            npos_penal,
            precision,
            recall,
            hpr,
            score,
        }
    }
}

/// Per-segment factors and final score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorBreakdown {
    pub lp: f64,
    pub npd: f64,
    pub npos_penal: f64,
    pub precision: f64,
    pub recall: f64,
    pub hpr: f64,
    pub score: f64,
}

/// Scores already-tokenized sentences.
pub fn hlepor_tokens(hyp: &TokenSeq, reference: &TokenSeq, params: &HLeporParams) -> Result<FactorBreakdown> {
    params.validate()?;
    let stats = SegmentStats::from_tokens(hyp, reference, params.n as usize)?;
    Ok(stats.breakdown(params))
}

/// Scores raw text with the standard tokenizer.
pub fn hlepor(hyp: &str, reference: &str, params: &HLeporParams) -> Result<FactorBreakdown> {
    hlepor_tokens(&tokenize(hyp), &tokenize(reference), params)
}
