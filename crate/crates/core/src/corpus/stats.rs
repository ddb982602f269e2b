use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const HISTOGRAM_BINS: usize = 20;

/// Root mean squared difference between paired sequences.
pub fn rmse(metric_scores: &[f64], gold_scores: &[f64]) -> Result<f64> {
    if metric_scores.len() != gold_scores.len() {
        return Err(Error::LengthMismatch {
            left: metric_scores.len(),
            right: gold_scores.len(),
        });
    }
    if metric_scores.is_empty() {
        return Err(Error::EmptySequence);
    }
    let sum: f64 = metric_scores
        .iter()
        .zip(gold_scores)
        .map(|(m, g)| (m - g) * (m - g))
        .sum();
    Ok((sum / metric_scores.len() as f64).sqrt())
}

/// Sample Pearson correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::TooFewValues {
            needed: 2,
            got: x.len(),
        });
    }
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mean_x, b - mean_y);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Range of a gold score column, used to map it onto [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldScale {
    pub name: String,
    pub min: f64,
    pub max: f64,
    /// Lower raw values are better (e.g. MQM error penalties); mapped to 1 − x.
    #[serde(default)]
    pub inverted: bool,
}

impl GoldScale {
    pub fn new(name: impl Into<String>, min: f64, max: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || max <= min {
            return Err(Error::InvalidScale(format!("need finite min < max, got [{min}, {max}]")));
        }
        Ok(GoldScale {
            name: name.into(),
            min,
            max,
            inverted: false,
        })
    }

    /// SQM/pSQM segment ratings, 0 to 6.
    pub fn psqm() -> Self {
        GoldScale {
            name: "psqm".into(),
            min: 0.0,
            max: 6.0,
            inverted: false,
        }
    }

    /// Similarity-style scores already in [0, 1].
    pub fn unit() -> Self {
        GoldScale {
            name: "unit".into(),
            min: 0.0,
            max: 1.0,
            inverted: false,
        }
    }

    pub fn inverted(mut self) -> Self {
        self.inverted = true;
        self
    }
}

impl fmt::Display for GoldScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}:{:?}", self.min, self.max)?;
        if self.inverted {
            f.write_str(":inverted")?;
        }
        Ok(())
    }
}

impl FromStr for GoldScale {
    type Err = Error;

    /// Accepts `psqm`, `unit`, `similarity`, or `MIN:MAX[:inverted]`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "psqm" | "sqm" => return Ok(GoldScale::psqm()),
            "unit" | "similarity" | "labse" => return Ok(GoldScale::unit()),
            _ => {}
        }
        let parts: Vec<&str> = s.trim().split(':').collect();
        let bad = || Error::InvalidScale(format!("`{s}`: expected psqm, unit, or MIN:MAX[:inverted]"));
        let (lo, hi, inverted) = match parts.as_slice() {
            [lo, hi] => (lo, hi, false),
            [lo, hi, "inverted"] => (lo, hi, true),
            _ => return Err(bad()),
        };
        let min = lo.trim().parse().map_err(|_| bad())?;
        let max = hi.trim().parse().map_err(|_| bad())?;
        let scale = GoldScale::new(s.trim(), min, max)?;
        Ok(if inverted { scale.inverted() } else { scale })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedGold {
    pub value: f64,
    /// The raw value fell outside the scale and was clamped.
    pub clamped: bool,
}

/// Min-max normalization onto [0, 1], clamping out-of-range values.
pub fn normalize_gold(value: f64, scale: &GoldScale) -> NormalizedGold {
    let raw = (value - scale.min) / (scale.max - scale.min);
    let clamped = !(0.0..=1.0).contains(&raw);
    let unit = raw.clamp(0.0, 1.0);
    NormalizedGold {
        value: if scale.inverted { 1.0 - unit } else { unit },
        clamped,
    }
}

/// Fixed-width bin counts over [0, 1]: bins are left-closed, right-open,
/// except the last, which also holds 1.0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn from_values(values: impl IntoIterator<Item = f64>) -> Self {
        let mut counts = vec![0; HISTOGRAM_BINS];
        for v in values {
            counts[Self::bin_index(v)] += 1;
        }
        Histogram { counts }
    }

    pub fn bin_index(value: f64) -> usize {
        let scaled = (value.clamp(0.0, 1.0) * HISTOGRAM_BINS as f64).floor() as usize;
        scaled.min(HISTOGRAM_BINS - 1)
    }

    /// `[low, high)` edges of bin `i`.
    pub fn bin_edges(i: usize) -> (f64, f64) {
        let width = 1.0 / HISTOGRAM_BINS as f64;
        (i as f64 * width, (i + 1) as f64 * width)
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}
