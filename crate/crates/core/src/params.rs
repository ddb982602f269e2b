//! Metric parameters, the built-in preset registry, and preset files.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kvfile;

/// Largest accepted context window radius.
pub const MAX_WINDOW: u32 = 10;

/// The six tunable values that define one metric instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HLeporParams {
    /// Recall weight inside HPR.
    pub alpha: f64,
    /// Precision weight inside HPR.
    pub beta: f64,
    /// Context window radius used when choosing between alignment candidates.
    pub n: u32,
    pub weight_elp: f64,
    pub weight_pos: f64,
    pub weight_pr: f64,
}

impl HLeporParams {
    pub fn new(alpha: f64, beta: f64, n: u32, weight_elp: f64, weight_pos: f64, weight_pr: f64) -> Result<Self> {
        let p = HLeporParams {
            alpha,
            beta,
            n,
            weight_elp,
            weight_pos,
            weight_pr,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("weight_elp", self.weight_elp),
            ("weight_pos", self.weight_pos),
            ("weight_pr", self.weight_pr),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(1..=MAX_WINDOW).contains(&self.n) {
            return Err(Error::InvalidParams(format!("n must be in 1..={MAX_WINDOW}, got {}", self.n)));
        }
        Ok(())
    }

    /// The six values in canonical order, `n` widened to f64.
    pub fn to_array(&self) -> [f64; 6] {
        [
            self.alpha,
            self.beta,
            self.n as f64,
            self.weight_elp,
            self.weight_pos,
            self.weight_pr,
        ]
    }

    fn entries(&self) -> [(&'static str, String); 6] {
        [
            ("alpha", format!("{:?}", self.alpha)),
            ("beta", format!("{:?}", self.beta)),
            ("n", self.n.to_string()),
            ("weight_elp", format!("{:?}", self.weight_elp)),
            ("weight_pos", format!("{:?}", self.weight_pos)),
            ("weight_pr", format!("{:?}", self.weight_pr)),
        ]
    }

    /// Reads the six parameter keys from a parsed key-value map.
    pub(crate) fn from_map(map: &BTreeMap<String, String>, path: &Path) -> Result<Self> {
        let real = |key: &str| -> Result<f64> {
            let raw = map.get(key).ok_or_else(|| Error::PresetFile {
                path: path.to_path_buf(),
                message: format!("missing key `{key}`"),
            })?;
            raw.parse().map_err(|_| Error::PresetFile {
                path: path.to_path_buf(),
                message: format!("`{key}` is not a number: {raw:?}"),
            })
        };
        let n_raw = map.get("n").ok_or_else(|| Error::PresetFile {
            path: path.to_path_buf(),
            message: "missing key `n`".into(),
        })?;
        let n = n_raw.parse().map_err(|_| Error::PresetFile {
            path: path.to_path_buf(),
            message: format!("`n` is not a positive integer: {n_raw:?}"),
        })?;
        HLeporParams::new(
            real("alpha")?,
            real("beta")?,
            n,
            real("weight_elp")?,
            real("weight_pos")?,
            real("weight_pr")?,
        )
    }
}

impl fmt::Display for HLeporParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "alpha={:?} beta={:?} n={} weight_elp={:?} weight_pos={:?} weight_pr={:?}",
            self.alpha, self.beta, self.n, self.weight_elp, self.weight_pos, self.weight_pr
        )
    }
}

/// Which family of published values a preset belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    /// Manually tuned values from the WMT13 hLEPOR submission.
    Default,
    /// Tuned against LaBSE similarity (WMT21 submission).
    CushleporLm,
    /// Tuned against professional SQM ratings (WMT21 submission).
    CushleporPsqm,
}

impl Flavor {
    pub fn as_str(self) -> &'static str {
        match self {
            Flavor::Default => "default",
            Flavor::CushleporLm => "cushlepor_lm",
            Flavor::CushleporPsqm => "cushlepor_psqm",
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Flavor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "default" => Ok(Flavor::Default),
            "cushlepor_lm" | "lm" => Ok(Flavor::CushleporLm),
            "cushlepor_psqm" | "psqm" => Ok(Flavor::CushleporPsqm),
            _ => Err(unknown_preset(s)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub pair: &'static str,
    pub flavor: Flavor,
    pub params: HLeporParams,
    pub provenance: &'static str,
}

impl Preset {
    pub fn name(&self) -> String {
        format!("{}:{}", self.pair, self.flavor)
    }
}

const fn p(alpha: f64, beta: f64, n: u32, weight_elp: f64, weight_pos: f64, weight_pr: f64) -> HLeporParams {
    HLeporParams {
        alpha,
        beta,
        n,
        weight_elp,
        weight_pos,
        weight_pr,
    }
}

const WMT13: &str = "wmt13-manual";
const WMT21_LM: &str = "wmt21-labse";
const WMT21_PSQM: &str = "wmt21-psqm";

const EN_CS_RU: HLeporParams = p(9.0, 1.0, 2, 2.0, 1.0, 7.0);
const EN_DE: HLeporParams = p(9.0, 1.0, 2, 3.0, 7.0, 1.0);
const CS_ES_RU_EN: HLeporParams = p(1.0, 9.0, 2, 2.0, 1.0, 7.0);
const DE_FR_EN_ES_FR: HLeporParams = p(9.0, 1.0, 2, 2.0, 1.0, 3.0);

static PRESETS: [Preset; 14] = [
    Preset { pair: "en-cs", flavor: Flavor::Default, params: EN_CS_RU, provenance: WMT13 },
    Preset { pair: "en-ru", flavor: Flavor::Default, params: EN_CS_RU, provenance: WMT13 },
    Preset { pair: "en-de", flavor: Flavor::Default, params: EN_DE, provenance: WMT13 },
    Preset { pair: "cs-en", flavor: Flavor::Default, params: CS_ES_RU_EN, provenance: WMT13 },
    Preset { pair: "es-en", flavor: Flavor::Default, params: CS_ES_RU_EN, provenance: WMT13 },
    Preset { pair: "ru-en", flavor: Flavor::Default, params: CS_ES_RU_EN, provenance: WMT13 },
    Preset { pair: "de-en", flavor: Flavor::Default, params: DE_FR_EN_ES_FR, provenance: WMT13 },
    Preset { pair: "fr-en", flavor: Flavor::Default, params: DE_FR_EN_ES_FR, provenance: WMT13 },
    Preset { pair: "en-es", flavor: Flavor::Default, params: DE_FR_EN_ES_FR, provenance: WMT13 },
    Preset { pair: "en-fr", flavor: Flavor::Default, params: DE_FR_EN_ES_FR, provenance: WMT13 },
    Preset { pair: "zh-en", flavor: Flavor::CushleporLm, params: p(2.85, 4.73, 1, 1.01, 11.13, 4.62), provenance: WMT21_LM },
    Preset { pair: "zh-en", flavor: Flavor::CushleporPsqm, params: p(9.09, 3.55, 3, 1.01, 14.98, 1.57), provenance: WMT21_PSQM },
    Preset { pair: "en-de", flavor: Flavor::CushleporLm, params: p(2.95, 2.68, 2, 1.0, 11.79, 1.87), provenance: WMT21_LM },
    Preset { pair: "en-de", flavor: Flavor::CushleporPsqm, params: p(1.13, 1.71, 2, 1.06, 11.90, 1.01), provenance: WMT21_PSQM },
];

/// Every built-in preset, in registry order.
pub fn presets() -> &'static [Preset] {
    &PRESETS
}

fn available() -> String {
    PRESETS.iter().map(Preset::name).collect::<Vec<_>>().join(", ")
}

fn unknown_preset(requested: &str) -> Error {
    Error::UnknownPreset {
        requested: requested.to_string(),
        available: available(),
    }
}

fn normalize_pair(pair: &str) -> String {
    pair.trim().to_ascii_lowercase().replace("=>", "-").replace('_', "-")
}

pub fn preset(language_pair: &str, flavor: Flavor) -> Result<HLeporParams> {
    let pair = normalize_pair(language_pair);
    PRESETS
        .iter()
        .find(|p| p.pair == pair && p.flavor == flavor)
        .map(|p| p.params)
        .ok_or_else(|| unknown_preset(&format!("{pair}:{flavor}")))
}

/// Looks up `pair[:flavor]`, e.g. `en-de` or `zh-en:cushlepor_psqm`.
pub fn preset_by_name(name: &str) -> Result<HLeporParams> {
    match name.split_once(':') {
        Some((pair, flavor)) => {
            let flavor = flavor.parse().map_err(|_| unknown_preset(name))?;
            preset(pair, flavor)
        }
        None => preset(name, Flavor::Default),
    }
}

/// Provenance recorded next to tuned parameters in a preset file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Provenance {
    pub objective: Option<f64>,
    pub seed: Option<u64>,
    pub budget: Option<usize>,
    pub gold_column: Option<String>,
    pub corpus_sha256: Option<String>,
}

const PROVENANCE_KEYS: [&str; 5] = ["objective", "seed", "budget", "gold_column", "corpus_sha256"];

pub fn render_preset(params: &HLeporParams, provenance: &Provenance) -> String {
    let mut entries: Vec<(&str, String)> = params.entries().into_iter().collect();
    if let Some(v) = provenance.objective {
        entries.push(("objective", format!("{v:?}")));
    }
    if let Some(v) = provenance.seed {
        entries.push(("seed", v.to_string()));
    }
    if let Some(v) = provenance.budget {
        entries.push(("budget", v.to_string()));
    }
    if let Some(v) = &provenance.gold_column {
        entries.push(("gold_column", v.clone()));
    }
    if let Some(v) = &provenance.corpus_sha256 {
        entries.push(("corpus_sha256", v.clone()));
    }
    kvfile::render(entries)
}

/// Writes a preset file. The parent directory must exist.
pub fn write_preset_file(path: &Path, params: &HLeporParams, provenance: &Provenance) -> Result<()> {
    std::fs::write(path, render_preset(params, provenance)).map_err(|e| Error::io(path, e))
}

pub fn read_preset_file(path: &Path) -> Result<(HLeporParams, Provenance)> {
    let map = kvfile::read(path)?;
    if let Some(key) = map
        .keys()
        .find(|k| !PROVENANCE_KEYS.contains(&k.as_str()) && !params_key(k))
    {
        return Err(Error::PresetFile {
            path: path.to_path_buf(),
            message: format!("unknown key `{key}`"),
        });
    }
    let params = HLeporParams::from_map(&map, path)?;
    let bad = |key: &str| Error::PresetFile {
        path: path.to_path_buf(),
        message: format!("malformed `{key}`"),
    };
    let provenance = Provenance {
        objective: map.get("objective").map(|v| v.parse()).transpose().map_err(|_| bad("objective"))?,
        seed: map.get("seed").map(|v| v.parse()).transpose().map_err(|_| bad("seed"))?,
        budget: map.get("budget").map(|v| v.parse()).transpose().map_err(|_| bad("budget"))?,
        gold_column: map.get("gold_column").cloned(),
        corpus_sha256: map.get("corpus_sha256").cloned(),
    };
    Ok((params, provenance))
}

fn params_key(k: &str) -> bool {
    matches!(k, "alpha" | "beta" | "n" | "weight_elp" | "weight_pos" | "weight_pr")
}
