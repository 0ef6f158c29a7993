//! Experiment configuration. Every field has a default, so an empty config
//! reproduces the reference settings; unknown keys are rejected.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observers::CoderId;
use crate::sources::{HmmParams, MarkovChainParams, PhaseClock, DEFAULT_PREFIX_LEN};

pub const DEFAULT_SEED: u64 = 20_240_917;

const MIN_N: usize = 1000;

fn param(key: &str, reason: impl Into<String>) -> Error {
    Error::Config {
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn check_n(section: &str, n: usize) -> Result<()> {
    if n < MIN_N {
        return Err(param(&format!("{section}.n"), format!("{n} < {MIN_N}")));
    }
    Ok(())
}

fn check_replicates(section: &str, b: usize) -> Result<()> {
    if b == 0 {
        return Err(param(&format!("{section}.replicates"), "must be at least 1"));
    }
    Ok(())
}

fn check_alpha(section: &str, alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(param(&format!("{section}.alpha"), format!("{alpha} must be positive")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub ucurve: UcurveConfig,
    pub relativistic: RelativisticConfig,
    pub crypto_ladder: CryptoLadderConfig,
    pub ca_ladder: CaLadderConfig,
    pub coders: CodersConfig,
    pub infocheck: InfocheckConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: DEFAULT_SEED,
            ucurve: UcurveConfig::default(),
            relativistic: RelativisticConfig::default(),
            crypto_ladder: CryptoLadderConfig::default(),
            ca_ladder: CaLadderConfig::default(),
            coders: CodersConfig::default(),
            infocheck: InfocheckConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.ucurve.validate()?;
        self.relativistic.validate()?;
        self.crypto_ladder.validate()?;
        self.ca_ladder.validate()?;
        self.coders.validate()?;
        self.infocheck.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UcurvePair {
    pub name: String,
    pub template: Vec<u8>,
    /// Lower and higher Markov order.
    pub orders: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UcurveConfig {
    pub n: usize,
    pub replicates: usize,
    pub alpha: f64,
    pub burn_in: usize,
    pub p_grid: Vec<f64>,
    pub clock: PhaseClock,
    pub pairs: Vec<UcurvePair>,
}

impl Default for UcurveConfig {
    fn default() -> Self {
        UcurveConfig {
            n: 60_000,
            replicates: 16,
            alpha: 1.0,
            burn_in: 1000,
            p_grid: (0..=10).map(|i| i as f64 / 10.0).collect(),
            clock: PhaseClock::OnEmit,
            pairs: vec![
                UcurvePair {
                    name: "A".into(),
                    template: vec![0, 1],
                    orders: [1, 3],
                },
                UcurvePair {
                    name: "B".into(),
                    template: vec![0, 0, 0, 1, 1, 1],
                    orders: [3, 5],
                },
            ],
        }
    }
}

impl UcurveConfig {
    pub fn validate(&self) -> Result<()> {
        check_n("ucurve", self.n)?;
        check_replicates("ucurve", self.replicates)?;
        check_alpha("ucurve", self.alpha)?;
        if self.burn_in >= self.n {
            return Err(param("ucurve.burn_in", "must be smaller than n"));
        }
        if self.p_grid.is_empty() || self.p_grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(param("ucurve.p_grid", "values must lie in [0, 1]"));
        }
        if self.pairs.is_empty() {
            return Err(param("ucurve.pairs", "need at least one pair"));
        }
        for pair in &self.pairs {
            if pair.template.is_empty() || pair.template.iter().any(|&b| b > 1) {
                return Err(param("ucurve.pairs.template", "must be a nonempty bit array"));
            }
            if pair.orders[0] >= pair.orders[1] {
                return Err(param("ucurve.pairs.orders", "must be strictly ascending"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HmmConfig {
    pub transition: [[f64; 2]; 2],
    pub emission: [[f64; 2]; 2],
}

impl Default for HmmConfig {
    fn default() -> Self {
        let p = HmmParams::default();
        HmmConfig {
            transition: p.transition,
            emission: p.emission,
        }
    }
}

impl HmmConfig {
    pub fn params(&self) -> HmmParams {
        HmmParams {
            transition: self.transition,
            emission: self.emission,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RelativisticConfig {
    pub n: usize,
    pub replicates: usize,
    pub alpha: f64,
    pub hmm: HmmConfig,
    pub hmm_burn_in: usize,
    /// One crypto source per key length; keys are i.i.d. fair bits.
    pub key_lens: Vec<usize>,
    pub prefix_len: usize,
    pub reveal: bool,
    /// Naive and sophisticated Markov orders of the statistical family.
    pub stat_orders: [usize; 2],
    /// Key-length bound of the search family's sophisticated member.
    pub search_max_len: usize,
}

impl Default for RelativisticConfig {
    fn default() -> Self {
        RelativisticConfig {
            n: 50_000,
            replicates: 16,
            alpha: 1.0,
            hmm: HmmConfig::default(),
            hmm_burn_in: 1000,
            key_lens: vec![32, 3],
            prefix_len: DEFAULT_PREFIX_LEN,
            reveal: true,
            stat_orders: [0, 1],
            search_max_len: 64,
        }
    }
}

impl RelativisticConfig {
    pub fn validate(&self) -> Result<()> {
        check_n("relativistic", self.n)?;
        check_replicates("relativistic", self.replicates)?;
        check_alpha("relativistic", self.alpha)?;
        self.hmm.params().validate()?;
        if self.hmm_burn_in >= self.n {
            return Err(param("relativistic.hmm_burn_in", "must be smaller than n"));
        }
        if self.stat_orders[0] >= self.stat_orders[1] {
            return Err(param("relativistic.stat_orders", "must be strictly ascending"));
        }
        if self.search_max_len == 0 {
            return Err(param("relativistic.search_max_len", "must be at least 1"));
        }
        for &m in &self.key_lens {
            if m == 0 {
                return Err(param("relativistic.key_lens", "key length must be at least 1"));
            }
            let body = self.prefix_len + if self.reveal { m } else { 0 };
            if body + crate::sources::lcm(2, m) >= self.n {
                return Err(param("relativistic.n", format!("too short for key length {m}")));
            }
        }
        Ok(())
    }
}

/// A key given by length (drawn as a random primitive key) or explicitly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum KeySpec {
    Len { len: usize },
    Bits { bits: Vec<u8> },
}

impl KeySpec {
    pub fn len(&self) -> usize {
        match self {
            KeySpec::Len { len } => *len,
            KeySpec::Bits { bits } => bits.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Short label for CSV rows.
    pub fn label(&self) -> String {
        match self {
            KeySpec::Len { len } => format!("m{len}"),
            KeySpec::Bits { bits } => {
                let s: String = bits.iter().map(|b| char::from(b'0' + b)).collect();
                format!("key{s}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CryptoLadderConfig {
    pub n: usize,
    pub replicates: usize,
    pub max_budget: usize,
    pub keys: Vec<KeySpec>,
    pub prefix_len: usize,
    pub reveal: bool,
    pub tail_alpha: f64,
}

impl Default for CryptoLadderConfig {
    fn default() -> Self {
        CryptoLadderConfig {
            n: 50_000,
            replicates: 16,
            max_budget: 16,
            keys: [4, 8, 12].into_iter().map(|len| KeySpec::Len { len }).collect(),
            prefix_len: DEFAULT_PREFIX_LEN,
            reveal: true,
            tail_alpha: crate::ladders::DEFAULT_TAIL_ALPHA,
        }
    }
}

impl CryptoLadderConfig {
    pub fn validate(&self) -> Result<()> {
        check_n("crypto_ladder", self.n)?;
        check_replicates("crypto_ladder", self.replicates)?;
        if self.max_budget == 0 {
            return Err(param("crypto_ladder.max_budget", "must be at least 1"));
        }
        if !(self.tail_alpha > 0.0 && self.tail_alpha < 1.0) {
            return Err(param("crypto_ladder.tail_alpha", "must lie in (0, 1)"));
        }
        if self.keys.is_empty() {
            return Err(param("crypto_ladder.keys", "need at least one key"));
        }
        for key in &self.keys {
            let m = key.len();
            if m == 0 {
                return Err(param("crypto_ladder.keys", "key length must be at least 1"));
            }
            if m > self.max_budget {
                return Err(param(
                    "crypto_ladder.keys",
                    format!("key length {m} exceeds max_budget {}", self.max_budget),
                ));
            }
            if let KeySpec::Bits { bits } = key {
                if bits.iter().any(|&b| b > 1) {
                    return Err(param("crypto_ladder.keys", "key bits must be 0 or 1"));
                }
            }
            let body = self.prefix_len + if self.reveal { m } else { 0 };
            if body + crate::sources::lcm(2, m) >= self.n {
                return Err(param("crypto_ladder.n", format!("too short for key length {m}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CaLadderConfig {
    pub rules: Vec<u32>,
    /// Steps `k` between the initial row and the target row.
    pub horizon: usize,
    /// Largest simulation radius; budgets are radii `1..=max_radius`.
    pub max_radius: usize,
    /// Prediction instances per rule per replicate.
    pub instances: usize,
    pub replicates: usize,
    /// Monte Carlo completions when the light cone has too many unseen cells.
    pub samples: usize,
    /// Exact enumeration up to this many unseen cells.
    pub enumerate_max_missing: usize,
    /// Row width; `None` means `instances * (2 * horizon + 1)`.
    pub width: Option<usize>,
    pub tail_alpha: f64,
}

impl Default for CaLadderConfig {
    fn default() -> Self {
        CaLadderConfig {
            rules: vec![90, 30, 110],
            horizon: 20,
            max_radius: 20,
            instances: 2000,
            replicates: 1,
            samples: crate::observers::DEFAULT_SAMPLES,
            enumerate_max_missing: crate::observers::DEFAULT_ENUMERATE_MAX_MISSING,
            width: None,
            tail_alpha: crate::ladders::DEFAULT_TAIL_ALPHA,
        }
    }
}

impl CaLadderConfig {
    pub fn width(&self) -> usize {
        self.width.unwrap_or(self.instances * (2 * self.horizon + 1))
    }

    pub fn validate(&self) -> Result<()> {
        check_replicates("ca_ladder", self.replicates)?;
        if self.rules.is_empty() {
            return Err(param("ca_ladder.rules", "need at least one rule"));
        }
        if let Some(&r) = self.rules.iter().find(|&&r| r > 255) {
            return Err(param("ca_ladder.rules", format!("{r} not in [0, 255]")));
        }
        if self.horizon == 0 || self.horizon > 31 {
            return Err(param("ca_ladder.horizon", "must lie in 1..=31"));
        }
        if self.max_radius == 0 {
            return Err(param("ca_ladder.max_radius", "must be at least 1"));
        }
        if self.instances == 0 {
            return Err(param("ca_ladder.instances", "must be at least 1"));
        }
        if self.samples < crate::observers::DEFAULT_SAMPLES {
            return Err(param("ca_ladder.samples", "at least 512 required"));
        }
        let spacing = 2 * self.horizon + 1;
        if self.width() < spacing {
            return Err(param(
                "ca_ladder.width",
                format!("{} < 2 * horizon + 1 = {spacing}", self.width()),
            ));
        }
        if self.width() / spacing < self.instances {
            return Err(param(
                "ca_ladder.width",
                format!("{} holds fewer than {} disjoint light cones", self.width(), self.instances),
            ));
        }
        if !(self.tail_alpha > 0.0 && self.tail_alpha < 1.0) {
            return Err(param("ca_ladder.tail_alpha", "must lie in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CodersConfig {
    /// Length of the synthetic byte sources.
    pub n: usize,
    pub replicates: usize,
    /// Distinct byte values in one period of the periodic source.
    pub periodic_symbols: usize,
    /// Run length of each value in the periodic source.
    pub periodic_run: usize,
    /// Text corpus; `None` uses the embedded default corpus.
    pub corpus_path: Option<PathBuf>,
    /// Block length for the shuffle control on text.
    pub shuffle_block: usize,
    pub base_set: Vec<CoderId>,
    pub extra_coder: CoderId,
    pub control_coder: CoderId,
}

impl Default for CodersConfig {
    fn default() -> Self {
        CodersConfig {
            n: 65_536,
            replicates: 4,
            periodic_symbols: 8,
            periodic_run: 16,
            corpus_path: None,
            shuffle_block: 8,
            base_set: vec![CoderId::LzDeflate, CoderId::Blocksort],
            extra_coder: CoderId::Huffman0,
            control_coder: CoderId::Rle,
        }
    }
}

impl CodersConfig {
    pub fn validate(&self) -> Result<()> {
        check_n("coders", self.n)?;
        check_replicates("coders", self.replicates)?;
        if self.periodic_symbols == 0 || self.periodic_symbols > 256 {
            return Err(param("coders.periodic_symbols", "must lie in 1..=256"));
        }
        if self.periodic_run == 0 {
            return Err(param("coders.periodic_run", "must be at least 1"));
        }
        if self.shuffle_block == 0 {
            return Err(param("coders.shuffle_block", "must be at least 1"));
        }
        if self.base_set.is_empty() {
            return Err(param("coders.base_set", "need at least one coder"));
        }
        let mut all = self.base_set.clone();
        all.push(self.extra_coder);
        all.push(self.control_coder);
        for (i, c) in all.iter().enumerate() {
            if all[..i].contains(c) {
                return Err(param("coders", format!("coder {c} listed twice")));
            }
        }
        if let Some(path) = &self.corpus_path {
            if !path.is_file() {
                return Err(param("coders.corpus_path", format!("{} is not a readable file", path.display())));
            }
        }
        Ok(())
    }
}

/// A synthetic source with a known finite order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InfocheckSource {
    pub name: String,
    pub chain: MarkovChainParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InfocheckConfig {
    pub n: usize,
    pub max_order: usize,
    pub alpha: f64,
    pub sources: Vec<InfocheckSource>,
}

impl Default for InfocheckConfig {
    fn default() -> Self {
        InfocheckConfig {
            n: 100_000,
            max_order: 6,
            alpha: 1.0,
            sources: vec![
                InfocheckSource {
                    name: "iid".into(),
                    chain: MarkovChainParams::binary(0, &[0.5]),
                },
                InfocheckSource {
                    name: "flip0.1".into(),
                    chain: MarkovChainParams::binary_flip(0.1),
                },
                InfocheckSource {
                    name: "order2".into(),
                    chain: MarkovChainParams::binary(2, &[0.1, 0.7, 0.4, 0.85]),
                },
                InfocheckSource {
                    name: "order3".into(),
                    chain: MarkovChainParams::binary(3, &[0.05, 0.6, 0.3, 0.9, 0.2, 0.75, 0.5, 0.95]),
                },
            ],
        }
    }
}

impl InfocheckConfig {
    pub fn validate(&self) -> Result<()> {
        check_n("infocheck", self.n)?;
        check_alpha("infocheck", self.alpha)?;
        if self.max_order == 0 || self.max_order > 16 {
            return Err(param("infocheck.max_order", "must lie in 1..=16"));
        }
        if self.sources.is_empty() {
            return Err(param("infocheck.sources", "need at least one source"));
        }
        for s in &self.sources {
            s.chain.validate()?;
        }
        Ok(())
    }
}
