//! Experiment configuration: a TOML file, command-line flags, or both
//! (flags win). Unknown keys in a file are rejected.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use qecm_core::adversary::{
    breidbart_attack, constant_bit_attack, copy_attack, guess_attack, half_split_distinguisher,
    key_leak_distinguisher, random_cd_attack, random_coin_distinguisher, random_distinguisher,
    split_measure_attack, transform_cd_to_cloning, trivial_cd_attack, CloningAttack,
    CloningDistinguishingAttack, DistinguishingAttack,
};
use qecm_core::games::{EvalOptions, MessageDistribution, Mode};
use qecm_core::scheme::{ConjugateScheme, FConjugateScheme, OtpScheme, PrfModel, Qecm};
use qecm_core::BitString;

/// Environment variable consulted for the seed when neither a flag nor the
/// config file sets one.
pub const SEED_ENV: &str = "QECM_SEED";

pub const DEFAULT_SEED: u64 = 1;

/// A configuration the harness cannot run. Reported with exit code 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

macro_rules! config_err {
    ($($t:tt)*) => { ConfigError(format!($($t)*)) };
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum GameKind {
    Cloning,
    Distinguishing,
    CloningDistinguishing,
    /// Cloning game under a `min_entropy:<h>` distribution, with the
    /// transferred bound.
    MinEntropy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum SchemeName {
    Otp,
    Ce,
    Fce,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum PrfChoice {
    /// A family of seeded random oracles.
    Oracle,
    /// The keyed extendable-output hash.
    Qprf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum ModeArg {
    Exact,
    MonteCarlo,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::MonteCarlo => Mode::MonteCarlo,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

/// One game evaluation.
///
/// Attacks are named `name` or `name:parameter`:
///
/// | game | attacks |
/// |---|---|
/// | cloning, min_entropy | `copy`, `guess[:bits]`, `breidbart`, `split_measure`, `transformed:<cloning-distinguishing attack>` |
/// | cloning_distinguishing | `trivial_cd[:bits]`, `constant_bit:0\|1`, `half_split`, `random_cd:<seed>` |
/// | distinguishing | `random_coin`, `key_leak`, `random:<seed>` |
///
/// Distributions are `uniform`, `point:<bits>` or `min_entropy:<h>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub game: GameKind,
    pub scheme: SchemeName,
    pub lambda: usize,
    /// Message length; defaults to `lambda`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// How F-conjugate encryption realises its pseudorandom function.
    pub prf: PrfChoice,
    pub attack: String,
    pub distribution: String,
    pub mode: ModeArg,
    /// Monte Carlo trial count.
    pub trials: u64,
    /// Size of the sampled oracle family in the oracle model.
    pub oracle_samples: usize,
    pub seed: u64,
    pub format: Format,
    /// Write here instead of stdout.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// Every field optional, for a partially specified file.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialConfig {
    game: Option<GameKind>,
    scheme: Option<SchemeName>,
    lambda: Option<usize>,
    n: Option<usize>,
    prf: Option<PrfChoice>,
    attack: Option<String>,
    distribution: Option<String>,
    mode: Option<ModeArg>,
    trials: Option<u64>,
    oracle_samples: Option<usize>,
    seed: Option<u64>,
    format: Option<Format>,
    output: Option<PathBuf>,
}

/// Values given on the command line; `None` leaves the file or default in
/// place.
#[derive(Clone, Debug, Default, PartialEq, clap::Args)]
pub struct ConfigOverrides {
    /// TOML file with experiment settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub game: Option<GameKind>,
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeName>,
    #[arg(long)]
    pub lambda: Option<usize>,
    /// Message length (defaults to lambda).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_enum)]
    pub prf: Option<PrfChoice>,
    /// Attack name, optionally `name:parameter`.
    #[arg(long)]
    pub attack: Option<String>,
    /// `uniform`, `point:<bits>` or `min_entropy:<h>`.
    #[arg(long)]
    pub distribution: Option<String>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub oracle_samples: Option<usize>,
    /// Defaults to the QECM_SEED environment variable, then 1.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// Seed from [`SEED_ENV`], or [`DEFAULT_SEED`].
pub fn default_seed() -> Result<u64, ConfigError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| config_err!("{SEED_ENV}={v:?} is not an unsigned integer")),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let partial: PartialConfig = toml::from_str(text).map_err(|e| config_err!("{e}"))?;
        Self::merge(partial, &ConfigOverrides::default())
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err!("cannot read {}: {e}", path.display()))?;
        Self::from_toml_str(&text)
    }

    /// Reads `overrides.config` if given, then applies the flags.
    pub fn resolve(overrides: &ConfigOverrides) -> Result<Self, ConfigError> {
        let partial = match &overrides.config {
            Some(path) => {
                let text =
                    std::fs::read_to_string(path).map_err(|e| config_err!("cannot read {}: {e}", path.display()))?;
                toml::from_str(&text).map_err(|e| config_err!("{}: {e}", path.display()))?
            }
            None => PartialConfig::default(),
        };
        Self::merge(partial, overrides)
    }

    fn merge(file: PartialConfig, flags: &ConfigOverrides) -> Result<Self, ConfigError> {
        let seed = match flags.seed.or(file.seed) {
            Some(s) => s,
            None => default_seed()?,
        };
        let cfg = Self {
            game: flags.game.or(file.game).unwrap_or(GameKind::Cloning),
            scheme: flags.scheme.or(file.scheme).unwrap_or(SchemeName::Ce),
            lambda: flags.lambda.or(file.lambda).unwrap_or(2),
            n: flags.n.or(file.n),
            prf: flags.prf.or(file.prf).unwrap_or(PrfChoice::Oracle),
            attack: flags.attack.clone().or(file.attack).unwrap_or_else(|| "breidbart".into()),
            distribution: flags.distribution.clone().or(file.distribution).unwrap_or_else(|| "uniform".into()),
            mode: flags.mode.or(file.mode).unwrap_or(ModeArg::Exact),
            trials: flags.trials.or(file.trials).unwrap_or(10_000),
            oracle_samples: flags.oracle_samples.or(file.oracle_samples).unwrap_or(64),
            seed,
            format: flags.format.or(file.format).unwrap_or(Format::Json),
            output: flags.output.clone().or(file.output),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn message_bits(&self) -> usize {
        self.n.unwrap_or(self.lambda)
    }

    /// Cheap checks that need no scheme construction.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.lambda == 0 {
            return Err(config_err!("lambda must be positive"));
        }
        if self.scheme != SchemeName::Fce && self.n.is_some_and(|n| n != self.lambda) {
            return Err(config_err!("{:?} encrypts lambda-bit messages; drop n or set it to {}", self.scheme, self.lambda));
        }
        if self.mode == ModeArg::MonteCarlo && self.trials == 0 {
            return Err(config_err!("Monte Carlo mode needs trials > 0"));
        }
        if self.oracle_samples == 0 {
            return Err(config_err!("oracle_samples must be positive"));
        }
        if self.game == GameKind::MinEntropy && !self.distribution.starts_with("min_entropy:") {
            return Err(config_err!("the min_entropy game needs distribution = \"min_entropy:<h>\""));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, without the output path: the
    /// same experiment written to two places hashes the same.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output = None;
        config_hash(&canonical)
    }

    pub fn eval_options(&self) -> EvalOptions {
        match self.mode {
            ModeArg::Exact => EvalOptions::exact(),
            ModeArg::MonteCarlo => EvalOptions::monte_carlo(self.trials, self.seed),
        }
    }

    /// Core errors pass through unchanged so capacity failures stay
    /// distinguishable.
    pub fn build_scheme(&self) -> anyhow::Result<Box<dyn Qecm>> {
        let n = self.message_bits();
        let scheme: Box<dyn Qecm> = match self.scheme {
            SchemeName::Otp => Box::new(OtpScheme::new(self.lambda)?),
            SchemeName::Ce => Box::new(ConjugateScheme::new(self.lambda)?),
            SchemeName::Fce => {
                let model = match self.prf {
                    PrfChoice::Qprf => PrfModel::Qprf,
                    PrfChoice::Oracle => PrfModel::Oracle { family_seed: self.seed, samples: self.oracle_samples },
                };
                Box::new(FConjugateScheme::new(self.lambda, n, model)?)
            }
        };
        Ok(scheme)
    }

    pub fn build_distribution(&self) -> anyhow::Result<MessageDistribution> {
        let n = self.message_bits();
        let (name, param) = split_label(&self.distribution);
        let dist = match (name, param) {
            ("uniform", None) => MessageDistribution::uniform(n),
            ("point", Some(bits)) => MessageDistribution::point(parse_bits(bits, n)?),
            ("min_entropy", Some(h)) => {
                let h: f64 = h.parse().map_err(|_| config_err!("min-entropy {h:?} is not a number"))?;
                MessageDistribution::min_entropy(n, h)
            }
            _ => return Err(config_err!("unknown distribution {:?}", self.distribution).into()),
        };
        Ok(dist?)
    }

    /// The min-entropy parameter of a `min_entropy:<h>` distribution.
    pub fn min_entropy(&self) -> Result<f64, ConfigError> {
        match split_label(&self.distribution) {
            ("min_entropy", Some(h)) => h.parse().map_err(|_| config_err!("min-entropy {h:?} is not a number")),
            _ => Err(config_err!("distribution {:?} has no min-entropy parameter", self.distribution)),
        }
    }
}

/// SHA-256 (lowercase hex) of the JSON serialization of `value`.
pub fn config_hash<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("configuration types serialize");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn split_label(label: &str) -> (&str, Option<&str>) {
    match label.split_once(':') {
        Some((name, param)) => (name.trim(), Some(param.trim())),
        None => (label.trim(), None),
    }
}

fn parse_bits(text: &str, n: usize) -> Result<BitString, ConfigError> {
    let bits: BitString = text.parse().map_err(|_| config_err!("{text:?} is not a bit string"))?;
    if bits.len() != n {
        return Err(config_err!("{text:?} has {} bits, messages have {n}", bits.len()));
    }
    Ok(bits)
}

fn parse_seed(text: Option<&str>, attack: &str) -> Result<u64, ConfigError> {
    let text = text.ok_or_else(|| config_err!("attack {attack} needs a seed, as {attack}:<seed>"))?;
    text.parse().map_err(|_| config_err!("attack seed {text:?} is not an unsigned integer"))
}

fn no_param(param: Option<&str>, attack: &str) -> Result<(), ConfigError> {
    match param {
        Some(p) => Err(config_err!("attack {attack} takes no parameter, got {p:?}")),
        None => Ok(()),
    }
}

/// Parses a cloning attack name for `scheme`.
pub fn cloning_attack(label: &str, scheme: &dyn Qecm) -> anyhow::Result<Box<dyn CloningAttack>> {
    let (name, param) = split_label(label);
    let attack: Box<dyn CloningAttack> = match name {
        "copy" => {
            no_param(param, name)?;
            Box::new(copy_attack(scheme)?)
        }
        "guess" => {
            let m0 = match param {
                Some(bits) => parse_bits(bits, scheme.message_bits())?,
                None => BitString::zeros(scheme.message_bits()),
            };
            Box::new(guess_attack(m0))
        }
        "breidbart" => {
            no_param(param, name)?;
            Box::new(breidbart_attack(scheme)?)
        }
        "split_measure" => {
            no_param(param, name)?;
            Box::new(split_measure_attack(scheme)?)
        }
        "transformed" => {
            let inner = param.ok_or_else(|| config_err!("transformed needs an inner attack, as transformed:<attack>"))?;
            Box::new(transform_cd_to_cloning(cloning_distinguishing_attack(inner, scheme)?)?)
        }
        _ => return Err(config_err!("unknown cloning attack {label:?}").into()),
    };
    Ok(attack)
}

/// Parses a cloning-distinguishing attack name for `scheme`.
pub fn cloning_distinguishing_attack(
    label: &str,
    scheme: &dyn Qecm,
) -> anyhow::Result<Box<dyn CloningDistinguishingAttack>> {
    let (name, param) = split_label(label);
    let attack: Box<dyn CloningDistinguishingAttack> = match name {
        "trivial_cd" => {
            let m = match param {
                Some(bits) => parse_bits(bits, scheme.message_bits())?,
                None => BitString::ones(scheme.message_bits()),
            };
            Box::new(trivial_cd_attack(scheme, m)?)
        }
        "constant_bit" => {
            let bit = match param {
                Some("0") => false,
                Some("1") => true,
                _ => return Err(config_err!("constant_bit needs :0 or :1").into()),
            };
            Box::new(constant_bit_attack(scheme, bit)?)
        }
        "half_split" => {
            no_param(param, name)?;
            Box::new(half_split_distinguisher(scheme)?)
        }
        "random_cd" => Box::new(random_cd_attack(scheme, parse_seed(param, name)?)?),
        _ => return Err(config_err!("unknown cloning-distinguishing attack {label:?}").into()),
    };
    Ok(attack)
}

/// Parses a distinguishing attack name for `scheme`.
pub fn distinguishing_attack(label: &str, scheme: &dyn Qecm) -> anyhow::Result<Box<dyn DistinguishingAttack>> {
    let (name, param) = split_label(label);
    let attack: Box<dyn DistinguishingAttack> = match name {
        "random_coin" => {
            no_param(param, name)?;
            Box::new(random_coin_distinguisher(scheme)?)
        }
        "key_leak" => {
            no_param(param, name)?;
            Box::new(key_leak_distinguisher(scheme)?)
        }
        "random" => Box::new(random_distinguisher(scheme, parse_seed(param, name)?)?),
        _ => return Err(config_err!("unknown distinguishing attack {label:?}").into()),
    };
    Ok(attack)
}
