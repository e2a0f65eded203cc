//! Security games and their evaluators.
//!
//! Every evaluator runs in one of two modes. Exact mode enumerates keys,
//! messages and encryption randomness and integrates decoder outcome
//! distributions in full. Monte Carlo mode draws these with a generator
//! derived from `(seed, trial index)`, computes the win probability of the
//! sampled instance and draws the trial's outcome from it; results do not
//! depend on trial scheduling.
//!
//! Bound checks attached to reports concern only the attack that was
//! evaluated. They are evidence, never a proof that no attack does better.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::bits::BitString;
use crate::error::{arg_err, Error, Result};
use crate::quantum::sample_distribution;

mod eval;

pub use eval::{
    eval_cloning_distinguishing_game, eval_cloning_game, eval_distinguishing_game, eval_moe_game,
    min_entropy_experiment,
};

/// Exact enumeration limit (keys x messages x encryption branches).
pub const MAX_EXACT_BRANCHES: f64 = 1e6;

/// Label carried by every bound check.
pub const HEURISTIC_LABEL: &str = "witness check of the evaluated attack only; not a bound over all adversaries";

/// `(2 + sqrt 2) / 4`, the one-qubit monogamy game value.
pub const BREIDBART_BASE: f64 = 0.5 + 0.5 * core::f64::consts::FRAC_1_SQRT_2;

/// Message distribution over `{0,1}^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct MessageDistribution {
    n: usize,
    name: String,
    table: BTreeMap<BitString, f64>,
}

impl MessageDistribution {
    /// Explicit table; probabilities must be nonnegative and sum to one
    /// within `1e-12`.
    pub fn from_table(n: usize, table: BTreeMap<BitString, f64>) -> Result<Self> {
        Self::named("table", n, table)
    }

    fn named(name: &str, n: usize, table: BTreeMap<BitString, f64>) -> Result<Self> {
        crate::linalg::check_qubits(n)?;
        let mut total = 0.0;
        for (m, &p) in &table {
            if m.len() != n {
                return Err(arg_err!("message {m} is not {n} bits"));
            }
            if p.is_nan() || p < 0.0 {
                return Err(arg_err!("probability {p} for {m} is negative"));
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Invalid { what: "message distribution", detail: format!("probabilities sum to {total}") });
        }
        let table = table.into_iter().filter(|(_, p)| *p > 0.0).collect();
        Ok(Self { n, name: name.into(), table })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        crate::linalg::check_qubits(n)?;
        let p = 1.0 / (1u64 << n) as f64;
        Self::named("uniform", n, BitString::all(n).map(|m| (m, p)).collect())
    }

    pub fn point(m: BitString) -> Result<Self> {
        let n = m.len();
        Self::named("point", n, BTreeMap::from([(m, 1.0)]))
    }

    /// Min-entropy exactly `h`: mass `2^{-h}` on `0^n`, the rest spread
    /// evenly over the other messages. `h = n` gives the uniform
    /// distribution.
    pub fn min_entropy(n: usize, h: f64) -> Result<Self> {
        if n == 0 {
            return Err(arg_err!("messages need at least one bit"));
        }
        if !(0.0..=n as f64).contains(&h) {
            return Err(arg_err!("min-entropy {h} must lie in [0, {n}]"));
        }
        if h == n as f64 {
            let mut d = Self::uniform(n)?;
            d.name = format!("min_entropy({h})");
            return Ok(d);
        }
        let heavy = libm::exp2(-h);
        let rest = (1.0 - heavy) / ((1u64 << n) - 1) as f64;
        let table = BitString::all(n).map(|m| {
            let p = if m.weight() == 0 { heavy } else { rest };
            (m, p)
        });
        Self::named(&format!("min_entropy({h})"), n, table.collect())
    }

    pub fn message_bits(&self) -> usize {
        self.n
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Messages with positive probability.
    pub fn support(&self) -> &BTreeMap<BitString, f64> {
        &self.table
    }

    pub fn probability(&self, m: &BitString) -> f64 {
        self.table.get(m).copied().unwrap_or(0.0)
    }

    /// `-log2 max_m p(m)`.
    pub fn min_entropy_bits(&self) -> f64 {
        let max = self.table.values().copied().fold(0.0, f64::max);
        -libm::log2(max)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BitString {
        sample_distribution(&self.table, rng)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Mode {
    Exact,
    MonteCarlo,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::MonteCarlo => "monte_carlo",
        }
    }
}

/// How to evaluate a game.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalOptions {
    pub mode: Mode,
    /// Trial count in Monte Carlo mode.
    pub trials: u64,
    pub seed: u64,
}

impl EvalOptions {
    pub fn exact() -> Self {
        Self { mode: Mode::Exact, trials: 0, seed: 0 }
    }

    pub fn monte_carlo(trials: u64, seed: u64) -> Self {
        Self { mode: Mode::MonteCarlo, trials, seed }
    }
}

/// Outcome of one game evaluation. With the `serde` feature the fields
/// serialize in declaration order.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GameReport {
    pub game: String,
    pub scheme: String,
    pub attack: String,
    pub distribution: Option<String>,
    pub lambda: usize,
    pub n: usize,
    pub mode: Mode,
    pub value: f64,
    pub trials: u64,
    /// Zero in exact mode.
    pub std_error: f64,
    pub bound: Option<f64>,
    pub bound_formula: Option<String>,
    pub bound_satisfied: Option<bool>,
    pub bound_note: Option<String>,
    pub seed: Option<u64>,
    pub oracle_samples: Option<usize>,
}

impl GameReport {
    /// Attaches `bound`; it counts as satisfied when the value is at most
    /// the bound plus `1e-9` (exact) or plus four standard errors (Monte
    /// Carlo).
    pub fn with_bound(mut self, bound: f64, formula: impl Into<String>) -> Self {
        let slack = match self.mode {
            Mode::Exact => 1e-9,
            Mode::MonteCarlo => (4.0 * self.std_error).max(1e-9),
        };
        self.bound = Some(bound);
        self.bound_formula = Some(formula.into());
        self.bound_satisfied = Some(self.value <= bound + slack);
        self.bound_note = Some(HEURISTIC_LABEL.into());
        self
    }

    /// CSV header matching [`Self::csv_row`].
    pub fn csv_header() -> &'static str {
        "game,scheme,attack,distribution,lambda,n,mode,value,trials,std_error,bound,bound_satisfied,seed,oracle_samples"
    }

    pub fn csv_row(&self) -> String {
        fn opt<T: core::fmt::Display>(v: &Option<T>) -> String {
            v.as_ref().map(|x| format!("{x}")).unwrap_or_default()
        }
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            csv_field(&self.game),
            csv_field(&self.scheme),
            csv_field(&self.attack),
            csv_field(self.distribution.as_deref().unwrap_or("")),
            self.lambda,
            self.n,
            self.mode.as_str(),
            self.value,
            self.trials,
            self.std_error,
            opt(&self.bound),
            opt(&self.bound_satisfied),
            opt(&self.seed),
            opt(&self.oracle_samples),
        )
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.into()
    }
}

/// One row of the bound curves.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CurveRow {
    pub n: usize,
    /// Copying a classical ciphertext always works.
    pub classical: f64,
    /// Guessing: `2^{-n}`.
    pub ideal: f64,
    /// Conjugate encryption: `((2 + sqrt 2)/4)^n`.
    pub conjugate: f64,
    /// F-conjugate encryption: `min(1, 9 * 2^{-n})`.
    pub qprf: f64,
}

pub fn bound_curves(n_min: usize, n_max: usize) -> Result<Vec<CurveRow>> {
    if n_min == 0 || n_min > n_max {
        return Err(arg_err!("need 1 <= n_min <= n_max, got {n_min}..{n_max}"));
    }
    Ok((n_min..=n_max)
        .map(|n| {
            let ideal = libm::exp2(-(n as f64));
            CurveRow {
                n,
                classical: 1.0,
                ideal,
                conjugate: libm::pow(BREIDBART_BASE, n as f64),
                qprf: (9.0 * ideal).min(1.0),
            }
        })
        .collect())
}

/// Both sides of `E_x f(x, x xor s) = E_x f(x xor s, x)` for `f` given as a
/// table indexed by `index(a) * 2^n + index(b)`. Terms are summed in sorted
/// order so equal multisets give bit-identical sums.
pub fn xor_shift_sides(table: &[f64], s: &BitString) -> Result<(f64, f64)> {
    let n = s.len();
    if n > 10 {
        return Err(arg_err!("xor-shift check supports n <= 10, got {n}"));
    }
    let d = 1usize << n;
    if table.len() != d * d {
        return Err(arg_err!("table has {} entries, expected {}", table.len(), d * d));
    }
    let shift = s.to_index();
    let side = |swap: bool| {
        let mut terms: Vec<f64> = (0..d)
            .map(|x| {
                let y = x ^ shift;
                if swap {
                    table[y * d + x]
                } else {
                    table[x * d + y]
                }
            })
            .collect();
        terms.sort_by(f64::total_cmp);
        terms.iter().sum::<f64>() / d as f64
    };
    Ok((side(false), side(true)))
}

/// Exhaustive check of the xor-shift identity; exact equality.
pub fn xor_shift_identity_check(table: &[f64], s: &BitString) -> Result<bool> {
    let (lhs, rhs) = xor_shift_sides(table, s)?;
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::seeded;

    #[test]
    fn curve_examples() {
        let rows = bound_curves(1, 10).unwrap();
        assert_eq!(rows.len(), 10);
        assert_eq!(rows[0].qprf, 1.0);
        let r5 = rows[4];
        assert_eq!((r5.classical, r5.ideal, r5.qprf), (1.0, 0.03125, 0.28125));
        assert!((r5.conjugate - 0.45305764084881595).abs() < 1e-12);
        assert!(rows.windows(2).all(|w| w[1].conjugate < w[0].conjugate));
        assert!((rows[9].qprf - 0.0087890625).abs() < 1e-15);
        assert!(bound_curves(0, 3).is_err());
    }

    #[test]
    fn distributions() {
        let u = MessageDistribution::uniform(3).unwrap();
        assert_eq!(u.min_entropy_bits(), 3.0);
        let h = MessageDistribution::min_entropy(3, 1.0).unwrap();
        assert!((h.min_entropy_bits() - 1.0).abs() < 1e-12);
        assert!((h.support().values().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(MessageDistribution::min_entropy(3, 3.0).unwrap().support(), u.support());
        let p = MessageDistribution::point("101".parse().unwrap()).unwrap();
        assert_eq!(p.min_entropy_bits(), 0.0);
        assert_eq!(p.sample(&mut seeded(1)), "101".parse().unwrap());
        assert!(MessageDistribution::min_entropy(2, 3.0).is_err());
        let bad = BTreeMap::from([("0".parse().unwrap(), 0.7)]);
        assert!(MessageDistribution::from_table(1, bad).is_err());
    }

    #[test]
    fn xor_shift_examples() {
        let n = 3;
        let d = 1usize << n;
        let weight_table: Vec<f64> =
            (0..d * d).map(|i| BitString::from_index((i / d) as u64, n).weight() as f64).collect();
        for s in BitString::all(n) {
            assert!(xor_shift_identity_check(&weight_table, &s).unwrap());
        }
        let mut rng = seeded(2);
        let random: Vec<f64> = (0..d * d).map(|_| rng.random::<f64>()).collect();
        let (l, r) = xor_shift_sides(&random, &BitString::zeros(n)).unwrap();
        assert_eq!(l, r);
        assert!(xor_shift_identity_check(&random, &BitString::zeros(4)).is_err());
    }

    #[test]
    fn csv_row_shape() {
        let r = GameReport {
            game: "cloning".into(),
            scheme: "ce".into(),
            attack: "guess(00)".into(),
            distribution: Some("uniform".into()),
            lambda: 2,
            n: 2,
            mode: Mode::Exact,
            value: 0.25,
            trials: 0,
            std_error: 0.0,
            bound: None,
            bound_formula: None,
            bound_satisfied: None,
            bound_note: None,
            seed: None,
            oracle_samples: None,
        }
        .with_bound(0.7, "b");
        assert_eq!(r.bound_satisfied, Some(true));
        assert_eq!(r.csv_row().split(',').count(), GameReport::csv_header().split(',').count());
    }
}
