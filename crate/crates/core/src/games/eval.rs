use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use super::{EvalOptions, GameReport, MessageDistribution, Mode, BREIDBART_BASE, MAX_EXACT_BRANCHES};
use crate::adversary::{
    bit_label, CloningAttack, CloningDistinguishingAttack, DistinguishingAttack, GenBranch, MoeStrategy,
};
use crate::bits::BitString;
use crate::error::{arg_err, Error, Result};
use crate::linalg::{bipartite_expectation, hermitian_eigen, kron_vec, Vector, C64, ZERO};
use crate::quantum::{KrausChannel, Povm};
use crate::random::{derived_rng, SimRng};
use crate::scheme::{Ciphertext, Qecm};

fn check_capacity(count: f64) -> Result<()> {
    if count > MAX_EXACT_BRANCHES {
        return Err(Error::Capacity(format!(
            "exact evaluation needs {count:.3e} branches (limit {MAX_EXACT_BRANCHES:.0e}); use Monte Carlo mode"
        )));
    }
    Ok(())
}

/// Runs `trials` independent trials; trial `i` uses the generator derived
/// from `(seed, stream, i)`, computes its win probability and draws the
/// outcome. Returns mean and standard error.
fn monte_carlo(opts: &EvalOptions, stream: &str, mut trial: impl FnMut(&mut SimRng) -> Result<f64>) -> Result<(f64, f64)> {
    if opts.trials == 0 {
        return Err(arg_err!("Monte Carlo mode needs at least one trial"));
    }
    let mut wins = 0u64;
    for i in 0..opts.trials {
        let mut rng = derived_rng(opts.seed, stream, i);
        let p = trial(&mut rng)?;
        if rng.random::<f64>() < p {
            wins += 1;
        }
    }
    let n = opts.trials as f64;
    let mean = wins as f64 / n;
    Ok((mean, libm::sqrt(mean * (1.0 - mean) / n)))
}

fn report(game: &str, scheme: &dyn Qecm, attack: String, opts: &EvalOptions, value: f64, std_error: f64) -> GameReport {
    let mc = opts.mode == Mode::MonteCarlo;
    GameReport {
        game: game.into(),
        scheme: scheme.name().into(),
        attack,
        distribution: None,
        lambda: scheme.lambda(),
        n: scheme.message_bits(),
        mode: opts.mode,
        value: value.clamp(0.0, 1.0),
        trials: if mc { opts.trials } else { 0 },
        std_error,
        bound: None,
        bound_formula: None,
        bound_satisfied: None,
        bound_note: None,
        seed: mc.then_some(opts.seed),
        oracle_samples: scheme.oracle_samples(),
    }
}

/// Pure-state decomposition of a side register: `(weight, vector)`.
fn decompose(side: &crate::quantum::DensityOperator, scale: f64) -> Vec<(f64, Vector)> {
    let (values, vectors) = hermitian_eigen(side.matrix());
    values
        .iter()
        .enumerate()
        .filter(|(_, v)| **v * scale > 1e-15)
        .map(|(j, v)| (v * scale, vectors.column(j).into_owned()))
        .collect()
}

struct Mixtures {
    /// Per generator branch: its message and its side state's components,
    /// weighted by the branch probability.
    branches: Vec<(BitString, Vec<(f64, Vector)>)>,
}

impl Mixtures {
    fn new(gen: &[GenBranch]) -> Self {
        Self { branches: gen.iter().map(|g| (g.message.clone(), decompose(&g.side, g.probability))).collect() }
    }

    fn sample(&self, gen: &[GenBranch], rng: &mut SimRng) -> usize {
        let mut u = rng.random::<f64>();
        for (i, g) in gen.iter().enumerate() {
            if u < g.probability {
                return i;
            }
            u -= g.probability;
        }
        gen.len() - 1
    }
}

/// A split channel with each Kraus operator stored as its nonzero entries.
/// Measure-and-broadcast splits are very sparse, and evaluating them densely
/// dominates the run time.
struct SparseSplit {
    in_qubits: usize,
    out_qubits: usize,
    /// Per operator: `(row, column, entry)` for the nonzero entries.
    ops: Vec<Vec<(usize, usize, C64)>>,
}

impl SparseSplit {
    fn new(channel: &KrausChannel) -> Self {
        let ops = channel
            .ops()
            .iter()
            .map(|k| {
                let mut entries = Vec::new();
                for col in 0..k.ncols() {
                    for row in 0..k.nrows() {
                        let v = k[(row, col)];
                        if v != ZERO {
                            entries.push((row, col, v));
                        }
                    }
                }
                entries
            })
            .collect();
        Self { in_qubits: channel.in_qubits(), out_qubits: channel.out_qubits(), ops }
    }
}

struct SplitCache<'a> {
    scheme: &'a dyn Qecm,
    map: BTreeMap<BitString, SparseSplit>,
}

impl<'a> SplitCache<'a> {
    fn new(scheme: &'a dyn Qecm) -> Self {
        Self { scheme, map: BTreeMap::new() }
    }

    fn get(&mut self, classical: &BitString, make: impl FnOnce(&dyn Qecm, &BitString) -> Result<KrausChannel>) -> Result<&SparseSplit> {
        if !self.map.contains_key(classical) {
            let ch = make(self.scheme, classical)?;
            self.map.insert(classical.clone(), SparseSplit::new(&ch));
        }
        Ok(&self.map[classical])
    }
}

/// `sum_i <phi_i| B_label (x) C_label |phi_i>` over the branches of `split`
/// applied to `input`.
fn both_output(split: &SparseSplit, input: &Vector, b: &Povm, c: &Povm, label: &BitString) -> Result<f64> {
    let (db, dc) = (b.dim(), c.dim());
    if db * dc != 1usize << split.out_qubits {
        return Err(arg_err!(
            "decoders act on {} + {} qubits but the split outputs {}",
            b.qubits(),
            c.qubits(),
            split.out_qubits
        ));
    }
    if input.len() != 1usize << split.in_qubits {
        return Err(arg_err!("split expects {} input qubits", split.in_qubits));
    }
    let (Some(bm), Some(cm)) = (b.element(label), c.element(label)) else {
        return Ok(0.0);
    };
    let mut phi = alloc::vec![ZERO; db * dc];
    let mut touched: Vec<usize> = Vec::new();
    let mut total = 0.0;
    for op in &split.ops {
        for &(row, col, v) in op {
            if phi[row] == ZERO {
                touched.push(row);
            }
            phi[row] += v * input[col];
        }
        touched.sort_unstable();
        touched.dedup();
        let nz: Vec<(usize, C64)> = touched.iter().map(|&i| (i, phi[i])).filter(|(_, v)| *v != ZERO).collect();
        // quadratic form over the nonzero entries when that is cheaper than
        // the dense contraction
        total += if nz.len() * nz.len() <= db * dc * (db + dc) {
            let mut acc = ZERO;
            for &(i, pi) in &nz {
                for &(j, pj) in &nz {
                    acc += pi.conj() * bm[(i / dc, j / dc)] * cm[(i % dc, j % dc)] * pj;
                }
            }
            acc.re
        } else {
            bipartite_expectation(&Vector::from_column_slice(&phi), bm, cm)
        };
        for &i in &touched {
            phi[i] = ZERO;
        }
        touched.clear();
    }
    Ok(total)
}

// ---------------------------------------------------------------------------

/// `E_m E_k Pr[both decoders output m]` for a cloning attack.
pub fn eval_cloning_game(
    scheme: &dyn Qecm,
    attack: &dyn CloningAttack,
    dist: &MessageDistribution,
    opts: EvalOptions,
) -> Result<GameReport> {
    attack.check(scheme)?;
    if dist.message_bits() != scheme.message_bits() {
        return Err(arg_err!("distribution is over {} bits, scheme messages have {}", dist.message_bits(), scheme.message_bits()));
    }
    let mut splits = SplitCache::new(scheme);
    let split_of = |s: &dyn Qecm, cl: &BitString| attack.split(s, cl);
    let win = |split: &SparseSplit, ct: &Ciphertext, dec: &(Povm, Povm), m: &BitString| {
        both_output(split, ct.quantum.amplitudes(), &dec.0, &dec.1, m)
    };

    let (value, std_error) = match opts.mode {
        Mode::Exact => {
            check_capacity(scheme.key_space_size() * dist.support().len() as f64 * scheme.encryption_branch_count())?;
            let mut total = 0.0;
            for (key, pk) in scheme.key_space()? {
                let revealed = key.reveal();
                let mut decoders: BTreeMap<BitString, (Povm, Povm)> = BTreeMap::new();
                let mut key_total = 0.0;
                for (m, pm) in dist.support() {
                    for (ct, pb) in scheme.encryption_branches(&key, m)? {
                        if !decoders.contains_key(&ct.classical) {
                            let pair = (
                                attack.decode_b(scheme, &revealed, &ct.classical)?,
                                attack.decode_c(scheme, &revealed, &ct.classical)?,
                            );
                            decoders.insert(ct.classical.clone(), pair);
                        }
                        let split = splits.get(&ct.classical, split_of)?;
                        key_total += pm * pb * win(split, &ct, &decoders[&ct.classical], m)?;
                    }
                }
                total += pk * key_total;
            }
            (total, 0.0)
        }
        Mode::MonteCarlo => monte_carlo(&opts, "cloning", |rng| {
            let m = dist.sample(rng);
            let key = scheme.key_gen(rng)?;
            let ct = scheme.encrypt(&key, &m, rng)?;
            let revealed = key.reveal();
            let dec =
                (attack.decode_b(scheme, &revealed, &ct.classical)?, attack.decode_c(scheme, &revealed, &ct.classical)?);
            let split = splits.get(&ct.classical, split_of)?;
            win(split, &ct, &dec, &m)
        })?,
    };

    let mut r = report("cloning", scheme, attack.name(), &opts, value, std_error);
    r.distribution = Some(dist.name().into());
    if let Some(t) = scheme.uncloneable_t() {
        let h = dist.min_entropy_bits();
        r = r.with_bound(libm::exp2(t - h), format!("2^(-h+t) with h = {h}, t = {t}"));
    }
    Ok(r)
}

/// Cloning game under the min-entropy-`h` test distribution over `n`-bit
/// messages; the report's bound is `2^{-h+t}`.
pub fn min_entropy_experiment(
    scheme: &dyn Qecm,
    attack: &dyn CloningAttack,
    h: f64,
    n: usize,
    opts: EvalOptions,
) -> Result<GameReport> {
    if n != scheme.message_bits() {
        return Err(arg_err!("n = {n} but the scheme encrypts {} bits", scheme.message_bits()));
    }
    if h > n as f64 {
        return Err(arg_err!("min-entropy {h} exceeds the message length {n}"));
    }
    let dist = MessageDistribution::min_entropy(n, h)?;
    let mut r = eval_cloning_game(scheme, attack, &dist, opts)?;
    r.game = "min_entropy".into();
    Ok(r)
}

// ---------------------------------------------------------------------------

/// Message encrypted for challenge bit `b`: `0^n` or the generator's.
fn challenge(b: bool, message: &BitString) -> BitString {
    if b {
        message.clone()
    } else {
        BitString::zeros(message.len())
    }
}

/// `E_b E_k Pr[A outputs b]` where the challenger encrypts `0^n` (b = 0)
/// or the generator's measured message (b = 1).
pub fn eval_distinguishing_game(scheme: &dyn Qecm, attack: &dyn DistinguishingAttack, opts: EvalOptions) -> Result<GameReport> {
    attack.check(scheme)?;
    let gen = attack.generate();
    let mix = Mixtures::new(gen);
    let leaks = attack.uses_leaked_key();
    let outcome = |povm: &Povm, side: &[(f64, Vector)], ct: &Ciphertext, b: bool| -> Result<f64> {
        let label = bit_label(b);
        let Some(e) = povm.element(&label) else { return Ok(0.0) };
        let mut p = 0.0;
        for (w, s) in side {
            let v = kron_vec(s, ct.quantum.amplitudes());
            if v.len() != e.nrows() {
                return Err(arg_err!("decision measurement has the wrong dimension"));
            }
            p += w * v.dotc(&(e * &v)).re;
        }
        Ok(p)
    };

    let (value, std_error) = match opts.mode {
        Mode::Exact => {
            check_capacity(scheme.key_space_size() * 2.0 * gen.len() as f64 * scheme.encryption_branch_count())?;
            let mut total = 0.0;
            let mut cache: BTreeMap<BitString, Povm> = BTreeMap::new();
            for (key, pk) in scheme.key_space()? {
                let revealed = key.reveal();
                if leaks {
                    cache.clear();
                }
                for b in [false, true] {
                    for (message, side) in &mix.branches {
                        for (ct, pb) in scheme.encryption_branches(&key, &challenge(b, message))? {
                            if !cache.contains_key(&ct.classical) {
                                let d = attack.decide(scheme, &ct.classical, leaks.then_some(&revealed))?;
                                cache.insert(ct.classical.clone(), d);
                            }
                            total += 0.5 * pk * pb * outcome(&cache[&ct.classical], side, &ct, b)?;
                        }
                    }
                }
            }
            (total, 0.0)
        }
        Mode::MonteCarlo => monte_carlo(&opts, "distinguishing", |rng| {
            let b = rng.random::<bool>();
            let key = scheme.key_gen(rng)?;
            let g = mix.sample(gen, rng);
            let (message, side) = &mix.branches[g];
            let ct = scheme.encrypt(&key, &challenge(b, message), rng)?;
            let revealed = key.reveal();
            let d = attack.decide(scheme, &ct.classical, leaks.then_some(&revealed))?;
            // side weights include the branch probability; renormalise
            let norm = gen[g].probability;
            Ok(outcome(&d, side, &ct, b)? / norm)
        })?,
    };
    let name = if leaks { format!("{} [key leaked]", attack.name()) } else { attack.name() };
    Ok(report("distinguishing", scheme, name, &opts, value, std_error).with_bound(0.5, "1/2 (no advantage)"))
}

/// `E_b E_k Pr[both decoders output b]` for a cloning-distinguishing
/// attack.
pub fn eval_cloning_distinguishing_game(
    scheme: &dyn Qecm,
    attack: &dyn CloningDistinguishingAttack,
    opts: EvalOptions,
) -> Result<GameReport> {
    attack.check(scheme)?;
    let gen = attack.generate();
    let mix = Mixtures::new(gen);
    let mut splits = SplitCache::new(scheme);
    let split_of = |s: &dyn Qecm, cl: &BitString| attack.split(s, cl);
    let outcome = |split: &SparseSplit, dec: &(Povm, Povm), side: &[(f64, Vector)], ct: &Ciphertext, b: bool| {
        let label = bit_label(b);
        side.iter()
            .map(|(w, s)| Ok(w * both_output(split, &kron_vec(s, ct.quantum.amplitudes()), &dec.0, &dec.1, &label)?))
            .sum::<Result<f64>>()
    };

    let (value, std_error) = match opts.mode {
        Mode::Exact => {
            check_capacity(scheme.key_space_size() * 2.0 * gen.len() as f64 * scheme.encryption_branch_count())?;
            let mut total = 0.0;
            for (key, pk) in scheme.key_space()? {
                let revealed = key.reveal();
                let mut decoders: BTreeMap<BitString, (Povm, Povm)> = BTreeMap::new();
                for b in [false, true] {
                    for (message, side) in &mix.branches {
                        for (ct, pb) in scheme.encryption_branches(&key, &challenge(b, message))? {
                            if !decoders.contains_key(&ct.classical) {
                                let pair = (
                                    attack.decode_b(scheme, &revealed, &ct.classical)?,
                                    attack.decode_c(scheme, &revealed, &ct.classical)?,
                                );
                                decoders.insert(ct.classical.clone(), pair);
                            }
                            let split = splits.get(&ct.classical, split_of)?;
                            total += 0.5 * pk * pb * outcome(split, &decoders[&ct.classical], side, &ct, b)?;
                        }
                    }
                }
            }
            (total, 0.0)
        }
        Mode::MonteCarlo => monte_carlo(&opts, "cloning-distinguishing", |rng| {
            let b = rng.random::<bool>();
            let key = scheme.key_gen(rng)?;
            let g = mix.sample(gen, rng);
            let (message, side) = &mix.branches[g];
            let ct = scheme.encrypt(&key, &challenge(b, message), rng)?;
            let revealed = key.reveal();
            let dec =
                (attack.decode_b(scheme, &revealed, &ct.classical)?, attack.decode_c(scheme, &revealed, &ct.classical)?);
            let split = splits.get(&ct.classical, split_of)?;
            Ok(outcome(split, &dec, side, &ct, b)? / gen[g].probability)
        })?,
    };
    Ok(report("cloning_distinguishing", scheme, attack.name(), &opts, value, std_error)
        .with_bound(0.5, "1/2 (no advantage)"))
}

// ---------------------------------------------------------------------------

/// Monogamy game value of `strategy`. Exact mode is limited to
/// `lambda <= 3`.
pub fn eval_moe_game(strategy: &MoeStrategy, lambda: usize, opts: EvalOptions) -> Result<GameReport> {
    if strategy.lambda() != lambda {
        return Err(arg_err!("strategy is for lambda = {}, not {lambda}", strategy.lambda()));
    }
    let (value, std_error) = match opts.mode {
        Mode::Exact => {
            if lambda > 3 {
                return Err(Error::Capacity(format!("exact monogamy evaluation supports lambda <= 3, got {lambda}")));
            }
            (strategy.value()?, 0.0)
        }
        Mode::MonteCarlo => {
            let mut per_basis: BTreeMap<usize, f64> = BTreeMap::new();
            monte_carlo(&opts, "moe", |rng| {
                let t = rng.random_range(0..1usize << lambda);
                if let Some(v) = per_basis.get(&t) {
                    return Ok(*v);
                }
                let v = strategy.value_given_basis(t)?;
                per_basis.insert(t, v);
                Ok(v)
            })?
        }
    };
    let form = match strategy.resource() {
        crate::adversary::MoeResource::State(_) => "state_form",
        crate::adversary::MoeResource::Channel(_) => "channel_form",
    };
    let mc = opts.mode == Mode::MonteCarlo;
    let r = GameReport {
        game: "moe".into(),
        scheme: "wiesner".into(),
        attack: form.into(),
        distribution: None,
        lambda,
        n: lambda,
        mode: opts.mode,
        value: value.clamp(0.0, 1.0),
        trials: if mc { opts.trials } else { 0 },
        std_error,
        bound: None,
        bound_formula: None,
        bound_satisfied: None,
        bound_note: None,
        seed: mc.then_some(opts.seed),
        oracle_samples: None,
    };
    Ok(r.with_bound(libm::pow(BREIDBART_BASE, lambda as f64), "((2+sqrt2)/4)^lambda"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::*;
    use crate::scheme::{ConjugateScheme, FConjugateScheme, OtpScheme, PrfModel};

    const B1: f64 = 0.8535533905932737;

    fn uniform(n: usize) -> MessageDistribution {
        MessageDistribution::uniform(n).unwrap()
    }

    #[test]
    fn copy_attack_wins_against_otp() {
        let otp = OtpScheme::new(2).unwrap();
        let r = eval_cloning_game(&otp, &copy_attack(&otp).unwrap(), &uniform(2), EvalOptions::exact()).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.std_error, 0.0);
    }

    #[test]
    fn ce_examples() {
        let ce = ConjugateScheme::new(2).unwrap();
        let opts = EvalOptions::exact();
        let guess = eval_cloning_game(&ce, &guess_attack("00".parse().unwrap()), &uniform(2), opts).unwrap();
        assert!((guess.value - 0.25).abs() < 1e-12);
        let bb = eval_cloning_game(&ce, &breidbart_attack(&ce).unwrap(), &uniform(2), opts).unwrap();
        assert!((bb.value - B1 * B1).abs() < 1e-9);
        assert_eq!(bb.bound_satisfied, Some(true));
        let split = eval_cloning_game(&ce, &split_measure_attack(&ce).unwrap(), &uniform(2), opts).unwrap();
        assert!((split.value - 0.25).abs() < 1e-12);
        assert!(split.value <= bb.value);
    }

    #[test]
    fn point_mass_guess_wins() {
        let fce = FConjugateScheme::new(3, 3, PrfModel::Oracle { family_seed: 1, samples: 4 }).unwrap();
        let m: BitString = "110".parse().unwrap();
        let r = eval_cloning_game(&fce, &guess_attack(m.clone()), &MessageDistribution::point(m).unwrap(), EvalOptions::exact())
            .unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert_eq!(r.oracle_samples, Some(4));
    }

    #[test]
    fn guess_against_fce_monte_carlo() {
        let fce = FConjugateScheme::new(4, 3, PrfModel::Qprf).unwrap();
        let r = eval_cloning_game(&fce, &guess_attack("000".parse().unwrap()), &uniform(3), EvalOptions::monte_carlo(10_000, 7))
            .unwrap();
        assert!((r.value - 0.125).abs() <= 3.0 * r.std_error, "{} ± {}", r.value, r.std_error);
    }

    #[test]
    fn capacity_error_suggests_monte_carlo() {
        let fce = FConjugateScheme::new(8, 5, PrfModel::Oracle { family_seed: 1, samples: 64 }).unwrap();
        let e = eval_cloning_game(&fce, &guess_attack(BitString::zeros(5)), &uniform(5), EvalOptions::exact()).unwrap_err();
        assert!(matches!(e, Error::Capacity(ref s) if s.contains("Monte Carlo")));
    }

    #[test]
    fn incompatible_attack_is_rejected() {
        let ce = ConjugateScheme::new(2).unwrap();
        assert!(eval_cloning_game(&ce, &CopyAttack, &uniform(2), EvalOptions::exact()).is_err());
        assert!(eval_cloning_game(&ce, &guess_attack(BitString::zeros(3)), &uniform(2), EvalOptions::exact()).is_err());
    }

    #[test]
    fn distinguishing_examples() {
        let ce = ConjugateScheme::new(2).unwrap();
        let coin = eval_distinguishing_game(&ce, &random_coin_distinguisher(&ce).unwrap(), EvalOptions::exact()).unwrap();
        assert!((coin.value - 0.5).abs() < 1e-12);
        for seed in 0..3 {
            let d = random_distinguisher(&ce, seed).unwrap();
            let r = eval_distinguishing_game(&ce, &d, EvalOptions::exact()).unwrap();
            assert!((r.value - 0.5).abs() < 1e-9, "seed {seed}: {}", r.value);
        }
        let otp = OtpScheme::new(2).unwrap();
        let leak = eval_distinguishing_game(&otp, &key_leak_distinguisher(&otp).unwrap(), EvalOptions::exact()).unwrap();
        assert!((leak.value - 1.0).abs() < 1e-12);
        assert_eq!(leak.bound_satisfied, Some(false));
        assert!(leak.attack.contains("key leaked"));
    }

    #[test]
    fn cloning_distinguishing_examples() {
        let ce = ConjugateScheme::new(2).unwrap();
        let zero = eval_cloning_distinguishing_game(&ce, &constant_bit_attack(&ce, false).unwrap(), EvalOptions::exact()).unwrap();
        assert!((zero.value - 0.5).abs() < 1e-12);
        let half = eval_cloning_distinguishing_game(&ce, &half_split_distinguisher(&ce).unwrap(), EvalOptions::exact()).unwrap();
        assert!((half.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn trivial_transformed_attack_matches_point_probability() {
        let ce = ConjugateScheme::new(2).unwrap();
        let m_star: BitString = "10".parse().unwrap();
        let t = transform_cd_to_cloning(alloc::boxed::Box::new(trivial_cd_attack(&ce, m_star.clone()).unwrap())).unwrap();
        let dist = MessageDistribution::min_entropy(2, 1.0).unwrap();
        let r = eval_cloning_game(&ce, &t, &dist, EvalOptions::exact()).unwrap();
        assert!((r.value - dist.probability(&m_star)).abs() < 1e-12);
    }

    #[test]
    fn moe_reports() {
        let r = eval_moe_game(&MoeStrategy::breidbart(1).unwrap(), 1, EvalOptions::exact()).unwrap();
        assert!((r.value - B1).abs() < 1e-12);
        let t = eval_moe_game(&MoeStrategy::trivial(2).unwrap(), 2, EvalOptions::exact()).unwrap();
        assert!((t.value - 0.25).abs() < 1e-12);
        assert!(eval_moe_game(&MoeStrategy::trivial(2).unwrap(), 1, EvalOptions::exact()).is_err());
        let mc = eval_moe_game(&MoeStrategy::breidbart(2).unwrap(), 2, EvalOptions::monte_carlo(4000, 1)).unwrap();
        assert!((mc.value - B1 * B1).abs() <= 4.0 * mc.std_error);
    }

    #[test]
    fn min_entropy_examples() {
        let ce = ConjugateScheme::new(2).unwrap();
        let bb = breidbart_attack(&ce).unwrap();
        let full = min_entropy_experiment(&ce, &bb, 2.0, 2, EvalOptions::exact()).unwrap();
        let plain = eval_cloning_game(&ce, &bb, &uniform(2), EvalOptions::exact()).unwrap();
        assert_eq!(full.value, plain.value);
        assert!(min_entropy_experiment(&ce, &bb, 3.0, 2, EvalOptions::exact()).is_err());
        let point = min_entropy_experiment(&ce, &guess_attack(BitString::zeros(2)), 0.0, 2, EvalOptions::exact()).unwrap();
        assert!((point.value - 1.0).abs() < 1e-12);
        assert!(point.bound.unwrap() >= 1.0);
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let ce = ConjugateScheme::new(2).unwrap();
        let bb = breidbart_attack(&ce).unwrap();
        let a = eval_cloning_game(&ce, &bb, &uniform(2), EvalOptions::monte_carlo(500, 3)).unwrap();
        let b = eval_cloning_game(&ce, &bb, &uniform(2), EvalOptions::monte_carlo(500, 3)).unwrap();
        assert_eq!(a, b);
        let c = eval_cloning_game(&ce, &bb, &uniform(2), EvalOptions::monte_carlo(500, 4)).unwrap();
        assert_ne!(a.value, c.value);
    }
}
