//! The acceptance checks, shared by `qecm verify` and the `acceptance` test
//! target. Each check returns a one-line summary and carries a time limit.

use std::time::{Duration, Instant};

use rand::Rng;

use qecm_core::adversary::{
    breidbart_attack, copy_attack, guess_attack, random_cd_attack, seesaw_optimize_moe, shipped_attacks,
    split_measure_attack, transform_cd_to_cloning, CloningAttack,
};
use qecm_core::games::{
    eval_cloning_distinguishing_game, eval_cloning_game, min_entropy_experiment, xor_shift_identity_check, EvalOptions,
    MessageDistribution, BREIDBART_BASE,
};
use qecm_core::linalg::{identity, kron, max_abs_diff, Matrix, TOL};
use qecm_core::oracle::RandomOracle;
use qecm_core::quantum::{epr_state, wiesner_state};
use qecm_core::random::{random_channel, random_density, random_povm, seeded};
use qecm_core::scheme::{ConjugateScheme, FConjugateScheme, OtpScheme, PrfModel, Qecm};
use qecm_core::BitString;

use crate::experiments::{bound_slack, render_curve, run_curve, CurveConfig, CURVE_HEADER};

/// Breidbart values for one to three qubits, from an independent brute-force
/// enumeration.
pub const BREIDBART_ENUMERATED: [f64; 3] = [0.8535533905932737, 0.7285533905932737, 0.6218592167691145];

type Check = fn(&Budget) -> Result<String, String>;

/// Sample sizes. `fast` shrinks the Monte Carlo and random-instance counts;
/// exhaustive checks stay exhaustive.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub fast: bool,
}

impl Budget {
    fn pick<T>(&self, full: T, fast: T) -> T {
        if self.fast {
            fast
        } else {
            full
        }
    }
}

pub struct Criterion {
    pub name: &'static str,
    pub limit: Duration,
    check: Check,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl Outcome {
    /// `PASS name (1.23 s of 10 s) detail`.
    pub fn line(&self) -> String {
        format!(
            "{} {:<24} ({:.2} s of {} s) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs(),
            self.detail
        )
    }
}

pub fn criteria() -> Vec<Criterion> {
    let c = |name, secs, check| Criterion { name, limit: Duration::from_secs(secs), check };
    vec![
        c("correctness", 10, correctness as Check),
        c("classical_copy", 1, classical_copy),
        c("breidbart_tightness", 30, breidbart_tightness),
        c("moe_seesaw", 60, moe_seesaw),
        c("fce_witness", 300, fce_witness),
        c("min_entropy_transfer", 10, min_entropy_transfer),
        c("transformer_inequality", 60, transformer_inequality),
        c("property_suites", 120, property_suites),
        c("bound_curves", 10, bound_curve_reproduction),
    ]
}

impl Criterion {
    pub fn run(&self, budget: &Budget) -> Outcome {
        let start = Instant::now();
        let result = (self.check)(budget);
        let elapsed = start.elapsed();
        let (mut passed, mut detail) = match result {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        if elapsed > self.limit {
            passed = false;
            detail = format!("over the time limit; {detail}");
        }
        Outcome { name: self.name, passed, detail, elapsed, limit: self.limit }
    }
}

/// Runs every criterion in order, handing each outcome to `report` as soon
/// as it is known.
pub fn run_all(budget: &Budget, mut report: impl FnMut(&Outcome)) -> Vec<Outcome> {
    criteria()
        .iter()
        .map(|c| {
            let o = c.run(budget);
            report(&o);
            o
        })
        .collect()
}

fn fail(e: impl std::fmt::Display) -> String {
    e.to_string()
}

macro_rules! ensure {
    ($cond:expr, $($t:tt)*) => {
        // bound first so a NaN comparison counts as a failure
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($t)*));
        }
    };
}

// ---------------------------------------------------------------------------

fn correctness(budget: &Budget) -> Result<String, String> {
    let mut checked = 0usize;
    for lambda in 1..=3 {
        let schemes: [Box<dyn Qecm>; 2] =
            [Box::new(OtpScheme::new(lambda).map_err(fail)?), Box::new(ConjugateScheme::new(lambda).map_err(fail)?)];
        for scheme in &schemes {
            for (key, _) in scheme.key_space().map_err(fail)? {
                for m in BitString::all(lambda) {
                    for (ct, _) in scheme.encryption_branches(&key, &m).map_err(fail)? {
                        let p = scheme.decrypt_distribution(&key, &ct).map_err(fail)?.get(&m).copied().unwrap_or(0.0);
                        ensure!((p - 1.0).abs() <= 1e-9, "{} lambda={lambda} m={m}: success {p}", scheme.name());
                        checked += 1;
                    }
                }
            }
        }
    }
    let trials = budget.pick(1000, 200);
    for model in [PrfModel::Qprf, PrfModel::Oracle { family_seed: 11, samples: 64 }] {
        let fce = FConjugateScheme::new(8, 4, model).map_err(fail)?;
        let mut rng = seeded(12);
        for _ in 0..trials {
            let key = fce.key_gen(&mut rng).map_err(fail)?;
            let m = BitString::random(4, &mut rng);
            let ct = fce.encrypt(&key, &m, &mut rng).map_err(fail)?;
            let p = fce.decrypt_distribution(&key, &ct).map_err(fail)?.get(&m).copied().unwrap_or(0.0);
            ensure!((p - 1.0).abs() <= 1e-9, "fce m={m}: success {p}");
        }
    }
    Ok(format!("{checked} exhaustive OTP/CE cases and 2 x {trials} F-conjugate trials decrypt with probability 1"))
}

fn classical_copy(_: &Budget) -> Result<String, String> {
    let otp = OtpScheme::new(3).map_err(fail)?;
    let attack = copy_attack(&otp).map_err(fail)?;
    let r = eval_cloning_game(&otp, &attack, &MessageDistribution::uniform(3).map_err(fail)?, EvalOptions::exact())
        .map_err(fail)?;
    ensure!(r.value == 1.0, "copy wins with {}", r.value);
    Ok("copying a one-time pad ciphertext wins with probability exactly 1".into())
}

fn breidbart_tightness(_: &Budget) -> Result<String, String> {
    let mut values = Vec::new();
    for lambda in 1..=3usize {
        let ce = ConjugateScheme::new(lambda).map_err(fail)?;
        let attack = breidbart_attack(&ce).map_err(fail)?;
        let dist = MessageDistribution::uniform(lambda).map_err(fail)?;
        let v = eval_cloning_game(&ce, &attack, &dist, EvalOptions::exact()).map_err(fail)?.value;
        let closed = ((2.0 + 2f64.sqrt()) / 4.0).powi(lambda as i32);
        let t = lambda as f64 * (1.0 + 1.0 / 2f64.sqrt()).log2();
        let via_t = 2f64.powf(-(lambda as f64) + t);
        ensure!((v - closed).abs() <= 1e-9, "lambda={lambda}: {v} vs ((2+sqrt2)/4)^lambda = {closed}");
        ensure!((v - via_t).abs() <= 1e-9, "lambda={lambda}: {v} vs 2^(-lambda+t) = {via_t}");
        ensure!((v - BREIDBART_ENUMERATED[lambda - 1]).abs() <= 1e-9, "lambda={lambda}: {v} vs enumeration");
        values.push(format!("{v:.10}"));
    }
    Ok(format!("exact values {}", values.join(", ")))
}

fn moe_seesaw(_: &Budget) -> Result<String, String> {
    let bound = BREIDBART_BASE;
    let mut best = 0.0f64;
    for seed in 0..10 {
        let out = seesaw_optimize_moe(1, 2, 2, 200, 1e-12, seed).map_err(fail)?;
        ensure!(out.iterations <= 200, "seed {seed}: {} iterations", out.iterations);
        ensure!(out.history.windows(2).all(|w| w[1] >= w[0]), "seed {seed}: value decreased");
        ensure!(out.value <= bound + 1e-9, "seed {seed}: {} exceeds {bound}", out.value);
        best = best.max(out.value);
    }
    ensure!((0.8530..=0.8535534 + 1e-7).contains(&best), "best value {best}");
    Ok(format!("best of 10 restarts {best:.10}"))
}

fn fce_witness(budget: &Budget) -> Result<String, String> {
    let trials = budget.pick(10_000, 2_000);
    let fce = FConjugateScheme::new(8, 5, PrfModel::Oracle { family_seed: 2024, samples: 64 }).map_err(fail)?;
    let dist = MessageDistribution::uniform(5).map_err(fail)?;
    let opts = EvalOptions::monte_carlo(trials, 2024);
    let mut summary = Vec::new();
    let mut attacks = shipped_attacks(&fce);
    attacks.push(Box::new(guess_attack("10110".parse().map_err(fail)?)));
    for attack in &attacks {
        let r = eval_cloning_game(&fce, attack.as_ref(), &dist, opts).map_err(fail)?;
        let sigma = r.std_error;
        ensure!(r.value <= 9.0 / 32.0 + 4.0 * sigma, "{}: {} > 9/32 + 4 sigma", r.attack, r.value);
        ensure!(r.bound.is_some_and(|b| (b - 9.0 / 32.0).abs() < 1e-12), "{}: bound {:?}", r.attack, r.bound);
        let note = r.bound_note.as_deref().unwrap_or("");
        ensure!(note.contains("not a bound over all adversaries"), "{}: unlabelled bound check", r.attack);
        if r.attack.starts_with("guess") {
            ensure!((r.value - 1.0 / 32.0).abs() <= 4.0 * sigma, "{}: {} not within 4 sigma of 1/32", r.attack, r.value);
        }
        summary.push(format!("{} {:.4}±{:.4}", r.attack, r.value, sigma));
    }
    Ok(format!("{trials} trials each: {} (witness check only)", summary.join(", ")))
}

fn min_entropy_transfer(_: &Budget) -> Result<String, String> {
    let ce = ConjugateScheme::new(2).map_err(fail)?;
    let attack = breidbart_attack(&ce).map_err(fail)?;
    let r = min_entropy_experiment(&ce, &attack, 1.0, 2, EvalOptions::exact()).map_err(fail)?;
    // 2^{-1} * 2^{2} * beta^2 / 2 with beta = (2 + sqrt 2)/4, whose
    // 7-digit rendering is 0.8535533
    let stated = 0.5 * 4.0 * ((2.0 + 2f64.sqrt()) / 4.0).powi(2) / 2.0;
    let t = 2.0 * (1.0 + 1.0 / 2f64.sqrt()).log2();
    let transferred = 2f64.powf(-1.0 + t);
    ensure!(r.value <= stated + 1e-9, "{} > {stated}", r.value);
    ensure!(r.value <= transferred + 1e-9, "{} > 2^(-h+t) = {transferred}", r.value);
    ensure!(r.bound.is_some_and(|b| (b - transferred).abs() < 1e-12), "report bound {:?}", r.bound);
    Ok(format!("value {:.10} within {stated:.10} and 2^(-h+t) = {transferred:.6}", r.value))
}

fn transformer_inequality(budget: &Budget) -> Result<String, String> {
    let ce = ConjugateScheme::new(2).map_err(fail)?;
    let uniform = MessageDistribution::uniform(2).map_err(fail)?;
    let count = budget.pick(20, 5);
    let mut worst = f64::INFINITY;
    for seed in 0..count {
        let cd = random_cd_attack(&ce, seed).map_err(fail)?;
        let original = eval_cloning_distinguishing_game(&ce, &cd, EvalOptions::exact()).map_err(fail)?.value;
        let transformed = transform_cd_to_cloning(Box::new(cd)).map_err(fail)?;
        let cloning = eval_cloning_game(&ce, &transformed, &uniform, EvalOptions::exact()).map_err(fail)?.value;
        ensure!(cloning >= original / 2.0 - 1e-9, "seed {seed}: {cloning} < {original} / 2");
        worst = worst.min(cloning - original / 2.0);
    }
    Ok(format!("{count} random attacks, smallest margin {worst:.3e}"))
}

fn property_suites(budget: &Budget) -> Result<String, String> {
    // Wiesner bases are orthonormal
    for n in 1..=4 {
        for theta in BitString::all(n) {
            let states: Vec<_> = BitString::all(n).map(|x| wiesner_state(&x, &theta)).collect::<Result<_, _>>().map_err(fail)?;
            for (i, a) in states.iter().enumerate() {
                for (j, b) in states.iter().enumerate() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    let overlap = a.inner(b).norm_sqr().sqrt();
                    ensure!((overlap - expected).abs() < TOL, "n={n} theta={theta}: overlap {overlap}");
                }
            }
        }
    }

    // random channels and POVMs are complete
    let mut rng = seeded(2024);
    let labels: Vec<BitString> = BitString::all(2).collect();
    for i in 0..100 {
        let (qin, qout) = (1 + i % 2, 1 + (i / 2) % 2);
        let ch = random_channel(qin, qout, 4, &mut rng).map_err(fail)?;
        ensure!(ch.completeness_error() < TOL, "channel {i} incomplete");
        let povm = random_povm(1 + i % 3, &labels, &mut rng).map_err(fail)?;
        let sum = povm.elements().values().fold(Matrix::zeros(povm.dim(), povm.dim()), |a, e| a + e);
        ensure!(max_abs_diff(&sum, &identity(povm.dim())) < TOL, "povm {i} incomplete");
    }

    // Tr[Q Phi(sigma)] = 2^n Tr[(sigma^T (x) Q) (Id (x) Phi)(EPR)]
    let epr_cases = budget.pick(40, 10);
    for i in 0..epr_cases {
        let (n_in, n_out) = (1 + i % 2, 1 + (i / 2) % 2);
        let phi = random_channel(n_in, n_out, 3, &mut rng).map_err(fail)?;
        let sigma = random_density(n_in, 2, &mut rng).map_err(fail)?;
        let bit: Vec<BitString> = BitString::all(1).collect();
        let q = random_povm(n_out, &bit, &mut rng).map_err(fail)?.element(&bit[1]).cloned().ok_or("missing element")?;
        let direct = phi.apply(&sigma).map_err(fail)?.expectation(&q).map_err(fail)?;
        let choi = phi
            .extend_left(n_in)
            .map_err(fail)?
            .apply(&epr_state(n_in).map_err(fail)?.to_density())
            .map_err(fail)?;
        let via_epr = choi.expectation(&kron(&sigma.matrix().transpose(), &q)).map_err(fail)? * (1u64 << n_in) as f64;
        ensure!((direct - via_epr).abs() <= 1e-9, "EPR case {i}: {direct} vs {via_epr}");
    }

    // xor-shift identity, every shift at n = 3
    for s in BitString::all(3) {
        for _ in 0..budget.pick(20, 5) {
            let table: Vec<f64> = (0..64).map(|_| rng.random::<f64>() * 100.0 - 50.0).collect();
            ensure!(xor_shift_identity_check(&table, &s).map_err(fail)?, "xor shift {s} failed");
        }
    }

    // reprogramming: over uniform H and y, H_{x,y} is uniform (lambda 2, n 1)
    let functions: Vec<RandomOracle> = (0..16u64)
        .map(|t| RandomOracle::from_table(2, 1, (0..4).map(|i| BitString::new(vec![(t >> (3 - i)) & 1 == 1])).collect()))
        .collect::<Result<_, _>>()
        .map_err(fail)?;
    let index = |h: &RandomOracle| -> Result<usize, String> {
        BitString::all(2).try_fold(0, |acc, x| Ok((acc << 1) | usize::from(h.eval(&x).map_err(fail)?.bit(0))))
    };
    for x in BitString::all(2) {
        let mut hits = [0u32; 16];
        for h in &functions {
            for y in BitString::all(1) {
                hits[index(&h.reprogram(&x, &y).map_err(fail)?)?] += 1;
            }
        }
        ensure!(hits.iter().all(|&k| k == 2), "reprogramming at {x} is not uniform: {hits:?}");
    }

    // exact and Monte Carlo evaluations agree
    let trials = budget.pick(10_000, 3_000);
    let ce2 = ConjugateScheme::new(2).map_err(fail)?;
    let ce3 = ConjugateScheme::new(3).map_err(fail)?;
    let otp = OtpScheme::new(2).map_err(fail)?;
    let fce = FConjugateScheme::new(3, 2, PrfModel::Oracle { family_seed: 4, samples: 8 }).map_err(fail)?;
    let pairs: Vec<(&dyn Qecm, Box<dyn CloningAttack>)> = vec![
        (&ce2, Box::new(breidbart_attack(&ce2).map_err(fail)?)),
        (&ce3, Box::new(breidbart_attack(&ce3).map_err(fail)?)),
        (&ce2, Box::new(split_measure_attack(&ce2).map_err(fail)?)),
        (&otp, Box::new(guess_attack("01".parse().map_err(fail)?))),
        (&fce, Box::new(guess_attack("11".parse().map_err(fail)?))),
    ];
    for (i, (scheme, attack)) in pairs.iter().enumerate() {
        let dist = MessageDistribution::uniform(scheme.message_bits()).map_err(fail)?;
        let exact = eval_cloning_game(*scheme, attack.as_ref(), &dist, EvalOptions::exact()).map_err(fail)?;
        let mc = eval_cloning_game(*scheme, attack.as_ref(), &dist, EvalOptions::monte_carlo(trials, 300 + i as u64))
            .map_err(fail)?;
        ensure!(
            (exact.value - mc.value).abs() <= 4.0 * mc.std_error,
            "{} / {}: exact {} vs {} ± {}",
            scheme.name(),
            attack.name(),
            exact.value,
            mc.value,
            mc.std_error
        );
    }
    Ok(format!(
        "orthonormality, 100 completeness cases, {epr_cases} EPR cases, xor shift, reprogramming, 5 exact/MC pairs"
    ))
}

fn bound_curve_reproduction(budget: &Budget) -> Result<String, String> {
    let cfg = CurveConfig { n_min: 1, n_max: 10, trials: budget.pick(10_000, 2_000), oracle_samples: 64, seed: 1 };
    let lines = run_curve(&cfg).map_err(fail)?;
    let csv = render_curve(&cfg, &lines);
    let mut rows = csv.lines().filter(|l| !l.starts_with('#'));
    ensure!(rows.next() == Some(CURVE_HEADER), "unexpected header");
    let rows: Vec<Vec<&str>> = rows.map(|l| l.split(',').collect()).collect();
    ensure!(rows.len() == 10, "{} rows", rows.len());
    let conjugate_base = 0.5 + 1.0 / (2.0 * 2f64.sqrt());
    for (row, line) in rows.iter().zip(&lines) {
        let num = |i: usize| row[i].parse::<f64>().map_err(|e| format!("{row:?}: {e}"));
        let n = row[0].parse::<i32>().map_err(fail)?;
        let expected = [1.0, 2f64.powi(-n), conjugate_base.powi(n), (9.0 * 2f64.powi(-n)).min(1.0)];
        for (k, e) in expected.iter().enumerate() {
            let got = num(k + 1)?;
            ensure!((got - e).abs() <= 1e-12, "n={n} column {}: {got} vs {e}", k + 1);
        }
        let r = line.measured.as_ref().ok_or_else(|| format!("n={n}: no measured witness"))?;
        let bound = line.witness_bound().expect("measured rows have a bound");
        ensure!(num(6)? == r.value, "n={n}: CSV value differs from the report");
        ensure!(r.value <= bound + bound_slack(r), "n={n}: {} {} above bound {bound}", line.measured_attack, r.value);
    }
    Ok("10 rows match the closed forms; measured witnesses stay below their bounds".into())
}
