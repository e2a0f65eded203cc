//! Quantum encryptions of classical messages.
//!
//! A scheme is a key generator, an encryption map producing a ciphertext
//! with a classical part and a quantum part, and a decryption measurement.
//! Correctness means decryption returns the plaintext with probability one
//! for every key that can be generated.
//!
//! Three schemes are provided:
//!
//! * [`OtpScheme`]: the classical one-time pad, with no quantum part. Its
//!   ciphertexts can be copied perfectly.
//! * [`ConjugateScheme`]: the pad `m xor r` encoded in the Wiesner state
//!   `|(m xor r)^theta>`.
//! * [`FConjugateScheme`]: fresh randomness `x` encoded as `|x^theta>`, with
//!   the message masked as `m xor f(s, x)` by a keyed function `f`, modelled
//!   either by the keyed hash or by sampled random oracles.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::Rng;

use crate::bits::BitString;
use crate::error::{arg_err, Error, Result};
use crate::linalg::check_qubits;
use crate::oracle::{seed_from_u64, QprfKey, RandomOracle};
use crate::quantum::{wiesner_probabilities, wiesner_state, Povm, PureState};
use crate::random::{derived_rng, SimRng};

/// Key of one of the shipped schemes.
#[derive(Clone, Debug)]
pub enum Key {
    Otp { pad: BitString },
    Conjugate { r: BitString, theta: BitString },
    /// `prf` is `f(s, .)`; in the oracle model it is a sampled random oracle
    /// independent of `s`.
    FConjugate { s: BitString, theta: BitString, prf: RandomOracle },
}

/// What decoders learn when the key is announced. For F-conjugate keys the
/// seed `s` stays hidden and only black-box access to `f(s, .)` is given.
#[derive(Clone, Copy, Debug)]
pub enum RevealedKey<'a> {
    Otp { pad: &'a BitString },
    Conjugate { r: &'a BitString, theta: &'a BitString },
    FConjugate { theta: &'a BitString, prf: &'a RandomOracle },
}

impl RevealedKey<'_> {
    /// Byte string identifying the revealed key. For F-conjugate keys the
    /// function is summarised by its values on at most 64 inputs.
    pub fn fingerprint(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        let mut push = |tag: u8, s: &BitString| {
            out.push(tag);
            out.extend_from_slice(&(s.len() as u32).to_be_bytes());
            out.extend_from_slice(&s.to_bytes());
        };
        match self {
            RevealedKey::Otp { pad } => push(0, pad),
            RevealedKey::Conjugate { r, theta } => {
                push(1, r);
                push(1, theta);
            }
            RevealedKey::FConjugate { theta, prf } => {
                push(2, theta);
                let probes = prf.in_bits().min(6);
                for head in BitString::all(probes) {
                    let x = head.concat(&BitString::zeros(prf.in_bits() - probes));
                    push(2, &prf.eval(&x)?);
                }
            }
        }
        Ok(out)
    }
}

impl Key {
    pub fn reveal(&self) -> RevealedKey<'_> {
        match self {
            Key::Otp { pad } => RevealedKey::Otp { pad },
            Key::Conjugate { r, theta } => RevealedKey::Conjugate { r, theta },
            Key::FConjugate { theta, prf, .. } => RevealedKey::FConjugate { theta, prf },
        }
    }

    /// Classical key bits (`kappa` of them).
    pub fn bits(&self) -> BitString {
        match self {
            Key::Otp { pad } => pad.clone(),
            Key::Conjugate { r, theta } => r.concat(theta),
            Key::FConjugate { s, theta, .. } => s.concat(theta),
        }
    }
}

/// Ciphertext: classical register (possibly empty) and a pure quantum
/// register (possibly zero qubits).
#[derive(Clone, Debug)]
pub struct Ciphertext {
    pub classical: BitString,
    pub quantum: PureState,
    /// Per-encryption randomness (`x` for F-conjugate encryption).
    pub randomness: Option<BitString>,
}

impl Ciphertext {
    pub fn quantum_qubits(&self) -> usize {
        self.quantum.qubits()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchemeKind {
    Otp,
    Conjugate,
    FConjugate,
}

/// A QECM scheme with declared sizes.
pub trait Qecm: Send + Sync {
    fn name(&self) -> &'static str;
    fn kind(&self) -> SchemeKind;
    fn lambda(&self) -> usize;
    /// Message size `n`.
    fn message_bits(&self) -> usize;
    /// Key size `kappa`.
    fn key_bits(&self) -> usize;
    /// Classical ciphertext bits.
    fn classical_bits(&self) -> usize;
    /// Quantum ciphertext qubits.
    fn quantum_qubits(&self) -> usize;
    /// Ciphertext size `ell`, classical bits plus qubits.
    fn ciphertext_size(&self) -> usize {
        self.classical_bits() + self.quantum_qubits()
    }
    /// Exponent `t` of the scheme's `2^{-n+t}` cloning bound, if one is
    /// known.
    fn uncloneable_t(&self) -> Option<f64>;
    /// Size of the sampled oracle family standing in for a random function,
    /// when the scheme is instantiated in the oracle model.
    fn oracle_samples(&self) -> Option<usize> {
        None
    }

    fn key_gen(&self, rng: &mut SimRng) -> Result<Key>;
    /// Every key with positive probability and that probability.
    fn key_space(&self) -> Result<Vec<(Key, f64)>>;
    fn key_space_size(&self) -> f64;

    fn encrypt(&self, key: &Key, m: &BitString, rng: &mut SimRng) -> Result<Ciphertext>;
    /// Encryption as an explicit mixture over its internal randomness.
    fn encryption_branches(&self, key: &Key, m: &BitString) -> Result<Vec<(Ciphertext, f64)>>;
    fn encryption_branch_count(&self) -> f64;

    /// Outcome distribution of the decryption measurement.
    fn decrypt_distribution(&self, key: &Key, ct: &Ciphertext) -> Result<BTreeMap<BitString, f64>>;

    fn decrypt(&self, key: &Key, ct: &Ciphertext, rng: &mut SimRng) -> Result<BitString> {
        let dist = self.decrypt_distribution(key, ct)?;
        Ok(crate::quantum::sample_distribution(&dist, rng))
    }

    /// The decryption measurement as a POVM on the quantum register,
    /// conditioned on the classical part. Dense, so only for small
    /// registers.
    fn decryption_povm(&self, key: &RevealedKey<'_>, classical: &BitString) -> Result<Povm>;
}

fn check_len(what: &str, s: &BitString, expected: usize) -> Result<()> {
    if s.len() != expected {
        return Err(arg_err!("{what} has {} bits, expected {expected}", s.len()));
    }
    Ok(())
}

fn wrong_key(scheme: &str) -> Error {
    arg_err!("key does not belong to the {scheme} scheme")
}

fn probabilities_to_map(probs: &[f64], len: usize, relabel: impl Fn(&BitString) -> Result<BitString>) -> Result<BTreeMap<BitString, f64>> {
    let mut out = BTreeMap::new();
    for (i, &p) in probs.iter().enumerate() {
        if p > 1e-15 {
            *out.entry(relabel(&BitString::from_index(i as u64, len))?).or_insert(0.0) += p;
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// One-time pad

/// Classical one-time pad: `c = m xor k`, no quantum register.
#[derive(Clone, Debug)]
pub struct OtpScheme {
    lambda: usize,
}

impl OtpScheme {
    pub fn new(lambda: usize) -> Result<Self> {
        if lambda == 0 {
            return Err(arg_err!("lambda must be positive"));
        }
        Ok(Self { lambda })
    }
}

/// Free-function constructor for the one-time pad baseline.
pub fn otp_classical(lambda: usize) -> Result<OtpScheme> {
    OtpScheme::new(lambda)
}

impl Qecm for OtpScheme {
    fn name(&self) -> &'static str {
        "otp"
    }
    fn kind(&self) -> SchemeKind {
        SchemeKind::Otp
    }
    fn lambda(&self) -> usize {
        self.lambda
    }
    fn message_bits(&self) -> usize {
        self.lambda
    }
    fn key_bits(&self) -> usize {
        self.lambda
    }
    fn classical_bits(&self) -> usize {
        self.lambda
    }
    fn quantum_qubits(&self) -> usize {
        0
    }
    fn uncloneable_t(&self) -> Option<f64> {
        Some(self.lambda as f64)
    }

    fn key_gen(&self, rng: &mut SimRng) -> Result<Key> {
        Ok(Key::Otp { pad: BitString::random(self.lambda, rng) })
    }

    fn key_space(&self) -> Result<Vec<(Key, f64)>> {
        let p = 1.0 / (1u64 << self.lambda) as f64;
        Ok(BitString::all(self.lambda).map(|pad| (Key::Otp { pad }, p)).collect())
    }

    fn key_space_size(&self) -> f64 {
        libm::exp2(self.lambda as f64)
    }

    fn encrypt(&self, key: &Key, m: &BitString, _rng: &mut SimRng) -> Result<Ciphertext> {
        let Key::Otp { pad } = key else { return Err(wrong_key("otp")) };
        check_len("message", m, self.lambda)?;
        Ok(Ciphertext {
            classical: m.xor(pad)?,
            quantum: PureState::basis(&BitString::zeros(0))?,
            randomness: None,
        })
    }

    fn encryption_branches(&self, key: &Key, m: &BitString) -> Result<Vec<(Ciphertext, f64)>> {
        Ok(alloc::vec![(self.encrypt(key, m, &mut crate::random::seeded(0))?, 1.0)])
    }

    fn encryption_branch_count(&self) -> f64 {
        1.0
    }

    fn decrypt_distribution(&self, key: &Key, ct: &Ciphertext) -> Result<BTreeMap<BitString, f64>> {
        let Key::Otp { pad } = key else { return Err(wrong_key("otp")) };
        check_len("classical ciphertext", &ct.classical, self.lambda)?;
        let mut out = BTreeMap::new();
        out.insert(ct.classical.xor(pad)?, 1.0);
        Ok(out)
    }

    fn decryption_povm(&self, key: &RevealedKey<'_>, classical: &BitString) -> Result<Povm> {
        let RevealedKey::Otp { pad } = key else { return Err(wrong_key("otp")) };
        check_len("classical ciphertext", classical, self.lambda)?;
        Ok(Povm::constant(classical.xor(pad)?))
    }
}

// ---------------------------------------------------------------------------
// Conjugate encryption

/// Samples a conjugate-encryption key `(r, theta)`, each `lambda` bits.
pub fn ce_keygen<R: Rng + ?Sized>(lambda: usize, rng: &mut R) -> (BitString, BitString) {
    let r = BitString::random(lambda, rng);
    let theta = BitString::random(lambda, rng);
    (r, theta)
}

/// `|(m xor r)^theta>`.
pub fn ce_enc(r: &BitString, theta: &BitString, m: &BitString) -> Result<Ciphertext> {
    check_len("message", m, r.len())?;
    check_len("theta", theta, r.len())?;
    Ok(Ciphertext {
        classical: BitString::zeros(0),
        quantum: wiesner_state(&m.xor(r)?, theta)?,
        randomness: None,
    })
}

/// Distribution of `c xor r` where `c` is the outcome of measuring the
/// ciphertext in basis `theta`.
pub fn ce_dec_distribution(r: &BitString, theta: &BitString, ct: &Ciphertext) -> Result<BTreeMap<BitString, f64>> {
    if ct.quantum_qubits() != r.len() || theta.len() != r.len() {
        return Err(arg_err!("ciphertext has {} qubits, key is for {}", ct.quantum_qubits(), r.len()));
    }
    let probs = wiesner_probabilities(&ct.quantum, theta)?;
    probabilities_to_map(&probs, r.len(), |c| c.xor(r))
}

/// Sampled conjugate decryption.
pub fn ce_dec<R: Rng + ?Sized>(r: &BitString, theta: &BitString, ct: &Ciphertext, rng: &mut R) -> Result<BitString> {
    let dist = ce_dec_distribution(r, theta, ct)?;
    Ok(crate::quantum::sample_distribution(&dist, rng))
}

/// Conjugate encryption: `n = lambda`, `kappa = 2 lambda`, `ell = lambda`.
#[derive(Clone, Debug)]
pub struct ConjugateScheme {
    lambda: usize,
}

impl ConjugateScheme {
    pub fn new(lambda: usize) -> Result<Self> {
        if lambda == 0 {
            return Err(arg_err!("lambda must be positive"));
        }
        check_qubits(lambda)?;
        Ok(Self { lambda })
    }
}

impl Qecm for ConjugateScheme {
    fn name(&self) -> &'static str {
        "ce"
    }
    fn kind(&self) -> SchemeKind {
        SchemeKind::Conjugate
    }
    fn lambda(&self) -> usize {
        self.lambda
    }
    fn message_bits(&self) -> usize {
        self.lambda
    }
    fn key_bits(&self) -> usize {
        2 * self.lambda
    }
    fn classical_bits(&self) -> usize {
        0
    }
    fn quantum_qubits(&self) -> usize {
        self.lambda
    }
    fn uncloneable_t(&self) -> Option<f64> {
        Some(self.lambda as f64 * libm::log2(1.0 + core::f64::consts::FRAC_1_SQRT_2))
    }

    fn key_gen(&self, rng: &mut SimRng) -> Result<Key> {
        let (r, theta) = ce_keygen(self.lambda, rng);
        Ok(Key::Conjugate { r, theta })
    }

    fn key_space(&self) -> Result<Vec<(Key, f64)>> {
        let p = 1.0 / self.key_space_size();
        let mut keys = Vec::new();
        for r in BitString::all(self.lambda) {
            for theta in BitString::all(self.lambda) {
                keys.push((Key::Conjugate { r: r.clone(), theta }, p));
            }
        }
        Ok(keys)
    }

    fn key_space_size(&self) -> f64 {
        libm::exp2(2.0 * self.lambda as f64)
    }

    fn encrypt(&self, key: &Key, m: &BitString, _rng: &mut SimRng) -> Result<Ciphertext> {
        let Key::Conjugate { r, theta } = key else { return Err(wrong_key("ce")) };
        ce_enc(r, theta, m)
    }

    fn encryption_branches(&self, key: &Key, m: &BitString) -> Result<Vec<(Ciphertext, f64)>> {
        let Key::Conjugate { r, theta } = key else { return Err(wrong_key("ce")) };
        Ok(alloc::vec![(ce_enc(r, theta, m)?, 1.0)])
    }

    fn encryption_branch_count(&self) -> f64 {
        1.0
    }

    fn decrypt_distribution(&self, key: &Key, ct: &Ciphertext) -> Result<BTreeMap<BitString, f64>> {
        let Key::Conjugate { r, theta } = key else { return Err(wrong_key("ce")) };
        ce_dec_distribution(r, theta, ct)
    }

    fn decryption_povm(&self, key: &RevealedKey<'_>, _classical: &BitString) -> Result<Povm> {
        let RevealedKey::Conjugate { r, theta } = key else { return Err(wrong_key("ce")) };
        let r = (*r).clone();
        wiesner_relabelled(theta, move |s| s.xor(&r))
    }
}

/// Wiesner-basis measurement reporting `relabel(s)` for outcome `s`.
pub(crate) fn wiesner_relabelled(theta: &BitString, relabel: impl Fn(&BitString) -> Result<BitString>) -> Result<Povm> {
    let basis = crate::quantum::hadamard_layer(theta)?;
    let labels = BitString::all(theta.len()).map(|s| relabel(&s)).collect::<Result<Vec<_>>>()?;
    Povm::from_basis(&basis, &labels)
}

// ---------------------------------------------------------------------------
// F-conjugate encryption

/// How `f(s, .)` is realised.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrfModel {
    /// The keyed extendable-output hash with key `s`.
    Qprf,
    /// A fresh random oracle drawn from a family of `samples` seeded oracles,
    /// independent of `s`.
    Oracle { family_seed: u64, samples: usize },
}

/// Samples an F-conjugate key seed and basis `(s, theta)`.
pub fn fce_keygen<R: Rng + ?Sized>(lambda: usize, rng: &mut R) -> (BitString, BitString) {
    let s = BitString::random(lambda, rng);
    let theta = BitString::random(lambda, rng);
    (s, theta)
}

/// Encrypts with explicit randomness `x`: `(m xor f(x), |x^theta>)`.
pub fn fce_enc_with(theta: &BitString, m: &BitString, prf: &RandomOracle, x: &BitString) -> Result<Ciphertext> {
    check_len("message", m, prf.out_bits())?;
    check_len("randomness", x, theta.len())?;
    check_len("theta", theta, prf.in_bits())?;
    Ok(Ciphertext {
        classical: m.xor(&prf.eval(x)?)?,
        quantum: wiesner_state(x, theta)?,
        randomness: Some(x.clone()),
    })
}

/// Samples `x` and encrypts.
pub fn fce_enc<R: Rng + ?Sized>(theta: &BitString, m: &BitString, prf: &RandomOracle, rng: &mut R) -> Result<Ciphertext> {
    let x = BitString::random(theta.len(), rng);
    fce_enc_with(theta, m, prf, &x)
}

/// Distribution of `c xor f(r)` with `r` the outcome of measuring in basis
/// `theta`.
pub fn fce_dec_distribution(theta: &BitString, ct: &Ciphertext, prf: &RandomOracle) -> Result<BTreeMap<BitString, f64>> {
    if ct.quantum_qubits() != theta.len() || ct.classical.len() != prf.out_bits() {
        return Err(arg_err!(
            "malformed ciphertext: {} classical bits and {} qubits",
            ct.classical.len(),
            ct.quantum_qubits()
        ));
    }
    let probs = wiesner_probabilities(&ct.quantum, theta)?;
    probabilities_to_map(&probs, theta.len(), |r| ct.classical.xor(&prf.eval(r)?))
}

pub fn fce_dec<R: Rng + ?Sized>(theta: &BitString, ct: &Ciphertext, prf: &RandomOracle, rng: &mut R) -> Result<BitString> {
    let dist = fce_dec_distribution(theta, ct, prf)?;
    Ok(crate::quantum::sample_distribution(&dist, rng))
}

/// F-conjugate encryption: `n` free, `kappa = 2 lambda`,
/// `ell = lambda + n`.
#[derive(Clone, Debug)]
pub struct FConjugateScheme {
    lambda: usize,
    n: usize,
    model: PrfModel,
}

impl FConjugateScheme {
    pub fn new(lambda: usize, n: usize, model: PrfModel) -> Result<Self> {
        if lambda == 0 || n == 0 {
            return Err(arg_err!("lambda and n must be positive"));
        }
        check_qubits(lambda)?;
        if let PrfModel::Oracle { samples: 0, .. } = model {
            return Err(arg_err!("oracle model needs at least one sampled oracle"));
        }
        Ok(Self { lambda, n, model })
    }

    pub fn model(&self) -> &PrfModel {
        &self.model
    }

    /// Oracle `index` of the sampled family.
    pub fn family_oracle(&self, index: usize) -> Result<RandomOracle> {
        let PrfModel::Oracle { family_seed, samples } = self.model else {
            return Err(arg_err!("scheme is not in the oracle model"));
        };
        if index >= samples {
            return Err(arg_err!("oracle index {index} out of range for {samples} samples"));
        }
        let mut rng = derived_rng(family_seed, "oracle-family", index as u64);
        let mut seed = [0u8; 32];
        rng.fill(&mut seed);
        RandomOracle::new(seed, self.lambda, self.n)
    }

    fn prf_for(&self, s: &BitString, rng: &mut SimRng) -> Result<RandomOracle> {
        match self.model {
            PrfModel::Qprf => RandomOracle::from_qprf(QprfKey::new(s.clone())?, self.n),
            PrfModel::Oracle { samples, .. } => self.family_oracle(rng.random_range(0..samples)),
        }
    }
}

impl Qecm for FConjugateScheme {
    fn name(&self) -> &'static str {
        "fce"
    }
    fn kind(&self) -> SchemeKind {
        SchemeKind::FConjugate
    }
    fn lambda(&self) -> usize {
        self.lambda
    }
    fn message_bits(&self) -> usize {
        self.n
    }
    fn key_bits(&self) -> usize {
        2 * self.lambda
    }
    fn classical_bits(&self) -> usize {
        self.n
    }
    fn quantum_qubits(&self) -> usize {
        self.lambda
    }
    fn uncloneable_t(&self) -> Option<f64> {
        Some(libm::log2(9.0))
    }
    fn oracle_samples(&self) -> Option<usize> {
        match self.model {
            PrfModel::Oracle { samples, .. } => Some(samples),
            PrfModel::Qprf => None,
        }
    }

    fn key_gen(&self, rng: &mut SimRng) -> Result<Key> {
        let (s, theta) = fce_keygen(self.lambda, rng);
        let prf = self.prf_for(&s, rng)?;
        Ok(Key::FConjugate { s, theta, prf })
    }

    /// In the oracle model `s` plays no role and is fixed to zero; the
    /// enumeration runs over `theta` and the sampled oracle family.
    fn key_space(&self) -> Result<Vec<(Key, f64)>> {
        let p = 1.0 / self.key_space_size();
        let mut keys = Vec::new();
        match self.model {
            PrfModel::Qprf => {
                for s in BitString::all(self.lambda) {
                    let prf = RandomOracle::from_qprf(QprfKey::new(s.clone())?, self.n)?;
                    for theta in BitString::all(self.lambda) {
                        keys.push((Key::FConjugate { s: s.clone(), theta, prf: prf.clone() }, p));
                    }
                }
            }
            PrfModel::Oracle { samples, .. } => {
                for i in 0..samples {
                    let prf = self.family_oracle(i)?;
                    for theta in BitString::all(self.lambda) {
                        keys.push((Key::FConjugate { s: BitString::zeros(self.lambda), theta, prf: prf.clone() }, p));
                    }
                }
            }
        }
        Ok(keys)
    }

    fn key_space_size(&self) -> f64 {
        let bases = libm::exp2(self.lambda as f64);
        match self.model {
            PrfModel::Qprf => bases * bases,
            PrfModel::Oracle { samples, .. } => bases * samples as f64,
        }
    }

    fn encrypt(&self, key: &Key, m: &BitString, rng: &mut SimRng) -> Result<Ciphertext> {
        let Key::FConjugate { theta, prf, .. } = key else { return Err(wrong_key("fce")) };
        fce_enc(theta, m, prf, rng)
    }

    fn encryption_branches(&self, key: &Key, m: &BitString) -> Result<Vec<(Ciphertext, f64)>> {
        let Key::FConjugate { theta, prf, .. } = key else { return Err(wrong_key("fce")) };
        let p = 1.0 / self.encryption_branch_count();
        BitString::all(self.lambda).map(|x| Ok((fce_enc_with(theta, m, prf, &x)?, p))).collect()
    }

    fn encryption_branch_count(&self) -> f64 {
        libm::exp2(self.lambda as f64)
    }

    fn decrypt_distribution(&self, key: &Key, ct: &Ciphertext) -> Result<BTreeMap<BitString, f64>> {
        let Key::FConjugate { theta, prf, .. } = key else { return Err(wrong_key("fce")) };
        fce_dec_distribution(theta, ct, prf)
    }

    fn decryption_povm(&self, key: &RevealedKey<'_>, classical: &BitString) -> Result<Povm> {
        let RevealedKey::FConjugate { theta, prf } = key else { return Err(wrong_key("fce")) };
        check_len("classical ciphertext", classical, self.n)?;
        let prf = (*prf).clone();
        let classical = classical.clone();
        wiesner_relabelled(theta, move |r| classical.xor(&prf.eval(r)?))
    }
}

/// Seed helper for callers building oracle families from a `u64`.
pub fn oracle_family_seed(seed: u64) -> [u8; 32] {
    seed_from_u64(seed)
}
