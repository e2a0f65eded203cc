use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::Rng;

use super::{bit_label, CloningAttack, CloningDistinguishingAttack, DistinguishingAttack};
use crate::bits::BitString;
use crate::error::{arg_err, Error, Result};
use crate::linalg::{c, check_qubits, hermitian_eigen, identity, kron, projector, Matrix, Vector};
use crate::quantum::{DensityOperator, KrausChannel, Povm};
use crate::random::{derived_rng_bytes, random_channel, random_density, random_povm};
use crate::scheme::{wiesner_relabelled, Qecm, RevealedKey, SchemeKind};

/// One outcome of a generator: candidate message `message` with probability
/// `probability`, leaving `side` in register `S`.
#[derive(Clone, Debug)]
pub struct GenBranch {
    pub message: BitString,
    pub probability: f64,
    pub side: DensityOperator,
}

fn validate_gen(gen: &[GenBranch], s_qubits: usize) -> Result<usize> {
    let first = gen.first().ok_or_else(|| arg_err!("generator has no branches"))?;
    let n = first.message.len();
    let mut total = 0.0;
    for g in gen {
        if g.message.len() != n {
            return Err(arg_err!("generator messages have differing lengths"));
        }
        if g.side.qubits() != s_qubits {
            return Err(arg_err!("side register has {} qubits, expected {s_qubits}", g.side.qubits()));
        }
        if !(0.0..=1.0 + 1e-12).contains(&g.probability) {
            return Err(arg_err!("generator probability {} out of range", g.probability));
        }
        total += g.probability;
    }
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::Invalid { what: "generator", detail: format!("probabilities sum to {total}") });
    }
    Ok(n)
}

fn trivial_side() -> DensityOperator {
    DensityOperator::maximally_mixed(0).expect("zero qubits is within capacity")
}

fn random_gen<R: Rng + ?Sized>(n: usize, s_qubits: usize, rng: &mut R) -> Result<Vec<GenBranch>> {
    let weights: Vec<f64> = BitString::all(n).map(|_| -libm::log(1.0 - rng.random::<f64>())).collect();
    let total: f64 = weights.iter().sum();
    BitString::all(n)
        .zip(weights)
        .map(|(message, w)| {
            Ok(GenBranch { message, probability: w / total, side: random_density(s_qubits, 2, rng)? })
        })
        .collect()
}

fn key_and_classical(key: &RevealedKey<'_>, classical: &BitString) -> Result<Vec<u8>> {
    let mut bytes = key.fingerprint()?;
    bytes.extend_from_slice(&(classical.len() as u32).to_be_bytes());
    bytes.extend_from_slice(&classical.to_bytes());
    Ok(bytes)
}

fn bits() -> [BitString; 2] {
    [bit_label(false), bit_label(true)]
}

type BitDecoder = Arc<dyn Fn(&dyn Qecm, &RevealedKey<'_>, &BitString) -> Result<Povm> + Send + Sync>;

// ---------------------------------------------------------------------------

/// A cloning-distinguishing attack given by explicit data: a generator, a
/// classical-independent split and keyed bit decoders.
#[derive(Clone)]
pub struct ExplicitCdAttack {
    name: String,
    gen: Vec<GenBranch>,
    n: usize,
    s_qubits: usize,
    t_qubits: usize,
    b_qubits: usize,
    c_qubits: usize,
    split: KrausChannel,
    decode_b: BitDecoder,
    decode_c: BitDecoder,
}

impl core::fmt::Debug for ExplicitCdAttack {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ExplicitCdAttack").field("name", &self.name).field("n", &self.n).finish_non_exhaustive()
    }
}

impl ExplicitCdAttack {
    /// `split` acts on `S (x) T` with `S` of `s_qubits` qubits and outputs
    /// `b_qubits` for B followed by the rest for C.
    pub fn new(
        name: impl Into<String>,
        gen: Vec<GenBranch>,
        s_qubits: usize,
        split: KrausChannel,
        b_qubits: usize,
        decode_b: BitDecoder,
        decode_c: BitDecoder,
    ) -> Result<Self> {
        let n = validate_gen(&gen, s_qubits)?;
        if split.in_qubits() < s_qubits {
            return Err(arg_err!("split takes {} qubits, fewer than the side register", split.in_qubits()));
        }
        if split.out_qubits() < b_qubits {
            return Err(arg_err!("split outputs {} qubits, fewer than B's {b_qubits}", split.out_qubits()));
        }
        Ok(Self {
            name: name.into(),
            gen,
            n,
            s_qubits,
            t_qubits: split.in_qubits() - s_qubits,
            b_qubits,
            c_qubits: split.out_qubits() - b_qubits,
            split,
            decode_b,
            decode_c,
        })
    }

    pub fn message_bits(&self) -> usize {
        self.n
    }
}

impl CloningDistinguishingAttack for ExplicitCdAttack {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn check(&self, scheme: &dyn Qecm) -> Result<()> {
        if scheme.message_bits() != self.n || scheme.quantum_qubits() != self.t_qubits {
            return Err(arg_err!(
                "attack {} is built for n={} with {} ciphertext qubits; scheme {} has n={} and {} qubits",
                self.name,
                self.n,
                self.t_qubits,
                scheme.name(),
                scheme.message_bits(),
                scheme.quantum_qubits()
            ));
        }
        Ok(())
    }

    fn s_qubits(&self) -> usize {
        self.s_qubits
    }
    fn b_qubits(&self) -> usize {
        self.b_qubits
    }
    fn c_qubits(&self) -> usize {
        self.c_qubits
    }

    fn generate(&self) -> &[GenBranch] {
        &self.gen
    }

    fn split(&self, _: &dyn Qecm, _: &BitString) -> Result<KrausChannel> {
        Ok(self.split.clone())
    }

    fn decode_b(&self, scheme: &dyn Qecm, key: &RevealedKey<'_>, classical: &BitString) -> Result<Povm> {
        (self.decode_b)(scheme, key, classical)
    }

    fn decode_c(&self, scheme: &dyn Qecm, key: &RevealedKey<'_>, classical: &BitString) -> Result<Povm> {
        (self.decode_c)(scheme, key, classical)
    }
}

/// Generator always submits `m_star`; split discards everything; both
/// decoders answer 1.
pub fn trivial_cd_attack(scheme: &dyn Qecm, m_star: BitString) -> Result<ExplicitCdAttack> {
    let gen = alloc::vec![GenBranch { message: m_star, probability: 1.0, side: trivial_side() }];
    let one: BitDecoder = Arc::new(|_, _, _| Ok(Povm::constant(bit_label(true))));
    ExplicitCdAttack::new("trivial_cd", gen, 0, KrausChannel::discard(scheme.quantum_qubits())?, 0, one.clone(), one)
}

/// Both decoders always answer `bit`.
pub fn constant_bit_attack(scheme: &dyn Qecm, bit: bool) -> Result<ExplicitCdAttack> {
    let gen = alloc::vec![GenBranch {
        message: BitString::ones(scheme.message_bits()),
        probability: 1.0,
        side: trivial_side(),
    }];
    let dec: BitDecoder = Arc::new(move |_, _, _| Ok(Povm::constant(bit_label(bit))));
    ExplicitCdAttack::new(
        format!("constant_bit({})", u8::from(bit)),
        gen,
        0,
        KrausChannel::discard(scheme.quantum_qubits())?,
        0,
        dec.clone(),
        dec,
    )
}

/// Against conjugate encryption with even `lambda`: submit `1^n`, hand each
/// side half of the qubits, answer 1 iff the decoded half is nonzero.
pub fn half_split_distinguisher(scheme: &dyn Qecm) -> Result<ExplicitCdAttack> {
    if scheme.kind() != SchemeKind::Conjugate {
        return Err(Error::Unsupported(format!("half-split distinguisher needs conjugate encryption, not {}", scheme.name())));
    }
    let q = scheme.quantum_qubits();
    if !q.is_multiple_of(2) {
        return Err(arg_err!("half-split distinguisher needs an even number of qubits, got {q}"));
    }
    let half = q / 2;
    let decoder = |upper: bool| -> BitDecoder {
        Arc::new(move |_, key, _| {
            let RevealedKey::Conjugate { r, theta } = *key else {
                return Err(arg_err!("expected a conjugate-encryption key"));
            };
            let (lo, hi) = if upper { (half, 2 * half) } else { (0, half) };
            let r_half = r.slice(lo, hi);
            wiesner_relabelled(&theta.slice(lo, hi), move |s| Ok(bit_label(s.xor(&r_half)?.weight() > 0)))
        })
    };
    let gen = alloc::vec![GenBranch {
        message: BitString::ones(scheme.message_bits()),
        probability: 1.0,
        side: trivial_side(),
    }];
    ExplicitCdAttack::new("half_split", gen, 0, KrausChannel::identity(q)?, half, decoder(false), decoder(true))
}

/// Random attack with one-qubit `S`, `B` and `C`: random generator
/// ensemble, random split and, for every (key, classical part), random bit
/// decoders derived from `seed`.
pub fn random_cd_attack(scheme: &dyn Qecm, seed: u64) -> Result<ExplicitCdAttack> {
    let q = scheme.quantum_qubits();
    let mut rng = crate::random::derived_rng(seed, "cd-attack", 0);
    let gen = random_gen(scheme.message_bits(), 1, &mut rng)?;
    let kraus = (1usize << (1 + q)).div_ceil(4).max(4);
    let split = random_channel(1 + q, 2, kraus, &mut rng)?;
    let decoder = |stream: &'static str| -> BitDecoder {
        Arc::new(move |_, key, classical| {
            let mut r = derived_rng_bytes(seed, stream, &key_and_classical(key, classical)?);
            random_povm(1, &bits(), &mut r)
        })
    };
    ExplicitCdAttack::new(format!("random_cd({seed})"), gen, 1, split, 1, decoder("cd-b"), decoder("cd-c"))
}

// ---------------------------------------------------------------------------

type Decision = Arc<dyn Fn(&dyn Qecm, &BitString, Option<&RevealedKey<'_>>) -> Result<Povm> + Send + Sync>;

/// Single-party distinguisher given by a generator and a decision
/// measurement on `S (x) T`.
#[derive(Clone)]
pub struct ExplicitDistinguisher {
    name: String,
    gen: Vec<GenBranch>,
    n: usize,
    s_qubits: usize,
    leaks_key: bool,
    decide: Decision,
}

impl core::fmt::Debug for ExplicitDistinguisher {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ExplicitDistinguisher").field("name", &self.name).finish_non_exhaustive()
    }
}

impl ExplicitDistinguisher {
    pub fn new(name: impl Into<String>, gen: Vec<GenBranch>, s_qubits: usize, leaks_key: bool, decide: Decision) -> Result<Self> {
        let n = validate_gen(&gen, s_qubits)?;
        Ok(Self { name: name.into(), gen, n, s_qubits, leaks_key, decide })
    }
}

impl DistinguishingAttack for ExplicitDistinguisher {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn check(&self, scheme: &dyn Qecm) -> Result<()> {
        if scheme.message_bits() != self.n {
            return Err(arg_err!("distinguisher built for n={}, scheme has n={}", self.n, scheme.message_bits()));
        }
        check_qubits(self.s_qubits + scheme.quantum_qubits())
    }

    fn s_qubits(&self) -> usize {
        self.s_qubits
    }

    fn generate(&self) -> &[GenBranch] {
        &self.gen
    }

    fn uses_leaked_key(&self) -> bool {
        self.leaks_key
    }

    fn decide(&self, scheme: &dyn Qecm, classical: &BitString, leaked: Option<&RevealedKey<'_>>) -> Result<Povm> {
        (self.decide)(scheme, classical, leaked)
    }
}

/// Ignores the ciphertext and outputs a uniformly random bit.
pub fn random_coin_distinguisher(scheme: &dyn Qecm) -> Result<ExplicitDistinguisher> {
    let gen = alloc::vec![GenBranch {
        message: BitString::ones(scheme.message_bits()),
        probability: 1.0,
        side: trivial_side(),
    }];
    let decide: Decision = Arc::new(|scheme, _, _| {
        let d = 1usize << scheme.quantum_qubits();
        let half = identity(d) * c(0.5);
        let mut elements = BTreeMap::new();
        elements.insert(bit_label(false), half.clone());
        elements.insert(bit_label(true), half);
        Povm::new(scheme.quantum_qubits(), elements)
    });
    ExplicitDistinguisher::new("random_coin", gen, 0, false, decide)
}

/// Negative control: submits `1^n`, is handed the key, decrypts and answers
/// whether the plaintext is nonzero. Wins with certainty against any correct
/// scheme.
pub fn key_leak_distinguisher(scheme: &dyn Qecm) -> Result<ExplicitDistinguisher> {
    let gen = alloc::vec![GenBranch {
        message: BitString::ones(scheme.message_bits()),
        probability: 1.0,
        side: trivial_side(),
    }];
    let decide: Decision = Arc::new(|scheme, classical, leaked| {
        let key = leaked.ok_or_else(|| arg_err!("the key-leak control needs the key"))?;
        let dec = scheme.decryption_povm(key, classical)?;
        let d = dec.dim();
        let mut elements = BTreeMap::new();
        elements.insert(bit_label(false), Matrix::zeros(d, d));
        elements.insert(bit_label(true), Matrix::zeros(d, d));
        for (m, e) in dec.elements() {
            *elements.get_mut(&bit_label(m.weight() > 0)).expect("both labels inserted") += e;
        }
        Povm::new(dec.qubits(), elements)
    });
    ExplicitDistinguisher::new("key_leak", gen, 0, true, decide)
}

/// Random generator with a one-qubit side register and, per classical
/// part, a random decision measurement.
pub fn random_distinguisher(scheme: &dyn Qecm, seed: u64) -> Result<ExplicitDistinguisher> {
    let mut rng = crate::random::derived_rng(seed, "distinguisher", 0);
    let gen = random_gen(scheme.message_bits(), 1, &mut rng)?;
    let decide: Decision = Arc::new(move |scheme, classical, _| {
        let mut r = derived_rng_bytes(seed, "distinguisher-decide", &classical.to_bytes());
        random_povm(1 + scheme.quantum_qubits(), &bits(), &mut r)
    });
    ExplicitDistinguisher::new(format!("random_distinguisher({seed})"), gen, 1, false, decide)
}

// ---------------------------------------------------------------------------

/// Cloning attack built from a cloning-distinguishing attack: sample the
/// generator's message `m'`, run the split on its side state and the
/// ciphertext, and give `m'` to both parties. A party answers `0^n` when
/// the original decoder says 0 and `m'` when it says 1.
///
/// Output registers are ordered `B, M_B, C, M_C`.
pub struct TransformedAttack {
    inner: Box<dyn CloningDistinguishingAttack>,
    n: usize,
}

pub fn transform_cd_to_cloning(attack: Box<dyn CloningDistinguishingAttack>) -> Result<TransformedAttack> {
    let n = attack
        .generate()
        .first()
        .map(|g| g.message.len())
        .ok_or_else(|| arg_err!("generator has no branches"))?;
    Ok(TransformedAttack { inner: attack, n })
}

impl TransformedAttack {
    pub fn inner(&self) -> &dyn CloningDistinguishingAttack {
        self.inner.as_ref()
    }

    fn lift_decoder(&self, bit_povm: Povm) -> Result<Povm> {
        let d = bit_povm.dim();
        let e0 = bit_povm.element(&bit_label(false)).cloned().unwrap_or_else(|| Matrix::zeros(d, d));
        let e1 = bit_povm.element(&bit_label(true)).cloned().unwrap_or_else(|| Matrix::zeros(d, d));
        let zero = BitString::zeros(self.n);
        let mut elements: BTreeMap<BitString, Matrix> = BTreeMap::new();
        let mut add = |label: BitString, m: Matrix| {
            elements.entry(label).and_modify(|acc| *acc += &m).or_insert(m);
        };
        let dm = 1usize << self.n;
        for m in BitString::all(self.n) {
            let mut basis = Vector::zeros(dm);
            basis[m.to_index()] = c(1.0);
            let p = projector(&basis);
            add(zero.clone(), kron(&e0, &p));
            add(m.clone(), kron(&e1, &p));
        }
        Povm::new(bit_povm.qubits() + self.n, elements)
    }
}

impl CloningAttack for TransformedAttack {
    fn name(&self) -> String {
        format!("transformed({})", self.inner.name())
    }

    fn check(&self, scheme: &dyn Qecm) -> Result<()> {
        self.inner.check(scheme)?;
        if scheme.message_bits() != self.n {
            return Err(arg_err!("transformed attack is for n={}, scheme has n={}", self.n, scheme.message_bits()));
        }
        check_qubits(self.inner.b_qubits() + self.inner.c_qubits() + 2 * self.n)
    }

    fn b_qubits(&self, _: &dyn Qecm) -> usize {
        self.inner.b_qubits() + self.n
    }
    fn c_qubits(&self, _: &dyn Qecm) -> usize {
        self.inner.c_qubits() + self.n
    }

    fn split(&self, scheme: &dyn Qecm, classical: &BitString) -> Result<KrausChannel> {
        let inner = self.inner.split(scheme, classical)?;
        let (s, t) = (self.inner.s_qubits(), scheme.quantum_qubits());
        if inner.in_qubits() != s + t {
            return Err(arg_err!("inner split takes {} qubits, expected {}", inner.in_qubits(), s + t));
        }
        let (b, cq, n) = (self.inner.b_qubits(), self.inner.c_qubits(), self.n);
        // kron(K, |m'>|m'>) leaves outputs as B, C, M_B, M_C
        let order: Vec<usize> = (0..b)
            .chain(b + cq..b + cq + n)
            .chain(b..b + cq)
            .chain(b + cq + n..b + cq + 2 * n)
            .collect();
        let id_t = identity(1 << t);
        let mut ops = Vec::new();
        for g in self.inner.generate() {
            let mut tag = Vector::zeros(1 << (2 * n));
            tag[g.message.to_index() * (1 << n) + g.message.to_index()] = c(1.0);
            let tag = Matrix::from_column_slice(tag.len(), 1, tag.as_slice());
            let (values, vectors) = hermitian_eigen(g.side.matrix());
            for (j, &lam) in values.iter().enumerate() {
                let weight = g.probability * lam;
                if weight <= 1e-15 {
                    continue;
                }
                let sj = Matrix::from_column_slice(1 << s, 1, vectors.column(j).as_slice());
                let embed = kron(&sj, &id_t);
                for k in inner.ops() {
                    let op = kron(&(k * &embed), &tag) * c(libm::sqrt(weight));
                    ops.push(crate::linalg::permute_rows(&op, b + cq + 2 * n, &order));
                }
            }
        }
        KrausChannel::new(ops, t, b + cq + 2 * n)
    }

    fn decode_b(&self, scheme: &dyn Qecm, key: &RevealedKey<'_>, classical: &BitString) -> Result<Povm> {
        self.lift_decoder(self.inner.decode_b(scheme, key, classical)?)
    }

    fn decode_c(&self, scheme: &dyn Qecm, key: &RevealedKey<'_>, classical: &BitString) -> Result<Povm> {
        self.lift_decoder(self.inner.decode_c(scheme, key, classical)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::TOL;
    use crate::scheme::{ConjugateScheme, Key, OtpScheme};

    #[test]
    fn random_cd_attack_is_valid_and_reproducible() {
        let ce = ConjugateScheme::new(2).unwrap();
        let a = random_cd_attack(&ce, 4).unwrap();
        let b = random_cd_attack(&ce, 4).unwrap();
        a.check(&ce).unwrap();
        let key = Key::Conjugate { r: "01".parse().unwrap(), theta: "11".parse().unwrap() };
        let empty = BitString::zeros(0);
        let pa = a.decode_b(&ce, &key.reveal(), &empty).unwrap();
        let pb = b.decode_b(&ce, &key.reveal(), &empty).unwrap();
        let e = &bit_label(true);
        assert!(crate::linalg::max_abs_diff(pa.element(e).unwrap(), pb.element(e).unwrap()) < 1e-15);
        assert!(a.split(&ce, &empty).unwrap().completeness_error() < TOL);
    }

    #[test]
    fn transformed_attack_is_trace_preserving() {
        let ce = ConjugateScheme::new(2).unwrap();
        for seed in 0..3 {
            let t = transform_cd_to_cloning(Box::new(random_cd_attack(&ce, seed).unwrap())).unwrap();
            t.check(&ce).unwrap();
            let ch = t.split(&ce, &BitString::zeros(0)).unwrap();
            assert!(ch.completeness_error() < TOL);
            assert_eq!(ch.out_qubits(), t.b_qubits(&ce) + t.c_qubits(&ce));
            let key = Key::Conjugate { r: "10".parse().unwrap(), theta: "01".parse().unwrap() };
            let povm = t.decode_b(&ce, &key.reveal(), &BitString::zeros(0)).unwrap();
            assert_eq!(povm.qubits(), 3);
        }
    }

    #[test]
    fn key_leak_control_needs_the_key() {
        let otp = OtpScheme::new(2).unwrap();
        let d = key_leak_distinguisher(&otp).unwrap();
        assert!(d.uses_leaked_key());
        assert!(d.decide(&otp, &"01".parse().unwrap(), None).is_err());
    }

    #[test]
    fn generator_validation() {
        let bad = alloc::vec![GenBranch { message: BitString::zeros(2), probability: 0.5, side: trivial_side() }];
        assert!(validate_gen(&bad, 0).is_err());
        assert!(validate_gen(&[], 0).is_err());
    }
}
