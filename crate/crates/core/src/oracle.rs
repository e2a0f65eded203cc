//! Quantum-accessible random oracles and a keyed pseudorandom function.
//!
//! A [`RandomOracle`] is a function `{0,1}^in -> {0,1}^out` defined lazily by
//! hashing `(seed, x)` with SHAKE256, so its value at a point never depends
//! on which points were queried before, or in what order. Point
//! reprogramming returns a new oracle and leaves the original untouched.
//!
//! The keyed function [`qprf_eval`] uses the same extendable-output hash
//! under a different domain tag; [`RandomOracle::from_qprf`] wraps a key as
//! an oracle so schemes and games can be written against oracles only.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::Rng;
use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake256;

use crate::bits::BitString;
use crate::error::{arg_err, Result};
use crate::linalg::{check_qubits, Vector, ZERO};
use crate::quantum::PureState;

/// Key of the keyed pseudorandom function.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct QprfKey {
    s: BitString,
}

impl QprfKey {
    pub fn new(s: BitString) -> Result<Self> {
        if s.is_empty() {
            return Err(arg_err!("qPRF key must have at least one bit"));
        }
        Ok(Self { s })
    }

    pub fn random<R: Rng + ?Sized>(lambda: usize, rng: &mut R) -> Result<Self> {
        Self::new(BitString::random(lambda, rng))
    }

    pub fn bits(&self) -> &BitString {
        &self.s
    }

    pub fn lambda(&self) -> usize {
        self.s.len()
    }
}

fn xof_bits(tag: &[u8], parts: &[&[u8]], out_bits: usize) -> BitString {
    let mut h = Shake256::default();
    h.update(tag);
    for p in parts {
        h.update(&(p.len() as u64).to_be_bytes());
        h.update(p);
    }
    let mut bytes = alloc::vec![0u8; out_bits.div_ceil(8)];
    h.finalize_xof().read(&mut bytes);
    BitString::from_bytes(&bytes, out_bits)
}

/// `f(key, x)` truncated to `out_bits` bits. Requires `|x| = |key|`.
pub fn qprf_eval(key: &QprfKey, x: &BitString, out_bits: usize) -> Result<BitString> {
    if x.len() != key.lambda() {
        return Err(arg_err!("qPRF input has {} bits, key has {}", x.len(), key.lambda()));
    }
    if out_bits == 0 {
        return Err(arg_err!("qPRF output size must be positive"));
    }
    let lens = [key.lambda() as u64, out_bits as u64].map(u64::to_be_bytes);
    Ok(xof_bits(b"qecm/qprf/v1", &[&lens[0], &lens[1], &key.s.to_bytes(), &x.to_bytes()], out_bits))
}

#[derive(Clone, Debug)]
enum Source {
    Seeded([u8; 32]),
    Keyed(QprfKey),
    /// Explicit value table indexed by input; used to enumerate all of
    /// `Bool(in, out)` at toy sizes.
    Table(Arc<Vec<BitString>>),
}

/// A function `{0,1}^in_bits -> {0,1}^out_bits` with optional reprogrammed
/// points.
#[derive(Clone, Debug)]
pub struct RandomOracle {
    source: Source,
    in_bits: usize,
    out_bits: usize,
    patches: BTreeMap<BitString, BitString>,
}

impl RandomOracle {
    pub fn new(seed: [u8; 32], in_bits: usize, out_bits: usize) -> Result<Self> {
        Self::with_source(Source::Seeded(seed), in_bits, out_bits)
    }

    /// Oracle whose 256-bit seed is drawn from `rng`.
    pub fn sample<R: Rng + ?Sized>(in_bits: usize, out_bits: usize, rng: &mut R) -> Result<Self> {
        let mut seed = [0u8; 32];
        rng.fill(&mut seed);
        Self::new(seed, in_bits, out_bits)
    }

    /// The keyed function `x -> qprf_eval(key, x, out_bits)` as an oracle.
    pub fn from_qprf(key: QprfKey, out_bits: usize) -> Result<Self> {
        let in_bits = key.lambda();
        Self::with_source(Source::Keyed(key), in_bits, out_bits)
    }

    /// Oracle given by an explicit table; `table[i]` is the value at the
    /// input with index `i`.
    pub fn from_table(in_bits: usize, out_bits: usize, table: Vec<BitString>) -> Result<Self> {
        if in_bits >= 32 || table.len() != 1usize << in_bits {
            return Err(arg_err!("table has {} entries, expected 2^{in_bits}", table.len()));
        }
        if let Some(bad) = table.iter().find(|v| v.len() != out_bits) {
            return Err(arg_err!("table entry {bad} does not have {out_bits} bits"));
        }
        Self::with_source(Source::Table(Arc::new(table)), in_bits, out_bits)
    }

    /// The constant-zero function.
    pub fn zero(in_bits: usize, out_bits: usize) -> Result<Self> {
        if in_bits >= 32 {
            return Err(arg_err!("zero oracle limited to fewer than 32 input bits"));
        }
        Self::from_table(in_bits, out_bits, alloc::vec![BitString::zeros(out_bits); 1 << in_bits])
    }

    fn with_source(source: Source, in_bits: usize, out_bits: usize) -> Result<Self> {
        if in_bits == 0 || out_bits == 0 {
            return Err(arg_err!("oracle sizes must be positive, got in={in_bits} out={out_bits}"));
        }
        Ok(Self { source, in_bits, out_bits, patches: BTreeMap::new() })
    }

    pub fn in_bits(&self) -> usize {
        self.in_bits
    }

    pub fn out_bits(&self) -> usize {
        self.out_bits
    }

    pub fn patches(&self) -> &BTreeMap<BitString, BitString> {
        &self.patches
    }

    pub fn eval(&self, x: &BitString) -> Result<BitString> {
        if x.len() != self.in_bits {
            return Err(arg_err!("oracle input has {} bits, expected {}", x.len(), self.in_bits));
        }
        if let Some(y) = self.patches.get(x) {
            return Ok(y.clone());
        }
        Ok(match &self.source {
            Source::Seeded(seed) => {
                let lens = [self.in_bits as u64, self.out_bits as u64].map(u64::to_be_bytes);
                xof_bits(b"qecm/oracle/v1", &[seed, &lens[0], &lens[1], &x.to_bytes()], self.out_bits)
            }
            Source::Keyed(key) => qprf_eval(key, x, self.out_bits)?,
            Source::Table(table) => table[x.to_index()].clone(),
        })
    }

    /// `H_{x,y}`: equal to `self` except that `x` maps to `y`.
    pub fn reprogram(&self, x: &BitString, y: &BitString) -> Result<RandomOracle> {
        if x.len() != self.in_bits || y.len() != self.out_bits {
            return Err(arg_err!(
                "reprogramming needs |x|={} and |y|={}, got {} and {}",
                self.in_bits,
                self.out_bits,
                x.len(),
                y.len()
            ));
        }
        let mut next = self.clone();
        next.patches.insert(x.clone(), y.clone());
        Ok(next)
    }

    /// Applies `O^H : |x>_Q |y>_R -> |x>_Q |y xor H(x)>_R` to `state`.
    ///
    /// `query` and `response` list qubit positions (0-based) and must be
    /// disjoint; all other qubits are untouched.
    pub fn unitary_apply(&self, state: &PureState, query: &[usize], response: &[usize]) -> Result<PureState> {
        if query.len() != self.in_bits || response.len() != self.out_bits {
            return Err(arg_err!(
                "oracle registers must have {} query and {} response qubits",
                self.in_bits,
                self.out_bits
            ));
        }
        let q = state.qubits();
        check_qubits(q)?;
        let mut used = alloc::vec![false; q];
        for &i in query.iter().chain(response) {
            if i >= q {
                return Err(arg_err!("register qubit {i} out of range for {q} qubits"));
            }
            if used[i] {
                return Err(arg_err!("qubit {i} appears twice in the oracle registers"));
            }
            used[i] = true;
        }
        let table: Vec<usize> = BitString::all(self.in_bits)
            .map(|x| self.eval(&x).map(|y| y.to_index()))
            .collect::<Result<_>>()?;
        let read = |index: usize, reg: &[usize]| {
            reg.iter().fold(0usize, |acc, &qubit| (acc << 1) | ((index >> (q - 1 - qubit)) & 1))
        };
        let mut mask_of = alloc::vec![0usize; 1 << self.out_bits];
        for (value, mask) in mask_of.iter_mut().enumerate() {
            for (pos, &qubit) in response.iter().enumerate() {
                if (value >> (response.len() - 1 - pos)) & 1 == 1 {
                    *mask |= 1 << (q - 1 - qubit);
                }
            }
        }
        let amps = state.amplitudes();
        let mut out = Vector::from_element(amps.len(), ZERO);
        for (i, a) in amps.iter().enumerate() {
            let hx = table[read(i, query)];
            out[i ^ mask_of[hx]] = *a;
        }
        Ok(PureState::from_parts_unchecked(out, q))
    }
}

/// Free-function form of [`RandomOracle::new`] with a 256-bit seed.
pub fn oracle_new(seed: [u8; 32], lambda: usize, n: usize) -> Result<RandomOracle> {
    RandomOracle::new(seed, lambda, n)
}

/// Free-function form of [`RandomOracle::eval`].
pub fn oracle_eval(h: &RandomOracle, x: &BitString) -> Result<BitString> {
    h.eval(x)
}

/// Free-function form of [`RandomOracle::reprogram`].
pub fn reprogram(h: &RandomOracle, x: &BitString, y: &BitString) -> Result<RandomOracle> {
    h.reprogram(x, y)
}

/// Expands a 64-bit seed into an oracle seed.
pub fn seed_from_u64(seed: u64) -> [u8; 32] {
    let bytes = xof_bits(b"qecm/seed/v1", &[&seed.to_be_bytes()], 256).to_bytes();
    let mut out = [0u8; 32];
    out.copy_from_slice(&bytes);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::random::{random_pure_state, seeded};
    use crate::quantum::Tensor;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn equal_seeds_agree_and_outputs_have_declared_length() {
        let a = RandomOracle::new(seed_from_u64(1), 12, 8).unwrap();
        let b = RandomOracle::new(seed_from_u64(1), 12, 8).unwrap();
        let mut rng = seeded(5);
        for _ in 0..1000 {
            let x = BitString::random(12, &mut rng);
            let ya = a.eval(&x).unwrap();
            assert_eq!(ya.len(), 8);
            assert_eq!(ya, b.eval(&x).unwrap());
        }
    }

    #[test]
    fn different_seeds_disagree_somewhere() {
        let mut rng = seeded(9);
        for trial in 0..20 {
            let a = RandomOracle::new(seed_from_u64(2 * trial), 10, 8).unwrap();
            let b = RandomOracle::new(seed_from_u64(2 * trial + 1), 10, 8).unwrap();
            let differs = (0..64).any(|_| {
                let x = BitString::random(10, &mut rng);
                a.eval(&x).unwrap() != b.eval(&x).unwrap()
            });
            assert!(differs);
        }
    }

    #[test]
    fn evaluation_is_order_independent() {
        let h = RandomOracle::new(seed_from_u64(3), 6, 5).unwrap();
        let forward: Vec<_> = BitString::all(6).map(|x| h.eval(&x).unwrap()).collect();
        let mut backward: Vec<_> = BitString::all(6).collect::<Vec<_>>().into_iter().rev().map(|x| h.eval(&x).unwrap()).collect();
        backward.reverse();
        assert_eq!(forward, backward);
    }

    #[test]
    fn reprogramming_overrides_one_point() {
        let h = RandomOracle::new(seed_from_u64(4), 4, 3).unwrap();
        let x = bs("0110");
        let y = bs("101");
        let hxy = h.reprogram(&x, &y).unwrap();
        assert_eq!(hxy.eval(&x).unwrap(), y);
        for s in BitString::all(4).filter(|s| *s != x) {
            assert_eq!(hxy.eval(&s).unwrap(), h.eval(&s).unwrap());
        }
        let again = hxy.reprogram(&x, &bs("010")).unwrap();
        assert_eq!(again.eval(&x).unwrap(), bs("010"));
        // original untouched
        assert!(h.patches().is_empty());
        assert!(h.reprogram(&bs("01"), &y).is_err());
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let h = RandomOracle::new(seed_from_u64(4), 4, 3).unwrap();
        assert!(h.eval(&bs("011")).is_err());
        assert!(RandomOracle::new(seed_from_u64(4), 0, 3).is_err());
        assert!(RandomOracle::new(seed_from_u64(4), 3, 0).is_err());
    }

    #[test]
    fn oracle_unitary_on_basis_states() {
        let h = RandomOracle::new(seed_from_u64(6), 2, 2).unwrap();
        for x in BitString::all(2) {
            let input = PureState::basis(&x.concat(&bs("00"))).unwrap();
            let out = h.unitary_apply(&input, &[0, 1], &[2, 3]).unwrap();
            let expected = PureState::basis(&x.concat(&h.eval(&x).unwrap())).unwrap();
            assert_eq!(out, expected);
        }
    }

    #[test]
    fn oracle_unitary_is_an_involution_and_norm_preserving() {
        let h = RandomOracle::new(seed_from_u64(7), 3, 2).unwrap();
        let mut rng = seeded(8);
        for _ in 0..10 {
            let psi = random_pure_state(6, &mut rng).unwrap();
            let once = h.unitary_apply(&psi, &[5, 0, 3], &[1, 4]).unwrap();
            assert!((once.amplitudes().norm() - 1.0).abs() < 1e-9);
            let twice = h.unitary_apply(&once, &[5, 0, 3], &[1, 4]).unwrap();
            assert!((twice.amplitudes() - psi.amplitudes()).norm() < 1e-12);
        }
    }

    #[test]
    fn oracle_unitary_acts_linearly_on_superpositions() {
        let h = RandomOracle::new(seed_from_u64(10), 3, 2).unwrap();
        let (x1, x2) = (bs("001"), bs("110"));
        let amp = c(core::f64::consts::FRAC_1_SQRT_2);
        let q = PureState::basis(&x1).unwrap().amplitudes() * amp + PureState::basis(&x2).unwrap().amplitudes() * amp;
        let input = PureState::new(q).unwrap().tensor(&PureState::basis(&bs("00")).unwrap()).unwrap();
        let out = h.unitary_apply(&input, &[0, 1, 2], &[3, 4]).unwrap();
        let expected = PureState::basis(&x1.concat(&h.eval(&x1).unwrap())).unwrap().amplitudes() * amp
            + PureState::basis(&x2.concat(&h.eval(&x2).unwrap())).unwrap().amplitudes() * amp;
        assert!((out.amplitudes() - expected).norm() < 1e-12);
    }

    #[test]
    fn oracle_registers_must_be_disjoint_and_sized() {
        let h = RandomOracle::new(seed_from_u64(11), 2, 1).unwrap();
        let psi = PureState::basis(&bs("000")).unwrap();
        assert!(h.unitary_apply(&psi, &[0, 1], &[1]).is_err());
        assert!(h.unitary_apply(&psi, &[0], &[2]).is_err());
        assert!(h.unitary_apply(&psi, &[0, 1], &[3]).is_err());
    }

    #[test]
    fn qprf_is_deterministic_and_key_dependent() {
        let mut rng = seeded(12);
        let k1 = QprfKey::random(16, &mut rng).unwrap();
        let k2 = QprfKey::random(16, &mut rng).unwrap();
        let x = BitString::random(16, &mut rng);
        assert_eq!(qprf_eval(&k1, &x, 8).unwrap(), qprf_eval(&k1, &x, 8).unwrap());
        let differs = (0..64).any(|_| {
            let x = BitString::random(16, &mut rng);
            qprf_eval(&k1, &x, 8).unwrap() != qprf_eval(&k2, &x, 8).unwrap()
        });
        assert!(differs);
        assert!(qprf_eval(&k1, &BitString::zeros(15), 8).is_err());
    }

    #[test]
    fn qprf_output_bits_are_unbiased() {
        // 1000 inputs x 8 bits; Binomial(8000, 1/2) has sigma = sqrt(2000).
        let mut rng = seeded(13);
        let key = QprfKey::random(20, &mut rng).unwrap();
        let ones: usize = (0..1000)
            .map(|_| qprf_eval(&key, &BitString::random(20, &mut rng), 8).unwrap().weight())
            .sum();
        let sigma = libm::sqrt(8000.0 * 0.25);
        assert!((ones as f64 - 4000.0).abs() <= 5.0 * sigma, "ones = {ones}");
    }

    #[test]
    fn qprf_adapter_matches_direct_evaluation() {
        let mut rng = seeded(14);
        let key = QprfKey::random(6, &mut rng).unwrap();
        let h = RandomOracle::from_qprf(key.clone(), 4).unwrap();
        for x in BitString::all(6) {
            assert_eq!(h.eval(&x).unwrap(), qprf_eval(&key, &x, 4).unwrap());
        }
    }

    #[test]
    fn zero_oracle_is_zero() {
        let h = RandomOracle::zero(3, 2).unwrap();
        assert!(BitString::all(3).all(|x| h.eval(&x).unwrap() == bs("00")));
    }
}
