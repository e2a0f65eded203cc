use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::CloningAttack;
use crate::bits::BitString;
use crate::error::{arg_err, Error, Result};
use crate::linalg::{c, kron, Matrix, C64, ONE};
use crate::quantum::{KrausChannel, Povm};
use crate::scheme::{wiesner_relabelled, Qecm, RevealedKey, SchemeKind};

fn xor_unchecked(a: &BitString, b: &BitString) -> BitString {
    BitString::new(a.bits().iter().zip(b.bits()).map(|(x, y)| x ^ y).collect())
}

fn require_conjugate(scheme: &dyn Qecm, attack: &str) -> Result<()> {
    if scheme.kind() != SchemeKind::Conjugate {
        return Err(Error::Unsupported(format!("{attack} only applies to conjugate encryption, not {}", scheme.name())));
    }
    Ok(())
}

fn conjugate_key<'a>(key: &RevealedKey<'a>) -> Result<(&'a BitString, &'a BitString)> {
    match *key {
        RevealedKey::Conjugate { r, theta } => Ok((r, theta)),
        _ => Err(arg_err!("expected a conjugate-encryption key")),
    }
}

// ---------------------------------------------------------------------------

/// Copies the classical ciphertext; both sides run honest decryption.
#[derive(Clone, Debug, Default)]
pub struct CopyAttack;

/// Refuses schemes with a quantum ciphertext register.
pub fn copy_attack(scheme: &dyn Qecm) -> Result<CopyAttack> {
    CopyAttack.check(scheme)?;
    Ok(CopyAttack)
}

impl CloningAttack for CopyAttack {
    fn name(&self) -> String {
        "copy".into()
    }

    fn check(&self, scheme: &dyn Qecm) -> Result<()> {
        if scheme.quantum_qubits() > 0 {
            return Err(Error::Unsupported(format!(
                "{} ciphertexts carry {} qubits and cannot be copied",
                scheme.name(),
                scheme.quantum_qubits()
            )));
        }
        Ok(())
    }

    fn b_qubits(&self, _: &dyn Qecm) -> usize {
        0
    }
    fn c_qubits(&self, _: &dyn Qecm) -> usize {
        0
    }

    fn split(&self, _: &dyn Qecm, _: &BitString) -> Result<KrausChannel> {
        KrausChannel::identity(0)
    }

    fn decode_b(&self, scheme: &dyn Qecm, key: &RevealedKey<'_>, classical: &BitString) -> Result<Povm> {
        scheme.decryption_povm(key, classical)
    }

    fn decode_c(&self, scheme: &dyn Qecm, key: &RevealedKey<'_>, classical: &BitString) -> Result<Povm> {
        scheme.decryption_povm(key, classical)
    }
}

// ---------------------------------------------------------------------------

/// Discards the ciphertext; both sides answer `m0`.
#[derive(Clone, Debug)]
pub struct GuessAttack {
    m0: BitString,
}

pub fn guess_attack(m0: BitString) -> GuessAttack {
    GuessAttack { m0 }
}

impl GuessAttack {
    pub fn guess(&self) -> &BitString {
        &self.m0
    }
}

impl CloningAttack for GuessAttack {
    fn name(&self) -> String {
        format!("guess({})", self.m0)
    }

    fn check(&self, scheme: &dyn Qecm) -> Result<()> {
        if self.m0.len() != scheme.message_bits() {
            return Err(arg_err!("guess has {} bits but messages have {}", self.m0.len(), scheme.message_bits()));
        }
        Ok(())
    }

    fn b_qubits(&self, _: &dyn Qecm) -> usize {
        0
    }
    fn c_qubits(&self, _: &dyn Qecm) -> usize {
        0
    }

    fn split(&self, scheme: &dyn Qecm, _: &BitString) -> Result<KrausChannel> {
        KrausChannel::discard(scheme.quantum_qubits())
    }

    fn decode_b(&self, _: &dyn Qecm, _: &RevealedKey<'_>, _: &BitString) -> Result<Povm> {
        Ok(Povm::constant(self.m0.clone()))
    }

    fn decode_c(&self, _: &dyn Qecm, _: &RevealedKey<'_>, _: &BitString) -> Result<Povm> {
        Ok(Povm::constant(self.m0.clone()))
    }
}

// ---------------------------------------------------------------------------

/// Single-qubit Breidbart vector for outcome `bit`:
/// `cos(pi/8)|0> + sin(pi/8)|1>` or `sin(pi/8)|0> - cos(pi/8)|1>`.
pub fn breidbart_vector(bit: bool) -> [C64; 2] {
    let (s, co) = libm::sincos(core::f64::consts::PI / 8.0);
    if bit {
        [c(s), c(-co)]
    } else {
        [c(co), c(s)]
    }
}

/// Measures every qubit in the Breidbart basis and gives the outcome `c` to
/// both sides, which answer `c xor r`.
#[derive(Clone, Debug, Default)]
pub struct BreidbartAttack;

pub fn breidbart_attack(scheme: &dyn Qecm) -> Result<BreidbartAttack> {
    BreidbartAttack.check(scheme)?;
    Ok(BreidbartAttack)
}

/// Columns are the product Breidbart basis on `qubits` qubits.
pub(crate) fn breidbart_basis(qubits: usize) -> Matrix {
    let [a0, a1] = breidbart_vector(false);
    let [b0, b1] = breidbart_vector(true);
    let single = Matrix::from_row_slice(2, 2, &[a0, b0, a1, b1]);
    (0..qubits).fold(Matrix::from_element(1, 1, ONE), |m, _| kron(&m, &single))
}

/// Measure in the Breidbart basis and write the outcome into two fresh
/// registers of `qubits` qubits each.
pub(crate) fn breidbart_broadcast(qubits: usize) -> Result<KrausChannel> {
    let basis = breidbart_basis(qubits);
    let d = 1usize << qubits;
    let ops: Vec<Matrix> = (0..d)
        .map(|o| {
            let mut k = Matrix::zeros(d * d, d);
            for col in 0..d {
                k[(o * d + o, col)] = basis[(col, o)].conj();
            }
            k
        })
        .collect();
    KrausChannel::new(ops, qubits, 2 * qubits)
}

impl CloningAttack for BreidbartAttack {
    fn name(&self) -> String {
        "breidbart".into()
    }

    fn check(&self, scheme: &dyn Qecm) -> Result<()> {
        require_conjugate(scheme, "the Breidbart attack")?;
        crate::linalg::check_qubits(2 * scheme.quantum_qubits())
    }

    fn b_qubits(&self, scheme: &dyn Qecm) -> usize {
        scheme.quantum_qubits()
    }
    fn c_qubits(&self, scheme: &dyn Qecm) -> usize {
        scheme.quantum_qubits()
    }

    fn split(&self, scheme: &dyn Qecm, _: &BitString) -> Result<KrausChannel> {
        breidbart_broadcast(scheme.quantum_qubits())
    }

    fn decode_b(&self, _: &dyn Qecm, key: &RevealedKey<'_>, _: &BitString) -> Result<Povm> {
        let (r, _) = conjugate_key(key)?;
        Povm::relabelled_computational(r.len(), |s| xor_unchecked(s, r))
    }

    fn decode_c(&self, scheme: &dyn Qecm, key: &RevealedKey<'_>, classical: &BitString) -> Result<Povm> {
        self.decode_b(scheme, key, classical)
    }
}

// ---------------------------------------------------------------------------

/// Gives the first half of the qubits to B and the second half to C; each
/// side decodes its half with the key and pads the rest with zeros.
#[derive(Clone, Debug, Default)]
pub struct SplitMeasureAttack;

pub fn split_measure_attack(scheme: &dyn Qecm) -> Result<SplitMeasureAttack> {
    SplitMeasureAttack.check(scheme)?;
    Ok(SplitMeasureAttack)
}

impl SplitMeasureAttack {
    fn decode_half(key: &RevealedKey<'_>, upper: bool) -> Result<Povm> {
        let (r, theta) = conjugate_key(key)?;
        let half = r.len() / 2;
        let (lo, hi) = if upper { (half, r.len()) } else { (0, half) };
        let r_half = r.slice(lo, hi);
        let pad = BitString::zeros(half);
        wiesner_relabelled(&theta.slice(lo, hi), move |s| {
            let decoded = xor_unchecked(s, &r_half);
            Ok(if upper { pad.concat(&decoded) } else { decoded.concat(&pad) })
        })
    }
}

impl CloningAttack for SplitMeasureAttack {
    fn name(&self) -> String {
        "split_measure".into()
    }

    fn check(&self, scheme: &dyn Qecm) -> Result<()> {
        require_conjugate(scheme, "the split-and-measure attack")?;
        if !scheme.lambda().is_multiple_of(2) {
            return Err(arg_err!("split-and-measure needs an even number of qubits, got {}", scheme.lambda()));
        }
        Ok(())
    }

    fn b_qubits(&self, scheme: &dyn Qecm) -> usize {
        scheme.quantum_qubits() / 2
    }
    fn c_qubits(&self, scheme: &dyn Qecm) -> usize {
        scheme.quantum_qubits() / 2
    }

    fn split(&self, scheme: &dyn Qecm, _: &BitString) -> Result<KrausChannel> {
        KrausChannel::identity(scheme.quantum_qubits())
    }

    fn decode_b(&self, _: &dyn Qecm, key: &RevealedKey<'_>, _: &BitString) -> Result<Povm> {
        Self::decode_half(key, false)
    }

    fn decode_c(&self, _: &dyn Qecm, key: &RevealedKey<'_>, _: &BitString) -> Result<Povm> {
        Self::decode_half(key, true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, max_abs_diff, TOL};
    use crate::scheme::{ConjugateScheme, FConjugateScheme, OtpScheme, PrfModel};

    #[test]
    fn breidbart_basis_is_orthonormal_and_balanced() {
        let b = breidbart_basis(2);
        assert!(max_abs_diff(&(b.adjoint() * &b), &identity(4)) < TOL);
        let [a0, a1] = breidbart_vector(false);
        let cos2 = (2.0 + core::f64::consts::SQRT_2) / 4.0;
        assert!((a0.norm_sqr() - cos2).abs() < TOL);
        let plus_overlap = (a0 + a1).norm_sqr() / 2.0;
        assert!((plus_overlap - cos2).abs() < TOL);
    }

    #[test]
    fn attacks_refuse_wrong_schemes() {
        let ce = ConjugateScheme::new(3).unwrap();
        let fce = FConjugateScheme::new(2, 2, PrfModel::Qprf).unwrap();
        let otp = OtpScheme::new(2).unwrap();
        assert!(matches!(copy_attack(&ce), Err(Error::Unsupported(_))));
        assert!(matches!(breidbart_attack(&fce), Err(Error::Unsupported(_))));
        assert!(matches!(breidbart_attack(&otp), Err(Error::Unsupported(_))));
        assert!(matches!(split_measure_attack(&ce), Err(Error::Argument(_))));
        assert!(copy_attack(&otp).is_ok());
        assert!(guess_attack(BitString::zeros(3)).check(&fce).is_err());
    }

    #[test]
    fn produced_channels_and_povms_are_valid() {
        let ce = ConjugateScheme::new(2).unwrap();
        let key = crate::scheme::Key::Conjugate { r: "10".parse().unwrap(), theta: "01".parse().unwrap() };
        let empty = BitString::zeros(0);
        let attacks: [&dyn CloningAttack; 3] =
            [&guess_attack("11".parse().unwrap()), &BreidbartAttack, &SplitMeasureAttack];
        for a in attacks {
            let ch = a.split(&ce, &empty).unwrap();
            assert!(ch.completeness_error() < TOL);
            assert_eq!(ch.out_qubits(), a.b_qubits(&ce) + a.c_qubits(&ce));
            let b = a.decode_b(&ce, &key.reveal(), &empty).unwrap();
            let c = a.decode_c(&ce, &key.reveal(), &empty).unwrap();
            assert_eq!(b.qubits(), a.b_qubits(&ce));
            assert_eq!(c.qubits(), a.c_qubits(&ce));
            // re-validate through the checked constructor
            Povm::new(b.qubits(), b.elements().clone()).unwrap();
            Povm::new(c.qubits(), c.elements().clone()).unwrap();
        }
    }

    #[test]
    fn split_measure_recovers_each_half_with_certainty() {
        let ce = ConjugateScheme::new(4).unwrap();
        let r: BitString = "0110".parse().unwrap();
        let theta: BitString = "1100".parse().unwrap();
        let key = crate::scheme::Key::Conjugate { r: r.clone(), theta: theta.clone() };
        let m: BitString = "1011".parse().unwrap();
        let ct = crate::scheme::ce_enc(&r, &theta, &m).unwrap();
        let empty = BitString::zeros(0);
        let b = SplitMeasureAttack.decode_b(&ce, &key.reveal(), &empty).unwrap();
        // B's register is the first two qubits of a product state
        let first = crate::quantum::wiesner_state(&m.slice(0, 2).xor(&r.slice(0, 2)).unwrap(), &theta.slice(0, 2)).unwrap();
        let dist = b.measure_pure(&first).unwrap();
        assert!((dist[&"1000".parse::<BitString>().unwrap()] - 1.0).abs() < TOL);
        assert_eq!(ct.quantum_qubits(), 4);
    }
}
