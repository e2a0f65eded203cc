//! Attack strategies against QECM schemes.
//!
//! A cloning attack is a splitting channel from the quantum ciphertext
//! register to two registers `B (x) C`, followed by two decoders that receive
//! the key once it is announced. The classical part of a ciphertext can be
//! copied freely, so it is handed to both the splitter and both decoders;
//! this loses no generality.
//!
//! Decoders are POVMs whose labels are `n`-bit message guesses (cloning) or
//! single bits (distinguishing).

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use crate::bits::BitString;
use crate::error::Result;
use crate::quantum::{KrausChannel, Povm};
use crate::scheme::{Qecm, RevealedKey};

mod cloning;
mod distinguishing;
mod moe;

pub use cloning::{
    breidbart_attack, breidbart_vector, copy_attack, guess_attack, split_measure_attack, BreidbartAttack, CopyAttack,
    GuessAttack, SplitMeasureAttack,
};
pub use distinguishing::{
    constant_bit_attack, half_split_distinguisher, key_leak_distinguisher, random_cd_attack, random_coin_distinguisher,
    random_distinguisher, transform_cd_to_cloning, trivial_cd_attack, ExplicitCdAttack, ExplicitDistinguisher,
    GenBranch, TransformedAttack,
};
pub use moe::{seesaw_optimize_moe, MoeResource, MoeStrategy, SeesawOutcome};

/// Def of a cloning attack: split, then two keyed decoders.
pub trait CloningAttack: Send + Sync {
    fn name(&self) -> String;

    /// Fails when the attack cannot be run against `scheme`.
    fn check(&self, scheme: &dyn Qecm) -> Result<()>;

    fn b_qubits(&self, scheme: &dyn Qecm) -> usize;
    fn c_qubits(&self, scheme: &dyn Qecm) -> usize;

    /// Channel from the quantum ciphertext to `B (x) C` (B first).
    fn split(&self, scheme: &dyn Qecm, classical: &BitString) -> Result<KrausChannel>;

    fn decode_b(&self, scheme: &dyn Qecm, key: &RevealedKey<'_>, classical: &BitString) -> Result<Povm>;
    fn decode_c(&self, scheme: &dyn Qecm, key: &RevealedKey<'_>, classical: &BitString) -> Result<Povm>;
}

/// A cloning-distinguishing attack: a generator preparing a side register
/// `S` together with a candidate message, a split of `S (x) T` and two
/// bit-valued decoders.
pub trait CloningDistinguishingAttack: Send + Sync {
    fn name(&self) -> String;
    fn check(&self, scheme: &dyn Qecm) -> Result<()>;
    fn s_qubits(&self) -> usize;
    fn b_qubits(&self) -> usize;
    fn c_qubits(&self) -> usize;

    /// The generator after measuring its message register.
    fn generate(&self) -> &[GenBranch];

    /// Channel from `S (x) T` to `B (x) C`.
    fn split(&self, scheme: &dyn Qecm, classical: &BitString) -> Result<KrausChannel>;

    fn decode_b(&self, scheme: &dyn Qecm, key: &RevealedKey<'_>, classical: &BitString) -> Result<Povm>;
    fn decode_c(&self, scheme: &dyn Qecm, key: &RevealedKey<'_>, classical: &BitString) -> Result<Povm>;
}

/// A single-party distinguishing attack.
pub trait DistinguishingAttack: Send + Sync {
    fn name(&self) -> String;
    fn check(&self, scheme: &dyn Qecm) -> Result<()>;
    fn s_qubits(&self) -> usize;
    fn generate(&self) -> &[GenBranch];

    /// Whether the game should hand the key to [`Self::decide`]. Only
    /// sanity controls set this.
    fn uses_leaked_key(&self) -> bool {
        false
    }

    /// Bit-valued measurement on `S (x) T`.
    fn decide(&self, scheme: &dyn Qecm, classical: &BitString, leaked: Option<&RevealedKey<'_>>) -> Result<Povm>;
}

/// Every shipped cloning attack that applies to `scheme`.
pub fn shipped_attacks(scheme: &dyn Qecm) -> Vec<Box<dyn CloningAttack>> {
    let mut out: Vec<Box<dyn CloningAttack>> = Vec::new();
    if let Ok(a) = copy_attack(scheme) {
        out.push(Box::new(a));
    }
    out.push(Box::new(guess_attack(BitString::zeros(scheme.message_bits()))));
    if let Ok(a) = breidbart_attack(scheme) {
        out.push(Box::new(a));
    }
    if let Ok(a) = split_measure_attack(scheme) {
        out.push(Box::new(a));
    }
    out
}

pub(crate) fn bit_label(b: bool) -> BitString {
    BitString::new(alloc::vec![b])
}
