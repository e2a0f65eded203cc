use alloc::format;
use alloc::vec::Vec;

use crate::bits::BitString;
use crate::error::{arg_err, Error, Result};
use crate::linalg::{
    self, c, check_qubits, hadamard, hermitian_eigen, is_hermitian, kron, kron_vec,
    partial_trace_qubits, projector, Matrix, Vector, C64, ONE, TOL, ZERO,
};

/// A normalised state vector on `qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vector,
    qubits: usize,
}

impl PureState {
    pub fn new(amplitudes: Vector) -> Result<Self> {
        let qubits = linalg::qubits_for_dim(amplitudes.len())
            .ok_or_else(|| arg_err!("state dimension {} is not a power of two", amplitudes.len()))?;
        check_qubits(qubits)?;
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > TOL {
            return Err(Error::Invalid { what: "pure state", detail: format!("norm {norm}") });
        }
        Ok(Self { amplitudes, qubits })
    }

    pub fn from_amplitudes(amplitudes: &[C64]) -> Result<Self> {
        Self::new(Vector::from_column_slice(amplitudes))
    }

    /// Normalises a nonzero vector.
    pub fn normalized(v: Vector) -> Result<Self> {
        let norm = v.norm();
        if norm < 1e-300 {
            return Err(arg_err!("cannot normalise the zero vector"));
        }
        Self::new(v / c(norm))
    }

    /// Computational basis state `|bits>`.
    pub fn basis(bits: &BitString) -> Result<Self> {
        check_qubits(bits.len())?;
        let mut v = Vector::zeros(1 << bits.len());
        v[bits.to_index()] = ONE;
        Ok(Self { amplitudes: v, qubits: bits.len() })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &Vector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vector {
        self.amplitudes
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn to_density(&self) -> DensityOperator {
        DensityOperator { matrix: projector(&self.amplitudes), qubits: self.qubits }
    }

    pub(crate) fn from_parts_unchecked(amplitudes: Vector, qubits: usize) -> Self {
        Self { amplitudes, qubits }
    }
}

/// A positive, unit-trace operator on `qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    matrix: Matrix,
    qubits: usize,
}

impl DensityOperator {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(arg_err!("density matrix must be square"));
        }
        let qubits = linalg::qubits_for_dim(matrix.nrows())
            .ok_or_else(|| arg_err!("dimension {} is not a power of two", matrix.nrows()))?;
        check_qubits(qubits)?;
        let invalid = |detail| Error::Invalid { what: "density operator", detail };
        if !is_hermitian(&matrix, TOL) {
            return Err(invalid("not Hermitian".into()));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TOL || tr.im.abs() > TOL {
            return Err(invalid(format!("trace {tr}")));
        }
        let min = hermitian_eigen(&matrix).0.last().copied().unwrap_or(0.0);
        if min < -TOL {
            return Err(invalid(format!("negative eigenvalue {min}")));
        }
        Ok(Self { matrix, qubits })
    }

    /// `I / 2^qubits`.
    pub fn maximally_mixed(qubits: usize) -> Result<Self> {
        check_qubits(qubits)?;
        let d = 1 << qubits;
        Ok(Self { matrix: linalg::identity(d) * c(1.0 / d as f64), qubits })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Reduced state on the qubits in `keep` (0-based, order preserved).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityOperator> {
        let matrix = partial_trace_qubits(&self.matrix, self.qubits, keep)?;
        Ok(Self { matrix, qubits: keep.len() })
    }

    /// `Tr[op * rho]` for a Hermitian observable.
    pub fn expectation(&self, op: &Matrix) -> Result<f64> {
        if op.shape() != self.matrix.shape() {
            return Err(arg_err!(
                "operator {:?} does not match state dimension {}",
                op.shape(),
                self.dim()
            ));
        }
        Ok((op * &self.matrix).trace().re)
    }

    pub(crate) fn from_parts_unchecked(matrix: Matrix, qubits: usize) -> Self {
        Self { matrix, qubits }
    }
}

/// Kronecker product of two states of the same kind; `self` precedes `other`.
pub trait Tensor: Sized {
    fn tensor(&self, other: &Self) -> Result<Self>;
}

impl Tensor for PureState {
    fn tensor(&self, other: &Self) -> Result<Self> {
        let qubits = self.qubits + other.qubits;
        check_qubits(qubits)?;
        Ok(Self { amplitudes: kron_vec(&self.amplitudes, &other.amplitudes), qubits })
    }
}

impl Tensor for DensityOperator {
    fn tensor(&self, other: &Self) -> Result<Self> {
        let qubits = self.qubits + other.qubits;
        check_qubits(qubits)?;
        Ok(Self { matrix: kron(&self.matrix, &other.matrix), qubits })
    }
}

pub fn tensor<T: Tensor>(a: &T, b: &T) -> Result<T> {
    a.tensor(b)
}

/// Single-qubit `H^theta |x>`.
fn wiesner_qubit(x: bool, theta: bool) -> Vector {
    let basis = if x { Vector::from_vec(alloc::vec![ZERO, ONE]) } else { Vector::from_vec(alloc::vec![ONE, ZERO]) };
    if theta {
        hadamard() * basis
    } else {
        basis
    }
}

/// The Wiesner state `|x^theta> = H^{theta_1}|x_1> (x) ... (x) H^{theta_n}|x_n>`.
pub fn wiesner_state(x: &BitString, theta: &BitString) -> Result<PureState> {
    if x.len() != theta.len() {
        return Err(arg_err!("wiesner state needs |x| = |theta|, got {} and {}", x.len(), theta.len()));
    }
    if x.is_empty() {
        return Err(arg_err!("wiesner state needs at least one qubit"));
    }
    check_qubits(x.len())?;
    let mut v = Vector::from_element(1, ONE);
    for i in 0..x.len() {
        v = kron_vec(&v, &wiesner_qubit(x.bit(i), theta.bit(i)));
    }
    Ok(PureState { amplitudes: v, qubits: x.len() })
}

/// `2^{-n/2} sum_x |x>|x>` on `2n` qubits; the first `n` form register A.
pub fn epr_state(n: usize) -> Result<PureState> {
    if n == 0 {
        return Err(arg_err!("EPR state needs n >= 1"));
    }
    check_qubits(2 * n)?;
    let d = 1usize << n;
    let mut v = Vector::zeros(d * d);
    let amp = c(1.0 / libm::sqrt(d as f64));
    for x in 0..d {
        v[x * d + x] = amp;
    }
    Ok(PureState { amplitudes: v, qubits: 2 * n })
}

/// `H^theta` applied qubit-wise.
pub fn hadamard_layer(theta: &BitString) -> Result<Matrix> {
    check_qubits(theta.len())?;
    let mut m = Matrix::from_element(1, 1, ONE);
    let id = linalg::identity(2);
    let h = hadamard();
    for &t in theta.bits() {
        m = kron(&m, if t { &h } else { &id });
    }
    Ok(m)
}

/// Outcome probabilities of measuring `psi` in the Wiesner basis `theta`,
/// indexed by the outcome string's index. Applies `H^theta` qubit by qubit
/// instead of building the basis.
pub fn wiesner_probabilities(psi: &PureState, theta: &BitString) -> Result<Vec<f64>> {
    if theta.len() != psi.qubits() {
        return Err(arg_err!("basis has {} qubits, state has {}", theta.len(), psi.qubits()));
    }
    let q = psi.qubits();
    let mut v: Vec<C64> = psi.amplitudes().iter().copied().collect();
    let h = c(core::f64::consts::FRAC_1_SQRT_2);
    for (qubit, &t) in theta.bits().iter().enumerate() {
        if !t {
            continue;
        }
        let stride = 1usize << (q - 1 - qubit);
        for i in 0..v.len() {
            if i & stride == 0 {
                let (a, b) = (v[i], v[i | stride]);
                v[i] = (a + b) * h;
                v[i | stride] = (a - b) * h;
            }
        }
    }
    Ok(v.iter().map(|a| a.norm_sqr()).collect())
}

/// Columns are the Wiesner basis `{|s^theta>}` in index order of `s`.
pub fn wiesner_basis(theta: &BitString) -> Result<Vec<PureState>> {
    BitString::all(theta.len()).map(|s| wiesner_state(&s, theta)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn assert_amps(state: &PureState, expected: &[f64]) {
        assert_eq!(state.dim(), expected.len());
        for (a, e) in state.amplitudes().iter().zip(expected) {
            assert!(nalgebra::ComplexField::modulus(a - c(*e)) < 1e-12, "{a} vs {e}");
        }
    }

    #[test]
    fn wiesner_examples() {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        assert_amps(&wiesner_state(&bs("0"), &bs("0")).unwrap(), &[1.0, 0.0]);
        assert_amps(&wiesner_state(&bs("1"), &bs("1")).unwrap(), &[h, -h]);
        // H|0> (x) |1>
        assert_amps(&wiesner_state(&bs("01"), &bs("10")).unwrap(), &[0.0, h, 0.0, h]);
    }

    #[test]
    fn wiesner_rejects_length_mismatch() {
        assert!(matches!(wiesner_state(&bs("01"), &bs("1")), Err(Error::Argument(_))));
        assert!(wiesner_state(&bs(""), &bs("")).is_err());
    }

    #[test]
    fn epr_examples() {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        assert_amps(&epr_state(1).unwrap(), &[h, 0.0, 0.0, h]);
        let e2 = epr_state(2).unwrap();
        for (i, a) in e2.amplitudes().iter().enumerate() {
            let expected = if [0, 5, 10, 15].contains(&i) { 0.5 } else { 0.0 };
            assert_eq!(*a, c(expected));
        }
        assert!((epr_state(3).unwrap().amplitudes().norm() - 1.0).abs() < 1e-12);
        assert!(epr_state(0).is_err());
    }

    #[test]
    fn tensor_examples() {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let zero = PureState::basis(&bs("0")).unwrap();
        let one = PureState::basis(&bs("1")).unwrap();
        assert_amps(&tensor(&zero, &one).unwrap(), &[0.0, 1.0, 0.0, 0.0]);
        let plus = wiesner_state(&bs("0"), &bs("1")).unwrap();
        assert_amps(&tensor(&plus, &one).unwrap(), &[0.0, h, 0.0, h]);
        let rho = plus.to_density();
        let sigma = DensityOperator::maximally_mixed(2).unwrap();
        let joint = tensor(&rho, &sigma).unwrap();
        assert_eq!(joint.qubits(), 3);
        assert!((joint.trace() - 1.0).abs() < TOL);
    }

    #[test]
    fn epr_marginal_is_maximally_mixed() {
        let rho = epr_state(1).unwrap().to_density();
        let reduced = rho.partial_trace(&[0]).unwrap();
        let mixed = DensityOperator::maximally_mixed(1).unwrap();
        assert!(linalg::max_abs_diff(reduced.matrix(), mixed.matrix()) < TOL);
        assert!(rho.partial_trace(&[2]).is_err());
    }

    #[test]
    fn partial_trace_recovers_first_factor() {
        let rho = wiesner_state(&bs("1"), &bs("1")).unwrap().to_density();
        let sigma = DensityOperator::maximally_mixed(1).unwrap();
        let joint = rho.tensor(&sigma).unwrap();
        let back = joint.partial_trace(&[0]).unwrap();
        assert!(linalg::max_abs_diff(back.matrix(), rho.matrix()) < TOL);
        assert!((back.trace() - 1.0).abs() < TOL);
    }

    #[test]
    fn density_validation() {
        let bad_trace = linalg::identity(2);
        assert!(DensityOperator::new(bad_trace).is_err());
        let negative = Matrix::from_row_slice(2, 2, &[c(1.5), c(0.0), c(0.0), c(-0.5)]);
        assert!(DensityOperator::new(negative).is_err());
        let not_herm = Matrix::from_row_slice(2, 2, &[c(0.5), c(0.3), c(0.0), c(0.5)]);
        assert!(DensityOperator::new(not_herm).is_err());
    }

    #[test]
    fn register_cap_is_enforced() {
        assert!(matches!(epr_state(8), Err(Error::Capacity(_))));
        assert!(matches!(PureState::basis(&BitString::zeros(15)), Err(Error::Capacity(_))));
    }
}
