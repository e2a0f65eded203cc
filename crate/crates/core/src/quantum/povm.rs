use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::bits::BitString;
use crate::error::{arg_err, Error, Result};
use crate::linalg::{self, check_qubits, is_hermitian, max_abs_diff, min_eigenvalue, projector, Matrix, Vector, TOL};
use crate::quantum::{hadamard_layer, DensityOperator, PureState};

/// A measurement: positive semidefinite elements labelled by bit strings,
/// summing to the identity.
///
/// Labels absent from the map have the zero element.
#[derive(Clone, Debug)]
pub struct Povm {
    qubits: usize,
    elements: BTreeMap<BitString, Matrix>,
}

impl Povm {
    pub fn new(qubits: usize, elements: BTreeMap<BitString, Matrix>) -> Result<Self> {
        check_qubits(qubits)?;
        let d = 1usize << qubits;
        let mut sum = Matrix::zeros(d, d);
        for (label, e) in &elements {
            if e.shape() != (d, d) {
                return Err(arg_err!("POVM element {label} has shape {:?}, expected {d}x{d}", e.shape()));
            }
            if !is_hermitian(e, TOL) {
                return Err(Error::Invalid { what: "POVM", detail: format!("element {label} is not Hermitian") });
            }
            let min = min_eigenvalue(e);
            if min < -TOL {
                return Err(Error::Invalid {
                    what: "POVM",
                    detail: format!("element {label} has eigenvalue {min}"),
                });
            }
            sum += e;
        }
        let err = max_abs_diff(&sum, &linalg::identity(d));
        if err > TOL {
            return Err(Error::Invalid {
                what: "POVM",
                detail: format!("elements sum to identity only within {err:e}"),
            });
        }
        Ok(Self { qubits, elements })
    }

    /// Projective measurement onto an orthonormal basis (columns of
    /// `basis`), column `j` reporting `labels[j]`. Several columns may share a
    /// label.
    pub fn from_basis(basis: &Matrix, labels: &[BitString]) -> Result<Self> {
        if basis.ncols() != labels.len() {
            return Err(arg_err!("{} basis vectors but {} labels", basis.ncols(), labels.len()));
        }
        let qubits =
            linalg::qubits_for_dim(basis.nrows()).ok_or_else(|| arg_err!("basis dimension is not a power of two"))?;
        let mut elements: BTreeMap<BitString, Matrix> = BTreeMap::new();
        for (j, label) in labels.iter().enumerate() {
            let v: Vector = basis.column(j).into_owned();
            let p = projector(&v);
            elements
                .entry(label.clone())
                .and_modify(|e| *e += &p)
                .or_insert(p);
        }
        Self::new(qubits, elements)
    }

    /// Computational basis measurement on `qubits` qubits.
    pub fn computational(qubits: usize) -> Result<Self> {
        Self::relabelled_computational(qubits, |s| s.clone())
    }

    /// Computational basis measurement where outcome `s` is reported as
    /// `relabel(s)`.
    pub fn relabelled_computational(qubits: usize, relabel: impl Fn(&BitString) -> BitString) -> Result<Self> {
        check_qubits(qubits)?;
        let d = 1usize << qubits;
        let mut elements: BTreeMap<BitString, Matrix> = BTreeMap::new();
        for s in BitString::all(qubits) {
            let mut e = Matrix::zeros(d, d);
            e[(s.to_index(), s.to_index())] = linalg::ONE;
            elements.entry(relabel(&s)).and_modify(|acc| *acc += &e).or_insert(e);
        }
        // Diagonal 0/1 entries summing to the identity: valid by construction.
        Ok(Self { qubits, elements })
    }

    /// Measurement in the Wiesner basis `theta`: outcome `s` for `|s^theta>`.
    pub fn wiesner(theta: &BitString) -> Result<Self> {
        let h = hadamard_layer(theta)?;
        Self::from_basis(&h, &BitString::all(theta.len()).collect::<Vec<_>>())
    }

    /// The single-element measurement on zero qubits that always reports
    /// `label`.
    pub fn constant(label: BitString) -> Self {
        let mut elements = BTreeMap::new();
        elements.insert(label, linalg::identity(1));
        Self { qubits: 0, elements }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    pub fn elements(&self) -> &BTreeMap<BitString, Matrix> {
        &self.elements
    }

    pub fn element(&self, label: &BitString) -> Option<&Matrix> {
        self.elements.get(label)
    }

    /// Element for `label`, the zero matrix when absent.
    pub fn element_or_zero(&self, label: &BitString) -> Matrix {
        self.elements.get(label).cloned().unwrap_or_else(|| Matrix::zeros(self.dim(), self.dim()))
    }

    fn check_dim(&self, qubits: usize) -> Result<()> {
        if qubits != self.qubits {
            return Err(arg_err!("POVM on {} qubits applied to {} qubits", self.qubits, qubits));
        }
        Ok(())
    }

    /// Outcome distribution `Tr[E_y rho]`.
    pub fn measure(&self, rho: &DensityOperator) -> Result<BTreeMap<BitString, f64>> {
        self.check_dim(rho.qubits())?;
        Ok(self
            .elements
            .iter()
            .map(|(label, e)| (label.clone(), (e * rho.matrix()).trace().re))
            .collect())
    }

    pub fn measure_pure(&self, psi: &PureState) -> Result<BTreeMap<BitString, f64>> {
        self.check_dim(psi.qubits())?;
        let v = psi.amplitudes();
        Ok(self
            .elements
            .iter()
            .map(|(label, e)| (label.clone(), v.dotc(&(e * v)).re))
            .collect())
    }

    /// Draws one outcome from [`Povm::measure`].
    pub fn sample<R: Rng + ?Sized>(&self, rho: &DensityOperator, rng: &mut R) -> Result<BitString> {
        let dist = self.measure(rho)?;
        Ok(sample_distribution(&dist, rng))
    }
}

/// Draws a label from a (possibly slightly unnormalised) distribution.
pub fn sample_distribution<R: Rng + ?Sized>(dist: &BTreeMap<BitString, f64>, rng: &mut R) -> BitString {
    let total: f64 = dist.values().map(|p| p.max(0.0)).sum();
    let mut u = rng.random::<f64>() * total;
    let mut last = None;
    for (label, &p) in dist {
        let p = p.max(0.0);
        if p > 0.0 {
            last = Some(label);
            if u < p {
                return label.clone();
            }
            u -= p;
        }
    }
    last.expect("distribution has positive mass").clone()
}

/// Free-function form of [`Povm::measure`].
pub fn measure(rho: &DensityOperator, povm: &Povm) -> Result<BTreeMap<BitString, f64>> {
    povm.measure(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::quantum::wiesner_state;
    use rand::SeedableRng;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn computational_on_plus_is_uniform() {
        let plus = wiesner_state(&bs("0"), &bs("1")).unwrap().to_density();
        let dist = Povm::computational(1).unwrap().measure(&plus).unwrap();
        assert!((dist[&bs("0")] - 0.5).abs() < TOL);
        assert!((dist[&bs("1")] - 0.5).abs() < TOL);
    }

    #[test]
    fn wiesner_basis_recovers_x() {
        for theta in BitString::all(3) {
            let povm = Povm::wiesner(&theta).unwrap();
            for x in BitString::all(3) {
                let rho = wiesner_state(&x, &theta).unwrap().to_density();
                let dist = povm.measure(&rho).unwrap();
                assert!((dist[&x] - 1.0).abs() < TOL);
            }
        }
    }

    #[test]
    fn computational_on_minus_is_uniform() {
        let minus = wiesner_state(&bs("1"), &bs("1")).unwrap();
        let dist = Povm::computational(1).unwrap().measure_pure(&minus).unwrap();
        assert!((dist[&bs("0")] - 0.5).abs() < TOL && (dist[&bs("1")] - 0.5).abs() < TOL);
    }

    #[test]
    fn rejects_invalid_elements() {
        let mut incomplete = BTreeMap::new();
        incomplete.insert(bs("0"), linalg::identity(2) * c(0.5));
        assert!(matches!(Povm::new(1, incomplete), Err(Error::Invalid { .. })));

        let mut negative = BTreeMap::new();
        negative.insert(bs("0"), Matrix::from_row_slice(2, 2, &[c(1.5), c(0.0), c(0.0), c(-0.2)]));
        negative.insert(bs("1"), Matrix::from_row_slice(2, 2, &[c(-0.5), c(0.0), c(0.0), c(1.2)]));
        assert!(matches!(Povm::new(1, negative), Err(Error::Invalid { .. })));
    }

    #[test]
    fn dimension_mismatch_is_an_argument_error() {
        let rho = wiesner_state(&bs("01"), &bs("00")).unwrap().to_density();
        assert!(matches!(Povm::computational(1).unwrap().measure(&rho), Err(Error::Argument(_))));
    }

    #[test]
    fn sampling_is_seeded_and_follows_support() {
        let rho = wiesner_state(&bs("10"), &bs("00")).unwrap().to_density();
        let povm = Povm::computational(2).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            assert_eq!(povm.sample(&rho, &mut rng).unwrap(), bs("10"));
        }
    }
}
