use alloc::format;
use alloc::vec::Vec;

use crate::error::{arg_err, Error, Result};
use crate::linalg::{self, check_qubits, kron, max_abs_diff, Matrix, Vector, TOL};
use crate::quantum::{DensityOperator, PureState};

/// A CPTP map given by Kraus operators `K_i : 2^in -> 2^out`.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    ops: Vec<Matrix>,
    in_qubits: usize,
    out_qubits: usize,
}

impl KrausChannel {
    /// Validates shapes and trace preservation `sum K^dagger K = I`.
    pub fn new(ops: Vec<Matrix>, in_qubits: usize, out_qubits: usize) -> Result<Self> {
        check_qubits(in_qubits)?;
        check_qubits(out_qubits)?;
        if ops.is_empty() {
            return Err(arg_err!("a channel needs at least one Kraus operator"));
        }
        let (rows, cols) = (1usize << out_qubits, 1usize << in_qubits);
        let mut sum = Matrix::zeros(cols, cols);
        for (i, k) in ops.iter().enumerate() {
            if k.shape() != (rows, cols) {
                return Err(arg_err!("Kraus operator {i} has shape {:?}, expected {:?}", k.shape(), (rows, cols)));
            }
            sum += k.adjoint() * k;
        }
        let err = max_abs_diff(&sum, &linalg::identity(cols));
        if err > TOL {
            return Err(Error::Invalid {
                what: "Kraus channel",
                detail: format!("sum of K^dagger K deviates from identity by {err:e}"),
            });
        }
        Ok(Self { ops, in_qubits, out_qubits })
    }

    pub fn identity(qubits: usize) -> Result<Self> {
        Self::new(alloc::vec![linalg::identity(1 << qubits)], qubits, qubits)
    }

    pub fn unitary(u: Matrix) -> Result<Self> {
        let q = linalg::qubits_for_dim(u.nrows()).ok_or_else(|| arg_err!("unitary dimension is not a power of two"))?;
        Self::new(alloc::vec![u], q, q)
    }

    /// Traces out the whole input; output is the trivial one-dimensional
    /// system.
    pub fn discard(qubits: usize) -> Result<Self> {
        check_qubits(qubits)?;
        let d = 1usize << qubits;
        let ops = (0..d).map(|i| Matrix::from_fn(1, d, |_, j| if i == j { linalg::ONE } else { linalg::ZERO })).collect();
        // the rows <i| sum to the identity exactly
        Ok(Self { ops, in_qubits: qubits, out_qubits: 0 })
    }

    pub fn ops(&self) -> &[Matrix] {
        &self.ops
    }

    pub fn in_qubits(&self) -> usize {
        self.in_qubits
    }

    pub fn out_qubits(&self) -> usize {
        self.out_qubits
    }

    fn check_input(&self, qubits: usize) -> Result<()> {
        if qubits != self.in_qubits {
            return Err(arg_err!("channel expects {} input qubits, got {}", self.in_qubits, qubits));
        }
        Ok(())
    }

    /// `sum_i K_i rho K_i^dagger`.
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        self.check_input(rho.qubits())?;
        let mut out = Matrix::zeros(1 << self.out_qubits, 1 << self.out_qubits);
        for k in &self.ops {
            out += k * rho.matrix() * k.adjoint();
        }
        Ok(DensityOperator::from_parts_unchecked(out, self.out_qubits))
    }

    /// Unnormalised branches `K_i |psi>`; their squared norms sum to one.
    pub fn branches(&self, psi: &PureState) -> Result<Vec<Vector>> {
        self.check_input(psi.qubits())?;
        Ok(self.ops.iter().map(|k| k * psi.amplitudes()).collect())
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &KrausChannel) -> Result<KrausChannel> {
        if next.in_qubits != self.out_qubits {
            return Err(arg_err!("cannot compose: {} output qubits into {} input qubits", self.out_qubits, next.in_qubits));
        }
        let ops = next.ops.iter().flat_map(|b| self.ops.iter().map(move |a| b * a)).collect();
        Ok(Self { ops, in_qubits: self.in_qubits, out_qubits: next.out_qubits })
    }

    /// `Id_{left} (x) self`.
    pub fn extend_left(&self, left_qubits: usize) -> Result<KrausChannel> {
        check_qubits(left_qubits + self.in_qubits.max(self.out_qubits))?;
        let id = linalg::identity(1 << left_qubits);
        let ops = self.ops.iter().map(|k| kron(&id, k)).collect();
        Ok(Self { ops, in_qubits: left_qubits + self.in_qubits, out_qubits: left_qubits + self.out_qubits })
    }

    /// `self (x) other` acting on disjoint registers.
    pub fn parallel(&self, other: &KrausChannel) -> Result<KrausChannel> {
        check_qubits(self.in_qubits + other.in_qubits)?;
        check_qubits(self.out_qubits + other.out_qubits)?;
        let ops = self.ops.iter().flat_map(|a| other.ops.iter().map(move |b| kron(a, b))).collect();
        Ok(Self {
            ops,
            in_qubits: self.in_qubits + other.in_qubits,
            out_qubits: self.out_qubits + other.out_qubits,
        })
    }

    /// Reorders output qubits: new output qubit `p` is old output qubit
    /// `order[p]`.
    pub fn permute_outputs(&self, order: &[usize]) -> Result<KrausChannel> {
        let mut sorted = order.to_vec();
        sorted.sort_unstable();
        if sorted != (0..self.out_qubits).collect::<Vec<_>>() {
            return Err(arg_err!("{order:?} is not a permutation of {} output qubits", self.out_qubits));
        }
        let ops = self.ops.iter().map(|k| linalg::permute_rows(k, self.out_qubits, order)).collect();
        Ok(Self { ops, in_qubits: self.in_qubits, out_qubits: self.out_qubits })
    }

    /// Trace-preservation defect `max |sum K^dagger K - I|`.
    pub fn completeness_error(&self) -> f64 {
        let d = 1usize << self.in_qubits;
        let sum = self.ops.iter().fold(Matrix::zeros(d, d), |acc, k| acc + k.adjoint() * k);
        max_abs_diff(&sum, &linalg::identity(d))
    }
}

/// Free-function form of [`KrausChannel::apply`].
pub fn apply_channel(ch: &KrausChannel, rho: &DensityOperator) -> Result<DensityOperator> {
    ch.apply(rho)
}
