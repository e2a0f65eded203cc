//! Monogamy-of-entanglement game strategies.
//!
//! Alice holds `lambda` qubits of a tripartite state, picks a uniform basis
//! `theta`, measures in the Wiesner basis and announces `theta`; Bob and
//! Charlie must both name her outcome. A strategy is either a state on
//! `A (x) B (x) C` with per-`theta` measurements (state form), or a channel
//! applied to Alice's Wiesner state (channel form). The two are related by
//! applying the channel to half of a maximally entangled state.

use alloc::vec::Vec;

use rand::Rng;

use super::cloning::breidbart_broadcast;
use crate::bits::BitString;
use crate::error::{arg_err, Result};
use crate::linalg::{
    bipartite_expectation, c, check_qubits, hermitian_eigen, kron, polar_unitary, projector, qubits_for_dim, Matrix,
    Vector, TOL,
};
use crate::quantum::{epr_state, wiesner_state, DensityOperator, KrausChannel, Povm};
use crate::random::{random_density, random_povm, random_unitary, seeded, SimRng};

#[derive(Clone, Debug)]
pub enum MoeResource {
    /// State on `A (x) B (x) C`, Alice's `lambda` qubits first.
    State(DensityOperator),
    /// Channel from Alice's `lambda` qubits to `B (x) C`.
    Channel(KrausChannel),
}

#[derive(Clone, Debug)]
pub struct MoeStrategy {
    lambda: usize,
    b_qubits: usize,
    c_qubits: usize,
    /// Indexed by the basis string's index.
    b: Vec<Povm>,
    c: Vec<Povm>,
    resource: MoeResource,
}

impl MoeStrategy {
    pub fn new(lambda: usize, resource: MoeResource, b: Vec<Povm>, c: Vec<Povm>) -> Result<Self> {
        if lambda == 0 {
            return Err(arg_err!("lambda must be positive"));
        }
        let bases = 1usize << lambda;
        if b.len() != bases || c.len() != bases {
            return Err(arg_err!("need one measurement per basis: {bases}, got {} and {}", b.len(), c.len()));
        }
        let b_qubits = b[0].qubits();
        let c_qubits = c[0].qubits();
        for p in b.iter().chain(&c) {
            if p.elements().keys().any(|k| k.len() != lambda) {
                return Err(arg_err!("measurement outcomes must be {lambda}-bit strings"));
            }
        }
        if b.iter().any(|p| p.qubits() != b_qubits) || c.iter().any(|p| p.qubits() != c_qubits) {
            return Err(arg_err!("all of a party's measurements must act on the same register"));
        }
        match &resource {
            MoeResource::State(rho) if rho.qubits() != lambda + b_qubits + c_qubits => {
                return Err(arg_err!(
                    "state has {} qubits, expected {lambda} + {b_qubits} + {c_qubits}",
                    rho.qubits()
                ));
            }
            MoeResource::Channel(ch) if ch.in_qubits() != lambda || ch.out_qubits() != b_qubits + c_qubits => {
                return Err(arg_err!(
                    "channel maps {} to {} qubits, expected {lambda} to {}",
                    ch.in_qubits(),
                    ch.out_qubits(),
                    b_qubits + c_qubits
                ));
            }
            _ => {}
        }
        Ok(Self { lambda, b_qubits, c_qubits, b, c, resource })
    }

    /// Breidbart measurement broadcast to both parties, who report the
    /// outcome whatever the basis.
    pub fn breidbart(lambda: usize) -> Result<Self> {
        let povms = (0..1usize << lambda).map(|_| Povm::computational(lambda)).collect::<Result<Vec<_>>>()?;
        Self::new(lambda, MoeResource::Channel(breidbart_broadcast(lambda)?), povms.clone(), povms)
    }

    /// Both parties always answer `0^lambda`.
    pub fn trivial(lambda: usize) -> Result<Self> {
        let povms: Vec<Povm> = (0..1usize << lambda).map(|_| Povm::constant(BitString::zeros(lambda))).collect();
        Self::new(lambda, MoeResource::Channel(KrausChannel::discard(lambda)?), povms.clone(), povms)
    }

    /// Random mixed state with random POVMs.
    pub fn random<R: Rng + ?Sized>(lambda: usize, b_qubits: usize, c_qubits: usize, rng: &mut R) -> Result<Self> {
        check_qubits(lambda + b_qubits + c_qubits)?;
        let labels: Vec<BitString> = BitString::all(lambda).collect();
        let rho = random_density(lambda + b_qubits + c_qubits, 2, rng)?;
        let mut side = |q| (0..1usize << lambda).map(|_| random_povm(q, &labels, rng)).collect::<Result<Vec<_>>>();
        let b = side(b_qubits)?;
        let c = side(c_qubits)?;
        Self::new(lambda, MoeResource::State(rho), b, c)
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }
    pub fn b_qubits(&self) -> usize {
        self.b_qubits
    }
    pub fn c_qubits(&self) -> usize {
        self.c_qubits
    }
    pub fn b_povms(&self) -> &[Povm] {
        &self.b
    }
    pub fn c_povms(&self) -> &[Povm] {
        &self.c
    }
    pub fn resource(&self) -> &MoeResource {
        &self.resource
    }

    /// Equivalent state-form strategy: the channel applied to the second half
    /// of `lambda` EPR pairs.
    pub fn to_state_form(&self) -> Result<Self> {
        match &self.resource {
            MoeResource::State(_) => Ok(self.clone()),
            MoeResource::Channel(ch) => {
                let epr = epr_state(self.lambda)?.to_density();
                let rho = ch.extend_left(self.lambda)?.apply(&epr)?;
                Self::new(self.lambda, MoeResource::State(rho), self.b.clone(), self.c.clone())
            }
        }
    }

    /// Winning probability conditioned on basis `theta`.
    pub fn value_given_basis(&self, theta_index: usize) -> Result<f64> {
        if theta_index >= self.b.len() {
            return Err(arg_err!("basis index {theta_index} out of range"));
        }
        let theta = BitString::from_index(theta_index as u64, self.lambda);
        let (b, cm) = (&self.b[theta_index], &self.c[theta_index]);
        let mut total = 0.0;
        for x in BitString::all(self.lambda) {
            let bx = b.element_or_zero(&x);
            let cx = cm.element_or_zero(&x);
            let psi = wiesner_state(&x, &theta)?;
            match &self.resource {
                MoeResource::Channel(ch) => {
                    let w: f64 = ch.branches(&psi)?.iter().map(|phi| bipartite_expectation(phi, &bx, &cx)).sum();
                    total += w / (1u64 << self.lambda) as f64;
                }
                MoeResource::State(rho) => {
                    let op = kron(&psi.to_density().matrix().clone(), &kron(&bx, &cx));
                    total += trace_product(&op, rho.matrix());
                }
            }
        }
        Ok(total)
    }

    /// `E_theta` of [`Self::value_given_basis`].
    pub fn value(&self) -> Result<f64> {
        let bases = self.b.len();
        let mut total = 0.0;
        for t in 0..bases {
            total += self.value_given_basis(t)?;
        }
        Ok(total / bases as f64)
    }
}

/// `Re Tr[a b]`.
fn trace_product(a: &Matrix, b: &Matrix) -> f64 {
    let mut s = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            s += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    s
}

// ---------------------------------------------------------------------------
// Seesaw

/// Result of [`seesaw_optimize_moe`].
#[derive(Clone, Debug)]
pub struct SeesawOutcome {
    pub strategy: MoeStrategy,
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Value after each full sweep; nondecreasing.
    pub history: Vec<f64>,
}

/// Rank-one projective measurement: column `j` of `basis` reports
/// `labels[j]`.
#[derive(Clone)]
struct Side {
    basis: Matrix,
    labels: Vec<BitString>,
}

impl Side {
    fn random(dim: usize, lambda: usize, rng: &mut SimRng) -> Self {
        let labels = (0..dim).map(|_| BitString::random(lambda, rng)).collect();
        Self { basis: random_unitary(dim, rng), labels }
    }

    fn element(&self, x: &BitString) -> Matrix {
        let d = self.basis.nrows();
        let mut e = Matrix::zeros(d, d);
        for (j, l) in self.labels.iter().enumerate() {
            if l == x {
                e += projector(&self.basis.column(j).into_owned());
            }
        }
        e
    }

    fn to_povm(&self) -> Result<Povm> {
        Povm::from_basis(&self.basis, &self.labels)
    }

    /// One minorize-maximize step on `sum_j <v_j|Q_{x(j)}|v_j>`: relabel each
    /// vector to its best outcome, then replace the basis by the unitary
    /// maximizing the linearized objective. Never decreases the objective.
    fn improve(&mut self, q: &[(BitString, Matrix)]) {
        let dim = self.basis.nrows();
        let mut g = Matrix::zeros(dim, dim);
        for j in 0..dim {
            let v: Vector = self.basis.column(j).into_owned();
            let mut best = (f64::NEG_INFINITY, 0usize);
            for (i, (_, qx)) in q.iter().enumerate() {
                let score = v.dotc(&(qx * &v)).re;
                if score > best.0 + 1e-15 {
                    best = (score, i);
                }
            }
            self.labels[j] = q[best.1].0.clone();
            g.set_column(j, &(&q[best.1].1 * &v));
        }
        if g.iter().any(|z| z.norm_sqr() > 0.0) {
            self.basis = polar_unitary(&g);
        }
    }
}

struct Problem {
    lambda: usize,
    db: usize,
    dc: usize,
    /// Wiesner projectors per basis index, per outcome index.
    alice: Vec<Vec<Matrix>>,
}

impl Problem {
    fn payoff(&self, b: &[Side], c: &[Side]) -> Matrix {
        let bases = self.alice.len();
        let d = (1usize << self.lambda) * self.db * self.dc;
        let mut w = Matrix::zeros(d, d);
        for t in 0..bases {
            for (xi, p) in self.alice[t].iter().enumerate() {
                let x = BitString::from_index(xi as u64, self.lambda);
                let (bx, cx) = (b[t].element(&x), c[t].element(&x));
                if bx.iter().all(|z| z.norm_sqr() == 0.0) || cx.iter().all(|z| z.norm_sqr() == 0.0) {
                    continue;
                }
                w += kron(p, &kron(&bx, &cx));
            }
        }
        w * crate::linalg::c(1.0 / bases as f64)
    }

    fn value(&self, phi: &Vector, b: &[Side], c: &[Side]) -> f64 {
        phi.dotc(&(self.payoff(b, c) * phi)).re
    }

    fn top_state(&self, b: &[Side], c: &[Side]) -> Vector {
        let (_, vectors) = hermitian_eigen(&self.payoff(b, c));
        vectors.column(0).into_owned()
    }

    /// Effective operators `Q_x` on B (or C when `for_c`) for basis `t`.
    fn effective(&self, phi: &Vector, t: usize, other: &Side, for_c: bool) -> Vec<(BitString, Matrix)> {
        let (da, db, dc) = (1usize << self.lambda, self.db, self.dc);
        let at = |a: usize, b: usize, c: usize| (a * db + b) * dc + c;
        BitString::all(self.lambda)
            .enumerate()
            .map(|(xi, x)| {
                let p = &self.alice[t][xi];
                let o = other.element(&x);
                let op = if for_c { kron(p, &kron(&o, &crate::linalg::identity(dc))) } else {
                    kron(p, &kron(&crate::linalg::identity(db), &o))
                };
                let u = &op * phi;
                let q = if for_c {
                    Matrix::from_fn(dc, dc, |i, j| {
                        let mut s = crate::linalg::ZERO;
                        for a in 0..da {
                            for bb in 0..db {
                                s += u[at(a, bb, i)] * phi[at(a, bb, j)].conj();
                            }
                        }
                        s
                    })
                } else {
                    Matrix::from_fn(db, db, |i, j| {
                        let mut s = crate::linalg::ZERO;
                        for a in 0..da {
                            for cc in 0..dc {
                                s += u[at(a, i, cc)] * phi[at(a, j, cc)].conj();
                            }
                        }
                        s
                    })
                };
                let q = (&q + q.adjoint()) * c(0.5);
                (x, q)
            })
            .collect()
    }
}

/// Alternating maximization for the monogamy game. Side dimensions must be
/// powers of two (1 allowed). The value history is nondecreasing; if the
/// iteration budget runs out before successive sweeps differ by less than
/// `tol`, the best strategy so far is returned with `converged = false`.
pub fn seesaw_optimize_moe(
    lambda: usize,
    dim_b: usize,
    dim_c: usize,
    iters: usize,
    tol: f64,
    seed: u64,
) -> Result<SeesawOutcome> {
    if lambda == 0 {
        return Err(arg_err!("lambda must be positive"));
    }
    let qb = qubits_for_dim(dim_b).ok_or_else(|| arg_err!("dim_b = {dim_b} is not a power of two"))?;
    let qc = qubits_for_dim(dim_c).ok_or_else(|| arg_err!("dim_c = {dim_c} is not a power of two"))?;
    check_qubits(lambda + qb + qc)?;
    if lambda + qb + qc > 8 {
        return Err(crate::Error::Capacity(alloc::format!(
            "seesaw over {} qubits is too large; keep lambda + log2(dim_b) + log2(dim_c) <= 8",
            lambda + qb + qc
        )));
    }
    let mut rng = seeded(seed);
    let bases = 1usize << lambda;
    let alice = (0..bases)
        .map(|t| {
            let theta = BitString::from_index(t as u64, lambda);
            BitString::all(lambda)
                .map(|x| Ok(wiesner_state(&x, &theta)?.to_density().matrix().clone()))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let problem = Problem { lambda, db: dim_b, dc: dim_c, alice };

    let mut b: Vec<Side> = (0..bases).map(|_| Side::random(dim_b, lambda, &mut rng)).collect();
    let mut c: Vec<Side> = (0..bases).map(|_| Side::random(dim_c, lambda, &mut rng)).collect();
    let mut phi = problem.top_state(&b, &c);
    let mut value = problem.value(&phi, &b, &c);
    let mut history = alloc::vec![value];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < iters {
        iterations += 1;
        let previous = value;

        let mut nb = b.clone();
        for (t, side) in nb.iter_mut().enumerate() {
            side.improve(&problem.effective(&phi, t, &c[t], false));
        }
        let v = problem.value(&phi, &nb, &c);
        if v >= value - TOL * 1e-3 {
            b = nb;
            value = v.max(value);
        }

        let mut nc = c.clone();
        for (t, side) in nc.iter_mut().enumerate() {
            side.improve(&problem.effective(&phi, t, &b[t], true));
        }
        let v = problem.value(&phi, &b, &nc);
        if v >= value - TOL * 1e-3 {
            c = nc;
            value = v.max(value);
        }

        let candidate = problem.top_state(&b, &c);
        let v = problem.value(&candidate, &b, &c);
        if v >= value {
            phi = candidate;
            value = v;
        }

        history.push(value);
        if (value - previous).abs() < tol {
            converged = true;
            break;
        }
    }

    let rho = DensityOperator::new(projector(&phi))?;
    let strategy = MoeStrategy::new(
        lambda,
        MoeResource::State(rho),
        b.iter().map(Side::to_povm).collect::<Result<Vec<_>>>()?,
        c.iter().map(Side::to_povm).collect::<Result<Vec<_>>>()?,
    )?;
    let value = strategy.value()?;
    Ok(SeesawOutcome { strategy, value, converged, iterations, history })
}
