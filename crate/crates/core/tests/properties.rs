use proptest::prelude::*;
use rand::Rng;

use qecm_core::games::{xor_shift_identity_check, xor_shift_sides};
use qecm_core::linalg::{c, identity, kron, max_abs_diff, Matrix, TOL};
use qecm_core::oracle::RandomOracle;
use qecm_core::quantum::{epr_state, wiesner_state, DensityOperator, Povm};
use qecm_core::random::{random_channel, random_density, random_povm, random_pure_state, seeded};
use qecm_core::BitString;

fn bitstring(len: usize) -> impl Strategy<Value = BitString> {
    proptest::collection::vec(any::<bool>(), len).prop_map(BitString::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn wiesner_basis_is_orthonormal(n in 1usize..=4, theta_seed in any::<u64>()) {
        let theta = BitString::random(n, &mut seeded(theta_seed));
        for x in BitString::all(n) {
            let a = wiesner_state(&x, &theta).unwrap();
            for y in BitString::all(n) {
                let b = wiesner_state(&y, &theta).unwrap();
                let expected = if x == y { 1.0 } else { 0.0 };
                prop_assert!((a.inner(&b).norm_sqr().sqrt() - expected).abs() < TOL);
            }
        }
    }

    #[test]
    fn conjugate_positions_are_unbiased(n in 1usize..=4, seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let (x, y) = (BitString::random(n, &mut rng), BitString::random(n, &mut rng));
        let (t1, t2) = (BitString::random(n, &mut rng), BitString::random(n, &mut rng));
        let differing = t1.xor(&t2).unwrap();
        let overlap = wiesner_state(&x, &t1).unwrap().inner(&wiesner_state(&y, &t2).unwrap()).norm_sqr();
        // aligned positions must agree; each conjugate position contributes 1/2
        let aligned_agree = (0..n).all(|i| differing.bit(i) || x.bit(i) == y.bit(i));
        let expected = if aligned_agree { 0.5f64.powi(differing.weight() as i32) } else { 0.0 };
        prop_assert!((overlap - expected).abs() < TOL);
    }

    #[test]
    fn epr_correspondence(seed in any::<u64>(), n_in in 1usize..=2, n_out in 1usize..=2) {
        let mut rng = seeded(seed);
        let kraus = rng.random_range(1..=4).max((1usize << n_in).div_ceil(1 << n_out));
        let phi = random_channel(n_in, n_out, kraus, &mut rng).unwrap();
        let sigma = random_density(n_in, 2, &mut rng).unwrap();
        let labels: Vec<BitString> = BitString::all(1).collect();
        let q = random_povm(n_out, &labels, &mut rng).unwrap().element(&labels[1]).unwrap().clone();

        let direct = phi.apply(&sigma).unwrap().expectation(&q).unwrap();
        let choi = phi.extend_left(n_in).unwrap().apply(&epr_state(n_in).unwrap().to_density()).unwrap();
        let op = kron(&sigma.matrix().transpose(), &q);
        let via_epr = choi.expectation(&op).unwrap() * (1u64 << n_in) as f64;
        prop_assert!((direct - via_epr).abs() < 1e-9, "{direct} vs {via_epr}");
    }

    #[test]
    fn xor_shift_identity_on_random_tables(seed in any::<u64>(), s in bitstring(3)) {
        let mut rng = seeded(seed);
        let table: Vec<f64> = (0..64).map(|_| rng.random::<f64>() * 100.0 - 50.0).collect();
        prop_assert!(xor_shift_identity_check(&table, &s).unwrap());
    }

    #[test]
    fn oracle_unitary_preserves_norm(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let h = RandomOracle::sample(2, 2, &mut rng).unwrap();
        let psi = random_pure_state(5, &mut rng).unwrap();
        let out = h.unitary_apply(&psi, &[0, 1], &[3, 4]).unwrap();
        prop_assert!((out.amplitudes().iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn xor_shift_with_zero_shift_is_syntactic() {
    let mut rng = seeded(5);
    let table: Vec<f64> = (0..64).map(|_| rng.random::<f64>()).collect();
    let (l, r) = xor_shift_sides(&table, &BitString::zeros(3)).unwrap();
    assert_eq!(l, r);
}

#[test]
fn random_constructions_are_complete() {
    let mut rng = seeded(2024);
    let labels: Vec<BitString> = BitString::all(2).collect();
    for i in 0..100 {
        let (qin, qout) = (1 + i % 2, 1 + (i / 2) % 2);
        let kraus = 4usize.max((1usize << qin).div_ceil(1 << qout));
        let ch = random_channel(qin, qout, kraus, &mut rng).unwrap();
        assert!(ch.completeness_error() < TOL, "channel {i}");
        let povm = random_povm(1 + i % 3, &labels, &mut rng).unwrap();
        let sum = povm.elements().values().fold(Matrix::zeros(povm.dim(), povm.dim()), |a, e| a + e);
        assert!(max_abs_diff(&sum, &identity(povm.dim())) < TOL, "povm {i}");
        // the checked constructors accept them
        Povm::new(povm.qubits(), povm.elements().clone()).unwrap();
        DensityOperator::new(ch.apply(&DensityOperator::maximally_mixed(qin).unwrap()).unwrap().matrix().clone()).unwrap();
    }
}

/// Truth table of a one-bit oracle on two-bit inputs, as an index 0..16.
fn truth_index(h: &RandomOracle) -> usize {
    BitString::all(2).fold(0, |acc, x| (acc << 1) | usize::from(h.eval(&x).unwrap().bit(0)))
}

#[test]
fn reprogramming_lemma_exhaustive() {
    let functions: Vec<RandomOracle> = (0..16u64)
        .map(|t| {
            let table = (0..4).map(|i| BitString::new(vec![(t >> (3 - i)) & 1 == 1])).collect();
            RandomOracle::from_table(2, 1, table).unwrap()
        })
        .collect();
    for (i, h) in functions.iter().enumerate() {
        assert_eq!(truth_index(h), i);
    }

    for x in BitString::all(2) {
        // H_{x,y} with H and y uniform hits every function exactly twice
        let mut hits = [0u32; 16];
        for h in &functions {
            for y in BitString::all(1) {
                hits[truth_index(&h.reprogram(&x, &y).unwrap())] += 1;
            }
        }
        assert!(hits.iter().all(|&k| k == 2), "x = {x}: {hits:?}");

        // and so E_H f(H) = E_H E_y f(H_{x,y}) for integer-valued tables,
        // whose sums are exact in floating point
        let mut rng = seeded(x.to_index() as u64);
        for _ in 0..20 {
            let f: Vec<f64> = (0..16).map(|_| rng.random_range(-1000..1000) as f64).collect();
            let lhs: f64 = functions.iter().map(|h| f[truth_index(h)]).sum::<f64>() / 16.0;
            let rhs: f64 = functions
                .iter()
                .flat_map(|h| { let x = x.clone(); BitString::all(1).map(move |y| h.reprogram(&x, &y).unwrap()) })
                .map(|g| f[truth_index(&g)])
                .sum::<f64>()
                / 32.0;
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn wiesner_density_of_maximally_mixed_average() {
    // averaging |x^theta><x^theta| over x gives I / 2^n for every theta
    for theta in BitString::all(3) {
        let mut avg = Matrix::zeros(8, 8);
        for x in BitString::all(3) {
            avg += wiesner_state(&x, &theta).unwrap().to_density().matrix() * c(1.0 / 8.0);
        }
        assert!(max_abs_diff(&avg, &(identity(8) * c(1.0 / 8.0))) < TOL);
    }
}
