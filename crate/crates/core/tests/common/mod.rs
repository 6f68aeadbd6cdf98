//! Helpers shared by the property and acceptance suites.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nqss::infotheory::{
    coalition_informations, joint_distribution, mutual_information, CoalitionSplit,
};
use nqss::qlinalg::{HermitianOperator, Ket};
use nqss::states::{
    attacked_state, basis_state, conditional_state, ghz, AttackScenario, Axis, BasisLabel,
    MeasurementRecord,
};

pub fn phi_grid(points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| std::f64::consts::FRAC_PI_2 * i as f64 / (points - 1) as f64)
        .collect()
}

/// Standard normal via Box-Muller.
pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
    let v: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    (-2.0 * u.ln()).sqrt() * v.cos()
}

/// Random density matrix: G G' normalized, G with iid complex normal
/// entries.
pub fn ginibre_density(num_qubits: usize, rng: &mut ChaCha8Rng) -> HermitianOperator {
    let dim = 1usize << num_qubits;
    let mut g = vec![Complex64::ZERO; dim * dim];
    for entry in g.iter_mut() {
        *entry = Complex64::new(normal(rng), normal(rng));
    }
    let mut rho = vec![Complex64::ZERO; dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            let mut acc = Complex64::ZERO;
            for k in 0..dim {
                acc += g[r * dim + k] * g[c * dim + k].conj();
            }
            rho[r * dim + c] = acc;
        }
    }
    let trace: f64 = (0..dim).map(|i| rho[i * dim + i].re).sum();
    for entry in rho.iter_mut() {
        *entry /= trace;
    }
    HermitianOperator::new(num_qubits, rho).expect("Ginibre product is Hermitian")
}

pub fn random_ket(num_qubits: usize, rng: &mut ChaCha8Rng) -> Ket {
    let dim = 1usize << num_qubits;
    let amps: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    Ket::normalized(num_qubits, amps).expect("nonzero with probability 1")
}

// ---------------------------------------------------------------------
// The named invariants of criterion 8.
// ---------------------------------------------------------------------

/// Post-attack states are normalized for every scenario on a 50-point
/// grid, N <= 6.
pub fn check_attacked_state_normalization() {
    for n in 2..=6usize {
        for spied in 1..n {
            for &phi in &phi_grid(50) {
                let sc = AttackScenario::new(n, spied, phi).unwrap();
                let psi = attacked_state(&sc).unwrap();
                let norm: f64 = psi.amplitudes().iter().map(|a| a.norm_sqr()).sum();
                assert!(
                    (norm - 1.0).abs() < 1e-12,
                    "norm {norm} at N={n}, n={spied}, phi={phi}"
                );
            }
        }
    }
}

/// Tracing qubits out one at a time equals tracing the set at once.
pub fn check_partial_trace_composition() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for _ in 0..5 {
        let psi = random_ket(5, &mut rng);
        let rho = psi.density();
        let at_once = rho.partial_trace(&[0, 2, 4]).unwrap();
        let stepwise = rho
            .partial_trace(&[0, 2, 3, 4])
            .unwrap()
            .partial_trace(&[0, 1, 3])
            .unwrap()
            .partial_trace(&[0, 1, 2])
            .unwrap();
        for i in 0..at_once.dim() {
            for j in 0..at_once.dim() {
                assert!(
                    (at_once.entry(i, j) - stepwise.entry(i, j)).norm() < 1e-12,
                    "partial traces disagree at ({i},{j})"
                );
            }
        }
    }
}

/// For every pair of parties of the post-attack states: raw tables obey
/// p(0,0)=p(1,1) and p(0,1)=p(1,0) in both retained bases, and the x and
/// y statistics coincide once the sifting sign convention is folded in.
pub fn check_pair_statistics_symmetry() {
    for (n, spied) in [(2usize, 1usize), (3, 1), (3, 2), (4, 1), (4, 2), (4, 3)] {
        for &phi in &[0.0, 0.37, std::f64::consts::FRAC_PI_4, 1.18] {
            let sc = AttackScenario::new(n, spied, phi).unwrap();
            let psi = attacked_state(&sc).unwrap();
            let qubits = n + 1;
            for a in 0..qubits {
                for b in a + 1..qubits {
                    let split = CoalitionSplit::new(vec![a], vec![b]).unwrap();
                    let mut canonical = Vec::new();
                    for axis in [Axis::X, Axis::Y] {
                        let table = joint_distribution(
                            &psi,
                            &[(a, axis), (b, axis)],
                            &split,
                        )
                        .unwrap();
                        let same = table.probability(&[1, 1]) - table.probability(&[-1, -1]);
                        let diff = table.probability(&[1, -1]) - table.probability(&[-1, 1]);
                        assert!(
                            same.abs() < 1e-12 && diff.abs() < 1e-12,
                            "table asymmetry for pair ({a},{b}) at N={n}, phi={phi}"
                        );
                        let d = table.disagreement().unwrap();
                        canonical.push(d.min(1.0 - d));
                    }
                    assert!(
                        (canonical[0] - canonical[1]).abs() < 1e-12,
                        "x/y statistics differ for pair ({a},{b}) at N={n}, n={spied}, phi={phi}"
                    );
                }
            }
        }
    }
}

/// I_a(phi) = I_u(pi/2 - phi): swapping the probe for the spied block is
/// the same protocol at the mirrored attack strength.
pub fn check_role_exchange_symmetry() {
    for (n, spied) in [(2usize, 1usize), (3, 1), (4, 2), (5, 3)] {
        for &phi in &phi_grid(41) {
            let here = AttackScenario::new(n, spied, phi).unwrap();
            let mirrored =
                AttackScenario::new(n, spied, std::f64::consts::FRAC_PI_2 - phi).unwrap();
            let (i_a, _) = coalition_informations(&here);
            let (_, i_u) = coalition_informations(&mirrored);
            assert!(
                (i_a - i_u).abs() < 1e-12,
                "role exchange broken at N={n}, n={spied}, phi={phi}"
            );
        }
    }
}

/// Merging a receiver into either side of the split leaves the
/// information unchanged on the three-partner state: I(AB:E) = I(A:BE)
/// and I(AB:C) = I(A:BC).
pub fn check_coalition_merge_identity() {
    for &phi in &phi_grid(11) {
        let sc = AttackScenario::new(3, 1, phi).unwrap();
        let psi = attacked_state(&sc).unwrap();
        // Register: sender 0, honest receiver 1, spied receiver 2, probe 3.
        let i_ab_e = mutual_information(
            &psi,
            &CoalitionSplit::new(vec![0, 1], vec![3]).unwrap(),
        )
        .unwrap();
        let i_a_be = mutual_information(
            &psi,
            &CoalitionSplit::new(vec![0], vec![1, 3]).unwrap(),
        )
        .unwrap();
        assert!(
            (i_ab_e - i_a_be).abs() < 1e-9,
            "I(AB:E)={i_ab_e} vs I(A:BE)={i_a_be} at phi={phi}"
        );

        let i_ab_c = mutual_information(
            &psi,
            &CoalitionSplit::new(vec![0, 1], vec![2]).unwrap(),
        )
        .unwrap();
        let i_a_bc = mutual_information(
            &psi,
            &CoalitionSplit::new(vec![0], vec![1, 2]).unwrap(),
        )
        .unwrap();
        assert!(
            (i_ab_c - i_a_bc).abs() < 1e-9,
            "I(AB:C)={i_ab_c} vs I(A:BC)={i_a_bc} at phi={phi}"
        );
    }
}

/// The two conditional-preparation tables, exhaustively: 4 single-
/// measurement rows and 8 double-measurement rows (each with 4 sign
/// patterns collapsing to the tabulated labels).
pub fn check_preparation_tables() {
    let single: [((Axis, i8), (Axis, u8)); 4] = [
        ((Axis::X, 1), (Axis::X, 0)),
        ((Axis::X, -1), (Axis::X, 1)),
        ((Axis::Y, 1), (Axis::Y, 0)),
        ((Axis::Y, -1), (Axis::Y, 1)),
    ];
    for ((axis, outcome), (want_axis, want_bit)) in single {
        let record = MeasurementRecord::new(vec![(axis, outcome)]).unwrap();
        let label = conditional_state(3, &record).unwrap();
        assert_eq!((label.axis, label.bit), (want_axis, want_bit));
        // The label really is the projected state.
        let direct = basis_state(&BasisLabel::new(want_axis, want_bit, 2).unwrap()).unwrap();
        assert_eq!(direct.num_qubits(), 2);
    }

    let double: [((Axis, Axis), [(i8, i8, Axis, u8); 4]); 4] = [
        (
            (Axis::X, Axis::X),
            [
                (1, 1, Axis::X, 0),
                (1, -1, Axis::X, 1),
                (-1, 1, Axis::X, 1),
                (-1, -1, Axis::X, 0),
            ],
        ),
        (
            (Axis::X, Axis::Y),
            [
                (1, 1, Axis::Y, 0),
                (1, -1, Axis::Y, 1),
                (-1, 1, Axis::Y, 1),
                (-1, -1, Axis::Y, 0),
            ],
        ),
        (
            (Axis::Y, Axis::X),
            [
                (1, 1, Axis::Y, 0),
                (1, -1, Axis::Y, 1),
                (-1, 1, Axis::Y, 1),
                (-1, -1, Axis::Y, 0),
            ],
        ),
        (
            (Axis::Y, Axis::Y),
            [
                (1, 1, Axis::X, 1),
                (1, -1, Axis::X, 0),
                (-1, 1, Axis::X, 0),
                (-1, -1, Axis::X, 1),
            ],
        ),
    ];
    for ((a1, a2), rows) in double {
        for (s1, s2, want_axis, want_bit) in rows {
            let record = MeasurementRecord::new(vec![(a1, s1), (a2, s2)]).unwrap();
            let label = conditional_state(3, &record).unwrap();
            assert_eq!(
                (label.axis, label.bit, label.width),
                (want_axis, want_bit, 1),
                "row {a1:?}{a2:?} {s1}{s2}"
            );
        }
    }
}

/// Unattacked GHZ: the sender shares one full bit with the complete
/// receiver set and nothing with any smaller subset.
pub fn check_ghz_information_structure() {
    for n in 2..=5usize {
        let psi = ghz(n).unwrap();
        let all = CoalitionSplit::new(vec![0], (1..n).collect()).unwrap();
        let full = mutual_information(&psi, &all).unwrap();
        assert!((full - 1.0).abs() < 1e-12, "I=1 broken at N={n}");
        for k in 1..n - 1 {
            let some = CoalitionSplit::new(vec![0], (1..=k).collect()).unwrap();
            let none = mutual_information(&psi, &some).unwrap();
            assert!(none.abs() < 1e-12, "I=0 broken at N={n}, k={k}");
        }
    }
}

/// Closed-form coalition informations agree with the state route, up to
/// the largest register the analysis supports.
pub fn check_information_dual_route(tol: f64) {
    for (n, spied) in [(2usize, 1usize), (3, 1), (3, 2), (4, 2), (5, 4), (6, 3)] {
        for &phi in &[0.0, 0.43, std::f64::consts::FRAC_PI_4, 1.25] {
            let sc = AttackScenario::new(n, spied, phi).unwrap();
            let (i_a, i_u) = coalition_informations(&sc);
            let (i_a_state, i_u_state) =
                nqss::infotheory::coalition_informations_from_state(&sc).unwrap();
            assert!(
                (i_a - i_a_state).abs() < tol && (i_u - i_u_state).abs() < tol,
                "dual information routes disagree at N={n}, n={spied}, phi={phi}: \
                 ({i_a}, {i_u}) vs ({i_a_state}, {i_u_state})"
            );
        }
    }
}

/// I_a strictly decreasing and I_u strictly increasing in phi on the
/// open interval, on a grid.
pub fn check_information_monotonicity() {
    let grid = phi_grid(60);
    let mut last: Option<(f64, f64)> = None;
    for &phi in &grid {
        let sc = AttackScenario::new(4, 2, phi).unwrap();
        let (i_a, i_u) = coalition_informations(&sc);
        if let Some((prev_a, prev_u)) = last {
            assert!(i_a < prev_a + 1e-15, "I_a not decreasing at phi={phi}");
            assert!(i_u > prev_u - 1e-15, "I_u not increasing at phi={phi}");
        }
        last = Some((i_a, i_u));
    }
}
