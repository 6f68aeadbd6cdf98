//! Bell operators with two measurement settings per qubit.
//!
//! The two-qubit operator is
//!
//!   B_2 = (sigma_a1 + sigma_a1') (x) sigma_a2
//!       + (sigma_a1 - sigma_a1') (x) sigma_a2'
//!
//! and the M-qubit family extends it recursively,
//!
//!   B_M = 1/2 B_(M-1) (x) (sigma_aM + sigma_aM')
//!       + 1/2 B'_(M-1) (x) (sigma_aM - sigma_aM'),
//!
//! where B' swaps every a_k with a_k'. The recursion is anchored at
//! B_1 = 2 sigma_a1 so that B_2 coincides with the two-qubit operator
//! above; a plain sigma_a1 anchor would halve every operator and break
//! both the product-state bound 2 and the quantum ceiling 2^((M+1)/2).
//!
//! Product states obey <B_M> <= 2; quantum states reach 2^((M+1)/2); a
//! state on M qubits counts as violating only above 2^(M/2), the most
//! that (M-1)-qubit entanglement can deliver.

mod optimizer;
mod overlap;

pub use optimizer::{maximize_bell, BellResult, OptimizerConfig};
pub use overlap::{
    counterexample_state, overlap_catalog, overlap_search, recommended_restarts,
    verify_double_violation_state, OverlapCase, OverlapSpec, Verdict,
};

pub(crate) use optimizer::maximize_functional;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qlinalg::{self, eigen, expectation, BlochVector, HermitianOperator};

/// The 2M unit vectors {a_k, a_k'} entering an M-qubit Bell operator.
#[derive(Debug, Clone, PartialEq)]
pub struct SettingSet {
    pairs: Vec<(BlochVector, BlochVector)>,
}

impl SettingSet {
    pub fn new(pairs: Vec<(BlochVector, BlochVector)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::invalid("a setting set needs at least one qubit"));
        }
        Ok(SettingSet { pairs })
    }

    /// x/y settings on every qubit, the standard pattern that maximizes
    /// the operator norm.
    pub fn canonical(num_qubits: usize) -> Result<Self> {
        SettingSet::new(vec![(BlochVector::X, BlochVector::Y); num_qubits])
    }

    pub fn num_qubits(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(BlochVector, BlochVector)] {
        &self.pairs
    }

    /// Exchange a_k and a_k' on every qubit.
    pub fn swapped(&self) -> Self {
        SettingSet {
            pairs: self.pairs.iter().map(|&(a, ap)| (ap, a)).collect(),
        }
    }
}

/// Raw per-qubit direction pairs used internally by the optimizer, where
/// gradient probes substitute basis vectors and the zero vector.
pub(crate) type RawSettings = Vec<[[f64; 3]; 2]>;

pub(crate) fn raw_from_settings(s: &SettingSet) -> RawSettings {
    s.pairs()
        .iter()
        .map(|&(a, ap)| [[a.x, a.y, a.z], [ap.x, ap.y, ap.z]])
        .collect()
}

pub(crate) fn settings_from_raw(raw: &RawSettings) -> Result<SettingSet> {
    let pairs = raw
        .iter()
        .map(|[a, ap]| {
            Ok((
                BlochVector::normalized(a[0], a[1], a[2])?,
                BlochVector::normalized(ap[0], ap[1], ap[2])?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    SettingSet::new(pairs)
}

/// Build (B_M, B'_M) from raw direction pairs. Linearity in every single
/// direction is what makes the coordinate ascent exact.
pub(crate) fn mk_pair_raw(raw: &[[[f64; 3]; 2]]) -> (HermitianOperator, HermitianOperator) {
    let sigma = |v: &[f64; 3]| qlinalg::pauli_components(v[0], v[1], v[2]);
    let mut b = sigma(&raw[0][0]).scale(2.0);
    let mut bp = sigma(&raw[0][1]).scale(2.0);
    for pair in &raw[1..] {
        let s = sigma(&pair[0]).add(&sigma(&pair[1])).expect("same dim");
        let d = sigma(&pair[0])
            .add(&sigma(&pair[1]).scale(-1.0))
            .expect("same dim");
        let new_b = b
            .tensor(&s)
            .expect("within register cap")
            .scale(0.5)
            .add(&bp.tensor(&d).expect("within register cap").scale(0.5))
            .expect("same dim");
        let new_bp = bp
            .tensor(&s)
            .expect("within register cap")
            .scale(0.5)
            .add(&b.tensor(&d).expect("within register cap").scale(-0.5))
            .expect("same dim");
        b = new_b;
        bp = new_bp;
    }
    (b, bp)
}

/// The two-qubit Bell operator for the four directions of `s`.
pub fn chsh_operator(s: &SettingSet) -> Result<HermitianOperator> {
    if s.num_qubits() != 2 {
        return Err(Error::invalid(format!(
            "the two-qubit operator needs exactly 2 setting pairs, got {}",
            s.num_qubits()
        )));
    }
    let (a1, a1p) = s.pairs()[0];
    let (a2, a2p) = s.pairs()[1];
    let sum = qlinalg::pauli(&a1).add(&qlinalg::pauli(&a1p))?;
    let diff = qlinalg::pauli(&a1).add(&qlinalg::pauli(&a1p).scale(-1.0))?;
    sum.tensor(&qlinalg::pauli(&a2))?
        .add(&diff.tensor(&qlinalg::pauli(&a2p))?)
}

/// The M-qubit Bell operator for M >= 2.
pub fn mk_operator(s: &SettingSet) -> Result<HermitianOperator> {
    if s.num_qubits() < 2 {
        return Err(Error::invalid("the recursive operator needs M >= 2"));
    }
    let (b, _) = mk_pair_raw(&raw_from_settings(s));
    Ok(b)
}

/// The swapped-setting companion B'_M.
pub fn mk_operator_swapped(s: &SettingSet) -> Result<HermitianOperator> {
    if s.num_qubits() < 2 {
        return Err(Error::invalid("the recursive operator needs M >= 2"));
    }
    let (_, bp) = mk_pair_raw(&raw_from_settings(s));
    Ok(bp)
}

/// Maximal two-qubit Bell value of a state, in closed form: with
/// T_ij = Tr(rho sigma_i (x) sigma_j), the value is 2 sqrt(t1 + t2)
/// where t1 >= t2 are the two largest eigenvalues of T^T T. Agrees with
/// the setting optimization to within 1e-5.
pub fn horodecki_value(rho: &HermitianOperator) -> Result<f64> {
    if rho.num_qubits() != 2 {
        return Err(Error::invalid(
            "the correlation-matrix criterion applies to two-qubit states",
        ));
    }
    rho.validate_density()?;

    let dirs = [BlochVector::X, BlochVector::Y, BlochVector::Z];
    let mut t = [[0.0f64; 3]; 3];
    for (i, di) in dirs.iter().enumerate() {
        for (j, dj) in dirs.iter().enumerate() {
            let obs = qlinalg::pauli(di).tensor(&qlinalg::pauli(dj))?;
            t[i][j] = expectation(rho, &obs)?;
        }
    }

    // Gram matrix T^T T, diagonalized as a real symmetric 3x3.
    let mut gram = vec![Complex64::ZERO; 9];
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = 0.0;
            for k in 0..3 {
                acc += t[k][i] * t[k][j];
            }
            gram[i * 3 + j] = Complex64::new(acc, 0.0);
        }
    }
    let (vals, _) = eigen::eigh(3, &gram)?;
    Ok(2.0 * (vals[2].max(0.0) + vals[1].max(0.0)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::qlinalg::{expectation_ket, max_eigenpair, Ket};
    use crate::states::ghz;

    pub(crate) fn random_settings(m: usize, rng: &mut ChaCha8Rng) -> SettingSet {
        use rand::Rng;
        let mut pairs = Vec::with_capacity(m);
        for _ in 0..m {
            let mut v = || {
                let z: f64 = rng.random_range(-1.0..1.0);
                let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                let r = (1.0 - z * z).sqrt();
                BlochVector::new(r * t.cos(), r * t.sin(), z).unwrap()
            };
            pairs.push((v(), v()));
        }
        SettingSet::new(pairs).unwrap()
    }

    #[test]
    fn degenerate_settings_give_twice_the_correlation() {
        let s = SettingSet::new(vec![
            (BlochVector::Z, BlochVector::Z),
            (BlochVector::Z, BlochVector::Z),
        ])
        .unwrap();
        let b = chsh_operator(&s).unwrap();
        // 2 sigma_z (x) sigma_z: diagonal (2, -2, -2, 2).
        let expect = [2.0, -2.0, -2.0, 2.0];
        for i in 0..4 {
            assert_relative_eq!(b.entry(i, i).re, expect[i], epsilon = 1e-14);
        }
        let (top, _) = max_eigenpair(&b).unwrap();
        assert_relative_eq!(top, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn chsh_reaches_the_quantum_ceiling() {
        // Orthogonal setting pairs put the largest eigenvalue at 2 sqrt 2;
        // with settings in the x-z plane the Bell pair itself reaches it.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = SettingSet::new(vec![
            (BlochVector::Z, BlochVector::X),
            (
                BlochVector::new(h, 0.0, h).unwrap(),
                BlochVector::new(-h, 0.0, h).unwrap(),
            ),
        ])
        .unwrap();
        let b = chsh_operator(&s).unwrap();
        let value = expectation_ket(&ghz(2).unwrap(), &b).unwrap();
        assert_relative_eq!(value, 2.0 * std::f64::consts::SQRT_2, epsilon = 1e-12);

        let (top, _) = max_eigenpair(&b).unwrap();
        assert_relative_eq!(top, 2.0 * std::f64::consts::SQRT_2, epsilon = 1e-10);
    }

    #[test]
    fn equatorial_orthogonal_settings_also_peak_at_the_ceiling() {
        // x/y per qubit with the second pair rotated by 45 degrees: the
        // largest eigenvalue is 2 sqrt 2 (the eigenvector is a Bell state
        // with an equatorial phase, not the plain pair).
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = SettingSet::new(vec![
            (BlochVector::X, BlochVector::Y),
            (
                BlochVector::new(h, h, 0.0).unwrap(),
                BlochVector::new(h, -h, 0.0).unwrap(),
            ),
        ])
        .unwrap();
        let b = chsh_operator(&s).unwrap();
        let (top, _) = max_eigenpair(&b).unwrap();
        assert_relative_eq!(top, 2.0 * std::f64::consts::SQRT_2, epsilon = 1e-10);
    }

    #[test]
    fn recursive_operator_matches_two_qubit_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..10 {
            let s = random_settings(2, &mut rng);
            let via_recursion = mk_operator(&s).unwrap();
            let direct = chsh_operator(&s).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    assert!(
                        (via_recursion.entry(i, j) - direct.entry(i, j)).norm() < 1e-12,
                        "recursion disagrees with the direct two-qubit operator"
                    );
                }
            }
        }
    }

    #[test]
    fn recursive_operator_rejects_single_qubit() {
        let s = SettingSet::new(vec![(BlochVector::X, BlochVector::Y)]).unwrap();
        assert!(mk_operator(&s).is_err());
    }

    #[test]
    fn three_qubit_operator_reaches_four_on_phased_ghz() {
        // With x/y settings everywhere, the maximal eigenvector is the
        // GHZ state carrying a +i relative phase.
        let s = SettingSet::canonical(3).unwrap();
        let b = mk_operator(&s).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let phased = Ket::new(
            3,
            vec![
                Complex64::new(h, 0.0),
                Complex64::ZERO,
                Complex64::ZERO,
                Complex64::ZERO,
                Complex64::ZERO,
                Complex64::ZERO,
                Complex64::ZERO,
                Complex64::new(0.0, h),
            ],
        )
        .unwrap();
        assert_relative_eq!(expectation_ket(&phased, &b).unwrap(), 4.0, epsilon = 1e-12);
        let (top, _) = max_eigenpair(&b).unwrap();
        assert_relative_eq!(top, 4.0, epsilon = 1e-10);
    }

    #[test]
    fn swapping_settings_yields_the_companion_operator() {
        let mut rng = ChaCha8Rng::seed_from_u64(63);
        for m in 2..=4usize {
            let s = random_settings(m, &mut rng);
            let bp = mk_operator_swapped(&s).unwrap();
            let swapped = mk_operator(&s.swapped()).unwrap();
            let dim = bp.dim();
            for i in 0..dim {
                for j in 0..dim {
                    assert!((bp.entry(i, j) - swapped.entry(i, j)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn operator_norm_respects_the_squared_ceiling() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for m in 2..=5usize {
            for _ in 0..4 {
                let s = random_settings(m, &mut rng);
                let b = mk_operator(&s).unwrap();
                let vals = b.eigenvalues().unwrap();
                let ceiling = 2f64.powf((m as f64 + 1.0) / 2.0);
                // max |eigenvalue|^2 <= 2^(M+1)
                for v in vals {
                    assert!(
                        v * v <= ceiling * ceiling + 1e-9,
                        "eigenvalue {v} breaks the ceiling at M={m}"
                    );
                }
            }
        }
    }

    #[test]
    fn horodecki_value_of_attacked_pairs() {
        use crate::states::{attacked_state, AttackScenario};
        for &phi in &[0.0, 0.4, std::f64::consts::FRAC_PI_4, 1.1, std::f64::consts::FRAC_PI_2] {
            let sc = AttackScenario::new(2, 1, phi).unwrap();
            let psi = attacked_state(&sc).unwrap();
            let s_ab = horodecki_value(&psi.reduced_density(&[0, 1]).unwrap()).unwrap();
            let s_ae = horodecki_value(&psi.reduced_density(&[0, 2]).unwrap()).unwrap();
            let s_be = horodecki_value(&psi.reduced_density(&[1, 2]).unwrap()).unwrap();
            assert_relative_eq!(s_ab, 2.0 * std::f64::consts::SQRT_2 * phi.cos(), epsilon = 1e-10);
            assert_relative_eq!(s_ae, 2.0 * std::f64::consts::SQRT_2 * phi.sin(), epsilon = 1e-10);
            assert_relative_eq!(
                s_be,
                std::f64::consts::SQRT_2 * (2.0 * phi).sin(),
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn horodecki_value_of_maximally_mixed_state_is_zero() {
        let rho = HermitianOperator::identity(2).scale(0.25);
        assert_relative_eq!(horodecki_value(&rho).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn horodecki_rejects_non_density_input() {
        let not_density = HermitianOperator::identity(2); // trace 4
        assert!(horodecki_value(&not_density).is_err());
        let one_qubit = HermitianOperator::identity(1).scale(0.5);
        assert!(horodecki_value(&one_qubit).is_err());
    }
}
