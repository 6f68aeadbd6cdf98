//! Shannon entropies, Born-rule joint distributions and coalition mutual
//! informations.
//!
//! The key-rate quantities are classical: every partner measures sigma_x
//! or sigma_y, rounds with an odd number of sigma_y measurements are
//! discarded, and a coalition's bit is the product of its members'
//! outcome signs. Mutual information between the two sides of a split is
//! averaged over the retained basis assignments.

use std::collections::BTreeMap;

#[cfg(test)]
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qlinalg::{bit_of, Ket};
use crate::states::{attacked_state, measurement_amplitudes, AttackScenario, Axis};
use crate::tolerances::PROB_SUM_TOL;

/// Joint distribution of named +-1-valued variables.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbTable {
    variables: Vec<String>,
    entries: BTreeMap<Vec<i8>, f64>,
}

impl ProbTable {
    pub fn new(variables: Vec<String>, entries: BTreeMap<Vec<i8>, f64>) -> Result<Self> {
        let mut total = 0.0;
        for (outcome, &p) in &entries {
            if outcome.len() != variables.len() {
                return Err(Error::invalid("outcome arity does not match variables"));
            }
            if outcome.iter().any(|&s| s != 1 && s != -1) {
                return Err(Error::invalid("outcomes must be +-1"));
            }
            if p < -PROB_SUM_TOL {
                return Err(Error::invalid(format!("negative probability {p}")));
            }
            total += p;
        }
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::invalid(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        Ok(ProbTable { variables, entries })
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn probability(&self, outcome: &[i8]) -> f64 {
        self.entries.get(outcome).copied().unwrap_or(0.0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<i8>, f64)> {
        self.entries.iter().map(|(k, &v)| (k, v))
    }

    /// Distribution of one variable, marginalizing the others.
    pub fn marginal(&self, var: usize) -> Vec<f64> {
        let mut p = vec![0.0; 2];
        for (outcome, &prob) in &self.entries {
            let slot = if outcome[var] == 1 { 0 } else { 1 };
            p[slot] += prob;
        }
        p
    }

    /// Probability that the two variables of a pair table differ.
    pub fn disagreement(&self) -> Result<f64> {
        if self.variables.len() != 2 {
            return Err(Error::invalid("disagreement needs a two-variable table"));
        }
        Ok(self
            .entries
            .iter()
            .filter(|(o, _)| o[0] != o[1])
            .map(|(_, &p)| p)
            .sum())
    }

    /// Mutual information between the two variables of a pair table, in bits.
    pub fn mutual_information(&self) -> Result<f64> {
        if self.variables.len() != 2 {
            return Err(Error::invalid(
                "mutual information needs a two-variable table",
            ));
        }
        let joint: Vec<f64> = self.entries.values().copied().collect();
        let h_joint = entropy_unchecked(&joint);
        let h_left = entropy_unchecked(&self.marginal(0));
        let h_right = entropy_unchecked(&self.marginal(1));
        Ok(h_left + h_right - h_joint)
    }
}

/// Two disjoint coalitions of qubit indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoalitionSplit {
    left: Vec<usize>,
    right: Vec<usize>,
}

impl CoalitionSplit {
    pub fn new(left: Vec<usize>, right: Vec<usize>) -> Result<Self> {
        if left.is_empty() || right.is_empty() {
            return Err(Error::invalid("coalitions must be nonempty"));
        }
        for q in &left {
            if right.contains(q) {
                return Err(Error::invalid(format!(
                    "qubit {q} appears in both coalitions"
                )));
            }
        }
        for list in [&left, &right] {
            for (i, q) in list.iter().enumerate() {
                if list[i + 1..].contains(q) {
                    return Err(Error::invalid(format!("duplicate qubit {q} in coalition")));
                }
            }
        }
        Ok(CoalitionSplit { left, right })
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    /// All measured qubits, ascending.
    pub fn union(&self) -> Vec<usize> {
        let mut u: Vec<usize> = self.left.iter().chain(&self.right).copied().collect();
        u.sort_unstable();
        u
    }

    fn check_register(&self, num_qubits: usize) -> Result<()> {
        for &q in self.left.iter().chain(&self.right) {
            if q >= num_qubits {
                return Err(Error::invalid(format!(
                    "qubit {q} out of range for {num_qubits}-qubit register"
                )));
            }
        }
        Ok(())
    }

    fn label(qubits: &[usize]) -> String {
        let parts: Vec<String> = qubits.iter().map(|q| format!("q{q}")).collect();
        parts.join("+")
    }
}

/// Shannon entropy of a probability distribution, in bits. Zero entries
/// contribute nothing (the 0 log 0 = 0 convention).
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for &x in p {
        if x < -PROB_SUM_TOL {
            return Err(Error::invalid(format!("negative probability {x}")));
        }
        total += x;
    }
    if (total - 1.0).abs() > PROB_SUM_TOL {
        return Err(Error::invalid(format!(
            "probabilities sum to {total}, expected 1"
        )));
    }
    Ok(entropy_unchecked(p))
}

fn entropy_unchecked(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * x.log2())
        .sum::<f64>()
}

/// H({d, 1-d}).
pub fn binary_entropy(d: f64) -> f64 {
    entropy_unchecked(&[d, 1.0 - d])
}

/// Born-rule joint distribution of the two coalition bits when the listed
/// qubits are measured along the given axes and every other qubit is left
/// unobserved. Each coalition's bit is the product of its members'
/// outcome signs; no sign convention is applied, the raw statistics are
/// returned.
pub fn joint_distribution(
    psi: &Ket,
    settings: &[(usize, Axis)],
    split: &CoalitionSplit,
) -> Result<ProbTable> {
    split.check_register(psi.num_qubits())?;
    let union = split.union();
    let n = psi.num_qubits();

    let mut axis_of: Vec<Option<Axis>> = vec![None; n];
    for &(q, axis) in settings {
        if axis == Axis::Z {
            return Err(Error::invalid("partners measure only sigma_x or sigma_y"));
        }
        if q >= n {
            return Err(Error::invalid(format!("setting on out-of-range qubit {q}")));
        }
        if axis_of[q].is_some() {
            return Err(Error::invalid(format!("duplicate setting for qubit {q}")));
        }
        axis_of[q] = Some(axis);
    }
    for &q in &union {
        if axis_of[q].is_none() {
            return Err(Error::invalid(format!(
                "coalition qubit {q} has no measurement setting"
            )));
        }
    }
    for (q, slot) in axis_of.iter().enumerate() {
        if slot.is_some() && !union.contains(&q) {
            return Err(Error::invalid(format!(
                "setting given for qubit {q} outside the split"
            )));
        }
    }

    let amps = measurement_amplitudes(psi, &axis_of);
    let sign_product = |idx: usize, members: &[usize]| -> i8 {
        members
            .iter()
            .map(|&q| if bit_of(idx, q, n) == 0 { 1i8 } else { -1 })
            .product()
    };

    let mut entries: BTreeMap<Vec<i8>, f64> = BTreeMap::new();
    for outcome_l in [1i8, -1] {
        for outcome_r in [1i8, -1] {
            entries.insert(vec![outcome_l, outcome_r], 0.0);
        }
    }
    for (idx, a) in amps.iter().enumerate() {
        let p = a.norm_sqr();
        if p == 0.0 {
            continue;
        }
        let key = vec![
            sign_product(idx, &split.left),
            sign_product(idx, &split.right),
        ];
        *entries.get_mut(&key).expect("key present") += p;
    }

    ProbTable::new(
        vec![
            CoalitionSplit::label(&split.left),
            CoalitionSplit::label(&split.right),
        ],
        entries,
    )
}

/// All measurement-axis assignments over `union` with an even number of
/// sigma_y settings, i.e. the rounds the protocol retains.
fn retained_assignments(union: &[usize]) -> Vec<Vec<(usize, Axis)>> {
    let u = union.len();
    let mut out = Vec::new();
    for mask in 0..(1usize << u) {
        if (mask.count_ones() as usize) % 2 != 0 {
            continue;
        }
        out.push(
            union
                .iter()
                .enumerate()
                .map(|(slot, &q)| {
                    let axis = if (mask >> slot) & 1 == 1 { Axis::Y } else { Axis::X };
                    (q, axis)
                })
                .collect(),
        );
    }
    out
}

/// Mutual information between the two coalitions of `split`, in bits:
/// the average, over every retained axis assignment on the measured
/// qubits, of I(left bit : right bit) from the Born-rule table. Qubits
/// outside the split are unobserved.
pub fn mutual_information(psi: &Ket, split: &CoalitionSplit) -> Result<f64> {
    split.check_register(psi.num_qubits())?;
    let union = split.union();
    let assignments = retained_assignments(&union);
    let mut total = 0.0;
    for settings in &assignments {
        let table = joint_distribution(psi, settings, split)?;
        total += table.mutual_information()?;
    }
    Ok(total / assignments.len() as f64)
}

/// Average sifted disagreement between two single qubits: the mean over
/// retained assignments of the two bits differing, after folding in the
/// deterministic sign relabeling the partners agree on during sifting
/// (reported as min(D, 1-D), which leaves the mutual information
/// unchanged and makes the x and y statistics directly comparable).
pub fn sifted_pair_disagreement(psi: &Ket, a: usize, b: usize) -> Result<f64> {
    let split = CoalitionSplit::new(vec![a], vec![b])?;
    let assignments = retained_assignments(&split.union());
    let mut total = 0.0;
    for settings in &assignments {
        let d = joint_distribution(psi, settings, &split)?.disagreement()?;
        total += d.min(1.0 - d);
    }
    Ok(total / assignments.len() as f64)
}

/// The three pair labels of the two-partner protocol: sender/receiver,
/// sender/probe and receiver/probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairKind {
    AB,
    AE,
    BE,
}

/// Closed-form disagreement probabilities of the two-partner protocol
/// under the optimal attack:
///
///   D_AB = (1 - cos phi)/2,
///   D_AE = (1 - sin phi)/2,
///   D_BE = (1 - sin 2phi)/2.
///
/// D_AB and D_AE equal the sifted Born statistics of the corresponding
/// pair reductions. D_BE is the statistic of the attacked branch
/// cos(phi)|10> + sin(phi)|01> alone; the full reduction, which mixes in
/// the unattacked branch |00> with weight 1/2, yields (2 - sin 2phi)/4.
pub fn disagreement_closed_form(pair: PairKind, phi: f64) -> Result<f64> {
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&phi) {
        return Err(Error::invalid(format!(
            "attack strength must lie in [0, pi/2], got {phi}"
        )));
    }
    Ok(match pair {
        PairKind::AB => (1.0 - phi.cos()) / 2.0,
        PairKind::AE => (1.0 - phi.sin()) / 2.0,
        PairKind::BE => (1.0 - (2.0 * phi).sin()) / 2.0,
    })
}

/// Closed-form mutual informations (I_a, I_u) of the authorized and
/// unauthorized coalitions for the given scenario:
///
///   I_a = 1 - H({D_AB, 1-D_AB}),  I_u = 1 - H({D_AE, 1-D_AE}),
///
/// independent of N and n. The state-based route
/// [`coalition_informations_from_state`] agrees to within 1e-9.
pub fn coalition_informations(sc: &AttackScenario) -> (f64, f64) {
    let d_ab = (1.0 - sc.phi().cos()) / 2.0;
    let d_ae = (1.0 - sc.phi().sin()) / 2.0;
    (1.0 - binary_entropy(d_ab), 1.0 - binary_entropy(d_ae))
}

/// (I_a, I_u) computed from the post-attack state: I_a between the sender
/// and all receivers (probe unobserved), I_u between the sender and the
/// dishonest receivers plus the probe (spied receivers unobserved).
pub fn coalition_informations_from_state(sc: &AttackScenario) -> Result<(f64, f64)> {
    let psi = attacked_state(sc)?;
    let n = sc.partners();
    let receivers: Vec<usize> = (1..n).collect();
    let authorized = CoalitionSplit::new(vec![0], receivers)?;
    let i_a = mutual_information(&psi, &authorized)?;

    let mut unauthorized_right: Vec<usize> = (1..n - sc.spied()).collect();
    unauthorized_right.push(n); // the probe qubit
    let unauthorized = CoalitionSplit::new(vec![0], unauthorized_right)?;
    let i_u = mutual_information(&psi, &unauthorized)?;
    Ok((i_a, i_u))
}
