//! Double violations over overlapping qubit subsets.
//!
//! For subsets N (n qubits) and M (m qubits, m <= n) of a k-qubit
//! register, the search maximizes the largest eigenvalue of
//!
//!   V = B_n(a) on N  +  2^((n-m)/2) B_m(A) on M
//!
//! over both setting sets. If the maximum stays at or below 2 * 2^(n/2),
//! no state can put both subsets above their violation thresholds
//! 2^(n/2) and 2^(m/2) at once; clearing the bound by more than the
//! configured margin certifies that a double violation is possible.
//!
//! Each ascent step takes the current top eigenvector v of V; the map
//! a_j -> <v|V|v> is linear in each direction, so the per-vector update
//! is closed-form, and lambda_max(V') >= <v|V'|v> >= <v|V|v> keeps the
//! sweep monotone even across eigenvalue crossings.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qlinalg::{max_eigenpair, HermitianOperator, Ket};

use super::optimizer::{BellResult, OptimizerConfig};
use super::{maximize_bell, mk_pair_raw, RawSettings, SettingSet};

use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};

/// Largest register the eigenvalue search accepts.
pub const MAX_OVERLAP_QUBITS: usize = 8;

/// Default restart budget per register size: the full 64 through six
/// qubits, reduced on the 128- and 256-dimensional registers where each
/// sweep's dense eigensolve dominates the cost.
pub fn recommended_restarts(total_qubits: usize) -> usize {
    match total_qubits {
        0..=6 => 64,
        7 => 24,
        _ => 16,
    }
}

/// Two overlapping subsets of a k-qubit register with the weight applied
/// to the smaller subset's operator.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapSpec {
    total: usize,
    subset_big: Vec<usize>,
    subset_small: Vec<usize>,
    weight: f64,
}

impl OverlapSpec {
    pub fn new(
        total: usize,
        subset_big: Vec<usize>,
        subset_small: Vec<usize>,
        weight: f64,
    ) -> Result<Self> {
        if subset_big.len() < 2 || subset_small.len() < 2 {
            return Err(Error::invalid("subsets need at least 2 qubits each"));
        }
        if subset_small.len() > subset_big.len() {
            return Err(Error::invalid(
                "the first subset must be the larger one (n >= m)",
            ));
        }
        for list in [&subset_big, &subset_small] {
            for (i, q) in list.iter().enumerate() {
                if *q >= total {
                    return Err(Error::invalid(format!("qubit {q} out of range")));
                }
                if list[i + 1..].contains(q) {
                    return Err(Error::invalid(format!("duplicate qubit {q} in subset")));
                }
            }
        }
        let mut sorted_big = subset_big.clone();
        let mut sorted_small = subset_small.clone();
        sorted_big.sort_unstable();
        sorted_small.sort_unstable();
        if sorted_big == sorted_small {
            return Err(Error::invalid("subsets must be distinct"));
        }
        if !subset_small.iter().any(|q| subset_big.contains(q)) {
            return Err(Error::invalid("subsets must overlap"));
        }
        if !(weight > 0.0) {
            return Err(Error::invalid("weight must be positive"));
        }
        Ok(OverlapSpec {
            total,
            subset_big,
            subset_small,
            weight,
        })
    }

    /// The standard layout: the larger subset on the first n qubits, the
    /// smaller on the last m, overlap in the middle, with the weight
    /// 2^((n-m)/2) that makes the impossibility threshold additive.
    pub fn canonical(total: usize, n: usize, m: usize) -> Result<Self> {
        if n > total || m > total {
            return Err(Error::invalid("subset sizes exceed the register"));
        }
        let weight = 2f64.powf((n as f64 - m as f64) / 2.0);
        OverlapSpec::new(
            total,
            (0..n).collect(),
            (total - m..total).collect(),
            weight,
        )
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn subset_big(&self) -> &[usize] {
        &self.subset_big
    }

    pub fn subset_small(&self) -> &[usize] {
        &self.subset_small
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// 2 * 2^(n/2): the additive bound below which a double violation is
    /// impossible.
    pub fn threshold(&self) -> f64 {
        2.0 * 2f64.powf(self.subset_big.len() as f64 / 2.0)
    }

    fn assemble(&self, raw_big: &RawSettings, raw_small: &RawSettings) -> HermitianOperator {
        let (b_big, _) = mk_pair_raw(raw_big);
        let (b_small, _) = mk_pair_raw(raw_small);
        let big = b_big
            .embed(self.total, &self.subset_big)
            .expect("validated subsets");
        let small = b_small
            .embed(self.total, &self.subset_small)
            .expect("validated subsets");
        big.add(&small.scale(self.weight)).expect("same register")
    }
}

/// Whether a double violation can occur for the given overlap geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Possible,
    Impossible,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Possible => write!(f, "possible"),
            Verdict::Impossible => write!(f, "impossible"),
        }
    }
}

/// Maximize the top eigenvalue of the weighted two-subset operator over
/// both setting sets and classify the geometry. The verdict is
/// `Possible` only when the maximum clears the threshold by more than
/// `cfg.margin`, since several geometries sit exactly at the bound.
pub fn overlap_search(spec: &OverlapSpec, cfg: &OptimizerConfig) -> Result<(f64, Verdict)> {
    if spec.total > MAX_OVERLAP_QUBITS {
        return Err(Error::resource(format!(
            "overlap search is capped at {MAX_OVERLAP_QUBITS} qubits, got {}",
            spec.total
        )));
    }
    if cfg.restarts == 0 {
        return Err(Error::invalid("restart budget must be positive"));
    }

    let n = spec.subset_big.len();
    let m = spec.subset_small.len();
    let mut best = f64::NEG_INFINITY;
    let mut since_improvement = 0usize;

    for restart in 0..cfg.restarts {
        let (mut raw_big, mut raw_small) = if restart == 0 {
            (
                super::raw_from_settings(&SettingSet::canonical(n)?),
                super::raw_from_settings(&SettingSet::canonical(m)?),
            )
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(restart as u64);
            (random_raw(n, &mut rng), random_raw(m, &mut rng))
        };

        let mut lambda = top_eigenvalue(spec, &raw_big, &raw_small)?;
        for _ in 0..cfg.max_sweeps {
            let previous = lambda;
            let (_, v) = max_eigenpair(&spec.assemble(&raw_big, &raw_small))?;
            let rho_big = v.reduced_density(&spec.subset_big)?;
            let rho_small = v.reduced_density(&spec.subset_small)?;
            update_settings(&rho_big, &mut raw_big);
            update_settings(&rho_small, &mut raw_small);
            lambda = top_eigenvalue(spec, &raw_big, &raw_small)?;
            debug_assert!(lambda >= previous - 1e-9, "eigenvalue ascent regressed");
            if lambda - previous < cfg.tol {
                break;
            }
        }

        if lambda > best + cfg.tol {
            best = lambda;
            since_improvement = 0;
        } else {
            since_improvement += 1;
            best = best.max(lambda);
        }
        if since_improvement >= cfg.stable_window {
            break;
        }
    }

    let verdict = if best > spec.threshold() + cfg.margin {
        Verdict::Possible
    } else {
        Verdict::Impossible
    };
    Ok((best, verdict))
}

fn top_eigenvalue(
    spec: &OverlapSpec,
    raw_big: &RawSettings,
    raw_small: &RawSettings,
) -> Result<f64> {
    let (lambda, _) = max_eigenpair(&spec.assemble(raw_big, raw_small))?;
    Ok(lambda)
}

/// Closed-form coordinate update of every direction in one subset's
/// operator against the reduced state of the current top eigenvector.
/// The positive subset weight scales the gradient uniformly and drops
/// out of the normalized update.
fn update_settings(rho: &HermitianOperator, raw: &mut RawSettings) {
    let m = raw.len();
    for k in 0..m {
        for slot in 0..2 {
            let mut probe = raw.clone();
            probe[k][slot] = [0.0, 0.0, 0.0];
            let base = value_against(rho, &probe);
            let mut g = [0.0f64; 3];
            for axis in 0..3 {
                let mut unit = [0.0, 0.0, 0.0];
                unit[axis] = 1.0;
                probe[k][slot] = unit;
                g[axis] = value_against(rho, &probe) - base;
            }
            let norm = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
            if norm >= 1e-14 {
                raw[k][slot] = [g[0] / norm, g[1] / norm, g[2] / norm];
            }
        }
    }
}

fn value_against(rho: &HermitianOperator, raw: &RawSettings) -> f64 {
    let (b, _) = mk_pair_raw(raw);
    crate::qlinalg::expectation(rho, &b).expect("Bell expectation is real")
}

fn random_raw<R: Rng>(m: usize, rng: &mut R) -> RawSettings {
    let unit = |rng: &mut R| -> [f64; 3] {
        let z: f64 = rng.random_range(-1.0..1.0);
        let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let r = (1.0 - z * z).sqrt();
        [r * t.cos(), r * t.sin(), z]
    };
    (0..m).map(|_| [unit(rng), unit(rng)]).collect()
}

/// Best Bell values of the two reduced states of `psi`, maximized
/// independently over settings.
pub fn verify_double_violation_state(
    psi: &Ket,
    first: &[usize],
    second: &[usize],
    cfg: &OptimizerConfig,
) -> Result<(BellResult, BellResult)> {
    let rho_first = psi.reduced_density(first)?;
    let rho_second = psi.reduced_density(second)?;
    let s1 = maximize_bell(&rho_first, first.len(), cfg)?;
    let s2 = maximize_bell(&rho_second, second.len(), cfg)?;
    Ok((s1, s2))
}

/// The four-qubit family
///
///   cos(alpha)(|0011> + |1100> + i|0101> + i|1010>)/2
///     + sin(alpha)(i|1001> + |1111>)/sqrt(2)
///
/// whose triples {0,1,2} and {1,2,3} both reach a Bell value of 3 near
/// alpha = 0.955, above the 2 sqrt 2 that any three-qubit reduction of a
/// double-violation-free state could deliver.
pub fn counterexample_state(alpha: f64) -> Result<Ket> {
    let c = alpha.cos() / 2.0;
    let s = alpha.sin() * std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![Complex64::ZERO; 16];
    amps[0b0011] = Complex64::new(c, 0.0);
    amps[0b1100] = Complex64::new(c, 0.0);
    amps[0b0101] = Complex64::new(0.0, c);
    amps[0b1010] = Complex64::new(0.0, c);
    amps[0b1001] = Complex64::new(0.0, s);
    amps[0b1111] = Complex64::new(s, 0.0);
    Ket::new(4, amps)
}

/// One row of the reference double-violation table.
#[derive(Debug, Clone)]
pub struct OverlapCase {
    /// 1-based position in the reference list.
    pub index: usize,
    /// Human-readable form, e.g. "S(ABCD) + 2 S(DE)".
    pub label: String,
    pub k: usize,
    pub n: usize,
    pub m: usize,
    /// Reference maximum of the weighted sum.
    pub reference: f64,
    /// Reference verdict.
    pub expected_possible: bool,
}

impl OverlapCase {
    pub fn spec(&self) -> OverlapSpec {
        OverlapSpec::canonical(self.k, self.n, self.m).expect("catalog rows are valid")
    }

    pub fn threshold(&self) -> f64 {
        2.0 * 2f64.powf(self.n as f64 / 2.0)
    }
}

fn case_label(k: usize, n: usize, m: usize) -> String {
    let letters: Vec<char> = (0..k).map(|i| (b'A' + i as u8) as char).collect();
    let big: String = letters[..n].iter().collect();
    let small: String = letters[k - m..].iter().collect();
    let diff = n - m;
    let weight = match diff {
        0 => String::new(),
        1 => "sqrt(2) ".to_string(),
        2 => "2 ".to_string(),
        _ => format!("2^({diff}/2) "),
    };
    format!("S({big}) + {weight}S({small})")
}

/// The 17 tabulated overlap geometries with their reference maxima and
/// verdicts, in list order.
pub fn overlap_catalog() -> Vec<OverlapCase> {
    let sqrt2 = std::f64::consts::SQRT_2;
    let rows: [(usize, usize, usize, f64, bool); 17] = [
        (3, 2, 2, 4.0, false),
        (5, 3, 3, 4.0 * sqrt2, false),
        (4, 3, 3, 6.0945, true),
        (4, 3, 2, 4.0 * sqrt2, false),
        (3, 3, 2, 6.9282, true),
        (7, 4, 4, 8.0, false),
        (6, 4, 4, 8.612, true),
        (5, 4, 4, 8.0, false),
        (5, 4, 2, 8.0, false),
        (4, 4, 2, 9.7566, true),
        (6, 4, 3, 8.0, false),
        (5, 4, 3, 6.0 * sqrt2, true),
        (4, 4, 3, 9.6566, true),
        (8, 5, 5, 12.088, true),
        (7, 5, 5, 8.0 * sqrt2, false),
        (6, 5, 5, 8.0 * sqrt2, false),
        (6, 5, 3, 12.18, true),
    ];
    rows.iter()
        .enumerate()
        .map(|(i, &(k, n, m, reference, expected_possible))| OverlapCase {
            index: i + 1,
            label: case_label(k, n, m),
            k,
            n,
            m,
            reference,
            expected_possible,
        })
        .collect()
}


#[cfg(test)]
mod verification_tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;

    // Independent check of the ascent's reported eigenvalue: rebuild V at
    // the ascent's final settings and power-iterate it with a plain
    // matvec, sharing nothing with the dense eigensolver.
    fn power_top(v: &HermitianOperator, iters: usize, shift: f64) -> f64 {
        let n = v.dim();
        let mut x: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(1.0 + (i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        for _ in 0..iters {
            let mut y = vec![Complex64::ZERO; n];
            for r in 0..n {
                let mut acc = x[r] * shift;
                for c in 0..n {
                    acc += v.entry(r, c) * x[c];
                }
                y[r] = acc;
            }
            let norm: f64 = y.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            for a in y.iter_mut() {
                *a /= norm;
            }
            x = y;
        }
        let mut acc = Complex64::ZERO;
        for r in 0..n {
            let mut row = Complex64::ZERO;
            for c in 0..n {
                row += v.entry(r, c) * x[c];
            }
            acc += x[r].conj() * row;
        }
        acc.re
    }

    fn best_settings_for(
        spec: &OverlapSpec,
        cfg: &OptimizerConfig,
    ) -> (f64, RawSettings, RawSettings) {
        let n = spec.subset_big().len();
        let m = spec.subset_small().len();
        let mut best = f64::NEG_INFINITY;
        let mut best_raw = None;
        for restart in 0..cfg.restarts {
            let (mut raw_big, mut raw_small) = if restart == 0 {
                (
                    super::super::raw_from_settings(&SettingSet::canonical(n).unwrap()),
                    super::super::raw_from_settings(&SettingSet::canonical(m).unwrap()),
                )
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(restart as u64);
                (random_raw(n, &mut rng), random_raw(m, &mut rng))
            };
            let mut lambda = top_eigenvalue(spec, &raw_big, &raw_small).unwrap();
            for _ in 0..cfg.max_sweeps {
                let previous = lambda;
                let (_, v) = max_eigenpair(&spec.assemble(&raw_big, &raw_small)).unwrap();
                update_settings(&v.reduced_density(spec.subset_big()).unwrap(), &mut raw_big);
                update_settings(
                    &v.reduced_density(spec.subset_small()).unwrap(),
                    &mut raw_small,
                );
                lambda = top_eigenvalue(spec, &raw_big, &raw_small).unwrap();
                if lambda - previous < cfg.tol {
                    break;
                }
            }
            if lambda > best {
                best = lambda;
                best_raw = Some((raw_big, raw_small));
            }
        }
        let (b, s) = best_raw.unwrap();
        (best, b, s)
    }

    #[test]
    fn ascent_maxima_survive_power_iteration_cross_check() {
        // The two geometries whose maxima exceed their reference values;
        // confirm the reported eigenvalues against an independent route.
        for (k, n, m, restarts, floor) in
            [(5usize, 4usize, 3usize, 12usize, 8.60), (8, 5, 5, 4, 12.15)]
        {
            let spec = OverlapSpec::canonical(k, n, m).unwrap();
            let cfg = OptimizerConfig {
                restarts,
                ..OptimizerConfig::default()
            };
            let (lambda, raw_big, raw_small) = best_settings_for(&spec, &cfg);
            let v = spec.assemble(&raw_big, &raw_small);
            let independent = power_top(&v, 2500, 2.0 * spec.threshold());
            assert!(
                (independent - lambda).abs() < 1e-6,
                "power iteration {independent} vs eigensolver {lambda} at k={k}"
            );
            assert!(
                lambda > floor,
                "k={k} geometry reached only {lambda}, expected > {floor}"
            );
        }
    }
}
