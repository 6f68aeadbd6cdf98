//! Multi-start coordinate ascent over measurement settings.
//!
//! Tr(rho B_M(a)) is linear in each direction vector separately, so the
//! optimal update of one vector with all others fixed is closed-form: the
//! objective restricted to a_k is g . a_k + const, maximized on the unit
//! sphere by a_k = g/|g|. Sweeping all 2M vectors this way never
//! decreases the objective; random restarts handle the local maxima the
//! multilinear landscape does have.

use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qlinalg::{expectation, HermitianOperator};
use crate::tolerances::BELL_CEILING_SLACK;

use super::{mk_pair_raw, raw_from_settings, settings_from_raw, RawSettings, SettingSet};

/// Budget and reproducibility knobs for every optimization in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizerConfig {
    /// Number of independent starts (the first is the canonical x/y set,
    /// the rest are uniform random directions).
    pub restarts: usize,
    /// Stop a single ascent when a full sweep improves the objective by
    /// less than this.
    pub tol: f64,
    /// A double-violation verdict counts as "possible" only if the
    /// maximum clears the threshold by this much.
    pub margin: f64,
    /// The best value counts as stabilized after this many consecutive
    /// restarts without improvement; the search then stops early.
    pub stable_window: usize,
    /// Seed for the restart streams. Identical seeds give bit-identical
    /// results.
    pub seed: u64,
    /// Hard cap on ascent sweeps per restart.
    pub max_sweeps: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 64,
            tol: 1e-10,
            margin: 1e-4,
            stable_window: 8,
            seed: 17,
            max_sweeps: 500,
        }
    }
}

/// Outcome of a setting optimization.
#[derive(Debug, Clone)]
pub struct BellResult {
    /// Best value of Tr(rho B_M) found.
    pub value: f64,
    /// Settings achieving it.
    pub settings: SettingSet,
    /// Restarts actually run (early stop when the best value stabilizes).
    pub restarts_used: usize,
    /// False when the restart budget ran out before the best value held
    /// still for `stable_window` restarts.
    pub converged: bool,
}

/// Best value of Tr(rho B_M(a)) over all setting sets, by multi-start
/// coordinate ascent. `rho` must be a unit-trace operator on `m` qubits;
/// the result is capped by the quantum ceiling 2^((M+1)/2).
pub fn maximize_bell(rho: &HermitianOperator, m: usize, cfg: &OptimizerConfig) -> Result<BellResult> {
    if m < 2 {
        return Err(Error::invalid("Bell optimization needs M >= 2"));
    }
    if rho.num_qubits() != m {
        return Err(Error::invalid(format!(
            "state acts on {} qubits, expected {m}",
            rho.num_qubits()
        )));
    }
    let trace = rho.trace();
    if (trace.re - 1.0).abs() > 1e-9 || trace.im.abs() > 1e-9 {
        return Err(Error::invalid(format!(
            "expected a unit-trace state, got trace {trace}"
        )));
    }
    let result = maximize_functional(rho, m, cfg)?;
    let ceiling = 2f64.powf((m as f64 + 1.0) / 2.0);
    if result.value > ceiling + BELL_CEILING_SLACK {
        return Err(Error::Numerical(format!(
            "Bell value {} exceeds the quantum ceiling {ceiling}",
            result.value
        )));
    }
    Ok(result)
}

/// Multi-start ascent of Tr(W B_M) for an arbitrary Hermitian weight W,
/// without the density-matrix checks. Diagonal-element optimizations use
/// this directly.
pub(crate) fn maximize_functional(
    weight: &HermitianOperator,
    m: usize,
    cfg: &OptimizerConfig,
) -> Result<BellResult> {
    if cfg.restarts == 0 {
        return Err(Error::invalid("restart budget must be positive"));
    }
    let mut best_value = f64::NEG_INFINITY;
    let mut best_raw: Option<RawSettings> = None;
    let mut since_improvement = 0usize;
    let mut restarts_used = 0usize;
    let mut converged = false;

    for restart in 0..cfg.restarts {
        restarts_used = restart + 1;
        let start = if restart == 0 {
            raw_from_settings(&SettingSet::canonical(m)?)
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(restart as u64);
            random_raw(m, &mut rng)
        };
        let (value, raw, _) = ascend_linear_functional(weight, start, cfg.tol, cfg.max_sweeps);
        if value > best_value + cfg.tol {
            best_value = value;
            best_raw = Some(raw);
            since_improvement = 0;
        } else {
            since_improvement += 1;
            if value > best_value {
                best_value = value;
                best_raw = Some(raw);
            }
        }
        if since_improvement >= cfg.stable_window {
            converged = true;
            break;
        }
    }

    let raw = best_raw.expect("at least one restart ran");
    Ok(BellResult {
        value: best_value,
        settings: settings_from_raw(&raw)?,
        restarts_used,
        converged,
    })
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

/// One coordinate-ascent run from the given start. Returns the final
/// objective, the settings, and the objective value after every vector
/// update (non-decreasing by construction).
pub(crate) fn ascend_linear_functional(
    weight: &HermitianOperator,
    mut raw: RawSettings,
    tol: f64,
    max_sweeps: usize,
) -> (f64, RawSettings, Vec<f64>) {
    let m = raw.len();
    let mut trajectory = Vec::new();
    let mut current = objective(weight, &raw);
    trajectory.push(current);

    for _ in 0..max_sweeps {
        let sweep_start = current;
        for k in 0..m {
            for slot in 0..2 {
                let (g, constant) = gradient(weight, &raw, k, slot);
                let norm = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
                if norm >= 1e-14 {
                    raw[k][slot] = [g[0] / norm, g[1] / norm, g[2] / norm];
                    current = constant + norm;
                } else {
                    // Flat direction: keep the previous vector.
                    let v = raw[k][slot];
                    current = constant + g[0] * v[0] + g[1] * v[1] + g[2] * v[2];
                }
                trajectory.push(current);
            }
        }
        // Recompute from scratch once per sweep to stop rounding drift.
        current = objective(weight, &raw);
        if current - sweep_start < tol {
            break;
        }
    }
    (current, raw, trajectory)
}

fn objective(weight: &HermitianOperator, raw: &RawSettings) -> f64 {
    let (b, _) = mk_pair_raw(raw);
    expectation(weight, &b).expect("Bell expectation is real")
}

/// Linear profile of the objective in direction (k, slot): returns the
/// coefficient vector g and the constant part, so that the objective is
/// g . v + const as v varies.
fn gradient(
    weight: &HermitianOperator,
    raw: &RawSettings,
    k: usize,
    slot: usize,
) -> ([f64; 3], f64) {
    let mut probe = raw.clone();
    probe[k][slot] = [0.0, 0.0, 0.0];
    let constant = objective(weight, &probe);
    let mut g = [0.0f64; 3];
    for axis in 0..3 {
        let mut unit = [0.0, 0.0, 0.0];
        unit[axis] = 1.0;
        probe[k][slot] = unit;
        g[axis] = objective(weight, &probe) - constant;
    }
    (g, constant)
}
