//! Protocol states: GHZ states, the x/y/z multiqubit basis family,
//! conditional preparation by partner measurements, and the optimal
//! individual attack.
//!
//! The secret-sharing source distributes |GHZ_N> = (|0^N> + |1^N>)/sqrt(2)
//! and every partner measures sigma_x or sigma_y. Conditioned on the first
//! k partners' results, the remaining qubits are left in one of the four
//! states |0^n>_x, |1^n>_x, |0^n>_y, |1^n>_y; the attack couples a single
//! probe qubit to a block of transmitted qubits.
//!
//! Measurement outcomes are labeled so that a sigma_y result "+ == 0"
//! prepares the remaining block in the state carrying the +i phase; this
//! is the preparation-centric labeling, and it is pinned by the exhaustive
//! conditional-preparation tests below. Outcome signs are +1 for bit 0 and
//! -1 for bit 1.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::qlinalg::{bit_of, Ket, MAX_QUBITS};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Measurement axis. The protocol itself only ever measures X or Y;
/// Z appears in labels for the computational product states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn as_char(&self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }
}

/// Identifies one of |0^w>_axis, |1^w>_axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisLabel {
    pub axis: Axis,
    pub bit: u8,
    pub width: usize,
}

impl BasisLabel {
    pub fn new(axis: Axis, bit: u8, width: usize) -> Result<Self> {
        if bit > 1 {
            return Err(Error::invalid("basis bit must be 0 or 1"));
        }
        if width == 0 || width > MAX_QUBITS {
            return Err(Error::invalid(format!(
                "basis width must be 1..={MAX_QUBITS}, got {width}"
            )));
        }
        Ok(BasisLabel { axis, bit, width })
    }
}

/// One protocol size, number of spied channels and attack strength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackScenario {
    partners: usize,
    spied: usize,
    phi: f64,
}

impl AttackScenario {
    /// `partners` is the protocol size N >= 2, `spied` the number of spied
    /// channels with 1 <= spied <= N-1, and `phi` the attack strength in
    /// [0, pi/2]. Out-of-range values are rejected, not clamped.
    pub fn new(partners: usize, spied: usize, phi: f64) -> Result<Self> {
        if partners < 2 {
            return Err(Error::invalid(format!(
                "protocol needs at least 2 partners, got {partners}"
            )));
        }
        if partners + 1 > MAX_QUBITS {
            return Err(Error::resource(format!(
                "protocol with {partners} partners plus a probe exceeds {MAX_QUBITS} qubits"
            )));
        }
        if spied == 0 || spied >= partners {
            return Err(Error::invalid(format!(
                "spied channels must satisfy 1 <= n <= N-1, got n={spied}, N={partners}"
            )));
        }
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&phi) {
            return Err(Error::invalid(format!(
                "attack strength must lie in [0, pi/2], got {phi}"
            )));
        }
        Ok(AttackScenario {
            partners,
            spied,
            phi,
        })
    }

    /// Number of protocol partners N.
    pub fn partners(&self) -> usize {
        self.partners
    }

    /// Number of spied channels n.
    pub fn spied(&self) -> usize {
        self.spied
    }

    /// Attack strength phi.
    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// Per-partner measurement axes and outcome signs (+1 or -1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementRecord {
    entries: Vec<(Axis, i8)>,
}

impl MeasurementRecord {
    /// Axes are restricted to X and Y; outcomes must be +-1.
    pub fn new(entries: Vec<(Axis, i8)>) -> Result<Self> {
        for &(axis, outcome) in &entries {
            if axis == Axis::Z {
                return Err(Error::invalid(
                    "protocol partners measure only sigma_x or sigma_y",
                ));
            }
            if outcome != 1 && outcome != -1 {
                return Err(Error::invalid(format!(
                    "outcome sign must be +-1, got {outcome}"
                )));
            }
        }
        Ok(MeasurementRecord { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(Axis, i8)] {
        &self.entries
    }

    pub fn y_count(&self) -> usize {
        self.entries.iter().filter(|(a, _)| *a == Axis::Y).count()
    }

    pub fn outcome_product(&self) -> i8 {
        self.entries.iter().map(|&(_, s)| s).product()
    }
}

/// The N-qubit GHZ state (|0^N> + |1^N>)/sqrt(2).
pub fn ghz(n: usize) -> Result<Ket> {
    if !(2..=MAX_QUBITS).contains(&n) {
        return Err(Error::invalid(format!(
            "GHZ width must be 2..={MAX_QUBITS}, got {n}"
        )));
    }
    let dim = 1usize << n;
    let mut amps = vec![Complex64::ZERO; dim];
    amps[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    amps[dim - 1] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    Ket::new(n, amps)
}

/// The labeled basis state. For axis Z this is a computational product
/// state; for X and Y it is the GHZ-type superposition
/// (|0^w> + p |1^w>)/sqrt(2) with p = +-1 (X) or +-i (Y), the sign
/// following the bit.
pub fn basis_state(label: &BasisLabel) -> Result<Ket> {
    let w = label.width;
    let dim = 1usize << w;
    let sign = if label.bit == 0 { 1.0 } else { -1.0 };
    match label.axis {
        Axis::Z => Ket::basis(w, if label.bit == 0 { 0 } else { dim - 1 }),
        Axis::X => {
            let mut amps = vec![Complex64::ZERO; dim];
            amps[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
            amps[dim - 1] = Complex64::new(sign * FRAC_1_SQRT_2, 0.0);
            Ket::new(w, amps)
        }
        Axis::Y => {
            let mut amps = vec![Complex64::ZERO; dim];
            amps[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
            amps[dim - 1] = Complex64::new(0.0, sign * FRAC_1_SQRT_2);
            Ket::new(w, amps)
        }
    }
}

/// The (N+1)-qubit state shared by the partners and the probe after the
/// optimal attack on the last n channels:
///
///   (|0^(N-n)>|0^n>|0> + cos(phi) |1^(N-n)>|1^n>|0>
///                      + sin(phi) |1^(N-n)>|0^n>|1>) / sqrt(2)
///
/// Register order: sender plus honest receivers (N-n qubits), spied
/// receivers (n qubits), probe (1 qubit).
pub fn attacked_state(sc: &AttackScenario) -> Result<Ket> {
    let n_total = sc.partners + 1;
    let dim = 1usize << n_total;
    let mut amps = vec![Complex64::ZERO; dim];
    let half = Complex64::new(FRAC_1_SQRT_2, 0.0);
    // |0...0>
    amps[0] = half;
    // |1^N, probe 0>
    amps[dim - 2] += half * sc.phi.cos();
    // |1^(N-n), 0^n, probe 1>
    let idx = (dim - (1 << (sc.spied + 1))) | 1;
    amps[idx] += half * sc.phi.sin();
    Ket::new(n_total, amps)
}

/// Append a probe qubit in |0> and apply the attack isometry on the spied
/// block:
///
///   |0^n>|0>  ->  |0^n>|0>
///   |1^n>|0>  ->  cos(phi)|1^n>|0> + sin(phi)|0^n>|1>
///
/// The isometry is defined only on the span of |0^n> and |1^n> over the
/// spied qubits; input amplitude on any other spied-block pattern is
/// rejected. Protocol states never populate those patterns.
pub fn apply_attack(input: &Ket, spied: &[usize], phi: f64) -> Result<Ket> {
    if spied.is_empty() {
        return Err(Error::invalid("spied set must be nonempty"));
    }
    let n = input.num_qubits();
    if n + 1 > MAX_QUBITS {
        return Err(Error::resource(format!(
            "attack output would exceed {MAX_QUBITS} qubits"
        )));
    }
    for &q in spied {
        if q >= n {
            return Err(Error::invalid(format!(
                "spied qubit {q} out of range for {n}-qubit register"
            )));
        }
    }
    for (i, &q) in spied.iter().enumerate() {
        if spied[i + 1..].contains(&q) {
            return Err(Error::invalid(format!("duplicate spied qubit {q}")));
        }
    }
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&phi) {
        return Err(Error::invalid(format!(
            "attack strength must lie in [0, pi/2], got {phi}"
        )));
    }

    let (c, s) = (phi.cos(), phi.sin());
    let mut amps = vec![Complex64::ZERO; 1 << (n + 1)];
    for (idx, &a) in input.amplitudes().iter().enumerate() {
        if a == Complex64::ZERO {
            continue;
        }
        let ones = spied.iter().filter(|&&q| bit_of(idx, q, n) == 1).count();
        if ones == 0 {
            // Probe appended as the last (least significant) qubit.
            amps[idx << 1] += a;
        } else if ones == spied.len() {
            amps[idx << 1] += a * c;
            let mut cleared = idx;
            for &q in spied {
                cleared &= !(1usize << (n - 1 - q));
            }
            amps[(cleared << 1) | 1] += a * s;
        } else {
            return Err(Error::unsupported(
                "spied block has support outside span{|0^n>, |1^n>}",
            ));
        }
    }
    Ket::new(n + 1, amps)
}

/// Single-qubit measurement vector for (axis, bit): the state whose
/// detection is labeled with that bit. X: (|0> + t|1>)/sqrt(2) and
/// Y: (|0> - i t |1>)/sqrt(2) with t = +1 for bit 0, -1 for bit 1.
///
/// The Y convention is preparation-centric: a partner reporting bit b in
/// the Y basis leaves the rest of a GHZ state carrying the phase i(-1)^b,
/// i.e. exactly the state `basis_state` labels with bit b.
pub(crate) fn measurement_vector(axis: Axis, bit: u8) -> [Complex64; 2] {
    let t = if bit == 0 { 1.0 } else { -1.0 };
    match axis {
        Axis::X => [
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::new(t * FRAC_1_SQRT_2, 0.0),
        ],
        Axis::Y => [
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::new(0.0, -t * FRAC_1_SQRT_2),
        ],
        Axis::Z => {
            if bit == 0 {
                [Complex64::ONE, Complex64::ZERO]
            } else {
                [Complex64::ZERO, Complex64::ONE]
            }
        }
    }
}

/// Rotate the listed qubits into their measurement bases: the returned
/// amplitude at basis index i is the overlap of psi with the product of
/// measurement vectors selected by the bits of i (qubits without an axis
/// stay in the computational basis).
pub(crate) fn measurement_amplitudes(psi: &Ket, axes: &[Option<Axis>]) -> Vec<Complex64> {
    let n = psi.num_qubits();
    assert_eq!(axes.len(), n, "one axis slot per qubit");
    let mut amps = psi.amplitudes().to_vec();
    for (q, axis) in axes.iter().enumerate() {
        let Some(axis) = axis else { continue };
        let m0 = measurement_vector(*axis, 0);
        let m1 = measurement_vector(*axis, 1);
        let stride = 1usize << (n - 1 - q);
        for base in 0..amps.len() {
            if base & stride != 0 {
                continue;
            }
            let lo = amps[base];
            let hi = amps[base | stride];
            amps[base] = m0[0].conj() * lo + m0[1].conj() * hi;
            amps[base | stride] = m1[0].conj() * lo + m1[1].conj() * hi;
        }
    }
    amps
}

/// Label of the pure state left on the unmeasured block of a GHZ state
/// after the first partners report the given record. Axis is X when the
/// number of sigma_y measurements is even and Y when odd; the bit follows
/// by projecting the GHZ state and identifying the result.
pub fn conditional_state(ghz_width: usize, measured: &MeasurementRecord) -> Result<BasisLabel> {
    let k = measured.len();
    if k == 0 || k >= ghz_width {
        return Err(Error::invalid(format!(
            "measured record must cover 1..={} partners, got {k}",
            ghz_width.saturating_sub(1)
        )));
    }
    let source = ghz(ghz_width)?;
    let remaining = ghz_width - k;

    // Project the first k qubits onto their outcome states.
    let dim_rem = 1usize << remaining;
    let mut projected = vec![Complex64::ZERO; dim_rem];
    for (idx, &a) in source.amplitudes().iter().enumerate() {
        if a == Complex64::ZERO {
            continue;
        }
        let mut coeff = a;
        for (q, &(axis, outcome)) in measured.entries().iter().enumerate() {
            let bit = if outcome == 1 { 0 } else { 1 };
            let m = measurement_vector(axis, bit);
            coeff *= m[bit_of(idx, q, ghz_width)].conj();
        }
        projected[idx & (dim_rem - 1)] += coeff;
    }
    let state = Ket::normalized(remaining, projected)?;

    for axis in [Axis::X, Axis::Y] {
        for bit in [0u8, 1u8] {
            let label = BasisLabel::new(axis, bit, remaining)?;
            let candidate = basis_state(&label)?;
            if candidate.inner(&state)?.norm() > 1.0 - 1e-9 {
                return Ok(label);
            }
        }
    }
    Err(Error::Numerical(
        "projected state does not match any prepared-state label".into(),
    ))
}

/// Outcome of comparing one round's outcomes against the GHZ correlation.
///
/// Rounds in which an odd number of partners measured sigma_y carry no
/// correlation and are discarded (`None`); otherwise the check is whether
/// the product of outcome signs equals the sign of <prod sigma> on the
/// GHZ state, which is computed directly rather than read from a table.
pub fn sift_check(record: &MeasurementRecord) -> Result<Option<bool>> {
    let n = record.len();
    if n < 2 {
        return Err(Error::invalid("sifting needs at least two partners"));
    }
    if n > MAX_QUBITS {
        return Err(Error::resource(format!(
            "record exceeds {MAX_QUBITS} partners"
        )));
    }
    if record.y_count() % 2 == 1 {
        return Ok(None);
    }
    let expected = ghz_correlation(n, record)?;
    Ok(Some(record.outcome_product() == expected))
}

/// <GHZ_N| prod_k sigma_(axis_k) |GHZ_N>, evaluated by applying the Pauli
/// string to the state. The result is +-1 for even y-count.
fn ghz_correlation(n: usize, record: &MeasurementRecord) -> Result<i8> {
    let state = ghz(n)?;
    let mut applied = vec![Complex64::ZERO; state.dim()];
    for (idx, &a) in state.amplitudes().iter().enumerate() {
        if a == Complex64::ZERO {
            continue;
        }
        // sigma_x flips a bit; sigma_y flips with phase +-i.
        let mut phase = Complex64::ONE;
        let mut target = idx;
        for (q, &(axis, _)) in record.entries().iter().enumerate() {
            let bit = bit_of(idx, q, n);
            target ^= 1usize << (n - 1 - q);
            if axis == Axis::Y {
                phase *= if bit == 0 {
                    Complex64::new(0.0, 1.0)
                } else {
                    Complex64::new(0.0, -1.0)
                };
            }
        }
        applied[target] += phase * a;
    }
    let mut acc = Complex64::ZERO;
    for (idx, &a) in state.amplitudes().iter().enumerate() {
        acc += a.conj() * applied[idx];
    }
    if (acc.norm() - 1.0).abs() > 1e-10 || acc.im.abs() > 1e-10 {
        return Err(Error::Numerical(format!(
            "GHZ correlation is not +-1: {acc}"
        )));
    }
    Ok(if acc.re > 0.0 { 1 } else { -1 })
}

/// Measure every qubit of `psi` in the given axes, sampling one outcome
/// tuple from the Born distribution. Outcome signs are +1 for bit 0.
pub fn sample_round<R: Rng>(psi: &Ket, axes: &[Axis], rng: &mut R) -> Result<Vec<i8>> {
    let n = psi.num_qubits();
    if axes.len() != n {
        return Err(Error::invalid("one measurement axis per qubit required"));
    }
    let slots: Vec<Option<Axis>> = axes.iter().copied().map(Some).collect();
    let amps = measurement_amplitudes(psi, &slots);
    let mut draw: f64 = rng.random_range(0.0..1.0);
    let mut chosen = amps.len() - 1;
    for (idx, a) in amps.iter().enumerate() {
        draw -= a.norm_sqr();
        if draw <= 0.0 {
            chosen = idx;
            break;
        }
    }
    Ok((0..n)
        .map(|q| if bit_of(chosen, q, n) == 0 { 1 } else { -1 })
        .collect())
}
