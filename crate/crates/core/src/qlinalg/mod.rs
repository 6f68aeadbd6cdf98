//! Dense complex linear algebra over small qubit registers.
//!
//! Registers are big-endian: qubit 0 is the most significant bit of the
//! basis index, so |q0 q1 ... q(n-1)> has index q0*2^(n-1) + ... + q(n-1).
//! Every module in the crate shares this convention.

pub mod eigen;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerances::{
    EIGEN_RESIDUAL_TOL, EXPECTATION_IMAG_TOL, HERMITICITY_TOL, NORM_TOL, PSD_TOL, TRACE_TOL,
};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest register any constructor accepts.
pub const MAX_QUBITS: usize = 12;

/// Bit of `qubit` inside basis `index` of an `n`-qubit register.
#[inline]
pub fn bit_of(index: usize, qubit: usize, n: usize) -> usize {
    (index >> (n - 1 - qubit)) & 1
}

/// A normalized pure state over an ordered qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl Ket {
    /// Build a state from explicit amplitudes, checking length and norm.
    pub fn new(num_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::invalid(format!(
                "register must have 1..={MAX_QUBITS} qubits, got {num_qubits}"
            )));
        }
        if amplitudes.len() != 1 << num_qubits {
            return Err(Error::invalid(format!(
                "amplitude vector has length {}, expected 2^{num_qubits}",
                amplitudes.len()
            )));
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::invalid(format!(
                "state is not normalized: |psi|^2 = {norm_sq}"
            )));
        }
        Ok(Ket {
            num_qubits,
            amplitudes,
        })
    }

    /// Build a state from unnormalized amplitudes by rescaling.
    pub fn normalized(num_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm_sq < 1e-28 {
            return Err(Error::invalid("cannot normalize the zero vector"));
        }
        let scale = norm_sq.sqrt().recip();
        Ket::new(
            num_qubits,
            amplitudes.into_iter().map(|a| a * scale).collect(),
        )
    }

    /// Computational basis state |index> on `num_qubits` qubits.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::invalid(format!(
                "basis index {index} out of range for {num_qubits} qubits"
            )));
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Ket::new(num_qubits, amplitudes)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    /// <self|other>.
    pub fn inner(&self, other: &Ket) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::invalid("inner product of mismatched registers"));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Product state on the concatenated register, `self`'s qubits first.
    pub fn tensor(&self, other: &Ket) -> Result<Self> {
        let num_qubits = self.num_qubits + other.num_qubits;
        if num_qubits > MAX_QUBITS {
            return Err(Error::resource(format!(
                "tensor product would exceed {MAX_QUBITS} qubits"
            )));
        }
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Ket::new(num_qubits, amplitudes)
    }

    /// |self><self| as a dense operator.
    pub fn density(&self) -> HermitianOperator {
        let dim = self.dim();
        let mut data = vec![ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                data[r * dim + c] = self.amplitudes[r] * self.amplitudes[c].conj();
            }
        }
        HermitianOperator {
            num_qubits: self.num_qubits,
            data,
        }
    }

    /// Reduced density matrix on `keep`, qubits ordered as listed. Cheaper
    /// than forming the full projector and tracing.
    pub fn reduced_density(&self, keep: &[usize]) -> Result<HermitianOperator> {
        check_keep(keep, self.num_qubits)?;
        let n = self.num_qubits;
        let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let kd = 1usize << keep.len();
        let td = 1usize << traced.len();
        let mut data = vec![ZERO; kd * kd];
        for t in 0..td {
            let base = compose_index(n, &traced, t);
            for a in 0..kd {
                let ia = base | compose_index(n, keep, a);
                let amp_a = self.amplitudes[ia];
                if amp_a == ZERO {
                    continue;
                }
                for b in 0..kd {
                    let ib = base | compose_index(n, keep, b);
                    data[a * kd + b] += amp_a * self.amplitudes[ib].conj();
                }
            }
        }
        Ok(HermitianOperator {
            num_qubits: keep.len(),
            data,
        })
    }
}

/// Scatter the bits of `pattern` (one per entry of `positions`, most
/// significant first) into a full-register basis index.
fn compose_index(n: usize, positions: &[usize], pattern: usize) -> usize {
    let m = positions.len();
    let mut index = 0usize;
    for (slot, &q) in positions.iter().enumerate() {
        let bit = (pattern >> (m - 1 - slot)) & 1;
        index |= bit << (n - 1 - q);
    }
    index
}

fn check_keep(keep: &[usize], n: usize) -> Result<()> {
    if keep.is_empty() {
        return Err(Error::invalid("keep set must be nonempty"));
    }
    for &q in keep {
        if q >= n {
            return Err(Error::invalid(format!(
                "qubit index {q} out of range for {n}-qubit register"
            )));
        }
    }
    for (i, &q) in keep.iter().enumerate() {
        if keep[i + 1..].contains(&q) {
            return Err(Error::invalid(format!("duplicate qubit index {q}")));
        }
    }
    Ok(())
}

/// A dense Hermitian matrix acting on a qubit register: density matrices,
/// observables and Bell operators.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    num_qubits: usize,
    /// Row-major, dimension 2^num_qubits square.
    data: Vec<Complex64>,
}

impl HermitianOperator {
    /// Build from explicit entries, checking Hermiticity.
    pub fn new(num_qubits: usize, data: Vec<Complex64>) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::invalid(format!(
                "operator must act on 1..={MAX_QUBITS} qubits, got {num_qubits}"
            )));
        }
        let dim = 1usize << num_qubits;
        if data.len() != dim * dim {
            return Err(Error::invalid(format!(
                "operator storage has {} entries, expected {}",
                data.len(),
                dim * dim
            )));
        }
        let op = HermitianOperator { num_qubits, data };
        let dev = op.hermiticity_deviation();
        if dev > HERMITICITY_TOL {
            return Err(Error::invalid(format!(
                "matrix is not Hermitian: max deviation {dev:.3e}"
            )));
        }
        Ok(op)
    }

    pub fn identity(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = ONE;
        }
        HermitianOperator { num_qubits, data }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim() + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let dim = self.dim();
        let mut worst: f64 = 0.0;
        for r in 0..dim {
            for c in r..dim {
                worst = worst.max((self.data[r * dim + c] - self.data[c * dim + r].conj()).norm());
            }
        }
        worst
    }

    pub fn trace(&self) -> Complex64 {
        let dim = self.dim();
        (0..dim).map(|i| self.data[i * dim + i]).sum()
    }

    /// Entrywise sum; both operands must act on the same register.
    pub fn add(&self, other: &HermitianOperator) -> Result<Self> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::invalid("adding operators of mismatched dimension"));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(HermitianOperator {
            num_qubits: self.num_qubits,
            data,
        })
    }

    /// Scaling by a real factor preserves Hermiticity.
    pub fn scale(&self, factor: f64) -> Self {
        HermitianOperator {
            num_qubits: self.num_qubits,
            data: self.data.iter().map(|a| a * factor).collect(),
        }
    }

    /// Operator on the concatenated register, `self`'s qubits first.
    pub fn tensor(&self, other: &HermitianOperator) -> Result<Self> {
        let num_qubits = self.num_qubits + other.num_qubits;
        if num_qubits > MAX_QUBITS {
            return Err(Error::resource(format!(
                "tensor product would exceed {MAX_QUBITS} qubits"
            )));
        }
        let da = self.dim();
        let db = other.dim();
        let dim = da * db;
        let mut data = vec![ZERO; dim * dim];
        for ra in 0..da {
            for ca in 0..da {
                let f = self.data[ra * da + ca];
                if f == ZERO {
                    continue;
                }
                for rb in 0..db {
                    for cb in 0..db {
                        data[(ra * db + rb) * dim + (ca * db + cb)] = f * other.data[rb * db + cb];
                    }
                }
            }
        }
        Ok(HermitianOperator { num_qubits, data })
    }

    /// Place an operator onto the listed positions of a wider register,
    /// acting as identity elsewhere. `positions[k]` receives the
    /// operator's qubit k.
    pub fn embed(&self, total_qubits: usize, positions: &[usize]) -> Result<Self> {
        if positions.len() != self.num_qubits {
            return Err(Error::invalid(
                "position list must match the operator's qubit count",
            ));
        }
        if total_qubits > MAX_QUBITS {
            return Err(Error::resource(format!(
                "register exceeds {MAX_QUBITS} qubits"
            )));
        }
        check_keep(positions, total_qubits)?;

        let rest: Vec<usize> = (0..total_qubits)
            .filter(|q| !positions.contains(q))
            .collect();
        let sd = self.dim();
        let rd = 1usize << rest.len();
        let dim = 1usize << total_qubits;
        let mut data = vec![ZERO; dim * dim];
        for r in 0..sd {
            for c in 0..sd {
                let v = self.data[r * sd + c];
                if v == ZERO {
                    continue;
                }
                let row_part = compose_index(total_qubits, positions, r);
                let col_part = compose_index(total_qubits, positions, c);
                for t in 0..rd {
                    let base = compose_index(total_qubits, &rest, t);
                    data[(row_part | base) * dim + (col_part | base)] = v;
                }
            }
        }
        Ok(HermitianOperator {
            num_qubits: total_qubits,
            data,
        })
    }

    /// Trace out every qubit not in `keep`; the result's qubits follow the
    /// order of `keep`. Composing single-qubit traces equals tracing the
    /// whole set at once.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        check_keep(keep, self.num_qubits)?;
        let n = self.num_qubits;
        let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        if traced.is_empty() {
            // Reordering of the full register.
            let kd = self.dim();
            let mut data = vec![ZERO; kd * kd];
            for a in 0..kd {
                let ia = compose_index(n, keep, a);
                for b in 0..kd {
                    let ib = compose_index(n, keep, b);
                    data[a * kd + b] = self.data[ia * self.dim() + ib];
                }
            }
            return Ok(HermitianOperator {
                num_qubits: keep.len(),
                data,
            });
        }
        let kd = 1usize << keep.len();
        let td = 1usize << traced.len();
        let dim = self.dim();
        let mut data = vec![ZERO; kd * kd];
        for a in 0..kd {
            let ia = compose_index(n, keep, a);
            for b in 0..kd {
                let ib = compose_index(n, keep, b);
                let mut acc = ZERO;
                for t in 0..td {
                    let base = compose_index(n, &traced, t);
                    acc += self.data[(ia | base) * dim + (ib | base)];
                }
                data[a * kd + b] = acc;
            }
        }
        Ok(HermitianOperator {
            num_qubits: keep.len(),
            data,
        })
    }

    /// All eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let (vals, _) = eigen::eigh(self.dim(), &self.data)?;
        Ok(vals)
    }

    /// Check the density-matrix invariants: unit trace and positive
    /// semidefiniteness (Hermiticity is enforced at construction).
    pub fn validate_density(&self) -> Result<()> {
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::invalid(format!(
                "density matrix trace is {tr}, expected 1"
            )));
        }
        let vals = self.eigenvalues()?;
        if let Some(&min) = vals.first() {
            if min < -PSD_TOL {
                return Err(Error::invalid(format!(
                    "density matrix has negative eigenvalue {min:.3e}"
                )));
            }
        }
        Ok(())
    }
}

/// A unit vector on the Bloch sphere: a measurement direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const X: BlochVector = BlochVector {
        x: 1.0,
        y: 0.0,
        z: 0.0,
    };
    pub const Y: BlochVector = BlochVector {
        x: 0.0,
        y: 1.0,
        z: 0.0,
    };
    pub const Z: BlochVector = BlochVector {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::invalid(format!(
                "Bloch vector must be unit length, |v| = {norm}"
            )));
        }
        Ok(BlochVector { x, y, z })
    }

    /// Rescale an arbitrary nonzero vector onto the sphere.
    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if norm < 1e-14 {
            return Err(Error::invalid("cannot normalize a near-zero vector"));
        }
        Ok(BlochVector {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }
}

/// sigma_a = a . sigma for a unit direction; eigenvalues are +-1.
pub fn pauli(direction: &BlochVector) -> HermitianOperator {
    pauli_components(direction.x, direction.y, direction.z)
}

/// Same matrix for raw components, without the unit-norm gate. Used by
/// the Bell-operator gradient probes, where basis directions and the zero
/// vector are substituted.
pub(crate) fn pauli_components(x: f64, y: f64, z: f64) -> HermitianOperator {
    HermitianOperator {
        num_qubits: 1,
        data: vec![
            Complex64::new(z, 0.0),
            Complex64::new(x, -y),
            Complex64::new(x, y),
            Complex64::new(-z, 0.0),
        ],
    }
}

/// Tr(rho * obs). The product trace of two Hermitian operators is real;
/// the imaginary part is checked against tolerance and discarded.
pub fn expectation(rho: &HermitianOperator, obs: &HermitianOperator) -> Result<f64> {
    if rho.num_qubits != obs.num_qubits {
        return Err(Error::invalid(format!(
            "expectation of a {}-qubit observable on a {}-qubit state",
            obs.num_qubits, rho.num_qubits
        )));
    }
    let dim = rho.dim();
    let mut acc = ZERO;
    for r in 0..dim {
        for c in 0..dim {
            acc += rho.data[r * dim + c] * obs.data[c * dim + r];
        }
    }
    if acc.im.abs() > EXPECTATION_IMAG_TOL * (1.0 + acc.re.abs()) {
        return Err(Error::invalid(format!(
            "expectation has imaginary part {:.3e}",
            acc.im
        )));
    }
    Ok(acc.re)
}

/// Expectation of `obs` in the pure state `psi` without forming the
/// density matrix.
pub fn expectation_ket(psi: &Ket, obs: &HermitianOperator) -> Result<f64> {
    if psi.num_qubits != obs.num_qubits {
        return Err(Error::invalid("state and observable dimensions differ"));
    }
    let dim = psi.dim();
    let mut acc = ZERO;
    for r in 0..dim {
        let mut row = ZERO;
        for c in 0..dim {
            row += obs.data[r * dim + c] * psi.amplitudes[c];
        }
        acc += psi.amplitudes[r].conj() * row;
    }
    if acc.im.abs() > EXPECTATION_IMAG_TOL * (1.0 + acc.re.abs()) {
        return Err(Error::invalid(format!(
            "expectation has imaginary part {:.3e}",
            acc.im
        )));
    }
    Ok(acc.re)
}

/// Largest eigenvalue of `obs` with a unit eigenvector, residual bounded
/// by [`EIGEN_RESIDUAL_TOL`].
pub fn max_eigenpair(obs: &HermitianOperator) -> Result<(f64, Ket)> {
    let dim = obs.dim();
    let (lambda, vec) = eigen::max_eigenpair(dim, &obs.data)?;
    debug_assert!({
        let mut worst: f64 = 0.0;
        for r in 0..dim {
            let mut acc = ZERO;
            for c in 0..dim {
                acc += obs.data[r * dim + c] * vec[c];
            }
            worst = worst.max((acc - vec[r] * lambda).norm());
        }
        worst <= EIGEN_RESIDUAL_TOL * (1.0 + lambda.abs())
    });
    let ket = Ket::normalized(obs.num_qubits, vec)?;
    Ok((lambda, ket))
}
