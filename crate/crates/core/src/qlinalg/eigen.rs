//! Dense Hermitian eigensolver.
//!
//! Full diagonalization via unitary Householder reduction to a real
//! symmetric tridiagonal matrix followed by the implicit-shift QL
//! iteration, with eigenvectors accumulated along the way. Matrices in
//! this crate never exceed 256x256, so a dense direct method is both fast
//! enough and far more robust than power iteration on the near-degenerate
//! spectra that Bell operators produce.
//!
//! The reduction follows the classic EISPACK/LAPACK scheme (HTRIDI /
//! zhetd2): each column is annihilated below the subdiagonal by an
//! elementary reflector chosen so that the surviving subdiagonal entry is
//! real. The QL stage is the standard tql2 iteration; its real plane
//! rotations are applied to the complex eigenvector matrix.

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const MAX_QL_ITERS: usize = 64;

/// Eigendecomposition of an `n x n` Hermitian matrix given in row-major
/// order. Returns the eigenvalues in ascending order and the matching
/// unit eigenvectors as the columns of a row-major `n x n` matrix.
pub fn eigh(n: usize, a: &[Complex64]) -> Result<(Vec<f64>, Vec<Complex64>)> {
    assert_eq!(a.len(), n * n, "matrix storage does not match dimension");
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    if n == 1 {
        return Ok((vec![a[0].re], vec![Complex64::new(1.0, 0.0)]));
    }

    let mut work = a.to_vec();
    let (mut d, mut e, reflectors) = tridiagonalize(n, &mut work);
    let mut z = accumulate_q(n, &work, &reflectors);
    ql_implicit(n, &mut d, &mut e, &mut z)?;
    sort_pairs(n, &mut d, &mut z);
    Ok((d, z))
}

/// Largest eigenvalue and a corresponding unit eigenvector.
pub fn max_eigenpair(n: usize, a: &[Complex64]) -> Result<(f64, Vec<Complex64>)> {
    let (vals, vecs) = eigh(n, a)?;
    let top = n - 1;
    let vec = (0..n).map(|r| vecs[r * n + top]).collect();
    Ok((vals[top], vec))
}

struct Reflector {
    /// Column the reflector belongs to; it acts on rows `col + 1 ..`.
    col: usize,
    tau: Complex64,
    /// Householder vector with the implicit leading 1 stored explicitly.
    v: Vec<Complex64>,
}

/// Reduce the Hermitian matrix to real symmetric tridiagonal form.
/// Returns the diagonal, the subdiagonal (e[i] couples rows i and i+1)
/// and the reflectors needed to reassemble the similarity transform.
fn tridiagonalize(
    n: usize,
    a: &mut [Complex64],
) -> (Vec<f64>, Vec<f64>, Vec<Reflector>) {
    let mut e = vec![0.0; n.saturating_sub(1)];
    let mut reflectors = Vec::with_capacity(n - 1);

    for i in 0..n - 1 {
        let len = n - 1 - i;
        let mut x: Vec<Complex64> = (0..len).map(|r| a[(i + 1 + r) * n + i]).collect();
        let (beta, tau) = larfg(&mut x);
        e[i] = beta;

        if tau != ZERO {
            // Hermitian rank-2 update of the trailing block, realizing
            // A22 <- H' A22 H with H = I - tau v v':
            //   p = tau * A22 * v,  w = p - (tau/2)(p' v) v,
            //   A22 <- A22 - v w' - w v'.
            let base = i + 1;
            let mut p = vec![ZERO; len];
            for r in 0..len {
                let mut acc = ZERO;
                for c in 0..len {
                    acc += a[(base + r) * n + (base + c)] * x[c];
                }
                p[r] = tau * acc;
            }
            let mut pv = ZERO;
            for r in 0..len {
                pv += p[r].conj() * x[r];
            }
            let alpha = tau * pv * 0.5;
            let w: Vec<Complex64> = (0..len).map(|r| p[r] - alpha * x[r]).collect();
            for r in 0..len {
                for c in 0..len {
                    let upd = x[r] * w[c].conj() + w[r] * x[c].conj();
                    a[(base + r) * n + (base + c)] -= upd;
                }
            }
        }

        // Zero out the eliminated column so later stages see clean storage.
        for r in i + 1..n {
            a[r * n + i] = ZERO;
            a[i * n + r] = ZERO;
        }
        reflectors.push(Reflector { col: i, tau, v: x });
    }

    let d = (0..n).map(|i| a[i * n + i].re).collect();
    (d, e, reflectors)
}

/// Elementary reflector (LAPACK zlarfg): given the vector `x`, produce
/// `tau` and overwrite `x` with the Householder vector `v` (leading 1
/// stored explicitly) such that (I - tau v v')' x = beta e1 with beta real.
fn larfg(x: &mut [Complex64]) -> (f64, Complex64) {
    let alpha = x[0];
    let tail_norm_sq: f64 = x[1..].iter().map(|c| c.norm_sqr()).sum();

    if tail_norm_sq == 0.0 && alpha.im == 0.0 {
        x[0] = Complex64::new(1.0, 0.0);
        for t in x[1..].iter_mut() {
            *t = ZERO;
        }
        return (alpha.re, ZERO);
    }

    let norm = (alpha.norm_sqr() + tail_norm_sq).sqrt();
    let beta = if alpha.re >= 0.0 { -norm } else { norm };
    let tau = Complex64::new((beta - alpha.re) / beta, -alpha.im / beta);
    let denom = alpha - beta;
    let scale = denom.inv();
    x[0] = Complex64::new(1.0, 0.0);
    for t in x[1..].iter_mut() {
        *t *= scale;
    }
    (beta, tau)
}

/// Assemble Q = H_0 H_1 ... H_(n-2) so that A = Q T Q', applying the
/// reflectors to the identity from the innermost outward.
fn accumulate_q(n: usize, _a: &[Complex64], reflectors: &[Reflector]) -> Vec<Complex64> {
    let mut z = vec![ZERO; n * n];
    for i in 0..n {
        z[i * n + i] = Complex64::new(1.0, 0.0);
    }
    for refl in reflectors.iter().rev() {
        if refl.tau == ZERO {
            continue;
        }
        let base = refl.col + 1;
        let len = refl.v.len();
        // Z[base.., :] -= tau * v * (v' Z[base.., :])
        for col in 0..n {
            let mut dot = ZERO;
            for r in 0..len {
                dot += refl.v[r].conj() * z[(base + r) * n + col];
            }
            let f = refl.tau * dot;
            for r in 0..len {
                let upd = refl.v[r] * f;
                z[(base + r) * n + col] -= upd;
            }
        }
    }
    z
}

/// Implicit-shift QL on the real symmetric tridiagonal (d, e), rotating
/// the columns of `z` alongside.
fn ql_implicit(n: usize, d: &mut [f64], e: &mut [f64], z: &mut [Complex64]) -> Result<()> {
    // Internal convention: sub[i] couples i and i+1, with a spare slot at
    // the end so the sweep below can write one past the active range.
    let mut sub = vec![0.0; n];
    sub[..n - 1].copy_from_slice(e);

    // Deflation is judged against the running matrix scale rather than
    // the local diagonal pair; Bell operators routinely have exact zeros
    // on the diagonal, where a purely relative test never fires.
    let mut scale: f64 = 0.0;

    for l in 0..n {
        scale = scale.max(d[l].abs() + sub[l].abs());
        let mut iters = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                if sub[m].abs() <= f64::EPSILON * scale {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iters += 1;
            if iters > MAX_QL_ITERS {
                return Err(Error::Numerical(format!(
                    "QL iteration failed to converge for eigenvalue {l}"
                )));
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * sub[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + sub[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0, 1.0);
            let mut p = 0.0;

            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * sub[i];
                let b = c * sub[i];
                r = f.hypot(g);
                sub[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    sub[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;

                for k in 0..n {
                    f = z[k * n + i + 1].re;
                    let fi = z[k * n + i + 1].im;
                    let zi = z[k * n + i];
                    z[k * n + i + 1] = Complex64::new(s * zi.re + c * f, s * zi.im + c * fi);
                    z[k * n + i] = Complex64::new(c * zi.re - s * f, c * zi.im - s * fi);
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            sub[l] = g;
            sub[m] = 0.0;
        }
    }
    Ok(())
}

fn sort_pairs(n: usize, d: &mut [f64], z: &mut [Complex64]) {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).expect("eigenvalue is NaN"));

    let sorted_d: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut sorted_z = vec![ZERO; n * n];
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..n {
            sorted_z[r * n + new_col] = z[r * n + old_col];
        }
    }
    d.copy_from_slice(&sorted_d);
    z.copy_from_slice(&sorted_z);
}
