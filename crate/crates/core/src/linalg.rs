//! Dense complex linear algebra helpers.
//!
//! Everything here works on `ndarray` arrays of `Complex64` at the small
//! dimensions this crate needs (≤ a few hundred).  The eigensolver is a
//! cyclic Jacobi iteration specialised to Hermitian matrices; it is slow
//! compared to LAPACK but dependency-free and accurate to near machine
//! precision at these sizes.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::{Error, Result};

/// Shorthand used across the crate.
pub type C64 = Complex64;

/// Complex number from a real.
#[inline]
pub fn cr(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `exp(i x)` as a complex number.
#[inline]
pub fn cis(x: f64) -> C64 {
    C64::new(x.cos(), x.sin())
}

/// Conjugate transpose.
pub fn adjoint(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

/// Max absolute entry of `a - b`.
pub fn max_abs_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    let mut m = 0.0f64;
    for (x, y) in a.iter().zip(b.iter()) {
        m = m.max((x - y).norm());
    }
    m
}

/// Frobenius norm.
pub fn fro_norm(a: &Array2<C64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Trace of a square matrix.
pub fn trace(a: &Array2<C64>) -> C64 {
    let n = a.nrows().min(a.ncols());
    (0..n).map(|i| a[[i, i]]).sum()
}

/// `true` when `u† u = I` within `tol` (max-entry norm).
pub fn is_unitary(u: &Array2<C64>, tol: f64) -> bool {
    if u.nrows() != u.ncols() {
        return false;
    }
    let prod = adjoint(u).dot(u);
    let eye = Array2::<C64>::eye(u.nrows());
    max_abs_diff(&prod, &eye) <= tol
}

/// `true` when `a` equals its conjugate transpose within `tol`.
pub fn is_hermitian(a: &Array2<C64>, tol: f64) -> bool {
    a.nrows() == a.ncols() && max_abs_diff(a, &adjoint(a)) <= tol
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvalues ascending and
/// eigenvectors in the corresponding columns, so that
/// `a = V diag(λ) V†` up to roundoff.
pub fn eigh(a: &Array2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Dimension(format!(
            "eigh needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if !is_hermitian(a, 1e-9 * (1.0 + fro_norm(a))) {
        return Err(Error::Validation("eigh input not Hermitian".into()));
    }
    let mut m = a.clone();
    // Hermitize exactly so the iteration preserves symmetry to roundoff.
    for i in 0..n {
        m[[i, i]] = cr(m[[i, i]].re);
        for j in (i + 1)..n {
            let avg = 0.5 * (m[[i, j]] + m[[j, i]].conj());
            m[[i, j]] = avg;
            m[[j, i]] = avg.conj();
        }
    }
    let mut v = Array2::<C64>::eye(n);
    let scale = fro_norm(&m).max(1e-300);
    let tol = 1e-15 * scale;

    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[[i, j]].norm_sqr();
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[[p, q]];
                if apq.norm() <= 1e-300 {
                    continue;
                }
                let app = m[[p, p]].re;
                let aqq = m[[q, q]].re;
                // Complex Jacobi rotation zeroing m[p,q]:
                //   [c, -s*e^{iφ}; s*e^{-iφ}, c] with e^{iφ} = apq/|apq|.
                let phase = apq / cr(apq.norm());
                let theta = 0.5 * (2.0 * apq.norm()).atan2(app - aqq);
                let (s, c) = theta.sin_cos();
                let cs = cr(c);
                let sp = phase * s; // s*e^{iφ}

                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = mkp * cs + mkq * sp.conj();
                    m[[k, q]] = -mkp * sp + mkq * cs;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = cs * mpk + sp * mqk;
                    m[[q, k]] = -sp.conj() * mpk + cs * mqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = vkp * cs + vkq * sp.conj();
                    v[[k, q]] = -vkp * sp + vkq * cs;
                }
            }
        }
    }

    let mut off = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            off += m[[i, j]].norm_sqr();
        }
    }
    if off.sqrt() > 1e-10 * scale.max(1.0) {
        return Err(Error::Numerical(format!(
            "Jacobi eigensolver did not converge (residual {:.3e})",
            off.sqrt()
        )));
    }

    let mut idx: Vec<usize> = (0..n).collect();
    let vals: Vec<f64> = (0..n).map(|i| m[[i, i]].re).collect();
    idx.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap());
    let eigvals = Array1::from_iter(idx.iter().map(|&i| vals[i]));
    let mut eigvecs = Array2::<C64>::zeros((n, n));
    for (col, &i) in idx.iter().enumerate() {
        for row in 0..n {
            eigvecs[[row, col]] = v[[row, i]];
        }
    }
    Ok((eigvals, eigvecs))
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(a: &Array2<C64>) -> Result<f64> {
    let (vals, _) = eigh(a)?;
    Ok(vals[0])
}

/// `true` when `a` is Hermitian and its spectrum is ≥ `-tol`.
pub fn is_psd(a: &Array2<C64>, tol: f64) -> bool {
    if !is_hermitian(a, tol.max(1e-12) * (1.0 + fro_norm(a))) {
        return false;
    }
    match min_eigenvalue(a) {
        Ok(lambda) => lambda >= -tol,
        Err(_) => false,
    }
}

/// Principal square root of a positive semidefinite matrix.
///
/// Eigenvalues within `clip` below zero are clamped to zero; larger
/// negative eigenvalues are an error.  Eigenvalues below roundoff level
/// relative to the largest one are snapped to zero, since the square
/// root would otherwise amplify solver noise on rank-deficient inputs.
pub fn sqrt_psd(a: &Array2<C64>, clip: f64) -> Result<Array2<C64>> {
    let (vals, vecs) = eigh(a)?;
    if vals[0] < -clip {
        return Err(Error::Validation(format!(
            "matrix not positive semidefinite (min eigenvalue {:.3e})",
            vals[0]
        )));
    }
    let n = a.nrows();
    let cut = 1e-12 * vals[n - 1].max(0.0);
    let mut out = Array2::<C64>::zeros((n, n));
    for k in 0..n {
        let s = if vals[k] <= cut { 0.0 } else { vals[k].sqrt() };
        if s == 0.0 {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                out[[i, j]] += cr(s) * vecs[[i, k]] * vecs[[j, k]].conj();
            }
        }
    }
    Ok(out)
}

/// Sum of absolute eigenvalues of a Hermitian matrix (trace norm).
pub fn trace_abs_hermitian(a: &Array2<C64>) -> Result<f64> {
    let (vals, _) = eigh(a)?;
    Ok(vals.iter().map(|x| x.abs()).sum())
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ar, ac) = (a.nrows(), a.ncols());
    let (br, bc) = (b.nrows(), b.ncols());
    let mut out = Array2::<C64>::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let f = a[[i, j]];
            if f == cr(0.0) {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[[i * br + k, j * bc + l]] = f * b[[k, l]];
                }
            }
        }
    }
    out
}

/// A unitary whose first column is the given unit vector, completed
/// deterministically by Gram-Schmidt over the standard basis.
pub fn unitary_with_first_column(v: &Array1<C64>) -> Result<Array2<C64>> {
    let n = v.len();
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::Validation("column not unit norm".into()));
    }
    let mut cols: Vec<Array1<C64>> = vec![v.clone()];
    for i in 0..n {
        if cols.len() == n {
            break;
        }
        let mut cand = Array1::<C64>::zeros(n);
        cand[i] = cr(1.0);
        for c in &cols {
            let overlap: C64 = c.iter().zip(cand.iter()).map(|(a, b)| a.conj() * b).sum();
            cand = &cand - &c.mapv(|z| z * overlap);
        }
        let cn: f64 = cand.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if cn > 1e-8 {
            cols.push(cand.mapv(|z| z / cr(cn)));
        }
    }
    if cols.len() != n {
        return Err(Error::Numerical("basis completion failed".into()));
    }
    let mut u = Array2::<C64>::zeros((n, n));
    for (j, c) in cols.iter().enumerate() {
        for i in 0..n {
            u[[i, j]] = c[i];
        }
    }
    Ok(u)
}

/// A reproducible dense unitary built by orthonormalising a random
/// complex matrix; used by probe and property tests.
pub fn random_unitary<R: rand::Rng>(n: usize, rng: &mut R) -> Array2<C64> {
    loop {
        let raw = Array2::from_shape_fn((n, n), |_| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        if let Some(u) = gram_schmidt(&raw) {
            return u;
        }
    }
}

fn gram_schmidt(a: &Array2<C64>) -> Option<Array2<C64>> {
    let n = a.nrows();
    let mut cols: Vec<Array1<C64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = a.column(j).to_owned();
        for c in &cols {
            let overlap: C64 = c.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
            v = &v - &c.mapv(|z| z * overlap);
        }
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            return None;
        }
        cols.push(v.mapv(|z| z / cr(norm)));
    }
    let mut u = Array2::<C64>::zeros((n, n));
    for (j, c) in cols.iter().enumerate() {
        for i in 0..n {
            u[[i, j]] = c[i];
        }
    }
    Some(u)
}

/// Matrix exponential `exp(g t)` of a real antisymmetric generator.
///
/// Uses the Hermitian eigendecomposition of `i g`; the result is the
/// orthogonal rotation `exp(g t)` with the imaginary residue dropped
/// (it is checked to be at roundoff level).
pub fn expm_antisymmetric(g: &Array2<f64>, t: f64) -> Result<Array2<f64>> {
    let decomp = AntisymmetricExp::new(g)?;
    decomp.at(t)
}

/// Reusable eigendecomposition of a real antisymmetric generator, for
/// evaluating `exp(g t)` at many times `t`.
pub struct AntisymmetricExp {
    dim: usize,
    vals: Array1<f64>,
    vecs: Array2<C64>,
}

impl AntisymmetricExp {
    pub fn new(g: &Array2<f64>) -> Result<Self> {
        let n = g.nrows();
        if g.ncols() != n {
            return Err(Error::Dimension("generator must be square".into()));
        }
        let mut anti = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                anti = anti.max((g[[i, j]] + g[[j, i]]).abs());
            }
        }
        if anti > 1e-9 {
            return Err(Error::Validation(
                "generator not antisymmetric".into(),
            ));
        }
        // i*g is Hermitian.
        let herm = Array2::from_shape_fn((n, n), |(i, j)| C64::new(0.0, g[[i, j]]));
        let (vals, vecs) = eigh(&herm)?;
        Ok(Self { dim: n, vals, vecs })
    }

    /// `exp(g t)` as a real matrix.
    pub fn at(&self, t: f64) -> Result<Array2<f64>> {
        let n = self.dim;
        let mut out = Array2::<C64>::zeros((n, n));
        for k in 0..n {
            let ph = cis(-self.vals[k] * t);
            for i in 0..n {
                let left = self.vecs[[i, k]] * ph;
                for j in 0..n {
                    out[[i, j]] += left * self.vecs[[j, k]].conj();
                }
            }
        }
        let mut imag = 0.0f64;
        let mut real = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                imag = imag.max(out[[i, j]].im.abs());
                real[[i, j]] = out[[i, j]].re;
            }
        }
        if imag > 1e-10 {
            return Err(Error::Numerical(format!(
                "rotation reconstruction left imaginary residue {imag:.3e}"
            )));
        }
        Ok(real)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_hermitian(n: usize, rng: &mut StdRng) -> Array2<C64> {
        let raw = Array2::from_shape_fn((n, n), |_| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let mut h = &raw + &adjoint(&raw);
        h.mapv_inplace(|z| z * cr(0.5));
        h
    }

    #[test]
    fn eigh_reconstructs_random_hermitian() {
        let mut rng = StdRng::seed_from_u64(7);
        for &n in &[2usize, 3, 8, 24, 40] {
            let h = random_hermitian(n, &mut rng);
            let (vals, vecs) = eigh(&h).unwrap();
            let mut rec = Array2::<C64>::zeros((n, n));
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        rec[[i, j]] += cr(vals[k]) * vecs[[i, k]] * vecs[[j, k]].conj();
                    }
                }
            }
            assert!(max_abs_diff(&rec, &h) < 1e-12 * (n as f64));
            assert!(is_unitary(&vecs, 1e-12 * (n as f64)));
            for k in 1..n {
                assert!(vals[k] >= vals[k - 1]);
            }
        }
    }

    #[test]
    fn eigh_known_spectrum() {
        // Pauli-like matrix with eigenvalues ±1.
        let h = array![
            [cr(0.0), C64::new(0.0, -1.0)],
            [C64::new(0.0, 1.0), cr(0.0)]
        ];
        let (vals, _) = eigh(&h).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-14);
        assert!((vals[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sqrt_psd_squares_back() {
        let mut rng = StdRng::seed_from_u64(11);
        let raw = random_hermitian(6, &mut rng);
        let a = raw.dot(&adjoint(&raw)); // PSD by construction
        let s = sqrt_psd(&a, 1e-12).unwrap();
        assert!(max_abs_diff(&s.dot(&s), &a) < 1e-11);
    }

    #[test]
    fn expm_antisymmetric_is_rotation() {
        let g = array![[0.0, -0.7, 0.0], [0.7, 0.0, 0.3], [0.0, -0.3, 0.0]];
        let r = expm_antisymmetric(&g, 1.3).unwrap();
        // orthogonality
        let rtr = r.t().dot(&r);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((rtr[[i, j]] - want).abs() < 1e-12);
            }
        }
        // 2x2 block sanity: pure single-plane rotation.
        let g2 = array![[0.0, -1.0], [1.0, 0.0]];
        let r2 = expm_antisymmetric(&g2, 0.5).unwrap();
        assert!((r2[[0, 0]] - 0.5f64.cos()).abs() < 1e-14);
        assert!((r2[[1, 0]] - 0.5f64.sin()).abs() < 1e-14);
    }

    #[test]
    fn trace_abs_matches_hand_value() {
        let h = array![[cr(2.0), cr(0.0)], [cr(0.0), cr(-3.0)]];
        assert!((trace_abs_hermitian(&h).unwrap() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn psd_check_rejects_indefinite() {
        let h = array![[cr(1.0), cr(0.0)], [cr(0.0), cr(-1e-6)]];
        assert!(!is_psd(&h, 1e-10));
        assert!(is_psd(&h, 1e-5));
    }
}
