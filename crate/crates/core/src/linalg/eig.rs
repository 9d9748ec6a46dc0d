//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.

use num_complex::Complex64;

use super::matrix::{CMatrix, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
const CONVERGED_REL: f64 = 1e-13;
const ACCEPT_REL: f64 = 1e-8;

/// Eigenvalues in ascending order and the matching unitary of column eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEig {
    /// `V diag(f(λ)) V*`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        let weights: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let mut out = CMatrix::zeros(n, n);
        for (k, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = v[(i, k)] * w;
                if vik == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += vik * v[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.reconstruct_with(|l| l)
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

fn off_diagonal_mass(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Diagonalizes a Hermitian matrix: `a = V diag(λ) V*` with `λ` ascending.
pub fn hermitian_eig(a: &CMatrix) -> Result<HermitianEig> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition of a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let norm = a.frobenius_norm();
    let defect = a.hermitian_defect();
    if defect > 1e-10 * (1.0 + norm) {
        return Err(Error::NotHermitian(defect));
    }

    let n = a.rows();
    let mut m = a.hermitian_part();
    let mut v = CMatrix::identity(n);

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_mass(&m);
        if off <= CONVERGED_REL * norm || n < 2 {
            break;
        }
        if sweeps == MAX_SWEEPS {
            if off > ACCEPT_REL * norm {
                return Err(Error::NoConvergence {
                    sweeps,
                    off_diagonal: off,
                });
            }
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(HermitianEig { values, vectors })
}

/// One two-sided rotation annihilating `m[(p, q)]`.
///
/// The phase of `m[(p, q)]` is absorbed into column `q` first, which leaves a
/// real symmetric 2x2 pivot handled by the classical Jacobi formulas.
fn rotate(m: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let g = m[(p, q)];
    let r = g.norm();
    if r == 0.0 {
        return;
    }
    let e = g / r;
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // U = [[c, s], [-s ē, c ē]] acting on coordinates (p, q).
    let u_pp = Complex64::new(c, 0.0);
    let u_pq = Complex64::new(s, 0.0);
    let u_qp = -e.conj() * s;
    let u_qq = e.conj() * c;

    let n = m.rows();
    for i in 0..n {
        let mp = m[(i, p)];
        let mq = m[(i, q)];
        m[(i, p)] = mp * u_pp + mq * u_qp;
        m[(i, q)] = mp * u_pq + mq * u_qq;
        let vp = v[(i, p)];
        let vq = v[(i, q)];
        v[(i, p)] = vp * u_pp + vq * u_qp;
        v[(i, q)] = vp * u_pq + vq * u_qq;
    }
    for j in 0..n {
        let mp = m[(p, j)];
        let mq = m[(q, j)];
        m[(p, j)] = u_pp.conj() * mp + u_qp.conj() * mq;
        m[(q, j)] = u_pq.conj() * mp + u_qq.conj() * mq;
    }
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);
}

/// Nearest positive semidefinite matrix in Frobenius norm.
pub fn psd_project(a: &CMatrix) -> Result<CMatrix> {
    let eig = hermitian_eig(a)?;
    Ok(eig.reconstruct_with(|l| l.max(0.0)))
}

/// Projection onto the PSD cone that also returns the eigendecomposition used.
pub fn psd_project_with_eig(a: &CMatrix) -> Result<(CMatrix, HermitianEig)> {
    let eig = hermitian_eig(a)?;
    Ok((eig.reconstruct_with(|l| l.max(0.0)), eig))
}

pub fn min_eigenvalue(a: &CMatrix) -> Result<f64> {
    Ok(hermitian_eig(a)?.min())
}

/// Largest singular value, via the spectrum of `a* a`.
pub fn operator_norm(a: &CMatrix) -> Result<f64> {
    let gram = a.adjoint().matmul(a).hermitian_part();
    Ok(hermitian_eig(&gram)?.max().max(0.0).sqrt())
}
