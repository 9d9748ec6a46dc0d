//! Gram–Schmidt orthonormalization and thin QR.

use num_complex::Complex64;

use super::eig::hermitian_eig;
use super::matrix::{CMatrix, ZERO};
use crate::error::{Error, Result};

const MIN_SINGULAR: f64 = 1e-10;

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Thin QR of a full-column-rank matrix by modified Gram–Schmidt with one
/// reorthogonalization pass. `R` has a positive real diagonal.
pub fn qr_decompose(a: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let (m, k) = a.shape();
    if k > m {
        return Err(Error::RankDeficient { smallest_singular: 0.0 });
    }
    let mut q_cols: Vec<Vec<Complex64>> = Vec::with_capacity(k);
    let mut r = CMatrix::zeros(k, k);
    for j in 0..k {
        let original = a.column(j);
        let scale = norm(&original);
        let mut w = original;
        for _pass in 0..2 {
            for (i, qi) in q_cols.iter().enumerate() {
                let c = dot(qi, &w);
                r[(i, j)] += c;
                for (wt, qt) in w.iter_mut().zip(qi) {
                    *wt -= c * qt;
                }
            }
        }
        let len = norm(&w);
        if len <= MIN_SINGULAR * scale.max(1.0) || len == 0.0 {
            return Err(Error::RankDeficient { smallest_singular: len });
        }
        r[(j, j)] = Complex64::new(len, 0.0);
        for z in w.iter_mut() {
            *z /= len;
        }
        q_cols.push(w);
    }
    Ok((CMatrix::from_columns(m, &q_cols), r))
}

/// Orthonormal columns spanning the same space as the input columns.
///
/// Fails with `RankDeficient` when the smallest singular value (from the Gram
/// matrix spectrum) is at most 1e-10.
pub fn qr_orthonormalize(cols: &CMatrix) -> Result<CMatrix> {
    let gram = cols.adjoint().matmul(cols).hermitian_part();
    let smallest = hermitian_eig(&gram)?.min().max(0.0).sqrt();
    if smallest <= MIN_SINGULAR {
        return Err(Error::RankDeficient {
            smallest_singular: smallest,
        });
    }
    Ok(qr_decompose(cols)?.0)
}

/// Greedy column-pivoted Gram–Schmidt: picks the `rank` columns of `a` with the
/// largest residual norms, in pivot order, and returns their indices.
pub fn pivot_columns(a: &CMatrix, rank: usize) -> Vec<usize> {
    let k = a.cols();
    let mut residual: Vec<Vec<Complex64>> = (0..k).map(|j| a.column(j)).collect();
    let mut chosen = Vec::with_capacity(rank);
    for _ in 0..rank.min(k) {
        let best = (0..k)
            .filter(|j| !chosen.contains(j))
            .max_by(|&i, &j| norm(&residual[i]).total_cmp(&norm(&residual[j])));
        let Some(best) = best else { break };
        let len = norm(&residual[best]);
        if len == 0.0 {
            break;
        }
        let q: Vec<Complex64> = residual[best].iter().map(|z| z / len).collect();
        chosen.push(best);
        for col in residual.iter_mut() {
            let c = dot(&q, col);
            for (t, qt) in col.iter_mut().zip(&q) {
                *t -= c * qt;
            }
        }
    }
    chosen
}

/// Orthonormal basis (as columns) of the column space of `a`, assumed to have
/// the given rank. Columns are selected by pivoting, then orthonormalized in
/// ascending index order so the result depends only on `a`.
pub fn column_space_basis(a: &CMatrix, rank: usize) -> Result<CMatrix> {
    if rank == 0 {
        return Ok(CMatrix::zeros(a.rows(), 0));
    }
    let mut idx = pivot_columns(a, rank);
    idx.sort_unstable();
    let selected: Vec<Vec<Complex64>> = idx.iter().map(|&j| a.column(j)).collect();
    qr_orthonormalize(&CMatrix::from_columns(a.rows(), &selected))
}

/// Orthogonal projector `Q Q*` for a matrix with orthonormal columns.
pub fn projector(q: &CMatrix) -> CMatrix {
    q.matmul(&q.adjoint())
}

/// Orthonormalizes a list of vectors against an existing orthonormal set and
/// each other, dropping those whose residual falls below `rel_tol` of their
/// original norm. Returns how many were kept.
pub fn extend_orthonormal(
    basis: &mut Vec<Vec<Complex64>>,
    candidates: impl IntoIterator<Item = Vec<Complex64>>,
    rel_tol: f64,
) -> usize {
    let mut added = 0;
    for mut w in candidates {
        let scale = norm(&w);
        if scale == 0.0 {
            continue;
        }
        for _pass in 0..2 {
            for b in basis.iter() {
                let c = dot(b, &w);
                if c != ZERO {
                    for (t, bt) in w.iter_mut().zip(b) {
                        *t -= c * bt;
                    }
                }
            }
        }
        let len = norm(&w);
        if len > rel_tol * scale {
            for z in w.iter_mut() {
                *z /= len;
            }
            basis.push(w);
            added += 1;
        }
    }
    added
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::gaussian_matrix;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn orthonormal_input_is_kept_up_to_phase() {
        let a = CMatrix::identity(3).block(0, 0, 3, 2);
        let q = qr_orthonormalize(&a).unwrap();
        for j in 0..2 {
            let overlap: Complex64 = dot(&q.column(j), &a.column(j));
            assert!((overlap.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn span_of_e1_and_e1_plus_e2() {
        let a = CMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0], &[0.0, 0.0]]);
        let q = qr_orthonormalize(&a).unwrap();
        let expected = CMatrix::from_real_rows(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 0.0]]);
        assert!(projector(&q).distance(&expected) < 1e-14);
    }

    #[test]
    fn gaussian_six_by_three_seed_seven() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let a = gaussian_matrix(6, 3, &mut rng);
        let q = qr_orthonormalize(&a).unwrap();
        let gram = q.adjoint().matmul(&q);
        assert!(gram.distance(&CMatrix::identity(3)) < 1e-12);
        // Span preserved: the projector reproduces every input column.
        let p = projector(&q);
        assert!(p.matmul(&a).distance(&a) < 1e-10);
    }

    #[test]
    fn rank_deficient_input_is_rejected() {
        let a = CMatrix::from_real_rows(&[&[1.0, 2.0], &[1.0, 2.0], &[0.0, 0.0]]);
        assert!(matches!(qr_orthonormalize(&a), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn qr_reconstructs_with_positive_diagonal() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let a = gaussian_matrix(5, 5, &mut rng);
        let (q, r) = qr_decompose(&a).unwrap();
        assert!(q.matmul(&r).distance(&a) < 1e-12);
        for i in 0..5 {
            assert!(r[(i, i)].re > 0.0 && r[(i, i)].im == 0.0);
            for j in 0..i {
                assert_eq!(r[(i, j)], ZERO);
            }
        }
    }

    #[test]
    fn column_space_of_rank_one_projector() {
        let v = CMatrix::from_real_rows(&[&[0.6], &[0.8], &[0.0]]);
        let p = projector(&v);
        let q = column_space_basis(&p, 1).unwrap();
        assert!(projector(&q).distance(&p) < 1e-14);
    }
}
