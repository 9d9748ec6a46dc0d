//! Standard words of a canonical form, the isomorphism `ρ: M_p → Alg(ũ, ṽ)`,
//! commutants and generated algebras.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::canonical::CanonicalForm;
use crate::error::{Error, Result};
use crate::linalg::{extend_orthonormal, hermitian_eig, CMatrix, ZERO};
use crate::tolerance::ToleranceConfig;

/// The `p x p` table of unitary words `W_ij` in the blocks `v_1..v_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct WordTable {
    p: usize,
    n: usize,
    words: Vec<CMatrix>,
}

impl WordTable {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `W_ij` with 1-based indices.
    pub fn get(&self, i: usize, j: usize) -> &CMatrix {
        assert!((1..=self.p).contains(&i) && (1..=self.p).contains(&j));
        &self.words[(i - 1) * self.p + (j - 1)]
    }

    pub fn max_unitarity_defect(&self) -> f64 {
        self.words.iter().map(CMatrix::unitarity_defect).fold(0.0, f64::max)
    }
}

/// Builds `W_ij`: `1` on the diagonal, `v_k` at `(k, k−1)`, `v_1` at `(1, p)`,
/// `v_{k+1}*` at `(k, k+1)`, `v_1*` at `(p, 1)`, and otherwise the products
/// `v_i ⋯ v_{j+1}` below and `v_{i+1}* ⋯ v_j*` above the diagonal.
pub fn word_table(cf: &CanonicalForm) -> WordTable {
    let (p, n) = (cf.p(), cf.n());
    let mut words = Vec::with_capacity(p * p);
    for i in 1..=p {
        for j in 1..=p {
            let w = if i == j {
                CMatrix::identity(n)
            } else if i == j + 1 {
                cf.v(i).clone()
            } else if i == 1 && j == p {
                cf.v(1).clone()
            } else if j == i + 1 {
                cf.v(i + 1).adjoint()
            } else if i == p && j == 1 {
                cf.v(1).adjoint()
            } else if i > j {
                ((j + 1)..=i)
                    .rev()
                    .fold(CMatrix::identity(n), |acc, k| acc.matmul(cf.v(k)))
            } else {
                ((i + 1)..=j).fold(CMatrix::identity(n), |acc, k| acc.matmul(&cf.v(k).adjoint()))
            };
            words.push(w);
        }
    }
    WordTable { p, n, words }
}

/// `ρ(Λ)`: the `d x d` matrix whose block `(i, j)` is `λ_ij W_ij`.
pub fn rho_apply(table: &WordTable, lambda: &CMatrix) -> Result<CMatrix> {
    let (p, n) = (table.p, table.n);
    if lambda.shape() != (p, p) {
        return Err(Error::DimensionMismatch(format!(
            "ρ expects {p}x{p}, got {:?}",
            lambda.shape()
        )));
    }
    let mut out = CMatrix::zeros(p * n, p * n);
    for i in 0..p {
        for j in 0..p {
            let c = lambda[(i, j)];
            if c != ZERO {
                out.set_block(i * n, j * n, &table.words[i * p + j].scale(c));
            }
        }
    }
    Ok(out)
}

/// Coefficients `λ_ij = tr(W_ij* Z_ij)/n` and the distance from `Z` to `ρ(M_p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoInverse {
    pub coefficients: CMatrix,
    /// `‖Z − ρ(ρ⁻¹(Z))‖_F`.
    pub membership_residual: f64,
}

pub fn rho_inverse(table: &WordTable, z: &CMatrix) -> Result<RhoInverse> {
    let coefficients = rho_coefficients(table, z)?;
    let back = rho_apply(table, &coefficients)?;
    Ok(RhoInverse {
        membership_residual: z.distance(&back),
        coefficients,
    })
}

/// The coefficient extraction of [`rho_inverse`] without the residual.
pub fn rho_coefficients(table: &WordTable, z: &CMatrix) -> Result<CMatrix> {
    let (p, n) = (table.p, table.n);
    if z.shape() != (p * n, p * n) {
        return Err(Error::DimensionMismatch(format!(
            "ρ⁻¹ expects {0}x{0}, got {1:?}",
            p * n,
            z.shape()
        )));
    }
    Ok(CMatrix::from_fn(p, p, |i, j| {
        let w = &table.words[i * p + j];
        let mut acc = ZERO;
        for a in 0..n {
            for b in 0..n {
                acc += w[(a, b)].conj() * z[(i * n + a, j * n + b)];
            }
        }
        acc / n as f64
    }))
}

/// An orthonormal (Frobenius) basis of a subspace of `M_d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpanBasis {
    pub ambient_dim: usize,
    pub dim: usize,
    pub basis: Vec<CMatrix>,
}

impl SpanBasis {
    fn from_vectors(d: usize, vectors: Vec<Vec<Complex64>>) -> Self {
        let basis: Vec<CMatrix> = vectors
            .into_iter()
            .map(|v| CMatrix::from_vec(d, d, v).expect("basis vectors have d² finite entries"))
            .collect();
        Self {
            ambient_dim: d,
            dim: basis.len(),
            basis,
        }
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.inner(b) - target).norm());
            }
        }
        worst
    }

    /// Distance from `x` to the span.
    pub fn residual(&self, x: &CMatrix) -> f64 {
        let mut r = x.clone();
        for b in &self.basis {
            let c = b.inner(x);
            r.axpy(-c, b);
        }
        r.frobenius_norm()
    }

    /// `‖P_A − P_B‖_F` for the orthogonal projectors onto the two spans,
    /// computed from residuals to avoid cancellation.
    pub fn projector_distance(&self, other: &SpanBasis) -> f64 {
        let one_way =
            |from: &SpanBasis, onto: &SpanBasis| -> f64 { from.basis.iter().map(|a| onto.residual(a).powi(2)).sum() };
        (one_way(self, other) + one_way(other, self)).sqrt()
    }
}

fn common_dim(mats: &[CMatrix]) -> Result<usize> {
    let first = mats
        .first()
        .ok_or_else(|| Error::DimensionMismatch("empty matrix list".into()))?;
    let d = first.rows();
    if mats.iter().any(|m| m.shape() != (d, d)) {
        return Err(Error::DimensionMismatch("matrices must share one square shape".into()));
    }
    Ok(d)
}

/// `{X : XS = SX for every S}`, from the null space of `Σ_S M_S* M_S` where
/// `M_S vec(X) = vec(XS − SX)`.
pub fn commutant(mats: &[CMatrix]) -> Result<SpanBasis> {
    commutant_with(mats, ToleranceConfig::default().commutant_null)
}

pub fn commutant_with(mats: &[CMatrix], threshold: f64) -> Result<SpanBasis> {
    let d = common_dim(mats)?;
    let dd = d * d;
    let mut gram = CMatrix::zeros(dd, dd);
    let mut scale: f64 = 1.0;
    for s in mats {
        scale = scale.max(s.frobenius_norm().powi(2) / d as f64);
        // Row-major vec: index (i, j) ↦ i·d + j.
        let mut m = CMatrix::zeros(dd, dd);
        for i in 0..d {
            for j in 0..d {
                let row = i * d + j;
                for k in 0..d {
                    m[(row, i * d + k)] += s[(k, j)];
                    m[(row, k * d + j)] -= s[(i, k)];
                }
            }
        }
        gram = &gram + &m.adjoint().matmul(&m);
    }
    let eig = hermitian_eig(&gram.hermitian_part())?;
    let cutoff = threshold * scale;
    let vectors: Vec<Vec<Complex64>> = eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, &l)| l < cutoff)
        .map(|(k, _)| eig.vectors.column(k))
        .collect();
    Ok(SpanBasis::from_vectors(d, vectors))
}

/// Span of all words in `mats`, grown from `{1} ∪ mats` by left multiplication.
pub fn algebra_span(mats: &[CMatrix]) -> Result<SpanBasis> {
    let d = common_dim(mats)?;
    let rel_tol = ToleranceConfig::default().span_rank;
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let seeds = std::iter::once(CMatrix::identity(d))
        .chain(mats.iter().cloned())
        .map(CMatrix::into_data);
    extend_orthonormal(&mut basis, seeds, rel_tol);
    let mut frontier = 0;
    let cap = d * d;
    for _round in 0..cap {
        if basis.len() >= cap {
            break;
        }
        let fresh: Vec<CMatrix> = basis[frontier..]
            .iter()
            .map(|v| CMatrix::from_vec(d, d, v.clone()).expect("finite basis"))
            .collect();
        frontier = basis.len();
        let candidates = mats
            .iter()
            .flat_map(|g| fresh.iter().map(move |b| g.matmul(b).into_data()))
            .collect::<Vec<_>>();
        if extend_orthonormal(&mut basis, candidates, rel_tol) == 0 {
            return Ok(SpanBasis::from_vectors(d, basis));
        }
    }
    if basis.len() >= cap {
        basis.truncate(cap);
        return Ok(SpanBasis::from_vectors(d, basis));
    }
    Err(Error::IterationCap(cap))
}

/// True when only scalars commute with every matrix in the list.
pub fn is_irreducible(mats: &[CMatrix]) -> Result<bool> {
    Ok(commutant(mats)?.dim == 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::{canonicalize_system, random_pair, CanonicalForm};
    use crate::linalg::haar_unitary;
    use crate::weyl::{clock_matrix, primitive_root, shift_matrix, weyl_brauer, weyl_pair};

    fn form(p: usize, n: usize, seed: u64) -> CanonicalForm {
        canonicalize_system(&random_pair(p, n, seed, true).unwrap()).unwrap()
    }

    #[test]
    fn p5_words_match_the_worked_table() {
        let cf = form(5, 2, 1);
        let t = word_table(&cf);
        let v = |k| cf.v(k).clone();
        let a = |k: usize| cf.v(k).adjoint();
        assert!(t.get(1, 4).distance(&a(2).matmul(&a(3)).matmul(&a(4))) < 1e-12);
        assert!(t.get(4, 1).distance(&v(4).matmul(&v(3)).matmul(&v(2))) < 1e-12);
        assert!(t.get(5, 3).distance(&v(5).matmul(&v(4))) < 1e-12);
        assert!(t.get(1, 5).distance(&v(1)) < 1e-15);
        assert!(t.get(5, 1).distance(&a(1)) < 1e-15);
        assert!(t.get(2, 3).distance(&a(3)) < 1e-15);
        assert!(t.get(3, 3).distance(&CMatrix::identity(2)) == 0.0);
    }

    #[test]
    fn trivial_blocks_give_trivial_words() {
        let zeta = primitive_root(4);
        let cf = CanonicalForm::from_blocks(4, zeta, CMatrix::identity(8), vec![CMatrix::identity(2); 3]).unwrap();
        let t = word_table(&cf);
        for i in 1..=4 {
            for j in 1..=4 {
                assert!(t.get(i, j).distance(&CMatrix::identity(2)) < 1e-15);
            }
        }
    }

    #[test]
    fn words_are_unitary_and_compose() {
        let cf = form(3, 2, 2);
        let t = word_table(&cf);
        assert!(t.max_unitarity_defect() <= 1e-11);
        for i in 1..=3 {
            for j in 1..=3 {
                for k in 1..=3 {
                    assert!(t.get(i, j).matmul(t.get(j, k)).distance(t.get(i, k)) < 1e-10);
                }
            }
        }
    }

    #[test]
    fn rho_sends_clock_and_shift_to_the_canonical_pair() {
        let cf = form(3, 2, 4);
        let t = word_table(&cf);
        let zeta = cf.zeta();
        assert!(
            rho_apply(&t, &clock_matrix(3, zeta).unwrap())
                .unwrap()
                .distance(&cf.u_tilde())
                < 1e-12
        );
        assert!(rho_apply(&t, &shift_matrix(3)).unwrap().distance(&cf.v_tilde()) < 1e-12);
        assert!(
            rho_apply(&t, &CMatrix::identity(3))
                .unwrap()
                .distance(&CMatrix::identity(6))
                < 1e-15
        );
        assert!(rho_apply(&t, &CMatrix::identity(2)).is_err());
    }

    #[test]
    fn rho_inverse_of_identity_and_non_members() {
        let cf = form(3, 2, 6);
        let t = word_table(&cf);
        let inv = rho_inverse(&t, &CMatrix::identity(6)).unwrap();
        assert!(inv.coefficients.distance(&CMatrix::identity(3)) < 1e-14);
        assert!(inv.membership_residual < 1e-14);

        // Replace one off-diagonal block with a non-scalar multiple of its word.
        let mut z = rho_apply(&t, &CMatrix::identity(3)).unwrap();
        let h = haar_unitary(2, 99);
        z.set_block(2, 0, &h.matmul(t.get(2, 1)));
        assert!(rho_inverse(&t, &z).unwrap().membership_residual > 0.1);
    }

    #[test]
    fn commutant_dimensions() {
        let ws = weyl_pair(3, primitive_root(3)).unwrap();
        assert_eq!(commutant(ws.unitaries()).unwrap().dim, 1);

        let cf = form(3, 2, 3);
        let c = commutant(&[cf.u_tilde(), cf.v_tilde()]).unwrap();
        assert_eq!(c.dim, 4);
        assert!(c.orthonormality_defect() < 1e-10);

        assert_eq!(commutant(&[CMatrix::identity(3)]).unwrap().dim, 9);
        assert!(commutant(&[]).is_err());
    }

    #[test]
    fn algebra_dimensions() {
        let ws = weyl_pair(3, primitive_root(3)).unwrap();
        let span = algebra_span(ws.unitaries()).unwrap();
        assert_eq!(span.dim, 9);
        assert!(span.orthonormality_defect() < 1e-10);
        assert_eq!(algebra_span(&[CMatrix::identity(4)]).unwrap().dim, 1);

        let q2 = weyl_brauer(3, 2, primitive_root(3)).unwrap();
        assert_eq!(algebra_span(&q2.unitaries()[..4]).unwrap().dim, 81);
    }

    #[test]
    fn irreducibility() {
        let zeta = primitive_root(5);
        let ws = weyl_pair(5, zeta).unwrap();
        assert!(is_irreducible(ws.unitaries()).unwrap());

        let z3 = primitive_root(3);
        let id = CMatrix::identity(2);
        let u = clock_matrix(3, z3).unwrap().kron(&id);
        let v = shift_matrix(3).kron(&id);
        assert_eq!(commutant(&[u.clone(), v.clone()]).unwrap().dim, 4);
        assert!(!is_irreducible(&[u, v]).unwrap());

        let q2 = weyl_brauer(3, 2, z3).unwrap();
        assert!(is_irreducible(q2.unitaries()).unwrap());
    }

    #[test]
    fn double_commutant_matches_generated_algebra() {
        let cf = form(3, 2, 12);
        let gens = [cf.u_tilde(), cf.v_tilde()];
        let alg = algebra_span(&gens).unwrap();
        let dc = commutant(&commutant(&gens).unwrap().basis).unwrap();
        assert_eq!(alg.dim, 9);
        assert_eq!(dc.dim, 9);
        assert!(alg.projector_distance(&dc) < 1e-8);
    }

    #[test]
    fn span_json_shape() {
        let span = algebra_span(&[CMatrix::identity(2)]).unwrap();
        let value: serde_json::Value = serde_json::from_str(&crate::json::to_json_string(&span).unwrap()).unwrap();
        assert_eq!(value["ambient_dim"], 2);
        assert_eq!(value["dim"], 1);
        assert_eq!(value["basis"].as_array().unwrap().len(), 1);
    }
}
