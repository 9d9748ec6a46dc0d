//! Choi matrices and two-sided ucp certificates between Weyl pairs.

use serde::{Deserialize, Serialize};

use crate::algebra::{rho_apply, rho_coefficients, word_table, WordTable};
use crate::canonical::{canonicalize_system, CanonicalForm};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, CMatrix, ONE};
use crate::tolerance::ToleranceConfig;
use crate::weyl::{check_relations, WeylSystem};

/// `C = Σ_ij E_ij ⊗ Φ(E_ij)` for a linear map `Φ: M_in → M_out`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChoiMatrix {
    pub in_dim: usize,
    pub out_dim: usize,
    pub mat: CMatrix,
}

/// Outcome of [`is_ucp`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UcpCheck {
    pub cp: bool,
    pub unital: bool,
    pub min_eig: f64,
    pub unitality_residual: f64,
}

fn unit(n: usize, i: usize, j: usize) -> CMatrix {
    let mut e = CMatrix::zeros(n, n);
    e[(i, j)] = ONE;
    e
}

/// Builds the Choi matrix from the images `Φ(E_ij)`, listed row-major in `(i, j)`.
pub fn choi_from_units(in_dim: usize, out_dim: usize, images: &[CMatrix]) -> Result<ChoiMatrix> {
    if images.len() != in_dim * in_dim {
        return Err(Error::DimensionMismatch(format!(
            "expected {} matrix-unit images, got {}",
            in_dim * in_dim,
            images.len()
        )));
    }
    let mut mat = CMatrix::zeros(in_dim * out_dim, in_dim * out_dim);
    for (idx, img) in images.iter().enumerate() {
        if img.shape() != (out_dim, out_dim) {
            return Err(Error::DimensionMismatch(format!(
                "image of a matrix unit is {:?}, expected {out_dim}x{out_dim}",
                img.shape()
            )));
        }
        let (i, j) = (idx / in_dim, idx % in_dim);
        mat.set_block(i * out_dim, j * out_dim, img);
    }
    Ok(ChoiMatrix { in_dim, out_dim, mat })
}

/// Evaluates `apply` on every matrix unit of `M_in` and assembles the Choi matrix.
pub fn choi_of_map(in_dim: usize, out_dim: usize, apply: impl Fn(&CMatrix) -> Result<CMatrix>) -> Result<ChoiMatrix> {
    let images = (0..in_dim * in_dim)
        .map(|idx| apply(&unit(in_dim, idx / in_dim, idx % in_dim)))
        .collect::<Result<Vec<_>>>()?;
    choi_from_units(in_dim, out_dim, &images)
}

impl ChoiMatrix {
    /// Wraps a `pn x pn` matrix as the Choi matrix of a map `M_p → M_n`.
    pub fn from_matrix(in_dim: usize, out_dim: usize, mat: CMatrix) -> Result<Self> {
        if mat.shape() != (in_dim * out_dim, in_dim * out_dim) {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix of M_{in_dim} → M_{out_dim} must be {0}x{0}",
                in_dim * out_dim
            )));
        }
        Ok(Self { in_dim, out_dim, mat })
    }

    /// Choi matrix of the identity map on `M_p`.
    pub fn identity_map(p: usize) -> Self {
        choi_of_map(p, p, |x| Ok(x.clone())).expect("shapes agree")
    }

    /// Choi matrix of `x ↦ tr(x)/p · 1_p`, which is `(1/p)·1`.
    pub fn depolarizing(p: usize) -> Self {
        Self {
            in_dim: p,
            out_dim: p,
            mat: CMatrix::identity(p * p).scale_real(1.0 / p as f64),
        }
    }

    /// `Φ(E_ij)`.
    pub fn unit_image(&self, i: usize, j: usize) -> CMatrix {
        let n = self.out_dim;
        self.mat.block(i * n, j * n, n, n)
    }

    /// `Φ(x) = Σ_ij x_ij Φ(E_ij)`.
    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        let (p, n) = (self.in_dim, self.out_dim);
        if x.shape() != (p, p) {
            return Err(Error::DimensionMismatch(format!(
                "map acts on {p}x{p}, got {:?}",
                x.shape()
            )));
        }
        let mut out = CMatrix::zeros(n, n);
        for i in 0..p {
            for j in 0..p {
                let c = x[(i, j)];
                if c.norm() == 0.0 {
                    continue;
                }
                for a in 0..n {
                    for b in 0..n {
                        out[(a, b)] += c * self.mat[(i * n + a, j * n + b)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// `‖Σ_i Φ(E_ii) − 1‖_F`.
    pub fn unitality_residual(&self) -> f64 {
        let n = self.out_dim;
        let mut sum = CMatrix::zeros(n, n);
        for i in 0..self.in_dim {
            sum = &sum + &self.unit_image(i, i);
        }
        sum.distance(&CMatrix::identity(n))
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(hermitian_eig(&self.mat.hermitian_part())?.min())
    }
}

/// Complete positivity and unitality of the map behind a Choi matrix. A Choi
/// matrix that is not Hermitian is reported as not completely positive.
pub fn is_ucp(c: &ChoiMatrix) -> UcpCheck {
    let tol = ToleranceConfig::default();
    let hermitian = c.mat.hermitian_defect() <= tol.hermitian * (1.0 + c.mat.frobenius_norm());
    let min_eig = c.min_eigenvalue().unwrap_or(f64::NAN);
    let unitality_residual = c.unitality_residual();
    UcpCheck {
        cp: hermitian && min_eig >= -tol.psd,
        unital: unitality_residual <= tol.unital,
        min_eig,
        unitality_residual,
    }
}

/// Certificate that two Weyl pairs generate completely order isomorphic
/// operator systems: Choi matrices of ucp maps in both directions carrying
/// each pair onto the other.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UcpCertificate {
    pub forward: ChoiMatrix,
    pub backward: ChoiMatrix,
    /// `‖Φ(u₁) − u₂‖, ‖Φ(v₁) − v₂‖, ‖Ψ(u₂) − u₁‖, ‖Ψ(v₂) − v₁‖`.
    pub mapping_residuals: Vec<f64>,
    /// Minimum Choi eigenvalues, forward then backward.
    pub psd_margins: Vec<f64>,
    /// Unitality residuals, forward then backward.
    pub unitality_residuals: Vec<f64>,
    /// Largest `‖Ψ(Φ(x)) − x‖_F` over `x ∈ {1, u₁, v₁, u₁*, v₁*}`.
    pub round_trip_residual: f64,
}

impl UcpCertificate {
    pub fn is_valid(&self) -> bool {
        let tol = ToleranceConfig::default();
        self.mapping_residuals.iter().all(|&r| r <= tol.certificate)
            && self.psd_margins.iter().all(|&m| m >= -tol.certificate)
            && self.unitality_residuals.iter().all(|&r| r <= tol.certificate)
    }
}

/// The map `x ↦ y₂ ρ₂(ρ₁⁻¹(y₁* x y₁)) y₂*` from `M_{d₁}` to `M_{d₂}`.
///
/// `ρ₁⁻¹` composed with `ρ₁` is the trace-preserving conditional expectation
/// onto `Alg(u₁, v₁)`, so the composite is ucp and restricts to a
/// *-isomorphism on the algebra.
fn transfer_map(
    from: &CanonicalForm,
    from_words: &WordTable,
    to: &CanonicalForm,
    to_words: &WordTable,
) -> Result<ChoiMatrix> {
    let (y1, y2) = (from.y(), to.y());
    let (y1a, y2a) = (y1.adjoint(), y2.adjoint());
    choi_of_map(from.d(), to.d(), |x| {
        let local = y1a.matmul(x).matmul(y1);
        let lambda = rho_coefficients(from_words, &local)?;
        Ok(y2.matmul(&rho_apply(to_words, &lambda)?).matmul(&y2a))
    })
}

/// Builds ucp maps in both directions between two Weyl pairs with the same
/// order and root of unity.
pub fn order_equivalence_certificate(pair1: &WeylSystem, pair2: &WeylSystem) -> Result<UcpCertificate> {
    let tol = ToleranceConfig::default();
    if pair1.p() != pair2.p() || (pair1.zeta() - pair2.zeta()).norm() > tol.primitive_root {
        return Err(Error::MismatchedOrder);
    }
    for ws in [pair1, pair2] {
        let report = check_relations(ws);
        if !report.pass {
            return Err(Error::NotWeylPair(report.max_residual()));
        }
    }
    let (u1, v1) = pair1.as_pair()?;
    let (u2, v2) = pair2.as_pair()?;
    let cf1 = canonicalize_system(pair1)?;
    let cf2 = canonicalize_system(pair2)?;
    let (w1, w2) = (word_table(&cf1), word_table(&cf2));
    let forward = transfer_map(&cf1, &w1, &cf2, &w2)?;
    let backward = transfer_map(&cf2, &w2, &cf1, &w1)?;

    let mapping_residuals = vec![
        forward.apply(u1)?.distance(u2),
        forward.apply(v1)?.distance(v2),
        backward.apply(u2)?.distance(u1),
        backward.apply(v2)?.distance(v1),
    ];
    let psd_margins = vec![forward.min_eigenvalue()?, backward.min_eigenvalue()?];
    let unitality_residuals = vec![forward.unitality_residual(), backward.unitality_residual()];
    let mut round_trip_residual: f64 = 0.0;
    for x in [
        CMatrix::identity(u1.rows()),
        u1.clone(),
        v1.clone(),
        u1.adjoint(),
        v1.adjoint(),
    ] {
        let back = backward.apply(&forward.apply(&x)?)?;
        round_trip_residual = round_trip_residual.max(back.distance(&x));
    }
    Ok(UcpCertificate {
        forward,
        backward,
        mapping_residuals,
        psd_margins,
        unitality_residuals,
        round_trip_residual,
    })
}
