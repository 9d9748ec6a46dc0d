//! Clock-and-shift matrices, commutation-relation systems, and the tensor
//! (Weyl–Brauer) construction.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::canonical::spectral_projections;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, kron_all, CMatrix};
use crate::tolerance::ToleranceConfig;

/// Largest `p^k` that [`weyl_brauer`] will build.
pub const DEFAULT_DIMENSION_CAP: usize = 4096;

/// `exp(2πi/p)`.
pub fn primitive_root(p: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / p as f64)
}

/// `exp(2πik/p)`, which is primitive exactly when `gcd(k, p) = 1`.
pub fn primitive_root_power(p: usize, k: usize) -> Result<Complex64> {
    if gcd(k % p, p) != 1 {
        return Err(Error::NotPrimitiveRoot(format!("exp(2πi·{k}/{p})")));
    }
    Ok(Complex64::from_polar(
        1.0,
        2.0 * std::f64::consts::PI * (k % p) as f64 / p as f64,
    ))
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `zeta^e` for an integer exponent, reduced mod `p`.
pub fn root_pow(zeta: Complex64, p: usize, e: i64) -> Complex64 {
    zeta.powu(e.rem_euclid(p as i64) as u32)
}

pub(crate) fn check_primitive(p: usize, zeta: Complex64, tol: f64) -> Result<()> {
    let bad = || Error::NotPrimitiveRoot(format!("{:.6}{:+.6}i for p = {p}", zeta.re, zeta.im));
    if p < 2 || (zeta.norm() - 1.0).abs() > tol || (zeta.powu(p as u32) - 1.0).norm() > tol {
        return Err(bad());
    }
    if (1..p).any(|k| (zeta.powu(k as u32) - 1.0).norm() <= tol) {
        return Err(bad());
    }
    Ok(())
}

/// A tuple of `d x d` unitaries `u_1..u_g` of order `p` together with the
/// commutation exponents `c_kl` of `u_k u_l = ζ^{c_kl} u_l u_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeylSystemRepr", into = "WeylSystemRepr")]
pub struct WeylSystem {
    p: usize,
    zeta: Complex64,
    d: usize,
    unitaries: Vec<CMatrix>,
    commutation: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
struct WeylSystemRepr {
    p: usize,
    #[serde(with = "crate::json::complex_pair")]
    zeta: Complex64,
    d: usize,
    unitaries: Vec<CMatrix>,
    commutation: Vec<Vec<i64>>,
}

impl TryFrom<WeylSystemRepr> for WeylSystem {
    type Error = Error;

    fn try_from(r: WeylSystemRepr) -> Result<Self> {
        let ws = WeylSystem::new(r.p, r.zeta, r.unitaries, r.commutation)?;
        if ws.d != r.d {
            return Err(Error::InvalidSystem(format!(
                "declared d = {} but matrices are {}x{}",
                r.d, ws.d, ws.d
            )));
        }
        Ok(ws)
    }
}

impl From<WeylSystem> for WeylSystemRepr {
    fn from(ws: WeylSystem) -> Self {
        Self {
            p: ws.p,
            zeta: ws.zeta,
            d: ws.d,
            unitaries: ws.unitaries,
            commutation: ws.commutation,
        }
    }
}

impl WeylSystem {
    /// Validates shapes, the root of unity, and skew-symmetry of `commutation`
    /// over `Z_p`. Whether the matrices actually satisfy the relations is left
    /// to [`check_relations`].
    #[allow(clippy::needless_range_loop)]
    pub fn new(p: usize, zeta: Complex64, unitaries: Vec<CMatrix>, commutation: Vec<Vec<i64>>) -> Result<Self> {
        check_primitive(p, zeta, ToleranceConfig::default().primitive_root)?;
        let g = unitaries.len();
        if g == 0 {
            return Err(Error::InvalidSystem("no unitaries".into()));
        }
        let d = unitaries[0].rows();
        if unitaries.iter().any(|u| u.shape() != (d, d)) || d == 0 {
            return Err(Error::InvalidSystem("unitaries must share one square shape".into()));
        }
        if commutation.len() != g || commutation.iter().any(|row| row.len() != g) {
            return Err(Error::InvalidSystem(format!("commutation matrix must be {g}x{g}")));
        }
        let pi = p as i64;
        for k in 0..g {
            for l in 0..g {
                if (commutation[k][l] + commutation[l][k]).rem_euclid(pi) != 0 {
                    return Err(Error::InvalidSystem(format!(
                        "commutation matrix is not skew-symmetric mod {p} at ({k}, {l})"
                    )));
                }
            }
        }
        Ok(Self {
            p,
            zeta,
            d,
            unitaries,
            commutation,
        })
    }

    /// Two-element system with `uv = ζvu`.
    pub fn pair(p: usize, zeta: Complex64, u: CMatrix, v: CMatrix) -> Result<Self> {
        Self::new(p, zeta, vec![u, v], vec![vec![0, 1], vec![-1, 0]])
    }

    /// System with the simple exponent matrix (`c_kl = 1` for `k < l`).
    pub fn simple(p: usize, zeta: Complex64, unitaries: Vec<CMatrix>) -> Result<Self> {
        let g = unitaries.len();
        Self::new(p, zeta, unitaries, simple_commutation(g))
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn zeta(&self) -> Complex64 {
        self.zeta
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn g(&self) -> usize {
        self.unitaries.len()
    }

    pub fn unitaries(&self) -> &[CMatrix] {
        &self.unitaries
    }

    pub fn commutation(&self) -> &[Vec<i64>] {
        &self.commutation
    }

    pub fn into_unitaries(self) -> Vec<CMatrix> {
        self.unitaries
    }

    /// First two unitaries, for pair-only operations.
    pub fn as_pair(&self) -> Result<(&CMatrix, &CMatrix)> {
        match self.unitaries.as_slice() {
            [u, v] => Ok((u, v)),
            _ => Err(Error::InvalidSystem(format!(
                "expected a pair, found {} unitaries",
                self.g()
            ))),
        }
    }

    /// Conjugates every member by `w`: `u_k ↦ w u_k w*`.
    pub fn conjugated(&self, w: &CMatrix) -> Result<Self> {
        let wa = w.adjoint();
        let unitaries = self
            .unitaries
            .iter()
            .map(|u| w.try_matmul(u).and_then(|x| x.try_matmul(&wa)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            unitaries,
            ..self.clone()
        })
    }
}

pub fn simple_commutation(g: usize) -> Vec<Vec<i64>> {
    (0..g)
        .map(|k| {
            (0..g)
                .map(|l| match k.cmp(&l) {
                    std::cmp::Ordering::Less => 1,
                    std::cmp::Ordering::Equal => 0,
                    std::cmp::Ordering::Greater => -1,
                })
                .collect()
        })
        .collect()
}

/// Result of [`check_relations`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub max_order_residual: f64,
    pub order_residuals: Vec<f64>,
    pub unitarity_residuals: Vec<f64>,
    /// `‖u_k u_l − ζ^{c_kl} u_l u_k‖_F`.
    pub residual_matrix: Vec<Vec<f64>>,
    pub is_simple: bool,
    pub tolerance: f64,
    pub pass: bool,
}

impl RelationReport {
    pub fn max_commutation_residual(&self) -> f64 {
        self.residual_matrix.iter().flatten().copied().fold(0.0, f64::max)
    }

    pub fn order_pass(&self) -> bool {
        self.max_order_residual <= self.tolerance
    }

    pub fn max_residual(&self) -> f64 {
        self.max_order_residual
            .max(self.max_commutation_residual())
            .max(self.unitarity_residuals.iter().copied().fold(0.0, f64::max))
    }
}

/// Audits unitarity, order, and every commutation relation at the default
/// tolerance of `1e-9 · d`.
pub fn check_relations(ws: &WeylSystem) -> RelationReport {
    check_relations_with(ws, ToleranceConfig::default().relation(ws.d))
}

#[allow(clippy::needless_range_loop)]
pub fn check_relations_with(ws: &WeylSystem, tolerance: f64) -> RelationReport {
    let g = ws.g();
    let order_residuals: Vec<f64> = ws.unitaries.iter().map(|u| u.order_defect(ws.p)).collect();
    let unitarity_residuals: Vec<f64> = ws.unitaries.iter().map(CMatrix::unitarity_defect).collect();
    let mut residual_matrix = vec![vec![0.0; g]; g];
    for k in 0..g {
        for l in 0..g {
            if k == l {
                continue;
            }
            let (a, b) = (&ws.unitaries[k], &ws.unitaries[l]);
            let lhs = a.matmul(b);
            let rhs = b.matmul(a).scale(root_pow(ws.zeta, ws.p, ws.commutation[k][l]));
            residual_matrix[k][l] = lhs.distance(&rhs);
        }
    }
    let pi = ws.p as i64;
    let is_simple = (0..g).all(|k| (k + 1..g).all(|l| ws.commutation[k][l].rem_euclid(pi) == 1));
    let max_order_residual = order_residuals.iter().copied().fold(0.0, f64::max);
    let mut report = RelationReport {
        max_order_residual,
        order_residuals,
        unitarity_residuals,
        residual_matrix,
        is_simple,
        tolerance,
        pass: false,
    };
    report.pass = report.max_residual() <= tolerance;
    report
}

/// Clock matrix `diag(1, ζ, …, ζ^{p−1})`.
pub fn clock_matrix(p: usize, zeta: Complex64) -> Result<CMatrix> {
    check_primitive(p, zeta, ToleranceConfig::default().primitive_root)?;
    let entries: Vec<Complex64> = (0..p).map(|j| zeta.powu(j as u32)).collect();
    Ok(CMatrix::diag(&entries))
}

/// Cyclic shift `e_j ↦ e_{j+1 mod p}`.
pub fn shift_matrix(p: usize) -> CMatrix {
    assert!(p >= 2, "shift matrix needs p >= 2");
    let mut m = CMatrix::zeros(p, p);
    for j in 0..p {
        m[((j + 1) % p, j)] = crate::linalg::ONE;
    }
    m
}

/// The clock-and-shift pair, `uv = ζvu`.
pub fn weyl_pair(p: usize, zeta: Complex64) -> Result<WeylSystem> {
    WeylSystem::pair(p, zeta, clock_matrix(p, zeta)?, shift_matrix(p))
}

fn require_odd(p: usize) -> Result<()> {
    if p < 3 || p.is_multiple_of(2) {
        return Err(Error::UnsupportedOrder(p, "needs an odd order p >= 3"));
    }
    Ok(())
}

/// The three simple unitaries `(ω_a, ω_b, ω_c) = (u, ζ^{(p−1)/2} uv, v)`.
pub fn simple_triple_matrices(p: usize, zeta: Complex64) -> Result<[CMatrix; 3]> {
    require_odd(p)?;
    let u = clock_matrix(p, zeta)?;
    let v = shift_matrix(p);
    let lambda = zeta.powu(((p - 1) / 2) as u32);
    let w = u.matmul(&v).scale(lambda);
    Ok([u, w, v])
}

/// Simple triple `(ω_a, ω_b, ω_c)` for odd `p`.
pub fn simple_weyl_triple(p: usize, zeta: Complex64) -> Result<WeylSystem> {
    let [a, b, c] = simple_triple_matrices(p, zeta)?;
    WeylSystem::simple(p, zeta, vec![a, b, c])
}

/// Tensor iteration `x_1⊗1, …, x_{m−1}⊗1, x_m⊗ω_a, x_m⊗ω_b, x_m⊗ω_c`
/// applied `k − 1` times to the simple triple: `2k + 1` unitaries of size `p^k`.
pub fn weyl_brauer(p: usize, k: usize, zeta: Complex64) -> Result<WeylSystem> {
    weyl_brauer_with_cap(p, k, zeta, DEFAULT_DIMENSION_CAP)
}

pub fn weyl_brauer_with_cap(p: usize, k: usize, zeta: Complex64, cap: usize) -> Result<WeylSystem> {
    require_odd(p)?;
    if k == 0 {
        return Err(Error::InvalidSystem("weyl_brauer needs k >= 1".into()));
    }
    let dim = (p as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if dim > cap as u128 {
        return Err(Error::DimensionOverflow {
            dim: usize::try_from(dim).unwrap_or(usize::MAX),
            cap,
        });
    }
    let triple = simple_triple_matrices(p, zeta)?;
    let id = CMatrix::identity(p);
    let mut current: Vec<CMatrix> = triple.to_vec();
    for _ in 1..k {
        let (last, head) = current.split_last().expect("non-empty");
        let mut next: Vec<CMatrix> = head.iter().map(|x| x.kron(&id)).collect();
        next.extend(triple.iter().map(|w| last.kron(w)));
        current = next;
    }
    WeylSystem::simple(p, zeta, current)
}

/// Pairing identities of a Weyl–Brauer system `Q_k = (z_1, …, z_{2k}, z_{2k+1})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrauerPairing {
    /// `‖z_{2j−1}^{p−1} z_{2j} − ζ^{(p−1)/2} (1⊗…⊗ω_c⊗…⊗1)‖_F`, `ω_c` in slot `j`.
    pub pair_residuals: Vec<f64>,
    /// `‖ζ^{−k(p−1)/2} ∏_j z_{2j−1}^{p−1} z_{2j} − ⊗^k ω_c‖_F`.
    pub recovery_residual: f64,
    /// `‖z_{2k+1} − ⊗^k ω_c‖_F`.
    pub last_element_residual: f64,
}

fn brauer_shape(ws: &WeylSystem) -> Result<(usize, [CMatrix; 3])> {
    let p = ws.p;
    let g = ws.g();
    if g < 3 || g.is_multiple_of(2) {
        return Err(Error::InvalidSystem(format!(
            "{g} unitaries is not a Weyl–Brauer family"
        )));
    }
    let k = (g - 1) / 2;
    if (p as u128).checked_pow(k as u32) != Some(ws.d as u128) {
        return Err(Error::InvalidSystem(format!("dimension {} is not {p}^{k}", ws.d)));
    }
    Ok((k, simple_triple_matrices(p, ws.zeta)?))
}

fn slot_tensor(p: usize, k: usize, j: usize, m: &CMatrix) -> CMatrix {
    let id = CMatrix::identity(p);
    let factors: Vec<&CMatrix> = (0..k).map(|i| if i == j { m } else { &id }).collect();
    kron_all(&factors)
}

/// Checks the pairing identities that put `⊗^k ω_c` inside the algebra
/// generated by the first `2k` elements.
///
/// Since `ω_a^{p−1} ω_b = ζ^{(p−1)/2} ω_c` and the `ω_c` prefixes of each pair
/// satisfy `ω_c^p = 1`, each pair contributes `ω_c` in its own tensor slot.
pub fn brauer_pairing(ws: &WeylSystem) -> Result<BrauerPairing> {
    let (k, [_, _, omega_c]) = brauer_shape(ws)?;
    let p = ws.p;
    let half = ((p - 1) / 2) as i64;
    let z = &ws.unitaries;
    let mut pair_residuals = Vec::with_capacity(k);
    let mut product = CMatrix::identity(ws.d);
    for j in 0..k {
        let pair = z[2 * j].pow(p - 1).matmul(&z[2 * j + 1]);
        let expected = slot_tensor(p, k, j, &omega_c).scale(root_pow(ws.zeta, p, half));
        pair_residuals.push(pair.distance(&expected));
        product = product.matmul(&pair);
    }
    let full_c = kron_all(&vec![&omega_c; k]);
    let recovered = product.scale(root_pow(ws.zeta, p, -(k as i64) * half));
    Ok(BrauerPairing {
        pair_residuals,
        recovery_residual: recovered.distance(&full_c),
        last_element_residual: z[2 * k].distance(&full_c),
    })
}

/// Residuals of the plain products `z_{2j−1} z_{2j} − ζ^{(1−p)/2}(slot ω_c)`.
/// These do not vanish for `p ≥ 3`; kept to audit that form of the identity.
pub fn plain_product_pairing_residuals(ws: &WeylSystem) -> Result<Vec<f64>> {
    let (k, [_, _, omega_c]) = brauer_shape(ws)?;
    let p = ws.p;
    let z = &ws.unitaries;
    Ok((0..k)
        .map(|j| {
            let pair = z[2 * j].matmul(&z[2 * j + 1]);
            let expected = slot_tensor(p, k, j, &omega_c).scale(root_pow(ws.zeta, p, -(((p - 1) / 2) as i64)));
            pair.distance(&expected)
        })
        .collect())
}

/// A simple triple `(u, ζ·ω_b, v)` with the same relations as the simple
/// Weyl triple but a different middle element.
pub fn counterexample_triple(p: usize, zeta: Complex64) -> Result<WeylSystem> {
    let [a, b, c] = simple_triple_matrices(p, zeta)?;
    WeylSystem::simple(p, zeta, vec![a, b.scale(zeta), c])
}

/// Weighted cycle with `(1, p) = 1`, `(k, k−1) = ζ^k` for `k = 2..p−1`, and
/// `(p, p−1) = ζ^{(1−p)/2}` (1-based). No relation is claimed for it.
pub fn ew_matrix(p: usize, zeta: Complex64) -> Result<CMatrix> {
    require_odd(p)?;
    check_primitive(p, zeta, ToleranceConfig::default().primitive_root)?;
    let mut y = CMatrix::zeros(p, p);
    y[(0, p - 1)] = crate::linalg::ONE;
    for k in 2..p {
        y[(k - 1, k - 2)] = zeta.powu(k as u32);
    }
    y[(p - 1, p - 2)] = root_pow(zeta, p, -(((p - 1) / 2) as i64));
    Ok(y)
}

/// `(u, ew_matrix, v)` packaged as a simple triple for auditing.
pub fn ew_triple(p: usize, zeta: Complex64) -> Result<WeylSystem> {
    let u = clock_matrix(p, zeta)?;
    let y = ew_matrix(p, zeta)?;
    WeylSystem::simple(p, zeta, vec![u, y, shift_matrix(p)])
}

/// Spectral facts about a single order-`p` unitary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralAudit {
    pub divides: bool,
    #[serde(with = "crate::json::complex_pair")]
    pub trace: Complex64,
    /// Multiplicity of `ζ^k`, `k = 0..p−1`.
    pub spectrum_multiplicities: Vec<usize>,
}

pub fn spectral_audit(u: &CMatrix, p: usize, zeta: Complex64) -> Result<SpectralAudit> {
    let tol = ToleranceConfig::default();
    let d = u.rows();
    let projections = spectral_projections(u, p, zeta)?;
    let spectrum_multiplicities = projections
        .iter()
        .map(|pk| projection_rank(pk, tol.rank_threshold))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralAudit {
        divides: d.is_multiple_of(p),
        trace: u.trace(),
        spectrum_multiplicities,
    })
}

/// Number of eigenvalues above `threshold`; exact idempotents have spectrum `{0, 1}`.
pub(crate) fn projection_rank(pk: &CMatrix, threshold: f64) -> Result<usize> {
    let eig = hermitian_eig(&pk.hermitian_part())?;
    Ok(eig.values.iter().filter(|&&l| l > threshold).count())
}
