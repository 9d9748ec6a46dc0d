//! Block canonical form of a Weyl pair and explicit unitary equivalence with
//! the clock-and-shift pair.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::random::{haar_unitary_with, rng_from_seed};
use crate::linalg::{column_space_basis, CMatrix};
use crate::tolerance::ToleranceConfig;
use crate::weyl::{check_primitive, check_relations, clock_matrix, projection_rank, shift_matrix, WeylSystem};

/// Spectral projections `P_k = (1/p) Σ_j ζ^{−kj} u^j` onto the `ζ^k`-eigenspaces
/// of an order-`p` unitary.
pub fn spectral_projections(u: &CMatrix, p: usize, zeta: Complex64) -> Result<Vec<CMatrix>> {
    let tol = ToleranceConfig::default();
    check_primitive(p, zeta, tol.primitive_root)?;
    if !u.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} is not square",
            u.rows(),
            u.cols()
        )));
    }
    let d = u.rows();
    let residual = u.order_defect(p);
    if residual > tol.order_precheck_per_dim * d as f64 {
        return Err(Error::OrderViolation { p, residual });
    }
    let mut powers = Vec::with_capacity(p);
    powers.push(CMatrix::identity(d));
    for j in 1..p {
        powers.push(powers[j - 1].matmul(u));
    }
    let inv_p = 1.0 / p as f64;
    Ok((0..p)
        .map(|k| {
            let mut acc = CMatrix::zeros(d, d);
            for (j, uj) in powers.iter().enumerate() {
                let phase = zeta.conj().powu(((k * j) % p) as u32);
                acc.axpy(phase * inv_p, uj);
            }
            acc
        })
        .collect())
}

/// A Weyl pair brought to block form: `y* u y = ũ = diag(ζ^k 1_n)` and
/// `y* v y = ṽ`, the block cycle with `v_k` at block `(k, k−1)` and `v_1` in
/// the corner `(1, p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CanonicalRepr", into = "CanonicalRepr")]
pub struct CanonicalForm {
    p: usize,
    n: usize,
    zeta: Complex64,
    y: CMatrix,
    /// `v_2, …, v_p`.
    blocks: Vec<CMatrix>,
    v1: CMatrix,
}

#[derive(Serialize, Deserialize)]
struct CanonicalRepr {
    p: usize,
    n: usize,
    #[serde(with = "crate::json::complex_pair")]
    zeta: Complex64,
    y: CMatrix,
    blocks: Vec<CMatrix>,
}

impl TryFrom<CanonicalRepr> for CanonicalForm {
    type Error = Error;

    fn try_from(r: CanonicalRepr) -> Result<Self> {
        CanonicalForm::from_blocks(r.p, r.zeta, r.y, r.blocks)
    }
}

impl From<CanonicalForm> for CanonicalRepr {
    fn from(cf: CanonicalForm) -> Self {
        Self {
            p: cf.p,
            n: cf.n,
            zeta: cf.zeta,
            y: cf.y,
            blocks: cf.blocks,
        }
    }
}

/// `v_2* v_3* ⋯ v_p*`.
fn closing_block(blocks: &[CMatrix], n: usize) -> CMatrix {
    blocks
        .iter()
        .fold(CMatrix::identity(n), |acc, b| acc.matmul(&b.adjoint()))
}

impl CanonicalForm {
    /// Assembles a form from `y` and `v_2..v_p`; the corner block is the closure product.
    pub fn from_blocks(p: usize, zeta: Complex64, y: CMatrix, blocks: Vec<CMatrix>) -> Result<Self> {
        check_primitive(p, zeta, ToleranceConfig::default().primitive_root)?;
        if blocks.len() + 1 != p {
            return Err(Error::DimensionMismatch(format!(
                "expected {} blocks, found {}",
                p - 1,
                blocks.len()
            )));
        }
        let n = blocks[0].rows();
        if blocks.iter().any(|b| b.shape() != (n, n)) || y.shape() != (p * n, p * n) {
            return Err(Error::DimensionMismatch("block sizes do not match y".into()));
        }
        let v1 = closing_block(&blocks, n);
        Ok(Self {
            p,
            n,
            zeta,
            y,
            blocks,
            v1,
        })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.p * self.n
    }

    pub fn zeta(&self) -> Complex64 {
        self.zeta
    }

    pub fn y(&self) -> &CMatrix {
        &self.y
    }

    /// `v_2, …, v_p`.
    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn v1(&self) -> &CMatrix {
        &self.v1
    }

    /// `v_k` for `k = 1..=p`.
    pub fn v(&self, k: usize) -> &CMatrix {
        assert!((1..=self.p).contains(&k), "block index {k} out of 1..={}", self.p);
        if k == 1 {
            &self.v1
        } else {
            &self.blocks[k - 2]
        }
    }

    /// `ũ = diag(1, ζ, …, ζ^{p−1}) ⊗ 1_n`.
    pub fn u_tilde(&self) -> CMatrix {
        clock_matrix(self.p, self.zeta)
            .expect("root validated at construction")
            .kron(&CMatrix::identity(self.n))
    }

    pub fn v_tilde(&self) -> CMatrix {
        block_cycle(self.p, self.n, &self.v1, &self.blocks)
    }

    /// `‖y*uy − ũ‖_F + ‖y*vy − ṽ‖_F`.
    pub fn reconstruction_residual(&self, u: &CMatrix, v: &CMatrix) -> f64 {
        let ya = self.y.adjoint();
        let uu = ya.matmul(u).matmul(&self.y);
        let vv = ya.matmul(v).matmul(&self.y);
        uu.distance(&self.u_tilde()) + vv.distance(&self.v_tilde())
    }

    /// `‖v_1 − v_2* ⋯ v_p*‖_F`, where `v_1` is the stored corner block.
    pub fn closure_residual(&self) -> f64 {
        self.v1.distance(&closing_block(&self.blocks, self.n))
    }

    /// `‖ṽ^p − 1‖_F`.
    pub fn cycle_residual(&self) -> f64 {
        self.v_tilde().order_defect(self.p)
    }

    pub fn max_block_unitarity_defect(&self) -> f64 {
        std::iter::once(&self.v1)
            .chain(&self.blocks)
            .map(CMatrix::unitarity_defect)
            .fold(self.y.unitarity_defect(), f64::max)
    }
}

/// Block cycle with `v_k` at block `(k, k−1)` for `k = 2..p` and `v_1` at `(1, p)`.
fn block_cycle(p: usize, n: usize, v1: &CMatrix, blocks: &[CMatrix]) -> CMatrix {
    let mut m = CMatrix::zeros(p * n, p * n);
    for (idx, b) in blocks.iter().enumerate() {
        let k = idx + 1;
        m.set_block(k * n, (k - 1) * n, b);
    }
    m.set_block(0, (p - 1) * n, v1);
    m
}

/// Reduces a Weyl pair `uv = ζvu` in `M_{pn}` to block form.
///
/// The basis is fixed by orthonormalizing pivoted columns of each spectral
/// projection with a positive-diagonal QR, so the result is deterministic.
pub fn canonicalize(u: &CMatrix, v: &CMatrix, p: usize, zeta: Complex64) -> Result<CanonicalForm> {
    let tol = ToleranceConfig::default();
    if u.shape() != v.shape() || !u.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "u is {:?}, v is {:?}",
            u.shape(),
            v.shape()
        )));
    }
    let d = u.rows();
    if !d.is_multiple_of(p) {
        return Err(Error::DivisibilityViolation { p, d });
    }
    let n = d / p;
    let ws = WeylSystem::pair(p, zeta, u.clone(), v.clone())?;
    let report = check_relations(&ws);
    if !report.pass {
        return Err(Error::NotWeylPair(report.max_residual()));
    }
    let projections = spectral_projections(u, p, zeta)?;
    let ranks = projections
        .iter()
        .map(|pk| projection_rank(pk, tol.rank_threshold))
        .collect::<Result<Vec<_>>>()?;
    if ranks.iter().any(|&r| r != n) {
        return Err(Error::UnequalMultiplicities(ranks));
    }
    let mut y = CMatrix::zeros(d, d);
    for (k, pk) in projections.iter().enumerate() {
        let q = column_space_basis(pk, n)?;
        y.set_block(0, k * n, &q);
    }
    let vv = y.adjoint().matmul(v).matmul(&y);
    let blocks: Vec<CMatrix> = (1..p).map(|k| vv.block(k * n, (k - 1) * n, n, n)).collect();
    let v1 = vv.block(0, (p - 1) * n, n, n);
    Ok(CanonicalForm {
        p,
        n,
        zeta,
        y,
        blocks,
        v1,
    })
}

/// Canonicalizes the first two members of a system.
pub fn canonicalize_system(ws: &WeylSystem) -> Result<CanonicalForm> {
    let (u, v) = ws.as_pair()?;
    canonicalize(u, v, ws.p(), ws.zeta())
}

/// Samples a Weyl pair in `M_{pn}` with `exp(2πi/p)`: `ũ` together with a block cycle
/// of Haar blocks `v_2..v_p` and the closing corner. With `scramble`, both
/// are conjugated by one further Haar unitary.
pub fn random_pair(p: usize, n: usize, seed: u64, scramble: bool) -> Result<WeylSystem> {
    random_pair_with_root(p, n, crate::weyl::primitive_root(p), seed, scramble)
}

pub fn random_pair_with_root(p: usize, n: usize, zeta: Complex64, seed: u64, scramble: bool) -> Result<WeylSystem> {
    if p < 2 || n < 1 {
        return Err(Error::InvalidSystem(format!(
            "random_pair needs p >= 2 and n >= 1, got p = {p}, n = {n}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let blocks: Vec<CMatrix> = (1..p).map(|_| haar_unitary_with(n, &mut rng)).collect();
    let v1 = closing_block(&blocks, n);
    let u = clock_matrix(p, zeta)?.kron(&CMatrix::identity(n));
    let v = block_cycle(p, n, &v1, &blocks);
    let ws = WeylSystem::pair(p, zeta, u, v)?;
    if scramble {
        let w = haar_unitary_with(p * n, &mut rng);
        ws.conjugated(&w)
    } else {
        Ok(ws)
    }
}

/// For a Weyl pair in `M_p`, a unitary `w` with `w*uw = u_clock` and `w*vw = v_shift`.
pub fn unitary_equivalence(u: &CMatrix, v: &CMatrix, p: usize, zeta: Complex64) -> Result<CMatrix> {
    if u.rows() != p {
        return Err(Error::DimensionMismatch(format!(
            "unitary equivalence needs d = p = {p}, got d = {}",
            u.rows()
        )));
    }
    let cf = canonicalize(u, v, p, zeta)?;
    let mut phases = Vec::with_capacity(p);
    phases.push(crate::linalg::ONE);
    for k in 2..=p {
        let lambda = cf.v(k)[(0, 0)];
        let prev = phases[k - 2];
        phases.push(lambda * prev);
    }
    Ok(cf.y.matmul(&CMatrix::diag(&phases)))
}

/// `‖w*uw − u_clock‖_F` and `‖w*vw − v_shift‖_F`.
pub fn equivalence_residuals(w: &CMatrix, u: &CMatrix, v: &CMatrix, p: usize, zeta: Complex64) -> Result<(f64, f64)> {
    let wa = w.adjoint();
    let ru = wa.matmul(u).matmul(w).distance(&clock_matrix(p, zeta)?);
    let rv = wa.matmul(v).matmul(w).distance(&shift_matrix(p));
    Ok((ru, rv))
}
