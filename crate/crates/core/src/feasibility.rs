//! Existence of ucp maps with prescribed values, decided by Dykstra's
//! alternating projections between the PSD cone and an affine set of Choi
//! matrices.

use serde::{Deserialize, Serialize};

use crate::choi::ChoiMatrix;
use crate::error::{Error, Result};
use crate::linalg::random::{random_hermitian_unit, rng_from_seed};
use crate::linalg::{hermitian_eig, psd_project, CMatrix};
use crate::weyl::{clock_matrix, primitive_root, shift_matrix};

pub const DEFAULT_MAX_ITERS: usize = 20_000;
pub const DEFAULT_TOL: f64 = 1e-7;
/// Feasibility tolerance for dilation runs.
pub const DILATION_TOL: f64 = 1e-10;
const PINV_CUTOFF: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeasibilityStatus {
    Feasible,
    InfeasibleEvidence,
    Undetermined,
}

impl FeasibilityStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Feasible => "feasible",
            Self::InfeasibleEvidence => "infeasible_evidence",
            Self::Undetermined => "undetermined",
        }
    }
}

/// Outcome of one feasibility run. `witness` is the Choi matrix of a feasible
/// map when `status` is feasible and the last PSD iterate otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub status: FeasibilityStatus,
    pub gap: f64,
    pub iterations: usize,
    pub witness: CMatrix,
    pub in_dim: usize,
    pub out_dim: usize,
    #[serde(skip)]
    pub gap_history: Vec<f64>,
}

impl FeasibilityReport {
    pub fn witness_choi(&self) -> ChoiMatrix {
        ChoiMatrix {
            in_dim: self.in_dim,
            out_dim: self.out_dim,
            mat: self.witness.clone(),
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.status == FeasibilityStatus::Feasible
    }
}

/// `Φ(input)` restricted to its leading `window x window` corner must equal `target`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub input: CMatrix,
    pub target: CMatrix,
    pub window: usize,
}

/// Affine conditions on a map `M_in → M_out`. Unitality is always included.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationProblem {
    in_dim: usize,
    out_dim: usize,
    constraints: Vec<Constraint>,
}

impl InterpolationProblem {
    pub fn new(in_dim: usize, out_dim: usize) -> Self {
        Self {
            in_dim,
            out_dim,
            constraints: vec![Constraint {
                input: CMatrix::identity(in_dim),
                target: CMatrix::identity(out_dim),
                window: out_dim,
            }],
        }
    }

    /// `Φ(z_k) = A_k` for each pair, with the adjoint equations.
    pub fn from_pairs(generators: &[CMatrix], targets: &[CMatrix]) -> Result<Self> {
        if generators.is_empty() || generators.len() != targets.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} generators and {} targets",
                generators.len(),
                targets.len()
            )));
        }
        let mut problem = Self::new(generators[0].rows(), targets[0].rows());
        for (z, a) in generators.iter().zip(targets) {
            problem.add_pair(z, a)?;
        }
        Ok(problem)
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn add_pair(&mut self, z: &CMatrix, a: &CMatrix) -> Result<()> {
        self.add_compressed(z, a)
    }

    /// Constrains only the leading `k x k` corner of `Φ(z)`, where `a` is `k x k`.
    pub fn add_compressed(&mut self, z: &CMatrix, a: &CMatrix) -> Result<()> {
        let window = a.rows();
        if z.shape() != (self.in_dim, self.in_dim) {
            return Err(Error::DimensionMismatch(format!(
                "generator is {:?}, expected {1}x{1}",
                z.shape(),
                self.in_dim
            )));
        }
        if !a.is_square() || window == 0 || window > self.out_dim {
            return Err(Error::DimensionMismatch(format!(
                "target is {:?}, expected at most {1}x{1}",
                a.shape(),
                self.out_dim
            )));
        }
        self.constraints.push(Constraint {
            input: z.clone(),
            target: a.clone(),
            window,
        });
        self.constraints.push(Constraint {
            input: z.adjoint(),
            target: a.adjoint(),
            window,
        });
        Ok(())
    }
}

/// Knobs for [`solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationOptions {
    pub max_iters: usize,
    pub tol: f64,
    /// Seeds the perturbation of the starting point.
    pub seed: u64,
    /// Size of the perturbation, relative to the start's smallest eigenvalue.
    pub perturbation: f64,
    pub stall_window: usize,
    pub stall_rel_change: f64,
    pub record_gaps: bool,
}

impl Default for InterpolationOptions {
    fn default() -> Self {
        Self {
            max_iters: DEFAULT_MAX_ITERS,
            tol: DEFAULT_TOL,
            seed: 0,
            perturbation: 0.1,
            stall_window: 200,
            stall_rel_change: 1e-3,
            record_gaps: false,
        }
    }
}

/// Isometric real coordinates for `N x N` Hermitian matrices: the real
/// diagonal, then `√2·Re` and `√2·Im` of each upper-triangular entry.
struct HermitianCoords {
    n: usize,
}

impl HermitianCoords {
    fn len(&self) -> usize {
        self.n * self.n
    }

    fn pair_index(&self, a: usize, b: usize) -> usize {
        // Position of (a, b), a < b, in row-major order of the strict upper triangle.
        let n = self.n;
        let before = a * (2 * n - a - 1) / 2;
        n + 2 * (before + (b - a - 1))
    }

    fn to_coords(&self, m: &CMatrix) -> Vec<f64> {
        let n = self.n;
        let mut x = vec![0.0; self.len()];
        let s = std::f64::consts::SQRT_2;
        for a in 0..n {
            x[a] = m[(a, a)].re;
            for b in a + 1..n {
                let k = self.pair_index(a, b);
                x[k] = s * m[(a, b)].re;
                x[k + 1] = s * m[(a, b)].im;
            }
        }
        x
    }

    fn to_matrix(&self, x: &[f64]) -> CMatrix {
        let n = self.n;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut m = CMatrix::zeros(n, n);
        for a in 0..n {
            m[(a, a)] = x[a].into();
            for b in a + 1..n {
                let k = self.pair_index(a, b);
                let z = num_complex::Complex64::new(h * x[k], h * x[k + 1]);
                m[(a, b)] = z;
                m[(b, a)] = z.conj();
            }
        }
        m
    }

    /// Adds `κ·C[r][c]`, expressed in coordinates, into the real and imaginary rows.
    fn accumulate(&self, kappa: num_complex::Complex64, r: usize, c: usize, re_row: &mut [f64], im_row: &mut [f64]) {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        if r == c {
            re_row[r] += kappa.re;
            im_row[r] += kappa.im;
            return;
        }
        let (a, b, sign) = if r < c { (r, c, 1.0) } else { (c, r, -1.0) };
        let k = self.pair_index(a, b);
        // C[r][c] = h·(x_re + sign·i·x_im)
        let g_re = kappa * h;
        let g_im = kappa * num_complex::Complex64::new(0.0, sign * h);
        re_row[k] += g_re.re;
        im_row[k] += g_re.im;
        re_row[k + 1] += g_im.re;
        im_row[k + 1] += g_im.im;
    }
}

/// Precomputed least-squares projection onto `{x : Ax = b}`.
struct AffineProjector {
    rows: usize,
    cols: usize,
    a: Vec<f64>,
    pinv: Vec<f64>,
    b: Vec<f64>,
    /// `‖A A⁺ b − b‖`, positive when the constraints are inconsistent.
    inconsistency: f64,
}

fn real_matrix(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
    CMatrix::from_fn(rows, cols, |i, j| data[i * cols + j].into())
}

/// Dense real constraint matrix (row-major) and right-hand side in Hermitian coordinates.
fn constraint_system(problem: &InterpolationProblem, coords: &HermitianCoords) -> (Vec<f64>, Vec<f64>) {
    let (p, n) = (problem.in_dim, problem.out_dim);
    let cols = coords.len();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for con in &problem.constraints {
        for l in 0..con.window {
            for m in 0..con.window {
                let mut re_row = vec![0.0; cols];
                let mut im_row = vec![0.0; cols];
                for i in 0..p {
                    for j in 0..p {
                        let kappa = con.input[(i, j)];
                        if kappa.norm() != 0.0 {
                            coords.accumulate(kappa, i * n + l, j * n + m, &mut re_row, &mut im_row);
                        }
                    }
                }
                a.extend(re_row);
                a.extend(im_row);
                b.push(con.target[(l, m)].re);
                b.push(con.target[(l, m)].im);
            }
        }
    }
    (a, b)
}

impl AffineProjector {
    fn build(cols: usize, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let rows = b.len();
        let am = real_matrix(rows, cols, &a);
        let at = am.transpose();
        let wide = rows <= cols;
        let gram = if wide { am.matmul(&at) } else { at.matmul(&am) };
        let eig = hermitian_eig(&gram.hermitian_part())
            .map_err(|e| Error::ConstraintDegeneracy(format!("constraint Gram eigendecomposition failed: {e}")))?;
        let top = eig.max();
        if !(top.is_finite() && top > 0.0) {
            return Err(Error::ConstraintDegeneracy("constraint operator is zero".into()));
        }
        let cutoff = PINV_CUTOFF * top;
        let gram_pinv = eig.reconstruct_with(|l| if l > cutoff { 1.0 / l } else { 0.0 });
        let pinv_c = if wide {
            at.matmul(&gram_pinv)
        } else {
            gram_pinv.matmul(&at)
        };
        let pinv: Vec<f64> = pinv_c.data().iter().map(|z| z.re).collect();
        let mut proj = Self {
            rows,
            cols,
            a,
            pinv,
            b,
            inconsistency: 0.0,
        };
        let x_ls = proj.pinv_apply(&proj.b);
        let fitted = proj.a_apply(&x_ls);
        proj.inconsistency = fitted
            .iter()
            .zip(&proj.b)
            .map(|(f, t)| (f - t).powi(2))
            .sum::<f64>()
            .sqrt();
        Ok(proj)
    }

    /// Distance from `s` to the row space of `A`.
    fn row_space_residual(&self, s: &[f64]) -> f64 {
        let back = self.pinv_apply(&self.a_apply(s));
        distance(s, &back)
    }

    fn a_apply(&self, x: &[f64]) -> Vec<f64> {
        self.a
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(x).map(|(r, v)| r * v).sum())
            .collect()
    }

    fn pinv_apply(&self, r: &[f64]) -> Vec<f64> {
        self.pinv
            .chunks_exact(self.rows)
            .map(|row| row.iter().zip(r).map(|(p, v)| p * v).sum())
            .collect()
    }

    /// `x − A⁺(Ax − b)`.
    fn project(&self, x: &[f64]) -> Vec<f64> {
        let residual: Vec<f64> = self.a_apply(x).iter().zip(&self.b).map(|(ax, b)| ax - b).collect();
        let correction = self.pinv_apply(&residual);
        x.iter().zip(correction).map(|(v, c)| v - c).collect()
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
}

/// A face `{V W V* : W ⪰ 0}` of the PSD cone containing every feasible Choi
/// matrix, exposed by a PSD matrix `S` with `⟨S, C⟩ = 0` on the affine set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Face {
    /// Orthonormal columns spanning `ker S`.
    pub basis: CMatrix,
    pub certificate_min_eig: f64,
    /// Distance from `S` to the span of the constraint functionals.
    pub row_space_residual: f64,
    /// `⟨S, C⟩` for points `C` of the affine set.
    pub certificate_value: f64,
}

/// Verifies that `s` exposes a face containing the feasible set and returns it.
///
/// `s` must be PSD and a combination of the constraint functionals that
/// vanishes on the affine set; then `⟨S, C⟩ = 0` with `C ⪰ 0` forces `SC = 0`.
pub fn expose_face(problem: &InterpolationProblem, s: &CMatrix) -> Result<Face> {
    let big = problem.in_dim * problem.out_dim;
    if s.shape() != (big, big) {
        return Err(Error::DimensionMismatch(format!("certificate must be {big}x{big}")));
    }
    let coords = HermitianCoords { n: big };
    let (a, b) = constraint_system(problem, &coords);
    let affine = AffineProjector::build(coords.len(), a, b)?;
    let sv = coords.to_coords(s);
    let row_space_residual = affine.row_space_residual(&sv);
    let anchor = affine.pinv_apply(&affine.b);
    let certificate_value: f64 = sv.iter().zip(&anchor).map(|(x, y)| x * y).sum();
    let eig = hermitian_eig(s)?;
    let scale = eig.max().abs().max(1.0);
    let kernel: Vec<_> = (0..big)
        .filter(|&k| eig.values[k] <= 1e-9 * scale)
        .map(|k| eig.vectors.column(k))
        .collect();
    let certificate_min_eig = eig.min();
    let valid = row_space_residual <= 1e-9 * scale
        && certificate_value.abs() <= 1e-9 * scale
        && certificate_min_eig >= -1e-9 * scale
        && !kernel.is_empty();
    if !valid {
        return Err(Error::ConstraintDegeneracy(format!(
            "matrix does not expose a face (row-space residual {row_space_residual:.2e}, value {certificate_value:.2e}, min eigenvalue {certificate_min_eig:.2e})"
        )));
    }
    Ok(Face {
        basis: CMatrix::from_columns(big, &kernel),
        certificate_min_eig,
        row_space_residual,
        certificate_value,
    })
}

/// Runs Dykstra's method from a perturbed depolarizing Choi matrix.
pub fn solve(problem: &InterpolationProblem, options: &InterpolationOptions) -> Result<FeasibilityReport> {
    solve_in(problem, None, options)
}

/// Runs Dykstra's method on the face `{V W V*}`, in the coordinates of `W`.
/// The reported gap and witness refer to the full Choi matrix.
pub fn solve_on_face(
    problem: &InterpolationProblem,
    face: &Face,
    options: &InterpolationOptions,
) -> Result<FeasibilityReport> {
    solve_in(problem, Some(&face.basis), options)
}

fn solve_in(
    problem: &InterpolationProblem,
    face: Option<&CMatrix>,
    options: &InterpolationOptions,
) -> Result<FeasibilityReport> {
    let (p, n) = (problem.in_dim, problem.out_dim);
    let full = HermitianCoords { n: p * n };
    let (a_full, b) = constraint_system(problem, &full);
    let k = face.map_or(p * n, CMatrix::cols);
    let coords = HermitianCoords { n: k };
    // W ↦ V W V* is an isometry, so the face problem is a PSD problem in W.
    let embed = |w: &CMatrix| -> CMatrix {
        match face {
            Some(v) => v.matmul(w).matmul(&v.adjoint()),
            None => w.clone(),
        }
    };
    let a = match face {
        None => a_full,
        Some(_) => {
            let cols_full = full.len();
            let images: Vec<Vec<f64>> = (0..coords.len())
                .map(|t| {
                    let mut e = vec![0.0; coords.len()];
                    e[t] = 1.0;
                    full.to_coords(&embed(&coords.to_matrix(&e)))
                })
                .collect();
            a_full
                .chunks_exact(cols_full)
                .flat_map(|row| {
                    images
                        .iter()
                        .map(move |img| row.iter().zip(img).map(|(r, v)| r * v).sum::<f64>())
                })
                .collect()
        }
    };
    let affine = AffineProjector::build(coords.len(), a, b)?;

    let mut rng = rng_from_seed(options.seed);
    let base = 1.0 / p as f64;
    let start = CMatrix::identity(p * n).scale_real(base);
    let start = &start + &random_hermitian_unit(p * n, &mut rng).scale_real(options.perturbation * base);
    let start = match face {
        Some(v) => v.adjoint().matmul(&start).matmul(v),
        None => start,
    };

    let report = |status, gap, iterations, witness: CMatrix, history: Vec<f64>| FeasibilityReport {
        status,
        gap,
        iterations,
        witness: embed(&witness),
        in_dim: p,
        out_dim: n,
        gap_history: history,
    };

    let mut x = coords.to_coords(&start);
    if affine.inconsistency > 10.0 * options.tol {
        let witness = coords.to_matrix(&affine.project(&x));
        return Ok(report(
            FeasibilityStatus::InfeasibleEvidence,
            affine.inconsistency,
            0,
            witness,
            Vec::new(),
        ));
    }

    let mut correction = vec![0.0; x.len()];
    let mut history = Vec::new();
    let mut window_start_gap = f64::INFINITY;
    let mut y_mat = start;
    let mut gap = f64::INFINITY;
    for it in 1..=options.max_iters {
        let shifted: Vec<f64> = x.iter().zip(&correction).map(|(a, c)| a + c).collect();
        y_mat = psd_project(&coords.to_matrix(&shifted))?;
        let y = coords.to_coords(&y_mat);
        correction = shifted.iter().zip(&y).map(|(s, v)| s - v).collect();
        x = affine.project(&y);
        gap = distance(&x, &y);
        if options.record_gaps {
            history.push(gap);
        }
        if gap <= options.tol {
            return Ok(report(
                FeasibilityStatus::Feasible,
                gap,
                it,
                coords.to_matrix(&x),
                history,
            ));
        }
        if options.stall_window > 0 && it % options.stall_window == 0 {
            let change = (window_start_gap - gap).abs();
            if gap > 10.0 * options.tol && change < options.stall_rel_change * window_start_gap {
                return Ok(report(FeasibilityStatus::InfeasibleEvidence, gap, it, y_mat, history));
            }
            window_start_gap = gap;
        }
        if !gap.is_finite() || norm(&x) > 1e12 {
            break;
        }
    }
    Ok(report(
        FeasibilityStatus::Undetermined,
        gap,
        options.max_iters,
        y_mat,
        history,
    ))
}

/// Is there a ucp map `Φ: M_p → M_n` with `Φ(z_k) = A_k` for every `k`?
pub fn ucp_interpolation(
    generators: &[CMatrix],
    targets: &[CMatrix],
    max_iters: usize,
    tol: f64,
) -> Result<FeasibilityReport> {
    let problem = InterpolationProblem::from_pairs(generators, targets)?;
    let options = InterpolationOptions {
        max_iters,
        tol,
        ..Default::default()
    };
    solve(&problem, &options)
}

/// Membership of `candidate` in the level-`n` matrix range of `generators`.
pub fn matrix_range_member(generators: &[CMatrix], candidate: &[CMatrix], n: usize) -> Result<FeasibilityReport> {
    if candidate.iter().any(|c| c.shape() != (n, n)) {
        return Err(Error::DimensionMismatch(format!(
            "candidate tuple must consist of {n}x{n} matrices"
        )));
    }
    ucp_interpolation(generators, candidate, DEFAULT_MAX_ITERS, DEFAULT_TOL)
}

/// One seeded run of [`dilation_rigidity`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DilationRun {
    pub seed: u64,
    pub status: FeasibilityStatus,
    pub gap: f64,
    pub iterations: usize,
    /// Off-diagonal block norms of `Φ(u)` then `Φ(v)`: upper-right, lower-left.
    pub offdiag_norms: Vec<f64>,
    /// Distance of the trace-normalized witness from the normalized identity
    /// Choi matrix; only for `ℓ = 0`.
    pub identity_distance: Option<f64>,
    /// Largest violation of unitality and of the compression constraints by
    /// the witness, and its smallest Choi eigenvalue.
    pub constraint_residual: Option<f64>,
    pub min_eig: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DilationReport {
    pub p: usize,
    pub ell: usize,
    pub runs: Vec<DilationRun>,
    /// All off-diagonal norms over every feasible witness.
    pub offdiag_norms: Vec<f64>,
    pub witness_found: bool,
    /// Dimension of the face searched (`p·(p+ℓ)` when no reduction is used).
    pub face_dim: usize,
}

impl DilationReport {
    pub fn max_offdiag(&self) -> f64 {
        self.offdiag_norms.iter().copied().fold(0.0, f64::max)
    }
}

/// Frobenius distance between trace-normalized Choi matrices.
pub fn normalized_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let ta = a.trace().re;
    let tb = b.trace().re;
    a.scale_real(1.0 / ta).distance(&b.scale_real(1.0 / tb))
}

/// `Σ_z (1 ⊗ P − z^T ⊗ P z* P)` over `z ∈ {u, u*, v, v*}`, with `P` the
/// projection onto the first `p` of `m` coordinates.
///
/// It pairs with a Choi matrix to `Σ_z (tr PΦ(1) − tr z* PΦ(z)P)`, which is
/// zero whenever the compressions are fixed, and it is PSD because each
/// `z^T ⊗ z*` is unitary.
pub fn compression_certificate(u: &CMatrix, v: &CMatrix, m: usize) -> CMatrix {
    let p = u.rows();
    let pad = |z: &CMatrix| {
        let mut out = CMatrix::zeros(m, m);
        out.set_block(0, 0, z);
        out
    };
    let proj = pad(&CMatrix::identity(p));
    let mut s = CMatrix::zeros(p * m, p * m);
    for z in [u.clone(), u.adjoint(), v.clone(), v.adjoint()] {
        s = &s + &CMatrix::identity(p).kron(&proj);
        s = &s - &z.transpose().kron(&pad(&z.adjoint()));
    }
    s
}

/// Searches for ucp maps `M_p → M_{p+ℓ}` whose leading `p x p` compressions
/// of `Φ(u)` and `Φ(v)` are the clock and shift matrices, and measures the
/// off-diagonal blocks of every witness found.
///
/// For `ℓ ≥ 1` the search runs on the face exposed by
/// [`compression_certificate`]; the problem has no strictly feasible point,
/// and plain alternating projections only creep towards it.
pub fn dilation_rigidity(p: usize, ell: usize, seeds: &[u64]) -> Result<DilationReport> {
    dilation_rigidity_with(p, ell, seeds, DILATION_TOL, DEFAULT_MAX_ITERS)
}

pub fn dilation_rigidity_with(
    p: usize,
    ell: usize,
    seeds: &[u64],
    tol: f64,
    max_iters: usize,
) -> Result<DilationReport> {
    if p < 2 {
        return Err(Error::UnsupportedOrder(p, "dilation needs p >= 2"));
    }
    let zeta = primitive_root(p);
    let u = clock_matrix(p, zeta)?;
    let v = shift_matrix(p);
    let m = p + ell;
    let mut problem = InterpolationProblem::new(p, m);
    problem.add_compressed(&u, &u)?;
    problem.add_compressed(&v, &v)?;
    let face = if ell == 0 {
        None
    } else {
        Some(expose_face(&problem, &compression_certificate(&u, &v, m))?)
    };
    let identity = ChoiMatrix::identity_map(p).mat;

    let mut runs = Vec::with_capacity(seeds.len());
    let mut offdiag_norms = Vec::new();
    for &seed in seeds {
        let options = InterpolationOptions {
            max_iters,
            tol,
            seed,
            ..Default::default()
        };
        let report = match &face {
            Some(f) => solve_on_face(&problem, f, &options)?,
            None => solve(&problem, &options)?,
        };
        let mut run = DilationRun {
            seed,
            status: report.status,
            gap: report.gap,
            iterations: report.iterations,
            offdiag_norms: Vec::new(),
            identity_distance: None,
            constraint_residual: None,
            min_eig: None,
        };
        if report.is_feasible() {
            let choi = report.witness_choi();
            let mut residual = choi.unitality_residual();
            for z in [&u, &v] {
                let image = choi.apply(z)?;
                residual = residual.max(image.block(0, 0, p, p).distance(z));
                if ell > 0 {
                    run.offdiag_norms.push(image.block(0, p, p, ell).frobenius_norm());
                    run.offdiag_norms.push(image.block(p, 0, ell, p).frobenius_norm());
                }
            }
            if ell == 0 {
                run.identity_distance = Some(normalized_distance(&report.witness, &identity));
            }
            run.constraint_residual = Some(residual);
            run.min_eig = Some(choi.min_eigenvalue()?);
            offdiag_norms.extend(run.offdiag_norms.iter().copied());
        }
        runs.push(run);
    }
    let witness_found = runs.iter().any(|r| r.status == FeasibilityStatus::Feasible);
    Ok(DilationReport {
        p,
        ell,
        runs,
        offdiag_norms,
        witness_found,
        face_dim: face.map_or(p * m, |f| f.basis.cols()),
    })
}
