use serde::Serialize;
use weylkit::algebra::commutant;
use weylkit::canonical::{canonicalize_system, random_pair};
use weylkit::feasibility::{solve, InterpolationOptions, InterpolationProblem};
use weylkit::weyl::{check_relations, counterexample_triple, primitive_root, simple_triple_matrices, weyl_pair};
use weylkit::CMatrix;

pub const MAX_P: usize = 11;
pub const MAX_DIM: usize = 24;
pub const MAX_ITERS: usize = 5000;

/// Entries as `[modulus, argument]`, row-major.
#[derive(Debug, Serialize)]
pub struct Grid {
    pub size: usize,
    pub cells: Vec<[f64; 2]>,
}

impl From<&CMatrix> for Grid {
    fn from(m: &CMatrix) -> Self {
        let cells = m
            .data()
            .iter()
            .map(|z| {
                let r = z.norm();
                [r, if r < 1e-12 { 0.0 } else { z.arg() }]
            })
            .collect();
        Grid { size: m.rows(), cells }
    }
}

#[derive(Debug, Serialize)]
pub struct PairView {
    pub p: usize,
    pub u: Grid,
    pub v: Grid,
    pub uv: Grid,
    pub max_residual: f64,
}

#[derive(Debug, Serialize)]
pub struct CanonicalView {
    pub p: usize,
    pub n: usize,
    pub scrambled_u: Grid,
    pub scrambled_v: Grid,
    pub canonical_u: Grid,
    pub canonical_v: Grid,
    pub reconstruction_residual: f64,
    pub commutant_dim: usize,
}

#[derive(Debug, Serialize)]
pub struct CurveView {
    pub target: String,
    pub status: String,
    pub iterations: usize,
    pub gap: f64,
    pub gaps: Vec<f64>,
}

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

pub fn pair_view(p: usize) -> Result<String, String> {
    if !(2..=MAX_P).contains(&p) {
        return Err(format!("p must be between 2 and {MAX_P}"));
    }
    let ws = weyl_pair(p, primitive_root(p)).map_err(|e| e.to_string())?;
    let (u, v) = ws.as_pair().map_err(|e| e.to_string())?;
    to_json(&PairView {
        p,
        u: u.into(),
        v: v.into(),
        uv: (&u.matmul(v)).into(),
        max_residual: check_relations(&ws).max_residual(),
    })
}

pub fn canonical_view(p: usize, n: usize, seed: u64) -> Result<String, String> {
    if p < 2 || n < 1 || p * n > MAX_DIM {
        return Err(format!("need p >= 2, n >= 1 and p·n <= {MAX_DIM}"));
    }
    let ws = random_pair(p, n, seed, true).map_err(|e| e.to_string())?;
    let cf = canonicalize_system(&ws).map_err(|e| e.to_string())?;
    let (u, v) = ws.as_pair().map_err(|e| e.to_string())?;
    let (ut, vt) = (cf.u_tilde(), cf.v_tilde());
    let commutant_dim = commutant(&[ut.clone(), vt.clone()]).map_err(|e| e.to_string())?.dim;
    to_json(&CanonicalView {
        p,
        n,
        scrambled_u: u.into(),
        scrambled_v: v.into(),
        canonical_u: (&ut).into(),
        canonical_v: (&vt).into(),
        reconstruction_residual: cf.reconstruction_residual(u, v),
        commutant_dim,
    })
}

pub fn interpolation_curve(target: &str, max_iters: usize) -> Result<String, String> {
    let zeta = primitive_root(3);
    let gens = simple_triple_matrices(3, zeta).map_err(|e| e.to_string())?.to_vec();
    let targets = match target {
        "control" => gens.clone(),
        "counterexample" => counterexample_triple(3, zeta)
            .map_err(|e| e.to_string())?
            .into_unitaries(),
        other => return Err(format!("unknown target {other:?}")),
    };
    let problem = InterpolationProblem::from_pairs(&gens, &targets).map_err(|e| e.to_string())?;
    let options = InterpolationOptions {
        max_iters: max_iters.clamp(1, MAX_ITERS),
        record_gaps: true,
        ..Default::default()
    };
    let report = solve(&problem, &options).map_err(|e| e.to_string())?;
    to_json(&CurveView {
        target: target.into(),
        status: report.status.as_str().into(),
        iterations: report.iterations,
        gap: report.gap,
        gaps: report.gap_history,
    })
}
