use std::io::Write;
use std::path::Path;

use serde::Deserialize;
use weylkit::choi::ChoiMatrix;
use weylkit::feasibility::{
    dilation_rigidity_with, normalized_distance, solve, DilationReport, FeasibilityReport, FeasibilityStatus,
    InterpolationOptions, InterpolationProblem, DEFAULT_TOL, DILATION_TOL,
};
use weylkit::weyl::WeylSystem;
use weylkit::CMatrix;

use crate::output::{emit, read_json};
use crate::{resolve_tol, CliError, InterpolateArgs, EXIT_FAILED, EXIT_OK, EXIT_UNDETERMINED};

/// Largest off-diagonal block norm accepted from a dilation witness.
pub const OFFDIAG_LIMIT: f64 = 1e-6;

/// Either a serialized Weyl system or a bare list of matrices.
#[derive(Deserialize)]
#[serde(untagged)]
enum Tuple {
    System(WeylSystem),
    Matrices(Vec<CMatrix>),
}

fn read_tuple(path: &Path) -> Result<Vec<CMatrix>, CliError> {
    Ok(match read_json::<Tuple>(path)? {
        Tuple::System(ws) => ws.into_unitaries(),
        Tuple::Matrices(m) => m,
    })
}

fn status_code(status: FeasibilityStatus) -> i32 {
    match status {
        FeasibilityStatus::Feasible => EXIT_OK,
        FeasibilityStatus::InfeasibleEvidence => EXIT_FAILED,
        FeasibilityStatus::Undetermined => EXIT_UNDETERMINED,
    }
}

fn report_text(report: &FeasibilityReport) -> String {
    let mut s = format!(
        "status: {}\ngap: {:.6e}\niterations: {}\nmap: M_{} -> M_{}\n",
        report.status.as_str(),
        report.gap,
        report.iterations,
        report.in_dim,
        report.out_dim
    );
    if report.is_feasible() && report.in_dim == report.out_dim {
        let identity = ChoiMatrix::identity_map(report.in_dim).mat;
        s.push_str(&format!(
            "distance to identity map: {:.3e}\n",
            normalized_distance(&report.witness, &identity)
        ));
    }
    s
}

fn rigidity_text(report: &DilationReport) -> String {
    let mut s = format!(
        "dilation of clock and shift: p = {}, extra dimensions = {}\n",
        report.p, report.ell
    );
    for run in &report.runs {
        s.push_str(&format!(
            "  seed {}: {} after {} iterations",
            run.seed,
            run.status.as_str(),
            run.iterations
        ));
        if !run.offdiag_norms.is_empty() {
            let worst = run.offdiag_norms.iter().copied().fold(0.0, f64::max);
            s.push_str(&format!(", largest off-diagonal block {worst:.3e}"));
        }
        s.push('\n');
    }
    s.push_str(&format!(
        "witness found: {}\nlargest off-diagonal block: {:.3e}\n",
        report.witness_found,
        report.max_offdiag()
    ));
    s
}

pub(crate) fn rigidity_code(report: &DilationReport) -> i32 {
    if report.witness_found {
        return if report.max_offdiag() <= OFFDIAG_LIMIT {
            EXIT_OK
        } else {
            EXIT_FAILED
        };
    }
    if report
        .runs
        .iter()
        .all(|r| r.status == FeasibilityStatus::InfeasibleEvidence)
    {
        EXIT_FAILED
    } else {
        EXIT_UNDETERMINED
    }
}

pub(crate) fn run(args: &InterpolateArgs, env_tol: Option<String>, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let tol = resolve_tol(args.output.tol, env_tol)?;
    if args.rigidity {
        if !args.inputs.is_empty() {
            return Err(CliError::Usage(
                "--rigidity builds its own problem and takes no --in".into(),
            ));
        }
        let seeds: Vec<u64> = (0..args.seeds).map(|i| args.seed.wrapping_add(i)).collect();
        let report = dilation_rigidity_with(
            args.p as usize,
            args.ell as usize,
            &seeds,
            tol.unwrap_or(DILATION_TOL),
            args.max_iters,
        )?;
        emit(&args.output, &report, || rigidity_text(&report), stdout)?;
        return Ok(rigidity_code(&report));
    }

    let (generators, targets) = match args.inputs.as_slice() {
        [one] => {
            let g = read_tuple(one)?;
            (g.clone(), g)
        }
        [g, t] => (read_tuple(g)?, read_tuple(t)?),
        _ => {
            return Err(CliError::Usage(
                "give one --in (self-map) or two (generators, targets)".into(),
            ))
        }
    };
    let problem = InterpolationProblem::from_pairs(&generators, &targets)?;
    let options = InterpolationOptions {
        max_iters: args.max_iters,
        tol: tol.unwrap_or(DEFAULT_TOL),
        seed: args.seed,
        ..Default::default()
    };
    let report = solve(&problem, &options)?;
    emit(&args.output, &report, || report_text(&report), stdout)?;
    Ok(status_code(report.status))
}
