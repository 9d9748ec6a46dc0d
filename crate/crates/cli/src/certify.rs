use std::io::Write;

use serde::{Deserialize, Serialize};
use weylkit::algebra::{algebra_span, commutant};
use weylkit::canonical::{canonicalize_system, equivalence_residuals, unitary_equivalence};
use weylkit::choi::order_equivalence_certificate;
use weylkit::tolerance::ToleranceConfig;
use weylkit::weyl::{
    brauer_pairing, check_relations_with, spectral_audit, weyl_pair, BrauerPairing, RelationReport, SpectralAudit,
    WeylSystem,
};

use crate::output::{emit, read_json};
use crate::{resolve_tol, CertifyArgs, CliError, EXIT_FAILED, EXIT_OK};

/// Largest dimension for which commutants and generated algebras are computed.
/// The commutant solve is an eigenproblem of size `d²`.
pub const STRUCTURE_CAP: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub outcome: Outcome,
    /// Informational checks are reported but never change the exit code.
    pub required: bool,
    pub value: Option<f64>,
    pub threshold: Option<f64>,
    pub note: Option<String>,
}

impl Check {
    fn measured(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            outcome: if value <= threshold {
                Outcome::Pass
            } else {
                Outcome::Fail
            },
            required: true,
            value: Some(value),
            threshold: Some(threshold),
            note: None,
        }
    }

    fn verdict(name: &str, ok: bool, note: String) -> Self {
        Self {
            name: name.into(),
            outcome: if ok { Outcome::Pass } else { Outcome::Fail },
            required: true,
            value: None,
            threshold: None,
            note: Some(note),
        }
    }

    fn skipped(name: &str, why: &str) -> Self {
        Self {
            name: name.into(),
            outcome: Outcome::Skipped,
            required: false,
            value: None,
            threshold: None,
            note: Some(why.into()),
        }
    }

    fn informational(mut self) -> Self {
        self.required = false;
        self
    }

    fn failed_with(name: &str, err: &weylkit::Error) -> Self {
        Self::verdict(name, false, err.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifyReport {
    pub p: usize,
    pub d: usize,
    pub g: usize,
    pub is_simple: bool,
    pub relations: RelationReport,
    pub spectral: Option<SpectralAudit>,
    pub commutant_dim: Option<usize>,
    pub algebra_dim: Option<usize>,
    pub irreducible: Option<bool>,
    pub pairing: Option<BrauerPairing>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl CertifyReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "Weyl system: p = {}, d = {}, g = {}, simple = {}\n",
            self.p, self.d, self.g, self.is_simple
        );
        for c in &self.checks {
            let tag = match c.outcome {
                Outcome::Pass => "PASS",
                Outcome::Fail => "FAIL",
                Outcome::Skipped => "SKIP",
            };
            s.push_str(&format!("{tag}  {}", c.name));
            if !c.required && c.outcome != Outcome::Skipped {
                s.push_str(" (informational)");
            }
            if let (Some(v), Some(t)) = (c.value, c.threshold) {
                s.push_str(&format!(": {v:.3e} (threshold {t:.1e})"));
            }
            if let Some(note) = &c.note {
                s.push_str(&format!(": {note}"));
            }
            s.push('\n');
        }
        s.push_str(if self.pass { "result: pass\n" } else { "result: fail\n" });
        s
    }
}

fn structure_checks(ws: &WeylSystem, report: &mut CertifyReport, required: bool) {
    let names = ["commutant dimension", "generated algebra dimension"];
    if ws.d() > STRUCTURE_CAP {
        let why = format!("d = {} exceeds {STRUCTURE_CAP}", ws.d());
        report.checks.extend(names.iter().map(|n| Check::skipped(n, &why)));
        return;
    }
    let (p, d) = (ws.p(), ws.d());
    // A pair in M_{pn} has commutant M_n and generates M_p ⊗ 1; for other
    // systems the full matrix algebra is only the typical outcome.
    let (want_comm, want_alg) = if ws.g() == 2 {
        ((d / p).pow(2), p * p)
    } else {
        (1, d * d)
    };
    let mut push = |check: Check| report.checks.push(if required { check } else { check.informational() });
    match commutant(ws.unitaries()) {
        Ok(c) => {
            report.commutant_dim = Some(c.dim);
            report.irreducible = Some(c.dim == 1);
            push(Check::verdict(
                names[0],
                c.dim == want_comm,
                format!("{} (expected {want_comm})", c.dim),
            ));
        }
        Err(e) => push(Check::failed_with(names[0], &e)),
    }
    match algebra_span(ws.unitaries()) {
        Ok(a) => {
            report.algebra_dim = Some(a.dim);
            push(Check::verdict(
                names[1],
                a.dim == want_alg,
                format!("{} (expected {want_alg})", a.dim),
            ));
        }
        Err(e) => push(Check::failed_with(names[1], &e)),
    }
}

fn pair_checks(ws: &WeylSystem, cfg: &ToleranceConfig, report: &mut CertifyReport) {
    let (p, d) = (ws.p(), ws.d());
    let (u, v) = ws.as_pair().expect("g = 2");
    match spectral_audit(u, p, ws.zeta()) {
        Ok(audit) => {
            let equal = audit.spectrum_multiplicities.iter().all(|&m| m == d / p);
            report.checks.push(Check::verdict(
                "equal eigenvalue multiplicities",
                audit.divides && equal,
                format!("{:?}", audit.spectrum_multiplicities),
            ));
            report.spectral = Some(audit);
        }
        Err(e) => report
            .checks
            .push(Check::failed_with("equal eigenvalue multiplicities", &e)),
    }
    match canonicalize_system(ws) {
        Ok(cf) => {
            report.checks.push(Check::measured(
                "canonical form reconstruction",
                cf.reconstruction_residual(u, v),
                10.0 * cfg.relation(d),
            ));
            report.checks.push(Check::measured(
                "canonical block closure",
                cf.closure_residual(),
                cfg.relation(d),
            ));
        }
        Err(e) => report
            .checks
            .push(Check::failed_with("canonical form reconstruction", &e)),
    }
    structure_checks(ws, report, true);

    let name = "order equivalence with clock and shift";
    let standard = weyl_pair(p, ws.zeta());
    match standard.and_then(|s| order_equivalence_certificate(&s, ws)) {
        Ok(cert) => {
            let worst = cert
                .mapping_residuals
                .iter()
                .chain(&cert.unitality_residuals)
                .copied()
                .chain(cert.psd_margins.iter().map(|m| -m))
                .fold(0.0, f64::max);
            report.checks.push(Check::measured(name, worst, cfg.certificate));
        }
        Err(e) => report.checks.push(Check::failed_with(name, &e)),
    }

    if d == p {
        let name = "unitary equivalence with clock and shift";
        match unitary_equivalence(u, v, p, ws.zeta()).and_then(|w| equivalence_residuals(&w, u, v, p, ws.zeta())) {
            Ok((ru, rv)) => report.checks.push(Check::measured(name, ru.max(rv), cfg.relation(d))),
            Err(e) => report.checks.push(Check::failed_with(name, &e)),
        }
    }
}

fn odd_system_checks(ws: &WeylSystem, cfg: &ToleranceConfig, report: &mut CertifyReport) {
    structure_checks(ws, report, false);
    if !report.is_simple {
        return;
    }
    // Only meaningful for the iterated tensor family, so purely informational.
    if let Ok(pairing) = brauer_pairing(ws) {
        let tol = 10.0 * cfg.relation(ws.d());
        let worst = pairing
            .pair_residuals
            .iter()
            .copied()
            .fold(pairing.recovery_residual, f64::max);
        report
            .checks
            .push(Check::measured("paired products give the last tensor factor", worst, tol).informational());
        report.checks.push(
            Check::measured("last element is the tensor power", pairing.last_element_residual, tol).informational(),
        );
        report.pairing = Some(pairing);
    }
}

pub fn certify(ws: &WeylSystem, cfg: &ToleranceConfig) -> CertifyReport {
    let d = ws.d();
    let relations = check_relations_with(ws, cfg.relation(d));
    let mut report = CertifyReport {
        p: ws.p(),
        d,
        g: ws.g(),
        is_simple: relations.is_simple,
        spectral: None,
        commutant_dim: None,
        algebra_dim: None,
        irreducible: None,
        pairing: None,
        checks: Vec::new(),
        pass: false,
        relations: relations.clone(),
    };
    let tol = relations.tolerance;
    let unitarity = relations.unitarity_residuals.iter().copied().fold(0.0, f64::max);
    report.checks.push(Check::measured("unitarity", unitarity, tol));
    report
        .checks
        .push(Check::measured("order p", relations.max_order_residual, tol));
    report.checks.push(Check::measured(
        "commutation relations",
        relations.max_commutation_residual(),
        tol,
    ));

    if !relations.pass {
        report.checks.push(Check::skipped("structure", "relations do not hold"));
    } else if ws.g() == 2 {
        pair_checks(ws, cfg, &mut report);
    } else if ws.g() % 2 == 1 {
        odd_system_checks(ws, cfg, &mut report);
    }
    report.pass = report.checks.iter().all(|c| !c.required || c.outcome != Outcome::Fail);
    report
}

pub(crate) fn run(args: &CertifyArgs, env_tol: Option<String>, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = match resolve_tol(args.output.tol, env_tol)? {
        Some(t) => ToleranceConfig::with_base(t),
        None => ToleranceConfig::default(),
    };
    let ws: WeylSystem = read_json(&args.input)?;
    let report = certify(&ws, &cfg);
    emit(&args.output, &report, || report.to_text(), stdout)?;
    Ok(if report.pass { EXIT_OK } else { EXIT_FAILED })
}
