//! One line per acceptance criterion; exits non-zero if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use weylkit::algebra::{algebra_span, commutant, rho_apply, word_table};
use weylkit::canonical::{canonicalize_system, equivalence_residuals, random_pair, unitary_equivalence};
use weylkit::choi::{choi_of_map, is_ucp, order_equivalence_certificate, ChoiMatrix};
use weylkit::feasibility::{dilation_rigidity, normalized_distance, ucp_interpolation, FeasibilityStatus};
use weylkit::linalg::random::{gaussian_matrix, rng_from_seed};
use weylkit::weyl::{
    brauer_pairing, check_relations, counterexample_triple, ew_matrix, primitive_root, simple_triple_matrices,
    weyl_brauer, weyl_pair,
};
use weylkit::CMatrix;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let spent = start.elapsed();
    ensure(spent < limit, format!("took {spent:.2?}, limit {limit:?}"))
}

fn relations() -> Outcome {
    let start = Instant::now();
    for p in [2, 3, 5, 7] {
        let ws = weyl_pair(p, primitive_root(p)).map_err(|e| e.to_string())?;
        let report = check_relations(&ws);
        ensure(
            report.pass && report.max_residual() <= 1e-11 * p as f64,
            format!("p={p} residual {:.2e}", report.max_residual()),
        )?;
        let (u, v) = ws.as_pair().unwrap();
        for m in [u.clone(), v.clone(), u.matmul(v)] {
            ensure(
                m.trace().norm() <= 1e-10,
                format!("p={p} trace {:.2e}", m.trace().norm()),
            )?;
        }
    }
    within(start, Duration::from_secs(1))?;
    Ok("p in {2,3,5,7}: relations and vanishing traces".into())
}

fn canonical_form() -> Outcome {
    let start = Instant::now();
    let (mut worst_rec, mut worst_closure) = (0.0f64, 0.0f64);
    for p in [3, 5] {
        for n in 1..=3 {
            for seed in 0..20 {
                let ws = random_pair(p, n, seed, true).map_err(|e| e.to_string())?;
                let (u, v) = ws.as_pair().unwrap();
                let cf = canonicalize_system(&ws).map_err(|e| e.to_string())?;
                let rec = cf.reconstruction_residual(u, v);
                ensure(
                    rec <= 1e-8 * (p * n) as f64,
                    format!("p={p} n={n} seed={seed} reconstruction {rec:.2e}"),
                )?;
                ensure(
                    cf.closure_residual() <= 1e-9,
                    format!("p={p} n={n} seed={seed} closure {:.2e}", cf.closure_residual()),
                )?;
                worst_rec = worst_rec.max(rec);
                worst_closure = worst_closure.max(cf.closure_residual());
            }
        }
    }
    within(start, Duration::from_secs(30))?;
    Ok(format!(
        "120 scrambled pairs, worst reconstruction {worst_rec:.1e}, worst closure {worst_closure:.1e}"
    ))
}

fn star_isomorphism() -> Outcome {
    let mut worst = 0.0f64;
    for (p, n, seed) in [(3, 2, 1), (5, 3, 2)] {
        let cf = canonicalize_system(&random_pair(p, n, seed, true).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let table = word_table(&cf);
        let mut rng = rng_from_seed(seed);
        for _ in 0..100 {
            let unit = |g: CMatrix| g.scale_real(1.0 / g.frobenius_norm());
            let a = unit(gaussian_matrix(p, p, &mut rng));
            let b = unit(gaussian_matrix(p, p, &mut rng));
            let lhs = rho_apply(&table, &a.matmul(&b)).unwrap();
            let rhs = rho_apply(&table, &a).unwrap().matmul(&rho_apply(&table, &b).unwrap());
            worst = worst.max(lhs.distance(&rhs));
        }
        let check = is_ucp(&choi_of_map(p, p * n, |x| rho_apply(&table, x)).map_err(|e| e.to_string())?);
        ensure(
            check.min_eig >= -1e-9 && check.unitality_residual <= 1e-9,
            format!("p={p} n={n}: {check:?}"),
        )?;
    }
    ensure(worst <= 1e-9, format!("multiplicativity defect {worst:.2e}"))?;
    Ok(format!("worst multiplicativity defect {worst:.1e}, Choi of rho is ucp"))
}

fn dimensions() -> Outcome {
    let dim_err = |what: &str, got: usize, want: usize| ensure(got == want, format!("{what}: {got} != {want}"));
    for p in [3, 5] {
        let ws = weyl_pair(p, primitive_root(p)).unwrap();
        dim_err(
            "commutant of clock and shift",
            commutant(ws.unitaries()).unwrap().dim,
            1,
        )?;
        dim_err(
            "algebra of clock and shift",
            algebra_span(ws.unitaries()).unwrap().dim,
            p * p,
        )?;
    }
    for n in 1..=3 {
        let cf = canonicalize_system(&random_pair(3, n, 7, true).unwrap()).unwrap();
        dim_err(
            "commutant of canonical pair",
            commutant(&[cf.u_tilde(), cf.v_tilde()]).unwrap().dim,
            n * n,
        )?;
    }
    let q2 = weyl_brauer(3, 2, primitive_root(3)).unwrap();
    dim_err(
        "algebra of the first four Brauer generators",
        algebra_span(&q2.unitaries()[..4]).unwrap().dim,
        81,
    )?;
    Ok("commutant 1 and algebra p^2 for p in {3,5}; canonical commutants n^2; Brauer algebra 81".into())
}

fn order_equivalence() -> Outcome {
    let standard = weyl_pair(3, primitive_root(3)).unwrap();
    for seed in 0..10u64 {
        let n = 1 + seed as usize % 3;
        let other = random_pair(3, n, seed, true).unwrap();
        let cert = order_equivalence_certificate(&standard, &other).map_err(|e| e.to_string())?;
        ensure(
            cert.is_valid(),
            format!("seed {seed}: {:?} {:?}", cert.mapping_residuals, cert.psd_margins),
        )?;
    }
    Ok("10 certificates valid in both directions".into())
}

fn unitary_equivalence_at_d_equals_p() -> Outcome {
    let mut worst = 0.0f64;
    for (i, seed) in (0..20u64).enumerate() {
        let p = [3, 5, 7][i % 3];
        let ws = random_pair(p, 1, seed, true).unwrap();
        let (u, v) = ws.as_pair().unwrap();
        let w = unitary_equivalence(u, v, p, ws.zeta()).map_err(|e| e.to_string())?;
        let (ru, rv) = equivalence_residuals(&w, u, v, p, ws.zeta()).unwrap();
        worst = worst.max(ru).max(rv);
    }
    ensure(worst <= 1e-9, format!("residual {worst:.2e}"))?;
    Ok(format!("20 instances, worst residual {worst:.1e}"))
}

fn weyl_brauer_family() -> Outcome {
    let ws = weyl_brauer(3, 2, primitive_root(3)).unwrap();
    let report = check_relations(&ws);
    ensure(report.pass && report.is_simple, "relations of the 9x9 family")?;
    let pairing = brauer_pairing(&ws).unwrap();
    let worst_pair = pairing.pair_residuals.iter().copied().fold(0.0, f64::max);
    ensure(worst_pair <= 1e-10, format!("pairing residual {worst_pair:.2e}"))?;
    ensure(
        pairing.recovery_residual <= 1e-10,
        format!("recovery residual {:.2e}", pairing.recovery_residual),
    )?;
    Ok(format!(
        "simple relations hold, pairing {worst_pair:.1e}, recovery {:.1e}",
        pairing.recovery_residual
    ))
}

fn non_universality() -> Outcome {
    let start = Instant::now();
    let zeta = primitive_root(3);
    let gens = simple_triple_matrices(3, zeta).unwrap().to_vec();
    let targets = counterexample_triple(3, zeta).unwrap().into_unitaries();
    let bad = ucp_interpolation(&gens, &targets, 20_000, 1e-7).unwrap();
    ensure(
        bad.status == FeasibilityStatus::InfeasibleEvidence && bad.gap > 1e-3,
        format!("counterexample: {} gap {:.2e}", bad.status.as_str(), bad.gap),
    )?;
    let control = ucp_interpolation(&gens, &gens, 20_000, 1e-7).unwrap();
    let dist = normalized_distance(&control.witness, &ChoiMatrix::identity_map(3).mat);
    ensure(
        control.is_feasible() && dist <= 1e-5,
        format!("control: {} distance {dist:.2e}", control.status.as_str()),
    )?;
    within(start, Duration::from_secs(60))?;
    Ok(format!(
        "counterexample gap {:.4} after {} iterations; control distance {dist:.1e}",
        bad.gap, bad.iterations
    ))
}

fn rigidity() -> Outcome {
    let mut worst = 0.0f64;
    for ell in [1, 2] {
        let report = dilation_rigidity(3, ell, &[0, 1, 2, 3, 4]).map_err(|e| e.to_string())?;
        ensure(report.witness_found, format!("no witness for ell={ell}"))?;
        ensure(
            report.max_offdiag() <= 1e-6,
            format!("ell={ell} off-diagonal {:.2e}", report.max_offdiag()),
        )?;
        worst = worst.max(report.max_offdiag());
    }
    let flat = dilation_rigidity(3, 0, &[0]).unwrap();
    let dist = flat.runs[0]
        .identity_distance
        .ok_or("identity rigidity run not feasible")?;
    ensure(dist <= 1e-5, format!("identity rigidity distance {dist:.2e}"))?;
    Ok(format!(
        "off-diagonal blocks at most {worst:.1e}; identity rigidity {dist:.1e}"
    ))
}

fn ew_audit() -> Outcome {
    let zeta = primitive_root(3);
    let y = ew_matrix(3, zeta).unwrap();
    ensure(
        y.pow(3).distance(&CMatrix::scalar(3, zeta)) <= 1e-12,
        "cube of the matrix is not zeta times 1",
    )?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let sys = dir.path().join("ew.json");
    let bin = env!("CARGO_BIN_EXE_weylkit");
    let gen = Command::new(bin)
        .args(["generate", "--kind", "ew", "--p", "3", "--out"])
        .arg(&sys)
        .env_remove("WEYLKIT_TOL")
        .status()
        .map_err(|e| e.to_string())?;
    ensure(gen.code() == Some(0), format!("generate exited with {gen}"))?;
    let out = Command::new(bin)
        .args(["certify", "--in"])
        .arg(&sys)
        .env_remove("WEYLKIT_TOL")
        .output()
        .map_err(|e| e.to_string())?;
    ensure(
        out.status.code() == Some(1),
        format!("certify exited with {}", out.status),
    )?;
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let order = report["checks"]
        .as_array()
        .and_then(|cs| cs.iter().find(|c| c["name"] == "order p"))
        .ok_or("no order check in report")?;
    ensure(order["outcome"] == "fail", "order check did not fail")?;
    Ok(format!("certify exits 1, order residual {}", order["value"]))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("relations of the clock and shift pair", relations),
        ("canonical form of scrambled pairs", canonical_form),
        ("block isomorphism is a ucp homomorphism", star_isomorphism),
        ("commutant and algebra dimensions", dimensions),
        ("order equivalence certificates", order_equivalence),
        ("unitary equivalence at d = p", unitary_equivalence_at_d_equals_p),
        ("Weyl-Brauer family", weyl_brauer_family),
        ("non-universality of the simple triple", non_universality),
        ("extreme point rigidity", rigidity),
        ("weighted cycle matrix audit", ew_audit),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let spent = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({spent:.2?}): {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name} ({spent:.2?}): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
