use std::io::Write;

use weylkit::canonical::random_pair;
use weylkit::weyl::{
    counterexample_triple, ew_triple, primitive_root, simple_weyl_triple, weyl_brauer, weyl_pair, WeylSystem,
};

use crate::output::{emit, matrix_lines};
use crate::{resolve_tol, CliError, GenerateArgs, Kind, EXIT_OK};

pub(crate) fn build(kind: Kind, p: usize, n: usize, k: usize, seed: u64) -> weylkit::Result<WeylSystem> {
    let zeta = primitive_root(p);
    match kind {
        Kind::Pair => weyl_pair(p, zeta),
        Kind::Triple => simple_weyl_triple(p, zeta),
        Kind::Brauer => weyl_brauer(p, k, zeta),
        Kind::Random => random_pair(p, n, seed, true),
        Kind::Counterexample => counterexample_triple(p, zeta),
        Kind::Ew => ew_triple(p, zeta),
    }
}

fn summary(ws: &WeylSystem) -> String {
    let mut s = format!("p = {}, d = {}, g = {}\n", ws.p(), ws.d(), ws.g());
    if ws.d() <= 9 {
        for (i, u) in ws.unitaries().iter().enumerate() {
            s.push_str(&format!("  u{}:\n{}", i + 1, matrix_lines(u)));
        }
    }
    s
}

pub(crate) fn run(args: &GenerateArgs, env_tol: Option<String>, stdout: &mut dyn Write) -> Result<i32, CliError> {
    // Generation has no tolerance, but a malformed override is still a usage error.
    resolve_tol(args.output.tol, env_tol)?;
    let ws = build(args.kind, args.p as usize, args.n as usize, args.k as usize, args.seed)?;
    emit(&args.output, &ws, || summary(&ws), stdout)?;
    Ok(EXIT_OK)
}
