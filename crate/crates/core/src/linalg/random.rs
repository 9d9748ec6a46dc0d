//! Seeded sampling. Every sampler takes its generator or seed explicitly.

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::matrix::CMatrix;
use super::qr::qr_decompose;

/// The counter-based generator used throughout the crate.
pub type Rng = ChaCha20Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Uniform in the open interval (0, 1), from the top 53 bits of a draw.
fn open_unit(rng: &mut Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Complex standard Gaussian (E|z|² = 1) by Box–Muller.
pub fn complex_gaussian(rng: &mut Rng) -> Complex64 {
    let u1 = open_unit(rng);
    let u2 = open_unit(rng);
    let radius = (-u1.ln()).sqrt();
    let angle = 2.0 * std::f64::consts::PI * u2;
    Complex64::new(radius * angle.cos(), radius * angle.sin())
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-distributed unitary drawn from an existing generator.
pub fn haar_unitary_with(n: usize, rng: &mut Rng) -> CMatrix {
    loop {
        let g = gaussian_matrix(n, n, rng);
        // A singular Gaussian draw has probability zero; resample if it happens.
        let Ok((q, r)) = qr_decompose(&g) else { continue };
        let phases: Vec<Complex64> = (0..n).map(|i| r[(i, i)] / r[(i, i)].norm()).collect();
        return q.matmul(&CMatrix::diag(&phases));
    }
}

/// Haar-distributed `n x n` unitary, reproducible bit-for-bit from `(n, seed)`.
pub fn haar_unitary(n: usize, seed: u64) -> CMatrix {
    assert!(n >= 1, "haar_unitary needs n >= 1");
    haar_unitary_with(n, &mut rng_from_seed(seed))
}

/// Random Hermitian matrix with unit Frobenius norm.
pub fn random_hermitian_unit(n: usize, rng: &mut Rng) -> CMatrix {
    let h = gaussian_matrix(n, n, rng).hermitian_part();
    let norm = h.frobenius_norm();
    h.scale_real(1.0 / norm)
}
