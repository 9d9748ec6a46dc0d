//! Numerical thresholds shared across the crate.

use serde::{Deserialize, Serialize};

/// Default thresholds. Relation checks scale `relation_per_dim` by the matrix
/// dimension to absorb rounding accumulated in tensor products.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub hermitian: f64,
    pub relation_per_dim: f64,
    pub order_precheck_per_dim: f64,
    pub rank_threshold: f64,
    pub span_rank: f64,
    pub commutant_null: f64,
    pub membership: f64,
    pub psd: f64,
    pub unital: f64,
    pub certificate: f64,
    pub feasibility: f64,
    pub primitive_root: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            hermitian: 1e-10,
            relation_per_dim: 1e-9,
            order_precheck_per_dim: 1e-8,
            rank_threshold: 0.5,
            span_rank: 1e-9,
            commutant_null: 1e-8,
            membership: 1e-8,
            psd: 1e-8,
            unital: 1e-9,
            certificate: 1e-8,
            feasibility: 1e-7,
            primitive_root: 1e-10,
        }
    }
}

impl ToleranceConfig {
    /// Relation tolerance for `d x d` matrices.
    pub fn relation(&self, d: usize) -> f64 {
        self.relation_per_dim * d as f64
    }

    /// Scales every threshold except the rank cut by `base / 1e-9`, so that
    /// `with_base(1e-9)` is the default.
    pub fn with_base(base: f64) -> Self {
        let f = base / 1e-9;
        let d = Self::default();
        Self {
            hermitian: d.hermitian * f,
            relation_per_dim: d.relation_per_dim * f,
            order_precheck_per_dim: d.order_precheck_per_dim * f,
            rank_threshold: d.rank_threshold,
            span_rank: d.span_rank * f,
            commutant_null: d.commutant_null * f,
            membership: d.membership * f,
            psd: d.psd * f,
            unital: d.unital * f,
            certificate: d.certificate * f,
            feasibility: d.feasibility * f,
            primitive_root: d.primitive_root * f,
        }
    }
}
