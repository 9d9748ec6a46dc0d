//! Browser bindings. Each export returns a JSON string that the page in
//! `www/` draws on a canvas; the logic lives in [`views`] so it can be
//! tested natively.

pub mod views;

use wasm_bindgen::prelude::*;

fn js(result: Result<String, String>) -> Result<String, JsError> {
    result.map_err(|e| JsError::new(&e))
}

/// Clock and shift matrices of order `p` as phase grids.
#[wasm_bindgen]
pub fn weyl_pair_view(p: usize) -> Result<String, JsError> {
    js(views::pair_view(p))
}

/// A scrambled pair before and after canonicalization.
#[wasm_bindgen]
pub fn canonical_view(p: usize, n: usize, seed: u64) -> Result<String, JsError> {
    js(views::canonical_view(p, n, seed))
}

/// Gap per iteration of the ucp search from the simple triple at `p = 3` to
/// either itself (`"control"`) or the counterexample triple.
#[wasm_bindgen]
pub fn interpolation_curve(target: &str, max_iters: usize) -> Result<String, JsError> {
    js(views::interpolation_curve(target, max_iters))
}
