use serde_json::Value;
use weylkit_wasm::views::{canonical_view, interpolation_curve, pair_view};

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn pair_grid_has_one_unit_entry_per_row() {
    let view = parse(pair_view(5).unwrap());
    let cells = view["v"]["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 25);
    let ones = cells
        .iter()
        .filter(|c| (c[0].as_f64().unwrap() - 1.0).abs() < 1e-12)
        .count();
    assert_eq!(ones, 5);
    assert!(view["max_residual"].as_f64().unwrap() < 1e-12);
    assert!(pair_view(1).is_err());
    assert!(pair_view(12).is_err());
}

#[test]
fn canonical_view_reports_the_multiplicity() {
    let view = parse(canonical_view(3, 2, 4).unwrap());
    assert_eq!(view["commutant_dim"], 4);
    assert!(view["reconstruction_residual"].as_f64().unwrap() < 1e-10);
    assert_eq!(view["canonical_u"]["size"], 6);
    assert!(canonical_view(5, 5, 0).is_err());
}

#[test]
fn curves_separate_control_from_counterexample() {
    let good = parse(interpolation_curve("control", 2000).unwrap());
    assert_eq!(good["status"], "feasible");
    let bad = parse(interpolation_curve("counterexample", 2000).unwrap());
    assert_eq!(bad["status"], "infeasible_evidence");
    let gaps = bad["gaps"].as_array().unwrap();
    assert_eq!(gaps.len(), bad["iterations"].as_u64().unwrap() as usize);
    assert!(gaps.last().unwrap().as_f64().unwrap() > 1.0);
    assert!(interpolation_curve("other", 10).is_err());
}
