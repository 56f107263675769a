use diva::report::{load_report, save_report, Detrimental, Real, Report, Step};
use diva_core::workflows::{detect_detrimental, ValidationMode};
use diva_core::{Dataset, Matrix, ValidationLoss};
use proptest::prelude::*;

#[test]
fn empty_detrimental_serializes_as_empty_array() {
    let s = Report::new("detect", 1.0).to_json().unwrap();
    assert!(s.contains("\"detrimental\": []"));
    for key in [
        "schema_version",
        "weights",
        "selected_indices",
        "trajectory",
        "metrics",
    ] {
        assert!(s.contains(&format!("\"{key}\"")), "{key}");
    }
}

#[test]
fn curation_report_round_trip() {
    let z = Matrix::from_fn(8, 2, |i, j| (i as f64 * 0.7 + j as f64).sin());
    let d = Dataset::from_classes(z, &[0, 1, 0, 1, 1, 0, 0, 1], 2).unwrap();
    let c = detect_detrimental(
        &d,
        0.5,
        ValidationLoss::CrossEntropy,
        0.0,
        ValidationMode::Loo,
        None,
    )
    .unwrap();
    let r = Report::from_curation("detect", &c);
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.json");
    save_report(&r, &p).unwrap();
    let back = load_report(&p).unwrap();
    assert_eq!(back, r);
    assert_eq!(back.weight_values(), c.final_weights.as_slice());
    let g: Vec<f64> = back.gradient.unwrap().iter().map(|v| v.0).collect();
    assert_eq!(&g, c.gradient.as_ref().unwrap());
    // no temporary files are left behind
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn unwritable_path_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("missing").join("r.json");
    assert!(save_report(&Report::new("fit", 1.0), &p).is_err());
}

#[test]
fn unknown_fields_rejected() {
    let mut s = Report::new("fit", 1.0).to_json().unwrap();
    s.insert_str(1, "\"bogus\": 1,");
    assert!(Report::from_json(&s).is_err());
}

fn finite() -> impl Strategy<Value = f64> {
    any::<f64>().prop_filter("finite", |v| v.is_finite())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn json_round_trip_is_lossless(
        lambda in finite(),
        weights in proptest::collection::vec(finite(), 0..20),
        scores in proptest::collection::vec(finite(), 0..10),
        losses in proptest::collection::vec(finite(), 1..6),
        selected in proptest::collection::vec(0usize..1000, 0..10),
    ) {
        let mut r = Report::new("reweight", lambda);
        r.weights = weights.iter().copied().map(Real).collect();
        r.selected_indices = selected;
        r.detrimental = scores.iter().enumerate().map(|(index, &s)| Detrimental { index, score: Real(s) }).collect();
        r.trajectory = losses.iter().enumerate().map(|(step, &l)| Step { step, loss: Real(l) }).collect();
        r.set_metric("x", lambda);
        let json = r.to_json().unwrap();
        let back = Report::from_json(&json).unwrap();
        prop_assert_eq!(&back, &r);
        for (a, b) in back.weights.iter().zip(&r.weights) {
            prop_assert_eq!(a.0.to_bits(), b.0.to_bits());
        }
        prop_assert!(back.trajectory.windows(2).all(|w| w[0].step < w[1].step));
        prop_assert_eq!(back.to_json().unwrap(), json);
    }
}
