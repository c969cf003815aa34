use catzeno::{run_verification, VerifyOptions};

#[test]
fn default_suite_passes_and_resolves_the_amplitude() {
    let report = run_verification(&VerifyOptions::default()).unwrap();
    assert!(report.passed(), "{:?}", report.failures());
    assert_eq!(report.amplitude.adopted, 4.0);
    assert!((report.amplitude.measured - 4.0).abs() < 1e-9);
    report.conservation.check().unwrap();
}

#[test]
fn skewed_upward_rate_is_caught_by_name() {
    let report = run_verification(&VerifyOptions {
        gamma_minus_factor: 1.01,
        ..VerifyOptions::default()
    })
    .unwrap();
    let failures = report.failures();
    assert!(failures.contains(&"pn-closed-form"), "{failures:?}");
    assert!(failures.contains(&"recursive-qcf"), "{failures:?}");
    assert!(!failures.contains(&"rate-identity"));
}
