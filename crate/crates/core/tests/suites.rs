use qhexa_core::conformal::{suite_ids, verify_identity, verify_suite, SuiteConfig, SuiteError};
use qhexa_core::ncalg::Basis;
use qhexa_core::tables::SpinShift;

const COUNTS: &[(&str, usize)] = &[
    ("JJ", 105),
    ("JY", 90),
    ("YY", 15),
    ("YYY", 216),
    ("CM", 4),
    ("CY", 20),
    ("PX", 16),
    ("DX", 4),
    ("JX", 24),
    ("XX", 6),
    ("S2", 2),
    ("Y2", 1),
    ("spinundemi", 10),
];

#[test]
fn every_suite_passes_in_its_default_basis() {
    let cfg = SuiteConfig::default();
    for id in suite_ids() {
        let rows = verify_suite(id, &cfg).unwrap();
        assert!(!rows.is_empty(), "{id} is empty");
        let failed: Vec<_> = rows.iter().filter(|r| !r.pass).map(|r| r.id.clone()).collect();
        assert!(failed.is_empty(), "{id}: {failed:?}");
        if let Some((_, n)) = COUNTS.iter().find(|(s, _)| *s == id) {
            assert_eq!(rows.len(), *n, "{id} component count");
        }
    }
}

#[test]
fn algebra_suites_also_close_in_the_other_basis() {
    for (id, basis) in [("JJ", Basis::B), ("jacobi", Basis::A), ("PX", Basis::B), ("XX", Basis::B)] {
        let cfg = SuiteConfig {
            basis: Some(basis),
            ..SuiteConfig::default()
        };
        let rows = verify_suite(id, &cfg).unwrap();
        assert!(rows.iter().all(|r| r.pass), "{id} in {basis}");
    }
}

#[test]
fn printed_spin_term_breaks_closure() {
    let cfg = SuiteConfig {
        shift: SpinShift::Printed,
        ..SuiteConfig::default()
    };
    let rows = verify_suite("CY", &cfg).unwrap();
    assert_eq!(rows.iter().filter(|r| !r.pass).count(), 20);
    let cm = verify_suite("CM", &cfg).unwrap();
    assert!(cm.iter().all(|r| r.pass), "(C, M) does not see the spin term");
}

#[test]
fn single_components_and_errors() {
    let cfg = SuiteConfig::default();
    let r = verify_identity("YY", "(Y_0,Y_1)", &cfg).unwrap();
    assert!(r.pass && r.residual.is_zero());
    assert!(matches!(verify_suite("nope", &cfg), Err(SuiteError::UnknownSuite(..))));
    assert!(matches!(
        verify_identity("YY", "(Y_0,Y_9)", &cfg),
        Err(SuiteError::UnknownComponent { .. })
    ));
}
