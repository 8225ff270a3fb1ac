use rfgap_core::curvature::Tensor4;
use rfgap_core::verify::{run, CoreHooks, Status, Suite, VerifyConfig};

/// Averages over the antisymmetries and pair symmetry but never projects out
/// the totally antisymmetric part, so the first Bianchi identity fails.
fn symmetrize_without_bianchi(raw: &Tensor4) -> Tensor4 {
    let mut out = Tensor4::zero();
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    let v = raw.get(i, j, k, l) - raw.get(j, i, k, l) - raw.get(i, j, l, k)
                        + raw.get(j, i, l, k)
                        + raw.get(k, l, i, j)
                        - raw.get(l, k, i, j)
                        - raw.get(k, l, j, i)
                        + raw.get(l, k, j, i);
                    out.set(i, j, k, l, v / 8.0);
                }
            }
        }
    }
    out
}

#[test]
fn corrupted_symmetrize_is_caught_by_name() {
    let cfg = VerifyConfig {
        hooks: CoreHooks {
            symmetrize: symmetrize_without_bianchi,
        },
        ..VerifyConfig::new(Suite::Core, 20, 42)
    };
    let result = run(&cfg).unwrap();
    assert_eq!(result.status, Status::Fail);
    assert!(result.failures.iter().any(|f| f.check == "core.first_bianchi"));
    assert!(result
        .failures
        .iter()
        .all(|f| f.check != "core.antisymmetry" && f.check != "core.pair_symmetry"));
}

#[test]
fn library_symmetrize_passes() {
    let result = run(&VerifyConfig::new(Suite::Core, 50, 42)).unwrap();
    assert_eq!(result.status, Status::Pass, "{:?}", result.failures);
    assert!(result.failures.is_empty());
}

#[test]
fn results_do_not_depend_on_worker_count() {
    for suite in [Suite::Berger, Suite::Kahler] {
        let one = run(&VerifyConfig {
            jobs: 1,
            ..VerifyConfig::new(suite, 24, 9)
        })
        .unwrap();
        let three = run(&VerifyConfig {
            jobs: 3,
            ..VerifyConfig::new(suite, 24, 9)
        })
        .unwrap();
        assert_eq!(
            serde_json::to_string(&one).unwrap(),
            serde_json::to_string(&three).unwrap()
        );
        assert_eq!(one.status, Status::Pass, "{:?}", one.failures);
    }
}

#[test]
fn polygon_suite_passes_quickly() {
    let start = std::time::Instant::now();
    let result = run(&VerifyConfig::new(Suite::Polygon, 50, 1)).unwrap();
    assert_eq!(result.status, Status::Pass, "{:?}", result.failures);
    assert!(start.elapsed().as_secs_f64() < 10.0);
}
