use coinv_core::glue::ClassTag;
use coinv_verify::cache::Cache;
use coinv_verify::expect::Expectations;
use coinv_verify::pipeline::{run_class, Options, Stage};
use coinv_verify::report::Report;

#[test]
fn class_4c_through_discriminant_with_cache_reload() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::at(dir.path()).unwrap();
    let exp = Expectations::builtin();
    let opts = Options { upto: Stage::Discriminant, ..Options::default() };
    let cold = run_class(ClassTag::C4, exp.get(ClassTag::C4).unwrap(), &cache, &opts).unwrap();
    assert!(cold.passed(), "{:?}", cold.failures().collect::<Vec<_>>());
    assert_eq!(cold.summary.o_lattice, Some(5_898_240));
    assert_eq!(cold.summary.disc_index, Some(2));
    assert!(cold.index2.is_none());

    let warm = run_class(ClassTag::C4, exp.get(ClassTag::C4).unwrap(), &cache, &opts).unwrap();
    assert!(warm.timings.iter().any(|t| t.cache_hits > 0));
    assert_eq!(warm.summary, cold.summary);

    let report = Report::new(vec![cold]);
    assert!(report.all_passed);
    assert!(report.to_markdown(&exp).contains("| 4C |"));
}
