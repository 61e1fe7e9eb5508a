use std::path::PathBuf;

use unitcoh::verify::{
    level_summary, run_config, run_corpus, run_entry, Config, CorpusEntry, Options, Status, CHECK_NAMES,
    DEFAULT_CORPUS,
};
use unitcoh::field::TowerSpec;
use unitcoh::Error;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("unitcoh-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

const SMALL: &str = r#"
[[entry]]
label = "Q2(i)"
p = 2
eisenstein_polys = [[2, 2, 1]]
expected = { e = 2, f = 1, t = 1, w = 2, breaks = [1] }

[[entry]]
label = "cube root of 5"
p = 5
eisenstein_polys = [[-5, 0, 0, 1]]
"#;

#[test]
fn non_galois_entry_does_not_disturb_the_others() {
    let report = run_config(&Config::parse(SMALL).unwrap(), &Options::default());
    let good = &report.entries[0];
    assert!(good.error.is_none());
    assert!(good.checks.iter().all(|c| c.status == Status::Pass), "{:#?}", good.checks);
    let bad = &report.entries[1];
    assert!(bad.error.as_ref().unwrap().contains("not Galois"));
    assert!(bad.checks.iter().all(|c| c.status == Status::Skipped));
    assert_eq!(report.exit_status(), 0);
    assert_eq!(report.summary.skipped, CHECK_NAMES.len());
}

#[test]
fn report_is_total_ordered_and_deterministic() {
    let config = Config::parse(DEFAULT_CORPUS).unwrap();
    let a = run_config(&config, &Options::default());
    let b = run_config(&config, &Options::default());
    assert_eq!(a.to_json(), b.to_json());
    for e in &a.entries {
        let names: Vec<&str> = e.checks.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, CHECK_NAMES);
        assert!(e.stabilization.as_ref().unwrap().stable);
    }
    let json: serde_json::Value = serde_json::from_str(&a.to_json()).unwrap();
    assert_eq!(json["schema"], 1);
    let text = a.to_json();
    let pos = |k: &str| text.find(k).unwrap();
    assert!(pos("\"schema\"") < pos("\"summary\"") && pos("\"summary\"") < pos("\"entries\""));
    assert!(pos("\"label\"") < pos("\"checks\""));
}

#[test]
fn run_corpus_writes_report_and_exit_status() {
    let config = scratch("small.toml");
    let out = scratch("small.json");
    std::fs::write(&config, SMALL).unwrap();
    let status = run_corpus(&config, &out, &Options::default()).unwrap();
    assert_eq!(status, 0);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(json["entries"].as_array().unwrap().len(), 2);

    std::fs::write(&config, "[[entry]]\nlabel = \"x\"\np = \"two\"\n").unwrap();
    match run_corpus(&config, &out, &Options::default()) {
        Err(Error::Config(msg)) => assert!(msg.contains("line 3"), "{msg}"),
        other => panic!("expected a config error, got {other:?}"),
    }
    assert!(matches!(
        run_corpus(&scratch("missing.toml"), &out, &Options::default()),
        Err(Error::Io(_))
    ));
}

#[test]
fn pinned_values_catch_a_wrong_expectation() {
    let text = SMALL.replace("w = 2", "w = 4");
    let config = Config::parse(&text).unwrap();
    let r = run_entry(&config.entries[0], &Options::default());
    assert_eq!(r.check("pinned-invariants").unwrap().status, Status::Fail);
}

#[test]
fn fixed_precision_is_respected() {
    let entry = CorpusEntry {
        label: "Q2(i)".into(),
        p: 2,
        unramified_poly: None,
        eisenstein_polys: vec![vec![2.into(), 2.into(), 1.into()]],
        expected: None,
    };
    let options = Options { precision: Some(11), ..Options::default() };
    let r = run_entry(&entry, &options);
    assert_eq!(r.precision, Some(11));
    assert!(r.checks.iter().all(|c| c.precision == Some(11)));
    let small = Options { precision: Some(3), ..Options::default() };
    assert!(run_entry(&entry, &small).error.is_some());
}

#[test]
fn level_summaries() {
    let spec = TowerSpec::new(2, None, vec![vec![-2, 0, 1]]);
    let top = level_summary(&spec, 0, None).unwrap();
    assert_eq!(top.precision, 10);
    assert_eq!(top.invariant_factors, vec![2]);
    assert_eq!(top.truncated_invariant_factors, vec![2, 2]);
    assert_eq!(top.fundamental_class_order, 2);
    let third = level_summary(&spec, 3, Some(10)).unwrap();
    assert_eq!(third.image_order, 1);
    let tame = level_summary(&TowerSpec::new(3, None, vec![vec![3, 3, 1]]), 1, None).unwrap();
    assert!(tame.invariant_factors.is_empty());
}
