use std::fs;

use x3sat::{to_x3c, Instance};
use x3sat_harness::store::{read_entries, Severity};
use x3sat_harness::*;

fn x3c(instance: &Instance) -> String {
    to_x3c(instance)
}

fn first_report(class_wanted: Option<Class>) -> (GenConfig, RunReport) {
    let cfg = GenConfig::new(7, 16, 8);
    let campaign = differential_run(&cfg, 400, &DiffConfig::default()).unwrap();
    let report = campaign
        .reports
        .into_iter()
        .find(|r| class_wanted.is_none_or(|c| r.class == c))
        .expect("class occurs in the family");
    (cfg, report)
}

#[test]
fn generation_is_deterministic() {
    let cfg = GenConfig::new(1, 5, 3);
    assert_eq!(x3c(&gen_instance(&cfg)), x3c(&gen_instance(&cfg)));
    assert_ne!(x3c(&gen_instance_at(&cfg, 0)), x3c(&gen_instance_at(&cfg, 1)));
}

#[test]
fn arity_and_polarity_knobs() {
    let mut cfg = GenConfig::new(3, 9, 40);
    cfg.two_clause_fraction = 0.0;
    cfg.positive_bias = 1.0;
    let inst = gen_instance(&cfg);
    for (_, c) in inst.formula.clauses() {
        assert_eq!(c.len(), 3);
        assert!(c.literals().iter().all(|l| l.is_positive()));
    }
}

#[test]
fn campaign_reports_are_reproducible() {
    let cfg = GenConfig::new(11, 10, 18);
    let a = differential_run(&cfg, 1000, &DiffConfig::default()).unwrap();
    let b = differential_run(&cfg, 1000, &DiffConfig::default()).unwrap();
    let json = |c: &differential::Campaign| serde_json::to_string(&c.reports).unwrap();
    assert_eq!(json(&a), json(&b));
    assert_eq!(a.reports.len(), 1000);
}

#[test]
fn identical_reports_get_distinct_ids() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.jsonl");
    let (cfg, report) = first_report(Some(Class::ClaimFalsifiedConstruction));
    let text = x3c(&gen_instance_at(&cfg, report.index));
    let mut store = CounterexampleStore::open(&path).unwrap();
    let a = store.record(&report, &text, Some(&cfg), &DiffConfig::default()).unwrap();
    let b = store.record(&report, &text, Some(&cfg), &DiffConfig::default()).unwrap();
    assert_eq!((a.as_str(), b.as_str()), ("cx-000001", "cx-000002"));

    // Reopening continues the numbering.
    let mut again = CounterexampleStore::open(&path).unwrap();
    assert_eq!(again.len(), 2);
    let c = again.record(&report, &text, None, &DiffConfig::default()).unwrap();
    assert_eq!(c, "cx-000003");
    assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 3);

    let entry = again.get("cx-000002").unwrap();
    assert_eq!(entry.severity, Severity::Falsification);
    assert_eq!(entry.instance, text);
    let r = replay(&entry).unwrap();
    assert!(r.reproduced());
    assert_eq!(r.report.digest, entry.digest);
    assert!(matches!(again.get("cx-999999"), Err(HarnessError::UnknownEntry(_))));
}

#[test]
fn bug_classes_are_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let (cfg, mut report) = first_report(None);
    report.class = Class::SoundnessViolation;
    let mut store = CounterexampleStore::open(dir.path().join("s.jsonl")).unwrap();
    let text = x3c(&gen_instance_at(&cfg, report.index));
    let id = store.record(&report, &text, Some(&cfg), &DiffConfig::default()).unwrap();
    let entry = store.get(&id).unwrap();
    assert_eq!(entry.severity, Severity::Bug);
    // The real instance does not reproduce the forged class.
    assert!(!replay(&entry).unwrap().reproduced());
}

#[test]
fn agreements_are_not_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let (cfg, report) = first_report(Some(Class::AgreeSatVerified));
    let mut store = CounterexampleStore::open(dir.path().join("s.jsonl")).unwrap();
    let text = x3c(&gen_instance_at(&cfg, report.index));
    let err = store.record(&report, &text, Some(&cfg), &DiffConfig::default()).unwrap_err();
    assert!(matches!(err, HarnessError::NotCounterexample(Class::AgreeSatVerified)));
    assert!(store.is_empty());
}

#[test]
fn storage_errors_name_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("missing").join("s.jsonl");
    let (cfg, report) = first_report(Some(Class::ClaimFalsifiedConstruction));
    let mut store = CounterexampleStore::open(&bad).unwrap();
    let text = x3c(&gen_instance_at(&cfg, report.index));
    let err = store.record(&report, &text, Some(&cfg), &DiffConfig::default()).unwrap_err();
    assert!(err.to_string().contains("missing"), "{err}");

    let garbled = dir.path().join("g.jsonl");
    fs::write(&garbled, "{}\n").unwrap();
    let err = read_entries(&garbled).unwrap_err();
    assert!(err.to_string().contains("g.jsonl:1"), "{err}");
}

#[test]
fn campaign_summary_is_stable_and_complete() {
    let dir = tempfile::tempdir().unwrap();
    let families = [GenConfig::new(7, 16, 8), GenConfig::new(8, 8, 16)];
    let mut store = CounterexampleStore::open(dir.path().join("s.jsonl")).unwrap();
    let result = run_campaign(&families, 300, &DiffConfig::default(), Some(&mut store)).unwrap();
    let s = &result.summary;
    assert_eq!(s.runs, 600);
    assert_eq!(s.histogram.len(), Class::ALL.len());
    assert_eq!(s.histogram.values().sum::<u64>(), 600);
    assert_eq!(s.stored, store.len());
    assert_eq!(s.store_ids.len() as u64, s.stored);
    let again = run_campaign(&families, 300, &DiffConfig::default(), None).unwrap();
    assert_eq!(again.summary.histogram, s.histogram);
}

#[test]
fn invalid_family_is_rejected() {
    let err = run_campaign(&[GenConfig::new(1, 1, 3)], 1, &DiffConfig::default(), None);
    assert!(matches!(err, Err(HarnessError::Gen(_))));
}
