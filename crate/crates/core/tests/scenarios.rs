mod common;

use std::fs;
use std::path::PathBuf;

use cdaimo_core::kb::{Fact, Value};
use cdaimo_core::metrics::{likelihood_band, promote_severity, BandConfig, LikelihoodBand, SeverityLevel};
use cdaimo_core::reasoner::{explain, Justification};
use cdaimo_core::scenario::{apply_overrides, dump_kb, format_doc, load_scenario, parse_scenario, ErrorKind, Override};
use cdaimo_core::{assess, Assessment};
use proptest::prelude::*;

fn scenario(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name);
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn run(name: &str) -> Assessment {
    assess(&scenario(name), true).unwrap()
}

fn leaf_values(a: &Assessment, flag: &str) -> Vec<String> {
    let dec = a.report.decision("dec1").unwrap();
    let tree = &dec.proofs.as_ref().unwrap()[flag];
    tree.leaves().iter().map(|l| l.fact.to_string()).collect()
}

#[test]
fn usecase_flags_and_trace() {
    let a = run("usecase.cdaimo");
    let dec = a.report.decision("dec1").unwrap();
    assert!(dec.collateral_risk_flag);
    assert!(dec.mitigation_required);
    assert!(!dec.escalated);
    assert_eq!(dec.likelihood_band, Some(LikelihoodBand::VeryHigh));
    assert_eq!(dec.raw_severity, Some(SeverityLevel::Severe));
    assert_eq!(dec.reported_severity, Some(SeverityLevel::Severe));
    assert_eq!(dec.triggered_rules, ["R1", "R2"]);
    assert!(leaf_values(&a, "collateral_risk_flag").iter().any(|l| l == "dq1 hasDataQuality 0.45"));
    let r2 = leaf_values(&a, "mitigation_required");
    assert!(r2.iter().any(|l| l == "lm1 hasProbability 0.81"), "{r2:?}");
    assert!(r2.iter().any(|l| l == "sm1 hasSeverity Severe"), "{r2:?}");
    assert!(a.load.warnings.is_empty());
}

#[test]
fn usecase_dump_keeps_attack_vector_and_alteration_level() {
    let a = run("usecase.cdaimo");
    let dump = dump_kb(&a.result.kb_after, &a.load.id, &a.load.axioms);
    assert!(dump.contains("data av1 hasAttackVectorID 1002"));
    assert!(dump.contains("data cd2 hasCivilianDataAlterationLevel high"));
    let reloaded = load_scenario(&dump).unwrap();
    assert_eq!(reloaded.kb.individuals().filter(|i| !i.skolem).count(), a.load.kb.individuals().count());
}

#[test]
fn data_quality_threshold_is_inclusive() {
    let at = run("boundary/dq-at-threshold.cdaimo");
    let above = run("boundary/dq-above-threshold.cdaimo");
    assert!(at.report.decision("dec1").unwrap().collateral_risk_flag);
    assert!(!above.report.decision("dec1").unwrap().collateral_risk_flag);
}

#[test]
fn probability_threshold_is_inclusive() {
    let at = run("boundary/prob-at-threshold.cdaimo");
    let below = run("boundary/prob-below-threshold.cdaimo");
    assert!(at.report.decision("dec1").unwrap().mitigation_required);
    assert!(!below.report.decision("dec1").unwrap().mitigation_required);
}

#[test]
fn regional_spread_escalates_one_step() {
    let a = run("regional.cdaimo");
    let dec = a.report.decision("dec1").unwrap();
    assert!(dec.escalated);
    assert_eq!(dec.reported_severity, Some(promote_severity(SeverityLevel::Severe)));
    assert!(dec.triggered_rules.iter().any(|r| r == "R3"));
}

#[test]
fn lower_probability_needs_no_mitigation() {
    let a = run("mitigation-off.cdaimo");
    let dec = a.report.decision("dec1").unwrap();
    assert!(!dec.mitigation_required);
    assert_eq!(dec.likelihood_band, Some(LikelihoodBand::High));
}

#[test]
fn empty_scenario_reports_nothing() {
    let a = run("empty.cdaimo");
    assert!(a.report.decisions.is_empty());
    assert_eq!(a.report.inference_steps, 0);
}

#[test]
fn custom_rule_and_bands_apply() {
    let a = run("custom-rule.cdaimo");
    let dec = a.report.decision("dec1").unwrap();
    assert!(a.result.kb_after.is_instance("dec1", "HighRiskDecision"));
    assert!(a.load.axioms.iter().all(|(id, _)| id != "R3"));
    let p = dec.likelihood.unwrap();
    assert_eq!(dec.likelihood_band, Some(band_oracle(p, [0.1, 0.3, 0.6, 0.9])));
}

#[test]
fn every_bundled_scenario_audits_cleanly() {
    for name in [
        "usecase.cdaimo",
        "regional.cdaimo",
        "mitigation-off.cdaimo",
        "empty.cdaimo",
        "two-decisions.cdaimo",
        "custom-rule.cdaimo",
        "asserted-mitigation.cdaimo",
        "boundary/dq-at-threshold.cdaimo",
        "boundary/dq-above-threshold.cdaimo",
        "boundary/prob-at-threshold.cdaimo",
        "boundary/prob-below-threshold.cdaimo",
    ] {
        let a = run(name);
        common::audit(&a.result).unwrap_or_else(|e| panic!("{name}: {e}"));
        for dec in &a.report.decisions {
            for id in &dec.audit_refs {
                assert!(a.result.step(*id).is_some(), "{name}: dangling audit ref {id}");
            }
        }
    }
}

#[test]
fn explain_cites_scenario_lines() {
    let a = run("usecase.cdaimo");
    let fact = Fact::Membership { individual: common::n("dec1"), class: common::n("Effect") };
    let tree = explain(&a.result, &fact).unwrap();
    let lines: Vec<Option<u32>> = tree
        .leaves()
        .iter()
        .map(|l| match l.justification {
            Justification::Asserted { line } => line,
            _ => None,
        })
        .collect();
    assert!(lines.iter().all(Option::is_some), "{lines:?}");
    assert!(lines.contains(&Some(11)));
}

#[test]
fn overrides_change_only_the_named_value() {
    let doc = parse_scenario(&scenario("usecase.cdaimo")).unwrap();
    let o: Override = "lm1.hasProbability=0.4".parse().unwrap();
    let changed = apply_overrides(&doc, &[o]);
    let load = cdaimo_core::scenario::load_doc(&changed).unwrap();
    let values: Vec<&Value> = load.kb.data_values("lm1", "hasProbability").map(|d| &d.value).collect();
    assert_eq!(values, [&Value::Double(0.4)]);
    let a = cdaimo_core::assess_doc(&changed, false).unwrap();
    assert!(!a.report.decision("dec1").unwrap().mitigation_required);
}

#[test]
fn errors_carry_positions() {
    let err = load_scenario("scenario s\nindividual x NoSuchClass\n").unwrap_err();
    assert_eq!(err.kind, ErrorKind::UnknownName);
    assert_eq!((err.line, err.column), (2, 14));
    let err = load_scenario("scenario s\nindividual m LikelihoodMetric\ndata m hasProbability 1.5\n").unwrap_err();
    assert_eq!(err.kind, ErrorKind::OutOfRange);
    assert_eq!(err.line, 3);
}

// ---- metrics against hand-written references ---------------------------

fn band_oracle(p: f64, cuts: [f64; 4]) -> LikelihoodBand {
    let bands = [
        LikelihoodBand::VeryLow,
        LikelihoodBand::Low,
        LikelihoodBand::Medium,
        LikelihoodBand::High,
        LikelihoodBand::VeryHigh,
    ];
    bands[cuts.iter().filter(|&&c| p >= c).count()]
}

#[test]
fn bands_match_reference_on_a_grid() {
    let config = BandConfig::default();
    for i in 0..=1000 {
        let p = i as f64 / 1000.0;
        assert_eq!(likelihood_band(p, &config).unwrap(), band_oracle(p, [0.05, 0.25, 0.5, 0.75]), "p={p}");
    }
    assert!(likelihood_band(1.01, &config).is_err());
    assert!(likelihood_band(-0.01, &config).is_err());
}

#[test]
fn promotion_steps_once_and_caps() {
    let order = ["Negligible", "Minor", "Moderate", "Severe", "Catastrophic"];
    for (i, name) in order.iter().enumerate() {
        let level: SeverityLevel = name.parse().unwrap();
        let expected = order[(i + 1).min(order.len() - 1)];
        assert_eq!(promote_severity(level).as_str(), expected);
    }
}

#[test]
fn metric_view_by_hand() {
    let a = run("two-decisions.cdaimo");
    let kb = &a.result.kb_after;
    for dec in &a.report.decisions {
        // walk the links directly: decision -> likelihood metric -> probability
        let probs: Vec<f64> = kb
            .links(dec.decision.as_str(), "hasLikelihoodMetric")
            .flat_map(|l| kb.data_values(l.object.as_str(), "hasProbability"))
            .filter_map(|d| d.value.as_f64())
            .collect();
        let expected = probs.iter().cloned().fold(None, |m: Option<f64>, p| Some(m.map_or(p, |m| m.max(p))));
        assert_eq!(dec.likelihood, expected, "{}", dec.decision);
        assert_eq!(dec.likelihood_band, expected.map(|p| band_oracle(p, [0.05, 0.25, 0.5, 0.75])));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn overridden_probability_round_trips(p in 0.0f64..=1.0) {
        let doc = parse_scenario(&scenario("usecase.cdaimo")).unwrap();
        let o: Override = format!("lm1.hasProbability={p}").parse().unwrap();
        let changed = apply_overrides(&doc, &[o]);
        let text = format_doc(&changed);
        let again = parse_scenario(&text).unwrap();
        prop_assert_eq!(&again, &changed);
        let a = cdaimo_core::assess_doc(&again, false).unwrap();
        let dec = a.report.decision("dec1").unwrap();
        prop_assert_eq!(dec.mitigation_required, p >= 0.75);
        prop_assert_eq!(dec.likelihood_band, Some(band_oracle(p, [0.05, 0.25, 0.5, 0.75])));
    }
}

#[test]
fn loading_is_deterministic() {
    let text = scenario("usecase.cdaimo");
    let (a, b) = (load_scenario(&text).unwrap(), load_scenario(&text).unwrap());
    assert_eq!(a.kb, b.kb);
    assert_eq!(a.axioms, b.axioms);
    assert_eq!(a.config, b.config);
    assert_eq!(a.warnings, b.warnings);
}

#[test]
fn empty_scenario_is_the_seed() {
    let load = load_scenario("scenario e\n").unwrap();
    assert_eq!(load.kb, cdaimo_core::seed::seed_kb());
    assert_eq!(load.axioms.len(), 3);
    assert!(load.warnings.is_empty());
}

#[test]
fn use_before_declaration_is_reported_at_its_line() {
    let err = load_scenario("scenario s\nobject a isAssessedBy b\nindividual a AssessmentDecision\n").unwrap_err();
    assert_eq!(err.kind, ErrorKind::UnknownName);
    assert_eq!(err.line, 2);
}
