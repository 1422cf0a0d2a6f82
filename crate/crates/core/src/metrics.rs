//! Assessment dimensions read off a knowledge base, and the decision report
//! composed from a saturation result.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::kb::{DataAssertion, EntityName, Fact, KnowledgeBase, ObjectAssertion, Value};
use crate::reasoner::{SaturationResult, StepId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum SeverityLevel {
    Negligible,
    Minor,
    Moderate,
    Severe,
    Catastrophic,
}

impl SeverityLevel {
    pub const ALL: [SeverityLevel; 5] = [
        SeverityLevel::Negligible,
        SeverityLevel::Minor,
        SeverityLevel::Moderate,
        SeverityLevel::Severe,
        SeverityLevel::Catastrophic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SeverityLevel::Negligible => "Negligible",
            SeverityLevel::Minor => "Minor",
            SeverityLevel::Moderate => "Moderate",
            SeverityLevel::Severe => "Severe",
            SeverityLevel::Catastrophic => "Catastrophic",
        }
    }
}

impl fmt::Display for SeverityLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SeverityLevel {
    type Err = MetricsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| MetricsError::UnknownLevel(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum LikelihoodBand {
    VeryLow,
    Low,
    Medium,
    High,
    VeryHigh,
}

impl LikelihoodBand {
    pub const ALL: [LikelihoodBand; 5] = [
        LikelihoodBand::VeryLow,
        LikelihoodBand::Low,
        LikelihoodBand::Medium,
        LikelihoodBand::High,
        LikelihoodBand::VeryHigh,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LikelihoodBand::VeryLow => "VeryLow",
            LikelihoodBand::Low => "Low",
            LikelihoodBand::Medium => "Medium",
            LikelihoodBand::High => "High",
            LikelihoodBand::VeryHigh => "VeryHigh",
        }
    }
}

impl fmt::Display for LikelihoodBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("unknown individual `{0}`")]
    UnknownIndividual(String),
    #[error("{what} {value} is outside [0, 1]")]
    OutOfRange { what: &'static str, value: String },
    #[error("band cut-points must be strictly increasing within (0, 1], got {0:?}")]
    InvalidBands(Vec<f64>),
    #[error("unknown severity level `{0}`")]
    UnknownLevel(String),
}

/// Lower bounds of Low, Medium, High and VeryHigh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandConfig {
    pub cuts: [f64; 4],
}

impl Default for BandConfig {
    fn default() -> Self {
        BandConfig { cuts: [0.05, 0.25, 0.5, 0.75] }
    }
}

impl BandConfig {
    pub fn new(cuts: [f64; 4]) -> Result<Self, MetricsError> {
        let ok = cuts.iter().all(|c| c.is_finite() && *c > 0.0 && *c <= 1.0) && cuts.windows(2).all(|w| w[0] < w[1]);
        if ok {
            Ok(BandConfig { cuts })
        } else {
            Err(MetricsError::InvalidBands(cuts.to_vec()))
        }
    }
}

/// Band of a probability. Each band includes its lower bound.
pub fn likelihood_band(p: f64, config: &BandConfig) -> Result<LikelihoodBand, MetricsError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(MetricsError::OutOfRange { what: "probability", value: p.to_string() });
    }
    let idx = config.cuts.iter().filter(|&&c| p >= c).count();
    Ok(LikelihoodBand::ALL[idx])
}

/// One step up the severity scale, capped at Catastrophic.
pub fn promote_severity(level: SeverityLevel) -> SeverityLevel {
    let idx = SeverityLevel::ALL.iter().position(|l| *l == level).unwrap_or(0);
    SeverityLevel::ALL[(idx + 1).min(SeverityLevel::ALL.len() - 1)]
}

/// A metric value together with the assertion it was read from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cited<T> {
    pub value: T,
    pub source: DataAssertion,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ForceEffect {
    pub effect: EntityName,
    pub kinds: Vec<EntityName>,
    pub source: ObjectAssertion,
}

/// Metric values reachable from one individual. When several metrics of a
/// kind are linked, the worst case is kept: highest severity, probability,
/// spread, duration and long-term impact, lowest data quality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricView {
    pub subject: EntityName,
    pub engagement: Option<EntityName>,
    pub temporal: Option<Cited<String>>,
    pub spatial: Option<Cited<String>>,
    pub force: Vec<ForceEffect>,
    pub severity: Option<Cited<SeverityLevel>>,
    pub likelihood: Option<Cited<f64>>,
    pub data_quality: Option<Cited<f64>>,
    pub long_term_impact: Option<Cited<f64>>,
}

struct Walker<'a> {
    kb: &'a KnowledgeBase,
    context: Vec<EntityName>,
}

impl Walker<'_> {
    fn targets(&self, property: &str) -> Vec<ObjectAssertion> {
        let mut out = Vec::new();
        for c in &self.context {
            out.extend(self.kb.links(c.as_str(), property).cloned());
        }
        out
    }

    fn values_at(&self, subjects: &[EntityName], property: &str) -> Vec<DataAssertion> {
        let mut out = Vec::new();
        for s in subjects {
            out.extend(self.kb.data_values(s.as_str(), property).cloned());
        }
        out
    }

    /// `context -via-> metric`, then `metric property value`.
    fn via(&self, link: &str, property: &str) -> Vec<DataAssertion> {
        let metrics: Vec<EntityName> = self.targets(link).into_iter().map(|l| l.object).collect();
        self.values_at(&metrics, property)
    }

    fn enum_rank(&self, a: &DataAssertion) -> usize {
        match &a.value {
            Value::Enum { enum_name, member } => self.kb.enum_rank(enum_name.as_str(), member.as_str()).unwrap_or(0),
            _ => 0,
        }
    }

    fn worst_enum(&self, found: Vec<DataAssertion>) -> Option<Cited<String>> {
        let best = found.into_iter().max_by_key(|a| (self.enum_rank(a), a.clone()))?;
        let member = match &best.value {
            Value::Enum { member, .. } => member.to_string(),
            other => other.to_string(),
        };
        Some(Cited { value: member, source: best.clone() })
    }
}

fn unit_interval(what: &'static str, a: &DataAssertion) -> Result<f64, MetricsError> {
    let v = a.value.as_f64().unwrap_or(f64::NAN);
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(MetricsError::OutOfRange { what, value: a.value.to_string() })
    }
}

fn pick_f64(found: Vec<DataAssertion>, highest: bool) -> Option<Cited<f64>> {
    let mut best: Option<(f64, DataAssertion)> = None;
    for a in found {
        let Some(v) = a.value.as_f64() else { continue };
        let better = match &best {
            None => true,
            Some((b, _)) if highest => v > *b,
            Some((b, _)) => v < *b,
        };
        if better {
            best = Some((v, a));
        }
    }
    best.map(|(value, source)| Cited { value, source })
}

/// Reads the metrics around `individual`: the individual itself, what it is
/// assessed by, and what it assesses.
pub fn extract_metrics(kb: &KnowledgeBase, individual: &str) -> Result<MetricView, MetricsError> {
    let ind = kb.individual(individual).ok_or_else(|| MetricsError::UnknownIndividual(individual.to_string()))?;
    let mut context = vec![ind.name.clone()];
    let mut seen: BTreeSet<EntityName> = context.iter().cloned().collect();
    for link in kb.links(individual, "isAssessedBy") {
        if seen.insert(link.object.clone()) {
            context.push(link.object.clone());
        }
    }
    for link in kb.object_assertions() {
        if link.property.as_str() == "isAssessedBy" && link.object == ind.name && seen.insert(link.subject.clone()) {
            context.push(link.subject.clone());
        }
    }
    let engagement = context.iter().find(|c| kb.is_instance(c.as_str(), "TargetEngagement")).cloned();
    let w = Walker { kb, context };

    let temporal = w.worst_enum(w.via("hasTemporalAssessment", "hasDuration"));
    let spatial = w.worst_enum(w.via("hasSpatialAssessment", "hasSpread"));
    let severity = match w.worst_enum(w.via("hasSeverityMetric", "hasSeverity")) {
        Some(c) => Some(Cited { value: c.value.parse()?, source: c.source }),
        None => None,
    };
    let probabilities = w.via("hasLikelihoodMetric", "hasProbability");
    for a in &probabilities {
        unit_interval("probability", a)?;
    }
    let likelihood = pick_f64(probabilities, true);

    let systems: Vec<EntityName> = w.targets("hasTargetAISystem").into_iter().map(|l| l.object).collect();
    let validators: Vec<EntityName> = systems
        .iter()
        .flat_map(|s| kb.links(s.as_str(), "isValidatedBy"))
        .map(|l| l.object.clone())
        .collect();
    let qualities = w.values_at(&validators, "hasDataQuality");
    for a in &qualities {
        unit_interval("data quality", a)?;
    }
    let data_quality = pick_f64(qualities, false);

    let mut force = Vec::new();
    let mut impacts = w.values_at(&w.context, "hasLongTermImpact");
    for link in w.targets("isProducingEffect") {
        let Some(effect) = kb.individual(link.object.as_str()) else { continue };
        let kinds: BTreeSet<EntityName> = effect
            .classes()
            .filter(|c| c.as_str() != "Effect" && kb.ancestors(c.as_str()).iter().any(|a| a.as_str() == "Effect"))
            .cloned()
            .collect();
        impacts.extend(kb.data_values(link.object.as_str(), "hasLongTermImpact").cloned());
        if !kinds.is_empty() {
            force.push(ForceEffect { effect: link.object.clone(), kinds: kinds.into_iter().collect(), source: link });
        }
    }
    force.sort_by(|a, b| a.effect.cmp(&b.effect));
    force.dedup_by(|a, b| a.effect == b.effect);
    let long_term_impact = pick_f64(impacts, true);

    Ok(MetricView {
        subject: ind.name.clone(),
        engagement,
        temporal,
        spatial,
        force,
        severity,
        likelihood,
        data_quality,
        long_term_impact,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EffectEntry {
    pub individual: EntityName,
    pub classes: Vec<EntityName>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alteration_level: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecisionEntry {
    pub decision: EntityName,
    pub engagements: Vec<EntityName>,
    pub collateral_risk_flag: bool,
    pub mitigation_required: bool,
    pub mitigations: Vec<EntityName>,
    pub escalated: bool,
    pub raw_severity: Option<SeverityLevel>,
    pub reported_severity: Option<SeverityLevel>,
    pub likelihood: Option<f64>,
    pub likelihood_band: Option<LikelihoodBand>,
    pub metrics: MetricView,
    pub effects: Vec<EffectEntry>,
    pub triggered_rules: Vec<String>,
    pub audit_refs: Vec<StepId>,
    /// Proof trees keyed by flag, present when traces were requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proofs: Option<std::collections::BTreeMap<String, crate::reasoner::ProofTree>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CDAReport {
    pub scenario: String,
    pub inference_steps: usize,
    pub decisions: Vec<DecisionEntry>,
}

impl CDAReport {
    pub fn decision(&self, name: &str) -> Option<&DecisionEntry> {
        self.decisions.iter().find(|d| d.decision.as_str() == name)
    }
}

/// One entry per `AssessmentDecision` in the saturated knowledge base, in
/// name order.
pub fn compose_report(result: &SaturationResult, scenario: &str, bands: &BandConfig) -> Result<CDAReport, MetricsError> {
    let kb = &result.kb_after;
    let mut decisions = Vec::new();
    for name in kb.instances_of("AssessmentDecision").unwrap_or_default() {
        decisions.push(decision_entry(result, &name, bands)?);
    }
    Ok(CDAReport { scenario: scenario.to_string(), inference_steps: result.steps.len(), decisions })
}

fn decision_entry(result: &SaturationResult, name: &EntityName, bands: &BandConfig) -> Result<DecisionEntry, MetricsError> {
    let kb = &result.kb_after;
    let metrics = extract_metrics(kb, name.as_str())?;
    let mut refs: BTreeSet<StepId> = BTreeSet::new();
    let mut cite = |fact: Fact| {
        if let Some(&s) = result.derivations.get(&fact) {
            refs.insert(s);
        }
    };

    let collateral_risk_flag = kb.is_instance(name.as_str(), "Effect");
    if let Some((via, _)) = kb.membership_witness(name.as_str(), "Effect") {
        cite(Fact::Membership { individual: name.clone(), class: via.clone() });
    }

    let mut mitigations = Vec::new();
    for link in kb.links(name.as_str(), "hasAssessmentDecision") {
        if let Some((via, _)) = kb.membership_witness(link.object.as_str(), "CDMitigationMethod") {
            mitigations.push(link.object.clone());
            cite(Fact::Link(link.clone()));
            cite(Fact::Membership { individual: link.object.clone(), class: via.clone() });
        }
    }

    let engagements: Vec<EntityName> = kb
        .links(name.as_str(), "isAssessedBy")
        .filter(|l| kb.is_instance(l.object.as_str(), "TargetEngagement"))
        .map(|l| l.object.clone())
        .collect();
    let mut escalated = false;
    let mut effects: BTreeSet<EntityName> = BTreeSet::new();
    for eng in &engagements {
        if let Some((via, _)) = kb.membership_witness(eng.as_str(), "EscalatedRiskEngagement") {
            escalated = true;
            cite(Fact::Membership { individual: eng.clone(), class: via.clone() });
        }
        effects.extend(kb.links(eng.as_str(), "isProducingEffect").map(|l| l.object.clone()));
    }
    let effects = effects
        .into_iter()
        .filter_map(|e| {
            let ind = kb.individual(e.as_str())?;
            let alteration_level = kb.data_values(e.as_str(), "hasCivilianDataAlterationLevel").next().map(|a| match &a.value {
                Value::Enum { member, .. } => member.to_string(),
                v => v.to_string(),
            });
            Some(EffectEntry { individual: e, classes: ind.classes().cloned().collect::<BTreeSet<_>>().into_iter().collect(), alteration_level })
        })
        .collect();

    let raw_severity = metrics.severity.as_ref().map(|c| c.value);
    let reported_severity = raw_severity.map(|s| if escalated { promote_severity(s) } else { s });
    let likelihood = metrics.likelihood.as_ref().map(|c| c.value);
    let likelihood_band = likelihood.map(|p| likelihood_band(p, bands)).transpose()?;

    let audit_refs: Vec<StepId> = refs.into_iter().collect();
    let triggered_rules: Vec<String> = audit_refs
        .iter()
        .filter_map(|id| result.step(*id).map(|s| s.rule.clone()))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    Ok(DecisionEntry {
        decision: name.clone(),
        engagements,
        collateral_risk_flag,
        mitigation_required: !mitigations.is_empty(),
        mitigations,
        escalated,
        raw_severity,
        reported_severity,
        likelihood,
        likelihood_band,
        metrics,
        effects,
        triggered_rules,
        audit_refs,
        proofs: None,
    })
}

/// Fills in each entry's proof trees for the flags that are set.
pub fn attach_proofs(report: &mut CDAReport, result: &SaturationResult) -> Result<(), crate::reasoner::ReasonError> {
    use crate::reasoner::explain;
    let kb = &result.kb_after;
    for entry in &mut report.decisions {
        let mut proofs = std::collections::BTreeMap::new();
        if entry.collateral_risk_flag {
            let fact = Fact::Membership { individual: entry.decision.clone(), class: EntityName::new("Effect").expect("valid name") };
            proofs.insert("collateral_risk_flag".to_string(), explain(result, &fact)?);
        }
        if let Some(m) = entry.mitigations.first() {
            let link = kb.links(entry.decision.as_str(), "hasAssessmentDecision").find(|l| &l.object == m).cloned();
            if let Some(link) = link {
                proofs.insert("mitigation_required".to_string(), explain(result, &Fact::Link(link))?);
            }
        }
        if entry.escalated {
            for eng in &entry.engagements {
                if kb.is_instance(eng.as_str(), "EscalatedRiskEngagement") {
                    let class = EntityName::new("EscalatedRiskEngagement").expect("valid name");
                    let fact = Fact::Membership { individual: eng.clone(), class };
                    proofs.insert("escalated".to_string(), explain(result, &fact)?);
                    break;
                }
            }
        }
        entry.proofs = Some(proofs);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_boundaries() {
        let c = BandConfig::default();
        assert_eq!(likelihood_band(0.81, &c).unwrap(), LikelihoodBand::VeryHigh);
        assert_eq!(likelihood_band(0.0, &c).unwrap(), LikelihoodBand::VeryLow);
        assert_eq!(likelihood_band(0.75, &c).unwrap(), LikelihoodBand::VeryHigh);
        assert_eq!(likelihood_band(0.7499, &c).unwrap(), LikelihoodBand::High);
        assert_eq!(likelihood_band(0.05, &c).unwrap(), LikelihoodBand::Low);
        assert_eq!(likelihood_band(0.25, &c).unwrap(), LikelihoodBand::Medium);
        assert_eq!(likelihood_band(0.5, &c).unwrap(), LikelihoodBand::High);
        assert_eq!(likelihood_band(1.0, &c).unwrap(), LikelihoodBand::VeryHigh);
        assert!(likelihood_band(1.01, &c).is_err());
        assert!(likelihood_band(-0.1, &c).is_err());
        assert!(likelihood_band(f64::NAN, &c).is_err());
    }

    #[test]
    fn band_monotone() {
        let c = BandConfig::default();
        let mut prev = LikelihoodBand::VeryLow;
        for i in 0..=1000 {
            let b = likelihood_band(i as f64 / 1000.0, &c).unwrap();
            assert!(b >= prev);
            prev = b;
        }
    }

    #[test]
    fn band_config_validation() {
        assert!(BandConfig::new([0.1, 0.2, 0.3, 0.4]).is_ok());
        assert!(BandConfig::new([0.2, 0.1, 0.3, 0.4]).is_err());
        assert!(BandConfig::new([0.0, 0.1, 0.3, 0.4]).is_err());
        assert!(BandConfig::new([0.1, 0.2, 0.3, 1.5]).is_err());
    }

    #[test]
    fn promotion() {
        assert_eq!(promote_severity(SeverityLevel::Severe), SeverityLevel::Catastrophic);
        assert_eq!(promote_severity(SeverityLevel::Catastrophic), SeverityLevel::Catastrophic);
        assert_eq!(promote_severity(SeverityLevel::Negligible), SeverityLevel::Minor);
        for l in SeverityLevel::ALL {
            assert!(promote_severity(l) >= l);
            assert_eq!(promote_severity(l) == l, l == SeverityLevel::Catastrophic);
        }
    }

    #[test]
    fn severity_parse() {
        assert_eq!("Moderate".parse::<SeverityLevel>().unwrap(), SeverityLevel::Moderate);
        assert!("severe".parse::<SeverityLevel>().is_err());
    }

    #[test]
    fn no_links_gives_empty_view() {
        let mut kb = crate::seed::seed_kb();
        kb.assert_individual("lonely", &["AssessmentDecision"]).unwrap();
        let v = extract_metrics(&kb, "lonely").unwrap();
        assert!(v.engagement.is_none() && v.temporal.is_none() && v.spatial.is_none());
        assert!(v.severity.is_none() && v.likelihood.is_none() && v.data_quality.is_none());
        assert!(v.force.is_empty() && v.long_term_impact.is_none());
        assert!(matches!(extract_metrics(&kb, "ghost"), Err(MetricsError::UnknownIndividual(_))));
    }

    #[test]
    fn worst_case_selection() {
        let mut kb = crate::seed::seed_kb();
        kb.assert_individual("d", &["AssessmentDecision"]).unwrap();
        for (m, p) in [("l1", 0.3), ("l2", 0.9)] {
            kb.assert_individual(m, &["LikelihoodMetric"]).unwrap();
            kb.assert_data(m, "hasProbability", Value::Double(p)).unwrap();
            kb.assert_object("d", "hasLikelihoodMetric", m).unwrap();
        }
        for (m, s) in [("s1", "Catastrophic"), ("s2", "Minor")] {
            kb.assert_individual(m, &["SeverityMetric"]).unwrap();
            kb.assert_data(m, "hasSeverity", Value::Str(s.into())).unwrap();
            kb.assert_object("d", "hasSeverityMetric", m).unwrap();
        }
        let v = extract_metrics(&kb, "d").unwrap();
        assert_eq!(v.likelihood.unwrap().value, 0.9);
        assert_eq!(v.severity.unwrap().value, SeverityLevel::Catastrophic);
    }

    #[test]
    fn probability_out_of_range() {
        let mut kb = crate::seed::seed_kb();
        kb.assert_individual("d", &["AssessmentDecision"]).unwrap();
        kb.assert_individual("l", &["LikelihoodMetric"]).unwrap();
        kb.assert_data("l", "hasProbability", Value::Double(1.5)).unwrap();
        kb.assert_object("d", "hasLikelihoodMetric", "l").unwrap();
        assert!(matches!(extract_metrics(&kb, "d"), Err(MetricsError::OutOfRange { .. })));
    }

    #[test]
    fn empty_report() {
        let result = crate::reasoner::saturate(crate::seed::seed_kb(), &[]).unwrap();
        let report = compose_report(&result, "empty", &BandConfig::default()).unwrap();
        assert!(report.decisions.is_empty());
    }
}
