//! The built-in collateral damage assessment schema and its three rules.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use crate::dsl::{bind_axiom, parse_axiom, Axiom, BoundAxiom};
use crate::kb::{ClassDef, DataType, EntityName, KnowledgeBase, PropertyDef};

pub const UPPER_CLASSES: [&str; 4] = ["TargetAISystem", "MilitaryOperation", "TargetEngagement", "Effect"];

const CLASSES: &[(&str, &[&str])] = &[
    ("TargetAISystem", &[]),
    ("MilitaryOperation", &[]),
    ("TargetEngagement", &[]),
    ("Effect", &[]),
    // AI system types, categories and components
    ("AIDSS", &["TargetAISystem"]),
    ("AIEnabledSystem", &["TargetAISystem"]),
    ("AIEnabledWeaponSystem", &["TargetAISystem"]),
    ("DataDriven", &["TargetAISystem"]),
    ("KnowledgeDriven", &["TargetAISystem"]),
    ("NeuroSymbolic", &["TargetAISystem"]),
    ("Dataset", &["TargetAISystem"]),
    ("Precision", &["TargetAISystem"]),
    ("Rule", &["TargetAISystem"]),
    ("InferenceEngine", &["TargetAISystem"]),
    ("AutonomyLevel", &["TargetAISystem"]),
    // operation context
    ("AssessmentMethod", &["MilitaryOperation"]),
    ("RuleQuality", &["MilitaryOperation"]),
    ("InterpretationClarity", &["MilitaryOperation"]),
    ("OnTarget", &["MilitaryOperation"]),
    // engagement
    ("AttackVector", &["TargetEngagement"]),
    ("EngagementDecision", &["TargetEngagement"]),
    ("CyberAttack", &["TargetEngagement"]),
    ("EWAttack", &["TargetEngagement"]),
    ("PhysicalAttack", &["TargetEngagement"]),
    // effects
    ("MilitaryAdvantage", &["Effect"]),
    ("CollateralDamage", &["Effect"]),
    ("CollateralDamageLevel", &["Effect"]),
    ("CollateralDamageMitigationAction", &["Effect"]),
    ("CivilianPhysicalInjury", &["Effect"]),
    ("CivilianDataDestruction", &["Effect"]),
    ("CivilianDigitalSystemDisruption", &["Effect"]),
    ("CollateralDamageTolerance", &["Effect"]),
    // rule support
    ("AssessmentDecision", &[]),
    ("DecisionMaker", &[]),
    ("RoE", &[]),
    ("ModelPerformance", &[]),
    ("Vulnerability", &[]),
    ("Exploit", &[]),
    ("Connection", &[]),
    ("EngagementMethod", &[]),
    ("DataQualityMetric", &[]),
    ("LikelihoodMetric", &[]),
    ("SeverityMetric", &[]),
    ("TemporalMetric", &[]),
    ("SpatialMetric", &[]),
    ("ForceMetric", &[]),
    ("CDMitigationMethod", &[]),
    ("EscalatedRiskEngagement", &[]),
    // named by hasModelPerformance, unused by the built-in rules
    ("AISystemType", &[]),
    ("AISystemCategory", &[]),
    ("AITechnique", &[]),
];

const CLASS_ALIASES: &[(&str, &str)] = &[("Coonection", "Connection")];

const ENUMS: &[(&str, &[&str])] = &[
    ("SeverityLevel", &["Negligible", "Minor", "Moderate", "Severe", "Catastrophic"]),
    ("SpreadLevel", &["Local", "Regional", "National", "Transnational"]),
    ("DurationBand", &["ShortTerm", "MediumTerm", "LongTerm"]),
    ("LikelihoodBand", &["VeryLow", "Low", "Medium", "High", "VeryHigh"]),
    ("CyberAttackStatus", &["active", "inactive", "disabled"]),
    ("CivilianDataAlterationLevel", &["very_low", "low", "medium", "high"]),
];

/// (name, type, domain)
const DATA_PROPERTIES: &[(&str, &str, &[&str])] = &[
    ("hasAccuracy", "double", &["TargetAISystem"]),
    ("hasAITechnique", "string", &["TargetAISystem"]),
    ("hasDefenseMechanism", "bool", &["TargetAISystem"]),
    ("hasAttackVectorID", "int", &["AttackVector"]),
    ("hasCyberAttackStatus", "CyberAttackStatus", &["CyberAttack"]),
    ("hasCDOnCivilianDigitalSystemInfo", "string", &["CivilianDigitalSystemDisruption"]),
    ("hasCivilianDataAlterationLevel", "CivilianDataAlterationLevel", &["Effect"]),
    ("hasConsistency", "double", &[]),
    ("hasLongTermImpact", "double", &[]),
    ("hasDataQuality", "double", &["DataQualityMetric"]),
    ("hasProbability", "double", &["LikelihoodMetric"]),
    ("hasSeverity", "SeverityLevel", &["SeverityMetric"]),
    ("isSharedWithCivilianInfrastructure", "bool", &["Connection"]),
    ("hasSpread", "SpreadLevel", &["SpatialMetric"]),
    ("hasDuration", "DurationBand", &["TemporalMetric"]),
];

/// (name, domain, range)
const OBJECT_PROPERTIES: &[(&str, &[&str], &[&str])] = &[
    // the rules point it at engagements, the prose at decision makers
    ("isAssessedBy", &[], &[]),
    ("isUsingRoE", &["MilitaryOperation"], &["RoE"]),
    ("hasModelPerformance", &["AITechnique", "AISystemType", "AISystemCategory"], &["ModelPerformance"]),
    ("hasVulnerability", &["TargetAISystem"], &["Vulnerability"]),
    ("isExploitingVulnerability", &["Exploit"], &["Vulnerability"]),
    ("isContributingToCollateralDamage", &["Connection"], &["CollateralDamage"]),
    (
        "isMetricUsedForAssessingEngagement",
        &["SpatialMetric", "TemporalMetric", "ForceMetric", "SeverityMetric"],
        &["EngagementMethod"],
    ),
    ("isProducingEffect", &["TargetEngagement", "MilitaryOperation"], &["Effect"]),
    ("hasTemporalAssessment", &["TargetEngagement"], &["TemporalMetric"]),
    ("hasTargetAISystem", &["TargetEngagement"], &["TargetAISystem"]),
    ("isValidatedBy", &["TargetAISystem"], &[]),
    ("hasLikelihoodMetric", &["AssessmentDecision"], &["LikelihoodMetric"]),
    ("hasSeverityMetric", &["AssessmentDecision"], &["SeverityMetric"]),
    ("hasAssessmentDecision", &["AssessmentDecision"], &[]),
    ("hasConnection", &["TargetAISystem"], &["Connection"]),
    ("hasSpatialAssessment", &["TargetEngagement"], &["SpatialMetric"]),
];

pub const RULE1_TEXT: &str = "AssessmentDecision and (isassessedBy some (TargetEngagement and \
    (hasTargetAISystem some (TargetAISystem and isValidatedBy some (DataQualityMetric and \
    (hasDataQuality max 0.5)))) and (isProducingEffect some CollateralDamage))) SubClassOf Effect";

pub const RULE2_TEXT: &str = "AssessmentDecision and (hasLikelihoodMetric some (LikelihoodMetric \
    and (hasProbability min 0.75))) and (hasSeverityMetric some (SeverityMetric \
    and (hasSeverity value \"Severe\"))) SubClassOf (hasAssessmentDecision some CDMitigationMethod)";

pub const RULE3_TEXT: &str = "TargetEngagement and (hasTargetAISystem some (TargetAISystem and \
    (hasConnection some (Connection and (isSharedWithCivilianInfrastructure value true))))) and \
    (hasSpatialAssessment some (SpatialMetric and (hasSpread min Regional))) SubClassOf EscalatedRiskEngagement";

/// A built-in rule with its parsed axiom.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedAxiom {
    pub id: &'static str,
    pub axiom: Axiom,
    pub note: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedManifest {
    pub classes: Vec<ClassDef>,
    pub aliases: Vec<(&'static str, &'static str)>,
    pub enums: Vec<(&'static str, Vec<&'static str>)>,
    pub properties: Vec<PropertyDef>,
    pub axioms: Vec<SeedAxiom>,
}

fn n(s: &str) -> EntityName {
    EntityName::new(s).expect("seed names are valid")
}

fn names(list: &[&str]) -> BTreeSet<EntityName> {
    list.iter().map(|s| n(s)).collect()
}

pub fn manifest() -> SeedManifest {
    let classes = CLASSES.iter().map(|(c, ps)| ClassDef { name: n(c), parents: names(ps) }).collect();
    let enums = ENUMS.iter().map(|(e, ms)| (*e, ms.to_vec())).collect();
    let mut properties: Vec<PropertyDef> = DATA_PROPERTIES
        .iter()
        .map(|(p, ty, dom)| {
            let ty = DataType::primitive(ty).unwrap_or_else(|| DataType::Enum(n(ty)));
            PropertyDef::data(n(p), ty).with_domain(names(dom))
        })
        .collect();
    properties.extend(
        OBJECT_PROPERTIES
            .iter()
            .map(|(p, dom, range)| PropertyDef::object(n(p)).with_domain(names(dom)).with_range(names(range))),
    );
    SeedManifest {
        classes,
        aliases: CLASS_ALIASES.to_vec(),
        enums,
        properties,
        axioms: builtin_axioms()
            .into_iter()
            .zip([
                "decision tied to an engagement against a system with data quality at most 0.5 that produces collateral damage is an Effect",
                "very likely and severe collateral damage requires a mitigation method",
                "shared civilian infrastructure with at least regional spread escalates the engagement",
            ])
            .map(|((id, axiom), note)| SeedAxiom { id, axiom, note })
            .collect(),
    }
}

/// The three built-in rules, parsed from their source text.
pub fn builtin_axioms() -> Vec<(&'static str, Axiom)> {
    [("R1", RULE1_TEXT), ("R2", RULE2_TEXT), ("R3", RULE3_TEXT)]
        .into_iter()
        .map(|(id, text)| (id, parse_axiom(text).expect("built-in rules parse")))
        .collect()
}

/// The built-in rules bound against [`seed_kb`].
pub fn builtin_bound_axioms() -> &'static [(&'static str, BoundAxiom)] {
    static BOUND: OnceLock<Vec<(&'static str, BoundAxiom)>> = OnceLock::new();
    BOUND.get_or_init(|| {
        let kb = seed_kb();
        builtin_axioms()
            .into_iter()
            .map(|(id, ax)| (id, bind_axiom(&kb, &ax).expect("built-in rules bind against the seed")))
            .collect()
    })
}

fn build(manifest: &SeedManifest) -> KnowledgeBase {
    let mut kb = KnowledgeBase::new();
    for class in &manifest.classes {
        let parents: Vec<&str> = class.parents.iter().map(EntityName::as_str).collect();
        kb.declare_class(class.name.as_str(), &parents).expect("seed class");
    }
    for (alias, target) in &manifest.aliases {
        kb.add_class_alias(alias, target).expect("seed alias");
    }
    for (name, members) in &manifest.enums {
        kb.declare_enum(name, members).expect("seed enum");
    }
    for p in &manifest.properties {
        kb.declare_property(p.clone()).expect("seed property");
    }
    kb
}

/// The schema with no individuals. Cached; every call returns an equal
/// knowledge base.
pub fn seed_kb() -> KnowledgeBase {
    static SEED: OnceLock<KnowledgeBase> = OnceLock::new();
    SEED.get_or_init(|| build(&manifest())).clone()
}
