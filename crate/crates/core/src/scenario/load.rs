use std::collections::BTreeSet;

use serde::Serialize;

use crate::dsl::{bind_axiom, BindErrorKind, BoundAxiom, Literal};
use crate::kb::{
    DataType, EntityName, Fact, KbError, KnowledgeBase, PropertyDef, PropertyRange, Severity, Value, Violation,
    ViolationKind,
};
use crate::metrics::BandConfig;
use crate::seed::{builtin_bound_axioms, seed_kb};

use super::format::{parse_scenario, ConfigDirective, Directive, Positioned, ScenarioDoc};
use super::{ErrorKind, ScenarioError};

/// Properties whose values are probabilities or scores in [0, 1].
const UNIT_INTERVAL: [&str; 2] = ["hasProbability", "hasDataQuality"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub likelihood_bands: BandConfig,
    pub disabled_rules: BTreeSet<String>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig { likelihood_bands: BandConfig::default(), disabled_rules: BTreeSet::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoadWarning {
    pub line: Option<u32>,
    #[serde(flatten)]
    pub violation: Violation,
}

#[derive(Debug, Clone)]
pub struct LoadResult {
    pub id: String,
    pub kb: KnowledgeBase,
    /// Built-in rules that are not disabled, then scenario axioms in order.
    pub axioms: Vec<(String, BoundAxiom)>,
    pub config: ScenarioConfig,
    pub warnings: Vec<LoadWarning>,
}

pub fn load_scenario(text: &str) -> Result<LoadResult, ScenarioError> {
    load_doc(&parse_scenario(text)?)
}

/// Applies the document's directives, in order, on top of the seed.
pub fn load_doc(doc: &ScenarioDoc) -> Result<LoadResult, ScenarioError> {
    let mut loader = Loader {
        kb: seed_kb(),
        scenario_axioms: Vec::new(),
        config: ScenarioConfig::default(),
    };
    for d in &doc.directives {
        loader.apply(d)?;
    }
    let mut axioms: Vec<(String, BoundAxiom)> = builtin_bound_axioms()
        .iter()
        .filter(|(id, _)| !loader.config.disabled_rules.contains(*id))
        .map(|(id, ax)| (id.to_string(), ax.clone()))
        .collect();
    axioms.extend(loader.scenario_axioms);

    let mut warnings = Vec::new();
    for v in loader.kb.validate() {
        let line = locate(doc, &v);
        if v.severity == Severity::Error {
            let (line, column) = line.map(|l| (l, 1)).unwrap_or((1, 1));
            return Err(ScenarioError::new(ErrorKind::Validation, line, column, v.message));
        }
        warnings.push(LoadWarning { line, violation: v });
    }
    Ok(LoadResult { id: doc.id.clone(), kb: loader.kb, axioms, config: loader.config, warnings })
}

fn locate(doc: &ScenarioDoc, v: &Violation) -> Option<u32> {
    let [a, p] = v.names.as_slice() else { return None };
    doc.directives
        .iter()
        .find(|d| match (&d.directive, v.kind) {
            (Directive::Data { subject, property, .. }, ViolationKind::DomainWarning)
            | (Directive::Object { subject, property, .. }, ViolationKind::DomainWarning) => {
                subject == a && property.eq_ignore_ascii_case(p)
            }
            (Directive::Object { object, property, .. }, ViolationKind::RangeWarning) => {
                object == a && property.eq_ignore_ascii_case(p)
            }
            _ => false,
        })
        .map(|d| d.line)
}

struct Loader {
    kb: KnowledgeBase,
    scenario_axioms: Vec<(String, BoundAxiom)>,
    config: ScenarioConfig,
}

fn kb_error(d: &Positioned, e: KbError) -> ScenarioError {
    let (kind, name) = match &e {
        KbError::InvalidName(n) => (ErrorKind::InvalidName, n.as_str()),
        KbError::DuplicateName { name, .. } => (ErrorKind::Duplicate, name.as_str()),
        KbError::UnknownParent(n)
        | KbError::UnknownClass(n)
        | KbError::UnknownEnum(n)
        | KbError::UnknownSubject(n)
        | KbError::UnknownProperty(n)
        | KbError::UnknownName(n) => (ErrorKind::UnknownName, n.as_str()),
        KbError::CycleDetected { sup, .. } => (ErrorKind::Cycle, sup.as_str()),
        KbError::EmptyEnum(n) | KbError::EmptyClassSet(n) => (ErrorKind::Syntax, n.as_str()),
        KbError::DuplicateMember { member, .. } => (ErrorKind::Duplicate, member.as_str()),
        KbError::KindMismatch { property, .. } => (ErrorKind::KindMismatch, property.as_str()),
        KbError::RangeViolation { value, .. } => (ErrorKind::KindMismatch, value.as_str()),
        KbError::NonFiniteDouble(n) => (ErrorKind::OutOfRange, n.as_str()),
    };
    // value errors point at the value token
    let column = match (&e, &d.directive) {
        (KbError::KindMismatch { .. } | KbError::RangeViolation { .. }, Directive::Data { .. }) => d.column(3),
        _ => d.column_of(name),
    };
    ScenarioError::new(kind, d.line, column, e.to_string())
}

fn literal_value(lit: &Literal) -> Value {
    match lit {
        Literal::Int(i) => Value::Int(*i),
        Literal::Double(x) => Value::Double(*x),
        Literal::Bool(b) => Value::Bool(*b),
        Literal::Str(s) | Literal::Symbol(s) => Value::Str(s.clone()),
    }
}

impl Loader {
    fn apply(&mut self, d: &Positioned) -> Result<(), ScenarioError> {
        let err = |e| kb_error(d, e);
        match &d.directive {
            Directive::Class { name, parents } => {
                if let Some(existing) = self.kb.class(name) {
                    let same: Option<BTreeSet<&EntityName>> =
                        parents.iter().map(|p| self.kb.resolve_class(p)).collect();
                    if same == Some(existing.parents.iter().collect()) {
                        return Ok(());
                    }
                }
                let parents: Vec<&str> = parents.iter().map(String::as_str).collect();
                self.kb.declare_class(name, &parents).map_err(err)
            }
            Directive::Alias { alias, target } => {
                let existing = self.kb.class_aliases().find(|(a, _)| a == alias).map(|(_, t)| t.clone());
                if existing.is_some() && existing.as_ref() == self.kb.resolve_class(target) {
                    return Ok(());
                }
                if existing.is_some() {
                    return Err(ScenarioError::new(
                        ErrorKind::Duplicate,
                        d.line,
                        d.column_of(alias),
                        format!("alias `{alias}` is already declared"),
                    ));
                }
                self.kb.add_class_alias(alias, target).map_err(err)
            }
            Directive::Enum { name, members } => {
                if let Some(existing) = self.kb.enum_members(name) {
                    if existing.iter().map(EntityName::as_str).eq(members.iter().map(String::as_str)) {
                        return Ok(());
                    }
                }
                let members: Vec<&str> = members.iter().map(String::as_str).collect();
                self.kb.declare_enum(name, &members).map_err(err)
            }
            Directive::DataProperty { name, ty, domain } => {
                let ty = match DataType::primitive(ty) {
                    Some(t) => t,
                    None if self.kb.enum_members(ty).is_some() => DataType::Enum(EntityName::new(ty.clone()).map_err(err)?),
                    None => return Err(err(KbError::UnknownEnum(ty.clone()))),
                };
                let def = PropertyDef::data(EntityName::new(name.clone()).map_err(err)?, ty)
                    .with_domain(self.class_set(d, domain)?);
                self.declare_property(d, def)
            }
            Directive::ObjectProperty { name, domain, range } => {
                let def = PropertyDef::object(EntityName::new(name.clone()).map_err(err)?)
                    .with_domain(self.class_set(d, domain)?)
                    .with_range(self.class_set(d, range)?);
                self.declare_property(d, def)
            }
            Directive::Individual { name, classes } => {
                let classes: Vec<&str> = classes.iter().map(String::as_str).collect();
                self.kb.assert_individual(name, &classes).map_err(err)?;
                let ind = self.kb.individual(name).expect("just asserted");
                let facts: Vec<Fact> = ind
                    .asserted_classes
                    .iter()
                    .map(|c| Fact::Membership { individual: ind.name.clone(), class: c.clone() })
                    .collect();
                for f in facts {
                    self.kb.record_source(f, d.line);
                }
                Ok(())
            }
            Directive::Data { subject, property, value } => {
                if self.kb.individual(subject).is_none() {
                    return Err(err(KbError::UnknownName(subject.clone())));
                }
                let a = self.kb.assert_data(subject, property, literal_value(value)).map_err(err)?;
                if UNIT_INTERVAL.contains(&a.property.as_str()) {
                    let v = a.value.as_f64().unwrap_or(f64::NAN);
                    if !(0.0..=1.0).contains(&v) {
                        return Err(ScenarioError::new(
                            ErrorKind::OutOfRange,
                            d.line,
                            d.column(3),
                            format!("{} must be within [0, 1], found {}", a.property, a.value),
                        ));
                    }
                }
                self.kb.record_source(Fact::Data(a), d.line);
                Ok(())
            }
            Directive::Object { subject, property, object } => {
                let a = self.kb.assert_object(subject, property, object).map_err(err)?;
                self.kb.record_source(Fact::Link(a), d.line);
                Ok(())
            }
            Directive::Axiom { id, axiom } => {
                let bound = bind_axiom(&self.kb, axiom).map_err(|errors| {
                    let e = &errors[0];
                    let kind = match e.kind {
                        BindErrorKind::UnknownName | BindErrorKind::EnumMemberUnknown => ErrorKind::UnknownName,
                        BindErrorKind::KindMismatch => ErrorKind::KindMismatch,
                        BindErrorKind::IllegalHeadShape => ErrorKind::Syntax,
                    };
                    ScenarioError::new(kind, d.line, d.column_within(2, e.offset), e.message.clone())
                })?;
                if EntityName::new(id.clone()).is_err() {
                    return Err(ScenarioError::new(ErrorKind::InvalidName, d.line, d.column(1), format!("`{id}` is not a valid rule id")));
                }
                let builtin = builtin_bound_axioms().iter().find(|(b, _)| b == id);
                let clash = builtin.map(|(_, ax)| ax != &bound).unwrap_or(false)
                    || self.scenario_axioms.iter().any(|(s, _)| s == id);
                if clash {
                    return Err(ScenarioError::new(
                        ErrorKind::Duplicate,
                        d.line,
                        d.column(1),
                        format!("rule id `{id}` is already in use"),
                    ));
                }
                if builtin.is_none() {
                    self.scenario_axioms.push((id.clone(), bound));
                }
                Ok(())
            }
            Directive::Config(ConfigDirective::LikelihoodBands(cuts)) => {
                self.config.likelihood_bands = BandConfig::new(*cuts)
                    .map_err(|e| ScenarioError::new(ErrorKind::Config, d.line, d.column(2), e.to_string()))?;
                Ok(())
            }
            Directive::Config(ConfigDirective::DisableRule(id)) => {
                if !builtin_bound_axioms().iter().any(|(b, _)| b == id) {
                    return Err(ScenarioError::new(
                        ErrorKind::Config,
                        d.line,
                        d.column(2),
                        format!("`{id}` is not a built-in rule"),
                    ));
                }
                self.config.disabled_rules.insert(id.clone());
                Ok(())
            }
        }
    }

    fn class_set(&self, d: &Positioned, names: &[String]) -> Result<BTreeSet<EntityName>, ScenarioError> {
        names
            .iter()
            .map(|n| {
                self.kb
                    .resolve_class(n)
                    .cloned()
                    .ok_or_else(|| kb_error(d, KbError::UnknownClass(n.clone())))
            })
            .collect()
    }

    fn declare_property(&mut self, d: &Positioned, def: PropertyDef) -> Result<(), ScenarioError> {
        if let Some(existing) = self.kb.resolve_property(def.name.as_str()) {
            let same = existing.name == def.name
                && existing.domain == def.domain
                && match (&existing.range, &def.range) {
                    (PropertyRange::Data(a), PropertyRange::Data(b)) => a == b,
                    (PropertyRange::Object(a), PropertyRange::Object(b)) => a == b,
                    _ => false,
                };
            if same {
                return Ok(());
            }
        }
        self.kb.declare_property(def).map_err(|e| kb_error(d, e))
    }
}
