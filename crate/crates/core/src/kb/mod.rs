//! Typed closed-world knowledge base: the `(classes, attributes, relations,
//! individuals)` four-tuple with a subclass DAG, a property schema, ordered
//! enumerations and deduplicated data/object assertions.
//!
//! Classes, properties and individuals live in three separate namespaces.
//! Property names resolve case-insensitively to their declared spelling;
//! class names resolve exactly or through a registered alias.

mod validate;
mod value;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use validate::{Severity, Violation, ViolationKind};
pub use value::{format_double, quote, DataType, Value};

/// A class, property, individual or enumeration name.
///
/// Letters, digits and underscores; must not start with a digit so the rule
/// language can tell names from numbers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct EntityName(String);

impl EntityName {
    pub fn new(text: impl Into<String>) -> Result<Self, KbError> {
        let text = text.into();
        let mut chars = text.chars();
        let ok = match chars.next() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
            }
            _ => false,
        };
        if ok {
            Ok(EntityName(text))
        } else {
            Err(KbError::InvalidName(text))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl std::borrow::Borrow<str> for EntityName {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for EntityName {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EntityName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Namespace {
    Class,
    Property,
    Individual,
    Enum,
}

impl fmt::Display for Namespace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Namespace::Class => "class",
            Namespace::Property => "property",
            Namespace::Individual => "individual",
            Namespace::Enum => "enum",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KbError {
    #[error("`{0}` is not a valid name (letters, digits and underscores, not starting with a digit)")]
    InvalidName(String),
    #[error("{namespace} `{name}` is already declared")]
    DuplicateName { namespace: Namespace, name: String },
    #[error("unknown parent class `{0}`")]
    UnknownParent(String),
    #[error("making `{sub}` a subclass of `{sup}` would create a cycle")]
    CycleDetected { sub: String, sup: String },
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("unknown enumeration `{0}`")]
    UnknownEnum(String),
    #[error("enumeration `{0}` has no members")]
    EmptyEnum(String),
    #[error("enumeration `{enum_name}` lists member `{member}` twice")]
    DuplicateMember { enum_name: String, member: String },
    #[error("individual `{0}` must have at least one class")]
    EmptyClassSet(String),
    #[error("unknown subject `{0}`")]
    UnknownSubject(String),
    #[error("unknown property `{0}`")]
    UnknownProperty(String),
    #[error("unknown individual `{0}`")]
    UnknownName(String),
    #[error("property `{property}` expects {expected}, found {found}")]
    KindMismatch { property: String, expected: String, found: String },
    #[error("`{value}` is not a member of enumeration `{enum_name}`")]
    RangeViolation { enum_name: String, value: String },
    #[error("non-finite double `{0}`")]
    NonFiniteDouble(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PropertyKind {
    Data,
    Object,
}

impl fmt::Display for PropertyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PropertyKind::Data => "data property",
            PropertyKind::Object => "object property",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PropertyRange {
    Data(DataType),
    /// Empty means unconstrained.
    Object(BTreeSet<EntityName>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyDef {
    pub name: EntityName,
    /// Empty means unconstrained.
    pub domain: BTreeSet<EntityName>,
    pub range: PropertyRange,
}

impl PropertyDef {
    pub fn data(name: EntityName, ty: DataType) -> Self {
        PropertyDef { name, domain: BTreeSet::new(), range: PropertyRange::Data(ty) }
    }

    pub fn object(name: EntityName) -> Self {
        PropertyDef {
            name,
            domain: BTreeSet::new(),
            range: PropertyRange::Object(BTreeSet::new()),
        }
    }

    pub fn with_domain(mut self, classes: impl IntoIterator<Item = EntityName>) -> Self {
        self.domain.extend(classes);
        self
    }

    /// Only meaningful for object properties; ignored for data properties.
    pub fn with_range(mut self, classes: impl IntoIterator<Item = EntityName>) -> Self {
        if let PropertyRange::Object(range) = &mut self.range {
            range.extend(classes);
        }
        self
    }

    pub fn kind(&self) -> PropertyKind {
        match self.range {
            PropertyRange::Data(_) => PropertyKind::Data,
            PropertyRange::Object(_) => PropertyKind::Object,
        }
    }

    pub fn data_type(&self) -> Option<&DataType> {
        match &self.range {
            PropertyRange::Data(ty) => Some(ty),
            PropertyRange::Object(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDef {
    pub name: EntityName,
    pub parents: BTreeSet<EntityName>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Individual {
    pub name: EntityName,
    pub asserted_classes: BTreeSet<EntityName>,
    /// Memberships added by rule application.
    pub derived_classes: BTreeSet<EntityName>,
    /// Created by the reasoner to witness an existential rule head.
    pub skolem: bool,
}

impl Individual {
    pub fn classes(&self) -> impl Iterator<Item = &EntityName> {
        self.asserted_classes.iter().chain(self.derived_classes.iter())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct DataAssertion {
    pub subject: EntityName,
    pub property: EntityName,
    pub value: Value,
}

impl fmt::Display for DataAssertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.subject, self.property, self.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ObjectAssertion {
    pub subject: EntityName,
    pub property: EntityName,
    pub object: EntityName,
}

impl fmt::Display for ObjectAssertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.subject, self.property, self.object)
    }
}

/// A ground fact that can be asked about, explained, or traced to a source
/// line.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Fact {
    Membership { individual: EntityName, class: EntityName },
    Link(ObjectAssertion),
    Data(DataAssertion),
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fact::Membership { individual, class } => write!(f, "{individual} : {class}"),
            Fact::Link(link) => write!(f, "{link}"),
            Fact::Data(data) => write!(f, "{data}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KnowledgeBase {
    classes: BTreeMap<EntityName, ClassDef>,
    class_aliases: BTreeMap<String, EntityName>,
    properties: BTreeMap<EntityName, PropertyDef>,
    /// lowercase spelling -> declared spelling
    property_index: BTreeMap<String, EntityName>,
    enums: BTreeMap<EntityName, Vec<EntityName>>,
    individuals: BTreeMap<EntityName, Individual>,
    data_assertions: BTreeSet<DataAssertion>,
    object_assertions: BTreeSet<ObjectAssertion>,
    derived_links: BTreeSet<ObjectAssertion>,
    sources: BTreeMap<Fact, u32>,
}

impl KnowledgeBase {
    pub fn new() -> Self {
        Self::default()
    }

    // ---- schema -------------------------------------------------------

    pub fn declare_class(&mut self, name: &str, parents: &[&str]) -> Result<(), KbError> {
        let name = EntityName::new(name)?;
        if self.classes.contains_key(&name) || self.class_aliases.contains_key(name.as_str()) {
            return Err(KbError::DuplicateName {
                namespace: Namespace::Class,
                name: name.to_string(),
            });
        }
        let mut resolved = BTreeSet::new();
        for parent in parents {
            if *parent == name.as_str() {
                return Err(KbError::CycleDetected { sub: name.to_string(), sup: name.to_string() });
            }
            let parent = self
                .resolve_class(parent)
                .ok_or_else(|| KbError::UnknownParent(parent.to_string()))?;
            resolved.insert(parent.clone());
        }
        self.classes.insert(name.clone(), ClassDef { name, parents: resolved });
        Ok(())
    }

    /// Adds a subclass edge between two existing classes.
    pub fn add_parent(&mut self, sub: &str, sup: &str) -> Result<(), KbError> {
        let sub_name = self.resolve_class(sub).ok_or_else(|| KbError::UnknownClass(sub.into()))?.clone();
        let sup_name = self.resolve_class(sup).ok_or_else(|| KbError::UnknownParent(sup.into()))?.clone();
        if self.ancestors(sup_name.as_str()).contains(&sub_name) {
            return Err(KbError::CycleDetected { sub: sub_name.to_string(), sup: sup_name.to_string() });
        }
        if let Some(def) = self.classes.get_mut(&sub_name) {
            def.parents.insert(sup_name);
        }
        Ok(())
    }

    /// Registers an alternative spelling accepted wherever a class name is
    /// resolved.
    pub fn add_class_alias(&mut self, alias: &str, target: &str) -> Result<(), KbError> {
        let alias_name = EntityName::new(alias)?;
        if self.classes.contains_key(&alias_name) {
            return Err(KbError::DuplicateName { namespace: Namespace::Class, name: alias.into() });
        }
        let target = self.resolve_class(target).ok_or_else(|| KbError::UnknownClass(target.into()))?.clone();
        self.class_aliases.insert(alias.to_string(), target);
        Ok(())
    }

    pub fn declare_enum(&mut self, name: &str, members: &[&str]) -> Result<(), KbError> {
        let name = EntityName::new(name)?;
        if self.enums.contains_key(&name) || DataType::primitive(name.as_str()).is_some() {
            return Err(KbError::DuplicateName { namespace: Namespace::Enum, name: name.to_string() });
        }
        if members.is_empty() {
            return Err(KbError::EmptyEnum(name.to_string()));
        }
        let mut list: Vec<EntityName> = Vec::with_capacity(members.len());
        for member in members {
            let member = EntityName::new(*member)?;
            if list.contains(&member) {
                return Err(KbError::DuplicateMember {
                    enum_name: name.to_string(),
                    member: member.to_string(),
                });
            }
            list.push(member);
        }
        self.enums.insert(name, list);
        Ok(())
    }

    pub fn declare_property(&mut self, def: PropertyDef) -> Result<(), KbError> {
        let key = def.name.as_str().to_ascii_lowercase();
        if self.property_index.contains_key(&key) {
            return Err(KbError::DuplicateName {
                namespace: Namespace::Property,
                name: def.name.to_string(),
            });
        }
        let mut def = def;
        def.domain = self.resolve_class_set(&def.domain)?;
        match &mut def.range {
            PropertyRange::Data(DataType::Enum(e)) => {
                if !self.enums.contains_key(e) {
                    return Err(KbError::UnknownEnum(e.to_string()));
                }
            }
            PropertyRange::Data(_) => {}
            PropertyRange::Object(range) => {
                *range = self.resolve_class_set(range)?;
            }
        }
        self.property_index.insert(key, def.name.clone());
        self.properties.insert(def.name.clone(), def);
        Ok(())
    }

    fn resolve_class_set(&self, set: &BTreeSet<EntityName>) -> Result<BTreeSet<EntityName>, KbError> {
        set.iter()
            .map(|c| {
                self.resolve_class(c.as_str())
                    .cloned()
                    .ok_or_else(|| KbError::UnknownClass(c.to_string()))
            })
            .collect()
    }

    // ---- individuals and assertions ------------------------------------

    pub fn assert_individual(&mut self, name: &str, classes: &[&str]) -> Result<(), KbError> {
        let name = EntityName::new(name)?;
        if classes.is_empty() {
            return Err(KbError::EmptyClassSet(name.to_string()));
        }
        let mut asserted = BTreeSet::new();
        for class in classes {
            let class = self.resolve_class(class).ok_or_else(|| KbError::UnknownClass(class.to_string()))?;
            asserted.insert(class.clone());
        }
        if self.individuals.contains_key(&name) {
            return Err(KbError::DuplicateName {
                namespace: Namespace::Individual,
                name: name.to_string(),
            });
        }
        self.individuals.insert(
            name.clone(),
            Individual { name, asserted_classes: asserted, derived_classes: BTreeSet::new(), skolem: false },
        );
        Ok(())
    }

    /// Checks `value` against the property's range and stores the assertion.
    /// An `Int` is widened when the property is double-ranged. Repeated
    /// assertions are no-ops.
    pub fn assert_data(&mut self, subject: &str, property: &str, value: Value) -> Result<DataAssertion, KbError> {
        let subject = self.individual_name(subject).ok_or_else(|| KbError::UnknownSubject(subject.into()))?;
        let def = self.resolve_property(property).ok_or_else(|| KbError::UnknownProperty(property.into()))?;
        let ty = match &def.range {
            PropertyRange::Data(ty) => ty,
            PropertyRange::Object(_) => {
                return Err(KbError::KindMismatch {
                    property: def.name.to_string(),
                    expected: "an individual (object property)".into(),
                    found: format!("a {} value", value.kind_name()),
                })
            }
        };
        let value = self.coerce_value(&def.name, ty, value)?;
        let assertion = DataAssertion { subject, property: def.name.clone(), value };
        self.data_assertions.insert(assertion.clone());
        Ok(assertion)
    }

    /// Converts `value` into the kind required by `ty`, or explains why not.
    pub fn coerce_value(&self, property: &EntityName, ty: &DataType, value: Value) -> Result<Value, KbError> {
        let mismatch = |value: &Value| KbError::KindMismatch {
            property: property.to_string(),
            expected: ty.to_string(),
            found: value.kind_name(),
        };
        match (ty, value) {
            (DataType::Double, Value::Double(d)) => Value::double(d),
            (DataType::Double, Value::Int(i)) => Value::double(i as f64),
            (DataType::Enum(e), Value::Enum { enum_name, member }) if &enum_name == e => {
                self.enum_member(e, member.as_str())
            }
            (DataType::Enum(e), Value::Str(s)) => self.enum_member(e, &s),
            (ty, value) if value.matches(ty) => Ok(value),
            (_, value) => Err(mismatch(&value)),
        }
    }

    fn enum_member(&self, enum_name: &EntityName, member: &str) -> Result<Value, KbError> {
        let members = self.enums.get(enum_name).ok_or_else(|| KbError::UnknownEnum(enum_name.to_string()))?;
        match members.iter().find(|m| m.as_str() == member) {
            Some(m) => Ok(Value::Enum { enum_name: enum_name.clone(), member: m.clone() }),
            None => Err(KbError::RangeViolation { enum_name: enum_name.to_string(), value: member.into() }),
        }
    }

    pub fn assert_object(&mut self, subject: &str, property: &str, object: &str) -> Result<ObjectAssertion, KbError> {
        let def = self.resolve_property(property).ok_or_else(|| KbError::UnknownProperty(property.into()))?;
        if def.kind() != PropertyKind::Object {
            return Err(KbError::KindMismatch {
                property: def.name.to_string(),
                expected: def.data_type().map(|t| format!("a {t} value")).unwrap_or_default(),
                found: "an individual".into(),
            });
        }
        let property = def.name.clone();
        let subject = self.individual_name(subject).ok_or_else(|| KbError::UnknownName(subject.into()))?;
        let object = self.individual_name(object).ok_or_else(|| KbError::UnknownName(object.into()))?;
        let assertion = ObjectAssertion { subject, property, object };
        self.object_assertions.insert(assertion.clone());
        Ok(assertion)
    }

    /// Removes every data assertion for `(subject, property)`.
    pub fn retract_data(&mut self, subject: &str, property: &str) -> usize {
        let Some(def) = self.resolve_property(property) else { return 0 };
        let property = def.name.clone();
        let doomed: Vec<DataAssertion> = self
            .data_assertions
            .iter()
            .filter(|a| a.subject.as_str() == subject && a.property == property)
            .cloned()
            .collect();
        for a in &doomed {
            self.data_assertions.remove(a);
            self.sources.remove(&Fact::Data(a.clone()));
        }
        doomed.len()
    }

    /// Records the scenario line an asserted fact came from. The first
    /// recorded line wins.
    pub fn record_source(&mut self, fact: Fact, line: u32) {
        self.sources.entry(fact).or_insert(line);
    }

    pub fn source_line(&self, fact: &Fact) -> Option<u32> {
        self.sources.get(fact).copied()
    }

    // ---- reasoner hooks -------------------------------------------------

    /// Returns false when the membership was already derived.
    pub(crate) fn add_derived_class(&mut self, individual: &EntityName, class: &EntityName) -> bool {
        match self.individuals.get_mut(individual) {
            Some(ind) => ind.derived_classes.insert(class.clone()),
            None => false,
        }
    }

    pub(crate) fn add_derived_link(&mut self, link: ObjectAssertion) -> bool {
        let fresh = self.object_assertions.insert(link.clone());
        if fresh {
            self.derived_links.insert(link);
        }
        fresh
    }

    pub(crate) fn create_skolem(&mut self, name: &EntityName, class: &EntityName) -> bool {
        if self.individuals.contains_key(name) {
            return false;
        }
        let mut derived = BTreeSet::new();
        derived.insert(class.clone());
        self.individuals.insert(
            name.clone(),
            Individual { name: name.clone(), asserted_classes: BTreeSet::new(), derived_classes: derived, skolem: true },
        );
        true
    }

    // ---- queries --------------------------------------------------------

    pub fn class(&self, name: &str) -> Option<&ClassDef> {
        self.resolve_class(name).and_then(|n| self.classes.get(n))
    }

    pub fn classes(&self) -> impl Iterator<Item = &ClassDef> {
        self.classes.values()
    }

    pub fn class_aliases(&self) -> impl Iterator<Item = (&str, &EntityName)> {
        self.class_aliases.iter().map(|(a, t)| (a.as_str(), t))
    }

    /// Exact name or registered alias.
    pub fn resolve_class(&self, name: &str) -> Option<&EntityName> {
        self.classes
            .get_key_value(name)
            .map(|(k, _)| k)
            .or_else(|| self.class_aliases.get(name))
    }

    /// Case-insensitive lookup returning the declared definition.
    pub fn resolve_property(&self, name: &str) -> Option<&PropertyDef> {
        self.properties.get(name).or_else(|| {
            self.property_index
                .get(&name.to_ascii_lowercase())
                .and_then(|n| self.properties.get(n))
        })
    }

    pub fn properties(&self) -> impl Iterator<Item = &PropertyDef> {
        self.properties.values()
    }

    pub fn enums(&self) -> impl Iterator<Item = (&EntityName, &[EntityName])> {
        self.enums.iter().map(|(k, v)| (k, v.as_slice()))
    }

    pub fn enum_members(&self, name: &str) -> Option<&[EntityName]> {
        self.enums.get(name).map(Vec::as_slice)
    }

    /// Position of `member` in the declared order of `enum_name`.
    pub fn enum_rank(&self, enum_name: &str, member: &str) -> Option<usize> {
        self.enums.get(enum_name)?.iter().position(|m| m.as_str() == member)
    }

    pub fn individual(&self, name: &str) -> Option<&Individual> {
        self.individuals.get(name)
    }

    fn individual_name(&self, name: &str) -> Option<EntityName> {
        self.individuals.get_key_value(name).map(|(k, _)| k.clone())
    }

    pub fn individuals(&self) -> impl Iterator<Item = &Individual> {
        self.individuals.values()
    }

    pub fn data_assertions(&self) -> impl Iterator<Item = &DataAssertion> {
        self.data_assertions.iter()
    }

    pub fn object_assertions(&self) -> impl Iterator<Item = &ObjectAssertion> {
        self.object_assertions.iter()
    }

    pub fn is_derived_link(&self, link: &ObjectAssertion) -> bool {
        self.derived_links.contains(link)
    }

    pub fn has_data(&self, assertion: &DataAssertion) -> bool {
        self.data_assertions.contains(assertion)
    }

    pub fn has_link(&self, link: &ObjectAssertion) -> bool {
        self.object_assertions.contains(link)
    }

    /// Data values asserted for `(subject, property)` in storage order.
    pub fn data_values<'a>(&'a self, subject: &'a str, property: &'a str) -> impl Iterator<Item = &'a DataAssertion> + 'a {
        self.data_assertions
            .iter()
            .skip_while(move |a| (a.subject.as_str(), a.property.as_str()) < (subject, property))
            .take_while(move |a| a.subject.as_str() == subject && a.property.as_str() == property)
    }

    /// Object links `(subject, property, _)` ordered by object name.
    pub fn links<'a>(&'a self, subject: &'a str, property: &'a str) -> impl Iterator<Item = &'a ObjectAssertion> + 'a {
        self.object_assertions
            .iter()
            .skip_while(move |a| (a.subject.as_str(), a.property.as_str()) < (subject, property))
            .take_while(move |a| a.subject.as_str() == subject && a.property.as_str() == property)
    }

    /// Reflexive-transitive superclasses of `class`.
    pub fn ancestors(&self, class: &str) -> BTreeSet<EntityName> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<&EntityName> = self.resolve_class(class).into_iter().collect();
        while let Some(c) = stack.pop() {
            if seen.insert(c.clone()) {
                if let Some(def) = self.classes.get(c) {
                    stack.extend(def.parents.iter());
                }
            }
        }
        seen
    }

    pub fn is_subclass_of(&self, sub: &str, sup: &str) -> Result<bool, KbError> {
        let sub = self.resolve_class(sub).ok_or_else(|| KbError::UnknownClass(sub.into()))?;
        let sup = self.resolve_class(sup).ok_or_else(|| KbError::UnknownClass(sup.into()))?;
        Ok(self.ancestors(sub.as_str()).contains(sup))
    }

    /// All classes the individual belongs to, closed under superclasses.
    pub fn types_of(&self, individual: &str) -> BTreeSet<EntityName> {
        let mut out = BTreeSet::new();
        if let Some(ind) = self.individuals.get(individual) {
            for c in ind.classes() {
                out.extend(self.ancestors(c.as_str()));
            }
        }
        out
    }

    /// The asserted or derived class of `individual` that makes it a member of
    /// `class`, preferring an exact match, then asserted classes.
    pub fn membership_witness(&self, individual: &str, class: &str) -> Option<(&EntityName, bool)> {
        let ind = self.individuals.get(individual)?;
        let target = self.resolve_class(class)?;
        let direct = ind
            .asserted_classes
            .get(target)
            .map(|c| (c, true))
            .or_else(|| ind.derived_classes.get(target).map(|c| (c, false)));
        direct.or_else(|| {
            ind.asserted_classes
                .iter()
                .map(|c| (c, true))
                .chain(ind.derived_classes.iter().map(|c| (c, false)))
                .find(|(c, _)| self.ancestors(c.as_str()).contains(target))
        })
    }

    pub fn is_instance(&self, individual: &str, class: &str) -> bool {
        self.membership_witness(individual, class).is_some()
    }

    /// The fact spelled `x : C`, `s p o` or `s p value`, if it holds.
    pub fn find_fact(&self, spelled: &str) -> Option<Fact> {
        let norm = spelled.split_whitespace().collect::<Vec<_>>().join(" ");
        if let Some((ind, class)) = norm.split_once(':') {
            if let (Ok(ind), Ok(class)) = (EntityName::new(ind.trim()), EntityName::new(class.trim())) {
                let individual = self.individual(ind.as_str())?.name.clone();
                let class = self.resolve_class(class.as_str())?.clone();
                return self.is_instance(individual.as_str(), class.as_str()).then_some(Fact::Membership { individual, class });
            }
        }
        self.object_assertions()
            .find(|l| l.to_string() == norm)
            .map(|l| Fact::Link(l.clone()))
            .or_else(|| self.data_assertions().find(|d| d.to_string() == norm).map(|d| Fact::Data(d.clone())))
    }

    pub fn instances_of(&self, class: &str) -> Result<BTreeSet<EntityName>, KbError> {
        let class = self.resolve_class(class).ok_or_else(|| KbError::UnknownClass(class.into()))?;
        Ok(self
            .individuals
            .keys()
            .filter(|i| self.is_instance(i.as_str(), class.as_str()))
            .cloned()
            .collect())
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate::validate(self)
    }

    #[cfg(test)]
    pub(crate) fn classes_mut(&mut self) -> &mut BTreeMap<EntityName, ClassDef> {
        &mut self.classes
    }
}
