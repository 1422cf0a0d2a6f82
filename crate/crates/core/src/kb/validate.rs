use std::collections::BTreeSet;

use serde::Serialize;

use super::{EntityName, KnowledgeBase, PropertyKind, PropertyRange};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    UnknownClass,
    UnknownProperty,
    UnknownIndividual,
    UnknownEnum,
    Cycle,
    EmptyClassSet,
    KindMismatch,
    RangeViolation,
    DomainWarning,
    RangeWarning,
}

impl ViolationKind {
    pub fn severity(self) -> Severity {
        match self {
            ViolationKind::DomainWarning | ViolationKind::RangeWarning => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub severity: Severity,
    pub names: Vec<String>,
    pub message: String,
}

impl Violation {
    fn new(kind: ViolationKind, names: &[&str], message: String) -> Self {
        Violation {
            kind,
            severity: kind.severity(),
            names: names.iter().map(|s| s.to_string()).collect(),
            message,
        }
    }
}

pub(super) fn validate(kb: &KnowledgeBase) -> Vec<Violation> {
    let mut out = Vec::new();

    for def in kb.classes.values() {
        for parent in &def.parents {
            if !kb.classes.contains_key(parent) {
                out.push(Violation::new(
                    ViolationKind::UnknownClass,
                    &[def.name.as_str(), parent.as_str()],
                    format!("class `{}` names unknown parent `{}`", def.name, parent),
                ));
            }
        }
    }
    if let Some(class) = find_cycle(kb) {
        out.push(Violation::new(
            ViolationKind::Cycle,
            &[class.as_str()],
            format!("class `{class}` lies on a subclass cycle"),
        ));
    }

    for def in kb.properties.values() {
        let mut referenced: Vec<&EntityName> = def.domain.iter().collect();
        match &def.range {
            PropertyRange::Object(range) => referenced.extend(range.iter()),
            PropertyRange::Data(super::DataType::Enum(e)) if !kb.enums.contains_key(e) => {
                out.push(Violation::new(
                    ViolationKind::UnknownEnum,
                    &[def.name.as_str(), e.as_str()],
                    format!("property `{}` ranges over unknown enumeration `{}`", def.name, e),
                ));
            }
            PropertyRange::Data(_) => {}
        }
        for class in referenced {
            if !kb.classes.contains_key(class) {
                out.push(Violation::new(
                    ViolationKind::UnknownClass,
                    &[def.name.as_str(), class.as_str()],
                    format!("property `{}` refers to unknown class `{}`", def.name, class),
                ));
            }
        }
    }

    for ind in kb.individuals.values() {
        if ind.asserted_classes.is_empty() && !ind.skolem {
            out.push(Violation::new(
                ViolationKind::EmptyClassSet,
                &[ind.name.as_str()],
                format!("individual `{}` has no asserted class", ind.name),
            ));
        }
        for class in ind.classes() {
            if !kb.classes.contains_key(class) {
                out.push(Violation::new(
                    ViolationKind::UnknownClass,
                    &[ind.name.as_str(), class.as_str()],
                    format!("individual `{}` is typed with unknown class `{}`", ind.name, class),
                ));
            }
        }
    }

    for a in &kb.data_assertions {
        if !kb.individuals.contains_key(&a.subject) {
            out.push(Violation::new(
                ViolationKind::UnknownIndividual,
                &[a.subject.as_str()],
                format!("data assertion `{a}` has an unknown subject"),
            ));
        }
        let Some(def) = kb.properties.get(&a.property) else {
            out.push(Violation::new(
                ViolationKind::UnknownProperty,
                &[a.property.as_str()],
                format!("data assertion `{a}` uses an unknown property"),
            ));
            continue;
        };
        match def.data_type() {
            None => out.push(Violation::new(
                ViolationKind::KindMismatch,
                &[a.property.as_str()],
                format!("`{}` is an object property but carries a literal value", a.property),
            )),
            Some(ty) if !a.value.matches(ty) => out.push(Violation::new(
                ViolationKind::KindMismatch,
                &[a.property.as_str()],
                format!("`{}` expects {} but holds a {} value", a.property, ty, a.value.kind_name()),
            )),
            Some(super::DataType::Enum(e)) => {
                if let super::Value::Enum { member, .. } = &a.value {
                    if kb.enum_rank(e.as_str(), member.as_str()).is_none() {
                        out.push(Violation::new(
                            ViolationKind::RangeViolation,
                            &[a.property.as_str(), member.as_str()],
                            format!("`{member}` is not a member of `{e}`"),
                        ));
                    }
                }
            }
            Some(_) => {}
        }
        check_domain(kb, &def.domain, &a.subject, &a.property, &mut out);
    }

    for a in &kb.object_assertions {
        for end in [&a.subject, &a.object] {
            if !kb.individuals.contains_key(end) {
                out.push(Violation::new(
                    ViolationKind::UnknownIndividual,
                    &[end.as_str()],
                    format!("object assertion `{a}` refers to unknown individual `{end}`"),
                ));
            }
        }
        let Some(def) = kb.properties.get(&a.property) else {
            out.push(Violation::new(
                ViolationKind::UnknownProperty,
                &[a.property.as_str()],
                format!("object assertion `{a}` uses an unknown property"),
            ));
            continue;
        };
        if def.kind() != PropertyKind::Object {
            out.push(Violation::new(
                ViolationKind::KindMismatch,
                &[a.property.as_str()],
                format!("`{}` is a data property but links two individuals", a.property),
            ));
            continue;
        }
        check_domain(kb, &def.domain, &a.subject, &a.property, &mut out);
        if let PropertyRange::Object(range) = &def.range {
            if !range.is_empty() && !range.iter().any(|c| kb.is_instance(a.object.as_str(), c.as_str())) {
                out.push(Violation::new(
                    ViolationKind::RangeWarning,
                    &[a.object.as_str(), a.property.as_str()],
                    format!(
                        "`{}` is the object of `{}` but is not an instance of {}",
                        a.object,
                        a.property,
                        list(range)
                    ),
                ));
            }
        }
    }

    out
}

fn check_domain(
    kb: &KnowledgeBase,
    domain: &BTreeSet<EntityName>,
    subject: &EntityName,
    property: &EntityName,
    out: &mut Vec<Violation>,
) {
    if domain.is_empty() || !kb.individuals.contains_key(subject) {
        return;
    }
    if !domain.iter().any(|c| kb.is_instance(subject.as_str(), c.as_str())) {
        out.push(Violation::new(
            ViolationKind::DomainWarning,
            &[subject.as_str(), property.as_str()],
            format!("`{subject}` uses `{property}` but is not an instance of {}", list(domain)),
        ));
    }
}

fn list(set: &BTreeSet<EntityName>) -> String {
    set.iter().map(|c| format!("`{c}`")).collect::<Vec<_>>().join(" or ")
}

/// Any class on a directed parent cycle, found by iterative three-colour DFS.
fn find_cycle(kb: &KnowledgeBase) -> Option<EntityName> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }
    let mut marks: std::collections::BTreeMap<&EntityName, Mark> = Default::default();
    for start in kb.classes.keys() {
        if marks.contains_key(start) {
            continue;
        }
        let mut stack: Vec<(&EntityName, Vec<&EntityName>)> = vec![(start, parents(kb, start))];
        marks.insert(start, Mark::Active);
        while let Some((node, pending)) = stack.last_mut() {
            match pending.pop() {
                Some(next) => match marks.get(next) {
                    Some(Mark::Active) => return Some(next.clone()),
                    Some(Mark::Done) => {}
                    None => {
                        marks.insert(next, Mark::Active);
                        let ps = parents(kb, next);
                        stack.push((next, ps));
                    }
                },
                None => {
                    marks.insert(node, Mark::Done);
                    stack.pop();
                }
            }
        }
    }
    None
}

fn parents<'a>(kb: &'a KnowledgeBase, class: &EntityName) -> Vec<&'a EntityName> {
    kb.classes
        .get(class)
        .map(|d| d.parents.iter().filter(|p| kb.classes.contains_key(*p)).collect())
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::super::{EntityName, KnowledgeBase, PropertyDef};
    use super::*;

    fn n(s: &str) -> EntityName {
        EntityName::new(s).unwrap()
    }

    #[test]
    fn domain_warning_on_minimal_kb() {
        let mut kb = KnowledgeBase::new();
        kb.declare_class("Engagement", &[]).unwrap();
        kb.declare_class("System", &[]).unwrap();
        kb.declare_property(
            PropertyDef::object(n("hasTargetAISystem")).with_domain([n("Engagement")]).with_range([n("System")]),
        )
        .unwrap();
        kb.assert_individual("a", &["System"]).unwrap();
        kb.assert_individual("b", &["System"]).unwrap();
        kb.assert_object("a", "hasTargetAISystem", "b").unwrap();
        let v = kb.validate();
        assert_eq!(v.len(), 1, "{v:?}");
        assert_eq!(v[0].kind, ViolationKind::DomainWarning);
        assert_eq!(v[0].severity, Severity::Warning);
        assert_eq!(v[0].names, vec!["a", "hasTargetAISystem"]);
    }

    #[test]
    fn range_warning() {
        let mut kb = KnowledgeBase::new();
        kb.declare_class("System", &[]).unwrap();
        kb.declare_class("Other", &[]).unwrap();
        kb.declare_property(PropertyDef::object(n("p")).with_range([n("System")])).unwrap();
        kb.assert_individual("a", &["Other"]).unwrap();
        kb.assert_object("a", "p", "a").unwrap();
        let v = kb.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::RangeWarning);
    }

    #[test]
    fn dangling_parent_reported() {
        let mut kb = KnowledgeBase::new();
        kb.declare_class("A", &[]).unwrap();
        kb.classes_mut().get_mut("A").unwrap().parents.insert(n("Ghost"));
        let v = kb.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::UnknownClass);
        assert_eq!(v[0].severity, Severity::Error);
    }

    #[test]
    fn injected_cycle_reported() {
        let mut kb = KnowledgeBase::new();
        kb.declare_class("A", &[]).unwrap();
        kb.declare_class("B", &["A"]).unwrap();
        kb.classes_mut().get_mut("A").unwrap().parents.insert(n("B"));
        assert!(kb.validate().iter().any(|v| v.kind == ViolationKind::Cycle));
    }
}
