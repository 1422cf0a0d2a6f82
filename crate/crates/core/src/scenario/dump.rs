use std::collections::BTreeMap;

use crate::dsl::{render_axiom, BoundAxiom};
use crate::kb::{EntityName, KnowledgeBase, PropertyRange};

use super::format::{format_directive, Directive};

/// Classes ordered so that every parent precedes its children.
fn class_order(kb: &KnowledgeBase) -> Vec<&EntityName> {
    let mut depth: BTreeMap<&EntityName, usize> = BTreeMap::new();
    fn depth_of<'a>(kb: &'a KnowledgeBase, c: &'a EntityName, memo: &mut BTreeMap<&'a EntityName, usize>, guard: usize) -> usize {
        if let Some(d) = memo.get(c) {
            return *d;
        }
        let d = match kb.class(c.as_str()) {
            Some(def) if guard < 1024 => {
                def.parents.iter().map(|p| depth_of(kb, p, memo, guard + 1) + 1).max().unwrap_or(0)
            }
            _ => 0,
        };
        memo.insert(c, d);
        d
    }
    let mut names: Vec<&EntityName> = kb.classes().map(|c| &c.name).collect();
    for n in &names {
        depth_of(kb, n, &mut depth, 0);
    }
    names.sort_by_key(|n| (depth[n], *n));
    names
}

fn names(set: impl IntoIterator<Item = impl ToString>) -> Vec<String> {
    set.into_iter().map(|n| n.to_string()).collect()
}

/// Scenario text for a knowledge base: schema, rules, then individuals and
/// asserted facts. Reasoner output is listed as comments, so the dump loads
/// back into the knowledge base before saturation.
pub fn dump_kb(kb: &KnowledgeBase, id: &str, axioms: &[(String, BoundAxiom)]) -> String {
    let mut out = format!("scenario {id}\n");
    let mut line = |d: Directive| {
        out.push_str(&format_directive(&d));
        out.push('\n');
    };
    for c in class_order(kb) {
        let def = kb.class(c.as_str()).expect("listed class");
        line(Directive::Class { name: c.to_string(), parents: names(&def.parents) });
    }
    for (alias, target) in kb.class_aliases() {
        line(Directive::Alias { alias: alias.to_string(), target: target.to_string() });
    }
    for (name, members) in kb.enums() {
        line(Directive::Enum { name: name.to_string(), members: names(members) });
    }
    for p in kb.properties() {
        if let PropertyRange::Data(ty) = &p.range {
            line(Directive::DataProperty { name: p.name.to_string(), ty: ty.to_string(), domain: names(&p.domain) });
        }
    }
    for p in kb.properties() {
        if let PropertyRange::Object(range) = &p.range {
            line(Directive::ObjectProperty { name: p.name.to_string(), domain: names(&p.domain), range: names(range) });
        }
    }
    for (id, ax) in axioms {
        line(Directive::Axiom { id: id.clone(), axiom: ax.to_axiom() });
    }
    for ind in kb.individuals().filter(|i| !i.skolem) {
        line(Directive::Individual { name: ind.name.to_string(), classes: names(&ind.asserted_classes) });
    }
    for a in kb.data_assertions() {
        out.push_str(&format!("data {} {} {}\n", a.subject, a.property, a.value));
    }
    for a in kb.object_assertions().filter(|a| !kb.is_derived_link(a)) {
        out.push_str(&format!("object {} {} {}\n", a.subject, a.property, a.object));
    }
    let mut derived = Vec::new();
    for ind in kb.individuals() {
        if ind.skolem {
            derived.push(format!("# derived individual {} {}", ind.name, names(&ind.derived_classes).join(" ")));
        } else {
            for c in &ind.derived_classes {
                derived.push(format!("# derived {} : {}", ind.name, c));
            }
        }
    }
    for a in kb.object_assertions().filter(|a| kb.is_derived_link(a)) {
        derived.push(format!("# derived object {} {} {}", a.subject, a.property, a.object));
    }
    for d in derived {
        out.push_str(&d);
        out.push('\n');
    }
    out
}

/// Axiom text as it appears in a dump.
pub fn axiom_line(id: &str, ax: &BoundAxiom) -> String {
    format!("axiom {id} {}", render_axiom(&ax.to_axiom()))
}
