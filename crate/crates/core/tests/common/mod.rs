//! Random knowledge bases, expressions and syntax trees, and an independent
//! set-based evaluator used as the reference for instance checking.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use cdaimo_core::dsl::{bind, bind_axiom, is_keyword, Axiom, BoundAxiom, BoundExpr, BoundFacet, ClassExpr, FacetKind, Literal};
use cdaimo_core::kb::{DataType, EntityName, KnowledgeBase, PropertyDef, PropertyRange, Value};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn n(s: &str) -> EntityName {
    EntityName::new(s).unwrap()
}

const ENUM_MEMBERS: [&str; 4] = ["lo", "mid", "hi", "top"];

/// A random schema and population: up to `max_individuals` individuals and
/// up to `max_properties` properties.
pub fn random_kb(rng: &mut StdRng, max_individuals: usize, max_properties: usize) -> KnowledgeBase {
    let mut kb = KnowledgeBase::new();
    let class_count = rng.gen_range(2..=8);
    let classes: Vec<String> = (0..class_count).map(|i| format!("C{i}")).collect();
    for (i, c) in classes.iter().enumerate() {
        let mut parents = Vec::new();
        for p in &classes[..i] {
            if rng.gen_bool(0.25) {
                parents.push(p.as_str());
            }
        }
        kb.declare_class(c, &parents).unwrap();
    }
    kb.declare_enum("Level", &ENUM_MEMBERS).unwrap();

    let prop_count = rng.gen_range(1..=max_properties.max(1));
    let types = [DataType::Int, DataType::Double, DataType::Bool, DataType::Enum(n("Level"))];
    for i in 0..prop_count {
        if rng.gen_bool(0.5) {
            kb.declare_property(PropertyDef::object(n(&format!("o{i}")))).unwrap();
        } else {
            let ty = types.choose(rng).unwrap().clone();
            kb.declare_property(PropertyDef::data(n(&format!("d{i}")), ty)).unwrap();
        }
    }

    let ind_count = rng.gen_range(1..=max_individuals.max(1));
    let inds: Vec<String> = (0..ind_count).map(|i| format!("i{i}")).collect();
    for ind in &inds {
        let k = rng.gen_range(1..=2);
        let cs: Vec<&str> = classes.choose_multiple(rng, k).map(String::as_str).collect();
        kb.assert_individual(ind, &cs).unwrap();
    }
    let props: Vec<PropertyDef> = kb.properties().cloned().collect();
    let assertions = rng.gen_range(0..=ind_count * 3);
    for _ in 0..assertions {
        let s = inds.choose(rng).unwrap();
        let p = props.choose(rng).unwrap();
        match &p.range {
            PropertyRange::Object(_) => {
                let o = inds.choose(rng).unwrap();
                kb.assert_object(s, p.name.as_str(), o).unwrap();
            }
            PropertyRange::Data(ty) => {
                let v = random_value(rng, ty);
                kb.assert_data(s, p.name.as_str(), v).unwrap();
            }
        }
    }
    kb
}

fn random_value(rng: &mut StdRng, ty: &DataType) -> Value {
    match ty {
        DataType::Int => Value::Int(rng.gen_range(-3..=3)),
        DataType::Double => Value::Double([0.0, 0.25, 0.5, 0.75, 1.0][rng.gen_range(0..5)]),
        DataType::Bool => Value::Bool(rng.gen()),
        DataType::Enum(e) => Value::Enum { enum_name: e.clone(), member: n(ENUM_MEMBERS.choose(rng).unwrap()) },
        DataType::String => Value::Str(["a", "b"].choose(rng).unwrap().to_string()),
    }
}

fn random_literal_for(rng: &mut StdRng, ty: &DataType) -> Literal {
    match ty {
        DataType::Int => Literal::Int(rng.gen_range(-3..=3)),
        // ints are widened when bound against double properties
        DataType::Double if rng.gen_bool(0.2) => Literal::Int(rng.gen_range(0..=1)),
        DataType::Double => Literal::Double([0.0, 0.25, 0.5, 0.6, 0.75, 1.0][rng.gen_range(0..6)]),
        DataType::Bool => Literal::Bool(rng.gen()),
        DataType::Enum(_) if rng.gen_bool(0.5) => Literal::Symbol(ENUM_MEMBERS.choose(rng).unwrap().to_string()),
        DataType::Enum(_) => Literal::Str(ENUM_MEMBERS.choose(rng).unwrap().to_string()),
        DataType::String => Literal::Str("a".into()),
    }
}

/// A random class expression over the knowledge base's names, at most
/// `depth` levels deep.
pub fn random_expr(rng: &mut StdRng, kb: &KnowledgeBase, depth: usize) -> ClassExpr {
    let classes: Vec<String> = kb.classes().map(|c| c.name.to_string()).collect();
    let props: Vec<PropertyDef> = kb.properties().cloned().collect();
    let choice = if depth <= 1 { rng.gen_range(0..2) } else { rng.gen_range(0..4) };
    match choice {
        0 => ClassExpr::named(classes.choose(rng).unwrap().as_str()),
        1 => {
            let data: Vec<&PropertyDef> = props.iter().filter(|p| p.data_type().is_some()).collect();
            let Some(p) = data.choose(rng) else {
                return ClassExpr::named(classes.choose(rng).unwrap().as_str());
            };
            let ty = p.data_type().unwrap();
            let kinds: &[FacetKind] = if ty.is_ordered() {
                &[FacetKind::Min, FacetKind::Max, FacetKind::Value]
            } else {
                &[FacetKind::Value]
            };
            ClassExpr::facet(p.name.as_str(), *kinds.choose(rng).unwrap(), random_literal_for(rng, ty))
        }
        2 => {
            let objects: Vec<&PropertyDef> = props.iter().filter(|p| p.data_type().is_none()).collect();
            let Some(p) = objects.choose(rng) else {
                return ClassExpr::named(classes.choose(rng).unwrap().as_str());
            };
            ClassExpr::some(p.name.as_str(), random_expr(rng, kb, depth - 1))
        }
        _ => {
            let k = rng.gen_range(2..=3);
            ClassExpr::and((0..k).map(|_| random_expr(rng, kb, depth - 1)))
        }
    }
}

pub fn random_bound_expr(rng: &mut StdRng, kb: &KnowledgeBase, depth: usize) -> BoundExpr {
    let e = random_expr(rng, kb, depth);
    assert!(e.depth() <= depth);
    bind(kb, &e).unwrap_or_else(|errs| panic!("generated expression does not bind: {errs:?}"))
}

/// A random axiom whose head the reasoner can materialize.
pub fn random_axiom(rng: &mut StdRng, kb: &KnowledgeBase, depth: usize) -> BoundAxiom {
    let lhs = random_expr(rng, kb, depth);
    let classes: Vec<String> = kb.classes().map(|c| c.name.to_string()).collect();
    let objects: Vec<String> = kb.properties().filter(|p| p.data_type().is_none()).map(|p| p.name.to_string()).collect();
    let head_class = classes.choose(rng).unwrap().clone();
    let rhs = match objects.choose(rng) {
        Some(p) if rng.gen_bool(0.35) => ClassExpr::some(p.as_str(), ClassExpr::named(head_class.as_str())),
        _ => ClassExpr::named(head_class.as_str()),
    };
    bind_axiom(kb, &Axiom { lhs, rhs }).unwrap()
}

pub fn random_axioms(rng: &mut StdRng, kb: &KnowledgeBase, count: usize) -> Vec<(String, BoundAxiom)> {
    (0..count).map(|i| (format!("A{i}"), random_axiom(rng, kb, 3))).collect()
}

// ---- syntax trees with arbitrary names ---------------------------------

fn random_name(rng: &mut StdRng) -> String {
    const FIRST: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_";
    const REST: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_0123456789";
    loop {
        let len = rng.gen_range(1..=8);
        let mut s = String::new();
        s.push(*FIRST.choose(rng).unwrap() as char);
        for _ in 1..len {
            s.push(*REST.choose(rng).unwrap() as char);
        }
        if !is_keyword(&s) {
            return s;
        }
    }
}

fn random_any_literal(rng: &mut StdRng) -> Literal {
    match rng.gen_range(0..5) {
        0 => Literal::Int(rng.gen_range(-1_000_000..=1_000_000)),
        1 => {
            let v: f64 = match rng.gen_range(0..3) {
                0 => rng.gen_range(-1.0..1.0),
                1 => rng.gen_range(-1e6..1e6),
                _ => (rng.gen_range(-100..100) as f64) / 4.0,
            };
            Literal::Double(v)
        }
        2 => Literal::Bool(rng.gen()),
        3 => {
            const CHARS: &[char] = &['a', 'Z', ' ', '"', '\\', '\n', '\t', '#', '(', ')', 'é', '7'];
            let len = rng.gen_range(0..8);
            Literal::Str((0..len).map(|_| *CHARS.choose(rng).unwrap()).collect())
        }
        _ => Literal::Symbol(random_name(rng)),
    }
}

/// A random, already normalized syntax tree (conjunctions flattened).
pub fn random_ast(rng: &mut StdRng, depth: usize) -> ClassExpr {
    let choice = if depth <= 1 { rng.gen_range(0..2) } else { rng.gen_range(0..4) };
    match choice {
        0 => ClassExpr::named(random_name(rng)),
        1 => {
            let kind = *[FacetKind::Min, FacetKind::Max, FacetKind::Value].choose(rng).unwrap();
            ClassExpr::facet(random_name(rng), kind, random_any_literal(rng))
        }
        2 => ClassExpr::some(random_name(rng), random_ast(rng, depth - 1)),
        _ => {
            let k = rng.gen_range(2..=4);
            ClassExpr::and((0..k).map(|_| random_ast(rng, depth - 1)))
        }
    }
}

pub fn random_ast_axiom(rng: &mut StdRng, depth: usize) -> Axiom {
    let lhs = random_ast(rng, depth);
    let rhs = if rng.gen_bool(0.5) {
        ClassExpr::named(random_name(rng))
    } else {
        ClassExpr::some(random_name(rng), ClassExpr::named(random_name(rng)))
    };
    Axiom { lhs, rhs }
}

// ---- reference evaluator -----------------------------------------------

/// Computes the extension of an expression bottom-up over explicit sets,
/// sharing nothing with the reasoner beyond reading the knowledge base.
pub struct Oracle {
    individuals: Vec<EntityName>,
    /// class -> individuals that belong to it, closed under superclasses
    members: BTreeMap<EntityName, BTreeSet<EntityName>>,
    links: BTreeSet<(EntityName, EntityName, EntityName)>,
    data: Vec<(EntityName, EntityName, Value)>,
    enum_order: BTreeMap<EntityName, Vec<EntityName>>,
}

impl Oracle {
    pub fn new(kb: &KnowledgeBase) -> Self {
        let classes: Vec<EntityName> = kb.classes().map(|c| c.name.clone()).collect();
        // transitive closure of the parent relation, by fixpoint
        let mut sup: BTreeMap<EntityName, BTreeSet<EntityName>> = classes
            .iter()
            .map(|c| {
                let mut s: BTreeSet<EntityName> = kb.class(c.as_str()).unwrap().parents.iter().cloned().collect();
                s.insert(c.clone());
                (c.clone(), s)
            })
            .collect();
        loop {
            let mut changed = false;
            for c in &classes {
                let current: Vec<EntityName> = sup[c].iter().cloned().collect();
                for p in current {
                    let extra: Vec<EntityName> = sup.get(&p).map(|s| s.iter().cloned().collect()).unwrap_or_default();
                    for e in extra {
                        changed |= sup.get_mut(c).unwrap().insert(e);
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut members: BTreeMap<EntityName, BTreeSet<EntityName>> =
            classes.iter().map(|c| (c.clone(), BTreeSet::new())).collect();
        let individuals: Vec<EntityName> = kb.individuals().map(|i| i.name.clone()).collect();
        for ind in kb.individuals() {
            for c in ind.asserted_classes.iter().chain(ind.derived_classes.iter()) {
                for s in &sup[c] {
                    members.get_mut(s).unwrap().insert(ind.name.clone());
                }
            }
        }
        Oracle {
            individuals,
            members,
            links: kb.object_assertions().map(|a| (a.subject.clone(), a.property.clone(), a.object.clone())).collect(),
            data: kb.data_assertions().map(|a| (a.subject.clone(), a.property.clone(), a.value.clone())).collect(),
            enum_order: kb.enums().map(|(e, m)| (e.clone(), m.to_vec())).collect(),
        }
    }

    fn satisfies(&self, v: &Value, facet: &BoundFacet) -> bool {
        let key = |v: &Value| -> Option<f64> {
            match v {
                Value::Int(i) => Some(*i as f64),
                Value::Double(d) => Some(*d),
                Value::Bool(b) => Some(*b as u8 as f64),
                Value::Enum { enum_name, member } => {
                    self.enum_order[enum_name].iter().position(|m| m == member).map(|p| p as f64)
                }
                Value::Str(_) => None,
            }
        };
        let bound = facet.value();
        let same_kind = std::mem::discriminant(v) == std::mem::discriminant(bound);
        if !same_kind {
            return false;
        }
        if let (Value::Str(a), Value::Str(b)) = (v, bound) {
            return match facet {
                BoundFacet::Min(_) => a >= b,
                BoundFacet::Max(_) => a <= b,
                BoundFacet::Eq(_) => a == b,
            };
        }
        let (a, b) = (key(v).unwrap(), key(bound).unwrap());
        match facet {
            BoundFacet::Min(_) => a >= b,
            BoundFacet::Max(_) => a <= b,
            BoundFacet::Eq(_) => a == b,
        }
    }

    pub fn extension(&self, e: &BoundExpr) -> BTreeSet<EntityName> {
        match e {
            BoundExpr::Named(c) => self.members.get(c).cloned().unwrap_or_default(),
            BoundExpr::And(parts) => {
                let mut it = parts.iter().map(|p| self.extension(p));
                let first = it.next().unwrap_or_else(|| self.individuals.iter().cloned().collect());
                it.fold(first, |acc, s| acc.intersection(&s).cloned().collect())
            }
            BoundExpr::ObjectSome { property, filler } => {
                let inner = self.extension(filler);
                self.links
                    .iter()
                    .filter(|(_, p, o)| p == property && inner.contains(o))
                    .map(|(s, _, _)| s.clone())
                    .collect()
            }
            BoundExpr::DataSome { property, facet } => self
                .data
                .iter()
                .filter(|(_, p, v)| p == property && self.satisfies(v, facet))
                .map(|(s, _, _)| s.clone())
                .collect(),
        }
    }
}

// ---- property checks shared with the acceptance suite ------------------

use cdaimo_core::dsl::{parse_axiom, parse_expr, render_axiom, render_expr};
use cdaimo_core::kb::Fact;
use cdaimo_core::reasoner::{explain, holds, replay, saturate, FactSource, Justification, SaturationResult};
use rand::SeedableRng;

pub struct Outcome {
    pub cases: usize,
    pub checks: usize,
    /// Checks where the expression held.
    pub positives: usize,
}

fn rng_for(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// `holds` agrees with the set-based evaluator on every individual.
pub fn oracle_equivalence(seed: u64, kbs: usize, exprs_per_kb: usize) -> Result<Outcome, String> {
    let mut rng = rng_for(seed);
    let mut checks = 0;
    let mut positives = 0;
    for case in 0..kbs {
        let mut kb = random_kb(&mut rng, 30, 10);
        // every other case evaluates over derived memberships too
        if case % 2 == 1 {
            let axioms = random_axioms(&mut rng, &kb, 3);
            kb = saturate(kb, &axioms).map_err(|e| e.to_string())?.kb_after;
        }
        let oracle = Oracle::new(&kb);
        for _ in 0..exprs_per_kb {
            let depth = rng.gen_range(1..=4);
            let expr = random_bound_expr(&mut rng, &kb, depth);
            let expected = oracle.extension(&expr);
            for ind in kb.individuals() {
                let got = holds(&kb, ind.name.as_str(), &expr).map_err(|e| e.to_string())?;
                if got != expected.contains(&ind.name) {
                    return Err(format!("case {case}: {} on {} gave {got}", expr, ind.name));
                }
                checks += 1;
                positives += got as usize;
            }
        }
    }
    if positives * 20 < checks {
        return Err(format!("only {positives} of {checks} checks held; generator too weak"));
    }
    Ok(Outcome { cases: kbs, checks, positives })
}

/// parse(render(x)) == x for random trees and axioms.
pub fn parser_round_trip(seed: u64, count: usize) -> Result<Outcome, String> {
    let mut rng = rng_for(seed);
    for i in 0..count {
        let depth = rng.gen_range(1..=5);
        let expr = random_ast(&mut rng, depth);
        let text = render_expr(&expr);
        let back = parse_expr(&text).map_err(|e| format!("case {i}: `{text}`: {e:?}"))?;
        if back != expr {
            return Err(format!("case {i}: `{text}` reparsed as {back:?}"));
        }
        let axiom = random_ast_axiom(&mut rng, depth);
        let text = render_axiom(&axiom);
        let back = parse_axiom(&text).map_err(|e| format!("axiom {i}: `{text}`: {e:?}"))?;
        if back != axiom {
            return Err(format!("axiom {i}: `{text}` reparsed as {back:?}"));
        }
    }
    Ok(Outcome { cases: count, checks: count * 2, positives: 0 })
}

fn saturated(kb: &KnowledgeBase, axioms: &[(String, BoundAxiom)]) -> Result<SaturationResult, String> {
    saturate(kb.clone(), axioms).map_err(|e| e.to_string())
}

fn random_case(rng: &mut StdRng) -> (KnowledgeBase, Vec<(String, BoundAxiom)>) {
    let kb = random_kb(rng, 20, 8);
    let count = rng.gen_range(1..=6);
    let axioms = random_axioms(rng, &kb, count);
    (kb, axioms)
}

/// Saturating a saturated knowledge base changes nothing.
pub fn idempotence(seed: u64, cases: usize) -> Result<Outcome, String> {
    let mut rng = rng_for(seed);
    for i in 0..cases {
        let (kb, axioms) = random_case(&mut rng);
        let once = saturated(&kb, &axioms)?;
        let twice = saturated(&once.kb_after, &axioms)?;
        if !twice.steps.is_empty() || twice.kb_after != once.kb_after {
            return Err(format!("case {i}: second pass made {} steps", twice.steps.len()));
        }
    }
    Ok(Outcome { cases, checks: cases, positives: 0 })
}

/// Adds random assertions over existing and new individuals.
fn extend_kb(rng: &mut StdRng, kb: &KnowledgeBase) -> KnowledgeBase {
    let mut big = kb.clone();
    let classes: Vec<String> = kb.classes().map(|c| c.name.to_string()).collect();
    for j in 0..rng.gen_range(0..=3) {
        let c = classes.choose(rng).unwrap().clone();
        big.assert_individual(&format!("x{j}"), &[c.as_str()]).unwrap();
    }
    let inds: Vec<String> = big.individuals().map(|i| i.name.to_string()).collect();
    let props: Vec<PropertyDef> = big.properties().cloned().collect();
    for _ in 0..rng.gen_range(1..=10) {
        let s = inds.choose(rng).unwrap();
        match rng.gen_range(0..3) {
            0 => {
                let c = classes.choose(rng).unwrap();
                let fresh = format!("y{}", big.individuals().count());
                big.assert_individual(&fresh, &[c.as_str()]).unwrap();
                let o = o_prop(&props);
                if let Some(p) = o {
                    big.assert_object(s, p.as_str(), &fresh).unwrap();
                }
            }
            _ => {
                let p = props.choose(rng).unwrap();
                match &p.range {
                    PropertyRange::Object(_) => {
                        big.assert_object(s, p.name.as_str(), inds.choose(rng).unwrap()).unwrap();
                    }
                    PropertyRange::Data(ty) => {
                        let v = random_value(rng, ty);
                        big.assert_data(s, p.name.as_str(), v).unwrap();
                    }
                }
            }
        }
    }
    big
}

fn o_prop(props: &[PropertyDef]) -> Option<EntityName> {
    props.iter().find(|p| p.data_type().is_none()).map(|p| p.name.clone())
}

/// Every fact derived from a knowledge base is still entailed after more
/// facts are asserted. Witnesses invented for the smaller base only need a
/// counterpart in the larger one with at least the same classes.
pub fn monotonicity(seed: u64, cases: usize) -> Result<Outcome, String> {
    let mut rng = rng_for(seed);
    let mut checks = 0;
    for i in 0..cases {
        let (kb, axioms) = random_case(&mut rng);
        let big_in = extend_kb(&mut rng, &kb);
        let small = saturated(&kb, &axioms)?.kb_after;
        let big = saturated(&big_in, &axioms)?.kb_after;
        let skolem = |name: &EntityName| small.individual(name.as_str()).map(|x| x.skolem).unwrap_or(false);
        for ind in small.individuals().filter(|x| !x.skolem) {
            let have = big.types_of(ind.name.as_str());
            for c in small.types_of(ind.name.as_str()) {
                checks += 1;
                if !have.contains(&c) {
                    return Err(format!("case {i}: lost {} : {c}", ind.name));
                }
            }
        }
        for link in small.object_assertions() {
            checks += 1;
            if !skolem(&link.object) {
                if !big.has_link(link) {
                    return Err(format!("case {i}: lost {link}"));
                }
                continue;
            }
            let need = small.types_of(link.object.as_str());
            let found = big
                .links(link.subject.as_str(), link.property.as_str())
                .any(|l| need.is_subset(&big.types_of(l.object.as_str())));
            if !found {
                return Err(format!("case {i}: no counterpart for {link}"));
            }
        }
    }
    Ok(Outcome { cases, checks, positives: 0 })
}

/// What a knowledge base entails: every membership under the subclass
/// closure, every link and every data value.
pub fn entailed(kb: &KnowledgeBase) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for ind in kb.individuals() {
        for c in kb.types_of(ind.name.as_str()) {
            out.insert(format!("{} : {c}", ind.name));
        }
    }
    out.extend(kb.object_assertions().map(|l| l.to_string()));
    out.extend(kb.data_assertions().map(|d| d.to_string()));
    out
}

/// The saturated knowledge base entails the same facts whatever the axiom
/// order.
pub fn order_invariance(seed: u64, cases: usize, permutations: usize) -> Result<Outcome, String> {
    let mut rng = rng_for(seed);
    for i in 0..cases {
        let (kb, mut axioms) = random_case(&mut rng);
        let reference = entailed(&saturated(&kb, &axioms)?.kb_after);
        for k in 0..permutations {
            axioms.shuffle(&mut rng);
            if entailed(&saturated(&kb, &axioms)?.kb_after) != reference {
                return Err(format!("case {i}: permutation {k} differs"));
            }
        }
    }
    Ok(Outcome { cases, checks: cases * permutations, positives: 0 })
}

/// Replaying the recorded steps on the input reproduces the output.
pub fn replayability(seed: u64, cases: usize) -> Result<Outcome, String> {
    let mut rng = rng_for(seed);
    for i in 0..cases {
        let (kb, axioms) = random_case(&mut rng);
        let result = saturated(&kb, &axioms)?;
        let replayed = replay(&kb, &result.steps).map_err(|e| format!("case {i}: {e}"))?;
        if replayed != result.kb_after {
            return Err(format!("case {i}: replay differs"));
        }
    }
    Ok(Outcome { cases, checks: cases, positives: 0 })
}

/// Explains every derived fact of a result: leaves must be asserted and
/// every derived premise must come from an earlier step.
pub fn audit(result: &SaturationResult) -> Result<usize, String> {
    let mut checked = 0;
    for step in &result.steps {
        for (fact, source) in step.trace.facts() {
            match source {
                FactSource::Derived { step: Some(s) } if *s < step.id => {}
                FactSource::Derived { .. } => return Err(format!("step {} cites {fact} without an earlier step", step.id)),
                FactSource::Asserted { .. } => {
                    if result.derivations.contains_key(&fact) {
                        return Err(format!("step {} cites derived {fact} as asserted", step.id));
                    }
                }
            }
        }
        let fact: Fact = step.fact();
        if result.derivations.get(&fact) != Some(&step.id) {
            return Err(format!("step {} is not the recorded source of {fact}", step.id));
        }
        let tree = explain(result, &fact).map_err(|e| format!("{fact}: {e}"))?;
        for leaf in tree.leaves() {
            if !matches!(leaf.justification, Justification::Asserted { .. }) {
                return Err(format!("{fact}: leaf {} is not asserted", leaf.fact));
            }
            if result.derivations.contains_key(&leaf.fact) {
                return Err(format!("{fact}: leaf {} is derived", leaf.fact));
            }
        }
        checked += 1;
    }
    Ok(checked)
}

pub fn audit_completeness(seed: u64, cases: usize) -> Result<Outcome, String> {
    let mut rng = rng_for(seed);
    let mut checks = 0;
    for i in 0..cases {
        let (kb, axioms) = random_case(&mut rng);
        let result = saturated(&kb, &axioms)?;
        checks += audit(&result).map_err(|e| format!("case {i}: {e}"))?;
    }
    Ok(Outcome { cases, checks, positives: 0 })
}
