//! Report serialization: a human-ordered text form and a canonical JSON form,
//! plus a field-level diff between two reports.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value as Json;

use crate::metrics::{CDAReport, DecisionEntry};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Machine,
}

/// Canonical JSON: object keys sorted, two-space indentation, LF line
/// endings and a trailing newline.
pub fn to_canonical_json<T: Serialize + ?Sized>(value: &T) -> String {
    let json = serde_json::to_value(value).expect("report types serialize");
    let mut out = String::new();
    write_json(&json, 0, &mut out);
    out.push('\n');
    out
}

fn write_json(v: &Json, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Json::Array(items) if items.is_empty() => out.push_str("[]"),
        Json::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_json(item, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Json::Object(map) if map.is_empty() => out.push_str("{}"),
        Json::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&serde_json::to_string(k).expect("string"));
                out.push_str(": ");
                write_json(&map[*k], indent + 1, out);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        scalar => out.push_str(&serde_json::to_string(scalar).expect("scalar")),
    }
}

pub fn write_report(report: &CDAReport, format: Format, color: bool) -> String {
    match format {
        Format::Machine => to_canonical_json(report),
        Format::Text => write_text(report, color),
    }
}

struct Style {
    color: bool,
}

impl Style {
    fn paint(&self, code: &str, s: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{s}\x1b[0m")
        } else {
            s.to_string()
        }
    }

    fn bold(&self, s: &str) -> String {
        self.paint("1", s)
    }

    fn flag(&self, on: bool, yes: &str) -> String {
        if on {
            self.paint("1;31", yes)
        } else {
            self.paint("32", "no")
        }
    }
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_else(|| "-".to_string())
}

fn rules_for(entry: &DecisionEntry, rule: &str) -> String {
    if entry.triggered_rules.iter().any(|r| r == rule) {
        format!("  ({rule})")
    } else {
        String::new()
    }
}

fn write_decision(out: &mut String, e: &DecisionEntry, st: &Style) {
    let row = |out: &mut String, label: &str, value: String| {
        let _ = writeln!(out, "  {label:<18} {value}");
    };
    let _ = writeln!(out, "{}", st.bold(&format!("decision {}", e.decision)));
    let engagements: Vec<String> = e.engagements.iter().map(|x| x.to_string()).collect();
    row(out, "engagements", if engagements.is_empty() { "-".into() } else { engagements.join(", ") });
    row(out, "collateral risk", format!("{}{}", st.flag(e.collateral_risk_flag, "yes"), rules_for(e, "R1")));
    let mitigation = if e.mitigation_required {
        let m: Vec<String> = e.mitigations.iter().map(|x| x.to_string()).collect();
        format!("{} {}", st.flag(true, "required"), m.join(", "))
    } else {
        st.flag(false, "")
    };
    row(out, "mitigation", format!("{mitigation}{}", rules_for(e, "R2")));
    row(out, "escalated", format!("{}{}", st.flag(e.escalated, "yes"), rules_for(e, "R3")));
    row(out, "severity", format!("{} (reported {})", opt(&e.raw_severity), opt(&e.reported_severity)));
    row(out, "likelihood", format!("{} {}", opt(&e.likelihood), opt(&e.likelihood_band)));

    let _ = writeln!(out, "  {}", st.bold("metrics"));
    let m = &e.metrics;
    let cited = |out: &mut String, label: &str, v: Option<(String, String)>| {
        let text = match v {
            Some((value, source)) => format!("{value}  [{source}]"),
            None => "-".into(),
        };
        let _ = writeln!(out, "    {label:<16} {text}");
    };
    cited(out, "temporal", m.temporal.as_ref().map(|c| (c.value.clone(), c.source.to_string())));
    cited(out, "spatial", m.spatial.as_ref().map(|c| (c.value.clone(), c.source.to_string())));
    cited(out, "severity", m.severity.as_ref().map(|c| (c.value.to_string(), c.source.to_string())));
    cited(out, "likelihood", m.likelihood.as_ref().map(|c| (c.source.value.to_string(), c.source.to_string())));
    cited(out, "data quality", m.data_quality.as_ref().map(|c| (c.source.value.to_string(), c.source.to_string())));
    cited(out, "long-term impact", m.long_term_impact.as_ref().map(|c| (c.source.value.to_string(), c.source.to_string())));
    let force: Vec<String> = m
        .force
        .iter()
        .map(|f| format!("{} ({})", f.effect, f.kinds.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(", ")))
        .collect();
    let _ = writeln!(out, "    {:<16} {}", "force", if force.is_empty() { "-".into() } else { force.join("; ") });

    let _ = writeln!(out, "  {}", st.bold("effects"));
    if e.effects.is_empty() {
        let _ = writeln!(out, "    -");
    }
    for eff in &e.effects {
        let classes: Vec<&str> = eff.classes.iter().map(|c| c.as_str()).collect();
        let level = eff.alteration_level.as_ref().map(|l| format!("  alteration level {l}")).unwrap_or_default();
        let _ = writeln!(out, "    {}  {}{}", eff.individual, classes.join(", "), level);
    }
    let steps: Vec<String> = e.audit_refs.iter().map(|s| s.to_string()).collect();
    row(out, "audit chain", if steps.is_empty() { "-".into() } else { format!("steps {}", steps.join(", ")) });

    if let Some(proofs) = &e.proofs {
        for (flag, tree) in proofs {
            let _ = writeln!(out, "  {}", st.bold(&format!("why {flag}")));
            for line in tree.render().lines() {
                let _ = writeln!(out, "    {line}");
            }
        }
    }
}

fn write_text(report: &CDAReport, color: bool) -> String {
    let st = Style { color };
    let mut out = String::new();
    let _ = writeln!(out, "{}", st.bold(&format!("collateral damage assessment: {}", report.scenario)));
    let _ = writeln!(out, "inference steps: {}", report.inference_steps);
    if report.decisions.is_empty() {
        let _ = writeln!(out, "\nno assessment decisions");
    }
    for e in &report.decisions {
        out.push('\n');
        write_decision(&mut out, e, &st);
    }
    out
}

/// One changed leaf between two reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldChange {
    pub path: String,
    pub before: Json,
    pub after: Json,
}

/// Field-level differences. Decisions are matched by name; other lists
/// compare as a whole.
pub fn diff_reports(base: &CDAReport, other: &CDAReport) -> Vec<FieldChange> {
    let a = serde_json::to_value(base).expect("report serializes");
    let b = serde_json::to_value(other).expect("report serializes");
    let mut out = Vec::new();
    diff_json("", &a, &b, &mut out);
    out
}

fn keyed(items: &[Json]) -> Option<Vec<(String, &Json)>> {
    items
        .iter()
        .map(|i| i.get("decision").and_then(Json::as_str).map(|k| (k.to_string(), i)))
        .collect()
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn diff_json(path: &str, a: &Json, b: &Json, out: &mut Vec<FieldChange>) {
    if a == b {
        return;
    }
    match (a, b) {
        (Json::Object(x), Json::Object(y)) => {
            let mut keys: Vec<&String> = x.keys().chain(y.keys()).collect();
            keys.sort();
            keys.dedup();
            for k in keys {
                let p = join(path, k);
                diff_json(&p, x.get(k).unwrap_or(&Json::Null), y.get(k).unwrap_or(&Json::Null), out);
            }
        }
        (Json::Array(x), Json::Array(y)) => match (keyed(x), keyed(y)) {
            (Some(kx), Some(ky)) if !kx.is_empty() || !ky.is_empty() => {
                let mut names: Vec<&String> = kx.iter().chain(ky.iter()).map(|(k, _)| k).collect();
                names.sort();
                names.dedup();
                for name in names {
                    let find = |list: &[(String, &Json)]| list.iter().find(|(k, _)| k == name).map(|(_, v)| (*v).clone());
                    let p = format!("{path}[{name}]");
                    diff_json(&p, &find(&kx).unwrap_or(Json::Null), &find(&ky).unwrap_or(Json::Null), out);
                }
            }
            _ => out.push(FieldChange { path: path.to_string(), before: a.clone(), after: b.clone() }),
        },
        _ => out.push(FieldChange { path: path.to_string(), before: a.clone(), after: b.clone() }),
    }
}

/// Text rendering of a diff, one `path: before -> after` line per change.
pub fn write_diff(changes: &[FieldChange]) -> String {
    if changes.is_empty() {
        return "no changes\n".to_string();
    }
    let mut out = String::new();
    for c in changes {
        let _ = writeln!(out, "{}: {} -> {}", c.path, compact(&c.before), compact(&c.after));
    }
    out
}

fn compact(v: &Json) -> String {
    serde_json::to_string(v).expect("json")
}
