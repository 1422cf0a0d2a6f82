use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Serialize, Serializer};

use super::{EntityName, KbError};

/// Declared range of a data property.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DataType {
    String,
    Int,
    Double,
    Bool,
    /// An ordered enumeration declared in the knowledge base.
    Enum(EntityName),
}

impl DataType {
    /// Parses the scenario spelling of a primitive type (`string`, `int`,
    /// `double`, `bool`). Enumerations are resolved by the caller.
    pub fn primitive(word: &str) -> Option<DataType> {
        match word {
            "string" => Some(DataType::String),
            "int" => Some(DataType::Int),
            "double" => Some(DataType::Double),
            "bool" => Some(DataType::Bool),
            _ => None,
        }
    }

    pub fn is_ordered(&self) -> bool {
        !matches!(self, DataType::String | DataType::Bool)
    }
}

impl fmt::Display for DataType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataType::String => f.write_str("string"),
            DataType::Int => f.write_str("int"),
            DataType::Double => f.write_str("double"),
            DataType::Bool => f.write_str("bool"),
            DataType::Enum(name) => write!(f, "{name}"),
        }
    }
}

/// A data-property value.
///
/// Doubles are always finite and `-0.0` is stored as `0.0`, which makes the
/// total order used for set storage agree with numeric equality.
#[derive(Debug, Clone)]
pub enum Value {
    Str(String),
    Int(i64),
    Double(f64),
    Bool(bool),
    Enum { enum_name: EntityName, member: EntityName },
}

impl Value {
    pub fn double(v: f64) -> Result<Value, KbError> {
        if !v.is_finite() {
            return Err(KbError::NonFiniteDouble(v.to_string()));
        }
        Ok(Value::Double(if v == 0.0 { 0.0 } else { v }))
    }

    pub fn kind_name(&self) -> String {
        match self {
            Value::Str(_) => "string".into(),
            Value::Int(_) => "int".into(),
            Value::Double(_) => "double".into(),
            Value::Bool(_) => "bool".into(),
            Value::Enum { enum_name, .. } => enum_name.to_string(),
        }
    }

    pub fn matches(&self, ty: &DataType) -> bool {
        match (self, ty) {
            (Value::Str(_), DataType::String)
            | (Value::Int(_), DataType::Int)
            | (Value::Double(_), DataType::Double)
            | (Value::Bool(_), DataType::Bool) => true,
            (Value::Enum { enum_name, .. }, DataType::Enum(e)) => enum_name == e,
            _ => false,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Double(v) => Some(*v),
            Value::Int(v) => Some(*v as f64),
            _ => None,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Value::Str(_) => 0,
            Value::Int(_) => 1,
            Value::Double(_) => 2,
            Value::Bool(_) => 3,
            Value::Enum { .. } => 4,
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Value {}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Storage order only: kinds first, then payload. Facet comparisons use
/// declared enum order and live in the reasoner.
impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Str(a), Value::Str(b)) => a.cmp(b),
            (Value::Int(a), Value::Int(b)) => a.cmp(b),
            (Value::Double(a), Value::Double(b)) => a.total_cmp(b),
            (Value::Bool(a), Value::Bool(b)) => a.cmp(b),
            (
                Value::Enum { enum_name: e1, member: m1 },
                Value::Enum { enum_name: e2, member: m2 },
            ) => e1.cmp(e2).then_with(|| m1.cmp(m2)),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rank().hash(state);
        match self {
            Value::Str(s) => s.hash(state),
            Value::Int(i) => i.hash(state),
            Value::Double(d) => d.to_bits().hash(state),
            Value::Bool(b) => b.hash(state),
            Value::Enum { enum_name, member } => {
                enum_name.hash(state);
                member.hash(state);
            }
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Str(s) => f.write_str(&quote(s)),
            Value::Int(i) => write!(f, "{i}"),
            Value::Double(d) => f.write_str(&format_double(*d)),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Enum { member, .. } => write!(f, "{member}"),
        }
    }
}

/// Machine form: numbers and booleans as JSON scalars, strings and enum
/// members as strings.
impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Str(s) => serializer.serialize_str(s),
            Value::Int(i) => serializer.serialize_i64(*i),
            Value::Double(d) => serializer.serialize_f64(*d),
            Value::Bool(b) => serializer.serialize_bool(*b),
            Value::Enum { member, .. } => serializer.serialize_str(member.as_str()),
        }
    }
}

/// Shortest round-trip representation that always reads back as a double
/// (never as an integer literal).
pub fn format_double(v: f64) -> String {
    let s = format!("{v}");
    if s.contains(['.', 'e', 'E']) || !v.is_finite() {
        s
    } else {
        format!("{s}.0")
    }
}

/// Double-quoted string literal with `\"` and `\\` escapes.
pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubles_render_with_fraction_or_exponent() {
        assert_eq!(format_double(0.5), "0.5");
        assert_eq!(format_double(1.0), "1.0");
        assert_eq!(format_double(-3.0), "-3.0");
        assert_eq!(format_double(0.5000001), "0.5000001");
        assert_eq!(format_double(1e-7), "0.0000001");
    }

    #[test]
    fn non_finite_rejected() {
        assert!(Value::double(f64::NAN).is_err());
        assert!(Value::double(f64::INFINITY).is_err());
        assert_eq!(Value::double(-0.0).unwrap(), Value::Double(0.0));
    }

    #[test]
    fn quoting_escapes() {
        assert_eq!(quote(r#"a"b\c"#), r#""a\"b\\c""#);
    }
}
