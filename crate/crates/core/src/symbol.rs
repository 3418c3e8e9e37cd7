//! Symbols and words.
//!
//! A symbol is an opaque, cheaply clonable string. Numeric constraints read
//! symbols as integers; everything else compares them as text.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Symbol(Arc<str>);

pub type Word = Vec<Symbol>;

impl Symbol {
    pub fn new(s: impl AsRef<str>) -> Self {
        Symbol(Arc::from(s.as_ref()))
    }

    pub fn int(v: i64) -> Self {
        Symbol::new(v.to_string())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The integer value of the symbol, if it spells one.
    pub fn as_int(&self) -> Option<i64> {
        self.0.parse().ok()
    }
}

/// Integers first (numerically), then everything else as text.
impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.as_int(), other.as_int()) {
            (Some(a), Some(b)) => a.cmp(&b).then_with(|| self.0.cmp(&other.0)),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => self.0.cmp(&other.0),
        }
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

impl From<i64> for Symbol {
    fn from(v: i64) -> Self {
        Symbol::int(v)
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        Ok(match Raw::deserialize(d)? {
            Raw::Int(v) => Symbol::int(v),
            Raw::Text(s) => Symbol::new(s),
        })
    }
}

/// Splits `text` into symbols: one per character, or on `sep` when given.
pub fn parse_word(text: &str, sep: Option<&str>) -> Word {
    match sep {
        None => text.chars().map(|c| Symbol::new(c.to_string())).collect(),
        Some(_) if text.is_empty() => Vec::new(),
        Some(sep) => text.split(sep).map(Symbol::new).collect(),
    }
}

/// Shorthand for single-character symbols.
pub fn word(text: &str) -> Word {
    parse_word(text, None)
}

pub fn format_word(w: &[Symbol], sep: Option<&str>) -> String {
    let parts: Vec<&str> = w.iter().map(Symbol::as_str).collect();
    parts.join(sep.unwrap_or(""))
}

pub fn ints(values: &[i64]) -> Word {
    values.iter().map(|&v| Symbol::int(v)).collect()
}
