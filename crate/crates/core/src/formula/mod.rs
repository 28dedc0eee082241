//! Propositional formulas over named atoms with `~`, `&`, `|` and `->`.

mod enumerate;
mod parser;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub use enumerate::enumerate_formulas;
pub use parser::{parse, ParseError};

/// A propositional formula.
///
/// Children are reference counted so that enumeration and substitution can
/// share subtrees. Equality and ordering are structural; the derived order
/// compares constructors first (atoms, then `~`, `&`, `|`, `->`) and then
/// children left to right, which is the lexicographic order of the prefix
/// token sequence.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(Arc<str>),
    Not(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Implies(Arc<Formula>, Arc<Formula>),
}

/// Returns true when `name` matches `[a-z][a-z0-9_]*`.
pub fn is_atom_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

impl Formula {
    /// Builds an atom. Panics if `name` is not a valid atom name.
    pub fn atom(name: &str) -> Formula {
        assert!(is_atom_name(name), "invalid atom name {name:?}");
        Formula::Atom(Arc::from(name))
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Arc::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Arc::new(l), Arc::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Arc::new(l), Arc::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Formula {
        Formula::Implies(Arc::new(l), Arc::new(r))
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Formula::Atom(_))
    }

    pub fn is_negation(&self) -> bool {
        matches!(self, Formula::Not(_))
    }

    pub fn atom_name(&self) -> Option<&str> {
        match self {
            Formula::Atom(name) => Some(name),
            _ => None,
        }
    }

    /// Number of connective nodes; atoms count zero.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Not(a) => 1 + a.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    /// Atom names in order of first occurrence, without duplicates.
    pub fn atoms(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut Vec<String>) {
        match self {
            Formula::Atom(name) => {
                if !out.iter().any(|n| n.as_str() == &**name) {
                    out.push(name.to_string());
                }
            }
            Formula::Not(a) => a.collect_atoms(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Simultaneous substitution. Atoms missing from `sigma` are kept.
    pub fn substitute(&self, sigma: &BTreeMap<String, Formula>) -> Formula {
        if sigma.is_empty() {
            return self.clone();
        }
        match self {
            Formula::Atom(name) => match sigma.get(&**name) {
                Some(f) => f.clone(),
                None => self.clone(),
            },
            Formula::Not(a) => Formula::not(a.substitute(sigma)),
            Formula::And(a, b) => Formula::and(a.substitute(sigma), b.substitute(sigma)),
            Formula::Or(a, b) => Formula::or(a.substitute(sigma), b.substitute(sigma)),
            Formula::Implies(a, b) => {
                Formula::implies(a.substitute(sigma), b.substitute(sigma))
            }
        }
    }

    /// Canonical text form; `parse(render(f)) == f`.
    pub fn render(&self) -> String {
        self.to_string()
    }

    fn is_binary(&self) -> bool {
        matches!(
            self,
            Formula::And(..) | Formula::Or(..) | Formula::Implies(..)
        )
    }

    fn fmt_operand(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_binary() {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(name) => f.write_str(name),
            Formula::Not(a) => {
                f.write_str("~")?;
                a.fmt_operand(f)
            }
            Formula::And(a, b) => {
                a.fmt_operand(f)?;
                f.write_str(" & ")?;
                b.fmt_operand(f)
            }
            Formula::Or(a, b) => {
                a.fmt_operand(f)?;
                f.write_str(" | ")?;
                b.fmt_operand(f)
            }
            Formula::Implies(a, b) => {
                a.fmt_operand(f)?;
                f.write_str(" -> ")?;
                b.fmt_operand(f)
            }
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Formula({self})")
    }
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

impl serde::Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.render())
    }
}

impl<'de> serde::Deserialize<'de> for Formula {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse(&text).map_err(serde::de::Error::custom)
    }
}
