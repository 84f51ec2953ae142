//! Abstract syntax for processes and session types, their concrete grammar,
//! and the syntactic operations (free names, substitution, unfolding,
//! primitive-recursion conventions).

mod parse;
mod print;
mod process;
mod session;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

pub use parse::{parse_env_entries, parse_process, parse_type, ParseError};
pub use process::{
    check_conventions, fmt_path, BinOp, Expr, PathStep, Process, UnOp, Value, Violation,
    ViolationKind,
};
pub use session::{Arm, ContractivityError, SessionType};

/// Identifiers for channels, data variables, process variables and type variables.
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Plus,
    Minus,
}

impl Polarity {
    pub fn dual(self) -> Polarity {
        match self {
            Polarity::Plus => Polarity::Minus,
            Polarity::Minus => Polarity::Plus,
        }
    }

    fn symbol(self) -> char {
        match self {
            Polarity::Plus => '+',
            Polarity::Minus => '-',
        }
    }
}

/// A polarised channel name `c+` / `c-`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Chan {
    pub name: Name,
    pub pol: Polarity,
}

impl Chan {
    pub fn new(name: &str, pol: Polarity) -> Chan {
        Chan { name: Arc::from(name), pol }
    }

    pub fn plus(name: &str) -> Chan {
        Chan::new(name, Polarity::Plus)
    }

    pub fn minus(name: &str) -> Chan {
        Chan::new(name, Polarity::Minus)
    }

    /// The co-channel: same name, opposite polarity.
    pub fn dual(&self) -> Chan {
        Chan {
            name: self.name.clone(),
            pol: self.pol.dual(),
        }
    }

    pub fn is_co_channel_of(&self, other: &Chan) -> bool {
        self.name == other.name && self.pol != other.pol
    }
}

impl fmt::Display for Chan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.name, self.pol.symbol())
    }
}

impl Serialize for Chan {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A branch/select label.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(pub Name);

impl Label {
    pub fn new(s: &str) -> Label {
        Label(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

/// A finite set of labels (response sets, pending sets, invariants).
pub type LabelSet = BTreeSet<Label>;

/// Builds a label set from string slices.
pub fn labels<'a>(items: impl IntoIterator<Item = &'a str>) -> LabelSet {
    items.into_iter().map(Label::new).collect()
}

/// Renders a label set as `{a, b}`.
pub fn fmt_labels(set: &LabelSet) -> String {
    let inner: Vec<&str> = set.iter().map(Label::as_str).collect();
    format!("{{{}}}", inner.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polarity_duality_is_an_involution() {
        for p in [Polarity::Plus, Polarity::Minus] {
            assert_ne!(p, p.dual());
            assert_eq!(p, p.dual().dual());
        }
    }

    #[test]
    fn co_channels() {
        let k = Chan::plus("k");
        assert_eq!(k.dual(), Chan::minus("k"));
        assert!(k.is_co_channel_of(&k.dual()));
        assert!(!k.is_co_channel_of(&k));
        assert!(!k.is_co_channel_of(&Chan::minus("h")));
        assert_eq!(k.to_string(), "k+");
    }
}
