use std::fmt;

use serde::Serialize;

use crate::syntax::{Chan, Label, LabelSet, Value};

/// Process transition labels.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProcLabel {
    Out(Chan, Value),
    In(Chan, Value),
    Sel(Chan, Label),
    Bra(Chan, Label),
    Tau,
    TauSel(Label),
}

impl ProcLabel {
    /// The subject channel; `None` stands for τ.
    pub fn subject(&self) -> Option<&Chan> {
        match self {
            ProcLabel::Out(k, _) | ProcLabel::In(k, _) | ProcLabel::Sel(k, _) | ProcLabel::Bra(k, _) => {
                Some(k)
            }
            ProcLabel::Tau | ProcLabel::TauSel(_) => None,
        }
    }

    /// The selected label, if any.
    pub fn selected(&self) -> Option<&Label> {
        match self {
            ProcLabel::Sel(_, l) | ProcLabel::Bra(_, l) | ProcLabel::TauSel(l) => Some(l),
            _ => None,
        }
    }

    pub fn sel(&self) -> LabelSet {
        self.selected().cloned().into_iter().collect()
    }
}

/// Union of the selections along a sequence of labels.
pub fn sel_of_trace<'a>(labels: impl IntoIterator<Item = &'a ProcLabel>) -> LabelSet {
    labels.into_iter().filter_map(|l| l.selected().cloned()).collect()
}

impl fmt::Display for ProcLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProcLabel::Out(k, v) => write!(f, "{k}!{v}"),
            ProcLabel::In(k, v) => write!(f, "{k}?{v}"),
            ProcLabel::Sel(k, l) => write!(f, "{k}<<{l}"),
            ProcLabel::Bra(k, l) => write!(f, "{k}>>{l}"),
            ProcLabel::Tau => f.write_str("tau"),
            ProcLabel::TauSel(l) => write!(f, "tau:{l}"),
        }
    }
}

impl Serialize for ProcLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::labels;

    #[test]
    fn sel_projection() {
        assert!(ProcLabel::Tau.sel().is_empty());
        assert_eq!(ProcLabel::TauSel(Label::new("CO")).sel(), labels(["CO"]));
        assert!(ProcLabel::Out(Chan::plus("k"), Value::Int(5)).sel().is_empty());
        assert_eq!(
            ProcLabel::Bra(Chan::plus("k"), Label::new("a")).sel(),
            labels(["a"])
        );
    }

    #[test]
    fn subjects() {
        let k = Chan::plus("k");
        assert_eq!(ProcLabel::Sel(k.clone(), Label::new("a")).subject(), Some(&k));
        assert_eq!(ProcLabel::TauSel(Label::new("a")).subject(), None);
    }
}
