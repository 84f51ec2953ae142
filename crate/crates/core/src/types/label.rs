use std::fmt;

use serde::Serialize;

use crate::syntax::{fmt_labels, Label, LabelSet};

/// Type transition labels ρ.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TypeLabel {
    Out,
    In,
    Bra(Label, LabelSet),
    Sel(Label, LabelSet),
}

impl TypeLabel {
    pub fn req(&self) -> LabelSet {
        match self {
            TypeLabel::Bra(_, l) | TypeLabel::Sel(_, l) => l.clone(),
            TypeLabel::Out | TypeLabel::In => LabelSet::new(),
        }
    }

    pub fn res(&self) -> LabelSet {
        self.sel().cloned().into_iter().collect()
    }

    /// The selected label; `None` for `!` and `?`.
    pub fn sel(&self) -> Option<&Label> {
        match self {
            TypeLabel::Bra(l, _) | TypeLabel::Sel(l, _) => Some(l),
            TypeLabel::Out | TypeLabel::In => None,
        }
    }

    /// `! ⋈ ?` and `&l[L] ⋈ ⊕l[L']`; response sets are ignored.
    pub fn is_dual(&self, other: &TypeLabel) -> bool {
        match (self, other) {
            (TypeLabel::Out, TypeLabel::In) | (TypeLabel::In, TypeLabel::Out) => true,
            (TypeLabel::Bra(l, _), TypeLabel::Sel(m, _))
            | (TypeLabel::Sel(l, _), TypeLabel::Bra(m, _)) => l == m,
            _ => false,
        }
    }
}

impl fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeLabel::Out => f.write_str("!"),
            TypeLabel::In => f.write_str("?"),
            TypeLabel::Bra(l, r) => write!(f, "&{l}{}", fmt_labels(r)),
            TypeLabel::Sel(l, r) => write!(f, "+{l}{}", fmt_labels(r)),
        }
    }
}

impl Serialize for TypeLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// The selection string of a label sequence, with `!` and `?` erased.
pub fn selection_string<'a>(trace: impl IntoIterator<Item = &'a TypeLabel>) -> Vec<Label> {
    trace.into_iter().filter_map(|r| r.sel().cloned()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::labels;

    #[test]
    fn request_response_structure() {
        assert!(TypeLabel::Out.req().is_empty() && TypeLabel::Out.res().is_empty());
        assert!(TypeLabel::In.req().is_empty() && TypeLabel::In.res().is_empty());
        let b = TypeLabel::Bra(Label::new("CO"), labels(["SI"]));
        assert_eq!(b.req(), labels(["SI"]));
        assert_eq!(b.res(), labels(["CO"]));
        let s = TypeLabel::Sel(Label::new("a"), labels(["b"]));
        assert_eq!(s.req(), labels(["b"]));
        assert_eq!(s.res(), labels(["a"]));
    }

    #[test]
    fn label_duality_ignores_responses() {
        assert!(TypeLabel::Out.is_dual(&TypeLabel::In));
        assert!(!TypeLabel::Out.is_dual(&TypeLabel::Out));
        assert!(TypeLabel::Bra(Label::new("l"), labels(["x"]))
            .is_dual(&TypeLabel::Sel(Label::new("l"), labels(["y", "z"]))));
        assert!(!TypeLabel::Bra(Label::new("l"), labels([]))
            .is_dual(&TypeLabel::Sel(Label::new("m"), labels([]))));
    }

    #[test]
    fn selection_strings_erase_data() {
        assert!(selection_string(&[TypeLabel::Out, TypeLabel::In]).is_empty());
        let t = [
            TypeLabel::Sel(Label::new("a"), labels(["b"])),
            TypeLabel::Out,
            TypeLabel::Sel(Label::new("b"), labels(["a"])),
        ];
        assert_eq!(selection_string(&t), vec![Label::new("a"), Label::new("b")]);
    }
}
