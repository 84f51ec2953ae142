use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::semantics::ProcLabel;
use crate::syntax::{fmt_labels, Chan, Label, LabelSet, SessionType};
use crate::types::{equiv, is_dual, type_step, TypeLabel};

/// Session environment Δ: polarised channels to types.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeEnv(pub BTreeMap<Chan, SessionType>);

impl TypeEnv {
    pub fn new() -> TypeEnv {
        TypeEnv::default()
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (Chan, SessionType)>) -> TypeEnv {
        TypeEnv(entries.into_iter().collect())
    }

    pub fn get(&self, k: &Chan) -> Option<&SessionType> {
        self.0.get(k)
    }

    pub fn with(&self, k: &Chan, t: SessionType) -> TypeEnv {
        let mut out = self.clone();
        out.0.insert(k.clone(), t);
        out
    }

    pub fn domain(&self) -> BTreeSet<Chan> {
        self.0.keys().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Chan, &SessionType)> {
        self.0.iter()
    }

    /// Every entry is `end` (up to unfolding).
    pub fn completed(&self) -> bool {
        self.0.values().all(|t| t.unfold() == SessionType::End)
    }

    /// Every pair of co-channels carries dual types.
    pub fn balanced(&self) -> bool {
        self.0.iter().all(|(k, t)| match self.0.get(&k.dual()) {
            Some(u) => is_dual(t, u),
            None => true,
        })
    }

    /// Splits into the entries for `names` and the rest.
    pub fn split(&self, names: &BTreeSet<Chan>) -> (TypeEnv, TypeEnv) {
        let (l, r): (BTreeMap<_, _>, BTreeMap<_, _>) =
            self.0.clone().into_iter().partition(|(k, _)| names.contains(k));
        (TypeEnv(l), TypeEnv(r))
    }

    /// Same domain and pointwise equal trees.
    pub fn equiv(&self, other: &TypeEnv) -> bool {
        self.0.len() == other.0.len()
            && self
                .0
                .iter()
                .all(|(k, t)| other.0.get(k).is_some_and(|u| equiv(t, u)))
    }
}

impl fmt::Display for TypeEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("(empty)");
        }
        for (i, (k, t)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}: {t}")?;
        }
        Ok(())
    }
}

impl Serialize for TypeEnv {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(self.0.iter().map(|(k, t)| (k.to_string(), t.to_string())))
    }
}

/// Environment transition labels δ.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EnvLabel {
    Tau,
    TauSel(Label, LabelSet),
    At(Chan, TypeLabel),
}

impl EnvLabel {
    pub fn subject(&self) -> Option<&Chan> {
        match self {
            EnvLabel::At(k, _) => Some(k),
            _ => None,
        }
    }

    pub fn sel(&self) -> Option<&Label> {
        match self {
            EnvLabel::Tau => None,
            EnvLabel::TauSel(l, _) => Some(l),
            EnvLabel::At(_, r) => r.sel(),
        }
    }

    pub fn req(&self) -> LabelSet {
        match self {
            EnvLabel::Tau => LabelSet::new(),
            EnvLabel::TauSel(_, l) => l.clone(),
            EnvLabel::At(_, r) => r.req(),
        }
    }

    pub fn res(&self) -> LabelSet {
        self.sel().cloned().into_iter().collect()
    }
}

impl fmt::Display for EnvLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnvLabel::Tau => f.write_str("tau"),
            EnvLabel::TauSel(l, r) => write!(f, "tau:{l}{}", fmt_labels(r)),
            EnvLabel::At(k, r) => write!(f, "{k}:{r}"),
        }
    }
}

impl Serialize for EnvLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// All transitions of Δ: one lift per entry transition, and a synchronisation
/// for every matching pair of co-channel transitions.
pub fn env_step(env: &TypeEnv) -> Vec<(EnvLabel, TypeEnv)> {
    let moves: BTreeMap<&Chan, Vec<(TypeLabel, SessionType)>> =
        env.0.iter().map(|(k, t)| (k, type_step(t))).collect();
    let mut out = Vec::new();
    for (k, ms) in &moves {
        for (r, t) in ms {
            out.push((EnvLabel::At((*k).clone(), r.clone()), env.with(k, t.clone())));
        }
    }
    for (k, ms) in &moves {
        let kd = k.dual();
        let Some(dms) = moves.get(&kd) else { continue };
        for (r, t) in ms {
            for (s, u) in dms {
                let label = match (r, s) {
                    (TypeLabel::Out, TypeLabel::In) => EnvLabel::Tau,
                    (TypeLabel::Sel(l, a), TypeLabel::Bra(m, b)) if l == m => {
                        EnvLabel::TauSel(l.clone(), a.union(b).cloned().collect())
                    }
                    _ => continue,
                };
                out.push((label, env.with(k, t.clone()).with(&kd, u.clone())));
            }
        }
    }
    out
}

/// δ ≃ λ; values and bound variables are ignored.
pub fn sim(d: &EnvLabel, l: &ProcLabel) -> bool {
    match (d, l) {
        (EnvLabel::Tau, ProcLabel::Tau) => true,
        (EnvLabel::TauSel(a, _), ProcLabel::TauSel(b)) => a == b,
        (EnvLabel::At(k, r), l) => match (r, l) {
            (TypeLabel::Out, ProcLabel::Out(m, _)) | (TypeLabel::In, ProcLabel::In(m, _)) => k == m,
            (TypeLabel::Sel(a, _), ProcLabel::Sel(m, b)) | (TypeLabel::Bra(a, _), ProcLabel::Bra(m, b)) => {
                k == m && a == b
            }
            _ => false,
        },
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{labels, parse_type, Value};

    fn env(entries: &[(&str, &str)]) -> TypeEnv {
        TypeEnv::from_entries(entries.iter().map(|(k, t)| {
            let (name, pol) = k.split_at(k.len() - 1);
            let chan = if pol == "+" { Chan::plus(name) } else { Chan::minus(name) };
            (chan, parse_type(t).unwrap())
        }))
    }

    #[test]
    fn single_lift() {
        let d = env(&[("k+", "!.end")]);
        let steps = env_step(&d);
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].0, EnvLabel::At(Chan::plus("k"), TypeLabel::Out));
        assert!(steps[0].1.completed());
    }

    #[test]
    fn synchronisations() {
        let d = env(&[("k+", "+{ l[m].end }"), ("k-", "&{ l.end }")]);
        let steps = env_step(&d);
        let sync: Vec<_> = steps.iter().filter(|(l, _)| l.subject().is_none()).collect();
        assert_eq!(sync.len(), 1);
        assert_eq!(sync[0].0, EnvLabel::TauSel(Label::new("l"), labels(["m"])));
        assert!(sync[0].1.completed());
        assert_eq!(sync[0].0.req(), labels(["m"]));
        assert_eq!(sync[0].0.res(), labels(["l"]));

        let d = env(&[("k+", "!.end"), ("k-", "?.end")]);
        let steps = env_step(&d);
        assert!(steps.iter().any(|(l, e)| *l == EnvLabel::Tau && e.completed()));
        for (_, e) in &steps {
            assert_eq!(e.domain(), d.domain());
        }
    }

    #[test]
    fn completed_and_balanced() {
        assert!(TypeEnv::new().completed());
        assert!(env(&[("k+", "mu t.end")]).completed());
        assert!(!env(&[("k+", "!.end")]).completed());
        assert!(env(&[("k+", "!.end"), ("k-", "?.end")]).balanced());
        assert!(!env(&[("k+", "!.end"), ("k-", "!.end")]).balanced());
        assert!(env(&[("k+", "!.end")]).balanced());
    }

    #[test]
    fn similarity() {
        let k = Chan::plus("k");
        assert!(sim(&EnvLabel::Tau, &ProcLabel::Tau));
        assert!(sim(&EnvLabel::At(k.clone(), TypeLabel::Out), &ProcLabel::Out(k.clone(), Value::Int(17))));
        assert!(!sim(&EnvLabel::At(k.clone(), TypeLabel::Out), &ProcLabel::In(k.clone(), Value::Int(0))));
        assert!(!sim(&EnvLabel::At(k.clone(), TypeLabel::Out), &ProcLabel::Out(Chan::minus("k"), Value::Int(0))));
        let l = Label::new("a");
        assert!(sim(
            &EnvLabel::TauSel(l.clone(), labels(["b"])),
            &ProcLabel::TauSel(l.clone())
        ));
        assert!(sim(
            &EnvLabel::At(k.clone(), TypeLabel::Bra(l.clone(), LabelSet::new())),
            &ProcLabel::Bra(k.clone(), l.clone())
        ));
        assert!(!sim(&EnvLabel::Tau, &ProcLabel::TauSel(l)));
    }
}
