//! Session environments, the standard typing system, and the liveness typing
//! system with its syntactic discharge approximation.

mod env;
mod live;
mod rules;
mod standard;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::syntax::{fmt_labels, fmt_path, LabelSet, Name, PathStep};

pub use env::{env_step, sim, EnvLabel, TypeEnv};
pub use live::{
    approx_a, check_live, check_live_closed, m_of, std_of, synth_invariant, Derivation, Entry,
    Gamma, InvariantChoice, InvariantSource, Judgement, LiveCtx,
};
pub use standard::{check_std, StdCtx};

/// Why a judgement could not be derived.
#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
#[serde(rename_all = "camelCase")]
#[error("{rule} at {}: expected {expected}, found {actual}{}", fmt_path(path), pending_note(pending_left))]
pub struct TypeError {
    pub rule: String,
    #[serde(serialize_with = "path_string")]
    pub path: Vec<PathStep>,
    pub expected: String,
    pub actual: String,
    /// Labels that could not be discharged.
    pub pending_left: LabelSet,
    /// The variable a failed `E-Var`/`E-VarP` was about.
    #[serde(skip)]
    pub var: Option<Name>,
}

fn pending_note(l: &LabelSet) -> String {
    if l.is_empty() {
        String::new()
    } else {
        format!(" (undischarged {})", fmt_labels(l))
    }
}

fn path_string<S: Serializer>(p: &[PathStep], s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(&fmt_path(p))
}

impl TypeError {
    pub fn new(
        rule: &str,
        path: &[PathStep],
        expected: impl Into<String>,
        actual: impl Into<String>,
    ) -> TypeError {
        TypeError {
            rule: rule.to_string(),
            path: path.to_vec(),
            expected: expected.into(),
            actual: actual.into(),
            pending_left: LabelSet::new(),
            var: None,
        }
    }

    fn pending(mut self, left: LabelSet) -> TypeError {
        self.pending_left = left;
        self
    }

    /// The checker gave up rather than refuted.
    pub fn is_unsupported(&self) -> bool {
        self.rule == "Unsupported"
    }
}
