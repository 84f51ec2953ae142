//! The worked examples, embedded in the library.

use serde::Serialize;

use crate::semantics::Primitives;
use crate::syntax::{labels, parse_env_entries, parse_process, parse_type, LabelSet, Process, SessionType};
use crate::typing::TypeEnv;

macro_rules! corpus_file {
    ($f:literal) => {
        include_str!(concat!("../../corpus/", $f))
    };
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum PrimSet {
    Shopping,
    ShoppingStuck,
}

impl PrimSet {
    pub fn table(self) -> Primitives {
        match self {
            PrimSet::Shopping => Primitives::shopping(),
            PrimSet::ShoppingStuck => Primitives::shopping_stuck(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Expected {
    pub std: bool,
    pub live: bool,
    /// `None` where exploration cannot decide it at desk scale.
    pub lock_free: Option<bool>,
    pub notes: &'static str,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CorpusEntry {
    pub name: &'static str,
    pub process_file: &'static str,
    pub env_file: &'static str,
    #[serde(skip)]
    pub process_source: &'static str,
    #[serde(skip)]
    pub env_source: &'static str,
    /// Pending responses the judgement starts from.
    pub pending: LabelSet,
    pub prims: PrimSet,
    pub expected: Expected,
}

impl CorpusEntry {
    pub fn process(&self) -> Process {
        parse_process(self.process_source).expect("corpus process parses")
    }

    pub fn env(&self) -> TypeEnv {
        TypeEnv::from_entries(parse_env_entries(self.env_source).expect("corpus env parses"))
    }
}

#[allow(clippy::too_many_arguments)]
fn entry(
    name: &'static str,
    (process_file, process_source): (&'static str, &'static str),
    (env_file, env_source): (&'static str, &'static str),
    pending: &[&str],
    prims: PrimSet,
    std: bool,
    live: bool,
    lock_free: Option<bool>,
    notes: &'static str,
) -> CorpusEntry {
    CorpusEntry {
        name,
        process_file,
        env_file,
        process_source,
        env_source,
        pending: labels(pending.iter().copied()),
        prims,
        expected: Expected {
            std,
            live,
            lock_free,
            notes,
        },
    }
}

macro_rules! file {
    ($f:literal) => {
        ($f, corpus_file!($f))
    };
}

pub fn corpus() -> Vec<CorpusEntry> {
    use PrimSet::*;
    vec![
        entry("shopping-d", file!("shopping_d.proc"), file!("shopping.env"), &[], Shopping, true, true, Some(true),
            "the cart with bounded delivery; checkout is always answered by an invoice"),
        entry("shopping-d0", file!("shopping_d0.proc"), file!("shopping.env"), &[], Shopping, true, false, Some(true),
            "unbounded delivery; session typed but not live typed"),
        entry("shopping-d0-stuck", file!("shopping_d0.proc"), file!("shopping.env"), &[], ShoppingStuck, true, false, Some(true),
            "unbounded delivery over a store whose update never progresses"),
        entry("delivery-d", file!("delivery_d.proc"), file!("delivery.env"), &["SI"], Shopping, true, true, Some(true),
            "bounded delivery with the invoice pending"),
        entry("delivery-d0", file!("delivery_d0.proc"), file!("delivery.env"), &["SI"], Shopping, true, false, Some(true),
            "unbounded delivery with the invoice pending"),
        entry("data", file!("data.proc"), file!("data.env"), &[], Shopping, true, true, Some(true),
            "the store on its own"),
        entry("ab", file!("ab.proc"), file!("ab.env"), &[], Shopping, true, true, Some(true),
            "alternating a and b, each answering the other"),
        entry("ab-starved", file!("ab_starved.proc"), file!("ab.env"), &[], Shopping, true, false, Some(true),
            "selects a forever; b is never answered"),
        entry("reader-p-t", file!("reader_p.proc"), file!("reader_t.env"), &[], Shopping, true, true, Some(true),
            "writes forever after eof; fine when nothing is requested"),
        entry("reader-p-u", file!("reader_p.proc"), file!("reader_u.env"), &[], Shopping, true, false, Some(true),
            "writes forever after eof, but eof requests close"),
        entry("reader-q-u", file!("reader_q.proc"), file!("reader_u.env"), &[], Shopping, true, true, Some(true),
            "two writes then close"),
        entry("reader-r-u", file!("reader_r.proc"), file!("reader_u.env"), &[], Shopping, true, true, Some(true),
            "n writes then close"),
        entry("relay", file!("relay.proc"), file!("relay.env"), &[], Shopping, true, true, Some(false),
            "a loop beside two relays blocked on each other; maximal traces that are not lock-free"),
    ]
}

pub fn entry_named(name: &str) -> Option<CorpusEntry> {
    corpus().into_iter().find(|e| e.name == name)
}

/// Named types of the worked examples.
pub fn corpus_types() -> Vec<(&'static str, SessionType)> {
    [
        ("t_d", corpus_file!("t_d.sty")),
        ("t_e", corpus_file!("t_e.sty")),
        ("t_p", corpus_file!("t_p.sty")),
        ("ab", corpus_file!("ab.sty")),
    ]
    .into_iter()
    .map(|(n, s)| (n, parse_type(s).expect("corpus type parses")))
    .collect()
}

pub fn corpus_type(name: &str) -> SessionType {
    corpus_types()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| t)
        .unwrap_or_else(|| panic!("no corpus type {name}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::check_conventions;
    use crate::typing::{check_live, check_std, LiveCtx, StdCtx};

    #[test]
    fn every_entry_parses_and_meets_expectations() {
        for e in corpus() {
            let p = e.process();
            let env = e.env();
            assert!(check_conventions(&p).is_empty(), "{}", e.name);
            assert!(env.balanced(), "{}", e.name);
            assert!(e.prims.table().arity_mismatches(&p).is_empty(), "{}", e.name);
            assert_eq!(check_std(&StdCtx::new(), &p, &env).is_ok(), e.expected.std, "{}", e.name);
            let ctx = LiveCtx {
                pending: e.pending.clone(),
                ..Default::default()
            };
            assert_eq!(check_live(&ctx, &p, &env).is_ok(), e.expected.live, "{}", e.name);
        }
    }

    #[test]
    fn corpus_types_are_well_formed() {
        for (n, t) in corpus_types() {
            assert!(t.check_well_formed().is_ok(), "{n}");
        }
        assert!(!corpus_type("t_p").is_standard());
        assert!(corpus_type("t_d").is_standard());
    }
}
