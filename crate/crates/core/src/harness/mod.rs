//! Corpus, generators and the property suites built on them.

pub mod corpus;
pub mod gen;
pub mod suites;

pub use corpus::{corpus, corpus_type, corpus_types, entry_named, CorpusEntry, Expected, PrimSet};
pub use gen::{gen_session_type, gen_typed, GenConfig};
pub use suites::{run_all, run_suite, Finding, SuiteConfig, SuiteReport, SUITES};
