pub mod syntax;
pub mod semantics;
pub mod types;
pub mod typing;
pub mod harness;
