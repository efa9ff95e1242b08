pub mod frontend;
pub mod model;
pub mod diff;
pub mod pattern;
pub mod infer;
pub mod store;
pub mod detect;
pub mod repair;
pub mod eval;
pub mod cli;
