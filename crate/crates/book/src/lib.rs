//! Runs the code listings of the guide under `book/` as doc tests.
//!
//! mdbook cannot link listings against workspace crates, so each chapter
//! is included here as a module doc and `cargo test` runs it.

#[doc = include_str!("../../../book/src/intro.md")]
pub mod intro {}
#[doc = include_str!("../../../book/src/language.md")]
pub mod language {}
#[doc = include_str!("../../../book/src/verifying.md")]
pub mod verifying {}
#[doc = include_str!("../../../book/src/running.md")]
pub mod running {}
#[doc = include_str!("../../../book/src/certificates.md")]
pub mod certificates {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
