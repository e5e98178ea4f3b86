//! Independent certificate checker.
//!
//! Rebuilds the goal of a certified function from its syntax and replays
//! the recorded proof steps, deciding every arithmetic leaf again with its
//! own procedure. Nothing here is shared with the verifier beyond the
//! language definition and the certificate file format.
//!
//! ```
//! use vfx_checker::{check, Verdict};
//! let cert = vfx_lang::cert::Certificate::new(
//!     String::new(),
//!     "(func (args) (pre true) (body (seq (return (int 0)) skip)) (post true))".into(),
//!     vec!["intro".into(), "split".into(), "arith 0 ok".into(), "arith 1 ok".into()],
//!     vfx_lang::cert::Metadata { tool_version: "0".into(), timestamp: "0".into() },
//! );
//! assert_eq!(check(&cert, None), Verdict::Accepted);
//! ```

pub mod decide;
pub mod goal;
pub mod replay;

use vfx_lang::cert::{sha256_hex, Certificate, FORMAT_VERSION};
use vfx_lang::parse::{parse_program, SourceProgram};
use vfx_lang::sexpr::parse_func;

pub use goal::{goal_of, goal_text};
pub use replay::{replay, ReplayError, StepError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Rejection {
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error("body digest does not match the certificate contents")]
    Digest,
    #[error("function text does not parse: {0}")]
    Func(String),
    #[error("malformed proof step at index {0}")]
    Step(usize),
    #[error("source does not parse: {0}")]
    Source(String),
    #[error("source digest mismatch")]
    SourceDigest,
    #[error("source function differs from the certified one")]
    AstMismatch,
    #[error("{0}")]
    Replay(#[from] ReplayError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Accepted,
    Rejected(Rejection),
}

/// Checks `cert`, and if `source` is given, that it certifies that program.
pub fn check(cert: &Certificate, source: Option<&SourceProgram<'_>>) -> Verdict {
    match try_check(cert, source) {
        Ok(()) => Verdict::Accepted,
        Err(r) => Verdict::Rejected(r),
    }
}

fn try_check(cert: &Certificate, source: Option<&SourceProgram<'_>>) -> Result<(), Rejection> {
    if cert.format_version != FORMAT_VERSION {
        return Err(Rejection::Version(cert.format_version));
    }
    if !cert.digest_ok() {
        return Err(Rejection::Digest);
    }
    let func = parse_func(&cert.func).map_err(|e| Rejection::Func(e.to_string()))?;
    let mut steps = Vec::with_capacity(cert.proof.len());
    for (i, s) in cert.proof.iter().enumerate() {
        steps.push(s.parse().map_err(|_| Rejection::Step(i))?);
    }
    if let Some(src) = source {
        if sha256_hex(src.text.as_bytes()) != cert.source_digest {
            return Err(Rejection::SourceDigest);
        }
        let parsed = parse_program(src).map_err(|e| Rejection::Source(e.to_string()))?;
        if parsed.func != func {
            return Err(Rejection::AstMismatch);
        }
    }
    replay(&goal_of(&func), &steps)?;
    Ok(())
}
