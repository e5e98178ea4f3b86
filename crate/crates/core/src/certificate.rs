//! Certificate emission. Checking lives in the separate checker crate.

use std::time::{SystemTime, UNIX_EPOCH};

use vfx_lang::ast::Func;
use vfx_lang::cert::{sha256_hex, Certificate, Metadata};
use vfx_lang::sexpr::func_to_string;

use crate::arith::ProofTrace;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn metadata_now() -> Metadata {
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    Metadata {
        tool_version: TOOL_VERSION.into(),
        timestamp: secs.to_string(),
    }
}

/// Certificate for `f` proved by `trace`, tied to the source text it was
/// parsed from.
pub fn emit(f: &Func, trace: &ProofTrace, source_text: &str) -> Certificate {
    emit_with(f, trace, sha256_hex(source_text.as_bytes()), metadata_now())
}

pub fn emit_with(f: &Func, trace: &ProofTrace, source_digest: String, metadata: Metadata) -> Certificate {
    Certificate::new(source_digest, func_to_string(f), trace.lines(), metadata)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::prove_sep;
    use crate::symexec::sym_exec_func;
    use vfx_lang::ast::{countdown, Expr, Stmt};
    use vfx_lang::ast::COUNTDOWN_SOURCE;

    #[test]
    fn countdown_certificate_uses_three_step_kinds() {
        let f = countdown();
        let trace = prove_sep(&sym_exec_func(&f)).unwrap();
        let c = emit(&f, &trace, COUNTDOWN_SOURCE);
        assert!(c.digest_ok());
        assert_eq!(c.steps().unwrap(), trace.steps);
        assert!(!c.proof.is_empty());
    }

    #[test]
    fn trivial_function_proof() {
        let f = Func::new(vec![], Expr::True, Stmt::list([Stmt::ret(Expr::int(0))]), Expr::True);
        let trace = prove_sep(&sym_exec_func(&f)).unwrap();
        // (imp true (conj (holds true) top))
        let c = emit(&f, &trace, "");
        assert_eq!(c.proof, vec!["intro", "split", "arith 0 ok", "arith 1 ok"]);
    }

    #[test]
    fn covered_region_is_deterministic() {
        let f = countdown();
        let trace = prove_sep(&sym_exec_func(&f)).unwrap();
        let a = emit(&f, &trace, COUNTDOWN_SOURCE);
        let mut b = emit(&f, &trace, COUNTDOWN_SOURCE);
        b.metadata.timestamp = "other".into();
        assert_eq!(a.covered_bytes(), b.covered_bytes());
        assert_eq!(a.body_digest, b.body_digest);
    }
}
