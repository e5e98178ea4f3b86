//! Verification pipeline: symbolic execution into a verification formula,
//! a decision procedure that proves it, a reference interpreter to test
//! against, and certificate emission.
//!
//! ```
//! use vfx_core::verify;
//! let (_, result) = verify(&vfx_lang::ast::countdown());
//! assert!(result.is_ok());
//! ```

pub mod arith;
pub mod cbsem;
pub mod certificate;
pub mod gen;
pub mod symexec;
pub mod transforms;

use vfx_lang::ast::Func;

use arith::{prove_sep, ProofTrace, ProveFailure};
use symexec::{sym_exec_func, Sep};

/// Builds the verification formula of `f` and tries to prove it.
pub fn verify(f: &Func) -> (Sep, Result<ProofTrace, ProveFailure>) {
    let sep = sym_exec_func(f);
    let result = prove_sep(&sep);
    (sep, result)
}
