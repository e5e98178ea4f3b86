use rand::rngs::StdRng;
use rand::SeedableRng;

use vfx_checker::{check, goal_of, goal_text, Rejection, Verdict};
use vfx_core::certificate::emit;
use vfx_core::gen::gen_func;
use vfx_core::symexec::{sym_exec_func, Sep};
use vfx_core::verify;
use vfx_lang::ast::{countdown, Func, COUNTDOWN_SOURCE};
use vfx_lang::cert::{Discharge, ProofStep};
use vfx_lang::parse::SourceProgram;

#[test]
fn goal_text_agrees_with_the_verifier() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..400 {
        let f = gen_func(&mut rng).func;
        assert_eq!(goal_text(&goal_of(&f)), sym_exec_func(&f).canonical(), "{f:?}");
    }
}

#[test]
fn verified_functions_round_trip() {
    let mut rng = StdRng::seed_from_u64(12);
    let mut accepted = 0;
    for _ in 0..400 {
        let f = gen_func(&mut rng).func;
        if let (_, Ok(trace)) = verify(&f) {
            let cert = emit(&f, &trace, "");
            assert_eq!(check(&cert, None), Verdict::Accepted, "{f:?}");
            accepted += 1;
        }
    }
    assert!(accepted > 50);
}

#[test]
fn countdown_checks_against_its_source() {
    let f = countdown();
    let (_, trace) = verify(&f);
    let cert = emit(&f, &trace.unwrap(), COUNTDOWN_SOURCE);
    let src = SourceProgram::new("countdown.c", COUNTDOWN_SOURCE);
    assert_eq!(check(&cert, Some(&src)), Verdict::Accepted);

    let other = COUNTDOWN_SOURCE.replace("result == 0", "result == 1");
    let src = SourceProgram::new("countdown.c", &other);
    assert!(matches!(check(&cert, Some(&src)), Verdict::Rejected(Rejection::SourceDigest)));

    let mut forged = cert.clone();
    forged.source_digest = vfx_lang::cert::sha256_hex(other.as_bytes());
    forged.reseal();
    assert!(matches!(check(&forged, Some(&src)), Verdict::Rejected(Rejection::AstMismatch)));

    // Certify the changed post with the old proof: the last arithmetic leaf
    // is now `s = 1`, which does not follow.
    let mut forged = cert.clone();
    forged.func = forged.func.replace("(int 0)))", "(int 1)))");
    assert_ne!(forged.func, cert.func);
    forged.reseal();
    match check(&forged, None) {
        Verdict::Rejected(Rejection::Replay(e)) => {
            assert_eq!(e.step + 1, cert.proof.len() - 1);
        }
        v => panic!("{v:?}"),
    }
}

/// A proof that claims every leaf, as a verifier with a broken solver
/// would emit it.
fn claim_everything(sep: &Sep, out: &mut Vec<ProofStep>, leaf: &mut usize) {
    match sep {
        Sep::Forall(_, s) | Sep::Implies(_, s) => {
            out.push(ProofStep::Intro);
            claim_everything(s, out, leaf);
        }
        Sep::And(a, b) => {
            out.push(ProofStep::Split);
            claim_everything(a, out, leaf);
            claim_everything(b, out, leaf);
        }
        Sep::False(_) => {
            out.push(ProofStep::Arith { leaf: *leaf, how: Discharge::Contradiction });
            *leaf += 1;
        }
        _ => {
            out.push(ProofStep::Arith { leaf: *leaf, how: Discharge::Ok });
            *leaf += 1;
        }
    }
}

#[test]
fn proofs_from_an_unsound_solver_are_rejected() {
    let mut rng = StdRng::seed_from_u64(13);
    let mut refuted = 0;
    for _ in 0..400 {
        let f: Func = gen_func(&mut rng).func;
        let (sep, result) = verify(&f);
        let Err(failure) = result else { continue };
        if !matches!(failure.reason, vfx_core::arith::ProveFailureReason::Refuted(_)
            | vfx_core::arith::ProveFailureReason::Unreachable(_)) || failure.model.is_none()
        {
            continue;
        }
        let mut steps = Vec::new();
        claim_everything(&sep, &mut steps, &mut 0);
        let trace = vfx_core::arith::ProofTrace { steps };
        let cert = emit(&f, &trace, "");
        assert!(matches!(check(&cert, None), Verdict::Rejected(_)), "{f:?}");
        refuted += 1;
    }
    assert!(refuted > 50);
}
