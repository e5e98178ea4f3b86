use std::fmt;

use vfx_lang::cert::{Discharge, ProofStep};
use vfx_lang::site::Site;

use super::{format_model, Context, Model, Verdict};
use crate::symexec::{FailureCause, ObligationKind, Sep};

/// The steps taken while proving a formula, in depth-first order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProofTrace {
    pub steps: Vec<ProofStep>,
}

impl ProofTrace {
    pub fn count(&self, pred: impl Fn(&ProofStep) -> bool) -> usize {
        self.steps.iter().filter(|s| pred(s)).count()
    }

    pub fn lines(&self) -> Vec<String> {
        self.steps.iter().map(ToString::to_string).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProveFailureReason {
    /// The obligation does not follow; a counter-model exists.
    Refuted(ObligationKind),
    /// The procedure could not decide the obligation.
    Undecided(ObligationKind, String),
    /// A failure leaf is reachable.
    Unreachable(FailureCause),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProveFailure {
    /// Child indices from the root to the failing leaf.
    pub path: Vec<u8>,
    /// Depth-first index of the failing leaf.
    pub leaf: usize,
    pub site: Site,
    pub reason: ProveFailureReason,
    pub model: Option<Model>,
}

impl fmt::Display for ProveFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.reason {
            ProveFailureReason::Refuted(kind) => write!(f, "cannot prove {kind} obligation")?,
            ProveFailureReason::Undecided(kind, why) => {
                write!(f, "cannot decide {kind} obligation: {why}")?
            }
            ProveFailureReason::Unreachable(cause) => write!(f, "{cause}")?,
        }
        if let Some(m) = self.model.as_ref().filter(|m| !m.is_empty()) {
            write!(f, " (counter-model {})", format_model(m))?;
        }
        Ok(())
    }
}

/// Proves `sep` by depth-first traversal, recording one step per node.
pub fn prove_sep(sep: &Sep) -> Result<ProofTrace, ProveFailure> {
    let mut p = Prover {
        ctx: Context::new(),
        trace: ProofTrace::default(),
        path: Vec::new(),
        leaf: 0,
    };
    p.go(sep)?;
    Ok(p.trace)
}

struct Prover {
    ctx: Context,
    trace: ProofTrace,
    path: Vec<u8>,
    leaf: usize,
}

impl Prover {
    fn go(&mut self, sep: &Sep) -> Result<(), ProveFailure> {
        match sep {
            Sep::Forall(_, rest) => {
                self.trace.steps.push(ProofStep::Intro);
                self.child(0, rest)
            }
            Sep::Implies(p, rest) => {
                self.trace.steps.push(ProofStep::Intro);
                self.ctx.push();
                self.ctx.assume(p.clone());
                let r = self.child(0, rest);
                self.ctx.pop();
                r
            }
            Sep::And(l, r) => {
                self.trace.steps.push(ProofStep::Split);
                self.child(0, l)?;
                self.child(1, r)
            }
            Sep::True => {
                self.arith(Discharge::Ok);
                Ok(())
            }
            Sep::Holds(p, ob) => {
                let how = match self.ctx.entails(p) {
                    Verdict::Yes => Discharge::Ok,
                    first => match self.ctx.unsat() {
                        Verdict::Yes => Discharge::Contradiction,
                        _ => {
                            let (reason, model) = match first {
                                Verdict::No(m) => (ProveFailureReason::Refuted(ob.kind), Some(m)),
                                Verdict::Unknown(why) => {
                                    (ProveFailureReason::Undecided(ob.kind, why), None)
                                }
                                Verdict::Yes => unreachable!(),
                            };
                            return Err(self.fail(ob.site.clone(), reason, model));
                        }
                    },
                };
                self.arith(how);
                Ok(())
            }
            Sep::False(failure) => match self.ctx.unsat() {
                Verdict::Yes => {
                    self.arith(Discharge::Contradiction);
                    Ok(())
                }
                v => {
                    let model = match v {
                        Verdict::No(m) => Some(m),
                        _ => None,
                    };
                    Err(self.fail(
                        failure.site.clone(),
                        ProveFailureReason::Unreachable(failure.cause.clone()),
                        model,
                    ))
                }
            },
        }
    }

    fn child(&mut self, i: u8, sep: &Sep) -> Result<(), ProveFailure> {
        self.path.push(i);
        let r = self.go(sep);
        if r.is_ok() {
            self.path.pop();
        }
        r
    }

    fn arith(&mut self, how: Discharge) {
        self.trace.steps.push(ProofStep::Arith {
            leaf: self.leaf,
            how,
        });
        self.leaf += 1;
    }

    fn fail(&self, site: Site, reason: ProveFailureReason, model: Option<Model>) -> ProveFailure {
        ProveFailure {
            path: self.path.clone(),
            leaf: self.leaf,
            site,
            reason,
            model,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexec::{sym_exec_func, Prop};
    use vfx_lang::ast::{countdown, Expr, Func, Stmt};

    #[test]
    fn countdown_verifies_with_seven_arith_steps() {
        let sep = sym_exec_func(&countdown());
        let trace = prove_sep(&sep).unwrap();
        let arith = trace.count(|s| matches!(s, ProofStep::Arith { .. }));
        assert_eq!(arith, 7);
        let shape = sep.shape();
        assert_eq!(trace.count(|s| *s == ProofStep::Split), shape.ands);
        assert_eq!(trace.count(|s| *s == ProofStep::Intro), shape.foralls + shape.implies);
        assert!(trace
            .steps
            .iter()
            .all(|s| !matches!(s, ProofStep::Arith { how: Discharge::Contradiction, .. })));
    }

    #[test]
    fn unreachable_false_fails() {
        let sep = Sep::implies(
            Prop::TT,
            Sep::fail(FailureCause::FellOffEnd, &Site::Post),
        );
        let e = prove_sep(&sep).unwrap_err();
        assert_eq!(e.path, vec![0]);
        assert_eq!(e.leaf, 0);
        assert!(matches!(e.reason, ProveFailureReason::Unreachable(FailureCause::FellOffEnd)));
    }

    #[test]
    fn false_under_contradiction_is_discharged() {
        let sep = Sep::implies(Prop::FF, Sep::fail(FailureCause::FellOffEnd, &Site::Post));
        let trace = prove_sep(&sep).unwrap();
        assert_eq!(trace.lines(), vec!["intro", "arith 0 contradiction"]);
    }

    #[test]
    fn overflowing_return_fails_at_upper_bound() {
        let f = Func::new(
            vec![],
            Expr::True,
            Stmt::list([Stmt::ret(Expr::add(Expr::int(2147483647), Expr::int(1)))]),
            Expr::True,
        );
        let e = prove_sep(&sym_exec_func(&f)).unwrap_err();
        assert_eq!(e.reason, ProveFailureReason::Refuted(ObligationKind::UpperBound));
        assert_eq!(e.model, Some(Model::new()));
        assert_eq!(e.leaf, 1);
    }
}
