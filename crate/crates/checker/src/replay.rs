//! Replaying a proof script against a rebuilt goal.

use vfx_lang::cert::{Discharge, ProofStep};

use crate::decide::refutes;
use crate::goal::{Fact, Goal};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StepError {
    #[error("proof ended with goals still open")]
    Underflow,
    #[error("proof has steps left after every goal was closed")]
    Leftover,
    #[error("`{step}` does not apply to a {found} goal")]
    Mismatch { step: String, found: &'static str },
    #[error("leaf numbered {found}, expected {expected}")]
    LeafNumber { expected: usize, found: usize },
    #[error("obligation not discharged by {0}")]
    NotDischarged(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("step {step}: {error} (goal path {path:?})")]
pub struct ReplayError {
    pub step: usize,
    pub path: Vec<u8>,
    pub error: StepError,
}

fn kind(g: &Goal) -> &'static str {
    match g {
        Goal::Top => "top",
        Goal::Bot => "bot",
        Goal::Assert(_) => "holds",
        Goal::Pair(..) => "conj",
        Goal::Assume(..) => "imp",
        Goal::All(..) => "forall",
    }
}

struct Open<'g> {
    goal: &'g Goal,
    facts: Vec<Fact>,
    path: Vec<u8>,
}

/// Replays `steps` on `goal`; succeeds only if the steps close every goal
/// with none left over.
pub fn replay(goal: &Goal, steps: &[ProofStep]) -> Result<(), ReplayError> {
    let mut stack = vec![Open {
        goal,
        facts: Vec::new(),
        path: Vec::new(),
    }];
    let mut leaves = 0usize;
    for (i, step) in steps.iter().enumerate() {
        let Some(open) = stack.pop() else {
            return Err(ReplayError {
                step: i,
                path: Vec::new(),
                error: StepError::Leftover,
            });
        };
        let fail = |error| ReplayError {
            step: i,
            path: open.path.clone(),
            error,
        };
        let child = |k: u8| {
            let mut p = open.path.clone();
            p.push(k);
            p
        };
        match (step, open.goal) {
            (ProofStep::Intro, Goal::All(_, g)) => stack.push(Open {
                goal: g,
                facts: open.facts.clone(),
                path: child(0),
            }),
            (ProofStep::Intro, Goal::Assume(f, g)) => {
                let mut facts = open.facts.clone();
                facts.push(f.clone());
                stack.push(Open {
                    goal: g,
                    facts,
                    path: child(0),
                })
            }
            (ProofStep::Split, Goal::Pair(a, b)) => {
                stack.push(Open {
                    goal: b,
                    facts: open.facts.clone(),
                    path: child(1),
                });
                stack.push(Open {
                    goal: a,
                    facts: open.facts.clone(),
                    path: child(0),
                });
            }
            (ProofStep::Arith { leaf, how }, g @ (Goal::Top | Goal::Bot | Goal::Assert(_))) => {
                if *leaf != leaves {
                    return Err(fail(StepError::LeafNumber {
                        expected: leaves,
                        found: *leaf,
                    }));
                }
                leaves += 1;
                match (how, g) {
                    (Discharge::Ok, Goal::Top) => {}
                    (Discharge::Ok, Goal::Assert(p)) => {
                        let mut q = open.facts.clone();
                        q.push(Fact::neg(p.clone()));
                        if !refutes(&q) {
                            return Err(fail(StepError::NotDischarged("arithmetic")));
                        }
                    }
                    (Discharge::Contradiction, Goal::Bot | Goal::Assert(_)) => {
                        if !refutes(&open.facts) {
                            return Err(fail(StepError::NotDischarged("contradiction")));
                        }
                    }
                    _ => {
                        return Err(fail(StepError::Mismatch {
                            step: step.to_string(),
                            found: kind(g),
                        }))
                    }
                }
            }
            (step, g) => {
                return Err(fail(StepError::Mismatch {
                    step: step.to_string(),
                    found: kind(g),
                }))
            }
        }
    }
    match stack.pop() {
        None => Ok(()),
        Some(open) => Err(ReplayError {
            step: steps.len(),
            path: open.path,
            error: StepError::Underflow,
        }),
    }
}
