//! Fueled big-step reference interpreter and the function-level sampling
//! harness built on it.
//!
//! Fuel counts loop iterations: each time a `while` guard evaluates to true
//! one unit is spent, and a run that needs another iteration with no fuel
//! left ends in `FuelExhausted`. Straight-line code is free.

use std::fmt;

use vfx_lang::ast::{BinOp, Expr, Func, Ident, Stmt, RESULT};
use vfx_lang::store::{is_int, Store, MIN_SIGNED};

pub type ZStore = Store<i64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Normal,
    Return(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StuckReason {
    UnboundVar,
    Overflow,
    DivByZero,
    DivOverflow,
    Shadowing,
    UnsupportedForm,
    CondUndefined,
}

impl fmt::Display for StuckReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StuckReason::UnboundVar => "unbound variable",
            StuckReason::Overflow => "overflow",
            StuckReason::DivByZero => "division by zero",
            StuckReason::DivOverflow => "division overflow",
            StuckReason::Shadowing => "shadowing declaration",
            StuckReason::UnsupportedForm => "unsupported form",
            StuckReason::CondUndefined => "condition is not boolean",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExecResult {
    Terminated(ZStore, Outcome),
    Stuck(StuckReason),
    FuelExhausted,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    /// Loop-body executions across all loops.
    pub iterations: u64,
}

pub fn eval_z(e: &Expr, st: &ZStore) -> Result<i64, StuckReason> {
    match e {
        Expr::Int(z) => {
            if is_int(*z as i128) {
                Ok(*z)
            } else {
                Err(StuckReason::Overflow)
            }
        }
        Expr::Var(x) => st.get(x.as_str()).copied().ok_or(StuckReason::UnboundVar),
        Expr::Binary(op @ (BinOp::Add | BinOp::Sub | BinOp::Div), l, r) => {
            let a = eval_z(l, st)? as i128;
            let b = eval_z(r, st)? as i128;
            let z = match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                _ => {
                    if b == 0 {
                        return Err(StuckReason::DivByZero);
                    }
                    if a == MIN_SIGNED as i128 && b == -1 {
                        return Err(StuckReason::DivOverflow);
                    }
                    a / b
                }
            };
            if is_int(z) {
                Ok(z as i64)
            } else {
                Err(StuckReason::Overflow)
            }
        }
        _ => Err(StuckReason::UnsupportedForm),
    }
}

/// Both operands of `&&` and `||` are always evaluated.
pub fn eval_bool(e: &Expr, st: &ZStore) -> Result<bool, StuckReason> {
    match e {
        Expr::True => Ok(true),
        Expr::False => Ok(false),
        Expr::Binary(op, l, r) if op.is_comparison() => {
            let a = eval_z(l, st)?;
            let b = eval_z(r, st)?;
            Ok(match op {
                BinOp::Lt => a < b,
                BinOp::Le => a <= b,
                BinOp::Eq => a == b,
                _ => a != b,
            })
        }
        Expr::Binary(BinOp::And, l, r) => {
            let a = eval_bool(l, st)?;
            let b = eval_bool(r, st)?;
            Ok(a && b)
        }
        Expr::Binary(BinOp::Or, l, r) => {
            let a = eval_bool(l, st)?;
            let b = eval_bool(r, st)?;
            Ok(a || b)
        }
        Expr::Not(p) => Ok(!eval_bool(p, st)?),
        Expr::Assign(..) => Err(StuckReason::UnsupportedForm),
        _ => Err(StuckReason::CondUndefined),
    }
}

pub struct Interp {
    fuel: u64,
    pub stats: Stats,
}

enum Halt {
    Stuck(StuckReason),
    Fuel,
}

impl From<StuckReason> for Halt {
    fn from(r: StuckReason) -> Self {
        Halt::Stuck(r)
    }
}

impl Interp {
    pub fn new(fuel: u64) -> Self {
        Interp {
            fuel,
            stats: Stats::default(),
        }
    }

    pub fn exec(&mut self, st: &ZStore, s: &Stmt) -> ExecResult {
        match self.step(st, s) {
            Ok((st, o)) => ExecResult::Terminated(st, o),
            Err(Halt::Stuck(r)) => ExecResult::Stuck(r),
            Err(Halt::Fuel) => ExecResult::FuelExhausted,
        }
    }

    fn step(&mut self, st: &ZStore, s: &Stmt) -> Result<(ZStore, Outcome), Halt> {
        match s {
            Stmt::Skip => Ok((st.clone(), Outcome::Normal)),
            Stmt::Seq(s1, s2) => match self.step(st, s1)? {
                (st, Outcome::Normal) => self.step(&st, s2),
                done => Ok(done),
            },
            Stmt::Let(x, init, body) => {
                if st.is_bound(x.as_str()) {
                    return Err(StuckReason::Shadowing.into());
                }
                let z = eval_z(init, st)?;
                let (out, o) = self.step(&st.with(x, z), body)?;
                Ok((out.without(x), o))
            }
            Stmt::Expr(Expr::Assign(x, rhs)) => {
                let z = eval_z(rhs, st)?;
                Ok((st.with(x, z), Outcome::Normal))
            }
            Stmt::Expr(_) => Err(StuckReason::UnsupportedForm.into()),
            Stmt::If(c, s1, s2) => {
                if eval_bool(c, st)? {
                    self.step(st, s1)
                } else {
                    self.step(st, s2)
                }
            }
            Stmt::Return(e) => Ok((st.clone(), Outcome::Return(eval_z(e, st)?))),
            Stmt::Block(inner) => self.step(st, inner),
            Stmt::While { cond, body, .. } => {
                let mut st = st.clone();
                loop {
                    if !eval_bool(cond, &st)? {
                        return Ok((st, Outcome::Normal));
                    }
                    if self.fuel == 0 {
                        return Err(Halt::Fuel);
                    }
                    self.fuel -= 1;
                    self.stats.iterations += 1;
                    match self.step(&st, body)? {
                        (next, Outcome::Normal) => st = next,
                        done => return Ok(done),
                    }
                }
            }
        }
    }
}

pub fn exec_stmt(st: &ZStore, s: &Stmt, fuel: u64) -> ExecResult {
    Interp::new(fuel).exec(st, s)
}

pub fn exec_with_stats(st: &ZStore, s: &Stmt, fuel: u64) -> (ExecResult, Stats) {
    let mut it = Interp::new(fuel);
    let r = it.exec(st, s);
    (r, it.stats)
}

/// Runs a program body: simplified, with `return 0` appended, from the
/// empty store.
pub fn run_program(body: &Stmt, fuel: u64) -> (ExecResult, Stats) {
    let s = crate::transforms::programify(crate::transforms::simplify(body));
    exec_with_stats(&ZStore::new(), &s, fuel)
}

// -- specification evaluation ------------------------------------------------

/// Mathematical value of an integer expression: no range checks, `None`
/// only for division by zero, unbound names and non-integer forms.
pub fn spec_z(e: &Expr, st: &Store<i128>) -> Option<i128> {
    match e {
        Expr::Int(z) => Some(*z as i128),
        Expr::Var(x) => st.get(x.as_str()).copied(),
        Expr::Binary(BinOp::Add, l, r) => spec_z(l, st)?.checked_add(spec_z(r, st)?),
        Expr::Binary(BinOp::Sub, l, r) => spec_z(l, st)?.checked_sub(spec_z(r, st)?),
        Expr::Binary(BinOp::Div, l, r) => spec_z(l, st)?.checked_div(spec_z(r, st)?),
        _ => None,
    }
}

pub fn spec_bool(e: &Expr, st: &Store<i128>) -> Option<bool> {
    match e {
        Expr::True => Some(true),
        Expr::False => Some(false),
        Expr::Binary(op, l, r) if op.is_comparison() => {
            let a = spec_z(l, st)?;
            let b = spec_z(r, st)?;
            Some(match op {
                BinOp::Lt => a < b,
                BinOp::Le => a <= b,
                BinOp::Eq => a == b,
                _ => a != b,
            })
        }
        Expr::Binary(BinOp::And, l, r) => Some(spec_bool(l, st)? & spec_bool(r, st)?),
        Expr::Binary(BinOp::Or, l, r) => Some(spec_bool(l, st)? | spec_bool(r, st)?),
        Expr::Not(p) => Some(!spec_bool(p, st)?),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FuncVerdict {
    ReturnOk(i64),
    PostViolated(i64),
    NormalTermination,
    Stuck(StuckReason),
    Diverged(u64),
    /// The input does not satisfy the precondition.
    Skipped,
}

impl FuncVerdict {
    /// Allowed for a verified function.
    pub fn is_sound(&self) -> bool {
        matches!(
            self,
            FuncVerdict::ReturnOk(_) | FuncVerdict::Diverged(_) | FuncVerdict::Skipped
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InputError {
    #[error("input does not bind argument `{0}`")]
    Missing(Ident),
    #[error("input binds `{0}`, which is not an argument")]
    Extra(Ident),
    #[error("value {1} for `{0}` is out of range")]
    OutOfRange(Ident, i64),
}

fn widen(st: &ZStore) -> Store<i128> {
    st.iter().map(|(x, z)| (x.clone(), *z as i128)).collect()
}

/// Runs `f` on one argument store.
pub fn check_input(f: &Func, input: &ZStore, fuel: u64) -> Result<FuncVerdict, InputError> {
    for a in &f.args {
        if !input.is_bound(a.as_str()) {
            return Err(InputError::Missing(a.clone()));
        }
    }
    for (x, z) in input.iter() {
        if !f.args.contains(x) {
            return Err(InputError::Extra(x.clone()));
        }
        if !is_int(*z as i128) {
            return Err(InputError::OutOfRange(x.clone(), *z));
        }
    }
    let entry = widen(input);
    if spec_bool(&f.pre, &entry) != Some(true) {
        return Ok(FuncVerdict::Skipped);
    }
    Ok(match exec_stmt(input, &f.body, fuel) {
        ExecResult::Terminated(_, Outcome::Return(z)) => {
            let post_store = entry.with(&Ident::new(RESULT).unwrap(), z as i128);
            if spec_bool(&f.post, &post_store) == Some(true) {
                FuncVerdict::ReturnOk(z)
            } else {
                FuncVerdict::PostViolated(z)
            }
        }
        ExecResult::Terminated(_, Outcome::Normal) => FuncVerdict::NormalTermination,
        ExecResult::Stuck(r) => FuncVerdict::Stuck(r),
        ExecResult::FuelExhausted => FuncVerdict::Diverged(fuel),
    })
}

pub fn check_func(f: &Func, inputs: &[ZStore], fuel: u64) -> Result<Vec<FuncVerdict>, InputError> {
    inputs.iter().map(|i| check_input(f, i, fuel)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use vfx_lang::ast::{countdown, ident};

    fn zs(pairs: &[(&str, i64)]) -> ZStore {
        pairs.iter().map(|(x, z)| (ident(x), *z)).collect()
    }

    #[test]
    fn eval_z_examples() {
        let st = zs(&[("x", 32767)]);
        assert_eq!(eval_z(&Expr::sub(Expr::var("x"), Expr::int(1)), &st), Ok(32766));
        assert_eq!(
            eval_z(&Expr::add(Expr::int(2147483647), Expr::int(1)), &ZStore::new()),
            Err(StuckReason::Overflow)
        );
        assert_eq!(eval_z(&Expr::div(Expr::int(-7), Expr::int(2)), &ZStore::new()), Ok(-3));
        assert_eq!(
            eval_z(&Expr::div(Expr::int(MIN_SIGNED), Expr::int(-1)), &ZStore::new()),
            Err(StuckReason::DivOverflow)
        );
    }

    #[test]
    fn eval_bool_examples() {
        let guard = Expr::lt(Expr::int(0), Expr::var("x"));
        assert_eq!(eval_bool(&guard, &zs(&[("x", 32767)])), Ok(true));
        assert_eq!(eval_bool(&guard, &zs(&[("x", 0)])), Ok(false));
        let e = Expr::lt(Expr::div(Expr::int(1), Expr::int(0)), Expr::int(5));
        assert_eq!(eval_bool(&e, &ZStore::new()), Err(StuckReason::DivByZero));
        // strict: the right operand's failure is not masked
        let e = Expr::or(Expr::True, e);
        assert_eq!(eval_bool(&e, &ZStore::new()), Err(StuckReason::DivByZero));
    }

    #[test]
    fn countdown_returns_zero_after_32767_iterations() {
        let (r, stats) = exec_with_stats(&ZStore::new(), &countdown().body, 40_000);
        assert_eq!(r, ExecResult::Terminated(ZStore::new(), Outcome::Return(0)));
        assert_eq!(stats.iterations, 32767);
    }

    #[test]
    fn infinite_loop_exhausts_fuel() {
        let s = Stmt::while_(Expr::True, Expr::True, Stmt::seq(Stmt::Skip, Stmt::Skip));
        assert_eq!(exec_stmt(&ZStore::new(), &s, 1000), ExecResult::FuelExhausted);
    }

    #[test]
    fn return_skips_the_rest() {
        let s = Stmt::seq(
            Stmt::ret(Expr::int(7)),
            Stmt::assign("x", Expr::div(Expr::int(1), Expr::int(0))),
        );
        assert_eq!(
            exec_stmt(&ZStore::new(), &s, 0),
            ExecResult::Terminated(ZStore::new(), Outcome::Return(7))
        );
    }

    #[test]
    fn let_unbinds_and_rejects_shadowing() {
        let s = Stmt::let_("y", Expr::int(1), Stmt::Skip);
        assert_eq!(
            exec_stmt(&ZStore::new(), &s, 0),
            ExecResult::Terminated(ZStore::new(), Outcome::Normal)
        );
        assert_eq!(
            exec_stmt(&zs(&[("y", 0)]), &s, 0),
            ExecResult::Stuck(StuckReason::Shadowing)
        );
    }

    #[test]
    fn run_program_examples() {
        assert!(matches!(
            run_program(&countdown().body, 500_000).0,
            ExecResult::Terminated(_, Outcome::Return(0))
        ));
        assert!(matches!(
            run_program(&Stmt::Skip, 0).0,
            ExecResult::Terminated(_, Outcome::Return(0))
        ));
        let r = run_program(&Stmt::assign("x", Expr::int(1)), 0).0;
        assert_eq!(r, ExecResult::Terminated(zs(&[("x", 1)]), Outcome::Return(0)));
    }

    #[test]
    fn check_func_verdicts() {
        assert_eq!(
            check_func(&countdown(), &[ZStore::new()], 200_000).unwrap(),
            vec![FuncVerdict::ReturnOk(0)]
        );
        let f = Func::new(
            vec![ident("a")],
            Expr::True,
            Stmt::list([Stmt::ret(Expr::var("a"))]),
            Expr::eq(Expr::var(RESULT), Expr::int(0)),
        );
        assert_eq!(
            check_func(&f, &[zs(&[("a", 1)])], 10).unwrap(),
            vec![FuncVerdict::PostViolated(1)]
        );
        let g = Func::new(vec![], Expr::True, Stmt::list([Stmt::Skip]), Expr::True);
        assert_eq!(
            check_func(&g, &[ZStore::new()], 10).unwrap(),
            vec![FuncVerdict::NormalTermination]
        );
        let h = Func::new(vec![ident("a")], Expr::lt(Expr::int(0), Expr::var("a")), Stmt::Skip, Expr::True);
        assert_eq!(
            check_func(&h, &[zs(&[("a", 0)])], 10).unwrap(),
            vec![FuncVerdict::Skipped]
        );
        assert!(check_func(&h, &[ZStore::new()], 10).is_err());
    }
}
