//! Random well-formed functions and statements for differential testing.
//!
//! Functions take their arguments in small ranges fixed by the
//! precondition, use bounded countdown loops, and mostly stay clear of the
//! integer limits, so a fair share of them verify. A few constants sit at
//! the limits to keep the failing paths exercised.

use rand::seq::SliceRandom;
use rand::Rng;

use vfx_lang::ast::{ident, BinOp, Expr, Func, Ident, Stmt, RESULT};
use vfx_lang::store::{MAX_SIGNED, MIN_SIGNED};

use crate::cbsem::ZStore;

#[derive(Debug, Clone)]
pub struct GenFunc {
    pub func: Func,
    /// Range each argument is drawn from, a little wider than the
    /// precondition so that some samples are skipped.
    pub arg_ranges: Vec<(Ident, i64, i64)>,
}

impl GenFunc {
    pub fn sample_input(&self, rng: &mut impl Rng) -> ZStore {
        self.arg_ranges
            .iter()
            .map(|(x, lo, hi)| (x.clone(), rng.gen_range(*lo..=*hi)))
            .collect()
    }
}

const ARG_NAMES: [&str; 3] = ["a", "b", "c"];

fn small_const(rng: &mut impl Rng) -> i64 {
    if rng.gen_ratio(1, 25) {
        *[MAX_SIGNED, MIN_SIGNED, MAX_SIGNED - 1, MIN_SIGNED + 1]
            .choose(rng)
            .unwrap()
    } else {
        rng.gen_range(-12..=12)
    }
}

struct FuncGen<'r, R: Rng> {
    rng: &'r mut R,
    next_local: usize,
}

impl<R: Rng> FuncGen<'_, R> {
    fn fresh_local(&mut self) -> Ident {
        let x = ident(&format!("v{}", self.next_local));
        self.next_local += 1;
        x
    }

    fn expr(&mut self, scope: &[Ident], depth: u32) -> Expr {
        let leaf = depth == 0 || self.rng.gen_ratio(2, 5);
        if leaf {
            if !scope.is_empty() && self.rng.gen_bool(0.6) {
                return Expr::Var(scope.choose(self.rng).unwrap().clone());
            }
            return Expr::int(small_const(self.rng));
        }
        match self.rng.gen_range(0..10) {
            0..=3 => Expr::add(self.expr(scope, depth - 1), self.expr(scope, depth - 1)),
            4..=7 => Expr::sub(self.expr(scope, depth - 1), self.expr(scope, depth - 1)),
            8 => {
                let d = *[2, 3, -2, 5, 1, -1, 0].choose(self.rng).unwrap();
                Expr::div(self.expr(scope, depth - 1), Expr::int(d))
            }
            _ => Expr::div(self.expr(scope, depth - 1), self.expr(scope, 0)),
        }
    }

    fn cond(&mut self, scope: &[Ident], depth: u32) -> Expr {
        if depth > 0 && self.rng.gen_ratio(1, 4) {
            return match self.rng.gen_range(0..3) {
                0 => Expr::and(self.cond(scope, depth - 1), self.cond(scope, depth - 1)),
                1 => Expr::or(self.cond(scope, depth - 1), self.cond(scope, depth - 1)),
                _ => Expr::not(self.cond(scope, depth - 1)),
            };
        }
        let op = *[BinOp::Lt, BinOp::Le, BinOp::Eq, BinOp::Ne]
            .choose(self.rng)
            .unwrap();
        Expr::binary(op, self.expr(scope, 1), self.expr(scope, 1))
    }

    /// A statement list; `must_return` forces a final `return`.
    fn block(&mut self, scope: &mut Vec<Ident>, locals: &[Ident], depth: u32, must_return: bool) -> Stmt {
        let n = self.rng.gen_range(0..=3);
        self.items(scope, locals.to_vec(), depth, n, must_return)
    }

    fn items(
        &mut self,
        scope: &mut Vec<Ident>,
        mut locals: Vec<Ident>,
        depth: u32,
        n: usize,
        must_return: bool,
    ) -> Stmt {
        if n == 0 {
            return if must_return {
                Stmt::seq(Stmt::ret(self.expr(scope, 2)), Stmt::Skip)
            } else {
                Stmt::Skip
            };
        }
        let choice = self.rng.gen_range(0..10);
        match choice {
            0..=2 => {
                let x = self.fresh_local();
                let init = self.expr(scope, 2);
                scope.push(x.clone());
                locals.push(x.clone());
                let rest = self.items(scope, locals, depth, n - 1, must_return);
                scope.pop();
                Stmt::Let(x, init, Box::new(rest))
            }
            3..=4 if !locals.is_empty() => {
                let x = locals.choose(self.rng).unwrap().clone();
                let rhs = self.expr(scope, 2);
                let s = Stmt::Expr(Expr::Assign(x, Box::new(rhs)));
                Stmt::seq(s, self.items(scope, locals, depth, n - 1, must_return))
            }
            5..=6 if depth > 0 => {
                let c = self.cond(scope, 1);
                let ret_then = self.rng.gen_ratio(1, 3);
                let then_s = Stmt::block(self.block(scope, &locals, depth - 1, ret_then));
                let else_s = if self.rng.gen_bool(0.5) {
                    Stmt::block(self.block(scope, &locals, depth - 1, false))
                } else {
                    Stmt::Skip
                };
                let s = Stmt::if_(c, then_s, else_s);
                Stmt::seq(s, self.items(scope, locals, depth, n - 1, must_return))
            }
            7..=8 if depth > 0 => {
                let s = self.countdown_loop(scope, &locals, depth - 1);
                Stmt::seq(s, self.items(scope, locals, depth, n - 1, must_return))
            }
            _ => {
                if self.rng.gen_ratio(1, 6) {
                    Stmt::seq(Stmt::ret(self.expr(scope, 2)), Stmt::Skip)
                } else {
                    self.items(scope, locals, depth, n - 1, must_return)
                }
            }
        }
    }

    /// `int i = k; while (0 < i) //@ invariant 0 <= i; { i = i - 1; ... }`
    fn countdown_loop(&mut self, scope: &mut Vec<Ident>, locals: &[Ident], depth: u32) -> Stmt {
        let i = self.fresh_local();
        let init = if !scope.is_empty() && self.rng.gen_ratio(1, 3) {
            Expr::Var(scope.choose(self.rng).unwrap().clone())
        } else {
            Expr::int(self.rng.gen_range(0..=20))
        };
        let iv = || Expr::Var(i.clone());
        let mut invariant = Expr::le(Expr::int(0), iv());
        if self.rng.gen_ratio(1, 3) {
            invariant = Expr::and(invariant, Expr::le(iv(), Expr::int(20)));
        }
        scope.push(i.clone());
        let mut inner_locals: Vec<Ident> = locals.to_vec();
        let decrement = Stmt::Expr(Expr::Assign(i.clone(), Box::new(Expr::sub(iv(), Expr::int(1)))));
        let extra = if self.rng.gen_bool(0.5) && !inner_locals.is_empty() {
            let x = inner_locals.choose(self.rng).unwrap().clone();
            let rhs = self.expr(scope, 1);
            Stmt::Expr(Expr::Assign(x, Box::new(rhs)))
        } else {
            Stmt::Skip
        };
        inner_locals.retain(|x| x != &i);
        let more = if depth > 0 && self.rng.gen_ratio(1, 4) {
            Stmt::block(self.block(scope, &inner_locals, depth - 1, false))
        } else {
            Stmt::Skip
        };
        scope.pop();
        let body = Stmt::seq(
            Stmt::block(Stmt::list([decrement, extra, more])),
            Stmt::Skip,
        );
        Stmt::Let(
            i.clone(),
            init,
            Box::new(Stmt::seq(Stmt::while_(Expr::lt(Expr::int(0), iv()), invariant, body), Stmt::Skip)),
        )
    }

    fn post(&mut self, args: &[Ident]) -> Expr {
        let result = Expr::var(RESULT);
        match self.rng.gen_range(0..6) {
            0..=1 => Expr::True,
            2 => Expr::le(Expr::int(MIN_SIGNED), result),
            3 if !args.is_empty() => {
                let a = Expr::Var(args.choose(self.rng).unwrap().clone());
                let op = *[BinOp::Le, BinOp::Lt, BinOp::Eq, BinOp::Ne].choose(self.rng).unwrap();
                Expr::binary(op, a, result)
            }
            _ => {
                let op = *[BinOp::Le, BinOp::Lt, BinOp::Eq, BinOp::Ne].choose(self.rng).unwrap();
                Expr::binary(op, result, Expr::int(self.rng.gen_range(-40..=40)))
            }
        }
    }
}

/// A random well-formed function.
pub fn gen_func(rng: &mut impl Rng) -> GenFunc {
    let nargs = rng.gen_range(0..=ARG_NAMES.len());
    let args: Vec<Ident> = ARG_NAMES[..nargs].iter().map(|x| ident(x)).collect();
    let mut pre = Expr::True;
    let mut arg_ranges = Vec::new();
    for a in &args {
        let (lo, hi) = if rng.gen_ratio(1, 20) {
            (MAX_SIGNED - 4, MAX_SIGNED)
        } else {
            let lo = rng.gen_range(-20..=10);
            (lo, lo + rng.gen_range(0..=30))
        };
        let range = Expr::and(
            Expr::le(Expr::int(lo), Expr::Var(a.clone())),
            Expr::le(Expr::Var(a.clone()), Expr::int(hi)),
        );
        pre = if pre == Expr::True { range } else { Expr::and(pre, range) };
        arg_ranges.push((a.clone(), (lo - 3).max(MIN_SIGNED), (hi + 3).min(MAX_SIGNED)));
    }
    let mut g = FuncGen {
        rng,
        next_local: 0,
    };
    let mut scope = args.clone();
    let n = g.rng.gen_range(1..=4);
    let must_return = !g.rng.gen_ratio(1, 12);
    let body = g.items(&mut scope, Vec::new(), 2, n, must_return);
    let post = g.post(&args);
    GenFunc {
        func: Func::new(args, pre, body, post),
        arg_ranges,
    }
}

const STMT_VARS: [&str; 3] = ["x", "y", "z"];

/// A random statement over `x`, `y`, `z`, heavy on `skip` and sequencing
/// so that the normalizations have work to do. Loops may diverge; lets may
/// shadow.
pub fn gen_stmt<R: Rng + ?Sized>(rng: &mut R, depth: u32) -> Stmt {
    if depth == 0 {
        return match rng.gen_range(0..4) {
            0 => Stmt::Skip,
            1 => Stmt::ret(stmt_term(rng)),
            _ => Stmt::assign(STMT_VARS.choose(rng).unwrap(), stmt_term(rng)),
        };
    }
    match rng.gen_range(0..9) {
        0..=2 => Stmt::seq(gen_stmt(rng, depth - 1), gen_stmt(rng, depth - 1)),
        3 => Stmt::seq(gen_stmt(rng, depth - 1), Stmt::Skip),
        4 => {
            let x = STMT_VARS.choose(rng).unwrap();
            Stmt::let_(x, stmt_term(rng), gen_stmt(rng, depth - 1))
        }
        5 => {
            let c = Expr::lt(stmt_term(rng), stmt_term(rng));
            Stmt::if_(c, gen_stmt(rng, depth - 1), gen_stmt(rng, depth - 1))
        }
        6 => {
            let x = *STMT_VARS.choose(rng).unwrap();
            let guard = Expr::lt(Expr::int(0), Expr::var(x));
            let dec = Stmt::assign(x, Expr::sub(Expr::var(x), Expr::int(1)));
            let body = if rng.gen_bool(0.8) {
                Stmt::seq(dec, gen_stmt(rng, depth - 1))
            } else {
                gen_stmt(rng, depth - 1)
            };
            Stmt::while_(guard, Expr::True, body)
        }
        7 => Stmt::block(gen_stmt(rng, depth - 1)),
        _ => gen_stmt(rng, 0),
    }
}

fn stmt_var<R: Rng + ?Sized>(rng: &mut R) -> Expr {
    Expr::var(STMT_VARS.choose(rng).unwrap())
}

fn stmt_term<R: Rng + ?Sized>(rng: &mut R) -> Expr {
    match rng.gen_range(0..5) {
        0 => Expr::int(rng.gen_range(-5..=5)),
        1 => Expr::add(stmt_var(rng), Expr::int(rng.gen_range(-3..=3))),
        2 => Expr::sub(stmt_var(rng), stmt_var(rng)),
        3 => Expr::div(stmt_var(rng), Expr::int(*[2, -3, 0].choose(rng).unwrap())),
        _ => stmt_var(rng),
    }
}

/// A store binding some of `x`, `y`, `z` to small values.
pub fn gen_store(rng: &mut impl Rng) -> ZStore {
    let mut st = ZStore::new();
    for x in STMT_VARS {
        if rng.gen_bool(0.8) {
            st = st.with(&ident(x), rng.gen_range(-4..=8));
        }
    }
    st
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;
    use vfx_lang::analysis::well_formed;

    #[test]
    fn generated_functions_are_well_formed() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..300 {
            let g = gen_func(&mut rng);
            assert_eq!(well_formed(&g.func), vec![], "{:?}", g.func);
        }
    }

    #[test]
    fn generation_is_reproducible() {
        let a = gen_func(&mut StdRng::seed_from_u64(3)).func;
        let b = gen_func(&mut StdRng::seed_from_u64(3)).func;
        assert_eq!(a, b);
    }
}
