//! Refutation of fact sets over the integers.
//!
//! Facts are linearized with exact integers, disjunctions are split one at
//! a time, and each conjunction of linear atoms is refuted by a rational
//! simplex (Bland's rule) with branch-and-bound on fractional values. The
//! only answer that matters is "refuted"; anything else, including hitting
//! a limit, counts as not refuted.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::goal::{Cmp, Fact, Val};

const MAX_CASES: usize = 4096;
const MAX_NODES: usize = 4000;

/// `Σ coeff·var + konst`. Variables are goal variables and the checker's own
/// auxiliary unknowns.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Affine {
    coeff: BTreeMap<usize, BigInt>,
    konst: BigInt,
}

impl Affine {
    fn num(z: BigInt) -> Self {
        Affine {
            coeff: BTreeMap::new(),
            konst: z,
        }
    }

    fn unknown(i: usize) -> Self {
        Affine {
            coeff: BTreeMap::from([(i, BigInt::one())]),
            konst: BigInt::zero(),
        }
    }

    fn combine(&self, k: &BigInt, other: &Affine) -> Affine {
        let mut out = self.clone();
        for (v, c) in &other.coeff {
            let e = out.coeff.entry(*v).or_insert_with(BigInt::zero);
            *e += k * c;
            if e.is_zero() {
                out.coeff.remove(v);
            }
        }
        out.konst += k * &other.konst;
        out
    }

    fn minus(&self, other: &Affine) -> Affine {
        self.combine(&-BigInt::one(), other)
    }

    fn shift(&self, k: i64) -> Affine {
        let mut out = self.clone();
        out.konst += k;
        out
    }

    fn as_num(&self) -> Option<&BigInt> {
        self.coeff.is_empty().then_some(&self.konst)
    }
}

/// `expr ≤ 0` or `expr = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Atom {
    expr: Affine,
    equality: bool,
}

#[derive(Debug, Clone)]
enum Tree {
    Atom(Atom),
    All(Vec<Tree>),
    Any(Vec<Tree>),
}

#[derive(Default)]
struct Linearizer {
    unknowns: HashMap<u32, usize>,
    count: usize,
    quotients: HashMap<(Val, Val), usize>,
    side: Vec<Tree>,
}

fn le(a: Affine) -> Tree {
    Tree::Atom(Atom {
        expr: a,
        equality: false,
    })
}

impl Linearizer {
    fn new_unknown(&mut self) -> usize {
        self.count += 1;
        self.count - 1
    }

    fn val(&mut self, v: &Val) -> Affine {
        match v {
            Val::Num(z) => Affine::num(BigInt::from(*z)),
            Val::Var(x) => {
                let next = self.count;
                let i = *self.unknowns.entry(*x).or_insert(next);
                if i == next {
                    self.count += 1;
                }
                Affine::unknown(i)
            }
            Val::Plus(a, b) => {
                let a = self.val(a);
                let b = self.val(b);
                a.combine(&BigInt::one(), &b)
            }
            Val::Minus(a, b) => {
                let a = self.val(a);
                let b = self.val(b);
                a.minus(&b)
            }
            Val::Quot(a, b) => self.quotient(a, b),
        }
    }

    /// A truncating quotient. With a known nonzero divisor `d` the result
    /// `q` is tied to the dividend `n` by `n - d·q` lying between `0` and
    /// `|d| - 1` with the sign of `n`. Any other quotient is left as an
    /// opaque unknown, which can only lose refutations.
    fn quotient(&mut self, a: &Val, b: &Val) -> Affine {
        let key = (a.clone(), b.clone());
        if let Some(i) = self.quotients.get(&key) {
            return Affine::unknown(*i);
        }
        let n = self.val(a);
        let d = self.val(b);
        let d = match d.as_num() {
            Some(d) if !d.is_zero() => d.clone(),
            _ => {
                let i = self.new_unknown();
                self.quotients.insert(key, i);
                return Affine::unknown(i);
            }
        };
        if let Some(n) = n.as_num() {
            // BigInt division truncates toward zero.
            return Affine::num(n / &d);
        }
        let q = self.new_unknown();
        self.quotients.insert(key, q);
        let rem = n.combine(&-d.clone(), &Affine::unknown(q));
        let top = d.abs() - BigInt::one();
        let zero = Affine::num(BigInt::zero());
        let neg_rem = zero.minus(&rem);
        let mut rem_le_top = rem.clone();
        rem_le_top.konst -= &top;
        let mut neg_rem_le_top = neg_rem.clone();
        neg_rem_le_top.konst -= &top;
        let nonneg = Tree::All(vec![
            le(zero.minus(&n)),
            le(neg_rem.clone()),
            le(rem_le_top),
        ]);
        let negative = Tree::All(vec![le(n.shift(1)), le(rem.clone()), le(neg_rem_le_top)]);
        self.side.push(Tree::Any(vec![nonneg, negative]));
        Affine::unknown(q)
    }

    fn fact(&mut self, f: &Fact, truth: bool) -> Tree {
        match f {
            Fact::Yes | Fact::No => {
                if (*f == Fact::Yes) == truth {
                    Tree::All(vec![])
                } else {
                    Tree::Any(vec![])
                }
            }
            Fact::Neg(a) => self.fact(a, !truth),
            Fact::Both(a, b) | Fact::Either(a, b) => {
                let parts = vec![self.fact(a, truth), self.fact(b, truth)];
                if matches!(f, Fact::Both(..)) == truth {
                    Tree::All(parts)
                } else {
                    Tree::Any(parts)
                }
            }
            Fact::Rel(c, a, b) => {
                let a = self.val(a);
                let b = self.val(b);
                // a < b  <=>  a - b + 1 <= 0
                let lt = |x: &Affine, y: &Affine| le(x.minus(y).shift(1));
                let eq = |x: &Affine, y: &Affine| {
                    Tree::Atom(Atom {
                        expr: x.minus(y),
                        equality: true,
                    })
                };
                match (c, truth) {
                    (Cmp::Lt, true) => lt(&a, &b),
                    (Cmp::Lt, false) => le(b.minus(&a)),
                    (Cmp::Le, false) => lt(&b, &a),
                    (Cmp::Le, true) => le(a.minus(&b)),
                    (Cmp::Eq, true) | (Cmp::Ne, false) => eq(&a, &b),
                    _ => Tree::Any(vec![lt(&a, &b), lt(&b, &a)]),
                }
            }
        }
    }
}

/// True only if no integer assignment satisfies all of `facts`.
pub fn refutes(facts: &[Fact]) -> bool {
    let mut lin = Linearizer::default();
    let mut trees: Vec<Tree> = facts.iter().map(|f| lin.fact(f, true)).collect();
    trees.append(&mut lin.side);
    let mut budget = Budget {
        cases: 0,
        nodes: 0,
    };
    cases(lin.count, Vec::new(), trees, &mut budget) == Some(true)
}

struct Budget {
    cases: usize,
    nodes: usize,
}

/// `Some(true)`: refuted in every case. `None`: a limit was hit.
fn cases(n: usize, mut atoms: Vec<Atom>, mut todo: Vec<Tree>, budget: &mut Budget) -> Option<bool> {
    let mut pending = Vec::new();
    while let Some(t) = todo.pop() {
        match t {
            Tree::Atom(a) => atoms.push(a),
            Tree::All(ts) => todo.extend(ts),
            Tree::Any(ts) => {
                if ts.is_empty() {
                    return Some(true);
                }
                if ts.len() == 1 {
                    todo.extend(ts);
                } else {
                    pending.push(ts);
                }
            }
        }
    }
    match integer_feasible(n, &atoms, budget) {
        Some(false) => return Some(true),
        None => return None,
        Some(true) => {}
    }
    let Some(split) = pending.pop() else {
        return Some(false);
    };
    for choice in split {
        budget.cases += 1;
        if budget.cases > MAX_CASES {
            return None;
        }
        let mut next = pending.iter().cloned().map(Tree::Any).collect::<Vec<_>>();
        next.push(choice);
        if !cases(n, atoms.clone(), next, budget)? {
            return Some(false);
        }
    }
    Some(true)
}

// -- simplex ------------------------------------------------------------------

type Q = BigRational;

fn q(z: &BigInt) -> Q {
    Q::from_integer(z.clone())
}

#[derive(Clone)]
struct Tableau {
    /// Columns: the `n` structural unknowns, then one slack per row.
    width: usize,
    /// For each basic column, its row over the nonbasic columns.
    rows: BTreeMap<usize, Vec<Q>>,
    lower: Vec<Option<Q>>,
    upper: Vec<Option<Q>>,
    value: Vec<Q>,
}

enum Outcome {
    Feasible,
    Infeasible,
}

impl Tableau {
    /// `n` free unknowns and, per atom, a slack equal to the atom's variable
    /// part, bounded by the negated constant.
    fn new(n: usize, atoms: &[Atom]) -> Option<Tableau> {
        let width = n + atoms.len();
        let mut t = Tableau {
            width,
            rows: BTreeMap::new(),
            lower: vec![None; width],
            upper: vec![None; width],
            value: vec![Q::zero(); width],
        };
        for (k, a) in atoms.iter().enumerate() {
            // Integer tightening: divide by the coefficient gcd.
            let g = a
                .expr
                .coeff
                .values()
                .fold(BigInt::zero(), |g, c| g.gcd(c));
            let mut row = vec![Q::zero(); width];
            let bound = -&a.expr.konst;
            if g.is_zero() {
                let ok = if a.equality { bound.is_zero() } else { bound >= BigInt::zero() };
                if !ok {
                    return None;
                }
                continue;
            }
            for (v, c) in &a.expr.coeff {
                row[*v] = q(&(c / &g));
            }
            let slack = n + k;
            if a.equality {
                if !(&bound % &g).is_zero() {
                    return None;
                }
                let b = q(&(&bound / &g));
                t.lower[slack] = Some(b.clone());
                t.upper[slack] = Some(b);
            } else {
                t.upper[slack] = Some(q(&Integer::div_floor(&bound, &g)));
            }
            t.rows.insert(slack, row);
        }
        Some(t)
    }

    fn violated(&self, x: usize) -> Option<bool> {
        let v = &self.value[x];
        if matches!(&self.lower[x], Some(l) if v < l) {
            return Some(true);
        }
        if matches!(&self.upper[x], Some(u) if v > u) {
            return Some(false);
        }
        None
    }

    fn can_raise(&self, x: usize) -> bool {
        self.upper[x].as_ref().is_none_or(|u| &self.value[x] < u)
    }

    fn can_lower(&self, x: usize) -> bool {
        self.lower[x].as_ref().is_none_or(|l| &self.value[x] > l)
    }

    fn solve(&mut self) -> Outcome {
        loop {
            let Some((basic, too_low)) = self
                .rows
                .keys()
                .find_map(|&b| self.violated(b).map(|low| (b, low)))
            else {
                return Outcome::Feasible;
            };
            let row = &self.rows[&basic];
            let entering = (0..self.width).find(|&j| {
                let a = &row[j];
                if a.is_zero() || self.rows.contains_key(&j) {
                    return false;
                }
                let up = a.is_positive() == too_low;
                if up {
                    self.can_raise(j)
                } else {
                    self.can_lower(j)
                }
            });
            let Some(j) = entering else {
                return Outcome::Infeasible;
            };
            let target = if too_low {
                self.lower[basic].clone().unwrap()
            } else {
                self.upper[basic].clone().unwrap()
            };
            self.pivot_and_update(basic, j, target);
        }
    }

    fn pivot_and_update(&mut self, basic: usize, j: usize, target: Q) {
        let a_ij = self.rows[&basic][j].clone();
        let theta = (&target - &self.value[basic]) / &a_ij;
        self.value[basic] = target;
        self.value[j] += &theta;
        for (&k, row) in &self.rows {
            if k != basic {
                let delta = &row[j] * &theta;
                self.value[k] += delta;
            }
        }
        // basic = Σ a_ik x_k  =>  x_j = (basic - Σ_{k≠j} a_ik x_k) / a_ij
        let mut row = self.rows.remove(&basic).unwrap();
        let inv = Q::one() / &a_ij;
        let mut new_row: Vec<Q> = row.iter_mut().map(|c| -(&*c) * &inv).collect();
        new_row[j] = Q::zero();
        new_row[basic] = inv;
        for other in self.rows.values_mut() {
            let c = std::mem::replace(&mut other[j], Q::zero());
            if c.is_zero() {
                continue;
            }
            for (k, nk) in new_row.iter().enumerate() {
                if !nk.is_zero() {
                    other[k] += &c * nk;
                }
            }
        }
        self.rows.insert(j, new_row);
    }
}

/// Branch-and-bound over the first `n` columns. `Some(false)` only when
/// every branch is infeasible.
fn integer_feasible(n: usize, atoms: &[Atom], budget: &mut Budget) -> Option<bool> {
    let Some(t) = Tableau::new(n, atoms) else {
        return Some(false);
    };
    let mut stack = vec![t];
    while let Some(mut t) = stack.pop() {
        budget.nodes += 1;
        if budget.nodes > MAX_NODES {
            return None;
        }
        if let Outcome::Infeasible = t.solve() {
            continue;
        }
        let Some(x) = (0..n).find(|&x| !t.value[x].is_integer()) else {
            return Some(true);
        };
        let v = t.value[x].clone();
        if !x_bound_conflicts(&t, x, Some(v.floor()), None) {
            let mut down = t.clone();
            tighten(&mut down, x, Some(v.floor()), None);
            stack.push(down);
        }
        if !x_bound_conflicts(&t, x, None, Some(v.ceil())) {
            tighten(&mut t, x, None, Some(v.ceil()));
            stack.push(t);
        }
    }
    Some(false)
}

fn x_bound_conflicts(t: &Tableau, x: usize, upper: Option<Q>, lower: Option<Q>) -> bool {
    let lo = lower.as_ref().or(t.lower[x].as_ref());
    let hi = upper.as_ref().or(t.upper[x].as_ref());
    matches!((lo, hi), (Some(l), Some(h)) if l > h)
}

/// Adds a bound on column `x`. A nonbasic column is moved onto the bound
/// so the basic values stay consistent.
fn tighten(t: &mut Tableau, x: usize, upper: Option<Q>, lower: Option<Q>) {
    if let Some(u) = upper {
        t.upper[x] = Some(match t.upper[x].take() {
            Some(old) if old < u => old,
            _ => u,
        });
    }
    if let Some(l) = lower {
        t.lower[x] = Some(match t.lower[x].take() {
            Some(old) if old > l => old,
            _ => l,
        });
    }
    if t.rows.contains_key(&x) {
        return;
    }
    let target = match t.violated(x) {
        Some(true) => t.lower[x].clone().unwrap(),
        Some(false) => t.upper[x].clone().unwrap(),
        None => return,
    };
    let delta = &target - &t.value[x];
    t.value[x] = target;
    for (&k, row) in &t.rows {
        let d = &row[x] * &delta;
        t.value[k] += d;
    }
}
