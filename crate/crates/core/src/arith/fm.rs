//! Integer feasibility of a conjunction of linear constraints.
//!
//! Equalities with a unit coefficient are solved and substituted away; the
//! rest become pairs of inequalities. Inequalities are then eliminated one
//! variable at a time (Fourier-Motzkin), tightening every derived
//! constraint by its coefficient gcd. An infeasible constant at any point
//! proves the conjunction unsatisfiable over the integers. Otherwise a model
//! is searched for by back-substitution, trying integer values closest to
//! zero first and backtracking when the rational shadow has no integer point.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_integer::Integer;

use super::linear::{Constraint, Lin, Normal, Overflow, Relation, Var};

pub type Assignment = BTreeMap<Var, i128>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Infeasible,
    Feasible(Assignment),
    Unknown(&'static str),
}

const MAX_CONSTRAINTS: usize = 2000;
const MAX_CANDIDATES: usize = 256;
const SEARCH_BUDGET: usize = 50_000;

pub fn check(constraints: &[Constraint]) -> Feasibility {
    match run(constraints) {
        Ok(f) => f,
        Err(Overflow) => Feasibility::Unknown("arithmetic overflow"),
    }
}

fn run(constraints: &[Constraint]) -> Result<Feasibility, Overflow> {
    let mut eqs = Vec::new();
    let mut les = Vec::new();
    for c in constraints {
        match c.clone().normalize() {
            Normal::Valid => {}
            Normal::Infeasible => return Ok(Feasibility::Infeasible),
            Normal::Constraint(c) => match c.rel {
                Relation::Eq => eqs.push(c.lin),
                Relation::Le => les.push(c.lin),
            },
        }
    }

    // Solve unit equalities: `c·v + rest = 0` with c = ±1 gives v = -c·rest.
    let mut defs: Vec<(Var, Lin)> = Vec::new();
    while let Some((i, v, c)) = eqs.iter().enumerate().find_map(|(i, lin)| {
        lin.coeffs
            .iter()
            .find(|(_, c)| c.abs() == 1)
            .map(|(v, c)| (i, *v, *c))
    }) {
        let lin = eqs.swap_remove(i);
        let mut rest = lin.clone();
        rest.coeffs.remove(&v);
        let def = rest.scale(-c)?;
        let mut next_eqs = Vec::new();
        for e in eqs.drain(..) {
            match Constraint::eq(e.substitute(v, &def)?).normalize() {
                Normal::Valid => {}
                Normal::Infeasible => return Ok(Feasibility::Infeasible),
                Normal::Constraint(c) => next_eqs.push(c.lin),
            }
        }
        eqs = next_eqs;
        for l in les.iter_mut() {
            *l = l.substitute(v, &def)?;
        }
        defs.push((v, def));
    }
    for e in eqs {
        les.push(e.scale(-1)?);
        les.push(e);
    }

    let mut current = BTreeSet::new();
    for l in les {
        match Constraint::le(l).normalize() {
            Normal::Valid => {}
            Normal::Infeasible => return Ok(Feasibility::Infeasible),
            Normal::Constraint(c) => {
                current.insert(c.lin);
            }
        }
    }
    let mut current: Vec<Lin> = prune(current);

    let mut stages: Vec<(Var, Vec<Lin>)> = Vec::new();
    loop {
        let vars: BTreeSet<Var> = current.iter().flat_map(|l| l.coeffs.keys().copied()).collect();
        let Some(v) = vars.iter().copied().min_by_key(|v| {
            let pos = current.iter().filter(|l| l.coeff(*v) > 0).count();
            let neg = current.iter().filter(|l| l.coeff(*v) < 0).count();
            (pos * neg) as isize - (pos + neg) as isize
        }) else {
            break;
        };
        let (with, without): (Vec<Lin>, Vec<Lin>) =
            current.into_iter().partition(|l| l.coeff(v) != 0);
        let mut next: BTreeSet<Lin> = without.into_iter().collect();
        for up in with.iter().filter(|l| l.coeff(v) > 0) {
            for low in with.iter().filter(|l| l.coeff(v) < 0) {
                let a = up.coeff(v);
                let b = -low.coeff(v);
                let combo = up.scale(b)?.add_scaled(a, low)?;
                match Constraint::le(combo).normalize() {
                    Normal::Valid => {}
                    Normal::Infeasible => return Ok(Feasibility::Infeasible),
                    Normal::Constraint(c) => {
                        next.insert(c.lin);
                    }
                }
            }
        }
        if next.len() > MAX_CONSTRAINTS {
            return Ok(Feasibility::Unknown("too many derived constraints"));
        }
        stages.push((v, with));
        current = prune(next);
    }

    let mut model = HashMap::new();
    let mut budget = SEARCH_BUDGET;
    match search(&stages, stages.len(), &mut model, &mut budget)? {
        Search::Found => {}
        // Every interval was enumerated in full, so no integer point exists.
        Search::Exhausted => return Ok(Feasibility::Infeasible),
        Search::OutOfBudget => {
            return Ok(Feasibility::Unknown("no integer point found"))
        }
    }
    for (v, def) in defs.iter().rev() {
        let value = def.eval(&|u| model.get(&u).copied().unwrap_or(0))?;
        model.insert(*v, value);
    }
    let mut assignment = Assignment::new();
    for c in constraints {
        for v in c.lin.coeffs.keys() {
            assignment.insert(*v, model.get(v).copied().unwrap_or(0));
        }
    }
    let lookup = |u: Var| assignment.get(&u).copied().unwrap_or(0);
    for c in constraints {
        if !c.holds(&lookup)? {
            return Ok(Feasibility::Unknown("model check failed"));
        }
    }
    Ok(Feasibility::Feasible(assignment))
}

/// Keeps only the tightest constraint per coefficient vector.
fn prune(set: BTreeSet<Lin>) -> Vec<Lin> {
    let mut best: BTreeMap<BTreeMap<Var, i128>, i128> = BTreeMap::new();
    for l in set {
        let e = best.entry(l.coeffs).or_insert(i128::MIN);
        *e = (*e).max(l.constant);
    }
    best.into_iter()
        .map(|(coeffs, constant)| Lin { coeffs, constant })
        .collect()
}

enum Search {
    Found,
    Exhausted,
    OutOfBudget,
}

fn search(
    stages: &[(Var, Vec<Lin>)],
    k: usize,
    model: &mut HashMap<Var, i128>,
    budget: &mut usize,
) -> Result<Search, Overflow> {
    if k == 0 {
        return Ok(Search::Found);
    }
    let (v, cs) = &stages[k - 1];
    let mut lo: Option<i128> = None;
    let mut hi: Option<i128> = None;
    for l in cs {
        let a = l.coeff(*v);
        let mut rest = l.clone();
        rest.coeffs.remove(v);
        let r = rest.eval(&|u| model.get(&u).copied().unwrap_or(0))?;
        // a·v + r ≤ 0
        let neg_r = r.checked_neg().ok_or(Overflow)?;
        if a > 0 {
            let bound = Integer::div_floor(&neg_r, &a);
            hi = Some(hi.map_or(bound, |h| h.min(bound)));
        } else {
            let bound = Integer::div_ceil(&neg_r, &a);
            lo = Some(lo.map_or(bound, |l| l.max(bound)));
        }
    }
    if let (Some(l), Some(h)) = (lo, hi) {
        if l > h {
            return Ok(Search::Exhausted);
        }
    }
    let (candidates, truncated) = candidates(lo, hi);
    let mut out_of_budget = truncated;
    for z in candidates {
        if *budget == 0 {
            return Ok(Search::OutOfBudget);
        }
        *budget -= 1;
        model.insert(*v, z);
        match search(stages, k - 1, model, budget)? {
            Search::Found => return Ok(Search::Found),
            Search::Exhausted => {}
            Search::OutOfBudget => out_of_budget = true,
        }
    }
    model.remove(v);
    Ok(if out_of_budget {
        Search::OutOfBudget
    } else {
        Search::Exhausted
    })
}

/// Integers in `[lo, hi]` nearest to zero first; `true` if the list was cut.
fn candidates(lo: Option<i128>, hi: Option<i128>) -> (Vec<i128>, bool) {
    let lo_v = lo.unwrap_or(i128::MIN);
    let hi_v = hi.unwrap_or(i128::MAX);
    let start = 0i128.clamp(lo_v, hi_v);
    let mut out = vec![start];
    let (mut down, mut up) = (start, start);
    while out.len() < MAX_CANDIDATES {
        let can_up = up < hi_v;
        let can_down = down > lo_v;
        if !can_up && !can_down {
            return (out, false);
        }
        if can_up {
            up += 1;
            out.push(up);
        }
        if can_down && out.len() < MAX_CANDIDATES {
            down -= 1;
            out.push(down);
        }
    }
    let complete = up >= hi_v && down <= lo_v;
    (out, !complete)
}
