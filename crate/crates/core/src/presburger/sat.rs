//! Satisfiability and validity.
//!
//! `is_satisfiable(phi)` decides `exists free(phi). phi`, which is the same
//! question `eliminate_all` answers on the closed formula. The decision path
//! here avoids materializing the eliminated formula: universal quantifiers
//! are removed innermost-first by Cooper, the remaining purely existential
//! sentence is searched by splitting disjunctions and substituting equality
//! conjuncts, and only the residual small conjunctions go through a full
//! elimination step. Flow formulas from the automaton pipeline are dominated
//! by unit-coefficient equalities, which this path eliminates without any
//! case blowup.

use super::qe::{cooper_eliminate_one, eliminate_all, equality_shortcut, simplify};
use super::{Atom, Formula, Valuation};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// Is there an integer assignment of the free variables satisfying `phi`?
pub fn is_satisfiable(phi: &Formula) -> bool {
    let free: Vec<String> = phi.free_vars().into_iter().collect();
    decide_closed(&Formula::exists_many(&free, phi.clone()))
}

/// Is `phi` satisfied by every assignment?
pub fn is_valid(phi: &Formula) -> bool {
    !is_satisfiable(&phi.negate())
}

/// Truth value of a sentence.
pub fn decide_closed(sentence: &Formula) -> bool {
    debug_assert!(sentence.free_vars().is_empty(), "decide_closed needs a sentence");
    let f = simplify(&sentence.normalize_bound().to_nnf());
    let f = remove_universals(&f);
    let f = simplify(&f.to_nnf());
    search(strip_existentials(f))
}

/// Replaces every subtree rooted at a `forall` by its quantifier-free
/// elimination. Existential quantifiers above survive for the search.
fn remove_universals(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) | Formula::Not(_) => f.clone(),
        Formula::And(fs) => Formula::And(fs.iter().map(remove_universals).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(remove_universals).collect()),
        Formula::Exists(v, g) => Formula::exists(v, remove_universals(g)),
        Formula::Forall(..) => eliminate_all(f),
    }
}

/// Drops existential binders. Sound on sentences in NNF with pairwise
/// distinct bound names: every remaining variable is implicitly existential.
fn strip_existentials(f: Formula) -> Formula {
    match f {
        Formula::Exists(_, g) => strip_existentials(*g),
        Formula::And(fs) => Formula::And(fs.into_iter().map(strip_existentials).collect()),
        Formula::Or(fs) => Formula::Or(fs.into_iter().map(strip_existentials).collect()),
        other => other,
    }
}

/// Core search over a quantifier-free matrix whose variables are all
/// existential: substitute equalities, split disjunctions, eliminate the
/// rest variable by variable.
fn search(matrix: Formula) -> bool {
    search_at(matrix, 0)
}

fn search_at(matrix: Formula, depth: usize) -> bool {
    let matrix = simplify(&matrix);
    match matrix {
        Formula::True => return true,
        Formula::False => return false,
        _ => {}
    }

    let mut conjuncts: Vec<Formula> = match matrix {
        Formula::And(fs) => fs,
        other => vec![other],
    };

    // Equality substitution to a fixpoint.
    loop {
        let whole = Formula::and(conjuncts.clone());
        if let Some(var) = pick_equality_var(&conjuncts) {
            match equality_shortcut(&var, &whole) {
                Some(next) => {
                    let next = simplify(&next);
                    match next {
                        Formula::True => return true,
                        Formula::False => return false,
                        Formula::And(fs) => conjuncts = fs,
                        other => conjuncts = vec![other],
                    }
                    continue;
                }
                None => break,
            }
        }
        break;
    }

    // Before any case split, make sure the pure literal part is feasible on
    // its own; that catches an infeasible linear skeleton early.
    let has_disjunction = conjuncts.iter().any(|f| matches!(f, Formula::Or(_)));
    if has_disjunction {
        let literals: Vec<Formula> = conjuncts
            .iter()
            .filter(|f| !matches!(f, Formula::Or(_)))
            .cloned()
            .collect();
        if !literals.is_empty() && !decide_literal_conjunction(literals.clone()) {
            return false;
        }
        // Once, at the top: refute disjuncts against the literal skeleton.
        // A contradiction confined to one disjunction would otherwise hide
        // behind every other case split.
        if depth == 0 {
            let mut changed = false;
            for f in conjuncts.iter_mut() {
                let Formula::Or(ds) = f else { continue };
                let before = ds.len();
                let kept: Vec<Formula> = ds
                    .drain(..)
                    .filter(|d| {
                        let mut probe = literals.clone();
                        probe.push(d.clone());
                        match simplify(&Formula::and(probe)) {
                            Formula::False => false,
                            Formula::True => true,
                            Formula::And(fs) => search_at(Formula::and(fs), 1),
                            other => search_at(other, 1),
                        }
                    })
                    .collect();
                if kept.is_empty() {
                    return false;
                }
                changed |= kept.len() < before;
                *f = Formula::or(kept);
            }
            if changed {
                return search_at(Formula::and(conjuncts), 1);
            }
        }
    }

    // Branch on the smallest disjunction.
    let disj = conjuncts
        .iter()
        .enumerate()
        .filter_map(|(i, f)| match f {
            Formula::Or(ds) => Some((i, ds.len())),
            _ => None,
        })
        .min_by_key(|&(_, n)| n);
    if let Some((i, _)) = disj {
        let Formula::Or(ds) = conjuncts.remove(i) else { unreachable!() };
        for d in ds {
            let mut case = conjuncts.clone();
            case.push(d);
            if search_at(Formula::and(case), depth + 1) {
                return true;
            }
        }
        return false;
    }

    decide_literal_conjunction(conjuncts)
}

fn pick_equality_var(conjuncts: &[Formula]) -> Option<String> {
    // Prefer a variable with a unit coefficient in some equality conjunct.
    let mut fallback: Option<String> = None;
    for f in conjuncts {
        if let Formula::Atom(Atom::Eq(t)) = f {
            for (v, c) in &t.coeffs {
                if c.abs() == BigInt::from(1) {
                    return Some(v.clone());
                }
                if fallback.is_none() {
                    fallback = Some(v.clone());
                }
            }
        }
    }
    fallback
}

/// A conjunction of literals with no equalities and no disjunctions left:
/// pick variables and eliminate, recursing through `search` because an
/// elimination step reintroduces disjunctions.
fn decide_literal_conjunction(mut conjuncts: Vec<Formula>) -> bool {
    // Unbounded-variable shortcut: a variable with no divisibility atoms that
    // occurs only as an upper bound (or only as a lower bound) can always be
    // pushed past every bound, so those atoms are satisfiable on their own.
    loop {
        let vars: Vec<String> = Formula::and(conjuncts.clone()).free_vars().into_iter().collect();
        if vars.is_empty() {
            let whole = Formula::and(conjuncts);
            return whole
                .eval_ground(&Valuation::new())
                .expect("ground conjunction evaluates");
        }
        let mut progressed = false;
        for v in &vars {
            if let Some(dir) = one_sided(v, &conjuncts) {
                conjuncts = conjuncts
                    .into_iter()
                    .filter(|f| !mentions_le(f, v, dir))
                    .collect();
                progressed = true;
            }
        }
        if !progressed {
            // Eliminate the variable with the fewest occurrences.
            let v = vars
                .iter()
                .min_by_key(|v| conjuncts.iter().filter(|f| f.free_vars().contains(*v)).count())
                .unwrap()
                .clone();
            let body = Formula::and(conjuncts);
            let out = cooper_eliminate_one(&v, &body).expect("literal conjunction is quantifier-free");
            return search(out);
        }
        match simplify(&Formula::and(conjuncts)) {
            Formula::True => return true,
            Formula::False => return false,
            Formula::And(fs) => conjuncts = fs,
            other => conjuncts = vec![other],
        }
    }
}

/// `Some(true)` if `v` occurs only with positive coefficient in `Le` atoms
/// (upper bounds on other variables' combinations aside, `v` can go to
/// minus infinity), `Some(false)` for the dual, `None` otherwise.
fn one_sided(v: &str, conjuncts: &[Formula]) -> Option<bool> {
    let mut pos = false;
    let mut neg = false;
    for f in conjuncts {
        match f {
            Formula::Atom(Atom::Le(t)) => {
                let c = t.coeff(v);
                if c.is_positive() {
                    pos = true;
                } else if c.is_negative() {
                    neg = true;
                }
            }
            Formula::Atom(Atom::Eq(t)) | Formula::Atom(Atom::Div(_, t)) => {
                if !t.coeff(v).is_zero() {
                    return None;
                }
            }
            Formula::Not(inner) => {
                if let Formula::Atom(Atom::Div(_, t)) = &**inner {
                    if !t.coeff(v).is_zero() {
                        return None;
                    }
                }
            }
            _ => {
                if f.free_vars().contains(v) {
                    return None;
                }
            }
        }
    }
    match (pos, neg) {
        (true, false) => Some(true),
        (false, true) => Some(false),
        (false, false) => None,
        (true, true) => None,
    }
}

fn mentions_le(f: &Formula, v: &str, positive: bool) -> bool {
    match f {
        Formula::Atom(Atom::Le(t)) => {
            let c = t.coeff(v);
            if positive {
                c.is_positive()
            } else {
                c.is_negative()
            }
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presburger::LinearTerm;

    fn le(t: LinearTerm) -> Formula {
        Formula::Atom(Atom::Le(t))
    }

    fn var(v: &str) -> LinearTerm {
        LinearTerm::var(v)
    }

    #[test]
    fn trivial_examples() {
        // x <= x: satisfiable and valid
        let refl = le(var("x").sub(&var("x")));
        assert!(is_satisfiable(&refl));
        assert!(is_valid(&refl));
        // x + 1 <= x: unsatisfiable
        let bad = le(var("x").add_const(&BigInt::from(1)).sub(&var("x")));
        assert!(!is_satisfiable(&bad));
        assert!(!is_valid(&bad));
    }

    #[test]
    fn parity_constraint() {
        // exists y (x = 2y), free x: satisfiable but not valid
        let phi = Formula::exists(
            "y",
            Formula::Atom(Atom::eq(&var("x"), &var("y").scale(&BigInt::from(2)))),
        );
        assert!(is_satisfiable(&phi));
        assert!(!is_valid(&phi));
    }

    #[test]
    fn alternating_sentences() {
        let f1 = Formula::exists("x", Formula::forall("y", le(var("x").sub(&var("y")))));
        assert!(!decide_closed(&f1));
        let f2 = Formula::forall("y", Formula::exists("x", le(var("x").sub(&var("y")))));
        assert!(decide_closed(&f2));
    }

    #[test]
    fn monotone_disjunction() {
        let sat = le(var("x").scale(&BigInt::from(0))); // 0 <= 0, always true
        let unsat = le(LinearTerm::constant(BigInt::from(1)));
        assert!(is_satisfiable(&Formula::or(vec![unsat.clone(), sat])));
        assert!(!is_satisfiable(&Formula::or(vec![unsat.clone(), unsat])));
    }

    #[test]
    fn equality_chain_elimination() {
        // x = y + 1, y = z + 1, z = 5, x <= 6: unsat (x = 7)
        let mk_eq = |a: LinearTerm, b: LinearTerm| Formula::Atom(Atom::eq(&a, &b));
        let phi = Formula::and(vec![
            mk_eq(var("x"), var("y").add_const(&BigInt::from(1))),
            mk_eq(var("y"), var("z").add_const(&BigInt::from(1))),
            mk_eq(var("z"), LinearTerm::constant(BigInt::from(5))),
            le(var("x").add_const(&BigInt::from(-6))),
        ]);
        assert!(!is_satisfiable(&phi));
        // relaxing the bound makes it satisfiable
        let phi2 = Formula::and(vec![
            mk_eq(var("x"), var("y").add_const(&BigInt::from(1))),
            mk_eq(var("y"), var("z").add_const(&BigInt::from(1))),
            mk_eq(var("z"), LinearTerm::constant(BigInt::from(5))),
            le(var("x").add_const(&BigInt::from(-7))),
        ]);
        assert!(is_satisfiable(&phi2));
    }

    #[test]
    fn scaled_equality_needs_divisibility() {
        // 3x = y and y = 7 is unsat; y = 9 is sat
        let phi = |c: i64| {
            Formula::and(vec![
                Formula::Atom(Atom::eq(&var("x").scale(&BigInt::from(3)), &var("y"))),
                Formula::Atom(Atom::eq(&var("y"), &LinearTerm::constant(BigInt::from(c)))),
            ])
        };
        assert!(!is_satisfiable(&phi(7)));
        assert!(is_satisfiable(&phi(9)));
    }

    #[test]
    fn agrees_with_full_elimination_on_small_formulas() {
        // A handful of shapes; the randomized cross-check lives in the
        // integration tests.
        let shapes = vec![
            Formula::exists("x", Formula::and(vec![le(var("x")), le(var("y").sub(&var("x")))])),
            Formula::or(vec![
                Formula::Atom(Atom::Div(BigInt::from(2), var("y"))),
                Formula::Atom(Atom::Div(BigInt::from(3), var("y").add_const(&BigInt::from(1)))),
            ]),
            Formula::forall(
                "y",
                Formula::or(vec![
                    le(var("y").sub(&var("x"))),
                    le(var("x").add_const(&BigInt::from(1)).sub(&var("y"))),
                ]),
            ),
        ];
        for phi in shapes {
            let free: Vec<String> = phi.free_vars().into_iter().collect();
            let closed = Formula::exists_many(&free, phi.clone());
            let via_qe = super::super::qe::decide_sentence(&closed).unwrap();
            assert_eq!(is_satisfiable(&phi), via_qe, "{phi:?}");
        }
    }
}
