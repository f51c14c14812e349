//! Cooper quantifier elimination and the bounded simplifier.
//!
//! Elimination uses the B-set ("smallest solution") form: coefficients of the
//! eliminated variable are scaled to a common value, the variable is replaced
//! by a unit-coefficient one carrying a divisibility constraint, and the
//! quantifier becomes a disjunction over residues and lower-bound offsets.

use super::{Atom, Formula, FormulaError, LinearTerm, Valuation};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Equivalence-preserving cleanup: constant folding, gcd tightening,
/// true/false absorption, flattening and deduplication. The only contract is
/// equivalence with the input.
pub fn simplify(f: &Formula) -> Formula {
    match f {
        Formula::True => Formula::True,
        Formula::False => Formula::False,
        Formula::Atom(a) => simplify_atom(a),
        Formula::Not(g) => match simplify(g) {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(h) => *h,
            s => Formula::not(s),
        },
        Formula::And(fs) => {
            let mut out: Vec<Formula> = Vec::new();
            for g in fs {
                match simplify(g) {
                    Formula::True => {}
                    Formula::False => return Formula::False,
                    Formula::And(inner) => out.extend(inner),
                    s => out.push(s),
                }
            }
            out = propagate_point_equalities(out);
            if out.iter().any(|g| matches!(g, Formula::False)) {
                return Formula::False;
            }
            out.retain(|g| !matches!(g, Formula::True));
            out = dedup(out);
            if has_complementary_pair(&out) {
                return Formula::False;
            }
            Formula::and(out)
        }
        Formula::Or(fs) => {
            let mut out: Vec<Formula> = Vec::new();
            for g in fs {
                match simplify(g) {
                    Formula::False => {}
                    Formula::True => return Formula::True,
                    Formula::Or(inner) => out.extend(inner),
                    s => out.push(s),
                }
            }
            out = dedup(out);
            if has_complementary_pair(&out) {
                return Formula::True;
            }
            Formula::or(out)
        }
        Formula::Exists(v, g) => {
            let s = simplify(g);
            match s {
                Formula::True => Formula::True,
                Formula::False => Formula::False,
                s if !s.free_vars().contains(v) => s,
                s => Formula::exists(v, s),
            }
        }
        Formula::Forall(v, g) => {
            let s = simplify(g);
            match s {
                Formula::True => Formula::True,
                Formula::False => Formula::False,
                s if !s.free_vars().contains(v) => s,
                s => Formula::forall(v, s),
            }
        }
    }
}

fn dedup(fs: Vec<Formula>) -> Vec<Formula> {
    let mut out: Vec<Formula> = Vec::new();
    for f in fs {
        if !out.contains(&f) {
            out.push(f);
        }
    }
    out
}

/// `x = c` conjuncts with a single unit-coefficient variable propagate the
/// constant into their siblings.
fn propagate_point_equalities(mut fs: Vec<Formula>) -> Vec<Formula> {
    for i in 0..fs.len() {
        let (var, value) = match &fs[i] {
            Formula::Atom(Atom::Eq(t)) if t.coeffs.len() == 1 => {
                let (v, a) = t.coeffs.iter().next().unwrap();
                if a.abs().is_one() {
                    // a*x + c = 0  =>  x = -c/a = -c*a for |a| = 1
                    (v.clone(), -(&t.constant) * a)
                } else if (&t.constant % a).is_zero() {
                    (v.clone(), -(&t.constant / a))
                } else {
                    fs[i] = Formula::False;
                    continue;
                }
            }
            _ => continue,
        };
        let sub = LinearTerm::constant(value);
        for (j, g) in fs.iter_mut().enumerate() {
            if j != i && g.free_vars().contains(&var) {
                *g = simplify(&g.substitute(&var, &sub));
            }
        }
    }
    fs
}

fn has_complementary_pair(fs: &[Formula]) -> bool {
    for f in fs {
        match f {
            Formula::Atom(Atom::Le(t)) => {
                let neg = Formula::Atom(Atom::Le(t.scale(&BigInt::from(-1)).add_const(&BigInt::one())));
                if fs.contains(&neg) {
                    return true;
                }
            }
            Formula::Not(inner) => {
                if fs.iter().any(|g| g == &**inner) {
                    return true;
                }
            }
            _ => {}
        }
    }
    false
}

fn simplify_atom(a: &Atom) -> Formula {
    match a {
        Atom::Le(t) => {
            if t.is_constant() {
                return if t.constant.is_positive() { Formula::False } else { Formula::True };
            }
            // g*s + c <= 0  <=>  s <= floor(-c/g)
            let g = coeff_gcd(t);
            if g > BigInt::one() {
                let bound = (-&t.constant).div_floor(&g);
                let mut s = LinearTerm {
                    coeffs: t.coeffs.iter().map(|(v, c)| (v.clone(), c / &g)).collect(),
                    constant: -bound,
                };
                s.coeffs.retain(|_, c| !c.is_zero());
                Formula::Atom(Atom::Le(s))
            } else {
                Formula::Atom(Atom::Le(t.clone()))
            }
        }
        Atom::Eq(t) => {
            if t.is_constant() {
                return if t.constant.is_zero() { Formula::True } else { Formula::False };
            }
            let g = coeff_gcd(t);
            if g > BigInt::one() {
                if !(&t.constant % &g).is_zero() {
                    return Formula::False;
                }
                let mut s = LinearTerm {
                    coeffs: t.coeffs.iter().map(|(v, c)| (v.clone(), c / &g)).collect(),
                    constant: &t.constant / &g,
                };
                s.coeffs.retain(|_, c| !c.is_zero());
                Formula::Atom(Atom::Eq(sign_normalize(s)))
            } else {
                Formula::Atom(Atom::Eq(sign_normalize(t.clone())))
            }
        }
        Atom::Div(m, t) => {
            debug_assert!(m.is_positive());
            // Reduce coefficients and constant modulo m.
            let mut s = LinearTerm {
                coeffs: t.coeffs.iter().map(|(v, c)| (v.clone(), c.mod_floor(m))).collect(),
                constant: t.constant.mod_floor(m),
            };
            s.coeffs.retain(|_, c| !c.is_zero());
            if s.is_constant() {
                return if s.constant.is_zero() { Formula::True } else { Formula::False };
            }
            let mut g = m.clone();
            for c in s.coeffs.values() {
                g = g.gcd(c);
            }
            g = g.gcd(&s.constant);
            let (m, s) = if g > BigInt::one() {
                let mut r = LinearTerm {
                    coeffs: s.coeffs.iter().map(|(v, c)| (v.clone(), c / &g)).collect(),
                    constant: &s.constant / &g,
                };
                r.coeffs.retain(|_, c| !c.is_zero());
                (m / &g, r)
            } else {
                (m.clone(), s)
            };
            if m.is_one() {
                Formula::True
            } else {
                Formula::Atom(Atom::Div(m, s))
            }
        }
    }
}

fn sign_normalize(t: LinearTerm) -> LinearTerm {
    match t.coeffs.values().next() {
        Some(c) if c.is_negative() => t.scale(&BigInt::from(-1)),
        _ => t,
    }
}

fn coeff_gcd(t: &LinearTerm) -> BigInt {
    let mut g = BigInt::zero();
    for c in t.coeffs.values() {
        g = g.gcd(c);
    }
    g
}

/// One Cooper elimination step: `exists var. body` for a quantifier-free
/// body. The result is quantifier-free over the remaining variables and may
/// contain new divisibility atoms.
pub fn cooper_eliminate_one(var: &str, body: &Formula) -> Result<Formula, FormulaError> {
    if !body.is_quantifier_free() {
        return Err(FormulaError::NotGround);
    }
    let nnf = simplify(&body.to_nnf());
    // An equality conjunct pins the variable; substituting it avoids the
    // residue/bound disjunction entirely.
    if let Some(out) = equality_shortcut(var, &nnf) {
        return Ok(simplify(&out));
    }
    let body = split_equalities_on(var, &nnf);
    if !body.free_vars().contains(var) {
        return Ok(body);
    }

    // Least common multiple of |coefficients| of `var`.
    let mut delta = BigInt::one();
    collect_coeff_lcm(&body, var, &mut delta);

    // Rewrite so the variable has coefficient +-1 (conceptually z = delta*var).
    let scaled = scale_var_to_unit(&body, var, &delta);
    let scaled = if delta.is_one() {
        scaled
    } else {
        Formula::and(vec![scaled, Formula::Atom(Atom::Div(delta.clone(), LinearTerm::var(var)))])
    };

    // Period: lcm of divisibility moduli involving the variable.
    let mut period = BigInt::one();
    collect_div_lcm(&scaled, var, &mut period);

    // Lower bounds r <= z, i.e. Le(-z + r).
    let mut lowers: Vec<LinearTerm> = Vec::new();
    collect_lower_bounds(&scaled, var, &mut lowers);
    lowers = {
        let mut seen = Vec::new();
        for l in lowers {
            if !seen.contains(&l) {
                seen.push(l);
            }
        }
        seen
    };

    let minus_inf = drop_var_bounds(&scaled, var);
    let mut cases: Vec<Formula> = Vec::new();
    let mut j = BigInt::one();
    while j <= period {
        let jt = LinearTerm::constant(j.clone());
        let c = simplify(&minus_inf.substitute(var, &jt));
        if matches!(c, Formula::True) {
            return Ok(Formula::True);
        }
        if !matches!(c, Formula::False) {
            cases.push(c);
        }
        for b in &lowers {
            let c = simplify(&scaled.substitute(var, &b.add_const(&j)));
            if matches!(c, Formula::True) {
                return Ok(Formula::True);
            }
            if !matches!(c, Formula::False) {
                cases.push(c);
            }
        }
        j += 1;
    }
    Ok(simplify(&Formula::or(cases)))
}

/// Looks for a top-level equality conjunct `a*var + r = 0` and eliminates
/// `var` by substitution: siblings are scaled by `|a|` and `a | r` is added
/// when `|a| > 1`.
pub(crate) fn equality_shortcut(var: &str, body: &Formula) -> Option<Formula> {
    let conjuncts: Vec<Formula> = match body {
        Formula::And(fs) => fs.clone(),
        other => vec![other.clone()],
    };
    let idx = conjuncts
        .iter()
        .position(|f| matches!(f, Formula::Atom(Atom::Eq(t)) if !t.coeff(var).is_zero()))?;
    let Formula::Atom(Atom::Eq(t)) = &conjuncts[idx] else {
        unreachable!()
    };
    let a = t.coeff(var);
    let mut r = t.clone();
    r.coeffs.remove(var);
    let mut out: Vec<Formula> = Vec::new();
    if a.abs().is_one() {
        // var = -a*r for |a| = 1
        let sub = r.scale(&-&a);
        for (j, g) in conjuncts.iter().enumerate() {
            if j != idx {
                out.push(g.substitute(var, &sub));
            }
        }
    } else {
        for (j, g) in conjuncts.iter().enumerate() {
            if j != idx {
                out.push(scale_substitute(g, var, &a, &r));
            }
        }
        out.push(Formula::Atom(Atom::Div(a.abs(), r)));
    }
    Some(Formula::and(out))
}

/// Substitutes `var` in `g` given `a*var = -r`: atoms containing `var` are
/// multiplied by `|a|` (which preserves `<=`, `=` and scales divisibility
/// moduli) so the substitution stays integral.
fn scale_substitute(g: &Formula, var: &str, a: &BigInt, r: &LinearTerm) -> Formula {
    let sub_term = |t: &LinearTerm| -> Option<LinearTerm> {
        let b = t.coeff(var);
        if b.is_zero() {
            return None;
        }
        let abs_a = a.abs();
        let mut s = t.scale(&abs_a);
        s.coeffs.remove(var);
        let sign = if a.is_negative() { BigInt::from(-1) } else { BigInt::one() };
        Some(s.add(&r.scale(&-(&b * sign))))
    };
    match g {
        Formula::Atom(Atom::Le(t)) => match sub_term(t) {
            Some(s) => Formula::Atom(Atom::Le(s)),
            None => g.clone(),
        },
        Formula::Atom(Atom::Eq(t)) => match sub_term(t) {
            Some(s) => Formula::Atom(Atom::Eq(s)),
            None => g.clone(),
        },
        Formula::Atom(Atom::Div(m, t)) => match sub_term(t) {
            Some(s) => Formula::Atom(Atom::Div(m * a.abs(), s)),
            None => g.clone(),
        },
        Formula::Not(h) => Formula::not(scale_substitute(h, var, a, r)),
        Formula::And(fs) => Formula::And(fs.iter().map(|h| scale_substitute(h, var, a, r)).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(|h| scale_substitute(h, var, a, r)).collect()),
        other => other.clone(),
    }
}

/// Equality atoms mentioning the eliminated variable become a pair of
/// inequalities so the B-set machinery sees them.
fn split_equalities_on(var: &str, f: &Formula) -> Formula {
    match f {
        Formula::Atom(Atom::Eq(t)) if !t.coeff(var).is_zero() => Formula::and(vec![
            Formula::Atom(Atom::Le(t.clone())),
            Formula::Atom(Atom::Le(t.scale(&BigInt::from(-1)))),
        ]),
        Formula::Not(g) => Formula::not(split_equalities_on(var, g)),
        Formula::And(fs) => Formula::And(fs.iter().map(|g| split_equalities_on(var, g)).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(|g| split_equalities_on(var, g)).collect()),
        _ => f.clone(),
    }
}

fn collect_coeff_lcm(f: &Formula, var: &str, acc: &mut BigInt) {
    match f {
        Formula::Atom(Atom::Le(t)) | Formula::Atom(Atom::Eq(t)) | Formula::Atom(Atom::Div(_, t)) => {
            let c = t.coeff(var);
            if !c.is_zero() {
                *acc = acc.lcm(&c.abs());
            }
        }
        Formula::Not(g) => collect_coeff_lcm(g, var, acc),
        Formula::And(fs) | Formula::Or(fs) => {
            for g in fs {
                collect_coeff_lcm(g, var, acc);
            }
        }
        _ => {}
    }
}

/// Multiplies every atom containing `var` so its coefficient is `+-delta`,
/// then renames `delta*var` back to `var` (unit coefficient).
fn scale_var_to_unit(f: &Formula, var: &str, delta: &BigInt) -> Formula {
    let rewrite = |t: &LinearTerm, is_div: bool, m: &BigInt| -> (LinearTerm, BigInt) {
        let a = t.coeff(var);
        if a.is_zero() {
            return (t.clone(), m.clone());
        }
        let k = delta / a.abs();
        let mut s = t.scale(&k);
        // coefficient of var is now sign(a)*delta; rename to sign(a)*1
        let sign = if a.is_negative() { BigInt::from(-1) } else { BigInt::one() };
        s.coeffs.insert(var.to_string(), sign);
        let m2 = if is_div { m * &k } else { m.clone() };
        (s, m2)
    };
    match f {
        Formula::Atom(Atom::Le(t)) => {
            let (s, _) = rewrite(t, false, &BigInt::one());
            Formula::Atom(Atom::Le(s))
        }
        Formula::Atom(Atom::Eq(t)) => {
            let (s, _) = rewrite(t, false, &BigInt::one());
            Formula::Atom(Atom::Eq(s))
        }
        Formula::Atom(Atom::Div(m, t)) => {
            let (s, m2) = rewrite(t, true, m);
            Formula::Atom(Atom::Div(m2, s))
        }
        Formula::Not(g) => Formula::not(scale_var_to_unit(g, var, delta)),
        Formula::And(fs) => Formula::And(fs.iter().map(|g| scale_var_to_unit(g, var, delta)).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(|g| scale_var_to_unit(g, var, delta)).collect()),
        other => other.clone(),
    }
}

fn collect_div_lcm(f: &Formula, var: &str, acc: &mut BigInt) {
    match f {
        Formula::Atom(Atom::Div(m, t)) => {
            if !t.coeff(var).is_zero() {
                *acc = acc.lcm(m);
            }
        }
        Formula::Not(g) => collect_div_lcm(g, var, acc),
        Formula::And(fs) | Formula::Or(fs) => {
            for g in fs {
                collect_div_lcm(g, var, acc);
            }
        }
        _ => {}
    }
}

fn collect_lower_bounds(f: &Formula, var: &str, out: &mut Vec<LinearTerm>) {
    match f {
        Formula::Atom(Atom::Le(t)) => {
            let a = t.coeff(var);
            // -var + r <= 0 means r <= var, i.e. r - 1 < var: the B-set
            // element is r - 1 so that j = 1 hits var = r.
            if a == BigInt::from(-1) {
                let mut r = t.clone();
                r.coeffs.remove(var);
                out.push(r.add_const(&BigInt::from(-1)));
            }
        }
        Formula::Not(g) => collect_lower_bounds(g, var, out),
        Formula::And(fs) | Formula::Or(fs) => {
            for g in fs {
                collect_lower_bounds(g, var, out);
            }
        }
        _ => {}
    }
}

/// The "minus infinity" variant: upper bounds on `var` become true, lower
/// bounds become false, divisibility atoms keep the variable.
fn drop_var_bounds(f: &Formula, var: &str) -> Formula {
    match f {
        Formula::Atom(Atom::Le(t)) => {
            let a = t.coeff(var);
            if a.is_one() {
                Formula::True
            } else if a == BigInt::from(-1) {
                Formula::False
            } else {
                debug_assert!(a.is_zero());
                f.clone()
            }
        }
        Formula::Not(g) => Formula::not(drop_var_bounds(g, var)),
        Formula::And(fs) => Formula::And(fs.iter().map(|g| drop_var_bounds(g, var)).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(|g| drop_var_bounds(g, var)).collect()),
        other => other.clone(),
    }
}

/// Eliminates every quantifier, innermost first, handling `forall x` as
/// `not exists x not`. Quantifiers are eliminated in place on their own
/// subformula rather than after a global prenexing pass, which is equivalent
/// and avoids dragging unrelated conjuncts through each elimination.
pub fn eliminate_all(f: &Formula) -> Formula {
    fn rec(f: &Formula) -> Formula {
        match f {
            Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
            Formula::Not(g) => simplify(&Formula::not(rec(g))),
            Formula::And(fs) => simplify(&Formula::And(fs.iter().map(rec).collect())),
            Formula::Or(fs) => simplify(&Formula::Or(fs.iter().map(rec).collect())),
            Formula::Exists(v, g) => {
                let body = rec(g);
                simplify(&cooper_eliminate_one(v, &body).expect("body is quantifier-free"))
            }
            Formula::Forall(v, g) => {
                let body = rec(g);
                let inner = cooper_eliminate_one(v, &body.negate()).expect("body is quantifier-free");
                simplify(&inner.negate())
            }
        }
    }
    rec(&f.normalize_bound())
}

/// Truth value of a sentence, via full elimination and ground evaluation.
pub fn decide_sentence(f: &Formula) -> Result<bool, FormulaError> {
    if let Some(v) = f.free_vars().into_iter().next() {
        return Err(FormulaError::NotASentence(v));
    }
    let q = eliminate_all(f);
    q.eval_ground(&Valuation::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presburger::Polarity;

    fn le(t: LinearTerm) -> Formula {
        Formula::Atom(Atom::Le(t))
    }

    fn var(v: &str) -> LinearTerm {
        LinearTerm::var(v)
    }

    #[test]
    fn witness_interval() {
        // exists x (y <= x and x <= y) is true for all y
        let body = Formula::and(vec![
            le(var("y").sub(&var("x"))),
            le(var("x").sub(&var("y"))),
        ]);
        let out = cooper_eliminate_one("x", &body).unwrap();
        let out = simplify(&out);
        for y in -5..=5 {
            let v = Valuation::from_pairs([("y".to_string(), BigInt::from(y))]);
            assert!(out.eval_ground(&v).unwrap(), "y = {y}: {out:?}");
        }
    }

    #[test]
    fn doubling_forces_parity() {
        // exists x (2x <= y and y <= 2x) is equivalent to 2 | y
        let two_x = var("x").scale(&BigInt::from(2));
        let body = Formula::and(vec![le(two_x.sub(&var("y"))), le(var("y").sub(&two_x))]);
        let out = cooper_eliminate_one("x", &body).unwrap();
        for y in -8..=8 {
            let v = Valuation::from_pairs([("y".to_string(), BigInt::from(y))]);
            assert_eq!(out.eval_ground(&v).unwrap(), y % 2 == 0, "y = {y}");
        }
    }

    #[test]
    fn empty_interval_is_false() {
        // exists x (1 <= x and x <= 0)
        let body = Formula::and(vec![
            le(LinearTerm::constant(BigInt::one()).sub(&var("x"))),
            le(var("x")),
        ]);
        let out = simplify(&cooper_eliminate_one("x", &body).unwrap());
        assert_eq!(out, Formula::False);
    }

    #[test]
    fn sentences_decide() {
        // exists x forall y (x <= y) is false; forall y exists x (x <= y) is true
        let f1 = Formula::exists("x", Formula::forall("y", le(var("x").sub(&var("y")))));
        assert_eq!(decide_sentence(&f1).unwrap(), false);
        let f2 = Formula::forall("y", Formula::exists("x", le(var("x").sub(&var("y")))));
        assert_eq!(decide_sentence(&f2).unwrap(), true);
    }

    #[test]
    fn quantifier_free_passes_through() {
        let f = le(var("x").add(&var("y")));
        let out = eliminate_all(&f);
        for x in -3..=3 {
            for y in -3..=3 {
                let v = Valuation::from_pairs([
                    ("x".to_string(), BigInt::from(x)),
                    ("y".to_string(), BigInt::from(y)),
                ]);
                assert_eq!(out.eval_ground(&v).unwrap(), f.eval_ground(&v).unwrap());
            }
        }
    }

    #[test]
    fn eliminate_keeps_class_examples() {
        // The negation of an existential formula eliminates to quantifier-free.
        let f = Formula::not(Formula::exists("x", le(var("x").sub(&var("y")))));
        let out = eliminate_all(&f);
        assert!(out.is_quantifier_free());
        assert_eq!(out.classify().1, Polarity::Sigma);
        // not exists x (x <= y) is false for every y (take x small enough)
        for y in -3..=3 {
            let v = Valuation::from_pairs([("y".to_string(), BigInt::from(y))]);
            assert!(!out.eval_ground(&v).unwrap());
        }
    }
}
