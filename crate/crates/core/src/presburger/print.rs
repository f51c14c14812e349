//! Surface-syntax printing. Output always re-parses: bound variables with
//! names outside `[a-z][a-z0-9]*` (the engine generates underscored ones) are
//! renamed, negative coefficients move across the comparison, and constant
//! coefficients expand through the binary doubling encoding.

use super::{fresh_name, Atom, Formula, LinearTerm, Term};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Zero => write!(f, "0"),
            Term::One => write!(f, "1"),
            Term::Var(x) => write!(f, "{x}"),
            Term::Add(a, b) => write!(f, "{a} + {b}"),
            Term::Double(t) => write!(f, "2*({t})"),
        }
    }
}

pub(crate) fn legal_var(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit())
        && name != "exists"
        && name != "forall"
}

/// One product `coeff * var` with `coeff > 0`, via the binary encoding:
/// `5x` prints as `2*(2*(x)) + x`.
fn product(coeff: &BigInt, var: &str) -> String {
    debug_assert!(coeff.is_positive());
    let mut parts = Vec::new();
    for i in (0..coeff.bits()).rev() {
        if coeff.bit(i) {
            let mut s = String::new();
            for _ in 0..i {
                s.push_str("2*(");
            }
            s.push_str(var);
            for _ in 0..i {
                s.push(')');
            }
            parts.push(s);
        }
    }
    parts.join(" + ")
}

/// A linear term with nonnegative coefficients and constant as a sum.
fn nonneg_sum(t: &LinearTerm) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (v, c) in &t.coeffs {
        debug_assert!(!c.is_negative());
        if !c.is_zero() {
            parts.push(product(c, v));
        }
    }
    if t.constant.is_positive() {
        parts.push(Term::encode_constant(&t.constant).to_string());
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}

/// Splits `t` into nonnegative left/right sides so `t <= 0` prints as
/// `left <= right`.
fn split_sides(t: &LinearTerm) -> (LinearTerm, LinearTerm) {
    let mut pos = LinearTerm::default();
    let mut neg = LinearTerm::default();
    for (v, c) in &t.coeffs {
        if c.is_positive() {
            pos.coeffs.insert(v.clone(), c.clone());
        } else {
            neg.coeffs.insert(v.clone(), -c);
        }
    }
    if t.constant.is_positive() {
        pos.constant = t.constant.clone();
    } else {
        neg.constant = -&t.constant;
    }
    (pos, neg)
}

fn atom_str(a: &Atom) -> String {
    match a {
        Atom::Le(t) => {
            let (l, r) = split_sides(t);
            format!("{} <= {}", nonneg_sum(&l), nonneg_sum(&r))
        }
        Atom::Eq(t) => {
            let (l, r) = split_sides(t);
            format!("{} = {}", nonneg_sum(&l), nonneg_sum(&r))
        }
        Atom::Div(m, t) => {
            // m | t is invariant under reduction of t modulo m, which also
            // clears negative entries.
            let mut s = LinearTerm {
                coeffs: t.coeffs.iter().map(|(v, c)| (v.clone(), c.mod_floor(m))).collect(),
                constant: t.constant.mod_floor(m),
            };
            s.coeffs.retain(|_, c| !c.is_zero());
            format!("{} | {}", m, nonneg_sum(&s))
        }
    }
}

fn needs_parens(child: &Formula, parent_and: bool) -> bool {
    match child {
        Formula::True | Formula::False | Formula::Atom(_) | Formula::Not(_) => false,
        Formula::And(_) => false,
        Formula::Or(_) => parent_and,
        Formula::Exists(..) | Formula::Forall(..) => true,
    }
}

fn go(f: &Formula, out: &mut String) {
    match f {
        Formula::True => out.push_str("0 <= 0"),
        Formula::False => out.push_str("1 <= 0"),
        Formula::Atom(a) => out.push_str(&atom_str(a)),
        Formula::Not(g) => {
            out.push('~');
            if matches!(**g, Formula::Atom(_) | Formula::True | Formula::False | Formula::Not(_)) {
                go(g, out);
            } else {
                out.push('(');
                go(g, out);
                out.push(')');
            }
        }
        Formula::And(fs) => {
            for (i, g) in fs.iter().enumerate() {
                if i > 0 {
                    out.push_str(" /\\ ");
                }
                if needs_parens(g, true) {
                    out.push('(');
                    go(g, out);
                    out.push(')');
                } else {
                    go(g, out);
                }
            }
        }
        Formula::Or(fs) => {
            for (i, g) in fs.iter().enumerate() {
                if i > 0 {
                    out.push_str(" \\/ ");
                }
                if needs_parens(g, false) {
                    out.push('(');
                    go(g, out);
                    out.push(')');
                } else {
                    go(g, out);
                }
            }
        }
        Formula::Exists(v, g) => {
            out.push_str(&format!("exists {v}. "));
            go(g, out);
        }
        Formula::Forall(v, g) => {
            out.push_str(&format!("forall {v}. "));
            go(g, out);
        }
    }
}

fn rename_illegal(f: &Formula, used: &mut BTreeSet<String>, map: &BTreeMap<String, String>) -> Formula {
    match f {
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            let mut inner = map.clone();
            let name = if legal_var(v) {
                v.clone()
            } else {
                let fresh = fresh_name("b1", used);
                used.insert(fresh.clone());
                inner.insert(v.clone(), fresh.clone());
                fresh
            };
            let body = rename_illegal(g, used, &inner);
            match f {
                Formula::Exists(..) => Formula::exists(&name, body),
                _ => Formula::forall(&name, body),
            }
        }
        Formula::Not(g) => Formula::not(rename_illegal(g, used, map)),
        Formula::And(fs) => Formula::And(fs.iter().map(|g| rename_illegal(g, used, map)).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(|g| rename_illegal(g, used, map)).collect()),
        Formula::Atom(_) if map.is_empty() => f.clone(),
        Formula::Atom(_) => {
            let mut out = f.clone();
            for (from, to) in map {
                out = out.substitute(from, &LinearTerm::var(to));
            }
            out
        }
        other => other.clone(),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut used: BTreeSet<String> = self.all_vars().into_iter().filter(|v| legal_var(v)).collect();
        let printable = rename_illegal(self, &mut used, &BTreeMap::new());
        let mut s = String::new();
        go(&printable, &mut s);
        write!(f, "{s}")
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_formula;
    use super::*;

    #[test]
    fn roundtrip_simple() {
        let src = "exists y. x1 = y + y /\\ x2 <= x1";
        let f = parse_formula(src).unwrap();
        let printed = f.to_string();
        let f2 = parse_formula(&printed).unwrap();
        assert_eq!(f, f2, "printed: {printed}");
    }

    #[test]
    fn coefficients_expand_binary() {
        // 5x <= 3  prints with doubling chains
        let t = LinearTerm::var("x").scale(&BigInt::from(5)).add_const(&BigInt::from(-3));
        let f = Formula::Atom(Atom::Le(t));
        assert_eq!(f.to_string(), "2*(2*(x)) + x <= 2*(1) + 1");
        let f2 = parse_formula(&f.to_string()).unwrap();
        assert_eq!(f, f2);
    }

    #[test]
    fn illegal_bound_names_get_renamed() {
        let f = Formula::exists(
            "y_3",
            Formula::Atom(Atom::eq(&LinearTerm::var("x"), &LinearTerm::var("y_3"))),
        );
        let printed = f.to_string();
        assert!(!printed.contains('_'), "{printed}");
        assert!(parse_formula(&printed).is_ok());
    }

    #[test]
    fn negative_entries_cross_sides() {
        // -x + 2 <= 0 prints as 2*(1) <= x  (after gcd-free split: 2 <= x)
        let t = LinearTerm::var("x").scale(&BigInt::from(-1)).add_const(&BigInt::from(2));
        let f = Formula::Atom(Atom::Le(t));
        assert_eq!(f.to_string(), "2*(1) <= x");
    }
}
