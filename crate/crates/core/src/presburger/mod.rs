//! Presburger arithmetic engine.
//!
//! Formulas are first-order over integer terms built from `0`, `1`, `+` and
//! unary doubling. Internally every term is normalized to a linear
//! combination with arbitrary-precision coefficients, and divisibility atoms
//! `m | t` are first-class so that Cooper's quantifier elimination is closed
//! over the representation.

mod parse;
mod print;
pub mod qe;
pub mod sat;
pub mod semilinear;

pub use parse::{parse_formula, parse_term, FormulaParseError};
pub use qe::{cooper_eliminate_one, decide_sentence, eliminate_all};
pub use sat::{is_satisfiable, is_valid};
pub use semilinear::{LinearSet, SemiLinearSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("variable `{0}` is not bound by the valuation")]
    UnboundVariable(String),
    #[error("formula is not quantifier-free")]
    NotGround,
    #[error("expected a sentence but `{0}` occurs free")]
    NotASentence(String),
}

/// Surface term over the signature `{0, 1, +, x2}`.
///
/// This is what the parser produces and what printing/encoding of constants
/// goes through; evaluation and all algorithms work on [`LinearTerm`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Zero,
    One,
    Var(String),
    Add(Box<Term>, Box<Term>),
    Double(Box<Term>),
}

impl Term {
    /// Binary encoding of a nonnegative constant, most significant bit first:
    /// `13` becomes `x2(x2(x2(1))) + x2(x2(1)) + 1`.
    pub fn encode_constant(n: &BigInt) -> Term {
        assert!(!n.is_negative(), "only nonnegative constants have a term encoding");
        if n.is_zero() {
            return Term::Zero;
        }
        let bits = n.bits();
        let mut parts = Vec::new();
        for i in (0..bits).rev() {
            if n.bit(i) {
                let mut t = Term::One;
                for _ in 0..i {
                    t = Term::Double(Box::new(t));
                }
                parts.push(t);
            }
        }
        let mut it = parts.into_iter();
        let first = it.next().unwrap();
        it.fold(first, |acc, t| Term::Add(Box::new(acc), Box::new(t)))
    }

    /// Normalization into a linear combination; total and value-preserving.
    pub fn to_linear(&self) -> LinearTerm {
        match self {
            Term::Zero => LinearTerm::constant(BigInt::zero()),
            Term::One => LinearTerm::constant(BigInt::one()),
            Term::Var(x) => LinearTerm::var(x),
            Term::Add(a, b) => a.to_linear().add(&b.to_linear()),
            Term::Double(t) => t.to_linear().scale(&BigInt::from(2)),
        }
    }
}

/// Linear combination `sum of coeff * var + constant` with `BigInt` entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LinearTerm {
    /// Nonzero coefficients only, keyed by variable name.
    pub coeffs: BTreeMap<String, BigInt>,
    pub constant: BigInt,
}

impl LinearTerm {
    pub fn constant(c: BigInt) -> Self {
        LinearTerm { coeffs: BTreeMap::new(), constant: c }
    }

    pub fn var(name: &str) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(name.to_string(), BigInt::one());
        LinearTerm { coeffs, constant: BigInt::zero() }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, var: &str) -> BigInt {
        self.coeffs.get(var).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn add(&self, other: &LinearTerm) -> LinearTerm {
        let mut out = self.clone();
        for (v, c) in &other.coeffs {
            let e = out.coeffs.entry(v.clone()).or_insert_with(BigInt::zero);
            *e += c;
            if e.is_zero() {
                out.coeffs.remove(v);
            }
        }
        out.constant += &other.constant;
        out
    }

    pub fn sub(&self, other: &LinearTerm) -> LinearTerm {
        self.add(&other.scale(&BigInt::from(-1)))
    }

    pub fn scale(&self, k: &BigInt) -> LinearTerm {
        if k.is_zero() {
            return LinearTerm::constant(BigInt::zero());
        }
        LinearTerm {
            coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), c * k)).collect(),
            constant: &self.constant * k,
        }
    }

    pub fn add_const(&self, k: &BigInt) -> LinearTerm {
        let mut out = self.clone();
        out.constant += k;
        out
    }

    /// Replaces `var` by `term`.
    pub fn substitute(&self, var: &str, term: &LinearTerm) -> LinearTerm {
        match self.coeffs.get(var) {
            None => self.clone(),
            Some(c) => {
                let c = c.clone();
                let mut out = self.clone();
                out.coeffs.remove(var);
                out.add(&term.scale(&c))
            }
        }
    }

    pub fn eval(&self, val: &Valuation) -> Result<BigInt, FormulaError> {
        let mut acc = self.constant.clone();
        for (v, c) in &self.coeffs {
            let x = val.get(v).ok_or_else(|| FormulaError::UnboundVariable(v.clone()))?;
            acc += c * x;
        }
        Ok(acc)
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.coeffs.keys().map(String::as_str)
    }
}

/// Atomic formulas. `Le(t)` means `t <= 0`, `Eq(t)` means `t = 0`,
/// `Div(m, t)` means `m` divides `t` with `m >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Atom {
    Le(LinearTerm),
    Eq(LinearTerm),
    Div(BigInt, LinearTerm),
}

impl Atom {
    pub fn le(lhs: &LinearTerm, rhs: &LinearTerm) -> Atom {
        Atom::Le(lhs.sub(rhs))
    }

    pub fn eq(lhs: &LinearTerm, rhs: &LinearTerm) -> Atom {
        Atom::Eq(lhs.sub(rhs))
    }

    pub fn eval(&self, val: &Valuation) -> Result<bool, FormulaError> {
        Ok(match self {
            Atom::Le(t) => !t.eval(val)?.is_positive(),
            Atom::Eq(t) => t.eval(val)?.is_zero(),
            Atom::Div(m, t) => (t.eval(val)? % m).is_zero(),
        })
    }

    fn vars(&self, out: &mut BTreeSet<String>) {
        let t = match self {
            Atom::Le(t) | Atom::Eq(t) | Atom::Div(_, t) => t,
        };
        out.extend(t.vars().map(str::to_string));
    }
}

/// Quantifier block polarity for the Sigma_i / Pi_i classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Sigma,
    Pi,
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Polarity::Sigma => write!(f, "Sigma"),
            Polarity::Pi => write!(f, "Pi"),
        }
    }
}

/// Presburger formulas. `And`/`Or` are n-ary to keep simplification cheap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
}

impl Formula {
    pub fn atom(a: Atom) -> Formula {
        Formula::Atom(a)
    }

    pub fn and(mut fs: Vec<Formula>) -> Formula {
        match fs.len() {
            0 => Formula::True,
            1 => fs.pop().unwrap(),
            _ => Formula::And(fs),
        }
    }

    pub fn or(mut fs: Vec<Formula>) -> Formula {
        match fs.len() {
            0 => Formula::False,
            1 => fs.pop().unwrap(),
            _ => Formula::Or(fs),
        }
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn exists(var: &str, f: Formula) -> Formula {
        Formula::Exists(var.to_string(), Box::new(f))
    }

    pub fn forall(var: &str, f: Formula) -> Formula {
        Formula::Forall(var.to_string(), Box::new(f))
    }

    pub fn exists_many(vars: &[String], f: Formula) -> Formula {
        vars.iter().rev().fold(f, |acc, v| Formula::exists(v, acc))
    }

    /// `lhs <-> rhs`, used by tests and validity checks.
    pub fn iff(lhs: Formula, rhs: Formula) -> Formula {
        Formula::and(vec![
            Formula::or(vec![Formula::not(lhs.clone()), rhs.clone()]),
            Formula::or(vec![Formula::not(rhs), lhs]),
        ])
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out, &mut Vec::new());
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<String>, bound: &mut Vec<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => {
                let mut vs = BTreeSet::new();
                a.vars(&mut vs);
                out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
            }
            Formula::Not(f) => f.collect_free(out, bound),
            Formula::And(fs) | Formula::Or(fs) => {
                for f in fs {
                    f.collect_free(out, bound);
                }
            }
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                bound.push(v.clone());
                f.collect_free(out, bound);
                bound.pop();
            }
        }
    }

    /// All variable names occurring anywhere (free or bound).
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_all(&mut out);
        out
    }

    fn collect_all(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => a.vars(out),
            Formula::Not(f) => f.collect_all(out),
            Formula::And(fs) | Formula::Or(fs) => {
                for f in fs {
                    f.collect_all(out);
                }
            }
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                out.insert(v.clone());
                f.collect_all(out);
            }
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => true,
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(|f| f.is_quantifier_free()),
            Formula::Exists(..) | Formula::Forall(..) => false,
        }
    }

    /// Ground evaluation of a quantifier-free formula.
    pub fn eval_ground(&self, val: &Valuation) -> Result<bool, FormulaError> {
        match self {
            Formula::True => Ok(true),
            Formula::False => Ok(false),
            Formula::Atom(a) => a.eval(val),
            Formula::Not(f) => Ok(!f.eval_ground(val)?),
            Formula::And(fs) => {
                for f in fs {
                    if !f.eval_ground(val)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Or(fs) => {
                for f in fs {
                    if f.eval_ground(val)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::Exists(..) | Formula::Forall(..) => Err(FormulaError::NotGround),
        }
    }

    /// Renames bound variables so they are pairwise distinct and distinct
    /// from every free variable. Display names are kept stable where
    /// possible; clashes get a numeric suffix.
    pub fn normalize_bound(&self) -> Formula {
        let mut used = self.free_vars();
        self.rename_bound(&BTreeMap::new(), &mut used)
    }

    fn rename_bound(&self, map: &BTreeMap<String, String>, used: &mut BTreeSet<String>) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(a) => {
                let swap = |t: &LinearTerm| -> LinearTerm {
                    let mut out = LinearTerm::constant(t.constant.clone());
                    for (v, c) in &t.coeffs {
                        let name = map.get(v).cloned().unwrap_or_else(|| v.clone());
                        let e = out.coeffs.entry(name).or_insert_with(BigInt::zero);
                        *e += c;
                    }
                    out.coeffs.retain(|_, c| !c.is_zero());
                    out
                };
                Formula::Atom(match a {
                    Atom::Le(t) => Atom::Le(swap(t)),
                    Atom::Eq(t) => Atom::Eq(swap(t)),
                    Atom::Div(m, t) => Atom::Div(m.clone(), swap(t)),
                })
            }
            Formula::Not(f) => Formula::not(f.rename_bound(map, used)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.rename_bound(map, used)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.rename_bound(map, used)).collect()),
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                let fresh = fresh_name(v, used);
                used.insert(fresh.clone());
                let mut inner = map.clone();
                inner.insert(v.clone(), fresh.clone());
                let body = f.rename_bound(&inner, used);
                match self {
                    Formula::Exists(..) => Formula::exists(&fresh, body),
                    _ => Formula::forall(&fresh, body),
                }
            }
        }
    }

    /// Replaces a free variable by a linear term. The caller must make sure
    /// no bound variable captures the term (guaranteed after
    /// [`Formula::normalize_bound`] with a term over fresh or free names).
    pub fn substitute(&self, var: &str, term: &LinearTerm) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(a) => Formula::Atom(match a {
                Atom::Le(t) => Atom::Le(t.substitute(var, term)),
                Atom::Eq(t) => Atom::Eq(t.substitute(var, term)),
                Atom::Div(m, t) => Atom::Div(m.clone(), t.substitute(var, term)),
            }),
            Formula::Not(f) => Formula::not(f.substitute(var, term)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.substitute(var, term)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.substitute(var, term)).collect()),
            Formula::Exists(v, f) => {
                if v == var {
                    self.clone()
                } else {
                    Formula::exists(v, f.substitute(var, term))
                }
            }
            Formula::Forall(v, f) => {
                if v == var {
                    self.clone()
                } else {
                    Formula::forall(v, f.substitute(var, term))
                }
            }
        }
    }

    /// Negation normal form of `not self`: quantifiers flip, `<=` and `=`
    /// atoms are rewritten over the integer order, `Not` survives only on
    /// divisibility atoms.
    pub fn negate(&self) -> Formula {
        match self {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Atom(Atom::Le(t)) => {
                // not(t <= 0)  <=>  1 - t <= 0
                Formula::Atom(Atom::Le(t.scale(&BigInt::from(-1)).add_const(&BigInt::one())))
            }
            Formula::Atom(Atom::Eq(t)) => Formula::or(vec![
                Formula::Atom(Atom::Le(t.add_const(&BigInt::one()))),
                Formula::Atom(Atom::Le(t.scale(&BigInt::from(-1)).add_const(&BigInt::one()))),
            ]),
            Formula::Atom(Atom::Div(..)) => Formula::not(self.clone()),
            Formula::Not(f) => f.to_nnf(),
            Formula::And(fs) => Formula::or(fs.iter().map(|f| f.negate()).collect()),
            Formula::Or(fs) => Formula::and(fs.iter().map(|f| f.negate()).collect()),
            Formula::Exists(v, f) => Formula::forall(v, f.negate()),
            Formula::Forall(v, f) => Formula::exists(v, f.negate()),
        }
    }

    /// Negation normal form of the formula itself.
    pub fn to_nnf(&self) -> Formula {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => self.clone(),
            Formula::Not(f) => f.negate(),
            Formula::And(fs) => Formula::and(fs.iter().map(|f| f.to_nnf()).collect()),
            Formula::Or(fs) => Formula::or(fs.iter().map(|f| f.to_nnf()).collect()),
            Formula::Exists(v, f) => Formula::exists(v, f.to_nnf()),
            Formula::Forall(v, f) => Formula::forall(v, f.to_nnf()),
        }
    }

    /// Prenex quantifier prefix with greedy block interleaving: blocks of the
    /// same polarity from different subformulas are merged, minimizing the
    /// number of alternations.
    fn prefix_blocks(&self) -> Vec<(bool, usize)> {
        fn merge(children: Vec<Vec<(bool, usize)>>) -> Vec<(bool, usize)> {
            let mut queues: Vec<std::collections::VecDeque<(bool, usize)>> =
                children.into_iter().map(|c| c.into_iter().collect()).collect();
            let mut out: Vec<(bool, usize)> = Vec::new();
            loop {
                let heads: Vec<bool> = queues.iter().filter_map(|q| q.front().map(|h| h.0)).collect();
                if heads.is_empty() {
                    return out;
                }
                // Prefer continuing the current polarity; otherwise take the
                // polarity offered by most children.
                let want = if let Some(last) = out.last() {
                    if heads.iter().any(|&h| h == last.0) {
                        last.0
                    } else {
                        heads[0]
                    }
                } else {
                    let ex = heads.iter().filter(|&&h| h).count();
                    ex * 2 >= heads.len()
                };
                let mut took = 0usize;
                for q in queues.iter_mut() {
                    while let Some(&(pol, n)) = q.front() {
                        if pol == want {
                            took += n;
                            q.pop_front();
                        } else {
                            break;
                        }
                    }
                }
                if took == 0 {
                    // Nobody offers `want`; flip.
                    let flip = !want;
                    for q in queues.iter_mut() {
                        while let Some(&(pol, n)) = q.front() {
                            if pol == flip {
                                out.push((flip, n));
                                q.pop_front();
                            } else {
                                break;
                            }
                        }
                    }
                    continue;
                }
                match out.last_mut() {
                    Some(last) if last.0 == want => last.1 += took,
                    _ => out.push((want, took)),
                }
            }
        }

        match self {
            Formula::True | Formula::False | Formula::Atom(_) => Vec::new(),
            Formula::Not(f) => f
                .prefix_blocks()
                .into_iter()
                .map(|(pol, n)| (!pol, n))
                .collect(),
            Formula::And(fs) | Formula::Or(fs) => merge(fs.iter().map(|f| f.prefix_blocks()).collect()),
            Formula::Exists(_, f) => {
                let mut rest = f.prefix_blocks();
                match rest.first_mut() {
                    Some(first) if first.0 => first.1 += 1,
                    _ => rest.insert(0, (true, 1)),
                }
                rest
            }
            Formula::Forall(_, f) => {
                let mut rest = f.prefix_blocks();
                match rest.first_mut() {
                    Some(first) if !first.0 => first.1 += 1,
                    _ => rest.insert(0, (false, 1)),
                }
                rest
            }
        }
    }

    /// Prenexes and counts maximal quantifier blocks. Quantifier-free
    /// formulas report `(0, Sigma)` by convention.
    pub fn classify(&self) -> (usize, Polarity) {
        let blocks = self.prefix_blocks();
        match blocks.first() {
            None => (0, Polarity::Sigma),
            Some((true, _)) => (blocks.len(), Polarity::Sigma),
            Some((false, _)) => (blocks.len(), Polarity::Pi),
        }
    }
}

pub(crate) fn fresh_name(base: &str, used: &BTreeSet<String>) -> String {
    if !used.contains(base) {
        return base.to_string();
    }
    let stem: String = base.chars().take_while(|c| !c.is_ascii_digit()).collect();
    let stem = if stem.is_empty() { base.to_string() } else { stem };
    let mut i = 2usize;
    loop {
        let cand = format!("{stem}{i}");
        if !used.contains(&cand) {
            return cand;
        }
        i += 1;
    }
}

/// Total map from variable names to integers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Valuation {
    map: BTreeMap<String, BigInt>,
}

impl Valuation {
    pub fn new() -> Self {
        Valuation::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (String, BigInt)>>(iter: I) -> Self {
        Valuation { map: iter.into_iter().collect() }
    }

    pub fn set(&mut self, var: &str, value: BigInt) {
        self.map.insert(var.to_string(), value);
    }

    pub fn get(&self, var: &str) -> Option<&BigInt> {
        self.map.get(var)
    }
}

/// Substitutes the free variables `x1..xd` of `psi` by the constants of `v`,
/// yielding a sentence. Nonnegative constants go through the `{0,1,+,x2}`
/// binary encoding of [`Term::encode_constant`]; a negative constant is
/// handled by moving its absolute value across each comparison, which is what
/// the linear normal form does on substitution.
pub fn substitute_constants(psi: &Formula, v: &[BigInt]) -> Result<Formula, FormulaError> {
    let free = psi.free_vars();
    let allowed: BTreeSet<String> = (1..=v.len()).map(|i| format!("x{i}")).collect();
    if let Some(bad) = free.iter().find(|f| !allowed.contains(*f)) {
        return Err(FormulaError::NotASentence(bad.clone()));
    }
    let mut out = psi.normalize_bound();
    for (i, value) in v.iter().enumerate() {
        let term = if value.is_negative() {
            Term::encode_constant(&-value).to_linear().scale(&BigInt::from(-1))
        } else {
            Term::encode_constant(value).to_linear()
        };
        out = out.substitute(&format!("x{}", i + 1), &term);
    }
    Ok(out)
}

/// Does the vector `v` satisfy `psi(x1..xd)`? Decided exactly, whatever
/// quantifier structure `psi` has.
pub fn satisfied_by(psi: &Formula, v: &[BigInt]) -> Result<bool, FormulaError> {
    let sentence = substitute_constants(psi, v)?;
    Ok(sat::decide_closed(&sentence))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn val(pairs: &[(&str, i64)]) -> Valuation {
        Valuation::from_pairs(pairs.iter().map(|(v, n)| (v.to_string(), BigInt::from(*n))))
    }

    #[test]
    fn t13_encoding_shape() {
        let t = Term::encode_constant(&BigInt::from(13));
        // x2(x2(x2(1))) + x2(x2(1)) + 1
        let expected = Term::Add(
            Box::new(Term::Add(
                Box::new(Term::Double(Box::new(Term::Double(Box::new(Term::Double(Box::new(
                    Term::One,
                ))))))),
                Box::new(Term::Double(Box::new(Term::Double(Box::new(Term::One))))),
            )),
            Box::new(Term::One),
        );
        assert_eq!(t, expected);
        assert_eq!(t.to_linear().constant, BigInt::from(13));
    }

    #[test]
    fn eval_ground_examples() {
        // x <= x2(x) at x = 3 and x = -1
        let x = LinearTerm::var("x");
        let phi = Formula::Atom(Atom::le(&x, &x.scale(&BigInt::from(2))));
        assert!(phi.eval_ground(&val(&[("x", 3)])).unwrap());
        assert!(!phi.eval_ground(&val(&[("x", -1)])).unwrap());
        // 2 | x + 1 at x = 3
        let div = Formula::Atom(Atom::Div(BigInt::from(2), x.add_const(&BigInt::one())));
        assert!(div.eval_ground(&val(&[("x", 3)])).unwrap());
        // unbound variable
        assert_eq!(
            phi.eval_ground(&Valuation::new()),
            Err(FormulaError::UnboundVariable("x".into()))
        );
    }

    #[test]
    fn negate_le_is_integer_flip() {
        // not(t1 <= t2) -> t2 + 1 <= t1
        let t1 = LinearTerm::var("a");
        let t2 = LinearTerm::var("b");
        let phi = Formula::Atom(Atom::le(&t1, &t2));
        let neg = phi.negate();
        let expected = Formula::Atom(Atom::le(&t2.add_const(&BigInt::one()), &t1));
        assert_eq!(neg, expected);
    }

    #[test]
    fn negate_agrees_with_eval_on_grid() {
        let x = LinearTerm::var("x");
        let y = LinearTerm::var("y");
        let phi = Formula::or(vec![
            Formula::and(vec![
                Formula::Atom(Atom::le(&x, &y)),
                Formula::Atom(Atom::Div(BigInt::from(3), x.add(&y))),
            ]),
            Formula::Atom(Atom::eq(&x.scale(&BigInt::from(2)), &y)),
        ]);
        let neg = phi.negate();
        for a in -4..=4 {
            for b in -4..=4 {
                let v = val(&[("x", a), ("y", b)]);
                assert_eq!(neg.eval_ground(&v).unwrap(), !phi.eval_ground(&v).unwrap());
            }
        }
    }

    #[test]
    fn classify_examples() {
        let x = LinearTerm::var("x");
        let y = LinearTerm::var("y");
        let xy = Formula::Atom(Atom::le(&x, &y));
        // exists x exists y (x <= y) -> (1, Sigma)
        let f1 = Formula::exists("x", Formula::exists("y", xy.clone()));
        assert_eq!(f1.classify(), (1, Polarity::Sigma));
        // exists x forall y (y <= x) -> (2, Sigma)
        let f2 = Formula::exists("x", Formula::forall("y", Formula::Atom(Atom::le(&y, &x))));
        assert_eq!(f2.classify(), (2, Polarity::Sigma));
        // not exists x (x <= 0) -> (1, Pi)
        let f3 = Formula::not(Formula::exists(
            "x",
            Formula::Atom(Atom::Le(LinearTerm::var("x"))),
        ));
        assert_eq!(f3.classify(), (1, Polarity::Pi));
        // quantifier-free -> (0, Sigma)
        assert_eq!(xy.classify(), (0, Polarity::Sigma));
    }

    #[test]
    fn classify_flips_under_negate() {
        let x = LinearTerm::var("x");
        let phi = Formula::exists(
            "y",
            Formula::forall("z", Formula::Atom(Atom::le(&x, &LinearTerm::var("y")))),
        );
        assert_eq!(phi.classify(), (2, Polarity::Sigma));
        assert_eq!(phi.negate().classify(), (2, Polarity::Pi));
    }

    #[test]
    fn classify_interleaves_conjunction() {
        // Sigma_1 and Pi_1 glue to Sigma_2 by interleaving.
        let s1 = Formula::exists("a", Formula::Atom(Atom::Le(LinearTerm::var("a"))));
        let p1 = Formula::forall("b", Formula::Atom(Atom::Le(LinearTerm::var("b"))));
        assert_eq!(Formula::and(vec![s1, p1]).classify(), (2, Polarity::Sigma));
    }

    #[test]
    fn substitute_constants_matches_direct_eval() {
        // psi(x1) = exists y. x1 = y + y  (x1 even)
        let psi = Formula::exists(
            "y",
            Formula::Atom(Atom::eq(
                &LinearTerm::var("x1"),
                &LinearTerm::var("y").scale(&BigInt::from(2)),
            )),
        );
        for n in -20..=20 {
            let got = satisfied_by(&psi, &[BigInt::from(n)]).unwrap();
            assert_eq!(got, n % 2 == 0, "n = {n}");
        }
    }

    #[test]
    fn normalize_bound_separates_names() {
        // exists x (x <= 0 and exists x (x <= 1)) with free x outside
        let inner = Formula::exists(
            "x",
            Formula::Atom(Atom::Le(LinearTerm::var("x").add_const(&BigInt::from(-1)))),
        );
        let f = Formula::and(vec![
            Formula::Atom(Atom::Le(LinearTerm::var("x"))),
            Formula::exists("x", inner),
        ]);
        let n = f.normalize_bound();
        assert_eq!(n.free_vars().len(), 1);
        let mut names = n.all_vars();
        names.remove("x");
        assert_eq!(names.len(), 2, "two distinct bound names: {names:?}");
    }
}
