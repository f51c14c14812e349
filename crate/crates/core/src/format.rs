//! The `.2pa` textual automaton format.
//!
//! ```text
//! alphabet a b #
//! dim 2
//! state q0 R initial
//! state q5 L
//! state qf R halting accepting
//! trans q0 BEGIN q1 (0,0)
//! trans q3 END qf (0,0)
//! constraint: exists y. x1 = y + y /\ x2 <= x1
//! ```
//!
//! `BEGIN`/`END` stand for the endmarkers and are reserved. Lines starting
//! with `;` are comments. Free variables of the constraint are `x1..xd` in
//! dimension order.

use crate::automaton::{AutomatonBuilder, Letter, Reading, TwoWayParikhAutomaton};
use crate::presburger::parse_formula;
use num_bigint::BigInt;
use std::collections::HashMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct FormatError {
    pub line: usize,
    pub msg: String,
}

fn err(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError { line, msg: msg.into() }
}

pub fn parse_automaton(src: &str) -> Result<TwoWayParikhAutomaton, FormatError> {
    let mut alphabet: Option<(usize, Vec<String>)> = None;
    let mut dim: Option<(usize, usize)> = None;
    let mut states: Vec<(usize, String, Reading, bool, bool, bool)> = Vec::new();
    let mut transitions: Vec<(usize, String, String, String, Vec<BigInt>)> = Vec::new();
    let mut constraint: Option<(usize, String)> = None;

    for (i, raw) in src.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with(';') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("constraint:") {
            if constraint.is_some() {
                return Err(err(lineno, "duplicate constraint line"));
            }
            constraint = Some((lineno, rest.trim().to_string()));
            continue;
        }
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("alphabet") => {
                if alphabet.is_some() {
                    return Err(err(lineno, "duplicate alphabet line"));
                }
                let syms: Vec<String> = toks.map(str::to_string).collect();
                for s in &syms {
                    if s == "BEGIN" || s == "END" {
                        return Err(err(lineno, "BEGIN and END are reserved endmarkers"));
                    }
                }
                let mut seen = std::collections::HashSet::new();
                for s in &syms {
                    if !seen.insert(s.clone()) {
                        return Err(err(lineno, format!("duplicate symbol `{s}`")));
                    }
                }
                alphabet = Some((lineno, syms));
            }
            Some("dim") => {
                if dim.is_some() {
                    return Err(err(lineno, "duplicate dim line"));
                }
                let n = toks
                    .next()
                    .ok_or_else(|| err(lineno, "dim needs a number"))?
                    .parse::<usize>()
                    .map_err(|_| err(lineno, "dim needs a nonnegative integer"))?;
                if toks.next().is_some() {
                    return Err(err(lineno, "trailing tokens after dim"));
                }
                dim = Some((lineno, n));
            }
            Some("state") => {
                let name = toks.next().ok_or_else(|| err(lineno, "state needs a name"))?.to_string();
                let reading = match toks.next() {
                    Some("R") => Reading::Right,
                    Some("L") => Reading::Left,
                    other => {
                        return Err(err(
                            lineno,
                            format!("state needs reading direction R or L, found `{}`", other.unwrap_or("")),
                        ))
                    }
                };
                let (mut ini, mut hal, mut acc) = (false, false, false);
                for flag in toks {
                    match flag {
                        "initial" => ini = true,
                        "halting" => hal = true,
                        "accepting" => acc = true,
                        other => return Err(err(lineno, format!("unknown state flag `{other}`"))),
                    }
                }
                states.push((lineno, name, reading, ini, hal, acc));
            }
            Some("trans") => {
                let src_s = toks.next().ok_or_else(|| err(lineno, "trans needs a source state"))?;
                let letter = toks.next().ok_or_else(|| err(lineno, "trans needs a letter"))?;
                let dst_s = toks.next().ok_or_else(|| err(lineno, "trans needs a target state"))?;
                let rest: Vec<&str> = toks.collect();
                let vec_text = rest.join("");
                if !vec_text.starts_with('(') || !vec_text.ends_with(')') {
                    return Err(err(lineno, "trans needs a weight vector like (1,-2)"));
                }
                let inner = &vec_text[1..vec_text.len() - 1];
                let weight: Vec<BigInt> = if inner.trim().is_empty() {
                    Vec::new()
                } else {
                    inner
                        .split(',')
                        .map(|p| {
                            p.trim()
                                .parse::<BigInt>()
                                .map_err(|_| err(lineno, format!("bad vector entry `{p}`")))
                        })
                        .collect::<Result<_, _>>()?
                };
                transitions.push((lineno, src_s.to_string(), letter.to_string(), dst_s.to_string(), weight));
            }
            Some(other) => return Err(err(lineno, format!("unknown directive `{other}`"))),
            None => unreachable!(),
        }
    }

    let (_, alphabet) = alphabet.ok_or_else(|| err(src.lines().count(), "missing alphabet line"))?;
    let (_, dim) = dim.ok_or_else(|| err(src.lines().count(), "missing dim line"))?;
    let (cline, ctext) = constraint.ok_or_else(|| err(src.lines().count(), "missing constraint line"))?;

    let mut b = AutomatonBuilder::with_alphabet(alphabet.clone(), dim);
    let mut ids: HashMap<String, usize> = HashMap::new();
    for (lineno, name, reading, ini, hal, acc) in states {
        if ids.contains_key(&name) {
            return Err(err(lineno, format!("duplicate state `{name}`")));
        }
        let id = b.state(&name, reading);
        ids.insert(name, id);
        if ini {
            b.mark_initial(id);
        }
        if hal {
            b.mark_halting(id, false);
        }
        if acc {
            b.mark_accepting_only(id);
        }
    }
    let symidx: HashMap<&str, usize> = alphabet.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    for (lineno, src_s, letter_s, dst_s, weight) in transitions {
        let src = *ids.get(&src_s).ok_or_else(|| err(lineno, format!("unknown state `{src_s}`")))?;
        let dst = *ids.get(&dst_s).ok_or_else(|| err(lineno, format!("unknown state `{dst_s}`")))?;
        let letter = match letter_s.as_str() {
            "BEGIN" => Letter::Begin,
            "END" => Letter::End,
            s => Letter::Sym(*symidx.get(s).ok_or_else(|| err(lineno, format!("unknown symbol `{s}`")))?),
        };
        b.transition(src, letter, dst, weight);
    }
    let formula = parse_formula(&ctext).map_err(|e| err(cline, e.to_string()))?;
    b.constraint(formula);
    Ok(b.build())
}

pub fn print_automaton(a: &TwoWayParikhAutomaton) -> String {
    let mut out = String::new();
    out.push_str("alphabet");
    for s in a.alphabet() {
        let _ = write!(out, " {s}");
    }
    out.push('\n');
    let _ = writeln!(out, "dim {}", a.dimension());
    for s in 0..a.state_count() {
        let _ = write!(
            out,
            "state {} {}",
            a.state_name(s),
            match a.reading(s) {
                Reading::Right => "R",
                Reading::Left => "L",
            }
        );
        if a.initial_states().contains(&s) {
            out.push_str(" initial");
        }
        if a.halting_states().contains(&s) {
            out.push_str(" halting");
        }
        if a.accepting_states().contains(&s) {
            out.push_str(" accepting");
        }
        out.push('\n');
    }
    for t in a.transitions() {
        let entries: Vec<String> = t.weight.iter().map(|e| e.to_string()).collect();
        let _ = writeln!(
            out,
            "trans {} {} {} ({})",
            a.state_name(t.src),
            a.letter_name(t.letter),
            a.state_name(t.dst),
            entries.join(",")
        );
    }
    let _ = writeln!(out, "constraint: {}", a.constraint());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::sweep;
    use crate::presburger::qe::simplify;

    /// Structural equality with constraints compared after normalization,
    /// since `true` has no surface literal and prints as `0 <= 0`.
    pub(crate) fn roundtrip_equal(a: &TwoWayParikhAutomaton, b: &TwoWayParikhAutomaton) -> bool {
        let ca = simplify(&a.constraint().normalize_bound());
        let cb = simplify(&b.constraint().normalize_bound());
        let mut same = a.alphabet() == b.alphabet()
            && a.dimension() == b.dimension()
            && a.initial_states() == b.initial_states()
            && a.halting_states() == b.halting_states()
            && a.accepting_states() == b.accepting_states()
            && a.transitions() == b.transitions();
        same &= (0..a.state_count()).all(|s| {
            s < b.state_count() && a.state_name(s) == b.state_name(s) && a.reading(s) == b.reading(s)
        });
        same && ca == cb
    }

    #[test]
    fn sweep_roundtrips() {
        let s = sweep();
        let text = print_automaton(&s);
        let back = parse_automaton(&text).unwrap();
        back.validate().unwrap();
        assert!(roundtrip_equal(&s, &back), "printed:\n{text}");
    }

    #[test]
    fn spec_header_example_parses() {
        let src = "\
alphabet a b #
dim 2
state q0 R initial
state q1 R
state q3 R
state q5 L
state qf R halting accepting
trans q0 BEGIN q1 (0,0)
trans q3 END qf (0,0)
constraint: exists y. x1 = y + y /\\ x2 <= x1
";
        let a = parse_automaton(src).unwrap();
        a.validate().unwrap();
        assert_eq!(a.alphabet(), &["a", "b", "#"]);
        assert_eq!(a.dimension(), 2);
        assert_eq!(a.state_count(), 5);
        assert_eq!(a.transitions().len(), 2);
    }

    #[test]
    fn errors_name_lines() {
        let bad = "alphabet a\ndim 1\nstate q R initial\ntrans q wat q (0)\nconstraint: x1 = 0\n";
        let e = parse_automaton(bad).unwrap_err();
        assert_eq!(e.line, 4);
        let bad2 = "alphabet a\ndim x\nconstraint: 0 <= 0\n";
        assert_eq!(parse_automaton(bad2).unwrap_err().line, 2);
        let bad3 = "alphabet a\ndim 0\nconstraint: x1 <= \n";
        assert_eq!(parse_automaton(bad3).unwrap_err().line, 3);
    }

    #[test]
    fn comment_lines_are_ignored() {
        let src = "; generated\nalphabet a\ndim 0\nstate q R initial\nstate f R halting accepting\ntrans q BEGIN q ()\ntrans q END f ()\nconstraint: 0 <= 0\n";
        let a = parse_automaton(src).unwrap();
        a.validate().unwrap();
        assert_eq!(a.state_count(), 2);
    }

    #[test]
    fn empty_word_dimension_zero_roundtrip() {
        let src = "alphabet\ndim 0\nstate q R initial\nconstraint: 0 <= 0\n";
        let a = parse_automaton(src).unwrap();
        a.validate().unwrap();
        let back = parse_automaton(&print_automaton(&a)).unwrap();
        assert!(roundtrip_equal(&a, &back));
    }
}
