//! Crossing sections, anchorages, the matching relation, run merging, and
//! the two conversions from bounded-visit two-way automata to one-way ones
//! (language-preserving, and emptiness-preserving with the same weight
//! vectors).

use crate::automaton::{
    AutomatonBuilder, Configuration, Letter, Reading, Run, StateId, TwoWayParikhAutomaton,
};
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::HashMap;
use std::collections::VecDeque;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CrossingError {
    #[error("visit bound must be at least 1")]
    InvalidVisitBound,
    #[error("malformed crossing section: {0}")]
    MalformedSection(String),
    #[error("expected {expected} sections for the endmarked word, got {got}")]
    SectionCountMismatch { expected: usize, got: usize },
    #[error("section {index} reads {got} but the tape letter is {want}")]
    SectionLetterMismatch { index: usize, got: String, want: String },
    #[error("first section is not initial")]
    NotInitial,
    #[error("last section is not accepting")]
    NotAccepting,
    #[error("adjacent sections {index} and {next} do not match", next = index + 1)]
    NonMatching { index: usize },
    #[error("section threading failed: {0}")]
    ThreadingFailed(String),
}

/// The slice of a run's transitions that consume one fixed tape position, in
/// trace order. Transition indices refer to the originating automaton.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CrossingSection {
    pub letter: Letter,
    pub transitions: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl CrossingSection {
    /// Componentwise sum of the section's weight vectors.
    pub fn value(&self, aut: &TwoWayParikhAutomaton) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); aut.dimension()];
        for &t in &self.transitions {
            for (acc, w) in v.iter_mut().zip(&aut.transitions()[t].weight) {
                *acc += w;
            }
        }
        v
    }

    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    /// Alternation well-formedness: all transitions read this section's
    /// letter, sources alternate starting and ending right-reading, and the
    /// final target reads right.
    pub fn check(&self, aut: &TwoWayParikhAutomaton) -> Result<(), CrossingError> {
        if self.transitions.is_empty() {
            return Err(CrossingError::MalformedSection("empty section".into()));
        }
        if self.transitions.len() % 2 == 0 {
            return Err(CrossingError::MalformedSection(
                "section has an even number of transitions".into(),
            ));
        }
        for (i, &t) in self.transitions.iter().enumerate() {
            let tr = &aut.transitions()[t];
            if tr.letter != self.letter {
                return Err(CrossingError::MalformedSection(format!(
                    "transition {} reads a different letter",
                    aut.fmt_transition(t)
                )));
            }
            let want = if i % 2 == 0 { Reading::Right } else { Reading::Left };
            if aut.reading(tr.src) != want {
                return Err(CrossingError::MalformedSection(format!(
                    "source of transition {i} does not alternate"
                )));
            }
        }
        let last = *self.transitions.last().unwrap();
        if aut.reading(aut.transitions()[last].dst) != Reading::Right {
            return Err(CrossingError::MalformedSection(
                "final target is not right-reading".into(),
            ));
        }
        Ok(())
    }

    /// Residual state sequence on one side after cancelling immediate
    /// direction reversals: on the left side a pair `(q, p)` of a leftward
    /// landing and the next rightward departure disappears when `q = p` is
    /// right-reading, dually on the right side.
    pub fn anchorage(&self, aut: &TwoWayParikhAutomaton, side: Side) -> Result<Vec<StateId>, CrossingError> {
        self.check(aut)?;
        let ts = &self.transitions;
        let tr = |i: usize| &aut.transitions()[ts[i]];
        let mut out = Vec::new();
        match side {
            Side::Left => {
                out.push(tr(0).src);
                let mut j = 1;
                while j + 1 < ts.len() {
                    let q = tr(j).dst;
                    let p = tr(j + 1).src;
                    if !(q == p && aut.reading(q) == Reading::Right) {
                        out.push(q);
                        out.push(p);
                    }
                    j += 2;
                }
            }
            Side::Right => {
                let mut j = 0;
                while j + 1 < ts.len() {
                    let q = tr(j).dst;
                    let p = tr(j + 1).src;
                    if !(q == p && aut.reading(q) == Reading::Left) {
                        out.push(q);
                        out.push(p);
                    }
                    j += 2;
                }
                out.push(tr(ts.len() - 1).dst);
            }
        }
        Ok(out)
    }

    /// Initial sections expose a single initial state on the left.
    pub fn is_initial(&self, aut: &TwoWayParikhAutomaton) -> Result<bool, CrossingError> {
        let anch = self.anchorage(aut, Side::Left)?;
        Ok(self.letter == Letter::Begin
            && anch.len() == 1
            && aut.initial_states().contains(&anch[0]))
    }

    /// Accepting sections expose a single accepting state on the right.
    pub fn is_accepting(&self, aut: &TwoWayParikhAutomaton) -> Result<bool, CrossingError> {
        let anch = self.anchorage(aut, Side::Right)?;
        Ok(self.letter == Letter::End
            && anch.len() == 1
            && aut.accepting_states().contains(&anch[0]))
    }

    fn name(&self, aut: &TwoWayParikhAutomaton) -> String {
        let parts: Vec<String> = self
            .transitions
            .iter()
            .map(|&t| {
                let tr = &aut.transitions()[t];
                format!(
                    "{}.{}.{}",
                    aut.state_name(tr.src),
                    aut.letter_name(tr.letter),
                    aut.state_name(tr.dst)
                )
            })
            .collect();
        format!("[{}]", parts.join("|"))
    }
}

/// The matching relation: the right anchorage of `c1` equals the left
/// anchorage of `c2`.
pub fn is_matching(
    aut: &TwoWayParikhAutomaton,
    c1: &CrossingSection,
    c2: &CrossingSection,
) -> Result<bool, CrossingError> {
    Ok(c1.anchorage(aut, Side::Right)? == c2.anchorage(aut, Side::Left)?)
}

/// The crossing-section sequence of a finished accepting run: one section
/// per letter of the endmarked tape.
pub fn crossing_sections_of(aut: &TwoWayParikhAutomaton, run: &Run) -> Vec<CrossingSection> {
    let n = run.word.len() + 2;
    let mut sections: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut cfg = run.start;
    for &(t, next) in &run.steps {
        let col = match aut.reading(cfg.state) {
            Reading::Right => cfg.position,
            Reading::Left => cfg.position - 1,
        };
        sections[col].push(t);
        cfg = next;
    }
    sections
        .into_iter()
        .enumerate()
        .map(|(i, transitions)| CrossingSection {
            letter: if i == 0 {
                Letter::Begin
            } else if i == n - 1 {
                Letter::End
            } else {
                Letter::Sym(run.word[i - 1])
            },
            transitions,
        })
        .collect()
}

/// Reconstructs the unique accepting run whose crossing-section sequence is
/// `sections`, by threading the per-column transition queues left to right.
/// The result is validated by replaying it through `step`.
pub fn merge(
    aut: &TwoWayParikhAutomaton,
    sections: &[CrossingSection],
    word: &[usize],
) -> Result<Run, CrossingError> {
    let n = word.len() + 2;
    if sections.len() != n {
        return Err(CrossingError::SectionCountMismatch { expected: n, got: sections.len() });
    }
    for (i, c) in sections.iter().enumerate() {
        let want = if i == 0 {
            Letter::Begin
        } else if i == n - 1 {
            Letter::End
        } else {
            Letter::Sym(word[i - 1])
        };
        if c.letter != want {
            return Err(CrossingError::SectionLetterMismatch {
                index: i,
                got: aut.letter_name(c.letter),
                want: aut.letter_name(want),
            });
        }
        c.check(aut)?;
    }
    if !sections[0].is_initial(aut)? {
        return Err(CrossingError::NotInitial);
    }
    if !sections[n - 1].is_accepting(aut)? {
        return Err(CrossingError::NotAccepting);
    }
    for i in 0..n - 1 {
        if !is_matching(aut, &sections[i], &sections[i + 1])? {
            return Err(CrossingError::NonMatching { index: i });
        }
    }

    let mut queues: Vec<VecDeque<usize>> = sections
        .iter()
        .map(|c| c.transitions.iter().copied().collect())
        .collect();
    let start_state = aut.transitions()[sections[0].transitions[0]].src;
    let start = Configuration { position: 0, state: start_state };
    let mut cfg = start;
    let mut steps: Vec<(usize, Configuration)> = Vec::new();
    let mut value = vec![BigInt::zero(); aut.dimension()];
    while !aut.halting_states().contains(&cfg.state) {
        let (col, next_pos) = match aut.reading(cfg.state) {
            Reading::Right => {
                if cfg.position >= n {
                    return Err(CrossingError::ThreadingFailed("head ran past the right end".into()));
                }
                (cfg.position, cfg.position + 1)
            }
            Reading::Left => {
                if cfg.position == 0 {
                    return Err(CrossingError::ThreadingFailed("head ran past the left end".into()));
                }
                (cfg.position - 1, cfg.position - 1)
            }
        };
        let t = queues[col]
            .pop_front()
            .ok_or_else(|| CrossingError::ThreadingFailed(format!("column {col} exhausted")))?;
        let tr = &aut.transitions()[t];
        if tr.src != cfg.state {
            return Err(CrossingError::ThreadingFailed(format!(
                "expected a transition from {} in column {col}, found {}",
                aut.state_name(cfg.state),
                aut.fmt_transition(t)
            )));
        }
        for (acc, w) in value.iter_mut().zip(&tr.weight) {
            *acc += w;
        }
        cfg = Configuration { position: next_pos, state: tr.dst };
        steps.push((t, cfg));
    }
    if let Some(col) = queues.iter().position(|q| !q.is_empty()) {
        return Err(CrossingError::ThreadingFailed(format!(
            "column {col} has unconsumed transitions"
        )));
    }
    if !aut.accepting_states().contains(&cfg.state) || cfg.position != n {
        return Err(CrossingError::ThreadingFailed("run does not end accepting".into()));
    }
    let run = Run { word: word.to_vec(), start, steps, value };
    aut.replay(&run).map_err(CrossingError::ThreadingFailed)?;
    Ok(run)
}

/// Enumerates the sections over `letter` whose left anchorage equals
/// `sigma`, up to length `k`. Generation is driven by the anchorage so only
/// sections compatible with an already-reachable neighbour are ever built.
fn sections_with_left_anchorage(
    aut: &TwoWayParikhAutomaton,
    letter: Letter,
    sigma: &[StateId],
    k: usize,
    left_sources: &[usize],
    distinct: bool,
) -> Vec<CrossingSection> {
    let out = Vec::new();
    if sigma.is_empty() || aut.reading(sigma[0]) != Reading::Right {
        return out;
    }

    struct Gen<'a> {
        aut: &'a TwoWayParikhAutomaton,
        letter: Letter,
        sigma: &'a [StateId],
        k: usize,
        left_sources: &'a [usize],
        /// Accepting runs of deterministic automata never repeat a
        /// configuration, so their sections never repeat a transition;
        /// pruning duplicates keeps generation polynomial there even for
        /// large visit bounds.
        distinct: bool,
        stack: Vec<usize>,
        out: Vec<CrossingSection>,
    }
    impl<'a> Gen<'a> {
        fn push_pair(&mut self, tl: usize, tr: usize, consumed: usize) {
            if self.distinct && (self.stack.contains(&tl) || self.stack.contains(&tr) || tl == tr) {
                return;
            }
            self.stack.push(tl);
            self.stack.push(tr);
            self.extend(consumed);
            self.stack.pop();
            self.stack.pop();
        }

        /// Invariant: `stack` ends with a rightward transition and the first
        /// `consumed` states of sigma are accounted for.
        fn extend(&mut self, consumed: usize) {
            let last = *self.stack.last().unwrap();
            let last_dst = self.aut.transitions()[last].dst;
            if consumed == self.sigma.len() && self.aut.reading(last_dst) == Reading::Right {
                self.out.push(CrossingSection { letter: self.letter, transitions: self.stack.clone() });
            }
            if self.stack.len() + 2 > self.k {
                return;
            }
            for li in 0..self.left_sources.len() {
                let tl = self.left_sources[li];
                let q = self.aut.transitions()[tl].dst;
                // immediate turnaround at the left boundary: cancelled pair
                if self.aut.reading(q) == Reading::Right {
                    let rights: Vec<usize> = self.aut.transitions_from(q, self.letter).to_vec();
                    for tr in rights {
                        self.push_pair(tl, tr, consumed);
                    }
                }
                // pair exposed in the anchorage: consume two sigma entries
                if consumed + 1 < self.sigma.len() && q == self.sigma[consumed] {
                    let p = self.sigma[consumed + 1];
                    if !(q == p && self.aut.reading(q) == Reading::Right) {
                        let rights: Vec<usize> = self.aut.transitions_from(p, self.letter).to_vec();
                        for tr in rights {
                            self.push_pair(tl, tr, consumed + 2);
                        }
                    }
                }
            }
        }
    }

    let mut gen = Gen { aut, letter, sigma, k, left_sources, distinct, stack: Vec::new(), out: Vec::new() };
    let firsts: Vec<usize> = aut.transitions_from(sigma[0], letter).to_vec();
    for t in firsts {
        gen.stack.push(t);
        gen.extend(1);
        gen.stack.pop();
    }
    gen.out
}

/// A converted one-way automaton together with the section behind each state.
#[derive(Debug, Clone)]
pub struct Conversion {
    pub automaton: TwoWayParikhAutomaton,
    /// Per state of `automaton`: the crossing section it stands for, `None`
    /// for the accepting sentinel and the padding states of the emptiness
    /// variant.
    pub sections: Vec<Option<CrossingSection>>,
    pub top: StateId,
    /// Index of the padding symbol in the converted automaton's alphabet
    /// (emptiness variant only).
    pub pad: Option<usize>,
}

struct SectionGraph {
    sections: Vec<CrossingSection>,
    index: HashMap<(Letter, Vec<usize>), usize>,
    initial: Vec<usize>,
    /// (from section, to section); labelled by the source's letter
    edges: Vec<(usize, usize)>,
    accepting: Vec<usize>,
}

fn explore_sections(aut: &TwoWayParikhAutomaton, k: usize) -> Result<SectionGraph, CrossingError> {
    if k == 0 {
        return Err(CrossingError::InvalidVisitBound);
    }
    let distinct = aut.is_deterministic();
    let mut left_sources: HashMap<Letter, Vec<usize>> = HashMap::new();
    for (i, t) in aut.transitions().iter().enumerate() {
        if aut.reading(t.src) == Reading::Left {
            left_sources.entry(t.letter).or_default().push(i);
        }
    }
    let empty: Vec<usize> = Vec::new();

    let mut g = SectionGraph {
        sections: Vec::new(),
        index: HashMap::new(),
        initial: Vec::new(),
        edges: Vec::new(),
        accepting: Vec::new(),
    };
    let mut queue: VecDeque<usize> = VecDeque::new();
    let intern = |g: &mut SectionGraph, queue: &mut VecDeque<usize>, c: CrossingSection| -> usize {
        let key = (c.letter, c.transitions.clone());
        if let Some(&i) = g.index.get(&key) {
            return i;
        }
        let i = g.sections.len();
        g.sections.push(c);
        g.index.insert(key, i);
        queue.push_back(i);
        i
    };

    for &q0 in aut.initial_states() {
        let ls = left_sources.get(&Letter::Begin).unwrap_or(&empty);
        for c in sections_with_left_anchorage(aut, Letter::Begin, &[q0], k, ls, distinct) {
            let i = intern(&mut g, &mut queue, c);
            if !g.initial.contains(&i) {
                g.initial.push(i);
            }
        }
    }

    let mut letters: Vec<Letter> = (0..aut.alphabet().len()).map(Letter::Sym).collect();
    letters.push(Letter::End);

    while let Some(i) = queue.pop_front() {
        let c = g.sections[i].clone();
        if c.letter == Letter::End {
            if c.is_accepting(aut)? {
                g.accepting.push(i);
            }
            // nothing follows the right endmarker
            continue;
        }
        let sigma = c.anchorage(aut, Side::Right)?;
        for &b in &letters {
            let ls = left_sources.get(&b).unwrap_or(&empty);
            for c2 in sections_with_left_anchorage(aut, b, &sigma, k, ls, distinct) {
                let j = intern(&mut g, &mut queue, c2);
                g.edges.push((i, j));
            }
        }
    }
    Ok(g)
}

fn top_name(aut: &TwoWayParikhAutomaton) -> String {
    // section names are bracketed, so a bare name cannot collide with them
    let _ = aut;
    "TOP".to_string()
}

/// Conversion of a k-visit two-way automaton into a language-equivalent
/// one-way automaton over crossing sections. If the automaton is not
/// actually k-visit the result under-approximates the language (runs with a
/// section longer than `k` are lost); `check_k_visit` is the guard.
pub fn to_one_way(aut: &TwoWayParikhAutomaton, k: usize) -> Result<Conversion, CrossingError> {
    let g = explore_sections(aut, k)?;
    let mut b = AutomatonBuilder::with_alphabet(aut.alphabet().to_vec(), aut.dimension());
    let mut ids: Vec<StateId> = Vec::with_capacity(g.sections.len());
    for c in &g.sections {
        ids.push(b.state(&c.name(aut), Reading::Right));
    }
    let top = b.state(&top_name(aut), Reading::Right);
    for &i in &g.initial {
        b.mark_initial(ids[i]);
    }
    b.mark_halting(top, true);
    for &(i, j) in &g.edges {
        let c = &g.sections[i];
        b.transition(ids[i], c.letter, ids[j], c.value(aut));
    }
    for &i in &g.accepting {
        let c = &g.sections[i];
        b.transition(ids[i], Letter::End, top, c.value(aut));
    }
    b.constraint(aut.constraint().clone());
    let automaton = b.build();
    let mut sections: Vec<Option<CrossingSection>> = g.sections.into_iter().map(Some).collect();
    sections.push(None);
    Ok(Conversion { automaton, sections, top, pad: None })
}

/// The emptiness-preserving variant: every transition leaving a section of
/// length `l` is split into `l` consecutive transitions through fresh states
/// reading a padding symbol, each carrying one original weight vector, so
/// the weight range is preserved exactly. Erasing the padding symbol from
/// the accepted words gives back the k-visit-accepted language.
pub fn to_one_way_emptiness(aut: &TwoWayParikhAutomaton, k: usize) -> Result<Conversion, CrossingError> {
    let g = explore_sections(aut, k)?;
    let mut alphabet = aut.alphabet().to_vec();
    let pad_name = ["#", "%", "@", "!", "pad"]
        .iter()
        .map(|s| s.to_string())
        .find(|s| !alphabet.contains(s))
        .unwrap_or_else(|| {
            let mut i = 2usize;
            loop {
                let cand = format!("pad{i}");
                if !alphabet.contains(&cand) {
                    break cand;
                }
                i += 1;
            }
        });
    alphabet.push(pad_name);
    let pad = alphabet.len() - 1;

    let mut b = AutomatonBuilder::with_alphabet(alphabet, aut.dimension());
    let mut ids: Vec<StateId> = Vec::with_capacity(g.sections.len());
    for c in &g.sections {
        ids.push(b.state(&c.name(aut), Reading::Right));
    }
    let top = b.state(&top_name(aut), Reading::Right);
    for &i in &g.initial {
        b.mark_initial(ids[i]);
    }
    b.mark_halting(top, true);

    let mut sections: Vec<Option<CrossingSection>> = g.sections.iter().cloned().map(Some).collect();
    sections.push(None);

    // Split `src --letter--> dst` into the section's weight vectors. Inner
    // letters read the letter first and pad after; the final transition into
    // the sentinel must read the right endmarker last, so there the padding
    // comes first.
    let split = |b: &mut AutomatonBuilder,
                     sections: &mut Vec<Option<CrossingSection>>,
                     c: &CrossingSection,
                     src: StateId,
                     dst: StateId,
                     dst_name: String,
                     end_last: bool| {
        let weights: Vec<Vec<BigInt>> =
            c.transitions.iter().map(|&t| aut.transitions()[t].weight.clone()).collect();
        let l = weights.len();
        let mut cur = src;
        for (i, w) in weights.iter().enumerate() {
            let next = if i + 1 == l {
                dst
            } else {
                let s = b.state(&format!("{}>{}>{}", c.name(aut), i + 1, dst_name), Reading::Right);
                sections.push(None);
                s
            };
            let letter = if end_last {
                if i + 1 == l {
                    Letter::End
                } else {
                    Letter::Sym(pad)
                }
            } else if i == 0 {
                c.letter
            } else {
                Letter::Sym(pad)
            };
            b.transition(cur, letter, next, w.clone());
            cur = next;
        }
    };

    for &(i, j) in &g.edges {
        let c = g.sections[i].clone();
        let dst_name = g.sections[j].name(aut);
        split(&mut b, &mut sections, &c, ids[i], ids[j], dst_name, false);
    }
    for &i in &g.accepting {
        let c = g.sections[i].clone();
        split(&mut b, &mut sections, &c, ids[i], top, top_name(aut), true);
    }
    b.constraint(aut.constraint().clone());
    let automaton = b.build();
    Ok(Conversion { automaton, sections, top, pad: Some(pad) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{sweep, wvec, OracleVerdict};

    #[test]
    fn paper_example_anchorages() {
        // A 15-state skeleton reproducing the worked crossing section:
        // q2 -a-> q3 (L), q3 -a-> q4, q4 -a-> q5, q11 -a-> q12, q12 -a-> q13.
        let mut b = AutomatonBuilder::new(&["a"], 0);
        let mut states = Vec::new();
        // readings: q2 R, q3 L, q4 R, q5 R, q11 L, q12 R, q13 R
        for (name, r) in [
            ("q2", Reading::Right),
            ("q3", Reading::Left),
            ("q4", Reading::Right),
            ("q5", Reading::Right),
            ("q11", Reading::Left),
            ("q12", Reading::Right),
            ("q13", Reading::Right),
        ] {
            states.push(b.state(name, r));
        }
        let (q2, q3, q4, q5, q11, q12, q13) =
            (states[0], states[1], states[2], states[3], states[4], states[5], states[6]);
        let a = Letter::Sym(0);
        b.transition(q2, a, q3, vec![]);
        b.transition(q3, a, q4, vec![]);
        b.transition(q4, a, q5, vec![]);
        b.transition(q11, a, q12, vec![]);
        b.transition(q12, a, q13, vec![]);
        let aut = b.build();
        let c = CrossingSection { letter: a, transitions: vec![0, 1, 2, 3, 4] };
        assert_eq!(c.anchorage(&aut, Side::Left).unwrap(), vec![q2]);
        assert_eq!(c.anchorage(&aut, Side::Right).unwrap(), vec![q5, q11, q13]);
    }

    #[test]
    fn singleton_sections_match_like_states() {
        let mut b = AutomatonBuilder::new(&["a", "b"], 0);
        let p = b.state("p", Reading::Right);
        let q = b.state("q", Reading::Right);
        let r = b.state("r", Reading::Right);
        b.transition(p, Letter::Sym(0), q, vec![]);
        b.transition(q, Letter::Sym(1), r, vec![]);
        b.transition(p, Letter::Sym(1), r, vec![]);
        let aut = b.build();
        let c1 = CrossingSection { letter: Letter::Sym(0), transitions: vec![0] };
        let c2 = CrossingSection { letter: Letter::Sym(1), transitions: vec![1] };
        let c3 = CrossingSection { letter: Letter::Sym(1), transitions: vec![2] };
        assert_eq!(c1.anchorage(&aut, Side::Left).unwrap(), vec![p]);
        assert_eq!(c1.anchorage(&aut, Side::Right).unwrap(), vec![q]);
        assert!(is_matching(&aut, &c1, &c2).unwrap());
        assert!(!is_matching(&aut, &c1, &c3).unwrap());
    }

    #[test]
    fn sweep_sections_of_run() {
        let s = sweep();
        let word = s.parse_word("ab").unwrap();
        let runs = s.accepting_runs(&word, 60);
        assert_eq!(runs.len(), 1);
        let secs = crossing_sections_of(&s, &runs[0]);
        assert_eq!(secs.len(), word.len() + 2);
        for sec in &secs {
            sec.check(&s).unwrap();
            assert_eq!(sec.len(), 3);
            assert!(sec.len() <= runs[0].max_visits());
        }
        for i in 0..secs.len() - 1 {
            assert!(is_matching(&s, &secs[i], &secs[i + 1]).unwrap());
        }
        assert!(secs[0].is_initial(&s).unwrap());
        assert!(secs.last().unwrap().is_accepting(&s).unwrap());
    }

    #[test]
    fn merge_round_trips_sweep_runs() {
        let s = sweep();
        for text in ["", "ab", "ba", "aabb", "abab"] {
            let word = s.parse_word(text).unwrap();
            for run in s.accepting_runs(&word, 80) {
                let secs = crossing_sections_of(&s, &run);
                let back = merge(&s, &secs, &word).unwrap();
                assert_eq!(back, run, "word {text}");
                let total: Vec<BigInt> = {
                    let mut acc = vec![BigInt::zero(); 2];
                    for c in &secs {
                        for (a, v) in acc.iter_mut().zip(c.value(&s)) {
                            *a += v;
                        }
                    }
                    acc
                };
                assert_eq!(total, run.value);
            }
        }
    }

    #[test]
    fn merge_reports_first_failing_pair() {
        let s = sweep();
        let word = s.parse_word("ab").unwrap();
        let runs = s.accepting_runs(&word, 60);
        let mut secs = crossing_sections_of(&s, &runs[0]);
        // swap the two inner sections so letters disagree with the word
        secs.swap(1, 2);
        let e = merge(&s, &secs, &word).unwrap_err();
        assert!(matches!(e, CrossingError::SectionLetterMismatch { index: 1, .. }));
    }

    #[test]
    fn sweep_converts_language_equal() {
        let s = sweep();
        let conv = to_one_way(&s, 3).unwrap();
        conv.automaton.validate().unwrap();
        assert!(conv.automaton.is_one_way());
        let lhs = s.language_sample(5, 120);
        let rhs = conv.automaton.language_sample(5, 120);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn converted_deterministic_input_is_unambiguous() {
        let s = sweep();
        let conv = to_one_way(&s, 3).unwrap();
        for word in crate::automaton::words_up_to(2, 5) {
            let runs = conv.automaton.accepting_runs(&word, 200);
            assert!(runs.len() <= 1, "word {:?} has {} accepting runs", word, runs.len());
        }
    }

    #[test]
    fn state_count_within_bound() {
        let s = sweep();
        let k = 3usize;
        let conv = to_one_way(&s, k).unwrap();
        let d = s.transitions().len();
        let bound: usize = (1..=k).map(|l| d.pow(l as u32)).sum::<usize>() + 1;
        assert!(conv.automaton.state_count() <= bound);
    }

    #[test]
    fn one_way_converts_to_itself_shape() {
        // one-way automata have singleton sections only; k = 1 keeps the
        // language
        let mut b = AutomatonBuilder::new(&["a"], 1);
        let q0 = b.state("q0", Reading::Right);
        let q1 = b.state("q1", Reading::Right);
        let qf = b.state("qf", Reading::Right);
        b.mark_initial(q0);
        b.mark_halting(qf, true);
        b.transition(q0, Letter::Begin, q1, wvec(&[0]));
        b.transition(q1, Letter::Sym(0), q1, wvec(&[1]));
        b.transition(q1, Letter::End, qf, wvec(&[0]));
        b.constraint(crate::presburger::parse_formula("2 | x1").unwrap());
        let a = b.build();
        a.validate().unwrap();
        let conv = to_one_way(&a, 1).unwrap();
        conv.automaton.validate().unwrap();
        assert_eq!(a.language_sample(6, 40), conv.automaton.language_sample(6, 40));
    }

    #[test]
    fn emptiness_variant_splits_and_preserves_vectors() {
        let s = sweep();
        let conv = to_one_way_emptiness(&s, 3).unwrap();
        conv.automaton.validate().unwrap();
        let pad = conv.pad.unwrap();
        assert_eq!(conv.automaton.alphabet()[pad], "#");
        // weight range is included in the original's
        let orig = s.weight_range();
        for v in conv.automaton.weight_range() {
            assert!(orig.contains(&v), "vector {v:?} not among the original weights");
        }
        // erasing pads from short accepted words reproduces the language
        let padded = conv.automaton.language_sample(10, 40);
        let mut erased: std::collections::BTreeSet<Vec<usize>> = Default::default();
        for w in &padded {
            erased.insert(w.iter().copied().filter(|&s2| s2 != pad).collect());
        }
        let direct = s.language_sample(2, 60);
        for w in &direct {
            // an accepting SWEEP run on w has 3(|w|+2) transitions, hence a
            // padded word of length 3(|w|+2) - 2 <= 10 for |w| <= 2
            assert!(erased.contains(w), "missing {:?}", s.format_word(w));
        }
        for w in &erased {
            assert!(
                matches!(s.accepts_oracle(w, 80), OracleVerdict::Accepted),
                "extra word {:?}",
                s.format_word(w)
            );
        }
        // fresh state count: sum over split transitions of (|c1| - 1)
        let plain = to_one_way(&s, 3).unwrap();
        let mut expected_fresh = 0usize;
        for st in 0..plain.automaton.state_count() {
            if let Some(c) = &plain.sections[st] {
                let out_degree = plain
                    .automaton
                    .transitions()
                    .iter()
                    .filter(|t| t.src == st)
                    .count();
                expected_fresh += out_degree * (c.len() - 1);
            }
        }
        assert_eq!(
            conv.automaton.state_count(),
            plain.automaton.state_count() + expected_fresh
        );
    }
}
