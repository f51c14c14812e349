//! End-to-end decision procedures: emptiness of bounded-visit automata
//! through the crossing-section and length-formula pipeline, membership via
//! the configuration automaton, Boolean closures of deterministic automata,
//! and universality / inclusion / equivalence on top of them.

use crate::automaton::{
    AutomatonBuilder, Letter, Reading, Run, StateId, TwoWayParikhAutomaton, Word,
};
use crate::crossing::{self, CrossingError};
use crate::parikh::{self, ParikhError};
use crate::presburger::{
    decide_sentence, is_satisfiable, substitute_constants, Atom, Formula, LinearTerm,
};
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecideError {
    #[error("visit bound must be at least 1")]
    InvalidVisitBound,
    #[error("operation requires a deterministic automaton with at most one initial state")]
    NondeterministicInput,
    #[error("automata have different alphabets")]
    AlphabetMismatch,
    #[error("word contains symbol index {0} outside the alphabet")]
    ForeignSymbol(usize),
    #[error(transparent)]
    Crossing(#[from] CrossingError),
    #[error(transparent)]
    Parikh(#[from] ParikhError),
    #[error("internal: witness search did not terminate within the cap")]
    WitnessSearchFailed,
}

/// A non-emptiness certificate: the word, a full accepting run and its
/// value, all independently re-checked before being returned.
#[derive(Debug, Clone)]
pub struct Witness {
    pub word: Word,
    pub run: Run,
    pub value: Vec<BigInt>,
}

#[derive(Debug, Clone)]
pub struct EmptinessVerdict {
    pub empty: bool,
    pub witness: Option<Witness>,
}

/// The visit bound Prop-1-defaulted for deterministic automata: accepting
/// runs of a deterministic automaton never repeat a configuration, so they
/// are `|Q|`-visit. Nondeterministic automata need a caller-supplied bound.
pub fn default_visit_bound(aut: &TwoWayParikhAutomaton) -> Option<usize> {
    if is_fully_deterministic(aut) {
        Some(aut.state_count().max(1))
    } else {
        None
    }
}

/// Deterministic transition relation and at most one initial state, which is
/// what the sequential closure constructions need.
pub fn is_fully_deterministic(aut: &TwoWayParikhAutomaton) -> bool {
    aut.is_deterministic() && aut.initial_states().len() <= 1
}

/// Emptiness of a k-visit automaton: convert with the weight-preserving
/// crossing-section construction, build the length formula and decide its
/// satisfiability. With `extract_witness`, a shortest accepted word of the
/// converted automaton is realized by iterative deepening on the length,
/// mapped back through padding erasure and re-merged into a two-way run.
pub fn is_empty(
    aut: &TwoWayParikhAutomaton,
    k: usize,
    extract_witness: bool,
) -> Result<EmptinessVerdict, DecideError> {
    if k == 0 {
        return Err(DecideError::InvalidVisitBound);
    }
    let conv = crossing::to_one_way_emptiness(aut, k)?;
    let trimmed = parikh::trimmed(&conv.automaton);
    let phi = parikh::length_formula(&trimmed)?;
    let nonempty = is_satisfiable(&phi);
    if !nonempty {
        return Ok(EmptinessVerdict { empty: true, witness: None });
    }
    if !extract_witness {
        return Ok(EmptinessVerdict { empty: false, witness: None });
    }

    let pad = conv.pad.expect("emptiness conversion pads");
    const LENGTH_CAP: usize = 100_000;
    for len in 0..=LENGTH_CAP {
        if !is_satisfiable(&parikh::length_formula_at(&phi, len)) {
            continue;
        }
        let (padded_word, padded_run) = find_accepted_word(&conv.automaton, len)
            .ok_or(DecideError::WitnessSearchFailed)?;
        let word: Word = padded_word.iter().copied().filter(|&s| s != pad).collect();
        // reassemble the two-way run from the section states along the path
        let mut sections = Vec::new();
        for cfg in padded_run.configurations() {
            if let Some(section) = &conv.sections[cfg.state] {
                sections.push(section.clone());
            }
        }
        let run = crossing::merge(aut, &sections, &word)?;
        let value = run.value.clone();
        debug_assert_eq!(value, padded_run.value);
        // independent check of the constraint on the witness value
        let sentence = substitute_constants(aut.constraint(), &value)
            .expect("constraint arity was validated");
        if !decide_sentence(&sentence).unwrap_or(false) {
            return Err(DecideError::WitnessSearchFailed);
        }
        return Ok(EmptinessVerdict { empty: false, witness: Some(Witness { word, run, value }) });
    }
    Err(DecideError::WitnessSearchFailed)
}

/// Emptiness with an arbitrary classified constraint: the pipeline is the
/// same, the glued length formula stays in the constraint's class, and the
/// elimination-based satisfiability check does not care which class that is.
pub fn is_empty_generalized(
    aut: &TwoWayParikhAutomaton,
    k: usize,
    extract_witness: bool,
) -> Result<EmptinessVerdict, DecideError> {
    is_empty(aut, k, extract_witness)
}

/// Searches a one-way automaton for an accepted word of exactly the given
/// length, pruned by a can-reach-acceptance table.
fn find_accepted_word(aut: &TwoWayParikhAutomaton, len: usize) -> Option<(Word, Run)> {
    use crate::automaton::Configuration;
    let steps = len + 2;
    let n = aut.state_count();
    // reach[r][q]: a run suffix of exactly r transitions from q can accept,
    // reading End on the last transition and symbols before.
    let mut reach = vec![vec![false; n]; steps + 1];
    for q in 0..n {
        reach[0][q] = aut.accepting_states().contains(&q);
    }
    for r in 1..=steps {
        for t in aut.transitions() {
            let ok_letter = if r == 1 {
                t.letter == Letter::End
            } else if r == steps {
                t.letter == Letter::Begin
            } else {
                matches!(t.letter, Letter::Sym(_))
            };
            if ok_letter && reach[r - 1][t.dst] {
                reach[r][t.src] = true;
            }
        }
    }

    struct Search<'a> {
        aut: &'a TwoWayParikhAutomaton,
        steps: usize,
        reach: Vec<Vec<bool>>,
        word: Word,
        trace: Vec<(usize, Configuration)>,
        value: Vec<BigInt>,
    }
    impl<'a> Search<'a> {
        fn go(&mut self, q: StateId, depth: usize) -> bool {
            if depth == self.steps {
                return self.aut.accepting_states().contains(&q)
                    && crate::presburger::satisfied_by(self.aut.constraint(), &self.value)
                        .unwrap_or(false);
            }
            let remaining = self.steps - depth;
            let letters: Vec<Letter> = if depth == 0 {
                vec![Letter::Begin]
            } else if remaining == 1 {
                vec![Letter::End]
            } else {
                (0..self.aut.alphabet().len()).map(Letter::Sym).collect()
            };
            for letter in letters {
                for &t in self.aut.transitions_from(q, letter) {
                    let tr = &self.aut.transitions()[t];
                    if !self.reach[remaining - 1][tr.dst] {
                        continue;
                    }
                    if let Letter::Sym(s) = letter {
                        self.word.push(s);
                    }
                    for (acc, w) in self.value.iter_mut().zip(&tr.weight) {
                        *acc += w;
                    }
                    self.trace.push((t, Configuration { position: depth + 1, state: tr.dst }));
                    if self.go(tr.dst, depth + 1) {
                        return true;
                    }
                    self.trace.pop();
                    for (acc, w) in self.value.iter_mut().zip(&tr.weight) {
                        *acc -= w;
                    }
                    if matches!(letter, Letter::Sym(_)) {
                        self.word.pop();
                    }
                }
            }
            false
        }
    }

    for &q0 in aut.initial_states() {
        if !reach[steps][q0] {
            continue;
        }
        let mut s = Search {
            aut,
            steps,
            reach: reach.clone(),
            word: Vec::new(),
            trace: Vec::new(),
            value: vec![BigInt::zero(); aut.dimension()],
        };
        if s.go(q0, 0) {
            let start = Configuration { position: 0, state: q0 };
            let run = Run { word: s.word.clone(), start, steps: s.trace.clone(), value: s.value.clone() };
            return Some((s.word, run));
        }
    }
    None
}

/// Membership via the configuration automaton: states are (position, state)
/// pairs on the fixed word, which makes the automaton one-way, and emptiness
/// of that automaton is decided through the standard pipeline with k = 1.
pub fn membership(aut: &TwoWayParikhAutomaton, word: &[usize]) -> Result<bool, DecideError> {
    for &s in word {
        if s >= aut.alphabet().len() {
            return Err(DecideError::ForeignSymbol(s));
        }
    }
    let pw = configuration_automaton(aut, word);
    Ok(!is_empty(&pw, 1, false)?.empty)
}

/// The one-way automaton whose states encode configurations of `aut` on
/// `word`; its transitions replay the head moves, reading the consumed tape
/// letter as a content symbol, and carry the original weight vectors.
pub fn configuration_automaton(aut: &TwoWayParikhAutomaton, word: &[usize]) -> TwoWayParikhAutomaton {
    let n = word.len() + 2;
    let mut alphabet = aut.alphabet().to_vec();
    let fresh = |alphabet: &[String], base: &str| -> String {
        if !alphabet.iter().any(|s| s == base) {
            return base.to_string();
        }
        let mut i = 2usize;
        loop {
            let cand = format!("{base}{i}");
            if !alphabet.iter().any(|s| s == &cand) {
                return cand;
            }
            i += 1;
        }
    };
    let bgn = fresh(&alphabet, "bgn");
    alphabet.push(bgn);
    let fin = fresh(&alphabet, "fin");
    alphabet.push(fin);
    let bgn_idx = alphabet.len() - 2;
    let fin_idx = alphabet.len() - 1;
    let content = |l: Letter| -> usize {
        match l {
            Letter::Begin => bgn_idx,
            Letter::End => fin_idx,
            Letter::Sym(s) => s,
        }
    };
    let tape = |i: usize| -> Letter {
        if i == 0 {
            Letter::Begin
        } else if i == n - 1 {
            Letter::End
        } else {
            Letter::Sym(word[i - 1])
        }
    };

    let mut b = AutomatonBuilder::with_alphabet(alphabet, aut.dimension());
    // (position, state) grid plus a start and a final wrapper state
    let mut grid = vec![vec![0usize; aut.state_count()]; n + 1];
    for (pos, row) in grid.iter_mut().enumerate() {
        for (q, slot) in row.iter_mut().enumerate() {
            *slot = b.state(&format!("c{pos}.{}", aut.state_name(q)), Reading::Right);
        }
    }
    let s0 = b.state("start", Reading::Right);
    let f = b.state("final", Reading::Right);
    b.mark_initial(s0);
    b.mark_halting(f, true);
    for &q0 in aut.initial_states() {
        b.transition(s0, Letter::Begin, grid[0][q0], vec![BigInt::zero(); aut.dimension()]);
    }
    for t in aut.transitions() {
        match aut.reading(t.src) {
            Reading::Right => {
                for pos in 0..n {
                    if tape(pos) == t.letter {
                        b.transition(grid[pos][t.src], Letter::Sym(content(t.letter)), grid[pos + 1][t.dst], t.weight.clone());
                    }
                }
            }
            Reading::Left => {
                for pos in 1..=n {
                    if tape(pos - 1) == t.letter {
                        b.transition(grid[pos][t.src], Letter::Sym(content(t.letter)), grid[pos - 1][t.dst], t.weight.clone());
                    }
                }
            }
        }
    }
    for &qf in aut.accepting_states() {
        b.transition(grid[n][qf], Letter::End, f, vec![BigInt::zero(); aut.dimension()]);
    }
    b.constraint(aut.constraint().clone());
    b.build()
}

/// Renames the free variables `x1..xd` to `x{offset+1}..x{offset+d}`.
fn shift_constraint(psi: &Formula, offset: usize, d: usize) -> Formula {
    let mut out = psi.normalize_bound();
    if offset == 0 {
        return out;
    }
    for k in 1..=d {
        out = out.substitute(&format!("x{k}"), &LinearTerm::var(&format!("shift_{k}")));
    }
    for k in 1..=d {
        out = out.substitute(&format!("shift_{k}"), &LinearTerm::var(&format!("x{}", offset + k)));
    }
    out
}

fn zeros(d: usize) -> Vec<BigInt> {
    vec![BigInt::zero(); d]
}

/// Embeds `v` into dimension `total` starting at `offset`, with `extra`
/// added at the very last coordinate.
fn embed(v: &[BigInt], offset: usize, total: usize, last: i64) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); total];
    for (i, e) in v.iter().enumerate() {
        out[offset + i] = e.clone();
    }
    if last != 0 {
        let n = out.len();
        out[n - 1] += last;
    }
    out
}

/// Sequential intersection of two deterministic automata: run the first on
/// the leading dimensions, rewind on acceptance, run the second on the
/// trailing dimensions; the constraint is the conjunction. Rejecting or
/// looping behavior of the first machine rejects, which is correct for
/// intersection.
pub fn intersect(
    p1: &TwoWayParikhAutomaton,
    p2: &TwoWayParikhAutomaton,
) -> Result<TwoWayParikhAutomaton, DecideError> {
    if !is_fully_deterministic(p1) || !is_fully_deterministic(p2) {
        return Err(DecideError::NondeterministicInput);
    }
    if p1.alphabet() != p2.alphabet() {
        return Err(DecideError::AlphabetMismatch);
    }
    let d1 = p1.dimension();
    let d2 = p2.dimension();
    let d = d1 + d2;
    let mut b = AutomatonBuilder::with_alphabet(p1.alphabet().to_vec(), d);

    let map1: Vec<StateId> = (0..p1.state_count())
        .map(|q| b.state(&format!("a.{}", p1.state_name(q)), p1.reading(q)))
        .collect();
    let rew = b.state("rew", Reading::Left);
    let map2: Vec<StateId> = (0..p2.state_count())
        .map(|q| b.state(&format!("b.{}", p2.state_name(q)), p2.reading(q)))
        .collect();

    if let Some(&q0) = p1.initial_states().iter().next() {
        b.mark_initial(map1[q0]);
    }
    for &q in p1.halting_states() {
        if !p1.accepting_states().contains(&q) {
            b.mark_halting(map1[q], false);
        }
    }
    for t in p1.transitions() {
        let dst = if p1.accepting_states().contains(&t.dst) { rew } else { map1[t.dst] };
        b.transition(map1[t.src], t.letter, dst, embed(&t.weight, 0, d, 0));
    }
    for s in 0..p1.alphabet().len() {
        b.transition(rew, Letter::Sym(s), rew, zeros(d));
    }
    b.transition(rew, Letter::End, rew, zeros(d));
    if let Some(&q02) = p2.initial_states().iter().next() {
        b.transition(rew, Letter::Begin, map2[q02], zeros(d));
    }
    for &q in p2.halting_states() {
        b.mark_halting(map2[q], p2.accepting_states().contains(&q));
    }
    for t in p2.transitions() {
        b.transition(map2[t.src], t.letter, map2[t.dst], embed(&t.weight, d1, d, 0));
    }
    b.constraint(Formula::and(vec![
        shift_constraint(p1.constraint(), 0, d1),
        shift_constraint(p2.constraint(), d1, d2),
    ]));
    Ok(b.build())
}

/// Deterministic complete automaton classifying words by the subset-built
/// image of a one-way conversion; embedded inside the complement and union
/// machines so a phase always terminates with an FA-level verdict.
struct SubsetDfa {
    /// subsets of the converted automaton's states
    subsets: Vec<BTreeSet<StateId>>,
    /// total over Begin and the input symbols
    delta: HashMap<(usize, Letter), usize>,
    initial: usize,
    /// does reading the right endmarker from this subset reach the sentinel
    end_accepts: Vec<bool>,
}

fn subset_dfa(aut: &TwoWayParikhAutomaton) -> Result<SubsetDfa, DecideError> {
    // FA-level language only: drop weights and constraint
    let mut b = AutomatonBuilder::with_alphabet(aut.alphabet().to_vec(), 0);
    for q in 0..aut.state_count() {
        let id = b.state(aut.state_name(q), aut.reading(q));
        debug_assert_eq!(id, q);
        if aut.initial_states().contains(&q) {
            b.mark_initial(id);
        }
        if aut.halting_states().contains(&q) {
            b.mark_halting(id, aut.accepting_states().contains(&q));
        }
    }
    for t in aut.transitions() {
        b.transition(t.src, t.letter, t.dst, vec![]);
    }
    let fa = b.build();
    let conv = crossing::to_one_way(&fa, fa.state_count().max(1))?;
    let one = &conv.automaton;

    let mut subsets: Vec<BTreeSet<StateId>> = Vec::new();
    let mut index: BTreeMap<BTreeSet<StateId>, usize> = BTreeMap::new();
    let mut delta = HashMap::new();
    let mut queue = VecDeque::new();
    let init: BTreeSet<StateId> = one.initial_states().iter().copied().collect();
    index.insert(init.clone(), 0);
    subsets.push(init);
    queue.push_back(0usize);
    let mut letters: Vec<Letter> = vec![Letter::Begin];
    letters.extend((0..one.alphabet().len()).map(Letter::Sym));
    while let Some(i) = queue.pop_front() {
        for &letter in &letters {
            let mut next: BTreeSet<StateId> = BTreeSet::new();
            for &q in &subsets[i] {
                for &t in one.transitions_from(q, letter) {
                    next.insert(one.transitions()[t].dst);
                }
            }
            let j = match index.get(&next) {
                Some(&j) => j,
                None => {
                    let j = subsets.len();
                    index.insert(next.clone(), j);
                    subsets.push(next);
                    queue.push_back(j);
                    j
                }
            };
            delta.insert((i, letter), j);
        }
    }
    let end_accepts: Vec<bool> = subsets
        .iter()
        .map(|s| {
            s.iter().any(|&q| {
                one.transitions_from(q, Letter::End)
                    .iter()
                    .any(|&t| one.transitions()[t].dst == conv.top)
            })
        })
        .collect();
    Ok(SubsetDfa { subsets, delta, initial: 0, end_accepts })
}

/// Complement of a deterministic automaton. A deterministic always-halting
/// word classifier (the subset automaton of the one-way conversion of the
/// underlying FA, with complemented acceptance) runs first; words the FA
/// rejects are accepted outright through a flag dimension, words it accepts
/// are replayed on the original automaton against the negated constraint:
/// the constraint becomes `c = 1 \/ not psi`, flipping the class from
/// Sigma_i to Pi_i.
pub fn complement(p: &TwoWayParikhAutomaton) -> Result<TwoWayParikhAutomaton, DecideError> {
    if !is_fully_deterministic(p) {
        return Err(DecideError::NondeterministicInput);
    }
    let d = p.dimension();
    let total = d + 1;
    let dfa = subset_dfa(p)?;
    let mut b = AutomatonBuilder::with_alphabet(p.alphabet().to_vec(), total);

    let dstates: Vec<StateId> = (0..dfa.subsets.len()).map(|i| b.state(&format!("d{i}"), Reading::Right)).collect();
    let acc = b.state("caught", Reading::Right);
    let sw = b.state("replay", Reading::Left);
    let pmap: Vec<StateId> = (0..p.state_count())
        .map(|q| b.state(&format!("p.{}", p.state_name(q)), p.reading(q)))
        .collect();

    b.mark_initial(dstates[dfa.initial]);
    b.mark_halting(acc, true);

    for (&(i, letter), &j) in &dfa.delta {
        b.transition(dstates[i], letter, dstates[j], zeros(total));
    }
    for i in 0..dfa.subsets.len() {
        if dfa.end_accepts[i] {
            // the FA accepts: rewind and replay against the negated constraint
            b.transition(dstates[i], Letter::End, sw, zeros(total));
        } else {
            // the FA rejects: the word is in the complement
            b.transition(dstates[i], Letter::End, acc, embed(&[], 0, total, 1));
        }
    }
    for s in 0..p.alphabet().len() {
        b.transition(sw, Letter::Sym(s), sw, zeros(total));
    }
    b.transition(sw, Letter::End, sw, zeros(total));
    if let Some(&q0) = p.initial_states().iter().next() {
        b.transition(sw, Letter::Begin, pmap[q0], zeros(total));
    }
    for &q in p.halting_states() {
        b.mark_halting(pmap[q], p.accepting_states().contains(&q));
    }
    for t in p.transitions() {
        b.transition(pmap[t.src], t.letter, pmap[t.dst], embed(&t.weight, 0, total, 0));
    }

    let flag = Formula::Atom(Atom::Eq(
        LinearTerm::var(&format!("x{total}")).add_const(&BigInt::from(-1)),
    ));
    b.constraint(Formula::or(vec![flag, p.constraint().normalize_bound().negate()]));
    Ok(b.build())
}

/// Union of two deterministic automata by halting-first simulation: subset
/// classifiers decide each FA language so every phase terminates, the flag
/// dimension records which phases accepted (`+1` when the first automaton
/// accepts, `+2` when the second FA rejects and its phase is skipped), and
/// the constraint reads the flag to enable each disjunct.
pub fn union(
    p1: &TwoWayParikhAutomaton,
    p2: &TwoWayParikhAutomaton,
) -> Result<TwoWayParikhAutomaton, DecideError> {
    if !is_fully_deterministic(p1) || !is_fully_deterministic(p2) {
        return Err(DecideError::NondeterministicInput);
    }
    if p1.alphabet() != p2.alphabet() {
        return Err(DecideError::AlphabetMismatch);
    }
    let d1 = p1.dimension();
    let d2 = p2.dimension();
    let total = d1 + d2 + 1;
    let dfa1 = subset_dfa(p1)?;
    let dfa2 = subset_dfa(p2)?;
    let mut b = AutomatonBuilder::with_alphabet(p1.alphabet().to_vec(), total);

    let astates: Vec<StateId> = (0..dfa1.subsets.len()).map(|i| b.state(&format!("da{i}"), Reading::Right)).collect();
    let bstates: Vec<StateId> = (0..dfa2.subsets.len()).map(|i| b.state(&format!("db{i}"), Reading::Right)).collect();
    let sw1 = b.state("rew1", Reading::Left);
    let swb = b.state("rew2", Reading::Left);
    let swp2 = b.state("rew3", Reading::Left);
    let p1map: Vec<StateId> = (0..p1.state_count())
        .map(|q| b.state(&format!("a.{}", p1.state_name(q)), p1.reading(q)))
        .collect();
    let p2map: Vec<StateId> = (0..p2.state_count())
        .map(|q| b.state(&format!("b.{}", p2.state_name(q)), p2.reading(q)))
        .collect();
    let junk = b.state("skipped", Reading::Right);

    b.mark_initial(astates[dfa1.initial]);
    b.mark_halting(junk, true);

    // phase A: classify by the first FA
    for (&(i, letter), &j) in &dfa1.delta {
        b.transition(astates[i], letter, astates[j], zeros(total));
    }
    for i in 0..dfa1.subsets.len() {
        let target = if dfa1.end_accepts[i] { sw1 } else { swb };
        b.transition(astates[i], Letter::End, target, zeros(total));
    }
    // rewind into the real run of the first automaton
    for s in 0..p1.alphabet().len() {
        b.transition(sw1, Letter::Sym(s), sw1, zeros(total));
    }
    b.transition(sw1, Letter::End, sw1, zeros(total));
    if let Some(&q0) = p1.initial_states().iter().next() {
        b.transition(sw1, Letter::Begin, p1map[q0], zeros(total));
    }
    for &q in p1.halting_states() {
        if !p1.accepting_states().contains(&q) {
            b.mark_halting(p1map[q], false);
        }
    }
    for t in p1.transitions() {
        if p1.accepting_states().contains(&t.dst) {
            // record acceptance in the flag and continue with phase B
            b.transition(p1map[t.src], t.letter, swb, embed(&t.weight, 0, total, 1));
        } else {
            b.transition(p1map[t.src], t.letter, p1map[t.dst], embed(&t.weight, 0, total, 0));
        }
    }
    // rewind into phase B
    for s in 0..p1.alphabet().len() {
        b.transition(swb, Letter::Sym(s), swb, zeros(total));
    }
    b.transition(swb, Letter::End, swb, zeros(total));
    b.transition(swb, Letter::Begin, bstates[dfa2.initial], zeros(total));
    // phase B: classify by the second FA
    for (&(i, letter), &j) in &dfa2.delta {
        b.transition(bstates[i], letter, bstates[j], zeros(total));
    }
    for i in 0..dfa2.subsets.len() {
        if dfa2.end_accepts[i] {
            b.transition(bstates[i], Letter::End, swp2, zeros(total));
        } else {
            // second FA rejects: nothing to replay, flag the skip
            b.transition(bstates[i], Letter::End, junk, embed(&[], 0, total, 2));
        }
    }
    for s in 0..p1.alphabet().len() {
        b.transition(swp2, Letter::Sym(s), swp2, zeros(total));
    }
    b.transition(swp2, Letter::End, swp2, zeros(total));
    if let Some(&q0) = p2.initial_states().iter().next() {
        b.transition(swp2, Letter::Begin, p2map[q0], zeros(total));
    }
    for &q in p2.halting_states() {
        b.mark_halting(p2map[q], p2.accepting_states().contains(&q));
    }
    for t in p2.transitions() {
        b.transition(p2map[t.src], t.letter, p2map[t.dst], embed(&t.weight, d1, total, 0));
    }

    // c = 1 or 3: the first automaton's FA accepted; c = 0 or 1: the second
    // phase ran to completion.
    let c = || LinearTerm::var(&format!("x{total}"));
    let c_is = |n: i64| Formula::Atom(Atom::Eq(c().add_const(&BigInt::from(-n))));
    let psi1 = Formula::and(vec![
        Formula::or(vec![c_is(1), c_is(3)]),
        shift_constraint(p1.constraint(), 0, d1),
    ]);
    let psi2 = Formula::and(vec![
        Formula::or(vec![c_is(0), c_is(1)]),
        shift_constraint(p2.constraint(), d1, d2),
    ]);
    b.constraint(Formula::or(vec![psi1, psi2]));
    Ok(b.build())
}

/// `L(p1) is a subset of L(p2)` iff `L(p1) intersect complement(L(p2))` is
/// empty; the product is deterministic, so its state count is a sound visit
/// bound.
pub fn includes(
    p1: &TwoWayParikhAutomaton,
    p2: &TwoWayParikhAutomaton,
) -> Result<bool, DecideError> {
    let product = intersect(p1, &complement(p2)?)?;
    let k = product.state_count().max(1);
    Ok(is_empty_generalized(&product, k, false)?.empty)
}

/// Universality as emptiness of the complement.
pub fn is_universal(p: &TwoWayParikhAutomaton) -> Result<bool, DecideError> {
    let comp = complement(p)?;
    let k = comp.state_count().max(1);
    Ok(is_empty_generalized(&comp, k, false)?.empty)
}

pub fn equivalent(
    p1: &TwoWayParikhAutomaton,
    p2: &TwoWayParikhAutomaton,
) -> Result<bool, DecideError> {
    Ok(includes(p1, p2)? && includes(p2, p1)?)
}
