//! The two-way Parikh automaton model: states partitioned into right- and
//! left-reading, vector-weighted transitions over the input extended with
//! endmarkers, and a Presburger acceptance constraint over the accumulated
//! vector. This module also carries the brute-force simulation oracles that
//! every construction in the crate is tested against.

use crate::presburger::{satisfied_by, Formula};
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use thiserror::Error;

pub type StateId = usize;

/// Reading direction of a state: a right-reading state consumes the letter to
/// the right of the head and moves right, a left-reading state the dual.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reading {
    Right,
    Left,
}

/// A tape letter: one of the reserved endmarkers or an input symbol (an
/// index into the automaton's ordered alphabet).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Begin,
    End,
    Sym(usize),
}

/// Words are sequences of alphabet indices.
pub type Word = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub src: StateId,
    pub letter: Letter,
    pub dst: StateId,
    pub weight: Vec<BigInt>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("condition 1 violated: transition {transition} leaves halting state `{state}`")]
    HaltingHasOutgoing { state: String, transition: String },
    #[error("condition 2 violated: transition {transition} moves the head past an endmarker")]
    EndmarkerEscape { transition: String },
    #[error("condition 3 violated: transition {transition} enters a halting state without reading the right endmarker from a right-reading state")]
    BadHaltingEntry { transition: String },
    #[error("partition violated: initial state `{state}` is not right-reading")]
    InitialNotRightReading { state: String },
    #[error("partition violated: accepting state `{state}` is not halting")]
    AcceptingNotHalting { state: String },
    #[error("weight vector of transition {transition} has {got} entries, expected {want}")]
    WeightArity { transition: String, got: usize, want: usize },
    #[error("constraint mentions `{var}`, outside the free variables x1..x{dimension}")]
    ConstraintArity { var: String, dimension: usize },
    #[error("duplicate transition {transition}")]
    DuplicateTransition { transition: String },
    #[error("head position {position} is outside 0..={max}")]
    PositionOutOfRange { position: usize, max: usize },
    #[error("symbol `{symbol}` is not in the alphabet")]
    ForeignSymbol { symbol: String },
    #[error("word is not a single token sequence over the alphabet: `{text}`")]
    UnparsableWord { text: String },
}

/// Head position and control state. The position counts the letters of the
/// endmarked tape to the left of the head, so it ranges over `0..=|w|+2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pub position: usize,
    pub state: StateId,
}

/// A finished run: start configuration, the transitions taken with the
/// configurations they lead to, and the componentwise sum of the weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    pub word: Word,
    pub start: Configuration,
    pub steps: Vec<(usize, Configuration)>,
    pub value: Vec<BigInt>,
}

impl Run {
    /// All configurations visited, in order (start included).
    pub fn configurations(&self) -> Vec<Configuration> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        out.push(self.start);
        out.extend(self.steps.iter().map(|(_, c)| *c));
        out
    }

    pub fn last_configuration(&self) -> Configuration {
        self.steps.last().map(|(_, c)| *c).unwrap_or(self.start)
    }

    pub fn transition_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.steps.iter().map(|(t, _)| *t)
    }

    /// Maximum number of configurations sharing one head position.
    pub fn max_visits(&self) -> usize {
        max_visits(&self.configurations())
    }
}

/// Maximum, over head positions, of the number of configurations at that
/// position; 0 for an empty sequence.
pub fn max_visits(configs: &[Configuration]) -> usize {
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for c in configs {
        *counts.entry(c.position).or_insert(0) += 1;
    }
    counts.values().copied().max().unwrap_or(0)
}

pub enum OracleVerdict {
    Accepted,
    Rejected,
    BoundExhausted,
}

#[derive(Debug, Clone)]
pub enum KVisitOutcome {
    Consistent,
    Counterexample(Run),
}

#[derive(Debug, Clone)]
pub struct TwoWayParikhAutomaton {
    alphabet: Vec<String>,
    symbol_index: HashMap<String, usize>,
    dimension: usize,
    state_names: Vec<String>,
    reading: Vec<Reading>,
    initial: BTreeSet<StateId>,
    halting: BTreeSet<StateId>,
    accepting: BTreeSet<StateId>,
    transitions: Vec<Transition>,
    by_source: HashMap<(StateId, Letter), Vec<usize>>,
    constraint: Formula,
}

impl PartialEq for TwoWayParikhAutomaton {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet
            && self.dimension == other.dimension
            && self.state_names == other.state_names
            && self.reading == other.reading
            && self.initial == other.initial
            && self.halting == other.halting
            && self.accepting == other.accepting
            && self.transitions == other.transitions
            && self.constraint == other.constraint
    }
}

impl Eq for TwoWayParikhAutomaton {}

/// Incremental construction; `build` indexes the transitions but leaves all
/// structural checks to [`TwoWayParikhAutomaton::validate`].
#[derive(Debug, Clone)]
pub struct AutomatonBuilder {
    alphabet: Vec<String>,
    dimension: usize,
    state_names: Vec<String>,
    reading: Vec<Reading>,
    initial: BTreeSet<StateId>,
    halting: BTreeSet<StateId>,
    accepting: BTreeSet<StateId>,
    transitions: Vec<Transition>,
    constraint: Formula,
}

impl AutomatonBuilder {
    pub fn new(alphabet: &[&str], dimension: usize) -> Self {
        Self::with_alphabet(alphabet.iter().map(|s| s.to_string()).collect(), dimension)
    }

    pub fn with_alphabet(alphabet: Vec<String>, dimension: usize) -> Self {
        AutomatonBuilder {
            alphabet,
            dimension,
            state_names: Vec::new(),
            reading: Vec::new(),
            initial: BTreeSet::new(),
            halting: BTreeSet::new(),
            accepting: BTreeSet::new(),
            transitions: Vec::new(),
            constraint: Formula::True,
        }
    }

    pub fn state(&mut self, name: &str, reading: Reading) -> StateId {
        self.state_names.push(name.to_string());
        self.reading.push(reading);
        self.state_names.len() - 1
    }

    pub fn mark_initial(&mut self, s: StateId) -> &mut Self {
        self.initial.insert(s);
        self
    }

    /// Marks a halting state; pass `accepting` for a final state (accepting
    /// states are halting by definition).
    pub fn mark_halting(&mut self, s: StateId, accepting: bool) -> &mut Self {
        self.halting.insert(s);
        if accepting {
            self.accepting.insert(s);
        }
        self
    }

    pub(crate) fn mark_accepting_only(&mut self, s: StateId) -> &mut Self {
        self.accepting.insert(s);
        self
    }

    pub fn transition(&mut self, src: StateId, letter: Letter, dst: StateId, weight: Vec<BigInt>) -> &mut Self {
        self.transitions.push(Transition { src, letter, dst, weight });
        self
    }

    pub fn constraint(&mut self, f: Formula) -> &mut Self {
        self.constraint = f;
        self
    }

    pub fn symbol(&self, name: &str) -> Option<usize> {
        self.alphabet.iter().position(|s| s == name)
    }

    pub fn build(self) -> TwoWayParikhAutomaton {
        let mut by_source: HashMap<(StateId, Letter), Vec<usize>> = HashMap::new();
        for (i, t) in self.transitions.iter().enumerate() {
            by_source.entry((t.src, t.letter)).or_default().push(i);
        }
        let symbol_index = self
            .alphabet
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        TwoWayParikhAutomaton {
            alphabet: self.alphabet,
            symbol_index,
            dimension: self.dimension,
            state_names: self.state_names,
            reading: self.reading,
            initial: self.initial,
            halting: self.halting,
            accepting: self.accepting,
            transitions: self.transitions,
            by_source,
            constraint: self.constraint,
        }
    }
}

/// Convenience for fixed-size weight vectors in tests and generators.
pub fn wvec(entries: &[i64]) -> Vec<BigInt> {
    entries.iter().map(|&n| BigInt::from(n)).collect()
}

impl TwoWayParikhAutomaton {
    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn state_count(&self) -> usize {
        self.state_names.len()
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.state_names[s]
    }

    pub fn reading(&self, s: StateId) -> Reading {
        self.reading[s]
    }

    pub fn initial_states(&self) -> &BTreeSet<StateId> {
        &self.initial
    }

    pub fn halting_states(&self) -> &BTreeSet<StateId> {
        &self.halting
    }

    pub fn accepting_states(&self) -> &BTreeSet<StateId> {
        &self.accepting
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn constraint(&self) -> &Formula {
        &self.constraint
    }

    pub fn is_one_way(&self) -> bool {
        self.reading.iter().all(|r| *r == Reading::Right)
    }

    /// Distinct weight vectors, sorted; the range of the weighting function.
    pub fn weight_range(&self) -> Vec<Vec<BigInt>> {
        let mut out: BTreeSet<Vec<BigInt>> = BTreeSet::new();
        for t in &self.transitions {
            out.insert(t.weight.clone());
        }
        out.into_iter().collect()
    }

    /// Largest absolute entry over all weight vectors.
    pub fn max_weight_entry(&self) -> BigInt {
        let mut mu = BigInt::zero();
        for t in &self.transitions {
            for e in &t.weight {
                let a = e.magnitude();
                if a > mu.magnitude() {
                    mu = BigInt::from(a.clone());
                }
            }
        }
        mu
    }

    pub fn letter_name(&self, l: Letter) -> String {
        match l {
            Letter::Begin => "BEGIN".to_string(),
            Letter::End => "END".to_string(),
            Letter::Sym(i) => self.alphabet[i].clone(),
        }
    }

    pub fn fmt_transition(&self, idx: usize) -> String {
        let t = &self.transitions[idx];
        format!(
            "({}, {}, {})",
            self.state_names[t.src],
            self.letter_name(t.letter),
            self.state_names[t.dst]
        )
    }

    pub fn symbol(&self, name: &str) -> Option<usize> {
        self.symbol_index.get(name).copied()
    }

    /// Indices of the transitions leaving `state` on `letter`.
    pub fn transitions_from(&self, state: StateId, letter: Letter) -> &[usize] {
        self.by_source
            .get(&(state, letter))
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }

    /// Parses a word: per character when every alphabet symbol is a single
    /// character, whitespace-separated tokens otherwise. The empty string is
    /// the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word, AutomatonError> {
        if text.is_empty() {
            return Ok(Vec::new());
        }
        if self.alphabet.iter().all(|s| s.chars().count() == 1) && !text.contains(char::is_whitespace) {
            text.chars()
                .map(|c| {
                    self.symbol(&c.to_string())
                        .ok_or(AutomatonError::ForeignSymbol { symbol: c.to_string() })
                })
                .collect()
        } else {
            text.split_whitespace()
                .map(|tok| {
                    self.symbol(tok)
                        .ok_or(AutomatonError::ForeignSymbol { symbol: tok.to_string() })
                })
                .collect()
        }
    }

    pub fn format_word(&self, word: &[usize]) -> String {
        if self.alphabet.iter().all(|s| s.chars().count() == 1) {
            word.iter().map(|&i| self.alphabet[i].as_str()).collect()
        } else {
            word.iter().map(|&i| self.alphabet[i].as_str()).collect::<Vec<_>>().join(" ")
        }
    }

    fn tape_len(&self, word: &[usize]) -> usize {
        word.len() + 2
    }

    fn tape_letter(&self, word: &[usize], index: usize) -> Letter {
        if index == 0 {
            Letter::Begin
        } else if index == word.len() + 1 {
            Letter::End
        } else {
            Letter::Sym(word[index - 1])
        }
    }

    /// Checks the structural conditions: no transition leaves a halting
    /// state, the head cannot run past an endmarker, halting states are
    /// entered only by reading the right endmarker rightward, the initial
    /// states read right, accepting states halt, weight vectors have the
    /// declared dimension and the constraint is over `x1..xd`.
    pub fn validate(&self) -> Result<(), AutomatonError> {
        let mut seen: HashSet<(StateId, Letter, StateId)> = HashSet::new();
        for (i, t) in self.transitions.iter().enumerate() {
            if !seen.insert((t.src, t.letter, t.dst)) {
                return Err(AutomatonError::DuplicateTransition { transition: self.fmt_transition(i) });
            }
            if self.halting.contains(&t.src) {
                return Err(AutomatonError::HaltingHasOutgoing {
                    state: self.state_names[t.src].clone(),
                    transition: self.fmt_transition(i),
                });
            }
            match t.letter {
                Letter::Begin => {
                    if self.reading[t.src] == Reading::Left && self.reading[t.dst] == Reading::Left {
                        return Err(AutomatonError::EndmarkerEscape { transition: self.fmt_transition(i) });
                    }
                }
                Letter::End => {
                    if self.reading[t.src] == Reading::Right
                        && self.reading[t.dst] == Reading::Right
                        && !self.accepting.contains(&t.dst)
                    {
                        return Err(AutomatonError::EndmarkerEscape { transition: self.fmt_transition(i) });
                    }
                }
                Letter::Sym(_) => {}
            }
            if self.halting.contains(&t.dst)
                && (self.reading[t.src] != Reading::Right || t.letter != Letter::End)
            {
                return Err(AutomatonError::BadHaltingEntry { transition: self.fmt_transition(i) });
            }
            if t.weight.len() != self.dimension {
                return Err(AutomatonError::WeightArity {
                    transition: self.fmt_transition(i),
                    got: t.weight.len(),
                    want: self.dimension,
                });
            }
        }
        for &s in &self.initial {
            if self.reading[s] != Reading::Right {
                return Err(AutomatonError::InitialNotRightReading { state: self.state_names[s].clone() });
            }
        }
        for &s in &self.accepting {
            if !self.halting.contains(&s) {
                return Err(AutomatonError::AcceptingNotHalting { state: self.state_names[s].clone() });
            }
        }
        let allowed: BTreeSet<String> = (1..=self.dimension).map(|i| format!("x{i}")).collect();
        for v in self.constraint.free_vars() {
            if !allowed.contains(&v) {
                return Err(AutomatonError::ConstraintArity { var: v, dimension: self.dimension });
            }
        }
        Ok(())
    }

    /// True iff no (state, letter) pair has two outgoing transitions.
    pub fn is_deterministic(&self) -> bool {
        self.by_source.values().all(|v| {
            v.len() <= 1 || {
                // duplicate (p,a) entries may still share the target
                let first = self.transitions[v[0]].dst;
                v.iter().all(|&i| self.transitions[i].dst == first)
            }
        })
    }

    /// One-step successors of a configuration: all transitions permitted by
    /// the transition relation and the head-movement rule. Empty for halting
    /// states and stuck configurations.
    pub fn step(&self, word: &[usize], c: Configuration) -> Result<Vec<(usize, Configuration)>, AutomatonError> {
        let n = self.tape_len(word);
        if c.position > n {
            return Err(AutomatonError::PositionOutOfRange { position: c.position, max: n });
        }
        if self.halting.contains(&c.state) {
            return Ok(Vec::new());
        }
        let (letter_index, next_pos) = match self.reading[c.state] {
            Reading::Right => {
                if c.position >= n {
                    return Ok(Vec::new());
                }
                (c.position, c.position + 1)
            }
            Reading::Left => {
                if c.position == 0 {
                    return Ok(Vec::new());
                }
                (c.position - 1, c.position - 1)
            }
        };
        let letter = self.tape_letter(word, letter_index);
        let mut out = Vec::new();
        if let Some(ts) = self.by_source.get(&(c.state, letter)) {
            for &t in ts {
                out.push((t, Configuration { position: next_pos, state: self.transitions[t].dst }));
            }
        }
        Ok(out)
    }

    /// Replays a run through `step`, checking every transition is permitted
    /// and the value is the weight sum.
    pub fn replay(&self, run: &Run) -> Result<(), String> {
        let mut cfg = run.start;
        let mut value = vec![BigInt::zero(); self.dimension];
        for &(t, next) in &run.steps {
            let succ = self.step(&run.word, cfg).map_err(|e| e.to_string())?;
            if !succ.contains(&(t, next)) {
                return Err(format!(
                    "transition {} not enabled at position {} state {}",
                    self.fmt_transition(t),
                    cfg.position,
                    self.state_names[cfg.state]
                ));
            }
            for (acc, w) in value.iter_mut().zip(&self.transitions[t].weight) {
                *acc += w;
            }
            cfg = next;
        }
        if value != run.value {
            return Err("run value does not match the weight sum".to_string());
        }
        Ok(())
    }

    fn is_final(&self, word: &[usize], c: Configuration) -> bool {
        self.accepting.contains(&c.state) && c.position == self.tape_len(word)
    }

    /// Brute-force acceptance. Deterministic automata are simulated exactly
    /// with configuration-repetition loop detection, so the bound is
    /// irrelevant for them; nondeterministic enumeration is depth-bounded and
    /// prunes configuration cycles with zero net weight.
    pub fn accepts_oracle(&self, word: &[usize], step_bound: usize) -> OracleVerdict {
        if self.is_deterministic() {
            for &q0 in &self.initial {
                let mut cfg = Configuration { position: 0, state: q0 };
                let mut value = vec![BigInt::zero(); self.dimension];
                let mut visited: HashSet<Configuration> = HashSet::new();
                visited.insert(cfg);
                loop {
                    if self.halting.contains(&cfg.state) {
                        if self.is_final(word, cfg) && satisfied_by(&self.constraint, &value).unwrap_or(false)
                        {
                            return OracleVerdict::Accepted;
                        }
                        break;
                    }
                    let succ = self.step(word, cfg).expect("position in range");
                    match succ.first() {
                        None => break,
                        Some(&(t, next)) => {
                            if !visited.insert(next) {
                                break;
                            }
                            for (acc, w) in value.iter_mut().zip(&self.transitions[t].weight) {
                                *acc += w;
                            }
                            cfg = next;
                        }
                    }
                }
            }
            return OracleVerdict::Rejected;
        }

        let mut accepted = false;
        let mut bound_hit = false;
        self.for_each_accepting_run(word, step_bound, &mut bound_hit, &mut |run| {
            if satisfied_by(&self.constraint, &run.value).unwrap_or(false) {
                accepted = true;
                true
            } else {
                false
            }
        });
        if accepted {
            OracleVerdict::Accepted
        } else if bound_hit {
            OracleVerdict::BoundExhausted
        } else {
            OracleVerdict::Rejected
        }
    }

    /// Every run halting in an accepting state within the step bound, in
    /// depth-first transition order. The acceptance constraint is not
    /// applied; runs revisiting a configuration with an unchanged accumulated
    /// vector are pruned.
    pub fn accepting_runs(&self, word: &[usize], step_bound: usize) -> Vec<Run> {
        let mut out = Vec::new();
        let mut bound_hit = false;
        self.for_each_accepting_run(word, step_bound, &mut bound_hit, &mut |run| {
            out.push(run.clone());
            false
        });
        out
    }

    fn for_each_accepting_run(
        &self,
        word: &[usize],
        step_bound: usize,
        bound_hit: &mut bool,
        visit: &mut dyn FnMut(&Run) -> bool,
    ) {
        struct Dfs<'a> {
            aut: &'a TwoWayParikhAutomaton,
            word: &'a [usize],
            bound: usize,
            steps: Vec<(usize, Configuration)>,
            value: Vec<BigInt>,
            on_path: HashMap<Configuration, Vec<Vec<BigInt>>>,
            bound_hit: bool,
            stop: bool,
        }
        impl<'a> Dfs<'a> {
            fn go(&mut self, start: Configuration, cfg: Configuration, visit: &mut dyn FnMut(&Run) -> bool) {
                if self.stop {
                    return;
                }
                if self.aut.is_final(self.word, cfg) {
                    let run = Run {
                        word: self.word.to_vec(),
                        start,
                        steps: self.steps.clone(),
                        value: self.value.clone(),
                    };
                    if visit(&run) {
                        self.stop = true;
                    }
                    return;
                }
                if self.aut.halting.contains(&cfg.state) {
                    return;
                }
                let succ = self.aut.step(self.word, cfg).expect("position in range");
                if self.steps.len() == self.bound {
                    if !succ.is_empty() {
                        self.bound_hit = true;
                    }
                    return;
                }
                for (t, next) in succ {
                    for (acc, w) in self.value.iter_mut().zip(&self.aut.transitions[t].weight) {
                        *acc += w;
                    }
                    let seen = self.on_path.entry(next).or_default();
                    if seen.contains(&self.value) {
                        // pure configuration cycle with zero net vector
                        for (acc, w) in self.value.iter_mut().zip(&self.aut.transitions[t].weight) {
                            *acc -= w;
                        }
                        continue;
                    }
                    seen.push(self.value.clone());
                    self.steps.push((t, next));
                    self.go(start, next, visit);
                    self.steps.pop();
                    self.on_path.get_mut(&next).unwrap().pop();
                    for (acc, w) in self.value.iter_mut().zip(&self.aut.transitions[t].weight) {
                        *acc -= w;
                    }
                    if self.stop {
                        return;
                    }
                }
            }
        }

        for &q0 in &self.initial {
            let start = Configuration { position: 0, state: q0 };
            let mut dfs = Dfs {
                aut: self,
                word,
                bound: step_bound,
                steps: Vec::new(),
                value: vec![BigInt::zero(); self.dimension],
                on_path: HashMap::new(),
                bound_hit: false,
                stop: false,
            };
            dfs.on_path.insert(start, vec![dfs.value.clone()]);
            dfs.go(start, start, visit);
            *bound_hit |= dfs.bound_hit;
            if dfs.stop {
                return;
            }
        }
    }

    /// All words of length at most `max_len` accepted within the step bound,
    /// in length-then-lexicographic order.
    pub fn language_sample(&self, max_len: usize, step_bound: usize) -> BTreeSet<Word> {
        let mut out = BTreeSet::new();
        for word in words_up_to(self.alphabet.len(), max_len) {
            if matches!(self.accepts_oracle(&word, step_bound), OracleVerdict::Accepted) {
                out.insert(word);
            }
        }
        out
    }

    /// Bounded search for an accepting run visiting some position more than
    /// `k` times. `Consistent` means none was found within the bounds, not a
    /// proof of k-visitness.
    pub fn check_k_visit(&self, k: usize, max_len: usize, step_bound: usize) -> KVisitOutcome {
        for word in words_up_to(self.alphabet.len(), max_len) {
            let mut found: Option<Run> = None;
            let mut bound_hit = false;
            self.for_each_accepting_run(&word, step_bound, &mut bound_hit, &mut |run| {
                if run.max_visits() > k {
                    found = Some(run.clone());
                    true
                } else {
                    false
                }
            });
            if let Some(run) = found {
                return KVisitOutcome::Counterexample(run);
            }
        }
        KVisitOutcome::Consistent
    }
}

/// Words over an alphabet of the given size, shortest first, lexicographic
/// within a length.
pub fn words_up_to(alphabet_size: usize, max_len: usize) -> impl Iterator<Item = Word> {
    let mut words: Vec<Word> = vec![Vec::new()];
    let mut frontier: Vec<Word> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for s in 0..alphabet_size {
                let mut w2 = w.clone();
                w2.push(s);
                next.push(w2);
            }
        }
        words.extend(next.iter().cloned());
        frontier = next;
    }
    words.into_iter()
}

impl fmt::Display for TwoWayParikhAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::format::print_automaton(self))
    }
}

/// Canonical 3-visit deterministic sweeper over `{a, b}`: the first pass adds
/// `(1,0)` per `a`, the second pass returns to the left end, the third adds
/// `(0,1)` per `b` and halts; the constraint asks for equal counts. Used as a
/// fixture throughout the crate's tests.
pub fn sweep() -> TwoWayParikhAutomaton {
    use Letter::{Begin, End, Sym};
    let mut b = AutomatonBuilder::new(&["a", "b"], 2);
    let s1 = b.state("s1", Reading::Right);
    let s2 = b.state("s2", Reading::Left);
    let s3 = b.state("s3", Reading::Right);
    let qf = b.state("qf", Reading::Right);
    b.mark_initial(s1);
    b.mark_halting(qf, true);
    let a = Sym(0);
    let bb = Sym(1);
    b.transition(s1, Begin, s1, wvec(&[0, 0]));
    b.transition(s1, a, s1, wvec(&[1, 0]));
    b.transition(s1, bb, s1, wvec(&[0, 0]));
    b.transition(s1, End, s2, wvec(&[0, 0]));
    b.transition(s2, End, s2, wvec(&[0, 0]));
    b.transition(s2, a, s2, wvec(&[0, 0]));
    b.transition(s2, bb, s2, wvec(&[0, 0]));
    b.transition(s2, Begin, s3, wvec(&[0, 0]));
    b.transition(s3, Begin, s3, wvec(&[0, 0]));
    b.transition(s3, a, s3, wvec(&[0, 0]));
    b.transition(s3, bb, s3, wvec(&[0, 1]));
    b.transition(s3, End, qf, wvec(&[0, 0]));
    b.constraint(crate::presburger::parse_formula("x1 = x2").unwrap());
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_is_valid_and_deterministic() {
        let s = sweep();
        s.validate().unwrap();
        assert!(s.is_deterministic());
        assert!(!s.is_one_way());
    }

    #[test]
    fn sweep_language_up_to_two() {
        let s = sweep();
        let sample = s.language_sample(2, 50);
        let words: Vec<String> = sample.iter().map(|w| s.format_word(w)).collect();
        assert_eq!(words, vec!["", "ab", "ba"]);
    }

    #[test]
    fn sweep_is_three_visit() {
        let s = sweep();
        assert!(matches!(s.check_k_visit(3, 4, 60), KVisitOutcome::Consistent));
        // and not 2-visit
        assert!(matches!(s.check_k_visit(2, 2, 60), KVisitOutcome::Counterexample(_)));
    }

    #[test]
    fn one_way_runs_visit_once() {
        let mut b = AutomatonBuilder::new(&["a"], 0);
        let q0 = b.state("q0", Reading::Right);
        let q1 = b.state("q1", Reading::Right);
        let qf = b.state("qf", Reading::Right);
        b.mark_initial(q0);
        b.mark_halting(qf, true);
        b.transition(q0, Letter::Begin, q1, vec![]);
        b.transition(q1, Letter::Sym(0), q1, vec![]);
        b.transition(q1, Letter::End, qf, vec![]);
        let a = b.build();
        a.validate().unwrap();
        let word = a.parse_word("aaa").unwrap();
        let runs = a.accepting_runs(&word, 20);
        assert_eq!(runs.len(), 1);
        assert_eq!(runs[0].max_visits(), 1);
        assert!(matches!(a.check_k_visit(1, 3, 20), KVisitOutcome::Consistent));
        a.replay(&runs[0]).unwrap();
    }

    #[test]
    fn empty_configuration_sequence_has_no_visits() {
        assert_eq!(max_visits(&[]), 0);
    }

    #[test]
    fn validate_rejects_condition_violations() {
        // transition out of a halting state
        let mut b = AutomatonBuilder::new(&["a"], 0);
        let q = b.state("q", Reading::Right);
        let h = b.state("h", Reading::Right);
        b.mark_initial(q);
        b.mark_halting(h, true);
        b.transition(q, Letter::End, h, vec![]);
        b.transition(h, Letter::Sym(0), q, vec![]);
        let a = b.build();
        assert!(matches!(a.validate(), Err(AutomatonError::HaltingHasOutgoing { .. })));

        // initial state that reads left
        let mut b = AutomatonBuilder::new(&["a"], 0);
        let q = b.state("q", Reading::Left);
        b.mark_initial(q);
        let a = b.build();
        assert!(matches!(a.validate(), Err(AutomatonError::InitialNotRightReading { .. })));

        // halting state entered on an inner letter
        let mut b = AutomatonBuilder::new(&["a"], 0);
        let q = b.state("q", Reading::Right);
        let h = b.state("h", Reading::Right);
        b.mark_initial(q);
        b.mark_halting(h, true);
        b.transition(q, Letter::Sym(0), h, vec![]);
        let a = b.build();
        assert!(matches!(a.validate(), Err(AutomatonError::BadHaltingEntry { .. })));

        // wrong weight arity
        let mut b = AutomatonBuilder::new(&["a"], 2);
        let q = b.state("q", Reading::Right);
        let h = b.state("h", Reading::Right);
        b.mark_initial(q);
        b.mark_halting(h, true);
        b.transition(q, Letter::End, h, wvec(&[1]));
        let a = b.build();
        assert!(matches!(a.validate(), Err(AutomatonError::WeightArity { .. })));

        // constraint over a foreign variable
        let mut b = AutomatonBuilder::new(&["a"], 1);
        let q = b.state("q", Reading::Right);
        b.mark_initial(q);
        b.constraint(crate::presburger::parse_formula("x2 <= 0").unwrap());
        let a = b.build();
        assert!(matches!(a.validate(), Err(AutomatonError::ConstraintArity { .. })));
    }

    #[test]
    fn step_respects_halting_and_determinism() {
        let s = sweep();
        let word = s.parse_word("ab").unwrap();
        // halting configuration has no successors
        let qf = 3;
        let succ = s.step(&word, Configuration { position: 4, state: qf }).unwrap();
        assert!(succ.is_empty());
        // deterministic automaton: at most one successor anywhere
        for pos in 0..=4 {
            for st in 0..4 {
                let succ = s.step(&word, Configuration { position: pos, state: st }).unwrap();
                assert!(succ.len() <= 1);
            }
        }
        // out of range
        assert!(s.step(&word, Configuration { position: 9, state: 0 }).is_err());
    }

    #[test]
    fn value_is_order_invariant() {
        let s = sweep();
        let word = s.parse_word("ab").unwrap();
        let runs = s.accepting_runs(&word, 60);
        assert_eq!(runs.len(), 1);
        let run = &runs[0];
        let mut weights: Vec<Vec<BigInt>> = run
            .transition_indices()
            .map(|t| s.transitions()[t].weight.clone())
            .collect();
        weights.reverse();
        let mut sum = vec![BigInt::zero(); 2];
        for w in &weights {
            for (acc, e) in sum.iter_mut().zip(w) {
                *acc += e;
            }
        }
        assert_eq!(sum, run.value);
    }

    #[test]
    fn dimension_zero_true_constraint_is_plain_acceptance() {
        // an automaton for a* with no counters accepts like a 2FA
        let mut b = AutomatonBuilder::new(&["a", "b"], 0);
        let q0 = b.state("q0", Reading::Right);
        let q1 = b.state("q1", Reading::Right);
        let qf = b.state("qf", Reading::Right);
        b.mark_initial(q0);
        b.mark_halting(qf, true);
        b.transition(q0, Letter::Begin, q1, vec![]);
        b.transition(q1, Letter::Sym(0), q1, vec![]);
        b.transition(q1, Letter::End, qf, vec![]);
        let a = b.build();
        a.validate().unwrap();
        let sample = a.language_sample(3, 30);
        let words: Vec<String> = sample.iter().map(|w| a.format_word(w)).collect();
        assert_eq!(words, vec!["", "a", "aa", "aaa"]);
    }
}
