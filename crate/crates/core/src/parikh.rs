//! Parikh images of one-way automata as existential formulas, and the
//! length-parameterized non-emptiness formula.
//!
//! The Parikh image is characterized by transition flows: one occurrence
//! variable per transition, Kirchhoff balance at every state with one unit
//! injected at a chosen initial state and absorbed at a chosen accepting
//! state, and connectivity of the flow support witnessed by distance
//! variables. This yields a linear-size existential formula; the exponential
//! base/period representation is never materialized.

use crate::automaton::{Letter, StateId, TwoWayParikhAutomaton};
use crate::presburger::{Atom, Formula, LinearTerm};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParikhError {
    #[error("the automaton is not one-way (it has left-reading states)")]
    NotOneWay,
}

/// Per-letter occurrence counts of a word, in alphabet order.
pub fn parikh_vector(word: &[usize], alphabet_size: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); alphabet_size];
    for &s in word {
        v[s] += 1;
    }
    v
}

/// The ordered list of distinct weight vectors of a one-way automaton, used
/// as the alphabet of the vector-relabeled view.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorAlphabetView {
    pub vectors: Vec<Vec<BigInt>>,
}

impl VectorAlphabetView {
    pub fn of(aut: &TwoWayParikhAutomaton) -> Self {
        VectorAlphabetView { vectors: aut.weight_range() }
    }

    pub fn index_of(&self, v: &[BigInt]) -> Option<usize> {
        self.vectors.iter().position(|u| u == v)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// A run skeleton for the flow encoding: edges may carry a counted letter
/// class (an index below `gamma`) or count toward no class.
struct FlowNfa {
    states: usize,
    edges: Vec<(usize, Option<usize>, usize)>,
    initials: Vec<usize>,
    finals: Vec<usize>,
}

/// Existential formula over `x1..x{gamma}` whose models are exactly the
/// class-count vectors of accepted paths.
fn flow_formula(nfa: &FlowNfa, gamma: usize) -> Formula {
    if nfa.initials.is_empty() || nfa.finals.is_empty() {
        return Formula::False;
    }
    let y = |e: usize| format!("y_{e}");
    let z = |q: usize| format!("z_{q}");
    let iv = |q: usize| format!("i_{q}");
    let fv = |q: usize| format!("f_{q}");
    let nonneg = |name: &str| Formula::Atom(Atom::Le(LinearTerm::var(name).scale(&BigInt::from(-1))));
    let at_most_one = |name: &str| Formula::Atom(Atom::Le(LinearTerm::var(name).add_const(&BigInt::from(-1))));

    let mut conj: Vec<Formula> = Vec::new();
    let mut bound: Vec<String> = Vec::new();

    for e in 0..nfa.edges.len() {
        conj.push(nonneg(&y(e)));
        bound.push(y(e));
    }
    let mut init_sum = LinearTerm::constant(BigInt::from(-1));
    for &q in &nfa.initials {
        conj.push(nonneg(&iv(q)));
        conj.push(at_most_one(&iv(q)));
        init_sum = init_sum.add(&LinearTerm::var(&iv(q)));
        bound.push(iv(q));
    }
    conj.push(Formula::Atom(Atom::Eq(init_sum)));
    let mut fin_sum = LinearTerm::constant(BigInt::from(-1));
    for &q in &nfa.finals {
        conj.push(nonneg(&fv(q)));
        conj.push(at_most_one(&fv(q)));
        fin_sum = fin_sum.add(&LinearTerm::var(&fv(q)));
        bound.push(fv(q));
    }
    conj.push(Formula::Atom(Atom::Eq(fin_sum)));

    // Kirchhoff balance: in(q) + i_q = out(q) + f_q.
    for q in 0..nfa.states {
        let mut t = LinearTerm::default();
        for (e, (src, _, dst)) in nfa.edges.iter().enumerate() {
            if *dst == q {
                t = t.add(&LinearTerm::var(&y(e)));
            }
            if *src == q {
                t = t.sub(&LinearTerm::var(&y(e)));
            }
        }
        if nfa.initials.contains(&q) {
            t = t.add(&LinearTerm::var(&iv(q)));
        }
        if nfa.finals.contains(&q) {
            t = t.sub(&LinearTerm::var(&fv(q)));
        }
        conj.push(Formula::Atom(Atom::Eq(t)));
    }

    // Class counts.
    for j in 0..gamma {
        let mut t = LinearTerm::var(&format!("x{}", j + 1));
        for (e, (_, class, _)) in nfa.edges.iter().enumerate() {
            if *class == Some(j) {
                t = t.sub(&LinearTerm::var(&y(e)));
            }
        }
        conj.push(Formula::Atom(Atom::Eq(t)));
        conj.push(nonneg(&format!("x{}", j + 1)));
    }

    // Connectivity: every state with incoming flow is justified by a strictly
    // increasing distance chain grounded at the chosen initial state.
    for q in 0..nfa.states {
        conj.push(nonneg(&z(q)));
        bound.push(z(q));
        let mut in_sum = LinearTerm::default();
        for (e, (_, _, dst)) in nfa.edges.iter().enumerate() {
            if *dst == q {
                in_sum = in_sum.add(&LinearTerm::var(&y(e)));
            }
        }
        let mut cases: Vec<Formula> = Vec::new();
        if nfa.initials.contains(&q) {
            cases.push(Formula::and(vec![
                Formula::Atom(Atom::Eq(LinearTerm::var(&iv(q)).add_const(&BigInt::from(-1)))),
                Formula::Atom(Atom::Eq(LinearTerm::var(&z(q)).add_const(&BigInt::from(-1)))),
            ]));
        }
        for (e, (src, _, dst)) in nfa.edges.iter().enumerate() {
            if *dst != q || *src == q {
                continue;
            }
            cases.push(Formula::and(vec![
                Formula::Atom(Atom::Le(LinearTerm::var(&y(e)).scale(&BigInt::from(-1)).add_const(&BigInt::one()))),
                Formula::Atom(Atom::Le(LinearTerm::var(&z(*src)).scale(&BigInt::from(-1)).add_const(&BigInt::one()))),
                Formula::Atom(Atom::Eq(
                    LinearTerm::var(&z(q)).sub(&LinearTerm::var(&z(*src))).add_const(&BigInt::from(-1)),
                )),
            ]));
        }
        // the out-of-support case comes last: trimmed skeletons put most
        // states on the flow, so a justification usually exists
        let mut silent = in_sum.clone();
        if nfa.initials.contains(&q) {
            silent = silent.add(&LinearTerm::var(&iv(q)));
        }
        cases.push(Formula::and(vec![
            Formula::Atom(Atom::Eq(silent)),
            Formula::Atom(Atom::Eq(LinearTerm::var(&z(q)))),
        ]));
        conj.push(Formula::or(cases));
    }

    Formula::exists_many(&bound, Formula::and(conj))
}

/// The accepting-path skeleton of a one-way automaton, with one phase before
/// the left endmarker, one over the input and one after the right endmarker,
/// so that paths correspond exactly to accepting runs on endmarked tapes.
/// `classify` labels each transition.
fn phase_nfa(
    aut: &TwoWayParikhAutomaton,
    classify: impl Fn(&crate::automaton::Transition) -> Option<usize>,
) -> Result<FlowNfa, ParikhError> {
    if !aut.is_one_way() {
        return Err(ParikhError::NotOneWay);
    }
    let n = aut.state_count();
    // phase 0 state ids: q; phase 1: n + q; phase 2: 2n + q
    let mut edges = Vec::new();
    for t in aut.transitions() {
        match t.letter {
            Letter::Begin => {
                if aut.initial_states().contains(&t.src) {
                    edges.push((t.src, classify(t), n + t.dst));
                }
            }
            Letter::Sym(_) => {
                edges.push((n + t.src, classify(t), n + t.dst));
            }
            Letter::End => {
                if aut.accepting_states().contains(&t.dst) {
                    edges.push((n + t.src, classify(t), 2 * n + t.dst));
                }
            }
        }
    }
    Ok(FlowNfa {
        states: 3 * n,
        edges,
        initials: aut.initial_states().iter().copied().collect(),
        finals: aut.accepting_states().iter().map(|&q| 2 * n + q).collect(),
    })
}

/// Existential formula over `x1..x{|alphabet|}` whose models are exactly the
/// Parikh images of the accepted words. Endmarker transitions shape the flow
/// but count toward no letter.
pub fn parikh_image_formula(aut: &TwoWayParikhAutomaton) -> Result<Formula, ParikhError> {
    let gamma = aut.alphabet().len();
    let nfa = phase_nfa(aut, |t| match t.letter {
        Letter::Sym(s) => Some(s),
        _ => None,
    })?;
    Ok(flow_formula(&nfa, gamma).normalize_bound())
}

/// The vector-alphabet view: the Parikh-image formula of the automaton
/// relabeled by its weight vectors, over `x1..x{gamma}` where `gamma` is the
/// number of distinct vectors. Every transition counts, endmarkers included,
/// since their vectors contribute to the run value.
pub fn vector_parikh_formula(
    aut: &TwoWayParikhAutomaton,
) -> Result<(VectorAlphabetView, Formula), ParikhError> {
    let view = VectorAlphabetView::of(aut);
    let nfa = phase_nfa(aut, |t| Some(view.index_of(&t.weight).expect("vector in range")))?;
    let gamma = view.len();
    Ok((view, flow_formula(&nfa, gamma).normalize_bound()))
}

/// Length formula of a one-way Parikh automaton: `phi(l)` holds iff some
/// word of length `l` is accepted. Occurrence counts are indexed by distinct
/// weight vectors; the accumulated value is recovered as
/// `c_k = sum_j tau_j * proj_k(vector_j)` and constrained by the acceptance
/// formula. Runs on an endmarked tape take `l + 2` transitions, which is the
/// only place the endmarked model shows.
pub fn length_formula(aut: &TwoWayParikhAutomaton) -> Result<Formula, ParikhError> {
    let (view, xi) = vector_parikh_formula(aut)?;
    let gamma = view.len();
    let d = aut.dimension();
    if matches!(xi, Formula::False) {
        // no accepting path skeleton: no length is accepted
        return Ok(Formula::False);
    }

    let tau = |j: usize| format!("tau_{j}");
    let cv = |k: usize| format!("c_{k}");
    let mut conj: Vec<Formula> = Vec::new();

    // xi over the tau names
    let mut xi_renamed = xi;
    for j in 0..gamma {
        xi_renamed = xi_renamed.substitute(&format!("x{}", j + 1), &LinearTerm::var(&tau(j)));
    }
    conj.push(xi_renamed);

    // psi over the c names
    let mut psi = aut.constraint().normalize_bound();
    for k in 0..d {
        psi = psi.substitute(&format!("x{}", k + 1), &LinearTerm::var(&cv(k)));
    }
    conj.push(psi);

    // l + 2 = sum of tau (the run reads the endmarked tape)
    let mut lsum = LinearTerm::var("l").add_const(&BigInt::from(2));
    for j in 0..gamma {
        lsum = lsum.sub(&LinearTerm::var(&tau(j)));
    }
    conj.push(Formula::Atom(Atom::Eq(lsum)));

    // value recovery per dimension
    for k in 0..d {
        let mut t = LinearTerm::var(&cv(k));
        for j in 0..gamma {
            t = t.sub(&LinearTerm::var(&tau(j)).scale(&view.vectors[j][k]));
        }
        conj.push(Formula::Atom(Atom::Eq(t)));
    }

    let mut bound: Vec<String> = (0..gamma).map(tau).collect();
    bound.extend((0..d).map(cv));
    Ok(Formula::exists_many(&bound, Formula::and(conj)).normalize_bound())
}

/// Instantiates the single free variable of a length formula.
pub fn length_formula_at(phi: &Formula, len: usize) -> Formula {
    phi.substitute("l", &LinearTerm::constant(BigInt::from(len)))
}

/// The per-vector occurrence counts of a run, the natural witness for the
/// length formula.
pub fn run_vector_counts(
    aut: &TwoWayParikhAutomaton,
    view: &VectorAlphabetView,
    run: &crate::automaton::Run,
) -> Vec<BigInt> {
    let mut tau = vec![BigInt::zero(); view.len()];
    for t in run.transition_indices() {
        let j = view.index_of(&aut.transitions()[t].weight).expect("vector in range");
        tau[j] += 1;
    }
    tau
}

/// Keeps only states both reachable from an initial state and co-reachable
/// to an accepting one; the language is untouched. Decision pipelines trim
/// before building formulas.
pub fn trimmed(aut: &TwoWayParikhAutomaton) -> TwoWayParikhAutomaton {
    use crate::automaton::AutomatonBuilder;
    let n = aut.state_count();
    let mut fwd = vec![false; n];
    let mut stack: Vec<StateId> = aut.initial_states().iter().copied().collect();
    for &q in &stack {
        fwd[q] = true;
    }
    while let Some(q) = stack.pop() {
        for t in aut.transitions() {
            if t.src == q && !fwd[t.dst] {
                fwd[t.dst] = true;
                stack.push(t.dst);
            }
        }
    }
    let mut bwd = vec![false; n];
    let mut stack: Vec<StateId> = aut.accepting_states().iter().copied().collect();
    for &q in &stack {
        bwd[q] = true;
    }
    while let Some(q) = stack.pop() {
        for t in aut.transitions() {
            if t.dst == q && !bwd[t.src] {
                bwd[t.src] = true;
                stack.push(t.src);
            }
        }
    }
    let keep: Vec<bool> = (0..n).map(|q| fwd[q] && bwd[q]).collect();
    if keep.iter().all(|&k| k) {
        return aut.clone();
    }
    let mut b = AutomatonBuilder::with_alphabet(aut.alphabet().to_vec(), aut.dimension());
    let mut map: Vec<Option<StateId>> = vec![None; n];
    for q in 0..n {
        if keep[q] {
            let id = b.state(aut.state_name(q), aut.reading(q));
            map[q] = Some(id);
            if aut.initial_states().contains(&q) {
                b.mark_initial(id);
            }
            if aut.halting_states().contains(&q) {
                b.mark_halting(id, false);
            }
            if aut.accepting_states().contains(&q) {
                b.mark_accepting_only(id);
            }
        }
    }
    for t in aut.transitions() {
        if let (Some(s), Some(d)) = (map[t.src], map[t.dst]) {
            b.transition(s, t.letter, d, t.weight.clone());
        }
    }
    b.constraint(aut.constraint().clone());
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{sweep, wvec, AutomatonBuilder, Reading};
    use crate::crossing::to_one_way;
    use crate::presburger::{is_satisfiable, satisfied_by};
    use std::collections::BTreeSet;

    fn simple_one_way(word: &str) -> TwoWayParikhAutomaton {
        // accepts exactly the given word over {a, b}
        let mut b = AutomatonBuilder::new(&["a", "b"], 0);
        let q0 = b.state("q0", Reading::Right);
        let mut cur = b.state("s0", Reading::Right);
        b.mark_initial(q0);
        b.transition(q0, Letter::Begin, cur, vec![]);
        for (i, ch) in word.chars().enumerate() {
            let next = b.state(&format!("s{}", i + 1), Reading::Right);
            let sym = if ch == 'a' { 0 } else { 1 };
            b.transition(cur, Letter::Sym(sym), next, vec![]);
            cur = next;
        }
        let qf = b.state("qf", Reading::Right);
        b.mark_halting(qf, true);
        b.transition(cur, Letter::End, qf, vec![]);
        b.build()
    }

    #[test]
    fn parikh_vector_counts_letters() {
        assert_eq!(parikh_vector(&[0, 1, 1, 0], 2), wvec(&[2, 2]));
        assert_eq!(parikh_vector(&[], 2), wvec(&[0, 0]));
        // permutation invariance
        assert_eq!(parikh_vector(&[1, 0, 1, 0], 2), parikh_vector(&[0, 0, 1, 1], 2));
    }

    #[test]
    fn image_of_single_word() {
        let a = simple_one_way("ab");
        let f = parikh_image_formula(&a).unwrap();
        assert!(satisfied_by(&f, &wvec(&[1, 1])).unwrap());
        assert!(!satisfied_by(&f, &wvec(&[2, 1])).unwrap());
        assert!(!satisfied_by(&f, &wvec(&[0, 0])).unwrap());
    }

    #[test]
    fn image_of_a_star() {
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
        let f = parikh_image_formula(&a).unwrap();
        for n in 0..=9 {
            assert!(satisfied_by(&f, &wvec(&[n])).unwrap(), "n = {n}");
        }
        assert!(!satisfied_by(&f, &wvec(&[-1])).unwrap());
    }

    #[test]
    fn not_one_way_is_rejected() {
        let s = sweep();
        assert_eq!(parikh_image_formula(&s), Err(ParikhError::NotOneWay));
        assert_eq!(length_formula(&s), Err(ParikhError::NotOneWay));
    }

    #[test]
    fn image_matches_brute_force_on_random_automata() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for case in 0..25 {
            let nstates = rng.gen_range(1..=4);
            let nletters = rng.gen_range(1..=2);
            let mut b = AutomatonBuilder::with_alphabet(
                (0..nletters).map(|i| ((b'a' + i as u8) as char).to_string()).collect(),
                0,
            );
            let states: Vec<_> = (0..nstates).map(|i| b.state(&format!("q{i}"), Reading::Right)).collect();
            let entry = b.state("in", Reading::Right);
            let exit = b.state("qf", Reading::Right);
            b.mark_initial(entry);
            b.mark_halting(exit, true);
            b.transition(entry, Letter::Begin, states[0], vec![]);
            for &p in &states {
                for l in 0..nletters {
                    if rng.gen_bool(0.6) {
                        let q = states[rng.gen_range(0..nstates)];
                        b.transition(p, Letter::Sym(l), q, vec![]);
                    }
                }
                if rng.gen_bool(0.5) {
                    b.transition(p, Letter::End, exit, vec![]);
                }
            }
            let aut = b.build();
            aut.validate().unwrap();
            let f = parikh_image_formula(&aut).unwrap();
            let sample = aut.language_sample(8, 20);
            let images: BTreeSet<Vec<BigInt>> =
                sample.iter().map(|w| parikh_vector(w, nletters)).collect();
            // grid over vectors with component sum <= 8
            let mut grid: Vec<Vec<i64>> = vec![vec![]];
            for _ in 0..nletters {
                grid = grid
                    .into_iter()
                    .flat_map(|v| (0..=8i64).map(move |n| {
                        let mut v2 = v.clone();
                        v2.push(n);
                        v2
                    }))
                    .collect();
            }
            for v in grid {
                if v.iter().sum::<i64>() > 8 {
                    continue;
                }
                let bv = wvec(&v);
                let want = images.contains(&bv);
                let got = satisfied_by(&f, &bv).unwrap();
                assert_eq!(got, want, "case {case}: vector {v:?}");
            }
        }
    }

    #[test]
    fn length_formula_of_converted_sweep() {
        let conv = to_one_way(&sweep(), 3).unwrap();
        let aut = trimmed(&conv.automaton);
        let phi = length_formula(&aut).unwrap();
        assert_eq!(phi.free_vars().into_iter().collect::<Vec<_>>(), vec!["l".to_string()]);
        let sample = conv.automaton.language_sample(8, 200);
        let lengths: BTreeSet<usize> = sample.iter().map(|w| w.len()).collect();
        for l in 0..=8usize {
            let inst = length_formula_at(&phi, l);
            assert_eq!(is_satisfiable(&inst), lengths.contains(&l), "l = {l}");
        }
    }

    #[test]
    fn empty_language_formula_is_unsatisfiable() {
        // no accepting states
        let mut b = AutomatonBuilder::new(&["a"], 0);
        let q0 = b.state("q0", Reading::Right);
        b.mark_initial(q0);
        b.transition(q0, Letter::Sym(0), q0, vec![]);
        let aut = b.build();
        let phi = length_formula(&trimmed(&aut)).unwrap();
        assert!(!is_satisfiable(&phi));
    }

    #[test]
    fn dimension_zero_true_constraint_counts_lengths() {
        let a = simple_one_way("ab");
        let phi = length_formula(&a).unwrap();
        for l in 0..=5usize {
            assert_eq!(is_satisfiable(&length_formula_at(&phi, l)), l == 2, "l = {l}");
        }
    }

    #[test]
    fn run_counts_witness_the_formula() {
        // dimension-1 automaton over {a}: weight +1 per a, accept even counts
        let mut b = AutomatonBuilder::new(&["a"], 1);
        let q0 = b.state("q0", Reading::Right);
        let q1 = b.state("q1", Reading::Right);
        let qf = b.state("qf", Reading::Right);
        b.mark_initial(q0);
        b.mark_halting(qf, true);
        b.transition(q0, Letter::Begin, q1, wvec(&[0]));
        b.transition(q1, Letter::Sym(0), q1, wvec(&[1]));
        b.transition(q1, Letter::End, qf, wvec(&[0]));
        b.constraint(crate::presburger::parse_formula("exists y. x1 = y + y").unwrap());
        let aut = b.build();
        aut.validate().unwrap();
        let (view, xi) = vector_parikh_formula(&aut).unwrap();
        let word = aut.parse_word("aaaa").unwrap();
        let runs = aut.accepting_runs(&word, 20);
        assert_eq!(runs.len(), 1);
        let run = &runs[0];
        let tau = run_vector_counts(&aut, &view, run);
        // tau is a model of the vector Parikh formula
        assert!(satisfied_by(&xi, &tau).unwrap());
        // and reproduces the run value dimension-wise
        for k in 0..aut.dimension() {
            let mut c = BigInt::zero();
            for (j, v) in view.vectors.iter().enumerate() {
                c += &tau[j] * &v[k];
            }
            assert_eq!(c, run.value[k]);
        }
        // total count is the endmarked length
        let total: BigInt = tau.iter().sum();
        assert_eq!(total, BigInt::from(word.len() + 2));
    }

    #[test]
    fn trim_preserves_language() {
        let mut b = AutomatonBuilder::new(&["a"], 0);
        let q0 = b.state("q0", Reading::Right);
        let q1 = b.state("q1", Reading::Right);
        let dead = b.state("dead", Reading::Right);
        let qf = b.state("qf", Reading::Right);
        b.mark_initial(q0);
        b.mark_halting(qf, true);
        b.transition(q0, Letter::Begin, q1, vec![]);
        b.transition(q1, Letter::Sym(0), q1, vec![]);
        b.transition(q1, Letter::Sym(0), dead, vec![]);
        b.transition(q1, Letter::End, qf, vec![]);
        let aut = b.build();
        let t = trimmed(&aut);
        assert_eq!(t.state_count(), 3);
        assert_eq!(aut.language_sample(4, 20), t.language_sample(4, 20));
    }
}
