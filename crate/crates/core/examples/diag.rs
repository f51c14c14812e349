// temporary diagnostic
use twopa::automaton::sweep;
use twopa::crossing;
use twopa::decide;
use twopa::parikh;
use std::time::Instant;

fn main() {
    let s = sweep();
    let t0 = Instant::now();
    let comp = decide::complement(&s).unwrap();
    println!("complement: {} states, {} transitions ({:?})", comp.state_count(), comp.transitions().len(), t0.elapsed());
    let t0 = Instant::now();
    let prod = decide::intersect(&s, &comp).unwrap();
    println!("product: {} states, {} transitions ({:?})", prod.state_count(), prod.transitions().len(), t0.elapsed());
    let k = prod.state_count();
    let t0 = Instant::now();
    let conv = crossing::to_one_way_emptiness(&prod, k).unwrap();
    println!("conversion: {} states, {} transitions ({:?})", conv.automaton.state_count(), conv.automaton.transitions().len(), t0.elapsed());
    let t0 = Instant::now();
    let trimmed = parikh::trimmed(&conv.automaton);
    println!("trimmed: {} states, {} transitions ({:?})", trimmed.state_count(), trimmed.transitions().len(), t0.elapsed());
    let t0 = Instant::now();
    let phi = parikh::length_formula(&trimmed).unwrap();
    println!("formula built ({:?})", t0.elapsed());
    let t0 = Instant::now();
    let sat = twopa::presburger::is_satisfiable(&phi);
    println!("sat = {sat} ({:?})", t0.elapsed());
}
