//! The two-way alternating tree automaton: transitions, priorities,
//! acceptance of graphs and bounded emptiness over all guesses.

use wfshacl::automata::{build_2ata, enumerate_guesses, graph_accepted, shape_sat_via_automata, Symbol, Variant};
use wfshacl::{ConstraintSet, DataGraph};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let c = ConstraintSet::parse("s <- A | some p . !t\nt <- !s | some r . t")?;
    let s = "s".into();

    let guess = enumerate_guesses(&c)?.next().expect("one guess without nominals");
    let aut = build_2ata(&c, &s, &guess)?;
    println!("{} states, branching {}", aut.states().len(), aut.k());
    let symbols = [Symbol::parse("root")?, Symbol::parse("{A}")?];
    print!("{}", aut.dump(&symbols));

    let g = DataGraph::parse("p(0,1) r(0,0) r(1,1) A(1)")?;
    println!("accepts {}: {}", g.to_string().trim(), graph_accepted(&c, &s, &g, Variant::Anchored)?);

    let out = shape_sat_via_automata(&c, &s, 2, Variant::Anchored)?;
    println!("emptiness up to 2 nodes: {:?}", out.verdict);
    Ok(())
}
