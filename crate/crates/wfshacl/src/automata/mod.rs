//! Two-way alternating parity tree automata for shape and document
//! satisfiability: guesses, the automaton construction, finite tree
//! encodings of graphs, and bounded emptiness by solving acceptance games.

mod arena;
mod ata;
mod guess;
mod pbf;

use std::collections::BTreeSet;
use std::time::Instant;

use thiserror::Error;

use crate::analysis::{GraphStream, Padding, SearchOutcome, Signature, Verdict, MAX_SLOTS};
use crate::model::{ConstraintSet, DataGraph, Document, ModelError, NodeId, RoleName, ShapeName};

pub use arena::{
    accepts, arena_from, arena_from_structure, solve_cobuchi, solve_parity, ArenaPosition, GameArena, Player, TreeEncoding, TreeNode,
};
pub use ata::{build_2ata, build_2ata_with, build_doc_2ata, build_doc_2ata_with, type_universe, Letter, State, Symbol, TwoAta, Variant};
pub use guess::{Guess, Guesses, MAX_GUESSES};
pub use pbf::{Direction, Pbf};

/// Errors of the automata constructions.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AutomataError {
    /// Malformed input.
    #[error(transparent)]
    Model(#[from] ModelError),
    /// The guess does not fit the automaton's nominals or breaks an invariant.
    #[error("the guess does not match the nominals or violates a guess invariant")]
    GuessMismatch,
    /// The guess space is too large to enumerate.
    #[error("more than {MAX_GUESSES} guesses")]
    TooManyGuesses,
    /// A size level has too many assertion slots to enumerate.
    #[error("{slots} assertion slots at {nodes} nodes exceed the enumeration limit")]
    SearchSpace {
        /// Node count of the level.
        nodes: usize,
        /// Assertion slots at that size.
        slots: usize,
    },
    /// A symbol did not parse.
    #[error("cannot parse symbol `{0}`")]
    BadSymbol(String),
}

/// All guesses for a shape automaton of `c`.
pub fn enumerate_guesses(c: &ConstraintSet) -> Result<Guesses, AutomataError> {
    let cn = if c.is_normal() { c.clone() } else { c.normalize()? };
    let nominals = cn.nominals();
    Guesses::new(&type_universe(&cn, &nominals), &nominals, &cn.role_names())
}

/// All guesses for the document automaton of `d`.
pub fn enumerate_document_guesses(d: &Document) -> Result<Guesses, AutomataError> {
    let cn = if d.constraints.is_normal() { d.constraints.clone() } else { d.constraints.normalize()? };
    let nominals = d.individuals();
    Guesses::new(&type_universe(&cn, &nominals), &nominals, &cn.role_names())
}

fn stream_for(automata: &[TwoAta], required: &BTreeSet<NodeId>, max_nodes: usize) -> Result<(GraphStream, usize), AutomataError> {
    let mut sig = Signature::default();
    for a in automata {
        sig.concepts.extend(a.concepts().iter().cloned());
        sig.roles.extend(a.roles().iter().map(|r| r.name.clone()));
    }
    let aux = sig.fresh_concept();
    let padded = sig.union(&Signature::new([aux.clone()], Vec::<RoleName>::new()));
    let first = required.len();
    if max_nodes >= first && padded.slots(max_nodes) > MAX_SLOTS {
        let n = (first..=max_nodes).find(|&n| padded.slots(n) > MAX_SLOTS).unwrap_or(max_nodes);
        return Err(AutomataError::SearchSpace { nodes: n, slots: padded.slots(n) });
    }
    Ok((GraphStream::new(&sig, required, max_nodes, Padding::Pad(aux)), first))
}

fn run(automata: &[TwoAta], required: &BTreeSet<NodeId>, max_nodes: usize) -> Result<SearchOutcome, AutomataError> {
    let start = Instant::now();
    let (stream, first) = stream_for(automata, required, max_nodes)?;
    let mut examined = 0u64;
    let mut found = None;
    'graphs: for g in stream {
        examined += 1;
        for aut in automata {
            if accepts(aut, &g) {
                found = Some(g);
                break 'graphs;
            }
        }
    }
    let verdict = match found {
        Some(g) => Verdict::Witness(g),
        None => Verdict::NoWitnessUpTo(if max_nodes >= first { max_nodes } else { 0 }),
    };
    Ok(SearchOutcome {
        verdict,
        graphs_examined: examined,
        bound: max_nodes,
        elapsed_ms: start.elapsed().as_millis() as u64,
        budget_exhausted: false,
    })
}

/// Searches the tree encodings of graphs with at most `max_nodes` nodes for
/// one accepted by `aut`: `Witness(g)` iff Eve wins the acceptance game on
/// the encoding of `g`.
pub fn bounded_emptiness(aut: &TwoAta, max_nodes: usize) -> Result<SearchOutcome, AutomataError> {
    let required: BTreeSet<NodeId> = aut.nominals().iter().cloned().collect();
    run(std::slice::from_ref(aut), &required, max_nodes)
}

/// Shape satisfiability through automata: some guess automaton of `c`
/// (restricted to `s`) accepts the encoding of a graph with at most
/// `max_nodes` nodes.
pub fn shape_sat_via_automata(
    c: &ConstraintSet,
    s: &ShapeName,
    max_nodes: usize,
    variant: Variant,
) -> Result<SearchOutcome, AutomataError> {
    let cs = c.restrict_to(s)?;
    let automata = enumerate_guesses(&cs)?.map(|g| build_2ata_with(&cs, s, &g, variant)).collect::<Result<Vec<_>, _>>()?;
    run(&automata, &cs.nominals(), max_nodes)
}

/// Document satisfiability through automata.
pub fn doc_sat_via_automata(d: &Document, max_nodes: usize, variant: Variant) -> Result<SearchOutcome, AutomataError> {
    let automata = enumerate_document_guesses(d)?.map(|g| build_doc_2ata_with(d, &g, variant)).collect::<Result<Vec<_>, _>>()?;
    run(&automata, &d.individuals(), max_nodes)
}

/// Whether some guess automaton of `c` for `s` accepts the encoding of `g`.
pub fn graph_accepted(c: &ConstraintSet, s: &ShapeName, g: &DataGraph, variant: Variant) -> Result<bool, AutomataError> {
    for guess in enumerate_guesses(c)? {
        if accepts(&build_2ata_with(c, s, &guess, variant)?, g) {
            return Ok(true);
        }
    }
    Ok(false)
}
