//! Finite encodings of data graphs as labelled trees, the acceptance game of
//! an automaton on such an encoding, and a parity-game solver.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::model::{DataGraph, NodeId, Role};

use super::ata::{Letter, State, Symbol, TwoAta};
use super::pbf::{Direction, Pbf};

/// A node of the (regular) tree encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TreeNode {
    /// The root, labelled `root`.
    Root,
    /// An empty slot child of the root, labelled `⊥`.
    Padding(usize),
    /// Graph node `node`, entered from `from` (`None`: a child of the root).
    Node {
        /// Index of the graph node.
        node: usize,
        /// Index of the graph node it was entered from.
        from: Option<usize>,
    },
}

/// A data graph seen as a tree for one automaton. The root's children are
/// the guess slots (the nominal's node, or padding) followed by every other
/// node. Below, a node's children are all its neighbours that are not slot
/// nodes, each labelled with the roles that connect it to its parent; edges
/// into slot nodes appear as `→r a` letters instead. Moving up from a node
/// entered from `y` lands on `y` seen from that node, which is again a node
/// of the same graph, so the encoding is finite.
#[derive(Clone, Debug)]
pub struct TreeEncoding {
    nodes: Vec<NodeId>,
    slots: Vec<Option<usize>>,
    anonymous: Vec<usize>,
    slotted: Vec<bool>,
    base: Vec<BTreeSet<Letter>>,
    links: Vec<BTreeMap<usize, BTreeSet<Role>>>,
}

impl TreeEncoding {
    /// The encoding of `g` for the alphabet and guess of `aut`. Assertions
    /// outside the automaton's alphabet are ignored.
    pub fn from_graph(g: &DataGraph, aut: &TwoAta) -> Self {
        let nodes: Vec<NodeId> = g.domain().into_iter().collect();
        let index: HashMap<&NodeId, usize> = nodes.iter().enumerate().map(|(i, a)| (a, i)).collect();
        let l = aut.l();
        let mut slots = vec![None; l];
        let mut slotted = vec![false; nodes.len()];
        for a in aut.nominals() {
            let (Some(&x), Some(j)) = (index.get(a), aut.guess().slot_of(a)) else { continue };
            if slots[j - 1].is_none() {
                slots[j - 1] = Some(x);
                slotted[x] = true;
            }
        }
        let anonymous = (0..nodes.len()).filter(|&x| !slotted[x]).collect();
        let mut base = vec![BTreeSet::new(); nodes.len()];
        for (c, a) in g.concept_assertions() {
            if aut.concepts().contains(c) {
                base[index[a]].insert(Letter::Concept(c.clone()));
            }
        }
        for (x, a) in nodes.iter().enumerate() {
            if aut.nominals().contains(a) {
                base[x].insert(Letter::Nominal(a.clone()));
            }
        }
        let mut links: Vec<BTreeMap<usize, BTreeSet<Role>>> = vec![BTreeMap::new(); nodes.len()];
        for (r, a, b) in g.role_assertions() {
            let fwd = Role::forward(r.clone());
            if !aut.roles().contains(&fwd) {
                continue;
            }
            let (x, y) = (index[a], index[b]);
            links[x].entry(y).or_default().insert(fwd.clone());
            links[y].entry(x).or_default().insert(fwd.invert());
        }
        for x in 0..nodes.len() {
            for (&y, roles) in &links[x] {
                if slotted[y] {
                    for r in roles {
                        base[x].insert(Letter::Arrival(r.clone(), nodes[y].clone()));
                    }
                }
            }
        }
        TreeEncoding { nodes, slots, anonymous, slotted, base, links }
    }

    /// The graph node names, by index.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    /// The label of a tree node.
    pub fn label(&self, t: TreeNode) -> Symbol {
        match t {
            TreeNode::Root => Symbol::Root,
            TreeNode::Padding(_) => Symbol::Bot,
            TreeNode::Node { node, from } => {
                let mut ls = self.base[node].clone();
                if let Some(y) = from {
                    // r ∈ label iff (parent, node) ∈ r; links[node][y] holds roles node→y.
                    for r in self.links[node].get(&y).into_iter().flatten() {
                        ls.insert(Letter::Role(r.invert()));
                    }
                }
                Symbol::Label(ls)
            }
        }
    }

    /// The children, in direction order `1, 2, …`.
    pub fn children(&self, t: TreeNode) -> Vec<TreeNode> {
        match t {
            TreeNode::Root => {
                let slots = self.slots.iter().enumerate().map(|(i, s)| match s {
                    Some(x) => TreeNode::Node { node: *x, from: None },
                    None => TreeNode::Padding(i + 1),
                });
                slots.chain(self.anonymous.iter().map(|&x| TreeNode::Node { node: x, from: None })).collect()
            }
            TreeNode::Padding(_) => Vec::new(),
            TreeNode::Node { node, .. } => {
                self.links[node].keys().filter(|&&y| !self.slotted[y]).map(|&y| TreeNode::Node { node: y, from: Some(node) }).collect()
            }
        }
    }

    /// The parent (`None` at the root).
    pub fn parent(&self, t: TreeNode) -> Option<TreeNode> {
        match t {
            TreeNode::Root => None,
            TreeNode::Padding(_) | TreeNode::Node { from: None, .. } => Some(TreeNode::Root),
            TreeNode::Node { node, from: Some(y) } => {
                Some(if self.slotted[y] { TreeNode::Node { node: y, from: None } } else { TreeNode::Node { node: y, from: Some(node) } })
            }
        }
    }

    /// The root child holding slot `i` (1-based).
    pub fn anchor(&self, i: usize) -> Option<TreeNode> {
        let s = self.slots.get(i.checked_sub(1)?)?;
        Some(match s {
            Some(x) => TreeNode::Node { node: *x, from: None },
            None => TreeNode::Padding(i),
        })
    }

    fn target(&self, t: TreeNode, d: &Direction, kids: &[TreeNode]) -> Option<TreeNode> {
        match d {
            Direction::Up => self.parent(t),
            Direction::Stay => Some(t),
            Direction::Child(j) => kids.get(j.checked_sub(1)?).copied(),
            Direction::Anchor(i) => self.anchor(*i),
        }
    }
}

/// The two players.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Player {
    /// The existential player (chooses at disjunctions).
    Eve,
    /// The universal player (chooses at conjunctions).
    Adam,
}

impl Player {
    fn opponent(self) -> Player {
        match self {
            Player::Eve => Player::Adam,
            Player::Adam => Player::Eve,
        }
    }

    fn of_priority(p: u8) -> Player {
        if p.is_multiple_of(2) {
            Player::Eve
        } else {
            Player::Adam
        }
    }
}

/// A position of a game graph. A player who must move from a position
/// without successors loses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArenaPosition {
    /// Who chooses the successor.
    pub owner: Player,
    /// Parity priority; Eve wins a play iff the largest priority seen
    /// infinitely often is even.
    pub priority: u8,
    /// Successor positions.
    pub successors: Vec<usize>,
}

/// A finite parity game with an initial position.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameArena {
    /// The positions.
    pub positions: Vec<ArenaPosition>,
    /// Where plays start.
    pub initial: usize,
}

impl GameArena {
    /// Adds a position, returning its index.
    pub fn add(&mut self, owner: Player, priority: u8, successors: Vec<usize>) -> usize {
        self.positions.push(ArenaPosition { owner, priority, successors });
        self.positions.len() - 1
    }

    /// Number of positions.
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    /// Whether there are no positions.
    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

struct Builder<'a> {
    aut: &'a TwoAta,
    enc: &'a TreeEncoding,
    arena: GameArena,
    states: HashMap<(TreeNode, State), usize>,
    pending: Vec<(usize, TreeNode, State)>,
    truth: usize,
    falsity: usize,
}

impl Builder<'_> {
    fn state_position(&mut self, t: TreeNode, q: State) -> usize {
        if let Some(&p) = self.states.get(&(t, q.clone())) {
            return p;
        }
        let p = self.arena.add(Player::Eve, self.aut.priority(&q), Vec::new());
        self.states.insert((t, q.clone()), p);
        self.pending.push((p, t, q));
        p
    }

    fn compile(&mut self, f: &Pbf, t: TreeNode, kids: &[TreeNode]) -> usize {
        match f {
            Pbf::True => self.truth,
            Pbf::False => self.falsity,
            Pbf::Atom(d, q) => match self.enc.target(t, d, kids) {
                Some(u) => self.state_position(u, q.clone()),
                None => self.falsity,
            },
            Pbf::And(xs) | Pbf::Or(xs) => {
                let succ: Vec<usize> = xs.iter().map(|x| self.compile(x, t, kids)).collect();
                let owner = if matches!(f, Pbf::And(_)) { Player::Adam } else { Player::Eve };
                self.arena.add(owner, 0, succ)
            }
        }
    }
}

/// The acceptance game of `aut` on `enc`, starting from `(root, q̃)`.
/// State positions carry the automaton's priorities; a state position's only
/// move evaluates `δ(q, σ)`, with `∧` owned by Adam and `∨` by Eve.
pub fn arena_from_structure(aut: &TwoAta, enc: &TreeEncoding) -> GameArena {
    arena_from(aut, enc, TreeNode::Root, aut.initial())
}

/// The acceptance game from an arbitrary tree node and state.
pub fn arena_from(aut: &TwoAta, enc: &TreeEncoding, start: TreeNode, q: State) -> GameArena {
    let mut arena = GameArena::default();
    let truth = arena.add(Player::Adam, 0, Vec::new());
    let falsity = arena.add(Player::Eve, 0, Vec::new());
    let mut b = Builder { aut, enc, arena, states: HashMap::new(), pending: Vec::new(), truth, falsity };
    let init = b.state_position(start, q);
    while let Some((p, t, q)) = b.pending.pop() {
        let kids = enc.children(t);
        let f = aut.delta(&q, &enc.label(t), kids.len());
        let next = b.compile(&f, t, &kids);
        b.arena.positions[p].successors = vec![next];
    }
    let mut arena = b.arena;
    arena.initial = init;
    arena
}

/// Winners of every position of a parity game (coBüchi games are the case of
/// priorities `{0, 1}`), by Zielonka's recursive algorithm.
pub fn solve_cobuchi(arena: &GameArena) -> Vec<Player> {
    solve_parity(arena)
}

/// Winners of every position of a parity game with max-even acceptance.
pub fn solve_parity(arena: &GameArena) -> Vec<Player> {
    let n = arena.len();
    // Dead ends move to a sink won by the opponent of their owner.
    let mut owner: Vec<Player> = arena.positions.iter().map(|p| p.owner).collect();
    let mut priority: Vec<u8> = arena.positions.iter().map(|p| p.priority).collect();
    let mut succ: Vec<Vec<usize>> = arena.positions.iter().map(|p| p.successors.clone()).collect();
    let eve_sink = n;
    let adam_sink = n + 1;
    owner.extend([Player::Eve, Player::Eve]);
    priority.extend([0, 1]);
    succ.extend([vec![eve_sink], vec![adam_sink]]);
    for v in 0..n {
        if succ[v].is_empty() {
            succ[v].push(if owner[v] == Player::Eve { adam_sink } else { eve_sink });
        }
    }
    let mut pred = vec![Vec::new(); n + 2];
    for (v, ss) in succ.iter().enumerate() {
        for &w in ss {
            pred[w].push(v);
        }
    }
    let game = Game { owner, priority, succ, pred };
    let (eve, _) = game.zielonka(&vec![true; n + 2]);
    (0..n).map(|v| if eve[v] { Player::Eve } else { Player::Adam }).collect()
}

struct Game {
    owner: Vec<Player>,
    priority: Vec<u8>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

impl Game {
    /// Positions of `active` from which `player` can force a visit to `target`.
    fn attractor(&self, active: &[bool], target: &[bool], player: Player) -> Vec<bool> {
        let mut attr = target.to_vec();
        let mut count: Vec<usize> =
            (0..active.len()).map(|v| if active[v] { self.succ[v].iter().filter(|&&w| active[w]).count() } else { 0 }).collect();
        let mut queue: Vec<usize> = (0..active.len()).filter(|&v| attr[v]).collect();
        while let Some(w) = queue.pop() {
            for &v in &self.pred[w] {
                if !active[v] || attr[v] {
                    continue;
                }
                if self.owner[v] == player {
                    attr[v] = true;
                    queue.push(v);
                } else {
                    count[v] -= 1;
                    if count[v] == 0 {
                        attr[v] = true;
                        queue.push(v);
                    }
                }
            }
        }
        attr
    }

    /// `(W_Eve, W_Adam)` of the subgame on `active`, which must be a trap-free
    /// subgame (every active position keeps an active successor).
    fn zielonka(&self, active: &[bool]) -> (Vec<bool>, Vec<bool>) {
        let n = active.len();
        let Some(p) = (0..n).filter(|&v| active[v]).map(|v| self.priority[v]).max() else {
            return (vec![false; n], vec![false; n]);
        };
        let alpha = Player::of_priority(p);
        let top: Vec<bool> = (0..n).map(|v| active[v] && self.priority[v] == p).collect();
        let a = self.attractor(active, &top, alpha);
        let rest: Vec<bool> = (0..n).map(|v| active[v] && !a[v]).collect();
        let (w_eve, w_adam) = self.zielonka(&rest);
        let w_opp = if alpha == Player::Eve { &w_adam } else { &w_eve };
        if !w_opp.iter().any(|&b| b) {
            let all: Vec<bool> = active.to_vec();
            return if alpha == Player::Eve { (all, vec![false; n]) } else { (vec![false; n], all) };
        }
        let b = self.attractor(active, w_opp, alpha.opponent());
        let rest2: Vec<bool> = (0..n).map(|v| active[v] && !b[v]).collect();
        let (mut e2, mut a2) = self.zielonka(&rest2);
        let opp_side = if alpha == Player::Eve { &mut a2 } else { &mut e2 };
        for v in 0..n {
            if b[v] {
                opp_side[v] = true;
            }
        }
        (e2, a2)
    }
}

/// Whether `aut` accepts the encoding of `g`. The subgame from `(root, q0)`
/// is solved first: Adam may always move there, so losing it decides the
/// whole game.
pub fn accepts(aut: &TwoAta, g: &DataGraph) -> bool {
    let enc = TreeEncoding::from_graph(g, aut);
    let quick = arena_from(aut, &enc, TreeNode::Root, State::Q0);
    if solve_cobuchi(&quick)[quick.initial] == Player::Adam {
        return false;
    }
    let arena = arena_from_structure(aut, &enc);
    solve_cobuchi(&arena)[arena.initial] == Player::Eve
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// Eve wins `v` iff some positional Eve strategy makes every play from `v`
    /// winning: no reachable Eve dead end and no reachable cycle whose largest
    /// priority is odd.
    fn brute_force(arena: &GameArena) -> Vec<Player> {
        let n = arena.len();
        let eve: Vec<usize> =
            (0..n).filter(|&v| arena.positions[v].owner == Player::Eve && !arena.positions[v].successors.is_empty()).collect();
        let mut choice = vec![0usize; eve.len()];
        let mut won = vec![false; n];
        loop {
            let edges: Vec<Vec<usize>> = (0..n)
                .map(|v| match eve.iter().position(|&e| e == v) {
                    Some(i) => vec![arena.positions[v].successors[choice[i]]],
                    None => arena.positions[v].successors.clone(),
                })
                .collect();
            let reach = |from: usize, allowed: &dyn Fn(usize) -> bool| -> Vec<bool> {
                let mut seen = vec![false; n];
                let mut stack = vec![from];
                while let Some(v) = stack.pop() {
                    for &w in &edges[v] {
                        if allowed(w) && !seen[w] {
                            seen[w] = true;
                            stack.push(w);
                        }
                    }
                }
                seen
            };
            for v in 0..n {
                let mut r = reach(v, &|_| true);
                r[v] = true;
                let dead = (0..n).any(|u| r[u] && arena.positions[u].owner == Player::Eve && arena.positions[u].successors.is_empty());
                let bad_cycle = (0..n).any(|u| {
                    let p = arena.positions[u].priority;
                    r[u] && p % 2 == 1 && reach(u, &|w| arena.positions[w].priority <= p)[u]
                });
                if !dead && !bad_cycle {
                    won[v] = true;
                }
            }
            let mut i = 0;
            loop {
                if i == eve.len() {
                    return won.iter().map(|&w| if w { Player::Eve } else { Player::Adam }).collect();
                }
                choice[i] += 1;
                if choice[i] < arena.positions[eve[i]].successors.len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }

    fn random_arena(rng: &mut StdRng, max_priority: u8) -> GameArena {
        let n = rng.gen_range(1..=8);
        let mut arena = GameArena::default();
        for _ in 0..n {
            let owner = if rng.gen_bool(0.5) { Player::Eve } else { Player::Adam };
            let degree = rng.gen_range(0..=3);
            let successors: Vec<usize> = (0..degree).map(|_| rng.gen_range(0..n)).collect::<BTreeSet<_>>().into_iter().collect();
            arena.add(owner, rng.gen_range(0..=max_priority), successors);
        }
        arena
    }

    #[test]
    fn cobuchi_solver_matches_brute_force() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let arena = random_arena(&mut rng, 1);
            assert_eq!(solve_cobuchi(&arena), brute_force(&arena), "{arena:?}");
        }
    }

    #[test]
    fn parity_solver_matches_brute_force() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..200 {
            let arena = random_arena(&mut rng, 3);
            assert_eq!(solve_parity(&arena), brute_force(&arena), "{arena:?}");
        }
    }

    #[test]
    fn dead_ends_lose_for_their_owner() {
        let mut arena = GameArena::default();
        arena.add(Player::Eve, 0, Vec::new());
        arena.add(Player::Adam, 1, Vec::new());
        assert_eq!(solve_cobuchi(&arena), vec![Player::Adam, Player::Eve]);
    }

    #[test]
    fn odd_self_loop_is_lost() {
        let mut arena = GameArena::default();
        arena.add(Player::Eve, 1, vec![0]);
        arena.add(Player::Eve, 0, vec![1]);
        arena.add(Player::Eve, 0, vec![0, 1]);
        assert_eq!(solve_cobuchi(&arena), vec![Player::Adam, Player::Eve, Player::Eve]);
    }
}
