//! Per-frame satisfiability by grounding and propagation.
//!
//! The formula (in primitive form) is unfolded over the finite frame into a
//! DAG of and/not gates over (variable, world) atoms. A backtracking search
//! with unit-style propagation then looks for a satisfying assignment. On
//! instances where the valuation space is tiny this agrees with the plain
//! enumeration in [`super::satisfiable_in_frame`] (property-tested), and it
//! stays usable where enumeration is hopeless, e.g. machine encodings over
//! spy-chain products.

use std::collections::{BTreeMap, BTreeSet};

use crate::formula::Formula;
use crate::frames::{DeltaFrame, World};

use super::{Model, SemanticsError};

/// Arena form of an expanded (primitive) formula.
struct Arena {
    kinds: Vec<NodeKind>,
}

enum NodeKind {
    Var(String),
    Diag,
    Bottom,
    Not(usize),
    And(usize, usize),
    BoxH(usize),
    BoxV(usize),
}

fn build_arena(f: &Formula, arena: &mut Arena) -> usize {
    use Formula::*;
    let kind = match f {
        Var(name) => NodeKind::Var(name.clone()),
        Diag => NodeKind::Diag,
        Bottom => NodeKind::Bottom,
        Not(a) => NodeKind::Not(build_arena(a, arena)),
        And(a, b) => {
            let l = build_arena(a, arena);
            let r = build_arena(b, arena);
            NodeKind::And(l, r)
        }
        BoxH(a) => NodeKind::BoxH(build_arena(a, arena)),
        BoxV(a) => NodeKind::BoxV(build_arena(a, arena)),
        _ => unreachable!("arena construction requires primitive formulas"),
    };
    arena.kinds.push(kind);
    arena.kinds.len() - 1
}

/// Grounded constraint graph. Children always precede parents, so one
/// bottom-up sweep evaluates every node.
enum GNode {
    Const(bool),
    Lit(usize),
    Neg(usize),
    Conj(Vec<usize>),
}

struct Grounding {
    nodes: Vec<GNode>,
    /// atom id -> (variable index, world index)
    atoms: Vec<(usize, usize)>,
}

struct Grounder<'a> {
    df: &'a DeltaFrame,
    worlds: Vec<World>,
    succ_h: Vec<Vec<usize>>,
    succ_v: Vec<Vec<usize>>,
    vars: Vec<String>,
    arena: Arena,
    root_node: usize,
    memo: BTreeMap<(usize, usize), usize>,
    atom_ids: BTreeMap<(usize, usize), usize>,
    g: Grounding,
}

impl<'a> Grounder<'a> {
    fn new(df: &'a DeltaFrame, f: &Formula) -> Grounder<'a> {
        let worlds: Vec<World> = df.worlds().iter().cloned().collect();
        let index: BTreeMap<&World, usize> =
            worlds.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let succ_of = |rel: &BTreeSet<(World, World)>| -> Vec<Vec<usize>> {
            let mut out = vec![Vec::new(); worlds.len()];
            for (a, b) in rel {
                out[index[a]].push(index[b]);
            }
            out
        };
        let vars: Vec<String> = f.variables().into_iter().collect();
        let mut arena = Arena { kinds: Vec::new() };
        let root_node = build_arena(&f.expand_derived(), &mut arena);
        Grounder {
            succ_h: succ_of(df.rh()),
            succ_v: succ_of(df.rv()),
            df,
            worlds,
            vars,
            arena,
            root_node,
            memo: BTreeMap::new(),
            atom_ids: BTreeMap::new(),
            g: Grounding {
                nodes: Vec::new(),
                atoms: Vec::new(),
            },
        }
    }

    fn push(&mut self, node: GNode) -> usize {
        self.g.nodes.push(node);
        self.g.nodes.len() - 1
    }

    fn atom(&mut self, var: usize, world: usize) -> usize {
        if let Some(&id) = self.atom_ids.get(&(var, world)) {
            return id;
        }
        let id = self.g.atoms.len();
        self.g.atoms.push((var, world));
        self.atom_ids.insert((var, world), id);
        id
    }

    fn ground(&mut self, node: usize, world: usize) -> usize {
        if let Some(&id) = self.memo.get(&(node, world)) {
            return id;
        }
        let id = match &self.arena.kinds[node] {
            NodeKind::Var(name) => {
                let vi = self.vars.iter().position(|v| v == name).unwrap();
                let atom = self.atom(vi, world);
                self.push(GNode::Lit(atom))
            }
            NodeKind::Diag => {
                let d = self.df.diag().contains(&self.worlds[world]);
                self.push(GNode::Const(d))
            }
            NodeKind::Bottom => self.push(GNode::Const(false)),
            NodeKind::Not(a) => {
                let a = *a;
                let c = self.ground(a, world);
                self.push(GNode::Neg(c))
            }
            NodeKind::And(a, b) => {
                let (a, b) = (*a, *b);
                let l = self.ground(a, world);
                let r = self.ground(b, world);
                self.push(GNode::Conj(vec![l, r]))
            }
            NodeKind::BoxH(a) => {
                let a = *a;
                let succ = self.succ_h[world].clone();
                let children: Vec<usize> = succ.iter().map(|&w2| self.ground(a, w2)).collect();
                self.push(GNode::Conj(children))
            }
            NodeKind::BoxV(a) => {
                let a = *a;
                let succ = self.succ_v[world].clone();
                let children: Vec<usize> = succ.iter().map(|&w2| self.ground(a, w2)).collect();
                self.push(GNode::Conj(children))
            }
        };
        self.memo.insert((node, world), id);
        id
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Val {
    True,
    False,
    Unknown,
}

struct Solver<'g> {
    g: &'g Grounding,
    assign: Vec<Option<bool>>,
    values: Vec<Val>,
    /// Branch decisions plus propagation passes, capped by `budget`.
    work: u64,
    budget: u64,
}

enum Outcome {
    Sat(Vec<Option<bool>>),
    Unsat,
    OutOfBudget,
}

impl<'g> Solver<'g> {
    /// One bottom-up sweep; children precede parents by construction.
    fn recompute(&mut self) {
        for (i, node) in self.g.nodes.iter().enumerate() {
            self.values[i] = match node {
                GNode::Const(b) => {
                    if *b {
                        Val::True
                    } else {
                        Val::False
                    }
                }
                GNode::Lit(a) => match self.assign[*a] {
                    Some(true) => Val::True,
                    Some(false) => Val::False,
                    None => Val::Unknown,
                },
                GNode::Neg(c) => match self.values[*c] {
                    Val::True => Val::False,
                    Val::False => Val::True,
                    Val::Unknown => Val::Unknown,
                },
                GNode::Conj(cs) => {
                    let mut val = Val::True;
                    for &c in cs {
                        match self.values[c] {
                            Val::False => {
                                val = Val::False;
                                break;
                            }
                            Val::Unknown => val = Val::Unknown,
                            Val::True => {}
                        }
                    }
                    val
                }
            };
        }
    }

    /// Require `node` to take `value`; assigns literals and expands
    /// true-conjunctions eagerly, or returns false on an immediate conflict.
    /// False-conjunctions that cannot be refuted yet go to `pending`.
    fn require(&mut self, node: usize, value: bool, pending: &mut Vec<usize>) -> bool {
        match &self.g.nodes[node] {
            GNode::Const(b) => *b == value,
            GNode::Lit(a) => {
                let a = *a;
                match self.assign[a] {
                    Some(b) => b == value,
                    None => {
                        self.assign[a] = Some(value);
                        true
                    }
                }
            }
            GNode::Neg(c) => {
                let c = *c;
                self.require(c, !value, pending)
            }
            GNode::Conj(cs) => {
                if value {
                    let cs = cs.clone();
                    cs.iter().all(|&c| self.require(c, true, pending))
                } else {
                    pending.push(node);
                    true
                }
            }
        }
    }

    /// Re-scan pending false-conjunctions against current values; discharge
    /// or refine them. A conjunction with a single undetermined child hands
    /// its obligation down to that child and is dropped: the other children
    /// are already true (and stay true as assignments grow), so the child's
    /// obligation subsumes it. Returns None on conflict, otherwise whether
    /// any assignment or refinement happened.
    fn settle(&mut self, pending: &mut Vec<usize>) -> Option<bool> {
        let mut progress = false;
        let mut next: Vec<usize> = Vec::new();
        for node in std::mem::take(pending) {
            match self.values[node] {
                Val::False => {
                    progress = true;
                }
                Val::True => return None,
                Val::Unknown => {
                    let GNode::Conj(cs) = &self.g.nodes[node] else {
                        unreachable!()
                    };
                    let unknown: Vec<usize> = cs
                        .iter()
                        .copied()
                        .filter(|&c| self.values[c] == Val::Unknown)
                        .collect();
                    if unknown.len() == 1 {
                        if !self.require(unknown[0], false, &mut next) {
                            return None;
                        }
                        progress = true;
                    } else if !next.contains(&node) {
                        next.push(node);
                    }
                }
            }
        }
        *pending = next;
        Some(progress)
    }

    /// First unassigned atom inside an undetermined node, leftmost.
    fn pick_atom(&self, node: usize) -> Option<usize> {
        match &self.g.nodes[node] {
            GNode::Const(_) => None,
            GNode::Lit(a) => (self.assign[*a].is_none()).then_some(*a),
            GNode::Neg(c) => self.pick_atom(*c),
            GNode::Conj(cs) => cs
                .iter()
                .filter(|&&c| self.values[c] == Val::Unknown)
                .find_map(|&c| self.pick_atom(c)),
        }
    }

    fn solve(&mut self, mut pending: Vec<usize>) -> Outcome {
        loop {
            if self.work >= self.budget {
                return Outcome::OutOfBudget;
            }
            self.work += 1;
            self.recompute();
            match self.settle(&mut pending) {
                None => return Outcome::Unsat,
                Some(true) => continue,
                Some(false) => break,
            }
        }
        let Some(&node) = pending.first() else {
            return Outcome::Sat(self.assign.clone());
        };
        let atom = self
            .pick_atom(node)
            .expect("undetermined conjunction must contain an unassigned atom");
        let saved = self.assign.clone();
        for value in [false, true] {
            self.assign = saved.clone();
            self.assign[atom] = Some(value);
            match self.solve(pending.clone()) {
                Outcome::Unsat => continue,
                other => return other,
            }
        }
        Outcome::Unsat
    }
}

/// Propagation-based satisfiability over a fixed frame. Same contract as
/// [`super::satisfiable_in_frame`]; `budget` caps branch decisions.
pub fn satisfiable_in_frame_grounded(
    df: &DeltaFrame,
    f: &Formula,
    budget: u64,
) -> Result<Option<(Model, World)>, SemanticsError> {
    let mut grounder = Grounder::new(df, f);
    let worlds = grounder.worlds.clone();
    let mut spent: u64 = 0;
    for (wi, w) in worlds.iter().enumerate() {
        let root = grounder.ground(grounder.root_node, wi);
        let mut solver = Solver {
            g: &grounder.g,
            assign: vec![None; grounder.g.atoms.len()],
            values: vec![Val::Unknown; grounder.g.nodes.len()],
            work: 0,
            budget: budget.saturating_sub(spent),
        };
        let mut pending = Vec::new();
        if !solver.require(root, true, &mut pending) {
            continue;
        }
        let outcome = solver.solve(pending);
        spent += solver.work;
        match outcome {
            Outcome::Sat(assign) => {
                let mut valuation: BTreeMap<String, BTreeSet<World>> = grounder
                    .vars
                    .iter()
                    .map(|v| (v.clone(), BTreeSet::new()))
                    .collect();
                for (atom, value) in assign.iter().enumerate() {
                    if *value == Some(true) {
                        let (vi, wi) = grounder.g.atoms[atom];
                        valuation
                            .get_mut(&grounder.vars[vi])
                            .unwrap()
                            .insert(worlds[wi].clone());
                    }
                }
                let model = Model::new(df.clone(), valuation)?;
                debug_assert!(model.check_at(w, f).unwrap());
                return Ok(Some((model, w.clone())));
            }
            Outcome::Unsat => {}
            Outcome::OutOfBudget => {
                return Err(SemanticsError::BudgetExhausted { enumerated: spent })
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{delta_product, Frame};
    use crate::semantics::satisfiable_in_frame;
    use proptest::prelude::*;

    fn num(n: u64) -> World {
        World::Num(n)
    }

    #[test]
    fn agrees_on_simple_cases() {
        let df = DeltaFrame::new(
            [num(0), num(1)],
            [(num(0), num(1))],
            [],
            [num(1)],
        )
        .unwrap();
        for text in [
            "P & [h]~P",
            "P & ~P",
            "<h> diag",
            "diag",
            "[h] false",
            "P <-> ~Q",
        ] {
            let f = Formula::parse(text).unwrap();
            let naive = satisfiable_in_frame(&df, &f, 1 << 16).unwrap();
            let fast = satisfiable_in_frame_grounded(&df, &f, 1 << 16).unwrap();
            assert_eq!(naive.is_some(), fast.is_some(), "mismatch on {text}");
            if let Some((m, w)) = fast {
                assert!(m.check_at(&w, &f).unwrap());
            }
        }
    }

    fn arb_small_frame() -> impl Strategy<Value = DeltaFrame> {
        (1usize..=3, any::<u16>(), any::<u16>(), any::<u8>()).prop_map(|(n, rh, rv, diag)| {
            let worlds: Vec<World> = (0..n as u64).map(World::Num).collect();
            let mut hedges = Vec::new();
            let mut vedges = Vec::new();
            let mut dset = Vec::new();
            let mut bit = 0;
            for a in 0..n {
                for b in 0..n {
                    if rh >> bit & 1 == 1 {
                        hedges.push((worlds[a].clone(), worlds[b].clone()));
                    }
                    if rv >> bit & 1 == 1 {
                        vedges.push((worlds[a].clone(), worlds[b].clone()));
                    }
                    bit += 1;
                }
            }
            for (a, w) in worlds.iter().enumerate() {
                if diag >> a & 1 == 1 {
                    dset.push(w.clone());
                }
            }
            DeltaFrame::new(worlds, hedges, vedges, dset).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn grounded_agrees_with_enumeration(
            df in arb_small_frame(),
            f in crate::formula::tests::arb_formula(4),
        ) {
            let naive = satisfiable_in_frame(&df, &f, 1 << 20);
            let fast = satisfiable_in_frame_grounded(&df, &f, 1 << 20);
            match (naive, fast) {
                (Ok(a), Ok(b)) => {
                    prop_assert_eq!(a.is_some(), b.is_some());
                    if let Some((m, w)) = b {
                        prop_assert!(m.check_at(&w, &f).unwrap());
                    }
                }
                (a, b) => prop_assert!(false, "unexpected outcomes {a:?} / {b:?}"),
            }
        }
    }

    #[test]
    fn handles_spaces_beyond_enumeration() {
        // 9 worlds x 3 variables = 2^27 valuations; propagation settles it.
        let df = delta_product(&Frame::spy_chain(2).unwrap(), &Frame::fan(3).unwrap());
        let f = Formula::parse("A & [h](A -> B) & [v](B -> C) & <h><v>(B | C)").unwrap();
        let hit = satisfiable_in_frame_grounded(&df, &f, 1 << 16).unwrap();
        let (m, w) = hit.expect("satisfiable");
        assert!(m.check_at(&w, &f).unwrap());
    }
}
