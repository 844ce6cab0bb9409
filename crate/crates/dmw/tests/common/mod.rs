//! Shared deterministic generators for the integration suites. The seed
//! comes from `DMW_SEED` (default fixed), so runs are reproducible.

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use dmw::counter_machine::{CounterMachine, InstructionSeq, OpKind, Operation, StateId};
use dmw::frames::{delta_product, DeltaFrame, Frame, World};
use dmw::{Formula, Model};

pub fn seed() -> u64 {
    std::env::var("DMW_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0x00D1_A600)
}

pub fn rng() -> StdRng {
    StdRng::seed_from_u64(seed())
}

/// A random well-formed machine with up to `max_states` non-halting states
/// plus one halting state, two counters, and 1..=2 instructions per state.
pub fn random_machine(rng: &mut StdRng, max_states: usize, max_instr: usize) -> CounterMachine {
    let live = rng.random_range(1..=max_states);
    let mut states: Vec<StateId> = (0..live).map(|i| format!("q{i}")).collect();
    states.push("qf".to_string());
    let all = states.clone();
    let instructions = states[..live]
        .iter()
        .map(|q| {
            let count = rng.random_range(1..=max_instr);
            let list = (0..count)
                .map(|_| {
                    let kind = match rng.random_range(0..3) {
                        0 => OpKind::Inc,
                        1 => OpKind::Dec,
                        _ => OpKind::Test,
                    };
                    let counter = rng.random_range(0..2);
                    let target = all[rng.random_range(0..all.len())].clone();
                    (Operation { kind, counter }, target)
                })
                .collect();
            (q.clone(), list)
        })
        .collect::<Vec<_>>();
    CounterMachine::new(states, "q0".into(), ["qf".to_string()], 2, instructions)
}

/// All instruction sequences of length 1..=max_len that follow the
/// machine's instruction tables from the initial state.
pub fn consistent_sequences(m: &CounterMachine, max_len: usize) -> Vec<InstructionSeq> {
    let mut out = Vec::new();
    let mut stack: Vec<(StateId, Vec<(Operation, StateId)>)> = vec![(m.init.clone(), Vec::new())];
    while let Some((state, prefix)) = stack.pop() {
        if prefix.len() >= max_len {
            continue;
        }
        for instr in m.instr(&state) {
            let mut next = prefix.clone();
            next.push(instr.clone());
            out.push(InstructionSeq::new(next.clone()));
            stack.push((instr.1.clone(), next));
        }
    }
    out.sort_by_key(|t| (t.len(), format!("{t:?}")));
    out
}

/// All formulas over the primitive connectives with the given atoms and at
/// most `max_nodes` AST nodes.
pub fn all_primitive_formulas(max_nodes: usize, atoms: &[Formula]) -> Vec<Formula> {
    let mut by_size: Vec<Vec<Formula>> = vec![Vec::new(); max_nodes + 1];
    if max_nodes >= 1 {
        by_size[1] = atoms.to_vec();
    }
    for size in 2..=max_nodes {
        let mut layer = Vec::new();
        for child in &by_size[size - 1] {
            layer.push(Formula::not(child.clone()));
            layer.push(Formula::box_h(child.clone()));
            layer.push(Formula::box_v(child.clone()));
        }
        for left_size in 1..size - 1 {
            let right_size = size - 1 - left_size;
            for left in &by_size[left_size] {
                for right in &by_size[right_size] {
                    layer.push(Formula::and(left.clone(), right.clone()));
                }
            }
        }
        by_size[size] = layer;
    }
    by_size.into_iter().flatten().collect()
}

/// Random formula over the full connective set with bounded modal depths.
pub fn random_formula_with_depths(
    rng: &mut StdRng,
    max_nodes: usize,
    vars: &[&str],
    max_hd: usize,
    max_vd: usize,
) -> Formula {
    loop {
        let f = random_formula(rng, max_nodes, vars);
        let m = f.metrics();
        if m.horizontal_depth <= max_hd && m.vertical_depth <= max_vd {
            return f;
        }
    }
}

pub fn random_formula(rng: &mut StdRng, max_nodes: usize, vars: &[&str]) -> Formula {
    if max_nodes <= 1 {
        return match rng.random_range(0..=vars.len()) {
            0 => Formula::Diag,
            i => Formula::var(vars[i - 1]),
        };
    }
    match rng.random_range(0..12) {
        0 => Formula::not(random_formula(rng, max_nodes - 1, vars)),
        1 => Formula::box_h(random_formula(rng, max_nodes - 1, vars)),
        2 => Formula::box_v(random_formula(rng, max_nodes - 1, vars)),
        3 => Formula::dia_h(random_formula(rng, max_nodes - 1, vars)),
        4 => Formula::dia_v(random_formula(rng, max_nodes - 1, vars)),
        5 => Formula::box_h_plus(random_formula(rng, max_nodes - 1, vars)),
        6 => Formula::dia_v_plus(random_formula(rng, max_nodes - 1, vars)),
        k => {
            let budget = max_nodes - 1;
            let left = rng.random_range(1..=budget.max(2) - 1);
            let l = random_formula(rng, left, vars);
            let r = random_formula(rng, budget - left, vars);
            match k {
                7 | 8 => Formula::and(l, r),
                9 => Formula::or(l, r),
                10 => Formula::implies(l, r),
                _ => Formula::iff(l, r),
            }
        }
    }
}

/// A random frame on `count` worlds with ids starting at `base`; when
/// `max_out` is given, each world keeps at most that many successors.
pub fn random_frame(rng: &mut StdRng, base: u64, count: u64, max_out: Option<usize>) -> Frame {
    let worlds: Vec<World> = (base..base + count).map(World::Num).collect();
    let mut edges = Vec::new();
    for a in &worlds {
        let mut succ: Vec<&World> = Vec::new();
        for b in &worlds {
            if rng.random_bool(0.4) {
                succ.push(b);
            }
        }
        if let Some(cap) = max_out {
            while succ.len() > cap {
                let drop = rng.random_range(0..succ.len());
                succ.remove(drop);
            }
        }
        edges.extend(succ.into_iter().map(|b| (a.clone(), b.clone())));
    }
    Frame::new(worlds, edges).unwrap()
}

/// A random product model over a shared universe with a random overlap, a
/// random valuation of `vars`, and a random root world.
pub fn random_product_model(
    rng: &mut StdRng,
    h_max: u64,
    v_max: u64,
    v_out_cap: Option<usize>,
    vars: &[&str],
) -> (Model, World) {
    let a = rng.random_range(1..=h_max);
    let b = rng.random_range(1..=v_max);
    let overlap = rng.random_range(0..=a.min(b));
    let fh = random_frame(rng, 0, a, None);
    let fv = random_frame(rng, a - overlap, b, v_out_cap);
    let df = delta_product(&fh, &fv);
    let model = random_valuation_on(rng, df, vars);
    let worlds: Vec<World> = model.frame().worlds().iter().cloned().collect();
    let root = worlds[rng.random_range(0..worlds.len())].clone();
    (model, root)
}

pub fn random_valuation_on(rng: &mut StdRng, df: DeltaFrame, vars: &[&str]) -> Model {
    let worlds: Vec<World> = df.worlds().iter().cloned().collect();
    let valuation: Vec<(String, BTreeSet<World>)> = vars
        .iter()
        .map(|v| {
            let set: BTreeSet<World> = worlds
                .iter()
                .filter(|_| rng.random_bool(0.5))
                .cloned()
                .collect();
            (v.to_string(), set)
        })
        .collect();
    Model::new(df, valuation).unwrap()
}
