//! Builds finite product models that satisfy the finitary encoding from a
//! reliable run, and extracts faulty run pairs back out of satisfying
//! models.
//!
//! The builder is self-verifying: its output is model-checked against the
//! full encoding before being returned, so every placement choice (vertical
//! frame size, stop marker, column coloring) is validated rather than
//! trusted.

use std::collections::{BTreeMap, BTreeSet};

use crate::counter_machine::{
    check_run, run_reliable, Configuration, CounterMachine, Flavor, Instruction, InstructionSeq,
    MachineError, OpKind, Run, StateId,
};
use crate::encodings::{
    self, counter_ierr, counter_lossy, in_ierr, in_lossy, machine_formula, out_ierr, out_lossy,
    state_var, EncodingError, EncodingStyle, FaultFlavor, FRESH_P_VAR, STOP_VAR,
};
use crate::formula::Formula;
use crate::frames::{delta_product, Frame, FrameError, World};
use crate::semantics::{Model, SemanticsError};

/// Which valuation family to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValuationStyle {
    Forward,
    Linear,
}

/// The per-step counter-variable sets of the forward encoding, indexed
/// `[counter][step]` with steps `0..=tau.len()`. Set elements are the
/// vertical coordinates carrying the counter variable at that column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForwardValuations {
    pub steps: usize,
    pub counters: usize,
    pub mu_lossy: Vec<Vec<BTreeSet<u64>>>,
    pub mu_ierr: Vec<Vec<BTreeSet<u64>>>,
    /// Positions `n` with a decrement of counter `i` at step `n+1`,
    /// ascending.
    pub dec_positions: Vec<Vec<u64>>,
    /// Positions `n` with an increment of counter `i` at step `n+1`.
    pub inc_positions: Vec<Vec<u64>>,
}

/// The In/Out counter-variable sets of the linear encoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearValuations {
    pub steps: usize,
    pub counters: usize,
    pub in_lossy: Vec<Vec<BTreeSet<u64>>>,
    pub out_lossy: Vec<Vec<BTreeSet<u64>>>,
    pub in_ierr: Vec<Vec<BTreeSet<u64>>>,
    pub out_ierr: Vec<Vec<BTreeSet<u64>>>,
    pub dec_positions: Vec<Vec<u64>>,
    pub inc_positions: Vec<Vec<u64>>,
}

impl LinearValuations {
    /// The set representing counter `i` at step `n` during the lossy run.
    pub fn delta_lossy(&self, i: usize, n: usize) -> BTreeSet<u64> {
        self.in_lossy[i][n]
            .difference(&self.out_lossy[i][n])
            .copied()
            .collect()
    }

    /// The set representing counter `i` at step `n` during the
    /// insertion-error run.
    pub fn delta_ierr(&self, i: usize, n: usize) -> BTreeSet<u64> {
        self.in_ierr[i][n]
            .difference(&self.out_ierr[i][n])
            .copied()
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FaultyValuations {
    Forward(ForwardValuations),
    Linear(LinearValuations),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error("run is not the reliable run of the sequence: {0}")]
    NotTheReliableRun(String),
    #[error("run must take at least one step")]
    EmptyRun,
    #[error("run ends in state {got:?}, expected {want:?}")]
    WrongFinalState { got: StateId, want: StateId },
    #[error("built valuation violates {0}")]
    ValuationInvariant(String),
    #[error("built model falsifies conjunct {index}: {conjunct}")]
    VerificationFailed { index: usize, conjunct: String },
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtractError {
    #[error("world {0} is not in the model")]
    RootMissing(World),
    #[error("root {0} has no pair interpretation")]
    RootNotAPair(World),
    #[error("column {index}: expected at most one horizontal successor, found {found}")]
    AmbiguousColumn { index: usize, found: usize },
    #[error("column {index}: {count} state variables hold, expected exactly one")]
    StatePatternBroken { index: usize, count: usize },
    #[error("step {index}: no instruction of {state:?} matches the do-formulas")]
    NoInstructionMatches { index: usize, state: StateId },
    #[error("extracted {flavor} run fails validation: {reason}")]
    RunInvalid { flavor: &'static str, reason: String },
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// Positions of decrements and increments of each counter, ascending.
fn op_positions(tau: &InstructionSeq, counters: usize) -> (Vec<Vec<u64>>, Vec<Vec<u64>>) {
    let mut dec = vec![Vec::new(); counters];
    let mut inc = vec![Vec::new(); counters];
    for (k, (op, _)) in tau.seq().iter().enumerate() {
        match op.kind {
            OpKind::Dec => dec[op.counter].push(k as u64),
            OpKind::Inc => inc[op.counter].push(k as u64),
            OpKind::Test => {}
        }
    }
    (dec, inc)
}

fn min_not_in(set: &BTreeSet<u64>) -> u64 {
    (0..).find(|n| !set.contains(n)).unwrap()
}

/// Build the per-step valuation sets for a reliable run, following the
/// inductive definitions, and verify their cardinality and ordering
/// invariants before returning.
pub fn build_faulty_valuations(
    m: &CounterMachine,
    tau: &InstructionSeq,
    reliable: &Run,
    style: ValuationStyle,
) -> Result<FaultyValuations, BuildError> {
    let expected =
        run_reliable(m, tau).map_err(|e| BuildError::NotTheReliableRun(e.to_string()))?;
    if reliable.configs != expected.configs {
        return Err(BuildError::NotTheReliableRun(
            "configurations differ from the unique reliable run".into(),
        ));
    }
    let steps = tau.len();
    let n_counters = m.counters;
    let (dec_positions, inc_positions) = op_positions(tau, n_counters);
    for i in 0..n_counters {
        // Reliable runs only decrement non-zero counters, so matching each
        // decrement with an earlier increment is total and order-preserving.
        if dec_positions[i].len() > inc_positions[i].len() {
            return Err(BuildError::ValuationInvariant(format!(
                "counter {i}: more decrements than increments in a reliable run"
            )));
        }
        for (mth, (lam, xi)) in dec_positions[i]
            .iter()
            .zip(inc_positions[i].iter())
            .enumerate()
        {
            if lam <= xi {
                return Err(BuildError::ValuationInvariant(format!(
                    "counter {i}: decrement #{mth} at {lam} does not follow increment at {xi}"
                )));
            }
        }
    }

    // The insertion-error input sets share one recurrence in both styles:
    // each increment inserts the position of the decrement it feeds (or a
    // fresh point if never decremented); forward-style decrements remove
    // the current position again.
    let ierr_in_sets = |i: usize, remove_on_dec: bool| -> Vec<BTreeSet<u64>> {
        let mut sets: Vec<BTreeSet<u64>> = vec![BTreeSet::new()];
        for (n, (op, _)) in tau.seq().iter().enumerate() {
            let mut cur = sets[n].clone();
            if op.counter == i {
                match op.kind {
                    OpKind::Inc => {
                        let m_idx = inc_positions[i]
                            .iter()
                            .position(|&x| x == n as u64)
                            .unwrap();
                        if m_idx < dec_positions[i].len() {
                            cur.insert(dec_positions[i][m_idx]);
                        } else {
                            cur.insert(min_not_in(&cur));
                        }
                    }
                    OpKind::Dec if remove_on_dec => {
                        cur.remove(&(n as u64));
                    }
                    _ => {}
                }
            }
            sets.push(cur);
        }
        sets
    };

    match style {
        ValuationStyle::Forward => {
            let mut mu_lossy = Vec::new();
            let mut mu_ierr = Vec::new();
            for i in 0..n_counters {
                let mut lossy: Vec<BTreeSet<u64>> = vec![BTreeSet::new()];
                for (n, (op, _)) in tau.seq().iter().enumerate() {
                    let mut cur = lossy[n].clone();
                    if op.counter == i {
                        match op.kind {
                            OpKind::Inc => {
                                cur.insert(n as u64);
                            }
                            OpKind::Dec => {
                                let min = *cur.first().ok_or_else(|| {
                                    BuildError::ValuationInvariant(format!(
                                        "counter {i}: decrement of an empty set at step {}",
                                        n + 1
                                    ))
                                })?;
                                cur.remove(&min);
                            }
                            OpKind::Test => {}
                        }
                    }
                    lossy.push(cur);
                }
                let ierr = ierr_in_sets(i, true);
                // Decrements may only remove previously inserted points.
                for (n, (op, _)) in tau.seq().iter().enumerate() {
                    if op.kind == OpKind::Dec
                        && op.counter == i
                        && !ierr[n].contains(&(n as u64))
                    {
                        return Err(BuildError::ValuationInvariant(format!(
                            "counter {i}: point {n} missing before its decrement"
                        )));
                    }
                }
                for n in 0..=steps {
                    let c = expected.configs[n].counters[i] as usize;
                    if lossy[n].len() != c || ierr[n].len() != c {
                        return Err(BuildError::ValuationInvariant(format!(
                            "counter {i} step {n}: set sizes {} / {} differ from counter {c}",
                            lossy[n].len(),
                            ierr[n].len()
                        )));
                    }
                }
                mu_lossy.push(lossy);
                mu_ierr.push(ierr);
            }
            Ok(FaultyValuations::Forward(ForwardValuations {
                steps,
                counters: n_counters,
                mu_lossy,
                mu_ierr,
                dec_positions,
                inc_positions,
            }))
        }
        ValuationStyle::Linear => {
            let mut in_lossy_sets = Vec::new();
            let mut out_lossy_sets = Vec::new();
            let mut in_ierr_sets = Vec::new();
            let mut out_ierr_sets = Vec::new();
            for i in 0..n_counters {
                let mut ins: Vec<BTreeSet<u64>> = vec![BTreeSet::new()];
                let mut outs: Vec<BTreeSet<u64>> = vec![BTreeSet::new()];
                let mut outs_ierr: Vec<BTreeSet<u64>> = vec![BTreeSet::new()];
                for (n, (op, _)) in tau.seq().iter().enumerate() {
                    let mut in_cur = ins[n].clone();
                    let mut out_cur = outs[n].clone();
                    let mut out_ierr_cur = outs_ierr[n].clone();
                    if op.counter == i {
                        match op.kind {
                            OpKind::Inc => {
                                in_cur.insert(n as u64);
                            }
                            OpKind::Dec => {
                                let oldest = in_cur
                                    .difference(&out_cur)
                                    .next()
                                    .copied()
                                    .ok_or_else(|| {
                                        BuildError::ValuationInvariant(format!(
                                            "counter {i}: decrement with no live input at step {}",
                                            n + 1
                                        ))
                                    })?;
                                out_cur.insert(oldest);
                                out_ierr_cur.insert(n as u64);
                            }
                            OpKind::Test => {}
                        }
                    }
                    ins.push(in_cur);
                    outs.push(out_cur);
                    outs_ierr.push(out_ierr_cur);
                }
                let ierr_in = ierr_in_sets(i, false);
                for n in 0..=steps {
                    let c = expected.configs[n].counters[i] as usize;
                    let live_lossy = ins[n].difference(&outs[n]).count();
                    let live_ierr = ierr_in[n].difference(&outs_ierr[n]).count();
                    if live_lossy != c || live_ierr != c {
                        return Err(BuildError::ValuationInvariant(format!(
                            "counter {i} step {n}: live sets {live_lossy} / {live_ierr} differ from counter {c}"
                        )));
                    }
                }
                in_lossy_sets.push(ins);
                out_lossy_sets.push(outs);
                in_ierr_sets.push(ierr_in);
                out_ierr_sets.push(outs_ierr);
            }
            Ok(FaultyValuations::Linear(LinearValuations {
                steps,
                counters: n_counters,
                in_lossy: in_lossy_sets,
                out_lossy: out_lossy_sets,
                in_ierr: in_ierr_sets,
                out_ierr: out_ierr_sets,
                dec_positions,
                inc_positions,
            }))
        }
    }
}

/// One violation message per broken counting claim; empty means every
/// fix/inc/dec/test relation holds between consecutive steps.
pub fn counting_claim_violations(vals: &FaultyValuations, tau: &InstructionSeq) -> Vec<String> {
    let mut out = Vec::new();
    let (steps, counters) = match vals {
        FaultyValuations::Forward(v) => (v.steps, v.counters),
        FaultyValuations::Linear(v) => (v.steps, v.counters),
    };
    assert_eq!(steps, tau.len());
    let set = |lossy: bool, i: usize, n: usize| -> BTreeSet<u64> {
        match vals {
            FaultyValuations::Forward(v) => {
                if lossy {
                    v.mu_lossy[i][n].clone()
                } else {
                    v.mu_ierr[i][n].clone()
                }
            }
            FaultyValuations::Linear(v) => {
                if lossy {
                    v.delta_lossy(i, n)
                } else {
                    v.delta_ierr(i, n)
                }
            }
        }
    };
    for (n, (op, _)) in tau.seq().iter().enumerate() {
        let col = n as u64;
        for i in 0..counters {
            let lo_then = set(true, i, n);
            let lo_next = set(true, i, n + 1);
            let hi_then = set(false, i, n);
            let hi_next = set(false, i, n + 1);
            if op.counter != i {
                // fix: lossy sets shrink, insertion-error sets grow.
                if !lo_next.is_subset(&lo_then) {
                    out.push(format!("step {n} counter {i}: lossy fix not decreasing"));
                }
                if !hi_next.is_superset(&hi_then) {
                    out.push(format!("step {n} counter {i}: ierr fix not increasing"));
                }
                continue;
            }
            match op.kind {
                OpKind::Inc => {
                    let mut allowed = lo_then.clone();
                    allowed.insert(col);
                    if !lo_next.is_subset(&allowed) {
                        out.push(format!(
                            "step {n} counter {i}: lossy inc adds a foreign point"
                        ));
                    }
                    let fresh: BTreeSet<u64> = hi_next.difference(&hi_then).copied().collect();
                    if !hi_next.is_superset(&hi_then) || fresh.is_empty() {
                        out.push(format!(
                            "step {n} counter {i}: ierr inc lacks a fresh point"
                        ));
                    }
                }
                OpKind::Dec => {
                    if !lo_next.is_subset(&lo_then) || lo_then.difference(&lo_next).count() == 0 {
                        out.push(format!("step {n} counter {i}: lossy dec removes nothing"));
                    }
                    let mut keep = hi_then.clone();
                    keep.remove(&col);
                    if !hi_next.is_superset(&keep) {
                        out.push(format!("step {n} counter {i}: ierr dec loses a kept point"));
                    }
                }
                OpKind::Test => {
                    if !lo_next.is_empty() {
                        out.push(format!("step {n} counter {i}: lossy test leaves points"));
                    }
                    if !hi_then.is_empty() {
                        out.push(format!("step {n} counter {i}: ierr test on nonempty set"));
                    }
                }
            }
        }
    }
    out
}

/// A verified model of the finitary encoding at the spy-point, built over
/// `spy_chain(k+1) x fan(k+1)` from a reliable run of `k` steps ending in
/// `q_fin` (which should be a halting state). The designated world is
/// `(spy, 0)`.
pub fn build_finitary_model(
    m: &CounterMachine,
    tau: &InstructionSeq,
    reliable: &Run,
    q_fin: &StateId,
) -> Result<(Model, World), BuildError> {
    let k = tau.len() as u64;
    if k == 0 {
        return Err(BuildError::EmptyRun);
    }
    if reliable.last().state != *q_fin {
        return Err(BuildError::WrongFinalState {
            got: reliable.last().state.clone(),
            want: q_fin.clone(),
        });
    }
    let FaultyValuations::Forward(vals) =
        build_faulty_valuations(m, tau, reliable, ValuationStyle::Forward)?
    else {
        unreachable!()
    };

    let horizontal = Frame::spy_chain(k + 1)?;
    let vertical = Frame::fan(k + 1)?;
    let df = delta_product(&horizontal, &vertical);
    let spy = Frame::spy_of_chain(k + 1);
    let designated = World::pair(spy, World::Num(0));

    let pair = |n: u64, v: u64| World::pair(World::Num(n), World::Num(v));
    let mut valuation: BTreeMap<String, BTreeSet<World>> = BTreeMap::new();
    for (n, config) in reliable.configs.iter().enumerate() {
        valuation
            .entry(state_var(&config.state))
            .or_default()
            .insert(pair(n as u64, 0));
    }
    for q in &m.states {
        valuation.entry(state_var(q)).or_default();
    }
    for i in 0..m.counters {
        let lossy: BTreeSet<World> = (0..=k)
            .flat_map(|n| vals.mu_lossy[i][n as usize].iter().map(move |&v| pair(n, v)))
            .collect();
        let ierr: BTreeSet<World> = (0..=k)
            .flat_map(|n| vals.mu_ierr[i][n as usize].iter().map(move |&v| pair(n, v)))
            .collect();
        valuation.insert(counter_lossy(i), lossy);
        valuation.insert(counter_ierr(i), ierr);
    }
    // The stop marker sits on the last column only, so exactly that column
    // satisfies "some vertical successor stops".
    valuation.insert(STOP_VAR.to_string(), BTreeSet::from([pair(k, k)]));
    // Column-distinctness coloring: true strictly below the diagonal, which
    // makes the coloring grow by one row per column.
    let coloring: BTreeSet<World> = (0..=k)
        .flat_map(|n| (0..n).map(move |v| pair(n, v)))
        .collect();
    valuation.insert(FRESH_P_VAR.to_string(), coloring);

    let model = Model::new(df, valuation)?;
    let style = EncodingStyle::Finitary {
        q_fin: q_fin.clone(),
    };
    let target = Formula::and(encodings::grid_formula(&style), machine_formula(m, &style)?);
    for (index, conjunct) in target.top_level_conjuncts().iter().enumerate() {
        if !model.check_at(&designated, conjunct)? {
            return Err(BuildError::VerificationFailed {
                index,
                conjunct: conjunct.render(),
            });
        }
    }
    Ok((model, designated))
}

/// Which variable family to read off a model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtractionStyle {
    Forward,
    Linear,
}

/// Runs read back from a satisfying model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtractedRuns {
    pub tau: InstructionSeq,
    pub lossy: Run,
    pub ierr: Run,
    /// The column sequence used, as component world ids.
    pub columns: Vec<World>,
    /// Witness sets per counter and step backing the counter values.
    pub on_sets_lossy: Vec<Vec<BTreeSet<World>>>,
    pub on_sets_ierr: Vec<Vec<BTreeSet<World>>>,
    /// Steps at which several instructions matched; the first in
    /// instruction order was taken.
    pub ambiguous_steps: Vec<usize>,
}

/// Read the instruction sequence and the two faulty runs off a model of the
/// forward/finitary (or linear) encoding rooted at `root`. Columns are
/// discovered by following unique horizontal successors unless given.
pub fn extract_runs(
    model: &Model,
    m: &CounterMachine,
    root: &World,
    columns: Option<Vec<World>>,
    style: ExtractionStyle,
) -> Result<ExtractedRuns, ExtractError> {
    let frame = model.frame();
    if !frame.contains(root) {
        return Err(ExtractError::RootMissing(root.clone()));
    }
    let (root_h, root_v) = root
        .as_pair()
        .map(|(h, v)| (h.clone(), v.clone()))
        .ok_or_else(|| ExtractError::RootNotAPair(root.clone()))?;

    let columns: Vec<World> = match columns {
        Some(cols) => cols,
        None => {
            let mut cols = vec![root_v.clone()];
            loop {
                let at = World::pair(cols.last().unwrap().clone(), root_v.clone());
                if !frame.contains(&at) {
                    break;
                }
                let succ: Vec<&World> = frame.succ_h(&at).collect();
                match succ.len() {
                    0 => break,
                    1 => {
                        let (h, _) = succ[0].as_pair().unwrap();
                        cols.push(h.clone());
                    }
                    found => {
                        return Err(ExtractError::AmbiguousColumn {
                            index: cols.len(),
                            found,
                        })
                    }
                }
            }
            cols
        }
    };
    let b = columns.len() - 1;

    // Vertical region: the reflexive closure of the root row's successors.
    let x0 = columns[0].clone();
    let mut region: Vec<World> = vec![x0.clone()];
    let row_probe = World::pair(root_h.clone(), x0.clone());
    if frame.contains(&row_probe) {
        for w in frame.succ_v(&row_probe) {
            let (_, v) = w.as_pair().unwrap();
            if *v != x0 {
                region.push(v.clone());
            }
        }
    }

    // States per column from the S_q pattern.
    let mut states: Vec<StateId> = Vec::new();
    for (n, col) in columns.iter().enumerate() {
        let at = match style {
            ExtractionStyle::Forward => World::pair(col.clone(), x0.clone()),
            ExtractionStyle::Linear => World::pair(col.clone(), col.clone()),
        };
        let holding: Vec<&StateId> = m
            .states
            .iter()
            .filter(|q| model.holds_var(&state_var(q), &at))
            .collect();
        if holding.len() != 1 {
            return Err(ExtractError::StatePatternBroken {
                index: n,
                count: holding.len(),
            });
        }
        states.push(holding[0].clone());
    }

    // Instructions from the do-formula disjuncts.
    let enc_style = match style {
        ExtractionStyle::Forward => EncodingStyle::Forward,
        ExtractionStyle::Linear => EncodingStyle::Linear { q_r: None },
    };
    let mut tau_steps: Vec<Instruction> = Vec::new();
    let mut ambiguous_steps = Vec::new();
    for n in 1..=b {
        let prev = &states[n - 1];
        let at = World::pair(columns[n - 1].clone(), x0.clone());
        let mut matches: Vec<Instruction> = Vec::new();
        for instr @ (op, q2) in m.instr(prev) {
            if *q2 != states[n] {
                continue;
            }
            let lossy_ok = model
                .check_at(
                    &at,
                    &encodings::do_formula(*op, m.counters, FaultFlavor::Lossy, &enc_style),
                )
                .unwrap_or(false);
            let ierr_ok = model
                .check_at(
                    &at,
                    &encodings::do_formula(
                        *op,
                        m.counters,
                        FaultFlavor::InsertionError,
                        &enc_style,
                    ),
                )
                .unwrap_or(false);
            if lossy_ok && ierr_ok {
                matches.push(instr.clone());
            }
        }
        match matches.len() {
            0 => {
                return Err(ExtractError::NoInstructionMatches {
                    index: n,
                    state: prev.clone(),
                })
            }
            1 => {}
            _ => ambiguous_steps.push(n),
        }
        tau_steps.push(matches.into_iter().next().unwrap());
    }
    let tau = InstructionSeq::new(tau_steps);

    // Counter values as witness-set sizes.
    let on_set = |col: &World, var_true: &str, var_false: Option<&str>| -> BTreeSet<World> {
        region
            .iter()
            .filter(|w| {
                let at = World::pair(col.clone(), (*w).clone());
                model.holds_var(var_true, &at)
                    && var_false.is_none_or(|v| !model.holds_var(v, &at))
            })
            .cloned()
            .collect()
    };
    let mut on_sets_lossy = vec![Vec::new(); m.counters];
    let mut on_sets_ierr = vec![Vec::new(); m.counters];
    for i in 0..m.counters {
        for col in &columns {
            let (lo, hi) = match style {
                ExtractionStyle::Forward => (
                    on_set(col, &counter_lossy(i), None),
                    on_set(col, &counter_ierr(i), None),
                ),
                ExtractionStyle::Linear => (
                    on_set(col, &in_lossy(i), Some(&out_lossy(i))),
                    on_set(col, &in_ierr(i), Some(&out_ierr(i))),
                ),
            };
            on_sets_lossy[i].push(lo);
            on_sets_ierr[i].push(hi);
        }
    }
    let run_of = |flavor: Flavor, sets: &[Vec<BTreeSet<World>>]| Run {
        flavor,
        configs: (0..=b)
            .map(|n| Configuration {
                state: states[n].clone(),
                counters: (0..m.counters).map(|i| sets[i][n].len() as u64).collect(),
            })
            .collect(),
    };
    let lossy = run_of(Flavor::Lossy, &on_sets_lossy);
    let ierr = run_of(Flavor::InsertionError, &on_sets_ierr);
    for (flavor, run, name) in [
        (Flavor::Lossy, &lossy, "lossy"),
        (Flavor::InsertionError, &ierr, "insertion-error"),
    ] {
        check_run(flavor, m, &tau, run).map_err(|e| ExtractError::RunInvalid {
            flavor: name,
            reason: e.to_string(),
        })?;
    }
    Ok(ExtractedRuns {
        tau,
        lossy,
        ierr,
        columns,
        on_sets_lossy,
        on_sets_ierr,
        ambiguous_steps,
    })
}

/// Check the grid-generation claims on a column sequence: the spy sees every
/// column, the first column is the vertical root and sees the rest, columns
/// chain horizontally, and each link is the unique successor. Returns one
/// message per violation.
pub fn grid_claim_violations(model: &Model, root: &World, columns: &[World]) -> Vec<String> {
    let mut out = Vec::new();
    let Some((root_h, root_v)) = root.as_pair() else {
        return vec!["root has no pair interpretation".into()];
    };
    let frame = model.frame();
    if columns.first() != Some(root_v) {
        out.push("first column differs from the vertical root".into());
    }
    for (n, col) in columns.iter().enumerate() {
        let spy_view = (
            World::pair(root_h.clone(), root_v.clone()),
            World::pair(col.clone(), root_v.clone()),
        );
        if !frame.rh().contains(&spy_view) {
            out.push(format!("column {n} is not seen from the root horizontally"));
        }
        if n > 0 {
            let vertical = (
                World::pair(root_h.clone(), root_v.clone()),
                World::pair(root_h.clone(), col.clone()),
            );
            if !frame.rv().contains(&vertical) {
                out.push(format!("column {n} is not seen from the root vertically"));
            }
            let link = (
                World::pair(columns[n - 1].clone(), root_v.clone()),
                World::pair(col.clone(), root_v.clone()),
            );
            if !frame.rh().contains(&link) {
                out.push(format!("columns {} and {n} are not linked", n - 1));
            }
            let prev = World::pair(columns[n - 1].clone(), root_v.clone());
            if frame.succ_h(&prev).count() != 1 {
                out.push(format!("column {} has several successors", n - 1));
            }
        }
    }
    out
}
