//! Satisfiability for delta-products with a bounded-branching vertical
//! component, a brute-force enumeration oracle, and the selective filtration
//! operation.
//!
//! Two independent routes answer the same question:
//!
//! - [`brute_force_sat`] enumerates component frames over a shared universe
//!   outright, in lexicographic bitset order, with a flat bitmask evaluator.
//! - [`decide_sat`] enumerates only filtration-shaped candidates (components
//!   spanned from some root within the formula's modal depths) and runs the
//!   propagation-based per-frame search from [`crate::semantics`] on each.
//!
//! Agreement between the two on exhaustively generated corpora is part of
//! the acceptance suite; every `Sat` witness re-verifies through
//! [`Model::check_at`].

use std::collections::{BTreeMap, BTreeSet};

use crate::formula::Formula;
use crate::frames::{delta_product, DeltaFrame, Frame, FrameError, World};
use crate::semantics::{satisfiable_in_frame_grounded, Model, SemanticsError};

/// Frame class of one product component.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComponentClass {
    /// All frames.
    K,
    /// Universal frames.
    S5,
    /// Out-degree at most `n`.
    Alt(u32),
    /// Serial with out-degree at most `n`.
    DAlt(u32),
}

impl ComponentClass {
    pub fn accepts(&self, frame: &Frame) -> bool {
        match self {
            ComponentClass::K => true,
            ComponentClass::S5 => frame.properties().universal,
            ComponentClass::Alt(n) => frame.is_alt(*n as usize),
            ComponentClass::DAlt(n) => frame.is_alt(*n as usize) && frame.properties().serial,
        }
    }

    fn parse(text: &str) -> Option<ComponentClass> {
        if text == "K" {
            return Some(ComponentClass::K);
        }
        if text == "S5" {
            return Some(ComponentClass::S5);
        }
        if let Some(n) = text.strip_prefix("Alt:") {
            return n.parse().ok().map(ComponentClass::Alt);
        }
        if let Some(n) = text.strip_prefix("DAlt:") {
            return n.parse().ok().map(ComponentClass::DAlt);
        }
        None
    }
}

impl std::fmt::Display for ComponentClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ComponentClass::K => write!(f, "K"),
            ComponentClass::S5 => write!(f, "S5"),
            ComponentClass::Alt(n) => write!(f, "Alt:{n}"),
            ComponentClass::DAlt(n) => write!(f, "DAlt:{n}"),
        }
    }
}

/// A product logic: a horizontal class crossed with a bounded-branching
/// vertical class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LogicSpec {
    pub horizontal: ComponentClass,
    pub vertical: ComponentClass,
}

impl LogicSpec {
    pub fn new(
        horizontal: ComponentClass,
        vertical: ComponentClass,
    ) -> Result<LogicSpec, DeciderError> {
        match vertical {
            ComponentClass::Alt(n) | ComponentClass::DAlt(n) if n >= 1 => {}
            other => {
                return Err(DeciderError::BadLogic(format!(
                    "vertical component must be Alt:n or DAlt:n with n >= 1, got {other}"
                )))
            }
        }
        if let ComponentClass::Alt(0) | ComponentClass::DAlt(0) = horizontal {
            return Err(DeciderError::BadLogic(
                "horizontal Alt:n needs n >= 1".into(),
            ));
        }
        Ok(LogicSpec {
            horizontal,
            vertical,
        })
    }

    /// Text form `"<h>x<v>"`, e.g. `"KxAlt:1"` or `"Alt:2xDAlt:1"`.
    pub fn parse(text: &str) -> Result<LogicSpec, DeciderError> {
        let err = || DeciderError::BadLogic(format!("cannot parse logic {text:?}"));
        let (h, v) = text.split_once('x').ok_or_else(err)?;
        LogicSpec::new(
            ComponentClass::parse(h).ok_or_else(err)?,
            ComponentClass::parse(v).ok_or_else(err)?,
        )
    }

    pub fn vertical_branching(&self) -> u32 {
        match self.vertical {
            ComponentClass::Alt(n) | ComponentClass::DAlt(n) => n,
            _ => unreachable!("validated at construction"),
        }
    }
}

impl std::fmt::Display for LogicSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.horizontal, self.vertical)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DeciderError {
    #[error("bad logic: {0}")]
    BadLogic(String),
    #[error("model is not based on a delta-product: {0}")]
    NonProduct(String),
    #[error("root {0} is not in the model")]
    RootMissing(World),
    #[error("exhaustive mode unsupported for {0}")]
    UnsupportedExhaustive(String),
    #[error(
        "filtration bounds ({h_bound}, {v_bound}) exceed the feasibility limit ({h_max}, {v_max})"
    )]
    BoundsOverFeasibility {
        h_bound: u64,
        v_bound: u64,
        h_max: u64,
        v_max: u64,
    },
    #[error("internal verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Frame(#[from] FrameError),
}

/// The per-layer filtration size bounds for a formula under a logic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationBounds {
    /// `vertical_layers[k]` bounds the worlds reachable by k-step vertical
    /// paths: `1 + n + ... + n^k`.
    pub vertical_layers: Vec<u64>,
    /// `horizontal_layers[m]` bounds the m-th horizontal witness layer:
    /// `(max(1, vd * n^vd) * sub)^m`.
    pub horizontal_layers: Vec<u64>,
    /// Bound on the whole vertical component.
    pub vertical_bound: u64,
    /// Bound on the whole horizontal component (sum of the layers).
    pub horizontal_bound: u64,
}

/// Bounds computed from the expanded metrics of `f` and the vertical
/// branching of the logic.
pub fn filtration_bounds(f: &Formula, spec: &LogicSpec) -> FiltrationBounds {
    let metrics = f.metrics();
    let n = spec.vertical_branching() as u64;
    let vd = metrics.vertical_depth as u32;
    let hd = metrics.horizontal_depth as u32;
    let sub = metrics.subformula_count as u64;
    let vertical_layers: Vec<u64> = (0..=vd)
        .scan(0u64, |acc, k| {
            *acc = acc.saturating_add(n.saturating_pow(k));
            Some(*acc)
        })
        .collect();
    let width = (vd as u64)
        .saturating_mul(n.saturating_pow(vd))
        .max(1)
        .saturating_mul(sub);
    let horizontal_layers: Vec<u64> = (0..=hd).map(|m| width.saturating_pow(m)).collect();
    FiltrationBounds {
        vertical_bound: *vertical_layers.last().unwrap(),
        horizontal_bound: horizontal_layers
            .iter()
            .fold(0u64, |a, &b| a.saturating_add(b)),
        vertical_layers,
        horizontal_layers,
    }
}

/// Tight totals actually used by the shaped search: the vertical component
/// of a filtrated model has at most `sum n^k` worlds, and each horizontal
/// layer multiplies by (vertical size x number of distinct horizontal
/// boxes).
fn tight_totals(f: &Formula, n: u64) -> (u64, u64) {
    let expanded = f.expand_derived();
    let vd = expanded.vertical_depth() as u32;
    let hd = expanded.horizontal_depth() as u32;
    let mut subs: BTreeSet<Formula> = BTreeSet::new();
    fn collect(f: &Formula, subs: &mut BTreeSet<Formula>) {
        if subs.insert(f.clone()) {
            for c in f.children() {
                collect(c, subs);
            }
        }
    }
    collect(&expanded, &mut subs);
    let boxes_h = subs
        .iter()
        .filter(|s| matches!(s, Formula::BoxH(_)))
        .count() as u64;
    let v_total: u64 = (0..=vd).fold(0u64, |a, k| a.saturating_add(n.saturating_pow(k)));
    let mut layer = 1u64;
    let mut h_total = 1u64;
    for _ in 0..hd {
        layer = layer
            .saturating_mul(v_total)
            .saturating_mul(boxes_h.max(1));
        h_total = h_total.saturating_add(layer);
    }
    (h_total, v_total)
}

/// Result of a satisfiability search.
#[derive(Clone, Debug)]
pub enum SatResult {
    Sat { model: Model, world: World },
    UnsatWithinBound {
        h_cap: usize,
        v_cap: usize,
        /// When true, the caps cover the filtration bounds, so this is a
        /// genuine "unsatisfiable in the logic".
        exhaustive: bool,
    },
    Unknown { budget_spent: u64 },
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat { .. })
    }

    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::json;
        match self {
            SatResult::Sat { model, world } => json!({
                "outcome": "sat",
                "world": world.to_json(),
                "model": model.to_json(),
            }),
            SatResult::UnsatWithinBound {
                h_cap,
                v_cap,
                exhaustive,
            } => json!({
                "outcome": "unsat-within-bound",
                "hcap": h_cap,
                "vcap": v_cap,
                "exhaustive": exhaustive,
            }),
            SatResult::Unknown { budget_spent } => json!({
                "outcome": "unknown",
                "budget_spent": budget_spent,
            }),
        }
    }
}

/// How the two components may share worlds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OverlapPolicy {
    /// Every overlap size from disjoint to fully shared.
    All,
    /// Components share no worlds (empty diagonal).
    Disjoint,
    /// Maximal sharing (square-like products).
    Shared,
}

impl OverlapPolicy {
    fn choices(&self, a: usize, b: usize) -> Vec<usize> {
        match self {
            OverlapPolicy::All => (0..=a.min(b)).collect(),
            OverlapPolicy::Disjoint => vec![0],
            OverlapPolicy::Shared => vec![a.min(b)],
        }
    }
}

// A candidate product over a shared universe: horizontal worlds are
// 0..a-1, vertical worlds are (a-o)..(a-o+b-1), so exactly `o` of them
// coincide. Successor sets are bitmasks over component indices.
#[derive(Clone, Debug)]
struct Candidate {
    a: usize,
    b: usize,
    o: usize,
    succ_h: Vec<u64>,
    succ_v: Vec<u64>,
}

impl Candidate {
    fn frames(&self) -> (Frame, Frame) {
        let base = (self.a - self.o) as u64;
        let fh = Frame::new(
            (0..self.a as u64).map(World::Num),
            (0..self.a).flat_map(|x| {
                let succ = self.succ_h[x];
                (0..self.a)
                    .filter(move |x2| succ >> x2 & 1 == 1)
                    .map(move |x2| (World::Num(x as u64), World::Num(x2 as u64)))
            }),
        )
        .expect("candidate frames are nonempty and closed");
        let fv = Frame::new(
            (0..self.b as u64).map(|y| World::Num(base + y)),
            (0..self.b).flat_map(|y| {
                let succ = self.succ_v[y];
                (0..self.b)
                    .filter(move |y2| succ >> y2 & 1 == 1)
                    .map(move |y2| (World::Num(base + y as u64), World::Num(base + y2 as u64)))
            }),
        )
        .expect("candidate frames are nonempty and closed");
        (fh, fv)
    }

    fn delta_frame(&self) -> DeltaFrame {
        let (fh, fv) = self.frames();
        delta_product(&fh, &fv)
    }
}

/// Allowed successor-set masks for one world in a component of `size`
/// worlds under the class, ascending (lexicographic bitset order).
fn allowed_successor_sets(class: ComponentClass, size: usize) -> Vec<u64> {
    let all: u64 = (1u64 << size) - 1;
    match class {
        ComponentClass::K => (0..=all).collect(),
        ComponentClass::S5 => vec![all],
        ComponentClass::Alt(n) => (0..=all)
            .filter(|m| m.count_ones() <= n)
            .collect(),
        ComponentClass::DAlt(n) => (0..=all)
            .filter(|m| (1..=n).contains(&m.count_ones()))
            .collect(),
    }
}

/// Iterate successor-set assignments in lexicographic order, invoking the
/// callback until it returns false.
fn for_each_relation(
    allowed: &[u64],
    size: usize,
    mut f: impl FnMut(&[u64]) -> bool,
) -> bool {
    let mut idx = vec![0usize; size];
    loop {
        let sets: Vec<u64> = idx.iter().map(|&i| allowed[i]).collect();
        if !f(&sets) {
            return false;
        }
        let mut pos = 0;
        loop {
            if pos == size {
                return true;
            }
            idx[pos] += 1;
            if idx[pos] < allowed.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

// ---------------------------------------------------------------------
// Brute-force oracle: flat enumeration with a bitmask evaluator.
// ---------------------------------------------------------------------

/// Product structure flattened for mask evaluation. World `x*b + y` is the
/// pair of horizontal index `x` and vertical index `y`.
struct MaskProduct {
    n_worlds: usize,
    succ_h: Vec<u64>,
    succ_v: Vec<u64>,
    diag: u64,
    full: u64,
}

impl MaskProduct {
    fn new(c: &Candidate) -> MaskProduct {
        let n_worlds = c.a * c.b;
        let mut succ_h = vec![0u64; n_worlds];
        let mut succ_v = vec![0u64; n_worlds];
        let mut diag = 0u64;
        for x in 0..c.a {
            for y in 0..c.b {
                let p = x * c.b + y;
                for x2 in 0..c.a {
                    if c.succ_h[x] >> x2 & 1 == 1 {
                        succ_h[p] |= 1 << (x2 * c.b + y);
                    }
                }
                for y2 in 0..c.b {
                    if c.succ_v[y] >> y2 & 1 == 1 {
                        succ_v[p] |= 1 << (x * c.b + y2);
                    }
                }
                // Shared universe: horizontal id x equals vertical id
                // (a-o)+y exactly when x = a-o+y.
                if x == c.a - c.o + y {
                    diag |= 1 << p;
                }
            }
        }
        MaskProduct {
            n_worlds,
            succ_h,
            succ_v,
            diag,
            full: if n_worlds == 64 {
                u64::MAX
            } else {
                (1u64 << n_worlds) - 1
            },
        }
    }

    fn box_mask(&self, succ: &[u64], child: u64) -> u64 {
        let mut out = 0u64;
        for (p, &s) in succ.iter().enumerate().take(self.n_worlds) {
            if s & !child == 0 {
                out |= 1 << p;
            }
        }
        out
    }

    fn dia_mask(&self, succ: &[u64], child: u64) -> u64 {
        let mut out = 0u64;
        for (p, &s) in succ.iter().enumerate().take(self.n_worlds) {
            if s & child != 0 {
                out |= 1 << p;
            }
        }
        out
    }
}

/// A formula compiled to postorder mask instructions with variable indices
/// resolved once, so the valuation inner loop stays allocation-free.
struct EvalProgram {
    ops: Vec<EvalOp>,
}

#[derive(Clone, Copy)]
enum EvalOp {
    Var(usize),
    Diag,
    Bottom,
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
    Iff(usize, usize),
    BoxH(usize),
    BoxV(usize),
    DiaH(usize),
    DiaV(usize),
    BoxHPlus(usize),
    BoxVPlus(usize),
    DiaHPlus(usize),
    DiaVPlus(usize),
}

impl EvalProgram {
    fn compile(f: &Formula, vars: &[String]) -> EvalProgram {
        fn go(f: &Formula, vars: &[String], ops: &mut Vec<EvalOp>) -> usize {
            use Formula::*;
            let op = match f {
                Var(name) => EvalOp::Var(vars.iter().position(|v| v == name).unwrap()),
                Diag => EvalOp::Diag,
                Bottom => EvalOp::Bottom,
                Not(a) => EvalOp::Not(go(a, vars, ops)),
                And(a, b) => EvalOp::And(go(a, vars, ops), go(b, vars, ops)),
                Or(a, b) => EvalOp::Or(go(a, vars, ops), go(b, vars, ops)),
                Implies(a, b) => EvalOp::Implies(go(a, vars, ops), go(b, vars, ops)),
                Iff(a, b) => EvalOp::Iff(go(a, vars, ops), go(b, vars, ops)),
                BoxH(a) => EvalOp::BoxH(go(a, vars, ops)),
                BoxV(a) => EvalOp::BoxV(go(a, vars, ops)),
                DiaH(a) => EvalOp::DiaH(go(a, vars, ops)),
                DiaV(a) => EvalOp::DiaV(go(a, vars, ops)),
                BoxHPlus(a) => EvalOp::BoxHPlus(go(a, vars, ops)),
                BoxVPlus(a) => EvalOp::BoxVPlus(go(a, vars, ops)),
                DiaHPlus(a) => EvalOp::DiaHPlus(go(a, vars, ops)),
                DiaVPlus(a) => EvalOp::DiaVPlus(go(a, vars, ops)),
            };
            ops.push(op);
            ops.len() - 1
        }
        let mut ops = Vec::new();
        go(f, vars, &mut ops);
        EvalProgram { ops }
    }

    /// Mask of worlds where the formula holds.
    fn eval(&self, p: &MaskProduct, masks: &[u64], buf: &mut Vec<u64>) -> u64 {
        buf.clear();
        for op in &self.ops {
            let v = match *op {
                EvalOp::Var(i) => masks[i],
                EvalOp::Diag => p.diag,
                EvalOp::Bottom => 0,
                EvalOp::Not(a) => !buf[a] & p.full,
                EvalOp::And(a, b) => buf[a] & buf[b],
                EvalOp::Or(a, b) => buf[a] | buf[b],
                EvalOp::Implies(a, b) => (!buf[a] | buf[b]) & p.full,
                EvalOp::Iff(a, b) => !(buf[a] ^ buf[b]) & p.full,
                EvalOp::BoxH(a) => p.box_mask(&p.succ_h, buf[a]),
                EvalOp::BoxV(a) => p.box_mask(&p.succ_v, buf[a]),
                EvalOp::DiaH(a) => p.dia_mask(&p.succ_h, buf[a]),
                EvalOp::DiaV(a) => p.dia_mask(&p.succ_v, buf[a]),
                EvalOp::BoxHPlus(a) => buf[a] & p.box_mask(&p.succ_h, buf[a]),
                EvalOp::BoxVPlus(a) => buf[a] & p.box_mask(&p.succ_v, buf[a]),
                EvalOp::DiaHPlus(a) => buf[a] | p.dia_mask(&p.succ_h, buf[a]),
                EvalOp::DiaVPlus(a) => buf[a] | p.dia_mask(&p.succ_v, buf[a]),
            };
            buf.push(v);
        }
        *buf.last().unwrap()
    }
}

/// Exhaustive enumeration of shared-universe products within the caps and
/// of all valuations of the formula's variables, in a fixed order. The
/// first witness wins; exhaustion yields `UnsatWithinBound`, flagged
/// genuine when the caps cover the filtration bounds. `budget` caps
/// (product, valuation) pairs evaluated.
pub fn brute_force_sat(
    f: &Formula,
    spec: &LogicSpec,
    h_cap: usize,
    v_cap: usize,
    overlap: OverlapPolicy,
    budget: u64,
) -> Result<SatResult, DeciderError> {
    let vars: Vec<String> = f.variables().into_iter().collect();
    let program = EvalProgram::compile(f, &vars);
    let mut buf: Vec<u64> = Vec::new();
    let mut spent: u64 = 0;
    for a in 1..=h_cap {
        for b in 1..=v_cap {
            if a * b > 64 {
                continue;
            }
            for o in overlap.choices(a, b) {
                let allowed_h = allowed_successor_sets(spec.horizontal, a);
                let allowed_v = allowed_successor_sets(spec.vertical, b);
                let mut hit: Option<(Candidate, usize, Vec<u64>)> = None;
                let mut out_of_budget = false;
                for_each_relation(&allowed_h, a, |succ_h| {
                    for_each_relation(&allowed_v, b, |succ_v| {
                        let cand = Candidate {
                            a,
                            b,
                            o,
                            succ_h: succ_h.to_vec(),
                            succ_v: succ_v.to_vec(),
                        };
                        let product = MaskProduct::new(&cand);
                        // Valuation odometer over one mask per variable.
                        let mut masks = vec![0u64; vars.len()];
                        loop {
                            if spent >= budget {
                                out_of_budget = true;
                                return false;
                            }
                            spent += 1;
                            let holds = program.eval(&product, &masks, &mut buf);
                            if holds != 0 {
                                let world = holds.trailing_zeros() as usize;
                                hit = Some((cand, world, masks));
                                return false;
                            }
                            let mut vi = 0;
                            loop {
                                if vi == masks.len() {
                                    return true;
                                }
                                masks[vi] += 1;
                                if masks[vi] <= product.full {
                                    break;
                                }
                                masks[vi] = 0;
                                vi += 1;
                            }
                        }
                    })
                });
                if let Some((cand, world, masks)) = hit {
                    return Ok(sat_from_candidate(f, &cand, world, &vars, &masks));
                }
                if out_of_budget {
                    return Ok(SatResult::Unknown {
                        budget_spent: spent,
                    });
                }
            }
        }
    }
    let (h_tight, v_tight) = tight_totals(f, spec.vertical_branching() as u64);
    let exhaustive = matches!(overlap, OverlapPolicy::All)
        && h_cap as u64 >= h_tight
        && v_cap as u64 >= v_tight
        && !matches!(spec.horizontal, ComponentClass::S5);
    Ok(SatResult::UnsatWithinBound {
        h_cap,
        v_cap,
        exhaustive,
    })
}

fn sat_from_candidate(
    f: &Formula,
    cand: &Candidate,
    world: usize,
    vars: &[String],
    masks: &[u64],
) -> SatResult {
    let df = cand.delta_frame();
    let base = (cand.a - cand.o) as u64;
    let world_of = |p: usize| {
        World::pair(
            World::Num((p / cand.b) as u64),
            World::Num(base + (p % cand.b) as u64),
        )
    };
    let valuation: BTreeMap<String, BTreeSet<World>> = vars
        .iter()
        .zip(masks)
        .map(|(var, mask)| {
            (
                var.clone(),
                (0..cand.a * cand.b)
                    .filter(|p| mask >> p & 1 == 1)
                    .map(world_of)
                    .collect(),
            )
        })
        .collect();
    let model = Model::new(df, valuation).expect("candidate valuations stay inside the frame");
    let w = world_of(world);
    debug_assert_eq!(model.check_at(&w, f), Ok(true));
    SatResult::Sat { model, world: w }
}

// ---------------------------------------------------------------------
// Shaped decision procedure.
// ---------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    /// Search up to the filtration bounds; exhaustion is a verdict for the
    /// whole logic. Requires the bounds to fit the feasibility limits.
    Exhaustive,
    /// Search up to the configured caps; exhaustion only rules out
    /// witnesses within the caps unless the caps already cover the bounds.
    Budgeted,
}

#[derive(Clone, Copy, Debug)]
pub struct DeciderParams {
    /// Caps for budgeted mode.
    pub h_cap: usize,
    pub v_cap: usize,
    /// Propagation-branch budget across all candidates.
    pub budget: u64,
    /// Feasibility limits for exhaustive mode.
    pub max_h_bound: u64,
    pub max_v_bound: u64,
    /// Worker threads; candidates are partitioned deterministically and the
    /// first witness in candidate order wins.
    pub jobs: usize,
}

impl Default for DeciderParams {
    fn default() -> DeciderParams {
        DeciderParams {
            h_cap: 3,
            v_cap: 3,
            budget: 1 << 22,
            max_h_bound: 4,
            max_v_bound: 6,
            jobs: 1,
        }
    }
}

/// Whether some world reaches every world within `depth` steps.
fn spanned_within(succ: &[u64], size: usize, depth: usize) -> bool {
    let full: u64 = (1u64 << size) - 1;
    (0..size).any(|root| {
        let mut seen: u64 = 1 << root;
        let mut frontier: u64 = seen;
        for _ in 0..depth {
            let mut next = 0u64;
            for (w, &s) in succ.iter().enumerate().take(size) {
                if frontier >> w & 1 == 1 {
                    next |= s;
                }
            }
            frontier = next & !seen;
            seen |= next;
            if seen == full {
                return true;
            }
        }
        seen == full
    })
}

/// Decide satisfiability in `spec` by layered search over filtration-shaped
/// candidates. Sat witnesses are verified; `UnsatWithinBound` with the
/// exhaustive flag set is a verdict for the logic; budget exhaustion yields
/// `Unknown`, never a wrong verdict.
pub fn decide_sat(
    f: &Formula,
    spec: &LogicSpec,
    mode: SearchMode,
    params: &DeciderParams,
) -> Result<SatResult, DeciderError> {
    let n = spec.vertical_branching() as u64;
    let (h_tight, v_tight) = tight_totals(f, n);
    let (h_cap, v_cap) = match mode {
        SearchMode::Exhaustive => {
            if matches!(spec.horizontal, ComponentClass::S5) {
                return Err(DeciderError::UnsupportedExhaustive(
                    "no filtration bound for an S5 horizontal component; use budgeted mode"
                        .into(),
                ));
            }
            if h_tight > params.max_h_bound || v_tight > params.max_v_bound {
                return Err(DeciderError::BoundsOverFeasibility {
                    h_bound: h_tight,
                    v_bound: v_tight,
                    h_max: params.max_h_bound,
                    v_max: params.max_v_bound,
                });
            }
            (h_tight as usize, v_tight as usize)
        }
        SearchMode::Budgeted => (params.h_cap, params.v_cap),
    };

    let expanded = f.expand_derived();
    let hd = expanded.horizontal_depth();
    let vd = expanded.vertical_depth();

    // Materialize the shaped candidate list: both components spanned from
    // some world within the corresponding modal depth.
    let mut candidates: Vec<Candidate> = Vec::new();
    for size in 2..=(h_cap + v_cap) {
        for a in 1..=h_cap.min(size - 1) {
            let b = size - a;
            if b < 1 || b > v_cap || a * b > 64 {
                continue;
            }
            for o in 0..=a.min(b) {
                let allowed_h = allowed_successor_sets(spec.horizontal, a);
                let allowed_v = allowed_successor_sets(spec.vertical, b);
                for_each_relation(&allowed_h, a, |succ_h| {
                    if !spanned_within(succ_h, a, hd) {
                        return true;
                    }
                    let succ_h = succ_h.to_vec();
                    for_each_relation(&allowed_v, b, |succ_v| {
                        if spanned_within(succ_v, b, vd) {
                            candidates.push(Candidate {
                                a,
                                b,
                                o,
                                succ_h: succ_h.clone(),
                                succ_v: succ_v.to_vec(),
                            });
                        }
                        true
                    });
                    true
                });
            }
        }
    }

    let per_candidate_budget = params.budget / (candidates.len().max(1) as u64);
    let solve = |cand: &Candidate| -> Result<Option<(Model, World)>, SemanticsError> {
        satisfiable_in_frame_grounded(&cand.delta_frame(), f, per_candidate_budget)
    };

    #[derive(Debug)]
    enum CandidateOutcome {
        Sat(Model, World),
        Unsat,
        OutOfBudget(u64),
    }
    let outcomes: Vec<CandidateOutcome> = if params.jobs <= 1 {
        let mut out = Vec::with_capacity(candidates.len());
        for cand in &candidates {
            match solve(cand) {
                Ok(Some((model, world))) => {
                    out.push(CandidateOutcome::Sat(model, world));
                    break;
                }
                Ok(None) => out.push(CandidateOutcome::Unsat),
                Err(SemanticsError::BudgetExhausted { enumerated }) => {
                    out.push(CandidateOutcome::OutOfBudget(enumerated));
                    break;
                }
                Err(e) => return Err(e.into()),
            }
        }
        out
    } else {
        let chunk = candidates.len().div_ceil(params.jobs).max(1);
        let results: Vec<Result<Vec<CandidateOutcome>, SemanticsError>> =
            std::thread::scope(|scope| {
                let handles: Vec<_> = candidates
                    .chunks(chunk)
                    .map(|part| {
                        scope.spawn(move || {
                            let mut local = Vec::with_capacity(part.len());
                            for cand in part {
                                match solve(cand) {
                                    Ok(Some((m, w))) => {
                                        local.push(CandidateOutcome::Sat(m, w));
                                        break;
                                    }
                                    Ok(None) => local.push(CandidateOutcome::Unsat),
                                    Err(SemanticsError::BudgetExhausted { enumerated }) => {
                                        local.push(CandidateOutcome::OutOfBudget(enumerated));
                                        break;
                                    }
                                    Err(e) => return Err(e),
                                }
                            }
                            Ok(local)
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("worker panicked"))
                    .collect()
            });
        let mut flat = Vec::new();
        for r in results {
            flat.extend(r?);
        }
        flat
    };

    // First witness in candidate order wins; a budget hole before it makes
    // the verdict unknown.
    for (index, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            CandidateOutcome::Sat(model, world) => {
                if model.check_at(&world, f) != Ok(true) {
                    return Err(DeciderError::Verification(
                        "witness fails the reference model check".into(),
                    ));
                }
                return Ok(SatResult::Sat { model, world });
            }
            CandidateOutcome::Unsat => {}
            CandidateOutcome::OutOfBudget(spent) => {
                return Ok(SatResult::Unknown {
                    budget_spent: index as u64 + spent,
                })
            }
        }
    }
    let exhaustive = h_cap as u64 >= h_tight && v_cap as u64 >= v_tight;
    Ok(SatResult::UnsatWithinBound {
        h_cap,
        v_cap,
        exhaustive,
    })
}

// ---------------------------------------------------------------------
// Selective filtration.
// ---------------------------------------------------------------------

#[derive(Clone, Copy, Debug, Default)]
pub struct FiltrationOptions {
    /// Serial-logic variant: give dead-end points of the filtrated
    /// components a reflexive loop.
    pub make_final_reflexive: bool,
}

/// Sizes of the layers actually kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationStats {
    pub u_v_sizes: Vec<usize>,
    pub u_h_sizes: Vec<usize>,
}

type Components = (
    BTreeSet<World>,
    BTreeSet<World>,
    BTreeSet<(World, World)>,
    BTreeSet<(World, World)>,
);

/// Decompose a product-model frame into its components, verifying product
/// shape and an identity diagonal.
fn decompose_product(frame: &DeltaFrame) -> Result<Components, DeciderError> {
    let mut wh = BTreeSet::new();
    let mut wv = BTreeSet::new();
    for w in frame.worlds() {
        let (h, v) = w
            .as_pair()
            .ok_or_else(|| DeciderError::NonProduct(format!("world {w} is not a pair")))?;
        wh.insert(h.clone());
        wv.insert(v.clone());
    }
    if wh.len() * wv.len() != frame.worlds().len() {
        return Err(DeciderError::NonProduct(
            "worlds do not form a full Cartesian product".into(),
        ));
    }
    let mut rh = BTreeSet::new();
    for ((x, y), (x2, y2)) in frame
        .rh()
        .iter()
        .map(|(p, q)| (p.as_pair().unwrap(), q.as_pair().unwrap()))
    {
        if y != y2 {
            return Err(DeciderError::NonProduct(
                "horizontal edge moves the vertical coordinate".into(),
            ));
        }
        rh.insert((x.clone(), x2.clone()));
    }
    if rh.len() * wv.len() != frame.rh().len() {
        return Err(DeciderError::NonProduct(
            "horizontal edges are not uniform across rows".into(),
        ));
    }
    let mut rv = BTreeSet::new();
    for ((x, y), (x2, y2)) in frame
        .rv()
        .iter()
        .map(|(p, q)| (p.as_pair().unwrap(), q.as_pair().unwrap()))
    {
        if x != x2 {
            return Err(DeciderError::NonProduct(
                "vertical edge moves the horizontal coordinate".into(),
            ));
        }
        rv.insert((y.clone(), y2.clone()));
    }
    if rv.len() * wh.len() != frame.rv().len() {
        return Err(DeciderError::NonProduct(
            "vertical edges are not uniform across columns".into(),
        ));
    }
    for d in frame.diag() {
        let (h, v) = d.as_pair().unwrap();
        if h != v {
            return Err(DeciderError::NonProduct(format!(
                "diagonal world {d} is not of the form (x,x)"
            )));
        }
    }
    for x in wh.intersection(&wv) {
        if !frame.diag().contains(&World::pair(x.clone(), x.clone())) {
            return Err(DeciderError::NonProduct(format!(
                "shared world {x} is missing from the diagonal"
            )));
        }
    }
    Ok((wh, wv, rh, rv))
}

/// Recover the component frames of a product-shaped delta-frame. Errors on
/// frames that are not full products with an identity diagonal.
pub fn product_components(frame: &DeltaFrame) -> Result<(Frame, Frame), DeciderError> {
    let (wh, wv, rh, rv) = decompose_product(frame)?;
    Ok((Frame::new(wh, rh)?, Frame::new(wv, rv)?))
}

/// Extract a depth-layered submodel preserving the truth of `f` at `root`.
/// The vertical side keeps every successor down to the vertical depth of
/// `f`; the horizontal side keeps one chosen witness per unsatisfied box.
/// Truth preservation is re-checked before returning.
pub fn selective_filtrate(
    model: &Model,
    root: &World,
    f: &Formula,
    opts: FiltrationOptions,
) -> Result<(Model, FiltrationStats), DeciderError> {
    let frame = model.frame();
    if !frame.contains(root) {
        return Err(DeciderError::RootMissing(root.clone()));
    }
    let (root_h, root_v) = root
        .as_pair()
        .ok_or_else(|| DeciderError::NonProduct(format!("root {root} is not a pair")))?;
    let (_, _, rh, rv) = decompose_product(frame)?;

    let expanded = f.expand_derived();
    let vd = expanded.vertical_depth();
    let hd = expanded.horizontal_depth();

    // Vertical layers: everything reachable in exactly k steps, k <= vd.
    let succ_v = |y: &World| -> Vec<World> {
        rv.iter()
            .filter(|(p, _)| p == y)
            .map(|(_, q)| q.clone())
            .collect()
    };
    let mut u_v_layers: Vec<BTreeSet<World>> = vec![BTreeSet::from([root_v.clone()])];
    for _ in 0..vd {
        let prev = u_v_layers.last().unwrap();
        let next: BTreeSet<World> = prev.iter().flat_map(&succ_v).collect();
        u_v_layers.push(next);
    }
    let wv_kept: BTreeSet<World> = u_v_layers.iter().flatten().cloned().collect();
    let rv_kept: BTreeSet<(World, World)> = rv
        .iter()
        .filter(|(p, q)| wv_kept.contains(p) && wv_kept.contains(q))
        .cloned()
        .collect();

    // Horizontal layers: chosen witnesses for unsatisfied boxes.
    let mut boxes: Vec<(Formula, Formula)> = Vec::new();
    fn collect_boxes(f: &Formula, out: &mut Vec<(Formula, Formula)>) {
        if let Formula::BoxH(a) = f {
            let item = (f.clone(), (**a).clone());
            if !out.contains(&item) {
                out.push(item);
            }
        }
        for c in f.children() {
            collect_boxes(c, out);
        }
    }
    collect_boxes(&expanded, &mut boxes);
    let succ_h = |x: &World| -> Vec<World> {
        rh.iter()
            .filter(|(p, _)| p == x)
            .map(|(_, q)| q.clone())
            .collect()
    };
    let mut u_h_layers: Vec<BTreeSet<World>> = vec![BTreeSet::from([root_h.clone()])];
    let mut rh_kept: BTreeSet<(World, World)> = BTreeSet::new();
    for _ in 0..hd {
        let prev = u_h_layers.last().unwrap().clone();
        let mut next = BTreeSet::new();
        for x in &prev {
            for y in &wv_kept {
                let at = World::pair(x.clone(), y.clone());
                for (boxed, child) in &boxes {
                    if model.check_at(&at, boxed)? {
                        continue;
                    }
                    let witness = succ_h(x)
                        .into_iter()
                        .find(|z| {
                            model
                                .check_at(&World::pair(z.clone(), y.clone()), child)
                                .is_ok_and(|holds| !holds)
                        })
                        .ok_or_else(|| {
                            DeciderError::Verification(format!(
                                "no witness for a false box at {at}"
                            ))
                        })?;
                    rh_kept.insert((x.clone(), witness.clone()));
                    next.insert(witness);
                }
            }
        }
        u_h_layers.push(next);
    }
    let wh_kept: BTreeSet<World> = u_h_layers.iter().flatten().cloned().collect();

    let reflexive_fix = |worlds: &BTreeSet<World>, rel: &BTreeSet<(World, World)>| {
        let mut rel = rel.clone();
        if opts.make_final_reflexive {
            for w in worlds {
                if !rel.iter().any(|(p, _)| p == w) {
                    rel.insert((w.clone(), w.clone()));
                }
            }
        }
        rel
    };
    let fh = Frame::new(wh_kept.clone(), reflexive_fix(&wh_kept, &rh_kept))?;
    let fv = Frame::new(wv_kept.clone(), reflexive_fix(&wv_kept, &rv_kept))?;
    let df = delta_product(&fh, &fv);
    let valuation: BTreeMap<String, BTreeSet<World>> = model
        .valuation()
        .iter()
        .map(|(var, set)| {
            (
                var.clone(),
                set.iter().filter(|w| df.contains(w)).cloned().collect(),
            )
        })
        .collect();
    let filtered = Model::new(df, valuation)?;

    let before = model.check_at(root, f)?;
    let after = filtered.check_at(root, f)?;
    if before != after {
        return Err(DeciderError::Verification(format!(
            "truth of the formula at {root} changed from {before} to {after}"
        )));
    }
    let stats = FiltrationStats {
        u_v_sizes: u_v_layers.iter().map(BTreeSet::len).collect(),
        u_h_sizes: u_h_layers.iter().map(BTreeSet::len).collect(),
    };
    Ok((filtered, stats))
}
