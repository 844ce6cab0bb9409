//! Minsky machines with reliable, lossy, and insertion-error step semantics,
//! run validation, reconstruction of a reliable run from a faulty pair, and
//! bounded reachability / recurrence searches.
//!
//! Lossy steps let counters spontaneously decrease around an instruction;
//! insertion-error steps let them spontaneously increase. A lossy run and an
//! insertion-error run for the same instruction sequence sandwich a unique
//! reliable run, which [`reconstruct_reliable`] rebuilds by replaying the
//! instruction effects from zero.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde_json::{json, Value};

pub type StateId = String;

/// Counter operation kinds, in the fixed instruction order used everywhere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OpKind {
    Inc,
    Dec,
    Test,
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OpKind::Inc => "inc",
            OpKind::Dec => "dec",
            OpKind::Test => "test",
        })
    }
}

/// An operation on one counter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Operation {
    pub kind: OpKind,
    pub counter: usize,
}

impl Operation {
    pub fn inc(counter: usize) -> Operation {
        Operation {
            kind: OpKind::Inc,
            counter,
        }
    }
    pub fn dec(counter: usize) -> Operation {
        Operation {
            kind: OpKind::Dec,
            counter,
        }
    }
    pub fn test(counter: usize) -> Operation {
        Operation {
            kind: OpKind::Test,
            counter,
        }
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind, self.counter)
    }
}

/// An instruction: an operation plus the next state.
pub type Instruction = (Operation, StateId);

/// The three step semantics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Flavor {
    Reliable,
    Lossy,
    InsertionError,
}

impl Flavor {
    pub fn as_str(&self) -> &'static str {
        match self {
            Flavor::Reliable => "reliable",
            Flavor::Lossy => "lossy",
            Flavor::InsertionError => "insertion-error",
        }
    }
}

/// A counter machine: states, an initial state, halting states, N > 1
/// counters, and a nonempty instruction set per non-halting state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterMachine {
    pub states: BTreeSet<StateId>,
    pub init: StateId,
    pub halting: BTreeSet<StateId>,
    pub counters: usize,
    /// Instructions per non-halting state, kept sorted by
    /// (kind, counter, target) for reproducible search order.
    pub instructions: BTreeMap<StateId, Vec<Instruction>>,
}

/// A machine state plus counter contents.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Configuration {
    pub state: StateId,
    pub counters: Vec<u64>,
}

impl Configuration {
    pub fn initial(m: &CounterMachine) -> Configuration {
        Configuration {
            state: m.init.clone(),
            counters: vec![0; m.counters],
        }
    }
}

/// An instruction sequence; runs are indexed so that step `n` (1-based)
/// consumes `seq()[n-1]`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct InstructionSeq(Vec<Instruction>);

impl InstructionSeq {
    pub fn new(steps: impl IntoIterator<Item = Instruction>) -> InstructionSeq {
        InstructionSeq(steps.into_iter().collect())
    }

    pub fn seq(&self) -> &[Instruction] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.0
                .iter()
                .map(|(op, q)| json!([op.kind.to_string(), op.counter, q]))
                .collect(),
        )
    }

    pub fn from_json(value: &Value) -> Result<InstructionSeq, MachineError> {
        let arr = value
            .as_array()
            .ok_or_else(|| MachineError::Json("instruction sequence must be an array".into()))?;
        Ok(InstructionSeq(
            arr.iter().map(instruction_from_json).collect::<Result<_, _>>()?,
        ))
    }
}

/// A flavored configuration sequence. `configs[0]` is the start.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub flavor: Flavor,
    pub configs: Vec<Configuration>,
}

impl Run {
    pub fn steps(&self) -> usize {
        self.configs.len().saturating_sub(1)
    }

    pub fn last(&self) -> &Configuration {
        self.configs.last().expect("runs are nonempty")
    }

    pub fn to_json(&self) -> Value {
        json!({
            "flavor": self.flavor.as_str(),
            "configs": self.configs.iter()
                .map(|c| json!([c.state, c.counters]))
                .collect::<Vec<_>>(),
        })
    }

    pub fn from_json(value: &Value) -> Result<Run, MachineError> {
        let flavor = match value.get("flavor").and_then(Value::as_str) {
            Some("reliable") => Flavor::Reliable,
            Some("lossy") => Flavor::Lossy,
            Some("insertion-error") => Flavor::InsertionError,
            other => return Err(MachineError::Json(format!("bad flavor {other:?}"))),
        };
        let configs = value
            .get("configs")
            .and_then(Value::as_array)
            .ok_or_else(|| MachineError::Json("missing \"configs\"".into()))?
            .iter()
            .map(|c| {
                let pair = c
                    .as_array()
                    .filter(|a| a.len() == 2)
                    .ok_or_else(|| MachineError::Json(format!("bad configuration {c}")))?;
                let state = pair[0]
                    .as_str()
                    .ok_or_else(|| MachineError::Json("state must be a string".into()))?
                    .to_string();
                let counters = pair[1]
                    .as_array()
                    .ok_or_else(|| MachineError::Json("counters must be an array".into()))?
                    .iter()
                    .map(|n| {
                        n.as_u64()
                            .ok_or_else(|| MachineError::Json(format!("bad counter value {n}")))
                    })
                    .collect::<Result<Vec<u64>, _>>()?;
                Ok(Configuration { state, counters })
            })
            .collect::<Result<Vec<_>, MachineError>>()?;
        if configs.is_empty() {
            return Err(MachineError::Json("runs must be nonempty".into()));
        }
        Ok(Run { flavor, configs })
    }
}

/// A reachable cycle in the capped configuration graph; certifies an
/// infinite reliable run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LassoWitness {
    pub stem: InstructionSeq,
    pub cycle: InstructionSeq,
    /// Run covering stem then cycle; its configuration at `stem.len()`
    /// equals its final configuration.
    pub run: Run,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MachineError {
    #[error("step {step}: instruction {instr} is not available in state {state}")]
    InstructionNotAvailable {
        step: usize,
        state: StateId,
        instr: String,
    },
    #[error("counter index {0} out of range (machine has {1} counters)")]
    CounterOutOfRange(usize, usize),
    #[error("run has {run_len} configurations but the sequence has {tau_len} instructions")]
    LengthMismatch { run_len: usize, tau_len: usize },
    #[error("no reliable step at index {step}: {reason}")]
    DisabledStep { step: usize, reason: String },
    #[error("configuration has {got} counters, machine has {want}")]
    CounterArity { got: usize, want: usize },
    #[error("invalid machine: {0}")]
    InvalidMachine(String),
    #[error("{0} run is not a valid {1} run: step {2}")]
    InvalidInputRun(&'static str, &'static str, usize),
    #[error("faulty pair is inconsistent with a reliable run at step {step}: {reason}")]
    ReconstructionFailed { step: usize, reason: String },
    #[error("enumeration request too large: {0}")]
    EnumerationTooLarge(String),
    #[error("malformed machine JSON: {0}")]
    Json(String),
}

impl CounterMachine {
    /// Builds a machine, sorting instruction lists into the canonical
    /// (kind, counter, target) order.
    pub fn new(
        states: impl IntoIterator<Item = StateId>,
        init: StateId,
        halting: impl IntoIterator<Item = StateId>,
        counters: usize,
        instructions: impl IntoIterator<Item = (StateId, Vec<Instruction>)>,
    ) -> CounterMachine {
        let mut instructions: BTreeMap<StateId, Vec<Instruction>> =
            instructions.into_iter().collect();
        for list in instructions.values_mut() {
            list.sort();
            list.dedup();
        }
        CounterMachine {
            states: states.into_iter().collect(),
            init,
            halting: halting.into_iter().collect(),
            counters,
            instructions,
        }
    }

    pub fn instr(&self, q: &StateId) -> &[Instruction] {
        self.instructions.get(q).map_or(&[], |v| v.as_slice())
    }

    /// All violations of the machine invariants; empty means well-formed.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.counters < 2 {
            out.push(format!(
                "machine has {} counters, at least 2 required",
                self.counters
            ));
        }
        if !self.states.contains(&self.init) {
            out.push(format!("initial state {:?} not among the states", self.init));
        }
        for h in &self.halting {
            if !self.states.contains(h) {
                out.push(format!("halting state {h:?} not among the states"));
            }
        }
        for q in &self.states {
            if self.halting.contains(q) {
                if self.instructions.contains_key(q) {
                    out.push(format!("halting state {q:?} has instructions"));
                }
            } else {
                match self.instructions.get(q).map(Vec::as_slice) {
                    None | Some([]) => {
                        out.push(format!("empty instruction set for non-halting state {q:?}"))
                    }
                    Some(list) => {
                        for (op, target) in list {
                            if op.counter >= self.counters {
                                out.push(format!(
                                    "state {q:?}: counter index {} out of range",
                                    op.counter
                                ));
                            }
                            if !self.states.contains(target) {
                                out.push(format!(
                                    "state {q:?}: target state {target:?} not among the states"
                                ));
                            }
                        }
                    }
                }
            }
        }
        for q in self.instructions.keys() {
            if !self.states.contains(q) {
                out.push(format!("instructions attached to unknown state {q:?}"));
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "states": self.states.iter().collect::<Vec<_>>(),
            "init": self.init,
            "halting": self.halting.iter().collect::<Vec<_>>(),
            "counters": self.counters,
            "instr": self.instructions.iter().map(|(q, list)| {
                (q.clone(), Value::Array(list.iter()
                    .map(|(op, t)| json!([op.kind.to_string(), op.counter, t]))
                    .collect()))
            }).collect::<serde_json::Map<_, _>>(),
        })
    }

    pub fn from_json(value: &Value) -> Result<CounterMachine, MachineError> {
        let states: BTreeSet<StateId> = value
            .get("states")
            .and_then(Value::as_array)
            .ok_or_else(|| MachineError::Json("missing \"states\"".into()))?
            .iter()
            .map(|s| {
                s.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| MachineError::Json(format!("bad state {s}")))
            })
            .collect::<Result<_, _>>()?;
        let init = value
            .get("init")
            .and_then(Value::as_str)
            .ok_or_else(|| MachineError::Json("missing \"init\"".into()))?
            .to_string();
        let halting: BTreeSet<StateId> = value
            .get("halting")
            .and_then(Value::as_array)
            .ok_or_else(|| MachineError::Json("missing \"halting\"".into()))?
            .iter()
            .map(|s| {
                s.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| MachineError::Json(format!("bad state {s}")))
            })
            .collect::<Result<_, _>>()?;
        let counters = value
            .get("counters")
            .and_then(Value::as_u64)
            .ok_or_else(|| MachineError::Json("missing \"counters\"".into()))?
            as usize;
        let mut instructions = BTreeMap::new();
        if let Some(map) = value.get("instr") {
            let map = map
                .as_object()
                .ok_or_else(|| MachineError::Json("\"instr\" must be an object".into()))?;
            for (q, list) in map {
                let list = list
                    .as_array()
                    .ok_or_else(|| MachineError::Json(format!("instructions of {q:?} must be an array")))?
                    .iter()
                    .map(instruction_from_json)
                    .collect::<Result<Vec<_>, _>>()?;
                instructions.insert(q.clone(), list);
            }
        }
        Ok(CounterMachine::new(
            states,
            init,
            halting,
            counters,
            instructions,
        ))
    }
}

fn instruction_from_json(value: &Value) -> Result<Instruction, MachineError> {
    let arr = value
        .as_array()
        .filter(|a| a.len() == 3)
        .ok_or_else(|| MachineError::Json(format!("bad instruction {value}")))?;
    let kind = match arr[0].as_str() {
        Some("inc") => OpKind::Inc,
        Some("dec") => OpKind::Dec,
        Some("test") => OpKind::Test,
        other => return Err(MachineError::Json(format!("bad operation kind {other:?}"))),
    };
    let counter = arr[1]
        .as_u64()
        .ok_or_else(|| MachineError::Json("counter index must be a natural".into()))?
        as usize;
    let target = arr[2]
        .as_str()
        .ok_or_else(|| MachineError::Json("target state must be a string".into()))?
        .to_string();
    Ok((Operation { kind, counter }, target))
}

/// Whether `from -> to` is a valid step under the given flavor for the given
/// instruction. Errors when the instruction is not available in `from.state`
/// or mentions an out-of-range counter.
pub fn check_step(
    flavor: Flavor,
    m: &CounterMachine,
    from: &Configuration,
    instr: &Instruction,
    to: &Configuration,
) -> Result<bool, MachineError> {
    let (op, target) = instr;
    if op.counter >= m.counters {
        return Err(MachineError::CounterOutOfRange(op.counter, m.counters));
    }
    if !m.instr(&from.state).contains(instr) {
        return Err(MachineError::InstructionNotAvailable {
            step: 0,
            state: from.state.clone(),
            instr: format!("({op}, {target})"),
        });
    }
    if from.counters.len() != m.counters || to.counters.len() != m.counters {
        return Err(MachineError::CounterArity {
            got: from.counters.len().min(to.counters.len()),
            want: m.counters,
        });
    }
    if to.state != *target {
        return Ok(false);
    }
    let i = op.counter;
    let c = &from.counters;
    let c2 = &to.counters;
    let others = |cmp: fn(&u64, &u64) -> bool, skip_i: bool| {
        (0..m.counters).all(|j| (skip_i && j == i) || cmp(&c2[j], &c[j]))
    };
    Ok(match (flavor, op.kind) {
        (Flavor::Reliable, OpKind::Inc) => c2[i] == c[i] + 1 && others(u64::eq, true),
        (Flavor::Reliable, OpKind::Dec) => {
            c[i] >= 1 && c2[i] == c[i] - 1 && others(u64::eq, true)
        }
        (Flavor::Reliable, OpKind::Test) => c[i] == 0 && c2[i] == 0 && others(u64::eq, false),
        (Flavor::Lossy, OpKind::Inc) => c2[i] <= c[i] + 1 && others(u64::le, true),
        (Flavor::Lossy, OpKind::Dec) => {
            // Strictly below c[i], so impossible at zero.
            c2[i] < c[i] && others(u64::le, true)
        }
        (Flavor::Lossy, OpKind::Test) => c2[i] == 0 && others(u64::le, false),
        (Flavor::InsertionError, OpKind::Inc) => c2[i] > c[i] && others(u64::ge, true),
        (Flavor::InsertionError, OpKind::Dec) => {
            // At least c[i] - 1, which is vacuous when c[i] = 0.
            c2[i].saturating_add(1) >= c[i] && others(u64::ge, true)
        }
        (Flavor::InsertionError, OpKind::Test) => c[i] == 0 && others(u64::ge, false),
    })
}

/// The unique reliable run for `tau`, or the index of the first disabled
/// step.
pub fn run_reliable(m: &CounterMachine, tau: &InstructionSeq) -> Result<Run, MachineError> {
    let mut configs = vec![Configuration::initial(m)];
    for (n, (op, target)) in tau.seq().iter().enumerate() {
        let step = n + 1;
        let cur = configs.last().unwrap();
        if !m.instr(&cur.state).contains(&(*op, target.clone())) {
            return Err(MachineError::InstructionNotAvailable {
                step,
                state: cur.state.clone(),
                instr: format!("({op}, {target})"),
            });
        }
        let i = op.counter;
        if i >= m.counters {
            return Err(MachineError::CounterOutOfRange(i, m.counters));
        }
        let mut counters = cur.counters.clone();
        match op.kind {
            OpKind::Inc => counters[i] += 1,
            OpKind::Dec => {
                if counters[i] == 0 {
                    return Err(MachineError::DisabledStep {
                        step,
                        reason: format!("cannot decrement counter {i} at zero"),
                    });
                }
                counters[i] -= 1;
            }
            OpKind::Test => {
                if counters[i] != 0 {
                    return Err(MachineError::DisabledStep {
                        step,
                        reason: format!("counter {i} is {} but must be 0", counters[i]),
                    });
                }
            }
        }
        configs.push(Configuration {
            state: target.clone(),
            counters,
        });
    }
    Ok(Run {
        flavor: Flavor::Reliable,
        configs,
    })
}

/// Detailed run check: the start condition plus one [`check_step`] per index.
pub fn check_run(
    flavor: Flavor,
    m: &CounterMachine,
    tau: &InstructionSeq,
    run: &Run,
) -> Result<(), MachineError> {
    if run.configs.len() != tau.len() + 1 {
        return Err(MachineError::LengthMismatch {
            run_len: run.configs.len(),
            tau_len: tau.len(),
        });
    }
    let start = &run.configs[0];
    if start.state != m.init || start.counters.iter().any(|&c| c != 0) {
        return Err(MachineError::InvalidInputRun(
            flavor.as_str(),
            "started",
            0,
        ));
    }
    if start.counters.len() != m.counters {
        return Err(MachineError::CounterArity {
            got: start.counters.len(),
            want: m.counters,
        });
    }
    for (n, instr) in tau.seq().iter().enumerate() {
        // An instruction the current state does not offer makes the run
        // invalid rather than the query malformed.
        let ok = match check_step(flavor, m, &run.configs[n], instr, &run.configs[n + 1]) {
            Ok(ok) => ok,
            Err(MachineError::InstructionNotAvailable { .. }) => false,
            Err(e) => return Err(e),
        };
        if !ok {
            return Err(MachineError::InvalidInputRun(
                flavor.as_str(),
                "stepped",
                n + 1,
            ));
        }
    }
    Ok(())
}

/// Whether `run` is a valid `tau`-run under the flavor. Length mismatches
/// are errors rather than `false`.
pub fn validate_run(
    flavor: Flavor,
    m: &CounterMachine,
    tau: &InstructionSeq,
    run: &Run,
) -> Result<bool, MachineError> {
    match check_run(flavor, m, tau, run) {
        Ok(()) => Ok(true),
        Err(e @ (MachineError::LengthMismatch { .. }
        | MachineError::CounterOutOfRange(..)
        | MachineError::CounterArity { .. })) => Err(e),
        Err(_) => Ok(false),
    }
}

/// Rebuild the reliable run certified by a lossy / insertion-error pair for
/// the same instruction sequence: counters replay the literal instruction
/// effects from zero, and the faulty runs sandwich the result at every step.
pub fn reconstruct_reliable(
    m: &CounterMachine,
    tau: &InstructionSeq,
    lossy: &Run,
    ierr: &Run,
) -> Result<Run, MachineError> {
    if lossy.flavor != Flavor::Lossy || !validate_run(Flavor::Lossy, m, tau, lossy)? {
        return Err(MachineError::InvalidInputRun("lossy", "given", 0));
    }
    if ierr.flavor != Flavor::InsertionError
        || !validate_run(Flavor::InsertionError, m, tau, ierr)?
    {
        return Err(MachineError::InvalidInputRun("insertion-error", "given", 0));
    }
    let mut configs = vec![Configuration::initial(m)];
    for (n, (op, target)) in tau.seq().iter().enumerate() {
        let step = n + 1;
        let prev = configs.last().unwrap();
        let mut counters = prev.counters.clone();
        let i = op.counter;
        match op.kind {
            OpKind::Inc => counters[i] += 1,
            OpKind::Dec => {
                if counters[i] == 0 {
                    return Err(MachineError::ReconstructionFailed {
                        step,
                        reason: format!("counter {i} is zero before a decrement"),
                    });
                }
                counters[i] -= 1;
            }
            OpKind::Test => {
                if counters[i] != 0 {
                    return Err(MachineError::ReconstructionFailed {
                        step,
                        reason: format!("counter {i} is nonzero at a test"),
                    });
                }
            }
        }
        configs.push(Configuration {
            state: target.clone(),
            counters,
        });
    }
    let run = Run {
        flavor: Flavor::Reliable,
        configs,
    };
    // The sandwich condition and reliable validity are consequences of the
    // preconditions; check them anyway and refuse to return a bad run.
    for (n, config) in run.configs.iter().enumerate() {
        for i in 0..m.counters {
            let lo = lossy.configs[n].counters[i];
            let hi = ierr.configs[n].counters[i];
            if !(lo <= config.counters[i] && config.counters[i] <= hi) {
                return Err(MachineError::ReconstructionFailed {
                    step: n,
                    reason: format!(
                        "counter {i} = {} escapes the sandwich [{lo}, {hi}]",
                        config.counters[i]
                    ),
                });
            }
        }
    }
    check_run(Flavor::Reliable, m, tau, &run).map_err(|_| MachineError::ReconstructionFailed {
        step: 0,
        reason: "reconstructed run is not reliable".into(),
    })?;
    Ok(run)
}

/// All flavor-valid runs with between 1 and `max_steps` steps and every
/// counter at most `cap`, paired with their instruction sequences, in
/// deterministic order. Cost grows like `(|I| * (cap+1)^N)^max_steps` for
/// the faulty flavors (reliable steps are deterministic, so only `|I|`
/// branches); the request is rejected when that estimate overflows `limit`
/// (default 2^22).
pub fn enumerate_runs(
    flavor: Flavor,
    m: &CounterMachine,
    max_steps: usize,
    cap: u64,
    limit: Option<u64>,
) -> Result<Vec<(InstructionSeq, Run)>, MachineError> {
    let limit = limit.unwrap_or(1 << 22);
    let branching = m
        .instructions
        .values()
        .map(|v| v.len() as u64)
        .max()
        .unwrap_or(1);
    let per_step = match flavor {
        Flavor::Reliable => branching,
        _ => branching.saturating_mul((cap + 1).saturating_pow(m.counters as u32)),
    };
    let mut estimate: u64 = 1;
    for _ in 0..max_steps {
        estimate = estimate.saturating_mul(per_step);
        if estimate > limit {
            return Err(MachineError::EnumerationTooLarge(format!(
                "roughly {estimate} candidates exceed the limit {limit}"
            )));
        }
    }
    let mut out = Vec::new();
    let mut tau = Vec::new();
    let mut configs = vec![Configuration::initial(m)];
    enumerate_rec(flavor, m, max_steps, cap, &mut tau, &mut configs, &mut out);
    Ok(out)
}

fn enumerate_rec(
    flavor: Flavor,
    m: &CounterMachine,
    remaining: usize,
    cap: u64,
    tau: &mut Vec<Instruction>,
    configs: &mut Vec<Configuration>,
    out: &mut Vec<(InstructionSeq, Run)>,
) {
    if remaining == 0 {
        return;
    }
    let cur = configs.last().unwrap().clone();
    for instr in m.instr(&cur.state).to_vec() {
        for next in successor_configs(flavor, &cur, &instr, cap) {
            tau.push(instr.clone());
            configs.push(next);
            out.push((
                InstructionSeq::new(tau.iter().cloned()),
                Run {
                    flavor,
                    configs: configs.clone(),
                },
            ));
            enumerate_rec(flavor, m, remaining - 1, cap, tau, configs, out);
            configs.pop();
            tau.pop();
        }
    }
}

/// Successor configurations of one step under the flavor, counters capped.
fn successor_configs(
    flavor: Flavor,
    from: &Configuration,
    instr: &Instruction,
    cap: u64,
) -> Vec<Configuration> {
    let (op, target) = instr;
    let i = op.counter;
    let n = from.counters.len();
    // Per-counter ranges of allowed next values.
    let mut ranges: Vec<(u64, u64)> = Vec::with_capacity(n);
    for j in 0..n {
        let c = from.counters[j];
        let range = match flavor {
            Flavor::Reliable => {
                if j == i {
                    match op.kind {
                        OpKind::Inc => (c + 1, c + 1),
                        OpKind::Dec => {
                            if c == 0 {
                                return vec![];
                            }
                            (c - 1, c - 1)
                        }
                        OpKind::Test => {
                            if c != 0 {
                                return vec![];
                            }
                            (0, 0)
                        }
                    }
                } else {
                    (c, c)
                }
            }
            Flavor::Lossy => {
                if j == i {
                    match op.kind {
                        OpKind::Inc => (0, c + 1),
                        OpKind::Dec => {
                            if c == 0 {
                                return vec![];
                            }
                            (0, c - 1)
                        }
                        OpKind::Test => (0, 0),
                    }
                } else {
                    (0, c)
                }
            }
            Flavor::InsertionError => {
                if j == i {
                    match op.kind {
                        OpKind::Inc => (c + 1, cap),
                        OpKind::Dec => (c.saturating_sub(1), cap),
                        OpKind::Test => {
                            if c != 0 {
                                return vec![];
                            }
                            (0, cap)
                        }
                    }
                } else {
                    (c, cap)
                }
            }
        };
        let (lo, hi) = (range.0, range.1.min(cap));
        if lo > hi {
            return vec![];
        }
        ranges.push((lo, hi));
    }
    let mut out = vec![Vec::new()];
    for &(lo, hi) in &ranges {
        let mut next = Vec::new();
        for prefix in &out {
            for v in lo..=hi {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    out.into_iter()
        .map(|counters| Configuration {
            state: target.clone(),
            counters,
        })
        .collect()
}

/// Breadth-first reliable reachability of a state, bounded in steps. `None`
/// means "no witness within the bound", not unreachability.
pub fn bounded_reachability(
    m: &CounterMachine,
    q_fin: &StateId,
    max_steps: usize,
) -> Option<(InstructionSeq, Run)> {
    let start = Configuration::initial(m);
    if start.state == *q_fin {
        return Some((
            InstructionSeq::default(),
            Run {
                flavor: Flavor::Reliable,
                configs: vec![start],
            },
        ));
    }
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue: VecDeque<(Configuration, Vec<Instruction>, Vec<Configuration>)> =
        VecDeque::from([(start.clone(), Vec::new(), vec![start])]);
    while let Some((cur, tau, trace)) = queue.pop_front() {
        if tau.len() >= max_steps {
            continue;
        }
        for instr in m.instr(&cur.state) {
            for next in successor_configs(Flavor::Reliable, &cur, instr, u64::MAX) {
                if !seen.insert(next.clone()) {
                    continue;
                }
                let mut tau2 = tau.clone();
                tau2.push(instr.clone());
                let mut trace2 = trace.clone();
                trace2.push(next.clone());
                if next.state == *q_fin {
                    return Some((
                        InstructionSeq::new(tau2),
                        Run {
                            flavor: Flavor::Reliable,
                            configs: trace2,
                        },
                    ));
                }
                queue.push_back((next, tau2, trace2));
            }
        }
    }
    None
}

/// Search the cap-bounded reliable configuration graph for a reachable
/// cycle, through `q_r` when given. A witness certifies an infinite reliable
/// run; `None` is inconclusive.
pub fn bounded_lasso(
    m: &CounterMachine,
    q_r: Option<&StateId>,
    cap: u64,
) -> Option<LassoWitness> {
    // Reachable configurations in BFS order, with shortest stems.
    let start = Configuration::initial(m);
    let mut order = vec![start.clone()];
    let mut stems: BTreeMap<Configuration, (Vec<Instruction>, Vec<Configuration>)> =
        BTreeMap::from([(start.clone(), (Vec::new(), vec![start.clone()]))]);
    let mut queue = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        let (tau, trace) = stems[&cur].clone();
        for instr in m.instr(&cur.state) {
            for next in successor_configs(Flavor::Reliable, &cur, instr, cap) {
                if next.counters.iter().any(|&c| c > cap) || stems.contains_key(&next) {
                    continue;
                }
                let mut tau2 = tau.clone();
                tau2.push(instr.clone());
                let mut trace2 = trace.clone();
                trace2.push(next.clone());
                stems.insert(next.clone(), (tau2, trace2));
                order.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    for candidate in &order {
        if let Some(q) = q_r {
            if candidate.state != *q {
                continue;
            }
        }
        if let Some((cycle_tau, cycle_trace)) = shortest_cycle(m, candidate, cap) {
            let (stem_tau, stem_trace) = stems[candidate].clone();
            let mut configs = stem_trace;
            configs.extend(cycle_trace.into_iter().skip(1));
            return Some(LassoWitness {
                stem: InstructionSeq::new(stem_tau),
                cycle: InstructionSeq::new(cycle_tau),
                run: Run {
                    flavor: Flavor::Reliable,
                    configs,
                },
            });
        }
    }
    None
}

fn shortest_cycle(
    m: &CounterMachine,
    from: &Configuration,
    cap: u64,
) -> Option<(Vec<Instruction>, Vec<Configuration>)> {
    let mut seen = BTreeSet::new();
    let mut queue: VecDeque<(Configuration, Vec<Instruction>, Vec<Configuration>)> =
        VecDeque::from([(from.clone(), Vec::new(), vec![from.clone()])]);
    while let Some((cur, tau, trace)) = queue.pop_front() {
        for instr in m.instr(&cur.state) {
            for next in successor_configs(Flavor::Reliable, &cur, instr, cap) {
                if next.counters.iter().any(|&c| c > cap) {
                    continue;
                }
                let mut tau2 = tau.clone();
                tau2.push(instr.clone());
                let mut trace2 = trace.clone();
                trace2.push(next.clone());
                if next == *from {
                    return Some((tau2, trace2));
                }
                if seen.insert(next.clone()) {
                    queue.push_back((next, tau2, trace2));
                }
            }
        }
    }
    None
}
