//! Compiles counter machines into the grid-generating and run-emulating
//! formula families, in four styles:
//!
//! - `Forward`: the infinite-grid encoding whose models carry one machine
//!   step per horizontal move.
//! - `Finitary`: the reachability variant with a `stop` marker and a
//!   distinctness conjunct, satisfiable over finite spy-chain / fan products.
//! - `Backward`: the same run emulation read against the horizontal arrows.
//! - `Linear`: the transitive, weakly connected variant using In/Out counter
//!   variable pairs.
//!
//! Also here: the tick transform that simulates an irreflexive horizontal
//! box over reflexive frames, and the spy-point reduction of global
//! consequence to validity.

use crate::counter_machine::{CounterMachine, OpKind, Operation, StateId};
use crate::formula::Formula;

/// Encoding style, with the extra state each style needs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EncodingStyle {
    Forward,
    Finitary { q_fin: StateId },
    Backward,
    Linear { q_r: Option<StateId> },
}

/// Which faulty run family a do-formula drives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaultFlavor {
    Lossy,
    InsertionError,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EncodingError {
    #[error("machine fails validation: {0}")]
    InvalidMachine(String),
    #[error("machine has no non-halting states to encode")]
    NoLiveStates,
    #[error("state {0:?} is not a state of the machine")]
    UnknownState(StateId),
    #[error("formula uses the reserved variable {0:?}")]
    ReservedCollision(String),
    #[error("formula must not contain the diagonal constant")]
    DiagNotAllowed,
}

// Variable naming scheme. The paper-side names are "fresh"; these concrete
// spellings are reserved and collision-checked where user formulas mix in.
pub fn state_var(q: &str) -> String {
    format!("S_{q}")
}
pub fn counter_lossy(i: usize) -> String {
    format!("Cl_{i}")
}
pub fn counter_ierr(i: usize) -> String {
    format!("Ce_{i}")
}
pub fn in_lossy(i: usize) -> String {
    format!("Inl_{i}")
}
pub fn out_lossy(i: usize) -> String {
    format!("Outl_{i}")
}
pub fn in_ierr(i: usize) -> String {
    format!("Ine_{i}")
}
pub fn out_ierr(i: usize) -> String {
    format!("Oute_{i}")
}
pub const TICK_VAR: &str = "tick";
pub const FRESH_P_VAR: &str = "pfresh";
pub const STOP_VAR: &str = "stop";

fn var(name: String) -> Formula {
    Formula::Var(name)
}

fn diag() -> Formula {
    Formula::Diag
}

/// The grid-generation conjunction for each style.
pub fn grid_formula(style: &EncodingStyle) -> Formula {
    match style {
        // [v+]<h> diag  &  [h]<v>(<h> diag & [h] diag)
        EncodingStyle::Forward => Formula::conj([
            Formula::box_v_plus(Formula::dia_h(diag())),
            Formula::box_h(Formula::dia_v(Formula::and(
                Formula::dia_h(diag()),
                Formula::box_h(diag()),
            ))),
        ]),
        // Adds the column-distinctness conjunct and lets columns bail out
        // into `stop` instead of continuing the grid.
        EncodingStyle::Finitary { .. } => Formula::conj([
            Formula::box_v_plus(Formula::dia_h(diag())),
            Formula::box_h(Formula::box_v_plus(Formula::implies(
                Formula::or(var(FRESH_P_VAR.into()), diag()),
                Formula::box_h(Formula::and(
                    var(FRESH_P_VAR.into()),
                    Formula::not(diag()),
                )),
            ))),
            Formula::box_h(Formula::dia_v(Formula::or(
                var(STOP_VAR.into()),
                Formula::and(Formula::dia_h(diag()), Formula::box_h(diag())),
            ))),
        ]),
        // <v><h>(diag & [h] false)  &  [v](<h>diag -> <h>(~diag & <h>diag & [h]diag))  &  [h]<v>diag
        EncodingStyle::Backward => Formula::conj([
            Formula::dia_v(Formula::dia_h(Formula::and(
                diag(),
                Formula::box_h(Formula::Bottom),
            ))),
            Formula::box_v(Formula::implies(
                Formula::dia_h(diag()),
                Formula::dia_h(Formula::conj([
                    Formula::not(diag()),
                    Formula::dia_h(diag()),
                    Formula::box_h(diag()),
                ])),
            )),
            Formula::box_h(Formula::dia_v(diag())),
        ]),
        // diag & [h+]<v>(<h> diag & [h][h]~diag)
        EncodingStyle::Linear { .. } => Formula::and(
            diag(),
            Formula::box_h_plus(Formula::dia_v(Formula::and(
                Formula::dia_h(diag()),
                Formula::box_h(Formula::box_h(Formula::not(diag()))),
            ))),
        ),
    }
}

// Per-counter pieces of the forward encoding.
fn fix_lossy(i: usize) -> Formula {
    Formula::box_v_plus(Formula::implies(
        Formula::box_h(var(counter_lossy(i))),
        var(counter_lossy(i)),
    ))
}
fn inc_lossy(i: usize) -> Formula {
    Formula::box_v_plus(Formula::implies(
        Formula::box_h(var(counter_lossy(i))),
        Formula::or(var(counter_lossy(i)), diag()),
    ))
}
fn dec_lossy(i: usize) -> Formula {
    Formula::and(
        fix_lossy(i),
        Formula::dia_v_plus(Formula::and(
            var(counter_lossy(i)),
            Formula::box_h(Formula::not(var(counter_lossy(i)))),
        )),
    )
}
fn fix_ierr(i: usize) -> Formula {
    Formula::box_v_plus(Formula::implies(
        var(counter_ierr(i)),
        Formula::box_h(var(counter_ierr(i))),
    ))
}
fn inc_ierr(i: usize) -> Formula {
    Formula::and(
        fix_ierr(i),
        Formula::dia_v_plus(Formula::and(
            Formula::not(var(counter_ierr(i))),
            Formula::box_h(var(counter_ierr(i))),
        )),
    )
}
fn dec_ierr(i: usize) -> Formula {
    Formula::box_v_plus(Formula::implies(
        var(counter_ierr(i)),
        Formula::or(Formula::box_h(var(counter_ierr(i))), diag()),
    ))
}

// Backward-style pieces: the same shapes with the horizontal box moved to
// the other side of the implication.
fn bw_fix_lossy(i: usize) -> Formula {
    Formula::box_v_plus(Formula::implies(
        var(counter_lossy(i)),
        Formula::box_h(var(counter_lossy(i))),
    ))
}
fn bw_inc_lossy(i: usize) -> Formula {
    Formula::box_v_plus(Formula::implies(
        var(counter_lossy(i)),
        Formula::or(Formula::box_h(var(counter_lossy(i))), diag()),
    ))
}
fn bw_dec_lossy(i: usize) -> Formula {
    Formula::and(
        bw_fix_lossy(i),
        Formula::dia_v_plus(Formula::and(
            Formula::not(var(counter_lossy(i))),
            Formula::box_h(var(counter_lossy(i))),
        )),
    )
}
fn bw_fix_ierr(i: usize) -> Formula {
    Formula::box_v_plus(Formula::implies(
        Formula::box_h(var(counter_ierr(i))),
        var(counter_ierr(i)),
    ))
}
fn bw_inc_ierr(i: usize) -> Formula {
    Formula::and(
        bw_fix_ierr(i),
        Formula::dia_v_plus(Formula::and(
            var(counter_ierr(i)),
            Formula::box_h(Formula::not(var(counter_ierr(i)))),
        )),
    )
}
fn bw_dec_ierr(i: usize) -> Formula {
    Formula::box_v_plus(Formula::implies(
        Formula::box_h(var(counter_ierr(i))),
        Formula::or(var(counter_ierr(i)), diag()),
    ))
}

// Linear-style pieces over the In/Out pairs.
fn lin_fix_lossy(i: usize) -> Formula {
    Formula::box_v_plus(Formula::implies(
        Formula::box_h(var(in_lossy(i))),
        var(in_lossy(i)),
    ))
}
fn lin_inc_lossy(i: usize) -> Formula {
    Formula::box_v_plus(Formula::implies(
        Formula::box_h(var(in_lossy(i))),
        Formula::or(var(in_lossy(i)), diag()),
    ))
}
fn lin_dec_lossy(i: usize) -> Formula {
    Formula::and(
        lin_fix_lossy(i),
        Formula::dia_v_plus(Formula::conj([
            var(in_lossy(i)),
            Formula::not(var(out_lossy(i))),
            Formula::box_h(var(out_lossy(i))),
        ])),
    )
}
fn lin_fix_ierr(i: usize) -> Formula {
    Formula::box_v_plus(Formula::implies(
        Formula::box_h(var(out_ierr(i))),
        var(out_ierr(i)),
    ))
}
fn lin_inc_ierr(i: usize) -> Formula {
    Formula::and(
        lin_fix_ierr(i),
        Formula::dia_v_plus(Formula::conj([
            Formula::not(var(in_ierr(i))),
            Formula::not(var(out_ierr(i))),
            Formula::box_h(var(in_ierr(i))),
        ])),
    )
}
fn lin_dec_ierr(i: usize) -> Formula {
    Formula::box_v_plus(Formula::implies(
        Formula::box_h(var(out_ierr(i))),
        Formula::or(var(out_ierr(i)), diag()),
    ))
}

/// The per-instruction counter obligations: the active counter's change
/// formula plus a fix conjunct for every other counter.
pub fn do_formula(
    op: Operation,
    n_counters: usize,
    flavor: FaultFlavor,
    style: &EncodingStyle,
) -> Formula {
    let i = op.counter;
    let linear = matches!(style, EncodingStyle::Linear { .. });
    let backward = matches!(style, EncodingStyle::Backward);
    let head = match (flavor, op.kind) {
        (FaultFlavor::Lossy, OpKind::Inc) if linear => lin_inc_lossy(i),
        (FaultFlavor::Lossy, OpKind::Dec) if linear => lin_dec_lossy(i),
        (FaultFlavor::Lossy, OpKind::Test) if linear => Formula::box_v_plus(Formula::implies(
            Formula::box_h(var(in_lossy(i))),
            Formula::box_h(var(out_lossy(i))),
        )),
        (FaultFlavor::InsertionError, OpKind::Inc) if linear => lin_inc_ierr(i),
        (FaultFlavor::InsertionError, OpKind::Dec) if linear => lin_dec_ierr(i),
        (FaultFlavor::InsertionError, OpKind::Test) if linear => Formula::box_v_plus(
            Formula::implies(var(in_ierr(i)), var(out_ierr(i))),
        ),
        (FaultFlavor::Lossy, OpKind::Inc) if backward => bw_inc_lossy(i),
        (FaultFlavor::Lossy, OpKind::Dec) if backward => bw_dec_lossy(i),
        (FaultFlavor::Lossy, OpKind::Test) if backward => {
            Formula::box_v_plus(Formula::not(var(counter_lossy(i))))
        }
        (FaultFlavor::InsertionError, OpKind::Inc) if backward => bw_inc_ierr(i),
        (FaultFlavor::InsertionError, OpKind::Dec) if backward => bw_dec_ierr(i),
        (FaultFlavor::InsertionError, OpKind::Test) if backward => Formula::box_v_plus(
            Formula::box_h(Formula::not(var(counter_ierr(i)))),
        ),
        (FaultFlavor::Lossy, OpKind::Inc) => inc_lossy(i),
        (FaultFlavor::Lossy, OpKind::Dec) => dec_lossy(i),
        (FaultFlavor::Lossy, OpKind::Test) => {
            Formula::box_v_plus(Formula::box_h(Formula::not(var(counter_lossy(i)))))
        }
        (FaultFlavor::InsertionError, OpKind::Inc) => inc_ierr(i),
        (FaultFlavor::InsertionError, OpKind::Dec) => dec_ierr(i),
        (FaultFlavor::InsertionError, OpKind::Test) => {
            Formula::box_v_plus(Formula::not(var(counter_ierr(i))))
        }
    };
    let fix = |j: usize| match (flavor, linear, backward) {
        (FaultFlavor::Lossy, true, _) => lin_fix_lossy(j),
        (FaultFlavor::InsertionError, true, _) => lin_fix_ierr(j),
        (FaultFlavor::Lossy, _, true) => bw_fix_lossy(j),
        (FaultFlavor::InsertionError, _, true) => bw_fix_ierr(j),
        (FaultFlavor::Lossy, _, _) => fix_lossy(j),
        (FaultFlavor::InsertionError, _, _) => fix_ierr(j),
    };
    Formula::conj(
        std::iter::once(head).chain((0..n_counters).filter(|&j| j != i).map(fix)),
    )
}

/// `S_q` plus one negated conjunct per other state, in state order.
pub fn state_formula(q: &StateId, states: &[StateId]) -> Result<Formula, EncodingError> {
    if !states.contains(q) {
        return Err(EncodingError::UnknownState(q.clone()));
    }
    Ok(Formula::conj(std::iter::once(var(state_var(q))).chain(
        states
            .iter()
            .filter(|&q2| q2 != q)
            .map(|q2| Formula::not(var(state_var(q2)))),
    )))
}

/// The full machine conjunction for the style. Styles with a grid live in
/// [`grid_formula`]; a satisfiability target is the conjunction of both.
pub fn machine_formula(
    m: &CounterMachine,
    style: &EncodingStyle,
) -> Result<Formula, EncodingError> {
    let violations = m.validate();
    if !violations.is_empty() {
        return Err(EncodingError::InvalidMachine(violations.join("; ")));
    }
    let states: Vec<StateId> = m.states.iter().cloned().collect();
    let live: Vec<StateId> = states
        .iter()
        .filter(|q| !m.halting.contains(*q))
        .cloned()
        .collect();
    if live.is_empty() {
        return Err(EncodingError::NoLiveStates);
    }
    let st = |q: &StateId| state_formula(q, &states);

    match style {
        EncodingStyle::Forward | EncodingStyle::Finitary { .. } => {
            let zeroed = Formula::conj((0..m.counters).map(|i| {
                Formula::and(
                    Formula::not(var(counter_lossy(i))),
                    Formula::not(var(counter_ierr(i))),
                )
            }));
            let mini = Formula::box_h(Formula::implies(
                diag(),
                Formula::and(st(&m.init)?, Formula::box_v_plus(zeroed)),
            ));
            let mstep = Formula::box_h(Formula::conj(
                live.iter()
                    .map(|q| {
                        Ok(Formula::implies(
                            st(q)?,
                            Formula::disj(
                                m.instr(q)
                                    .iter()
                                    .map(|(op, q2)| {
                                        Ok(Formula::conj([
                                            Formula::box_h(st(q2)?),
                                            do_formula(*op, m.counters, FaultFlavor::Lossy, style),
                                            do_formula(
                                                *op,
                                                m.counters,
                                                FaultFlavor::InsertionError,
                                                style,
                                            ),
                                        ]))
                                    })
                                    .collect::<Result<Vec<_>, EncodingError>>()?,
                            ),
                        ))
                    })
                    .collect::<Result<Vec<_>, EncodingError>>()?,
            ));
            match style {
                EncodingStyle::Forward => {
                    let minf = Formula::box_h(Formula::disj(
                        live.iter().map(st).collect::<Result<Vec<_>, _>>()?,
                    ));
                    Ok(Formula::conj([mini, mstep, minf]))
                }
                EncodingStyle::Finitary { q_fin } => {
                    if !m.states.contains(q_fin) {
                        return Err(EncodingError::UnknownState(q_fin.clone()));
                    }
                    let mut allowed = live.clone();
                    if !allowed.contains(q_fin) {
                        allowed.push(q_fin.clone());
                        allowed.sort();
                    }
                    let minf = Formula::box_h(Formula::disj(
                        allowed.iter().map(st).collect::<Result<Vec<_>, _>>()?,
                    ));
                    let stop_pin = Formula::box_h(Formula::implies(
                        Formula::dia_v(var(STOP_VAR.into())),
                        st(q_fin)?,
                    ));
                    Ok(Formula::conj([mini, mstep, minf, stop_pin]))
                }
                _ => unreachable!(),
            }
        }
        EncodingStyle::Backward => {
            let zeroed = Formula::conj((0..m.counters).map(|i| {
                Formula::and(
                    Formula::not(var(counter_lossy(i))),
                    Formula::not(var(counter_ierr(i))),
                )
            }));
            let bw_init = Formula::box_h(Formula::implies(
                Formula::box_h(Formula::Bottom),
                Formula::and(st(&m.init)?, Formula::box_v_plus(zeroed)),
            ));
            let bw_step = Formula::box_h(Formula::conj(
                live.iter()
                    .map(|q| {
                        Ok(Formula::implies(
                            Formula::dia_h(st(q)?),
                            Formula::disj(
                                m.instr(q)
                                    .iter()
                                    .map(|(op, q2)| {
                                        Ok(Formula::conj([
                                            st(q2)?,
                                            do_formula(*op, m.counters, FaultFlavor::Lossy, style),
                                            do_formula(
                                                *op,
                                                m.counters,
                                                FaultFlavor::InsertionError,
                                                style,
                                            ),
                                        ]))
                                    })
                                    .collect::<Result<Vec<_>, EncodingError>>()?,
                            ),
                        ))
                    })
                    .collect::<Result<Vec<_>, EncodingError>>()?,
            ));
            let bw_live = Formula::box_h(Formula::disj(
                live.iter().map(st).collect::<Result<Vec<_>, _>>()?,
            ));
            Ok(Formula::conj([bw_init, bw_step, bw_live]))
        }
        EncodingStyle::Linear { q_r } => {
            if let Some(q_r) = q_r {
                if !m.states.contains(q_r) {
                    return Err(EncodingError::UnknownState(q_r.clone()));
                }
            }
            let persist = |name: String| {
                Formula::implies(var(name.clone()), Formula::box_h(var(name)))
            };
            let xi = Formula::conj((0..m.counters).map(|i| {
                Formula::box_h_plus(Formula::box_v_plus(Formula::conj([
                    persist(in_lossy(i)),
                    persist(out_lossy(i)),
                    persist(in_ierr(i)),
                    persist(out_ierr(i)),
                ])))
            }));
            let zeroed = Formula::conj((0..m.counters).map(|i| {
                Formula::conj([
                    Formula::not(var(in_lossy(i))),
                    Formula::not(var(out_lossy(i))),
                    Formula::not(var(in_ierr(i))),
                    Formula::not(var(out_ierr(i))),
                ])
            }));
            let lin_mini = Formula::and(st(&m.init)?, Formula::box_v_plus(zeroed));
            let next_col = |q2: &StateId| -> Result<Formula, EncodingError> {
                Ok(Formula::box_v_plus(Formula::implies(
                    Formula::and(
                        Formula::dia_h(diag()),
                        Formula::box_h(Formula::box_h(Formula::not(diag()))),
                    ),
                    Formula::box_h(Formula::implies(diag(), st(q2)?)),
                )))
            };
            let lin_mstep = Formula::box_h_plus(Formula::conj(
                live.iter()
                    .map(|q| {
                        Ok(Formula::implies(
                            Formula::dia_v_plus(st(q)?),
                            Formula::disj(
                                m.instr(q)
                                    .iter()
                                    .map(|(op, q2)| {
                                        Ok(Formula::conj([
                                            do_formula(*op, m.counters, FaultFlavor::Lossy, style),
                                            do_formula(
                                                *op,
                                                m.counters,
                                                FaultFlavor::InsertionError,
                                                style,
                                            ),
                                            next_col(q2)?,
                                        ]))
                                    })
                                    .collect::<Result<Vec<_>, EncodingError>>()?,
                            ),
                        ))
                    })
                    .collect::<Result<Vec<_>, EncodingError>>()?,
            ));
            let lin_minf = Formula::box_h_plus(Formula::box_v_plus(Formula::implies(
                diag(),
                Formula::disj(live.iter().map(st).collect::<Result<Vec<_>, _>>()?),
            )));
            let mut parts = vec![xi, lin_mini, lin_mstep, lin_minf];
            if let Some(q_r) = q_r {
                // Recurrence: past every column there is a later diagonal
                // column in state q_r.
                parts.push(Formula::box_h(Formula::dia_h(Formula::dia_v(
                    Formula::and(diag(), st(q_r)?),
                ))));
            }
            Ok(Formula::conj(parts))
        }
    }
}

/// Replace every horizontal box with its tick-guarded version and return the
/// transformed formula together with the tick alternation axiom. Diamonds
/// and plus-operators are first rewritten through the box.
pub fn tick_transform(f: &Formula) -> Result<(Formula, Formula), EncodingError> {
    if f.contains_var(TICK_VAR) {
        return Err(EncodingError::ReservedCollision(TICK_VAR.into()));
    }
    fn tick() -> Formula {
        var(TICK_VAR.into())
    }
    fn transform(f: &Formula) -> Formula {
        use Formula::*;
        match f {
            Var(_) | Diag | Bottom => f.clone(),
            Not(a) => Formula::not(transform(a)),
            And(a, b) => Formula::and(transform(a), transform(b)),
            Or(a, b) => Formula::or(transform(a), transform(b)),
            Implies(a, b) => Formula::implies(transform(a), transform(b)),
            Iff(a, b) => Formula::iff(transform(a), transform(b)),
            BoxV(a) => Formula::box_v(transform(a)),
            DiaV(a) => Formula::dia_v(transform(a)),
            BoxVPlus(a) => Formula::box_v_plus(transform(a)),
            DiaVPlus(a) => Formula::dia_v_plus(transform(a)),
            BoxH(a) => {
                let body = transform(a);
                Formula::and(
                    Formula::implies(
                        tick(),
                        Formula::box_h(Formula::implies(Formula::not(tick()), body.clone())),
                    ),
                    Formula::implies(
                        Formula::not(tick()),
                        Formula::box_h(Formula::implies(tick(), body)),
                    ),
                )
            }
            DiaH(a) => transform(&Formula::not(Formula::box_h(Formula::not((**a).clone())))),
            BoxHPlus(a) => transform(&Formula::and(
                (**a).clone(),
                Formula::box_h((**a).clone()),
            )),
            DiaHPlus(a) => transform(&Formula::or(
                (**a).clone(),
                Formula::dia_h((**a).clone()),
            )),
        }
    }
    let axiom = Formula::box_h(Formula::and(
        Formula::iff(tick(), Formula::box_v(tick())),
        Formula::iff(Formula::not(tick()), Formula::box_v(Formula::not(tick()))),
    ));
    Ok((transform(f), axiom))
}

/// The four-conjunct diagonal witness that makes the two spy-points see a
/// shared universe.
pub fn univ_delta() -> Formula {
    Formula::conj([
        Formula::box_h(Formula::dia_v(diag())),
        Formula::box_h(Formula::box_h(Formula::dia_v(diag()))),
        Formula::box_v(Formula::dia_h(diag())),
        Formula::box_v(Formula::box_v(Formula::dia_h(diag()))),
    ])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReductionVariant {
    Plain,
    /// For logics with only reflexive frames: a fresh variable masks the
    /// spy-point rows and columns.
    Reflexive,
}

/// The validity target that expresses "psi follows globally from phi" over
/// the corresponding diagonal-free product logic.
pub fn global_reduction(
    phi: &Formula,
    psi: &Formula,
    variant: ReductionVariant,
) -> Result<Formula, EncodingError> {
    if phi.contains_diag() || psi.contains_diag() {
        return Err(EncodingError::DiagNotAllowed);
    }
    match variant {
        ReductionVariant::Plain => Ok(Formula::implies(
            Formula::and(
                univ_delta(),
                Formula::box_h(Formula::box_v(phi.clone())),
            ),
            Formula::box_h(Formula::box_v(psi.clone())),
        )),
        ReductionVariant::Reflexive => {
            if phi.contains_var(FRESH_P_VAR) || psi.contains_var(FRESH_P_VAR) {
                return Err(EncodingError::ReservedCollision(FRESH_P_VAR.into()));
            }
            let p = || var(FRESH_P_VAR.into());
            Ok(Formula::implies(
                Formula::conj([
                    univ_delta(),
                    Formula::box_h(p()),
                    Formula::box_v(p()),
                    Formula::box_h(Formula::box_v(Formula::implies(
                        Formula::not(p()),
                        phi.clone(),
                    ))),
                ]),
                Formula::box_h(Formula::box_v(Formula::implies(
                    Formula::not(p()),
                    psi.clone(),
                ))),
            ))
        }
    }
}
