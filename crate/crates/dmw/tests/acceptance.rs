//! Acceptance suite: one test per criterion, each printing a PASS line.
//! Run with `cargo test -p dmw --test acceptance -- --nocapture`.

mod common;

use std::collections::BTreeSet;

use common::*;
use rand::Rng;
use dmw::counter_machine::{
    enumerate_runs, reconstruct_reliable, run_reliable, validate_run, CounterMachine, Flavor,
    InstructionSeq, OpKind, Operation, Run, StateId,
};
use dmw::decider::{
    brute_force_sat, decide_sat, filtration_bounds, selective_filtrate, ComponentClass,
    DeciderParams, FiltrationOptions, LogicSpec, OverlapPolicy, SatResult, SearchMode,
};
use dmw::encodings::{
    grid_formula, machine_formula, tick_transform, univ_delta, EncodingStyle,
};
use dmw::formula::Formula;
use dmw::frames::{delta_product, diag_uniqueness, Frame, World};
use dmw::model_builders::{
    build_faulty_valuations, build_finitary_model, counting_claim_violations, extract_runs,
    ExtractionStyle, ValuationStyle,
};
use dmw::semantics::{satisfiable_in_frame_grounded, Model};

// ---------------------------------------------------------------------
// Independent step oracles for the faulty-approximation criterion: a
// re-implementation of the three step semantics as successor-set stepping,
// separate from the library's check_step/enumerate_runs path.
// ---------------------------------------------------------------------

fn successor_counters(flavor: Flavor, from: &[u64], op: Operation, cap: u64) -> Vec<Vec<u64>> {
    let i = op.counter;
    let mut ranges: Vec<(u64, u64)> = Vec::with_capacity(from.len());
    for (j, &c) in from.iter().enumerate() {
        let (lo, hi) = match (flavor, op.kind) {
            (Flavor::Reliable, OpKind::Inc) => {
                if j == i {
                    (c + 1, c + 1)
                } else {
                    (c, c)
                }
            }
            (Flavor::Reliable, OpKind::Dec) => {
                if j == i {
                    if c == 0 {
                        return vec![];
                    }
                    (c - 1, c - 1)
                } else {
                    (c, c)
                }
            }
            (Flavor::Reliable, OpKind::Test) => {
                if j == i && c != 0 {
                    return vec![];
                }
                (c, c)
            }
            (Flavor::Lossy, OpKind::Inc) => {
                if j == i {
                    (0, c + 1)
                } else {
                    (0, c)
                }
            }
            (Flavor::Lossy, OpKind::Dec) => {
                if j == i {
                    if c == 0 {
                        return vec![];
                    }
                    (0, c - 1)
                } else {
                    (0, c)
                }
            }
            (Flavor::Lossy, OpKind::Test) => {
                if j == i {
                    (0, 0)
                } else {
                    (0, c)
                }
            }
            (Flavor::InsertionError, OpKind::Inc) => {
                if j == i {
                    (c + 1, cap)
                } else {
                    (c, cap)
                }
            }
            (Flavor::InsertionError, OpKind::Dec) => {
                if j == i {
                    (c.saturating_sub(1), cap)
                } else {
                    (c, cap)
                }
            }
            (Flavor::InsertionError, OpKind::Test) => {
                if j == i && c != 0 {
                    return vec![];
                }
                (c, cap)
            }
        };
        if lo > hi.min(cap) {
            return vec![];
        }
        ranges.push((lo, hi.min(cap)));
    }
    let mut out: Vec<Vec<u64>> = vec![Vec::new()];
    for &(lo, hi) in &ranges {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (lo..=hi).map(move |v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}

/// Does a flavored run exist for this sequence with counters capped?
fn flavor_run_exists(flavor: Flavor, m: &CounterMachine, tau: &InstructionSeq, cap: u64) -> bool {
    let mut state = m.init.clone();
    let mut frontier: BTreeSet<Vec<u64>> = BTreeSet::from([vec![0; m.counters]]);
    for (op, target) in tau.seq() {
        if !m.instr(&state).contains(&(*op, target.clone())) {
            return false;
        }
        frontier = frontier
            .iter()
            .flat_map(|c| successor_counters(flavor, c, *op, cap))
            .collect();
        if frontier.is_empty() {
            return false;
        }
        state = target.clone();
    }
    true
}

/// Up to `max_count` flavored runs for the sequence, in deterministic order.
fn sample_flavor_runs(
    flavor: Flavor,
    m: &CounterMachine,
    tau: &InstructionSeq,
    cap: u64,
    max_count: usize,
) -> Vec<Run> {
    fn rec(
        flavor: Flavor,
        m: &CounterMachine,
        tau: &[(Operation, StateId)],
        cap: u64,
        max_count: usize,
        trace: &mut Vec<dmw::counter_machine::Configuration>,
        out: &mut Vec<Run>,
    ) {
        if out.len() >= max_count {
            return;
        }
        let Some(((op, target), rest)) = tau.split_first() else {
            out.push(Run {
                flavor,
                configs: trace.clone(),
            });
            return;
        };
        let cur = trace.last().unwrap();
        if !m.instr(&cur.state).contains(&(*op, target.clone())) {
            return;
        }
        for counters in successor_counters(flavor, &cur.counters, *op, cap) {
            trace.push(dmw::counter_machine::Configuration {
                state: target.clone(),
                counters,
            });
            rec(flavor, m, rest, cap, max_count, trace, out);
            trace.pop();
            if out.len() >= max_count {
                return;
            }
        }
    }
    let mut out = Vec::new();
    let mut trace = vec![dmw::counter_machine::Configuration {
        state: m.init.clone(),
        counters: vec![0; m.counters],
    }];
    rec(flavor, m, tau.seq(), cap, max_count, &mut trace, &mut out);
    out
}

fn corpus_machines(count: usize) -> Vec<CounterMachine> {
    let mut rng = rng();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    while out.len() < count {
        let m = random_machine(&mut rng, 2, 2);
        if !m.validate().is_empty() {
            continue;
        }
        let key = m.to_json().to_string();
        if seen.insert(key) {
            out.push(m);
        }
    }
    out
}

// ---------------------------------------------------------------------

#[test]
fn c1_faulty_approximation_exhaustive() {
    const CAP: u64 = 5;
    let machines = corpus_machines(200);
    let mut sequences = 0usize;
    let mut pairs_checked = 0usize;
    for m in &machines {
        for tau in consistent_sequences(m, 5) {
            sequences += 1;
            let reliable = run_reliable(m, &tau).ok();
            let lossy_exists = flavor_run_exists(Flavor::Lossy, m, &tau, CAP);
            let ierr_exists = flavor_run_exists(Flavor::InsertionError, m, &tau, CAP);
            assert_eq!(
                reliable.is_some(),
                lossy_exists && ierr_exists,
                "faulty approximation broke for {} tau {:?}",
                m.to_json(),
                tau.to_json()
            );
            let Some(reliable) = reliable else { continue };
            for lossy in sample_flavor_runs(Flavor::Lossy, m, &tau, CAP, 5) {
                for ierr in sample_flavor_runs(Flavor::InsertionError, m, &tau, CAP, 5) {
                    let mut lossy = lossy.clone();
                    lossy.flavor = Flavor::Lossy;
                    let mut ierr = ierr;
                    ierr.flavor = Flavor::InsertionError;
                    let rebuilt = reconstruct_reliable(m, &tau, &lossy, &ierr)
                        .expect("reconstruction succeeds on valid pairs");
                    assert_eq!(rebuilt.configs, reliable.configs);
                    pairs_checked += 1;
                }
            }
        }
    }
    println!(
        "acceptance 1 (faulty approximation): PASS \
         ({} machines, {sequences} sequences, {pairs_checked} pairs)",
        machines.len()
    );
}

#[test]
fn c2_reliable_run_uniqueness() {
    let machines = corpus_machines(200);
    let mut runs_checked = 0usize;
    for m in &machines {
        // Every enumerated reliable run coincides with run_reliable, and
        // every lossy-enumerated run that validates as reliable does too.
        for (tau, run) in enumerate_runs(Flavor::Reliable, m, 6, 6, Some(1 << 24)).unwrap() {
            let unique = run_reliable(m, &tau).expect("enumerated runs replay");
            assert_eq!(run.configs, unique.configs);
            runs_checked += 1;
        }
        for (tau, run) in enumerate_runs(Flavor::Lossy, m, 3, 2, Some(1 << 24)).unwrap() {
            if validate_run(Flavor::Reliable, m, &tau, &run).unwrap() {
                let unique = run_reliable(m, &tau).unwrap();
                assert_eq!(run.configs, unique.configs);
            }
        }
    }
    println!("acceptance 2 (reliable-run uniqueness): PASS ({runs_checked} reliable runs)");
}

fn fixture(
    states: &[&str],
    halting: &[&str],
    instr: &[(&str, OpKind, usize, &str)],
) -> CounterMachine {
    let mut table: Vec<(StateId, Vec<(Operation, StateId)>)> = Vec::new();
    for (q, kind, counter, target) in instr {
        let op = Operation {
            kind: *kind,
            counter: *counter,
        };
        match table.iter_mut().find(|(s, _)| s == q) {
            Some((_, list)) => list.push((op, target.to_string())),
            None => table.push((q.to_string(), vec![(op, target.to_string())])),
        }
    }
    CounterMachine::new(
        states.iter().map(|s| s.to_string()),
        "q0".into(),
        halting.iter().map(|s| s.to_string()),
        2,
        table,
    )
}

#[test]
fn c3_finitary_reduction_round_trip() {
    use OpKind::*;
    // Five machines with reliable runs reaching qf in at most 5 steps.
    let reaching = [
        fixture(
            &["q0", "qf"],
            &["qf"],
            &[("q0", Inc, 0, "qf")],
        ),
        fixture(
            &["q0", "q1", "qf"],
            &["qf"],
            &[("q0", Inc, 0, "q1"), ("q1", Dec, 0, "qf")],
        ),
        fixture(
            &["q0", "q1", "qf"],
            &["qf"],
            &[("q0", Test, 0, "q1"), ("q1", Inc, 1, "qf")],
        ),
        fixture(
            &["q0", "q1", "q2", "q3", "qf"],
            &["qf"],
            &[
                ("q0", Inc, 0, "q1"),
                ("q1", Inc, 1, "q2"),
                ("q2", Dec, 0, "q3"),
                ("q3", Test, 0, "qf"),
            ],
        ),
        fixture(
            &["q0", "q1", "q2", "q3", "q4", "qf"],
            &["qf"],
            &[
                ("q0", Inc, 1, "q1"),
                ("q1", Inc, 1, "q2"),
                ("q2", Dec, 1, "q3"),
                ("q3", Dec, 1, "q4"),
                ("q4", Test, 1, "qf"),
            ],
        ),
    ];
    let q_fin: StateId = "qf".into();
    for (idx, m) in reaching.iter().enumerate() {
        let (tau, run) =
            dmw::counter_machine::bounded_reachability(m, &q_fin, 5).expect("fixtures reach qf");
        assert!(tau.len() <= 5);
        let (model, designated) = build_finitary_model(m, &tau, &run, &q_fin).unwrap();
        let style = EncodingStyle::Finitary {
            q_fin: q_fin.clone(),
        };
        let target = Formula::and(
            grid_formula(&style),
            machine_formula(m, &style).unwrap(),
        );
        assert_eq!(
            model.check_at(&designated, &target),
            Ok(true),
            "fixture {idx} model check"
        );
        let extracted =
            extract_runs(&model, m, &designated, None, ExtractionStyle::Forward).unwrap();
        assert_eq!(extracted.tau, tau, "fixture {idx} tau");
        let rebuilt =
            reconstruct_reliable(m, &extracted.tau, &extracted.lossy, &extracted.ierr).unwrap();
        assert_eq!(rebuilt.configs, run.configs, "fixture {idx} run");
    }

    // Three machines provably unable to reach qf within the cap: the
    // encoding must be unsatisfiable over the whole matching frame family.
    let non_reaching = [
        // The tested counter is pumped on every path to the test.
        fixture(
            &["q0", "q1", "qf"],
            &["qf"],
            &[
                ("q0", Inc, 0, "q1"),
                ("q1", Test, 0, "qf"),
                ("q1", Inc, 0, "q0"),
            ],
        ),
        // qf is disconnected from the instruction graph.
        fixture(
            &["q0", "qf"],
            &["qf"],
            &[("q0", Inc, 0, "q0")],
        ),
        // qf needs four steps; the family is capped below that.
        fixture(
            &["q0", "q1", "q2", "q3", "qf"],
            &["qf"],
            &[
                ("q0", Inc, 0, "q1"),
                ("q1", Inc, 0, "q2"),
                ("q2", Inc, 0, "q3"),
                ("q3", Inc, 0, "qf"),
            ],
        ),
    ];
    let caps = [5usize, 5, 3];
    for (idx, (m, cap)) in non_reaching.iter().zip(caps).enumerate() {
        assert!(
            dmw::counter_machine::bounded_reachability(m, &q_fin, cap).is_none(),
            "fixture {idx} should not reach qf in {cap} steps"
        );
        let style = EncodingStyle::Finitary {
            q_fin: q_fin.clone(),
        };
        let target = Formula::and(
            grid_formula(&style),
            machine_formula(m, &style).unwrap(),
        );
        for k in 1..=cap.min(3) as u64 {
            let df = delta_product(&Frame::spy_chain(k + 1).unwrap(), &Frame::fan(k + 1).unwrap());
            let witness = satisfiable_in_frame_grounded(&df, &target, 1 << 22)
                .expect("family search stays within budget");
            assert!(
                witness.is_none(),
                "fixture {idx}: unexpected witness on the k={k} family frame"
            );
        }
    }
    println!("acceptance 3 (finitary reduction round trip): PASS (5 reaching, 3 non-reaching)");
}

#[test]
fn c4_counting_claims() {
    let mut rng = rng();
    let mut done = 0;
    while done < 50 {
        let m = random_machine(&mut rng, 3, 2);
        if !m.validate().is_empty() {
            continue;
        }
        // Random reliable walk of up to 10 steps.
        let mut state = m.init.clone();
        let mut counters = vec![0u64; m.counters];
        let mut steps = Vec::new();
        for _ in 0..10 {
            let enabled: Vec<_> = m
                .instr(&state)
                .iter()
                .filter(|(op, _)| match op.kind {
                    OpKind::Inc => true,
                    OpKind::Dec => counters[op.counter] > 0,
                    OpKind::Test => counters[op.counter] == 0,
                })
                .cloned()
                .collect();
            if enabled.is_empty() {
                break;
            }
            let (op, target) = enabled[rng.random_range(0..enabled.len())].clone();
            match op.kind {
                OpKind::Inc => counters[op.counter] += 1,
                OpKind::Dec => counters[op.counter] -= 1,
                OpKind::Test => {}
            }
            steps.push((op, target.clone()));
            state = target;
        }
        if steps.is_empty() {
            continue;
        }
        let tau = InstructionSeq::new(steps);
        let run = run_reliable(&m, &tau).unwrap();
        for style in [ValuationStyle::Forward, ValuationStyle::Linear] {
            let vals = build_faulty_valuations(&m, &tau, &run, style).unwrap();
            assert_eq!(
                counting_claim_violations(&vals, &tau),
                Vec::<String>::new(),
                "counting claims failed ({style:?}) for {}",
                m.to_json()
            );
        }
        done += 1;
    }
    println!("acceptance 4 (counting claims): PASS (50 runs, forward and linear)");
}

#[test]
fn c5_selective_filtration() {
    let mut rng = rng();
    for case in 0..100 {
        let n: u32 = if case % 2 == 0 { 1 } else { 2 };
        let spec = LogicSpec::new(ComponentClass::K, ComponentClass::Alt(n)).unwrap();
        let (model, root) = random_product_model(
            &mut rng,
            12,
            8,
            Some(n as usize),
            &["P", "Q"],
        );
        let f = random_formula_with_depths(&mut rng, 9, &["P", "Q"], 2, 2);
        let before = model.check_at(&root, &f).unwrap();
        let (filtered, stats) =
            selective_filtrate(&model, &root, &f, FiltrationOptions::default()).unwrap();
        assert_eq!(
            filtered.check_at(&root, &f).unwrap(),
            before,
            "case {case}: truth changed"
        );
        let bounds = filtration_bounds(&f, &spec);
        for (k, &size) in stats.u_v_sizes.iter().enumerate() {
            let eq_vbound = 1 + (k as u64) * (n as u64).pow(k as u32);
            assert!(
                size as u64 <= eq_vbound,
                "case {case}: |U_v^{k}| = {size} exceeds {eq_vbound}"
            );
        }
        for (m_layer, &size) in stats.u_h_sizes.iter().enumerate() {
            let bound = bounds.horizontal_layers[m_layer];
            assert!(
                size as u64 <= bound,
                "case {case}: |U_h^{m_layer}| = {size} exceeds {bound}"
            );
        }
    }
    println!("acceptance 5 (selective filtration): PASS (100 random product models)");
}

fn verdicts_agree(a: &SatResult, b: &SatResult) -> bool {
    matches!(
        (a, b),
        (SatResult::Sat { .. }, SatResult::Sat { .. })
            | (
                SatResult::UnsatWithinBound { .. },
                SatResult::UnsatWithinBound { .. }
            )
    )
}

fn check_witness(f: &Formula, spec: &LogicSpec, result: &SatResult) {
    if let SatResult::Sat { model, world } = result {
        assert_eq!(model.check_at(world, f), Ok(true));
        assert!(diag_uniqueness(model.frame()).unwrap());
        let (fh, fv) = dmw::decider::product_components(model.frame()).unwrap();
        assert!(spec.horizontal.accepts(&fh), "horizontal class violated");
        assert!(spec.vertical.accepts(&fv), "vertical class violated");
    }
}

#[test]
fn c6_decider_oracle_agreement() {
    let spec = LogicSpec::parse("KxAlt:1").unwrap();
    let params = DeciderParams {
        h_cap: 3,
        v_cap: 3,
        budget: 1 << 26,
        ..DeciderParams::default()
    };
    let corpus = all_primitive_formulas(6, &[Formula::var("P"), Formula::Diag]);
    let mut sat_count = 0usize;
    for f in &corpus {
        let oracle = brute_force_sat(f, &spec, 3, 3, OverlapPolicy::All, 1 << 40).unwrap();
        let fast = decide_sat(f, &spec, SearchMode::Budgeted, &params).unwrap();
        assert!(
            verdicts_agree(&oracle, &fast),
            "verdict mismatch on {f}: oracle {:?} vs decide {:?}",
            oracle.to_json(),
            fast.to_json()
        );
        check_witness(f, &spec, &fast);
        check_witness(f, &spec, &oracle);
        if fast.is_sat() {
            sat_count += 1;
        }
    }

    // Random corpus under Alt(1) x Alt(1), with the polynomial witness-size
    // assertion of the one-successor case.
    let alt_spec = LogicSpec::parse("Alt:1xAlt:1").unwrap();
    let mut rng = rng();
    for _ in 0..200 {
        let f = random_formula(&mut rng, 7, &["P"]);
        let oracle = brute_force_sat(&f, &alt_spec, 3, 3, OverlapPolicy::All, 1 << 40).unwrap();
        let fast = decide_sat(&f, &alt_spec, SearchMode::Budgeted, &params).unwrap();
        assert!(
            verdicts_agree(&oracle, &fast),
            "verdict mismatch on {f} under Alt(1)xAlt(1)"
        );
        check_witness(&f, &alt_spec, &fast);
        if let SatResult::Sat { model, .. } = &fast {
            let m = f.metrics();
            let poly = (m.horizontal_depth + 1) * (m.vertical_depth + 1);
            assert!(
                model.frame().worlds().len() <= poly,
                "witness for {f} larger than ({} x {})",
                m.horizontal_depth + 1,
                m.vertical_depth + 1
            );
        }
    }
    println!(
        "acceptance 6 (decider-oracle agreement): PASS \
         ({} corpus formulas, {sat_count} satisfiable; 200 random Alt(1)xAlt(1))",
        corpus.len()
    );
}

#[test]
fn c7_global_reduction_construction() {
    let mut rng = rng();
    let vars = ["P", "Q"];
    let mut done = 0;
    while done < 20 {
        // A plain product model (no shared worlds, diagonal ignored).
        let h_size = rng.random_range(1..=3);
        let v_size = rng.random_range(1..=3);
        let fh = random_frame(&mut rng, 0, h_size, None);
        let fv = random_frame(&mut rng, 100, v_size, None);
        let product = delta_product(&fh, &fv);
        let base = random_valuation_on(&mut rng, product, &vars);

        // A globally-true phi and a psi with a falsifying world.
        let phi = (0..40)
            .map(|_| random_formula(&mut rng, 5, &vars))
            .find(|f| !f.contains_diag() && base.holds_globally(f))
            .unwrap_or_else(|| Formula::parse("P | ~P").unwrap());
        let psi = (0..40)
            .map(|_| random_formula(&mut rng, 5, &vars))
            .find(|f| !f.contains_diag() && !base.holds_globally(f))
            .unwrap_or(Formula::Bottom);

        // Spy-point construction over a shared universe: both components
        // live on {spy} + Wh x Wv; the horizontal copy index is the second
        // coordinate, the vertical one the first.
        let spy = World::Name("spy".into());
        let universe: Vec<World> = std::iter::once(spy.clone())
            .chain(fh.worlds().iter().flat_map(|x| {
                fv.worlds()
                    .iter()
                    .map(move |y| World::pair(x.clone(), y.clone()))
            }))
            .collect();
        let mut gh_edges = Vec::new();
        let mut gv_edges = Vec::new();
        for u in &universe[1..] {
            gh_edges.push((spy.clone(), u.clone()));
            gv_edges.push((spy.clone(), u.clone()));
            let (x, y) = u.as_pair().unwrap();
            for u2 in &universe[1..] {
                let (x2, y2) = u2.as_pair().unwrap();
                if y == y2 && fh.has_edge(x, x2) {
                    gh_edges.push((u.clone(), u2.clone()));
                }
                if x == x2 && fv.has_edge(y, y2) {
                    gv_edges.push((u.clone(), u2.clone()));
                }
            }
        }
        let gh = Frame::new(universe.iter().cloned(), gh_edges).unwrap();
        let gv = Frame::new(universe.iter().cloned(), gv_edges).unwrap();
        let big = delta_product(&gh, &gv);

        // Pull the base valuation through: P holds at (u, u') when it held
        // at (horizontal-of-u, vertical-of-u').
        let valuation: Vec<(String, BTreeSet<World>)> = vars
            .iter()
            .map(|v| {
                let set: BTreeSet<World> = big
                    .worlds()
                    .iter()
                    .filter(|w| {
                        let (u, u2) = w.as_pair().unwrap();
                        match (u.as_pair(), u2.as_pair()) {
                            (Some((x, _)), Some((_, y))) => {
                                base.holds_var(v, &World::pair(x.clone(), y.clone()))
                            }
                            _ => false,
                        }
                    })
                    .cloned()
                    .collect();
                (v.to_string(), set)
            })
            .collect();
        let spy_model = Model::new(big, valuation).unwrap();
        let at = World::pair(spy.clone(), spy.clone());
        let target = Formula::conj([
            univ_delta(),
            Formula::box_h(Formula::box_v(phi.clone())),
            Formula::dia_h(Formula::dia_v(Formula::not(psi.clone()))),
        ]);
        assert_eq!(
            spy_model.check_at(&at, &target),
            Ok(true),
            "spy construction failed for phi={phi}, psi={psi}"
        );
        done += 1;
    }
    println!("acceptance 7 (global-consequence reduction): PASS (20 spy-point models)");
}

#[test]
fn c8_delta_conservativity() {
    let mut rng = rng();
    for case in 0..200 {
        let (model, _) = random_product_model(&mut rng, 4, 4, None, &["P", "Q"]);
        let f = loop {
            let f = random_formula(&mut rng, 7, &["P", "Q"]);
            if !f.contains_diag() {
                break f;
            }
        };
        let worlds: Vec<World> = model.frame().worlds().iter().cloned().collect();
        let reference: Vec<bool> = worlds
            .iter()
            .map(|w| model.check_at(w, &f).unwrap())
            .collect();
        let alternates: [BTreeSet<World>; 3] = [
            BTreeSet::new(),
            worlds.iter().cloned().collect(),
            worlds
                .iter()
                .filter(|_| rng.random_bool(0.5))
                .cloned()
                .collect(),
        ];
        for diag in alternates {
            let changed = model.with_diag(diag).unwrap();
            let now: Vec<bool> = worlds
                .iter()
                .map(|w| changed.check_at(w, &f).unwrap())
                .collect();
            assert_eq!(reference, now, "case {case}: diagonal changed {f}");
        }
    }
    println!("acceptance 8 (delta-conservativity): PASS (200 models)");
}

#[test]
fn c9_encoding_determinism_and_shape() {
    let m = fixture(
        &["q0", "q1", "qf"],
        &["qf"],
        &[
            ("q0", OpKind::Inc, 0, "q1"),
            ("q0", OpKind::Test, 1, "qf"),
            ("q1", OpKind::Dec, 0, "qf"),
        ],
    );
    let style = EncodingStyle::Finitary {
        q_fin: "qf".into(),
    };
    let first_text = machine_formula(&m, &style).unwrap().render();
    let first_json = machine_formula(&m, &style).unwrap().to_json().to_string();
    for _ in 0..9 {
        assert_eq!(machine_formula(&m, &style).unwrap().render(), first_text);
        assert_eq!(
            machine_formula(&m, &style).unwrap().to_json().to_string(),
            first_json
        );
    }

    let forward = machine_formula(&m, &EncodingStyle::Forward).unwrap();
    assert_eq!(forward.top_level_conjuncts().len(), 3);
    assert_eq!(univ_delta().top_level_conjuncts().len(), 4);

    let (transformed, _) = tick_transform(&Formula::box_h(Formula::var("P"))).unwrap();
    let tick = || Formula::var("tick");
    let expected = Formula::and(
        Formula::implies(
            tick(),
            Formula::box_h(Formula::implies(Formula::not(tick()), Formula::var("P"))),
        ),
        Formula::implies(
            Formula::not(tick()),
            Formula::box_h(Formula::implies(tick(), Formula::var("P"))),
        ),
    );
    assert_eq!(transformed, expected);
    println!("acceptance 9 (encoding determinism and shape): PASS");
}
