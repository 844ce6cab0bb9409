//! The three step semantics and the faulty-approximation reconstruction:
//! a lossy run and an insertion-error run for the same instruction sequence
//! pin down the unique reliable run.
//!
//! ```bash
//! cargo run -p dmw --example faulty_runs
//! ```

use dmw::counter_machine::{
    enumerate_runs, reconstruct_reliable, run_reliable, validate_run, CounterMachine, Flavor,
    InstructionSeq, Operation,
};

fn main() {
    let machine = CounterMachine::new(
        ["q0".into(), "q1".into(), "q2".into(), "qf".into()],
        "q0".into(),
        ["qf".into()],
        2,
        [
            ("q0".into(), vec![(Operation::inc(0), "q1".into())]),
            ("q1".into(), vec![(Operation::inc(0), "q2".into())]),
            ("q2".into(), vec![(Operation::dec(0), "qf".into())]),
        ],
    );
    let tau = InstructionSeq::new([
        (Operation::inc(0), "q1".to_string()),
        (Operation::inc(0), "q2".to_string()),
        (Operation::dec(0), "qf".to_string()),
    ]);
    let reliable = run_reliable(&machine, &tau).unwrap();
    println!("reliable run: {}", reliable.to_json());

    // Every reliable run is also a lossy and an insertion-error run.
    for flavor in [Flavor::Lossy, Flavor::InsertionError] {
        assert!(validate_run(flavor, &machine, &tau, &reliable).unwrap());
    }

    // Enumerate strictly faulty runs for the same sequence and rebuild the
    // reliable one from any lossy / insertion-error pair.
    let lossy_runs = enumerate_runs(Flavor::Lossy, &machine, 3, 3, None).unwrap();
    let ierr_runs = enumerate_runs(Flavor::InsertionError, &machine, 3, 3, None).unwrap();
    let lossy = lossy_runs
        .iter()
        .find(|(t, r)| *t == tau && r.configs != reliable.configs)
        .map(|(_, r)| r.clone())
        .expect("some strictly lossy run exists");
    let ierr = ierr_runs
        .iter()
        .find(|(t, r)| *t == tau && r.configs != reliable.configs)
        .map(|(_, r)| r.clone())
        .expect("some strictly insertion-error run exists");
    println!("lossy run:    {}", lossy.to_json());
    println!("ierr run:     {}", ierr.to_json());

    let rebuilt = reconstruct_reliable(&machine, &tau, &lossy, &ierr).unwrap();
    println!("reconstructed: {}", rebuilt.to_json());
    assert_eq!(rebuilt.configs, reliable.configs);
    println!("reconstruction matches the unique reliable run");
}
