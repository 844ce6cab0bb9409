//! The four encoding styles rendered for a small machine, plus the tick
//! transform and the global-consequence reduction formula.
//!
//! ```bash
//! cargo run -p dmw --example encode_machine
//! ```

use dmw::counter_machine::{CounterMachine, Operation};
use dmw::encodings::{
    global_reduction, grid_formula, machine_formula, tick_transform, univ_delta, EncodingStyle,
    ReductionVariant,
};
use dmw::Formula;

fn main() {
    let machine = CounterMachine::new(
        ["q0".into(), "q1".into(), "qf".into()],
        "q0".into(),
        ["qf".into()],
        2,
        [
            (
                "q0".into(),
                vec![
                    (Operation::inc(0), "q1".into()),
                    (Operation::test(1), "qf".into()),
                ],
            ),
            ("q1".into(), vec![(Operation::dec(0), "qf".into())]),
        ],
    );
    for style in [
        EncodingStyle::Forward,
        EncodingStyle::Finitary { q_fin: "qf".into() },
        EncodingStyle::Backward,
        EncodingStyle::Linear { q_r: None },
        EncodingStyle::Linear {
            q_r: Some("q1".into()),
        },
    ] {
        let grid = grid_formula(&style);
        let phi = machine_formula(&machine, &style).unwrap();
        println!("=== {style:?}");
        println!("grid:    {grid}");
        for (i, part) in phi.top_level_conjuncts().iter().enumerate() {
            println!("phi[{i}]:  {part}");
        }
        println!();
    }

    let (transformed, axiom) = tick_transform(&Formula::parse("[h](P -> <h> Q)").unwrap()).unwrap();
    println!("tick transform of [h](P -> <h> Q):");
    println!("  {transformed}");
    println!("  axiom: {axiom}");
    println!();

    println!("universal-diagonal witness: {}", univ_delta());
    let phi = Formula::parse("[v] P").unwrap();
    let psi = Formula::parse("P").unwrap();
    println!(
        "global reduction (plain):     {}",
        global_reduction(&phi, &psi, ReductionVariant::Plain).unwrap()
    );
    println!(
        "global reduction (reflexive): {}",
        global_reduction(&phi, &psi, ReductionVariant::Reflexive).unwrap()
    );
}
