//! The full finitary pipeline: reliable run -> verified product model of
//! the encoding -> extracted faulty runs -> reconstructed reliable run.
//!
//! ```bash
//! cargo run -p dmw --example finitary_roundtrip
//! ```

use dmw::counter_machine::{bounded_reachability, reconstruct_reliable, CounterMachine};
use dmw::encodings::{grid_formula, machine_formula, EncodingStyle};
use dmw::model_builders::{build_finitary_model, extract_runs, ExtractionStyle};
use dmw::Formula;

fn main() {
    let machine = CounterMachine::from_json(
        &serde_json::from_str(include_str!("../fixtures/two_counter.json")).unwrap(),
    )
    .unwrap();
    let q_fin = "qf".to_string();

    let (tau, run) = bounded_reachability(&machine, &q_fin, 10).expect("qf is reachable");
    println!("found a reliable run of {} steps", tau.len());

    let (model, designated) = build_finitary_model(&machine, &tau, &run, &q_fin).unwrap();
    println!(
        "built a verified model with {} worlds, designated world {}",
        model.frame().worlds().len(),
        designated
    );

    let style = EncodingStyle::Finitary { q_fin };
    let target = Formula::and(
        grid_formula(&style),
        machine_formula(&machine, &style).unwrap(),
    );
    assert_eq!(model.check_at(&designated, &target), Ok(true));
    println!("encoding model-checks at the designated world");

    let extracted =
        extract_runs(&model, &machine, &designated, None, ExtractionStyle::Forward).unwrap();
    println!("extracted tau:  {}", extracted.tau.to_json());
    println!("lossy run:      {}", extracted.lossy.to_json());
    println!("ierr run:       {}", extracted.ierr.to_json());
    assert_eq!(extracted.tau, tau);

    let rebuilt =
        reconstruct_reliable(&machine, &extracted.tau, &extracted.lossy, &extracted.ierr).unwrap();
    assert_eq!(rebuilt.configs, run.configs);
    println!("reconstruction matches the original run; round trip closed");
}
