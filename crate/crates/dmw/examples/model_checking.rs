//! Truth at worlds, global truth, and per-frame satisfiability / validity
//! searches.
//!
//! ```bash
//! cargo run -p dmw --example model_checking
//! ```

use std::collections::BTreeSet;

use dmw::frames::{delta_product, Frame, World};
use dmw::semantics::{satisfiable_in_frame, satisfiable_in_frame_grounded, valid_in_frame};
use dmw::{Formula, Model};

fn main() {
    let fan = Frame::fan(2).unwrap();
    let df = delta_product(&fan, &fan);
    let pr = |a: u64, b: u64| World::pair(World::Num(a), World::Num(b));

    let model = Model::new(
        df.clone(),
        [("P".to_string(), BTreeSet::from([pr(0, 0), pr(1, 1)]))],
    )
    .unwrap();

    for (text, world) in [
        ("<h> diag", pr(0, 0)),
        ("<h> diag", pr(0, 1)),
        ("P & [h]~P", pr(0, 0)),
        ("diag -> P", pr(1, 1)),
    ] {
        let f = Formula::parse(text).unwrap();
        println!(
            "{} at {}: {}",
            text,
            world,
            model.check_at(&world, &f).unwrap()
        );
    }
    let taut = Formula::parse("diag | ~diag").unwrap();
    println!("globally {}: {}", taut, model.holds_globally(&taut));

    // Per-frame satisfiability: exhaustive valuation enumeration and the
    // propagation engine agree.
    let f = Formula::parse("P & [h]~P & <v>~P").unwrap();
    let naive = satisfiable_in_frame(&df, &f, 1 << 20).unwrap();
    let grounded = satisfiable_in_frame_grounded(&df, &f, 1 << 20).unwrap();
    println!(
        "satisfiable on the 2x2 product: naive={} grounded={}",
        naive.is_some(),
        grounded.is_some()
    );
    if let Some((witness, world)) = grounded {
        println!("  witness at {world}: {}", witness.to_json());
    }

    let valid = Formula::parse("diag -> <h+> diag").unwrap();
    println!(
        "{} valid on the frame: {}",
        valid,
        valid_in_frame(&df, &valid, 1 << 20).unwrap()
    );
}
