//! Selective filtration: shrink a product model to a depth-layered submodel
//! preserving the truth of a fixed formula at the root.
//!
//! ```bash
//! cargo run -p dmw --example filtration
//! ```

use std::collections::BTreeSet;

use dmw::decider::{filtration_bounds, selective_filtrate, FiltrationOptions, LogicSpec};
use dmw::frames::{delta_product, Frame, World};
use dmw::{Formula, Model};

fn main() {
    // A 6-world horizontal frame times a 5-world out-degree-2 vertical one.
    let fh = Frame::spy_chain(5).unwrap();
    let fv = Frame::fan(3)
        .unwrap()
        .with_edges([
            (World::Num(1), World::Num(2)),
            (World::Num(2), World::Num(0)),
        ])
        .unwrap();
    let df = delta_product(&fh, &fv);
    println!("original product: {} worlds", df.worlds().len());

    let pset: BTreeSet<World> = df
        .worlds()
        .iter()
        .enumerate()
        .filter(|(i, _)| i % 3 == 0)
        .map(|(_, w)| w.clone())
        .collect();
    let model = Model::new(df, [("P".to_string(), pset)]).unwrap();

    let f = Formula::parse("<h>(P & <v>(diag | ~P))").unwrap();
    let spec = LogicSpec::parse("KxAlt:2").unwrap();
    let bounds = filtration_bounds(&f, &spec);
    println!(
        "filtration bounds: vertical {} (layers {:?}), horizontal {} (layers {:?})",
        bounds.vertical_bound, bounds.vertical_layers, bounds.horizontal_bound, bounds.horizontal_layers
    );

    let root = World::pair(World::Num(5), World::Num(0));
    let before = model.check_at(&root, &f).unwrap();
    let (filtered, stats) =
        selective_filtrate(&model, &root, &f, FiltrationOptions::default()).unwrap();
    println!(
        "filtrated to {} worlds (layers: vertical {:?}, horizontal {:?})",
        filtered.frame().worlds().len(),
        stats.u_v_sizes,
        stats.u_h_sizes
    );
    assert_eq!(filtered.check_at(&root, &f).unwrap(), before);
    println!("truth of the formula at {root} preserved: {before}");
}
