//! Formula front-end: parsing, rendering, metrics, and the JSON tree.
//!
//! ```bash
//! cargo run -p dmw --example parse_and_render
//! ```

use dmw::Formula;

fn main() {
    for text in [
        "<h> diag",
        "[v+] P",
        "~P & Q",
        "diag -> <h+> diag",
        "[h]<v>(<h> diag & [h] diag)",
        "P & Q | R -> S <-> T",
    ] {
        let f = Formula::parse(text).expect("example formulas parse");
        let m = f.metrics();
        println!("input:      {text}");
        println!("canonical:  {f}");
        println!("full parens {}", f.render_full());
        println!(
            "metrics:    sub={} hd={} vd={} vars={:?}",
            m.subformula_count, m.horizontal_depth, m.vertical_depth, m.variables
        );
        println!("expanded:   {}", f.expand_derived());
        println!("json:       {}", f.to_json());
        println!();
    }

    // Round trip: rendering always reparses to the same tree.
    let f = Formula::parse("[h+](P -> <v>(Q | diag))").unwrap();
    assert_eq!(Formula::parse(&f.render()).unwrap(), f);
    println!("round trip holds for {f}");
}
