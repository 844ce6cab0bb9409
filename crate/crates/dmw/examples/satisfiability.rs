//! Satisfiability under bounded-branching product logics: the shaped
//! decision procedure against the brute-force oracle.
//!
//! ```bash
//! cargo run -p dmw --example satisfiability
//! ```

use dmw::decider::{
    brute_force_sat, decide_sat, DeciderParams, LogicSpec, OverlapPolicy, SatResult, SearchMode,
};
use dmw::Formula;

fn main() {
    let logic = LogicSpec::parse("KxAlt:1").unwrap();
    let params = DeciderParams::default();
    for text in [
        "<h> diag",
        "diag & [h]~diag & <h> diag",
        "P & [h]~P & <v> P",
        "~(P -> P)",
        "[v+]<h> diag",
        "diag & <v>(~diag & <h> diag)",
    ] {
        let f = Formula::parse(text).unwrap();
        let fast = decide_sat(&f, &logic, SearchMode::Budgeted, &params).unwrap();
        let oracle = brute_force_sat(&f, &logic, 3, 3, OverlapPolicy::All, 1 << 24).unwrap();
        let verdict = |r: &SatResult| match r {
            SatResult::Sat { .. } => "sat",
            SatResult::UnsatWithinBound { .. } => "unsat",
            SatResult::Unknown { .. } => "unknown",
        };
        println!(
            "{text:45} decide={:8} oracle={:8}",
            verdict(&fast),
            verdict(&oracle)
        );
        assert_eq!(fast.is_sat(), oracle.is_sat());
        if let SatResult::Sat { model, world } = &fast {
            assert_eq!(model.check_at(world, &f), Ok(true));
            println!(
                "  witness: {} worlds, true at {world}",
                model.frame().worlds().len()
            );
        }
    }
    println!("decision procedure and oracle agree on all samples");
}
