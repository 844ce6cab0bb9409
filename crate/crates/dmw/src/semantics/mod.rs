//! Truth, global truth, satisfiability, and validity over finite
//! delta-frames.
//!
//! Satisfiability per fixed frame is a search over valuations of the
//! variables occurring in the formula. [`satisfiable_in_frame`] enumerates
//! valuations outright and is the reference; [`satisfiable_in_frame_grounded`]
//! grounds the formula over the frame and searches with unit propagation,
//! reaching instances whose valuation space is far beyond enumeration. Both
//! report budget exhaustion as an explicit error, never as "unsatisfiable".

mod grounded;

pub use grounded::satisfiable_in_frame_grounded;

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};

use crate::formula::Formula;
use crate::frames::{DeltaFrame, FrameError, World};

/// A delta-frame with a valuation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    frame: DeltaFrame,
    valuation: BTreeMap<String, BTreeSet<World>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemanticsError {
    #[error("world {0} is not in the model")]
    UnknownWorld(World),
    #[error("valuation of {0:?} mentions world {1} outside the frame")]
    ValuationOutsideFrame(String, World),
    #[error("budget exhausted after {enumerated} candidates; result unknown")]
    BudgetExhausted { enumerated: u64 },
    #[error("malformed model JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Frame(#[from] FrameError),
}

impl Model {
    pub fn new(
        frame: DeltaFrame,
        valuation: impl IntoIterator<Item = (String, BTreeSet<World>)>,
    ) -> Result<Model, SemanticsError> {
        let valuation: BTreeMap<String, BTreeSet<World>> = valuation.into_iter().collect();
        for (var, set) in &valuation {
            for w in set {
                if !frame.contains(w) {
                    return Err(SemanticsError::ValuationOutsideFrame(
                        var.clone(),
                        w.clone(),
                    ));
                }
            }
        }
        Ok(Model { frame, valuation })
    }

    pub fn frame(&self) -> &DeltaFrame {
        &self.frame
    }

    pub fn valuation(&self) -> &BTreeMap<String, BTreeSet<World>> {
        &self.valuation
    }

    pub fn holds_var(&self, name: &str, w: &World) -> bool {
        self.valuation.get(name).is_some_and(|s| s.contains(w))
    }

    /// Same frame, different diagonal. Used to test that delta-free truth
    /// does not depend on the diagonal.
    pub fn with_diag(&self, diag: impl IntoIterator<Item = World>) -> Result<Model, SemanticsError> {
        let frame = DeltaFrame::new(
            self.frame.worlds().iter().cloned(),
            self.frame.rh().iter().cloned(),
            self.frame.rv().iter().cloned(),
            diag,
        )?;
        Ok(Model {
            frame,
            valuation: self.valuation.clone(),
        })
    }

    /// Truth at a world, by the standard recursion; derived operators are
    /// evaluated by their defining expansions.
    pub fn check_at(&self, w: &World, f: &Formula) -> Result<bool, SemanticsError> {
        if !self.frame.contains(w) {
            return Err(SemanticsError::UnknownWorld(w.clone()));
        }
        Ok(self.eval(w, f))
    }

    fn eval(&self, w: &World, f: &Formula) -> bool {
        use Formula::*;
        match f {
            Var(name) => self.holds_var(name, w),
            Diag => self.frame.diag().contains(w),
            Bottom => false,
            Not(a) => !self.eval(w, a),
            And(a, b) => self.eval(w, a) && self.eval(w, b),
            Or(a, b) => self.eval(w, a) || self.eval(w, b),
            Implies(a, b) => !self.eval(w, a) || self.eval(w, b),
            Iff(a, b) => self.eval(w, a) == self.eval(w, b),
            BoxH(a) => self.frame.succ_h(w).all(|u| self.eval(u, a)),
            BoxV(a) => self.frame.succ_v(w).all(|u| self.eval(u, a)),
            DiaH(a) => self.frame.succ_h(w).any(|u| self.eval(u, a)),
            DiaV(a) => self.frame.succ_v(w).any(|u| self.eval(u, a)),
            BoxHPlus(a) => self.eval(w, a) && self.frame.succ_h(w).all(|u| self.eval(u, a)),
            BoxVPlus(a) => self.eval(w, a) && self.frame.succ_v(w).all(|u| self.eval(u, a)),
            DiaHPlus(a) => self.eval(w, a) || self.frame.succ_h(w).any(|u| self.eval(u, a)),
            DiaVPlus(a) => self.eval(w, a) || self.frame.succ_v(w).any(|u| self.eval(u, a)),
        }
    }

    /// Truth at every world.
    pub fn holds_globally(&self, f: &Formula) -> bool {
        self.frame.worlds().iter().all(|w| self.eval(w, f))
    }

    /// Model JSON: the frame keys plus a `"valuation"` object.
    pub fn to_json(&self) -> Value {
        let mut obj = self.frame.to_json();
        obj["valuation"] = json!(self
            .valuation
            .iter()
            .map(|(var, set)| (
                var.clone(),
                Value::Array(set.iter().map(World::to_json).collect())
            ))
            .collect::<serde_json::Map<_, _>>());
        obj
    }

    pub fn from_json(value: &Value) -> Result<Model, SemanticsError> {
        let frame = DeltaFrame::from_json(value)?;
        let mut valuation = BTreeMap::new();
        if let Some(vmap) = value.get("valuation") {
            let vmap = vmap
                .as_object()
                .ok_or_else(|| SemanticsError::Json("\"valuation\" must be an object".into()))?;
            for (var, arr) in vmap {
                let arr = arr.as_array().ok_or_else(|| {
                    SemanticsError::Json(format!("valuation of {var:?} must be an array"))
                })?;
                let set: BTreeSet<World> = arr
                    .iter()
                    .map(World::from_json)
                    .collect::<Result<_, _>>()?;
                valuation.insert(var.clone(), set);
            }
        }
        Model::new(frame, valuation)
    }
}

/// Search every valuation of `f`'s variables over the frame, in a fixed
/// order, for a world satisfying `f`. `budget` caps the number of valuations
/// enumerated; exceeding it is an error distinct from "no witness".
pub fn satisfiable_in_frame(
    df: &DeltaFrame,
    f: &Formula,
    budget: u64,
) -> Result<Option<(Model, World)>, SemanticsError> {
    let vars: Vec<String> = f.variables().into_iter().collect();
    let worlds: Vec<World> = df.worlds().iter().cloned().collect();
    let bits = vars.len() * worlds.len();
    let mut odometer = vec![false; bits];
    let mut enumerated: u64 = 0;
    loop {
        if enumerated >= budget {
            return Err(SemanticsError::BudgetExhausted { enumerated });
        }
        enumerated += 1;
        let valuation = vars.iter().enumerate().map(|(vi, var)| {
            let set: BTreeSet<World> = worlds
                .iter()
                .enumerate()
                .filter(|(wi, _)| odometer[vi * worlds.len() + wi])
                .map(|(_, w)| w.clone())
                .collect();
            (var.clone(), set)
        });
        let model = Model::new(df.clone(), valuation)?;
        for w in &worlds {
            if model.eval(w, f) {
                return Ok(Some((model, w.clone())));
            }
        }
        // Advance the odometer; all-false again means we are done.
        let mut i = 0;
        loop {
            if i == bits {
                return Ok(None);
            }
            odometer[i] = !odometer[i];
            if odometer[i] {
                break;
            }
            i += 1;
        }
    }
}

/// Dual of [`satisfiable_in_frame`] applied to the negation.
pub fn valid_in_frame(df: &DeltaFrame, f: &Formula, budget: u64) -> Result<bool, SemanticsError> {
    Ok(satisfiable_in_frame(df, &Formula::not(f.clone()), budget)?.is_none())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::frames::{delta_product, Frame};
    use proptest::prelude::*;

    fn num(n: u64) -> World {
        World::Num(n)
    }

    pub(crate) fn arb_delta_frame(max_worlds: u64) -> impl Strategy<Value = DeltaFrame> {
        (1..=max_worlds, any::<u64>(), any::<u64>(), any::<u8>()).prop_map(
            |(n, rh, rv, diag)| {
                let worlds: Vec<World> = (0..n).map(World::Num).collect();
                let mut hedges = Vec::new();
                let mut vedges = Vec::new();
                let mut dset = Vec::new();
                let mut bit = 0;
                for a in 0..n as usize {
                    for b in 0..n as usize {
                        if rh >> (bit % 64) & 1 == 1 {
                            hedges.push((worlds[a].clone(), worlds[b].clone()));
                        }
                        if rv >> (bit % 64) & 1 == 1 {
                            vedges.push((worlds[a].clone(), worlds[b].clone()));
                        }
                        bit += 1;
                    }
                }
                for (a, w) in worlds.iter().enumerate() {
                    if diag >> (a % 8) & 1 == 1 {
                        dset.push(w.clone());
                    }
                }
                DeltaFrame::new(worlds, hedges, vedges, dset).unwrap()
            },
        )
    }

    pub(crate) fn arb_model(max_worlds: u64) -> impl Strategy<Value = Model> {
        (arb_delta_frame(max_worlds), any::<u64>(), any::<u64>(), any::<u64>()).prop_map(
            |(df, p, q, r)| {
                let worlds: Vec<World> = df.worlds().iter().cloned().collect();
                let pick = |mask: u64| -> BTreeSet<World> {
                    worlds
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> (i % 64) & 1 == 1)
                        .map(|(_, w)| w.clone())
                        .collect()
                };
                Model::new(
                    df,
                    [
                        ("P".to_string(), pick(p)),
                        ("Q".to_string(), pick(q)),
                        ("R_1".to_string(), pick(r)),
                    ],
                )
                .unwrap()
            },
        )
    }

    /// Second opinion on truth: compute the extension of a formula (the set
    /// of worlds where it holds) bottom-up, entirely set-based, with
    /// derived operators expanded away first. Deliberately written against
    /// a different plan than `Model::eval`.
    pub(crate) fn extension(model: &Model, f: &Formula) -> BTreeSet<World> {
        fn go(model: &Model, f: &Formula) -> BTreeSet<World> {
            use Formula::*;
            let frame = model.frame();
            let all = || frame.worlds().clone();
            match f {
                Var(name) => model
                    .valuation()
                    .get(name)
                    .cloned()
                    .unwrap_or_default(),
                Diag => frame.diag().clone(),
                Bottom => BTreeSet::new(),
                Not(a) => all().difference(&go(model, a)).cloned().collect(),
                And(a, b) => go(model, a).intersection(&go(model, b)).cloned().collect(),
                BoxH(a) => {
                    let inner = go(model, a);
                    all()
                        .iter()
                        .filter(|w| frame.succ_h(w).all(|u| inner.contains(u)))
                        .cloned()
                        .collect()
                }
                BoxV(a) => {
                    let inner = go(model, a);
                    all()
                        .iter()
                        .filter(|w| frame.succ_v(w).all(|u| inner.contains(u)))
                        .cloned()
                        .collect()
                }
                _ => unreachable!("expanded first"),
            }
        }
        go(model, &f.expand_derived())
    }

    fn pr(a: u64, b: u64) -> World {
        World::pair(num(a), num(b))
    }

    #[test]
    fn diag_truth() {
        let df = DeltaFrame::new([num(0), num(1)], [], [], [num(0)]).unwrap();
        let m = Model::new(df, []).unwrap();
        assert!(m.check_at(&num(0), &Formula::Diag).unwrap());
        assert!(!m.check_at(&num(1), &Formula::Diag).unwrap());
        assert!(m.check_at(&num(2), &Formula::Diag).is_err());
    }

    #[test]
    fn vacuous_box() {
        let df = DeltaFrame::new([num(0)], [], [], []).unwrap();
        let m = Model::new(df, []).unwrap();
        let f = Formula::box_h(Formula::Bottom);
        assert!(m.check_at(&num(0), &f).unwrap());
    }

    #[test]
    fn diamond_diag_on_fan_product() {
        let f2 = Frame::fan(2).unwrap();
        let df = delta_product(&f2, &f2);
        let m = Model::new(df, []).unwrap();
        let f = Formula::parse("<h> diag").unwrap();
        // At (0,0) the only horizontal successor is (1,0), not diagonal.
        assert!(!m.check_at(&pr(0, 0), &f).unwrap());
        // At (0,1) the successor is (1,1), diagonal.
        assert!(m.check_at(&pr(0, 1), &f).unwrap());
    }

    #[test]
    fn global_truth() {
        let df = DeltaFrame::new([num(0), num(1)], [], [], [num(0)]).unwrap();
        let m = Model::new(df, []).unwrap();
        assert!(m.holds_globally(&Formula::parse("diag | ~diag").unwrap()));
        assert!(!m.holds_globally(&Formula::Diag));
    }

    #[test]
    fn reflexive_plus_diamond_includes_the_point() {
        let df = DeltaFrame::new([num(0), num(1)], [], [], [num(0), num(1)]).unwrap();
        let f = Formula::parse("diag -> <h+> diag").unwrap();
        assert!(valid_in_frame(&df, &f, 1 << 16).unwrap());
    }

    #[test]
    fn satisfiability_without_variables() {
        let df = DeltaFrame::new([num(0), num(1)], [], [], [num(1)]).unwrap();
        let hit = satisfiable_in_frame(&df, &Formula::Diag, 16).unwrap();
        assert_eq!(hit.map(|(_, w)| w), Some(num(1)));
        let no_diag = DeltaFrame::new([num(0)], [], [], []).unwrap();
        assert_eq!(
            satisfiable_in_frame(&no_diag, &Formula::Diag, 16).unwrap(),
            None
        );
    }

    #[test]
    fn satisfiability_with_one_edge() {
        let df = DeltaFrame::new([num(0), num(1)], [(num(0), num(1))], [], []).unwrap();
        let f = Formula::parse("P & [h]~P").unwrap();
        let (model, w) = satisfiable_in_frame(&df, &f, 1 << 8).unwrap().unwrap();
        assert!(model.check_at(&w, &f).unwrap());
        assert_eq!(
            satisfiable_in_frame(&df, &Formula::parse("P & ~P").unwrap(), 1 << 8).unwrap(),
            None
        );
    }

    #[test]
    fn budget_is_an_error_not_a_verdict() {
        let df = DeltaFrame::new([num(0), num(1), num(2)], [], [], []).unwrap();
        let f = Formula::parse("P & ~P").unwrap();
        assert!(matches!(
            satisfiable_in_frame(&df, &f, 3),
            Err(SemanticsError::BudgetExhausted { enumerated: 3 })
        ));
    }

    #[test]
    fn model_json_round_trip() {
        let df = delta_product(&Frame::fan(2).unwrap(), &Frame::fan(2).unwrap());
        let m = Model::new(
            df,
            [("P".to_string(), BTreeSet::from([pr(0, 0), pr(1, 1)]))],
        )
        .unwrap();
        assert_eq!(Model::from_json(&m.to_json()).unwrap(), m);
    }

    #[test]
    fn uniqueness_reflection_is_checked_per_frame() {
        let f = Formula::parse("[v]((diag & <v> diag) -> diag)").unwrap();
        for df in [
            delta_product(&Frame::fan(3).unwrap(), &Frame::fan(3).unwrap()),
            delta_product(&Frame::spy_chain(2).unwrap(), &Frame::fan(2).unwrap()),
        ] {
            assert!(valid_in_frame(&df, &f, 1 << 16).unwrap());
        }
    }

    #[test]
    fn iff_diag_expansion_agrees_on_sample_models() {
        // Semantic equality of a derived formula and its expansion, checked
        // over every world of a few small models.
        let f = Formula::iff(Formula::Diag, Formula::Diag);
        let e = f.expand_derived();
        for k in [1u64, 2, 3] {
            let df = delta_product(&Frame::fan(k).unwrap(), &Frame::spy_chain(k).unwrap());
            let m = Model::new(df, []).unwrap();
            for w in m.frame().worlds() {
                assert_eq!(m.check_at(w, &f), m.check_at(w, &e));
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1024))]

        #[test]
        fn check_at_agrees_with_extension_evaluator(
            model in arb_model(4),
            f in crate::formula::tests::arb_formula(4),
        ) {
            let ext = extension(&model, &f);
            for w in model.frame().worlds() {
                prop_assert_eq!(model.check_at(w, &f).unwrap(), ext.contains(w));
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn expansion_preserves_truth_everywhere(
            model in arb_model(6),
            f in crate::formula::tests::arb_formula(4),
        ) {
            let e = f.expand_derived();
            for w in model.frame().worlds() {
                prop_assert_eq!(model.check_at(w, &f), model.check_at(w, &e));
            }
        }

        #[test]
        fn sat_none_iff_negation_valid(
            df in arb_delta_frame(3),
            f in crate::formula::tests::arb_formula(3),
        ) {
            let sat = satisfiable_in_frame(&df, &f, 1 << 20).unwrap();
            let dual = valid_in_frame(&df, &Formula::not(f.clone()), 1 << 20).unwrap();
            prop_assert_eq!(sat.is_none(), dual);
        }

        #[test]
        fn unreachable_worlds_do_not_matter(
            model in arb_model(4),
            f in crate::formula::tests::arb_formula(4),
        ) {
            // Extend the frame by fresh isolated worlds: truth at the
            // original worlds is untouched.
            let frame = model.frame();
            let fresh = [World::Name("iso_a".into()), World::Name("iso_b".into())];
            let extended = DeltaFrame::new(
                frame.worlds().iter().cloned().chain(fresh.clone()),
                frame.rh().iter().cloned(),
                frame.rv().iter().cloned(),
                frame.diag().iter().cloned(),
            )
            .unwrap();
            let bigger = Model::new(
                extended,
                model
                    .valuation()
                    .iter()
                    .map(|(k, v)| (k.clone(), v.clone())),
            )
            .unwrap();
            for w in model.frame().worlds() {
                prop_assert_eq!(model.check_at(w, &f), bigger.check_at(w, &f));
            }
        }
    }
}
