//! Abstract syntax, concrete syntax, and structural metrics for the 3-modal
//! language with a diagonal constant.
//!
//! Primitive connectives are negation, conjunction, the two boxes `[h]` and
//! `[v]`, the constant `diag`, and `false`. Disjunction, implication,
//! equivalence, diamonds, and the reflexive-closure operators `[h+]`, `[v+]`,
//! `<h+>`, `<v+>` are kept as explicit AST nodes so that rendered encodings
//! stay readable; [`Formula::expand_derived`] rewrites them away.

mod parser;

pub use parser::ParseError;

use std::collections::BTreeSet;
use std::fmt;

/// Tokens that cannot be used as variable names.
pub const RESERVED_WORDS: &[&str] = &["diag", "false"];

/// A formula of the 3-modal language.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    /// Propositional variable.
    Var(String),
    /// The diagonal constant.
    Diag,
    /// Falsum.
    Bottom,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    /// `[h]`: true at a point iff the argument holds at every horizontal successor.
    BoxH(Box<Formula>),
    /// `[v]`: vertical box.
    BoxV(Box<Formula>),
    /// `<h>`: horizontal diamond.
    DiaH(Box<Formula>),
    /// `<v>`: vertical diamond.
    DiaV(Box<Formula>),
    /// `[h+]`: the argument here and at every horizontal successor.
    BoxHPlus(Box<Formula>),
    /// `[v+]`.
    BoxVPlus(Box<Formula>),
    /// `<h+>`: the argument here or at some horizontal successor.
    DiaHPlus(Box<Formula>),
    /// `<v+>`.
    DiaVPlus(Box<Formula>),
}

/// Structural metrics of a formula, computed on its expanded form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormulaMetrics {
    /// Number of distinct subformulas of the expanded form.
    pub subformula_count: usize,
    /// Deepest nesting of horizontal modal operators.
    pub horizontal_depth: usize,
    /// Deepest nesting of vertical modal operators.
    pub vertical_depth: usize,
    /// Variable names occurring in the formula.
    pub variables: BTreeSet<String>,
}

/// Errors raised when building formulas from untrusted input.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormulaError {
    #[error("invalid variable name {0:?}: must be nonempty over [A-Za-z0-9_]")]
    InvalidVariableName(String),
    #[error("reserved word {0:?} used as a variable")]
    ReservedWord(String),
    #[error("malformed formula JSON: {0}")]
    Json(String),
}

pub fn is_valid_var_name(name: &str) -> bool {
    !name.is_empty()
        && name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
        && !RESERVED_WORDS.contains(&name)
}

impl Formula {
    /// Variable constructor; panics on names that violate the naming
    /// invariant. Use [`Formula::try_var`] for untrusted input.
    pub fn var(name: impl Into<String>) -> Formula {
        let name = name.into();
        assert!(is_valid_var_name(&name), "invalid variable name {name:?}");
        Formula::Var(name)
    }

    pub fn try_var(name: impl Into<String>) -> Result<Formula, FormulaError> {
        let name = name.into();
        if RESERVED_WORDS.contains(&name.as_str()) {
            Err(FormulaError::ReservedWord(name))
        } else if !is_valid_var_name(&name) {
            Err(FormulaError::InvalidVariableName(name))
        } else {
            Ok(Formula::Var(name))
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }
    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }
    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }
    pub fn implies(l: Formula, r: Formula) -> Formula {
        Formula::Implies(Box::new(l), Box::new(r))
    }
    pub fn iff(l: Formula, r: Formula) -> Formula {
        Formula::Iff(Box::new(l), Box::new(r))
    }
    pub fn box_h(f: Formula) -> Formula {
        Formula::BoxH(Box::new(f))
    }
    pub fn box_v(f: Formula) -> Formula {
        Formula::BoxV(Box::new(f))
    }
    pub fn dia_h(f: Formula) -> Formula {
        Formula::DiaH(Box::new(f))
    }
    pub fn dia_v(f: Formula) -> Formula {
        Formula::DiaV(Box::new(f))
    }
    pub fn box_h_plus(f: Formula) -> Formula {
        Formula::BoxHPlus(Box::new(f))
    }
    pub fn box_v_plus(f: Formula) -> Formula {
        Formula::BoxVPlus(Box::new(f))
    }
    pub fn dia_h_plus(f: Formula) -> Formula {
        Formula::DiaHPlus(Box::new(f))
    }
    pub fn dia_v_plus(f: Formula) -> Formula {
        Formula::DiaVPlus(Box::new(f))
    }

    /// Left-folded conjunction of a nonempty sequence; panics on empty input.
    pub fn conj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut it = parts.into_iter();
        let first = it.next().expect("conj of empty sequence");
        it.fold(first, Formula::and)
    }

    /// Left-folded disjunction of a nonempty sequence; panics on empty input.
    pub fn disj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut it = parts.into_iter();
        let first = it.next().expect("disj of empty sequence");
        it.fold(first, Formula::or)
    }

    /// Parse the text syntax. See the crate README for the grammar.
    pub fn parse(text: &str) -> Result<Formula, ParseError> {
        parser::parse(text)
    }

    /// Render with minimal parentheses; reparses to a structurally equal
    /// formula. This is also the `Display` form.
    pub fn render(&self) -> String {
        self.to_string()
    }

    /// Fully parenthesized rendering: every binary node carries its own
    /// parentheses.
    pub fn render_full(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0, true);
        out
    }

    /// Rewrite into the primitive fragment {Var, Diag, Bottom, Not, And,
    /// BoxH, BoxV}. No simplification: double negations introduced by the
    /// rewriting are kept.
    pub fn expand_derived(&self) -> Formula {
        use Formula::*;
        match self {
            Var(_) | Diag | Bottom => self.clone(),
            Not(a) => Formula::not(a.expand_derived()),
            And(a, b) => Formula::and(a.expand_derived(), b.expand_derived()),
            BoxH(a) => Formula::box_h(a.expand_derived()),
            BoxV(a) => Formula::box_v(a.expand_derived()),
            // a | b  ==  ~(~a & ~b)
            Or(a, b) => Formula::not(Formula::and(
                Formula::not(a.expand_derived()),
                Formula::not(b.expand_derived()),
            )),
            // a -> b  ==  ~(a & ~b)
            Implies(a, b) => Formula::not(Formula::and(
                a.expand_derived(),
                Formula::not(b.expand_derived()),
            )),
            // a <-> b  ==  (a -> b) & (b -> a)
            Iff(a, b) => Formula::and(
                Formula::implies((**a).clone(), (**b).clone()).expand_derived(),
                Formula::implies((**b).clone(), (**a).clone()).expand_derived(),
            ),
            // <h> a  ==  ~[h]~a
            DiaH(a) => Formula::not(Formula::box_h(Formula::not(a.expand_derived()))),
            DiaV(a) => Formula::not(Formula::box_v(Formula::not(a.expand_derived()))),
            // [h+] a  ==  a & [h] a
            BoxHPlus(a) => {
                let e = a.expand_derived();
                Formula::and(e.clone(), Formula::box_h(e))
            }
            BoxVPlus(a) => {
                let e = a.expand_derived();
                Formula::and(e.clone(), Formula::box_v(e))
            }
            // <h+> a  ==  a | <h> a
            DiaHPlus(a) => {
                Formula::or((**a).clone(), Formula::dia_h((**a).clone())).expand_derived()
            }
            DiaVPlus(a) => {
                Formula::or((**a).clone(), Formula::dia_v((**a).clone())).expand_derived()
            }
        }
    }

    /// True iff the formula contains only primitive node kinds.
    pub fn is_primitive(&self) -> bool {
        use Formula::*;
        match self {
            Var(_) | Diag | Bottom => true,
            Not(a) | BoxH(a) | BoxV(a) => a.is_primitive(),
            And(a, b) => a.is_primitive() && b.is_primitive(),
            _ => false,
        }
    }

    /// Direct children of this node.
    pub fn children(&self) -> Vec<&Formula> {
        use Formula::*;
        match self {
            Var(_) | Diag | Bottom => vec![],
            Not(a) | BoxH(a) | BoxV(a) | DiaH(a) | DiaV(a) | BoxHPlus(a) | BoxVPlus(a)
            | DiaHPlus(a) | DiaVPlus(a) => vec![a],
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => vec![a, b],
        }
    }

    /// Number of AST nodes.
    pub fn node_count(&self) -> usize {
        1 + self.children().iter().map(|c| c.node_count()).sum::<usize>()
    }

    /// Variables occurring in the formula.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut BTreeSet<String>) {
        if let Formula::Var(name) = self {
            out.insert(name.clone());
        }
        for c in self.children() {
            c.collect_variables(out);
        }
    }

    pub fn contains_diag(&self) -> bool {
        matches!(self, Formula::Diag) || self.children().iter().any(|c| c.contains_diag())
    }

    pub fn contains_var(&self, name: &str) -> bool {
        match self {
            Formula::Var(n) => n == name,
            _ => self.children().iter().any(|c| c.contains_var(name)),
        }
    }

    /// Splits a left-folded conjunction into its top-level conjuncts.
    pub fn top_level_conjuncts(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        fn walk<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
            if let Formula::And(a, b) = f {
                walk(a, out);
                walk(b, out);
            } else {
                out.push(f);
            }
        }
        walk(self, &mut out);
        out
    }

    /// Metrics of the expanded form: distinct subformula count, horizontal
    /// and vertical modal depths, and the variable set.
    pub fn metrics(&self) -> FormulaMetrics {
        let expanded = self.expand_derived();
        let mut subs: BTreeSet<Formula> = BTreeSet::new();
        fn collect(f: &Formula, subs: &mut BTreeSet<Formula>) {
            if subs.insert(f.clone()) {
                for c in f.children() {
                    collect(c, subs);
                }
            }
        }
        collect(&expanded, &mut subs);
        FormulaMetrics {
            subformula_count: subs.len(),
            horizontal_depth: expanded.horizontal_depth(),
            vertical_depth: expanded.vertical_depth(),
            variables: self.variables(),
        }
    }

    /// Deepest nesting of horizontal operators; derived horizontal operators
    /// contribute one layer.
    pub fn horizontal_depth(&self) -> usize {
        use Formula::*;
        match self {
            Var(_) | Diag | Bottom => 0,
            BoxH(a) | DiaH(a) | BoxHPlus(a) | DiaHPlus(a) => 1 + a.horizontal_depth(),
            Not(a) | BoxV(a) | DiaV(a) | BoxVPlus(a) | DiaVPlus(a) => a.horizontal_depth(),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => {
                a.horizontal_depth().max(b.horizontal_depth())
            }
        }
    }

    /// Deepest nesting of vertical operators.
    pub fn vertical_depth(&self) -> usize {
        use Formula::*;
        match self {
            Var(_) | Diag | Bottom => 0,
            BoxV(a) | DiaV(a) | BoxVPlus(a) | DiaVPlus(a) => 1 + a.vertical_depth(),
            Not(a) | BoxH(a) | DiaH(a) | BoxHPlus(a) | DiaHPlus(a) => a.vertical_depth(),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => {
                a.vertical_depth().max(b.vertical_depth())
            }
        }
    }

    /// JSON tree: `{"op": "...", "args": [...]}`, variables as
    /// `{"op": "var", "name": "..."}`.
    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::json;
        use Formula::*;
        let (op, args): (&str, Vec<&Formula>) = match self {
            Var(name) => return json!({"op": "var", "name": name}),
            Diag => ("diag", vec![]),
            Bottom => ("false", vec![]),
            Not(a) => ("not", vec![a]),
            And(a, b) => ("and", vec![a, b]),
            Or(a, b) => ("or", vec![a, b]),
            Implies(a, b) => ("implies", vec![a, b]),
            Iff(a, b) => ("iff", vec![a, b]),
            BoxH(a) => ("box_h", vec![a]),
            BoxV(a) => ("box_v", vec![a]),
            DiaH(a) => ("dia_h", vec![a]),
            DiaV(a) => ("dia_v", vec![a]),
            BoxHPlus(a) => ("box_h_plus", vec![a]),
            BoxVPlus(a) => ("box_v_plus", vec![a]),
            DiaHPlus(a) => ("dia_h_plus", vec![a]),
            DiaVPlus(a) => ("dia_v_plus", vec![a]),
        };
        json!({"op": op, "args": args.iter().map(|a| a.to_json()).collect::<Vec<_>>()})
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Formula, FormulaError> {
        let obj = value
            .as_object()
            .ok_or_else(|| FormulaError::Json(format!("expected object, got {value}")))?;
        let op = obj
            .get("op")
            .and_then(|v| v.as_str())
            .ok_or_else(|| FormulaError::Json("missing \"op\" key".into()))?;
        if op == "var" {
            let name = obj
                .get("name")
                .and_then(|v| v.as_str())
                .ok_or_else(|| FormulaError::Json("var node without \"name\"".into()))?;
            return Formula::try_var(name);
        }
        let args: Vec<Formula> = match obj.get("args") {
            Some(serde_json::Value::Array(items)) => items
                .iter()
                .map(Formula::from_json)
                .collect::<Result<_, _>>()?,
            None => vec![],
            Some(other) => return Err(FormulaError::Json(format!("bad args: {other}"))),
        };
        let arity_err = |want: usize| FormulaError::Json(format!("op {op:?} wants {want} args"));
        let unary = |args: &[Formula]| -> Result<Formula, FormulaError> {
            args.first().cloned().ok_or_else(|| arity_err(1))
        };
        let binary = |args: &[Formula]| -> Result<(Formula, Formula), FormulaError> {
            match args {
                [a, b] => Ok((a.clone(), b.clone())),
                _ => Err(arity_err(2)),
            }
        };
        Ok(match op {
            "diag" => Formula::Diag,
            "false" => Formula::Bottom,
            "not" => Formula::not(unary(&args)?),
            "and" => {
                let (a, b) = binary(&args)?;
                Formula::and(a, b)
            }
            "or" => {
                let (a, b) = binary(&args)?;
                Formula::or(a, b)
            }
            "implies" => {
                let (a, b) = binary(&args)?;
                Formula::implies(a, b)
            }
            "iff" => {
                let (a, b) = binary(&args)?;
                Formula::iff(a, b)
            }
            "box_h" => Formula::box_h(unary(&args)?),
            "box_v" => Formula::box_v(unary(&args)?),
            "dia_h" => Formula::dia_h(unary(&args)?),
            "dia_v" => Formula::dia_v(unary(&args)?),
            "box_h_plus" => Formula::box_h_plus(unary(&args)?),
            "box_v_plus" => Formula::box_v_plus(unary(&args)?),
            "dia_h_plus" => Formula::dia_h_plus(unary(&args)?),
            "dia_v_plus" => Formula::dia_v_plus(unary(&args)?),
            other => return Err(FormulaError::Json(format!("unknown op {other:?}"))),
        })
    }

    // Precedence levels: iff 0 < implies 1 < or 2 < and 3 < unary 4 < atom 5.
    fn level(&self) -> u8 {
        use Formula::*;
        match self {
            Iff(..) => 0,
            Implies(..) => 1,
            Or(..) => 2,
            And(..) => 3,
            Not(..) | BoxH(..) | BoxV(..) | DiaH(..) | DiaV(..) | BoxHPlus(..) | BoxVPlus(..)
            | DiaHPlus(..) | DiaVPlus(..) => 4,
            Var(_) | Diag | Bottom => 5,
        }
    }

    fn write(&self, out: &mut String, min_level: u8, full: bool) {
        use Formula::*;
        let needs_parens = self.level() < min_level || (full && self.level() <= 3);
        if needs_parens {
            out.push('(');
        }
        match self {
            Var(name) => out.push_str(name),
            Diag => out.push_str("diag"),
            Bottom => out.push_str("false"),
            Not(a) => {
                out.push('~');
                a.write(out, 4, full);
            }
            BoxH(a) | BoxV(a) | DiaH(a) | DiaV(a) | BoxHPlus(a) | BoxVPlus(a) | DiaHPlus(a)
            | DiaVPlus(a) => {
                out.push_str(match self {
                    BoxH(_) => "[h]",
                    BoxV(_) => "[v]",
                    DiaH(_) => "<h>",
                    DiaV(_) => "<v>",
                    BoxHPlus(_) => "[h+]",
                    BoxVPlus(_) => "[v+]",
                    DiaHPlus(_) => "<h+>",
                    DiaVPlus(_) => "<v+>",
                    _ => unreachable!(),
                });
                // A space only before alphanumeric atoms: "[v] P", "[h]<v>Q".
                if matches!(**a, Var(_) | Diag | Bottom) {
                    out.push(' ');
                }
                a.write(out, 4, full);
            }
            And(a, b) => {
                a.write(out, 3, full);
                out.push_str(" & ");
                b.write(out, 4, full);
            }
            Or(a, b) => {
                a.write(out, 2, full);
                out.push_str(" | ");
                b.write(out, 3, full);
            }
            Implies(a, b) => {
                a.write(out, 2, full);
                out.push_str(" -> ");
                b.write(out, 1, full);
            }
            Iff(a, b) => {
                a.write(out, 0, full);
                out.push_str(" <-> ");
                b.write(out, 1, full);
            }
        }
        if needs_parens {
            out.push(')');
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        self.write(&mut out, 0, false);
        f.write_str(&out)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p() -> Formula {
        Formula::var("P")
    }

    #[test]
    fn parse_single_production() {
        assert_eq!(
            Formula::parse("<h> diag").unwrap(),
            Formula::dia_h(Formula::Diag)
        );
    }

    #[test]
    fn parse_derived_box_plus() {
        let f = Formula::parse("[v+] P").unwrap();
        assert_eq!(f, Formula::box_v_plus(p()));
        assert_eq!(
            f.expand_derived(),
            Formula::and(p(), Formula::box_v(p()))
        );
    }

    #[test]
    fn parse_unary_binds_tighter_than_and() {
        assert_eq!(
            Formula::parse("~P & Q").unwrap(),
            Formula::and(Formula::not(p()), Formula::var("Q"))
        );
    }

    #[test]
    fn parse_precedence_chain() {
        // ~ / modal > & > | > -> (right assoc) > <->
        let f = Formula::parse("P & Q | R -> S <-> T").unwrap();
        assert_eq!(
            f,
            Formula::iff(
                Formula::implies(
                    Formula::or(
                        Formula::and(p(), Formula::var("Q")),
                        Formula::var("R")
                    ),
                    Formula::var("S")
                ),
                Formula::var("T")
            )
        );
        let g = Formula::parse("P -> Q -> R").unwrap();
        assert_eq!(
            g,
            Formula::implies(p(), Formula::implies(Formula::var("Q"), Formula::var("R")))
        );
    }

    #[test]
    fn parse_reports_position() {
        let err = Formula::parse("P & ").unwrap_err();
        assert_eq!(err.position, 4);
        let err = Formula::parse("P @ Q").unwrap_err();
        assert_eq!(err.position, 2);
    }

    #[test]
    fn reserved_word_as_variable_rejected() {
        assert!(matches!(
            Formula::try_var("diag"),
            Err(FormulaError::ReservedWord(_))
        ));
        assert!(matches!(
            Formula::try_var("p q"),
            Err(FormulaError::InvalidVariableName(_))
        ));
    }

    #[test]
    fn render_examples() {
        assert_eq!(Formula::dia_h(Formula::Diag).render(), "<h> diag");
        assert_eq!(
            Formula::and(p(), Formula::box_v(p())).render(),
            "P & [v] P"
        );
        assert_eq!(
            Formula::and(p(), Formula::box_v(p())).render_full(),
            "(P & [v] P)"
        );
        assert_eq!(Formula::not(Formula::Diag).render(), "~diag");
    }

    #[test]
    fn render_nests_same_precedence_on_the_right() {
        let f = Formula::and(p(), Formula::and(Formula::var("Q"), Formula::var("R")));
        assert_eq!(f.render(), "P & (Q & R)");
        assert_eq!(Formula::parse(&f.render()).unwrap(), f);
        let g = Formula::conj([p(), Formula::var("Q"), Formula::var("R")]);
        assert_eq!(g.render(), "P & Q & R");
    }

    #[test]
    fn expand_dia_h_plus() {
        let f = Formula::dia_h_plus(p());
        let e = f.expand_derived();
        assert!(e.is_primitive());
        // a | <h> a with both sides expanded.
        assert_eq!(
            e,
            Formula::not(Formula::and(
                Formula::not(p()),
                Formula::not(Formula::not(Formula::box_h(Formula::not(p()))))
            ))
        );
    }

    #[test]
    fn expand_identity_on_primitives() {
        let f = Formula::and(p(), Formula::box_h(Formula::Diag));
        assert_eq!(f.expand_derived(), f);
    }

    #[test]
    fn metrics_examples() {
        let m = Formula::Diag.metrics();
        assert_eq!(
            (m.subformula_count, m.horizontal_depth, m.vertical_depth),
            (1, 0, 0)
        );
        let m = Formula::box_h(Formula::box_v(p())).metrics();
        assert_eq!((m.horizontal_depth, m.vertical_depth), (1, 1));
        // [h]<v>(<h> diag & [h] diag) has hd 2, vd 1; so does the grid pair.
        let grid_part = Formula::box_h(Formula::dia_v(Formula::and(
            Formula::dia_h(Formula::Diag),
            Formula::box_h(Formula::Diag),
        )));
        let m = grid_part.metrics();
        assert_eq!((m.horizontal_depth, m.vertical_depth), (2, 1));
    }

    #[test]
    fn depth_arithmetic() {
        let a = Formula::box_h(p());
        let b = Formula::box_h(Formula::box_h(Formula::var("Q")));
        assert_eq!(
            Formula::and(a.clone(), b.clone()).horizontal_depth(),
            a.horizontal_depth().max(b.horizontal_depth())
        );
        let f = Formula::box_h_plus(Formula::dia_v_plus(p()));
        assert_eq!(f.horizontal_depth(), 1);
        assert_eq!(f.expand_derived().horizontal_depth(), 1);
        assert_eq!(f.expand_derived().vertical_depth(), 1);
    }

    #[test]
    fn json_round_trip_fixed() {
        let f = Formula::implies(Formula::dia_h_plus(p()), Formula::Diag);
        let v = f.to_json();
        assert_eq!(v["op"], "implies");
        assert_eq!(Formula::from_json(&v).unwrap(), f);
        assert!(Formula::from_json(&serde_json::json!({"op": "var", "name": "diag"})).is_err());
    }

    pub(crate) fn arb_formula(depth: u32) -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            Just(Formula::Diag),
            Just(Formula::Bottom),
            prop_oneof![Just("P"), Just("Q"), Just("R_1")].prop_map(Formula::var),
        ];
        leaf.prop_recursive(depth, 64, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                inner.clone().prop_map(Formula::box_h),
                inner.clone().prop_map(Formula::box_v),
                inner.clone().prop_map(Formula::dia_h),
                inner.clone().prop_map(Formula::dia_v),
                inner.clone().prop_map(Formula::box_h_plus),
                inner.clone().prop_map(Formula::box_v_plus),
                inner.clone().prop_map(Formula::dia_h_plus),
                inner.clone().prop_map(Formula::dia_v_plus),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| Formula::iff(a, b)),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1024))]

        #[test]
        fn parse_render_round_trip(f in arb_formula(6)) {
            prop_assert_eq!(&Formula::parse(&f.render()).unwrap(), &f);
            prop_assert_eq!(&Formula::parse(&f.render_full()).unwrap(), &f);
        }

        #[test]
        fn expansion_is_primitive(f in arb_formula(5)) {
            prop_assert!(f.expand_derived().is_primitive());
        }

        #[test]
        fn json_round_trip(f in arb_formula(5)) {
            prop_assert_eq!(&Formula::from_json(&f.to_json()).unwrap(), &f);
        }

        #[test]
        fn derived_boxes_count_one_layer(f in arb_formula(5)) {
            prop_assert_eq!(f.expand_derived().horizontal_depth(), f.horizontal_depth());
            prop_assert_eq!(f.expand_derived().vertical_depth(), f.vertical_depth());
        }
    }
}
