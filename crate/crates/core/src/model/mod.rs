//! Transition systems, Büchi specifications and ranking certificates.

mod check;

pub use check::{
    check_ranking_explicit, check_wellformedness, Condition, RankingReport, Violation,
    WellformednessIssue, WellformednessReport,
};

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Errors raised while building or querying model objects.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("atomic proposition `{0}` has no predicate")]
    MissingPredicate(String),
    #[error("unknown atomic proposition `{0}`")]
    UnknownProposition(String),
    #[error("too many atomic propositions ({0}, at most {max})", max = MAX_PROPOSITIONS)]
    TooManyPropositions(usize),
    #[error("dimension mismatch: expected {expected} columns, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("{0}")]
    Invalid(String),
}

/// Upper limit on |Π| so that letters fit a bitmask and Σ stays enumerable.
pub const MAX_PROPOSITIONS: usize = 16;

/// A system of linear inequalities `rows · x ≤ rhs` with integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct LinSys {
    cols: usize,
    pub rows: Vec<Vec<i64>>,
    pub rhs: Vec<i64>,
}

impl LinSys {
    pub fn new(cols: usize) -> Self {
        LinSys { cols, rows: Vec::new(), rhs: Vec::new() }
    }

    pub fn from_rows(cols: usize, rows: Vec<(Vec<i64>, i64)>) -> Self {
        let mut sys = LinSys::new(cols);
        for (row, b) in rows {
            sys.push(row, b);
        }
        sys
    }

    pub fn push(&mut self, row: Vec<i64>, rhs: i64) {
        assert_eq!(row.len(), self.cols, "row width mismatch");
        self.rows.push(row);
        self.rhs.push(rhs);
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Does the integer point satisfy every row?
    pub fn contains(&self, x: &[i64]) -> bool {
        debug_assert_eq!(x.len(), self.cols);
        self.rows.iter().zip(&self.rhs).all(|(row, &b)| dot(row, x) <= b as i128)
    }

    /// Appends the rows of `other`, which must have the same width.
    pub fn stack(&mut self, other: &LinSys) {
        assert_eq!(self.cols, other.cols, "stacking systems of different width");
        self.rows.extend(other.rows.iter().cloned());
        self.rhs.extend(other.rhs.iter().copied());
    }

    /// Embeds the system into a wider space, placing its columns at `offset`.
    pub fn embed(&self, width: usize, offset: usize) -> LinSys {
        assert!(offset + self.cols <= width);
        let mut out = LinSys::new(width);
        for (row, &b) in self.rows.iter().zip(&self.rhs) {
            let mut wide = vec![0; width];
            wide[offset..offset + self.cols].copy_from_slice(row);
            out.push(wide, b);
        }
        out
    }

    /// Largest absolute value among coefficients and right-hand sides.
    pub fn max_abs(&self) -> u64 {
        self.rows
            .iter()
            .flatten()
            .chain(&self.rhs)
            .map(|v| v.unsigned_abs())
            .max()
            .unwrap_or(0)
    }
}

pub(crate) fn dot(row: &[i64], x: &[i64]) -> i128 {
    row.iter().zip(x).map(|(&a, &b)| a as i128 * b as i128).sum()
}

/// Negation of `a·x ≤ b` over the integers: `−a·x ≤ −b − 1`.
pub fn negate_row(row: &[i64], rhs: i64) -> (Vec<i64>, i64) {
    (row.iter().map(|v| -v).collect(), -rhs - 1)
}

/// A letter of Σ = 2^Π, stored as a bitmask over proposition indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Letter(pub u32);

impl Letter {
    pub fn empty() -> Self {
        Letter(0)
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        Letter(indices.into_iter().fold(0, |acc, i| acc | (1 << i)))
    }

    pub fn holds(self, prop: usize) -> bool {
        self.0 >> prop & 1 == 1
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.holds(i))
    }
}

/// A transition label: either a full valuation or `true`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    True,
    Exactly(Letter),
}

impl Label {
    pub fn matches(self, letter: Letter) -> bool {
        match self {
            Label::True => true,
            Label::Exactly(l) => l == letter,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AutomatonEdge {
    pub from: usize,
    pub label: Label,
    pub to: usize,
    pub fair: bool,
}

/// An atomic proposition, optionally backed by a linear predicate over the state variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Proposition {
    pub name: String,
    pub predicate: Option<(Vec<i64>, i64)>,
}

/// A nondeterministic Büchi automaton with fair transitions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BuchiSpec {
    /// Names of the state variables the predicates range over (symbolic mode).
    pub vars: Vec<String>,
    pub states: Vec<String>,
    pub init: Vec<usize>,
    pub props: Vec<Proposition>,
    pub edges: Vec<AutomatonEdge>,
}

impl BuchiSpec {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn prop_index(&self, name: &str) -> Option<usize> {
        self.props.iter().position(|p| p.name == name)
    }

    pub fn is_init(&self, q: usize) -> bool {
        self.init.contains(&q)
    }

    /// All letters of Σ in ascending bitmask order.
    pub fn alphabet(&self) -> impl Iterator<Item = Letter> {
        (0..1u32 << self.props.len()).map(Letter)
    }

    /// The letter observed in a state labelled with the given proposition names.
    pub fn letter_of<'a>(&self, names: impl IntoIterator<Item = &'a String>) -> Result<Letter, ModelError> {
        let mut letter = Letter::empty();
        for name in names {
            let i = self.prop_index(name).ok_or_else(|| ModelError::UnknownProposition(name.clone()))?;
            letter.0 |= 1 << i;
        }
        Ok(letter)
    }

    /// Edges `(q, σ, q')` from `q` whose label admits `letter`.
    pub fn successors(&self, q: usize, letter: Letter) -> impl Iterator<Item = &AutomatonEdge> {
        self.edges.iter().filter(move |e| e.from == q && e.label.matches(letter))
    }

    /// Expands every edge into concrete letters, `true` becoming all of Σ.
    ///
    /// Each item is `(edge index, letter)`, ordered by edge then letter.
    pub fn expanded_edges(&self) -> Vec<(usize, Letter)> {
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            match e.label {
                Label::True => out.extend(self.alphabet().map(|l| (i, l))),
                Label::Exactly(l) => out.push((i, l)),
            }
        }
        out
    }

    /// Linear system whose integer solutions are exactly the states observing `letter`.
    pub fn sigma_to_polyhedron(&self, letter: Letter) -> Result<LinSys, ModelError> {
        let mut sys = LinSys::new(self.vars.len());
        for (i, p) in self.props.iter().enumerate() {
            let (row, b) = p.predicate.as_ref().ok_or_else(|| ModelError::MissingPredicate(p.name.clone()))?;
            if row.len() != self.vars.len() {
                return Err(ModelError::Dimension { expected: self.vars.len(), found: row.len() });
            }
            if letter.holds(i) {
                sys.push(row.clone(), *b);
            } else {
                let (neg, nb) = negate_row(row, *b);
                sys.push(neg, nb);
            }
        }
        Ok(sys)
    }

    /// The letter observed at an integer point, evaluated through the predicates.
    pub fn observe(&self, x: &[i64]) -> Result<Letter, ModelError> {
        let mut letter = Letter::empty();
        for (i, p) in self.props.iter().enumerate() {
            let (row, b) = p.predicate.as_ref().ok_or_else(|| ModelError::MissingPredicate(p.name.clone()))?;
            if dot(row, x) <= *b as i128 {
                letter.0 |= 1 << i;
            }
        }
        Ok(letter)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.states.is_empty() {
            return Err(ModelError::Invalid("automaton has no states".into()));
        }
        if self.props.len() > MAX_PROPOSITIONS {
            return Err(ModelError::TooManyPropositions(self.props.len()));
        }
        let n = self.states.len();
        if let Some(q) = self.init.iter().find(|&&q| q >= n) {
            return Err(ModelError::Invalid(format!("initial state index {q} out of range")));
        }
        for e in &self.edges {
            if e.from >= n || e.to >= n {
                return Err(ModelError::Invalid("edge refers to an unknown state".into()));
            }
            if let Label::Exactly(l) = e.label {
                if l.0 >> self.props.len() != 0 {
                    return Err(ModelError::Invalid("edge label uses an unknown proposition".into()));
                }
            }
        }
        for p in &self.props {
            if let Some((row, _)) = &p.predicate {
                if row.len() != self.vars.len() {
                    return Err(ModelError::Dimension { expected: self.vars.len(), found: row.len() });
                }
            }
        }
        Ok(())
    }
}

/// A finite explicit transition system.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ExplicitSystem {
    /// Per-state set of atomic propositions that hold there.
    pub labels: Vec<BTreeSet<String>>,
    pub init: BTreeSet<usize>,
    pub transitions: BTreeSet<(usize, usize)>,
}

impl ExplicitSystem {
    pub fn num_states(&self) -> usize {
        self.labels.len()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.num_states();
        if n == 0 {
            return Err(ModelError::Invalid("explicit system has no states".into()));
        }
        if self.init.iter().any(|&s| s >= n) {
            return Err(ModelError::Invalid("initial state out of range".into()));
        }
        if self.transitions.iter().any(|&(a, b)| a >= n || b >= n) {
            return Err(ModelError::Invalid("transition endpoint out of range".into()));
        }
        Ok(())
    }

    /// Observed letters of every state relative to the specification's propositions.
    pub fn letters(&self, spec: &BuchiSpec) -> Result<Vec<Letter>, ModelError> {
        self.labels.iter().map(|l| spec.letter_of(l)).collect()
    }

    pub fn successors(&self) -> Vec<Vec<usize>> {
        let mut succ = vec![Vec::new(); self.num_states()];
        for &(a, b) in &self.transitions {
            succ[a].push(b);
        }
        succ
    }
}

/// An integer state variable with a declared finite range.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarDecl {
    pub name: String,
    pub lo: i64,
    pub hi: i64,
}

/// A guarded update: a linear system over the stacked vector `[x, x']`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Command {
    pub name: String,
    pub relation: LinSys,
}

/// A linear guarded-command program.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolicSystem {
    pub vars: Vec<VarDecl>,
    pub init: LinSys,
    pub commands: Vec<Command>,
}

impl SymbolicSystem {
    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_names(&self) -> Vec<String> {
        self.vars.iter().map(|v| v.name.clone()).collect()
    }

    pub fn validate(&self, bound: u64) -> Result<(), ModelError> {
        let n = self.num_vars();
        if self.init.cols() != n {
            return Err(ModelError::Dimension { expected: n, found: self.init.cols() });
        }
        for v in &self.vars {
            if v.lo > v.hi {
                return Err(ModelError::Invalid(format!("empty range for `{}`", v.name)));
            }
        }
        for c in &self.commands {
            if c.relation.cols() != 2 * n {
                return Err(ModelError::Dimension { expected: 2 * n, found: c.relation.cols() });
            }
        }
        let worst = self
            .commands
            .iter()
            .map(|c| c.relation.max_abs())
            .chain([self.init.max_abs()])
            .max()
            .unwrap_or(0);
        if worst > bound {
            return Err(ModelError::Invalid(format!("coefficient {worst} exceeds bound {bound}")));
        }
        Ok(())
    }
}

/// A ranking value: a natural number or +∞.
///
/// The derived order places every finite value below `Infinite`, and
/// `Infinite < Infinite` is false.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rank {
    Finite(u64),
    Infinite,
}

impl Rank {
    pub fn is_finite(self) -> bool {
        matches!(self, Rank::Finite(_))
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rank::Finite(v) => write!(f, "{v}"),
            Rank::Infinite => write!(f, "inf"),
        }
    }
}

/// Explicit ranking table indexed by `[state][automaton state]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExplicitRanking {
    pub table: Vec<Vec<Rank>>,
}

impl ExplicitRanking {
    pub fn get(&self, s: usize, q: usize) -> Rank {
        self.table[s][q]
    }

    pub fn is_total(&self, states: usize, qs: usize) -> bool {
        self.table.len() == states && self.table.iter().all(|row| row.len() == qs)
    }
}

/// A finite case `w·x + u` guarded by the polyhedron `guard`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteCase {
    pub weights: Vec<i64>,
    pub offset: i64,
    pub guard: LinSys,
}

impl FiniteCase {
    pub fn value(&self, x: &[i64]) -> i128 {
        dot(&self.weights, x) + self.offset as i128
    }
}

/// The cases of a piecewise ranking at one automaton state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct StateCases {
    pub finite: Vec<FiniteCase>,
    pub infinite: Vec<LinSys>,
}

impl StateCases {
    /// All case polyhedra, finite cases first.
    pub fn polyhedra(&self) -> impl Iterator<Item = &LinSys> {
        self.finite.iter().map(|c| &c.guard).chain(&self.infinite)
    }
}

/// Piecewise-linear ranking function, one [`StateCases`] per automaton state.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PiecewiseRanking {
    pub cases: Vec<StateCases>,
}

impl PiecewiseRanking {
    /// Evaluates the ranking at an integer point; `None` if no case applies.
    ///
    /// Negative finite values are clamped to `None` as well, since they are not ranks.
    pub fn eval(&self, x: &[i64], q: usize) -> Option<Rank> {
        let at = &self.cases[q];
        if let Some(c) = at.finite.iter().find(|c| c.guard.contains(x)) {
            return u64::try_from(c.value(x)).ok().map(Rank::Finite);
        }
        at.infinite.iter().any(|e| e.contains(x)).then_some(Rank::Infinite)
    }

    /// Per-state (finite, infinite) case counts.
    pub fn shape(&self) -> Vec<(usize, usize)> {
        self.cases.iter().map(|c| (c.finite.len(), c.infinite.len())).collect()
    }
}

/// A ranking certificate in either representation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ranking {
    Table(ExplicitRanking),
    Piecewise(PiecewiseRanking),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec_with(props: Vec<(&str, Vec<i64>, i64)>, vars: usize) -> BuchiSpec {
        BuchiSpec {
            vars: (0..vars).map(|i| format!("x{i}")).collect(),
            states: vec!["q".into()],
            init: vec![0],
            props: props
                .into_iter()
                .map(|(n, r, b)| Proposition { name: n.into(), predicate: Some((r, b)) })
                .collect(),
            edges: vec![],
        }
    }

    #[test]
    fn letter_inclusion_and_negation() {
        let spec = spec_with(vec![("p", vec![1], 5)], 1);
        let with = spec.sigma_to_polyhedron(Letter::from_indices([0])).unwrap();
        assert_eq!(with.rows, vec![vec![1]]);
        assert_eq!(with.rhs, vec![5]);
        let without = spec.sigma_to_polyhedron(Letter::empty()).unwrap();
        assert_eq!(without.rows, vec![vec![-1]]);
        assert_eq!(without.rhs, vec![-6]);
    }

    #[test]
    fn missing_predicate_is_reported() {
        let mut spec = spec_with(vec![("p", vec![1], 5)], 1);
        spec.props[0].predicate = None;
        assert!(matches!(spec.sigma_to_polyhedron(Letter::empty()), Err(ModelError::MissingPredicate(_))));
    }

    #[test]
    fn rank_order_treats_infinity_as_top() {
        assert!(Rank::Finite(u64::MAX) < Rank::Infinite);
        assert!(!(Rank::Infinite < Rank::Infinite));
        assert!(Rank::Infinite >= Rank::Infinite);
    }

    #[test]
    fn embed_pads_with_zeros() {
        let sys = LinSys::from_rows(2, vec![(vec![1, 2], 3)]);
        let wide = sys.embed(4, 2);
        assert_eq!(wide.rows, vec![vec![0, 0, 1, 2]]);
    }
}
