use std::fmt;

use super::{negate_row, BuchiSpec, ExplicitRanking, ExplicitSystem, LinSys, ModelError, PiecewiseRanking, Rank};
use crate::lp::{feasible_int, Feasibility, Rational};

/// The three conditions of a fair-termination ranking function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Condition {
    /// Initial product states have finite rank.
    Init,
    /// Rank never increases along a transition.
    Step,
    /// Rank strictly decreases along a fair transition.
    Fair,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Init => "init",
            Condition::Step => "step",
            Condition::Fair => "fair",
        })
    }
}

/// A concrete counterexample to one condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub condition: Condition,
    pub state: usize,
    pub auto: usize,
    /// Successor pair, absent for the init condition.
    pub next: Option<(usize, usize)>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.next {
            None => write!(f, "{} violated at (s{}, q{})", self.condition, self.state, self.auto),
            Some((s, q)) => write!(
                f,
                "{} violated on (s{}, q{}) -> (s{}, q{})",
                self.condition, self.state, self.auto, s, q
            ),
        }
    }
}

/// Result of checking an explicit ranking table; empty means the certificate is valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RankingReport {
    pub violations: Vec<Violation>,
}

impl RankingReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the three ranking conditions on every product tuple, reporting the
/// first violation found for each condition.
pub fn check_ranking_explicit(
    sys: &ExplicitSystem,
    spec: &BuchiSpec,
    rank: &ExplicitRanking,
) -> Result<RankingReport, ModelError> {
    if !rank.is_total(sys.num_states(), spec.num_states()) {
        return Err(ModelError::Invalid("ranking table is not total on S x Q".into()));
    }
    let letters = sys.letters(spec)?;
    let mut report = RankingReport::default();

    'init: for &s in &sys.init {
        for &q in &spec.init {
            if rank.get(s, q) == Rank::Infinite {
                report.violations.push(Violation { condition: Condition::Init, state: s, auto: q, next: None });
                break 'init;
            }
        }
    }

    let mut step = None;
    let mut fair = None;
    for &(s, t) in &sys.transitions {
        for q in 0..spec.num_states() {
            let v = rank.get(s, q);
            if !v.is_finite() {
                continue;
            }
            for e in spec.successors(q, letters[s]) {
                let w = rank.get(t, e.to);
                if step.is_none() && v < w {
                    step = Some(Violation { condition: Condition::Step, state: s, auto: q, next: Some((t, e.to)) });
                }
                if e.fair && fair.is_none() && v <= w {
                    fair = Some(Violation { condition: Condition::Fair, state: s, auto: q, next: Some((t, e.to)) });
                }
            }
        }
        if step.is_some() && fair.is_some() {
            break;
        }
    }
    report.violations.extend(step);
    report.violations.extend(fair);
    Ok(report)
}

/// A well-formedness defect of a piecewise ranking.
#[derive(Clone, Debug, PartialEq)]
pub enum WellformednessIssue {
    /// Two cases at the same automaton state overlap; `witness` lies in both.
    Overlap { auto: usize, first: usize, second: usize, witness: Vec<Rational> },
    /// Some point lies outside every case.
    Gap { auto: usize, witness: Vec<Rational> },
    /// A finite case can take a negative value.
    Negative { auto: usize, case: usize, witness: Vec<Rational> },
    /// Shape mismatch between ranking and specification.
    Shape(String),
}

impl fmt::Display for WellformednessIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WellformednessIssue::Overlap { auto, first, second, witness } => {
                write!(f, "cases {first} and {second} at q{auto} overlap, e.g. at {}", show(witness))
            }
            WellformednessIssue::Gap { auto, witness } => {
                write!(f, "cases at q{auto} do not cover {}", show(witness))
            }
            WellformednessIssue::Negative { auto, case, witness } => {
                write!(f, "finite case {case} at q{auto} is negative at {}", show(witness))
            }
            WellformednessIssue::Shape(msg) => f.write_str(msg),
        }
    }
}

fn show(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct WellformednessReport {
    pub issues: Vec<WellformednessIssue>,
}

impl WellformednessReport {
    pub fn is_ok(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Checks disjointness, coverage and non-negativity of every automaton state's cases.
///
/// Case indices number finite cases first, then infinite cases. All checks are
/// rational relaxations, so a report of no issues is sound for integer points.
pub fn check_wellformedness(rk: &PiecewiseRanking, spec: &BuchiSpec) -> WellformednessReport {
    let mut report = WellformednessReport::default();
    let n = spec.vars.len();
    if rk.cases.len() != spec.num_states() {
        report.issues.push(WellformednessIssue::Shape(format!(
            "ranking has {} automaton states, specification has {}",
            rk.cases.len(),
            spec.num_states()
        )));
        return report;
    }
    for (q, at) in rk.cases.iter().enumerate() {
        let widths_ok = at.finite.iter().all(|c| c.weights.len() == n) && at.polyhedra().all(|p| p.cols() == n);
        if !widths_ok {
            report.issues.push(WellformednessIssue::Shape(format!("case width mismatch at q{q}")));
            continue;
        }
        let polys: Vec<&LinSys> = at.polyhedra().collect();

        for a in 0..polys.len() {
            for b in a + 1..polys.len() {
                let mut both = polys[a].clone();
                both.stack(polys[b]);
                if let Feasibility::Sat(witness) = feasible_int(&both) {
                    report.issues.push(WellformednessIssue::Overlap { auto: q, first: a, second: b, witness });
                }
            }
        }

        if let Some(witness) = find_gap(&polys, LinSys::new(n)) {
            report.issues.push(WellformednessIssue::Gap { auto: q, witness });
        }

        for (j, case) in at.finite.iter().enumerate() {
            let mut below = case.guard.clone();
            below.push(case.weights.clone(), -case.offset - 1);
            if let Feasibility::Sat(witness) = feasible_int(&below) {
                report.issues.push(WellformednessIssue::Negative { auto: q, case: j, witness });
            }
        }
    }
    report
}

/// Searches for a point outside every polyhedron by choosing one violated
/// (negated) row per case, pruning branches that are already infeasible.
fn find_gap(polys: &[&LinSys], acc: LinSys) -> Option<Vec<Rational>> {
    let Some((first, rest)) = polys.split_first() else {
        return match feasible_int(&acc) {
            Feasibility::Sat(p) => Some(p),
            Feasibility::Unsat(_) => None,
        };
    };
    for (row, &b) in first.rows.iter().zip(&first.rhs) {
        let mut next = acc.clone();
        let (neg, nb) = negate_row(row, b);
        next.push(neg, nb);
        if feasible_int(&next).is_sat() {
            if let Some(p) = find_gap(rest, next) {
                return Some(p);
            }
        }
    }
    None
}
