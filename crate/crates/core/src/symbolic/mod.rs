//! Proof obligations for piecewise-linear ranking certificates.
//!
//! Every obligation is an implication of the uniform shape
//! "secret system ∧ public premise ⇒ ¬ public consequent", stored as the pair
//! of systems whose conjunction must be infeasible. Columns always span the
//! stacked vector `[x, x']`.

use serde::{Deserialize, Serialize};

use crate::lp::{feasible_int, Feasibility};
use crate::model::{BuchiSpec, Letter, LinSys, ModelError, PiecewiseRanking, SymbolicSystem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObligationKind {
    Init,
    Finiteness,
    Rank,
}

/// Which secret system an obligation is stated over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SecretRef {
    Init,
    Command(usize),
}

/// The public half of an obligation, computable without the secret system.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PublicObligation {
    pub kind: ObligationKind,
    pub source: SecretRef,
    /// Automaton edge index; for init obligations, the initial automaton state.
    pub edge: usize,
    /// Concrete letter the edge is instantiated with (absent for init obligations).
    pub letter: Option<Letter>,
    /// Finite case at the source automaton state (absent for init obligations).
    pub from_case: Option<usize>,
    /// Case at the target automaton state: infinite for init/finiteness, finite for rank.
    pub to_case: usize,
    /// Premise rows followed by consequent rows, `G_p y ≤ h_p`.
    pub public: LinSys,
    pub premise_rows: usize,
}

/// An obligation together with its secret system `A_s y ≤ b_s`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Obligation {
    pub header: PublicObligation,
    pub secret: LinSys,
}

impl std::ops::Deref for Obligation {
    type Target = PublicObligation;
    fn deref(&self) -> &PublicObligation {
        &self.header
    }
}

impl Obligation {
    /// The conjunction that must be infeasible.
    pub fn primal(&self) -> LinSys {
        let mut sys = self.secret.clone();
        sys.stack(&self.header.public);
        sys
    }

    pub fn is_discharged(&self) -> bool {
        !feasible_int(&self.primal()).is_sat()
    }
}

/// Closed-form obligation counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub init: usize,
    pub finiteness: usize,
    pub rank: usize,
}

impl Counts {
    pub fn total(&self) -> usize {
        self.init + self.finiteness + self.rank
    }
}

/// Obligation counts from the shapes alone.
///
/// With uniform case counts this is `l·|Q0| + n·m·l·|δ| + n·m²·|δ|`, where `|δ|`
/// counts edges after expanding `true` labels; per-state counts are summed.
pub fn count(spec: &BuchiSpec, rk: &PiecewiseRanking, commands: usize) -> Counts {
    let shape = rk.shape();
    let init = spec.init.iter().map(|&q| shape[q].1).sum();
    let mut fin = 0;
    let mut rank = 0;
    for (e, _) in spec.expanded_edges() {
        let edge = &spec.edges[e];
        fin += shape[edge.from].0 * shape[edge.to].1;
        rank += shape[edge.from].0 * shape[edge.to].0;
    }
    Counts { init, finiteness: commands * fin, rank: commands * rank }
}

/// Public halves of all obligations, in canonical order.
pub fn public_obligations(
    spec: &BuchiSpec,
    rk: &PiecewiseRanking,
    nvars: usize,
    commands: usize,
) -> Result<Vec<PublicObligation>, ModelError> {
    let mut out = gen_init_public(spec, rk, nvars);
    out.extend(gen_step_public(spec, rk, nvars, commands, ObligationKind::Finiteness)?);
    out.extend(gen_step_public(spec, rk, nvars, commands, ObligationKind::Rank)?);
    Ok(out)
}

fn gen_init_public(spec: &BuchiSpec, rk: &PiecewiseRanking, n: usize) -> Vec<PublicObligation> {
    let mut qs = spec.init.clone();
    qs.sort_unstable();
    qs.dedup();
    let mut out = Vec::new();
    for q in qs {
        for (k, region) in rk.cases[q].infinite.iter().enumerate() {
            out.push(PublicObligation {
                kind: ObligationKind::Init,
                source: SecretRef::Init,
                edge: q,
                letter: None,
                from_case: None,
                to_case: k,
                public: region.embed(2 * n, 0),
                premise_rows: 0,
            });
        }
    }
    out
}

fn gen_step_public(
    spec: &BuchiSpec,
    rk: &PiecewiseRanking,
    n: usize,
    commands: usize,
    kind: ObligationKind,
) -> Result<Vec<PublicObligation>, ModelError> {
    let expanded = spec.expanded_edges();
    let mut letters = Vec::with_capacity(expanded.len());
    for &(_, l) in &expanded {
        letters.push(spec.sigma_to_polyhedron(l)?.embed(2 * n, 0));
    }
    let mut out = Vec::new();
    for i in 0..commands {
        for (d, &(e, letter)) in expanded.iter().enumerate() {
            let edge = &spec.edges[e];
            let (src, dst) = (&rk.cases[edge.from], &rk.cases[edge.to]);
            for (j, case) in src.finite.iter().enumerate() {
                let mut premise = letters[d].clone();
                premise.stack(&case.guard.embed(2 * n, 0));
                // Each entry is (premise, consequent); rank obligations also assume the target guard on x'.
                let parts: Vec<(LinSys, LinSys)> = match kind {
                    ObligationKind::Finiteness => {
                        dst.infinite.iter().map(|r| (premise.clone(), r.embed(2 * n, n))).collect()
                    }
                    ObligationKind::Rank => dst
                        .finite
                        .iter()
                        .map(|target| {
                            let mut full = premise.clone();
                            full.stack(&target.guard.embed(2 * n, n));
                            let mut row = case.weights.clone();
                            row.extend(target.weights.iter().map(|w| -w));
                            let bound = target.offset - case.offset + edge.fair as i64 - 1;
                            (full, LinSys::from_rows(2 * n, vec![(row, bound)]))
                        })
                        .collect(),
                    ObligationKind::Init => unreachable!(),
                };
                for (k, (mut public, consequent)) in parts.into_iter().enumerate() {
                    let premise_rows = public.len();
                    public.stack(&consequent);
                    out.push(PublicObligation {
                        kind,
                        source: SecretRef::Command(i),
                        edge: d,
                        letter: Some(letter),
                        from_case: Some(j),
                        to_case: k,
                        public,
                        premise_rows,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// The secret system an obligation refers to, padded to `[x, x']`.
pub fn secret_system(sys: &SymbolicSystem, source: SecretRef) -> LinSys {
    let n = sys.num_vars();
    match source {
        SecretRef::Init => sys.init.embed(2 * n, 0),
        SecretRef::Command(i) => sys.commands[i].relation.clone(),
    }
}

/// All obligations of a model with their counts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObligationSet {
    pub obligations: Vec<Obligation>,
    pub counts: Counts,
}

pub fn gen_obligations(
    sys: &SymbolicSystem,
    spec: &BuchiSpec,
    rk: &PiecewiseRanking,
) -> Result<ObligationSet, ModelError> {
    let headers = public_obligations(spec, rk, sys.num_vars(), sys.commands.len())?;
    let obligations = headers
        .into_iter()
        .map(|header| {
            let secret = secret_system(sys, header.source);
            Obligation { header, secret }
        })
        .collect();
    Ok(ObligationSet { obligations, counts: count(spec, rk, sys.commands.len()) })
}

pub fn gen_init(sys: &SymbolicSystem, spec: &BuchiSpec, rk: &PiecewiseRanking) -> Vec<Obligation> {
    attach(sys, gen_init_public(spec, rk, sys.num_vars()))
}

pub fn gen_finiteness(
    sys: &SymbolicSystem,
    spec: &BuchiSpec,
    rk: &PiecewiseRanking,
) -> Result<Vec<Obligation>, ModelError> {
    let public = gen_step_public(spec, rk, sys.num_vars(), sys.commands.len(), ObligationKind::Finiteness)?;
    Ok(attach(sys, public))
}

pub fn gen_rank(sys: &SymbolicSystem, spec: &BuchiSpec, rk: &PiecewiseRanking) -> Result<Vec<Obligation>, ModelError> {
    let public = gen_step_public(spec, rk, sys.num_vars(), sys.commands.len(), ObligationKind::Rank)?;
    Ok(attach(sys, public))
}

fn attach(sys: &SymbolicSystem, headers: Vec<PublicObligation>) -> Vec<Obligation> {
    headers
        .into_iter()
        .map(|header| Obligation { secret: secret_system(sys, header.source), header })
        .collect()
}

/// Plaintext summary: indices of obligations whose primal system is feasible.
pub fn undischarged(set: &ObligationSet) -> Vec<(usize, Feasibility)> {
    set.obligations
        .iter()
        .enumerate()
        .filter_map(|(i, ob)| match feasible_int(&ob.primal()) {
            f @ Feasibility::Sat(_) => Some((i, f)),
            Feasibility::Unsat(_) => None,
        })
        .collect()
}
