//! A deliberately naive model checker used to cross-check the certifiers.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::model::{
    BuchiSpec, ExplicitRanking, ExplicitSystem, ModelError, PiecewiseRanking, Rank, SymbolicSystem,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("grounding would produce {states} states, limit is {limit}")]
    TooLarge { states: u128, limit: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// The reachable part of the synchronous product.
#[derive(Clone, Debug, Default)]
pub struct ProductGraph {
    /// Product nodes `(s, q)`.
    pub nodes: Vec<(usize, usize)>,
    /// Edges `(from, to, fair)` over node indices.
    pub edges: Vec<(usize, usize, bool)>,
}

impl ProductGraph {
    pub fn build(sys: &ExplicitSystem, spec: &BuchiSpec) -> Result<Self, ModelError> {
        let letters = sys.letters(spec)?;
        let succ = sys.successors();
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut graph = ProductGraph::default();
        let mut stack = Vec::new();
        for &s in &sys.init {
            for &q in &spec.init {
                if let std::collections::hash_map::Entry::Vacant(v) = index.entry((s, q)) {
                    v.insert(graph.nodes.len());
                    graph.nodes.push((s, q));
                    stack.push((s, q));
                }
            }
        }
        while let Some((s, q)) = stack.pop() {
            let from = index[&(s, q)];
            for &t in &succ[s] {
                for e in spec.successors(q, letters[s]) {
                    let key = (t, e.to);
                    let to = *index.entry(key).or_insert_with(|| {
                        graph.nodes.push(key);
                        stack.push(key);
                        graph.nodes.len() - 1
                    });
                    graph.edges.push((from, to, e.fair));
                }
            }
        }
        Ok(graph)
    }

    /// Strongly connected component id per node (iterative Tarjan).
    pub fn components(&self) -> Vec<usize> {
        let n = self.nodes.len();
        let mut adj = vec![Vec::new(); n];
        for &(a, b, _) in &self.edges {
            adj[a].push(b);
        }
        const UNSEEN: usize = usize::MAX;
        let mut order = vec![UNSEEN; n];
        let mut low = vec![0; n];
        let mut comp = vec![UNSEEN; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut counter = 0;
        let mut ncomp = 0;
        for root in 0..n {
            if order[root] != UNSEEN {
                continue;
            }
            let mut work = vec![(root, 0usize)];
            order[root] = counter;
            low[root] = counter;
            counter += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut i)) = work.last_mut() {
                if let Some(&w) = adj[v].get(*i) {
                    *i += 1;
                    if order[w] == UNSEEN {
                        order[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        work.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(order[w]);
                    }
                } else {
                    work.pop();
                    if let Some(&(parent, _)) = work.last() {
                        low[parent] = low[parent].min(low[v]);
                    }
                    if low[v] == order[v] {
                        loop {
                            let w = stack.pop().expect("tarjan stack underflow");
                            on_stack[w] = false;
                            comp[w] = ncomp;
                            if w == v {
                                break;
                            }
                        }
                        ncomp += 1;
                    }
                }
            }
        }
        comp
    }
}

/// Is there a reachable cycle of the product that uses a fair edge?
pub fn fair_cycle_exists(sys: &ExplicitSystem, spec: &BuchiSpec) -> Result<bool, ModelError> {
    let graph = ProductGraph::build(sys, spec)?;
    let comp = graph.components();
    Ok(graph.edges.iter().any(|&(a, b, fair)| fair && comp[a] == comp[b]))
}

/// An explicit system obtained by enumerating the declared variable ranges.
#[derive(Clone, Debug)]
pub struct Grounded {
    pub system: ExplicitSystem,
    /// Integer valuation of each explicit state.
    pub points: Vec<Vec<i64>>,
}

impl Grounded {
    pub fn index_of(&self, x: &[i64]) -> Option<usize> {
        self.points.binary_search_by(|p| p.as_slice().cmp(x)).ok()
    }

    /// Tabulates a piecewise ranking on the grounded states; `None` if a state is uncovered.
    pub fn ranking(&self, rk: &PiecewiseRanking) -> Option<ExplicitRanking> {
        let table = self
            .points
            .iter()
            .map(|x| (0..rk.cases.len()).map(|q| rk.eval(x, q)).collect::<Option<Vec<Rank>>>())
            .collect::<Option<Vec<_>>>()?;
        Some(ExplicitRanking { table })
    }
}

/// Enumerates every integer point of the declared box and every transition
/// between box points allowed by some command.
pub fn ground(sys: &SymbolicSystem, spec: &BuchiSpec, limit: usize) -> Result<Grounded, OracleError> {
    let n = sys.num_vars();
    let size: u128 = sys.vars.iter().map(|v| (v.hi - v.lo + 1) as u128).product();
    if size > limit as u128 {
        return Err(OracleError::TooLarge { states: size, limit });
    }
    let points = box_points(&sys.vars.iter().map(|v| (v.lo, v.hi)).collect::<Vec<_>>());
    let mut labels = Vec::with_capacity(points.len());
    for x in &points {
        let letter = spec.observe(x)?;
        labels.push(letter.indices().map(|i| spec.props[i].name.clone()).collect::<BTreeSet<_>>());
    }
    let init = points.iter().enumerate().filter(|(_, x)| sys.init.contains(x)).map(|(i, _)| i).collect();

    let lookup = |x: &[i64]| points.binary_search_by(|p| p.as_slice().cmp(x)).ok();
    let mut transitions = BTreeSet::new();
    let mut y = vec![0i64; 2 * n];
    for (si, x) in points.iter().enumerate() {
        y[..n].copy_from_slice(x);
        for cmd in &sys.commands {
            let Some(ranges) = successor_ranges(&cmd.relation, x, &sys.vars) else { continue };
            for next in box_points(&ranges) {
                y[n..].copy_from_slice(&next);
                if cmd.relation.contains(&y) {
                    if let Some(ti) = lookup(&next) {
                        transitions.insert((si, ti));
                    }
                }
            }
        }
    }
    let system = ExplicitSystem { labels, init, transitions };
    Ok(Grounded { system, points })
}

/// Tightens the successor box using rows that constrain a single primed variable.
/// Returns `None` when some row mentioning only current variables already fails.
fn successor_ranges(rel: &crate::model::LinSys, x: &[i64], vars: &[crate::model::VarDecl]) -> Option<Vec<(i64, i64)>> {
    let n = x.len();
    let mut ranges: Vec<(i64, i64)> = vars.iter().map(|v| (v.lo, v.hi)).collect();
    for (row, &b) in rel.rows.iter().zip(&rel.rhs) {
        let fixed: i128 = row[..n].iter().zip(x).map(|(&a, &v)| a as i128 * v as i128).sum();
        let rest = b as i128 - fixed;
        let primed: Vec<usize> = (0..n).filter(|&k| row[n + k] != 0).collect();
        match primed.as_slice() {
            [] => {
                if rest < 0 {
                    return None;
                }
            }
            [k] => {
                let a = row[n + k] as i128;
                let (lo, hi) = &mut ranges[*k];
                if a > 0 {
                    *hi = (*hi as i128).min(rest.div_euclid(a)) as i64;
                } else {
                    let bound = -rest.div_euclid(-a);
                    *lo = (*lo as i128).max(bound) as i64;
                }
            }
            _ => {}
        }
    }
    ranges.iter().all(|(lo, hi)| lo <= hi).then_some(ranges)
}

/// All integer points of a box in lexicographic order.
fn box_points(ranges: &[(i64, i64)]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::with_capacity(ranges.len())];
    for &(lo, hi) in ranges {
        let mut next = Vec::with_capacity(out.len() * (hi - lo + 1).max(0) as usize);
        for p in &out {
            for v in lo..=hi {
                let mut q = p.clone();
                q.push(v);
                next.push(q);
            }
        }
        out = next;
    }
    out
}
