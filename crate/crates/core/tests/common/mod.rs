//! Helpers shared by the integration tests: independent oracles and random instance generators.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write;
use std::sync::Arc;

use ark_ec::{AffineRepr, CurveGroup, PrimeGroup};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use ark_ff::UniformRand;
use zkmc::crypto::{pairing, Fr, G1Affine, Transcript, G1};
use zkmc::lang::{self, Unit};
use zkmc::lp::{self, FarkasWitness};
use zkmc::model::{check_wellformedness, 
    AutomatonEdge, BuchiSpec, ExplicitRanking, ExplicitSystem, Label, Letter, LinSys, PiecewiseRanking, Proposition, Rank,
    Ranking,
};
use zkmc::models::handshake_small;
use zkmc::oracle::ground;
use zkmc::protocol::explicit::{ExplicitBundle, ExplicitCertificate};
use zkmc::protocol::symbolic::{
    commit_system, prove_obligation, verify_obligation, Context, ObligationProof, Rejection, SymbolicCertificate,
    SystemCommitment, SystemOpening,
};
use zkmc::sigma::{zkmmeq, zkrp, Params, SigmaError, ZkmmProof, ZkmmeqClaim, ZkmmeqProver, ZkmmeqWitness, ZkrpProof};
use zkmc::symbolic::{gen_obligations, PublicObligation};

pub fn parse(source: &str) -> Unit {
    lang::parse(source).unwrap_or_else(|d| panic!("{d:?}\n{source}"))
}

pub fn piecewise(unit: &Unit) -> &PiecewiseRanking {
    match &unit.ranking {
        Ranking::Piecewise(p) => p,
        Ranking::Table(_) => panic!("expected a piecewise ranking"),
    }
}

// ---- Fourier–Motzkin ---------------------------------------------------------

/// Rational feasibility of `rows · x ≤ rhs` by eliminating one variable at a time.
pub fn fm_feasible(sys: &LinSys) -> bool {
    let q = |v: i64| BigRational::from_integer(BigInt::from(v));
    let mut rows: Vec<(Vec<BigRational>, BigRational)> =
        sys.rows.iter().zip(&sys.rhs).map(|(r, &b)| (r.iter().map(|&v| q(v)).collect(), q(b))).collect();
    for k in 0..sys.cols() {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for (r, b) in rows {
            if r[k].is_positive() {
                pos.push((r, b));
            } else if r[k].is_negative() {
                neg.push((r, b));
            } else {
                rest.push((r, b));
            }
        }
        for (p, pb) in &pos {
            for (n, nb) in &neg {
                // p/p_k − n/n_k eliminates x_k with nonnegative multipliers.
                let (a, c) = (n[k].abs(), p[k].clone());
                let row: Vec<BigRational> = p.iter().zip(n).map(|(x, y)| x * &a + y * &c).collect();
                rest.push((row, pb * &a + nb * &c));
            }
        }
        rows = rest;
    }
    rows.iter().all(|(_, b)| !b.is_negative())
}

// ---- explicit instances ------------------------------------------------------

/// Random labelled graph over `{p0, p1}` with `2..=max_states` states.
pub fn random_explicit(rng: &mut impl Rng, max_states: usize) -> ExplicitSystem {
    let n = rng.gen_range(2..=max_states);
    let labels = (0..n)
        .map(|_| (0..2).filter(|_| rng.gen_bool(0.5)).map(|i| format!("p{i}")).collect::<BTreeSet<_>>())
        .collect();
    let init = (0..rng.gen_range(1..=2)).map(|_| rng.gen_range(0..n)).collect();
    let density = rng.gen_range(1.0..3.0) / n as f64;
    let mut transitions = BTreeSet::new();
    for s in 0..n {
        transitions.insert((s, rng.gen_range(0..n)));
        for t in 0..n {
            if rng.gen_bool(density.min(1.0)) {
                transitions.insert((s, t));
            }
        }
    }
    ExplicitSystem { labels, init, transitions }
}

/// Random automaton over `{p0, p1}` with one to three states and at least one fair edge.
pub fn random_spec(rng: &mut impl Rng) -> BuchiSpec {
    let nq = rng.gen_range(1..=3);
    let props = (0..2).map(|i| Proposition { name: format!("p{i}"), predicate: None }).collect();
    let mut edges = Vec::new();
    for from in 0..nq {
        for _ in 0..rng.gen_range(1..=3) {
            let label = if rng.gen_bool(0.3) { Label::True } else { Label::Exactly(Letter(rng.gen_range(0..4))) };
            edges.push(AutomatonEdge { from, label, to: rng.gen_range(0..nq), fair: rng.gen_bool(0.4) });
        }
    }
    if !edges.iter().any(|e| e.fair) {
        let i = rng.gen_range(0..edges.len());
        edges[i].fair = true;
    }
    BuchiSpec { vars: Vec::new(), states: (0..nq).map(|q| format!("q{q}")).collect(), init: vec![0], props, edges }
}

/// Product edges `((s, q), (t, q'), fair)`.
pub fn product_edges(sys: &ExplicitSystem, spec: &BuchiSpec) -> Vec<((usize, usize), (usize, usize), bool)> {
    let letters = sys.letters(spec).unwrap();
    let mut out = Vec::new();
    for &(s, t) in &sys.transitions {
        for q in 0..spec.num_states() {
            for e in spec.successors(q, letters[s]) {
                out.push(((s, q), (t, e.to), e.fair));
            }
        }
    }
    out
}

/// The least valid ranking table, or `None` when an initial product state reaches a fair cycle.
///
/// Product states that can reach a fair cycle rank infinite; the rest rank by
/// the longest count of fair edges along any path, which is finite because no
/// fair edge lies on a cycle among them.
pub fn synthesize_ranking(sys: &ExplicitSystem, spec: &BuchiSpec) -> Option<ExplicitRanking> {
    let nq = spec.num_states();
    let id = |(s, q): (usize, usize)| s * nq + q;
    let nodes = sys.num_states() * nq;
    let edges = product_edges(sys, spec);
    let mut succ = vec![Vec::new(); nodes];
    let mut pred = vec![Vec::new(); nodes];
    for &(a, b, _) in &edges {
        succ[id(a)].push(id(b));
        pred[id(b)].push(id(a));
    }
    let reach = |from: usize, adj: &Vec<Vec<usize>>| {
        let mut seen = vec![false; nodes];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    };
    let mut bad = vec![false; nodes];
    for &(a, b, fair) in &edges {
        if fair && reach(id(b), &succ)[id(a)] {
            for (v, r) in reach(id(a), &pred).into_iter().enumerate() {
                bad[v] |= r;
            }
        }
    }
    if sys.init.iter().any(|&s| spec.init.iter().any(|&q| bad[id((s, q))])) {
        return None;
    }
    let mut rank = vec![0u64; nodes];
    loop {
        let mut changed = false;
        for &(a, b, fair) in &edges {
            let (a, b) = (id(a), id(b));
            if bad[a] || bad[b] {
                continue;
            }
            let need = rank[b] + fair as u64;
            if rank[a] < need {
                rank[a] = need;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let table = (0..sys.num_states())
        .map(|s| (0..nq).map(|q| if bad[id((s, q))] { Rank::Infinite } else { Rank::Finite(rank[id((s, q))]) }).collect())
        .collect();
    Some(ExplicitRanking { table })
}

/// Uniformly random table with values in `0..4` or infinite.
pub fn random_table(rng: &mut impl Rng, states: usize, nq: usize) -> ExplicitRanking {
    let table = (0..states)
        .map(|_| {
            (0..nq)
                .map(|_| if rng.gen_bool(0.2) { Rank::Infinite } else { Rank::Finite(rng.gen_range(0..4)) })
                .collect()
        })
        .collect();
    ExplicitRanking { table }
}

/// Changes one entry of a table.
pub fn perturb(rng: &mut impl Rng, rank: &ExplicitRanking) -> ExplicitRanking {
    let mut out = rank.clone();
    let s = rng.gen_range(0..out.table.len());
    let q = rng.gen_range(0..out.table[s].len());
    out.table[s][q] = match out.table[s][q] {
        Rank::Infinite => Rank::Finite(rng.gen_range(0..3)),
        Rank::Finite(0) => Rank::Finite(1),
        Rank::Finite(k) if rng.gen_bool(0.5) => Rank::Finite(k - 1),
        Rank::Finite(_) => Rank::Infinite,
    };
    out
}

// ---- symbolic instances ------------------------------------------------------

/// A random one- or two-variable guarded-command system with a proposition
/// `p := x >= k` and one of two automata, without a ranking block.
pub fn random_symbolic_prefix(rng: &mut impl Rng) -> String {
    let two = rng.gen_bool(0.4);
    let mut s = String::from("system {\n  var x in [0, 3];\n");
    if two {
        s.push_str("  var y in [0, 1];\n  init: x = 0, y = 0;\n");
    } else {
        s.push_str("  init: x = 0;\n");
    }
    for i in 0..rng.gen_range(1..=3) {
        let c = rng.gen_range(0..=3);
        let guard = ["true".to_string(), format!("x <= {c}"), format!("x >= {c}"), format!("x = {c}")]
            .choose(rng)
            .unwrap()
            .clone();
        let mut updates = vec![
            "skip".to_string(),
            "x' = x + 1".to_string(),
            "x' = x - 1".to_string(),
            format!("x' = {c}"),
            format!("x' >= 0, x' <= {c}"),
        ];
        if two {
            updates.push("y' = 1 - y".to_string());
            updates.push("x' = x + 1, y' = 1".to_string());
        }
        let update = updates.choose(rng).unwrap();
        let _ = writeln!(s, "  command c{i}: guard {guard} update {update};");
    }
    let vars = if two { "x, y" } else { "x" };
    let k = rng.gen_range(1..=3);
    let _ = writeln!(s, "}}\n\nautomaton {{\n  vars: {vars};");
    if rng.gen_bool(0.5) {
        let _ = write!(
            s,
            "  states: q0, q1;\n  init: q0;\n  aps: p := x >= {k};\n  trans:\n    q0 -- true --> q0;\n    q0 -- {{p}} --> q1;\n    q1 -- {{p}} --> q1 fair;\n}}\n"
        );
    } else {
        let _ = write!(
            s,
            "  states: q0;\n  init: q0;\n  aps: p := x >= {k};\n  trans:\n    q0 -- {{p}} --> q0 fair;\n    q0 -- {{}} --> q0;\n}}\n"
        );
    }
    s
}

/// A random ranking block for the automaton states named in the prefix,
/// built from constant pieces split at a threshold of `x`.
pub fn random_ranking_block(rng: &mut impl Rng, states: usize) -> String {
    let mut s = String::from("\nranking {\n");
    for q in 0..states {
        let t = rng.gen_range(0..=3);
        let (a, b) = (rng.gen_range(0..4), rng.gen_range(0..4));
        let body = match rng.gen_range(0..5) {
            0 => format!("    case true => {a};\n"),
            1 => format!("    case x <= {t} => {a};\n    case x >= {} => {b};\n", t + 1),
            2 => format!("    case x <= {t} => {a};\n    inf x >= {};\n", t + 1),
            3 => format!("    inf x <= {t};\n    case x >= {} => {a};\n", t + 1),
            _ => "    inf true;\n".to_string(),
        };
        let _ = write!(s, "  at q{q}:\n{body}");
    }
    s.push_str("}\n");
    s
}

/// Obligation total computed from the shapes:
/// `Σ_{q ∈ Q0} l_q + n · Σ_{(q, σ, q') ∈ δ} m_q · (l_{q'} + m_{q'})`, with `true` labels
/// counted once per letter of the alphabet.
pub fn closed_form_total(spec: &BuchiSpec, rk: &PiecewiseRanking, commands: usize) -> usize {
    let finite: Vec<usize> = rk.cases.iter().map(|c| c.finite.len()).collect();
    let inf: Vec<usize> = rk.cases.iter().map(|c| c.infinite.len()).collect();
    let alphabet = 1usize << spec.props.len();
    let init: usize = spec.init.iter().map(|&q| inf[q]).sum();
    let steps: usize = spec
        .edges
        .iter()
        .map(|e| {
            let letters = if e.label == Label::True { alphabet } else { 1 };
            letters * finite[e.from] * (inf[e.to] + finite[e.to])
        })
        .sum();
    init + commands * steps
}

// ---- protocol fixtures -------------------------------------------------------

/// A counter that climbs to 3 and stays; "infinitely often x ≤ 1" fails on every run.
pub const TINY: &str = "system {
  var x in [0, 3];
  init: x = 0;
  command inc: guard x <= 2 update x' = x + 1;
  command stay: guard x >= 3 update skip;
}

automaton {
  vars: x;
  states: q0;
  init: q0;
  aps: low := x <= 1;
  trans:
    q0 -- {low} --> q0 fair;
    q0 -- {} --> q0;
}

ranking {
  at q0:
    case x <= 1 => 2 - x;
    case x >= 2, x <= 3 => 0;
    inf x >= 4;
}
";

/// Everything needed to prove and verify single obligations of a unit.
pub struct SymbolicFixture {
    pub unit: Unit,
    pub params: Params,
    pub cert: SymbolicCertificate,
    pub obligations: Vec<PublicObligation>,
    pub witnesses: Vec<FarkasWitness>,
    pub com: SystemCommitment,
    pub opening: SystemOpening,
}

impl SymbolicFixture {
    pub fn new(source: &str, bound: u64, seed: u64) -> Self {
        let unit = lang::parse_with_bound(source, bound).unwrap_or_else(|d| panic!("{d:?}")).0;
        let sys = unit.system.clone().expect("unit has a system");
        let rk = piecewise(&unit).clone();
        let cert = SymbolicCertificate::new(unit.spec.clone(), rk.clone(), &sys, bound);
        let set = gen_obligations(&sys, &unit.spec, &rk).unwrap();
        let witnesses = lp::witnesses(&set.obligations, bound).unwrap_or_else(|(i, e)| panic!("obligation {i}: {e}"));
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let params = Params::setup(cert.params_len().unwrap(), false, &mut rng);
        let (com, opening) = commit_system(&params, &cert, &sys, &mut rng).unwrap();
        let obligations = cert.obligations().unwrap();
        SymbolicFixture { unit, params, cert, obligations, witnesses, com, opening }
    }

    pub fn prove(&self, index: usize, seed: u64) -> ObligationProof {
        let ctx = Context::new(&self.cert, &self.params);
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        prove_obligation(
            &self.params,
            &ctx,
            index,
            &self.obligations[index],
            &self.witnesses[index],
            &self.com,
            &self.opening,
            self.cert.bound,
            &mut rng,
        )
        .unwrap()
    }

    pub fn verify(&self, index: usize, proof: &ObligationProof) -> Result<(), Rejection> {
        verify_obligation(&self.params, &self.cert, index, &self.obligations[index], &self.com, proof)
    }
}

fn bump_zkrp(p: &ZkrpProof, g: G1Affine) -> ZkrpProof {
    let mut out = p.clone();
    out.entries[0] = (out.entries[0] + g).into_affine();
    out
}

fn bump_zkmm(p: &ZkmmProof) -> ZkmmProof {
    let mut out = p.clone();
    out.w_x += Fr::from(1u64);
    out
}

/// One copy of `proof` per transmitted component, with only that component altered.
pub fn tampered_components(params: &Params, proof: &ObligationProof) -> Vec<(&'static str, ObligationProof)> {
    let one = pairing(params.g(), params.g2());
    let g = params.g();
    let with = |f: &dyn Fn(&mut ObligationProof)| {
        let mut p = proof.clone();
        f(&mut p);
        p
    };
    vec![
        ("c_lambda", with(&|p| p.c_lambda += one)),
        ("c_mu", with(&|p| p.c_mu += one)),
        ("c_alpha", with(&|p| p.c_alpha += one)),
        ("c_beta", with(&|p| p.c_beta += one)),
        ("c_gamma", with(&|p| p.c_gamma += one)),
        ("pi_lambda", with(&|p| p.pi_lambda = bump_zkrp(&p.pi_lambda, g))),
        ("pi_mu", with(&|p| p.pi_mu = bump_zkrp(&p.pi_mu, g))),
        ("pi_a", with(&|p| p.pi_a = Arc::new(bump_zkrp(&p.pi_a, g)))),
        ("pi_b", with(&|p| p.pi_b = Arc::new(bump_zkrp(&p.pi_b, g)))),
        ("pi_alpha", with(&|p| p.pi_alpha = bump_zkmm(&p.pi_alpha))),
        ("pi_beta", with(&|p| p.pi_beta = bump_zkmm(&p.pi_beta))),
        ("pi_delta", with(&|p| p.pi_delta = bump_zkrp(&p.pi_delta, g))),
        ("pi_eta", with(&|p| p.pi_eta.w_x += Fr::from(1u64))),
    ]
}

/// The explicit bundle with each of `c_S0`, `c_T`, `π_S0`, `π_T` altered in turn.
pub fn tampered_explicit(bundle: &ExplicitBundle) -> Vec<(&'static str, ExplicitBundle)> {
    let g = G1Affine::generator();
    let mut out = Vec::new();
    for name in ["c_init", "c_trans", "pi_init", "pi_trans"] {
        let mut b = bundle.clone();
        let slot = match name {
            "c_init" => &mut b.c_init,
            "c_trans" => &mut b.c_trans,
            "pi_init" => &mut b.pi_init.0,
            _ => &mut b.pi_trans.0,
        };
        *slot = (*slot + g).into_affine();
        out.push((name, b));
    }
    out
}

/// The bundled 32-state handshake with its tabulated certificate.
pub fn handshake_explicit() -> (ExplicitSystem, ExplicitCertificate) {
    let unit = parse(&handshake_small().source());
    let g = ground(unit.system.as_ref().unwrap(), &unit.spec, 1 << 16).unwrap();
    let table = g.ranking(piecewise(&unit)).unwrap();
    let cert = ExplicitCertificate::new(unit.spec.clone(), table, &g.system);
    (g.system, cert)
}

/// Searches random ranking blocks for one that passes the plaintext check
/// (well-formed, every obligation infeasible, witnesses within `bound`).
pub fn find_symbolic_certificate(rng: &mut impl Rng, prefix: &str, tries: usize, bound: u64) -> Option<String> {
    let states = if prefix.contains("states: q0, q1;") { 2 } else { 1 };
    for _ in 0..tries {
        let source = format!("{prefix}{}", random_ranking_block(rng, states));
        let Ok((unit, _)) = lang::parse_with_bound(&source, bound) else { continue };
        let rk = piecewise(&unit);
        if !check_wellformedness(rk, &unit.spec).is_ok() {
            continue;
        }
        let set = gen_obligations(unit.system.as_ref().unwrap(), &unit.spec, rk).unwrap();
        if set.obligations.iter().all(|o| o.is_discharged()) && lp::witnesses(&set.obligations, bound).is_ok() {
            return Some(source);
        }
    }
    None
}

// ---- range proofs -----------------------------------------------------------

/// Proves and verifies `values ∈ [0, bound]` against a fresh commitment.
pub fn prove_values(p: &Params, values: &[i128], bound: u64, seed: u64) -> Result<bool, SigmaError> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let r = Fr::rand(&mut rng);
    let frs: Vec<Fr> = values.iter().map(|&v| Fr::from(v)).collect();
    let c = p.commit_vector(&frs, r)?;
    let proof = zkrp::prove(p, &mut Transcript::new(b"t"), &c, values, r, bound, &mut rng)?;
    Ok(zkrp::verify(p, &mut Transcript::new(b"t"), &c, values.len(), bound, &proof))
}

/// Proves `v ∈ [−M, M]` the way the protocol does: `v + M ∈ [0, 2M]` against `Com(v) · Com(M)`.
pub fn prove_shifted(p: &Params, v: i128, bound: u64, seed: u64) -> Result<bool, SigmaError> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let r = Fr::rand(&mut rng);
    let c = p.commit_vector(&[Fr::from(v), Fr::from(0u64)], r)? + p.commit_constant(1, 2, Fr::from(bound))?;
    let shifted = [v + bound as i128, bound as i128];
    let proof = zkrp::prove(p, &mut Transcript::new(b"s"), &c, &shifted, r, 2 * bound, &mut rng)?;
    Ok(zkrp::verify(p, &mut Transcript::new(b"s"), &c, 2, 2 * bound, &proof))
}

/// One simulated zkrp transcript for an arbitrary statement, checked by the verifier.
pub fn simulation_trial(seed: u64, len: usize, bound: u64) -> bool {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let p = Params::setup(4, true, &mut rng);
    // The statement need not be true: the simulator never sees an opening.
    let g = (G1::generator() * Fr::rand(&mut rng)).into_affine();
    let c = pairing(g, p.g2());
    match zkrp::simulate(&p, &mut Transcript::new(b"sim"), &c, g, len, bound, &mut rng) {
        Some(proof) => zkrp::verify(&p, &mut Transcript::new(b"sim"), &c, len, bound, &proof),
        None => false,
    }
}

/// Runs the zkmmeq prover to its first message, answers two challenges and
/// checks that the extractor recovers exactly the witness that opens `c_x`.
pub fn extraction_trial(seed: u64, len: usize, nclaims: usize) -> bool {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let p = Params::setup(4, false, &mut rng);
    let x: Vec<Fr> = (0..len).map(|_| Fr::rand(&mut rng)).collect();
    let r_x = Fr::rand(&mut rng);
    let c_x = p.commit_vector(&x, r_x).unwrap();
    let mut claims = Vec::new();
    let mut r_claims = Vec::new();
    for _ in 0..nclaims {
        let rows = rng.gen_range(1..=3);
        let matrix: Vec<Vec<Fr>> = (0..rows).map(|_| (0..len).map(|_| Fr::rand(&mut rng)).collect()).collect();
        let y: Vec<Fr> = matrix.iter().map(|row| row.iter().zip(&x).map(|(a, b)| *a * b).sum()).collect();
        let r = Fr::rand(&mut rng);
        claims.push(ZkmmeqClaim { commitment: p.commit_vector(&y, r).unwrap(), matrix });
        r_claims.push(r);
    }
    let witness = ZkmmeqWitness { x, r_x, r_claims };
    let prover = ZkmmeqProver::commit(&p, len, &claims, &mut rng).unwrap();
    let (e1, e2) = (Fr::rand(&mut rng), Fr::rand(&mut rng));
    let (a, b) = (prover.respond(&witness, e1), prover.respond(&witness, e2));
    if !zkmmeq::check(&p, &c_x, &claims, &a, e1) || !zkmmeq::check(&p, &c_x, &claims, &b, e2) {
        return false;
    }
    match zkmmeq::extract(&a, e1, &b, e2) {
        Some(w) => p.commit_vector(&w.x, w.r_x).unwrap() == c_x && w == witness,
        None => false,
    }
}
