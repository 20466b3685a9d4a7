//! Symbolic scheme: one zero-knowledge Farkas proof per obligation.
//!
//! The prover commits once to every secret system (the initial condition and
//! each guarded command) as `c_A = Com(A_sᵀ)` and `c_b = Com(−b_sᵀ)`, together
//! with range proofs that their entries lie in `[−M, M]`. For each obligation
//! it then proves knowledge of bounded `λ, μ` with `A_sᵀλ + G_pᵀμ = 0` and
//! `−b_sᵀλ − h_pᵀμ − 1 ≥ 0`.

use std::sync::Arc;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use thiserror::Error;

use ark_ff::UniformRand;

use crate::crypto::{pairing, CodecError, Fr, Gt, Reader, Transcript, Writer};
use crate::lang::print_certificate;
use crate::lp::FarkasWitness;
use crate::model::{BuchiSpec, LinSys, ModelError, PiecewiseRanking, Ranking, SymbolicSystem};
use crate::sigma::{zkmm, zkmmeq, zkrp, Params, SigmaError, ZkmmProof, ZkmmeqClaim, ZkmmeqProof, ZkmmeqWitness, ZkrpProof};
use crate::symbolic::{public_obligations, secret_system, PublicObligation, SecretRef};

const BUNDLE_MAGIC: &[u8; 4] = b"ZKSP";

/// Default number of obligations in flight at once.
pub const DEFAULT_BATCH: usize = 200;

#[derive(Debug, Error)]
pub enum SymbolicProtocolError {
    #[error("obligation {index}: the Farkas witness is invalid ({reason})")]
    WitnessInvalid { index: usize, reason: String },
    #[error("system does not match the certificate: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Sigma(#[from] SigmaError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// The eight verifier checks, in the order they are run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Check {
    Lambda = 1,
    Mu = 2,
    ShiftA = 3,
    ShiftB = 4,
    Alpha = 5,
    Beta = 6,
    Delta = 7,
    Eta = 8,
}

impl Check {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn describe(self) -> &'static str {
        match self {
            Check::Lambda => "range proof for λ",
            Check::Mu => "range proof for μ",
            Check::ShiftA => "range proof for the shifted secret matrix",
            Check::ShiftB => "range proof for the shifted secret bounds",
            Check::Alpha => "product proof for α = A_sᵀλ",
            Check::Beta => "product proof for β = −b_sᵀλ",
            Check::Delta => "range proof for the slack δ",
            Check::Eta => "equality proof tying α and γ to μ",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rejection {
    /// Check `n` (1-based) failed.
    Failed(Check),
    DigestMismatch,
    ParamsMismatch,
    Malformed(String),
}

impl std::fmt::Display for Rejection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Rejection::Failed(c) => write!(f, "check {} failed: {}", c.index(), c.describe()),
            Rejection::DigestMismatch => f.write_str("bundle was produced for a different certificate"),
            Rejection::ParamsMismatch => f.write_str("bundle was produced under different public parameters"),
            Rejection::Malformed(m) => write!(f, "malformed bundle: {m}"),
        }
    }
}

/// Zero-coefficient row appended to empty systems so every vector is non-empty.
fn padded(sys: &LinSys) -> LinSys {
    let mut out = sys.clone();
    if out.is_empty() {
        out.push(vec![0; out.cols()], 0);
    }
    out
}

fn source_index(s: SecretRef) -> usize {
    match s {
        SecretRef::Init => 0,
        SecretRef::Command(i) => i + 1,
    }
}

fn source_of(index: usize) -> SecretRef {
    if index == 0 {
        SecretRef::Init
    } else {
        SecretRef::Command(index - 1)
    }
}

/// Everything the verifier knows: the certificate, the variable count, the row count of
/// every secret system and the coefficient bound `M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicCertificate {
    pub spec: BuchiSpec,
    pub ranking: PiecewiseRanking,
    pub vars: usize,
    /// Rows of the initial condition, then of each command (at least one each).
    pub secret_rows: Vec<usize>,
    pub bound: u64,
}

impl SymbolicCertificate {
    pub fn new(spec: BuchiSpec, ranking: PiecewiseRanking, sys: &SymbolicSystem, bound: u64) -> Self {
        let secret_rows = (0..=sys.commands.len()).map(|s| padded(&secret_system(sys, source_of(s))).len()).collect();
        SymbolicCertificate { spec, ranking, vars: sys.num_vars(), secret_rows, bound }
    }

    /// Certificate for a verifier that knows the row counts from a bundle header.
    pub fn from_public(spec: BuchiSpec, ranking: PiecewiseRanking, secret_rows: Vec<usize>, bound: u64) -> Self {
        SymbolicCertificate { vars: spec.vars.len(), spec, ranking, secret_rows, bound }
    }

    pub fn commands(&self) -> usize {
        self.secret_rows.len().saturating_sub(1)
    }

    pub fn obligations(&self) -> Result<Vec<PublicObligation>, ModelError> {
        public_obligations(&self.spec, &self.ranking, self.vars, self.commands())
    }

    /// Parameter length that covers every commitment and sub-proof of this certificate.
    pub fn params_len(&self) -> Result<usize, ModelError> {
        let cols = 2 * self.vars;
        let secret = self.secret_rows.iter().map(|&r| cols * r).max().unwrap_or(0);
        let public = self.obligations()?.iter().map(|o| o.public.len().max(1)).max().unwrap_or(1);
        Ok(secret.max(public).max(cols).max(2))
    }

    /// SHA-256 over the printed certificate, the dimensions and the bound.
    pub fn digest(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(b"zkmc-symbolic-certificate");
        let printed = print_certificate(&self.spec, &Ranking::Piecewise(self.ranking.clone()));
        h.update((printed.len() as u64).to_le_bytes());
        h.update(printed.as_bytes());
        h.update((self.vars as u64).to_le_bytes());
        h.update((self.secret_rows.len() as u64).to_le_bytes());
        for r in &self.secret_rows {
            h.update((*r as u64).to_le_bytes());
        }
        h.update(self.bound.to_le_bytes());
        h.finalize().into()
    }
}

/// Public commitment to one secret system with its cached shift proofs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceCommitment {
    pub c_a: Gt,
    pub c_b: Gt,
    pub pi_a: Arc<ZkrpProof>,
    pub pi_b: Arc<ZkrpProof>,
}

/// Commitments to the initial condition and to every command, in that order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemCommitment {
    pub sources: Vec<SourceCommitment>,
}

/// Prover-side openings of a [`SystemCommitment`].
#[derive(Clone, Debug)]
pub struct SystemOpening {
    systems: Vec<LinSys>,
    r_a: Vec<Fr>,
    r_b: Vec<Fr>,
}

/// The thirteen transmitted components of one obligation proof.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObligationProof {
    pub c_lambda: Gt,
    pub c_mu: Gt,
    pub c_alpha: Gt,
    pub c_beta: Gt,
    pub c_gamma: Gt,
    pub pi_lambda: ZkrpProof,
    pub pi_mu: ZkrpProof,
    pub pi_a: Arc<ZkrpProof>,
    pub pi_b: Arc<ZkrpProof>,
    pub pi_alpha: ZkmmProof,
    pub pi_beta: ZkmmProof,
    pub pi_delta: ZkrpProof,
    pub pi_eta: ZkmmeqProof,
}

/// Transcript binding: certificate digest, parameter digest and, per obligation, its index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Context {
    pub model_digest: [u8; 32],
    pub params_digest: [u8; 32],
}

impl Context {
    pub fn new(cert: &SymbolicCertificate, params: &Params) -> Self {
        Context { model_digest: cert.digest(), params_digest: params.digest() }
    }

    fn transcript(&self) -> Transcript {
        let mut t = Transcript::new(b"zkmc-symbolic");
        t.append_message(b"model", &self.model_digest);
        t.append_message(b"params", &self.params_digest);
        t
    }

    fn source_transcript(&self, source: usize, what: &[u8]) -> Transcript {
        let mut t = self.transcript();
        t.append_u64(b"source", source as u64);
        t.append_message(b"shift", what);
        t
    }
}

fn sub(tr: &Transcript, label: &[u8]) -> Transcript {
    let mut t = tr.clone();
    t.append_message(b"sub-proof", label);
    t
}

/// `A_sᵀ` as a row-major `cols × rows` matrix of integers.
fn transpose(sys: &LinSys) -> Vec<Vec<i64>> {
    (0..sys.cols()).map(|i| sys.rows.iter().map(|row| row[i]).collect()).collect()
}

fn to_fr(rows: &[Vec<i64>]) -> Vec<Vec<Fr>> {
    rows.iter().map(|r| r.iter().map(|&v| Fr::from(v)).collect()).collect()
}

fn neg_row(v: &[i64]) -> Vec<Vec<Fr>> {
    vec![v.iter().map(|&x| -Fr::from(x)).collect()]
}

fn frs(v: &[i128]) -> Vec<Fr> {
    v.iter().map(|&x| Fr::from(x)).collect()
}

fn shift_constants(params: &Params, rows: usize, cols: usize, bound: u64) -> Result<Gt, SigmaError> {
    params.commit_constant(rows, cols, Fr::from(bound))
}

/// Derives independent per-item seeds so results do not depend on scheduling or batching.
fn item_rng(master: &[u8; 32], domain: &[u8], index: usize) -> ChaCha20Rng {
    let mut h = Sha256::new();
    h.update(master);
    h.update(domain);
    h.update((index as u64).to_le_bytes());
    ChaCha20Rng::from_seed(h.finalize().into())
}

/// Commits to every secret system and proves its coefficients lie in `[−M, M]`.
pub fn commit_system(
    params: &Params,
    cert: &SymbolicCertificate,
    sys: &SymbolicSystem,
    rng: &mut impl RngCore,
) -> Result<(SystemCommitment, SystemOpening), SymbolicProtocolError> {
    if sys.num_vars() != cert.vars || sys.commands.len() != cert.commands() {
        return Err(SymbolicProtocolError::Mismatch("variable or command count differs".into()));
    }
    let ctx = Context::new(cert, params);
    let mut master = [0u8; 32];
    rng.fill_bytes(&mut master);
    let systems: Vec<LinSys> = (0..cert.secret_rows.len()).map(|s| padded(&secret_system(sys, source_of(s)))).collect();
    if systems.iter().map(LinSys::len).ne(cert.secret_rows.iter().copied()) {
        return Err(SymbolicProtocolError::Mismatch("secret row counts differ".into()));
    }
    let bound = cert.bound;
    let per_source: Vec<Result<(SourceCommitment, Fr, Fr), SymbolicProtocolError>> = systems
        .par_iter()
        .enumerate()
        .map(|(s, l)| {
            let mut rng = item_rng(&master, b"source", s);
            let (r_a, r_b) = (Fr::rand(&mut rng), Fr::rand(&mut rng));
            let at = transpose(l);
            let (m, n) = (l.cols(), l.len());
            let c_a = params.commit_matrix(&to_fr(&at), r_a)?;
            let c_b = params.commit_matrix(&neg_row(&l.rhs), r_b)?;
            // Column-major entries of A_sᵀ are the rows of A_s in order.
            let shift = |v: i64| v as i128 + bound as i128;
            let a_vals: Vec<i128> = l.rows.iter().flatten().map(|&v| shift(v)).collect();
            let b_vals: Vec<i128> = l.rhs.iter().map(|&v| shift(-v)).collect();
            let c_theta = shift_constants(params, m, n, bound)?;
            let c_theta_b = shift_constants(params, 1, n, bound)?;
            let pi_a = zkrp::prove(
                params,
                &mut ctx.source_transcript(s, b"A"),
                &(c_a + c_theta),
                &a_vals,
                r_a,
                2 * bound,
                &mut rng,
            )?;
            let pi_b = zkrp::prove(
                params,
                &mut ctx.source_transcript(s, b"b"),
                &(c_b + c_theta_b),
                &b_vals,
                r_b,
                2 * bound,
                &mut rng,
            )?;
            Ok((SourceCommitment { c_a, c_b, pi_a: Arc::new(pi_a), pi_b: Arc::new(pi_b) }, r_a, r_b))
        })
        .collect();
    let mut sources = Vec::new();
    let (mut r_a, mut r_b) = (Vec::new(), Vec::new());
    for item in per_source {
        let (c, a, b) = item?;
        sources.push(c);
        r_a.push(a);
        r_b.push(b);
    }
    Ok((SystemCommitment { sources }, SystemOpening { systems, r_a, r_b }))
}

fn obligation_transcript(ctx: &Context, index: usize, ob: &PublicObligation, com: &SourceCommitment) -> Transcript {
    let mut t = ctx.transcript();
    t.append_u64(b"obligation", index as u64);
    t.append_u64(b"source", source_index(ob.source) as u64);
    let public = padded(&ob.public);
    t.append_u64(b"public-rows", public.len() as u64);
    for (row, b) in public.rows.iter().zip(&public.rhs) {
        let v: Vec<Fr> = row.iter().chain([b]).map(|&x| Fr::from(x)).collect();
        t.append_all(b"public-row", &v);
    }
    t.append(b"c_A", &com.c_a);
    t.append(b"c_b", &com.c_b);
    t
}

fn absorb_commitments(t: &mut Transcript, p: &[Gt; 5]) {
    t.append_all(b"obligation-commitments", p);
}

fn eta_claims(public: &LinSys, c_alpha: Gt, c_gamma: Gt) -> Vec<ZkmmeqClaim> {
    let neg_gt: Vec<Vec<Fr>> = (0..public.cols()).map(|i| public.rows.iter().map(|r| -Fr::from(r[i])).collect()).collect();
    vec![
        ZkmmeqClaim { commitment: c_alpha, matrix: neg_gt },
        ZkmmeqClaim { commitment: c_gamma, matrix: neg_row(&public.rhs) },
    ]
}

/// `c_δ = c_β · c_γ · Com(−1; 0)`.
fn delta_commitment(params: &Params, c_beta: Gt, c_gamma: Gt) -> Gt {
    c_beta + c_gamma - pairing(params.g(), params.g2())
}

/// Proves one obligation from a plaintext-valid Farkas witness.
#[allow(clippy::too_many_arguments)]
pub fn prove_obligation(
    params: &Params,
    ctx: &Context,
    index: usize,
    ob: &PublicObligation,
    wit: &FarkasWitness,
    com: &SystemCommitment,
    opening: &SystemOpening,
    bound: u64,
    rng: &mut impl RngCore,
) -> Result<ObligationProof, SymbolicProtocolError> {
    let invalid = |reason: String| SymbolicProtocolError::WitnessInvalid { index, reason };
    let s = source_index(ob.source);
    let (secret, source) = match (opening.systems.get(s), com.sources.get(s)) {
        (Some(l), Some(c)) => (l, c),
        _ => return Err(SymbolicProtocolError::Mismatch(format!("no commitment for source {s}"))),
    };
    let public = padded(&ob.public);
    let mut lambda = wit.lambda.clone();
    let mut mu = wit.mu.clone();
    lambda.resize(secret.len(), 0);
    mu.resize(public.len(), 0);
    let wit = FarkasWitness { lambda, mu, slack: wit.slack };
    if !wit.verify(secret, &public) {
        return Err(invalid("does not re-verify against the obligation".into()));
    }
    if let Some(v) = wit.lambda.iter().chain(&wit.mu).chain([&wit.slack]).find(|&&v| v > bound) {
        return Err(invalid(format!("entry {v} exceeds the bound {bound}")));
    }

    let (r_a, r_b) = (opening.r_a[s], opening.r_b[s]);
    let lambda: Vec<i128> = wit.lambda.iter().map(|&v| v as i128).collect();
    let mu: Vec<i128> = wit.mu.iter().map(|&v| v as i128).collect();
    let at = transpose(secret);
    let alpha: Vec<i128> = at.iter().map(|row| row.iter().zip(&lambda).map(|(&a, l)| a as i128 * l).sum()).collect();
    let beta: i128 = -secret.rhs.iter().zip(&lambda).map(|(&b, l)| b as i128 * l).sum::<i128>();
    let gamma: i128 = -public.rhs.iter().zip(&mu).map(|(&h, m)| h as i128 * m).sum::<i128>();
    let delta = beta + gamma - 1;

    let r: Vec<Fr> = (0..5).map(|_| Fr::rand(rng)).collect();
    let (r_lambda, r_mu, r_alpha, r_beta, r_gamma) = (r[0], r[1], r[2], r[3], r[4]);
    let (lambda_fr, mu_fr) = (frs(&lambda), frs(&mu));
    let c_lambda = params.commit_vector(&lambda_fr, r_lambda)?;
    let c_mu = params.commit_vector(&mu_fr, r_mu)?;
    let c_alpha = params.commit_vector(&frs(&alpha), r_alpha)?;
    let c_beta = params.commit_vector(&[Fr::from(beta)], r_beta)?;
    let c_gamma = params.commit_vector(&[Fr::from(gamma)], r_gamma)?;
    let c_delta = delta_commitment(params, c_beta, c_gamma);

    let mut tr = obligation_transcript(ctx, index, ob, source);
    absorb_commitments(&mut tr, &[c_lambda, c_mu, c_alpha, c_beta, c_gamma]);
    let range_err = |e: SigmaError| match e {
        SigmaError::OutOfRange { .. } => invalid(e.to_string()),
        other => other.into(),
    };
    let pi_lambda = zkrp::prove(params, &mut sub(&tr, b"lambda"), &c_lambda, &lambda, r_lambda, bound, rng).map_err(range_err)?;
    let pi_mu = zkrp::prove(params, &mut sub(&tr, b"mu"), &c_mu, &mu, r_mu, bound, rng).map_err(range_err)?;
    let (_, _, pi_alpha) =
        zkmm::prove(params, &mut sub(&tr, b"alpha"), &to_fr(&at), &source.c_a, r_a, &lambda_fr, &c_lambda, r_lambda, r_alpha, rng)?;
    let (_, _, pi_beta) = zkmm::prove(
        params,
        &mut sub(&tr, b"beta"),
        &neg_row(&secret.rhs),
        &source.c_b,
        r_b,
        &lambda_fr,
        &c_lambda,
        r_lambda,
        r_beta,
        rng,
    )?;
    let pi_delta =
        zkrp::prove(params, &mut sub(&tr, b"delta"), &c_delta, &[delta], r_beta + r_gamma, bound, rng).map_err(range_err)?;
    let pi_eta = zkmmeq::prove(
        params,
        &mut sub(&tr, b"eta"),
        &c_mu,
        &eta_claims(&public, c_alpha, c_gamma),
        &ZkmmeqWitness { x: mu_fr, r_x: r_mu, r_claims: vec![r_alpha, r_gamma] },
        rng,
    )?;
    Ok(ObligationProof {
        c_lambda,
        c_mu,
        c_alpha,
        c_beta,
        c_gamma,
        pi_lambda,
        pi_mu,
        pi_a: source.pi_a.clone(),
        pi_b: source.pi_b.clone(),
        pi_alpha,
        pi_beta,
        pi_delta,
        pi_eta,
    })
}

/// Checks the cached shift proofs of one source.
fn verify_source(params: &Params, ctx: &Context, s: usize, rows: usize, cols: usize, bound: u64, c: &SourceCommitment, pi_a: &ZkrpProof, pi_b: &ZkrpProof) -> Result<(), Rejection> {
    let c_theta = shift_constants(params, cols, rows, bound).map_err(|e| Rejection::Malformed(e.to_string()))?;
    let c_theta_b = shift_constants(params, 1, rows, bound).map_err(|e| Rejection::Malformed(e.to_string()))?;
    if !zkrp::verify(params, &mut ctx.source_transcript(s, b"A"), &(c.c_a + c_theta), cols * rows, 2 * bound, pi_a) {
        return Err(Rejection::Failed(Check::ShiftA));
    }
    if !zkrp::verify(params, &mut ctx.source_transcript(s, b"b"), &(c.c_b + c_theta_b), rows, 2 * bound, pi_b) {
        return Err(Rejection::Failed(Check::ShiftB));
    }
    Ok(())
}

/// Runs the eight checks in order and reports the first that fails.
///
/// When `shifts_verified` is set the cached shift proofs are taken as already checked.
#[allow(clippy::too_many_arguments)]
fn verify_inner(
    params: &Params,
    ctx: &Context,
    cert: &SymbolicCertificate,
    index: usize,
    ob: &PublicObligation,
    com: &SourceCommitment,
    proof: &ObligationProof,
    shifts_verified: bool,
) -> Result<(), Rejection> {
    let s = source_index(ob.source);
    let rows = *cert.secret_rows.get(s).ok_or_else(|| Rejection::Malformed(format!("unknown source {s}")))?;
    let cols = 2 * cert.vars;
    let bound = cert.bound;
    let public = padded(&ob.public);
    let mut tr = obligation_transcript(ctx, index, ob, com);
    absorb_commitments(&mut tr, &[proof.c_lambda, proof.c_mu, proof.c_alpha, proof.c_beta, proof.c_gamma]);

    let fail = |c: Check| Err(Rejection::Failed(c));
    if !zkrp::verify(params, &mut sub(&tr, b"lambda"), &proof.c_lambda, rows, bound, &proof.pi_lambda) {
        return fail(Check::Lambda);
    }
    if !zkrp::verify(params, &mut sub(&tr, b"mu"), &proof.c_mu, public.len(), bound, &proof.pi_mu) {
        return fail(Check::Mu);
    }
    if !shifts_verified {
        verify_source(params, ctx, s, rows, cols, bound, com, &proof.pi_a, &proof.pi_b)?;
    } else if *proof.pi_a != *com.pi_a {
        return fail(Check::ShiftA);
    } else if *proof.pi_b != *com.pi_b {
        return fail(Check::ShiftB);
    }
    if !zkmm::verify(params, &mut sub(&tr, b"alpha"), cols, rows, &com.c_a, &proof.c_lambda, &proof.c_alpha, &proof.pi_alpha) {
        return fail(Check::Alpha);
    }
    if !zkmm::verify(params, &mut sub(&tr, b"beta"), 1, rows, &com.c_b, &proof.c_lambda, &proof.c_beta, &proof.pi_beta) {
        return fail(Check::Beta);
    }
    let c_delta = delta_commitment(params, proof.c_beta, proof.c_gamma);
    if !zkrp::verify(params, &mut sub(&tr, b"delta"), &c_delta, 1, bound, &proof.pi_delta) {
        return fail(Check::Delta);
    }
    let claims = eta_claims(&public, proof.c_alpha, proof.c_gamma);
    if !zkmmeq::verify(params, &mut sub(&tr, b"eta"), &proof.c_mu, &claims, &proof.pi_eta) {
        return fail(Check::Eta);
    }
    Ok(())
}

/// Verifies one obligation proof against the public obligation and the system commitment.
pub fn verify_obligation(
    params: &Params,
    cert: &SymbolicCertificate,
    index: usize,
    ob: &PublicObligation,
    com: &SystemCommitment,
    proof: &ObligationProof,
) -> Result<(), Rejection> {
    let ctx = Context::new(cert, params);
    let source = com
        .sources
        .get(source_index(ob.source))
        .ok_or_else(|| Rejection::Malformed("missing source commitment".into()))?;
    verify_inner(params, &ctx, cert, index, ob, source, proof, false)
}

/// System commitment plus one proof per obligation, in obligation order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicBundle {
    pub model_digest: [u8; 32],
    pub params_digest: [u8; 32],
    /// Row counts of the committed systems, which are public.
    pub secret_rows: Vec<usize>,
    pub system: SystemCommitment,
    pub proofs: Vec<ObligationProof>,
}

/// Indices of failed obligations with their reasons.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{} obligation(s) failed", failures.len())]
pub struct BatchFailure<E> {
    pub failures: Vec<(usize, E)>,
}

/// Proves every obligation of the certificate in batches of `batch`, in parallel within a batch.
///
/// `witnesses` must follow the order of [`SymbolicCertificate::obligations`]. The
/// output depends only on the inputs and `rng`, never on `batch` or on the thread count.
pub fn prove_all(
    params: &Params,
    cert: &SymbolicCertificate,
    sys: &SymbolicSystem,
    witnesses: &[FarkasWitness],
    batch: usize,
    rng: &mut impl RngCore,
) -> Result<SymbolicBundle, ProveAllError> {
    let obligations = cert.obligations().map_err(SymbolicProtocolError::from)?;
    if witnesses.len() != obligations.len() {
        return Err(ProveAllError::Setup(SymbolicProtocolError::Mismatch(format!(
            "{} witnesses for {} obligations",
            witnesses.len(),
            obligations.len()
        ))));
    }
    let ctx = Context::new(cert, params);
    let (system, opening) = commit_system(params, cert, sys, rng)?;
    let mut master = [0u8; 32];
    rng.fill_bytes(&mut master);
    let mut proofs = Vec::with_capacity(obligations.len());
    let mut failures = Vec::new();
    let indices: Vec<usize> = (0..obligations.len()).collect();
    for chunk in indices.chunks(batch.max(1)) {
        let results: Vec<_> = chunk
            .par_iter()
            .map(|&i| {
                let mut rng = item_rng(&master, b"obligation", i);
                prove_obligation(params, &ctx, i, &obligations[i], &witnesses[i], &system, &opening, cert.bound, &mut rng)
            })
            .collect();
        for (&i, r) in chunk.iter().zip(results) {
            match r {
                Ok(p) => proofs.push(p),
                Err(e) => failures.push((i, e.to_string())),
            }
        }
    }
    if !failures.is_empty() {
        return Err(ProveAllError::Obligations(BatchFailure { failures }));
    }
    Ok(SymbolicBundle {
        model_digest: ctx.model_digest,
        params_digest: ctx.params_digest,
        secret_rows: cert.secret_rows.clone(),
        system,
        proofs,
    })
}

#[derive(Debug, Error)]
pub enum ProveAllError {
    #[error(transparent)]
    Setup(#[from] SymbolicProtocolError),
    #[error(transparent)]
    Obligations(BatchFailure<String>),
}

/// Verifies a whole bundle; shift proofs are checked once per source.
pub fn verify_all(
    params: &Params,
    cert: &SymbolicCertificate,
    bundle: &SymbolicBundle,
    batch: usize,
) -> Result<(), BatchFailure<Rejection>> {
    let whole = |r: Rejection| BatchFailure { failures: vec![(usize::MAX, r)] };
    let ctx = Context::new(cert, params);
    if bundle.model_digest != ctx.model_digest || bundle.secret_rows != cert.secret_rows {
        return Err(whole(Rejection::DigestMismatch));
    }
    if bundle.params_digest != ctx.params_digest {
        return Err(whole(Rejection::ParamsMismatch));
    }
    let obligations = cert.obligations().map_err(|e| whole(Rejection::Malformed(e.to_string())))?;
    if bundle.proofs.len() != obligations.len() || bundle.system.sources.len() != cert.secret_rows.len() {
        return Err(whole(Rejection::Malformed("obligation or source count differs from the certificate".into())));
    }
    let cols = 2 * cert.vars;
    let shift_ok: Vec<Result<(), Rejection>> = bundle
        .system
        .sources
        .par_iter()
        .enumerate()
        .map(|(s, c)| verify_source(params, &ctx, s, cert.secret_rows[s], cols, cert.bound, c, &c.pi_a, &c.pi_b))
        .collect();
    let mut failures = Vec::new();
    let indices: Vec<usize> = (0..obligations.len()).collect();
    for chunk in indices.chunks(batch.max(1)) {
        let results: Vec<_> = chunk
            .par_iter()
            .map(|&i| {
                let ob = &obligations[i];
                let s = source_index(ob.source);
                let proof = &bundle.proofs[i];
                // Lambda and mu come first in the check order, so run them before reporting a shift failure.
                match verify_inner(params, &ctx, cert, i, ob, &bundle.system.sources[s], proof, true) {
                    Err(r @ Rejection::Failed(Check::Lambda | Check::Mu)) => Err(r),
                    other => shift_ok[s].clone().and(other),
                }
            })
            .collect();
        failures.extend(chunk.iter().zip(results).filter_map(|(&i, r)| r.err().map(|e| (i, e))));
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(BatchFailure { failures })
    }
}

impl SymbolicBundle {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::with_header(BUNDLE_MAGIC);
        w.bytes(&self.model_digest);
        w.bytes(&self.params_digest);
        w.u64(self.secret_rows.len() as u64);
        for &r in &self.secret_rows {
            w.u64(r as u64);
        }
        w.u64(self.proofs.len() as u64);
        w.u64(self.system.sources.len() as u64);
        for s in &self.system.sources {
            w.elem(&s.c_a);
            w.elem(&s.c_b);
            s.pi_a.write(&mut w);
            s.pi_b.write(&mut w);
        }
        for p in &self.proofs {
            w.u64(self.source_of_proof(p) as u64);
            for c in [&p.c_lambda, &p.c_mu, &p.c_alpha, &p.c_beta, &p.c_gamma] {
                w.elem(c);
            }
            p.pi_lambda.write(&mut w);
            p.pi_mu.write(&mut w);
            p.pi_alpha.write(&mut w);
            p.pi_beta.write(&mut w);
            p.pi_delta.write(&mut w);
            p.pi_eta.write(&mut w);
        }
        w.finish()
    }

    /// Index of the source whose cached shift proofs this proof carries.
    fn source_of_proof(&self, p: &ObligationProof) -> usize {
        self.system
            .sources
            .iter()
            .position(|s| Arc::ptr_eq(&s.pi_a, &p.pi_a) || *s.pi_a == *p.pi_a)
            .unwrap_or(usize::MAX)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CodecError> {
        let mut r = Reader::with_header(bytes, BUNDLE_MAGIC)?;
        let digest = |r: &mut Reader<'_>| -> Result<[u8; 32], CodecError> {
            r.bytes()?.try_into().map_err(|_| CodecError::Invalid("digest must be 32 bytes".into()))
        };
        let model_digest = digest(&mut r)?;
        let params_digest = digest(&mut r)?;
        let n_rows = r.len(8)?;
        let secret_rows = (0..n_rows).map(|_| r.u64().map(|v| v as usize)).collect::<Result<Vec<_>, _>>()?;
        let count = r.len(64)?;
        let n_sources = r.len(64)?;
        let mut sources = Vec::with_capacity(n_sources);
        for _ in 0..n_sources {
            sources.push(SourceCommitment {
                c_a: r.elem()?,
                c_b: r.elem()?,
                pi_a: Arc::new(ZkrpProof::read(&mut r)?),
                pi_b: Arc::new(ZkrpProof::read(&mut r)?),
            });
        }
        let mut proofs = Vec::with_capacity(count);
        for _ in 0..count {
            let s = r.u64()? as usize;
            let src = sources.get(s).ok_or_else(|| CodecError::Invalid(format!("unknown source {s}")))?;
            let (pi_a, pi_b) = (src.pi_a.clone(), src.pi_b.clone());
            proofs.push(ObligationProof {
                c_lambda: r.elem()?,
                c_mu: r.elem()?,
                c_alpha: r.elem()?,
                c_beta: r.elem()?,
                c_gamma: r.elem()?,
                pi_lambda: ZkrpProof::read(&mut r)?,
                pi_mu: ZkrpProof::read(&mut r)?,
                pi_a,
                pi_b,
                pi_alpha: ZkmmProof::read(&mut r)?,
                pi_beta: ZkmmProof::read(&mut r)?,
                pi_delta: ZkrpProof::read(&mut r)?,
                pi_eta: ZkmmeqProof::read(&mut r)?,
            });
        }
        r.finish()?;
        if sources.len() != secret_rows.len() {
            return Err(CodecError::Invalid("source count differs from the row header".into()));
        }
        Ok(SymbolicBundle { model_digest, params_digest, secret_rows, system: SystemCommitment { sources }, proofs })
    }
}
