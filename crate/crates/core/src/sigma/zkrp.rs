//! Range proofs for GT vector commitments.
//!
//! The prover commits to each entry separately in G1, proves by a
//! polynomial evaluation that those entry commitments are consistent with
//! the GT commitment, then runs the G1 range backend on the entries.

use ark_ec::{AffineRepr, CurveGroup};
use ark_ff::{Field, UniformRand, Zero};
use rand::RngCore;

use super::{eval_powers, powers, range, Params, RangeProof, SigmaError};
use crate::crypto::{msm_g1, multi_pairing, normalize_g1, CodecError, Fr, G1Affine, Gt, Reader, Transcript, Writer};

/// Evidence that G1 entry commitments agree with a GT commitment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkProof {
    pub pi_eq: G1Affine,
    pub theta: G1Affine,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZkrpProof {
    pub entries: Vec<G1Affine>,
    pub link: LinkProof,
    pub range: RangeProof,
}

/// `q(X) = (f(X) − f(z)) / (X − z)` by synthetic division.
fn quotient(coeffs: &[Fr], z: Fr) -> Vec<Fr> {
    let n = coeffs.len();
    if n < 2 {
        return Vec::new();
    }
    let mut q = vec![Fr::zero(); n - 1];
    let mut acc = Fr::zero();
    for k in (1..n).rev() {
        acc = acc * z + coeffs[k];
        q[k - 1] = acc;
    }
    q
}

/// Proves consistency of `entries[k] = g^{values[k]} h^{rands[k]}` with `c_hat = Com(values; r)`.
///
/// The caller must already have absorbed `c_hat` and the entries.
pub(crate) fn prove_link(
    params: &Params,
    tr: &mut Transcript,
    values: &[Fr],
    r: Fr,
    rands: &[Fr],
    rng: &mut impl RngCore,
) -> LinkProof {
    let z = tr.challenge(b"link-z");
    let r_z = eval_powers(rands, z);
    let q = quotient(values, z);
    let mu = Fr::rand(rng);
    let mut bases = params.bases.g[..q.len()].to_vec();
    bases.push(params.h());
    let mut scalars = q;
    scalars.push(mu);
    let pi_eq = msm_g1(&bases, &scalars);
    // θ = g^{r − r_z + μ·z} · (g^α)^{−μ}
    let theta = params.g_mul(&(r - r_z + mu * z)) - crate::crypto::mul_g1(params.bases.g[1], mu);
    let pts = normalize_g1(&[pi_eq, theta]);
    let link = LinkProof { pi_eq: pts[0], theta: pts[1] };
    tr.append(b"link-proof", &link.pi_eq);
    tr.append(b"link-proof", &link.theta);
    link
}

/// `ĉ · e(c, g')^{-1} = e(π_eq, g'^α · g'^{−z}) · e(θ, h')` with `c = Π entries[k]^{z^k}`.
pub(crate) fn verify_link(params: &Params, tr: &mut Transcript, c_hat: &Gt, entries: &[G1Affine], link: &LinkProof) -> bool {
    if entries.is_empty() || entries.len() > params.len() {
        return false;
    }
    let z = tr.challenge(b"link-z");
    tr.append(b"link-proof", &link.pi_eq);
    tr.append(b"link-proof", &link.theta);
    let c = msm_g1(entries, &powers(z, entries.len()));
    let shifted = (params.g2_alpha().into_group() - params.g2() * z).into_affine();
    let rhs = multi_pairing(&[c.into_affine(), link.pi_eq, link.theta], &[params.g2(), shifted, params.h2]);
    rhs == *c_hat
}

fn absorb_statement(tr: &mut Transcript, c_hat: &Gt, bound: u64, entries: &[G1Affine]) {
    tr.append_message(b"protocol", b"zkrp");
    tr.append(b"zkrp-commitment", c_hat);
    tr.append_u64(b"zkrp-bound", bound);
    tr.append_all(b"zkrp-entries", entries);
}

/// Proves that every entry of the vector committed in `c_hat` with randomness `r` lies in `[0, bound]`.
pub fn prove(
    params: &Params,
    tr: &mut Transcript,
    c_hat: &Gt,
    values: &[i128],
    r: Fr,
    bound: u64,
    rng: &mut impl RngCore,
) -> Result<ZkrpProof, SigmaError> {
    params.require(values.len().max(2))?;
    if values.is_empty() {
        return Err(SigmaError::Dimension("empty vector".into()));
    }
    if let Some(&value) = values.iter().find(|&&v| v < 0 || v > bound as i128) {
        return Err(SigmaError::OutOfRange { value, bound });
    }
    let fr_values: Vec<Fr> = values.iter().map(|&v| Fr::from(v)).collect();
    let rands: Vec<Fr> = values.iter().map(|_| Fr::rand(rng)).collect();
    let entries: Vec<_> = fr_values.iter().zip(&rands).map(|(v, s)| params.pedersen(v, s)).collect();
    let entries = normalize_g1(&entries);
    absorb_statement(tr, c_hat, bound, &entries);
    let link = prove_link(params, tr, &fr_values, r, &rands, rng);
    let range = range::prove(params, tr, values, &rands, bound, rng)?;
    Ok(ZkrpProof { entries, link, range })
}

/// Checks a proof that `c_hat` commits to `len` values in `[0, bound]`.
pub fn verify(params: &Params, tr: &mut Transcript, c_hat: &Gt, len: usize, bound: u64, proof: &ZkrpProof) -> bool {
    if proof.entries.len() != len {
        return false;
    }
    absorb_statement(tr, c_hat, bound, &proof.entries);
    verify_link(params, tr, c_hat, &proof.entries, &proof.link)
        && range::verify(params, tr, &proof.entries, bound, &proof.range)
}

/// Produces an accepting proof for `c_hat` without its opening, using the setup trapdoor.
///
/// The simulator needs `c_hat_g1`, a G1 element with `e(c_hat_g1, g') = c_hat`.
/// Returns `None` when the parameters carry no trapdoor.
pub fn simulate(
    params: &Params,
    tr: &mut Transcript,
    c_hat: &Gt,
    c_hat_g1: G1Affine,
    len: usize,
    bound: u64,
    rng: &mut impl RngCore,
) -> Option<ZkrpProof> {
    let (alpha, beta) = params.trapdoor()?;
    let beta_inv = beta.inverse()?;
    // Uniform entries; each opens to 0 under randomness x/β because h = g^β.
    let xs: Vec<Fr> = (0..len).map(|_| Fr::rand(rng)).collect();
    let entries = normalize_g1(&xs.iter().map(|x| params.g_mul(x)).collect::<Vec<_>>());
    absorb_statement(tr, c_hat, bound, &entries);

    let z = tr.challenge(b"link-z");
    let pi_eq = params.g_mul(&Fr::rand(rng));
    let c = msm_g1(&entries, &powers(z, len));
    let theta = (c_hat_g1.into_group() - c - pi_eq * (alpha - z)) * beta_inv;
    let pts = normalize_g1(&[pi_eq, theta]);
    let link = LinkProof { pi_eq: pts[0], theta: pts[1] };
    tr.append(b"link-proof", &link.pi_eq);
    tr.append(b"link-proof", &link.theta);

    let zeros = vec![0i128; len];
    let rands: Vec<Fr> = xs.iter().map(|x| *x * beta_inv).collect();
    let range = range::prove(params, tr, &zeros, &rands, bound, rng).ok()?;
    Some(ZkrpProof { entries, link, range })
}

impl LinkProof {
    pub(crate) fn write(&self, w: &mut Writer) {
        w.elem(&self.pi_eq);
        w.elem(&self.theta);
    }

    pub(crate) fn read(r: &mut Reader<'_>) -> Result<Self, CodecError> {
        Ok(LinkProof { pi_eq: r.elem()?, theta: r.elem()? })
    }
}

impl ZkrpProof {
    pub fn write(&self, w: &mut Writer) {
        w.u8(super::tag::ZKRP);
        w.elems(&self.entries);
        self.link.write(w);
        self.range.write(w);
    }

    pub fn read(r: &mut Reader<'_>) -> Result<Self, CodecError> {
        if r.u8()? != super::tag::ZKRP {
            return Err(CodecError::Invalid("expected a zkrp proof".into()));
        }
        let n = r.len(48)?;
        let entries = (0..n).map(|_| r.elem()).collect::<Result<_, _>>()?;
        Ok(ZkrpProof { entries, link: LinkProof::read(r)?, range: RangeProof::read(r)? })
    }
}
