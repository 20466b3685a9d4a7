//! Proof that several GT commitments open to public matrices applied to one
//! committed vector: `c_j = Com(A_j·x; r_j)` for every claim `j` and
//! `c_x = Com(x; r_x)`.

use ark_ec::CurveGroup;
use ark_ff::{Field, UniformRand};
use rand::RngCore;

use super::{Params, SigmaError};
use crate::crypto::{exp_gt, pairing, CodecError, Fr, Gt, Reader, Transcript, Writer};

/// One claimed product: `commitment = Com(matrix · x; r)` for a public row-major `matrix`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZkmmeqClaim {
    pub commitment: Gt,
    pub matrix: Vec<Vec<Fr>>,
}

impl ZkmmeqClaim {
    fn apply(&self, x: &[Fr]) -> Vec<Fr> {
        self.matrix.iter().map(|row| row.iter().zip(x).map(|(a, b)| *a * b).sum()).collect()
    }
}

/// Opening of `c_x` and the randomness of every claim.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZkmmeqWitness {
    pub x: Vec<Fr>,
    pub r_x: Fr,
    pub r_claims: Vec<Fr>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZkmmeqFirst {
    pub t_x: Gt,
    pub t: Vec<Gt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZkmmeqProof {
    pub first: ZkmmeqFirst,
    pub z: Vec<Fr>,
    pub w_x: Fr,
    pub w: Vec<Fr>,
}

/// Prover state between the first message and the challenge.
pub struct ZkmmeqProver {
    rho: Vec<Fr>,
    sigma_x: Fr,
    sigma: Vec<Fr>,
    first: ZkmmeqFirst,
}

fn check_shapes(params: &Params, len: usize, claims: &[ZkmmeqClaim]) -> Result<(), SigmaError> {
    params.require(len)?;
    for c in claims {
        params.require(c.matrix.len())?;
        if c.matrix.iter().any(|row| row.len() != len) {
            return Err(SigmaError::Dimension("claim matrix width differs from the vector length".into()));
        }
    }
    Ok(())
}

impl ZkmmeqProver {
    /// Samples the masks and computes `t_x = Com(ρ; σ_x)` and `t_j = Com(A_j·ρ; σ_j)`.
    pub fn commit(params: &Params, len: usize, claims: &[ZkmmeqClaim], rng: &mut impl RngCore) -> Result<Self, SigmaError> {
        check_shapes(params, len, claims)?;
        let rho: Vec<Fr> = (0..len).map(|_| Fr::rand(rng)).collect();
        let sigma_x = Fr::rand(rng);
        let sigma: Vec<Fr> = claims.iter().map(|_| Fr::rand(rng)).collect();
        let t_x = params.commit_vector(&rho, sigma_x)?;
        let t = claims
            .iter()
            .zip(&sigma)
            .map(|(c, s)| params.commit_vector(&c.apply(&rho), *s))
            .collect::<Result<_, _>>()?;
        Ok(ZkmmeqProver { rho, sigma_x, sigma, first: ZkmmeqFirst { t_x, t } })
    }

    pub fn first(&self) -> &ZkmmeqFirst {
        &self.first
    }

    pub fn respond(&self, witness: &ZkmmeqWitness, e: Fr) -> ZkmmeqProof {
        ZkmmeqProof {
            first: self.first.clone(),
            z: self.rho.iter().zip(&witness.x).map(|(r, x)| *r + e * x).collect(),
            w_x: self.sigma_x + e * witness.r_x,
            w: self.sigma.iter().zip(&witness.r_claims).map(|(s, r)| *s + e * r).collect(),
        }
    }
}

/// The verifier's equations for a fixed challenge `e`.
pub fn check(params: &Params, c_x: &Gt, claims: &[ZkmmeqClaim], proof: &ZkmmeqProof, e: Fr) -> bool {
    let len = proof.z.len();
    if check_shapes(params, len, claims).is_err() || proof.w.len() != claims.len() || proof.first.t.len() != claims.len() {
        return false;
    }
    let open = |v: &[Fr], r: Fr| params.vector_g1(v, r).map(|p| pairing(p.into_affine(), params.g2()));
    match open(&proof.z, proof.w_x) {
        Ok(lhs) if lhs == proof.first.t_x + exp_gt(*c_x, e) => {}
        _ => return false,
    }
    claims.iter().zip(&proof.first.t).zip(&proof.w).all(|((c, t), w)| match open(&c.apply(&proof.z), *w) {
        Ok(lhs) => lhs == *t + exp_gt(c.commitment, e),
        Err(_) => false,
    })
}

/// Recovers the witness from two accepting transcripts that share a first message.
pub fn extract(a: &ZkmmeqProof, e_a: Fr, b: &ZkmmeqProof, e_b: Fr) -> Option<ZkmmeqWitness> {
    if a.first != b.first || a.z.len() != b.z.len() || a.w.len() != b.w.len() {
        return None;
    }
    let inv = (e_a - e_b).inverse()?;
    Some(ZkmmeqWitness {
        x: a.z.iter().zip(&b.z).map(|(p, q)| (*p - q) * inv).collect(),
        r_x: (a.w_x - b.w_x) * inv,
        r_claims: a.w.iter().zip(&b.w).map(|(p, q)| (*p - q) * inv).collect(),
    })
}

fn absorb_statement(tr: &mut Transcript, c_x: &Gt, claims: &[ZkmmeqClaim], first: &ZkmmeqFirst) {
    tr.append_message(b"protocol", b"zkmmeq");
    tr.append(b"zkmmeq-cx", c_x);
    tr.append_u64(b"zkmmeq-claims", claims.len() as u64);
    for c in claims {
        tr.append(b"zkmmeq-claim", &c.commitment);
        tr.append_u64(b"zkmmeq-rows", c.matrix.len() as u64);
        for row in &c.matrix {
            tr.append_all(b"zkmmeq-row", row);
        }
    }
    tr.append(b"zkmmeq-tx", &first.t_x);
    tr.append_all(b"zkmmeq-t", &first.t);
}

pub fn prove(
    params: &Params,
    tr: &mut Transcript,
    c_x: &Gt,
    claims: &[ZkmmeqClaim],
    witness: &ZkmmeqWitness,
    rng: &mut impl RngCore,
) -> Result<ZkmmeqProof, SigmaError> {
    if witness.r_claims.len() != claims.len() {
        return Err(SigmaError::Dimension("one randomness per claim is required".into()));
    }
    let prover = ZkmmeqProver::commit(params, witness.x.len(), claims, rng)?;
    absorb_statement(tr, c_x, claims, prover.first());
    let e = tr.challenge(b"zkmmeq-e");
    Ok(prover.respond(witness, e))
}

pub fn verify(params: &Params, tr: &mut Transcript, c_x: &Gt, claims: &[ZkmmeqClaim], proof: &ZkmmeqProof) -> bool {
    absorb_statement(tr, c_x, claims, &proof.first);
    let e = tr.challenge(b"zkmmeq-e");
    check(params, c_x, claims, proof, e)
}

impl ZkmmeqProof {
    pub fn write(&self, w: &mut Writer) {
        w.u8(super::tag::ZKMMEQ);
        w.elem(&self.first.t_x);
        w.elems(&self.first.t);
        w.elems(&self.z);
        w.elem(&self.w_x);
        w.elems(&self.w);
    }

    pub fn read(r: &mut Reader<'_>) -> Result<Self, CodecError> {
        if r.u8()? != super::tag::ZKMMEQ {
            return Err(CodecError::Invalid("expected a zkmmeq proof".into()));
        }
        let t_x = r.elem()?;
        let t = r.elems()?;
        let z = r.elems()?;
        let w_x = r.elem()?;
        let w = r.elems()?;
        Ok(ZkmmeqProof { first: ZkmmeqFirst { t_x, t }, z, w_x, w })
    }
}
