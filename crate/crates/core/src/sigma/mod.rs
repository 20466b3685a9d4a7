//! Σ-protocols over two-tier Pedersen commitments.
//!
//! All protocol-level commitments live in GT:
//! `Com(v; r) = Π_k e(g, g')^{α^k · v_k} · e(g, g')^{β·r}`, with matrices
//! flattened column-major. Because every such commitment is the pairing of a
//! G1 element with `g'`, most prover and verifier work happens in G1.

mod range;
pub mod zkmm;
pub mod zkmmeq;
pub mod zkrp;

use ark_ec::scalar_mul::ScalarMul;
use ark_ec::{AffineRepr, CurveGroup, PrimeGroup};
use ark_ff::{One, UniformRand, Zero};
use rand::RngCore;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::crypto::{
    msm_g1, multi_pairing, pairing, CodecError, FixedBase, Fr, G1Affine, G2Affine, Gt, PedersenBases, Reader, Writer,
    G1, G2,
};

pub use range::{BitProof, RangeProof};
pub use zkmm::ZkmmProof;
pub use zkmmeq::{ZkmmeqClaim, ZkmmeqFirst, ZkmmeqProof, ZkmmeqProver, ZkmmeqWitness};
pub use zkrp::{LinkProof, ZkrpProof};

const PARAMS_MAGIC: &[u8; 4] = b"ZSPP";

/// Tag bytes preceding each serialized sub-proof.
pub mod tag {
    pub const RANGE: u8 = 0x01;
    pub const ZKRP: u8 = 0x02;
    pub const ZKMMEQ: u8 = 0x03;
    pub const ZKMM: u8 = 0x04;
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SigmaError {
    #[error("value {value} is outside [0, {bound}]")]
    OutOfRange { value: i128, bound: u64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parameters support {supported} positions but {needed} are needed")]
    ParamsTooSmall { needed: usize, supported: usize },
}

/// Public parameters of the commitment scheme and all sub-protocols.
#[derive(Clone, Debug)]
pub struct Params {
    /// `g[k] = g^{α^k}`, `h = g^β`, `g2[k] = g'^{α^k}`, `h_gt = e(h, g')`.
    pub bases: PedersenBases,
    /// `h' = g'^β`.
    pub h2: G2Affine,
    g_table: FixedBase,
    h_table: FixedBase,
    trapdoor: Option<(Fr, Fr)>,
}

impl PartialEq for Params {
    fn eq(&self, other: &Self) -> bool {
        self.bases.g == other.bases.g
            && self.bases.h == other.bases.h
            && self.bases.g2 == other.bases.g2
            && self.h2 == other.h2
            && self.trapdoor == other.trapdoor
    }
}

impl Params {
    /// Samples `α, β` and derives `len` positions; the trapdoor is kept only when `insecure`.
    pub fn setup(len: usize, insecure: bool, rng: &mut impl RngCore) -> Self {
        let alpha = Fr::rand(rng);
        let beta = Fr::rand(rng);
        let mut p = Self::from_trapdoor(alpha, beta, len);
        if !insecure {
            p.trapdoor = None;
        }
        p
    }

    pub fn from_trapdoor(alpha: Fr, beta: Fr, len: usize) -> Self {
        let len = len.max(2);
        let mut powers = Vec::with_capacity(len);
        let mut acc = Fr::one();
        for _ in 0..len {
            powers.push(acc);
            acc *= alpha;
        }
        let (g, g2) = rayon::join(|| G1::generator().batch_mul(&powers), || G2::generator().batch_mul(&powers));
        let h = (G1::generator() * beta).into_affine();
        let h2 = (G2::generator() * beta).into_affine();
        Self::assemble(g, h, g2, h2, Some((alpha, beta)))
    }

    fn assemble(g: Vec<G1Affine>, h: G1Affine, g2: Vec<G2Affine>, h2: G2Affine, trapdoor: Option<(Fr, Fr)>) -> Self {
        let h_gt = pairing(h, g2[0]);
        let g_table = FixedBase::new(g[0]);
        let h_table = FixedBase::new(h);
        Params { bases: PedersenBases { g, h, g2, h_gt }, h2, g_table, h_table, trapdoor }
    }

    /// Number of committable positions.
    pub fn len(&self) -> usize {
        self.bases.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.g.is_empty()
    }

    pub fn g(&self) -> G1Affine {
        self.bases.g[0]
    }

    pub fn h(&self) -> G1Affine {
        self.bases.h
    }

    pub fn g2(&self) -> G2Affine {
        self.bases.g2[0]
    }

    pub fn g2_alpha(&self) -> G2Affine {
        self.bases.g2[1]
    }

    pub fn h_gt(&self) -> Gt {
        self.bases.h_gt
    }

    pub fn trapdoor(&self) -> Option<(Fr, Fr)> {
        self.trapdoor
    }

    pub fn is_insecure(&self) -> bool {
        self.trapdoor.is_some()
    }

    pub(crate) fn require(&self, needed: usize) -> Result<(), SigmaError> {
        if needed > self.len() {
            return Err(SigmaError::ParamsTooSmall { needed, supported: self.len() });
        }
        Ok(())
    }

    /// `g^v h^r` through the fixed-base tables.
    pub fn pedersen(&self, v: &Fr, r: &Fr) -> G1 {
        self.g_table.mul(v) + self.h_table.mul(r)
    }

    pub fn g_mul(&self, v: &Fr) -> G1 {
        self.g_table.mul(v)
    }

    pub fn h_mul(&self, v: &Fr) -> G1 {
        self.h_table.mul(v)
    }

    /// G1 preimage `Σ v_k g_k + r·h` of a vector commitment.
    pub fn vector_g1(&self, v: &[Fr], r: Fr) -> Result<G1, SigmaError> {
        self.require(v.len())?;
        let mut bases = self.bases.g[..v.len()].to_vec();
        bases.push(self.bases.h);
        let mut scalars = v.to_vec();
        scalars.push(r);
        Ok(msm_g1(&bases, &scalars))
    }

    /// Vector commitment in GT.
    pub fn commit_vector(&self, v: &[Fr], r: Fr) -> Result<Gt, SigmaError> {
        Ok(pairing(self.vector_g1(v, r)?.into_affine(), self.g2()))
    }

    /// Two-tier commitment to a row-major matrix, flattened column-major.
    pub fn commit_matrix(&self, rows: &[Vec<Fr>], r: Fr) -> Result<Gt, SigmaError> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != n) {
            return Err(SigmaError::Dimension("ragged matrix".into()));
        }
        self.require(m * n)?;
        if m == 0 || n == 0 {
            return Ok(crate::crypto::exp_gt(self.h_gt(), r));
        }
        Ok(crate::crypto::commit_matrix(&self.bases, rows, r))
    }

    /// Commitment to the constant `v` matrix of the given shape with zero randomness.
    pub fn commit_constant(&self, rows: usize, cols: usize, v: Fr) -> Result<Gt, SigmaError> {
        let len = rows * cols;
        self.require(len)?;
        let sum: G1 = self.bases.g[..len].iter().map(|p| p.into_group()).sum();
        Ok(pairing((sum * v).into_affine(), self.g2()))
    }

    /// SHA-256 of the serialized public parameters.
    pub fn digest(&self) -> [u8; 32] {
        Sha256::digest(self.public_bytes()).into()
    }

    fn public_bytes(&self) -> Vec<u8> {
        let mut w = Writer::with_header(PARAMS_MAGIC);
        w.u8(0);
        w.elems(&self.bases.g);
        w.elem(&self.bases.h);
        w.elems(&self.bases.g2);
        w.elem(&self.h2);
        w.finish()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::with_header(PARAMS_MAGIC);
        w.u8(self.trapdoor.is_some() as u8);
        w.elems(&self.bases.g);
        w.elem(&self.bases.h);
        w.elems(&self.bases.g2);
        w.elem(&self.h2);
        if let Some((a, b)) = &self.trapdoor {
            w.elem(a);
            w.elem(b);
        }
        w.finish()
    }

    /// Parses parameters, refusing ones that carry a trapdoor unless `allow_insecure`.
    pub fn from_bytes(bytes: &[u8], allow_insecure: bool) -> Result<Self, ParamsError> {
        let mut r = Reader::with_header(bytes, PARAMS_MAGIC)?;
        let insecure = match r.u8()? {
            0 => false,
            1 => true,
            v => return Err(CodecError::Invalid(format!("bad setup flag {v}")).into()),
        };
        if insecure && !allow_insecure {
            return Err(ParamsError::Insecure);
        }
        let g: Vec<G1Affine> = r.elems()?;
        let h: G1Affine = r.elem()?;
        let g2: Vec<G2Affine> = r.elems()?;
        let h2: G2Affine = r.elem()?;
        let trapdoor = if insecure { Some((r.elem()?, r.elem()?)) } else { None };
        r.finish()?;
        if g.len() < 2 || g2.len() != g.len() {
            return Err(ParamsError::Inconsistent);
        }
        Ok(Self::assemble(g, h, g2, h2, trapdoor))
    }

    /// Randomised structural check of the power sequences and of `h, h'`.
    pub fn is_consistent(&self, rng: &mut impl RngCore) -> bool {
        let g = &self.bases.g;
        let g2 = &self.bases.g2;
        if g.len() < 2 || g2.len() != g.len() || g[0].is_zero() || g2[0].is_zero() || self.bases.h.is_zero() {
            return false;
        }
        let rho: Vec<Fr> = (1..g.len()).map(|_| Fr::rand(rng)).collect();
        let lo = msm_g1(&g[..g.len() - 1], &rho).into_affine();
        let hi = msm_g1(&g[1..], &rho).into_affine();
        let powers_g1 = multi_pairing(&[lo, (-hi.into_group()).into_affine()], &[g2[1], g2[0]]).is_zero();
        let pairs_g2 = (0..g.len())
            .map(|k| pairing(g[k], g2[0]) == pairing(g[0], g2[k]))
            .take(4)
            .all(|ok| ok);
        let blinding = multi_pairing(&[self.bases.h, (-g[0].into_group()).into_affine()], &[g2[0], self.h2]).is_zero();
        powers_g1 && pairs_g2 && blinding
    }
}

#[derive(Debug, Error)]
pub enum ParamsError {
    #[error("parameters were produced by an insecure setup")]
    Insecure,
    #[error("parameters are inconsistent")]
    Inconsistent,
    #[error(transparent)]
    Codec(#[from] CodecError),
}

/// Field element of a signed integer that fits in `i128`.
pub fn fr_i128(v: i128) -> Fr {
    Fr::from(v)
}

/// `Σ_k coeffs[k] · z^k`.
pub(crate) fn eval_powers(coeffs: &[Fr], z: Fr) -> Fr {
    coeffs.iter().rev().fold(Fr::zero(), |acc, c| acc * z + c)
}

pub(crate) fn powers(z: Fr, n: usize) -> Vec<Fr> {
    let mut v = Vec::with_capacity(n);
    let mut acc = Fr::one();
    for _ in 0..n {
        v.push(acc);
        acc *= z;
    }
    v
}

/// Column-major flattening of a row-major matrix.
pub fn flatten_columns(rows: &[Vec<Fr>]) -> Vec<Fr> {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    let mut out = Vec::with_capacity(m * n);
    for j in 0..n {
        for row in rows {
            out.push(row[j]);
        }
    }
    out
}
