//! Pairing groups, integer encoding, Pedersen commitments and Fiat–Shamir transcripts.
//!
//! The deployment is pinned to BLS12-381. Its identifier is absorbed into every
//! transcript, and every serialized artifact starts with a version byte.

mod codec;
mod encoding;
mod fixed;
pub mod ops;
mod pedersen;
mod transcript;

use ark_bls12_381::{g1, g2, Bls12_381};
use ark_ec::hashing::curve_maps::wb::WBMap;
use ark_ec::hashing::map_to_curve_hasher::MapToCurveBasedHasher;
use ark_ec::hashing::HashToCurve;
use ark_ec::pairing::{Pairing, PairingOutput};
use ark_ec::{CurveGroup, VariableBaseMSM};
use ark_ff::field_hashers::DefaultFieldHasher;
use sha2::Sha256;

pub use codec::{CodecError, Reader, Writer};
pub use encoding::{EncodingError, SignedEncoding};
pub use fixed::FixedBase;
pub use pedersen::{commit_matrix, commit_scalar, commit_vector, Commitment, PedersenBases, Tier};
pub use transcript::Transcript;

pub type Curve = Bls12_381;
pub type Fr = ark_bls12_381::Fr;
pub type G1 = ark_bls12_381::G1Projective;
pub type G1Affine = ark_bls12_381::G1Affine;
pub type G2 = ark_bls12_381::G2Projective;
pub type G2Affine = ark_bls12_381::G2Affine;
pub type Gt = PairingOutput<Bls12_381>;

/// Curve identifier absorbed into transcripts and artifact headers.
pub const CURVE_ID: &[u8] = b"BLS12-381";
/// Version byte prefixed to every serialized artifact.
pub const FORMAT_VERSION: u8 = 1;

/// Hashes a label to a G1 point of unknown discrete logarithm.
pub fn hash_to_g1(label: &[u8]) -> G1Affine {
    let hasher =
        MapToCurveBasedHasher::<G1, DefaultFieldHasher<Sha256, 128>, WBMap<g1::Config>>::new(b"zkmc-g1-nums")
            .expect("hash-to-curve parameters are valid");
    hasher.hash(label).expect("hash-to-curve succeeds")
}

/// Hashes a label to a G2 point of unknown discrete logarithm.
pub fn hash_to_g2(label: &[u8]) -> G2Affine {
    let hasher =
        MapToCurveBasedHasher::<G2, DefaultFieldHasher<Sha256, 128>, WBMap<g2::Config>>::new(b"zkmc-g2-nums")
            .expect("hash-to-curve parameters are valid");
    hasher.hash(label).expect("hash-to-curve succeeds")
}

/// Single pairing, counted.
pub fn pairing(a: impl Into<G1Affine>, b: impl Into<G2Affine>) -> Gt {
    ops::record(|c| c.pairings += 1);
    Curve::pairing(a.into(), b.into())
}

/// Product of pairings with one final exponentiation, counted per pair.
pub fn multi_pairing(a: &[G1Affine], b: &[G2Affine]) -> Gt {
    ops::record(|c| c.pairings += a.len() as u64);
    Curve::multi_pairing(a.iter().copied(), b.iter().copied())
}

/// Multi-scalar multiplication in G1, counted by number of terms.
pub fn msm_g1(bases: &[G1Affine], scalars: &[Fr]) -> G1 {
    debug_assert_eq!(bases.len(), scalars.len());
    ops::record(|c| c.msm_terms += scalars.len() as u64);
    G1::msm_unchecked(bases, scalars)
}

/// Multi-scalar multiplication in G2, counted by number of terms.
pub fn msm_g2(bases: &[G2Affine], scalars: &[Fr]) -> G2 {
    debug_assert_eq!(bases.len(), scalars.len());
    ops::record(|c| c.msm_terms += scalars.len() as u64);
    G2::msm_unchecked(bases, scalars)
}

/// Variable-base G1 exponentiation, counted.
pub fn mul_g1(base: G1Affine, k: Fr) -> G1 {
    ops::record(|c| c.g1_mul += 1);
    base * k
}

/// GT exponentiation, counted.
pub fn exp_gt(base: Gt, k: Fr) -> Gt {
    ops::record(|c| c.gt_exp += 1);
    base * k
}

pub fn normalize_g1(points: &[G1]) -> Vec<G1Affine> {
    G1::normalize_batch(points)
}

pub fn normalize_g2(points: &[G2]) -> Vec<G2Affine> {
    G2::normalize_batch(points)
}

/// Field element of a signed machine integer.
pub fn fr_i64(v: i64) -> Fr {
    Fr::from(v)
}

pub fn fr_u64(v: u64) -> Fr {
    Fr::from(v)
}
