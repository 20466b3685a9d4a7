//! Range proofs for G1 Pedersen commitments by bit decomposition.
//!
//! With `k` the bit length of `B`, a value `v ∈ [0, B]` is written as
//! `Σ_{t<k−1} 2^t·b_t + w·b_{k−1}` where `w = B − 2^{k−1} + 1`; every such sum
//! lies in `[0, B]` and every value in that interval has one. Each bit carries
//! a two-branch OR proof that its commitment opens to 0 or to 1. One
//! challenge is shared by every bit of a proof and the verifier folds all
//! equations into one MSM.

use ark_ec::AffineRepr;
use ark_ff::{UniformRand, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use super::{Params, SigmaError};
use crate::crypto::{msm_g1, normalize_g1, ops, CodecError, Fr, G1Affine, Reader, Transcript, Writer, G1};

/// OR proof that `c` commits to a bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitProof {
    pub c: G1Affine,
    pub a0: G1Affine,
    pub a1: G1Affine,
    pub e0: Fr,
    pub z0: Fr,
    pub z1: Fr,
}

/// One bit chain per committed value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RangeProof {
    pub bits: u8,
    pub chains: Vec<Vec<BitProof>>,
}

/// Bit length of `bound`, at least one.
pub fn bit_length(bound: u64) -> u8 {
    (64 - bound.leading_zeros()).max(1) as u8
}

/// Recomposition weights `1, 2, …, 2^{k−2}, B − 2^{k−1} + 1`.
pub fn weights(bound: u64) -> Vec<u64> {
    let k = bit_length(bound) as u32;
    let mut w: Vec<u64> = (0..k - 1).map(|t| 1u64 << t).collect();
    w.push(bound - ((1u64 << (k - 1)) - 1));
    w
}

/// Bits of `v` under [`weights`]; `v` must lie in `[0, bound]`.
fn decompose(v: u64, bound: u64) -> Vec<bool> {
    let k = bit_length(bound) as u32;
    let low = (1u64 << (k - 1)) - 1;
    let (top, rest) = if v > low { (true, v - (bound - low)) } else { (false, v) };
    let mut bits: Vec<bool> = (0..k - 1).map(|t| (rest >> t) & 1 == 1).collect();
    bits.push(top);
    bits
}

struct BitState {
    bit: bool,
    s: Fr,
    k: Fr,
    e_sim: Fr,
    z_sim: Fr,
}

fn prove_chain(params: &Params, value: u64, r: Fr, bound: u64, seed: [u8; 32]) -> (Vec<BitState>, Vec<G1>) {
    let mut rng = ChaCha20Rng::from_seed(seed);
    let w = weights(bound);
    let bits = decompose(value, bound);
    let mut s: Vec<Fr> = w.iter().map(|_| Fr::rand(&mut rng)).collect();
    // The first weight is 1, so s_0 absorbs the difference and Σ w_t·s_t = r.
    let tail: Fr = s.iter().zip(&w).skip(1).map(|(s_t, &w_t)| *s_t * Fr::from(w_t)).sum();
    s[0] = r - tail;

    let g = params.g().into_group();
    let mut states = Vec::with_capacity(bits.len());
    let mut points = Vec::with_capacity(3 * bits.len());
    for (bit, s_t) in bits.into_iter().zip(s) {
        let (k, e_sim, z_sim) = (Fr::rand(&mut rng), Fr::rand(&mut rng), Fr::rand(&mut rng));
        let mut c = params.h_mul(&s_t);
        if bit {
            c += g;
        }
        let real = params.h_mul(&k);
        // Simulated branch: A = z·h − e·(C − (1−b)·g) with C − (1−b)·g = (2b−1)·g + s·h.
        let sign = if bit { e_sim } else { -e_sim };
        let sim = params.h_mul(&(z_sim - e_sim * s_t)) - params.g_mul(&sign);
        let (a0, a1) = if bit { (sim, real) } else { (real, sim) };
        points.extend([c, a0, a1]);
        states.push(BitState { bit, s: s_t, k, e_sim, z_sim });
    }
    (states, points)
}

fn absorb_commitments(tr: &mut Transcript, bound: u64, chains: &[Vec<BitProof>]) {
    tr.append_u64(b"range-bound", bound);
    tr.append_u64(b"range-chains", chains.len() as u64);
    let points: Vec<G1Affine> = chains.iter().flatten().flat_map(|b| [b.c, b.a0, b.a1]).collect();
    tr.append_all(b"range-points", &points);
}

fn absorb_responses(tr: &mut Transcript, chains: &[Vec<BitProof>]) {
    let scalars: Vec<Fr> = chains.iter().flatten().flat_map(|b| [b.e0, b.z0, b.z1]).collect();
    tr.append_all(b"range-responses", &scalars);
}

/// Proves that every `values[i]` committed as `g^{v_i} h^{rands[i]}` lies in `[0, bound]`.
pub(crate) fn prove(
    params: &Params,
    tr: &mut Transcript,
    values: &[i128],
    rands: &[Fr],
    bound: u64,
    rng: &mut impl RngCore,
) -> Result<RangeProof, SigmaError> {
    if values.len() != rands.len() {
        return Err(SigmaError::Dimension("range values and randomness differ in length".into()));
    }
    if let Some(&value) = values.iter().find(|&&v| v < 0 || v > bound as i128) {
        return Err(SigmaError::OutOfRange { value, bound });
    }
    let bits = bit_length(bound);
    let jobs: Vec<(u64, Fr, [u8; 32])> = values
        .iter()
        .zip(rands)
        .map(|(&v, &r)| {
            let mut seed = [0u8; 32];
            rng.fill_bytes(&mut seed);
            (v as u64, r, seed)
        })
        .collect();
    ops::record(|c| c.range_bits += (jobs.len() * bits as usize) as u64);
    let built: Vec<(Vec<BitState>, Vec<G1>)> =
        jobs.par_iter().map(|&(v, r, seed)| prove_chain(params, v, r, bound, seed)).collect();

    let all: Vec<G1> = built.iter().flat_map(|(_, p)| p.iter().copied()).collect();
    let affine = normalize_g1(&all);
    let mut chains: Vec<Vec<BitProof>> = Vec::with_capacity(built.len());
    let mut pts = affine.chunks_exact(3);
    for (states, _) in &built {
        chains.push(
            states
                .iter()
                .map(|_| {
                    let p = pts.next().expect("three points per bit");
                    BitProof { c: p[0], a0: p[1], a1: p[2], e0: Fr::zero(), z0: Fr::zero(), z1: Fr::zero() }
                })
                .collect(),
        );
    }
    absorb_commitments(tr, bound, &chains);
    let e = tr.challenge(b"range-challenge");
    for ((states, _), chain) in built.iter().zip(chains.iter_mut()) {
        for (st, bp) in states.iter().zip(chain.iter_mut()) {
            let e_real = e - st.e_sim;
            let z_real = st.k + e_real * st.s;
            if st.bit {
                bp.e0 = st.e_sim;
                bp.z0 = st.z_sim;
                bp.z1 = z_real;
            } else {
                bp.e0 = e_real;
                bp.z0 = z_real;
                bp.z1 = st.z_sim;
            }
        }
    }
    absorb_responses(tr, &chains);
    Ok(RangeProof { bits, chains })
}

/// Checks a range proof against the entry commitments.
pub(crate) fn verify(
    params: &Params,
    tr: &mut Transcript,
    commitments: &[G1Affine],
    bound: u64,
    proof: &RangeProof,
) -> bool {
    let bits = bit_length(bound);
    if proof.bits != bits
        || proof.chains.len() != commitments.len()
        || proof.chains.iter().any(|c| c.len() != bits as usize)
    {
        return false;
    }
    absorb_commitments(tr, bound, &proof.chains);
    let e = tr.challenge(b"range-challenge");
    absorb_responses(tr, &proof.chains);
    let mut wrng = ChaCha20Rng::from_seed(tr.challenge_bytes(b"range-weights"));

    let n_bits = proof.chains.len() * bits as usize;
    let mut bases = Vec::with_capacity(3 * n_bits + commitments.len() + 2);
    let mut scalars = Vec::with_capacity(bases.capacity());
    let (mut h_coeff, mut g_coeff) = (Fr::zero(), Fr::zero());
    let recompose: Vec<Fr> = weights(bound).into_iter().map(Fr::from).collect();
    for (&c_entry, chain) in commitments.iter().zip(&proof.chains) {
        let w_r = Fr::rand(&mut wrng);
        for (bp, w_t) in chain.iter().zip(&recompose) {
            let (w0, w1) = (Fr::rand(&mut wrng), Fr::rand(&mut wrng));
            let e1 = e - bp.e0;
            // w0·(z0·h − A0 − e0·C) + w1·(z1·h − A1 − e1·(C − g)) = 0
            h_coeff += w0 * bp.z0 + w1 * bp.z1;
            g_coeff += w1 * e1;
            bases.extend([bp.a0, bp.a1, bp.c]);
            scalars.extend([-w0, -w1, w_r * w_t - w0 * bp.e0 - w1 * e1]);
        }
        // Recomposition: Σ w_t·C_t = C.
        bases.push(c_entry);
        scalars.push(-w_r);
    }
    bases.extend([params.h(), params.g()]);
    scalars.extend([h_coeff, g_coeff]);
    msm_g1(&bases, &scalars).is_zero()
}

impl RangeProof {
    pub(crate) fn write(&self, w: &mut Writer) {
        w.u8(super::tag::RANGE);
        w.u8(self.bits);
        w.u64(self.chains.len() as u64);
        for bp in self.chains.iter().flatten() {
            w.elem(&bp.c);
            w.elem(&bp.a0);
            w.elem(&bp.a1);
            w.elem(&bp.e0);
            w.elem(&bp.z0);
            w.elem(&bp.z1);
        }
    }

    pub(crate) fn read(r: &mut Reader<'_>) -> Result<Self, CodecError> {
        if r.u8()? != super::tag::RANGE {
            return Err(CodecError::Invalid("expected a range proof".into()));
        }
        let bits = r.u8()?;
        if bits == 0 || bits > 64 {
            return Err(CodecError::Invalid(format!("bad bit count {bits}")));
        }
        let n = r.len(bits as usize * 240)?;
        let mut chains = Vec::with_capacity(n);
        for _ in 0..n {
            let mut chain = Vec::with_capacity(bits as usize);
            for _ in 0..bits {
                chain.push(BitProof {
                    c: r.elem()?,
                    a0: r.elem()?,
                    a1: r.elem()?,
                    e0: r.elem()?,
                    z0: r.elem()?,
                    z1: r.elem()?,
                });
            }
            chains.push(chain);
        }
        Ok(RangeProof { bits, chains })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ark_ec::CurveGroup;

    fn setup() -> (Params, ChaCha20Rng) {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        (Params::setup(4, false, &mut rng), rng)
    }

    fn commit(p: &Params, vals: &[i128], rands: &[Fr]) -> Vec<G1Affine> {
        vals.iter().zip(rands).map(|(&v, r)| p.pedersen(&Fr::from(v), r).into_affine()).collect()
    }

    #[test]
    fn boundary_values_verify() {
        let (p, mut rng) = setup();
        let bound = 1000;
        let vals = [0i128, 1, 999, 1000];
        let rands: Vec<Fr> = vals.iter().map(|_| Fr::rand(&mut rng)).collect();
        let coms = commit(&p, &vals, &rands);
        let proof = prove(&p, &mut Transcript::new(b"t"), &vals, &rands, bound, &mut rng).unwrap();
        assert!(verify(&p, &mut Transcript::new(b"t"), &coms, bound, &proof));
        assert!(!verify(&p, &mut Transcript::new(b"other"), &coms, bound, &proof));
        let mut swapped = coms.clone();
        swapped.swap(0, 1);
        assert!(!verify(&p, &mut Transcript::new(b"t"), &swapped, bound, &proof));
    }

    #[test]
    fn every_value_decomposes_exactly() {
        for bound in [1u64, 2, 5, 7, 8, 1000, 1 << 10] {
            let w = weights(bound);
            for v in 0..=bound {
                let sum: u64 = decompose(v, bound).iter().zip(&w).filter(|(b, _)| **b).map(|(_, w)| w).sum();
                assert_eq!(sum, v, "bound {bound}");
            }
            assert_eq!(w.iter().sum::<u64>(), bound);
        }
    }

    #[test]
    fn out_of_range_is_refused_by_the_prover() {
        let (p, mut rng) = setup();
        let r = [Fr::rand(&mut rng)];
        assert_eq!(
            prove(&p, &mut Transcript::new(b"t"), &[1001], &r, 1000, &mut rng),
            Err(SigmaError::OutOfRange { value: 1001, bound: 1000 })
        );
        assert!(prove(&p, &mut Transcript::new(b"t"), &[-1], &r, 1000, &mut rng).is_err());
    }

    #[test]
    fn tampered_bit_is_rejected_and_codec_roundtrips() {
        let (p, mut rng) = setup();
        let vals = [5i128];
        let rands = [Fr::rand(&mut rng)];
        let coms = commit(&p, &vals, &rands);
        let proof = prove(&p, &mut Transcript::new(b"t"), &vals, &rands, 7, &mut rng).unwrap();
        let mut w = Writer::default();
        proof.write(&mut w);
        let bytes = w.finish();
        let back = RangeProof::read(&mut Reader::new(&bytes)).unwrap();
        assert_eq!(back, proof);
        let mut bad = proof.clone();
        bad.chains[0][1].z1 += Fr::from(1u64);
        assert!(!verify(&p, &mut Transcript::new(b"t"), &coms, 7, &bad));
    }
}
