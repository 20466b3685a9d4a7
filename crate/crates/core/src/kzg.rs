//! Hiding KZG commitments specialised to proofs that a committed polynomial
//! vanishes on a public set of points.
//!
//! A polynomial `p` over an interpolation domain `D` is committed as
//! `p̃ = p + r·Z_D`. Since every evaluation set `E` used here lies inside `D`,
//! `p̃` vanishes on `E` exactly when `p` does, and the proof is the commitment
//! to the quotient `p̃ / Z_E`.

use ark_ec::pairing::Pairing;
use ark_ec::scalar_mul::ScalarMul;
use ark_ec::{AffineRepr, CurveGroup, PrimeGroup};
use ark_ff::{FftField, Field, One, UniformRand, Zero};
use ark_poly::univariate::{DenseOrSparsePolynomial, DensePolynomial};
use ark_poly::{DenseUVPolynomial, EvaluationDomain, Polynomial, Radix2EvaluationDomain};
use rand::RngCore;
use thiserror::Error;

use crate::crypto::{msm_g1, msm_g2, multi_pairing, ops, CodecError, Curve, Fr, G1Affine, G2Affine, Reader, Writer, G1, G2};

const SRS_MAGIC: &[u8; 4] = b"ZSRS";

#[derive(Debug, Error)]
pub enum KzgError {
    #[error("polynomial of degree {degree} exceeds the reference string bound {max}")]
    DegreeOverflow { degree: usize, max: usize },
    #[error("evaluation set of size {size} exceeds the reference string bound {max}")]
    BatchTooLarge { size: usize, max: usize },
    #[error("committed polynomial does not vanish on the evaluation set")]
    NonzeroRemainder,
    #[error("reference string was produced by an insecure setup")]
    InsecureSetup,
    #[error("reference string failed the consistency check")]
    Inconsistent,
    #[error(transparent)]
    Codec(#[from] CodecError),
}

/// Interpolation domain of a committed polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Domain {
    /// `offset · H` for the multiplicative subgroup `H` of the given power-of-two size.
    Coset { offset: Fr, size: usize },
    /// An arbitrary set of distinct points.
    Points(Vec<Fr>),
}

impl Domain {
    pub fn coset(offset: Fr, size: usize) -> Self {
        assert!(size.is_power_of_two(), "coset size must be a power of two");
        Domain::Coset { offset, size }
    }

    pub fn size(&self) -> usize {
        match self {
            Domain::Coset { size, .. } => *size,
            Domain::Points(p) => p.len(),
        }
    }

    pub fn radix2(&self) -> Option<Radix2EvaluationDomain<Fr>> {
        match self {
            Domain::Coset { offset, size } => Radix2EvaluationDomain::new(*size)?.get_coset(*offset),
            Domain::Points(_) => None,
        }
    }

    pub fn element(&self, i: usize) -> Fr {
        match self {
            Domain::Coset { .. } => self.radix2().expect("valid coset").element(i),
            Domain::Points(p) => p[i],
        }
    }

    pub fn elements(&self) -> Vec<Fr> {
        match self {
            Domain::Coset { .. } => self.radix2().expect("valid coset").elements().collect(),
            Domain::Points(p) => p.clone(),
        }
    }

    /// `Z_D(X) = Π_{d ∈ D} (X − d)`; for a coset this is `X^N − offset^N`.
    pub fn vanishing(&self) -> DensePolynomial<Fr> {
        match self {
            Domain::Coset { offset, size } => {
                let mut c = vec![Fr::zero(); size + 1];
                c[0] = -offset.pow([*size as u64]);
                c[*size] = Fr::one();
                DensePolynomial::from_coefficients_vec(c)
            }
            Domain::Points(p) => vanishing_poly(p),
        }
    }
}

/// Vanishing polynomial of a point set, by a product tree.
pub fn vanishing_poly(points: &[Fr]) -> DensePolynomial<Fr> {
    match points.len() {
        0 => DensePolynomial::from_coefficients_vec(vec![Fr::one()]),
        1 => DensePolynomial::from_coefficients_vec(vec![-points[0], Fr::one()]),
        n if n <= 32 => points.iter().fold(DensePolynomial::from_coefficients_vec(vec![Fr::one()]), |acc, e| {
            acc.naive_mul(&DensePolynomial::from_coefficients_vec(vec![-*e, Fr::one()]))
        }),
        n => {
            let (l, r) = points.split_at(n / 2);
            let (a, b) = rayon::join(|| vanishing_poly(l), || vanishing_poly(r));
            ops::record(|c| c.fft_points += 3 * (a.coeffs.len() + b.coeffs.len()).next_power_of_two() as u64);
            &a * &b
        }
    }
}

/// Structured reference string: `g^{τ^i}` for `i ≤ degree` and `g'^{τ^j}` for `j ≤ max_batch`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Srs {
    pub g1: Vec<G1Affine>,
    pub g2: Vec<G2Affine>,
    trapdoor: Option<Fr>,
}

impl Srs {
    /// Samples `τ` and derives the powers; `τ` is kept only when `insecure` is set.
    pub fn setup(degree: usize, max_batch: usize, insecure: bool, rng: &mut impl RngCore) -> Self {
        let tau = Fr::rand(rng);
        let mut srs = Self::from_trapdoor(tau, degree, max_batch);
        if !insecure {
            srs.trapdoor = None;
        }
        srs
    }

    /// Deterministic reference string for a known `τ`; always marked insecure.
    pub fn from_trapdoor(tau: Fr, degree: usize, max_batch: usize) -> Self {
        let powers = |n: usize| {
            let mut v = Vec::with_capacity(n + 1);
            let mut acc = Fr::one();
            for _ in 0..=n {
                v.push(acc);
                acc *= tau;
            }
            v
        };
        let (g1, g2) = rayon::join(
            || G1::generator().batch_mul(&powers(degree)),
            || G2::generator().batch_mul(&powers(max_batch.max(1))),
        );
        Srs { g1, g2, trapdoor: Some(tau) }
    }

    pub fn degree(&self) -> usize {
        self.g1.len() - 1
    }

    pub fn max_batch(&self) -> usize {
        self.g2.len() - 1
    }

    pub fn is_insecure(&self) -> bool {
        self.trapdoor.is_some()
    }

    pub fn trapdoor(&self) -> Option<Fr> {
        self.trapdoor
    }

    /// Randomised check that consecutive powers share one ratio in both groups.
    ///
    /// Uses `e(Σρ_i g_i, g'^τ) = e(Σρ_i g_{i+1}, g')` and the analogue in G2.
    pub fn is_consistent(&self, rng: &mut impl RngCore) -> bool {
        if self.g1.len() < 2 || self.g2.len() < 2 {
            return false;
        }
        if self.g1[0] != G1Affine::generator() || self.g2[0] != G2Affine::generator() {
            return false;
        }
        let rho1: Vec<Fr> = (1..self.g1.len()).map(|_| Fr::rand(rng)).collect();
        let lo = msm_g1(&self.g1[..self.g1.len() - 1], &rho1).into_affine();
        let hi = msm_g1(&self.g1[1..], &rho1).into_affine();
        let first = multi_pairing(&[lo, (-hi.into_group()).into_affine()], &[self.g2[1], self.g2[0]]);

        let rho2: Vec<Fr> = (1..self.g2.len()).map(|_| Fr::rand(rng)).collect();
        let lo2 = msm_g2(&self.g2[..self.g2.len() - 1], &rho2).into_affine();
        let hi2 = msm_g2(&self.g2[1..], &rho2).into_affine();
        let second = multi_pairing(&[self.g1[1], (-self.g1[0].into_group()).into_affine()], &[lo2, hi2]);
        first.is_zero() && second.is_zero()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::with_header(SRS_MAGIC);
        w.u8(self.trapdoor.is_some() as u8);
        w.elems(&self.g1);
        w.elems(&self.g2);
        if let Some(t) = &self.trapdoor {
            w.elem(t);
        }
        w.finish()
    }

    /// Parses a reference string, refusing insecure ones unless `allow_insecure`.
    pub fn from_bytes(bytes: &[u8], allow_insecure: bool) -> Result<Self, KzgError> {
        let mut r = Reader::with_header(bytes, SRS_MAGIC)?;
        let insecure = match r.u8()? {
            0 => false,
            1 => true,
            v => return Err(CodecError::Invalid(format!("bad setup flag {v}")).into()),
        };
        if insecure && !allow_insecure {
            return Err(KzgError::InsecureSetup);
        }
        let g1: Vec<G1Affine> = r.elems()?;
        let g2: Vec<G2Affine> = r.elems()?;
        let trapdoor = if insecure { Some(r.elem()?) } else { None };
        r.finish()?;
        if g1.len() < 2 || g2.len() < 2 {
            return Err(KzgError::Inconsistent);
        }
        Ok(Srs { g1, g2, trapdoor })
    }
}

/// Commitment to a single polynomial.
pub type PolyCommitment = G1Affine;

/// Proof that a committed polynomial vanishes on a set: the commitment to the quotient.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VanishingProof(pub G1Affine);

/// The blinded polynomial `p + r·Z_D`.
pub fn blind(p: &DensePolynomial<Fr>, domain: &Domain, r: Fr) -> DensePolynomial<Fr> {
    p + &(&domain.vanishing() * r)
}

fn commit_poly(srs: &Srs, p: &DensePolynomial<Fr>) -> Result<G1Affine, KzgError> {
    if p.coeffs.len() > srs.g1.len() {
        return Err(KzgError::DegreeOverflow { degree: p.degree(), max: srs.degree() });
    }
    Ok(msm_g1(&srs.g1[..p.coeffs.len()], &p.coeffs).into_affine())
}

/// Commits to `p + r·Z_D`.
pub fn commit_hiding(srs: &Srs, p: &DensePolynomial<Fr>, domain: &Domain, r: Fr) -> Result<PolyCommitment, KzgError> {
    if !p.is_zero() && p.degree() >= domain.size() {
        return Err(KzgError::DegreeOverflow { degree: p.degree(), max: domain.size() - 1 });
    }
    commit_poly(srs, &blind(p, domain, r))
}

/// Proves that `p + r·Z_D` is divisible by `Z_E`.
pub fn prove_vanishing(
    srs: &Srs,
    p: &DensePolynomial<Fr>,
    r: Fr,
    domain: &Domain,
    points: &[Fr],
) -> Result<VanishingProof, KzgError> {
    if points.len() > srs.max_batch() {
        return Err(KzgError::BatchTooLarge { size: points.len(), max: srs.max_batch() });
    }
    let blinded = blind(p, domain, r);
    let z = vanishing_poly(points);
    let q = divide_exact(&blinded, &z).ok_or(KzgError::NonzeroRemainder)?;
    commit_poly(srs, &q).map(VanishingProof)
}

/// Checks `e(c, g') = e(π, g'^{Z_E(τ)})`.
pub fn verify_vanishing(srs: &Srs, c: &PolyCommitment, points: &[Fr], proof: &VanishingProof) -> bool {
    if points.len() > srs.max_batch() {
        return false;
    }
    let z = vanishing_poly(points);
    let z_tau = msm_g2(&srs.g2[..z.coeffs.len()], &z.coeffs).into_affine();
    let neg_pi = (-proof.0.into_group()).into_affine();
    multi_pairing(&[*c, neg_pi], &[srs.g2[0], z_tau]).is_zero()
}

/// Verifies several vanishing claims with one multi-pairing, using random weights.
pub fn verify_vanishing_batch(
    srs: &Srs,
    claims: &[(PolyCommitment, &[Fr], VanishingProof)],
    rng: &mut impl RngCore,
) -> bool {
    if claims.iter().any(|(_, e, _)| e.len() > srs.max_batch()) {
        return false;
    }
    let mut lhs = G1::zero();
    let mut g1s = Vec::with_capacity(claims.len() + 1);
    let mut g2s = Vec::with_capacity(claims.len() + 1);
    for (c, points, proof) in claims {
        let rho = Fr::rand(rng);
        lhs += c.into_group() * rho;
        let z = vanishing_poly(points);
        g2s.push(msm_g2(&srs.g2[..z.coeffs.len()], &z.coeffs).into_affine());
        g1s.push((-(proof.0.into_group() * rho)).into_affine());
    }
    g1s.push(lhs.into_affine());
    g2s.push(srs.g2[0]);
    multi_pairing(&g1s, &g2s).is_zero()
}

/// Quotient `a / b` when `b` divides `a`, computed on a coset that avoids the roots of `b`.
pub fn divide_exact(a: &DensePolynomial<Fr>, b: &DensePolynomial<Fr>) -> Option<DensePolynomial<Fr>> {
    if b.is_zero() {
        return None;
    }
    if a.is_zero() {
        return Some(DensePolynomial::zero());
    }
    if a.degree() < b.degree() {
        return None;
    }
    if b.degree() == 0 {
        return Some(a * b.coeffs[0].inverse().expect("nonzero constant"));
    }
    let size = (a.degree() + 1).next_power_of_two();
    // g³ lies outside every coset g·H and g²·H used as interpolation domains.
    let offset = Fr::GENERATOR.pow([3u64]);
    let coset = Radix2EvaluationDomain::<Fr>::new(size).and_then(|d| d.get_coset(offset))?;
    ops::record(|c| c.fft_points += 3 * size as u64);
    let num = coset.fft(&a.coeffs);
    let mut den = coset.fft(&b.coeffs);
    if den.iter().any(Zero::is_zero) {
        return divide_long(a, b);
    }
    ark_ff::batch_inversion(&mut den);
    let ratio: Vec<Fr> = num.iter().zip(&den).map(|(x, y)| *x * y).collect();
    let mut q = coset.ifft(&ratio);
    let qdeg = a.degree() - b.degree();
    if q[qdeg + 1..].iter().any(|c| !c.is_zero()) {
        return None;
    }
    q.truncate(qdeg + 1);
    Some(DensePolynomial::from_coefficients_vec(q))
}

fn divide_long(a: &DensePolynomial<Fr>, b: &DensePolynomial<Fr>) -> Option<DensePolynomial<Fr>> {
    let (q, r) = DenseOrSparsePolynomial::from(a).divide_with_q_and_r(&DenseOrSparsePolynomial::from(b))?;
    r.is_zero().then_some(q)
}

/// Checks a pairing equation directly; exposed for trapdoor-based tests.
pub fn pairing_check(a: G1Affine, b: G2Affine, c: G1Affine, d: G2Affine) -> bool {
    Curve::pairing(a, b) == Curve::pairing(c, d)
}
