//! Public batches and secret membership polynomials for explicit systems.
//!
//! States and pairs of states are embedded into two disjoint cosets of
//! power-of-two subgroups of the scalar field: `D1 = g·H1` for states and
//! `D2 = g²·H2` for pairs, where `g` is the multiplicative generator.

use std::collections::BTreeSet;

use ark_ff::{BigInteger, FftField, Field, PrimeField, UniformRand, Zero};
use ark_poly::univariate::DensePolynomial;
use ark_poly::{DenseUVPolynomial, EvaluationDomain};
use rand::RngCore;
use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::crypto::{ops, Fr};
use crate::kzg::Domain;
use crate::model::{BuchiSpec, ExplicitRanking, ExplicitSystem, Letter, ModelError};

/// Largest supported pair-domain size, as a power of two.
pub const MAX_DOMAIN_LOG: u32 = 26;

#[derive(Debug, Error)]
pub enum ExplicitError {
    #[error("{states} states need a pair domain beyond 2^{MAX_DOMAIN_LOG}")]
    DomainOverflow { states: usize },
    #[error("ranking table is not total on S x Q")]
    PartialRanking,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Injective public encodings of states into `D1` and of pairs into `D2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    states: usize,
    d1: Domain,
    d2: Domain,
    gen1: Fr,
    gen2: Fr,
}

impl Embedding {
    pub fn new(states: usize) -> Result<Self, ExplicitError> {
        let n1 = states.max(1).next_power_of_two();
        let n2 = states
            .max(1)
            .checked_mul(states.max(1))
            .map(usize::next_power_of_two)
            .filter(|n| n.trailing_zeros() <= MAX_DOMAIN_LOG)
            .ok_or(ExplicitError::DomainOverflow { states })?;
        let g = Fr::GENERATOR;
        let d1 = Domain::coset(g, n1);
        let d2 = Domain::coset(g.square(), n2);
        let gen1 = d1.radix2().expect("two-adic domain").group_gen();
        let gen2 = d2.radix2().expect("two-adic domain").group_gen();
        Ok(Embedding { states, d1, d2, gen1, gen2 })
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn state_domain(&self) -> &Domain {
        &self.d1
    }

    pub fn pair_domain(&self) -> &Domain {
        &self.d2
    }

    pub fn pair_index(&self, s: usize, t: usize) -> usize {
        s * self.states + t
    }

    /// `e1(s) = g · ω1^s`.
    pub fn e1(&self, s: usize) -> Fr {
        Fr::GENERATOR * self.gen1.pow([s as u64])
    }

    /// `e2(s, t) = g² · ω2^(s·|S| + t)`.
    pub fn e2(&self, s: usize, t: usize) -> Fr {
        Fr::GENERATOR.square() * self.gen2.pow([self.pair_index(s, t) as u64])
    }
}

/// Same as [`Embedding::new`].
pub fn build_embedding(states: usize) -> Result<Embedding, ExplicitError> {
    Embedding::new(states)
}

/// Public batches of hypothetical violations and their field images.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BatchSets {
    pub init: Vec<usize>,
    pub step: Vec<(usize, usize)>,
    pub fair: Vec<(usize, usize)>,
    pub e_init: Vec<Fr>,
    pub e_step: Vec<Fr>,
    pub e_fair: Vec<Fr>,
}

impl BatchSets {
    /// `|E_init| + |E_step| + |E_fair|`.
    pub fn total(&self) -> usize {
        self.e_init.len() + self.e_step.len() + self.e_fair.len()
    }

    /// Images of `B_step ∪ B_fair`, without duplicates, ordered by pair index.
    pub fn transition_points(&self, emb: &Embedding) -> Vec<Fr> {
        let pairs: BTreeSet<(usize, usize)> = self.step.iter().chain(&self.fair).copied().collect();
        pairs.into_iter().map(|(s, t)| emb.e2(s, t)).collect()
    }

    /// Sorted arrays of canonical big-endian hex field elements.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "init": sorted_hex(&self.e_init),
            "step": sorted_hex(&self.e_step),
            "fair": sorted_hex(&self.e_fair),
        })
    }
}

/// Canonical big-endian hex of a field element.
pub fn fr_hex(x: &Fr) -> String {
    x.into_bigint().to_bytes_be().iter().map(|b| format!("{b:02x}")).collect()
}

fn sorted_hex(v: &[Fr]) -> Vec<String> {
    let mut ints: Vec<_> = v.iter().map(|x| x.into_bigint()).collect();
    ints.sort();
    ints.iter().map(|b| b.to_bytes_be().iter().map(|b| format!("{b:02x}")).collect()).collect()
}

/// Enumerates `B_init`, `B_step` and `B_fair` from the labels of the states,
/// the automaton and the ranking table.
pub fn enumerate_batches(
    letters: &[Letter],
    spec: &BuchiSpec,
    rank: &ExplicitRanking,
    emb: &Embedding,
) -> Result<BatchSets, ExplicitError> {
    let n = letters.len();
    if !rank.is_total(n, spec.num_states()) {
        return Err(ExplicitError::PartialRanking);
    }
    let init: Vec<usize> = (0..n).filter(|&s| spec.init.iter().any(|&q| !rank.get(s, q).is_finite())).collect();

    let per_source: Vec<(Vec<(usize, usize)>, Vec<(usize, usize)>)> = (0..n)
        .into_par_iter()
        .map(|s| {
            let mut step = Vec::new();
            let mut fair = Vec::new();
            // For each successor automaton state, the smallest finite source rank that reaches it, split by fairness.
            let mut reach: Vec<(usize, crate::model::Rank, bool)> = Vec::new();
            for q in 0..spec.num_states() {
                let v = rank.get(s, q);
                if !v.is_finite() {
                    continue;
                }
                for e in spec.successors(q, letters[s]) {
                    reach.push((e.to, v, e.fair));
                }
            }
            if reach.is_empty() {
                return (step, fair);
            }
            for t in 0..n {
                let is_step = reach.iter().any(|&(q2, v, _)| v < rank.get(t, q2));
                let is_fair = reach.iter().any(|&(q2, v, f)| f && v <= rank.get(t, q2));
                if is_step {
                    step.push((s, t));
                }
                if is_fair {
                    fair.push((s, t));
                }
            }
            (step, fair)
        })
        .collect();
    let (step, fair): (Vec<_>, Vec<_>) = per_source.into_iter().unzip();
    let step: Vec<(usize, usize)> = step.into_iter().flatten().collect();
    let fair: Vec<(usize, usize)> = fair.into_iter().flatten().collect();

    Ok(BatchSets {
        e_init: init.iter().map(|&s| emb.e1(s)).collect(),
        e_step: step.iter().map(|&(s, t)| emb.e2(s, t)).collect(),
        e_fair: fair.iter().map(|&(s, t)| emb.e2(s, t)).collect(),
        init,
        step,
        fair,
    })
}

/// Batches of an explicit system; only its labels are read.
pub fn batches_for(
    sys: &ExplicitSystem,
    spec: &BuchiSpec,
    rank: &ExplicitRanking,
    emb: &Embedding,
) -> Result<BatchSets, ExplicitError> {
    enumerate_batches(&sys.letters(spec)?, spec, rank, emb)
}

/// Indicator polynomials of `S0` over `D1` and of `T` over `D2`, with blinding scalars.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipPolys {
    pub p_init: DensePolynomial<Fr>,
    pub p_trans: DensePolynomial<Fr>,
    pub r_init: Fr,
    pub r_trans: Fr,
}

pub fn build_membership_polys(sys: &ExplicitSystem, emb: &Embedding, rng: &mut impl RngCore) -> MembershipPolys {
    assert_eq!(sys.num_states(), emb.states(), "embedding does not cover the system");
    let mut init = vec![Fr::zero(); emb.d1.size()];
    for &s in &sys.init {
        init[s] = Fr::from(1u64);
    }
    let mut trans = vec![Fr::zero(); emb.d2.size()];
    for &(s, t) in &sys.transitions {
        trans[emb.pair_index(s, t)] = Fr::from(1u64);
    }
    MembershipPolys {
        p_init: interpolate_coset(&emb.d1, init),
        p_trans: interpolate_coset(&emb.d2, trans),
        r_init: Fr::rand(rng),
        r_trans: Fr::rand(rng),
    }
}

fn interpolate_coset(domain: &Domain, values: Vec<Fr>) -> DensePolynomial<Fr> {
    let d = domain.radix2().expect("coset domain");
    ops::record(|c| c.fft_points += values.len() as u64);
    DensePolynomial::from_coefficients_vec(d.ifft(&values))
}

/// Lagrange interpolation through arbitrary distinct points.
pub fn interpolate(points: &[Fr], values: &[Fr]) -> DensePolynomial<Fr> {
    assert_eq!(points.len(), values.len());
    let z = crate::kzg::vanishing_poly(points);
    let mut acc = DensePolynomial::zero();
    for (i, (&x, &y)) in points.iter().zip(values).enumerate() {
        if y.is_zero() {
            continue;
        }
        let denom: Fr = points.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &p)| x - p).product();
        let basis = crate::kzg::divide_exact(&z, &DensePolynomial::from_coefficients_vec(vec![-x, Fr::from(1u64)]))
            .expect("root of the vanishing polynomial");
        acc = &acc + &(&basis * (y * denom.inverse().expect("distinct points")));
    }
    acc
}

/// `S0 ∩ B_init = ∅ ∧ T ∩ B_step = ∅ ∧ T ∩ B_fair = ∅`.
pub fn plaintext_disjointness(sys: &ExplicitSystem, batches: &BatchSets) -> bool {
    batches.init.iter().all(|s| !sys.init.contains(s))
        && batches.step.iter().chain(&batches.fair).all(|p| !sys.transitions.contains(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ark_poly::Polynomial;

    #[test]
    fn domains_have_expected_sizes_and_are_disjoint() {
        let emb = Embedding::new(2).unwrap();
        assert_eq!(emb.state_domain().size(), 2);
        assert_eq!(emb.pair_domain().size(), 4);
        let a: BTreeSet<_> = emb.state_domain().elements().into_iter().map(|x| x.into_bigint()).collect();
        assert!(emb.pair_domain().elements().iter().all(|x| !a.contains(&x.into_bigint())));
        assert_eq!(Embedding::new(32).unwrap().pair_domain().size(), 1024);
    }

    #[test]
    fn two_point_lagrange() {
        let p = interpolate(&[Fr::from(1u64), Fr::from(2u64)], &[Fr::from(1u64), Fr::zero()]);
        assert_eq!(p.coeffs, vec![Fr::from(2u64), -Fr::from(1u64)]);
        assert_eq!(p.evaluate(&Fr::from(2u64)), Fr::zero());
    }
}
