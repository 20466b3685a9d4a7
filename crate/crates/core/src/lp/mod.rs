//! Exact rational linear feasibility and Farkas witnesses.
//!
//! Feasibility of `A x ≤ b` (with `x` free) is decided by two phase-one simplex
//! runs over arbitrary-precision rationals with Bland's rule. The first looks
//! for a dual ray `λ ≥ 0, Aᵀλ = 0, bᵀλ = −1`; if none exists the primal system
//! is feasible and the second run produces a point.

mod simplex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::model::LinSys;
use crate::symbolic::Obligation;

pub use simplex::phase_one;

pub type Rational = BigRational;

/// A rational system `rows · x ≤ rhs` over free variables.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalLp {
    pub cols: usize,
    pub rows: Vec<Vec<Rational>>,
    pub rhs: Vec<Rational>,
}

impl From<&LinSys> for RationalLp {
    fn from(sys: &LinSys) -> Self {
        RationalLp {
            cols: sys.cols(),
            rows: sys.rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect(),
            rhs: sys.rhs.iter().map(|&v| int(v)).collect(),
        }
    }
}

fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Outcome of a feasibility query.
#[derive(Clone, Debug, PartialEq)]
pub enum Feasibility {
    /// A rational point satisfying every row.
    Sat(Vec<Rational>),
    /// A dual ray `λ ≥ 0` with `Aᵀλ = 0` and `bᵀλ < 0`.
    Unsat(Vec<Rational>),
}

impl Feasibility {
    pub fn is_sat(&self) -> bool {
        matches!(self, Feasibility::Sat(_))
    }
}

/// Decides feasibility exactly; the returned certificate is re-checked before returning.
pub fn feasible(lp: &RationalLp) -> Feasibility {
    let m = lp.rows.len();
    let n = lp.cols;

    // Dual system: one equation per column plus the normalisation bᵀλ = −1.
    let mut dual_a = vec![vec![Rational::zero(); m]; n + 1];
    for (i, row) in lp.rows.iter().enumerate() {
        for (k, v) in row.iter().enumerate() {
            dual_a[k][i] = v.clone();
        }
        dual_a[n][i] = lp.rhs[i].clone();
    }
    let mut dual_b = vec![Rational::zero(); n + 1];
    dual_b[n] = -Rational::one();
    if let Some(ray) = phase_one(&dual_a, &dual_b) {
        assert!(is_dual_ray(lp, &ray), "simplex returned an invalid dual ray");
        return Feasibility::Unsat(ray);
    }

    // Primal: x = x⁺ − x⁻ with slacks, all nonnegative.
    let width = 2 * n + m;
    let mut primal_a = Vec::with_capacity(m);
    for (i, row) in lp.rows.iter().enumerate() {
        let mut r = vec![Rational::zero(); width];
        for (k, v) in row.iter().enumerate() {
            r[k] = v.clone();
            r[n + k] = -v.clone();
        }
        r[2 * n + i] = Rational::one();
        primal_a.push(r);
    }
    let y = phase_one(&primal_a, &lp.rhs).expect("Farkas alternative violated: neither system feasible");
    let point: Vec<Rational> = (0..n).map(|k| &y[k] - &y[n + k]).collect();
    assert!(satisfies(lp, &point), "simplex returned an infeasible point");
    Feasibility::Sat(point)
}

/// Convenience wrapper for integer systems.
pub fn feasible_int(sys: &LinSys) -> Feasibility {
    feasible(&RationalLp::from(sys))
}

pub fn satisfies(lp: &RationalLp, x: &[Rational]) -> bool {
    lp.rows.iter().zip(&lp.rhs).all(|(row, b)| {
        let lhs: Rational = row.iter().zip(x).map(|(a, v)| a * v).sum();
        &lhs <= b
    })
}

pub fn is_dual_ray(lp: &RationalLp, ray: &[Rational]) -> bool {
    if ray.len() != lp.rows.len() || ray.iter().any(|v| v.is_negative()) {
        return false;
    }
    let combined_zero = (0..lp.cols).all(|k| {
        let s: Rational = lp.rows.iter().zip(ray).map(|(r, l)| &r[k] * l).sum();
        s.is_zero()
    });
    let rhs: Rational = lp.rhs.iter().zip(ray).map(|(b, l)| b * l).sum();
    combined_zero && rhs.is_negative()
}

/// Multiplies a nonnegative rational vector by the LCM of its denominators.
pub fn scale_to_integers(v: &[Rational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
}

/// A bounded nonnegative integer Farkas witness for one obligation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FarkasWitness {
    /// One multiplier per secret row.
    pub lambda: Vec<u64>,
    /// One multiplier per public row.
    pub mu: Vec<u64>,
    /// `−b_sᵀλ − h_pᵀμ − 1`.
    pub slack: u64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WitnessError {
    #[error("obligation is satisfiable, no Farkas witness exists")]
    NoWitness(Vec<Rational>),
    #[error("witness entry {largest} exceeds the bound {bound}")]
    BoundExceeded { largest: BigInt, bound: u64 },
}

impl FarkasWitness {
    /// Exact integer re-substitution: `A_sᵀλ + G_pᵀμ = 0` and the recorded slack.
    pub fn verify(&self, secret: &LinSys, public: &LinSys) -> bool {
        if self.lambda.len() != secret.len() || self.mu.len() != public.len() || secret.cols() != public.cols() {
            return false;
        }
        let zero = (0..secret.cols()).all(|k| {
            let s: i128 = secret.rows.iter().zip(&self.lambda).map(|(r, &l)| r[k] as i128 * l as i128).sum::<i128>()
                + public.rows.iter().zip(&self.mu).map(|(r, &m)| r[k] as i128 * m as i128).sum::<i128>();
            s == 0
        });
        let combined: i128 = secret.rhs.iter().zip(&self.lambda).map(|(&b, &l)| b as i128 * l as i128).sum::<i128>()
            + public.rhs.iter().zip(&self.mu).map(|(&h, &m)| h as i128 * m as i128).sum::<i128>();
        zero && -combined - 1 == self.slack as i128
    }

    pub fn max_entry(&self) -> u64 {
        self.lambda.iter().chain(&self.mu).copied().chain([self.slack]).max().unwrap_or(0)
    }
}

/// Produces a bounded integer witness for an obligation's infeasibility.
pub fn farkas_witness(ob: &Obligation, bound: u64) -> Result<FarkasWitness, WitnessError> {
    witness_for(&ob.secret, &ob.public, bound)
}

/// Witnesses for every obligation, computed in parallel.
///
/// On failure returns the lowest failing index with its error.
pub fn witnesses(obligations: &[Obligation], bound: u64) -> Result<Vec<FarkasWitness>, (usize, WitnessError)> {
    let results: Vec<_> = obligations.par_iter().map(|ob| farkas_witness(ob, bound)).collect();
    results.into_iter().enumerate().map(|(i, r)| r.map_err(|e| (i, e))).collect()
}

/// Witness for the stacked system `[secret; public]`.
pub fn witness_for(secret: &LinSys, public: &LinSys, bound: u64) -> Result<FarkasWitness, WitnessError> {
    let mut stacked = secret.clone();
    stacked.stack(public);
    let ray = match feasible_int(&stacked) {
        Feasibility::Sat(point) => return Err(WitnessError::NoWitness(point)),
        Feasibility::Unsat(ray) => ray,
    };
    let mut ints = scale_to_integers(&ray);
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if !g.is_zero() && !g.is_one() {
        for v in ints.iter_mut() {
            *v /= &g;
        }
    }
    let combined: BigInt = stacked.rhs.iter().zip(&ints).map(|(&b, l)| BigInt::from(b) * l).sum();
    let slack: BigInt = -combined - 1;
    debug_assert!(!slack.is_negative());
    let largest = ints.iter().chain([&slack]).max().cloned().unwrap_or_default();
    let fits = |v: &BigInt| v.to_u64().filter(|&x| x <= bound);
    let entries: Option<Vec<u64>> = ints.iter().map(fits).collect();
    match (entries, fits(&slack)) {
        (Some(entries), Some(slack)) => {
            let (lambda, mu) = entries.split_at(secret.len());
            let w = FarkasWitness { lambda: lambda.to_vec(), mu: mu.to_vec(), slack };
            assert!(w.verify(secret, public), "scaled witness failed re-substitution");
            Ok(w)
        }
        _ => Err(WitnessError::BoundExceeded { largest, bound }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn contradictory_bounds_yield_unit_ray() {
        let sys = LinSys::from_rows(1, vec![(vec![1], -1), (vec![-1], 0)]);
        match feasible_int(&sys) {
            Feasibility::Unsat(ray) => assert_eq!(ray, vec![q(1, 1), q(1, 1)]),
            other => panic!("expected unsat, got {other:?}"),
        }
    }

    #[test]
    fn single_upper_bound_is_sat() {
        let sys = LinSys::from_rows(1, vec![(vec![1], 5)]);
        assert!(feasible_int(&sys).is_sat());
    }

    #[test]
    fn scaling_uses_lcm() {
        let scaled = scale_to_integers(&[q(1, 2), q(1, 3)]);
        assert_eq!(scaled, vec![BigInt::from(3), BigInt::from(2)]);
    }

    #[test]
    fn toy_witness() {
        let secret = LinSys::from_rows(1, vec![(vec![1], -1)]);
        let public = LinSys::from_rows(1, vec![(vec![-1], 0)]);
        let w = witness_for(&secret, &public, 1 << 32).unwrap();
        assert_eq!(w, FarkasWitness { lambda: vec![1], mu: vec![1], slack: 0 });
    }

    #[test]
    fn satisfiable_obligation_has_no_witness() {
        let secret = LinSys::from_rows(1, vec![(vec![1], 3)]);
        let public = LinSys::from_rows(1, vec![(vec![-1], 0)]);
        assert!(matches!(witness_for(&secret, &public, 1 << 32), Err(WitnessError::NoWitness(_))));
    }

    #[test]
    fn large_multipliers_exceed_small_bound() {
        // 1000x ≤ 1 and −x ≤ −1 forces λ = (1, 1000).
        let secret = LinSys::from_rows(1, vec![(vec![1000], 1)]);
        let public = LinSys::from_rows(1, vec![(vec![-1], -1)]);
        assert!(matches!(witness_for(&secret, &public, 100), Err(WitnessError::BoundExceeded { .. })));
        assert!(witness_for(&secret, &public, 1 << 32).is_ok());
    }
}
