use ark_ff::{BigInteger, PrimeField};
use ark_std::Zero;

use super::{ops, Fr, G1Affine, G1};
use ark_ec::CurveGroup;

const WINDOW: usize = 8;

/// Precomputed window table for repeated exponentiation of one G1 base.
///
/// `rows[w][d] = d · 2^(8w) · base`, so a 255-bit exponent costs 32 mixed additions.
#[derive(Clone, Debug)]
pub struct FixedBase {
    rows: Vec<Vec<G1Affine>>,
}

impl FixedBase {
    pub fn new(base: G1Affine) -> Self {
        let windows = (Fr::MODULUS_BIT_SIZE as usize).div_ceil(WINDOW);
        let mut rows = Vec::with_capacity(windows);
        let mut b: G1 = base.into();
        for _ in 0..windows {
            let mut row = Vec::with_capacity(1 << WINDOW);
            let mut acc = G1::zero();
            for _ in 0..1 << WINDOW {
                row.push(acc);
                acc += b;
            }
            rows.push(G1::normalize_batch(&row));
            b = acc;
        }
        FixedBase { rows }
    }

    pub fn mul(&self, k: &Fr) -> G1 {
        ops::record(|c| c.fixed_mul += 1);
        let bytes = k.into_bigint().to_bytes_le();
        let mut acc = G1::zero();
        for (row, &digit) in self.rows.iter().zip(bytes.iter()) {
            if digit != 0 {
                acc += row[digit as usize];
            }
        }
        acc
    }

    pub fn base(&self) -> G1Affine {
        self.rows[0][1]
    }
}
