use ark_ff::{BigInteger, PrimeField};
use num_bigint::BigUint;
use thiserror::Error;

use super::Fr;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodingError {
    #[error("{value} is outside [-{bound}, {bound}]")]
    OutOfRange { value: i128, bound: u64 },
    #[error("field element is not the image of a bounded integer")]
    NotInImage,
}

/// Bounded signed integers as field elements: `v ↦ v mod p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignedEncoding {
    pub bound: u64,
}

impl SignedEncoding {
    pub fn new(bound: u64) -> Self {
        assert!(bound < 1 << 62, "bound must leave room for products below sqrt(p)");
        SignedEncoding { bound }
    }

    pub fn encode(&self, v: i64) -> Result<Fr, EncodingError> {
        if v.unsigned_abs() > self.bound {
            return Err(EncodingError::OutOfRange { value: v as i128, bound: self.bound });
        }
        Ok(Fr::from(v))
    }

    /// Inverse of [`encode`](Self::encode) on `[0, M] ∪ [p − M, p − 1]`.
    pub fn decode(&self, x: Fr) -> Result<i64, EncodingError> {
        decode_wide(x, self.bound as u128)
            .and_then(|v| i64::try_from(v).ok())
            .ok_or(EncodingError::NotInImage)
    }
}

/// Decodes a field element whose integer preimage has magnitude at most `bound`.
pub fn decode_wide(x: Fr, bound: u128) -> Option<i128> {
    let big = BigUint::from_bytes_le(&x.into_bigint().to_bytes_le());
    let modulus = BigUint::from_bytes_le(&Fr::MODULUS.to_bytes_le());
    if big <= BigUint::from(bound) {
        return i128::try_from(big).ok();
    }
    let neg = &modulus - &big;
    if neg <= BigUint::from(bound) {
        return i128::try_from(neg).ok().map(|v| -v);
    }
    None
}
