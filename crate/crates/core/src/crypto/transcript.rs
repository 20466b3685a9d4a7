use ark_ff::PrimeField;
use ark_serialize::CanonicalSerialize;
use sha2::{Digest, Sha256};

use super::{Fr, CURVE_ID, FORMAT_VERSION};

/// Labeled Fiat–Shamir transcript over SHA-256 with length-prefixed absorption.
#[derive(Clone)]
pub struct Transcript {
    state: Sha256,
}

impl Transcript {
    pub fn new(label: &[u8]) -> Self {
        let mut t = Transcript { state: Sha256::new() };
        t.absorb(b"zkmc-transcript", &[FORMAT_VERSION]);
        t.absorb(b"curve", CURVE_ID);
        t.absorb(b"protocol", label);
        t
    }

    fn absorb(&mut self, label: &[u8], bytes: &[u8]) {
        self.state.update((label.len() as u64).to_le_bytes());
        self.state.update(label);
        self.state.update((bytes.len() as u64).to_le_bytes());
        self.state.update(bytes);
    }

    pub fn append_message(&mut self, label: &[u8], bytes: &[u8]) {
        self.absorb(label, bytes);
    }

    pub fn append_u64(&mut self, label: &[u8], v: u64) {
        self.absorb(label, &v.to_le_bytes());
    }

    /// Absorbs any canonically serializable value in compressed form.
    pub fn append<T: CanonicalSerialize>(&mut self, label: &[u8], value: &T) {
        let mut bytes = Vec::with_capacity(value.compressed_size());
        value.serialize_compressed(&mut bytes).expect("in-memory serialization");
        self.absorb(label, &bytes);
    }

    pub fn append_all<T: CanonicalSerialize>(&mut self, label: &[u8], values: &[T]) {
        self.append_u64(label, values.len() as u64);
        for v in values {
            self.append(label, v);
        }
    }

    /// Derives a challenge and binds it into the state.
    pub fn challenge(&mut self, label: &[u8]) -> Fr {
        self.absorb(b"challenge", label);
        let mut wide = [0u8; 64];
        for (i, chunk) in wide.chunks_mut(32).enumerate() {
            let mut h = self.state.clone();
            h.update([i as u8]);
            chunk.copy_from_slice(&h.finalize());
        }
        let c = Fr::from_le_bytes_mod_order(&wide);
        self.append(b"challenge-value", &c);
        c
    }

    /// 32 challenge bytes, for seeding deterministic samplers.
    pub fn challenge_bytes(&mut self, label: &[u8]) -> [u8; 32] {
        self.absorb(b"challenge-bytes", label);
        let out: [u8; 32] = self.state.clone().finalize().into();
        self.absorb(b"challenge-bytes-value", &out);
        out
    }
}
