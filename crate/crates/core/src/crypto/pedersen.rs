use ark_ec::CurveGroup;

use super::{exp_gt, hash_to_g1, hash_to_g2, msm_g1, multi_pairing, pairing, Fr, G1Affine, G2Affine, Gt};

/// Shape of a committed payload.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tier {
    Scalar,
    Vector,
    Matrix,
}

/// A commitment with its tier; scalar and vector commitments live in G1, matrices in GT.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Commitment {
    Scalar(G1Affine),
    Vector(G1Affine),
    Matrix(Gt),
}

impl Commitment {
    pub fn tier(&self) -> Tier {
        match self {
            Commitment::Scalar(_) => Tier::Scalar,
            Commitment::Vector(_) => Tier::Vector,
            Commitment::Matrix(_) => Tier::Matrix,
        }
    }
}

/// Commitment bases.
///
/// `g[k]` are the message bases in G1 and `g2[k]` the column aggregators in G2.
/// A matrix with `m` rows is flattened column-major: entry `(i, j)` is committed
/// under `e(g[i], g2[m·j])`. `h_gt = e(h, g2[0])` blinds matrix commitments.
#[derive(Clone, Debug)]
pub struct PedersenBases {
    pub g: Vec<G1Affine>,
    pub h: G1Affine,
    pub g2: Vec<G2Affine>,
    pub h_gt: Gt,
}

impl PedersenBases {
    /// Bases hashed from a public label, with `len` message bases and `len` aggregators.
    pub fn nums(label: &[u8], len: usize) -> Self {
        let tagged = |tag: &[u8], i: usize| [label, tag, &(i as u64).to_le_bytes()].concat();
        let g: Vec<G1Affine> = (0..len.max(1)).map(|i| hash_to_g1(&tagged(b"/g/", i))).collect();
        let g2: Vec<G2Affine> = (0..len.max(1)).map(|i| hash_to_g2(&tagged(b"/g2/", i))).collect();
        let h = hash_to_g1(&[label, b"/h"].concat());
        let h_gt = pairing(h, g2[0]);
        PedersenBases { g, h, g2, h_gt }
    }

    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }

    /// `Com(v; r)` for a single value, a `Scalar` tier commitment.
    pub fn scalar(&self, v: Fr, r: Fr) -> Commitment {
        Commitment::Scalar(commit_scalar(self, v, r))
    }

    pub fn vector(&self, v: &[Fr], r: Fr) -> Commitment {
        Commitment::Vector(commit_vector(self, v, r))
    }

    pub fn matrix(&self, rows: &[Vec<Fr>], r: Fr) -> Commitment {
        Commitment::Matrix(commit_matrix(self, rows, r))
    }

    /// Checks an opening of `com` as a value of its own tier.
    pub fn opens(&self, com: &Commitment, payload: &[Vec<Fr>], r: Fr) -> bool {
        match com {
            Commitment::Scalar(c) => {
                payload.len() == 1 && payload[0].len() == 1 && commit_scalar(self, payload[0][0], r) == *c
            }
            Commitment::Vector(c) => payload.len() == 1 && commit_vector(self, &payload[0], r) == *c,
            Commitment::Matrix(c) => commit_matrix(self, payload, r) == *c,
        }
    }
}

pub fn commit_scalar(bases: &PedersenBases, v: Fr, r: Fr) -> G1Affine {
    msm_g1(&[bases.g[0], bases.h], &[v, r]).into_affine()
}

pub fn commit_vector(bases: &PedersenBases, v: &[Fr], r: Fr) -> G1Affine {
    assert!(v.len() <= bases.g.len(), "vector longer than the commitment key");
    let mut b: Vec<G1Affine> = bases.g[..v.len()].to_vec();
    b.push(bases.h);
    let mut s = v.to_vec();
    s.push(r);
    msm_g1(&b, &s).into_affine()
}

/// Two-tier commitment to a row-major `m × n` matrix:
/// `Π_j e(c_j, g2[m·j]) · h_gt^r` where `c_j` commits to column `j` without blinding.
pub fn commit_matrix(bases: &PedersenBases, rows: &[Vec<Fr>], r: Fr) -> Gt {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    assert!(rows.iter().all(|row| row.len() == n), "ragged matrix");
    assert!(m <= bases.g.len(), "matrix taller than the commitment key");
    assert!(n == 0 || m * (n - 1) < bases.g2.len(), "matrix wider than the commitment key");
    let columns: Vec<G1Affine> = (0..n)
        .map(|j| {
            let col: Vec<Fr> = rows.iter().map(|row| row[j]).collect();
            msm_g1(&bases.g[..m], &col).into_affine()
        })
        .collect();
    let aggregators: Vec<G2Affine> = (0..n).map(|j| bases.g2[m * j]).collect();
    multi_pairing(&columns, &aggregators) + exp_gt(bases.h_gt, r)
}
