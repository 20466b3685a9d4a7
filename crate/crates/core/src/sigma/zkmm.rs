//! Proof that a GT commitment opens to the product `y = A·x` of a committed
//! matrix and a committed vector.
//!
//! The prover commits to every entry of `A` in G1 and links those entries to
//! the matrix commitment. A challenge `z` folds the rows: with `ρ = (z^i)_i`,
//! `⟨ρ, y⟩ = Σ_j x_j·⟨ρ, A_{·j}⟩`, and the folded column commitments
//! `K_j = Π_i c_{ij}^{z^i}` turn that identity into a linear relation over
//! public bases, proved with a Schnorr protocol.

use ark_ec::{AffineRepr, CurveGroup};
use ark_ff::{UniformRand, Zero};
use rand::RngCore;

use super::zkrp::{prove_link, verify_link, LinkProof};
use super::{flatten_columns, powers, Params, SigmaError};
use crate::crypto::{exp_gt, msm_g1, normalize_g1, pairing, CodecError, Fr, G1Affine, Gt, Reader, Transcript, Writer, G1};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZkmmProof {
    /// Column-major G1 commitments to the entries of `A`.
    pub entries: Vec<G1Affine>,
    pub link: LinkProof,
    pub t_x: G1Affine,
    pub t_y: G1Affine,
    pub t_fold: G1Affine,
    pub z_x: Vec<Fr>,
    pub w_x: Fr,
    pub z_y: Vec<Fr>,
    pub w_y: Fr,
    pub w_fold: Fr,
}

fn absorb_statement(tr: &mut Transcript, rows: usize, cols: usize, c_a: &Gt, c_x: &Gt, c_y: &Gt, entries: &[G1Affine]) {
    tr.append_message(b"protocol", b"zkmm");
    tr.append_u64(b"zkmm-rows", rows as u64);
    tr.append_u64(b"zkmm-cols", cols as u64);
    tr.append(b"zkmm-ca", c_a);
    tr.append(b"zkmm-cx", c_x);
    tr.append(b"zkmm-cy", c_y);
    tr.append_all(b"zkmm-entries", entries);
}

/// Folding weights `coeff[i + m·j] = scale_j · z^i` over the column-major entries.
fn fold_weights(rho: &[Fr], scale: &[Fr]) -> Vec<Fr> {
    scale.iter().flat_map(|s| rho.iter().map(move |r| *r * s)).collect()
}

/// Proves `c_y = Com(A·x; r_y)` for `c_a = Com(A; r_a)` (row-major `A`, committed column-major) and `c_x = Com(x; r_x)`.
///
/// Returns `(c_y, y, proof)`.
#[allow(clippy::too_many_arguments)]
pub fn prove(
    params: &Params,
    tr: &mut Transcript,
    matrix: &[Vec<Fr>],
    c_a: &Gt,
    r_a: Fr,
    x: &[Fr],
    c_x: &Gt,
    r_x: Fr,
    r_y: Fr,
    rng: &mut impl RngCore,
) -> Result<(Gt, Vec<Fr>, ZkmmProof), SigmaError> {
    let m = matrix.len();
    let l = x.len();
    if m == 0 || l == 0 || matrix.iter().any(|row| row.len() != l) {
        return Err(SigmaError::Dimension(format!("cannot multiply a {m}-row matrix by a length-{l} vector")));
    }
    params.require((m * l).max(2))?;
    let y: Vec<Fr> = matrix.iter().map(|row| row.iter().zip(x).map(|(a, b)| *a * b).sum()).collect();
    let c_y = params.commit_vector(&y, r_y)?;

    let flat = flatten_columns(matrix);
    let s: Vec<Fr> = flat.iter().map(|_| Fr::rand(rng)).collect();
    let entries = normalize_g1(&flat.iter().zip(&s).map(|(a, r)| params.pedersen(a, r)).collect::<Vec<_>>());
    absorb_statement(tr, m, l, c_a, c_x, &c_y, &entries);
    let link = prove_link(params, tr, &flat, r_a, &s, rng);

    let rho = powers(tr.challenge(b"zkmm-fold"), m);
    // Blinding of Σ_j x_j·K_j.
    let s_fold: Fr = (0..l).map(|j| x[j] * (0..m).map(|i| rho[i] * s[i + m * j]).sum::<Fr>()).sum();

    let a: Vec<Fr> = (0..l).map(|_| Fr::rand(rng)).collect();
    let d: Vec<Fr> = (0..m).map(|_| Fr::rand(rng)).collect();
    let (b_x, b_y, b_fold) = (Fr::rand(rng), Fr::rand(rng), Fr::rand(rng));
    let t_x = params.vector_g1(&a, b_x)?;
    let t_y = params.vector_g1(&d, b_y)?;
    let rho_d: Fr = rho.iter().zip(&d).map(|(r, v)| *r * v).sum();
    let t_fold = msm_g1(&entries, &fold_weights(&rho, &a)) - params.pedersen(&rho_d, &b_fold);
    let firsts = normalize_g1(&[t_x, t_y, t_fold]);
    tr.append_all(b"zkmm-first", &firsts);
    let e = tr.challenge(b"zkmm-e");

    let proof = ZkmmProof {
        entries,
        link,
        t_x: firsts[0],
        t_y: firsts[1],
        t_fold: firsts[2],
        z_x: a.iter().zip(x).map(|(a, x)| *a + e * x).collect(),
        w_x: b_x + e * r_x,
        z_y: d.iter().zip(&y).map(|(d, y)| *d + e * y).collect(),
        w_y: b_y + e * r_y,
        w_fold: b_fold + e * s_fold,
    };
    Ok((c_y, y, proof))
}

/// Checks that `c_y` commits to the product of the `rows × cols` matrix in `c_a` and the vector in `c_x`.
pub fn verify(params: &Params, tr: &mut Transcript, rows: usize, cols: usize, c_a: &Gt, c_x: &Gt, c_y: &Gt, proof: &ZkmmProof) -> bool {
    let (m, l) = (rows, cols);
    if m == 0
        || l == 0
        || m * l > params.len()
        || proof.entries.len() != m * l
        || proof.z_x.len() != l
        || proof.z_y.len() != m
    {
        return false;
    }
    absorb_statement(tr, m, l, c_a, c_x, c_y, &proof.entries);
    if !verify_link(params, tr, c_a, &proof.entries, &proof.link) {
        return false;
    }
    let rho = powers(tr.challenge(b"zkmm-fold"), m);
    tr.append_all(b"zkmm-first", &[proof.t_x, proof.t_y, proof.t_fold]);
    let e = tr.challenge(b"zkmm-e");

    let opens = |z: &[Fr], w: Fr, t: G1Affine, c: &Gt| -> bool {
        match params.vector_g1(z, w) {
            Ok(p) => pairing((p - t.into_group()).into_affine(), params.g2()) == exp_gt(*c, e),
            Err(_) => false,
        }
    };
    if !opens(&proof.z_x, proof.w_x, proof.t_x, c_x) || !opens(&proof.z_y, proof.w_y, proof.t_y, c_y) {
        return false;
    }
    let rho_zy: Fr = rho.iter().zip(&proof.z_y).map(|(r, v)| *r * v).sum();
    let fold: G1 = msm_g1(&proof.entries, &fold_weights(&rho, &proof.z_x))
        - params.pedersen(&rho_zy, &proof.w_fold)
        - proof.t_fold.into_group();
    fold.is_zero()
}

impl ZkmmProof {
    pub fn write(&self, w: &mut Writer) {
        w.u8(super::tag::ZKMM);
        w.elems(&self.entries);
        self.link.write(w);
        w.elem(&self.t_x);
        w.elem(&self.t_y);
        w.elem(&self.t_fold);
        w.elems(&self.z_x);
        w.elem(&self.w_x);
        w.elems(&self.z_y);
        w.elem(&self.w_y);
        w.elem(&self.w_fold);
    }

    pub fn read(r: &mut Reader<'_>) -> Result<Self, CodecError> {
        if r.u8()? != super::tag::ZKMM {
            return Err(CodecError::Invalid("expected a zkmm proof".into()));
        }
        Ok(ZkmmProof {
            entries: r.elems()?,
            link: LinkProof::read(r)?,
            t_x: r.elem()?,
            t_y: r.elem()?,
            t_fold: r.elem()?,
            z_x: r.elems()?,
            w_x: r.elem()?,
            z_y: r.elems()?,
            w_y: r.elem()?,
            w_fold: r.elem()?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn ints(rows: &[&[i64]]) -> Vec<Vec<Fr>> {
        rows.iter().map(|r| r.iter().map(|&v| Fr::from(v)).collect()).collect()
    }

    #[test]
    fn two_by_two_product_opens_to_three_seven() {
        let mut rng = ChaCha20Rng::seed_from_u64(41);
        let p = Params::setup(8, false, &mut rng);
        let a = ints(&[&[1, 2], &[3, 4]]);
        let x = vec![Fr::from(1u64), Fr::from(1u64)];
        let (r_a, r_x, r_y) = (Fr::rand(&mut rng), Fr::rand(&mut rng), Fr::rand(&mut rng));
        let c_a = p.commit_matrix(&a, r_a).unwrap();
        let c_x = p.commit_vector(&x, r_x).unwrap();
        let (c_y, y, proof) = prove(&p, &mut Transcript::new(b"mm"), &a, &c_a, r_a, &x, &c_x, r_x, r_y, &mut rng).unwrap();
        assert_eq!(y, vec![Fr::from(3u64), Fr::from(7u64)]);
        assert_eq!(c_y, p.commit_vector(&y, r_y).unwrap());
        assert!(verify(&p, &mut Transcript::new(b"mm"), 2, 2, &c_a, &c_x, &c_y, &proof));

        let perturbed = p.commit_vector(&[Fr::from(3u64), Fr::from(8u64)], r_y).unwrap();
        assert!(!verify(&p, &mut Transcript::new(b"mm"), 2, 2, &c_a, &c_x, &perturbed, &proof));

        let mut w = Writer::default();
        proof.write(&mut w);
        let bytes = w.finish();
        assert_eq!(ZkmmProof::read(&mut Reader::new(&bytes)).unwrap(), proof);
    }
}
