//! Explicit-state scheme: commit to the indicator polynomials of `S0` and `T`
//! and prove that they vanish on the public batches.

use rand::RngCore;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::crypto::{CodecError, G1Affine, Reader, Writer};
use crate::explicit::{batches_for, build_membership_polys, plaintext_disjointness, BatchSets, Embedding, ExplicitError};
use crate::kzg::{commit_hiding, prove_vanishing, verify_vanishing, KzgError, Srs, VanishingProof};
use crate::lang::print_certificate;
use crate::model::{BuchiSpec, ExplicitRanking, ExplicitSystem, Ranking};

const BUNDLE_MAGIC: &[u8; 4] = b"ZKEP";

#[derive(Debug, Error)]
pub enum ExplicitProtocolError {
    #[error("the system violates the certificate: {0}")]
    CertificateInvalid(String),
    #[error(transparent)]
    Embedding(#[from] ExplicitError),
    #[error(transparent)]
    Kzg(#[from] KzgError),
}

/// Why a bundle was rejected.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rejection {
    DigestMismatch,
    ParametersTooSmall,
    InitNotVanishing,
    TransitionsNotVanishing,
    Malformed,
}

impl std::fmt::Display for Rejection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Rejection::DigestMismatch => "bundle was produced for a different certificate",
            Rejection::ParametersTooSmall => "reference string too small for this certificate",
            Rejection::InitNotVanishing => "initial-state polynomial does not vanish on the init batch",
            Rejection::TransitionsNotVanishing => "transition polynomial does not vanish on the step and fair batches",
            Rejection::Malformed => "malformed bundle",
        };
        f.write_str(s)
    }
}

/// The public certificate: automaton, ranking table and the labelled state space.
#[derive(Clone, Debug)]
pub struct ExplicitCertificate {
    pub spec: BuchiSpec,
    pub ranking: ExplicitRanking,
    /// The state space with labels only; initial states and transitions are ignored.
    pub space: ExplicitSystem,
}

impl ExplicitCertificate {
    pub fn new(spec: BuchiSpec, ranking: ExplicitRanking, sys: &ExplicitSystem) -> Self {
        let space = ExplicitSystem { labels: sys.labels.clone(), ..Default::default() };
        ExplicitCertificate { spec, ranking, space }
    }

    pub fn states(&self) -> usize {
        self.space.num_states()
    }

    /// SHA-256 over the printed certificate, the state labels and the domain sizes.
    pub fn digest(&self, emb: &Embedding) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(b"zkmc-explicit-certificate");
        let printed = print_certificate(&self.spec, &Ranking::Table(self.ranking.clone()));
        h.update((printed.len() as u64).to_le_bytes());
        h.update(printed.as_bytes());
        h.update((self.states() as u64).to_le_bytes());
        for labels in &self.space.labels {
            h.update((labels.len() as u64).to_le_bytes());
            for l in labels {
                h.update((l.len() as u64).to_le_bytes());
                h.update(l.as_bytes());
            }
        }
        h.update((emb.state_domain().size() as u64).to_le_bytes());
        h.update((emb.pair_domain().size() as u64).to_le_bytes());
        h.finalize().into()
    }

    /// Embedding and batches, computed from public data only.
    pub fn batches(&self) -> Result<(Embedding, BatchSets), ExplicitProtocolError> {
        let emb = Embedding::new(self.states())?;
        let batches = batches_for(&self.space, &self.spec, &self.ranking, &emb)?;
        Ok((emb, batches))
    }

    /// Reference-string sizes `(degree, max batch)` this certificate needs.
    pub fn srs_size(&self) -> Result<(usize, usize), ExplicitProtocolError> {
        let (emb, b) = self.batches()?;
        let batch = b.e_init.len().max(b.transition_points(&emb).len());
        Ok((emb.pair_domain().size().max(emb.state_domain().size()), batch.max(1)))
    }
}

/// Commitments `(c_S0, c_T)`, proofs `(π_S0, π_T)` and the certificate digest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitBundle {
    pub digest: [u8; 32],
    pub c_init: G1Affine,
    pub c_trans: G1Affine,
    pub pi_init: VanishingProof,
    pub pi_trans: VanishingProof,
}

impl ExplicitBundle {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::with_header(BUNDLE_MAGIC);
        w.bytes(&self.digest);
        w.elem(&self.c_init);
        w.elem(&self.c_trans);
        w.elem(&self.pi_init.0);
        w.elem(&self.pi_trans.0);
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CodecError> {
        let mut r = Reader::with_header(bytes, BUNDLE_MAGIC)?;
        let digest: [u8; 32] =
            r.bytes()?.try_into().map_err(|_| CodecError::Invalid("digest must be 32 bytes".into()))?;
        let bundle = ExplicitBundle {
            digest,
            c_init: r.elem()?,
            c_trans: r.elem()?,
            pi_init: VanishingProof(r.elem()?),
            pi_trans: VanishingProof(r.elem()?),
        };
        r.finish()?;
        Ok(bundle)
    }
}

/// Proves that `sys` satisfies the certificate.
///
/// Fails before any cryptography when the system intersects a batch.
pub fn prove(
    sys: &ExplicitSystem,
    cert: &ExplicitCertificate,
    srs: &Srs,
    rng: &mut impl RngCore,
) -> Result<ExplicitBundle, ExplicitProtocolError> {
    if sys.labels != cert.space.labels {
        return Err(ExplicitProtocolError::CertificateInvalid("state labels differ from the certificate".into()));
    }
    let (emb, batches) = cert.batches()?;
    if !plaintext_disjointness(sys, &batches) {
        return Err(ExplicitProtocolError::CertificateInvalid(
            "a ranking condition is violated (system intersects a batch)".into(),
        ));
    }
    let polys = build_membership_polys(sys, &emb, rng);
    let trans_points = batches.transition_points(&emb);
    let (d1, d2) = (emb.state_domain(), emb.pair_domain());

    let (init, trans) = rayon::join(
        || -> Result<_, KzgError> {
            Ok((
                commit_hiding(srs, &polys.p_init, d1, polys.r_init)?,
                prove_vanishing(srs, &polys.p_init, polys.r_init, d1, &batches.e_init)?,
            ))
        },
        || -> Result<_, KzgError> {
            Ok((
                commit_hiding(srs, &polys.p_trans, d2, polys.r_trans)?,
                prove_vanishing(srs, &polys.p_trans, polys.r_trans, d2, &trans_points)?,
            ))
        },
    );
    let (c_init, pi_init) = init?;
    let (c_trans, pi_trans) = trans?;
    Ok(ExplicitBundle { digest: cert.digest(&emb), c_init, c_trans, pi_init, pi_trans })
}

/// Recomputes the batches from the certificate and checks both vanishing proofs.
pub fn verify(bundle: &ExplicitBundle, cert: &ExplicitCertificate, srs: &Srs) -> Result<(), Rejection> {
    let (emb, batches) = cert.batches().map_err(|_| Rejection::Malformed)?;
    if bundle.digest != cert.digest(&emb) {
        return Err(Rejection::DigestMismatch);
    }
    let trans_points = batches.transition_points(&emb);
    if batches.e_init.len().max(trans_points.len()) > srs.max_batch() {
        return Err(Rejection::ParametersTooSmall);
    }
    if !verify_vanishing(srs, &bundle.c_init, &batches.e_init, &bundle.pi_init) {
        return Err(Rejection::InitNotVanishing);
    }
    if !verify_vanishing(srs, &bundle.c_trans, &trans_points, &bundle.pi_trans) {
        return Err(Rejection::TransitionsNotVanishing);
    }
    Ok(())
}
