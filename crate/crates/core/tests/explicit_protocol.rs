use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use zkmc::kzg::Srs;
use zkmc::lang;
use zkmc::model::{Rank, Ranking};
use zkmc::models::handshake_small;
use zkmc::oracle::ground;
use zkmc::protocol::explicit::{prove, verify, ExplicitBundle, ExplicitCertificate, Rejection};

fn small_instance() -> (zkmc::model::ExplicitSystem, ExplicitCertificate) {
    let unit = lang::parse(&handshake_small().source()).unwrap();
    let sys = unit.system.as_ref().unwrap();
    let Ranking::Piecewise(rk) = &unit.ranking else { panic!("expected piecewise ranking") };
    let g = ground(sys, &unit.spec, 1 << 16).unwrap();
    let table = g.ranking(rk).unwrap();
    let cert = ExplicitCertificate::new(unit.spec.clone(), table, &g.system);
    (g.system, cert)
}

#[test]
fn handshake_small_round_trip() {
    let (sys, cert) = small_instance();
    assert_eq!(sys.num_states(), 32);
    let (_, batches) = cert.batches().unwrap();
    assert_eq!(batches.total(), 104);

    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let (deg, batch) = cert.srs_size().unwrap();
    let srs = Srs::setup(deg, batch, false, &mut rng);
    let bundle = prove(&sys, &cert, &srs, &mut rng).unwrap();
    assert_eq!(verify(&bundle, &cert, &srs), Ok(()));

    let back = ExplicitBundle::from_bytes(&bundle.to_bytes()).unwrap();
    assert_eq!(back, bundle);
    assert_eq!(verify(&back, &cert, &srs), Ok(()));

    let mut other = cert.clone();
    for row in other.ranking.table.iter_mut() {
        for v in row.iter_mut() {
            if let Rank::Finite(k) = v {
                *k += 1;
            }
        }
    }
    assert_eq!(verify(&bundle, &other, &srs), Err(Rejection::DigestMismatch));
}
