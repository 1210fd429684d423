use egp::catalog::{load_catalog, p31_squared};
use egp::modform::{compare, known_pairings, P31_SQUARED};
use egp::sequence::{egp, gperm, Algorithm};

#[test]
fn known_pairings_match_through_41() {
    let c = load_catalog().unwrap();
    for pairing in known_pairings() {
        let form = pairing.series(128).unwrap();
        for name in pairing.graphs {
            let seq = if *name == P31_SQUARED {
                egp(&p31_squared(), 41, Algorithm::Auto).unwrap()
            } else {
                egp(&c.get(name).unwrap().decompletion(0).unwrap(), 41, Algorithm::Auto).unwrap()
            };
            let report = compare(&seq, &form).unwrap();
            if *name == P31_SQUARED {
                // The join carries the product sign: GPerm = -GPerm(P_3_1)^2,
                // while the form's a_p matches GPerm(P_3_1)^2.
                assert!(report.negated_match && !report.full_match, "{report:?}");
                continue;
            }
            assert!(report.full_match, "{name}: {report:?}");
            assert_eq!(report.matched_through, Some(41));
        }
    }
}

#[test]
fn wrong_pairing_is_reported() {
    let c = load_catalog().unwrap();
    let seq = egp(&c.get("P_4_1").unwrap().decompletion(0).unwrap(), 41, Algorithm::Auto).unwrap();
    let form = known_pairings().into_iter().find(|p| p.graphs.contains(&"P_6_1")).unwrap().series(128).unwrap();
    let report = compare(&seq, &form).unwrap();
    assert!(!report.full_match);
    assert!(report.first_mismatch.unwrap() <= 13);
}

#[test]
fn join_form_matches_square_of_p31() {
    let c = load_catalog().unwrap();
    let k4 = c.get("P_3_1").unwrap().decompletion(0).unwrap();
    let form = known_pairings().into_iter().find(|p| p.graphs.contains(&P31_SQUARED)).unwrap().series(64).unwrap();
    for p in [5u64, 13, 17, 29, 37, 41] {
        let alg = if p <= 13 { Algorithm::Direct } else { Algorithm::Auto };
        let v = gperm(&k4, p, alg).unwrap();
        let a = form.coefficient(p as usize).unwrap();
        let a = ((a % num_bigint::BigInt::from(p)) + p) % p;
        assert_eq!(num_bigint::BigInt::from(v * v % p), a, "p = {p}");
        let joined = gperm(&p31_squared(), p, alg).unwrap();
        assert_eq!(joined, (p - v * v % p) % p, "p = {p}");
    }
}
