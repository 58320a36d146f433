//! Exact search in F_q^2 against the classical planar Kakeya minima:
//! q(q+1)/2 for even q and q(q+1)/2 + (q-1)/2 for odd q.

use kakeya_core::field::{make_field, prime_power};
use kakeya_core::kakeya::{build_union, is_kakeya};
use kakeya_core::search::minimal_kakeya_exact;
use kakeya_core::theorem1_bound;

fn classical_planar_minimum(q: u64) -> u64 {
    let base = q * (q + 1) / 2;
    if q % 2 == 0 {
        base
    } else {
        base + (q - 1) / 2
    }
}

#[test]
fn planar_minima_match_classical_values() {
    for q in [2u64, 3, 4, 5, 7, 8] {
        let (p, k) = prime_power(q).unwrap();
        let field = make_field(p, k).unwrap();
        let r = minimal_kakeya_exact(&field, 2, 10_000_000).unwrap();
        assert!(r.proof_of_optimality, "q={q}");
        assert_eq!(r.min_size as u64, classical_planar_minimum(q), "q={q}");

        let union = build_union(&field, 2, &r.witness).unwrap();
        assert_eq!(union.len(), r.min_size);
        assert!(is_kakeya(&field, &union, None).unwrap().is_kakeya());

        let bound = theorem1_bound(q, 2).unwrap();
        let gap = r.min_size as u64 - u64::try_from(bound.ceil()).unwrap();
        assert_eq!(gap, if q % 2 == 0 { 0 } else { (q - 1) / 2 });
    }
}
