use chaingeom::metric::{greedy_chains, lattice_1p1, random_dag};
use chaingeom::projection::{
    backward_index, classify_interval, forward_index, interval_scalar, sym_antisym_decompose, IntervalClass, QuantPair,
};
use chaingeom::rational::{ratio, Rational};
use chaingeom::verify::{scan_backward, scan_forward};
use chaingeom::EventId;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn projections_agree_with_scan_and_obey_their_laws(n in 5usize..80, p in 0.02f64..0.3, seed in any::<u64>()) {
        let poset = random_dag(n, p, seed).unwrap();
        for c in greedy_chains(&poset, 2) {
            for &x in poset.events() {
                let (f, b) = (forward_index(&poset, x, &c), backward_index(&poset, x, &c));
                prop_assert_eq!(f, scan_forward(&poset, x, &c));
                prop_assert_eq!(b, scan_backward(&poset, x, &c));
                if let Some(f) = f {
                    let px = c.elements()[f];
                    prop_assert_eq!(forward_index(&poset, px, &c), Some(f));
                    prop_assert!(poset.leq(x, px).unwrap());
                }
                if let Some(b) = b {
                    let bx = c.elements()[b];
                    prop_assert_eq!(backward_index(&poset, bx, &c), Some(b));
                    prop_assert!(poset.leq(bx, x).unwrap());
                }
                if let (Some(f), Some(b)) = (f, b) {
                    prop_assert!(b <= f);
                }
                for &y in poset.events() {
                    if poset.leq(x, y).unwrap() {
                        if let (Some(a), Some(z)) = (f, forward_index(&poset, y, &c)) {
                            prop_assert!(a <= z);
                        }
                        if let (Some(a), Some(z)) = (b, backward_index(&poset, y, &c)) {
                            prop_assert!(a <= z);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn decomposition_round_trips(a in -50i64..50, b in -50i64..50, d in 1i64..7, e in 1i64..7) {
        let pair = QuantPair::new(ratio(a, d), ratio(b, e));
        let (sym, anti) = sym_antisym_decompose(&pair);
        prop_assert_eq!(&sym.first, &sym.second);
        prop_assert_eq!(&anti.first, &-anti.second.clone());
        prop_assert_eq!(&sym.first + &anti.first, pair.first.clone());
        prop_assert_eq!(&sym.second + &anti.second, pair.second.clone());
        let t2: Rational = &sym.first * &sym.first;
        let d2: Rational = &anti.first * &anti.first;
        prop_assert_eq!(t2 - d2, interval_scalar(&pair));
    }
}

/// Interval class decided from the signs alone.
fn sign_oracle(a: i64, b: i64) -> IntervalClass {
    use IntervalClass::*;
    match (a.signum(), b.signum()) {
        (0, 0) => Degenerate,
        (0, _) | (_, 0) => ProjectionLike,
        (1, 1) if a == b => PurelyChainLike,
        (x, y) if x == y => ChainLike,
        _ if a == -b => PurelyAntichainLike,
        _ => AntichainLike,
    }
}

#[test]
fn sign_table() {
    for a in -3..=3 {
        for b in -3..=3 {
            let class = classify_interval(&QuantPair::ints(a, b));
            assert_eq!(class, sign_oracle(a, b), "({a}, {b})");
        }
    }
}

#[test]
fn lattice_projection_matches_scan() {
    let l = lattice_1p1(6, 30).unwrap();
    for c in &l.chains {
        for &x in l.poset.events() {
            assert_eq!(forward_index(&l.poset, x, c), scan_forward(&l.poset, x, c));
            assert_eq!(backward_index(&l.poset, x, c), scan_backward(&l.poset, x, c));
        }
    }
}

#[test]
fn unknown_event_has_no_projection() {
    let l = lattice_1p1(2, 4).unwrap();
    assert_eq!(forward_index(&l.poset, EventId(9999), &l.chains[0]), None);
}
