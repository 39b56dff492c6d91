use chaingeom::collinearity::{all_pairs, census, classify_code, is_legal_code, projection_code, CollinearityCase, ProjCode};
use chaingeom::metric::{
    collinear_config, dotprod_config, greedy_chains, grid_config, lattice_1p1, pythagoras_config, random_dag,
    sheared_grid_config, simplex_config, Layout,
};
use chaingeom::projection::forward_index;
use chaingeom::rational::{int, ratio};
use chaingeom::{Chain, ChainId, EventId, Poset};

fn layouts() -> Vec<(String, Layout)> {
    let mut v = vec![
        ("lattice 8x40".to_string(), lattice_1p1(8, 40).unwrap()),
        ("collinear spacing 2".into(), collinear_config(5, &int(2), 40).unwrap()),
        ("collinear spacing 1/2".into(), collinear_config(4, &ratio(1, 2), 20).unwrap()),
        ("grid 3x3 unit".into(), grid_config(3, 3, 1, 1, 30).unwrap()),
        ("grid 3x3 3-4".into(), grid_config(3, 3, 3, 4, 40).unwrap()),
        ("sheared grid".into(), sheared_grid_config(3, 3, 2, 2, 30).unwrap()),
        ("dotprod 3-4".into(), dotprod_config(3, 4, 30, 12).unwrap()),
    ];
    for n in 2..=5 {
        v.push((format!("simplex {n}"), simplex_config(n, &int(1), 20).unwrap()));
    }
    for (a, b) in [(3, 4), (0, 5), (5, 12)] {
        v.push((format!("pythagoras {a}-{b}"), pythagoras_config(a, b, 60).unwrap()));
    }
    v
}

#[test]
fn census_is_legal_on_every_metric_layout() {
    for (name, l) in layouts() {
        let c = census(&l.poset, &all_pairs(&l.chains));
        assert!(c.legal_codes_only(), "{name}: {:?}", c.illegal_codes());
    }
}

#[test]
fn lattice_census_size() {
    let l = lattice_1p1(8, 60).unwrap();
    let c = census(&l.poset, &all_pairs(&l.chains));
    assert_eq!(l.poset.len(), 9 * 61);
    assert_eq!(c.pairs, 36);
    assert!(c.legal_codes_only() && c.fully_defined_count() > 0);
}

/// Smallest tick `u >= t` with `(u - t)^2 >= d2`, by scanning the ticks.
fn light_cone_oracle(t: usize, d2: &chaingeom::Rational, ticks: usize) -> Option<usize> {
    (t..=ticks).find(|&u| {
        let dt = int((u - t) as i64);
        &dt * &dt >= *d2
    })
}

#[test]
fn forward_projection_lands_on_the_light_cone() {
    for l in [grid_config(3, 3, 1, 1, 25).unwrap(), sheared_grid_config(3, 3, 1, 2, 25).unwrap()] {
        for a in &l.chains {
            for b in &l.chains {
                let d2 = l.chain_sq_dist(a.id().as_str(), b.id().as_str()).unwrap();
                for t in 0..a.len() {
                    let got = forward_index(&l.poset, a.elements()[t], b);
                    assert_eq!(got, light_cone_oracle(t, d2, b.len() - 1), "{} -> {} at {t}", a.id(), b.id());
                }
            }
        }
    }
}

#[test]
fn worldlines_with_equal_ticks_are_coordinated() {
    use chaingeom::coordination::verify_coordination;
    for (name, l) in layouts().into_iter().filter(|(n, _)| !n.starts_with("dotprod")) {
        for (p, q) in all_pairs(&l.chains) {
            assert!(verify_coordination(&l.poset, p, q).is_ok(), "{name}: {} {}", p.id(), q.id());
        }
    }
}

/// Chains `P = 0<3<5<6<11`, `Q = 1<4<9<10` with a side path `5 -> 7 -> 9`.
fn counterexample() -> (Poset, Chain, Chain) {
    let covers = [
        (0, 3), (0, 4), (0, 8), (1, 3), (1, 4), (1, 8), (2, 3), (2, 4), (3, 5), (4, 9), (5, 6), (5, 7),
        (6, 11), (7, 9), (8, 9), (9, 10), (10, 11),
    ];
    let mut p = Poset::new();
    for i in 0..12 {
        p.add_event(EventId(i)).unwrap();
    }
    for (a, b) in covers {
        p.add_influence(EventId(a), EventId(b)).unwrap();
    }
    let ev = |v: &[u32]| v.iter().map(|&i| EventId(i)).collect::<Vec<_>>();
    let cp = Chain::with_successive_valuations(&p, ChainId::new("P"), ev(&[0, 3, 5, 6, 11])).unwrap();
    let cq = Chain::with_successive_valuations(&p, ChainId::new("Q"), ev(&[1, 4, 9, 10])).unwrap();
    (p, cp, cq)
}

#[test]
fn general_posets_admit_codes_outside_the_five() {
    let (p, cp, cq) = counterexample();
    let code = projection_code(&p, EventId(7), &cp, &cq).unwrap();
    assert_eq!(code, ProjCode::from_digits([0, 0, 1, 1]));
    assert!(code.is_fully_defined() && !is_legal_code(&code));
    assert_eq!(classify_code(&code), CollinearityCase::NotCollinear);
    assert_eq!(p.cover_pairs().len(), 17);
}

#[test]
fn random_dags_hit_illegal_codes() {
    let hits = (0..20u64)
        .filter(|&s| {
            let p = random_dag(100, 0.12, s).unwrap();
            let chains = greedy_chains(&p, 3);
            !census(&p, &all_pairs(&chains)).legal_codes_only()
        })
        .count();
    assert!(hits > 0);
}

#[test]
fn duality_maps_codes_on_random_dags() {
    for seed in 0..6 {
        let p = random_dag(100, 0.12, seed).unwrap();
        let chains = greedy_chains(&p, 3);
        let d = p.dual();
        let dc: Vec<Chain> = chains.iter().map(Chain::dual).collect();
        for i in 0..chains.len() {
            for j in 0..chains.len() {
                if i == j {
                    continue;
                }
                for &e in p.events() {
                    let a = projection_code(&p, e, &chains[i], &chains[j]).ok();
                    let b = projection_code(&d, e, &dc[i], &dc[j]).ok();
                    assert_eq!(a.map(|c| c.dual()), b, "seed {seed} {e}");
                    if let (Some(a), Some(b)) = (a, b) {
                        if is_legal_code(&a) {
                            assert_eq!(classify_code(&b), classify_code(&a).dual());
                        }
                    }
                }
            }
        }
    }
}

