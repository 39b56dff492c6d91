use chaingeom::coordination::GeometryError;
use chaingeom::fence::{dot_product, parallel_postulate_check, shared_chains, validate_fence, SharedChains};
use chaingeom::grid::{geometric_identity_check, validate_grid, wedge_product};
use chaingeom::metric::{dotprod_config, grid_config, grid_name, lattice_1p1, plane_layout, Layout};
use chaingeom::rational::int;
use chaingeom::verify::pythagorean_legs;
use chaingeom::{Chain, ChainId, EventId};
use proptest::prelude::*;

fn pos(l: &Layout, e: EventId) -> [i64; 2] {
    let (w, _) = l.locate(e).unwrap();
    let p = l.point(l.chains[w].id().as_str()).unwrap();
    [p[0], p[1]]
}

fn cells(l: &Layout, m: usize, n: usize) -> Vec<Vec<Chain>> {
    (0..m).map(|i| (0..n).map(|k| l.chain(&grid_name(i, k)).unwrap().clone()).collect()).collect()
}

#[test]
fn dot_matches_inner_product_on_triple_layouts() {
    let legs = pythagorean_legs(24);
    assert!(legs.len() >= 20);
    for (a, b, c) in legs {
        let t = 2 * c as usize;
        let l = dotprod_config(a, b, 4 * c as u32, t as i64).unwrap();
        let fence = validate_fence(&l.poset, &l.chains[..3]).unwrap();
        let x = l.event("X", 0).unwrap();
        let y = l.event("F2", t).unwrap();
        let (f0, f2) = (ChainId::from("F0"), ChainId::from("F2"));
        let dp = dot_product(&l.poset, x, y, &fence, &f0, &f2).unwrap();
        let (px, py) = (pos(&l, x), pos(&l, y));
        let axis = [2 * a, 0];
        let oracle = (py[0] - px[0]) * axis[0] + (py[1] - px[1]) * axis[1];
        assert_eq!(dp.scaled, int(oracle), "{a}-{b}");
        assert_eq!(dp.signed, int(a), "{a}-{b}: projection of (a, -b) onto the fence axis");
    }
}

#[test]
fn dot_is_additive_and_antisymmetric() {
    let l = dotprod_config(3, 4, 40, 20).unwrap();
    let fence = validate_fence(&l.poset, &l.chains[..3]).unwrap();
    let (f1, f2) = (ChainId::from("F1"), ChainId::from("F2"));
    let ev = [l.event("X", 0).unwrap(), l.event("Y", 0).unwrap(), l.event("F0", 20).unwrap(), l.event("F2", 20).unwrap()];
    let d = |x, y| dot_product(&l.poset, x, y, &fence, &f1, &f2).unwrap().signed;
    for &x in &ev {
        for &y in &ev {
            assert_eq!(d(x, y), -d(y, x));
            for &z in &ev {
                assert_eq!(d(x, z), d(x, y) + d(y, z));
            }
        }
    }
}

#[test]
fn wedge_matches_cross_product_and_identity_holds() {
    let legs = pythagorean_legs(24);
    let mut grids = 0;
    for (s, r, c) in legs {
        let t = 2 * c.max(2 * s.max(r));
        let l = grid_config(3, 3, s, r, 2 * t as u32).unwrap();
        let g = validate_grid(&l.poset, cells(&l, 3, 3)).unwrap();
        let (pik, pil) = (ChainId::new(grid_name(1, 0)), ChainId::new(grid_name(1, 1)));
        let x = l.event(&grid_name(1, 0), t as usize).unwrap();
        let y = l.event(&grid_name(0, 1), t as usize).unwrap();
        let (px, py) = (pos(&l, x), pos(&l, y));
        let disp = [py[0] - px[0], py[1] - px[1]];
        let leg = [s, 0];
        let w = wedge_product(&l.poset, x, y, &g, &pik, &pil).unwrap();
        assert_eq!(w, int(leg[0] * disp[1] - leg[1] * disp[0]));
        assert_eq!(wedge_product(&l.poset, y, x, &g, &pik, &pil).unwrap(), -w);
        assert!(geometric_identity_check(&l.poset, x, y, &g, &pik, &pil).unwrap());
        grids += 1;
    }
    assert!(grids >= 20);
}

#[test]
fn displaced_chain_breaks_the_grid() {
    let mut names = Vec::new();
    let mut pts = Vec::new();
    for i in 0..3 {
        for k in 0..3 {
            names.push(grid_name(i, k));
            let shift = if (i, k) == (1, 1) { 1 } else { 0 };
            pts.push(vec![3 * k as i64 + shift, 4 * i as i64]);
        }
    }
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let l = plane_layout(&refs, pts, &vec![(0..=40).map(int).collect::<Vec<_>>(); 9]).unwrap();
    assert!(validate_grid(&l.poset, cells(&l, 3, 3)).is_err());
}

#[test]
fn spacing_two_fences_sharing_two_chains_coincide() {
    let l = lattice_1p1(12, 60).unwrap();
    let f = |ids: &[&str]| {
        let chains: Vec<Chain> = ids.iter().map(|id| l.chain(id).unwrap().clone()).collect();
        validate_fence(&l.poset, &chains).unwrap()
    };
    let a = f(&["0", "2", "4", "6", "8"]);
    let b = f(&["4", "6", "8", "10"]);
    assert_eq!(shared_chains(&a, &b).count(), 3);
    let rep = parallel_postulate_check(&l.poset, &a, &b).unwrap();
    assert!(rep.holds());
    let c = f(&["1", "3", "5"]);
    assert_eq!(shared_chains(&a, &c), SharedChains::None);
}

#[test]
fn two_chain_fence_is_too_small() {
    let l = lattice_1p1(3, 20).unwrap();
    assert!(matches!(validate_fence(&l.poset, &l.chains[..2]), Err(GeometryError::TooFewChains(2))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_unit_fences_obey_the_parallel_postulate(
        s1 in 0usize..10, n1 in 3usize..=8, r1 in any::<bool>(),
        s2 in 0usize..10, n2 in 3usize..=8, r2 in any::<bool>(),
    ) {
        let l = lattice_1p1(17, 50).unwrap();
        let fence = |s: usize, n: usize, r: bool| {
            let mut chains = l.chains[s..s + n].to_vec();
            if r { chains.reverse(); }
            validate_fence(&l.poset, &chains).unwrap()
        };
        let (a, b) = (fence(s1, n1, r1), fence(s2, n2, r2));
        let rep = parallel_postulate_check(&l.poset, &a, &b).unwrap();
        prop_assert!(rep.holds(), "{:?}", rep);
        if rep.shared.count() >= 2 {
            prop_assert!(rep.coincide);
        }
    }
}
