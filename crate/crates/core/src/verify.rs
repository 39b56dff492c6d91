//! Named verification suites. Each suite builds its layouts, runs the
//! geometric checks against an independent oracle (integer embeddings,
//! brute-force scans, Warshall closure) and reports exact values.

use std::collections::HashMap;
use std::error::Error;
use std::sync::Mutex;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::collinearity::{all_pairs, census, projection_code, side_of, CollinearityError, Side};
use crate::coordination::{
    dimension_count, orthogonal_subspaces, pythagoras_check, simplex_table, GeometryError, SimplexMode,
};
use crate::document::PosetDocument;
use crate::fence::{dot_is_pair_independent, dot_product, parallel_postulate_check, validate_fence, Fence};
use crate::grid::{geometric_product, is_orthogonal_grid, validate_grid, wedge_product, Grid};
use crate::metric::{
    collinear_config, dotprod_config, greedy_chains, grid_config, grid_name, lattice_1p1, plane_layout,
    pythagoras_config, random_dag, simplex_config, sheared_grid_config, Layout,
};
use crate::order::{Chain, ChainId, EventId, Poset};
use crate::projection::{backward_index, forward_index, quantify_interval_one_chain, sym_antisym_decompose, ChainSide};
use crate::rational::{format_rational, int, Rational};

type Failure = Box<dyn Error + Send + Sync>;
type LayoutBuilder = fn() -> Result<Layout, crate::metric::MetricError>;
type GridCases = (Vec<EventId>, Vec<(ChainId, ChainId)>);

pub const SUITES: [&str; 11] = [
    "census",
    "geography",
    "duality",
    "simplex",
    "pythagoras",
    "orthogonal",
    "parallel",
    "dot",
    "wedge",
    "geoproduct",
    "structural",
];

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub inputs: Value,
    /// Exact `p/q` value of the quantity the check is about.
    pub value: Option<String>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckResult>,
    pub wall_time_ms: u128,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Clone)]
pub struct SuiteParams {
    pub max_leg: i64,
    pub seed: u64,
    pub trials: usize,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams { max_leg: 20, seed: 0, trials: 1000 }
    }
}

pub fn run_suite(name: &str, params: &SuiteParams) -> Result<SuiteReport, VerifyError> {
    let start = Instant::now();
    let checks = match name {
        "census" => census_suite(),
        "geography" => geography_suite(),
        "duality" => duality_suite(params.seed),
        "simplex" => simplex_suite(),
        "pythagoras" => pythagoras_suite(params.max_leg),
        "orthogonal" => orthogonal_suite(),
        "parallel" => parallel_suite(params.seed, params.trials),
        "dot" => dot_suite(),
        "wedge" => wedge_suite(),
        "geoproduct" => geoproduct_suite(),
        "structural" => structural_suite(params.seed),
        other => return Err(VerifyError::UnknownSuite(other.to_string())),
    };
    Ok(SuiteReport { suite: name.to_string(), checks, wall_time_ms: start.elapsed().as_millis() })
}

fn run(check: &str, inputs: Value, f: impl FnOnce() -> Result<(Rational, bool), Failure>) -> CheckResult {
    match f() {
        Ok((v, pass)) => {
            CheckResult { check: check.into(), inputs, value: Some(format_rational(&v)), pass, error: None }
        }
        Err(e) => CheckResult { check: check.into(), inputs, value: None, pass: false, error: Some(e.to_string()) },
    }
}

fn count(n: usize) -> Rational {
    int(n as i64)
}

fn chain<'a>(l: &'a Layout, id: &str) -> Result<&'a Chain, Failure> {
    l.chain(id).ok_or_else(|| format!("no chain {id}").into())
}

fn event(l: &Layout, id: &str, tick: usize) -> Result<EventId, Failure> {
    l.event(id, tick).ok_or_else(|| format!("no event {id}[{tick}]").into())
}

fn point(l: &Layout, id: &str) -> Result<Vec<i64>, Failure> {
    l.point(id).map(<[i64]>::to_vec).ok_or_else(|| format!("no point for {id}").into())
}

fn point_of(l: &Layout, e: EventId) -> Result<Vec<i64>, Failure> {
    let (w, _) = l.locate(e).ok_or_else(|| format!("{e} not in layout"))?;
    point(l, l.chains[w].id().as_str())
}

fn sub(a: &[i64], b: &[i64]) -> [i64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn inner(u: [i64; 2], v: [i64; 2]) -> i64 {
    u[0] * v[0] + u[1] * v[1]
}

fn cross(u: [i64; 2], v: [i64; 2]) -> i64 {
    u[0] * v[1] - u[1] * v[0]
}

fn integer_sqrt(n: i64) -> Option<i64> {
    let r = (n as f64).sqrt().round() as i64;
    (r >= 0 && r * r == n).then_some(r)
}

/// Ordered Pythagorean legs `(a, b)` with `1 <= a, b <= max`.
pub fn pythagorean_legs(max: i64) -> Vec<(i64, i64, i64)> {
    let mut out = Vec::new();
    for a in 1..=max {
        for b in 1..=max {
            if let Some(c) = integer_sqrt(a * a + b * b) {
                out.push((a, b, c));
            }
        }
    }
    out
}

fn census_suite() -> Vec<CheckResult> {
    let layouts: Vec<(&str, Value, LayoutBuilder)> = vec![
        ("census_lattice", json!({"width": 8, "ticks": 60}), || lattice_1p1(8, 60)),
        ("census_simplex", json!({"chains": 4, "ticks": 30}), || simplex_config(4, &int(1), 30)),
        ("census_grid", json!({"rows": 3, "cols": 3, "s": 3, "r": 4, "ticks": 40}), || grid_config(3, 3, 3, 4, 40)),
        ("census_pythagoras", json!({"a": 3, "b": 4, "ticks": 40}), || pythagoras_config(3, 4, 40)),
    ];
    layouts
        .into_iter()
        .map(|(name, mut inputs, build)| {
            let l = build();
            if let Ok(l) = &l {
                inputs["events"] = json!(l.poset.len());
                inputs["pairs"] = json!(all_pairs(&l.chains).len());
            }
            run(name, inputs, || {
                let l = l?;
                let c = census(&l.poset, &all_pairs(&l.chains));
                let defined = c.fully_defined_count();
                // equidistant chains leave every event ambiguous, so only the
                // lattice is required to produce fully defined codes
                Ok((count(defined), c.legal_codes_only() && (defined > 0 || name != "census_lattice")))
            })
        })
        .collect()
}

fn geography_suite() -> Vec<CheckResult> {
    let inputs = json!({"width": 9, "ticks": 40, "p": "3", "q": "6"});
    vec![run("case_geography", inputs, || {
        let l = lattice_1p1(9, 40)?;
        let (p, q) = (chain(&l, "3")?, chain(&l, "6")?);
        let mut classified = 0;
        for c in &l.chains {
            let pos: i64 = c.id().as_str().parse()?;
            if pos == 3 || pos == 6 {
                continue;
            }
            let expected = match pos {
                ..=2 => Side::PSide,
                4..=5 => Side::Between,
                _ => Side::QSide,
            };
            for &e in c.elements() {
                match side_of(&l.poset, e, p, q) {
                    Ok(s) if s == expected => classified += 1,
                    Ok(s) => return Err(format!("{e} on {} classified {s:?}", c.id()).into()),
                    Err(CollinearityError::MissingProjection { .. }) => {}
                    Err(err) => return Err(err.into()),
                }
            }
        }
        Ok((count(classified), classified > 0))
    })]
}

/// Every event's code in the dual poset is the dual of its code, so the
/// admissible cases map I, II, III to themselves and swap IV and V.
fn duality_holds(poset: &Poset, chains: &[Chain]) -> Result<usize, Failure> {
    let dual = poset.dual();
    let dual_chains: Vec<Chain> = chains.iter().map(Chain::dual).collect();
    let mut classified = 0;
    for i in 0..chains.len() {
        for j in 0..chains.len() {
            if i == j {
                continue;
            }
            for &e in poset.events() {
                let a = projection_code(poset, e, &chains[i], &chains[j]);
                let b = projection_code(&dual, e, &dual_chains[i], &dual_chains[j]);
                match (a, b) {
                    (Ok(a), Ok(b)) => {
                        let mut mapped: Vec<_> = a.compatible_cases().into_iter().map(|c| c.dual()).collect();
                        mapped.sort();
                        let mut seen = b.compatible_cases();
                        seen.sort();
                        if a.dual() != b || mapped != seen {
                            return Err(format!("{e}: code {a} dualizes to {b}").into());
                        }
                        classified += usize::from(!seen.is_empty());
                    }
                    (Err(_), Err(_)) => {}
                    _ => return Err(format!("{e}: projections defined on only one side of the duality").into()),
                }
            }
        }
    }
    Ok(classified)
}

fn duality_suite(seed: u64) -> Vec<CheckResult> {
    let mut out: Vec<CheckResult> = [
        ("duality_lattice", json!({"width": 6, "ticks": 30}), lattice_1p1(6, 30)),
        ("duality_simplex", json!({"chains": 4, "ticks": 20}), simplex_config(4, &int(1), 20)),
        ("duality_grid", json!({"rows": 3, "cols": 3, "s": 3, "r": 4, "ticks": 30}), grid_config(3, 3, 3, 4, 30)),
        ("duality_pythagoras", json!({"a": 3, "b": 4, "ticks": 30}), pythagoras_config(3, 4, 30)),
    ]
    .into_par_iter()
    .map(|(name, inputs, l)| {
        run(name, inputs, || {
            let l = l?;
            let n = duality_holds(&l.poset, &l.chains)?;
            Ok((count(n), n > 0))
        })
    })
    .collect();
    out.extend((0..4).into_par_iter().map(|k| {
        let s = seed.wrapping_add(k);
        run("duality_random_dag", json!({"n": 100, "p": 0.12, "seed": s}), || {
            let p = random_dag(100, 0.12, s)?;
            let chains = greedy_chains(&p, 3);
            let n = duality_holds(&p, &chains)?;
            Ok((count(n), true))
        })
    }).collect::<Vec<_>>());
    out
}

fn simplex_suite() -> Vec<CheckResult> {
    let mut out = Vec::new();
    for n in [3usize, 4] {
        out.push(run("simplex_collinear", json!({"chains": n, "spacing": "1/1", "ticks": 30}), || {
            let l = collinear_config(n, &int(1), 30)?;
            let t = simplex_table(&l.poset, &l.chains, SimplexMode::Collinear, 15)?;
            let ok = t.pairs.iter().all(|(&(i, j), p)| {
                let k = int((j - i) as i64);
                p.first == k && p.second == -k
            });
            let span = t.pair(0, n - 1).ok_or("missing pair")?.first.clone();
            Ok((span, ok && t.ratio_law() && dimension_count(&t)? == (1, 1)))
        }));
        out.push(run("simplex_equidistant", json!({"chains": n, "spacing": "1/1", "ticks": 30}), || {
            let l = simplex_config(n, &int(1), 30)?;
            let t = simplex_table(&l.poset, &l.chains, SimplexMode::Pairwise, 15)?;
            let ok = t.pairs.values().all(|p| p.first == int(1) && p.second == int(-1));
            let unit = t.pair(0, 1).ok_or("missing pair")?.first.clone();
            Ok((unit, ok && t.equidistant() && dimension_count(&t)? == (n - 1, 1)))
        }));
    }
    out
}

fn pythagoras_suite(max_leg: i64) -> Vec<CheckResult> {
    let mut triples = Vec::new();
    for a in 0..=max_leg {
        for b in 0..=max_leg {
            if a + b == 0 {
                continue;
            }
            if let Some(c) = integer_sqrt(a * a + b * b) {
                triples.push((a, b, c));
            }
        }
    }
    triples
        .into_par_iter()
        .map(|(a, b, c)| {
            run("pythagoras", json!({"a": a, "b": b, "c": c}), || {
                let l = pythagoras_config(a, b, 4 * c as u32)?;
                let rep = pythagoras_check(&l, 2 * c as usize)?;
                let ok = rep.holds()
                    && rep.scalars.leg_a == int(-a * a)
                    && rep.scalars.leg_b == int(-b * b)
                    && rep.hypotenuse_scalar == int(-c * c)
                    && rep.scalars.combined == rep.hypotenuse_scalar;
                Ok((rep.hypotenuse_scalar, ok))
            })
        })
        .collect()
}

fn orthogonal_suite() -> Vec<CheckResult> {
    let mut out: Vec<CheckResult> = [(3, 4), (4, 3), (6, 8), (5, 12), (8, 15)]
        .into_iter()
        .map(|(a, b)| {
            run("orthogonal_bisector", json!({"a": a, "b": b}), || {
                let c = integer_sqrt(a * a + b * b).ok_or("not a triple")?;
                let l = pythagoras_config(a, b, 4 * c as u32)?;
                let t = 2 * c as usize;
                let ch = |id| chain(&l, id);
                let rep = orthogonal_subspaces(
                    &l.poset,
                    (ch("P")?, ch("Q")?),
                    (ch("R")?, ch("S")?),
                    event(&l, "P", t)?,
                    event(&l, "Q", t)?,
                )?;
                let delta = int(2 * a);
                let ok = rep.holds() && rep.pq_by_pq.first == delta && rep.pq_by_pq.second == -&delta;
                Ok((delta, ok))
            })
        })
        .collect();
    out.push(run("orthogonal_displaced_control", json!({"r": [3, 4], "s": [3, -4]}), || {
        let names = ["P", "Q", "R", "S"];
        let pts = vec![vec![-3, 0], vec![3, 0], vec![3, 4], vec![3, -4]];
        let l = plane_layout(&names, pts, &vec![(0..=40).map(int).collect::<Vec<_>>(); 4])?;
        let ch = |id| chain(&l, id);
        let rep = orthogonal_subspaces(
            &l.poset,
            (ch("P")?, ch("Q")?),
            (ch("R")?, ch("S")?),
            event(&l, "P", 20)?,
            event(&l, "Q", 20)?,
        )?;
        Ok((rep.pq_by_rs.first.clone(), !rep.holds()))
    }));
    out
}

/// Contiguous unit-spaced run of lattice chains, possibly reversed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Run {
    start: usize,
    len: usize,
    reversed: bool,
}

fn parallel_suite(seed: u64, trials: usize) -> Vec<CheckResult> {
    const WIDTH: u32 = 20;
    let inputs = json!({"width": WIDTH, "ticks": 60, "trials": trials, "seed": seed});
    vec![run("parallel_postulate", inputs, || {
        let l = lattice_1p1(WIDTH, 60)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = WIDTH as usize + 1;
        let runs: Vec<(Run, Run)> = (0..trials)
            .map(|_| {
                let mut pick = || {
                    let len = rng.gen_range(3..=n);
                    Run { start: rng.gen_range(0..=n - len), len, reversed: rng.gen_bool(0.5) }
                };
                (pick(), pick())
            })
            .collect();
        let fences: Mutex<HashMap<Run, Fence>> = Mutex::new(HashMap::new());
        let fence = |r: Run| -> Result<Fence, GeometryError> {
            if let Some(f) = fences.lock().expect("fence cache").get(&r) {
                return Ok(f.clone());
            }
            let mut chains: Vec<Chain> = l.chains[r.start..r.start + r.len].to_vec();
            if r.reversed {
                chains.reverse();
            }
            let f = validate_fence(&l.poset, &chains)?;
            fences.lock().expect("fence cache").insert(r, f.clone());
            Ok(f)
        };
        let results: Vec<(bool, bool)> = runs
            .par_iter()
            .map(|&(a, b)| {
                let rep = parallel_postulate_check(&l.poset, &fence(a)?, &fence(b)?)?;
                Ok((rep.holds(), rep.shared.count() >= 2))
            })
            .collect::<Result<_, GeometryError>>()?;
        let sharing = results.iter().filter(|r| r.1).count();
        Ok((count(sharing), results.iter().all(|r| r.0) && sharing > 0))
    })]
}

fn dot_layout(a: i64, b: i64, c: i64) -> Result<(Layout, Fence, usize), Failure> {
    let t = 2 * c;
    let l = dotprod_config(a, b, 4 * c as u32, t)?;
    let fence = validate_fence(&l.poset, &l.chains[..3])?;
    Ok((l, fence, t as usize))
}

fn dot_suite() -> Vec<CheckResult> {
    let triples = pythagorean_legs(24);
    let mut out: Vec<CheckResult> = triples
        .par_iter()
        .map(|&(a, b, c)| {
            run("dot_oracle", json!({"a": a, "b": b}), || {
                let (l, fence, t) = dot_layout(a, b, c)?;
                let probes = [
                    event(&l, "X", 0)?,
                    event(&l, "Y", 0)?,
                    event(&l, "F0", t)?,
                    event(&l, "F1", t)?,
                    event(&l, "F2", t)?,
                ];
                let ids = fence.ids();
                let mut compared = 0;
                for &x in &probes {
                    for &y in &probes {
                        let d = sub(&point_of(&l, y)?, &point_of(&l, x)?);
                        for p in &ids {
                            for q in ids.iter().filter(|q| *q != p) {
                                let leg = sub(&point(&l, q.as_str())?, &point(&l, p.as_str())?);
                                let dp = dot_product(&l.poset, x, y, &fence, p, q)?;
                                if dp.scaled != int(inner(d, leg)) {
                                    return Err(format!("{x},{y} on {p}{q}: {} vs {}", dp.scaled, inner(d, leg)).into());
                                }
                                compared += 1;
                            }
                        }
                        if !dot_is_pair_independent(&l.poset, x, y, &fence)? {
                            return Err(format!("{x},{y}: value depends on the chain pair").into());
                        }
                        for &z in &probes {
                            let (f0, f1) = (&ids[0], &ids[1]);
                            let xy = dot_product(&l.poset, x, y, &fence, f0, f1)?.signed;
                            let yz = dot_product(&l.poset, y, z, &fence, f0, f1)?.signed;
                            let xz = dot_product(&l.poset, x, z, &fence, f0, f1)?.signed;
                            if xz != xy + yz {
                                return Err(format!("additivity fails at {x},{y},{z}").into());
                            }
                        }
                    }
                }
                Ok((count(compared), true))
            })
        })
        .collect();
    out.push(run("dot_special_cases", json!({"a": 3, "b": 4}), || {
        let (l, fence, t) = dot_layout(3, 4, 5)?;
        let (f0, f2) = (ChainId::from("F0"), ChainId::from("F2"));
        let x = event(&l, "F0", t)?;
        let y = event(&l, "F2", t)?;
        let d = |x, y| dot_product(&l.poset, x, y, &fence, &f0, &f2).map(|d| d.signed);
        let dpq = fence.distance(0, 2);
        let ok = d(x, x)? == int(0) && d(x, y)? == dpq && d(y, x)? == -&dpq;
        Ok((dpq, ok && triples.len() >= 20))
    }));
    out
}

fn grid_layout(s: i64, r: i64, c: i64) -> Result<(Layout, Grid, usize), Failure> {
    let reach = 2 * c.max(2 * s.max(r));
    let l = grid_config(3, 3, s, r, 2 * reach as u32)?;
    let chains = (0..3)
        .map(|i| (0..3).map(|k| chain(&l, &grid_name(i, k)).cloned()).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let grid = validate_grid(&l.poset, chains)?;
    if !is_orthogonal_grid(&grid, |a, b| l.chain_sq_dist(a.as_str(), b.as_str()).cloned())? {
        return Err("grid is not orthogonal".into());
    }
    Ok((l, grid, reach as usize))
}

/// All grid events at tick `t` and all legs `(P_ik, P_il)` within a row.
fn grid_cases(l: &Layout, t: usize) -> Result<GridCases, Failure> {
    let mut events = Vec::new();
    let mut legs = Vec::new();
    for i in 0..3 {
        for k in 0..3 {
            events.push(event(l, &grid_name(i, k), t)?);
            for m in 0..3 {
                if m != k {
                    legs.push((ChainId::new(grid_name(i, k)), ChainId::new(grid_name(i, m))));
                }
            }
        }
    }
    Ok((events, legs))
}

fn grid_suite(check: &'static str, eval: fn(&Layout, &Grid, usize) -> Result<usize, Failure>) -> Vec<CheckResult> {
    let pairs = pythagorean_legs(24);
    let mut out: Vec<CheckResult> = pairs
        .par_iter()
        .map(|&(s, r, c)| {
            run(check, json!({"rows": 3, "cols": 3, "s": s, "r": r}), || {
                let (l, grid, t) = grid_layout(s, r, c)?;
                let n = eval(&l, &grid, t)?;
                Ok((count(n), n > 0))
            })
        })
        .collect();
    out.push(run("grid_count", json!({"max_spacing": 24}), || Ok((count(pairs.len()), pairs.len() >= 20))));
    out.push(run("sheared_grid_control", json!({"rows": 3, "cols": 3, "s": 2, "r": 2}), || {
        let l = sheared_grid_config(3, 3, 2, 2, 40)?;
        let chains = (0..3)
            .map(|i| (0..3).map(|k| chain(&l, &grid_name(i, k)).cloned()).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let grid = validate_grid(&l.poset, chains)?;
        let orthogonal = is_orthogonal_grid(&grid, |a, b| l.chain_sq_dist(a.as_str(), b.as_str()).cloned())?;
        Ok((count(usize::from(orthogonal)), !orthogonal))
    }));
    out
}

fn wedge_eval(l: &Layout, grid: &Grid, t: usize) -> Result<usize, Failure> {
    let (events, legs) = grid_cases(l, t)?;
    let mut n = 0;
    for &x in &events {
        for &y in &events {
            let d = sub(&point_of(l, y)?, &point_of(l, x)?);
            for (pik, pil) in &legs {
                let leg = sub(&point(l, pil.as_str())?, &point(l, pik.as_str())?);
                let w = wedge_product(&l.poset, x, y, grid, pik, pil)?;
                if w != int(cross(leg, d)) {
                    return Err(format!("wedge {x},{y} on {pik}{pil}: {w} vs {}", cross(leg, d)).into());
                }
                if wedge_product(&l.poset, y, x, grid, pik, pil)? != -&w {
                    return Err(format!("wedge {x},{y} is not antisymmetric").into());
                }
                let same_row = grid.locate(x).map(|c| c.0) == grid.locate(y).map(|c| c.0);
                if same_row && w != int(0) {
                    return Err(format!("wedge {x},{y} on one row is {w}").into());
                }
                n += 1;
            }
        }
    }
    Ok(n)
}

fn geoproduct_eval(l: &Layout, grid: &Grid, t: usize) -> Result<usize, Failure> {
    let (events, legs) = grid_cases(l, t)?;
    let mut n = 0;
    for &x in &events {
        for &y in &events {
            let d = sub(&point_of(l, y)?, &point_of(l, x)?);
            for (pik, pil) in &legs {
                let g = match geometric_product(&l.poset, x, y, grid, pik, pil) {
                    Ok(g) => g,
                    // event-chain distance not a whole number of ticks
                    Err(GeometryError::AlignmentError { .. }) => continue,
                    Err(e) => return Err(e.into()),
                };
                let leg = sub(&point(l, pil.as_str())?, &point(l, pik.as_str())?);
                if !g.holds()
                    || g.dot != int(inner(d, leg))
                    || g.wedge != int(cross(leg, d))
                    || g.interval_sq != int(inner(d, d))
                {
                    return Err(format!("{x},{y} on {pik}{pil}: {g:?}").into());
                }
                n += 1;
            }
        }
    }
    Ok(n)
}

fn wedge_suite() -> Vec<CheckResult> {
    grid_suite("wedge_oracle", wedge_eval)
}

fn geoproduct_suite() -> Vec<CheckResult> {
    grid_suite("geometric_identity", geoproduct_eval)
}

/// Reflexive-transitive closure of `edges` on `n` vertices by Warshall.
pub fn warshall(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut r = vec![vec![false; n]; n];
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(a, b) in edges {
        r[a][b] = true;
    }
    for k in 0..n {
        let through = r[k].clone();
        for row in r.iter_mut().filter(|row| row[k]) {
            for (cell, &t) in row.iter_mut().zip(&through) {
                *cell |= t;
            }
        }
    }
    r
}

/// Forward projection by scanning every chain element.
pub fn scan_forward(poset: &Poset, x: EventId, c: &Chain) -> Option<usize> {
    c.elements().iter().position(|&e| poset.leq(x, e).unwrap_or(false))
}

/// Backward projection by scanning every chain element.
pub fn scan_backward(poset: &Poset, x: EventId, c: &Chain) -> Option<usize> {
    c.elements().iter().rposition(|&e| poset.leq(e, x).unwrap_or(false))
}

fn projection_laws(poset: &Poset, chains: &[Chain]) -> Result<usize, Failure> {
    let mut n = 0;
    for c in chains {
        for &x in poset.events() {
            let (f, b) = (forward_index(poset, x, c), backward_index(poset, x, c));
            if f != scan_forward(poset, x, c) || b != scan_backward(poset, x, c) {
                return Err(format!("{x} onto {}: projection disagrees with scan", c.id()).into());
            }
            if let Some(f) = f {
                let px = c.elements()[f];
                if forward_index(poset, px, c) != Some(f) || !poset.leq(x, px)? {
                    return Err(format!("{x} onto {}: forward projection not idempotent", c.id()).into());
                }
            }
            if let Some(b) = b {
                let bx = c.elements()[b];
                if backward_index(poset, bx, c) != Some(b) || !poset.leq(bx, x)? {
                    return Err(format!("{x} onto {}: backward projection not idempotent", c.id()).into());
                }
            }
            for &y in poset.events() {
                if poset.leq(x, y)? {
                    let fy = forward_index(poset, y, c);
                    let by = backward_index(poset, y, c);
                    let mono_f = match (f, fy) {
                        (Some(a), Some(b)) => a <= b,
                        (None, Some(_)) => false,
                        _ => true,
                    };
                    let mono_b = match (b, by) {
                        (Some(a), Some(b)) => a <= b,
                        (Some(_), None) => false,
                        _ => true,
                    };
                    if !mono_f || !mono_b {
                        return Err(format!("{x} <= {y} onto {}: projection not monotone", c.id()).into());
                    }
                }
            }
            n += 1;
        }
    }
    Ok(n)
}

fn structural_suite(seed: u64) -> Vec<CheckResult> {
    let mut out = Vec::new();
    out.push(run("closure_vs_warshall", json!({"n": 150, "p": 0.03, "seed": seed}), || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 150;
        let edges: Vec<(usize, usize)> =
            (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|_| rng.gen_bool(0.03)).collect();
        let mut p = Poset::new();
        for i in 0..n {
            p.add_event(EventId(i as u32))?;
        }
        for &(a, b) in &edges {
            p.add_influence(EventId(a as u32), EventId(b as u32))?;
        }
        let oracle = warshall(n, &edges);
        for (i, row) in oracle.iter().enumerate() {
            for (j, &reach) in row.iter().enumerate() {
                if p.leq(EventId(i as u32), EventId(j as u32))? != reach {
                    return Err(format!("closure disagrees at ({i}, {j})").into());
                }
            }
        }
        let reduced: Vec<(usize, usize)> =
            p.cover_pairs().iter().map(|(a, b)| (a.0 as usize, b.0 as usize)).collect();
        Ok((count(reduced.len()), warshall(n, &reduced) == oracle))
    }));
    out.push(run("projection_laws", json!({"lattice": [4, 20], "random_dag": [60, 0.1, seed]}), || {
        let l = lattice_1p1(4, 20)?;
        let mut n = projection_laws(&l.poset, &l.chains)?;
        let p = random_dag(60, 0.1, seed)?;
        n += projection_laws(&p, &greedy_chains(&p, 2))?;
        Ok((count(n), n > 0))
    }));
    out.push(run("decomposition_round_trip", json!({"width": 6, "ticks": 24}), || {
        let l = lattice_1p1(6, 24)?;
        let p = chain(&l, "0")?;
        let mut n = 0;
        for &x in l.poset.events() {
            for &y in l.poset.events() {
                let Ok(pair) = quantify_interval_one_chain(&l.poset, x, y, p, ChainSide::SameSide) else {
                    continue;
                };
                let (sym, anti) = sym_antisym_decompose(&pair);
                let back = (&sym.first + &anti.first, &sym.second + &anti.second);
                let scalar = &sym.first * &sym.first - &anti.first * &anti.first;
                if back != (pair.first.clone(), pair.second.clone()) || scalar != &pair.first * &pair.second {
                    return Err(format!("decomposition of [{x}, {y}] does not round-trip").into());
                }
                n += 1;
            }
        }
        Ok((count(n), n > 0))
    }));
    out.push(run("json_round_trip", json!({"lattice": [5, 12], "random_dag": [40, 0.1, seed]}), || {
        let l = lattice_1p1(5, 12)?;
        let p = random_dag(40, 0.1, seed)?;
        let docs = [PosetDocument::from_layout(&l), PosetDocument::from_parts(&p, &greedy_chains(&p, 2))];
        let mut ok = true;
        for doc in &docs {
            let text = doc.to_json();
            let back = PosetDocument::from_json(&text)?;
            let (poset, chains) = back.build()?;
            let again = PosetDocument::from_parts(&poset, &chains);
            ok &= back == *doc && again.to_json() == text;
        }
        let (rebuilt, _) = docs[0].build()?;
        ok &= rebuilt.relation_pairs() == l.poset.relation_pairs();
        Ok((count(docs.len()), ok))
    }));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite() {
        assert!(matches!(run_suite("nosuchsuite", &SuiteParams::default()), Err(VerifyError::UnknownSuite(_))));
    }

    #[test]
    fn legs_up_to_twenty_four() {
        let legs = pythagorean_legs(24);
        assert_eq!(legs.len(), 22);
        assert!(legs.contains(&(20, 21, 29)));
    }

    #[test]
    fn warshall_closes_paths() {
        let r = warshall(3, &[(0, 1), (1, 2)]);
        assert!(r[0][2] && !r[2][0] && r[1][1]);
    }

    #[test]
    fn failing_check_reports_error() {
        let c = run("x", json!({}), || Err("boom".into()));
        assert!(!c.pass && c.value.is_none() && c.error.as_deref() == Some("boom"));
    }
}
