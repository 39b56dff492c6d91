//! Posets induced by a finite metric of worldline positions.
//!
//! Every event is a tick on a worldline sitting at a fixed position. Event
//! `(t1, a)` precedes `(t2, b)` when `t2 - t1 >= 0` and
//! `(t2 - t1)^2 >= d(a, b)^2`. Distances are carried as exact squares, so
//! nothing here ever takes a floating-point root.

use std::collections::HashMap;

use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::order::{Chain, ChainId, EventId, FrozenPoset, OrderError, Poset};
use crate::rational::{int, sqrt_le_sum, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricError {
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("worldline at {0} has no ticks")]
    EmptyWorldline(String),
    #[error("worldline at {0}: tick times must be strictly increasing")]
    UnorderedTicks(String),
    #[error("unknown position {0}")]
    UnknownPosition(String),
    #[error("two worldlines at position {0}")]
    DuplicateWorldline(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Order(#[from] OrderError),
}

/// Named positions with a symmetric matrix of squared distances.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricConfig {
    positions: Vec<String>,
    sq_dist: Vec<Vec<Rational>>,
}

impl MetricConfig {
    /// Validates symmetry, zero diagonal, positive off-diagonal entries and
    /// the triangle inequality (in squared form).
    pub fn new(positions: Vec<String>, sq_dist: Vec<Vec<Rational>>) -> Result<Self, MetricError> {
        let n = positions.len();
        let bad = |msg: String| Err(MetricError::InvalidMetric(msg));
        if sq_dist.len() != n || sq_dist.iter().any(|row| row.len() != n) {
            return bad(format!("distance matrix is not {n}x{n}"));
        }
        for i in 0..n {
            if positions[..i].contains(&positions[i]) {
                return bad(format!("position {} listed twice", positions[i]));
            }
            if !sq_dist[i][i].is_zero() {
                return bad(format!("nonzero self-distance at {}", positions[i]));
            }
            for j in 0..n {
                if sq_dist[i][j] != sq_dist[j][i] {
                    return bad(format!("asymmetric entry {}-{}", positions[i], positions[j]));
                }
                if i != j && !sq_dist[i][j].is_positive() {
                    return bad(format!("{} and {} coincide", positions[i], positions[j]));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if !sqrt_le_sum(&sq_dist[i][k], &sq_dist[i][j], &sq_dist[j][k]) {
                        return bad(format!(
                            "triangle inequality fails: {} -> {} -> {}",
                            positions[i], positions[j], positions[k]
                        ));
                    }
                }
            }
        }
        Ok(MetricConfig { positions, sq_dist })
    }

    /// Euclidean configuration of integer points.
    pub fn from_points(positions: Vec<String>, points: &[Vec<i64>]) -> Result<Self, MetricError> {
        if positions.len() != points.len() {
            return Err(MetricError::BadParams("one point per position required".into()));
        }
        let sq = points
            .iter()
            .map(|a| points.iter().map(|b| int(sq_norm(a, b))).collect())
            .collect();
        MetricConfig::new(positions, sq)
    }

    pub fn positions(&self) -> &[String] {
        &self.positions
    }

    pub fn index_of(&self, position: &str) -> Option<usize> {
        self.positions.iter().position(|p| p == position)
    }

    pub fn sq_dist(&self, i: usize, j: usize) -> &Rational {
        &self.sq_dist[i][j]
    }
}

fn sq_norm(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// A worldline: the tick times of one observer at a fixed position.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldlineSpec {
    pub position: String,
    pub ticks: Vec<Rational>,
}

impl WorldlineSpec {
    pub fn new(position: impl Into<String>, ticks: Vec<Rational>) -> Self {
        WorldlineSpec { position: position.into(), ticks }
    }

    /// Integer ticks `from..=to`.
    pub fn integer(position: impl Into<String>, from: i64, to: i64) -> Self {
        WorldlineSpec::new(position, (from..=to).map(int).collect())
    }
}

/// A generated poset together with its chains and the geometry it came from.
#[derive(Debug, Clone)]
pub struct Layout {
    pub poset: FrozenPoset,
    /// One chain per worldline, named after its position, valued by tick time.
    pub chains: Vec<Chain>,
    pub metric: MetricConfig,
    /// Integer embedding of the positions, when the layout has one.
    pub points: Option<Vec<Vec<i64>>>,
    // worldline index -> metric position index
    worldline_position: Vec<usize>,
    // event index -> (worldline, tick index)
    origin: Vec<(usize, usize)>,
}

impl Layout {
    pub fn chain(&self, id: &str) -> Option<&Chain> {
        self.chains.iter().find(|c| c.id().as_str() == id)
    }

    pub fn chain_index(&self, id: &str) -> Option<usize> {
        self.chains.iter().position(|c| c.id().as_str() == id)
    }

    /// The `tick`-th event on the worldline named `chain`.
    pub fn event(&self, chain: &str, tick: usize) -> Option<EventId> {
        self.chain(chain).and_then(|c| c.elements().get(tick).copied())
    }

    /// Worldline index and tick index of an event.
    pub fn locate(&self, e: EventId) -> Option<(usize, usize)> {
        self.origin.get(e.0 as usize).copied()
    }

    pub fn time_of(&self, e: EventId) -> Option<&Rational> {
        let (w, t) = self.locate(e)?;
        Some(&self.chains[w].valuations()[t])
    }

    /// Squared metric distance between the positions of two worldlines.
    pub fn chain_sq_dist(&self, a: &str, b: &str) -> Option<&Rational> {
        let ia = self.chain_index(a)?;
        let ib = self.chain_index(b)?;
        Some(self.metric.sq_dist(self.worldline_position[ia], self.worldline_position[ib]))
    }

    /// Embedded point of a worldline, if the layout carries coordinates.
    pub fn point(&self, chain: &str) -> Option<&[i64]> {
        let i = self.chain_index(chain)?;
        self.points.as_ref().map(|p| p[self.worldline_position[i]].as_slice())
    }
}

/// Builds the causal poset of a set of worldlines in a metric configuration.
/// Events are numbered worldline by worldline, in tick order.
pub fn build_metric_poset(config: MetricConfig, worldlines: &[WorldlineSpec]) -> Result<Layout, MetricError> {
    let mut worldline_position = Vec::with_capacity(worldlines.len());
    for w in worldlines {
        let p = config
            .index_of(&w.position)
            .ok_or_else(|| MetricError::UnknownPosition(w.position.clone()))?;
        if worldline_position.contains(&p) {
            return Err(MetricError::DuplicateWorldline(w.position.clone()));
        }
        if w.ticks.is_empty() {
            return Err(MetricError::EmptyWorldline(w.position.clone()));
        }
        if w.ticks.windows(2).any(|t| t[1] <= t[0]) {
            return Err(MetricError::UnorderedTicks(w.position.clone()));
        }
        worldline_position.push(p);
    }

    let mut origin = Vec::new();
    for (wi, w) in worldlines.iter().enumerate() {
        origin.extend((0..w.ticks.len()).map(|t| (wi, t)));
    }
    let n = origin.len();
    if n > u32::MAX as usize {
        return Err(MetricError::BadParams("too many events".into()));
    }

    let pos_of = |e: usize| worldline_position[origin[e].0];
    let time_of = |e: usize| &worldlines[origin[e].0].ticks[origin[e].1];

    let poset = match integer_view(&config, worldlines) {
        Some((sq, times)) => Poset::from_relation(n, |i, j| {
            let dt = times[origin[j].0][origin[j].1] - times[origin[i].0][origin[i].1];
            dt >= 0 && dt * dt >= sq[pos_of(i)][pos_of(j)]
        }),
        None => Poset::from_relation(n, |i, j| {
            let dt = time_of(j) - time_of(i);
            !dt.is_negative() && &dt * &dt >= *config.sq_dist(pos_of(i), pos_of(j))
        }),
    };

    let mut chains = Vec::with_capacity(worldlines.len());
    let mut next = 0u32;
    for w in worldlines {
        let elements: Vec<EventId> = (next..next + w.ticks.len() as u32).map(EventId).collect();
        next += w.ticks.len() as u32;
        chains.push(Chain::new(&poset, ChainId::new(w.position.clone()), elements, w.ticks.clone())?);
    }

    Ok(Layout {
        poset: poset.freeze(),
        chains,
        metric: config,
        points: None,
        worldline_position,
        origin,
    })
}

type IntegerView = (Vec<Vec<i128>>, Vec<Vec<i128>>);

// All-integer data fits machine arithmetic; squares of tick differences stay
// far inside i128 for i64 inputs.
fn integer_view(config: &MetricConfig, worldlines: &[WorldlineSpec]) -> Option<IntegerView> {
    let as_int = |r: &Rational| -> Option<i128> {
        if r.is_integer() {
            r.numer().to_i64().map(i128::from)
        } else {
            None
        }
    };
    let sq = config
        .sq_dist
        .iter()
        .map(|row| row.iter().map(as_int).collect::<Option<Vec<_>>>())
        .collect::<Option<Vec<_>>>()?;
    let times = worldlines
        .iter()
        .map(|w| w.ticks.iter().map(as_int).collect::<Option<Vec<_>>>())
        .collect::<Option<Vec<_>>>()?;
    Some((sq, times))
}

/// Builds a layout from named integer points, one worldline per point.
pub fn plane_layout(
    names: &[&str],
    points: Vec<Vec<i64>>,
    ticks: &[Vec<Rational>],
) -> Result<Layout, MetricError> {
    let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    let config = MetricConfig::from_points(names.clone(), &points)?;
    let worldlines: Vec<WorldlineSpec> = names
        .iter()
        .zip(ticks)
        .map(|(n, t)| WorldlineSpec::new(n.clone(), t.clone()))
        .collect();
    let mut layout = build_metric_poset(config, &worldlines)?;
    layout.points = Some(points);
    Ok(layout)
}

fn integer_ticks(ticks: u32) -> Vec<Rational> {
    (0..=i64::from(ticks)).map(int).collect()
}

/// Positions `0..=width` on a line at unit separation, ticks `0..=ticks`.
/// Chains are named `"0"`, `"1"`, ...
pub fn lattice_1p1(width: u32, ticks: u32) -> Result<Layout, MetricError> {
    collinear_config(width as usize + 1, &int(1), ticks)
}

/// `n` chains on a line at the given spacing, named `"0".."n-1"`.
pub fn collinear_config(n_chains: usize, spacing: &Rational, ticks: u32) -> Result<Layout, MetricError> {
    if n_chains == 0 {
        return Err(MetricError::BadParams("at least one chain required".into()));
    }
    if !spacing.is_positive() {
        return Err(MetricError::BadParams("spacing must be positive".into()));
    }
    let names: Vec<String> = (0..n_chains).map(|i| i.to_string()).collect();
    let sq2 = spacing * spacing;
    let sq = (0..n_chains)
        .map(|i| {
            (0..n_chains)
                .map(|j| {
                    let d = int(i as i64 - j as i64);
                    &d * &d * &sq2
                })
                .collect()
        })
        .collect();
    let config = MetricConfig::new(names.clone(), sq)?;
    let worldlines: Vec<WorldlineSpec> =
        names.iter().map(|n| WorldlineSpec::new(n.clone(), integer_ticks(ticks))).collect();
    let mut layout = build_metric_poset(config, &worldlines)?;
    if spacing.is_integer() {
        let s = spacing.numer().to_i64();
        if let Some(s) = s {
            layout.points = Some((0..n_chains as i64).map(|i| vec![i * s]).collect());
        }
    }
    Ok(layout)
}

/// `n` pairwise equidistant chains (a regular simplex), named `"0".."n-1"`.
pub fn simplex_config(n_chains: usize, spacing: &Rational, ticks: u32) -> Result<Layout, MetricError> {
    if !(2..=5).contains(&n_chains) {
        return Err(MetricError::BadParams("simplex needs 2 to 5 chains".into()));
    }
    if !spacing.is_positive() {
        return Err(MetricError::BadParams("spacing must be positive".into()));
    }
    let names: Vec<String> = (0..n_chains).map(|i| i.to_string()).collect();
    let sq2 = spacing * spacing;
    let sq = (0..n_chains)
        .map(|i| (0..n_chains).map(|j| if i == j { int(0) } else { sq2.clone() }).collect())
        .collect();
    let config = MetricConfig::new(names.clone(), sq)?;
    let worldlines: Vec<WorldlineSpec> =
        names.iter().map(|n| WorldlineSpec::new(n.clone(), integer_ticks(ticks))).collect();
    build_metric_poset(config, &worldlines)
}

/// Name of the grid chain in row `i`, column `k`.
pub fn grid_name(i: usize, k: usize) -> String {
    format!("r{i}c{k}")
}

/// `rows x cols` rectangular grid: column spacing `s` along x, row spacing
/// `r` along y.
pub fn grid_config(rows: usize, cols: usize, s: i64, r: i64, ticks: u32) -> Result<Layout, MetricError> {
    if rows == 0 || cols == 0 || s <= 0 || r <= 0 {
        return Err(MetricError::BadParams("grid needs positive size and spacing".into()));
    }
    let mut names = Vec::new();
    let mut points = Vec::new();
    for i in 0..rows {
        for k in 0..cols {
            names.push(grid_name(i, k));
            points.push(vec![k as i64 * s, i as i64 * r]);
        }
    }
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let t = vec![integer_ticks(ticks); names.len()];
    plane_layout(&refs, points, &t)
}

/// Grid whose rows run at 60 degrees to its columns. Squared distances are
/// `dk^2 s^2 + dk di s r + di^2 r^2`, exact although the embedding is not.
pub fn sheared_grid_config(rows: usize, cols: usize, s: i64, r: i64, ticks: u32) -> Result<Layout, MetricError> {
    if rows == 0 || cols == 0 || s <= 0 || r <= 0 {
        return Err(MetricError::BadParams("grid needs positive size and spacing".into()));
    }
    let cells: Vec<(i64, i64)> = (0..rows as i64).flat_map(|i| (0..cols as i64).map(move |k| (i, k))).collect();
    let names: Vec<String> = cells.iter().map(|&(i, k)| grid_name(i as usize, k as usize)).collect();
    let sq = cells
        .iter()
        .map(|&(i1, k1)| {
            cells
                .iter()
                .map(|&(i2, k2)| {
                    let (dk, di) = (k2 - k1, i2 - i1);
                    int(dk * dk * s * s + dk * di * s * r + di * di * r * r)
                })
                .collect()
        })
        .collect();
    let config = MetricConfig::new(names.clone(), sq)?;
    let worldlines: Vec<WorldlineSpec> =
        names.iter().map(|n| WorldlineSpec::new(n.clone(), integer_ticks(ticks))).collect();
    build_metric_poset(config, &worldlines)
}

/// Orthogonal-legs layout: `P(-a,0)`, `Q(a,0)`, `R(0,b)`, `S(0,-b)` and the
/// corner `O(0,0)`. A zero leg drops the chain pair lying on it, since those
/// chains would coincide with `O`.
pub fn pythagoras_config(a: i64, b: i64, ticks: u32) -> Result<Layout, MetricError> {
    if a < 0 || b < 0 {
        return Err(MetricError::BadParams("legs must be non-negative".into()));
    }
    let mut names = vec!["O"];
    let mut points = vec![vec![0, 0]];
    if a > 0 {
        names.extend(["P", "Q"]);
        points.extend([vec![-a, 0], vec![a, 0]]);
    }
    if b > 0 {
        names.extend(["R", "S"]);
        points.extend([vec![0, b], vec![0, -b]]);
    }
    let t = vec![integer_ticks(ticks); names.len()];
    plane_layout(&names, points, &t)
}

/// A three-chain fence `F0(-a,0)`, `F1(0,0)`, `F2(a,0)` with two one-tick
/// probes `X(0,b)` and `Y(0,-b)` at time `probe_time`.
pub fn dotprod_config(a: i64, b: i64, ticks: u32, probe_time: i64) -> Result<Layout, MetricError> {
    if a <= 0 || b <= 0 {
        return Err(MetricError::BadParams("fence spacing and probe offset must be positive".into()));
    }
    let names = ["F0", "F1", "F2", "X", "Y"];
    let points = vec![vec![-a, 0], vec![0, 0], vec![a, 0], vec![0, b], vec![0, -b]];
    let full = integer_ticks(ticks);
    let probe = vec![int(probe_time)];
    plane_layout(&names, points, &[full.clone(), full.clone(), full, probe.clone(), probe])
}

/// Random DAG on `n` events: each pair `i < j` is related with probability
/// `p`, then closed transitively. Deterministic per seed.
pub fn random_dag(n: usize, p: f64, seed: u64) -> Result<FrozenPoset, MetricError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(MetricError::BadParams(format!("edge probability {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut poset = Poset::new();
    for i in 0..n {
        poset.add_event(EventId(i as u32))?;
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                poset.add_influence(EventId(i as u32), EventId(j as u32))?;
            }
        }
    }
    Ok(poset.freeze())
}

/// Greedy decomposition into disjoint chains: repeatedly take the longest
/// run of covers starting from the smallest unused event. Chains shorter
/// than `min_len` are dropped. Valuations are successive integers.
pub fn greedy_chains(poset: &FrozenPoset, min_len: usize) -> Vec<Chain> {
    let mut used: HashMap<EventId, bool> = HashMap::new();
    let mut succ: HashMap<EventId, Vec<EventId>> = HashMap::new();
    for &(a, b) in poset.covers_list() {
        succ.entry(a).or_default().push(b);
    }
    let mut chains = Vec::new();
    for &start in poset.events() {
        if used.contains_key(&start) {
            continue;
        }
        let mut run = vec![start];
        used.insert(start, true);
        let mut cur = start;
        while let Some(&next) = succ.get(&cur).and_then(|s| s.iter().find(|e| !used.contains_key(e))) {
            used.insert(next, true);
            run.push(next);
            cur = next;
        }
        if run.len() >= min_len.max(1) {
            let id = ChainId::new(format!("c{}", chains.len()));
            if let Ok(c) = Chain::with_successive_valuations(poset, id, run) {
                chains.push(c);
            }
        }
    }
    chains
}
