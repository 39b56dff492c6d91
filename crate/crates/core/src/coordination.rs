//! Coordinated chain pairs, orthogonal subspaces, the discrete Pythagorean
//! theorem and simplex tables.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use crate::collinearity::CollinearityError;
use crate::metric::Layout;
use crate::order::{Chain, ChainId, EventId, Poset};
use crate::projection::{
    backward_index, classify_interval, forward_index, interval_scalar, quantify_interval_two_chains, two_chain_pair,
    Direction, IntervalClass, QuantError, QuantPair,
};
use crate::rational::{format_rational, int, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error(transparent)]
    Quant(#[from] QuantError),
    #[error(transparent)]
    Collinearity(#[from] CollinearityError),
    #[error("chains {p} and {q} are not coordinated")]
    NotCoordinated { p: ChainId, q: ChainId },
    #[error("pair {0} is not purely antichain-like")]
    NotAntichainLike(String),
    #[error("{what}: quantified square {quantified} but the layout says {expected}")]
    AlignmentError { what: String, quantified: String, expected: String },
    #[error("chains are neither pairwise equidistant nor collinear")]
    MixedConfiguration,
    #[error("a fence needs at least three chains, got {0}")]
    TooFewChains(usize),
    #[error("chains {0:?} are not properly collinear")]
    NotCollinear([ChainId; 3]),
    #[error("spacing {found} between {a} and {b} differs from {expected}")]
    NonUniformSpacing { a: ChainId, b: ChainId, expected: String, found: String },
    #[error("fence spacings {0} and {1} differ")]
    SpacingMismatch(String, String),
    #[error("{x} and {y} have different time coordinates relative to {chain}")]
    TimeMismatch { x: EventId, y: EventId, chain: ChainId },
    #[error("chain {0} appears in more than one parallel fence")]
    NotParallel(ChainId),
    #[error("grid needs at least 3 rows and 3 columns, got {0}x{1}")]
    GridTooSmall(usize, usize),
    #[error("chain {0} is not in the grid")]
    NotInGrid(ChainId),
    #[error("grid is not orthogonal")]
    NotOrthogonal,
    #[error("missing chain {0}")]
    MissingChain(String),
}

/// A pair of chains checked to be coordinated over the given index windows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinatedPair {
    pub p: ChainId,
    pub q: ChainId,
    pub p_window: RangeInclusive<usize>,
    pub q_window: RangeInclusive<usize>,
}

// Projects every element of the window onto `to` and checks the map is
// injective, gap-free and preserves valuation differences.
fn map_preserves_lengths(
    poset: &Poset,
    from: &Chain,
    window: &RangeInclusive<usize>,
    to: &Chain,
    dir: Direction,
) -> Result<bool, QuantError> {
    let mut prev: Option<(usize, usize)> = None;
    for i in window.clone() {
        let e = from.elements()[i];
        let j = match dir {
            Direction::Forward => forward_index(poset, e, to),
            Direction::Backward => backward_index(poset, e, to),
        }
        .ok_or_else(|| QuantError::Unquantifiable { event: e, chain: to.id().clone(), direction: dir })?;
        if let Some((pi, pj)) = prev {
            if j != pj + 1 {
                return Ok(false);
            }
            let (fv, tv) = (from.valuations(), to.valuations());
            if &fv[i] - &fv[pi] != &tv[j] - &tv[pj] {
                return Ok(false);
            }
        }
        prev = Some((i, j));
    }
    Ok(true)
}

/// Whether forward and backward projections between the two windows, in
/// both directions, are one-to-one onto consecutive elements and preserve
/// every interval length. Projections leaving a chain are an error.
pub fn are_coordinated(
    poset: &Poset,
    p: &Chain,
    q: &Chain,
    p_window: RangeInclusive<usize>,
    q_window: RangeInclusive<usize>,
) -> Result<bool, QuantError> {
    if p_window.is_empty() || q_window.is_empty() || *p_window.end() >= p.len() || *q_window.end() >= q.len() {
        return Ok(false);
    }
    for dir in [Direction::Forward, Direction::Backward] {
        if !map_preserves_lengths(poset, p, &p_window, q, dir)? || !map_preserves_lengths(poset, q, &q_window, p, dir)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Largest index window of `from` whose elements project both ways onto `to`.
pub fn projectable_window(poset: &Poset, from: &Chain, to: &Chain) -> Option<RangeInclusive<usize>> {
    let ok: Vec<usize> = (0..from.len())
        .filter(|&i| {
            let e = from.elements()[i];
            forward_index(poset, e, to).is_some() && backward_index(poset, e, to).is_some()
        })
        .collect();
    let (lo, hi) = (*ok.first()?, *ok.last()?);
    (ok.len() == hi - lo + 1).then_some(lo..=hi)
}

/// Checks coordination over the largest windows where both chains can
/// quantify each other.
pub fn verify_coordination(poset: &Poset, p: &Chain, q: &Chain) -> Result<CoordinatedPair, GeometryError> {
    let not = || GeometryError::NotCoordinated { p: p.id().clone(), q: q.id().clone() };
    let pw = projectable_window(poset, p, q).ok_or_else(not)?;
    let qw = projectable_window(poset, q, p).ok_or_else(not)?;
    if !are_coordinated(poset, p, q, pw.clone(), qw.clone())? {
        return Err(not());
    }
    Ok(CoordinatedPair { p: p.id().clone(), q: q.id().clone(), p_window: pw, q_window: qw })
}

/// The four quantifications behind the orthogonal-subspace condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalityReport {
    /// `[p, q]` against `PQ`; must be purely antichain-like.
    pub pq_by_pq: QuantPair,
    /// `[p, q]` against `RS`; must be `(0, 0)` with all four projections shared.
    pub pq_by_rs: QuantPair,
    pub rs_shares_projections: bool,
    /// `[R̄p, S̄p]` against `PQ`; must be `(0, 0)`.
    pub back_by_pq: QuantPair,
    /// `[Rp, Sp]` against `PQ`; must be `(0, 0)`.
    pub fwd_by_pq: QuantPair,
}

impl OrthogonalityReport {
    pub fn holds(&self) -> bool {
        classify_interval(&self.pq_by_pq) == IntervalClass::PurelyAntichainLike
            && self.pq_by_rs.is_zero()
            && self.rs_shares_projections
            && self.back_by_pq.is_zero()
            && self.fwd_by_pq.is_zero()
    }
}

fn proj(poset: &Poset, x: EventId, c: &Chain, dir: Direction) -> Result<EventId, QuantError> {
    let i = match dir {
        Direction::Forward => forward_index(poset, x, c),
        Direction::Backward => backward_index(poset, x, c),
    };
    i.map(|i| c.elements()[i])
        .ok_or_else(|| QuantError::Unquantifiable { event: x, chain: c.id().clone(), direction: dir })
}

pub fn orthogonal_subspaces(
    poset: &Poset,
    pq: (&Chain, &Chain),
    rs: (&Chain, &Chain),
    p: EventId,
    q: EventId,
) -> Result<OrthogonalityReport, GeometryError> {
    let (cp, cq) = pq;
    let (cr, cs) = rs;
    use Direction::{Backward as B, Forward as F};
    let mut shared = true;
    for c in [cr, cs] {
        for d in [F, B] {
            shared &= proj(poset, p, c, d)? == proj(poset, q, c, d)?;
        }
    }
    let (rbp, sbp) = (proj(poset, p, cr, B)?, proj(poset, p, cs, B)?);
    let (rp, sp) = (proj(poset, p, cr, F)?, proj(poset, p, cs, F)?);
    Ok(OrthogonalityReport {
        pq_by_pq: two_chain_pair(poset, p, q, cp, cq)?,
        pq_by_rs: two_chain_pair(poset, p, q, cr, cs)?,
        rs_shares_projections: shared,
        back_by_pq: two_chain_pair(poset, rbp, sbp, cp, cq)?,
        fwd_by_pq: two_chain_pair(poset, rp, sp, cp, cq)?,
    })
}

/// Whether `PQ` and `RS` are orthogonal as witnessed by `p` and `q`. The
/// degenerate interval `p == q` witnesses nothing.
pub fn check_orthogonal_subspaces(
    poset: &Poset,
    pq: (&Chain, &Chain),
    rs: (&Chain, &Chain),
    p: EventId,
    q: EventId,
) -> Result<bool, GeometryError> {
    if p == q {
        return Ok(false);
    }
    Ok(orthogonal_subspaces(poset, pq, rs, p, q)?.holds())
}

/// Interval scalars of two orthogonal legs and of their concatenation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarTriple {
    pub leg_a: Rational,
    pub leg_b: Rational,
    pub combined: Rational,
}

/// Concatenates two orthogonal legs at the scalar level: scalars add.
/// Each leg must be purely antichain-like or the zero pair.
pub fn concatenate_orthogonal(a: &QuantPair, b: &QuantPair) -> Result<ScalarTriple, GeometryError> {
    for leg in [a, b] {
        if !leg.is_zero() && classify_interval(leg) != IntervalClass::PurelyAntichainLike {
            return Err(GeometryError::NotAntichainLike(leg.to_string()));
        }
    }
    let (sa, sb) = (interval_scalar(a), interval_scalar(b));
    let combined = &sa + &sb;
    Ok(ScalarTriple { leg_a: sa, leg_b: sb, combined })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PythagorasReport {
    /// `[p, o]` against `PQ`.
    pub leg_a: QuantPair,
    /// `[o, r]` against `SR`.
    pub leg_b: QuantPair,
    /// `[p, r]` against `PR`.
    pub hypotenuse: QuantPair,
    pub scalars: ScalarTriple,
    pub hypotenuse_scalar: Rational,
}

impl PythagorasReport {
    /// Leg scalars add up to the scalar of the directly quantified hypotenuse.
    pub fn holds(&self) -> bool {
        self.scalars.combined == self.hypotenuse_scalar
    }
}

fn aligned(layout: &Layout, pair: &QuantPair, a: &str, b: &str) -> Result<(), GeometryError> {
    let expected = layout.chain_sq_dist(a, b).ok_or_else(|| GeometryError::MissingChain(format!("{a}/{b}")))?;
    let quantified = &pair.first * &pair.first;
    if &quantified != expected || pair.first != -&pair.second {
        return Err(GeometryError::AlignmentError {
            what: format!("interval {a}-{b}"),
            quantified: format_rational(&quantified),
            expected: format_rational(expected),
        });
    }
    Ok(())
}

fn chain<'a>(layout: &'a Layout, id: &str) -> Result<&'a Chain, GeometryError> {
    layout.chain(id).ok_or_else(|| GeometryError::MissingChain(id.to_string()))
}

/// Runs the discrete Pythagorean check on a layout from
/// [`crate::metric::pythagoras_config`], probing at tick index `tick`.
pub fn pythagoras_check(layout: &Layout, tick: usize) -> Result<PythagorasReport, GeometryError> {
    let poset = &layout.poset;
    let at = |id: &str| -> Result<EventId, GeometryError> {
        chain(layout, id)?.elements().get(tick).copied().ok_or_else(|| GeometryError::MissingChain(format!("{id}[{tick}]")))
    };
    let has = |id: &str| layout.chain(id).is_some();
    let o = at("O")?;
    let zero = QuantPair::new(int(0), int(0));

    let leg_a = if has("P") {
        let (p, q) = (chain(layout, "P")?, chain(layout, "Q")?);
        verify_coordination(poset, p, q)?;
        let pair = quantify_interval_two_chains(poset, at("P")?, o, p, q)?;
        aligned(layout, &pair, "P", "O")?;
        pair
    } else {
        zero.clone()
    };
    let leg_b = if has("R") {
        let (s, r) = (chain(layout, "S")?, chain(layout, "R")?);
        verify_coordination(poset, s, r)?;
        let pair = quantify_interval_two_chains(poset, o, at("R")?, s, r)?;
        aligned(layout, &pair, "O", "R")?;
        pair
    } else {
        zero.clone()
    };
    let hypotenuse = match (has("P"), has("R")) {
        (true, true) => {
            let (p, r) = (chain(layout, "P")?, chain(layout, "R")?);
            verify_coordination(poset, p, r)?;
            let pair = quantify_interval_two_chains(poset, at("P")?, at("R")?, p, r)?;
            aligned(layout, &pair, "P", "R")?;
            pair
        }
        (true, false) => leg_a.clone(),
        (false, true) => leg_b.clone(),
        (false, false) => zero,
    };
    let scalars = concatenate_orthogonal(&leg_a, &leg_b)?;
    let hypotenuse_scalar = interval_scalar(&hypotenuse);
    Ok(PythagorasReport { leg_a, leg_b, hypotenuse, scalars, hypotenuse_scalar })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimplexMode {
    /// Chains listed in order along one line.
    Collinear,
    /// Chains pairwise equidistant.
    Pairwise,
}

/// Quantification of `[x_i, x_j]` against `(C_i, C_j)` for every chain pair,
/// with all `x` taken at the same tick index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplexTable {
    pub ids: Vec<ChainId>,
    pub mode: SimplexMode,
    pub pairs: BTreeMap<(usize, usize), QuantPair>,
}

pub fn simplex_table(
    poset: &Poset,
    chains: &[Chain],
    mode: SimplexMode,
    tick: usize,
) -> Result<SimplexTable, GeometryError> {
    let mut pairs = BTreeMap::new();
    for i in 0..chains.len() {
        for j in i + 1..chains.len() {
            let (ci, cj) = (&chains[i], &chains[j]);
            verify_coordination(poset, ci, cj)?;
            let at = |c: &Chain| {
                c.elements().get(tick).copied().ok_or_else(|| GeometryError::MissingChain(format!("{}[{tick}]", c.id())))
            };
            pairs.insert((i, j), quantify_interval_two_chains(poset, at(ci)?, at(cj)?, ci, cj)?);
        }
    }
    Ok(SimplexTable { ids: chains.iter().map(|c| c.id().clone()).collect(), mode, pairs })
}

impl SimplexTable {
    pub fn pair(&self, i: usize, j: usize) -> Option<&QuantPair> {
        self.pairs.get(&(i.min(j), i.max(j)))
    }

    /// Every pair equal and purely antichain-like.
    pub fn equidistant(&self) -> bool {
        let mut it = self.pairs.values();
        match it.next() {
            None => false,
            Some(first) => {
                classify_interval(first) == IntervalClass::PurelyAntichainLike && it.all(|p| p.same_values(first))
            }
        }
    }

    /// The pair spanning `k` gaps is `k` times the unit pair.
    pub fn ratio_law(&self) -> bool {
        let Some(unit) = self.pair(0, 1) else { return false };
        if classify_interval(unit) != IntervalClass::PurelyAntichainLike {
            return false;
        }
        self.pairs.iter().all(|(&(i, j), p)| {
            let k = int((j - i) as i64);
            p.first == &unit.first * &k && p.second == &unit.second * &k
        })
    }

    /// Matrix CSV; each cell is `first;second`.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for id in &self.ids {
            s.push(',');
            s.push_str(id.as_str());
        }
        s.push('\n');
        for i in 0..self.ids.len() {
            s.push_str(self.ids[i].as_str());
            for j in 0..self.ids.len() {
                s.push(',');
                if let Some(p) = self.pair(i, j).filter(|_| i != j) {
                    s.push_str(&format!("{};{}", format_rational(&p.first), format_rational(&p.second)));
                }
            }
            s.push('\n');
        }
        s
    }
}

/// `(spatial, temporal)` dimensions spanned by the chains of a table:
/// `N` equidistant chains span `N-1` spatial dimensions, collinear ones one.
pub fn dimension_count(table: &SimplexTable) -> Result<(usize, usize), GeometryError> {
    let n = table.ids.len();
    match table.mode {
        SimplexMode::Pairwise if table.equidistant() => Ok((n - 1, 1)),
        SimplexMode::Collinear if table.ratio_law() => Ok((1, 1)),
        _ => Err(GeometryError::MixedConfiguration),
    }
}
