//! Chain projections and the quantification of events and intervals.
//!
//! The forward projection `Px` of an event is the least element of chain
//! `P` above it, the backward projection `P̄x` the greatest element below.
//! Both are found by binary search, since "x <= p" is monotone along a chain.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::collinearity::{side_of, Side};
use crate::order::{Chain, ChainId, EventId, Poset};
use crate::rational::{int, serde_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuantError {
    #[error("{event} has no {direction} projection onto chain {chain}")]
    Unquantifiable { event: EventId, chain: ChainId, direction: Direction },
    #[error("{event} is not between chains {p} and {q}")]
    NotBetween { event: EventId, p: ChainId, q: ChainId },
    #[error(transparent)]
    Collinearity(Box<crate::collinearity::CollinearityError>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        })
    }
}

/// Position on `chain` of the least element above `x`.
pub fn forward_index(poset: &Poset, x: EventId, chain: &Chain) -> Option<usize> {
    if !poset.contains(x) {
        return None;
    }
    let els = chain.elements();
    let i = els.partition_point(|&c| !poset.leq_known(x, c));
    (i < els.len()).then_some(i)
}

/// Position on `chain` of the greatest element below `x`.
pub fn backward_index(poset: &Poset, x: EventId, chain: &Chain) -> Option<usize> {
    if !poset.contains(x) {
        return None;
    }
    let i = chain.elements().partition_point(|&c| poset.leq_known(c, x));
    i.checked_sub(1)
}

pub fn forward_project(poset: &Poset, x: EventId, chain: &Chain) -> Option<EventId> {
    forward_index(poset, x, chain).map(|i| chain.elements()[i])
}

pub fn backward_project(poset: &Poset, x: EventId, chain: &Chain) -> Option<EventId> {
    backward_index(poset, x, chain).map(|i| chain.elements()[i])
}

/// Valuation of the forward projection, or `Unquantifiable`.
pub fn forward_value(poset: &Poset, x: EventId, chain: &Chain) -> Result<Rational, QuantError> {
    forward_index(poset, x, chain)
        .map(|i| chain.valuations()[i].clone())
        .ok_or_else(|| missing(x, chain, Direction::Forward))
}

/// Valuation of the backward projection, or `Unquantifiable`.
pub fn backward_value(poset: &Poset, x: EventId, chain: &Chain) -> Result<Rational, QuantError> {
    backward_index(poset, x, chain)
        .map(|i| chain.valuations()[i].clone())
        .ok_or_else(|| missing(x, chain, Direction::Backward))
}

fn missing(event: EventId, chain: &Chain, direction: Direction) -> QuantError {
    QuantError::Unquantifiable { event, chain: chain.id().clone(), direction }
}

/// The chains a quantification pair was measured against.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<ChainId>", into = "Vec<ChainId>")]
pub enum Basis {
    /// Bare numbers not tied to any chain.
    Free,
    Single(ChainId),
    Pair(ChainId, ChainId),
}

impl From<Basis> for Vec<ChainId> {
    fn from(b: Basis) -> Self {
        match b {
            Basis::Free => vec![],
            Basis::Single(a) => vec![a],
            Basis::Pair(a, b) => vec![a, b],
        }
    }
}

impl TryFrom<Vec<ChainId>> for Basis {
    type Error = String;

    fn try_from(v: Vec<ChainId>) -> Result<Self, String> {
        let mut it = v.into_iter();
        match (it.next(), it.next(), it.next()) {
            (None, _, _) => Ok(Basis::Free),
            (Some(a), None, _) => Ok(Basis::Single(a)),
            (Some(a), Some(b), None) => Ok(Basis::Pair(a, b)),
            _ => Err("a basis names at most two chains".into()),
        }
    }
}

/// Ordered pair of exact scalars quantifying an event or interval.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuantPair {
    #[serde(with = "serde_rational")]
    pub first: Rational,
    #[serde(with = "serde_rational")]
    pub second: Rational,
    pub basis: Basis,
}

impl QuantPair {
    pub fn new(first: Rational, second: Rational) -> Self {
        QuantPair { first, second, basis: Basis::Free }
    }

    pub fn ints(first: i64, second: i64) -> Self {
        QuantPair::new(int(first), int(second))
    }

    pub fn with_basis(mut self, basis: Basis) -> Self {
        self.basis = basis;
        self
    }

    /// The two scalars, ignoring the basis.
    pub fn values(&self) -> (&Rational, &Rational) {
        (&self.first, &self.second)
    }

    pub fn same_values(&self, other: &QuantPair) -> bool {
        self.values() == other.values()
    }

    pub fn is_zero(&self) -> bool {
        self.first.is_zero() && self.second.is_zero()
    }
}

impl fmt::Display for QuantPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.first, self.second)
    }
}

/// `(v(Px), v(P̄x))`.
pub fn quantify_event(poset: &Poset, x: EventId, p: &Chain) -> Result<QuantPair, QuantError> {
    let f = forward_value(poset, x, p)?;
    let b = backward_value(poset, x, p)?;
    Ok(QuantPair::new(f, b).with_basis(Basis::Single(p.id().clone())))
}

/// How an interval sits relative to the single chain quantifying it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainSide {
    /// Both endpoints on the same side: `(Py - Px, P̄y - P̄x)`.
    SameSide,
    /// Endpoints on opposite sides: `(Py - P̄x, P̄y - Px)`.
    Straddling,
}

pub fn quantify_interval_one_chain(
    poset: &Poset,
    x: EventId,
    y: EventId,
    p: &Chain,
    side: ChainSide,
) -> Result<QuantPair, QuantError> {
    let (px, bpx) = (forward_value(poset, x, p)?, backward_value(poset, x, p)?);
    let (py, bpy) = (forward_value(poset, y, p)?, backward_value(poset, y, p)?);
    let (a, b) = match side {
        ChainSide::SameSide => (py - px, bpy - bpx),
        ChainSide::Straddling => (py - bpx, bpy - px),
    };
    Ok(QuantPair::new(a, b).with_basis(Basis::Single(p.id().clone())))
}

/// `(Py - Px, Qy - Qx)` for endpoints lying between the chains `P` and `Q`.
pub fn quantify_interval_two_chains(
    poset: &Poset,
    x: EventId,
    y: EventId,
    p: &Chain,
    q: &Chain,
) -> Result<QuantPair, QuantError> {
    for e in [x, y] {
        match side_of(poset, e, p, q) {
            Ok(Side::Between) => {}
            Ok(_) => {
                return Err(QuantError::NotBetween { event: e, p: p.id().clone(), q: q.id().clone() })
            }
            Err(err) => return Err(err.into_quant()),
        }
    }
    two_chain_pair(poset, x, y, p, q)
}

/// `(Py - Px, Qy - Qx)` without the betweenness check.
pub(crate) fn two_chain_pair(
    poset: &Poset,
    x: EventId,
    y: EventId,
    p: &Chain,
    q: &Chain,
) -> Result<QuantPair, QuantError> {
    let a = forward_value(poset, y, p)? - forward_value(poset, x, p)?;
    let b = forward_value(poset, y, q)? - forward_value(poset, x, q)?;
    Ok(QuantPair::new(a, b).with_basis(Basis::Pair(p.id().clone(), q.id().clone())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IntervalClass {
    ChainLike,
    PurelyChainLike,
    AntichainLike,
    PurelyAntichainLike,
    ProjectionLike,
    Degenerate,
}

impl IntervalClass {
    pub fn is_chain_like(self) -> bool {
        matches!(self, IntervalClass::ChainLike | IntervalClass::PurelyChainLike)
    }

    pub fn is_antichain_like(self) -> bool {
        matches!(self, IntervalClass::AntichainLike | IntervalClass::PurelyAntichainLike)
    }
}

pub fn classify_interval(pair: &QuantPair) -> IntervalClass {
    let (a, b) = pair.values();
    match (a.is_zero(), b.is_zero()) {
        (true, true) => IntervalClass::Degenerate,
        (true, false) | (false, true) => IntervalClass::ProjectionLike,
        _ if a.is_positive() == b.is_positive() => {
            if a == b && a.is_positive() {
                IntervalClass::PurelyChainLike
            } else {
                IntervalClass::ChainLike
            }
        }
        _ => {
            if *a == -b {
                IntervalClass::PurelyAntichainLike
            } else {
                IntervalClass::AntichainLike
            }
        }
    }
}

/// Which interval class a `(0, 0)` quantification degenerates from, decided
/// by the endpoints: identical endpoints are projection-like, comparable
/// ones chain-like, incomparable ones antichain-like.
pub fn degenerate_context(poset: &Poset, x: EventId, y: EventId) -> Option<IntervalClass> {
    if !poset.contains(x) || !poset.contains(y) {
        return None;
    }
    Some(if x == y {
        IntervalClass::ProjectionLike
    } else if poset.leq_known(x, y) || poset.leq_known(y, x) {
        IntervalClass::ChainLike
    } else {
        IntervalClass::AntichainLike
    })
}

/// Product of the two components.
pub fn interval_scalar(pair: &QuantPair) -> Rational {
    &pair.first * &pair.second
}

/// Splits `(a, b)` into `(t, t) + (d, -d)` with `t = (a+b)/2`, `d = (a-b)/2`.
pub fn sym_antisym_decompose(pair: &QuantPair) -> (QuantPair, QuantPair) {
    let two = int(2);
    let t = (&pair.first + &pair.second) / &two;
    let d = (&pair.first - &pair.second) / &two;
    (
        QuantPair::new(t.clone(), t).with_basis(pair.basis.clone()),
        QuantPair::new(d.clone(), -d).with_basis(pair.basis.clone()),
    )
}

/// Time coordinate of an event seen from a chain: `(v(Px) + v(P̄x)) / 2`.
pub fn event_time(poset: &Poset, x: EventId, p: &Chain) -> Result<Rational, QuantError> {
    Ok((forward_value(poset, x, p)? + backward_value(poset, x, p)?) / int(2))
}

/// Distance of an event from a chain: `|v(Px) - v(P̄x)| / 2`.
pub fn event_chain_distance(poset: &Poset, x: EventId, p: &Chain) -> Result<Rational, QuantError> {
    Ok(((forward_value(poset, x, p)? - backward_value(poset, x, p)?) / int(2)).abs())
}
