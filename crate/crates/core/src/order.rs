//! Finite posets of events and the chains embedded in them.
//!
//! The order is stored as two reachability bit matrices (`up[x]` holds every
//! `y` with `x <= y`, `down[x]` every `y` with `y <= x`), so `leq` is a single
//! bit test. Covers are derived from the closure on demand.

use std::collections::HashMap;
use std::fmt;
use std::ops::Deref;
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::rational::{int, Rational};

/// Opaque event identifier, unique within a poset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EventId(pub u32);

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// Chain identifier.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ChainId(pub String);

impl ChainId {
    pub fn new(s: impl Into<String>) -> Self {
        ChainId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ChainId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ChainId {
    fn from(s: &str) -> Self {
        ChainId(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrderError {
    #[error("event {0} is already present")]
    DuplicateEvent(EventId),
    #[error("unknown event {0}")]
    UnknownEvent(EventId),
    #[error("adding {a} <= {b} would contradict {b} < {a}")]
    CycleViolation { a: EventId, b: EventId },
    #[error("relation is not a partial order: {0}")]
    NotPartialOrder(String),
    #[error("chain {0} is empty")]
    EmptyChain(ChainId),
    #[error("chain {chain}: {a} < {b} does not hold")]
    NotAChain { chain: ChainId, a: EventId, b: EventId },
    #[error("chain {chain}: valuation is not strictly increasing at {at}")]
    NonMonotoneValuation { chain: ChainId, at: EventId },
    #[error("chain {chain}: {events} events but {valuations} valuations")]
    ValuationCount { chain: ChainId, events: usize, valuations: usize },
}

/// A finite partially-ordered set of events, open for construction.
#[derive(Debug, Clone, Default)]
pub struct Poset {
    labels: Vec<EventId>,
    index: HashMap<EventId, usize>,
    up: Vec<FixedBitSet>,
    down: Vec<FixedBitSet>,
    // labels[i] == EventId(i) for every i
    dense: bool,
}

impl Poset {
    pub fn new() -> Self {
        Poset { dense: true, ..Default::default() }
    }

    /// Builds a poset over `n` events with ids `0..n` directly from a relation
    /// predicate. The predicate must already describe a partial order; call
    /// [`Poset::check_partial_order`] when that is not guaranteed.
    pub fn from_relation(n: usize, mut leq: impl FnMut(usize, usize) -> bool) -> Self {
        let mut up = vec![FixedBitSet::with_capacity(n); n];
        let mut down = vec![FixedBitSet::with_capacity(n); n];
        for (i, row) in up.iter_mut().enumerate() {
            for (j, col) in down.iter_mut().enumerate() {
                if i == j || leq(i, j) {
                    row.insert(j);
                    col.insert(i);
                }
            }
        }
        let labels: Vec<EventId> = (0..n).map(|i| EventId(i as u32)).collect();
        let index = labels.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        Poset { labels, index, up, down, dense: true }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Events in insertion order.
    pub fn events(&self) -> &[EventId] {
        &self.labels
    }

    pub fn contains(&self, id: EventId) -> bool {
        self.index_of(id).is_some()
    }

    #[inline]
    pub(crate) fn index_of(&self, id: EventId) -> Option<usize> {
        if self.dense {
            let i = id.0 as usize;
            (i < self.labels.len()).then_some(i)
        } else {
            self.index.get(&id).copied()
        }
    }

    fn require(&self, id: EventId) -> Result<usize, OrderError> {
        self.index_of(id).ok_or(OrderError::UnknownEvent(id))
    }

    pub fn add_event(&mut self, id: EventId) -> Result<(), OrderError> {
        if self.contains(id) {
            return Err(OrderError::DuplicateEvent(id));
        }
        let n = self.labels.len();
        self.dense &= id.0 as usize == n;
        self.labels.push(id);
        self.index.insert(id, n);
        for row in self.up.iter_mut().chain(self.down.iter_mut()) {
            row.grow(n + 1);
        }
        let mut own = FixedBitSet::with_capacity(n + 1);
        own.insert(n);
        self.up.push(own.clone());
        self.down.push(own);
        Ok(())
    }

    /// Records `a <= b` and closes the relation transitively.
    pub fn add_influence(&mut self, a: EventId, b: EventId) -> Result<(), OrderError> {
        let ia = self.require(a)?;
        let ib = self.require(b)?;
        if self.up[ia].contains(ib) {
            return Ok(());
        }
        if self.up[ib].contains(ia) {
            return Err(OrderError::CycleViolation { a, b });
        }
        let above_b = self.up[ib].clone();
        let below_a = self.down[ia].clone();
        for u in below_a.ones() {
            self.up[u].union_with(&above_b);
        }
        for v in above_b.ones() {
            self.down[v].union_with(&below_a);
        }
        Ok(())
    }

    pub fn leq(&self, a: EventId, b: EventId) -> Result<bool, OrderError> {
        let ia = self.require(a)?;
        let ib = self.require(b)?;
        Ok(self.up[ia].contains(ib))
    }

    /// `a <= b`, false when either event is unknown.
    #[inline]
    pub(crate) fn leq_known(&self, a: EventId, b: EventId) -> bool {
        match (self.index_of(a), self.index_of(b)) {
            (Some(ia), Some(ib)) => self.up[ia].contains(ib),
            _ => false,
        }
    }

    pub fn lt(&self, a: EventId, b: EventId) -> Result<bool, OrderError> {
        Ok(a != b && self.leq(a, b)?)
    }

    pub fn comparable(&self, a: EventId, b: EventId) -> Result<bool, OrderError> {
        Ok(self.leq(a, b)? || self.leq(b, a)?)
    }

    /// True iff `a < b` with nothing strictly between.
    pub fn covers(&self, a: EventId, b: EventId) -> Result<bool, OrderError> {
        let ia = self.require(a)?;
        let ib = self.require(b)?;
        Ok(self.covers_idx(ia, ib))
    }

    fn covers_idx(&self, ia: usize, ib: usize) -> bool {
        ia != ib && self.up[ia].contains(ib) && self.up[ia].intersection_count(&self.down[ib]) == 2
    }

    /// True iff the given events are pairwise comparable.
    pub fn is_chain(&self, events: &[EventId]) -> Result<bool, OrderError> {
        let idx: Vec<usize> = events.iter().map(|&e| self.require(e)).collect::<Result<_, _>>()?;
        for (k, &i) in idx.iter().enumerate() {
            for &j in &idx[k + 1..] {
                if !self.up[i].contains(j) && !self.up[j].contains(i) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// The transitive reduction as `(a, b)` pairs with `a` covered by `b`,
    /// in insertion order of `a` then `b`.
    pub fn cover_pairs(&self) -> Vec<(EventId, EventId)> {
        let mut out = Vec::new();
        for ia in 0..self.len() {
            for ib in self.up[ia].ones() {
                if self.covers_idx(ia, ib) {
                    out.push((self.labels[ia], self.labels[ib]));
                }
            }
        }
        out
    }

    /// Every ordered pair `(a, b)` with `a <= b`.
    pub fn relation_pairs(&self) -> Vec<(EventId, EventId)> {
        let mut out = Vec::new();
        for ia in 0..self.len() {
            for ib in self.up[ia].ones() {
                out.push((self.labels[ia], self.labels[ib]));
            }
        }
        out
    }

    /// The order-dual: `a <= b` here iff `b <= a` in the result.
    pub fn dual(&self) -> Poset {
        Poset {
            labels: self.labels.clone(),
            index: self.index.clone(),
            up: self.down.clone(),
            down: self.up.clone(),
            dense: self.dense,
        }
    }

    /// Verifies reflexivity, antisymmetry and transitivity of the stored
    /// relation, plus agreement of the up and down matrices.
    pub fn check_partial_order(&self) -> Result<(), OrderError> {
        let n = self.len();
        let bad = |msg: String| Err(OrderError::NotPartialOrder(msg));
        for i in 0..n {
            if !self.up[i].contains(i) {
                return bad(format!("{} is not <= itself", self.labels[i]));
            }
            for j in self.up[i].ones() {
                if !self.down[j].contains(i) {
                    return bad(format!("up/down disagree on {} <= {}", self.labels[i], self.labels[j]));
                }
                if i != j && self.up[j].contains(i) {
                    return bad(format!("{} and {} are mutually related", self.labels[i], self.labels[j]));
                }
                if !self.up[j].is_subset(&self.up[i]) {
                    return bad(format!("transitivity fails through {} <= {}", self.labels[i], self.labels[j]));
                }
            }
        }
        for j in 0..n {
            for i in self.down[j].ones() {
                if !self.up[i].contains(j) {
                    return bad(format!("up/down disagree on {} <= {}", self.labels[i], self.labels[j]));
                }
            }
        }
        Ok(())
    }

    pub fn freeze(self) -> FrozenPoset {
        FrozenPoset { inner: self, covers: OnceLock::new() }
    }
}

/// An immutable poset. All geometry operates on frozen posets; queries are
/// pure and the value is `Sync`.
#[derive(Debug)]
pub struct FrozenPoset {
    inner: Poset,
    covers: OnceLock<Vec<(EventId, EventId)>>,
}

impl FrozenPoset {
    /// Cached transitive reduction.
    pub fn covers_list(&self) -> &[(EventId, EventId)] {
        self.covers.get_or_init(|| self.inner.cover_pairs())
    }

    pub fn dual(&self) -> FrozenPoset {
        self.inner.dual().freeze()
    }

    pub fn into_inner(self) -> Poset {
        self.inner
    }
}

impl Clone for FrozenPoset {
    fn clone(&self) -> Self {
        self.inner.clone().freeze()
    }
}

impl Deref for FrozenPoset {
    type Target = Poset;

    fn deref(&self) -> &Poset {
        &self.inner
    }
}

/// A totally ordered set of events with a strictly monotone valuation.
#[derive(Debug, Clone)]
pub struct Chain {
    id: ChainId,
    elements: Vec<EventId>,
    valuations: Vec<Rational>,
    slot: HashMap<EventId, usize>,
}

impl PartialEq for Chain {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id && self.elements == other.elements && self.valuations == other.valuations
    }
}

impl Eq for Chain {}

impl Chain {
    /// Elements must be listed in strictly ascending order of the poset.
    pub fn new(
        poset: &Poset,
        id: ChainId,
        elements: Vec<EventId>,
        valuations: Vec<Rational>,
    ) -> Result<Chain, OrderError> {
        if elements.is_empty() {
            return Err(OrderError::EmptyChain(id));
        }
        if elements.len() != valuations.len() {
            return Err(OrderError::ValuationCount {
                chain: id,
                events: elements.len(),
                valuations: valuations.len(),
            });
        }
        for &e in &elements {
            poset.require(e)?;
        }
        for k in 1..elements.len() {
            let (a, b) = (elements[k - 1], elements[k]);
            if !poset.lt(a, b)? {
                return Err(OrderError::NotAChain { chain: id, a, b });
            }
            if valuations[k] <= valuations[k - 1] {
                return Err(OrderError::NonMonotoneValuation { chain: id, at: b });
            }
        }
        let slot = elements.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        Ok(Chain { id, elements, valuations, slot })
    }

    /// Valuations `0, 1, 2, ...` along the chain.
    pub fn with_successive_valuations(
        poset: &Poset,
        id: ChainId,
        elements: Vec<EventId>,
    ) -> Result<Chain, OrderError> {
        let vals = (0..elements.len()).map(|i| int(i as i64)).collect();
        Chain::new(poset, id, elements, vals)
    }

    pub fn id(&self) -> &ChainId {
        &self.id
    }

    pub fn elements(&self) -> &[EventId] {
        &self.elements
    }

    pub fn valuations(&self) -> &[Rational] {
        &self.valuations
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn position(&self, e: EventId) -> Option<usize> {
        self.slot.get(&e).copied()
    }

    pub fn contains(&self, e: EventId) -> bool {
        self.slot.contains_key(&e)
    }

    pub fn valuation(&self, e: EventId) -> Option<&Rational> {
        self.position(e).map(|i| &self.valuations[i])
    }

    /// The same chain seen in the dual poset: order reversed, valuations
    /// negated so they stay increasing.
    pub fn dual(&self) -> Chain {
        let elements: Vec<EventId> = self.elements.iter().rev().copied().collect();
        let valuations: Vec<Rational> = self.valuations.iter().rev().map(|v| -v).collect();
        let slot = elements.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        Chain { id: self.id.clone(), elements, valuations, slot }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: u32) -> EventId {
        EventId(i)
    }

    fn poset_with(n: u32) -> Poset {
        let mut p = Poset::new();
        for i in 0..n {
            p.add_event(e(i)).unwrap();
        }
        p
    }

    #[test]
    fn add_event_is_reflexive_and_isolated() {
        let mut p = Poset::new();
        p.add_event(e(0)).unwrap();
        assert!(p.leq(e(0), e(0)).unwrap());
        p.add_event(e(1)).unwrap();
        assert!(!p.leq(e(0), e(1)).unwrap());
        assert!(!p.leq(e(1), e(0)).unwrap());
        assert_eq!(p.add_event(e(0)), Err(OrderError::DuplicateEvent(e(0))));
    }

    #[test]
    fn influence_closes_transitively() {
        let mut p = poset_with(3);
        p.add_influence(e(0), e(1)).unwrap();
        p.add_influence(e(1), e(2)).unwrap();
        assert!(p.leq(e(0), e(2)).unwrap());
        assert!(!p.leq(e(2), e(0)).unwrap());
        p.check_partial_order().unwrap();
    }

    #[test]
    fn cycle_is_rejected() {
        let mut p = poset_with(2);
        p.add_influence(e(0), e(1)).unwrap();
        assert_eq!(
            p.add_influence(e(1), e(0)),
            Err(OrderError::CycleViolation { a: e(1), b: e(0) })
        );
        // self-influence is the reflexive relation, not a cycle
        p.add_influence(e(0), e(0)).unwrap();
    }

    #[test]
    fn repeated_influence_is_idempotent() {
        let mut p = poset_with(2);
        p.add_influence(e(0), e(1)).unwrap();
        let before = p.cover_pairs();
        p.add_influence(e(0), e(1)).unwrap();
        assert_eq!(p.cover_pairs(), before);
        assert_eq!(before, vec![(e(0), e(1))]);
    }

    #[test]
    fn unknown_events_are_errors() {
        let p = poset_with(1);
        assert_eq!(p.leq(e(0), e(9)), Err(OrderError::UnknownEvent(e(9))));
        assert_eq!(p.covers(e(9), e(0)), Err(OrderError::UnknownEvent(e(9))));
        assert_eq!(p.is_chain(&[e(5)]), Err(OrderError::UnknownEvent(e(5))));
    }

    #[test]
    fn covers_excludes_transitive_pairs() {
        let mut p = poset_with(3);
        p.add_influence(e(0), e(1)).unwrap();
        p.add_influence(e(1), e(2)).unwrap();
        assert!(p.covers(e(0), e(1)).unwrap());
        assert!(!p.covers(e(0), e(2)).unwrap());
        assert!(!p.covers(e(0), e(0)).unwrap());
    }

    #[test]
    fn chain_detection() {
        let mut p = poset_with(4);
        p.add_influence(e(0), e(1)).unwrap();
        p.add_influence(e(1), e(2)).unwrap();
        assert!(p.is_chain(&[e(3)]).unwrap());
        assert!(p.is_chain(&[e(0), e(1), e(2)]).unwrap());
        assert!(!p.is_chain(&[e(0), e(3)]).unwrap());
    }

    #[test]
    fn sparse_ids_work() {
        let mut p = Poset::new();
        p.add_event(e(10)).unwrap();
        p.add_event(e(3)).unwrap();
        p.add_influence(e(10), e(3)).unwrap();
        assert!(p.leq(e(10), e(3)).unwrap());
        assert!(!p.contains(e(0)));
    }

    #[test]
    fn chain_validation() {
        let mut p = poset_with(3);
        p.add_influence(e(0), e(1)).unwrap();
        let ok = Chain::with_successive_valuations(&p, "a".into(), vec![e(0), e(1)]).unwrap();
        assert_eq!(ok.valuation(e(1)), Some(&int(1)));
        assert!(matches!(
            Chain::with_successive_valuations(&p, "b".into(), vec![e(0), e(2)]),
            Err(OrderError::NotAChain { .. })
        ));
        assert!(matches!(
            Chain::new(&p, "c".into(), vec![e(0), e(1)], vec![int(1), int(1)]),
            Err(OrderError::NonMonotoneValuation { .. })
        ));
        assert!(matches!(
            Chain::new(&p, "d".into(), vec![], vec![]),
            Err(OrderError::EmptyChain(_))
        ));
    }

    #[test]
    fn dual_reverses_everything() {
        let mut p = poset_with(3);
        p.add_influence(e(0), e(1)).unwrap();
        p.add_influence(e(1), e(2)).unwrap();
        let d = p.dual();
        assert!(d.leq(e(2), e(0)).unwrap());
        assert!(!d.leq(e(0), e(2)).unwrap());
        d.check_partial_order().unwrap();
        let c = Chain::with_successive_valuations(&p, "a".into(), vec![e(0), e(1), e(2)]).unwrap();
        let cd = c.dual();
        assert_eq!(cd.elements(), &[e(2), e(1), e(0)]);
        Chain::new(&d, cd.id().clone(), cd.elements().to_vec(), cd.valuations().to_vec()).unwrap();
    }

    #[test]
    fn from_relation_accepts_total_order() {
        let p = Poset::from_relation(4, |i, j| i <= j);
        p.check_partial_order().unwrap();
        assert_eq!(p.cover_pairs().len(), 3);
        let bad = Poset::from_relation(3, |i, j| (i, j) == (0, 1) || (i, j) == (1, 2));
        assert!(bad.check_partial_order().is_err());
    }
}
