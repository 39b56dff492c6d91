//! Fences of collinear chains, the discrete parallel postulate and the
//! discrete dot product.

use num_traits::Signed;

use crate::collinearity::{chain_order, chains_properly_collinear};
use crate::coordination::{projectable_window, verify_coordination, GeometryError};
use crate::order::{Chain, ChainId, EventId, Poset};
use crate::projection::{backward_project, event_chain_distance, event_time, forward_project};
use crate::rational::{format_rational, int, Rational};

/// Three or more coordinated, collinear, evenly spaced chains, in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fence {
    chains: Vec<Chain>,
    spacing: Rational,
}

impl Fence {
    pub fn chains(&self) -> &[Chain] {
        &self.chains
    }

    pub fn ids(&self) -> Vec<ChainId> {
        self.chains.iter().map(|c| c.id().clone()).collect()
    }

    /// Distance between adjacent chains.
    pub fn spacing(&self) -> &Rational {
        &self.spacing
    }

    pub fn len(&self) -> usize {
        self.chains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chains.is_empty()
    }

    pub fn index_of(&self, id: &ChainId) -> Option<usize> {
        self.chains.iter().position(|c| c.id() == id)
    }

    /// `spacing * |i - j|`.
    pub fn distance(&self, i: usize, j: usize) -> Rational {
        &self.spacing * int(i.abs_diff(j) as i64)
    }

    fn reversed(&self) -> Fence {
        Fence { chains: self.chains.iter().rev().cloned().collect(), spacing: self.spacing.clone() }
    }
}

/// Distance between two chains, read off one event of `q` well inside the
/// reach of `p`.
pub fn chain_distance(poset: &Poset, p: &Chain, q: &Chain) -> Result<Rational, GeometryError> {
    let w = projectable_window(poset, q, p)
        .ok_or_else(|| GeometryError::NotCoordinated { p: p.id().clone(), q: q.id().clone() })?;
    let mid = (w.start() + w.end()) / 2;
    Ok(event_chain_distance(poset, q.elements()[mid], p)?)
}

pub fn validate_fence(poset: &Poset, chains: &[Chain]) -> Result<Fence, GeometryError> {
    if chains.len() < 3 {
        return Err(GeometryError::TooFewChains(chains.len()));
    }
    for (i, a) in chains.iter().enumerate() {
        for b in &chains[i + 1..] {
            verify_coordination(poset, a, b)?;
        }
    }
    for w in chains.windows(3) {
        let ordered = chains_properly_collinear(poset, &w[1], &w[0], &w[2])?
            && chain_order(poset, &w[1], &w[0], &w[2]).ok().is_some_and(|o| &o[1] == w[1].id());
        if !ordered {
            return Err(GeometryError::NotCollinear([w[0].id().clone(), w[1].id().clone(), w[2].id().clone()]));
        }
    }
    let spacing = chain_distance(poset, &chains[0], &chains[1])?;
    for w in chains.windows(2).skip(1) {
        let d = chain_distance(poset, &w[0], &w[1])?;
        if d != spacing {
            return Err(GeometryError::NonUniformSpacing {
                a: w[0].id().clone(),
                b: w[1].id().clone(),
                expected: format_rational(&spacing),
                found: format_rational(&d),
            });
        }
    }
    Ok(Fence { chains: chains.to_vec(), spacing })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SharedChains {
    None,
    One(ChainId),
    Many(Vec<ChainId>),
}

impl SharedChains {
    pub fn count(&self) -> usize {
        match self {
            SharedChains::None => 0,
            SharedChains::One(_) => 1,
            SharedChains::Many(v) => v.len(),
        }
    }
}

/// Chains of `f1` that also belong to `f2`, in `f1` order.
pub fn shared_chains(f1: &Fence, f2: &Fence) -> SharedChains {
    let mut shared: Vec<ChainId> =
        f1.chains.iter().filter(|c| f2.index_of(c.id()).is_some()).map(|c| c.id().clone()).collect();
    match shared.len() {
        0 => SharedChains::None,
        1 => SharedChains::One(shared.pop().unwrap()),
        _ => SharedChains::Many(shared),
    }
}

/// Outcome of the parallel-postulate check for two fences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelReport {
    pub shared: SharedChains,
    /// Whether the fences agree chain by chain wherever both extend, once
    /// aligned on their shared chains. Trivially true with fewer than two
    /// shared chains.
    pub coincide: bool,
    /// Projection identities replayed per event: for `x` on `P1` with `P2`
    /// shared and `P3`, `P3'` the next chains of each fence,
    /// `P3 x = P3 P2 x`, `P3' x = P3' P2 x`, the backward analogues, and
    /// `P3 P2 x = P3' P2 x`.
    pub replayed_events: usize,
    /// Every replayed identity held.
    pub replay_holds: bool,
}

impl ParallelReport {
    /// Sharing two or more chains implies sharing all of them.
    pub fn holds(&self) -> bool {
        self.shared.count() < 2 || (self.coincide && self.replay_holds)
    }
}

pub fn parallel_postulate_check(poset: &Poset, f1: &Fence, f2: &Fence) -> Result<ParallelReport, GeometryError> {
    if f1.spacing != f2.spacing {
        return Err(GeometryError::SpacingMismatch(format_rational(&f1.spacing), format_rational(&f2.spacing)));
    }
    let shared = shared_chains(f1, f2);
    let mut report = ParallelReport { shared: shared.clone(), coincide: true, replayed_events: 0, replay_holds: true };
    let SharedChains::Many(ids) = shared else { return Ok(report) };

    // align f2 to f1 through the first two shared chains
    let (i0, i1) = (f1.index_of(&ids[0]).unwrap(), f1.index_of(&ids[1]).unwrap());
    let (mut k0, k1) = (f2.index_of(&ids[0]).unwrap(), f2.index_of(&ids[1]).unwrap());
    let mut g = f2.clone();
    if k1 < k0 {
        g = f2.reversed();
        k0 = g.len() - 1 - k0;
    }
    let k1 = g.index_of(&ids[1]).unwrap();
    if k1 - k0 != i1 - i0 {
        report.coincide = false;
        return Ok(report);
    }
    // position in f1 of g's chain at index k is k + offset
    let offset = i0 as isize - k0 as isize;
    let lo = 0isize.max(-offset);
    let hi = (g.len() as isize).min(f1.len() as isize - offset);
    for k in lo..hi {
        if g.chains[k as usize].id() != f1.chains[(k + offset) as usize].id() {
            report.coincide = false;
        }
    }

    // replay along both directions from every shared adjacent pair
    for (a, b) in [(f1.clone(), g.clone()), (f1.reversed(), g.reversed())] {
        let Some(off) = aligned_offset(&a, &b) else { continue };
        for i in 0..a.len().saturating_sub(2) {
            let k = i as isize - off;
            if k < 0 || k as usize + 2 >= b.len() {
                continue;
            }
            let k = k as usize;
            let (p1, p2) = (&a.chains[i], &a.chains[i + 1]);
            if p1.id() != b.chains[k].id() || p2.id() != b.chains[k + 1].id() {
                continue;
            }
            let (p3, p3b) = (&a.chains[i + 2], &b.chains[k + 2]);
            let (n, ok) = replay(poset, p1, p2, p3, p3b);
            report.replayed_events += n;
            report.replay_holds &= ok;
        }
    }
    Ok(report)
}

// Offset `i - k` mapping b's index k to a's index i, from the first chain both share.
fn aligned_offset(a: &Fence, b: &Fence) -> Option<isize> {
    a.chains
        .iter()
        .enumerate()
        .find_map(|(i, c)| b.index_of(c.id()).map(|k| i as isize - k as isize))
}

fn replay(poset: &Poset, p1: &Chain, p2: &Chain, p3: &Chain, p3b: &Chain) -> (usize, bool) {
    let mut n = 0;
    let mut ok = true;
    for &x in p1.elements() {
        let (Some(f2x), Some(b2x)) = (forward_project(poset, x, p2), backward_project(poset, x, p2)) else {
            continue;
        };
        let via = (forward_project(poset, f2x, p3), backward_project(poset, b2x, p3));
        let via_b = (forward_project(poset, f2x, p3b), backward_project(poset, b2x, p3b));
        if via.0.is_none() || via.1.is_none() || via_b.0.is_none() || via_b.1.is_none() {
            continue;
        }
        n += 1;
        ok &= via.0 == forward_project(poset, x, p3) && via.1 == backward_project(poset, x, p3);
        ok &= via_b.0 == forward_project(poset, x, p3b) && via_b.1 == backward_project(poset, x, p3b);
        ok &= via == via_b;
    }
    (n, ok)
}

/// `D(x, P)^2` where `D(x, P) = (v(Px) - v(P̄x)) / 2`.
pub fn event_chain_distance_sq(poset: &Poset, x: EventId, p: &Chain) -> Result<Rational, GeometryError> {
    let d = event_chain_distance(poset, x, p)?;
    Ok(&d * &d)
}

/// Discrete dot product of `[x, y]` with the fence direction from `P` to `Q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DotProduct {
    /// `(D(y,P)^2 - D(x,P)^2 - D(y,Q)^2 + D(x,Q)^2) / (2 D(P,Q))`: the signed
    /// length of `[x, y]` along the fence.
    pub signed: Rational,
    pub magnitude: Rational,
    /// `signed * D(P,Q)`, the dot product of the interval with the leg `PQ`.
    pub scaled: Rational,
    pub chain_distance: Rational,
}

pub fn dot_product(
    poset: &Poset,
    x: EventId,
    y: EventId,
    fence: &Fence,
    p: &ChainId,
    q: &ChainId,
) -> Result<DotProduct, GeometryError> {
    let pi = fence.index_of(p).ok_or_else(|| GeometryError::MissingChain(p.to_string()))?;
    let qi = fence.index_of(q).ok_or_else(|| GeometryError::MissingChain(q.to_string()))?;
    let (cp, cq) = (&fence.chains[pi], &fence.chains[qi]);
    if pi == qi {
        return Err(GeometryError::Collinearity(crate::collinearity::CollinearityError::SameChain(p.clone())));
    }
    for c in [cp, cq] {
        if event_time(poset, x, c)? != event_time(poset, y, c)? {
            return Err(GeometryError::TimeMismatch { x, y, chain: c.id().clone() });
        }
    }
    let d2 = |e, c| event_chain_distance_sq(poset, e, c);
    let dpq = fence.distance(pi, qi);
    let num = d2(y, cp)? - d2(x, cp)? - d2(y, cq)? + d2(x, cq)?;
    let signed = num / (int(2) * &dpq);
    Ok(DotProduct { magnitude: signed.abs(), scaled: &signed * &dpq, signed, chain_distance: dpq })
}

/// True when the dot product agrees over every ordered chain pair `i < j`
/// of the fence.
pub fn dot_is_pair_independent(poset: &Poset, x: EventId, y: EventId, fence: &Fence) -> Result<bool, GeometryError> {
    let ids = fence.ids();
    let mut first: Option<Rational> = None;
    for i in 0..ids.len() {
        for j in i + 1..ids.len() {
            let v = dot_product(poset, x, y, fence, &ids[i], &ids[j])?.signed;
            match &first {
                None => first = Some(v),
                Some(f) if *f != v => return Ok(false),
                _ => {}
            }
        }
    }
    Ok(true)
}
