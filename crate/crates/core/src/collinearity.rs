//! Collinearity of an event with a pair of chains.
//!
//! For each of `Px`, `P̄x`, `Qx`, `Q̄x` three composition identities are
//! tested; the result is a four-slot [`ProjCode`]. Column digits per slot:
//!
//! | slot | 0            | 1            | 2            |
//! |------|--------------|--------------|--------------|
//! | `Px` | `Px = PQx`   | `Px = PQ̄x`   | `Px = P̄Qx`   |
//! | `P̄x` | `P̄x = P̄Qx`   | `P̄x = P̄Q̄x`   | `P̄x = PQ̄x`   |
//! | `Qx` | `Qx = QPx`   | `Qx = QP̄x`   | `Qx = Q̄Px`   |
//! | `Q̄x` | `Q̄x = Q̄Px`   | `Q̄x = Q̄P̄x`   | `Q̄x = QP̄x`   |
//!
//! Only five fully defined codes describe collinear events: 2201 (x on the
//! P side), 1010 (between), 0122 (on the Q side), 0221 and 2102.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;

use crate::order::{Chain, ChainId, EventId, Poset};
use crate::projection::{backward_project, forward_project, Direction, QuantError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CollinearityError {
    #[error("{event} has no {direction} projection onto chain {chain}")]
    MissingProjection { event: EventId, chain: ChainId, direction: Direction },
    #[error("chains must be distinct, got {0} twice")]
    SameChain(ChainId),
    #[error("events of chain {0} lie on different sides")]
    InconsistentSides(ChainId),
    #[error("{event} of chain {chain} is not properly collinear")]
    NotProperlyCollinear { event: EventId, chain: ChainId },
    #[error("chain {0} has no event with all projections defined")]
    NoClassifiableEvent(ChainId),
}

impl CollinearityError {
    pub(crate) fn into_quant(self) -> QuantError {
        match self {
            CollinearityError::MissingProjection { event, chain, direction } => {
                QuantError::Unquantifiable { event, chain, direction }
            }
            other => QuantError::Collinearity(Box::new(other)),
        }
    }
}

/// Per-slot bitmask of satisfied column identities. Events lying on one of
/// the chains satisfy several identities at once, so a slot may hold more
/// than one digit; a slot with none is undefined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjCode {
    masks: [u8; 4],
}

impl ProjCode {
    /// Code with exactly one digit per slot.
    pub fn from_digits(d: [u8; 4]) -> Self {
        assert!(d.iter().all(|&x| x < 3), "digits are 0, 1 or 2");
        ProjCode { masks: d.map(|x| 1 << x) }
    }

    pub fn from_masks(masks: [u8; 4]) -> Self {
        assert!(masks.iter().all(|&m| m < 8), "masks have three bits");
        ProjCode { masks }
    }

    pub fn masks(&self) -> [u8; 4] {
        self.masks
    }

    /// Exactly one identity holds in every slot.
    pub fn is_fully_defined(&self) -> bool {
        self.masks.iter().all(|m| m.count_ones() == 1)
    }

    /// Some slot satisfies no identity.
    pub fn has_undefined(&self) -> bool {
        self.masks.contains(&0)
    }

    pub fn digits(&self) -> Option<[u8; 4]> {
        if !self.is_fully_defined() {
            return None;
        }
        Some(self.masks.map(|m| m.trailing_zeros() as u8))
    }

    /// Whether every digit of `d` is satisfied in the corresponding slot.
    pub fn admits(&self, d: [u8; 4]) -> bool {
        self.masks.iter().zip(d).all(|(m, x)| m & (1 << x) != 0)
    }

    /// Legal cases whose code is admitted, in classification priority.
    pub fn compatible_cases(&self) -> Vec<CollinearityCase> {
        LEGAL.iter().filter(|(_, d)| self.admits(*d)).map(|(c, _)| *c).collect()
    }

    /// The code of the same event seen in the order-dual poset, where
    /// forward and backward projections trade places.
    pub fn dual(&self) -> ProjCode {
        let [fp, bp, fq, bq] = self.masks;
        ProjCode { masks: [swap01(bp), swap01(fp), swap01(bq), swap01(fq)] }
    }
}

fn swap01(m: u8) -> u8 {
    (m & 0b100) | ((m & 1) << 1) | ((m >> 1) & 1)
}

impl fmt::Display for ProjCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in self.masks {
            match m.count_ones() {
                0 => f.write_str("U")?,
                1 => write!(f, "{}", m.trailing_zeros())?,
                _ => {
                    f.write_str("(")?;
                    for d in 0..3 {
                        if m & (1 << d) != 0 {
                            write!(f, "{d}")?;
                        }
                    }
                    f.write_str(")")?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CollinearityCase {
    CaseI,
    CaseII,
    CaseIII,
    CaseIV,
    CaseV,
    NotCollinear,
}

impl CollinearityCase {
    pub fn code(self) -> Option<ProjCode> {
        LEGAL.iter().find(|(c, _)| *c == self).map(|(_, d)| ProjCode::from_digits(*d))
    }

    /// Cases I, II and III survive reversal of the order.
    pub fn is_proper(self) -> bool {
        matches!(self, CollinearityCase::CaseI | CollinearityCase::CaseII | CollinearityCase::CaseIII)
    }

    /// The case the dual poset assigns.
    pub fn dual(self) -> Self {
        match self {
            CollinearityCase::CaseIV => CollinearityCase::CaseV,
            CollinearityCase::CaseV => CollinearityCase::CaseIV,
            c => c,
        }
    }
}

/// Legal codes, in the order ambiguous events are resolved: an event lying
/// on a chain is treated as between the two chains.
pub const LEGAL: [(CollinearityCase, [u8; 4]); 5] = [
    (CollinearityCase::CaseII, [1, 0, 1, 0]),
    (CollinearityCase::CaseI, [2, 2, 0, 1]),
    (CollinearityCase::CaseIII, [0, 1, 2, 2]),
    (CollinearityCase::CaseIV, [0, 2, 2, 1]),
    (CollinearityCase::CaseV, [2, 1, 0, 2]),
];

pub fn is_legal_code(code: &ProjCode) -> bool {
    code.digits().is_some_and(|d| LEGAL.iter().any(|(_, l)| *l == d))
}

fn need(
    poset: &Poset,
    x: EventId,
    c: &Chain,
    dir: Direction,
) -> Result<EventId, CollinearityError> {
    let r = match dir {
        Direction::Forward => forward_project(poset, x, c),
        Direction::Backward => backward_project(poset, x, c),
    };
    r.ok_or_else(|| CollinearityError::MissingProjection { event: x, chain: c.id().clone(), direction: dir })
}

pub fn projection_code(poset: &Poset, x: EventId, p: &Chain, q: &Chain) -> Result<ProjCode, CollinearityError> {
    if p.id() == q.id() {
        return Err(CollinearityError::SameChain(p.id().clone()));
    }
    use Direction::{Backward as B, Forward as F};
    let px = need(poset, x, p, F)?;
    let bpx = need(poset, x, p, B)?;
    let qx = need(poset, x, q, F)?;
    let bqx = need(poset, x, q, B)?;

    let fwd = |e: EventId, c: &Chain| forward_project(poset, e, c);
    let bwd = |e: EventId, c: &Chain| backward_project(poset, e, c);
    let mask = |target: EventId, cands: [Option<EventId>; 3]| -> u8 {
        cands.iter().enumerate().fold(0, |m, (i, c)| if *c == Some(target) { m | (1 << i) } else { m })
    };

    Ok(ProjCode {
        masks: [
            mask(px, [fwd(qx, p), fwd(bqx, p), bwd(qx, p)]),
            mask(bpx, [bwd(qx, p), bwd(bqx, p), fwd(bqx, p)]),
            mask(qx, [fwd(px, q), fwd(bpx, q), bwd(px, q)]),
            mask(bqx, [bwd(px, q), bwd(bpx, q), fwd(bpx, q)]),
        ],
    })
}

pub fn classify_code(code: &ProjCode) -> CollinearityCase {
    code.compatible_cases().first().copied().unwrap_or(CollinearityCase::NotCollinear)
}

pub fn classify_collinearity(
    poset: &Poset,
    x: EventId,
    p: &Chain,
    q: &Chain,
) -> Result<CollinearityCase, CollinearityError> {
    projection_code(poset, x, p, q).map(|c| classify_code(&c))
}

pub fn is_properly_collinear(poset: &Poset, x: EventId, p: &Chain, q: &Chain) -> Result<bool, CollinearityError> {
    Ok(classify_collinearity(poset, x, p, q)?.is_proper())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    PSide,
    Between,
    QSide,
    Neither,
}

impl Side {
    pub fn from_case(c: CollinearityCase) -> Side {
        match c {
            CollinearityCase::CaseI => Side::PSide,
            CollinearityCase::CaseII => Side::Between,
            CollinearityCase::CaseIII => Side::QSide,
            _ => Side::Neither,
        }
    }

    /// The same side with the roles of the two chains exchanged.
    pub fn swapped(self) -> Side {
        match self {
            Side::PSide => Side::QSide,
            Side::QSide => Side::PSide,
            s => s,
        }
    }
}

pub fn side_of(poset: &Poset, x: EventId, p: &Chain, q: &Chain) -> Result<Side, CollinearityError> {
    classify_collinearity(poset, x, p, q).map(Side::from_case)
}

/// Whether `x` lies in the subspace spanned by `p` and `q`. Missing
/// projections mean no.
pub fn in_subspace(poset: &Poset, x: EventId, p: &Chain, q: &Chain) -> bool {
    is_properly_collinear(poset, x, p, q).unwrap_or(false)
}

fn classifiable(poset: &Poset, x: EventId, p: &Chain, q: &Chain) -> bool {
    [p, q].iter().all(|c| forward_project(poset, x, c).is_some() && backward_project(poset, x, c).is_some())
}

/// Orders three chains along their common line. The direction is fixed by
/// putting first whichever outer chain `X`'s position singles out: `X|P|Q`
/// gives `[X, P, Q]`, `P|X|Q` gives `[P, X, Q]`, `P|Q|X` gives `[P, Q, X]`.
/// Events of `X` outside the reach of `P` or `Q` are ignored.
pub fn chain_order(
    poset: &Poset,
    x: &Chain,
    p: &Chain,
    q: &Chain,
) -> Result<[ChainId; 3], CollinearityError> {
    distinct(x, p, q)?;
    let mut side = None;
    for &e in x.elements() {
        if !classifiable(poset, e, p, q) {
            continue;
        }
        let s = side_of(poset, e, p, q)?;
        if s == Side::Neither {
            return Err(CollinearityError::NotProperlyCollinear { event: e, chain: x.id().clone() });
        }
        match side {
            None => side = Some(s),
            Some(prev) if prev != s => return Err(CollinearityError::InconsistentSides(x.id().clone())),
            _ => {}
        }
    }
    let (xi, pi, qi) = (x.id().clone(), p.id().clone(), q.id().clone());
    match side {
        Some(Side::PSide) => Ok([xi, pi, qi]),
        Some(Side::Between) => Ok([pi, xi, qi]),
        Some(Side::QSide) => Ok([pi, qi, xi]),
        _ => Err(CollinearityError::NoClassifiableEvent(x.id().clone())),
    }
}

fn distinct(x: &Chain, p: &Chain, q: &Chain) -> Result<(), CollinearityError> {
    if x.id() == p.id() || x.id() == q.id() {
        return Err(CollinearityError::SameChain(x.id().clone()));
    }
    if p.id() == q.id() {
        return Err(CollinearityError::SameChain(p.id().clone()));
    }
    Ok(())
}

/// Whether chain `X` is properly collinear with `P` and `Q`: every event of
/// `X` within reach of both chains is properly collinear, and each of the
/// four projections maps those events onto a gap-free run of the target
/// chain.
pub fn chains_properly_collinear(
    poset: &Poset,
    x: &Chain,
    p: &Chain,
    q: &Chain,
) -> Result<bool, CollinearityError> {
    distinct(x, p, q)?;
    let events: Vec<EventId> = x.elements().iter().copied().filter(|&e| classifiable(poset, e, p, q)).collect();
    if events.is_empty() {
        return Ok(false);
    }
    for &e in &events {
        if !is_properly_collinear(poset, e, p, q)? {
            return Ok(false);
        }
    }
    for c in [p, q] {
        for dir in [Direction::Forward, Direction::Backward] {
            let image: BTreeSet<usize> = events
                .iter()
                .map(|&e| {
                    let t = need(poset, e, c, dir).expect("classifiable event");
                    c.position(t).expect("projection lies on chain")
                })
                .collect();
            let (lo, hi) = (image.first().copied().unwrap(), image.last().copied().unwrap());
            if image.len() != hi - lo + 1 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Histogram of projection codes over every event and chain pair.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Census {
    pub codes: BTreeMap<ProjCode, usize>,
    /// (event, pair) combinations where some projection is missing.
    pub missing: usize,
    pub pairs: usize,
}

impl Census {
    pub fn total(&self) -> usize {
        self.codes.values().sum()
    }

    /// Fully defined codes outside the five legal ones.
    pub fn illegal_codes(&self) -> Vec<(ProjCode, usize)> {
        self.codes
            .iter()
            .filter(|(c, _)| c.is_fully_defined() && !is_legal_code(c))
            .map(|(c, n)| (*c, *n))
            .collect()
    }

    pub fn fully_defined_count(&self) -> usize {
        self.codes.iter().filter(|(c, _)| c.is_fully_defined()).map(|(_, n)| n).sum()
    }

    pub fn legal_codes_only(&self) -> bool {
        self.illegal_codes().is_empty()
    }

    /// Counts per classified case.
    pub fn cases(&self) -> BTreeMap<CollinearityCase, usize> {
        let mut out = BTreeMap::new();
        for (c, n) in &self.codes {
            *out.entry(classify_code(c)).or_insert(0) += n;
        }
        out
    }

    /// `code,count` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("code,count\n");
        for (c, n) in &self.codes {
            s.push_str(&format!("{c},{n}\n"));
        }
        s
    }

    fn merge(mut self, other: Census) -> Census {
        for (c, n) in other.codes {
            *self.codes.entry(c).or_insert(0) += n;
        }
        self.missing += other.missing;
        self
    }
}

/// Codes every event against every given chain pair. Identical pairs are
/// skipped.
pub fn census(poset: &Poset, pairs: &[(&Chain, &Chain)]) -> Census {
    let pairs: Vec<_> = pairs.iter().filter(|(p, q)| p.id() != q.id()).collect();
    let events = poset.events();
    let mut out = pairs
        .par_iter()
        .flat_map_iter(|(p, q)| events.iter().map(move |&e| (e, *p, *q)))
        .fold(Census::default, |mut acc, (e, p, q)| {
            match projection_code(poset, e, p, q) {
                Ok(code) => *acc.codes.entry(code).or_insert(0) += 1,
                Err(_) => acc.missing += 1,
            }
            acc
        })
        .reduce(Census::default, Census::merge);
    out.pairs = pairs.len();
    out
}

/// Every unordered pair of distinct chains.
pub fn all_pairs(chains: &[Chain]) -> Vec<(&Chain, &Chain)> {
    let mut out = Vec::new();
    for (i, p) in chains.iter().enumerate() {
        for q in &chains[i + 1..] {
            out.push((p, q));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::lattice_1p1;

    fn digits(code: ProjCode) -> [u8; 4] {
        code.digits().unwrap()
    }

    #[test]
    fn codes_in_the_lattice() {
        let l = lattice_1p1(10, 40).unwrap();
        let (p, q) = (l.chain("3").unwrap(), l.chain("6").unwrap());
        let code = |pos: &str| projection_code(&l.poset, l.event(pos, 20).unwrap(), p, q).unwrap();
        assert_eq!(digits(code("4")), [1, 0, 1, 0]);
        assert_eq!(digits(code("2")), [2, 2, 0, 1]);
        assert_eq!(digits(code("8")), [0, 1, 2, 2]);

        let l5 = lattice_1p1(5, 20).unwrap();
        let (p, q) = (l5.chain("0").unwrap(), l5.chain("5").unwrap());
        let c = projection_code(&l5.poset, l5.event("2", 10).unwrap(), p, q).unwrap();
        assert_eq!(digits(c), [1, 0, 1, 0]);
    }

    #[test]
    fn events_on_a_chain_are_ambiguous_but_between() {
        let l = lattice_1p1(6, 30).unwrap();
        let (p, q) = (l.chain("3").unwrap(), l.chain("6").unwrap());
        let on_p = l.event("3", 15).unwrap();
        let code = projection_code(&l.poset, on_p, p, q).unwrap();
        assert!(!code.is_fully_defined());
        assert_eq!(code.compatible_cases(), vec![CollinearityCase::CaseII, CollinearityCase::CaseI]);
        assert_eq!(side_of(&l.poset, on_p, p, q).unwrap(), Side::Between);
        let on_q = l.event("6", 15).unwrap();
        let code = projection_code(&l.poset, on_q, p, q).unwrap();
        assert_eq!(code.compatible_cases(), vec![CollinearityCase::CaseII, CollinearityCase::CaseIII]);
    }

    #[test]
    fn same_chain_rejected() {
        let l = lattice_1p1(2, 5).unwrap();
        let p = l.chain("0").unwrap();
        assert_eq!(
            projection_code(&l.poset, l.event("1", 2).unwrap(), p, p),
            Err(CollinearityError::SameChain(p.id().clone()))
        );
    }

    #[test]
    fn missing_projection_reported() {
        let l = lattice_1p1(4, 10).unwrap();
        let (p, q) = (l.chain("0").unwrap(), l.chain("1").unwrap());
        let top = l.event("4", 10).unwrap();
        assert!(matches!(
            projection_code(&l.poset, top, p, q),
            Err(CollinearityError::MissingProjection { .. })
        ));
        assert!(!in_subspace(&l.poset, top, p, q));
    }

    #[test]
    fn classification_of_codes() {
        assert_eq!(classify_code(&ProjCode::from_digits([1, 0, 1, 0])), CollinearityCase::CaseII);
        assert_eq!(classify_code(&ProjCode::from_digits([0, 1, 2, 2])), CollinearityCase::CaseIII);
        assert_eq!(classify_code(&ProjCode::from_digits([0, 2, 2, 1])), CollinearityCase::CaseIV);
        assert_eq!(classify_code(&ProjCode::from_masks([2, 1, 0, 4])), CollinearityCase::NotCollinear);
        assert_eq!(classify_code(&ProjCode::from_digits([0, 0, 0, 0])), CollinearityCase::NotCollinear);
        assert!(!CollinearityCase::CaseIV.is_proper());
        assert!(CollinearityCase::CaseII.is_proper());
    }

    #[test]
    fn display_marks_ambiguity() {
        assert_eq!(ProjCode::from_digits([2, 2, 0, 1]).to_string(), "2201");
        assert_eq!(ProjCode::from_masks([0b110, 0b011, 0, 1]).to_string(), "(12)(01)U0");
    }

    #[test]
    fn dual_code_map() {
        use CollinearityCase::*;
        for (case, d) in LEGAL {
            let dual = ProjCode::from_digits(d).dual();
            assert_eq!(classify_code(&dual), case.dual(), "{case:?}");
        }
        assert_eq!(CaseIV.dual(), CaseV);
    }

    #[test]
    fn sides_swap_with_chains() {
        let l = lattice_1p1(10, 40).unwrap();
        let (p, q) = (l.chain("3").unwrap(), l.chain("6").unwrap());
        for pos in ["1", "2", "4", "5", "7", "9"] {
            let x = l.event(pos, 20).unwrap();
            assert_eq!(side_of(&l.poset, x, p, q).unwrap().swapped(), side_of(&l.poset, x, q, p).unwrap());
        }
    }

    #[test]
    fn ordering_three_chains() {
        let l = lattice_1p1(7, 30).unwrap();
        let c = |id: &str| l.chain(id).unwrap();
        let ids = |v: [&str; 3]| v.map(ChainId::from);
        assert_eq!(chain_order(&l.poset, c("1"), c("3"), c("6")).unwrap(), ids(["1", "3", "6"]));
        assert_eq!(chain_order(&l.poset, c("6"), c("3"), c("1")).unwrap(), ids(["6", "3", "1"]));
        assert_eq!(chain_order(&l.poset, c("4"), c("3"), c("6")).unwrap(), ids(["3", "4", "6"]));
        assert_eq!(chain_order(&l.poset, c("7"), c("3"), c("6")).unwrap(), ids(["3", "6", "7"]));
    }

    #[test]
    fn chain_triples() {
        let l = lattice_1p1(4, 30).unwrap();
        let c = |id: &str| l.chain(id).unwrap();
        assert!(chains_properly_collinear(&l.poset, c("1"), c("0"), c("2")).unwrap());
        assert!(chains_properly_collinear(&l.poset, c("0"), c("1"), c("2")).unwrap());
        assert!(matches!(
            chains_properly_collinear(&l.poset, c("1"), c("1"), c("2")),
            Err(CollinearityError::SameChain(_))
        ));
    }

    #[test]
    fn census_of_small_lattice() {
        let l = lattice_1p1(4, 20).unwrap();
        let pairs = all_pairs(&l.chains);
        let c = census(&l.poset, &pairs);
        assert_eq!(c.pairs, 10);
        assert_eq!(c.total() + c.missing, 10 * l.poset.len());
        assert!(c.legal_codes_only());
        assert!(c.fully_defined_count() > 0);
        let single = lattice_1p1(0, 5).unwrap();
        assert_eq!(census(&single.poset, &all_pairs(&single.chains)).total(), 0);
    }
}
