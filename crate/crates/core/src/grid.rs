//! Grids of chains, orthogonality, the discrete wedge product and the
//! geometric-product identity `|xy|^2 |leg|^2 = dot^2 + wedge^2`.

use std::collections::HashMap;

use num_traits::Zero;
use rayon::prelude::*;

use crate::coordination::GeometryError;
use crate::fence::{dot_product, event_chain_distance_sq, shared_chains, validate_fence, Fence, SharedChains};
use crate::order::{Chain, ChainId, EventId, Poset};
use crate::projection::event_chain_distance;
use crate::rational::{format_rational, int, Rational};

/// `m x n` chains whose rows and whose columns are parallel fences.
#[derive(Debug, Clone)]
pub struct Grid {
    chains: Vec<Vec<Chain>>,
    rows: Vec<Fence>,
    cols: Vec<Fence>,
    cell: HashMap<ChainId, (usize, usize)>,
}

impl Grid {
    pub fn rows(&self) -> &[Fence] {
        &self.rows
    }

    pub fn cols(&self) -> &[Fence] {
        &self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.cols.len())
    }

    pub fn chain(&self, i: usize, k: usize) -> &Chain {
        &self.chains[i][k]
    }

    /// Row and column of a chain.
    pub fn cell_of(&self, id: &ChainId) -> Option<(usize, usize)> {
        self.cell.get(id).copied()
    }

    /// Row and column of the grid chain holding `e`.
    pub fn locate(&self, e: EventId) -> Option<(usize, usize)> {
        for (i, row) in self.chains.iter().enumerate() {
            for (k, c) in row.iter().enumerate() {
                if c.contains(e) {
                    return Some((i, k));
                }
            }
        }
        None
    }

    /// Distance between adjacent columns.
    pub fn col_spacing(&self) -> &Rational {
        self.rows[0].spacing()
    }

    /// Distance between adjacent rows.
    pub fn row_spacing(&self) -> &Rational {
        self.cols[0].spacing()
    }

    /// Squared distance between two cells assuming right angles.
    pub fn orthogonal_sq_dist(&self, a: (usize, usize), b: (usize, usize)) -> Rational {
        let dr = self.row_spacing() * int(a.0.abs_diff(b.0) as i64);
        let dc = self.col_spacing() * int(a.1.abs_diff(b.1) as i64);
        &dr * &dr + &dc * &dc
    }
}

/// Validates every row and column as a fence and checks that no chain is
/// shared between two rows or two columns.
pub fn validate_grid(poset: &Poset, chains: Vec<Vec<Chain>>) -> Result<Grid, GeometryError> {
    let m = chains.len();
    let n = chains.first().map_or(0, Vec::len);
    if m < 3 || n < 3 || chains.iter().any(|r| r.len() != n) {
        return Err(GeometryError::GridTooSmall(m, n));
    }
    let cols_raw: Vec<Vec<Chain>> = (0..n).map(|k| chains.iter().map(|r| r[k].clone()).collect()).collect();
    let rows: Vec<Fence> = chains.par_iter().map(|r| validate_fence(poset, r)).collect::<Result<_, _>>()?;
    let cols: Vec<Fence> = cols_raw.par_iter().map(|c| validate_fence(poset, c)).collect::<Result<_, _>>()?;
    for family in [&rows, &cols] {
        for (a, f) in family.iter().enumerate() {
            for g in &family[a + 1..] {
                match shared_chains(f, g) {
                    SharedChains::None => {}
                    SharedChains::One(id) => return Err(GeometryError::NotParallel(id)),
                    SharedChains::Many(ids) => return Err(GeometryError::NotParallel(ids[0].clone())),
                }
            }
        }
    }
    let mut cell = HashMap::new();
    for (i, r) in chains.iter().enumerate() {
        for (k, c) in r.iter().enumerate() {
            cell.insert(c.id().clone(), (i, k));
        }
    }
    Ok(Grid { chains, rows, cols, cell })
}

/// Whether `D(P_ik, P_jl)^2 = D(P_ik, P_il)^2 + D(P_il, P_jl)^2` for every
/// choice of cells, with squared chain distances supplied by `sq_dist`.
pub fn is_orthogonal_grid(
    grid: &Grid,
    sq_dist: impl Fn(&ChainId, &ChainId) -> Option<Rational>,
) -> Result<bool, GeometryError> {
    let (m, n) = grid.shape();
    let d = |a: (usize, usize), b: (usize, usize)| {
        let (x, y) = (grid.chain(a.0, a.1).id(), grid.chain(b.0, b.1).id());
        sq_dist(x, y).ok_or_else(|| GeometryError::MissingChain(format!("{x}/{y}")))
    };
    for i in 0..m {
        for k in 0..n {
            for j in 0..m {
                for l in 0..n {
                    if d((i, k), (j, l))? != d((i, k), (i, l))? + d((i, l), (j, l))? {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

type Cell = (usize, usize);

fn leg(grid: &Grid, pik: &ChainId, pil: &ChainId) -> Result<(Cell, Cell), GeometryError> {
    let a = grid.cell_of(pik).ok_or_else(|| GeometryError::NotInGrid(pik.clone()))?;
    let b = grid.cell_of(pil).ok_or_else(|| GeometryError::NotInGrid(pil.clone()))?;
    if a.0 != b.0 || a.1 == b.1 {
        return Err(GeometryError::NotCollinear([pik.clone(), pil.clone(), pil.clone()]));
    }
    Ok((a, b))
}

fn place(grid: &Grid, e: EventId) -> Result<(usize, usize), GeometryError> {
    grid.locate(e).ok_or_else(|| GeometryError::NotInGrid(ChainId::new(e.to_string())))
}

/// Height of a grid event above the first row, measured intrinsically
/// against the first-row chain of its own column.
fn row_height(poset: &Poset, grid: &Grid, e: EventId) -> Result<Rational, GeometryError> {
    let (i, k) = place(grid, e)?;
    let d = event_chain_distance(poset, e, grid.chain(0, k))?;
    let expected = grid.row_spacing() * int(i as i64);
    if d != expected {
        return Err(GeometryError::AlignmentError {
            what: format!("height of {e}"),
            quantified: format_rational(&(&d * &d)),
            expected: format_rational(&(&expected * &expected)),
        });
    }
    Ok(d)
}

/// Signed area spanned by the leg `P_ik -> P_il` and the interval `[x, y]`:
/// the signed leg length times the change in height from `x` to `y`.
pub fn wedge_product(
    poset: &Poset,
    x: EventId,
    y: EventId,
    grid: &Grid,
    pik: &ChainId,
    pil: &ChainId,
) -> Result<Rational, GeometryError> {
    let ((_, k), (_, l)) = leg(grid, pik, pil)?;
    let signed_leg = grid.col_spacing() * int(l as i64 - k as i64);
    Ok(signed_leg * (row_height(poset, grid, y)? - row_height(poset, grid, x)?))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeometricProduct {
    /// `D(x,y)^2` from the grid legs.
    pub interval_sq: Rational,
    /// `D(P_ik, P_il)^2`.
    pub leg_sq: Rational,
    /// Dot product of the interval with the leg.
    pub dot: Rational,
    pub wedge: Rational,
}

impl GeometricProduct {
    pub fn holds(&self) -> bool {
        &self.interval_sq * &self.leg_sq == &self.dot * &self.dot + &self.wedge * &self.wedge
    }
}

/// Evaluates both sides of `D(x,y)^2 D(P_ik,P_il)^2 = dot^2 + wedge^2`.
/// Every event-chain distance the dot product consumes is checked against
/// the grid geometry, so a misaligned layout is an error rather than a
/// false negative.
pub fn geometric_product(
    poset: &Poset,
    x: EventId,
    y: EventId,
    grid: &Grid,
    pik: &ChainId,
    pil: &ChainId,
) -> Result<GeometricProduct, GeometryError> {
    let (a, b) = leg(grid, pik, pil)?;
    let (cx, cy) = (place(grid, x)?, place(grid, y)?);
    for (e, ce) in [(x, cx), (y, cy)] {
        for c in [a, b] {
            let quantified = event_chain_distance_sq(poset, e, grid.chain(c.0, c.1))?;
            let expected = grid.orthogonal_sq_dist(ce, c);
            if quantified != expected {
                return Err(GeometryError::AlignmentError {
                    what: format!("{e} to {}", grid.chain(c.0, c.1).id()),
                    quantified: format_rational(&quantified),
                    expected: format_rational(&expected),
                });
            }
        }
    }
    let dot = dot_product(poset, x, y, &grid.rows[a.0], pik, pil)?.scaled;
    let wedge = wedge_product(poset, x, y, grid, pik, pil)?;
    let leg_len = grid.col_spacing() * int(a.1.abs_diff(b.1) as i64);
    Ok(GeometricProduct { interval_sq: grid.orthogonal_sq_dist(cx, cy), leg_sq: &leg_len * &leg_len, dot, wedge })
}

pub fn geometric_identity_check(
    poset: &Poset,
    x: EventId,
    y: EventId,
    grid: &Grid,
    pik: &ChainId,
    pil: &ChainId,
) -> Result<bool, GeometryError> {
    let g = geometric_product(poset, x, y, grid, pik, pil)?;
    Ok(g.holds() && (x != y || (g.dot.is_zero() && g.wedge.is_zero())))
}
