//! Classification and whole-patch checking.
//!
//! A trilobite's neighbor code is the word over {T, O} read off the three
//! tiles met at its tips; the census tallies those codes over a patch. The
//! validator re-checks a finished region against all three local rules:
//! full coverage, corner tuples, and straight-segment parity.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use crate::atlas::{Decor, Placement, TileKind};
use crate::grid::{cells_touching, corners_of_cell, CellCoord, CornerCoord, ParityClass};

use super::topology::Topology;
use super::{CornerState, Patch};

/// One letter of a neighbor code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Letter {
    T,
    O,
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Letter::T => "T",
            Letter::O => "O",
        })
    }
}

/// The word read at a trilobite's three tips, or `Undetermined` while any
/// tip cell is still uncovered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum NeighborCode {
    Code([Letter; 3]),
    Undetermined,
}

impl NeighborCode {
    pub fn letters(self) -> Option<[Letter; 3]> {
        match self {
            NeighborCode::Code(l) => Some(l),
            NeighborCode::Undetermined => None,
        }
    }

    /// Parse "TTT", "OTO", ... (exactly three letters from {T, O}).
    pub fn parse(s: &str) -> Option<NeighborCode> {
        let mut letters = [Letter::T; 3];
        let mut n = 0;
        for ch in s.chars() {
            if n == 3 {
                return None;
            }
            letters[n] = match ch {
                'T' => Letter::T,
                'O' => Letter::O,
                _ => return None,
            };
            n += 1;
        }
        if n == 3 {
            Some(NeighborCode::Code(letters))
        } else {
            None
        }
    }
}

impl fmt::Display for NeighborCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NeighborCode::Code([a, b, c]) => write!(f, "{a}{b}{c}"),
            NeighborCode::Undetermined => f.write_str("***"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassifyError {
    NotATrilobite { id: u32 },
}

impl fmt::Display for ClassifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassifyError::NotATrilobite { id } => {
                write!(f, "placement {id} is not a trilobite")
            }
        }
    }
}

impl core::error::Error for ClassifyError {}

/// Read the neighbor code of trilobite `id`: the kinds of the occupants of
/// its three tip cells, in the atlas's tip order.
pub fn classify_trilobite(patch: &Patch, id: u32) -> Result<NeighborCode, ClassifyError> {
    let pl = patch.placement(id);
    if pl.kind != TileKind::Trilobite {
        return Err(ClassifyError::NotATrilobite { id });
    }
    let variant = patch.atlas().variant(pl.kind, pl.rot);
    let mut letters = [Letter::T; 3];
    for (i, &off) in variant.tips.iter().enumerate() {
        match patch.occupant(pl.anchor + off) {
            None => return Ok(NeighborCode::Undetermined),
            Some((_, other)) => {
                letters[i] = match other.kind {
                    TileKind::Trilobite => Letter::T,
                    TileKind::Crab => Letter::O,
                }
            }
        }
    }
    Ok(NeighborCode::Code(letters))
}

/// Tally of neighbor codes over (a subset of) a patch's trilobites.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Census {
    counts: BTreeMap<NeighborCode, u64>,
}

impl Census {
    /// Census of every trilobite in the patch.
    pub fn of(patch: &Patch) -> Census {
        Census::filtered(patch, |_| true)
    }

    /// Census of the trilobites whose whole footprint keeps at least
    /// `margin` cells of clearance inside the patch's frame — the window if
    /// there is one, otherwise the bounding box of the covered cells.
    /// On a torus every trilobite counts (there is no boundary).
    pub fn of_interior(patch: &Patch, margin: i64) -> Census {
        if matches!(patch.topology(), Topology::Torus(_)) {
            return Census::of(patch);
        }
        let frame = match patch.window() {
            Some(w) => Some((w.x0, w.y0, w.x1, w.y1)),
            None => cover_bbox(patch),
        };
        let Some((x0, y0, x1, y1)) = frame else {
            return Census::default();
        };
        Census::filtered(patch, |cells| {
            cells.iter().all(|c| {
                c.x >= x0 + margin && c.x < x1 - margin && c.y >= y0 + margin && c.y < y1 - margin
            })
        })
    }

    fn filtered(patch: &Patch, keep: impl Fn(&[CellCoord]) -> bool) -> Census {
        let mut counts: BTreeMap<NeighborCode, u64> = BTreeMap::new();
        for id in 0..patch.placements().len() as u32 {
            let pl = patch.placement(id);
            if pl.kind != TileKind::Trilobite {
                continue;
            }
            let cells: Vec<CellCoord> = patch.atlas().cells_of(pl).collect();
            if !keep(&cells) {
                continue;
            }
            let code = classify_trilobite(patch, id).expect("id filtered to trilobites");
            *counts.entry(code).or_insert(0) += 1;
        }
        Census { counts }
    }

    pub fn get(&self, code: NeighborCode) -> u64 {
        self.counts.get(&code).copied().unwrap_or(0)
    }

    pub fn undetermined(&self) -> u64 {
        self.get(NeighborCode::Undetermined)
    }

    /// Total trilobites counted, including undetermined ones.
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NeighborCode, u64)> + '_ {
        self.counts.iter().map(|(&c, &n)| (c, n))
    }

    /// Do all *determined* codes fall inside `allowed`?
    pub fn determined_subset_of(&self, allowed: &[NeighborCode]) -> bool {
        self.counts.keys().all(|c| match c {
            NeighborCode::Undetermined => true,
            code => allowed.contains(code),
        })
    }
}

/// One failure found by [`validate`] or the super-level axiom checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Violation {
    UncoveredCell { cell: CellCoord },
    CornerViolation {
        at: CornerCoord,
        tuple: [Option<Decor>; 4],
    },
    ParityViolation {
        a: Placement,
        b: Placement,
        parity: ParityClass,
    },
    /// A supertile's designated center child is absent from the fine patch
    /// or sits at the wrong position/orientation.
    SupertileMisaligned {
        supertile: Placement,
        expected_center: Placement,
    },
    /// The super-level skeleton could not even be assembled (overlapping
    /// supertiles or an inconsistent crab dressing) at this cell.
    SupertileAssembly { at: CellCoord },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UncoveredCell { cell } => write!(f, "uncovered cell {cell}"),
            Violation::CornerViolation { at, .. } => write!(f, "corner rule violated at {at}"),
            Violation::ParityViolation { a, b, parity } => write!(
                f,
                "parity ({},{}) violated between trilobites at {} and {}",
                parity.x, parity.y, a.anchor, b.anchor
            ),
            Violation::SupertileMisaligned {
                supertile,
                expected_center,
            } => write!(
                f,
                "supertile at {} lacks its center child at {}",
                supertile.anchor, expected_center.anchor
            ),
            Violation::SupertileAssembly { at } => {
                write!(f, "super-level skeleton inconsistent at {at}")
            }
        }
    }
}

/// The verdict of [`validate`], with everything it checked.
#[derive(Clone, Debug)]
pub struct ValidityReport {
    pub violations: Vec<Violation>,
    pub cells_checked: u64,
    pub corners_checked: u64,
    pub census: Census,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn cover_bbox(patch: &Patch) -> Option<(i64, i64, i64, i64)> {
    let mut it = patch.covered_cells().into_iter();
    let first = it.next()?;
    let (mut x0, mut y0, mut x1, mut y1) = (first.x, first.y, first.x + 1, first.y + 1);
    for c in it {
        x0 = x0.min(c.x);
        y0 = y0.min(c.y);
        x1 = x1.max(c.x + 1);
        y1 = y1.max(c.y + 1);
    }
    Some((x0, y0, x1, y1))
}

/// Check a patch against all three local rules over its natural region:
/// the torus domain, the window, or (for frameless patches such as inflated
/// supertiles) the covered cells themselves.
///
/// * every region cell must be covered (structurally exactly once);
/// * every corner all four of whose quadrant cells exist *and are covered*
///   must be satisfied — plus, in window/torus mode, any interior corner
///   whose partial tuple is already dead;
/// * no two trilobites joined by an all-crab straight segment of cells may
///   disagree with the parity table.
pub fn validate(patch: &Patch) -> ValidityReport {
    let mut violations = Vec::new();

    // Region cells and the corners to check.
    let (cells, corners): (Vec<CellCoord>, BTreeSet<CornerCoord>) = match patch.topology() {
        Topology::Torus(l) => {
            let cells = l.domain_cells();
            let corners = cells
                .iter()
                .flat_map(|&c| corners_of_cell(c))
                .map(|p| patch.canon_corner(p))
                .collect();
            (cells, corners)
        }
        Topology::Plane => match patch.window() {
            Some(w) => (w.cells(), w.interior_corners().into_iter().collect()),
            None => {
                let cells = patch.covered_cells();
                let covered: BTreeSet<CellCoord> = cells.iter().copied().collect();
                let corners = cells
                    .iter()
                    .flat_map(|&c| corners_of_cell(c))
                    .filter(|&p| {
                        cells_touching(p)
                            .into_iter()
                            .all(|n| covered.contains(&n))
                    })
                    .collect();
                (cells, corners)
            }
        },
    };

    for &c in &cells {
        if !patch.is_occupied(c) {
            violations.push(Violation::UncoveredCell { cell: c });
        }
    }
    for &p in &corners {
        let ev = patch.corner_eval(p);
        if ev.state == CornerState::Violated {
            violations.push(Violation::CornerViolation {
                at: p,
                tuple: ev.tuple_so_far,
            });
        }
    }
    for (a, b, parity) in patch.parity_violations_full() {
        violations.push(Violation::ParityViolation { a, b, parity });
    }

    ValidityReport {
        violations,
        cells_checked: cells.len() as u64,
        corners_checked: corners.len() as u64,
        census: Census::of(patch),
    }
}
