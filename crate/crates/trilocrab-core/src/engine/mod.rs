//! Patches, placement legality, forced-move propagation, exhaustive search,
//! validation, neighbor-code classification, and torus search.
//!
//! A [`Patch`] is a partial assignment of tile placements to the grid (or a
//! torus quotient of it). Everything above `place` is built from one
//! primitive question — *which single placements are legal at this cell or
//! corner?* — answered by [`Patch::legal_completions`] and checked against a
//! deliberately naive reimplementation in the test suite.

mod analyze;
mod patch;
mod propagate;
mod search;
pub mod topology;
mod trace;

pub use analyze::{classify_trilobite, validate, Census, ClassifyError, Letter, NeighborCode, ValidityReport, Violation};
pub use patch::{Patch, QuadrantInfo};
pub use propagate::{propagate, propagate_shuffled, PropagateOutcome};
pub use search::{search_region, Budget, SearchMode, SearchOutcome, Verdict};
pub use topology::{enumerate_bases, DegenerateBasis, Topology, TorusLattice, TorusSpec};
pub use trace::{replay, DeductionTrace, ReplayError, ReplayOutcome, SubcaseOutcome, TraceStep};

use crate::grid::{CellCoord, CornerCoord, ParityClass};
use crate::atlas::{Decor, Placement};
use core::fmt;

/// A rectangular cell region, half open: `x0 <= x < x1`, `y0 <= y < y1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub x0: i64,
    pub y0: i64,
    pub x1: i64,
    pub y1: i64,
}

impl Window {
    pub fn new(x0: i64, y0: i64, x1: i64, y1: i64) -> Window {
        Window { x0, y0, x1, y1 }
    }

    pub fn contains(&self, c: CellCoord) -> bool {
        c.x >= self.x0 && c.x < self.x1 && c.y >= self.y0 && c.y < self.y1
    }

    /// All window cells in canonical (x-major, then y) order.
    pub fn cells(&self) -> alloc::vec::Vec<CellCoord> {
        let mut out = alloc::vec::Vec::new();
        for x in self.x0..self.x1 {
            for y in self.y0..self.y1 {
                out.push(crate::grid::cell(x, y));
            }
        }
        out
    }

    /// Lattice points all four of whose incident cells lie inside.
    pub fn interior_corners(&self) -> alloc::vec::Vec<CornerCoord> {
        let mut out = alloc::vec::Vec::new();
        for x in self.x0 + 1..self.x1 {
            for y in self.y0 + 1..self.y1 {
                out.push(crate::grid::corner(x, y));
            }
        }
        out
    }

    pub fn grow(&self, margin: i64) -> Window {
        Window::new(self.x0 - margin, self.y0 - margin, self.x1 + margin, self.y1 + margin)
    }

    pub fn area(&self) -> i64 {
        (self.x1 - self.x0).max(0) * (self.y1 - self.y0).max(0)
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{})x[{},{})", self.x0, self.x1, self.y0, self.y1)
    }
}

/// May placements poke out of the window? CLOSED treats the window as the
/// whole universe; OPEN treats it as a region of interest inside an
/// unbounded plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryPolicy {
    Open,
    Closed,
}

/// Something a deduction can be about: covering a cell, or satisfying the
/// corner rule at a lattice point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Target {
    Cell(CellCoord),
    Corner(CornerCoord),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Cell(c) => write!(f, "cell {c}"),
            Target::Corner(p) => write!(f, "corner {p}"),
        }
    }
}

/// Status of the corner rule at one lattice point.
///
/// `Violated` covers both a fully determined disallowed tuple and a partial
/// tuple that no allowed tuple extends. `Uncoverable` is the geometric
/// refinement — the labels could still work but some incident cell admits no
/// legal placement — and is only produced by the deep probe used in reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CornerState {
    Undetermined,
    Satisfied,
    Violated,
    Uncoverable,
}

/// The result of inspecting one corner: its state plus the partial tuple,
/// indexed NE, NW, SW, SE.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CornerEval {
    pub state: CornerState,
    pub tuple_so_far: [Option<Decor>; 4],
    /// False when some incident cell lies outside a CLOSED window; such
    /// boundary corners are exempt from the rule.
    pub interior: bool,
}

/// Why a placement was rejected.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlaceError {
    Overlap(CellCoord),
    OutOfWindow(CellCoord),
    /// A fully determined corner tuple became disallowed.
    ImmediateCornerViolation(CornerCoord),
    /// A crab-separated trilobite pair landed outside the parity table.
    ParityViolation {
        a: Placement,
        b: Placement,
        parity: ParityClass,
    },
}

impl fmt::Display for PlaceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaceError::Overlap(c) => write!(f, "cell {c} already covered"),
            PlaceError::OutOfWindow(c) => write!(f, "cell {c} outside closed window"),
            PlaceError::ImmediateCornerViolation(p) => {
                write!(f, "corner rule violated at {p}")
            }
            PlaceError::ParityViolation { a, b, parity } => {
                write!(f, "parity rule violated between {a} and {b} ({parity})")
            }
        }
    }
}

impl core::error::Error for PlaceError {}
