//! Square-grid shorthand: cells, lattice corners, quarter-turn rotations,
//! rigid transforms, and Z2xZ2 parity classes.
//!
//! A cell `(x, y)` is the closed unit square `[x, x+1] x [y, y+1]`; a corner
//! `(x, y)` is the lattice point shared by the four cells diagonally around
//! it. All matching structure in this crate lives on these two index sets.

use core::fmt;
use core::ops::{Add, Neg, Sub};

/// Integer coordinate of a unit cell; the cell occupies `[x, x+1] x [y, y+1]`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct CellCoord {
    pub x: i64,
    pub y: i64,
}

/// Integer coordinate of a lattice point (a cell corner).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct CornerCoord {
    pub x: i64,
    pub y: i64,
}

/// Free Z^2 vector, used for displacements between anchors or corners.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Vec2 {
    pub x: i64,
    pub y: i64,
}

pub const fn cell(x: i64, y: i64) -> CellCoord {
    CellCoord { x, y }
}

pub const fn corner(x: i64, y: i64) -> CornerCoord {
    CornerCoord { x, y }
}

pub const fn vec2(x: i64, y: i64) -> Vec2 {
    Vec2 { x, y }
}

impl fmt::Display for CellCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

impl fmt::Display for CornerCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

impl Add<Vec2> for CellCoord {
    type Output = CellCoord;
    fn add(self, v: Vec2) -> CellCoord {
        cell(self.x + v.x, self.y + v.y)
    }
}

impl Add<Vec2> for CornerCoord {
    type Output = CornerCoord;
    fn add(self, v: Vec2) -> CornerCoord {
        corner(self.x + v.x, self.y + v.y)
    }
}

impl Sub for CellCoord {
    type Output = Vec2;
    fn sub(self, o: CellCoord) -> Vec2 {
        vec2(self.x - o.x, self.y - o.y)
    }
}

impl Sub for CornerCoord {
    type Output = Vec2;
    fn sub(self, o: CornerCoord) -> Vec2 {
        vec2(self.x - o.x, self.y - o.y)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        vec2(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        vec2(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        vec2(-self.x, -self.y)
    }
}

/// The four cells that share the lattice point `c`, in the fixed order
/// SW, SE, NW, NE of their position relative to the point.
///
/// Corner `(0,0)` touches cells `(-1,-1)`, `(0,-1)`, `(-1,0)`, `(0,0)`.
pub fn cells_touching(c: CornerCoord) -> [CellCoord; 4] {
    [
        cell(c.x - 1, c.y - 1),
        cell(c.x, c.y - 1),
        cell(c.x - 1, c.y),
        cell(c.x, c.y),
    ]
}

/// The four lattice points of the closed unit square of `c`,
/// in the order SW, SE, NW, NE.
pub fn corners_of_cell(c: CellCoord) -> [CornerCoord; 4] {
    [
        corner(c.x, c.y),
        corner(c.x + 1, c.y),
        corner(c.x, c.y + 1),
        corner(c.x + 1, c.y + 1),
    ]
}

/// Position of a cell relative to a lattice point it touches.
///
/// Corner-rule tuples are indexed in the order NE, NW, SW, SE.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Quadrant {
    Ne = 0,
    Nw = 1,
    Sw = 2,
    Se = 3,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [Quadrant::Ne, Quadrant::Nw, Quadrant::Sw, Quadrant::Se];

    /// The cell in this quadrant of lattice point `p`.
    pub fn cell_at(self, p: CornerCoord) -> CellCoord {
        match self {
            Quadrant::Ne => cell(p.x, p.y),
            Quadrant::Nw => cell(p.x - 1, p.y),
            Quadrant::Sw => cell(p.x - 1, p.y - 1),
            Quadrant::Se => cell(p.x, p.y - 1),
        }
    }

    /// Which quadrant of lattice point `p` the cell `c` occupies, if any.
    pub fn of_cell(p: CornerCoord, c: CellCoord) -> Option<Quadrant> {
        Quadrant::ALL.into_iter().find(|q| q.cell_at(p) == c)
    }

    /// Image of this quadrant position under a counterclockwise rotation.
    pub fn rotated(self, r: Rotation) -> Quadrant {
        // One CCW quarter turn sends NE->NW->SW->SE->NE.
        const CYCLE: [Quadrant; 4] = [Quadrant::Ne, Quadrant::Nw, Quadrant::Sw, Quadrant::Se];
        let i = self as u8;
        CYCLE[((i + r.quarter_turns()) % 4) as usize]
    }

    pub fn name(self) -> &'static str {
        match self {
            Quadrant::Ne => "NE",
            Quadrant::Nw => "NW",
            Quadrant::Sw => "SW",
            Quadrant::Se => "SE",
        }
    }
}

/// Counterclockwise quarter-turn rotation: 0..=3 quarter turns.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Rotation(u8);

impl Rotation {
    pub const R0: Rotation = Rotation(0);
    pub const R1: Rotation = Rotation(1);
    pub const R2: Rotation = Rotation(2);
    pub const R3: Rotation = Rotation(3);
    pub const ALL: [Rotation; 4] = [Rotation(0), Rotation(1), Rotation(2), Rotation(3)];

    /// Wraps any integer number of quarter turns into 0..=3.
    pub fn new(quarter_turns: i64) -> Rotation {
        Rotation(quarter_turns.rem_euclid(4) as u8)
    }

    pub fn quarter_turns(self) -> u8 {
        self.0
    }

    pub fn compose(self, later: Rotation) -> Rotation {
        Rotation((self.0 + later.0) % 4)
    }

    pub fn inverse(self) -> Rotation {
        Rotation((4 - self.0) % 4)
    }

    /// Rotates a lattice point about the origin: one turn is `(x,y) -> (-y,x)`.
    pub fn rotate_point(self, p: CornerCoord) -> CornerCoord {
        let Vec2 { x, y } = self.rotate_vec(vec2(p.x, p.y));
        corner(x, y)
    }

    /// Rotates a cell index: one turn is `(x,y) -> (-y,x)`, which is the
    /// geometric rotation of the unit square about the center of cell (0,0).
    pub fn rotate_cell(self, c: CellCoord) -> CellCoord {
        let Vec2 { x, y } = self.rotate_vec(vec2(c.x, c.y));
        cell(x, y)
    }

    /// Rotates a lattice point about the center of cell (0,0), i.e. the
    /// point rotation that tracks `rotate_cell`: one turn is `(x,y) -> (1-y,x)`.
    ///
    /// Tile corner marks must rotate this way to stay attached to the
    /// rotated footprint.
    pub fn rotate_corner_mark(self, p: CornerCoord) -> CornerCoord {
        let mut q = p;
        for _ in 0..self.0 {
            q = corner(1 - q.y, q.x);
        }
        q
    }

    pub fn rotate_vec(self, v: Vec2) -> Vec2 {
        let mut w = v;
        for _ in 0..self.0 {
            w = vec2(-w.y, w.x);
        }
        w
    }
}

impl fmt::Display for Rotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0)
    }
}

/// Rigid motion of the grid: rotate counterclockwise about the origin,
/// then translate by `(dx, dy)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Transform {
    pub rot: Rotation,
    pub dx: i64,
    pub dy: i64,
}

impl Transform {
    pub const IDENTITY: Transform = Transform {
        rot: Rotation::R0,
        dx: 0,
        dy: 0,
    };

    pub fn new(rot: Rotation, dx: i64, dy: i64) -> Transform {
        Transform { rot, dx, dy }
    }

    pub fn translation(dx: i64, dy: i64) -> Transform {
        Transform {
            rot: Rotation::R0,
            dx,
            dy,
        }
    }

    pub fn apply_cell(self, c: CellCoord) -> CellCoord {
        let r = self.rot.rotate_cell(c);
        cell(r.x + self.dx, r.y + self.dy)
    }

    pub fn apply_point(self, p: CornerCoord) -> CornerCoord {
        let r = self.rot.rotate_point(p);
        corner(r.x + self.dx, r.y + self.dy)
    }

    /// `self`, then `later`.
    pub fn then(self, later: Transform) -> Transform {
        let t = later.rot.rotate_vec(vec2(self.dx, self.dy));
        Transform {
            rot: self.rot.compose(later.rot),
            dx: t.x + later.dx,
            dy: t.y + later.dy,
        }
    }

    pub fn inverse(self) -> Transform {
        let r = self.rot.inverse();
        let t = r.rotate_vec(vec2(-self.dx, -self.dy));
        Transform {
            rot: r,
            dx: t.x,
            dy: t.y,
        }
    }
}

/// Residue class of a displacement in Z2 x Z2; components are 0 or 1.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct ParityClass {
    pub x: u8,
    pub y: u8,
}

impl ParityClass {
    pub fn new(x: i64, y: i64) -> ParityClass {
        ParityClass {
            x: x.rem_euclid(2) as u8,
            y: y.rem_euclid(2) as u8,
        }
    }

    pub fn of_vec(v: Vec2) -> ParityClass {
        ParityClass::new(v.x, v.y)
    }

    /// Parity is preserved by point negation and permuted by rotation.
    pub fn rotated(self, r: Rotation) -> ParityClass {
        match r.quarter_turns() % 2 {
            0 => self,
            _ => ParityClass {
                x: self.y,
                y: self.x,
            },
        }
    }
}

impl fmt::Display for ParityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corner_touches_four_cells_in_order() {
        assert_eq!(
            cells_touching(corner(0, 0)),
            [cell(-1, -1), cell(0, -1), cell(-1, 0), cell(0, 0)]
        );
        // Quadrant positions agree with the list order SW, SE, NW, SE.
        let p = corner(3, -2);
        assert_eq!(Quadrant::Sw.cell_at(p), cells_touching(p)[0]);
        assert_eq!(Quadrant::Se.cell_at(p), cells_touching(p)[1]);
        assert_eq!(Quadrant::Nw.cell_at(p), cells_touching(p)[2]);
        assert_eq!(Quadrant::Ne.cell_at(p), cells_touching(p)[3]);
    }

    #[test]
    fn rotate_point_quarter_turn() {
        assert_eq!(Rotation::R1.rotate_point(corner(2, 1)), corner(-1, 2));
        assert_eq!(Rotation::R2.rotate_point(corner(2, 1)), corner(-2, -1));
        assert_eq!(Rotation::R3.rotate_point(corner(2, 1)), corner(1, -2));
    }

    #[test]
    fn transform_rotates_then_translates() {
        let t = Transform::new(Rotation::R1, 3, 0);
        assert_eq!(t.apply_cell(cell(1, 0)), cell(3, 1));
    }

    #[test]
    fn parity_uses_mathematical_mod() {
        assert_eq!(ParityClass::new(-3, 5), ParityClass { x: 1, y: 1 });
        assert_eq!(ParityClass::new(-4, 0), ParityClass { x: 0, y: 0 });
    }

    #[test]
    fn corner_mark_rotation_tracks_cell_rotation() {
        // The 2x2 block anchored at the origin, and its nine closed-footprint
        // lattice points: rotating cells and marks must stay consistent.
        let block = [cell(0, 0), cell(1, 0), cell(0, 1), cell(1, 1)];
        for r in Rotation::ALL {
            let cells: alloc::vec::Vec<_> = block.iter().map(|&c| r.rotate_cell(c)).collect();
            let mut want = alloc::collections::BTreeSet::new();
            for &c in &cells {
                for q in corners_of_cell(c) {
                    want.insert(q);
                }
            }
            let mut got = alloc::collections::BTreeSet::new();
            for x in 0..=2 {
                for y in 0..=2 {
                    got.insert(r.rotate_corner_mark(corner(x, y)));
                }
            }
            assert_eq!(got, want, "marks detach from footprint under {r}");
        }
    }

    #[test]
    fn transform_compose_and_inverse() {
        let a = Transform::new(Rotation::R1, 3, -2);
        let b = Transform::new(Rotation::R3, 1, 5);
        let c = cell(7, -4);
        assert_eq!(a.then(b).apply_cell(c), b.apply_cell(a.apply_cell(c)));
        assert_eq!(a.then(a.inverse()), Transform::IDENTITY);
        assert_eq!(a.inverse().then(a), Transform::IDENTITY);
    }

    #[test]
    fn quadrant_rotation_cycles_counterclockwise() {
        assert_eq!(Quadrant::Ne.rotated(Rotation::R1), Quadrant::Nw);
        assert_eq!(Quadrant::Se.rotated(Rotation::R1), Quadrant::Ne);
        for q in Quadrant::ALL {
            assert_eq!(q.rotated(Rotation::R0), q);
            // A quadrant position and the cell in it rotate together under
            // the cell-frame rotation pair (rotate_cell, rotate_corner_mark).
            for r in Rotation::ALL {
                let p = corner(2, -1);
                let c = q.cell_at(p);
                let rc = r.rotate_cell(c);
                let rp = r.rotate_corner_mark(p);
                assert_eq!(q.rotated(r).cell_at(rp), rc);
            }
        }
    }
}
