//! Where a patch lives: the infinite plane, or a torus quotient of it.
//!
//! A torus is the quotient of the grid by a rank-2 translation lattice. We
//! reduce the lattice to the lower-triangular form with basis `(ex, 0)`,
//! `(w.x, g)` once, so that every cell and corner has a unique canonical
//! representative with `0 <= x < ex`, `0 <= y < g`; the fundamental-domain
//! area is `ex * g = |det|`.

use alloc::vec::Vec;

use crate::grid::{cell, CellCoord, CornerCoord, Vec2};

/// Basis vectors of a periodicity lattice, as given by the user.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TorusSpec {
    pub u: Vec2,
    pub v: Vec2,
}

/// Error for a degenerate (rank < 2) basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegenerateBasis;

impl core::fmt::Display for DegenerateBasis {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("torus basis vectors are linearly dependent")
    }
}

impl core::error::Error for DegenerateBasis {}

/// Extended gcd: returns (g, s, t) with s*a + t*b = g, g >= 0.
fn egcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, s, t) = egcd(b, a.rem_euclid(b));
        (g, t, s - a.div_euclid(b) * t)
    }
}

/// A reduced periodicity lattice with a canonical fundamental domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TorusLattice {
    pub spec: TorusSpec,
    /// Positive generator of the lattice's intersection with the x axis.
    ex: i64,
    /// Positive gcd of the basis y components; the domain's height.
    g: i64,
    /// A lattice vector with y component exactly `g`.
    w: Vec2,
}

impl TorusLattice {
    pub fn new(u: Vec2, v: Vec2) -> Result<TorusLattice, DegenerateBasis> {
        let det = u.x * v.y - u.y * v.x;
        if det == 0 {
            return Err(DegenerateBasis);
        }
        let (g, s, t) = egcd(u.y, v.y);
        // u.y = v.y = 0 would force det = 0, so g >= 1 here.
        let w = Vec2 {
            x: s * u.x + t * v.x,
            y: g,
        };
        debug_assert_eq!(s * u.y + t * v.y, g);
        let ex = (det / g).abs();
        debug_assert_eq!(det.abs(), ex * g);
        Ok(TorusLattice {
            spec: TorusSpec { u, v },
            ex,
            g,
            w,
        })
    }

    pub fn area(&self) -> i64 {
        self.ex * self.g
    }

    fn canon_xy(&self, mut x: i64, mut y: i64) -> (i64, i64) {
        let k = y.div_euclid(self.g);
        x -= k * self.w.x;
        y -= k * self.g;
        x = x.rem_euclid(self.ex);
        (x, y)
    }

    pub fn canon_cell(&self, c: CellCoord) -> CellCoord {
        let (x, y) = self.canon_xy(c.x, c.y);
        cell(x, y)
    }

    pub fn canon_corner(&self, p: CornerCoord) -> CornerCoord {
        let (x, y) = self.canon_xy(p.x, p.y);
        crate::grid::corner(x, y)
    }

    /// Is the vector a lattice translation?
    pub fn contains(&self, v: Vec2) -> bool {
        self.canon_xy(v.x, v.y) == (0, 0)
    }

    /// All canonical cell representatives, in sorted order.
    pub fn domain_cells(&self) -> Vec<CellCoord> {
        let mut out = Vec::with_capacity(self.area() as usize);
        for x in 0..self.ex {
            for y in 0..self.g {
                out.push(cell(x, y));
            }
        }
        out
    }
}

/// One canonical basis per sublattice of index <= `max_area`: Hermite form
/// u = (a, 0), v = (b, d) with a, d >= 1 and 0 <= b < a covers every rank-2
/// sublattice of the grid exactly once.
pub fn enumerate_bases(max_area: i64) -> Vec<TorusSpec> {
    let mut out = Vec::new();
    for a in 1..=max_area {
        for d in 1..=(max_area / a) {
            for b in 0..a {
                out.push(TorusSpec {
                    u: Vec2 { x: a, y: 0 },
                    v: Vec2 { x: b, y: d },
                });
            }
        }
    }
    out
}

/// Plane or torus. The plane leaves coordinates untouched.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Topology {
    Plane,
    Torus(TorusLattice),
}

impl Topology {
    pub fn canon_cell(&self, c: CellCoord) -> CellCoord {
        match self {
            Topology::Plane => c,
            Topology::Torus(l) => l.canon_cell(c),
        }
    }

    pub fn canon_corner(&self, p: CornerCoord) -> CornerCoord {
        match self {
            Topology::Plane => p,
            Topology::Torus(l) => l.canon_corner(p),
        }
    }

    pub fn is_torus(&self) -> bool {
        matches!(self, Topology::Torus(_))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::vec2;

    #[test]
    fn rejects_degenerate_basis() {
        assert_eq!(
            TorusLattice::new(vec2(2, 4), vec2(1, 2)),
            Err(DegenerateBasis)
        );
    }

    #[test]
    fn unit_torus_identifies_everything() {
        let l = TorusLattice::new(vec2(1, 0), vec2(0, 1)).unwrap();
        assert_eq!(l.area(), 1);
        for x in -3..3 {
            for y in -3..3 {
                assert_eq!(l.canon_cell(cell(x, y)), cell(0, 0));
            }
        }
    }

    #[test]
    fn basis_vectors_canonicalize_to_origin() {
        for (u, v) in [
            (vec2(3, 1), vec2(1, 2)),
            (vec2(-2, 5), vec2(4, 3)),
            (vec2(0, 2), vec2(7, -3)),
            (vec2(5, 0), vec2(2, 1)),
        ] {
            let l = TorusLattice::new(u, v).unwrap();
            assert!(l.contains(u), "{u:?}");
            assert!(l.contains(v), "{v:?}");
            assert!(l.contains(vec2(u.x + v.x, u.y + v.y)));
            assert!(!l.contains(vec2(u.x, u.y + 1)) || l.area() == 1);
        }
    }

    #[test]
    fn domain_size_matches_determinant() {
        let l = TorusLattice::new(vec2(3, 1), vec2(1, 2)).unwrap();
        assert_eq!(l.area(), 5);
        assert_eq!(l.domain_cells().len(), 5);
        // Every cell canonicalizes into the domain, and representatives of
        // the same orbit agree.
        for x in -6..6 {
            for y in -6..6 {
                let c = l.canon_cell(cell(x, y));
                assert_eq!(l.canon_cell(c), c);
                assert!(l.domain_cells().contains(&c));
                assert_eq!(l.canon_cell(cell(x + 3, y + 1)), c);
                assert_eq!(l.canon_cell(cell(x + 1, y + 2)), c);
            }
        }
    }

    #[test]
    fn hermite_enumeration_counts_sublattices() {
        // The number of index-n sublattices of Z^2 is sigma(n); the sum over
        // n <= 6 of sigma(n) is 1+3+4+7+6+12 = 33.
        let bases = enumerate_bases(6);
        assert_eq!(bases.len(), 33);
        for b in &bases {
            let l = TorusLattice::new(b.u, b.v).unwrap();
            assert!(l.area() <= 6);
        }
    }
}
