//! Tile atlas: the two tiles, their corner decorations, the corner matching
//! rule, the parity rule for crab-separated trilobite pairs, and the
//! supertile template — plus the text format they are shipped in.
//!
//! Everything the engine knows about the tiles is data in an [`Atlas`]; the
//! search, lemma, and hierarchy machinery is generic over it. The bundled
//! atlas describes the trilobite (a 2x2 block with a head corner and three
//! tail corners) and the crab (a single decorated cell), but the loader and
//! validator accept any pair of marked polyomino tiles so that deliberately
//! broken mutants can be loaded and shown to fail.
//!
//! The text format is line oriented; `#` starts a comment. Sections:
//!
//! ```text
//! [decorations]         one label name per line; BLANK must be declared
//! [tile TRILOBITE]      cell dx dy | mark dx dy LABEL | head dx dy | tip dx dy
//! [tile CRAB]           cell / mark only
//! [corner-rules]        allow NE NW SW SE          (labels at a lattice point)
//! [parity]              segments axis diagonal | pair rotA rotB px py
//! [supertile]           scale N | child rot dx dy [center] | collar dx dy rot
//! ```
//!
//! `cell`, `mark`, `tip`, `head`, `child`, and `collar` coordinates are all
//! given for rotation 0 only; the loader derives the other three rotations.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::grid::{cell, corner, CellCoord, CornerCoord, ParityClass, Quadrant, Rotation, Vec2};

/// Interned decoration label. Index 0 is always `BLANK`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Decor(pub u16);

pub const BLANK: Decor = Decor(0);

/// The two tile shapes of the pair.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum TileKind {
    Trilobite = 0,
    Crab = 1,
}

impl TileKind {
    pub const ALL: [TileKind; 2] = [TileKind::Trilobite, TileKind::Crab];

    pub fn name(self) -> &'static str {
        match self {
            TileKind::Trilobite => "TRILOBITE",
            TileKind::Crab => "CRAB",
        }
    }
}

impl fmt::Display for TileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One oriented tile at a position: `kind` rotated `rot` quarter turns
/// counterclockwise, with the rotation-0 anchor cell mapped to `anchor`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Placement {
    pub kind: TileKind,
    pub rot: Rotation,
    pub anchor: CellCoord,
}

impl Placement {
    pub fn new(kind: TileKind, rot: Rotation, anchor: CellCoord) -> Placement {
        Placement { kind, rot, anchor }
    }
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} @{}", self.kind, self.rot, self.anchor)
    }
}

/// Rotation-0 definition of one tile, as read from the atlas file.
#[derive(Clone, Debug, Default)]
pub struct TileDef {
    /// Footprint cells, offsets from the anchor cell.
    pub cells: Vec<CellCoord>,
    /// Decoration at every lattice point of the closed footprint.
    pub marks: BTreeMap<CornerCoord, Decor>,
    /// Trilobite only: the head corner (the tip that accepts bonds).
    pub head: Option<CornerCoord>,
    /// Trilobite only: the three tip cells read by neighbor classification,
    /// in code order (counterclockwise arm, diagonal, clockwise arm).
    pub tips: Vec<CellCoord>,
}

/// Precomputed data for one (kind, rotation) variant.
#[derive(Clone, Debug, Default)]
pub struct Variant {
    /// Cell offsets from the anchor.
    pub cells: Vec<Vec2>,
    /// (lattice point offset from anchor, decoration), sorted by offset.
    pub marks: BTreeMap<Vec2, Decor>,
    /// Tip cell offsets in code order (trilobite only).
    pub tips: Vec<Vec2>,
    /// Head corner offset from anchor (trilobite only).
    pub head_corner: Option<Vec2>,
    /// Head cell offset from anchor (trilobite only): the unique footprint
    /// cell whose far corner is the head.
    pub head_cell: Option<Vec2>,
}

/// One child of the supertile template: a trilobite of the next level down.
///
/// For a parent at anchor `a` with rotation `r`, the child placement is
/// rotation `r + rot` at anchor `scale * a + f_r(offset)`, where `f` is the
/// cell rotation about the scaled anchor block, `f(c) = (scale-1-c.y, c.x)`,
/// applied `r` times. Rotating about the block rather than the origin cell
/// keeps the child layout pinned to the parent's scaled footprint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TemplateChild {
    pub rot: Rotation,
    pub offset: CellCoord,
    /// Whether this child is the designated interior TTT of the template.
    pub center: bool,
}

/// One collar crab dressing a concrete trilobite: placed at
/// `anchor + rotate_cell_r(offset)` with rotation `r + rot`, but only where
/// the cell is not already claimed by a trilobite or an earlier collar.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CollarCrab {
    pub offset: CellCoord,
    pub rot: Rotation,
}

/// The supertile substitution data: how one trilobite of level n expands
/// into four of level n-1, and how concrete trilobites are dressed in crabs.
#[derive(Clone, Debug, Default)]
pub struct SupertileTemplate {
    pub scale: i64,
    pub children: Vec<TemplateChild>,
    pub collar: Vec<CollarCrab>,
}

/// Allowed-tuple rule at lattice points. Tuples are indexed NE, NW, SW, SE
/// by the position of the contributing cell relative to the point.
pub type CornerTuple = [Decor; 4];

/// Allowed (rotA, rotB, displacement parity) triples for trilobite pairs
/// whose head cells are joined by a straight all-crab segment.
pub type ParityTriple = (Rotation, Rotation, ParityClass);

/// Which straight segment families the parity rule constrains.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SegmentFamilies {
    pub axis: bool,
    pub diagonal: bool,
}

/// A complete rule set for the tile pair.
#[derive(Clone, Debug)]
pub struct Atlas {
    pub name: String,
    decorations: Vec<String>,
    tiles: [TileDef; 2],
    variants: [[Variant; 4]; 2],
    corner_rules: BTreeSet<CornerTuple>,
    corner_rules_list: Vec<CornerTuple>,
    parity: BTreeSet<ParityTriple>,
    pub segments: SegmentFamilies,
    pub template: SupertileTemplate,
    source_hash: u64,
}

impl Atlas {
    pub fn decoration_count(&self) -> usize {
        self.decorations.len()
    }

    pub fn decor_name(&self, d: Decor) -> &str {
        self.decorations
            .get(d.0 as usize)
            .map(|s| s.as_str())
            .unwrap_or("?")
    }

    pub fn decor_by_name(&self, name: &str) -> Option<Decor> {
        self.decorations
            .iter()
            .position(|n| n == name)
            .map(|i| Decor(i as u16))
    }

    pub fn tile(&self, kind: TileKind) -> &TileDef {
        &self.tiles[kind as usize]
    }

    pub fn variant(&self, kind: TileKind, rot: Rotation) -> &Variant {
        &self.variants[kind as usize][rot.quarter_turns() as usize]
    }

    /// Cells covered by a placement, in footprint order.
    pub fn cells_of(&self, p: Placement) -> impl Iterator<Item = CellCoord> + '_ {
        self.variant(p.kind, p.rot)
            .cells
            .iter()
            .map(move |&o| p.anchor + o)
    }

    /// The decoration a placement presents at a global lattice point, if the
    /// point belongs to its closed footprint.
    pub fn mark_at(&self, p: Placement, point: CornerCoord) -> Option<Decor> {
        let off = point - corner(p.anchor.x, p.anchor.y);
        self.variant(p.kind, p.rot).marks.get(&off).copied()
    }

    pub fn corner_tuple_allowed(&self, t: CornerTuple) -> bool {
        self.corner_rules.contains(&t)
    }

    pub fn corner_rules(&self) -> &[CornerTuple] {
        &self.corner_rules_list
    }

    /// Is an allowed tuple compatible with the fixed positions of a partial
    /// assignment? `None` entries are free.
    pub fn partial_tuple_satisfiable(&self, fixed: [Option<Decor>; 4]) -> bool {
        self.corner_rules_list.iter().any(|t| {
            (0..4).all(|i| match fixed[i] {
                Some(d) => t[i] == d,
                None => true,
            })
        })
    }

    pub fn parity_allowed(&self, a: Rotation, b: Rotation, p: ParityClass) -> bool {
        self.parity.contains(&(a, b, p))
    }

    pub fn parity_triples(&self) -> impl Iterator<Item = ParityTriple> + '_ {
        self.parity.iter().copied()
    }

    /// All placements of either tile, in any rotation, covering `target`.
    /// Sorted and deduplicated.
    pub fn placements_covering(&self, target: CellCoord) -> Vec<Placement> {
        let mut out = BTreeSet::new();
        for kind in TileKind::ALL {
            for rot in Rotation::ALL {
                for &o in &self.variant(kind, rot).cells {
                    out.insert(Placement::new(kind, rot, target + (-o)));
                }
            }
        }
        out.into_iter().collect()
    }

    /// Number of distinct oriented tile classes: rotated variants that
    /// differ in footprint or decoration are counted separately.
    pub fn oriented_class_count(&self) -> usize {
        type Signature = (Vec<Vec2>, Vec<(Vec2, Decor)>);
        let mut n = 0;
        for kind in TileKind::ALL {
            let mut seen: BTreeSet<Signature> = BTreeSet::new();
            for rot in Rotation::ALL {
                let v = self.variant(kind, rot);
                let mut cells = v.cells.clone();
                cells.sort();
                let marks: Vec<_> = v.marks.iter().map(|(&o, &d)| (o, d)).collect();
                seen.insert((cells, marks));
            }
            n += seen.len();
        }
        n
    }

    /// FNV-1a hash of the source text, printed in patch headers so that a
    /// patch can be checked against the atlas it was produced with.
    pub fn source_hash(&self) -> u64 {
        self.source_hash
    }

    pub fn source_hash_hex(&self) -> String {
        format!("{:016x}", self.source_hash)
    }
}

/// Parse or load-time failure, with the 1-based source line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtlasParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for AtlasParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "atlas line {}: {}", self.line, self.message)
    }
}

impl core::error::Error for AtlasParseError {}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

#[derive(PartialEq)]
enum Section {
    None,
    Decorations,
    Tile(TileKind),
    CornerRules,
    Parity,
    Supertile,
}

/// Parses atlas text. Syntax errors fail the load; semantic problems (rule
/// closure, footprint shape, ...) are left to [`validate_atlas`] so that
/// deliberately broken atlases can still be loaded and reported on.
pub fn parse_atlas(name: &str, text: &str) -> Result<Atlas, AtlasParseError> {
    let mut decorations: Vec<String> = Vec::new();
    let mut tiles = [TileDef::default(), TileDef::default()];
    let mut tile_seen = [false, false];
    let mut corner_rules: BTreeSet<CornerTuple> = BTreeSet::new();
    let mut corner_rules_list: Vec<CornerTuple> = Vec::new();
    let mut parity: BTreeSet<ParityTriple> = BTreeSet::new();
    let mut segments = SegmentFamilies::default();
    let mut template = SupertileTemplate::default();
    let mut section = Section::None;

    let err = |line: usize, message: String| AtlasParseError { line, message };
    let decor_of = |decorations: &[String], tok: &str, line: usize| -> Result<Decor, AtlasParseError> {
        decorations
            .iter()
            .position(|n| n == tok)
            .map(|i| Decor(i as u16))
            .ok_or_else(|| err(line, format!("undeclared decoration `{tok}`")))
    };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }

        if let Some(rest) = line.strip_prefix('[') {
            let Some(head) = rest.strip_suffix(']') else {
                return Err(err(line_no, "unterminated section header".to_owned()));
            };
            section = match head {
                "decorations" => Section::Decorations,
                "tile TRILOBITE" => Section::Tile(TileKind::Trilobite),
                "tile CRAB" => Section::Tile(TileKind::Crab),
                "corner-rules" => Section::CornerRules,
                "parity" => Section::Parity,
                "supertile" => Section::Supertile,
                other => return Err(err(line_no, format!("unknown section `[{other}]`"))),
            };
            if let Section::Tile(k) = section {
                if tile_seen[k as usize] {
                    return Err(err(line_no, format!("duplicate section `[tile {k}]`")));
                }
                tile_seen[k as usize] = true;
            }
            continue;
        }

        let toks: Vec<&str> = line.split_whitespace().collect();
        let int = |s: &str| -> Result<i64, AtlasParseError> {
            s.parse()
                .map_err(|_| err(line_no, format!("expected integer, got `{s}`")))
        };

        match section {
            Section::None => {
                return Err(err(line_no, "content before first section".to_owned()));
            }
            Section::Decorations => {
                if toks.len() != 1 {
                    return Err(err(line_no, "one decoration name per line".to_owned()));
                }
                if decorations.iter().any(|n| n == toks[0]) {
                    return Err(err(line_no, format!("duplicate decoration `{}`", toks[0])));
                }
                decorations.push(toks[0].to_owned());
            }
            Section::Tile(kind) => {
                let tile = &mut tiles[kind as usize];
                match toks[0] {
                    "cell" if toks.len() == 3 => {
                        let c = cell(int(toks[1])?, int(toks[2])?);
                        if tile.cells.contains(&c) {
                            return Err(err(line_no, format!("duplicate cell {c}")));
                        }
                        tile.cells.push(c);
                    }
                    "mark" if toks.len() == 4 => {
                        let p = corner(int(toks[1])?, int(toks[2])?);
                        let d = decor_of(&decorations, toks[3], line_no)?;
                        if tile.marks.insert(p, d).is_some() {
                            return Err(err(line_no, format!("duplicate mark at {p}")));
                        }
                    }
                    "head" if toks.len() == 3 => {
                        if tile.head.is_some() {
                            return Err(err(line_no, "duplicate head".to_owned()));
                        }
                        tile.head = Some(corner(int(toks[1])?, int(toks[2])?));
                    }
                    "tip" if toks.len() == 3 => {
                        tile.tips.push(cell(int(toks[1])?, int(toks[2])?));
                    }
                    v => return Err(err(line_no, format!("bad tile line `{v} ...`"))),
                }
            }
            Section::CornerRules => {
                if toks.len() != 5 || toks[0] != "allow" {
                    return Err(err(line_no, "expected `allow NE NW SW SE`".to_owned()));
                }
                let mut t = [BLANK; 4];
                for i in 0..4 {
                    t[i] = decor_of(&decorations, toks[i + 1], line_no)?;
                }
                if corner_rules.insert(t) {
                    corner_rules_list.push(t);
                }
            }
            Section::Parity => match toks[0] {
                "segments" => {
                    for &t in &toks[1..] {
                        match t {
                            "axis" => segments.axis = true,
                            "diagonal" => segments.diagonal = true,
                            other => {
                                return Err(err(
                                    line_no,
                                    format!("unknown segment family `{other}`"),
                                ))
                            }
                        }
                    }
                }
                "pair" if toks.len() == 5 => {
                    let a = int(toks[1])?;
                    let b = int(toks[2])?;
                    let px = int(toks[3])?;
                    let py = int(toks[4])?;
                    if !(0..4).contains(&a) || !(0..4).contains(&b) {
                        return Err(err(line_no, "rotations must be 0..=3".to_owned()));
                    }
                    if !(0..2).contains(&px) || !(0..2).contains(&py) {
                        return Err(err(line_no, "parity components must be 0 or 1".to_owned()));
                    }
                    parity.insert((Rotation::new(a), Rotation::new(b), ParityClass::new(px, py)));
                }
                v => return Err(err(line_no, format!("bad parity line `{v} ...`"))),
            },
            Section::Supertile => match toks[0] {
                "scale" if toks.len() == 2 => {
                    template.scale = int(toks[1])?;
                }
                "child" if toks.len() == 4 || toks.len() == 5 => {
                    let center = match toks.get(4) {
                        None => false,
                        Some(&"center") => true,
                        Some(other) => {
                            return Err(err(line_no, format!("bad child flag `{other}`")))
                        }
                    };
                    template.children.push(TemplateChild {
                        rot: Rotation::new(int(toks[1])?),
                        offset: cell(int(toks[2])?, int(toks[3])?),
                        center,
                    });
                }
                "collar" if toks.len() == 4 => {
                    template.collar.push(CollarCrab {
                        offset: cell(int(toks[1])?, int(toks[2])?),
                        rot: Rotation::new(int(toks[3])?),
                    });
                }
                v => return Err(err(line_no, format!("bad supertile line `{v} ...`"))),
            },
        }
    }

    if decorations.is_empty() {
        return Err(err(0, "no [decorations] section".to_owned()));
    }

    let variants = build_variants(&tiles);
    Ok(Atlas {
        name: name.to_owned(),
        decorations,
        tiles,
        variants,
        corner_rules,
        corner_rules_list,
        parity,
        segments,
        template,
        source_hash: fnv1a64(text.as_bytes()),
    })
}

fn build_variants(tiles: &[TileDef; 2]) -> [[Variant; 4]; 2] {
    let mut out: [[Variant; 4]; 2] = Default::default();
    for kind in TileKind::ALL {
        let def = &tiles[kind as usize];
        for rot in Rotation::ALL {
            let v = &mut out[kind as usize][rot.quarter_turns() as usize];
            v.cells = def
                .cells
                .iter()
                .map(|&c| {
                    let r = rot.rotate_cell(c);
                    Vec2 { x: r.x, y: r.y }
                })
                .collect();
            v.cells.sort();
            for (&p, &d) in &def.marks {
                let r = rot.rotate_corner_mark(p);
                v.marks.insert(Vec2 { x: r.x, y: r.y }, d);
            }
            v.tips = def
                .tips
                .iter()
                .map(|&c| {
                    let r = rot.rotate_cell(c);
                    Vec2 { x: r.x, y: r.y }
                })
                .collect();
            if let Some(h) = def.head {
                let r = rot.rotate_corner_mark(h);
                v.head_corner = Some(Vec2 { x: r.x, y: r.y });
                // The head cell is the unique footprint cell having the head
                // as one of its corners; resolved on the rotation-0 data and
                // rotated, so all variants agree.
                let hc = def.cells.iter().copied().find(|&c| {
                    crate::grid::corners_of_cell(c).contains(&h)
                });
                v.head_cell = hc.map(|c| {
                    let r = rot.rotate_cell(c);
                    Vec2 { x: r.x, y: r.y }
                });
            }
        }
    }
    out
}

/// One problem found by [`validate_atlas`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AtlasViolation {
    /// BLANK must be declared and must be decoration 0.
    BlankMissing,
    /// The all-BLANK tuple would allow a bare, uncovered corner.
    AllBlankAllowed,
    /// Tile footprint is empty or not edge-connected.
    BadFootprint(TileKind),
    /// A lattice point of the closed footprint has no mark, or a mark sits
    /// on a point outside the closed footprint.
    MarkCoverage(TileKind, CornerCoord),
    /// An allowed tuple's rotated image is missing from the rule set.
    RuleNotClosed(CornerTuple),
    /// A parity triple's swapped or rotated image is missing.
    ParityNotClosed(ParityTriple),
    /// Trilobite head missing, not a footprint corner, or ambiguous.
    BadHead,
    /// Trilobite must list exactly three tip cells, all outside the footprint.
    BadTips,
    /// Supertile template shape problem.
    BadTemplate(String),
}

impl fmt::Display for AtlasViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtlasViolation::BlankMissing => write!(f, "BLANK must be declared first"),
            AtlasViolation::AllBlankAllowed => {
                write!(f, "all-BLANK corner tuple must not be allowed")
            }
            AtlasViolation::BadFootprint(k) => write!(f, "{k}: footprint empty or disconnected"),
            AtlasViolation::MarkCoverage(k, p) => {
                write!(f, "{k}: marks do not exactly cover closed footprint at {p}")
            }
            AtlasViolation::RuleNotClosed(t) => {
                write!(
                    f,
                    "corner rule not closed under rotation at tuple ({},{},{},{})",
                    t[0].0, t[1].0, t[2].0, t[3].0
                )
            }
            AtlasViolation::ParityNotClosed((a, b, p)) => {
                write!(f, "parity table not closed at ({a},{b},{p})")
            }
            AtlasViolation::BadHead => write!(f, "trilobite head missing or ambiguous"),
            AtlasViolation::BadTips => write!(f, "trilobite must have three external tip cells"),
            AtlasViolation::BadTemplate(m) => write!(f, "supertile template: {m}"),
        }
    }
}

/// Result of checking an atlas's internal consistency.
#[derive(Clone, Debug)]
pub struct AtlasReport {
    pub violations: Vec<AtlasViolation>,
    pub oriented_classes: usize,
    pub decoration_count: usize,
    pub corner_rule_count: usize,
    pub parity_triple_count: usize,
}

impl AtlasReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the structural invariants every usable atlas must satisfy:
/// BLANK discipline, mark coverage, connectivity, C4 closure of the corner
/// rule and the parity table, head/tip sanity, and template shape.
pub fn validate_atlas(atlas: &Atlas) -> AtlasReport {
    let mut violations = Vec::new();

    if atlas.decor_by_name("BLANK") != Some(BLANK) {
        violations.push(AtlasViolation::BlankMissing);
    }
    if atlas.corner_tuple_allowed([BLANK; 4]) {
        violations.push(AtlasViolation::AllBlankAllowed);
    }

    for kind in TileKind::ALL {
        let def = atlas.tile(kind);
        if !footprint_connected(&def.cells) {
            violations.push(AtlasViolation::BadFootprint(kind));
            continue;
        }
        // Closed footprint lattice points must carry exactly the marks.
        let mut want: BTreeSet<CornerCoord> = BTreeSet::new();
        for &c in &def.cells {
            for p in crate::grid::corners_of_cell(c) {
                want.insert(p);
            }
        }
        let have: BTreeSet<CornerCoord> = def.marks.keys().copied().collect();
        if let Some(&p) = want.symmetric_difference(&have).next() {
            violations.push(AtlasViolation::MarkCoverage(kind, p));
        }
    }

    // Trilobite head and tips.
    {
        let def = atlas.tile(TileKind::Trilobite);
        match def.head {
            Some(h) => {
                let touching = def
                    .cells
                    .iter()
                    .filter(|&&c| crate::grid::corners_of_cell(c).contains(&h))
                    .count();
                if touching != 1 {
                    violations.push(AtlasViolation::BadHead);
                }
            }
            None => violations.push(AtlasViolation::BadHead),
        }
        if def.tips.len() != 3 || def.tips.iter().any(|t| def.cells.contains(t)) {
            violations.push(AtlasViolation::BadTips);
        }
    }

    // Corner rule closure: rotating the plane permutes quadrant positions
    // NE -> NW -> SW -> SE and leaves labels fixed.
    for &t in &atlas.corner_rules {
        let mut r = [BLANK; 4];
        for q in Quadrant::ALL {
            r[q.rotated(Rotation::R1) as usize] = t[q as usize];
        }
        if !atlas.corner_tuple_allowed(r) {
            violations.push(AtlasViolation::RuleNotClosed(t));
        }
    }

    // Parity closure: swapping the pair preserves parity (negation fixes a
    // Z2 class); simultaneous rotation rotates all three components.
    for &(a, b, p) in &atlas.parity {
        if !atlas.parity_allowed(b, a, p) {
            violations.push(AtlasViolation::ParityNotClosed((a, b, p)));
        }
        let r = (
            a.compose(Rotation::R1),
            b.compose(Rotation::R1),
            p.rotated(Rotation::R1),
        );
        if !atlas.parity.contains(&r) {
            violations.push(AtlasViolation::ParityNotClosed((a, b, p)));
        }
    }

    // Template shape.
    let t = &atlas.template;
    if !t.children.is_empty() || !t.collar.is_empty() {
        if t.scale < 2 {
            violations.push(AtlasViolation::BadTemplate("scale must be >= 2".to_owned()));
        }
        if t.children.len() != 4 {
            violations.push(AtlasViolation::BadTemplate(format!(
                "expected 4 children, found {}",
                t.children.len()
            )));
        }
        if t.children.iter().filter(|c| c.center).count() != 1 {
            violations.push(AtlasViolation::BadTemplate(
                "exactly one child must be marked center".to_owned(),
            ));
        }
    }

    AtlasReport {
        violations,
        oriented_classes: atlas.oriented_class_count(),
        decoration_count: atlas.decoration_count(),
        corner_rule_count: atlas.corner_rules.len(),
        parity_triple_count: atlas.parity.len(),
    }
}

fn footprint_connected(cells: &[CellCoord]) -> bool {
    if cells.is_empty() {
        return false;
    }
    let set: BTreeSet<CellCoord> = cells.iter().copied().collect();
    let mut seen = BTreeSet::new();
    let mut stack = alloc::vec![cells[0]];
    seen.insert(cells[0]);
    while let Some(c) = stack.pop() {
        for d in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let n = cell(c.x + d.0, c.y + d.1);
            if set.contains(&n) && seen.insert(n) {
                stack.push(n);
            }
        }
    }
    seen.len() == set.len()
}

/// A deliberately simple two-tile atlas used by unit tests across the
/// crate: a four-cell trilobite and a one-cell crab with two decorations,
/// one allowed corner tuple, and identity-only parity.
#[cfg(test)]
pub(crate) const TOY: &str = r#"
[decorations]
BLANK
A
B

[tile TRILOBITE]
cell 0 0
cell 1 0
cell 0 1
cell 1 1
head 2 2
tip -1 2
tip -1 -1
tip 2 -1
mark 0 0 A
mark 1 0 BLANK
mark 2 0 A
mark 0 1 BLANK
mark 1 1 A
mark 2 1 BLANK
mark 0 2 A
mark 1 2 BLANK
mark 2 2 B

[tile CRAB]
cell 0 0
mark 0 0 A
mark 1 0 B
mark 0 1 B
mark 1 1 A

[corner-rules]
allow A A A A

[parity]
segments axis diagonal
pair 0 0 0 0
pair 1 1 0 0
pair 2 2 0 0
pair 3 3 0 0

[supertile]
scale 2
child 0 -1 -1
child 1 3 -1
child 3 -1 3
child 0 1 1 center
"#;

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn parses_toy_atlas() {
        let atlas = parse_atlas("toy", TOY).unwrap();
        assert_eq!(atlas.decoration_count(), 3);
        assert_eq!(atlas.tile(TileKind::Trilobite).cells.len(), 4);
        assert_eq!(atlas.tile(TileKind::Crab).cells.len(), 1);
        assert_eq!(atlas.template.children.len(), 4);
    }

    #[test]
    fn rejects_unknown_section() {
        let e = parse_atlas("bad", "[frobs]\n").unwrap_err();
        assert!(e.message.contains("unknown section"));
        assert_eq!(e.line, 1);
    }

    #[test]
    fn rejects_undeclared_decoration() {
        let e = parse_atlas(
            "bad",
            "[decorations]\nBLANK\n[tile CRAB]\ncell 0 0\nmark 0 0 NOPE\n",
        )
        .unwrap_err();
        assert_eq!(e.line, 5);
        assert!(e.message.contains("undeclared"));
    }

    #[test]
    fn placements_covering_counts_all_orientations() {
        let atlas = parse_atlas("toy", TOY).unwrap();
        // 4 trilobite rotations x 4 footprint cells + 4 crab rotations.
        assert_eq!(atlas.placements_covering(cell(0, 0)).len(), 20);
    }

    #[test]
    fn all_blank_tuple_is_reported() {
        let text = TOY.to_string() + "\n[corner-rules]\nallow BLANK BLANK BLANK BLANK\n";
        let atlas = parse_atlas("toy", &text).unwrap();
        let report = validate_atlas(&atlas);
        assert!(report
            .violations
            .contains(&AtlasViolation::AllBlankAllowed));
    }

    #[test]
    fn closure_violation_is_reported_not_rejected() {
        // `allow A A A B` is not rotation closed on its own.
        let text = TOY.to_string() + "\n[corner-rules]\nallow A A A B\n";
        let atlas = parse_atlas("toy", &text).unwrap();
        let report = validate_atlas(&atlas);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, AtlasViolation::RuleNotClosed(_))));
    }

    #[test]
    fn rotated_marks_track_rotated_footprint() {
        let atlas = parse_atlas("toy", TOY).unwrap();
        for kind in TileKind::ALL {
            for rot in Rotation::ALL {
                let v = atlas.variant(kind, rot);
                let mut want: BTreeSet<Vec2> = BTreeSet::new();
                for &c in &v.cells {
                    for p in crate::grid::corners_of_cell(cell(c.x, c.y)) {
                        want.insert(Vec2 { x: p.x, y: p.y });
                    }
                }
                let have: BTreeSet<Vec2> = v.marks.keys().copied().collect();
                assert_eq!(have, want, "{kind} {rot}");
            }
        }
    }

    #[test]
    fn toy_atlas_is_mark_complete_and_connected() {
        let atlas = parse_atlas("toy", TOY).unwrap();
        let report = validate_atlas(&atlas);
        for v in &report.violations {
            // The toy atlas is intentionally not rotation-closed in its
            // corner rule; everything else must be clean.
            assert!(
                matches!(v, AtlasViolation::RuleNotClosed(_)),
                "unexpected violation: {v}"
            );
        }
    }
}
