//! The substitution hierarchy: inflation, supertile recognition, crab
//! dressing, diagonal chains, and the half-plane shift.
//!
//! A patch of trilobites can be read at two scales. Concretely, each
//! placement is a tile on the grid. Abstractly, each trilobite stands for a
//! supertile one level up: the atlas template expands it into four
//! trilobites of the level below, one of which (the *center*) reads `TTT`
//! inside the finished tiling. [`inflate`] applies that expansion and then
//! dresses every concrete trilobite in its collar of crabs; [`compose`]
//! inverts it, recognizing the supertile skeleton inside a concrete patch.
//!
//! The `*TO` codes are the odd ones out: they cannot appear in the
//! hierarchy, and a tiling containing one carries an infinite diagonal
//! fault chain of trilobites whose codes alternate between a starred code
//! and a hierarchy code. [`detect_chains`] finds those chains and
//! [`shift_halfplane`] slides one side of the plane a single diagonal step
//! to eliminate them, which is the reduction the classification argument
//! leans on.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use crate::atlas::{Atlas, Placement, TemplateChild, TileKind};
use crate::engine::{
    classify_trilobite, validate, BoundaryPolicy, Census, NeighborCode, Patch, PlaceError,
    Topology, ValidityReport, Violation, Window,
};
use crate::grid::{cell, vec2, CellCoord, CornerCoord, Rotation, Vec2};

/// Rotates a cell offset about a scaled anchor block. Blowing a patch up by
/// `scale` turns the anchor cell into a `scale` x `scale` block of cells,
/// and a quarter turn of the blown-up plane about that block maps cell
/// offsets by `(x, y) -> (scale - 1 - y, x)`.
fn rot_block(scale: i64, r: Rotation, c: CellCoord) -> CellCoord {
    let mut out = c;
    for _ in 0..r.quarter_turns() {
        out = cell(scale - 1 - out.y, out.x);
    }
    out
}

fn child_placement(scale: i64, parent: Placement, ch: &TemplateChild) -> Placement {
    let f = rot_block(scale, parent.rot, ch.offset);
    Placement::new(
        TileKind::Trilobite,
        parent.rot.compose(ch.rot),
        cell(scale * parent.anchor.x + f.x, scale * parent.anchor.y + f.y),
    )
}

/// The four trilobites one level down that a trilobite placement expands
/// to, in template order.
pub fn template_children(atlas: &Atlas, parent: Placement) -> Vec<Placement> {
    let t = &atlas.template;
    t.children
        .iter()
        .map(|ch| child_placement(t.scale, parent, ch))
        .collect()
}

fn center_child(atlas: &Atlas) -> &TemplateChild {
    atlas
        .template
        .children
        .iter()
        .find(|ch| ch.center)
        .expect("supertile template designates a center child")
}

/// The south-west cell of a trilobite block (or the cell of a crab):
/// anchor plus the smallest footprint offset.
fn base_of(atlas: &Atlas, pl: Placement) -> CellCoord {
    let off = atlas
        .variant(pl.kind, pl.rot)
        .cells
        .iter()
        .copied()
        .min()
        .unwrap_or(vec2(0, 0));
    pl.anchor + off
}

/// Why [`inflate`] or [`dress_collars`] could not build the requested patch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InflateError {
    /// The skeleton contains a placement kind with no template entry
    /// (crabs have no expansion; they only ever come from the dressing).
    TemplateMismatch { placement: Placement },
    /// Two trilobites emitted differently oriented collar crabs at the same
    /// cell, so the atlas collar is not coherent on this skeleton.
    CollarConflict { at: CellCoord },
    /// Two expanded children claim the same cell, so the template's
    /// children overlap.
    ChildOverlap { at: CellCoord },
}

impl fmt::Display for InflateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InflateError::TemplateMismatch { placement } => {
                write!(f, "no template entry for placement {placement}")
            }
            InflateError::CollarConflict { at } => {
                write!(f, "conflicting collar crabs at {at}")
            }
            InflateError::ChildOverlap { at } => {
                write!(f, "template children overlap at {at}")
            }
        }
    }
}

impl core::error::Error for InflateError {}

/// Why a trilobite could not be grouped by [`compose`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComposeReason {
    /// The parent anchor recovered from a `TTT` trilobite does not lie on
    /// the coarse lattice.
    UnalignedAnchor,
    /// A sibling demanded by the template is absent or misoriented.
    MissingSibling { expected: Placement },
    /// Two recognized supertiles claim this trilobite.
    DoublyClaimed,
    /// No recognized supertile claims this interior trilobite.
    Unclaimed,
}

impl fmt::Display for ComposeReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComposeReason::UnalignedAnchor => f.write_str("recovered parent is off-lattice"),
            ComposeReason::MissingSibling { expected } => {
                write!(f, "expected sibling {expected} is missing")
            }
            ComposeReason::DoublyClaimed => f.write_str("claimed by two supertiles"),
            ComposeReason::Unclaimed => f.write_str("claimed by no supertile"),
        }
    }
}

/// Why [`compose`] rejected a patch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComposeError {
    /// An interior trilobite reads a neighbor code that cannot occur in a
    /// hierarchical tiling ([`shift_halfplane`] removes the `*TO` ones).
    PreconditionCensus { id: u32, code: NeighborCode },
    /// The grouping failed at a specific trilobite.
    Uncomposable { id: u32, reason: ComposeReason },
}

impl fmt::Display for ComposeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComposeError::PreconditionCensus { id, code } => {
                write!(f, "interior trilobite {id} has non-hierarchical code {code}")
            }
            ComposeError::Uncomposable { id, reason } => {
                write!(f, "trilobite {id} cannot be grouped: {reason}")
            }
        }
    }
}

impl core::error::Error for ComposeError {}

/// One recognized level of structure: supertile placements in coarse
/// coordinates, with the concrete placements that witness each of them.
///
/// `witness_tiles[i]` lists the ids of the four trilobites owned by
/// `supertiles[i]`, and `witness_crabs[i]` the crabs attributed to those
/// trilobites' collars. Ids index into the patch the `SuperPatch` was
/// composed from. Placements near a window's rim that belong to no fully
/// recognized supertile end up in `unwitnessed`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperPatch {
    /// Height above the concrete tiles, which live at level 1; one
    /// application of [`compose`] yields level 2.
    pub level: u32,
    pub supertiles: Vec<Placement>,
    pub witness_tiles: Vec<Vec<u32>>,
    pub witness_crabs: Vec<Vec<u32>>,
    pub unwitnessed: Vec<u32>,
}

/// A maximal fault run carrying at least one `TTO`/`OTT` trilobite.
///
/// Members are ordered by increasing position along `direction` (a
/// cell-diagonal unit step, `(1,1)` or `(1,-1)`); consecutive members'
/// blocks are displaced by twice that step, and their codes strictly
/// alternate (no two consecutive members share a code). The starred
/// codes land on every other member, separated by ordinary hierarchy
/// codes from the flanks of the fault.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainDescriptor {
    pub direction: Vec2,
    pub members: Vec<u32>,
    pub tags: Vec<NeighborCode>,
}

/// Emits the collar crabs of every trilobite currently in the patch,
/// skipping cells already claimed by a trilobite or by an identical crab,
/// and returns how many crabs were added.
///
/// Emission walks trilobites in id order, so the lowest-id trilobite
/// listing a free slot is the crab's canonical emitter. Two trilobites may
/// list the same slot; that is fine as long as they agree on the crab's
/// orientation, and a disagreement is a [`InflateError::CollarConflict`].
pub fn dress_collars(patch: &mut Patch<'_>) -> Result<u32, InflateError> {
    let collar = patch.atlas().template.collar.clone();
    let mut added = 0;
    let trilobite_count = patch.placements().len();
    for id in 0..trilobite_count {
        let pl = patch.placement(id as u32);
        if pl.kind != TileKind::Trilobite {
            continue;
        }
        for slot in &collar {
            let rc = pl.rot.rotate_cell(slot.offset);
            let at = pl.anchor + vec2(rc.x, rc.y);
            let crab = patch.canon_placement(Placement::new(
                TileKind::Crab,
                pl.rot.compose(slot.rot),
                at,
            ));
            match patch.occupant(at) {
                None => {
                    patch
                        .place_unchecked(crab)
                        .map_err(|_| InflateError::CollarConflict { at })?;
                    added += 1;
                }
                Some((_, occ)) if occ.kind == TileKind::Trilobite => {}
                Some((_, occ)) if occ == crab => {}
                Some(_) => return Err(InflateError::CollarConflict { at }),
            }
        }
    }
    Ok(added)
}

/// Expands a skeleton of abstract trilobites `levels` times and dresses the
/// result in collar crabs, yielding a concrete patch.
///
/// The input is read as a patch of supertile placements: only trilobites
/// have a template entry, so a crab in the input (with `levels > 0`) is a
/// [`InflateError::TemplateMismatch`]. With `levels == 0` the input is
/// returned unchanged. The output is an unwindowed plane patch with its
/// placements in canonical order.
pub fn inflate<'a>(patch: &Patch<'a>, levels: u32) -> Result<Patch<'a>, InflateError> {
    if levels == 0 {
        return Ok(patch.clone());
    }
    let atlas = patch.atlas();
    let mut skeleton: Vec<Placement> = patch.placements().to_vec();
    for _ in 0..levels {
        let mut next = Vec::with_capacity(skeleton.len() * atlas.template.children.len());
        for pl in skeleton {
            if pl.kind != TileKind::Trilobite {
                return Err(InflateError::TemplateMismatch { placement: pl });
            }
            next.extend(template_children(atlas, pl));
        }
        skeleton = next;
    }
    skeleton.sort_unstable();
    let mut out = Patch::new(atlas, None, BoundaryPolicy::Open);
    for pl in skeleton {
        out.place_unchecked(pl).map_err(|e| match e {
            PlaceError::Overlap(at) => InflateError::ChildOverlap { at },
            _ => InflateError::ChildOverlap { at: pl.anchor },
        })?;
    }
    dress_collars(&mut out)?;
    Ok(out)
}

const HIERARCHY_CODES: [&str; 3] = ["TTT", "OTO", "OOO"];

fn hierarchy_codes() -> [NeighborCode; 3] {
    HIERARCHY_CODES.map(|s| NeighborCode::parse(s).expect("well-formed code literal"))
}

/// Distance from a window's rim below which compose makes no promises: one
/// supertile diameter, i.e. two template boxes of `2 * scale` cells each.
fn compose_margin(atlas: &Atlas) -> i64 {
    4 * atlas.template.scale
}

fn footprint_interior(patch: &Patch<'_>, pl: Placement, margin: i64) -> bool {
    match patch.window() {
        None => true,
        Some(w) => patch.atlas().cells_of(pl).all(|c| {
            c.x >= w.x0 + margin && c.x < w.x1 - margin && c.y >= w.y0 + margin && c.y < w.y1 - margin
        }),
    }
}

/// Recognizes the supertile skeleton inside a concrete patch.
///
/// Every determined `TTT` trilobite is read as the center of a supertile:
/// its parent placement is recovered by inverting the template's center
/// child, and the template then names the three siblings, which must be
/// present exactly. The witness map this produces partitions the
/// trilobites: an interior trilobite that stays unclaimed, a doubly claimed
/// one, or an interior `TTT` whose recovery fails is a [`ComposeError`].
/// Near a window's rim (within one supertile diameter) partial supertiles
/// are normal, so placements there may simply land in `unwitnessed`.
///
/// Crabs are attributed to the collar of their canonical emitter (the
/// lowest-id trilobite whose collar lists their cell with their
/// orientation), and follow that trilobite's supertile.
pub fn compose(patch: &Patch<'_>) -> Result<SuperPatch, ComposeError> {
    let atlas = patch.atlas();
    let scale = atlas.template.scale;
    let center = center_child(atlas);
    let allowed = hierarchy_codes();
    let ttt = allowed[0];
    let margin = compose_margin(atlas);

    let mut codes: BTreeMap<u32, NeighborCode> = BTreeMap::new();
    let mut by_anchor: BTreeMap<CellCoord, (u32, Placement)> = BTreeMap::new();
    for (id, &pl) in patch.placements().iter().enumerate() {
        let id = id as u32;
        if pl.kind != TileKind::Trilobite {
            continue;
        }
        let code = classify_trilobite(patch, id).expect("id ranges over trilobites");
        codes.insert(id, code);
        by_anchor.insert(pl.anchor, (id, pl));
    }

    for (&id, &code) in &codes {
        let interior = footprint_interior(patch, patch.placement(id), margin);
        if interior && code != NeighborCode::Undetermined && !allowed.contains(&code) {
            return Err(ComposeError::PreconditionCensus { id, code });
        }
    }

    let mut owner: BTreeMap<u32, usize> = BTreeMap::new();
    let mut groups: Vec<(Placement, Vec<u32>)> = Vec::new();
    for (&id, &code) in &codes {
        if code != ttt {
            continue;
        }
        let c = patch.placement(id);
        let interior = footprint_interior(patch, c, margin);
        let r_par = c.rot.compose(center.rot.inverse());
        let f = rot_block(scale, r_par, center.offset);
        let (sx, sy) = (c.anchor.x - f.x, c.anchor.y - f.y);
        if sx.rem_euclid(scale) != 0 || sy.rem_euclid(scale) != 0 {
            if interior {
                return Err(ComposeError::Uncomposable {
                    id,
                    reason: ComposeReason::UnalignedAnchor,
                });
            }
            continue;
        }
        let parent = Placement::new(
            TileKind::Trilobite,
            r_par,
            cell(sx.div_euclid(scale), sy.div_euclid(scale)),
        );
        let mut members = Vec::with_capacity(atlas.template.children.len());
        let mut complete = true;
        for ch in &atlas.template.children {
            let expected = child_placement(scale, parent, ch);
            match by_anchor.get(&expected.anchor) {
                Some(&(mid, mpl)) if mpl == expected => members.push(mid),
                _ => {
                    if interior {
                        return Err(ComposeError::Uncomposable {
                            id,
                            reason: ComposeReason::MissingSibling { expected },
                        });
                    }
                    complete = false;
                    break;
                }
            }
        }
        if !complete {
            continue;
        }
        let group_idx = groups.len();
        for &mid in &members {
            if owner.insert(mid, group_idx).is_some() {
                return Err(ComposeError::Uncomposable {
                    id: mid,
                    reason: ComposeReason::DoublyClaimed,
                });
            }
        }
        members.sort_unstable();
        groups.push((parent, members));
    }

    for &id in codes.keys() {
        if !owner.contains_key(&id) && footprint_interior(patch, patch.placement(id), margin) {
            return Err(ComposeError::Uncomposable {
                id,
                reason: ComposeReason::Unclaimed,
            });
        }
    }

    // Attribute each crab to its canonical emitter's supertile.
    let collar = &atlas.template.collar;
    let mut crab_owner: BTreeMap<u32, usize> = BTreeMap::new();
    for (&tid, &group_idx) in &owner {
        let pl = patch.placement(tid);
        for slot in collar {
            let rc = pl.rot.rotate_cell(slot.offset);
            let at = pl.anchor + vec2(rc.x, rc.y);
            let wanted = patch.canon_placement(Placement::new(
                TileKind::Crab,
                pl.rot.compose(slot.rot),
                at,
            ));
            if let Some((cid, occ)) = patch.occupant(at) {
                if occ == wanted {
                    crab_owner.entry(cid).or_insert(group_idx);
                }
            }
        }
    }

    // Canonical output order: supertiles sorted as placements, witnesses
    // renumbered along with them.
    let mut order: Vec<usize> = (0..groups.len()).collect();
    order.sort_unstable_by_key(|&i| groups[i].0);
    let mut rank = alloc::vec![0usize; groups.len()];
    for (new_idx, &old_idx) in order.iter().enumerate() {
        rank[old_idx] = new_idx;
    }
    let supertiles: Vec<Placement> = order.iter().map(|&i| groups[i].0).collect();
    let witness_tiles: Vec<Vec<u32>> = order.iter().map(|&i| groups[i].1.clone()).collect();
    let mut witness_crabs: Vec<Vec<u32>> = alloc::vec![Vec::new(); groups.len()];
    for (&cid, &group_idx) in &crab_owner {
        witness_crabs[rank[group_idx]].push(cid);
    }

    let mut unwitnessed = Vec::new();
    for (id, pl) in patch.placements().iter().enumerate() {
        let id = id as u32;
        let witnessed = match pl.kind {
            TileKind::Trilobite => owner.contains_key(&id),
            TileKind::Crab => crab_owner.contains_key(&id),
        };
        if !witnessed {
            unwitnessed.push(id);
        }
    }

    Ok(SuperPatch {
        level: 2,
        supertiles,
        witness_tiles,
        witness_crabs,
        unwitnessed,
    })
}

/// Checks that a recognized super level obeys the same rules the concrete
/// level does.
///
/// The supertile placements are rebuilt as a patch in coarse coordinates,
/// dressed in collar crabs, and run through the ordinary [`validate`] — the
/// matching rules are scale-free, so corner, coverage, and parity failures
/// at the coarse level surface as ordinary violations. On top of that, each
/// supertile's designated center child must actually sit in `fine` (the
/// patch the [`SuperPatch`] was composed from) at the template-designated
/// position and orientation; a supertile whose center is absent or
/// displaced gets a [`Violation::SupertileMisaligned`].
pub fn verify_super_axioms(s: &SuperPatch, fine: &Patch<'_>) -> ValidityReport {
    let atlas = fine.atlas();
    let scale = atlas.template.scale;
    let center = center_child(atlas);

    let mut assembly: Vec<Violation> = Vec::new();
    let mut coarse = Patch::new(atlas, None, BoundaryPolicy::Open);
    for &sp in &s.supertiles {
        if let Err(e) = coarse.place_unchecked(sp) {
            let at = match e {
                PlaceError::Overlap(c) => c,
                _ => sp.anchor,
            };
            assembly.push(Violation::SupertileAssembly { at });
        }
    }
    if let Err(InflateError::CollarConflict { at } | InflateError::ChildOverlap { at }) =
        dress_collars(&mut coarse)
    {
        assembly.push(Violation::SupertileAssembly { at });
    }

    let mut report = validate(&coarse);

    for (i, &sp) in s.supertiles.iter().enumerate() {
        let expected = child_placement(scale, sp, center);
        let witnesses = s.witness_tiles.get(i);
        let aligned = match witnesses {
            Some(ids) if !ids.is_empty() => ids
                .iter()
                .any(|&id| fine.placements().get(id as usize) == Some(&expected)),
            _ => fine.placements().contains(&expected),
        };
        if !aligned {
            assembly.push(Violation::SupertileMisaligned {
                supertile: sp,
                expected_center: expected,
            });
        }
    }

    assembly.append(&mut report.violations);
    report.violations = assembly;
    report
}

/// Finds every maximal fault chain carrying a `TTO` or `OTT` trilobite.
///
/// A chain is a run of trilobites whose blocks sit two cells apart along
/// one diagonal and whose codes never repeat back to back. Along a fault
/// the starred codes sit at every other block diagonal, interleaved with
/// ordinary hierarchy codes, so the run as a whole alternates strictly
/// even though consecutive *starred* members usually agree. Each
/// determined `TTO`/`OTT` trilobite lands in exactly one descriptor
/// (a trilobite with no chain partner makes a one-member chain). The
/// result is deterministic: seeds are scanned in canonical base order,
/// and a seed follows whichever diagonal carries more starred members
/// (ties go to the main diagonal `(1,1)`).
pub fn detect_chains(patch: &Patch<'_>) -> Vec<ChainDescriptor> {
    let tto = NeighborCode::parse("TTO").expect("well-formed code literal");
    let ott = NeighborCode::parse("OTT").expect("well-formed code literal");
    let atlas = patch.atlas();

    let mut by_base: BTreeMap<CellCoord, (u32, NeighborCode)> = BTreeMap::new();
    for (id, &pl) in patch.placements().iter().enumerate() {
        let id = id as u32;
        if pl.kind != TileKind::Trilobite {
            continue;
        }
        let code = classify_trilobite(patch, id).expect("id ranges over trilobites");
        if code == NeighborCode::Undetermined {
            continue;
        }
        by_base.insert(base_of(atlas, pl), (id, code));
    }

    let key = |c: CellCoord| patch.canon_cell(c);
    let coded = |c: CellCoord| by_base.get(&key(c)).copied();
    let starred = |t: NeighborCode| t == tto || t == ott;
    let total = by_base.len();

    // Walk against `step` while codes keep changing to find the run's
    // most-negative end.
    let run_start = |b: CellCoord, step: Vec2| -> CellCoord {
        let (_, mut tag) = coded(b).expect("seed base is coded");
        let mut start = b;
        let mut guard = total;
        while guard > 0 {
            guard -= 1;
            match coded(start + (-step)) {
                Some((_, t)) if t != tag => {
                    start = key(start + (-step));
                    tag = t;
                }
                _ => break,
            }
        }
        start
    };
    // Starred members on the run through `b`. The seed uses this to pick
    // the diagonal that actually carries the fault: the other diagonal may
    // graze hierarchy-coded neighbours whose codes happen to differ.
    let run_weight = |b: CellCoord, step: Vec2| -> usize {
        let mut cur = run_start(b, step);
        let mut prev: Option<NeighborCode> = None;
        let mut count = 0;
        let mut guard = total;
        while guard > 0 {
            guard -= 1;
            let Some((_, t)) = coded(cur) else { break };
            if prev == Some(t) {
                break;
            }
            if starred(t) {
                count += 1;
            }
            prev = Some(t);
            cur = key(cur + step);
        }
        count
    };

    let mut used: BTreeSet<CellCoord> = BTreeSet::new();
    let mut chains = Vec::new();

    let seeds: Vec<CellCoord> = by_base
        .iter()
        .filter(|&(_, &(_, t))| starred(t))
        .map(|(&b, _)| b)
        .collect();
    for b in seeds {
        if used.contains(&b) {
            continue;
        }
        let (id, tag) = by_base[&b];
        let main_weight = run_weight(b, vec2(2, 2));
        let anti_weight = run_weight(b, vec2(2, -2));
        if main_weight.max(anti_weight) < 2 {
            used.insert(b);
            chains.push(ChainDescriptor {
                direction: vec2(1, 1),
                members: alloc::vec![id],
                tags: alloc::vec![tag],
            });
            continue;
        }
        let d = if anti_weight > main_weight {
            vec2(1, -1)
        } else {
            vec2(1, 1)
        };
        let step = vec2(2 * d.x, 2 * d.y);

        let mut members = Vec::new();
        let mut tags = Vec::new();
        let mut cur = run_start(b, step);
        let mut prev: Option<NeighborCode> = None;
        while let Some((cid, ctag)) = coded(cur) {
            if used.contains(&key(cur)) || prev == Some(ctag) {
                break;
            }
            members.push(cid);
            tags.push(ctag);
            used.insert(key(cur));
            prev = Some(ctag);
            cur = key(cur + step);
        }
        chains.push(ChainDescriptor {
            direction: d,
            members,
            tags,
        });
    }
    chains
}

/// Why [`shift_halfplane`] refused or failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftError {
    /// The chain does not run corner to corner across the patch's window
    /// (or the patch has no window to span).
    ChainNotSpanning,
    /// No way of sliding either side by one diagonal step yields a valid
    /// seam; the named corner is where revalidation first failed.
    ShiftInvalid { at: CornerCoord },
}

impl fmt::Display for ShiftError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShiftError::ChainNotSpanning => f.write_str("chain does not span the window"),
            ShiftError::ShiftInvalid { at } => {
                write!(f, "no valid half-plane shift; seam fails near {at}")
            }
        }
    }
}

impl core::error::Error for ShiftError {}

/// Slides everything on one side of a chain's diagonal by one cell-diagonal
/// step, eliminating the chain's `*TO` codes.
///
/// The chain's diagonal splits the plane into two halves; moving one half
/// parallel to the seam keeps every diagonal line within its half, so
/// coverage and all matching constraints away from the seam are untouched,
/// and only the seam itself needs revalidation. Which half moves, and
/// whether the chain and its crab margin move with it, is not dictated
/// here: every combination of cut line (beside the chain's blocks or one
/// margin further out, on either side) and step sense is tried in a fixed
/// order and the first one whose result validates with a hierarchical
/// interior census wins. The
/// output patch's window shrinks by one cell on the two rims the moved
/// half pulled away from, and its boundary policy is open.
pub fn shift_halfplane<'a>(
    patch: &Patch<'a>,
    chain: &ChainDescriptor,
) -> Result<Patch<'a>, ShiftError> {
    let Some(w) = patch.window() else {
        return Err(ShiftError::ChainNotSpanning);
    };
    if matches!(patch.topology(), Topology::Torus(_)) || chain.members.is_empty() {
        return Err(ShiftError::ChainNotSpanning);
    }
    let atlas = patch.atlas();
    let main = chain.direction == vec2(1, 1);
    // `seam` is constant along the chain; `along` grows in the chain
    // direction.
    let seam = |c: CellCoord| if main { c.x - c.y } else { c.x + c.y };
    let along = |c: CellCoord| if main { c.x + c.y } else { c.x - c.y };

    let first = patch.placement(chain.members[0]);
    let seam0 = seam(base_of(atlas, first));

    // The chain must reach both window corners up to one supertile
    // diameter of slack.
    let diameter = compose_margin(atlas);
    let window_along = if main {
        (w.x0 + w.y0, (w.x1 - 1) + (w.y1 - 1))
    } else {
        (w.x0 - (w.y1 - 1), (w.x1 - 1) - w.y0)
    };
    let mut chain_along = (i64::MAX, i64::MIN);
    for &id in &chain.members {
        let pl = patch.placement(id);
        if seam(base_of(atlas, pl)) != seam0 {
            return Err(ShiftError::ChainNotSpanning);
        }
        for c in atlas.cells_of(pl) {
            chain_along = (chain_along.0.min(along(c)), chain_along.1.max(along(c)));
        }
    }
    if chain_along.0 > window_along.0 + diameter || chain_along.1 < window_along.1 - diameter {
        return Err(ShiftError::ChainNotSpanning);
    }

    // Seam-coordinate extent of the chain's blocks.
    let (chain_lo, chain_hi) = if main {
        (seam0 - 1, seam0 + 1)
    } else {
        (seam0, seam0 + 2)
    };
    let steps = if main {
        [vec2(1, 1), vec2(-1, -1)]
    } else {
        [vec2(1, -1), vec2(-1, 1)]
    };

    let codes = hierarchy_codes();
    let mut first_failure: Option<CornerCoord> = None;
    // Cut lines beside the chain's blocks, then one crab margin further
    // out (a fault keeps a one-cell crab margin between the chain and the
    // displaced half, so the healing cut may sit just beyond it).
    for threshold in [chain_lo, chain_hi + 1, chain_lo - 1, chain_hi + 2] {
        'combo: for step in steps {
            let mut moved: Vec<Placement> = Vec::with_capacity(patch.placements().len());
            for &pl in patch.placements() {
                let mut lo = i64::MAX;
                let mut hi = i64::MIN;
                for c in atlas.cells_of(pl) {
                    lo = lo.min(seam(c));
                    hi = hi.max(seam(c));
                }
                if lo >= threshold {
                    moved.push(Placement::new(pl.kind, pl.rot, pl.anchor + step));
                } else if hi >= threshold {
                    continue 'combo; // a block straddles the cut
                } else {
                    moved.push(pl);
                }
            }
            moved.sort_unstable();
            let shrunk = Window::new(
                w.x0 + step.x.max(0),
                w.y0 + step.y.max(0),
                w.x1 + step.x.min(0),
                w.y1 + step.y.min(0),
            );
            let mut out = Patch::new(atlas, Some(shrunk), BoundaryPolicy::Open);
            let mut ok = true;
            for pl in moved {
                if out.place_unchecked(pl).is_err() {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            let report = validate(&out);
            if report.is_valid()
                && Census::of_interior(&out, 2).determined_subset_of(&codes)
            {
                return Ok(out);
            }
            if first_failure.is_none() {
                first_failure = report.violations.iter().find_map(|v| match v {
                    Violation::CornerViolation { at, .. } => Some(*at),
                    _ => None,
                });
            }
        }
    }
    Err(ShiftError::ShiftInvalid {
        at: first_failure.unwrap_or_else(|| {
            let b = base_of(atlas, first);
            crate::grid::corner(b.x, b.y)
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::parse_atlas;
    use crate::atlas::TOY;
    use alloc::format;
    use alloc::vec;

    fn toy() -> Atlas {
        parse_atlas("toy", TOY).expect("toy atlas parses")
    }

    fn skeleton<'a>(atlas: &'a Atlas, placements: &[Placement]) -> Patch<'a> {
        let mut p = Patch::new(atlas, None, BoundaryPolicy::Open);
        for &pl in placements {
            p.place_unchecked(pl).expect("fixture placements are disjoint");
        }
        p
    }

    fn trilobite(rot: Rotation, x: i64, y: i64) -> Placement {
        Placement::new(TileKind::Trilobite, rot, cell(x, y))
    }

    fn crab(rot: Rotation, x: i64, y: i64) -> Placement {
        Placement::new(TileKind::Crab, rot, cell(x, y))
    }

    #[test]
    fn zero_levels_is_identity() {
        let atlas = toy();
        let seed = skeleton(&atlas, &[trilobite(Rotation::R0, 1, 1)]);
        let out = inflate(&seed, 0).unwrap();
        assert_eq!(out.placements(), seed.placements());
    }

    #[test]
    fn inflation_multiplies_trilobites_fourfold() {
        let atlas = toy();
        let seed = skeleton(&atlas, &[trilobite(Rotation::R0, 1, 1)]);
        for k in 1..=3 {
            let out = inflate(&seed, k).unwrap();
            assert_eq!(out.placements().len(), 4usize.pow(k));
            assert!(out
                .placements()
                .iter()
                .all(|pl| pl.kind == TileKind::Trilobite));
        }
    }

    #[test]
    fn crab_input_has_no_expansion() {
        let atlas = toy();
        let seed = skeleton(&atlas, &[crab(Rotation::R0, 0, 0)]);
        assert_eq!(
            inflate(&seed, 1).err(),
            Some(InflateError::TemplateMismatch {
                placement: crab(Rotation::R0, 0, 0)
            })
        );
    }

    #[test]
    fn compose_inverts_one_inflation() {
        let atlas = toy();
        for rot in Rotation::ALL {
            let seed_pl = trilobite(rot, 1, 1);
            let seed = skeleton(&atlas, &[seed_pl]);
            let fine = inflate(&seed, 1).unwrap();
            let s = compose(&fine).unwrap();
            assert_eq!(s.level, 2);
            assert_eq!(s.supertiles, vec![seed_pl]);
            assert_eq!(s.witness_tiles, vec![vec![0, 1, 2, 3]]);
            assert!(s.unwitnessed.is_empty());
        }
    }

    #[test]
    fn compose_inverts_two_inflations() {
        let atlas = toy();
        let seed_pl = trilobite(Rotation::R0, 1, 1);
        let seed = skeleton(&atlas, &[seed_pl]);
        let fine = inflate(&seed, 2).unwrap();
        let s = compose(&fine).unwrap();

        let mut expected = template_children(&atlas, seed_pl);
        expected.sort_unstable();
        assert_eq!(s.supertiles, expected);

        // The witness sets partition all sixteen trilobites.
        let mut seen: Vec<u32> = s.witness_tiles.iter().flatten().copied().collect();
        seen.sort_unstable();
        assert_eq!(seen, (0..16).collect::<Vec<_>>());
        assert!(s.unwitnessed.is_empty());
    }

    #[test]
    fn lone_trilobite_is_unclaimed() {
        let atlas = toy();
        let patch = skeleton(&atlas, &[trilobite(Rotation::R0, 1, 1)]);
        assert_eq!(
            compose(&patch),
            Err(ComposeError::Uncomposable {
                id: 0,
                reason: ComposeReason::Unclaimed
            })
        );
    }

    #[test]
    fn collar_conflicts_are_detected() {
        // Two extra collar slots whose emissions collide between a rotation-0
        // trilobite and its rotation-1 sibling: slot (2,-1) of the first and
        // slot (-1,2) of the second both land on the free cell between their
        // blocks, with different crab orientations.
        let text = format!("{TOY}\ncollar 2 -1 0\ncollar -1 2 0\n");
        let atlas = parse_atlas("toy-collared", &text).expect("toy-with-collar parses");
        let seed = skeleton(&atlas, &[trilobite(Rotation::R0, 1, 1)]);
        match inflate(&seed, 1) {
            Err(InflateError::CollarConflict { .. }) => {}
            other => panic!("expected a collar conflict, got {other:?}"),
        }
    }

    #[test]
    fn misaligned_supertile_is_flagged() {
        let atlas = toy();
        let seed = skeleton(&atlas, &[trilobite(Rotation::R0, 1, 1)]);
        let fine = inflate(&seed, 1).unwrap();
        let mut s = compose(&fine).unwrap();
        s.supertiles[0].anchor = s.supertiles[0].anchor + vec2(0, 1);
        let report = verify_super_axioms(&s, &fine);
        assert!(report.violations.iter().any(|v| matches!(
            v,
            Violation::SupertileMisaligned { .. }
        )));
    }

    #[test]
    fn aligned_super_level_has_no_alignment_violation() {
        let atlas = toy();
        let seed = skeleton(&atlas, &[trilobite(Rotation::R0, 1, 1)]);
        let fine = inflate(&seed, 2).unwrap();
        let s = compose(&fine).unwrap();
        let report = verify_super_axioms(&s, &fine);
        assert!(!report.violations.iter().any(|v| matches!(
            v,
            Violation::SupertileMisaligned { .. } | Violation::SupertileAssembly { .. }
        )));
    }

    /// Two trilobites whose tips are hand-covered to read TTO then OTT,
    /// two cells apart on the main diagonal, plus helper tiles whose own
    /// codes stay undetermined.
    fn chain_fixture(atlas: &Atlas) -> Patch<'_> {
        skeleton(
            atlas,
            &[
                trilobite(Rotation::R0, 0, 0),   // reads TTO
                trilobite(Rotation::R0, 2, 2),   // reads OTT
                trilobite(Rotation::R0, -1, 2),  // covers tip (-1,2) of the first
                trilobite(Rotation::R0, -2, -2), // covers tip (-1,-1) of the first
                trilobite(Rotation::R0, 4, 1),   // covers tip (4,1) of the second
                crab(Rotation::R0, 2, -1),
                crab(Rotation::R0, 1, 4),
            ],
        )
    }

    #[test]
    fn alternating_pair_forms_one_chain() {
        let atlas = toy();
        let patch = chain_fixture(&atlas);
        let chains = detect_chains(&patch);
        assert_eq!(chains.len(), 1);
        let chain = &chains[0];
        assert_eq!(chain.direction, vec2(1, 1));
        assert_eq!(chain.members, vec![0, 1]);
        assert_eq!(
            chain.tags,
            vec![
                NeighborCode::parse("TTO").unwrap(),
                NeighborCode::parse("OTT").unwrap()
            ]
        );
    }

    #[test]
    fn chain_codes_block_composition() {
        let atlas = toy();
        let patch = chain_fixture(&atlas);
        match compose(&patch) {
            Err(ComposeError::PreconditionCensus { code, .. }) => {
                assert_eq!(code, NeighborCode::parse("TTO").unwrap());
            }
            other => panic!("expected a census precondition failure, got {other:?}"),
        }
    }

    #[test]
    fn frameless_patch_cannot_span() {
        let atlas = toy();
        let patch = chain_fixture(&atlas);
        let chains = detect_chains(&patch);
        assert!(matches!(
            shift_halfplane(&patch, &chains[0]),
            Err(ShiftError::ChainNotSpanning)
        ));
    }
}
