//! Forced-move propagation to a fixpoint.
//!
//! A target (unoccupied region cell, or unsatisfied corner of a region cell)
//! with exactly one legal completion forces that completion; a target with
//! none is a contradiction. Because forced placements are entailed by every
//! extension of the patch, the fixpoint does not depend on the order targets
//! are visited; [`propagate_shuffled`] exists so tests can exercise exactly
//! that claim.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::grid::{corners_of_cell, CellCoord};

use super::{DeductionTrace, Patch, Target};

/// How a propagation run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PropagateOutcome {
    /// No target has fewer than two completions left.
    Fixpoint,
    /// `at` has no legal completion; recorded as the trace's final step.
    Contradiction { at: Target },
}

/// The propagation targets spanned by `region`: the cells themselves plus
/// every corner of a region cell all four of whose quadrant cells exist.
/// Everything is canonicalized, deduplicated, and ordered.
fn targets_of(patch: &Patch, region: &[CellCoord]) -> Vec<Target> {
    let mut set: BTreeSet<Target> = BTreeSet::new();
    for &c in region {
        set.insert(Target::Cell(patch.canon_cell(c)));
        for p in corners_of_cell(c) {
            let interior = crate::grid::cells_touching(p)
                .into_iter()
                .all(|n| patch.cell_exists(n));
            if interior {
                set.insert(Target::Corner(patch.canon_corner(p)));
            }
        }
    }
    set.into_iter().collect()
}

/// Is this target still open? Occupied cells and satisfied corners are done.
fn target_open(patch: &Patch, t: Target) -> bool {
    match t {
        Target::Cell(c) => !patch.is_occupied(c),
        Target::Corner(p) => {
            let ev = patch.corner_eval(p);
            ev.state != super::CornerState::Satisfied
        }
    }
}

/// One deterministic pass-until-quiet propagation, appending FORCED (and a
/// final CONTRADICTION) to `trace`. Used in place by the search.
pub(crate) fn propagate_into(
    patch: &mut Patch,
    region: &[CellCoord],
    trace: &mut DeductionTrace,
) -> PropagateOutcome {
    run(patch, region, trace, &mut |_pass, _targets| {})
}

/// As [`propagate_into`], but each sweep visits targets in an order drawn
/// from `seed` (splitmix64-driven Fisher-Yates).
fn run(
    patch: &mut Patch,
    region: &[CellCoord],
    trace: &mut DeductionTrace,
    reorder: &mut dyn FnMut(u64, &mut [Target]),
) -> PropagateOutcome {
    let base_targets = targets_of(patch, region);
    let mut pass = 0u64;
    loop {
        let mut targets = base_targets.clone();
        reorder(pass, &mut targets);
        pass += 1;
        let mut acted = false;
        for &t in &targets {
            if !target_open(patch, t) {
                continue;
            }
            let lc = patch.legal_completions(t);
            match lc.len() {
                0 => {
                    trace.push_contradiction(t);
                    return PropagateOutcome::Contradiction { at: t };
                }
                1 => {
                    let pl = lc[0];
                    patch
                        .place(pl)
                        .expect("a legal completion must be placeable");
                    trace.push_forced(t, pl);
                    acted = true;
                }
                _ => {}
            }
        }
        if !acted {
            return PropagateOutcome::Fixpoint;
        }
    }
}

/// Propagate forced moves over `region` on a copy of `patch`. The returned
/// trace begins with the input placements as GIVEN steps, so it replays to
/// the returned patch from scratch.
pub fn propagate<'a>(
    patch: &Patch<'a>,
    region: &[CellCoord],
) -> (Patch<'a>, DeductionTrace, PropagateOutcome) {
    let mut out = patch.clone();
    let mut trace = DeductionTrace::new();
    for &pl in patch.placements() {
        trace.push_given(pl);
    }
    let outcome = propagate_into(&mut out, region, &mut trace);
    (out, trace, outcome)
}

/// As [`propagate`], but with the per-sweep target order shuffled from
/// `seed`. The final placement set is the same as [`propagate`]'s whenever
/// the run ends in a fixpoint — forced moves hold in every extension, so the
/// closure is order-independent.
pub fn propagate_shuffled<'a>(
    patch: &Patch<'a>,
    region: &[CellCoord],
    seed: u64,
) -> (Patch<'a>, DeductionTrace, PropagateOutcome) {
    let mut out = patch.clone();
    let mut trace = DeductionTrace::new();
    for &pl in patch.placements() {
        trace.push_given(pl);
    }
    let mut reorder = move |pass: u64, ts: &mut [Target]| {
        let mut state = seed ^ pass.wrapping_mul(0x9e3779b97f4a7c15);
        let mut next = move || {
            // splitmix64
            state = state.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            z ^ (z >> 31)
        };
        for i in (1..ts.len()).rev() {
            let j = (next() % (i as u64 + 1)) as usize;
            ts.swap(i, j);
        }
    };
    let outcome = run(&mut out, region, &mut trace, &mut reorder);
    (out, trace, outcome)
}
