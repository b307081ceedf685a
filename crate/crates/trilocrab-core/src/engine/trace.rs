//! Deduction traces: the machine-checkable record of a derivation.
//!
//! A trace is a flat, numbered list of steps. GIVEN steps lay down the seed;
//! FORCED steps record unique completions; SUBCASE_OPEN/SUBCASE_CLOSE pairs
//! bracket the branches of a case split, nesting to arbitrary depth; a
//! CONTRADICTION step ends a branch. A trace whose every branch ends in a
//! contradiction is a refutation tree, and [`replay`] re-checks it against
//! the atlas without redoing any search: each forced step must be the unique
//! legal completion of its recorded target, each contradiction target must
//! really have no completions, and the branches opened at a split must cover
//! the split target's completion set exactly.

use alloc::vec::Vec;
use core::fmt;

use crate::atlas::Placement;

use super::{Patch, Target};

/// How a closed subcase ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubcaseOutcome {
    /// The branch ran into a contradiction (directly or through its own
    /// exhausted sub-splits).
    Contradicted,
    /// The branch was recognized as an instance of an earlier case.
    Reduced,
    /// The branch completed its region.
    Completed,
}

/// One numbered entry of a [`DeductionTrace`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceStep {
    /// Part of the seed configuration.
    Given { step: u32, placement: Placement },
    /// The unique legal completion at `target` when it was applied.
    Forced {
        step: u32,
        target: Target,
        placement: Placement,
    },
    /// One branch of the case split over `target` begins here.
    SubcaseOpen {
        step: u32,
        target: Target,
        placement: Placement,
    },
    /// The innermost open branch ends here.
    SubcaseClose { step: u32, outcome: SubcaseOutcome },
    /// The current case is an instance of the case opened at step `case`
    /// (or of an external case when rendered standalone). Accepted only by
    /// checkers that know the reduction argument; [`replay`] rejects it.
    ReducedTo { step: u32, case: u32 },
    /// `at` has no legal completion; the current branch is dead.
    Contradiction { step: u32, at: Target },
}

impl TraceStep {
    pub fn step_no(&self) -> u32 {
        match *self {
            TraceStep::Given { step, .. }
            | TraceStep::Forced { step, .. }
            | TraceStep::SubcaseOpen { step, .. }
            | TraceStep::SubcaseClose { step, .. }
            | TraceStep::ReducedTo { step, .. }
            | TraceStep::Contradiction { step, .. } => step,
        }
    }

    /// The placement this step adds, if any.
    pub fn placement(&self) -> Option<Placement> {
        match *self {
            TraceStep::Given { placement, .. }
            | TraceStep::Forced { placement, .. }
            | TraceStep::SubcaseOpen { placement, .. } => Some(placement),
            _ => None,
        }
    }
}

/// An ordered derivation record; see the module docs for the grammar.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DeductionTrace {
    steps: Vec<TraceStep>,
    next: u32,
}

impl DeductionTrace {
    pub fn new() -> DeductionTrace {
        DeductionTrace::default()
    }

    pub fn steps(&self) -> &[TraceStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    fn bump(&mut self) -> u32 {
        let n = self.next;
        self.next += 1;
        n
    }

    pub fn push_given(&mut self, placement: Placement) {
        let step = self.bump();
        self.steps.push(TraceStep::Given { step, placement });
    }

    pub fn push_forced(&mut self, target: Target, placement: Placement) {
        let step = self.bump();
        self.steps.push(TraceStep::Forced {
            step,
            target,
            placement,
        });
    }

    pub fn push_subcase_open(&mut self, target: Target, placement: Placement) -> u32 {
        let step = self.bump();
        self.steps.push(TraceStep::SubcaseOpen {
            step,
            target,
            placement,
        });
        step
    }

    pub fn push_subcase_close(&mut self, outcome: SubcaseOutcome) {
        let step = self.bump();
        self.steps.push(TraceStep::SubcaseClose { step, outcome });
    }

    pub fn push_reduced_to(&mut self, case: u32) {
        let step = self.bump();
        self.steps.push(TraceStep::ReducedTo { step, case });
    }

    pub fn push_contradiction(&mut self, at: Target) {
        let step = self.bump();
        self.steps.push(TraceStep::Contradiction { step, at });
    }

    /// Rebuild a trace from externally supplied steps (e.g. a parsed file).
    /// No renumbering is performed; [`replay`] checks monotonicity.
    pub fn from_steps(steps: Vec<TraceStep>) -> DeductionTrace {
        let next = steps.iter().map(|s| s.step_no() + 1).max().unwrap_or(0);
        DeductionTrace { steps, next }
    }
}

/// Why a trace failed to replay.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReplayError {
    /// Step numbers are not strictly increasing at this step.
    BadStepNumber { step: u32 },
    /// A GIVEN step appeared after deduction began.
    LateGiven { step: u32 },
    /// A placement could not be applied to the patch.
    PlaceFailed { step: u32 },
    /// A FORCED placement is not the unique legal completion of its target.
    NotForced { step: u32 },
    /// A CONTRADICTION target still has legal completions.
    NotContradictory { step: u32 },
    /// A SUBCASE_CLOSE with no open branch.
    CloseWithoutOpen { step: u32 },
    /// A sibling SUBCASE_OPEN switched to a different split target.
    SplitTargetChanged { step: u32 },
    /// A subcase placement falls outside the split target's completion set,
    /// or repeats a sibling.
    UnknownSibling { step: u32 },
    /// A branch closed as contradicted without ending in a contradiction or
    /// an exhausted, fully contradicted inner split.
    MissingContradiction { step: u32 },
    /// Steps found after the derivation was already refuted.
    TrailingSteps { step: u32 },
    /// The trace ended with a split partway through its branches, or with a
    /// dead branch never closed.
    TruncatedTrace,
    /// REDUCED_TO steps carry an argument this replayer cannot check.
    ReductionUnverifiable { step: u32 },
}

impl fmt::Display for ReplayError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReplayError::BadStepNumber { step } => {
                write!(f, "step {step}: step numbers must strictly increase")
            }
            ReplayError::LateGiven { step } => {
                write!(f, "step {step}: GIVEN after deduction began")
            }
            ReplayError::PlaceFailed { step } => {
                write!(f, "step {step}: placement rejected by the patch")
            }
            ReplayError::NotForced { step } => write!(
                f,
                "step {step}: placement is not the unique completion of its target"
            ),
            ReplayError::NotContradictory { step } => {
                write!(f, "step {step}: contradiction target still has completions")
            }
            ReplayError::CloseWithoutOpen { step } => {
                write!(f, "step {step}: SUBCASE_CLOSE without an open branch")
            }
            ReplayError::SplitTargetChanged { step } => {
                write!(f, "step {step}: sibling subcase changed the split target")
            }
            ReplayError::UnknownSibling { step } => write!(
                f,
                "step {step}: subcase placement not among the split's completions"
            ),
            ReplayError::MissingContradiction { step } => {
                write!(f, "step {step}: branch closed as contradicted but is not")
            }
            ReplayError::TrailingSteps { step } => {
                write!(f, "step {step}: steps after the derivation was refuted")
            }
            ReplayError::TruncatedTrace => write!(f, "trace ended inside an open refutation"),
            ReplayError::ReductionUnverifiable { step } => {
                write!(f, "step {step}: REDUCED_TO cannot be checked by replay")
            }
        }
    }
}

impl core::error::Error for ReplayError {}

/// What a successful replay established.
#[derive(Debug)]
pub enum ReplayOutcome<'a> {
    /// Every branch ended in a verified contradiction: the seed admits no
    /// completion at the targets the trace split on.
    Refuted,
    /// The trace ends on a live branch; the patch holds its placements.
    Open(Patch<'a>),
}

/// One case split in progress during replay.
struct Frame {
    target: Target,
    /// Completion set at the moment the split was opened.
    expected: Vec<Placement>,
    /// Which members of `expected` have been tried so far.
    tried: Vec<Placement>,
    checkpoint: usize,
    /// A branch of this split is currently open (placed, not yet closed).
    in_branch: bool,
    /// The open branch has hit a contradiction (directly or via an
    /// exhausted inner split).
    branch_dead: bool,
    /// Some closed branch of this split ended alive (completed/reduced).
    any_live: bool,
}

/// Re-check `trace` step by step against `base` (an empty patch with the
/// right atlas, window, policy, and topology). No search is performed; every
/// claim in the trace is verified locally against the patch kernel.
pub fn replay<'a>(
    mut base: Patch<'a>,
    trace: &DeductionTrace,
) -> Result<ReplayOutcome<'a>, ReplayError> {
    let mut last: Option<u32> = None;
    let mut deduction_started = false;
    let mut frames: Vec<Frame> = Vec::new();
    // The toplevel derivation hit a contradiction or exhausted a split whose
    // branches all died: the seed itself is refuted.
    let mut root_dead = false;

    for st in trace.steps() {
        let step = st.step_no();
        if last.is_some_and(|l| step <= l) {
            return Err(ReplayError::BadStepNumber { step });
        }
        last = Some(step);
        if root_dead {
            return Err(ReplayError::TrailingSteps { step });
        }

        match *st {
            TraceStep::Given { placement, .. } => {
                if deduction_started {
                    return Err(ReplayError::LateGiven { step });
                }
                base.place(placement)
                    .map_err(|_| ReplayError::PlaceFailed { step })?;
            }
            TraceStep::Forced {
                target, placement, ..
            } => {
                deduction_started = true;
                let lc = base.legal_completions(target);
                if lc.len() != 1 || lc[0] != placement {
                    return Err(ReplayError::NotForced { step });
                }
                base.place(placement)
                    .map_err(|_| ReplayError::PlaceFailed { step })?;
            }
            TraceStep::Contradiction { at, .. } => {
                deduction_started = true;
                if !base.legal_completions(at).is_empty() {
                    return Err(ReplayError::NotContradictory { step });
                }
                match frames.last_mut() {
                    Some(f) if f.in_branch => f.branch_dead = true,
                    Some(_) => return Err(ReplayError::CloseWithoutOpen { step }),
                    None => root_dead = true,
                }
            }
            TraceStep::SubcaseOpen {
                target, placement, ..
            } => {
                deduction_started = true;
                let sibling = matches!(frames.last(), Some(f) if !f.in_branch);
                if sibling {
                    if frames.last().unwrap().target != target {
                        return Err(ReplayError::SplitTargetChanged { step });
                    }
                } else {
                    let expected = base.legal_completions(target);
                    frames.push(Frame {
                        target,
                        expected,
                        tried: Vec::new(),
                        checkpoint: base.checkpoint(),
                        in_branch: false,
                        branch_dead: false,
                        any_live: false,
                    });
                }
                let f = frames.last_mut().unwrap();
                if !f.expected.contains(&placement) || f.tried.contains(&placement) {
                    return Err(ReplayError::UnknownSibling { step });
                }
                f.tried.push(placement);
                f.in_branch = true;
                f.branch_dead = false;
                base.place(placement)
                    .map_err(|_| ReplayError::PlaceFailed { step })?;
            }
            TraceStep::SubcaseClose { outcome, .. } => {
                deduction_started = true;
                let Some(f) = frames.last_mut() else {
                    return Err(ReplayError::CloseWithoutOpen { step });
                };
                if !f.in_branch {
                    return Err(ReplayError::CloseWithoutOpen { step });
                }
                if outcome == SubcaseOutcome::Contradicted && !f.branch_dead {
                    return Err(ReplayError::MissingContradiction { step });
                }
                if outcome != SubcaseOutcome::Contradicted {
                    f.any_live = true;
                }
                base.retract_to(f.checkpoint);
                f.in_branch = false;
                f.branch_dead = false;
                if f.tried.len() == f.expected.len() {
                    // Split exhausted. If every branch died, the split point
                    // is a verified dead end for the enclosing branch.
                    let refuting = !f.any_live;
                    frames.pop();
                    if refuting {
                        match frames.last_mut() {
                            Some(parent) if parent.in_branch => parent.branch_dead = true,
                            Some(_) => return Err(ReplayError::CloseWithoutOpen { step }),
                            None => root_dead = true,
                        }
                    }
                }
            }
            TraceStep::ReducedTo { .. } => {
                return Err(ReplayError::ReductionUnverifiable { step });
            }
        }
    }

    if root_dead {
        return Ok(ReplayOutcome::Refuted);
    }
    // A live ending is a single open path: every frame mid-branch, none dead.
    if frames.iter().any(|f| !f.in_branch || f.branch_dead) {
        return Err(ReplayError::TruncatedTrace);
    }
    Ok(ReplayOutcome::Open(base))
}
