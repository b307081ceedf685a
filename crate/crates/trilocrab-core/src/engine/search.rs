//! Depth-first case analysis over a finite region.
//!
//! The search alternates propagation to a fixpoint with a case split on the
//! first unoccupied region cell (in canonical order). Splitting on a cell
//! the region must cover makes the solution sets of sibling branches
//! disjoint — each branch places a different tile over that cell — so ALL
//! mode counts every completion exactly once. REFUTE builds the flat proof
//! tree as a [`DeductionTrace`] that [`super::replay`] re-checks without
//! searching.

use alloc::vec::Vec;

use crate::atlas::Placement;
use crate::grid::CellCoord;

use super::propagate::propagate_into;
use super::{DeductionTrace, Patch, PropagateOutcome, SubcaseOutcome, Target};

/// What the caller wants from the region.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    /// Stop at the first completion.
    First,
    /// Enumerate every completion, in canonical order.
    All,
    /// Count completions without storing them.
    Count,
    /// Establish that no completion exists; a found completion is reported
    /// as a witness, not an error.
    Refute,
}

/// Node allowance: each subcase placement tried costs one node. Forced
/// placements are free — they are implied, not chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_nodes: u64,
}

impl Budget {
    pub const UNLIMITED: Budget = Budget {
        max_nodes: u64::MAX,
    };

    pub fn nodes(max_nodes: u64) -> Budget {
        Budget { max_nodes }
    }
}

/// The verdict of a finished (or exhausted) search.
#[derive(Clone, Debug)]
pub enum Verdict {
    /// No completion of the region exists; `proof` replays the refutation.
    Refuted { proof: DeductionTrace },
    /// A completion exists. `solution` is its full placement list (sorted);
    /// `trace` is the live derivation path that reached it.
    Satisfiable {
        solution: Vec<Placement>,
        trace: DeductionTrace,
    },
    /// Every completion, each as a sorted placement list, in lexicographic
    /// order by (first covered cell, placement) sequences.
    Solutions { solutions: Vec<Vec<Placement>> },
    /// How many completions exist.
    Count { solutions: u64 },
    /// The node budget ran out before the question was settled.
    OutOfBudget,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub verdict: Verdict,
    /// Subcase placements tried.
    pub nodes: u64,
}

enum Flow {
    /// Branch refuted (trace holds the contradictions).
    Dead,
    /// Stop the whole search (FIRST/REFUTE found a completion).
    FoundStop,
    /// Subtree fully explored (ALL/COUNT), at least one completion in it.
    Explored,
}

struct Searcher<'p, 'at> {
    patch: &'p mut Patch<'at>,
    region: &'p [CellCoord],
    mode: SearchMode,
    max_nodes: u64,
    nodes: u64,
    trace: DeductionTrace,
    solutions: Vec<Vec<Placement>>,
    count: u64,
    first_solution: Option<Vec<Placement>>,
}

/// Placements sorted the way completions are reported: by the first cell
/// the placement covers, then by the placement itself.
fn canonical_solution(patch: &Patch, raw: &[Placement]) -> Vec<Placement> {
    let mut v: Vec<(CellCoord, Placement)> = raw
        .iter()
        .map(|&pl| {
            let first = patch
                .atlas()
                .cells_of(pl)
                .map(|c| patch.canon_cell(c))
                .min()
                .expect("tiles have nonempty footprints");
            (first, pl)
        })
        .collect();
    v.sort();
    v.into_iter().map(|(_, pl)| pl).collect()
}

impl<'p, 'at> Searcher<'p, 'at> {
    fn branch_cell(&self) -> Option<CellCoord> {
        self.region
            .iter()
            .copied()
            .find(|&c| !self.patch.is_occupied(c))
    }

    fn record_solution(&mut self) -> Flow {
        match self.mode {
            SearchMode::First | SearchMode::Refute => {
                self.first_solution = Some(canonical_solution(self.patch, self.patch.placements()));
                Flow::FoundStop
            }
            SearchMode::All => {
                self.solutions
                    .push(canonical_solution(self.patch, self.patch.placements()));
                Flow::Explored
            }
            SearchMode::Count => {
                self.count += 1;
                Flow::Explored
            }
        }
    }

    fn dfs(&mut self) -> Result<Flow, ()> {
        if let PropagateOutcome::Contradiction { .. } =
            propagate_into(self.patch, self.region, &mut self.trace)
        {
            return Ok(Flow::Dead);
        }
        let Some(c) = self.branch_cell() else {
            return Ok(self.record_solution());
        };
        let target = Target::Cell(self.patch.canon_cell(c));
        let options = self.patch.legal_completions(target);
        debug_assert!(
            options.len() >= 2,
            "propagation fixpoint leaves only multi-option targets"
        );
        let mut any_explored = false;
        for pl in options {
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                return Err(());
            }
            self.trace.push_subcase_open(target, pl);
            let cp = self.patch.checkpoint();
            self.patch
                .place(pl)
                .expect("a legal completion must be placeable");
            let flow = self.dfs()?;
            match flow {
                Flow::FoundStop => return Ok(Flow::FoundStop),
                Flow::Dead => {
                    self.patch.retract_to(cp);
                    self.trace.push_subcase_close(SubcaseOutcome::Contradicted);
                }
                Flow::Explored => {
                    any_explored = true;
                    self.patch.retract_to(cp);
                    self.trace.push_subcase_close(SubcaseOutcome::Completed);
                }
            }
        }
        Ok(if any_explored { Flow::Explored } else { Flow::Dead })
    }
}

/// Search for completions of `region` (cells the result must cover) on top
/// of `patch`, which is left untouched. See [`SearchMode`] for what each
/// mode returns; the node budget makes every answer either definitive or
/// explicitly [`Verdict::OutOfBudget`] — an exhausted budget is never
/// reported as a refutation.
pub fn search_region(
    patch: &Patch<'_>,
    region: &[CellCoord],
    mode: SearchMode,
    budget: Budget,
) -> SearchOutcome {
    let mut work = patch.clone();
    let mut region: Vec<CellCoord> = region.iter().map(|&c| work.canon_cell(c)).collect();
    region.sort();
    region.dedup();

    let mut s = Searcher {
        patch: &mut work,
        region: &region,
        mode,
        max_nodes: budget.max_nodes,
        nodes: 0,
        trace: DeductionTrace::new(),
        solutions: Vec::new(),
        count: 0,
        first_solution: None,
    };
    for &pl in patch.placements() {
        s.trace.push_given(pl);
    }

    let flow = s.dfs();
    let nodes = s.nodes;
    let verdict = match flow {
        Err(()) => Verdict::OutOfBudget,
        Ok(Flow::FoundStop) => Verdict::Satisfiable {
            solution: s.first_solution.expect("FoundStop records a solution"),
            trace: s.trace,
        },
        Ok(Flow::Dead) => match mode {
            SearchMode::First | SearchMode::Refute => Verdict::Refuted { proof: s.trace },
            SearchMode::All => Verdict::Solutions {
                solutions: Vec::new(),
            },
            SearchMode::Count => Verdict::Count { solutions: 0 },
        },
        Ok(Flow::Explored) => match mode {
            SearchMode::All => {
                let mut solutions = s.solutions;
                solutions.sort();
                Verdict::Solutions { solutions }
            }
            SearchMode::Count => Verdict::Count { solutions: s.count },
            SearchMode::First | SearchMode::Refute => {
                unreachable!("FIRST/REFUTE stop on the first completion")
            }
        },
    };
    SearchOutcome { verdict, nodes }
}
