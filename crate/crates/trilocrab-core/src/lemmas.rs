//! Lemma suites: the case analyses behind the tiling argument, written as
//! data and executed by the engine.
//!
//! A suite file holds named lemmas. Each lemma is a seed drawn as a glyph
//! grid (with wildcards for "a trilobite in any orientation" and friends),
//! an expected outcome, and a schedule of window radii. The runner expands
//! the wildcards into concrete seed placements, then certifies the claim:
//!
//! * `forbidden` — every expanded seed admits no completion. Seeds are
//!   refuted by exhaustive search with iterative deepening over the radius
//!   schedule, and every refutation's deduction trace is re-checked by the
//!   independent replayer before the verdict is claimed. A seed that
//!   contains a rotated/translated copy of an earlier forbidden seed is
//!   closed as `REDUCED` without a search — the "later cases reduce to the
//!   first" bookkeeping.
//! * `alternatives` — the completions at a designated target, each filtered
//!   by whether the window still completes with it, equal exactly the
//!   listed follow-up patterns ("we must have ..., ..., or ...").
//! * `classified` — every completion's interior trilobite census is a
//!   subset of the listed neighbor codes.
//! * `chains` — in every completion, each sufficiently interior `TTO`/`OTT`
//!   trilobite lies on an alternating chain that runs to the window rim.
//!
//! Searches never over-claim: a refutation found at any radius is final
//! (a larger window only adds constraints), while an exhausted budget or
//! radius schedule yields `INCONCLUSIVE`, never a verdict.
//!
//! ## Suite format
//!
//! ```text
//! suite NAME
//! legend <glyph> trilobite <rot|*>      (a 2x2 block of this glyph)
//! legend <glyph> crab <rot|*>           (each cell its own crab)
//! legend <glyph> one-of T0 C2 ...       (classes share one tile kind)
//! legend <glyph> trilobite covering     (any trilobite covering this cell)
//! legend <glyph> crab covering          (any crab covering this cell)
//! legend <glyph> tile *                 (anything covering this cell)
//! legend <glyph> empty | free
//!
//! [lemma NAME]
//! expect forbidden | alternatives | classified CODE... | chains
//! radii 2 3 4
//! budget 100000                          (nodes per search, optional)
//! margin 3                               (interior margin, optional)
//! pattern [X Y]                          (optional top-left origin)
//! <glyph rows, top row first>
//! end
//! target cell X Y | target corner X Y   (alternatives only)
//! alternative [X Y]
//! <rows>
//! end
//! ```
//!
//! Grids use `.` or space for free cells. The top-left glyph of a grid sits
//! at the origin (default `(0, 0)`), x grows rightward and y grows *upward*,
//! so lower rows sit at decreasing y. All grids of one lemma share this
//! frame, which is also the frame `target` coordinates use. A row equal to
//! `end` terminates the grid, so glyphs are best kept to single letters and
//! digits. Lines starting with `#` are comments.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::atlas::{Atlas, Placement, TileKind};
use crate::engine::{
    propagate, replay, search_region, Budget, BoundaryPolicy, Census, DeductionTrace,
    NeighborCode, Patch, PropagateOutcome, ReplayOutcome, SearchMode, Target, TraceStep, Verdict,
    Window,
};
use crate::grid::{cell, cells_touching, vec2, CellCoord, Rotation};
use crate::hierarchy::detect_chains;

const DEFAULT_BUDGET: u64 = 1_000_000;
/// Trilobite diameter plus one: codes of trilobites at least this far from
/// the rim are genuine.
const DEFAULT_MARGIN: i64 = 3;

/// What one pattern entry demands of the tiling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PatternCell {
    /// This exact oriented tile.
    Exact { kind: TileKind, rot: Rotation },
    /// A trilobite in any of the four orientations.
    AnyTrilobite,
    /// One of the listed oriented classes (all of one tile kind).
    OneOf(Vec<(TileKind, Rotation)>),
    /// Any placement of this kind covering the cell, in any alignment.
    Covering(TileKind),
    /// Any placement covering this cell, of either kind and any alignment.
    AnyTile,
    /// The cell is released from the completion obligation: searches do not
    /// require it covered (they remain free to cover it).
    MustBeEmpty,
    /// No constraint; not part of the pattern.
    Free,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Region {
    spec: PatternCell,
    /// The glyph's connected cells: a 2x2 block for trilobite specs, a
    /// single cell otherwise.
    cells: Vec<CellCoord>,
}

/// A finite figure: tile demands on some cells, drawn from a glyph grid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Pattern {
    regions: Vec<Region>,
    empties: Vec<CellCoord>,
}

impl Pattern {
    /// The pattern as a map over its constrained cells.
    pub fn cell_map(&self) -> BTreeMap<CellCoord, PatternCell> {
        let mut out = BTreeMap::new();
        for r in &self.regions {
            for &c in &r.cells {
                out.insert(c, r.spec.clone());
            }
        }
        for &c in &self.empties {
            out.insert(c, PatternCell::MustBeEmpty);
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty() && self.empties.is_empty()
    }

    fn cells(&self) -> impl Iterator<Item = CellCoord> + '_ {
        self.regions
            .iter()
            .flat_map(|r| r.cells.iter().copied())
            .chain(self.empties.iter().copied())
    }
}

/// The claim a lemma makes about its seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expectation {
    /// No completion contains the seed.
    Forbidden,
    /// The completions at `target` are exactly the listed extensions.
    ForcedAlternatives {
        target: Target,
        options: Vec<Pattern>,
    },
    /// Interior censuses of all completions stay within these codes.
    Classified { codes: Vec<NeighborCode> },
    /// Interior `*TO` trilobites of all completions lie on window-spanning
    /// alternating chains.
    Chains,
}

/// One executable lemma.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaSpec {
    pub name: String,
    pub seed: Pattern,
    pub expected: Expectation,
    /// Strictly increasing window radii for iterative deepening.
    pub radii: Vec<i64>,
    /// Node budget per search call.
    pub budget: u64,
    /// Interior margin override for `classified`/`chains`.
    pub margin: Option<i64>,
}

/// A parsed suite file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Suite {
    pub name: String,
    pub lemmas: Vec<LemmaSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteParseError {
    pub line: usize,
    pub message: String,
}

impl core::fmt::Display for SuiteParseError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "suite line {}: {}", self.line, self.message)
    }
}

impl core::error::Error for SuiteParseError {}

fn err(line: usize, message: impl Into<String>) -> SuiteParseError {
    SuiteParseError {
        line,
        message: message.into(),
    }
}

fn parse_rot(tok: &str, line: usize) -> Result<Option<Rotation>, SuiteParseError> {
    match tok {
        "*" => Ok(None),
        "0" | "1" | "2" | "3" => Ok(Some(Rotation::new(tok.parse::<i64>().unwrap()))),
        other => Err(err(line, format!("bad rotation `{other}`"))),
    }
}

fn parse_class(tok: &str, line: usize) -> Result<(TileKind, Rotation), SuiteParseError> {
    let mut chars = tok.chars();
    let kind = match chars.next() {
        Some('T') => TileKind::Trilobite,
        Some('C') => TileKind::Crab,
        _ => return Err(err(line, format!("bad class `{tok}` (want T0..T3, C0..C3)"))),
    };
    match chars.as_str() {
        "0" | "1" | "2" | "3" => Ok((kind, Rotation::new(chars.as_str().parse().unwrap()))),
        _ => Err(err(line, format!("bad class `{tok}` (want T0..T3, C0..C3)"))),
    }
}

fn parse_legend_spec(toks: &[&str], line: usize) -> Result<PatternCell, SuiteParseError> {
    match toks {
        ["free"] => Ok(PatternCell::Free),
        ["empty"] => Ok(PatternCell::MustBeEmpty),
        ["trilobite", "covering"] => Ok(PatternCell::Covering(TileKind::Trilobite)),
        ["crab", "covering"] => Ok(PatternCell::Covering(TileKind::Crab)),
        ["trilobite", r] => Ok(match parse_rot(r, line)? {
            Some(rot) => PatternCell::Exact {
                kind: TileKind::Trilobite,
                rot,
            },
            None => PatternCell::AnyTrilobite,
        }),
        ["crab", r] => Ok(match parse_rot(r, line)? {
            Some(rot) => PatternCell::Exact {
                kind: TileKind::Crab,
                rot,
            },
            None => PatternCell::OneOf(
                Rotation::ALL
                    .iter()
                    .map(|&rot| (TileKind::Crab, rot))
                    .collect(),
            ),
        }),
        ["tile", "*"] => Ok(PatternCell::AnyTile),
        ["one-of", rest @ ..] if !rest.is_empty() => {
            let classes: Vec<(TileKind, Rotation)> = rest
                .iter()
                .map(|t| parse_class(t, line))
                .collect::<Result<_, _>>()?;
            if classes.iter().any(|c| c.0 != classes[0].0) {
                return Err(err(line, "one-of classes must share a tile kind"));
            }
            Ok(PatternCell::OneOf(classes))
        }
        _ => Err(err(line, "bad legend spec")),
    }
}

/// Turns glyph rows into a [`Pattern`] under `legend`. `origin` is the cell
/// of the top-left glyph; y decreases down the rows.
fn pattern_from_rows(
    rows: &[(usize, &str)],
    origin: CellCoord,
    legend: &BTreeMap<char, PatternCell>,
) -> Result<Pattern, SuiteParseError> {
    let mut by_glyph: BTreeMap<char, Vec<CellCoord>> = BTreeMap::new();
    for (row_idx, &(line, row)) in rows.iter().enumerate() {
        for (col, g) in row.chars().enumerate() {
            if g == ' ' {
                continue;
            }
            if g != '.' && !legend.contains_key(&g) {
                return Err(err(line, format!("glyph `{g}` is not in the legend")));
            }
            by_glyph
                .entry(g)
                .or_default()
                .push(origin + vec2(col as i64, -(row_idx as i64)));
        }
    }

    let mut pattern = Pattern::default();
    for (g, cells) in by_glyph {
        let spec = match legend.get(&g) {
            Some(s) => s.clone(),
            None => PatternCell::Free, // '.'
        };
        match spec {
            PatternCell::Free => {}
            PatternCell::MustBeEmpty => pattern.empties.extend(cells),
            PatternCell::Exact {
                kind: TileKind::Crab,
                ..
            }
            | PatternCell::Covering(_)
            | PatternCell::AnyTile => {
                for c in cells {
                    pattern.regions.push(Region {
                        spec: spec.clone(),
                        cells: alloc::vec![c],
                    });
                }
            }
            PatternCell::OneOf(ref classes) if classes[0].0 == TileKind::Crab => {
                for c in cells {
                    pattern.regions.push(Region {
                        spec: spec.clone(),
                        cells: alloc::vec![c],
                    });
                }
            }
            // Trilobite-kinded specs: connected components must be 2x2.
            _ => {
                for block in blocks_of(&cells) {
                    let block = block.map_err(|c| {
                        err(
                            rows.first().map(|&(l, _)| l).unwrap_or(0),
                            format!("glyph `{g}` near {c} must form 2x2 blocks"),
                        )
                    })?;
                    pattern.regions.push(Region {
                        spec: spec.clone(),
                        cells: block,
                    });
                }
            }
        }
    }
    pattern.regions.sort_by(|a, b| a.cells.cmp(&b.cells));
    pattern.empties.sort_unstable();
    Ok(pattern)
}

/// Splits a glyph's cells into orthogonally connected components and
/// demands each is an exact 2x2 block.
fn blocks_of(cells: &[CellCoord]) -> Vec<Result<Vec<CellCoord>, CellCoord>> {
    let set: BTreeSet<CellCoord> = cells.iter().copied().collect();
    let mut seen: BTreeSet<CellCoord> = BTreeSet::new();
    let mut out = Vec::new();
    for &start in &set {
        if seen.contains(&start) {
            continue;
        }
        let mut comp = Vec::new();
        let mut stack = alloc::vec![start];
        seen.insert(start);
        while let Some(c) = stack.pop() {
            comp.push(c);
            for d in [vec2(1, 0), vec2(-1, 0), vec2(0, 1), vec2(0, -1)] {
                let n = c + d;
                if set.contains(&n) && seen.insert(n) {
                    stack.push(n);
                }
            }
        }
        comp.sort_unstable();
        let b = comp[0];
        let want = [b, b + vec2(0, 1), b + vec2(1, 0), b + vec2(1, 1)];
        let mut want = want.to_vec();
        want.sort_unstable();
        if comp == want {
            out.push(Ok(comp));
        } else {
            out.push(Err(start));
        }
    }
    out
}

/// Parses a suite file. See the module docs for the format.
pub fn parse_suite(text: &str) -> Result<Suite, SuiteParseError> {
    enum Block {
        None,
        Pattern(CellCoord),
        Alternative(CellCoord),
    }

    let mut name = "suite".to_string();
    let mut legend: BTreeMap<char, PatternCell> = BTreeMap::new();
    let mut lemmas: Vec<LemmaSpec> = Vec::new();

    // Per-lemma accumulation.
    let mut cur: Option<LemmaSpec> = None;
    let mut expected_kind: Option<&str> = None;
    let mut classified_codes: Vec<NeighborCode> = Vec::new();
    let mut target: Option<Target> = None;
    let mut alternatives: Vec<Pattern> = Vec::new();
    let mut block = Block::None;
    let mut rows: Vec<(usize, &str)> = Vec::new();

    fn finish(
        lemmas: &mut Vec<LemmaSpec>,
        cur: &mut Option<LemmaSpec>,
        expected_kind: &mut Option<&str>,
        classified_codes: &mut Vec<NeighborCode>,
        target: &mut Option<Target>,
        alternatives: &mut Vec<Pattern>,
        line: usize,
    ) -> Result<(), SuiteParseError> {
        let Some(mut spec) = cur.take() else {
            return Ok(());
        };
        spec.expected = match expected_kind.take() {
            None => return Err(err(line, format!("lemma `{}` has no expect line", spec.name))),
            Some("forbidden") => Expectation::Forbidden,
            Some("classified") => Expectation::Classified {
                codes: core::mem::take(classified_codes),
            },
            Some("chains") => Expectation::Chains,
            Some("alternatives") => {
                let Some(t) = target.take() else {
                    return Err(err(line, format!("lemma `{}` has no target", spec.name)));
                };
                if alternatives.is_empty() {
                    return Err(err(
                        line,
                        format!("lemma `{}` lists no alternatives", spec.name),
                    ));
                }
                Expectation::ForcedAlternatives {
                    target: t,
                    options: core::mem::take(alternatives),
                }
            }
            Some(_) => unreachable!(),
        };
        if lemmas.iter().any(|l| l.name == spec.name) {
            return Err(err(line, format!("duplicate lemma name `{}`", spec.name)));
        }
        if spec.radii.is_empty() {
            spec.radii = alloc::vec![2, 3, 4];
        }
        if spec.radii.windows(2).any(|w| w[0] >= w[1]) {
            return Err(err(
                line,
                format!("lemma `{}` radii must strictly increase", spec.name),
            ));
        }
        lemmas.push(spec);
        Ok(())
    }

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let row = raw.trim_end_matches('\r');

        if let Block::Pattern(_) | Block::Alternative(_) = block {
            if row.trim() == "end" {
                let (origin, into_alt) = match block {
                    Block::Pattern(o) => (o, false),
                    Block::Alternative(o) => (o, true),
                    Block::None => unreachable!(),
                };
                let pat = pattern_from_rows(&rows, origin, &legend)?;
                rows.clear();
                block = Block::None;
                let Some(spec) = cur.as_mut() else {
                    return Err(err(line_no, "grid outside a [lemma] section"));
                };
                if into_alt {
                    alternatives.push(pat);
                } else {
                    spec.seed = pat;
                }
            } else {
                rows.push((line_no, row));
            }
            continue;
        }

        let line = row.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }

        if let Some(section) = line.strip_prefix("[lemma ").and_then(|s| s.strip_suffix(']')) {
            finish(
                &mut lemmas,
                &mut cur,
                &mut expected_kind,
                &mut classified_codes,
                &mut target,
                &mut alternatives,
                line_no,
            )?;
            cur = Some(LemmaSpec {
                name: section.trim().to_string(),
                seed: Pattern::default(),
                expected: Expectation::Forbidden,
                radii: Vec::new(),
                budget: DEFAULT_BUDGET,
                margin: None,
            });
            continue;
        }

        let toks: Vec<&str> = line.split_whitespace().collect();
        let int = |t: &str| -> Result<i64, SuiteParseError> {
            t.parse().map_err(|_| err(line_no, format!("bad integer `{t}`")))
        };

        if cur.is_none() {
            match toks[0] {
                "suite" if toks.len() == 2 => name = toks[1].to_string(),
                "legend" if toks.len() >= 3 => {
                    let mut glyphs = toks[1].chars();
                    let (Some(g), None) = (glyphs.next(), glyphs.next()) else {
                        return Err(err(line_no, "legend glyph must be one character"));
                    };
                    if legend
                        .insert(g, parse_legend_spec(&toks[2..], line_no)?)
                        .is_some()
                    {
                        return Err(err(line_no, format!("duplicate legend glyph `{g}`")));
                    }
                }
                other => return Err(err(line_no, format!("unexpected `{other}` in header"))),
            }
            continue;
        }

        let spec = cur.as_mut().unwrap();
        match toks[0] {
            "expect" if toks.len() >= 2 => {
                expected_kind = Some(match toks[1] {
                    "forbidden" => "forbidden",
                    "alternatives" => "alternatives",
                    "chains" => "chains",
                    "classified" => {
                        classified_codes = toks[2..]
                            .iter()
                            .map(|t| {
                                NeighborCode::parse(t)
                                    .ok_or_else(|| err(line_no, format!("bad code `{t}`")))
                            })
                            .collect::<Result<_, _>>()?;
                        "classified"
                    }
                    other => return Err(err(line_no, format!("bad expectation `{other}`"))),
                });
            }
            "radii" if toks.len() >= 2 => {
                spec.radii = toks[1..].iter().map(|t| int(t)).collect::<Result<_, _>>()?;
            }
            "budget" if toks.len() == 2 => {
                spec.budget = int(toks[1])? as u64;
            }
            "margin" if toks.len() == 2 => {
                spec.margin = Some(int(toks[1])?);
            }
            "pattern" if toks.len() == 1 || toks.len() == 3 => {
                let origin = if toks.len() == 3 {
                    cell(int(toks[1])?, int(toks[2])?)
                } else {
                    cell(0, 0)
                };
                block = Block::Pattern(origin);
            }
            "alternative" if toks.len() == 1 || toks.len() == 3 => {
                let origin = if toks.len() == 3 {
                    cell(int(toks[1])?, int(toks[2])?)
                } else {
                    cell(0, 0)
                };
                block = Block::Alternative(origin);
            }
            "target" if toks.len() == 4 => {
                let (x, y) = (int(toks[2])?, int(toks[3])?);
                target = Some(match toks[1] {
                    "cell" => Target::Cell(cell(x, y)),
                    "corner" => Target::Corner(crate::grid::corner(x, y)),
                    other => return Err(err(line_no, format!("bad target kind `{other}`"))),
                });
            }
            other => return Err(err(line_no, format!("bad lemma line `{other} ...`"))),
        }
    }

    if !matches!(block, Block::None) {
        return Err(err(text.lines().count(), "unterminated grid (missing `end`)"));
    }
    finish(
        &mut lemmas,
        &mut cur,
        &mut expected_kind,
        &mut classified_codes,
        &mut target,
        &mut alternatives,
        text.lines().count(),
    )?;

    Ok(Suite { name, lemmas })
}

/// Expands a pattern's wildcards into concrete seeds: the Cartesian product
/// of each region's realizations, kept only if the whole set places legally
/// (and leaves the pattern's released cells untouched), deduplicated, in
/// canonical order.
pub fn expand_wildcards(atlas: &Atlas, pattern: &Pattern) -> Vec<Vec<Placement>> {
    let options: Vec<Vec<Placement>> = pattern
        .regions
        .iter()
        .map(|r| region_options(atlas, r))
        .collect();
    if options.iter().any(|o| o.is_empty()) {
        return Vec::new();
    }

    let mut seeds: BTreeSet<Vec<Placement>> = BTreeSet::new();
    let mut idx = alloc::vec![0usize; options.len()];
    loop {
        let candidate: Vec<Placement> = idx
            .iter()
            .enumerate()
            .map(|(i, &j)| options[i][j])
            .collect();
        if let Some(seed) = realize(atlas, &candidate, &pattern.empties) {
            seeds.insert(seed);
        }
        // Odometer step.
        let mut i = 0;
        loop {
            if i == idx.len() {
                return seeds.into_iter().collect();
            }
            idx[i] += 1;
            if idx[i] < options[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
        if idx.is_empty() {
            return seeds.into_iter().collect();
        }
    }
}

fn block_anchor(atlas: &Atlas, base: CellCoord, rot: Rotation) -> Placement {
    let m = atlas
        .variant(TileKind::Trilobite, rot)
        .cells
        .iter()
        .copied()
        .min()
        .unwrap_or(vec2(0, 0));
    Placement::new(TileKind::Trilobite, rot, cell(base.x - m.x, base.y - m.y))
}

fn region_options(atlas: &Atlas, region: &Region) -> Vec<Placement> {
    let base = region.cells[0];
    match &region.spec {
        PatternCell::Exact {
            kind: TileKind::Trilobite,
            rot,
        } => alloc::vec![block_anchor(atlas, base, *rot)],
        PatternCell::Exact {
            kind: TileKind::Crab,
            rot,
        } => alloc::vec![Placement::new(TileKind::Crab, *rot, base)],
        PatternCell::AnyTrilobite => Rotation::ALL
            .iter()
            .map(|&r| block_anchor(atlas, base, r))
            .collect(),
        PatternCell::OneOf(classes) => classes
            .iter()
            .map(|&(kind, rot)| match kind {
                TileKind::Trilobite => block_anchor(atlas, base, rot),
                TileKind::Crab => Placement::new(TileKind::Crab, rot, base),
            })
            .collect(),
        PatternCell::Covering(kind) => {
            let mut options = atlas.placements_covering(base);
            options.retain(|p| p.kind == *kind);
            options
        }
        PatternCell::AnyTile => atlas.placements_covering(base),
        PatternCell::MustBeEmpty | PatternCell::Free => Vec::new(),
    }
}

/// Places a candidate placement set in an unbounded patch, returning the
/// sorted seed if everything is legal and the released cells stay vacant.
fn realize(
    atlas: &Atlas,
    candidate: &[Placement],
    empties: &[CellCoord],
) -> Option<Vec<Placement>> {
    let mut patch = Patch::new(atlas, None, BoundaryPolicy::Open);
    for &pl in candidate {
        patch.place(pl).ok()?;
    }
    if empties.iter().any(|&c| patch.is_occupied(c)) {
        return None;
    }
    let mut seed = candidate.to_vec();
    seed.sort_unstable();
    Some(seed)
}

/// How one expanded seed was closed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CaseClosure {
    /// Search (or propagation) proved the seed uncompletable; the proof
    /// trees replayed.
    Refuted,
    /// The seed contains a rotated/translated copy of an earlier forbidden
    /// case's seed, identified by its position in the suite plan.
    ReducedTo { case: usize },
    /// The lemma's non-refutation check (alternatives/census/chains) held.
    Passed,
    /// The expected outcome is definitively false (or a proof failed to
    /// replay).
    Failed,
    /// The budget or radius schedule ran out before a verdict.
    OutOfBudget,
}

/// The outcome of one expanded seed.
#[derive(Clone, Debug)]
pub struct CaseReport {
    pub lemma: usize,
    pub case: usize,
    /// Position in the suite-wide plan; reduction edges point at these.
    pub global: usize,
    pub seed: Vec<Placement>,
    pub closure: CaseClosure,
    /// The window radius in force when the case closed.
    pub radius: i64,
    pub nodes: u64,
    pub proof_trees: Vec<DeductionTrace>,
    pub note: Option<String>,
}

/// Lemma verdicts, aggregated over all expanded cases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LemmaVerdict {
    Verified,
    Failed,
    Inconclusive { budget: u64 },
}

#[derive(Clone, Debug)]
pub struct LemmaReport {
    pub name: String,
    pub verdict: LemmaVerdict,
    /// Largest radius any case needed.
    pub radius_used: i64,
    /// Case splits opened across all proof trees.
    pub subcase_count: u64,
    pub nodes: u64,
    pub cases: Vec<CaseReport>,
    pub notes: Vec<String>,
}

impl LemmaReport {
    pub fn proof_trees(&self) -> impl Iterator<Item = &DeductionTrace> {
        self.cases.iter().flat_map(|c| c.proof_trees.iter())
    }
}

/// The whole suite's outcome.
#[derive(Clone, Debug)]
pub struct ProofReport {
    pub lemmas: Vec<LemmaReport>,
    pub pass: bool,
    /// True when the suite was empty, so `pass` holds vacuously.
    pub vacuous: bool,
}

/// One schedulable unit of work: a lemma and one of its expanded seeds.
/// Cases are independent — [`run_planned_case`] may be called in any order
/// or in parallel, and [`merge_case_reports`] reassembles the same
/// [`ProofReport`] regardless.
#[derive(Clone, Debug)]
pub struct PlannedCase {
    pub lemma: usize,
    pub case: usize,
    pub global: usize,
    pub seed: Vec<Placement>,
}

/// Expands every lemma's wildcards into the suite-wide case plan.
pub fn plan_suite(atlas: &Atlas, suite: &[LemmaSpec]) -> Vec<PlannedCase> {
    let mut plan = Vec::new();
    for (lemma, spec) in suite.iter().enumerate() {
        for (case, seed) in expand_wildcards(atlas, &spec.seed).into_iter().enumerate() {
            plan.push(PlannedCase {
                lemma,
                case,
                global: plan.len(),
                seed,
            });
        }
    }
    plan
}

/// The smallest window containing every cell a lemma talks about.
fn lemma_frame(spec: &LemmaSpec) -> Window {
    let mut cells: Vec<CellCoord> = spec.seed.cells().collect();
    if let Expectation::ForcedAlternatives { target, options } = &spec.expected {
        match *target {
            Target::Cell(c) => cells.push(c),
            Target::Corner(p) => cells.extend(cells_touching(p)),
        }
        for opt in options {
            cells.extend(opt.cells());
        }
    }
    if cells.is_empty() {
        return Window::new(0, 0, 1, 1);
    }
    let (mut x0, mut y0, mut x1, mut y1) = (i64::MAX, i64::MAX, i64::MIN, i64::MIN);
    for c in cells {
        x0 = x0.min(c.x);
        y0 = y0.min(c.y);
        x1 = x1.max(c.x + 1);
        y1 = y1.max(c.y + 1);
    }
    Window::new(x0, y0, x1, y1)
}

fn seeded_patch<'a>(atlas: &'a Atlas, window: Window, seed: &[Placement]) -> Patch<'a> {
    let mut p = Patch::new(atlas, Some(window), BoundaryPolicy::Open);
    for &pl in seed {
        p.place(pl)
            .expect("expanded seeds place legally in any window containing them");
    }
    p
}

fn completion_region(window: Window, spec: &LemmaSpec) -> Vec<CellCoord> {
    let released: BTreeSet<CellCoord> = spec.seed.empties.iter().copied().collect();
    window
        .cells()
        .into_iter()
        .filter(|c| !released.contains(c))
        .collect()
}

fn rotate_placement(r: Rotation, pl: Placement) -> Placement {
    Placement::new(pl.kind, pl.rot.compose(r), r.rotate_cell(pl.anchor))
}

/// Does `small` occur inside `big` as a rotated, translated sub-figure?
fn embeds(small: &[Placement], big: &BTreeSet<Placement>) -> bool {
    if small.is_empty() || small.len() > big.len() {
        return false;
    }
    for r in Rotation::ALL {
        let q: Vec<Placement> = small.iter().map(|&p| rotate_placement(r, p)).collect();
        let probe = q[0];
        for b in big.iter() {
            if b.kind != probe.kind || b.rot != probe.rot {
                continue;
            }
            let t = vec2(b.anchor.x - probe.anchor.x, b.anchor.y - probe.anchor.y);
            if q.iter().all(|&p| {
                big.contains(&Placement {
                    anchor: p.anchor + t,
                    ..p
                })
            }) {
                return true;
            }
        }
    }
    false
}

struct CaseCtx<'a> {
    atlas: &'a Atlas,
    spec: &'a LemmaSpec,
    frame: Window,
    lemma: usize,
    case: usize,
    global: usize,
    seed: &'a [Placement],
}

impl<'a> CaseCtx<'a> {
    fn report(
        &self,
        closure: CaseClosure,
        radius: i64,
        nodes: u64,
        proof_trees: Vec<DeductionTrace>,
        note: Option<String>,
    ) -> CaseReport {
        CaseReport {
            lemma: self.lemma,
            case: self.case,
            global: self.global,
            seed: self.seed.to_vec(),
            closure,
            radius,
            nodes,
            proof_trees,
            note,
        }
    }
}

/// Checks one refutation trace against the independent replayer.
fn certified_refutation(atlas: &Atlas, window: Window, proof: &DeductionTrace) -> bool {
    let base = Patch::new(atlas, Some(window), BoundaryPolicy::Open);
    matches!(replay(base, proof), Ok(ReplayOutcome::Refuted))
}

fn run_forbidden_case(ctx: &CaseCtx<'_>, earlier: &[(usize, &[Placement])]) -> CaseReport {
    let budget = Budget::nodes(ctx.spec.budget);
    let mut nodes = 0u64;

    // Symmetry first: a seed containing an earlier forbidden figure closes
    // without any search.
    let raw: BTreeSet<Placement> = ctx.seed.iter().copied().collect();
    for &(g, other) in earlier {
        if embeds(other, &raw) {
            return ctx.report(CaseClosure::ReducedTo { case: g }, 0, 0, Vec::new(), None);
        }
    }

    // Cheap propagation at the first radius: an outright contradiction
    // closes the case, and the forced placements widen the reduction net.
    let r0 = ctx.spec.radii[0];
    let w0 = ctx.frame.grow(r0);
    let base0 = seeded_patch(ctx.atlas, w0, ctx.seed);
    let region0 = completion_region(w0, ctx.spec);
    let (prop, prop_trace, outcome) = propagate(&base0, &region0);
    if let PropagateOutcome::Contradiction { .. } = outcome {
        if certified_refutation(ctx.atlas, w0, &prop_trace) {
            return ctx.report(CaseClosure::Refuted, r0, 0, alloc::vec![prop_trace], None);
        }
        return ctx.report(
            CaseClosure::Failed,
            r0,
            0,
            Vec::new(),
            Some("derivation failed independent replay".to_string()),
        );
    }
    let grown: BTreeSet<Placement> = prop.placements().iter().copied().collect();
    for &(g, other) in earlier {
        if embeds(other, &grown) {
            return ctx.report(CaseClosure::ReducedTo { case: g }, r0, 0, Vec::new(), None);
        }
    }

    for &r in &ctx.spec.radii {
        let w = ctx.frame.grow(r);
        let base = seeded_patch(ctx.atlas, w, ctx.seed);
        let region = completion_region(w, ctx.spec);
        let out = search_region(&base, &region, SearchMode::Refute, budget);
        nodes += out.nodes;
        match out.verdict {
            Verdict::Refuted { proof } => {
                if certified_refutation(ctx.atlas, w, &proof) {
                    return ctx.report(CaseClosure::Refuted, r, nodes, alloc::vec![proof], None);
                }
                return ctx.report(
                    CaseClosure::Failed,
                    r,
                    nodes,
                    Vec::new(),
                    Some("refutation failed independent replay".to_string()),
                );
            }
            Verdict::OutOfBudget => {
                return ctx.report(
                    CaseClosure::OutOfBudget,
                    r,
                    nodes,
                    Vec::new(),
                    Some(format!("node budget exhausted at radius {r}")),
                );
            }
            Verdict::Satisfiable { .. } => {} // completable here; deepen
            _ => {
                return ctx.report(
                    CaseClosure::Failed,
                    r,
                    nodes,
                    Vec::new(),
                    Some("unexpected search verdict".to_string()),
                );
            }
        }
    }
    let r = *ctx.spec.radii.last().unwrap();
    ctx.report(
        CaseClosure::OutOfBudget,
        r,
        nodes,
        Vec::new(),
        Some(format!("still completable at radius {r}; schedule exhausted")),
    )
}

fn run_alternatives_case(ctx: &CaseCtx<'_>) -> CaseReport {
    let Expectation::ForcedAlternatives { target, options } = &ctx.spec.expected else {
        unreachable!("dispatched on expectation");
    };
    let budget = Budget::nodes(ctx.spec.budget);
    let mut nodes = 0u64;
    let seed_set: BTreeSet<Placement> = ctx.seed.iter().copied().collect();

    // Each listed alternative must be the seed plus exactly one placement.
    let mut listed: BTreeSet<Placement> = BTreeSet::new();
    for opt in options {
        let ex = expand_wildcards(ctx.atlas, opt);
        let [alt] = ex.as_slice() else {
            return ctx.report(
                CaseClosure::Failed,
                0,
                0,
                Vec::new(),
                Some("alternative patterns must be concrete (exactly one realization)".to_string()),
            );
        };
        let extra: Vec<Placement> = alt.iter().copied().filter(|p| !seed_set.contains(p)).collect();
        if extra.len() != 1 || !seed_set.iter().all(|p| alt.contains(p)) {
            return ctx.report(
                CaseClosure::Failed,
                0,
                0,
                Vec::new(),
                Some("each alternative must extend the seed by exactly one placement".to_string()),
            );
        }
        listed.insert(extra[0]);
    }

    let w0 = ctx.frame.grow(ctx.spec.radii[0]);
    let candidates = seeded_patch(ctx.atlas, w0, ctx.seed).legal_completions(*target);
    let mut refuted: BTreeMap<Placement, Option<DeductionTrace>> = BTreeMap::new();

    for &r in &ctx.spec.radii {
        let w = ctx.frame.grow(r);
        let base = seeded_patch(ctx.atlas, w, ctx.seed);
        let region = completion_region(w, ctx.spec);
        for &cand in &candidates {
            if refuted.contains_key(&cand) {
                continue;
            }
            let mut with = base.clone();
            if with.place(cand).is_err() {
                refuted.insert(cand, None);
                continue;
            }
            let out = search_region(&with, &region, SearchMode::Refute, budget);
            nodes += out.nodes;
            match out.verdict {
                Verdict::Refuted { proof } => {
                    if !certified_refutation(ctx.atlas, w, &proof) {
                        return ctx.report(
                            CaseClosure::Failed,
                            r,
                            nodes,
                            Vec::new(),
                            Some("refutation failed independent replay".to_string()),
                        );
                    }
                    refuted.insert(cand, Some(proof));
                }
                Verdict::Satisfiable { .. } => {}
                Verdict::OutOfBudget => {
                    return ctx.report(
                        CaseClosure::OutOfBudget,
                        r,
                        nodes,
                        Vec::new(),
                        Some(format!("node budget exhausted at radius {r}")),
                    );
                }
                _ => {
                    return ctx.report(
                        CaseClosure::Failed,
                        r,
                        nodes,
                        Vec::new(),
                        Some("unexpected search verdict".to_string()),
                    );
                }
            }
        }
    }

    let survivors: BTreeSet<Placement> = candidates
        .iter()
        .copied()
        .filter(|c| !refuted.contains_key(c))
        .collect();
    let radius = *ctx.spec.radii.last().unwrap();
    let proofs: Vec<DeductionTrace> = refuted.into_values().flatten().collect();
    if survivors == listed {
        ctx.report(CaseClosure::Passed, radius, nodes, proofs, None)
    } else {
        let fmt = |s: &BTreeSet<Placement>| {
            s.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")
        };
        ctx.report(
            CaseClosure::Failed,
            radius,
            nodes,
            proofs,
            Some(format!(
                "completions at the target are [{}], expected [{}]",
                fmt(&survivors),
                fmt(&listed)
            )),
        )
    }
}

/// The window-spanning check for one completion: every sufficiently
/// interior `*TO` trilobite must sit on a chain whose ends reach within
/// `margin` cells of the window rim. Returns an offending trilobite id.
fn stopped_chain(patch: &Patch<'_>, window: Window, margin: i64) -> Option<u32> {
    let atlas = patch.atlas();
    let interior = |id: u32| {
        atlas.cells_of(patch.placement(id)).all(|c| {
            c.x >= window.x0 + margin
                && c.x < window.x1 - margin
                && c.y >= window.y0 + margin
                && c.y < window.y1 - margin
        })
    };
    let tto = NeighborCode::parse("TTO").expect("well-formed code literal");
    let ott = NeighborCode::parse("OTT").expect("well-formed code literal");
    for chain in detect_chains(patch) {
        let Some(witness) = chain
            .members
            .iter()
            .zip(&chain.tags)
            .find(|&(&id, &tag)| (tag == tto || tag == ott) && interior(id))
            .map(|(&id, _)| id)
        else {
            continue;
        };
        let main = chain.direction == vec2(1, 1);
        let along = |c: CellCoord| if main { c.x + c.y } else { c.x - c.y };
        let window_along = if main {
            (window.x0 + window.y0, (window.x1 - 1) + (window.y1 - 1))
        } else {
            (window.x0 - (window.y1 - 1), (window.x1 - 1) - window.y0)
        };
        let mut lo = i64::MAX;
        let mut hi = i64::MIN;
        for &id in &chain.members {
            for c in atlas.cells_of(patch.placement(id)) {
                lo = lo.min(along(c));
                hi = hi.max(along(c));
            }
        }
        // One cell of rim distance spans two units of the along coordinate.
        if lo > window_along.0 + 2 * margin || hi < window_along.1 - 2 * margin {
            return Some(witness);
        }
    }
    None
}

fn run_census_case(ctx: &CaseCtx<'_>) -> CaseReport {
    let budget = Budget::nodes(ctx.spec.budget);
    let margin = ctx.spec.margin.unwrap_or(DEFAULT_MARGIN);
    let mut nodes = 0u64;
    let mut best: Option<(i64, usize)> = None;

    for &r in &ctx.spec.radii {
        let w = ctx.frame.grow(r);
        let base = seeded_patch(ctx.atlas, w, ctx.seed);
        let region = completion_region(w, ctx.spec);
        let out = search_region(&base, &region, SearchMode::All, budget);
        nodes += out.nodes;
        let solutions = match out.verdict {
            Verdict::Solutions { solutions } => solutions,
            Verdict::OutOfBudget => break,
            _ => {
                return ctx.report(
                    CaseClosure::Failed,
                    r,
                    nodes,
                    Vec::new(),
                    Some("unexpected search verdict".to_string()),
                );
            }
        };
        for sol in &solutions {
            let mut check = Patch::new(ctx.atlas, Some(w), BoundaryPolicy::Open);
            for &pl in sol {
                check
                    .place_unchecked(pl)
                    .expect("search solutions are disjoint placement sets");
            }
            match &ctx.spec.expected {
                Expectation::Classified { codes } => {
                    let census = Census::of_interior(&check, margin);
                    if !census.determined_subset_of(codes) {
                        let offender = census
                            .iter()
                            .map(|(c, _)| c)
                            .find(|c| {
                                *c != NeighborCode::Undetermined && !codes.contains(c)
                            })
                            .map(|c| c.to_string())
                            .unwrap_or_default();
                        return ctx.report(
                            CaseClosure::Failed,
                            r,
                            nodes,
                            Vec::new(),
                            Some(format!(
                                "a completion at radius {r} has interior code {offender}"
                            )),
                        );
                    }
                }
                Expectation::Chains => {
                    if let Some(id) = stopped_chain(&check, w, margin) {
                        return ctx.report(
                            CaseClosure::Failed,
                            r,
                            nodes,
                            Vec::new(),
                            Some(format!(
                                "a completion at radius {r} has a chain stopping at trilobite {id}"
                            )),
                        );
                    }
                }
                _ => unreachable!("dispatched on expectation"),
            }
        }
        best = Some((r, solutions.len()));
    }

    match best {
        Some((r, n)) => {
            let note = (n == 0).then(|| "vacuous: the window has no completions".to_string());
            ctx.report(CaseClosure::Passed, r, nodes, Vec::new(), note)
        }
        None => ctx.report(
            CaseClosure::OutOfBudget,
            ctx.spec.radii[0],
            nodes,
            Vec::new(),
            Some("node budget exhausted before any radius completed".to_string()),
        ),
    }
}

/// Runs one planned case. `plan` must be the output of [`plan_suite`] for
/// the same atlas and suite; reduction candidates are drawn from the plans
/// of earlier forbidden cases, so the outcome does not depend on the order
/// (or concurrency) in which cases are run.
pub fn run_planned_case(
    atlas: &Atlas,
    suite: &[LemmaSpec],
    plan: &[PlannedCase],
    global: usize,
) -> CaseReport {
    let pc = &plan[global];
    let spec = &suite[pc.lemma];
    let ctx = CaseCtx {
        atlas,
        spec,
        frame: lemma_frame(spec),
        lemma: pc.lemma,
        case: pc.case,
        global: pc.global,
        seed: &pc.seed,
    };
    match &spec.expected {
        Expectation::Forbidden => {
            let earlier: Vec<(usize, &[Placement])> = plan[..global]
                .iter()
                .filter(|p| matches!(suite[p.lemma].expected, Expectation::Forbidden))
                .map(|p| (p.global, p.seed.as_slice()))
                .collect();
            run_forbidden_case(&ctx, &earlier)
        }
        Expectation::ForcedAlternatives { .. } => run_alternatives_case(&ctx),
        Expectation::Classified { .. } | Expectation::Chains => run_census_case(&ctx),
    }
}

/// Assembles per-case outcomes into the suite report. Accepts the case
/// reports in any order; the result is canonical. Reduction edges must
/// resolve (transitively) to a replayed refutation to count — a reduction
/// into an unresolved case is demoted to `OutOfBudget`.
pub fn merge_case_reports(suite: &[LemmaSpec], mut reports: Vec<CaseReport>) -> ProofReport {
    reports.sort_by_key(|r| r.global);

    let mut refutation_grounded: BTreeMap<usize, bool> = BTreeMap::new();
    for report in reports.iter_mut() {
        let ok = match report.closure {
            CaseClosure::Refuted => true,
            CaseClosure::ReducedTo { case } => {
                let grounded = refutation_grounded.get(&case).copied().unwrap_or(false);
                if !grounded {
                    report.closure = CaseClosure::OutOfBudget;
                    report.note =
                        Some(format!("reduction target (case {case}) is itself unresolved"));
                }
                grounded
            }
            _ => false,
        };
        refutation_grounded.insert(report.global, ok);
    }

    let mut lemmas: Vec<LemmaReport> = suite
        .iter()
        .map(|spec| LemmaReport {
            name: spec.name.clone(),
            verdict: LemmaVerdict::Verified,
            radius_used: 0,
            subcase_count: 0,
            nodes: 0,
            cases: Vec::new(),
            notes: Vec::new(),
        })
        .collect();

    for report in reports {
        let lr = &mut lemmas[report.lemma];
        lr.radius_used = lr.radius_used.max(report.radius);
        lr.nodes += report.nodes;
        for t in &report.proof_trees {
            lr.subcase_count += t
                .steps()
                .iter()
                .filter(|s| matches!(s, TraceStep::SubcaseOpen { .. }))
                .count() as u64;
        }
        if let Some(n) = &report.note {
            lr.notes.push(format!("case {}: {n}", report.case));
        }
        lr.cases.push(report);
    }

    for (spec, lr) in suite.iter().zip(lemmas.iter_mut()) {
        if lr.cases.is_empty() && !matches!(spec.expected, Expectation::Forbidden) {
            // Nothing to check is only meaningful for refutation lemmas.
            lr.notes.push("no realizable seeds".to_string());
        }
        let failed = lr
            .cases
            .iter()
            .any(|c| matches!(c.closure, CaseClosure::Failed));
        let undecided = lr
            .cases
            .iter()
            .any(|c| matches!(c.closure, CaseClosure::OutOfBudget));
        lr.verdict = if failed {
            LemmaVerdict::Failed
        } else if undecided {
            LemmaVerdict::Inconclusive {
                budget: spec.budget,
            }
        } else {
            LemmaVerdict::Verified
        };
    }

    let pass = lemmas
        .iter()
        .all(|l| matches!(l.verdict, LemmaVerdict::Verified));
    ProofReport {
        vacuous: lemmas.is_empty(),
        pass,
        lemmas,
    }
}

/// Expands, runs, and merges the whole suite sequentially. Callers that
/// fan cases out to workers get the identical report by running
/// [`run_planned_case`] per plan entry and merging.
pub fn run_all(atlas: &Atlas, suite: &[LemmaSpec]) -> ProofReport {
    let plan = plan_suite(atlas, suite);
    let reports = (0..plan.len())
        .map(|g| run_planned_case(atlas, suite, &plan, g))
        .collect();
    merge_case_reports(suite, reports)
}

/// Runs a single lemma in isolation (reductions only resolve within it).
pub fn run_lemma(atlas: &Atlas, spec: &LemmaSpec) -> LemmaReport {
    let suite = core::slice::from_ref(spec);
    run_all(atlas, suite)
        .lemmas
        .pop()
        .expect("one lemma in, one report out")
}

/// Runs a chain-extension lemma: every completion's interior `*TO`
/// trilobites must lie on chains that reach the window rim.
pub fn run_chain_lemma(atlas: &Atlas, spec: &LemmaSpec) -> LemmaReport {
    if !matches!(spec.expected, Expectation::Chains) {
        let mut report = LemmaReport {
            name: spec.name.clone(),
            verdict: LemmaVerdict::Failed,
            radius_used: 0,
            subcase_count: 0,
            nodes: 0,
            cases: Vec::new(),
            notes: alloc::vec!["not a chain-extension lemma".to_string()],
        };
        report.notes.shrink_to_fit();
        return report;
    }
    run_lemma(atlas, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::{parse_atlas, TOY};

    /// A fixture atlas with a unique global tiling: the only allowed corner
    /// tuple is what a uniform lattice of rotation-0 crabs presents, so
    /// every completion is forced cell by cell. Trilobites carry blank
    /// marks and can never appear in a legal configuration.
    const LEM: &str = r#"
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
mark 0 0 BLANK
mark 1 0 BLANK
mark 2 0 BLANK
mark 0 1 BLANK
mark 1 1 BLANK
mark 2 1 BLANK
mark 0 2 BLANK
mark 1 2 BLANK
mark 2 2 BLANK

[tile CRAB]
cell 0 0
mark 0 0 A
mark 1 0 B
mark 0 1 B
mark 1 1 B

[corner-rules]
allow A B B B

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

    fn lem() -> Atlas {
        parse_atlas("lem", LEM).expect("fixture parses")
    }

    const SUITE: &str = r#"
suite toy-suite
legend k crab 0
legend m crab 1
legend q crab 2
legend w crab *

[lemma dead-pair]
expect forbidden
radii 2 3
pattern
km
end

[lemma dead-pair-rotated]
expect forbidden
radii 2 3
pattern
q
m
end

[lemma east-neighbor]
expect alternatives
radii 2
pattern
k
end
target cell 1 0
alternative
kk
end

[lemma crab-world]
expect classified TTT OTO
radii 2
pattern
k
end

[lemma crab-chains]
expect chains
radii 2
pattern
k
end
"#;

    fn suite() -> Suite {
        parse_suite(SUITE).expect("suite parses")
    }

    #[test]
    fn suite_parses_with_expected_shape() {
        let s = suite();
        assert_eq!(s.name, "toy-suite");
        assert_eq!(s.lemmas.len(), 5);
        assert_eq!(s.lemmas[0].name, "dead-pair");
        assert_eq!(s.lemmas[0].expected, Expectation::Forbidden);
        assert_eq!(s.lemmas[0].radii, alloc::vec![2, 3]);
        assert!(matches!(
            s.lemmas[0].seed.cell_map().get(&cell(1, 0)),
            Some(PatternCell::Exact {
                kind: TileKind::Crab,
                ..
            })
        ));
    }

    #[test]
    fn malformed_suites_are_rejected() {
        assert!(parse_suite("legend kk crab 0\n").is_err());
        assert!(parse_suite("[lemma a]\nexpect forbidden\npattern\nz\nend\n").is_err());
        assert!(parse_suite("[lemma a]\npattern\nend\n").is_err()); // no expect
        assert!(
            parse_suite("[lemma a]\nexpect forbidden\nradii 3 3\npattern\nend\n").is_err(),
            "radii must strictly increase"
        );
        let dup = "[lemma a]\nexpect forbidden\npattern\nend\n[lemma a]\nexpect forbidden\npattern\nend\n";
        assert!(parse_suite(dup).is_err());
        assert!(parse_suite("[lemma a]\nexpect alternatives\npattern\nend\n").is_err());
    }

    #[test]
    fn trilobite_wildcards_expand_by_rotation() {
        let atlas = parse_atlas("toy", TOY).unwrap();
        let mut legend = BTreeMap::new();
        legend.insert('t', PatternCell::AnyTrilobite);
        let pat = pattern_from_rows(&[(1, "tt"), (2, "tt")], cell(0, 0), &legend).unwrap();
        let seeds = expand_wildcards(&atlas, &pat);
        assert_eq!(seeds.len(), 4);
        for seed in &seeds {
            assert_eq!(seed.len(), 1);
            assert_eq!(seed[0].kind, TileKind::Trilobite);
        }

        // A non-square trilobite glyph region is a parse error.
        assert!(pattern_from_rows(&[(1, "tt")], cell(0, 0), &legend).is_err());
    }

    #[test]
    fn crab_wildcards_expand_per_cell_and_filter_by_place() {
        let atlas = lem();
        let mut legend = BTreeMap::new();
        legend.insert(
            'w',
            PatternCell::OneOf(
                Rotation::ALL
                    .iter()
                    .map(|&r| (TileKind::Crab, r))
                    .collect(),
            ),
        );
        // Two independent any-rotation crabs: 16 raw combinations, none of
        // which trip a fully determined corner when only two tiles exist.
        let pat = pattern_from_rows(&[(1, "ww")], cell(0, 0), &legend).unwrap();
        assert_eq!(expand_wildcards(&atlas, &pat).len(), 16);
    }

    #[test]
    fn dead_pair_is_refuted_and_its_rotation_reduces() {
        let atlas = lem();
        let s = suite();
        let report = run_all(&atlas, &s.lemmas[..2]);
        assert!(report.pass, "notes: {:?}", report.lemmas);

        let dead = &report.lemmas[0];
        assert_eq!(dead.verdict, LemmaVerdict::Verified);
        assert_eq!(dead.cases.len(), 1);
        assert!(matches!(dead.cases[0].closure, CaseClosure::Refuted));
        assert_eq!(dead.cases[0].radius, 2);
        assert_eq!(dead.cases[0].proof_trees.len(), 1);

        let rotated = &report.lemmas[1];
        assert_eq!(rotated.verdict, LemmaVerdict::Verified);
        assert!(
            matches!(rotated.cases[0].closure, CaseClosure::ReducedTo { case: 0 }),
            "got {:?}",
            rotated.cases[0].closure
        );
    }

    #[test]
    fn alternatives_lemma_pins_the_unique_neighbor() {
        let atlas = lem();
        let s = suite();
        let report = run_lemma(&atlas, &s.lemmas[2]);
        assert_eq!(report.verdict, LemmaVerdict::Verified, "{:?}", report.notes);
        // The other crab orientations never reach a search: each is already
        // unsatisfiable at a corner it touches, so candidate pruning drops
        // them and no refutation trees are needed.
        assert_eq!(report.cases[0].proof_trees.len(), 0);
    }

    #[test]
    fn wrong_alternatives_fail_with_the_computed_set() {
        let atlas = lem();
        let mut s = suite();
        // Claim the east neighbor must be a rotation-1 crab instead.
        let Expectation::ForcedAlternatives { options, .. } =
            &mut s.lemmas[2].expected
        else {
            panic!("fixture shape");
        };
        options.clear();
        let mut legend = BTreeMap::new();
        legend.insert(
            'k',
            PatternCell::Exact {
                kind: TileKind::Crab,
                rot: Rotation::R0,
            },
        );
        legend.insert(
            'm',
            PatternCell::Exact {
                kind: TileKind::Crab,
                rot: Rotation::R1,
            },
        );
        options.push(pattern_from_rows(&[(1, "km")], cell(0, 0), &legend).unwrap());
        let report = run_lemma(&atlas, &s.lemmas[2]);
        assert_eq!(report.verdict, LemmaVerdict::Failed);
        assert!(report.notes[0].contains("expected"));
    }

    #[test]
    fn census_and_chain_lemmas_pass_on_the_forced_world() {
        let atlas = lem();
        let s = suite();
        let census = run_lemma(&atlas, &s.lemmas[3]);
        assert_eq!(census.verdict, LemmaVerdict::Verified, "{:?}", census.notes);
        let chains = run_chain_lemma(&atlas, &s.lemmas[4]);
        assert_eq!(chains.verdict, LemmaVerdict::Verified, "{:?}", chains.notes);
    }

    #[test]
    fn satisfiable_seed_is_inconclusive_not_failed() {
        let atlas = lem();
        let text = "[lemma lone-crab]\nexpect forbidden\nradii 2\npattern\nk\nend\n";
        let s = parse_suite(&alloc::format!("legend k crab 0\n{text}")).unwrap();
        let report = run_lemma(&atlas, &s.lemmas[0]);
        assert!(matches!(report.verdict, LemmaVerdict::Inconclusive { .. }));
        assert!(report.notes[0].contains("completable"));
    }

    #[test]
    fn reduction_into_an_unresolved_case_is_demoted() {
        let atlas = lem();
        // Four rotations of a lone crab: case 0 is satisfiable (the forced
        // world), cases 1..3 reduce to it, and the merge must not let them
        // claim a verdict their target never earned.
        let text = "legend w crab *\n[lemma any-crab]\nexpect forbidden\nradii 2\npattern\nw\nend\n";
        let s = parse_suite(text).unwrap();
        let report = run_lemma(&atlas, &s.lemmas[0]);
        assert!(matches!(report.verdict, LemmaVerdict::Inconclusive { .. }));
        assert_eq!(report.cases.len(), 4);
        assert!(report
            .cases
            .iter()
            .all(|c| matches!(c.closure, CaseClosure::OutOfBudget)));
        assert!(report
            .notes
            .iter()
            .any(|n| n.contains("unresolved")));
    }

    #[test]
    fn case_reports_merge_identically_in_any_order() {
        let atlas = lem();
        let s = suite();
        let plan = plan_suite(&atlas, &s.lemmas);
        let mut reports: Vec<CaseReport> = (0..plan.len())
            .map(|g| run_planned_case(&atlas, &s.lemmas, &plan, g))
            .collect();
        let forward = merge_case_reports(&s.lemmas, reports.clone());
        reports.reverse();
        let backward = merge_case_reports(&s.lemmas, reports);
        assert_eq!(
            alloc::format!("{forward:?}"),
            alloc::format!("{backward:?}")
        );
        assert!(forward.pass);
    }

    #[test]
    fn empty_suite_is_a_vacuous_pass() {
        let report = run_all(&lem(), &[]);
        assert!(report.pass);
        assert!(report.vacuous);
    }
}
