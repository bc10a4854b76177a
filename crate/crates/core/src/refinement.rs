//! Enforced-color refinements and the tileability driver.
//!
//! The level-`p` refinement of a Wang tile set has one supertile per legal
//! `(2p+1)×(2p+1)` pattern; supertile edge colors serialize the two
//! overlap strips of the pattern, so two supertiles may abut exactly when
//! their patterns agree on the shifted overlap (horizontal plus vertical
//! agreement forces diagonal agreement through the triple overlap).
//! Projecting supertile cycles onto their center tiles yields a nested
//! family of sub-cones of the base cycle cone; the driver combines cone
//! emptiness, pattern exhaustion and periodic search into one verdict,
//! keeping `UNDECIDED` as an explicit first-class outcome.

use crate::asymptotic::{self, NormTable};
use crate::budget::Budget;
use crate::homology::{self, build_wang_complex, ApComplex, ConeEmptiness};
use crate::linalg::{self, Feasibility, Mat};
use crate::surface::{self, GluedSurface, PeriodicTiling, TorusOutcome};
use crate::tileset::{WangTile, WangTileSet};
use crate::{rat, Rat};
use num_traits::{Signed, Zero};
use std::ops::RangeInclusive;
use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum RefinementError {
    #[error("no legal pattern exists at this radius")]
    EmptyPatternSet,
    #[error("pattern enumeration ran out of budget")]
    BudgetExhausted,
    #[error("chain has {got} coordinates, expected {expected}")]
    DimensionMismatch { got: usize, expected: usize },
}

/// A legal `(2p+1)×(2p+1)` square of tiles centered at the origin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    pub p: u32,
    /// Tile index per cell, indexed `(y + p)·(2p + 1) + (x + p)` for
    /// `x, y ∈ [-p, p]`.
    pub grid: Vec<usize>,
}

impl Pattern {
    pub fn side(&self) -> i64 {
        2 * self.p as i64 + 1
    }

    pub fn at(&self, x: i64, y: i64) -> usize {
        let p = self.p as i64;
        self.grid[((y + p) * self.side() + (x + p)) as usize]
    }

    pub fn center(&self) -> usize {
        self.at(0, 0)
    }
}

/// All legal patterns of one radius, grouped by center tile.
#[derive(Clone, Debug)]
pub struct PatternSet {
    pub p: u32,
    /// Per center tile, the ordered duplicate-free list of patterns.
    pub by_center: Vec<Vec<Pattern>>,
    /// Whether enumeration was exhaustive; a partial set cannot support
    /// emptiness claims.
    pub complete: bool,
    pub nodes: u64,
}

impl PatternSet {
    pub fn total(&self) -> usize {
        self.by_center.iter().map(Vec::len).sum()
    }
}

struct PatternSearch<'a> {
    set: &'a WangTileSet,
    side: usize,
    center_cell: usize,
    center_tile: usize,
    grid: Vec<usize>,
    out: Vec<Pattern>,
    exhausted: bool,
    p: u32,
}

impl PatternSearch<'_> {
    /// Fill cells in index order (rows bottom to top, left to right),
    /// checking the west and south neighbors already placed.
    fn place(&mut self, k: usize, budget: &mut Budget) {
        if k == self.grid.len() {
            self.out.push(Pattern { p: self.p, grid: self.grid.clone() });
            return;
        }
        let x = k % self.side;
        let y = k / self.side;
        for t in 0..self.set.tiles.len() {
            if k == self.center_cell && t != self.center_tile {
                continue;
            }
            if !budget.tick() {
                self.exhausted = true;
                return;
            }
            let tile = &self.set.tiles[t];
            if x > 0 && self.set.tiles[self.grid[k - 1]].east != tile.west {
                continue;
            }
            if y > 0 && self.set.tiles[self.grid[k - self.side]].north != tile.south {
                continue;
            }
            self.grid[k] = t;
            self.place(k + 1, budget);
            if self.exhausted {
                return;
            }
        }
    }
}

/// Enumerate every legal pattern of radius `p` around every center tile by
/// backtracking; exhaustive unless the budget runs out.
pub fn enumerate_patterns(set: &WangTileSet, p: u32, budget: &mut Budget) -> PatternSet {
    let side = 2 * p as usize + 1;
    let center_cell = p as usize * side + p as usize;
    let mut by_center = Vec::with_capacity(set.tiles.len());
    let mut complete = true;
    for j in 0..set.tiles.len() {
        let mut search = PatternSearch {
            set,
            side,
            center_cell,
            center_tile: j,
            grid: vec![usize::MAX; side * side],
            out: Vec::new(),
            exhausted: false,
            p,
        };
        search.place(0, budget);
        complete &= !search.exhausted;
        by_center.push(search.out);
    }
    PatternSet { p, by_center, complete, nodes: budget.used() }
}

fn escape_token(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        if matches!(ch, '\\' | ',' | ';') {
            out.push('\\');
        }
        out.push(ch);
    }
    out
}

/// Serialize a rectangular sub-pattern: rows bottom to top joined by `;`,
/// cells left to right joined by `,`, tile ids escaped.
fn strip_color(
    set: &WangTileSet,
    pat: &Pattern,
    xs: RangeInclusive<i64>,
    ys: RangeInclusive<i64>,
) -> String {
    let mut rows = Vec::new();
    for y in ys {
        let cells: Vec<String> = xs
            .clone()
            .map(|x| escape_token(&set.tiles[pat.at(x, y)].id))
            .collect();
        rows.push(cells.join(","));
    }
    rows.join(";")
}

/// A refined tile set: one supertile per pattern.
#[derive(Clone, Debug)]
pub struct WpRefinement {
    pub p: u32,
    pub tiles: WangTileSet,
    /// Per supertile: (base index of its center tile, 1-based pattern
    /// index within that center's list).
    pub centers: Vec<(usize, usize)>,
    pub patterns: PatternSet,
}

/// Build the refined tile set from an enumerated pattern set. Supertile
/// `<id>#<l>` is the `l`-th pattern centered at base tile `<id>`; its
/// north/south colors are the upper/lower `2p`-row strips and its
/// east/west colors the right/left `2p`-column strips, so equal colors on
/// abutting edges mean the two patterns agree wherever they overlap.
pub fn build_wp_tileset(
    set: &WangTileSet,
    patterns: &PatternSet,
) -> Result<WpRefinement, RefinementError> {
    if patterns.total() == 0 {
        return Err(if patterns.complete {
            RefinementError::EmptyPatternSet
        } else {
            RefinementError::BudgetExhausted
        });
    }
    let p = patterns.p as i64;
    let mut tiles = Vec::new();
    let mut centers = Vec::new();
    for (j, list) in patterns.by_center.iter().enumerate() {
        for (l0, pat) in list.iter().enumerate() {
            let id = format!("{}#{}", set.tiles[j].id, l0 + 1);
            tiles.push(WangTile {
                id,
                north: strip_color(set, pat, -p..=p, (-p + 1)..=p),
                south: strip_color(set, pat, -p..=p, -p..=(p - 1)),
                east: strip_color(set, pat, (-p + 1)..=p, -p..=p),
                west: strip_color(set, pat, -p..=(p - 1), -p..=p),
            });
            centers.push((j, l0 + 1));
        }
    }
    let name = format!("{}^{}", set.name, patterns.p);
    Ok(WpRefinement {
        p: patterns.p,
        tiles: WangTileSet { name, tiles },
        centers,
        patterns: patterns.clone(),
    })
}

/// Sum supertile coefficients over their center tile, landing in chains of
/// the base complex.
pub fn project_cycle(wp: &WpRefinement, chain: &[Rat]) -> Result<Vec<Rat>, RefinementError> {
    if chain.len() != wp.centers.len() {
        return Err(RefinementError::DimensionMismatch {
            got: chain.len(),
            expected: wp.centers.len(),
        });
    }
    let mut out = vec![Rat::zero(); wp.patterns.by_center.len()];
    for (k, v) in chain.iter().enumerate() {
        let j = wp.centers[k].0;
        out[j] = out[j].clone() + v.clone();
    }
    Ok(out)
}

/// Outcome of a projected-cone membership test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConeMembership {
    /// A non-negative supertile cycle projecting onto the requested cycle.
    Member { witness: Vec<Rat> },
    /// Farkas functional over the stacked constraint rows (supertile
    /// switching rules, then one projection row per base tile).
    NotMember { certificate: Vec<Rat> },
    /// The pattern set was partial and infeasibility cannot be trusted.
    Unknown,
}

impl ConeMembership {
    pub fn decided(&self) -> Option<bool> {
        match self {
            ConeMembership::Member { .. } => Some(true),
            ConeMembership::NotMember { .. } => Some(false),
            ConeMembership::Unknown => None,
        }
    }
}

/// Exact LP feasibility of `{x ≥ 0 over supertiles : ∂x = 0, π(x) = c}`.
///
/// Feasibility on a partial pattern set is still conclusive (a witness
/// extends by zeros to the full refinement); infeasibility is conclusive
/// only when the enumeration was exhaustive.
pub fn projected_cone_membership(
    set: &WangTileSet,
    patterns: &PatternSet,
    chain: &[Rat],
) -> Result<ConeMembership, RefinementError> {
    let n_base = set.tiles.len();
    if chain.len() != n_base {
        return Err(RefinementError::DimensionMismatch { got: chain.len(), expected: n_base });
    }
    if patterns.total() == 0 {
        if chain.iter().all(Zero::is_zero) {
            return Ok(ConeMembership::Member { witness: Vec::new() });
        }
        if !patterns.complete {
            return Ok(ConeMembership::Unknown);
        }
        // No supertiles at all: the projection row of any nonzero
        // coordinate is already infeasible.
        let i = chain.iter().position(|v| !v.is_zero()).expect("nonzero chain");
        let mut certificate = vec![Rat::zero(); n_base];
        certificate[i] = if chain[i].is_positive() { rat(1) } else { rat(-1) };
        return Ok(ConeMembership::NotMember { certificate });
    }
    let wp = build_wp_tileset(set, patterns)?;
    let wpx = build_wang_complex(&wp.tiles);
    let m = wpx.n_edges();
    let cols = wp.tiles.tiles.len();
    let mut a = Mat::zeros(m + n_base, cols);
    for r in 0..m {
        for c in 0..cols {
            a.set(r, c, wpx.boundary.at(r, c).clone());
        }
    }
    for (k, &(j, _)) in wp.centers.iter().enumerate() {
        a.set(m + j, k, rat(1));
    }
    let mut b = vec![Rat::zero(); m + n_base];
    for j in 0..n_base {
        b[m + j] = chain[j].clone();
    }
    match linalg::lp_feasible(&a, &b) {
        Feasibility::Feasible(witness) => Ok(ConeMembership::Member { witness }),
        Feasibility::Infeasible(certificate) => {
            if patterns.complete {
                Ok(ConeMembership::NotMember { certificate })
            } else {
                Ok(ConeMembership::Unknown)
            }
        }
    }
}

/// Enumerate patterns at radius `p`, then test membership of `chain` in
/// the projection of the level-`p` cycle cone.
pub fn cycle_in_projected_cone(
    set: &WangTileSet,
    chain: &[Rat],
    p: u32,
    budget: &mut Budget,
) -> Result<ConeMembership, RefinementError> {
    let patterns = enumerate_patterns(set, p, budget);
    projected_cone_membership(set, &patterns, chain)
}

#[derive(Clone, Debug)]
pub struct TileabilityOptions {
    /// Highest refinement radius checked for pattern emptiness.
    pub max_p: u32,
    /// Cap on the ℓ₁ size of candidate cycles in the periodic search.
    pub max_l1: u32,
    /// Rows per norm table in the evidence ledger.
    pub max_n: u32,
    /// Node budget for each individual search (patterns per radius, torus
    /// per candidate cycle, ray enumeration, norm table per row).
    pub budget_nodes: u64,
    /// Skip membership LPs on pattern sets larger than this.
    pub membership_cap: usize,
}

impl Default for TileabilityOptions {
    fn default() -> Self {
        TileabilityOptions {
            max_p: 2,
            max_l1: 4,
            max_n: 4,
            budget_nodes: 1_000_000,
            membership_cap: 512,
        }
    }
}

#[derive(Clone, Debug)]
pub enum CannotTileReason {
    /// Functional `v` with `vᵀ∂ ≥ 1` columnwise: the only non-negative
    /// cycle is zero, so no tiling exists.
    EmptyCone { certificate: Vec<Rat> },
    /// Exhaustive search found no legal `(2p+1)×(2p+1)` pattern.
    NoPattern { p: u32 },
}

/// A periodic tiling together with the cycle and surface it came from.
#[derive(Clone, Debug)]
pub struct PeriodicCertificate {
    pub cycle: Vec<Rat>,
    pub surface: GluedSurface,
    pub tiling: PeriodicTiling,
    /// Tile frequencies of the fundamental domain.
    pub ev: Vec<Rat>,
}

/// What was established at one refinement radius.
#[derive(Clone, Debug)]
pub struct LevelEvidence {
    pub p: u32,
    pub patterns: usize,
    pub complete: bool,
    /// Projected-cone membership per simplex extreme point.
    pub memberships: Vec<ConeMembership>,
}

/// Evidence ledger accompanying an UNDECIDED verdict.
#[derive(Clone, Debug)]
pub struct Evidence {
    pub extreme_points: Vec<Vec<Rat>>,
    pub extreme_complete: bool,
    pub levels: Vec<LevelEvidence>,
    /// Norm table per extreme point, aligned with `extreme_points`.
    pub norm_tables: Vec<NormTable>,
    /// Candidate cycles fed to the torus search.
    pub cycles_tried: u64,
    pub torus_budget_exhausted: bool,
}

#[derive(Clone, Debug)]
pub enum Verdict {
    CannotTile(CannotTileReason),
    TilesPeriodically(PeriodicCertificate),
    Undecided(Evidence),
}

impl Verdict {
    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::CannotTile(_) => "CANNOT_TILE",
            Verdict::TilesPeriodically(_) => "TILES_PERIODICALLY",
            Verdict::Undecided(_) => "UNDECIDED",
        }
    }
}

/// All non-negative integer vectors of length `n` with coordinate sum `s`,
/// in lexicographic order.
fn nonneg_vectors_with_l1(n: usize, s: u32) -> Vec<Vec<Rat>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<Rat>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.iter().map(|&v| rat(v as i64)).collect());
            return;
        }
        for v in 0..=left {
            cur[i] = v;
            rec(i + 1, left - v, cur, out);
        }
    }
    if n > 0 {
        rec(0, s, &mut cur, &mut out);
    }
    out
}

/// Decide tileability as far as the budgets allow.
///
/// Pipeline: empty-cone test, then exhaustive pattern search at radii
/// `1..=max_p`, then a periodic search over non-negative integral cycles
/// in increasing ℓ₁ order, and finally an UNDECIDED verdict carrying the
/// collected evidence.
pub fn tileability(set: &WangTileSet, opts: &TileabilityOptions) -> Verdict {
    let cx = build_wang_complex(set);
    if let ConeEmptiness::Empty(certificate) = homology::nonneg_cycle_exists(&cx) {
        return Verdict::CannotTile(CannotTileReason::EmptyCone { certificate });
    }
    // Pattern exhaustion at increasing radius.
    let mut level_sets: Vec<PatternSet> = Vec::new();
    for p in 1..=opts.max_p {
        let mut budget = Budget::new(opts.budget_nodes);
        let ps = enumerate_patterns(set, p, &mut budget);
        let empty = ps.complete && ps.total() == 0;
        let partial = !ps.complete;
        level_sets.push(ps);
        if empty {
            return Verdict::CannotTile(CannotTileReason::NoPattern { p });
        }
        if partial {
            // Larger radii are strictly more expensive; stop here.
            break;
        }
    }
    // Periodic search over small cycles.
    let mut cycles_tried = 0;
    let mut torus_budget_exhausted = false;
    for s in 1..=opts.max_l1 {
        for cand in nonneg_vectors_with_l1(set.tiles.len(), s) {
            if !cx.is_cycle(&cand).unwrap_or(false) {
                continue;
            }
            cycles_tried += 1;
            let mut budget = Budget::new(opts.budget_nodes);
            match surface::find_torus(set, &cx, &cand, &mut budget) {
                Ok(TorusOutcome::Found(surface)) => {
                    let stats = surface::surface_stats(&surface);
                    let copies = stats.components[0].copies.clone();
                    if let Ok(tiling) = surface::extract_periodic_tiling(set, &surface, &copies)
                    {
                        let ev = surface::ev_of_periodic(&cx, &tiling);
                        return Verdict::TilesPeriodically(PeriodicCertificate {
                            cycle: cand,
                            surface,
                            tiling,
                            ev,
                        });
                    }
                }
                Ok(TorusOutcome::BudgetExhausted { .. }) => torus_budget_exhausted = true,
                Ok(TorusOutcome::NoTorus) | Err(_) => {}
            }
        }
    }
    // Evidence ledger.
    let cone = homology::cone_description(&cx, &mut Budget::new(opts.budget_nodes));
    let levels = level_sets
        .iter()
        .map(|ps| {
            let memberships = cone
                .extreme_points
                .iter()
                .map(|ep| {
                    if ps.total() > opts.membership_cap {
                        ConeMembership::Unknown
                    } else {
                        projected_cone_membership(set, ps, ep)
                            .unwrap_or(ConeMembership::Unknown)
                    }
                })
                .collect();
            LevelEvidence {
                p: ps.p,
                patterns: ps.total(),
                complete: ps.complete,
                memberships,
            }
        })
        .collect();
    let norm_tables = cone
        .extreme_points
        .iter()
        .map(|ep| {
            asymptotic::norm_table(set, &cx, ep, opts.max_n, opts.budget_nodes)
                .expect("extreme points are cycles of the right dimension")
        })
        .collect();
    Verdict::Undecided(Evidence {
        extreme_points: cone.extreme_points,
        extreme_complete: cone.complete,
        levels,
        norm_tables,
        cycles_tried,
        torus_budget_exhausted,
    })
}

/// Check a supertile cycle witness: non-negative, a cycle of the refined
/// complex, and projecting onto the claimed base cycle.
pub fn check_membership_witness(
    set: &WangTileSet,
    base: &ApComplex,
    patterns: &PatternSet,
    chain: &[Rat],
    witness: &[Rat],
) -> Result<(), String> {
    if patterns.total() == 0 {
        if witness.is_empty() && chain.iter().all(Zero::is_zero) {
            return Ok(());
        }
        return Err("witness over an empty supertile set".to_string());
    }
    let wp = build_wp_tileset(set, patterns).map_err(|e| e.to_string())?;
    if witness.len() != wp.tiles.tiles.len() {
        return Err(format!(
            "witness has {} coordinates for {} supertiles",
            witness.len(),
            wp.tiles.tiles.len()
        ));
    }
    if !homology::is_nonneg(witness) {
        return Err("witness has a negative coordinate".to_string());
    }
    let wpx = build_wang_complex(&wp.tiles);
    if !wpx.is_cycle(witness).unwrap_or(false) {
        return Err("witness is not a cycle of the refined complex".to_string());
    }
    let projected = project_cycle(&wp, witness).map_err(|e| e.to_string())?;
    if projected != chain {
        return Err("witness does not project onto the cycle".to_string());
    }
    if !base.is_cycle(&projected).unwrap_or(false) {
        return Err("projection is not a cycle of the base complex".to_string());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;
    use crate::tileset::parse_wang;

    const MONO: &str = "tileset MONO\ntile T N=a S=a E=a W=a\n";
    const DEAD: &str = "tileset DEAD\ntile T N=a S=b E=c W=c\n";
    const CHECKER: &str =
        "tileset CHECKER\ntile A N=1 S=2 E=4 W=3\ntile B N=2 S=1 E=3 W=4\n";

    fn patterns(text: &str, p: u32) -> (WangTileSet, PatternSet) {
        let set = parse_wang(text).unwrap();
        let ps = enumerate_patterns(&set, p, &mut Budget::unlimited());
        (set, ps)
    }

    #[test]
    fn mono_has_one_forced_pattern() {
        let (_, ps) = patterns(MONO, 1);
        assert!(ps.complete);
        assert_eq!(ps.total(), 1);
        assert_eq!(ps.by_center[0][0].grid, vec![0; 9]);
    }

    #[test]
    fn checker_has_one_pattern_per_center() {
        let (_, ps) = patterns(CHECKER, 1);
        assert!(ps.complete);
        assert_eq!(ps.by_center[0].len(), 1);
        assert_eq!(ps.by_center[1].len(), 1);
        let a = &ps.by_center[0][0];
        // Checkerboard forced around A: parity of x+y decides the tile.
        for y in -1i64..=1 {
            for x in -1i64..=1 {
                let expect = if (x + y).rem_euclid(2) == 0 { 0 } else { 1 };
                assert_eq!(a.at(x, y), expect);
            }
        }
    }

    #[test]
    fn dead_set_has_no_patterns() {
        let (set, ps) = patterns(DEAD, 1);
        assert!(ps.complete);
        assert_eq!(ps.total(), 0);
        assert!(matches!(
            build_wp_tileset(&set, &ps),
            Err(RefinementError::EmptyPatternSet)
        ));
    }

    #[test]
    fn budget_exhaustion_marks_the_set_partial() {
        let set = parse_wang(MONO).unwrap();
        let mut budget = Budget::new(2);
        let ps = enumerate_patterns(&set, 1, &mut budget);
        assert!(!ps.complete);
    }

    #[test]
    fn mono_supertile_abuts_itself() {
        let (set, ps) = patterns(MONO, 1);
        let wp = build_wp_tileset(&set, &ps).unwrap();
        assert_eq!(wp.tiles.tiles.len(), 1);
        let t = &wp.tiles.tiles[0];
        assert_eq!(t.id, "T#1");
        assert_eq!(t.north, "T,T,T;T,T,T");
        assert_eq!(t.north, t.south);
        assert_eq!(t.east, "T,T;T,T;T,T");
        assert_eq!(t.east, t.west);
    }

    #[test]
    fn checker_supertiles_abut_each_other_not_themselves() {
        let (set, ps) = patterns(CHECKER, 1);
        let wp = build_wp_tileset(&set, &ps).unwrap();
        assert_eq!(wp.tiles.tiles.len(), 2);
        let a = &wp.tiles.tiles[0];
        let b = &wp.tiles.tiles[1];
        assert_eq!(a.id, "A#1");
        assert_eq!(b.id, "B#1");
        assert_eq!(a.east, b.west);
        assert_eq!(a.north, b.south);
        assert_ne!(a.east, a.west);
        assert_ne!(a.north, a.south);
        assert_eq!(wp.tiles.name, "CHECKER^1");
    }

    #[test]
    fn strip_serialization_escapes_separators() {
        let set = parse_wang("tileset X\ntile a,b N=n S=n E=e W=e\n").unwrap();
        let ps = enumerate_patterns(&set, 1, &mut Budget::unlimited());
        let wp = build_wp_tileset(&set, &ps).unwrap();
        assert_eq!(wp.tiles.tiles[0].north, "a\\,b,a\\,b,a\\,b;a\\,b,a\\,b,a\\,b");
    }

    #[test]
    fn projection_sums_over_centers() {
        let (set, ps) = patterns(CHECKER, 1);
        let wp = build_wp_tileset(&set, &ps).unwrap();
        let projected = project_cycle(&wp, &[ratio(1, 2), ratio(1, 2)]).unwrap();
        assert_eq!(projected, vec![ratio(1, 2), ratio(1, 2)]);
        assert!(project_cycle(&wp, &[rat(1)]).is_err());
    }

    #[test]
    fn mono_cycle_is_a_member_with_unit_witness() {
        let set = parse_wang(MONO).unwrap();
        let m =
            cycle_in_projected_cone(&set, &[rat(1)], 1, &mut Budget::unlimited()).unwrap();
        assert_eq!(m, ConeMembership::Member { witness: vec![rat(1)] });
    }

    #[test]
    fn checker_extreme_point_is_a_member() {
        let set = parse_wang(CHECKER).unwrap();
        let chain = vec![ratio(1, 2), ratio(1, 2)];
        let m = cycle_in_projected_cone(&set, &chain, 1, &mut Budget::unlimited()).unwrap();
        match &m {
            ConeMembership::Member { witness } => {
                let ps = enumerate_patterns(&set, 1, &mut Budget::unlimited());
                let cx = build_wang_complex(&set);
                check_membership_witness(&set, &cx, &ps, &chain, witness).unwrap();
            }
            other => panic!("expected membership, got {other:?}"),
        }
    }

    #[test]
    fn empty_pattern_set_rejects_nonzero_cycles() {
        let set = parse_wang(DEAD).unwrap();
        let m =
            cycle_in_projected_cone(&set, &[rat(1)], 1, &mut Budget::unlimited()).unwrap();
        match m {
            ConeMembership::NotMember { certificate } => {
                assert_eq!(certificate, vec![rat(1)]);
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn dead_set_cannot_tile_by_empty_cone() {
        let set = parse_wang(DEAD).unwrap();
        match tileability(&set, &TileabilityOptions::default()) {
            Verdict::CannotTile(CannotTileReason::EmptyCone { certificate }) => {
                assert!(!certificate.is_empty());
            }
            other => panic!("expected CANNOT_TILE, got {}", other.kind()),
        }
    }

    #[test]
    fn mono_tiles_periodically_on_the_unit_torus() {
        let set = parse_wang(MONO).unwrap();
        match tileability(&set, &TileabilityOptions::default()) {
            Verdict::TilesPeriodically(cert) => {
                assert_eq!(cert.cycle, vec![rat(1)]);
                assert_eq!((cert.tiling.k, cert.tiling.l, cert.tiling.s), (1, 1, 0));
                assert_eq!(cert.ev, vec![rat(1)]);
            }
            other => panic!("expected TILES_PERIODICALLY, got {}", other.kind()),
        }
    }

    #[test]
    fn checker_tiles_periodically_with_index_two() {
        let set = parse_wang(CHECKER).unwrap();
        match tileability(&set, &TileabilityOptions::default()) {
            Verdict::TilesPeriodically(cert) => {
                assert_eq!(cert.cycle, vec![rat(1), rat(1)]);
                assert_eq!(cert.tiling.k * cert.tiling.l, 2);
                assert_eq!(cert.ev, vec![ratio(1, 2), ratio(1, 2)]);
            }
            other => panic!("expected TILES_PERIODICALLY, got {}", other.kind()),
        }
    }

    #[test]
    fn disabled_periodic_search_yields_evidence() {
        let set = parse_wang(CHECKER).unwrap();
        let opts = TileabilityOptions { max_l1: 0, max_p: 2, ..Default::default() };
        match tileability(&set, &opts) {
            Verdict::Undecided(ev) => {
                assert_eq!(ev.extreme_points, vec![vec![ratio(1, 2), ratio(1, 2)]]);
                assert!(ev.extreme_complete);
                assert_eq!(ev.levels.len(), 2);
                assert_eq!(ev.levels[0].patterns, 2);
                assert!(ev.levels[0].complete);
                assert_eq!(ev.levels[0].memberships[0].decided(), Some(true));
                assert_eq!(ev.levels[1].p, 2);
                assert_eq!(ev.levels[1].memberships[0].decided(), Some(true));
                assert_eq!(ev.norm_tables.len(), 1);
                assert_eq!(ev.norm_tables[0].best_upper, Some(rat(0)));
                assert_eq!(ev.cycles_tried, 0);
            }
            other => panic!("expected UNDECIDED, got {}", other.kind()),
        }
    }

    #[test]
    fn lexicographic_cycle_enumeration() {
        let v = nonneg_vectors_with_l1(2, 2);
        assert_eq!(
            v,
            vec![
                vec![rat(0), rat(2)],
                vec![rat(1), rat(1)],
                vec![rat(2), rat(0)],
            ]
        );
    }
}
