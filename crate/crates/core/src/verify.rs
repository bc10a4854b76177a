//! Independent re-checking of report certificates.
//!
//! Every claim a report makes is either a certificate (a Farkas
//! functional, a glued surface, a periodic fundamental domain) that can be
//! re-checked directly, or an exhaustiveness claim (no legal pattern)
//! that is re-checked by an independently coded enumeration in a
//! different scan order. Verification never repeats the original
//! optimization searches; it only replays arithmetic and validity checks.

use crate::budget::Budget;
use crate::homology::{
    self, build_complex, build_wang_complex, is_cone_emptiness_certificate, is_simplex_vertex,
};
use crate::reduction::{self, ColorProvenance};
use crate::report::{
    block_lines, parse_cone_certificate_block, parse_normtable_block, parse_periodic_block,
    parse_point_list, parse_surface_block, Report,
};
use crate::surface::{self, surface_stats, validate_periodic, validate_surface};
use crate::tileset::{
    format_cycle_inline, parse_cycle, parse_prototiles, parse_wang, PrototileSet, WangTileSet,
};
use crate::{rat, Rat};
use num_traits::{One, Zero};

/// Result of verifying one report.
#[derive(Clone, Debug)]
pub struct VerifyOutcome {
    pub ok: bool,
    /// Human-readable names of the checks that passed, in order.
    pub checks: Vec<String>,
    /// First failing check, when `ok` is false.
    pub failure: Option<String>,
}

/// Re-check all certificates in `report_text` against the original input
/// file contents.
pub fn verify_report(report_text: &str, input_text: &str) -> VerifyOutcome {
    let mut checks = Vec::new();
    match run(report_text, input_text, &mut checks) {
        Ok(()) => VerifyOutcome { ok: true, checks, failure: None },
        Err(msg) => VerifyOutcome { ok: false, checks, failure: Some(msg) },
    }
}

fn run(report_text: &str, input_text: &str, checks: &mut Vec<String>) -> Result<(), String> {
    let report = Report::parse(report_text).map_err(|e| format!("report unreadable: {e}"))?;
    let command = report.get("command").ok_or("report has no command key")?.to_string();
    match command.as_str() {
        "analyze" => verify_analyze(&report, input_text, checks),
        "norm" => verify_norm(&report, input_text, checks),
        "tileability" => verify_tileability(&report, input_text, checks),
        "squareify" => verify_squareify(&report, input_text, checks),
        "wp" => verify_wp(&report, input_text, checks),
        "forget" => verify_forget(&report, input_text, checks),
        other => Err(format!("cannot verify a `{other}` report")),
    }
}

fn pass(checks: &mut Vec<String>, what: &str) {
    checks.push(what.to_string());
}

fn require(cond: bool, msg: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.to_string())
    }
}

fn get<'a>(report: &'a Report, key: &str) -> Result<&'a str, String> {
    report.get(key).ok_or_else(|| format!("report has no `{key}` key"))
}

fn parse_wang_input(input_text: &str) -> Result<WangTileSet, String> {
    parse_wang(input_text).map_err(|e| format!("input does not parse: {e}"))
}

fn verify_analyze(
    report: &Report,
    input_text: &str,
    checks: &mut Vec<String>,
) -> Result<(), String> {
    let set = parse_prototiles(input_text).map_err(|e| format!("input does not parse: {e}"))?;
    let kind = match &set {
        PrototileSet::Wang(_) => "wang",
        PrototileSet::Polygon(_) => "polygon",
    };
    require(get(report, "kind")? == kind, "input kind differs from report")?;
    pass(checks, "input kind");
    let cx = build_complex(&set);
    require(
        get(report, "cells2")? == cx.n_tiles().to_string(),
        "2-cell count differs",
    )?;
    require(
        get(report, "cells1")? == cx.n_edges().to_string(),
        "1-cell count differs",
    )?;
    pass(checks, "complex dimensions");
    let kernel = homology::cycle_space(&cx);
    require(
        get(report, "kernel_dim")? == kernel.len().to_string(),
        "kernel dimension differs",
    )?;
    pass(checks, "kernel dimension");
    match get(report, "cone")? {
        "empty" => {
            let block = report
                .block("cone_certificate")
                .ok_or("empty cone claimed without a certificate block")?;
            let v = parse_cone_certificate_block(block, cx.n_edges())?;
            require(
                is_cone_emptiness_certificate(&cx, &v),
                "cone emptiness certificate does not check out",
            )?;
            pass(checks, "cone emptiness certificate");
        }
        "nonempty" => {
            let ids = cx.tile_ids.clone();
            let points = parse_point_list(get(report, "extreme_points")?, &ids)?;
            let complete = get(report, "extreme_points_complete")? == "true";
            require(
                !complete || !points.is_empty(),
                "a complete nonempty cone must list extreme points",
            )?;
            for (i, point) in points.iter().enumerate() {
                if complete {
                    require(
                        is_simplex_vertex(&cx, point),
                        &format!("extreme point {i} is not a simplex vertex"),
                    )?;
                } else {
                    let sum: Rat = point.iter().fold(Rat::zero(), |a, v| a + v.clone());
                    require(
                        homology::is_nonneg(point)
                            && sum.is_one()
                            && cx.is_cycle(point).unwrap_or(false),
                        &format!("point {i} is not a normalized non-negative cycle"),
                    )?;
                }
            }
            pass(checks, "extreme points");
        }
        other => return Err(format!("unknown cone status `{other}`")),
    }
    Ok(())
}

/// Recompute `best_upper` from the parsed rows and compare.
fn check_normtable_consistency(
    nt: &crate::report::ParsedNormTable,
    cycle: &[Rat],
) -> Result<(), String> {
    let d = homology::common_denominator(cycle);
    let mut best: Option<Rat> = None;
    for &(n, value, exact) in &nt.rows {
        if exact {
            let bound = rat(value) / (Rat::from_integer(d.clone()) * rat(n as i64));
            if best.as_ref().map_or(true, |b| bound < *b) {
                best = Some(bound);
            }
        }
    }
    let reported = nt.best_upper.clone().ok_or("normtable has no best_upper line")?;
    require(reported == best, "best_upper does not match the exact rows")?;
    // Subadditivity must hold among exact rows of the same table.
    let exact: Vec<(u32, i64)> =
        nt.rows.iter().filter(|r| r.2).map(|&(n, v, _)| (n, v)).collect();
    for &(n1, v1) in &exact {
        for &(n2, v2) in &exact {
            if let Some(&(_, v12)) = exact.iter().find(|&&(n, _)| n == n1 + n2) {
                require(
                    v12 <= v1 + v2,
                    &format!("subadditivity fails between rows {n1} and {n2}"),
                )?;
            }
        }
    }
    Ok(())
}

fn check_surface_accounting(stats: &surface::SurfaceStats) -> Result<(), String> {
    require(stats.edges == 2 * stats.faces, "surface does not satisfy E = 2F")?;
    for comp in &stats.components {
        require(comp.euler % 2 == 0, "component with odd Euler characteristic")?;
        require(
            comp.euler == comp.vertices as i64 - comp.edges as i64 + comp.faces as i64,
            "component Euler characteristic miscounts cells",
        )?;
    }
    Ok(())
}

fn verify_norm(report: &Report, input_text: &str, checks: &mut Vec<String>) -> Result<(), String> {
    let set = parse_wang_input(input_text)?;
    let cx = build_wang_complex(&set);
    let ids = set.ids();
    let cycle_lines = report.lines_starting("cycle");
    let cycle_line = cycle_lines.first().ok_or("report has no cycle line")?;
    let cycle =
        parse_cycle(cycle_line, &ids).map_err(|e| format!("cycle does not parse: {e}"))?;
    require(cx.is_cycle(&cycle).unwrap_or(false), "the chain is not a cycle")?;
    pass(checks, "cycle condition");
    let d = homology::common_denominator(&cycle);
    require(get(report, "denominator")? == d.to_string(), "denominator differs")?;
    require(
        get(report, "lipschitz_bound")? == crate::asymptotic::lipschitz_bound(&cx, &cycle).to_string(),
        "Lipschitz bound differs",
    )?;
    pass(checks, "denominator and Lipschitz bound");
    let nt_block = report.block("normtable").ok_or("report has no normtable block")?;
    let nt = parse_normtable_block(nt_block)?;
    require(nt.cycle_line == *cycle_line, "normtable cycle differs from the input cycle")?;
    check_normtable_consistency(&nt, &cycle)?;
    pass(checks, "norm table arithmetic");
    if let Some(surface_items) = report.block("surface") {
        let n_str = get(report, "witness_for_n")?;
        let n: u32 = n_str.parse().map_err(|_| "bad witness_for_n")?;
        let row = nt
            .rows
            .iter()
            .find(|r| r.0 == n)
            .ok_or("witness_for_n references a missing row")?;
        let scaled: Vec<Rat> = cycle
            .iter()
            .map(|v| v.clone() * Rat::from_integer(d.clone()) * rat(n as i64))
            .collect();
        let witness = parse_surface_block(&set, surface_items)?;
        validate_surface(&set, &witness, Some(&scaled))?;
        let stats = surface_stats(&witness);
        check_surface_accounting(&stats)?;
        require(
            row.1 == stats.faces as i64 - stats.vertices as i64,
            "witness surface does not achieve the claimed value",
        )?;
        pass(checks, "witness surface");
    }
    Ok(())
}

fn verify_tileability(
    report: &Report,
    input_text: &str,
    checks: &mut Vec<String>,
) -> Result<(), String> {
    let set = parse_wang_input(input_text)?;
    let cx = build_wang_complex(&set);
    let ids = set.ids();
    let verdicts = report.lines_starting("verdict");
    let verdict = *verdicts.first().ok_or("report has no verdict line")?;
    match verdict {
        "verdict CANNOT_TILE" => {
            let cert_lines = report.lines_starting("certificate");
            let cert = *cert_lines.first().ok_or("no certificate line")?;
            if cert == "certificate empty_cone" {
                let block = report.block("cone_certificate").ok_or("no certificate block")?;
                let v = parse_cone_certificate_block(block, cx.n_edges())?;
                require(
                    is_cone_emptiness_certificate(&cx, &v),
                    "cone emptiness certificate does not check out",
                )?;
                pass(checks, "cone emptiness certificate");
            } else if let Some(rest) = cert.strip_prefix("certificate no_pattern p=") {
                let p: u32 = rest.parse().map_err(|_| "bad radius in certificate")?;
                let count = count_patterns_column_major(&set, p, &mut Budget::unlimited())
                    .ok_or("independent recount ran out of budget")?;
                require(count == 0, "independent enumeration found a legal pattern")?;
                pass(checks, "independent pattern recount");
            } else {
                return Err(format!("unknown certificate `{cert}`"));
            }
        }
        "verdict TILES_PERIODICALLY" => {
            let cycle_lines = report.lines_starting("cycle");
            let cycle_line = cycle_lines.first().ok_or("no cycle line")?;
            let cycle =
                parse_cycle(cycle_line, &ids).map_err(|e| format!("bad cycle: {e}"))?;
            require(
                homology::is_nonneg(&cycle)
                    && homology::is_integral(&cycle)
                    && cx.is_cycle(&cycle).unwrap_or(false),
                "claimed cycle is not a non-negative integral cycle",
            )?;
            pass(checks, "cycle condition");
            let pt_block = report.block("periodic_tiling").ok_or("no periodic_tiling block")?;
            let pt = parse_periodic_block(&set, pt_block)?;
            validate_periodic(&set, &pt)?;
            pass(checks, "periodic tiling adjacency");
            let ev = surface::ev_of_periodic(&cx, &pt);
            require(
                get(report, "ev")? == format_cycle_inline(&ids, &ev),
                "ev does not match the fundamental domain",
            )?;
            pass(checks, "tile frequencies");
            if let Some(surface_items) = report.block("surface") {
                let witness = parse_surface_block(&set, surface_items)?;
                validate_surface(&set, &witness, Some(&cycle))?;
                let stats = surface_stats(&witness);
                check_surface_accounting(&stats)?;
                require(
                    stats.components.iter().all(|c| c.flat && c.euler == 0),
                    "witness surface is not a flat torus",
                )?;
                pass(checks, "flat torus witness");
            }
        }
        "verdict UNDECIDED" => {
            let points = parse_point_list(get(report, "extreme_points")?, &ids)?;
            let complete = get(report, "extreme_points_complete")? == "true";
            for (i, point) in points.iter().enumerate() {
                let ok = if complete {
                    is_simplex_vertex(&cx, point)
                } else {
                    let sum: Rat = point.iter().fold(Rat::zero(), |a, v| a + v.clone());
                    homology::is_nonneg(point)
                        && sum.is_one()
                        && cx.is_cycle(point).unwrap_or(false)
                };
                require(ok, &format!("extreme point {i} fails its invariants"))?;
            }
            pass(checks, "extreme points");
            for line in report.lines_starting("evidence") {
                for field in line.split_whitespace().skip(1) {
                    let (k, v) = field
                        .split_once('=')
                        .ok_or_else(|| format!("bad evidence field `{field}`"))?;
                    let value_ok = match k {
                        "p" | "patterns" => v.parse::<u64>().is_ok(),
                        _ if k.starts_with("cone_member(") => {
                            matches!(v, "true" | "false" | "unknown")
                        }
                        _ => false,
                    };
                    require(value_ok, &format!("bad evidence field `{field}`"))?;
                }
            }
            pass(checks, "evidence ledger shape");
            for items in report.blocks("normtable") {
                let nt = parse_normtable_block(items)?;
                let cycle = parse_cycle(&nt.cycle_line, &ids)
                    .map_err(|e| format!("bad normtable cycle: {e}"))?;
                require(cx.is_cycle(&cycle).unwrap_or(false), "normtable chain is not a cycle")?;
                check_normtable_consistency(&nt, &cycle)?;
            }
            pass(checks, "norm tables");
        }
        other => return Err(format!("unknown verdict `{other}`")),
    }
    Ok(())
}

fn verify_squareify(
    report: &Report,
    input_text: &str,
    checks: &mut Vec<String>,
) -> Result<(), String> {
    let polys = match parse_prototiles(input_text).map_err(|e| format!("input: {e}"))? {
        PrototileSet::Polygon(p) => p,
        PrototileSet::Wang(_) => return Err("squareify input is a Wang set".to_string()),
    };
    let sq = reduction::squareify(&polys).map_err(|e| format!("pipeline fails: {e}"))?;
    require(get(report, "scale")? == sq.scale.to_string(), "scale differs")?;
    require(
        get(report, "tiles")? == sq.tiles.tiles.len().to_string(),
        "tile count differs",
    )?;
    let seams = sq
        .map
        .colors
        .iter()
        .filter(|(_, p)| matches!(p, ColorProvenance::Seam { .. }))
        .count();
    require(get(report, "seams")? == seams.to_string(), "seam count differs")?;
    pass(checks, "pipeline counts");
    if let Some(items) = report.block("tileset") {
        let embedded: Vec<&str> = block_lines(items);
        let expected = sq.tiles.canonical_serialize();
        let expected_lines: Vec<&str> = expected.lines().collect();
        require(embedded == expected_lines, "embedded tile set differs")?;
        pass(checks, "encoded tile set");
    }
    Ok(())
}

fn verify_wp(report: &Report, input_text: &str, checks: &mut Vec<String>) -> Result<(), String> {
    let set = parse_wang_input(input_text)?;
    let p: u32 = get(report, "p")?.parse().map_err(|_| "bad p")?;
    require(p >= 1, "p must be at least 1")?;
    require(get(report, "complete")? == "true", "cannot re-verify a partial enumeration")?;
    let counts = count_patterns_per_center_column_major(&set, p, &mut Budget::unlimited())
        .ok_or("independent recount ran out of budget")?;
    let total: usize = counts.iter().sum();
    require(
        get(report, "patterns")? == total.to_string(),
        "pattern total differs from independent recount",
    )?;
    let center_lines = report.lines_starting("center");
    require(
        center_lines.len() == set.tiles.len(),
        "one center line per tile expected",
    )?;
    for (j, line) in center_lines.iter().enumerate() {
        let expected = format!("center {} patterns={}", set.tiles[j].id, counts[j]);
        require(*line == expected, &format!("center line {j} differs: `{line}`"))?;
    }
    pass(checks, "independent pattern recount");
    Ok(())
}

fn verify_forget(
    report: &Report,
    input_text: &str,
    checks: &mut Vec<String>,
) -> Result<(), String> {
    let set = parse_prototiles(input_text).map_err(|e| format!("input: {e}"))?;
    let (renamed, fresh) = reduction::forget_colors(&set);
    require(get(report, "fresh_color")? == fresh, "fresh color differs")?;
    let expected = renamed.canonical_serialize();
    let name = match &renamed {
        PrototileSet::Wang(_) => "tileset",
        PrototileSet::Polygon(_) => "polyset",
    };
    if let Some(items) = report.block(name) {
        let embedded: Vec<&str> = block_lines(items);
        let expected_lines: Vec<&str> = expected.lines().collect();
        require(embedded == expected_lines, "embedded set differs")?;
    }
    pass(checks, "color forgetting");
    Ok(())
}

/// Independent pattern counter, deliberately coded with a different scan
/// order (columns left to right, bottom to top within a column) from the
/// primary enumerator. `None` when the budget runs out.
pub fn count_patterns_column_major(
    set: &WangTileSet,
    p: u32,
    budget: &mut Budget,
) -> Option<usize> {
    count_patterns_per_center_column_major(set, p, budget).map(|v| v.iter().sum())
}

/// Per-center totals of the independent counter.
pub fn count_patterns_per_center_column_major(
    set: &WangTileSet,
    p: u32,
    budget: &mut Budget,
) -> Option<Vec<usize>> {
    let side = 2 * p as usize + 1;
    let mut counts = Vec::with_capacity(set.tiles.len());
    for center in 0..set.tiles.len() {
        let mut grid = vec![usize::MAX; side * side];
        let mut count = 0usize;
        if !fill_column_major(set, side, center, &mut grid, 0, budget, &mut count) {
            return None;
        }
        counts.push(count);
    }
    Some(counts)
}

fn fill_column_major(
    set: &WangTileSet,
    side: usize,
    center: usize,
    grid: &mut [usize],
    k: usize,
    budget: &mut Budget,
    count: &mut usize,
) -> bool {
    if k == grid.len() {
        *count += 1;
        return true;
    }
    let x = k / side;
    let y = k % side;
    let p = side / 2;
    for t in 0..set.tiles.len() {
        if x == p && y == p && t != center {
            continue;
        }
        if !budget.tick() {
            return false;
        }
        let tile = &set.tiles[t];
        if x > 0 && set.tiles[grid[k - side]].east != tile.west {
            continue;
        }
        if y > 0 && set.tiles[grid[k - 1]].north != tile.south {
            continue;
        }
        grid[k] = t;
        if !fill_column_major(set, side, center, grid, k + 1, budget, count) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::refinement::enumerate_patterns;

    const MONO: &str = "tileset MONO\ntile T N=a S=a E=a W=a\n";
    const DEAD: &str = "tileset DEAD\ntile T N=a S=b E=c W=c\n";
    const CHECKER: &str =
        "tileset CHECKER\ntile A N=1 S=2 E=4 W=3\ntile B N=2 S=1 E=3 W=4\n";

    #[test]
    fn independent_counter_agrees_with_the_enumerator() {
        for text in [MONO, DEAD, CHECKER] {
            let set = parse_wang(text).unwrap();
            for p in 1..=2 {
                let ps = enumerate_patterns(&set, p, &mut Budget::unlimited());
                let counts =
                    count_patterns_per_center_column_major(&set, p, &mut Budget::unlimited())
                        .unwrap();
                let by_center: Vec<usize> = ps.by_center.iter().map(Vec::len).collect();
                assert_eq!(by_center, counts, "{text} at radius {p}");
            }
        }
    }

    #[test]
    fn verifying_an_unknown_command_fails() {
        let out = verify_report("command: frobnicate\n", MONO);
        assert!(!out.ok);
        assert!(out.failure.unwrap().contains("frobnicate"));
    }

    #[test]
    fn no_pattern_certificate_checks_against_the_recount() {
        let report = "command: tileability\nverdict CANNOT_TILE\ncertificate no_pattern p=1\n";
        let out = verify_report(report, DEAD);
        assert!(out.ok, "{:?}", out.failure);
        let lying = verify_report(report, MONO);
        assert!(!lying.ok);
    }

    #[test]
    fn tampered_cone_certificate_is_rejected() {
        let good = "command: tileability\nverdict CANNOT_TILE\ncertificate empty_cone\nbegin cone_certificate\n  row 0 -1 H:a\n  row 1 1 H:b\n  row 2 0 V:c\nend\n";
        let out = verify_report(good, DEAD);
        assert!(out.ok, "{:?}", out.failure);
        let bad = good.replace("row 0 -1", "row 0 1");
        assert!(!verify_report(&bad, DEAD).ok);
    }
}
