//! Command-line front end: every analysis prints a deterministic text
//! report whose certificates can be re-checked later with `verify`.
//!
//! Exit codes: 0 success (including an UNDECIDED verdict and a verified
//! report), 1 failed verification, 2 unreadable or unparseable input,
//! 3 budget exhaustion, 4 chain is not a cycle, 5 polygon geometry not
//! encodable, 6 empty pattern set.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wangnorm::asymptotic;
use wangnorm::budget::Budget;
use wangnorm::homology::{self, build_complex, build_wang_complex, ConeEmptiness};
use wangnorm::reduction;
use wangnorm::refinement::{
    self, CannotTileReason, ConeMembership, TileabilityOptions, Verdict,
};
use wangnorm::report::{self, Item, Report};
use wangnorm::tileset::{
    format_cycle_inline, format_cycle_line, parse_cycle, parse_prototiles, PrototileSet,
    WangTileSet,
};
use wangnorm::verify::verify_report;
use wangnorm::Rat;

#[derive(Parser)]
#[command(
    name = "wangnorm",
    version,
    about = "Tileability analysis for Wang tile and polygon prototile sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Node budget for each individual search (pattern enumeration per
    /// radius, extreme point enumeration, norm search per table row,
    /// torus search per candidate cycle).
    #[arg(long, global = true, visible_alias = "budget", default_value_t = 1_000_000)]
    budget_nodes: u64,

    /// Accepted for interface stability; every algorithm is deterministic
    /// and the value is ignored.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Write the primary artifact to this file: the generated tile set for
    /// `squareify`, `wp` and `forget`, the report itself otherwise.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Complex dimensions, switching rules and the non-negative cycle cone.
    Analyze { file: PathBuf },
    /// Norm table along multiples of a cycle, with the best witness surface.
    Norm {
        file: PathBuf,
        /// Cycle to sample, e.g. "cycle A=1/2 B=1/2" (the leading word
        /// `cycle` may be omitted).
        cycle: String,
        /// Number of multiples sampled.
        #[arg(long, default_value_t = 4)]
        max_n: u32,
    },
    /// Decide tileability as far as the budgets allow.
    Tileability {
        file: PathBuf,
        /// Highest refinement radius checked for pattern emptiness.
        #[arg(long, default_value_t = 2)]
        max_p: u32,
        /// Largest l1 size of candidate cycles in the periodic search.
        #[arg(long, default_value_t = 4)]
        max_l1: u32,
    },
    /// Encode an integral convex polygon set as Wang tiles.
    Squareify { file: PathBuf },
    /// Build the enforced-neighborhood refinement at radius p.
    Wp {
        file: PathBuf,
        /// Neighborhood radius (at least 1).
        #[arg(short)]
        p: u32,
    },
    /// Rename every color to a single fresh color.
    Forget { file: PathBuf },
    /// Re-check the certificates of a previously written report.
    Verify { report: PathBuf },
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl ToString) -> Failure {
    Failure { code, message: message.to_string() }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((report, code)) => {
            let text = report.to_text();
            let redirect = report_goes_to_out(&cli.command);
            match (&cli.out, redirect) {
                (Some(path), true) => {
                    if let Err(e) = fs::write(path, &text) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                _ => print!("{text}"),
            }
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// `--out` redirects the report for analysis commands; generator commands
/// use it for the produced tile set and keep their report on stdout.
fn report_goes_to_out(cmd: &Cmd) -> bool {
    !matches!(cmd, Cmd::Squareify { .. } | Cmd::Wp { .. } | Cmd::Forget { .. })
}

fn run(cli: &Cli) -> Result<(Report, u8), Failure> {
    let budget_nodes = cli.budget_nodes;
    let out = cli.out.as_deref();
    match &cli.command {
        Cmd::Analyze { file } => cmd_analyze(file, budget_nodes),
        Cmd::Norm { file, cycle, max_n } => cmd_norm(file, cycle, *max_n, budget_nodes),
        Cmd::Tileability { file, max_p, max_l1 } => {
            cmd_tileability(file, *max_p, *max_l1, budget_nodes)
        }
        Cmd::Squareify { file } => cmd_squareify(file, out),
        Cmd::Wp { file, p } => cmd_wp(file, *p, out, budget_nodes),
        Cmd::Forget { file } => cmd_forget(file, out),
        Cmd::Verify { report } => cmd_verify(report),
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| fail(2, format!("cannot read {}: {e}", path.display())))
}

fn parse_input(path: &Path) -> Result<(String, PrototileSet), Failure> {
    let text = read_input(path)?;
    let set = parse_prototiles(&text)
        .map_err(|e| fail(2, format!("{}: {e}", path.display())))?;
    Ok((text, set))
}

fn wang_input(path: &Path) -> Result<WangTileSet, Failure> {
    match parse_input(path)?.1 {
        PrototileSet::Wang(set) => Ok(set),
        PrototileSet::Polygon(_) => Err(fail(
            2,
            format!("{}: this command needs a Wang tile set; run `squareify` first", path.display()),
        )),
    }
}

fn kind_of(set: &PrototileSet) -> &'static str {
    match set {
        PrototileSet::Wang(_) => "wang",
        PrototileSet::Polygon(_) => "polygon",
    }
}

fn name_key(set: &PrototileSet) -> &'static str {
    match set {
        PrototileSet::Wang(_) => "tileset",
        PrototileSet::Polygon(_) => "polyset",
    }
}

/// Render a list of cycles as `[(A=1), (B=1/2,C=1/2)]`.
fn point_list(ids: &[String], points: &[Vec<Rat>]) -> String {
    let inner: Vec<String> =
        points.iter().map(|p| format_cycle_inline(ids, p)).collect();
    format!("[{}]", inner.join(", "))
}

/// Embed a canonically serialized set as a block of statement lines.
fn set_block(name: &str, serialized: &str) -> Item {
    Item::Block(name.to_string(), serialized.lines().map(Item::line).collect())
}

/// Write a generated set either to `--out` (recording the path) or into
/// the report itself as an embedded block.
fn emit_set(
    items: &mut Vec<Item>,
    block_name: &str,
    serialized: &str,
    out: Option<&Path>,
) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, serialized)
                .map_err(|e| fail(2, format!("cannot write {}: {e}", path.display())))?;
            items.push(Item::kv("out", path.display()));
        }
        None => items.push(set_block(block_name, serialized)),
    }
    Ok(())
}

fn cmd_analyze(path: &Path, budget_nodes: u64) -> Result<(Report, u8), Failure> {
    let (_, set) = parse_input(path)?;
    let cx = build_complex(&set);
    let mut items = vec![
        Item::kv("command", "analyze"),
        Item::kv("input", path.display()),
        Item::kv("kind", kind_of(&set)),
        Item::kv(name_key(&set), set.name()),
        Item::kv("cells2", cx.n_tiles()),
        Item::kv("cells1", cx.n_edges()),
    ];
    let rules = homology::switching_rules(&cx);
    items.push(Item::Block(
        "switching_rules".to_string(),
        rules.iter().map(|r| Item::line(homology::format_switching_rule(&cx, r))).collect(),
    ));
    let kernel = homology::cycle_space(&cx);
    items.push(Item::kv("kernel_dim", kernel.len()));
    items.push(Item::Block(
        "kernel_basis".to_string(),
        kernel.iter().map(|v| Item::line(format_cycle_line(&cx.tile_ids, v))).collect(),
    ));
    let mut code = 0u8;
    match homology::nonneg_cycle_exists(&cx) {
        ConeEmptiness::Empty(v) => {
            items.push(Item::kv("cone", "empty"));
            items.push(report::cone_certificate_block(&cx, &v));
        }
        ConeEmptiness::NonEmpty(_) => {
            let mut budget = Budget::new(budget_nodes);
            let desc = homology::cone_description(&cx, &mut budget);
            items.push(Item::kv("cone", "nonempty"));
            items.push(Item::kv(
                "extreme_points",
                point_list(&cx.tile_ids, &desc.extreme_points),
            ));
            items.push(Item::kv("extreme_points_complete", desc.complete));
            if !desc.complete {
                code = 3;
            }
        }
    }
    Ok((Report::new(items), code))
}

fn cmd_norm(
    path: &Path,
    cycle_arg: &str,
    max_n: u32,
    budget_nodes: u64,
) -> Result<(Report, u8), Failure> {
    let set = wang_input(path)?;
    let cx = build_wang_complex(&set);
    let ids = set.ids();
    let line = if cycle_arg.trim_start().starts_with("cycle") {
        cycle_arg.to_string()
    } else {
        format!("cycle {cycle_arg}")
    };
    let cycle =
        parse_cycle(&line, &ids).map_err(|e| fail(2, format!("cycle argument: {e}")))?;
    if !cx.is_cycle(&cycle).unwrap_or(false) {
        return Err(fail(4, "the chain is not a cycle: its boundary is nonzero"));
    }
    let table = asymptotic::norm_table(&set, &cx, &cycle, max_n, budget_nodes)
        .map_err(|e| fail(2, e))?;
    let mut items = vec![
        Item::kv("command", "norm"),
        Item::kv("input", path.display()),
        Item::kv("tileset", &set.name),
        Item::line(format_cycle_line(&ids, &cycle)),
        Item::kv("denominator", &table.denominator),
        Item::kv("lipschitz_bound", asymptotic::lipschitz_bound(&cx, &cycle)),
        Item::kv(
            "best_upper",
            table.best_upper.as_ref().map_or("unknown".to_string(), |v| v.to_string()),
        ),
    ];
    items.push(report::normtable_block(&ids, &cycle, &table));
    if let (Some(n), Some(witness)) = (table.best_n, &table.best_witness) {
        items.push(Item::kv("witness_for_n", n));
        items.push(report::surface_block(&set, witness));
    }
    Ok((Report::new(items), 0))
}

fn membership_word(m: &ConeMembership) -> &'static str {
    match m.decided() {
        Some(true) => "true",
        Some(false) => "false",
        None => "unknown",
    }
}

fn cmd_tileability(
    path: &Path,
    max_p: u32,
    max_l1: u32,
    budget_nodes: u64,
) -> Result<(Report, u8), Failure> {
    let set = wang_input(path)?;
    let cx = build_wang_complex(&set);
    let ids = set.ids();
    let opts = TileabilityOptions {
        max_p,
        max_l1,
        budget_nodes,
        ..TileabilityOptions::default()
    };
    let verdict = refinement::tileability(&set, &opts);
    let mut items = vec![
        Item::kv("command", "tileability"),
        Item::kv("input", path.display()),
        Item::kv("tileset", &set.name),
        Item::line(format!("verdict {}", verdict.kind())),
    ];
    match verdict {
        Verdict::CannotTile(CannotTileReason::EmptyCone { certificate }) => {
            items.push(Item::line("certificate empty_cone"));
            items.push(report::cone_certificate_block(&cx, &certificate));
        }
        Verdict::CannotTile(CannotTileReason::NoPattern { p }) => {
            items.push(Item::line(format!("certificate no_pattern p={p}")));
        }
        Verdict::TilesPeriodically(cert) => {
            items.push(Item::line("certificate periodic"));
            items.push(Item::line(format_cycle_line(&ids, &cert.cycle)));
            items.push(Item::kv("ev", format_cycle_inline(&ids, &cert.ev)));
            items.push(report::periodic_block(&set, &cert.tiling));
            items.push(report::surface_block(&set, &cert.surface));
        }
        Verdict::Undecided(ev) => {
            items.push(Item::kv(
                "extreme_points",
                point_list(&ids, &ev.extreme_points),
            ));
            items.push(Item::kv("extreme_points_complete", ev.extreme_complete));
            for level in &ev.levels {
                if level.memberships.is_empty() {
                    items.push(Item::line(format!(
                        "evidence p={} patterns={}",
                        level.p, level.patterns
                    )));
                }
                for (i, m) in level.memberships.iter().enumerate() {
                    items.push(Item::line(format!(
                        "evidence p={} patterns={} cone_member({i})={}",
                        level.p,
                        level.patterns,
                        membership_word(m)
                    )));
                }
            }
            items.push(Item::kv("cycles_tried", ev.cycles_tried));
            items.push(Item::kv("torus_budget_exhausted", ev.torus_budget_exhausted));
            for (point, table) in ev.extreme_points.iter().zip(&ev.norm_tables) {
                items.push(report::normtable_block(&ids, point, table));
            }
        }
    }
    Ok((Report::new(items), 0))
}

fn cmd_squareify(path: &Path, out: Option<&Path>) -> Result<(Report, u8), Failure> {
    let polys = match parse_input(path)?.1 {
        PrototileSet::Polygon(p) => p,
        PrototileSet::Wang(_) => {
            return Err(fail(2, format!("{}: squareify needs a polygon set", path.display())))
        }
    };
    let sq = reduction::squareify(&polys).map_err(|e| fail(5, e))?;
    let seams = sq
        .map
        .colors
        .iter()
        .filter(|(_, p)| matches!(p, reduction::ColorProvenance::Seam { .. }))
        .count();
    let mut items = vec![
        Item::kv("command", "squareify"),
        Item::kv("input", path.display()),
        Item::kv("polyset", &polys.name),
        Item::kv("scale", &sq.scale),
        Item::kv("tiles", sq.tiles.tiles.len()),
        Item::kv("seams", seams),
    ];
    let mut enc = Vec::new();
    for (wang_id, poly_id, (x, y)) in &sq.map.tiles {
        enc.push(Item::line(format!("tile {wang_id} {poly_id} {x} {y}")));
    }
    for (token, prov) in &sq.map.colors {
        enc.push(Item::line(match prov {
            reduction::ColorProvenance::Seam { poly, x, y, horizontal } => {
                let dir = if *horizontal { "h" } else { "v" };
                format!("color {token} seam {poly} {x} {y} {dir}")
            }
            reduction::ColorProvenance::Boundary { color, index } => {
                format!("color {token} sub {color} {index}")
            }
        }));
    }
    items.push(Item::Block("encoding".to_string(), enc));
    emit_set(&mut items, "tileset", &sq.tiles.canonical_serialize(), out)?;
    Ok((Report::new(items), 0))
}

fn cmd_wp(
    path: &Path,
    p: u32,
    out: Option<&Path>,
    budget_nodes: u64,
) -> Result<(Report, u8), Failure> {
    if p < 1 {
        return Err(fail(2, "the radius p must be at least 1"));
    }
    let set = wang_input(path)?;
    let mut budget = Budget::new(budget_nodes);
    let patterns = refinement::enumerate_patterns(&set, p, &mut budget);
    let counts: Vec<usize> = patterns.by_center.iter().map(Vec::len).collect();
    let mut items = vec![
        Item::kv("command", "wp"),
        Item::kv("input", path.display()),
        Item::kv("tileset", &set.name),
        Item::kv("p", p),
        Item::kv("patterns", patterns.total()),
        Item::kv("complete", patterns.complete),
    ];
    for (tile, count) in set.tiles.iter().zip(&counts) {
        items.push(Item::line(format!("center {} patterns={count}", tile.id)));
    }
    if !patterns.complete {
        return Ok((Report::new(items), 3));
    }
    if patterns.total() == 0 {
        return Ok((Report::new(items), 6));
    }
    let wp = refinement::build_wp_tileset(&set, &patterns)
        .expect("a complete nonempty pattern set always refines");
    items.push(Item::kv("supertiles", wp.tiles.tiles.len()));
    emit_set(&mut items, "tileset", &wp.tiles.canonical_serialize(), out)?;
    Ok((Report::new(items), 0))
}

fn cmd_forget(path: &Path, out: Option<&Path>) -> Result<(Report, u8), Failure> {
    let (_, set) = parse_input(path)?;
    let (renamed, fresh) = reduction::forget_colors(&set);
    let mut items = vec![
        Item::kv("command", "forget"),
        Item::kv("input", path.display()),
        Item::kv("kind", kind_of(&set)),
        Item::kv(name_key(&set), set.name()),
        Item::kv("fresh_color", &fresh),
    ];
    emit_set(&mut items, name_key(&renamed), &renamed.canonical_serialize(), out)?;
    Ok((Report::new(items), 0))
}

fn cmd_verify(report_path: &Path) -> Result<(Report, u8), Failure> {
    let report_text = read_input(report_path)?;
    let parsed = Report::parse(&report_text)
        .map_err(|e| fail(2, format!("{}: {e}", report_path.display())))?;
    let input_path = parsed
        .get("input")
        .ok_or_else(|| fail(2, format!("{}: report has no input key", report_path.display())))?
        .to_string();
    let input_text = read_input(Path::new(&input_path))?;
    let outcome = verify_report(&report_text, &input_text);
    let mut items = vec![
        Item::kv("command", "verify"),
        Item::kv("report", report_path.display()),
        Item::kv("input", &input_path),
        Item::kv("verify", if outcome.ok { "ok" } else { "FAILED" }),
    ];
    for check in &outcome.checks {
        items.push(Item::line(format!("check {check}")));
    }
    if let Some(reason) = &outcome.failure {
        items.push(Item::kv("reason", reason));
    }
    Ok((Report::new(items), if outcome.ok { 0 } else { 1 }))
}
