//! Line-oriented report format.
//!
//! A report is a sequence of items: `key: value` pairs, free-standing
//! statement lines, and named blocks delimited by `begin <name>` / `end`.
//! Keys are single tokens; a line is a key-value pair exactly when its
//! first token ends with a colon. Writers emit blocks indented two spaces
//! per nesting level; parsers ignore indentation. All renderers are
//! deterministic so identical analyses produce byte-identical reports.

use crate::asymptotic::NormTable;
use crate::homology::ApComplex;
use crate::surface::{slot_copy, slot_of, slot_side, GluedSurface, PeriodicTiling, SquareCopy};
use crate::surface::SearchStatus;
use crate::tileset::{parse_rat, Side, WangTileSet};
use crate::Rat;

/// One element of a report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    KeyValue(String, String),
    Line(String),
    Block(String, Vec<Item>),
}

impl Item {
    pub fn kv(key: &str, value: impl ToString) -> Item {
        Item::KeyValue(key.to_string(), value.to_string())
    }

    pub fn line(text: impl ToString) -> Item {
        Item::Line(text.to_string())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub items: Vec<Item>,
}

fn write_items(out: &mut String, items: &[Item], depth: usize) {
    for item in items {
        for _ in 0..depth {
            out.push_str("  ");
        }
        match item {
            Item::KeyValue(k, v) => {
                out.push_str(k);
                out.push_str(": ");
                out.push_str(v);
                out.push('\n');
            }
            Item::Line(text) => {
                out.push_str(text);
                out.push('\n');
            }
            Item::Block(name, inner) => {
                out.push_str("begin ");
                out.push_str(name);
                out.push('\n');
                write_items(out, inner, depth + 1);
                for _ in 0..depth {
                    out.push_str("  ");
                }
                out.push_str("end\n");
            }
        }
    }
}

impl Report {
    pub fn new(items: Vec<Item>) -> Report {
        Report { items }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        write_items(&mut out, &self.items, 0);
        out
    }

    pub fn parse(text: &str) -> Result<Report, String> {
        let mut stack: Vec<(String, Vec<Item>)> = vec![(String::new(), Vec::new())];
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix("begin ") {
                stack.push((name.trim().to_string(), Vec::new()));
                continue;
            }
            if line == "end" {
                let (name, items) = stack.pop().ok_or("unbalanced end")?;
                if stack.is_empty() {
                    return Err(format!("line {}: unbalanced end", lineno + 1));
                }
                stack.last_mut().unwrap().1.push(Item::Block(name, items));
                continue;
            }
            let first = line.split_whitespace().next().unwrap();
            let item = if let Some(key) = first.strip_suffix(':') {
                let value = line[first.len()..].trim_start();
                Item::KeyValue(key.to_string(), value.to_string())
            } else {
                Item::Line(line.to_string())
            };
            stack.last_mut().unwrap().1.push(item);
        }
        if stack.len() != 1 {
            return Err("unterminated block".to_string());
        }
        Ok(Report { items: stack.pop().unwrap().1 })
    }

    /// First top-level value for `key`.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.items.iter().find_map(|item| match item {
            Item::KeyValue(k, v) if k == key => Some(v.as_str()),
            _ => None,
        })
    }

    /// Top-level statement lines whose first token equals `word`.
    pub fn lines_starting(&self, word: &str) -> Vec<&str> {
        self.items
            .iter()
            .filter_map(|item| match item {
                Item::Line(text) if text.split_whitespace().next() == Some(word) => {
                    Some(text.as_str())
                }
                _ => None,
            })
            .collect()
    }

    /// First top-level block named `name`.
    pub fn block(&self, name: &str) -> Option<&Vec<Item>> {
        self.items.iter().find_map(|item| match item {
            Item::Block(n, items) if n == name => Some(items),
            _ => None,
        })
    }

    /// All top-level blocks named `name`.
    pub fn blocks(&self, name: &str) -> Vec<&Vec<Item>> {
        self.items
            .iter()
            .filter_map(|item| match item {
                Item::Block(n, items) if n == name => Some(items),
                _ => None,
            })
            .collect()
    }
}

/// Statement lines of a block, in order.
pub fn block_lines(items: &[Item]) -> Vec<&str> {
    items
        .iter()
        .filter_map(|item| match item {
            Item::Line(text) => Some(text.as_str()),
            _ => None,
        })
        .collect()
}

/// `key: value` lookup inside a block.
pub fn block_get<'a>(items: &'a [Item], key: &str) -> Option<&'a str> {
    items.iter().find_map(|item| match item {
        Item::KeyValue(k, v) if k == key => Some(v.as_str()),
        _ => None,
    })
}

/// Render a glued surface: `copy <id> <tile> <sign>` per square copy and
/// `glue <copy>.<side> <copy>.<side>` per unordered slot pair.
pub fn surface_block(set: &WangTileSet, surface: &GluedSurface) -> Item {
    let mut items = Vec::new();
    for (i, c) in surface.copies.iter().enumerate() {
        items.push(Item::line(format!("copy {} {} {}", i, set.tiles[c.tile].id, c.sign)));
    }
    for s in 0..surface.partner.len() {
        let t = surface.partner[s];
        if s < t {
            items.push(Item::line(format!(
                "glue {}.{} {}.{}",
                slot_copy(s),
                slot_side(s),
                slot_copy(t),
                slot_side(t)
            )));
        }
    }
    Item::Block("surface".to_string(), items)
}

/// Rebuild a glued surface from its block.
pub fn parse_surface_block(set: &WangTileSet, items: &[Item]) -> Result<GluedSurface, String> {
    let mut copies = Vec::new();
    let mut glues = Vec::new();
    for line in block_lines(items) {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.first() {
            Some(&"copy") => {
                if tokens.len() != 4 {
                    return Err(format!("bad copy line `{line}`"));
                }
                let i: usize = tokens[1].parse().map_err(|_| "bad copy id")?;
                if i != copies.len() {
                    return Err("copy ids must be consecutive from 0".to_string());
                }
                let tile =
                    set.index_of(tokens[2]).ok_or_else(|| format!("unknown tile `{}`", tokens[2]))?;
                let sign: i8 = tokens[3].parse().map_err(|_| "bad sign")?;
                if sign != 1 && sign != -1 {
                    return Err("sign must be 1 or -1".to_string());
                }
                copies.push(SquareCopy { tile, sign });
            }
            Some(&"glue") => {
                if tokens.len() != 3 {
                    return Err(format!("bad glue line `{line}`"));
                }
                let parse_slot = |tok: &str| -> Result<(usize, Side), String> {
                    let (c, s) = tok.split_once('.').ok_or("bad slot")?;
                    let copy: usize = c.parse().map_err(|_| "bad copy in slot")?;
                    let side: Side = s.parse().map_err(|_| "bad side in slot")?;
                    Ok((copy, side))
                };
                glues.push((parse_slot(tokens[1])?, parse_slot(tokens[2])?));
            }
            _ => return Err(format!("unexpected surface line `{line}`")),
        }
    }
    let n = copies.len() * 4;
    let mut partner = vec![usize::MAX; n];
    for ((c1, s1), (c2, s2)) in glues {
        if c1 >= copies.len() || c2 >= copies.len() {
            return Err("glue references a missing copy".to_string());
        }
        let a = slot_of(c1, s1);
        let b = slot_of(c2, s2);
        if partner[a] != usize::MAX || partner[b] != usize::MAX {
            return Err("slot glued twice".to_string());
        }
        partner[a] = b;
        partner[b] = a;
    }
    if partner.iter().any(|&p| p == usize::MAX) {
        return Err("unglued slot".to_string());
    }
    Ok(GluedSurface { copies, partner })
}

/// Render a periodic tiling: `period <k> <l> <s>` then one
/// `at <x> <y> <tile>` line per fundamental-domain cell.
pub fn periodic_block(set: &WangTileSet, pt: &PeriodicTiling) -> Item {
    let mut items = vec![Item::line(format!("period {} {} {}", pt.k, pt.l, pt.s))];
    for y in 0..pt.l {
        for x in 0..pt.k {
            let t = pt.domain[(y * pt.k + x) as usize];
            items.push(Item::line(format!("at {} {} {}", x, y, set.tiles[t].id)));
        }
    }
    Item::Block("periodic_tiling".to_string(), items)
}

pub fn parse_periodic_block(set: &WangTileSet, items: &[Item]) -> Result<PeriodicTiling, String> {
    let mut period = None;
    let mut cells = Vec::new();
    for line in block_lines(items) {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.first() {
            Some(&"period") if tokens.len() == 4 => {
                let k: i64 = tokens[1].parse().map_err(|_| "bad period")?;
                let l: i64 = tokens[2].parse().map_err(|_| "bad period")?;
                let s: i64 = tokens[3].parse().map_err(|_| "bad period")?;
                period = Some((k, l, s));
            }
            Some(&"at") if tokens.len() == 4 => {
                let x: i64 = tokens[1].parse().map_err(|_| "bad cell")?;
                let y: i64 = tokens[2].parse().map_err(|_| "bad cell")?;
                let t = set
                    .index_of(tokens[3])
                    .ok_or_else(|| format!("unknown tile `{}`", tokens[3]))?;
                cells.push((x, y, t));
            }
            _ => return Err(format!("unexpected periodic line `{line}`")),
        }
    }
    let (k, l, s) = period.ok_or("missing period line")?;
    if k < 1 || l < 1 {
        return Err("degenerate period".to_string());
    }
    let mut domain = vec![usize::MAX; (k * l) as usize];
    for (x, y, t) in cells {
        if x < 0 || x >= k || y < 0 || y >= l {
            return Err("cell outside fundamental domain".to_string());
        }
        domain[(y * k + x) as usize] = t;
    }
    if domain.iter().any(|&t| t == usize::MAX) {
        return Err("missing fundamental-domain cell".to_string());
    }
    Ok(PeriodicTiling { k, l, s, domain })
}

/// Render a norm table block: the sampled cycle, one `n= value= status=`
/// line per row, and the best upper bound.
pub fn normtable_block(ids: &[String], cycle: &[Rat], table: &NormTable) -> Item {
    let mut items = vec![Item::line(crate::tileset::format_cycle_line(ids, cycle))];
    for row in &table.rows {
        let status = match row.status {
            SearchStatus::Exact => "exact",
            SearchStatus::UpperBound => "partial",
        };
        items.push(Item::line(format!("n={} value={} status={}", row.n, row.value, status)));
    }
    let best = match &table.best_upper {
        Some(v) => v.to_string(),
        None => "unknown".to_string(),
    };
    items.push(Item::line(format!("best_upper={best}")));
    Item::Block("normtable".to_string(), items)
}

/// Parsed form of a normtable block.
pub struct ParsedNormTable {
    pub cycle_line: String,
    pub rows: Vec<(u32, i64, bool)>,
    pub best_upper: Option<Option<Rat>>,
}

pub fn parse_normtable_block(items: &[Item]) -> Result<ParsedNormTable, String> {
    let mut cycle_line = None;
    let mut rows = Vec::new();
    let mut best_upper = None;
    for line in block_lines(items) {
        if line.starts_with("cycle") {
            cycle_line = Some(line.to_string());
        } else if let Some(rest) = line.strip_prefix("best_upper=") {
            best_upper = Some(if rest == "unknown" {
                None
            } else {
                Some(parse_rat(rest).ok_or_else(|| format!("bad bound `{rest}`"))?)
            });
        } else if line.starts_with("n=") {
            let mut n = None;
            let mut value = None;
            let mut exact = None;
            for field in line.split_whitespace() {
                if let Some((k, v)) = field.split_once('=') {
                    match k {
                        "n" => n = v.parse::<u32>().ok(),
                        "value" => value = v.parse::<i64>().ok(),
                        "status" => exact = Some(v == "exact"),
                        _ => {}
                    }
                }
            }
            match (n, value, exact) {
                (Some(n), Some(v), Some(e)) => rows.push((n, v, e)),
                _ => return Err(format!("bad normtable row `{line}`")),
            }
        } else {
            return Err(format!("unexpected normtable line `{line}`"));
        }
    }
    Ok(ParsedNormTable {
        cycle_line: cycle_line.ok_or("normtable block without cycle line")?,
        rows,
        best_upper,
    })
}

/// Parse the inline cycle form `(A=1/2,B=2)`; `(0)` is the zero cycle.
pub fn parse_cycle_inline(token: &str, ids: &[String]) -> Result<Vec<Rat>, String> {
    use num_traits::Zero;
    let inner = token
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| format!("`{token}` is not parenthesized"))?;
    let mut coords = vec![Rat::zero(); ids.len()];
    if inner == "0" {
        return Ok(coords);
    }
    for part in inner.split(',') {
        let (id, value) = part
            .rsplit_once('=')
            .ok_or_else(|| format!("bad coordinate `{part}`"))?;
        let i = ids
            .iter()
            .position(|x| x == id)
            .ok_or_else(|| format!("unknown tile `{id}`"))?;
        coords[i] = parse_rat(value).ok_or_else(|| format!("bad value `{value}`"))?;
    }
    Ok(coords)
}

/// Parse a list of inline cycles `[(A=1), (B=1/2,C=1/2)]`.
pub fn parse_point_list(text: &str, ids: &[String]) -> Result<Vec<Vec<Rat>>, String> {
    let inner = text
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| format!("`{text}` is not bracketed"))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split("), (")
        .enumerate()
        .map(|(i, part)| {
            let mut token = part.trim().to_string();
            if i > 0 && !token.starts_with('(') {
                token.insert(0, '(');
            }
            if !token.ends_with(')') {
                token.push(')');
            }
            parse_cycle_inline(&token, ids)
        })
        .collect()
}

/// Render a functional over the 1-cells as `row <index> <value>` lines
/// (the cell name is appended for readability and ignored on re-parse).
pub fn cone_certificate_block(cx: &ApComplex, v: &[Rat]) -> Item {
    let items = v
        .iter()
        .enumerate()
        .map(|(i, value)| Item::line(format!("row {} {} {}", i, value, cx.cells1[i])))
        .collect();
    Item::Block("cone_certificate".to_string(), items)
}

pub fn parse_cone_certificate_block(items: &[Item], rows: usize) -> Result<Vec<Rat>, String> {
    let mut v = vec![None; rows];
    for line in block_lines(items) {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() < 3 || tokens[0] != "row" {
            return Err(format!("unexpected certificate line `{line}`"));
        }
        let i: usize = tokens[1].parse().map_err(|_| "bad row index")?;
        if i >= rows {
            return Err(format!("certificate row {i} out of range"));
        }
        let value = parse_rat(tokens[2]).ok_or_else(|| format!("bad value `{}`", tokens[2]))?;
        if v[i].replace(value).is_some() {
            return Err(format!("certificate row {i} repeated"));
        }
    }
    v.into_iter()
        .enumerate()
        .map(|(i, o)| o.ok_or(format!("certificate row {i} missing")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::Budget;
    use crate::homology::build_wang_complex;
    use crate::surface::{surface_stats, thurston_norm, validate_surface};
    use crate::tileset::parse_wang;
    use crate::{rat, ratio};

    #[test]
    fn writer_and_parser_round_trip() {
        let report = Report::new(vec![
            Item::kv("command", "analyze"),
            Item::line("verdict CANNOT_TILE"),
            Item::Block(
                "outer".to_string(),
                vec![
                    Item::kv("k", "v with spaces"),
                    Item::Block("inner".to_string(), vec![Item::line("row 0 1 H:a")]),
                ],
            ),
        ]);
        let text = report.to_text();
        assert_eq!(
            text,
            "command: analyze\nverdict CANNOT_TILE\nbegin outer\n  k: v with spaces\n  begin inner\n    row 0 1 H:a\n  end\nend\n"
        );
        assert_eq!(Report::parse(&text).unwrap(), report);
    }

    #[test]
    fn statement_lines_with_colons_inside_stay_lines() {
        let text = "edge H:a : +1*A -1*B = 0\ncells1: 4\n";
        let r = Report::parse(text).unwrap();
        assert_eq!(r.get("cells1"), Some("4"));
        assert_eq!(r.lines_starting("edge"), vec!["edge H:a : +1*A -1*B = 0"]);
    }

    #[test]
    fn unbalanced_blocks_are_rejected()  {
        assert!(Report::parse("begin a\n").is_err());
        assert!(Report::parse("end\n").is_err());
    }

    #[test]
    fn surface_block_round_trips_through_text() {
        let set = parse_wang("tileset MONO\ntile T N=a S=a E=a W=a\n").unwrap();
        let cx = build_wang_complex(&set);
        let cert = thurston_norm(&set, &cx, &[rat(1)], &mut Budget::unlimited()).unwrap();
        let block = surface_block(&set, &cert.witness);
        let text = Report::new(vec![block]).to_text();
        let parsed = Report::parse(&text).unwrap();
        let rebuilt = parse_surface_block(&set, parsed.block("surface").unwrap()).unwrap();
        assert_eq!(rebuilt.partner, cert.witness.partner);
        validate_surface(&set, &rebuilt, Some(&[rat(1)])).unwrap();
        let stats = surface_stats(&rebuilt);
        assert_eq!(stats.faces, 1);
    }

    #[test]
    fn periodic_block_round_trips() {
        let set =
            parse_wang("tileset C\ntile A N=1 S=2 E=4 W=3\ntile B N=2 S=1 E=3 W=4\n").unwrap();
        let pt = PeriodicTiling { k: 2, l: 1, s: 1, domain: vec![0, 1] };
        let block = periodic_block(&set, &pt);
        let text = Report::new(vec![block]).to_text();
        let parsed = Report::parse(&text).unwrap();
        let rebuilt =
            parse_periodic_block(&set, parsed.block("periodic_tiling").unwrap()).unwrap();
        assert_eq!((rebuilt.k, rebuilt.l, rebuilt.s), (2, 1, 1));
        assert_eq!(rebuilt.domain, vec![0, 1]);
    }

    #[test]
    fn normtable_block_round_trips() {
        use crate::asymptotic::norm_table;
        let set = parse_wang("tileset MONO\ntile T N=a S=a E=a W=a\n").unwrap();
        let cx = build_wang_complex(&set);
        let table = norm_table(&set, &cx, &[rat(1)], 2, 10_000).unwrap();
        let ids = set.ids();
        let block = normtable_block(&ids, &[rat(1)], &table);
        let text = Report::new(vec![block]).to_text();
        let parsed = Report::parse(&text).unwrap();
        let nt = parse_normtable_block(parsed.block("normtable").unwrap()).unwrap();
        assert_eq!(nt.cycle_line, "cycle T=1");
        assert_eq!(nt.rows, vec![(1, 0, true), (2, 0, true)]);
        assert_eq!(nt.best_upper, Some(Some(rat(0))));
    }

    #[test]
    fn inline_cycles_parse_back() {
        let ids = vec!["A".to_string(), "B".to_string()];
        assert_eq!(parse_cycle_inline("(A=1/2,B=1/2)", &ids).unwrap(), vec![ratio(1, 2); 2]);
        assert_eq!(parse_cycle_inline("(0)", &ids).unwrap(), vec![rat(0), rat(0)]);
        assert_eq!(
            parse_point_list("[(A=1), (A=1/2,B=1/2)]", &ids).unwrap(),
            vec![vec![rat(1), rat(0)], vec![ratio(1, 2), ratio(1, 2)]]
        );
        assert_eq!(parse_point_list("[]", &ids).unwrap(), Vec::<Vec<Rat>>::new());
        assert!(parse_cycle_inline("(C=1)", &ids).is_err());
    }

    #[test]
    fn cone_certificate_block_round_trips() {
        let set = parse_wang("tileset DEAD\ntile T N=a S=b E=c W=c\n").unwrap();
        let cx = build_wang_complex(&set);
        let v = vec![rat(-1), rat(2), ratio(1, 2)];
        let block = cone_certificate_block(&cx, &v);
        let text = Report::new(vec![block]).to_text();
        let parsed = Report::parse(&text).unwrap();
        let rebuilt =
            parse_cone_certificate_block(parsed.block("cone_certificate").unwrap(), 3).unwrap();
        assert_eq!(rebuilt, v);
    }
}
