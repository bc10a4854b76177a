//! Prototile sets and their text formats.
//!
//! Two kinds of input are supported: Wang tile sets (unit squares with
//! colored sides, placed by translation only) and polygon prototile sets
//! (simple polygons with exact rational vertices and one color per boundary
//! edge). Both have a line-oriented text format with `#` comments and a
//! canonical serialization that round-trips byte-identically.

use crate::Rat;
use num_traits::{Signed, Zero};
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Exact planar point.
pub type Point = (Rat, Rat);

/// Side of a unit square. The declaration order `top < bottom < left <
/// right` is the canonical order used everywhere ties must be broken.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Top,
    Bottom,
    Left,
    Right,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Top, Side::Bottom, Side::Left, Side::Right];

    /// Index in canonical order.
    pub fn index(self) -> usize {
        match self {
            Side::Top => 0,
            Side::Bottom => 1,
            Side::Left => 2,
            Side::Right => 3,
        }
    }

    pub fn from_index(i: usize) -> Side {
        Side::ALL[i]
    }

    /// `true` for top/bottom sides (edges that lie on horizontal lines).
    pub fn is_horizontal(self) -> bool {
        matches!(self, Side::Top | Side::Bottom)
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Side::Top => "top",
            Side::Bottom => "bottom",
            Side::Left => "left",
            Side::Right => "right",
        };
        write!(f, "{s}")
    }
}

impl FromStr for Side {
    type Err = ();

    fn from_str(s: &str) -> Result<Side, ()> {
        match s {
            "top" => Ok(Side::Top),
            "bottom" => Ok(Side::Bottom),
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            _ => Err(()),
        }
    }
}

/// A unit square tile with colored sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WangTile {
    pub id: String,
    pub north: String,
    pub south: String,
    pub east: String,
    pub west: String,
}

impl WangTile {
    pub fn color(&self, side: Side) -> &str {
        match side {
            Side::Top => &self.north,
            Side::Bottom => &self.south,
            Side::Left => &self.west,
            Side::Right => &self.east,
        }
    }
}

/// A finite Wang tile set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WangTileSet {
    pub name: String,
    pub tiles: Vec<WangTile>,
}

impl WangTileSet {
    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.tiles.iter().position(|t| t.id == id)
    }

    pub fn ids(&self) -> Vec<String> {
        self.tiles.iter().map(|t| t.id.clone()).collect()
    }

    /// Canonical text form: fixed key order `N S E W`, one tile per line,
    /// tiles in declaration order.
    pub fn canonical_serialize(&self) -> String {
        let mut out = format!("tileset {}\n", self.name);
        for t in &self.tiles {
            out.push_str(&format!(
                "tile {} N={} S={} E={} W={}\n",
                t.id, t.north, t.south, t.east, t.west
            ));
        }
        out
    }
}

/// A simple polygon prototile with exact rational vertices (counterclockwise)
/// and one color per boundary edge; edge `i` runs from vertex `i` to vertex
/// `i+1 (mod n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolygonPrototile {
    pub id: String,
    pub vertices: Vec<Point>,
    pub edge_colors: Vec<String>,
}

impl PolygonPrototile {
    pub fn edge(&self, i: usize) -> (Point, Point) {
        let n = self.vertices.len();
        (self.vertices[i].clone(), self.vertices[(i + 1) % n].clone())
    }

    /// Twice the signed area (positive for counterclockwise order).
    pub fn twice_area(&self) -> Rat {
        let n = self.vertices.len();
        let mut acc = Rat::from_integer(0.into());
        for i in 0..n {
            let (x1, y1) = &self.vertices[i];
            let (x2, y2) = &self.vertices[(i + 1) % n];
            acc += x1.clone() * y2.clone() - x2.clone() * y1.clone();
        }
        acc
    }
}

/// A finite polygon prototile set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolygonPrototileSet {
    pub name: String,
    pub polys: Vec<PolygonPrototile>,
}

impl PolygonPrototileSet {
    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.polys.iter().position(|p| p.id == id)
    }

    pub fn ids(&self) -> Vec<String> {
        self.polys.iter().map(|p| p.id.clone()).collect()
    }

    pub fn canonical_serialize(&self) -> String {
        let mut out = format!("polyset {}\n", self.name);
        for p in &self.polys {
            out.push_str(&format!("poly {}\n", p.id));
            for (x, y) in &p.vertices {
                out.push_str(&format!("vertex {x} {y}\n"));
            }
            for (i, c) in p.edge_colors.iter().enumerate() {
                out.push_str(&format!("edgecolor {i} {c}\n"));
            }
        }
        out
    }
}

/// Either kind of prototile set, as read from a file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrototileSet {
    Wang(WangTileSet),
    Polygon(PolygonPrototileSet),
}

impl PrototileSet {
    pub fn name(&self) -> &str {
        match self {
            PrototileSet::Wang(s) => &s.name,
            PrototileSet::Polygon(s) => &s.name,
        }
    }

    pub fn ids(&self) -> Vec<String> {
        match self {
            PrototileSet::Wang(s) => s.ids(),
            PrototileSet::Polygon(s) => s.ids(),
        }
    }

    pub fn canonical_serialize(&self) -> String {
        match self {
            PrototileSet::Wang(s) => s.canonical_serialize(),
            PrototileSet::Polygon(s) => s.canonical_serialize(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: duplicate id `{id}`")]
    DuplicateId { line: usize, id: String },
    #[error("no prototiles declared")]
    EmptySet,
    #[error("polygon `{id}`: boundary is not a simple closed curve ({msg})")]
    NonSimplePolygon { id: String, msg: String },
    #[error("polygon `{id}`: vertices are ordered clockwise, expected counterclockwise")]
    ClockwisePolygon { id: String },
    #[error("polygon `{id}`: {declared} edge colors declared for {edges} boundary edges")]
    EdgeColorCountMismatch { id: String, declared: usize, edges: usize },
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, msg: msg.into() }
}

/// Significant lines: trimmed, with blank lines and `#` comment lines
/// removed; yields 1-based line numbers.
fn significant_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Parse an exact rational: `p/q` or an integer, with optional sign.
pub fn parse_rat(token: &str) -> Option<Rat> {
    match token.split_once('/') {
        None => {
            let n = crate::Int::from_str(token).ok()?;
            Some(Rat::from_integer(n))
        }
        Some((num, den)) => {
            let n = crate::Int::from_str(num).ok()?;
            let d = crate::Int::from_str(den).ok()?;
            if d == crate::Int::from(0) {
                return None;
            }
            Some(Rat::new(n, d))
        }
    }
}

/// Parse a Wang tile set.
pub fn parse_wang(text: &str) -> Result<WangTileSet, ParseError> {
    let mut lines = significant_lines(text);
    let (ln, header) = lines.next().ok_or(ParseError::EmptySet)?;
    let mut head = header.split_whitespace();
    if head.next() != Some("tileset") {
        return Err(syntax(ln, "expected `tileset <name>`"));
    }
    let name = head.next().ok_or_else(|| syntax(ln, "missing tileset name"))?;
    if head.next().is_some() {
        return Err(syntax(ln, "tileset name must be a single token"));
    }
    let mut tiles: Vec<WangTile> = Vec::new();
    let mut seen = BTreeSet::new();
    for (ln, line) in lines {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.first() != Some(&"tile") {
            return Err(syntax(ln, format!("expected `tile`, found `{}`", tokens[0])));
        }
        if tokens.len() != 6 {
            return Err(syntax(ln, "expected `tile <id> N=<c> S=<c> E=<c> W=<c>`"));
        }
        let id = tokens[1].to_string();
        if !seen.insert(id.clone()) {
            return Err(ParseError::DuplicateId { line: ln, id });
        }
        let mut north = None;
        let mut south = None;
        let mut east = None;
        let mut west = None;
        for tok in &tokens[2..] {
            let (key, value) = tok
                .split_once('=')
                .ok_or_else(|| syntax(ln, format!("expected `<side>=<color>`, found `{tok}`")))?;
            if value.is_empty() {
                return Err(syntax(ln, format!("empty color for side `{key}`")));
            }
            let slot = match key {
                "N" => &mut north,
                "S" => &mut south,
                "E" => &mut east,
                "W" => &mut west,
                _ => return Err(syntax(ln, format!("unknown side `{key}`"))),
            };
            if slot.replace(value.to_string()).is_some() {
                return Err(syntax(ln, format!("side `{key}` given twice")));
            }
        }
        let missing = |side: &str| syntax(ln, format!("missing side `{side}`"));
        tiles.push(WangTile {
            id,
            north: north.ok_or_else(|| missing("N"))?,
            south: south.ok_or_else(|| missing("S"))?,
            east: east.ok_or_else(|| missing("E"))?,
            west: west.ok_or_else(|| missing("W"))?,
        });
    }
    if tiles.is_empty() {
        return Err(ParseError::EmptySet);
    }
    Ok(WangTileSet { name: name.to_string(), tiles })
}

/// Parse a polygon prototile set and validate every polygon.
pub fn parse_polygons(text: &str) -> Result<PolygonPrototileSet, ParseError> {
    let mut lines = significant_lines(text);
    let (ln, header) = lines.next().ok_or(ParseError::EmptySet)?;
    let mut head = header.split_whitespace();
    if head.next() != Some("polyset") {
        return Err(syntax(ln, "expected `polyset <name>`"));
    }
    let name = head.next().ok_or_else(|| syntax(ln, "missing polyset name"))?;
    if head.next().is_some() {
        return Err(syntax(ln, "polyset name must be a single token"));
    }

    struct Pending {
        id: String,
        vertices: Vec<Point>,
        colors: Vec<(usize, String, usize)>, // (edge index, color, line)
    }

    fn finalize(p: Pending) -> Result<PolygonPrototile, ParseError> {
        let n = p.vertices.len();
        if p.colors.len() != n {
            return Err(ParseError::EdgeColorCountMismatch {
                id: p.id,
                declared: p.colors.len(),
                edges: n,
            });
        }
        let mut colors: Vec<Option<String>> = vec![None; n];
        for (i, c, ln) in p.colors {
            if i >= n {
                return Err(syntax(ln, format!("edge index {i} out of range for {n} edges")));
            }
            if colors[i].replace(c).is_some() {
                return Err(syntax(ln, format!("edge {i} colored twice")));
            }
        }
        let poly = PolygonPrototile {
            id: p.id,
            vertices: p.vertices,
            edge_colors: colors.into_iter().map(|c| c.unwrap()).collect(),
        };
        validate_polygon(&poly)?;
        Ok(poly)
    }

    let mut polys: Vec<PolygonPrototile> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut pending: Option<Pending> = None;
    for (ln, line) in lines {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens[0] {
            "poly" => {
                if let Some(p) = pending.take() {
                    polys.push(finalize(p)?);
                }
                if tokens.len() != 2 {
                    return Err(syntax(ln, "expected `poly <id>`"));
                }
                let id = tokens[1].to_string();
                if !seen.insert(id.clone()) {
                    return Err(ParseError::DuplicateId { line: ln, id });
                }
                pending = Some(Pending { id, vertices: Vec::new(), colors: Vec::new() });
            }
            "vertex" => {
                let p = pending
                    .as_mut()
                    .ok_or_else(|| syntax(ln, "`vertex` before any `poly`"))?;
                if tokens.len() != 3 {
                    return Err(syntax(ln, "expected `vertex <x> <y>`"));
                }
                let x = parse_rat(tokens[1])
                    .ok_or_else(|| syntax(ln, format!("bad rational `{}`", tokens[1])))?;
                let y = parse_rat(tokens[2])
                    .ok_or_else(|| syntax(ln, format!("bad rational `{}`", tokens[2])))?;
                p.vertices.push((x, y));
            }
            "edgecolor" => {
                let p = pending
                    .as_mut()
                    .ok_or_else(|| syntax(ln, "`edgecolor` before any `poly`"))?;
                if tokens.len() != 3 {
                    return Err(syntax(ln, "expected `edgecolor <index> <color>`"));
                }
                let i: usize = tokens[1]
                    .parse()
                    .map_err(|_| syntax(ln, format!("bad edge index `{}`", tokens[1])))?;
                p.colors.push((i, tokens[2].to_string(), ln));
            }
            other => return Err(syntax(ln, format!("unknown directive `{other}`"))),
        }
    }
    if let Some(p) = pending.take() {
        polys.push(finalize(p)?);
    }
    if polys.is_empty() {
        return Err(ParseError::EmptySet);
    }
    Ok(PolygonPrototileSet { name: name.to_string(), polys })
}

/// Parse either kind of set, dispatching on the header keyword.
pub fn parse_prototiles(text: &str) -> Result<PrototileSet, ParseError> {
    let Some((ln, header)) = significant_lines(text).next() else {
        return Err(ParseError::EmptySet);
    };
    match header.split_whitespace().next() {
        Some("tileset") => Ok(PrototileSet::Wang(parse_wang(text)?)),
        Some("polyset") => Ok(PrototileSet::Polygon(parse_polygons(text)?)),
        _ => Err(syntax(ln, "expected `tileset <name>` or `polyset <name>`")),
    }
}

/// Parse a 2-chain given as `cycle <id>=<rational> ...`; omitted prototiles
/// get coefficient 0. `ids` fixes the coordinate order.
pub fn parse_cycle(text: &str, ids: &[String]) -> Result<Vec<Rat>, ParseError> {
    let mut lines = significant_lines(text);
    let (ln, line) = lines.next().ok_or_else(|| syntax(0, "empty cycle"))?;
    if let Some((extra_ln, _)) = lines.next() {
        return Err(syntax(extra_ln, "expected a single `cycle` line"));
    }
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens[0] != "cycle" {
        return Err(syntax(ln, "expected `cycle <id>=<rational> ...`"));
    }
    let mut coords = vec![Rat::from_integer(0.into()); ids.len()];
    let mut seen = BTreeSet::new();
    for tok in &tokens[1..] {
        let (id, value) = tok
            .rsplit_once('=')
            .ok_or_else(|| syntax(ln, format!("expected `<id>=<rational>`, found `{tok}`")))?;
        let idx = ids
            .iter()
            .position(|i| i == id)
            .ok_or_else(|| syntax(ln, format!("unknown prototile id `{id}`")))?;
        if !seen.insert(idx) {
            return Err(syntax(ln, format!("prototile `{id}` given twice")));
        }
        coords[idx] =
            parse_rat(value).ok_or_else(|| syntax(ln, format!("bad rational `{value}`")))?;
    }
    Ok(coords)
}

/// Render a chain as a `cycle` line (zero coordinates omitted).
pub fn format_cycle_line(ids: &[String], coords: &[Rat]) -> String {
    let mut out = String::from("cycle");
    for (id, v) in ids.iter().zip(coords) {
        if !v.is_zero() {
            out.push_str(&format!(" {id}={v}"));
        }
    }
    out
}

/// Render a chain inline as `(id=v,id=v)`; the zero chain renders as `(0)`.
pub fn format_cycle_inline(ids: &[String], coords: &[Rat]) -> String {
    let terms: Vec<String> = ids
        .iter()
        .zip(coords)
        .filter(|(_, v)| !v.is_zero())
        .map(|(id, v)| format!("{id}={v}"))
        .collect();
    if terms.is_empty() {
        "(0)".to_string()
    } else {
        format!("({})", terms.join(","))
    }
}

// ---------------------------------------------------------------------------
// Exact planar geometry helpers shared with the reduction pipeline.

/// Cross product `(a - o) × (b - o)`.
pub(crate) fn cross(o: &Point, a: &Point, b: &Point) -> Rat {
    (a.0.clone() - o.0.clone()) * (b.1.clone() - o.1.clone())
        - (a.1.clone() - o.1.clone()) * (b.0.clone() - o.0.clone())
}

/// Sign of the cross product: 1 left turn, -1 right turn, 0 collinear.
pub(crate) fn orient(o: &Point, a: &Point, b: &Point) -> i8 {
    let c = cross(o, a, b);
    if c.is_zero() {
        0
    } else if c.is_positive() {
        1
    } else {
        -1
    }
}

/// `p` lies on the closed segment `[a, b]`.
pub(crate) fn on_segment(p: &Point, a: &Point, b: &Point) -> bool {
    if orient(a, b, p) != 0 {
        return false;
    }
    let in_range = |v: &Rat, lo: &Rat, hi: &Rat| {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        lo <= v && v <= hi
    };
    in_range(&p.0, &a.0, &b.0) && in_range(&p.1, &a.1, &b.1)
}

/// The closed segments `[a, b]` and `[c, d]` share at least one point.
pub(crate) fn segments_share_point(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0 {
        return true;
    }
    (o1 == 0 && on_segment(c, a, b))
        || (o2 == 0 && on_segment(d, a, b))
        || (o3 == 0 && on_segment(a, c, d))
        || (o4 == 0 && on_segment(b, c, d))
}

/// Validate a polygon: at least 3 vertices, simple closed counterclockwise
/// boundary, no zero-length or folded-back edges.
pub(crate) fn validate_polygon(poly: &PolygonPrototile) -> Result<(), ParseError> {
    let n = poly.vertices.len();
    let id = poly.id.clone();
    let nonsimple = |msg: &str| ParseError::NonSimplePolygon { id: id.clone(), msg: msg.into() };
    if n < 3 {
        return Err(nonsimple("fewer than 3 vertices"));
    }
    for i in 0..n {
        let (a, b) = poly.edge(i);
        if a == b {
            return Err(nonsimple("zero-length edge"));
        }
    }
    for i in 0..n {
        let (a, b) = poly.edge(i);
        for j in i + 1..n {
            let (c, d) = poly.edge(j);
            let adjacent_next = j == i + 1;
            let adjacent_wrap = i == 0 && j == n - 1;
            if adjacent_next {
                // Edges share vertex b == c; any further containment means
                // the boundary folds back onto itself.
                if on_segment(&d, &a, &b) || on_segment(&a, &c, &d) {
                    return Err(nonsimple("adjacent edges overlap"));
                }
            } else if adjacent_wrap {
                // Edges share vertex a == d.
                if on_segment(&c, &a, &b) || on_segment(&b, &c, &d) {
                    return Err(nonsimple("adjacent edges overlap"));
                }
            } else if segments_share_point(&a, &b, &c, &d) {
                return Err(nonsimple("non-adjacent edges intersect"));
            }
        }
    }
    let area2 = poly.twice_area();
    if area2.is_zero() {
        return Err(nonsimple("zero area"));
    }
    if area2.is_negative() {
        return Err(ParseError::ClockwisePolygon { id });
    }
    Ok(())
}
