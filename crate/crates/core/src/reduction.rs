//! Reductions between prototile kinds.
//!
//! Four steps compose into the square-encoding pipeline:
//!
//! 1. [`forget_colors`] replaces every edge color with one fresh color,
//!    keeping only the geometry of the matching relation.
//! 2. [`scale_to_integral`] clears denominators of a rational polygon set.
//! 3. [`zigzag`] replaces each edge of a convex integral polygon with its
//!    canonical unit staircase, producing polyominoes built from unit cells.
//! 4. [`encode_as_wang`] turns those cells into Wang tiles: interior seams
//!    get per-position colors unique to their polygon, boundary unit edges
//!    get colors derived from the original edge color and the position
//!    along that edge, so square tilings correspond to polygon tilings.
//!
//! [`squareify`] runs 2–4 in order.

use crate::tileset::{
    PolygonPrototile, PolygonPrototileSet, PrototileSet, WangTile, WangTileSet,
};
use crate::{Int, Rat};
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ReductionError {
    #[error("polygon `{id}` is not convex")]
    NonConvexInput { id: String },
    #[error("polygon `{id}` degenerates after staircasing: {msg}")]
    DegenerateAfterZigzag { id: String, msg: String },
    #[error("polygon set has non-integer vertices; scale it to integral coordinates first")]
    NotIntegral,
    #[error("coordinates too large for staircasing")]
    Overflow,
}

/// Replace every color in the set by a single fresh color that does not
/// collide with any existing one. Returns the renamed set and the color.
pub fn forget_colors(set: &PrototileSet) -> (PrototileSet, String) {
    let mut existing: BTreeSet<String> = BTreeSet::new();
    match set {
        PrototileSet::Wang(w) => {
            for t in &w.tiles {
                existing.extend(
                    [&t.north, &t.south, &t.east, &t.west].into_iter().cloned(),
                );
            }
        }
        PrototileSet::Polygon(p) => {
            for poly in &p.polys {
                existing.extend(poly.edge_colors.iter().cloned());
            }
        }
    }
    let fresh = fresh_color(&existing);
    let renamed = match set {
        PrototileSet::Wang(w) => PrototileSet::Wang(WangTileSet {
            name: w.name.clone(),
            tiles: w
                .tiles
                .iter()
                .map(|t| WangTile {
                    id: t.id.clone(),
                    north: fresh.clone(),
                    south: fresh.clone(),
                    east: fresh.clone(),
                    west: fresh.clone(),
                })
                .collect(),
        }),
        PrototileSet::Polygon(p) => PrototileSet::Polygon(PolygonPrototileSet {
            name: p.name.clone(),
            polys: p
                .polys
                .iter()
                .map(|poly| PolygonPrototile {
                    id: poly.id.clone(),
                    vertices: poly.vertices.clone(),
                    edge_colors: vec![fresh.clone(); poly.edge_colors.len()],
                })
                .collect(),
        }),
    };
    (renamed, fresh)
}

fn fresh_color(existing: &BTreeSet<String>) -> String {
    if !existing.contains("blank") {
        return "blank".to_string();
    }
    for i in 0.. {
        let candidate = format!("blank{i}");
        if !existing.contains(&candidate) {
            return candidate;
        }
    }
    unreachable!()
}

/// Multiply all vertex coordinates by the least common multiple of their
/// denominators. Returns the scaled set and the factor used.
pub fn scale_to_integral(set: &PolygonPrototileSet) -> (PolygonPrototileSet, Int) {
    let mut scale = Int::one();
    for poly in &set.polys {
        for (x, y) in &poly.vertices {
            scale = scale.lcm(x.denom());
            scale = scale.lcm(y.denom());
        }
    }
    let factor = Rat::from_integer(scale.clone());
    let scaled = PolygonPrototileSet {
        name: set.name.clone(),
        polys: set
            .polys
            .iter()
            .map(|poly| PolygonPrototile {
                id: poly.id.clone(),
                vertices: poly
                    .vertices
                    .iter()
                    .map(|(x, y)| (x * &factor, y * &factor))
                    .collect(),
                edge_colors: poly.edge_colors.clone(),
            })
            .collect(),
    };
    (scaled, scale)
}

/// A convex integral polygon after staircasing: a closed counterclockwise
/// polyline of unit steps together with the unit cells it encloses.
#[derive(Clone, Debug)]
pub struct ZigzagPolygon {
    pub id: String,
    /// Closed unit-step boundary, counterclockwise; `vertices[j]` to
    /// `vertices[j + 1]` (wrapping) is unit edge `j`.
    pub vertices: Vec<(i64, i64)>,
    /// Per unit edge: the original edge index and the step offset along
    /// that edge counted from its start vertex in traversal order.
    pub provenance: Vec<(usize, usize)>,
    /// Enclosed unit cells by lower-left corner, sorted by `(x, y)`.
    pub cells: Vec<(i64, i64)>,
}

/// Result of staircasing a whole set; `polys` is aligned index-by-index
/// with `original.polys`.
#[derive(Clone, Debug)]
pub struct ZigzagSet {
    pub original: PolygonPrototileSet,
    pub polys: Vec<ZigzagPolygon>,
}

impl ZigzagPolygon {
    /// Unit-edge polygon with each unit edge inheriting its parent color.
    pub fn to_prototile(&self, original: &PolygonPrototile) -> PolygonPrototile {
        PolygonPrototile {
            id: self.id.clone(),
            vertices: self
                .vertices
                .iter()
                .map(|&(x, y)| (Rat::from_integer(Int::from(x)), Rat::from_integer(Int::from(y))))
                .collect(),
            edge_colors: self
                .provenance
                .iter()
                .map(|&(e, _)| original.edge_colors[e].clone())
                .collect(),
        }
    }
}

fn integral_vertex(p: &(Rat, Rat)) -> Option<(i64, i64)> {
    if !p.0.denom().is_one() || !p.1.denom().is_one() {
        return None;
    }
    Some((p.0.numer().to_i64()?, p.1.numer().to_i64()?))
}

/// Canonical unit staircase from `a` to `b`, including both endpoints.
///
/// The staircase depends only on the unordered endpoint pair (it is
/// computed on the lexicographically smaller endpoint first and reversed
/// as needed), so the two sides of a shared edge staircase identically.
/// It is the monotone lattice path that stays weakly on the clockwise
/// side of the segment and hugs it as closely as possible; the segment
/// `(0,0)–(2,1)` becomes right, right, up.
fn staircase(a: (i64, i64), b: (i64, i64)) -> Result<Vec<(i64, i64)>, ReductionError> {
    let forward = a <= b;
    let (s, t) = if forward { (a, b) } else { (b, a) };
    let dx = t.0 - s.0;
    let dy = t.1 - s.1;
    let sy = if dy >= 0 { 1 } else { -1 };
    let steps = dx.checked_add(dy.abs()).ok_or(ReductionError::Overflow)?;
    let mut points = Vec::with_capacity(steps as usize + 1);
    let mut p = s;
    points.push(p);
    // cross(d, q - s) <= 0 keeps the path weakly on one side; among the
    // admissible steps the larger cross value hugs the segment closer.
    let cross = |q: (i64, i64)| dx * (q.1 - s.1) - dy * (q.0 - s.0);
    while p != t {
        let mut best: Option<((i64, i64), i64)> = None;
        for q in [(p.0 + 1, p.1), (p.0, p.1 + sy)] {
            if q.0 > t.0 || (sy > 0 && q.1 > t.1) || (sy < 0 && q.1 < t.1) {
                continue;
            }
            let c = cross(q);
            if c <= 0 && best.as_ref().map_or(true, |&(_, bc)| c > bc) {
                best = Some((q, c));
            }
        }
        let (q, _) = best.expect("staircase step always exists");
        points.push(q);
        p = q;
    }
    if !forward {
        points.reverse();
    }
    Ok(points)
}

fn is_convex(vertices: &[(i64, i64)]) -> bool {
    let n = vertices.len();
    (0..n).all(|i| {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        let c = vertices[(i + 2) % n];
        let u = (b.0 - a.0, b.1 - a.1);
        let v = (c.0 - b.0, c.1 - b.1);
        u.0 * v.1 - u.1 * v.0 >= 0
    })
}

fn zigzag_polygon(poly: &PolygonPrototile) -> Result<ZigzagPolygon, ReductionError> {
    let vertices: Vec<(i64, i64)> = poly
        .vertices
        .iter()
        .map(|p| integral_vertex(p).ok_or(ReductionError::NotIntegral))
        .collect::<Result<_, _>>()?;
    if !is_convex(&vertices) {
        return Err(ReductionError::NonConvexInput { id: poly.id.clone() });
    }
    let n = vertices.len();
    let mut polyline = Vec::new();
    let mut provenance = Vec::new();
    for e in 0..n {
        let a = vertices[e];
        let b = vertices[(e + 1) % n];
        let steps = staircase(a, b)?;
        for (offset, p) in steps[..steps.len() - 1].iter().enumerate() {
            polyline.push(*p);
            provenance.push((e, offset));
        }
    }
    let distinct: BTreeSet<(i64, i64)> = polyline.iter().copied().collect();
    if distinct.len() != polyline.len() {
        return Err(ReductionError::DegenerateAfterZigzag {
            id: poly.id.clone(),
            msg: "boundary touches itself".to_string(),
        });
    }
    let cells = enclosed_cells(&polyline).ok_or_else(|| ReductionError::DegenerateAfterZigzag {
        id: poly.id.clone(),
        msg: "boundary does not enclose unit cells".to_string(),
    })?;
    if cells.is_empty() {
        return Err(ReductionError::DegenerateAfterZigzag {
            id: poly.id.clone(),
            msg: "no interior cells remain".to_string(),
        });
    }
    if !cells_connected(&cells) {
        return Err(ReductionError::DegenerateAfterZigzag {
            id: poly.id.clone(),
            msg: "interior cells are not edge-connected".to_string(),
        });
    }
    Ok(ZigzagPolygon { id: poly.id.clone(), vertices: polyline, provenance, cells })
}

/// Unit cells strictly inside a closed unit-step polyline, by scanline
/// over its vertical unit edges. `None` when a row has an odd crossing
/// count (boundary is not a simple closed curve).
fn enclosed_cells(polyline: &[(i64, i64)]) -> Option<Vec<(i64, i64)>> {
    let n = polyline.len();
    let mut rows: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
    for j in 0..n {
        let p = polyline[j];
        let q = polyline[(j + 1) % n];
        if p.0 == q.0 {
            rows.entry(p.1.min(q.1)).or_default().push(p.0);
        }
    }
    let mut cells = Vec::new();
    for (y, mut xs) in rows {
        xs.sort_unstable();
        if xs.len() % 2 != 0 {
            return None;
        }
        for pair in xs.chunks(2) {
            for x in pair[0]..pair[1] {
                cells.push((x, y));
            }
        }
    }
    cells.sort_unstable();
    Some(cells)
}

fn cells_connected(cells: &[(i64, i64)]) -> bool {
    if cells.is_empty() {
        return false;
    }
    let index: BTreeMap<(i64, i64), usize> =
        cells.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut seen = vec![false; cells.len()];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(i) = stack.pop() {
        let (x, y) = cells[i];
        for d in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            if let Some(&j) = index.get(&(x + d.0, y + d.1)) {
                if !seen[j] {
                    seen[j] = true;
                    count += 1;
                    stack.push(j);
                }
            }
        }
    }
    count == cells.len()
}

/// Staircase every polygon of an integral convex set.
pub fn zigzag(set: &PolygonPrototileSet) -> Result<ZigzagSet, ReductionError> {
    let polys = set.polys.iter().map(zigzag_polygon).collect::<Result<_, _>>()?;
    Ok(ZigzagSet { original: set.clone(), polys })
}

/// Where each piece of the encoded Wang tile set came from.
#[derive(Clone, Debug)]
pub struct EncodingMap {
    /// `(wang tile id, polygon id, cell)` in tile order.
    pub tiles: Vec<(String, String, (i64, i64))>,
    /// Each encoded color and its provenance, sorted by color token.
    pub colors: Vec<(String, ColorProvenance)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColorProvenance {
    /// Interior seam between two cells of one polygon; `x`, `y` name the
    /// lattice point at the lower-left end of the shared unit segment.
    Seam { poly: String, x: i64, y: i64, horizontal: bool },
    /// Unit piece `index` of an original edge of color `color`, counted
    /// from the lexicographically smaller endpoint of that edge.
    Boundary { color: String, index: usize },
}

fn lower_left(p: (i64, i64), q: (i64, i64)) -> (i64, i64) {
    (p.0.min(q.0), p.1.min(q.1))
}

/// Encode staircased polygons as Wang tiles, one tile per unit cell.
pub fn encode_as_wang(z: &ZigzagSet) -> (WangTileSet, EncodingMap) {
    let mut tiles = Vec::new();
    let mut map_tiles = Vec::new();
    let mut colors: BTreeMap<String, ColorProvenance> = BTreeMap::new();
    for (zp, orig) in z.polys.iter().zip(&z.original.polys) {
        // Boundary unit segments by (horizontal?, lower-left corner).
        let mut boundary: BTreeMap<(bool, i64, i64), (usize, usize)> = BTreeMap::new();
        let n = zp.vertices.len();
        for j in 0..n {
            let p = zp.vertices[j];
            let q = zp.vertices[(j + 1) % n];
            let ll = lower_left(p, q);
            boundary.insert((p.1 == q.1, ll.0, ll.1), zp.provenance[j]);
        }
        let cell_set: BTreeSet<(i64, i64)> = zp.cells.iter().copied().collect();
        let side_color = |horizontal: bool,
                              ll: (i64, i64),
                              neighbor: (i64, i64),
                              colors: &mut BTreeMap<String, ColorProvenance>|
         -> String {
            if cell_set.contains(&neighbor) {
                let token = format!(
                    "seam:{}:{}:{}:{}",
                    ll.0,
                    ll.1,
                    if horizontal { "h" } else { "v" },
                    zp.id
                );
                colors.insert(
                    token.clone(),
                    ColorProvenance::Seam {
                        poly: zp.id.clone(),
                        x: ll.0,
                        y: ll.1,
                        horizontal,
                    },
                );
                token
            } else {
                let (e, offset) = boundary[&(horizontal, ll.0, ll.1)];
                let a = integral_vertex(&orig.vertices[e]).expect("integral input");
                let b = integral_vertex(&orig.vertices[(e + 1) % orig.vertices.len()])
                    .expect("integral input");
                let len = ((b.0 - a.0).abs() + (b.1 - a.1).abs()) as usize;
                let index = if a <= b { offset } else { len - 1 - offset };
                let color = &orig.edge_colors[e];
                let token = format!("sub:{index}:{color}");
                colors.insert(
                    token.clone(),
                    ColorProvenance::Boundary { color: color.clone(), index },
                );
                token
            }
        };
        for &(x, y) in &zp.cells {
            let north = side_color(true, (x, y + 1), (x, y + 1), &mut colors);
            let south = side_color(true, (x, y), (x, y - 1), &mut colors);
            let east = side_color(false, (x + 1, y), (x + 1, y), &mut colors);
            let west = side_color(false, (x, y), (x - 1, y), &mut colors);
            let id = format!("{}:{}:{}", zp.id, x, y);
            map_tiles.push((id.clone(), zp.id.clone(), (x, y)));
            tiles.push(WangTile { id, north, south, east, west });
        }
    }
    let set = WangTileSet { name: z.original.name.clone(), tiles };
    let map = EncodingMap { tiles: map_tiles, colors: colors.into_iter().collect() };
    (set, map)
}

/// Full pipeline: scale to integral, staircase, encode as Wang tiles.
#[derive(Clone, Debug)]
pub struct Squareified {
    pub scale: Int,
    pub zigzag: ZigzagSet,
    pub tiles: WangTileSet,
    pub map: EncodingMap,
}

pub fn squareify(set: &PolygonPrototileSet) -> Result<Squareified, ReductionError> {
    let (scaled, scale) = scale_to_integral(set);
    let z = zigzag(&scaled)?;
    let (tiles, map) = encode_as_wang(&z);
    Ok(Squareified { scale, zigzag: z, tiles, map })
}

/// Quick validity check used by tests: every vertex coordinate parses back
/// as an integer.
pub fn is_integral_set(set: &PolygonPrototileSet) -> bool {
    set.polys
        .iter()
        .all(|p| p.vertices.iter().all(|v| integral_vertex(v).is_some()))
}
