//! The gluing 2-complex of a prototile set and its space of 2-cycles.
//!
//! The complex has one oriented 2-cell per prototile and one 1-cell per edge
//! class. For Wang tiles an edge class is an (axis, color) pair; for polygon
//! prototiles it is a (color, translate class) pair, the translate class
//! being the edge vector up to sign. The boundary matrix has integer entries,
//! rows indexed by 1-cells and columns by 2-cells; a 2-chain is a cycle when
//! the matrix kills it, which is exactly the statement that every edge class
//! is laid down as often from one side as from the other ("switching rules").

use crate::budget::Budget;
use crate::linalg::{self, Feasibility, Mat};
use crate::tileset::{PolygonPrototileSet, PrototileSet, Side, WangTileSet};
use crate::{Int, Rat};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Axis of a Wang edge class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    Horizontal,
    Vertical,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::Horizontal => write!(f, "H"),
            Axis::Vertical => write!(f, "V"),
        }
    }
}

impl Side {
    pub fn axis(self) -> Axis {
        if self.is_horizontal() {
            Axis::Horizontal
        } else {
            Axis::Vertical
        }
    }

    /// Traversal sign of this side along the counterclockwise boundary of a
    /// unit square, measured against the positive axis direction: the bottom
    /// and right sides are traversed positively, the top and left sides
    /// negatively.
    pub fn ccw_sign(self) -> i64 {
        match self {
            Side::Bottom | Side::Right => 1,
            Side::Top | Side::Left => -1,
        }
    }
}

/// A 1-cell of the complex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Cell1 {
    /// Wang edge class: all unit edges of one color on one axis.
    Wang { axis: Axis, color: String },
    /// Polygon edge class: all edges of one color in one translate class.
    /// `dir` is the edge vector oriented to be lexicographically positive.
    Poly { color: String, dir: (Rat, Rat) },
}

impl fmt::Display for Cell1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell1::Wang { axis, color } => write!(f, "{axis}:{color}"),
            Cell1::Poly { color, dir } => write!(f, "{color}@({},{})", dir.0, dir.1),
        }
    }
}

/// The 2-complex of a prototile set.
#[derive(Clone, Debug)]
pub struct ApComplex {
    /// Prototile ids in declaration order (the 2-cells).
    pub tile_ids: Vec<String>,
    /// 1-cells in first-appearance order: tiles in order, sides/edges of a
    /// tile in canonical order.
    pub cells1: Vec<Cell1>,
    /// Boundary matrix with integer entries; rows = 1-cells, columns =
    /// 2-cells.
    pub boundary: Mat<Rat>,
    /// Maximum number of boundary edges of a single prototile (4 for Wang
    /// sets); the Lipschitz slope of the asymptotic seminorm.
    pub max_sides: usize,
}

impl ApComplex {
    pub fn n_tiles(&self) -> usize {
        self.tile_ids.len()
    }

    pub fn n_edges(&self) -> usize {
        self.cells1.len()
    }

    pub fn index_of_tile(&self, id: &str) -> Option<usize> {
        self.tile_ids.iter().position(|t| t == id)
    }

    /// Boundary of a 2-chain.
    pub fn boundary_of(&self, chain: &[Rat]) -> Result<Vec<Rat>, HomologyError> {
        self.check_dim(chain)?;
        Ok(self.boundary.mul_vec(chain))
    }

    /// `true` when the chain satisfies every switching rule.
    pub fn is_cycle(&self, chain: &[Rat]) -> Result<bool, HomologyError> {
        Ok(self.boundary_of(chain)?.iter().all(|v| v.is_zero()))
    }

    pub fn check_dim(&self, chain: &[Rat]) -> Result<(), HomologyError> {
        if chain.len() != self.n_tiles() {
            return Err(HomologyError::DimensionMismatch {
                got: chain.len(),
                expected: self.n_tiles(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HomologyError {
    #[error("chain has {got} coordinates, expected {expected}")]
    DimensionMismatch { got: usize, expected: usize },
}

fn intern_cell(
    cells1: &mut Vec<Cell1>,
    index: &mut BTreeMap<Cell1, usize>,
    cell: Cell1,
) -> usize {
    if let Some(&i) = index.get(&cell) {
        return i;
    }
    let i = cells1.len();
    index.insert(cell.clone(), i);
    cells1.push(cell);
    i
}

/// Build the complex of a Wang tile set.
pub fn build_wang_complex(set: &WangTileSet) -> ApComplex {
    let mut cells1 = Vec::new();
    let mut index = BTreeMap::new();
    let mut entries: Vec<BTreeMap<usize, i64>> = Vec::new();
    for tile in &set.tiles {
        let mut col = BTreeMap::new();
        for side in Side::ALL {
            let cell = Cell1::Wang {
                axis: side.axis(),
                color: tile.color(side).to_string(),
            };
            let row = intern_cell(&mut cells1, &mut index, cell);
            *col.entry(row).or_insert(0) += side.ccw_sign();
        }
        entries.push(col);
    }
    finish_complex(set.ids(), cells1, entries, 4)
}

/// Build the complex of a polygon prototile set.
pub fn build_polygon_complex(set: &PolygonPrototileSet) -> ApComplex {
    let mut cells1 = Vec::new();
    let mut index = BTreeMap::new();
    let mut entries: Vec<BTreeMap<usize, i64>> = Vec::new();
    let mut max_sides = 0;
    for poly in &set.polys {
        max_sides = max_sides.max(poly.vertices.len());
        let mut col = BTreeMap::new();
        for (i, color) in poly.edge_colors.iter().enumerate() {
            let (a, b) = poly.edge(i);
            let v = (b.0.clone() - a.0.clone(), b.1.clone() - a.1.clone());
            // Orient the translate class representative lexicographically.
            let flip = v.0.is_negative() || (v.0.is_zero() && v.1.is_negative());
            let (dir, sign) = if flip { ((-v.0, -v.1), -1) } else { (v, 1) };
            let cell = Cell1::Poly { color: color.clone(), dir };
            let row = intern_cell(&mut cells1, &mut index, cell);
            *col.entry(row).or_insert(0) += sign;
        }
        entries.push(col);
    }
    finish_complex(set.ids(), cells1, entries, max_sides)
}

/// Build the complex of either kind of set.
pub fn build_complex(set: &PrototileSet) -> ApComplex {
    match set {
        PrototileSet::Wang(s) => build_wang_complex(s),
        PrototileSet::Polygon(s) => build_polygon_complex(s),
    }
}

fn finish_complex(
    tile_ids: Vec<String>,
    cells1: Vec<Cell1>,
    entries: Vec<BTreeMap<usize, i64>>,
    max_sides: usize,
) -> ApComplex {
    let mut boundary = Mat::zeros(cells1.len(), tile_ids.len());
    for (j, col) in entries.iter().enumerate() {
        for (&row, &v) in col {
            boundary.set(row, j, Rat::from_integer(Int::from(v)));
        }
    }
    ApComplex { tile_ids, cells1, boundary, max_sides }
}

/// The switching rule attached to one 1-cell: signed tile multiplicities
/// that must cancel in any cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwitchingRule {
    pub cell: usize,
    /// Nonzero (coefficient, tile index) terms, in tile order.
    pub terms: Vec<(i64, usize)>,
}

/// One rule per 1-cell, in 1-cell order.
pub fn switching_rules(cx: &ApComplex) -> Vec<SwitchingRule> {
    (0..cx.n_edges())
        .map(|r| {
            let terms = (0..cx.n_tiles())
                .filter_map(|j| {
                    let v = cx.boundary.at(r, j);
                    if v.is_zero() {
                        None
                    } else {
                        Some((rat_to_i64(v), j))
                    }
                })
                .collect();
            SwitchingRule { cell: r, terms }
        })
        .collect()
}

fn rat_to_i64(v: &Rat) -> i64 {
    debug_assert!(v.denom().is_one());
    let s: String = v.numer().to_string();
    s.parse().expect("boundary coefficient fits in i64")
}

/// Render a rule as `edge <cell> : <±k>*<tile> ... = 0`.
pub fn format_switching_rule(cx: &ApComplex, rule: &SwitchingRule) -> String {
    let mut terms = String::new();
    for (coeff, tile) in &rule.terms {
        if !terms.is_empty() {
            terms.push(' ');
        }
        terms.push_str(&format!("{coeff:+}*{}", cx.tile_ids[*tile]));
    }
    if terms.is_empty() {
        terms.push('0');
    }
    format!("edge {} : {} = 0", cx.cells1[rule.cell], terms)
}

/// Basis of the cycle space (kernel of the boundary matrix), one vector per
/// free column of the reduced boundary.
pub fn cycle_space(cx: &ApComplex) -> Vec<Vec<Rat>> {
    linalg::kernel_basis(&cx.boundary)
}

/// Emptiness status of the cone of nonzero non-negative cycles.
#[derive(Clone, Debug)]
pub enum ConeEmptiness {
    /// A non-negative cycle with coordinate sum 1.
    NonEmpty(Vec<Rat>),
    /// A functional `v` over the 1-cells with `vᵀ∂ >= 1` componentwise: any
    /// non-negative cycle `c` then satisfies `0 = vᵀ(∂c) >= Σc`, forcing
    /// `c = 0`.
    Empty(Vec<Rat>),
}

/// Decide, exactly, whether a nonzero non-negative cycle exists.
pub fn nonneg_cycle_exists(cx: &ApComplex) -> ConeEmptiness {
    let m = cx.n_edges();
    let n = cx.n_tiles();
    let mut a = Mat::zeros(m + 1, n);
    for r in 0..m {
        for c in 0..n {
            a.set(r, c, cx.boundary.at(r, c).clone());
        }
    }
    for c in 0..n {
        a.set(m, c, Rat::one());
    }
    let mut b = vec![Rat::zero(); m + 1];
    b[m] = Rat::one();
    match linalg::lp_feasible(&a, &b) {
        Feasibility::Feasible(x) => ConeEmptiness::NonEmpty(x),
        Feasibility::Infeasible(y) => {
            let mu = y[m].clone();
            assert!(mu.is_positive(), "Farkas certificate must weight the sum row");
            let v: Vec<Rat> = y[..m].iter().map(|yi| -yi.clone() / mu.clone()).collect();
            assert!(is_cone_emptiness_certificate(cx, &v));
            ConeEmptiness::Empty(v)
        }
    }
}

/// Check an emptiness certificate: `vᵀ∂ >= 1` in every column.
pub fn is_cone_emptiness_certificate(cx: &ApComplex, v: &[Rat]) -> bool {
    if v.len() != cx.n_edges() {
        return false;
    }
    (0..cx.n_tiles()).all(|j| {
        let mut acc = Rat::zero();
        for r in 0..cx.n_edges() {
            if !v[r].is_zero() && !cx.boundary.at(r, j).is_zero() {
                acc += v[r].clone() * cx.boundary.at(r, j).clone();
            }
        }
        acc >= Rat::one()
    })
}

/// Vertex description of the simplex slice `{ c >= 0, Σc = 1, ∂c = 0 }` of
/// the non-negative cycle cone.
#[derive(Clone, Debug)]
pub struct ConeDescription {
    pub kernel_dim: usize,
    pub kernel_basis: Vec<Vec<Rat>>,
    /// Simplex vertices, lexicographically sorted.
    pub extreme_points: Vec<Vec<Rat>>,
    /// `false` when ray enumeration ran out of budget; `extreme_points` is
    /// then unusable for completeness claims.
    pub complete: bool,
}

/// Enumerate the extreme points of the simplex slice by double description
/// on the boundary rows.
pub fn cone_description(cx: &ApComplex, budget: &mut Budget) -> ConeDescription {
    let kernel_basis = cycle_space(cx);
    let rays = linalg::cone_rays(&cx.boundary, budget);
    let mut extreme_points: Vec<Vec<Rat>> = rays
        .rays
        .into_iter()
        .map(|ray| {
            let sum: Rat = ray.iter().fold(Rat::zero(), |a, v| a + v.clone());
            ray.into_iter().map(|v| v / sum.clone()).collect()
        })
        .collect();
    extreme_points.sort();
    ConeDescription {
        kernel_dim: kernel_basis.len(),
        kernel_basis,
        extreme_points,
        complete: rays.complete,
    }
}

/// Check that `point` is a vertex of the simplex slice: a non-negative cycle
/// with coordinate sum 1 whose support columns, extended by the
/// normalization row, are linearly independent.
pub fn is_simplex_vertex(cx: &ApComplex, point: &[Rat]) -> bool {
    if point.len() != cx.n_tiles() {
        return false;
    }
    if point.iter().any(|v| v.is_negative()) {
        return false;
    }
    let sum: Rat = point.iter().fold(Rat::zero(), |a, v| a + v.clone());
    if !sum.is_one() {
        return false;
    }
    if !cx.is_cycle(point).unwrap() {
        return false;
    }
    let support: Vec<usize> = (0..point.len()).filter(|&j| !point[j].is_zero()).collect();
    let mut rows: Vec<Vec<Rat>> = (0..cx.n_edges())
        .map(|r| support.iter().map(|&j| cx.boundary.at(r, j).clone()).collect())
        .collect();
    rows.push(vec![Rat::one(); support.len()]);
    linalg::rank(&Mat::from_rows(rows)) == support.len()
}

// ---------------------------------------------------------------------------
// Chain coordinate helpers.

pub fn ell1(chain: &[Rat]) -> Rat {
    chain.iter().fold(Rat::zero(), |a, v| a + v.abs())
}

pub fn is_nonneg(chain: &[Rat]) -> bool {
    chain.iter().all(|v| !v.is_negative())
}

pub fn is_integral(chain: &[Rat]) -> bool {
    chain.iter().all(|v| v.denom().is_one())
}

/// Least common multiple of the coordinate denominators (1 for the zero
/// chain).
pub fn common_denominator(chain: &[Rat]) -> Int {
    chain
        .iter()
        .fold(Int::one(), |acc, v| acc.lcm(v.denom()))
}

/// Convert an integral chain to machine integers; `None` when a coordinate
/// is fractional or out of range.
pub fn to_integer_vec(chain: &[Rat]) -> Option<Vec<i64>> {
    chain
        .iter()
        .map(|v| {
            if !v.denom().is_one() {
                return None;
            }
            v.numer().to_string().parse().ok()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tileset::parse_wang;
    use crate::{rat, ratio};

    pub(crate) const MONO: &str = "tileset MONO\ntile T N=a S=a E=a W=a\n";
    pub(crate) const DEAD: &str = "tileset DEAD\ntile T N=a S=b E=c W=c\n";
    pub(crate) const CHECKER: &str =
        "tileset CHECKER\ntile A N=1 S=2 E=4 W=3\ntile B N=2 S=1 E=3 W=4\n";

    fn wang_complex(text: &str) -> ApComplex {
        build_wang_complex(&parse_wang(text).unwrap())
    }

    #[test]
    fn mono_complex_has_zero_boundary() {
        let cx = wang_complex(MONO);
        assert_eq!(cx.n_tiles(), 1);
        assert_eq!(cx.cells1.len(), 2);
        assert_eq!(cx.cells1[0].to_string(), "H:a");
        assert_eq!(cx.cells1[1].to_string(), "V:a");
        assert!(cx.is_cycle(&[rat(1)]).unwrap());
        let rules = switching_rules(&cx);
        assert_eq!(format_switching_rule(&cx, &rules[0]), "edge H:a : 0 = 0");
        assert_eq!(cycle_space(&cx), vec![vec![rat(1)]]);
    }

    #[test]
    fn dead_complex_has_no_cycles() {
        let cx = wang_complex(DEAD);
        assert_eq!(cx.cells1.len(), 3);
        // Top edge a is only consumed, bottom edge b only produced; the
        // vertical color c cancels within the tile.
        assert_eq!(*cx.boundary.at(0, 0), rat(-1));
        assert_eq!(*cx.boundary.at(1, 0), rat(1));
        assert_eq!(*cx.boundary.at(2, 0), rat(0));
        assert!(cycle_space(&cx).is_empty());
        match nonneg_cycle_exists(&cx) {
            ConeEmptiness::Empty(v) => assert!(is_cone_emptiness_certificate(&cx, &v)),
            ConeEmptiness::NonEmpty(_) => panic!("expected empty cone"),
        }
        let rules = switching_rules(&cx);
        assert_eq!(format_switching_rule(&cx, &rules[0]), "edge H:a : -1*T = 0");
        assert_eq!(format_switching_rule(&cx, &rules[1]), "edge H:b : +1*T = 0");
        assert_eq!(format_switching_rule(&cx, &rules[2]), "edge V:c : 0 = 0");
    }

    #[test]
    fn checker_complex_has_the_diagonal_cycle() {
        let cx = wang_complex(CHECKER);
        assert_eq!(cx.cells1.len(), 4);
        assert_eq!(cycle_space(&cx), vec![vec![rat(1), rat(1)]]);
        assert!(cx.is_cycle(&[rat(2), rat(2)]).unwrap());
        assert!(!cx.is_cycle(&[rat(1), rat(0)]).unwrap());
        match nonneg_cycle_exists(&cx) {
            ConeEmptiness::NonEmpty(c) => {
                assert!(cx.is_cycle(&c).unwrap());
                assert!(is_nonneg(&c));
                assert_eq!(ell1(&c), rat(1));
            }
            ConeEmptiness::Empty(_) => panic!("expected nonempty cone"),
        }
        let desc = cone_description(&cx, &mut Budget::unlimited());
        assert!(desc.complete);
        assert_eq!(desc.kernel_dim, 1);
        assert_eq!(desc.extreme_points, vec![vec![ratio(1, 2), ratio(1, 2)]]);
        assert!(is_simplex_vertex(&cx, &desc.extreme_points[0]));
        assert!(!is_simplex_vertex(&cx, &[rat(1), rat(0)]));
    }

    #[test]
    fn polygon_square_complex_matches_wang_conventions() {
        let text = "polyset SQ\npoly P\nvertex 0 0\nvertex 1 0\nvertex 1 1\nvertex 0 1\n\
                    edgecolor 0 s\nedgecolor 1 e\nedgecolor 2 n\nedgecolor 3 w\n";
        let set = crate::tileset::parse_polygons(text).unwrap();
        let cx = build_polygon_complex(&set);
        assert_eq!(cx.cells1.len(), 4);
        assert_eq!(cx.cells1[0].to_string(), "s@(1,0)");
        assert_eq!(*cx.boundary.at(0, 0), rat(1));
        assert_eq!(cx.cells1[2].to_string(), "n@(1,0)");
        assert_eq!(*cx.boundary.at(2, 0), rat(-1));
        assert!(cycle_space(&cx).is_empty());
    }

    #[test]
    fn polygon_mono_square_is_a_cycle() {
        let text = "polyset SQ1\npoly P\nvertex 0 0\nvertex 1 0\nvertex 1 1\nvertex 0 1\n\
                    edgecolor 0 c\nedgecolor 1 c\nedgecolor 2 c\nedgecolor 3 c\n";
        let set = crate::tileset::parse_polygons(text).unwrap();
        let cx = build_polygon_complex(&set);
        assert_eq!(cx.cells1.len(), 2);
        assert!(cx.is_cycle(&[rat(1)]).unwrap());
    }

    #[test]
    fn chain_helpers() {
        let c = vec![ratio(1, 2), rat(-2)];
        assert_eq!(ell1(&c), ratio(5, 2));
        assert!(!is_nonneg(&c));
        assert!(!is_integral(&c));
        assert_eq!(common_denominator(&c), Int::from(2));
        assert_eq!(to_integer_vec(&[rat(3), rat(0)]), Some(vec![3, 0]));
        assert_eq!(to_integer_vec(&c), None);
        let cx = wang_complex(MONO);
        assert!(cx.is_cycle(&[rat(1), rat(1)]).is_err());
    }
}
