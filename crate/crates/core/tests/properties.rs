//! Property-based invariants over randomly generated prototile sets:
//! serialization round trips, boundary closure, cone normalization,
//! color-renaming invariance, and witness validity.

use proptest::prelude::*;

use wangnorm::budget::Budget;
use wangnorm::homology::{
    build_polygon_complex, build_wang_complex, cone_description, cycle_space, ell1,
    is_cone_emptiness_certificate, is_nonneg, nonneg_cycle_exists, ApComplex, Axis, Cell1,
    ConeEmptiness,
};
use wangnorm::rat;
use wangnorm::reduction::{squareify, ReductionError};
use wangnorm::surface::{thurston_norm, validate_surface, SearchStatus};
use wangnorm::tileset::{parse_polygons, parse_wang, WangTile, WangTileSet};
use wangnorm::Rat;

// ---------------------------------------------------------------------------
// Generators

fn wang_set() -> impl Strategy<Value = WangTileSet> {
    let tile = (0u8..3, 0u8..3, 0u8..3, 0u8..3);
    (prop::collection::vec(tile, 1..=3), 1u8..=3).prop_map(|(raw, n_colors)| {
        let color = |v: u8| format!("c{}", v % n_colors);
        let tiles = raw
            .into_iter()
            .enumerate()
            .map(|(i, (n, s, e, w))| WangTile {
                id: format!("t{i}"),
                north: color(n),
                south: color(s),
                east: color(e),
                west: color(w),
            })
            .collect();
        WangTileSet { name: "P".to_string(), tiles }
    })
}

/// Source text of a small convex integral-after-scaling polygon set:
/// axis-aligned rectangles and right triangles, scaled by 1/d.
fn polygon_text() -> impl Strategy<Value = String> {
    let poly = (any::<bool>(), 1i64..=2, 1i64..=2, 1i64..=2, prop::collection::vec(0u8..2, 3..=4));
    prop::collection::vec(poly, 1..=2).prop_map(|polys| {
        let mut text = String::from("polyset PROP\n");
        for (i, (rect, a, b, d, colors)) in polys.into_iter().enumerate() {
            let frac = |n: i64| if d == 1 { format!("{n}") } else { format!("{n}/{d}") };
            text.push_str(&format!("poly g{i}\n"));
            let corners: Vec<(i64, i64)> = if rect {
                vec![(0, 0), (a, 0), (a, b), (0, b)]
            } else {
                vec![(0, 0), (a, 0), (0, b)]
            };
            for (x, y) in &corners {
                text.push_str(&format!("vertex {} {}\n", frac(*x), frac(*y)));
            }
            for e in 0..corners.len() {
                text.push_str(&format!("edgecolor {e} k{}\n", colors[e % colors.len()]));
            }
        }
        text
    })
}

/// All nonzero non-negative integral cycles of ℓ₁ size at most `max_l1`.
fn small_cycles(cx: &ApComplex, max_l1: u32) -> Vec<Vec<Rat>> {
    fn rec(cur: &mut Vec<u32>, i: usize, left: u32, out: &mut Vec<Vec<u32>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for v in 0..=left {
            cur[i] = v;
            rec(cur, i + 1, left - v, out);
        }
    }
    let mut raw = Vec::new();
    for s in 1..=max_l1 {
        rec(&mut vec![0; cx.n_tiles()], 0, s, &mut raw);
    }
    raw.into_iter()
        .map(|v| v.into_iter().map(|x| rat(x as i64)).collect::<Vec<Rat>>())
        .filter(|c| cx.is_cycle(c).unwrap())
        .collect()
}

/// The displacement vector a 1-cell contributes per unit of coefficient.
fn cell_direction(cell: &Cell1) -> (Rat, Rat) {
    match cell {
        Cell1::Wang { axis: Axis::Horizontal, .. } => (rat(1), rat(0)),
        Cell1::Wang { axis: Axis::Vertical, .. } => (rat(0), rat(1)),
        Cell1::Poly { dir, .. } => dir.clone(),
    }
}

/// Boundary closure: each prototile's boundary is a closed loop, so the
/// signed sum of 1-cell directions in every column of ∂ vanishes.
fn assert_columns_closed(cx: &ApComplex) {
    for t in 0..cx.n_tiles() {
        let mut unit = vec![rat(0); cx.n_tiles()];
        unit[t] = rat(1);
        let column = cx.boundary_of(&unit).unwrap();
        let mut sum = (rat(0), rat(0));
        for (coeff, cell) in column.iter().zip(&cx.cells1) {
            let dir = cell_direction(cell);
            sum.0 += coeff.clone() * dir.0;
            sum.1 += coeff.clone() * dir.1;
        }
        assert_eq!(sum, (rat(0), rat(0)), "open boundary in column of tile {t}");
    }
}

// ---------------------------------------------------------------------------
// Properties

proptest! {
    #[test]
    fn wang_serialization_round_trips(set in wang_set()) {
        let text = set.canonical_serialize();
        let reparsed = parse_wang(&text).unwrap();
        prop_assert_eq!(text, reparsed.canonical_serialize());
    }

    #[test]
    fn wang_boundary_columns_are_closed(set in wang_set()) {
        assert_columns_closed(&build_wang_complex(&set));
    }

    #[test]
    fn extreme_points_are_normalized_nonneg_cycles(set in wang_set()) {
        let cx = build_wang_complex(&set);
        let desc = cone_description(&cx, &mut Budget::new(100_000));
        for point in &desc.extreme_points {
            prop_assert!(is_nonneg(point));
            prop_assert!(cx.is_cycle(point).unwrap());
            prop_assert_eq!(ell1(point), rat(1));
        }
        match nonneg_cycle_exists(&cx) {
            ConeEmptiness::Empty(certificate) => {
                prop_assert!(is_cone_emptiness_certificate(&cx, &certificate));
                prop_assert!(desc.extreme_points.is_empty());
            }
            ConeEmptiness::NonEmpty(witness) => {
                prop_assert!(is_nonneg(&witness));
                prop_assert!(cx.is_cycle(&witness).unwrap());
                prop_assert!(!witness.iter().all(|v| v == &rat(0)));
                if desc.complete {
                    prop_assert!(!desc.extreme_points.is_empty());
                }
            }
        }
    }

    #[test]
    fn color_renaming_preserves_structure(set in wang_set()) {
        let renamed = WangTileSet {
            name: set.name.clone(),
            tiles: set
                .tiles
                .iter()
                .map(|t| WangTile {
                    id: t.id.clone(),
                    north: format!("z_{}", t.north),
                    south: format!("z_{}", t.south),
                    east: format!("z_{}", t.east),
                    west: format!("z_{}", t.west),
                })
                .collect(),
        };
        let cx = build_wang_complex(&set);
        let cx2 = build_wang_complex(&renamed);
        prop_assert_eq!(cycle_space(&cx).len(), cycle_space(&cx2).len());
        let d1 = cone_description(&cx, &mut Budget::new(100_000));
        let d2 = cone_description(&cx2, &mut Budget::new(100_000));
        prop_assert_eq!(d1.complete, d2.complete);
        prop_assert_eq!(d1.extreme_points, d2.extreme_points);
        for chain in small_cycles(&cx, 3) {
            let n1 = thurston_norm(&set, &cx, &chain, &mut Budget::unlimited()).unwrap();
            let n2 = thurston_norm(&renamed, &cx2, &chain, &mut Budget::unlimited()).unwrap();
            prop_assert_eq!(n1.value, n2.value);
        }
    }

    #[test]
    fn norm_witnesses_realize_their_cycles(set in wang_set()) {
        let cx = build_wang_complex(&set);
        for chain in small_cycles(&cx, 3) {
            let norm = thurston_norm(&set, &cx, &chain, &mut Budget::unlimited()).unwrap();
            prop_assert_eq!(norm.status, SearchStatus::Exact);
            prop_assert!(norm.value >= 0);
            validate_surface(&set, &norm.witness, Some(&chain)).unwrap();
        }
    }

    #[test]
    fn polygon_sets_parse_and_encode_consistently(text in polygon_text()) {
        let set = parse_polygons(&text).unwrap();
        prop_assert_eq!(
            set.canonical_serialize(),
            parse_polygons(&set.canonical_serialize()).unwrap().canonical_serialize()
        );
        assert_columns_closed(&build_polygon_complex(&set));
        // Thin triangles may staircase into a self-touching boundary, which
        // squareify must reject; anything rectangular must encode.
        let sq = match squareify(&set) {
            Ok(sq) => sq,
            Err(ReductionError::DegenerateAfterZigzag { .. })
                if set.polys.iter().any(|p| p.vertices.len() == 3) =>
            {
                return Ok(());
            }
            Err(e) => return Err(TestCaseError::fail(format!("squareify failed: {e}"))),
        };
        prop_assert!(!sq.tiles.tiles.is_empty());
        // The encoding map names every color of the produced tile set
        // exactly once.
        let mut map_tokens: Vec<&String> = sq.map.colors.iter().map(|(t, _)| t).collect();
        let before = map_tokens.len();
        map_tokens.sort();
        map_tokens.dedup();
        prop_assert_eq!(before, map_tokens.len());
        let mut tile_tokens: Vec<&String> = sq
            .tiles
            .tiles
            .iter()
            .flat_map(|t| [&t.north, &t.south, &t.east, &t.west])
            .collect();
        tile_tokens.sort();
        tile_tokens.dedup();
        prop_assert_eq!(tile_tokens, map_tokens);
        // And the encoded set is again a valid input.
        let text = sq.tiles.canonical_serialize();
        prop_assert_eq!(text.clone(), parse_wang(&text).unwrap().canonical_serialize());
    }
}
