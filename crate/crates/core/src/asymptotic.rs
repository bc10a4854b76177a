//! Asymptotic behaviour of the norm along multiples of a cycle.
//!
//! The norm is subadditive under cycle addition, so `‖n·c‖ / n` converges;
//! the limit extends the norm to rational cycles by homogeneity. Sampling
//! `‖n·d·c‖` for the denominator `d` of a rational cycle gives a table of
//! upper bounds on the asymptotic value, the best of which is the minimum
//! over the exactly-computed rows.

use crate::budget::Budget;
use crate::homology::{self, ApComplex};
use crate::surface::{self, GluedSurface, SearchStatus, SurfaceError};
use crate::tileset::WangTileSet;
use crate::{rat, Int, Rat};

/// One sampled multiple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormRow {
    pub n: u32,
    /// `‖n·d·c‖`, exact or an upper bound per `status`.
    pub value: i64,
    pub status: SearchStatus,
}

/// Norm samples along multiples of a cycle.
#[derive(Clone, Debug)]
pub struct NormTable {
    /// Common denominator `d` of the input cycle; row `n` samples `n·d·c`.
    pub denominator: Int,
    pub rows: Vec<NormRow>,
    /// `min value / (n·d)` over the exact rows; `None` when every row ran
    /// out of budget.
    pub best_upper: Option<Rat>,
    /// Row achieving `best_upper`.
    pub best_n: Option<u32>,
    /// Witness surface of the row achieving `best_upper`.
    pub best_witness: Option<GluedSurface>,
}

/// Sample `‖n·d·c‖` for `n = 1..=max_n`, each row with its own budget of
/// `budget_per_row` nodes.
pub fn norm_table(
    set: &WangTileSet,
    cx: &ApComplex,
    chain: &[Rat],
    max_n: u32,
    budget_per_row: u64,
) -> Result<NormTable, SurfaceError> {
    cx.check_dim(chain).map_err(|_| SurfaceError::DimensionMismatch {
        got: chain.len(),
        expected: cx.n_tiles(),
    })?;
    let d = homology::common_denominator(chain);
    let base: Vec<Rat> = chain
        .iter()
        .map(|v| v.clone() * Rat::from_integer(d.clone()))
        .collect();
    let mut rows = Vec::new();
    let mut best_upper: Option<Rat> = None;
    let mut best_n = None;
    let mut best_witness = None;
    for n in 1..=max_n {
        let scaled: Vec<Rat> = base.iter().map(|v| v.clone() * rat(n as i64)).collect();
        let mut budget = Budget::new(budget_per_row);
        let cert = surface::thurston_norm(set, cx, &scaled, &mut budget)?;
        rows.push(NormRow { n, value: cert.value, status: cert.status });
        if cert.status == SearchStatus::Exact {
            let denom = Rat::from_integer(d.clone()) * rat(n as i64);
            let bound = rat(cert.value) / denom;
            if best_upper.as_ref().map_or(true, |b| bound < *b) {
                best_upper = Some(bound);
                best_n = Some(n);
                best_witness = Some(cert.witness);
            }
        }
    }
    Ok(NormTable { denominator: d, rows, best_upper, best_n, best_witness })
}

/// Linear bound on the asymptotic seminorm: the maximal prototile side
/// count times the ℓ₁ size of the cycle.
pub fn lipschitz_bound(cx: &ApComplex, chain: &[Rat]) -> Rat {
    rat(cx.max_sides as i64) * homology::ell1(chain)
}

/// Exact norms of two cycles and their sum, for subadditivity checks;
/// `None` when any of the three searches ran out of budget.
pub fn subadditivity_witness(
    set: &WangTileSet,
    cx: &ApComplex,
    a: &[Rat],
    b: &[Rat],
    budget_per_call: u64,
) -> Result<Option<(i64, i64, i64)>, SurfaceError> {
    let sum: Vec<Rat> = a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect();
    let mut values = Vec::new();
    for c in [a, b, &sum[..]] {
        let cert = surface::thurston_norm(set, cx, c, &mut Budget::new(budget_per_call))?;
        if cert.status != SearchStatus::Exact {
            return Ok(None);
        }
        values.push(cert.value);
    }
    Ok(Some((values[0], values[1], values[2])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::build_wang_complex;
    use crate::tileset::parse_wang;
    use crate::ratio;

    const MONO: &str = "tileset MONO\ntile T N=a S=a E=a W=a\n";
    const CHECKER: &str =
        "tileset CHECKER\ntile A N=1 S=2 E=4 W=3\ntile B N=2 S=1 E=3 W=4\n";

    #[test]
    fn mono_table_is_identically_zero() {
        let set = parse_wang(MONO).unwrap();
        let cx = build_wang_complex(&set);
        let t = norm_table(&set, &cx, &[rat(1)], 3, 1_000_000).unwrap();
        assert_eq!(t.denominator, Int::from(1));
        assert_eq!(t.rows.len(), 3);
        for row in &t.rows {
            assert_eq!(row.value, 0);
            assert_eq!(row.status, SearchStatus::Exact);
        }
        assert_eq!(t.best_upper, Some(rat(0)));
        assert!(t.best_witness.is_some());
        assert_eq!(lipschitz_bound(&cx, &[rat(1)]), rat(4));
    }

    #[test]
    fn checker_extreme_point_scales_through_its_denominator() {
        let set = parse_wang(CHECKER).unwrap();
        let cx = build_wang_complex(&set);
        let c = vec![ratio(1, 2), ratio(1, 2)];
        let t = norm_table(&set, &cx, &c, 2, 1_000_000).unwrap();
        assert_eq!(t.denominator, Int::from(2));
        assert_eq!(t.rows[0], NormRow { n: 1, value: 0, status: SearchStatus::Exact });
        assert_eq!(t.rows[1], NormRow { n: 2, value: 0, status: SearchStatus::Exact });
        assert_eq!(t.best_upper, Some(rat(0)));
        assert!(lipschitz_bound(&cx, &c) >= t.best_upper.unwrap());
    }

    #[test]
    fn zero_cycle_has_zero_table() {
        let set = parse_wang(MONO).unwrap();
        let cx = build_wang_complex(&set);
        let t = norm_table(&set, &cx, &[rat(0)], 2, 10).unwrap();
        assert_eq!(t.best_upper, Some(rat(0)));
        assert!(t.rows.iter().all(|r| r.value == 0));
    }

    #[test]
    fn exhausted_rows_leave_no_upper_bound() {
        let set = parse_wang(CHECKER).unwrap();
        let cx = build_wang_complex(&set);
        let t = norm_table(&set, &cx, &[rat(2), rat(2)], 1, 1).unwrap();
        assert_eq!(t.rows[0].status, SearchStatus::UpperBound);
        assert_eq!(t.best_upper, None);
        assert!(t.best_witness.is_none());
    }

    #[test]
    fn subadditivity_on_checker_multiples() {
        let set = parse_wang(CHECKER).unwrap();
        let cx = build_wang_complex(&set);
        let a = vec![rat(1), rat(1)];
        let b = vec![rat(2), rat(2)];
        let (na, nb, nab) =
            subadditivity_witness(&set, &cx, &a, &b, 1_000_000).unwrap().unwrap();
        assert!(nab <= na + nb);
    }
}
