//! Long exact sequence of the pair `(Z, A)` for `Z = Hom(π_1(Kl), SU(3))`.
//!
//! Read as a two-row spectral sequence: row 0 holds `H^p(A)` and row 1 at
//! column `p` holds `H^{p+1}(Z, A)`. The only differential is the connecting
//! map `H^p(A) → H^{p+1}(Z, A)`, drawn vertically. Every cell of row 1 that
//! survives lands in `H^{p+1}(Z)`; every killed dimension removes one from
//! both rows.
//!
//! Unknown row-1 entries and differential ranks are enumerated exhaustively
//! and filtered by three constraints: the low-degree value of `P_t(Z)` coming
//! from gauge theory, the fixed-point lower bound `dim H*(Z) >= dim H*(Z^T)`,
//! and the dominance bound on `P_t(Z, A)`.

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::coinv::{pt_a, CoinvError};
use crate::gysin::pair_upper_bound;
use crate::liecat::{pt_classifying, pt_group, GroupId};
use crate::series::{expand_ratio, rat, RationalPoly, SeriesError, TruncatedSeries};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error(transparent)]
    Coinv(#[from] CoinvError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("no assignment of row-1 entries is consistent with the constraints")]
    Contradiction,
    #[error("expected a unique consistent page, found {0}")]
    NotUnique(usize),
    #[error("{0} is not supported here: only SU(3) has a pair bound")]
    Unsupported(String),
    #[error("low-degree constraint is not a nonnegative integral series: {0}")]
    LowDegree(String),
}

/// First Yang-Mills stratum has complex codimension 2, i.e. real codimension 4.
pub const FIRST_STRATUM_CODIMENSION: usize = 4;

/// `P_t(A_YM, A_flat)` modulo `t^5`: the first stratum is connected with
/// orientable normal bundle, so its Thom class contributes exactly
/// `t^FIRST_STRATUM_CODIMENSION`; deeper strata start at `t^8`.
pub fn morse_relative_leading() -> TruncatedSeries {
    TruncatedSeries::from_poly(
        &RationalPoly::t_pow(FIRST_STRATUM_CODIMENSION),
        FIRST_STRATUM_CODIMENSION,
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LowDegree {
    /// `P_t(Hom_id(π_1(Kl), U(3)))` modulo `t^4`.
    pub intermediate: TruncatedSeries,
    /// `P_t(Z)` modulo `t^4`.
    pub constraint: TruncatedSeries,
}

/// `P_t(Z) mod t^4` from `(1+t)(1+t³)(1+t⁵) + t^{-1} P_t(A_YM, A_flat)`,
/// divided by the circle factor `1 + t`.
pub fn klein_low_degree() -> Result<LowDegree, SolveError> {
    let relative = morse_relative_leading().shift_down(1)?;
    let order = relative.order();
    let intermediate = &TruncatedSeries::from_poly(&pt_group(GroupId::u(3)), order) + &relative;
    let circle = TruncatedSeries::from_poly(&RationalPoly::from_ints(&[1, 1]), order);
    let constraint = intermediate.div(&circle)?;
    if !constraint.is_nonnegative_integral() || &constraint * &circle != intermediate {
        return Err(SolveError::LowDegree(constraint.to_string()));
    }
    Ok(LowDegree {
        intermediate,
        constraint,
    })
}

/// `dim H*(Z^T) = dim H*(T) · |T_2| = 2^rank · 2^rank`.
pub fn fixed_point_total(g: GroupId) -> u64 {
    1u64 << (2 * g.rank())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairSequenceInstance {
    /// `P_t(A)` coefficients; column `p` is degree `p`.
    pub base_row: Vec<u32>,
    /// Upper bounds for `P_t(Z, A)`; column `p` is degree `p + 1`.
    pub bound_row: Vec<u32>,
    pub low_degree_constraint: Option<TruncatedSeries>,
    pub fixed_point_total: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolvedPage {
    /// Resolved row-1 dimensions.
    pub star_values: Vec<u32>,
    /// How many dimensions of each row-1 cell the connecting map hits.
    pub killed: Vec<u32>,
    pub resulting_poincare: RationalPoly,
}

impl SolvedPage {
    pub fn final_base_row(&self, instance: &PairSequenceInstance) -> Vec<u32> {
        (0..self.killed.len())
            .map(|p| instance.base_row.get(p).copied().unwrap_or(0) - self.killed[p])
            .collect()
    }

    pub fn survivors(&self) -> Vec<u32> {
        self.star_values
            .iter()
            .zip(&self.killed)
            .map(|(s, k)| s - k)
            .collect()
    }
}

fn to_u32_row(p: &RationalPoly) -> Vec<u32> {
    p.to_i64_coeffs()
        .expect("integral Poincaré polynomial")
        .into_iter()
        .map(|c| u32::try_from(c).expect("nonnegative coefficient"))
        .collect()
}

impl PairSequenceInstance {
    /// The instance for `SU(3)`: `P_t(A)` from the mixing space, the pair bound
    /// from the `C*`-bundle over `Fl_3`, and the gauge-theory constraint.
    pub fn for_group(g: GroupId) -> Result<Self, SolveError> {
        if g != GroupId::su(3) {
            return Err(SolveError::Unsupported(g.to_string()));
        }
        let base_row = to_u32_row(&pt_a(g)?);
        let bound = pair_upper_bound();
        debug_assert!(bound.coeff(0).is_zero());
        let bound_row = to_u32_row(&bound).into_iter().skip(1).collect();
        Ok(PairSequenceInstance {
            base_row,
            bound_row,
            low_degree_constraint: Some(klein_low_degree()?.constraint),
            fixed_point_total: fixed_point_total(g),
        })
    }

    pub fn columns(&self) -> usize {
        self.base_row.len().max(self.bound_row.len())
    }

    fn base(&self, p: usize) -> u32 {
        self.base_row.get(p).copied().unwrap_or(0)
    }

    fn bound(&self, p: usize) -> u32 {
        self.bound_row.get(p).copied().unwrap_or(0)
    }

    fn poincare(&self, stars: &[u32], killed: &[u32]) -> RationalPoly {
        let cols = self.columns();
        let coeffs: Vec<i64> = (0..=cols)
            .map(|k| {
                let below = if k < cols {
                    self.base(k) - killed[k]
                } else {
                    0
                };
                let above = if k >= 1 {
                    stars[k - 1] - killed[k - 1]
                } else {
                    0
                };
                i64::from(below + above)
            })
            .collect();
        RationalPoly::from_ints(&coeffs)
    }

    fn admissible(&self, p: &RationalPoly) -> bool {
        if let Some(c) = &self.low_degree_constraint {
            if TruncatedSeries::from_poly(p, c.order()) != *c {
                return false;
            }
        }
        p.eval_at_one() >= rat(self.fixed_point_total as i64)
    }

    /// Every `(star, killed)` choice for one column.
    fn column_choices(&self, p: usize) -> Vec<(u32, u32)> {
        (0..=self.bound(p))
            .flat_map(|s| (0..=s.min(self.base(p))).map(move |k| (s, k)))
            .collect()
    }

    /// All consistent pages, in lexicographic order of the column choices.
    pub fn solve_all(&self) -> Vec<SolvedPage> {
        let cols = self.columns();
        let choices: Vec<Vec<(u32, u32)>> = (0..cols).map(|p| self.column_choices(p)).collect();
        let total: usize = choices.iter().map(Vec::len).product();
        (0..total)
            .into_par_iter()
            .filter_map(|mut index| {
                let mut stars = vec![0; cols];
                let mut killed = vec![0; cols];
                for p in (0..cols).rev() {
                    let (s, k) = choices[p][index % choices[p].len()];
                    index /= choices[p].len();
                    stars[p] = s;
                    killed[p] = k;
                }
                let poly = self.poincare(&stars, &killed);
                self.admissible(&poly).then_some(SolvedPage {
                    star_values: stars,
                    killed,
                    resulting_poincare: poly,
                })
            })
            .collect()
    }

    /// Aligned grid of the first page: `*` marks a row-1 cell bounded by 1 and
    /// `^` the connecting maps that may be nonzero.
    pub fn render_initial(&self) -> String {
        let cols = self.columns();
        let top: Vec<String> = (0..cols)
            .map(|p| match self.bound(p) {
                0 => "0".into(),
                1 => "*".into(),
                b => format!("≤{b}"),
            })
            .collect();
        let arrows: Vec<String> = (0..cols)
            .map(|p| {
                if self.bound(p) > 0 && self.base(p) > 0 {
                    "^".into()
                } else {
                    String::new()
                }
            })
            .collect();
        let bottom: Vec<String> = (0..cols).map(|p| self.base(p).to_string()).collect();
        render_grid(&[("q=1", top), ("   ", arrows), ("q=0", bottom)], cols)
    }

    pub fn render_solved(&self, page: &SolvedPage) -> String {
        let cols = self.columns();
        let fmt = |v: Vec<u32>| v.into_iter().map(|x| x.to_string()).collect::<Vec<_>>();
        render_grid(
            &[
                ("q=1", fmt(page.survivors())),
                ("q=0", fmt(page.final_base_row(self))),
            ],
            cols,
        )
    }
}

fn render_grid(rows: &[(&str, Vec<String>)], cols: usize) -> String {
    let mut out = String::new();
    for (label, cells) in rows {
        out.push_str(label);
        out.push_str(" |");
        for c in cells {
            out.push_str(&format!("{c:>3}"));
        }
        out.truncate(out.trim_end().len());
        out.push('\n');
    }
    out.push_str("    +");
    out.push_str(&"---".repeat(cols));
    out.push_str("\n  p  ");
    for p in 0..cols {
        out.push_str(&format!("{p:>3}"));
    }
    out.push('\n');
    out
}

/// Unique consistent page, or an error naming how many were found.
pub fn solve(instance: &PairSequenceInstance) -> Result<Vec<SolvedPage>, SolveError> {
    let pages = instance.solve_all();
    if pages.is_empty() {
        return Err(SolveError::Contradiction);
    }
    Ok(pages)
}

/// Everything the Klein-bottle computation produces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KleinRecord {
    pub pt_a: RationalPoly,
    pub bound: RationalPoly,
    pub constraint: TruncatedSeries,
    pub instance: PairSequenceInstance,
    pub solutions: Vec<SolvedPage>,
    pub pt_z: RationalPoly,
    /// The solved row 1 equals the pair bound coefficient for coefficient.
    pub bound_attained: bool,
    pub total_dimension: u64,
    pub equivariant_series: TruncatedSeries,
}

/// Default truncation for the equivariant series in [`KleinRecord`].
pub const DEFAULT_SERIES_ORDER: usize = 20;

pub fn klein_record(g: GroupId) -> Result<KleinRecord, SolveError> {
    let instance = PairSequenceInstance::for_group(g)?;
    let solutions = solve(&instance)?;
    if solutions.len() != 1 {
        return Err(SolveError::NotUnique(solutions.len()));
    }
    let page = &solutions[0];
    let pt_z = page.resulting_poincare.clone();
    let total = pt_z.eval_at_one().to_integer();
    Ok(KleinRecord {
        pt_a: pt_a(g)?,
        bound: pair_upper_bound(),
        constraint: instance
            .low_degree_constraint
            .clone()
            .expect("set by for_group"),
        bound_attained: page.star_values == instance.bound_row,
        total_dimension: u64::try_from(total).expect("nonnegative"),
        equivariant_series: &TruncatedSeries::from_poly(&pt_z, DEFAULT_SERIES_ORDER)
            * &pt_classifying(g, DEFAULT_SERIES_ORDER),
        pt_z,
        solutions,
        instance,
    })
}

/// `P_t(Hom(π_1(Kl), SU(3)))`, derived as the unique solution of the pair sequence.
pub fn klein_poincare(g: GroupId) -> Result<RationalPoly, SolveError> {
    Ok(klein_record(g)?.pt_z)
}

/// Equivariant Poincaré series assuming formality: `P_t(Z) · P_t(BG)`.
pub fn equivariant_series(g: GroupId, order: usize) -> Result<TruncatedSeries, SolveError> {
    let pz = klein_poincare(g)?;
    Ok(&TruncatedSeries::from_poly(&pz, order) * &pt_classifying(g, order))
}

/// Numerator `P_t(SU(3))^n + (1+t²+t⁴)(t³+2t⁴+t⁵)^n` of the conjectured series
/// for the connected sum of `n + 1` projective planes.
pub fn ho_liu_numerator(n: u32) -> RationalPoly {
    let group = pt_group(GroupId::su(3)).pow(n);
    let twisted = RationalPoly::from_ints(&[1, 0, 1, 0, 1])
        * RationalPoly::from_ints(&[0, 0, 0, 1, 2, 1]).pow(n);
    group + twisted
}

pub fn ho_liu_series(n: u32, order: usize) -> TruncatedSeries {
    let denominators = [
        RationalPoly::one() - RationalPoly::t_pow(4),
        RationalPoly::one() - RationalPoly::t_pow(6),
    ];
    expand_ratio(&ho_liu_numerator(n), &denominators, order).expect("constant terms are 1")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct U3Relation {
    /// `(1 + t) · P_t(Z)`.
    pub product: RationalPoly,
    pub coefficient_sum: i64,
    pub low_degree: TruncatedSeries,
    pub holds: bool,
}

/// Check `(1 + t) P_t(Z)` against the identity component for `U(3)`: total
/// dimension `2 · 16` and agreement with the gauge-theory value mod `t^4`.
pub fn u3_su3_relation(order: usize) -> Result<U3Relation, SolveError> {
    let product = klein_poincare(GroupId::su(3))? * RationalPoly::from_ints(&[1, 1]);
    let intermediate = klein_low_degree()?.intermediate;
    let order = order.min(intermediate.order());
    let low_degree = TruncatedSeries::from_poly(&product, order);
    let coefficient_sum = product
        .eval_at_one()
        .to_integer()
        .try_into()
        .expect("small");
    let expected_sum = 2 * fixed_point_total(GroupId::su(3)) as i64;
    Ok(U3Relation {
        holds: coefficient_sum == expected_sum && low_degree == intermediate.truncate(order),
        product,
        coefficient_sum,
        low_degree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liecat::rp2_total;
    use crate::series::rat;

    fn p(c: &[i64]) -> RationalPoly {
        RationalPoly::from_ints(c)
    }

    fn klein_poly() -> RationalPoly {
        p(&[1, 0, 0, 1]) * p(&[1, 0, 0, 0, 0, 1]) + p(&[1, 0, 1, 0, 1]) * p(&[0, 0, 0, 1, 2, 1])
    }

    #[test]
    fn low_degree_values() {
        let ld = klein_low_degree().unwrap();
        assert_eq!(ld.intermediate.to_poly(), p(&[1, 1, 0, 2]));
        assert_eq!(ld.constraint.to_poly(), p(&[1, 0, 0, 2]));
        assert_eq!(ld.constraint.order(), 3);
        let circle = TruncatedSeries::from_poly(&p(&[1, 1]), 3);
        assert_eq!(&ld.constraint * &circle, ld.intermediate);
    }

    #[test]
    fn fixed_point_totals() {
        assert_eq!(fixed_point_total(GroupId::su(3)), 16);
        assert_eq!(fixed_point_total(GroupId::su(2)), 4);
        assert_eq!(fixed_point_total(GroupId::su(4)), 64);
    }

    #[test]
    fn su3_instance_shape() {
        let inst = PairSequenceInstance::for_group(GroupId::su(3)).unwrap();
        assert_eq!(inst.base_row, vec![2, 1, 1, 3, 2, 3, 1, 1, 2]);
        assert_eq!(inst.bound_row, vec![1, 1, 1, 1, 0, 1, 1, 1, 1]);
        assert_eq!(inst.fixed_point_total, 16);
        assert!(PairSequenceInstance::for_group(GroupId::su(4)).is_err());
    }

    #[test]
    fn unique_solution_reproduces_klein_poly() {
        let inst = PairSequenceInstance::for_group(GroupId::su(3)).unwrap();
        let pages = solve(&inst).unwrap();
        assert_eq!(pages.len(), 1);
        let page = &pages[0];
        assert_eq!(page.resulting_poincare, klein_poly());
        assert_eq!(
            page.resulting_poincare.to_i64_coeffs().unwrap(),
            vec![1, 0, 0, 2, 2, 3, 2, 2, 3, 1]
        );
        assert_eq!(page.final_base_row(&inst), vec![1, 0, 0, 2, 2, 3, 1, 1, 2]);
        assert_eq!(page.survivors(), vec![0, 0, 0, 0, 0, 1, 1, 1, 1]);
        assert_eq!(page.killed, vec![1, 1, 1, 1, 0, 0, 0, 0, 0]);
        assert_eq!(page.resulting_poincare.eval_at_one(), rat(16));
    }

    #[test]
    fn constraint_is_active() {
        let mut inst = PairSequenceInstance::for_group(GroupId::su(3)).unwrap();
        inst.low_degree_constraint = None;
        assert!(solve(&inst).unwrap().len() > 1);
    }

    #[test]
    fn empty_relative_cohomology() {
        let inst = PairSequenceInstance {
            base_row: vec![2, 1, 1, 3, 2, 3, 1, 1, 2],
            bound_row: vec![0; 9],
            low_degree_constraint: None,
            fixed_point_total: 16,
        };
        let pages = solve(&inst).unwrap();
        assert_eq!(pages.len(), 1);
        assert_eq!(pages[0].resulting_poincare, p(&[2, 1, 1, 3, 2, 3, 1, 1, 2]));
    }

    #[test]
    fn contradiction_is_reported() {
        let inst = PairSequenceInstance {
            base_row: vec![1],
            bound_row: vec![0],
            low_degree_constraint: None,
            fixed_point_total: 2,
        };
        assert_eq!(solve(&inst), Err(SolveError::Contradiction));
    }

    #[test]
    fn exactness_bookkeeping() {
        let mut inst = PairSequenceInstance::for_group(GroupId::su(3)).unwrap();
        inst.low_degree_constraint = None;
        for page in inst.solve_all() {
            for p in 0..inst.columns() {
                assert!(page.killed[p] <= page.star_values[p]);
                assert!(page.killed[p] <= inst.base_row[p]);
                assert!(page.star_values[p] <= inst.bound_row[p]);
            }
            assert!(page.resulting_poincare.is_nonnegative());
        }
    }

    #[test]
    fn record_and_klein_poincare() {
        let rec = klein_record(GroupId::su(3)).unwrap();
        assert!(rec.bound_attained);
        assert_eq!(rec.total_dimension, 16);
        assert_eq!(klein_poincare(GroupId::su(3)).unwrap(), klein_poly());
        assert!(klein_poincare(GroupId::su(2)).is_err());
        let json = serde_json::to_value(&rec).unwrap();
        for key in [
            "pt_a",
            "bound",
            "constraint",
            "solutions",
            "pt_z",
            "equivariant_series",
        ] {
            assert!(json.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn pages_render_like_the_tables() {
        let inst = PairSequenceInstance::for_group(GroupId::su(3)).unwrap();
        let initial = inst.render_initial();
        assert!(
            initial.contains("q=1 |  *  *  *  *  0  *  *  *  *"),
            "{initial}"
        );
        assert!(initial.contains("q=0 |  2  1  1  3  2  3  1  1  2"));
        let page = &solve(&inst).unwrap()[0];
        let fin = inst.render_solved(page);
        assert!(fin.contains("q=1 |  0  0  0  0  0  1  1  1  1"), "{fin}");
        assert!(fin.contains("q=0 |  1  0  0  2  2  3  1  1  2"));
    }

    #[test]
    fn conjectured_series() {
        assert_eq!(ho_liu_numerator(0), p(&[2, 0, 1, 0, 1]));
        assert_eq!(ho_liu_numerator(1), klein_poly());
        let direct = expand_ratio(
            &klein_poly(),
            &[p(&[1, 0, 0, 0, -1]), p(&[1, 0, 0, 0, 0, 0, -1])],
            20,
        )
        .unwrap();
        assert_eq!(ho_liu_series(1, 20), direct);
        assert_eq!(
            equivariant_series(GroupId::su(3), 20).unwrap(),
            ho_liu_series(1, 20)
        );
        let rp2 = &TruncatedSeries::from_poly(&rp2_total(GroupId::su(3)), 16)
            * &pt_classifying(GroupId::su(3), 16);
        assert_eq!(ho_liu_series(0, 16), rp2);
    }

    #[test]
    fn equivariant_series_low_terms() {
        let s = equivariant_series(GroupId::su(3), 9).unwrap();
        // product oracle: (1 + 2t³ + ...)(1 + t⁴ + t⁶ + ...) through t³
        assert_eq!(s.coeffs()[..4], [rat(1), rat(0), rat(0), rat(2)]);
        assert_eq!(s.order(), 9);
    }

    #[test]
    fn unitary_relation() {
        let r = u3_su3_relation(10).unwrap();
        assert!(r.holds);
        assert_eq!(r.coefficient_sum, 32);
        assert_eq!(r.low_degree.to_poly(), p(&[1, 1, 0, 2]));
        assert_eq!(r.product.degree(), Some(10));
    }
}
