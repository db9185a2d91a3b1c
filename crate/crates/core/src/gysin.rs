//! Two-row spectral sequence of a `C*`-bundle `L \ 0 → Fl_n`.
//!
//! `E_2^{p,q} = H^p(Fl_n) ⊗ H^q(C*)` with `q ∈ {0, 1}`. The only differential is
//! `d_2: E_2^{p,1} → E_2^{p+2,0}`, cup product with `c_1(L)`, which on the
//! coinvariant algebra is multiplication by a linear form. `E_3 = E_∞`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::coinv::{artin_basis, reduce, top_degree, CoinvariantElement, MPoly};
use crate::linalg;
use crate::series::{poincare_dual, rat, Rational, RationalPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse linear form `{0}` (expected comma-separated rationals, e.g. -1,1,0)")]
pub struct FormParseError(String);

/// `ℓ = Σ c_i x_i` on the coinvariant algebra of `n = coeffs.len()` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearForm(pub Vec<Rational>);

impl LinearForm {
    pub fn from_ints(c: &[i64]) -> Self {
        LinearForm(c.iter().map(|&x| rat(x)).collect())
    }

    /// `x_{j} - x_{i}` (0-based) in `n` variables: `c_1(Hom(L_i, L_j))`.
    pub fn difference(n: usize, i: usize, j: usize) -> Self {
        let mut c = vec![Rational::zero(); n];
        c[j] += rat(1);
        c[i] -= rat(1);
        LinearForm(c)
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn to_mpoly(&self) -> MPoly {
        MPoly::linear(&self.0)
    }
}

impl FromStr for LinearForm {
    type Err = FormParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let coeffs: Result<Vec<Rational>, _> =
            s.split(',').map(|x| Rational::from_str(x.trim())).collect();
        match coeffs {
            Ok(c) if !c.is_empty() => Ok(LinearForm(c)),
            _ => Err(FormParseError(s.to_string())),
        }
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// Matrix of multiplication by `form` from algebraic degree `d` to `d + 1`, one
/// row per source basis element, in Artin-basis coordinates.
pub fn mult_matrix(form: &LinearForm, degree: usize) -> Vec<Vec<Rational>> {
    let n = form.nvars();
    let target = artin_basis(n, degree + 1);
    let ell = reduce(&form.to_mpoly());
    artin_basis(n, degree)
        .iter()
        .map(|b| {
            let image = ell.mul(&CoinvariantElement::basis(b));
            target.iter().map(|t| image.coefficient(t)).collect()
        })
        .collect()
}

/// Rank of multiplication by `form` from algebraic degree `d` to `d + 1`, for
/// `d = 0..top_degree(n)`.
pub fn mult_ranks(form: &LinearForm) -> Vec<usize> {
    (0..top_degree(form.nvars()))
        .map(|d| linalg::rank(&mult_matrix(form, d)))
        .collect()
}

/// Dimensions and `d_2` ranks of a two-row page; `p` is the topological base degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectralPage {
    pub dims: BTreeMap<(usize, usize), usize>,
    pub differential_ranks: BTreeMap<usize, usize>,
}

impl SpectralPage {
    /// `E_2` of the `C*`-bundle over `Fl_n` with first Chern class `form`.
    pub fn for_bundle(form: &LinearForm) -> Self {
        let n = form.nvars();
        let mut dims = BTreeMap::new();
        for d in 0..=top_degree(n) {
            let dim = artin_basis(n, d).len();
            dims.insert((2 * d, 0), dim);
            dims.insert((2 * d, 1), dim);
        }
        let differential_ranks = mult_ranks(form)
            .into_iter()
            .enumerate()
            .map(|(d, r)| (2 * d, r))
            .collect();
        SpectralPage {
            dims,
            differential_ranks,
        }
    }

    pub fn dim(&self, p: usize, q: usize) -> usize {
        self.dims.get(&(p, q)).copied().unwrap_or(0)
    }

    fn rank_from(&self, p: usize) -> usize {
        self.differential_ranks.get(&p).copied().unwrap_or(0)
    }

    /// `E_3^{p,1} = ker d_2`, `E_3^{p,0} = coker d_2`.
    pub fn next_page(&self) -> SpectralPage {
        let dims = self
            .dims
            .iter()
            .map(|(&(p, q), &dim)| {
                let lost = match q {
                    1 => self.rank_from(p),
                    _ => p.checked_sub(2).map_or(0, |s| self.rank_from(s)),
                };
                ((p, q), dim - lost)
            })
            .collect();
        SpectralPage {
            dims,
            differential_ranks: BTreeMap::new(),
        }
    }

    /// Poincaré polynomial of the abutment, reading `(p, q)` in total degree `p + q`.
    pub fn total_poincare(&self) -> RationalPoly {
        self.dims
            .iter()
            .map(|(&(p, q), &dim)| RationalPoly::monomial(rat(dim as i64), p + q))
            .sum()
    }

    /// Text grid, top row `q = 1`, columns `p = 0..=max_p`.
    pub fn render(&self) -> String {
        let max_p = self.dims.keys().map(|&(p, _)| p).max().unwrap_or(0);
        let mut out = String::new();
        for q in [1, 0] {
            out.push_str(&format!("q={q} |"));
            for p in 0..=max_p {
                let cell = match self.dims.get(&(p, q)) {
                    Some(d) => d.to_string(),
                    None => ".".into(),
                };
                out.push_str(&format!("{cell:>3}"));
            }
            out.push('\n');
        }
        out.push_str("     +");
        out.push_str(&"---".repeat(max_p + 1));
        out.push_str("\n   p  ");
        for p in 0..=max_p {
            out.push_str(&format!("{p:>3}"));
        }
        out.push('\n');
        out
    }
}

/// Poincaré polynomial of the total space: cokernels in row 0 plus kernels in
/// row 1 shifted up by the fiber class.
pub fn circle_bundle_total_space(form: &LinearForm) -> RationalPoly {
    SpectralPage::for_bundle(form).next_page().total_poincare()
}

/// Real dimension of `Y × U(1)` where `Y → Fl_3` has `C*` fibers: `6 + 2 + 1`.
pub const PAIR_DUALITY_DIMENSION: usize = 9;

/// Upper bound on `P_t(Z, A)`: Künneth with the circle, then Poincaré duality
/// on the 9-manifold `Z − A`.
pub fn pair_upper_bound() -> RationalPoly {
    let py = circle_bundle_total_space(&LinearForm::difference(3, 0, 1));
    let with_circle = py * RationalPoly::from_ints(&[1, 1]);
    poincare_dual(&with_circle, PAIR_DUALITY_DIMENSION).expect("degree 8 <= 9")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liecat::pt_full_flag;
    use crate::perm::{all_perms, Perm};

    fn p(c: &[i64]) -> RationalPoly {
        RationalPoly::from_ints(c)
    }

    fn permute_form(form: &LinearForm, w: &Perm) -> LinearForm {
        let mut c = vec![Rational::zero(); form.nvars()];
        for (i, x) in form.0.iter().enumerate() {
            c[w.image(i)] = x.clone();
        }
        LinearForm(c)
    }

    #[test]
    fn rank_examples() {
        assert_eq!(mult_ranks(&"-1,1,0".parse().unwrap()), vec![1, 2, 1]);
        assert_eq!(
            mult_ranks(&LinearForm::from_ints(&[0, 0, 0])),
            vec![0, 0, 0]
        );
        assert_eq!(
            mult_ranks(&LinearForm::from_ints(&[0, 0, 0, 0])),
            vec![0; 6]
        );
        assert_eq!(
            mult_ranks(&LinearForm::from_ints(&[1, 0, -1])),
            vec![1, 2, 1]
        );
    }

    #[test]
    fn total_space_examples() {
        assert_eq!(
            circle_bundle_total_space(&LinearForm::difference(3, 0, 1)),
            RationalPoly::from_degrees(&[0, 2, 5, 7])
        );
        assert_eq!(
            circle_bundle_total_space(&LinearForm::difference(2, 0, 1)),
            p(&[1, 0, 0, 1])
        );
        assert_eq!(
            circle_bundle_total_space(&LinearForm::from_ints(&[0, 0, 0])),
            pt_full_flag(3) * p(&[1, 1])
        );
    }

    #[test]
    fn pages_match_displayed_tables() {
        let e2 = SpectralPage::for_bundle(&LinearForm::difference(3, 0, 1));
        let row = |page: &SpectralPage, q| {
            (0..=6)
                .step_by(2)
                .map(|p| page.dim(p, q))
                .collect::<Vec<_>>()
        };
        assert_eq!(row(&e2, 0), vec![1, 2, 2, 1]);
        assert_eq!(row(&e2, 1), vec![1, 2, 2, 1]);
        let e3 = e2.next_page();
        assert_eq!(row(&e3, 0), vec![1, 1, 0, 0]);
        assert_eq!(row(&e3, 1), vec![0, 0, 1, 1]);
        for (k, v) in &e3.dims {
            assert!(*v <= e2.dims[k]);
        }
        assert!(e2.render().contains("q=1 |  1  .  2  .  2  .  1"));
    }

    #[test]
    fn pair_bound() {
        let bound = pair_upper_bound();
        assert_eq!(
            bound,
            p(&[1, 1]) * RationalPoly::from_degrees(&[1, 3, 6, 8])
        );
        assert_eq!(
            bound.to_i64_coeffs().unwrap(),
            vec![0, 1, 1, 1, 1, 0, 1, 1, 1, 1]
        );
        assert_eq!(bound.eval_at_one(), rat(8));
    }

    #[test]
    fn odd_dimensional_total_spaces_have_zero_euler_characteristic() {
        for c in [[-1, 1, 0], [1, 2, 3], [0, 0, 0], [2, -1, 5]] {
            assert!(circle_bundle_total_space(&LinearForm::from_ints(&c))
                .eval_at_minus_one()
                .is_zero());
        }
    }

    #[test]
    fn ranks_are_weyl_invariant() {
        for form in [
            LinearForm::from_ints(&[-1, 1, 0]),
            LinearForm::from_ints(&[1, 2, 5]),
            LinearForm::from_ints(&[3, 3, 0]),
        ] {
            let base = mult_ranks(&form);
            for w in all_perms(3) {
                assert_eq!(mult_ranks(&permute_form(&form, &w)), base);
            }
        }
        let form = LinearForm::from_ints(&[1, -2, 0, 4]);
        let base = mult_ranks(&form);
        for w in all_perms(4) {
            assert_eq!(mult_ranks(&permute_form(&form, &w)), base);
        }
    }

    // Exhaustive search over small integer forms on n = 3: every form that is
    // not a multiple of e_1 acts like x_2 - x_1, whatever the coefficient pattern.
    #[test]
    fn exhaustive_small_forms() {
        let range = -2i64..=2;
        for a in range.clone() {
            for b in range.clone() {
                for c in range.clone() {
                    let form = LinearForm::from_ints(&[a, b, c]);
                    let ranks = mult_ranks(&form);
                    let page = SpectralPage::for_bundle(&form).next_page();
                    if a == b && b == c {
                        assert_eq!(ranks, vec![0, 0, 0]);
                        continue;
                    }
                    assert_eq!(ranks, vec![1, 2, 1], "{form}");
                    // cokernels live only below the middle, kernels only above it
                    assert_eq!((page.dim(4, 0), page.dim(6, 0)), (0, 0));
                    assert_eq!((page.dim(0, 1), page.dim(2, 1)), (0, 0));
                }
            }
        }
    }

    #[test]
    fn form_parsing() {
        assert_eq!(
            "-1,1,0".parse::<LinearForm>().unwrap(),
            LinearForm::difference(3, 0, 1)
        );
        assert_eq!(
            "1/2, 0".parse::<LinearForm>().unwrap().0[0],
            Rational::new(1.into(), 2.into())
        );
        assert!("a,b".parse::<LinearForm>().is_err());
        assert!("".parse::<LinearForm>().is_err());
    }
}
