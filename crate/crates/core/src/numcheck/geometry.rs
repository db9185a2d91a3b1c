use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use serde::Serialize;

use super::sampling::{psi, FlagTriple, ZaPoint};
use super::{frob, CMat, SamplerConfig};

/// Basis of `su(n)`: `E_ab - E_ba`, `i(E_ab + E_ba)` for `a < b`, and
/// `i(E_aa - E_{a+1,a+1})`.
pub fn su_basis(n: usize) -> Vec<CMat> {
    let i = Complex64::i();
    let mut basis = Vec::with_capacity(n * n - 1);
    for a in 0..n {
        for b in a + 1..n {
            let mut m = CMat::zeros(n, n);
            m[(a, b)] = Complex64::new(1.0, 0.0);
            m[(b, a)] = Complex64::new(-1.0, 0.0);
            basis.push(m);
            let mut m = CMat::zeros(n, n);
            m[(a, b)] = i;
            m[(b, a)] = i;
            basis.push(m);
        }
    }
    for a in 0..n - 1 {
        let mut m = CMat::zeros(n, n);
        m[(a, a)] = i;
        m[(a + 1, a + 1)] = -i;
        basis.push(m);
    }
    basis
}

fn flatten(m: &CMat) -> Vec<f64> {
    m.iter().flat_map(|z| [z.re, z.im]).collect()
}

fn real_matrix(columns: &[CMat]) -> DMatrix<f64> {
    let cols: Vec<Vec<f64>> = columns.iter().map(flatten).collect();
    DMatrix::from_fn(cols[0].len(), cols.len(), |r, c| cols[c][r])
}

/// Rank from singular values: values below a round-off floor are clamped to
/// it, and the rank is accepted only if exactly one consecutive ratio (the
/// floor counting as a final entry) exceeds `gap`.
pub fn numerical_rank(singular_values: &[f64], dims: usize, gap: f64) -> Option<usize> {
    let mut s: Vec<f64> = singular_values.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    let Some(&top) = s.first() else {
        return Some(0);
    };
    if top == 0.0 {
        return Some(0);
    }
    let floor = top * f64::EPSILON * 8.0 * dims.max(1) as f64;
    let mut clamped: Vec<f64> = s.iter().map(|&x| x.max(floor)).collect();
    clamped.push(floor);
    let gaps: Vec<usize> = (0..clamped.len() - 1)
        .filter(|&k| clamped[k] / clamped[k + 1] > gap)
        .collect();
    match gaps.as_slice() {
        [k] => Some(k + 1),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankReport {
    pub singular_values: Vec<f64>,
    pub rank: Option<usize>,
    /// `2(n² - 1) - rank`, the dimension of the kernel on `su(n)²`.
    pub kernel_dim: Option<usize>,
}

impl RankReport {
    fn from_matrix(m: DMatrix<f64>, cfg: &SamplerConfig) -> Self {
        let dims = m.nrows().max(m.ncols());
        let domain = m.ncols();
        let mut singular_values: Vec<f64> = m
            .svd(false, false)
            .singular_values
            .iter()
            .copied()
            .collect();
        singular_values.sort_by(|a, b| b.total_cmp(a));
        let rank = numerical_rank(&singular_values, dims, cfg.rank_gap_threshold);
        RankReport {
            singular_values,
            rank,
            kernel_dim: rank.map(|r| domain - r),
        }
    }
}

fn inverse_unitary(g: &CMat) -> CMat {
    g.adjoint()
}

/// Differential of `F(g₀, g₁) = g₀² g₁⁻²` in the right-translation
/// trivialization `(X, Y) ↦ (e^{tX}g₀, e^{tY}g₁)`:
/// `dF = (Xg₀² + g₀Xg₀)g₁⁻² - g₀²(g₁⁻¹Yg₁⁻¹ + g₁⁻²Y)`.
pub fn jacobian_columns(g0: &CMat, g1: &CMat) -> Vec<CMat> {
    let n = g0.nrows();
    let h = inverse_unitary(g1);
    let g0sq = g0 * g0;
    let hsq = &h * &h;
    let basis = su_basis(n);
    let mut cols = Vec::with_capacity(2 * basis.len());
    for x in &basis {
        cols.push((x * &g0sq + g0 * x * g0) * &hsq);
    }
    for y in &basis {
        cols.push(-(&g0sq * (&h * y * &h + &hsq * y)));
    }
    cols
}

pub fn jacobian_rank(g0: &CMat, g1: &CMat, cfg: &SamplerConfig) -> RankReport {
    RankReport::from_matrix(real_matrix(&jacobian_columns(g0, g1)), cfg)
}

fn cayley(x: &CMat, h: f64) -> CMat {
    let n = x.nrows();
    let id = CMat::identity(n, n);
    let half = x * Complex64::new(h / 2.0, 0.0);
    let inv = (&id - &half)
        .try_inverse()
        .expect("Cayley transform of a small skew matrix");
    inv * (&id + &half)
}

/// Central differences along Cayley curves, which stay exactly unitary.
pub fn jacobian_rank_fd(g0: &CMat, g1: &CMat, step: f64, cfg: &SamplerConfig) -> RankReport {
    let f = |a: &CMat, b: &CMat| {
        let bi = inverse_unitary(b);
        a * a * &bi * &bi
    };
    let basis = su_basis(g0.nrows());
    let scale = Complex64::new(1.0 / (2.0 * step), 0.0);
    let mut cols = Vec::with_capacity(2 * basis.len());
    for x in &basis {
        let plus = f(&(cayley(x, step) * g0), g1);
        let minus = f(&(cayley(x, -step) * g0), g1);
        cols.push((plus - minus) * scale);
    }
    for y in &basis {
        let plus = f(g0, &(cayley(y, step) * g1));
        let minus = f(g0, &(cayley(y, -step) * g1));
        cols.push((plus - minus) * scale);
    }
    RankReport::from_matrix(real_matrix(&cols), cfg)
}

/// Eigenpairs of a normal matrix from its complex Schur form.
fn eigenpairs(g: &CMat) -> Vec<(Complex64, nalgebra::DVector<Complex64>)> {
    let (q, t) = Schur::new(g.clone()).unpack();
    (0..g.nrows())
        .map(|j| (t[(j, j)], q.column(j).into_owned()))
        .collect()
}

fn min_separation(values: &[Complex64]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            best = best.min((values[i] - values[j]).norm());
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenReport {
    pub eigenvalues0: Vec<(f64, f64)>,
    pub eigenvalues1: Vec<(f64, f64)>,
    /// `None` when eigenvalues nearly collide or a residual is inconclusive.
    pub common_directions: Option<usize>,
    /// The eigenvalues of `g₀` off the common direction sum to zero.
    pub opposite_pair: bool,
    pub spectra_agree: bool,
    pub worst_residual: f64,
}

/// Counts eigenvectors of `g₀` that are eigenvectors of `g₁` with the same
/// eigenvalue. Residuals between `tol` and `√tol` are treated as ambiguous.
pub fn common_eigenvector_check(g0: &CMat, g1: &CMat, cfg: &SamplerConfig) -> EigenReport {
    let tol = cfg.tolerance;
    let loose = tol.sqrt();
    let pairs0 = eigenpairs(g0);
    let pairs1 = eigenpairs(g1);
    let e0: Vec<Complex64> = pairs0.iter().map(|p| p.0).collect();
    let e1: Vec<Complex64> = pairs1.iter().map(|p| p.0).collect();

    let mut worst: f64 = 0.0;
    for (g, pairs) in [(g0, &pairs0), (g1, &pairs1)] {
        for (e, v) in pairs {
            worst = worst.max((g * v - v * *e).norm());
        }
    }

    let mut ambiguous = min_separation(&e0) < loose;
    let mut common = Vec::new();
    for (k, (e, v)) in pairs0.iter().enumerate() {
        let r = (g1 * v - v * *e).norm();
        if r <= tol {
            common.push(k);
            worst = worst.max(r);
        } else if r < loose {
            ambiguous = true;
        }
    }

    let opposite_pair = match common.as_slice() {
        [c] => {
            let rest: Vec<Complex64> = (0..e0.len()).filter(|k| k != c).map(|k| e0[k]).collect();
            rest.len() == 2 && (rest[0] + rest[1]).norm() <= tol
        }
        _ => false,
    };

    let mut unmatched = e1.clone();
    let spectra_agree =
        e0.iter().all(
            |e| match unmatched.iter().position(|f| (e - f).norm() <= tol) {
                Some(i) => {
                    unmatched.swap_remove(i);
                    true
                }
                None => false,
            },
        );

    let pairs = |v: &[Complex64]| v.iter().map(|z| (z.re, z.im)).collect();
    EigenReport {
        eigenvalues0: pairs(&e0),
        eigenvalues1: pairs(&e1),
        common_directions: if ambiguous { None } else { Some(common.len()) },
        opposite_pair,
        spectra_agree,
        worst_residual: worst,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverReport {
    /// Number of `((p, q), λ)` with `ρ((p, q), λ) = (g₀, g₁)` and `p₃ = q₃`.
    pub sheets: usize,
    pub sheets_distinct: bool,
    /// One of the recovered sheets is the construction's own parameter.
    pub contains_known: bool,
    /// `‖ρ((p', q'), -λ) - (g₀, g₁)‖` for the swap `p₁ ↔ p₂`, `q₁ ↔ q₂`.
    pub partner_residual: f64,
    pub reconstruction_residual: f64,
    /// `‖γψ(p, λ) - ψ(p, γλ)‖` for a primitive cube root of unity `γ`.
    pub center_residual: f64,
}

fn projector(v: &nalgebra::DVector<Complex64>) -> CMat {
    v * v.adjoint()
}

fn flag_distance(a: &FlagTriple, b: &FlagTriple) -> f64 {
    (0..3)
        .map(|i| frob(&(&a.projectors[i] - &b.projectors[i])))
        .fold(0.0, f64::max)
}

fn pair_distance(g: (&CMat, &CMat), h: (&CMat, &CMat)) -> f64 {
    frob(&(g.0 - h.0)).max(frob(&(g.1 - h.1)))
}

/// Enumerates every preimage of the sampled pair under `ρ` by reading the
/// flags off the eigenvectors.
pub fn cover_sheets_check(pt: &ZaPoint, cfg: &SamplerConfig) -> CoverReport {
    let tol = cfg.tolerance;
    let loose = tol.sqrt();
    let (g0, g1) = (&pt.g0.matrix, &pt.g1.matrix);
    let pairs0 = eigenpairs(g0);
    let pairs1 = eigenpairs(g1);
    let find1 = |target: Complex64| pairs1.iter().position(|(f, _)| (f - target).norm() <= tol);

    let mut sheets: Vec<(FlagTriple, FlagTriple, Complex64)> = Vec::new();
    for perm in crate::perm::all_perms(3) {
        let [a, b, c] = [perm.image(0), perm.image(1), perm.image(2)];
        let lambda = pairs0[a].0;
        let targets = [lambda, -lambda, -lambda.powi(-2)];
        if (pairs0[b].0 - targets[1]).norm() > tol || (pairs0[c].0 - targets[2]).norm() > tol {
            continue;
        }
        let Some(js) = targets
            .iter()
            .map(|&t| find1(t))
            .collect::<Option<Vec<_>>>()
        else {
            continue;
        };
        let p = FlagTriple {
            projectors: [
                projector(&pairs0[a].1),
                projector(&pairs0[b].1),
                projector(&pairs0[c].1),
            ],
        };
        let q = FlagTriple {
            projectors: [
                projector(&pairs1[js[0]].1),
                projector(&pairs1[js[1]].1),
                projector(&pairs1[js[2]].1),
            ],
        };
        if frob(&(&p.projectors[2] - &q.projectors[2])) > loose {
            continue;
        }
        sheets.push((p, q, lambda));
    }

    let mut sheets_distinct = true;
    for i in 0..sheets.len() {
        for j in i + 1..sheets.len() {
            if flag_distance(&sheets[i].0, &sheets[j].0) <= loose {
                sheets_distinct = false;
            }
        }
    }
    let contains_known = sheets.iter().any(|(p, q, l)| {
        (l - pt.lambda).norm() <= loose
            && flag_distance(p, &pt.p) <= loose
            && flag_distance(q, &pt.q) <= loose
    });
    let reconstruction_residual = sheets
        .iter()
        .map(|(p, q, l)| pair_distance((&psi(p, *l), &psi(q, *l)), (g0, g1)))
        .fold(0.0, f64::max);

    let partner = (
        psi(&pt.p.swapped(), -pt.lambda),
        psi(&pt.q.swapped(), -pt.lambda),
    );
    let partner_residual = pair_distance((&partner.0, &partner.1), (g0, g1));

    let gamma = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let center_residual = frob(&(psi(&pt.p, pt.lambda) * gamma - psi(&pt.p, gamma * pt.lambda)));

    CoverReport {
        sheets: sheets.len(),
        sheets_distinct,
        contains_known,
        partner_residual,
        reconstruction_residual,
        center_residual,
    }
}

#[cfg(test)]
mod tests {
    use super::super::sampling::{sample_stratum_a, sample_stratum_za, sample_su};
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> SamplerConfig {
        SamplerConfig::default()
    }

    #[test]
    fn rank_rule() {
        assert_eq!(numerical_rank(&[], 3, 1e6), Some(0));
        assert_eq!(numerical_rank(&[0.0, 0.0], 3, 1e6), Some(0));
        assert_eq!(numerical_rank(&[2.0, 1.0, 1e-16, 0.0], 4, 1e6), Some(2));
        assert_eq!(numerical_rank(&[2.0, 1.0, 0.5], 3, 1e6), Some(3));
        // a singular value halfway down is neither signal nor noise
        assert_eq!(numerical_rank(&[1.0, 1e-7, 1e-15], 3, 1e6), None);
        assert_eq!(numerical_rank(&[1.0, 1e-3], 2, 1e6), Some(2));
    }

    #[test]
    fn basis_is_traceless_skew() {
        let b = su_basis(3);
        assert_eq!(b.len(), 8);
        for m in &b {
            assert!(frob(&(m + m.adjoint())) < 1e-15);
            assert!(m.trace().norm() < 1e-15);
        }
        assert_eq!(real_matrix(&b).rank(1e-12), 8);
    }

    #[test]
    fn identity_pair_kernel() {
        // dF = 2X - 2Y at (I, I), so the kernel is the diagonal copy of su(3)
        let id = CMat::identity(3, 3);
        let r = jacobian_rank(&id, &id, &cfg());
        assert_eq!(r.rank, Some(8));
        assert_eq!(r.kernel_dim, Some(8));
    }

    #[test]
    fn za_kernel_is_nine_and_fd_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let pt = sample_stratum_za(&mut rng);
            let exact = jacobian_rank(&pt.g0.matrix, &pt.g1.matrix, &cfg());
            assert_eq!(exact.kernel_dim, Some(9), "{:?}", exact.singular_values);
            let fd = jacobian_rank_fd(&pt.g0.matrix, &pt.g1.matrix, 1e-5, &cfg());
            for (a, b) in exact.singular_values.iter().zip(&fd.singular_values) {
                assert!((a - b).abs() < 1e-7, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn rank_is_conjugation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let pt = sample_stratum_za(&mut rng);
            let u = sample_su(3, &mut rng).matrix;
            let conj = |g: &CMat| &u * g * u.adjoint();
            let a = jacobian_rank(&pt.g0.matrix, &pt.g1.matrix, &cfg());
            let b = jacobian_rank(&conj(&pt.g0.matrix), &conj(&pt.g1.matrix), &cfg());
            assert_eq!(a.kernel_dim, b.kernel_dim);
        }
    }

    #[test]
    fn stratum_a_kernel_at_least_eight() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let pt = sample_stratum_a(&mut rng, None);
            let r = jacobian_rank(&pt.g0.matrix, &pt.g1.matrix, &cfg());
            assert!(r.kernel_dim.unwrap() >= 8, "{:?}", r);
        }
    }

    #[test]
    fn commuting_pair_common_directions() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let pt = sample_stratum_a(
            &mut rng,
            Some(crate::liecat::TorsionPoint {
                signs: vec![-1, -1, 1],
            }),
        );
        let r = common_eigenvector_check(&pt.g0.matrix, &pt.g1.matrix, &cfg());
        // τ flips two eigenvalues, so only one eigenvalue is shared as well
        assert_eq!(r.common_directions, Some(1));
        let pt = sample_stratum_a(
            &mut rng,
            Some(crate::liecat::TorsionPoint {
                signs: vec![1, 1, 1],
            }),
        );
        let r = common_eigenvector_check(&pt.g0.matrix, &pt.g1.matrix, &cfg());
        assert_eq!(r.common_directions, Some(3));
    }

    #[test]
    fn za_eigen_structure_and_sheets() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..50 {
            let pt = sample_stratum_za(&mut rng);
            let e = common_eigenvector_check(&pt.g0.matrix, &pt.g1.matrix, &cfg());
            assert_eq!(e.common_directions, Some(1));
            assert!(e.opposite_pair && e.spectra_agree);
            let c = cover_sheets_check(&pt, &cfg());
            assert_eq!(c.sheets, 2);
            assert!(c.sheets_distinct && c.contains_known);
            assert!(c.partner_residual < 1e-10);
            assert!(c.reconstruction_residual < 1e-9);
            assert!(c.center_residual < 1e-12);
        }
    }
}
