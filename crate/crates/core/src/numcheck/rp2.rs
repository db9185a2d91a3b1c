use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use super::sampling::{sample_su, sample_u};
use super::{frob, CMat, SamplerConfig};
use crate::liecat::{rp2_components, GroupId};

/// `u·diag(1^k, (-1)^{n-k})·u*` with its intended `+1`-eigenspace dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct InvolutionSample {
    pub matrix: CMat,
    pub plus_dim: usize,
}

/// `k` is uniform over the values allowed in `g`.
pub fn sample_involution(g: GroupId, rng: &mut impl Rng) -> InvolutionSample {
    let n = g.n();
    let allowed: Vec<usize> = (0..=n)
        .filter(|k| !g.is_special() || (n - k).is_multiple_of(2))
        .collect();
    let k = allowed[rng.random_range(0..allowed.len())];
    let u = if g.is_special() {
        sample_su(n, rng).matrix
    } else {
        sample_u(n, rng).matrix
    };
    let d: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(if i < k { 1.0 } else { -1.0 }, 0.0))
        .collect();
    let diag = CMat::from_diagonal(&nalgebra::DVector::from_vec(d));
    InvolutionSample {
        matrix: &u * diag * u.adjoint(),
        plus_dim: k,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvolutionClass {
    pub eigenvalues: Vec<f64>,
    pub eigenvalues_ok: bool,
    pub plus_dim: Option<usize>,
    /// Label of the matching component, if any.
    pub component: Option<String>,
    /// Worst of `‖g² - I‖`, `‖g*g - I‖`, `|det g - 1|` (special groups) and
    /// the eigenvalue distances to `±1`.
    pub residual: f64,
}

pub fn classify_involution(g: GroupId, m: &CMat, cfg: &SamplerConfig) -> InvolutionClass {
    let n = m.nrows();
    let id = CMat::identity(n, n);
    let mut residual = frob(&(m * m - &id)).max(frob(&(m.adjoint() * m - &id)));
    if g.is_special() {
        residual = residual.max((m.determinant() - Complex64::new(1.0, 0.0)).norm());
    }
    // a unitary involution is Hermitian
    let hermitian = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut eigenvalues: Vec<f64> = SymmetricEigen::new(hermitian)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    eigenvalues.sort_by(|a, b| b.total_cmp(a));
    let distance = |x: f64| (x - 1.0).abs().min((x + 1.0).abs());
    let eig_residual = eigenvalues.iter().map(|&x| distance(x)).fold(0.0, f64::max);
    residual = residual.max(eig_residual);
    let eigenvalues_ok = eig_residual <= cfg.tolerance;
    let plus_dim = eigenvalues_ok.then(|| eigenvalues.iter().filter(|&&x| x > 0.0).count());
    let component = plus_dim.and_then(|k| {
        rp2_components(g)
            .into_iter()
            .find(|c| c.plus_dim == k)
            .map(|c| c.label)
    });
    InvolutionClass {
        eigenvalues,
        eigenvalues_ok,
        plus_dim,
        component,
        residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn observed(g: GroupId, count: usize) -> BTreeSet<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let cfg = SamplerConfig::default();
        (0..count)
            .map(|_| {
                let s = sample_involution(g, &mut rng);
                let c = classify_involution(g, &s.matrix, &cfg);
                assert!(c.residual < 1e-9 && c.component.is_some());
                assert_eq!(c.plus_dim, Some(s.plus_dim));
                s.plus_dim
            })
            .collect()
    }

    #[test]
    fn observed_plus_dimensions() {
        assert_eq!(observed(GroupId::u(3), 200), BTreeSet::from([0, 1, 2, 3]));
        assert_eq!(observed(GroupId::su(3), 200), BTreeSet::from([1, 3]));
    }

    #[test]
    fn identity_is_top_component() {
        let c = classify_involution(
            GroupId::su(3),
            &CMat::identity(3, 3),
            &SamplerConfig::default(),
        );
        assert_eq!(c.plus_dim, Some(3));
        assert_eq!(c.component.as_deref(), Some("Gr_0(C^3)"));
    }

    #[test]
    fn non_involution_is_rejected() {
        let m = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(1.0, 0.0),
        ]));
        let c = classify_involution(GroupId::su(3), &m, &SamplerConfig::default());
        assert!(c.residual > 0.5);
    }
}
