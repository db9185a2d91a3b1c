use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{frob, CMat};
use crate::liecat::TorsionPoint;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A unitary matrix, tagged with whether it should have determinant one.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryPoint {
    pub matrix: CMat,
    pub special: bool,
}

impl UnitaryPoint {
    pub fn new(matrix: CMat, special: bool) -> Self {
        UnitaryPoint { matrix, special }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `‖U*U - I‖_F`.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.dim();
        frob(&(self.matrix.adjoint() * &self.matrix - CMat::identity(n, n)))
    }

    /// `|det U - 1|`, or 0 when the point is not tagged special.
    pub fn det_residual(&self) -> f64 {
        if self.special {
            (self.matrix.determinant() - ONE).norm()
        } else {
            0.0
        }
    }

    pub fn residual(&self) -> f64 {
        self.unitarity_residual().max(self.det_residual())
    }
}

/// Three mutually orthogonal rank-one projectors summing to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct FlagTriple {
    pub projectors: [CMat; 3],
}

impl FlagTriple {
    /// Projectors onto the columns of a unitary frame.
    pub fn from_frame(frame: &CMat) -> Self {
        let col = |j: usize| {
            let v = frame.column(j);
            v * v.adjoint()
        };
        FlagTriple {
            projectors: [col(0), col(1), col(2)],
        }
    }

    pub fn swapped(&self) -> Self {
        let [a, b, c] = self.projectors.clone();
        FlagTriple {
            projectors: [b, a, c],
        }
    }

    /// Worst violation of `p_i p_j = δ_ij p_i` and `Σ p_i = I`.
    pub fn residual(&self) -> f64 {
        let p = &self.projectors;
        let mut worst = frob(&(&p[0] + &p[1] + &p[2] - CMat::identity(3, 3)));
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j {
                    p[i].clone()
                } else {
                    CMat::zeros(3, 3)
                };
                worst = worst.max(frob(&(&p[i] * &p[j] - target)));
            }
        }
        worst
    }
}

fn gaussian(n: usize, rng: &mut impl Rng) -> CMat {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * scale, im * scale)
    })
}

/// Haar-random element of `U(n)`: QR of a complex Gaussian matrix with the
/// phases of `diag R` moved into `Q`.
pub fn sample_u(n: usize, rng: &mut impl Rng) -> UnitaryPoint {
    let (mut q, r) = gaussian(n, rng).qr().unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    UnitaryPoint::new(q, false)
}

/// Haar-random element of `SU(n)`. Dividing a Haar unitary by a root of its
/// determinant commutes with left multiplication by `SU(n)`.
pub fn sample_su(n: usize, rng: &mut impl Rng) -> UnitaryPoint {
    assert!(n >= 2, "SU(n) sampling needs n >= 2");
    let mut u = sample_u(n, rng).matrix;
    let root = u.determinant().powf(1.0 / n as f64);
    u /= root;
    UnitaryPoint::new(u, true)
}

fn diag(entries: &[Complex64]) -> CMat {
    CMat::from_diagonal(&nalgebra::DVector::from_column_slice(entries))
}

fn unit_phase(rng: &mut impl Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI))
}

/// A commuting pair on the stratum `A`.
#[derive(Clone, Debug)]
pub struct StratumAPoint {
    pub g0: UnitaryPoint,
    pub g1: UnitaryPoint,
    /// `t₀⁻¹t₁`, the 2-torsion point distinguishing the component.
    pub torsion: TorsionPoint,
}

impl StratumAPoint {
    pub fn relator_residual(&self) -> f64 {
        let (a, b) = (&self.g0.matrix, &self.g1.matrix);
        frob(&(a * a - b * b))
    }

    pub fn commutator_residual(&self) -> f64 {
        let (a, b) = (&self.g0.matrix, &self.g1.matrix);
        frob(&(a * b - b * a))
    }

    pub fn residual(&self) -> f64 {
        self.relator_residual()
            .max(self.commutator_residual())
            .max(self.g0.residual())
            .max(self.g1.residual())
    }
}

/// Conjugate a random diagonal pair `(t, t·τ)` in `SU(3)`, `τ ∈ T₂`, by a
/// Haar element. `τ` is drawn uniformly unless given.
pub fn sample_stratum_a(rng: &mut impl Rng, torsion: Option<TorsionPoint>) -> StratumAPoint {
    let torsion = torsion.unwrap_or_else(|| {
        let all = crate::liecat::torus_two_torsion(crate::liecat::GroupId::su(3));
        all[rng.random_range(0..all.len())].clone()
    });
    let a = unit_phase(rng);
    let b = unit_phase(rng);
    let t0 = [a, b, (a * b).inv()];
    let t1: Vec<Complex64> = t0
        .iter()
        .zip(&torsion.signs)
        .map(|(z, &s)| z * s as f64)
        .collect();
    let u = sample_su(3, rng).matrix;
    let conj = |d: &[Complex64]| &u * diag(d) * u.adjoint();
    StratumAPoint {
        g0: UnitaryPoint::new(conj(&t0), true),
        g1: UnitaryPoint::new(conj(&t1), true),
        torsion,
    }
}

/// `ψ(p, λ) = λp₁ - λp₂ - λ⁻²p₃`, which has determinant one.
pub fn psi(p: &FlagTriple, lambda: Complex64) -> CMat {
    let [p1, p2, p3] = &p.projectors;
    (p1 - p2) * lambda - p3 * lambda.powi(-2)
}

/// `λp₁ - λp₂ + λ²p₃`, kept only to compare determinants.
pub fn psi_as_printed(p: &FlagTriple, lambda: Complex64) -> CMat {
    let [p1, p2, p3] = &p.projectors;
    (p1 - p2) * lambda + p3 * lambda.powi(2)
}

pub fn rho(p: &FlagTriple, q: &FlagTriple, lambda: Complex64) -> (CMat, CMat) {
    (psi(p, lambda), psi(q, lambda))
}

/// A noncommuting solution of `g₀² = g₁²` together with its parameters.
#[derive(Clone, Debug)]
pub struct ZaPoint {
    pub g0: UnitaryPoint,
    pub g1: UnitaryPoint,
    pub p: FlagTriple,
    pub q: FlagTriple,
    pub lambda: Complex64,
}

impl ZaPoint {
    pub fn relator_residual(&self) -> f64 {
        let (a, b) = (&self.g0.matrix, &self.g1.matrix);
        frob(&(a * a - b * b))
    }

    pub fn commutator_norm(&self) -> f64 {
        let (a, b) = (&self.g0.matrix, &self.g1.matrix);
        frob(&(a * b - b * a))
    }

    pub fn residual(&self) -> f64 {
        self.relator_residual()
            .max(self.g0.residual())
            .max(self.g1.residual())
            .max(self.p.residual())
            .max(self.q.residual())
    }
}

/// `λ` is kept this far (in angle) from the sixth roots of unity, where two
/// of `λ, -λ, -λ⁻²` collide.
const LAMBDA_MARGIN: f64 = 0.05;
/// Resample when `‖[p₁, q₁]‖` falls below this.
const MIN_COMMUTATOR: f64 = 1e-2;

fn sample_lambda(rng: &mut impl Rng) -> Complex64 {
    loop {
        let theta: f64 = rng.random_range(0.0..2.0 * PI);
        let sixth = PI / 3.0;
        let off = (theta / sixth - (theta / sixth).round()).abs() * sixth;
        if off > LAMBDA_MARGIN {
            return Complex64::from_polar(1.0, theta);
        }
    }
}

/// `ρ((p, q), λ)` for random flags with `p₃ = q₃` and `[p₁, q₁] ≠ 0`.
pub fn sample_stratum_za(rng: &mut impl Rng) -> ZaPoint {
    let frame = sample_su(3, rng).matrix;
    let p = FlagTriple::from_frame(&frame);
    let (u1, u2) = (frame.column(0).into_owned(), frame.column(1).into_owned());
    let q = loop {
        // random unit vector in span(u1, u2) and its complement there
        let w = gaussian(2, rng);
        let (a, b) = (w[(0, 0)], w[(1, 0)]);
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (a, b) = (a / norm, b / norm);
        let v1 = &u1 * a + &u2 * b;
        let v2 = &u1 * (-b.conj()) + &u2 * a.conj();
        let mut qframe = frame.clone();
        qframe.set_column(0, &v1);
        qframe.set_column(1, &v2);
        let q = FlagTriple::from_frame(&qframe);
        let (p1, q1) = (&p.projectors[0], &q.projectors[0]);
        if frob(&(p1 * q1 - q1 * p1)) > MIN_COMMUTATOR {
            break q;
        }
    };
    let lambda = sample_lambda(rng);
    let (g0, g1) = rho(&p, &q, lambda);
    ZaPoint {
        g0: UnitaryPoint::new(g0, true),
        g1: UnitaryPoint::new(g1, true),
        p,
        q,
        lambda,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn haar_samples_are_unitary_and_deterministic() {
        let mut r = rng(1);
        for n in 2..6 {
            let u = sample_su(n, &mut r);
            assert!(u.residual() < 1e-12, "n={n} residual {}", u.residual());
            assert!(sample_u(n, &mut r).unitarity_residual() < 1e-12);
        }
        assert_eq!(sample_su(3, &mut rng(9)), sample_su(3, &mut rng(9)));
    }

    // E|tr g| over SU(3) by the Weyl integration formula on a periodic grid.
    fn weyl_abs_trace(grid: usize) -> (f64, f64) {
        let h = 2.0 * PI / grid as f64;
        let (mut first, mut second) = (0.0, 0.0);
        for i in 0..grid {
            for j in 0..grid {
                let z = [
                    Complex64::from_polar(1.0, i as f64 * h),
                    Complex64::from_polar(1.0, j as f64 * h),
                    Complex64::from_polar(1.0, -((i + j) as f64) * h),
                ];
                let mut vdm = 1.0;
                for a in 0..3 {
                    for b in a + 1..3 {
                        vdm *= (z[a] - z[b]).norm_sqr();
                    }
                }
                let tr = (z[0] + z[1] + z[2]).norm();
                first += tr * vdm;
                second += tr * tr * vdm;
            }
        }
        let norm = 6.0 * (grid * grid) as f64;
        (first / norm, second / norm)
    }

    #[test]
    fn weyl_oracle_normalization() {
        let (_, second) = weyl_abs_trace(120);
        assert!((second - 1.0).abs() < 1e-10);
    }

    #[test]
    fn haar_mean_abs_trace_matches_weyl_integral() {
        let (expected, second) = weyl_abs_trace(600);
        let samples = 10_000;
        let mut r = rng(42);
        let traces: Vec<f64> = (0..samples)
            .map(|_| sample_su(3, &mut r).matrix.trace().norm())
            .collect();
        let mean = traces.iter().sum::<f64>() / samples as f64;
        let sd = (second - expected * expected).sqrt();
        let se = sd / (samples as f64).sqrt();
        assert!(
            (mean - expected).abs() < 4.0 * se,
            "mean {mean}, expected {expected} ± {se}"
        );
    }

    #[test]
    fn stratum_a_construction() {
        let mut r = rng(5);
        for _ in 0..50 {
            let pt = sample_stratum_a(&mut r, None);
            assert!(pt.residual() < 1e-9);
        }
        let tau = TorsionPoint {
            signs: vec![-1, -1, 1],
        };
        let pt = sample_stratum_a(&mut r, Some(tau.clone()));
        assert_eq!(pt.torsion, tau);
        // g₀⁻¹g₁ is conjugate to diag(-1,-1,1)
        let d = pt.g0.matrix.adjoint() * &pt.g1.matrix;
        assert!((d.trace() - Complex64::new(-1.0, 0.0)).norm() < 1e-10);
        let same = sample_stratum_a(
            &mut r,
            Some(TorsionPoint {
                signs: vec![1, 1, 1],
            }),
        );
        assert!(frob(&(&same.g0.matrix - &same.g1.matrix)) < 1e-12);
    }

    #[test]
    fn za_construction() {
        let mut r = rng(7);
        for _ in 0..100 {
            let pt = sample_stratum_za(&mut r);
            assert!(pt.residual() < 1e-9, "residual {}", pt.residual());
            assert!(pt.commutator_norm() > 1e-3);
            assert!((pt.g0.matrix.determinant() - ONE).norm() < 1e-12);
        }
    }

    #[test]
    fn printed_psi_is_not_special() {
        let mut r = rng(3);
        let pt = sample_stratum_za(&mut r);
        let det = psi_as_printed(&pt.p, pt.lambda).determinant();
        assert!((det + pt.lambda.powi(4)).norm() < 1e-12);
        assert!((det - ONE).norm() > 1e-3);
    }
}
