//! Floating-point checks of the geometric inputs on explicit unitary matrices.
//!
//! Every check draws `sample_count` independent samples; sample `i` uses its
//! own ChaCha stream seeded with `seed + i`, so serial and parallel runs give
//! identical reports.

mod geometry;
mod rp2;
mod sampling;

pub use geometry::{
    common_eigenvector_check, cover_sheets_check, jacobian_columns, jacobian_rank,
    jacobian_rank_fd, numerical_rank, su_basis, CoverReport, EigenReport, RankReport,
};
pub use rp2::{classify_involution, sample_involution, InvolutionClass, InvolutionSample};
pub use sampling::{
    psi, psi_as_printed, rho, sample_stratum_a, sample_stratum_za, sample_su, sample_u, FlagTriple,
    StratumAPoint, UnitaryPoint, ZaPoint,
};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::liecat::GroupId;

pub type CMat = DMatrix<Complex64>;

/// Frobenius norm of a complex matrix.
pub fn frob(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("sample_count must be at least 1")]
    NoSamples,
    #[error("tolerance must be positive, got {0}")]
    Tolerance(f64),
    #[error("rank gap threshold must exceed 1, got {0}")]
    Gap(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub sample_count: usize,
    pub tolerance: f64,
    /// Minimum ratio between consecutive singular values that counts as a gap.
    pub rank_gap_threshold: f64,
    pub seed: u64,
}

pub const DEFAULT_SEED: u64 = 20_080_915;

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            sample_count: 100,
            tolerance: 1e-9,
            rank_gap_threshold: 1e6,
            seed: DEFAULT_SEED,
        }
    }
}

impl SamplerConfig {
    pub fn with_samples(mut self, n: usize) -> Self {
        self.sample_count = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.sample_count == 0 {
            return Err(ConfigError::NoSamples);
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(ConfigError::Tolerance(self.tolerance));
        }
        if self.rank_gap_threshold.is_nan() || self.rank_gap_threshold <= 1.0 {
            return Err(ConfigError::Gap(self.rank_gap_threshold));
        }
        Ok(())
    }

    pub fn rng_for(&self, index: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_add(index as u64))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleOutcome {
    pub verdict: Verdict,
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Serial,
    Parallel,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub samples: usize,
    pub pass: usize,
    pub fail: usize,
    pub indeterminate: usize,
    pub worst_residual: f64,
    pub seed: u64,
}

impl CheckReport {
    pub fn all_pass(&self) -> bool {
        self.fail == 0 && self.indeterminate == 0 && self.pass == self.samples
    }
}

/// Run `f` on every sample index and tally the outcomes in index order.
pub fn run_check<F>(name: &str, cfg: &SamplerConfig, exec: Execution, f: F) -> CheckReport
where
    F: Fn(&mut ChaCha8Rng) -> SampleOutcome + Sync,
{
    let eval = |i: usize| f(&mut cfg.rng_for(i));
    let outcomes: Vec<SampleOutcome> = match exec {
        Execution::Serial => (0..cfg.sample_count).map(eval).collect(),
        Execution::Parallel => (0..cfg.sample_count).into_par_iter().map(eval).collect(),
    };
    let count = |v| outcomes.iter().filter(|o| o.verdict == v).count();
    CheckReport {
        name: name.to_string(),
        samples: cfg.sample_count,
        pass: count(Verdict::Pass),
        fail: count(Verdict::Fail),
        indeterminate: count(Verdict::Indeterminate),
        worst_residual: outcomes.iter().map(|o| o.residual).fold(0.0, f64::max),
        seed: cfg.seed,
    }
}

/// Expected kernel dimension of `d(g₀² g₁⁻²)` at a generic point of `Z − A`.
pub const ZA_KERNEL_DIMENSION: usize = 9;
/// `dim G/T ×_W (T × T_2) = 6 + 2`.
pub const STRATUM_A_DIMENSION: usize = 8;

/// Relator residual, kernel dimension 9 at noncommuting samples.
pub fn dimension_check(cfg: &SamplerConfig, exec: Execution) -> CheckReport {
    run_check("dimension", cfg, exec, |rng| {
        let pt = sample_stratum_za(rng);
        let residual = pt.residual();
        let rank = jacobian_rank(&pt.g0.matrix, &pt.g1.matrix, cfg);
        let verdict = match rank.kernel_dim {
            None => Verdict::Indeterminate,
            Some(k) if k == ZA_KERNEL_DIMENSION && residual <= cfg.tolerance => Verdict::Pass,
            Some(_) => Verdict::Fail,
        };
        SampleOutcome { verdict, residual }
    })
}

/// One common eigendirection and eigenvalues `{λ, -λ, μ}` on `Z − A`.
pub fn eigen_check(cfg: &SamplerConfig, exec: Execution) -> CheckReport {
    run_check("eigen", cfg, exec, |rng| {
        let pt = sample_stratum_za(rng);
        let report = common_eigenvector_check(&pt.g0.matrix, &pt.g1.matrix, cfg);
        let verdict = match report.common_directions {
            None => Verdict::Indeterminate,
            Some(1) if report.opposite_pair && report.spectra_agree => Verdict::Pass,
            Some(_) => Verdict::Fail,
        };
        SampleOutcome {
            verdict,
            residual: report.worst_residual,
        }
    })
}

/// Two preimages under `ρ`, related by the swap `(p₁, p₂, λ) ↦ (p₂, p₁, -λ)`.
pub fn cover_check(cfg: &SamplerConfig, exec: Execution) -> CheckReport {
    run_check("cover", cfg, exec, |rng| {
        let pt = sample_stratum_za(rng);
        let report = cover_sheets_check(&pt, cfg);
        let residual = report
            .partner_residual
            .max(report.reconstruction_residual)
            .max(report.center_residual);
        let ok = report.sheets == 2
            && report.sheets_distinct
            && report.contains_known
            && residual <= cfg.tolerance;
        SampleOutcome {
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            residual,
        }
    })
}

/// Commuting pairs with `g₀² = g₁²` conjugated off the diagonal torus.
pub fn stratum_a_check(cfg: &SamplerConfig, exec: Execution) -> CheckReport {
    run_check("stratum_a", cfg, exec, |rng| {
        let pt = sample_stratum_a(rng, None);
        let residual = pt.residual();
        let kernel = jacobian_rank(&pt.g0.matrix, &pt.g1.matrix, cfg).kernel_dim;
        let verdict = match kernel {
            _ if residual > cfg.tolerance => Verdict::Fail,
            None => Verdict::Indeterminate,
            Some(k) if k >= STRATUM_A_DIMENSION => Verdict::Pass,
            Some(_) => Verdict::Fail,
        };
        SampleOutcome { verdict, residual }
    })
}

/// Random involutions have eigenvalues `±1` and land in a listed component.
pub fn rp2_check(g: GroupId, cfg: &SamplerConfig, exec: Execution) -> CheckReport {
    let name = format!(
        "rp2_{}",
        g.to_string().to_lowercase().replace(['(', ')'], "")
    );
    run_check(&name, cfg, exec, |rng| {
        let s = sample_involution(g, rng);
        let c = classify_involution(g, &s.matrix, cfg);
        let ok = c.eigenvalues_ok
            && c.residual <= cfg.tolerance
            && c.plus_dim == Some(s.plus_dim)
            && c.component.is_some();
        SampleOutcome {
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            residual: c.residual,
        }
    })
}

/// `det ψ = 1` for `ψ(p, λ) = λp₁ - λp₂ - λ⁻²p₃`, while the printed variant
/// `λp₁ - λp₂ + λ²p₃` has determinant `-λ⁴`.
pub fn psi_convention_check(cfg: &SamplerConfig, exec: Execution) -> CheckReport {
    run_check("psi_convention", cfg, exec, |rng| {
        let pt = sample_stratum_za(rng);
        let fixed = (pt.g0.matrix.determinant() - Complex64::new(1.0, 0.0)).norm();
        let printed = psi_as_printed(&pt.p, pt.lambda).determinant();
        let printed_residual = (printed + pt.lambda.powi(4)).norm();
        let printed_is_special = (printed - Complex64::new(1.0, 0.0)).norm() <= cfg.tolerance;
        let ok = fixed <= cfg.tolerance && printed_residual <= cfg.tolerance && !printed_is_special;
        SampleOutcome {
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            residual: fixed.max(printed_residual),
        }
    })
}

/// Every numerical check with its default sample count.
pub fn run_all(cfg: &SamplerConfig, exec: Execution) -> Vec<CheckReport> {
    let statistical = cfg.clone().with_samples(cfg.sample_count.max(1) * 10);
    vec![
        dimension_check(cfg, exec),
        eigen_check(cfg, exec),
        cover_check(cfg, exec),
        stratum_a_check(cfg, exec),
        psi_convention_check(cfg, exec),
        rp2_check(GroupId::u(3), &statistical, exec),
        rp2_check(GroupId::su(3), &statistical, exec),
    ]
}
