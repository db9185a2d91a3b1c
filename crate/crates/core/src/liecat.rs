//! Poincaré polynomials of the type-A compact groups and their homogeneous
//! spaces, the involution decomposition of `Hom(Z/2, G)`, and the Weyl orbits
//! on the 2-torsion of the maximal torus.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::perm::Perm;
use crate::series::{expand_ratio, gaussian_binomial, RationalPoly, TruncatedSeries};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("unrecognized group `{0}` (expected e.g. `su3` or `u2`)")]
    Parse(String),
    #[error("{0} is not a valid group: {1}")]
    Invalid(String, &'static str),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    Unitary,
    SpecialUnitary,
}

/// `U(n)` or `SU(n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GroupId {
    family: Family,
    n: usize,
}

impl GroupId {
    pub fn new(family: Family, n: usize) -> Result<Self, GroupError> {
        let id = GroupId { family, n };
        match family {
            _ if n == 0 => Err(GroupError::Invalid(
                id.to_string(),
                "matrix size must be at least 1",
            )),
            Family::SpecialUnitary if n < 2 => {
                Err(GroupError::Invalid(id.to_string(), "SU(n) requires n >= 2"))
            }
            _ => Ok(id),
        }
    }

    pub fn su(n: usize) -> Self {
        Self::new(Family::SpecialUnitary, n).expect("SU(n) needs n >= 2")
    }

    pub fn u(n: usize) -> Self {
        Self::new(Family::Unitary, n).expect("U(n) needs n >= 1")
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Matrix size.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_special(&self) -> bool {
        self.family == Family::SpecialUnitary
    }

    /// Rank of the maximal torus.
    pub fn rank(&self) -> usize {
        match self.family {
            Family::Unitary => self.n,
            Family::SpecialUnitary => self.n - 1,
        }
    }

    /// Order of the Weyl group `S_n`.
    pub fn weyl_order(&self) -> usize {
        (1..=self.n).product()
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Unitary => write!(f, "U({})", self.n),
            Family::SpecialUnitary => write!(f, "SU({})", self.n),
        }
    }
}

impl FromStr for GroupId {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        let (family, digits) = if let Some(rest) = lower.strip_prefix("su") {
            (Family::SpecialUnitary, rest)
        } else if let Some(rest) = lower.strip_prefix('u') {
            (Family::Unitary, rest)
        } else {
            return Err(GroupError::Parse(s.to_string()));
        };
        let digits = digits.trim_start_matches('(').trim_end_matches(')');
        let n = digits
            .parse()
            .map_err(|_| GroupError::Parse(s.to_string()))?;
        GroupId::new(family, n)
    }
}

/// Poincaré polynomial of the group: an exterior algebra on generators of
/// degrees `1, 3, .., 2n-1` (`U(n)`) or `3, .., 2n-1` (`SU(n)`).
pub fn pt_group(g: GroupId) -> RationalPoly {
    let first = if g.is_special() { 2 } else { 1 };
    (first..=g.n)
        .map(|i| RationalPoly::from_degrees(&[0, 2 * i - 1]))
        .product()
}

/// `1 / ∏ (1 - t^{2i})` over the same index range as [`pt_group`].
pub fn pt_classifying(g: GroupId, order: usize) -> TruncatedSeries {
    let first = if g.is_special() { 2 } else { 1 };
    let factors: Vec<RationalPoly> = (first..=g.n)
        .map(|i| RationalPoly::one() - RationalPoly::t_pow(2 * i))
        .collect();
    expand_ratio(&RationalPoly::one(), &factors, order).expect("factors 1 - t^k are invertible")
}

/// Full flag variety of `C^n`: `∏_{i=2..n} (1 + t² + .. + t^{2(i-1)})`.
pub fn pt_full_flag(n: usize) -> RationalPoly {
    (2..=n)
        .map(|i| {
            let degrees: Vec<usize> = (0..i).map(|j| 2 * j).collect();
            RationalPoly::from_degrees(&degrees)
        })
        .product()
}

pub fn pt_torus(rank: usize) -> RationalPoly {
    RationalPoly::from_ints(&[1, 1]).pow(rank as u32)
}

/// One conjugacy class of involutions `g² = 1`, identified with a Grassmannian
/// by choosing one of the two eigenspaces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Rp2Component {
    /// `Gr_k(C^n)` with `k` the dimension of the `-1` eigenspace.
    pub label: String,
    pub minus_dim: usize,
    pub plus_dim: usize,
    pub poincare: RationalPoly,
}

/// Components of `{g ∈ G : g² = 1}`, one per admissible `-1` eigenspace
/// dimension: every `k` for `U(n)`, even `k` for `SU(n)`.
pub fn rp2_components(g: GroupId) -> Vec<Rp2Component> {
    (0..=g.n)
        .filter(|k| !g.is_special() || k % 2 == 0)
        .map(|k| Rp2Component {
            label: format!("Gr_{k}(C^{})", g.n),
            minus_dim: k,
            plus_dim: g.n - k,
            poincare: gaussian_binomial(g.n, k).expect("k <= n"),
        })
        .collect()
}

pub fn rp2_total(g: GroupId) -> RationalPoly {
    rp2_components(g).into_iter().map(|c| c.poincare).sum()
}

/// Diagonal torus element with entries `±1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TorsionPoint {
    pub signs: Vec<i8>,
}

impl TorsionPoint {
    pub fn minus_count(&self) -> usize {
        self.signs.iter().filter(|&&s| s < 0).count()
    }

    pub fn permuted(&self, w: &Perm) -> TorsionPoint {
        let mut signs = vec![1; self.signs.len()];
        for (i, &s) in self.signs.iter().enumerate() {
            signs[w.image(i)] = s;
        }
        TorsionPoint { signs }
    }
}

/// All square roots of the identity in the diagonal maximal torus.
pub fn torus_two_torsion(g: GroupId) -> Vec<TorsionPoint> {
    (0u32..(1 << g.n))
        .map(|mask| TorsionPoint {
            signs: (0..g.n)
                .map(|i| if mask & (1 << i) != 0 { -1 } else { 1 })
                .collect(),
        })
        .filter(|p| !g.is_special() || p.minus_count() % 2 == 0)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Rp2FormalityReport {
    pub group: String,
    pub components: Vec<Rp2Component>,
    pub all_even: bool,
    pub torus_root_count: usize,
    pub expected_root_count: usize,
    pub pass: bool,
}

/// Components with vanishing odd cohomology are equivariantly formal; the torus
/// must also contain exactly `2^rank` square roots of the identity.
pub fn rp2_formality_check(g: GroupId) -> Rp2FormalityReport {
    let components = rp2_components(g);
    let all_even = components.iter().all(|c| !c.poincare.has_odd_terms());
    let torus_root_count = torus_two_torsion(g).len();
    let expected_root_count = 1 << g.rank();
    Rp2FormalityReport {
        group: g.to_string(),
        pass: all_even && torus_root_count == expected_root_count,
        components,
        all_even,
        torus_root_count,
        expected_root_count,
    }
}

/// An `S_n`-orbit on the torus 2-torsion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeylOrbit {
    pub representative: TorsionPoint,
    pub orbit_size: usize,
    pub stabilizer_order: usize,
    pub stabilizer_generators: Vec<Perm>,
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Orbits are classified by the number `m` of `-1` entries; the representative
/// puts them first, so its stabilizer is `S_m × S_{n-m}`, generated by adjacent
/// transpositions inside each block.
pub fn t2_orbits(g: GroupId) -> Vec<WeylOrbit> {
    let n = g.n;
    (0..=n)
        .filter(|m| !g.is_special() || m % 2 == 0)
        .map(|m| {
            let signs = (0..n).map(|i| if i < m { -1 } else { 1 }).collect();
            let stabilizer_generators = (0..n.saturating_sub(1))
                .filter(|&i| i + 1 != m)
                .map(|i| Perm::transposition(n, i, i + 1))
                .collect();
            let stabilizer_order = factorial(m) * factorial(n - m);
            WeylOrbit {
                representative: TorsionPoint { signs },
                orbit_size: factorial(n) / stabilizer_order,
                stabilizer_order,
                stabilizer_generators,
            }
        })
        .collect()
}
