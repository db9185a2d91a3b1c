//! Betti numbers of spaces of flat `SU(3)`-bundles over the Klein bottle and
//! flat `G`-bundles over `RP²`, computed in exact arithmetic and cross-checked
//! numerically on explicit unitary matrices.

pub mod coinv;
pub mod gysin;
pub mod lesolver;
pub mod liecat;
pub mod linalg;
pub mod numcheck;
pub mod perm;
pub mod series;
