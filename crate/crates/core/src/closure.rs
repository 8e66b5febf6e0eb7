//! Brute-force Lie-closure oracle.
//!
//! The real Lie algebra generated by Hermitian seeds under `i[·,·]` is
//! spanned by right-nested brackets `i[s₁, i[s₂, … s_k]]` of the seeds, so
//! each round brackets the orthonormalized seeds against the elements the
//! previous round added. A round that adds nothing certifies closure.
//!
//! Brackets of a round are computed in parallel; insertion into the basis is
//! sequential in a fixed order, so results do not depend on the thread count.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{
    ensure_hermitian, ensure_square, ensure_unitary, herm_coords, herm_dim, i_commutator, norm, traceless_part,
    CMatrix, HermitianBasis, C64, DEFAULT_RANK_TOL,
};
use crate::reps::{LieAlgebraBasis, UNITARY_TOL};
use crate::secondq::HERMITIAN_TOL;

/// Largest sector dimension the oracle accepts.
pub const MAX_ORACLE_DIM: usize = 32;
pub const DEFAULT_MAX_ROUNDS: usize = 12;
pub const DEFAULT_MAX_POWER: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosureOptions {
    /// Relative rank tolerance for accepting a new direction.
    pub tol: f64,
    pub max_rounds: usize,
}

impl Default for ClosureOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_RANK_TOL, max_rounds: DEFAULT_MAX_ROUNDS }
    }
}

#[derive(Clone, Debug)]
pub struct ClosureResult {
    /// Dimension of the traceless closure.
    pub dim: usize,
    pub basis: HermitianBasis,
    /// Whether the last round added nothing, or the closure reached `su(n)`.
    pub converged: bool,
    pub rounds: usize,
}

impl ClosureResult {
    pub fn sector_dim(&self) -> usize {
        self.basis.dim()
    }
}

/// Generated connected group, identified by the dimension of its algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupId {
    LieFamily,
    So,
    Usp,
    G2,
    FullSu,
    Other(usize),
}

impl GroupId {
    /// Dictionary lookup on `(dim, n, family_dim)`, first match wins: the
    /// family, `su(n)`, `so(n)`, `usp(n)` (even `n`), `g₂` (`n = 7`).
    pub fn from_dims(dim: usize, n: usize, family_dim: usize) -> Self {
        if dim == family_dim {
            GroupId::LieFamily
        } else if dim == herm_dim(n) - 1 {
            GroupId::FullSu
        } else if dim == n * (n - 1) / 2 {
            GroupId::So
        } else if n % 2 == 0 && dim == n * (n + 1) / 2 {
            GroupId::Usp
        } else if n == 7 && dim == 14 {
            GroupId::G2
        } else {
            GroupId::Other(dim)
        }
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupId::LieFamily => f.write_str("LIE_FAMILY"),
            GroupId::So => f.write_str("SO"),
            GroupId::Usp => f.write_str("USP"),
            GroupId::G2 => f.write_str("G2"),
            GroupId::FullSu => f.write_str("FULL_SU"),
            GroupId::Other(dim) => write!(f, "OTHER({dim})"),
        }
    }
}

impl FromStr for GroupId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "LIE_FAMILY" => GroupId::LieFamily,
            "SO" => GroupId::So,
            "USP" => GroupId::Usp,
            "G2" => GroupId::G2,
            "FULL_SU" => GroupId::FullSu,
            _ => {
                let dim = s
                    .strip_prefix("OTHER(")
                    .and_then(|rest| rest.strip_suffix(')'))
                    .and_then(|d| d.parse().ok())
                    .ok_or_else(|| Error::InvalidSpec(format!("unknown group tag {s:?}")))?;
                GroupId::Other(dim)
            }
        })
    }
}

impl Serialize for GroupId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GroupId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn check_scope(n: usize) -> Result<()> {
    if n > MAX_ORACLE_DIM {
        return Err(Error::OracleScope { dim: n, limit: MAX_ORACLE_DIM });
    }
    Ok(())
}

/// Real Lie algebra generated by `seeds` under `i[·,·]`, identity direction
/// removed. Seeds must be Hermitian and share one dimension `n ≤ 32`.
pub fn lie_closure(seeds: &[CMatrix], options: &ClosureOptions) -> Result<ClosureResult> {
    let first = seeds.first().ok_or_else(|| Error::InvalidGenerator("closure needs at least one seed".into()))?;
    let n = ensure_square(first)?;
    check_scope(n)?;
    let mut basis = HermitianBasis::new(n);
    for seed in seeds {
        ensure_hermitian(seed, HERMITIAN_TOL, "closure seed")?;
        basis.extend(&traceless_part(seed), options.tol)?;
    }
    let generators: Vec<CMatrix> = basis.elements().to_vec();
    let target = herm_dim(n) - 1;
    let mut frontier = 0..basis.len();
    let mut rounds = 0;
    while basis.len() < target {
        if rounds == options.max_rounds {
            return Ok(ClosureResult { dim: basis.len(), basis, converged: false, rounds });
        }
        rounds += 1;
        let start = basis.len();
        let snapshot = &basis;
        let candidates: Vec<(Vec<f64>, f64)> = frontier
            .clone()
            .flat_map(|b| (0..generators.len()).map(move |a| (a, b)))
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(a, b)| {
                let mut v = herm_coords(&i_commutator(&generators[a], &snapshot.elements()[b]));
                let scale = norm(&v).max(1.0);
                snapshot.project_out_from(&mut v, 0);
                (v, scale)
            })
            .collect();
        for (mut v, scale) in candidates {
            let threshold = options.tol * scale;
            basis.project_out_from(&mut v, start);
            if norm(&v) <= threshold {
                continue;
            }
            basis.project_out_from(&mut v, 0);
            basis.push_if_large(v, threshold);
            if basis.len() == target {
                break;
            }
        }
        if basis.len() == start {
            break;
        }
        frontier = start..basis.len();
    }
    Ok(ClosureResult { dim: basis.len(), basis, converged: true, rounds })
}

/// Seeds `Ad_{V^m}(G)` for the family generators `G` and `m = 0..=max_power`.
/// Their closure lies inside the algebra of the connected component of the
/// group generated by the family and `V`, so it is a lower bound only.
pub fn gate_closure_seeds(v: &CMatrix, basis: &LieAlgebraBasis, max_power: usize) -> Result<Vec<CMatrix>> {
    let n = basis.sector_dim();
    if v.shape() != (n, n) {
        return Err(Error::DimensionMismatch { expected: n, found: v.nrows() });
    }
    ensure_unitary(v, UNITARY_TOL)?;
    let half = C64::new(0.5, 0.0);
    let mut seeds: Vec<CMatrix> = basis.generators().elements().to_vec();
    let mut power = v.clone();
    for _ in 0..max_power {
        let adjoint = power.adjoint();
        for g in basis.generators().elements() {
            let conj = &power * g * &adjoint;
            seeds.push((&conj + conj.adjoint()) * half);
        }
        power = &power * v;
    }
    Ok(seeds)
}

/// Names the connected group of a converged closure.
pub fn identify_group(result: &ClosureResult, family_dim: usize) -> Result<GroupId> {
    if !result.converged {
        return Err(Error::OracleInconclusive { rounds: result.rounds, dim: result.dim });
    }
    Ok(GroupId::from_dims(result.dim, result.sector_dim(), family_dim))
}
