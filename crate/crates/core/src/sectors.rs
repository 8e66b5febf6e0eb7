//! Canonical bases of the bosonic, fermionic and positive-parity Fock
//! sectors, and their embeddings into tensor powers of `C^d`.
//!
//! States are occupation tuples `(n_1, …, n_d)` listed in ascending
//! lexicographic order. For two bosonic modes this puts the Dicke state with
//! `k` particles in mode 1 at position `k`; for fermionic occupations it is
//! binary counting with mode 1 as the most significant bit.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

/// Largest sector dimension we are willing to enumerate.
pub const MAX_SECTOR_DIM: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectorKind {
    Bosonic,
    Fermionic,
    FockPlus,
}

impl SectorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SectorKind::Bosonic => "bosonic",
            SectorKind::Fermionic => "fermionic",
            SectorKind::FockPlus => "fock_plus",
        }
    }

    pub fn is_fermionic(self) -> bool {
        matches!(self, SectorKind::Fermionic | SectorKind::FockPlus)
    }
}

impl fmt::Display for SectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, Deserialize)]
struct RawSector {
    kind: SectorKind,
    modes: usize,
    #[serde(default)]
    particles: Option<usize>,
}

/// Which Hilbert space an operator acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSector")]
pub struct SectorDescriptor {
    kind: SectorKind,
    modes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    particles: Option<usize>,
}

impl TryFrom<RawSector> for SectorDescriptor {
    type Error = Error;

    fn try_from(raw: RawSector) -> Result<Self> {
        Self::new(raw.kind, raw.modes, raw.particles)
    }
}

impl SectorDescriptor {
    pub fn new(kind: SectorKind, modes: usize, particles: Option<usize>) -> Result<Self> {
        if modes == 0 {
            return Err(Error::InvalidSector("number of modes must be positive".into()));
        }
        match (kind, particles) {
            (SectorKind::FockPlus, Some(_)) => {
                return Err(Error::InvalidSector("fock_plus takes no particle number".into()))
            }
            (SectorKind::Bosonic | SectorKind::Fermionic, None) => {
                return Err(Error::InvalidSector(format!("{kind} sector needs a particle number")))
            }
            (SectorKind::Fermionic, Some(n)) if n > modes => {
                return Err(Error::InvalidSector(format!(
                    "fermionic sector with {n} particles in {modes} modes"
                )))
            }
            _ => {}
        }
        let desc = Self { kind, modes, particles };
        let dim = desc.checked_dim()?;
        if dim > MAX_SECTOR_DIM {
            return Err(Error::MemoryGuard {
                what: format!("sector {desc}"),
                reason: format!("dimension {dim} exceeds {MAX_SECTOR_DIM}"),
            });
        }
        Ok(desc)
    }

    pub fn bosonic(modes: usize, particles: usize) -> Result<Self> {
        Self::new(SectorKind::Bosonic, modes, Some(particles))
    }

    pub fn fermionic(modes: usize, particles: usize) -> Result<Self> {
        Self::new(SectorKind::Fermionic, modes, Some(particles))
    }

    pub fn fock_plus(modes: usize) -> Result<Self> {
        Self::new(SectorKind::FockPlus, modes, None)
    }

    pub fn kind(&self) -> SectorKind {
        self.kind
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn particles(&self) -> Option<usize> {
        self.particles
    }

    /// Fermionic sector with `d = 2N`.
    pub fn is_half_filling(&self) -> bool {
        self.kind == SectorKind::Fermionic && self.particles.map(|n| 2 * n) == Some(self.modes)
    }

    fn checked_dim(&self) -> Result<usize> {
        let d = self.modes as u64;
        let too_large = || Error::InvalidSector(format!("sector {self} is too large"));
        match self.kind {
            SectorKind::Bosonic => {
                let n = self.particles.unwrap_or(0) as u64;
                binomial(n + d - 1, n).ok_or_else(too_large)
            }
            SectorKind::Fermionic => binomial(d, self.particles.unwrap_or(0) as u64).ok_or_else(too_large),
            SectorKind::FockPlus => {
                if self.modes > 40 {
                    Err(too_large())
                } else {
                    Ok(1usize << (self.modes - 1))
                }
            }
        }
    }

    /// Dimension of the sector.
    pub fn dim(&self) -> usize {
        self.checked_dim().expect("validated at construction")
    }
}

impl fmt::Display for SectorDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.particles {
            Some(n) => write!(f, "{}:{}:{}", self.kind, self.modes, n),
            None => write!(f, "{}:{}", self.kind, self.modes),
        }
    }
}

impl FromStr for SectorDescriptor {
    type Err = Error;

    /// Parses `bosonic:d:N`, `fermionic:d:N` or `fock_plus:d`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidSector(format!("`{s}`: {why}"));
        let parts: Vec<&str> = s.trim().split(':').collect();
        let kind = match parts[0] {
            "bosonic" => SectorKind::Bosonic,
            "fermionic" => SectorKind::Fermionic,
            "fock_plus" => SectorKind::FockPlus,
            other => return Err(bad(&format!("unknown sector kind `{other}`"))),
        };
        let expected = if kind == SectorKind::FockPlus { 2 } else { 3 };
        if parts.len() != expected {
            return Err(bad(&format!("expected {expected} colon-separated fields")));
        }
        let number = |p: &str| p.parse::<usize>().map_err(|_| bad(&format!("`{p}` is not a non-negative integer")));
        let modes = number(parts[1])?;
        let particles = if expected == 3 { Some(number(parts[2])?) } else { None };
        Self::new(kind, modes, particles)
    }
}

/// `C(n, k)`, or `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<usize> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return None;
        }
    }
    Some(acc as usize)
}

/// Occupation numbers `(n_1, …, n_d)` of one Fock state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState(Vec<u32>);

impl BasisState {
    pub fn new(occupation: Vec<u32>) -> Self {
        Self(occupation)
    }

    pub fn occupation(&self) -> &[u32] {
        &self.0
    }

    pub fn particles(&self) -> u32 {
        self.0.iter().sum()
    }

    /// 1-based indices of occupied modes, ascending.
    pub fn occupied_modes(&self) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(_, &n)| n > 0).map(|(k, _)| k + 1).collect()
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("|")?;
        for (k, n) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{n}")?;
        }
        f.write_str(">")
    }
}

#[derive(Clone, Debug)]
pub struct SectorBasis {
    descriptor: SectorDescriptor,
    states: Vec<BasisState>,
    index: HashMap<Vec<u32>, usize>,
}

impl SectorBasis {
    pub fn descriptor(&self) -> &SectorDescriptor {
        &self.descriptor
    }

    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn position(&self, occupation: &[u32]) -> Option<usize> {
        self.index.get(occupation).copied()
    }
}

fn push_compositions(prefix: &mut Vec<u32>, modes_left: usize, total: u32, out: &mut Vec<BasisState>) {
    if modes_left == 1 {
        prefix.push(total);
        out.push(BasisState(prefix.clone()));
        prefix.pop();
        return;
    }
    for n in 0..=total {
        prefix.push(n);
        push_compositions(prefix, modes_left - 1, total - n, out);
        prefix.pop();
    }
}

/// Binary occupation of `index` with mode 1 as the most significant bit.
pub fn fock_occupation(index: usize, modes: usize) -> Vec<u32> {
    (0..modes).map(|k| ((index >> (modes - 1 - k)) & 1) as u32).collect()
}

/// Inverse of [`fock_occupation`].
pub fn fock_index(occupation: &[u32]) -> usize {
    occupation.iter().fold(0, |acc, &n| (acc << 1) | n as usize)
}

pub fn enumerate_basis(desc: &SectorDescriptor) -> SectorBasis {
    let d = desc.modes();
    let states = match desc.kind() {
        SectorKind::Bosonic => {
            let mut out = Vec::with_capacity(desc.dim());
            push_compositions(&mut Vec::with_capacity(d), d, desc.particles().unwrap_or(0) as u32, &mut out);
            out
        }
        SectorKind::Fermionic => {
            let n = desc.particles().unwrap_or(0) as u32;
            (0..1usize << d)
                .filter(|i| i.count_ones() == n)
                .map(|i| BasisState(fock_occupation(i, d)))
                .collect()
        }
        SectorKind::FockPlus => (0..1usize << d)
            .filter(|i| i.count_ones() % 2 == 0)
            .map(|i| BasisState(fock_occupation(i, d)))
            .collect(),
    };
    let index = states.iter().enumerate().map(|(k, s)| (s.0.clone(), k)).collect();
    SectorBasis { descriptor: *desc, states, index }
}

pub fn sector_dim(desc: &SectorDescriptor) -> usize {
    desc.dim()
}

/// Every permutation of `0..n` paired with its sign, generated by Heap's
/// algorithm (each step is one transposition).
pub fn signed_permutations(n: usize) -> Vec<(Vec<usize>, i8)> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1i8;
    let mut out = vec![(perm.clone(), sign)];
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            sign = -sign;
            out.push((perm.clone(), sign));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Multiset permutations of `items`, each listed once.
fn distinct_arrangements(items: &[usize]) -> Vec<Vec<usize>> {
    let mut sorted = items.to_vec();
    sorted.sort_unstable();
    let mut out = vec![sorted.clone()];
    // next lexicographic permutation
    while let Some(i) = (0..sorted.len().saturating_sub(1)).rev().find(|&i| sorted[i] < sorted[i + 1]) {
        let j = (i + 1..sorted.len()).rev().find(|&j| sorted[j] > sorted[i]).expect("pivot exists");
        sorted.swap(i, j);
        sorted[i + 1..].reverse();
        out.push(sorted.clone());
    }
    out
}

/// Row of `(C^d)^{⊗N}` for the product state `|a_1⟩⊗…⊗|a_N⟩` (0-based modes,
/// first factor most significant).
pub fn tensor_index(modes: &[usize], d: usize) -> usize {
    modes.iter().fold(0, |acc, &m| acc * d + m)
}

/// Isometry `T` from the sector into `(C^d)^{⊗N}`: column `j` is the
/// normalized symmetrization (bosons) or Slater determinant with modes
/// wedge-ordered ascending (fermions) of basis state `j`.
pub fn embedding_isometry(desc: &SectorDescriptor) -> Result<CMatrix> {
    let n = match (desc.kind(), desc.particles()) {
        (SectorKind::FockPlus, _) | (_, None) => {
            return Err(Error::InvalidSector("fock_plus has no fixed particle number to embed".into()))
        }
        (_, Some(n)) => n,
    };
    let d = desc.modes();
    let rows = (d as u64)
        .checked_pow(n as u32)
        .filter(|&r| r as usize <= 1 << 22)
        .ok_or_else(|| Error::MemoryGuard {
            what: format!("embedding of {desc}"),
            reason: format!("tensor power of dimension {d}^{n}"),
        })? as usize;
    let basis = enumerate_basis(desc);
    let mut t = CMatrix::zeros(rows, basis.len());
    for (col, state) in basis.states().iter().enumerate() {
        let mut modes = Vec::with_capacity(n);
        for (k, &occ) in state.occupation().iter().enumerate() {
            modes.extend(std::iter::repeat(k).take(occ as usize));
        }
        match desc.kind() {
            SectorKind::Bosonic => {
                let arrangements = distinct_arrangements(&modes);
                let amp = C64::new(1.0 / (arrangements.len() as f64).sqrt(), 0.0);
                for a in arrangements {
                    t[(tensor_index(&a, d), col)] = amp;
                }
            }
            _ => {
                let perms = signed_permutations(n);
                let amp = 1.0 / (perms.len() as f64).sqrt();
                for (p, sign) in perms {
                    let a: Vec<usize> = p.iter().map(|&i| modes[i]).collect();
                    t[(tensor_index(&a, d), col)] = C64::new(sign as f64 * amp, 0.0);
                }
            }
        }
    }
    Ok(t)
}

/// A dense operator on a sector, in the [`enumerate_basis`] order.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    sector: SectorDescriptor,
    matrix: CMatrix,
}

impl Operator {
    pub fn new(sector: SectorDescriptor, matrix: CMatrix) -> Result<Self> {
        let n = sector.dim();
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare { rows: matrix.nrows(), cols: matrix.ncols() });
        }
        if matrix.nrows() != n {
            return Err(Error::DimensionMismatch { expected: n, found: matrix.nrows() });
        }
        Ok(Self { sector, matrix })
    }

    pub fn sector(&self) -> &SectorDescriptor {
        &self.sector
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hs_norm, identity, kron, matexp, I};

    fn occupations(basis: &SectorBasis) -> Vec<Vec<u32>> {
        basis.states().iter().map(|s| s.occupation().to_vec()).collect()
    }

    #[test]
    fn enumerate_examples() {
        let b = enumerate_basis(&SectorDescriptor::bosonic(2, 2).unwrap());
        assert_eq!(occupations(&b), vec![vec![0, 2], vec![1, 1], vec![2, 0]]);

        let f = enumerate_basis(&SectorDescriptor::fermionic(4, 2).unwrap());
        assert_eq!(f.len(), 6);
        assert_eq!(f.states()[0].occupation(), &[0, 0, 1, 1]);
        assert_eq!(f.states()[5].occupation(), &[1, 1, 0, 0]);

        let p = enumerate_basis(&SectorDescriptor::fock_plus(3).unwrap());
        assert_eq!(occupations(&p), vec![vec![0, 0, 0], vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]);
    }

    #[test]
    fn dicke_state_k_sits_at_position_k() {
        for n in 0..8u32 {
            let b = enumerate_basis(&SectorDescriptor::bosonic(2, n as usize).unwrap());
            for k in 0..=n {
                assert_eq!(b.position(&[k, n - k]), Some(k as usize));
            }
        }
    }

    #[test]
    fn bases_are_sorted_complete_and_indexed() {
        let descs = [
            SectorDescriptor::bosonic(3, 4).unwrap(),
            SectorDescriptor::bosonic(1, 3).unwrap(),
            SectorDescriptor::fermionic(6, 3).unwrap(),
            SectorDescriptor::fermionic(5, 0).unwrap(),
            SectorDescriptor::fock_plus(5).unwrap(),
        ];
        for desc in descs {
            let basis = enumerate_basis(&desc);
            assert_eq!(basis.len(), sector_dim(&desc), "{desc}");
            for w in basis.states().windows(2) {
                assert!(w[0] < w[1], "{desc} not strictly ascending");
            }
            for (k, s) in basis.states().iter().enumerate() {
                assert_eq!(basis.position(s.occupation()), Some(k));
            }
        }
    }

    #[test]
    fn dimensions() {
        for n in 0..10 {
            assert_eq!(SectorDescriptor::bosonic(2, n).unwrap().dim(), n + 1);
        }
        assert_eq!(SectorDescriptor::fermionic(8, 4).unwrap().dim(), 70);
        assert_eq!(SectorDescriptor::fock_plus(6).unwrap().dim(), 32);
        assert_eq!(SectorDescriptor::bosonic(3, 6).unwrap().dim(), 28);
    }

    #[test]
    fn descriptor_validation() {
        assert!(matches!(SectorDescriptor::fermionic(3, 4), Err(Error::InvalidSector(_))));
        assert!(SectorDescriptor::new(SectorKind::FockPlus, 3, Some(1)).is_err());
        assert!(SectorDescriptor::new(SectorKind::Bosonic, 3, None).is_err());
        assert!(SectorDescriptor::bosonic(0, 1).is_err());
    }

    #[test]
    fn descriptor_text_round_trip() {
        for s in ["bosonic:2:4", "fermionic:6:3", "fock_plus:4"] {
            let d: SectorDescriptor = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
        }
        assert!("fock_plus:4:1".parse::<SectorDescriptor>().is_err());
        assert!("bosonic:2".parse::<SectorDescriptor>().is_err());
        assert!("spin:2:1".parse::<SectorDescriptor>().is_err());
        assert!("fermionic:2:3".parse::<SectorDescriptor>().is_err());
    }

    #[test]
    fn descriptor_json_round_trip() {
        let d = SectorDescriptor::fermionic(6, 3).unwrap();
        let json = serde_json::to_string(&d).unwrap();
        assert_eq!(json, r#"{"kind":"fermionic","modes":6,"particles":3}"#);
        assert_eq!(serde_json::from_str::<SectorDescriptor>(&json).unwrap(), d);
        let p: SectorDescriptor = serde_json::from_str(r#"{"kind":"fock_plus","modes":4}"#).unwrap();
        assert_eq!(p, SectorDescriptor::fock_plus(4).unwrap());
        assert!(serde_json::from_str::<SectorDescriptor>(r#"{"kind":"fermionic","modes":2,"particles":3}"#).is_err());
    }

    #[test]
    fn signed_permutations_cover_symmetric_group() {
        let perms = signed_permutations(4);
        assert_eq!(perms.len(), 24);
        let distinct: std::collections::HashSet<_> = perms.iter().map(|(p, _)| p.clone()).collect();
        assert_eq!(distinct.len(), 24);
        for (p, sign) in &perms {
            let inversions = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            assert_eq!(*sign, if inversions % 2 == 0 { 1 } else { -1 });
        }
    }

    #[test]
    fn embedding_examples() {
        let t = embedding_isometry(&SectorDescriptor::bosonic(2, 1).unwrap()).unwrap();
        // bosonic(2,1) lists (0,1) then (1,0): mode 2 first
        assert_eq!(t.column(0)[1], C64::new(1.0, 0.0));
        assert_eq!(t.column(1)[0], C64::new(1.0, 0.0));
        assert!(hs_norm(&(t.adjoint() * &t - identity(2))) < 1e-15);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let b = embedding_isometry(&SectorDescriptor::bosonic(2, 2).unwrap()).unwrap();
        // (1,1) -> (|12> + |21>)/√2, rows |11>,|12>,|21>,|22>
        let expected = [0.0, s, s, 0.0];
        assert!(b.column(1).iter().zip(expected).all(|(z, e)| (z - e).norm() < 1e-15));

        let f = embedding_isometry(&SectorDescriptor::fermionic(2, 2).unwrap()).unwrap();
        let expected = [0.0, s, -s, 0.0];
        assert!(f.column(0).iter().zip(expected).all(|(z, e)| (z - e).norm() < 1e-15));

        assert!(embedding_isometry(&SectorDescriptor::fock_plus(2).unwrap()).is_err());
    }

    fn swap_projectors(d: usize, n: usize) -> (CMatrix, CMatrix) {
        // symmetric and antisymmetric projectors from explicit permutation sums
        let rows = d.pow(n as u32);
        let mut sym = CMatrix::zeros(rows, rows);
        let mut anti = CMatrix::zeros(rows, rows);
        let perms = signed_permutations(n);
        let scale = 1.0 / perms.len() as f64;
        for r in 0..rows {
            let digits: Vec<usize> = (0..n).map(|k| (r / d.pow((n - 1 - k) as u32)) % d).collect();
            for (p, sign) in &perms {
                let permuted: Vec<usize> = p.iter().map(|&i| digits[i]).collect();
                let c = tensor_index(&permuted, d);
                sym[(c, r)] += C64::new(scale, 0.0);
                anti[(c, r)] += C64::new(scale * *sign as f64, 0.0);
            }
        }
        (sym, anti)
    }

    #[test]
    fn embeddings_are_isometries_onto_the_right_subspace() {
        let cases = [(2, 3, SectorKind::Bosonic), (3, 3, SectorKind::Bosonic), (3, 2, SectorKind::Fermionic), (4, 3, SectorKind::Fermionic)];
        for (d, n, kind) in cases {
            let desc = SectorDescriptor::new(kind, d, Some(n)).unwrap();
            let t = embedding_isometry(&desc).unwrap();
            let m = t.ncols();
            assert!(hs_norm(&(t.adjoint() * &t - identity(m))) < 1e-12);
            let (sym, anti) = swap_projectors(d, n);
            let target = if kind == SectorKind::Bosonic { sym } else { anti };
            assert!(hs_norm(&(&t * t.adjoint() - target)) < 1e-12, "{desc}");
        }
    }

    #[test]
    fn embedding_isometry_desk_scale() {
        for d in 1..=3 {
            for n in 0..=6 {
                let t = embedding_isometry(&SectorDescriptor::bosonic(d, n).unwrap()).unwrap();
                assert!(hs_norm(&(t.adjoint() * &t - identity(t.ncols()))) < 1e-12);
            }
        }
        for d in 1..=6 {
            for n in 0..=d {
                let t = embedding_isometry(&SectorDescriptor::fermionic(d, n).unwrap()).unwrap();
                assert!(hs_norm(&(t.adjoint() * &t - identity(t.ncols()))) < 1e-12);
            }
        }
    }

    #[test]
    fn restricted_tensor_power_is_unitary() {
        let h = CMatrix::from_fn(3, 3, |i, j| C64::new((i + 2 * j) as f64 * 0.3, i as f64 - j as f64));
        let u = matexp(&((&h + h.adjoint()) * I)).unwrap();
        for desc in [SectorDescriptor::bosonic(3, 3).unwrap(), SectorDescriptor::fermionic(3, 2).unwrap()] {
            let t = embedding_isometry(&desc).unwrap();
            let mut power = u.clone();
            for _ in 1..desc.particles().unwrap() {
                power = kron(&power, &u);
            }
            let restricted = t.adjoint() * power * &t;
            let defect = hs_norm(&(&restricted * restricted.adjoint() - identity(restricted.nrows())));
            assert!(defect < 1e-10, "{desc}: {defect:e}");
        }
    }

    #[test]
    fn operator_checks_dimension() {
        let desc = SectorDescriptor::bosonic(2, 3).unwrap();
        assert!(Operator::new(desc, identity(4)).is_ok());
        assert!(matches!(Operator::new(desc, identity(3)), Err(Error::DimensionMismatch { .. })));
    }
}
