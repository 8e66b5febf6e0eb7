//! Lie algebras of the three restricted gate families on their sectors,
//! group elements built from single-particle data, and the normalizer and
//! automorphism tests used to decide group membership.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    ensure_hermitian, ensure_unitary, hs_inner, hs_norm, i_commutator, identity, matexp, trace, CMatrix,
    HermitianBasis, C64, DEFAULT_RANK_TOL, I, ONE, ZERO,
};
use crate::secondq::{build_matrix, FactorToken, HamiltonianSpec, Term};
use crate::sectors::{Operator, SectorDescriptor, SectorKind};

/// Unitarity tolerance for gates handed to the normalizer tests.
pub const UNITARY_TOL: f64 = 1e-8;

/// Spectrum matching tolerance of [`automorphism_type`].
pub const SPECTRUM_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// Passive bosonic linear optics.
    #[serde(rename = "LOB")]
    Lob,
    /// Passive fermionic linear optics.
    #[serde(rename = "LOF")]
    Lof,
    /// Active fermionic linear optics on the positive-parity sector.
    #[serde(rename = "FLO")]
    Flo,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Lob => "LOB",
            Family::Lof => "LOF",
            Family::Flo => "FLO",
        }
    }

    pub fn for_kind(kind: SectorKind) -> Self {
        match kind {
            SectorKind::Bosonic => Family::Lob,
            SectorKind::Fermionic => Family::Lof,
            SectorKind::FockPlus => Family::Flo,
        }
    }

    pub fn sector_kind(self) -> SectorKind {
        match self {
            Family::Lob => SectorKind::Bosonic,
            Family::Lof => SectorKind::Fermionic,
            Family::Flo => SectorKind::FockPlus,
        }
    }

    /// Number of raw generators: `d² − 1` for passive optics, `d(2d − 1)`
    /// for active fermionic optics.
    pub fn raw_dim(self, modes: usize) -> usize {
        match self {
            Family::Lob | Family::Lof => modes * modes - 1,
            Family::Flo => modes * (2 * modes - 1),
        }
    }

    pub fn check_sector(self, desc: &SectorDescriptor) -> Result<()> {
        if desc.kind() != self.sector_kind() {
            return Err(Error::FamilyMismatch { family: self.to_string(), sector: desc.to_string() });
        }
        Ok(())
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "LOB" => Ok(Family::Lob),
            "LOF" => Ok(Family::Lof),
            "FLO" => Ok(Family::Flo),
            _ => Err(Error::InvalidSpec(format!("unknown family `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutomorphismType {
    Inner,
    Outer,
}

/// Generalized Gell-Mann matrices: a basis of traceless Hermitian `d x d`
/// matrices, orthogonal with `tr(h_a h_b) = 2δ_ab`.
pub fn gell_mann(d: usize) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in j + 1..d {
            let mut s = CMatrix::zeros(d, d);
            s[(j, k)] = ONE;
            s[(k, j)] = ONE;
            out.push(s);
            let mut a = CMatrix::zeros(d, d);
            a[(j, k)] = -I;
            a[(k, j)] = I;
            out.push(a);
        }
    }
    for l in 1..d {
        let scale = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut z = CMatrix::zeros(d, d);
        for k in 0..l {
            z[(k, k)] = C64::new(scale, 0.0);
        }
        z[(l, l)] = C64::new(-(l as f64) * scale, 0.0);
        out.push(z);
    }
    out
}

fn single_term(coeff: C64, factors: Vec<FactorToken>) -> HamiltonianSpec {
    HamiltonianSpec::new(vec![Term::new(coeff, factors)]).expect("one term")
}

/// Basis of the Lie algebra of a gate family, represented on its sector.
#[derive(Clone, Debug)]
pub struct LieAlgebraBasis {
    descriptor: SectorDescriptor,
    family: Family,
    /// `a†_k a_l` (passive) or `m_k m_l` (active, `k < l` in row-major
    /// order, zero on the diagonal) on the sector.
    pair_ops: Vec<Vec<CMatrix>>,
    /// Single-particle matrices `h_a` behind `raw` (passive families only).
    single_particle: Vec<CMatrix>,
    raw: Vec<CMatrix>,
    generators: HermitianBasis,
    with_identity: HermitianBasis,
}

impl LieAlgebraBasis {
    pub fn descriptor(&self) -> &SectorDescriptor {
        &self.descriptor
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Generators before orthonormalization: `π(h_a)` for the Gell-Mann
    /// basis, or `(i/2) m_k m_l` for `k < l`.
    pub fn raw_generators(&self) -> &[CMatrix] {
        &self.raw
    }

    pub fn raw_dim(&self) -> usize {
        self.raw.len()
    }

    /// HS-orthonormal traceless generators.
    pub fn generators(&self) -> &HermitianBasis {
        &self.generators
    }

    /// Dimension of the represented algebra.
    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    /// Generators together with the identity direction.
    pub fn with_identity(&self) -> &HermitianBasis {
        &self.with_identity
    }

    pub fn sector_dim(&self) -> usize {
        self.descriptor.dim()
    }

    /// `π(h) = Σ h_kl a†_k a_l` for a single-particle `d x d` matrix.
    pub fn pi(&self, h: &CMatrix) -> Result<CMatrix> {
        let d = self.descriptor.modes();
        if self.family == Family::Flo {
            return Err(Error::InvalidGenerator("FLO generators take an antisymmetric 2d x 2d matrix".into()));
        }
        if h.shape() != (d, d) {
            return Err(Error::InvalidGenerator(format!("expected a {d}x{d} matrix, got {:?}", h.shape())));
        }
        let n = self.sector_dim();
        let mut out = CMatrix::zeros(n, n);
        for k in 0..d {
            for l in 0..d {
                if h[(k, l)] != ZERO {
                    out += &self.pair_ops[k][l] * h[(k, l)];
                }
            }
        }
        Ok(out)
    }

    /// `Σ_{k,l} h_kl m_k m_l` restricted to the sector, for real
    /// antisymmetric `h` of size `2d x 2d`. Anti-Hermitian.
    pub fn majorana_quadratic(&self, h: &CMatrix) -> Result<CMatrix> {
        let m = 2 * self.descriptor.modes();
        if self.family != Family::Flo {
            return Err(Error::InvalidGenerator("Majorana quadratics belong to the FLO family".into()));
        }
        check_real_antisymmetric(h, m)?;
        let n = self.sector_dim();
        let mut out = CMatrix::zeros(n, n);
        for k in 0..m {
            for l in k + 1..m {
                let c = h[(k, l)].re;
                if c != 0.0 {
                    out += &self.pair_ops[k][l] * C64::new(2.0 * c, 0.0);
                }
            }
        }
        Ok(out)
    }

    /// Max over generators of the closure defect `‖i[G_a, G_b]‖` off the
    /// span. Quadratic in the algebra dimension.
    pub fn closure_defect(&self) -> f64 {
        let g = self.generators.elements();
        let mut worst: f64 = 0.0;
        for a in 0..g.len() {
            for b in a + 1..g.len() {
                worst = worst.max(self.generators.distance(&i_commutator(&g[a], &g[b])));
            }
        }
        worst
    }

    fn self_check(&self) -> Result<()> {
        for (a, g) in self.raw.iter().enumerate() {
            let tr = trace(g).norm();
            if tr > 1e-12 * hs_norm(g).max(1.0) {
                return Err(Error::InvalidGenerator(format!("generator {a} of {} has trace {tr:.3e}", self.family)));
            }
        }
        // closure spot check on consecutive pairs; the full check is closure_defect()
        let g = self.generators.elements();
        for w in g.windows(2) {
            let defect = self.generators.distance(&i_commutator(&w[0], &w[1]));
            if defect > 1e-9 {
                return Err(Error::InvalidGenerator(format!(
                    "{} basis on {} is not closed (defect {defect:.3e})",
                    self.family, self.descriptor
                )));
            }
        }
        Ok(())
    }
}

fn check_real_antisymmetric(h: &CMatrix, m: usize) -> Result<()> {
    if h.shape() != (m, m) {
        return Err(Error::InvalidGenerator(format!("expected a {m}x{m} matrix, got {:?}", h.shape())));
    }
    let scale = hs_norm(h).max(1.0);
    let imag: f64 = h.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let asym = hs_norm(&(h + h.transpose()));
    if imag > 1e-12 * scale || asym > 1e-12 * scale {
        return Err(Error::InvalidGenerator("FLO generator must be real antisymmetric".into()));
    }
    Ok(())
}

pub fn lie_basis(family: Family, desc: &SectorDescriptor) -> Result<LieAlgebraBasis> {
    family.check_sector(desc)?;
    let d = desc.modes();
    let n = desc.dim();
    let (pair_ops, single_particle, raw) = match family {
        Family::Lob | Family::Lof => {
            let mut pair_ops = Vec::with_capacity(d);
            for k in 1..=d {
                let mut row = Vec::with_capacity(d);
                for l in 1..=d {
                    row.push(build_matrix(&single_term(ONE, vec![FactorToken::Hop(k, l)]), desc)?);
                }
                pair_ops.push(row);
            }
            let single_particle = gell_mann(d);
            let mut basis = LieAlgebraBasis {
                descriptor: *desc,
                family,
                pair_ops,
                single_particle: Vec::new(),
                raw: Vec::new(),
                generators: HermitianBasis::new(n),
                with_identity: HermitianBasis::new(n),
            };
            let raw = single_particle.iter().map(|h| basis.pi(h)).collect::<Result<Vec<_>>>()?;
            (std::mem::take(&mut basis.pair_ops), single_particle, raw)
        }
        Family::Flo => {
            let m = 2 * d;
            let mut pair_ops = vec![vec![CMatrix::zeros(n, n); m]; m];
            let mut raw = Vec::with_capacity(family.raw_dim(d));
            for k in 0..m {
                for l in k + 1..m {
                    let mm = build_matrix(
                        &single_term(ONE, vec![FactorToken::Majorana(k + 1), FactorToken::Majorana(l + 1)]),
                        desc,
                    )?;
                    raw.push(&mm * C64::new(0.0, 0.5));
                    pair_ops[l][k] = -&mm;
                    pair_ops[k][l] = mm;
                }
            }
            (pair_ops, Vec::new(), raw)
        }
    };
    let generators = HermitianBasis::spanning(n, &raw, DEFAULT_RANK_TOL)?;
    let mut with_identity = generators.clone();
    with_identity.extend(&identity(n), DEFAULT_RANK_TOL)?;
    let basis = LieAlgebraBasis { descriptor: *desc, family, pair_ops, single_particle, raw, generators, with_identity };
    basis.self_check()?;
    Ok(basis)
}

/// Group element generated by single-particle data: `exp(iπ(h))` for
/// Hermitian `d x d` `h` (passive families) or `exp(Σ h_kl m_k m_l)` for
/// real antisymmetric `2d x 2d` `h` (active family).
pub fn group_gate(basis: &LieAlgebraBasis, h: &CMatrix) -> Result<Operator> {
    let exponent = match basis.family {
        Family::Lob | Family::Lof => {
            ensure_hermitian(h, 1e-12, "single-particle generator")
                .map_err(|e| Error::InvalidGenerator(e.to_string()))?;
            basis.pi(h)? * I
        }
        Family::Flo => basis.majorana_quadratic(h)?,
    };
    Operator::new(basis.descriptor, matexp(&exponent)?)
}

fn check_gate(v: &Operator, basis: &LieAlgebraBasis) -> Result<()> {
    if v.sector() != basis.descriptor() {
        return Err(Error::InvalidSector(format!(
            "gate acts on {} but the family basis lives on {}",
            v.sector(),
            basis.descriptor()
        )));
    }
    ensure_unitary(v.matrix(), UNITARY_TOL)
}

/// Largest distance of `V G V†` from `span(generators ∪ {I})` over the
/// orthonormal generators `G`.
pub fn normalizer_residual(v: &Operator, basis: &LieAlgebraBasis) -> Result<f64> {
    check_gate(v, basis)?;
    let vm = v.matrix();
    let vd = vm.adjoint();
    Ok(basis
        .generators
        .elements()
        .iter()
        .map(|g| basis.with_identity.distance(&(vm * g * &vd)))
        .fold(0.0, f64::max))
}

/// Whether conjugation by `V` maps the family algebra into itself (modulo
/// the identity direction), to `tol`.
pub fn normalizes(v: &Operator, basis: &LieAlgebraBasis, tol: f64) -> Result<bool> {
    Ok(normalizer_residual(v, basis)? < tol)
}

/// Spectrum-asymmetric traceless diagonal probe `diag(k²) − mean`.
pub fn automorphism_probe(d: usize) -> CMatrix {
    let squares: Vec<f64> = (1..=d).map(|k| (k * k) as f64).collect();
    let mean = squares.iter().sum::<f64>() / d as f64;
    CMatrix::from_diagonal(&DVector::from_iterator(d, squares.iter().map(|&x| C64::new(x - mean, 0.0))))
}

fn sorted_eigenvalues(h: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(h.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

fn spectra_match(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() < SPECTRUM_TOL)
}

/// Recovers the single-particle `h'` with `π(h') = target` by solving the
/// Gram system over the Gell-Mann images.
pub fn single_particle_preimage(basis: &LieAlgebraBasis, target: &CMatrix) -> Result<CMatrix> {
    if basis.family == Family::Flo {
        return Err(Error::InvalidGenerator("preimages are only defined for passive families".into()));
    }
    let k = basis.raw.len();
    let gram = DMatrix::from_fn(k, k, |a, b| hs_inner(&basis.raw[a], &basis.raw[b]));
    let rhs = DVector::from_fn(k, |a, _| hs_inner(&basis.raw[a], target));
    let coeffs = gram
        .cholesky()
        .ok_or_else(|| Error::Solve("Gram matrix of the representation is singular".into()))?
        .solve(&rhs);
    let d = basis.descriptor.modes();
    let mut h = CMatrix::zeros(d, d);
    for (c, g) in coeffs.iter().zip(&basis.single_particle) {
        h += g * C64::new(*c, 0.0);
    }
    let miss = hs_norm(&(basis.pi(&h)? - target));
    if miss > 1e-8 * hs_norm(target).max(1.0) {
        return Err(Error::NotANormalizer(format!("conjugated probe leaves the algebra (residual {miss:.3e})")));
    }
    Ok(h)
}

/// Classifies conjugation by a normalizing `V` at fermionic half-filling as
/// an inner or the outer (`X ↦ −X`) automorphism of the single-particle
/// algebra, by comparing spectra of the probe and its preimage.
pub fn automorphism_type(v: &Operator, basis: &LieAlgebraBasis) -> Result<AutomorphismType> {
    let desc = basis.descriptor;
    if basis.family != Family::Lof || !desc.is_half_filling() {
        return Err(Error::InvalidSector(format!(
            "automorphism test needs the LOF family at half-filling, got {} on {desc}",
            basis.family
        )));
    }
    check_gate(v, basis)?;
    let probe = automorphism_probe(desc.modes());
    let vm = v.matrix();
    let target = vm * basis.pi(&probe)? * vm.adjoint();
    let h = single_particle_preimage(basis, &target)?;
    let found = sorted_eigenvalues(&h);
    let inner = sorted_eigenvalues(&probe);
    let outer = sorted_eigenvalues(&(-&probe));
    if spectra_match(&found, &inner) {
        Ok(AutomorphismType::Inner)
    } else if spectra_match(&found, &outer) {
        Ok(AutomorphismType::Outer)
    } else {
        Err(Error::NotANormalizer(format!(
            "conjugated probe has spectrum {found:?}, neither {inner:?} nor its negation"
        )))
    }
}

/// Particle-hole gate `W = Π_{i=1}^{d} (f_i + f_i†)` on a half-filled
/// fermionic sector.
pub fn particle_hole_gate(desc: &SectorDescriptor) -> Result<Operator> {
    if !desc.is_half_filling() {
        return Err(Error::InvalidSector(format!("particle-hole gate needs d = 2N, got {desc}")));
    }
    let factors = (1..=desc.modes()).map(|i| FactorToken::Majorana(2 * i - 1)).collect();
    Operator::new(*desc, build_matrix(&single_term(ONE, factors), desc)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::testing::max_abs_diff;
    use crate::linalg::{kron, traceless_part};
    use crate::secondq::{even_parity_indices, fock_matrix, majorana};
    use crate::sectors::embedding_isometry;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
        let a = CMatrix::from_fn(d, d, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        (&a + a.adjoint()) * C64::new(0.5, 0.0)
    }

    fn random_antisymmetric(rng: &mut ChaCha8Rng, m: usize) -> CMatrix {
        let a = CMatrix::from_fn(m, m, |_, _| C64::new(rng.random_range(-1.0..1.0), 0.0));
        &a - a.transpose()
    }

    #[test]
    fn gell_mann_is_orthogonal_traceless_hermitian() {
        for d in 1..6 {
            let g = gell_mann(d);
            assert_eq!(g.len(), d * d - 1);
            for (a, x) in g.iter().enumerate() {
                assert!(trace(x).norm() < 1e-14);
                assert_eq!(x, &x.adjoint());
                for (b, y) in g.iter().enumerate() {
                    let expected = if a == b { 2.0 } else { 0.0 };
                    assert!((hs_inner(x, y) - expected).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn dimensions_of_family_algebras() {
        let lob = lie_basis(Family::Lob, &SectorDescriptor::bosonic(2, 5).unwrap()).unwrap();
        assert_eq!((lob.raw_dim(), lob.dim()), (3, 3));
        let lof = lie_basis(Family::Lof, &SectorDescriptor::fermionic(4, 2).unwrap()).unwrap();
        assert_eq!((lof.raw_dim(), lof.dim()), (15, 15));
        let flo = lie_basis(Family::Flo, &SectorDescriptor::fock_plus(4).unwrap()).unwrap();
        assert_eq!((flo.raw_dim(), flo.dim()), (28, 28));
        let lob3 = lie_basis(Family::Lob, &SectorDescriptor::bosonic(3, 2).unwrap()).unwrap();
        assert_eq!(lob3.dim(), 8);
    }

    #[test]
    fn family_must_match_sector() {
        let f = SectorDescriptor::fermionic(4, 2).unwrap();
        assert!(matches!(lie_basis(Family::Lob, &f), Err(Error::FamilyMismatch { .. })));
        assert!(matches!(lie_basis(Family::Flo, &f), Err(Error::FamilyMismatch { .. })));
    }

    #[test]
    fn two_mode_bosons_carry_spin_n_over_2() {
        // π(σ_z/2) = (n_1 - n_2)/2 has the spin-N/2 weights, and the Casimir is j(j+1)
        for n in 1..7 {
            let desc = SectorDescriptor::bosonic(2, n).unwrap();
            let lob = lie_basis(Family::Lob, &desc).unwrap();
            let half = C64::new(0.5, 0.0);
            let jx = lob.pi(&(crate::linalg::testing::sigma_x() * half)).unwrap();
            let jy = lob.pi(&(crate::linalg::testing::sigma_y() * half)).unwrap();
            let jz = lob.pi(&(crate::linalg::testing::sigma_z() * half)).unwrap();
            let j = n as f64 / 2.0;
            let casimir = &jx * &jx + &jy * &jy + &jz * &jz;
            assert!(max_abs_diff(&casimir, &(identity(n + 1) * C64::new(j * (j + 1.0), 0.0))) < 1e-12);
            for k in 0..=n {
                assert!((jz[(k, k)].re - (k as f64 - j)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn family_algebras_are_closed() {
        let cases = [
            (Family::Lob, SectorDescriptor::bosonic(2, 4).unwrap()),
            (Family::Lob, SectorDescriptor::bosonic(3, 3).unwrap()),
            (Family::Lof, SectorDescriptor::fermionic(4, 2).unwrap()),
            (Family::Lof, SectorDescriptor::fermionic(5, 2).unwrap()),
            (Family::Flo, SectorDescriptor::fock_plus(4).unwrap()),
            (Family::Flo, SectorDescriptor::fock_plus(5).unwrap()),
        ];
        for (family, desc) in cases {
            let basis = lie_basis(family, &desc).unwrap();
            assert!(basis.closure_defect() < 1e-9, "{family} on {desc}");
            assert!(basis.generators().orthonormality_defect() < 1e-12);
        }
    }

    #[test]
    fn passive_gates_match_restricted_tensor_powers() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cases = [
            (Family::Lob, SectorDescriptor::bosonic(2, 4).unwrap()),
            (Family::Lob, SectorDescriptor::bosonic(3, 3).unwrap()),
            (Family::Lof, SectorDescriptor::fermionic(4, 2).unwrap()),
            (Family::Lof, SectorDescriptor::fermionic(5, 3).unwrap()),
        ];
        for (family, desc) in cases {
            let basis = lie_basis(family, &desc).unwrap();
            let t = embedding_isometry(&desc).unwrap();
            for _ in 0..5 {
                let h = random_hermitian(&mut rng, desc.modes()) * C64::new(2.0, 0.0);
                let u = matexp(&(&h * I)).unwrap();
                let mut power = u.clone();
                for _ in 1..desc.particles().unwrap() {
                    power = kron(&power, &u);
                }
                let expected = t.adjoint() * power * &t;
                let gate = group_gate(&basis, &h).unwrap();
                assert!(max_abs_diff(gate.matrix(), &expected) < 1e-10, "{family} on {desc}");
            }
        }
    }

    #[test]
    fn gate_examples() {
        let desc = SectorDescriptor::bosonic(2, 2).unwrap();
        let lob = lie_basis(Family::Lob, &desc).unwrap();
        assert!(max_abs_diff(group_gate(&lob, &CMatrix::zeros(2, 2)).unwrap().matrix(), &identity(3)) < 1e-15);
        let h = crate::linalg::testing::diag(&[std::f64::consts::PI, 0.0]);
        let gate = group_gate(&lob, &h).unwrap();
        let expected = crate::linalg::testing::diag(&[1.0, -1.0, 1.0]);
        assert!(max_abs_diff(gate.matrix(), &expected) < 1e-12);
    }

    #[test]
    fn flo_gate_rotates_majoranas() {
        // U m_j U† = Σ_k (e^{4h})_kj m_k for U = exp(Σ h_kl m_k m_l)
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let d = 3;
        let m: Vec<CMatrix> = (1..=2 * d).map(|i| majorana(i, d).unwrap()).collect();
        for _ in 0..5 {
            let h = random_antisymmetric(&mut rng, 2 * d) * C64::new(0.4, 0.0);
            let mut exponent = CMatrix::zeros(1 << d, 1 << d);
            for k in 0..2 * d {
                for l in 0..2 * d {
                    exponent += &m[k] * &m[l] * h[(k, l)];
                }
            }
            let u = matexp(&exponent).unwrap();
            let rot = matexp(&(&h * C64::new(4.0, 0.0))).unwrap();
            for j in 0..2 * d {
                let lhs = &u * &m[j] * u.adjoint();
                let mut rhs = CMatrix::zeros(1 << d, 1 << d);
                for k in 0..2 * d {
                    rhs += &m[k] * rot[(k, j)];
                }
                assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
            }
        }
    }

    #[test]
    fn flo_gates_restrict_the_full_fock_gate() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let d = 4;
        let basis = lie_basis(Family::Flo, &SectorDescriptor::fock_plus(d).unwrap()).unwrap();
        let m: Vec<CMatrix> = (1..=2 * d).map(|i| majorana(i, d).unwrap()).collect();
        let plus = even_parity_indices(d);
        for _ in 0..5 {
            let h = random_antisymmetric(&mut rng, 2 * d);
            let mut exponent = CMatrix::zeros(1 << d, 1 << d);
            for k in 0..2 * d {
                for l in 0..2 * d {
                    exponent += &m[k] * &m[l] * h[(k, l)];
                }
            }
            let full = matexp(&exponent).unwrap();
            let restricted = CMatrix::from_fn(plus.len(), plus.len(), |r, c| full[(plus[r], plus[c])]);
            let gate = group_gate(&basis, &h).unwrap();
            assert!(max_abs_diff(gate.matrix(), &restricted) < 1e-10);
            assert!(crate::linalg::unitarity_defect(gate.matrix()) < 1e-12);
        }
        let mut symmetric = CMatrix::zeros(2 * d, 2 * d);
        symmetric[(0, 1)] = ONE;
        symmetric[(1, 0)] = ONE;
        assert!(group_gate(&basis, &symmetric).is_err());
    }

    #[test]
    fn single_bilinear_gate_is_a_rotation() {
        let d = 4;
        let basis = lie_basis(Family::Flo, &SectorDescriptor::fock_plus(d).unwrap()).unwrap();
        let theta = 0.7;
        let mut h = CMatrix::zeros(2 * d, 2 * d);
        h[(0, 1)] = C64::new(theta / 2.0, 0.0);
        h[(1, 0)] = C64::new(-theta / 2.0, 0.0);
        // exp(θ m1 m2) = cos θ + sin θ m1 m2 since (m1 m2)² = −1
        let mm = &basis.pair_ops[0][1];
        let expected = identity(8) * C64::new(theta.cos(), 0.0) + mm * C64::new(theta.sin(), 0.0);
        assert!(max_abs_diff(group_gate(&basis, &h).unwrap().matrix(), &expected) < 1e-12);
    }

    #[test]
    fn flo_pair_product_identity() {
        for d in [2usize, 3, 4, 5] {
            let basis = lie_basis(Family::Flo, &SectorDescriptor::fock_plus(d).unwrap()).unwrap();
            let n = basis.sector_dim();
            let mut prod = identity(n);
            for i in 0..d {
                prod *= &basis.pair_ops[2 * i][2 * i + 1] * C64::new(0.0, 0.5);
            }
            let expected = identity(n) * C64::new(0.5f64.powi(d as i32), 0.0);
            assert!(max_abs_diff(&prod, &expected) < 1e-12, "d={d}");
        }
        // on the full Fock space Π m_{2i-1} m_{2i} = (−i)^d Q
        let d = 4;
        let full = fock_matrix(&(1..=2 * d).map(FactorToken::Majorana).collect::<Vec<_>>(), d).unwrap();
        let q = crate::secondq::parity_op(d).unwrap();
        assert!(max_abs_diff(&full, &q) < 1e-12);
    }

    #[test]
    fn group_elements_normalize_their_algebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cases = [
            (Family::Lob, SectorDescriptor::bosonic(2, 3).unwrap()),
            (Family::Lob, SectorDescriptor::bosonic(3, 2).unwrap()),
            (Family::Lof, SectorDescriptor::fermionic(4, 2).unwrap()),
            (Family::Flo, SectorDescriptor::fock_plus(4).unwrap()),
        ];
        for (family, desc) in cases {
            let basis = lie_basis(family, &desc).unwrap();
            let h = match family {
                Family::Flo => random_antisymmetric(&mut rng, 2 * desc.modes()),
                _ => random_hermitian(&mut rng, desc.modes()),
            };
            let v = group_gate(&basis, &h).unwrap();
            assert!(normalizes(&v, &basis, 1e-9).unwrap(), "{family} on {desc}");
        }
    }

    #[test]
    fn quartic_majorana_gate_does_not_normalize() {
        let desc = SectorDescriptor::fock_plus(4).unwrap();
        let basis = lie_basis(Family::Flo, &desc).unwrap();
        let quartic = build_matrix(
            &single_term(ONE, (1..=4).map(FactorToken::Majorana).collect()),
            &desc,
        )
        .unwrap();
        let v = Operator::new(desc, matexp(&(quartic * C64::new(0.0, 0.3))).unwrap()).unwrap();
        assert!(normalizer_residual(&v, &basis).unwrap() > 0.1);
        assert!(!normalizes(&v, &basis, 1e-9).unwrap());
    }

    #[test]
    fn particle_hole_gate_properties() {
        for n in [2usize, 3] {
            let desc = SectorDescriptor::fermionic(2 * n, n).unwrap();
            let basis = lie_basis(Family::Lof, &desc).unwrap();
            let w = particle_hole_gate(&desc).unwrap();
            assert!(crate::linalg::unitarity_defect(w.matrix()) < 1e-12);
            let w2 = w.matrix() * w.matrix();
            let c = w2[(0, 0)];
            assert!((c.norm() - 1.0).abs() < 1e-12);
            assert!(max_abs_diff(&w2, &(identity(desc.dim()) * c)) < 1e-12);
            assert!(normalizes(&w, &basis, 1e-9).unwrap());
            // W f_k W† = −f_k†, so W π(X) W† = −π(Xᵀ) for traceless X
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            for _ in 0..3 {
                let x = traceless_part(&random_hermitian(&mut rng, 2 * n));
                let conj = w.matrix() * basis.pi(&x).unwrap() * w.matrix().adjoint();
                assert!(max_abs_diff(&conj, &(-basis.pi(&x.transpose()).unwrap())) < 1e-12);
            }
            assert_eq!(automorphism_type(&w, &basis).unwrap(), AutomorphismType::Outer);
        }
        assert!(particle_hole_gate(&SectorDescriptor::fermionic(5, 2).unwrap()).is_err());
    }

    #[test]
    fn automorphism_types() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let desc = SectorDescriptor::fermionic(4, 2).unwrap();
        let basis = lie_basis(Family::Lof, &desc).unwrap();
        let w = particle_hole_gate(&desc).unwrap();
        for _ in 0..5 {
            let u = group_gate(&basis, &random_hermitian(&mut rng, 4)).unwrap();
            assert_eq!(automorphism_type(&u, &basis).unwrap(), AutomorphismType::Inner);
            let wu = Operator::new(desc, w.matrix() * u.matrix()).unwrap();
            assert_eq!(automorphism_type(&wu, &basis).unwrap(), AutomorphismType::Outer);
        }
        let off = lie_basis(Family::Lof, &SectorDescriptor::fermionic(5, 2).unwrap()).unwrap();
        let v = Operator::new(*off.descriptor(), identity(10)).unwrap();
        assert!(automorphism_type(&v, &off).is_err());
    }

    #[test]
    fn probe_spectrum_is_not_symmetric() {
        for d in 3..10 {
            let p = sorted_eigenvalues(&automorphism_probe(d));
            let q = sorted_eigenvalues(&(-automorphism_probe(d)));
            assert!(!spectra_match(&p, &q), "d={d}");
            assert!(trace(&automorphism_probe(d)).norm() < 1e-12);
        }
    }

    #[test]
    fn non_normalizing_gate_has_no_preimage() {
        let desc = SectorDescriptor::fermionic(4, 2).unwrap();
        let basis = lie_basis(Family::Lof, &desc).unwrap();
        let kerr = build_matrix(
            &single_term(ONE, vec![FactorToken::Number(1), FactorToken::Number(2)]),
            &desc,
        )
        .unwrap();
        let hop = build_matrix(&single_term(ONE, vec![FactorToken::Hop(1, 3)]), &desc).unwrap();
        let gen = traceless_part(&(kerr.clone() * &hop + hop.adjoint() * &kerr));
        let v = Operator::new(desc, matexp(&(gen * C64::new(0.0, 0.9))).unwrap()).unwrap();
        assert!(matches!(automorphism_type(&v, &basis), Err(Error::NotANormalizer(_))));
    }
}
