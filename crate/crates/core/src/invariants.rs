//! Family-invariant vectors in the tensor square of a sector and the
//! residuals that test whether a Hamiltonian or gate preserves them.
//!
//! A vector `Ψ = Σ_ij Ψ_ij e_i ⊗ e_j` is stored as its coefficient matrix
//! `Ψ_ij`, so tensor-square actions never materialize `n² x n²` operators:
//!
//! ```text
//! (X ⊗ I + I ⊗ X) ψ  <->  X Ψ + Ψ Xᵀ
//! (V ⊗ V) ψ          <->  V Ψ Vᵀ
//! SWAP ψ             <->  Ψᵀ
//! ```
//!
//! The exchange sign of `Ψ` is the symmetry of the invariant bilinear form
//! `B(φ, χ) = ⟨Ψ|φ ⊗ χ⟩`: symmetric forms give orthogonal middle groups,
//! antisymmetric ones symplectic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    ensure_hermitian, ensure_unitary, hs_norm, is_unitary, traceless_part, CMatrix, CVector, C64, ONE,
};
use crate::reps::{Family, UNITARY_TOL};
use crate::secondq::{fock_monomial, FactorToken, HERMITIAN_TOL};
use crate::sectors::{
    binomial, embedding_isometry, enumerate_basis, fock_index, signed_permutations, tensor_index, SectorDescriptor,
    SectorKind,
};

/// Largest `d` for which the `4^d x 4^d` projectors are built densely.
pub const MAX_PROJECTOR_MODES: usize = 4;

const SWAP_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormType {
    Symmetric,
    Antisymmetric,
}

impl FormType {
    pub fn sign(self) -> f64 {
        match self {
            FormType::Symmetric => 1.0,
            FormType::Antisymmetric => -1.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct InvariantVector {
    descriptor: SectorDescriptor,
    coeffs: CMatrix,
    norm: f64,
    form_type: FormType,
}

impl InvariantVector {
    /// Wraps a coefficient matrix, determining the exchange sign by the
    /// SWAP test. Fails unless `Ψᵀ = ±Ψ` to `1e-12`.
    pub fn from_coeffs(descriptor: SectorDescriptor, coeffs: CMatrix) -> Result<Self> {
        let n = descriptor.dim();
        if coeffs.shape() != (n, n) {
            return Err(Error::DimensionMismatch { expected: n, found: coeffs.nrows() });
        }
        let norm = hs_norm(&coeffs);
        if norm == 0.0 {
            return Err(Error::NoInvariantVector("zero vector".into()));
        }
        let transposed = coeffs.transpose();
        let form_type = if hs_norm(&(&transposed - &coeffs)) <= SWAP_TOL * norm {
            FormType::Symmetric
        } else if hs_norm(&(&transposed + &coeffs)) <= SWAP_TOL * norm {
            FormType::Antisymmetric
        } else {
            return Err(Error::NoInvariantVector(format!(
                "vector on {descriptor} has no definite exchange symmetry"
            )));
        };
        Ok(Self { descriptor, coeffs, norm, form_type })
    }

    pub fn descriptor(&self) -> &SectorDescriptor {
        &self.descriptor
    }

    /// Coefficient matrix `Ψ_ij`.
    pub fn coeffs(&self) -> &CMatrix {
        &self.coeffs
    }

    /// Flattened vector, index `i·n + j` (the [`kron`](crate::linalg::kron) order).
    pub fn psi(&self) -> CVector {
        let n = self.coeffs.nrows();
        CVector::from_fn(n * n, |r, _| self.coeffs[(r / n, r % n)])
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn form_type(&self) -> FormType {
        self.form_type
    }

    /// `⟨Ψ|SWAP|Ψ⟩ / ‖Ψ‖²`, exactly `±1` up to roundoff.
    pub fn swap_sign(&self) -> f64 {
        let t = self.coeffs.transpose();
        self.coeffs.iter().zip(t.iter()).map(|(a, b)| (a.conj() * b).re).sum::<f64>() / (self.norm * self.norm)
    }

    /// `|Ψ⟩⟨Ψ| / ‖Ψ‖²` on the tensor square.
    pub fn projector(&self) -> CMatrix {
        let psi = self.psi() / C64::new(self.norm, 0.0);
        &psi * psi.adjoint()
    }
}

/// `Σ_k (−1)^k D_k ⊗ D_{N−k}` on two bosonic modes; norm `√(N+1)`.
pub fn psi_b(particles: usize) -> Result<InvariantVector> {
    if particles == 0 {
        return Err(Error::NoInvariantVector("no particles".into()));
    }
    let desc = SectorDescriptor::bosonic(2, particles)?;
    let n = particles;
    let mut coeffs = CMatrix::zeros(n + 1, n + 1);
    for k in 0..=n {
        coeffs[(k, n - k)] = if k % 2 == 0 { ONE } else { -ONE };
    }
    InvariantVector::from_coeffs(desc, coeffs)
}

/// Sign of the permutation listing `subset` ascending, then its complement
/// in `1..=d` ascending.
pub fn shuffle_sign(subset: &[usize], d: usize) -> f64 {
    let complement = (1..=d).filter(|k| !subset.contains(k));
    let word: Vec<usize> = subset.iter().copied().chain(complement).collect();
    let inversions: usize =
        (0..word.len()).map(|i| word[i + 1..].iter().filter(|&&x| x < word[i]).count()).sum();
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Half-filling invariant `(1/√C(2N,N)) Σ_{|X|=N} sgn(X) |X⟩ ⊗ |X̄⟩` with
/// `sgn(X)` the sign of the shuffle `(X ascending, X̄ ascending)`.
pub fn psi_f(particles: usize) -> Result<InvariantVector> {
    if particles == 0 {
        return Err(Error::NoInvariantVector("no particles".into()));
    }
    let d = 2 * particles;
    let desc = SectorDescriptor::fermionic(d, particles)?;
    let basis = enumerate_basis(&desc);
    let amp = 1.0 / (desc.dim() as f64).sqrt();
    let mut coeffs = CMatrix::zeros(desc.dim(), desc.dim());
    for (i, state) in basis.states().iter().enumerate() {
        let complement: Vec<u32> = state.occupation().iter().map(|&n| 1 - n).collect();
        let j = basis.position(&complement).expect("complement of a half-filled state is half-filled");
        coeffs[(i, j)] = C64::new(amp * shuffle_sign(&state.occupied_modes(), d), 0.0);
    }
    InvariantVector::from_coeffs(desc, coeffs)
}

/// The same invariant obtained by projecting the first-quantized wedge
/// `|1⟩∧…∧|2N⟩ = (1/√(2N)!) Σ_σ sgn(σ) |σ(1)…σ(2N)⟩` onto the sector
/// tensor square through [`embedding_isometry`].
pub fn psi_f_wedge(particles: usize) -> Result<InvariantVector> {
    if particles == 0 || particles > 4 {
        return Err(Error::MemoryGuard {
            what: format!("wedge expansion at N = {particles}"),
            reason: "supported for 1 <= N <= 4".into(),
        });
    }
    let d = 2 * particles;
    let desc = SectorDescriptor::fermionic(d, particles)?;
    let basis = enumerate_basis(&desc);
    let t = embedding_isometry(&desc)?;
    let perms = signed_permutations(d);
    let amp = 1.0 / (perms.len() as f64).sqrt();
    let column_of = |modes: &[usize]| {
        let mut occ = vec![0u32; d];
        for &m in modes {
            occ[m] = 1;
        }
        basis.position(&occ).expect("distinct modes form a sector state")
    };
    let mut coeffs = CMatrix::zeros(desc.dim(), desc.dim());
    for (p, sign) in perms {
        let (first, second) = p.split_at(particles);
        let (x, y) = (column_of(first), column_of(second));
        let tx = t[(tensor_index(first, d), x)].conj();
        let ty = t[(tensor_index(second, d), y)].conj();
        coeffs[(x, y)] += tx * ty * (sign as f64 * amp);
    }
    InvariantVector::from_coeffs(desc, coeffs)
}

/// Active-optics invariant on the positive-parity sector for even `d`:
/// `(1/√2^{d−1}) Σ_{|X| even} (−1)^{N(X)} |X⟩ ⊗ |X̄⟩` with `N(X) = Σ_{i∈X} i`.
pub fn psi_flo(modes: usize) -> Result<InvariantVector> {
    if modes % 2 == 1 {
        return Err(Error::NoInvariantVector(format!(
            "the positive-parity sector carries no invariant vector for odd d = {modes}"
        )));
    }
    let desc = SectorDescriptor::fock_plus(modes)?;
    let basis = enumerate_basis(&desc);
    let amp = 1.0 / (desc.dim() as f64).sqrt();
    let mut coeffs = CMatrix::zeros(desc.dim(), desc.dim());
    for (i, state) in basis.states().iter().enumerate() {
        let complement: Vec<u32> = state.occupation().iter().map(|&n| 1 - n).collect();
        let j = basis.position(&complement).expect("complement of an even subset is even for even d");
        let label: usize = state.occupied_modes().iter().sum();
        coeffs[(i, j)] = C64::new(if label % 2 == 0 { amp } else { -amp }, 0.0);
    }
    InvariantVector::from_coeffs(desc, coeffs)
}

/// Invariant vector of `family` on `desc`, when one exists: two-mode bosons,
/// half-filled fermions, or the positive-parity sector for even `d`.
pub fn invariant_vector(family: Family, desc: &SectorDescriptor) -> Result<InvariantVector> {
    family.check_sector(desc)?;
    match desc.kind() {
        SectorKind::Bosonic if desc.modes() == 2 => psi_b(desc.particles().unwrap_or(0)),
        SectorKind::Fermionic if desc.is_half_filling() => psi_f(desc.particles().unwrap_or(0)),
        SectorKind::FockPlus => psi_flo(desc.modes()),
        _ => Err(Error::NoInvariantVector(format!("{family} on {desc} has no invariant vector"))),
    }
}

fn check_operator(x: &CMatrix, psi: &InvariantVector) -> Result<()> {
    let n = psi.coeffs.nrows();
    if x.shape() != (n, n) {
        return Err(Error::DimensionMismatch { expected: n, found: x.nrows() });
    }
    Ok(())
}

/// `‖(X₀ ⊗ I + I ⊗ X₀) ψ‖ / ‖ψ‖` for the traceless part `X₀` of Hermitian `X`.
/// Zero exactly when `X₀ ⊗ I + I ⊗ X₀` commutes with `|Ψ⟩⟨Ψ|`.
pub fn annihilation_residual(x: &CMatrix, psi: &InvariantVector) -> Result<f64> {
    check_operator(x, psi)?;
    ensure_hermitian(x, HERMITIAN_TOL, "operator")?;
    let x0 = traceless_part(x);
    let action = &x0 * &psi.coeffs + &psi.coeffs * x0.transpose();
    Ok(hs_norm(&action) / psi.norm)
}

/// `min_φ ‖(V ⊗ V) ψ − e^{iφ} ψ‖ / ‖ψ‖`, attained at `φ = arg⟨ψ|(V⊗V)ψ⟩`.
/// Zero exactly when `V ⊗ V` commutes with `|Ψ⟩⟨Ψ|`.
pub fn eigenvector_residual(v: &CMatrix, psi: &InvariantVector) -> Result<f64> {
    check_operator(v, psi)?;
    ensure_unitary(v, UNITARY_TOL)?;
    let image = v * &psi.coeffs * v.transpose();
    let overlap: C64 = psi.coeffs.iter().zip(image.iter()).map(|(a, b)| a.conj() * b).sum();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { ONE };
    Ok(hs_norm(&(image - &psi.coeffs * phase)) / psi.norm)
}

/// Projection of a Hermitian `H` onto the Lie algebra preserving the
/// form of `psi`: `(H + τ(H)) / 2` with `τ(H) = −B Hᵀ B†` and `B` the
/// unitary rescaling of `Ψ`.
pub fn middle_algebra_projection(h: &CMatrix, psi: &InvariantVector) -> Result<CMatrix> {
    check_operator(h, psi)?;
    let n = psi.coeffs.nrows();
    let b = &psi.coeffs * C64::new((n as f64).sqrt() / psi.norm, 0.0);
    if !is_unitary(&b, 1e-12) {
        return Err(Error::NoInvariantVector("invariant form is degenerate".into()));
    }
    let tau = -(&b * h.transpose() * b.adjoint());
    Ok((h + tau) * C64::new(0.5, 0.0))
}

fn check_projector_modes(d: usize, limit: usize, what: &str) -> Result<()> {
    if d < 2 || d > limit {
        return Err(Error::MemoryGuard {
            what: format!("{what} at d = {d}"),
            reason: format!("the 4^d-dimensional form is built for 2 <= d <= {limit}"),
        });
    }
    Ok(())
}

/// Multiplies `l` on the right by `(I + M ⊗ M)/2` for a Majorana monomial `M`.
fn apply_pair_factor(l: &mut CMatrix, monomial: &[Option<(usize, C64)>]) {
    let dim = monomial.len();
    let old = l.clone();
    for a in 0..dim {
        let (pa, qa) = monomial[a].expect("Majorana monomials are invertible");
        for b in 0..dim {
            let (pb, qb) = monomial[b].expect("Majorana monomials are invertible");
            let c = a * dim + b;
            let src = pa * dim + pb;
            let q = qa * qb;
            for r in 0..dim * dim {
                l[(r, c)] = (old[(r, c)] + old[(r, src)] * q) * 0.5;
            }
        }
    }
}

fn majorana_pair(k: usize, l: usize, d: usize) -> Result<Vec<Option<(usize, C64)>>> {
    fock_monomial(&[FactorToken::Majorana(k), FactorToken::Majorana(l)], d)
}

/// `2^{−d(2d−1)} Π_{k<l} (I ⊗ I + m_k m_l ⊗ m_k m_l)` on the full `4^d`
/// tensor-square Fock space: the projector onto the active-optics singlet.
pub fn l_flo_full(d: usize) -> Result<CMatrix> {
    check_projector_modes(d, MAX_PROJECTOR_MODES, "full pair-product projector")?;
    let dim = 1usize << (2 * d);
    let mut l = CMatrix::identity(dim, dim);
    for k in 1..=2 * d {
        for m in k + 1..=2 * d {
            apply_pair_factor(&mut l, &majorana_pair(k, m, d)?);
        }
    }
    Ok(l)
}

/// Nearest-neighbour form `2^{−2d} Π_i (I + Q_{2i−1,2i}) Π_j (I + Q_{2j,2j+1})`
/// with `Q_{kl} = m_k m_l ⊗ m_k m_l` and `m_{2d+1} ≡ m_1`.
pub fn l_flo_nearest(d: usize) -> Result<CMatrix> {
    check_projector_modes(d, MAX_PROJECTOR_MODES + 1, "nearest-neighbour projector")?;
    let dim = 1usize << (2 * d);
    let mut l = CMatrix::identity(dim, dim);
    for i in 1..=d {
        apply_pair_factor(&mut l, &majorana_pair(2 * i - 1, 2 * i, d)?);
    }
    for j in 1..=d {
        let next = if j == d { 1 } else { 2 * j + 1 };
        apply_pair_factor(&mut l, &majorana_pair(2 * j, next, d)?);
    }
    Ok(l)
}

fn parity_indices(d: usize, even: bool) -> Vec<usize> {
    (0..1usize << d).filter(|c| (c.count_ones() % 2 == 0) == even).collect()
}

/// Block of a `4^d` operator on `H^± ⊗ H^±`, rows and columns in
/// sector-pair order.
pub fn parity_block(l: &CMatrix, d: usize, left_even: bool, right_even: bool) -> CMatrix {
    let dim = 1usize << d;
    let left = parity_indices(d, left_even);
    let right = parity_indices(d, right_even);
    let pairs: Vec<usize> = left.iter().flat_map(|&a| right.iter().map(move |&b| a * dim + b)).collect();
    CMatrix::from_fn(pairs.len(), pairs.len(), |r, c| l[(pairs[r], pairs[c])])
}

/// Restriction to the positive-parity tensor square, in the order of
/// [`InvariantVector::psi`].
pub fn restrict_plus_plus(l: &CMatrix, d: usize) -> CMatrix {
    parity_block(l, d, true, true)
}

/// `tr((P^s ⊗ P^t) L)`.
pub fn parity_block_trace(l: &CMatrix, d: usize, left_even: bool, right_even: bool) -> C64 {
    parity_block(l, d, left_even, right_even).diagonal().iter().sum()
}

/// Index of the Fock state `|X⟩` (mode set, 1-based) in the full space.
pub fn fock_state_index(modes: &[usize], d: usize) -> usize {
    let mut occ = vec![0u32; d];
    for &m in modes {
        occ[m - 1] = 1;
    }
    fock_index(&occ)
}

/// Number of nonzero amplitudes expected in the half-filling invariant.
pub fn half_filling_support(particles: usize) -> usize {
    binomial(2 * particles as u64, particles as u64).unwrap_or(0)
}
