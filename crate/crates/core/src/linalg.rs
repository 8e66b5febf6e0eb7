//! Dense complex linear algebra: Kronecker products, the matrix exponential,
//! Hilbert–Schmidt geometry and an incrementally grown orthonormal basis of
//! Hermitian matrices.
//!
//! Hermitian `n x n` matrices form a real vector space of dimension `n²`. We
//! work in the real coordinates
//!
//! ```text
//! [A_00, …, A_(n-1)(n-1), √2·Re A_01, √2·Im A_01, √2·Re A_02, …]
//! ```
//!
//! in which the Euclidean dot product equals `Re tr(A†B)`. All span and rank
//! questions are answered in these coordinates.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Default relative threshold for accepting a new direction into a basis.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn ensure_square(a: &CMatrix) -> Result<usize> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::NotSquare { rows: a.nrows(), cols: a.ncols() });
    }
    Ok(a.nrows())
}

pub fn ensure_finite(a: &CMatrix) -> Result<()> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Kronecker product; block `(i, j)` of the result is `a[(i, j)] * b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMatrix::from_fn(ar * br, ac * bc, |r, c| a[(r / br, c / bc)] * b[(r % br, c % bc)])
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    let nb = b.len();
    CVector::from_fn(a.len() * nb, |r, _| a[r / nb] * b[r % nb])
}

/// Frobenius (Hilbert–Schmidt) norm.
pub fn hs_norm(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `Re tr(a† b)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

pub fn trace(a: &CMatrix) -> C64 {
    a.diagonal().iter().sum()
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// `i[a, b]`, which is Hermitian whenever `a` and `b` are.
pub fn i_commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    commutator(a, b) * I
}

pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b + b * a
}

/// `a - (tr a / n)·I`.
pub fn traceless_part(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let shift = trace(a) / n as f64;
    let mut out = a.clone();
    for k in 0..n {
        out[(k, k)] -= shift;
    }
    out
}

pub fn hermiticity_defect(a: &CMatrix) -> f64 {
    hs_norm(&(a - a.adjoint()))
}

pub fn unitarity_defect(a: &CMatrix) -> f64 {
    let n = a.nrows();
    hs_norm(&(a * a.adjoint() - identity(n)))
}

pub fn is_hermitian(a: &CMatrix, tol: f64) -> bool {
    a.is_square() && hermiticity_defect(a) <= tol * hs_norm(a).max(1.0)
}

pub fn is_unitary(a: &CMatrix, tol: f64) -> bool {
    a.is_square() && unitarity_defect(a) <= tol * (a.nrows() as f64).sqrt()
}

pub fn ensure_hermitian(a: &CMatrix, tol: f64, what: &str) -> Result<()> {
    ensure_square(a)?;
    ensure_finite(a)?;
    if !is_hermitian(a, tol) {
        return Err(Error::NotHermitian {
            what: what.to_string(),
            deviation: hermiticity_defect(a),
        });
    }
    Ok(())
}

pub fn ensure_unitary(a: &CMatrix, tol: f64) -> Result<()> {
    ensure_square(a)?;
    ensure_finite(a)?;
    if !is_unitary(a, tol) {
        return Err(Error::NotUnitary { deviation: unitarity_defect(a) });
    }
    Ok(())
}

fn one_norm(a: &CMatrix) -> f64 {
    a.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring around a truncated Taylor
/// series.
///
/// The argument is scaled by `2^-s` until its 1-norm is at most 1/2, where
/// the degree-18 Taylor polynomial is accurate far below `f64` resolution,
/// and the result is squared `s` times.
pub fn matexp(a: &CMatrix) -> Result<CMatrix> {
    let n = ensure_square(a)?;
    ensure_finite(a)?;

    let norm = one_norm(a);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = a * C64::new(0.5f64.powi(squarings), 0.0);

    let mut result = identity(n);
    let mut term = identity(n);
    for k in 1..=18 {
        term = &term * &scaled / C64::new(k as f64, 0.0);
        result += &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    Ok(result)
}

/// Number of real coordinates of an `n x n` Hermitian matrix.
pub fn herm_dim(n: usize) -> usize {
    n * n
}

/// Real coordinates of (the Hermitian part of) `a`, orthonormal for `Re tr(A†B)`.
pub fn herm_coords(a: &CMatrix) -> Vec<f64> {
    let n = a.nrows();
    let mut v = Vec::with_capacity(n * n);
    for k in 0..n {
        v.push(a[(k, k)].re);
    }
    let s = std::f64::consts::SQRT_2;
    for i in 0..n {
        for j in (i + 1)..n {
            let z = a[(i, j)];
            v.push(s * z.re);
            v.push(s * z.im);
        }
    }
    v
}

pub fn herm_from_coords(v: &[f64], n: usize) -> CMatrix {
    debug_assert_eq!(v.len(), n * n);
    let mut a = CMatrix::zeros(n, n);
    for k in 0..n {
        a[(k, k)] = C64::new(v[k], 0.0);
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut p = n;
    for i in 0..n {
        for j in (i + 1)..n {
            let z = C64::new(s * v[p], s * v[p + 1]);
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
            p += 2;
        }
    }
    a
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Ordered list of Hermitian matrices, orthonormal under `Re tr(A†B)`.
#[derive(Clone, Debug)]
pub struct HermitianBasis {
    dim: usize,
    elements: Vec<CMatrix>,
    coords: Vec<Vec<f64>>,
}

impl HermitianBasis {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self { dim, elements: Vec::new(), coords: Vec::new() }
    }

    /// Builds a basis for the span of `matrices`, skipping dependent ones.
    pub fn spanning(dim: usize, matrices: &[CMatrix], tol: f64) -> Result<Self> {
        let mut basis = Self::new(dim);
        for m in matrices {
            basis.extend(m, tol)?;
        }
        Ok(basis)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn coords(&self) -> &[Vec<f64>] {
        &self.coords
    }

    /// Whether the basis spans every Hermitian matrix of its dimension.
    pub fn is_complete(&self) -> bool {
        self.len() == herm_dim(self.dim)
    }

    fn check_candidate(&self, candidate: &CMatrix, tol: f64) -> Result<()> {
        let n = ensure_square(candidate)?;
        if n != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: n });
        }
        ensure_hermitian(candidate, tol.max(1e-12), "basis candidate")
    }

    /// Subtracts the projection of `v` onto `elements[from..]`, in place.
    pub(crate) fn project_out_from(&self, v: &mut [f64], from: usize) {
        for b in &self.coords[from..] {
            let c = dot(b, v);
            axpy(-c, b, v);
        }
    }

    /// Projects `candidate` off the span and appends the normalized residual
    /// when it exceeds `tol · max(1, ‖candidate‖)`. Returns whether the basis
    /// grew.
    pub fn extend(&mut self, candidate: &CMatrix, tol: f64) -> Result<bool> {
        self.check_candidate(candidate, tol)?;
        Ok(self.extend_coords(herm_coords(candidate), tol))
    }

    /// [`extend`](Self::extend) for a vector already in real coordinates.
    pub fn extend_coords(&mut self, mut v: Vec<f64>, tol: f64) -> bool {
        let threshold = tol * norm(&v).max(1.0);
        self.project_out_from(&mut v, 0);
        if norm(&v) <= threshold {
            return false;
        }
        // second pass against drift
        self.project_out_from(&mut v, 0);
        self.push_if_large(v, threshold)
    }

    /// Appends `v` (already projected) when it is above `threshold`.
    pub(crate) fn push_if_large(&mut self, mut v: Vec<f64>, threshold: f64) -> bool {
        let r = norm(&v);
        if r <= threshold || self.is_complete() {
            return false;
        }
        v.iter_mut().for_each(|x| *x /= r);
        self.elements.push(herm_from_coords(&v, self.dim));
        self.coords.push(v);
        true
    }

    /// Real expansion coefficients `⟨E_i, m⟩` of the Hermitian part of `m`.
    pub fn coefficients(&self, m: &CMatrix) -> Vec<f64> {
        let v = herm_coords(m);
        self.coords.iter().map(|b| dot(b, &v)).collect()
    }

    /// HS distance from `m` to the span. Only the Hermitian part of `m` is
    /// seen; callers check Hermiticity themselves.
    pub fn distance(&self, m: &CMatrix) -> f64 {
        let mut v = herm_coords(m);
        self.project_out_from(&mut v, 0);
        self.project_out_from(&mut v, 0);
        norm(&v)
    }

    /// Largest deviation from orthonormality, `max |⟨E_i,E_j⟩ − δ_ij|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.coords.iter().enumerate() {
            for (j, b) in self.coords.iter().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(a, b) - target).abs());
            }
        }
        worst
    }
}

/// Pure-function form of [`HermitianBasis::extend`].
pub fn extend_orthobasis(
    basis: &HermitianBasis,
    candidate: &CMatrix,
    tol: f64,
) -> Result<(HermitianBasis, bool)> {
    let mut next = basis.clone();
    let accepted = next.extend(candidate, tol)?;
    Ok((next, accepted))
}

#[cfg(test)]
pub(crate) mod testing {
    use super::*;

    pub fn sigma_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
    }

    pub fn sigma_y() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
    }

    pub fn sigma_z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
    }

    pub fn diag(values: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_iterator(
            values.len(),
            values.iter().map(|&x| C64::new(x, 0.0)),
        ))
    }

    pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Plain Taylor sum, usable only for small norms.
    pub fn taylor_reference(a: &CMatrix, terms: usize) -> CMatrix {
        let n = a.nrows();
        let mut result = identity(n);
        let mut term = identity(n);
        for k in 1..terms {
            term = &term * a / C64::new(k as f64, 0.0);
            result += &term;
        }
        result
    }
}

#[cfg(test)]
mod tests {
    use super::testing::*;
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_hermitian(n: usize, entries: &[f64]) -> CMatrix {
        let mut a = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = C64::new(entries[(i * n + j) % entries.len()], entries[(j * n + i + 7) % entries.len()]);
            }
        }
        (&a + a.adjoint()) * C64::new(0.5, 0.0)
    }

    #[test]
    fn kron_identities() {
        assert_eq!(kron(&identity(2), &identity(2)), identity(4));
        assert_eq!(kron(&diag(&[1.0, 2.0]), &diag(&[1.0, -1.0])), diag(&[1.0, -1.0, 2.0, -2.0]));
    }

    #[test]
    fn kron_flips_singlet() {
        let xx = kron(&sigma_x(), &sigma_x());
        // |01> - |10> in the basis |00>,|01>,|10>,|11>
        let singlet = CVector::from_vec(vec![ZERO, ONE, -ONE, ZERO]);
        assert_eq!(&xx * &singlet, -singlet);
    }

    #[test]
    fn matexp_examples() {
        assert_eq!(matexp(&CMatrix::zeros(3, 3)).unwrap(), identity(3));
        let a = diag(&[1.0, -1.0]) * C64::new(0.0, PI);
        assert!(max_abs_diff(&matexp(&a).unwrap(), &(-identity(2))) < 1e-12);
        // exp(iθσ_x) = cos θ + i sin θ σ_x
        let b = sigma_x() * C64::new(0.0, PI / 2.0);
        assert!(max_abs_diff(&matexp(&b).unwrap(), &(sigma_x() * I)) < 1e-12);
    }

    #[test]
    fn matexp_rejects_non_finite() {
        let mut a = identity(2);
        a[(0, 1)] = C64::new(f64::NAN, 0.0);
        assert!(matches!(matexp(&a), Err(Error::NonFinite)));
    }

    #[test]
    fn matexp_matches_taylor_at_small_norm() {
        let entries: Vec<f64> = (0..40).map(|k| ((k * 37 % 17) as f64 - 8.0) / 11.0).collect();
        for n in [2, 3, 5, 8] {
            let h = random_hermitian(n, &entries);
            for scale in [0.01, 0.3, 1.0, 2.0] {
                let a = &h * C64::new(0.2 * scale, scale);
                let reference = taylor_reference(&a, 80);
                let got = matexp(&a).unwrap();
                let rel = hs_norm(&(&got - &reference)) / hs_norm(&reference);
                assert!(rel < 1e-12, "n={n} scale={scale} rel={rel:e}");
            }
        }
    }

    #[test]
    fn matexp_matches_spectral_route_at_large_norm() {
        let entries: Vec<f64> = (0..64).map(|k| ((k * 29 % 23) as f64 - 11.0) / 5.0).collect();
        let h = random_hermitian(6, &entries);
        let h = &h * C64::new(100.0 / hs_norm(&h), 0.0);
        let eig = nalgebra::SymmetricEigen::new(h.clone());
        let phases = CMatrix::from_diagonal(&eig.eigenvalues.map(|x| (I * x).exp()));
        let reference = &eig.eigenvectors * phases * eig.eigenvectors.adjoint();
        let got = matexp(&(h * I)).unwrap();
        assert!(hs_norm(&(&got - &reference)) / hs_norm(&reference) < 1e-12);
    }

    #[test]
    fn extend_examples() {
        let mut basis = HermitianBasis::new(2);
        assert!(basis.extend(&sigma_z(), 1e-9).unwrap());

        let (same, accepted) = extend_orthobasis(&basis, &sigma_z(), 1e-9).unwrap();
        assert!(!accepted);
        assert_eq!(same.len(), 1);

        let (grown, accepted) = extend_orthobasis(&basis, &sigma_x(), 1e-9).unwrap();
        assert!(accepted);
        assert_eq!(grown.len(), 2);
        let expected = sigma_x() / C64::new(2f64.sqrt(), 0.0);
        assert!(max_abs_diff(&grown.elements()[1], &expected) < 1e-15);

        // residual √2·1e-12 sits below 1e-9·max(1, ‖σ_z‖)
        let nearly = sigma_z() + sigma_x() * C64::new(1e-12, 0.0);
        let (unchanged, accepted) = extend_orthobasis(&basis, &nearly, 1e-9).unwrap();
        assert!(!accepted);
        assert_eq!(unchanged.len(), 1);
    }

    #[test]
    fn extend_rejects_non_hermitian() {
        let mut basis = HermitianBasis::new(2);
        let bad = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        assert!(matches!(basis.extend(&bad, 1e-9), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn coordinates_are_isometric() {
        let entries: Vec<f64> = (0..30).map(|k| (k as f64).sin()).collect();
        let a = random_hermitian(4, &entries);
        let b = random_hermitian(4, &entries[3..]);
        let (va, vb) = (herm_coords(&a), herm_coords(&b));
        assert!((dot(&va, &vb) - hs_inner(&a, &b)).abs() < 1e-12);
        assert!(max_abs_diff(&herm_from_coords(&va, 4), &a) < 1e-15);
    }

    #[test]
    fn basis_saturates_at_n_squared() {
        let n = 3;
        let mut basis = HermitianBasis::new(n);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..40 {
            let entries: Vec<f64> = (0..20).map(|_| rng.random_range(-1.0..1.0)).collect();
            basis.extend(&random_hermitian(n, &entries), 1e-9).unwrap();
        }
        assert_eq!(basis.len(), n * n);
        assert!(basis.orthonormality_defect() < 1e-12);
    }

    fn hermitian_strategy(n: usize) -> impl Strategy<Value = CMatrix> {
        proptest::collection::vec(-1.0f64..1.0, 2 * n * n).prop_map(move |v| {
            let a = CMatrix::from_fn(n, n, |i, j| C64::new(v[i * n + j], v[n * n + i * n + j]));
            (&a + a.adjoint()) * C64::new(0.5, 0.0)
        })
    }

    fn matrix_strategy(n: usize) -> impl Strategy<Value = CMatrix> {
        proptest::collection::vec(-1.0f64..1.0, 2 * n * n)
            .prop_map(move |v| CMatrix::from_fn(n, n, |i, j| C64::new(v[i * n + j], v[n * n + i * n + j])))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn kron_mixed_product(a in matrix_strategy(2), b in matrix_strategy(3), c in matrix_strategy(2), d in matrix_strategy(3)) {
            let lhs = kron(&a, &b) * kron(&c, &d);
            let rhs = kron(&(&a * &c), &(&b * &d));
            prop_assert!(hs_norm(&(&lhs - &rhs)) <= 1e-13 * hs_norm(&rhs).max(1.0));
        }

        #[test]
        fn kron_associative(a in matrix_strategy(2), b in matrix_strategy(2), c in matrix_strategy(3)) {
            // entries are triple products, equal up to the rounding of one complex multiply
            let lhs = kron(&kron(&a, &b), &c);
            let rhs = kron(&a, &kron(&b, &c));
            for (x, y) in lhs.iter().zip(rhs.iter()) {
                prop_assert!((x - y).norm() <= 4.0 * f64::EPSILON * x.norm().max(f64::MIN_POSITIVE));
            }
        }

        #[test]
        fn matexp_inverse(h in hermitian_strategy(4), scale in 0.0f64..10.0) {
            let h = if hs_norm(&h) > 0.0 { &h * C64::new(scale / hs_norm(&h), 0.0) } else { h };
            let a = &h * I;
            let prod = matexp(&a).unwrap() * matexp(&(-&a)).unwrap();
            prop_assert!(max_abs_diff(&prod, &identity(4)) < 1e-11);
        }

        #[test]
        fn repeated_insertion_is_idempotent(h in hermitian_strategy(3)) {
            let mut basis = HermitianBasis::new(3);
            let first = basis.extend(&h, 1e-9).unwrap();
            let second = basis.extend(&h, 1e-9).unwrap();
            prop_assert!(!second);
            prop_assert_eq!(basis.len(), usize::from(first));
        }
    }
}
